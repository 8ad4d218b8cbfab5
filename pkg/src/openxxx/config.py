"""Run configuration: INI files with [chain], [boundary], [gaudin], [tolerances], [sampling].

Example::

    [chain]
    spins = 1/2, 1
    inhomogeneities = 0.1+0.05i, -0.2
    eta = 0.7+0.1i

    [boundary]
    xi_minus = 0.9
    nu_minus = 1.1
    psi_minus = 0.4-0.3i
    xi_plus = 1.3
    nu_plus = 0.8
    psi_plus = 0.6

    [tolerances]
    default = 1e-9

    [sampling]
    seed = 7
    count = 5
    lambda_window = 1.5

The boundary section takes either the triangular keys above or the general
keys ``xi_minus, phi_tilde_minus, psi_tilde_minus, xi_plus, phi_tilde_plus,
psi_tilde_plus``; general parameters are triangularized on load when needed.
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .boundary import BoundaryParams, TriangularBoundary, sample_cotriangularizable, triangularize
from .errors import BoundaryConditionError, ConfigError
from .gaudin import GaudinConfig
from .lattice import ChainConfig

__all__ = ["Sampling", "RunConfig", "parse_complex", "format_complex", "load_config", "default_config"]

DEFAULT_TOL = 1e-9

TRIANGULAR_KEYS = ("xi_minus", "nu_minus", "psi_minus", "xi_plus", "nu_plus", "psi_plus")
GENERAL_KEYS = ("xi_minus", "phi_tilde_minus", "psi_tilde_minus", "xi_plus", "phi_tilde_plus", "psi_tilde_plus")

_IMAG_ONLY = re.compile(r"^([+-]?)i$")


def parse_complex(text: str) -> complex:
    """Parse ``"a+bi"``, ``"-2i"``, ``"i"``, ``"0.5"`` or ``"1/2"`` into a complex number."""
    s = str(text).strip().replace(" ", "")
    if not s:
        raise ValueError("empty number")
    if "/" in s and "i" not in s and "j" not in s:
        return complex(float(Fraction(s)))
    m = _IMAG_ONLY.match(s)
    if m:
        return complex(0, -1 if m.group(1) == "-" else 1)
    s = s.replace("i", "j")
    s = re.sub(r"(^|[+-])j", r"\g<1>1j", s)
    return complex(s)


def format_complex(z: complex, digits: int = 15) -> str:
    """Deterministic ``a+bi`` text for reports."""
    z = complex(z)
    re_, im = float(f"{z.real:.{digits}g}"), float(f"{z.imag:.{digits}g}")
    re_ = 0.0 if re_ == 0 else re_
    im = 0.0 if im == 0 else im
    if im == 0:
        return repr(re_)
    sign = "+" if im > 0 else "-"
    return f"{re_!r}{sign}{abs(im)!r}i"


@dataclass(frozen=True)
class Sampling:
    seed: int = 0
    count: int = 5
    lambda_window: float = 1.5

    def rng(self, salt: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])

    def lambdas(self, n: int, salt: int = 0) -> list[complex]:
        """``n`` random complex points in the disk of radius ``lambda_window``."""
        g = self.rng(salt)
        r = self.lambda_window * np.sqrt(g.uniform(size=n))
        th = g.uniform(0, 2 * np.pi, size=n)
        return [complex(z) for z in r * np.exp(1j * th)]


@dataclass
class RunConfig:
    chain: ChainConfig | None = None
    boundary: TriangularBoundary | None = None
    general: BoundaryParams | None = None
    gaudin: GaudinConfig | None = None
    tolerances: dict = field(default_factory=dict)
    sampling: Sampling = field(default_factory=Sampling)
    source: str = "defaults"

    def tol(self, name: str, fallback: float | None = None, use_default: bool = True) -> float:
        """Tolerance for ``name``: its own key, else the configured ``default``,
        else ``fallback``, else the master default.

        Pass ``use_default=False`` for tolerances that are not relative
        residuals (rates, limit estimates) so a global ``default`` leaves them alone.
        """
        if name in self.tolerances:
            return self.tolerances[name]
        if use_default and "default" in self.tolerances:
            return self.tolerances["default"]
        return DEFAULT_TOL if fallback is None else fallback

    def echo(self) -> dict:
        """Plain-text view of the configuration for reports."""
        out: dict = {"source": self.source}
        if self.chain is not None:
            out["chain"] = {
                "spins": [str(s) for s in self.chain.spins],
                "inhomogeneities": [format_complex(a) for a in self.chain.inhomogeneities],
                "eta": format_complex(self.chain.eta),
            }
        if self.boundary is not None:
            out["boundary"] = {k: format_complex(getattr(self.boundary, k)) for k in TRIANGULAR_KEYS}
        if self.general is not None:
            out["general_boundary"] = {k: format_complex(getattr(self.general, k)) for k in GENERAL_KEYS}
        if self.gaudin is not None:
            g = self.gaudin
            out["gaudin"] = {
                "spins": [str(s) for s in g.spins],
                "inhomogeneities": [format_complex(a) for a in g.inhomogeneities],
                "xi": format_complex(g.xi), "nu": format_complex(g.nu), "psi": format_complex(g.psi),
            }
        out["tolerances"] = {k: self.tolerances[k] for k in sorted(self.tolerances)}
        out["sampling"] = {"seed": self.sampling.seed, "count": self.sampling.count,
                           "lambda_window": self.sampling.lambda_window}
        return out


def _get(section, key, where):
    if key not in section:
        raise ConfigError(f"missing key '{key}' in [{where}]")
    return section[key]


def _num(section, key, where):
    raw = _get(section, key, where)
    try:
        return parse_complex(raw)
    except ValueError:
        raise ConfigError(f"[{where}] {key} = {raw!r} is not a number (use a+bi)") from None


def _list(section, key, where, conv):
    raw = _get(section, key, where)
    items = [x for x in (t.strip() for t in raw.split(",")) if x]
    try:
        return [conv(x) for x in items]
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"[{where}] {key} = {raw!r} could not be parsed") from None


def _spin(text):
    s = Fraction(text)
    if s <= 0 or (2 * s).denominator != 1:
        raise ValueError(text)
    return s


def load_config(path: str | Path) -> RunConfig:
    """Read an INI run configuration, raising :class:`ConfigError` with the offending key."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser()
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    rc = RunConfig(source=str(path))

    if cp.has_section("chain"):
        sec = cp["chain"]
        spins = _list(sec, "spins", "chain", _spin)
        alphas = _list(sec, "inhomogeneities", "chain", parse_complex)
        eta = _num(sec, "eta", "chain")
        if eta == 0:
            raise ConfigError("[chain] eta must be nonzero")
        if len(spins) != len(alphas):
            raise ConfigError("[chain] spins and inhomogeneities have different lengths")
        rc.chain = ChainConfig(spins, alphas, eta)

    if cp.has_section("boundary"):
        sec = cp["boundary"]
        if "nu_minus" in sec or "nu_plus" in sec:
            rc.boundary = TriangularBoundary(*[_num(sec, k, "boundary") for k in TRIANGULAR_KEYS])
        else:
            rc.general = BoundaryParams(*[_num(sec, k, "boundary") for k in GENERAL_KEYS])
            eta = rc.chain.eta if rc.chain is not None else 1.0
            try:
                rc.boundary = triangularize(rc.general, eta)
            except BoundaryConditionError as exc:
                raise ConfigError(f"[boundary] {exc}") from None

    if cp.has_section("gaudin"):
        sec = cp["gaudin"]
        if "spins" in sec:
            spins = _list(sec, "spins", "gaudin", _spin)
            alphas = _list(sec, "inhomogeneities", "gaudin", parse_complex)
        elif rc.chain is not None:
            spins, alphas = rc.chain.spins, rc.chain.inhomogeneities
        else:
            raise ConfigError("missing key 'spins' in [gaudin] (and no [chain] to inherit from)")
        try:
            rc.gaudin = GaudinConfig(spins, alphas, *[_num(sec, k, "gaudin") for k in ("xi", "nu", "psi")])
        except ValueError as exc:
            raise ConfigError(f"[gaudin] {exc}") from None

    if cp.has_section("tolerances"):
        for k, v in cp["tolerances"].items():
            try:
                rc.tolerances[k] = float(v)
            except ValueError:
                raise ConfigError(f"[tolerances] {k} = {v!r} is not a number") from None

    if cp.has_section("sampling"):
        sec = cp["sampling"]
        try:
            rc.sampling = Sampling(
                int(sec.get("seed", 0)), int(sec.get("count", 5)), float(sec.get("lambda_window", 1.5))
            )
        except ValueError as exc:
            raise ConfigError(f"[sampling] {exc}") from None
    return rc


def _rand_c(g, scale=1.0):
    return complex(*(scale * g.normal(size=2)))


def default_config(n: int = 2, seed: int = 0, diagonal: bool = False) -> RunConfig:
    """Random but reproducible configuration with ``n`` sites of alternating spin 1/2, 1."""
    if n < 1:
        raise ConfigError("--n must be at least 1")
    sampling = Sampling(seed=seed)
    g = sampling.rng(12345)
    spins = [Fraction(1, 2) if m % 2 == 0 else Fraction(1) for m in range(n)]
    alphas = [_rand_c(g, 0.5) for _ in range(n)]
    eta = 0.5 + 0.5 * g.uniform() + 0.2j * g.normal()
    general = sample_cotriangularizable(g)
    if diagonal:
        general = BoundaryParams(general.xi_minus, 0.0, 0.0, general.xi_plus, 0.0, 0.0)
    tb = triangularize(general, eta)
    gal = [0.3 + 0.4 * m + 0.1j * g.normal() for m in range(n)]
    gaudin = GaudinConfig(spins, gal, 1.0 + _rand_c(g, 0.3), 1.0 + _rand_c(g, 0.3),
                          0.0 if diagonal else _rand_c(g, 0.5))
    return RunConfig(ChainConfig(spins, alphas, eta), tb, general, gaudin, {}, sampling)
