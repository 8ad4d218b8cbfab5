"""Named verification suites: each returns residual checks tagged by the relation tested."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bethe import bethe_F, bethe_vector, lambda_M, off_shell_residual
from .boundary import dual_reflection_residual, reflection_residual
from .config import RunConfig
from .errors import ConfigError
from .expansion import leading_ratio_rate
from .gaudin import (
    chain_from_gaudin,
    chi0,
    gaudin_bethe_vector,
    gaudin_f,
    gaudin_F_operator,
    gaudin_hamiltonians,
    gaudin_off_shell_residual,
    quasiclassical_check,
    residue,
    tau,
)
from .lattice import r_matrix_properties, vacuum, verify_mixed_rtt, verify_rtt, verify_ybe
from .sklyanin import (
    sklyanin_determinant,
    sklyanin_determinant_trace,
    transfer_matrix,
    transfer_matrix_trace,
    vacuum_eigenvalues,
    verify_exchange_algebra,
    verify_exchange,
)
from .tensor import max_abs

__all__ = ["Check", "SUITES", "run_suite"]


@dataclass(frozen=True)
class Check:
    name: str
    relation: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "relation": self.relation,
            "residual": float(f"{self.residual:.6e}"),
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _comm(a: np.ndarray, b: np.ndarray) -> float:
    return max_abs(a @ b - b @ a) / max(max_abs(a) * max_abs(b), 1e-300)


def _roots(rng, M, window):
    return [complex(z) for z in window * (rng.normal(size=M) + 1j * rng.normal(size=M)) / 2]


def suite_ybe(rc: RunConfig, M: int) -> list[Check]:
    tol = rc.tol("ybe", 1e-12)
    eta = rc.chain.eta
    s = rc.sampling
    pts = s.lambdas(2 * s.count, salt=1)
    worst = {"YBE": 0.0, "unitarity": 0.0, "parity": 0.0, "temporal": 0.0, "crossing": 0.0}
    for lam, mu in zip(pts[::2], pts[1::2]):
        worst["YBE"] = max(worst["YBE"], verify_ybe(lam, mu, eta))
        for k, v in r_matrix_properties(lam, eta).items():
            worst[k] = max(worst[k], v)
    return [Check(f"R-matrix {k}", k, v, tol) for k, v in worst.items()]


def suite_rtt(rc: RunConfig, M: int) -> list[Check]:
    tol = rc.tol("rtt", 1e-10)
    s = rc.sampling
    pts = s.lambdas(2 * s.count, salt=2)
    w = {"RTT": 0.0, "tTRT": 0.0, "tTtTR": 0.0}
    for lam, mu in zip(pts[::2], pts[1::2]):
        w["RTT"] = max(w["RTT"], verify_rtt(lam, mu, rc.chain))
        for k, v in verify_mixed_rtt(lam, mu, rc.chain).items():
            w[k] = max(w[k], v)
    return [Check(f"monodromy {k}", k, v, tol) for k, v in w.items()]


def suite_reflection(rc: RunConfig, M: int) -> list[Check]:
    tol = rc.tol("reflection", 1e-10)
    eta = rc.chain.eta
    s = rc.sampling
    pts = s.lambdas(2 * s.count, salt=3)
    out = []
    for label, bd in (("triangular", rc.boundary), ("general", rc.general)):
        if bd is None:
            continue
        re_ = max(reflection_residual(l, m, bd.k_minus, eta) for l, m in zip(pts[::2], pts[1::2]))
        dre = max(dual_reflection_residual(l, m, lambda x, e=eta, b=bd: b.k_plus(x, e), eta)
                  for l, m in zip(pts[::2], pts[1::2]))
        out += [Check(f"K- {label}", "RE", re_, tol), Check(f"K+ {label}", "dRE", dre, tol)]
    return out


def suite_exchange(rc: RunConfig, M: int) -> list[Check]:
    tol = rc.tol("exchange", 1e-10)
    s = rc.sampling
    pts = s.lambdas(2 * s.count, salt=4)
    out = []
    for label, bd in (("triangular", rc.boundary), ("general", rc.general)):
        if bd is None:
            continue
        r = max(verify_exchange(l, m, rc.chain, bd) for l, m in zip(pts[::2], pts[1::2]))
        out.append(Check(f"Sklyanin monodromy {label}", "exchangeRE", r, tol))
    return out


def suite_appendixB(rc: RunConfig, M: int) -> list[Check]:
    tol = rc.tol("appendixb", 1e-9)
    s = rc.sampling
    pts = s.lambdas(4 * s.count, salt=5)
    worst: dict = {}
    for k in range(s.count):
        lam, mu, m1, m2 = pts[4 * k:4 * k + 4]
        for name, v in verify_exchange_algebra(lam, mu, rc.chain, rc.boundary, m1, m2).items():
            worst[name] = max(worst.get(name, 0.0), v)
    return [Check(f"commutation {k}", k, v, tol) for k, v in worst.items()]


def suite_commutativity(rc: RunConfig, M: int) -> list[Check]:
    tol = rc.tol("commutativity", 1e-10)
    s = rc.sampling
    pts = s.lambdas(2 * s.count, salt=6)
    w_t, w_form = 0.0, 0.0
    for lam, mu in zip(pts[::2], pts[1::2]):
        a = transfer_matrix(lam, rc.chain, rc.boundary).matrix
        b = transfer_matrix(mu, rc.chain, rc.boundary).matrix
        w_t = max(w_t, _comm(a, b))
        tr = transfer_matrix_trace(lam, rc.chain, rc.boundary).matrix
        w_form = max(w_form, max_abs(a - tr) / max_abs(tr))
    out = [Check("[t(λ), t(μ)]", "open-tt", w_t, tol), Check("κ-form vs trace form", "open-t", w_form, tol)]
    if rc.general is not None:
        w_g = 0.0
        for lam, mu in zip(pts[::2], pts[1::2]):
            a = transfer_matrix_trace(lam, rc.chain, rc.general).matrix
            b = transfer_matrix_trace(mu, rc.chain, rc.general).matrix
            w_g = max(w_g, _comm(a, b))
        out.append(Check("[t(λ), t(μ)] general K", "open-tt", w_g, tol))
    return out


def suite_determinant(rc: RunConfig, M: int) -> list[Check]:
    tol = rc.tol("determinant", 1e-10)
    s = rc.sampling
    pts = s.lambdas(2 * s.count, salt=7)
    w = {"forms": 0.0, "central": 0.0, "vacuum": 0.0}
    cfg, tb = rc.chain, rc.boundary
    eta = cfg.eta
    omega = vacuum(cfg)
    for lam, mu in zip(pts[::2], pts[1::2]):
        d = sklyanin_determinant(lam, cfg, tb).matrix
        w["forms"] = max(w["forms"], max_abs(d - sklyanin_determinant_trace(lam, cfg, tb).matrix) / max_abs(d))
        w["central"] = max(w["central"], _comm(d, transfer_matrix(mu, cfg, tb).matrix))
        al, _ = vacuum_eigenvalues(lam + eta / 2, cfg, tb)
        _, dh = vacuum_eigenvalues(lam - eta / 2, cfg, tb)
        ev = 2 * lam * al * dh
        w["vacuum"] = max(w["vacuum"], max_abs(d @ omega - ev * omega) / max(abs(ev), 1e-300))
    return [
        Check("resolved vs trace form", "Del-calT", w["forms"], tol),
        Check("[Δ(λ), t(μ)]", "Delta-central", w["central"], tol),
        Check("Δ Ω+ eigenvalue", "Del-calTOm", w["vacuum"], tol),
    ]


def suite_offshell(rc: RunConfig, M: int) -> list[Check]:
    tol = rc.tol("offshell", 1e-9)
    s = rc.sampling
    rng = s.rng(8)
    worst = 0.0
    vac = 0.0
    cfg, tb = rc.chain, rc.boundary
    for lam in s.lambdas(s.count, salt=9):
        worst = max(worst, off_shell_residual(lam, _roots(rng, M, s.lambda_window), cfg, tb))
        t = transfer_matrix(lam, cfg, tb).matrix
        om = vacuum(cfg)
        L0 = lambda_M(lam, [], cfg, tb)
        vac = max(vac, max_abs(t @ om - L0 * om) / max(abs(L0), 1e-300))
    return [Check(f"t(λ)Ψ_{M} off shell", "t-on-PsiM", worst, tol), Check("t(λ)Ω+", "t-on-Om+", vac, tol)]


def suite_gaudin(rc: RunConfig, M: int) -> list[Check]:
    tol = rc.tol("gaudin", 1e-9)
    gc = rc.gaudin
    s = rc.sampling
    rng = s.rng(10)
    pts = s.lambdas(2 * s.count, salt=11)
    wF = wt = wo = wv = 0.0
    for lam, mu in zip(pts[::2], pts[1::2]):
        a, b = gaudin_F_operator(lam, gc).matrix, gaudin_F_operator(mu, gc).matrix
        wF = max(wF, _comm(a, b))
        ta, tb_ = tau(lam, gc).matrix, tau(mu, gc).matrix
        wt = max(wt, _comm(ta, tb_))
        wo = max(wo, gaudin_off_shell_residual(lam, _roots(rng, M, s.lambda_window), gc))
        om = vacuum(gc)
        c0 = chi0(lam, gc)
        wv = max(wv, max_abs(ta @ om - c0 * om) / max(abs(c0), 1e-300))
    H, Ht = gaudin_hamiltonians(gc)
    wres = 0.0
    for m, a in enumerate(gc.inhomogeneities):
        for lam0, h in ((a, H[m]), (-a, Ht[m])):
            wres = max(wres, max_abs(residue(lam0, gc, 1e-6) - 4 * h.matrix) / max_abs(4 * h.matrix))
    hs = [h.matrix for h in H + Ht]
    wh = max(_comm(x, y) for x in hs for y in hs)
    return [
        Check("[F(λ), F(μ)]", "F-commute", wF, rc.tol("f_commute", 1e-13)),
        Check("[τ(λ), τ(μ)]", "open-tau", wt, rc.tol("gaudin", 1e-10)),
        Check("τ(λ)Ω+", "egnv-chi0", wv, tol),
        Check(f"τ(λ)φ_{M} off shell", "tau-on-phiM", wo, tol),
        Check("residues of τ at ±α_m", "open-Ham", wres, rc.tol("residue", 1e-4, use_default=False)),
        Check("[H_m, H_n]", "open-Ham", wh, rc.tol("gaudin", 1e-10)),
    ]


def suite_expansion(rc: RunConfig, M: int) -> list[Check]:
    gc = rc.gaudin
    s = rc.sampling
    lam = s.lambdas(1, salt=12)[0]
    rep = quasiclassical_check(lam, gc)
    out = [Check(f"η-coefficient {k}", "final-exp-t-D-open", v, t) for k, (v, t) in rep.checks.items()]
    rng = s.rng(13)
    roots = _roots(rng, max(M, 1), s.lambda_window)
    phi = gaudin_bethe_vector(roots, gc)

    def psi(eta):
        cfg, tb = chain_from_gaudin(gc, eta)
        return bethe_vector(roots, cfg, tb)

    def F(eta):
        cfg, tb = chain_from_gaudin(gc, eta)
        return np.array([bethe_F(i, roots, cfg, tb) for i in range(len(roots))])

    f = np.array([gaudin_f(i, roots, gc) for i in range(len(roots))])
    tol_rate = rc.tol("rate", 0.1, use_default=False)
    for label, fun, target, power, rel in (("Ψ_M/η^M -> φ_M", psi, phi, len(roots), "PsiM-exp"),
                                           ("F_M/η -> f_M", F, f, 1, "Fandf")):
        errs, rates = leading_ratio_rate(fun, target, power)
        out.append(Check(f"{label} error at η=1e-4", rel, errs[-1], rc.tol("limit", 1e-3, use_default=False)))
        out.append(Check(f"{label} |order - 1|", rel, max(abs(r - 1) for r in rates), tol_rate))
    return out


SUITES: dict[str, Callable[[RunConfig, int], list[Check]]] = {
    "ybe": suite_ybe,
    "rtt": suite_rtt,
    "reflection": suite_reflection,
    "exchange": suite_exchange,
    "appendixB": suite_appendixB,
    "commutativity": suite_commutativity,
    "determinant": suite_determinant,
    "offshell": suite_offshell,
    "gaudin": suite_gaudin,
    "expansion": suite_expansion,
}

NEEDS = {
    "gaudin": ("gaudin",),
    "expansion": ("gaudin",),
    "ybe": ("chain",),
    "rtt": ("chain",),
    "reflection": ("chain",),
    "exchange": ("chain",),
}


def run_suite(name: str, rc: RunConfig, M: int = 1) -> list[Check]:
    for part in NEEDS.get(name, ("chain", "boundary")):
        if getattr(rc, part) is None:
            raise ConfigError(f"suite '{name}' needs a [{part}] section")
    return SUITES[name](rc, M)
