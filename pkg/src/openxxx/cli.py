"""Command-line interface: ``openxxx verify | solve | spectrum``.

Exit status is 0 when every check passes, 1 when a check fails and 2 on a
usage or configuration error. JSON reports carry ``schema_version`` and are
byte-identical for identical inputs; wall-clock timings appear only in the
human-readable output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .bethe import lambda_M, solve_bethe, spectral_match
from .config import RunConfig, default_config, format_complex, load_config, parse_complex
from .errors import ConfigError, DimensionError, OpenXXXError
from .gaudin import chi_M, solve_gaudin, tau
from .sklyanin import transfer_matrix
from .suites import SUITES, run_suite
from .tensor import max_abs

SCHEMA_VERSION = 1
DEFAULT_MAX_DIM = 4096


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _report(command: str, rc: RunConfig, checks: list[dict], extra: dict | None = None) -> dict:
    rep = {
        "schema_version": SCHEMA_VERSION,
        "tool": "openxxx",
        "version": __version__,
        "command": command,
        "seed": rc.sampling.seed,
        "config": rc.echo(),
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    if extra:
        rep.update(extra)
    return rep


def _print_checks(checks: list[dict], elapsed: float, stream=None) -> None:
    stream = sys.stdout if stream is None else stream
    width = max([len(c["name"]) for c in checks] + [5])
    rel_w = max([len(c["relation"]) for c in checks] + [8])
    print(f"{'check':<{width}}  {'relation':<{rel_w}}  {'residual':>12}  {'tolerance':>10}  status", file=stream)
    for c in checks:
        status = "pass" if c["passed"] else "FAIL"
        print(f"{c['name']:<{width}}  {c['relation']:<{rel_w}}  {c['residual']:>12.3e}  "
              f"{c['tolerance']:>10.1e}  {status}", file=stream)
    print(f"{sum(c['passed'] for c in checks)}/{len(checks)} passed in {elapsed:.2f} s", file=stream)


def _check_dim(dim: int, cap: int) -> None:
    if dim > cap:
        raise DimensionError(f"Hilbert space dimension {dim} exceeds the cap {cap} (raise with --max-dim)")


def _run_config(args) -> RunConfig:
    if getattr(args, "config", None):
        rc = load_config(args.config)
        if getattr(args, "seed", None) is not None:
            rc.sampling = replace(rc.sampling, seed=args.seed)
        return rc
    return default_config(n=args.n, seed=args.seed or 0, diagonal=getattr(args, "diagonal", False))


def cmd_verify(args) -> int:
    rc = _run_config(args)
    if rc.chain is not None:
        _check_dim(rc.chain.dim, args.max_dim)
    t0 = time.perf_counter()
    checks = [c.as_dict() for c in run_suite(args.suite, rc, args.m)]
    elapsed = time.perf_counter() - t0
    rep = _report(f"verify {args.suite}", rc, checks, {"suite": args.suite, "M": args.m})
    if args.json:
        _write(_dump(rep), args.json)
    if not args.quiet and args.json != "-":
        _print_checks(checks, elapsed)
    return 0 if rep["passed"] else 1


def _excitation_capacity(spins) -> int:
    return int(sum(2 * s for s in spins))


def _lambdas(args, rc: RunConfig) -> list[complex]:
    if args.lambdas:
        try:
            return [parse_complex(x) for x in args.lambdas.split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"--lambdas {args.lambdas!r} could not be parsed") from None
    return rc.sampling.lambdas(3, salt=99)


def cmd_solve(args) -> int:
    if not args.config:
        raise ConfigError("solve requires --config FILE")
    rc = load_config(args.config)
    if args.seed is not None:
        rc.sampling = replace(rc.sampling, seed=args.seed)
    lams = _lambdas(args, rc)
    t0 = time.perf_counter()
    warnings = []
    solutions = []
    if args.mode == "chain":
        if rc.chain is None or rc.boundary is None:
            raise ConfigError("chain mode needs [chain] and [boundary] sections")
        cfg, tb = rc.chain, rc.boundary
        _check_dim(cfg.dim, args.max_dim)
        if args.m > _excitation_capacity(cfg.spins):
            warnings.append(f"M={args.m} exceeds the excitation capacity {_excitation_capacity(cfg.spins)}")
        states = solve_bethe(args.m, cfg, tb, n_random=args.seeds, rng_seed=rc.sampling.seed)
        tol = rc.tol("spectral", 1e-8)
        for st in states:
            rows = [] if st.null else spectral_match(st, cfg, tb, lams)
            solutions.append({
                "roots": [format_complex(z) for z in st.roots],
                "residual": float(f"{st.max_residual:.6e}"),
                "null_vector": st.null,
                "samples": [{"lambda": format_complex(r["lambda"]), "eigenvalue": format_complex(r["Lambda"]),
                             "eigenvalue_distance": float(f"{r['eigenvalue_distance']:.6e}"),
                             "eigenvector_residual": float(f"{r['eigenvector_residual']:.6e}")} for r in rows],
                "spectral_match": bool(rows) and all(
                    r["eigenvalue_distance"] <= tol and r["eigenvector_residual"] <= tol for r in rows),
            })
    else:
        gc = rc.gaudin
        if gc is None:
            raise ConfigError("gaudin mode needs a [gaudin] section")
        _check_dim(gc.dim, args.max_dim)
        if args.m > _excitation_capacity(gc.spins):
            warnings.append(f"M={args.m} exceeds the excitation capacity {_excitation_capacity(gc.spins)}")
        states = solve_gaudin(args.m, gc, n_random=args.seeds, rng_seed=rc.sampling.seed)
        tol = rc.tol("spectral", 1e-7)
        for st in states:
            rows = []
            if not st.null:
                for lam in lams:
                    T = tau(lam, gc).matrix
                    chi = chi_M(lam, st.roots, gc)
                    ev = np.linalg.eigvals(T)
                    v = st.vector
                    rows.append({
                        "lambda": format_complex(lam), "eigenvalue": format_complex(chi),
                        "eigenvalue_distance": float(f"{np.min(np.abs(ev - chi)) / max(1.0, abs(chi)):.6e}"),
                        "eigenvector_residual": float(
                            f"{max_abs(T @ v - chi * v) / (max(1.0, abs(chi)) * max_abs(v)):.6e}"),
                    })
            solutions.append({
                "roots": [format_complex(z) for z in st.roots],
                "residual": float(f"{st.max_residual:.6e}"),
                "null_vector": st.null,
                "samples": rows,
                "spectral_match": bool(rows) and all(
                    r["eigenvalue_distance"] <= tol and r["eigenvector_residual"] <= tol for r in rows),
            })
    elapsed = time.perf_counter() - t0
    if not solutions:
        warnings.append("no root set converged")
    rep = {
        "schema_version": SCHEMA_VERSION,
        "tool": "openxxx",
        "version": __version__,
        "command": f"solve {args.mode}",
        "M": args.m,
        "seed": rc.sampling.seed,
        "config": rc.echo(),
        "solutions": solutions,
        "warnings": warnings,
    }
    text = _dump(rep)
    _write(text, args.out)
    if args.out not in (None, "-") and not args.quiet:
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)
        print(f"{len(solutions)} root set(s), "
              f"{sum(s['spectral_match'] for s in solutions)} with spectral match, "
              f"written to {args.out} in {elapsed:.2f} s")
    else:
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)
    return 0


def _sorted_eigs(mat: np.ndarray) -> np.ndarray:
    ev = np.linalg.eigvals(mat)
    # canonical order: real part, then imaginary part (rounded to suppress jitter)
    keys = np.lexsort((np.round(ev.imag, 10), np.round(ev.real, 10)))
    return ev[keys]


def cmd_spectrum(args) -> int:
    if not args.config:
        raise ConfigError("spectrum requires --config FILE")
    rc = load_config(args.config)
    lams = _lambdas(args, rc)
    rows = []
    if args.mode == "chain":
        if rc.chain is None or rc.boundary is None:
            raise ConfigError("chain mode needs [chain] and [boundary] sections")
        _check_dim(rc.chain.dim, args.max_dim)
        for lam in lams:
            ev = _sorted_eigs(transfer_matrix(lam, rc.chain, rc.boundary).matrix)
            rows.append((lam, ev, lambda_M(lam, [], rc.chain, rc.boundary)))
    else:
        if rc.gaudin is None:
            raise ConfigError("gaudin mode needs a [gaudin] section")
        _check_dim(rc.gaudin.dim, args.max_dim)
        for lam in lams:
            ev = _sorted_eigs(tau(lam, rc.gaudin).matrix)
            rows.append((lam, ev, chi_M(lam, [], rc.gaudin)))
    if args.format == "json":
        text = _dump({
            "schema_version": SCHEMA_VERSION,
            "tool": "openxxx",
            "version": __version__,
            "command": f"spectrum {args.mode}",
            "config": rc.echo(),
            "order": "real part, then imaginary part",
            "spectra": [{"lambda": format_complex(l), "vacuum_eigenvalue": format_complex(v),
                         "eigenvalues": [format_complex(z) for z in ev]} for l, ev, v in rows],
        })
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "index", "eigenvalue_real", "eigenvalue_imag"])
        for lam, ev, _ in rows:
            for i, z in enumerate(ev):
                w.writerow([format_complex(lam), i, f"{z.real:.15g}", f"{z.imag:.15g}"])
        text = buf.getvalue()
    _write(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="openxxx", description="Open XXX chain with triangular boundaries "
                                "and its Gaudin limit: verification, Bethe roots and spectra.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a residual-check suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--n", type=int, default=2, help="sites for the built-in configuration (default 2)")
    v.add_argument("--m", type=int, default=1, help="number of Bethe roots (default 1)")
    v.add_argument("--config", help="INI configuration file")
    v.add_argument("--seed", type=int, default=None, help="sampling seed")
    v.add_argument("--json", help="write the JSON report here ('-' for stdout)")
    v.add_argument("--diagonal", action="store_true", help="built-in configuration with ψ = 0")
    v.add_argument("--max-dim", type=int, default=DEFAULT_MAX_DIM)
    v.add_argument("--quiet", action="store_true")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("solve", help="solve the Bethe equations")
    s.add_argument("mode", choices=["chain", "gaudin"])
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--config", required=False)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--seeds", type=int, default=None, help="number of random Newton seeds")
    s.add_argument("--lambdas", help="comma-separated λ values for eigenvalue samples")
    s.add_argument("--out", default="-", help="solutions JSON path (default stdout)")
    s.add_argument("--max-dim", type=int, default=DEFAULT_MAX_DIM)
    s.add_argument("--quiet", action="store_true")
    s.set_defaults(func=cmd_solve)

    sp = sub.add_parser("spectrum", help="dense spectra of t(λ) or τ(λ)")
    sp.add_argument("--config", required=False)
    sp.add_argument("--lambdas", required=True)
    sp.add_argument("--mode", choices=["chain", "gaudin"], default="chain")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--out", default="-")
    sp.add_argument("--max-dim", type=int, default=DEFAULT_MAX_DIM)
    sp.set_defaults(func=cmd_spectrum)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OpenXXXError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
