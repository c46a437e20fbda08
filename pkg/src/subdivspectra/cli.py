"""Command-line entry point: ``python -m subdivspectra <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .complex import (
    Complex,
    boundary_of_simplex,
    dense_triplets,
    down_laplacian,
    load_complex,
    save_complex,
    simplex,
    write_triplets,
)
from .decimation import (
    RenormPoint,
    det_x0,
    det_x0_explicit,
    laplacian_from_adjacency_limit,
    laplacian_map,
    limit_quantile_1d,
    limit_quantile_cd,
    predicted_spectrum_adjacency,
    renormalize,
    renormalize_unfactored,
    semiconjugacy_residual,
    sine_law,
)
from .fractal import build_levels, derive_fractal_data, verify_duality, write_level_json
from .schreier import SizeBudgetError, build_schreier, loop_count, size_budget, verify_approx
from .spectral import l1_distance, spectrum_of, write_step_csv
from .subdivide import SubdivisionKind, iterate, q_ratio, subdivide

log = logging.getLogger("subdivspectra")


@dataclass(frozen=True)
class RunConfig:
    command: str
    kind: SubdivisionKind | None = None
    d: int | None = None
    level: int | None = None
    input: Path | None = None
    output: Path | None = None
    seed: int = 0

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        kind = _kind(args) if hasattr(args, "kind") else None
        d = getattr(args, "d", None)
        if d is not None and d < 1:
            raise ValueError("d must be >= 1")
        level = next((getattr(args, a) for a in ("n", "k", "depth", "n_max") if getattr(args, a, None) is not None), None)
        if level is not None and level < 0:
            raise ValueError("level counts must be >= 0")
        out = getattr(args, "out", None)
        src = getattr(args, "input", None)
        return cls(args.command, kind, d, level, Path(src) if src else None, Path(out) if out else None,
                   getattr(args, "seed", 0))


def _kind(args) -> SubdivisionKind:
    return SubdivisionKind.parse(args.kind, getattr(args, "r", None))


def _initial(path: str | None, d: int) -> Complex:
    return load_complex(path) if path else simplex(d)


def _check_size(count: int) -> None:
    if count > size_budget():
        raise SizeBudgetError(f"{count} top faces exceed the size budget {size_budget()}")


def cmd_subdivide(args) -> int:
    kind = _kind(args)
    K = _initial(args.input, args.d)
    _check_size(len(K.faces(K.dim)) * len(_top_faces(kind, K.dim)) ** args.n)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    levels = iterate(kind, K, args.n)
    with open(out / "f_vectors.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["level"] + [f"f{i}" for i in range(K.dim + 1)])
        for k, C in enumerate(levels):
            save_complex(C, out / f"level_{k}.json")
            w.writerow([k, *C.f_vector])
    return 0


def cmd_spectrum(args) -> int:
    K = load_complex(args.input)
    dim = args.dim if args.dim is not None else K.dim
    write_step_csv(spectrum_of(down_laplacian(K, dim)), args.out)
    return 0


def cmd_schreier(args) -> int:
    g = build_schreier(args.d, args.n)
    if args.out:
        write_triplets(args.out, dense_triplets(g.adjacency))
    ok = loop_count(g) == args.d + 1
    if args.verify_approx:
        ok = verify_approx(args.d, args.n) and ok
        print(f"verify_approx d={args.d} n={args.n}: {'ok' if ok else 'FAILED'}")
    return 0 if ok else 1


def cmd_predict(args) -> int:
    pred = predicted_spectrum_adjacency(args.d, args.n)
    payload = {"d": args.d, "n": args.n, "pairs": [[v, m] for v, m in pred.pairs]}
    text = json.dumps(payload, indent=1)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    return 0


def cmd_limit(args) -> int:
    if args.d == 1:
        F = limit_quantile_1d(args.samples)
        tail = Fraction(0)
    else:
        F, tail = limit_quantile_cd(args.d, args.depth)
    write_step_csv(F, args.out)
    print(f"tail_mass={tail} l1_bound={float((args.d + 3) * tail):.3e}")
    return 0


def cmd_converge(kind: SubdivisionKind, d: int, n_max: int, initial: Complex, depth: int = 10):
    """Rows (n, ||Λ_n - Λ_{n_max}||_1, ||Λ_n - Λ_cd||_1 or None, tail bound or None)."""
    if initial.dim != d:
        raise ValueError(f"initial complex has dimension {initial.dim}, expected {d}")
    growth = len(_top_faces(kind, d))
    _check_size(len(initial.faces(d)) * growth**n_max)
    levels = iterate(kind, initial, n_max)
    funcs = [spectrum_of(down_laplacian(C, d)) for C in levels]
    limit = None
    bound = None
    if kind.tag == "cd" and d >= 2:
        limit, tail = limit_quantile_cd(d, depth)
        bound = float((d + 3) * tail)
    rows = []
    for n, F in enumerate(funcs):
        to_limit = None
        if limit is not None:
            to_limit = l1_distance(F, limit)
        elif kind.tag in ("cd", "sd") and d == 1:
            to_limit = l1_distance(F, limit_quantile_1d(max(2, len(levels[n].faces(1)))))
        rows.append((n, l1_distance(F, funcs[-1]), to_limit, bound))
    return rows


def _top_faces(kind: SubdivisionKind, d: int):
    return subdivide(kind, simplex(d)).child.faces(d)


def _run_converge(args) -> int:
    kind = _kind(args)
    initial = _initial(args.input, args.d)
    if args.boundary:
        initial = boundary_of_simplex(args.d)
    rows = cmd_converge(kind, args.d, args.n_max, initial, args.depth)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(out)
    w.writerow(["n", "l1_to_last", "l1_to_limit", "tail_bound"])
    for n, a, b, c in rows:
        w.writerow([n, repr(a), "" if b is None else repr(b), "" if c is None else repr(c)])
    if args.out:
        out.close()
    return 0


def cmd_figures(d: int, out: Path, depth: int = 10, samples: int = 401) -> list[Path]:
    """CSV data behind the limit-distribution figure for d in {1, 2, 3}."""
    if d not in (1, 2, 3):
        raise ValueError("figures are produced for d = 1, 2, 3")
    out.mkdir(parents=True, exist_ok=True)
    written = []
    limit_path = out / f"limit_d{d}.csv"
    if d == 1:
        with open(limit_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "value"])
            for k in range(samples):
                x = k / (samples - 1)
                w.writerow([repr(x), repr(sine_law(x))])
    else:
        F, _ = limit_quantile_cd(d, depth)
        write_step_csv(F, limit_path)
    written.append(limit_path)
    poly_path = out / f"decimation_map_d{d}.csv"
    with open(poly_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["z", "f"])
        for k in range(samples):
            z = (d + 3) * k / (samples - 1)
            w.writerow([repr(z), repr(laplacian_map(z, d))])
    written.append(poly_path)
    return written


def _run_figures(args) -> int:
    for p in cmd_figures(args.d, Path(args.out), args.depth):
        print(p)
    return 0


def cmd_fractal(args) -> int:
    kind = _kind(args)
    data = derive_fractal_data(kind, args.d)
    levels = build_levels(data, args.k)
    if args.out:
        write_level_json(levels[-1], args.out)
    print(f"level {args.k}: {levels[-1].size} vertices, {levels[-1].loop_total()} loops")
    if args.verify:
        ok = verify_duality(kind, args.d, args.k)
        print(f"duality: {'ok' if ok else 'FAILED'}")
        return 0 if ok else 1
    return 0


def selftest(seed: int = 0) -> list[tuple[str, bool]]:
    """Fast internal consistency checks; every entry must be True."""
    rng = np.random.default_rng(seed)
    checks: list[tuple[str, bool]] = []
    p = RenormPoint(3.0, 1.0)
    q = renormalize(p, 2)
    checks.append(("renormalize example", abs(q.mu - 1.75) < 1e-12 and abs(q.lam - 0.375) < 1e-12))
    ok = True
    for d in (2, 3, 4):
        for mu, lam in rng.uniform(-3, 3, size=(50, 2)):
            pt = RenormPoint(float(mu), float(lam))
            try:
                a, b = renormalize(pt, d), renormalize_unfactored(pt, d)
                r = semiconjugacy_residual(pt, d)
            except (ArithmeticError, ZeroDivisionError):
                continue
            ok &= math.isclose(a.mu, b.mu, rel_tol=1e-9, abs_tol=1e-9) and r < 1e-9
            ok &= math.isclose(det_x0(pt, d), det_x0_explicit(pt, d), rel_tol=1e-8, abs_tol=1e-8)
    checks.append(("renormalization identities", bool(ok)))
    for d, n in ((2, 3), (3, 2)):
        pred = predicted_spectrum_adjacency(d, n).expanded()
        ev = np.linalg.eigvalsh(build_schreier(d, n).adjacency)
        checks.append((f"decimation d={d} n={n}", bool(np.max(np.abs(pred - ev)) < 1e-8)))
        checks.append((f"facet labeling d={d} n={n}", verify_approx(d, n)))
    checks.append(("q ratio cd", q_ratio(SubdivisionKind("cd"), 2) == Fraction(1, 3)))
    F = laplacian_from_adjacency_limit(2, 3)
    G, _ = limit_quantile_cd(2, 3)
    checks.append(("reflection of adjacency limit", F.breakpoints == G.breakpoints))
    checks.append(("duality cd k=1", verify_duality(SubdivisionKind("cd"), 2, 1)))
    return checks


def _run_selftest(args) -> int:
    results = selftest(args.seed)
    for name, ok in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return 0 if all(ok for _, ok in results) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="subdivspectra", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_kind(p):
        p.add_argument("--kind", default="cd", help="cd, sd, esd (with --r) or esd3")
        p.add_argument("--r", type=int, default=None)

    p = sub.add_parser("subdivide", help="iterate a subdivision and write every level")
    add_kind(p)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--d", type=int, default=2, help="dimension of the simplex when --in is absent")
    p.add_argument("--in", dest="input")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_subdivide)

    p = sub.add_parser("spectrum", help="quantile function of a top Laplacian")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("schreier", help="adjacency matrix of the level-n Schreier graph")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--out")
    p.add_argument("--verify-approx", action="store_true")
    p.set_defaults(func=cmd_schreier)

    p = sub.add_parser("predict", help="eigenvalues and multiplicities from decimation")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("limit", help="limit quantile function of iterated cone subdivision")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--samples", type=int, default=256, help="grid size for d = 1")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("converge", help="L1 distances along a subdivision sequence")
    add_kind(p)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--in", dest="input")
    p.add_argument("--boundary", action="store_true", help="start from the boundary of Δ_{d+1}")
    p.add_argument("--out")
    p.set_defaults(func=_run_converge)

    p = sub.add_parser("fractal", help="self-similar graph dual to iterated subdivision")
    add_kind(p)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_fractal)

    p = sub.add_parser("figures", help="data files for the limit distribution plots")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_run_figures)

    p = sub.add_parser("selftest", help="run internal consistency checks")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_run_selftest)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        config = RunConfig.from_args(args)
        log.debug("config %s", config)
        return args.func(args)
    except (ValueError, SizeBudgetError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
