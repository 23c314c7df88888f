"""Command-line interface: deterministic, machine-readable reports.

Vectors are parsed exactly (decimals or fractions "a/b") before conversion
to float.  Exit codes: 0 success, 1 domain failure, 2 usage or I/O error.
Writing a report with --out also renders a companion PNG figure where one
makes sense (certificates, polygons, fibers).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from io import StringIO
from typing import Optional

from .errors import FrametopError


def _setup_threads() -> None:
    cap = os.environ.get("FRAMETOP_THREADS")
    if cap:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
            os.environ.setdefault(var, cap)


def _parse_vector(text: str):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        out.append(float(Fraction(tok)))
    if not out:
        raise ValueError("empty vector")
    return out


def _dump_json(obj) -> str:
    def default(o):
        item = getattr(o, "item", None)
        if callable(item):
            return item()   # numpy scalars
        raise TypeError(f"not serializable: {type(o).__name__}")
    return json.dumps(obj, sort_keys=True, indent=2, default=default) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        tmp = out + ".tmp"
        with open(tmp, "w") as fh:
            fh.write(text)
        os.replace(tmp, out)


def _figure_path(out: Optional[str]) -> Optional[str]:
    if out is None:
        return None
    stem, _ = os.path.splitext(out)
    return stem + ".png"


def _target(args):
    from .hypersimplex import DiagonalTarget
    d = _parse_vector(args.d)
    return DiagonalTarget(n=len(d), k=args.k, d=tuple(d))


def cmd_check(args) -> int:
    from .hypersimplex import (DiagonalTarget, classify_admissibility,
                               in_hypersimplex, satisfies_hypothesis)
    from .polygon import frame_km_criterion
    t = _target(args)
    member = in_hypersimplex(t, tol=args.tol)
    report = {"n": t.n, "k": t.k, "d": list(t.d), "hypersimplex": member,
              "hypothesis": None, "verdict": None, "km_criterion": None}
    if member:
        report["hypothesis"] = satisfies_hypothesis(t, tol=1e-9)
        report["verdict"] = classify_admissibility(t).to_json()
        if t.k == 2:
            report["km_criterion"] = frame_km_criterion(t)
    _emit(_dump_json(report), args.out)
    return 0


def cmd_build(args) -> int:
    import numpy as np
    from .builder import build_ntf
    t = _target(args)
    F, rotations = build_ntf(t)
    norms = (F.entries ** 2).sum(axis=0)
    report = {"frame": F.to_json(), "rotations": rotations,
              "frame_residual": F.residual(),
              "norm_residual": float(np.max(np.abs(norms - t.values)))}
    _emit(_dump_json(report), args.out)
    return 0


def cmd_certify(args) -> int:
    from .paths import certify_equal_norm, certify_target
    if args.equal_norm:
        n, k = args.equal_norm
        cert = certify_equal_norm(n, k)
    else:
        cert = certify_target(_target(args), seed=args.seed)
    _emit(_dump_json(cert.to_json()), args.out)
    fig = _figure_path(args.out)
    if fig:
        from .plots import save_path_figure
        save_path_figure(cert.path, cert.d, fig)
    return 0


def cmd_verify(args) -> int:
    from .paths import ConnectivityCertificate
    with open(args.certificate) as fh:
        cert = ConnectivityCertificate.from_json(json.load(fh))
    report = cert.report
    _emit(_dump_json(report.to_json()), args.out)
    fig = _figure_path(args.out)
    if fig:
        from .plots import save_path_figure
        save_path_figure(cert.path, cert.d, fig)
    return 0 if report.passed else 1


def cmd_fiber(args) -> int:
    import numpy as np
    from .fiber import count_components, exact_fiber_special
    t = _target(args)
    count, reps = count_components(t, num_samples=args.samples, seed=args.seed)
    exact = exact_fiber_special(t)
    report = {"count": count,
              "residuals": [float(np.linalg.norm(np.diag(P.entries) - t.values))
                            for P in reps],
              "representatives": [P.to_json() for P in reps],
              "exact_count": None if exact is None else len(exact)}
    _emit(_dump_json(report), args.out)
    fig = _figure_path(args.out)
    if fig:
        from .plots import save_fiber_figure
        save_fiber_figure(reps, t, fig)
    return 0


def cmd_strata(args) -> int:
    import csv
    from .strata import enumerate_strata, verify_no_codim_one
    t = _target(args)
    cands = enumerate_strata(t, max_blocks=args.max_blocks)
    buf = StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sigma", "m", "c", "b", "feasible", "level_codims",
                     "codim_one"])
    for cand in cands:
        writer.writerow([" ".join(map(str, cand.sigma)),
                         " ".join(map(str, cand.m)),
                         " ".join(map(str, cand.c)),
                         " ".join(f"{x:.12g}" for x in cand.b),
                         int(cand.feasible),
                         " ".join(map(str, cand.level_codims)),
                         int(cand.witness_r is not None)])
    ok, _witness = verify_no_codim_one(t)
    writer.writerow(["# no_feasible_codim_one", "", "", "", int(ok), "", ""])
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_polygon(args) -> int:
    from .builder import build_ntf
    from .polygon import frame_km_criterion, frame_to_polygon, km_disconnected
    t = _target(args)
    F, _ = build_ntf(t)
    poly = frame_to_polygon(F)
    report = {"polygon": poly.to_json(),
              "closure_residual": poly.closure_residual(),
              "km_disconnected": km_disconnected(poly.r),
              "frame_km_criterion": frame_km_criterion(t)}
    _emit(_dump_json(report), args.out)
    fig = _figure_path(args.out)
    if fig:
        from .plots import save_polygon_figure
        save_polygon_figure(poly, fig)
    return 0


def cmd_reduce(args) -> int:
    from .paths import reduction_sequence
    seq = reduction_sequence(args.n, args.k)
    _emit(" ".join(f"({n},{k})" for n, k in seq) + "\n", args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frametop",
        description="Tight frames with prescribed norms: construction, "
                    "connectivity certificates, strata, fibers, polygons.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, d=False, k=False, n=False):
        if d:
            p.add_argument("--d", required=True,
                           help="comma-separated entries, decimals or fractions a/b")
        if k:
            p.add_argument("--k", type=int, required=True, help="rank")
        if n:
            p.add_argument("--n", type=int, required=True)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--format", choices=["json", "csv"], default=None)
        p.add_argument("--out", default=None, help="output file (default stdout)")

    p = sub.add_parser("check", help="membership, hypothesis, admissibility verdict")
    common(p, d=True, k=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("build", help="construct a frame with the given norms")
    common(p, d=True, k=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("certify", help="connectivity certificate for a target")
    p.add_argument("--d", help="comma-separated entries")
    p.add_argument("--k", type=int)
    p.add_argument("--equal-norm", nargs=2, type=int, metavar=("N", "K"),
                   help="equal-norm target k/n without spelling out d")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--format", choices=["json", "csv"], default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="re-check a certificate file")
    p.add_argument("certificate", help="certificate JSON path")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fiber", help="sample the fiber and count components")
    common(p, d=True, k=True)
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_fiber)

    p = sub.add_parser("strata", help="enumerate stratum candidates (CSV)")
    common(p, d=True, k=True)
    p.add_argument("--max-blocks", type=int, default=None)
    p.set_defaults(func=cmd_strata)

    p = sub.add_parser("polygon", help="planar polygon of a k=2 target")
    common(p, d=True, k=True)
    p.set_defaults(func=cmd_polygon)

    p = sub.add_parser("reduce", help="equal-norm induction chain")
    common(p, n=True, k=True)
    p.set_defaults(func=cmd_reduce)

    return parser


def main(argv=None) -> int:
    _setup_threads()
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "certify" and not args.equal_norm and \
            (args.d is None or args.k is None):
        parser.error("certify needs --d and --k, or --equal-norm N K")
    try:
        return args.func(args)
    except FrametopError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
