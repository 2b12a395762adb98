"""Command-line front end.

Commands:
  gen      sample matrices from an ensemble, write them with provenance
  analyze  single-matrix spectral and degree report
  verify   run a seeded invariant suite; nonzero exit on failure
  tail     Monte Carlo tail-comparison curves (CSV + JSON)

Every command is a pure function of its effective manifest: flags fill in
defaults, a --manifest file overrides flags, and the effective manifest is
echoed into the output. Reruns produce byte-identical files at any value of
EXSPEC_THREADS.

Exit codes: 0 ok, 1 assertion/suite failure, 2 usage, 3 I/O.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import verify as verify_mod
from .core import (
    SquareMatrix,
    column_sums,
    matrix_from_csv,
    matrix_from_json,
    matrix_to_csv,
    matrix_to_json,
    row_sums,
)
from .degrees import DegreeProfile, RegularityParams, deg_membership
from .ensembles import KINDS, EnsembleSpec, sample
from .scaling import scaling_reduction
from .spectra import s2_via_centering, singular_values
from .tails import (
    block_bound_curve,
    corner_capture_fraction,
    corner_degree_event_frequency,
    norm_tail_curve,
    s2_tail_curve,
)

EXIT_OK = 0
EXIT_ASSERT = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _load_matrix(path: str) -> SquareMatrix:
    p = Path(path)
    text = p.read_text()
    if p.suffix == ".json":
        return matrix_from_json(text)
    return matrix_from_csv(text)


def _apply_manifest(args: argparse.Namespace) -> dict:
    """Merge a manifest file over parsed flags; returns the effective manifest."""
    if getattr(args, "manifest", None):
        overrides = json.loads(Path(args.manifest).read_text())
        for key, value in overrides.items():
            setattr(args, key.replace("-", "_"), value)
    # The destination path is not an input to the computation; leaving it out
    # keeps reruns into different directories byte-identical.
    manifest = {
        k: v for k, v in sorted(vars(args).items())
        if k not in ("func", "manifest", "out") and v is not None
    }
    return manifest


def _grid(text):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(tok) for tok in str(text).split(",") if tok.strip()]


def _build_spec(args) -> EnsembleSpec:
    base = None
    if getattr(args, "base", None):
        base = _load_matrix(args.base)
    return EnsembleSpec(
        kind=args.ensemble,
        n=args.n,
        d=args.d or 0,
        zero_diagonal=bool(getattr(args, "zero_diagonal", False)),
        seed=args.seed,
        base=base,
    )


def cmd_gen(args) -> int:
    manifest = _apply_manifest(args)
    try:
        spec = _build_spec(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        M = sample(spec, i)
        stem = out / f"sample_{i:04d}"
        if args.format == "json":
            stem.with_suffix(".json").write_text(matrix_to_json(M))
        else:
            stem.with_suffix(".csv").write_text(matrix_to_csv(M))
        sidecar = {"seed": spec.seed, "index": i, "spec": json.loads(spec.to_json())}
        (out / f"sample_{i:04d}.provenance.json").write_text(
            json.dumps(sidecar, sort_keys=True)
        )
    (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, default=str))
    print(json.dumps(manifest, sort_keys=True, default=str))
    return EXIT_OK


def cmd_analyze(args) -> int:
    manifest = _apply_manifest(args)
    M = _load_matrix(args.matrix)
    spectrum = singular_values(M)
    s1 = float(spectrum.values[0])
    s2 = float(spectrum.values[1]) if M.n > 1 else 0.0
    u = column_sums(M)
    v = row_sums(M)
    report = {
        "manifest": manifest,
        "n": M.n,
        "s1": s1,
        "s2": s2,
        "tol": spectrum.tol,
        "u": u.tolist(),
        "v": v.tolist(),
    }
    if args.d is not None:
        delta = args.delta if args.delta is not None else 1.0
        params = RegularityParams(d=args.d, delta=delta)
        report["deg_membership"] = deg_membership(DegreeProfile(u, v), params)
        try:
            report["s2_via_centering"] = s2_via_centering(M, args.d)
        except ValueError as e:
            report["s2_via_centering_error"] = str(e)
        if np.all(u > 0) and np.all(v > 0):
            try:
                report["scaling"] = scaling_reduction(M, args.d, delta).to_dict()
            except (ValueError, RuntimeError) as e:
                report["scaling_error"] = str(e)
    text = json.dumps(report, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    manifest = _apply_manifest(args)
    records = verify_mod.run_suite(args.suite, seed=args.seed)
    passed = all(r["passed"] for r in records)
    report = {"manifest": manifest, "records": records, "passed": passed}
    text = json.dumps(report, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    return EXIT_OK if passed else EXIT_ASSERT


def cmd_tail(args) -> int:
    manifest = _apply_manifest(args)
    comparison = args.comparison
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = _grid(args.grid)

    if comparison == "corner-capture":
        if not args.matrix:
            print("error: corner-capture requires --matrix", file=sys.stderr)
            return EXIT_USAGE
        M = _load_matrix(args.matrix)
        res = corner_capture_fraction(M, trials=args.trials, seed=args.seed)
        payload = {
            "manifest": manifest,
            "c_grid": res["c_grid"].tolist(),
            "p_hat": res["p_hat"].tolist(),
            "ci": res["ci"].tolist(),
            "best_c": res["best_c"],
            "m_norm": res["m_norm"],
        }
        (out / "curve.json").write_text(json.dumps(payload, sort_keys=True))
        lines = ["c,p_hat,ci"]
        for c, p, ci in zip(res["c_grid"], res["p_hat"], res["ci"]):
            lines.append(",".join(repr(float(x)) for x in (c, p, ci)))
        (out / "curve.csv").write_text("\n".join(lines) + "\n")
        print(json.dumps({"best_c": res["best_c"]}))
        return EXIT_OK

    try:
        spec = _build_spec(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    if comparison == "degree-event":
        params = RegularityParams(d=float(args.d), delta=args.delta)
        res = corner_degree_event_frequency(spec, params, trials=args.trials, seed=args.seed)
        payload = {"manifest": manifest, **res}
        (out / "curve.json").write_text(json.dumps(payload, sort_keys=True))
        print(json.dumps({"p_E": res["p_E"], "ci": res["ci"]}))
        return EXIT_OK

    if comparison == "norm":
        event = None
        if args.delta is not None:
            event = RegularityParams(d=float(args.d), delta=args.delta)
        curve = norm_tail_curve(
            spec, c=args.c, trials=args.trials, seed=args.seed,
            thresholds=grid, event=event,
        )
    elif comparison == "s2":
        params = RegularityParams(d=float(args.d), delta=args.delta)
        L_grid = grid if grid else list(range(2, 41, 2))
        curve = s2_tail_curve(
            spec, params, L_grid, trials=args.trials, seed=args.seed, c=args.c
        )
    elif comparison == "blocks":
        curve = block_bound_curve(spec, trials=args.trials, seed=args.seed, thresholds=grid)
    else:
        print(f"error: unknown comparison {comparison!r}", file=sys.stderr)
        return EXIT_USAGE

    payload = {"manifest": manifest, **curve.to_dict()}
    (out / "curve.json").write_text(json.dumps(payload, sort_keys=True))
    (out / "curve.csv").write_text(curve.to_csv())
    print(json.dumps({"all_hold": curve.all_hold(), "meta": curve.meta}, sort_keys=True))
    return EXIT_OK if curve.all_hold() else EXIT_ASSERT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exspec",
        description="Exchangeable-matrix spectral experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--manifest", help="JSON file overriding the flags")
        p.add_argument("--out", help="output file or directory")

    g = sub.add_parser("gen", help="sample matrices from an ensemble")
    g.add_argument("--ensemble", choices=KINDS, default="perm_sum_regular")
    g.add_argument("--n", type=int, default=16)
    g.add_argument("--d", type=int, default=0)
    g.add_argument("--zero-diagonal", action="store_true")
    g.add_argument("--base", help="base matrix file for permuted ensembles")
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    common(g)
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("analyze", help="spectral and degree report for one matrix")
    a.add_argument("matrix", help="matrix file (.csv or .json)")
    a.add_argument("--d", type=float)
    a.add_argument("--delta", type=float)
    common(a)
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("suite", choices=("subset", "scaling", "perron", "deg", "all"))
    common(v)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("tail", help="Monte Carlo tail-comparison curves")
    t.add_argument(
        "comparison",
        choices=("norm", "s2", "blocks", "degree-event", "corner-capture"),
    )
    t.add_argument("--ensemble", choices=KINDS, default="perm_sum_regular")
    t.add_argument("--n", type=int, default=16)
    t.add_argument("--d", type=int, default=0)
    t.add_argument("--delta", type=float)
    t.add_argument("--zero-diagonal", action="store_true")
    t.add_argument("--base", help="base matrix file for permuted ensembles")
    t.add_argument("--matrix", help="matrix file for corner-capture")
    t.add_argument("--trials", type=int, default=1000)
    t.add_argument("--c", type=float, default=0.01)
    t.add_argument("--grid", help="comma-separated thresholds or L values")
    common(t)
    t.set_defaults(func=cmd_tail)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "out", None) is None and args.command in ("gen", "tail"):
        parser.error(f"{args.command} requires --out")
    try:
        return args.func(args)
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
