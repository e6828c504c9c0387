"""Command-line entry point: ``qclp <subcommand> ...``.

Exit status is 0 on success, 2 when a search budget ran out and the output
is partial, and 1 on errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from qclp import config as cfgmod
from qclp import decoder, rcpc, screening
from qclp import distance as dist
from qclp.alist import write_alist
from qclp.css import CssCode
from qclp.lifted_product import (
    LpBasePair,
    build_general,
    build_symmetric,
    to_css,
    verify_orthogonality_binary,
    verify_orthogonality_exponent,
)
from qclp.qcbase import QcBaseMatrix, girth, load_base_matrix

EXIT_OK, EXIT_ERROR, EXIT_PARTIAL = 0, 1, 2


class CliError(Exception):
    pass


def _dump(data, path: str | Path | None) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _default_path(ws: cfgmod.WorkspaceConfig, given: str | None, name: str) -> Path:
    if given is not None:
        return Path(given)
    return Path(ws.output_dir) / name


def _finite(x):
    return x if isinstance(x, (int, float)) and math.isfinite(x) else "inf"


def _load_bundle(path: str) -> tuple[CssCode, list[QcBaseMatrix] | None]:
    """A code bundle from build-lp, or a base matrix (symmetric LP is built)."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if "entries" in data:
        b = QcBaseMatrix.from_dict(data)
        return to_css(build_symmetric(b)), [b]
    if "code" not in data:
        raise CliError(f"{path}: neither a base matrix nor a code bundle")
    sources = [QcBaseMatrix.from_dict(s) for s in data.get("source", [])] or None
    return CssCode.from_dict(data["code"]), sources


def _summary_classical(b: QcBaseMatrix, exact_dim: int) -> tuple[str, dist.DistanceReport, int]:
    from qclp import gf2

    h = b.lift()
    k = h.cols - gf2.rank(h)
    report = dist.classical_min_distance(h, exact_dim=exact_dim)
    if report.mode is dist.Mode.EXACT:
        d = str(_finite(report.value))
    else:
        d = f"<={report.value}"
    return f"[{h.cols},{k},{d}]", report, k


# ---------------------------------------------------------------- commands


def cmd_lift(args, ws) -> int:
    b = load_base_matrix(args.base)
    out = _default_path(ws, args.out, Path(args.base).stem + ".alist")
    write_alist(b.lift(), out)
    summary, report, _ = _summary_classical(b, args.exact_dim)
    print(summary)
    print(f"distance mode: {report.mode.value}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_build_lp(args, ws) -> int:
    bases = [load_base_matrix(p) for p in args.base]
    pair = build_symmetric(bases[0]) if len(bases) == 1 else build_general(*bases)
    if not (verify_orthogonality_binary(pair) and verify_orthogonality_exponent(pair)):
        raise CliError("internal error: lifted product pair is not orthogonal")
    code = to_css(pair)
    bundle = _bundle(pair, code)
    out = _default_path(ws, args.out, Path(args.base[0]).stem + "_code.json")
    _dump(bundle, out)
    print(code.parameters())
    print(f"wrote {out}")
    return EXIT_OK


def _bundle(pair: LpBasePair, code: CssCode) -> dict:
    return {
        "symmetric": pair.symmetric,
        "source": [b.to_dict() for b in pair.source],
        "N": code.n_qubits,
        "K": code.k_logical,
        "code": code.to_dict(),
    }


def cmd_analyze(args, ws) -> int:
    code, sources = _load_bundle(args.code)
    budget = args.node_budget or ws.node_budget
    iterations = args.iterations or ws.estimator_iterations
    seed = ws.seed if args.seed is None else args.seed
    report: dict = {"parameters": code.parameters(), "N": code.n_qubits, "K": code.k_logical}
    partial = False
    if sources is not None and len(sources) == 1:
        b = sources[0]
        report["base_girth"] = _finite(girth(b))
        if b.is_fully_connected() and not b.is_canonical():
            b = b.canonicalize()
            report["canonical_base"] = b.to_dict()
        if b.is_canonical():
            t2 = dist.theorem2_check(b, node_budget=budget, seed=seed)
            report["rcpc"] = [c.to_dict() for c in t2.certificates]
            report["theorem2"] = t2.to_dict()
            if b.m == 2:
                report["note"] = "two-row base matrix: a row certificate always exists"
            exact = t2.quantum
            partial = exact is None
        else:
            report["note"] = "base matrix has empty blocks; RCPC analysis skipped"
            exact = None
    else:
        exact = None
    if exact is None and args.w_max:
        # a smaller explicit cap can succeed where the full bound ran out
        try:
            exact = dist.quantum_min_distance_exact(code, args.w_max, budget=budget)
            partial = False
        except dist.BudgetExceeded:
            partial = True
    report["exact"] = None if exact is None else exact.to_dict()
    if not args.skip_estimate:
        est = dist.quantum_distance_estimate(code, iterations=iterations, seed=seed)
        report["estimate"] = est.to_dict()
    report["partial"] = partial
    _dump(report, args.out)
    _print_table(report)
    return EXIT_PARTIAL if partial else EXIT_OK


def _print_table(report: dict) -> None:
    rows = [("parameters", report["parameters"])]
    if "base_girth" in report:
        rows.append(("base girth", report["base_girth"]))
    if "rcpc" in report:
        axes = ", ".join(c["axis"] for c in report["rcpc"]) or "none"
        rows.append(("RCPC certificates", axes))
    if "theorem2" in report:
        rows.append(("quantum upper bound", report["theorem2"]["upper_bound"]))
    if report.get("exact"):
        e = report["exact"]
        rel = ">=" if e["lower_bound"] else "="
        rows.append(("exact search", f"d {rel} {e['value']} ({e['mode']})"))
    if report.get("estimate"):
        e = report["estimate"]
        rows.append(("estimator", f"d <= {e['value']} (ESTIMATE)"))
    if report.get("note"):
        rows.append(("note", report["note"]))
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {v}", file=sys.stderr)


def cmd_rcpc(args, ws) -> int:
    b = load_base_matrix(args.base)
    if not b.is_canonical():
        b = b.canonicalize()
    certs = rcpc.find_certificates(b)
    out = []
    for cert in certs:
        word = rcpc.construct_rcpc_codeword(b, cert)
        out.append(
            {
                "certificate": cert.to_dict(),
                "verified": rcpc.verify_certificate(b, cert),
                "weight": word.weight(),
                "code_part": word.code_part.tolist(),
                "transpose_part": word.transpose_part.tolist(),
            }
        )
    _dump({"base": b.to_dict(), "certificates": out}, args.out)
    return EXIT_OK


def cmd_distance(args, ws) -> int:
    code, _ = _load_bundle(args.code)
    seed = ws.seed if args.seed is None else args.seed
    if args.mode == "exact":
        if args.w_max is None:
            raise CliError("--w-max is required in exact mode")
        try:
            report = dist.quantum_min_distance_exact(
                code, args.w_max, budget=args.node_budget or ws.node_budget
            )
        except dist.BudgetExceeded as exc:
            _dump({"error": str(exc), "budget": exc.budget, "partial": True}, args.out)
            return EXIT_PARTIAL
    else:
        report = dist.quantum_distance_estimate(
            code, iterations=args.iterations or ws.estimator_iterations, seed=seed
        )
    _dump(report.to_dict(), args.out)
    print(report.describe(), file=sys.stderr)
    return EXIT_OK


def cmd_screen(args, ws) -> int:
    options = {"seed": ws.seed if args.seed is None else args.seed}
    if args.iterations:
        options["iterations"] = args.iterations
    if args.node_budget:
        options["node_budget"] = args.node_budget
    store = screening.CandidateStore(args.candidates, args.journal)
    report, cands = screening.screen(
        args.L,
        args.m,
        args.n,
        threshold=args.threshold,
        exact_dq=args.exact_dq,
        jobs=args.jobs or ws.jobs,
        store=store,
        **options,
    )
    data = report.to_dict()
    data["candidates"] = len(cands)
    _dump(data, args.out)
    total, rc, dc, dq = report.counts()
    flag = " INCOMPLETE" if report.incomplete else ""
    print(f"total={total} rcpc={rc} dc>{report.threshold}={dc} "
          f"dq>{report.threshold}={dq} ({report.dq_mode}){flag}", file=sys.stderr)
    return EXIT_PARTIAL if report.incomplete else EXIT_OK


def cmd_refine(args, ws) -> int:
    cands = screening.load_candidates(args.journal)
    kept = screening.refine_candidates(cands, args.girth_min, args.dq_target)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(screening.CSV_COLUMNS)
            for c in kept:
                writer.writerow(c.to_csv_row())
    else:
        for c in kept:
            print(",".join(str(x) for x in c.to_csv_row()))
    print(f"{len(kept)} of {len(cands)} candidates kept", file=sys.stderr)
    return EXIT_OK


def _p_values(args) -> list[float]:
    if args.p_sweep:
        try:
            a, b, steps = args.p_sweep.split(":")
            return [float(x) for x in np.linspace(float(a), float(b), int(steps))]
        except ValueError:
            raise CliError("--p-sweep expects start:stop:steps") from None
    if args.p is None:
        raise CliError("give --p or --p-sweep")
    return [args.p]


def cmd_simulate(args, ws) -> int:
    code, _ = _load_bundle(args.code)
    seed = ws.seed if args.seed is None else args.seed
    rows = []
    for p in _p_values(args):
        cfg = decoder.DecoderConfig(
            channel_p=p,
            trials=args.trials,
            seed=seed,
            bp_iterations=args.bp_iters,
            osd_order=args.osd,
            bp_variant=decoder.BpVariant(args.bp_variant),
        )
        result = decoder.simulate(code, cfg, side=args.side, jobs=args.jobs or ws.jobs)
        rows.append(result.csv_row())
        lo, hi = result.interval
        print(f"p={p:g} rate={result.rate:.5f} [{lo:.5f}, {hi:.5f}]", file=sys.stderr)
    out = _default_path(ws, args.out, "curve.csv")
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(decoder.CSV_COLUMNS)
        writer.writerows(rows)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qclp", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="workspace config file (JSON)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lift", help="lift a base matrix to an alist parity-check matrix")
    p.add_argument("base")
    p.add_argument("--out")
    p.add_argument("--exact-dim", type=int, default=dist.DEFAULT_EXACT_DIM)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("build-lp", help="build a lifted-product code bundle")
    p.add_argument("base", nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=cmd_build_lp)

    p = sub.add_parser("analyze", help="RCPC, girth and distance report for a code")
    p.add_argument("code")
    p.add_argument("--node-budget", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--w-max", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--skip-estimate", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("rcpc", help="find and verify RCPC certificates")
    p.add_argument("base")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rcpc)

    p = sub.add_parser("distance", help="quantum minimum distance")
    p.add_argument("code")
    p.add_argument("--mode", choices=["exact", "estimate"], default="estimate")
    p.add_argument("--w-max", type=int)
    p.add_argument("--node-budget", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("screen", help="screen all canonical base matrices")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--threshold", type=int)
    p.add_argument("--exact-dq", action="store_true")
    p.add_argument("--jobs", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--node-budget", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--candidates", help="CSV of matrices with d^Q above the threshold")
    p.add_argument("--journal", help="JSON-lines journal used for resuming and refine")
    p.set_defaults(func=cmd_screen)

    p = sub.add_parser("refine", help="filter screened candidates")
    p.add_argument("--journal", required=True)
    p.add_argument("--girth-min", type=int, default=4)
    p.add_argument("--dq-target", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("simulate", help="code-capacity BP+OSD simulation")
    p.add_argument("--code", required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--p-sweep")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--bp-iters", type=int, default=100)
    p.add_argument("--bp-variant", choices=[v.value for v in decoder.BpVariant],
                   default=decoder.BpVariant.SUM_PRODUCT.value)
    p.add_argument("--osd", type=int, default=10)
    p.add_argument("--side", choices=["X", "Z"], default="X")
    p.add_argument("--jobs", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ws = cfgmod.resolve(args.config)
        return args.func(args, ws)
    except (CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
