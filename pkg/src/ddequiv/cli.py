"""Command-line entry point.

Exit codes: 0 equivalent (including up to global phase), 1 not equivalent,
2 usage, parse or mapping error, 3 timeout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench
from .circuit import CircuitError
from .equivalence import STRATEGY_ORDER, CheckTimeout, Strategy, StrategyConfig, run_check
from .passes import PassConfig
from .qasm import QasmError, emit_qasm, load_qasm
from .qec import QecMapping, QecMappingError, prune_qec, verify_qec

EXIT_EQUIVALENT, EXIT_NOT_EQUIVALENT, EXIT_ERROR, EXIT_TIMEOUT = 0, 1, 2, 3


def _strategy_list(text: str) -> list[Strategy]:
    try:
        return [Strategy(s.strip()) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_check_options(p: argparse.ArgumentParser):
    p.add_argument("--strategy", type=Strategy, choices=list(Strategy),
                   default=Strategy.POSITION_MATCH, metavar="{" + ",".join(s.value for s in Strategy) + "}")
    p.add_argument("--json", action="store_true", help="print the result as JSON")
    p.add_argument("--exact-phase", action="store_true", help="a global phase difference is a mismatch")
    p.add_argument("--tol", type=float, default=1e-9, help="identity tolerance (default 1e-9)")
    p.add_argument("--eps", type=float, default=1e-10, help="complex-table snapping radius")
    p.add_argument("--no-preprocess", action="store_true", help="skip the normalization passes")
    p.add_argument("--timeout-ms", type=float, default=None)


def _config(args, strategy=None) -> StrategyConfig:
    return StrategyConfig(
        strategy=strategy or args.strategy,
        tolerance=args.tol,
        up_to_global_phase=not args.exact_phase,
        apply_preprocess=not args.no_preprocess,
        passes=PassConfig(),
        eps_num=args.eps,
        timeout=None if args.timeout_ms is None else args.timeout_ms / 1000,
    )


def _report(res, args, extra=None) -> int:
    doc = res.to_dict() | (extra or {})
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        print(res.verdict.value)
        for key in ("strategy", "peak_live_nodes", "final_nodes", "tentative_evaluations",
                    *(extra or {})):
            print(f"  {key}: {doc[key]}")
        print(f"  time_ms: {res.wall_time * 1000:.3f}")
    return EXIT_EQUIVALENT if res.equivalent else EXIT_NOT_EQUIVALENT


def _fail(msg: str, code=EXIT_ERROR) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def _load(path):
    try:
        return load_qasm(path)
    except QasmError as exc:
        span = exc.span
        where = f"{path}:{span.line}:{span.column}" if span else str(path)
        raise _InputError(f"{where}: {exc.message}") from None
    except OSError as exc:
        raise _InputError(f"{path}: {exc.strerror or exc}") from None


class _InputError(Exception):
    pass


def cmd_verify(args) -> int:
    try:
        a, b = _load(args.circuit1), _load(args.circuit2)
        res = run_check(a, b, _config(args))
    except _InputError as exc:
        return _fail(str(exc))
    except (CircuitError, ValueError) as exc:
        return _fail(str(exc))
    except CheckTimeout as exc:
        return _fail(f"timeout: {exc}", EXIT_TIMEOUT)
    return _report(res, args)


def cmd_verify_qec(args) -> int:
    try:
        orig, qec = _load(args.original), _load(args.qec)
        mapping = QecMapping.load(args.map)
        res, report = verify_qec(orig, qec, mapping, _config(args))
        if args.emit_pruned:
            pruned, _ = prune_qec(qec, mapping)
            Path(args.emit_pruned).write_text(emit_qasm(pruned), encoding="utf-8")
    except _InputError as exc:
        return _fail(str(exc))
    except OSError as exc:
        return _fail(f"{exc.filename}: {exc.strerror}")
    except (QecMappingError, CircuitError, ValueError) as exc:
        return _fail(f"invalid mapping or circuit: {exc}")
    except CheckTimeout as exc:
        return _fail(f"timeout: {exc}", EXIT_TIMEOUT)
    extra = {"kept_qubits": report.kept_qubits, "kept_gate_count": report.kept_gate_count,
             "removed_gate_count": report.removed_gate_count}
    return _report(res, args, extra)


def cmd_bench(args) -> int:
    directory = Path(args.directory)
    if args.make_fixtures:
        bench.make_fixtures(directory, seed=args.seed, n_random=args.count)
    if not bench.discover_pairs(directory):
        return _fail(f"no <name>{bench.ORIG_SUFFIX} / <name>{bench.TRANSPILED_SUFFIX} pairs in {directory}")
    base = StrategyConfig(apply_preprocess=not args.no_preprocess)
    try:
        rows, summaries = bench.run_bench(directory, args.strategies, args.timeout_ms, args.repeat, base)
    except (QasmError, CircuitError) as exc:
        return _fail(str(exc))
    out = Path(args.out)
    summary = Path(args.summary) if args.summary else bench.summary_path_for(out)
    bench.write_csv(out, bench.ROW_HEADER, rows)
    bench.write_csv(summary, bench.SUMMARY_HEADER, summaries)
    print(f"wrote {len(rows)} rows to {out} and {len(summaries)} to {summary}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddequiv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check two QASM circuits for equivalence")
    p.add_argument("circuit1")
    p.add_argument("circuit2")
    _add_check_options(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("verify-qec", help="check a QEC circuit against its original")
    p.add_argument("original")
    p.add_argument("qec")
    p.add_argument("--map", required=True, help="JSON qubit mapping")
    p.add_argument("--emit-pruned", metavar="PATH", help="also write the pruned QEC circuit")
    _add_check_options(p)
    p.set_defaults(func=cmd_verify_qec)

    p = sub.add_parser("bench", help="run strategies over a directory of pairs")
    p.add_argument("directory")
    p.add_argument("--out", required=True, help="per-strategy CSV")
    p.add_argument("--summary", help="summary CSV (default: <out>.summary.csv)")
    p.add_argument("--strategies", type=_strategy_list, default=list(STRATEGY_ORDER),
                   help="comma-separated subset")
    p.add_argument("--timeout-ms", type=float, default=bench.DEFAULT_TIMEOUT_MS)
    p.add_argument("--repeat", type=int, default=bench.DEFAULT_REPEAT)
    p.add_argument("--no-preprocess", action="store_true")
    p.add_argument("--make-fixtures", action="store_true",
                   help="generate synthetic pairs into DIRECTORY first (seed from QUBEC_SEED)")
    p.add_argument("--count", type=int, default=6, help="random pairs for --make-fixtures")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
