"""Benchmark harness: run every strategy over a directory of circuit pairs.

A benchmark directory holds ``<name>.orig.qasm`` / ``<name>.transpiled.qasm``
pairs. ``run_bench`` produces one row per (benchmark, strategy) and one
summary row per benchmark; ``write_csv`` writes them in a fixed order so that
everything but the timing columns is reproducible byte for byte.
"""

from __future__ import annotations

import csv
import json
import random
import statistics
from dataclasses import dataclass, replace
from pathlib import Path

from . import fixtures as F
from .equivalence import STRATEGY_ORDER, CheckTimeout, Strategy, StrategyConfig, run_check
from .qasm import emit_qasm, load_qasm

ORIG_SUFFIX = ".orig.qasm"
TRANSPILED_SUFFIX = ".transpiled.qasm"

ROW_HEADER = ("benchmark", "strategy", "verdict", "time_ms", "peak_nodes", "final_nodes", "tentative_evals")
SUMMARY_HEADER = ("benchmark", "best_time_strategy", "best_nodes_strategy", "speedup_pm_vs_la", "speedup_pm_vs_prop")
TIMEOUT = "timeout"
DEFAULT_TIMEOUT_MS = 60_000
DEFAULT_REPEAT = 3


@dataclass
class BenchRow:
    benchmark: str
    strategy: Strategy
    verdict: str
    time_ms: float | None = None
    peak_nodes: int | None = None
    final_nodes: int | None = None
    tentative_evals: int | None = None

    @property
    def timed_out(self) -> bool:
        return self.verdict == TIMEOUT

    def cells(self) -> list[str]:
        def fmt(v):
            return "" if v is None else str(v)
        t = "" if self.time_ms is None else f"{self.time_ms:.3f}"
        return [self.benchmark, self.strategy.value, self.verdict, t,
                fmt(self.peak_nodes), fmt(self.final_nodes), fmt(self.tentative_evals)]


@dataclass
class BenchSummary:
    benchmark: str
    best_time_strategy: Strategy | None
    best_nodes_strategy: Strategy | None
    speedup_pm_vs_la: float | None
    speedup_pm_vs_prop: float | None

    def cells(self) -> list[str]:
        def s(v):
            return "" if v is None else v.value
        def r(v):
            return "" if v is None else f"{v:.3f}"
        return [self.benchmark, s(self.best_time_strategy), s(self.best_nodes_strategy),
                r(self.speedup_pm_vs_la), r(self.speedup_pm_vs_prop)]


def discover_pairs(directory) -> list[tuple[str, Path, Path]]:
    """Complete pairs in ``directory``, sorted by benchmark name."""
    directory = Path(directory)
    pairs = []
    for orig in directory.glob("*" + ORIG_SUFFIX):
        name = orig.name[: -len(ORIG_SUFFIX)]
        other = directory / (name + TRANSPILED_SUFFIX)
        if other.is_file():
            pairs.append((name, orig, other))
    return sorted(pairs)


def _argmin(rows, key) -> Strategy | None:
    # strict minimum; STRATEGY_ORDER breaks ties because rows follow it
    best = None
    for row in rows:
        if row.timed_out:
            continue
        if best is None or key(row) < key(best):
            best = row
    return None if best is None else best.strategy


def _ratio(rows, num: Strategy, den: Strategy) -> float | None:
    by = {r.strategy: r for r in rows if not r.timed_out}
    if num not in by or den not in by or not by[den].time_ms:
        return None
    return by[num].time_ms / by[den].time_ms


def summarize(name: str, rows: list[BenchRow]) -> BenchSummary:
    return BenchSummary(
        benchmark=name,
        best_time_strategy=_argmin(rows, lambda r: r.time_ms),
        best_nodes_strategy=_argmin(rows, lambda r: r.peak_nodes),
        speedup_pm_vs_la=_ratio(rows, Strategy.LOOKAHEAD, Strategy.POSITION_MATCH),
        speedup_pm_vs_prop=_ratio(rows, Strategy.PROPORTIONAL, Strategy.POSITION_MATCH),
    )


def bench_pair(name, c1, c2, strategies=STRATEGY_ORDER, timeout_ms=DEFAULT_TIMEOUT_MS,
               repeat=DEFAULT_REPEAT, base: StrategyConfig = StrategyConfig()) -> list[BenchRow]:
    """Time each strategy ``repeat`` times; counts come from the first run."""
    rows = []
    for strategy in sorted(strategies, key=STRATEGY_ORDER.index):
        cfg = replace(base, strategy=strategy,
                      timeout=None if timeout_ms is None else timeout_ms / 1000)
        times, first = [], None
        try:
            for _ in range(max(repeat, 1)):
                res = run_check(c1, c2, cfg)
                times.append(res.wall_time * 1000)
                if first is None:
                    first = res
        except CheckTimeout:
            rows.append(BenchRow(name, strategy, TIMEOUT))
            continue
        rows.append(BenchRow(name, strategy, first.verdict.value, statistics.median(times),
                             first.peak_live_nodes, first.final_nodes, first.tentative_evaluations))
    return rows


def run_bench(directory, strategies=STRATEGY_ORDER, timeout_ms=DEFAULT_TIMEOUT_MS,
              repeat=DEFAULT_REPEAT, base: StrategyConfig = StrategyConfig()):
    rows, summaries = [], []
    for name, orig, other in discover_pairs(directory):
        pair_rows = bench_pair(name, load_qasm(orig), load_qasm(other), strategies,
                               timeout_ms, repeat, base)
        rows += pair_rows
        summaries.append(summarize(name, pair_rows))
    return rows, summaries


def write_csv(path, header, records):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for rec in records:
            w.writerow(rec.cells())


def summary_path_for(out) -> Path:
    out = Path(out)
    return out.with_name(out.stem + ".summary" + (out.suffix or ".csv"))


# -- shipped fixtures ---------------------------------------------------------

def make_fixtures(directory, seed: int | None = None, n_random: int = 6, n_mutants: int = 2) -> list[str]:
    """Write synthetic benchmark pairs into ``directory``; returns their names.

    Random pairs are equivalent by construction (passes, Toffoli expansion,
    commuting reorders); ``mut_*`` pairs carry one altered gate. The 3-qubit
    Toffoli pair and the 4-vs-19-gate pair are always included.
    """
    seed = F.env_seed() if seed is None else seed
    rng = random.Random(seed)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    pairs = {"toffoli": F.toffoli_pair(), "interleave": F.interleave_pair()}
    for i in range(n_random):
        n = rng.randint(4, 7)
        c = F.random_circuit(rng, n, rng.randint(30, 70))
        pairs[f"rand_{i:02d}"] = (c, F.equivalent_variant(c, rng))
    for i in range(n_mutants):
        c = F.random_circuit(rng, rng.randint(3, 5), rng.randint(15, 30))
        pairs[f"mut_{i:02d}"] = (c, F.mutant(F.equivalent_variant(c, rng), rng))
    for name, (a, b) in pairs.items():
        (directory / (name + ORIG_SUFFIX)).write_text(emit_qasm(a), encoding="utf-8")
        (directory / (name + TRANSPILED_SUFFIX)).write_text(emit_qasm(b), encoding="utf-8")
    return sorted(pairs)


def make_qec_fixtures(directory) -> list[str]:
    """Write ``<code>.orig.qasm``, ``<code>.qec.qasm``, ``<code>.map.json`` triples."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, build in F.QEC_FIXTURES.items():
        orig, qec, mapping = build()
        (directory / f"{name}.orig.qasm").write_text(emit_qasm(orig), encoding="utf-8")
        (directory / f"{name}.qec.qasm").write_text(emit_qasm(qec), encoding="utf-8")
        bad = F.corrupt(qec, mapping.entries[0].carrier)
        (directory / f"{name}.corrupted.qasm").write_text(emit_qasm(bad), encoding="utf-8")
        (directory / f"{name}.map.json").write_text(
            json.dumps(mapping.to_dict(), indent=2) + "\n", encoding="utf-8")
    return sorted(F.QEC_FIXTURES)
