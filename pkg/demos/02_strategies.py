"""
Choosing which circuit to advance
=================================

Equivalence checking multiplies gates of circuit 1 in from the left and
inverted gates of circuit 2 in from the right, hoping the working DD stays
close to the identity. The four strategies differ only in that scheduling.
"""

# %%
from ddequiv import fixtures as F
from ddequiv.equivalence import STRATEGY_ORDER, StrategyConfig, run_check

# %%
# Four gates against a 19-gate compiled form: the Toffoli is expanded to
# Clifford+T and the X becomes two SX
c1, c2 = F.interleave_pair()
print(len(c1.gates), "vs", len(c2.gates), "gates")

# %%
print(f"{'strategy':15} {'verdict':12} {'peak':>5} {'evals':>6}  schedule")
for s in STRATEGY_ORDER:
    r = run_check(c1, c2, StrategyConfig(s, apply_preprocess=False))
    sched = "".join("1" if x == 1 else "2" for x in r.schedule)
    print(f"{s.value:15} {r.verdict.value:12} {r.peak_live_nodes:5d} {r.tentative_evaluations:6d}  {sched}")

# %%
# Lookahead pays two tentative multiplications at every step while both
# circuits have gates left. Position Match compares only when the pool of
# recently touched qubits cannot decide which side to take; here that
# happens 5 times against Lookahead's 8.

# %%
# A random pair, equivalent by construction
import random

rng = random.Random(3)
a = F.random_circuit(rng, 6, 60)
b = F.equivalent_variant(a, rng)
for s in STRATEGY_ORDER:
    r = run_check(a, b, StrategyConfig(s))
    print(f"{s.value:15} peak={r.peak_live_nodes:4d} evals={r.tentative_evaluations:4d} "
          f"{r.wall_time * 1000:7.2f} ms")
