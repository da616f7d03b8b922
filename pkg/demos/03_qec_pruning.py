"""
Verifying a circuit with error-correction redundancy
====================================================

An encoded circuit has far more qubits than the original, so the two cannot
be compared directly. Pruning keeps only the measured data qubits named in
a mapping and the gates acting solely on them; the original is then widened
to match and the usual check runs on the small pair.
"""

# %%
from ddequiv import fixtures as F
from ddequiv.qasm import emit_qasm
from ddequiv.qec import prune_qec, verify_qec

# %%
for name, build in F.QEC_FIXTURES.items():
    orig, qec, mapping = build()
    res, report = verify_qec(orig, qec, mapping)
    unitary = sum(g.is_unitary for g in qec.gates)
    print(f"{name:10} {qec.n_qubits:2d} qubits {unitary:3d} gates -> kept {report.kept_gate_count:2d} "
          f"on {report.kept_qubits}: {res.verdict.value}, {res.final_nodes} nodes")

# %%
# The pruned Shor circuit: state preparation plus the phase-layer H and CX
orig, qec, mapping = F.shor_code()
pruned, _ = prune_qec(qec, mapping)
print(emit_qasm(pruned))

# %%
# A stray X on the data qubit before readout is caught
bad = F.corrupt(qec, carrier=0)
print(verify_qec(orig, bad, mapping)[0].verdict.value)
