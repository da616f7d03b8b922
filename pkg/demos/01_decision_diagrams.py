"""
Decision diagrams for circuit unitaries
=======================================

A decision diagram stores a 2^n x 2^n matrix as a DAG with one level per
qubit. Shared sub-blocks become shared nodes, so structured unitaries stay
small even when the dense matrix is enormous.
"""

# %%
import numpy as np

from ddequiv import circuit as C
from ddequiv.circuit import Circuit
from ddequiv.dd import DDPackage
from ddequiv.dense import circuit_unitary

dd = DDPackage()

# %%
# A Hadamard: one node, the 1/sqrt(2) factor lifted onto the root edge
print(dd.dump(dd.make_gate_dd(C.h(0), 1)))

# %%
# CX on two qubits: the control qubit picks between an identity block and an X block
print(dd.dump(dd.make_gate_dd(C.cx(0, 1), 2)))

# %%
# The identity on n qubits needs exactly n nodes, however large 2^n gets
for n in (1, 4, 16, 40):
    print(n, "qubits:", dd.count_nodes(dd.make_identity(n)), "nodes")

# %%
# A GHZ-preparing circuit on 10 qubits as a DD versus as a dense matrix
ghz = Circuit(10, [C.h(0)] + [C.cx(q, q + 1) for q in range(9)])
e = dd.make_circuit_dd(ghz)
print("DD nodes:", dd.count_nodes(e), " dense entries:", 4**10)
np.testing.assert_allclose(dd.to_matrix(e, 10), circuit_unitary(ghz), atol=1e-12)

# %%
# Equal matrices land on the same root node (canonicity), which is what
# makes "is the product the identity?" a cheap question
same = dd.make_circuit_dd(Circuit(10, list(ghz.gates)))
print("shared root:", same.node is e.node)
