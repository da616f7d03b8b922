import json

import numpy as np
import pytest

from ddequiv import circuit as C
from ddequiv import fixtures as F
from ddequiv.circuit import Circuit, GateKind as K
from ddequiv.dense import simulate
from ddequiv.equivalence import Verdict
from ddequiv.qec import (
    MappingEntry,
    QecMapping,
    QecMappingError,
    augment_original,
    prune_qec,
    verify_qec,
)

EXPECTED_PRUNED = {"bit_flip": 1, "phase_flip": 3, "shor": 11}
EXPECTED_TOTAL = {"bit_flip": 9, "phase_flip": 13, "shor": 38}


def _marginal(c: Circuit, qubits):
    probs = np.abs(simulate(c)) ** 2
    n = c.n_qubits
    out = np.zeros(1 << len(qubits))
    for idx, p in enumerate(probs):
        key = 0
        for q in qubits:
            key = (key << 1) | ((idx >> (n - 1 - q)) & 1)
        out[key] += p
    return out


@pytest.mark.parametrize("name", sorted(F.QEC_FIXTURES))
def test_fixture_sizes(name):
    _, qec, _ = F.QEC_FIXTURES[name]()
    assert sum(g.is_unitary for g in qec.gates) == EXPECTED_TOTAL[name]


@pytest.mark.parametrize("name", sorted(F.QEC_FIXTURES))
def test_fixtures_are_working_codes(name):
    # with an error injected, the data qubit still reads out like the bare prep
    orig, qec, mapping = F.QEC_FIXTURES[name]()
    ref = _marginal(orig, [0])
    if name == "shor":
        # q5/q10 are phase syndromes; the classical decoder flips q0 on (1, 1)
        errs = [C.z(0), C.z(5), C.x(1), C.z(12)]
        for err in [None, *errs]:
            gates = list(qec.gates)
            if err is not None:
                gates.insert(8, err)  # right after the first block is encoded
            joint = _marginal(qec.copy(gates), [0, 5, 10]).reshape(2, 4)
            decoded = np.zeros(2)
            for b in range(2):
                for s in range(4):
                    decoded[b ^ (s == 3)] += joint[b, s]
            np.testing.assert_allclose(decoded, ref, atol=1e-12, err_msg=str(err))
    else:
        np.testing.assert_allclose(_marginal(qec, [0]), ref, atol=1e-12)


@pytest.mark.parametrize("name", sorted(F.QEC_FIXTURES))
def test_verify_qec_on_fixtures(name):
    orig, qec, mapping = F.QEC_FIXTURES[name]()
    res, report = verify_qec(orig, qec, mapping)
    assert res.verdict.is_equivalent
    assert report.kept_gate_count == EXPECTED_PRUNED[name]
    assert res.final_nodes <= 10
    bad = F.corrupt(qec, mapping.entries[0].carrier)
    res, _ = verify_qec(orig, bad, mapping)
    assert res.verdict is Verdict.NOT_EQUIVALENT


def test_prune_drops_gates_leaving_the_kept_set():
    orig, qec, mapping = F.bit_flip_code()
    pruned, report = prune_qec(qec, mapping)
    assert [g.kind for g in pruned.gates] == [K.U3]
    assert report.kept_qubits == [0]
    assert report.removed_gate_count == 9  # 8 unitary gates plus the measurement


def test_augment_appends_copies_in_compacted_indices():
    orig = Circuit(1, [C.h(0)])
    mapping = QecMapping((MappingEntry(0, 0, (5, 10)),))
    out = augment_original(orig, mapping)
    assert out.n_qubits == 3
    assert [(g.kind, g.qubits) for g in out.gates] == [(K.H, (0,)), (K.CX, (0, 1)), (K.CX, (0, 2))]


def test_augment_without_copies_only_pads():
    mapping = QecMapping((MappingEntry(0, 0, (5, 10), copy=False),))
    out = augment_original(Circuit(1, [C.h(0)]), mapping)
    assert out.n_qubits == 3 and len(out.gates) == 1


def test_duplication_code_needs_the_copies():
    orig, qec, mapping = F.duplication_code(3)
    assert verify_qec(orig, qec, mapping)[0].equivalent
    no_copy = QecMapping(tuple(MappingEntry(e.original, e.carrier, e.duplicates, copy=False)
                               for e in mapping.entries))
    assert not verify_qec(orig, qec, no_copy)[0].equivalent


def test_mapping_json_round_trip(tmp_path):
    _, _, mapping = F.shor_code()
    path = tmp_path / "m.json"
    path.write_text(json.dumps(mapping.to_dict()))
    assert QecMapping.load(path) == mapping


def test_entry_order_is_preserved():
    doc = {"map": [{"original": 1, "carrier": 4}, {"original": 0, "carrier": 2}]}
    m = QecMapping.from_dict(doc)
    assert [e.original for e in m.entries] == [1, 0]
    assert m.kept_qubits == [2, 4]


@pytest.mark.parametrize("doc", [
    {},
    {"map": [{"carrier": 0}]},
    {"map": [{"original": 0, "carrier": 0, "duplicates": [0]}]},
    {"map": [{"original": 1, "carrier": 0}]},
    {"map": [{"original": 0, "carrier": "a"}]},
    {"map": [{"original": 0, "carrier": 0, "copy": "yes"}]},
])
def test_bad_mappings(doc):
    with pytest.raises(QecMappingError):
        QecMapping.from_dict(doc)


def test_mapping_must_name_measured_qubits():
    orig, qec, _ = F.bit_flip_code()
    with pytest.raises(QecMappingError, match="not measured"):
        verify_qec(orig, qec, QecMapping((MappingEntry(0, 1, ()),)))
    with pytest.raises(QecMappingError):
        verify_qec(orig, qec, QecMapping((MappingEntry(0, 9, ()),)))
