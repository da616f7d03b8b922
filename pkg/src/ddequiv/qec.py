"""Checking an error-corrected circuit against its unprotected original.

The QEC circuit is pruned down to the measured qubits named in a mapping
(every gate touching any other qubit is dropped), the original is relocated
onto the same compacted indices, widened with idle qubits and extended with
CX fan-outs from each carrier to its duplicates, then both go through the
ordinary equivalence check.

Mapping files are JSON::

    {"map": [{"original": 0, "carrier": 0, "duplicates": [5, 10]}]}

Indices refer to flattened qubits of the QEC circuit. An entry may set
``"copy": false`` when its duplicates end the QEC circuit uncopied (for
example after a decode step); they are then kept but only padded in the
original.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .circuit import Circuit, CircuitError, cx, strip_measurements
from .equivalence import StrategyConfig, VerificationResult, run_check
from .passes import reconstruct_swaps, remove_diagonal_before_measure


class QecMappingError(ValueError):
    pass


@dataclass(frozen=True)
class MappingEntry:
    original: int
    carrier: int
    duplicates: tuple[int, ...] = ()
    copy: bool = True


@dataclass(frozen=True)
class QecMapping:
    entries: tuple[MappingEntry, ...]

    def __post_init__(self):
        seen_orig = set()
        seen = set()
        for e in self.entries:
            if e.original in seen_orig:
                raise QecMappingError(f"original qubit {e.original} mapped twice")
            seen_orig.add(e.original)
            for q in (e.carrier, *e.duplicates):
                if q < 0:
                    raise QecMappingError(f"negative qubit index {q}")
                if q in seen:
                    raise QecMappingError(f"QEC qubit {q} appears in more than one role")
                seen.add(q)
        if seen_orig != set(range(len(self.entries))):
            raise QecMappingError(
                f"original qubits must be 0..{len(self.entries) - 1}, got {sorted(seen_orig)}"
            )

    @property
    def kept_qubits(self) -> list[int]:
        return sorted(q for e in self.entries for q in (e.carrier, *e.duplicates))

    @property
    def index_map(self) -> dict[int, int]:
        return {q: i for i, q in enumerate(self.kept_qubits)}

    @classmethod
    def from_dict(cls, doc) -> QecMapping:
        if not isinstance(doc, dict) or not isinstance(doc.get("map"), list):
            raise QecMappingError('mapping must be an object with a "map" list')
        entries = []
        for i, raw in enumerate(doc["map"]):
            if not isinstance(raw, dict):
                raise QecMappingError(f"map[{i}] is not an object")
            try:
                orig, carrier = raw["original"], raw["carrier"]
            except KeyError as exc:
                raise QecMappingError(f"map[{i}] lacks {exc.args[0]!r}") from None
            dups = raw.get("duplicates", [])
            copy = raw.get("copy", True)
            ints = [orig, carrier, *dups] if isinstance(dups, list) else None
            if ints is None or not all(isinstance(v, int) and not isinstance(v, bool) for v in ints):
                raise QecMappingError(f"map[{i}] indices must be integers")
            if not isinstance(copy, bool):
                raise QecMappingError(f"map[{i}].copy must be a boolean")
            entries.append(MappingEntry(orig, carrier, tuple(dups), copy))
        return cls(tuple(entries))

    @classmethod
    def from_json(cls, text: str) -> QecMapping:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise QecMappingError(f"invalid JSON: {exc}") from None
        return cls.from_dict(doc)

    @classmethod
    def load(cls, path) -> QecMapping:
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def to_dict(self) -> dict:
        out = []
        for e in self.entries:
            d = {"original": e.original, "carrier": e.carrier, "duplicates": list(e.duplicates)}
            if not e.copy:
                d["copy"] = False
            out.append(d)
        return {"map": out}

    def validate_against(self, qec: Circuit):
        measured = {q for q, _ in qec.measured_qubits}
        for q in self.kept_qubits:
            if q >= qec.n_qubits:
                raise QecMappingError(f"mapping names qubit {q}, QEC circuit has {qec.n_qubits}")
            if q not in measured:
                raise QecMappingError(f"mapped qubit {q} is not measured in the QEC circuit")


@dataclass
class PruneReport:
    kept_qubits: list[int]
    removed_gate_count: int
    kept_gate_count: int
    index_map: dict[int, int] = field(default_factory=dict)


def prune_qec(qec: Circuit, mapping: QecMapping) -> tuple[Circuit, PruneReport]:
    """Keep the mapped qubits and the gates acting only on them."""
    mapping.validate_against(qec)
    reshaped = reconstruct_swaps(qec)
    index = mapping.index_map
    keep = set(index)
    kept, removed = [], 0
    for g in reshaped.gates:
        if g.is_unitary and g.operand_set <= keep:
            kept.append(g.remap(index))
        else:
            removed += 1
    pruned = Circuit(len(index), kept, 0, reshaped.global_phase)
    report = PruneReport(mapping.kept_qubits, removed, len(kept), index)
    return pruned, report


def augment_original(orig: Circuit, mapping: QecMapping, pruned_width: int | None = None) -> Circuit:
    """Relocate ``orig`` onto carrier slots and append carrier->duplicate CXs."""
    orig, _ = strip_measurements(orig)
    if orig.n_qubits != len(mapping.entries):
        raise CircuitError(
            f"original has {orig.n_qubits} qubits but the mapping has {len(mapping.entries)} entries"
        )
    index = mapping.index_map
    width = len(index) if pruned_width is None else pruned_width
    if width != len(index):
        raise CircuitError(f"pruned width {width} disagrees with {len(index)} mapped qubits")
    slot = {e.original: index[e.carrier] for e in mapping.entries}
    out = Circuit(width, [g.remap(slot) for g in orig.gates], 0, orig.global_phase)
    for e in mapping.entries:
        if not e.copy:
            continue
        for d in e.duplicates:
            out.append(cx(index[e.carrier], index[d]))
    return out


def verify_qec(orig: Circuit, qec: Circuit, mapping: QecMapping,
               cfg: StrategyConfig = StrategyConfig()) -> tuple[VerificationResult, PruneReport]:
    if cfg.apply_preprocess and cfg.passes.remove_diagonal_before_measure:
        qec = remove_diagonal_before_measure(qec)
    pruned, report = prune_qec(qec, mapping)
    augmented = augment_original(orig, mapping, pruned.n_qubits)
    return run_check(augmented, pruned, cfg), report
