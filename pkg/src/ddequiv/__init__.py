"""Decision-diagram equivalence checking for quantum circuits."""

from .circuit import Circuit, CircuitError, Gate, GateKind
from .dd import DDPackage, Edge
from .equivalence import (
    Strategy,
    StrategyConfig,
    VerificationResult,
    Verdict,
    check_lookahead,
    check_naive,
    check_position_match,
    check_proportional,
    run_check,
)
from .passes import PassConfig, preprocess
from .qasm import QasmError, emit_qasm, load_qasm, parse_qasm
from .qec import QecMapping, prune_qec, verify_qec

__version__ = "0.1.0"

__all__ = [
    "Circuit", "CircuitError", "Gate", "GateKind",
    "DDPackage", "Edge",
    "Strategy", "StrategyConfig", "VerificationResult", "Verdict",
    "check_naive", "check_proportional", "check_lookahead", "check_position_match", "run_check",
    "PassConfig", "preprocess",
    "QasmError", "parse_qasm", "load_qasm", "emit_qasm",
    "QecMapping", "prune_qec", "verify_qec",
]
