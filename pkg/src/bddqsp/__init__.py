"""Quantum state preparation from weighted free binary decision diagrams."""
from .diagram import (
    Builder,
    Diagram,
    DiagramError,
    Edge,
    Kind,
    Node,
    PathTrace,
    ValidationReport,
    amplitude,
    evaluate,
    is_obdd_under,
    layers,
    reduce,
    topological_order,
    trace,
    validate,
)
from .weighting import model_count, uniform_weights
from .circuit import Circuit, Gate, gate_counts, synth_phase, synth_state
from .simulator import brute_force_state, compare, simulate, unitary_of

__version__ = "0.1.0"

__all__ = [
    "Builder", "Diagram", "DiagramError", "Edge", "Kind", "Node", "PathTrace",
    "ValidationReport", "amplitude", "evaluate", "is_obdd_under", "layers", "reduce",
    "topological_order", "trace", "validate", "model_count", "uniform_weights",
    "Circuit", "Gate", "gate_counts", "synth_phase", "synth_state",
    "brute_force_state", "compare", "simulate", "unitary_of",
]
