# solver package
from solver.iteration_engine import Problem, IterationTrace, TraceStatus, Monotonicity, apply_T, residual, iterate
from solver.steady_state import (
    Bounds,
    ExistenceOutcome,
    ExistenceVerdict,
    StabilityCertificate,
    BasinOutcome,
    bounds,
    decide_existence,
    dominant_fixed_point,
    spectral_relations,
    solve_reducible,
    solve_1d,
    enumerate_small,
    basin_probe,
)

__all__ = [
    "Problem",
    "IterationTrace",
    "TraceStatus",
    "Monotonicity",
    "apply_T",
    "residual",
    "iterate",
    "Bounds",
    "ExistenceOutcome",
    "ExistenceVerdict",
    "StabilityCertificate",
    "BasinOutcome",
    "bounds",
    "decide_existence",
    "dominant_fixed_point",
    "spectral_relations",
    "solve_reducible",
    "solve_1d",
    "enumerate_small",
    "basin_probe",
]
