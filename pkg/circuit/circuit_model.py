"""
Circuit Front End
Builds isotone electric systems y = k - M (1/y) from DC circuits with
constant-power loads: M = Mbar diag(P), with k the source voltages.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from infrastructure.logger import get_logger
from infrastructure.validation import InputValidator, NonnegativityError, ValidationError
from solver.iteration_engine import Problem

logger = get_logger(__name__)


@dataclass(frozen=True)
class CircuitSpec:
    """
    Physical description of a circuit.
    Without `Mbar` the two-CPL ladder is built from E, r = (r1, r2) and
    P = (P1, P2); with `Mbar` the general form is used and `k` defaults to E
    on every node.
    """
    E: float
    resistances: Sequence[float] = ()
    powers: Sequence[float] = ()
    Mbar: Optional[Sequence[Sequence[float]]] = None
    k: Optional[Sequence[float]] = None


def build_general(
    Mbar: Sequence[Sequence[float]],
    P: Sequence[float],
    k: Sequence[float],
) -> Problem:
    """Problem with M = Mbar diag(P) and offset k"""
    rows = InputValidator.validate_matrix(Mbar, "Mbar")
    n = len(rows)
    powers = InputValidator.validate_vector(P, "P", length=n)
    offset = InputValidator.validate_vector(k, "k", length=n)

    M = np.array(rows) * np.array(powers)[np.newaxis, :]
    negative = np.argwhere(M < 0)
    if negative.size:
        i, j = (int(x) for x in negative[0])
        raise NonnegativityError("M", i, j, float(M[i, j]))

    return Problem.from_arrays(offset, M)


def build_two_cpl(E: float, r1: float, r2: float, P1: float, P2: float) -> Problem:
    """Two constant-power loads on a resistive ladder fed by one source E"""
    values = {"E": E, "r1": r1, "r2": r2, "P1": P1, "P2": P2}
    E, r1, r2, P1, P2 = (
        InputValidator.validate_float(v, name, strictly_positive=True)
        for name, v in values.items()
    )
    return build_general([[r1, r1], [r1, r1 + r2]], [P1, P2], [E, E])


def build_problem(spec: CircuitSpec) -> Problem:
    if spec.Mbar is None:
        resistances = InputValidator.validate_vector(list(spec.resistances), "r", length=2)
        powers = InputValidator.validate_vector(list(spec.powers), "P", length=2)
        problem = build_two_cpl(spec.E, *resistances, *powers)
    else:
        n = len(spec.Mbar)
        if spec.k is None:
            E = InputValidator.validate_float(spec.E, "E", strictly_positive=True)
            offset = [E] * n
        else:
            offset = list(spec.k)
        if len(spec.powers) != n:
            raise ValidationError("P", f"expected {n} entries, got {len(spec.powers)}")
        problem = build_general(spec.Mbar, list(spec.powers), offset)

    logger.debug("Circuit problem built", n=problem.n)
    return problem
