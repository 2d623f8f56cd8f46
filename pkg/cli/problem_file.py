"""
Problem File Loader
Parses the JSON problem forms: direct {"k", "M"}, the two-CPL "circuit"
and the "general" Mbar/P/k circuit, plus optional tol/budget overrides.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from circuit.circuit_model import build_general, build_two_cpl
from infrastructure.logger import get_logger
from infrastructure.validation import InputValidator, NonnegativityError, ValidationError
from solver.iteration_engine import Problem

logger = get_logger(__name__)

_FORMS = ("direct", "circuit", "general")
_TOP_LEVEL_KEYS = ["k", "M", "circuit", "general", "tol", "budget"]


@dataclass(frozen=True)
class ProblemFile:
    problem: Problem
    form: str
    tol: Optional[float] = None
    budget: Optional[int] = None


def _direct(data: Dict[str, Any]) -> Problem:
    if "k" not in data:
        raise ValidationError("k", "missing required key")
    if "M" not in data:
        raise ValidationError("M", "missing required key")

    k = InputValidator.validate_vector(data["k"], "k")
    M = np.array(InputValidator.validate_matrix(data["M"], "M", size=len(k)))
    negative = np.argwhere(M < 0)
    if negative.size:
        i, j = (int(x) for x in negative[0])
        raise NonnegativityError("M", i, j, float(M[i, j]))
    return Problem.from_arrays(k, M)


def _circuit(data: Any) -> Problem:
    keys = ["E", "r", "P"]
    InputValidator.validate_dict(data, "circuit", required_keys=keys, allowed_keys=keys)
    E = InputValidator.validate_float(data["E"], "circuit.E", strictly_positive=True)
    r = InputValidator.validate_vector(data["r"], "circuit.r", length=2, strictly_positive=True)
    P = InputValidator.validate_vector(data["P"], "circuit.P", length=2, strictly_positive=True)
    return build_two_cpl(E, r[0], r[1], P[0], P[1])


def _general(data: Any) -> Problem:
    keys = ["Mbar", "P", "k"]
    InputValidator.validate_dict(data, "general", required_keys=keys, allowed_keys=keys)
    Mbar = InputValidator.validate_matrix(data["Mbar"], "general.Mbar")
    n = len(Mbar)
    P = InputValidator.validate_vector(data["P"], "general.P", length=n)
    k = InputValidator.validate_vector(data["k"], "general.k", length=n)
    return build_general(Mbar, P, k)


def parse_problem(data: Any) -> ProblemFile:
    """Validate a decoded problem document"""
    InputValidator.validate_dict(data, "problem", allowed_keys=_TOP_LEVEL_KEYS)

    present = []
    if "k" in data or "M" in data:
        present.append("direct")
    present.extend(form for form in ("circuit", "general") if form in data)
    if len(present) != 1:
        raise ValidationError(
            "problem",
            f"exactly one of k/M, circuit, general is required (found {present or 'none'})",
        )

    form = present[0]
    if form == "direct":
        problem = _direct(data)
    elif form == "circuit":
        problem = _circuit(data["circuit"])
    else:
        problem = _general(data["general"])

    tol = None
    if "tol" in data:
        tol = InputValidator.validate_float(data["tol"], "tol", strictly_positive=True)
    budget = None
    if "budget" in data:
        budget = InputValidator.validate_integer(data["budget"], "budget", min_value=1)

    return ProblemFile(problem=problem, form=form, tol=tol, budget=budget)


def load_problem_file(path: Union[str, Path]) -> ProblemFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError("file", f"cannot read {path}: {e.strerror}") from e

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError("file", f"invalid JSON at line {e.lineno}: {e.msg}") from e

    problem_file = parse_problem(data)
    logger.info("Problem file loaded", path=str(path), form=problem_file.form, n=problem_file.problem.n)
    return problem_file
