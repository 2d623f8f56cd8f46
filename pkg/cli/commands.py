"""
CLI Commands
analyze, trace, basin and enumerate over a problem file.
Every command writes its output document to `out` and returns the data it wrote.
"""

import csv
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from cli.problem_file import ProblemFile, load_problem_file
from cli.report import Report, dumps
from core.order import relation
from infrastructure.config_manager import get_config
from infrastructure.error_handling import (
    IndeterminateError,
    NonexistenceError,
    UnsupportedSizeError,
)
from infrastructure.logger import get_logger
from infrastructure.validation import InputValidator, ValidationError
from solver.iteration_engine import Problem, iterate, residual
from solver.steady_state import (
    BasinOutcome,
    ExistenceOutcome,
    basin_probe,
    bounds,
    decide_existence,
    dominant_fixed_point,
    enumerate_small,
    stability_certificate,
)

logger = get_logger(__name__)


# ==============================
# SHARED HELPERS
# ==============================

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _settings(pf: ProblemFile, tol: Optional[float], budget: Optional[int]) -> Tuple[float, int]:
    """Flags override file fields, which override the configuration"""
    config = get_config().iteration
    if tol is None:
        tol = pf.tol if pf.tol is not None else config.tol
    if budget is None:
        budget = pf.budget if pf.budget is not None else config.budget
    tol = InputValidator.validate_float(tol, "tol", strictly_positive=True)
    budget = InputValidator.validate_integer(budget, "budget", min_value=1)
    return tol, budget


def _writer(out: Optional[TextIO]):
    return csv.writer(out or sys.stdout, lineterminator="\n")


def _default_start(p: Problem) -> np.ndarray:
    b = bounds(p)
    if b.necessary_ok:
        return b.y_max.entries
    if np.all(p.k.entries > 0):
        return p.k.entries
    raise ValidationError("start", "required when k has a nonpositive entry")


def _dominant_or_none(p: Problem, tol: float, budget: int):
    try:
        dominant, _ = dominant_fixed_point(p, tol, budget)
        return dominant
    except (NonexistenceError, IndeterminateError):
        return None


# ==============================
# ANALYZE
# ==============================

def cmd_analyze(
    path: str,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
    enumerate_points: bool = False,
    out: Optional[TextIO] = None,
) -> Report:
    """bounds -> existence -> dominant point -> certificate, as one JSON report"""
    started = time.perf_counter()
    pf = load_problem_file(path)
    p = pf.problem
    tol, budget = _settings(pf, tol, budget)

    b = bounds(p)
    verdict = decide_existence(p, tol, budget)
    dominant = None
    certificate = None
    if verdict.outcome == ExistenceOutcome.EXISTS:
        dominant = verdict.dominant.to_list()
        certificate = Report.certificate_section(stability_certificate(p, verdict.dominant))

    fixed_points = None
    if enumerate_points:
        if p.n > get_config().enumeration.max_dim:
            raise UnsupportedSizeError(p.n, f"n <= {get_config().enumeration.max_dim}")
        fixed_points = [y.to_list() for y in enumerate_small(p, tol=tol)]

    report = Report(
        problem=p.to_dict(),
        tol=tol,
        budget=budget,
        bounds=Report.bounds_section(b),
        verdict=Report.verdict_section(verdict),
        dominant=dominant,
        certificate=certificate,
        fixed_points=fixed_points,
        timing={"elapsed_seconds": time.perf_counter() - started},
    )

    stream = out or sys.stdout
    stream.write(report.to_json() + "\n")
    logger.info("Analysis complete", outcome=verdict.outcome.value)
    return report


# ==============================
# TRACE
# ==============================

def cmd_trace(
    path: str,
    start: Optional[Sequence[float]] = None,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
    out: Optional[TextIO] = None,
) -> List[List[str]]:
    """
    One CSV row per stored iterate: step, y1..yn, step_size, in_domain.
    The terminal status follows as a '#' comment line.
    """
    pf = load_problem_file(path)
    p = pf.problem
    tol, budget = _settings(pf, tol, budget)

    if start is None:
        y0 = _default_start(p)
    else:
        y0 = InputValidator.validate_vector(list(start), "start", length=p.n, strictly_positive=True)

    trace = iterate(p, y0, tol, budget)

    header = ["step"] + [f"y{i + 1}" for i in range(p.n)] + ["step_size", "in_domain"]
    rows = [header]
    for step, y, size in zip(trace.steps, trace.iterates, trace.step_sizes):
        rows.append(
            [str(step)]
            + [_fmt(x) for x in y]
            + ["" if step == 0 else _fmt(size), "true" if y.is_positive() else "false"]
        )

    writer = _writer(out)
    writer.writerows(rows)
    status = f"# status={trace.status.value},iterations={trace.iterations}"
    if trace.exit_step is not None:
        status += f",exit_step={trace.exit_step}"
    (out or sys.stdout).write(status + "\n")
    return rows


# ==============================
# BASIN
# ==============================

def _basin_box(p: Problem, box: Optional[Sequence[float]]) -> Tuple[np.ndarray, np.ndarray]:
    if box is None:
        b = bounds(p)
        if not b.necessary_ok:
            raise ValidationError("box", "required when y_min/y_max are undefined")
        upper = b.y_max.entries
        return np.maximum(b.y_min.entries, 1e-6 * upper), upper

    corners = InputValidator.validate_vector(list(box), "box", length=4, strictly_positive=True)
    lower, upper = np.array(corners[:2]), np.array(corners[2:])
    if not np.all(lower < upper):
        raise ValidationError("box", "lower corner must be < upper corner")
    return lower, upper


def cmd_basin(
    path: str,
    box: Optional[Sequence[float]] = None,
    grid: Optional[int] = None,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
    out: Optional[TextIO] = None,
) -> List[List[str]]:
    """grid x grid probes over a box (n = 2); rows are ordered by grid index"""
    pf = load_problem_file(path)
    p = pf.problem
    if p.n != 2:
        raise UnsupportedSizeError(p.n, "n = 2")
    tol, budget = _settings(pf, tol, budget)

    config = get_config().basin
    grid = InputValidator.validate_integer(
        config.grid if grid is None else grid, "grid", min_value=2
    )
    lower, upper = _basin_box(p, box)

    xs = np.linspace(lower[0], upper[0], grid)
    ys = np.linspace(lower[1], upper[1], grid)
    starts = [np.array([x, y]) for x in xs for y in ys]
    dominant = _dominant_or_none(p, tol, budget)

    def probe(y0: np.ndarray):
        return basin_probe(p, y0, tol, budget, dominant=dominant, resolve_dominant=False)

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        results = list(pool.map(probe, starts))

    rows = [["index", "y1", "y2", "classification", "iterations"]]
    for index, (y0, result) in enumerate(zip(starts, results)):
        rows.append(
            [str(index), _fmt(y0[0]), _fmt(y0[1]), result.outcome.value, str(result.iterations)]
        )
    _writer(out).writerows(rows)

    counts = {o.value: sum(r.outcome == o for r in results) for o in BasinOutcome}
    logger.info("Basin grid probed", grid=grid, **counts)
    return rows


# ==============================
# ENUMERATE
# ==============================

def cmd_enumerate(
    path: str,
    grid: Optional[int] = None,
    tol: Optional[float] = None,
    out: Optional[TextIO] = None,
) -> Dict[str, Any]:
    """Fixed points (n <= 3) with residuals, dominance flags and comparability matrix"""
    pf = load_problem_file(path)
    p = pf.problem
    tol, _ = _settings(pf, tol, None)

    points = enumerate_small(p, grid=grid, tol=tol)
    arrays = [y.entries for y in points]
    slack = 10 * tol

    entries = []
    for y in points:
        dominant = all(np.all(z <= y.entries + slack) for z in arrays)
        entries.append({"point": y.to_list(), "residual": residual(p, y), "dominant": dominant})

    fragment = {
        "problem": p.to_dict(),
        "fixed_points": entries,
        "comparability": [[relation(a, b) for b in arrays] for a in arrays],
    }
    (out or sys.stdout).write(dumps(fragment) + "\n")
    return fragment
