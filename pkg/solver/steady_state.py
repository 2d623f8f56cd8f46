"""
Steady-State Decision and Solution Procedures

- Bounds: Delta = k o k - 4 diag(M), y^min/y^max enclosing every fixed point
- Existence decision by iteration from y^max (or from k when M has a zero diagonal entry)
- Dominant fixed point with a spectral-radius stability certificate
- Spectral-radius relations between known fixed points
- Cascade solve over the irreducible normal form of a reducible M
- Closed form for n = 1, grid+Newton enumeration for n <= 3, basin probes
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.matrix_analysis import (
    apply_permutation_vec,
    is_irreducible,
    normal_form,
    spectral_radius,
    unpermute_vec,
)
from core.order import (
    OrderedInterval,
    PositiveVector,
    Vector,
    VectorLike,
    as_array,
    as_positive,
    leq,
    relation,
)
from infrastructure.config_manager import get_config
from infrastructure.error_handling import (
    IndeterminateError,
    NonexistenceError,
    RejectedInputError,
    UnsupportedSizeError,
)
from infrastructure.logger import get_logger
from solver.iteration_engine import (
    IterationTrace,
    Problem,
    TraceStatus,
    iterate,
    residual,
    run_fit,
)
from solver.newton import batch_newton, polish

logger = get_logger(__name__)

# relative offset of the start k(1 + eps) used when M has a zero diagonal entry
_ZERO_DIAGONAL_OFFSET = 1e-9


# ==============================
# RESULT TYPES
# ==============================

@dataclass(frozen=True)
class Bounds:
    """Delta and, when the necessary conditions hold, the enclosing box"""
    delta: Vector
    necessary_ok: bool
    y_min: Optional[Vector] = None
    y_max: Optional[Vector] = None
    # M diagonal with positive diagonal and Delta > 0: y^min and y^max are fixed points
    diagonal_fixed: bool = False

    def interval(self) -> Optional[OrderedInterval]:
        if not self.necessary_ok:
            return None
        return OrderedInterval(self.y_min, self.y_max)


class ExistenceOutcome(Enum):
    EXISTS = "Exists"
    NOT_EXISTS = "NotExists"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class ExistenceVerdict:
    outcome: ExistenceOutcome
    dominant: Optional[PositiveVector] = None
    witness_step: Optional[int] = None
    witness: Optional[Vector] = None
    reason: str = ""
    trace: Optional[IterationTrace] = None

    @property
    def exists(self) -> bool:
        return self.outcome == ExistenceOutcome.EXISTS


class StabilityClass(Enum):
    ASYMPTOTICALLY_STABLE = "AsymptoticallyStable"
    MARGINAL = "Marginal"
    VIOLATION = "Violation"


@dataclass(frozen=True)
class StabilityCertificate:
    """rho(M diag(1/(y o y))) at the dominant fixed point"""
    rho: float
    classification: StabilityClass


@dataclass(frozen=True)
class PairRelation:
    i: int
    j: int
    relation: str
    rho: float


@dataclass(frozen=True)
class PointRelation:
    index: int
    rho: float
    dominant: bool


@dataclass
class SpectralReport:
    pairs: List[PairRelation]
    points: List[PointRelation]
    dominant_index: Optional[int]
    irreducible: bool
    violations: List[str] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations


class BasinOutcome(Enum):
    CONVERGES_TO_DOMINANT = "ConvergesToDominant"
    CONVERGES_TO_OTHER = "ConvergesToOther"
    EXITS = "Exits"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class BasinProbe:
    start: PositiveVector
    outcome: BasinOutcome
    iterations: int
    limit: Optional[Vector] = None


# ==============================
# HELPERS
# ==============================

def _defaults(tol: Optional[float], budget: Optional[int]) -> Tuple[float, int]:
    config = get_config().iteration
    return (config.tol if tol is None else tol, config.budget if budget is None else budget)


def _scaled_radius(p: Problem, a: np.ndarray, b: np.ndarray) -> float:
    """rho(M diag(1/(a o b)))"""
    return spectral_radius(p.M.scale_columns(1.0 / (a * b)))


def _certify(p: Problem, y: np.ndarray, tol: float) -> Optional[PositiveVector]:
    """
    Newton-polish an iteration limit. When polishing drifts away the raw limit
    is kept, but only if its own residual is below tol; otherwise None.
    """
    polished, res = polish(p, y)
    drift = float(np.max(np.abs(polished.entries - y)))
    if drift <= 1e-6 * max(1.0, float(np.max(np.abs(y)))):
        return polished

    raw_res = residual(p, y)
    logger.warning("Polishing moved away from the iteration limit", drift=drift, residual=raw_res)
    if raw_res < tol:
        return PositiveVector(y)
    return None


# ==============================
# BOUNDS
# ==============================

def bounds(p: Problem) -> Bounds:
    """
    Delta_i = k_i^2 - 4 M_ii. Fixed points can only exist when k > 0 and
    Delta >= 0, and then all of them lie in [y^min, y^max] with
    y^min = (k - sqrt(Delta))/2, y^max = (k + sqrt(Delta))/2.
    """
    k = p.k.entries
    diag = np.diag(p.M.entries)
    delta = k * k - 4.0 * diag

    if not (np.all(k > 0) and np.all(delta >= 0)):
        return Bounds(delta=Vector(delta), necessary_ok=False)

    root = np.sqrt(delta)
    off_diagonal = p.M.entries - np.diag(diag)
    diagonal_fixed = bool(
        not np.any(off_diagonal) and np.all(diag > 0) and np.all(delta > 0)
    )
    return Bounds(
        delta=Vector(delta),
        necessary_ok=True,
        y_min=Vector(0.5 * (k - root)),
        y_max=Vector(0.5 * (k + root)),
        diagonal_fixed=diagonal_fixed,
    )


# ==============================
# EXISTENCE
# ==============================

def decide_existence(
    p: Problem,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
) -> ExistenceVerdict:
    """
    With a positive diagonal the sequence from y^max is antitone and a fixed
    point exists iff every T(y_r) stays >= y^min. Otherwise the sequence starts
    just above k and a fixed point exists iff it converges in the orthant.
    """
    tol, budget = _defaults(tol, budget)
    b = bounds(p)

    if not b.necessary_ok:
        reason = "k has a nonpositive entry" if np.any(p.k.entries <= 0) else "Delta has a negative entry"
        logger.info("Existence rejected by necessary conditions", reason=reason)
        return ExistenceVerdict(
            ExistenceOutcome.NOT_EXISTS, witness_step=-1, reason=reason
        )

    if np.all(np.diag(p.M.entries) > 0):
        y_min = b.y_min.entries
        trace = run_fit(p, b.y_max, tol, budget, guard=lambda y: bool(np.all(y >= y_min)))
        start_label = "y_max"
    else:
        start = p.k.entries * (1.0 + _ZERO_DIAGONAL_OFFSET)
        trace = run_fit(p, start, tol, budget)
        start_label = "k"

    if trace.status in (TraceStatus.HALTED, TraceStatus.DOMAIN_EXIT):
        reason = (
            "iterate fell below y_min" if trace.status == TraceStatus.HALTED
            else "iterate left the positive orthant"
        )
        logger.info(
            "No positive fixed point",
            start=start_label,
            witness_step=trace.exit_step,
            reason=reason,
        )
        return ExistenceVerdict(
            ExistenceOutcome.NOT_EXISTS,
            witness_step=trace.exit_step,
            witness=trace.last,
            reason=reason,
            trace=trace,
        )

    dominant = None
    if trace.status == TraceStatus.CONVERGED and trace.limit.is_positive():
        dominant = _certify(p, trace.limit.entries, tol)

    if dominant is not None:
        logger.info(
            "Positive fixed point found",
            start=start_label,
            iterations=trace.iterations,
            dominant=dominant.to_list(),
        )
        return ExistenceVerdict(
            ExistenceOutcome.EXISTS,
            dominant=dominant,
            reason=f"iteration from {start_label} converged",
            trace=trace,
        )

    if trace.status == TraceStatus.CONVERGED and trace.limit.is_positive():
        reason = f"limit from {start_label} has residual >= {tol:.1e}"
    else:
        reason = f"no decision within {budget} iterations"
    logger.warning("Existence undecided", reason=reason, start=start_label)
    return ExistenceVerdict(
        ExistenceOutcome.INDETERMINATE,
        reason=reason,
        trace=trace,
    )


# ==============================
# DOMINANT FIXED POINT
# ==============================

def stability_certificate(
    p: Problem,
    y: VectorLike,
    marginal_tol: Optional[float] = None,
) -> StabilityCertificate:
    marginal_tol = get_config().spectral.marginal_tol if marginal_tol is None else marginal_tol
    x = as_positive(y).entries
    rho = _scaled_radius(p, x, x)

    if abs(rho - 1.0) <= marginal_tol:
        classification = StabilityClass.MARGINAL
    elif rho < 1.0:
        classification = StabilityClass.ASYMPTOTICALLY_STABLE
    else:
        classification = StabilityClass.VIOLATION
    return StabilityCertificate(rho=rho, classification=classification)


def dominant_fixed_point(
    p: Problem,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
    cross_check: Optional[Sequence[VectorLike]] = None,
) -> Tuple[PositiveVector, StabilityCertificate]:
    """
    The fixed point that dominates all others, with its stability certificate.
    Points in `cross_check` must all lie below it (up to 10*tol).
    """
    tol, budget = _defaults(tol, budget)
    verdict = decide_existence(p, tol, budget)

    if verdict.outcome == ExistenceOutcome.NOT_EXISTS:
        raise NonexistenceError(
            f"No positive fixed point: {verdict.reason} (step {verdict.witness_step})",
            verdict=verdict,
        )
    if verdict.outcome == ExistenceOutcome.INDETERMINATE:
        raise IndeterminateError(
            f"Existence undecided after {budget} iterations", verdict=verdict
        )

    dominant = verdict.dominant
    certificate = stability_certificate(p, dominant)
    if certificate.classification == StabilityClass.VIOLATION:
        logger.error("Dominant fixed point failed its certificate", rho=certificate.rho)

    for i, point in enumerate(cross_check or ()):
        if not leq(as_array(point), dominant.entries + 10 * tol):
            raise RejectedInputError(
                f"Cross-check point {i} is not dominated by {dominant.to_list()}"
            )

    return dominant, certificate


# ==============================
# SPECTRAL RELATIONS
# ==============================

def spectral_relations(
    p: Problem,
    fixed_points: Sequence[VectorLike],
    tol: Optional[float] = None,
    rho_tol: Optional[float] = None,
) -> SpectralReport:
    """
    Checks the spectral-radius relations between distinct fixed points y, z:
    rho(M diag(1/(y o z))) >= 1, = 1 when y < z, rho at (y, y) >= 1 for
    non-dominant y, and for irreducible M (n > 1) with two or more points
    rho < 1 at the dominant point and rho > 1 at every other one.
    rho_tol (default SpectralConfig.relation_tol) is the band for rho = 1.
    """
    config = get_config()
    tol = config.iteration.tol if tol is None else tol
    rho_tol = config.spectral.relation_tol if rho_tol is None else rho_tol
    points = [as_positive(y) for y in fixed_points]
    for i, y in enumerate(points):
        res = residual(p, y)
        if res >= tol:
            raise RejectedInputError(
                f"fixed_points[{i}] has residual {res:.3e} >= tol {tol:.1e}"
            )

    arrays = [y.entries for y in points]
    dominant_index = None
    for i, y in enumerate(arrays):
        if all(np.all(z <= y + 10 * tol) for z in arrays):
            dominant_index = i
            break

    irreducible = is_irreducible(p.M)
    report = SpectralReport(
        pairs=[], points=[], dominant_index=dominant_index, irreducible=irreducible
    )

    for i in range(len(arrays)):
        for j in range(i + 1, len(arrays)):
            label = relation(arrays[i], arrays[j])
            if label == "eq":
                continue
            rho = _scaled_radius(p, arrays[i], arrays[j])
            report.pairs.append(PairRelation(i, j, label, rho))
            if rho < 1.0 - rho_tol:
                report.violations.append(f"pair ({i}, {j}): rho = {rho!r} < 1")
            if label in ("lt", "gt") and abs(rho - 1.0) > rho_tol:
                report.violations.append(
                    f"pair ({i}, {j}) is strictly ordered but rho = {rho!r} != 1"
                )

    strict = irreducible and p.n > 1 and len(arrays) >= 2
    for i, y in enumerate(arrays):
        rho = _scaled_radius(p, y, y)
        is_dominant = i == dominant_index
        report.points.append(PointRelation(i, rho, is_dominant))
        if not is_dominant and rho < 1.0 - rho_tol:
            report.violations.append(f"point {i}: rho = {rho!r} < 1 at a non-dominant point")
        if strict and is_dominant and not rho < 1.0:
            report.violations.append(f"point {i}: rho = {rho!r} >= 1 at the dominant point")
        if strict and not is_dominant and not rho > 1.0:
            report.violations.append(f"point {i}: rho = {rho!r} <= 1 at a non-dominant point")

    if report.violations:
        logger.warning("Spectral relations violated", violations=report.violations)
    return report


# ==============================
# CLOSED FORM AND CASCADE
# ==============================

def solve_1d(k: float, M: float) -> Tuple[float, ...]:
    """Fixed points of y = k - M/y, largest first"""
    if M < 0:
        raise ValueError("M must be nonnegative")
    if M == 0:
        return (float(k),) if k > 0 else ()

    disc = k * k - 4.0 * M
    if k <= 0 or disc < 0:
        return ()
    if disc == 0:
        return (0.5 * k,)
    upper = 0.5 * (k + math.sqrt(disc))
    # product of the roots is M
    return (upper, M / upper)


def solve_reducible(
    p: Problem,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
) -> PositiveVector:
    """
    Dominant fixed point assembled block by block from the irreducible normal
    form: the last block first, then each earlier block with the offset
    k_i - sum_{j>i} M_ij (1/y_j).
    """
    tol, budget = _defaults(tol, budget)
    nf = normal_form(p.M)
    K = apply_permutation_vec(nf.permutation, p.k).entries
    B = nf.blocks.entries
    z = np.zeros(p.n)

    for b in reversed(range(nf.s)):
        lo, hi = nf.boundaries()[b]
        offset = K[lo:hi] - B[lo:hi, hi:] @ (1.0 / z[hi:])
        members = list(nf.permutation.perm[lo:hi])

        if hi - lo == 1:
            roots = solve_1d(float(offset[0]), float(B[lo, lo]))
            if not roots:
                raise NonexistenceError(
                    f"Block {b} (indices {members}) has no positive fixed point", block=b
                )
            z[lo] = roots[0]
            continue

        sub = Problem.from_arrays(offset, B[lo:hi, lo:hi])
        try:
            y_block, _ = dominant_fixed_point(sub, tol, budget)
        except NonexistenceError as e:
            raise NonexistenceError(
                f"Block {b} (indices {members}) has no positive fixed point",
                verdict=e.verdict,
                block=b,
            ) from e
        z[lo:hi] = y_block.entries

    assembled = unpermute_vec(nf.permutation, z)
    logger.debug("Cascade solve finished", blocks=nf.s)
    certified = _certify(p, assembled, tol)
    if certified is None:
        raise IndeterminateError(f"Cascade result has residual >= {tol:.1e}")
    return certified


# ==============================
# ENUMERATION (small n)
# ==============================

def _same_root(
    p: Problem, a: np.ndarray, b: np.ndarray, radius: float, reach: float, tol: float
) -> bool:
    """Within radius, or within reach and joined by a midpoint that is itself a root"""
    gap = float(np.max(np.abs(a - b)))
    if gap <= radius:
        return True
    return gap <= reach and residual(p, 0.5 * (a + b)) < tol


def enumerate_small(
    p: Problem,
    grid: Optional[int] = None,
    tol: Optional[float] = None,
) -> List[PositiveVector]:
    """
    All positive fixed points of a problem with n <= 3, by damped Newton from
    a grid^n lattice over [y^min, y^max]. Roots closer than dedup_factor*tol
    are merged, as are the scattered Newton limits around a multiple root
    (kept once, at the smallest residual). The result is sorted by
    decreasing component sum.
    """
    config = get_config()
    grid = config.enumeration.grid if grid is None else grid
    tol = config.iteration.tol if tol is None else tol

    if p.n > config.enumeration.max_dim:
        raise UnsupportedSizeError(p.n, f"n <= {config.enumeration.max_dim}")
    if grid < 16:
        raise ValueError("grid must be at least 16")

    b = bounds(p)
    if not b.necessary_ok:
        return []

    upper = b.y_max.entries
    lower = np.maximum(b.y_min.entries, 1e-6 * upper)
    axes = [np.linspace(lower[i], upper[i], grid) for i in range(p.n)]
    lattice = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, p.n)
    starts = np.vstack([lattice, upper[np.newaxis, :]])

    Y, res = batch_newton(p, starts, config.enumeration.newton_iter, tol)
    candidates = Y[res < 1e-6]
    if candidates.size == 0:
        return []

    scale = max(1.0, float(np.max(upper)))
    _, first = np.unique(np.round(candidates / scale, 7), axis=0, return_index=True)

    radius = config.certification.dedup_factor * tol
    # Newton stalls about sqrt(tol) away from a multiple root
    reach = 10.0 * math.sqrt(tol) * scale
    clusters: List[List[Tuple[np.ndarray, float]]] = []
    for idx in sorted(first.tolist()):
        y, r = polish(p, candidates[idx])
        if r >= tol:
            continue
        for cluster in clusters:
            if _same_root(p, cluster[0][0], y.entries, radius, reach, tol):
                cluster.append((y.entries, r))
                break
        else:
            clusters.append([(y.entries, r)])

    roots = [min(cluster, key=lambda item: item[1])[0] for cluster in clusters]
    roots.sort(key=lambda z: (-float(np.sum(z)), tuple((-z).tolist())))
    logger.debug("Enumerated fixed points", count=len(roots), samples=len(starts))
    return [PositiveVector(z) for z in roots]


# ==============================
# BASIN PROBES
# ==============================

def basin_probe(
    p: Problem,
    y0: VectorLike,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
    dominant: Optional[VectorLike] = None,
    match_radius: Optional[float] = None,
    resolve_dominant: bool = True,
) -> BasinProbe:
    """
    Classify where the iteration from y0 ends up. Without `dominant` it is
    computed here unless `resolve_dominant` is False (known nonexistence).
    """
    tol, budget = _defaults(tol, budget)
    match_radius = get_config().certification.match_radius if match_radius is None else match_radius

    if dominant is None and resolve_dominant:
        try:
            dominant, _ = dominant_fixed_point(p, tol, budget)
        except (NonexistenceError, IndeterminateError):
            dominant = None

    trace = iterate(p, y0, tol, budget)
    if trace.status == TraceStatus.CONVERGED:
        if dominant is not None and np.max(np.abs(trace.limit.entries - as_array(dominant))) <= match_radius:
            outcome = BasinOutcome.CONVERGES_TO_DOMINANT
        else:
            outcome = BasinOutcome.CONVERGES_TO_OTHER
    elif trace.status == TraceStatus.DOMAIN_EXIT:
        outcome = BasinOutcome.EXITS
    else:
        outcome = BasinOutcome.UNDECIDED

    return BasinProbe(
        start=trace.start,
        outcome=outcome,
        iterations=trace.iterations,
        limit=trace.limit,
    )
