"""
Nonnegative Matrix Analysis

Reducibility, irreducible normal form (block upper triangular form with
irreducible diagonal blocks), Perron root by shifted power iteration with
Collatz-Wielandt bracketing, and row-positivity predicates.
"""

from dataclasses import dataclass
from typing import Any, List, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from core.order import Vector, VectorLike, as_array
from infrastructure.config_manager import get_config
from infrastructure.error_handling import BudgetExhaustedError, DimensionMismatchError
from infrastructure.logger import get_logger

logger = get_logger(__name__)


# ==============================
# MATRIX TYPES
# ==============================

@dataclass(frozen=True, eq=False, repr=False)
class NonnegMatrix:
    """Immutable square matrix with finite, nonnegative entries"""
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError(f"Expected a nonempty square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Matrix entries must be finite")
        if np.any(arr < 0):
            raise ValueError("Matrix entries must be nonnegative")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, NonnegMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash(tuple(self.entries.ravel().tolist()))

    def __repr__(self) -> str:
        return f"NonnegMatrix({self.entries.tolist()})"

    def to_list(self) -> List[List[float]]:
        return self.entries.tolist()

    def scale_columns(self, d: VectorLike) -> "NonnegMatrix":
        """M diag(d)"""
        x = as_array(d)
        if x.size != self.n:
            raise DimensionMismatchError(self.n, x.size, "column scaling")
        return NonnegMatrix(self.entries * x[np.newaxis, :])

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        return self.entries[np.ix_(list(rows), list(cols))]


MatrixLike = Union[NonnegMatrix, Sequence[Sequence[float]], np.ndarray]


def as_matrix(m: MatrixLike) -> NonnegMatrix:
    return m if isinstance(m, NonnegMatrix) else NonnegMatrix(m)


@dataclass(frozen=True)
class PermutationMatrix:
    """
    Permutation P stored as an index map: position p of P^T v holds v[perm[p]],
    i.e. P[perm[p], p] = 1.
    """
    perm: Tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(i) for i in self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"Not a bijection on 0..{len(perm) - 1}: {perm}")
        object.__setattr__(self, "perm", perm)

    @property
    def n(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, n: int) -> "PermutationMatrix":
        return cls(tuple(range(n)))

    def is_identity(self) -> bool:
        return self.perm == tuple(range(self.n))

    def as_matrix(self) -> np.ndarray:
        P = np.zeros((self.n, self.n))
        P[list(self.perm), list(range(self.n))] = 1.0
        return P

    def inverse_indices(self) -> np.ndarray:
        """Index map that undoes the permutation: v = (P^T v)[inv]"""
        return np.argsort(np.asarray(self.perm))


@dataclass(frozen=True)
class NormalFormDecomposition:
    """P^T M P in block upper triangular form with irreducible diagonal blocks"""
    permutation: PermutationMatrix
    block_sizes: Tuple[int, ...]
    blocks: NonnegMatrix

    @property
    def s(self) -> int:
        return len(self.block_sizes)

    def boundaries(self) -> List[Tuple[int, int]]:
        """Half-open index ranges of the diagonal blocks in the permuted matrix"""
        bounds = []
        start = 0
        for size in self.block_sizes:
            bounds.append((start, start + size))
            start += size
        return bounds

    def diagonal_block(self, i: int) -> np.ndarray:
        lo, hi = self.boundaries()[i]
        return self.blocks.entries[lo:hi, lo:hi]

    def off_diagonal_block(self, i: int, j: int) -> np.ndarray:
        (ri, rj), (ci, cj) = self.boundaries()[i], self.boundaries()[j]
        return self.blocks.entries[ri:rj, ci:cj]


# ==============================
# STRUCTURE
# ==============================

def _pattern_graph(M: NonnegMatrix) -> nx.DiGraph:
    """Digraph with an edge i -> j whenever M_ij != 0"""
    graph = nx.DiGraph()
    graph.add_nodes_from(range(M.n))
    rows, cols = np.nonzero(M.entries)
    graph.add_edges_from(zip(rows.tolist(), cols.tolist()))
    return graph


def is_irreducible(M: MatrixLike) -> bool:
    """Strong connectivity of the nonzero pattern; every 1x1 matrix is irreducible"""
    matrix = as_matrix(M)
    if matrix.n == 1:
        return True
    return nx.is_strongly_connected(_pattern_graph(matrix))


def row_all_positive(M: MatrixLike) -> bool:
    """Every row has at least one positive entry"""
    return bool(np.all(np.any(as_matrix(M).entries > 0, axis=1)))


def _ordered_components(M: NonnegMatrix) -> List[List[int]]:
    """
    Strongly connected components in an order where every edge between two
    components goes from an earlier one to a later one. Ties between
    unrelated components go to the smallest original index.
    """
    graph = _pattern_graph(M)
    condensed = nx.condensation(graph)
    members = {c: sorted(condensed.nodes[c]["members"]) for c in condensed.nodes}
    order = nx.lexicographical_topological_sort(condensed, key=lambda c: members[c][0])
    return [members[c] for c in order]


def normal_form(M: MatrixLike) -> NormalFormDecomposition:
    matrix = as_matrix(M)
    components = _ordered_components(matrix)

    perm = PermutationMatrix(tuple(i for comp in components for i in comp))
    return NormalFormDecomposition(
        permutation=perm,
        block_sizes=tuple(len(comp) for comp in components),
        blocks=apply_permutation(perm, matrix),
    )


# ==============================
# PERMUTATIONS
# ==============================

def apply_permutation(P: PermutationMatrix, M: MatrixLike) -> NonnegMatrix:
    """P^T M P"""
    matrix = as_matrix(M)
    if matrix.n != P.n:
        raise DimensionMismatchError(P.n, matrix.n, "permutation of matrix")
    idx = list(P.perm)
    return NonnegMatrix(matrix.entries[np.ix_(idx, idx)])


def apply_permutation_vec(P: PermutationMatrix, v: VectorLike) -> Vector:
    """P^T v"""
    x = as_array(v)
    if x.size != P.n:
        raise DimensionMismatchError(P.n, x.size, "permutation of vector")
    return type(v)(x[list(P.perm)]) if isinstance(v, Vector) else Vector(x[list(P.perm)])


def unpermute_vec(P: PermutationMatrix, w: VectorLike) -> np.ndarray:
    """The v with P^T v = w"""
    x = as_array(w)
    if x.size != P.n:
        raise DimensionMismatchError(P.n, x.size, "inverse permutation of vector")
    return x[P.inverse_indices()]


# ==============================
# SPECTRAL RADIUS
# ==============================

def _perron_root(B: np.ndarray, tol: float, budget: int) -> float:
    """
    Perron root of an irreducible nonnegative block. The block is normalised by
    its largest row sum s (so rho(B/s) <= 1) and shifted by the identity, which
    makes it primitive; power iteration from the all-ones vector then stops when
    the Collatz-Wielandt bracket is narrower than tol / s.
    """
    s = float(B.sum(axis=1).max())
    if s == 0.0:
        return 0.0

    A = B / s + np.eye(B.shape[0])
    scaled_tol = tol / s
    v = np.ones(B.shape[0])
    lo, hi = 0.0, np.inf

    for _ in range(budget):
        w = A @ v
        ratios = w / v
        lo, hi = float(ratios.min()), float(ratios.max())
        if hi - lo <= scaled_tol:
            return s * (0.5 * (lo + hi) - 1.0)
        v = w / w.max()

    raise BudgetExhaustedError(
        f"Power iteration did not bracket the Perron root within {budget} steps",
        bracket=(s * (lo - 1.0), s * (hi - 1.0)),
    )


def spectral_radius(M: MatrixLike, tol: float = None, budget: int = None) -> float:
    """rho(M) as the largest Perron root over the diagonal blocks of the normal form"""
    config = get_config().spectral
    tol = config.tol if tol is None else tol
    budget = config.budget if budget is None else budget
    if tol <= 0:
        raise ValueError("tol must be positive")

    matrix = as_matrix(M)
    rho = 0.0
    for comp in _ordered_components(matrix):
        B = matrix.block(comp, comp)
        if len(comp) == 1:
            value = abs(float(B[0, 0]))
        else:
            value = _perron_root(B, tol, budget)
        rho = max(rho, value)
    return rho
