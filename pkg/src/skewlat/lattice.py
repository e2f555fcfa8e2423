"""Generator-matrix lattice algebra.

Vectors are columns and a lattice is the set ``M @ w`` for integer ``w``,
so the basis vectors are the *columns* of the generator ``M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    NonSquare,
    NotASkewing,
    NotOrthogonal,
    SingularGenerator,
    SingularRelation,
)

DEFAULT_TOL = 1e-9

# Columns: 2e1, e2-e1, ..., e7-e6, (1/2,...,1/2). Upper triangular with
# diagonal (2, 1, 1, 1, 1, 1, 1, 1/2).
E8_GENERATOR = np.array(
    [
        [2, -1, 0, 0, 0, 0, 0, 0.5],
        [0, 1, -1, 0, 0, 0, 0, 0.5],
        [0, 0, 1, -1, 0, 0, 0, 0.5],
        [0, 0, 0, 1, -1, 0, 0, 0.5],
        [0, 0, 0, 0, 1, -1, 0, 0.5],
        [0, 0, 0, 0, 0, 1, -1, 0.5],
        [0, 0, 0, 0, 0, 0, 1, 0.5],
        [0, 0, 0, 0, 0, 0, 0, 0.5],
    ],
    dtype=float,
)
E8_DIAGONAL = (2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5)


@dataclass(frozen=True, eq=False)
class Lattice:
    """Full-rank lattice in R^n given by an invertible n x n generator."""

    generator: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        m = np.array(self.generator, dtype=float)
        if m.ndim == 1 and m.size == 1:
            m = m.reshape(1, 1)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise NonSquare(f"generator must be a non-empty square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise SingularGenerator("generator has non-finite entries")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        det = np.linalg.det(m)
        if abs(det) <= self.tol:
            raise SingularGenerator(f"|det| = {abs(det):.3g} <= tol = {self.tol:.3g}")
        m.setflags(write=False)
        object.__setattr__(self, "generator", m)

    @property
    def dim(self) -> int:
        return self.generator.shape[0]

    def __repr__(self):
        return f"Lattice(dim={self.dim}, generator={self.generator.tolist()!r})"

    def coordinates(self, v) -> np.ndarray:
        """Real coordinates of ``v`` in the basis (``M^{-1} v``)."""
        v = _as_vector(v, self.dim)
        return np.linalg.solve(self.generator, v)

    def point(self, w) -> np.ndarray:
        return self.generator @ np.asarray(w, dtype=float)

    def scaled(self, c: float) -> "Lattice":
        return Lattice(c * self.generator, self.tol)


def make_lattice(generator, tol: float = DEFAULT_TOL) -> Lattice:
    return Lattice(np.asarray(generator, dtype=float), tol)


def integer_lattice(n: int, scale: float = 1.0) -> Lattice:
    """``scale * Z^n``."""
    return Lattice(scale * np.eye(n))


def diagonal_lattice(diagonal: Sequence[float], tol: float = DEFAULT_TOL) -> Lattice:
    return Lattice(np.diag(np.asarray(diagonal, dtype=float)), tol)


def e8_lattice(tol: float = DEFAULT_TOL) -> Lattice:
    return Lattice(E8_GENERATOR.copy(), tol)


def _as_vector(v, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape[0] != n:
        raise DimensionMismatch(f"expected a vector of length {n}, got {v.shape[0]}")
    return v


def _check_same_dim(a: Lattice, b: Lattice):
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions differ: {a.dim} vs {b.dim}")


def volume(lat: Lattice) -> float:
    return float(abs(np.linalg.det(lat.generator)))


def dual(lat: Lattice) -> Lattice:
    return Lattice(np.linalg.inv(lat.generator).T, lat.tol)


def _is_integral(a: np.ndarray, tol: float) -> bool:
    return bool(np.all(np.abs(a - np.round(a)) <= tol))


def same_lattice(a: Lattice, b: Lattice, tol: float | None = None) -> bool:
    """True when the two generators differ by a unimodular change of basis."""
    _check_same_dim(a, b)
    tol = a.tol if tol is None else tol
    u = np.linalg.solve(a.generator, b.generator)
    if not _is_integral(u, tol):
        return False
    return abs(abs(np.linalg.det(np.round(u))) - 1.0) <= tol


def contains(lat: Lattice, v, tol: float | None = None) -> bool:
    tol = lat.tol if tol is None else tol
    return _is_integral(lat.coordinates(v), tol)


def normalize_volume(lat: Lattice) -> Lattice:
    return lat.scaled(volume(lat) ** (-1.0 / lat.dim))


# -- triangular (Hermite-like) bases -------------------------------------


def _nearest(a, b):
    if isinstance(a, float) or isinstance(b, float):
        return round(a / b)
    return round(Fraction(a, b))


def _column_euclid(cols: list[list], is_zero, coeff_cap=None) -> list[list] | None:
    """Bring a square basis to upper-triangular form by integer column operations.

    ``cols[j]`` is column j. Rows are processed bottom-up: on row i, a
    Euclidean algorithm over the still-active columns 0..i leaves a single
    nonzero entry, which is moved to column i. The columns then never touch
    row i again, so the final matrix is upper triangular. Returns ``None``
    if the Euclidean loop does not terminate (row entries not commensurable)
    or if the accumulated unimodular transform exceeds ``coeff_cap``.
    """
    n = len(cols)
    cols = [list(c) for c in cols]
    # unimodular transform, tracked only to detect runaway coefficients
    trans = [[int(i == j) for i in range(n)] for j in range(n)]
    for i in range(n - 1, -1, -1):
        for _ in range(400):
            nz = [j for j in range(i + 1) if not is_zero(cols[j][i])]
            if len(nz) <= 1:
                break
            p = min(nz, key=lambda j: abs(cols[j][i]))
            piv, tp = cols[p], trans[p]
            for j in nz:
                if j == p:
                    continue
                q = _nearest(cols[j][i], piv[i])
                if q:
                    cols[j] = [c - q * pc for c, pc in zip(cols[j], piv)]
                    trans[j] = [c - q * pc for c, pc in zip(trans[j], tp)]
                if is_zero(cols[j][i]):
                    cols[j][i] = 0 * cols[j][i]
            if coeff_cap is not None and max(abs(c) for t in trans for c in t) > coeff_cap:
                return None
        else:
            return None
        if not nz:
            return None
        j = nz[0]
        cols[i], cols[j] = cols[j], cols[i]
        trans[i], trans[j] = trans[j], trans[i]
    return cols


def _canonicalize(cols: list[list], floor_div):
    """Positive diagonal and off-diagonal entries reduced into ``[0, a_ii)``.

    Row i is reduced using column i, which only has entries in rows <= i;
    going bottom-up therefore never disturbs rows already reduced.
    """
    n = len(cols)
    for i in range(n):
        if cols[i][i] < 0:
            cols[i] = [-c for c in cols[i]]
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            q = floor_div(cols[j][i], cols[i][i])
            if q:
                cols[j] = [c - q * pc for c, pc in zip(cols[j], cols[i])]
    return cols


def triangular_basis(lat: Lattice, tol: float | None = None) -> np.ndarray | None:
    """Canonical upper-triangular generator of ``lat``, or ``None`` if none exists.

    The form is a real analogue of the column Hermite normal form: it is
    reached from the given basis by unimodular column operations only (no
    rotation), has a positive diagonal, and every entry right of the
    diagonal lies in ``[0, a_ii)``. A lattice has an upper-triangular
    generator iff each slice ``lat ∩ (R^k x 0)`` has rank k, and then the
    diagonal is determined up to sign by the slice volumes, so the diagonal
    of this form is an invariant of the point set.
    """
    tol = lat.tol if tol is None else tol
    m = lat.generator
    eps = tol * max(1.0, float(np.abs(m).max()))
    cols = [[float(v) for v in m[:, j]] for j in range(lat.dim)]
    cols = _column_euclid(cols, lambda v: abs(v) <= eps, coeff_cap=1.0 / math.sqrt(tol))
    if cols is None:
        return None
    cols = _canonicalize(cols, lambda a, b: math.floor(a / b + tol))
    out = np.array(cols, dtype=float).T
    out[np.abs(out) <= eps] = 0.0
    return np.triu(out)


def hermite_form(z) -> np.ndarray:
    """Column Hermite normal form of a nonsingular integer matrix (exact).

    Upper triangular, positive diagonal, ``0 <= H[i, j] < H[i, i]`` for
    ``j > i``, and ``H = Z @ U`` for some unimodular U.
    """
    z = _as_int_matrix(z)
    n = z.shape[0]
    cols = [[int(v) for v in z[:, j]] for j in range(n)]
    cols = _column_euclid(cols, lambda v: v == 0)
    if cols is None:
        raise SingularRelation("relation matrix is singular")
    cols = _canonicalize(cols, lambda a, b: a // b)
    return np.array(cols, dtype=np.int64).T


def _as_int_matrix(z) -> np.ndarray:
    a = np.asarray(z)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSquare(f"relation must be square, got shape {a.shape}")
    if a.dtype.kind == "f":
        if not np.all(a == np.round(a)):
            raise ValueError("relation matrix must have integer entries")
        a = np.round(a)
    return a.astype(np.int64)


# -- skewings --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SkewingSpec:
    """Upper-triangular generator given by its diagonal and strict upper part.

    ``upper`` lists the strict upper-triangle entries in row-major order:
    (0,1), (0,2), ..., (0,n-1), (1,2), ...
    """

    diagonal: tuple[float, ...]
    upper: tuple[float, ...] = field(default=())

    def __post_init__(self):
        diag = tuple(float(a) for a in self.diagonal)
        n = len(diag)
        if n == 0:
            raise ValueError("diagonal must be non-empty")
        if any(not a > 0 for a in diag):
            raise ValueError("skewing diagonal entries must be strictly positive")
        upper = tuple(float(u) for u in self.upper) or (0.0,) * (n * (n - 1) // 2)
        if len(upper) != n * (n - 1) // 2:
            raise ValueError(f"expected {n * (n - 1) // 2} upper entries, got {len(upper)}")
        object.__setattr__(self, "diagonal", diag)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return len(self.diagonal)

    def matrix(self) -> np.ndarray:
        n = self.dim
        m = np.diag(self.diagonal)
        m[np.triu_indices(n, 1)] = self.upper
        return m

    @classmethod
    def from_matrix(cls, m) -> "SkewingSpec":
        m = np.asarray(m, dtype=float)
        n = m.shape[0]
        if np.any(np.tril(m, -1) != 0):
            raise ValueError("matrix is not upper triangular")
        return cls(tuple(np.diag(m)), tuple(m[np.triu_indices(n, 1)]))


def skewing_to_lattice(spec: SkewingSpec, tol: float = DEFAULT_TOL) -> Lattice:
    return Lattice(spec.matrix(), tol)


def orthogonal_diagonal(lat: Lattice, tol: float | None = None) -> np.ndarray:
    """Diagonal of a diagonal generator; raises NotOrthogonal otherwise."""
    tol = lat.tol if tol is None else tol
    m = lat.generator
    off = m - np.diag(np.diag(m))
    if np.any(np.abs(off) > tol):
        raise NotOrthogonal("generator is not diagonal")
    d = np.diag(m).copy()
    if np.any(d <= tol):
        raise NotOrthogonal("diagonal generator must have positive entries")
    return d


def is_skewing(cand: Lattice, orth: Lattice, tol: float | None = None) -> bool:
    """Whether ``cand`` is a skewing of the orthogonal lattice ``orth``.

    The diagonal must match in order; a permuted diagonal does not count.
    """
    _check_same_dim(cand, orth)
    tol = orth.tol if tol is None else tol
    diag = orthogonal_diagonal(orth, tol)
    tri = triangular_basis(cand, tol)
    if tri is None:
        return False
    if np.any(np.abs(np.diag(tri) - diag) > tol * np.maximum(1.0, diag)):
        return False
    return not same_lattice(cand, orth, tol)


# -- nested pairs ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NestedPair:
    """Dense lattice and a sublattice with generator ``dense.generator @ relation``."""

    dense: Lattice
    relation: np.ndarray
    sparse: Lattice
    hermite: np.ndarray

    @property
    def dim(self) -> int:
        return self.dense.dim

    @property
    def index(self) -> int:
        return int(np.prod([int(h) for h in np.diag(self.hermite)]))

    def coset_label(self, w) -> int:
        """Label of the coset of the dense-lattice point with integer coordinates ``w``.

        ``w`` is reduced modulo the Hermite form H of the relation, bottom row
        first, to the canonical residue ``0 <= r_i < H[i, i]``; the label is
        that residue read as a mixed-radix number (r_0 least significant).
        """
        h = self.hermite
        r = [int(v) for v in np.asarray(w).reshape(-1)]
        n = len(r)
        for i in range(n - 1, -1, -1):
            q = r[i] // int(h[i, i])
            if q:
                for k in range(i + 1):
                    r[k] -= q * int(h[k, i])
        label, radix = 0, 1
        for i in range(n):
            label += r[i] * radix
            radix *= int(h[i, i])
        return label

    def residue(self, label: int) -> np.ndarray:
        """Canonical dense-lattice coordinates of the coset with ``label``."""
        if not 0 <= label < self.index:
            raise ValueError(f"label {label} outside [0, {self.index})")
        digits = []
        for h in np.diag(self.hermite):
            label, r = divmod(label, int(h))
            digits.append(r)
        return np.array(digits, dtype=np.int64)

    def representative(self, label: int) -> np.ndarray:
        return self.dense.point(self.residue(label))


def nest(dense: Lattice, relation) -> NestedPair:
    z = _as_int_matrix(relation)
    if z.shape[0] != dense.dim:
        raise DimensionMismatch(f"relation is {z.shape[0]}x{z.shape[0]}, lattice dim is {dense.dim}")
    h = hermite_form(z)
    sparse = Lattice(dense.generator @ z, dense.tol)
    z.setflags(write=False)
    h.setflags(write=False)
    return NestedPair(dense, z, sparse, h)


def skewed_sublattice(dense_orth: Lattice, k: int, upper: Sequence[int]) -> NestedPair:
    """Sublattice ``M Z`` with Z upper triangular, diagonal ``2**k``, given upper entries.

    The result is a skewing of ``2**k * dense_orth`` or equal to it.
    """
    orthogonal_diagonal(dense_orth)
    if k < 1:
        raise ValueError("k must be at least 1")
    n = dense_orth.dim
    upper = [int(u) for u in upper] or [0] * (n * (n - 1) // 2)
    if len(upper) != n * (n - 1) // 2:
        raise ValueError(f"expected {n * (n - 1) // 2} upper entries, got {len(upper)}")
    z = (2**k) * np.eye(n, dtype=np.int64)
    z[np.triu_indices(n, 1)] = upper
    pair = nest(dense_orth, z)
    scaled = dense_orth.scaled(2.0**k)
    if not (is_skewing(pair.sparse, scaled) or same_lattice(pair.sparse, scaled)):
        raise AssertionError("skewed sublattice is neither a skewing nor the scaled lattice")
    return pair
