"""Sphere enumeration (Fincke-Pohst) and closest-point decoding.

With ``M = QR`` the squared distance ``||M w - c||^2`` equals
``||R w - Q^T c||^2``, and since R is upper triangular the coordinates can
be fixed from the last one down, each one confined to an interval by the
remaining radius budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, PointCountCap
from .lattice import Lattice, NestedPair

DEFAULT_POINT_CAP = 10**7
SHELL_MERGE_TOL = 1e-7

# expanded batch size above which the walk splits a level into pieces
_BATCH = 1 << 17


def qr_positive(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """QR factorization with a nonnegative diagonal in R."""
    q, r = np.linalg.qr(m)
    s = np.sign(np.diag(r))
    s[s == 0] = 1.0
    return q * s, r * s[:, None]


def gram_schmidt_radius(r: np.ndarray) -> float:
    """Half-diagonal of the Gram-Schmidt box; every point of space is this close to the lattice."""
    return 0.5 * math.sqrt(float(np.sum(np.diag(r) ** 2)))


def walk(
    r: np.ndarray,
    z: np.ndarray,
    radius2: float,
    leaf: Callable[[np.ndarray, np.ndarray | None], None],
    with_coords: bool = False,
):
    """Visit every integer w with ``||R w - z||^2 <= radius2`` in batches.

    ``leaf(norms, coords)`` receives squared distances of a batch of leaves
    (and the leaves' integer coordinates when ``with_coords``). Levels are
    expanded breadth-first with numpy; a level whose expansion would exceed
    the batch size is split, which keeps memory bounded while the Python
    overhead stays per-batch rather than per-point.
    """
    n = r.shape[0]
    diag = np.diag(r)
    p0 = np.zeros(1)
    s0 = np.asarray(z, dtype=float).reshape(1, n)
    w0 = np.zeros((1, 0), dtype=np.int64) if with_coords else None
    _descend(r, diag, n - 1, p0, s0, w0, radius2, leaf)


def _descend(r, diag, i, p, s, w, radius2, leaf):
    rii = diag[i]
    center = s[:, i] / rii
    half = np.sqrt(np.maximum(radius2 - p, 0.0)) / rii
    lo = np.ceil(center - half)
    counts = np.maximum(np.floor(center + half) - lo + 1, 0).astype(np.int64)
    cum = np.cumsum(counts)
    if cum[-1] == 0:
        return
    start, done = 0, 0
    while start < len(p):
        # largest run of parents whose children fit in one batch (at least one parent)
        stop = max(int(np.searchsorted(cum, done + _BATCH, side="right")), start + 1)
        sl = slice(start, stop)
        _expand(r, diag, i, p[sl], s[sl], None if w is None else w[sl],
                lo[sl], counts[sl], radius2, leaf)
        done = int(cum[stop - 1])
        start = stop


def _expand(r, diag, i, p, s, w, lo, counts, radius2, leaf):
    total = int(counts.sum())
    if total == 0:
        return
    parent = np.repeat(np.arange(len(p)), counts)
    offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    wi = lo[parent] + offs
    d = diag[i] * wi - s[parent, i]
    pc = p[parent] + d * d
    keep = pc <= radius2
    if not keep.all():
        parent, wi, pc = parent[keep], wi[keep], pc[keep]
    wc = None
    if w is not None:
        wc = np.concatenate([wi.astype(np.int64)[:, None], w[parent]], axis=1)
    if i == 0:
        leaf(pc, wc)
        return
    if len(pc) == 0:
        return
    sc = s[parent, :i] - wi[:, None] * r[:i, i]
    _descend(r, diag, i - 1, pc, sc, wc, radius2, leaf)


@dataclass(frozen=True)
class ShellTable:
    """Lattice points in a ball grouped by squared norm."""

    entries: tuple[tuple[float, int], ...]
    radius: float

    @property
    def total(self) -> int:
        return sum(c for _, c in self.entries)

    def count(self, norm2: float, tol: float = SHELL_MERGE_TOL) -> int:
        for nrm, c in self.entries:
            if abs(nrm - norm2) <= tol:
                return c
        return 0


def enumerate_shells(
    lat: Lattice,
    radius: float,
    max_points: int = DEFAULT_POINT_CAP,
    tol: float | None = None,
) -> ShellTable:
    """All lattice points with ``||t||^2 <= radius^2 + tol``, grouped into shells.

    Squared norms within ``SHELL_MERGE_TOL`` of a shell's smallest norm are
    merged into that shell.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    tol = lat.tol if tol is None else tol
    _, r = qr_positive(lat.generator)
    chunks = []
    seen = 0

    def leaf(norms, _):
        nonlocal seen
        seen += len(norms)
        if seen > max_points:
            raise PointCountCap(f"more than {max_points} points within radius {radius}")
        chunks.append(norms.copy())

    walk(r, np.zeros(lat.dim), radius * radius + tol, leaf)
    norms = np.sort(np.concatenate(chunks)) if chunks else np.zeros(0)
    entries: list[list] = []
    for v in norms:
        if entries and v - entries[-1][0] <= SHELL_MERGE_TOL:
            entries[-1][1] += 1
        else:
            entries.append([float(v), 1])
    if entries and entries[0][0] <= SHELL_MERGE_TOL:
        entries[0][0] = 0.0
    return ShellTable(tuple((nrm, c) for nrm, c in entries), float(radius))


def lattice_points(lat: Lattice, radius: float, center=None, max_points: int = DEFAULT_POINT_CAP) -> np.ndarray:
    """Integer coordinates of all points within ``radius`` of ``center`` (rows)."""
    q, r = qr_positive(lat.generator)
    c = np.zeros(lat.dim) if center is None else np.asarray(center, dtype=float)
    out = []
    seen = 0

    def leaf(_, coords):
        nonlocal seen
        seen += len(coords)
        if seen > max_points:
            raise PointCountCap(f"more than {max_points} points within radius {radius}")
        out.append(coords)

    walk(r, q.T @ c, radius * radius + lat.tol, leaf, with_coords=True)
    if not out:
        return np.zeros((0, lat.dim), dtype=np.int64)
    return np.concatenate(out)


# -- closest point -------------------------------------------------------


class _Decoder:
    """Schnorr-Euchner search for one lattice; reusable across queries."""

    def __init__(self, lat: Lattice):
        self.lat = lat
        self.n = lat.dim
        g = lat.generator
        self.axes = np.diag(g).tolist() if np.all(g == np.diag(np.diag(g))) else None
        self.q, r = qr_positive(g)
        self.r = r.tolist()
        self.diag = np.diag(r).tolist()

    def coords(self, y) -> list[int]:
        y = np.asarray(y, dtype=float).reshape(-1)
        if y.shape[0] != self.n:
            raise DimensionMismatch(f"expected a vector of length {self.n}, got {y.shape[0]}")
        if self.axes is not None:
            return [_round_half_down(yi / a) for yi, a in zip(y.tolist(), self.axes)]
        return self._search((self.q.T @ y).tolist())

    def _search(self, z: list[float]) -> list[int]:
        n, r, diag = self.n, self.r, self.diag
        best = math.inf
        best_w = None
        w = [0] * n

        def visit(i: int, partial: float):
            nonlocal best, best_w
            s = z[i]
            ri = r[i]
            for j in range(i + 1, n):
                s -= ri[j] * w[j]
            c = s / diag[i]
            base = round(c)
            step = 1 if c >= base else -1
            k = 0
            while True:
                # base, base+step, base-step, base+2*step, ...: |w_i - c| never decreases
                wi = base + (k + 1) // 2 * (step if k % 2 else -step)
                d = diag[i] * wi - s
                nd = partial + d * d
                if nd > best and not _close(nd, best):
                    break
                w[i] = wi
                if i > 0:
                    visit(i - 1, nd)
                elif best_w is None or (nd < best and not _close(nd, best)):
                    best, best_w = nd, list(w)
                elif w < best_w:
                    best, best_w = min(best, nd), list(w)
                k += 1

        visit(n - 1, 0.0)
        return best_w


def _round_half_down(c: float) -> int:
    w = math.floor(c)
    return w + 1 if c - w > 0.5 + 1e-12 else w


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))


@lru_cache(maxsize=32)
def decoder(lat: Lattice) -> _Decoder:
    return _Decoder(lat)


def closest_coordinates(lat: Lattice, y) -> np.ndarray:
    """Integer coordinates of the lattice point nearest to ``y``.

    Ties are broken towards the lexicographically smallest coordinate vector.
    """
    return np.array(decoder(lat).coords(y), dtype=np.int64)


def closest_point(lat: Lattice, y) -> np.ndarray:
    return lat.point(closest_coordinates(lat, y))


def coset_decode(pair: NestedPair, y) -> int:
    """Coset label of the dense-lattice point nearest to ``y``."""
    return pair.coset_label(closest_coordinates(pair.dense, y))
