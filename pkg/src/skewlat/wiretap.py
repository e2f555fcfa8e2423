"""Coset-code bookkeeping and the psi-based probability bounds.

Eavesdropper's correct-decision bound::

    P_c,e <= vol(L_b) / (sqrt(2 pi) sigma_e)^n * psi_{L_e}(1 / (2 sigma_e^2))

Receiver's error bound (union bound)::

    P_e,b <= (psi_{L_b}(1 / (8 sigma_b^2)) - 1) / 2

Bounds above one are returned as they are, flagged ``capped``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import NotASkewing
from .lattice import (
    DEFAULT_TOL,
    Lattice,
    NestedPair,
    SkewingSpec,
    is_skewing,
    orthogonal_diagonal,
    skewing_to_lattice,
    volume,
)
from .theta import PsiValue, orthogonal_psi, psi_auto


@dataclass(frozen=True, eq=False)
class CosetCode:
    pair: NestedPair

    @property
    def index(self) -> int:
        return self.pair.index

    @property
    def dim(self) -> int:
        return self.pair.dim

    @property
    def rate_bpcu(self) -> float:
        return rate(self)


def rate(code: CosetCode) -> float:
    """Bits per channel use: ``log2(index) / n``."""
    return math.log2(code.index) / code.dim


class Bound(NamedTuple):
    value: float
    capped: bool


@dataclass(frozen=True)
class BoundReport:
    """Values of a bound (or of psi) over a grid of sigma or x."""

    x_grid: tuple[float, ...]
    values: tuple[float, ...]
    capped: tuple[bool, ...]

    def __post_init__(self):
        if not len(self.x_grid) == len(self.values) == len(self.capped):
            raise ValueError("grid, values and capped flags must have equal length")


def ecdp_bound(code: CosetCode, sigma_e: float, tol: float = DEFAULT_TOL) -> Bound:
    if not sigma_e > 0:
        raise ValueError("sigma_e must be positive")
    pair = code.pair
    n = pair.dim
    psi = psi_auto(pair.sparse, 1.0 / (2.0 * sigma_e**2), tol)
    value = volume(pair.dense) / (math.sqrt(2.0 * math.pi) * sigma_e) ** n * psi.value
    return Bound(value, value > 1.0)


def rep_bound(lat: Lattice, sigma_b: float, tol: float = DEFAULT_TOL) -> float:
    if not sigma_b > 0:
        raise ValueError("sigma_b must be positive")
    psi = psi_auto(lat, 1.0 / (8.0 * sigma_b**2), tol)
    return 0.5 * max(psi.value - 1.0, 0.0)


def ecdp_sweep(code: CosetCode, sigmas: Sequence[float], tol: float = DEFAULT_TOL) -> BoundReport:
    bounds = [ecdp_bound(code, s, tol) for s in sigmas]
    return BoundReport(tuple(sigmas), tuple(b.value for b in bounds), tuple(b.capped for b in bounds))


def rep_sweep(lat: Lattice, sigmas: Sequence[float], tol: float = DEFAULT_TOL) -> BoundReport:
    values = [rep_bound(lat, s, tol) for s in sigmas]
    return BoundReport(tuple(sigmas), tuple(values), tuple(v > 1.0 for v in values))


@dataclass(frozen=True)
class SkewComparison:
    """psi of an orthogonal lattice and of one of its skewings on a shared grid.

    ``margins[i]`` is ``psi_orth - psi_skew`` minus both truncation bounds,
    so a positive margin certifies the strict ordering at that point.
    """

    orth: BoundReport
    skew: BoundReport
    orth_bounds: tuple[float, ...]
    skew_bounds: tuple[float, ...]
    margins: tuple[float, ...]

    @property
    def strict(self) -> tuple[bool, ...]:
        return tuple(m > 0 for m in self.margins)

    @property
    def all_strict(self) -> bool:
        return all(self.strict)


def _report(grid, psis: list[PsiValue]) -> BoundReport:
    return BoundReport(tuple(grid), tuple(p.value for p in psis), tuple(False for _ in psis))


def compare_skewing(
    orth: Lattice,
    spec: SkewingSpec,
    x_grid: Sequence[float],
    tol: float = DEFAULT_TOL,
    skew_psi=None,
) -> SkewComparison:
    """Evaluate both psi curves and certify ``psi_skew < psi_orth`` pointwise.

    ``skew_psi`` overrides how the skewed lattice is evaluated (a callable
    ``(lattice, x, tol) -> PsiValue``); the default is ``psi_auto``.
    """
    diag = orthogonal_diagonal(orth)
    if len(spec.diagonal) != len(diag) or np.any(
        np.abs(np.asarray(spec.diagonal) - diag) > orth.tol * np.maximum(1.0, diag)
    ):
        raise NotASkewing("skewing diagonal differs from the orthogonal generator's diagonal")
    skew = skewing_to_lattice(spec, orth.tol)
    if not is_skewing(skew, orth):
        raise NotASkewing("the given upper entries generate the orthogonal lattice itself")
    skew_psi = psi_auto if skew_psi is None else skew_psi
    o = [orthogonal_psi(diag, x, tol) for x in x_grid]
    s = [skew_psi(skew, x, tol) for x in x_grid]
    margins = tuple(a.value - b.value - a.truncation_bound - b.truncation_bound for a, b in zip(o, s))
    return SkewComparison(
        _report(x_grid, o),
        _report(x_grid, s),
        tuple(a.truncation_bound for a in o),
        tuple(b.truncation_bound for b in s),
        margins,
    )
