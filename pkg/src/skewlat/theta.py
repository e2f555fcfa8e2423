"""Psi function ``psi_L(x) = sum_{t in L} exp(-x ||t||^2)`` and theta closed forms.

Direct evaluation sums every lattice point in a ball of radius R and
certifies the omitted tail. With d the Gram-Schmidt box radius, the
translated boxes around the lattice points tile space, so the number of
points within distance r satisfies ``N(r) <= V_n (r + d)^n / vol``. Writing
the tail as a Stieltjes integral against N gives

    tail <= int_R^inf 2 x r e^{-x r^2} N(r) dr
         <= (V_n / vol) sum_j C(n, j) d^(n-j) x^(-j/2) Gamma((j+2)/2, x R^2)

with Gamma the upper incomplete gamma function. The same count bound holds
for balls around any center, so translated sums use the same certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammaincc, gammaln

from .enumeration import gram_schmidt_radius, qr_positive, walk
from .errors import DomainError, RadiusOverflow
from .lattice import DEFAULT_TOL, Lattice, dual, volume

DEFAULT_TERM_CAP = 4 * 10**8


class Method(str, Enum):
    DIRECT = "direct"
    POISSON_DUAL = "poisson_dual"
    ORTHOGONAL_PRODUCT = "orthogonal_product"
    E8_CLOSED_FORM = "e8_closed_form"


@dataclass(frozen=True)
class PsiValue:
    value: float
    truncation_bound: float
    radius_used: float
    points_summed: int
    method: Method


def ball_volume(n: int) -> float:
    return math.exp(0.5 * n * math.log(math.pi) - gammaln(0.5 * n + 1))


def tail_bound(n: int, vol: float, d: float, x: float, radius: float) -> float:
    """Certified upper bound on ``sum exp(-x ||t - c||^2)`` over points farther than ``radius``."""
    y = x * radius * radius
    total = 0.0
    for j in range(n + 1):
        if d == 0 and j < n:
            continue
        s = 0.5 * (j + 2)
        # Gamma(s, y) = Gamma(s) * Q(s, y); logs keep large radii finite
        q = gammaincc(s, y)
        if q == 0.0:
            continue
        log_term = math.lgamma(n + 1) - math.lgamma(j + 1) - math.lgamma(n - j + 1)
        if j < n:
            log_term += (n - j) * math.log(d)
        log_term += -0.5 * j * math.log(x) + gammaln(s) + math.log(q)
        total += math.exp(log_term)
    return ball_volume(n) / vol * total


def _radius_for(n: int, vol: float, d: float, x: float, tol: float) -> float:
    """Smallest radius (to 1e-3 relative) whose tail bound is at most ``tol``."""
    hi = max(2.0, 3.0 / math.sqrt(x))
    while tail_bound(n, vol, d, x, hi) > tol:
        hi *= 2.0
        if hi > 1e8:
            raise RadiusOverflow(f"no finite radius reaches tol={tol:g} at x={x:g}")
    lo = 0.0
    while hi - lo > 1e-3 * hi:
        mid = 0.5 * (lo + hi)
        if tail_bound(n, vol, d, x, mid) <= tol:
            hi = mid
        else:
            lo = mid
    return hi


def _check_args(x: float, tol: float):
    if not x > 0:
        raise DomainError(f"x must be positive, got {x}")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")


def _gaussian_sum(lat: Lattice, shift, x: float, tol: float, max_terms: int) -> PsiValue:
    n = lat.dim
    q, r = qr_positive(lat.generator)
    vol = volume(lat)
    d = gram_schmidt_radius(r)
    radius = _radius_for(n, vol, d, x, tol)
    expected = ball_volume(n) * radius**n / vol
    if expected > max_terms:
        raise RadiusOverflow(
            f"radius {radius:.3g} needs about {expected:.3g} terms (cap {max_terms:g}); "
            "use psi_auto or a larger x"
        )
    z = np.zeros(n) if shift is None else -(q.T @ np.asarray(shift, dtype=float))
    acc = np.longdouble(0.0)
    count = 0

    def leaf(norms, _):
        nonlocal acc, count
        acc += np.exp(-x * norms).sum(dtype=np.longdouble)
        count += len(norms)

    walk(r, z, radius * radius, leaf)
    bound = tail_bound(n, vol, d, x, radius)
    return PsiValue(float(acc), bound, radius, count, Method.DIRECT)


def psi_direct(lat: Lattice, x: float, tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_TERM_CAP) -> PsiValue:
    """Sum over all lattice points in a ball; ``truncation_bound <= tol``."""
    _check_args(x, tol)
    return _gaussian_sum(lat, None, x, tol, max_terms)


def psi_translated(lat: Lattice, u, x: float, tol: float = DEFAULT_TOL,
                   max_terms: int = DEFAULT_TERM_CAP) -> PsiValue:
    """``sum_{t in lat} exp(-x ||t + u||^2)``, enumerating around ``-u``."""
    _check_args(x, tol)
    u = np.asarray(u, dtype=float).reshape(-1)
    lat.coordinates(u)  # dimension check
    return _gaussian_sum(lat, u, x, tol, max_terms)


def psi_poisson(lat: Lattice, x: float, tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_TERM_CAP) -> PsiValue:
    """Evaluate through the dual lattice.

    With the transform ``f^(y) = int e^{-2 pi i y.t} f(t) dt`` the Gaussian
    ``exp(-x ||t||^2)`` maps to ``(pi/x)^{n/2} exp(-pi^2 ||y||^2 / x)``, so
    ``psi_L(x) = vol(L)^{-1} (pi/x)^{n/2} psi_{L*}(pi^2/x)``.
    """
    _check_args(x, tol)
    n = lat.dim
    ratio = math.pi / x
    prefactor = ratio ** (n / 2) / volume(lat)
    inner = _gaussian_sum(dual(lat), None, math.pi * ratio, tol / prefactor, max_terms)
    return PsiValue(
        prefactor * inner.value,
        prefactor * inner.truncation_bound,
        inner.radius_used,
        inner.points_summed,
        Method.POISSON_DUAL,
    )


def switch_point(lat: Lattice) -> float:
    """Argument at which the primal and dual sums have the same effective scale."""
    return math.pi * volume(lat) ** (-2.0 / lat.dim)


def psi_auto(lat: Lattice, x: float, tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_TERM_CAP) -> PsiValue:
    if x >= switch_point(lat):
        return psi_direct(lat, x, tol, max_terms)
    return psi_poisson(lat, x, tol, max_terms)


# -- Jacobi theta functions on the imaginary axis ---------------------------


def theta_series(kind: int, q: float, tol: float = 1e-16) -> tuple[float, float]:
    """Value and remainder bound of a Jacobi theta function at real nome ``q``.

    Summation stops once the next term drops below ``tol * 1e-2`` times the
    partial sum. Term exponents grow at least linearly past that point, so
    the remainder is dominated by a geometric series (for theta_4, by the
    first omitted term of an alternating series).
    """
    if kind not in (2, 3, 4):
        raise DomainError(f"theta kind must be 2, 3 or 4, got {kind}")
    if not 0.0 <= q < 1.0:
        raise DomainError(f"nome must lie in [0, 1), got {q}")
    if q == 0.0:
        return (0.0 if kind == 2 else 1.0), 0.0
    stop = tol * 1e-2
    if kind == 2:
        total, m = 0.0, 0
        while True:
            t = 2.0 * q ** ((m + 0.5) ** 2)
            if total > 0 and t < stop * total:
                return total, t / (1.0 - q ** (2 * m + 2))
            total += t
            m += 1
    total, m, sign = 1.0, 1, 1.0
    while True:
        t = 2.0 * q ** (m * m)
        if t < stop * abs(total):
            if kind == 4:
                return total, t
            return total, t / (1.0 - q ** (2 * m + 1))
        if kind == 4:
            sign = -sign
        total += sign * t
        m += 1


def jacobi_theta(kind: int, q: float, tol: float = 1e-16) -> float:
    """theta_2, theta_3 or theta_4 at the real nome ``q`` in ``[0, 1)``."""
    return theta_series(kind, q, tol)[0]


def _power_bound(values, bounds, power: int) -> float:
    return sum((v + b) ** power - v**power for v, b in zip(values, bounds))


def orthogonal_psi(diagonal, x: float, tol: float = DEFAULT_TOL) -> PsiValue:
    """psi of the lattice generated by ``diag(a_1, ..., a_n)``: a product of theta_3 values."""
    _check_args(x, tol)
    diagonal = [float(a) for a in diagonal]
    if any(not a > 0 for a in diagonal):
        raise DomainError("diagonal entries must be positive")
    vals, bounds = zip(*(theta_series(3, math.exp(-a * a * x), 1e-20) for a in diagonal))
    value = math.prod(vals)
    bound = math.prod(v + b for v, b in zip(vals, bounds)) - value
    return PsiValue(value, max(bound, 0.0), 0.0, 0, Method.ORTHOGONAL_PRODUCT)


def e8_theta_psi(x: float, tol: float = DEFAULT_TOL) -> PsiValue:
    """psi of E8 from ``(theta_2^8 + theta_3^8 + theta_4^8) / 2`` at ``q = e^{-x}``."""
    _check_args(x, tol)
    q = math.exp(-x)
    vals, bounds = zip(*(theta_series(k, q, 1e-20) for k in (2, 3, 4)))
    value = 0.5 * sum(v**8 for v in vals)
    bound = 0.5 * _power_bound(vals, bounds, 8)
    return PsiValue(value, bound, 0.0, 0, Method.E8_CLOSED_FORM)
