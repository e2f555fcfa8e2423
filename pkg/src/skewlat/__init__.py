"""Lattice coset-coding analysis: psi/theta series, wiretap bounds, skewings."""

from .enumeration import ShellTable, closest_point, coset_decode, enumerate_shells
from .errors import (
    DimensionMismatch,
    DomainError,
    LatticeError,
    NonSquare,
    NotASkewing,
    NotOrthogonal,
    PointCountCap,
    RadiusOverflow,
    SingularGenerator,
    SingularRelation,
)
from .lattice import (
    E8_DIAGONAL,
    E8_GENERATOR,
    Lattice,
    NestedPair,
    SkewingSpec,
    contains,
    diagonal_lattice,
    dual,
    e8_lattice,
    integer_lattice,
    is_skewing,
    make_lattice,
    nest,
    normalize_volume,
    same_lattice,
    skewed_sublattice,
    skewing_to_lattice,
    volume,
)
from .simulator import ChannelConfig, SimResult, simulate_coset_rate, simulate_rep, sweep
from .theta import (
    Method,
    PsiValue,
    e8_theta_psi,
    jacobi_theta,
    orthogonal_psi,
    psi_auto,
    psi_direct,
    psi_poisson,
    psi_translated,
)
from .wiretap import BoundReport, CosetCode, compare_skewing, ecdp_bound, rate, rep_bound

__version__ = "0.1.0"
