"""Morava K-theory of classifying spaces of finite abelian p-groups.

Cohomology rings, the Honda formal group law, the duality pairing coming
from the diagonal transfer, fundamental classes and intersection products,
all computed exactly over F_p[v, 1/v].
"""

from .abelian import (
    AbelianPGroup,
    CapExceeded,
    ConsistencyError,
    GroupHom,
    Subgroup,
    enumerate_subgroups,
    is_transverse,
    subgroup_basis,
    subgroup_intersection,
    subgroup_join,
)
from .coefficients import GradedScalar, PrimeContext, format_scalar, monomial_invert, scalar_arith
from .duality import (
    DualityError,
    HomologyClass,
    basis_class,
    bh_class,
    cap_product,
    cap_product_via_cup,
    diagonal_transfer_pullback,
    diagonal_transfer_unit,
    fundamental_class,
    homology_transfer,
    integrate,
    lambda_apply,
    lambda_invert,
    pairing_matrix,
    pushforward,
    subgroup_class,
    verify_transverse_formula,
)
from .fgl import FglTable, build_fgl, formal_difference, formal_sum, honda_fgl, m_series, pk_coseries
from .kring import (
    CohomologyClass,
    CohomologyRing,
    RingHom,
    apply_hom,
    external_product,
    multiply,
    pullback_hom,
    ring_of,
)

import types as _types

__all__ = sorted(k for k, v in globals().items() if not k.startswith("_") and not isinstance(v, _types.ModuleType))
