"""Finite permutation and matrix groups: orders, normal closures, and series."""

from .groups import (
    CapExceeded,
    MatrixGroup,
    PermGroup,
    alternating_group,
    as_perm_group,
    commutator_subgroup,
    cyclic_group,
    derived_subgroup,
    dihedral_group,
    direct_product,
    enumerate_closure,
    normal_closure,
    order,
    symmetric_group,
)
from .schreier_sims import StabChain
from .series import (
    NormalSeries,
    derived_quotient_consistency,
    derived_series,
    is_nilpotent,
    is_soluble,
    lower_central_series,
    perfect_core,
    perfect_core_by_lattice,
    prosoluble_completion_finite,
    quotient_action,
    soluble_residual,
    wreath_product,
)
