"""Finite equivariant gerbes, twisted equivariant vector bundles,
transgression, and geometric characters, with exact root-of-unity cohomology.
"""

from .bundles import (
    EquivBundle,
    Kernel,
    center_dimension,
    direct_sum,
    hom_dimension,
    identity_kernel,
    kernel_compose,
    kernel_from_bundle,
    make_bundle,
    make_kernel,
    pauli_bundle,
    regular_bundle,
    trivial_bundle,
    validate_bundle,
    zero_bundle,
)
from .cocycles import (
    Cochain1,
    Cocycle2,
    coboundary_of,
    is_cohomologous,
    make_cochain,
    make_cocycle,
    pullback,
    tensor_conjugate,
    trivial_cocycle,
    validate_cocycle,
)
from .errors import GerbeError, ResourceError, StructuralError, ValidationError
from .gerbes import (
    Gerbe,
    GerbeArrow,
    conjugate_gerbe,
    equivalence_check,
    from_abelian_extension,
    make_gerbe,
    restrict_gerbe,
    same_gerbe,
    tensor_gerbes,
    trivial_gerbe,
    twist_by,
    validate_gerbe,
    with_metric,
)
from .geochar import (
    LocalizedBasis,
    ch_on_morphism,
    conjugation_gerbe,
    end_count_formula,
    hat_map,
    homG_dimension,
    localized_basis,
    push_forward,
    two_character_action,
)
from .groups import (
    FiniteGroup,
    build_group,
    conjugacy_data,
    cyclic_group,
    dihedral_group,
    generating_set,
    product_group,
    subgroup_closure,
    symmetric_group,
    table_group,
)
from .gsets import (
    GSet,
    LoopGroupoid,
    build_gset,
    conjugation_gset,
    coset_gset,
    fixed_points,
    left_translation_gset,
    loop_groupoid,
    orbits_and_stabilizers,
    product_gset,
    trivial_gset,
)
from .io import Workspace
from .transgression import (
    FlatSection,
    TransgressedBundle,
    character_inner,
    flat_sections,
    section_inner,
    transgress,
    twisted_character,
)

__version__ = "0.1.0"
