"""Translational tilings of finite abelian groups.

Exact computation with tiling pairs: verification and enumeration, Fourier
zero sets over cyclotomic integers, periodic-tiling and uniformity property
deciders, explicit counterexample constructions, spectra, and ascending-chain
tile structure.
"""

__version__ = "0.1.0"

from .errors import (
    BudgetExceededError,
    ConstructionError,
    InputError,
    MixedGroupError,
    NoPeriodicComplementError,
    NotCyclicError,
)
from .groups import (
    Group,
    GroupElement,
    GroupSubset,
    Subgroup,
    parse_element,
    parse_group,
    parse_subset,
    subgroup_from_carrier,
    subgroup_generated,
)
from .quotient import QuotientView, quotient
from .cyclotomic import (
    ExponentMultiset,
    IntPolynomial,
    MaskConditionReport,
    check_T1_T2,
    cyclotomic_poly,
    is_vanishing_root_sum,
    mask_polynomial,
)
from .tiling import (
    NodeBudget,
    TilingPair,
    difference_set,
    dilate,
    enumerate_complements,
    enumerate_tilings,
    is_tiling_pair,
    periods,
    tiling_pair_index,
    tiles_of_size,
)
from .fourier import (
    SpectralPair,
    deduce_period_from_line_zeros,
    find_spectrum,
    is_spectral_pair,
    spectrum_via_pt,
    zero_set,
)
from .properties import (
    ClassificationVerdict,
    PropertyVerdict,
    TileClassification,
    check_hajos,
    check_pt,
    check_redei,
    check_upt,
    classify_tile,
    hajos_list_member,
    known_classification,
)
from .constructions import (
    ChainDecomposition,
    ConstructionReport,
    ExtensionResult,
    build_nonPT_product_witness,
    build_p2cubed_witness,
    build_p2p2_witness,
    build_p2q2_witness,
    build_p3p2_witness,
    build_p3q2_witness,
    circ,
    decompose_ascending_chain,
    extend_tile_cyclic,
    extend_tile_product,
    recompose,
    subgroup_complement_elementary,
)


def clear_caches() -> None:
    """Drop every module-level memo (enumeration, zero sets, candidate pools)."""
    from .fourier import clear_zero_set_cache
    from .properties import clear_classification_caches
    from .quotient import _QUOTIENT_CACHE
    from .tiling import clear_enumeration_caches

    clear_enumeration_caches()
    clear_zero_set_cache()
    clear_classification_caches()
    _QUOTIENT_CACHE.clear()
