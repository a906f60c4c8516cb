"""Exact computations in the bounded homotopy category of projectives over a
bound quiver algebra, and the Grothendieck group of a silting subcategory."""

from .exactmath import QQ, ModP, PrimeField, make_field
from .pathalgebra import Algebra, load_algebra
from .homotopycat import (
    ComplexMap,
    ProjComplex,
    ProjMap,
    cone,
    hom_dimension,
    hom_space,
    iso_test,
    load_complex,
    minimal_form,
    shift,
)
from .grothendieck import K0Element, SamplerConfig, group_invariants, sampled_k0_presentation
from .silting import (
    SiltingCollection,
    extract_filtration,
    gamma,
    load_collection,
    stalk_collection,
    verify_hom_vanishing,
)

__all__ = [
    "QQ", "ModP", "PrimeField", "make_field",
    "Algebra", "load_algebra",
    "ComplexMap", "ProjComplex", "ProjMap", "cone", "hom_dimension", "hom_space", "iso_test",
    "load_complex", "minimal_form", "shift",
    "K0Element", "SamplerConfig", "group_invariants", "sampled_k0_presentation",
    "SiltingCollection", "extract_filtration", "gamma", "load_collection", "stalk_collection",
    "verify_hom_vanishing",
]

__version__ = "0.1.0"
