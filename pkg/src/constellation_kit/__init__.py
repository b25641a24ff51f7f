"""Affine constellations, Latin squares, and mutually unbiased basis search."""

from .affine import (
    AffineConstellation,
    Line,
    ParallelClass,
    Signature,
    canonicalize_class,
    complete_foliation_set,
    constellation_from_dict,
    constellation_to_dict,
    dominates,
    make_class,
    make_line,
    make_plane,
    materialize,
    signature_of,
    sub_constellation,
    table1_constellation,
    verify_constellation,
    verify_plane_axioms,
)
from .gf import FieldTable, build_field, field_for_order
from .latin import (
    LatinSquare,
    MateCertificate,
    PartialSquare,
    certify_no_mates,
    certify_no_mols6,
    enumerate_reduced_latin,
    find_orthogonal_mate,
    foliation_to_square,
    is_latin,
    macneish_product,
    make_square,
    mols_prime_power,
    parse_graeco_latin,
    render_graeco_latin,
    square_to_foliation,
    transversals,
    validate_squares,
)
from .mub import (
    Basis,
    MUConstellation,
    constellation_defect,
    fourier_basis,
    fourier_family6,
    hw_triple,
    make_basis,
    mu_defect,
    standard_basis,
    tao_basis,
    wf_complete_set,
)
from .search import SearchConfig, SearchResult, extend_search, search_constellation

__all__ = [
    "AffineConstellation",
    "Basis",
    "FieldTable",
    "LatinSquare",
    "MUConstellation",
    "MateCertificate",
    "Line",
    "ParallelClass",
    "PartialSquare",
    "SearchConfig",
    "SearchResult",
    "Signature",
    "build_field",
    "canonicalize_class",
    "certify_no_mates",
    "certify_no_mols6",
    "complete_foliation_set",
    "constellation_defect",
    "constellation_from_dict",
    "constellation_to_dict",
    "dominates",
    "enumerate_reduced_latin",
    "extend_search",
    "field_for_order",
    "find_orthogonal_mate",
    "foliation_to_square",
    "fourier_basis",
    "fourier_family6",
    "hw_triple",
    "is_latin",
    "macneish_product",
    "make_basis",
    "make_class",
    "make_line",
    "make_plane",
    "make_square",
    "materialize",
    "mols_prime_power",
    "mu_defect",
    "parse_graeco_latin",
    "render_graeco_latin",
    "search_constellation",
    "signature_of",
    "square_to_foliation",
    "standard_basis",
    "sub_constellation",
    "table1_constellation",
    "tao_basis",
    "transversals",
    "validate_squares",
    "verify_constellation",
    "verify_plane_axioms",
    "wf_complete_set",
]

__version__ = "0.1.0"
