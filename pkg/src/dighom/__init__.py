"""Homotopy invariants of finite digital images by exact combinatorial search."""

from .errors import CapExceeded, DighomError, ValidationError
from .homotopy import (
    DEFAULT_CAPS,
    HomotopySession,
    SearchCaps,
    are_homotopic,
    are_m_homotopic,
    find_homotopy_inverse,
    function_space,
    is_contractible,
    is_nullhomotopic,
    path_space_with_fibration,
    verify_certificate,
)
from .lattice import (
    CP,
    NP,
    DigitalImage,
    build_image,
    dominates,
    image_from_json,
    image_to_json,
    induced_subimage,
    interval_image,
    load_image,
    np_product,
)
from .maps import (
    DigitalMap,
    compose,
    constant_map,
    diagonal_map,
    digital_map,
    enumerate_continuous_maps,
    identity_map,
    load_map,
    map_from_json,
    map_to_json,
    projection_map,
)
from .probes import (
    ProbeComplex,
    ProbeFamily,
    enumerate_maps,
    family_from_json,
    family_to_json,
    generate_probes,
    load_family,
    standard_m2,
)
from .solver import (
    INFINITE,
    CoverResult,
    GoodnessKind,
    InvariantReport,
    SolverSession,
    cat_kind,
    cat_map_kind,
    check_equivalence_invariance,
    check_fiber_m_equivalence,
    compute_cover,
    compute_invariant,
    distance_kind,
    dump_report,
    maximal_good_sets,
    min_cover,
    minimal_bad_sets,
    report_to_json,
    subset_good,
    verify_inequality_suite,
    verify_report,
)

__version__ = "0.1.0"

__all__ = [
    "CP",
    "CapExceeded",
    "CoverResult",
    "DEFAULT_CAPS",
    "DigitalImage",
    "DigitalMap",
    "DighomError",
    "GoodnessKind",
    "HomotopySession",
    "INFINITE",
    "InvariantReport",
    "NP",
    "ProbeComplex",
    "ProbeFamily",
    "SearchCaps",
    "SolverSession",
    "ValidationError",
    "are_homotopic",
    "are_m_homotopic",
    "build_image",
    "cat_kind",
    "cat_map_kind",
    "check_equivalence_invariance",
    "check_fiber_m_equivalence",
    "compose",
    "compute_cover",
    "compute_invariant",
    "constant_map",
    "diagonal_map",
    "digital_map",
    "distance_kind",
    "dominates",
    "dump_report",
    "enumerate_continuous_maps",
    "enumerate_maps",
    "family_from_json",
    "family_to_json",
    "find_homotopy_inverse",
    "function_space",
    "generate_probes",
    "identity_map",
    "image_from_json",
    "image_to_json",
    "induced_subimage",
    "interval_image",
    "is_contractible",
    "is_nullhomotopic",
    "load_family",
    "load_image",
    "load_map",
    "map_from_json",
    "map_to_json",
    "maximal_good_sets",
    "min_cover",
    "minimal_bad_sets",
    "np_product",
    "path_space_with_fibration",
    "projection_map",
    "report_to_json",
    "standard_m2",
    "subset_good",
    "verify_certificate",
    "verify_inequality_suite",
    "verify_report",
]
