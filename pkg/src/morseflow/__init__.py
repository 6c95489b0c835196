"""Flow categories of Morse functions on flat tori.

Numerical construction of flow categories from exact trigonometric
polynomials, categorical and orientation validation, exact homology over
several coefficient rings, corner-structure combinatorics, and filtered
chain-level realizations.
"""

from .coeff import (
    CoefficientRing,
    HomologyGroup,
    IntegerMatrix,
    RingKind,
    LaurentElement,
    homology,
    invariant_factors,
    matrix_rank,
    smith_normal_form,
)
from .corners import (
    CubeObject,
    FaceStructure,
    SignDiagram,
    StratumChain,
    corner_code,
    face_decomposition,
    strata,
    strata_report_json,
    validate_face_structure,
)
from .errors import (
    InputError,
    MorseflowError,
    ValidationFailure,
)
from .flowcat import (
    BrokenFlow,
    CircleComponent,
    FloerComplexExtract,
    FlowCategory,
    IntervalComponent,
    ModuliFamily,
    OrientationData,
    RigidFlow,
    check_orientation_coherence,
    floer_complex,
    validate_morse_smale,
)
from .morse import (
    CircleFamily,
    CriticalPoint,
    FlowLine,
    IntervalFamily,
    NumericalConfig,
    TrigPolynomial,
    TrigTerm,
    build_flow_category,
    connecting_orbits,
    eval_grad_hess,
    find_critical_points,
    flow_lines,
    moduli_family,
    torus_distance,
    trajectories_svg,
    trajectory_csv,
)
from .realization import (
    ChainComplexData,
    FilteredRealization,
    GapSequence,
    all_homology,
    check_realization,
    compose,
    in_face_image,
    realize,
    total_homology,
)
from .report import Check, Report

__version__ = "0.1.0"

__all__ = [
    "BrokenFlow",
    "ChainComplexData",
    "Check",
    "CircleComponent",
    "CircleFamily",
    "CoefficientRing",
    "CriticalPoint",
    "CubeObject",
    "FaceStructure",
    "FilteredRealization",
    "FloerComplexExtract",
    "FlowCategory",
    "FlowLine",
    "GapSequence",
    "HomologyGroup",
    "InputError",
    "IntegerMatrix",
    "IntervalComponent",
    "IntervalFamily",
    "LaurentElement",
    "ModuliFamily",
    "MorseflowError",
    "NumericalConfig",
    "OrientationData",
    "Report",
    "RigidFlow",
    "RingKind",
    "SignDiagram",
    "StratumChain",
    "TrigPolynomial",
    "TrigTerm",
    "ValidationFailure",
    "all_homology",
    "build_flow_category",
    "check_orientation_coherence",
    "check_realization",
    "compose",
    "connecting_orbits",
    "corner_code",
    "eval_grad_hess",
    "face_decomposition",
    "find_critical_points",
    "floer_complex",
    "flow_lines",
    "homology",
    "in_face_image",
    "invariant_factors",
    "matrix_rank",
    "moduli_family",
    "realize",
    "smith_normal_form",
    "strata",
    "strata_report_json",
    "torus_distance",
    "total_homology",
    "trajectories_svg",
    "trajectory_csv",
    "validate_face_structure",
    "validate_morse_smale",
]
