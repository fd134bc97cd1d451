"""Levi-Civita connections, parallel tensors, curvature and holonomy of
metric Lie algebras given by structure constants."""
from .tolerance import DEFAULT_TOL, Tolerance
from .algebra import (
    AntisymmetryViolation,
    Frame,
    InvalidLieAlgebra,
    JacobiViolation,
    LieAlgebra,
    MetricLieAlgebra,
    NotPositiveDefinite,
    NotSymmetric,
    SingularFrame,
    SpecError,
    Subspace,
    center,
    change_basis,
    derived_subalgebra,
    load_spec,
    orthonormal_frame,
    parse_spec,
    validate_lie_algebra,
)
from .connection import (
    Connection,
    JacobiRelationsViolated,
    NotBlockForm,
    build_from_connection_forms,
    connection_form_decomposition,
    levi_civita,
)
from .curvature import CurvatureData, DegeneratePlane, FrameMismatch, RicciData, curvature, ricci, sectional
from .parallel import (
    Distinct,
    Fingerprint,
    Inconclusive,
    NotParallel,
    ParallelBasis,
    SpectralClass,
    classify_element,
    contains_non_complex_multiple,
    distinguish,
    fingerprint,
    parallel_space,
)
from .holonomy import (
    DeRhamDecomposition,
    Factor,
    HolonomyAlgebra,
    NotSkew,
    NotStabilized,
    TwoForm,
    covariant_derivative_tensor,
    derham_report,
    holonomy_algebra,
    invariant_decomposition,
    matrix_to_two_form,
    two_form_to_matrix,
)
from .catalog import ParamOutOfRange, UnknownEntry, catalog_build, catalog_list, verify_table_entry

__version__ = "0.1.0"
