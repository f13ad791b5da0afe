"""Numerical contact geometry on round odd-dimensional spheres.

The package builds pairs of commuting contact metric structures from
orthogonal complex structures on the ambient space and verifies the
geometry quantitatively: contact axioms, Killing and Sasakian
identities, transnormality and isoparametricity of the angle function
between the Reeb fields, level-surface mean curvature, and the
harmonicity of the normalized gradient as a unit vector field.
"""

from .errors import (
    BasePointMismatchError,
    ConstructionError,
    DegenerateInputError,
    GeometryError,
    IntegrabilityError,
    PreconditionError,
    RegularityError,
    SamplingExhaustedError,
    TangencyError,
    UnsupportedDimensionError,
)
from .manifold import (
    AmbientVectorField,
    Frame,
    OrthoComplexStructure,
    SpherePoint,
    TangentVector,
    block_diag_complex_structure,
    constant_field,
    cov_deriv,
    curvature,
    curvature_numeric,
    extension_of,
    gram_schmidt_frame,
    lie_bracket,
    linear_field,
    metric,
    project,
    ricci,
    ricci_frame_sum,
    ricci_operator,
    sample_points,
    sphere_volume,
    tangent_basis,
)
from .scalar_fields import (
    IsoparametricProfile,
    ScalarField,
    TransnormalProfile,
    check_geodesic,
    check_isoparametric,
    check_transnormal,
    coordinate_field,
    fit_affine_profile,
    gradient,
    gradient_field,
    hessian,
    laplacian,
    level_mean_curvature,
    mean_curvature_identity_check,
    normalized_gradient,
    quadratic_form_field,
)
from .contact import (
    ContactMetricStructure,
    build_from_complex_structure,
    check_axiom_ii,
    check_axiom_iii,
    check_axiom_volume,
    check_kcontact,
    check_sasakian,
    exterior_derivative,
    volume_form_constant,
)
from .double_kcontact import (
    ANGLE_PROFILE,
    DoubleKContact,
    HBundleBasis,
    commuting_invariants_check,
    dim_theorem_check,
    expected_laplacian_profile,
    gradient_identity_check,
    hbundle_basis,
    hessian_restriction_check,
    laplacian_formula_check,
    make_double,
    phi_product_spectrum_check,
    ricci_normal_check,
    standard_pair,
    transnormal_b_check,
)
from .harmonic import (
    ShapeSpectrum,
    UnitVectorField,
    critical_condition_check,
    energy,
    harmonicity_check,
    harmonicity_form,
    l_operator,
    mean_curvature_of_field,
    normalized_constant_unit_field,
    normalized_gradient_unit_field,
    principal_gradient_residual,
    pullback_metric,
    reeb_energy_closed_form,
    reeb_unit_field,
    ricci_gradient_residual,
    shape_spectrum,
    trace_l,
    twisted_unit_field,
    weingarten,
    weingarten_transpose,
)
from .report import EnergyEstimate, ResidualReport

__version__ = "0.1.0"
