"""diraclab: a verification workbench for hypersurface Dirac operators.

Builds Clifford representations and discrete Dirac-type operators on exactly
solvable model hypersurfaces, computes spinor energy-momentum tensors, and
certifies the eigenvalue lower bounds, operator identities, and equality
cases that tie them together.
"""

__version__ = "0.1.0"

from .clifford import (
    GammaSet,
    ChiralitySplit,
    build_gamma,
    volume_element,
    alpha_embed,
    find_intertwiner,
    chirality_split,
)
from .errors import ConfigError, HermiticityError, SoundnessError
from .geometry import HypersurfaceModel, make_model, gauss_formula_residual, ellipse_curvature
from .operators import (
    SpinorField,
    DiscreteOperator,
    SpectrumResult,
    assemble_intrinsic_dirac,
    assemble_hypersurface_dirac,
    assemble_dirac_schrodinger,
    covariant_derivative,
    lichnerowicz_residual,
    witten_identity_residual,
    eigensolve,
)
from .energy_momentum import (
    EMTensorField,
    compute_q,
    trace_identity_residual,
    em_spinor_residual,
    qtr_identity_residual,
)
from .connections import (
    ConnectionParams,
    pq_thm1,
    pq_zhang,
    nabla_q_apply,
    nabla_lambda_apply,
    qformula_residual,
    integral_identity_residual,
)
from .bounds import BoundReport, evaluate_bound, sign_diagnostics, improvement_comparison
from .conformal import (
    ConformalFactor,
    transform_geometry,
    conformal_covariance_residual,
    assemble_conformal_dirac,
    evaluate_conformal_bounds,
    optimize_u,
    wem_equality_check,
)
from .scenarios import run_scenario, emit_table
from .suites import verify_suite
