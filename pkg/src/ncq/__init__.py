"""Certify and quantify the nonclassicality of quantum measurements and state sets.

The pipeline: operator families -> operational identity spaces -> assignment
polytopes and their vertices -> semidefinite/linear programs for verdicts,
robustness, fractions, witnesses, and noncontextuality inequalities.
"""

from .config import DEFAULT_CONFIG, RunConfig
from .operators import (
    Behavior,
    MultiMeasurement,
    MultiSource,
    StateSet,
    add_white_noise_measurement,
    add_white_noise_states,
    hermitian_basis,
    make_mub_multimeasurement,
    make_named_state_set,
    make_planar_measurement,
    make_planar_state_set,
    make_platonic_measurement,
    quantum_behavior,
    single_povm,
    trivial_measurement,
    unvectorize,
    vectorize,
)
from .identities import (
    IdentitySpace,
    measurement_identity_space,
    preparation_identity_space,
    verify_identity,
)
from .polytope import (
    AssignmentPolytope,
    EnumerationCapExceeded,
    VertexSet,
    build_measurement_polytope,
    build_preparation_polytope,
    enumerate_vertices,
    measurement_vertices,
    preparation_vertices,
    simplex_product_vertices,
)
from .conic import ConicProgram, Solution, SolverFailure, check_duality_gap, solve
from .quantifiers import (
    QuantifierReport,
    analytic_upper_bound_measurement,
    analytic_upper_bound_states,
    certify_measurement,
    certify_states,
    noise_sweep,
    nonclassical_fraction_measurement,
    nonclassical_fraction_states,
    white_noise_robustness_measurement,
    white_noise_robustness_measurement_dual,
    white_noise_robustness_states,
    white_noise_robustness_states_dual,
)
from .scenarios import (
    BipartiteState,
    flag_convexify_measurement,
    isotropic_state,
    multisource_to_state_set,
    steer,
    uniform_rescale_state_set,
)
from .witnesses import (
    MeasurementWitness,
    NCInequality,
    NCModelResult,
    OntologicalModel,
    StateWitness,
    evaluate_inequality,
    evaluate_measurement_witness,
    evaluate_state_witness,
    icosahedron_dodecahedron_inequality,
    nc_model_lp,
    pentagon_inequality,
    rotated_pentagon_inequality,
    verify_ontological_model,
    witness_from_dual_measurement,
    witness_from_dual_states,
)

__version__ = "0.1.0"
