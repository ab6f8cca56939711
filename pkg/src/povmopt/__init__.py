"""Steepest-descent POVM optimization for multiparameter quantum estimation.

Minimizes Tr(W J(Pi)^-1) over POVMs via gradient descent on Kraus factors,
with SLD / D-invariant Holevo / Nagaoka-Hayashi lower bounds and the known
closed-form optimal measurement families for qubit models.
"""

from .analytic import (
    Classification,
    ThreeOutcomeSolution,
    classify_povm,
    euler_rotation,
    feasible_q1_interval,
    randomized_pvm_povm,
    tetrahedron_povm,
    three_outcome_povm,
    trine_povm,
    two_copy_povm,
)
from .bounds import (
    BoundReport,
    bound_report,
    check_optimality,
    holevo_dinv,
    nh_bound,
    optimal_cfim_target,
    qubit_optimal_value,
    sld_bound,
)
from .errors import (
    DegenerateEnsembleError,
    DegenerateOutcomeError,
    EmptyPovmError,
    InconsistentSolutionError,
    InfeasibleFreeParameterError,
    InitFailureError,
    InvalidStateError,
    NoCertificateError,
    NoSldError,
    NotApplicableError,
    NotPsdError,
    PovmOptError,
    ResourceError,
    SingularCfimError,
    SingularProbabilityError,
)
from .fisher import cfim, locally_unbiased_estimator, objective, outcome_traces, sld, sld_qfi
from .measurement import (
    KrausEnsemble,
    Povm,
    kraus_from_povm,
    povm_from_json,
    povm_from_kraus,
    povm_to_json,
    prune,
    random_kraus_init,
    renormalize,
)
from .model import (
    StateModel,
    ValidationReport,
    dephasing_model,
    dim_cap,
    model_from_json,
    qubit_bloch_model,
    tensor_power,
    validate,
)
from .optimizer import (
    OptConfig,
    OptRun,
    find_min_outcomes,
    gradient_terms,
    lagrange_multiplier,
    line_search,
    max_useful_k,
    multi_restart,
    run,
    step,
)

__version__ = "0.1.0"
