"""desv: verification of labeled finite-state automata.

Decides strong detectability, diagnosability and predictability, plus eight
flavors of state-based opacity, through one synchronized-product method.
Every negative verdict carries a witness checkable against the raw property
definition.
"""

from .automaton import (
    EPSILON_EVENT,
    FaultSpec,
    InvalidModelError,
    Lfsa,
    SecretSpec,
    StateSet,
    can_reach_cycle,
    current_state_estimate,
    estimate_step,
    reachable,
    scc_partition,
    unobservable_reach,
    validate,
)
from .composition import (
    ProductAutomaton,
    concurrent_composition,
    seeded_product_reach,
    self_composition,
)
from .concealment import (
    OpacityQuery,
    OpacityVerdict,
    OpacityWitness,
    check_standard_opacity,
    check_strong_opacity,
)
from .derivations import (
    ObserverAutomaton,
    SubautomatonReport,
    build_observer,
    delete_secret,
    epsilonize,
    faulty_subautomaton,
    lift_observer,
    normal_subautomaton,
)
from .dot import export_dot
from .inference import (
    InferenceVerdict,
    InferenceWitness,
    check_diagnosability,
    check_predictability,
    check_strong_detectability,
)
from .legacy import (
    TaggedProduct,
    check_diag_generalized_twin_plant,
    check_diag_twin_plant,
    check_diag_yl_verifier,
)
from .modeldoc import ParsedModel, parse_model, serialize_model
from .oracle import (
    DefinitionalClaim,
    GeneratorParams,
    bounded_definitional_search,
    random_lfsa,
    validate_witness,
)

__version__ = "0.1.0"

__all__ = [
    "EPSILON_EVENT",
    "FaultSpec",
    "InvalidModelError",
    "Lfsa",
    "SecretSpec",
    "StateSet",
    "ProductAutomaton",
    "ObserverAutomaton",
    "SubautomatonReport",
    "TaggedProduct",
    "InferenceVerdict",
    "InferenceWitness",
    "OpacityQuery",
    "OpacityVerdict",
    "OpacityWitness",
    "DefinitionalClaim",
    "GeneratorParams",
    "ParsedModel",
    "validate",
    "unobservable_reach",
    "estimate_step",
    "current_state_estimate",
    "reachable",
    "scc_partition",
    "can_reach_cycle",
    "build_observer",
    "epsilonize",
    "lift_observer",
    "faulty_subautomaton",
    "normal_subautomaton",
    "delete_secret",
    "concurrent_composition",
    "self_composition",
    "seeded_product_reach",
    "check_strong_detectability",
    "check_diagnosability",
    "check_predictability",
    "check_standard_opacity",
    "check_strong_opacity",
    "check_diag_twin_plant",
    "check_diag_yl_verifier",
    "check_diag_generalized_twin_plant",
    "validate_witness",
    "bounded_definitional_search",
    "random_lfsa",
    "parse_model",
    "serialize_model",
    "export_dot",
]
