"""Request handlers shared by the command line and the HTTP service.

Every handler takes plain JSON-ready data and returns a plain JSON-ready
document, so the two front ends behave identically.  Input problems raise
:class:`RequestError`; the callers map it to exit code 2 or HTTP 400.
"""

from __future__ import annotations

from .automaton import InvalidModelError
from .composition import concurrent_composition, self_composition
from .concealment import (
    InvalidOpacityQuery,
    K_VARIANTS,
    OpacityQuery,
    STANDARD_VARIANTS,
    STRONG_VARIANTS,
    check_standard_opacity,
    check_strong_opacity,
)
from .derivations import (
    InvalidFaultSpec,
    InvalidSecretSpec,
    build_observer,
    delete_secret,
    epsilonize,
    faulty_subautomaton,
    normal_subautomaton,
)
from .dot import export_dot
from .inference import (
    DIAGNOSABILITY,
    OMEGA_SD,
    PREDICTABILITY,
    STAR_SD,
    check_diagnosability,
    check_predictability,
    check_strong_detectability,
)
from .legacy import (
    LegacyScopeError,
    check_diag_generalized_twin_plant,
    check_diag_twin_plant,
    check_diag_yl_verifier,
)
from .modeldoc import (
    FORMAT_VERSION,
    ModelDocumentError,
    ParsedModel,
    model_document,
    parse_model_data,
)
from .oracle import (
    BudgetExceededError,
    GeneratorError,
    GeneratorParams,
    bounded_definitional_search,
    random_lfsa,
)

PROPERTIES = (STAR_SD, OMEGA_SD, DIAGNOSABILITY, PREDICTABILITY) + STANDARD_VARIANTS + STRONG_VARIANTS

ARTIFACTS = (
    "observer",
    "self-composition",
    "cc-fn",
    "cc-nn",
    "epsilon",
    "dss-observer",
    "twin-plant",
    "yl-verifier",
    "gtp",
)

_INPUT_ERRORS = (
    ModelDocumentError,
    InvalidModelError,
    InvalidOpacityQuery,
    InvalidSecretSpec,
    InvalidFaultSpec,
    LegacyScopeError,
    GeneratorError,
)


class RequestError(ValueError):
    pass


def _parse(data, strict: bool) -> ParsedModel:
    try:
        return parse_model_data(data, strict=strict)
    except _INPUT_ERRORS as err:
        raise RequestError(str(err)) from None


def run_check(parsed: ParsedModel, property: str, k: int | None):
    """Run one property check, returning its verdict object."""
    if property not in PROPERTIES:
        raise RequestError(f"unknown property {property!r}")
    if k is not None and property not in K_VARIANTS:
        raise RequestError(f"property {property!r} does not take k")
    try:
        if property == STAR_SD:
            return check_strong_detectability(parsed.model, "star")
        if property == OMEGA_SD:
            return check_strong_detectability(parsed.model, "omega")
        if property == DIAGNOSABILITY:
            return check_diagnosability(parsed.model, parsed.faults)
        if property == PREDICTABILITY:
            return check_predictability(parsed.model, parsed.faults)
        query = OpacityQuery(property, parsed.secrets, k)
        if property in STANDARD_VARIANTS:
            return check_standard_opacity(parsed.model, query)
        return check_strong_opacity(parsed.model, query)
    except _INPUT_ERRORS as err:
        raise RequestError(str(err)) from None


def verdict_document(verdict, property: str, k: int | None) -> dict:
    parameters = {}
    if property in K_VARIANTS:
        parameters = {"k": k, "effective_k": verdict.effective_k}
    return {
        "format_version": FORMAT_VERSION,
        "property": property,
        "parameters": parameters,
        "holds": verdict.holds,
        "witness": verdict.witness.to_document() if verdict.witness else None,
        "stats": dict(verdict.stats),
    }


def verify_document(data, property: str, k: int | None = None, strict: bool = True) -> dict:
    parsed = _parse(data, strict)
    verdict = run_check(parsed, property, k)
    return verdict_document(verdict, property, k)


def _single_fault(parsed: ParsedModel) -> str:
    if len(parsed.faults.faulty) != 1:
        raise RequestError(
            "this artifact needs exactly one faulty event (mark it in the "
            "model or pass --fault)"
        )
    return parsed.faults.faulty[0]


def build_artifact(parsed: ParsedModel, artifact: str, fault: str | None = None):
    """Build one derived automaton; returns the exportable object."""
    model = parsed.model
    try:
        if artifact == "observer":
            return build_observer(model)
        if artifact == "self-composition":
            return self_composition(model)
        if artifact == "cc-fn":
            sf = faulty_subautomaton(model, parsed.faults).automaton
            sn = normal_subautomaton(model, parsed.faults).automaton
            return concurrent_composition(sf, sn)
        if artifact == "cc-nn":
            sn = normal_subautomaton(model, parsed.faults).automaton
            return self_composition(sn)
        if artifact == "epsilon":
            return epsilonize(model)
        if artifact == "dss-observer":
            return build_observer(delete_secret(model, parsed.secrets).automaton)
        fault_event = fault if fault is not None else _single_fault(parsed)
        if artifact == "twin-plant":
            return check_diag_twin_plant(model, fault_event)[1]
        if artifact == "yl-verifier":
            return check_diag_yl_verifier(model, fault_event)[1]
        if artifact == "gtp":
            return check_diag_generalized_twin_plant(model, fault_event)[1]
    except _INPUT_ERRORS as err:
        raise RequestError(str(err)) from None
    raise RequestError(f"unknown artifact {artifact!r}")


def _artifact_stats(obj) -> dict:
    from .derivations import ObserverAutomaton
    from .legacy import TaggedProduct

    if isinstance(obj, ObserverAutomaton):
        return {"states": len(obj.obs_states), "transitions": len(obj.obs_delta)}
    if isinstance(obj, TaggedProduct):
        inner = obj.automaton
        return {"states": len(inner.states), "transitions": len(inner.transitions)}
    return {"states": len(obj.states), "transitions": len(obj.transitions)}


def build_document(data, artifact: str, fault: str | None = None, strict: bool = True) -> dict:
    parsed = _parse(data, strict)
    built = build_artifact(parsed, artifact, fault)
    return {
        "format_version": FORMAT_VERSION,
        "artifact": artifact,
        "dot": export_dot(built),
        "stats": _artifact_stats(built),
    }


def oracle_document(
    data,
    property: str,
    bound: int,
    k: int | None = None,
    strict: bool = True,
) -> dict:
    parsed = _parse(data, strict)
    if property not in PROPERTIES:
        raise RequestError(f"unknown property {property!r}")
    try:
        found = bounded_definitional_search(
            parsed.model,
            property,
            faults=parsed.faults,
            secrets=parsed.secrets,
            k=k,
            bound=bound,
        )
    except BudgetExceededError as err:
        raise RequestError(str(err)) from None
    except ValueError as err:
        raise RequestError(str(err)) from None
    return {
        "format_version": FORMAT_VERSION,
        "property": property,
        "bound": bound,
        "found": found is not None,
        "counterexample": found,
    }


def generate_document(
    states: int,
    events: int,
    seed: int,
    live: bool = False,
    divergence_free: bool = False,
    observable_fraction: float = 0.6,
    transition_density: float = 0.5,
    initial_count: int = 1,
    secret_density: float = 0.25,
    fault_density: float = 0.2,
) -> dict:
    params = GeneratorParams(
        states=states,
        events=events,
        observable_fraction=observable_fraction,
        transition_density=transition_density,
        initial_count=initial_count,
        secret_density=secret_density,
        fault_density=fault_density,
        live=live,
        divergence_free=divergence_free,
        seed=seed,
    )
    try:
        model, faults, secrets = random_lfsa(params)
    except GeneratorError as err:
        raise RequestError(str(err)) from None
    return model_document(model, faults, secrets)
