"""Independent definitional machinery.

Three services, all deliberately decoupled from the main decision
procedures:

* ``validate_witness`` re-checks a violation certificate directly against
  the property's definition — claimed runs against the transition relation,
  pump segments by actually pumping them, and the universally quantified
  "matching run" sets by direct subset construction along the claimed
  observation.
* ``bounded_definitional_search`` explores the definitional configuration
  graphs (estimates, estimate pairs, run-estimate pairs) up to a depth bound
  and reports a counterexample when one exists within it.  A null result is
  evidence, not proof.
* ``random_lfsa`` generates reproducible random models for cross-validation
  suites.

Estimate folding here is reimplemented locally so the oracle does not share
code with the estimate automaton or the products it is checking.
"""

from __future__ import annotations

import os
import random
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable

from .automaton import (
    FaultSpec,
    Lfsa,
    SecretSpec,
    is_divergence_free,
    is_live,
    strongly_connected_components,
    validate,
)
from .concealment import K_VARIANTS, OpacityWitness, STANDARD_VARIANTS, STRONG_VARIANTS
from .inference import (
    DIAGNOSABILITY,
    InferenceWitness,
    OMEGA_SD,
    PREDICTABILITY,
    STAR_SD,
)

BUDGET_ENV_VAR = "DESV_BUDGET"
DEFAULT_BUDGET = 2_000_000

INFERENCE_PROPERTIES = (STAR_SD, OMEGA_SD, DIAGNOSABILITY, PREDICTABILITY)
ALL_PROPERTIES = INFERENCE_PROPERTIES + STANDARD_VARIANTS + STRONG_VARIANTS


class MalformedClaimError(ValueError):
    """The claim does not resolve against the model (dangling states,
    unknown events, missing parameters) — distinct from a witness that
    resolves but fails its definition."""


class BudgetExceededError(RuntimeError):
    """The search would enumerate more configurations than allowed."""


class GeneratorError(ValueError):
    pass


def _configured_budget() -> int:
    raw = os.environ.get(BUDGET_ENV_VAR)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise GeneratorError(f"{BUDGET_ENV_VAR} must be an integer, got {raw!r}")


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, amount: int = 1) -> None:
        self.used += amount
        if self.used > self.limit:
            raise BudgetExceededError(
                f"definitional search exceeded its budget of {self.limit} steps"
            )


# -- local estimate folding -------------------------------------------------


def _closure(
    model: Lfsa,
    states: Iterable,
    state_ok: Callable | None = None,
    event_ok: Callable | None = None,
) -> frozenset:
    seen = set()
    stack = []
    for q in states:
        if state_ok is None or state_ok(q):
            seen.add(q)
            stack.append(q)
    while stack:
        q = stack.pop()
        for e, dst in model.uo_out(q):
            if event_ok is not None and not event_ok(e):
                continue
            if state_ok is not None and not state_ok(dst):
                continue
            if dst not in seen:
                seen.add(dst)
                stack.append(dst)
    return frozenset(seen)


def _sym_step(
    model: Lfsa,
    xs: Iterable,
    symbol: str,
    state_ok: Callable | None = None,
    event_ok: Callable | None = None,
) -> frozenset:
    targets = set()
    for q in xs:
        for e, dst in model.obs_out_label(q, symbol):
            if event_ok is not None and not event_ok(e):
                continue
            if state_ok is not None and not state_ok(dst):
                continue
            targets.add(dst)
    return _closure(model, targets, state_ok, event_ok)


def _fold(
    model: Lfsa,
    start: frozenset,
    sigma: Iterable[str],
    state_ok: Callable | None = None,
    event_ok: Callable | None = None,
    close_first: bool = False,
) -> frozenset:
    xs = _closure(model, start, state_ok, event_ok) if close_first else frozenset(start)
    for symbol in sigma:
        xs = _sym_step(model, xs, symbol, state_ok, event_ok)
    return xs


def _capable_states(model: Lfsa, event_ok: Callable | None = None) -> frozenset:
    """States from which a run of length |Q| exists (equivalently: states
    that can reach a transition cycle and run forever)."""
    frontier = {q: {q} for q in model.states}
    current = {q: frozenset([q]) for q in model.states}
    for _ in range(len(model.states)):
        nxt = {}
        for q, reached in current.items():
            step = set()
            for p in reached:
                for e, dst in model.out(p):
                    if event_ok is None or event_ok(e):
                        step.add(dst)
            nxt[q] = frozenset(step)
        current = nxt
    return frozenset(q for q, reached in current.items() if reached)


# -- witness validation ------------------------------------------------------


@dataclass(frozen=True)
class DefinitionalClaim:
    """A property instance together with the witness claimed to violate it."""

    property: str
    witness: object
    faults: FaultSpec | None = None
    secrets: SecretSpec | None = None
    k: int | None = None


def validate_witness(model: Lfsa, claim: DefinitionalClaim) -> tuple[bool, str]:
    """Check a violation witness directly against the property definition.

    Returns ``(True, explanation)`` when the witness certifies the violation
    and ``(False, reason)`` when it resolves but fails the definition.
    Raises :class:`MalformedClaimError` when the claim does not resolve
    against the model at all.
    """
    prop = claim.property
    if prop in (STAR_SD, OMEGA_SD):
        return _validate_detectability_witness(model, claim)
    if prop == DIAGNOSABILITY:
        return _validate_diagnosability_witness(model, claim)
    if prop == PREDICTABILITY:
        return _validate_predictability_witness(model, claim)
    if prop in STANDARD_VARIANTS + STRONG_VARIANTS:
        return _validate_opacity_witness(model, claim)
    raise MalformedClaimError(f"unknown property {prop!r}")


def _resolve_product_step(model: Lfsa, step) -> tuple:
    try:
        (src, pair, dst) = step
        left, right = src
        e_left, e_right = pair
        left2, right2 = dst
    except (TypeError, ValueError):
        raise MalformedClaimError(f"product step {step!r} has the wrong shape")
    states = set(model.states)
    events = set(model.events)
    for q in (left, right, left2, right2):
        if q not in states:
            raise MalformedClaimError(f"product step references unknown state {q!r}")
    for e in (e_left, e_right):
        if e is not None and e not in events:
            raise MalformedClaimError(f"product step references unknown event {e!r}")
    return (left, right), (e_left, e_right), (left2, right2)


def _product_step_error(model: Lfsa, step) -> str | None:
    (left, right), (e_left, e_right), (left2, right2) = _resolve_product_step(model, step)
    if e_left is None and e_right is None:
        return "step with two silent components"
    if e_left is not None and e_right is not None:
        if model.label(e_left) is None or model.label(e_right) is None:
            return "synchronized step with an unobservable component"
        if model.label(e_left) != model.label(e_right):
            return "synchronized step with unequal labels"
        if not model.has_transition(left, e_left, left2):
            return f"left component {(left, e_left, left2)!r} is not a transition"
        if not model.has_transition(right, e_right, right2):
            return f"right component {(right, e_right, right2)!r} is not a transition"
        return None
    if e_left is not None:
        if model.label(e_left) is not None:
            return "one-sided step with an observable event"
        if not model.has_transition(left, e_left, left2):
            return f"left component {(left, e_left, left2)!r} is not a transition"
        if right != right2:
            return "right component moved on a left-only step"
        return None
    if model.label(e_right) is not None:
        return "one-sided step with an observable event"
    if not model.has_transition(right, e_right, right2):
        return f"right component {(right, e_right, right2)!r} is not a transition"
    if left != left2:
        return "left component moved on a right-only step"
    return None


def _product_run_error(model: Lfsa, steps, require_initial: bool) -> str | None:
    for step in steps:
        error = _product_step_error(model, step)
        if error:
            return error
    for first, second in zip(steps, steps[1:]):
        if first[2] != second[0]:
            return "run segments do not chain"
    if require_initial and steps:
        left, right = steps[0][0]
        initials = set(model.initial)
        if left not in initials or right not in initials:
            return f"run does not start at a pair of initial states"
    return None


def _model_run_error(
    model: Lfsa, steps, start=None, event_ok: Callable | None = None
) -> str | None:
    states = set(model.states)
    events = set(model.events)
    for step in steps:
        try:
            src, e, dst = step
        except (TypeError, ValueError):
            raise MalformedClaimError(f"run step {step!r} has the wrong shape")
        if src not in states or dst not in states:
            raise MalformedClaimError(f"run step {step!r} references unknown states")
        if e not in events:
            raise MalformedClaimError(f"run step {step!r} references an unknown event")
        if not model.has_transition(src, e, dst):
            return f"{step!r} is not a transition of the model"
        if event_ok is not None and not event_ok(e):
            return f"{step!r} uses a disallowed event"
    for first, second in zip(steps, steps[1:]):
        if first[2] != second[0]:
            return "run segments do not chain"
    if start is not None and steps and steps[0][0] != start:
        return f"run does not start at {start!r}"
    return None


def _product_obs(model: Lfsa, steps) -> tuple:
    symbols = []
    for _src, (e_left, _e_right), _dst in steps:
        if e_left is not None:
            lab = model.label(e_left)
            if lab is not None:
                symbols.append(lab)
    return tuple(symbols)


def _require_inference_witness(claim) -> InferenceWitness:
    w = claim.witness
    if not isinstance(w, InferenceWitness):
        raise MalformedClaimError("claim does not carry an inference witness")
    if not isinstance(w.k_used, int) or w.k_used < 1:
        raise MalformedClaimError("witness pump count must be a positive integer")
    return w


def _validate_detectability_witness(model, claim):
    w = _require_inference_witness(claim)
    error = _product_run_error(
        model, w.prefix + w.cycle + w.tail, require_initial=True
    )
    if error:
        return False, error
    if not w.cycle:
        return False, "empty pump cycle"
    if w.cycle[0][0] != w.cycle[-1][2]:
        return False, "pump segment is not a cycle"
    if not w.prefix and w.cycle:
        left, right = w.cycle[0][0]
        initials = set(model.initial)
        if left not in initials or right not in initials:
            return False, "run does not start at a pair of initial states"
    cycle_obs = _product_obs(model, w.cycle)
    if not cycle_obs:
        return False, "pump cycle produces no output"
    end = (w.tail[-1][2] if w.tail else w.cycle[-1][2])
    if end[0] == end[1]:
        return False, "run ends in a matched state pair"
    k = w.k_used
    sigma = (
        _product_obs(model, w.prefix)
        + cycle_obs * (k + 1)
        + _product_obs(model, w.tail)
    )
    if len(sigma) <= k:
        return False, "pumped observation is not longer than the delay bound"
    estimate = _fold(model, frozenset(model.initial), sigma, close_first=True)
    if end[0] not in estimate or end[1] not in estimate:
        return False, "claimed end states are not in the estimate after pumping"
    if len(estimate) < 2:
        return False, "estimate after the pumped observation is a singleton"
    if claim.property == OMEGA_SD:
        error = _model_run_error(model, w.plant_path, start=end[0])
        if error:
            return False, f"continuation path: {error}"
        if not w.plant_cycle:
            return False, "no continuation cycle supplied"
        anchor = w.plant_path[-1][2] if w.plant_path else end[0]
        error = _model_run_error(model, w.plant_cycle, start=anchor)
        if error:
            return False, f"continuation cycle: {error}"
        if w.plant_cycle[-1][2] != anchor:
            return False, "continuation cycle does not close"
    return True, (
        f"estimate after the pumped observation ({len(sigma)} symbols) still "
        f"contains {len(estimate)} states"
    )


def _fault_set(model: Lfsa, claim) -> set:
    if claim.faults is None:
        raise MalformedClaimError("claim needs a fault specification")
    fault_set = set(claim.faults.faulty)
    unknown = fault_set - set(model.events)
    if unknown:
        raise MalformedClaimError(f"unknown faulty events {sorted(map(str, unknown))!r}")
    return fault_set


def _validate_diagnosability_witness(model, claim):
    w = _require_inference_witness(claim)
    fault_set = _fault_set(model, claim)
    if w.fault_step is None:
        return False, "no faulty step designated"
    run = w.prefix + (w.fault_step,) + w.tail + w.cycle
    error = _product_run_error(model, run, require_initial=True)
    if error:
        return False, error
    if w.fault_step[1][0] not in fault_set:
        return False, "designated step does not carry a faulty left event"
    if not w.cycle:
        return False, "no pump cycle supplied"
    if w.cycle[0][0] != w.cycle[-1][2]:
        return False, "pump segment is not a cycle"
    cycle_left = [pair[0] for _s, pair, _t in w.cycle if pair[0] is not None]
    if not cycle_left:
        return False, "pump cycle never moves the faulty side"
    for _src, (_e_left, e_right), _dst in run:
        if e_right is not None and e_right in fault_set:
            return False, "matching side of the run executes a faulty event"
    k = w.k_used
    tail_left = [pair[0] for _s, pair, _t in w.tail if pair[0] is not None]
    if len(tail_left) + (k + 1) * len(cycle_left) <= k:
        return False, "pumped continuation after the fault is too short"
    sigma = (
        _product_obs(model, w.prefix + (w.fault_step,) + w.tail)
        + _product_obs(model, w.cycle) * (k + 1)
    )
    fault_free = lambda e: e not in fault_set
    matching = _fold(
        model,
        frozenset(model.initial),
        sigma,
        event_ok=fault_free,
        close_first=True,
    )
    if not matching:
        return False, "no fault-free run matches the pumped observation"
    return True, (
        f"fault-free runs still match the observation after pumping "
        f"({len(matching)} candidate end states)"
    )


def _validate_predictability_witness(model, claim):
    w = _require_inference_witness(claim)
    fault_set = _fault_set(model, claim)
    fault_free = lambda e: e is None or e not in fault_set
    error = _product_run_error(model, w.prefix, require_initial=True)
    if error:
        return False, error
    for _src, (e_left, e_right), _dst in w.prefix:
        if not fault_free(e_left) or not fault_free(e_right):
            return False, "witness run executes a faulty event before the boundary"
    if w.fault_transition is None:
        return False, "no imminent faulty transition designated"
    try:
        fq, fe, fdst = w.fault_transition
    except (TypeError, ValueError):
        raise MalformedClaimError("faulty transition has the wrong shape")
    if fe not in set(model.events):
        raise MalformedClaimError(f"unknown event {fe!r} in faulty transition")
    if fe not in fault_set:
        return False, "designated transition is not faulty"
    if not model.has_transition(fq, fe, fdst):
        return False, "designated faulty transition is not in the model"
    if w.prefix:
        end = w.prefix[-1][2]
    else:
        end = w.anchor
        if end is None or len(end) != 2:
            raise MalformedClaimError("empty-run witness must designate its state pair")
        initials = set(model.initial)
        states = set(model.states)
        if end[0] not in states or end[1] not in states:
            raise MalformedClaimError("designated state pair references unknown states")
        if end[0] not in initials or end[1] not in initials:
            return False, "designated state pair is not a pair of initial states"
    if end[0] != fq:
        return False, "run does not end at the faulty transition's source"
    error = _model_run_error(
        model, w.plant_path, start=end[1], event_ok=lambda e: e not in fault_set
    )
    if error:
        return False, f"fault-free continuation path: {error}"
    if not w.plant_cycle:
        return False, "no fault-free continuation cycle supplied"
    anchor = w.plant_path[-1][2] if w.plant_path else end[1]
    error = _model_run_error(
        model, w.plant_cycle, start=anchor, event_ok=lambda e: e not in fault_set
    )
    if error:
        return False, f"fault-free continuation cycle: {error}"
    if w.plant_cycle[-1][2] != anchor:
        return False, "fault-free continuation cycle does not close"
    if w.k_used < len(model.states):
        return False, "pump count too small to certify unbounded continuations"
    capable = _capable_states(model, event_ok=lambda e: e not in fault_set)
    sigma = _product_obs(model, w.prefix)
    event_filter = lambda e: e not in fault_set
    xs = _closure(model, model.initial, event_ok=event_filter)
    checked = [xs]
    for symbol in sigma:
        xs = _sym_step(model, xs, symbol, event_ok=event_filter)
        checked.append(xs)
    for i, estimate in enumerate(checked):
        if not (estimate & capable):
            return False, (
                f"after {i} observed symbols no fault-free run can continue "
                f"beyond the delay bound"
            )
    return True, (
        "every fault-free prefix of the run admits an observation-matched "
        "fault-free run with unbounded continuation"
    )


def _secret_set(model: Lfsa, claim) -> set:
    if claim.secrets is None:
        raise MalformedClaimError("claim needs a secret specification")
    secret_set = set(claim.secrets.secret)
    unknown = secret_set - set(model.states)
    if unknown:
        raise MalformedClaimError(f"unknown secret states {sorted(map(str, unknown))!r}")
    return secret_set


def _validate_opacity_witness(model, claim):
    w = claim.witness
    if not isinstance(w, OpacityWitness):
        raise MalformedClaimError("claim does not carry an opacity witness")
    secret_set = _secret_set(model, claim)
    variant = claim.property
    sigma = tuple(w.observation)
    known = set(model.observable_labels)
    for symbol in sigma:
        if symbol not in known:
            raise MalformedClaimError(f"unknown output symbol {symbol!r}")
    needs_split = variant in ("infso", "kso", "sinfso", "skso")
    split = w.split
    if needs_split:
        if not isinstance(split, int) or not (0 <= split <= len(sigma)):
            raise MalformedClaimError("witness needs a split inside the observation")
        alpha, beta = sigma[:split], sigma[split:]
    if variant in K_VARIANTS:
        if not isinstance(claim.k, int) or claim.k < 1:
            raise MalformedClaimError("claim needs a positive integer k")

    nonsecret = lambda q: q not in secret_set
    full = lambda start, symbols: _fold(model, start, symbols, close_first=True)
    secretless = lambda start, symbols: _fold(
        model,
        frozenset(q for q in start if nonsecret(q)),
        symbols,
        state_ok=nonsecret,
        close_first=True,
    )

    if variant == "cso":
        estimate = full(frozenset(model.initial), sigma)
        if not estimate:
            return False, "no run produces the claimed observation"
        if not set(estimate) <= secret_set:
            return False, "a matching run ends outside the secret states"
        return True, f"every run matching the observation ends secret ({len(estimate)})"

    if variant == "iso":
        q0 = w.secret_state
        if q0 not in set(model.states):
            raise MalformedClaimError(f"unknown state {q0!r}")
        if q0 not in set(model.initial) or q0 not in secret_set:
            return False, "designated state is not a secret initial state"
        if not full(frozenset([q0]), sigma):
            return False, "no run from the secret initial state matches"
        if full(frozenset(q for q in model.initial if nonsecret(q)), sigma):
            return False, "a run from a non-secret initial state matches"
        return True, "only secret initial states explain the observation"

    if variant in ("infso", "kso"):
        if variant == "kso" and len(beta) > claim.k:
            return False, "delayed part of the observation exceeds k"
        q = w.secret_state
        if q not in set(model.states):
            raise MalformedClaimError(f"unknown state {q!r}")
        estimate = full(frozenset(model.initial), alpha)
        if q not in estimate or q not in secret_set:
            return False, "designated state is not a secret member of the estimate"
        if not full(frozenset([q]), beta):
            return False, "the secret run cannot be continued as claimed"
        survivors = _fold(
            model,
            frozenset(p for p in estimate if nonsecret(p)),
            beta,
            close_first=False,
        )
        if survivors:
            return False, "a non-secret candidate survives the delayed observation"
        return True, "the delayed observation rules out every non-secret candidate"

    if variant == "scso":
        q = w.secret_state
        if q not in set(model.states):
            raise MalformedClaimError(f"unknown state {q!r}")
        estimate = full(frozenset(model.initial), sigma)
        if q not in estimate or q not in secret_set:
            return False, "designated state is not a secret end of a matching run"
        if secretless(frozenset(model.initial), sigma):
            return False, "a run avoiding all secrets matches the observation"
        return True, "no secret-avoiding run matches the observation"

    if variant == "siso":
        q0 = w.secret_state
        if q0 not in set(model.states):
            raise MalformedClaimError(f"unknown state {q0!r}")
        if q0 not in set(model.initial) or q0 not in secret_set:
            return False, "designated state is not a secret initial state"
        if not full(frozenset([q0]), sigma):
            return False, "no run from the secret initial state matches"
        if secretless(frozenset(model.initial), sigma):
            return False, "a run avoiding all secrets matches the observation"
        return True, "no secret-avoiding run matches the observation"

    # sinfso / skso
    if variant == "skso" and len(beta) > claim.k:
        return False, "delayed part of the observation exceeds k"
    q = w.secret_state
    if q not in set(model.states):
        raise MalformedClaimError(f"unknown state {q!r}")
    estimate = full(frozenset(model.initial), alpha)
    if q not in estimate or q not in secret_set:
        return False, "designated state is not a secret member of the estimate"
    if not full(frozenset([q]), beta):
        return False, "the secret run cannot be continued as claimed"
    if secretless(frozenset(model.initial), sigma):
        return False, "a run avoiding all secrets matches the observation"
    return True, "no secret-avoiding run matches the split observation"


# -- bounded definitional search ---------------------------------------------


def bounded_definitional_search(
    model: Lfsa,
    property: str,
    *,
    faults: FaultSpec | None = None,
    secrets: SecretSpec | None = None,
    k: int | None = None,
    bound: int,
    budget: int | None = None,
) -> dict | None:
    """Search the property's definitional configuration graph up to ``bound``
    observed symbols / events and return a counterexample document when one
    is found.  ``None`` means nothing was found within the bound — evidence
    for the property, not a proof.

    The number of explored configurations is capped by ``budget`` (or the
    ``DESV_BUDGET`` environment variable); exceeding it raises
    :class:`BudgetExceededError` instead of silently truncating.
    """
    if not isinstance(bound, int) or bound < 1:
        raise ValueError("bound must be a positive integer")
    tracker = _Budget(budget if budget is not None else _configured_budget())
    if property in (STAR_SD, OMEGA_SD):
        return _search_detectability(model, property, bound, tracker)
    if property == DIAGNOSABILITY:
        return _search_diagnosability(model, _required_faults(model, faults), bound, tracker)
    if property == PREDICTABILITY:
        return _search_predictability(model, _required_faults(model, faults), bound, tracker)
    if property in STANDARD_VARIANTS + STRONG_VARIANTS:
        secret_set = _required_secrets(model, secrets)
        if property in K_VARIANTS and (not isinstance(k, int) or k < 1):
            raise ValueError(f"property {property!r} needs a positive integer k")
        return _search_opacity(model, property, secret_set, k, bound, tracker)
    raise ValueError(f"unknown property {property!r}")


def _required_faults(model: Lfsa, faults: FaultSpec | None) -> set:
    if faults is None:
        raise ValueError("this property needs a fault specification")
    fault_set = set(faults.faulty)
    unknown = fault_set - set(model.events)
    if unknown:
        raise ValueError(f"unknown faulty events {sorted(map(str, unknown))!r}")
    return fault_set


def _required_secrets(model: Lfsa, secrets: SecretSpec | None) -> set:
    if secrets is None:
        raise ValueError("this property needs a secret specification")
    secret_set = set(secrets.secret)
    unknown = secret_set - set(model.states)
    if unknown:
        raise ValueError(f"unknown secret states {sorted(map(str, unknown))!r}")
    return secret_set


def _parent_chain(parents: dict, node) -> tuple:
    symbols = []
    while True:
        entry = parents.get(node)
        if entry is None:
            return tuple(reversed(symbols))
        node, symbol = entry
        symbols.append(symbol)


def _cyclic_nodes(order, succ) -> set:
    comps = strongly_connected_components(
        order, lambda node: [target for _move, target in succ.get(node, ())]
    )
    cyclic: set = set()
    for comp in comps:
        if len(comp) > 1:
            cyclic.update(comp)
        else:
            node = comp[0]
            if any(target == node for _move, target in succ.get(node, ())):
                cyclic.add(node)
    return cyclic


def _backward_closure(order, succ, targets: set) -> set:
    pred: dict = {}
    for node, moves in succ.items():
        for _move, target in moves:
            pred.setdefault(target, []).append(node)
    found = set(targets)
    stack = list(targets)
    while stack:
        node = stack.pop()
        for p in pred.get(node, ()):
            if p not in found:
                found.add(p)
                stack.append(p)
    return found


def _moves_path(succ, source, targets: set) -> tuple:
    """Shortest move sequence over recorded edges; () when source qualifies."""
    if source in targets:
        return ()
    parents = {source: None}
    queue = deque([source])
    while queue:
        node = queue.popleft()
        for move, target in succ.get(node, ()):
            if target in parents:
                continue
            parents[target] = (node, move)
            if target in targets:
                moves = []
                walk = target
                while parents[walk] is not None:
                    walk, mv = parents[walk]
                    moves.append(mv)
                return tuple(reversed(moves))
            queue.append(target)
    raise AssertionError("recorded edges lost a reachable target")


def _moves_cycle(succ, anchor) -> tuple:
    """Shortest nonempty move sequence from anchor back to itself."""
    parents = {}
    queue = deque()
    for move, target in succ.get(anchor, ()):
        if target == anchor:
            return (move,)
        if target not in parents:
            parents[target] = (None, move)
            queue.append(target)
    while queue:
        node = queue.popleft()
        for move, target in succ.get(node, ()):
            if target == anchor:
                moves = [move]
                walk = node
                while True:
                    prev, mv = parents[walk]
                    moves.append(mv)
                    if prev is None:
                        return tuple(reversed(moves))
                    walk = prev
            if target not in parents:
                parents[target] = (node, move)
                queue.append(target)
    raise AssertionError("anchor marked cyclic without a recorded cycle")


def _search_detectability(model: Lfsa, variant: str, bound: int, budget: _Budget):
    labels = model.observable_labels
    init = _closure(model, model.initial)
    order = [init]
    depth = {init: 0}
    parents: dict = {init: None}
    succ: dict = {}
    queue = deque([init])
    while queue:
        xs = queue.popleft()
        d = depth[xs]
        if d >= bound:
            continue
        moves = []
        for symbol in labels:
            budget.spend()
            ys = _sym_step(model, xs, symbol)
            moves.append((symbol, ys))
            if ys not in depth:
                depth[ys] = d + 1
                parents[ys] = (xs, symbol)
                order.append(ys)
                queue.append(ys)
        succ[xs] = moves
    if variant == OMEGA_SD:
        forever = _capable_states(model)
        violating = {xs for xs in order if len(xs) > 1 and xs & forever}
    else:
        violating = {xs for xs in order if len(xs) > 1}
    if not violating:
        return None
    cyclic = _cyclic_nodes(order, succ)
    reach_violating = _backward_closure(order, succ, violating)
    anchor = None
    for xs in order:
        if xs in cyclic and xs in reach_violating:
            anchor = xs
            break
    if anchor is None:
        return None
    prefix = _parent_chain(parents, anchor)
    pump = _moves_cycle(succ, anchor)
    rest = _moves_path(succ, anchor, violating)
    return {
        "property": variant,
        "observation": list(prefix + pump + rest),
        "pump_start": len(prefix),
        "pump_length": len(pump),
    }


def _search_diagnosability(model: Lfsa, fault_set: set, bound: int, budget: _Budget):
    fault_free = lambda e: e not in fault_set
    start_x = _closure(model, model.initial, event_ok=fault_free)
    order = []
    depth: dict = {}
    parents: dict = {}
    succ: dict = {}
    queue = deque()
    for q in model.initial:
        cfg = (q, start_x, False)
        if cfg not in depth:
            depth[cfg] = 0
            parents[cfg] = None
            order.append(cfg)
            queue.append(cfg)
    step_cache: dict = {}
    while queue:
        cfg = queue.popleft()
        d = depth[cfg]
        if d >= bound:
            continue
        q, xs, flagged = cfg
        moves = []
        for e, dst in model.out(q):
            budget.spend()
            lab = model.label(e)
            if lab is None:
                ys = xs
            else:
                key = (xs, lab)
                ys = step_cache.get(key)
                if ys is None:
                    ys = _sym_step(model, xs, lab, event_ok=fault_free)
                    step_cache[key] = ys
            nxt = (dst, ys, flagged or e in fault_set)
            moves.append((e, nxt))
            if nxt not in depth:
                depth[nxt] = d + 1
                parents[nxt] = (cfg, e)
                order.append(nxt)
                queue.append(nxt)
        succ[cfg] = moves
    cyclic = _cyclic_nodes(order, succ)
    anchor = None
    for cfg in order:
        if cfg in cyclic and cfg[2] and cfg[1]:
            anchor = cfg
            break
    if anchor is None:
        return None
    run = _parent_chain(parents, anchor)
    pump = _moves_cycle(succ, anchor)
    observation = [model.label(e) for e in run + pump if model.label(e) is not None]
    return {
        "property": DIAGNOSABILITY,
        "run": list(run),
        "pump_events": list(pump),
        "observation": observation,
    }


def _search_predictability(model: Lfsa, fault_set: set, bound: int, budget: _Budget):
    fault_free = lambda e: e not in fault_set
    capable = _capable_states(model, event_ok=fault_free)
    start_x = _closure(model, model.initial, event_ok=fault_free)
    good = lambda xs: bool(xs & capable)
    if not good(start_x):
        return None
    depth: dict = {}
    parents: dict = {}
    order = []
    queue = deque()
    for q in model.initial:
        cfg = (q, start_x)
        if cfg not in depth:
            depth[cfg] = 0
            parents[cfg] = None
            order.append(cfg)
            queue.append(cfg)
    step_cache: dict = {}
    while queue:
        cfg = queue.popleft()
        q, xs = cfg
        for e, dst in model.out(q):
            if e in fault_set:
                run = _parent_chain(parents, cfg) + (e,)
                observation = [
                    model.label(ev) for ev in run if model.label(ev) is not None
                ]
                return {
                    "property": PREDICTABILITY,
                    "run": list(run),
                    "observation": observation,
                }
        d = depth[cfg]
        if d >= bound:
            continue
        for e, dst in model.out(q):
            if e in fault_set:
                continue
            budget.spend()
            lab = model.label(e)
            if lab is None:
                ys = xs
            else:
                key = (xs, lab)
                ys = step_cache.get(key)
                if ys is None:
                    ys = _sym_step(model, xs, lab, event_ok=fault_free)
                    step_cache[key] = ys
            if not good(ys):
                continue
            nxt = (dst, ys)
            if nxt not in depth:
                depth[nxt] = d + 1
                parents[nxt] = (cfg, e)
                order.append(nxt)
                queue.append(nxt)
    return None


def _pair_search(
    a0: frozenset,
    b0: frozenset,
    step_a: Callable,
    step_b: Callable,
    symbols,
    bound: int,
    budget: _Budget,
    is_violation: Callable,
    keep_going: Callable,
):
    """BFS over pairs of estimate sets, one shared observation driving both."""
    if is_violation(a0, b0):
        return ()
    start = (a0, b0)
    depth = {start: 0}
    parents: dict = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        d = depth[pair]
        if d >= bound:
            continue
        a, b = pair
        if not keep_going(a, b):
            continue
        for symbol in symbols:
            budget.spend()
            nxt = (step_a(a, symbol), step_b(b, symbol))
            if nxt in depth:
                continue
            depth[nxt] = d + 1
            parents[nxt] = (pair, symbol)
            if is_violation(*nxt):
                return _parent_chain(parents, nxt)
            queue.append(nxt)
    return None


def _search_opacity(model, variant, secret_set, k_value, bound, budget: _Budget):
    labels = model.observable_labels
    nonsecret = lambda q: q not in secret_set
    full_step = lambda xs, sym: _sym_step(model, xs, sym)
    dss_step = lambda xs, sym: _sym_step(model, xs, sym, state_ok=nonsecret)

    if variant == "cso":
        init = _closure(model, model.initial)
        depth = {init: 0}
        parents: dict = {init: None}
        queue = deque([init])
        while queue:
            xs = queue.popleft()
            if xs and set(xs) <= secret_set:
                return {
                    "property": variant,
                    "observation": list(_parent_chain(parents, xs)),
                    "split": None,
                }
            d = depth[xs]
            if d >= bound:
                continue
            for symbol in labels:
                budget.spend()
                ys = full_step(xs, symbol)
                if ys not in depth:
                    depth[ys] = d + 1
                    parents[ys] = (xs, symbol)
                    queue.append(ys)
        return None

    if variant in ("iso", "siso"):
        if variant == "iso":
            b0 = _closure(model, [q for q in model.initial if nonsecret(q)])
            step_b = full_step
        else:
            b0 = _closure(
                model,
                [q for q in model.initial if nonsecret(q)],
                state_ok=nonsecret,
            )
            step_b = dss_step
        for q0 in model.initial:
            if q0 not in secret_set:
                continue
            found = _pair_search(
                _closure(model, [q0]),
                b0,
                full_step,
                step_b,
                labels,
                bound,
                budget,
                is_violation=lambda a, b: bool(a) and not b,
                keep_going=lambda a, b: bool(a),
            )
            if found is not None:
                return {
                    "property": variant,
                    "observation": list(found),
                    "split": None,
                    "secret_state": q0,
                }
        return None

    if variant in ("infso", "kso"):
        init = _closure(model, model.initial)
        depth = {init: 0}
        parents = {init: None}
        order = [init]
        queue = deque([init])
        while queue:
            xs = queue.popleft()
            d = depth[xs]
            if d >= bound:
                continue
            for symbol in labels:
                budget.spend()
                ys = full_step(xs, symbol)
                if ys not in depth:
                    depth[ys] = d + 1
                    parents[ys] = (xs, symbol)
                    order.append(ys)
                    queue.append(ys)
        for xs in order:
            remaining = bound - depth[xs]
            if variant == "kso":
                remaining = min(remaining, k_value)
            for q in xs:
                if q not in secret_set:
                    continue
                found = _pair_search(
                    _closure(model, [q]),
                    _closure(model, [p for p in xs if nonsecret(p)]),
                    full_step,
                    full_step,
                    labels,
                    remaining,
                    budget,
                    is_violation=lambda a, b: bool(a) and not b,
                    keep_going=lambda a, b: bool(a),
                )
                if found is not None:
                    alpha = _parent_chain(parents, xs)
                    return {
                        "property": variant,
                        "observation": list(alpha + found),
                        "split": len(alpha),
                        "secret_state": q,
                    }
        return None

    if variant == "scso":
        d0 = _closure(
            model, [q for q in model.initial if nonsecret(q)], state_ok=nonsecret
        )
        found = _pair_search(
            _closure(model, model.initial),
            d0,
            full_step,
            dss_step,
            labels,
            bound,
            budget,
            is_violation=lambda a, b: bool(set(a) & secret_set) and not b,
            keep_going=lambda a, b: bool(a),
        )
        if found is None:
            return None
        end = _fold(model, frozenset(model.initial), found, close_first=True)
        secret_hit = next(q for q in model.states if q in end and q in secret_set)
        return {
            "property": variant,
            "observation": list(found),
            "split": None,
            "secret_state": secret_hit,
        }

    # sinfso / skso
    d0 = _closure(
        model, [q for q in model.initial if nonsecret(q)], state_ok=nonsecret
    )
    start = (_closure(model, model.initial), d0)
    depth = {start: 0}
    parents = {start: None}
    order = [start]
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        d = depth[pair]
        if d >= bound:
            continue
        xs, ds = pair
        if not xs:
            continue
        for symbol in labels:
            budget.spend()
            nxt = (full_step(xs, symbol), dss_step(ds, symbol))
            if nxt not in depth:
                depth[nxt] = d + 1
                parents[nxt] = (pair, symbol)
                order.append(nxt)
                queue.append(nxt)
    for pair in order:
        xs, ds = pair
        remaining = bound - depth[pair]
        if variant == "skso":
            remaining = min(remaining, k_value)
        for q in xs:
            if q not in secret_set:
                continue
            found = _pair_search(
                _closure(model, [q]),
                ds,
                full_step,
                dss_step,
                labels,
                remaining,
                budget,
                is_violation=lambda a, b: bool(a) and not b,
                keep_going=lambda a, b: bool(a),
            )
            if found is not None:
                alpha = _parent_chain(parents, pair)
                return {
                    "property": variant,
                    "observation": list(alpha + found),
                    "split": len(alpha),
                    "secret_state": q,
                }
    return None


# -- random model generation --------------------------------------------------


@dataclass(frozen=True)
class GeneratorParams:
    """Reproducible model generation: identical parameters (seed included)
    always produce the identical model."""

    states: int = 4
    events: int = 3
    observable_fraction: float = 0.6
    transition_density: float = 0.5
    initial_count: int = 1
    secret_density: float = 0.25
    fault_density: float = 0.2
    live: bool = False
    divergence_free: bool = False
    seed: int = 0


_LABEL_POOL = "abcdefghijklmnopqrstuvwxyz"
_REPAIR_ROUNDS = 60


def _raw_reachable(states, transitions, initial) -> set:
    adjacency: dict = {}
    for src, _e, dst in transitions:
        adjacency.setdefault(src, []).append(dst)
    found = set(initial)
    stack = list(initial)
    while stack:
        q = stack.pop()
        for dst in adjacency.get(q, ()):
            if dst not in found:
                found.add(dst)
                stack.append(dst)
    return found


def _unobservable_cycle_transition(states, transitions, initial, label_map):
    """First transition (canonical order) lying on a reachable cycle of
    unobservable transitions, or None."""
    alive = _raw_reachable(states, transitions, initial)
    silent = [
        t
        for t in transitions
        if label_map[t[1]] is None and t[0] in alive and t[2] in alive
    ]
    adjacency: dict = {}
    for src, _e, dst in silent:
        adjacency.setdefault(src, []).append(dst)
    nodes = [q for q in states if q in alive]
    for comp in strongly_connected_components(
        nodes, lambda q: adjacency.get(q, ())
    ):
        comp_set = set(comp)
        internal = [t for t in silent if t[0] in comp_set and t[2] in comp_set]
        if len(comp) > 1 and internal:
            return internal[0]
        if len(comp) == 1 and any(t[0] == t[2] for t in internal):
            return next(t for t in internal if t[0] == t[2])
    return None


def random_lfsa(params: GeneratorParams):
    """Generate a model with fault and secret annotations.

    Liveness and divergence-freeness are enforced by seeded repair rounds
    followed by a final check; unsatisfiable constraint combinations raise
    :class:`GeneratorError` after the repair budget runs out.
    """
    problems = []
    if params.states < 1:
        problems.append("at least one state is required")
    if params.events < 0:
        problems.append("event count must be nonnegative")
    if not 0.0 <= params.observable_fraction <= 1.0:
        problems.append("observable fraction must be within [0, 1]")
    if not 0.0 <= params.secret_density <= 1.0:
        problems.append("secret density must be within [0, 1]")
    if not 0.0 <= params.fault_density <= 1.0:
        problems.append("fault density must be within [0, 1]")
    if params.transition_density < 0.0:
        problems.append("transition density must be nonnegative")
    if not 0 <= params.initial_count:
        problems.append("initial count must be nonnegative")
    if problems:
        raise GeneratorError("; ".join(problems))

    rng = random.Random(params.seed)
    states = [f"q{i}" for i in range(params.states)]
    events = [f"e{i}" for i in range(params.events)]
    observable = events[: round(params.observable_fraction * params.events)]
    n_labels = max(1, (len(observable) + 1) // 2) if observable else 0
    alphabet = list(_LABEL_POOL[:n_labels])
    label_map = {e: rng.choice(alphabet) for e in observable}
    label_map.update({e: None for e in events[len(observable):]})

    transition_set = set()
    goal = round(params.transition_density * params.states * max(1, params.events))
    if events:
        for _ in range(goal):
            transition_set.add(
                (rng.choice(states), rng.choice(events), rng.choice(states))
            )
    initial = sorted(
        rng.sample(states, min(params.initial_count, params.states)),
        key=states.index,
    )
    secret = [q for q in states if rng.random() < params.secret_density]
    faulty = [e for e in events if rng.random() < params.fault_density]

    order_key = lambda t: (states.index(t[0]), events.index(t[1]), states.index(t[2]))
    for _ in range(_REPAIR_ROUNDS):
        changed = False
        ordered = sorted(transition_set, key=order_key)
        if params.live and events:
            alive = _raw_reachable(states, ordered, initial)
            outgoing = {t[0] for t in ordered}
            for q in states:
                if q in alive and q not in outgoing:
                    pool = observable if observable else events
                    transition_set.add((q, rng.choice(pool), rng.choice(states)))
                    changed = True
        if params.divergence_free:
            ordered = sorted(transition_set, key=order_key)
            offender = _unobservable_cycle_transition(
                states, ordered, initial, label_map
            )
            if offender is not None:
                transition_set.discard(offender)
                changed = True
        if not changed:
            break

    transitions = sorted(transition_set, key=order_key)
    model = validate(
        states=states,
        events=events,
        labels=label_map,
        transitions=transitions,
        initial=initial,
        outputs=alphabet,
    )
    if params.live and not is_live(model):
        raise GeneratorError("could not satisfy the liveness constraint")
    if params.divergence_free and not is_divergence_free(model):
        raise GeneratorError("could not satisfy the divergence-freeness constraint")
    return model, FaultSpec.of(faulty), SecretSpec.of(secret)
