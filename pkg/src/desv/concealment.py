"""Decision procedures for the eight state-concealment properties.

Standard opacity (current-state, initial-state, infinite-step, K-step) asks
whether an observer of the outputs can ever be certain that a secret state
was occupied at the relevant instant.  The strong flavors additionally ask
whether the observer can be certain that some secret state was visited at
all; they are decided on a product with the estimate automaton of the
secret-free part.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .automaton import Lfsa, SecretSpec, render_state, unobservable_reach
from .composition import (
    concurrent_composition,
    multi_seeded_product_reach,
    product_run_observation,
    seeded_product_reach,
)
from .derivations import (
    InvalidSecretSpec,
    build_observer,
    delete_secret,
    epsilonize,
    lift_observer,
)

STANDARD_VARIANTS = ("cso", "iso", "infso", "kso")
STRONG_VARIANTS = ("scso", "siso", "sinfso", "skso")
K_VARIANTS = ("kso", "skso")


class InvalidOpacityQuery(ValueError):
    pass


@dataclass(frozen=True)
class OpacityQuery:
    variant: str
    secrets: SecretSpec
    k: int | None = None


@dataclass(frozen=True)
class OpacityWitness:
    """Violation certificate: an observation after which the intruder is
    certain.  ``split`` marks the boundary between the part leading to the
    secret visit and the part observed afterwards (where that distinction
    matters); ``secret_state`` is the state whose visit leaks."""

    variant: str
    observation: tuple
    split: int | None = None
    secret_state: object = None
    violating_state: object = None
    product_run: tuple = ()

    def to_document(self) -> dict:
        doc = {
            "variant": self.variant,
            "observation": list(self.observation),
            "split": self.split,
            "secret_state": render_state(self.secret_state)
            if self.secret_state is not None
            else None,
            "violating_state": render_state(self.violating_state)
            if self.violating_state is not None
            else None,
        }
        if self.product_run:
            doc["run"] = [
                {
                    "from": render_state(src),
                    "event": render_state(pair),
                    "to": render_state(dst),
                }
                for src, pair, dst in self.product_run
            ]
        return doc


@dataclass(frozen=True)
class OpacityVerdict:
    variant: str
    holds: bool
    witness: OpacityWitness | None = None
    effective_k: int | None = None
    stats: dict = field(default_factory=dict)


def _checked_secret_set(model: Lfsa, secrets: SecretSpec) -> set:
    undeclared = [q for q in secrets.secret if q not in set(model.states)]
    if undeclared:
        raise InvalidSecretSpec(f"secret states not in the model: {undeclared!r}")
    return set(secrets.secret)


def _check_k(query: OpacityQuery) -> None:
    if query.variant in K_VARIANTS:
        if not isinstance(query.k, int) or query.k < 1:
            raise InvalidOpacityQuery(
                f"variant {query.variant!r} requires a positive integer k"
            )
    elif query.k is not None:
        raise InvalidOpacityQuery(
            f"variant {query.variant!r} does not take a k parameter"
        )


def standard_observation_cap(model: Lfsa, k: int) -> int:
    # No violation needs more observable steps than the plant/estimate
    # product has states, so capping there keeps the cost independent of a
    # huge user-supplied delay bound without ever changing the verdict.
    n = len(model.states)
    return min(k, n * 2 ** n)


def strong_observation_cap(model: Lfsa, secret_set: set, k: int) -> int:
    n = len(model.states)
    nonsecret = n - len(secret_set & set(model.states))
    return min(k, n * 2 ** nonsecret)


def _cso_violation(model, observer, secret_set):
    for x in observer.obs_states:
        if x and set(x) <= secret_set:
            return x
    return None


def check_standard_opacity(model: Lfsa, query: OpacityQuery) -> OpacityVerdict:
    """Current-state opacity falls out of the estimate automaton directly;
    the other three run a product of the label-renamed plant against the
    lifted estimate automaton, seeded at the estimates that hold right after
    a secret visit.  An empty right component means the intruder has excluded
    every matching non-secret alternative."""
    variant = query.variant
    if variant not in STANDARD_VARIANTS:
        raise InvalidOpacityQuery(f"unknown standard opacity variant {variant!r}")
    _check_k(query)
    secret_set = _checked_secret_set(model, query.secrets)
    effective_k = (
        standard_observation_cap(model, query.k) if variant == "kso" else None
    )

    if variant == "cso":
        observer = build_observer(model)
        stats = {"observer_states": len(observer.obs_states)}
        bad = _cso_violation(model, observer, secret_set)
        if bad is None:
            return OpacityVerdict(variant, True, None, None, stats)
        sigma = observer.observation_to(bad)
        witness = OpacityWitness(
            variant, sigma, split=None, secret_state=bad.members[0],
            violating_state=bad,
        )
        return OpacityVerdict(variant, False, witness, None, stats)

    if variant == "iso":
        initial = model.initial
        secret_initial = [q for q in initial if q in secret_set]
        if initial and all(q in secret_set for q in initial):
            witness = OpacityWitness(
                variant, (), split=None, secret_state=initial[0]
            )
            return OpacityVerdict(variant, False, witness, None, {})
        if not secret_initial:
            return OpacityVerdict(variant, True, None, None, {})
        rest = unobservable_reach(
            model, [q for q in initial if q not in secret_set]
        )
        observer = build_observer(model, extra_roots=[rest])
        det = lift_observer(observer)
        plant = epsilonize(model)
        stats = {"observer_states": len(observer.obs_states)}
        explored = 0
        for q0 in secret_initial:
            reach = seeded_product_reach(plant, det, (q0, rest))
            explored += len(reach)
            for state in reach.depths:
                if not state[1]:
                    run = reach.run_to(state)
                    sigma = product_run_observation(plant, run)
                    witness = OpacityWitness(
                        variant, sigma, split=None, secret_state=q0,
                        violating_state=state, product_run=run,
                    )
                    stats["product_states"] = explored
                    return OpacityVerdict(variant, False, witness, None, stats)
        stats["product_states"] = explored
        return OpacityVerdict(variant, True, None, None, stats)

    # infso / kso
    observer = build_observer(model)
    stats = {"observer_states": len(observer.obs_states)}
    bad = _cso_violation(model, observer, secret_set)
    if bad is not None:
        sigma = observer.observation_to(bad)
        witness = OpacityWitness(
            variant, sigma, split=len(sigma), secret_state=bad.members[0],
            violating_state=bad,
        )
        return OpacityVerdict(variant, False, witness, effective_k, stats)

    seed_info: dict = {}
    roots = []
    for x in observer.obs_states:
        hits = [q for q in x if q in secret_set]
        if not hits:
            continue
        remainder = model.state_set(q for q in x if q not in secret_set)
        if remainder not in roots:
            roots.append(remainder)
        for q in hits:
            seed = (q, remainder)
            seed_info.setdefault(seed, x)
    if not seed_info:
        return OpacityVerdict(variant, True, None, effective_k, stats)

    observer = build_observer(model, extra_roots=roots)
    det = lift_observer(observer)
    plant = epsilonize(model)
    cap = effective_k if variant == "kso" else None
    reach = multi_seeded_product_reach(plant, det, list(seed_info), cap)
    stats["observer_states"] = len(observer.obs_states)
    stats["product_states"] = len(reach)
    for state in reach.depths:
        if not state[1]:
            run = reach.run_to(state)
            seed = run[0][0] if run else state
            x = seed_info[seed]
            alpha = observer.observation_to(x)
            beta = product_run_observation(plant, run)
            witness = OpacityWitness(
                variant,
                alpha + beta,
                split=len(alpha),
                secret_state=seed[0],
                violating_state=state,
                product_run=run,
            )
            return OpacityVerdict(variant, False, witness, effective_k, stats)
    return OpacityVerdict(variant, True, None, effective_k, stats)


def check_strong_opacity(model: Lfsa, query: OpacityQuery) -> OpacityVerdict:
    """All four strong flavors run on the product of the label-renamed plant
    with the lifted estimate automaton of the secret-free part; the right
    component tracks exactly the runs that never touched a secret state."""
    variant = query.variant
    if variant not in STRONG_VARIANTS:
        raise InvalidOpacityQuery(f"unknown strong opacity variant {variant!r}")
    _check_k(query)
    secret_set = _checked_secret_set(model, query.secrets)
    effective_k = (
        strong_observation_cap(model, secret_set, query.k)
        if variant == "skso"
        else None
    )

    dss = delete_secret(model, query.secrets).automaton
    dss_observer = build_observer(dss)
    det = lift_observer(dss_observer)
    plant = epsilonize(model)
    product = concurrent_composition(plant, det)
    stats = {
        "observer_states": len(dss_observer.obs_states),
        "product_states": len(product.states),
        "secret_free_states": len(dss.states),
    }

    def witness_from_run(run, state, split, secret_state):
        return OpacityWitness(
            variant,
            product_run_observation(plant, run),
            split=split,
            secret_state=secret_state,
            violating_state=state,
            product_run=run,
        )

    if variant == "scso":
        for state in product.states:
            q, x = state
            if q in secret_set and not x:
                run = product.run_to(state)
                witness = witness_from_run(run, state, None, q)
                return OpacityVerdict(variant, False, witness, None, stats)
        return OpacityVerdict(variant, True, None, None, stats)

    if variant == "siso":
        initial = model.initial
        if initial and all(q in secret_set for q in initial):
            witness = OpacityWitness(variant, (), split=None, secret_state=initial[0])
            return OpacityVerdict(variant, False, witness, None, stats)
        for q0 in initial:
            if q0 not in secret_set:
                continue
            reach = seeded_product_reach(plant, det, (q0, dss_observer.obs_initial))
            for state in reach.depths:
                if not state[1]:
                    run = reach.run_to(state)
                    witness = OpacityWitness(
                        variant,
                        product_run_observation(plant, run),
                        split=None,
                        secret_state=q0,
                        violating_state=state,
                        product_run=run,
                    )
                    return OpacityVerdict(variant, False, witness, None, stats)
        return OpacityVerdict(variant, True, None, None, stats)

    if variant == "sinfso":
        for state in product.states:
            if not state[1]:
                run = product.run_to(state)
                split, secret_state = _last_secret_position(run, state, secret_set, plant)
                witness = witness_from_run(run, state, split, secret_state)
                return OpacityVerdict(variant, False, witness, None, stats)
        return OpacityVerdict(variant, True, None, None, stats)

    # skso
    seeds = [state for state in product.states if state[0] in secret_set]
    if not seeds:
        return OpacityVerdict(variant, True, None, effective_k, stats)
    reach = multi_seeded_product_reach(plant, det, seeds, effective_k)
    stats["capped_reach_states"] = len(reach)
    for state in reach.depths:
        if not state[1]:
            run = reach.run_to(state)
            seed = run[0][0] if run else state
            alpha_run = product.run_to(seed)
            alpha = product_run_observation(plant, alpha_run)
            beta = product_run_observation(plant, run)
            witness = OpacityWitness(
                variant,
                alpha + beta,
                split=len(alpha),
                secret_state=seed[0],
                violating_state=state,
                product_run=alpha_run + run,
            )
            return OpacityVerdict(variant, False, witness, effective_k, stats)
    return OpacityVerdict(variant, True, None, effective_k, stats)


def _last_secret_position(run, final_state, secret_set, plant):
    """Observation length at the last secret left state along a product run
    (the split the definitional checker needs)."""
    states = [run[0][0]] if run else [final_state]
    for _src, _pair, dst in run:
        states.append(dst)
    observed = [0]
    count = 0
    for _src, (left, _right), _dst in run:
        if left is not None and plant.label(left) is not None:
            count += 1
        observed.append(count)
    best = None
    for position, state in enumerate(states):
        if state[0] in secret_set:
            best = (observed[position], state[0])
    if best is None:
        raise AssertionError("empty-estimate product state without a secret visit")
    return best
