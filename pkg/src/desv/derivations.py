"""Builders for the derived automata the property checks consume.

Covers the deterministic estimate automaton (powerset construction), the
label-renamed plant, the lifted estimate automaton, and the three
subautomata: fault-related part, fault-free part, secret-free part.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .automaton import (
    EPSILON_EVENT,
    FaultSpec,
    Lfsa,
    SecretSpec,
    StateSet,
    coreachable,
    estimate_step,
    reachable,
    unobservable_reach,
)


class ObserverAutomaton:
    """Deterministic automaton over state estimates.

    Only the part reachable from the initial estimate (plus any extra seed
    estimates) is materialized; the empty estimate appears only if some step
    actually produces it, and is absorbing once present.  ``parents`` maps
    each non-root estimate to its discovery predecessor, giving shortest
    observations back to a root.
    """

    def __init__(self, source: Lfsa, alphabet, obs_states, obs_delta, obs_initial, parents):
        self.source = source
        self.alphabet = tuple(alphabet)
        self.obs_states = tuple(obs_states)
        self.obs_delta = dict(obs_delta)
        self.obs_initial = obs_initial
        self.parents = dict(parents)

    def step(self, x: StateSet, symbol: str) -> StateSet:
        return self.obs_delta[(x, symbol)]

    def observation_to(self, x: StateSet) -> tuple:
        """Shortest observation from this state's discovery root to ``x``."""
        symbols = []
        node = x
        while True:
            parent = self.parents.get(node)
            if parent is None:
                break
            node, symbol = parent
            symbols.append(symbol)
        return tuple(reversed(symbols))

    def __repr__(self):
        return f"ObserverAutomaton(states={len(self.obs_states)}, alphabet={self.alphabet})"


def build_observer(model: Lfsa, extra_roots: Iterable[StateSet] = ()) -> ObserverAutomaton:
    """Powerset construction from the closure of the initial states.

    ``extra_roots`` seeds additional estimates (used by the concealment
    checks, whose seeded products start from estimates that are not reachable
    from the initial one).  The initial estimate's tree is discovered first so
    parent chains from it stay intact.
    """
    alphabet = model.observable_labels
    init = unobservable_reach(model, model.initial)
    roots = [init]
    for root in extra_roots:
        if root not in roots:
            roots.append(root)

    discovered: dict[StateSet, None] = {}
    delta: dict[tuple, StateSet] = {}
    parents: dict[StateSet, tuple] = {}

    for root in roots:
        if root in discovered:
            continue
        discovered[root] = None
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for symbol in alphabet:
                y = estimate_step(model, x, symbol)
                delta[(x, symbol)] = y
                if y not in discovered:
                    discovered[y] = None
                    parents[y] = (x, symbol)
                    queue.append(y)
    return ObserverAutomaton(model, alphabet, discovered, delta, init, parents)


def epsilonize(model: Lfsa) -> Lfsa:
    """Rename every observable transition to its label and collapse all
    unobservable transitions onto the single reserved event.

    The result generates the same label sequences as the source; its
    observable events coincide with the output symbols, which is what lets it
    synchronize with a lifted estimate automaton.
    """
    for symbol in model.outputs:
        if symbol == EPSILON_EVENT:
            raise InvalidEpsilonization(
                f"output symbol {symbol!r} collides with the reserved event token"
            )
    events = list(model.observable_labels) + [EPSILON_EVENT]
    label_of = {a: a for a in model.observable_labels}
    label_of[EPSILON_EVENT] = None
    transitions = []
    seen = set()
    for src, e, dst in model.transitions:
        lab = model.label(e)
        renamed = (src, lab if lab is not None else EPSILON_EVENT, dst)
        if renamed not in seen:
            seen.add(renamed)
            transitions.append(renamed)
    return Lfsa(model.states, events, label_of, transitions, model.initial, model.outputs)


class InvalidEpsilonization(ValueError):
    pass


def lift_observer(obs: ObserverAutomaton) -> Lfsa:
    """View an estimate automaton as a model: states are the estimates, each
    output symbol becomes a self-labeled event, and the reserved unobservable
    event is declared with no transitions.  Suitable as the deterministic
    right operand of a synchronized product."""
    events = list(obs.alphabet) + [EPSILON_EVENT]
    label_of = {a: a for a in obs.alphabet}
    label_of[EPSILON_EVENT] = None
    transitions = [
        (x, symbol, obs.obs_delta[(x, symbol)])
        for x in obs.obs_states
        for symbol in obs.alphabet
    ]
    return Lfsa(
        obs.obs_states,
        events,
        label_of,
        transitions,
        (obs.obs_initial,),
        obs.source.outputs,
    )


@dataclass(frozen=True)
class SubautomatonReport:
    """A derived subautomaton plus the transitions it kept and dropped."""

    automaton: Lfsa
    kept: tuple
    dropped: tuple


def _transition_closure(transitions, initial) -> set:
    """Reflexive reachability over an explicit transition list."""
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


def faulty_subautomaton(model: Lfsa, faults: FaultSpec) -> SubautomatonReport:
    """Keep the faulty transitions together with all their predecessors and
    successors: a transition survives iff it is faulty, its target can still
    reach the source of some faulty transition, or its source is reachable
    from the target of some faulty transition.  With no faulty transition the
    result is empty and fault-related properties hold vacuously."""
    fault_set = set(faults.faulty)
    _check_faults_declared(model, fault_set)
    fault_transitions = [t for t in model.transitions if t[1] in fault_set]
    sources = {t[0] for t in fault_transitions}
    targets = {t[2] for t in fault_transitions}
    before = set(coreachable(model, sources, reflexive=True))
    after = set(reachable(model, targets, reflexive=True))
    kept = []
    dropped = []
    for tr in model.transitions:
        src, e, dst = tr
        if e in fault_set or dst in before or src in after:
            kept.append(tr)
        else:
            dropped.append(tr)
    incident = set()
    for src, _e, dst in kept:
        incident.add(src)
        incident.add(dst)
    states = tuple(q for q in model.states if q in incident)
    initial = tuple(q for q in model.initial if q in incident)
    sub = Lfsa(states, model.events, model.label_of, kept, initial, model.outputs)
    return SubautomatonReport(sub, tuple(kept), tuple(dropped))


def normal_subautomaton(model: Lfsa, faults: FaultSpec) -> SubautomatonReport:
    """Drop every faulty transition, then trim to the part reachable from the
    initial states.  Generates exactly the fault-free event sequences of the
    source; trimming cannot change that and keeps later products small."""
    fault_set = set(faults.faulty)
    _check_faults_declared(model, fault_set)
    fault_free = [t for t in model.transitions if t[1] not in fault_set]
    alive = _transition_closure(fault_free, model.initial)
    kept = [t for t in fault_free if t[0] in alive]
    dropped = [t for t in model.transitions if t not in set(kept)]
    states = tuple(q for q in model.states if q in alive)
    sub = Lfsa(states, model.events, model.label_of, kept, model.initial, model.outputs)
    return SubautomatonReport(sub, tuple(kept), tuple(dropped))


def delete_secret(model: Lfsa, secrets: SecretSpec) -> SubautomatonReport:
    """Remove the secret states with their incident transitions and keep the
    accessible remainder.  Runs of the result are exactly the runs of the
    source that avoid every secret state."""
    secret_set = set(secrets.secret)
    undeclared = [q for q in secrets.secret if q not in set(model.states)]
    if undeclared:
        raise InvalidSecretSpec(f"secret states not in the model: {undeclared!r}")
    surviving = [
        t
        for t in model.transitions
        if t[0] not in secret_set and t[2] not in secret_set
    ]
    initial = tuple(q for q in model.initial if q not in secret_set)
    alive = _transition_closure(surviving, initial)
    kept = [t for t in surviving if t[0] in alive]
    kept_set = set(kept)
    dropped = [t for t in model.transitions if t not in kept_set]
    states = tuple(q for q in model.states if q in alive)
    sub = Lfsa(states, model.events, model.label_of, kept, initial, model.outputs)
    return SubautomatonReport(sub, tuple(kept), tuple(dropped))


class InvalidSecretSpec(ValueError):
    pass


class InvalidFaultSpec(ValueError):
    pass


def _check_faults_declared(model: Lfsa, fault_set: set) -> None:
    undeclared = [e for e in fault_set if e not in set(model.events)]
    if undeclared:
        raise InvalidFaultSpec(f"faulty events not in the model: {sorted(map(str, undeclared))!r}")
