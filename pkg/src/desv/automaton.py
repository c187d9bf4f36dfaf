"""Core model type and graph primitives for labeled finite-state automata.

A model is a set of states with event-driven transitions; each event either
emits an output symbol when it fires (observable) or emits nothing
(unobservable).  Everything downstream — estimate automata, synchronized
products, property checks — is built from the primitives defined here.

All values are immutable after construction and safe to share freely.
Iteration order is canonical everywhere (declaration order for states and
events, discovery order for derived sets) so that results are reproducible
run to run.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Sequence

# Reserved event identifier injected by derived constructions (label-renamed
# plants, lifted estimate automata).  Rejected in user-supplied models so the
# derived automata can never collide with a user identifier.
EPSILON_EVENT = "ε̂"


class InvalidModelError(ValueError):
    """A model description violates a well-formedness rule."""

    def __init__(self, problems: Sequence[str]):
        self.problems = tuple(problems)
        super().__init__("invalid model: " + "; ".join(self.problems))


class UnknownSymbolError(ValueError):
    """An output symbol outside the model's declared alphabet."""


@dataclass(frozen=True)
class StateSet:
    """Subset of a model's states, kept in canonical (declaration) order.

    Canonical order makes equality and hashing stable, so estimate automata
    deduplicate their states exactly.
    """

    members: tuple

    def __contains__(self, state) -> bool:
        return state in self.members

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __bool__(self) -> bool:
        return bool(self.members)

    def render(self) -> str:
        if not self.members:
            return "∅"
        return "{" + ",".join(render_state(m) for m in self.members) + "}"


EMPTY_STATE_SET = StateSet(())


@dataclass(frozen=True)
class FaultSpec:
    """The events whose occurrence counts as a fault."""

    faulty: tuple

    @classmethod
    def of(cls, events: Iterable) -> "FaultSpec":
        return cls(tuple(dict.fromkeys(events)))


@dataclass(frozen=True)
class SecretSpec:
    """The states whose visit must stay concealed."""

    secret: tuple

    @classmethod
    def of(cls, states: Iterable) -> "SecretSpec":
        return cls(tuple(dict.fromkeys(states)))


def render_state(value) -> str:
    """Stable human-readable form for plain, pair and tagged states."""
    if isinstance(value, StateSet):
        return value.render()
    if isinstance(value, tuple):
        return "(" + ",".join(render_state(v) for v in value) + ")"
    return str(value)


def render_event(value) -> str:
    if value is None:
        return "ε"
    if isinstance(value, tuple):
        return "(" + ",".join(render_event(v) for v in value) + ")"
    return str(value)


class Lfsa:
    """Labeled finite-state automaton.

    Holds the sextuple (states, events, transition relation, initial states,
    outputs, labeling) plus precomputed adjacency indexes.  Instances are
    immutable by convention: nothing mutates them after ``__init__``.

    State and event identifiers may be any hashable value; user-facing models
    use plain strings while derived automata use tuples and ``StateSet``s.
    """

    def __init__(
        self,
        states: Iterable,
        events: Iterable,
        label_of: Mapping,
        transitions: Iterable,
        initial: Iterable,
        outputs: Iterable,
    ):
        self.states = tuple(states)
        self.events = tuple(events)
        self.label_of = {e: label_of.get(e) for e in self.events}
        self.transitions = tuple((s, e, t) for (s, e, t) in transitions)
        self.initial = tuple(initial)
        self.outputs = tuple(outputs)

        self.observable_events = tuple(
            e for e in self.events if self.label_of[e] is not None
        )
        self.unobservable_events = tuple(
            e for e in self.events if self.label_of[e] is None
        )
        self.observable_labels = tuple(
            dict.fromkeys(self.label_of[e] for e in self.observable_events)
        )

        self._state_index = {q: i for i, q in enumerate(self.states)}
        self._event_index = {e: i for i, e in enumerate(self.events)}

        out: dict = {q: [] for q in self.states}
        into: dict = {q: [] for q in self.states}
        obs_out: dict = {q: {} for q in self.states}
        uo_out: dict = {q: [] for q in self.states}
        for s, e, t in self.transitions:
            out[s].append((e, t))
            into[t].append((e, s))
            lab = self.label_of[e]
            if lab is None:
                uo_out[s].append((e, t))
            else:
                obs_out[s].setdefault(lab, []).append((e, t))
        self._out = {q: tuple(v) for q, v in out.items()}
        self._into = {q: tuple(v) for q, v in into.items()}
        self._obs_out = {
            q: {lab: tuple(v) for lab, v in by.items()} for q, by in obs_out.items()
        }
        self._uo_out = {q: tuple(v) for q, v in uo_out.items()}
        self._transition_set = frozenset(self.transitions)
        self._memo: dict = {}

    # -- lookups ---------------------------------------------------------

    def label(self, event):
        return self.label_of[event]

    def out(self, q) -> tuple:
        return self._out[q]

    def into(self, q) -> tuple:
        return self._into[q]

    def obs_out(self, q) -> dict:
        return self._obs_out[q]

    def obs_out_label(self, q, label) -> tuple:
        return self._obs_out[q].get(label, ())

    def uo_out(self, q) -> tuple:
        return self._uo_out[q]

    def has_transition(self, src, event, dst) -> bool:
        return (src, event, dst) in self._transition_set

    def state_index(self, q) -> int:
        return self._state_index[q]

    def state_set(self, members: Iterable) -> StateSet:
        uniq = set(members)
        return StateSet(tuple(q for q in self.states if q in uniq))

    @property
    def initial_set(self) -> StateSet:
        return self.state_set(self.initial)

    def __repr__(self):
        return (
            f"Lfsa(states={len(self.states)}, events={len(self.events)}, "
            f"transitions={len(self.transitions)})"
        )


def validate(
    states: Iterable[str],
    events: Iterable[str],
    labels: Mapping[str, str | None],
    transitions: Iterable[Sequence[str]],
    initial: Iterable[str],
    outputs: Iterable[str] | None = None,
) -> Lfsa:
    """Check a raw model description and build the model.

    Raises :class:`InvalidModelError` listing every problem found: duplicate
    identifiers, transitions over undeclared states or events, label symbols
    outside the output alphabet, use of the reserved event token.  Identifiers
    are treated as atomic tokens, which keeps every output sequence uniquely
    decodable without a combinatorial check.
    """
    problems: list[str] = []
    states = list(states)
    events = list(events)
    transitions = [tuple(t) for t in transitions]
    initial = list(initial)

    def check_identifiers(kind: str, values: list) -> None:
        seen = set()
        for v in values:
            if not isinstance(v, str) or not v:
                problems.append(f"{kind} identifier {v!r} is not a nonempty string")
                continue
            if v == EPSILON_EVENT:
                problems.append(f"{kind} identifier {v!r} is reserved")
            if v in seen:
                problems.append(f"duplicate {kind} identifier {v!r}")
            seen.add(v)

    check_identifiers("state", states)
    check_identifiers("event", events)

    state_set = set(states)
    event_set = set(events)

    label_map = {e: labels.get(e) for e in events}
    declared_outputs = list(outputs) if outputs is not None else None
    if declared_outputs is not None:
        check_identifiers("output", declared_outputs)
    used_labels = [label_map[e] for e in events if label_map[e] is not None]
    for lab in used_labels:
        if not isinstance(lab, str) or not lab:
            problems.append(f"label {lab!r} is not a nonempty string")
        elif lab == EPSILON_EVENT:
            problems.append(f"label {lab!r} is reserved")
        elif declared_outputs is not None and lab not in declared_outputs:
            problems.append(f"label {lab!r} is not a declared output symbol")
    if declared_outputs is None:
        declared_outputs = list(dict.fromkeys(used_labels))

    for i, tr in enumerate(transitions):
        if len(tr) != 3:
            problems.append(f"transition #{i} is not a (source, event, target) triple")
            continue
        src, ev, dst = tr
        if src not in state_set:
            problems.append(f"transition #{i} references undeclared state {src!r}")
        if dst not in state_set:
            problems.append(f"transition #{i} references undeclared state {dst!r}")
        if ev not in event_set:
            problems.append(f"transition #{i} references undeclared event {ev!r}")
    seen_tr = set()
    for tr in transitions:
        if tr in seen_tr:
            problems.append(f"duplicate transition {tr!r}")
        seen_tr.add(tr)

    for q in initial:
        if q not in state_set:
            problems.append(f"initial state {q!r} is undeclared")

    if problems:
        raise InvalidModelError(problems)
    return Lfsa(states, events, label_map, transitions, initial, declared_outputs)


# -- estimates -----------------------------------------------------------


def unobservable_reach(model: Lfsa, x: StateSet | Iterable) -> StateSet:
    """Least superset of ``x`` closed under unobservable transitions."""
    seen = set(x)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for _e, dst in model.uo_out(q):
            if dst not in seen:
                seen.add(dst)
                stack.append(dst)
    return model.state_set(seen)


def estimate_step(model: Lfsa, x: StateSet | Iterable, symbol: str) -> StateSet:
    """One deterministic estimate step: every observable event emitting
    ``symbol``, followed by the unobservable closure of the targets."""
    if symbol not in set(model.observable_labels):
        raise UnknownSymbolError(f"{symbol!r} is not an observable output symbol")
    targets = set()
    for q in x:
        for _e, dst in model.obs_out_label(q, symbol):
            targets.add(dst)
    return unobservable_reach(model, targets)


def current_state_estimate(model: Lfsa, sigma: Sequence[str]) -> StateSet:
    """States the model can be in right after emitting exactly ``sigma``."""
    output_set = set(model.outputs)
    for symbol in sigma:
        if symbol not in output_set:
            raise UnknownSymbolError(f"{symbol!r} is not a declared output symbol")
    observable = set(model.observable_labels)
    x = unobservable_reach(model, model.initial)
    for symbol in sigma:
        if symbol not in observable:
            return EMPTY_STATE_SET
        x = estimate_step(model, x, symbol)
    return x


# -- reachability --------------------------------------------------------


def reachable(model: Lfsa, seeds: StateSet | Iterable, reflexive: bool = False) -> StateSet:
    """States reachable from ``seeds`` via one or more transitions; the seeds
    themselves are included only when ``reflexive`` is set."""
    found = set()
    stack = []
    for q in seeds:
        for _e, dst in model.out(q):
            if dst not in found:
                found.add(dst)
                stack.append(dst)
    while stack:
        q = stack.pop()
        for _e, dst in model.out(q):
            if dst not in found:
                found.add(dst)
                stack.append(dst)
    if reflexive:
        found.update(seeds)
    return model.state_set(found)


def coreachable(model: Lfsa, targets: StateSet | Iterable, reflexive: bool = False) -> StateSet:
    """States from which some target is reachable via one or more transitions."""
    found = set()
    stack = []
    for q in targets:
        for _e, src in model.into(q):
            if src not in found:
                found.add(src)
                stack.append(src)
    while stack:
        q = stack.pop()
        for _e, src in model.into(q):
            if src not in found:
                found.add(src)
                stack.append(src)
    if reflexive:
        found.update(targets)
    return model.state_set(found)


# -- strongly connected components ----------------------------------------


def strongly_connected_components(
    nodes: Sequence[Hashable], successors: Callable[[Hashable], Iterable]
) -> list[tuple]:
    """Iterative Tarjan over an arbitrary graph; deterministic given the node
    order and successor order."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    components: list[tuple] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(successors(root)))]
        while work:
            node, it = work[-1]
            advanced = False
            for succ in it:
                if succ not in index:
                    index[succ] = low[succ] = counter
                    counter += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(successors(succ))))
                    advanced = True
                    break
                if succ in on_stack and index[succ] < low[node]:
                    low[node] = index[succ]
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[node] < low[parent]:
                    low[parent] = low[node]
            if low[node] == index[node]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.append(w)
                    if w == node:
                        break
                components.append(tuple(reversed(component)))
    return components


@dataclass(frozen=True)
class SccComponent:
    """One strongly connected component with its two cycle tags."""

    states: tuple
    has_cycle: bool
    has_observable_cycle_edge: bool


def scc_partition(model: Lfsa) -> tuple[SccComponent, ...]:
    """Partition into strongly connected components.

    ``has_cycle`` marks components containing any transition cycle (size > 1,
    or a self-loop); ``has_observable_cycle_edge`` marks components with an
    internal transition whose label is an output symbol.
    """
    raw = strongly_connected_components(model.states, lambda q: [t for _e, t in model.out(q)])
    components = []
    for comp in raw:
        comp_set = set(comp)
        has_cycle = len(comp) > 1
        has_obs = False
        for q in comp:
            for e, dst in model.out(q):
                if dst in comp_set:
                    if dst == q or len(comp) > 1:
                        has_cycle = True
                    if model.label(e) is not None:
                        has_obs = True
        components.append(
            SccComponent(tuple(comp), has_cycle, has_obs and has_cycle)
        )
    return tuple(components)


def cycle_states(model: Lfsa) -> StateSet:
    """States lying on some transition cycle (memoized per model)."""
    cached = model._memo.get("cycle_states")
    if cached is None:
        members = []
        for comp in scc_partition(model):
            if comp.has_cycle:
                members.extend(comp.states)
        cached = model.state_set(members)
        model._memo["cycle_states"] = cached
    return cached


def can_reach_cycle(model: Lfsa, q) -> bool:
    """True iff an infinite-length run starts at ``q`` — some state on a
    transition cycle is reachable from ``q`` via one or more transitions.
    A state on a cycle qualifies by itself, through its own cycle."""
    cached = model._memo.get("cycle_reachers")
    if cached is None:
        cached = set(coreachable(model, cycle_states(model), reflexive=False))
        model._memo["cycle_reachers"] = cached
    return q in cached


# -- deterministic path construction ---------------------------------------


def shortest_path(
    model: Lfsa,
    sources: Iterable,
    targets: Iterable,
    within: set | None = None,
    edge_ok: Callable | None = None,
) -> tuple:
    """Shortest transition sequence from a source to a target, breadth-first
    and deterministic.  Returns ``()`` when a source already is a target.

    ``within`` restricts intermediate and end states; ``edge_ok`` filters
    transitions.  Raises ``ValueError`` when no path exists.
    """
    target_set = set(targets)
    sources = list(sources)
    for q in sources:
        if q in target_set:
            return ()
    parents: dict = {q: None for q in sources}
    queue = deque(sources)
    while queue:
        q = queue.popleft()
        for e, dst in model.out(q):
            if within is not None and dst not in within:
                continue
            if edge_ok is not None and not edge_ok((q, e, dst)):
                continue
            if dst in parents:
                continue
            parents[dst] = (q, e)
            if dst in target_set:
                steps = []
                node = dst
                while parents[node] is not None:
                    prev, ev = parents[node]
                    steps.append((prev, ev, node))
                    node = prev
                return tuple(reversed(steps))
            queue.append(dst)
    raise ValueError("no path between the given state sets")


def cycle_through(
    model: Lfsa,
    anchor,
    component: Iterable,
    edge_ok: Callable | None = None,
) -> tuple:
    """Nonempty cycle at ``anchor`` inside one strongly connected component,
    routed through the first component-internal transition accepted by
    ``edge_ok`` (canonical transition order)."""
    comp_set = set(component)
    chosen = None
    for tr in model.transitions:
        src, _e, dst = tr
        if src in comp_set and dst in comp_set and (edge_ok is None or edge_ok(tr)):
            chosen = tr
            break
    if chosen is None:
        raise ValueError("component has no qualifying internal transition")
    to_edge = shortest_path(model, [anchor], [chosen[0]], within=comp_set)
    back = shortest_path(model, [chosen[2]], [anchor], within=comp_set)
    return to_edge + (chosen,) + back


# -- global model predicates -----------------------------------------------


def is_live(model: Lfsa) -> bool:
    """Every reachable state has an outgoing transition."""
    for q in reachable(model, model.initial, reflexive=True):
        if not model.out(q):
            return False
    return True


def is_divergence_free(model: Lfsa) -> bool:
    """No reachable cycle made of unobservable transitions only."""
    live_part = set(reachable(model, model.initial, reflexive=True))
    nodes = [q for q in model.states if q in live_part]

    def uo_succ(q):
        return [t for _e, t in model.uo_out(q) if t in live_part]

    for comp in strongly_connected_components(nodes, uo_succ):
        comp_set = set(comp)
        if len(comp) > 1:
            return False
        q = comp[0]
        if any(t == q for t in uo_succ(q)):
            return False
    return True
