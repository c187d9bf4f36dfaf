"""Historical diagnosability constructions, kept for cross-validation.

Three products from the earlier literature: the twin plant, the
event-position-blind verifier, and the generalized twin plant.  The first
two are only correct on live, divergence-free plants; the third is
assumption-free and doubles as an independent diagnosability oracle.  All
three work on a restricted model class: observable events labeled by
themselves, a single initial state, and a single unobservable fault event.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .automaton import Lfsa, cycle_through, scc_partition
from .composition import self_composition

NO_FAULT_YET = "φ"
NORMAL = "N"
FAULTY = "F"


class LegacyScopeError(ValueError):
    """The model falls outside the restricted class these methods support."""

    def __init__(self, problems):
        self.problems = tuple(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class TaggedProduct:
    """A diagnosability product whose states carry fault-propagation tags."""

    kind: str
    automaton: Lfsa


@dataclass(frozen=True)
class LegacyVerdict:
    method: str
    holds: bool
    offending_cycle: tuple = ()
    stats: dict = field(default_factory=dict)


def _check_scope(model: Lfsa, fault_event) -> None:
    problems = []
    if len(model.initial) != 1:
        problems.append(f"expected exactly one initial state, found {len(model.initial)}")
    for e in model.observable_events:
        if model.label(e) != e:
            problems.append(
                f"observable event {e!r} is labeled {model.label(e)!r}, not by itself"
            )
    if fault_event not in set(model.events):
        problems.append(f"fault event {fault_event!r} is not a declared event")
    elif model.label(fault_event) is not None:
        problems.append(f"fault event {fault_event!r} is not unobservable")
    if problems:
        raise LegacyScopeError(problems)


def _fault_tracking_closure(model: Lfsa, fault_event):
    """For every state: the states reachable by unobservable strings, split by
    whether some such string contains the fault."""
    closure = {}
    for origin in model.states:
        seen = {(origin, False)}
        stack = [(origin, False)]
        while stack:
            q, flagged = stack.pop()
            for e, dst in model.uo_out(q):
                item = (dst, flagged or e == fault_event)
                if item not in seen:
                    seen.add(item)
                    stack.append(item)
        closure[origin] = seen
    return closure


def fault_marked_plant(model: Lfsa, fault_event) -> Lfsa:
    """Observable-step automaton over (state, tag) pairs: a transition per
    observable event reachable through an unobservable prefix, its target
    tagged faulty when that prefix can contain the fault and untagged when a
    fault-free prefix also reaches it (both targets exist when both kinds of
    prefix do).  A faulty tag is absorbing."""
    closure = _fault_tracking_closure(model, fault_event)
    initial = (model.initial[0], NO_FAULT_YET)
    discovered = {initial: None}
    queue = deque([initial])
    transitions = []
    while queue:
        state = queue.popleft()
        origin, tag = state
        moves = {}
        for mid, flagged in sorted(
            closure[origin],
            key=lambda item: (model.state_index(item[0]), item[1]),
        ):
            for e, dst in model.out(mid):
                if model.label(e) is None:
                    continue
                fault_here = tag == FAULTY or flagged
                moves[(e, dst, FAULTY if fault_here else NO_FAULT_YET)] = None
        for e, dst, new_tag in moves:
            target = (dst, new_tag)
            transitions.append((state, e, target))
            if target not in discovered:
                discovered[target] = None
                queue.append(target)
    label_of = {e: e for e in model.observable_events}
    return Lfsa(
        tuple(discovered),
        model.observable_events,
        label_of,
        transitions,
        (initial,),
        model.outputs,
    )


def _offending_cycle(automaton: Lfsa, is_bad) -> tuple:
    """First cycle (canonical order) through a state failing the tag rule."""
    for comp in scc_partition(automaton):
        if not comp.has_cycle:
            continue
        bad = [q for q in comp.states if is_bad(q)]
        if bad:
            return cycle_through(automaton, bad[0], comp.states)
    return ()


def check_diag_twin_plant(model: Lfsa, fault_event) -> tuple[LegacyVerdict, TaggedProduct]:
    """Squares the fault-marked plant and accepts iff every cycle state pairs
    equal tags.  Valid only for live, divergence-free models; reproduced
    as-published, including its failures outside that class."""
    _check_scope(model, fault_event)
    marked = fault_marked_plant(model, fault_event)
    twin = self_composition(marked)
    product = TaggedProduct("twin-plant", twin)
    stats = {"product_states": len(twin.states)}
    cycle = _offending_cycle(twin, lambda s: s[0][1] != s[1][1])
    if cycle:
        return LegacyVerdict("twin-plant", False, cycle, stats), product
    return LegacyVerdict("twin-plant", True, (), stats), product


def build_yl_verifier(model: Lfsa, fault_event) -> Lfsa:
    """Pairing that synchronizes observable events and moves unobservable
    events on either or both sides, forgetting which side an unobservable
    event came from.  States are (x1, tag1, x2, tag2) quadruples."""
    x0 = model.initial[0]
    initial = (x0, NORMAL, x0, NORMAL)
    discovered = {initial: None}
    queue = deque([initial])
    transitions = []
    plain_uo = [e for e in model.unobservable_events if e != fault_event]
    while queue:
        state = queue.popleft()
        x1, l1, x2, l2 = state
        moves = []
        for e, dst in model.out(x1):
            if e == fault_event:
                moves.append((e, (dst, FAULTY, x2, l2)))
        for e, dst in model.out(x2):
            if e == fault_event:
                moves.append((e, (x1, l1, dst, FAULTY)))
        for e, d1 in model.out(x1):
            if e != fault_event:
                continue
            for e2, d2 in model.out(x2):
                if e2 == fault_event:
                    moves.append((e, (d1, FAULTY, d2, FAULTY)))
        for e in plain_uo:
            for ev, dst in model.out(x1):
                if ev == e:
                    moves.append((e, (dst, l1, x2, l2)))
            for ev, dst in model.out(x2):
                if ev == e:
                    moves.append((e, (x1, l1, dst, l2)))
            for ev, d1 in model.out(x1):
                if ev != e:
                    continue
                for ev2, d2 in model.out(x2):
                    if ev2 == e:
                        moves.append((e, (d1, l1, d2, l2)))
        for e in model.observable_events:
            for ev, d1 in model.out(x1):
                if ev != e:
                    continue
                for ev2, d2 in model.out(x2):
                    if ev2 == e:
                        moves.append((e, (d1, l1, d2, l2)))
        for e, target in moves:
            transitions.append((state, e, target))
            if target not in discovered:
                discovered[target] = None
                queue.append(target)
    return Lfsa(
        tuple(discovered),
        model.events,
        model.label_of,
        transitions,
        (initial,),
        model.outputs,
    )


def check_diag_yl_verifier(model: Lfsa, fault_event) -> tuple[LegacyVerdict, TaggedProduct]:
    """Accepts iff no cycle of the verifier contains a state with unequal
    tags.  Valid only for live, divergence-free models."""
    _check_scope(model, fault_event)
    verifier = build_yl_verifier(model, fault_event)
    product = TaggedProduct("yl-verifier", verifier)
    stats = {"product_states": len(verifier.states)}
    cycle = _offending_cycle(verifier, lambda s: s[1] != s[3])
    if cycle:
        return LegacyVerdict("yl-verifier", False, cycle, stats), product
    return LegacyVerdict("yl-verifier", True, (), stats), product


def build_generalized_twin_plant(model: Lfsa, fault_event) -> Lfsa:
    """Pairing that synchronizes observable events and keeps unobservable
    events on the side they occurred on; the right side never executes the
    fault, so no reachable state carries a faulty right tag.  Events are
    encoded as (left, right) pairs with ``None`` for the silent side."""
    x0 = model.initial[0]
    initial = (x0, NORMAL, x0, NORMAL)
    discovered = {initial: None}
    queue = deque([initial])
    transitions = []
    events = []
    label_of = {}
    for e in model.observable_events:
        pair = (e, e)
        events.append(pair)
        label_of[pair] = model.label(e)
    for e in model.unobservable_events:
        events.append((e, None))
        label_of[(e, None)] = None
    for e in model.unobservable_events:
        if e != fault_event:
            events.append((None, e))
            label_of[(None, e)] = None
    while queue:
        state = queue.popleft()
        x1, l1, x2, l2 = state
        moves = []
        for e, dst in model.out(x1):
            if model.label(e) is not None:
                continue
            new_l1 = FAULTY if e == fault_event else l1
            moves.append(((e, None), (dst, new_l1, x2, l2)))
        for e, dst in model.out(x2):
            if model.label(e) is not None or e == fault_event:
                continue
            moves.append(((None, e), (x1, l1, dst, l2)))
        for e, d1 in model.out(x1):
            if model.label(e) is None:
                continue
            for e2, d2 in model.out(x2):
                if e2 == e:
                    moves.append(((e, e), (d1, l1, d2, l2)))
        for pair, target in moves:
            transitions.append((state, pair, target))
            if target not in discovered:
                discovered[target] = None
                queue.append(target)
    return Lfsa(
        tuple(discovered),
        events,
        label_of,
        transitions,
        (initial,),
        model.outputs,
    )


def check_diag_generalized_twin_plant(
    model: Lfsa, fault_event
) -> tuple[LegacyVerdict, TaggedProduct]:
    """Assumption-free: the model is diagnosable iff no reachable cycle keeps
    a faulty left tag against a normal right tag while the left side keeps
    moving.  Serves as an independent oracle for the main diagnosability
    check."""
    _check_scope(model, fault_event)
    gtp = build_generalized_twin_plant(model, fault_event)
    product = TaggedProduct("generalized-twin-plant", gtp)
    stats = {"product_states": len(gtp.states)}
    for comp in scc_partition(gtp):
        comp_set = set(comp.states)
        sample = comp.states[0]
        if not (sample[1] == FAULTY and sample[3] == NORMAL):
            continue
        left_active = None
        for q in comp.states:
            for pair, dst in gtp.out(q):
                if dst in comp_set and pair[0] is not None:
                    left_active = q
                    break
            if left_active is not None:
                break
        if left_active is None:
            continue
        cycle = cycle_through(
            gtp, left_active, comp.states, lambda tr: tr[1][0] is not None
        )
        return (
            LegacyVerdict("generalized-twin-plant", False, cycle, stats),
            product,
        )
    return LegacyVerdict("generalized-twin-plant", True, (), stats), product


def tag_erased(tagged: Lfsa) -> Lfsa:
    """Drop the fault tags of a generalized twin plant, merging states that
    differ only in tags."""

    def erase(state):
        x1, _l1, x2, _l2 = state
        return (x1, x2)

    states = tuple(dict.fromkeys(erase(q) for q in tagged.states))
    transitions = tuple(
        dict.fromkeys(
            (erase(src), pair, erase(dst)) for src, pair, dst in tagged.transitions
        )
    )
    initial = tuple(dict.fromkeys(erase(q) for q in tagged.initial))
    return Lfsa(states, tagged.events, tagged.label_of, transitions, initial, tagged.outputs)


def same_structure(a: Lfsa, b: Lfsa) -> bool:
    """State-for-state identity of two reachable automata over the same
    state- and event-vocabulary (the isomorphism check used when both sides
    natively name their states by the same pairs)."""
    return (
        set(a.states) == set(b.states)
        and set(a.initial) == set(b.initial)
        and set(a.transitions) == set(b.transitions)
    )
