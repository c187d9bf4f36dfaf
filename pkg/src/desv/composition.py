"""Synchronized products of two models.

The product pairs up runs of its operands that emit the same output
sequence: observable transitions with equal labels move both sides together,
unobservable transitions move one side while the other stays put.  Only the
reachable part is ever materialized.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .automaton import Lfsa


class AlphabetMismatchError(ValueError):
    pass


class ProductAutomaton(Lfsa):
    """Product model whose states are (left, right) pairs and whose events
    are (left event or None, right event or None) pairs.

    ``parents`` records the discovery predecessor of every non-initial state,
    so shortest runs from the initial states can be reconstructed without a
    second search.
    """

    def __init__(self, left: Lfsa, right: Lfsa, states, events, label_of,
                 transitions, initial, outputs, parents):
        super().__init__(states, events, label_of, transitions, initial, outputs)
        self.left_model = left
        self.right_model = right
        self.parents = parents

    def run_to(self, state) -> tuple:
        """Discovery run (a shortest one) from an initial state to ``state``."""
        steps = []
        node = state
        while True:
            parent = self.parents.get(node)
            if parent is None:
                break
            prev, pair = parent
            steps.append((prev, pair, node))
            node = prev
        return tuple(reversed(steps))


def concurrent_composition(a: Lfsa, b: Lfsa) -> ProductAutomaton:
    """Reachable part of the synchronized product of ``a`` and ``b``.

    Requires the two operands to share their output alphabet.  Pair events
    carry the shared label of their components; one-sided events are
    unobservable.
    """
    if set(a.outputs) != set(b.outputs):
        raise AlphabetMismatchError(
            f"operands do not share an output alphabet: {a.outputs!r} vs {b.outputs!r}"
        )

    events: list = []
    label_of: dict = {}
    for e in a.observable_events:
        lab = a.label(e)
        for e2 in b.observable_events:
            if b.label(e2) == lab:
                pair = (e, e2)
                events.append(pair)
                label_of[pair] = lab
    for e in a.unobservable_events:
        events.append((e, None))
        label_of[(e, None)] = None
    for e2 in b.unobservable_events:
        events.append((None, e2))
        label_of[(None, e2)] = None

    initial = [(p, q) for p in a.initial for q in b.initial]
    discovered: dict = dict.fromkeys(initial)
    parents: dict = {s: None for s in initial}
    transitions: list = []
    queue = deque(initial)
    while queue:
        state = queue.popleft()
        p, q = state
        moves: list = []
        for lab, pairs in a.obs_out(p).items():
            right_moves = b.obs_out_label(q, lab)
            for e, p2 in pairs:
                for e2, q2 in right_moves:
                    moves.append(((e, e2), (p2, q2)))
        for e, p2 in a.uo_out(p):
            moves.append(((e, None), (p2, q)))
        for e2, q2 in b.uo_out(q):
            moves.append(((None, e2), (p, q2)))
        for pair, target in moves:
            transitions.append((state, pair, target))
            if target not in discovered:
                discovered[target] = None
                parents[target] = (state, pair)
                queue.append(target)

    return ProductAutomaton(
        a, b, tuple(discovered), events, label_of, transitions, initial,
        a.outputs, parents,
    )


def self_composition(a: Lfsa) -> ProductAutomaton:
    """Product of a model with itself: collects every pair of its runs that
    produce the same output sequence."""
    return concurrent_composition(a, a)


@dataclass(frozen=True)
class ProductReach:
    """Result of a seeded product exploration: minimal observable depth per
    reached state, plus discovery parents for run reconstruction."""

    depths: dict
    parents: dict

    def items(self):
        return self.depths.items()

    def __contains__(self, state):
        return state in self.depths

    def __len__(self):
        return len(self.depths)

    def run_to(self, state) -> tuple:
        """Product transitions of the discovery run from a seed to ``state``."""
        steps = []
        node = state
        while True:
            parent = self.parents.get(node)
            if parent is None:
                break
            prev, pair = parent
            steps.append((prev, pair, node))
            node = prev
        return tuple(reversed(steps))


def seeded_product_reach(
    plant: Lfsa,
    det: Lfsa,
    seed: tuple,
    max_observable_depth: int | None = None,
) -> ProductReach:
    """Breadth-first closure of the asymmetric product of a label-renamed
    plant with a deterministic lifted estimate automaton, from one seed.

    Label moves advance both sides and cost one unit of depth; unobservable
    plant moves advance the left side only, at unchanged depth.  The seed is
    included at depth 0.  Exploration stops beyond ``max_observable_depth``.
    """
    return multi_seeded_product_reach(plant, det, [seed], max_observable_depth)


def multi_seeded_product_reach(
    plant: Lfsa,
    det: Lfsa,
    seeds: Iterable[tuple],
    max_observable_depth: int | None = None,
) -> ProductReach:
    """Same as :func:`seeded_product_reach` with several depth-0 seeds."""
    depths: dict = {}
    parents: dict = {}
    frontier: list = []
    for seed in seeds:
        if seed not in parents:
            parents[seed] = None
            frontier.append(seed)

    depth = 0
    while frontier:
        layer: list = []
        queue = deque(frontier)
        while queue:
            state = queue.popleft()
            if state in depths:
                continue
            depths[state] = depth
            layer.append(state)
            p, x = state
            for e, p2 in plant.uo_out(p):
                target = (p2, x)
                if target not in depths:
                    parents.setdefault(target, (state, (e, None)))
                    queue.append(target)
        if max_observable_depth is not None and depth >= max_observable_depth:
            break
        next_frontier: list = []
        for state in layer:
            p, x = state
            for lab, pairs in plant.obs_out(p).items():
                det_moves = det.obs_out_label(x, lab)
                if not det_moves:
                    raise ValueError(
                        f"right operand is not total over label {lab!r}"
                    )
                (det_event, y), = det_moves
                for e, p2 in pairs:
                    target = (p2, y)
                    if target not in depths:
                        parents.setdefault(target, (state, (e, det_event)))
                        next_frontier.append(target)
        frontier = next_frontier
        depth += 1
    return ProductReach(depths, parents)


def product_run_observation(left_model: Lfsa, product_run: Iterable) -> tuple:
    """Output sequence of a product run: the labels of its left-projection
    events (equal to the right projection's labels by construction)."""
    symbols = []
    for _src, (left, _right), _dst in product_run:
        if left is not None:
            lab = left_model.label(left)
            if lab is not None:
                symbols.append(lab)
    return tuple(symbols)
