import itertools

import pytest

from desv.automaton import validate
from desv.composition import (
    AlphabetMismatchError,
    concurrent_composition,
    multi_seeded_product_reach,
    seeded_product_reach,
    self_composition,
)
from desv.derivations import (
    build_observer,
    epsilonize,
    faulty_subautomaton,
    lift_observer,
    normal_subautomaton,
)


def bounded_runs(model, bound):
    """All runs (event tuples) of length <= bound, with their end states."""
    runs = [((), q) for q in model.initial]
    out = list(runs)
    for _ in range(bound):
        nxt = []
        for run, q in runs:
            for e, dst in model.out(q):
                nxt.append((run + (e,), dst))
        out.extend(nxt)
        runs = nxt
    return out


def labels_of(model, run):
    return tuple(model.label(e) for e in run if model.label(e) is not None)


class TestSelfComposition:
    def test_s2_matches_figure(self, s2):
        prod = self_composition(s2)
        expected_states = {
            ("q0", "q0"),
            ("q1", "q2"),
            ("q2", "q1"),
            ("q1", "q1"),
            ("q2", "q2"),
        }
        assert set(prod.states) == expected_states
        expected_transitions = {
            (("q0", "q0"), ("e1", "e1"), ("q0", "q0")),
            (("q0", "q0"), ("e2", None), ("q0", "q0")),
            (("q0", "q0"), (None, "e2"), ("q0", "q0")),
            (("q0", "q0"), ("e3", "e4"), ("q1", "q2")),
            (("q0", "q0"), ("e3", "e3"), ("q1", "q1")),
            (("q0", "q0"), ("e4", "e3"), ("q2", "q1")),
            (("q0", "q0"), ("e4", "e4"), ("q2", "q2")),
            (("q1", "q1"), ("e5", "e5"), ("q1", "q1")),
        }
        assert set(prod.transitions) == expected_transitions

    def test_deterministic_injective_model_stays_diagonal(self, s1):
        prod = self_composition(s1)
        assert all(left == right for left, right in prod.states)

    def test_unobservable_only_interleavings(self, s6):
        prod = self_composition(s6)
        assert all(
            left is None or right is None for _s, (left, right), _t in prod.transitions
        )

    def test_alphabet_mismatch_rejected(self, s1):
        other = validate(
            states=["p"],
            events=["e"],
            labels={"e": "z"},
            transitions=[],
            initial=["p"],
        )
        with pytest.raises(AlphabetMismatchError):
            concurrent_composition(s1, other)

    def test_single_state_operands(self):
        single = validate(
            states=["p"], events=[], labels={}, transitions=[], initial=["p"]
        )
        prod = concurrent_composition(single, single)
        assert prod.states == (("p", "p"),)
        assert prod.transitions == ()


class TestFaultNormalComposition:
    def test_s3_contains_figure_fragment(self, s3, s3_faults):
        sf = faulty_subautomaton(s3, s3_faults).automaton
        sn = normal_subautomaton(s3, s3_faults).automaton
        prod = concurrent_composition(sf, sn)
        fragment = {
            (("q0", "q0"), ("e1", "e1"), ("q1", "q2")),
            (("q1", "q2"), ("e2", "e2"), ("q3", "q4")),
            (("q3", "q4"), (None, "u"), ("q3", "q4")),
            (("q3", "q4"), ("f", None), ("q5", "q4")),
            (("q5", "q4"), (None, "u"), ("q5", "q4")),
            (("q5", "q4"), ("u", None), ("q5", "q4")),
        }
        assert fragment <= set(prod.transitions)

    def test_size_bound(self, s3, s3_faults):
        sf = faulty_subautomaton(s3, s3_faults).automaton
        sn = normal_subautomaton(s3, s3_faults).automaton
        prod = concurrent_composition(sf, sn)
        assert len(prod.states) <= len(sf.states) * len(sn.states)


class TestProjectionSoundnessCompleteness:
    @pytest.mark.parametrize("fixture", ["s2", "s3", "s5"])
    def test_projections_are_runs_with_equal_labels(self, fixture, request):
        model = request.getfixturevalue(fixture)
        prod = self_composition(model)
        # walk all product runs of bounded length, checking both projections
        frontier = [((), s) for s in prod.initial]
        for _ in range(4):
            nxt = []
            for run, state in frontier:
                for pair, dst in prod.out(state):
                    nxt.append((run + ((state, pair, dst),), dst))
            for run, state in nxt:
                left_run = [e for _s, (e, _e2), _t in run if e is not None]
                right_run = [e2 for _s, (_e, e2), _t in run if e2 is not None]
                left_states = set(model.initial)
                for e in left_run:
                    left_states = {
                        t for q in left_states for ev, t in model.out(q) if ev == e
                    }
                    assert left_states
                assert labels_of(model, left_run) == labels_of(model, right_run)
            frontier = nxt

    @pytest.mark.parametrize("fixture", ["s2", "s5"])
    def test_label_matched_run_pairs_embed(self, fixture, request):
        model = request.getfixturevalue(fixture)
        prod = self_composition(model)
        prod_pairs = set()
        frontier = [((), s) for s in prod.initial]
        for _ in range(8):
            nxt = []
            for run, state in frontier:
                for pair, dst in prod.out(state):
                    nxt.append((run + (pair,), dst))
            prod_pairs.update(
                (
                    tuple(e for e, _ in run if e is not None),
                    tuple(e2 for _, e2 in run if e2 is not None),
                    state,
                )
                for run, state in nxt
            )
            frontier = nxt
        runs = bounded_runs(model, 4)
        for (run_a, end_a), (run_b, end_b) in itertools.product(runs, repeat=2):
            if labels_of(model, run_a) == labels_of(model, run_b):
                if not run_a and not run_b:
                    continue
                assert (run_a, run_b, (end_a, end_b)) in prod_pairs


class TestSeededReach:
    def test_s2_seed_q1_q2(self, s2):
        plant = epsilonize(s2)
        det = lift_observer(build_observer(s2, extra_roots=[s2.state_set(["q2"])]))
        seed = ("q1", s2.state_set(["q2"]))
        reach = seeded_product_reach(plant, det, seed)
        rendered = {(p, tuple(x)): d for (p, x), d in reach.items()}
        assert rendered == {("q1", ("q2",)): 0, ("q1", ()): 1}

    def test_dead_left_state(self, s2):
        plant = epsilonize(s2)
        det = lift_observer(build_observer(s2, extra_roots=[s2.state_set(["q1"])]))
        seed = ("q2", s2.state_set(["q1"]))
        reach = seeded_product_reach(plant, det, seed)
        assert dict(reach.items()) == {seed: 0}

    def test_s5_seed_chain(self, s5):
        plant = epsilonize(s5)
        det = lift_observer(build_observer(s5, extra_roots=[s5.state_set(["q0"])]))
        seed = ("q3", s5.state_set(["q0"]))
        reach = seeded_product_reach(plant, det, seed)
        rendered = {(p, tuple(x)): d for (p, x), d in reach.items()}
        assert rendered == {
            ("q3", ("q0",)): 0,
            ("q4", ("q1",)): 1,
            ("q5", ("q2",)): 2,
        }

    def test_depth_cap_truncates(self, s5):
        plant = epsilonize(s5)
        det = lift_observer(build_observer(s5, extra_roots=[s5.state_set(["q0"])]))
        seed = ("q3", s5.state_set(["q0"]))
        reach = seeded_product_reach(plant, det, seed, max_observable_depth=1)
        assert max(reach.depths.values()) == 1

    def test_depth_is_min_observable_distance(self, s2):
        # epsilon-hat loops must not inflate depth accounting
        plant = epsilonize(s2)
        obs = build_observer(s2)
        det = lift_observer(obs)
        seed = ("q0", obs.obs_initial)
        reach = seeded_product_reach(plant, det, seed, max_observable_depth=3)
        depths = {(p, tuple(x)): d for (p, x), d in reach.items()}
        assert depths[("q0", ("q0",))] == 0
        assert depths[("q1", ("q1", "q2"))] == 1
        assert depths[("q1", ("q1",))] == 2

    def test_multi_seed_minimum(self, s5):
        plant = epsilonize(s5)
        roots = [s5.state_set(["q0"]), s5.state_set(["q4"])]
        det = lift_observer(build_observer(s5, extra_roots=roots))
        reach = multi_seeded_product_reach(
            plant, det, [("q3", roots[0]), ("q4", roots[1])]
        )
        assert reach.depths[("q4", roots[1])] == 0

    def test_run_reconstruction(self, s5):
        plant = epsilonize(s5)
        det = lift_observer(build_observer(s5, extra_roots=[s5.state_set(["q0"])]))
        seed = ("q3", s5.state_set(["q0"]))
        reach = seeded_product_reach(plant, det, seed)
        target = ("q5", s5.state_set(["q2"]))
        run = reach.run_to(target)
        assert [src for src, _e, _t in run] == [seed, ("q4", s5.state_set(["q1"]))]
        assert run[-1][2] == target
