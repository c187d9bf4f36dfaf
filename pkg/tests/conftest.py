import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from desv.automaton import FaultSpec, SecretSpec, validate


def inscope_model(seed, live=False, divergence_free=False):
    """Random model in the restricted class the legacy diagnosability methods
    support: observable events labeled by themselves, one initial state, and
    the single unobservable fault event ``f``."""
    from desv.oracle import _unobservable_cycle_transition

    rng = random.Random(seed)
    n = rng.randint(2, 6)
    states = [f"x{i}" for i in range(n)]
    obs = ["a", "b"][: rng.randint(1, 2)]
    unobs = ["f"] + (["u"] if rng.random() < 0.7 else [])
    events = obs + unobs
    labels = {e: e for e in obs} | {e: None for e in unobs}
    transitions = set()
    for _ in range(rng.randint(n, 3 * n)):
        transitions.add((rng.choice(states), rng.choice(events), rng.choice(states)))
    for _ in range(80):
        changed = False
        if divergence_free:
            offender = _unobservable_cycle_transition(
                states, sorted(transitions), states, labels
            )
            if offender is not None:
                transitions.discard(offender)
                changed = True
        if live:
            sources = {t[0] for t in transitions}
            for q in states:
                if q not in sources:
                    transitions.add((q, rng.choice(obs), rng.choice(states)))
                    changed = True
        if not changed:
            break
    return validate(
        states, events, labels, sorted(transitions), [states[0]], outputs=obs
    )


@pytest.fixture
def s1():
    # deterministic, q1 not live
    return validate(
        states=["q0", "q1"],
        events=["e1", "e2"],
        labels={"e1": "a", "e2": "b"},
        transitions=[("q0", "e1", "q0"), ("q0", "e2", "q1")],
        initial=["q0"],
    )


@pytest.fixture
def s2():
    return validate(
        states=["q0", "q1", "q2"],
        events=["e1", "e2", "e3", "e4", "e5"],
        labels={"e1": "a", "e2": None, "e3": "b", "e4": "b", "e5": "b"},
        transitions=[
            ("q0", "e1", "q0"),
            ("q0", "e2", "q0"),
            ("q0", "e3", "q1"),
            ("q0", "e4", "q2"),
            ("q1", "e5", "q1"),
        ],
        initial=["q0"],
    )


@pytest.fixture
def s3():
    return validate(
        states=["q0", "q1", "q2", "q3", "q4", "q5"],
        events=["e1", "e2", "f", "u"],
        labels={"e1": "a", "e2": "b", "f": None, "u": None},
        transitions=[
            ("q0", "e1", "q1"),
            ("q0", "e1", "q2"),
            ("q1", "e2", "q3"),
            ("q2", "e2", "q4"),
            ("q3", "f", "q5"),
            ("q5", "u", "q5"),
            ("q4", "u", "q4"),
        ],
        initial=["q0"],
    )


@pytest.fixture
def s3_faults():
    return FaultSpec.of(["f"])


@pytest.fixture
def s4():
    return validate(
        states=["q1", "q2", "q3", "q4"],
        events=["a"],
        labels={"a": "a"},
        transitions=[("q1", "a", "q2"), ("q3", "a", "q4")],
        initial=["q1", "q3"],
    )


@pytest.fixture
def s4_secrets():
    return SecretSpec.of(["q2", "q3"])


@pytest.fixture
def s5():
    return validate(
        states=["q0", "q1", "q2", "q3", "q4", "q5"],
        events=["a", "u"],
        labels={"a": "a", "u": None},
        transitions=[
            ("q0", "a", "q1"),
            ("q1", "a", "q2"),
            ("q0", "u", "q3"),
            ("q3", "a", "q4"),
            ("q4", "a", "q5"),
        ],
        initial=["q0"],
    )


@pytest.fixture
def s5_secrets():
    return SecretSpec.of(["q1", "q3"])


@pytest.fixture
def s6():
    return validate(
        states=["x0", "x1", "x2"],
        events=["f", "u"],
        labels={"f": None, "u": None},
        transitions=[
            ("x0", "f", "x1"),
            ("x0", "u", "x2"),
            ("x1", "u", "x1"),
            ("x2", "u", "x2"),
        ],
        initial=["x0"],
    )


@pytest.fixture
def s7():
    return validate(
        states=["x0", "x1", "x2"],
        events=["f", "u"],
        labels={"f": None, "u": None},
        transitions=[
            ("x0", "f", "x1"),
            ("x0", "u", "x2"),
            ("x2", "u", "x2"),
        ],
        initial=["x0"],
    )
