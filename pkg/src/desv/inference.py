"""Decision procedures for the inference properties.

Strong detectability (finite and infinite-run flavors), diagnosability and
predictability are all decided on synchronized products: a property fails
exactly when the product contains a run of a particular shape, and every
negative verdict carries that run as a checkable witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .automaton import (
    FaultSpec,
    Lfsa,
    can_reach_cycle,
    coreachable,
    cycle_states,
    cycle_through,
    render_event,
    render_state,
    scc_partition,
    shortest_path,
)
from .composition import (
    concurrent_composition,
    product_run_observation,
    self_composition,
)
from .derivations import faulty_subautomaton, normal_subautomaton

STAR_SD = "star-sd"
OMEGA_SD = "omega-sd"
DIAGNOSABILITY = "diag"
PREDICTABILITY = "pred"


@dataclass(frozen=True)
class InferenceWitness:
    """Product run certifying a property violation.

    ``prefix``/``cycle``/``tail`` are lists of product transitions; their
    concatenation order depends on the property (the pumpable cycle sits at
    the violation point for detectability, at the run's end for
    diagnosability).  ``k_used`` is the delay bound the witness is checked
    against when the cycle is pumped.
    """

    property: str
    k_used: int
    prefix: tuple = ()
    cycle: tuple = ()
    tail: tuple = ()
    anchor: tuple | None = None
    fault_step: tuple | None = None
    fault_transition: tuple | None = None
    plant_path: tuple = ()
    plant_cycle: tuple = ()
    observation: tuple = ()

    def product_run(self) -> tuple:
        if self.property == DIAGNOSABILITY:
            fault = (self.fault_step,) if self.fault_step else ()
            return self.prefix + fault + self.tail + self.cycle
        if self.property == PREDICTABILITY:
            return self.prefix
        return self.prefix + self.cycle + self.tail

    def to_document(self) -> dict:
        def run_doc(steps):
            return [
                {
                    "from": render_state(src),
                    "event": render_event(pair),
                    "to": render_state(dst),
                }
                for src, pair, dst in steps
            ]

        run = self.product_run()
        doc = {
            "property": self.property,
            "pump_count": self.k_used,
            "run": run_doc(run),
            "cycle": run_doc(self.cycle),
            "left_projection": [
                render_event(pair[0]) for _s, pair, _t in run if pair[0] is not None
            ],
            "right_projection": [
                render_event(pair[1]) for _s, pair, _t in run if pair[1] is not None
            ],
            "observation": list(self.observation),
        }
        if self.fault_step is not None:
            src, pair, dst = self.fault_step
            doc["fault_step"] = {
                "from": render_state(src),
                "event": render_event(pair),
                "to": render_state(dst),
            }
        if self.fault_transition is not None:
            src, e, dst = self.fault_transition
            doc["fault_transition"] = {"from": src, "event": e, "to": dst}
        if self.plant_path or self.plant_cycle:
            doc["continuation_path"] = run_doc(self.plant_path)
            doc["continuation_cycle"] = run_doc(self.plant_cycle)
        return doc


@dataclass(frozen=True)
class InferenceVerdict:
    property: str
    holds: bool
    witness: InferenceWitness | None = None
    stats: dict = field(default_factory=dict)


def _pump_bound(model: Lfsa) -> int:
    return max(1, len(model.states) ** 2)


def check_strong_detectability(model: Lfsa, variant: str = "star") -> InferenceVerdict:
    """A model is strongly detectable when every long enough observation pins
    the current state down to a singleton; the check looks for a product run
    through an output-producing cycle that ends in a mismatched state pair.
    The ``omega`` flavor also demands an infinite continuation of the run's
    left side."""
    if variant not in ("star", "omega"):
        raise ValueError(f"unknown detectability variant {variant!r}")
    prop = STAR_SD if variant == "star" else OMEGA_SD
    product = self_composition(model)
    stats = {"product_states": len(product.states)}

    pump: set = set()
    comp_of: dict = {}
    for comp in scc_partition(product):
        for q in comp.states:
            comp_of[q] = comp
        if comp.has_observable_cycle_edge:
            pump.update(comp.states)

    mismatched = [p for p in product.states if p[0] != p[1]]
    if variant == "omega":
        mismatched = [p for p in mismatched if can_reach_cycle(model, p[0])]
    mismatch_reachers = set(coreachable(product, mismatched, reflexive=True))

    anchor = None
    for state in product.states:
        if state in pump and state in mismatch_reachers:
            anchor = state
            break
    if anchor is None:
        return InferenceVerdict(prop, True, None, stats)

    observable = lambda tr: product.label(tr[1]) is not None
    cycle = cycle_through(product, anchor, comp_of[anchor].states, observable)
    prefix = shortest_path(product, product.initial, [anchor])
    tail = shortest_path(product, [anchor], mismatched)
    plant_path: tuple = ()
    plant_cycle: tuple = ()
    if variant == "omega":
        end = tail[-1][2] if tail else anchor
        left = end[0]
        loops = cycle_states(model)
        plant_path = shortest_path(model, [left], loops)
        loop_anchor = plant_path[-1][2] if plant_path else left
        loop_comp = next(
            c for c in scc_partition(model) if loop_anchor in c.states
        )
        plant_cycle = cycle_through(model, loop_anchor, loop_comp.states)
    witness = InferenceWitness(
        property=prop,
        k_used=_pump_bound(model),
        prefix=prefix,
        cycle=cycle,
        tail=tail,
        plant_path=plant_path,
        plant_cycle=plant_cycle,
        observation=product_run_observation(model, prefix + cycle + tail),
    )
    return InferenceVerdict(prop, False, witness, stats)


def check_diagnosability(model: Lfsa, faults: FaultSpec) -> InferenceVerdict:
    """A model is diagnosable when every fault occurrence eventually becomes
    certain from the observation alone.  The check pairs the fault-related
    part with the fault-free part and looks for a faulty step that can still
    be continued forever on its left side while the right side keeps up."""
    fault_set = set(faults.faulty)
    sf = faulty_subautomaton(model, faults)
    sn = normal_subautomaton(model, faults)
    product = concurrent_composition(sf.automaton, sn.automaton)
    stats = {
        "product_states": len(product.states),
        "faulty_part_states": len(sf.automaton.states),
        "normal_part_states": len(sn.automaton.states),
    }

    left_active: set = set()
    comp_of: dict = {}
    for comp in scc_partition(product):
        comp_set = set(comp.states)
        active = False
        for q in comp.states:
            comp_of[q] = comp
            for pair, dst in product.out(q):
                if dst in comp_set and pair[0] is not None:
                    active = True
        if active:
            left_active.update(comp.states)

    pump_reachers = set(coreachable(product, left_active, reflexive=True))
    fault_step = None
    for tr in product.transitions:
        if tr[1][0] in fault_set and tr[2] in pump_reachers:
            fault_step = tr
            break
    if fault_step is None:
        return InferenceVerdict(DIAGNOSABILITY, True, None, stats)

    prefix = shortest_path(product, product.initial, [fault_step[0]])
    tail = shortest_path(product, [fault_step[2]], left_active)
    pump_anchor = tail[-1][2] if tail else fault_step[2]
    left_active_edge = lambda tr: tr[1][0] is not None
    cycle = cycle_through(
        product, pump_anchor, comp_of[pump_anchor].states, left_active_edge
    )
    witness = InferenceWitness(
        property=DIAGNOSABILITY,
        k_used=_pump_bound(model),
        prefix=prefix,
        cycle=cycle,
        tail=tail,
        fault_step=fault_step,
        observation=product_run_observation(
            model, prefix + (fault_step,) + tail + cycle
        ),
    )
    return InferenceVerdict(DIAGNOSABILITY, False, witness, stats)


def check_predictability(model: Lfsa, faults: FaultSpec) -> InferenceVerdict:
    """A model is predictable when every fault can be announced with certainty
    strictly before it happens.  The check pairs the fault-free part with
    itself and looks for a state pair whose left side can fault right now
    while its right side can still run forever fault-free."""
    fault_set = set(faults.faulty)
    sn = normal_subautomaton(model, faults)
    product = self_composition(sn.automaton)
    stats = {
        "product_states": len(product.states),
        "normal_part_states": len(sn.automaton.states),
    }

    fault_sources = {src for src, e, _dst in model.transitions if e in fault_set}
    anchor = None
    for state in product.states:
        if state[0] in fault_sources and can_reach_cycle(sn.automaton, state[1]):
            anchor = state
            break
    if anchor is None:
        return InferenceVerdict(PREDICTABILITY, True, None, stats)

    prefix = shortest_path(product, product.initial, [anchor])
    fault_transition = next(
        tr for tr in model.transitions if tr[0] == anchor[0] and tr[1] in fault_set
    )
    plant_path = shortest_path(sn.automaton, [anchor[1]], cycle_states(sn.automaton))
    loop_anchor = plant_path[-1][2] if plant_path else anchor[1]
    loop_comp = next(
        c for c in scc_partition(sn.automaton) if loop_anchor in c.states
    )
    plant_cycle = cycle_through(sn.automaton, loop_anchor, loop_comp.states)
    witness = InferenceWitness(
        property=PREDICTABILITY,
        k_used=_pump_bound(model),
        prefix=prefix,
        anchor=anchor,
        fault_transition=fault_transition,
        plant_path=plant_path,
        plant_cycle=plant_cycle,
        observation=product_run_observation(model, prefix),
    )
    return InferenceVerdict(PREDICTABILITY, False, witness, stats)
