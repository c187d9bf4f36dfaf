"""Graphviz export for models, estimate automata and products.

Node names follow the canonical renderings used everywhere else (pair states
as ``(l,r)``, estimates as set literals, the empty estimate as ``∅``); edge
captions show the event with its output symbol, the usual way these automata
are drawn.
"""

from __future__ import annotations

from .automaton import Lfsa, render_event, render_state
from .derivations import ObserverAutomaton
from .legacy import TaggedProduct


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _edge_caption(model: Lfsa, event) -> str:
    if isinstance(event, tuple):
        return render_event(event)
    label = model.label(event)
    return f"{event}({label if label is not None else 'ε'})"


def export_dot(obj) -> str:
    """DOT digraph text for a model, estimate automaton or tagged product."""
    if isinstance(obj, TaggedProduct):
        return _automaton_dot(obj.automaton)
    if isinstance(obj, ObserverAutomaton):
        return _observer_dot(obj)
    if isinstance(obj, Lfsa):
        return _automaton_dot(obj)
    raise TypeError(f"cannot export {type(obj).__name__} to DOT")


def _automaton_dot(model: Lfsa) -> str:
    lines = ["digraph {", "  rankdir=LR;", "  node [shape=circle];"]
    for q in model.states:
        lines.append(f"  {_quote(render_state(q))};")
    for i, q in enumerate(model.initial):
        marker = f"__initial_{i}"
        lines.append(f'  {_quote(marker)} [shape=point, label=""];')
        lines.append(f"  {_quote(marker)} -> {_quote(render_state(q))};")
    for src, e, dst in model.transitions:
        lines.append(
            f"  {_quote(render_state(src))} -> {_quote(render_state(dst))} "
            f"[label={_quote(_edge_caption(model, e))}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _observer_dot(obs: ObserverAutomaton) -> str:
    lines = ["digraph {", "  rankdir=LR;", "  node [shape=ellipse];"]
    for x in obs.obs_states:
        lines.append(f"  {_quote(x.render())};")
    lines.append(f'  {_quote("__initial_0")} [shape=point, label=""];')
    lines.append(f"  {_quote('__initial_0')} -> {_quote(obs.obs_initial.render())};")
    for x in obs.obs_states:
        for symbol in obs.alphabet:
            y = obs.obs_delta[(x, symbol)]
            lines.append(
                f"  {_quote(x.render())} -> {_quote(y.render())} "
                f"[label={_quote(symbol)}];"
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
