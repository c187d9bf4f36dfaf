"""The JSON model document: the one on-disk format for annotated models.

A document carries the automaton plus its fault and secret annotations:

    {
      "format_version": "1",
      "states":      [{"id": "q0", "initial": true, "secret": false}, ...],
      "events":      [{"id": "e1", "label": "a", "faulty": false}, ...],
      "transitions": [{"from": "q0", "event": "e1", "to": "q1"}, ...]
    }

A ``null`` label marks an unobservable event.  Parsing is strict by default:
unknown fields are rejected so typos cannot silently change a model.
Serialization is canonical, so parse/serialize round-trips are stable byte
for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .automaton import FaultSpec, Lfsa, SecretSpec, validate

FORMAT_VERSION = "1"


class ModelDocumentError(ValueError):
    pass


class ModelSyntaxError(ModelDocumentError):
    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class ModelFormatError(ModelDocumentError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class ParsedModel:
    model: Lfsa
    faults: FaultSpec
    secrets: SecretSpec


def parse_model(text: str, strict: bool = True) -> ParsedModel:
    """Parse and validate a model document from JSON text.

    Syntax problems carry the line and column; structural problems carry the
    JSON path of the offending element; model-level problems (undeclared
    states, label clashes) are reported by the model validator.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ModelSyntaxError(err.lineno, err.colno, err.msg) from None
    return parse_model_data(data, strict=strict)


def _require(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise ModelFormatError(path, message)


def _check_fields(obj: dict, path: str, allowed: dict, strict: bool) -> None:
    for key in obj:
        if strict and key not in allowed:
            raise ModelFormatError(path, f"unknown field {key!r}")
    for key, required in allowed.items():
        if required and key not in obj:
            raise ModelFormatError(path, f"missing field {key!r}")


def parse_model_data(data, strict: bool = True) -> ParsedModel:
    """Same as :func:`parse_model` but starting from decoded JSON data."""
    _require(isinstance(data, dict), "$", "document must be a JSON object")
    _check_fields(
        data,
        "$",
        {"format_version": True, "states": True, "events": True, "transitions": True},
        strict,
    )
    version = data["format_version"]
    _require(
        version == FORMAT_VERSION,
        "$.format_version",
        f"unsupported version {version!r} (expected {FORMAT_VERSION!r})",
    )

    states, initial, secret = [], [], []
    _require(isinstance(data["states"], list), "$.states", "must be a list")
    for i, entry in enumerate(data["states"]):
        path = f"$.states[{i}]"
        _require(isinstance(entry, dict), path, "must be an object")
        _check_fields(entry, path, {"id": True, "initial": False, "secret": False}, strict)
        _require(isinstance(entry["id"], str), path + ".id", "must be a string")
        states.append(entry["id"])
        for flag in ("initial", "secret"):
            value = entry.get(flag, False)
            _require(isinstance(value, bool), f"{path}.{flag}", "must be a boolean")
        if entry.get("initial", False):
            initial.append(entry["id"])
        if entry.get("secret", False):
            secret.append(entry["id"])

    events, labels, faulty = [], {}, []
    _require(isinstance(data["events"], list), "$.events", "must be a list")
    for i, entry in enumerate(data["events"]):
        path = f"$.events[{i}]"
        _require(isinstance(entry, dict), path, "must be an object")
        _check_fields(entry, path, {"id": True, "label": False, "faulty": False}, strict)
        _require(isinstance(entry["id"], str), path + ".id", "must be a string")
        events.append(entry["id"])
        label = entry.get("label")
        _require(
            label is None or isinstance(label, str),
            path + ".label",
            "must be a string or null",
        )
        labels[entry["id"]] = label
        flag = entry.get("faulty", False)
        _require(isinstance(flag, bool), path + ".faulty", "must be a boolean")
        if flag:
            faulty.append(entry["id"])

    transitions = []
    _require(isinstance(data["transitions"], list), "$.transitions", "must be a list")
    for i, entry in enumerate(data["transitions"]):
        path = f"$.transitions[{i}]"
        _require(isinstance(entry, dict), path, "must be an object")
        _check_fields(entry, path, {"from": True, "event": True, "to": True}, strict)
        for key in ("from", "event", "to"):
            _require(isinstance(entry[key], str), f"{path}.{key}", "must be a string")
        transitions.append((entry["from"], entry["event"], entry["to"]))

    model = validate(states, events, labels, transitions, initial)
    return ParsedModel(model, FaultSpec.of(faulty), SecretSpec.of(secret))


def model_document(model: Lfsa, faults: FaultSpec, secrets: SecretSpec) -> dict:
    """Canonical document for a model with its annotations."""
    fault_set = set(faults.faulty)
    secret_set = set(secrets.secret)
    initial_set = set(model.initial)
    return {
        "format_version": FORMAT_VERSION,
        "states": [
            {"id": q, "initial": q in initial_set, "secret": q in secret_set}
            for q in model.states
        ],
        "events": [
            {"id": e, "label": model.label(e), "faulty": e in fault_set}
            for e in model.events
        ],
        "transitions": [
            {"from": src, "event": e, "to": dst} for src, e, dst in model.transitions
        ],
    }


def serialize_model(model: Lfsa, faults: FaultSpec, secrets: SecretSpec) -> str:
    return json.dumps(model_document(model, faults, secrets), indent=2, ensure_ascii=False) + "\n"
