"""Model document round-trips plus DOT export with a grammar-level check."""

import json
import re

import pytest

from desv.composition import self_composition
from desv.derivations import build_observer
from desv.dot import export_dot
from desv.legacy import check_diag_generalized_twin_plant
from desv.modeldoc import (
    ModelFormatError,
    ModelSyntaxError,
    parse_model,
    serialize_model,
)

S3_DOCUMENT = {
    "format_version": "1",
    "states": [
        {"id": "q0", "initial": True},
        {"id": "q1"},
        {"id": "q2"},
        {"id": "q3"},
        {"id": "q4"},
        {"id": "q5"},
    ],
    "events": [
        {"id": "e1", "label": "a"},
        {"id": "e2", "label": "b"},
        {"id": "f", "label": None, "faulty": True},
        {"id": "u", "label": None},
    ],
    "transitions": [
        {"from": "q0", "event": "e1", "to": "q1"},
        {"from": "q0", "event": "e1", "to": "q2"},
        {"from": "q1", "event": "e2", "to": "q3"},
        {"from": "q2", "event": "e2", "to": "q4"},
        {"from": "q3", "event": "f", "to": "q5"},
        {"from": "q5", "event": "u", "to": "q5"},
        {"from": "q4", "event": "u", "to": "q4"},
    ],
}


class TestParse:
    def test_s3_document(self):
        parsed = parse_model(json.dumps(S3_DOCUMENT))
        assert len(parsed.model.transitions) == 7
        assert parsed.faults.faulty == ("f",)
        assert parsed.model.initial == ("q0",)

    def test_syntax_error_position(self):
        with pytest.raises(ModelSyntaxError) as err:
            parse_model('{"format_version": "1",\n  "states": [}')
        assert err.value.line == 2

    def test_undeclared_state_positioned(self):
        doc = dict(S3_DOCUMENT)
        doc["transitions"] = [{"from": "q9", "event": "e1", "to": "q0"}]
        from desv.automaton import InvalidModelError

        with pytest.raises(InvalidModelError) as err:
            parse_model(json.dumps(doc))
        assert "q9" in str(err.value)

    def test_unknown_field_rejected_strict(self):
        doc = json.loads(json.dumps(S3_DOCUMENT))
        doc["states"][0]["color"] = "red"
        with pytest.raises(ModelFormatError) as err:
            parse_model(json.dumps(doc))
        assert "color" in str(err.value)
        parse_model(json.dumps(doc), strict=False)  # lenient mode accepts

    def test_bad_version(self):
        doc = dict(S3_DOCUMENT)
        doc["format_version"] = "99"
        with pytest.raises(ModelFormatError):
            parse_model(json.dumps(doc))

    def test_round_trip_is_canonical(self):
        parsed = parse_model(json.dumps(S3_DOCUMENT))
        text = serialize_model(parsed.model, parsed.faults, parsed.secrets)
        again = parse_model(text)
        assert serialize_model(again.model, again.faults, again.secrets) == text


# -- tiny DOT grammar checker -------------------------------------------------

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<quoted>"(?:[^"\\]|\\.)*")
      | (?P<word>[A-Za-z0-9_.∅{},()ε̂φ\-]+)
      | (?P<punct>[\[\]{};=\->])
    )""",
    re.VERBOSE,
)


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise AssertionError(f"cannot tokenize DOT at {text[pos:pos+20]!r}")
        pos = match.end()
        tokens.append(match.group().strip())
        if pos >= len(text.rstrip()):
            break
    return [t for t in tokens if t]


def assert_valid_dot(text):
    """Structural check: digraph { statements } with node / edge statements
    and well-formed attribute lists."""
    tokens = _tokenize(text)
    assert tokens[0] == "digraph"
    idx = 1
    if tokens[idx] != "{":
        idx += 1  # optional graph name
    assert tokens[idx] == "{"
    idx += 1
    depth = 1

    def is_id(token):
        return bool(token) and (token.startswith('"') or token not in "[]{};=->")

    while idx < len(tokens):
        token = tokens[idx]
        if token == "}":
            depth -= 1
            idx += 1
            continue
        assert is_id(token), f"expected an identifier, got {token!r}"
        idx += 1
        # attribute assignment (rankdir=LR) or defaults (node [..])
        if idx < len(tokens) and tokens[idx] == "=":
            assert is_id(tokens[idx + 1])
            idx += 2
        # edges: -> id (chain)
        while idx + 1 < len(tokens) and tokens[idx] == "-" and tokens[idx + 1] == ">":
            idx += 2
            assert is_id(tokens[idx]), "edge target missing"
            idx += 1
        # attribute list
        if idx < len(tokens) and tokens[idx] == "[":
            idx += 1
            while tokens[idx] != "]":
                assert is_id(tokens[idx])
                assert tokens[idx + 1] == "="
                assert is_id(tokens[idx + 2])
                idx += 3
                if tokens[idx] == ",":
                    idx += 1
            idx += 1
        if idx < len(tokens) and tokens[idx] == ";":
            idx += 1
    assert depth == 0, "unbalanced braces"


class TestDot:
    def test_observer_dot_matches_shape(self, s2):
        text = export_dot(build_observer(s2))
        assert_valid_dot(text)
        assert '"{q0}"' in text
        assert '"{q1,q2}"' in text
        assert '"∅"' in text

    def test_plain_model_dot(self, s3, s3_faults):
        text = export_dot(s3)
        assert_valid_dot(text)
        assert '"f(ε)"' in text
        assert '"e1(a)"' in text

    def test_empty_automaton(self):
        from desv.automaton import Lfsa

        empty = Lfsa((), (), {}, (), (), ())
        text = export_dot(empty)
        assert_valid_dot(text)
        assert "->" not in text

    def test_product_dot(self, s2):
        text = export_dot(self_composition(s2))
        assert_valid_dot(text)
        assert '"(q0,q0)"' in text
        assert '"(e3,e4)"' in text
        assert '"(e2,ε)"' in text

    def test_tagged_product_dot(self, s7):
        _verdict, product = check_diag_generalized_twin_plant(s7, "f")
        text = export_dot(product)
        assert_valid_dot(text)
        assert '"(x1,F,x2,N)"' in text
        assert '"(ε,u)"' in text


class TestFigureEdgesInDot:
    def test_fault_normal_product_dot_edges(self, s3, s3_faults):
        from desv.composition import concurrent_composition
        from desv.derivations import faulty_subautomaton, normal_subautomaton

        sf = faulty_subautomaton(s3, s3_faults).automaton
        sn = normal_subautomaton(s3, s3_faults).automaton
        text = export_dot(concurrent_composition(sf, sn))
        assert_valid_dot(text)
        assert '"(q0,q0)" -> "(q1,q2)" [label="(e1,e1)"];' in text
        assert '"(q3,q4)" -> "(q5,q4)" [label="(f,ε)"];' in text
        assert '"(q5,q4)" -> "(q5,q4)" [label="(u,ε)"];' in text
