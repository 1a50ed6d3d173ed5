import pytest
from hypothesis import given, settings

from typicality.syntax import (
    And, Eq, FormulaSyntaxError, Iff, Not, Param, Quant, Rel, Signature, Var,
    distinctness_formula, free_variables, parameters, parse_formula, render_formula, size,
)

from conftest import PARAMS, SIG, formulas

GRAPH = Signature(relations={"E": 2, "P": 1})


def test_distinctness_shape_parses():
    phi = parse_formula("(x != a1) & (x != a2)", GRAPH, ["a1", "a2"])
    assert phi == And(Not(Eq(Var("x"), Param("a1"))), Not(Eq(Var("x"), Param("a2"))))


def test_definability_schema_parses():
    phi = parse_formula("forall x (x = b <-> P(x))", GRAPH, ["b"])
    assert phi == Quant("forall", "x", Iff(Eq(Var("x"), Param("b")), Rel("P", (Var("x"),))))


def test_arity_mismatch_reports_position():
    with pytest.raises(FormulaSyntaxError) as err:
        parse_formula("E(x, y, z)", GRAPH)
    assert err.value.position is not None
    assert "expects 2 arguments" in str(err.value)


@pytest.mark.parametrize("text", ["E(x", "x = ", "forall (x)", "& P(x)", "P(x) P(y)", "Z(x)"])
def test_malformed_input_rejected(text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text, GRAPH)


def test_render_examples():
    phi = parse_formula("x != a1", GRAPH, ["a1"])
    assert render_formula(phi) in ("!(x = a1)", "(x != a1)", "x != a1")
    assert render_formula(parse_formula("Qmost x P(x)", GRAPH)).startswith("Qmost x (")
    nested = parse_formula("forall x exists y (E(x, y) & P(y))", GRAPH)
    assert render_formula(nested) == "forall x (exists y ((E(x, y) & P(y))))"


def test_binary_connectives_associate_left():
    phi = parse_formula("P(x) & P(y) & P(z)", GRAPH)
    assert isinstance(phi.left, And)


def test_distinctness_formula():
    assert render_formula(distinctness_formula(["a1"])) == "x != a1"
    assert render_formula(distinctness_formula(["a1", "a2"])) == "(x != a1 & x != a2)"
    with pytest.raises(ValueError):
        distinctness_formula([])
    with pytest.raises(ValueError):
        distinctness_formula(["a1", "a1"])


def test_free_variables_and_parameters():
    phi = parse_formula("x != a1", GRAPH, ["a1"])
    assert free_variables(phi) == {"x"} and parameters(phi) == {"a1"}
    assert free_variables(parse_formula("forall x E(x, y)", GRAPH)) == {"y"}
    assert free_variables(parse_formula("forall x exists y E(x, y)", GRAPH)) == frozenset()


def test_size_counts_nodes():
    assert size(parse_formula("P(x)", GRAPH)) == 1
    assert size(parse_formula("exists y (E(x, y) & !P(y))", GRAPH)) == 5


def test_signature_validation():
    with pytest.raises(ValueError):
        Signature(relations={"E": 2}, functions={"E": 1})
    with pytest.raises(ValueError):
        Signature(relations={"forall": 1})


@settings(max_examples=300, deadline=None)
@given(formulas)
def test_parse_render_round_trip(phi):
    assert parse_formula(render_formula(phi), SIG, PARAMS) == phi
