import random
from fractions import Fraction

import pytest

from typicality.corpus import DLO_FORMULAS
from typicality.dlo import (
    DLOError, ParamConfig, classify_property_dlo, dichotomy, eliminate_quantifiers, evaluate_q,
    parse_order_formula, random_embedding, type_extension, type_space, typical_elements_dlo,
)
from typicality.enumeration import enumerate_meanings


def cfg_of(params):
    return ParamConfig(tuple(params))


def qe(text, params=()):
    cfg = cfg_of(params)
    return eliminate_quantifiers(parse_order_formula(text, cfg), cfg).render()


def test_qe_examples():
    assert qe("exists y (lt(a1, y) & lt(y, x))", ["a1"]) == "lt(a1, x)"
    assert qe("exists y lt(y, x)") == "true"
    assert qe("x = x") == "true"
    assert qe("lt(x, x)") == "false"


def test_classify_examples():
    cfg = cfg_of(["a1"])
    c = classify_property_dlo(parse_order_formula("x != a1", cfg), cfg)
    assert c.typical and c.extension.to_list() == ["(-inf,a1)", "(a1,+inf)"]
    c = classify_property_dlo(parse_order_formula("lt(x, a1)", cfg), cfg)
    assert not c.typical and c.extension.to_list() == ["(-inf,a1)"]
    c = classify_property_dlo(parse_order_formula("exists y lt(x, y)", cfg), cfg)
    assert c.typical and c.extension.to_list() == ["(-inf,+inf)"]


def test_typical_elements_examples():
    assert typical_elements_dlo(ParamConfig.parse("a1<a2")).to_list() == [
        "(-inf,a1)", "(a1,a2)", "(a2,+inf)"]
    assert typical_elements_dlo(ParamConfig.parse("")).to_list() == ["(-inf,+inf)"]
    assert typical_elements_dlo(ParamConfig.parse("a1")).to_list() == ["(-inf,a1)", "(a1,+inf)"]


def test_dichotomy_examples():
    cfg = ParamConfig()
    assert dichotomy(parse_order_formula("exists y lt(y, x)", cfg))[0] == "phi"
    assert dichotomy(parse_order_formula("lt(x, x)", cfg))[0] == "not phi"
    assert dichotomy(parse_order_formula("forall y (lt(x, y) | x = y | lt(y, x))", cfg))[0] == "phi"
    with pytest.raises(DLOError):
        dichotomy(parse_order_formula("x != a1", cfg_of(["a1"])))


def test_rejects_foreign_symbols():
    with pytest.raises(Exception):
        parse_order_formula("E(x, y)", ParamConfig())


@pytest.mark.parametrize("text,params", DLO_FORMULAS)
def test_qe_agrees_with_evaluation_on_random_embeddings(text, params):
    cfg = cfg_of(params)
    phi = parse_order_formula(text, cfg)
    qf = eliminate_quantifiers(phi, cfg)
    rng = random.Random(text)
    for _ in range(100):
        values, pts = random_embedding(cfg, rng)
        probes = set(pts) | {(a + b) / 2 for a, b in zip(pts, pts[1:])} | {pts[0] - 1, pts[-1] + 1}
        for x in probes:
            env = {**values, "x": x}
            assert qf.evaluate(env) == evaluate_q(phi, env), (text, env)


@pytest.mark.parametrize("text,params", DLO_FORMULAS)
def test_majority_equals_frechet(text, params):
    cfg = cfg_of(params)
    phi = parse_order_formula(text, cfg)
    a = classify_property_dlo(phi, cfg, "majority")
    b = classify_property_dlo(phi, cfg, "frechet")
    assert a.typical == b.typical and a.extension == b.extension


@pytest.mark.parametrize("k", [0, 1, 2])
def test_qe_agrees_with_type_space_semantics(k):
    cfg = cfg_of([f"a{i + 1}" for i in range(k)])
    space, types = type_space(cfg)
    enum = enumerate_meanings(space, 7)
    for mask, phi in enum.best.items():
        if space.depends_only_on(mask, ("x",)):
            assert classify_property_dlo(phi, cfg).extension.cells == type_extension(mask, types)


def test_typical_element_consistency():
    # an element is typical iff it avoids every finite definable set, i.e. every a_i
    cfg = ParamConfig.parse("a1<a2<a3")
    typ = typical_elements_dlo(cfg)
    assert typ.complement().cardinality() == 3
    assert typ.cells == frozenset(c for c in cfg.cells() if c % 2 == 0)


def test_evaluate_q_exact_rationals():
    cfg = cfg_of(["a1", "a2"])
    phi = parse_order_formula("exists y (lt(a1, y) & lt(y, a2) & x = y)", cfg)
    env = {"a1": Fraction(0), "a2": Fraction(1, 1000)}
    assert evaluate_q(phi, {**env, "x": Fraction(1, 2000)})
    assert not evaluate_q(phi, {**env, "x": Fraction(0)})
