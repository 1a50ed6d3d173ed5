import itertools

import pytest
from hypothesis import given, settings, strategies as st

from typicality.corpus import structure
from typicality.model import FiniteStructure, StructureError, evaluate, extension, load_structure
from typicality.syntax import (
    And, Eq, Iff, Implies, Not, Or, Param, Quant, Rel, Signature, Var, parse_formula,
)

P3_TEXT = """
universe 3
relation E 2: (0,1) (1,0) (1,2) (2,1)
"""


def oracle(S, phi, env):
    """Independent truth-table semantics: quantifiers enumerate explicit extensions."""
    if isinstance(phi, Rel):
        return tuple(env[t.name] for t in phi.args) in S.relations[phi.name]
    if isinstance(phi, Eq):
        return env[phi.left.name] == env[phi.right.name]
    if isinstance(phi, Not):
        return not oracle(S, phi.body, env)
    if isinstance(phi, (And, Or, Implies, Iff)):
        a, b = oracle(S, phi.left, env), oracle(S, phi.right, env)
        return {And: a and b, Or: a or b, Implies: (not a) or b, Iff: a == b}[type(phi)]
    table = [oracle(S, phi.body, {**env, phi.var: d}) for d in range(S.size)]
    yes = table.count(True)
    if phi.kind == "exists":
        return yes > 0
    if phi.kind == "forall":
        return yes == S.size
    if phi.kind == "Qmost":
        return yes > S.size - yes
    return True  # Qinf: every complement is finite here


def test_load_p3():
    S = load_structure(P3_TEXT)
    assert S.size == 3 and S.relations["E"] == {(0, 1), (1, 0), (1, 2), (2, 1)}
    assert load_structure(S.dumps()).relations == S.relations


def test_load_errors():
    with pytest.raises(StructureError, match="total|missing"):
        load_structure("universe 2\nfunction f 1: 0 -> 1\n")
    with pytest.raises(StructureError, match="range"):
        load_structure("universe 3\nrelation E 2: (0,7)\n")
    with pytest.raises(StructureError):
        load_structure("relation E 2: (0,1)\n")
    with pytest.raises(StructureError) as err:
        load_structure("universe 2\nbogus line\n")
    assert err.value.line == 2


def test_evaluate_examples():
    S = structure("p3")
    phi = parse_formula("exists y E(x, y)", S.signature)
    assert evaluate(S, phi, {"x": 1})
    assert evaluate(S, Quant("Qmost", "x", phi))
    assert evaluate(S, parse_formula("Qinf x (x != x)", S.signature))
    assert extension(S, phi) == {0, 1, 2}
    assert extension(S, parse_formula("E(x, x)", S.signature)) == frozenset()
    C4 = structure("c4")
    assert extension(C4, parse_formula("x != p", C4.signature, ["p"]), "x", {"p": 0}) == {1, 2, 3}


def test_functions_and_constants():
    S = load_structure("universe 3\nfunction s 1: 0 -> 1 ; 1 -> 2 ; 2 -> 0\nconstant o = 0\n")
    phi = parse_formula("s(s(x)) = o", S.signature)
    assert extension(S, phi) == {1}


def _small_structures():
    out = []
    for n in range(1, 5):
        pairs = list(itertools.product(range(n), repeat=2))
        out.append(FiniteStructure(n, {"E": set(pairs[::3]), "P": {(0,)}}, arities={"E": 2, "P": 1}))
        out.append(FiniteStructure(n, {"E": {(a, b) for a, b in pairs if a < b}, "P": set()},
                                   arities={"E": 2, "P": 1}))
    return out


SMALL = _small_structures()
SIG = Signature(relations={"E": 2, "P": 1})
_terms = st.sampled_from([Var("x"), Var("y"), Param("a1")])
_atoms = st.one_of(st.builds(lambda a, b: Rel("E", (a, b)), _terms, _terms),
                   st.builds(lambda a: Rel("P", (a,)), _terms),
                   st.builds(Eq, _terms, _terms))
_formulas = st.recursive(_atoms, lambda c: st.one_of(
    st.builds(Not, c), st.builds(And, c, c), st.builds(Or, c, c), st.builds(Iff, c, c),
    st.builds(Quant, st.sampled_from(("forall", "exists", "Qmost", "Qinf")), st.sampled_from("xy"), c),
), max_leaves=4)


@settings(max_examples=200, deadline=None)
@given(_formulas, st.sampled_from(SMALL), st.integers(0, 3))
def test_evaluate_matches_truth_table(phi, S, a):
    a %= S.size
    for x, y in itertools.product(S.universe, repeat=2):
        env = {"x": x, "y": y, "a1": a}
        assert evaluate(S, phi, env) == oracle(S, phi, env)


@settings(max_examples=100, deadline=None)
@given(_formulas, st.sampled_from(SMALL))
def test_extension_laws(phi, S):
    env = {"y": 0, "a1": 0}
    ext = extension(S, phi, "x", env)
    assert extension(S, Not(phi), "x", env) == frozenset(S.universe) - ext
    assert evaluate(S, Quant("Qmost", "x", phi), env) == (2 * len(ext) > S.size)
    assert evaluate(S, Quant("Qinf", "x", phi), env)
