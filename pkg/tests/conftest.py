import itertools

from hypothesis import strategies as st

from typicality.syntax import (
    And, App, Const, Eq, Iff, Implies, Not, Or, Param, Quant, Rel, Signature, Var,
)

SIG = Signature(relations={"E": 2, "P": 1}, functions={"f": 1}, constants=("c",))
VARS = ("x", "y", "z")
PARAMS = ("a1", "a2")

_base_terms = st.one_of(
    st.sampled_from([Var(v) for v in VARS]),
    st.sampled_from([Param(p) for p in PARAMS]),
    st.just(Const("c")),
)
terms = st.one_of(_base_terms, _base_terms.map(lambda t: App("f", (t,))))

atoms = st.one_of(
    st.builds(lambda a, b: Rel("E", (a, b)), terms, terms),
    st.builds(lambda a: Rel("P", (a,)), terms),
    st.builds(Eq, terms, terms),
)


def _extend(children):
    return st.one_of(
        st.builds(Not, children),
        st.builds(And, children, children),
        st.builds(Or, children, children),
        st.builds(Implies, children, children),
        st.builds(Iff, children, children),
        st.builds(Quant, st.sampled_from(("forall", "exists", "Qmost", "Qinf")),
                  st.sampled_from(VARS), children),
    )


formulas = st.recursive(atoms, _extend, max_leaves=8)


def all_subsets(n):
    for k in range(n + 1):
        yield from itertools.combinations(range(n), k)
