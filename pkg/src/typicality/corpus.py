"""Named fixture structures and formulas shipped with the package."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .model import FiniteStructure, load_structure
from .syntax import FormulaSyntaxError, parse_formula

STRUCTURES = ("p3", "c4", "chain3", "k22", "empty2", "pq6")

# (text, parameter names); each is used wherever it parses over the signature
FORMULAS = (
    ("x = x", ()),
    ("x != x", ()),
    ("x != a1", ("a1",)),
    ("(x != a1) & (x != a2)", ("a1", "a2")),
    ("x = a1 | x = a2", ("a1", "a2")),
    ("exists y E(x, y)", ()),
    ("forall y !E(x, y)", ()),
    ("exists y exists z (y != z & E(x, y) & E(x, z))", ()),
    ("E(x, a1)", ("a1",)),
    ("!E(x, a1) & x != a1", ("a1",)),
    ("exists y (E(x, y) & E(y, a1))", ("a1",)),
    ("exists y lt(y, x)", ()),
    ("exists y lt(x, y)", ()),
    ("exists y lt(y, x) & exists y lt(x, y)", ()),
    ("lt(x, a1)", ("a1",)),
    ("lt(a1, x) -> exists y (lt(a1, y) & lt(y, x))", ("a1",)),
    ("P(x) | Q(x)", ()),
    ("!P(x)", ()),
    ("!Q(x)", ()),
    ("Qmost y (y != x)", ()),
    ("Qmost y E(x, y)", ()),
)

# formulas over the order symbol lt for the dense-order procedures
DLO_FORMULAS = (
    ("x = x", ()),
    ("lt(x, x)", ()),
    ("exists y lt(y, x)", ()),
    ("exists y lt(x, y)", ()),
    ("forall y (lt(x, y) | x = y | lt(y, x))", ()),
    ("x != a1", ("a1",)),
    ("lt(x, a1)", ("a1",)),
    ("exists y (lt(a1, y) & lt(y, x))", ("a1",)),
    ("exists y (lt(x, y) & lt(y, a1))", ("a1",)),
    ("forall y (lt(y, x) -> lt(y, a1))", ("a1",)),
    ("(x != a1) & (x != a2)", ("a1", "a2")),
    ("lt(a1, x) & lt(x, a2)", ("a1", "a2")),
    ("exists y (lt(a1, y) & lt(y, a2) & x = y)", ("a1", "a2")),
    ("forall y (lt(a1, y) & lt(y, a2) -> lt(x, y))", ("a1", "a2")),
    ("exists y exists z (lt(y, x) & lt(x, z) & lt(a1, y) & lt(z, a2))", ("a1", "a2")),
    ("!(x = a1 | x = a3) -> lt(x, a2)", ("a1", "a2", "a3")),
    ("exists y (x = y & y != a2) | lt(a3, x)", ("a1", "a2", "a3")),
    ("forall y (lt(y, a1) | lt(a4, y) | y != x)", ("a1", "a2", "a3", "a4")),
    ("exists y ((lt(a2, y) & lt(y, a3)) & !(exists z (lt(y, z) & lt(z, x))))", ("a1", "a2", "a3", "a4")),
)


def structure_text(name: str) -> str:
    return resources.files(__package__).joinpath("corpus").joinpath(f"{name}.struct").read_text()


@lru_cache(maxsize=None)
def structure(name: str) -> FiniteStructure:
    if name not in STRUCTURES:
        raise KeyError(f"unknown corpus structure {name!r}; known: {', '.join(STRUCTURES)}")
    return load_structure(structure_text(name), name=name)


def all_structures() -> list:
    return [structure(n) for n in STRUCTURES]


def formulas_for(sig, fixture=FORMULAS) -> list:
    """Parsed fixture formulas that fit ``sig``, as (formula, params) pairs."""
    out = []
    for text, params in fixture:
        try:
            out.append((parse_formula(text, sig, params), params))
        except FormulaSyntaxError:
            continue
    return out
