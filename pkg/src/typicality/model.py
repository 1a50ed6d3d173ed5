"""Finite structures and Tarskian evaluation, generalized quantifiers included.

Structure files are line oriented::

    # path on three vertices
    universe 3
    relation E 2: (0,1) (1,0) (1,2) (2,1)
    function f 1: 0 -> 1 ; 1 -> 2 ; 2 -> 0
    constant c = 0

Elements are the integers ``0 .. n-1``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Mapping

from .syntax import (
    And, App, Const, Eq, Formula, Iff, Implies, Not, Or, Param, Quant, Rel,
    Signature, Term, Var,
)


class StructureError(ValueError):
    """Malformed or inconsistent structure description."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EvaluationError(ValueError):
    """Raised when a valuation leaves a free variable or parameter unassigned."""


@dataclass(frozen=True, eq=False)
class FiniteStructure:
    size: int
    relations: Mapping[str, frozenset] = field(default_factory=dict)
    functions: Mapping[str, Mapping[tuple, int]] = field(default_factory=dict)
    constants: Mapping[str, int] = field(default_factory=dict)
    arities: Mapping[str, int] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        n = self.size
        if not isinstance(n, int) or n < 1:
            raise StructureError(f"universe size must be a positive integer, got {n!r}")
        rels = {k: frozenset(tuple(t) for t in v) for k, v in self.relations.items()}
        funcs = {k: {tuple(a): b for a, b in v.items()} for k, v in self.functions.items()}
        arities = dict(self.arities)
        for r, tuples in rels.items():
            if r not in arities:
                lengths = {len(t) for t in tuples}
                if len(lengths) > 1:
                    raise StructureError(f"relation {r} has tuples of mixed length")
                if not lengths:
                    raise StructureError(f"arity of empty relation {r} must be declared")
                arities[r] = lengths.pop()
            for t in tuples:
                if len(t) != arities[r]:
                    raise StructureError(f"relation {r}: tuple {t} does not have arity {arities[r]}")
                for e in t:
                    if not 0 <= e < n:
                        raise StructureError(f"relation {r}: element {e} out of range 0..{n - 1}")
        for f, table in funcs.items():
            if f not in arities:
                arities[f] = len(next(iter(table))) if table else 0
            k = arities[f]
            for args, val in table.items():
                if len(args) != k:
                    raise StructureError(f"function {f}: argument list {args} does not have arity {k}")
                for e in args + (val,):
                    if not 0 <= e < n:
                        raise StructureError(f"function {f}: element {e} out of range 0..{n - 1}")
            missing = [a for a in itertools.product(range(n), repeat=k) if a not in table]
            if missing:
                raise StructureError(f"function {f} is not total: no value for {missing[0]}")
        for c, e in self.constants.items():
            if not 0 <= e < n:
                raise StructureError(f"constant {c}: element {e} out of range 0..{n - 1}")
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "functions", funcs)
        object.__setattr__(self, "constants", dict(self.constants))
        object.__setattr__(self, "arities", arities)
        # raises on name clashes
        object.__setattr__(self, "signature", Signature(
            {r: arities[r] for r in rels},
            {f: arities[f] for f in funcs},
            tuple(self.constants),
        ))

    @property
    def universe(self) -> range:
        return range(self.size)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<FiniteStructure{label} n={self.size} sig={sorted(self.signature.symbols())}>"

    def dumps(self) -> str:
        lines = [f"universe {self.size}"]
        for r in sorted(self.relations):
            tuples = " ".join("(" + ",".join(map(str, t)) + ")" for t in sorted(self.relations[r]))
            lines.append(f"relation {r} {self.arities[r]}: {tuples}".rstrip())
        for f in sorted(self.functions):
            rows = " ; ".join(",".join(map(str, a)) + " -> " + str(v)
                              for a, v in sorted(self.functions[f].items()))
            lines.append(f"function {f} {self.arities[f]}: {rows}")
        for c in sorted(self.constants):
            lines.append(f"constant {c} = {self.constants[c]}")
        return "\n".join(lines) + "\n"


_UNIVERSE = re.compile(r"universe\s+(\d+)\Z")
_RELATION = re.compile(r"relation\s+([A-Za-z_]\w*)\s+(\d+)\s*:(.*)\Z")
_FUNCTION = re.compile(r"function\s+([A-Za-z_]\w*)\s+(\d+)\s*:(.*)\Z")
_CONSTANT = re.compile(r"constant\s+([A-Za-z_]\w*)\s*=\s*(\d+)\Z")
_TUPLE = re.compile(r"\(([^()]*)\)")


def _ints(text: str, lineno: int) -> tuple:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise StructureError(f"expected comma separated integers, got {text!r}", lineno) from None


def load_structure(text: str, name: str = "") -> FiniteStructure:
    """Parse the line-oriented structure format and validate the result."""
    size = None
    relations, functions, constants, arities = {}, {}, {}, {}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := _UNIVERSE.match(line):
            if size is not None:
                raise StructureError("universe declared twice", lineno)
            size = int(m.group(1))
        elif m := _RELATION.match(line):
            rel, arity, body = m.group(1), int(m.group(2)), m.group(3)
            if rel in seen:
                raise StructureError(f"symbol {rel} declared twice", lineno)
            seen.add(rel)
            leftover = _TUPLE.sub("", body).strip()
            if leftover:
                raise StructureError(f"unexpected text {leftover!r} in relation {rel}", lineno)
            tuples = set()
            for t in _TUPLE.findall(body):
                tup = _ints(t, lineno)
                if len(tup) != arity:
                    raise StructureError(f"relation {rel}: tuple {tup} does not have arity {arity}", lineno)
                tuples.add(tup)
            relations[rel], arities[rel] = tuples, arity
        elif m := _FUNCTION.match(line):
            fn, arity, body = m.group(1), int(m.group(2)), m.group(3)
            if fn in seen:
                raise StructureError(f"symbol {fn} declared twice", lineno)
            seen.add(fn)
            table = {}
            for row in filter(None, (r.strip() for r in body.split(";"))):
                if "->" not in row:
                    raise StructureError(f"function {fn}: row {row!r} lacks '->'", lineno)
                lhs, rhs = row.split("->", 1)
                args, val = _ints(lhs, lineno), _ints(rhs, lineno)
                if len(val) != 1:
                    raise StructureError(f"function {fn}: row {row!r} needs one value", lineno)
                if len(args) != arity:
                    raise StructureError(f"function {fn}: row {row!r} does not have arity {arity}", lineno)
                if args in table:
                    raise StructureError(f"function {fn}: duplicate row for {args}", lineno)
                table[args] = val[0]
            functions[fn], arities[fn] = table, arity
        elif m := _CONSTANT.match(line):
            c = m.group(1)
            if c in seen:
                raise StructureError(f"symbol {c} declared twice", lineno)
            seen.add(c)
            constants[c] = int(m.group(2))
        else:
            raise StructureError(f"cannot parse {line!r}", lineno)
    if size is None:
        raise StructureError("missing 'universe N' line")
    try:
        return FiniteStructure(size, relations, functions, constants, arities, name=name)
    except ValueError as e:
        if isinstance(e, StructureError):
            raise
        raise StructureError(str(e)) from None


# --- evaluation ------------------------------------------------------------

def eval_term(S: FiniteStructure, t: Term, v: Mapping[str, int]) -> int:
    if isinstance(t, (Var, Param)):
        try:
            return v[t.name]
        except KeyError:
            kind = "variable" if isinstance(t, Var) else "parameter"
            raise EvaluationError(f"{kind} {t.name!r} is not assigned") from None
    if isinstance(t, Const):
        return S.constants[t.name]
    return S.functions[t.fn][tuple(eval_term(S, a, v) for a in t.args)]


def _count(S, phi, var, v):
    env = dict(v)
    hits = 0
    for a in S.universe:
        env[var] = a
        hits += evaluate(S, phi, env)
    return hits


def evaluate(S: FiniteStructure, phi: Formula, v: Mapping[str, int] | None = None) -> bool:
    """Truth of ``phi`` in ``S`` under ``v``.

    ``Qmost x.phi`` holds iff the extension outnumbers its complement;
    ``Qinf x.phi`` holds iff the complement is finite, which on a finite
    universe is always the case.
    """
    v = {} if v is None else v
    if isinstance(phi, Rel):
        return tuple(eval_term(S, t, v) for t in phi.args) in S.relations[phi.name]
    if isinstance(phi, Eq):
        return eval_term(S, phi.left, v) == eval_term(S, phi.right, v)
    if isinstance(phi, Not):
        return not evaluate(S, phi.body, v)
    if isinstance(phi, And):
        return evaluate(S, phi.left, v) and evaluate(S, phi.right, v)
    if isinstance(phi, Or):
        return evaluate(S, phi.left, v) or evaluate(S, phi.right, v)
    if isinstance(phi, Implies):
        return (not evaluate(S, phi.left, v)) or evaluate(S, phi.right, v)
    if isinstance(phi, Iff):
        return evaluate(S, phi.left, v) == evaluate(S, phi.right, v)
    if isinstance(phi, Quant):
        env = dict(v)
        if phi.kind == "exists":
            for a in S.universe:
                env[phi.var] = a
                if evaluate(S, phi.body, env):
                    return True
            return False
        if phi.kind == "forall":
            for a in S.universe:
                env[phi.var] = a
                if not evaluate(S, phi.body, env):
                    return False
            return True
        hits = _count(S, phi.body, phi.var, v)
        if phi.kind == "Qmost":
            return hits > S.size - hits
        return True  # Qinf: every complement in a finite universe is finite
    raise TypeError(f"not a formula: {phi!r}")


def extension(S: FiniteStructure, phi: Formula, var: str = "x",
              v: Mapping[str, int] | None = None) -> frozenset:
    """The set of elements ``a`` with ``S |= phi[var := a]``."""
    env = dict(v or {})
    out = []
    for a in S.universe:
        env[var] = a
        if evaluate(S, phi, env):
            out.append(a)
    return frozenset(out)
