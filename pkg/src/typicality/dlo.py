"""Quantifier elimination and typicality over the dense order (Q, <).

Parameters are symbolic points ``a1 < a2 < ... < ak``; only their order type
matters, so every answer is exact.  The order symbol is the binary relation
``lt``.  A property over Q is typical iff its extension is cofinite, i.e. it
misses only finitely many parameter points.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .enumeration import PointSpace
from .syntax import (
    And, Eq, Formula, Iff, Implies, Not, Or, Param, Quant, Rel, Signature, Var,
    free_variables, neq, parameters, parse_formula,
)

ORDER = Signature({"lt": 2})
TRUE, FALSE = frozenset([frozenset()]), frozenset()


class DLOError(ValueError):
    pass


@dataclass(frozen=True)
class ParamConfig:
    names: tuple = ()

    def __post_init__(self):
        names = tuple(self.names)
        if len(set(names)) != len(names):
            raise DLOError("parameter names must be distinct")
        object.__setattr__(self, "names", names)

    @classmethod
    def parse(cls, text: str) -> "ParamConfig":
        """``"a1<a2<a3"``; the empty string gives no parameters."""
        text = text.strip()
        if not text:
            return cls(())
        return cls(tuple(p.strip() for p in text.split("<")))

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DLOError(f"undeclared parameter {name!r}") from None

    def key(self, name: str) -> tuple:
        # parameter a_i (0-based i) sits at cell position 2i+1
        return (2 * self.index(name) + 1, 0)

    def cells(self) -> range:
        return range(2 * len(self.names) + 1)

    def render(self) -> str:
        return "<".join(self.names)


# --- quantifier-free order formulas in positive DNF -------------------------
# literal: ("lt", u, v) or ("eq", u, v) with u < v as strings; DNF: frozenset of
# frozenset of literals.  Negated literals expand positively in a linear order.

def _lit(kind, u, v):
    if kind == "eq" and v < u:
        u, v = v, u
    return (kind, u, v)


def _neg_literal(l):
    kind, u, v = l
    if kind == "lt":
        return frozenset([frozenset([_lit("lt", v, u)]), frozenset([_lit("eq", u, v)])])
    return frozenset([frozenset([_lit("lt", u, v)]), frozenset([_lit("lt", v, u)])])


class _Context:
    def __init__(self, cfg: ParamConfig):
        self.cfg = cfg

    def consistent(self, conj) -> bool:
        """Satisfiability of a conjunction of order literals, parameters ordered."""
        parent = {}

        def find(u):
            parent.setdefault(u, u)
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            return u

        names = self.cfg.names
        edges = [(names[i], names[i + 1]) for i in range(len(names) - 1)]
        for kind, u, v in conj:
            if kind == "eq":
                parent[find(u)] = find(v)
            else:
                edges.append((u, v))
        graph = {}
        for u, v in edges:
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            graph.setdefault(ru, set()).add(rv)
        state = {}

        def cyclic(u):
            state[u] = 1
            for w in graph.get(u, ()):
                if state.get(w) == 1 or (w not in state and cyclic(w)):
                    return True
            state[u] = 2
            return False

        return not any(u not in state and cyclic(u) for u in list(graph))

    def simplify_conj(self, conj):
        out = set()
        for kind, u, v in conj:
            if u == v:
                if kind == "lt":
                    return None
                continue
            if self.is_param(u) and self.is_param(v):
                i, j = self.cfg.index(u), self.cfg.index(v)
                holds = i < j if kind == "lt" else i == j
                if not holds:
                    return None
                continue
            out.add((kind, u, v))
        conj = frozenset(out)
        return conj if self.consistent(conj) else None

    def is_param(self, u):
        return u in self.cfg.names

    def norm(self, dnf):
        conjs = set()
        for c in dnf:
            c = self.simplify_conj(c)
            if c is not None:
                conjs.add(c)
        # drop conjunctions subsumed by a weaker one
        return frozenset(c for c in conjs if not any(d < c for d in conjs))

    def conj(self, a, b):
        return self.norm(frozenset(x | y for x in a for y in b))

    def disj(self, a, b):
        return self.norm(a | b)

    def neg(self, a):
        out = TRUE
        for c in a:
            clause = frozenset()
            for l in c:
                clause |= _neg_literal(l)
            out = self.conj(out, clause)
        return out

    def eliminate(self, var, dnf):
        out = set()
        for c in dnf:
            out |= self._eliminate_conj(var, c)
        return self.norm(frozenset(out))

    def _eliminate_conj(self, var, c):
        eqs = [l for l in c if l[0] == "eq" and var in l[1:]]
        if eqs:
            _, u, v = eqs[0]
            other = v if u == var else u
            return {frozenset(_lit(k, other if a == var else a, other if b == var else b)
                              for k, a, b in c)}
        lower = [u for k, u, v in c if k == "lt" and v == var]
        upper = [v for k, u, v in c if k == "lt" and u == var]
        rest = {l for l in c if var not in l[1:]}
        rest |= {_lit("lt", u, w) for u in lower for w in upper}
        return {frozenset(rest)}


@dataclass(frozen=True)
class QFOrderFormula:
    """Quantifier-free order formula stored as a positive DNF."""
    dnf: frozenset

    @property
    def is_true(self) -> bool:
        return frozenset() in self.dnf

    @property
    def is_false(self) -> bool:
        return not self.dnf

    def conjunctions(self) -> list:
        return sorted(sorted(c) for c in self.dnf)

    def render(self) -> str:
        if self.is_true:
            return "true"
        if self.is_false:
            return "false"
        parts = []
        for c in self.conjunctions():
            lits = [f"lt({u}, {v})" if k == "lt" else f"{u} = {v}" for k, u, v in c]
            parts.append(lits[0] if len(lits) == 1 else "(" + " & ".join(lits) + ")")
        return parts[0] if len(parts) == 1 else " | ".join(parts)

    def evaluate(self, key: Mapping[str, object]) -> bool:
        """Truth under positions ``key`` (anything totally ordered)."""
        for c in self.dnf:
            if all((key[u] < key[v]) if k == "lt" else (key[u] == key[v]) for k, u, v in c):
                return True
        return False


def _term_name(t, cfg):
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Param):
        cfg.index(t.name)
        return t.name
    raise DLOError(f"term {t!r} is not a variable or order parameter")


def _qe(phi, ctx: _Context):
    if isinstance(phi, Rel):
        if phi.name != "lt" or len(phi.args) != 2:
            raise DLOError(f"non-order symbol {phi.name!r}")
        u, v = (_term_name(t, ctx.cfg) for t in phi.args)
        return ctx.norm(frozenset([frozenset([_lit("lt", u, v)])]))
    if isinstance(phi, Eq):
        u, v = _term_name(phi.left, ctx.cfg), _term_name(phi.right, ctx.cfg)
        return ctx.norm(frozenset([frozenset([_lit("eq", u, v)])]))
    if isinstance(phi, Not):
        return ctx.neg(_qe(phi.body, ctx))
    if isinstance(phi, And):
        return ctx.conj(_qe(phi.left, ctx), _qe(phi.right, ctx))
    if isinstance(phi, Or):
        return ctx.disj(_qe(phi.left, ctx), _qe(phi.right, ctx))
    if isinstance(phi, Implies):
        return ctx.disj(ctx.neg(_qe(phi.left, ctx)), _qe(phi.right, ctx))
    if isinstance(phi, Iff):
        a, b = _qe(phi.left, ctx), _qe(phi.right, ctx)
        return ctx.disj(ctx.conj(a, b), ctx.conj(ctx.neg(a), ctx.neg(b)))
    if isinstance(phi, Quant):
        if phi.var in ctx.cfg.names:
            raise DLOError(f"quantifier binds parameter {phi.var!r}")
        body = _qe(phi.body, ctx)
        if phi.kind == "exists":
            return ctx.eliminate(phi.var, body)
        if phi.kind == "forall":
            return ctx.neg(ctx.eliminate(phi.var, ctx.neg(body)))
        # Qmost and Qinf agree on a countable domain: the body must hold at
        # every y off the finitely many points the body mentions.
        points = {u for c in body for _, a, b in c for u in (a, b)} - {phi.var}
        off = TRUE
        for u in sorted(points):
            off = ctx.conj(off, ctx.neg(frozenset([frozenset([_lit("eq", phi.var, u)])])))
        return ctx.neg(ctx.eliminate(phi.var, ctx.conj(off, ctx.neg(body))))
    raise TypeError(f"not a formula: {phi!r}")


def _check_order_formula(phi: Formula, cfg: ParamConfig):
    for p in parameters(phi):
        cfg.index(p)


def eliminate_quantifiers(phi: Formula, cfg: ParamConfig) -> QFOrderFormula:
    """An equivalent quantifier-free formula over dense orders without endpoints."""
    _check_order_formula(phi, cfg)
    return QFOrderFormula(_qe(phi, _Context(cfg)))


# --- extensions over Q -------------------------------------------------------

@dataclass(frozen=True)
class SemiLinearSet:
    """A union of the 2k+1 cells cut out by the parameters.

    Cell ``2i+1`` is the point ``a_{i+1}``; even cells are the open gaps.
    """
    cfg: ParamConfig
    cells: frozenset

    def _endpoint(self, cell):
        return self.cfg.names[(cell - 1) // 2]

    def pieces(self) -> list:
        """Canonical form: maximal open intervals and isolated points, ascending."""
        out = []
        cells = sorted(self.cells)
        runs = []
        for c in cells:
            if runs and runs[-1][-1] == c - 1:
                runs[-1].append(c)
            else:
                runs.append([c])
        last = 2 * len(self.cfg)
        for run in runs:
            if run[0] % 2 == 1:
                out.append(("point", self._endpoint(run[0])))
                run = run[1:]
            tail = None
            if run and run[-1] % 2 == 1:
                tail = run[-1]
                run = run[:-1]
            if run:
                lo = None if run[0] == 0 else self._endpoint(run[0] - 1)
                hi = None if run[-1] == last else self._endpoint(run[-1] + 1)
                out.append(("interval", lo, hi))
            if tail is not None:
                out.append(("point", self._endpoint(tail)))
        return out

    def to_list(self) -> list:
        out = []
        for p in self.pieces():
            if p[0] == "point":
                out.append("{" + p[1] + "}")
            else:
                lo = "-inf" if p[1] is None else p[1]
                hi = "+inf" if p[2] is None else p[2]
                out.append(f"({lo},{hi})")
        return out

    def __str__(self):
        return " u ".join(self.to_list()) if self.cells else "{}"

    def complement(self) -> "SemiLinearSet":
        return SemiLinearSet(self.cfg, frozenset(self.cfg.cells()) - self.cells)

    def is_everything(self) -> bool:
        return self.cells == frozenset(self.cfg.cells())

    def contains_point(self, name: str) -> bool:
        return 2 * self.cfg.index(name) + 1 in self.cells

    def cardinality(self):
        """Number of points, or ``"aleph0"`` when an open gap is included."""
        if any(c % 2 == 0 for c in self.cells):
            return "aleph0"
        return len(self.cells)


def cell_key(cell: int) -> tuple:
    return (cell, 0)


def qf_extension(qf: QFOrderFormula, cfg: ParamConfig, var: str = "x") -> SemiLinearSet:
    cells = []
    for cell in cfg.cells():
        key = {p: cfg.key(p) for p in cfg.names}
        key[var] = cell_key(cell)
        if qf.evaluate(key):
            cells.append(cell)
    return SemiLinearSet(cfg, frozenset(cells))


def _card_gt(a, b) -> bool:
    if a == "aleph0":
        return b != "aleph0"
    return b != "aleph0" and a > b


@dataclass(frozen=True)
class DLOClassification:
    typical: bool
    extension: SemiLinearSet
    mode: str
    qf: QFOrderFormula

    @property
    def verdict(self) -> str:
        return "typical" if self.typical else "non-typical"


def classify_property_dlo(phi: Formula, cfg: ParamConfig, mode: str = "majority",
                          var: str = "x") -> DLOClassification:
    """Typicality of a parametric property over Q.

    ``majority`` compares cardinalities of extension and complement;
    ``frechet`` asks for a finite complement.  On countable Q they coincide.
    """
    extra = free_variables(phi) - {var}
    if extra:
        raise DLOError(f"unexpected free variables {sorted(extra)}")
    qf = eliminate_quantifiers(phi, cfg)
    ext = qf_extension(qf, cfg, var)
    comp = ext.complement()
    if mode == "majority":
        typical = _card_gt(ext.cardinality(), comp.cardinality())
    elif mode == "frechet":
        typical = comp.cardinality() != "aleph0"
    else:
        raise ValueError("mode must be 'majority' or 'frechet'")
    return DLOClassification(typical, ext, mode, qf)


def typical_elements_dlo(cfg: ParamConfig, var: str = "x") -> SemiLinearSet:
    """Points of Q satisfying every distinctness property x != a_i."""
    cells = frozenset(cfg.cells())
    for name in cfg.names:
        cells &= classify_property_dlo(neq(Var(var), Param(name)), cfg, var=var).extension.cells
    return SemiLinearSet(cfg, cells)


def dichotomy(phi: Formula, var: str = "x") -> tuple:
    """For parameter-free ``phi`` return ("phi" | "not phi", classification)."""
    if parameters(phi):
        raise DLOError("dichotomy applies to parameter-free properties only")
    cfg = ParamConfig(())
    pos = classify_property_dlo(phi, cfg, var=var)
    neg = classify_property_dlo(Not(phi), cfg, var=var)
    if pos.typical == neg.typical:
        raise AssertionError("exactly one of phi, not phi must be typical")
    return ("phi", pos) if pos.typical else ("not phi", neg)


def parse_order_formula(text: str, cfg: ParamConfig) -> Formula:
    return parse_formula(text, ORDER, cfg.names)


# --- direct evaluation over Q (reference semantics, no elimination) ----------

def _representatives(values: Iterable[Fraction]) -> list:
    """One rational in each cell cut out by ``values``: the values themselves,
    the midpoints between neighbours, and one point beyond each end."""
    vs = sorted(set(values))
    if not vs:
        return [Fraction(0)]
    reps = [vs[0] - 1, vs[-1] + 1] + vs
    reps += [(a + b) / 2 for a, b in zip(vs, vs[1:])]
    return sorted(reps)


def evaluate_q(phi: Formula, env: Mapping[str, Fraction]) -> bool:
    """Truth of ``phi`` in (Q, <) with variables and parameters bound by ``env``.

    A quantifier only needs to range over one rational per cell cut out by
    the values currently in scope, since the body's truth is constant there.
    """
    if isinstance(phi, Rel):
        if phi.name != "lt":
            raise DLOError(f"non-order symbol {phi.name!r}")
        return env[phi.args[0].name] < env[phi.args[1].name]
    if isinstance(phi, Eq):
        return env[phi.left.name] == env[phi.right.name]
    if isinstance(phi, Not):
        return not evaluate_q(phi.body, env)
    if isinstance(phi, And):
        return evaluate_q(phi.left, env) and evaluate_q(phi.right, env)
    if isinstance(phi, Or):
        return evaluate_q(phi.left, env) or evaluate_q(phi.right, env)
    if isinstance(phi, Implies):
        return (not evaluate_q(phi.left, env)) or evaluate_q(phi.right, env)
    if isinstance(phi, Iff):
        return evaluate_q(phi.left, env) == evaluate_q(phi.right, env)
    if isinstance(phi, Quant):
        others = [v for k, v in env.items() if k != phi.var]
        truths = []
        for r in _representatives(others):
            truths.append(evaluate_q(phi.body, {**env, phi.var: r}))
        if phi.kind == "exists":
            return any(truths)
        if phi.kind == "forall":
            return all(truths)
        # Qmost / Qinf: cofinite iff every gap representative satisfies the body
        vs = set(others)
        return all(t for r, t in zip(_representatives(others), truths) if r not in vs)
    raise TypeError(f"not a formula: {phi!r}")


def random_embedding(cfg: ParamConfig, rng: random.Random, size: int = 8) -> tuple:
    """Random rationals for the parameters plus a finite order (<= ``size``
    points) containing them; returns (parameter values, sample points)."""
    k = len(cfg)
    extra = rng.randint(1, max(1, size - k))
    pool = set()
    while len(pool) < k + extra:
        pool.add(Fraction(rng.randint(-50, 50), rng.randint(1, 6)))
    pts = sorted(pool)
    chosen = sorted(rng.sample(range(len(pts)), k))
    params = {name: pts[i] for name, i in zip(cfg.names, chosen)}
    return params, pts


# --- type-space semantics for the enumeration oracle --------------------------

def _weak_orders(items):
    """All ordered set partitions of ``items``, as dicts item -> rank."""
    items = list(items)
    if not items:
        yield {}
        return
    for k in range(1, len(items) + 1):
        for labels in itertools.product(range(k), repeat=len(items)):
            if set(labels) == set(range(k)):
                yield dict(zip(items, labels))


def _restrict(tp, drop):
    """Drop a variable from a type, re-ranking its gap densely."""
    rest = {v: cr for v, cr in tp if v != drop}
    out = {}
    for v, (cell, rank) in rest.items():
        if cell % 2 == 0:
            ranks = sorted({r for (c, r) in rest.values() if c == cell})
            rank = ranks.index(rank)
        out[v] = (cell, rank)
    return tuple(sorted(out.items()))


def type_space(cfg: ParamConfig, pool: Sequence[str] = ("x", "y")) -> tuple:
    """Complete order types of ``pool`` over the parameters, as a PointSpace.

    Returns ``(space, types)``; type ``t`` maps each variable to
    ``(cell, rank)``, rank ordering variables that share an open gap.
    """
    types = []
    for cells in itertools.product(cfg.cells(), repeat=len(pool)):
        gaps = {}
        for v, c in zip(pool, cells):
            if c % 2 == 0:
                gaps.setdefault(c, []).append(v)
        per_gap = [list(_weak_orders(vs)) for _, vs in sorted(gaps.items())]
        for choice in itertools.product(*per_gap):
            rank = {}
            for d in choice:
                rank.update(d)
            types.append(tuple(sorted((v, (c, rank.get(v, 0))) for v, c in zip(pool, cells))))
    types.sort()
    fibers = {}
    for v in pool:
        classes = {}
        for idx, tp in enumerate(types):
            key = _restrict(tp, v)
            classes[key] = classes.get(key, 0) | (1 << idx)
        fibers[v] = [classes[k] for k in sorted(classes)]
    keys = [dict(tp) for tp in types]
    for k in keys:
        for p in cfg.names:
            k[p] = cfg.key(p)
    terms = [Var(v) for v in pool] + [Param(p) for p in cfg.names]

    def mask_of(pred):
        m = 0
        for idx, k in enumerate(keys):
            if pred(k):
                m |= 1 << idx
        return m

    atoms = [(Eq(Var(pool[0]), Var(pool[0])), (1 << len(types)) - 1)]
    for t1, t2 in itertools.combinations(terms, 2):
        atoms.append((Eq(t1, t2), mask_of(lambda k: k[t1.name] == k[t2.name])))
    for t1, t2 in itertools.product(terms, repeat=2):
        atoms.append((Rel("lt", (t1, t2)), mask_of(lambda k: k[t1.name] < k[t2.name])))
    return PointSpace(len(types), fibers, atoms), types


def type_extension(mask: int, types: Sequence, var: str = "x") -> frozenset:
    """Cells of ``var`` over types in ``mask`` (assumes a mask depending only on ``var``)."""
    cells = set()
    for idx, tp in enumerate(types):
        if mask >> idx & 1:
            cells.add(dict(tp)[var][0])
    return frozenset(cells)
