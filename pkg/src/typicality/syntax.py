"""First-order formulas with the generalized quantifiers Qmost and Qinf.

Formulas are immutable dataclasses.  The concrete syntax is a small ASCII
grammar::

    formula := iff
    iff     := imp ("<->" imp)*
    imp     := or ("->" or)*
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "!" unary | quant | atom | "(" formula ")"
    quant   := ("forall" | "exists" | "Qmost" | "Qinf") ident formula
    atom    := ident "(" term ("," term)* ")" | term ("=" | "!=") term
    term    := ident | ident "(" term ("," term)* ")"

Binary connectives associate to the left.  ``t1 != t2`` is sugar for
``!(t1 = t2)``.  An identifier in term position is a constant if the
signature declares it, a parameter placeholder if it appears in the
``params`` list handed to the parser, and a variable otherwise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
QUANTIFIERS = ("forall", "exists", "Qmost", "Qinf")
KEYWORDS = frozenset(QUANTIFIERS)


class FormulaSyntaxError(ValueError):
    """Raised for malformed text, unknown symbols and arity mismatches."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


@dataclass(frozen=True)
class Signature:
    relations: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    constants: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "relations", dict(self.relations))
        object.__setattr__(self, "functions", dict(self.functions))
        object.__setattr__(self, "constants", tuple(self.constants))
        names = list(self.relations) + list(self.functions) + list(self.constants)
        for name in names:
            if not isinstance(name, str) or not IDENT_RE.match(name):
                raise ValueError(f"bad symbol name {name!r}")
            if name in KEYWORDS:
                raise ValueError(f"symbol name {name!r} is a keyword")
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate symbol names: {', '.join(dup)}")
        for kind in (self.relations, self.functions):
            for name, arity in kind.items():
                if not isinstance(arity, int) or arity < 0:
                    raise ValueError(f"bad arity {arity!r} for {name}")

    def __hash__(self):
        return hash((tuple(sorted(self.relations.items())),
                     tuple(sorted(self.functions.items())), self.constants))

    def symbols(self) -> frozenset:
        return frozenset(self.relations) | frozenset(self.functions) | frozenset(self.constants)


# --- terms -----------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Param:
    """A parameter placeholder, bound to an element through the valuation."""
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple


Term = Union[Var, Param, Const, App]


# --- formulas --------------------------------------------------------------

@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Quant:
    kind: str
    var: str
    body: "Formula"

    def __post_init__(self):
        if self.kind not in QUANTIFIERS:
            raise ValueError(f"unknown quantifier {self.kind!r}")


Formula = Union[Rel, Eq, Not, And, Or, Implies, Iff, Quant]
BINARY = {And: "&", Or: "|", Implies: "->", Iff: "<->"}


def Forall(var, body):
    return Quant("forall", var, body)


def Exists(var, body):
    return Quant("exists", var, body)


def Qmost(var, body):
    return Quant("Qmost", var, body)


def Qinf(var, body):
    return Quant("Qinf", var, body)


def neq(left: Term, right: Term) -> Not:
    return Not(Eq(left, right))


# --- traversal -------------------------------------------------------------

def term_symbols(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from term_symbols(a)


def size(phi: Formula) -> int:
    """AST size: one per connective, quantifier and atom (terms are free)."""
    if isinstance(phi, (Rel, Eq)):
        return 1
    if isinstance(phi, Not):
        return 1 + size(phi.body)
    if isinstance(phi, Quant):
        return 1 + size(phi.body)
    return 1 + size(phi.left) + size(phi.right)


def _atom_terms(phi):
    return phi.args if isinstance(phi, Rel) else (phi.left, phi.right)


def _free(phi: Formula, bound: frozenset, out_vars: set, out_params: set) -> None:
    if isinstance(phi, (Rel, Eq)):
        for t in _atom_terms(phi):
            for s in term_symbols(t):
                if isinstance(s, Var) and s.name not in bound:
                    out_vars.add(s.name)
                elif isinstance(s, Param):
                    out_params.add(s.name)
    elif isinstance(phi, Not):
        _free(phi.body, bound, out_vars, out_params)
    elif isinstance(phi, Quant):
        _free(phi.body, bound | {phi.var}, out_vars, out_params)
    else:
        _free(phi.left, bound, out_vars, out_params)
        _free(phi.right, bound, out_vars, out_params)


def free_variables(phi: Formula) -> frozenset:
    """Names of variables with a free occurrence (parameters excluded)."""
    out_vars: set = set()
    _free(phi, frozenset(), out_vars, set())
    return frozenset(out_vars)


def parameters(phi: Formula) -> frozenset:
    """Names of the parameter placeholders occurring in ``phi``."""
    out_params: set = set()
    _free(phi, frozenset(), set(), out_params)
    return frozenset(out_params)


def check_formula(phi: Formula, sig: Signature) -> None:
    """Raise FormulaSyntaxError unless ``phi`` is well formed over ``sig``."""

    def check_term(t):
        if isinstance(t, App):
            if t.fn not in sig.functions:
                raise FormulaSyntaxError(f"unknown function symbol {t.fn!r}")
            if len(t.args) != sig.functions[t.fn]:
                raise FormulaSyntaxError(
                    f"function {t.fn} expects {sig.functions[t.fn]} arguments, got {len(t.args)}")
            for a in t.args:
                check_term(a)
        elif isinstance(t, Const) and t.name not in sig.constants:
            raise FormulaSyntaxError(f"unknown constant {t.name!r}")

    def walk(f, params):
        if isinstance(f, Rel):
            if f.name not in sig.relations:
                raise FormulaSyntaxError(f"unknown relation symbol {f.name!r}")
            if len(f.args) != sig.relations[f.name]:
                raise FormulaSyntaxError(
                    f"relation {f.name} expects {sig.relations[f.name]} arguments, got {len(f.args)}")
            for a in f.args:
                check_term(a)
        elif isinstance(f, Eq):
            check_term(f.left)
            check_term(f.right)
        elif isinstance(f, Not):
            walk(f.body, params)
        elif isinstance(f, Quant):
            if f.var in params:
                raise FormulaSyntaxError(f"quantifier binds parameter {f.var!r}")
            walk(f.body, params)
        else:
            walk(f.left, params)
            walk(f.right, params)

    walk(phi, parameters(phi))


# --- lexer and parser ------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(<->|->|!=|[!&|()=,])|([A-Za-z_][A-Za-z0-9_]*))")


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while True:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise FormulaSyntaxError(f"unexpected character {text[bad]!r}", bad)
        start = m.start(1) if m.group(1) else m.start(2)
        tokens.append((m.group(1) or m.group(2), start))
        pos = m.end()
    tokens.append(("<eof>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature, params: Sequence[str]):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = sig
        self.params = frozenset(params)

    def peek(self):
        return self.toks[self.i][0]

    def pos(self):
        return self.toks[self.i][1]

    def take(self, expected=None):
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            shown = "end of input" if tok == "<eof>" else repr(tok)
            raise FormulaSyntaxError(f"expected {expected!r}, found {shown}", pos)
        self.i += 1
        return tok

    def ident(self):
        tok, pos = self.toks[self.i]
        if not IDENT_RE.match(tok) or tok in KEYWORDS:
            shown = "end of input" if tok == "<eof>" else repr(tok)
            raise FormulaSyntaxError(f"expected identifier, found {shown}", pos)
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.formula()
        if self.peek() != "<eof>":
            raise FormulaSyntaxError(f"unexpected token {self.peek()!r}", self.pos())
        return f

    def formula(self):
        return self.binary(0)

    _LEVELS = (("<->", Iff), ("->", Implies), ("|", Or), ("&", And))

    def binary(self, level):
        if level == len(self._LEVELS):
            return self.unary()
        op, cls = self._LEVELS[level]
        left = self.binary(level + 1)
        while self.peek() == op:
            self.take()
            left = cls(left, self.binary(level + 1))
        return left

    def unary(self):
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok in KEYWORDS:
            self.take()
            pos = self.pos()
            var = self.ident()
            if var in self.params:
                raise FormulaSyntaxError(f"quantifier binds parameter {var!r}", pos)
            if var in self.sig.symbols():
                raise FormulaSyntaxError(f"quantifier binds signature symbol {var!r}", pos)
            return Quant(tok, var, self.formula())
        if tok == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        return self.atom()

    def arglist(self):
        self.take("(")
        args = [self.term()]
        while self.peek() == ",":
            self.take()
            args.append(self.term())
        self.take(")")
        return tuple(args)

    def atom(self):
        pos = self.pos()
        name = self.ident()
        if name in self.sig.relations:
            args = self.arglist() if self.peek() == "(" else ()
            if len(args) != self.sig.relations[name]:
                raise FormulaSyntaxError(
                    f"relation {name} expects {self.sig.relations[name]} arguments, got {len(args)}", pos)
            return Rel(name, args)
        left = self.finish_term(name, pos)
        op_pos = self.pos()
        op = self.peek()
        if op not in ("=", "!="):
            raise FormulaSyntaxError(f"expected '=' or '!=' after term, found {op!r}", op_pos)
        self.take()
        right = self.term()
        return Eq(left, right) if op == "=" else Not(Eq(left, right))

    def term(self):
        pos = self.pos()
        return self.finish_term(self.ident(), pos)

    def finish_term(self, name, pos):
        if self.peek() == "(":
            if name in self.sig.relations:
                raise FormulaSyntaxError(f"relation symbol {name!r} used as a term", pos)
            if name not in self.sig.functions:
                raise FormulaSyntaxError(f"unknown function symbol {name!r}", pos)
            args = self.arglist()
            if len(args) != self.sig.functions[name]:
                raise FormulaSyntaxError(
                    f"function {name} expects {self.sig.functions[name]} arguments, got {len(args)}", pos)
            return App(name, args)
        if name in self.sig.functions:
            if self.sig.functions[name] == 0:
                return App(name, ())
            raise FormulaSyntaxError(f"function {name} used without arguments", pos)
        if name in self.sig.relations:
            raise FormulaSyntaxError(f"relation symbol {name!r} used as a term", pos)
        if name in self.sig.constants:
            return Const(name)
        if name in self.params:
            return Param(name)
        return Var(name)


def parse_formula(text: str, sig: Signature, params: Iterable[str] = ()) -> Formula:
    """Parse ``text`` over ``sig``; identifiers in ``params`` become placeholders."""
    params = tuple(params)
    for p in params:
        if not IDENT_RE.match(p) or p in KEYWORDS:
            raise ValueError(f"bad parameter name {p!r}")
        if p in sig.symbols():
            raise ValueError(f"parameter {p!r} clashes with a signature symbol")
    return _Parser(text, sig, params).parse()


# --- rendering -------------------------------------------------------------

def render_term(t: Term) -> str:
    if isinstance(t, App):
        if not t.args:
            return t.fn
        return f"{t.fn}({', '.join(render_term(a) for a in t.args)})"
    return t.name


def _operand(phi):
    text = render_formula(phi)
    return f"({text})" if isinstance(phi, Quant) else text


def render_formula(phi: Formula) -> str:
    """Canonical, fully parenthesized text; re-parses to the same AST."""
    if isinstance(phi, Rel):
        if not phi.args:
            return phi.name
        return f"{phi.name}({', '.join(render_term(a) for a in phi.args)})"
    if isinstance(phi, Eq):
        return f"{render_term(phi.left)} = {render_term(phi.right)}"
    if isinstance(phi, Not):
        if isinstance(phi.body, Eq):
            return f"{render_term(phi.body.left)} != {render_term(phi.body.right)}"
        return "!" + _operand(phi.body)
    if isinstance(phi, Quant):
        return f"{phi.kind} {phi.var} ({render_formula(phi.body)})"
    op = BINARY[type(phi)]
    return f"({_operand(phi.left)} {op} {_operand(phi.right)})"


# --- constructions ---------------------------------------------------------

def distinctness_formula(params: Sequence[str], var: str = "x") -> Formula:
    """The property x != a1 & ... & x != an over the given placeholders."""
    params = list(params)
    if not params:
        raise ValueError("distinctness formula needs at least one parameter")
    if len(set(params)) != len(params):
        raise ValueError("parameter names must be distinct")
    if var in params:
        raise ValueError("the free variable must differ from the parameters")
    phi = neq(Var(var), Param(params[0]))
    for p in params[1:]:
        phi = And(phi, neq(Var(var), Param(p)))
    return phi


def conjoin(formulas: Sequence[Formula]) -> Formula:
    it = iter(formulas)
    phi = next(it)
    for f in it:
        phi = And(phi, f)
    return phi
