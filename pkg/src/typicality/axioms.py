"""Randomness axioms T1-T6 for relative typicality on finite structures.

Every check is exhaustive over parameter tuples up to a length bound and
uses the orbit criterion from :mod:`typicality.engine`.  Counterexample
search runs the same checks across a family of small structures,
deduplicated up to isomorphism.
"""

from __future__ import annotations

import dataclasses
import itertools
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .engine import classify_element, typical_set
from .model import FiniteStructure, extension
from .symmetry import canonical_form, orbit_partition
from .syntax import Formula, parameters, render_formula

AXIOMS = ("T1", "T2", "T3", "T4", "T5", "T6")
DEFAULT_ARITY = 3
DEFAULT_MAX_CHECKS = 2_000_000


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class AxiomReport:
    axiom: str
    structure: str
    bounds: dict
    verdict: str
    violations: list = field(default_factory=list)
    checked: int = 0
    note: str = ""

    @property
    def holds(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "axiom": self.axiom,
            "structure": self.structure,
            "bounds": dict(self.bounds),
            "verdict": self.verdict,
            "checked": self.checked,
            "violations": list(self.violations),
            "note": self.note,
        }


def tuples_upto(n: int, max_len: int) -> Iterator[tuple]:
    for k in range(max_len + 1):
        yield from itertools.product(range(n), repeat=k)


def Tp(S: FiniteStructure, a: int, params: Sequence[int]) -> bool:
    return classify_element(S, a, tuple(params)).typical


class _Counter:
    def __init__(self, limit):
        self.n = 0
        self.limit = limit

    def tick(self):
        self.n += 1
        if self.limit is not None and self.n > self.limit:
            raise BudgetExceeded(f"more than {self.limit} axiom instances")


def _t1(S, K, count):
    for params in tuples_upto(S.size, K):
        count.tick()
        if not typical_set(S, params):
            yield {"params": list(params)}


def _t2(S, K, count):
    for a in S.universe:
        for t in tuples_upto(S.size, K):
            if not t:
                continue
            count.tick()
            c, b = t[0], t[1:]
            if Tp(S, a, t) and not Tp(S, a, b):
                yield {"a": a, "c": c, "b": list(b)}


def _t3(S, K, count):
    for a in S.universe:
        for b in tuples_upto(S.size, K):
            if Tp(S, a, b):
                for perm in sorted(set(itertools.permutations(b))):
                    count.tick()
                    if not Tp(S, a, perm):
                        yield {"part": "a", "a": a, "b": list(b), "permuted": list(perm)}
            if b and len(b) < K:
                count.tick()
                doubled = (b[0],) + b
                if Tp(S, a, b) and not Tp(S, a, doubled):
                    yield {"part": "b", "a": a, "b": list(b), "doubled": list(doubled)}


def _t4(S, K, count):
    for a in S.universe:
        for b in S.universe:
            count.tick()
            if Tp(S, a, (b,)) and a == b:
                yield {"a": a, "b": b}


def _t5(S, K, count):
    for c in tuples_upto(S.size, max(K - 1, 0)):
        for a in S.universe:
            if not Tp(S, a, c):
                continue
            for b in S.universe:
                count.tick()
                if Tp(S, b, (a,) + c) and not Tp(S, a, (b,) + c):
                    yield {"a": a, "b": b, "c": list(c)}


def _t6(S, K, count, formulas):
    for phi, names in formulas:
        names = tuple(names) or tuple(sorted(parameters(phi)))
        if len(names) + 1 > K:
            continue
        for ys in itertools.product(S.universe, repeat=len(names)):
            ext = extension(S, phi, "x", dict(zip(names, ys)))
            conclusion = typical_set(S, ys) <= ext
            for z in S.universe:
                count.tick()
                premise = typical_set(S, (z,) + ys) <= ext
                if premise and not conclusion:
                    yield {"formula": render_formula(phi), "y": list(ys), "z": z}


def check_axiom(axiom: str, S: FiniteStructure, arity: int = DEFAULT_ARITY,
                formulas: Sequence[tuple] | None = None,
                max_checks: int | None = DEFAULT_MAX_CHECKS) -> AxiomReport:
    """Exhaustive check of one axiom; parameter tuples have length <= ``arity``.

    ``formulas`` (pairs of formula and parameter names) instantiate the T6
    scheme; by default the corpus fixture formulas fitting the signature.
    """
    axiom = axiom.upper()
    if axiom not in AXIOMS:
        raise ValueError(f"unknown axiom {axiom!r}; expected one of {', '.join(AXIOMS)}")
    count = _Counter(max_checks)
    bounds = {"arity": arity}
    note = ""
    if axiom == "T6":
        if formulas is None:
            from .corpus import formulas_for
            formulas = formulas_for(S.signature)
        formulas = [(f, p) for f, p in formulas]
        bounds["formulas"] = len(formulas)
        gen = _t6(S, arity, count, formulas)
    else:
        gen = {"T1": _t1, "T2": _t2, "T3": _t3, "T4": _t4, "T5": _t5}[axiom](S, arity, count)
    violations = list(gen)
    if violations:
        verdict = "fails"
    elif axiom == "T6":
        verdict = "holds-with-caveat"
        note = "scheme checked only on the supplied formulas"
    else:
        verdict = "holds"
    return AxiomReport(axiom, S.name, bounds, verdict, violations, count.n, note)


# --- the majority filter ---------------------------------------------------

def _majority(subset, n):
    return 2 * len(subset) > n


def _filter_failures(family, n):
    maj = [X for X in family if _majority(X, n)]
    out = []
    for X, Y in itertools.combinations(maj, 2):
        Z = X & Y
        if not _majority(Z, n):
            out.append((X, Y, Z))
    return out


def check_majority_filter_closure(S: FiniteStructure, params: Sequence[int] = (),
                                  modes: Sequence[str] = ("raw", "definable")) -> AxiomReport:
    """Closure of majority sets under intersection, over all subsets (raw)
    and over the parameter-definable sets (unions of stabilizer orbits)."""
    n = S.size
    violations = []
    checked = 0
    for mode in modes:
        if mode == "raw":
            family = [frozenset(c) for k in range(n + 1)
                      for c in itertools.combinations(range(n), k)]
        elif mode == "definable":
            blocks = orbit_partition(S, params).blocks
            family = [frozenset(itertools.chain.from_iterable(c))
                      for k in range(len(blocks) + 1)
                      for c in itertools.combinations(blocks, k)]
        else:
            raise ValueError(f"unknown mode {mode!r}")
        family.sort(key=lambda X: (len(X), sorted(X)))
        maj = sum(1 for X in family if _majority(X, n))
        checked += maj * (maj - 1) // 2
        for X, Y, Z in _filter_failures(family, n):
            violations.append({"mode": mode, "X": sorted(X), "Y": sorted(Y), "meet": sorted(Z)})
    verdict = "fails" if violations else "holds"
    return AxiomReport("FILTER", S.name, {"modes": list(modes), "params": list(params)},
                       verdict, violations, checked)


# --- structure families ----------------------------------------------------

_FAMILY_RE = re.compile(r"(empty|graph|digraph)(?::(\d+)(?:-(\d+))?)?(\+connected)?\Z")


@dataclass(frozen=True)
class StructureFamilySpec:
    """``template`` is "empty", "graph" (symmetric loopless E) or "digraph"
    (any binary E); universe sizes ``lo..hi``; optional connectivity filter."""
    template: str
    lo: int
    hi: int
    connected: bool = False

    @classmethod
    def parse(cls, text: str) -> "StructureFamilySpec":
        m = _FAMILY_RE.match(text.strip())
        if not m:
            raise ValueError(f"bad family spec {text!r}; expected e.g. 'graph:1-5'")
        lo = int(m.group(2) or 1)
        hi = int(m.group(3) or lo)
        if lo < 1 or hi < lo:
            raise ValueError(f"bad size range in {text!r}")
        return cls(m.group(1), lo, hi, bool(m.group(4)))

    def render(self) -> str:
        return f"{self.template}:{self.lo}-{self.hi}" + ("+connected" if self.connected else "")


def labeled_count(template: str, n: int) -> int:
    if template == "empty":
        return 1
    if template == "graph":
        return 2 ** (n * (n - 1) // 2)
    if template == "digraph":
        return 2 ** (n * n)
    raise ValueError(template)


def _labeled(template, n) -> Iterator[FiniteStructure]:
    if template == "empty":
        yield FiniteStructure(n)
        return
    if template == "graph":
        slots = list(itertools.combinations(range(n), 2))
    else:
        slots = list(itertools.product(range(n), repeat=2))
    for bits in range(2 ** len(slots)):
        edges = set()
        for i, (u, v) in enumerate(slots):
            if bits >> i & 1:
                edges.add((u, v))
                if template == "graph":
                    edges.add((v, u))
        yield FiniteStructure(n, {"E": edges}, arities={"E": 2})


def _connected(S) -> bool:
    if S.size == 0 or not S.relations:
        return S.size <= 1
    adj = {a: set() for a in S.universe}
    for u, v in S.relations["E"]:
        adj[u].add(v)
        adj[v].add(u)
    seen, todo = {0}, [0]
    while todo:
        for w in adj[todo.pop()]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return len(seen) == S.size


@dataclass
class FamilyEnumeration:
    structures: list
    labeled: int
    per_size: dict


def enumerate_family(spec: StructureFamilySpec) -> FamilyEnumeration:
    """Isomorphism-class representatives in deterministic order (first labeled
    copy of each class, by size then edge bitmask)."""
    reps, labeled, per_size = [], 0, {}
    for n in range(spec.lo, spec.hi + 1):
        seen = set()
        count = 0
        for S in _labeled(spec.template, n):
            count += 1
            key = canonical_form(S)
            if key in seen:
                continue
            seen.add(key)
            if spec.connected and not _connected(S):
                continue
            reps.append(S)
        labeled += count
        per_size[n] = {"labeled": count, "classes": len(seen)}
    reps = [dataclasses.replace(S, name=f"{spec.template}#{i}") for i, S in enumerate(reps)]
    return FamilyEnumeration(reps, labeled, per_size)


@dataclass
class SearchResult:
    axiom: str
    family: str
    bounds: dict
    examined: int
    labeled: int
    per_size: dict
    witness: Optional[FiniteStructure] = None
    violation: Optional[dict] = None

    @property
    def found(self) -> bool:
        return self.witness is not None

    def to_dict(self) -> dict:
        out = {
            "axiom": self.axiom,
            "family": self.family,
            "bounds": dict(self.bounds),
            "examined": self.examined,
            "labeled": self.labeled,
            "per_size": {str(k): v for k, v in sorted(self.per_size.items())},
            "verdict": "witness" if self.found else "none up to bound",
        }
        if self.found:
            out["witness"] = {"structure": self.witness.dumps(), "index": self.witness.name,
                              "violation": self.violation}
        return out


def _first_violation(args):
    axiom, S, arity = args
    report = check_axiom(axiom, S, arity)
    return report.violations[0] if report.violations else None


def search_counterexample(axiom: str, family: StructureFamilySpec, arity: int = DEFAULT_ARITY,
                          jobs: int = 1) -> SearchResult:
    """First structure (in enumeration order) violating ``axiom``, if any.

    With ``jobs > 1`` structures are checked in worker processes; the
    reported witness is still the first one in enumeration order.
    """
    fam = enumerate_family(family)
    tasks = [(axiom, S, arity) for S in fam.structures]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_first_violation, tasks, chunksize=4))
    else:
        results = map(_first_violation, tasks)
    result = SearchResult(axiom.upper(), family.render(), {"arity": arity}, 0,
                          fam.labeled, fam.per_size)
    for S, violation in zip(fam.structures, results):
        result.examined += 1
        if violation is not None:
            result.witness, result.violation = S, violation
            break
    if result.witness is None:
        result.examined = len(fam.structures)
    return result
