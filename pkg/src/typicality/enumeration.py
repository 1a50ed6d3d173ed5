"""Exhaustive formula enumeration up to AST size, deduplicated by meaning.

A meaning is a bitmask over a finite point space (assignments of a variable
pool, or complete order types).  Because every connective acts on meanings
compositionally, keeping the first (smallest) formula per meaning at each
size still reaches every meaning any formula of that size has.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .syntax import And, Exists, Forall, Formula, Not, Or

CONNECTIVES = ("not", "and", "or", "exists", "forall")


class EnumerationLimit(RuntimeError):
    """The number of distinct meanings exceeded the configured cap."""


@dataclass
class PointSpace:
    """Points of a finite semantic domain.

    ``fibers[v]`` partitions the points into classes that agree everywhere
    except possibly on variable ``v``; quantifying ``v`` saturates a mask
    along these classes.
    """
    size: int
    fibers: dict
    atoms: list = field(default_factory=list)

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def exists(self, var: str, mask: int) -> int:
        out = 0
        for f in self.fibers[var]:
            if mask & f:
                out |= f
        return out

    def forall(self, var: str, mask: int) -> int:
        return self.full & ~self.exists(var, self.full & ~mask)

    def depends_only_on(self, mask: int, keep: Sequence[str]) -> bool:
        return all(self.exists(v, mask) == mask for v in self.fibers if v not in keep)


@dataclass
class Enumeration:
    best: dict
    levels: list
    budget: int

    def meanings(self):
        return self.best.keys()


def enumerate_meanings(space: PointSpace, budget: int,
                       connectives: Sequence[str] = CONNECTIVES,
                       max_meanings: int | None = None) -> Enumeration:
    if budget < 1:
        raise ValueError("budget must be at least 1")
    best: dict = {}
    levels: list = [[] for _ in range(budget + 1)]
    full = space.full
    qvars = sorted(space.fibers)

    def add(mask, formula, k):
        if mask not in best:
            best[mask] = formula
            levels[k].append(mask)
            if max_meanings is not None and len(best) > max_meanings:
                raise EnumerationLimit(f"more than {max_meanings} distinct meanings at size {k}")

    for formula, mask in space.atoms:
        add(mask, formula, 1)
    for k in range(2, budget + 1):
        prev = list(levels[k - 1])
        if "not" in connectives:
            for m in prev:
                add(full & ~m, Not(best[m]), k)
        for v in qvars:
            for m in prev:
                if "exists" in connectives:
                    add(space.exists(v, m), Exists(v, best[m]), k)
                if "forall" in connectives:
                    add(space.forall(v, m), Forall(v, best[m]), k)
        for i in range(1, k - 1):
            j = k - 1 - i
            if i > j:
                break
            left, right = levels[i], levels[j]
            for ia, a in enumerate(left):
                fa = best[a]
                for b in (right[ia:] if i == j else right):
                    if "and" in connectives:
                        add(a & b, And(fa, best[b]), k)
                    if "or" in connectives:
                        add(a | b, Or(fa, best[b]), k)
    return Enumeration(best, levels, budget)
