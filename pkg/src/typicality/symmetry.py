"""Automorphisms, pointwise stabilizers, orbits and definable closure.

In a finite structure a set is definable with parameters ``b`` exactly when
it is invariant under every automorphism fixing each ``b_i``; orbits of that
stabilizer are therefore the atoms of the definable-set lattice, and the
definable closure is the union of the singleton orbits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .model import FiniteStructure

MAX_LISTED = 10


@dataclass(frozen=True)
class AutomorphismGroup:
    elements: tuple
    fixed: tuple

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, perm):
        return tuple(perm) in set(self.elements)

    def verify(self, full: bool = True) -> None:
        """Check identity, inverses and closure; ``full=False`` samples closure."""
        elems = set(self.elements)
        n = len(self.elements[0])
        if tuple(range(n)) not in elems:
            raise AssertionError("identity missing")
        for p in self.elements:
            if inverse(p) not in elems:
                raise AssertionError(f"inverse of {p} missing")
            for f in self.fixed:
                if p[f] != f:
                    raise AssertionError(f"{p} moves fixed element {f}")
        left = self.elements if full else self.elements[:32]
        for p in left:
            for q in self.elements:
                if compose(p, q) not in elems:
                    raise AssertionError(f"product of {p} and {q} missing")


@dataclass(frozen=True)
class OrbitPartition:
    blocks: tuple
    fixed: tuple

    def block_of(self, a: int) -> tuple:
        for b in self.blocks:
            if a in b:
                return b
        raise KeyError(a)

    def as_lists(self) -> list:
        return [list(b) for b in self.blocks]


def compose(p: Sequence[int], q: Sequence[int]) -> tuple:
    """(p o q)(i) = p[q[i]]."""
    return tuple(p[i] for i in q)


def inverse(p: Sequence[int]) -> tuple:
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v] = i
    return tuple(inv)


def _check_elements(S: FiniteStructure, elems) -> tuple:
    elems = tuple(elems)
    for e in elems:
        if not isinstance(e, int) or not 0 <= e < S.size:
            raise ValueError(f"element {e!r} out of range 0..{S.size - 1}")
    return elems


def _incidence(S: FiniteStructure):
    """Per element, the relation tuples and function rows it takes part in."""
    inc = [[] for _ in S.universe]
    for r in sorted(S.relations):
        for t in S.relations[r]:
            for pos, e in enumerate(t):
                inc[e].append(("r", r, pos, t))
    for f in sorted(S.functions):
        for args, val in S.functions[f].items():
            row = args + (val,)
            for pos, e in enumerate(row):
                inc[e].append(("f", f, pos, row))
    return inc


def refined_coloring(S: FiniteStructure, fixed: Sequence[int] = ()) -> tuple:
    """Iterated colour refinement, canonical (isomorphism-invariant) colour ids."""
    pinned = {}
    for i, e in enumerate(fixed):
        pinned.setdefault(e, i)
    const_of = {}
    for c, e in S.constants.items():
        const_of.setdefault(e, []).append(c)
    colors = [(pinned.get(a, -1), tuple(sorted(const_of.get(a, ())))) for a in S.universe]
    colors = _relabel(colors)
    inc = _incidence(S)
    while True:
        sigs = []
        for a in S.universe:
            sig = sorted((kind, sym, pos, tuple(colors[e] for e in row))
                         for kind, sym, pos, row in inc[a])
            sigs.append((colors[a], tuple(sig)))
        new = _relabel(sigs)
        if len(set(new)) == len(set(colors)):
            return tuple(new)
        colors = new


def _relabel(values) -> list:
    order = {v: i for i, v in enumerate(sorted(set(values)))}
    return [order[v] for v in values]


class _Search:
    def __init__(self, S: FiniteStructure, fixed: Sequence[int]):
        self.S = S
        self.n = S.size
        pinned = list(dict.fromkeys(list(fixed) + sorted(set(S.constants.values()))))
        self.colors = refined_coloring(S, pinned)
        # constraints checked when their last element (in 0..n-1 order) is assigned
        self.rel_checks = [[] for _ in S.universe]
        for r, tuples in S.relations.items():
            for t in tuples:
                if t:
                    self.rel_checks[max(t)].append((tuples, t))
        self.fn_checks = [[] for _ in S.universe]
        for f, table in S.functions.items():
            for args, val in table.items():
                self.fn_checks[max(args + (val,))].append((table, args, val))

    def consistent(self, img, a) -> bool:
        for tuples, t in self.rel_checks[a]:
            if tuple(img[e] for e in t) not in tuples:
                return False
        for table, args, val in self.fn_checks[a]:
            if table[tuple(img[e] for e in args)] != img[val]:
                return False
        return True

    def run(self, prescribed: dict | None = None) -> Iterator[tuple]:
        n = self.n
        img = [None] * n
        used = [False] * n
        prescribed = prescribed or {}
        by_color = {}
        for b in range(n):
            by_color.setdefault(self.colors[b], []).append(b)

        def rec(a):
            if a == n:
                yield tuple(img)
                return
            cands = by_color[self.colors[a]]
            if a in prescribed:
                cands = [prescribed[a]] if prescribed[a] in cands else []
            for b in cands:
                if used[b]:
                    continue
                img[a], used[b] = b, True
                if self.consistent(img, a):
                    yield from rec(a + 1)
                used[b] = False
            img[a] = None

        yield from rec(0)


def is_automorphism(S: FiniteStructure, perm: Sequence[int]) -> bool:
    perm = tuple(perm)
    if sorted(perm) != list(S.universe):
        return False
    for tuples in S.relations.values():
        if {tuple(perm[e] for e in t) for t in tuples} != tuples:
            return False
    for table in S.functions.values():
        for args, val in table.items():
            if table[tuple(perm[e] for e in args)] != perm[val]:
                return False
    return all(perm[e] == e for e in S.constants.values())


def stabilizer_group(S: FiniteStructure, fixed: Sequence[int] = ()) -> AutomorphismGroup:
    """All automorphisms of ``S`` fixing each element of ``fixed``, sorted."""
    fixed = _check_elements(S, fixed)
    if S.size > MAX_LISTED:
        raise ValueError(f"full group listing is limited to n <= {MAX_LISTED}")
    elems = tuple(sorted(_Search(S, fixed).run()))
    group = AutomorphismGroup(elems, fixed)
    group.verify(full=len(elems) <= 64)
    return group


def _union_find_orbits(n, perms) -> tuple:
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for p in perms:
        for i, j in enumerate(p):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    blocks = {}
    for i in range(n):
        blocks.setdefault(find(i), []).append(i)
    return tuple(sorted(tuple(b) for b in blocks.values()))


def orbit_partition(S: FiniteStructure, fixed: Sequence[int] = ()) -> OrbitPartition:
    """Orbits of the pointwise stabilizer of ``fixed``, blocks ascending."""
    fixed = _check_elements(S, fixed)
    if S.size <= MAX_LISTED:
        perms = stabilizer_group(S, fixed).elements
    else:
        # one witness automorphism per reachable image suffices for orbits
        search = _Search(S, fixed)
        perms = []
        for a in S.universe:
            for b in range(a + 1, S.size):
                if search.colors[a] == search.colors[b]:
                    perm = next(search.run({a: b}), None)
                    if perm is not None:
                        perms.append(perm)
    return OrbitPartition(_union_find_orbits(S.size, perms), fixed)


def definable_closure(S: FiniteStructure, fixed: Sequence[int] = ()) -> frozenset:
    """Elements with a singleton orbit: those definable from ``fixed``."""
    return frozenset(b[0] for b in orbit_partition(S, fixed).blocks if len(b) == 1)


def is_invariant(blocks: tuple, subset) -> bool:
    """True iff ``subset`` is a union of orbit blocks."""
    subset = set(subset)
    return all(set(b) <= subset or not (set(b) & subset) for b in blocks)


def canonical_form(S: FiniteStructure) -> tuple:
    """Isomorphism-invariant encoding of ``S`` (minimum over colour-respecting relabelings)."""
    colors = refined_coloring(S)
    order = sorted(S.universe, key=lambda a: colors[a])
    classes = [list(g) for _, g in itertools.groupby(order, key=lambda a: colors[a])]
    best = None
    for choice in itertools.product(*(itertools.permutations(c) for c in classes)):
        sequence = [a for block in choice for a in block]
        relabel = {a: i for i, a in enumerate(sequence)}
        enc = (
            S.size,
            tuple((r, tuple(sorted(tuple(relabel[e] for e in t) for t in S.relations[r])))
                  for r in sorted(S.relations)),
            tuple((f, tuple(sorted((tuple(relabel[e] for e in a), relabel[v])
                                   for a, v in S.functions[f].items())))
                  for f in sorted(S.functions)),
            tuple((c, relabel[S.constants[c]]) for c in sorted(S.constants)),
        )
        if best is None or enc < best:
            best = enc
    return best
