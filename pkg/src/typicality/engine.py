"""Typical properties and typical elements of finite structures.

A property is typical when its extension is a strict majority.  An element
is typical (relative to parameters ``b``) when it lies in no definable
strict-minority set; the smallest definable set containing ``a`` is its orbit
under the pointwise stabilizer of ``b``, so ``a`` is typical iff
``2 * |orbit(a)| >= n``.  The brute-force route enumerates formulas instead.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional, Sequence

from .enumeration import Enumeration, PointSpace, enumerate_meanings
from .model import FiniteStructure, eval_term, extension
from .symmetry import orbit_partition
from .syntax import App, Const, Eq, Formula, Param, Rel, Var

DEFAULT_BUDGET = 9
DEFAULT_POOL = ("x", "y", "z")
MODES = ("majority", "frechet")


@dataclass(frozen=True)
class PropertyClassification:
    extension: tuple
    complement_size: int
    typical: bool
    mode: str

    @property
    def verdict(self) -> str:
        return "typical" if self.typical else "non-typical"


@dataclass(frozen=True)
class TypicalityVerdict:
    element: int
    params: tuple
    typical: bool
    orbit: tuple
    universe_size: int
    witness: Optional[Formula] = None

    @property
    def verdict(self) -> str:
        return "typical" if self.typical else "non-typical"

    @property
    def certificate(self) -> str:
        rel = ">=" if self.typical else "<"
        return f"2*{len(self.orbit)} {rel} {self.universe_size}"


def is_majority(subset_size: int, n: int) -> bool:
    return subset_size > n - subset_size


def classify_property(S: FiniteStructure, phi: Formula, v: Mapping[str, int] | None = None,
                      mode: str = "majority", var: str = "x") -> PropertyClassification:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    ext = extension(S, phi, var, v)
    comp = S.size - len(ext)
    typical = is_majority(len(ext), S.size) if mode == "majority" else True
    return PropertyClassification(tuple(sorted(ext)), comp, typical, mode)


@lru_cache(maxsize=4096)
def _orbits(S: FiniteStructure, params: tuple):
    return orbit_partition(S, params)


def classify_element(S: FiniteStructure, a: int, params: Sequence[int] = ()) -> TypicalityVerdict:
    params = tuple(params)
    if not isinstance(a, int) or not 0 <= a < S.size:
        raise ValueError(f"element {a!r} out of range 0..{S.size - 1}")
    orbit = _orbits(S, params).block_of(a)
    return TypicalityVerdict(a, params, 2 * len(orbit) >= S.size, orbit, S.size)


def typical_set(S: FiniteStructure, params: Sequence[int] = ()) -> frozenset:
    params = tuple(params)
    return frozenset(a for a in S.universe if classify_element(S, a, params).typical)


# --- brute-force oracle ----------------------------------------------------

def param_names(params: Sequence[int]) -> tuple:
    return tuple(f"p{i + 1}" for i in range(len(params)))


def _base_terms(S, pool, names):
    terms = [Var(v) for v in pool] + [Param(p) for p in names]
    terms += [Const(c) for c in sorted(S.constants)]
    return terms


def _terms(S, pool, names):
    base = _base_terms(S, pool, names)
    out = list(base)
    for f in sorted(S.functions):
        k = S.arities[f]
        if k == 0:
            out.append(App(f, ()))
        else:
            out.extend(App(f, args) for args in itertools.product(base, repeat=k))
    return out


def finite_point_space(S: FiniteStructure, params: Sequence[int] = (),
                       pool: Sequence[str] = DEFAULT_POOL) -> PointSpace:
    """Assignments of ``pool`` (x first) as points; atoms over depth-one terms."""
    n, k = S.size, len(pool)
    names = param_names(params)
    env_params = dict(zip(names, params))
    points = list(itertools.product(range(n), repeat=k))  # index = lexicographic rank
    fibers = {}
    for pos, v in enumerate(pool):
        classes = {}
        for idx, pt in enumerate(points):
            key = pt[:pos] + pt[pos + 1:]
            classes[key] = classes.get(key, 0) | (1 << idx)
        fibers[v] = [classes[key] for key in sorted(classes)]
    terms = _terms(S, pool, names)
    envs = [dict(env_params, **dict(zip(pool, pt))) for pt in points]
    values = {t: [eval_term(S, t, env) for env in envs] for t in terms}

    def mask_of(pred):
        m = 0
        for idx in range(len(points)):
            if pred(idx):
                m |= 1 << idx
        return m

    atoms = [(Eq(Var(pool[0]), Var(pool[0])), (1 << len(points)) - 1)]
    for t1, t2 in itertools.combinations(terms, 2):
        v1, v2 = values[t1], values[t2]
        atoms.append((Eq(t1, t2), mask_of(lambda i: v1[i] == v2[i])))
    for r in sorted(S.relations):
        tuples = S.relations[r]
        for args in itertools.product(terms, repeat=S.arities[r]):
            cols = [values[t] for t in args]
            atoms.append((Rel(r, args), mask_of(lambda i: tuple(c[i] for c in cols) in tuples)))
    return PointSpace(len(points), fibers, atoms)


def _extension_of(space: PointSpace, mask: int, n: int, k: int) -> frozenset:
    # points (a, 0, ..., 0) sit at index a * n**(k-1)
    stride = n ** (k - 1)
    return frozenset(a for a in range(n) if mask >> (a * stride) & 1)


def _run(S, params, budget, pool):
    space = finite_point_space(S, params, pool)
    return space, enumerate_meanings(space, budget)


@lru_cache(maxsize=64)
def _cached_run(S, params: tuple, budget: int, pool: tuple):
    return _run(S, params, budget, pool)


def definable_extensions(S: FiniteStructure, params: Sequence[int] = (),
                         budget: int = DEFAULT_BUDGET,
                         pool: Sequence[str] = DEFAULT_POOL) -> dict:
    """Map each extension of a one-free-variable formula of size <= budget to
    its first-found (smallest) defining formula, in discovery order."""
    space, enum = _cached_run(S, tuple(params), budget, tuple(pool))
    out = {}
    keep = (pool[0],)
    for level in enum.levels:
        for mask in level:
            if space.depends_only_on(mask, keep):
                ext = _extension_of(space, mask, S.size, len(pool))
                out.setdefault(ext, enum.best[mask])
    return out


def enumerate_definable_sets(S: FiniteStructure, params: Sequence[int] = (),
                             budget: int = DEFAULT_BUDGET,
                             pool: Sequence[str] = DEFAULT_POOL) -> frozenset:
    return frozenset(definable_extensions(S, params, budget, pool))


def find_witness(S: FiniteStructure, a: int, params: Sequence[int] = (),
                 budget: int = DEFAULT_BUDGET,
                 pool: Sequence[str] = DEFAULT_POOL) -> Optional[Formula]:
    """Smallest enumerated formula whose extension holds ``a`` and is a strict minority."""
    for ext, formula in definable_extensions(S, params, budget, pool).items():
        if a in ext and 2 * len(ext) < S.size:
            return formula
    return None


def typical_set_by_enumeration(S: FiniteStructure, params: Sequence[int] = (),
                               budget: int = DEFAULT_BUDGET,
                               pool: Sequence[str] = DEFAULT_POOL) -> frozenset:
    """Elements lying in no enumerated strict-minority extension."""
    bad = set()
    for ext in enumerate_definable_sets(S, params, budget, pool):
        if 2 * len(ext) < S.size:
            bad |= ext
    return frozenset(S.universe) - bad
