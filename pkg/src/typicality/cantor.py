"""Exact Cantor-space combinatorics on eventually periodic streams.

A real (subset of the naturals) is represented as an infinite 0/1 stream
``u p p p ...``.  This class contains the finite sets and is closed under
interleaving, de-interleaving and symmetric difference, so every
construction here is exact.  Measures of finite unions of cylinders are
dyadic rationals.
"""

from __future__ import annotations

import itertools
import math
import operator
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


@dataclass(frozen=True)
class EPStream:
    """The stream ``pre + per + per + ...`` in canonical (shortest) form."""
    pre: str = ""
    per: str = "0"

    def __post_init__(self):
        if not self.per:
            raise ValueError("period must be nonempty")
        if set(self.pre + self.per) - {"0", "1"}:
            raise ValueError("streams are words over 0 and 1")
        pre, per = _canonical(self.pre, self.per)
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "per", per)

    @classmethod
    def from_set(cls, elements: Iterable[int]) -> "EPStream":
        elements = set(elements)
        if any(e < 0 for e in elements):
            raise ValueError("elements must be natural numbers")
        top = max(elements, default=-1)
        return cls("".join("1" if i in elements else "0" for i in range(top + 1)), "0")

    @classmethod
    def from_function(cls, bit, pre_len: int, per_len: int) -> "EPStream":
        word = "".join(str(bit(i)) for i in range(pre_len + per_len))
        return cls(word[:pre_len], word[pre_len:])

    @classmethod
    def parse(cls, text: str) -> "EPStream":
        """``"pre=101,per=0"``, ``"{0,3,4}"`` or ``"ones"``/``"evens"``/``"odds"``."""
        text = text.strip()
        named = {"empty": cls("", "0"), "ones": cls("", "1"),
                 "evens": cls("", "10"), "odds": cls("", "01")}
        if text in named:
            return named[text]
        if text.startswith("{") and text.endswith("}"):
            body = text[1:-1].strip()
            return cls.from_set(int(p) for p in body.split(",")) if body else cls()
        m = re.fullmatch(r"pre=([01]*)\s*,\s*per=([01]+)", text)
        if not m:
            raise ValueError(f"bad stream literal {text!r}")
        return cls(m.group(1), m.group(2))

    def bit(self, i: int) -> int:
        if i < len(self.pre):
            return int(self.pre[i])
        return int(self.per[(i - len(self.pre)) % len(self.per)])

    def prefix(self, length: int) -> str:
        return "".join(str(self.bit(i)) for i in range(length))

    @property
    def is_finite(self) -> bool:
        return self.per == "0"

    def to_set(self) -> frozenset:
        if not self.is_finite:
            raise ValueError("stream denotes an infinite set")
        return frozenset(i for i, c in enumerate(self.pre) if c == "1")

    def render(self) -> str:
        if self.is_finite:
            return "{" + ",".join(map(str, sorted(self.to_set()))) + "}"
        return f"pre={self.pre},per={self.per}"

    def __str__(self):
        return self.render()


def _primitive_root(word: str) -> str:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


def _canonical(pre: str, per: str) -> tuple:
    per = _primitive_root(per)
    while pre and pre[-1] == per[-1]:
        pre, per = pre[:-1], per[-1] + per[:-1]
    return pre, per


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _pointwise(a: EPStream, b: EPStream, op) -> EPStream:
    pre = max(len(a.pre), len(b.pre))
    per = _lcm(len(a.per), len(b.per))
    return EPStream.from_function(lambda i: op(a.bit(i), b.bit(i)), pre, per)


def symmetric_difference(a: EPStream, b: EPStream) -> EPStream:
    return _pointwise(a, b, lambda x, y: x ^ y)


def join(a: EPStream, b: EPStream) -> EPStream:
    """``{2n : n in a} u {2n+1 : n in b}``."""
    pre = max(len(a.pre), len(b.pre))
    per = _lcm(len(a.per), len(b.per))
    return EPStream.from_function(lambda i: (a if i % 2 == 0 else b).bit(i // 2), 2 * pre, 2 * per)


def split(x: EPStream) -> tuple:
    """The unique ``(x0, x1)`` with ``join(x0, x1) == x``."""
    pre = (len(x.pre) + 1) // 2
    per = len(x.per)
    even = EPStream.from_function(lambda n: x.bit(2 * n), pre, per)
    odd = EPStream.from_function(lambda n: x.bit(2 * n + 1), pre, per)
    return even, odd


def approx_eq(a: EPStream, b: EPStream) -> bool:
    """True iff ``a`` and ``b`` differ in finitely many places."""
    return symmetric_difference(a, b).is_finite


def tailset_closure(streams: Sequence[EPStream], bound: int) -> list:
    """All streams differing from a member only at positions ``< bound``."""
    out = set()
    for x in streams:
        head = x.prefix(bound)
        for bits in itertools.product("01", repeat=bound):
            word = "".join(bits)
            flip = EPStream.from_set(i for i in range(bound) if word[i] != head[i])
            out.add(symmetric_difference(x, flip))
    return sorted(out, key=lambda s: (len(s.pre) + len(s.per), s.pre, s.per))


# --- coding finite families ------------------------------------------------

def pair(i: int, m: int) -> int:
    """Cantor pairing <i, m> = (i+m)(i+m+1)/2 + m."""
    if i < 0 or m < 0:
        raise ValueError("pairing is defined on natural numbers")
    return (i + m) * (i + m + 1) // 2 + m


def unpair(c: int) -> tuple:
    w = (math.isqrt(8 * c + 1) - 1) // 2
    m = c - w * (w + 1) // 2
    return w - m, m


def code_family(sets: Sequence[Iterable[int]]) -> frozenset:
    """``{<i, m> : m in sets[i]}``, indices from 0."""
    return frozenset(pair(i, m) for i, s in enumerate(sets) for m in s)


def project(code: Iterable[int], i: int) -> frozenset:
    """``{m : <i, m> in code}``."""
    out = set()
    for c in code:
        j, m = unpair(c)
        if j == i:
            out.add(m)
    return frozenset(out)


# --- cylinders and measure -------------------------------------------------

@dataclass(frozen=True)
class Dyadic:
    """Exact p / 2**k in lowest terms."""
    value: Fraction

    def __post_init__(self):
        v = Fraction(self.value)
        d = v.denominator
        if d & (d - 1):
            raise ValueError(f"{v} is not dyadic")
        object.__setattr__(self, "value", v)

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def exponent(self) -> int:
        return self.value.denominator.bit_length() - 1

    def __str__(self):
        return f"{self.value.numerator}/{self.value.denominator}"

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.value == other.value
        return self.value == other

    def __hash__(self):
        return hash(self.value)


@dataclass(frozen=True)
class CylinderFamily:
    """A finite union of basic clopen sets, stored prefix-free and sorted."""
    words: tuple = ()

    def __post_init__(self):
        words = sorted(self.words)
        if "".join(words).encode().translate(None, b"01"):
            raise ValueError("cylinder words are 0/1 strings")
        if any(map(operator.eq, words, words[1:])):
            words = sorted(set(words))
        lengths = sorted(set(map(len, words)))
        if len(lengths) > 1:
            present = set(words)
            words = [w for w in words if not any(w[:k] in present for k in lengths if k < len(w))]
        object.__setattr__(self, "words", tuple(words))

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(self.words)


def measure_of(family: CylinderFamily | Iterable[str]) -> Dyadic:
    if not isinstance(family, CylinderFamily):
        family = CylinderFamily(tuple(family))
    if not family.words:
        return Dyadic(Fraction(0))
    counts = Counter(map(len, family.words))
    top = max(counts)
    return Dyadic(Fraction(sum(c << (top - k) for k, c in counts.items()), 1 << top))


def member(x: EPStream, family: CylinderFamily) -> bool:
    return any(x.prefix(len(w)) == w for w in family.words)


def schnorr_test_level(n: int) -> CylinderFamily:
    """Streams vanishing at every odd position 2i+1, i <= n: the 2^(n+1)
    words i0 0 i1 0 ... in 0 of length 2n+2."""
    if n < 0:
        raise ValueError("level must be a natural number")
    words = [""]
    for _ in range(n + 1):
        words = [w + s for w in words for s in ("00", "10")]
    return CylinderFamily(tuple(words))


def in_level(x: EPStream, n: int) -> bool:
    """Membership in level ``n`` read off the defining condition: x(2i+1) = 0
    for every i <= n.  Agrees with ``member(x, schnorr_test_level(n))``."""
    return all(x.bit(2 * i + 1) == 0 for i in range(n + 1))


def capture_check(a: EPStream, depth: int) -> bool:
    """``join(a, empty)`` lies in every level up to ``depth``."""
    x = join(a, EPStream())
    return all(in_level(x, n) for n in range(depth + 1))
