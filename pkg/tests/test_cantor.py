import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from typicality.cantor import (
    CylinderFamily, EPStream, approx_eq, capture_check, code_family, in_level, join, measure_of,
    member,
    pair, project, schnorr_test_level, split, symmetric_difference, tailset_closure, unpair,
)

streams = st.builds(EPStream, st.text("01", max_size=8), st.text("01", min_size=1, max_size=5))
finite_sets = st.frozensets(st.integers(0, 30), max_size=8)


def expand_join(a, b):
    return {2 * n for n in a} | {2 * n + 1 for n in b}


def test_join_examples():
    E = EPStream()
    assert join(E, E) == E
    assert join(EPStream.from_set({0, 2}), EPStream.from_set({1})).to_set() == {0, 3, 4}
    assert join(EPStream.from_set({0, 2}), EPStream.from_set({1})).to_set() == expand_join({0, 2}, {1})
    assert join(EPStream.parse("ones"), E) == EPStream("", "10")


def test_split_examples():
    a, b = split(EPStream.from_set({0, 3, 4}))
    assert (a.to_set(), b.to_set()) == ({0, 2}, {1})
    assert split(EPStream()) == (EPStream(), EPStream())
    ones = EPStream.parse("ones")
    assert split(ones) == (ones, ones)


def test_coding_examples():
    assert pair(0, 0) == 0 and pair(0, 1) == 2 and pair(1, 0) == 1
    assert code_family([{1}, {0}]) == {1, 2}
    assert project({1, 2}, 0) == {1}


def test_approx_and_tailsets():
    assert approx_eq(EPStream.from_set({0, 1}), EPStream.from_set({1, 2}))
    assert not approx_eq(EPStream.parse("evens"), EPStream.parse("odds"))
    closure = tailset_closure([EPStream()], 2)
    assert [s.render() for s in closure] == ["{}", "{0}", "{1}", "{0,1}"]


def test_schnorr_examples():
    assert schnorr_test_level(0).words == ("00", "10")
    assert schnorr_test_level(1).words == ("0000", "0010", "1000", "1010")
    assert [len(schnorr_test_level(n)) for n in range(6)] == [2, 4, 8, 16, 32, 64]
    assert str(measure_of(schnorr_test_level(0))) == "1/2"
    assert str(measure_of(schnorr_test_level(1))) == "1/4"
    assert measure_of(["0", "00"]) == Fraction(1, 2)
    assert member(EPStream.parse("evens"), schnorr_test_level(5))
    assert not member(EPStream.parse("ones"), schnorr_test_level(0))


def test_measures_up_to_twenty():
    for n in range(21):
        fam = schnorr_test_level(n)
        assert measure_of(fam) == Fraction(1, 2 ** (n + 1))
        assert len(fam) == 2 ** (n + 1) and all(len(w) == 2 * n + 2 for w in fam)


def test_cylinders_prefix_free():
    fam = CylinderFamily(("0", "01", "1", "110"))
    assert fam.words == ("0", "1") and measure_of(fam) == 1


@settings(max_examples=300, deadline=None)
@given(streams, streams)
def test_join_split_inverse(a, b):
    assert split(join(a, b)) == (a, b)
    assert join(*split(a)) == a


@settings(max_examples=200, deadline=None)
@given(finite_sets, finite_sets)
def test_join_matches_expansion(a, b):
    assert join(EPStream.from_set(a), EPStream.from_set(b)).to_set() == expand_join(a, b)


@settings(max_examples=200, deadline=None)
@given(streams, streams, streams)
def test_approx_is_equivalence(a, b, c):
    assert approx_eq(a, a)
    assert approx_eq(a, b) == approx_eq(b, a)
    if approx_eq(a, b) and approx_eq(b, c):
        assert approx_eq(a, c)


@settings(max_examples=100, deadline=None)
@given(streams, st.integers(0, 3))
def test_tailset_closure_idempotent(x, bound):
    once = tailset_closure([x], bound)
    assert tailset_closure(once, bound) == once
    assert all(approx_eq(x, y) for y in once)


@settings(max_examples=200, deadline=None)
@given(st.lists(finite_sets, max_size=6))
def test_code_round_trip(sets):
    code = code_family(sets)
    assert [project(code, i) for i in range(len(sets))] == [frozenset(s) for s in sets]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_pair_unpair(i, m):
    assert unpair(pair(i, m)) == (i, m)


LEVELS = [schnorr_test_level(n) for n in range(9)]


@settings(max_examples=200, deadline=None)
@given(streams)
def test_level_predicate_matches_word_family(x):
    for n, fam in enumerate(LEVELS):
        assert in_level(x, n) == member(x, fam)


@settings(max_examples=100, deadline=None)
@given(streams)
def test_capture(a):
    assert capture_check(a, 20)


@settings(max_examples=100, deadline=None)
@given(streams, streams)
def test_symmetric_difference_bits(a, b):
    d = symmetric_difference(a, b)
    assert all(d.bit(i) == a.bit(i) ^ b.bit(i) for i in range(40))


def test_parse_and_render():
    assert EPStream.parse("pre=101,per=0").render() == "{0,2}"
    assert EPStream.parse("pre=,per=10") == EPStream.parse("evens")
    assert EPStream("1", "01") == EPStream("", "10")
    assert EPStream.parse("pre=0,per=1").render() == "pre=0,per=1"
