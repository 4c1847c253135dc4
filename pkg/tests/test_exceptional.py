from fractions import Fraction

import pytest

from symplectic import exceptional
from symplectic.blowup import blow_up
from symplectic.errors import InfiniteExceptionalSetError, PreconditionError
from symplectic.exceptional import (
    ClassFormatError,
    CP2BlowupClass,
    ExceptionalSet,
    cp2_exceptional_classes,
    cremona_move,
    cremona_reduce,
    enumerate_exceptional_cp2,
    exceptional_set_for,
    exceptional_set_ruled,
    is_exceptional_cp2,
    is_numerically_exceptional,
    positivity_against,
)
from symplectic.model_core import CohomologyFunctional, H2Class, make_ruled, make_s2xs2, pair

from tests.oracles import brute_force_exceptional

F = Fraction
C = CP2BlowupClass.parse

EXCEPTIONAL_COUNTS = [0, 1, 3, 6, 10, 16, 27, 56, 240]


def test_parse_and_format():
    c = C("3;2,1,1,1,1,1,1")
    assert c.d == 3
    assert c.m == (2, 1, 1, 1, 1, 1, 1)
    assert str(c) == "3;2,1,1,1,1,1,1"
    assert C("2") == CP2BlowupClass(2, ())
    assert C(" 0 ; -1 , 0 ") == CP2BlowupClass(0, (-1, 0))


@pytest.mark.parametrize("text", ["", "x;1", "1;1,,2", "1;a", "1,2"])
def test_parse_rejects(text):
    with pytest.raises(ClassFormatError):
        C(text)


def test_h2_coordinates():
    c = C("1;1,1")
    assert c.to_h2() == H2Class.of(1, -1, -1)
    assert CP2BlowupClass.from_h2(c.to_h2()) == c
    assert CP2BlowupClass.exceptional_divisor(1, 3) == C("0;0,-1,0")


def test_numerically_exceptional_on_models(cp2):
    one = blow_up(cp2, 1).model
    assert is_numerically_exceptional(one, C("0;-1").to_h2())
    two = blow_up(cp2, 2).model
    assert is_numerically_exceptional(two, C("1;1,1").to_h2())
    assert not is_numerically_exceptional(two, C("2;1,1").to_h2())


def test_class_arithmetic():
    c = C("1;1,1")
    assert c.self_intersection() == -1
    assert c.c1() == 1
    assert c.dot(C("0;-1,0")) == 1
    assert not C("1;1,1,1").is_numerically_exceptional()


@pytest.mark.parametrize(
    "before,indices,after",
    [
        ("2;1,1,1,1,1", (0, 1, 2), "1;0,0,0,1,1"),
        ("1;1,1,0", (0, 1, 2), "0;0,0,-1"),
    ],
)
def test_cremona_move(before, indices, after):
    assert cremona_move(C(before), indices) == C(after)


@pytest.mark.parametrize(
    "text,indices",
    [("1;1,1", (0, 1, 2)), ("1;1,1,0", (0, 0, 1)), ("1;1,1,0", (0, 1, 3)), ("1;1,1,0", (-1, 0, 1))],
)
def test_cremona_move_rejects(text, indices):
    with pytest.raises(PreconditionError):
        cremona_move(C(text), indices)


def test_cremona_move_invariants(rng):
    for _ in range(10_000):
        N = rng.randint(3, 9)
        c = CP2BlowupClass(rng.randint(-5, 10), tuple(rng.randint(-3, 6) for _ in range(N)))
        indices = tuple(rng.sample(range(N), 3))
        moved = cremona_move(c, indices)
        assert moved.self_intersection() == c.self_intersection()
        assert moved.c1() == c.c1()
        assert cremona_move(moved, indices) == c


def test_cremona_reduce_two_moves():
    reduction = cremona_reduce(C("2;1,1,1,1,1"))
    assert reduction.trace == ((0, 1, 2), (3, 4, 0))
    assert reduction.reduced == C("0;-1,0,0,0,0")
    assert reduction.exceptional


def test_cremona_reduce_standard_class():
    reduction = cremona_reduce(C("0;-1,0,0"))
    assert reduction.trace == ()
    assert reduction.reduced == C("0;-1,0,0")
    assert reduction.exceptional

    padded = cremona_reduce(C("0;-1"))
    assert padded.original == C("0;-1")
    assert padded.reduced == C("0;-1,0,0")
    assert padded.exceptional


def test_cremona_reduce_seven_points():
    reduction = cremona_reduce(C("3;2,1,1,1,1,1,1"))
    assert reduction.exceptional
    assert reduction.reduced.is_standard()


def test_cremona_reduce_rejects_non_numeric():
    with pytest.raises(PreconditionError):
        cremona_reduce(C("1;1,1,1"))


@pytest.mark.parametrize("N", [2, 3, 5, 9, 12])
def test_line_through_two_points_is_exceptional(N):
    assert is_exceptional_cp2(C("1;1,1").padded(N))


def test_is_exceptional_cp2():
    assert is_exceptional_cp2(C("3;2,1,1,1,1,1,1"))
    assert not is_exceptional_cp2(C("1;1,1,1"))
    # numerically exceptional, but of negative degree
    negative = CP2BlowupClass(-3, (-1,) * 10)
    assert negative.is_numerically_exceptional()
    assert not is_exceptional_cp2(negative)


@pytest.mark.parametrize("N,count", list(enumerate(EXCEPTIONAL_COUNTS)))
def test_enumeration_counts(N, count):
    result = enumerate_exceptional_cp2(N)
    assert len(result) == count
    assert result.complete


def test_enumeration_two_points():
    assert cp2_exceptional_classes(2) == (C("0;-1,0"), C("0;0,-1"), C("1;1,1"))


def test_enumeration_refuses_nine_points():
    with pytest.raises(InfiniteExceptionalSetError, match="exceptional set infinite"):
        enumerate_exceptional_cp2(9)
    with pytest.raises(PreconditionError):
        enumerate_exceptional_cp2(-1)


@pytest.mark.parametrize("N", [6, 7, 8])
def test_enumerated_classes_are_exceptional_and_pair_non_negatively(N):
    classes = cp2_exceptional_classes(N)
    assert list(classes) == sorted(classes)
    for c in classes:
        assert c.is_numerically_exceptional()
    for i, a in enumerate(classes):
        for b in classes[i + 1:]:
            assert a.dot(b) >= 0


@pytest.mark.parametrize("N", range(9))
def test_enumeration_matches_brute_force(N):
    expected = [CP2BlowupClass(d, m) for d, m in brute_force_exceptional(N)]
    assert list(cp2_exceptional_classes(N)) == expected


def test_enumeration_independent_of_threads(monkeypatch):
    monkeypatch.setattr(exceptional, "_ENUMERATED", {})
    single = cp2_exceptional_classes(7, threads=1)
    monkeypatch.setattr(exceptional, "_ENUMERATED", {})
    several = cp2_exceptional_classes(7, threads=4)
    assert single == several


def test_ruled_exceptional_set():
    result = exceptional_set_ruled(1, 1)
    assert result.classes == (H2Class.of(0, 0, 1), H2Class.of(0, 1, -1))
    assert result.complete
    assert len(exceptional_set_ruled(2, 0)) == 0


def test_ruled_exceptional_set_is_numerically_exceptional():
    model = blow_up(make_ruled(1, 3, 2), 3).model
    result = exceptional_set_ruled(1, 3)
    assert len(result) == 6
    for E in result:
        assert is_numerically_exceptional(model, E)


def test_ruled_exceptional_set_rejects_genus_zero():
    with pytest.raises(PreconditionError):
        exceptional_set_ruled(0, 2)


def test_positivity_against():
    classes = enumerate_exceptional_cp2(2)
    ok = positivity_against(CohomologyFunctional.of(1, F(2, 5), F(2, 5)), classes)
    assert ok.ok
    assert ok.violator is None

    bad = positivity_against(CohomologyFunctional.of(1, F(3, 5), F(3, 5)), classes)
    assert not bad.ok
    assert bad.violator == H2Class.of(1, -1, -1)

    assert positivity_against(CohomologyFunctional.of(1), ExceptionalSet((), True)).ok


def test_exceptional_set_for_known_families(cp2):
    assert exceptional_set_for(cp2) == ExceptionalSet((), True)
    assert len(exceptional_set_for(blow_up(cp2, 3).model)) == 6
    ruled = exceptional_set_for(blow_up(make_ruled(1, 3, 2), 2).model)
    assert len(ruled) == 4
    assert ruled.complete


def test_exceptional_set_for_searches_otherwise():
    model = blow_up(make_s2xs2(1, 1), 1).model
    found = exceptional_set_for(model, coeff_max=3)
    assert not found.complete
    assert found.classes == (H2Class.of(0, 0, 1), H2Class.of(0, 1, -1), H2Class.of(1, 0, -1))
    for E in found:
        assert pair(model.lattice, E, E) == -1
