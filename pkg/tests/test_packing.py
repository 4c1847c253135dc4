from fractions import Fraction

import pytest

from symplectic.blowup import RadiiList, blowup_form_class, blow_up, correspond_s2xs2_to_cp2
from symplectic.errors import (
    HypothesisNotAssertedError,
    PreconditionError,
    UncertifiedInvariantError,
)
from symplectic.exceptional import CP2BlowupClass, enumerate_exceptional_cp2, positivity_against
from symplectic.model_core import (
    CohomologyFunctional,
    H2Class,
    IntersectionLattice,
    ManifoldModel,
    ModelFlags,
    make_cp2,
    make_ruled,
    make_s2xs2,
)
from symplectic.packing import (
    form_class_certificate,
    n_threshold,
    packing_feasible,
    packing_number,
    ruled_packing_feasible,
    thm_radii_feasible,
    vn_exact,
    vn_exact_cp2,
    vn_exact_ruled,
    vn_exact_s2xs2,
    vn_lower_bound,
    vn_report,
)

F = Fraction

CP2_TABLE = [F(1), F(1, 2), F(3, 4), F(1), F(4, 5), F(24, 25), F(63, 64), F(288, 289), F(1)]
S2XS2_EQUAL_TABLE = [F(1, 2), F(1), F(2, 3), F(8, 9), F(9, 10), F(48, 49), F(224, 225), F(1)]


def two_positive(flags=None):
    return ManifoldModel(
        lattice=IntersectionLattice(((1, 0, 0), (0, 1, 0), (0, 0, -1))),
        c1=CohomologyFunctional.of(3, 3, 1),
        omega=CohomologyFunctional.of(1, 1, 0),
        flags=flags or ModelFlags(),
    )


@pytest.mark.parametrize("N,expected", [(5, F(5, 9)), (9, F(1)), (30, F(1))])
def test_vn_lower_bound_cp2(cp2, N, expected):
    assert vn_lower_bound(cp2, N) == expected


def test_vn_lower_bound_s2xs2(s2xs2_equal):
    assert vn_lower_bound(s2xs2_equal, 4) == F(1, 2)


def test_vn_lower_bound_empty_model(enriques):
    assert vn_lower_bound(enriques, 1) == 1


@pytest.mark.parametrize("N", [0, -3])
def test_vn_lower_bound_rejects_count(cp2, N):
    with pytest.raises(PreconditionError):
        vn_lower_bound(cp2, N)


def test_vn_lower_bound_is_monotone(cp2, s2xs2_equal, s2xs2_1_2, ruled_1_3_2, enriques):
    for model in (cp2, s2xs2_equal, s2xs2_1_2, ruled_1_3_2, enriques):
        values = [vn_lower_bound(model, N) for N in range(1, 65)]
        assert values == sorted(values)


def test_vn_report_flags_search_bounds():
    report = vn_report(two_positive(), 1)
    assert not report.lower_certified
    assert report.v_lower == F(1, 338)
    assert report.v_exact is None


@pytest.mark.parametrize("N,expected", list(enumerate(CP2_TABLE, start=1)))
def test_cp2_table(N, expected):
    report = vn_exact_cp2(1, N)
    assert report.v_exact == expected
    assert report.full == (expected == 1)


@pytest.mark.parametrize(
    "N,obstructor",
    [
        (2, "1;1,1"),
        (3, "1;1,1,0"),
        (5, "2;1,1,1,1,1"),
        (6, "2;1,1,1,1,1,0"),
        (7, "3;2,1,1,1,1,1,1"),
        (8, "6;3,2,2,2,2,2,2,2"),
    ],
)
def test_cp2_obstructors(N, obstructor):
    assert vn_exact_cp2(1, N).obstructor == CP2BlowupClass.parse(obstructor)


@pytest.mark.parametrize("N", [1, 4, 9])
def test_cp2_full_packings_have_no_obstructor(N):
    report = vn_exact_cp2(1, N)
    assert report.full
    assert report.obstructor is None


@pytest.mark.parametrize("scale", [F(1, 3), 2, F(7, 5)])
def test_cp2_scale_invariance(scale):
    for N in range(1, 10):
        assert vn_exact_cp2(scale, N).v_exact == CP2_TABLE[N - 1]


def test_cp2_exact_dominates_lower_bound():
    for N in range(1, 65):
        report = vn_exact_cp2(1, N)
        if N >= 9:
            assert report.v_exact == report.v_lower == 1
        else:
            assert report.v_exact > report.v_lower


@pytest.mark.parametrize("N,expected", list(enumerate(S2XS2_EQUAL_TABLE, start=1)))
def test_s2xs2_equal_table(N, expected):
    assert vn_exact_s2xs2(1, 1, N).v_exact == expected


@pytest.mark.parametrize(
    "N,obstructor",
    [(1, "0;0,-1"), (3, "1;0,0,1,1"), (4, "2;1,1,1,1,1"), (5, "2;1,0,1,1,1,1"), (6, "3;1,1,2,1,1,1,1")],
)
def test_s2xs2_equal_obstructors(N, obstructor):
    assert vn_exact_s2xs2(1, 1, N).obstructor == CP2BlowupClass.parse(obstructor)


def test_s2xs2_scale_invariance():
    for N in range(1, 8):
        assert vn_exact_s2xs2(3, 3, N).v_exact == S2XS2_EQUAL_TABLE[N - 1]


def test_s2xs2_beyond_enumeration():
    # threshold for (1, 2) is 16
    assert vn_exact_s2xs2(1, 2, 8).v_exact is None
    assert vn_exact_s2xs2(1, 2, 16).v_exact == 1
    assert vn_exact_s2xs2(1, 1, 20).full


def test_s2xs2_exact_dominates_lower_bound():
    for alpha, beta in [(1, 1), (1, 2), (2, 3)]:
        for N in range(1, 8):
            report = vn_exact_s2xs2(alpha, beta, N)
            assert report.v_exact >= report.v_lower


def test_vn_exact_ruled():
    full = vn_exact_ruled(1, 2, 3, 3)
    assert full.v_exact == 1
    assert full.full

    two = vn_exact_ruled(1, 2, 3, 2)
    assert two.v_exact == F(2, 3)
    assert not two.full
    assert two.obstructor == H2Class.of(0, 1, -1, 0)


def test_vn_exact_dispatch(cp2, ruled_1_3_2):
    assert vn_exact(cp2, 8).v_exact == F(288, 289)
    assert vn_exact(make_s2xs2(1, 1), 3).v_exact == F(2, 3)
    assert vn_exact(ruled_1_3_2, 2).v_exact == F(2, 3)
    with pytest.raises(PreconditionError):
        vn_exact(blow_up(cp2, 1).model, 2)


def test_n_threshold(cp2, s2xs2_equal, ruled_1_3_2, enriques):
    assert n_threshold(cp2) == 9
    assert n_threshold(s2xs2_equal) == 8
    assert n_threshold(ruled_1_3_2) == 12
    assert n_threshold(enriques) == 1


def test_n_threshold_needs_certified_d():
    with pytest.raises(UncertifiedInvariantError):
        n_threshold(two_positive())


def test_packing_numbers(cp2, s2xs2_equal, s2xs2_1_2, ruled_1_3_2, enriques):
    assert packing_number(cp2).exact == 9
    assert packing_number(make_cp2(F(5, 2))).exact == 9
    equal = packing_number(s2xs2_equal)
    assert equal.exact == 8
    assert equal.upper == 8
    bracket = packing_number(s2xs2_1_2)
    assert (bracket.lower, bracket.upper, bracket.exact) == (4, 16, None)
    assert packing_number(make_s2xs2(2, 4)) == bracket
    assert packing_number(ruled_1_3_2).exact == 3
    assert packing_number(enriques).exact == 1


def test_packing_number_of_other_models(cp2):
    with pytest.raises(PreconditionError, match="only Thm 2.1 upper bound available"):
        packing_number(blow_up(cp2, 2).model)


def test_ruled_packing_number_matches_first_full_packing(rng):
    for _ in range(100):
        genus = rng.randint(1, 4)
        alpha = F(rng.randint(1, 9), rng.randint(1, 4))
        beta = F(rng.randint(1, 9), rng.randint(1, 4))
        N = 1
        while vn_exact_ruled(genus, alpha, beta, N).v_exact != 1:
            N += 1
        assert packing_number(make_ruled(genus, beta, alpha)).exact == N


@pytest.mark.parametrize(
    "genus,alpha,beta,radii,expected",
    [
        (1, 1, 1, [F(4, 5)] * 3, True),
        (1, 1, 1, [F(1)], False),
        (2, 1, F(1, 10), [F(3, 5)], False),
        (1, 2, 3, [], True),
    ],
)
def test_ruled_packing_feasible(genus, alpha, beta, radii, expected):
    assert ruled_packing_feasible(genus, alpha, beta, RadiiList(tuple(radii))) is expected


def test_ruled_packing_feasible_rejects_bad_input():
    with pytest.raises(PreconditionError):
        ruled_packing_feasible(0, 1, 1, RadiiList())
    with pytest.raises(PreconditionError):
        ruled_packing_feasible(1, 0, 1, RadiiList())


def test_thm_radii_feasible(cp2):
    assert thm_radii_feasible(cp2, RadiiList.equal(F(33, 100), 9))
    assert not thm_radii_feasible(cp2, RadiiList.of(F(1, 3)))
    assert thm_radii_feasible(cp2, RadiiList())


def test_thm_radii_feasible_on_empty_model(enriques):
    # 2Vol = 3
    assert thm_radii_feasible(enriques, RadiiList.of(1, 1))
    assert not thm_radii_feasible(enriques, RadiiList.of(1, 1, 1))


def test_thm_radii_feasible_needs_class_C():
    with pytest.raises(HypothesisNotAssertedError):
        thm_radii_feasible(two_positive(), RadiiList.of(F(1, 100)))
    with pytest.raises(UncertifiedInvariantError):
        thm_radii_feasible(two_positive(ModelFlags(in_class_C=True)), RadiiList.of(F(1, 100)))


def test_packing_feasible_cp2(cp2):
    ok = packing_feasible(cp2, RadiiList.equal(F(2, 5), 2))
    assert ok.feasible
    assert ok.exact
    assert ok.method == "cp2-exceptional"

    bad = packing_feasible(cp2, RadiiList.equal(F(3, 5), 2))
    assert not bad.feasible
    assert bad.exact
    assert bad.violator == CP2BlowupClass.parse("1;1,1")

    too_big = packing_feasible(cp2, RadiiList.of(1))
    assert not too_big.feasible
    assert too_big.violator is None
    assert "volume" in too_big.reason


def test_packing_feasible_s2xs2(s2xs2_equal):
    ok = packing_feasible(s2xs2_equal, RadiiList.of(F(1, 2)))
    assert ok.feasible
    assert ok.method == "s2xs2-correspondence"

    wide = packing_feasible(s2xs2_equal, RadiiList.of(1))
    assert not wide.feasible
    assert wide.exact


def test_packing_feasible_ruled(ruled_1_3_2):
    report = packing_feasible(ruled_1_3_2, RadiiList.equal(1, 3))
    assert report.feasible
    assert report.method == "ruled"
    assert not packing_feasible(ruled_1_3_2, RadiiList.of(2)).feasible


def test_packing_feasible_general_model(enriques):
    ok = packing_feasible(enriques, RadiiList.of(1, 1))
    assert ok.feasible
    assert ok.exact
    assert ok.method == "d-omega-bound"

    unknown = packing_feasible(enriques, RadiiList.equal(1, 4))
    assert not unknown.feasible
    assert not unknown.exact
    assert "inconclusive" in unknown.reason


def test_correspondence_keeps_positivity(rng):
    for alpha, beta in [(1, 1), (1, 2), (F(3, 2), 1)]:
        model = make_s2xs2(alpha, beta)
        d = min(F(alpha), F(beta)) / 2
        for _ in range(20):
            N = rng.randint(1, 7)
            radii = RadiiList(tuple(d * F(rng.randint(1, 99), 100) for _ in range(N)))
            if not thm_radii_feasible(model, radii):
                continue
            scale, cp2_radii = correspond_s2xs2_to_cp2(alpha, beta, radii)
            form = blowup_form_class(blow_up(make_cp2(scale), N + 1), cp2_radii)
            assert positivity_against(form, enumerate_exceptional_cp2(N + 1)).ok


def test_form_class_certificate(cp2):
    certificate = form_class_certificate(cp2, RadiiList.equal(F(1, 4), 2))
    assert certificate.square == F(7, 8)
    assert certificate.certified
    assert certificate.form.values == (F(1), F(1, 4), F(1, 4))

    large = form_class_certificate(cp2, RadiiList.of(F(1, 2)))
    assert large.square == F(3, 4)
    assert not large.certified


def test_form_class_certificate_uncertified_model():
    model = two_positive(ModelFlags(in_class_C=True))
    certificate = form_class_certificate(model, RadiiList.of(F(1, 100)))
    assert not certificate.certified
    with pytest.raises(PreconditionError):
        form_class_certificate(model, RadiiList())


def test_ruled_exact_is_monotone_and_dominates_lower_bound():
    previous = F(0)
    for N in range(1, 65):
        report = vn_exact_ruled(1, 2, 3, N)
        assert report.v_exact >= previous
        assert report.v_exact >= report.v_lower
        previous = report.v_exact
