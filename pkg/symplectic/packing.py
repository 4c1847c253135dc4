"""
Packing fractions, full-packing thresholds and packing numbers

v_N is the supremum of the volume fraction filled by N equal balls. The
general bound v_N >= min{1, N d^2 / 2Vol} holds whenever 0 < d_Omega; the
built-in families have exact answers:

  CP^2, N <= 8: positivity of [Omega] - lambda^2 sum e_q on every exceptional
  class of the N-fold blow-up, plus the volume bound N lambda^4 < s^2.
  S^2 x S^2, N <= 7: the same optimizer on CP^2 with N + 1 balls through the
  correspondence (scale alpha + beta - t, weights alpha - t, beta - t, t, ...).
  Sigma_g x S^2: lambda^2 < alpha and sum lambda^4 < 2 alpha beta.

Squared radii (weights) are used throughout so that everything stays rational.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

from symplectic.blowup import (
    BlowupModel,
    RadiiList,
    blow_up,
    blowup_form_class,
    correspond_s2xs2_to_cp2,
)
from symplectic.errors import (
    HypothesisNotAssertedError,
    PacklabError,
    PreconditionError,
    UncertifiedInvariantError,
)
from symplectic.exceptional import (
    MAX_ENUMERABLE_POINTS,
    CP2BlowupClass,
    ExceptionalSet,
    cp2_exceptional_classes,
    exceptional_set_ruled,
    positivity_against,
)
from symplectic.invariants import (
    DOmegaResult,
    DOmegaStatus,
    SearchBudget,
    asserts_emptiness_hypotheses,
    certify_D_empty,
    d_omega,
)
from symplectic.model_core import (
    BuiltinKind,
    CohomologyFunctional,
    H2Class,
    ManifoldModel,
    ceil_rational,
    class_square,
    format_rational,
    make_cp2,
    make_ruled,
    make_s2xs2,
    volume,
)
from utils.logger import logger

# CP^2 admits a full packing by N equal balls for every N >= 9
CP2_PACKING_NUMBER = 9
# S^2 x S^2 with equal factors: the last obstructed count is 7
S2XS2_EQUAL_PACKING_NUMBER = 8

Obstructor = Union[CP2BlowupClass, H2Class]


@dataclass(frozen=True)
class PackingReport:
    N: int
    v_lower: Fraction
    v_exact: Optional[Fraction] = None
    obstructor: Optional[Obstructor] = None
    full: Optional[bool] = None
    lower_certified: bool = True


@dataclass(frozen=True)
class PackingNumberBracket:
    lower: int
    upper: int
    exact: Optional[int] = None

    def __post_init__(self):
        assert self.lower <= self.upper
        assert self.exact is None or self.lower <= self.exact <= self.upper


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    exact: bool
    method: str
    reason: str
    violator: Optional[Obstructor] = None


@dataclass(frozen=True)
class FormClassCertificate:
    blowup: BlowupModel
    form: CohomologyFunctional
    square: Fraction
    certified: bool


def _check_count(N: int, what: str = "N") -> int:
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise PreconditionError(f"{what} must be a positive integer, got {N}")
    return int(N)


def _lower_from_d(model: ManifoldModel, N: int, d: DOmegaResult) -> Tuple[Fraction, bool]:
    if d.status is DOmegaStatus.CERTIFIED_EMPTY:
        return Fraction(1), True
    certified = d.certified_lower()
    value = certified if certified is not None else d.value
    if value is None:
        # nothing in the box: the search says nothing about d_Omega
        return Fraction(1), False
    if value <= 0:
        raise PreconditionError("d_Omega must be positive for the packing fraction bound")
    bound = min(Fraction(1), N * value * value / (2 * volume(model)))
    return bound, certified is not None


def vn_lower_bound(
    model: ManifoldModel,
    N: int,
    budget: Optional[SearchBudget] = None,
    threads: int = 1,
) -> Fraction:
    """min{1, N d^2 / 2Vol}; with only a certified lower bound on d, that bound is used"""
    N = _check_count(N)
    bound, _ = _lower_from_d(model, N, d_omega(model, budget, threads=threads))
    return bound


def vn_report(
    model: ManifoldModel,
    N: int,
    budget: Optional[SearchBudget] = None,
    threads: int = 1,
) -> PackingReport:
    N = _check_count(N)
    bound, certified = _lower_from_d(model, N, d_omega(model, budget, threads=threads))
    if not certified:
        logger.warning(
            f"v_{N} lower bound for {model.name} rests on a search bound for d_Omega"
        )
    return PackingReport(N=N, v_lower=bound, lower_certified=certified)


def n_threshold(
    model: ManifoldModel, budget: Optional[SearchBudget] = None, threads: int = 1
) -> int:
    """Smallest integer >= 2Vol/d^2; every N at or above it gives a full packing"""
    d = d_omega(model, budget, threads=threads)
    if d.status is DOmegaStatus.CERTIFIED_EMPTY:
        return 1
    value = d.certified_lower()
    if value is None:
        raise UncertifiedInvariantError(
            f"d_Omega of {model.name} is only a search bound; no threshold can be certified"
        )
    if value <= 0:
        raise PreconditionError("d_Omega must be positive for a full-packing threshold")
    return max(1, ceil_rational(2 * volume(model) / (value * value)))


def thm_radii_feasible(
    model: ManifoldModel,
    radii: RadiiList,
    budget: Optional[SearchBudget] = None,
    threads: int = 1,
) -> bool:
    """
    Sufficient test: every lambda_q^2 < d_Omega and sum lambda_q^4 < 2Vol

    Needs a model asserted in class C and a certified lower bound on d_Omega.
    """
    if not model.flags.in_class_C:
        raise HypothesisNotAssertedError(
            f"model {model.name!r} is not asserted to lie in class C"
        )
    d = d_omega(model, budget, threads=threads)
    if d.status is DOmegaStatus.CERTIFIED_EMPTY:
        cap = None
    else:
        cap = d.certified_lower()
        if cap is None:
            raise UncertifiedInvariantError(
                f"d_Omega of {model.name} is not certified; the radii test needs a certified bound"
            )
    if cap is not None and any(w >= cap for w in radii):
        return False
    return radii.sum_of_squares() < 2 * volume(model)


def _cp2_obstruction(
    classes, weight_of_class
) -> Tuple[Optional[Fraction], Optional[CP2BlowupClass]]:
    """Smallest bound over the classes, ties broken towards the lexicographically largest m"""
    best: Optional[Fraction] = None
    best_class: Optional[CP2BlowupClass] = None
    for c in classes:
        bound = weight_of_class(c)
        if bound is None:
            continue
        if best is None or bound < best or (bound == best and c.m > best_class.m):
            best, best_class = bound, c
    return best, best_class


def vn_exact_cp2(scale, N: int, threads: int = 1) -> PackingReport:
    scale = Fraction(scale)
    N = _check_count(N)
    v_lower = vn_lower_bound(make_cp2(scale), N)
    if N > MAX_ENUMERABLE_POINTS:
        return PackingReport(N=N, v_lower=v_lower, v_exact=Fraction(1), full=True)

    def weight_bound(c: CP2BlowupClass) -> Optional[Fraction]:
        total = sum(c.m)
        if total < 1:
            return None
        return scale * c.d / total

    obstruction, obstructor = _cp2_obstruction(cp2_exceptional_classes(N, threads), weight_bound)
    volume_l4 = scale * scale / N
    if obstruction is not None and obstruction * obstruction < volume_l4:
        v = N * obstruction * obstruction / (scale * scale)
        logger.debug(f"v_{N}(CP2) obstructed by {obstructor}: {format_rational(v)}")
        return PackingReport(N=N, v_lower=v_lower, v_exact=v, obstructor=obstructor, full=False)
    return PackingReport(N=N, v_lower=v_lower, v_exact=Fraction(1), full=True)


def _s2xs2_constraint(alpha: Fraction, beta: Fraction, c: CP2BlowupClass) -> Tuple[Fraction, Fraction]:
    """
    Positivity of the corresponded class on c as c0 + s t > 0

    The class pairs with c as d(alpha + beta - t) - m1(alpha - t) - m2(beta - t)
    - t(m3 + ... ).
    """
    m = c.m
    c0 = c.d * (alpha + beta) - m[0] * alpha - m[1] * beta
    s = -c.d + m[0] + m[1] - sum(m[2:])
    return Fraction(c0), Fraction(s)


def vn_exact_s2xs2(alpha, beta, N: int, threads: int = 1) -> PackingReport:
    alpha, beta = Fraction(alpha), Fraction(beta)
    N = _check_count(N)
    model = make_s2xs2(alpha, beta)
    v_lower = vn_lower_bound(model, N)
    two_vol = 2 * alpha * beta

    if N + 1 > MAX_ENUMERABLE_POINTS:
        if N >= n_threshold(model):
            return PackingReport(N=N, v_lower=v_lower, v_exact=Fraction(1), full=True)
        logger.info(f"v_{N} of {model.name} is not known exactly beyond the threshold bracket")
        return PackingReport(N=N, v_lower=v_lower)

    classes = cp2_exceptional_classes(N + 1, threads)
    t_min = Fraction(0)
    for c in classes:
        c0, s = _s2xs2_constraint(alpha, beta, c)
        if s == 0 and c0 <= 0:
            raise PacklabError(f"no packing of {model.name} is positive on {c}")
        if s > 0 and c0 <= 0:
            t_min = max(t_min, -c0 / s)

    def upper_bound(c: CP2BlowupClass) -> Optional[Fraction]:
        c0, s = _s2xs2_constraint(alpha, beta, c)
        return c0 / -s if s < 0 else None

    t_max, obstructor = _cp2_obstruction(classes, upper_bound)
    if t_max is None or t_min >= t_max or t_min * t_min * N >= two_vol:
        raise PacklabError(f"no admissible radius for {N} balls in {model.name}")

    if N * t_max * t_max < two_vol:
        v = N * t_max * t_max / two_vol
        return PackingReport(N=N, v_lower=v_lower, v_exact=v, obstructor=obstructor, full=False)
    return PackingReport(N=N, v_lower=v_lower, v_exact=Fraction(1), full=True)


def vn_exact_ruled(genus: int, alpha, beta, N: int) -> PackingReport:
    """v_N = min{1, N alpha / 2 beta}; the fibre class S - E_1 binds when it is below 1"""
    alpha, beta = Fraction(alpha), Fraction(beta)
    N = _check_count(N)
    v_lower = vn_lower_bound(make_ruled(genus, beta, alpha), N)
    ratio = N * alpha / (2 * beta)
    if ratio >= 1:
        return PackingReport(N=N, v_lower=v_lower, v_exact=Fraction(1), full=True)
    fibre = exceptional_set_ruled(genus, N).classes[N]
    return PackingReport(N=N, v_lower=v_lower, v_exact=ratio, obstructor=fibre, full=False)


def vn_exact(model: ManifoldModel, N: int, threads: int = 1) -> PackingReport:
    tag = model.builtin
    if tag is not None:
        if tag.kind is BuiltinKind.CP2:
            return vn_exact_cp2(tag.scale, N, threads)
        if tag.kind is BuiltinKind.S2XS2:
            return vn_exact_s2xs2(tag.alpha, tag.beta, N, threads)
        if tag.kind is BuiltinKind.RULED:
            return vn_exact_ruled(tag.genus, tag.alpha, tag.beta, N)
    raise PreconditionError(
        f"exact v_N is only known for CP2, S2xS2 and ruled models, not {model.name!r}"
    )


def packing_number(model: ManifoldModel) -> PackingNumberBracket:
    tag = model.builtin
    if tag is not None and tag.kind is BuiltinKind.CP2:
        return PackingNumberBracket(CP2_PACKING_NUMBER, CP2_PACKING_NUMBER, CP2_PACKING_NUMBER)
    if tag is not None and tag.kind is BuiltinKind.S2XS2:
        small, large = sorted((tag.alpha, tag.beta))
        if small == large:
            n = S2XS2_EQUAL_PACKING_NUMBER
            return PackingNumberBracket(ceil_rational(2 * large / small), n, n)
        # non-squeezing below, the threshold 8 beta / alpha above
        return PackingNumberBracket(
            ceil_rational(2 * large / small), ceil_rational(8 * large / small)
        )
    if tag is not None and tag.kind is BuiltinKind.RULED:
        p = ceil_rational(2 * tag.beta / tag.alpha)
        return PackingNumberBracket(p, p, p)
    if asserts_emptiness_hypotheses(model) and certify_D_empty(model):
        return PackingNumberBracket(1, 1, 1)
    raise PreconditionError("only Thm 2.1 upper bound available; use n_threshold")


def ruled_packing_feasible(genus: int, alpha, beta, radii: RadiiList) -> bool:
    if isinstance(genus, bool) or int(genus) != genus or genus < 1:
        raise PreconditionError(f"genus must be an integer >= 1, got {genus}")
    alpha, beta = Fraction(alpha), Fraction(beta)
    if alpha <= 0 or beta <= 0:
        raise PreconditionError("alpha and beta must be positive")
    return all(w < alpha for w in radii) and radii.sum_of_squares() < 2 * alpha * beta


def _cp2_radii_report(scale: Fraction, radii: RadiiList, threads: int, method: str) -> FeasibilityReport:
    N = len(radii)
    if N == 0:
        return FeasibilityReport(True, True, method, "no balls")
    bm = blow_up(make_cp2(scale), N)
    form = blowup_form_class(bm, radii)
    classes = ExceptionalSet(
        tuple(c.to_h2() for c in cp2_exceptional_classes(N, threads)), complete=True
    )
    positivity = positivity_against(form, classes)
    if not positivity.ok:
        violator = CP2BlowupClass.from_h2(positivity.violator)
        return FeasibilityReport(
            False, True, method, f"form class is not positive on {violator}", violator
        )
    if radii.sum_of_squares() >= scale * scale:
        return FeasibilityReport(False, True, method, "balls exceed the volume")
    return FeasibilityReport(True, True, method, "positive on every exceptional class")


def packing_feasible(
    model: ManifoldModel,
    radii: RadiiList,
    budget: Optional[SearchBudget] = None,
    threads: int = 1,
) -> FeasibilityReport:
    """Exact criteria where the exceptional set is known, the sufficient radii test otherwise"""
    tag = model.builtin
    N = len(radii)
    if tag is not None and tag.kind is BuiltinKind.CP2 and N <= MAX_ENUMERABLE_POINTS:
        return _cp2_radii_report(tag.scale, radii, threads, "cp2-exceptional")

    if tag is not None and tag.kind is BuiltinKind.S2XS2 and 1 <= N < MAX_ENUMERABLE_POINTS:
        alpha, beta = tag.alpha, tag.beta
        if radii.values[0] >= min(alpha, beta):
            return FeasibilityReport(
                False, True, "s2xs2-correspondence", "first ball does not fit in the smaller sphere"
            )
        scale, cp2_radii = correspond_s2xs2_to_cp2(alpha, beta, radii)
        report = _cp2_radii_report(scale, cp2_radii, threads, "s2xs2-correspondence")
        return report

    if tag is not None and tag.kind is BuiltinKind.RULED:
        ok = ruled_packing_feasible(tag.genus, tag.alpha, tag.beta, radii)
        reason = "fits the fibre and the volume" if ok else "a ball meets the fibre area or the volume"
        return FeasibilityReport(ok, True, "ruled", reason)

    ok = thm_radii_feasible(model, radii, budget, threads)
    reason = (
        "radii below sqrt(d_Omega) and within the volume"
        if ok
        else "sufficient test failed; inconclusive"
    )
    return FeasibilityReport(ok, ok, "d-omega-bound", reason)


def form_class_certificate(
    model: ManifoldModel,
    radii: RadiiList,
    budget: Optional[SearchBudget] = None,
    threads: int = 1,
) -> FormClassCertificate:
    """
    The class [Omega] - sum lambda_q^2 e_q on the blow-up at len(radii) points

    `certified` is set when the radii pass thm_radii_feasible, in which case the
    class carries a symplectic representative. Its square is 2Vol - sum lambda^4.
    """
    bm = blow_up(model, _check_count(len(radii), "number of radii"))
    form = blowup_form_class(bm, radii)
    square = class_square(bm.model, form)
    try:
        certified = model.flags.in_class_C and thm_radii_feasible(model, radii, budget, threads)
    except UncertifiedInvariantError:
        certified = False
    return FormClassCertificate(bm, form, square, certified)
