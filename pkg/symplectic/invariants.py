"""
The set D_Omega and the invariant d_Omega

D_Omega = {B : Omega(B) > 0, c1(B) >= 2, B.B >= 0} and d_Omega is the infimum
of Omega(B)/c1(B) over it (+infinity when it is empty).

Closed forms for the built-in families:
  CP^2 (scale s): c1 = 3 [Omega]/s on every class, so the ratio is s/3.
  S^2 x S^2 and Sigma_g x S^2: classes in D_Omega have non-negative
  coefficients, which forces the ratio up to (smaller sphere area)/2,
  attained on the sphere factor.
"""

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple

from symplectic.errors import (
    HypothesisNotAssertedError,
    InvalidModelError,
    PreconditionError,
)
from symplectic.model_core import (
    BuiltinKind,
    CohomologyFunctional,
    H2Class,
    ManifoldModel,
    b_plus,
    cup_product,
    evaluate,
    format_rational,
    pair,
    validate,
)
from utils.logger import logger
from utils.workers import parallel_map

# box sizes above this are logged as expensive
LARGE_SEARCH = 2_000_000
# exact bisection steps for the light-cone lower bound
BISECTION_STEPS = 40


@dataclass(frozen=True)
class SearchBudget:
    c1_max: int = 20
    coeff_max: int = 10

    def __post_init__(self):
        if int(self.c1_max) != self.c1_max or self.c1_max < 2:
            raise PreconditionError(f"c1_max must be an integer >= 2, got {self.c1_max}")
        if int(self.coeff_max) != self.coeff_max or self.coeff_max < 1:
            raise PreconditionError(f"coeff_max must be a positive integer, got {self.coeff_max}")


class DOmegaStatus(Enum):
    CERTIFIED_EXACT = "CertifiedExact"
    CERTIFIED_LOWER_BOUND_WITH_WITNESS = "CertifiedLowerBoundWithWitness"
    SEARCH_UPPER_BOUND_ONLY = "SearchUpperBoundOnly"
    CERTIFIED_EMPTY = "CertifiedEmpty"


@dataclass(frozen=True)
class DOmegaResult:
    """value None stands for +infinity"""

    value: Optional[Fraction]
    witness: Optional[H2Class]
    status: DOmegaStatus
    lower_bound: Optional[Fraction] = None

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    @property
    def certified(self) -> bool:
        return self.status is not DOmegaStatus.SEARCH_UPPER_BOUND_ONLY

    def certified_lower(self) -> Optional[Fraction]:
        """Largest value known to be <= d_Omega; None when only a search bound exists"""
        if self.status is DOmegaStatus.CERTIFIED_EXACT:
            return self.value
        if self.status is DOmegaStatus.CERTIFIED_LOWER_BOUND_WITH_WITNESS:
            return self.lower_bound
        return None


@dataclass(frozen=True)
class EmptinessCertificate:
    certified: bool
    b_plus: int
    K2: Fraction
    K_omega: Fraction


def in_D(model: ManifoldModel, B: H2Class) -> bool:
    """Omega(B) > 0, c1(B) >= 2, B.B >= 0"""
    return (
        evaluate(model.omega, B) > 0
        and evaluate(model.c1, B) >= 2
        and pair(model.lattice, B, B) >= 0
    )


def _ratio(model: ManifoldModel, B: H2Class) -> Fraction:
    return evaluate(model.omega, B) / evaluate(model.c1, B)


def _unit(n: int, i: int) -> H2Class:
    coords = [0] * n
    coords[i] = 1
    return H2Class(tuple(coords))


def _closed_form(model: ManifoldModel) -> Optional[DOmegaResult]:
    tag = model.builtin
    if tag is None:
        return None
    exact = DOmegaStatus.CERTIFIED_EXACT
    if tag.kind is BuiltinKind.CP2:
        return DOmegaResult(tag.scale / 3, _unit(1, 0), exact)
    if tag.kind is BuiltinKind.S2XS2:
        alpha, beta = tag.params
        if alpha <= beta:
            return DOmegaResult(alpha / 2, _unit(2, 0), exact)
        return DOmegaResult(beta / 2, _unit(2, 1), exact)
    if tag.kind is BuiltinKind.RULED:
        return DOmegaResult(tag.alpha / 2, _unit(2, 1), exact)
    return None


def _search_shard(model: ManifoldModel, budget: SearchBudget, first: int):
    """Best (ratio, coords) with a fixed first coordinate, lexicographic tie-break"""
    n = model.rank
    Q = model.lattice.pairing
    c1 = model.c1.values
    omega = model.omega.values
    box = range(-budget.coeff_max, budget.coeff_max + 1)
    best: Optional[Tuple[Fraction, Tuple[int, ...]]] = None

    for rest in itertools.product(box, repeat=n - 1):
        v = (first,) + rest
        c = sum(ci * x for ci, x in zip(c1, v))
        if c < 2 or c > budget.c1_max:
            continue
        w = sum(oi * x for oi, x in zip(omega, v))
        if w <= 0:
            continue
        square = sum(v[i] * Q[i][j] * v[j] for i in range(n) for j in range(n) if Q[i][j])
        if square < 0:
            continue
        candidate = (w / c, v)
        if best is None or candidate < best:
            best = candidate
    return best


def search_d_omega(
    model: ManifoldModel, budget: SearchBudget, threads: int = 1, progress: bool = False
) -> DOmegaResult:
    """
    Minimum of Omega(B)/c1(B) over D_Omega inside the coordinate box

    The box is sharded on the first coordinate; the shard minima are reduced
    by (ratio, coords), so the result is independent of the worker count.
    """
    n = model.rank
    size = (2 * budget.coeff_max + 1) ** n
    if size > LARGE_SEARCH:
        logger.warning(f"d_Omega search over {size} classes of rank {n} may be slow")
    logger.debug(f"Searching D_Omega of {model.name}: box {size}, c1 <= {budget.c1_max}")

    firsts = list(range(-budget.coeff_max, budget.coeff_max + 1))
    shards = parallel_map(
        lambda first: _search_shard(model, budget, first),
        firsts,
        threads=threads,
        progress=progress,
        desc="d_Omega search",
    )
    found = [s for s in shards if s is not None]
    if not found:
        return DOmegaResult(None, None, DOmegaStatus.SEARCH_UPPER_BOUND_ONLY)
    ratio, coords = min(found)
    return DOmegaResult(ratio, H2Class(coords), DOmegaStatus.SEARCH_UPPER_BOUND_ONLY)


def _in_positive_cone(model: ManifoldModel, X: CohomologyFunctional) -> bool:
    """X^2 >= 0 and X.[Omega] >= 0 (closed forward light cone)"""
    lattice = model.lattice
    return cup_product(lattice, X, X) >= 0 and cup_product(lattice, X, model.omega) >= 0


def _light_cone_bound(model: ManifoldModel, kappa: Fraction) -> Tuple[bool, Optional[Fraction]]:
    """
    Certify d_Omega >= kappa via the light cone argument

    With b+ = 1, if X = [Omega] - kappa c1 lies in the closed forward cone then
    X(B) >= 0 for every B in D_Omega, i.e. Omega(B)/c1(B) >= kappa. When kappa
    itself fails, the best rational below it is found by exact bisection.
    """
    if b_plus(model.lattice) != 1:
        return False, None

    def holds(k: Fraction) -> bool:
        return _in_positive_cone(model, model.omega - model.c1.scaled(k))

    if holds(kappa):
        return True, kappa
    lo, hi = Fraction(0), kappa
    for _ in range(BISECTION_STEPS):
        mid = (lo + hi) / 2
        if holds(mid):
            lo = mid
        else:
            hi = mid
    return False, (lo if lo > 0 else None)


def asserts_emptiness_hypotheses(model: ManifoldModel) -> bool:
    """Flags claim minimal, in class C, neither rational nor ruled"""
    flags = model.flags
    return flags.minimal and flags.in_class_C and not flags.rational_or_ruled


def emptiness_certificate(model: ManifoldModel) -> EmptinessCertificate:
    """
    Numeric consequences of minimality for a non-rational, non-ruled manifold

    With K = -c1, K^2 >= 0 and K.[Omega] >= 0 put K in the closed forward
    cone; for b+ = 1 every B in D_Omega would then have K(B) >= 0, contradicting
    c1(B) >= 2. So D_Omega is empty.
    """
    if not asserts_emptiness_hypotheses(model):
        raise HypothesisNotAssertedError(
            "hypotheses of Thm 2.5 not asserted (need minimal, in class C, "
            "not rational or ruled)"
        )
    report = validate(model)
    if not report.valid:
        raise InvalidModelError(f"invalid model {model.name!r}: {'; '.join(report.errors)}")

    K = model.canonical
    bp = b_plus(model.lattice)
    K2 = cup_product(model.lattice, K, K)
    K_omega = cup_product(model.lattice, K, model.omega)
    certified = bp == 1 and K2 >= 0 and K_omega >= 0
    logger.debug(
        f"Emptiness checks for {model.name}: b+={bp} K^2={format_rational(K2)} "
        f"K.[Omega]={format_rational(K_omega)}"
    )
    return EmptinessCertificate(certified, bp, K2, K_omega)


def certify_D_empty(model: ManifoldModel) -> bool:
    return emptiness_certificate(model).certified


def d_omega(
    model: ManifoldModel,
    budget: Optional[SearchBudget] = None,
    threads: int = 1,
    progress: bool = False,
) -> DOmegaResult:
    report = validate(model)
    if not report.valid:
        raise InvalidModelError(f"invalid model {model.name!r}: {'; '.join(report.errors)}")

    closed = _closed_form(model)
    if closed is not None:
        return closed

    if asserts_emptiness_hypotheses(model) and certify_D_empty(model):
        return DOmegaResult(None, None, DOmegaStatus.CERTIFIED_EMPTY)

    budget = budget or SearchBudget()
    found = search_d_omega(model, budget, threads=threads, progress=progress)
    if found.witness is None:
        logger.info(f"No member of D_Omega found in the search box for {model.name}")
        return found

    exact, lower = _light_cone_bound(model, found.value)
    if exact:
        return DOmegaResult(found.value, found.witness, DOmegaStatus.CERTIFIED_EXACT, found.value)
    if lower is not None:
        return DOmegaResult(
            found.value,
            found.witness,
            DOmegaStatus.CERTIFIED_LOWER_BOUND_WITH_WITNESS,
            lower,
        )
    logger.warning(
        f"d_Omega of {model.name} is only bounded above by {format_rational(found.value)}"
    )
    return found


def witnesses_below(
    model: ManifoldModel, bound: Fraction, budget: SearchBudget
) -> List[H2Class]:
    """Members of D_Omega in the box with ratio strictly below bound"""
    n = model.rank
    box = range(-budget.coeff_max, budget.coeff_max + 1)
    hits = []
    for v in itertools.product(box, repeat=n):
        B = H2Class(v)
        c = evaluate(model.c1, B)
        if c > budget.c1_max or not in_D(model, B):
            continue
        if _ratio(model, B) < bound:
            hits.append(B)
    return hits
