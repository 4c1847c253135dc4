"""
Exceptional classes

On the N-point blow-up of CP^2 a class is written dL - sum m_q E_q and stored
as (d; m_1, ..., m_N), so E_q itself is (0; ..., -1, ...). Membership in the
exceptional set is decided by Cremona reduction; for N <= 8 the set is finite
and is enumerated outright. For blow-ups of Sigma_g x S^2 (g >= 1) the set
is {E_q, S - E_q}.
"""

import itertools
import re
import threading
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.utilities.iterables import multiset_permutations

from symplectic.errors import (
    DimensionMismatchError,
    InfiniteExceptionalSetError,
    InvalidModelError,
    PreconditionError,
)
from symplectic.model_core import (
    BuiltinKind,
    CohomologyFunctional,
    H2Class,
    ManifoldModel,
    evaluate,
    pair,
)
from utils.logger import logger
from utils.workers import parallel_map

# largest degree of an exceptional class on a blow-up of CP^2 at <= 8 points
MAX_DEGREE = 6
MAX_ENUMERABLE_POINTS = 8

_CLASS_RE = re.compile(r"^\s*(-?\d+)\s*(?:;\s*((?:-?\d+\s*,\s*)*-?\d+)?\s*)?$")


class ClassFormatError(ValueError):
    """Text is not of the form d;m1,m2,...,mN"""


@dataclass(frozen=True, order=True)
class CP2BlowupClass:
    d: int
    m: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))

    @classmethod
    def parse(cls, text: str) -> "CP2BlowupClass":
        match = _CLASS_RE.match(text)
        if not match:
            raise ClassFormatError(f"expected 'd;m1,...,mN', got {text!r}")
        m = match.group(2)
        return cls(int(match.group(1)), tuple(int(x) for x in m.split(",")) if m else ())

    @classmethod
    def exceptional_divisor(cls, q: int, N: int) -> "CP2BlowupClass":
        m = [0] * N
        m[q] = -1
        return cls(0, tuple(m))

    def __str__(self):
        return f"{self.d};" + ",".join(str(x) for x in self.m)

    @property
    def N(self) -> int:
        return len(self.m)

    def self_intersection(self) -> int:
        return self.d * self.d - sum(x * x for x in self.m)

    def c1(self) -> int:
        return 3 * self.d - sum(self.m)

    def dot(self, other: "CP2BlowupClass") -> int:
        if self.N != other.N:
            raise DimensionMismatchError(f"classes on {self.N} and {other.N} points")
        return self.d * other.d - sum(a * b for a, b in zip(self.m, other.m))

    def is_numerically_exceptional(self) -> bool:
        return self.self_intersection() == -1 and self.c1() == 1

    def is_standard(self) -> bool:
        """A permutation of (0; -1, 0, ..., 0)"""
        return self.d == 0 and sorted(self.m) == [-1] + [0] * (self.N - 1)

    def padded(self, n: int) -> "CP2BlowupClass":
        if n <= self.N:
            return self
        return CP2BlowupClass(self.d, self.m + (0,) * (n - self.N))

    def to_h2(self) -> H2Class:
        """Coordinates in the basis (L, E_1, ..., E_N) of the blown-up CP^2"""
        return H2Class((self.d,) + tuple(-x for x in self.m))

    @classmethod
    def from_h2(cls, B: H2Class) -> "CP2BlowupClass":
        if len(B) == 0:
            raise DimensionMismatchError("empty class")
        return cls(B.coords[0], tuple(-x for x in B.coords[1:]))


@dataclass(frozen=True)
class ExceptionalSet:
    classes: Tuple[H2Class, ...]
    complete: bool

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)


@dataclass(frozen=True)
class CremonaReduction:
    original: CP2BlowupClass
    reduced: CP2BlowupClass
    trace: Tuple[Tuple[int, int, int], ...]
    exceptional: bool


@dataclass(frozen=True)
class PositivityResult:
    ok: bool
    violator: Optional[H2Class] = None


def is_numerically_exceptional(model: ManifoldModel, E: H2Class) -> bool:
    """E.E = -1 and c1(E) = 1"""
    return pair(model.lattice, E, E) == -1 and evaluate(model.c1, E) == 1


def cremona_move(c: CP2BlowupClass, indices: Sequence[int]) -> CP2BlowupClass:
    """Quadratic transformation based at the three points i, j, k (0-based)"""
    if c.N < 3:
        raise PreconditionError(f"a Cremona move needs at least 3 points, class has {c.N}")
    i, j, k = indices
    if len({i, j, k}) != 3:
        raise PreconditionError(f"Cremona indices must be distinct, got {tuple(indices)}")
    if not all(0 <= x < c.N for x in (i, j, k)):
        raise PreconditionError(f"Cremona indices {tuple(indices)} out of range for N = {c.N}")

    mi, mj, mk = c.m[i], c.m[j], c.m[k]
    m = list(c.m)
    m[i] = c.d - mj - mk
    m[j] = c.d - mi - mk
    m[k] = c.d - mi - mj
    return CP2BlowupClass(2 * c.d - mi - mj - mk, tuple(m))


def cremona_reduce(c: CP2BlowupClass) -> CremonaReduction:
    """
    Reduce a numerically exceptional class by Cremona moves

    Each step sorts multiplicities in descending order (ties by index) and
    moves on the three largest while that strictly lowers the degree.
    Classes on fewer than three points are padded with zeros first.
    """
    if not c.is_numerically_exceptional():
        raise PreconditionError(f"class {c} is not numerically exceptional")

    current = c.padded(3)
    trace: List[Tuple[int, int, int]] = []
    while current.d >= 0:
        order = sorted(range(current.N), key=lambda q: (-current.m[q], q))
        i, j, k = order[:3]
        if current.m[i] + current.m[j] + current.m[k] <= current.d:
            break
        current = cremona_move(current, (i, j, k))
        trace.append((i, j, k))

    exceptional = current.d >= 0 and current.is_standard()
    return CremonaReduction(c, current, tuple(trace), exceptional)


def is_exceptional_cp2(c: CP2BlowupClass) -> bool:
    if not c.is_numerically_exceptional():
        return False
    return cremona_reduce(c).exceptional


def _multiplicity_profiles(d: int, N: int) -> List[Tuple[int, ...]]:
    """Non-increasing m in [-1, d]^N with sum m = 3d - 1 and sum m^2 = d^2 + 1"""
    target_sum, target_sq = 3 * d - 1, d * d + 1
    values = list(range(d, -2, -1))
    profiles: List[Tuple[int, ...]] = []

    def extend(idx: int, remaining: int, s: int, sq: int, acc: Tuple[int, ...]):
        if sq > target_sq:
            return
        if remaining == 0:
            if s == target_sum and sq == target_sq:
                profiles.append(acc)
            return
        if idx == len(values):
            return
        v = values[idx]
        if s + remaining * v < target_sum or s - remaining > target_sum:
            return
        for count in range(remaining, -1, -1):
            extend(idx + 1, remaining - count, s + count * v, sq + count * v * v, acc + (v,) * count)

    extend(0, N, 0, 0, ())
    return profiles


def _degree_stratum(args: Tuple[int, int]) -> List[CP2BlowupClass]:
    d, N = args
    found: List[CP2BlowupClass] = []
    for profile in _multiplicity_profiles(d, N):
        if not is_exceptional_cp2(CP2BlowupClass(d, profile)):
            continue
        for perm in multiset_permutations(list(profile)):
            found.append(CP2BlowupClass(d, tuple(perm)))
    return found


_ENUMERATED: Dict[int, Tuple[CP2BlowupClass, ...]] = {}
_ENUMERATED_LOCK = threading.Lock()


def cp2_exceptional_classes(N: int, threads: int = 1) -> Tuple[CP2BlowupClass, ...]:
    """Exceptional classes on CP^2 blown up at N <= 8 points, sorted by (d, m)"""
    if isinstance(N, bool) or int(N) != N or N < 0:
        raise PreconditionError(f"number of points must be a non-negative integer, got {N}")
    if N > MAX_ENUMERABLE_POINTS:
        raise InfiniteExceptionalSetError(
            "exceptional set infinite; use is_exceptional_cp2 per class"
        )
    N = int(N)
    with _ENUMERATED_LOCK:
        cached = _ENUMERATED.get(N)
    if cached is not None:
        return cached

    strata = parallel_map(
        _degree_stratum, [(d, N) for d in range(MAX_DEGREE + 1)], threads=threads
    )
    classes = tuple(sorted(itertools.chain.from_iterable(strata)))
    logger.debug(f"Enumerated {len(classes)} exceptional classes on CP2#{N}")
    with _ENUMERATED_LOCK:
        return _ENUMERATED.setdefault(N, classes)


def enumerate_exceptional_cp2(N: int, threads: int = 1) -> ExceptionalSet:
    classes = cp2_exceptional_classes(N, threads)
    return ExceptionalSet(tuple(c.to_h2() for c in classes), complete=True)


def exceptional_set_ruled(g: int, N: int) -> ExceptionalSet:
    """{E_1..E_N, S - E_1..S - E_N} in the basis (R, S, E_1, ..., E_N)"""
    if isinstance(g, bool) or int(g) != g or g < 1:
        raise PreconditionError(
            f"genus must be >= 1, got {g}; use the CP2 / S2xS2 machinery for g = 0"
        )
    if N < 0:
        raise PreconditionError(f"number of points must be non-negative, got {N}")

    def unit(q: int, s: int) -> H2Class:
        coords = [0] * (2 + N)
        coords[1] = s
        coords[2 + q] = 1 if s == 0 else -1
        return H2Class(tuple(coords))

    classes = [unit(q, 0) for q in range(N)] + [unit(q, 1) for q in range(N)]
    return ExceptionalSet(tuple(classes), complete=True)


def positivity_against(form: CohomologyFunctional, S: ExceptionalSet) -> PositivityResult:
    """Whether form is strictly positive on every class of S; the first violator otherwise"""
    for E in S:
        if evaluate(form, E) <= 0:
            return PositivityResult(False, E)
    return PositivityResult(True)


def _numeric_search(model: ManifoldModel, coeff_max: int, threads: int) -> ExceptionalSet:
    n = model.rank
    Q = model.lattice.pairing
    c1 = [int(v) for v in model.c1.values]
    box = range(-coeff_max, coeff_max + 1)

    def shard(first: int) -> List[Tuple[int, ...]]:
        hits = []
        for rest in itertools.product(box, repeat=n - 1):
            v = (first,) + rest
            if sum(c * x for c, x in zip(c1, v)) != 1:
                continue
            square = sum(v[i] * Q[i][j] * v[j] for i in range(n) for j in range(n) if Q[i][j])
            if square == -1:
                hits.append(v)
        return hits

    logger.debug(f"Searching {(2 * coeff_max + 1) ** n} classes for numeric exceptionality")
    shards = parallel_map(shard, list(box), threads=threads)
    coords = sorted(itertools.chain.from_iterable(shards))
    return ExceptionalSet(tuple(H2Class(v) for v in coords), complete=False)


def exceptional_set_for(model: ManifoldModel, coeff_max: int = 3, threads: int = 1) -> ExceptionalSet:
    """
    The exceptional set when it is known, else the numerically exceptional
    classes in a coordinate box (reported with complete = False)
    """
    if any(v.denominator != 1 for v in model.c1.values):
        raise InvalidModelError("c1 must be integral")
    tag = model.builtin
    if tag is not None:
        if tag.kind in (BuiltinKind.CP2, BuiltinKind.S2XS2, BuiltinKind.RULED):
            return ExceptionalSet((), complete=True)
        if tag.kind is BuiltinKind.BLOWUP and tag.base is not None:
            if tag.base.kind is BuiltinKind.CP2 and tag.points <= MAX_ENUMERABLE_POINTS:
                return enumerate_exceptional_cp2(tag.points, threads)
            if tag.base.kind is BuiltinKind.RULED:
                return exceptional_set_ruled(tag.base.genus, tag.points)
    return _numeric_search(model, coeff_max, threads)
