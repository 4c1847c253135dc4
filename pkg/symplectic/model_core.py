"""
Lattice models of closed symplectic 4-manifolds

A model is the free part of H_2(M;Z) with its intersection pairing, together
with two cohomology classes given by their values on the H_2 basis: the
first Chern class c1 and the symplectic class [Omega]. All scalars are
fractions.Fraction; Poincare duality is multiplication by the pairing.
"""

import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from symplectic import linalg
from symplectic.errors import (
    DegeneratePairingError,
    DimensionMismatchError,
    InvalidModelError,
)

Rational = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*([+-]?\d+))?\s*$")


class RationalFormatError(ValueError):
    """Text is not an integer or a p/q fraction with q > 0"""


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """Parse "p/q" or "n". Decimals are rejected to keep inputs exact."""
    if isinstance(text, bool):
        raise RationalFormatError(f"not a rational: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise RationalFormatError(f"not a rational: {text!r}")
    match = _RATIONAL_RE.match(text)
    if not match:
        raise RationalFormatError(f"expected 'p/q' or an integer, got {text!r}")
    numerator, denominator = match.group(1), match.group(2)
    if denominator is None:
        return Fraction(int(numerator))
    q = int(denominator)
    if q <= 0:
        raise RationalFormatError(f"denominator must be positive in {text!r}")
    return Fraction(int(numerator), q)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def ceil_rational(x: Fraction) -> int:
    x = Fraction(x)
    return -((-x.numerator) // x.denominator)


@dataclass(frozen=True)
class IntersectionLattice:
    """Free abelian group with a symmetric integral pairing"""

    pairing: Tuple[Tuple[int, ...], ...]
    basis_labels: Tuple[str, ...] = ()

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.pairing)
        n = len(rows)
        if n == 0:
            raise InvalidModelError("lattice rank must be positive")
        if any(len(row) != n for row in rows):
            raise DimensionMismatchError("pairing matrix must be square")
        labels = tuple(self.basis_labels) or tuple(f"e{i + 1}" for i in range(n))
        if len(labels) != n:
            raise DimensionMismatchError(
                f"{len(labels)} basis labels given for a rank {n} lattice"
            )
        object.__setattr__(self, "pairing", rows)
        object.__setattr__(self, "basis_labels", labels)

    @property
    def rank(self) -> int:
        return len(self.pairing)

    def is_symmetric(self) -> bool:
        n = self.rank
        return all(self.pairing[i][j] == self.pairing[j][i] for i in range(n) for j in range(n))

    def matrix(self) -> np.ndarray:
        return linalg.fraction_matrix(self.pairing)

    @cached_property
    def determinant(self) -> Fraction:
        return linalg.determinant(self.matrix())

    @cached_property
    def inverse(self) -> np.ndarray:
        if self.determinant == 0:
            raise DegeneratePairingError("intersection pairing is degenerate")
        return linalg.inverse_matrix(self.matrix())

    @cached_property
    def signature(self) -> Tuple[int, int, int]:
        return linalg.inertia(self.matrix())


@dataclass(frozen=True)
class H2Class:
    coords: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(x) for x in self.coords))

    @classmethod
    def of(cls, *coords: int) -> "H2Class":
        return cls(tuple(coords))

    def __len__(self):
        return len(self.coords)


@dataclass(frozen=True)
class CohomologyFunctional:
    """A class in H^2, stored as its values on the H_2 basis"""

    values: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(Fraction(x) for x in self.values))

    @classmethod
    def of(cls, *values) -> "CohomologyFunctional":
        return cls(tuple(values))

    def __len__(self):
        return len(self.values)

    def __neg__(self) -> "CohomologyFunctional":
        return CohomologyFunctional(tuple(-v for v in self.values))

    def __sub__(self, other: "CohomologyFunctional") -> "CohomologyFunctional":
        _check_lengths(len(self), len(other), "functional")
        return CohomologyFunctional(tuple(a - b for a, b in zip(self.values, other.values)))

    def scaled(self, factor) -> "CohomologyFunctional":
        factor = Fraction(factor)
        return CohomologyFunctional(tuple(factor * v for v in self.values))

    def extended(self, extra: Sequence) -> "CohomologyFunctional":
        return CohomologyFunctional(self.values + tuple(Fraction(x) for x in extra))


@dataclass(frozen=True)
class ModelFlags:
    """Geometric hypotheses that cannot be read off the lattice; asserted, never computed"""

    in_class_C: bool = False
    minimal: bool = False
    rational_or_ruled: bool = False


class BuiltinKind(Enum):
    CP2 = "cp2"
    S2XS2 = "s2xs2"
    RULED = "ruled"
    BLOWUP = "blowup"


@dataclass(frozen=True)
class BuiltinTag:
    """
    Which closed-form family a model belongs to

    params: CP2 -> (scale,); S2XS2 -> (alpha, beta); RULED -> (genus, beta, alpha);
    BLOWUP -> (points,) with `base` holding the tag of the blown-up model.
    """

    kind: BuiltinKind
    params: Tuple[Fraction, ...] = ()
    base: Optional["BuiltinTag"] = None

    @property
    def scale(self) -> Fraction:
        return self.params[0]

    @property
    def alpha(self) -> Fraction:
        return self.params[0] if self.kind is BuiltinKind.S2XS2 else self.params[2]

    @property
    def beta(self) -> Fraction:
        return self.params[1]

    @property
    def genus(self) -> int:
        return int(self.params[0])

    @property
    def points(self) -> int:
        return int(self.params[0])


@dataclass(frozen=True)
class ManifoldModel:
    lattice: IntersectionLattice
    c1: CohomologyFunctional
    omega: CohomologyFunctional
    flags: ModelFlags = field(default_factory=ModelFlags)
    builtin: Optional[BuiltinTag] = None
    name: str = "model"

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def canonical(self) -> CohomologyFunctional:
        """K = -c1"""
        return -self.c1


@dataclass
class ValidationReport:
    valid: bool = True
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    b_plus: Optional[int] = None

    def fail(self, message: str):
        self.valid = False
        self.errors.append(message)


def _check_lengths(expected: int, got: int, what: str):
    if expected != got:
        raise DimensionMismatchError(f"{what} has length {got}, expected {expected}")


def pair(lattice: IntersectionLattice, a: H2Class, b: H2Class) -> Fraction:
    """Intersection product a . b"""
    n = lattice.rank
    _check_lengths(n, len(a), "first class")
    _check_lengths(n, len(b), "second class")
    total = 0
    for i, ai in enumerate(a.coords):
        if ai:
            row = lattice.pairing[i]
            total += ai * sum(row[j] * bj for j, bj in enumerate(b.coords))
    return Fraction(total)


def evaluate(f: CohomologyFunctional, B: H2Class) -> Fraction:
    """Value of a cohomology class on a homology class"""
    _check_lengths(len(f), len(B), "class")
    return sum((v * c for v, c in zip(f.values, B.coords)), Fraction(0))


def poincare_dual(lattice: IntersectionLattice, B: H2Class) -> CohomologyFunctional:
    _check_lengths(lattice.rank, len(B), "class")
    return CohomologyFunctional(
        tuple(sum(row[j] * B.coords[j] for j in range(lattice.rank)) for row in lattice.pairing)
    )


def cup_product(
    lattice: IntersectionLattice, f: CohomologyFunctional, g: CohomologyFunctional
) -> Fraction:
    """f^T Q^-1 g, the pairing of two classes in H^2"""
    _check_lengths(lattice.rank, len(f), "first functional")
    _check_lengths(lattice.rank, len(g), "second functional")
    inverse = lattice.inverse
    fv = linalg.fraction_vector(f.values)
    gv = linalg.fraction_vector(g.values)
    return Fraction(fv.dot(inverse.dot(gv)))


def class_square(model: ManifoldModel, f: CohomologyFunctional) -> Fraction:
    return cup_product(model.lattice, f, f)


def volume(model: ManifoldModel) -> Fraction:
    """Vol(M, Omega) = 1/2 [Omega]^2"""
    vol = class_square(model, model.omega) / 2
    if vol <= 0:
        raise InvalidModelError(f"model {model.name!r} has non-positive volume {vol}")
    return vol


def b_plus(lattice: IntersectionLattice) -> int:
    if lattice.determinant == 0:
        raise DegeneratePairingError("b+ is undefined for a degenerate pairing")
    return lattice.signature[0]


def validate(model: ManifoldModel) -> ValidationReport:
    report = ValidationReport()
    lattice = model.lattice
    n = lattice.rank

    if len(model.c1) != n:
        report.fail(f"c1 has length {len(model.c1)}, expected {n}")
    if len(model.omega) != n:
        report.fail(f"omega has length {len(model.omega)}, expected {n}")
    if not lattice.is_symmetric():
        report.fail("pairing is not symmetric")
    if not report.valid:
        return report

    if lattice.determinant == 0:
        report.fail("pairing is degenerate (zero determinant)")
        return report

    report.b_plus = b_plus(lattice)
    if report.b_plus != 1:
        report.warnings.append(
            f"b+ = {report.b_plus}; the packing results target manifolds with b+ = 1"
        )

    if class_square(model, model.omega) <= 0:
        report.fail("[Omega]^2 must be strictly positive")

    non_integral = [i for i, v in enumerate(model.c1.values) if v.denominator != 1]
    if non_integral:
        labels = ", ".join(lattice.basis_labels[i] for i in non_integral)
        report.fail(f"c1 is not integral on {labels}")
    else:
        # Wu formula: c1(e) = e.e mod 2 for every class
        odd = [
            lattice.basis_labels[i]
            for i in range(n)
            if (model.c1.values[i].numerator - lattice.pairing[i][i]) % 2
        ]
        if odd:
            report.warnings.append(
                f"c1 is not characteristic on {', '.join(odd)} (torsion truncated?)"
            )

    return report


def require_valid(model: ManifoldModel) -> ManifoldModel:
    report = validate(model)
    if not report.valid:
        raise InvalidModelError(f"invalid model {model.name!r}: {'; '.join(report.errors)}")
    return model


def _positive(value, what: str) -> Fraction:
    value = Fraction(value)
    if value <= 0:
        raise InvalidModelError(f"{what} must be positive, got {format_rational(value)}")
    return value


_PRODUCT_PAIRING = ((0, 1), (1, 0))


def make_cp2(scale=1) -> ManifoldModel:
    """CP^2 with [Omega] = scale * l and c1 = 3l"""
    scale = _positive(scale, "scale")
    model = ManifoldModel(
        lattice=IntersectionLattice(((1,),), ("L",)),
        c1=CohomologyFunctional.of(3),
        omega=CohomologyFunctional.of(scale),
        flags=ModelFlags(in_class_C=True, minimal=True, rational_or_ruled=True),
        builtin=BuiltinTag(BuiltinKind.CP2, (scale,)),
        name="CP2" if scale == 1 else f"CP2({format_rational(scale)})",
    )
    return require_valid(model)


def make_s2xs2(alpha, beta) -> ManifoldModel:
    """S^2 x S^2 with areas alpha on A1 = [S^2 x pt] and beta on A2 = [pt x S^2]"""
    alpha = _positive(alpha, "alpha")
    beta = _positive(beta, "beta")
    model = ManifoldModel(
        lattice=IntersectionLattice(_PRODUCT_PAIRING, ("A1", "A2")),
        c1=CohomologyFunctional.of(2, 2),
        omega=CohomologyFunctional.of(alpha, beta),
        flags=ModelFlags(in_class_C=True, minimal=True, rational_or_ruled=True),
        builtin=BuiltinTag(BuiltinKind.S2XS2, (alpha, beta)),
        name=f"S2xS2({format_rational(alpha)},{format_rational(beta)})",
    )
    return require_valid(model)


def make_ruled(genus: int, beta, alpha) -> ManifoldModel:
    """
    Sigma_g x S^2 with Omega = beta sigma_R + alpha sigma_S2

    Basis R = [Sigma_g x pt], S = [pt x S^2]; c1 = (2 - 2g, 2).
    """
    if isinstance(genus, bool) or int(genus) != genus or genus < 1:
        raise InvalidModelError(f"genus must be an integer >= 1, got {genus}")
    genus = int(genus)
    beta = _positive(beta, "beta")
    alpha = _positive(alpha, "alpha")
    model = ManifoldModel(
        lattice=IntersectionLattice(_PRODUCT_PAIRING, ("R", "S")),
        c1=CohomologyFunctional.of(2 - 2 * genus, 2),
        omega=CohomologyFunctional.of(beta, alpha),
        flags=ModelFlags(in_class_C=True, minimal=True, rational_or_ruled=True),
        builtin=BuiltinTag(BuiltinKind.RULED, (Fraction(genus), beta, alpha)),
        name=f"Sigma{genus}xS2({format_rational(beta)},{format_rational(alpha)})",
    )
    return require_valid(model)
