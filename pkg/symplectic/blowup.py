"""
Blow-ups at the level of lattices and symplectic classes

Blowing up N points appends N classes E_q with E_q.E_q = -1, orthogonal to
everything else. Since c1 of the blow-up is c1 - sum e_q and e_q(E_q) = -1,
the new c1 takes the value +1 on every E_q.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

from symplectic.errors import DimensionMismatchError, PreconditionError
from symplectic.model_core import (
    BuiltinKind,
    BuiltinTag,
    CohomologyFunctional,
    IntersectionLattice,
    ManifoldModel,
    ModelFlags,
    format_rational,
    require_valid,
)
from utils.logger import logger


@dataclass(frozen=True)
class RadiiList:
    """Squared radii (weights) lambda_q^2 of the balls; each ball consumes its weight"""

    values: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        values = tuple(Fraction(v) for v in self.values)
        for q, v in enumerate(values):
            if v <= 0:
                raise PreconditionError(
                    f"squared radius #{q + 1} must be positive, got {format_rational(v)}"
                )
        object.__setattr__(self, "values", values)

    @classmethod
    def of(cls, *values) -> "RadiiList":
        return cls(tuple(values))

    @classmethod
    def equal(cls, weight, count: int) -> "RadiiList":
        return cls(tuple([Fraction(weight)] * count))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def sum_of_squares(self) -> Fraction:
        """sum lambda_q^4"""
        return sum((v * v for v in self.values), Fraction(0))


@dataclass(frozen=True)
class BlowupModel:
    base: ManifoldModel
    n_points: int
    model: ManifoldModel

    def exceptional_index(self, q: int) -> int:
        """Lattice coordinate of E_{q+1}"""
        return self.base.rank + q


def _exceptional_count(model: ManifoldModel) -> int:
    tag = model.builtin
    if tag is not None and tag.kind is BuiltinKind.BLOWUP:
        return tag.points
    return 0


def blow_up(base: ManifoldModel, N: int) -> BlowupModel:
    if isinstance(N, bool) or int(N) != N or N <= 0:
        raise PreconditionError(f"number of blow-up points must be positive, got {N}")
    N = int(N)
    require_valid(base)

    n = base.rank
    pairing = [list(row) + [0] * N for row in base.lattice.pairing]
    for q in range(N):
        row = [0] * (n + N)
        row[n + q] = -1
        pairing.append(row)

    first = _exceptional_count(base) + 1
    labels = base.lattice.basis_labels + tuple(f"E{first + q}" for q in range(N))

    # repeated blow-ups are tagged as one blow-up of the original family
    if base.builtin is not None and base.builtin.kind is BuiltinKind.BLOWUP:
        tag = BuiltinTag(
            BuiltinKind.BLOWUP, (Fraction(base.builtin.points + N),), base.builtin.base
        )
        root_name = base.name.rsplit("#", 1)[0]
    else:
        tag = BuiltinTag(BuiltinKind.BLOWUP, (Fraction(N),), base.builtin)
        root_name = base.name

    model = ManifoldModel(
        lattice=IntersectionLattice(tuple(tuple(r) for r in pairing), labels),
        c1=base.c1.extended([1] * N),
        omega=base.omega.extended([0] * N),
        flags=ModelFlags(
            in_class_C=base.flags.in_class_C,
            minimal=False,
            rational_or_ruled=base.flags.rational_or_ruled,
        ),
        builtin=tag,
        name=f"{root_name}#{tag.points}",
    )
    logger.debug(f"Blew up {base.name} at {N} points -> rank {model.rank}")
    return BlowupModel(base=base, n_points=N, model=model)


def blowup_form_class(
    bm: Union[BlowupModel, ManifoldModel], radii: RadiiList
) -> CohomologyFunctional:
    """
    The class [Theta* Omega] - sum lambda_q^2 e_q

    It agrees with the base symplectic class on base classes and takes the
    value lambda_q^2 on E_q. A plain model with no radii is the N = 0 case.
    """
    if isinstance(bm, ManifoldModel):
        if len(radii) != 0:
            raise DimensionMismatchError(
                f"{len(radii)} radii given for a model with no blow-up points"
            )
        return bm.omega
    if len(radii) != bm.n_points:
        raise DimensionMismatchError(
            f"{len(radii)} radii given for {bm.n_points} blow-up points"
        )
    base_omega = bm.model.omega.values[: bm.base.rank]
    return CohomologyFunctional(tuple(base_omega) + radii.values)


def correspond_s2xs2_to_cp2(
    alpha, beta, radii: RadiiList
) -> Tuple[Fraction, RadiiList]:
    """
    Packing S^2 x S^2 (alpha, beta) by N balls as packing CP^2 by N + 1 balls

    Returns the CP^2 scale alpha + beta - w1 and the weights
    (alpha - w1, beta - w1, w2, ..., wN) where w = lambda^2.
    """
    alpha, beta = Fraction(alpha), Fraction(beta)
    if len(radii) < 1:
        raise PreconditionError("the correspondence needs at least one ball")
    w1 = radii.values[0]
    if w1 >= min(alpha, beta):
        raise PreconditionError(
            f"first squared radius {format_rational(w1)} must be below "
            f"min(alpha, beta) = {format_rational(min(alpha, beta))}"
        )
    scale = alpha + beta - w1
    out = RadiiList((alpha - w1, beta - w1) + radii.values[1:])
    return scale, out


def correspond_cp2_to_s2xs2(
    scale, radii: RadiiList
) -> Tuple[Fraction, Fraction, RadiiList]:
    """Inverse of correspond_s2xs2_to_cp2; returns (alpha, beta, radii)"""
    scale = Fraction(scale)
    if len(radii) < 2:
        raise PreconditionError("the inverse correspondence needs at least two CP^2 balls")
    u, v = radii.values[0], radii.values[1]
    w1 = scale - u - v
    if w1 <= 0:
        raise PreconditionError(
            f"CP^2 weights {format_rational(u)}, {format_rational(v)} are incompatible "
            f"with scale {format_rational(scale)}"
        )
    return u + w1, v + w1, RadiiList((w1,) + radii.values[2:])


def correspondence_volumes(alpha, beta, w1) -> Tuple[Fraction, Fraction]:
    """Both sides of gamma^2/2 - (alpha-w1)^2/2 - (beta-w1)^2/2 = alpha*beta - w1^2/2"""
    alpha, beta, w1 = Fraction(alpha), Fraction(beta), Fraction(w1)
    gamma = alpha + beta - w1
    lhs = gamma * gamma / 2 - (alpha - w1) ** 2 / 2 - (beta - w1) ** 2 / 2
    rhs = alpha * beta - w1 * w1 / 2
    return lhs, rhs

