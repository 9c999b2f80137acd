"""
Divisor-class arithmetic on P2, P1xP1, F1 and Bl3P2 with coefficients affine in eps

Classes are stored as (constant, eps) coefficient pairs per basis element;
intersection numbers come back as sympy polynomials in eps, so identities are
checked symbolically rather than at a sampled eps.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Sequence, Tuple

import sympy

from errors import InvalidInput, LatticeMismatch, UnknownLattice
from exact_kernel import to_rational
from logger_config import setup_logger

logger = setup_logger("intersection_theory")

EPS = sympy.Symbol("eps", positive=True)


@dataclass(frozen=True)
class PicLattice:
    name: str
    labels: Tuple[str, ...]
    matrix: Tuple[Tuple[int, ...], ...]
    canonical: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.labels)


PIC_LATTICES: Dict[str, PicLattice] = {
    "P2": PicLattice("P2", ("l",), ((1,),), (-3,)),
    "P1xP1": PicLattice("P1xP1", ("l1", "l2"), ((0, 1), (1, 0)), (-2, -2)),
    "F1": PicLattice("F1", ("h", "f"), ((1, 1), (1, 0)), (-2, -1)),
    "Bl3P2": PicLattice(
        "Bl3P2",
        ("l", "e1", "e2", "e3"),
        ((1, 0, 0, 0), (0, -1, 0, 0), (0, 0, -1, 0), (0, 0, 0, -1)),
        (-3, 1, 1, 1),
    ),
}

# generators of the cone of curves; a class is ample iff positive on each
CURVE_GENERATORS: Dict[str, Tuple[Tuple[int, ...], ...]] = {
    "P2": ((1,),),
    "P1xP1": ((1, 0), (0, 1)),
    "F1": ((1, -1), (0, 1)),
    "Bl3P2": (
        (0, 1, 0, 0),
        (0, 0, 1, 0),
        (0, 0, 0, 1),
        (1, -1, -1, 0),
        (1, -1, 0, -1),
        (1, 0, -1, -1),
    ),
}


def pic_lattice(name: str) -> PicLattice:
    if name not in PIC_LATTICES:
        raise UnknownLattice(f"Unknown surface {name!r}", payload={"known": list(PIC_LATTICES)})
    return PIC_LATTICES[name]


@dataclass(frozen=True)
class EpsClass:
    """a + b*eps with a, b rational coefficient vectors"""

    lattice: PicLattice
    coefficients: Tuple[Tuple[Fraction, Fraction], ...]

    @classmethod
    def of(cls, lattice: PicLattice, constant: Sequence, eps: Sequence = None) -> "EpsClass":
        eps = [0] * lattice.rank if eps is None else eps
        if len(constant) != lattice.rank or len(eps) != lattice.rank:
            raise InvalidInput(f"{lattice.name} classes have {lattice.rank} coefficients")
        return cls(
            lattice,
            tuple((to_rational(a), to_rational(b)) for a, b in zip(constant, eps)),
        )

    @classmethod
    def canonical(cls, lattice: PicLattice) -> "EpsClass":
        return cls.of(lattice, lattice.canonical)

    @property
    def constant(self) -> Tuple[Fraction, ...]:
        return tuple(a for a, _ in self.coefficients)

    @property
    def eps_part(self) -> Tuple[Fraction, ...]:
        return tuple(b for _, b in self.coefficients)

    def _check(self, other: "EpsClass"):
        if other.lattice.name != self.lattice.name:
            raise LatticeMismatch(
                f"Cannot combine classes on {self.lattice.name} and {other.lattice.name}"
            )

    def __add__(self, other: "EpsClass") -> "EpsClass":
        self._check(other)
        return EpsClass(
            self.lattice,
            tuple((a + c, b + d) for (a, b), (c, d) in zip(self.coefficients, other.coefficients)),
        )

    def __neg__(self) -> "EpsClass":
        return self.scaled(-1)

    def __sub__(self, other: "EpsClass") -> "EpsClass":
        return self + (-other)

    def scaled(self, constant, eps=0) -> "EpsClass":
        """Multiply by (constant + eps*eps); an eps factor needs a class without eps part"""
        constant, eps = Fraction(constant), Fraction(eps)
        if eps and any(self.eps_part):
            raise InvalidInput("Product would be quadratic in eps")
        return EpsClass(
            self.lattice,
            tuple((constant * a, constant * b + eps * a) for a, b in self.coefficients),
        )

    def to_json(self) -> dict:
        return {
            "lattice": self.lattice.name,
            "class": {label: str(value) for label, value in zip(self.lattice.labels, _symbolic(self))},
        }


def _rational(q: Fraction) -> sympy.Rational:
    return sympy.Rational(q.numerator, q.denominator)


def _symbolic(x: EpsClass):
    return [_rational(a) + _rational(b) * EPS for a, b in x.coefficients]


def intersect(x: EpsClass, y: EpsClass) -> sympy.Poly:
    """
    Bilinear extension of the intersection matrix

    Raises:
        LatticeMismatch: classes on different surfaces
    """
    x._check(y)
    u, v = _symbolic(x), _symbolic(y)
    m = x.lattice.matrix
    total = sum(u[i] * m[i][j] * v[j] for i in range(len(u)) for j in range(len(v)))
    return sympy.Poly(sympy.expand(total), EPS, domain=sympy.QQ)


def self_intersection(x: EpsClass) -> sympy.Poly:
    return intersect(x, x)


def _constant_value(poly: sympy.Poly) -> Fraction:
    if poly.degree() > 0:
        raise InvalidInput("Expected an eps-free intersection number")
    value = sympy.Rational(poly.as_expr())
    return Fraction(int(value.p), int(value.q))


def cover_canonical_square(
    lattice: PicLattice,
    da: EpsClass,
    db: EpsClass,
    dc: EpsClass,
    group_order: int = 4,
) -> Fraction:
    """K_X^2 of the (Z/2)^2 cover branched over Da + Db + Dc: |G| (K + (Da+Db+Dc)/2)^2"""
    for d in (da, db, dc):
        if d.lattice.name != lattice.name:
            raise LatticeMismatch(f"Branch class on {d.lattice.name}, expected {lattice.name}")
    pullback = EpsClass.canonical(lattice) + (da + db + dc).scaled(Fraction(1, 2))
    return group_order * _constant_value(self_intersection(pullback))


def ampleness_witness(x: EpsClass) -> bool:
    """Ample for every sufficiently small eps > 0 (Kleiman against the curve generators)"""
    if x.lattice.name not in CURVE_GENERATORS:
        raise UnknownLattice(f"No ample cone recorded for {x.lattice.name}")
    for curve in CURVE_GENERATORS[x.lattice.name]:
        degree = intersect(x, EpsClass.of(x.lattice, curve))
        constant = degree.coeff_monomial(1)
        slope = degree.coeff_monomial(EPS)
        if constant < 0 or (constant == 0 and slope <= 0):
            return False
    return True


# boundary data per cell type: surface, class of D|_B, class of (Delta - D)|_B
CELL_SURFACES: Dict[str, Tuple[str, Tuple[int, ...], Tuple[int, ...]]] = {
    "a": ("P2", (2,), (2,)),
    "b": ("P1xP1", (1, 1), (2, 2)),
    "c": ("F1", (1, 0), (2, 2)),
    "d": ("Bl3P2", (0, 0, 0, 0), (6, -2, -2, -2)),
}


def log_canonical_class(cell_type: str) -> EpsClass:
    """K_B + D|_B + ((1+eps)/2)(Delta - D)|_B on the surface of a bullet cell"""
    if cell_type not in CELL_SURFACES:
        raise UnknownLattice(f"No surface recorded for cell type {cell_type!r}")
    name, d, rest = CELL_SURFACES[cell_type]
    lattice = PIC_LATTICES[name]
    boundary = EpsClass.of(lattice, rest).scaled(Fraction(1, 2), Fraction(1, 2))
    return EpsClass.canonical(lattice) + EpsClass.of(lattice, d) + boundary


def hexagon_identity() -> sympy.Poly:
    """(K + ((1+eps)/2)(6l - 2e1 - 2e2 - 2e3))^2 on Bl3P2"""
    return self_intersection(log_canonical_class("d"))


COVER_CASES = (
    ("F1", ((1, 2), (1, 0), (1, 0))),
    ("P1xP1", ((1, 1), (1, 1), (1, 1))),
    ("P2", ((2,), (2,), (0,))),
    ("P1xP1", ((2, 1), (0, 1), (0, 1))),
)


def invariants_report() -> dict:
    """Cover invariants K_X^2, the eps^2 identity and the ampleness of each cell's log canonical class"""
    covers = []
    for name, branch in COVER_CASES:
        lattice = PIC_LATTICES[name]
        da, db, dc = (EpsClass.of(lattice, b) for b in branch)
        value = cover_canonical_square(lattice, da, db, dc)
        covers.append(
            {"surface": name, "branch": [list(b) for b in branch], "K_X^2": str(value)}
        )
    cells = {}
    for kind in sorted(CELL_SURFACES):
        cls = log_canonical_class(kind)
        cells[kind] = {**cls.to_json(), "ample": ampleness_witness(cls)}
    identity = hexagon_identity()
    logger.info(f"Hexagon identity: {identity.as_expr()}")
    return {
        "hexagon_square": str(identity.as_expr()),
        "hexagon_identity_holds": identity == sympy.Poly(6 * EPS**2, EPS, domain=sympy.QQ),
        "covers": covers,
        "log_canonical": cells,
    }
