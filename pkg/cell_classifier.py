"""
Cell and degeneration classification

Cells of a corner-cut-free subdivision come in four shapes:
    a  simplex          (4 vertices, volume 1)
    b  square pyramid   (5 vertices, volume 2)
    c  triangular prism (6 vertices, volume 3)
    d  cube             (8 vertices, volume 6)
Coefficients on a cell's vertices give the equation of the divisor on the
corresponding toric piece; subtypes record how that equation degenerates.
"""
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import sympy

from config import SEED
from cube_geometry import POINTS, MarkedCell, canonical_form, facets, key_index, normalized_volume, point_key
from errors import BoundExceeded, InvalidCoefficients, InvalidInput, NotABulletCell
from exact_kernel import format_rational, nullspace, rank, to_rational
from logger_config import setup_logger
from subdivisions import Subdivision, interior_walls

logger = setup_logger("cell_classifier")

CELL_TYPES = {(4, 1): "a", (5, 2): "b", (6, 3): "c", (8, 6): "d"}
GENERIC_LABELS = {"a": "a", "b": "b", "c": "c1", "d": "d1"}
AXES = "xyz"


@dataclass(frozen=True)
class CoefficientAssignment:
    """Rational coefficients c_ijk on the eight cube vertices, by index"""

    values: Tuple[Fraction, ...]

    @classmethod
    def of(cls, values: Sequence) -> "CoefficientAssignment":
        if len(values) != 8:
            raise InvalidInput("A coefficient assignment covers all 8 vertices")
        return cls(tuple(to_rational(v) for v in values))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, object]) -> "CoefficientAssignment":
        values = [None] * 8
        for key, value in mapping.items():
            values[key_index(key)] = to_rational(value)
        missing = [point_key(i) for i, v in enumerate(values) if v is None]
        if missing:
            raise InvalidInput(f"Coefficients missing for vertices: {', '.join(missing)}")
        return cls(tuple(values))

    def to_json(self) -> dict:
        return {
            "coefficients": {point_key(i): format_rational(v) for i, v in enumerate(self.values)}
        }

    def __getitem__(self, index: int) -> Fraction:
        return self.values[index]

    def permuted(self, table: Sequence[int]) -> "CoefficientAssignment":
        """Pull back along an index permutation: new[table[i]] = old[i]"""
        values = [Fraction(0)] * 8
        for i, j in enumerate(table):
            values[j] = self.values[i]
        return CoefficientAssignment(tuple(values))

    def scaled(self, t) -> "CoefficientAssignment":
        return CoefficientAssignment(tuple(Fraction(t) * v for v in self.values))


@dataclass(frozen=True)
class SubtypeLabel:
    label: str
    components: int
    triple_point: bool = False
    broken_lines: Tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "components": self.components,
            "triple_point": self.triple_point,
            "broken_lines": list(self.broken_lines),
        }


def cell_type(cell: MarkedCell) -> str:
    """
    Shape label from (vertex count, normalized volume)

    Raises:
        NotABulletCell: any other signature, e.g. the octahedron (6, 4)
    """
    canonical = canonical_form(cell)
    signature = (len(canonical), normalized_volume(canonical))
    if signature not in CELL_TYPES:
        raise NotABulletCell(
            f"Cell with signature {signature} is not one of the four bullet shapes",
            payload={"signature": list(signature), "cell": cell.to_json()},
        )
    return CELL_TYPES[signature]


# ---------------------------------------------------------------------------
# Type d: the (1,1,1) form on (P^1)^3
# ---------------------------------------------------------------------------


def _a(c: CoefficientAssignment, i: int, j: int, k: int) -> Fraction:
    return c[(i << 2) | (j << 1) | k]


def hyperdeterminant_222(c: CoefficientAssignment) -> Fraction:
    """Cayley's quartic hyperdeterminant of the array c_ijk"""
    a = {(i, j, k): _a(c, i, j, k) for i, j, k in itertools.product((0, 1), repeat=3)}
    return (
        a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2
        + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
        + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2
        + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2
        - 2
        * (
            a[0, 0, 0] * a[0, 0, 1] * a[1, 1, 0] * a[1, 1, 1]
            + a[0, 0, 0] * a[0, 1, 0] * a[1, 0, 1] * a[1, 1, 1]
            + a[0, 0, 0] * a[1, 0, 0] * a[0, 1, 1] * a[1, 1, 1]
            + a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 1] * a[1, 1, 0]
            + a[0, 0, 1] * a[1, 0, 0] * a[0, 1, 1] * a[1, 1, 0]
            + a[0, 1, 0] * a[1, 0, 0] * a[0, 1, 1] * a[1, 0, 1]
        )
        + 4
        * (
            a[0, 0, 0] * a[0, 1, 1] * a[1, 0, 1] * a[1, 1, 0]
            + a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0] * a[1, 1, 1]
        )
    )


def discriminant_hyperdeterminant(c: CoefficientAssignment) -> Fraction:
    """Discriminant of the binary quadratic det(t0 A0 + t1 A1) in the x-slices"""
    t0, t1 = sympy.symbols("t0 t1")
    slices = [
        sympy.Matrix(2, 2, [sympy.Rational(str(_a(c, i, j, k))) for j in (0, 1) for k in (0, 1)])
        for i in (0, 1)
    ]
    form = sympy.Poly((t0 * slices[0] + t1 * slices[1]).det(), t0, t1)
    p = form.coeff_monomial(t0**2)
    q = form.coeff_monomial(t0 * t1)
    r = form.coeff_monomial(t1**2)
    value = sympy.Rational(q**2 - 4 * p * r)
    return Fraction(int(value.p), int(value.q))


# (i, j, k) of each vertex index
_INDEXES = [(n >> 2, (n >> 1) & 1, n & 1) for n in range(8)]


def _partial_rows(x: Sequence, y: Sequence, z: Sequence) -> List[List]:
    """The six partial derivatives at (x, y, z) as linear forms in c, by index"""
    rows = []
    for i in (0, 1):
        rows.append([y[j] * z[k] if a == i else 0 for a, j, k in _INDEXES])
    for j in (0, 1):
        rows.append([x[a] * z[k] if b == j else 0 for a, b, k in _INDEXES])
    for k in (0, 1):
        rows.append([x[a] * y[j] if d == k else 0 for a, j, d in _INDEXES])
    return rows


def has_singular_point(c: CoefficientAssignment) -> bool:
    """
    Whether V(sum c_ijk X_i Y_j Z_k) in (P^1)^3 has a singular point

    Each factor is covered by its affine chart (second coordinate 1) and its
    point at infinity (1 : 0); on each of the eight pieces the six partial
    derivatives are solved with a Groebner basis over Q.
    """
    if not any(c.values):
        return True
    s = sympy.symbols("s0:3")
    for at_infinity in itertools.product((False, True), repeat=3):
        coords = [((1, 0) if inf else (s[axis], 1)) for axis, inf in enumerate(at_infinity)]
        free = [s[axis] for axis, inf in enumerate(at_infinity) if not inf]
        equations = []
        for row in _partial_rows(*coords):
            expr = sympy.expand(
                sum(sympy.Rational(str(v)) * term for v, term in zip(c.values, row) if v)
            )
            if expr != 0:
                equations.append(expr)
        if not equations:
            return True
        if not free:
            continue
        basis = sympy.groebner(equations, *free, order="grevlex")
        if list(basis.exprs) != [1]:
            return True
    return False


def singular_coefficients(point: Sequence[Sequence], rng: random.Random) -> CoefficientAssignment:
    """Random nonzero integer-weighted assignment whose surface is singular at `point` = (x, y, z)"""
    x, y, z = ([to_rational(v) for v in coord] for coord in point)
    kernel = nullspace(_partial_rows(x, y, z), ncols=8)
    weights = [rng.choice((-3, -2, -1, 1, 2, 3)) for _ in kernel]
    return CoefficientAssignment(
        tuple(sum((w * v[n] for w, v in zip(weights, kernel)), Fraction(0)) for n in range(8))
    )


def flattening(c: CoefficientAssignment, axis: int) -> List[List[Fraction]]:
    """2x4 matrix whose rows are the two slices orthogonal to `axis`"""
    bit = 4 >> axis
    rows = [[], []]
    for index in range(8):
        rows[1 if index & bit else 0].append(c[index])
    return rows


def _face_determinant(c: CoefficientAssignment, axis: int, side: int) -> Fraction:
    bit = 4 >> axis
    verts = [i for i in range(8) if bool(i & bit) == bool(side)]
    # verts are in index order: 00, 01, 10, 11 in the two free coordinates
    return c[verts[0]] * c[verts[3]] - c[verts[1]] * c[verts[2]]


def broken_faces(c: CoefficientAssignment) -> Tuple[str, ...]:
    """Cube facets whose 2x2 coefficient slice is singular"""
    return tuple(
        f"{AXES[axis]}={side}"
        for axis in range(3)
        for side in (0, 1)
        if _face_determinant(c, axis, side) == 0
    )


def _check_edge_rule(c: CoefficientAssignment):
    for index in range(8):
        for bit in (4, 2, 1):
            other = index ^ bit
            if index < other and c[index] == 0 and c[other] == 0:
                raise InvalidCoefficients(
                    f"Coefficients vanish at both ends of the edge {point_key(index)}-{point_key(other)}",
                    payload={"edge": [point_key(index), point_key(other)]},
                )


def classify_d(c: CoefficientAssignment, enforce_edge_rule: bool = True) -> SubtypeLabel:
    """
    d3: product of three linear forms; d2: exactly one slice direction
    factors off; d1 / d1' smooth / singular irreducible surface

    The corners-only form c000 = 1, c111 = -1 has zeros at both ends of
    several edges and is classified only with enforce_edge_rule=False.

    Raises:
        InvalidCoefficients: all-zero assignment, or two zeros on one cube edge
    """
    if not any(c.values):
        raise InvalidCoefficients("All coefficients vanish")
    if enforce_edge_rule:
        _check_edge_rule(c)
    rank_one = [rank(flattening(c, axis)) == 1 for axis in range(3)]
    if sum(rank_one) >= 2:
        label, components = "d3", 3
    elif sum(rank_one) == 1:
        label, components = "d2", 2
    elif hyperdeterminant_222(c) != 0:
        label, components = "d1", 1
    else:
        label, components = "d1'", 1
    return SubtypeLabel(
        label=label,
        components=components,
        triple_point=any(v == 0 for v in c.values),
        broken_lines=broken_faces(c),
    )


# ---------------------------------------------------------------------------
# Type c: prisms
# ---------------------------------------------------------------------------


def prism_coordinates(cell: MarkedCell) -> Tuple[Tuple[int, int, int], Tuple[int, int, int]]:
    """
    Vertex indices (a0, a1, a2), (b0, b1, b2) of a prism cell

    The two triangles are translates of each other, b_i = a_i + t; index 2 is
    the triangle vertex off the diagonal rectangle.
    """
    if len(cell) != 6:
        raise NotABulletCell(f"Cell {cell.vertices} is not a prism")
    triangles = [f.vertices for f in facets(cell) if len(f.vertices) == 3]
    rectangle = next(f.vertices for f in facets(cell) if len(f.vertices) == 4 and not f.on_boundary)
    tri_a, tri_b = sorted(triangles)
    shift = tri_a[0] ^ tri_b[0]
    off = next(v for v in tri_a if v not in rectangle)
    a0, a1 = sorted(v for v in tri_a if v != off)
    a = (a0, a1, off)
    return a, tuple(v ^ shift for v in a)


def classify_c(a: Sequence, b: Sequence) -> SubtypeLabel:
    """
    c3: proportional triples (two components); c2: (a0, a1) and (b0, b1)
    proportional; c1 otherwise

    Raises:
        InvalidCoefficients: a zero among a0, a1, b0, b1 or both a2, b2 zero
    """
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in b]
    if 0 in (a[0], a[1], b[0], b[1]) or (a[2] == 0 and b[2] == 0):
        raise InvalidCoefficients("Prism coefficients violate the apex rules")
    broken = []
    if a[1] * b[2] - a[2] * b[1] == 0:
        broken.append("square-12")
    if a[0] * b[2] - a[2] * b[0] == 0:
        broken.append("square-02")
    if rank([a, b]) == 1:
        label, components = "c3", 2
    elif a[0] * b[1] - a[1] * b[0] == 0:
        label, components = "c2", 1
    else:
        label, components = "c1", 1
    return SubtypeLabel(
        label=label,
        components=components,
        triple_point=a[2] == 0 or b[2] == 0,
        broken_lines=tuple(broken),
    )


# ---------------------------------------------------------------------------
# Types a and b
# ---------------------------------------------------------------------------


def classify_a(cell: MarkedCell, c: CoefficientAssignment) -> SubtypeLabel:
    return SubtypeLabel(label="a", components=1, triple_point=any(c[v] == 0 for v in cell.vertices))


def _diagonals(quad: Sequence[int]) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    for p, q in itertools.combinations(quad, 2):
        r, s = [v for v in quad if v not in (p, q)]
        if all(POINTS[p][k] + POINTS[q][k] == POINTS[r][k] + POINTS[s][k] for k in range(3)):
            return (p, q), (r, s)
    raise NotABulletCell(f"Vertices {tuple(quad)} do not form a parallelogram")


def quad_determinant(quad: Sequence[int], c: CoefficientAssignment) -> Fraction:
    """Product over one diagonal minus product over the other"""
    (p, q), (r, s) = _diagonals(quad)
    return c[p] * c[q] - c[r] * c[s]


def classify_b(cell: MarkedCell, c: CoefficientAssignment) -> SubtypeLabel:
    """
    Square pyramid: the base section breaks iff its diagonal determinant
    vanishes; a zero is allowed only at a base vertex whose faces all lie on
    the cube boundary, where it marks a triple point

    Raises:
        InvalidCoefficients: more than one zero, or a zero elsewhere
    """
    cell_facets = facets(cell)
    base = next(f.vertices for f in cell_facets if len(f.vertices) == 4)
    free_corners = {
        v
        for v in base
        if all(f.on_boundary for f in cell_facets if v in f.vertices)
    }
    zeros = [v for v in cell.vertices if c[v] == 0]
    if len(zeros) > 1 or any(v not in free_corners for v in zeros):
        raise InvalidCoefficients(
            "Pyramid coefficients may vanish only at one boundary corner of the base",
            payload={"zeros": [point_key(v) for v in zeros]},
        )
    broken = ("base",) if quad_determinant(base, c) == 0 else ()
    return SubtypeLabel(label="b", components=1, triple_point=bool(zeros), broken_lines=broken)


def classify_cell(cell: MarkedCell, c: CoefficientAssignment, enforce_edge_rule: bool = True) -> SubtypeLabel:
    kind = cell_type(cell)
    if kind == "a":
        return classify_a(cell, c)
    if kind == "b":
        return classify_b(cell, c)
    if kind == "c":
        a, b = prism_coordinates(cell)
        return classify_c([c[i] for i in a], [c[i] for i in b])
    return classify_d(c, enforce_edge_rule=enforce_edge_rule)


# ---------------------------------------------------------------------------
# Whole degenerations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DegenerationReport:
    components: int
    case: str
    cusp: str
    cells: Tuple[Tuple[MarkedCell, SubtypeLabel], ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "components": self.components,
            "case": self.case,
            "cusp": self.cusp,
            "cells": [
                {"cell": cell.to_json(), **label.to_json()} for cell, label in self.cells
            ],
        }


def _glued_along_irreducible_curve(s: Subdivision, c: CoefficientAssignment) -> bool:
    if len(s) == 1:
        return True
    shared = {
        tuple(sorted(set(cell.vertices) & set(neighbour.vertices)))
        for cell, neighbour, _ in interior_walls(s)
    }
    for face in shared:
        if len(face) == 4 and quad_determinant(face, c) == 0:
            return False
    return True


def _cusp(labels: List[SubtypeLabel]) -> str:
    kinds = {label.label for label in labels}
    if kinds <= {"a", "b"}:
        return "even"
    if kinds <= {"c2", "c3"}:
        return "odd1"
    if len(labels) == 1 and labels[0].label == "d3":
        return "odd2"
    return "unassigned"


def classify_degeneration(
    s: Subdivision, c: CoefficientAssignment, enforce_edge_rule: bool = True
) -> DegenerationReport:
    """
    Case I: irreducible; Case II: two components glued along an irreducible
    curve; Case III: everything else, tagged with the cusp it maps to
    """
    cells = tuple((cell, classify_cell(cell, c, enforce_edge_rule)) for cell in s.cells)
    labels = [label for _, label in cells]
    components = sum(label.components for label in labels)
    if components == 1:
        case, cusp = "I", "not-a-cusp"
    elif components == 2 and _glued_along_irreducible_curve(s, c):
        case, cusp = "II", "not-a-cusp"
    else:
        case, cusp = "III", _cusp(labels)
    logger.debug(f"{len(s)} cells, {components} components: case {case}, cusp {cusp}")
    return DegenerationReport(components=components, case=case, cusp=cusp, cells=cells)


def is_generic(s: Subdivision, c: CoefficientAssignment) -> bool:
    """Every cell gets its generic label with no broken line, and every shared square glues irreducibly"""
    try:
        for cell in s.cells:
            label = classify_cell(cell, c)
            if label.label != GENERIC_LABELS[cell_type(cell)] or label.broken_lines:
                return False
    except InvalidCoefficients:
        return False
    return _glued_along_irreducible_curve(s, c)


def generic_coefficients(s: Subdivision, seed: Optional[int] = None, attempts: int = 200) -> CoefficientAssignment:
    """
    Seeded search for nonzero integer coefficients that are generic on s

    Raises:
        BoundExceeded: no generic assignment within `attempts` draws
    """
    rng = random.Random(SEED if seed is None else seed)
    for _ in range(attempts):
        values = [rng.choice([v for v in range(-9, 10) if v]) for _ in range(8)]
        c = CoefficientAssignment.of(values)
        if is_generic(s, c):
            return c
    raise BoundExceeded(f"No generic coefficients found in {attempts} attempts")


def classify_report(s: Subdivision, c: CoefficientAssignment) -> Dict:
    """JSON-ready classification with cell types"""
    report = classify_degeneration(s, c)
    doc = report.to_json()
    for entry, (cell, _) in zip(doc["cells"], report.cells):
        entry["type"] = cell_type(cell)
    return doc
