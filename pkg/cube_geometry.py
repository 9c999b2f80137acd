"""
Lattice geometry of the marked unit cube

Points of the cube are addressed by an index 0..7 whose binary digits are the
coordinates, so index order and lexicographic order of coordinates agree.
Cells are vertex subsets; every cube vertex is extremal, so a cell is fully
determined by its vertex set.
"""
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from errors import DegenerateCell, InvalidInput
from exact_kernel import nullspace, rank, solve
from logger_config import setup_logger

logger = setup_logger("cube_geometry")

Point = Tuple[int, int, int]

POINTS: Tuple[Point, ...] = tuple(((i >> 2) & 1, (i >> 1) & 1, i & 1) for i in range(8))
INDEX: Dict[Point, int] = {p: i for i, p in enumerate(POINTS)}


def point_key(index: int) -> str:
    """Bitstring key "xyz" used in height and coefficient documents"""
    return format(index, "03b")


def key_index(key: str) -> int:
    if not isinstance(key, str) or len(key) != 3 or any(ch not in "01" for ch in key):
        raise InvalidInput(f"Vertex key must be a 3-character bitstring, got {key!r}")
    return int(key, 2)


def neighbours(index: int) -> Tuple[int, ...]:
    """Vertices joined to `index` by a cube edge"""
    return tuple(index ^ bit for bit in (4, 2, 1))


def _affine_rank(indices: Sequence[int]) -> int:
    if not indices:
        return -1
    base = POINTS[indices[0]]
    return rank([[p - b for p, b in zip(POINTS[i], base)] for i in indices[1:]] or [[0, 0, 0]])


@dataclass(frozen=True, order=True)
class MarkedCell:
    """A full-dimensional cell, stored as its sorted vertex indices"""

    vertices: Tuple[int, ...]

    @classmethod
    def of(cls, indices: Iterable[int]) -> "MarkedCell":
        verts = tuple(sorted(set(indices)))
        if any(not 0 <= i < 8 for i in verts):
            raise InvalidInput(f"Vertex index out of range: {verts}")
        if _affine_rank(verts) < 3:
            raise DegenerateCell(f"Vertices {verts} do not span three dimensions")
        return cls(verts)

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]]) -> "MarkedCell":
        indices = []
        for p in points:
            p = tuple(p)
            if p not in INDEX:
                raise InvalidInput(f"Not a cube vertex: {list(p)}")
            indices.append(INDEX[p])
        return cls.of(indices)

    @property
    def mask(self) -> int:
        return sum(1 << i for i in self.vertices)

    @property
    def points(self) -> Tuple[Point, ...]:
        return tuple(POINTS[i] for i in self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, index: int) -> bool:
        return index in self.vertices

    def to_json(self) -> List[List[int]]:
        return [list(p) for p in self.points]


CUBE = MarkedCell(tuple(range(8)))


@dataclass(frozen=True)
class Facet:
    """Supporting plane normal . p >= offset, tight exactly on `vertices`"""

    normal: Tuple[int, int, int]
    offset: int
    vertices: Tuple[int, ...]

    @property
    def on_boundary(self) -> bool:
        """True when the facet lies in a facet of the cube"""
        pts = [POINTS[i] for i in self.vertices]
        return any(len({p[axis] for p in pts}) == 1 for axis in range(3))


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _sub(p, q):
    return tuple(a - b for a, b in zip(p, q))


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


@lru_cache(maxsize=None)
def _facets(vertices: Tuple[int, ...]) -> Tuple[Facet, ...]:
    found = {}
    for a, b, c in itertools.combinations(vertices, 3):
        pa, pb, pc = POINTS[a], POINTS[b], POINTS[c]
        normal = _cross(_sub(pb, pa), _sub(pc, pa))
        if not any(normal):
            continue
        g = gcd(*normal)
        normal = tuple(x // g for x in normal)
        offset = _dot(normal, pa)
        values = [_dot(normal, POINTS[i]) - offset for i in vertices]
        if all(v <= 0 for v in values):
            normal = tuple(-x for x in normal)
            offset = -offset
            values = [-v for v in values]
        elif not all(v >= 0 for v in values):
            continue
        tight = tuple(i for i, v in zip(vertices, values) if v == 0)
        found.setdefault(tight, Facet(normal=normal, offset=offset, vertices=tight))
    return tuple(found[key] for key in sorted(found))


def facets(cell: MarkedCell) -> Tuple[Facet, ...]:
    """Facets with inward primitive integer normals"""
    return _facets(cell.vertices)


@lru_cache(maxsize=None)
def _faces(vertices: Tuple[int, ...]) -> Dict[int, Tuple[Tuple[int, ...], ...]]:
    faces = {frozenset(f.vertices) for f in _facets(vertices)}
    frontier = set(faces)
    while frontier:
        new = set()
        for f, g in itertools.combinations(faces, 2):
            meet = f & g
            if meet and meet not in faces:
                new.add(meet)
        faces |= new
        frontier = new
    by_dim: Dict[int, List[Tuple[int, ...]]] = {0: [], 1: [], 2: [], 3: [vertices]}
    for face in faces:
        verts = tuple(sorted(face))
        by_dim[_affine_rank(verts)].append(verts)
    return {dim: tuple(sorted(fs)) for dim, fs in by_dim.items()}


def face_lattice(cell: MarkedCell) -> Dict[int, Tuple[Tuple[int, ...], ...]]:
    """All nonempty faces grouped by dimension (3 is the cell itself)"""
    return _faces(cell.vertices)


@lru_cache(maxsize=None)
def _volume(vertices: Tuple[int, ...]) -> int:
    apex = vertices[0]
    edges = _faces(vertices)[1]
    total = 0
    for facet in _facets(vertices):
        if apex in facet.vertices:
            continue
        f0 = facet.vertices[0]
        for a, b in edges:
            if a in facet.vertices and b in facet.vertices and f0 not in (a, b):
                rows = [_sub(POINTS[x], POINTS[apex]) for x in (f0, a, b)]
                total += abs(_dot(rows[0], _cross(rows[1], rows[2])))
    return total


def normalized_volume(cell: MarkedCell) -> int:
    """3! times the Euclidean volume, via a pulling triangulation"""
    if _affine_rank(cell.vertices) < 3:
        raise DegenerateCell(f"Vertices {cell.vertices} do not span three dimensions")
    return _volume(cell.vertices)


def is_simplex(cell: MarkedCell) -> bool:
    return len(cell) == 4


def corner_cut_apex(cell: MarkedCell) -> Optional[int]:
    """Apex of a corner-cut cell (a vertex plus its three cube neighbours), else None"""
    if len(cell) != 4:
        return None
    for apex in cell.vertices:
        if set(neighbours(apex)) == set(cell.vertices) - {apex}:
            return apex
    return None


# ---------------------------------------------------------------------------
# Symmetries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymQElement:
    """Coordinate permutation followed by reflections x -> 1 - x"""

    perm: Tuple[int, int, int]
    flips: Tuple[int, int, int]

    def apply_point(self, p: Sequence[int]) -> Point:
        return tuple(p[self.perm[i]] ^ self.flips[i] for i in range(3))

    def apply_index(self, index: int) -> int:
        return INDEX[self.apply_point(POINTS[index])]

    def apply(self, cell: MarkedCell) -> MarkedCell:
        return MarkedCell(tuple(sorted(self.apply_index(i) for i in cell.vertices)))

    def inverse(self) -> "SymQElement":
        inv = [0, 0, 0]
        for i, j in enumerate(self.perm):
            inv[j] = i
        flips = [0, 0, 0]
        for i, j in enumerate(self.perm):
            flips[j] = self.flips[i]
        return SymQElement(perm=tuple(inv), flips=tuple(flips))


SYM_Q: Tuple[SymQElement, ...] = tuple(
    SymQElement(perm=perm, flips=flips)
    for perm in itertools.permutations(range(3))
    for flips in itertools.product((0, 1), repeat=3)
)

# index permutation table, one row per group element
SYM_Q_TABLE: Tuple[Tuple[int, ...], ...] = tuple(
    tuple(g.apply_index(i) for i in range(8)) for g in SYM_Q
)


def canonical_form(cell: MarkedCell) -> MarkedCell:
    """Lexicographically least image over Sym(Q)"""
    return MarkedCell(min(tuple(sorted(row[i] for i in cell.vertices)) for row in SYM_Q_TABLE))


@lru_cache(maxsize=1)
def all_cells() -> Tuple[MarkedCell, ...]:
    """Every full-dimensional vertex subset of the cube"""
    cells = []
    for size in range(4, 9):
        for verts in itertools.combinations(range(8), size):
            if _affine_rank(verts) == 3:
                cells.append(MarkedCell(verts))
    logger.debug(f"{len(cells)} full-dimensional cells")
    return tuple(sorted(cells))


# ---------------------------------------------------------------------------
# Circuits and proper intersection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Circuit:
    positive: Tuple[int, ...]
    negative: Tuple[int, ...]


@lru_cache(maxsize=1)
def circuits() -> Tuple[Circuit, ...]:
    """Minimal affine dependences of the cube vertices, both orientations"""
    found = []
    for size in (4, 5):
        for subset in itertools.combinations(range(8), size):
            columns = [(1,) + POINTS[i] for i in subset]
            matrix = [[col[r] for col in columns] for r in range(4)]
            kernel = nullspace(matrix, ncols=size)
            if len(kernel) != 1 or any(c == 0 for c in kernel[0]):
                continue
            lam = kernel[0]
            pos = tuple(i for i, c in zip(subset, lam) if c > 0)
            neg = tuple(i for i, c in zip(subset, lam) if c < 0)
            found.append(Circuit(pos, neg))
            found.append(Circuit(neg, pos))
    return tuple(found)


@lru_cache(maxsize=None)
def _proper(mask_a: int, mask_b: int) -> bool:
    common = mask_a & mask_b
    for z in circuits():
        support = sum(1 << i for i in z.positive + z.negative)
        # a circuit inside the shared face does not separate the cells
        if support & ~common == 0:
            continue
        if all(mask_a >> i & 1 for i in z.positive) and all(mask_b >> i & 1 for i in z.negative):
            return False
    return True


def intersect_properly(a: MarkedCell, b: MarkedCell) -> bool:
    """conv(a) and conv(b) meet in a common face (possibly empty)"""
    return _proper(a.mask, b.mask)


# ---------------------------------------------------------------------------
# Affine interpolation
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def barycentric(basis: Tuple[int, int, int, int], target: int) -> Tuple[Fraction, ...]:
    """Affine coordinates of `target` with respect to four independent vertices"""
    if _affine_rank(basis) < 3:
        raise DegenerateCell(f"Vertices {basis} are affinely dependent")
    matrix = [[1] * 4] + [[POINTS[i][axis] for i in basis] for axis in range(3)]
    return solve(matrix, (1,) + POINTS[target])


def affine_basis(cell: MarkedCell) -> Tuple[int, int, int, int]:
    """Lexicographically first affinely independent 4-subset of the cell"""
    for subset in itertools.combinations(cell.vertices, 4):
        if _affine_rank(subset) == 3:
            return subset
    raise DegenerateCell(f"Vertices {cell.vertices} do not span three dimensions")


def affine_extension(basis: Sequence[int], values: Dict[int, Fraction], target: int) -> Fraction:
    """Value at `target` of the affine function through (b, values[b]) for b in basis"""
    coords = barycentric(tuple(basis), target)
    return sum(c * values[b] for c, b in zip(coords, basis))
