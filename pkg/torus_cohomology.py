"""
Torus-sheaf cohomology of a complex of polytopes

H^1(P, T) = Hom(H_1, K*) where H_1 is the first homology of the Cech chain
complex
    (+) L_ijk  ->  (+) L_ij  ->  (+) L_i
of saturated lattices L = saturation of Z(1, v) over the vertices v of a
face. K* is divisible and has torsion of every order, so H^1 is trivial
exactly when H_1 = 0.

An independent check removes hanging polytopes (cells meeting the rest in a
single facet) and recognizes the cyclic configuration around a codimension-2
face that remains in the non-reducible cases.
"""
import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from cube_geometry import POINTS
from exact_kernel import integer_solve, rank, saturate, smith_normal_form
from logger_config import setup_logger
from subdivisions import Subdivision

logger = setup_logger("torus_cohomology")

TRIVIAL_BY_REDUCTION = "trivial-by-reduction"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class PolytopeComplex:
    """Maximal cells given as vertex-index sets into a list of lattice points"""

    dimension: int
    points: Tuple[Tuple[int, ...], ...]
    cells: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_subdivision(cls, s: Subdivision) -> "PolytopeComplex":
        return cls(dimension=3, points=POINTS, cells=tuple(c.vertices for c in s.cells))

    def reordered(self, order: Sequence[int]) -> "PolytopeComplex":
        return PolytopeComplex(self.dimension, self.points, tuple(self.cells[i] for i in order))

    def without(self, index: int) -> "PolytopeComplex":
        cells = self.cells[:index] + self.cells[index + 1 :]
        return PolytopeComplex(self.dimension, self.points, cells)

    def affine_dimension(self, vertices: Sequence[int]) -> int:
        vertices = list(vertices)
        if not vertices:
            return -1
        base = self.points[vertices[0]]
        diffs = [[p - b for p, b in zip(self.points[v], base)] for v in vertices[1:]]
        return rank(diffs) if diffs else 0


@dataclass(frozen=True)
class CellLattice:
    basis: Tuple[Tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.basis)


def cell_lattice(complex_: PolytopeComplex, vertices: Sequence[int]) -> CellLattice:
    """Saturated sublattice of Z + Z^d generated by (1, v)"""
    gens = [(1,) + tuple(complex_.points[v]) for v in vertices]
    return CellLattice(basis=tuple(saturate(gens)))


@dataclass(frozen=True)
class NerveComplex:
    cells: Dict[int, CellLattice]
    pairs: Dict[Tuple[int, int], CellLattice]
    triples: Dict[Tuple[int, int, int], CellLattice]


def _as_complex(s) -> PolytopeComplex:
    return s if isinstance(s, PolytopeComplex) else PolytopeComplex.from_subdivision(s)


def build_nerve(s) -> NerveComplex:
    """Nonempty pairwise and triple intersections with their face lattices"""
    cx = _as_complex(s)
    vertex_sets = [set(c) for c in cx.cells]
    cells = {i: cell_lattice(cx, c) for i, c in enumerate(cx.cells)}
    pairs = {}
    for i, j in itertools.combinations(range(len(cx.cells)), 2):
        meet = vertex_sets[i] & vertex_sets[j]
        if meet:
            pairs[(i, j)] = cell_lattice(cx, sorted(meet))
    triples = {}
    for i, j, k in itertools.combinations(range(len(cx.cells)), 3):
        meet = vertex_sets[i] & vertex_sets[j] & vertex_sets[k]
        if meet:
            triples[(i, j, k)] = cell_lattice(cx, sorted(meet))
    return NerveComplex(cells=cells, pairs=pairs, triples=triples)


@dataclass(frozen=True)
class AbelianGroupDescriptor:
    rank: int
    torsion: Tuple[int, ...] = ()

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion), "trivial": self.is_trivial}


def _offsets(lattices: Dict) -> Tuple[Dict, int]:
    offsets, total = {}, 0
    for key in sorted(lattices):
        offsets[key] = total
        total += lattices[key].rank
    return offsets, total


def _inclusion(source: CellLattice, target: CellLattice) -> List[Tuple[int, ...]]:
    """Coordinates in `target` of each basis vector of `source`"""
    columns = []
    for vector in source.basis:
        coords = integer_solve(target.basis, vector)
        if coords is None:
            raise ArithmeticError("Face lattice is not contained in the cell lattice")
        columns.append(coords)
    return columns


def _boundary(sources: Dict, targets: Dict, faces) -> List[List[int]]:
    """Matrix (rows = target coordinates) of the alternating-sum boundary"""
    src_off, n_src = _offsets(sources)
    tgt_off, n_tgt = _offsets(targets)
    matrix = [[0] * n_src for _ in range(n_tgt)]
    for key, lattice in sources.items():
        for sign, face in faces(key):
            columns = _inclusion(lattice, targets[face])
            for col, coords in enumerate(columns):
                for row, value in enumerate(coords):
                    matrix[tgt_off[face] + row][src_off[key] + col] += sign * value
    return matrix


def _pair_faces(key):
    i, j = key
    return [(1, j), (-1, i)]


def _triple_faces(key):
    i, j, k = key
    return [(1, (j, k)), (-1, (i, k)), (1, (i, j))]


def h1_torus(s, order: Optional[Sequence[int]] = None) -> AbelianGroupDescriptor:
    """
    First homology of the Cech complex of cell lattices via Smith normal form

    `order` optionally permutes the cells before the signs are fixed.
    """
    cx = _as_complex(s)
    if order is not None:
        cx = cx.reordered(order)
    nerve = build_nerve(cx)
    if not nerve.pairs:
        return AbelianGroupDescriptor(rank=0)
    d1 = _boundary(nerve.pairs, nerve.cells, _pair_faces)
    n1 = len(d1[0])
    rank_d1 = smith_normal_form(d1).rank
    if nerve.triples:
        d2 = _boundary(nerve.triples, nerve.pairs, _triple_faces)
        snf = smith_normal_form(d2)
        rank_d2, torsion = snf.rank, tuple(f for f in snf.factors if f > 1)
    else:
        rank_d2, torsion = 0, ()
    group = AbelianGroupDescriptor(rank=n1 - rank_d1 - rank_d2, torsion=torsion)
    logger.debug(f"H_1 of {len(cx.cells)}-cell complex: rank {group.rank}, torsion {group.torsion}")
    return group


# ---------------------------------------------------------------------------
# Reduction by hanging polytopes
# ---------------------------------------------------------------------------


def facet_graph(s) -> nx.Graph:
    """Cells as nodes, joined when they share a facet"""
    cx = _as_complex(s)
    graph = nx.Graph()
    graph.add_nodes_from(range(len(cx.cells)))
    for i, j in itertools.combinations(range(len(cx.cells)), 2):
        meet = set(cx.cells[i]) & set(cx.cells[j])
        if cx.affine_dimension(meet) == cx.dimension - 1:
            graph.add_edge(i, j)
    return graph


def _hanging(cx: PolytopeComplex) -> Optional[int]:
    graph = facet_graph(cx)
    for i in range(len(cx.cells)):
        if graph.degree(i) != 1:
            continue
        (j,) = graph.neighbors(i)
        shared = set(cx.cells[i]) & set(cx.cells[j])
        touches = set().union(*(set(cx.cells[i]) & set(cx.cells[k]) for k in graph if k != i))
        if touches <= shared:
            return i
    return None


def remove_hanging(s) -> PolytopeComplex:
    """Delete hanging polytopes one at a time until none is left"""
    cx = _as_complex(s)
    while len(cx.cells) > 1:
        index = _hanging(cx)
        if index is None:
            break
        cx = cx.without(index)
    return cx


def _is_codim2_cycle(cx: PolytopeComplex) -> bool:
    graph = facet_graph(cx)
    n = len(cx.cells)
    if n < 3 or not nx.is_connected(graph) or any(d != 2 for _, d in graph.degree()):
        return False
    common = set.intersection(*(set(c) for c in cx.cells))
    return cx.affine_dimension(common) == cx.dimension - 2


def reduce_and_verdict(s) -> str:
    """trivial-by-reduction when the residue is one cell or a cycle around a codimension-2 face"""
    residue = remove_hanging(s)
    if len(residue.cells) == 1 or _is_codim2_cycle(residue):
        return TRIVIAL_BY_REDUCTION
    logger.info(f"Reduction left {len(residue.cells)} cells without a recognized pattern")
    return INCONCLUSIVE
