"""
Polyhedral subdivisions of the marked cube

Construction from heights, regularity, enumeration by two independent
searches, Sym(Q) orbits, refinement order and secondary-cone dimensions.
"""
import itertools
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from cube_geometry import (
    CUBE,
    SYM_Q,
    SymQElement,
    MarkedCell,
    affine_basis,
    all_cells,
    barycentric,
    circuits,
    facets,
    intersect_properly,
    key_index,
    normalized_volume,
    point_key,
)
from errors import DegenerateCell, InvalidInput, InvalidSubdivision, NotRegular
from exact_kernel import LinearSystem, Refutation, format_rational, lp_feasible, rank, to_rational
from logger_config import setup_logger, timed

logger = setup_logger("subdivisions")

CUBE_VOLUME = 6
# vertices 000, 100, 010, 001 pin down the affine part of a height function
GAUGE = (0, 4, 2, 1)
# generic interior point used to seed the facet-propagation search
GENERIC_POINT = (Fraction(1, 11), Fraction(1, 13), Fraction(1, 17))


@dataclass(frozen=True, order=True)
class Subdivision:
    """Sorted tuple of cells"""

    cells: Tuple[MarkedCell, ...]

    @classmethod
    def of(cls, cells: Iterable[MarkedCell]) -> "Subdivision":
        return cls(tuple(sorted(set(cells))))

    @classmethod
    def from_json(cls, doc) -> "Subdivision":
        if not isinstance(doc, dict) or not isinstance(doc.get("cells"), list):
            raise InvalidInput('Subdivision document needs a "cells" array')
        cells = []
        for cell in doc["cells"]:
            if not isinstance(cell, list):
                raise InvalidInput("Each cell must be an array of vertices")
            cells.append(MarkedCell.from_points(cell))
        return cls.of(cells)

    def to_json(self) -> dict:
        return {"cells": [cell.to_json() for cell in self.cells]}

    def apply(self, g: SymQElement) -> "Subdivision":
        return Subdivision.of(g.apply(cell) for cell in self.cells)

    @property
    def is_triangulation(self) -> bool:
        return all(len(cell) == 4 for cell in self.cells)

    @property
    def is_trivial(self) -> bool:
        return self.cells == (CUBE,)

    def volumes(self) -> Tuple[int, ...]:
        return tuple(sorted((normalized_volume(c) for c in self.cells), reverse=True))

    def __len__(self) -> int:
        return len(self.cells)


TRIVIAL = Subdivision((CUBE,))


@dataclass(frozen=True)
class HeightFunction:
    """Rational heights on the eight cube vertices, by index"""

    values: Tuple[Fraction, ...]

    @classmethod
    def of(cls, values: Sequence) -> "HeightFunction":
        if len(values) != 8:
            raise InvalidInput("A height function assigns all 8 vertices")
        return cls(tuple(to_rational(v) for v in values))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, object]) -> "HeightFunction":
        values = [None] * 8
        for key, value in mapping.items():
            values[key_index(key)] = to_rational(value)
        missing = [point_key(i) for i, v in enumerate(values) if v is None]
        if missing:
            raise InvalidInput(f"Heights missing for vertices: {', '.join(missing)}")
        return cls(tuple(values))

    def to_json(self) -> dict:
        return {"heights": {point_key(i): format_rational(v) for i, v in enumerate(self.values)}}

    def __getitem__(self, index: int) -> Fraction:
        return self.values[index]

    def replace(self, index: int, value: Fraction) -> "HeightFunction":
        values = list(self.values)
        values[index] = Fraction(value)
        return HeightFunction(tuple(values))

    def compose(self, g: SymQElement) -> "HeightFunction":
        """h o g^-1, so that from_heights(h.compose(g)) == from_heights(h).apply(g)"""
        inverse = g.inverse()
        return HeightFunction(tuple(self.values[inverse.apply_index(i)] for i in range(8)))


def integral_heights(h: HeightFunction) -> HeightFunction:
    """Scale by the common denominator"""
    scale = lcm(*(v.denominator for v in h.values))
    return HeightFunction(tuple(v * scale for v in h.values))


# ---------------------------------------------------------------------------
# Validation and lower hulls
# ---------------------------------------------------------------------------


def validate(s: Subdivision) -> Subdivision:
    """
    Check the subdivision invariants

    Raises:
        InvalidSubdivision: overlapping cells, improper intersections or a gap
    """
    if not s.cells:
        raise InvalidSubdivision("Subdivision has no cells")
    for a, b in itertools.combinations(s.cells, 2):
        if not intersect_properly(a, b):
            raise InvalidSubdivision(
                f"Cells {a.vertices} and {b.vertices} do not meet in a common face",
                payload={"cells": [a.to_json(), b.to_json()]},
            )
    total = sum(normalized_volume(c) for c in s.cells)
    if total != CUBE_VOLUME:
        raise InvalidSubdivision(f"Cell volumes add up to {total}, expected {CUBE_VOLUME}")
    return s


def is_valid(s: Subdivision) -> bool:
    try:
        validate(s)
    except InvalidSubdivision:
        return False
    return True


@lru_cache(maxsize=1)
def _independent_quadruples() -> Tuple[Tuple[int, int, int, int], ...]:
    out = []
    for subset in itertools.combinations(range(8), 4):
        try:
            barycentric(subset, subset[0])
        except DegenerateCell:
            continue
        out.append(subset)
    return tuple(out)


def _affine_values(basis, h: HeightFunction) -> List[Fraction]:
    values = {b: h[b] for b in basis}
    return [sum(c * values[b] for c, b in zip(barycentric(basis, p), basis)) for p in range(8)]


def from_heights(h: HeightFunction) -> Subdivision:
    """Project the lower facets of the lifted points (v, h(v))"""
    cells = set()
    for basis in _independent_quadruples():
        plane = _affine_values(basis, h)
        gaps = [h[p] - plane[p] for p in range(8)]
        if all(g >= 0 for g in gaps):
            cells.add(MarkedCell(tuple(p for p in range(8) if gaps[p] == 0)))
    return Subdivision.of(cells)


# ---------------------------------------------------------------------------
# Regularity
# ---------------------------------------------------------------------------


def _affinity_rows(s: Subdivision) -> List[Tuple[Fraction, ...]]:
    """Rows (row . h = 0) forcing h to be affine on each cell"""
    rows = []
    for cell in s.cells:
        basis = affine_basis(cell)
        for p in cell.vertices:
            if p in basis:
                continue
            row = [Fraction(0)] * 8
            row[p] += 1
            for c, b in zip(barycentric(basis, p), basis):
                row[b] -= c
            rows.append(tuple(row))
    return rows


def interior_walls(s: Subdivision) -> List[Tuple[MarkedCell, MarkedCell, int]]:
    """(cell, neighbour, vertex of neighbour off the cell) for every interior facet"""
    walls = []
    for cell in s.cells:
        for facet in facets(cell):
            if facet.on_boundary:
                continue
            neighbour = next(
                (
                    other
                    for other in s.cells
                    if other != cell and set(facet.vertices) <= set(other.vertices)
                ),
                None,
            )
            if neighbour is None:
                raise InvalidSubdivision(f"Interior facet {facet.vertices} has no neighbour")
            witness = next(v for v in neighbour.vertices if v not in cell.vertices)
            walls.append((cell, neighbour, witness))
    return walls


@dataclass(frozen=True)
class RegularityResult:
    regular: bool
    witness: Optional[HeightFunction] = None
    refutation: Optional[Refutation] = None

    def __iter__(self):
        yield self.regular
        yield self.witness


def is_regular(s: Subdivision) -> RegularityResult:
    """
    Decide regularity with an exact LP

    h is affine on every cell and, across every interior wall, lies strictly
    above the affine extension of the neighbouring piece.
    """
    validate(s)
    equalities = [(row, Fraction(0)) for row in _affinity_rows(s)]
    for g in GAUGE:
        row = [Fraction(0)] * 8
        row[g] = Fraction(1)
        equalities.append((tuple(row), Fraction(0)))

    strict = []
    for cell, _, witness in interior_walls(s):
        basis = affine_basis(cell)
        row = [Fraction(0)] * 8
        row[witness] += 1
        for c, b in zip(barycentric(basis, witness), basis):
            row[b] -= c
        strict.append((tuple(row), Fraction(0)))

    result = lp_feasible(LinearSystem.build(8, equalities=equalities, strict_inequalities=strict))
    if not result.feasible:
        logger.info(f"Subdivision with {len(s)} cells is not regular")
        return RegularityResult(regular=False, refutation=result.refutation)

    witness = HeightFunction(result.witness)
    if from_heights(witness) != s:
        raise ArithmeticError("Regularity witness does not reproduce the subdivision")
    return RegularityResult(regular=True, witness=witness)


def stratum_dimension(s: Subdivision, check_regular: bool = True) -> int:
    """
    Dimension of the secondary-polytope face of s: 8 minus the dimension of
    the space of heights that are affine on every cell
    """
    if check_regular and not is_regular(s).regular:
        raise NotRegular("Stratum dimension is only defined for regular subdivisions")
    rows = _affinity_rows(s)
    return rank(rows) if rows else 0


# ---------------------------------------------------------------------------
# Enumeration, strategy (i): facet propagation
# ---------------------------------------------------------------------------


def _contains_point(cell: MarkedCell, point) -> bool:
    return all(
        sum(n * x for n, x in zip(f.normal, point)) > f.offset for f in facets(cell)
    )


def _first_open_facet(chosen: List[MarkedCell]):
    for cell in chosen:
        for facet in facets(cell):
            if facet.on_boundary:
                continue
            span = set(facet.vertices)
            if not any(other is not cell and span <= set(other.vertices) for other in chosen):
                return facet
    return None


def _across(facet) -> List[MarkedCell]:
    opposite = tuple(-x for x in facet.normal)
    out = []
    for cell in all_cells():
        if not set(facet.vertices) <= set(cell.vertices):
            continue
        if any(f.vertices == facet.vertices and f.normal == opposite for f in facets(cell)):
            out.append(cell)
    return out


def _propagate(chosen: List[MarkedCell], volume: int) -> Iterator[Subdivision]:
    facet = _first_open_facet(chosen)
    if facet is None:
        if volume == CUBE_VOLUME:
            yield Subdivision.of(chosen)
        return
    for cell in _across(facet):
        v = normalized_volume(cell)
        if volume + v > CUBE_VOLUME:
            continue
        if all(intersect_properly(cell, other) for other in chosen):
            yield from _propagate(chosen + [cell], volume + v)


def enumerate_by_propagation() -> List[Subdivision]:
    """
    Start from each cell containing a generic interior point and glue cells
    across open interior facets until the cube is covered
    """
    found = set()
    for start in all_cells():
        if _contains_point(start, GENERIC_POINT):
            found.update(_propagate([start], normalized_volume(start)))
    logger.info(f"Facet propagation found {len(found)} subdivisions")
    return sorted(found)


# ---------------------------------------------------------------------------
# Enumeration, strategy (ii): flips and coarsenings
# ---------------------------------------------------------------------------


def staircase() -> Subdivision:
    """The six simplices around the main diagonal"""
    cells = []
    for a, b, _ in itertools.permutations((4, 2, 1)):
        cells.append(MarkedCell((0, a, a | b, 7)))
    return Subdivision.of(cells)


def _link(t: Subdivision, face: frozenset) -> frozenset:
    return frozenset(
        frozenset(set(cell.vertices) - face) for cell in t.cells if face <= set(cell.vertices)
    )


def flip_neighbours(t: Subdivision) -> List[Subdivision]:
    """Triangulations one bistellar flip away from t"""
    out = set()
    for z in circuits():
        support = set(z.positive) | set(z.negative)
        removed = [frozenset(support - {p}) for p in z.positive]
        links = {_link(t, face) for face in removed}
        if len(links) != 1:
            continue
        link = next(iter(links))
        if not link:
            continue
        added = [frozenset(support - {p}) for p in z.negative]
        old = {face | rho for face in removed for rho in link}
        try:
            new_cells = [c for c in t.cells if frozenset(c.vertices) not in old]
            new_cells += [MarkedCell.of(face | rho) for face in added for rho in link]
        except DegenerateCell:
            continue
        candidate = Subdivision.of(new_cells)
        if candidate.is_triangulation and is_valid(candidate):
            out.add(candidate)
    return sorted(out)


def triangulations() -> List[Subdivision]:
    """Breadth-first search of the flip graph from the staircase triangulation"""
    seed = staircase()
    seen = {seed}
    queue = deque([seed])
    while queue:
        t = queue.popleft()
        for n in flip_neighbours(t):
            if n not in seen:
                seen.add(n)
                queue.append(n)
    logger.info(f"Flip search found {len(seen)} triangulations")
    return sorted(seen)


def _set_partitions(items: List) -> Iterator[List[List]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in _set_partitions(rest):
        yield [[first]] + partition
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1 :]


def _merged(block: List[MarkedCell]) -> Optional[MarkedCell]:
    union = MarkedCell(tuple(sorted(set().union(*(c.vertices for c in block)))))
    if normalized_volume(union) != sum(normalized_volume(c) for c in block):
        return None
    return union


def coarsenings(t: Subdivision) -> List[Subdivision]:
    """Every subdivision obtained by merging blocks of cells with convex unions"""
    out = set()
    for partition in _set_partitions(list(t.cells)):
        cells = []
        for block in partition:
            merged = _merged(block) if len(block) > 1 else block[0]
            if merged is None:
                break
            cells.append(merged)
        else:
            candidate = Subdivision.of(cells)
            if is_valid(candidate):
                out.add(candidate)
    return sorted(out)


def enumerate_by_flips() -> List[Subdivision]:
    found = set()
    for t in triangulations():
        found.update(coarsenings(t))
    logger.info(f"Flips and coarsenings found {len(found)} subdivisions")
    return sorted(found)


@lru_cache(maxsize=1)
def _enumerate_all() -> Tuple[Subdivision, ...]:
    with timed(logger, "enumeration") as info:
        first = enumerate_by_propagation()
        second = enumerate_by_flips()
        info["count"] = len(first)
    if first != second:
        raise ArithmeticError(
            f"Enumeration strategies disagree: {len(first)} vs {len(second)} subdivisions"
        )
    return tuple(first)


def enumerate_all() -> List[Subdivision]:
    """Every subdivision exactly once, in canonical order; both searches must agree"""
    return list(_enumerate_all())


# ---------------------------------------------------------------------------
# Symmetry and order
# ---------------------------------------------------------------------------


def canonical_subdivision(s: Subdivision) -> Subdivision:
    return min(s.apply(g) for g in SYM_Q)


@dataclass(frozen=True)
class OrbitRecord:
    representative: Subdivision
    size: int
    members: Tuple[Subdivision, ...]


def orbits(subdivisions: Iterable[Subdivision]) -> List[OrbitRecord]:
    """Group by Sym(Q) orbit; representatives are canonical forms"""
    groups: Dict[Subdivision, set] = {}
    for s in subdivisions:
        groups.setdefault(canonical_subdivision(s), set()).add(s)
    records = []
    for rep, members in sorted(groups.items()):
        size = len({rep.apply(g) for g in SYM_Q})
        records.append(OrbitRecord(representative=rep, size=size, members=tuple(sorted(members))))
    return records


def refines(s: Subdivision, t: Subdivision) -> bool:
    """Every cell of s lies in a cell of t"""
    return all(
        any(set(c.vertices) <= set(d.vertices) for d in t.cells) for c in s.cells
    )


@dataclass
class SubdivisionPoset:
    """Refinement order; edges point from finer to coarser"""

    order: nx.DiGraph
    hasse: nx.DiGraph

    def minimal(self) -> List[Subdivision]:
        return sorted(n for n in self.order if self.order.in_degree(n) == 0)

    def maximal(self) -> List[Subdivision]:
        return sorted(n for n in self.order if self.order.out_degree(n) == 0)

    def covers(self, s: Subdivision) -> List[Subdivision]:
        """Subdivisions that s covers, i.e. one refinement step below s"""
        return sorted(self.hasse.predecessors(s))

    def covered_by(self, s: Subdivision) -> List[Subdivision]:
        return sorted(self.hasse.successors(s))


def refinement_poset(subdivisions: Iterable[Subdivision]) -> SubdivisionPoset:
    nodes = sorted(set(subdivisions))
    order = nx.DiGraph()
    order.add_nodes_from(nodes)
    for s, t in itertools.permutations(nodes, 2):
        if refines(s, t):
            order.add_edge(s, t)
    hasse = nx.transitive_reduction(order)
    hasse.add_nodes_from(nodes)
    return SubdivisionPoset(order=order, hasse=hasse)


def dimension_census(subdivisions: Iterable[Subdivision]) -> Dict[int, int]:
    """Number of subdivisions per secondary-polytope face dimension"""
    counts = Counter(stratum_dimension(s, check_regular=False) for s in subdivisions)
    return dict(sorted(counts.items()))


def volume_groups(subdivisions: Iterable[Subdivision]) -> Dict[Tuple[int, ...], int]:
    """Subdivision counts keyed by the multiset of cell volumes"""
    return dict(sorted(Counter(s.volumes() for s in subdivisions).items(), reverse=True))
