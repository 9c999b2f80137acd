"""
Boundary stratification assembled from subdivision orbits

Subdivision strata are the Sym(Q)-orbits of corner-cut-free nontrivial
subdivisions. Below the two-prism stratum and on the trivial subdivision sit
strata cut out by coefficient degenerations; those are listed explicitly
with a witness coefficient assignment that is classified when the atlas is
built.
"""
import json
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from cell_classifier import (
    CoefficientAssignment,
    DegenerationReport,
    cell_type,
    classify_degeneration,
    generic_coefficients,
)
from corner_cuts import detect
from cube_geometry import MarkedCell, point_key
from errors import EvenZeroStratumNotFound
from logger_config import setup_logger, timed
from subdivisions import (
    TRIVIAL,
    Subdivision,
    canonical_subdivision,
    enumerate_all,
    orbits,
    refines,
    stratum_dimension,
)
from vinberg import SubdiagramClass

logger = setup_logger("strata_atlas")

# prisms on either side of the plane y = z
TWO_PRISMS = Subdivision.of([MarkedCell.of((0, 2, 3, 4, 6, 7)), MarkedCell.of((0, 1, 3, 4, 5, 7))])

CUBE_KEYS = tuple(point_key(i) for i in range(8))
RECTANGLE = {"000": 1, "011": 1, "100": 1, "111": 1}

# name -> (subdivision, dimension, coefficients, the stratum it lies directly under)
COEFFICIENT_STRATA = {
    "c2+c2": (TWO_PRISMS, 2, {**RECTANGLE, "010": 2, "110": 3, "001": 5, "101": 7}, None),
    "c2+c3": (TWO_PRISMS, 1, {**RECTANGLE, "010": 2, "110": 3, "001": 5, "101": 5}, "c2+c2"),
    "c3+c3": (TWO_PRISMS, 0, {**RECTANGLE, "010": 2, "110": 2, "001": 5, "101": 5}, "c2+c3"),
    "d2": (TRIVIAL, 1, {**{k: 1 for k in CUBE_KEYS}, "110": 2, "111": 2}, None),
    "d3": (TRIVIAL, 0, {k: 1 for k in CUBE_KEYS}, "d2"),
}


@dataclass
class StratumRecord:
    name: str
    representative: Subdivision
    dimension: int
    degeneration: DegenerationReport
    coefficients: Optional[CoefficientAssignment] = None
    covers: List[str] = field(default_factory=list)
    members: Tuple[Subdivision, ...] = ()

    @property
    def cusp(self) -> str:
        return self.degeneration.cusp

    @property
    def from_coefficients(self) -> bool:
        return self.coefficients is not None

    def to_json(self) -> dict:
        doc = {
            "name": self.name,
            "dimension": self.dimension,
            "subdivision": self.representative.to_json(),
            "case": self.degeneration.case,
            "cusp": self.cusp,
            "components": self.degeneration.components,
            "covers": list(self.covers),
            "orbit_size": len(self.members) or 1,
        }
        if self.coefficients is not None:
            doc.update(self.coefficients.to_json())
        return doc


@dataclass
class BoundaryAtlas:
    strata: Dict[str, StratumRecord]
    poset: nx.DiGraph

    def __iter__(self):
        return iter(sorted(self.strata.values(), key=lambda r: (-r.dimension, r.name)))

    def __len__(self) -> int:
        return len(self.strata)

    def below(self, name: str) -> List[str]:
        """Strata in the closure of `name`, itself excluded"""
        return sorted(nx.ancestors(self.poset, name))

    def above(self, name: str) -> List[str]:
        """Strata whose closure contains `name`, itself excluded"""
        return sorted(nx.descendants(self.poset, name))

    def maximal(self) -> List[StratumRecord]:
        return [r for r in self if self.poset.out_degree(r.name) == 0]

    def census(self) -> Dict[int, int]:
        return dict(sorted(Counter(r.dimension for r in self.strata.values()).items()))

    def to_json(self) -> dict:
        return {"strata": [r.to_json() for r in self], "census": self.census()}

    def to_dot(self) -> str:
        lines = ["digraph atlas {", "  rankdir=BT;"]
        for record in self:
            lines.append(
                f'  "{record.name}" [label="{record.name}\\ndim {record.dimension}\\n{record.cusp}"];'
            )
        for lower, upper in sorted(self.poset.edges()):
            lines.append(f'  "{lower}" -> "{upper}";')
        lines.append("}")
        return "\n".join(lines)


def _type_name(s: Subdivision) -> str:
    counts = Counter(cell_type(cell) for cell in s.cells)
    return "+".join(f"{kind}{counts[kind]}" if counts[kind] > 1 else kind for kind in sorted(counts))


def boundary_subdivisions(subdivisions: Optional[Sequence[Subdivision]] = None) -> List[Subdivision]:
    """Corner-cut-free subdivisions other than the cube itself"""
    subdivisions = enumerate_all() if subdivisions is None else subdivisions
    return [s for s in subdivisions if not s.is_trivial and not detect(s)]


def build_atlas(subdivisions: Optional[Sequence[Subdivision]] = None) -> BoundaryAtlas:
    strata: Dict[str, StratumRecord] = {}
    for orbit in orbits(boundary_subdivisions(subdivisions)):
        rep = orbit.representative
        name = _type_name(rep)
        suffix = 2
        while name in strata:
            name = f"{_type_name(rep)}#{suffix}"
            suffix += 1
        report = classify_degeneration(rep, generic_coefficients(rep))
        strata[name] = StratumRecord(
            name=name,
            representative=rep,
            dimension=stratum_dimension(rep),
            degeneration=report,
            members=orbit.members,
        )

    poset = nx.DiGraph()
    poset.add_nodes_from(strata)
    for lower in list(strata.values()):
        for upper in list(strata.values()):
            if lower is upper:
                continue
            if any(refines(m, upper.representative) for m in lower.members):
                poset.add_edge(lower.name, upper.name)

    prism_name = next(
        (r.name for r in strata.values() if r.representative == canonical_subdivision(TWO_PRISMS)),
        None,
    )
    for name, (s, dimension, coefficients, parent) in COEFFICIENT_STRATA.items():
        c = CoefficientAssignment.from_mapping(coefficients)
        strata[name] = StratumRecord(
            name=name,
            representative=s,
            dimension=dimension,
            degeneration=classify_degeneration(s, c),
            coefficients=c,
        )
        poset.add_node(name)
        if parent is not None:
            poset.add_edge(name, parent)
        elif s == TWO_PRISMS and prism_name is not None:
            poset.add_edge(name, prism_name)
    # close the order over the added chains
    poset = nx.transitive_closure_dag(poset)

    hasse = nx.transitive_reduction(poset)
    for name, record in strata.items():
        record.covers = sorted(hasse.predecessors(name))
    atlas = BoundaryAtlas(strata=strata, poset=poset)
    logger.info(f"Boundary atlas: {len(atlas)} strata, census {atlas.census()}")
    return atlas


@lru_cache(maxsize=1)
def boundary_atlas() -> BoundaryAtlas:
    with timed(logger, "boundary atlas") as info:
        atlas = build_atlas()
        info["strata"] = len(atlas)
    return atlas


def maximal_components(atlas: Optional[BoundaryAtlas] = None) -> List[int]:
    """Dimensions of the maximal boundary strata, largest first"""
    atlas = boundary_atlas() if atlas is None else atlas
    return sorted((r.dimension for r in atlas.maximal()), reverse=True)


# ---------------------------------------------------------------------------
# Cross-checks against subdiagram classes
# ---------------------------------------------------------------------------


def effective_rank(cls: SubdiagramClass) -> int:
    """Rank for elliptic classes, rank + 1 for parabolic ones"""
    return cls.rank if cls.kind == "elliptic" else cls.rank + 1


# the 0-stratum of a cusp pairs with the empty subdiagram
EMPTY_CLASS = SubdiagramClass(kind="elliptic", rank=0, name="empty", representative=(), count=1)


@dataclass
class CrosscheckReport:
    cusp: str
    strata: List[Tuple[str, int]]
    classes: List[SubdiagramClass]
    pairing: List[Tuple[str, str]]

    @property
    def matched(self) -> bool:
        return bool(self.pairing) and len(self.pairing) == len(self.strata)

    def to_json(self) -> dict:
        return {
            "cusp": self.cusp,
            "strata": [{"name": n, "dimension": d} for n, d in self.strata],
            "classes": [c.to_json() for c in self.classes],
            "counts": [len(self.strata), len(self.classes) + 1],
            "matched": self.matched,
            "pairing": [{"class": c, "stratum": s} for c, s in self.pairing],
        }


def match_classes(
    cusp: str, strata: Sequence[Tuple[str, int]], classes: Sequence[SubdiagramClass]
) -> CrosscheckReport:
    """
    Pair strata with subdiagram classes so that stratum dimension equals
    effective rank; the empty subdiagram is added on the class side
    """
    strata = sorted(strata, key=lambda s: (s[1], s[0]))
    candidates = [EMPTY_CLASS] + list(classes)
    dims = [d for _, d in strata]
    if sorted(effective_rank(c) for c in candidates) != dims:
        logger.warning(
            f"{cusp}: {len(candidates)} classes do not match {len(strata)} strata",
            extra={"dimensions": dims},
        )
        return CrosscheckReport(cusp, list(strata), list(classes), [])
    ordered = sorted(candidates, key=lambda c: (effective_rank(c), c.kind, c.name, c.representative))
    pairing = [
        (f"{cls.kind} {cls.name} {list(cls.representative)}", name)
        for cls, (name, _) in zip(ordered, strata)
    ]
    logger.info(f"{cusp}: {len(candidates)} classes match {len(strata)} strata")
    return CrosscheckReport(cusp, list(strata), list(classes), pairing)


def _zero_stratum(atlas: BoundaryAtlas, cusp: str, from_coefficients: bool) -> Optional[StratumRecord]:
    for record in atlas:
        if (
            record.dimension == 0
            and record.from_coefficients == from_coefficients
            and record.cusp == cusp
        ):
            return record
    return None


def even_zero_stratum(atlas: BoundaryAtlas) -> StratumRecord:
    zero = _zero_stratum(atlas, "even", from_coefficients=False)
    if zero is None:
        raise EvenZeroStratumNotFound("No zero-dimensional stratum maps to the even cusp")
    return zero


def cusp_strata(atlas: BoundaryAtlas, zero: StratumRecord) -> List[Tuple[str, int]]:
    """The 0-stratum and every stratum whose closure contains it"""
    names = [zero.name] + atlas.above(zero.name)
    return [(name, atlas.strata[name].dimension) for name in names]


def crosscheck_even(
    atlas: BoundaryAtlas, elliptic: Sequence[SubdiagramClass], parabolic: Sequence[SubdiagramClass]
) -> CrosscheckReport:
    """Strata containing the even 0-stratum against elliptic and maximal parabolic classes"""
    strata = cusp_strata(atlas, even_zero_stratum(atlas))
    return match_classes("even", strata, list(elliptic) + list(parabolic))


def crosscheck_odd1(
    atlas: BoundaryAtlas, elliptic: Sequence[SubdiagramClass], parabolic: Sequence[SubdiagramClass]
) -> CrosscheckReport:
    """Strata containing the c3+c3 gluing against the odd type-1 classes"""
    zero = _zero_stratum(atlas, "odd1", from_coefficients=True)
    strata = [] if zero is None else cusp_strata(atlas, zero)
    return match_classes("odd1", strata, list(elliptic) + list(parabolic))


def dump_atlas(atlas: BoundaryAtlas) -> str:
    return json.dumps(atlas.to_json(), indent=2, sort_keys=True)
