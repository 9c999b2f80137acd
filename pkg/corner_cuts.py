"""
Corner cuts and the bullet map

A corner cut is a unit simplex spanned by a cube vertex (its apex) and the
three neighbours of that vertex. The bullet map merges every corner cut into
the cell across its apex-free facet, by lowering the apex height onto that
cell's affine piece.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Tuple

from cube_geometry import POINTS, MarkedCell, affine_basis, affine_extension, corner_cut_apex
from errors import InvalidSubdivision, NotRegular
from logger_config import setup_logger
from subdivisions import HeightFunction, Subdivision, from_heights, is_regular

logger = setup_logger("corner_cuts")


@dataclass(frozen=True)
class CornerCut:
    cell: MarkedCell
    apex: int
    neighbour: MarkedCell

    def to_json(self) -> dict:
        return {
            "cell": self.cell.to_json(),
            "apex": list(POINTS[self.apex]),
            "neighbour": self.neighbour.to_json(),
        }


@dataclass(frozen=True)
class CornerCutReport:
    cuts: Tuple[CornerCut, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.cuts)

    def __len__(self) -> int:
        return len(self.cuts)

    def apices(self) -> Tuple[int, ...]:
        return tuple(cut.apex for cut in self.cuts)


def detect(s: Subdivision) -> CornerCutReport:
    """
    All corner cuts of s with their unique neighbours, in cell order

    Raises:
        InvalidSubdivision: a corner cut has no cell across its base
    """
    cuts = []
    for cell in s.cells:
        apex = corner_cut_apex(cell)
        if apex is None:
            continue
        base = set(cell.vertices) - {apex}
        neighbour = next(
            (other for other in s.cells if other != cell and base <= set(other.vertices)), None
        )
        if neighbour is None:
            raise InvalidSubdivision(
                f"Corner cut at {POINTS[apex]} has no neighbouring cell",
                payload={"cell": cell.to_json()},
            )
        cuts.append(CornerCut(cell=cell, apex=apex, neighbour=neighbour))
    return CornerCutReport(cuts=tuple(cuts))


def delta_cartier(s: Subdivision) -> bool:
    """The toric boundary is Q-Cartier iff there is no corner cut"""
    return not detect(s)


Picker = Callable[[Sequence[CornerCut]], CornerCut]


def _drop(h: HeightFunction, cut: CornerCut) -> Fraction:
    """h(m) - L_R(m) for the apex m and the affine piece L_R of the neighbour"""
    plane = affine_extension(affine_basis(cut.neighbour), dict(enumerate(h.values)), cut.apex)
    return h[cut.apex] - plane


def _lower_apices(
    h: HeightFunction, pick: Optional[Picker] = None
) -> Tuple[HeightFunction, Dict[int, Fraction]]:
    drops: Dict[int, Fraction] = {}
    while True:
        report = detect(from_heights(h))
        if not report:
            return h, drops
        cut = pick(report.cuts) if pick else report.cuts[0]
        q = _drop(h, cut)
        if q <= 0:
            raise ArithmeticError(f"Apex drop {q} at vertex {cut.apex} is not positive")
        logger.debug(f"Lowering apex {cut.apex} by {q}")
        drops[cut.apex] = drops.get(cut.apex, Fraction(0)) + q
        h = h.replace(cut.apex, h[cut.apex] - q)


def modify_heights(h: HeightFunction, pick: Optional[Picker] = None) -> HeightFunction:
    """h -> h-bullet: every corner-cut apex is lowered by its drop q_m"""
    return _lower_apices(h, pick)[0]


def apex_drops(h: HeightFunction, pick: Optional[Picker] = None) -> Dict[int, Fraction]:
    """The drops q_m keyed by apex index"""
    return _lower_apices(h, pick)[1]


def modify(s: Subdivision, pick: Optional[Picker] = None) -> Subdivision:
    """
    The bullet map on subdivisions

    Realized through a regularity witness: lowering the apex heights merges
    each corner cut with its neighbour and leaves the other cells alone.

    Raises:
        NotRegular: s has no height function
    """
    if not detect(s):
        return s
    result = is_regular(s)
    if not result.regular:
        raise NotRegular("The bullet map needs a regular subdivision")
    modified = from_heights(modify_heights(result.witness, pick))
    logger.debug(f"Bullet map: {len(s)} cells -> {len(modified)} cells")
    return modified
