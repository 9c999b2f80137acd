"""
Unit tests for cube_geometry module
"""
import pytest

from cube_geometry import (
    CUBE,
    INDEX,
    POINTS,
    SYM_Q,
    SYM_Q_TABLE,
    MarkedCell,
    all_cells,
    canonical_form,
    circuits,
    corner_cut_apex,
    face_lattice,
    facets,
    intersect_properly,
    key_index,
    normalized_volume,
    point_key,
)
from errors import DegenerateCell, InvalidInput

CORNER = MarkedCell.of((0, 1, 2, 4))
PYRAMID = MarkedCell.from_points([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1)])


class TestIndexing:
    """Tests for point indices and bitstring keys"""

    def test_index_matches_coordinates(self):
        """Test index = 4x + 2y + z"""
        assert POINTS[5] == (1, 0, 1)
        assert INDEX[(0, 1, 1)] == 3

    def test_key_round_trip(self):
        """Test bitstring keys agree with indices"""
        assert point_key(6) == "110"
        assert key_index("011") == 3

    @pytest.mark.parametrize("key", ["12", "0101", "abc", 3])
    def test_rejects_bad_keys(self, key):
        """Test malformed vertex keys"""
        with pytest.raises(InvalidInput):
            key_index(key)


class TestCells:
    """Tests for MarkedCell construction"""

    def test_rejects_planar_vertex_set(self):
        """Test four vertices of a square are degenerate"""
        with pytest.raises(DegenerateCell):
            MarkedCell.of((0, 1, 2, 3))

    def test_rejects_non_vertex(self):
        """Test points outside the cube lattice"""
        with pytest.raises(InvalidInput):
            MarkedCell.from_points([(0, 0, 0), (2, 0, 0), (0, 1, 0), (0, 0, 1)])

    def test_cell_count(self):
        """Test there are 151 full-dimensional vertex subsets"""
        assert len(all_cells()) == 151

    def test_json_is_sorted_points(self):
        """Test the JSON form lists points in lexicographic order"""
        assert CORNER.to_json() == [[0, 0, 0], [0, 0, 1], [0, 1, 0], [1, 0, 0]]


class TestVolumes:
    """Tests for normalized_volume"""

    def test_corner_cut(self):
        """Test the unit simplex has volume 1"""
        assert normalized_volume(CORNER) == 1

    def test_cube(self):
        """Test the full cube has volume 6"""
        assert normalized_volume(CUBE) == 6

    def test_square_pyramid(self):
        """Test a square pyramid has volume 2"""
        assert normalized_volume(PYRAMID) == 2

    def test_complement_of_corner(self):
        """Test the 7-vertex cell has volume 5"""
        assert normalized_volume(MarkedCell.of(range(1, 8))) == 5

    def test_invariant_under_symmetry(self):
        """Test volume is constant on Sym(Q) orbits"""
        for cell in all_cells()[::7]:
            assert {normalized_volume(g.apply(cell)) for g in SYM_Q} == {normalized_volume(cell)}

    def test_degenerate_cell(self):
        """Test volume of a flat vertex set raises"""
        with pytest.raises(DegenerateCell):
            normalized_volume(MarkedCell((0, 1, 2, 3)))


class TestFaceLattice:
    """Tests for facets and face_lattice"""

    def test_simplex(self):
        """Test corner cut has 4 facets, 6 edges and 4 vertices"""
        faces = face_lattice(CORNER)
        assert (len(faces[2]), len(faces[1]), len(faces[0])) == (4, 6, 4)

    def test_cube(self):
        """Test cube has 6 facets, 12 edges and 8 vertices"""
        faces = face_lattice(CUBE)
        assert (len(faces[2]), len(faces[1]), len(faces[0])) == (6, 12, 8)

    def test_prism(self):
        """Test a triangular prism has 5 facets"""
        prism = MarkedCell.of((0, 2, 3, 4, 6, 7))
        assert len(facets(prism)) == 5

    def test_boundary_facets_of_corner(self):
        """Test three facets of a corner cut lie on the cube boundary"""
        assert sum(f.on_boundary for f in facets(CORNER)) == 3

    def test_inward_normals(self):
        """Test every vertex satisfies each facet inequality"""
        for cell in (CORNER, PYRAMID, CUBE):
            for f in facets(cell):
                for p in cell.points:
                    assert sum(n * x for n, x in zip(f.normal, p)) >= f.offset


class TestSymmetry:
    """Tests for Sym(Q) and canonical forms"""

    def test_group_order(self):
        """Test the group has 48 distinct elements"""
        assert len(set(SYM_Q_TABLE)) == 48

    def test_every_corner_cut_canonicalizes_to_origin(self):
        """Test any corner cut maps to the one at the origin"""
        for g in SYM_Q:
            assert canonical_form(g.apply(CORNER)) == CORNER

    def test_cube_fixed(self):
        """Test the cube is its own canonical form"""
        assert canonical_form(CUBE) == CUBE

    def test_diagonal_prisms_equivalent(self):
        """Test both prisms cut from one square face share a canonical form"""
        first = MarkedCell.of((0, 2, 3, 4, 6, 7))
        second = MarkedCell.of((0, 1, 3, 4, 5, 7))
        assert canonical_form(first) == canonical_form(second)

    def test_canonical_form_idempotent(self):
        """Test canonical_form is idempotent"""
        for cell in all_cells():
            assert canonical_form(canonical_form(cell)) == canonical_form(cell)

    def test_inverse(self):
        """Test g^-1 undoes g on every index"""
        for g in SYM_Q:
            inverse = g.inverse()
            assert all(inverse.apply_index(g.apply_index(i)) == i for i in range(8))

    def test_corner_cut_apex(self):
        """Test the apex is found and non-corners report none"""
        assert corner_cut_apex(CORNER) == 0
        assert corner_cut_apex(MarkedCell.of((3, 5, 6, 7))) == 7
        assert corner_cut_apex(MarkedCell.of((0, 3, 5, 6))) is None


class TestCircuits:
    """Tests for circuits and proper intersection"""

    def test_circuit_count(self):
        """Test 20 circuits, each listed in both orientations"""
        found = circuits()
        assert len(found) == 40
        assert len({frozenset(z.positive + z.negative) for z in found}) == 20

    def test_crossing_diagonals(self):
        """Test tetrahedra meeting in crossing square diagonals intersect improperly"""
        a = MarkedCell.of((0, 3, 4, 5))
        b = MarkedCell.of((1, 2, 4, 7))
        assert not intersect_properly(a, b)

    def test_corner_and_complement(self):
        """Test a corner cut meets its complement properly"""
        assert intersect_properly(CORNER, MarkedCell.of(range(1, 8)))

    def test_prisms_sharing_a_square(self):
        """Test two prisms glued along the diagonal rectangle intersect properly"""
        a = MarkedCell.of((0, 2, 3, 4, 6, 7))
        b = MarkedCell.of((0, 1, 3, 4, 5, 7))
        assert intersect_properly(a, b)
        assert intersect_properly(b, a)

    def test_prisms_either_side_of_y_plus_z(self):
        """Test the prisms cut by y + z = 1 meet properly"""
        lower = MarkedCell.from_points(
            [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1), (1, 0, 1)]
        )
        upper = MarkedCell.from_points(
            [(0, 1, 0), (1, 1, 0), (0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)]
        )
        assert intersect_properly(lower, upper)

    def test_square_shared_but_cells_overlap(self):
        """Test sharing a square does not excuse a crossing elsewhere"""
        a = MarkedCell.of((0, 2, 3, 4, 6, 7))
        b = MarkedCell.of((0, 2, 3, 4, 5, 7))
        assert not intersect_properly(a, b)
