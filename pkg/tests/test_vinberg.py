"""
Unit tests for vinberg module
"""
import pytest

from errors import InvalidInput, NotSymmetric, UnboundedSlice, WindowTooSmall
from vinberg import (
    LATTICES,
    GramLattice,
    classify_subdiagrams,
    coxeter_diagram,
    diagram_automorphisms,
    diagram_from_gram,
    finite_volume_check,
    named_lattice,
    norm_vector_search,
    odd1_classification,
    odd1_diagram,
    odd1_gram,
    odd1_root,
    roots_at_height,
    subdiagrams,
    vinberg_run,
)


@pytest.fixture(scope="module")
def even_run():
    lattice, v0 = named_lattice("even")
    return vinberg_run(lattice, v0, max_height=6, stop_when_finite=True)


@pytest.fixture(scope="module")
def even_diagram(even_run):
    return coxeter_diagram(even_run.accepted, LATTICES["even"])


class TestGramLattice:
    """Tests for lattice construction"""

    def test_named_lattices(self):
        """Test the three cusp lattices have signature (1, 3)"""
        for name in ("even", "odd1", "odd2"):
            lattice, v0 = named_lattice(name)
            assert lattice.rank == 4
            assert lattice.norm(v0) >= 0

    def test_parity(self):
        """Test only the odd type-2 lattice is even"""
        assert LATTICES["odd2"].is_even
        assert not LATTICES["even"].is_even
        assert not LATTICES["odd1"].is_even

    def test_unknown_name(self):
        """Test unknown lattice names are refused"""
        with pytest.raises(InvalidInput):
            named_lattice("e8")

    def test_asymmetric(self):
        """Test asymmetric Gram matrices are refused"""
        with pytest.raises(NotSymmetric):
            GramLattice.of([[1, 1], [0, -1]])

    def test_wrong_signature(self):
        """Test signature other than (1, n) is refused"""
        with pytest.raises(InvalidInput):
            GramLattice.of([[1, 0], [0, 1]])

    def test_degenerate(self):
        """Test singular Gram matrices are refused"""
        with pytest.raises(InvalidInput):
            GramLattice.of([[1, 0], [0, 0]])


class TestRootsAtHeight:
    """Tests for roots_at_height"""

    def test_even_height_zero(self):
        """Test the six unit roots orthogonal to (1,0,0,0)"""
        lattice, v0 = named_lattice("even")
        assert roots_at_height(lattice, v0, 0) == [
            (0, -1, 0, 0),
            (0, 0, -1, 0),
            (0, 0, 0, -1),
            (0, 0, 0, 1),
            (0, 0, 1, 0),
            (0, 1, 0, 0),
        ]

    def test_even_roots_have_norm_minus_one(self):
        """Test every root found has norm -1 and the requested height"""
        lattice, v0 = named_lattice("even")
        for n in range(4):
            for r in roots_at_height(lattice, v0, n):
                assert lattice.norm(r) == -1
                assert lattice.inner(r, v0) == n

    def test_odd1_height_one(self):
        """Test height-1 roots are exactly the alpha_(a,b) in the window"""
        lattice, v0 = named_lattice("odd1")
        window = 3
        expected = sorted(
            odd1_root(a, b) for a in range(-window, window + 1) for b in range(-window, window + 1)
        )
        assert roots_at_height(lattice, v0, 1, window=window) == expected

    def test_odd1_height_zero_empty(self):
        """Test no root is orthogonal to the isotropic vector"""
        lattice, v0 = named_lattice("odd1")
        assert roots_at_height(lattice, v0, 0, window=3) == []

    def test_isotropic_needs_window(self):
        """Test an isotropic initial vector without a window is refused"""
        lattice, v0 = named_lattice("odd1")
        with pytest.raises(UnboundedSlice):
            roots_at_height(lattice, v0, 1)

    def test_infinite_family_at_height_zero(self):
        """Test roots orthogonal to an isotropic vector are reported as unbounded"""
        with pytest.raises(UnboundedSlice):
            roots_at_height(LATTICES["even"], (1, 1, 0, 0), 0, window=2)

    def test_zero_vector(self):
        """Test the zero initial vector is refused"""
        with pytest.raises(InvalidInput):
            roots_at_height(LATTICES["even"], (0, 0, 0, 0), 1)

    def test_even_lattice_has_no_roots(self):
        """Test norm -1 vectors cannot exist in an even lattice"""
        lattice, v0 = named_lattice("odd2")
        assert roots_at_height(lattice, v0, 1, window=3) == []


class TestEvenCusp:
    """Tests for the run at the even cusp"""

    def test_roots_by_height(self, even_run):
        """Test three roots at height 0 and three at height 1"""
        heights = sorted(even_run.heights.values())
        assert heights == [0, 0, 0, 1, 1, 1]

    def test_height_one_roots(self, even_run):
        """Test the accepted height-1 roots"""
        accepted = sorted(r for r in even_run.accepted if even_run.heights[r] == 1)
        assert accepted == [(1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 0)]

    def test_products_nonnegative(self, even_run):
        """Test accepted roots meet pairwise with nonnegative products"""
        lattice = LATTICES["even"]
        for r in even_run.accepted:
            for s in even_run.accepted:
                if r != s:
                    assert lattice.inner(r, s) >= 0

    def test_hexagon(self, even_diagram):
        """Test the diagram is a hexagon of inf edges"""
        graph = even_diagram.graph
        assert graph.number_of_nodes() == 6
        assert graph.number_of_edges() == 6
        assert all(d == 2 for _, d in graph.degree())
        assert {even_diagram.edge_kind(i, j) for i, j in graph.edges} == {"inf"}

    def test_finite_volume(self, even_run, even_diagram):
        """Test the run terminates with a finite-volume polytope"""
        assert even_run.terminated
        assert finite_volume_check(even_diagram, 4)

    def test_classes(self, even_diagram):
        """Test four elliptic and one parabolic class"""
        elliptic, parabolic = classify_subdiagrams(even_diagram, 4)
        assert len(elliptic) == 4
        assert len(parabolic) == 1
        assert sorted(c.rank for c in elliptic) == [1, 2, 2, 3]
        assert parabolic[0].name == "Ã1+Ã1"

    def test_automorphisms(self, even_diagram):
        """Test the hexagon has the twelve dihedral symmetries"""
        assert len(diagram_automorphisms(even_diagram)) == 12

    def test_stable_beyond_termination(self, even_run):
        """Test higher heights add nothing"""
        lattice, v0 = named_lattice("even")
        later = vinberg_run(lattice, v0, max_height=even_run.last_height + 4)
        assert later.accepted == even_run.accepted
        assert later.rejections

    def test_json(self, even_run):
        """Test the report lists roots with heights"""
        doc = even_run.to_json()
        assert doc["lattice"] == "even"
        assert len(doc["accepted"]) == 6
        assert doc["terminated"]

    def test_dot(self, even_diagram):
        """Test DOT output labels inf edges"""
        dot = even_diagram.to_dot()
        assert dot.startswith("graph coxeter {")
        assert dot.count('label="inf"') == 6


class TestOddType1Cusp:
    """Tests for the odd type-1 cusp"""

    def test_gram_closed_form(self):
        """Test products of alpha roots follow -1 + |p - q|^2"""
        lattice = LATTICES["odd1"]
        points = [(a, b) for a in range(-2, 3) for b in range(-2, 3)]
        for p in points:
            for q in points:
                assert lattice.inner(odd1_root(*p), odd1_root(*q)) == odd1_gram(p, q)

    def test_edge_kinds(self):
        """Test unit, diagonal and distance-2 neighbours"""
        diagram = odd1_diagram(2)
        index = {label: i for i, label in enumerate(diagram.labels)}
        origin = index[(0, 0)]
        assert diagram.edge_kind(origin, index[(1, 0)]) is None
        assert diagram.edge_kind(origin, index[(1, 1)]) == "inf"
        assert diagram.edge_kind(origin, index[(2, 0)]) == "dotted"
        assert diagram.product(origin, index[(2, 0)]) == 3

    def test_no_acceptance_after_height_one(self):
        """Test heights 2 through 10 accept nothing"""
        lattice, v0 = named_lattice("odd1")
        result = vinberg_run(lattice, v0, max_height=10, window=3)
        assert {result.heights[r] for r in result.accepted} == {1}
        assert len(result.accepted) == 49

    def test_three_classes(self):
        """Test point, adjacent pair and unit-square diagonals"""
        elliptic, parabolic = odd1_classification(4)
        assert [(c.kind, c.rank) for c in elliptic] == [("elliptic", 1), ("elliptic", 2)]
        assert [(c.kind, c.rank) for c in parabolic] == [("parabolic", 2)]

    def test_classes_stable_across_windows(self):
        """Test enlarging the window adds no class"""
        small = odd1_classification(3)
        large = odd1_classification(5)
        assert [c.name for c in small[0] + small[1]] == [c.name for c in large[0] + large[1]]

    def test_window_too_small(self):
        """Test a window that cannot hold a unit square is refused"""
        with pytest.raises(WindowTooSmall):
            classify_subdiagrams(odd1_diagram(1), 4, planar_window=1)


class TestOddType2Cusp:
    """Tests for the odd type-2 cusp"""

    def test_no_norm_minus_one_vectors(self):
        """Test the brute-force search finds nothing"""
        assert norm_vector_search(LATTICES["odd2"], 6) == []

    def test_norm_search_finds_even_norms(self):
        """Test the search does find norm -2 vectors"""
        found = norm_vector_search(LATTICES["odd2"], 2, norm=-2)
        assert (0, 0, 1, 0) in found
        assert all(LATTICES["odd2"].norm(v) == -2 for v in found)

    def test_run_is_empty(self):
        """Test Vinberg's algorithm accepts nothing"""
        lattice, v0 = named_lattice("odd2")
        result = vinberg_run(lattice, v0, max_height=3, window=2)
        assert result.accepted == []
        assert result.terminated


class TestSubdiagrams:
    """Tests for subdiagram enumeration on abstract diagrams"""

    def test_single_edge_is_parabolic(self):
        """Test two roots with product 1 form an affine A1"""
        diagram = diagram_from_gram([(0,), (1,)], [[-1, 1], [1, -1]])
        elliptic, parabolic = subdiagrams(diagram, 3)
        assert [s.vertices for s in elliptic] == [(0,), (1,)]
        assert [s.vertices for s in parabolic] == [(0, 1)]

    def test_dotted_pairs_excluded(self):
        """Test roots with product >= 2 never share a subdiagram"""
        diagram = diagram_from_gram([(0,), (1,)], [[-1, 2], [2, -1]])
        elliptic, parabolic = subdiagrams(diagram, 3)
        assert len(elliptic) == 2
        assert parabolic == []

    def test_empty_diagram_is_finite(self):
        """Test the empty diagram passes vacuously"""
        assert finite_volume_check(diagram_from_gram([], []), 4)
