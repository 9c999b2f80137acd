"""
Unit tests for cell_classifier module
"""
import random
from fractions import Fraction

import pytest

from cell_classifier import (
    CoefficientAssignment,
    broken_faces,
    cell_type,
    classify_b,
    classify_c,
    classify_d,
    classify_degeneration,
    classify_report,
    discriminant_hyperdeterminant,
    flattening,
    generic_coefficients,
    has_singular_point,
    hyperdeterminant_222,
    is_generic,
    prism_coordinates,
    quad_determinant,
    singular_coefficients,
)
from cube_geometry import CUBE, SYM_Q_TABLE, MarkedCell
from errors import BoundExceeded, InvalidCoefficients, InvalidInput, NotABulletCell
from exact_kernel import rank
from subdivisions import TRIVIAL, staircase

# c_ijk at index 4i + 2j + k
CORNERS_ONLY = CoefficientAssignment.of([1, 0, 0, 0, 0, 0, 0, -1])
# (X0 + X1)(Y0Z0 + Y1Z0 + Y0Z1 + 2 Y1Z1)
ONE_FACTOR = CoefficientAssignment.of([1, 1, 1, 2, 1, 1, 1, 2])
# (X0 + X1)(Y0 + 2 Y1)(Z0 + 3 Z1)
THREE_FACTORS = CoefficientAssignment.of([1, 3, 2, 6, 1, 3, 2, 6])
GENERIC = CoefficientAssignment.of([1, 2, 3, 5, 7, 11, 13, 17])


def _random_point(rng: random.Random):
    coords = []
    for _ in range(3):
        p = (0, 0)
        while p == (0, 0):
            p = (rng.randint(-2, 2), rng.randint(-2, 2))
        coords.append(p)
    return coords


def _oracle_sample(rng: random.Random, n: int) -> CoefficientAssignment:
    """Cycle through singular-by-construction, reducible and unconstrained assignments"""
    if n % 4 == 0:
        return singular_coefficients(_random_point(rng), rng)
    if n % 4 == 1:
        linear = [rng.randint(-3, 3) for _ in range(2)]
        bilinear = [rng.randint(-3, 3) for _ in range(4)]
        return CoefficientAssignment.of([a * b for a in linear for b in bilinear])
    return CoefficientAssignment.of([rng.randint(-3, 3) for _ in range(8)])


class TestCoefficientAssignment:
    """Tests for coefficient documents"""

    def test_from_mapping(self):
        """Test bitstring keys land at their indices"""
        c = CoefficientAssignment.from_mapping({f"{i:03b}": i + 1 for i in range(8)})
        assert c[5] == 6

    def test_missing_vertex(self):
        """Test incomplete assignments are rejected"""
        with pytest.raises(InvalidInput):
            CoefficientAssignment.from_mapping({"000": 1})

    def test_wrong_length(self):
        """Test positional construction needs 8 values"""
        with pytest.raises(InvalidInput):
            CoefficientAssignment.of([1, 2, 3])

    def test_to_json(self):
        """Test values serialize as rationals keyed by vertex"""
        doc = CoefficientAssignment.of(["1/2", 0, 0, 0, 0, 0, 0, 1]).to_json()
        assert doc["coefficients"]["000"] == "1/2"


class TestCellType:
    """Tests for cell_type"""

    def test_simplex(self):
        """Test conv{000,100,010,011} is type a"""
        assert cell_type(MarkedCell.of((0, 4, 2, 3))) == "a"

    def test_pyramid(self):
        """Test a square pyramid is type b"""
        assert cell_type(MarkedCell.of((0, 1, 2, 3, 4))) == "b"

    def test_prism(self):
        """Test a triangular prism is type c"""
        assert cell_type(MarkedCell.of((0, 2, 3, 4, 6, 7))) == "c"

    def test_cube(self):
        """Test the cube is type d"""
        assert cell_type(CUBE) == "d"

    @pytest.mark.parametrize("vertices", [(1, 2, 3, 4, 5, 6), tuple(range(1, 8))])
    def test_other_shapes_rejected(self, vertices):
        """Test octahedron and corner complement are not bullet cells"""
        with pytest.raises(NotABulletCell):
            cell_type(MarkedCell.of(vertices))


class TestHyperdeterminant:
    """Tests for the 2x2x2 hyperdeterminant"""

    def test_corner_values(self):
        """Test c000 = 1, c111 = -1 gives 1"""
        assert hyperdeterminant_222(CORNERS_ONLY) == 1

    def test_matches_discriminant(self):
        """Test Cayley's formula equals the slice discriminant"""
        rng = random.Random(1)
        for _ in range(100):
            c = CoefficientAssignment.of([rng.randint(-4, 4) for _ in range(8)])
            assert hyperdeterminant_222(c) == discriminant_hyperdeterminant(c)

    def test_symmetry_invariance(self):
        """Test |Det| is invariant under all 48 cube symmetries"""
        rng = random.Random(2)
        for _ in range(20):
            c = CoefficientAssignment.of([rng.randint(-4, 4) for _ in range(8)])
            value = abs(hyperdeterminant_222(c))
            assert {abs(hyperdeterminant_222(c.permuted(row))) for row in SYM_Q_TABLE} == {value}

    def test_homogeneous_of_degree_four(self):
        """Test scaling by t multiplies Det by t^4"""
        assert hyperdeterminant_222(GENERIC.scaled(2)) == 16 * hyperdeterminant_222(GENERIC)

    def test_singular_point_oracle_examples(self):
        """Test the critical-system solver on known smooth and singular forms"""
        assert has_singular_point(ONE_FACTOR)
        assert has_singular_point(THREE_FACTORS)
        assert has_singular_point(CoefficientAssignment.of([1] * 8))
        assert has_singular_point(CoefficientAssignment.of([0] * 8))
        assert not has_singular_point(CORNERS_ONLY)
        assert not has_singular_point(GENERIC)

    def test_singular_at_infinity(self):
        """Test a singular point with every second coordinate zero is found"""
        c = singular_coefficients([(1, 0), (1, 0), (1, 0)], random.Random(4))
        assert c[0] == 0
        assert has_singular_point(c)
        assert hyperdeterminant_222(c) == 0

    def test_constructed_singular_points(self):
        """Test assignments singular at a chosen point have vanishing Det"""
        rng = random.Random(5)
        for _ in range(20):
            c = singular_coefficients(_random_point(rng), rng)
            assert any(c.values)
            assert hyperdeterminant_222(c) == 0
            assert has_singular_point(c)

    def test_oracle_agrees_on_a_small_sample(self):
        """Test Det = 0 exactly when the critical system has a solution"""
        rng = random.Random(6)
        for n in range(40):
            c = _oracle_sample(rng, n)
            assert (hyperdeterminant_222(c) == 0) == has_singular_point(c)

    @pytest.mark.slow
    def test_oracle_agrees_on_a_thousand_samples(self):
        """Test Det = 0 exactly when the critical system has a solution, both ways"""
        rng = random.Random(20240601)
        vanishing = nonvanishing = 0
        for n in range(1000):
            c = _oracle_sample(rng, n)
            singular = has_singular_point(c)
            assert (hyperdeterminant_222(c) == 0) == singular
            if singular:
                vanishing += 1
            else:
                nonvanishing += 1
        assert vanishing >= 250
        assert nonvanishing >= 250


class TestClassifyD:
    """Tests for classify_d"""

    def test_corner_values_without_edge_rule(self):
        """Test c000 = 1, c111 = -1 is d1 with all six boundary lines broken"""
        label = classify_d(CORNERS_ONLY, enforce_edge_rule=False)
        assert label.label == "d1"
        assert len(label.broken_lines) == 6
        assert label.triple_point

    def test_edge_rule(self):
        """Test two zeros on one edge are refused"""
        with pytest.raises(InvalidCoefficients):
            classify_d(CORNERS_ONLY)

    def test_all_zero(self):
        """Test the zero assignment is refused"""
        with pytest.raises(InvalidCoefficients):
            classify_d(CoefficientAssignment.of([0] * 8), enforce_edge_rule=False)

    def test_one_factor(self):
        """Test a single linear factor gives d2"""
        label = classify_d(ONE_FACTOR)
        assert (label.label, label.components) == ("d2", 2)

    def test_three_factors(self):
        """Test a product of three linear forms gives d3"""
        label = classify_d(THREE_FACTORS)
        assert (label.label, label.components) == ("d3", 3)
        assert hyperdeterminant_222(THREE_FACTORS) == 0
        assert all(rank(flattening(THREE_FACTORS, axis)) == 1 for axis in range(3))

    def test_generic(self):
        """Test nonvanishing Det gives d1"""
        assert hyperdeterminant_222(GENERIC) != 0
        assert classify_d(GENERIC).label == "d1"

    def test_singular_irreducible(self):
        """Test Det = 0 without a factor gives d1'"""
        # det(A0 + t A1) = (1 + t)^2 for A0 = I, A1 = [[1, 1], [0, 1]]
        c = CoefficientAssignment.of([1, 0, 0, 1, 1, 1, 0, 1])
        assert hyperdeterminant_222(c) == 0
        assert classify_d(c, enforce_edge_rule=False).label == "d1'"

    def test_broken_faces(self):
        """Test a singular face slice is reported"""
        c = CoefficientAssignment.of([1, 2, 2, 4, 1, 3, 5, 7])
        assert "x=0" in broken_faces(c)


class TestClassifyC:
    """Tests for prism subtypes"""

    def test_generic(self):
        """Test non-proportional triples give c1"""
        assert classify_c((1, 2, 3), (1, 3, 5)).label == "c1"

    def test_partial_proportion(self):
        """Test proportional (a0, a1), (b0, b1) give c2"""
        label = classify_c((1, 2, 3), (2, 4, 5))
        assert (label.label, label.components) == ("c2", 1)

    def test_full_proportion(self):
        """Test proportional triples give c3 with two components"""
        label = classify_c((1, 2, 3), (2, 4, 6))
        assert (label.label, label.components) == ("c3", 2)

    def test_triple_point(self):
        """Test a zero apex coefficient marks a triple point"""
        assert classify_c((1, 2, 0), (1, 3, 5)).triple_point

    @pytest.mark.parametrize("a, b", [((0, 2, 3), (1, 3, 5)), ((1, 2, 0), (1, 3, 0))])
    def test_forbidden_zeros(self, a, b):
        """Test zeros on the rectangle or at both apices are refused"""
        with pytest.raises(InvalidCoefficients):
            classify_c(a, b)

    def test_prism_coordinates_are_translates(self):
        """Test the two triangles differ by one cube edge"""
        a, b = prism_coordinates(MarkedCell.of((0, 2, 3, 4, 6, 7)))
        assert {x ^ y for x, y in zip(a, b)} == {4}


class TestClassifyB:
    """Tests for pyramid subtypes"""

    PYRAMID = MarkedCell.of((0, 1, 2, 3, 4))

    def test_broken_base(self):
        """Test a singular base determinant breaks the base line"""
        c = CoefficientAssignment.of([1, 2, 2, 4, 1, 1, 1, 1])
        assert quad_determinant((0, 1, 2, 3), c) == 0
        assert classify_b(self.PYRAMID, c).broken_lines == ("base",)

    def test_generic(self):
        """Test a generic pyramid is irreducible with nothing broken"""
        label = classify_b(self.PYRAMID, GENERIC)
        assert (label.label, label.components, label.broken_lines) == ("b", 1, ())

    def test_two_zeros_refused(self):
        """Test more than one zero is refused"""
        c = CoefficientAssignment.of([0, 0, 1, 1, 1, 1, 1, 1])
        with pytest.raises(InvalidCoefficients):
            classify_b(self.PYRAMID, c)


class TestDegeneration:
    """Tests for classify_degeneration"""

    def test_smooth_cube_is_case_one(self):
        """Test a generic form on {Q} is irreducible"""
        report = classify_degeneration(TRIVIAL, GENERIC)
        assert (report.case, report.cusp) == ("I", "not-a-cusp")

    def test_one_factor_is_case_two(self):
        """Test a d2 cube splits into two glued components"""
        assert classify_degeneration(TRIVIAL, ONE_FACTOR).case == "II"

    def test_three_factors_map_to_odd2(self):
        """Test d3 on {Q} lies over the odd type-2 cusp"""
        report = classify_degeneration(TRIVIAL, THREE_FACTORS)
        assert (report.case, report.cusp) == ("III", "odd2")

    def test_two_prisms_generic(self, two_prisms):
        """Test two generic prisms glue along an irreducible curve"""
        c = generic_coefficients(two_prisms)
        assert is_generic(two_prisms, c)
        assert classify_degeneration(two_prisms, c).case == "II"

    def test_staircase_maps_to_even(self):
        """Test six simplices give a Case III surface over the even cusp"""
        s = staircase()
        report = classify_degeneration(s, generic_coefficients(s))
        assert (report.components, report.case, report.cusp) == (6, "III", "even")

    def test_report_json(self, two_prisms):
        """Test the JSON report carries cell types"""
        doc = classify_report(two_prisms, generic_coefficients(two_prisms))
        assert [entry["type"] for entry in doc["cells"]] == ["c", "c"]

    def test_generic_search_is_seeded(self, two_prisms):
        """Test the same seed gives the same assignment"""
        assert generic_coefficients(two_prisms, seed=4) == generic_coefficients(two_prisms, seed=4)

    def test_generic_search_bound(self, corner_cut_subdivision):
        """Test cells outside the four types exhaust the search"""
        with pytest.raises((BoundExceeded, NotABulletCell)):
            generic_coefficients(corner_cut_subdivision, attempts=3)

    def test_fraction_coefficients(self):
        """Test rational coefficients classify exactly"""
        c = CoefficientAssignment.of([Fraction(1, 2)] + [1] * 7)
        assert classify_degeneration(TRIVIAL, c).components >= 1
