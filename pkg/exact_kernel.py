"""
Exact arithmetic kernel
Rational linear algebra, Smith normal form, Sylvester signature and
feasibility of linear systems with strict inequalities.

Everything works on Python ints and fractions.Fraction; nothing here ever
touches a float.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from errors import DimensionMismatch, InvalidInput, NotSymmetric
from logger_config import setup_logger

logger = setup_logger("exact_kernel")

Rational = Fraction
Vector = Tuple[Fraction, ...]
IntMatrix = List[List[int]]


def to_rational(value) -> Fraction:
    """
    Parse an int, Fraction or "p/q" string into a reduced Fraction

    Raises:
        InvalidInput: floats, booleans and unparsable strings
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise InvalidInput(f"Expected an exact rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise InvalidInput(f"Not a rational number: {value!r}") from e
    raise InvalidInput(f"Expected an exact rational, got {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    """Serialize as "p/q" (or "p" for integers)"""
    return str(Fraction(value))


def _as_fraction_rows(matrix: Sequence[Sequence]) -> List[List[Fraction]]:
    rows = [[Fraction(x) for x in row] for row in matrix]
    if rows and any(len(row) != len(rows[0]) for row in rows):
        raise DimensionMismatch("Matrix rows have inconsistent lengths")
    return rows


def reduced_row_echelon(matrix: Sequence[Sequence]) -> Tuple[List[List[Fraction]], List[int]]:
    """
    Reduced row echelon form over Q

    Returns:
        (nonzero rows of the RREF, pivot column indices)
    """
    rows = _as_fraction_rows(matrix)
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rank(matrix: Sequence[Sequence]) -> int:
    return len(reduced_row_echelon(matrix)[1])


def nullspace(matrix: Sequence[Sequence], ncols: Optional[int] = None) -> List[Vector]:
    """Basis of {x : Mx = 0} over Q, one vector per free column"""
    rows, pivots = reduced_row_echelon(matrix)
    if ncols is None:
        if not matrix:
            raise DimensionMismatch("Column count required for an empty matrix")
        ncols = len(matrix[0])
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for row, p in zip(rows, pivots):
            v[p] = -row[free]
        basis.append(tuple(v))
    return basis


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> Optional[Vector]:
    """One rational solution of Mx = b (free variables set to 0), or None"""
    if len(matrix) != len(rhs):
        raise DimensionMismatch("Right-hand side length differs from row count")
    if not matrix:
        return ()
    ncols = len(matrix[0])
    augmented = [list(row) + [b] for row, b in zip(matrix, rhs)]
    rows, pivots = reduced_row_echelon(augmented)
    if pivots and pivots[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(rows, pivots):
        x[p] = row[ncols]
    return tuple(x)


def integer_solve(basis: Sequence[Sequence[int]], vector: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """
    Integer coordinates of `vector` in the lattice spanned by the rows of `basis`

    Returns None when the vector is outside the rational span or the lattice.
    """
    if not basis:
        return () if not any(vector) else None
    transposed = [[row[i] for row in basis] for i in range(len(vector))]
    x = solve(transposed, list(vector))
    if x is None or any(c.denominator != 1 for c in x):
        return None
    return tuple(int(c) for c in x)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmithNormalForm:
    """U @ M @ V = diag(factors); right_inverse = V^-1. Transforms are unimodular."""

    factors: Tuple[int, ...]
    rank: int
    left: Optional[IntMatrix] = None
    right: Optional[IntMatrix] = None
    right_inverse: Optional[IntMatrix] = None


def _identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(matrix: Sequence[Sequence[int]], transforms: bool = False) -> SmithNormalForm:
    """
    Smith normal form by elementary operations

    The pivot is always the smallest nonzero entry of the remaining block.
    """
    a = [[int(x) for x in row] for row in matrix]
    if a and any(len(row) != len(a[0]) for row in a):
        raise DimensionMismatch("Matrix rows have inconsistent lengths")
    m = len(a)
    n = len(a[0]) if a else 0
    u, v, v_inv = _identity(m), _identity(n), _identity(n)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]
        v_inv[i], v_inv[j] = v_inv[j], v_inv[i]

    def add_row(target, source, q):
        # row_target += q * row_source
        a[target] = [x + q * y for x, y in zip(a[target], a[source])]
        u[target] = [x + q * y for x, y in zip(u[target], u[source])]

    def add_col(target, source, q):
        # col_target += q * col_source
        for row in a:
            row[target] += q * row[source]
        for row in v:
            row[target] += q * row[source]
        v_inv[source] = [x - q * y for x, y in zip(v_inv[source], v_inv[target])]

    t = 0
    while t < min(m, n):
        entries = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            clean = True
            for i in range(t + 1, m):
                q = a[i][t] // a[t][t]
                if q:
                    add_row(i, t, -q)
                if a[i][t]:
                    clean = False
            for j in range(t + 1, n):
                q = a[t][j] // a[t][t]
                if q:
                    add_col(j, t, -q)
                if a[t][j]:
                    clean = False
            if not clean:
                line = [(abs(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t]]
                line += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
                _, i, j = min(line)
                if abs(a[i][j]) < abs(a[t][t]):
                    swap_rows(t, i)
                    swap_cols(t, j)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % a[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1

    factors = tuple(a[i][i] for i in range(t))
    if not transforms:
        return SmithNormalForm(factors=factors, rank=t)
    return SmithNormalForm(factors=factors, rank=t, left=u, right=v, right_inverse=v_inv)


def saturate(generators: Sequence[Sequence[int]]) -> List[Tuple[int, ...]]:
    """
    Basis of the saturation (Q-span intersected with Z^n) of the given vectors

    Leading rows of V^-1 from the Smith form span the row space and, being
    part of a unimodular matrix, a saturated lattice.
    """
    rows = [[int(x) for x in g] for g in generators if any(g)]
    if not rows:
        return []
    snf = smith_normal_form(rows, transforms=True)
    return [tuple(row) for row in snf.right_inverse[: snf.rank]]


def integer_kernel(matrix: Sequence[Sequence[int]], ncols: int) -> List[Tuple[int, ...]]:
    """Z-basis of {x in Z^n : Mx = 0}"""
    rows = [[int(x) for x in row] for row in matrix if any(row)]
    if not rows:
        return [tuple(r) for r in _identity(ncols)]
    snf = smith_normal_form(rows, transforms=True)
    return [tuple(row[k] for row in snf.right) for k in range(snf.rank, ncols)]


def determinant(matrix: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-valued elimination"""
    rows = _as_fraction_rows(matrix)
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise DimensionMismatch("Determinant of a non-square matrix")
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = -det
        det *= rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c]:
                factor = rows[i][c] / rows[c][c]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[c])]
    return det


def signature(gram: Sequence[Sequence]) -> Tuple[int, int, int]:
    """
    Sylvester signature (positives, negatives, zeros) via LDL^T

    When every remaining diagonal entry vanishes, a congruence row_i += row_j
    creates the nonzero pivot 2*g_ij.

    Raises:
        NotSymmetric: gram is not a symmetric square matrix
    """
    a = _as_fraction_rows(gram)
    n = len(a)
    if any(len(row) != n for row in a) or any(
        a[i][j] != a[j][i] for i in range(n) for j in range(i)
    ):
        raise NotSymmetric("Gram matrix must be symmetric")

    remaining = list(range(n))
    positives = negatives = 0
    while remaining:
        pivot = next((i for i in remaining if a[i][i] != 0), None)
        if pivot is None:
            pair = next(
                ((i, j) for i in remaining for j in remaining if i < j and a[i][j] != 0), None
            )
            if pair is None:
                break
            i, j = pair
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            pivot = i
        d = a[pivot][pivot]
        if d > 0:
            positives += 1
        else:
            negatives += 1
        remaining.remove(pivot)
        for i in remaining:
            factor = a[i][pivot] / d
            if factor:
                for j in remaining:
                    a[i][j] -= factor * a[pivot][j]
    return positives, negatives, len(remaining)


# ---------------------------------------------------------------------------
# Strict linear feasibility
# ---------------------------------------------------------------------------

Constraint = Tuple[Vector, Fraction]


@dataclass(frozen=True)
class LinearSystem:
    """
    equalities: row . x == rhs
    strict_inequalities: row . x > rhs
    inequalities: row . x >= rhs
    """

    num_vars: int
    equalities: Tuple[Constraint, ...] = ()
    strict_inequalities: Tuple[Constraint, ...] = ()
    inequalities: Tuple[Constraint, ...] = ()

    @classmethod
    def build(cls, num_vars: int, equalities=(), strict_inequalities=(), inequalities=()):
        if num_vars < 1:
            raise InvalidInput("A linear system needs at least one variable")

        def normalize(constraints, kind):
            out = []
            for row, rhs in constraints:
                if len(row) != num_vars:
                    raise DimensionMismatch(
                        f"{kind} row has {len(row)} entries, expected {num_vars}"
                    )
                out.append((tuple(Fraction(x) for x in row), Fraction(rhs)))
            return tuple(out)

        return cls(
            num_vars=num_vars,
            equalities=normalize(equalities, "equality"),
            strict_inequalities=normalize(strict_inequalities, "strict inequality"),
            inequalities=normalize(inequalities, "inequality"),
        )

    def satisfied_by(self, x: Sequence[Fraction]) -> bool:
        dot = lambda row: sum(r * v for r, v in zip(row, x))  # noqa: E731
        return (
            all(dot(row) == rhs for row, rhs in self.equalities)
            and all(dot(row) > rhs for row, rhs in self.strict_inequalities)
            and all(dot(row) >= rhs for row, rhs in self.inequalities)
        )


@dataclass(frozen=True)
class Refutation:
    """
    Nonnegative multipliers on the inequalities and free multipliers on the
    equalities whose combination cancels every variable while the right-hand
    sides sum to something the constraints cannot reach.
    """

    system: LinearSystem
    strict_multipliers: Tuple[Fraction, ...]
    inequality_multipliers: Tuple[Fraction, ...]
    equality_multipliers: Tuple[Fraction, ...]

    def verify(self) -> bool:
        mu, kappa, nu = self.strict_multipliers, self.inequality_multipliers, self.equality_multipliers
        if any(m < 0 for m in mu) or any(k < 0 for k in kappa):
            return False
        n = self.system.num_vars
        combined = [Fraction(0)] * n
        value = Fraction(0)
        groups = (
            (mu, self.system.strict_inequalities),
            (kappa, self.system.inequalities),
            (nu, self.system.equalities),
        )
        for weights, constraints in groups:
            for w, (row, rhs) in zip(weights, constraints):
                for k in range(n):
                    combined[k] += w * row[k]
                value += w * rhs
        if any(combined):
            return False
        return value > 0 or (value == 0 and sum(mu) > 0)


@dataclass(frozen=True)
class LPResult:
    feasible: bool
    witness: Optional[Vector] = None
    slack: Optional[Fraction] = None
    refutation: Optional[Refutation] = None

    def __iter__(self):
        yield self.feasible
        yield self.witness


class _Row:
    """coeffs . (x, slack) >= rhs, remembering how it was derived"""

    __slots__ = ("coeffs", "rhs", "mu", "nu")

    def __init__(self, coeffs, rhs, mu, nu):
        self.coeffs = coeffs
        self.rhs = rhs
        self.mu = mu
        self.nu = nu

    def combine(self, weight, other, other_weight):
        return _Row(
            [weight * a + other_weight * b for a, b in zip(self.coeffs, other.coeffs)],
            weight * self.rhs + other_weight * other.rhs,
            [weight * a + other_weight * b for a, b in zip(self.mu, other.mu)],
            [weight * a + other_weight * b for a, b in zip(self.nu, other.nu)],
        )

    def normalized(self):
        lead = next((c for c in self.coeffs if c != 0), None)
        if lead is None:
            return self
        scale = 1 / abs(lead)
        return _Row(
            [c * scale for c in self.coeffs],
            self.rhs * scale,
            [m * scale for m in self.mu],
            [v * scale for v in self.nu],
        )


def _refutation_from(system: LinearSystem, row: _Row) -> Refutation:
    s = len(system.strict_inequalities)
    k = len(system.inequalities)
    return Refutation(
        system=system,
        strict_multipliers=tuple(row.mu[:s]),
        inequality_multipliers=tuple(row.mu[s : s + k]),
        equality_multipliers=tuple(row.nu),
    )


def _dedupe(rows: List[_Row]) -> List[_Row]:
    best = {}
    for row in rows:
        key = tuple(row.coeffs)
        if key not in best or row.rhs > best[key].rhs:
            best[key] = row
    return list(best.values())


def lp_feasible(system: LinearSystem) -> LPResult:
    """
    Decide feasibility exactly

    Strict rows r.x > b become r.x - s >= b with a slack s <= 1; the system is
    feasible iff the largest attainable s is positive. Equalities are
    eliminated by pivoting, then Fourier-Motzkin removes the x variables and
    leaves upper bounds on s. Infeasible systems come back with a refutation.
    """
    n = system.num_vars
    s_count = len(system.strict_inequalities)
    k_count = len(system.inequalities)
    e_count = len(system.equalities)
    mu_len = s_count + k_count + 1
    slack = n

    def unit(length, index):
        v = [Fraction(0)] * length
        if index is not None:
            v[index] = Fraction(1)
        return v

    rows: List[_Row] = []
    for i, (row, rhs) in enumerate(system.strict_inequalities):
        rows.append(_Row(list(row) + [Fraction(-1)], rhs, unit(mu_len, i), unit(e_count, None)))
    for i, (row, rhs) in enumerate(system.inequalities):
        rows.append(
            _Row(list(row) + [Fraction(0)], rhs, unit(mu_len, s_count + i), unit(e_count, None))
        )
    rows.append(
        _Row([Fraction(0)] * n + [Fraction(-1)], Fraction(-1), unit(mu_len, mu_len - 1), unit(e_count, None))
    )
    equalities = [
        _Row(list(row) + [Fraction(0)], rhs, unit(mu_len, None), unit(e_count, i))
        for i, (row, rhs) in enumerate(system.equalities)
    ]

    # Equality elimination
    eliminated: List[Tuple[int, _Row]] = []
    while equalities:
        eq = equalities.pop(0)
        pivot = next((c for c in range(n) if eq.coeffs[c] != 0), None)
        if pivot is None:
            if eq.rhs != 0:
                sign = 1 if eq.rhs > 0 else -1
                logger.debug("Equalities are inconsistent")
                return LPResult(
                    feasible=False,
                    refutation=Refutation(
                        system=system,
                        strict_multipliers=tuple([Fraction(0)] * s_count),
                        inequality_multipliers=tuple([Fraction(0)] * k_count),
                        equality_multipliers=tuple(sign * v for v in eq.nu),
                    ),
                )
            continue
        eliminated.append((pivot, eq))

        def reduce(row, eq=eq, pivot=pivot):
            if row.coeffs[pivot] == 0:
                return row
            return row.combine(Fraction(1), eq, -row.coeffs[pivot] / eq.coeffs[pivot])

        equalities = [reduce(r) for r in equalities]
        rows = [reduce(r) for r in rows]

    pivots = {p for p, _ in eliminated}
    free_vars = [c for c in range(n) if c not in pivots]

    # Fourier-Motzkin over the free variables
    stages: List[Tuple[int, List[_Row]]] = []
    rows = _dedupe([r.normalized() for r in rows])
    for var in free_vars:
        positive = [r for r in rows if r.coeffs[var] > 0]
        negative = [r for r in rows if r.coeffs[var] < 0]
        rest = [r for r in rows if r.coeffs[var] == 0]
        stages.append((var, positive + negative))
        for p in positive:
            for q in negative:
                rest.append(p.combine(-q.coeffs[var], q, p.coeffs[var]).normalized())
        rows = _dedupe(rest)

    for row in rows:
        if all(c == 0 for c in row.coeffs) and row.rhs > 0:
            logger.debug("Constraint system is infeasible even without strictness")
            return LPResult(feasible=False, refutation=_refutation_from(system, row))

    # Slack enters with non-positive coefficients only, so every survivor is an upper bound
    bounds = [(row.rhs / row.coeffs[slack], row) for row in rows if row.coeffs[slack] < 0]
    best, tight_row = min(bounds, key=lambda item: item[0])
    if best <= 0:
        logger.debug(f"Maximal slack {best} is not positive")
        return LPResult(feasible=False, slack=best, refutation=_refutation_from(system, tight_row))

    values = {slack: best}
    for var, stage_rows in reversed(stages):
        lower = upper = None
        for row in stage_rows:
            rest = sum(
                row.coeffs[c] * values[c]
                for c in values
                if c != var and row.coeffs[c] != 0
            )
            bound = (row.rhs - rest) / row.coeffs[var]
            if row.coeffs[var] > 0:
                lower = bound if lower is None else max(lower, bound)
            else:
                upper = bound if upper is None else min(upper, bound)
        if lower is not None and upper is not None:
            values[var] = (lower + upper) / 2
        elif lower is not None:
            values[var] = lower
        elif upper is not None:
            values[var] = upper
        else:
            values[var] = Fraction(0)

    for pivot, eq in reversed(eliminated):
        rest = sum(eq.coeffs[c] * values[c] for c in values if c != pivot and c != slack)
        values[pivot] = (eq.rhs - rest) / eq.coeffs[pivot]

    witness = tuple(values[c] for c in range(n))
    if not system.satisfied_by(witness):
        raise ArithmeticError("Back-substituted witness violates the system")
    return LPResult(feasible=True, witness=witness, slack=best)
