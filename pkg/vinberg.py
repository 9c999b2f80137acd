"""
Vinberg's algorithm for norm -1 roots in hyperbolic lattices of signature (1, n)

Roots r with r.r = -1 are found height by height (height = v0.r). A
candidate is accepted when its product with every previously accepted root is
nonnegative, so accepted roots meet pairwise in 0 (no edge), 1 (an edge
marked inf) or >= 2 (a dotted edge).
"""
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from networkx.algorithms import isomorphism

from config import ODD1_WINDOW
from errors import InvalidInput, UnboundedSlice, WindowTooSmall
from exact_kernel import determinant, nullspace, rank, signature, solve
from logger_config import setup_logger

logger = setup_logger("vinberg")

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class GramLattice:
    name: str
    gram: Tuple[Tuple[int, ...], ...]

    @classmethod
    def of(cls, gram: Sequence[Sequence[int]], name: str = "custom") -> "GramLattice":
        """
        Raises:
            NotSymmetric: asymmetric Gram matrix
            InvalidInput: singular or not of signature (1, n)
        """
        rows = tuple(tuple(int(x) for x in row) for row in gram)
        pos, neg, zero = signature(rows)
        if zero or determinant(rows) == 0:
            raise InvalidInput("Gram matrix is degenerate")
        if pos != 1:
            raise InvalidInput(f"Expected signature (1, n), got ({pos}, {neg})")
        return cls(name=name, gram=rows)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def inner(self, x: Sequence, y: Sequence):
        return sum(x[i] * self.gram[i][j] * y[j] for i in range(self.rank) for j in range(self.rank))

    def norm(self, x: Sequence):
        return self.inner(x, x)


LATTICES = {
    "even": GramLattice.of([[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]], "even"),
    "odd1": GramLattice.of([[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -2, 0], [0, 0, 0, -2]], "odd1"),
    "odd2": GramLattice.of([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, -2, 0], [0, 0, 0, -2]], "odd2"),
}

INITIAL_VECTORS: Dict[str, Vector] = {
    "even": (1, 0, 0, 0),
    "odd1": (1, -1, 0, 0),
    "odd2": (1, 1, 0, 0),
}


def named_lattice(name: str) -> Tuple[GramLattice, Vector]:
    if name not in LATTICES:
        raise InvalidInput(f"Unknown lattice {name!r}; expected one of {', '.join(LATTICES)}")
    return LATTICES[name], INITIAL_VECTORS[name]


def odd1_root(a: int, b: int) -> Vector:
    """The root (a^2+b^2, 1-a^2-b^2, a, b) at height 1 of the odd type-1 cusp"""
    return (a * a + b * b, 1 - a * a - b * b, a, b)


# ---------------------------------------------------------------------------
# Roots on a height slice
# ---------------------------------------------------------------------------


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


def _slice_form(lattice: GramLattice, v0: Sequence[int], n: int):
    """
    Parametrize {x : v0.x = n} by the coordinates z other than a pivot k

    Returns (k, w, A, b, c) with x.x = z^T A z + b.z + c.
    """
    size = lattice.rank
    w = [sum(lattice.gram[i][j] * v0[j] for j in range(size)) for i in range(size)]
    k = next(i for i in range(size) if w[i] != 0)
    others = [i for i in range(size) if i != k]
    p = [Fraction(0)] * size
    p[k] = Fraction(n, w[k])
    directions = []
    for i in others:
        m = [Fraction(0)] * size
        m[i] = Fraction(1)
        m[k] = Fraction(-w[i], w[k])
        directions.append(m)
    a = [[lattice.inner(mi, mj) for mj in directions] for mi in directions]
    b = [2 * lattice.inner(p, mi) for mi in directions]
    c = lattice.norm(p)
    return k, w, a, b, c


def _assemble(k: int, w: Sequence[int], n: int, z: Sequence[int]) -> Optional[Vector]:
    others = [i for i in range(len(w)) if i != k]
    x = [0] * len(w)
    for i, value in zip(others, z):
        x[i] = value
    rest = n - sum(w[i] * x[i] for i in others)
    if rest % w[k]:
        return None
    x[k] = rest // w[k]
    return tuple(x)


def _ldl(matrix: List[List[Fraction]]) -> Tuple[List[Fraction], List[List[Fraction]]]:
    """P = sum_j d_j (y_j + sum_{l>j} u_jl y_l)^2 for positive definite P"""
    m = len(matrix)
    work = [row[:] for row in matrix]
    d, u = [], [[Fraction(0)] * m for _ in range(m)]
    for j in range(m):
        d.append(work[j][j])
        for l in range(j + 1, m):
            u[j][l] = work[j][l] / work[j][j]
        for l in range(j + 1, m):
            for t in range(j + 1, m):
                work[l][t] -= d[j] * u[j][l] * u[j][t]
    return d, u


def _ellipsoid_points(p: List[List[Fraction]], lin: List[Fraction], budget: Fraction) -> List[List[int]]:
    """Integer z with z^T P z + lin.z <= budget, P positive definite"""
    m = len(p)
    if m == 0:
        return [[]] if budget >= 0 else []
    # center h solves 2 P h = lin, so z^T P z + lin.z = (z+h)^T P (z+h) - h^T P h

    h = solve([[2 * x for x in row] for row in p], lin)
    radius = budget + sum(h[i] * p[i][j] * h[j] for i in range(m) for j in range(m))
    d, u = _ldl(p)
    out = []

    def descend(j: int, y: List[Optional[Fraction]], z: List[Optional[int]], remaining: Fraction):
        if j < 0:
            out.append(list(z))
            return
        shift = sum(u[j][l] * y[l] for l in range(j + 1, m))
        center = -(h[j] + shift)
        reach = remaining / d[j]
        t = math.isqrt(math.floor(reach)) + 1
        for value in range(math.floor(center) - t, math.ceil(center) + t + 1):
            term = d[j] * (value - center) ** 2
            if term <= remaining:
                y[j] = value + h[j]
                z[j] = value
                descend(j - 1, y, z, remaining - term)
        y[j] = None
        z[j] = None

    if radius >= 0:
        descend(m - 1, [None] * m, [None] * m, radius)
    return out


def roots_at_height(
    lattice: GramLattice, v0: Sequence[int], n: int, window: Optional[int] = None
) -> List[Vector]:
    """
    All x with x.x = -1 and v0.x = n, in lexicographic order

    For isotropic v0 the slice is unbounded along v0; coordinates transverse
    to it are then restricted to [-window, window].

    Raises:
        InvalidInput: v0 of negative norm or zero
        UnboundedSlice: isotropic v0 without a window, or roots at height 0
    """
    if not any(v0) or lattice.norm(v0) < 0:
        raise InvalidInput("Initial vector must be nonzero with v0.v0 >= 0")
    if lattice.is_even:
        # even lattice: every norm is even
        return []
    k, w, a, b, c = _slice_form(lattice, v0, n)
    found = set()

    if lattice.norm(v0) > 0:
        negated = [[-x for x in row] for row in a]
        for z in _ellipsoid_points(negated, [-x for x in b], c + 1):
            value = sum(z[i] * a[i][j] * z[j] for i in range(len(z)) for j in range(len(z)))
            if value + sum(bi * zi for bi, zi in zip(b, z)) + c == -1:
                x = _assemble(k, w, n, z)
                if x is not None:
                    found.add(x)
        return sorted(found)

    if window is None:
        raise UnboundedSlice(
            "Isotropic initial vector: the slice is unbounded without a window",
            payload={"height": n},
        )
    kernel = nullspace(a, ncols=len(a))
    if len(kernel) != 1:
        raise UnboundedSlice(f"Slice form has a {len(kernel)}-dimensional kernel")
    j = next(i for i, value in enumerate(kernel[0]) if value != 0)
    free = [i for i in range(len(a)) if i != j]
    for values in itertools.product(range(-window, window + 1), repeat=len(free)):
        z = dict(zip(free, values))
        quad = a[j][j]
        lin = b[j] + 2 * sum(a[j][i] * z[i] for i in free)
        const = (
            sum(z[i] * a[i][l] * z[l] for i in free for l in free)
            + sum(b[i] * z[i] for i in free)
            + c
            + 1
        )
        solutions = []
        if quad == 0:
            if lin == 0:
                if const == 0:
                    raise UnboundedSlice("Root set is infinite along the slice", payload={"height": n})
                continue
            solutions.append(-const / lin)
        else:
            root = _rational_sqrt(lin * lin - 4 * quad * const)
            if root is None:
                continue
            solutions.extend({(-lin + root) / (2 * quad), (-lin - root) / (2 * quad)})
        for zj in solutions:
            if zj.denominator != 1:
                continue
            full = [z[i] if i != j else int(zj) for i in range(len(a))]
            x = _assemble(k, w, n, full)
            if x is not None:
                found.add(x)
    if n == 0 and found:
        # x + t v0 is a root for every t
        raise UnboundedSlice("Roots orthogonal to an isotropic vector come in infinite families")
    return sorted(found)


def norm_vector_search(lattice: GramLattice, bound: int, norm: int = -1) -> List[Vector]:
    """Brute force over the box [-bound, bound]^n for vectors of the given norm"""
    gram = np.array(lattice.gram, dtype=np.int64)
    axis = np.arange(-bound, bound + 1, dtype=np.int64)
    tail = np.stack(np.meshgrid(*([axis] * (lattice.rank - 1)), indexing="ij"), axis=-1)
    tail = tail.reshape(-1, lattice.rank - 1)
    hits = []
    for first in axis:
        vectors = np.hstack([np.full((len(tail), 1), first, dtype=np.int64), tail])
        norms = np.einsum("ij,jk,ik->i", vectors, gram, vectors)
        for row in vectors[norms == norm]:
            hits.append(tuple(int(v) for v in row))
    return sorted(hits)


# ---------------------------------------------------------------------------
# The algorithm
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Rejection:
    candidate: Vector
    height: int
    witness: Vector
    product: int


@dataclass
class VinbergResult:
    lattice: GramLattice
    v0: Vector
    accepted: List[Vector] = field(default_factory=list)
    heights: Dict[Vector, int] = field(default_factory=dict)
    rejections: List[Rejection] = field(default_factory=list)
    terminated: bool = False
    last_height: int = 0

    def to_json(self) -> dict:
        return {
            "lattice": self.lattice.name,
            "gram": [list(row) for row in self.lattice.gram],
            "v0": list(self.v0),
            "accepted": [{"root": list(r), "height": self.heights[r]} for r in self.accepted],
            "rejected": len(self.rejections),
            "terminated": self.terminated,
            "last_height": self.last_height,
        }


def _independent(vectors: List[Vector]) -> bool:
    return rank(vectors) == len(vectors)


def vinberg_run(
    lattice: GramLattice,
    v0: Sequence[int],
    max_height: int,
    window: Optional[int] = None,
    stop_when_finite: bool = False,
) -> VinbergResult:
    """
    Height 0: greedy lexicographic choice of independent roots orthogonal to
    v0 with pairwise nonnegative products. Heights 1..max_height: accept a
    root iff its product with every accepted root is nonnegative.
    """
    v0 = tuple(v0)
    result = VinbergResult(lattice=lattice, v0=v0)

    for root in roots_at_height(lattice, v0, 0, window):
        if all(lattice.inner(root, r) >= 0 for r in result.accepted) and _independent(
            result.accepted + [root]
        ):
            result.accepted.append(root)
            result.heights[root] = 0
    logger.info(f"{lattice.name}: {len(result.accepted)} roots at height 0")

    for height in range(1, max_height + 1):
        result.last_height = height
        added = 0
        for candidate in roots_at_height(lattice, v0, height, window):
            witness = next((r for r in result.accepted if lattice.inner(candidate, r) < 0), None)
            if witness is None:
                result.accepted.append(candidate)
                result.heights[candidate] = height
                added += 1
            else:
                product = lattice.inner(candidate, witness)
                result.rejections.append(Rejection(candidate, height, witness, product))
                logger.debug(f"Rejected {candidate} at height {height}: product {product} with {witness}")
        logger.info(f"{lattice.name}: height {height} accepted {added} roots")
        if stop_when_finite and finite_volume_check(coxeter_diagram(result.accepted, lattice), lattice.rank):
            break

    result.terminated = finite_volume_check(coxeter_diagram(result.accepted, lattice), lattice.rank)
    return result


# ---------------------------------------------------------------------------
# Coxeter diagrams
# ---------------------------------------------------------------------------


@dataclass
class CoxeterDiagram:
    """Vertices with their Gram matrix; the graph carries edges of product >= 1"""

    labels: List[Tuple[int, ...]]
    gram: List[List[int]]
    graph: nx.Graph

    def __len__(self) -> int:
        return len(self.labels)

    def product(self, i: int, j: int) -> int:
        return self.gram[i][j]

    def edge_kind(self, i: int, j: int) -> Optional[str]:
        g = self.gram[i][j]
        if g == 0:
            return None
        if g == 1:
            return "inf"
        return "dotted"

    def to_dot(self, name: str = "coxeter") -> str:
        lines = [f"graph {name} {{"]
        for i, label in enumerate(self.labels):
            lines.append(f'  v{i} [label="{",".join(str(x) for x in label)}"];')
        for i, j in itertools.combinations(range(len(self.labels)), 2):
            g = self.gram[i][j]
            if g == 1:
                lines.append(f'  v{i} -- v{j} [label="inf"];')
            elif g >= 2:
                lines.append(f'  v{i} -- v{j} [style=dotted, label="{g}"];')
        lines.append("}")
        return "\n".join(lines)


def diagram_from_gram(labels: List[Tuple[int, ...]], gram: List[List[int]]) -> CoxeterDiagram:
    """Diagram of an abstract root set given by its Gram matrix"""
    graph = nx.Graph()
    graph.add_nodes_from(range(len(labels)))
    for i, j in itertools.combinations(range(len(labels)), 2):
        if gram[i][j] != 0:
            graph.add_edge(i, j, product=gram[i][j])
    return CoxeterDiagram(labels=labels, gram=gram, graph=graph)


def coxeter_diagram(roots: Sequence[Vector], lattice: GramLattice) -> CoxeterDiagram:
    roots = list(roots)
    gram = [[int(lattice.inner(r, s)) for s in roots] for r in roots]
    return diagram_from_gram(roots, gram)


def odd1_gram(p: Tuple[int, int], q: Tuple[int, int]) -> int:
    """Closed-form product of the height-1 roots at the odd type-1 cusp"""
    return -1 + (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2


def odd1_diagram(window: int) -> CoxeterDiagram:
    """Height-1 roots indexed by (a, b) in [-window, window]^2"""
    labels = [(a, b) for a in range(-window, window + 1) for b in range(-window, window + 1)]
    gram = [[odd1_gram(p, q) for q in labels] for p in labels]
    return diagram_from_gram(labels, gram)


# ---------------------------------------------------------------------------
# Subdiagrams
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subdiagram:
    vertices: Tuple[int, ...]
    kind: str
    rank: int
    components: Tuple[int, ...]


def _components(diagram: CoxeterDiagram, vertices: Sequence[int]) -> List[List[int]]:
    sub = diagram.graph.subgraph(vertices)
    return [sorted(c) for c in nx.connected_components(sub)]


def _submatrix(diagram: CoxeterDiagram, vertices: Sequence[int]) -> List[List[int]]:
    return [[diagram.gram[i][j] for j in vertices] for i in vertices]


def analyse(diagram: CoxeterDiagram, vertices: Sequence[int]) -> Optional[Subdiagram]:
    """Elliptic (negative definite) or parabolic (every component of corank 1), else None"""
    vertices = tuple(sorted(vertices))
    pos, neg, zero = signature(_submatrix(diagram, vertices))
    components = _components(diagram, vertices)
    sizes = tuple(sorted(len(c) for c in components))
    if neg == len(vertices):
        return Subdiagram(vertices, "elliptic", len(vertices), sizes)
    for comp in components:
        if signature(_submatrix(diagram, comp)) != (0, len(comp) - 1, 1):
            return None
    return Subdiagram(vertices, "parabolic", len(vertices) - len(components), sizes)


def subdiagrams(diagram: CoxeterDiagram, lattice_rank: int) -> Tuple[List[Subdiagram], List[Subdiagram]]:
    """All elliptic and all maximal parabolic vertex subsets"""
    compatible = nx.Graph()
    compatible.add_nodes_from(range(len(diagram)))
    for i, j in itertools.combinations(range(len(diagram)), 2):
        if diagram.gram[i][j] <= 1:
            compatible.add_edge(i, j)
    limit = max(lattice_rank - 1, 2 * (lattice_rank - 2))
    elliptic, parabolic = [], []
    for clique in nx.enumerate_all_cliques(compatible):
        if len(clique) > limit:
            break
        found = analyse(diagram, clique)
        if found is None:
            continue
        if found.kind == "elliptic":
            elliptic.append(found)
        elif found.rank == lattice_rank - 2:
            parabolic.append(found)
    return elliptic, parabolic


def _class_name(sub: Subdiagram) -> str:
    piece = "A1" if sub.kind == "elliptic" else "Ã1"
    if sub.kind == "parabolic" and any(size != 2 for size in sub.components):
        return "+".join(f"Ã{size - 1}" for size in sub.components)
    return "+".join([piece] * len(sub.components))


@dataclass(frozen=True)
class SubdiagramClass:
    kind: str
    rank: int
    name: str
    representative: Tuple[Tuple[int, ...], ...]
    count: int

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "rank": self.rank,
            "name": self.name,
            "representative": [list(v) for v in self.representative],
            "count": self.count,
        }


def diagram_automorphisms(diagram: CoxeterDiagram) -> List[Dict[int, int]]:
    matcher = isomorphism.GraphMatcher(
        diagram.graph,
        diagram.graph,
        edge_match=lambda e1, e2: e1["product"] == e2["product"],
    )
    return list(matcher.isomorphisms_iter())


_D4 = [
    lambda a, b: (a, b),
    lambda a, b: (-b, a),
    lambda a, b: (-a, -b),
    lambda a, b: (b, -a),
    lambda a, b: (b, a),
    lambda a, b: (-a, b),
    lambda a, b: (a, -b),
    lambda a, b: (-b, -a),
]


def _planar_key(points: Iterable[Tuple[int, int]]) -> Tuple[Tuple[int, int], ...]:
    """Canonical form of a point set under translations and the dihedral group of the square"""
    points = list(points)
    if not points:
        return ()
    best = None
    for g in _D4:
        moved = [g(*p) for p in points]
        ox = min(p[0] for p in moved)
        oy = min(p[1] for p in moved)
        key = tuple(sorted((p[0] - ox, p[1] - oy) for p in moved))
        if best is None or key < best:
            best = key
    return best


def classify_subdiagrams(
    diagram: CoxeterDiagram, lattice_rank: int, planar_window: Optional[int] = None
) -> Tuple[List[SubdiagramClass], List[SubdiagramClass]]:
    """
    Elliptic and maximal parabolic subdiagrams up to diagram automorphism

    With `planar_window`, vertices are points of Z^2 and classes are taken up
    to translations and the symmetries of the square.

    Raises:
        WindowTooSmall: the window cannot hold every candidate shape
    """
    if planar_window is not None and 2 * planar_window + 1 < 2 * (lattice_rank - 2):
        raise WindowTooSmall(
            f"Window {planar_window} is too small for subdiagrams of rank {lattice_rank - 2}"
        )
    elliptic, parabolic = subdiagrams(diagram, lattice_rank)

    if planar_window is not None:

        def key(sub):
            return _planar_key([diagram.labels[v] for v in sub.vertices])

    else:
        automorphisms = diagram_automorphisms(diagram) or [{i: i for i in range(len(diagram))}]

        def key(sub):
            return min(tuple(sorted(a[v] for v in sub.vertices)) for a in automorphisms)

    def group(subs):
        classes: Dict[Tuple, List[Subdiagram]] = {}
        for sub in subs:
            classes.setdefault(key(sub), []).append(sub)
        out = []
        for members in classes.values():
            rep = min(members, key=lambda s: s.vertices)
            out.append(
                SubdiagramClass(
                    kind=rep.kind,
                    rank=rep.rank,
                    name=_class_name(rep),
                    representative=tuple(diagram.labels[v] for v in rep.vertices),
                    count=len(members),
                )
            )
        return sorted(out, key=lambda c: (c.rank, c.name, c.representative))

    return group(elliptic), group(parabolic)


def finite_volume_check(diagram: CoxeterDiagram, lattice_rank: int) -> bool:
    """
    Every elliptic subdiagram of rank n-2 extends in exactly two ways to an
    elliptic subdiagram of rank n-1 or a maximal parabolic one; the empty
    diagram passes vacuously
    """
    if len(diagram) == 0:
        return True
    elliptic, parabolic = subdiagrams(diagram, lattice_rank)
    top = [set(s.vertices) for s in elliptic if s.rank == lattice_rank - 1]
    top += [set(s.vertices) for s in parabolic]
    if not top:
        return False
    for sub in elliptic:
        if sub.rank != lattice_rank - 2:
            continue
        extensions = sum(1 for t in top if set(sub.vertices) < t)
        if extensions != 2:
            return False
    return True


def odd1_classification(window: Optional[int] = None) -> Tuple[List[SubdiagramClass], List[SubdiagramClass]]:
    window = ODD1_WINDOW if window is None else window
    lattice = LATTICES["odd1"]
    return classify_subdiagrams(odd1_diagram(window), lattice.rank, planar_window=window)
