"""
newton_geometry.py - Newton polyhedra, dual diagrams and lattice volumes

Features:
- Facets of the Newton polyhedron from the positive facets of every
  coordinate projection of the support
- Face lattice with compactness flags, closed under intersection
- Dual Newton diagram (one dual cone per face)
- Normalized lattice volumes of cones over compact faces via pulling
  triangulations (lexicographically smallest or largest pulling vertex)
- chi(w) and the Newton number of a convenient polynomial

Supported ambient dimension is n <= 4.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from exact_linalg import bareiss_det, cofactor_normal, primitive, rank
from symbolic_poly import Polynomial, restrict, weighted_min
from toolkit_errors import DomainError

logger = logging.getLogger(__name__)

MAX_AMBIENT_DIMENSION = 4


@dataclass(frozen=True)
class Face:
    """A face of the Newton polyhedron of f^I"""

    points: frozenset
    dim: int
    compact: bool
    normals: tuple = ()
    ambient: tuple = ()

    def sorted_points(self):
        return sorted(self.points)

    def weight(self):
        """A weight vector w with Delta(w; f^I) equal to this face"""
        n = len(next(iter(self.points)))
        return tuple(sum(w[i] for w in self.normals) for i in range(n))


@dataclass
class NewtonComplex:
    nvars: int
    faces: list
    facets: list
    convenient: bool
    support: frozenset = field(default_factory=frozenset)

    def compact_faces(self, dim=None):
        return [f for f in self.faces if f.compact and (dim is None or f.dim == dim)]

    def positive_facets(self):
        """(w, d) pairs of the compact facets"""
        return [(w, d) for w, d in self.facets if all(x > 0 for x in w)]

    def boundary_points(self):
        points = set()
        for face in self.compact_faces():
            points |= face.points
        return frozenset(points)


@dataclass(frozen=True)
class DualCone:
    generators: tuple
    face: Face
    dim: int
    support: frozenset = frozenset()

    def contains(self, w):
        """w lies in the closed cone dual to self.face"""
        if any(x < 0 for x in w):
            return False
        recession = [i for i in range(len(w)) if sum(g[i] for g in self.generators) == 0]
        if any(w[i] != 0 for i in recession):
            return False
        values = {_dot(p, w) for p in self.face.points}
        if len(values) != 1:
            return False
        level = values.pop()
        return all(_dot(q, w) >= level for q in self.support)


@dataclass
class DualDiagram:
    nvars: int
    cones: list

    @property
    def maximal_cones(self):
        return [c for c in self.cones if c.dim == self.nvars]

    @property
    def positive_vertices(self):
        vertices = set()
        for cone in self.cones:
            for g in cone.generators:
                if all(x > 0 for x in g):
                    vertices.add(g)
        return sorted(vertices)

    def cones_containing(self, w):
        return [c for c in self.cones if c.contains(w)]


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _check_dimension(n):
    if n > MAX_AMBIENT_DIMENSION:
        raise DomainError(f"ambient dimension {n} exceeds the supported maximum {MAX_AMBIENT_DIMENSION}", n=n)


def minimal_points(points):
    """Drop points dominated coordinatewise by another point"""
    points = sorted(set(points))
    return [
        p for p in points
        if not any(q != p and all(a <= b for a, b in zip(q, p)) for q in points)
    ]


def positive_facets(points):
    """Compact facets of Gamma_+(points) with positive primitive normals

    Returns a list of (w, d, face) where face is the subset of `points`
    on the facet. For points in Z^1 the single facet is the minimum.
    """
    points = [tuple(p) for p in points]
    if not points:
        return []
    dim = len(points[0])
    if dim == 1:
        d = min(p[0] for p in points)
        return [((1,), d, frozenset(p for p in points if p[0] == d))]
    candidates = minimal_points(points)
    found = {}
    for subset in combinations(candidates, dim):
        base = subset[0]
        diffs = [tuple(a - b for a, b in zip(p, base)) for p in subset[1:]]
        normal = cofactor_normal(diffs, dim)
        if all(x < 0 for x in normal):
            normal = tuple(-x for x in normal)
        if not all(x > 0 for x in normal):
            continue
        w = primitive(normal)
        if w in found:
            continue
        d = _dot(w, base)
        if all(_dot(w, p) >= d for p in candidates):
            found[w] = d
    return [
        (w, d, frozenset(p for p in points if _dot(w, p) == d))
        for w, d in sorted(found.items())
    ]


def _project(point, indices):
    return tuple(point[i] for i in indices)


def _extend(vector, indices, n):
    full = [0] * n
    for value, i in zip(vector, indices):
        full[i] = value
    return tuple(full)


def restriction_facets(f, indices):
    """Positive facets of Gamma(f^I) in the coordinates I (1-based), zero-extended

    Returns (w, d, face) triples with face given by exponent vectors of f.
    """
    sub = restrict(f, indices)
    if sub.is_zero():
        return []
    coords = sorted(i - 1 for i in indices)
    projected = {}
    for e in sub.support:
        projected.setdefault(_project(e, coords), []).append(e)
    result = []
    for w, d, face in positive_facets(list(projected)):
        full_face = frozenset(e for p in face for e in projected[p])
        result.append((_extend(w, coords, f.nvars), d, full_face))
    return result


def _all_facets(support, n):
    """Facets of Gamma_+ as (w, d): projections over all nonempty K"""
    facets = {}
    for size in range(1, n + 1):
        for subset in combinations(range(n), size):
            projected = sorted({_project(e, subset) for e in support})
            for w, d, _ in positive_facets(projected):
                facets[_extend(w, subset, n)] = d
    return sorted(facets.items())


def _close_face(support, facets, members):
    """Smallest face containing the intersection of the facets in members"""
    points = [e for e in support if all(_dot(facets[j][0], e) == facets[j][1] for j in members)]
    if not points:
        return None
    n = len(points[0])
    total = [sum(facets[j][0][i] for j in members) for i in range(n)]
    rays = {i for i in range(n) if total[i] == 0}
    closure = frozenset(
        j for j, (w, d) in enumerate(facets)
        if all(_dot(w, p) == d for p in points) and all(w[i] == 0 for i in rays)
    )
    return closure, frozenset(points), rays


def newton_complex(f):
    """Face lattice of Gamma_+(f)"""
    if f.is_zero():
        raise DomainError("Newton polyhedron of the zero polynomial")
    n = f.nvars
    _check_dimension(n)
    support = sorted(f.support)
    facets = _all_facets(support, n)
    logger.debug(f"Newton polyhedron in dimension {n}: {len(facets)} facets")

    faces = {}
    frontier = []
    for j in range(len(facets)):
        closed = _close_face(support, facets, {j})
        if closed and closed[0] not in faces:
            faces[closed[0]] = closed
            frontier.append(closed[0])
    while frontier:
        fresh = []
        for key in frontier:
            for other in list(faces):
                members = key | other
                if members == key or members == other:
                    continue
                closed = _close_face(support, facets, members)
                if closed and closed[0] not in faces:
                    faces[closed[0]] = closed
                    fresh.append(closed[0])
        frontier = fresh

    result = []
    for key, (members, points, rays) in faces.items():
        normals = tuple(sorted(facets[j][0] for j in members))
        dim = n - rank([list(w) for w in normals])
        result.append(Face(points=points, dim=dim, compact=not rays, normals=normals,
                           ambient=tuple(range(1, n + 1))))
    result.sort(key=lambda face: (face.dim, sorted(face.points)))
    return NewtonComplex(nvars=n, faces=result, facets=[tuple(x) for x in facets],
                         convenient=is_convenient(f), support=frozenset(support))


def is_convenient(f):
    """Gamma(f) meets every coordinate axis"""
    if f.is_zero():
        return False
    for i in range(f.nvars):
        if not any(all(x == 0 for j, x in enumerate(e) if j != i) for e in f.support):
            return False
    return True


def principal_part(f):
    """Sum of the terms of f lying on the Newton boundary"""
    complex_ = newton_complex(f)
    boundary = complex_.boundary_points()
    return Polynomial(f.nvars, {e: f.coefficient(e) for e in boundary})


def dual_newton_diagram(f):
    complex_ = newton_complex(f)
    cones = []
    for face in complex_.faces:
        cone = DualCone(generators=face.normals, face=face,
                        dim=rank([list(w) for w in face.normals]) if face.normals else 0,
                        support=complex_.support)
        cones.append(cone)
    cones.sort(key=lambda c: (-c.dim, c.generators))
    return DualDiagram(nvars=f.nvars, cones=cones)


# lattice volumes

def _hull_facets(points, k):
    """Facets of conv(points), points full-dimensional in R^k; (normal, face) pairs"""
    found = {}
    for subset in combinations(points, k):
        base = subset[0]
        diffs = [tuple(a - b for a, b in zip(p, base)) for p in subset[1:]]
        normal = cofactor_normal(diffs, k)
        if not any(normal):
            continue
        level = _dot(normal, base)
        values = [_dot(normal, p) for p in points]
        if all(v >= level for v in values) or all(v <= level for v in values):
            face = frozenset(p for p, v in zip(points, values) if v == level)
            found.setdefault(face, normal)
    return [(normal, face) for face, normal in found.items()]


def _triangulate(points, k, pull):
    """Pulling triangulation of conv(points) spanning R^k; simplices as point lists"""
    points = sorted(set(points))
    if len(points) == k + 1:
        return [list(points)]
    apex = points[0] if pull == "lexmin" else points[-1]
    simplices = []
    for normal, face in _hull_facets(points, k):
        if apex in face:
            continue
        drop = next(i for i, a in enumerate(normal) if a != 0)
        keep = [i for i in range(k) if i != drop]
        lift = {_project(p, keep): p for p in face}
        for simplex in _triangulate(list(lift), k - 1, pull):
            simplices.append([apex] + [lift[q] for q in simplex])
    return simplices


def triangulate_face(points, pull="lexmin"):
    """Triangulate a polytope given by lattice points, within its affine hull"""
    points = sorted(set(tuple(p) for p in points))
    n = len(points[0])
    base = points[0]
    dim = rank([[a - b for a, b in zip(p, base)] for p in points[1:]]) if len(points) > 1 else 0
    if dim == 0:
        return [[base]]
    # choose coordinates on which the affine hull projects isomorphically
    coords = []
    for i in range(n):
        trial = coords + [i]
        diffs = [[p[j] - base[j] for j in trial] for p in points[1:]]
        if rank(diffs) == len(trial):
            coords = trial
        if len(coords) == dim:
            break
    lift = {_project(p, coords): p for p in points}
    return [[lift[q] for q in simplex] for simplex in _triangulate(list(lift), dim, pull)]


def normalized_volume(face, indices, pull="lexmin"):
    """|I|! Vol_|I| (Cone(face, 0)) in the coordinates I (1-based)"""
    if isinstance(face, Face):
        if not face.compact:
            raise DomainError("normalized volume needs a compact face", points=face.sorted_points())
        points = face.points
    else:
        points = frozenset(tuple(p) for p in face)
    coords = sorted(i - 1 for i in indices)
    size = len(coords)
    if size < 1:
        raise DomainError("normalized volume needs |I| >= 1")
    projected = sorted({_project(p, coords) for p in points})
    if any(all(x == 0 for x in p) for p in projected):
        return 0
    base = projected[0]
    dim = rank([[a - b for a, b in zip(p, base)] for p in projected[1:]]) if len(projected) > 1 else 0
    if dim < size - 1:
        return 0
    if dim == size:
        raise DomainError("face is full-dimensional in R^I, not a face of a Newton boundary",
                          points=projected)
    total = 0
    for simplex in triangulate_face(projected, pull):
        total += abs(bareiss_det([list(p) for p in simplex]))
    return total


def chi(w, f, indices):
    """chi(w) = (-1)^(|I|-1) |I|! Vol(Cone(Delta(w; f^I), 0)) / d(w; f^I)"""
    sub = restrict(f, indices)
    d, face = weighted_min(sub, w)
    if d == 0:
        raise DomainError(f"d(w; f^I) = 0 for w={tuple(w)}", w=tuple(w), indices=sorted(indices))
    volume = normalized_volume(face, indices)
    return Fraction((-1) ** (len(indices) - 1) * volume, d)


def coordinate_subsets(n):
    for size in range(1, n + 1):
        for subset in combinations(range(1, n + 1), size):
            yield subset


def newton_number(f):
    """Kouchnirenko's Newton number of a convenient f

    nu = sum_{I} (-1)^(n-|I|) V_I + (-1)^n, with V_I the normalized volume of
    the region under Gamma(f^I); the empty set contributes (-1)^n so that
    nu(z1^2 + z2^2) = 1.
    """
    if not is_convenient(f):
        raise DomainError("Newton number needs a convenient polynomial", polynomial=str(f))
    n = f.nvars
    _check_dimension(n)
    total = (-1) ** n
    for subset in coordinate_subsets(n):
        volume = sum(normalized_volume(face, subset) for _, _, face in restriction_facets(f, subset))
        total += (-1) ** (n - len(subset)) * volume
    logger.debug(f"Newton number of {f}: {total}")
    return total


def complex_to_json(complex_):
    return {
        "nvars": complex_.nvars,
        "convenient": complex_.convenient,
        "facets": [{"normal": list(w), "d": d} for w, d in complex_.facets],
        "faces": [
            {
                "points": [list(p) for p in face.sorted_points()],
                "dim": face.dim,
                "compact": face.compact,
                "normals": [list(w) for w in face.normals],
            }
            for face in complex_.faces
        ],
    }


def diagram_to_json(diagram):
    return {
        "nvars": diagram.nvars,
        "positive_vertices": [list(v) for v in diagram.positive_vertices],
        "cones": [
            {
                "generators": [list(g) for g in cone.generators],
                "dim": cone.dim,
                "face": [list(p) for p in cone.face.sorted_points()],
                "compact_face": cone.face.compact,
            }
            for cone in diagram.cones
        ],
    }
