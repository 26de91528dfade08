"""Delzant polytopes in exact rational arithmetic.

A polytope is stored by its facets ``<x, normal> - offset >= 0``. Everything in
this module is exact: volumes, boundary measures and integrals of piecewise
linear functions come back as :class:`fractions.Fraction`.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from math import ceil, floor, gcd, lcm

from . import lp
from .errors import (
    DegeneratePolytope,
    DimensionMismatch,
    EmptyPolytope,
    EmptyWeightSet,
    MeshTooLarge,
    NonPiecewiseLinear,
    NotUnimodular,
    RedundantFacet,
    UnboundedPolytope,
)
from .rational import Q, affine_rank, det, dot, inverse, qstr, solve
from .triangulation import SimplicialSubdivision, place

MAX_MESH_POINTS = 20000


@dataclass(frozen=True)
class Facet:
    normal: tuple
    offset: Fraction

    def __post_init__(self):
        normal = tuple(self.normal)
        if any(isinstance(a, Fraction) and a.denominator != 1 for a in normal):
            raise ValueError("facet normals must be integer vectors")
        object.__setattr__(self, "normal", tuple(int(a) for a in normal))
        object.__setattr__(self, "offset", Q(self.offset))

    def __call__(self, x):
        return dot(self.normal, x) - self.offset


@dataclass(frozen=True)
class DelzantPolytope:
    """``P = {x : <x, normal_k> - offset_k >= 0 for all k}`` in the standard lattice.

    Construction rejects empty, unbounded and lower-dimensional polytopes and
    redundant facets. Primitivity and the Delzant condition itself are reported
    by :func:`check_delzant` so that invalid inputs can still be inspected.
    """

    dim: int
    facets: tuple = field()

    def __post_init__(self):
        facets = tuple(f if isinstance(f, Facet) else Facet(*f) for f in self.facets)
        object.__setattr__(self, "facets", facets)
        if self.dim < 1:
            raise DimensionMismatch("dimension must be positive")
        for f in facets:
            if len(f.normal) != self.dim:
                raise DimensionMismatch(f"normal {f.normal} has wrong length for dimension {self.dim}")
            if not any(f.normal):
                raise DegeneratePolytope("zero facet normal")
        if len(set(facets)) != len(facets):
            raise RedundantFacet("duplicate facet")
        self._check_bounded()
        if affine_rank(self.vertices) < self.dim:
            raise DegeneratePolytope("polytope has empty interior")
        for k in range(len(facets)):
            on = [v for v in self.vertices if self.ell(k, v) == 0]
            if affine_rank(on) < self.dim - 1:
                raise RedundantFacet(f"facet {k} does not support an ({self.dim - 1})-dimensional face")

    def _check_bounded(self):
        rows = [f.normal for f in self.facets]
        rhs = [f.offset for f in self.facets]
        for i in range(self.dim):
            for s in (1, -1):
                c = [0] * self.dim
                c[i] = s
                out = lp.solve(lp.LinearProgram(tuple(c), tuple(rows), tuple(rhs)))
                if isinstance(out, lp.Infeasible):
                    raise EmptyPolytope("facet inequalities are infeasible")
                if isinstance(out, lp.Unbounded):
                    raise UnboundedPolytope(f"polytope is unbounded in direction {tuple(map(qstr, out.ray))}")

    # -- basic queries -------------------------------------------------

    def ell(self, k, x):
        return self.facets[k](x)

    def contains(self, x):
        return all(f(x) >= 0 for f in self.facets)

    @cached_property
    def vertices(self):
        """Sorted exact vertex list."""
        found = set()
        for combo in combinations(self.facets, self.dim):
            x = solve([f.normal for f in combo], [f.offset for f in combo])
            if x is not None and self.contains(x):
                found.add(tuple(x))
        return tuple(sorted(found))

    @cached_property
    def triangulation(self):
        """Placing triangulation of the vertex set in lexicographic order."""
        return SimplicialSubdivision(self.vertices, tuple(place(list(self.vertices))), 0)

    def volume(self):
        return self.triangulation.volume()

    def to_json(self):
        return {
            "dim": self.dim,
            "facets": [{"normal": list(f.normal), "offset": qstr(f.offset)} for f in self.facets],
        }

    @classmethod
    def from_json(cls, data):
        return cls(int(data["dim"]), tuple(Facet(tuple(f["normal"]), Q(f["offset"])) for f in data["facets"]))

    def __repr__(self):
        body = ", ".join(f"{f.normal}>={f.offset}" for f in self.facets)
        return f"DelzantPolytope({self.dim}, [{body}])"


def polytope(facets):
    """Shorthand: ``polytope([((1, 0), 0), ((-1, 0), -1), ...])``."""
    facets = [Facet(tuple(a), Q(b)) for a, b in facets]
    return DelzantPolytope(len(facets[0].normal), tuple(facets))


def vertices(P):
    return list(P.vertices)


@dataclass(frozen=True)
class VertexReport:
    vertex: tuple
    facets: tuple
    determinant: object  # None unless exactly n facets meet

    @property
    def ok(self):
        return self.determinant is not None and abs(self.determinant) == 1


@dataclass(frozen=True)
class DelzantReport:
    valid: bool
    vertices: tuple
    nonprimitive: tuple

    def failures(self):
        return [r for r in self.vertices if not r.ok]

    def to_json(self):
        return {
            "valid": self.valid,
            "nonprimitive_facets": list(self.nonprimitive),
            "vertices": [
                {
                    "vertex": [qstr(c) for c in r.vertex],
                    "facets": list(r.facets),
                    "incident": len(r.facets),
                    "determinant": None if r.determinant is None else int(r.determinant),
                    "ok": r.ok,
                }
                for r in self.vertices
            ],
        }


def check_delzant(P):
    reports = []
    for v in P.vertices:
        inc = tuple(k for k in range(len(P.facets)) if P.ell(k, v) == 0)
        d = det([P.facets[k].normal for k in inc]) if len(inc) == P.dim else None
        reports.append(VertexReport(v, inc, d))
    nonprim = []
    for k, f in enumerate(P.facets):
        g = 0
        for a in f.normal:
            g = gcd(g, a)
        if g != 1:
            nonprim.append(k)
    valid = all(r.ok for r in reports) and not nonprim
    return DelzantReport(valid, tuple(reports), tuple(nonprim))


# -- measures ----------------------------------------------------------


def volume(P):
    return P.triangulation.volume()


def boundary_area(P):
    return sum((m for _, _, _, m in P.triangulation.boundary_faces(P)), Fraction(0))


def mean_scalar(P):
    return boundary_area(P) / volume(P)


def barycenter(P):
    mesh = P.triangulation
    total = [Fraction(0)] * P.dim
    for c, vol in zip(mesh.cells, mesh.volumes()):
        for i in range(P.dim):
            total[i] += vol * sum((mesh.points[v][i] for v in c), Fraction(0)) / (P.dim + 1)
    V = mesh.volume()
    return tuple(t / V for t in total)


def facet_masses(P):
    """dsigma-mass of each facet."""
    masses = [Fraction(0)] * len(P.facets)
    for _, k, _, m in P.triangulation.boundary_faces(P):
        masses[k] += m
    return masses


def integrate_mesh(P, mesh, values, region="interior"):
    """Integral of the function interpolating ``values`` linearly on each cell."""
    n = P.dim
    if region == "interior":
        total = Fraction(0)
        for c, vol in zip(mesh.cells, mesh.volumes()):
            total += vol * sum((values[v] for v in c), Fraction(0))
        return total / (n + 1)
    if region == "boundary":
        total = Fraction(0)
        for face, _, _, mass in mesh.boundary_faces(P):
            total += mass * sum((values[v] for v in face), Fraction(0)) / len(face)
        return total
    raise ValueError(f"unknown region {region!r}")


def integrate(P, f, region="interior"):
    """Exact integral of a piecewise linear ``f`` over ``P`` or over its boundary.

    ``f`` may be a rational constant or any object with a ``mesh_values(P)``
    method returning a subdivision of ``P`` on whose cells ``f`` is linear
    together with the values at its points.
    """
    if isinstance(f, (int, Fraction)):
        f = Q(f)
        return f * (volume(P) if region == "interior" else boundary_area(P))
    if not hasattr(f, "mesh_values"):
        raise NonPiecewiseLinear(f"cannot integrate {type(f).__name__} exactly")
    mesh, values = f.mesh_values(P)
    return integrate_mesh(P, mesh, values, region)


# -- subdivisions --------------------------------------------------------


def _grid_points(P, scale):
    lo = [min(v[i] for v in P.vertices) for i in range(P.dim)]
    hi = [max(v[i] for v in P.vertices) for i in range(P.dim)]
    ranges = [range(ceil(lo[i] * scale), floor(hi[i] * scale) + 1) for i in range(P.dim)]
    count = 1
    for r in ranges:
        count *= len(r)
    if count > 50 * MAX_MESH_POINTS:
        raise MeshTooLarge(f"grid with {count} candidate points")
    out = []
    for idx in product(*ranges):
        x = tuple(Fraction(i, scale) for i in idx)
        if P.contains(x):
            out.append(x)
    return out


def lattice_scale(P):
    return lcm(*(c.denominator for v in P.vertices for c in v))


def subdivide(P, depth, max_points=None):
    """Nested simplicial mesh of ``P`` on the grid ``(lattice_scale * 2**depth)^-1 Z^n``.

    Level 0 holds the vertices, the coarse grid points and the barycenter, in
    lexicographic order; each finer level adds its new grid points in
    lexicographic order, refining the previous mesh.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    cap = MAX_MESH_POINTS if max_points is None else max_points
    base = lattice_scale(P)
    seen = set()
    levels = []
    for level in range(depth + 1):
        pts = set(_grid_points(P, base * 2**level))
        if level == 0:
            pts |= set(P.vertices)
            pts.add(barycenter(P))
        new = sorted(pts - seen)
        seen |= set(new)
        levels.append(new)
        if len(seen) > cap:
            raise MeshTooLarge(f"subdivision at depth {depth} needs more than {cap} points")
    points = [p for lev in levels for p in lev]
    cells = place(points)
    return SimplicialSubdivision(tuple(points), tuple(cells), depth)


# -- generic support function and lattice transforms --------------------


def support_function(weights, lam):
    weights = list(weights)
    if not weights:
        raise EmptyWeightSet("support function of an empty weight set")
    lam = tuple(map(Q, lam))
    return max(dot(w, lam) for w in weights)


def _check_unimodular(A, n):
    if len(A) != n or any(len(row) != n for row in A):
        raise DimensionMismatch("transform matrix has the wrong shape")
    if any(Q(a).denominator != 1 for row in A for a in row):
        raise NotUnimodular("transform matrix must be integral")
    if abs(det(A)) != 1:
        raise NotUnimodular(f"determinant {det(A)} is not +-1")


def transform(P, A, t):
    """Image ``A P + t``; normals map by the inverse transpose and stay primitive."""
    _check_unimodular(A, P.dim)
    t = tuple(map(Q, t))
    inv = inverse([[Q(a) for a in row] for row in A])
    facets = []
    for f in P.facets:
        normal = tuple(int(sum((inv[j][i] * f.normal[j] for j in range(P.dim)), Fraction(0))) for i in range(P.dim))
        facets.append(Facet(normal, f.offset + dot(normal, t)))
    return DelzantPolytope(P.dim, tuple(facets))


def cut_corner(P, vertex, size):
    """Blow up ``vertex`` by the facet ``sum_i l_i >= size`` over its incident facets.

    For a Delzant vertex and small enough ``size`` the result is Delzant again.
    """
    inc = [k for k in range(len(P.facets)) if P.ell(k, vertex) == 0]
    normal = tuple(sum(P.facets[k].normal[i] for k in inc) for i in range(P.dim))
    offset = sum((P.facets[k].offset for k in inc), Fraction(0)) + Q(size)
    return DelzantPolytope(P.dim, P.facets + (Facet(normal, offset),))
