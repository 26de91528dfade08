"""Rational piecewise linear functions on a polytope.

Two representations are kept side by side: :class:`MaxAffinePL` (max of
affine pieces, the natural input format) and :class:`MeshPL` (values on the
points of a simplicial subdivision, linear on each cell, the variable space of
the threshold linear program). :func:`crease_refine` converts the former into
the latter.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import lp
from .errors import DimensionMismatch, MeshTooLarge, NonPiecewiseLinear, NotConvex, PointOutsideP
from .polytope import MAX_MESH_POINTS, integrate, volume
from .rational import Q, affine_rank, dot, inverse, qstr, solve
from .triangulation import SimplicialSubdivision, place


@dataclass(frozen=True)
class AffineFunction:
    a: tuple
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(map(Q, self.a)))
        object.__setattr__(self, "b", Q(self.b))

    @property
    def dim(self):
        return len(self.a)

    def __call__(self, x):
        return dot(self.a, x) + self.b

    def __add__(self, other):
        if isinstance(other, AffineFunction):
            return AffineFunction(tuple(p + q for p, q in zip(self.a, other.a)), self.b + other.b)
        return AffineFunction(self.a, self.b + Q(other))

    def __neg__(self):
        return AffineFunction(tuple(-v for v in self.a), -self.b)

    def scale(self, q):
        q = Q(q)
        return AffineFunction(tuple(q * v for v in self.a), q * self.b)

    def values_float(self, x):
        return np.asarray(x, dtype=float) @ np.array([float(v) for v in self.a]) + float(self.b)

    def mesh_values(self, P):
        mesh = P.triangulation
        return mesh, [self(p) for p in mesh.points]

    def image(self, A, t):
        """Push forward along ``x -> A x + t``: the function ``y -> self(A^-1 (y - t))``."""
        inv = inverse([[Q(v) for v in row] for row in A])
        a = tuple(sum((inv[j][i] * self.a[j] for j in range(self.dim)), Fraction(0)) for i in range(self.dim))
        return AffineFunction(a, self.b - dot(a, tuple(map(Q, t))))

    def to_json(self):
        return {"a": [qstr(v) for v in self.a], "b": qstr(self.b)}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(map(Q, data["a"])), Q(data["b"]))


def coordinate(i, n):
    """The affine function ``x -> x_i`` on n-space."""
    return AffineFunction(tuple(int(j == i) for j in range(n)), 0)


@dataclass(frozen=True)
class MaxAffinePL:
    """``f(x) = max_i (<a_i, x> + b_i)``; convex by construction."""

    pieces: tuple

    def __post_init__(self):
        pieces = tuple(p if isinstance(p, AffineFunction) else AffineFunction(*p) for p in self.pieces)
        if not pieces:
            raise ValueError("a max-affine function needs at least one piece")
        if len({p.dim for p in pieces}) != 1:
            raise DimensionMismatch("pieces of different dimensions")
        # duplicate pieces change nothing; keep first occurrences in order
        object.__setattr__(self, "pieces", tuple(dict.fromkeys(pieces)))

    @property
    def dim(self):
        return self.pieces[0].dim

    def __call__(self, x):
        x = tuple(map(Q, x))
        return max(p(x) for p in self.pieces)

    def values_float(self, x):
        x = np.asarray(x, dtype=float)
        a = np.array([[float(v) for v in p.a] for p in self.pieces])
        b = np.array([float(p.b) for p in self.pieces])
        return (x @ a.T + b).max(axis=1)

    def __add__(self, other):
        if isinstance(other, MaxAffinePL):
            return MaxAffinePL(tuple(p + q for p in self.pieces for q in other.pieces))
        if isinstance(other, AffineFunction):
            return MaxAffinePL(tuple(p + other for p in self.pieces))
        return MaxAffinePL(tuple(p + Q(other) for p in self.pieces))

    def scale(self, q):
        q = Q(q)
        if q < 0:
            raise NotConvex("negative multiples of convex functions are concave")
        if q == 0:
            return MaxAffinePL((AffineFunction((0,) * self.dim, 0),))
        return MaxAffinePL(tuple(p.scale(q) for p in self.pieces))

    def region_inequalities(self, P, i):
        rows = [tuple(Q(a) for a in f.normal) for f in P.facets]
        rhs = [f.offset for f in P.facets]
        pi = self.pieces[i]
        for j, pj in enumerate(self.pieces):
            if j != i:
                rows.append(tuple(x - y for x, y in zip(pi.a, pj.a)))
                rhs.append(pj.b - pi.b)
        return rows, rhs

    def regions(self, P):
        """Vertex lists of the full-dimensional linearity regions, keyed by piece index."""
        out = {}
        for i in range(len(self.pieces)):
            rows, rhs = self.region_inequalities(P, i)
            verts = hrep_vertices(rows, rhs, P.dim)
            if affine_rank(verts) == P.dim:
                out[i] = verts
        return out

    def canonical(self, P):
        """Drop pieces that are nowhere the unique maximum on a full-dimensional set."""
        keep = sorted(self.regions(P))
        return MaxAffinePL(tuple(self.pieces[i] for i in keep))

    def mesh_values(self, P):
        mesh = crease_refine(self, P)
        return mesh.subdivision, mesh.values

    def image(self, A, t):
        return MaxAffinePL(tuple(p.image(A, t) for p in self.pieces))

    def to_json(self):
        return {"type": "max_affine", "pieces": [p.to_json() for p in self.pieces]}


def hrep_vertices(rows, rhs, dim):
    """Vertices of ``{x : rows x >= rhs}`` by exhaustive basis enumeration."""
    found = set()
    for combo in combinations(range(len(rows)), dim):
        x = solve([rows[k] for k in combo], [rhs[k] for k in combo])
        if x is None:
            continue
        if all(dot(r, x) >= c for r, c in zip(rows, rhs)):
            found.add(tuple(x))
    return sorted(found)


@dataclass(frozen=True)
class MeshPL:
    """Values on the points of a subdivision, interpolated linearly per cell."""

    subdivision: SimplicialSubdivision
    values: tuple

    def __post_init__(self):
        vals = tuple(map(Q, self.values))
        if len(vals) != len(self.subdivision.points):
            raise DimensionMismatch("one value per subdivision point is required")
        object.__setattr__(self, "values", vals)

    @property
    def dim(self):
        return self.subdivision.dim

    def __call__(self, x):
        c, lam = self.subdivision.locate(x)
        cell = self.subdivision.cells[c]
        return sum((w * self.values[v] for w, v in zip(lam, cell)), Fraction(0))

    def cell_piece(self, c):
        """The affine function agreeing with this function on cell ``c``."""
        cache = self.__dict__.setdefault("_pieces", {})
        if c not in cache:
            pts = [self.subdivision.points[v] for v in self.subdivision.cells[c]]
            vals = [self.values[v] for v in self.subdivision.cells[c]]
            rows = [tuple(p) + (Fraction(1),) for p in pts]
            sol = solve(rows, vals)
            cache[c] = AffineFunction(tuple(sol[:-1]), sol[-1])
        return cache[c]

    def pieces(self):
        return [self.cell_piece(c) for c in range(len(self.subdivision.cells))]

    def to_max_affine(self):
        """Max-affine form; exact for convex mesh functions."""
        verdict = is_convex(self)
        if not verdict.convex:
            raise NotConvex(f"mesh function is not convex at face {verdict.face}")
        return MaxAffinePL(tuple(dict.fromkeys(self.pieces())))

    def shift(self, c):
        c = Q(c)
        return MeshPL(self.subdivision, tuple(v + c for v in self.values))

    def scale(self, q):
        q = Q(q)
        return MeshPL(self.subdivision, tuple(q * v for v in self.values))

    def __add__(self, other):
        if isinstance(other, AffineFunction):
            return MeshPL(self.subdivision, tuple(v + other(p) for v, p in zip(self.values, self.subdivision.points)))
        if isinstance(other, MeshPL) and other.subdivision == self.subdivision:
            return MeshPL(self.subdivision, tuple(v + w for v, w in zip(self.values, other.values)))
        return self.shift(other)

    def mesh_values(self, P):
        return self.subdivision, list(self.values)

    def image(self, A, t):
        return MeshPL(self.subdivision.transform(A, t), self.values)

    def to_json(self):
        return {"type": "mesh", "subdivision": self.subdivision.to_json(), "values": [qstr(v) for v in self.values]}


def from_json(data):
    kind = data.get("type", "max_affine")
    if kind == "max_affine":
        return MaxAffinePL(tuple(AffineFunction.from_json(p) for p in data["pieces"]))
    if kind == "affine":
        return AffineFunction.from_json(data)
    if kind == "mesh":
        return MeshPL(SimplicialSubdivision.from_json(data["subdivision"]), tuple(map(Q, data["values"])))
    raise NonPiecewiseLinear(f"unknown PL function type {kind!r}")


def as_pl(f, dim=None):
    """Accept affine functions and constants where a PL function is expected."""
    if isinstance(f, (MaxAffinePL, MeshPL)):
        return f
    if isinstance(f, AffineFunction):
        return MaxAffinePL((f,))
    if isinstance(f, (int, Fraction)) and dim is not None:
        return MaxAffinePL((AffineFunction((0,) * dim, Q(f)),))
    raise NonPiecewiseLinear(f"not a piecewise linear function: {f!r}")


def evaluate(f, x, P=None):
    x = tuple(map(Q, x))
    if P is not None and not P.contains(x):
        raise PointOutsideP(f"{tuple(map(qstr, x))} is not in the polytope")
    return f(x)


def crease_refine(f, P, max_points=None):
    """Subdivide ``P`` so that ``f`` is linear on every cell.

    Each full-dimensional linearity region is triangulated by placing all
    region vertices (of every region) that it contains, in one global
    lexicographic order; this makes the cells of neighbouring regions match
    along their common faces.
    """
    if isinstance(f, MeshPL):
        return f
    f = as_pl(f)
    cache = f.__dict__.setdefault("_crease", {})
    if P in cache:
        return cache[P]
    if f.dim != P.dim:
        raise DimensionMismatch("function and polytope dimensions differ")
    regions = f.regions(P)
    points = sorted({v for verts in regions.values() for v in verts})
    cap = MAX_MESH_POINTS if max_points is None else max_points
    if len(points) > cap:
        raise MeshTooLarge(f"crease refinement needs {len(points)} points")
    index = {p: i for i, p in enumerate(points)}
    cells = set()
    for i in sorted(regions):
        rows, rhs = f.region_inequalities(P, i)
        local = [p for p in points if all(dot(r, p) >= c for r, c in zip(rows, rhs))]
        for cell in place(local):
            cells.add(tuple(sorted(index[local[j]] for j in cell)))
    mesh = SimplicialSubdivision(tuple(points), tuple(sorted(cells)), 0)
    mesh.validate(P)
    out = MeshPL(mesh, tuple(f(p) for p in points))
    cache[P] = out
    return out


@dataclass(frozen=True)
class ConvexityVerdict:
    convex: bool
    face: tuple = None
    excess: Fraction = None

    def __bool__(self):
        return self.convex


def is_convex(f):
    """Hinge test on every interior face; reports the first violated hinge.

    For the face shared by cells s and t, the affine extension of ``f|s`` at
    the vertex of t opposite the face must not exceed ``f`` there.
    """
    mesh = f.subdivision
    for face, inc in sorted(mesh.interior_faces()):
        (c0, _), (_, q) = inc
        lam = mesh.barycentric_in(c0, mesh.points[q])
        ext = sum((w * f.values[v] for w, v in zip(lam, mesh.cells[c0])), Fraction(0))
        if ext > f.values[q]:
            return ConvexityVerdict(False, face, ext - f.values[q])
    return ConvexityVerdict(True)


def hinge_rows(mesh):
    """Linear forms ``f(q) - ext_s(q) >= 0`` over the point values, one per interior face."""
    rows = []
    for face, inc in sorted(mesh.interior_faces()):
        (c0, _), (_, q) = inc
        lam = mesh.barycentric_in(c0, mesh.points[q])
        row = {q: Fraction(1)}
        for w, v in zip(lam, mesh.cells[c0]):
            row[v] = row.get(v, Fraction(0)) - w
        rows.append(row)
    return rows


def min_over(P, f):
    """Exact minimum of convex ``f`` over ``P`` with a witness point."""
    if isinstance(f, MeshPL):
        best = min(f.values)
        witness = min(p for p, v in zip(f.subdivision.points, f.values) if v == best)
        return best, witness
    f = as_pl(f, P.dim)
    n = P.dim
    # variables (x, s): minimize s with s >= piece_i(x), x in P
    rows = [tuple(Q(a) for a in fac.normal) + (Fraction(0),) for fac in P.facets]
    rhs = [fac.offset for fac in P.facets]
    for p in f.pieces:
        rows.append(tuple(-a for a in p.a) + (Fraction(1),))
        rhs.append(p.b)
    out = lp.solve(lp.LinearProgram((0,) * n + (1,), tuple(rows), tuple(rhs)))
    return out.value, tuple(out.x[:n])


def tilde(P, f):
    """Recentre ``f`` to have zero mean over ``P``."""
    mean = integrate(P, f) / volume(P)
    if isinstance(f, MeshPL):
        return f.shift(-mean)
    if isinstance(f, AffineFunction):
        return f + (-mean)
    return as_pl(f, P.dim) + (-mean)


def combine(P, terms):
    """``sum_i q_i f_i`` as a mesh function, for arbitrary rational ``q_i``.

    The mesh is the crease refinement of ``sum_i f_i``; every ``f_i`` is
    linear on its cells, so the combination is exact even for negative weights.
    """
    total = None
    for _, f in terms:
        g = f.to_max_affine() if isinstance(f, MeshPL) else as_pl(f, P.dim)
        total = g if total is None else total + g
    mesh = crease_refine(total, P).subdivision
    values = []
    for p in mesh.points:
        values.append(sum((Q(q) * f(p) for q, f in terms), Fraction(0)))
    return MeshPL(mesh, tuple(values))
