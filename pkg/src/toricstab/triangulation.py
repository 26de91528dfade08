"""Exact simplicial subdivisions of rational point sets.

Points are inserted one at a time in a fixed order. A point outside the current
hull is joined to every boundary face it sees (placing); a point inside the
current hull is inserted by stellar subdivision of every cell containing it.
Later points therefore only ever refine earlier cells, which is what makes the
depth sequence produced by :func:`toricstab.polytope.subdivide` nested.
"""

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import DegeneratePolytope, InvalidSubdivision, PointOutsideP
from .rational import Q, affine_rank, det, inverse, qstr


class _Cell:
    __slots__ = ("verts", "lo", "hi", "inv", "origin")

    def __init__(self, verts, points):
        self.verts = verts
        coords = [points[v] for v in verts]
        self.origin = coords[0]
        dim = len(self.origin)
        self.lo = tuple(min(c[i] for c in coords) for i in range(dim))
        self.hi = tuple(max(c[i] for c in coords) for i in range(dim))
        cols = [[c[i] - self.origin[i] for i in range(dim)] for c in coords[1:]]
        # inverse of the matrix whose columns are the edge vectors
        self.inv = inverse([[cols[j][i] for j in range(dim)] for i in range(dim)])

    def barycentric(self, x):
        if any(a < lo or a > hi for a, lo, hi in zip(x, self.lo, self.hi)):
            return None
        rel = [a - o for a, o in zip(x, self.origin)]
        mu = [sum((r * y for r, y in zip(row, rel)), Fraction(0)) for row in self.inv]
        lam = [1 - sum(mu, Fraction(0))] + mu
        if any(v < 0 for v in lam):
            return None
        return lam


def _orientation(face_points, p):
    base = face_points[0]
    rows = [[a - b for a, b in zip(q, base)] for q in face_points[1:]]
    rows.append([a - b for a, b in zip(p, base)])
    d = det(rows)
    return (d > 0) - (d < 0)


def place(points, order=None):
    """Triangulate ``points`` (distinct rational tuples) inserting in ``order``.

    Returns a sorted list of cells, each a sorted tuple of point indices.
    """
    dim = len(points[0])
    order = list(range(len(points))) if order is None else list(order)
    initial = []
    for idx in order:
        if affine_rank([points[i] for i in initial + [idx]]) > len(initial) - 1:
            initial.append(idx)
            if len(initial) == dim + 1:
                break
    if len(initial) < dim + 1:
        raise DegeneratePolytope("point set is not full-dimensional")

    cells = {tuple(sorted(initial)): _Cell(tuple(sorted(initial)), points)}
    used = set(initial)
    for idx in order:
        if idx in used:
            continue
        used.add(idx)
        p = points[idx]
        hits = []
        for key, cell in cells.items():
            lam = cell.barycentric(p)
            if lam is not None:
                hits.append((key, lam))
        if hits:
            for key, lam in hits:
                del cells[key]
                for i, weight in enumerate(lam):
                    if weight > 0:
                        new = tuple(sorted(key[:i] + (idx,) + key[i + 1 :]))
                        cells[new] = _Cell(new, points)
            continue
        faces = Counter()
        opposite = {}
        for key in cells:
            for i in range(dim + 1):
                face = key[:i] + key[i + 1 :]
                faces[face] += 1
                opposite[face] = key[i]
        for face, count in faces.items():
            if count != 1:
                continue
            fpts = [points[v] for v in face]
            side_p = _orientation(fpts, p)
            if side_p != 0 and side_p == -_orientation(fpts, points[opposite[face]]):
                new = tuple(sorted(face + (idx,)))
                cells[new] = _Cell(new, points)
    return sorted(cells)


@dataclass(frozen=True)
class SimplicialSubdivision:
    """Exact simplicial mesh: rational ``points`` and ``cells`` of point indices."""

    points: tuple
    cells: tuple
    depth: int = 0

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(tuple(map(Q, p)) for p in self.points))
        object.__setattr__(self, "cells", tuple(tuple(int(i) for i in c) for c in self.cells))

    @property
    def dim(self):
        return len(self.points[0])

    def _cell_objects(self):
        cache = self.__dict__.get("_cellcache")
        if cache is None:
            cache = [_Cell(c, self.points) for c in self.cells]
            self.__dict__["_cellcache"] = cache
        return cache

    def cell_volume(self, c):
        verts = [self.points[v] for v in self.cells[c]]
        base = verts[0]
        d = det([[a - b for a, b in zip(v, base)] for v in verts[1:]])
        return abs(d) / factorial(self.dim)

    def volumes(self):
        cache = self.__dict__.get("_volcache")
        if cache is None:
            cache = [self.cell_volume(c) for c in range(len(self.cells))]
            self.__dict__["_volcache"] = cache
        return cache

    def volume(self):
        return sum(self.volumes(), Fraction(0))

    def locate(self, x):
        """Index of the first cell containing ``x`` and its barycentric coordinates."""
        x = tuple(map(Q, x))
        for c, cell in enumerate(self._cell_objects()):
            lam = cell.barycentric(x)
            if lam is not None:
                return c, lam
        raise PointOutsideP(f"point {tuple(map(qstr, x))} lies outside the mesh")

    def barycentric_in(self, c, x):
        """Barycentric coordinates of ``x`` for cell ``c`` (may be negative)."""
        cell = self._cell_objects()[c]
        rel = [Q(a) - o for a, o in zip(x, cell.origin)]
        mu = [sum((r * y for r, y in zip(row, rel)), Fraction(0)) for row in cell.inv]
        return [1 - sum(mu, Fraction(0))] + mu

    def faces(self):
        """Map each (n-1)-face to the list of ``(cell index, opposite vertex)``."""
        cache = self.__dict__.get("_facecache")
        if cache is None:
            cache = {}
            for c, key in enumerate(self.cells):
                for i in range(len(key)):
                    face = key[:i] + key[i + 1 :]
                    cache.setdefault(face, []).append((c, key[i]))
            self.__dict__["_facecache"] = cache
        return cache

    def interior_faces(self):
        return [(f, inc) for f, inc in self.faces().items() if len(inc) == 2]

    def boundary_faces(self, polytope):
        """Boundary faces with facet index and boundary-measure mass.

        The mass of a face on facet k is ``n * vol(cell) / l_k(opposite vertex)``,
        the pyramid formula for the measure with ``dx = dsigma ^ dl_k``.
        """
        cache = self.__dict__.get("_bfcache")
        if cache is not None and cache[0] is polytope:
            return cache[1]
        out = []
        vols = self.volumes()
        n = self.dim
        for face, inc in self.faces().items():
            if len(inc) != 1:
                continue
            c, opp = inc[0]
            k = next(
                (k for k in range(len(polytope.facets)) if all(polytope.ell(k, self.points[v]) == 0 for v in face)),
                None,
            )
            if k is None:
                raise InvalidSubdivision(f"boundary face {face} is not contained in a facet")
            mass = n * vols[c] / polytope.ell(k, self.points[opp])
            out.append((face, k, c, mass))
        out.sort()
        self.__dict__["_bfcache"] = (polytope, out)
        return out

    def validate(self, polytope):
        """Raise :class:`InvalidSubdivision` unless this is a triangulation of ``polytope``."""
        for p in self.points:
            if not polytope.contains(p):
                raise InvalidSubdivision(f"point {p} outside the polytope")
        if any(v <= 0 for v in self.volumes()):
            raise InvalidSubdivision("cell with non-positive volume")
        if self.volume() != polytope.volume():
            raise InvalidSubdivision("cell volumes do not add up to the polytope volume")
        for face, inc in self.faces().items():
            if len(inc) > 2:
                raise InvalidSubdivision(f"face {face} shared by {len(inc)} cells")
            if len(inc) == 2:
                fpts = [self.points[v] for v in face]
                s0 = _orientation(fpts, self.points[inc[0][1]])
                s1 = _orientation(fpts, self.points[inc[1][1]])
                if s0 * s1 >= 0:
                    raise InvalidSubdivision(f"cells overlap across face {face}")
        self.boundary_faces(polytope)
        vset = set(self.points)
        for v in polytope.vertices:
            if v not in vset:
                raise InvalidSubdivision(f"vertex {v} missing from the mesh")
        return True

    def transform(self, matrix, shift):
        pts = []
        for p in self.points:
            pts.append(tuple(sum((Q(a) * x for a, x in zip(row, p)), Fraction(0)) + Q(t) for row, t in zip(matrix, shift)))
        return SimplicialSubdivision(tuple(pts), self.cells, self.depth)

    def to_json(self):
        return {"points": [[qstr(c) for c in p] for p in self.points], "cells": [list(c) for c in self.cells]}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(tuple(map(Q, p)) for p in data["points"]), tuple(tuple(c) for c in data["cells"]), data.get("depth", 0))
