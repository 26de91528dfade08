"""Graded Gauss-Legendre quadrature on simplicial meshes of a polytope.

Each cell is a simplex, parametrised by collapsed (conical product) coordinates
over the unit cube. Every barycentric coordinate is then a product of factors
``r_i`` and ``1 - r_i``, so a facet function vanishing on a face of the cell
factors into one-dimensional functions that vanish at a cube face. Grading the
1D rule geometrically towards both ends resolves the resulting ``log``
singularities to near machine precision.

Facet values at nodes are computed from the barycentric coordinates and the
exact facet values at the cell vertices. This keeps ``l_k`` relatively accurate
even at nodes ``1e-20`` away from a facet, where ``x`` itself rounds onto it.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import QuadratureBudgetExceeded
from ..polytope import barycenter


@lru_cache(maxsize=None)
def graded_rule(levels, order, ratio=0.25):
    """Composite Gauss-Legendre rule on [0, 1] graded towards both ends.

    Returns ``(r, one_minus_r, weights)``; the complement is computed directly
    on the upper half so that it keeps full relative precision.
    """
    g, w = np.polynomial.legendre.leggauss(order)
    g = 0.5 * (g + 1.0)
    w = 0.5 * w
    breaks = [0.0] + [0.5 * ratio**k for k in range(levels, 0, -1)] + [0.5]
    lo_r, lo_w = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        lo_r.append(a + (b - a) * g)
        lo_w.append((b - a) * w)
    lo_r = np.concatenate(lo_r)
    lo_w = np.concatenate(lo_w)
    r = np.concatenate([lo_r, (1.0 - lo_r)[::-1]])
    c = np.concatenate([1.0 - lo_r, lo_r[::-1]])
    wts = np.concatenate([lo_w, lo_w[::-1]])
    for arr in (r, c, wts):
        arr.setflags(write=False)
    return r, c, wts


@lru_cache(maxsize=None)
def simplex_rule(d, levels, order, ratio=0.25):
    """Barycentric nodes ``(N, d + 1)`` and weights on the standard d-simplex.

    The weights sum to ``1 / d!``, the volume of the standard simplex.
    """
    if d == 0:
        return np.ones((1, 1)), np.ones(1)
    r, c, w = graded_rule(levels, order, ratio)
    grids = np.meshgrid(*([np.arange(len(r))] * d), indexing="ij")
    idx = [gi.ravel() for gi in grids]
    lam = np.empty((idx[0].size, d + 1))
    weight = np.ones(idx[0].size)
    rest = np.ones(idx[0].size)
    for i in range(d):
        ri, ci = r[idx[i]], c[idx[i]]
        lam[:, i + 1] = rest * ri
        weight *= w[idx[i]] * ci ** (d - 1 - i)
        rest = rest * ci
    lam[:, 0] = rest
    lam.setflags(write=False)
    weight.setflags(write=False)
    return lam, weight


@dataclass(frozen=True)
class Block:
    """Quadrature nodes of one cell (or one boundary face).

    ``lam`` are barycentric coordinates with respect to ``verts`` (point indices
    into the plan's point list); ``facet`` is the facet containing a boundary
    face, ``None`` for interior cells.
    """

    verts: tuple
    lam: np.ndarray
    x: np.ndarray
    ell: np.ndarray
    w: np.ndarray
    facet: int = None

    def interpolate(self, vertex_values):
        """Values at the nodes of the function linear on the cell."""
        return self.lam @ np.asarray([vertex_values[v] for v in self.verts], dtype=float)


@dataclass(frozen=True)
class Plan:
    points: tuple
    interior: tuple
    boundary: tuple
    levels: int
    order: int

    @property
    def size(self):
        return sum(b.w.size for b in self.interior) + sum(b.w.size for b in self.boundary)


def _block(P, points, verts, d, levels, order, ratio, scale, facet=None):
    lam, ref_w = simplex_rule(d, levels, order, ratio)
    coords = [points[v] for v in verts]
    V = np.array([[float(c) for c in p] for p in coords])
    Lv = np.array([[float(f(p)) for f in P.facets] for p in coords])
    w = ref_w * (math.factorial(d) * float(scale))
    ell = lam @ Lv
    if facet is not None:
        ell[:, facet] = 0.0
    return Block(tuple(verts), lam, lam @ V, ell, w, facet)


def _star_cells(P):
    """Cones from the barycenter over the boundary faces of the vertex triangulation."""
    tri = P.triangulation
    points = list(tri.points)
    apex = len(points)
    points.append(barycenter(P))
    cells, bfaces = [], []
    n = P.dim
    for face, k, c, mass in tri.boundary_faces(P):
        cells.append(((apex,) + tuple(face), mass * P.ell(k, points[apex]) / n))
        bfaces.append((tuple(face), k, mass))
    return points, cells, bfaces


def _mesh_cells(P, mesh):
    cells = [(tuple(c), vol) for c, vol in zip(mesh.cells, mesh.volumes())]
    bfaces = [(tuple(face), k, mass) for face, k, _, mass in mesh.boundary_faces(P)]
    return list(mesh.points), cells, bfaces


def build_plan(P, mesh=None, levels=14, order=10, ratio=0.25, max_nodes=None):
    """Nodes and weights for the interior and for the boundary measure of ``P``.

    Without ``mesh`` the cells are cones from the barycenter; with a
    subdivision (e.g. the crease mesh of a PL function) its cells are used.
    """
    key = (P, None if mesh is None else mesh, levels, order, ratio)
    plan = _PLAN_CACHE.get(key)
    if plan is not None:
        return plan
    n = P.dim
    points, cells, bfaces = _star_cells(P) if mesh is None else _mesh_cells(P, mesh)
    per_cell = len(graded_rule(levels, order, ratio)[0]) ** n
    per_face = len(graded_rule(levels, order, ratio)[0]) ** (n - 1)
    total = per_cell * len(cells) + per_face * len(bfaces)
    if max_nodes is not None and total > max_nodes:
        raise QuadratureBudgetExceeded(f"{total} quadrature nodes exceed the budget of {max_nodes}")
    interior = tuple(_block(P, points, verts, n, levels, order, ratio, vol) for verts, vol in cells)
    boundary = tuple(_block(P, points, face, n - 1, levels, order, ratio, mass, k) for face, k, mass in bfaces)
    plan = Plan(tuple(points), interior, boundary, levels, order)
    if len(_PLAN_CACHE) > 16:
        _PLAN_CACHE.clear()
    _PLAN_CACHE[key] = plan
    return plan


_PLAN_CACHE = {}


def block_sums(fn, blocks, workers=1):
    """``[sum(w * fn(block))]`` per block, in block order."""

    def one(b):
        return float(np.dot(b.w, fn(b)))

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, blocks))
    return [one(b) for b in blocks]


def integrate_blocks(fn, blocks, workers=1):
    """Correctly rounded sum of the per-block integrals.

    ``math.fsum`` makes the total independent of the order in which blocks
    finish, hence of the worker count.
    """
    return math.fsum(block_sums(fn, blocks, workers))
