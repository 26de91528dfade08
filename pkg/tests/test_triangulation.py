from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

import oracles
from toricstab import catalog
from toricstab.errors import DegeneratePolytope, InvalidSubdivision, PointOutsideP
from toricstab.triangulation import SimplicialSubdivision, place


def test_square_with_centre():
    pts = [(0, 0), (0, 1), (1, 0), (1, 1), (Fraction(1, 2), Fraction(1, 2))]
    pts = [tuple(map(Fraction, p)) for p in pts]
    cells = place(pts)
    assert len(cells) == 4  # the centre is inserted by stellar subdivision
    mesh = SimplicialSubdivision(tuple(pts), tuple(cells))
    assert mesh.volume() == 1
    assert mesh.validate(catalog.square())


def test_collinear_points_rejected():
    with pytest.raises(DegeneratePolytope):
        place([(Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)), (Fraction(2), Fraction(2))])


def test_locate_and_barycentric():
    mesh = catalog.simplex2().triangulation
    c, lam = mesh.locate((Fraction(1, 4), Fraction(1, 4)))
    assert sum(lam) == 1 and all(w >= 0 for w in lam)
    with pytest.raises(PointOutsideP):
        mesh.locate((1, 1))


def test_validate_catches_overlap():
    S = catalog.square()
    pts = ((0, 0), (0, 1), (1, 0), (1, 1))
    bad = SimplicialSubdivision(pts, ((0, 1, 2), (0, 1, 3), (0, 2, 3)))
    with pytest.raises(InvalidSubdivision):
        bad.validate(S)


def test_boundary_masses_sum_to_area():
    for name in ("interval", "square", "simplex2", "hirzebruch_fano", "cube"):
        P = catalog.lookup(name).polytope
        N, O = [f.normal for f in P.facets], [f.offset for f in P.facets]
        total = sum(m for *_, m in P.triangulation.boundary_faces(P))
        assert float(total) == pytest.approx(oracles.boundary_area(N, O), rel=1e-12)


def test_json_round_trip():
    mesh = catalog.square().triangulation
    assert SimplicialSubdivision.from_json(mesh.to_json()) == mesh


@given(st.sets(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=3, max_size=12))
def test_grid_point_sets_triangulate_their_hull(pts):
    pts = sorted(tuple(map(Fraction, p)) for p in pts)
    xs = {p[0] for p in pts}
    ys = {p[1] for p in pts}
    if len(xs) < 2 or len(ys) < 2:
        return
    try:
        cells = place(pts)
    except DegeneratePolytope:
        return
    mesh = SimplicialSubdivision(tuple(pts), tuple(cells))
    assert all(v > 0 for v in mesh.volumes())
    # faces are shared by at most two cells, with the cells on opposite sides
    for face, inc in mesh.faces().items():
        assert len(inc) <= 2
    # the cells tile the convex hull: total volume matches qhull, and no
    # half-integer point lies in the interior of two cells
    assert float(mesh.volume()) == pytest.approx(ConvexHull(np.array(pts, dtype=float)).volume, rel=1e-12)
    for x, y in product(range(4), repeat=2):
        q = (Fraction(2 * x + 1, 2), Fraction(2 * y + 1, 2))
        hits = [c for c in range(len(cells)) if all(w > 0 for w in mesh.barycentric_in(c, q))]
        assert len(hits) <= 1
