"""The Donaldson functional, J-norm, stability threshold and test configurations.

All values are exact rationals. The threshold ``delta`` is only ever computed on
a fixed subdivision; refining the subdivision gives a nonincreasing sequence of
upper bounds for the infimum over all rational PL convex functions.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import lp
from .errors import AffineInput, DegenerateTestConfiguration, FutakiNonzero, NotConvex, ToricStabError
from .plconvex import AffineFunction, MaxAffinePL, MeshPL, as_pl, coordinate, crease_refine, hinge_rows, is_convex
from .polytope import Facet, barycenter, integrate, mean_scalar, subdivide, volume
from .rational import Q, dot, primitive, qstr


def donaldson_L(P, f):
    """``L(f) = int_{dP} f dsigma - S_hat int_P f dx``; linear in ``f``."""
    return integrate(P, f, "boundary") - mean_scalar(P) * integrate(P, f, "interior")


@dataclass(frozen=True)
class FutakiCharacter:
    values: tuple

    @property
    def zero(self):
        return all(v == 0 for v in self.values)

    def destabilizer(self):
        """Affine function with negative L, or ``None`` when the character vanishes."""
        if self.zero:
            return None
        return AffineFunction(tuple(-((v > 0) - (v < 0)) for v in self.values), 0)

    def to_json(self):
        return {"futaki": [qstr(v) for v in self.values], "futaki_zero": self.zero}


def futaki_character(P):
    return FutakiCharacter(tuple(donaldson_L(P, coordinate(i, P.dim)) for i in range(P.dim)))


def _require_convex(f):
    if isinstance(f, MeshPL):
        verdict = is_convex(f)
        if not verdict:
            raise NotConvex(f"function is not convex across face {verdict.face}")


def j_norm_detail(P, f):
    """J-norm together with an optimal slope ``a`` of the affine shift."""
    f = as_pl(f, P.dim)
    _require_convex(f)
    mesh = crease_refine(f, P)
    n = P.dim
    bary = barycenter(P)
    mean = integrate(P, mesh) / volume(P)
    # variables (a, t): minimize <a, bary> - t  s.t.  f(v) + <a, v> - t >= 0
    rows = tuple(tuple(v) + (Fraction(-1),) for v in mesh.subdivision.points)
    rhs = tuple(-val for val in mesh.values)
    out = lp.solve(lp.LinearProgram(tuple(bary) + (Fraction(-1),), rows, rhs))
    if not isinstance(out, lp.Optimal):  # pragma: no cover - the LP is always bounded and feasible
        raise ToricStabError(f"J-norm linear program ended {out.status}")
    return mean + out.value, tuple(out.x[:n])


def j_norm(P, f):
    """``inf_l { mean_P(f + l) - min_P(f + l) }`` over affine ``l``, exactly."""
    return j_norm_detail(P, f)[0]


def stability_ratio(P, f):
    jn = j_norm(P, f)
    if jn == 0:
        raise AffineInput("f is affine on P, so its J-norm vanishes")
    return donaldson_L(P, f) / jn


def _require_futaki_zero(P):
    fut = futaki_character(P)
    if not fut.zero:
        ell = fut.destabilizer()
        raise FutakiNonzero(
            f"Futaki character {tuple(map(qstr, fut.values))} is nonzero; L({ell.a}) = {donaldson_L(P, ell)} < 0",
            futaki=fut,
            destabilizer=ell,
        )
    return fut


def _functional_weights(P, mesh):
    """Per-point weights of the boundary and interior integrals of a mesh function."""
    n = P.dim
    npts = len(mesh.points)
    wb = [Fraction(0)] * npts
    wi = [Fraction(0)] * npts
    for face, _, _, mass in mesh.boundary_faces(P):
        share = mass / len(face)
        for v in face:
            wb[v] += share
    for cell, vol in zip(mesh.cells, mesh.volumes()):
        share = vol / (n + 1)
        for v in cell:
            wi[v] += share
    return wb, wi


def delta_on_subdivision(P, mesh):
    """Minimum of ``L`` over convex mesh functions normalised to ``||f||_J = 1``.

    The affine gauge is fixed by ``f >= 0`` and ``f(barycenter) = 0``: then the
    zero shift attains the infimum in the J-norm, whose value reduces to the
    mean of ``f``, which is pinned to 1.
    """
    _require_futaki_zero(P)
    npts = len(mesh.points)
    wb, wi = _functional_weights(P, mesh)
    S = mean_scalar(P)
    objective = tuple(b - S * i for b, i in zip(wb, wi))

    ineq = []
    for row in hinge_rows(mesh):
        dense = [Fraction(0)] * npts
        for v, w in row.items():
            dense[v] = w
        ineq.append(tuple(dense))
    for v in range(npts):
        ineq.append(tuple(Fraction(int(j == v)) for j in range(npts)))

    c, lam = mesh.locate(barycenter(P))
    gauge = [Fraction(0)] * npts
    for w, v in zip(lam, mesh.cells[c]):
        gauge[v] += w
    eq = (tuple(gauge), tuple(wi))
    eq_rhs = (Fraction(0), volume(P))

    out = lp.solve(lp.LinearProgram(objective, tuple(ineq), (Fraction(0),) * len(ineq), eq, eq_rhs))
    if isinstance(out, lp.Infeasible):
        raise ToricStabError("no convex function on this subdivision satisfies the gauge constraints")
    if isinstance(out, lp.Unbounded):  # pragma: no cover - feasible set is compact
        raise ToricStabError("threshold linear program is unbounded")
    return out.value, MeshPL(mesh, out.x)


VERDICTS = ("UnstableAffine", "DestabilizerFound", "NoDestabilizerUpToDepth")


@dataclass
class StabilityReport:
    futaki: FutakiCharacter
    delta_by_depth: list = field(default_factory=list)
    verdict: str = "NoDestabilizerUpToDepth"
    witness: object = None
    witness_L: Fraction = None
    witness_jnorm: Fraction = None

    @property
    def futaki_zero(self):
        return self.futaki.zero

    def to_json(self):
        out = self.futaki.to_json()
        out["delta"] = [{"depth": k, "value": qstr(v)} for k, v in self.delta_by_depth]
        out["verdict"] = self.verdict
        if isinstance(self.witness, AffineFunction):
            out["witness"] = {"type": "affine", **self.witness.to_json()}
        elif self.witness is not None:
            out["witness"] = self.witness.to_json()
        else:
            out["witness"] = None
        out["witness_L"] = None if self.witness_L is None else qstr(self.witness_L)
        out["witness_jnorm"] = None if self.witness_jnorm is None else qstr(self.witness_jnorm)
        return out


def _delta_at_depth(args):
    P, depth = args
    return delta_on_subdivision(P, subdivide(P, depth))


def delta_scan(P, max_depth, workers=1):
    fut = futaki_character(P)
    report = StabilityReport(fut)
    if not fut.zero:
        ell = fut.destabilizer()
        report.verdict = "UnstableAffine"
        report.witness = ell
        report.witness_L = donaldson_L(P, ell)
        report.witness_jnorm = Fraction(0)
        return report
    jobs = [(P, k) for k in range(max_depth + 1)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_delta_at_depth, jobs))
    else:
        results = [_delta_at_depth(job) for job in jobs]
    best = None
    for k, (value, minimizer) in enumerate(results):
        report.delta_by_depth.append((k, value))
        if best is None or value < best[0]:
            best = (value, minimizer)
    report.witness = best[1]
    report.witness_L = donaldson_L(P, best[1])
    report.witness_jnorm = j_norm(P, best[1])
    report.verdict = "DestabilizerFound" if best[0] <= 0 else "NoDestabilizerUpToDepth"
    return report


def simple_pl(a, c):
    """The single-crease function ``max(0, <a, x> - c)``."""
    n = len(a)
    return MaxAffinePL((AffineFunction((0,) * n, 0), AffineFunction(tuple(a), -Q(c))))


def simple_pl_scan(P, crease_normals, offsets):
    """Smallest stability ratio over single-crease functions; ``None`` if none qualifies.

    ``offsets`` is either one list used for every normal or a list of lists,
    one per normal. Candidates whose crease misses the interior are skipped.
    """
    _require_futaki_zero(P)
    offsets = list(offsets)
    if offsets and not isinstance(offsets[0], (list, tuple)):
        offsets = [offsets] * len(crease_normals)
    best = None
    for a, cs in zip(crease_normals, offsets):
        for c in cs:
            f = simple_pl(a, c)
            jn = j_norm(P, f)
            if jn == 0:
                continue
            ratio = donaldson_L(P, f) / jn
            if best is None or ratio < best[1]:
                best = (f, ratio)
    return best


@dataclass(frozen=True)
class TestConfiguration:
    """Facets of the big polytope in dimension n + 1 and the linearity cells of ``f``."""

    __test__ = False  # not a pytest class

    dim: int
    facets: tuple
    cells: tuple
    top: Fraction

    def contains(self, point):
        return all(f(point) >= 0 for f in self.facets)

    def to_json(self):
        return {
            "dim": self.dim,
            "facets": [{"normal": list(f.normal), "offset": qstr(f.offset)} for f in self.facets],
            "cells": [[[qstr(c) for c in v] for v in cell] for cell in self.cells],
        }


def build_test_config(P, f):
    """Big polytope ``{(u, s) : f(u) <= s <= max_P f}`` and the induced cells of ``P``."""
    if isinstance(f, MeshPL):
        f = f.to_max_affine()
    f = as_pl(f, P.dim).canonical(P)
    if len(f.pieces) == 1 and not any(f.pieces[0].a):
        raise DegenerateTestConfiguration("constant f gives a big polytope of height zero")
    top = max(f(v) for v in P.vertices)
    facets = [Facet(fac.normal + (0,), fac.offset) for fac in P.facets]
    facets.append(Facet((0,) * P.dim + (-1,), -top))
    for piece in f.pieces:
        normal, factor = primitive(tuple(-a for a in piece.a) + (Fraction(1),))
        facets.append(Facet(normal, piece.b * factor))
    regions = f.regions(P)
    cells = tuple(tuple(regions[i]) for i in sorted(regions))
    return TestConfiguration(P.dim + 1, tuple(facets), cells, top)
