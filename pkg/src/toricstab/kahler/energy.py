"""Toric energy functionals evaluated by graded quadrature.

``VE(u) = -int_P u`` and ``VM(u) = -int_P log det(u_ij) + L(u)`` with
``L(u) = int_{dP} u dsigma - S_hat int_P u``. Every value is computed on the
configured rule and on a coarser companion rule (half the grading levels, two
fewer Gauss points); their difference is the reported error estimate.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import NotNormalized, SingularHessian
from ..plconvex import MeshPL, as_pl, crease_refine, tilde
from ..polytope import mean_scalar, volume
from ..stability import donaldson_L
from .curvature import abreu_scalar_batch, clamp_to_margin
from .potential import DEFAULT_GRID, GUILLEMIN_COEFFICIENT, Polynomial, SymplecticPotential, minimizer
from .quadrature import build_plan, integrate_blocks


def _plans(P, grid, mesh=None):
    fine = build_plan(P, mesh, grid.quadrature, grid.order, grid.grading, grid.max_nodes)
    coarse = build_plan(P, mesh, max(1, grid.quadrature // 2), max(1, grid.order - 2), grid.grading, grid.max_nodes)
    return fine, coarse


def _values(f, block):
    """Values of a potential, polynomial, PL or constant function at the nodes of a block."""
    if isinstance(f, SymplecticPotential):
        return f.value(block.x, block.ell)
    if isinstance(f, Polynomial):
        return f.value(block.x)
    if isinstance(f, (int, float, Fraction)):
        return np.full(block.w.shape, float(f))
    return f.values_float(block.x)


def _ray_values(u, pl, t, plan):
    """Node values of ``u + t * pl`` where ``pl`` is linear on the plan's cells."""
    if pl is None or t == 0:
        return lambda b: u.value(b.x, b.ell)
    vals = [float(v) for v in pl.values]
    return lambda b: u.value(b.x, b.ell) + t * b.interpolate(vals)


def _logdet(u):
    def fn(b):
        ld = u.logdet(b.x, b.ell)
        if not np.isfinite(ld).all():
            k = int(np.argmax(~np.isfinite(ld)))
            raise SingularHessian(f"Hessian is not positive definite at {b.x[k].tolist()}")
        return ld

    return fn


@dataclass(frozen=True)
class EnergyReport:
    """Energies of one potential. ``VM = nonlinear_term + linear_term``; ``M = VM / V``."""

    E: float
    M: float
    VM: float
    nonlinear_term: float
    linear_term: float
    error_estimate: float
    volume: float
    nodes: int = field(default=0, compare=False)

    def to_json(self):
        return {
            "E": self.E,
            "M": self.M,
            "VM": self.VM,
            "nonlinear_term": self.nonlinear_term,
            "linear_term": self.linear_term,
            "error_estimate": self.error_estimate,
            "volume": self.volume,
            "nodes": self.nodes,
        }


def _energies(P, u, plan, S, workers, pl=None, t=0.0):
    values = _ray_values(u, pl, t, plan)
    int_u = integrate_blocks(values, plan.interior, workers)
    bd_u = integrate_blocks(values, plan.boundary, workers)
    nonlinear = -integrate_blocks(_logdet(u), plan.interior, workers)
    linear = bd_u - S * int_u
    return int_u, nonlinear, linear


def energy_M(P, u, grid=DEFAULT_GRID, mesh=None, workers=1, pl=None, t=0.0):
    """K-energy report of ``u`` (or of ``u + t * pl`` for a function ``pl`` linear on ``mesh``)."""
    if pl is not None and mesh is None:
        mesh = pl.subdivision
    V = float(volume(P))
    S = float(mean_scalar(P))
    fine, coarse = _plans(P, grid, mesh)
    int_u, nonlinear, linear = _energies(P, u, fine, S, workers, pl, t)
    c_int, c_non, c_lin = _energies(P, u, coarse, S, workers, pl, t)
    VM = nonlinear + linear
    err = max(abs(VM - (c_non + c_lin)), abs(int_u - c_int) / V) + 1e-12 * (1.0 + abs(VM))
    return EnergyReport(-int_u / V, VM / V, VM, nonlinear, linear, err, V, fine.size)


def energy_E(P, u, grid=DEFAULT_GRID, workers=1):
    """``E = -(1/V) int_P u``."""
    fine, _ = _plans(P, grid)
    return -integrate_blocks(lambda b: _values(u, b), fine.interior, workers) / float(volume(P))


def integral(P, f, grid=DEFAULT_GRID, region="interior", workers=1):
    """Quadrature integral of a potential (or PL / polynomial function) over ``P`` or ``dP``."""
    fine, _ = _plans(P, grid)
    blocks = fine.interior if region == "interior" else fine.boundary
    return integrate_blocks(lambda b: _values(f, b), blocks, workers)


def linear_functional(P, f, grid=DEFAULT_GRID, workers=1):
    """``L(f)`` by quadrature; for PL ``f`` this agrees with the exact value."""
    S = float(mean_scalar(P))
    return integral(P, f, grid, "boundary", workers) - S * integral(P, f, grid, "interior", workers)


def check_normalized(u, tol=1e-8):
    """Return the normalisation point; raise :class:`NotNormalized` unless ``u`` is normalised there."""
    x0 = np.array(u.normalized_at) if u.normalized_at is not None else minimizer(u)[0]
    g = float(np.linalg.norm(u.gradient(x0)[0]))
    v = float(u.value(x0)[0])
    if g > tol or abs(v) > tol:
        raise NotNormalized(f"gradient {g:.3g} and value {v:.3g} at the minimizer are not both zero")
    return x0


def j_proxy(P, u, grid=DEFAULT_GRID, workers=1):
    """``(1/V) int_P u`` for a normalised potential."""
    check_normalized(u)
    return -energy_E(P, u, grid, workers)


# -- the comparison functionals L0 and M0 ---------------------------------

_A0_CACHE = {}

M0_LINEAR_WEIGHT = 1.0 / GUILLEMIN_COEFFICIENT


def _reference_curvature(P, u0, grid, plan):
    key = (u0, grid, id(plan))
    cached = _A0_CACHE.get(key)
    if cached is not None and cached[0] is plan:
        return cached[1]
    out = []
    for b in plan.interior:
        x = clamp_to_margin(P, b.x, b.ell, grid.margin)
        out.append(abreu_scalar_batch(u0, x, grid, check_margin=False))
    if len(_A0_CACHE) > 8:
        _A0_CACHE.clear()
    _A0_CACHE[key] = (plan, out)
    return out


def reference_curvature_mean(P, u0, grid=DEFAULT_GRID):
    """Volume average of ``A0 = S(u0)`` over the quadrature nodes."""
    fine, _ = _plans(P, grid)
    A0 = _reference_curvature(P, u0, grid, fine)
    idx = {id(b): i for i, b in enumerate(fine.interior)}
    return integrate_blocks(lambda b: A0[idx[id(b)]], fine.interior) / float(volume(P))


def _L0_on(P, u0, f, grid, plan, workers):
    A0 = _reference_curvature(P, u0, grid, plan)
    idx = {id(b): i for i, b in enumerate(plan.interior)}
    bd = integrate_blocks(lambda b: _values(f, b), plan.boundary, workers)
    inner = integrate_blocks(lambda b: A0[idx[id(b)]] * _values(f, b), plan.interior, workers)
    return bd - inner


def L0(P, u0, f, grid=DEFAULT_GRID, workers=1):
    """``L0(f) = int_{dP} f dsigma - int_P A0 f`` with ``A0 = S(u0)``."""
    fine, _ = _plans(P, grid)
    return _L0_on(P, u0, f, grid, fine, workers)


def M0(P, u0, u, grid=DEFAULT_GRID, workers=1, linear_weight=M0_LINEAR_WEIGHT):
    """``(1/V) (-int_P log det(u_ij) + w L0(u))`` with ``w = linear_weight``.

    With the Guillemin coefficient 1/2 and ``S = -(1/2) sum d_i d_j u^{ij}``,
    integration by parts gives ``int_P u0^{ij} q_ij = 2 L0(q)``, so ``u0`` is a
    critical point, and by convexity the minimizer, exactly when ``w = 2``.
    ``w = 1`` reproduces the unweighted formula, for which ``u0`` is not critical.
    """
    fine, _ = _plans(P, grid)
    nonlinear = -integrate_blocks(_logdet(u), fine.interior, workers)
    return (nonlinear + linear_weight * _L0_on(P, u0, u, grid, fine, workers)) / float(volume(P))


# -- rays --------------------------------------------------------------------


@dataclass(frozen=True)
class RayResult:
    """``VM(u + t f~)`` along a ray, its least-squares slope and the exact ``L(f)``."""

    rows: tuple
    slope: float
    L: Fraction
    reports: tuple

    def to_json(self):
        return {
            "rows": [{"t": t, "VM": m} for t, m in self.rows],
            "slope": self.slope,
            "L": f"{self.L.numerator}/{self.L.denominator}",
        }


def ray_energy(P, u, f, t_list, grid=DEFAULT_GRID, workers=1):
    """Energies along the ray ``u + t * f~`` where ``f~`` is ``f`` recentred to mean zero.

    Quadrature cells follow the creases of ``f``, so the Hessian of the ray
    potential equals that of ``u`` at every node.
    """
    t_list = [float(t) for t in t_list]
    if any(t < 0 for t in t_list):
        raise ValueError("ray parameters must be non-negative")
    pl = f if isinstance(f, MeshPL) else crease_refine(as_pl(f, P.dim), P)
    ft = tilde(P, pl)
    reports = tuple(energy_M(P, u, grid, ft.subdivision, workers, ft, t) for t in t_list)
    rows = tuple((t, r.VM) for t, r in zip(t_list, reports))
    if len(rows) >= 2:
        slope = float(np.polyfit(np.array(t_list), np.array([r.VM for r in reports]), 1)[0])
    else:
        slope = float("nan")
    return RayResult(rows, slope, donaldson_L(P, f), reports)
