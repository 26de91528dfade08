"""Symplectic potentials ``u = (1/2) sum_k l_k log l_k + polynomial + affine``.

Values and derivatives are evaluated in double precision on batches of points.
Callers that know the facet values ``l_k(x)`` more accurately than ``x`` itself
(quadrature nodes next to a facet) may pass them in as ``ell``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.special import xlogy

from .. import kernels
from ..errors import DimensionMismatch, NewtonDivergence, TooCloseToBoundary
from ..plconvex import AffineFunction
from ..polytope import DelzantPolytope, barycenter
from ..rational import Q, det, qstr

GUILLEMIN_COEFFICIENT = 0.5


@dataclass(frozen=True)
class Polynomial:
    """Sparse polynomial: sorted tuple of ``(exponents, coefficient)``."""

    terms: tuple = ()

    def __post_init__(self):
        acc = {}
        for exps, c in self.terms:
            exps = tuple(int(e) for e in exps)
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            acc[exps] = acc.get(exps, Fraction(0)) + Q(c)
        object.__setattr__(self, "terms", tuple(sorted((e, c) for e, c in acc.items() if c != 0)))

    @classmethod
    def from_dict(cls, coeffs):
        return cls(tuple(coeffs.items()))

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        return Polynomial(self.terms + other.terms)

    def scale(self, q):
        return Polynomial(tuple((e, c * Q(q)) for e, c in self.terms))

    @property
    def degree(self):
        return max((sum(e) for e, _ in self.terms), default=0)

    def _monomials(self, x, exps, shift):
        out = np.ones(x.shape[0])
        coef = 1.0
        for i, e in enumerate(exps):
            e2 = e - shift.get(i, 0)
            if e2 < 0:
                return None
            for k in range(shift.get(i, 0)):
                coef *= e - k
            if e2:
                out = out * x[:, i] ** e2
        return coef * out

    def _derivative(self, x, shift):
        total = np.zeros(x.shape[0])
        for exps, c in self.terms:
            m = self._monomials(x, exps, shift)
            if m is not None:
                total = total + float(c) * m
        return total

    def value(self, x):
        return self._derivative(x, {})

    def gradient(self, x):
        n = x.shape[1]
        return np.stack([self._derivative(x, {i: 1}) for i in range(n)], axis=1)

    def hessian(self, x):
        n = x.shape[1]
        h = np.zeros((x.shape[0], n, n))
        for i in range(n):
            for j in range(i, n):
                shift = {i: 2} if i == j else {i: 1, j: 1}
                h[:, i, j] = h[:, j, i] = self._derivative(x, shift)
        return h

    def to_json(self):
        return [{"exponents": list(e), "coeff": qstr(c)} for e, c in self.terms]

    @classmethod
    def from_json(cls, data):
        return cls(tuple((tuple(t["exponents"]), Q(t["coeff"])) for t in data))


def _exact(x):
    """Exact rational image of a float (or pass-through for rationals)."""
    return Fraction(float(x)) if isinstance(x, (float, np.floating)) else Q(x)


@dataclass(frozen=True)
class SymplecticPotential:
    polytope: DelzantPolytope
    smooth: Polynomial = field(default_factory=Polynomial)
    affine: AffineFunction = None
    normalized_at: tuple = None

    guillemin_coefficient = GUILLEMIN_COEFFICIENT

    def __post_init__(self):
        n = self.polytope.dim
        if self.affine is None:
            object.__setattr__(self, "affine", AffineFunction((0,) * n, 0))
        if self.affine.dim != n:
            raise DimensionMismatch("affine part has the wrong dimension")
        if any(len(e) != n for e, _ in self.smooth.terms):
            raise DimensionMismatch("polynomial exponents have the wrong length")

    # -- facet data ----------------------------------------------------------

    @property
    def dim(self):
        return self.polytope.dim

    @property
    def normals(self):
        return np.array([f.normal for f in self.polytope.facets], dtype=float)

    @property
    def offsets(self):
        return np.array([float(f.offset) for f in self.polytope.facets])

    def ell(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return x @ self.normals.T - self.offsets

    def _prep(self, x, ell):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.dim:
            raise DimensionMismatch(f"points of dimension {x.shape[1]} for a potential in dimension {self.dim}")
        return x, (self.ell(x) if ell is None else ell)

    # -- evaluation ----------------------------------------------------------

    def value(self, x, ell=None):
        x, ell = self._prep(x, ell)
        a = np.array([float(c) for c in self.affine.a])
        out = GUILLEMIN_COEFFICIENT * xlogy(ell, ell).sum(axis=1) + x @ a + float(self.affine.b)
        if self.smooth:
            out = out + self.smooth.value(x)
        return out

    def gradient(self, x, ell=None):
        x, ell = self._prep(x, ell)
        g = GUILLEMIN_COEFFICIENT * (np.log(ell) + 1.0) @ self.normals
        g = g + np.array([float(c) for c in self.affine.a])
        if self.smooth:
            g = g + self.smooth.gradient(x)
        return g

    def hessian(self, x, ell=None):
        x, ell = self._prep(x, ell)
        h = kernels.guillemin_hessians(ell, self.normals)
        if self.smooth:
            h = h + self.smooth.hessian(x)
        return h

    def logdet(self, x, ell=None):
        """``log det`` of the Hessian; NaN where it is not positive definite."""
        x, ell = self._prep(x, ell)
        if not self.smooth:
            subsets, sq = _cauchy_binet_data(self.polytope)
            return kernels.guillemin_logdet(ell, subsets, sq)
        return kernels.sym_logdet(self.hessian(x, ell))

    def __call__(self, x):
        return float(self.value(np.asarray([x], dtype=float))[0])

    # -- algebra -------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, AffineFunction):
            return SymplecticPotential(self.polytope, self.smooth, self.affine + other)
        if isinstance(other, Polynomial):
            return SymplecticPotential(self.polytope, self.smooth + other, self.affine)
        if isinstance(other, (int, Fraction)):
            return SymplecticPotential(self.polytope, self.smooth, self.affine + Q(other))
        return NotImplemented

    def without_affine(self):
        return SymplecticPotential(self.polytope, self.smooth)

    # -- serialisation -------------------------------------------------------

    def to_json(self):
        out = {
            "polytope": self.polytope.to_json(),
            "smooth_poly": self.smooth.to_json(),
            "affine": self.affine.to_json(),
        }
        if self.normalized_at is not None:
            out["normalized_at"] = [float(c) for c in self.normalized_at]
        return out

    @classmethod
    def from_json(cls, data, polytope=None):
        P = polytope if polytope is not None else DelzantPolytope.from_json(data["polytope"])
        smooth = Polynomial.from_json(data.get("smooth_poly", []))
        aff = data.get("affine")
        affine = AffineFunction.from_json(aff) if aff else None
        at = data.get("normalized_at")
        return cls(P, smooth, affine, None if at is None else tuple(float(c) for c in at))


def _cauchy_binet_data(P):
    cache = P.__dict__.get("_cauchy_binet")
    if cache is None:
        subsets, sq = [], []
        for S in combinations(range(len(P.facets)), P.dim):
            d = det([P.facets[k].normal for k in S])
            if d:
                subsets.append(S)
                sq.append(float(d * d))
        cache = (tuple(subsets), np.array(sq))
        P.__dict__["_cauchy_binet"] = cache
    return cache


def guillemin(P):
    """The canonical potential ``(1/2) sum_k l_k log l_k``."""
    return SymplecticPotential(P)


def potential_from_json(data, polytope=None):
    return SymplecticPotential.from_json(data, polytope)


@dataclass(frozen=True)
class GridSpec:
    """Numerical parameters for the analytic side.

    ``fd_step`` is the finite-difference step on the edge of the margin band;
    deeper inside it grows in proportion to ``min_k l_k(x)``. ``quadrature`` is the number
    of geometric grading levels towards each end of every collapsed coordinate
    and ``order`` the Gauss-Legendre order per graded interval.
    """

    margin: float = 1e-2
    spacing: float = 0.1
    fd_step: float = 5e-4
    quadrature: int = 14
    order: int = 10
    grading: float = 0.25
    max_nodes: int = 4_000_000

    def __post_init__(self):
        if not self.margin > 0:
            raise ValueError("margin must be positive")
        if not 0 < self.fd_step < self.margin / 4:
            raise ValueError("need 0 < fd_step < margin / 4")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        if self.quadrature < 1 or self.order < 1:
            raise ValueError("quadrature depth and order must be positive")
        if not 0 < self.grading < 0.5:
            raise ValueError("grading ratio must lie in (0, 1/2)")


DEFAULT_GRID = GridSpec()


def min_ell(u, x):
    return u.ell(x).min(axis=1)


def hessian(u, x, grid=None):
    """Hessian of ``u`` at a single interior point, as an ``n x n`` array."""
    x = np.asarray(x, dtype=float)
    margin = 0.0 if grid is None else grid.margin
    m = float(min_ell(u, x)[0])
    if not m > margin:
        raise TooCloseToBoundary(f"min_k l_k(x) = {m:.3g} is not above the margin {margin:g}")
    return u.hessian(x)[0]


def is_positive_definite(h, tol=1e-12):
    """Leading principal minors test on a batch of symmetric matrices."""
    h = np.asarray(h, dtype=float)
    if h.ndim == 2:
        h = h[None]
    ok = np.ones(h.shape[0], dtype=bool)
    for k in range(1, h.shape[1] + 1):
        ok &= np.linalg.det(h[:, :k, :k]) > tol
    return ok


def minimizer(u, start=None, tol=1e-13, max_iter=200):
    """Interior critical point of ``u`` by damped Newton iteration.

    Returns ``(x0, trace)`` where ``trace`` lists ``(iteration, |grad|, step)``.
    """
    P = u.polytope
    x = np.array([float(c) for c in (barycenter(P) if start is None else start)])
    trace = []
    g = u.gradient(x)[0]
    for it in range(max_iter):
        gn = float(np.linalg.norm(g))
        if gn <= tol:
            return x, trace
        step = np.linalg.solve(u.hessian(x)[0], g)
        dec = float(g @ step)
        if not dec > 0:
            raise NewtonDivergence("Hessian is not positive definite along the Newton path", trace=tuple(trace))
        f0 = float(u.value(x)[0])
        alpha = 1.0
        while True:
            y = x - alpha * step
            if (u.ell(y) > 0).all():
                gy = u.gradient(y)[0]
                if float(u.value(y)[0]) <= f0 - 1e-4 * alpha * dec or np.linalg.norm(gy) < gn:
                    break
            alpha *= 0.5
            if alpha < 1e-30:
                raise NewtonDivergence("line search failed", trace=tuple(trace))
        trace.append((it, gn, alpha))
        if np.array_equal(y, x):
            return x, trace
        x, g = y, gy
    raise NewtonDivergence(f"no convergence in {max_iter} iterations", trace=tuple(trace))


def normalize(u, at=None):
    """Subtract the tangent plane of ``u`` at its minimizer (or at the point ``at``).

    The result has value 0 and gradient 0 at that point. With ``at`` omitted the
    point is found by :func:`minimizer`, which makes the result the unique
    normalisation with interior minimum 0.
    """
    if at is None:
        x0, _ = minimizer(u)
    else:
        x0 = np.array([float(c) for c in at])
        if not (u.ell(x0) > 0).all():
            raise TooCloseToBoundary("normalisation point is not interior")
    g = u.gradient(x0)[0]
    v = float(u.value(x0)[0])
    a = tuple(_exact(-c) for c in g)
    b = _exact(-(v - float(g @ x0)))
    plane = AffineFunction(a, b)
    return SymplecticPotential(u.polytope, u.smooth, u.affine + plane, tuple(float(c) for c in x0))
