"""Legendre duality between the symplectic potential and the complex potential.

``psi`` is never evaluated. Its gradient is the inverse of ``grad u``, found by
Newton solves, and its Hessian at ``y = grad u(x)`` is the Jacobian of that
inverse map, obtained by central differences with Richardson extrapolation.
"""

import numpy as np

from ..errors import NewtonDivergence, TooCloseToBoundary


def gradient_inverse(u, y, start, tol=1e-14, max_iter=100):
    """Solve ``grad u(x) = y`` by damped Newton iteration from ``start``."""
    x = np.array(start, dtype=float)
    y = np.asarray(y, dtype=float)
    trace = []
    r = u.gradient(x)[0] - y
    scale = 1.0 + float(np.abs(y).max())
    for it in range(max_iter):
        rn = float(np.linalg.norm(r))
        trace.append((it, rn))
        step = np.linalg.solve(u.hessian(x)[0], r)
        alpha = 1.0
        while True:
            z = x - alpha * step
            if (u.ell(z) > 0).all():
                rz = u.gradient(z)[0] - y
                if np.linalg.norm(rz) < rn or rn <= tol * scale:
                    break
            alpha *= 0.5
            if alpha < 1e-20:
                if rn <= 1e3 * tol * scale:
                    return x
                raise NewtonDivergence("no decrease of the gradient residual", trace=tuple(trace))
        if rn <= tol * scale and np.linalg.norm(z - x) <= 4e-16 * (1 + np.abs(x).max()):
            return z
        x, r = z, rz
    if float(np.linalg.norm(r)) <= 1e3 * tol * scale:
        return x
    raise NewtonDivergence(f"no convergence in {max_iter} iterations", trace=tuple(trace))


def dual_hessian(u, x, rel_step=1e-3):
    """Hessian of the Legendre dual at ``grad u(x)``, by differencing the inverse gradient map."""
    x = np.asarray(x, dtype=float)
    m = float(u.ell(x).min())
    if not m > 0:
        raise TooCloseToBoundary("point is not interior")
    y = u.gradient(x)[0]
    h_u = u.hessian(x)[0]
    lam_min = float(np.linalg.eigvalsh(h_u)[0])
    h = rel_step * m * lam_min
    n = x.size

    def jac(step):
        cols = []
        for j in range(n):
            e = np.zeros(n)
            e[j] = step
            xp = gradient_inverse(u, y + e, x)
            xm = gradient_inverse(u, y - e, x)
            cols.append((xp - xm) / (2 * step))
        return np.stack(cols, axis=1)

    return (4.0 * jac(h / 2) - jac(h)) / 3.0


def duality_residual(u, x, rel_step=1e-3):
    """``max |Hess psi(grad u(x)) Hess u(x) - I|``."""
    x = np.asarray(x, dtype=float)
    prod = dual_hessian(u, x, rel_step) @ u.hessian(x)[0]
    return float(np.abs(prod - np.eye(x.size)).max())
