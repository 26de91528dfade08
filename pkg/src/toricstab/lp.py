"""Exact rational linear programming.

Problems have the shape ``minimize c.x  subject to  A x >= b,  E x = d`` with
free variables. :func:`solve` runs a two-phase dense tableau simplex with
Bland's rule and returns an outcome carrying a certificate that
:func:`verify` re-checks in exact arithmetic.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from . import kernels
from .errors import DimensionMismatch
from .rational import Q, dot

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple
    ineq_lhs: tuple = ()
    ineq_rhs: tuple = ()
    eq_lhs: tuple = ()
    eq_rhs: tuple = ()

    def __post_init__(self):
        n = len(self.objective)
        object.__setattr__(self, "objective", tuple(map(Q, self.objective)))
        for lhs_name, rhs_name in (("ineq_lhs", "ineq_rhs"), ("eq_lhs", "eq_rhs")):
            lhs = tuple(tuple(map(Q, row)) for row in getattr(self, lhs_name))
            rhs = tuple(map(Q, getattr(self, rhs_name)))
            if len(lhs) != len(rhs):
                raise DimensionMismatch(f"{lhs_name} has {len(lhs)} rows, {rhs_name} has {len(rhs)}")
            if any(len(row) != n for row in lhs):
                raise DimensionMismatch(f"every row of {lhs_name} needs {n} entries")
            object.__setattr__(self, lhs_name, lhs)
            object.__setattr__(self, rhs_name, rhs)

    @property
    def nvars(self):
        return len(self.objective)


@dataclass(frozen=True)
class Optimal:
    x: tuple
    dual_ineq: tuple
    dual_eq: tuple
    value: Fraction
    status: str = field(default="optimal", init=False)


@dataclass(frozen=True)
class Unbounded:
    ray: tuple
    point: tuple
    status: str = field(default="unbounded", init=False)


@dataclass(frozen=True)
class Infeasible:
    farkas_ineq: tuple
    farkas_eq: tuple
    status: str = field(default="infeasible", init=False)


def solve(lp):
    """Solve ``lp`` exactly. Deterministic for a given input."""
    n = lp.nvars
    A, b, E, d = lp.ineq_lhs, lp.ineq_rhs, lp.eq_lhs, lp.eq_rhs
    m_in, m_eq = len(A), len(E)
    m = m_in + m_eq

    # standard-form columns: x+ (n), x- (n), surplus s (m_in), artificials (m)
    n_std = 2 * n + m_in
    rows = []
    signs = []
    basis = []
    for i in range(m):
        if i < m_in:
            coeffs, rhs = A[i], b[i]
            # a row with rhs <= 0 is negated so its surplus enters with +1
            sign = -1 if rhs <= 0 else 1
        else:
            coeffs, rhs = E[i - m_in], d[i - m_in]
            sign = -1 if rhs < 0 else 1
        row = [ZERO] * (n_std + m + 1)
        for j, a in enumerate(coeffs):
            if a:
                row[j] = sign * a
                row[n + j] = -sign * a
        if i < m_in:
            row[2 * n + i] = Fraction(-sign)
        row[n_std + i] = ONE
        row[-1] = sign * rhs
        rows.append(row)
        signs.append(sign)
        basis.append(2 * n + i if i < m_in and sign < 0 else n_std + i)

    # phase 1: minimize the sum of all artificials
    cost1 = [ZERO] * n_std + [ONE] * m
    rows.append(_reduced_row(rows, basis, cost1))
    _run(rows, basis, allowed=range(n_std + m))

    if rows[-1][-1] < 0:  # -(phase-1 optimum) < 0  => infeasible
        pi = [cost1[n_std + i] - rows[-1][n_std + i] for i in range(m)]
        y = [pi[i] * signs[i] for i in range(m)]
        return Infeasible(tuple(y[:m_in]), tuple(y[m_in:]))

    # drive zero-level artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n_std:
            j = next((j for j in range(n_std) if rows[i][j] != 0), None)
            if j is not None:
                kernels.pivot(rows, i, j)
                basis[i] = j

    cost2 = [ZERO] * (n_std + m)
    for j, c in enumerate(lp.objective):
        cost2[j] = c
        cost2[n + j] = -c
    rows[-1] = _reduced_row(rows[:-1], basis, cost2)
    status, entering = _run(rows, basis, allowed=range(n_std))

    values = [ZERO] * (n_std + m)
    for i, j in enumerate(basis):
        values[j] = rows[i][-1]
    x = tuple(values[j] - values[n + j] for j in range(n))
    if status == "unbounded":
        direction = [ZERO] * (n_std + m)
        direction[entering] = ONE
        for i, j in enumerate(basis):
            direction[j] = -rows[i][entering]
        ray = tuple(direction[j] - direction[n + j] for j in range(n))
        return Unbounded(ray, x)

    pi = [cost2[n_std + i] - rows[-1][n_std + i] for i in range(m)]
    y = [pi[i] * signs[i] for i in range(m)]
    value = dot(lp.objective, x)
    return Optimal(x, tuple(y[:m_in]), tuple(y[m_in:]), value)


def _reduced_row(rows, basis, cost):
    """Objective row ``cost - c_B B^-1 M`` with rhs ``-c_B x_B``."""
    obj = list(cost) + [ZERO]
    for i, j in enumerate(basis):
        cb = cost[j]
        if cb:
            row = rows[i]
            for k, v in enumerate(row):
                if v:
                    obj[k] -= cb * v
    return obj


def _run(rows, basis, allowed):
    """Bland's rule iterations on ``rows`` (last row = reduced costs)."""
    obj = rows[-1]
    allowed = list(allowed)
    while True:
        entering = next((j for j in allowed if obj[j] < 0), None)
        if entering is None:
            return "optimal", None
        best = None
        for i in range(len(rows) - 1):
            a = rows[i][entering]
            if a > 0:
                key = (rows[i][-1] / a, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded", entering
        r = best[1]
        kernels.pivot(rows, r, entering)
        basis[r] = entering
        obj = rows[-1]


def verify(lp, outcome):
    """Re-check every certificate invariant of ``outcome`` exactly.

    Returns a list of violated invariants (empty when the certificate holds).
    """
    A, b, E, d, c = lp.ineq_lhs, lp.ineq_rhs, lp.eq_lhs, lp.eq_rhs, lp.objective
    problems = []
    if isinstance(outcome, Optimal):
        x = outcome.x
        slack = [dot(row, x) - rhs for row, rhs in zip(A, b)]
        if any(s < 0 for s in slack):
            problems.append("primal inequality violated")
        if any(dot(row, x) != rhs for row, rhs in zip(E, d)):
            problems.append("primal equality violated")
        y, z = outcome.dual_ineq, outcome.dual_eq
        if any(v < 0 for v in y):
            problems.append("negative inequality multiplier")
        for j in range(lp.nvars):
            col = sum((y[i] * A[i][j] for i in range(len(A))), ZERO)
            col += sum((z[i] * E[i][j] for i in range(len(E))), ZERO)
            if col != c[j]:
                problems.append(f"dual equation fails in column {j}")
                break
        if any(yi * si != 0 for yi, si in zip(y, slack)):
            problems.append("complementary slackness fails")
        if dot(c, x) != outcome.value:
            problems.append("reported value differs from c.x")
        if dot(y, b) + dot(z, d) != outcome.value:
            problems.append("duality gap")
    elif isinstance(outcome, Unbounded):
        r, x = outcome.ray, outcome.point
        if any(dot(row, r) < 0 for row in A) or any(dot(row, r) != 0 for row in E):
            problems.append("ray leaves the recession cone")
        if dot(c, r) >= 0:
            problems.append("ray does not decrease the objective")
        if any(dot(row, x) < rhs for row, rhs in zip(A, b)) or any(dot(row, x) != rhs for row, rhs in zip(E, d)):
            problems.append("base point infeasible")
    elif isinstance(outcome, Infeasible):
        y, z = outcome.farkas_ineq, outcome.farkas_eq
        if any(v < 0 for v in y):
            problems.append("negative Farkas multiplier")
        for j in range(lp.nvars):
            col = sum((y[i] * A[i][j] for i in range(len(A))), ZERO)
            col += sum((z[i] * E[i][j] for i in range(len(E))), ZERO)
            if col != 0:
                problems.append("Farkas combination is not zero")
                break
        if dot(y, b) + dot(z, d) <= 0:
            problems.append("Farkas right-hand side not positive")
    else:
        problems.append(f"unknown outcome {outcome!r}")
    return problems
