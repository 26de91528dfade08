from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import brute_force_lp
from toricstab import lp, samples
from toricstab.errors import DimensionMismatch


def run(prog):
    out = lp.solve(prog)
    assert lp.verify(prog, out) == []
    return out


def test_simple_optimum():
    # min x + y  s.t. x >= 1, y >= 2, x + y >= 4
    prog = lp.LinearProgram((1, 1), ((1, 0), (0, 1), (1, 1)), (1, 2, 4))
    out = run(prog)
    assert out.status == "optimal"
    assert out.value == 4


def test_fractional_optimum():
    # min -x - y  s.t. -2x - y >= -2, -x - 3y >= -3
    prog = lp.LinearProgram((-1, -1), ((-2, -1), (-1, -3)), (-2, -3))
    out = run(prog)
    assert out.value == Fraction(-7, 5)
    assert out.x == (Fraction(3, 5), Fraction(4, 5))


def test_equality_constraints():
    prog = lp.LinearProgram((1, 2), ((1, 0), (0, 1)), (0, 0), ((1, 1),), (3,))
    out = run(prog)
    assert out.value == 3 and out.x == (3, 0)


def test_unbounded_has_ray():
    prog = lp.LinearProgram((-1,), ((1,),), (0,))
    out = run(prog)
    assert out.status == "unbounded"
    assert out.ray[0] > 0


def test_infeasible_has_farkas_certificate():
    prog = lp.LinearProgram((0,), ((1,), (-1,)), (1, 0))
    out = run(prog)
    assert out.status == "infeasible"


def test_free_variables_with_no_constraints():
    assert run(lp.LinearProgram((0, 0))).status == "optimal"
    assert run(lp.LinearProgram((1, 0))).status == "unbounded"


def test_degenerate_problem_terminates():
    # classic cycling example for Dantzig's rule; Bland's rule terminates
    A = ((-Fraction(1, 4), 8, 1, -9), (-Fraction(1, 2), 12, Fraction(1, 2), -3), (0, 0, -1, 0))
    A = A + tuple(tuple(int(i == j) for j in range(4)) for i in range(4))
    b = (0, 0, -1, 0, 0, 0, 0)
    prog = lp.LinearProgram((-Fraction(3, 4), 20, -Fraction(1, 2), 6), A, b)
    out = run(prog)
    assert out.status == "optimal"
    assert out.value == -Fraction(5, 4)


def test_shape_errors():
    with pytest.raises(DimensionMismatch):
        lp.LinearProgram((1, 1), ((1,),), (0,))
    with pytest.raises(DimensionMismatch):
        lp.LinearProgram((1,), ((1,),), ())


def test_verify_rejects_bad_certificates():
    prog = lp.LinearProgram((1,), ((1,),), (1,))
    out = lp.solve(prog)
    forged = lp.Optimal((Fraction(2),), out.dual_ineq, out.dual_eq, Fraction(2))
    assert lp.verify(prog, forged)


def test_deterministic():
    rng = samples.rng_from_seed(7)
    prog = samples.linear_program(rng, n=3, m_ineq=4, m_eq=1)
    assert lp.solve(prog) == lp.solve(prog)


def test_seeded_programs_match_brute_force():
    rng = samples.rng_from_seed(1)
    for _ in range(100):
        prog = samples.linear_program(rng)
        out = run(prog)
        status, value = brute_force_lp(prog.objective, prog.ineq_lhs, prog.ineq_rhs, prog.eq_lhs, prog.eq_rhs)
        assert out.status == status
        if status == "optimal":
            assert out.value == value


coef = st.integers(-3, 3)


@st.composite
def programs(draw):
    n = draw(st.integers(1, 3))
    m = draw(st.integers(0, 4))
    k = draw(st.integers(0, 2))
    row = st.tuples(*([coef] * n))
    return lp.LinearProgram(
        draw(row),
        tuple(draw(row) for _ in range(m)),
        tuple(draw(coef) for _ in range(m)),
        tuple(draw(row) for _ in range(k)),
        tuple(draw(coef) for _ in range(k)),
    )


@given(programs())
def test_certificates_always_verify(prog):
    out = lp.solve(prog)
    assert lp.verify(prog, out) == []
    status, value = brute_force_lp(prog.objective, prog.ineq_lhs, prog.ineq_rhs, prog.eq_lhs, prog.eq_rhs)
    assert out.status == status
    if status == "optimal":
        assert out.value == value


def test_larger_programs_match_brute_force():
    # up to 6 variables and 10 constraints; half of them boxed so that optima are common
    rng = samples.rng_from_seed(2)
    statuses = set()
    for i in range(60):
        boxed = i % 2 == 0
        n = rng.randint(1, 5 if boxed else 6)
        m = rng.randint(0, 10 - 2 * n) if boxed else rng.randint(0, 10)
        k = rng.randint(0, min(2, 10 - m - (2 * n if boxed else 0)))
        prog = samples.linear_program(rng, n, m, k)
        if boxed:
            box = tuple(tuple(s * int(i == j) for j in range(n)) for i in range(n) for s in (1, -1))
            prog = lp.LinearProgram(prog.objective, prog.ineq_lhs + box, prog.ineq_rhs + (-3,) * (2 * n), prog.eq_lhs, prog.eq_rhs)
        out = run(prog)
        status, value = brute_force_lp(prog.objective, prog.ineq_lhs, prog.ineq_rhs, prog.eq_lhs, prog.eq_rhs)
        statuses.add(status)
        assert out.status == status
        if status == "optimal":
            assert out.value == value
    assert statuses == {"optimal", "infeasible", "unbounded"}


def test_identical_inputs_give_identical_outputs():
    a = lp.LinearProgram((1, "1/2"), ((1, 0), (0, 1)), ("1/3", 0))
    b = lp.LinearProgram((Fraction(1), Fraction(1, 2)), ((1, 0), (0, 1)), (Fraction(1, 3), 0))
    assert repr(lp.solve(a)) == repr(lp.solve(b))
