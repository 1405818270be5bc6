from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from sobolev_markov.errors import DomainError, PrecisionError
from sobolev_markov.exactpoly import Poly, evaluate
from sobolev_markov.markov import phi
from sobolev_markov.measures import (
    MeasureSpec,
    check_markov_agreement,
    markov_eval,
    markov_quadrature,
    moments,
    rho_polynomial,
    standard_ops,
)
from sobolev_markov.sobolev import MassTerm, SobolevProduct

X = sympy.Symbol("x")


def sym_integral(expr):
    return Fraction(str(sympy.integrate(expr, (X, -1, 1))))


# moments


def test_lebesgue_moments():
    mt = moments(MeasureSpec(), 9)
    assert mt[0] == 2
    assert all(mt[k] == 0 for k in range(1, 10, 2))
    assert mt[4] == Fraction(2, 5)


def test_linear_weight_moment():
    assert moments(MeasureSpec(Poly((1, -1))), 3)[1] == Fraction(-2, 3)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=5), min_size=1, max_size=4), st.integers(min_value=0, max_value=12))
def test_moments_match_symbolic_integration(ws, k):
    w = Poly([1] + ws)  # positive coefficients keep w > 0 near 0; check domain first
    try:
        m = MeasureSpec(w)
    except DomainError:
        return
    expr = sum(c * X**i for i, c in enumerate([1] + ws))
    assert moments(m, k)[k] == sym_integral(expr * X**k)


def test_moment_table_is_extended_lazily():
    m = MeasureSpec(Poly((2, 1)))
    short = m.moment_table(3)
    long = m.moment_table(10)
    assert long.moments[:4] == short.moments
    assert m.moment_table(5).moments == long.moments[:6]


def test_weight_with_interior_root_rejected():
    with pytest.raises(DomainError):
        MeasureSpec(Poly((0, 1)))
    with pytest.raises(DomainError):
        MeasureSpec(Poly((-1,)))


def test_endpoint_root_allowed():
    assert MeasureSpec(Poly((1, -1))).mass == 2


# standard orthogonal polynomials


def test_legendre_basics():
    b = standard_ops(MeasureSpec(), 12)
    assert all(v == 0 for v in b.rec_b)
    assert b[2] == Poly((Fraction(-1, 3), 0, 1))
    assert b.rec_a2[1] == Fraction(1, 3)


def test_monic_legendre_against_sympy():
    b = standard_ops(MeasureSpec(), 15)
    for n in range(16):
        leg = sympy.Poly(sympy.legendre(n, X), X)
        lc = leg.LC()
        want = [Fraction(str(c / lc)) for c in reversed(leg.all_coeffs())]
        assert b[n] == Poly(want)


def test_orthogonality_and_recurrence_exact():
    m = MeasureSpec(Poly((3, 1, 1)))
    b = standard_ops(m, 14)
    x = Poly.x()
    for n in range(15):
        assert b[n].is_monic() and b[n].degree == n
        assert b.norms2[n] > 0
        for j in range(n):
            assert m.inner(x**j, b[n]) == 0
    for n in range(14):
        assert b.recurrence_residual(n).is_zero()


def test_jacobi_like_weight_against_sympy():
    # w = 1 - x is a Jacobi weight with alpha = 1, beta = 0
    b = standard_ops(MeasureSpec(Poly((1, -1))), 6)
    for n in range(7):
        jac = sympy.Poly(sympy.jacobi(n, 1, 0, X), X)
        lc = jac.LC()
        want = [Fraction(str(c / lc)) for c in reversed(jac.all_coeffs())]
        assert b[n] == Poly(want)


def test_ratio_asymptotics_of_legendre():
    b = standard_ops(MeasureSpec(), 41)
    target = phi(2) / 2
    errs = [abs(evaluate(b[n + 1], mpmath.mpf(2)) / evaluate(b[n], mpmath.mpf(2)) - target) for n in range(41)]
    assert errs[40] < 1e-3
    assert all(errs[n + 1] < errs[n] for n in range(10, 40))


# the modified measure


def test_rho_for_ordered_product():
    sp = SobolevProduct(MeasureSpec(), (MassTerm(2, 0), MassTerm(3, 1)))
    x = Poly.x()
    assert sp.rho == (2 - x) * (3 - x) ** 2
    assert sp.rho.degree == sp.d == 3
    assert sp.modified_measure.weight == sp.rho


def test_rho_trivial_and_left_mass():
    assert rho_polynomial(()) == Poly((1,))
    x = Poly.x()
    r = rho_polynomial((MassTerm(-2, 1),))
    assert r == (x + 2) ** 2
    assert all(evaluate(r, Fraction(k, 10)) > 0 for k in range(-10, 11))


def test_rho_rejects_points_on_the_interval():
    with pytest.raises(DomainError):
        rho_polynomial((MassTerm(Fraction(1, 2), 0),))


# Markov functions


def test_markov_lebesgue_at_three():
    assert abs(markov_eval(MeasureSpec(), Poly((1,)), 3) - mpmath.log(2)) < mpmath.mpf(2) ** -250


def test_markov_linear_weight():
    val = markov_eval(MeasureSpec(Poly((1, -1))), Poly((1,)), 3)
    assert abs(val - (2 - 2 * mpmath.log(2))) < mpmath.mpf(2) ** -250


def test_markov_far_field():
    z = mpmath.mpf(10) ** 6
    assert abs(z * markov_eval(MeasureSpec(), Poly((1,)), z) - 2) < 1e-5


@pytest.mark.parametrize("z", [mpmath.mpc(0, 0.5), mpmath.mpc(2, 1), mpmath.mpf(-1.5), mpmath.mpc(-0.3, -0.6), 5])
def test_markov_matches_quadrature(z):
    m = MeasureSpec(Poly((2, -1, Fraction(1, 2))))
    q = Poly((1, 3, 0, -2))
    a = markov_eval(m, q, z)
    b = mpmath.quad(lambda t: evaluate(q * m.weight, t) / (z - t), [-1, -0.5, 0, 0.5, 1])
    assert abs(a - b) < 1e-20
    assert abs(a - markov_quadrature(m, q, z)) < 1e-20
    check_markov_agreement(m, q, z)


def test_markov_branch_is_continuous_across_real_axis_outside():
    m = MeasureSpec()
    above = markov_eval(m, Poly((1,)), mpmath.mpc(-3, 1e-30))
    below = markov_eval(m, Poly((1,)), mpmath.mpc(-3, -1e-30))
    assert abs(above - below) < 1e-25


def test_markov_refuses_points_on_the_cut():
    with pytest.raises(PrecisionError):
        markov_eval(MeasureSpec(), Poly((1,)), mpmath.mpc(0.5, 1e-70))
