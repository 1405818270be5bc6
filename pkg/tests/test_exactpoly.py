from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from sobolev_markov.errors import ArgumentError, UnsupportedError
from sobolev_markov.exactpoly import (
    Poly,
    RootInterval,
    count_roots_in,
    count_sign_changes,
    derivative,
    evaluate,
    format_poly,
    isolate_real_roots,
    poly_arith,
    poly_gcd,
    real_roots,
    refine_root,
    solve_linear_exact,
    squarefree_decomposition,
    to_fraction,
    to_mp,
)

X = sympy.Symbol("x")

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
polys = st.lists(rationals, min_size=0, max_size=7).map(Poly)


def to_sympy(p: Poly):
    cs = [sympy.Rational(c.numerator, c.denominator) for c in reversed(p.coeffs)]
    return sympy.Poly(cs or [0], X, domain="QQ")


def from_sympy(e) -> Poly:
    cs = sympy.Poly(e, X).all_coeffs()[::-1]
    return Poly(Fraction(int(c.p), int(c.q)) for c in cs)


# arithmetic


def test_derivative_of_cube():
    assert derivative(Poly((0, 0, 0, 1)), 2) == Poly((0, 6))


def test_eval_identity_case():
    assert evaluate(Poly((-1, 0, 1)), 1) == 0


def test_product_matches_expansion():
    p = poly_arith(Poly((-2, 1)), Poly((-4, 1)), "mul")
    assert p == Poly((8, -6, 1))
    assert format_poly(p) == "x^2 - 6*x + 8"
    assert from_sympy(sympy.expand((X - 2) * (X - 4))) == p


def test_zero_polynomial_conventions():
    z = Poly((0, 0))
    assert z.is_zero() and z.degree == -1 and z.coeffs == ()
    assert format_poly(z) == "0"


def test_unknown_operation_rejected():
    with pytest.raises(ArgumentError):
        poly_arith(Poly((1,)), Poly((1,)), "div")


def test_coefficients_are_reduced():
    p = Poly((Fraction(2, 4), Fraction(-6, 3)))
    assert p.coeffs == (Fraction(1, 2), Fraction(-2))
    assert all(c.denominator > 0 for c in p.coeffs)


@settings(max_examples=60, deadline=None)
@given(polys, polys, rationals)
def test_product_degree_and_evaluation(p, q, x):
    pq = p * q
    if not p.is_zero() and not q.is_zero():
        assert pq.degree == p.degree + q.degree
    assert evaluate(pq, x) == evaluate(p, x) * evaluate(q, x)


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_arithmetic_matches_sympy(p, q):
    for op, sym in (("add", lambda a, b: a + b), ("sub", lambda a, b: a - b), ("mul", lambda a, b: a * b)):
        got = poly_arith(p, q, op)
        want = sym(to_sympy(p), to_sympy(q))
        assert to_sympy(got) == want


@settings(max_examples=40, deadline=None)
@given(polys, st.integers(min_value=0, max_value=4))
def test_derivative_matches_sympy(p, m):
    want = sympy.diff(to_sympy(p).as_expr(), X, m)
    assert to_sympy(p.derivative(m)) == sympy.Poly(want, X, domain="QQ")


@settings(max_examples=40, deadline=None)
@given(polys, polys.filter(lambda q: not q.is_zero()))
def test_division_identity(p, q):
    quo, rem = divmod(p, q)
    assert quo * q + rem == p
    assert rem.degree < q.degree


def test_mixed_evaluation_precision():
    p = Poly((Fraction(1, 3), 0, 1))
    with mpmath.workprec(200):
        v = evaluate(p, mpmath.mpf(2))
        assert abs(v - (4 + mpmath.mpf(1) / 3)) < mpmath.mpf(2) ** -195
        vc = evaluate(p, mpmath.mpc(0, 1))
        assert abs(vc - (mpmath.mpf(1) / 3 - 1)) < mpmath.mpf(2) ** -195


def test_exact_mp_roundtrip():
    with mpmath.workprec(80):
        r = to_mp(Fraction(1, 3))
        assert to_mp(to_fraction(r)) == r


# gcd and square-free parts


def test_gcd_matches_sympy():
    a = Poly.from_roots([1, 2, 2, Fraction(1, 3)])
    b = Poly.from_roots([2, 5, Fraction(1, 3)])
    assert to_sympy(poly_gcd(a, b)) == sympy.gcd(to_sympy(a), to_sympy(b))


def test_squarefree_decomposition_multiplicities():
    p = Poly.from_roots([1, 1, 1, -2, -2, 3]) * 5
    parts = dict((m, f) for f, m in squarefree_decomposition(p))
    assert parts[1] == Poly((-3, 1))
    assert parts[2] == Poly((2, 1))
    assert parts[3] == Poly((-1, 1))


# linear systems


def test_solve_trivial():
    assert solve_linear_exact([[1]], [2]).solution == (Fraction(2),)


def test_solve_two_by_two():
    sol = solve_linear_exact([[1, 1], [1, -1]], [0, 2])
    assert sol.kind == "unique" and sol.solution == (1, -1)


def test_solve_underdetermined_reports_nullspace():
    sol = solve_linear_exact([[1, 1]], [1])
    assert sol.kind == "many" and sol.rank == 1
    assert sol.nullspace == ((Fraction(1), Fraction(-1)),)


def test_solve_inconsistent():
    sol = solve_linear_exact([[1, 1], [2, 2]], [1, 3])
    assert sol.kind == "none" and sol.rank == 1


def test_solve_dimension_mismatch():
    with pytest.raises(ArgumentError):
        solve_linear_exact([[1, 2]], [1, 2])


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=6).flatmap(
    lambda n: st.tuples(
        st.lists(st.lists(rationals, min_size=n, max_size=n), min_size=n, max_size=n),
        st.lists(rationals, min_size=n, max_size=n),
    )
))
def test_solve_matches_sympy(data):
    A, b = data
    M = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in A])
    sol = solve_linear_exact(A, b)
    assert sol.rank == M.rank()
    if sol.kind == "unique":
        for row, rhs in zip(A, b):
            assert sum(a * x for a, x in zip(row, sol.solution)) == rhs
    for v in sol.nullspace:
        assert all(sum(a * x for a, x in zip(row, v)) == 0 for row in A)


# roots


def test_isolation_simple_examples():
    ivs = isolate_real_roots(Poly((-1, 0, 1)))
    assert len(ivs) == 2
    assert count_roots_in(Poly((-1, 0, 1)), -2, 2) == 2
    assert isolate_real_roots(Poly((1, 0, 1))) == []
    p = Poly.from_roots([2, 4])
    assert count_roots_in(p, -1, 1) == 0 and count_roots_in(p, 1, 5) == 2


def test_count_uses_half_open_interval():
    p = Poly.from_roots([1, 2])
    assert count_roots_in(p, 1, 2) == 1
    assert count_roots_in(p, 0, 1) == 1
    assert count_roots_in(p, 2, 3) == 0


def test_multiplicities_are_counted():
    p = Poly.from_roots([0, 0, Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)])
    assert count_roots_in(p, -1, 1) == 5
    assert count_roots_in(p, -1, 1, distinct=True) == 2
    assert count_sign_changes(p, -1, 1) == 1
    mults = sorted(iv.multiplicity for iv in isolate_real_roots(p))
    assert mults == [2, 3]


def test_zero_polynomial_rejected():
    with pytest.raises(ArgumentError):
        isolate_real_roots(Poly())


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=5), min_size=1, max_size=7),
       st.lists(rationals.filter(lambda v: v > 0), max_size=2))
def test_isolation_matches_sympy(roots, quad):
    p = Poly.from_roots(roots)
    for c in quad:
        p = p * Poly((c, 0, 1))  # no real roots
    ivs = isolate_real_roots(p)
    assert sum(iv.multiplicity for iv in ivs) == len(roots)
    for a, b in zip(ivs, ivs[1:]):
        assert a.hi < b.lo
    for r in set(roots):
        hits = [iv for iv in ivs if iv.lo <= r <= iv.hi]
        assert len(hits) == 1 and hits[0].multiplicity == roots.count(r)
    # sympy counts distinct roots on the closed interval
    want = to_sympy(p).count_roots(-1, 1)
    assert count_roots_in(p, -1, 1, distinct=True) + (evaluate(p, Fraction(-1)) == 0) == want
    assert count_roots_in(p, -1, 1) == sum(1 for r in roots if -1 < r <= 1)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(min_value=-9, max_value=9), min_size=2, max_size=8))
def test_sign_changes_equal_isolated_roots(cs):
    p = Poly(cs)
    if p.degree < 1:
        return
    f = p
    for g, _ in squarefree_decomposition(p):
        f = g  # any square-free factor
    inside = [iv for iv in isolate_real_roots(f) if -1 < iv.lo and iv.hi < 1]
    boundary = [iv for iv in isolate_real_roots(f) if iv.lo <= -1 < iv.hi or iv.lo < 1 <= iv.hi]
    if not boundary:
        assert count_sign_changes(f, -1, 1) == len(inside)


def test_refine_sqrt2():
    p = Poly((-2, 0, 1))
    r = refine_root(p, RootInterval(Fraction(1), Fraction(2)), 128)
    with mpmath.workprec(128):
        assert abs(r - mpmath.sqrt(2)) < mpmath.mpf(10) ** -30


def test_refine_rational_root():
    r = refine_root(Poly((Fraction(-1, 3), 1)), RootInterval(Fraction(0), Fraction(1)), 128)
    with mpmath.workprec(128):
        assert abs(r - mpmath.mpf(1) / 3) < mpmath.mpf(2) ** -120


def test_refine_monic_legendre():
    r = refine_root(Poly((Fraction(-1, 3), 0, 1)), RootInterval(Fraction(0), Fraction(1)), 256)
    assert abs(r - mpmath.sqrt(mpmath.mpf(1) / 3)) < mpmath.mpf(2) ** -248


def test_refine_rejects_multiple_roots():
    with pytest.raises(UnsupportedError):
        refine_root(Poly.from_roots([1, 1]), RootInterval(Fraction(0), Fraction(2), 2), 128)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(min_value=-20, max_value=20), min_size=3, max_size=9),
       st.sampled_from([64, 128, 256]))
def test_refine_residual_certificate(cs, prec):
    p = Poly(cs)
    if p.degree < 1:
        return
    for value, iv in real_roots(p, prec):
        if iv.multiplicity != 1:
            continue
        with mpmath.workprec(prec + 64):
            res = abs(evaluate(p, value))
            slope = abs(evaluate(p.derivative(), value))
            assert res <= slope * mpmath.ldexp(1, -prec + 10)
            assert to_mp(iv.lo) <= value <= to_mp(iv.hi)


def test_real_roots_against_sympy_nroots():
    p = Poly((3, -7, 0, 2, 1, -1))
    got = sorted(float(v) for v, _ in real_roots(p, 128))
    want = sorted(float(r) for r in sympy.Poly(to_sympy(p)).real_roots())
    assert got == pytest.approx(want, abs=1e-12)
