import random

import mpmath
import pytest

from sobolev_markov.assoc import q_basis
from sobolev_markov.errors import ArgumentError, PrecisionError
from sobolev_markov.markov import (
    R_nk,
    approximation_error,
    convergence_report,
    level_curve,
    loglog_slope,
    markov_k,
    phi,
    phi_inverse,
    predicted_remainder_order,
    ratio_asymptotics_check,
    ratio_limit,
    remainder_decay_slope,
    remainder_identity_check,
)
from sobolev_markov.measures import MeasureSpec, markov_quadrature
from sobolev_markov.sobolev import MassTerm, SobolevProduct

GRID = [
    mpmath.mpc(2, 1), mpmath.mpc(-2, 1), mpmath.mpc(0, 1.5), mpmath.mpc(1.2, -0.8),
    mpmath.mpf(5), mpmath.mpf(-4), mpmath.mpc(-1.5, -0.5), mpmath.mpc(0.3, 2.5),
]


# the conformal map


def test_phi_real_examples():
    assert abs(phi(2) - (2 + mpmath.sqrt(3))) < mpmath.mpf(2) ** -250
    assert phi(1) == 1
    assert abs(phi(-2) - (-2 - mpmath.sqrt(3))) < mpmath.mpf(2) ** -250


def test_phi_is_real_above_one():
    v = phi(mpmath.mpf(3))
    assert isinstance(v, mpmath.mpf) and v > 1


def test_phi_branch_invariant():
    rng = random.Random(3)
    done = 0
    while done < 1000:
        z = mpmath.mpc(rng.uniform(-4, 4), rng.uniform(-4, 4))
        if abs(z.imag) <= 1e-2 and -1 - 1e-2 <= z.real <= 1 + 1e-2:
            continue
        w = phi(z)
        assert abs(w) > 1 + mpmath.mpf(10) ** -30
        assert abs(phi_inverse(w) - z) < mpmath.mpf(2) ** -200
        done += 1


def test_phi_continuous_across_real_axis_outside_cut():
    for t in (-5, -1.5, 1.5, 5):
        up = phi(mpmath.mpc(t, 1e-40))
        down = phi(mpmath.mpc(t, -1e-40))
        assert abs(up - down) < 1e-30


def test_phi_symmetry():
    z = mpmath.mpc(0.7, 1.3)
    assert abs(phi(-z) + phi(z)) < mpmath.mpf(2) ** -240
    assert abs(phi(mpmath.conj(z)) - mpmath.conj(phi(z))) < mpmath.mpf(2) ** -240


def test_level_curve_points():
    pts = level_curve(1.5, 64)
    assert len(pts) == 64
    assert all(abs(abs(phi(z)) - mpmath.mpf(1.5)) < mpmath.mpf(2) ** -200 for z in pts)
    with pytest.raises(ArgumentError):
        level_curve(1)


# Markov functions and approximants


def test_markov_k_lebesgue(plain):
    assert abs(markov_k(plain, 1, 3) - mpmath.log(2)) < mpmath.mpf(2) ** -250


@pytest.mark.parametrize("k", [1, 2, 3])
def test_markov_k_far_field_normalization(ordered, k):
    z = mpmath.mpf(10) ** 6
    want = q_basis(ordered, k - 1).norms2[k - 1]
    got = z**k * markov_k(ordered, k, z)
    assert abs(got - want) < 1e-4 * abs(mpmath.mpf(want.numerator) / want.denominator)


def test_markov_k_matches_quadrature(ordered):
    a = markov_k(ordered, 1, 5)
    b = markov_quadrature(ordered.modified_measure, q_basis(ordered, 0)[0], 5)
    assert abs(a - b) < 1e-20


def test_markov_k_needs_positive_k(ordered):
    with pytest.raises(ArgumentError):
        markov_k(ordered, 0, 3)


def test_first_approximant(plain):
    assert abs(R_nk(plain, 0, 1, 3) - mpmath.mpf(2) / 3) < mpmath.mpf(2) ** -250


def test_approximant_vanishes_at_infinity(ordered):
    assert abs(R_nk(ordered, 6, 2, mpmath.mpf(10) ** 6)) < 1e-10


def test_approximant_improves_with_n(plain):
    assert approximation_error(plain, 8, 1, 3) < approximation_error(plain, 4, 1, 3)


def test_approximant_refuses_poles(plain):
    with pytest.raises(PrecisionError):
        R_nk(plain, 1, 1, mpmath.sqrt(mpmath.mpf(1) / 3))


# the remainder identity


def test_remainder_identity_example(ordered):
    chk = remainder_identity_check(ordered, 10, 1, mpmath.mpc(2, 1))
    assert abs(chk.diff) <= mpmath.ldexp(1, -128) * max(abs(chk.lhs), abs(chk.rhs))


def test_remainder_identity_without_masses(plain):
    chk = remainder_identity_check(plain, 8, 1, mpmath.mpc(2, 1))
    assert chk.ok(256)
    assert abs(chk.lhs - (markov_k(plain, 1, mpmath.mpc(2, 1)) - R_nk(plain, 8, 1, mpmath.mpc(2, 1)))) < 1e-60


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("n", range(10, 21))
def test_remainder_identity_grid(ordered, n, k):
    for z in GRID:
        assert remainder_identity_check(ordered, n, k, z).ok(256)


def test_decay_order_without_masses(plain):
    slope = remainder_decay_slope(plain, 10, 1)
    want = predicted_remainder_order(plain, 10, 1)
    assert want == 23
    assert abs(slope + want) <= 0.05 * want


def test_decay_order_with_masses_is_twice_n_plus_k_minus_d(ordered):
    # the error of R_n^[k] itself drops the N of the remainder identity
    slope = remainder_decay_slope(ordered, 10, 1)
    want = 2 * 11 + 1 - ordered.d
    assert abs(slope + want) <= 0.05 * want


def test_loglog_slope_of_power():
    xs = [10, 20, 40]
    assert loglog_slope(xs, [mpmath.mpf(x) ** -7 for x in xs]) == pytest.approx(-7)


# convergence reports


def test_lebesgue_ratio_tends_to_phi_square(plain):
    rep = convergence_report(plain, 1, [3], range(5, 26))
    target = (3 + 2 * mpmath.sqrt(2)) ** -2
    assert abs(rep.predicted[0] - target) < mpmath.mpf(2) ** -240
    r = rep.ratios(0)
    i20 = rep.n_values.index(20)
    assert abs(r[i20 - 1] - target) <= 0.1 * target


def test_report_rejects_points_near_masses(ordered):
    with pytest.raises(ArgumentError):
        convergence_report(ordered, 1, [mpmath.mpf("2.05")], range(5, 8))
    with pytest.raises(ArgumentError):
        convergence_report(ordered, 1, [mpmath.mpf("0.5")], range(5, 8))
    with pytest.raises(ArgumentError):
        convergence_report(ordered, 1, [], range(5, 8))
    with pytest.raises(ArgumentError):
        convergence_report(ordered, 1, [5], [])


def test_report_errors_decrease_in_windows(ordered):
    pts = [mpmath.mpc(2, 1), mpmath.mpc(-2, 1), mpmath.mpf(5)]
    rep = convergence_report(ordered, 1, pts, range(5, 26))
    for i in range(len(pts)):
        e = rep.errors[i]
        start = next(j for j, v in enumerate(e) if v < e[0] / 10)
        for j in range(start, len(e) - 1):
            if not rep.flagged(i, j + 1):
                assert e[j + 1] < e[j]
    assert rep.phi_inv_sup >= rep.inv_phi_sup


def test_report_rows_have_fixed_shape(plain):
    rep = convergence_report(plain, 1, [3, mpmath.mpc(0, 2)], range(3, 6))
    rows = list(rep.rows())
    assert len(rows) == 6 and all(len(r) == 8 for r in rows)


# ratio asymptotics


def test_ratio_without_masses_is_exact(plain):
    assert ratio_limit(plain, 4) == 1
    assert all(err == 0 for _, err in ratio_asymptotics_check(plain, range(1, 20), 4))


def test_ratio_single_mass():
    sp = SobolevProduct(MeasureSpec(), (MassTerm(2, 0),))
    lim = ratio_limit(sp, -3)
    want = (phi(-3) - phi(2)) ** 2 / (2 * phi(-3) * (-5))
    assert abs(lim - want) < mpmath.mpf(2) ** -240 and lim != 0
    rows = ratio_asymptotics_check(sp, [40], -3)
    assert rows[0][1] < 1e-2


def test_ratio_ordered_product_at_four(ordered):
    rows = ratio_asymptotics_check(ordered, [10, 20, 30, 40], 4)
    errs = [e for _, e in rows]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-2
