"""Markov-type functions, their rational approximants and convergence reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .assoc import assoc_Snk, christoffel, partial_fraction_R1, q_basis, remainder_measure
from .errors import ArgumentError, DomainError, InternalConsistencyError, PrecisionError
from .exactpoly import DEFAULT_PREC, check_prec, evaluate, to_mp, tolerance
from .measures import (
    distance_to_interval,
    markov_eval,
    markov_quadrature,
    standard_ops,
)
from .sobolev import SobolevProduct


def phi(z):
    """Conformal map of the complement of [-1, 1] onto the exterior of the unit disk.

    ``z + sqrt(z - 1) sqrt(z + 1)`` with principal roots; the product of the
    two roots is analytic off [-1, 1] and positive for z > 1.
    """
    z = mpmath.mpmathify(z)
    w = z + mpmath.sqrt(z - 1) * mpmath.sqrt(z + 1)
    if isinstance(z, mpmath.mpf) and not (-1 < z < 1):
        return mpmath.re(w)
    return w


def phi_inverse(w):
    """Joukowski map ``(w + 1/w) / 2``."""
    w = mpmath.mpmathify(w)
    return (w + 1 / w) / 2


def level_curve(tau, count: int = 64) -> list:
    """``count`` equally spaced points of ``{|phi(z)| = tau}`` in the angle of phi."""
    if tau <= 1:
        raise ArgumentError("level curves need tau > 1")
    tau = mpmath.mpf(tau)
    return [phi_inverse(tau * mpmath.expjpi(mpmath.mpf(2 * j) / count)) for j in range(count)]


def markov_k(sp: SobolevProduct, k: int, z, prec: int = DEFAULT_PREC):
    """k-th Markov-type function: Cauchy transform of Q_{k-1} d mu_rho."""
    if k < 1:
        raise ArgumentError("k must be positive")
    Q = q_basis(sp, k - 1)[k - 1]
    return markov_eval(sp.modified_measure, Q, z, prec)


def R_nk(sp: SobolevProduct, n: int, k: int, z, prec: int = DEFAULT_PREC):
    """``S^[k]_n(z) / S_{n+k}(z)``."""
    prec = check_prec(prec)
    num = assoc_Snk(sp, n, k)
    den = sp.S(n + k)
    with mpmath.workprec(prec + 32):
        z = mpmath.mpmathify(z)
        dz = evaluate(den, z)
        scale = sum(abs(c) * abs(z) ** i for i, c in enumerate(den.mp_coeffs()))
        if abs(dz) <= mpmath.ldexp(scale, -(prec - 32)):
            raise PrecisionError(f"z is numerically a zero of S_{n + k}")
        val = evaluate(num, z) / dz
    with mpmath.workprec(prec):
        return +val


@dataclass(frozen=True)
class RemainderCheck:
    lhs: object
    rhs: object
    diff: object

    def ok(self, prec: int) -> bool:
        with mpmath.workprec(prec):
            scale = max(abs(self.lhs), abs(self.rhs))
            return abs(self.diff) <= tolerance(prec) * scale


def remainder_identity_check(sp: SobolevProduct, n: int, k: int, z, prec: int = DEFAULT_PREC) -> RemainderCheck:
    """Evaluate both sides of the remainder identity independently.

    Left: Markov function of the n-dependent measure minus the partial
    fraction sum.  Right: ``S2plus(z)`` times the error of ``R_n^[k]``.
    """
    prec = check_prec(prec)
    wp = prec + 64
    Q = q_basis(sp, k - 1)[k - 1]
    rule = christoffel(sp, n + k, wp)
    with mpmath.workprec(wp):
        z = mpmath.mpmathify(z)
        if distance_to_interval(z) < mpmath.ldexp(1, -(prec // 4)):
            raise DomainError("z must lie off [-1, 1]")
        mu_n = remainder_measure(sp, n, k, wp)
        lhs = markov_eval(mu_n, Q, z, wp) - partial_fraction_R1(sp, n, k, z, wp)
        rhs = evaluate(rule.S2plus, z) * (markov_k(sp, k, z, wp) - R_nk(sp, n, k, z, wp))
        diff = lhs - rhs
    with mpmath.workprec(prec):
        return RemainderCheck(+lhs, +rhs, +diff)


def approximation_error(sp: SobolevProduct, n: int, k: int, z, prec: int = DEFAULT_PREC):
    """``|mu_k(z) - R_n^[k](z)|``."""
    with mpmath.workprec(prec + 32):
        e = abs(markov_k(sp, k, z, prec + 32) - R_nk(sp, n, k, z, prec + 32))
    with mpmath.workprec(prec):
        return +e


def loglog_slope(xs: Sequence, ys: Sequence) -> float:
    """Least-squares slope of log y against log x."""
    lx = [float(mpmath.log(abs(mpmath.mpmathify(x)))) for x in xs]
    ly = [float(mpmath.log(y)) for y in ys]
    mx, my = sum(lx) / len(lx), sum(ly) / len(ly)
    num = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    den = sum((a - mx) ** 2 for a in lx)
    return num / den


def remainder_decay_slope(sp: SobolevProduct, n: int, k: int, zs=(10, 20, 40), prec: int = DEFAULT_PREC) -> float:
    """Fitted exponent of ``|mu_k - R_n^[k]|`` along the given large z."""
    errs = [approximation_error(sp, n, k, z, prec) for z in zs]
    return loglog_slope(zs, errs)


def predicted_remainder_order(sp: SobolevProduct, n: int, k: int) -> int:
    """``2(n+1) + k - d - N``."""
    return 2 * (n + 1) + k - sp.d - sp.N


# ---------------------------------------------------------------------------
# reports


@dataclass
class RateReport:
    """Errors of ``R_n^[k]`` at sample points over a range of n.

    ``errors[i][j]`` belongs to ``points[i]`` and ``n_values[j]``.  Entries
    below ``floor`` are flagged and left out of ratios and root tests.
    """

    k: int
    points: list
    n_values: list
    errors: list
    floor: object
    predicted: list = field(default_factory=list)
    phi_inv_sup: object = None
    inv_phi_sup: object = None

    def flagged(self, i: int, j: int) -> bool:
        return self.errors[i][j] < self.floor

    def ratios(self, i: int) -> list:
        """``e_{n+1}/e_n`` per point, None where either entry hits the floor."""
        out = []
        row = self.errors[i]
        for j in range(len(row) - 1):
            if self.flagged(i, j) or self.flagged(i, j + 1) or self.n_values[j + 1] != self.n_values[j] + 1:
                out.append(None)
            else:
                out.append(row[j + 1] / row[j])
        return out

    def root_test(self, i: int, j: int = -1):
        """``e_n^(1/2n)``."""
        n = self.n_values[j]
        if self.flagged(i, j if j >= 0 else len(self.n_values) + j):
            return None
        return self.errors[i][j] ** (mpmath.mpf(1) / (2 * n))

    def mean_ratio(self, i: int, n_lo: int, n_hi: int):
        vals = [
            r
            for j, r in enumerate(self.ratios(i))
            if r is not None and n_lo <= self.n_values[j] and self.n_values[j + 1] <= n_hi
        ]
        if not vals:
            return None
        return mpmath.fsum(vals) / len(vals)

    def max_root_test(self):
        vals = [self.root_test(i) for i in range(len(self.points))]
        vals = [v for v in vals if v is not None]
        return max(vals) if vals else None

    def rows(self):
        """Flat rows ``(k, z_re, z_im, n, error, ratio, root_test, predicted)``."""
        for i, z in enumerate(self.points):
            ratios = self.ratios(i)
            for j, n in enumerate(self.n_values):
                ratio = ratios[j - 1] if j > 0 else None
                rt = None if self.flagged(i, j) else self.errors[i][j] ** (mpmath.mpf(1) / (2 * n))
                yield (self.k, mpmath.re(z), mpmath.im(z), n, self.errors[i][j], ratio, rt, self.predicted[i])


def _check_points(sp: SobolevProduct, points, margin, prec):
    out = []
    for z in points:
        z = mpmath.mpmathify(z)
        if distance_to_interval(z) < mpmath.ldexp(1, -(prec // 4)):
            raise ArgumentError(f"point {z} lies on [-1, 1]")
        for m in sp.masses:
            if abs(z - to_mp(m.c)) < margin:
                raise ArgumentError(f"point {z} is within {margin} of the mass point {m.c}")
        out.append(z)
    return out


def convergence_report(
    sp: SobolevProduct,
    k: int,
    points: Sequence,
    n_range: Sequence[int],
    prec: int = DEFAULT_PREC,
    margin=Fraction(1, 10),
) -> RateReport:
    """Tabulate ``|mu_k - R_n^[k]|`` and compare with ``|phi|^-2`` per point.

    The closed-form Markov function is cross-checked against quadrature at
    every point before the table is built.
    """
    prec = check_prec(prec)
    n_values = list(n_range)
    if not n_values or not list(points):
        raise ArgumentError("points and n_range must be nonempty")
    with mpmath.workprec(prec):
        pts = _check_points(sp, points, to_mp(Fraction(margin)), prec)
        Q = q_basis(sp, k - 1)[k - 1]
        truth = []
        for z in pts:
            a = markov_eval(sp.modified_measure, Q, z, prec + 32)
            b = markov_quadrature(sp.modified_measure, Q, z, prec)
            if abs(a - b) > tolerance(prec, 4) * max(1, abs(a)):
                raise InternalConsistencyError(f"Markov function cross-check failed at {z}")
            truth.append(a)
    errors = []
    for z, mu in zip(pts, truth):
        row = []
        for n in n_values:
            with mpmath.workprec(prec + 32):
                row.append(abs(mu - R_nk(sp, n, k, z, prec + 32)))
        errors.append(row)
    with mpmath.workprec(prec):
        phis = [abs(phi(z)) for z in pts]
        return RateReport(
            k=k,
            points=pts,
            n_values=n_values,
            errors=[[+e for e in row] for row in errors],
            floor=mpmath.ldexp(1, -(prec - 32)),
            predicted=[1 / p**2 for p in phis],
            phi_inv_sup=max(1 / p for p in phis),
            inv_phi_sup=1 / max(phis),
        )


def ratio_limit(sp: SobolevProduct, z):
    """``prod_j (phi(z) - phi(c_j))^2 / (2 phi(z) (z - c_j))``."""
    z = mpmath.mpmathify(z)
    f = phi(z)
    out = mpmath.mpf(1)
    for m in sp.masses:
        c = to_mp(m.c)
        out *= (f - phi(c)) ** 2 / (2 * f * (z - c))
    return out


def ratio_asymptotics_check(sp: SobolevProduct, n_range: Sequence[int], z, prec: int = DEFAULT_PREC) -> list:
    """Rows ``(n, |S_n(z)/P_n(z) - limit(z)|)``."""
    prec = check_prec(prec)
    n_values = list(n_range)
    P = standard_ops(sp.base, max(n_values))
    rows = []
    with mpmath.workprec(prec):
        z = mpmath.mpmathify(z)
        if distance_to_interval(z) == 0:
            raise DomainError("z must lie off [-1, 1]")
        lim = ratio_limit(sp, z)
        for n in n_values:
            S, Pn = sp.S(n), P[n]
            if S == Pn and not sp.masses:
                rows.append((n, mpmath.mpf(0)))
                continue
            rows.append((n, abs(evaluate(S, z) / evaluate(Pn, z) - lim)))
    return rows


def uniform_bound_samples(sp: SobolevProduct, k: int, n_values: Sequence[int], tau=1.5, count: int = 64, prec: int = DEFAULT_PREC) -> list:
    """``max |R^[k]_{n,1}|`` over ``count`` points of the level curve ``|phi| = tau``."""
    pts = level_curve(tau, count)
    out = []
    for n in n_values:
        with mpmath.workprec(prec):
            out.append((n, max(abs(partial_fraction_R1(sp, n, k, z, prec)) for z in pts)))
    return out
