"""Polynomial-weight measures on [-1, 1], their orthogonal bases and Markov functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING

import mpmath

from .errors import ArgumentError, DomainError, InternalConsistencyError, PrecisionError
from .exactpoly import (
    DEFAULT_PREC,
    Poly,
    check_prec,
    count_roots_in,
    evaluate,
    is_exact,
    to_mp,
    tolerance,
)

if TYPE_CHECKING:
    from .sobolev import SobolevProduct


def lebesgue_moment(p: int) -> Fraction:
    """Integral of x**p over [-1, 1]."""
    return Fraction(2, p + 1) if p % 2 == 0 else Fraction(0)


@dataclass(frozen=True)
class MomentTable:
    measure: "MeasureSpec"
    moments: tuple

    @property
    def kmax(self) -> int:
        return len(self.moments) - 1

    def __getitem__(self, k: int):
        return self.moments[k]


@dataclass(frozen=True, eq=False)
class MeasureSpec:
    """``d mu = w(x) dx`` on [-1, 1] with a polynomial weight ``w``.

    Exact weights are validated: no roots in (-1, 1) and positive there.
    Weights with mpmath coefficients (used for the n-dependent measures of the
    remainder formulas) are checked at Chebyshev sample points instead.
    """

    weight: Poly = field(default_factory=lambda: Poly((1,)))
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        w = self.weight
        if not isinstance(w, Poly):
            object.__setattr__(self, "weight", Poly(w))
            w = self.weight
        if w.is_zero():
            raise DomainError("weight must not vanish identically")
        if w.is_exact:
            if count_roots_in(w, -1, 1, distinct=True) - (evaluate(w, Fraction(1)) == 0) > 0:
                raise DomainError("weight has a root inside (-1, 1)")
            if evaluate(w, Fraction(0)) < 0:
                raise DomainError("weight is negative on (-1, 1)")
        else:
            with mpmath.workprec(64):
                for j in range(33):
                    x = mpmath.cos(mpmath.pi * (j + mpmath.mpf(1) / 2) / 33)
                    if mpmath.re(evaluate(w, x)) <= 0:
                        raise DomainError("weight is not positive on (-1, 1)")

    def __eq__(self, other):
        return isinstance(other, MeasureSpec) and self.weight == other.weight

    def __hash__(self):
        return hash(self.weight)

    @property
    def is_exact(self) -> bool:
        return self.weight.is_exact

    def moment_table(self, kmax: int) -> MomentTable:
        """Moments 0..kmax, extending the cached table when needed."""
        if kmax < 0:
            raise ArgumentError("kmax must be nonnegative")
        key = "exact" if self.is_exact else mpmath.mp.prec
        table = self._cache.get(key)
        if table is None or table.kmax < kmax:
            start = 0 if table is None else table.kmax + 1
            old = () if table is None else table.moments
            w = self.weight.coeffs
            new = []
            for k in range(start, kmax + 1):
                acc = Fraction(0) if self.is_exact else mpmath.mpf(0)
                for j, wj in enumerate(w):
                    m = lebesgue_moment(k + j)
                    if m:
                        acc += wj * (m if self.is_exact else to_mp(m))
                new.append(acc)
            table = MomentTable(self, old + tuple(new))
            self._cache[key] = table
        if table.kmax == kmax:
            return table
        return MomentTable(self, table.moments[: kmax + 1])

    def integrate(self, p: Poly):
        """Integral of ``p`` against the measure (exact when both are exact)."""
        if p.is_zero():
            return Fraction(0)
        m = self.moment_table(p.degree)
        if p.is_exact and self.is_exact:
            return sum((c * m[i] for i, c in enumerate(p.coeffs) if c), Fraction(0))
        acc = mpmath.mpf(0)
        for i, c in enumerate(p.coeffs):
            if c:
                acc += (to_mp(c) if is_exact(c) else c) * (to_mp(m[i]) if is_exact(m[i]) else m[i])
        return acc

    def inner(self, f: Poly, g: Poly):
        return self.integrate(f * g)

    @property
    def mass(self):
        return self.moment_table(0)[0]


def moments(m: MeasureSpec, kmax: int) -> MomentTable:
    return m.moment_table(kmax)


@dataclass(frozen=True)
class OrthoBasis:
    """Monic orthogonal polynomials with exact recurrence data.

    ``rec_a2[n] = norms2[n] / norms2[n-1]`` (``rec_a2[0]`` is the total mass)
    and ``rec_b[n] = <p_n, x p_n> / norms2[n]``.
    """

    measure: MeasureSpec
    polys: tuple
    rec_a2: tuple
    rec_b: tuple
    norms2: tuple

    @property
    def nmax(self) -> int:
        return len(self.polys) - 1

    def __getitem__(self, n: int) -> Poly:
        return self.polys[n]

    def recurrence_residual(self, n: int) -> Poly:
        """``p_{n+1} - (x - b_n) p_n + a_n^2 p_{n-1}`` (zero for an exact basis)."""
        prev = self.polys[n - 1] if n > 0 else Poly()
        x = Poly.x()
        return self.polys[n + 1] - (x - self.rec_b[n]) * self.polys[n] + prev * self.rec_a2[n]


def ldl_orthogonalize(gram: list[list[Fraction]]):
    """Monic orthogonal coefficient vectors from a symmetric positive Gram matrix.

    Performs ``G = L D L^T`` elimination; row n of ``L^{-1}`` holds the
    coefficients of the n-th monic orthogonal polynomial and ``D`` its norm.
    """
    n = len(gram)
    vecs: list[list[Fraction]] = []
    norms: list[Fraction] = []
    # <x^i, p_j> for every i, built incrementally
    proj: list[list[Fraction]] = []
    for k in range(n):
        v = [Fraction(0)] * (k + 1)
        v[k] = Fraction(1)
        for j in range(k):
            c = proj[j][k] / norms[j]
            if c:
                for i, pj in enumerate(vecs[j]):
                    v[i] -= c * pj
        col = [sum((vi * gram[i][r] for i, vi in enumerate(v) if vi), Fraction(0)) for r in range(n)]
        nk = col[k]
        if nk <= 0:
            raise InternalConsistencyError(f"Gram matrix is not positive definite at order {k}")
        vecs.append(v)
        norms.append(nk)
        proj.append(col)
    return vecs, norms


def hankel_gram(m: MeasureSpec, size: int) -> list[list[Fraction]]:
    mt = m.moment_table(max(2 * size - 2, 0))
    return [[mt[i + j] for j in range(size)] for i in range(size)]


def standard_ops(m: MeasureSpec, nmax: int) -> OrthoBasis:
    """Monic orthogonal polynomials P_0..P_nmax of ``m`` from its moment matrix."""
    if nmax < 0:
        raise ArgumentError("nmax must be nonnegative")
    if not m.is_exact:
        raise ArgumentError("standard_ops needs an exact weight")
    cached = m._cache.get("basis")
    if cached is not None and cached.nmax >= nmax:
        return _truncate(cached, nmax)
    vecs, norms = ldl_orthogonalize(hankel_gram(m, nmax + 1))
    polys = [Poly(v) for v in vecs]
    x = Poly.x()
    rec_b = tuple(m.inner(p, x * p) / norms[n] for n, p in enumerate(polys[: nmax + 1]))
    rec_a2 = (norms[0],) + tuple(norms[n] / norms[n - 1] for n in range(1, nmax + 1))
    basis = OrthoBasis(m, tuple(polys[: nmax + 1]), rec_a2, rec_b, tuple(norms[: nmax + 1]))
    m._cache["basis"] = basis
    return basis


def _truncate(b: OrthoBasis, nmax: int) -> OrthoBasis:
    if b.nmax == nmax:
        return b
    s = slice(0, nmax + 1)
    return OrthoBasis(b.measure, b.polys[s], b.rec_a2[s], b.rec_b[s], b.norms2[s])


def modified_measure(sp: "SobolevProduct") -> MeasureSpec:
    """``rho * mu`` with rho vanishing to order d_j + 1 at each mass point."""
    return MeasureSpec(sp.base.weight * sp.rho)


def rho_polynomial(masses) -> Poly:
    """``prod (z - c)^(d+1)`` for c < -1 times ``prod (c - z)^(d+1)`` for c > 1."""
    rho = Poly((1,))
    for mt in masses:
        c = Fraction(mt.c)
        if -1 <= c <= 1:
            raise DomainError(f"mass point {c} lies in [-1, 1]")
        factor = Poly((-c, 1)) if c < -1 else Poly((c, -1))
        rho = rho * factor ** (mt.order + 1)
    return rho


def cauchy_kernel_polynomial(g: Poly) -> Poly:
    """H(z) = integral over [-1,1] of (g(z) - g(x)) / (z - x) dx."""
    if g.degree < 1:
        return Poly()
    exact = g.is_exact
    out = [Fraction(0) if exact else mpmath.mpf(0)] * g.degree
    for i in range(1, g.degree + 1):
        gi = g.coeffs[i]
        if gi == 0:
            continue
        for j in range(0, i, 2):  # odd moments of dx vanish
            mj = lebesgue_moment(j)
            out[i - 1 - j] += gi * (mj if exact else to_mp(mj))
    return Poly(out)


def log_kernel(z):
    """Principal log((z+1)/(z-1)); equals the integral of dx/(z-x) off [-1,1]."""
    return mpmath.log((z + 1) / (z - 1))


def distance_to_interval(z) -> object:
    z = mpmath.mpc(z)
    x = mpmath.re(z)
    cx = min(max(x, -1), 1)
    return abs(z - cx)


def markov_eval(m: MeasureSpec, q: Poly, z, prec: int = DEFAULT_PREC):
    """Cauchy transform of ``q dmu``: integral of q(x) w(x) / (z - x) dx.

    Closed form ``G(z) log((z+1)/(z-1)) - H(z)`` with ``G = q w`` and ``H`` the
    exact divided-difference integral of ``G``.
    """
    prec = check_prec(prec)
    with mpmath.workprec(prec + 32):
        z = mpmath.mpmathify(z)
        if distance_to_interval(z) < mpmath.ldexp(1, -(prec // 4)):
            raise PrecisionError("z is too close to [-1, 1] for the working precision")
        G = q * m.weight
        H = cauchy_kernel_polynomial(G)
        val = evaluate(G, z) * log_kernel(z) - evaluate(H, z)
    with mpmath.workprec(prec):
        return +val


def markov_quadrature(m: MeasureSpec, q: Poly, z, prec: int = DEFAULT_PREC, pieces: int = 8):
    """Composite Gauss-Legendre evaluation of the same integral (cross-check route)."""
    prec = check_prec(prec)
    with mpmath.workprec(prec + 16):
        z = mpmath.mpmathify(z)
        G = q * m.weight
        nodes = [mpmath.mpf(-1) + mpmath.mpf(2 * i) / pieces for i in range(pieces + 1)]
        val = mpmath.quad(lambda x: evaluate(G, x) / (z - x), nodes, method="gauss-legendre")
    with mpmath.workprec(prec):
        return +val


def check_markov_agreement(m: MeasureSpec, q: Poly, z, prec: int = DEFAULT_PREC):
    """Compare closed form with quadrature; raise when they disagree."""
    a = markov_eval(m, q, z, prec)
    b = markov_quadrature(m, q, z, prec)
    with mpmath.workprec(prec):
        scale = max(mpmath.mpf(1), abs(a))
        if abs(a - b) > tolerance(prec, 4) * scale:
            raise InternalConsistencyError(
                f"closed-form Markov function disagrees with quadrature at z={z}"
            )
    return a
