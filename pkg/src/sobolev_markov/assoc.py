"""Associated polynomials, long recurrences and Christoffel-type quadrature."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import DomainError, PreconditionError
from .exactpoly import DEFAULT_PREC, Poly, check_prec, evaluate, is_exact, to_mp
from .measures import MeasureSpec, OrthoBasis, distance_to_interval, standard_ops
from .sobolev import SobolevProduct, split_Sn, zero_report


def divided_difference_integral(P: Poly, q: Poly, measure: MeasureSpec) -> Poly:
    """``int (P(z) - P(x)) / (z - x) q(x) dmu(x)`` as a polynomial in z.

    Expands ``(z^i - x^i)/(z - x)`` term by term against the moments of
    ``q dmu``; exact whenever P, q and the weight are exact.
    """
    if P.degree < 1:
        return Poly()
    qm = [measure.integrate(q * Poly.monomial(j)) for j in range(P.degree)]
    exact = all(is_exact(v) for v in qm) and P.is_exact
    out = []
    for t in range(P.degree):
        acc = Fraction(0) if exact else mpmath.mpf(0)
        for i in range(t + 1, P.degree + 1):
            th = P.coeffs[i]
            mom = qm[i - 1 - t]
            if th and mom:
                acc += th * mom if exact else _mp(th) * _mp(mom)
        out.append(acc)
    return Poly(out)


def _mp(v):
    return to_mp(v) if is_exact(v) else v


def q_basis(sp: SobolevProduct, nmax: int) -> OrthoBasis:
    """Monic orthogonal polynomials Q_0..Q_nmax of the modified measure."""
    return standard_ops(sp.modified_measure, nmax)


def assoc_Snk(sp: SobolevProduct, n: int, k: int) -> Poly:
    """k-th associated polynomial S_n^[k]; k = 0 returns S_n."""
    if n < 0 or k < 0:
        raise PreconditionError("n and k must be nonnegative")
    if k == 0:
        return sp.S(n)
    key = ("Snk", n, k)
    if key not in sp._cache:
        Q = q_basis(sp, k - 1)[k - 1]
        sp._cache[key] = divided_difference_integral(sp.S(n + k), Q, sp.modified_measure)
    return sp._cache[key]


def assoc_Qnk(mrho: MeasureSpec, n: int, k: int, method: str = "definition") -> Poly:
    """Associated polynomials of the modified measure.

    ``method="definition"`` integrates the divided difference of Q_{n+k};
    ``method="recurrence"`` runs the shifted three-term recurrence from
    ``Q^[k]_0 = ||Q_{k-1}||^2``.
    """
    if n < 0 or k < 0:
        raise PreconditionError("n and k must be nonnegative")
    basis = standard_ops(mrho, n + k)
    if k == 0:
        return basis[n]
    if method == "definition":
        return divided_difference_integral(basis[n + k], basis[k - 1], mrho)
    if method != "recurrence":
        raise ValueError(f"unknown method {method!r}")
    x = Poly.x()
    prev, cur = Poly(), Poly((basis.norms2[k - 1],))
    for m in range(n):
        prev, cur = cur, (x - basis.rec_b[m + k]) * cur - prev * basis.rec_a2[m + k]
    return cur


def long_recurrence_coeffs(sp: SobolevProduct, n: int, j: int, k: int) -> Fraction:
    """``<S_{n+k}, rho S_{j+k}> / <S_{j+k}, S_{j+k}>`` in the full Sobolev product."""
    Sn = sp.S(n + k)
    Sj = sp.S(j + k)
    return sp.inner(Sn, sp.rho * Sj) / sp.norm2(j + k)


def verify_long_recurrence(sp: SobolevProduct, n: int, k: int) -> Poly:
    """Residual of the 2d+1 term recurrence for S^[k]; zero for n >= 2d - 1."""
    d = sp.d
    if n < 2 * d - 1:
        warnings.warn(
            f"n={n} is below 2d-1={2 * d - 1}; the recurrence is not guaranteed",
            RuntimeWarning,
            stacklevel=2,
        )
    total = Poly()
    for j in range(max(n - d, 0), n + d + 1):
        a = long_recurrence_coeffs(sp, n, j, k)
        if a:
            total = total + assoc_Snk(sp, j, k) * a
    return sp.rho * assoc_Snk(sp, n, k) - total


def verify_strel(sp: SobolevProduct, n: int, k: int) -> Poly:
    """Residual of ``S^[k]_n = (z - beta_{k-2}) S^[k-1]_{n+1} - alpha^2_{k-2} S^[k-2]_{n+2}``."""
    if k < 2:
        raise PreconditionError("the structure relation needs k >= 2")
    if n < sp.d - 1:
        warnings.warn(f"n={n} is below d-1={sp.d - 1}", RuntimeWarning, stacklevel=2)
    basis = q_basis(sp, k - 1)
    x = Poly.x()
    rhs = (x - basis.rec_b[k - 2]) * assoc_Snk(sp, n + 1, k - 1) - assoc_Snk(
        sp, n + 2, k - 2
    ) * basis.rec_a2[k - 2]
    return assoc_Snk(sp, n, k) - rhs


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureRule:
    """Christoffel-type rule at the interior zeros of S_n.

    Integrates ``T * S2plus`` against the modified measure exactly for
    ``deg T <= 2n - d - N - 1``.
    """

    n: int
    nodes: tuple
    lambdas: tuple
    s2plus_at_nodes: tuple
    total_mass: object
    S1: Poly
    S2plus: Poly
    prec: int
    measure: MeasureSpec

    @property
    def positive_count(self) -> int:
        return sum(1 for lam in self.lambdas if lam > 0)

    def apply(self, T: Poly):
        with mpmath.workprec(self.prec):
            return mpmath.fsum(
                lam * s * evaluate(T, x)
                for lam, s, x in zip(self.lambdas, self.s2plus_at_nodes, self.nodes)
            )

    def exact_integral(self, T: Poly):
        """``int T S2plus d mu_rho`` from the exact moments of the measure."""
        with mpmath.workprec(self.prec + 32):
            val = self.measure.integrate((T.to_mp() if T.is_exact else T) * self.S2plus)
        with mpmath.workprec(self.prec):
            return +val


def christoffel(sp: SobolevProduct, n: int, prec: int = DEFAULT_PREC, neighborhood=None) -> QuadratureRule:
    """Nodes, Christoffel-type coefficients and S2plus values for S_n.

    Each coefficient integrates ``S_n(x) / (x - xi)`` (synthetic deflation at
    the refined node) against the modified measure and divides by ``S_n'(xi)``.
    """
    prec = check_prec(prec)
    key = ("rule", n, prec, neighborhood)
    if key in sp._cache:
        return sp._cache[key]
    S = sp.S(n)
    zr = zero_report(sp, n, prec + 32, neighborhood)
    mrho = sp.modified_measure
    with mpmath.workprec(prec + 32):
        S1, S2plus = split_Sn(S, zr, prec + 32, sp.nu)
        dS = S.derivative()
        nodes, lambdas, s2 = [], [], []
        for xi in zr.interior:
            quo, _ = S.deflate(xi)
            lam = mrho.integrate(quo) / evaluate(dS, xi)
            nodes.append(xi)
            lambdas.append(lam)
            s2.append(evaluate(S2plus, xi))
        total = mrho.integrate(S2plus)
    rule = QuadratureRule(
        n=n,
        nodes=tuple(nodes),
        lambdas=tuple(lambdas),
        s2plus_at_nodes=tuple(s2),
        total_mass=total,
        S1=S1,
        S2plus=S2plus,
        prec=prec,
        measure=mrho,
    )
    sp._cache[key] = rule
    return rule


def _check_off_interval(z, prec):
    if distance_to_interval(z) < mpmath.ldexp(1, -(prec // 4)):
        raise DomainError("z must lie off [-1, 1]")


def partial_fraction_R1(sp: SobolevProduct, n: int, k: int, z, prec: int = DEFAULT_PREC):
    """``sum_j S2plus(xi_j) lambda_j Q_{k-1}(xi_j) / (z - xi_j)`` over the zeros of S_{n+k,1}.

    For k = 1 the factor ``Q_0 = 1`` drops out; for k >= 2 it is what the
    residues of ``S^[k]_{n,1} / S_{n+k,1}`` actually carry.
    """
    prec = check_prec(prec)
    rule = christoffel(sp, n + k, prec)
    Q = q_basis(sp, k - 1)[k - 1]
    with mpmath.workprec(prec + 32):
        z = mpmath.mpmathify(z)
        _check_off_interval(z, prec)
        val = mpmath.fsum(
            s * lam * evaluate(Q, xi) / (z - xi)
            for xi, lam, s in zip(rule.nodes, rule.lambdas, rule.s2plus_at_nodes)
        )
    with mpmath.workprec(prec):
        return +val


def remainder_measure(sp: SobolevProduct, n: int, k: int, prec: int = DEFAULT_PREC) -> MeasureSpec:
    """``S2plus_{n+k} rho dmu`` with BigFloat weight coefficients."""
    rule = christoffel(sp, n + k, prec)
    with mpmath.workprec(prec + 32):
        return MeasureSpec(sp.modified_measure.weight.to_mp() * rule.S2plus)


def direct_R1(sp: SobolevProduct, n: int, k: int, z, prec: int = DEFAULT_PREC):
    """``S^[k]_{n,1}(z) / S_{n+k,1}(z)`` built from the n-dependent measure."""
    prec = check_prec(prec)
    rule = christoffel(sp, n + k, prec)
    Q = q_basis(sp, k - 1)[k - 1]
    with mpmath.workprec(prec + 32):
        z = mpmath.mpmathify(z)
        _check_off_interval(z, prec)
        mu_n = remainder_measure(sp, n, k, prec)
        num = divided_difference_integral(rule.S1, Q.to_mp(), mu_n)
        val = evaluate(num, z) / evaluate(rule.S1, z)
    with mpmath.workprec(prec):
        return +val
