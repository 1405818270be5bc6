"""Discrete Sobolev inner products with mass points off [-1, 1].

Builds the monic orthogonal sequence S_n exactly, decides whether the mass
pairs can be sequentially ordered, and reports where the zeros of S_n sit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .errors import (
    ArgumentError,
    DecompositionError,
    InternalConsistencyError,
    PreconditionError,
)
from .exactpoly import (
    DEFAULT_PREC,
    Poly,
    RootInterval,
    check_prec,
    count_sign_changes,
    evaluate,
    real_roots,
    solve_linear_exact,
    to_fraction,
    to_mp,
)
from .measures import MeasureSpec, ldl_orthogonalize, modified_measure, rho_polynomial


@dataclass(frozen=True)
class MassTerm:
    """One point evaluation block ``sum_i eta_i f^(i)(c) g^(i)(c)``.

    ``weight`` multiplies the top derivative ``order``; ``lower`` optionally
    holds nonnegative weights for derivatives ``0..order-1``.
    """

    c: Fraction
    order: int = 0
    weight: Fraction = Fraction(1)
    lower: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "c", to_fraction(self.c))
        object.__setattr__(self, "weight", to_fraction(self.weight))
        object.__setattr__(self, "lower", tuple(to_fraction(v) for v in self.lower))
        if self.order < 0:
            raise ArgumentError("derivative order must be nonnegative")
        if self.weight <= 0:
            raise ArgumentError("the top-order weight must be positive")
        if len(self.lower) > self.order or any(v < 0 for v in self.lower):
            raise ArgumentError("lower-order weights must be nonnegative, one per order below the top")

    def weights(self) -> list[tuple[int, Fraction]]:
        """(derivative order, weight) for every positive weight."""
        out = [(i, w) for i, w in enumerate(self.lower) if w > 0]
        out.append((self.order, self.weight))
        return out


# ---------------------------------------------------------------------------
# sequential ordering


@dataclass(frozen=True)
class Hull:
    """Real interval with explicit endpoint closedness (a convex hull in R)."""

    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def __contains__(self, r) -> bool:
        above = r > self.lo or (self.lo_closed and r == self.lo)
        below = r < self.hi or (self.hi_closed and r == self.hi)
        return above and below

    def extend(self, r) -> "Hull":
        if r in self:
            return self
        if r < self.lo or (r == self.lo and not self.lo_closed):
            return Hull(r, self.hi, True, self.hi_closed)
        return Hull(self.lo, r, self.lo_closed, True)


def open_interval(lo, hi) -> Hull:
    return Hull(to_fraction(lo), to_fraction(hi), False, False)


def _as_hull(base_hull) -> Hull | None:
    if base_hull is None or isinstance(base_hull, Hull):
        return base_hull
    lo, hi = base_hull
    return open_interval(lo, hi)


@dataclass(frozen=True)
class OrderVerdict:
    """Result of the sequential-ordering decision.

    When ``ordered`` the arrangement satisfies the definition verbatim;
    otherwise ``witness`` is the first pair found inside the running hull.
    """

    ordered: bool
    arrangement: tuple | None = None
    witness: tuple | None = None
    hull_at_witness: Hull | None = None

    def __bool__(self):
        return self.ordered


def check_sequential_order(pairs: Iterable[tuple], base_hull=None) -> OrderVerdict:
    """Decide whether ``pairs`` (point, derivative order) can be sequentially ordered.

    Orders are processed by increasing level.  Within a level every point must
    lie outside the hull of ``base_hull`` and all earlier points; right-hand
    points are then placed in ascending order and left-hand points in
    descending order, which keeps each placement outside the growing hull.
    ``base_hull`` is ``None`` for the empty set or an ``(lo, hi)`` open interval.
    """
    pairs = [(to_fraction(r), int(nu)) for r, nu in pairs]
    if len(set(pairs)) != len(pairs):
        raise ArgumentError("pairs must be distinct")
    if any(nu < 0 for _, nu in pairs):
        raise ArgumentError("derivative orders must be nonnegative")
    hull = _as_hull(base_hull)
    arrangement = []
    for nu in sorted({nu for _, nu in pairs}):
        level = sorted(r for r, v in pairs if v == nu)
        if hull is not None:
            for r in level:
                if r in hull:
                    return OrderVerdict(False, witness=(r, nu), hull_at_witness=hull)
            right = [r for r in level if r > hull.hi or r == hull.hi]
            left = [r for r in reversed(level) if r < hull.lo or r == hull.lo]
            placed = right + left
        else:
            placed = level  # ascending from the leftmost point
        for r in placed:
            hull = Hull(r, r) if hull is None else hull.extend(r)
            arrangement.append((r, nu))
    return OrderVerdict(True, arrangement=tuple(arrangement))


def satisfies_ordering_definition(seq: Sequence[tuple], base_hull=None) -> bool:
    """Check both conditions of the definition on a fixed arrangement."""
    hull = _as_hull(base_hull)
    prev_nu = 0
    for r, nu in seq:
        if nu < prev_nu:
            return False
        prev_nu = nu
        if hull is not None and r in hull:
            return False
        hull = Hull(r, r) if hull is None else hull.extend(r)
    return True


# ---------------------------------------------------------------------------
# the product


@dataclass(frozen=True, eq=False)
class SobolevProduct:
    """``<f,g> = int f g dmu + sum_j sum_i eta_{j,i} f^(i)(c_j) g^(i)(c_j)``."""

    base: MeasureSpec = field(default_factory=MeasureSpec)
    masses: tuple = ()
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "masses", tuple(self.masses))
        cs = [m.c for m in self.masses]
        if len(set(cs)) != len(cs):
            raise ArgumentError("mass points must be distinct")

    @property
    def N(self) -> int:
        return len(self.masses)

    @property
    def d(self) -> int:
        return self.N + sum(m.order for m in self.masses)

    @property
    def rho(self) -> Poly:
        if "rho" not in self._cache:
            self._cache["rho"] = rho_polynomial(self.masses)
        return self._cache["rho"]

    @property
    def nu(self) -> int:
        """Number of mass points to the right of the interval."""
        return sum(1 for m in self.masses if m.c > 1)

    def pairs(self) -> list[tuple[Fraction, int]]:
        return [(m.c, i) for m in self.masses for i, _ in m.weights()]

    @property
    def ordering_verdict(self) -> OrderVerdict:
        if "verdict" not in self._cache:
            self._cache["verdict"] = check_sequential_order(self.pairs(), (-1, 1))
        return self._cache["verdict"]

    @property
    def is_sequentially_ordered(self) -> bool:
        return self.ordering_verdict.ordered

    @property
    def modified_measure(self) -> MeasureSpec:
        if "mrho" not in self._cache:
            self._cache["mrho"] = modified_measure(self)
        return self._cache["mrho"]

    def inner(self, f: Poly, g: Poly) -> Fraction:
        return sobolev_inner(f, g, self)

    def gram(self, size: int) -> list[list[Fraction]]:
        """``<x^i, x^j>`` for ``0 <= i, j < size``; cached and extended lazily."""
        cached = self._cache.get("gram")
        if cached is not None and len(cached) >= size:
            return [row[:size] for row in cached[:size]]
        mt = self.base.moment_table(max(2 * size - 2, 0))
        vecs = []
        for m in self.masses:
            for order, w in m.weights():
                v = [
                    Fraction(math.perm(i, order)) * m.c ** (i - order) if i >= order else Fraction(0)
                    for i in range(size)
                ]
                vecs.append((w, v))
        G = [[mt[i + j] for j in range(size)] for i in range(size)]
        for w, v in vecs:
            for i in range(size):
                if v[i]:
                    wi = w * v[i]
                    row = G[i]
                    for j in range(size):
                        if v[j]:
                            row[j] += wi * v[j]
        self._cache["gram"] = G
        return [row[:] for row in G]

    def sequence(self, nmax: int) -> "SobolevSeq":
        """S_0..S_nmax, cached; rebuilt only when a longer sequence is requested."""
        cached = self._cache.get("seq")
        if cached is None or cached.nmax < nmax:
            vecs, norms = ldl_orthogonalize(self.gram(nmax + 1))
            cached = SobolevSeq(self, tuple(Poly(v) for v in vecs), tuple(norms))
            self._cache["seq"] = cached
        return cached

    def S(self, n: int) -> Poly:
        return self.sequence(n).polys[n]

    def norm2(self, n: int) -> Fraction:
        return self.sequence(n).norms2[n]


def sobolev_inner(f: Poly, g: Poly, sp: SobolevProduct) -> Fraction:
    val = sp.base.inner(f, g)
    for m in sp.masses:
        for order, w in m.weights():
            val += w * evaluate(f.derivative(order), m.c) * evaluate(g.derivative(order), m.c)
    return val


@dataclass(frozen=True)
class SobolevSeq:
    product: SobolevProduct
    polys: tuple
    norms2: tuple

    @property
    def nmax(self) -> int:
        return len(self.polys) - 1

    def __getitem__(self, n: int) -> Poly:
        return self.polys[n]


def compute_Sn(sp: SobolevProduct, n: int, row_order: Sequence[int] | None = None) -> Poly:
    """Monic S_n from the n x n Gram system ``G s = -g``.

    ``row_order`` permutes the equations (the answer must not depend on it).
    Residuals ``<x^k, S_n>`` are re-checked exactly.
    """
    if n < 0:
        raise ArgumentError("n must be nonnegative")
    if n == 0:
        return Poly((1,))
    G = sp.gram(n + 1)
    rows = list(range(n)) if row_order is None else list(row_order)
    if sorted(rows) != list(range(n)):
        raise ArgumentError("row_order must be a permutation of range(n)")
    A = [G[k][:n] for k in rows]
    b = [-G[k][n] for k in rows]
    sol = solve_linear_exact(A, b)
    if sol.kind != "unique":
        raise InternalConsistencyError(f"Sobolev Gram matrix of order {n} is singular")
    S = Poly(list(sol.solution) + [1])
    xk = Poly((1,))
    x = Poly.x()
    for k in range(n):
        if sobolev_inner(xk, S, sp) != 0:
            raise InternalConsistencyError(f"<x^{k}, S_{n}> is not zero")
        xk = xk * x
    return S


def quasi_orthogonality_check(sp: SobolevProduct, n: int, poly: Poly | None = None) -> bool:
    """True when ``int S_n x^i rho dmu = 0`` for every ``i < n - d``."""
    if n <= sp.d:
        raise PreconditionError(f"quasi-orthogonality needs n > d = {sp.d}")
    S = sp.S(n) if poly is None else poly
    mrho = sp.modified_measure
    mt = mrho.moment_table(S.degree + n - sp.d - 1)
    for i in range(n - sp.d):
        if sum((c * mt[i + j] for j, c in enumerate(S.coeffs)), Fraction(0)) != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# minimal polynomial with prescribed derivative zeros


def kappa_index(nus: Iterable[int]) -> int:
    """``min{i : nu_i >= i} - 1`` over the sorted orders (1-based), ``M`` if none."""
    nus = sorted(nus)
    for i, nu in enumerate(nus, start=1):
        if nu >= i:
            return i - 1
    return len(nus)


def minimal_prescribed_polynomial(pairs: Sequence[tuple]) -> tuple[Poly, int]:
    """Monic U of least degree with ``U^(nu)(r) = 0`` for every pair, and kappa.

    Degrees are tried in increasing order with an exact consistency test.  For
    sequentially ordered pairs the degree is checked against kappa.
    """
    pairs = [(to_fraction(r), int(nu)) for r, nu in pairs]
    if len(set(pairs)) != len(pairs):
        raise ArgumentError("pairs must be distinct")
    kappa = kappa_index(nu for _, nu in pairs)

    def row(r, nu, deg):
        return [Fraction(math.perm(i, nu)) * r ** (i - nu) if i >= nu else Fraction(0) for i in range(deg + 1)]

    U = None
    for deg in range(len(pairs) + 1):
        if deg == 0:
            if all(nu >= 1 for _, nu in pairs):
                U = Poly((1,))
                break
            continue
        A, b = [], []
        for r, nu in pairs:
            full = row(r, nu, deg)
            A.append(full[:deg])
            b.append(-full[deg])
        sol = solve_linear_exact(A, b)
        if sol.kind == "none":
            continue
        if sol.kind == "many":
            raise InternalConsistencyError("minimal prescribed polynomial is not unique")
        U = Poly(list(sol.solution) + [1])
        break
    if U is None:
        raise InternalConsistencyError("no monic polynomial of degree <= M found")
    if check_sequential_order(pairs, None).ordered and U.degree != kappa:
        raise InternalConsistencyError(f"degree {U.degree} differs from kappa {kappa}")
    return U, kappa


# ---------------------------------------------------------------------------
# zeros


@dataclass(frozen=True)
class RootEntry:
    value: object
    enclosure: RootInterval | None
    kind: str  # interior | attracted | other_real | complex
    multiplicity: int = 1
    mass_index: int | None = None


@dataclass(frozen=True)
class ZeroReport:
    """Real zeros of S_n classified relative to [-1, 1] and the mass points."""

    n: int
    N: int
    entries: tuple
    complex_count: int
    sign_change_count: int
    radii: tuple
    complex_roots: tuple = ()

    def _values(self, kind):
        return [e.value for e in self.entries if e.kind == kind]

    @property
    def interior(self) -> list:
        return self._values("interior")

    @property
    def attracted(self) -> list[tuple[int, object]]:
        return [(e.mass_index, e.value) for e in self.entries if e.kind == "attracted"]

    @property
    def other_real(self) -> list:
        return self._values("other_real")

    @property
    def all_simple(self) -> bool:
        return self.complex_count == 0 and all(e.multiplicity == 1 for e in self.entries)

    @property
    def total(self) -> int:
        return sum(e.multiplicity for e in self.entries) + self.complex_count

    @property
    def in_regime(self) -> bool:
        """n-N simple interior zeros and exactly one simple zero near each mass point."""
        if not self.all_simple or self.other_real:
            return False
        if len(self.interior) != self.n - self.N:
            return False
        hits = sorted(j for j, _ in self.attracted)
        return hits == list(range(self.N))


def default_radii(sp: SobolevProduct) -> list[Fraction]:
    """A quarter of the distance from each c_j to [-1,1] and the other mass points."""
    out = []
    for j, m in enumerate(sp.masses):
        dist = abs(m.c) - 1
        for i, o in enumerate(sp.masses):
            if i != j:
                dist = min(dist, abs(m.c - o.c))
        out.append(dist / 4)
    return out


def _radii(sp: SobolevProduct, neighborhood) -> list[Fraction]:
    if neighborhood is None:
        return default_radii(sp)
    r = to_fraction(mpmath.mpf(neighborhood)) if not isinstance(neighborhood, (int, Fraction)) else Fraction(neighborhood)
    if r <= 0:
        raise ArgumentError("neighborhood radius must be positive")
    for j, m in enumerate(sp.masses):
        if r >= abs(m.c) - 1:
            raise ArgumentError(f"neighborhood of {m.c} overlaps [-1, 1]")
        for i, o in enumerate(sp.masses):
            if i != j and r >= abs(m.c - o.c):
                raise ArgumentError(f"neighborhood of {m.c} contains mass point {o.c}")
    return [r] * sp.N


def zero_report(
    sp: SobolevProduct,
    n: int,
    prec: int = DEFAULT_PREC,
    neighborhood=None,
    with_complex: bool = False,
) -> ZeroReport:
    """Isolate, refine and classify the zeros of S_n.

    ``neighborhood`` is a common radius around every mass point (defaults to
    :func:`default_radii`).  Complex zeros are only counted unless
    ``with_complex`` asks for numerical values as well.
    """
    prec = check_prec(prec)
    radii = _radii(sp, neighborhood)
    S = sp.S(n)
    entries = []
    real_count = 0
    for value, iv in real_roots(S, prec):
        real_count += iv.multiplicity
        with mpmath.workprec(prec):
            kind, idx = "other_real", None
            if -1 < value < 1:
                kind = "interior"
            else:
                best = None
                for j, m in enumerate(sp.masses):
                    dist = abs(value - to_mp(m.c))
                    if dist < to_mp(radii[j]) and (best is None or dist < best[0]):
                        best = (dist, j)
                if best is not None:
                    kind, idx = "attracted", best[1]
        entries.append(RootEntry(value, iv, kind, iv.multiplicity, idx))
    complex_count = S.degree - real_count
    croots = ()
    if with_complex and complex_count:
        croots = tuple(_complex_zeros(S, prec))
    return ZeroReport(
        n=n,
        N=sp.N,
        entries=tuple(entries),
        complex_count=complex_count,
        sign_change_count=count_sign_changes(S, -1, 1) if n > 0 else 0,
        radii=tuple(radii),
        complex_roots=croots,
    )


def _complex_zeros(S: Poly, prec: int) -> list:
    with mpmath.workprec(prec):
        cs = list(reversed(S.mp_coeffs()))
        roots = mpmath.polyroots(cs, maxsteps=400, extraprec=2 * prec, error=False)
        tol = mpmath.ldexp(1, -(prec // 4))
        return sorted(
            (r for r in roots if abs(mpmath.im(r)) > tol),
            key=lambda r: (float(mpmath.re(r)), float(mpmath.im(r))),
        )


def find_n0(sp: SobolevProduct, n_max: int, prec: int = DEFAULT_PREC, neighborhood=None) -> int | None:
    """Smallest n0 such that every n in [n0, n_max] is in the asymptotic regime."""
    n0 = None
    for n in range(n_max, sp.N, -1):
        if zero_report(sp, n, prec, neighborhood).in_regime:
            n0 = n
        else:
            break
    return n0


def chebyshev_points(count: int = 65):
    """Chebyshev-Lobatto points on [-1, 1] at the current precision."""
    return [mpmath.cos(mpmath.pi * j / (count - 1)) for j in range(count)]


def split_Sn(S: Poly, zr: ZeroReport, prec: int = DEFAULT_PREC, nu: int | None = None):
    """Factor S_n = S1 * S2 with S1 over the interior zeros; returns (S1, S2plus).

    ``S2plus = (-1)**nu * S2`` must be positive on [-1, 1]; ``nu`` defaults to
    the sign of S2 at 0, which agrees with the count of mass points right of 1
    whenever the zeros sit in the asymptotic regime.
    """
    prec = check_prec(prec)
    inner = [e for e in zr.entries if e.kind == "interior"]
    outer = [e for e in zr.entries if e.kind != "interior"]
    if zr.complex_count or any(e.multiplicity != 1 for e in zr.entries):
        raise DecompositionError(f"S_{zr.n} has complex or multiple zeros")
    if len(inner) != zr.n - zr.N or len(outer) != zr.N:
        raise DecompositionError(
            f"S_{zr.n} has {len(inner)} interior zeros, expected {zr.n - zr.N}"
        )
    with mpmath.workprec(prec):
        S1 = Poly.from_roots(e.value for e in inner) if inner else Poly((mpmath.mpf(1),))
        S2 = Poly.from_roots(e.value for e in outer) if outer else Poly((mpmath.mpf(1),))
        if nu is None:
            nu = 0 if evaluate(S2, mpmath.mpf(0)) > 0 else 1
        S2plus = S2 * (-1) ** nu
        for x in chebyshev_points():
            if evaluate(S2plus, x) <= 0:
                raise DecompositionError("S2plus is not positive on [-1, 1]")
    return S1, S2plus
