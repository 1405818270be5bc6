"""Exact rational polynomials, exact linear solving and certified real roots.

Exact coefficients are :class:`fractions.Fraction`.  Irrational quantities
(roots, Cauchy transforms, conformal map values) live in an mpmath floating
layer whose working precision is always passed explicitly in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
from mpmath.libmp import from_rational

from .errors import ArgumentError, InternalConsistencyError, UnsupportedError

DEFAULT_PREC = 256
MIN_PREC = 64

_MP_TYPES = (mpmath.mpf, mpmath.mpc)


def check_prec(prec: int) -> int:
    prec = int(prec)
    if prec < MIN_PREC:
        raise ArgumentError(f"precision must be at least {MIN_PREC} bits, got {prec}")
    return prec


def tolerance(prec: int, divisor: int = 2):
    """Working tolerance ``2**(-prec/divisor)`` as an mpf."""
    return mpmath.ldexp(mpmath.mpf(1), -(prec // divisor))


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def to_fraction(x) -> Fraction:
    """Exact conversion; mpf values are dyadic so nothing is lost."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, mpmath.mpf):
        man, exp = x.man_exp
        man = int(man)
        return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def to_mp(x):
    """Round ``x`` to the current mpmath precision (correctly rounded for rationals)."""
    if isinstance(x, Fraction):
        return mpmath.mp.make_mpf(
            from_rational(x.numerator, x.denominator, mpmath.mp.prec, "n")
        )
    if isinstance(x, int):
        return mpmath.mpf(x)
    if isinstance(x, _MP_TYPES):
        return +x
    return mpmath.mpmathify(x)


def _coerce(c):
    if isinstance(c, bool):
        return Fraction(int(c))
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, (Fraction, mpmath.mpf, mpmath.mpc)):
        return c
    if isinstance(c, str):
        return Fraction(c.strip())
    if isinstance(c, (float, complex)):
        return mpmath.mpmathify(c)
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def _unify(a, b):
    if is_exact(a) == is_exact(b):
        return a, b
    return (to_mp(a), b) if is_exact(a) else (a, to_mp(b))


class Poly:
    """Dense univariate polynomial, coefficients in ascending degree order.

    Coefficients are exact rationals unless built from mpmath numbers, in which
    case arithmetic happens at the current mpmath precision.  Instances are
    immutable; the zero polynomial has no coefficients and degree -1.
    """

    __slots__ = ("coeffs", "_mp_cache")

    def __init__(self, coeffs: Iterable = ()):
        cs = [_coerce(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "_mp_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # construction helpers
    @classmethod
    def x(cls) -> Poly:
        return cls((0, 1))

    @classmethod
    def constant(cls, c) -> Poly:
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c=1) -> Poly:
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots: Iterable) -> Poly:
        p = cls((1,))
        for r in roots:
            p = p * cls((-_coerce(r), 1))
        return p

    # basic properties
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self):
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs)

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i: int):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if is_exact(other):
            return self.coeffs == Poly((other,)).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({[str(c) if isinstance(c, Fraction) else c for c in self.coeffs]})"

    def __str__(self):
        return format_poly(self)

    # ring operations
    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly((other,))
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(_add(self[i], other[i]) for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly((other,))
        return self + (-other)

    def __rsub__(self, other):
        return Poly((other,)) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            s = _coerce(other)
            return Poly(_mul(c, s) for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return Poly()
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] = _add(out[i + j], _mul(ai, bj))
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ArgumentError("negative power of a polynomial")
        out, base = Poly((1,)), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, s) -> Poly:
        return self * s

    def monic(self) -> Poly:
        if not self.coeffs:
            raise ArgumentError("zero polynomial has no monic normalization")
        lc = self.coeffs[-1]
        if isinstance(lc, Fraction):
            return Poly(c / lc for c in self.coeffs)
        return Poly(_mul(c, 1 / lc) for c in self.coeffs)

    def derivative(self, order: int = 1) -> Poly:
        if order < 0:
            raise ArgumentError("derivative order must be nonnegative")
        return Poly(
            _mul(self.coeffs[i], math.perm(i, order))
            for i in range(order, len(self.coeffs))
        )

    def __divmod__(self, other: Poly):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        if len(rem) - 1 < dq:
            return Poly(), Poly(rem)
        quo = [Fraction(0)] * (len(rem) - dq)
        lc = other.coeffs[-1]
        exact = isinstance(lc, Fraction) and all(isinstance(c, Fraction) for c in rem)
        inv = None if exact else 1 / to_mp(lc)
        for i in range(len(rem) - 1, dq - 1, -1):
            t = rem[i] / lc if exact else _mul(rem[i], inv)
            quo[i - dq] = t
            if t == 0:
                continue
            for j, oj in enumerate(other.coeffs):
                rem[i - dq + j] = _add(rem[i - dq + j], -_mul(t, oj))
            rem[i] = Fraction(0)
        return Poly(quo), Poly(rem[:dq])

    def __floordiv__(self, other: Poly):
        return divmod(self, other)[0]

    def __mod__(self, other: Poly):
        return divmod(self, other)[1]

    def deflate(self, root):
        """Synthetic division by ``x - root``; returns (quotient, remainder)."""
        if len(self.coeffs) < 2:
            return Poly(), self[0]
        cs = self.coeffs
        if not is_exact(root) or not self.is_exact:
            cs = self.mp_coeffs() if self.is_exact else cs
            root = to_mp(root) if is_exact(root) else root
        acc = cs[-1]
        quo = [acc]
        for c in reversed(cs[1:-1]):
            acc = c + acc * root
            quo.append(acc)
        rem = cs[0] + acc * root
        return Poly(reversed(quo)), rem

    # evaluation
    def mp_coeffs(self) -> tuple:
        prec = mpmath.mp.prec
        cached = self._mp_cache.get(prec)
        if cached is None:
            cached = tuple(to_mp(c) for c in self.coeffs)
            self._mp_cache[prec] = cached
        return cached

    def __call__(self, x):
        return evaluate(self, x)

    def to_mp(self) -> Poly:
        return Poly(self.mp_coeffs())

    def coeff_norm1(self):
        return sum((abs(c) for c in self.coeffs), Fraction(0))


def _add(a, b):
    a, b = _unify(a, b)
    return a + b


def _mul(a, b):
    a, b = _unify(a, b)
    return a * b


def format_poly(p: Poly, var: str = "x") -> str:
    """Render with descending powers, rationals as ``p/q``."""
    if p.is_zero():
        return "0"
    parts = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        neg = (c < 0) if not isinstance(c, mpmath.mpc) else False
        mag = -c if neg else c
        if i == 0:
            body = str(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(parts)


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ArgumentError(f"unknown polynomial operation {op!r}")


def derivative(a: Poly, order: int = 1) -> Poly:
    return a.derivative(order)


def evaluate(p: Poly, x):
    """Horner evaluation; exact for rational x and exact p, mpmath otherwise."""
    if is_exact(x) and p.is_exact:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(p.coeffs):
            acc = acc * x + c
        return acc
    if is_exact(x):
        x = to_mp(x)
    elif not isinstance(x, _MP_TYPES):
        x = mpmath.mpmathify(x)
    cs = p.mp_coeffs() if p.is_exact else [to_mp(c) if is_exact(c) else c for c in p.coeffs]
    acc = mpmath.mpf(0)
    for c in reversed(cs):
        acc = acc * x + c
    return acc


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over the rationals (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, a % b
        if not b.is_zero():
            b = b.monic()
    return a.monic() if not a.is_zero() else a


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: ``p = lc * prod(f_i**i)`` with pairwise coprime square-free f_i."""
    if p.is_zero():
        raise ArgumentError("square-free decomposition of the zero polynomial")
    if p.degree == 0:
        return []
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b = p // a
    c = dp // a
    d = c - b.derivative()
    out = []
    i = 1
    while b.degree > 0:
        g = poly_gcd(b, d)
        b = b // g
        c = d // g
        d = c - b.derivative()
        if g.degree > 0:
            out.append((g.monic(), i))
        i += 1
    return out


def squarefree_part(p: Poly) -> Poly:
    out = Poly((1,))
    for f, _ in squarefree_decomposition(p):
        out = out * f
    return out


# ---------------------------------------------------------------------------
# exact linear algebra


@dataclass(frozen=True)
class LinearSolution:
    """Outcome of :func:`solve_linear_exact`.

    ``kind`` is ``"unique"``, ``"many"`` or ``"none"``.  ``solution`` is the
    unique solution or, for ``"many"``, the particular solution with all free
    variables set to zero.  ``nullspace`` holds a basis of the kernel of A, each
    vector scaled so its first nonzero entry is 1.
    """

    kind: str
    rank: int
    solution: tuple | None
    nullspace: tuple = ()


def _integer_rows(A, b):
    rows = []
    for row, rhs in zip(A, b):
        entries = [Fraction(v) for v in row] + [Fraction(rhs)]
        den = 1
        for v in entries:
            den = den * v.denominator // math.gcd(den, v.denominator)
        rows.append([int(v * den) for v in entries])
    return rows


def _echelon(M: list[list[int]], ncols: int):
    """Fraction-free (Bareiss) forward elimination in place; returns pivot columns."""
    nrows = len(M)
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        piv = next((i for i in range(r, nrows) if M[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            M[r], M[piv] = M[piv], M[r]
        pr = M[r]
        p = pr[c]
        for i in range(r + 1, nrows):
            row = M[i]
            f = row[c]
            for j in range(c + 1, len(row)):
                row[j] = (p * row[j] - f * pr[j]) // prev
            row[c] = 0
        prev = p
        pivots.append(c)
        r += 1
    return pivots


def _back_substitute(M, pivots, rhs_col, free_values: dict[int, Fraction], n):
    x = [Fraction(0)] * n
    for col, val in free_values.items():
        x[col] = val
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        row = M[r]
        acc = Fraction(row[rhs_col]) if rhs_col is not None else Fraction(0)
        for j in range(c + 1, n):
            if row[j] and x[j]:
                acc -= row[j] * x[j]
        x[c] = acc / row[c]
    return x


def solve_linear_exact(A: Sequence[Sequence], b: Sequence) -> LinearSolution:
    """Solve ``A x = b`` exactly over the rationals.

    Uses fraction-free elimination on the row-scaled integer system followed
    by rational back substitution.  A unique solution is re-checked against
    the original system.
    """
    m = len(A)
    if len(b) != m:
        raise ArgumentError(f"A has {m} rows but b has {len(b)} entries")
    n = len(A[0]) if m else 0
    if any(len(row) != n for row in A):
        raise ArgumentError("A is not rectangular")
    if m == 0:
        basis = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
        kind = "unique" if n == 0 else "many"
        return LinearSolution(kind, 0, tuple(Fraction(0) for _ in range(n)), basis)

    M = _integer_rows(A, b)
    pivots = _echelon(M, n)
    rank = len(pivots)
    consistent = all(M[i][n] == 0 for i in range(rank, m))
    free = [c for c in range(n) if c not in set(pivots)]

    basis = []
    for f in free:
        vec = _back_substitute(M, pivots, None, {f: Fraction(1)}, n)
        lead = next(v for v in vec if v != 0)
        basis.append(tuple(v / lead for v in vec))

    if not consistent:
        return LinearSolution("none", rank, None, tuple(basis))
    x = _back_substitute(M, pivots, n, {}, n)
    if not free:
        for row, rhs in zip(A, b):
            if sum(Fraction(a) * xi for a, xi in zip(row, x)) != Fraction(rhs):
                raise InternalConsistencyError("exact solve failed its residual check")
        return LinearSolution("unique", rank, tuple(x))
    return LinearSolution("many", rank, tuple(x), tuple(basis))


# ---------------------------------------------------------------------------
# real roots


@dataclass(frozen=True)
class RootInterval:
    """Closed interval ``[lo, hi]`` holding exactly one distinct real root.

    The root has the given multiplicity in the parent polynomial; ``lo == hi``
    means the root is the rational ``lo`` itself.
    """

    lo: Fraction
    hi: Fraction
    multiplicity: int = 1

    def __post_init__(self):
        if self.lo > self.hi:
            raise ArgumentError("RootInterval needs lo <= hi")
        if self.multiplicity < 1:
            raise ArgumentError("multiplicity must be positive")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def sturm_sequence(q: Poly) -> list[Poly]:
    """Sturm chain of a square-free polynomial, each member scaled by 1/|lc|."""
    seq = [q * (1 / abs(q.lc))]
    dq = q.derivative()
    if dq.is_zero():
        return seq
    seq.append(dq * (1 / abs(dq.lc)))
    while True:
        r = -(seq[-2] % seq[-1])
        if r.is_zero():
            break
        seq.append(r * (1 / abs(r.lc)))
    return seq


def _variations(signs: Iterable[int]) -> int:
    count, last = 0, 0
    for s in signs:
        if s == 0:
            continue
        if last and s != last:
            count += 1
        last = s
    return count


def _variations_at(seq: list[Poly], x) -> int:
    if x is None or x == math.inf:
        return _variations(_sign(p.lc) for p in seq)
    if x == -math.inf:
        return _variations(_sign(p.lc) * (-1) ** p.degree for p in seq)
    return _variations(_sign(evaluate(p, x)) for p in seq)


def _bound(lo):
    if lo is None:
        return None
    if lo in (math.inf, -math.inf):
        return lo
    return to_fraction(lo)


def _sturm_count(seq: list[Poly], lo, hi) -> int:
    """Distinct roots of the square-free seq[0] in (lo, hi]."""
    return _variations_at(seq, -math.inf if lo is None else lo) - _variations_at(
        seq, math.inf if hi is None else hi
    )


def count_roots_in(p: Poly, lo=None, hi=None, distinct: bool = False) -> int:
    """Number of real roots of ``p`` in the half-open interval ``(lo, hi]``.

    ``None`` endpoints mean minus/plus infinity.  Roots are counted with
    multiplicity unless ``distinct`` is set.
    """
    if p.is_zero():
        raise ArgumentError("cannot count roots of the zero polynomial")
    lo, hi = _bound(lo), _bound(hi)
    if lo is not None and hi is not None and lo >= hi:
        return 0
    total = 0
    for f, mult in squarefree_decomposition(p):
        total += _sturm_count(sturm_sequence(f), lo, hi) * (1 if distinct else mult)
    return total


def count_sign_changes(p: Poly, lo, hi) -> int:
    """Points in the open interval ``(lo, hi)`` where ``p`` changes sign."""
    if p.is_zero():
        raise ArgumentError("cannot count sign changes of the zero polynomial")
    lo, hi = to_fraction(lo), to_fraction(hi)
    total = 0
    for f, mult in squarefree_decomposition(p):
        if mult % 2 == 0:
            continue
        total += _sturm_count(sturm_sequence(f), lo, hi) - (evaluate(f, hi) == 0)
    return total


def _root_bound(p: Poly) -> Fraction:
    lc = abs(p.lc)
    b = 1 + max((abs(c) / lc for c in p.coeffs[:-1]), default=Fraction(0))
    e = 0
    while 2**e < b:
        e += 1
    return Fraction(2**e)


def _isolate_squarefree(f: Poly) -> list[tuple[Fraction, Fraction]]:
    seq = sturm_sequence(f)
    B = _root_bound(f)
    out = []

    def open_count(a, b):
        return _sturm_count(seq, a, b) - (evaluate(f, b) == 0)

    stack = [(-B, B, open_count(-B, B))]
    while stack:
        a, b, cnt = stack.pop()
        if cnt == 0:
            continue
        if cnt == 1 and evaluate(f, a) != 0 and evaluate(f, b) != 0:
            out.append((a, b))
            continue
        m = (a + b) / 2
        if evaluate(f, m) == 0:
            out.append((m, m))
        left = open_count(a, m)
        stack.append((a, m, left))
        stack.append((m, b, cnt - left - (evaluate(f, m) == 0)))
    return out


def _bisect_once(f: Poly, lo: Fraction, hi: Fraction):
    if lo == hi:
        return lo, hi
    m = (lo + hi) / 2
    fm = evaluate(f, m)
    if fm == 0:
        return m, m
    if _sign(evaluate(f, lo)) != _sign(fm):
        return lo, m
    return m, hi


def isolate_real_roots(p: Poly) -> list[RootInterval]:
    """Certified isolating intervals for every distinct real root, sorted.

    Square-free factors come from Yun's decomposition, so each interval carries
    the exact multiplicity.  Intervals are pairwise disjoint closed sets.
    """
    return [iv for iv, _ in _isolate_with_factors(p)]


def _isolate_with_factors(p: Poly) -> list[tuple[RootInterval, Poly]]:
    if p.is_zero():
        raise ArgumentError("cannot isolate roots of the zero polynomial")
    items = []  # [lo, hi, factor, multiplicity]
    for f, mult in squarefree_decomposition(p):
        for lo, hi in _isolate_squarefree(f):
            items.append([lo, hi, f, mult])
    while True:
        items.sort(key=lambda it: (it[0], it[1]))
        clash = False
        for a, b in zip(items, items[1:]):
            if a[1] >= b[0]:
                clash = True
                a[0], a[1] = _bisect_once(a[2], a[0], a[1])
                b[0], b[1] = _bisect_once(b[2], b[0], b[1])
        if not clash:
            break
    return [(RootInterval(lo, hi, mult), f) for lo, hi, f, mult in items]


def refine_root(p: Poly, iv: RootInterval, prec: int = DEFAULT_PREC):
    """Refine the simple root enclosed by ``iv`` to ``prec`` bits.

    Exact bisection to a coarse width, then Newton in mpmath guarded by the
    enclosure.  The result is certified by an exact sign change of ``p`` at
    ``r +- 2**(-prec+6)``.
    """
    prec = check_prec(prec)
    if iv.multiplicity != 1:
        raise UnsupportedError(
            "refine_root needs a simple root; split off the square-free part first"
        )
    with mpmath.workprec(prec):
        if iv.is_point:
            return to_mp(iv.lo)
    lo, hi = iv.lo, iv.hi
    s_lo = _sign(evaluate(p, lo))
    if s_lo == 0 or s_lo == _sign(evaluate(p, hi)):
        raise ArgumentError("interval does not bracket a simple root of p")
    coarse = Fraction(1, 2**24) * max(1, abs(lo), abs(hi))
    while hi - lo > coarse:
        lo, hi = _bisect_once(p, lo, hi)
        if lo == hi:
            with mpmath.workprec(prec):
                return to_mp(lo)

    dp = p.derivative()
    delta = Fraction(1, 2 ** (prec - 6))
    with mpmath.workprec(prec + 32):
        flo, fhi = to_mp(lo), to_mp(hi)
        x = (flo + fhi) / 2
        stop = mpmath.ldexp(mpmath.mpf(1), -(prec + 8))
        for _ in range(200):
            d = evaluate(dp, x)
            step = evaluate(p, x) / d if d != 0 else mpmath.inf
            nxt = x - step
            if not (flo <= nxt <= fhi):
                lo, hi = _bisect_once(p, lo, hi)
                flo, fhi = to_mp(lo), to_mp(hi)
                nxt = (flo + fhi) / 2
            elif abs(step) <= stop * max(1, abs(x)):
                x = nxt
                break
            x = nxt
    with mpmath.workprec(prec):
        r = +x
    rf = to_fraction(r)
    a, b = rf - delta, rf + delta
    if _sign(evaluate(p, rf)) == 0 or _sign(evaluate(p, a)) * _sign(evaluate(p, b)) < 0:
        return r
    # Newton failed to certify: finish with exact bisection.
    while hi - lo > delta:
        lo, hi = _bisect_once(p, lo, hi)
    with mpmath.workprec(prec):
        return to_mp((lo + hi) / 2)


def real_roots(p: Poly, prec: int = DEFAULT_PREC) -> list[tuple[object, RootInterval]]:
    """Refined value and enclosure for every distinct real root of ``p``."""
    out = []
    for iv, f in _isolate_with_factors(p):
        simple = RootInterval(iv.lo, iv.hi, 1)
        out.append((refine_root(f, simple, prec), iv))
    return out
