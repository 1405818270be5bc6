"""Estimator-style wrapper around the rational Markov approximants.

``MarkovApproximant(masses=[(2, 0), (3, 1)], n=20).fit().predict(z)``
evaluates ``R_n^[k](z) = S^[k]_n(z) / S_{n+k}(z)`` at the given points.  The
parameters follow the scikit-learn conventions (``get_params``,
``set_params``, ``clone``); fitting builds the exact polynomials and takes no
training data.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .assoc import assoc_Snk
from .errors import ArgumentError, PreconditionError
from .exactpoly import DEFAULT_PREC, Poly, check_prec, evaluate
from .markov import markov_k
from .measures import MeasureSpec
from .sobolev import MassTerm, SobolevProduct


def _mass(spec) -> MassTerm:
    if isinstance(spec, MassTerm):
        return spec
    spec = tuple(spec)
    if not 1 <= len(spec) <= 3:
        raise ArgumentError(f"mass {spec!r} should be (c, order[, eta])")
    c, order, eta = spec + (0, 1)[len(spec) - 1:]
    return MassTerm(Fraction(c), int(order), Fraction(eta))


class MarkovApproximant(BaseEstimator):
    """Rational approximant of the k-th Markov-type function of a Sobolev product.

    Parameters
    ----------
    weight : sequence of rationals
        Ascending coefficients of the polynomial weight on [-1, 1].
    masses : sequence of (c, order) or (c, order, eta)
        Point evaluations of the ``order``-th derivative at ``c``.
    n : int
        Degree of the numerator ``S^[k]_n``.
    k : int
        Index of the Markov function.
    prec : int
        Working precision in bits for evaluation.
    require_ordered : bool
        Refuse products that cannot be sequentially ordered.
    """

    def __init__(self, weight=(1,), masses=(), n=20, k=1, prec=DEFAULT_PREC, require_ordered=True):
        self.weight = weight
        self.masses = masses
        self.n = n
        self.k = k
        self.prec = prec
        self.require_ordered = require_ordered

    def fit(self, X=None, y=None):
        """Build ``S_{n+k}`` and ``S^[k]_n``; ``X`` and ``y`` are ignored."""
        if int(self.n) < 0 or int(self.k) < 1:
            raise ArgumentError("need n >= 0 and k >= 1")
        check_prec(self.prec)
        product = SobolevProduct(
            MeasureSpec(Poly([Fraction(c) for c in self.weight])),
            tuple(_mass(m) for m in self.masses),
        )
        if self.require_ordered and not product.is_sequentially_ordered:
            raise PreconditionError("the Sobolev product is not sequentially ordered")
        self.product_ = product
        self.denominator_ = product.S(self.n + self.k)
        self.numerator_ = assoc_Snk(product, self.n, self.k)
        return self

    def _check_fitted(self):
        if not hasattr(self, "product_"):
            raise NotFittedError("call fit() before predict()")

    @staticmethod
    def _points(X):
        return np.asarray(X, dtype=complex).ravel()

    def predict_mp(self, X) -> list:
        """``R_n^[k]`` at each point as mpmath numbers at the working precision."""
        self._check_fitted()
        out = []
        with mpmath.workprec(self.prec):
            for z in self._points(X):
                z = mpmath.mpc(z.real, z.imag) if z.imag else mpmath.mpf(z.real)
                out.append(evaluate(self.numerator_, z) / evaluate(self.denominator_, z))
        return out

    def predict(self, X) -> np.ndarray:
        """``R_n^[k](z)`` as a complex array."""
        return np.array([complex(v) for v in self.predict_mp(X)], dtype=complex)

    def markov_function(self, X) -> np.ndarray:
        """Exact ``mu_k(z)`` (closed form) at each point."""
        self._check_fitted()
        vals = []
        for z in self._points(X):
            z = mpmath.mpc(z.real, z.imag) if z.imag else mpmath.mpf(z.real)
            vals.append(complex(markov_k(self.product_, self.k, z, self.prec)))
        return np.array(vals, dtype=complex)

    def score(self, X, y=None) -> float:
        """Negative largest ``|mu_k - R_n^[k]|`` over the points (higher is better).

        Without ``y`` the difference is taken at the working precision, so
        errors below double resolution still rank correctly.
        """
        if y is not None:
            return -float(np.max(np.abs(np.asarray(y, dtype=complex).ravel() - self.predict(X))))
        approx = self.predict_mp(X)
        worst = mpmath.mpf(0)
        for z, r in zip(self._points(X), approx):
            z = mpmath.mpc(z.real, z.imag) if z.imag else mpmath.mpf(z.real)
            with mpmath.workprec(self.prec):
                worst = max(worst, abs(markov_k(self.product_, self.k, z, self.prec) - r))
        return -float(worst)
