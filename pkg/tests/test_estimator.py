import mpmath
import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from sobolev_markov import MarkovApproximant
from sobolev_markov.errors import ArgumentError, PreconditionError
from sobolev_markov.markov import R_nk


def test_params_round_trip():
    est = MarkovApproximant(masses=[(2, 0), (3, 1)], n=12, k=2)
    params = est.get_params()
    assert params["n"] == 12 and params["k"] == 2 and params["masses"] == [(2, 0), (3, 1)]
    twin = clone(est)
    assert twin.get_params() == params and twin is not est
    est.set_params(n=5)
    assert est.n == 5


def test_predict_matches_quotient(ordered):
    est = MarkovApproximant(masses=[(2, 0, 1), (3, 1, 1)], n=10, k=1).fit()
    zs = [2 + 1j, 5.0, -3 + 0.5j]
    got = est.predict(zs)
    assert got.dtype == complex and got.shape == (3,)
    for z, v in zip(zs, est.predict_mp(zs)):
        want = R_nk(ordered, 10, 1, mpmath.mpc(z.real, z.imag) if isinstance(z, complex) else mpmath.mpf(z))
        assert abs(v - want) < mpmath.mpf(2) ** -200


def test_score_improves_with_degree():
    zs = np.array([2 + 1j, -2 + 1j, 5.0])
    low = MarkovApproximant(masses=[(2, 0), (3, 1)], n=5).fit().score(zs)
    high = MarkovApproximant(masses=[(2, 0), (3, 1)], n=15).fit().score(zs)
    assert high > low and high < 0


def test_plain_legendre_approximant():
    est = MarkovApproximant(n=25).fit()
    assert abs(est.predict([3.0])[0] - np.log(2)) < 1e-6
    assert abs(est.markov_function([3.0])[0] - np.log(2)) < 1e-15


def test_predict_before_fit():
    with pytest.raises(NotFittedError):
        MarkovApproximant().predict([3.0])


def test_unordered_product_refused():
    with pytest.raises(PreconditionError):
        MarkovApproximant(masses=[(3, 1), (2, 2)]).fit()
    est = MarkovApproximant(masses=[(3, 1), (2, 2)], n=4, require_ordered=False).fit()
    assert est.denominator_.degree == 5


def test_bad_parameters():
    with pytest.raises(ArgumentError):
        MarkovApproximant(k=0).fit()
    with pytest.raises(ArgumentError):
        MarkovApproximant(masses=[(2, 0, 1, 4)]).fit()
