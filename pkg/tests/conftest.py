from fractions import Fraction

import mpmath
import pytest

from sobolev_markov.measures import MeasureSpec
from sobolev_markov.sobolev import MassTerm, SobolevProduct


@pytest.fixture(autouse=True)
def _default_precision():
    with mpmath.workprec(256):
        yield


@pytest.fixture(scope="session")
def ordered():
    """w = 1 with f(2)g(2) + f'(3)g'(3); d = 3, N = 2."""
    return SobolevProduct(MeasureSpec(), (MassTerm(2, 0, 1), MassTerm(3, 1, 1)))


@pytest.fixture(scope="session")
def plain():
    return SobolevProduct(MeasureSpec(), ())


@pytest.fixture(scope="session")
def example1():
    return SobolevProduct(MeasureSpec(), (MassTerm(3, 1, 1), MassTerm(2, 2, 1)))


@pytest.fixture(scope="session")
def example2():
    return SobolevProduct(MeasureSpec((1, -1)), (MassTerm(3, 1, 1), MassTerm(2, 2, 1)))


def fr(*args):
    return Fraction(*args)
