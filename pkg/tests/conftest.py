import math
import pytest
import numpy as np
from scipy import special
from jmfbm import utils
from jmfbm.model import ModelParams


@pytest.fixture(autouse=True)
def quiet(monkeypatch):
    monkeypatch.setattr(utils, 'VERBOSE', 0)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def desk():
    '''Jumps with a persistent fractional component'''
    return ModelParams(r=0.05, sigma=0.2, hurst=0.8, lam=0.5, k=-0.05,
                       sigma_j=0.15)


@pytest.fixture
def brownian():
    '''Pure mixed Brownian dynamics (H = 1/2, no jumps)'''
    return ModelParams(r=0.05, sigma=0.2, hurst=0.5)


def black_scholes(s0, strike, tau, rate, variance, q=0.0):
    '''Call price for a lognormal terminal price with the given total
    log-variance'''
    std = math.sqrt(variance)
    d1 = (math.log(s0/strike) + (rate - q)*tau + 0.5*variance)/std
    d2 = d1 - std
    return (s0*math.exp(-q*tau)*special.ndtr(d1)
            - strike*math.exp(-rate*tau)*special.ndtr(d2))
