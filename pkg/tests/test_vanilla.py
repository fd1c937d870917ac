import math
import pytest
import numpy as np
from scipy import stats as sps
from conftest import black_scholes
from jmfbm import utils
from jmfbm.model import ModelParams, TimeWindow, SeriesControl, poisson_weights
from jmfbm.pricing import (VanillaCallSpec, call_price, call_price_in_spot)


def merton_price(params, s0, strike, tau, terms):
    '''Jump-diffusion price with Brownian variance 2*sigma^2 per year, summed
    over the first `terms` jump counts'''
    lam_prime = params.lam*(1 + params.k)
    total = 0.0
    for n in range(terms):
        rate = params.r - params.lam*params.k + n*math.log1p(params.k)/tau
        variance = 2*params.sigma**2*tau + n*params.sigma_j**2
        total += sps.poisson.pmf(n, lam_prime*tau)*black_scholes(
            s0, strike, tau, rate, variance, params.q)
    return total


def random_params(rng, **fixed):
    values = {'r': rng.uniform(0.0, 0.12), 'sigma': rng.uniform(0.05, 0.5),
              'hurst': rng.uniform(0.1, 0.9), 'lam': rng.uniform(0, 2),
              'k': rng.uniform(-0.3, 0.3), 'sigma_j': rng.uniform(0, 0.4),
              'q': rng.uniform(0, 0.04)}
    values.update(fixed)
    return ModelParams(**values)


class TestReductions:

    @pytest.mark.parametrize('s0', [80, 90, 100, 110, 120])
    @pytest.mark.parametrize('strike', [80, 90, 100, 110, 120])
    @pytest.mark.parametrize('tau', [0.1, 0.5, 1.0, 2.0, 3.0])
    def test_black_scholes(self, s0, strike, tau):
        params = ModelParams(r=0.05, sigma=0.2, hurst=0.5)
        spec = VanillaCallSpec(strike, TimeWindow(0, tau))
        expected = black_scholes(s0, strike, tau, 0.05, 2*0.04*tau)
        assert call_price(params, s0, spec).value == pytest.approx(
            expected, rel=1e-12, abs=1e-12)

    def test_fractional_window(self):
        params = ModelParams(r=0.03, sigma=0.25, hurst=0.75, q=0.01)
        window = TimeWindow(0.5, 2.0)
        spec = VanillaCallSpec(105, window)
        variance = 0.0625*1.5 + 0.0625*(2.0**1.5 - 0.5**1.5)
        expected = black_scholes(100, 105, 1.5, 0.03, variance, q=0.01)
        assert call_price(params, 100, spec).value == pytest.approx(expected,
                                                                    abs=1e-12)

    @pytest.mark.parametrize('strike', [70, 100, 140])
    def test_merton(self, strike):
        params = ModelParams(r=0.04, sigma=0.2, hurst=0.5, lam=1.2, k=-0.1,
                             sigma_j=0.25, q=0.02)
        spec = VanillaCallSpec(strike, TimeWindow(0, 1.5))
        result = call_price(params, 100, spec)
        expected = merton_price(params, 100, strike, 1.5, result.terms_used[0])
        assert result.value == pytest.approx(expected, abs=1e-10)

    def test_neutral_jumps(self):
        '''Jumps of size one leave the price unchanged'''
        control = SeriesControl(1e-15)
        spec = VanillaCallSpec(11, TimeWindow(0, 2.0))
        base = ModelParams(r=0.05, sigma=0.3, hurst=0.7)
        jumps = base.replace(lam=2.0)
        assert call_price(jumps, 10, spec, control).value == pytest.approx(
            call_price(base, 10, spec, control).value, abs=1e-12)

    def test_mixture(self, rng):
        '''Value equals the weighted sum of single-jump-count prices'''
        params = ModelParams(r=0.06, sigma=0.3, hurst=0.65, lam=0.8, k=0.15,
                             sigma_j=0.2, q=0.01)
        window = TimeWindow(0.2, 1.2)
        series = poisson_weights(params.lambda_prime*window.length)
        for s0, strike in rng.uniform(0.8, 1.2, size=(20, 2)):
            spec = VanillaCallSpec(strike, window)
            total = 0.0
            for n, weight in series:
                variance = (0.09*1.0 + 0.09*(1.2**1.3 - 0.2**1.3)
                            + n*0.04)
                rate = 0.06 - 0.8*0.15 + n*math.log(1.15)/1.0
                total += weight*black_scholes(s0, strike, 1.0, rate, variance,
                                              q=0.01)
            assert call_price(params, s0, spec).value == pytest.approx(
                total, abs=1e-14)


class TestLimits:

    @pytest.mark.parametrize('intensity', [0.1, 1.0, 5.0])
    def test_truncation(self, intensity):
        params = ModelParams(r=0.05, sigma=0.2, hurst=0.6, lam=intensity,
                             k=0.0, sigma_j=0.3)
        spec = VanillaCallSpec(100, TimeWindow(0, 1.0))
        result = call_price(params, 100, spec)
        assert result.tail_shortfall < utils.TAIL_TOLERANCE
        assert not result.flagged
        wider = call_price(params, 100, spec, SeriesControl(max_terms=340))
        assert abs(wider.value - result.value) < 1e-10

    def test_truncation_flag(self):
        params = ModelParams(r=0.05, sigma=0.2, hurst=0.6, lam=5.0)
        spec = VanillaCallSpec(100, TimeWindow(0, 1.0))
        with pytest.warns(utils.ConvergenceWarning):
            result = call_price(params, 100, spec, SeriesControl(max_terms=2))
        assert 'truncated' in result.flags
        assert result.flagged

    def test_vanishing_strike(self, desk):
        spec = VanillaCallSpec(1e-12, TimeWindow(0, 1.0))
        value = call_price(desk, 10, spec, SeriesControl(1e-15)).value
        assert value == pytest.approx(10 - 1e-12*math.exp(-desk.r), abs=1e-12)

    def test_zero_volatility(self):
        params = ModelParams(r=0.05, sigma=0.0, hurst=0.7, q=0.01)
        spec = VanillaCallSpec(95, TimeWindow(0, 2.0))
        value = call_price(params, 100, spec).value
        expected = 100*math.exp(-0.02) - 95*math.exp(-0.1)
        assert value == pytest.approx(expected, abs=1e-12)
        out = call_price(params, 80, spec).value
        assert out == 0.0

    def test_near_deterministic(self):
        params = ModelParams(r=0.05, sigma=1e-8, hurst=0.3)
        spec = VanillaCallSpec(100, TimeWindow(0, 1.0))
        value = call_price(params, 100, spec).value
        assert value == pytest.approx(100 - 100*math.exp(-0.05), abs=1e-6)

    def test_invalid(self, desk):
        with pytest.raises(ValueError):
            VanillaCallSpec(0.0, TimeWindow(0, 1.0))
        spec = VanillaCallSpec(100, TimeWindow(0, 1.0))
        with pytest.raises(ValueError):
            call_price(desk, 0.0, spec)


class TestNoArbitrage:

    def test_bounds(self, rng):
        for _ in range(100):
            params = random_params(rng)
            t0 = rng.uniform(0, 1)
            window = TimeWindow(t0, t0 + rng.uniform(0.05, 3))
            s0, strike = rng.uniform(50, 150, 2)
            value = call_price(params, s0,
                               VanillaCallSpec(strike, window)).value
            carry = s0*math.exp(-params.q*window.length)
            floor = carry - strike*math.exp(-params.r*window.length)
            assert max(0.0, floor) - 1e-9 <= value <= carry + 1e-12

    def test_monotone(self, rng):
        for _ in range(100):
            params = random_params(rng)
            window = TimeWindow(0, rng.uniform(0.05, 3))
            s0, strike = rng.uniform(50, 150, 2)
            value = call_price(params, s0,
                               VanillaCallSpec(strike, window)).value
            higher_strike = call_price(
                params, s0, VanillaCallSpec(1.05*strike, window)).value
            higher_spot = call_price(params, 1.05*s0,
                                     VanillaCallSpec(strike, window)).value
            assert higher_strike <= value + 1e-12
            assert higher_spot >= value - 1e-12


class TestCallSeries:

    def test_vectorized(self, desk):
        series = call_price_in_spot(desk, VanillaCallSpec(100, TimeWindow(1, 2)))
        spots = np.linspace(60, 140, 33)
        values = series(spots)
        for spot, value in zip(spots, values):
            assert series(spot) == pytest.approx(value, rel=1e-14, abs=1e-300)
        assert all(np.diff(values) > 0)

    def test_result_matches_price(self, desk):
        spec = VanillaCallSpec(100, TimeWindow(0, 1))
        series = call_price_in_spot(desk, spec)
        assert series.result(95).value == call_price(desk, 95, spec).value

    def test_zero_spot(self, desk):
        series = call_price_in_spot(desk, VanillaCallSpec(100, TimeWindow(0, 1)))
        assert series(0.0) == 0.0
