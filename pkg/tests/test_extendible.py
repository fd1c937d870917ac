import math
import pytest
from jmfbm import utils
from jmfbm.model import ModelParams, TimeWindow, SeriesControl
from jmfbm.pricing import (ExtendibleCallSpec, ExtensionStage, NExtendibleSpec,
                           VanillaCallSpec, call_price, call_price_in_spot,
                           critical_values, extendible_call_price,
                           mfbm_extendible_price, n_extendible_critical_values,
                           n_extendible_price, richardson_extrapolate)


@pytest.fixture
def contract():
    return ExtendibleCallSpec(100, 1.0, 105, 2.0, premium=2.0)


class TestCriticalValues:

    def test_residuals(self, desk, contract):
        values = critical_values(desk, contract)
        assert 0 < values.lower < contract.strike1 < values.upper
        assert abs(values.lower_residual) < 1e-9
        assert abs(values.upper_residual) < 1e-9

        continuation = call_price_in_spot(desk, contract.extension)
        assert continuation(values.lower) == pytest.approx(2.0, abs=1e-9)
        assert (continuation(values.upper) - 2.0
                == pytest.approx(values.upper - 100, abs=1e-9))

    def test_deterministic(self, desk, contract):
        assert critical_values(desk, contract) == critical_values(desk,
                                                                  contract)

    def test_lower_falls_with_premium(self, desk):
        lower = [critical_values(desk, ExtendibleCallSpec(100, 1, 105, 2,
                                                          premium)).lower
                 for premium in (0.5, 1.0, 2.0, 4.0)]
        assert lower == sorted(lower)
        free = critical_values(desk, ExtendibleCallSpec(100, 1, 105, 2, 0.0))
        assert free.lower == 0.0

    def test_extension_always_preferred(self):
        '''Without volatility, extending for less than the discounted strike
        gap beats exercise at every spot'''
        params = ModelParams(r=0.05, sigma=0.0, hurst=0.6)
        spec = ExtendibleCallSpec(110, 1.0, 100, 2.0, premium=2.0)
        with pytest.raises(utils.NoExtensionRegionError) as info:
            critical_values(params, spec)
        assert info.value.kind == 'always'
        assert info.value.lower == pytest.approx(2.0 + 100*math.exp(-0.05),
                                                 abs=1e-9)

    def test_extension_never_pays(self, desk):
        spec = ExtendibleCallSpec(100, 1.0, 100, 2.0, premium=50.0)
        with pytest.raises(utils.NoExtensionRegionError) as info:
            critical_values(desk, spec)
        assert info.value.kind == 'never'
        with pytest.raises(utils.NoExtensionRegionError):
            extendible_call_price(desk, 100, spec)


class TestExtendiblePrice:

    def test_no_extension_region_is_vanilla(self, desk):
        control = SeriesControl(1e-14)
        spec = ExtendibleCallSpec(100, 1.0, 105, 2.0, premium=2.0,
                                  critical_values=(100, 100))
        value = extendible_call_price(desk, 97, spec, control)
        vanilla = call_price(desk, 97, VanillaCallSpec(100, TimeWindow(0, 1)),
                             control)
        assert value.value == pytest.approx(vanilla.value, abs=1e-10)
        assert value.details['critical_source'] == 'supplied'
        assert value.details['l'] == value.details['m'] == 100

    @pytest.mark.parametrize('params, s0, spec', [
        (ModelParams(r=0.3, sigma=0.4, hurst=0.8),
         1.2, ExtendibleCallSpec(1.0, 0.5, 1.2, 1.0, premium=0.02)),
        (ModelParams(r=0.05, sigma=0.25, hurst=0.6, q=0.01),
         1.0, ExtendibleCallSpec(1.0, 0.7, 1.05, 1.5, premium=0.01,
                                 valuation_time=0.2)),
    ])
    def test_mixed_fractional_closed_form(self, params, s0, spec):
        series = extendible_call_price(params, s0, spec)
        closed = mfbm_extendible_price(params, s0, spec)
        assert series.terms_used == (1, 1)
        assert series.details['l'] == closed.details['l']
        assert series.value == pytest.approx(closed.value, abs=1e-14)

    def test_closed_form_requires_no_jumps(self, desk, contract):
        with pytest.raises(ValueError):
            mfbm_extendible_price(desk, 100, contract)

    def test_dominates_vanilla(self, desk, contract):
        value = extendible_call_price(desk, 100, contract).value
        vanilla = call_price(desk, 100, VanillaCallSpec(100, TimeWindow(0, 1)))
        assert value > vanilla.value

    def test_deep_in_the_money(self, desk, contract):
        upper = critical_values(desk, contract).upper
        s0 = 50*upper
        value = extendible_call_price(desk, s0, contract).value
        assert value == pytest.approx(s0 - 100*math.exp(-desk.r), rel=1e-9)

    def test_premium_bound(self, desk, contract):
        '''Paying the premium costs at most A*exp(-r*T1)'''
        value = extendible_call_price(desk, 100, contract).value
        free = extendible_call_price(desk, 100, ExtendibleCallSpec(
            100, 1.0, 105, 2.0, premium=0.0)).value
        assert free - 2.0*math.exp(-desk.r) - 1e-9 <= value <= free + 1e-10

    def test_monotone_in_premium(self, rng):
        for _ in range(100):
            params = ModelParams(r=rng.uniform(0, 0.1),
                                 sigma=rng.uniform(0.1, 0.4),
                                 hurst=rng.uniform(0.2, 0.9),
                                 lam=rng.uniform(0, 1), k=rng.uniform(-0.2, 0.2),
                                 sigma_j=rng.uniform(0, 0.3))
            t1 = rng.uniform(0.25, 1.0)
            t2 = t1 + rng.uniform(0.25, 1.0)
            strike2 = 100*rng.uniform(1.2, 1.4)
            s0 = rng.uniform(80, 120)
            extension = VanillaCallSpec(strike2, TimeWindow(t1, t2))
            premium = rng.uniform(0.05, 0.5)*call_price_in_spot(
                params, extension)(100.0)
            values = [extendible_call_price(params, s0, ExtendibleCallSpec(
                100, t1, strike2, t2, a)).value for a in (premium, 1.5*premium)]
            vanilla = call_price(params, s0,
                                 VanillaCallSpec(100, TimeWindow(0, t1)))
            assert values[1] <= values[0] + 1e-10
            assert values[1] >= vanilla.value - 1e-9
            # Premium-paid lower bound
            assert values[0] >= (vanilla.value - premium*math.exp(-params.r*t1)
                                 - 1e-10)

    def test_diagnostics(self, desk, contract):
        result = extendible_call_price(desk, 100, contract)
        config = result.get_config()
        assert config['critical_source'] == 'solved'
        for key in ('price', 'terms_used', 'tail_shortfall', 'l', 'm',
                    'l_residual', 'm_residual'):
            assert key in config
        assert result.tail_shortfall < utils.TAIL_TOLERANCE

    def test_invalid(self):
        with pytest.raises(ValueError):
            ExtendibleCallSpec(100, 2.0, 105, 1.0, premium=1.0)
        with pytest.raises(ValueError):
            ExtendibleCallSpec(100, 1.0, 105, 2.0, premium=-1.0)
        with pytest.raises(ValueError):
            ExtendibleCallSpec(100, 1.0, 105, 2.0, premium=1.0,
                               critical_values=(110, 90))
        with pytest.raises(ValueError):
            ExtendibleCallSpec(100, 1.0, 105, 2.0, premium=1.0,
                               critical_values=(-1.0, 110))

    @pytest.mark.parametrize('premium, valid', [(0.0, True), (1.0, False)])
    def test_zero_lower_critical_value(self, desk, premium, valid):
        '''A zero L is accepted exactly when extending is free, by both
        contract types'''
        bounds = (0.0, 130.0)
        if not valid:
            with pytest.raises(ValueError):
                ExtendibleCallSpec(100, 1.0, 105, 2.0, premium,
                                   critical_values=bounds)
            with pytest.raises(ValueError):
                NExtendibleSpec(((1.0, 100), (2.0, 105, premium)), 0.0,
                                (bounds,))
            return
        spec = ExtendibleCallSpec(100, 1.0, 105, 2.0, premium,
                                  critical_values=bounds)
        single = extendible_call_price(desk, 100, spec)
        general = n_extendible_price(desk, 100,
                                     NExtendibleSpec.from_extendible(spec))
        assert single.details['l_residual'] == 0.0
        assert general.details['l1_residual'] == 0.0
        assert general.value == pytest.approx(single.value, abs=1e-10)

    def test_free_extension_round_trip(self, desk):
        '''Solved values of a free extension price identically when
        supplied'''
        free = ExtendibleCallSpec(100, 1.0, 105, 2.0, 0.0)
        solved = extendible_call_price(desk, 100, free)
        assert solved.details['l'] == 0.0
        bounds = (solved.details['l'], solved.details['m'])
        supplied = extendible_call_price(desk, 100, ExtendibleCallSpec(
            100, 1.0, 105, 2.0, 0.0, critical_values=bounds))
        assert supplied.value == solved.value


def test_richardson():
    assert richardson_extrapolate(0.0, 0.0) == 0.0
    assert richardson_extrapolate(3.25, 3.25) == 3.25
    assert richardson_extrapolate(1.0, 1.5) == 2.0


class TestNExtendible:

    def test_spec_validation(self):
        stages = [(1, 100), (2, 105, 2.0), (3, 110, 2.0), (4, 115, 2.0),
                  (5, 120, 2.0)]
        with pytest.raises(ValueError):
            NExtendibleSpec(tuple(stages))
        with pytest.raises(ValueError):
            NExtendibleSpec(((1, 100, 1.0), (2, 105, 2.0)))
        with pytest.raises(ValueError):
            NExtendibleSpec(((2, 100), (1, 105, 2.0)))
        spec = NExtendibleSpec(tuple(stages[:3]))
        assert spec.extensions == 2
        assert spec.stages[1] == ExtensionStage(2, 105, 2.0)

    def test_single_extension_matches_extendible(self, desk, contract):
        single = extendible_call_price(desk, 100, contract)
        general = n_extendible_price(desk, 100,
                                     NExtendibleSpec.from_extendible(contract))
        assert general.value == pytest.approx(single.value, abs=1e-10)
        assert general.details['l1'] == pytest.approx(single.details['l'],
                                                      abs=1e-9)
        assert general.details['m1'] == pytest.approx(single.details['m'],
                                                      abs=1e-9)

    def test_prohibitive_second_premium(self):
        params = ModelParams(r=0.05, sigma=0.25, hurst=0.7)
        two = NExtendibleSpec(((1.0, 100), (2.0, 105, 2.0), (3.0, 110, 1e6)))
        one = NExtendibleSpec(((1.0, 100), (2.0, 105, 2.0)))
        bounds = n_extendible_critical_values(params, two)
        assert bounds[1] == (105, 105)
        assert n_extendible_price(params, 100, two).value == pytest.approx(
            n_extendible_price(params, 100, one).value, abs=1e-10)

    def test_unbounded_region(self):
        params = ModelParams(r=0.05, sigma=0.0, hurst=0.6)
        spec = NExtendibleSpec(((1.0, 110), (2.0, 100, 2.0)))
        (lower, upper), = n_extendible_critical_values(params, spec)
        assert upper == math.inf
        assert lower == pytest.approx(2.0 + 100*math.exp(-0.05), abs=1e-9)
        # Extends above L, receiving S - 100 at T2
        value = n_extendible_price(params, 100, spec).value
        expected = (100 - 100*math.exp(-0.1)) - 2.0*math.exp(-0.05)
        assert value == pytest.approx(expected, abs=1e-9)

    def test_two_extensions(self):
        params = ModelParams(r=0.05, sigma=0.25, hurst=0.7)
        two = NExtendibleSpec(((1.0, 100), (2.0, 105, 2.0), (3.0, 110, 2.0)))
        one = NExtendibleSpec(two.stages[:2])
        result = n_extendible_price(params, 100, two)
        bounds = [(result.details[f'l{j}'], result.details[f'm{j}'])
                  for j in (1, 2)]
        assert all(0 < lower <= upper for lower, upper in bounds)
        assert result.terms_used == (1, 1, 1)
        for j in (1, 2):
            assert abs(result.details[f'l{j}_residual']) < 1e-9
            assert abs(result.details[f'm{j}_residual']) < 1e-9
        assert result.value >= n_extendible_price(params, 100,
                                                  one).value - 1e-7

    def test_supplied_bounds(self):
        params = ModelParams(r=0.05, sigma=0.25, hurst=0.7)
        stages = ((1.0, 100), (2.0, 105, 2.0))
        solved = n_extendible_price(params, 100, NExtendibleSpec(stages))
        bounds = ((solved.details['l1'], solved.details['m1']),)
        supplied = n_extendible_price(params, 100,
                                      NExtendibleSpec(stages, 0.0, bounds))
        assert supplied.details['critical_source'] == 'supplied'
        assert supplied.value == solved.value
        assert supplied.details['l1_residual'] == pytest.approx(
            solved.details['l1_residual'], abs=1e-12)

    @pytest.mark.slow
    def test_three_extensions(self):
        params = ModelParams(r=0.05, sigma=0.25, hurst=0.7)
        three = NExtendibleSpec(((1.0, 100), (2.0, 105, 2.0), (3.0, 110, 2.0),
                                 (4.0, 115, 2.0)))
        two = NExtendibleSpec(three.stages[:3])
        value = n_extendible_price(params, 100, three).value
        assert math.isfinite(value)
        assert value >= n_extendible_price(params, 100, two).value - 1e-7
