'''Monte Carlo prices of the vanilla, compound and extendible calls, computed
from simulated asset prices only (or, for the outer-layer variants, with the
analytic call value as continuation at the first decision date).'''

import math
import numpy as np
from jmfbm.montecarlo.paths import McConfig, McEstimate, iterate_batches
from jmfbm.pricing.vanilla import CallSeries, _validate_spot
from jmfbm.pricing.compound import critical_price
from jmfbm.pricing.extendible import (NExtendibleSpec, critical_values,
                                      n_extendible_critical_values)


class RunningMoments:
    '''Streaming mean and sum of squared deviations, combined batch by batch
    (Chan et al. pairwise update).'''

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self.m2 = 0.0

    def update(self, values):
        values = np.asarray(values, dtype=float)
        count = len(values)
        if count == 0:
            return
        mean = float(values.mean())
        m2 = float(((values - mean)**2).sum())
        total = self.count + count
        delta = mean - self.mean
        self.mean += delta*count/total
        self.m2 += m2 + delta**2*self.count*count/total
        self.count = total

    @property
    def std_error(self):
        if self.count < 2:
            return 0.0
        return math.sqrt(self.m2/(self.count - 1)/self.count)


def _estimate(params, s0, t0, dates, config, payoff):
    '''Averages payoff(prices) over simulated prices at `dates` (absolute
    times after t0). For t0 > 0 the path is restarted from s0 at t0.'''

    _validate_spot(s0)
    config = McConfig() if config is None else config
    restart = t0 > 0
    dates = ([t0] if restart else []) + list(dates)
    moments = RunningMoments()
    for prices in iterate_batches(params, s0, dates, config):
        if restart:
            prices = s0*prices[:, 1:]/prices[:, :1]
        values = payoff(prices)
        if config.antithetic:
            half = len(values)//2
            values = 0.5*(values[:half] + values[half:])
        moments.update(values)
    paths = moments.count*(2 if config.antithetic else 1)
    return McEstimate(moments.mean, moments.std_error, paths)


def mc_vanilla_price(params, s0, spec, config=None):
    '''Discounted average of max(S_T - K, 0).'''
    window = spec.valuation_window
    discount = math.exp(-params.r*window.length)

    def payoff(prices):
        return discount*np.maximum(prices[:, 0] - spec.strike, 0.0)

    return _estimate(params, s0, window.t_start, [window.t_end], config,
                     payoff)


def mc_compound_price(params, s0, spec, config=None, nested=False,
                      critical=None, control=None):
    '''Monte Carlo compound call price.

    Parameters
    ----------
    nested: bool
        If True, simulates to T2 and exercises on {S_T1 > S1*}; otherwise
        exercises at T1 on the analytic inner call value (default is False).
    critical: CriticalPrice
        S1* for the nested variant (default is solved analytically).
    control: SeriesControl
        Truncation for the analytic inner call (default is SeriesControl()).'''

    t0, t1, t2 = spec.valuation_time, spec.outer_expiry, spec.inner_expiry
    discount1 = math.exp(-params.r*(t1 - t0))
    discount2 = math.exp(-params.r*(t2 - t0))

    if nested:
        if critical is None:
            critical = critical_price(params, spec, control)

        def payoff(prices):
            exercise = prices[:, 0] > critical.value
            call = np.maximum(prices[:, 1] - spec.inner_strike, 0.0)
            return exercise*(discount2*call - discount1*spec.outer_strike)

        return _estimate(params, s0, t0, [t1, t2], config, payoff)

    inner = CallSeries(params, spec.inner_call, control)

    def payoff(prices):
        return discount1*np.maximum(inner(prices[:, 0]) - spec.outer_strike,
                                    0.0)

    return _estimate(params, s0, t0, [t1], config, payoff)


def _policy_payoff(params, t0, stages, bounds):
    '''Payoff of the extension policy given by (L_j, M_j) on simulated
    prices at every stage expiry'''

    discounts = [math.exp(-params.r*(stage.expiry - t0)) for stage in stages]

    def payoff(prices):
        alive = np.ones(len(prices), dtype=bool)
        value = np.zeros(len(prices))
        for j, (lower, upper) in enumerate(bounds):
            spot = prices[:, j]
            exercise = alive & (spot >= upper)
            extend = alive & (spot >= lower) & (spot < upper)
            value += discounts[j]*(exercise*(spot - stages[j].strike)
                                   - extend*stages[j + 1].premium)
            alive = extend
        last = len(stages) - 1
        value += discounts[last]*alive*np.maximum(
            prices[:, last] - stages[last].strike, 0.0)
        return value

    return payoff


def mc_extendible_price(params, s0, spec, config=None, nested=True,
                        critical=None, control=None):
    '''Monte Carlo extendible call price under the (L, M) policy: exercise
    at T1 if S >= M, pay A and extend if L <= S < M, else abandon.

    With `nested` (default) the extended call is simulated to T2; otherwise
    it is valued at T1 by the analytic call price. `critical` overrides the
    (L, M) pair of the spec or the solver.'''

    if critical is not None:
        lower, upper = critical
    elif spec.critical_values is None:
        values = critical_values(params, spec, control)
        lower, upper = values.lower, values.upper
    else:
        lower, upper = spec.critical_values
    t0, t1 = spec.valuation_time, spec.expiry1

    if nested:
        nspec = NExtendibleSpec.from_extendible(spec)
        payoff = _policy_payoff(params, t0, nspec.stages, [(lower, upper)])
        return _estimate(params, s0, t0, [t1, spec.expiry2], config, payoff)

    extension = CallSeries(params, spec.extension, control)
    discount1 = math.exp(-params.r*(t1 - t0))

    def payoff(prices):
        spot = prices[:, 0]
        exercise = spot >= upper
        extend = (spot >= lower) & ~exercise
        value = np.zeros(len(spot))
        value[exercise] = spot[exercise] - spec.strike1
        value[extend] = extension(spot[extend]) - spec.premium
        return discount1*value

    return _estimate(params, s0, t0, [t1], config, payoff)


def mc_n_extendible_price(params, s0, nspec, config=None, control=None):
    '''Monte Carlo N-extendible call price, simulating every stage under the
    backward-induction policy (or the supplied critical values).'''

    bounds = nspec.critical_values
    if bounds is None:
        bounds = n_extendible_critical_values(params, nspec, control)
    payoff = _policy_payoff(params, nspec.valuation_time, nspec.stages, bounds)
    return _estimate(params, s0, nspec.valuation_time,
                     [stage.expiry for stage in nspec.stages], config, payoff)
