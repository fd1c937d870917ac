'''European call under the JMFBM model: a Poisson-weighted series of mixed
fractional Black-Scholes prices.'''

import math
import numpy as np
from dataclasses import dataclass, field
from scipy import special
from jmfbm import utils
from jmfbm.model import (SeriesControl, TimeWindow, conditional_moments,
                         discount_factor, poisson_weights,
                         standardized_thresholds)


@dataclass(frozen=True)
class VanillaCallSpec:
    '''European call with strike K over the window [T0, T].'''

    strike: float
    valuation_window: TimeWindow

    def __post_init__(self):
        if not self.strike > 0:
            raise ValueError('Strike must be positive.')

    def get_config(self):
        return {'strike': self.strike,
                't0':     self.valuation_window.t_start,
                'expiry': self.valuation_window.t_end}


@dataclass(frozen=True)
class PriceResult:
    '''Option value with series diagnostics.

    Attributes
    ----------
    value: float
        Present value at the valuation time, non-negative.
    terms_used: tuple[int]
        Number of Poisson terms summed per jump-count dimension.
    tail_shortfall: float
        Poisson probability mass left out of the sums.
    flags: frozenset[str]
        Diagnostics; 'truncated' when a series hit its term cap.
    details: dict
        Intermediate quantities (critical prices, their residuals).'''

    value: float
    terms_used: tuple
    tail_shortfall: float
    flags: frozenset = frozenset()
    details: dict = field(default_factory=dict)

    @property
    def flagged(self):
        return len(self.flags) > 0

    def get_config(self):
        return {'price':          self.value,
                'terms_used':     'x'.join(str(n) for n in self.terms_used),
                'tail_shortfall': self.tail_shortfall,
                'flags':          ';'.join(sorted(self.flags)),
                **self.details}


def _validate_spot(s0):
    if not (s0 > 0 and math.isfinite(s0)):
        raise ValueError('Spot price must be positive and finite.')


class CallSeries:
    '''Call value as a function of the spot at the window start, for a fixed
    contract. The Poisson series, conditional moments and jump-adjusted
    discounts are computed once; calls accept scalars or numpy arrays.'''

    def __init__(self, params, spec, control=None):
        control = SeriesControl() if control is None else control
        window = spec.valuation_window
        self.params = params
        self.spec = spec
        self.series = poisson_weights(params.lambda_prime*window.length,
                                      control)
        counts = self.series.counts
        self.weights = self.series.weights
        self.moments = conditional_moments(params, window, counts)
        self.discounts = discount_factor(params, window, counts)
        self.carry = math.exp(-params.q*window.length)

    def terms(self, s):
        '''Single-jump-count prices, shape (..., terms)'''
        s = np.asarray(s, dtype=float)
        with np.errstate(divide='ignore'):
            log_ratio = np.log(s/self.spec.strike)[..., np.newaxis]
        z1, z2 = standardized_thresholds(log_ratio, self.moments)
        return (s[..., np.newaxis]*self.carry*special.ndtr(z1)
                - self.spec.strike*self.discounts*special.ndtr(z2))

    def __call__(self, s):
        value = np.maximum((self.weights*self.terms(s)).sum(axis=-1), 0.0)
        return float(value) if value.ndim == 0 else value

    def result(self, s0):
        flags = frozenset({'truncated'}) if self.series.truncated else frozenset()
        return PriceResult(self(s0), (len(self.series),),
                           self.series.shortfall, flags)


def call_price(params, s0, spec, control=None):
    '''Prices a European call on spot `s0` (PriceResult).'''
    _validate_spot(s0)
    result = CallSeries(params, spec, control).result(s0)
    utils.log(f'Vanilla call: {result.value:.10g} '
              f'({result.terms_used[0]} terms)', level=2)
    return result


def call_price_in_spot(params, spec, control=None):
    '''Strictly increasing map s -> call value, for root solving and
    vectorized evaluation over simulated spots.'''
    return CallSeries(params, spec, control)
