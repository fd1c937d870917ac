'''Call-on-call (compound) option under the JMFBM model.'''

import math
from dataclasses import dataclass
from jmfbm import utils, stats
from jmfbm.model import (SeriesControl, TimeWindow, conditional_moments,
                         discount_factor, log_return_correlation,
                         poisson_weights, standardized_thresholds)
from jmfbm.pricing.vanilla import (VanillaCallSpec, PriceResult, CallSeries,
                                   _validate_spot)


@dataclass(frozen=True)
class CompoundCallSpec:
    '''Call with strike K1 and expiry T1 on a European call (K, T2).

    Attributes
    ----------
    outer_strike: float
        K1, paid at T1 to acquire the inner call. Zero is allowed (always
        exercised).
    outer_expiry: float
        T1.
    inner_strike: float
        K.
    inner_expiry: float
        T2.
    valuation_time: float
        T0 (default is 0).'''

    outer_strike: float
    outer_expiry: float
    inner_strike: float
    inner_expiry: float
    valuation_time: float = 0.0

    def __post_init__(self):
        if not (0 <= self.valuation_time < self.outer_expiry
                < self.inner_expiry):
            raise ValueError('Need 0 <= T0 < T1 < T2.')
        if not self.inner_strike > 0:
            raise ValueError('Inner strike must be positive.')
        if self.outer_strike < 0:
            raise ValueError('Outer strike must be non-negative.')

    @property
    def inner_call(self):
        '''The underlying call, valued at T1'''
        return VanillaCallSpec(self.inner_strike,
                               TimeWindow(self.outer_expiry, self.inner_expiry))

    def get_config(self):
        return {'k1': self.outer_strike,
                't1': self.outer_expiry,
                'k2': self.inner_strike,
                't2': self.inner_expiry,
                't0': self.valuation_time}


@dataclass(frozen=True)
class CriticalPrice:
    '''Spot at T1 where the inner call is worth exactly K1, with the absolute
    pricing residual at that spot. Zero when K1 is zero.'''

    value: float
    residual: float


def critical_price(params, spec, control=None, tol=utils.ROOT_TOLERANCE):
    '''Solves C(s; K, [T1, T2]) = K1 for s.'''

    if spec.outer_strike <= 0:
        return CriticalPrice(0.0, 0.0)
    inner = CallSeries(params, spec.inner_call, control)
    target = lambda s: inner(s) - spec.outer_strike
    forward_strike = spec.inner_strike*math.exp(
        -params.r*(spec.inner_expiry - spec.outer_expiry))
    start = spec.outer_strike + forward_strike
    bracket = stats.expand_bracket(target, start, scale=spec.inner_strike)
    root = stats.find_root(target, bracket, f_tol=tol)

    step = 1e-6*root
    if not inner(root + step) > inner(root - step):
        raise utils.BracketError(f'Inner call is flat around {root}, the '
                                 'critical price is not unique.')
    utils.log(f'Critical price S1* = {root:.12g}', level=2)
    return CriticalPrice(root, abs(target(root)))


def _correlation(params, t0, t1, t2, n1, m):
    '''Nested-interval correlation, 1 when both log-returns are deterministic
    (all thresholds are then infinite and the value is irrelevant).'''
    try:
        return log_return_correlation(params, t0, t1, t2, n1, m)
    except utils.DegenerateModelError:
        return 1.0


def _log_ratio(s0, barrier):
    '''ln(s0/barrier), +inf for a zero barrier and -inf for an infinite one'''
    if barrier <= 0:
        return math.inf
    if barrier == math.inf:
        return -math.inf
    return math.log(s0/barrier)


def compound_call_price(params, s0, spec, control=None, critical=None):
    '''Prices a compound call.

    Parameters
    ----------
    params: ModelParams
        Risk-neutral model.
    s0: float
        Spot at T0.
    spec: CompoundCallSpec
        Contract.
    control: SeriesControl
        Truncation of the double Poisson sum, split evenly over both
        dimensions (default is SeriesControl()).
    critical: CriticalPrice
        Skips the critical price solve if provided (default is None).'''

    _validate_spot(s0)
    control = SeriesControl() if control is None else control
    if critical is None:
        critical = critical_price(params, spec, control)
    t0, t1, t2 = spec.valuation_time, spec.outer_expiry, spec.inner_expiry
    first, full = TimeWindow(t0, t1), TimeWindow(t0, t2)
    per_dim = control.split(2)
    outer = poisson_weights(params.lambda_prime*first.length, per_dim)
    inner = poisson_weights(params.lambda_prime*(t2 - t1), per_dim)

    log_a = _log_ratio(s0, critical.value)
    log_b = math.log(s0/spec.inner_strike)
    carry = math.exp(-params.q*full.length)
    value = 0.0
    for n1, w1 in outer:
        a1, a2 = standardized_thresholds(log_a, conditional_moments(params,
                                                                    first, n1))
        payment = spec.outer_strike*discount_factor(params, first, n1)
        value -= w1*payment*stats.norm_cdf(a2)
        for n2, w2 in inner:
            m = n1 + n2
            b1, b2 = standardized_thresholds(
                log_b, conditional_moments(params, full, m))
            rho = _correlation(params, t0, t1, t2, n1, m)
            value += w1*w2*(
                s0*carry*stats.binorm_cdf(a1, b1, rho)
                - spec.inner_strike*discount_factor(params, full, m)
                * stats.binorm_cdf(a2, b2, rho))

    flags = set()
    if outer.truncated or inner.truncated:
        flags.add('truncated')
    return PriceResult(max(0.0, float(value)), (len(outer), len(inner)),
                       outer.shortfall + inner.shortfall, frozenset(flags),
                       {'critical_price': critical.value,
                        'critical_residual': critical.residual})
