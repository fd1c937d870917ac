'''Holder-extendible calls under the JMFBM model: the single-extension
contract, its no-jump closed form, the N-times extendible generalization and
two-point Richardson extrapolation.'''

import math
import itertools
import numpy as np
from dataclasses import dataclass
from jmfbm import utils, stats
from jmfbm.model import (SeriesControl, TimeWindow, conditional_moments,
                         discount_factor, poisson_weights,
                         standardized_thresholds)
from jmfbm.pricing.vanilla import (VanillaCallSpec, PriceResult, CallSeries,
                                   _validate_spot)
from jmfbm.pricing.compound import _correlation, _log_ratio

MAX_EXTENSIONS = 3


def _check_critical_values(lower, upper, premium):
    '''Exogenous (L, M) need 0 <= L <= M, with L = 0 only for a free
    extension (where it is also the solved value).'''
    if not 0 <= lower <= upper:
        raise ValueError('Critical values need 0 <= L <= M.')
    if lower == 0 and premium > 0:
        raise ValueError('L = 0 needs a zero extension premium.')


@dataclass(frozen=True)
class ExtendibleCallSpec:
    '''Call (K1, T1) whose holder may, at T1, pay premium A to extend it to a
    call (K2, T2).

    Attributes
    ----------
    strike1, expiry1: float
        Initial strike K1 and expiry T1.
    strike2, expiry2: float
        Extended strike K2 and expiry T2.
    premium: float
        Extension premium A, paid at T1.
    valuation_time: float
        T0 (default is 0).
    critical_values: tuple[float, float] | None
        Exogenous (L, M) bypassing the solver (default is None).'''

    strike1: float
    expiry1: float
    strike2: float
    expiry2: float
    premium: float
    valuation_time: float = 0.0
    critical_values: tuple = None

    def __post_init__(self):
        if not 0 <= self.valuation_time < self.expiry1 < self.expiry2:
            raise ValueError('Need 0 <= T0 < T1 < T2.')
        if not (self.strike1 > 0 and self.strike2 > 0):
            raise ValueError('Strikes must be positive.')
        if self.premium < 0:
            raise ValueError('Premium must be non-negative.')
        if self.critical_values is not None:
            _check_critical_values(*self.critical_values, self.premium)

    @property
    def extension(self):
        '''The call obtained by extending, valued at T1'''
        return VanillaCallSpec(self.strike2,
                               TimeWindow(self.expiry1, self.expiry2))

    def get_config(self):
        config = {'k1':      self.strike1,
                  't1':      self.expiry1,
                  'k2':      self.strike2,
                  't2':      self.expiry2,
                  'premium': self.premium,
                  't0':      self.valuation_time}
        if self.critical_values is not None:
            config['l'], config['m'] = self.critical_values
        return config


@dataclass(frozen=True)
class CriticalValues:
    '''Extension region [lower, upper) at a decision date, with the residuals
    of the two indifference conditions: continuation(L) - A and
    M - K - continuation(M) + A.'''

    lower: float
    upper: float
    lower_residual: float = 0.0
    upper_residual: float = 0.0

    def get_config(self):
        return {'l': self.lower, 'm': self.upper,
                'l_residual': self.lower_residual,
                'm_residual': self.upper_residual}


def stage_residuals(continuation, strike, premium, lower, upper):
    '''Indifference residuals of (L, M) for a given continuation value'''
    lower_residual = continuation(lower) - premium if lower > 0 else -premium
    if math.isfinite(upper):
        upper_residual = upper - strike - continuation(upper) + premium
    else:
        upper_residual = math.nan
    return lower_residual, upper_residual


def solve_stage(continuation, strike, premium, scale, tol=utils.ROOT_TOLERANCE):
    '''Critical values of one extension decision.

    L solves continuation(s) = premium (zero when the premium is zero) and M
    solves continuation(s) - premium = s - strike above L. Raises
    NoExtensionRegionError with kind 'never' when L >= strike and kind
    'always' when no finite M exists.'''

    if premium > 0:
        keep = lambda s: continuation(s) - premium
        bracket = stats.expand_bracket(keep, premium + scale, scale=scale)
        lower = stats.find_root(keep, bracket, f_tol=tol)
    else:
        lower = 0.0
    if lower >= strike:
        raise utils.NoExtensionRegionError(
            f'Extension is never optimal (L = {lower:.6g} >= strike '
            f'{strike:.6g}): the contract is a plain call.', 'never', lower)

    switch = lambda s: continuation(s) - premium - (s - strike)
    floor = lower if lower > 0 else strike/utils.BRACKET_LIMIT
    if switch(strike) <= 0:
        bracket = stats.Bracket(floor, strike)
    else:
        try:
            bracket = stats.expand_bracket(switch, strike, increasing=False,
                                           scale=scale)
        except utils.BracketError:
            raise utils.NoExtensionRegionError(
                'Extension beats exercise at every spot above L.', 'always',
                lower)
        bracket = stats.Bracket(max(floor, bracket.lo), bracket.hi)
    upper = stats.find_root(switch, bracket, f_tol=tol)
    if upper < lower:
        raise utils.BracketError(f'Solved M = {upper} below L = {lower}.')
    residuals = stage_residuals(continuation, strike, premium, lower, upper)
    return CriticalValues(lower, upper, *residuals)


def critical_values(params, spec, control=None, tol=utils.ROOT_TOLERANCE):
    '''Solves the (L, M) indifference conditions of an extendible call.'''
    continuation = CallSeries(params, spec.extension, control)
    values = solve_stage(continuation, spec.strike1, spec.premium,
                         max(spec.strike1, spec.strike2), tol)
    utils.log(f'Critical values L = {values.lower:.12g}, '
              f'M = {values.upper:.12g}', level=2)
    return values


def _resolve_critical_values(params, spec, control):
    if spec.critical_values is None:
        return critical_values(params, spec, control), 'solved'
    lower, upper = spec.critical_values
    continuation = CallSeries(params, spec.extension, control)
    residuals = stage_residuals(continuation, spec.strike1, spec.premium,
                                lower, upper)
    return CriticalValues(lower, upper, *residuals), 'supplied'


def _finish(value, series, details, s0):
    flags = set()
    if any(s.truncated for s in series):
        flags.add('truncated')
    if value < -1e-10*s0:
        # Only reachable with exogenous critical values
        flags.add('negative_value')
    return PriceResult(max(0.0, float(value)), tuple(len(s) for s in series),
                       sum(s.shortfall for s in series), frozenset(flags),
                       details)


def extendible_call_price(params, s0, spec, control=None):
    '''Prices an extendible call (PriceResult, with L and M and their
    residuals in `details`).'''

    _validate_spot(s0)
    control = SeriesControl() if control is None else control
    values, source = _resolve_critical_values(params, spec, control)
    t0, t1, t2 = spec.valuation_time, spec.expiry1, spec.expiry2
    first, full = TimeWindow(t0, t1), TimeWindow(t0, t2)
    per_dim = control.split(2)
    outer = poisson_weights(params.lambda_prime*first.length, per_dim)
    inner = poisson_weights(params.lambda_prime*(t2 - t1), per_dim)

    log_a = _log_ratio(s0, values.upper)
    log_b = _log_ratio(s0, values.lower)
    log_c = math.log(s0/spec.strike2)
    carry1 = math.exp(-params.q*first.length)
    carry2 = math.exp(-params.q*full.length)
    binorm = stats.binorm_cdf
    value = 0.0
    for n1, w1 in outer:
        moments = conditional_moments(params, first, n1)
        a1, a2 = standardized_thresholds(log_a, moments)
        b1, b2 = standardized_thresholds(log_b, moments)
        discount1 = discount_factor(params, first, n1)
        value += w1*(s0*carry1*stats.norm_cdf(a1)
                     - spec.strike1*discount1*stats.norm_cdf(a2))
        value -= w1*spec.premium*discount1*(stats.norm_cdf(b2)
                                            - stats.norm_cdf(a2))
        for n2, w2 in inner:
            m = n1 + n2
            c1, c2 = standardized_thresholds(
                log_c, conditional_moments(params, full, m))
            rho = _correlation(params, t0, t1, t2, n1, m)
            discount2 = discount_factor(params, full, m)
            value += w1*w2*(
                s0*carry2*(binorm(b1, c1, rho) - binorm(a1, c1, rho))
                - spec.strike2*discount2*(binorm(b2, c2, rho)
                                          - binorm(a2, c2, rho)))

    details = {'critical_source': source, **values.get_config()}
    return _finish(value, (outer, inner), details, s0)


def mfbm_extendible_price(params, s0, spec):
    '''Closed-form extendible call without jumps (lam = 0), written directly
    in terms of the mixed fractional variances.'''

    if params.lam != 0:
        raise ValueError('Closed form requires lam = 0.')
    _validate_spot(s0)
    values, source = _resolve_critical_values(params, spec, None)
    lower, upper = values.lower, values.upper
    r, q, sigma, hurst = params.r, params.q, params.sigma, params.hurst
    t0, t1, t2 = spec.valuation_time, spec.expiry1, spec.expiry2
    tau1, tau2 = t1 - t0, t2 - t0
    var1 = sigma**2*tau1 + sigma**2*(t1**(2*hurst) - t0**(2*hurst))
    var2 = sigma**2*tau2 + sigma**2*(t2**(2*hurst) - t0**(2*hurst))
    std1, std2 = math.sqrt(var1), math.sqrt(var2)
    if std1 == 0:
        raise utils.DegenerateModelError('Closed form needs positive variance.')
    rho = std1/std2

    def d_plus(barrier, tau, var, std):
        if barrier == 0:
            return math.inf
        if barrier == math.inf:
            return -math.inf
        return (math.log(s0/barrier) + (r - q)*tau + 0.5*var)/std

    a1 = d_plus(upper, tau1, var1, std1)
    b1 = d_plus(lower, tau1, var1, std1)
    c1 = d_plus(spec.strike2, tau2, var2, std2)
    a2, b2, c2 = a1 - std1, b1 - std1, c1 - std2
    phi, phi2 = stats.norm_cdf, stats.binorm_cdf
    value = (s0*math.exp(-q*tau1)*phi(a1)
             - spec.strike1*math.exp(-r*tau1)*phi(a2)
             + s0*math.exp(-q*tau2)*phi2(b1, c1, rho)
             - spec.strike2*math.exp(-r*tau2)*phi2(b2, c2, rho)
             - s0*math.exp(-q*tau2)*phi2(a1, c1, rho)
             + spec.strike2*math.exp(-r*tau2)*phi2(a2, c2, rho)
             - spec.premium*math.exp(-r*tau1)*(phi(b2) - phi(a2)))
    details = {'critical_source': source, **values.get_config()}
    flags = frozenset({'negative_value'}) if value < -1e-10*s0 else frozenset()
    return PriceResult(max(0.0, value), (1,), 0.0, flags, details)


def richardson_extrapolate(ec0, ec1):
    '''Two-point extrapolation 2*ec1 - ec0 of a sequence of extendible
    prices'''
    return 2*ec1 - ec0


@dataclass(frozen=True)
class ExtensionStage:
    '''Expiry, strike and the premium paid at the previous expiry to reach
    this stage (zero for the first stage).'''

    expiry: float
    strike: float
    premium: float = 0.0


@dataclass(frozen=True)
class NExtendibleSpec:
    '''Call extendible up to N <= 3 times.

    Attributes
    ----------
    stages: tuple[ExtensionStage]
        Stages 1..N+1 with strictly increasing expiries; the first stage has
        premium 0.
    valuation_time: float
        T0 (default is 0).
    critical_values: tuple[tuple[float, float]] | None
        Exogenous (L_j, M_j) for the N decision dates (default is None).'''

    stages: tuple
    valuation_time: float = 0.0
    critical_values: tuple = None

    def __post_init__(self):
        stages = tuple(ExtensionStage(*stage) if not isinstance(
            stage, ExtensionStage) else stage for stage in self.stages)
        object.__setattr__(self, 'stages', stages)
        if not 1 <= len(stages) - 1 <= MAX_EXTENSIONS:
            raise ValueError(f'Need between 1 and {MAX_EXTENSIONS} '
                             'extensions.')
        expiries = [self.valuation_time] + [s.expiry for s in stages]
        if not (expiries[0] >= 0 and all(a < b for a, b in
                                         zip(expiries, expiries[1:]))):
            raise ValueError('Expiries must strictly increase after T0.')
        if stages[0].premium != 0:
            raise ValueError('The first stage carries no premium.')
        if any(s.strike <= 0 for s in stages):
            raise ValueError('Strikes must be positive.')
        if any(s.premium < 0 for s in stages):
            raise ValueError('Premiums must be non-negative.')
        if self.critical_values is not None:
            bounds = tuple(tuple(pair) for pair in self.critical_values)
            if len(bounds) != len(stages) - 1:
                raise ValueError('Need one (L, M) pair per decision date.')
            for (lower, upper), stage in zip(bounds, stages[1:]):
                _check_critical_values(lower, upper, stage.premium)
            object.__setattr__(self, 'critical_values', bounds)

    @property
    def extensions(self):
        return len(self.stages) - 1

    @classmethod
    def from_extendible(cls, spec):
        stages = (ExtensionStage(spec.expiry1, spec.strike1),
                  ExtensionStage(spec.expiry2, spec.strike2, spec.premium))
        critical = None
        if spec.critical_values is not None:
            critical = (tuple(spec.critical_values),)
        return cls(stages, spec.valuation_time, critical)

    def get_config(self):
        return {'t0':       self.valuation_time,
                'expiries': ','.join(f'{s.expiry:g}' for s in self.stages),
                'strikes':  ','.join(f'{s.strike:g}' for s in self.stages),
                'premiums': ','.join(f'{s.premium:g}' for s in self.stages)}


def _box_probability(lower, upper, corr):
    '''P(lower_i < Y_i <= upper_i for all i), expanded into orthant
    probabilities by inclusion-exclusion over the finite lower limits.'''

    if any(low >= up for low, up in zip(lower, upper)):
        return 0.0
    finite = [i for i, limit in enumerate(lower) if limit > -math.inf]
    total = 0.0
    for size in range(len(finite) + 1):
        for subset in itertools.combinations(finite, size):
            limits = list(upper)
            for i in subset:
                limits[i] = lower[i]
            total += (-1)**size*stats.multinorm_cdf(limits, corr)
    return total


def _stage_correlation(variances):
    '''Correlation of nested log-returns with the given (increasing)
    variances'''
    dim = len(variances)
    pairs = {}
    for i in range(dim):
        for j in range(i + 1, dim):
            if variances[j] > 0:
                pairs[(i, j)] = min(1.0, math.sqrt(variances[i]/variances[j]))
    return stats.CorrelationMatrix.from_pairs(dim, pairs)


def _extension_value(params, s0, t_start, stages, bounds, control):
    '''Value at t_start of the remaining stages under the policy given by
    `bounds` ((L_j, M_j) per decision date): exercise at S >= M_j, extend on
    [L_j, M_j), abandon below L_j. The first stage's premium is ignored.

    Returns the value and the Poisson series of each interval.'''

    count = len(stages)
    per_dim = control.split(count)
    times = [t_start] + [stage.expiry for stage in stages]
    series = [poisson_weights(params.lambda_prime*(b - a), per_dim)
              for a, b in zip(times, times[1:])]
    windows = [TimeWindow(t_start, stage.expiry) for stage in stages]
    exercise = [upper for _, upper in bounds] + [stages[-1].strike]
    keep = [lower for lower, _ in bounds] + [stages[-1].strike]
    log_exercise = [_log_ratio(s0, barrier) for barrier in exercise]
    log_keep = [_log_ratio(s0, barrier) for barrier in keep]

    value = 0.0
    for j in range(count):
        carry = math.exp(-params.q*windows[j].length)
        premium = stages[j + 1].premium if j + 1 < count else 0.0
        for terms in itertools.product(*series[:j + 1]):
            counts = np.cumsum([n for n, _ in terms])
            weight = math.prod(w for _, w in terms)
            moments = [conditional_moments(params, windows[i], counts[i])
                       for i in range(j + 1)]
            corr = _stage_correlation([mom.variance for mom in moments])
            spot_low, strike_low, spot_up, strike_up = [], [], [], []
            for i, mom in enumerate(moments):
                z_exercise = standardized_thresholds(log_exercise[i], mom)
                z_keep = standardized_thresholds(log_keep[i], mom)
                spot_low.append(z_exercise[0])
                strike_low.append(z_exercise[1])
                spot_up.append(z_keep[0])
                strike_up.append(z_keep[1])
            discount = discount_factor(params, windows[j], counts[j])

            # Extended through every earlier date, exercised at stage j
            lower = spot_low[:j] + [-math.inf]
            upper = spot_up[:j] + [spot_low[j]]
            spot_term = _box_probability(lower, upper, corr)
            lower = strike_low[:j] + [-math.inf]
            upper = strike_up[:j] + [strike_low[j]]
            strike_term = _box_probability(lower, upper, corr)
            value += weight*(s0*carry*spot_term
                             - stages[j].strike*discount*strike_term)

            # Extended at stage j as well, paying the next premium
            if premium > 0:
                extend_term = _box_probability(strike_low, strike_up, corr)
                value -= weight*premium*discount*extend_term
    return value, series


def _continuation(params, t_start, stages, bounds, control):
    if len(stages) == 1:
        window = TimeWindow(t_start, stages[0].expiry)
        return CallSeries(params, VanillaCallSpec(stages[0].strike, window),
                          control)
    return lambda s: _extension_value(params, s, t_start, stages, bounds,
                                      control)[0]


def n_extendible_critical_values(params, nspec, control=None,
                                 tol=utils.ROOT_TOLERANCE):
    '''(L_j, M_j) for every decision date by backward induction. A date where
    extending never pays becomes plain exercise (L = M = K_j); a date where it
    always beats exercise gets M = inf.'''

    control = SeriesControl() if control is None else control
    stages = nspec.stages
    bounds = []
    for j in reversed(range(nspec.extensions)):
        rest = stages[j + 1:]
        continuation = _continuation(params, stages[j].expiry, rest,
                                     list(bounds), control)
        scale = max(stages[j].strike, rest[0].strike)
        try:
            values = solve_stage(continuation, stages[j].strike,
                                 rest[0].premium, scale, tol)
            pair = (values.lower, values.upper)
        except utils.NoExtensionRegionError as error:
            if error.kind == 'never':
                pair = (stages[j].strike, stages[j].strike)
            else:
                pair = (error.lower, math.inf)
        utils.log(f'Decision {j + 1}: L = {pair[0]:.10g}, M = {pair[1]:.10g}',
                  level=2)
        bounds.insert(0, pair)
    return tuple(bounds)


def n_extendible_price(params, s0, nspec, control=None):
    '''Prices an N-times extendible call (PriceResult, with the per-date
    critical values and their residuals in `details`).'''

    _validate_spot(s0)
    control = SeriesControl() if control is None else control
    if nspec.critical_values is None:
        bounds, source = n_extendible_critical_values(params, nspec,
                                                      control), 'solved'
    else:
        bounds, source = nspec.critical_values, 'supplied'
    value, series = _extension_value(params, s0, nspec.valuation_time,
                                     nspec.stages, bounds, control)
    details = {'critical_source': source}
    stages = nspec.stages
    for j, (lower, upper) in enumerate(bounds, start=1):
        continuation = _continuation(params, stages[j - 1].expiry, stages[j:],
                                     bounds[j:], control)
        residuals = stage_residuals(continuation, stages[j - 1].strike,
                                    stages[j].premium, lower, upper)
        details[f'l{j}'], details[f'm{j}'] = lower, upper
        details[f'l{j}_residual'], details[f'm{j}_residual'] = residuals
    return _finish(value, series, details, s0)
