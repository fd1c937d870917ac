'''Risk-neutral jump mixed fractional Brownian motion (JMFBM) model: the
parameter set, conditional log-return moments, and the Poisson weighting shared
by every pricing formula.'''

import math
import warnings
import numpy as np
from dataclasses import dataclass, replace
from jmfbm import utils


@dataclass(frozen=True)
class ModelParams:
    '''Risk-neutral JMFBM parameters.

    The asset follows dS/S = (r - q - lam*k)dt + sigma dB + sigma dB^H
    + (J - 1)dN, with ln J ~ N(ln(1+k) - sigma_j^2/2, sigma_j^2).

    Attributes
    ----------
    r: float
        Risk-free rate, continuously compounded, per year.
    sigma: float
        Volatility applied to both the Brownian and the fractional component.
    hurst: float
        Hurst exponent H of the fractional component, in (0, 1).
    lam: float
        Jump intensity (expected jumps per year) (default is 0).
    k: float
        Mean proportional jump size E[J - 1], must exceed -1 (default is 0).
    sigma_j: float
        Standard deviation of ln J (default is 0).
    q: float
        Continuous dividend yield (default is 0).'''

    r: float
    sigma: float
    hurst: float
    lam: float = 0.0
    k: float = 0.0
    sigma_j: float = 0.0
    q: float = 0.0

    def __post_init__(self):
        values = (self.r, self.sigma, self.hurst, self.lam, self.k,
                  self.sigma_j, self.q)
        if not all(math.isfinite(v) for v in values):
            raise ValueError('Model parameters must be finite.')
        if self.sigma < 0:
            raise ValueError('sigma must be non-negative.')
        if not 0 < self.hurst < 1:
            raise ValueError('Hurst exponent must lie in (0, 1).')
        if self.lam < 0:
            raise ValueError('Jump intensity lam must be non-negative.')
        if self.k <= -1:
            raise ValueError('Mean jump size k must exceed -1.')
        if self.sigma_j < 0:
            raise ValueError('sigma_j must be non-negative.')

    @property
    def lambda_prime(self):
        '''Jump intensity under the spot-weighted measure, lam*(1+k)'''
        return self.lam*(1 + self.k)

    @property
    def mu_j(self):
        '''Mean of ln J'''
        return math.log1p(self.k) - 0.5*self.sigma_j**2

    def replace(self, **changes):
        '''Copy with the specified fields changed'''
        return replace(self, **changes)

    def merton(self):
        '''Same parameters with H = 1/2 (Merton jump-diffusion reduction)'''
        return self.replace(hurst=0.5)

    def mfbm(self):
        '''Same parameters without jumps (mixed fractional reduction)'''
        return self.replace(lam=0.0)

    def get_config(self):
        return {'r':       self.r,
                'q':       self.q,
                'sigma':   self.sigma,
                'hurst':   self.hurst,
                'lambda':  self.lam,
                'k':       self.k,
                'sigma_j': self.sigma_j}


@dataclass(frozen=True)
class TimeWindow:
    '''Interval [t_start, t_end] in years, with 0 <= t_start < t_end.'''

    t_start: float
    t_end: float

    def __post_init__(self):
        if not (0 <= self.t_start < self.t_end and math.isfinite(self.t_end)):
            raise ValueError(f'Invalid time window [{self.t_start}, '
                             f'{self.t_end}], need 0 <= start < end.')

    @property
    def length(self):
        return self.t_end - self.t_start


@dataclass(frozen=True)
class ConditionalMoments:
    '''Mean and variance of the log-return over a window, conditional on the
    number of jumps. Fields are floats, or arrays when computed for an array of
    jump counts.'''

    mean: float
    variance: float

    @property
    def std(self):
        return np.sqrt(self.variance)


@dataclass(frozen=True)
class SeriesControl:
    '''Truncation policy for Poisson-weighted series.

    Attributes
    ----------
    tail_tolerance: float
        Probability mass allowed outside the summed terms (default is 1e-12).
    max_terms: int
        Hard cap on the number of terms (default is 170).'''

    tail_tolerance: float = utils.TAIL_TOLERANCE
    max_terms: int = utils.MAX_TERMS

    def __post_init__(self):
        if not 0 < self.tail_tolerance < 1:
            raise ValueError('tail_tolerance must lie in (0, 1).')
        if self.max_terms < 1:
            raise ValueError('max_terms must be at least 1.')

    def split(self, dimensions):
        '''Per-dimension control for a product of `dimensions` series, so that
        the summed shortfalls stay within this tolerance.'''
        return replace(self, tail_tolerance=self.tail_tolerance/dimensions)

    def get_config(self):
        return {'tail_tol': self.tail_tolerance, 'max_terms': self.max_terms}


@dataclass(frozen=True)
class PoissonSeries:
    '''Truncated Poisson weights.

    Attributes
    ----------
    terms: tuple[tuple[int, float]]
        (n, weight) pairs for n = 0..N.
    shortfall: float
        Probability mass not covered by the terms.
    truncated: bool
        True if max_terms was reached before the tail tolerance.'''

    terms: tuple
    shortfall: float
    truncated: bool

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    @property
    def counts(self):
        return np.array([n for n, _ in self.terms])

    @property
    def weights(self):
        return np.array([w for _, w in self.terms])


def conditional_moments(params, window, n_jumps):
    '''Mean and variance of ln(S_end/S_start) given `n_jumps` jumps in the
    window. `n_jumps` may be an integer or an integer array.'''

    n = np.asarray(n_jumps)
    if np.any(n < 0):
        raise ValueError('Number of jumps must be non-negative.')
    dt = window.length
    fractional = window.t_end**(2*params.hurst) - window.t_start**(2*params.hurst)
    diffusion = params.sigma**2*dt + params.sigma**2*fractional
    drift = (params.r - params.q - params.lam*params.k)*dt
    mean = drift - 0.5*diffusion + n*params.mu_j
    variance = diffusion + n*params.sigma_j**2
    if n.ndim == 0:
        mean, variance = float(mean), float(variance)
    return ConditionalMoments(mean, variance)


def adjusted_rate(params, window, n_jumps):
    '''Jump-adjusted rate r_n = r - lam*k + n*ln(1+k)/dt'''
    n = np.asarray(n_jumps)
    rate = (params.r - params.lam*params.k
            + n*math.log1p(params.k)/window.length)
    return float(rate) if n.ndim == 0 else rate


def discount_factor(params, window, n_jumps):
    '''exp(-r_n*dt): discount applied to strike and premium legs under the
    lambda' Poisson weights'''
    return np.exp(-adjusted_rate(params, window, n_jumps)*window.length)


def log_return_correlation(params, t0, t1, t2, n1, m):
    '''Correlation between log-returns over [t0, t1] (n1 jumps) and [t0, t2]
    (m >= n1 jumps), taking their covariance as the variance of the shorter
    one (nested intervals).'''

    if not t0 < t1 < t2:
        raise ValueError('Need t0 < t1 < t2.')
    if m < n1:
        raise ValueError('Jumps over the longer interval must include n1.')
    short = conditional_moments(params, TimeWindow(t0, t1), n1).variance
    long = conditional_moments(params, TimeWindow(t0, t2), m).variance
    if long <= 0:
        raise utils.DegenerateModelError(
            'Zero log-return variance: the model is deterministic and no '
            'correlation exists.')
    return min(1.0, math.sqrt(short/long))


def poisson_weights(rate_times_dt, control=None):
    '''Poisson probabilities for n = 0, 1, ... computed by the recurrence
    w(n+1) = w(n)*x/(n+1), truncated once the missing mass (one minus the
    exactly rounded sum) falls below tail_tolerance. Reaching max_terms first
    flags the result as truncated.'''

    control = SeriesControl() if control is None else control
    x = float(rate_times_dt)
    if not (x >= 0 and math.isfinite(x)):
        raise ValueError('Poisson mean must be finite and non-negative.')

    weight = math.exp(-x)
    terms, weights = [], []
    for n in range(control.max_terms):
        terms.append((n, weight))
        weights.append(weight)
        shortfall = max(0.0, 1 - math.fsum(weights))
        if shortfall < control.tail_tolerance:
            truncated = False
            break
        weight = weight*x/(n + 1)
    else:
        truncated = True
        warnings.warn(f'Poisson series with mean {x} truncated at '
                      f'{len(terms)} terms, missing mass {shortfall:.3e}.',
                      utils.ConvergenceWarning)
    return PoissonSeries(tuple(terms), shortfall, truncated)


def standardized_thresholds(log_ratio, moments):
    '''Returns (z1, z2) = ((log_ratio + mean + var)/std, z1 - std), the
    spot-weighted and plain standardized exercise thresholds. A zero variance
    maps to +-inf according to the sign of the numerator.'''

    numerator = np.asarray(log_ratio + moments.mean + moments.variance, float)
    std = np.asarray(moments.std, float)
    with np.errstate(divide='ignore', invalid='ignore'):
        z1 = np.where(std > 0, numerator/np.where(std > 0, std, 1.0),
                      np.where(numerator >= 0, np.inf, -np.inf))
    z2 = z1 - std
    if z1.ndim == 0:
        return float(z1), float(z2)
    return z1, z2
