'''Exact simulation of the JMFBM asset price at a set of dates: a jointly
Gaussian mixed Brownian/fractional component plus compound-Poisson jumps.'''

import math
import numpy as np
from dataclasses import dataclass
from scipy import special, stats
from tqdm import tqdm
from jmfbm import utils


@dataclass(frozen=True)
class McConfig:
    '''Monte Carlo settings.

    Attributes
    ----------
    paths: int
        Number of simulated paths (default is 100000).
    seed: int
        Root seed; path i draws from the Philox substream keyed by the seed
        at counter block i (pair i with antithetic sampling).
    batch: int
        Paths per batch, a memory setting that leaves the draws unchanged
        (default is 50000).
    antithetic: bool
        Pairs every Gaussian draw with its negation (default is False).'''

    paths: int = utils.MC_PATHS
    seed: int = utils.MC_SEED
    batch: int = utils.MC_BATCH
    antithetic: bool = False

    def __post_init__(self):
        if self.paths < 1 or self.batch < 1:
            raise ValueError('paths and batch must be positive.')
        if self.seed < 0:
            raise ValueError('Seed must be non-negative.')
        if self.antithetic and (self.paths % 2 or self.batch % 2):
            raise ValueError('Antithetic sampling needs even paths and batch.')

    @property
    def batch_sizes(self):
        full, last = divmod(self.paths, self.batch)
        return [self.batch]*full + ([last] if last else [])

    def get_config(self):
        return {'paths': self.paths, 'seed': self.seed, 'batch': self.batch,
                'antithetic': self.antithetic}


@dataclass(frozen=True)
class McEstimate:
    '''Sample mean of discounted payoffs, its standard error and the number of
    paths it is based on.'''

    mean: float
    std_error: float
    paths: int

    def get_config(self):
        return {'mc_mean': self.mean, 'mc_se': self.std_error,
                'mc_paths': self.paths}


class GaussianCov:
    '''Covariance of sigma*B_t + sigma*B^H_t (independent Brownian and
    fractional Brownian motion started at 0) at the given dates.'''

    def __init__(self, dates, sigma, hurst):
        self.dates = np.asarray(dates, dtype=float)
        self.sigma = sigma
        self.hurst = hurst
        s, t = np.meshgrid(self.dates, self.dates, indexing='ij')
        fractional = 0.5*(s**(2*hurst) + t**(2*hurst)
                          - np.abs(t - s)**(2*hurst))
        self.matrix = sigma**2*(np.minimum(s, t) + fractional)

    def factor(self):
        '''Lower-triangular L with L @ L.T equal to the covariance; rows of
        zero-variance dates are zero.'''
        dim = len(self.dates)
        factor = np.zeros((dim, dim))
        active = np.flatnonzero(np.diag(self.matrix) > 0)
        if len(active) == 0:
            return factor
        try:
            block = np.linalg.cholesky(self.matrix[np.ix_(active, active)])
        except np.linalg.LinAlgError:
            raise AssertionError('Mixed fractional covariance is not positive '
                                 f'definite for dates {self.dates}.')
        factor[np.ix_(active, active)] = block
        return factor


def _validate_dates(dates):
    dates = np.asarray(dates, dtype=float)
    if dates.ndim != 1 or len(dates) == 0:
        raise ValueError('Need a non-empty list of dates.')
    if dates[0] < 0 or np.any(np.diff(dates) <= 0):
        raise ValueError('Dates must be non-negative and strictly increasing.')
    return dates


def _path_uniforms(key, first, count, width):
    '''Uniforms in (0, 1), one row of `width` values per path for paths
    first, ..., first + count - 1. Every path owns a fixed block of the Philox
    counter, so a row depends only on the key and the path index.'''

    blocks = -(-width//4) # Philox4x64 gives four words per counter value
    generator = np.random.Philox(key=key, counter=first*blocks)
    raw = generator.random_raw(count*blocks*4).reshape(count, blocks*4)
    return ((raw[:, :width] >> np.uint64(11)) + 0.5)*2.0**-53


def _poisson_counts(uniforms, means):
    '''Jump counts per date by inversion, columns with zero mean stay 0'''
    counts = np.zeros(uniforms.shape, dtype=np.int64)
    for column, mean in enumerate(means):
        if mean > 0:
            counts[:, column] = stats.poisson.ppf(uniforms[:, column], mean)
    return counts


def iterate_batches(params, s0, dates, config):
    '''Yields simulated asset prices, one (batch_size, len(dates)) array per
    batch. Path i is drawn from its own substream of (seed, i), so the
    simulated paths do not depend on the batch size. With antithetic
    sampling, row i of the second half of a batch mirrors row i of the first
    half, and substreams are indexed by pair.'''

    dates = _validate_dates(dates)
    dim = len(dates)
    factor = GaussianCov(dates, params.sigma, params.hurst).factor()
    drift = ((params.r - params.q - params.lam*params.k)*dates
             - 0.5*params.sigma**2*dates
             - 0.5*params.sigma**2*dates**(2*params.hurst))
    intensity = params.lam*np.diff(dates, prepend=0.0)
    key = np.random.SeedSequence(config.seed).generate_state(2, np.uint64)
    sizes = config.batch_sizes
    first = 0
    for size in tqdm(sizes, disable=utils.VERBOSE == 0 or len(sizes) == 1,
                     leave=False):
        draws = size//2 if config.antithetic else size
        uniforms = _path_uniforms(key, first, draws, 3*dim)
        first += draws
        gauss = special.ndtri(uniforms[:, :dim])
        counts = _poisson_counts(uniforms[:, dim:2*dim], intensity)
        jump_noise = special.ndtri(uniforms[:, 2*dim:])
        if config.antithetic:
            gauss = np.concatenate((gauss, -gauss))
            counts = np.concatenate((counts, counts))
            jump_noise = np.concatenate((jump_noise, -jump_noise))
        jumps = counts*params.mu_j + np.sqrt(counts)*params.sigma_j*jump_noise
        log_return = drift + gauss@factor.T + np.cumsum(jumps, axis=1)
        yield s0*np.exp(log_return)


def simulate_terminal_values(params, s0, dates, config):
    '''Asset prices at `dates` for every path, shape (paths, len(dates)).
    Deterministic for a fixed config.'''
    if not (s0 > 0 and math.isfinite(s0)):
        raise ValueError('Spot price must be positive and finite.')
    return np.concatenate(list(iterate_batches(params, s0, dates, config)))
