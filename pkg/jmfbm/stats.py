'''Normal distribution functions (univariate, bivariate and low-dimensional
multivariate) and the bracketing root solver used by the critical-value
equations.'''

import math
import numpy as np
from dataclasses import dataclass, field
from scipy import special, integrate, optimize
from jmfbm import utils

# Gauss-Legendre half-abscissae and weights (6, 12 and 20 points)
_GL_NODES = {
    6:  np.array([0.9324695142031522, 0.6612093864662647, 0.2386191860831970]),
    12: np.array([0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
                  0.5873179542866171, 0.3678314989981802, 0.1252334085114692]),
    20: np.array([0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                  0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                  0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
                  0.07652652113349733]),
}
_GL_WEIGHTS = {
    6:  np.array([0.1713244923791705, 0.3607615730481384, 0.4679139345726904]),
    12: np.array([0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                  0.2031674267230659, 0.2334925365383547, 0.2491470458134029]),
    20: np.array([0.01761400713915212, 0.04060142980038694,
                  0.06267204833410906, 0.08327674157670475, 0.1019301198172404,
                  0.1181945319615184, 0.1316886384491766, 0.1420961093183821,
                  0.1491729864726037, 0.1527533871307259]),
}
_QUAD_BOUND = 10.0 # Standard normal mass beyond this is below 1e-23
_QUAD_TOLERANCE = 1e-10
_CORRELATION_TOLERANCE = 1e-12


def norm_cdf(x):
    '''Standard normal cumulative distribution function (accepts +-inf)'''
    return float(special.ndtr(x))


def binorm_cdf(x, y, rho):
    '''P(X <= x, Y <= y) for standard normals with correlation rho.

    Gauss-Legendre quadrature of the single-integral (Drezner-Wesolowsky)
    representation, switching to the transformed integral of Genz for
    |rho| >= 0.925 and to the univariate limits at |rho| = 1.'''

    if not -1 <= rho <= 1:
        raise ValueError(f'Correlation {rho} outside [-1, 1].')
    if y < x: # Canonical argument order keeps the function exactly symmetric
        x, y = y, x
    return _bvnu(-x, -y, rho)


def _bvnu(h, k, r):
    '''Upper bivariate orthant P(X > h, Y > k)'''

    if h == math.inf or k == math.inf:
        return 0.0
    if h == -math.inf:
        return 1.0 if k == -math.inf else norm_cdf(-k)
    if k == -math.inf:
        return norm_cdf(-h)
    if r == 0:
        return norm_cdf(-h)*norm_cdf(-k)

    two_pi = 2*math.pi
    hk = h*k
    if abs(r) < 0.3:
        points = 6
    elif abs(r) < 0.75:
        points = 12
    else:
        points = 20
    weights = np.concatenate((_GL_WEIGHTS[points], _GL_WEIGHTS[points]))
    nodes = np.concatenate((1 - _GL_NODES[points], 1 + _GL_NODES[points]))

    if abs(r) < 0.925:
        hs = (h*h + k*k)/2
        asr = math.asin(r)/2
        sn = np.sin(asr*nodes)
        bvn = np.dot(np.exp((sn*hk - hs)/(1 - sn**2)), weights)
        bvn = bvn*asr/two_pi + norm_cdf(-h)*norm_cdf(-k)
    else:
        if r < 0:
            k, hk = -k, -hk
        bvn = 0.0
        if abs(r) < 1:
            a_s = 1 - r*r
            a = math.sqrt(a_s)
            bs = (h - k)**2
            c = (4 - hk)/8
            d = (12 - hk)/80
            asr = -(bs/a_s + hk)/2
            if asr > -100:
                bvn = a*math.exp(asr)*(1 - c*(bs - a_s)*(1 - d*bs)/3
                                       + c*d*a_s*a_s)
            if hk > -100:
                b = math.sqrt(bs)
                sp = math.sqrt(two_pi)*norm_cdf(-b/a)
                bvn -= math.exp(-hk/2)*sp*b*(1 - c*bs*(1 - d*bs)/3)
            a = a/2
            xs = (a*nodes)**2
            asr = -(bs/xs + hk)/2
            valid = asr > -100
            xs, asr, w = xs[valid], asr[valid], weights[valid]
            sp = 1 + c*xs*(1 + 5*d*xs)
            rs = np.sqrt(1 - xs)
            ep = np.exp(-hk*xs/(2*(1 + rs)**2))/rs
            bvn += a*np.dot(w, np.exp(asr)*(ep - sp))
            bvn = -bvn/two_pi
        if r > 0:
            bvn += norm_cdf(-max(h, k))
        elif h >= k:
            bvn = -bvn
        else:
            if h < 0:
                lower = norm_cdf(k) - norm_cdf(h)
            else:
                lower = norm_cdf(-h) - norm_cdf(-k)
            bvn = lower - bvn
    return float(max(0.0, min(1.0, bvn)))


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    '''Symmetric, unit-diagonal, positive semidefinite correlation matrix of
    dimension 1 to 4.'''

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        entries = np.atleast_2d(np.asarray(self.entries, dtype=float))
        object.__setattr__(self, 'entries', entries)
        dim = entries.shape[0]
        if entries.shape != (dim, dim):
            raise ValueError('Correlation matrix must be square.')
        if dim > 4:
            raise utils.UnsupportedDimensionError(
                f'Multivariate normal integral of dimension {dim} requested, '
                'at most 4 is supported.')
        if not np.allclose(np.diag(entries), 1.0, rtol=0, atol=1e-14):
            raise ValueError('Correlation matrix must have unit diagonal.')
        if not np.array_equal(entries, entries.T):
            raise ValueError('Correlation matrix must be symmetric.')
        try:
            np.linalg.cholesky(entries + _CORRELATION_TOLERANCE*np.eye(dim))
        except np.linalg.LinAlgError:
            raise utils.NotPositiveSemidefiniteError(
                f'Correlation matrix is not positive semidefinite:\n{entries}')

    @property
    def dimension(self):
        return self.entries.shape[0]

    @classmethod
    def from_pairs(cls, dimension, pairs):
        '''Builds the matrix from {(i, j): rho} for i < j (others are 0)'''
        entries = np.eye(dimension)
        for (i, j), rho in pairs.items():
            entries[i, j] = entries[j, i] = rho
        return cls(entries)


def multinorm_cdf(upper, corr):
    '''P(X_i <= upper_i for all i) for standard normals with correlation
    `corr` (CorrelationMatrix or array), dimension at most 4.

    Variables with an infinite upper limit are integrated out exactly. In three
    or four dimensions the first variable is conditioned on and the remaining
    orthant is integrated by adaptive quadrature, recursing down to the
    bivariate case.'''

    if not isinstance(corr, CorrelationMatrix):
        corr = CorrelationMatrix(corr)
    upper = np.asarray(upper, dtype=float).reshape(-1)
    if len(upper) != corr.dimension:
        raise ValueError('Upper limits do not match the matrix dimension.')
    if np.any(upper == -np.inf):
        return 0.0
    keep = upper < np.inf
    if not keep.any():
        return 1.0
    return _orthant(upper[keep], corr.entries[np.ix_(keep, keep)])


def _orthant(upper, entries):
    '''Orthant probability for finite limits, no validation'''

    dim = len(upper)
    if dim == 1:
        return norm_cdf(upper[0])
    if dim == 2:
        return binorm_cdf(upper[0], upper[1],
                          float(np.clip(entries[0, 1], -1.0, 1.0)))

    # Conditioning variable range, narrowed by perfectly correlated partners
    lo, hi = -_QUAD_BOUND, min(upper[0], _QUAD_BOUND)
    rest = []
    for i in range(1, dim):
        rho = entries[i, 0]
        if rho >= 1 - _CORRELATION_TOLERANCE:
            hi = min(hi, upper[i])
        elif rho <= -1 + _CORRELATION_TOLERANCE:
            lo = max(lo, -upper[i])
        else:
            rest.append(i)
    if hi <= lo:
        return 0.0
    if not rest:
        return max(0.0, norm_cdf(hi) - norm_cdf(lo))

    rho = entries[rest, 0]
    scale = np.sqrt(1 - rho**2)
    partial = ((entries[np.ix_(rest, rest)] - np.outer(rho, rho))
               / np.outer(scale, scale))
    np.fill_diagonal(partial, 1.0)
    partial = np.clip(partial, -1.0, 1.0)
    limits = upper[rest]

    def integrand(t):
        conditional = (limits - rho*t)/scale
        return math.exp(-0.5*t*t)*_orthant(conditional, partial)

    # Steps of the conditional probabilities help the adaptive rule
    steps = [limit/r for limit, r in zip(limits, rho) if abs(r) > 0.5]
    steps = sorted(t for t in steps if lo < t < hi)
    value, _ = integrate.quad(integrand, lo, hi, points=steps or None,
                              epsabs=_QUAD_TOLERANCE, epsrel=_QUAD_TOLERANCE,
                              limit=200)
    return float(min(1.0, max(0.0, value/math.sqrt(2*math.pi))))


@dataclass(frozen=True)
class Bracket:
    '''Interval [lo, hi] expected to contain a sign change of the target.'''

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f'Invalid bracket [{self.lo}, {self.hi}].')


class _Converged(Exception):

    def __init__(self, root):
        self.root = root


def _checked(f):
    def wrapped(x):
        value = f(x)
        if not math.isfinite(value):
            raise utils.EvaluationError(f'Target returned {value} at {x}.')
        return value
    return wrapped


def find_root(f, bracket, x_tol=None, f_tol=utils.ROOT_TOLERANCE):
    '''Root of a monotone function on a bracket (Brent's method).

    Parameters
    ----------
    f: callable
        Target function, must change sign on the bracket.
    bracket: Bracket
        Search interval.
    x_tol: float
        Bracket width at which the search stops (default is four machine
        epsilons relative to the bracket's upper end).
    f_tol: float
        Absolute function value accepted as a root (default is 1e-12).'''

    f = _checked(f)
    x_tol = 4*np.finfo(float).eps*abs(bracket.hi) if x_tol is None else x_tol
    f_lo, f_hi = f(bracket.lo), f(bracket.hi)
    if abs(f_lo) <= f_tol:
        return float(bracket.lo)
    if abs(f_hi) <= f_tol:
        return float(bracket.hi)
    if (f_lo > 0) == (f_hi > 0):
        raise utils.BracketError(f'No sign change on [{bracket.lo}, '
                                 f'{bracket.hi}] (f = {f_lo}, {f_hi}).')

    def target(x):
        value = f(x)
        if abs(value) <= f_tol:
            raise _Converged(x)
        return value

    try:
        return float(optimize.brentq(target, bracket.lo, bracket.hi,
                                     xtol=max(x_tol, 1e-300), maxiter=500))
    except _Converged as done:
        return float(done.root)


def expand_bracket(f, start, increasing=True, factor=2.0, scale=None,
                   limit=utils.BRACKET_LIMIT):
    '''Geometric search from `start` (> 0) for a bracket around the root of a
    monotone function. Raises BracketError once the search leaves
    [scale/limit, scale*limit].'''

    if not start > 0:
        raise ValueError('Bracket search must start at a positive point.')
    scale = start if scale is None else scale
    f = _checked(f)
    sign = 1.0 if increasing else -1.0
    if sign*f(start) >= 0: # Root at or below start
        hi, lo = start, start/factor
        while sign*f(lo) > 0:
            hi, lo = lo, lo/factor
            if lo < scale/limit:
                raise utils.BracketError(f'No root above {lo}.')
    else:
        lo, hi = start, start*factor
        while sign*f(hi) < 0:
            lo, hi = hi, hi*factor
            if hi > scale*limit:
                raise utils.BracketError(f'No root below {hi}.')
    return Bracket(lo, hi)
