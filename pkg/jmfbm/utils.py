'''Contains constants, exceptions and helper functions to support jmfbm.'''

import sys

# Constants
VERBOSE = 1
TAIL_TOLERANCE = 1e-12 # Poisson probability mass allowed outside a series
MAX_TERMS = 170
ROOT_TOLERANCE = 1e-12 # |f(x)| accepted by the critical-value solvers
BRACKET_LIMIT = 2.0**60 # Geometric bracket expansion stops past this factor
MC_PATHS = 100000
MC_SEED = 20240229
MC_BATCH = 50000
MC_MIN_PATHS = 10000 # Minimum paths accepted by the mc-check command
Z_THRESHOLD = 3.0
CSV_FLOAT_FORMAT = '%.17g'


class BracketError(ValueError):
    '''Target function does not change sign on (or cannot be bracketed in)
    the searched interval.'''


class EvaluationError(ArithmeticError):
    '''Target function returned a non-finite value.'''


class DegenerateModelError(ValueError):
    '''Model has zero variance where a correlation is required.'''


class UnsupportedDimensionError(ValueError):
    '''Multivariate normal integral requested in more than four dimensions.'''


class NotPositiveSemidefiniteError(ValueError):
    '''Correlation matrix could not be factorized.'''


class NoExtensionRegionError(ValueError):
    '''The extendible option has no region [L, M) in which paying the premium
    is optimal.

    Attributes
    ----------
    kind: str
        'never' if extending never beats exercising/abandoning (the option is a
        vanilla call on the first strike), 'always' if extending beats
        exercising for every spot above L (M would be infinite).
    lower: float | None
        The lower critical value L, if it was solved before failing.'''

    def __init__(self, message, kind='never', lower=None):
        super().__init__(message)
        self.kind = kind
        self.lower = lower


class ConvergenceWarning(UserWarning):
    '''A Poisson series hit max_terms before reaching its tail tolerance.'''


def log(message, level=1):
    '''Prints message to stderr if VERBOSE is at least level'''
    if VERBOSE >= level:
        print(message, file=sys.stderr)

def get_config(object, prefix=''):
    '''Gets configuration data from object, if available'''
    config = getattr(object, 'get_config', lambda: {})()
    prefix = prefix + int(len(prefix)>0)*'_'
    return {prefix + key: value for key, value in config.items()}
