'''Option pricing under a mixed fractional Brownian motion with
compound-Poisson jumps (JMFBM), with a Monte Carlo oracle for validation.'''

from jmfbm import utils
from jmfbm.model import ModelParams, TimeWindow, SeriesControl
