'''Monte Carlo oracle: exact path simulation of the JMFBM asset price and
payoff estimators for every contract priced in jmfbm.pricing.'''

from .paths import McConfig, McEstimate, GaussianCov, iterate_batches, \
    simulate_terminal_values
from .estimators import RunningMoments, mc_vanilla_price, mc_compound_price, \
    mc_extendible_price, mc_n_extendible_price
