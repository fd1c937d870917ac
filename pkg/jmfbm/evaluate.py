'''Validation of analytic prices against the Monte Carlo oracle.'''

import math
import numpy as np
import pandas as pd
from jmfbm import utils
from jmfbm.model import SeriesControl
from jmfbm.montecarlo import (McConfig, mc_vanilla_price, mc_compound_price,
                              mc_extendible_price, mc_n_extendible_price)
from jmfbm.pricing import (CriticalPrice, NExtendibleSpec, call_price,
                           compound_call_price, extendible_call_price,
                           n_extendible_price)

KINDS = ['vanilla', 'compound', 'extendible', 'nextendible']


def z_score(analytic, estimate):
    '''Standardized gap between an analytic price and an McEstimate. Zero when
    both agree to 1e-12 (relative), infinite when only the standard error
    vanishes.'''

    gap = analytic - estimate.mean
    if abs(gap) <= 1e-12*max(1.0, abs(analytic)):
        return 0.0
    if estimate.std_error == 0:
        return math.copysign(math.inf, gap)
    return gap/estimate.std_error


class Validator:
    '''Compares analytic prices with Monte Carlo estimates for one model and
    spot.'''

    def __init__(self, params, s0, config=None, control=None, bias=0.0):
        '''Initializes Validator instance.

        Parameters
        ----------
        params: ModelParams
            Risk-neutral model shared by both pricers.
        s0: float
            Spot at the valuation time.
        config: McConfig
            Monte Carlo settings (default is McConfig()).
        control: SeriesControl
            Truncation for the analytic series (default is SeriesControl()).
        bias: float
            Added to every analytic price, to check that disagreement is
            detected (default is 0).'''

        self.params = params
        self.s0 = s0
        self.config = McConfig() if config is None else config
        self.control = SeriesControl() if control is None else control
        self.bias = bias

    def test(self, kind, spec, nested=False):
        '''Validates a contract of the given kind, returns a one-row
        pd.DataFrame.

        Parameters
        ----------
        kind: str
            One of 'vanilla', 'compound', 'extendible', 'nextendible'.
        spec:
            Contract matching `kind`.
        nested: bool
            Compound and extendible only: compare against the fully simulated
            continuation instead of the analytic one at T1 (default is
            False). The other variant is reported in the alt_* columns.'''

        utils.log(f'Validating {kind} price...')
        if kind == 'vanilla':
            results = self._vanilla(spec)
        elif kind == 'compound':
            results = self._compound(spec, nested)
        elif kind == 'extendible':
            results = self._extendible(spec, nested)
        elif kind == 'nextendible':
            results = self._n_extendible(spec)
        else:
            raise ValueError(f'Unknown contract kind {kind}, choose from '
                             f'{KINDS}.')
        if utils.VERBOSE > 0:
            self.test_report(results)
        return results

    def _vanilla(self, spec):
        analytic = call_price(self.params, self.s0, spec, self.control)
        estimate = mc_vanilla_price(self.params, self.s0, spec, self.config)
        return self._compare('vanilla', analytic, estimate)

    def _compound(self, spec, nested):
        analytic = compound_call_price(self.params, self.s0, spec,
                                       self.control)
        critical = CriticalPrice(analytic.details['critical_price'],
                                 analytic.details['critical_residual'])
        estimates = [mc_compound_price(self.params, self.s0, spec,
                                       self.config, variant, critical,
                                       self.control)
                     for variant in (nested, not nested)]
        return self._compare('compound', analytic, *estimates)

    def _extendible(self, spec, nested):
        analytic = extendible_call_price(self.params, self.s0, spec,
                                         self.control)
        # Both variants follow the analytic policy
        critical = (analytic.details['l'], analytic.details['m'])
        estimates = [mc_extendible_price(self.params, self.s0, spec,
                                         self.config, variant, critical,
                                         self.control)
                     for variant in (nested, not nested)]
        return self._compare('extendible', analytic, *estimates)

    def _n_extendible(self, spec):
        analytic = n_extendible_price(self.params, self.s0, spec,
                                      self.control)
        bounds = tuple((analytic.details[f'l{j}'], analytic.details[f'm{j}'])
                       for j in range(1, spec.extensions + 1))
        fixed = NExtendibleSpec(spec.stages, spec.valuation_time, bounds)
        estimate = mc_n_extendible_price(self.params, self.s0, fixed,
                                         self.config, self.control)
        return self._compare('nextendible', analytic, estimate)

    def _compare(self, kind, analytic, estimate, alternative=None):
        value = analytic.value + self.bias
        results = {'kind':      kind,
                   'analytic':  value,
                   'mc_mean':   estimate.mean,
                   'mc_se':     estimate.std_error,
                   'mc_paths':  estimate.paths,
                   'z':         z_score(value, estimate),
                   'flagged':   analytic.flagged}
        if alternative is None:
            results.update({'alt_mean': np.nan, 'alt_se': np.nan,
                            'alt_gap': np.nan})
        else:
            results.update({'alt_mean': alternative.mean,
                            'alt_se':   alternative.std_error,
                            'alt_gap':  value - alternative.mean})
        return pd.DataFrame({key: [results[key]] for key in results})

    def test_report(self, results):
        '''Prints results from test method to stderr.'''
        row = results.iloc[0]
        utils.log(f"{row['kind']}: analytic {row['analytic']:.10g}, "
                  f"MC {row['mc_mean']:.10g} +- {row['mc_se']:.3g} "
                  f"({row['mc_paths']} paths), z = {row['z']:.3f}")
        if not np.isnan(row['alt_mean']):
            utils.log(f"  other continuation: {row['alt_mean']:.10g} "
                      f"+- {row['alt_se']:.3g}, gap {row['alt_gap']:.3g}")
