'''Example script that demonstrates how to use the jmfbm package'''

from jmfbm import utils
from jmfbm.model import ModelParams, TimeWindow
from jmfbm.pricing import (VanillaCallSpec, CompoundCallSpec,
                           ExtendibleCallSpec, NExtendibleSpec, call_price,
                           compound_call_price, extendible_call_price,
                           n_extendible_price, richardson_extrapolate)
from jmfbm.montecarlo import McConfig
from jmfbm.evaluate import Validator

# Some settings
# utils.VERBOSE = 2 # Uncomment for detailed progress on stderr

# Risk-neutral model: fractional component with H = 0.8 plus lognormal jumps
params = ModelParams(r=0.05, sigma=0.2, hurst=0.8, lam=0.5, k=-0.05,
                     sigma_j=0.15)
s0 = 100

# Vanilla call over [0, 1]
vanilla = call_price(params, s0, VanillaCallSpec(100, TimeWindow(0, 1)))
print('Vanilla:', vanilla.value, vanilla.get_config())

# Call on a call: pay 6 at T1 = 0.5 for a call struck at 100 expiring at 1
compound = compound_call_price(params, s0, CompoundCallSpec(6, 0.5, 100, 1))
print('Compound:', compound.value, 'S* =', compound.details['critical_price'])

# Holder-extendible call: at T1 = 1, pay 2 to extend to T2 = 2 at strike 105
spec = ExtendibleCallSpec(100, 1.0, 105, 2.0, premium=2.0)
extendible = extendible_call_price(params, s0, spec)
print('Extendible:', extendible.value, 'region',
      (extendible.details['l'], extendible.details['m']))

# Same contract under the reduced models, and the extrapolated price
merton = extendible_call_price(params.merton(), s0, spec).value
print('Richardson:', richardson_extrapolate(merton, extendible.value))

# Two extensions, priced by backward induction (same first extension)
nspec = NExtendibleSpec(((1.0, 100), (2.0, 105, 2.0), (3.0, 110, 2.0)))
print('2-extendible:', n_extendible_price(params, s0, nspec).value)

# Check against Monte Carlo (fixed seed, reproducible)
validator = Validator(params, s0, McConfig(paths=200000, seed=1))
report = validator.test('extendible', spec)
report.to_csv('extendible_check.csv', index=False) # Export for later use
