'''Closed-form series prices for vanilla, compound and extendible calls.'''

from .vanilla import VanillaCallSpec, PriceResult, CallSeries, call_price, \
    call_price_in_spot
from .compound import CompoundCallSpec, CriticalPrice, critical_price, \
    compound_call_price
from .extendible import ExtendibleCallSpec, CriticalValues, ExtensionStage, \
    NExtendibleSpec, critical_values, extendible_call_price, \
    mfbm_extendible_price, n_extendible_critical_values, n_extendible_price, \
    richardson_extrapolate
