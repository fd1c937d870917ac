'''Prices a single vanilla, compound, extendible or N-extendible call and
writes the result as a CSV row.'''

import sys
from jmfbm import utils
from jmfbm.config import (ArgumentParser, add_config_arguments, concat_rows,
                          run_command)
from jmfbm.evaluate import KINDS
from jmfbm.pricing import (call_price, compound_call_price,
                           extendible_call_price, n_extendible_price)

PRICERS = {'vanilla':     call_price,
           'compound':    compound_call_price,
           'extendible':  extendible_call_price,
           'nextendible': n_extendible_price}


def cmd_price(kind, config):
    '''Prices one contract of the given kind. Returns a one-row pd.DataFrame
    (inputs, price, series diagnostics, critical values and residuals) and
    the exit code (2 if the result is flagged).'''

    params, s0 = config.model(), config.s0()
    spec = config.spec(kind)
    result = PRICERS[kind](params, s0, spec, config.control())
    row = {'kind': kind, 's0': s0, **utils.get_config(params),
           **utils.get_config(spec), **utils.get_config(result)}
    return concat_rows([row]), 2 if result.flagged else 0


def add_arguments(parser):
    parser.add_argument('kind',
        choices=KINDS,
        help='Contract to price. Vanilla uses k1, t1; compound uses k1, t1 '
             '(outer) and k2, t2 (underlying call); extendible uses k1, t1, '
             'k2, t2, premium and optionally l, m; nextendible uses '
             'expiries, strikes, premiums.')
    add_config_arguments(parser)


def run(args, parser=None):
    return run_command(lambda config, args: cmd_price(args.kind, config),
                       args, parser)


def main(argv=None):

    parser = ArgumentParser(prog='jmfbm-price',
        description='Prices a call option under the jump mixed fractional '
                    'Brownian motion model.')
    add_arguments(parser)
    args = parser.parse_args(argv)
    return run(args, parser)


if __name__ == '__main__':

    sys.exit(main())
