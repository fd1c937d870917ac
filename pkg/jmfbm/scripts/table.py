'''Sweeps extendible call prices over a grid of first expiries and strikes
under the Merton, mixed fractional and JMFBM models.'''

import sys
import itertools
from tqdm import tqdm
from jmfbm import utils
from jmfbm.config import (ArgumentParser, COMPLETION_KEYS, float_list,
                          add_config_arguments, concat_rows, run_command)
from jmfbm.pricing import (NExtendibleSpec, extendible_call_price,
                           n_extendible_price, richardson_extrapolate)


def extendible_value(params, s0, spec, control):
    '''Extendible price; when the solved extension region is empty or
    unbounded, falls back to the N-extendible pricer, which handles those
    policies (plain call, or never exercising at T1).'''
    try:
        return extendible_call_price(params, s0, spec, control)
    except utils.NoExtensionRegionError as error:
        utils.log(f'T1 = {spec.expiry1}, K1 = {spec.strike1}: {error}',
                  level=2)
        return n_extendible_price(params, s0,
                                  NExtendibleSpec.from_extendible(spec),
                                  control)


def sweep(config, t1_grid, k1_grid):
    '''Prices every (T1, K1) cell under the three models. Returns the rows as
    a pd.DataFrame and whether any price was flagged.'''

    config.require(COMPLETION_KEYS, explicit=True)
    if not (t1_grid and k1_grid):
        raise ValueError('Grids must not be empty.')
    params, s0, control = config.model(), config.s0(), config.control()
    models = {'merton': params.merton(), 'mfbm': params.mfbm(),
              'jmfbm': params}
    rows, flagged = [], False
    cells = list(itertools.product(t1_grid, k1_grid))
    for t1, k1 in tqdm(cells, disable=utils.VERBOSE == 0, leave=False):
        spec = config.extendible(t1=t1, k1=k1)
        row = {'t1': t1, 'k1': k1}
        for name, model in models.items():
            result = extendible_value(model, s0, spec, control)
            flagged = flagged or result.flagged
            row[f'price_{name}'] = result.value
        # Extrapolated from the Brownian (H = 1/2) and fractional prices
        row['price_richardson'] = richardson_extrapolate(row['price_merton'],
                                                         row['price_jmfbm'])
        rows.append(row)
    return concat_rows(rows), flagged


def cmd_table(config, t1_grid, k1_grid):
    '''Table of extendible prices: t1, k1, price_merton, price_mfbm,
    price_jmfbm, price_richardson (= 2*price_jmfbm - price_merton).'''
    frame, flagged = sweep(config, t1_grid, k1_grid)
    return frame, 2 if flagged else 0


def add_grid_arguments(parser):

    parser.add_argument('--t1-grid',
        dest='t1_grid',
        required=True,
        type=float_list,
        nargs=1,
        help='Comma-separated first expiries T1.')

    parser.add_argument('--k1-grid',
        dest='k1_grid',
        required=True,
        type=float_list,
        nargs=1,
        help='Comma-separated first strikes K1.')


def add_arguments(parser):
    add_grid_arguments(parser)
    add_config_arguments(parser)


def run(args, parser=None):
    command = lambda config, args: cmd_table(config, args.t1_grid[0],
                                             args.k1_grid[0])
    return run_command(command, args, parser)


def main(argv=None):

    parser = ArgumentParser(prog='jmfbm-table',
        description='Extendible call prices over a T1 x K1 grid. The jump '
                    'intensity, second expiry, second strike and valuation '
                    'time must be given explicitly.')
    add_arguments(parser)
    args = parser.parse_args(argv)
    return run(args, parser)


if __name__ == '__main__':

    sys.exit(main())
