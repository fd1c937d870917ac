'''Writes the surface of JMFBM extendible prices minus their Merton and mixed
fractional counterparts over a T1 x K1 grid, as long-format CSV for external
plotting.'''

import sys
from jmfbm.config import ArgumentParser, add_config_arguments, run_command
from jmfbm.scripts.table import add_grid_arguments, sweep


def cmd_figure(config, t1_grid, k1_grid):
    '''Model differences per grid cell: t1, k1, jmfbm_minus_merton,
    jmfbm_minus_mfbm.'''
    prices, flagged = sweep(config, t1_grid, k1_grid)
    frame = prices[['t1', 'k1']].copy()
    frame['jmfbm_minus_merton'] = prices['price_jmfbm'] - prices['price_merton']
    frame['jmfbm_minus_mfbm'] = prices['price_jmfbm'] - prices['price_mfbm']
    return frame, 2 if flagged else 0


def add_arguments(parser):
    add_grid_arguments(parser)
    add_config_arguments(parser)


def run(args, parser=None):
    command = lambda config, args: cmd_figure(config, args.t1_grid[0],
                                              args.k1_grid[0])
    return run_command(command, args, parser)


def main(argv=None):

    parser = ArgumentParser(prog='jmfbm-figure',
        description='Differences between JMFBM and reduced-model extendible '
                    'prices over a T1 x K1 grid.')
    add_arguments(parser)
    args = parser.parse_args(argv)
    return run(args, parser)


if __name__ == '__main__':

    sys.exit(main())
