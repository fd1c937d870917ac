'''Compares an analytic price with its Monte Carlo estimate.'''

import sys
from jmfbm import utils
from jmfbm.config import ArgumentParser, add_config_arguments, run_command
from jmfbm.evaluate import KINDS, Validator


def cmd_mc_check(kind, config, nested=False, bias=0.0, antithetic=False):
    '''Validates one contract against the Monte Carlo oracle. Returns the
    report row (pd.DataFrame) and the exit code: 0 if |z| <= 3, else 3.'''

    if config['paths'] < utils.MC_MIN_PATHS:
        raise ValueError(f'mc-check needs at least {utils.MC_MIN_PATHS} '
                         'paths.')
    validator = Validator(config.model(), config.s0(), config.mc(antithetic),
                          config.control(), bias)
    results = validator.test(kind, config.spec(kind), nested)
    z = results['z'].iloc[0]
    return results, 0 if abs(z) <= utils.Z_THRESHOLD else 3


def add_arguments(parser):

    parser.add_argument('kind',
        choices=KINDS,
        help='Contract to validate (same parameters as the price command).')

    parser.add_argument('--nested',
        default=False,
        action='store_true',
        help='Compound and extendible: compare against the fully simulated '
             'continuation instead of the analytic call value at T1 '
             '(default is False).')

    parser.add_argument('--antithetic',
        default=False,
        action='store_true',
        help='Use antithetic variates (default is False).')

    parser.add_argument('--bias',
        default=[0.0],
        type=float,
        nargs=1,
        help='Added to the analytic price, to check that a disagreement is '
             'detected (default is 0).')

    add_config_arguments(parser)


def run(args, parser=None):
    command = lambda config, args: cmd_mc_check(args.kind, config,
                                                args.nested, args.bias[0],
                                                args.antithetic)
    return run_command(command, args, parser)


def main(argv=None):

    parser = ArgumentParser(prog='jmfbm-mc-check',
        description='Analytic versus Monte Carlo price, with z-score. Exits '
                    'with code 3 when |z| > 3.')
    add_arguments(parser)
    args = parser.parse_args(argv)
    return run(args, parser)


if __name__ == '__main__':

    sys.exit(main())
