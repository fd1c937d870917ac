'''Command-line entry point: python -m jmfbm {price,table,figure,mc-check}'''

import sys
from jmfbm.config import ArgumentParser
from jmfbm.scripts import price, table, figure, mc_check

COMMANDS = {'price': price, 'table': table, 'figure': figure,
            'mc-check': mc_check}


def main(argv=None):

    parser = ArgumentParser(prog='jmfbm',
        description='Option pricing under a jump mixed fractional Brownian '
                    'motion.')
    subparsers = parser.add_subparsers(dest='command', required=True)
    for name, module in COMMANDS.items():
        subparser = subparsers.add_parser(name,
            help=module.__doc__.split('\n')[0])
        module.add_arguments(subparser)
        subparser.set_defaults(run=module.run, parser=subparser)
    args = parser.parse_args(argv)
    return args.run(args, args.parser)


if __name__ == '__main__':

    sys.exit(main())
