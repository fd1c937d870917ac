'''Run configuration for the command-line scripts: a plain-text key = value
file merged with command-line flags (flag > file > default).'''

import sys
import argparse
import pandas as pd
from dataclasses import dataclass, field
from jmfbm import utils
from jmfbm.model import ModelParams, SeriesControl, TimeWindow
from jmfbm.montecarlo import McConfig
from jmfbm.pricing import (VanillaCallSpec, CompoundCallSpec,
                           ExtendibleCallSpec, ExtensionStage, NExtendibleSpec)


def float_list(text):
    '''Parses a comma-separated list of floats'''
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f'Invalid list of numbers: {text}')


# Key: (type, help)
KEYS = {
    'r':         (float, 'Risk-free rate per year.'),
    'q':         (float, 'Dividend yield per year (default is 0).'),
    'sigma':     (float, 'Volatility of both Gaussian components.'),
    'hurst':     (float, 'Hurst exponent in (0, 1).'),
    'lambda':    (float, 'Jump intensity per year (default is 0 for price '
                         'and mc-check, required for table and figure).'),
    'k':         (float, 'Mean proportional jump size (default is 0).'),
    'sigma_j':   (float, 'Standard deviation of the log jump (default is 0).'),
    's0':        (float, 'Spot price at the valuation time.'),
    'k1':        (float, 'First strike: vanilla strike, compound strike, or '
                         'initial extendible strike.'),
    't1':        (float, 'First expiry (vanilla expiry).'),
    'k2':        (float, 'Second strike: underlying call strike of the '
                         'compound, or extended strike.'),
    't2':        (float, 'Second expiry.'),
    'premium':   (float, 'Extension premium paid at T1.'),
    'l':         (float, 'Supplied lower critical value L (with m).'),
    'm':         (float, 'Supplied upper critical value M (with l).'),
    't0':        (float, 'Valuation time (default is 0 for price and '
                         'mc-check, required for table and figure).'),
    'paths':     (int,   f'Monte Carlo paths (default is {utils.MC_PATHS}).'),
    'seed':      (int,   f'Monte Carlo seed (default is {utils.MC_SEED}).'),
    'batch':     (int,   'Paths per batch, memory only (default is '
                         f'{utils.MC_BATCH}).'),
    'tail_tol':  (float, 'Poisson tail tolerance (default is '
                         f'{utils.TAIL_TOLERANCE}).'),
    'max_terms': (int,   'Poisson term cap (default is '
                         f'{utils.MAX_TERMS}).'),
    'expiries':  (float_list, 'N-extendible expiries T1,...,TN+1.'),
    'strikes':   (float_list, 'N-extendible strikes K1,...,KN+1.'),
    'premiums':  (float_list, 'N-extendible premiums, either N values (paid '
                              'at T1..TN) or N+1 values starting with 0.'),
}

DEFAULTS = {'q': 0.0, 'lambda': 0.0, 'k': 0.0, 'sigma_j': 0.0, 't0': 0.0,
            'paths': utils.MC_PATHS, 'seed': utils.MC_SEED,
            'batch': utils.MC_BATCH, 'tail_tol': utils.TAIL_TOLERANCE,
            'max_terms': utils.MAX_TERMS}

# Sweep parameters that must be set explicitly, never defaulted
COMPLETION_KEYS = ['lambda', 't2', 'k2', 't0']


def read_config_file(path):
    '''Reads `key = value` lines ('#' starts a comment) into a dict of parsed
    values. Raises ValueError on malformed lines and unknown keys.'''

    values = {}
    with open(path) as file:
        for number, line in enumerate(file, start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            key, sep, text = line.partition('=')
            key, text = key.strip(), text.strip()
            if not sep or not key or not text:
                raise ValueError(f'{path}:{number}: expected "key = value".')
            if key not in KEYS:
                raise ValueError(f'{path}:{number}: unknown key "{key}".')
            parser = KEYS[key][0]
            try:
                values[key] = parser(text)
            except (ValueError, argparse.ArgumentTypeError):
                raise ValueError(f'{path}:{number}: invalid value for {key}.')
    return values


@dataclass
class RunConfig:
    '''Merged run configuration.

    Attributes
    ----------
    values: dict
        Key to value, after merging flags, file and defaults.
    explicit: set
        Keys set by a flag or the config file (not by a default).
    out: str | None
        Output CSV path, None for standard output.'''

    values: dict = field(default_factory=dict)
    explicit: set = field(default_factory=set)
    out: str = None

    @classmethod
    def from_args(cls, args):
        '''Merges parsed flags over the --config file over DEFAULTS'''
        from_file = {}
        if getattr(args, 'config', None) is not None:
            from_file = read_config_file(args.config[0])
        from_flags = {}
        for key in KEYS:
            value = getattr(args, key, None)
            if value is not None:
                from_flags[key] = value[0]
        values = {**DEFAULTS, **from_file, **from_flags}
        out = getattr(args, 'out', None)
        return cls(values, set(from_file) | set(from_flags),
                   out[0] if out is not None else None)

    def __getitem__(self, key):
        try:
            return self.values[key]
        except KeyError:
            raise ValueError(f'Missing required parameter "{key}" (set it '
                             f'with --{key.replace("_", "-")} or in the '
                             'config file).')

    def require(self, keys, explicit=False):
        '''Raises ValueError naming every missing key. With `explicit`, keys
        filled in by defaults count as missing.'''
        present = self.explicit if explicit else self.values
        missing = [key for key in keys if key not in present]
        if missing:
            flags = ', '.join('--' + key.replace('_', '-') for key in missing)
            raise ValueError(f'Missing required parameters: {flags}.')

    def model(self):
        self.require(['r', 'sigma', 'hurst'])
        return ModelParams(r=self['r'], sigma=self['sigma'],
                           hurst=self['hurst'], lam=self['lambda'],
                           k=self['k'], sigma_j=self['sigma_j'], q=self['q'])

    def control(self):
        return SeriesControl(self['tail_tol'], self['max_terms'])

    def mc(self, antithetic=False):
        return McConfig(self['paths'], self['seed'], self['batch'], antithetic)

    def vanilla(self):
        self.require(['k1', 't1'])
        return VanillaCallSpec(self['k1'], TimeWindow(self['t0'], self['t1']))

    def compound(self):
        self.require(['k1', 't1', 'k2', 't2'])
        return CompoundCallSpec(self['k1'], self['t1'], self['k2'],
                                self['t2'], self['t0'])

    def extendible(self, t1=None, k1=None):
        '''Extendible spec, optionally overriding the first expiry/strike
        (grid sweeps)'''
        self.require(['k2', 't2', 'premium'] + ['t1']*(t1 is None)
                     + ['k1']*(k1 is None))
        critical = None
        if 'l' in self.values or 'm' in self.values:
            self.require(['l', 'm'])
            critical = (self['l'], self['m'])
        return ExtendibleCallSpec(self['k1'] if k1 is None else k1,
                                  self['t1'] if t1 is None else t1,
                                  self['k2'], self['t2'], self['premium'],
                                  self['t0'], critical)

    def n_extendible(self):
        self.require(['expiries', 'strikes', 'premiums'])
        expiries, strikes = self['expiries'], self['strikes']
        premiums = list(self['premiums'])
        if len(premiums) == len(expiries) - 1:
            premiums = [0.0] + premiums
        if not len(expiries) == len(strikes) == len(premiums):
            raise ValueError('expiries, strikes and premiums must have '
                             'matching lengths.')
        stages = tuple(ExtensionStage(*stage)
                       for stage in zip(expiries, strikes, premiums))
        return NExtendibleSpec(stages, self['t0'])

    def spec(self, kind):
        '''Contract spec of the given kind'''
        builders = {'vanilla': self.vanilla, 'compound': self.compound,
                    'extendible': self.extendible,
                    'nextendible': self.n_extendible}
        return builders[kind]()

    def s0(self):
        self.require(['s0'])
        if not self['s0'] > 0:
            raise ValueError('s0 must be positive.')
        return self['s0']


class ArgumentParser(argparse.ArgumentParser):
    '''Argument parser that exits with code 1 on usage errors.'''

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f'{self.prog}: error: {message}\n')


def add_config_arguments(parser, keys=KEYS):
    '''Adds --config, --out, --verbose and one flag per configuration key'''

    parser.add_argument('--config',
        default=None,
        type=str,
        nargs=1,
        help='Path to a plain-text file with one "key = value" per line.')

    parser.add_argument('--out',
        default=None,
        type=str,
        nargs=1,
        help='Where to save the CSV output to (default is standard output).')

    parser.add_argument('--verbose',
        default=[utils.VERBOSE],
        type=int,
        nargs=1,
        help='Verbosity on standard error: 0 silent, 1 normal, 2 detailed '
             f'(default is {utils.VERBOSE}).')

    for key in keys:
        kind, text = KEYS[key]
        parser.add_argument('--' + key.replace('_', '-'),
            dest=key,
            default=None,
            type=kind,
            nargs=1,
            help=text)


def write_csv(frame, out=None):
    '''Writes a DataFrame as CSV with 17 significant digits'''
    frame.to_csv(sys.stdout if out is None else out, index=False,
                 float_format=utils.CSV_FLOAT_FORMAT, lineterminator='\n')
    if out is not None:
        utils.log(f'Results saved to {out}')


def run_command(command, args, parser=None):
    '''Calls command(config, args), writes its DataFrame and returns its exit
    code. Errors are printed to stderr (with usage) and give exit code 1.'''

    utils.VERBOSE = args.verbose[0]
    try:
        config = RunConfig.from_args(args)
        frame, code = command(config, args)
        write_csv(frame, config.out)
    except (ValueError, ArithmeticError, OSError) as error:
        if parser is not None:
            parser.print_usage(sys.stderr)
        print(f'error: {error}', file=sys.stderr)
        return 1
    return code


def concat_rows(rows):
    '''Stacks one-row dicts into a DataFrame, keeping the key order of the
    first row'''
    return pd.DataFrame(rows, columns=list(rows[0]))
