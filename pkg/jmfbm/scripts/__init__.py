'''Command-line scripts, each with its own main(), also reachable as
subcommands of `python -m jmfbm`.'''
