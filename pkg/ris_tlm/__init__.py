"""
Transmission-line model of varactor-tuned reconfigurable intelligent surfaces.

Unit-cell reflection under oblique incidence, phase-gradient synthesis of the
varactor capacitances and coherent RIS link budgets.

:copyright: (c) 2025 by the ris-tlm contributors.
:license: MPL-2.0, see LICENSE for more details.
"""

import argparse
import logging
import sys
import warnings

from . import const
from .constants import GammaSource, Subcommand, SynthesisMode
from .errors import ConfigError, RisModelError

__version__ = "0.3.0"

_LOG = logging.getLogger(__name__)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ris-tlm", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for command in Subcommand:
        cmd = sub.add_parser(command.value)
        cmd.add_argument("--config", help="TOML configuration file (defaults reproduce the reference scenario)")
        cmd.add_argument("--out", help="output directory (overrides [output] directory)")
        cmd.add_argument("-v", "--verbose", action="store_true", help="debug logging")
        if command == Subcommand.SYNTHESIZE:
            cmd.add_argument("--mode", choices=[m.value for m in SynthesisMode])
        if command == Subcommand.LINK:
            cmd.add_argument("--gamma", choices=[g.value for g in GammaSource])
    return parser


def _run(args: argparse.Namespace) -> int:
    # imported here so that `--help` stays fast
    from . import driver
    from .parser import load_config

    config = load_config(args.config)
    command = Subcommand(args.command)
    if command == Subcommand.CELL_RESPONSE:
        driver.cmd_cell_response(config, args.out)
    elif command == Subcommand.LOOKUP:
        driver.cmd_lookup(config, args.out)
    elif command == Subcommand.SYNTHESIZE:
        driver.cmd_synthesize(config, args.out, args.mode)
    elif command == Subcommand.LINK:
        driver.cmd_link(config, args.out, args.gamma)
    else:
        report = driver.cmd_validate_pec(config, args.out)
        if not report.passed:
            return const.EXIT_VALIDATION_FAIL
    return const.EXIT_OK


def main(argv: list[str] | None = None) -> int:
    """Command-line entry point; returns the process exit code."""
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    logging.captureWarnings(True)
    warnings.simplefilter("default")

    _LOG.info("=" * 70)
    _LOG.info("ris-tlm v%s: %s", __version__, args.command)
    _LOG.info("=" * 70)
    try:
        code = _run(args)
    except ConfigError as err:
        _LOG.error("Configuration error: %s", err)
        return const.EXIT_CONFIG_ERROR
    except (RisModelError, FloatingPointError) as err:
        _LOG.error("Numerical error: %s", err)
        return const.EXIT_NUMERIC_ERROR
    _LOG.info("Finished %s (exit code %d)", args.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
