"""Command-line entry point: gen, sample, train, eval and validate."""

import argparse
import logging
from logging import getLogger

from . import __version__
from .commands import EXIT_USAGE
from .commands.evaluate import EvalCommand
from .commands.gen import GenCommand
from .commands.sample import SampleCommand
from .commands.train import TrainCommand
from .commands.validate import ValidateCommand

logger = getLogger(__name__)

commands = [
    GenCommand,
    SampleCommand,
    TrainCommand,
    EvalCommand,
    ValidateCommand,
]


def build_parser():
    parser = argparse.ArgumentParser(prog="equipair", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)
    for cls in commands:
        command = cls()
        p = sub.add_parser(command.name, help=command.help, description=command.help)
        command.add_arguments(p)
        p.set_defaults(handler=command)
    return parser


def main(argv=None) -> int:
    """Run one command; returns its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    logger.debug(f"{args.command}: {vars(args)}")
    return args.handler.execute(args)
