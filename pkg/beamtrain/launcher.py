"""
    Command-line entry point.

    index.py calls main(COMMANDS, config_sim). Exit codes:
        0  success
        2  configuration or argument error
        3  runtime or I/O error
"""

import argparse
import logging
import types
from typing import Optional, Sequence

from biothings.utils.common import dotdict
from biothings.utils.configuration import ConfigurationError
from biothings.utils.loggers import setup_default_log

from beamtrain.service import ProtocolError
from beamtrain.utils import InvalidArgumentError, InvalidSizeError

log = logging.getLogger("beamtrain")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

DEFAULT_SETTINGS = {
    "LOG_FOLDER": None,
    "LOG_LEVEL": "INFO",
    "MAX_WORKERS": 1,
    "OUTPUT_DIR": "results",
    "RESULT_CSV": "results.csv",
    "RESULT_JSON": "results.json",
    "TRACE_FILE": "trace.txt",
    "DEFAULT_TRIALS": 1500,
    "DEFAULT_SNR_GRID_DB": [30.0 + 2.5 * i for i in range(11)],
    "DEFAULT_M_VALUES": [2, 4, 8],
    "DEFAULT_METHODS": ["single", "multi", "rh"],
}


def load_settings(settings=None) -> dotdict:
    """
    Merge upper-case names of a settings module (or dict) over the defaults.
    """
    merged = dict(DEFAULT_SETTINGS)
    if isinstance(settings, types.ModuleType):
        settings = {key: getattr(settings, key) for key in dir(settings) if key.isupper()}
    merged.update(settings or {})
    return dotdict(merged)


def setup_logging(settings: dotdict, level: Optional[str] = None):
    level = getattr(logging, (level or settings.LOG_LEVEL).upper(), None)
    if not isinstance(level, int):
        raise ConfigurationError(f"Unknown log level '{level or settings.LOG_LEVEL}'.")
    if settings.LOG_FOLDER:
        setup_default_log("beamtrain", settings.LOG_FOLDER, level)
    else:
        logging.basicConfig(format="%(asctime)s %(levelname)s %(message)s")
    log.setLevel(level)


def build_parser(commands, settings: dotdict) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beamtrain", description="IRS reflect-beam training experiments")
    parser.add_argument("--log-level", default=None, help=f"default {settings.LOG_LEVEL}")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True
    for handler in commands:
        handler.add_parser(subparsers)
    return parser


def main(commands, settings=None, argv: Optional[Sequence[str]] = None) -> int:
    settings = load_settings(settings)
    parser = build_parser(commands, settings)
    args = parser.parse_args(argv)

    try:
        setup_logging(settings, args.log_level)
        return args.handler(args, settings).handle()
    except (ConfigurationError, InvalidArgumentError, InvalidSizeError) as exc:
        log.error("%s: %s", args.command, exc)
        return EXIT_CONFIG
    except (ProtocolError, OSError, RuntimeError) as exc:
        log.error("%s failed: %s", args.command, exc)
        return EXIT_RUNTIME
    except Exception:
        log.exception("%s failed unexpectedly", args.command)
        return EXIT_RUNTIME
