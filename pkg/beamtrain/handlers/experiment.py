import logging
import os
from enum import Flag, auto
from functools import reduce
from typing import List

from biothings.utils.configuration import ConfigurationError

from beamtrain.pipeline import ExperimentConfig, emit_results, run_experiment

from .base import BaseCommandHandler, ErrorReason

log = logging.getLogger("beamtrain")


class TrainingMethod(Flag):
    """
    Methods selected for an experiment run.
    """
    NIL = 0
    SINGLE = auto()  # exhaustive single-beam sweep
    MULTI = auto()   # multi-beam sub-array sweep
    RH = auto()      # random-hashing baseline
    ALL = SINGLE | MULTI | RH

    @classmethod
    def mode_of(cls, name: str) -> "TrainingMethod":
        """ Member for a case-insensitive method name; "all" selects every method. """
        if not name:
            return cls.NIL
        member = cls.__members__.get(name.strip().upper())
        if member is None or member is cls.NIL:
            raise ValueError(f"No training method named {name!r}.")
        return member

    @classmethod
    def parse(cls, names: List[str]) -> "TrainingMethod":
        modes = []
        for name in names:
            try:
                modes.append(cls.mode_of(name))
            except ValueError:
                raise ConfigurationError(ErrorReason.unknown_method(name))
        return reduce(lambda x, y: x | y, modes, cls.NIL)

    def names(self) -> List[str]:
        cls = type(self)
        return [member.name.lower() for member in (cls.SINGLE, cls.MULTI, cls.RH) if member in self]


def _flag(value: bool):
    # absent store_true flags must not override the config file
    return True if value else None


class ExperimentCommandHandler(BaseCommandHandler):

    def load_config(self) -> ExperimentConfig:
        path = self.args.config
        if path:
            if not os.path.exists(path):
                raise ConfigurationError(ErrorReason.missing_config(path))
            return ExperimentConfig.load(path)
        settings = self.settings
        return ExperimentConfig(
            snr_grid_db=list(settings.DEFAULT_SNR_GRID_DB),
            m_values=list(settings.DEFAULT_M_VALUES),
            methods=list(settings.DEFAULT_METHODS),
            trials=settings.DEFAULT_TRIALS,
            out_dir=settings.OUTPUT_DIR,
            workers=settings.MAX_WORKERS,
        ).validate()


class RunHandler(ExperimentCommandHandler):
    """
    Run the Monte Carlo experiment and write results.csv / results.json.
    """
    name = "run"
    help = "run the Monte Carlo experiment"

    kwargs = {
        '--config': {'type': str, 'default': None, 'help': "experiment config (JSON)"},
        '--seed': {'type': int, 'default': None},
        '--trials': {'type': int, 'default': None},
        '--out': {'type': str, 'default': None, 'help': "output directory"},
        '--methods': {'type': list, 'default': None, 'help': "e.g. single,multi,rh"},
        '--m': {'type': list, 'item': int, 'default': None, 'help': "sub-array counts, e.g. 2,4,8"},
        '--noiseless': {'type': bool},
        '--trace': {'type': bool, 'help': "write per-trial trace.txt"},
        '--trace-symbols': {'type': bool, 'help': "include per-symbol powers in the trace"},
        '--workers': {'type': int, 'default': None},
        '--frame-symbols': {'type': int, 'default': None, 'help': "frame length for the effective-rate column"},
    }

    def handle(self) -> int:
        args = self.args
        cfg = self.load_config()
        methods = None
        if args.methods is not None:
            methods = TrainingMethod.parse(args.methods).names()
        cfg = cfg.replace(
            seed=args.seed,
            trials=args.trials,
            out_dir=args.out,
            methods=methods,
            m_values=args.m,
            noiseless=_flag(args.noiseless),
            trace=_flag(args.trace or args.trace_symbols),
            trace_symbols=_flag(args.trace_symbols),
            workers=args.workers,
            frame_symbols=args.frame_symbols,
        )
        table = run_experiment(cfg)
        emit_results(table, cfg.out_dir, filenames={
            "csv": self.settings.RESULT_CSV,
            "json": self.settings.RESULT_JSON,
            "trace": self.settings.TRACE_FILE,
        })
        return 0


class ValidateHandler(ExperimentCommandHandler):
    """
    Check an experiment config and list the cells it would evaluate.
    """
    name = "validate"
    help = "validate an experiment config"

    kwargs = {
        '--config': {'type': str, 'required': True},
    }

    def handle(self) -> int:
        cfg = self.load_config()
        log.info("Config '%s' is valid: %d trials, %d cells, %d SNR points.",
                 self.args.config, cfg.trials, len(cfg.cells), len(cfg.snr_grid_db))
        for method, m in cfg.cells:
            log.info("  %s m=%d", method, m)
        return 0
