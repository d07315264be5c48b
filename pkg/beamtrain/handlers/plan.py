import sys

from biothings.utils.configuration import ConfigurationError

from beamtrain.codebook import Codebook, CodebookGeometry
from beamtrain.sweep import build_rh_plan, build_sweep_plan, training_symbols

from .base import BaseCommandHandler, ErrorReason


class DumpPlanHandler(BaseCommandHandler):
    """
    Print a sweeping schedule, one training symbol per line: r,b,j_1,...,j_M
    """
    name = "dump-plan"
    help = "print the sweep plan for n_x and m"

    kwargs = {
        '--nx': {'type': int, 'required': True},
        '--m': {'type': int, 'required': True},
        '--rh': {'type': bool, 'help': "random-hashing plan instead"},
        '--seed': {'type': int, 'default': 0},
        '--budget': {'type': int, 'default': None, 'help': "random-hashing symbol budget"},
    }

    def handle(self) -> int:
        args = self.args
        geo = CodebookGeometry(args.nx, args.m)
        if args.rh:
            budget = training_symbols(geo) if args.budget is None else args.budget
            plan = build_rh_plan(geo, args.seed, budget)
        elif args.budget is not None:
            raise ConfigurationError(ErrorReason.budget_without_rh(args.budget))
        else:
            plan = build_sweep_plan(geo)
        sys.stdout.write(plan.dump())
        return 0


class DumpCodebookHandler(BaseCommandHandler):
    """
    Print the single-beam codebook as element phases in turns.
    """
    name = "dump-codebook"
    help = "print the single-beam codebook for n_x"

    kwargs = {
        '--nx': {'type': int, 'required': True},
    }

    def handle(self) -> int:
        sys.stdout.write(Codebook(self.args.nx).dump())
        return 0
