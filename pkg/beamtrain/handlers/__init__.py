"""
    Command-line sub-commands
"""

from .base import BaseCommandHandler, ErrorReason
from .experiment import RunHandler, TrainingMethod, ValidateHandler
from .plan import DumpCodebookHandler, DumpPlanHandler

COMMANDS = [
    RunHandler,
    DumpPlanHandler,
    DumpCodebookHandler,
    ValidateHandler,
]
