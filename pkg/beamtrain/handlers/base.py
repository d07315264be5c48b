import argparse
import logging

log = logging.getLogger("beamtrain")


def _comma_list(item_type):
    def parse(text: str) -> list:
        items = [item.strip() for item in text.split(",") if item.strip()]
        try:
            return [item_type(item) for item in items]
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"expected a comma-separated list of {item_type.__name__}. Got '{text}'.")
    parse.__name__ = f"list of {item_type.__name__}"
    return parse


class ErrorReason:
    @classmethod
    def unknown_method(cls, name: str):
        return f"Parameter 'methods' accepts 'single', 'multi', 'rh' or 'all', case-insensitive. Got '{name}'."

    @classmethod
    def missing_config(cls, path: str):
        return f"Config file '{path}' does not exist."

    @classmethod
    def budget_without_rh(cls, budget: int):
        return f"A symbol budget ({budget}) only applies to a random-hashing plan; add --rh."


class BaseCommandHandler:
    """
    A sub-command of the launcher.

    Arguments are declared in the class-level `kwargs` dict, option name -> settings:
        'type':     int, float, str, bool (a flag) or list (comma-separated; items typed by 'item')
        'default':  value when the option is absent
        'required': the option must be given
        'help':     help text
    """
    name = None
    help = None
    kwargs = {}

    def __init__(self, args: argparse.Namespace, settings=None):
        self.args = args
        self.settings = settings

    @classmethod
    def add_parser(cls, subparsers):
        parser = subparsers.add_parser(cls.name, help=cls.help, description=cls.__doc__)
        for option, setting in cls.kwargs.items():
            parser.add_argument(option, **cls._translate(setting))
        parser.set_defaults(handler=cls)
        return parser

    @staticmethod
    def _translate(setting: dict) -> dict:
        setting = dict(setting)
        _type = setting.pop("type", str)
        item = setting.pop("item", str)
        if _type is bool:
            setting["action"] = "store_true"
        elif _type is list:
            setting["type"] = _comma_list(item)
        else:
            setting["type"] = _type
        return setting

    def handle(self) -> int:
        raise NotImplementedError
