"""
    Text renderings (plan dumps, codebook dumps, traces)
"""

from os import path

from jinja2 import Environment, FileSystemLoader, StrictUndefined

templateLoader = FileSystemLoader(searchpath=path.dirname(__file__))
templateEnv = Environment(
    loader=templateLoader,
    undefined=StrictUndefined,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def _fmt(value, spec=".6f"):
    return format(value, spec)


templateEnv.filters["fmt"] = _fmt


def render(name: str, **context) -> str:
    template = templateEnv.get_template(name)
    return template.render(**context)
