"""Built-in systems and parameter perturbation.

Built-ins are plain definition files shipped next to this module and parsed
through the same code path as user files.
"""
from __future__ import annotations

import dataclasses
from functools import lru_cache
from importlib import resources

from ..dsl.definition import NonlinearTermDef, SystemDef, parse_definition
from ..errors import UnknownParameter, UnknownSystem

BUILTIN_NAMES = ("rossler_original", "rossler_v1", "rossler_v2", "fitzhugh_nagumo")


def builtin_source(name: str) -> str:
    if name not in BUILTIN_NAMES:
        raise UnknownSystem(f"unknown system {name!r}; built-ins are {', '.join(BUILTIN_NAMES)}")
    return resources.files(__name__).joinpath(f"{name}.sys").read_text(encoding="ascii")


@lru_cache(maxsize=None)
def builtin(name: str) -> SystemDef:
    return parse_definition(builtin_source(name), default_name=name)


def perturb(system: SystemDef, param: str, relative_change: float) -> SystemDef:
    """Copy of ``system`` with ``param`` scaled by ``1 + relative_change``."""
    if param not in system.params:
        raise UnknownParameter(
            f"{system.name} has no parameter {param!r}; parameters are {sorted(system.params)}")
    params = dict(system.params)
    params[param] = params[param] * (1.0 + relative_change)
    return dataclasses.replace(system, params=params, source="")


__all__ = ["BUILTIN_NAMES", "SystemDef", "NonlinearTermDef", "builtin", "builtin_source",
           "perturb"]
