"""Shared fixtures-by-function: cached estimates so several test modules can reuse expensive searches."""

from functools import lru_cache

from planeconst import constants as C
from planeconst.normspace import parse_space, random_polygon_spec, NormedPlane

BUILTINS = ("euclidean", "l1", "linf", "l2-l1", "linf-l1", "l3", "l4")

ACCEPTANCE_LOG: list[str] = []


@lru_cache(maxsize=None)
def plane(name: str) -> NormedPlane:
    return parse_space(name)


@lru_cache(maxsize=None)
def polygon(seed: int) -> NormedPlane:
    return NormedPlane(random_polygon_spec(seed), f"polygon-{seed}")


def _plane(key):
    return polygon(key) if isinstance(key, int) else plane(key)


@lru_cache(maxsize=None)
def L(key, t: float):
    return C.L_value(_plane(key), t)


@lru_cache(maxsize=None)
def L_gamma(key, t: float):
    return C.L_via_gamma(_plane(key), t)


@lru_cache(maxsize=None)
def gamma(key, t: float):
    return C.gamma(_plane(key), t)


@lru_cache(maxsize=None)
def cnj(key):
    return C.cnj(_plane(key))


@lru_cache(maxsize=None)
def cnj_from_L(key):
    return C.cnj_from_L(_plane(key))


@lru_cache(maxsize=None)
def james(key):
    return C.james(_plane(key))


@lru_cache(maxsize=None)
def delta(key, eps: float):
    return C.delta(_plane(key), eps)


def t_grid(step, stop, start=0.0):
    n = int(round((stop - start) / step))
    return [round(start + k * step, 10) for k in range(n + 1)]
