"""Shared, cached instances for the test-suite."""

from functools import lru_cache

from locality_lab.fusion import fusion_system_of_group
from locality_lab.groupio import BATTERY, builtin_group
from locality_lab.localities import build_locality_from_group

PRIME = {"s3": 3}
CHAR_P = ("s4", "a4", "sl23", "d8", "q8", "s3")  # battery members of characteristic p
SELECTORS = ("cr-closure", "quasicentric", "subcentric")


def prime(key):
    return PRIME.get(key, 2)


@lru_cache(maxsize=None)
def setup(key):
    G = builtin_group(key)
    p = prime(key)
    S = G.sylow(p)
    Sg, F = fusion_system_of_group(G, S)
    return G, p, S, Sg, F


@lru_cache(maxsize=None)
def loc(key, selector="subcentric"):
    G, p, S, Sg, F = setup(key)
    return build_locality_from_group(G, p, selector, S_mask=S, F=F)


__all__ = ["BATTERY", "CHAR_P", "SELECTORS", "prime", "setup", "loc"]
