"""Hot loops with a compiled backend and a numpy fallback.

The compiled module is used when it was built and importable; setting
``LOCALITY_LAB_PURE=1`` forces the fallback.  Both backends return
identical results; the test-suite checks this on random inputs.
"""

import os

import numpy as np

from locality_lab._kernels import _pykernels

_compiled = None
if os.environ.get("LOCALITY_LAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from locality_lab._kernels import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"

_MAX_MASK_STATES = 64


def _i32(a):
    return np.ascontiguousarray(a, dtype=np.int32)


def _use_compiled(succ=None):
    return _compiled is not None and (succ is None or succ.shape[0] <= _MAX_MASK_STATES)


def closure(mul, seeds, identity):
    if _use_compiled():
        return _compiled.closure(_i32(mul), list(seeds), int(identity))
    return _pykernels.closure(mul, seeds, identity)


def domain_pairs(succ):
    succ = _i32(succ)
    if _use_compiled(succ):
        return _compiled.domain_pairs(succ)
    return _pykernels.domain_pairs(succ)


def triple_scan(succ, pair):
    succ, pair = _i32(succ), _i32(pair)
    if _use_compiled(succ):
        return _compiled.triple_scan(succ, pair)
    return _pykernels.triple_scan(succ, pair)


def conj_table(succ, pair, inv):
    succ, pair, inv = _i32(succ), _i32(pair), _i32(inv)
    if _use_compiled(succ):
        return _compiled.conj_table(succ, pair, inv)
    return _pykernels.conj_table(succ, pair, inv)


def explore_product(succ, dfa_next, dfa_accept):
    succ, dfa_next = _i32(succ), _i32(dfa_next)
    if _use_compiled(succ):
        return _compiled.explore_product(succ, dfa_next, np.asarray(dfa_accept))
    return _pykernels.explore_product(succ, dfa_next, np.asarray(dfa_accept))
