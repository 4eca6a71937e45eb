import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from locality_lab import _kernels
from locality_lab._kernels import _pykernels
from helpers import loc

try:
    from locality_lab._kernels import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_compiled = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def _i32(a):
    return np.ascontiguousarray(a, dtype=np.int32)


def test_backend_flag():
    assert _kernels.BACKEND in ("cython", "python")
    if _ckernels is not None:
        assert _kernels.BACKEND == "cython" or _kernels.os.environ.get("LOCALITY_LAB_PURE")


@st.composite
def automata(draw):
    k = draw(st.integers(1, 4))
    n = draw(st.integers(1, 7))
    succ = draw(st.lists(st.integers(-1, k - 1), min_size=k * n, max_size=k * n))
    pair = draw(st.lists(st.integers(-1, n - 1), min_size=n * n, max_size=n * n))
    inv = draw(st.permutations(range(n)))
    return (np.array(succ, dtype=np.int32).reshape(k, n),
            np.array(pair, dtype=np.int32).reshape(n, n),
            np.array(inv, dtype=np.int32))


@needs_compiled
@settings(max_examples=150, deadline=None)
@given(automata())
def test_backends_agree_on_random_automata(data):
    succ, pair, inv = data
    assert np.array_equal(_ckernels.domain_pairs(_i32(succ)), _pykernels.domain_pairs(succ))
    assert np.array_equal(_ckernels.conj_table(_i32(succ), _i32(pair), _i32(inv)),
                          _pykernels.conj_table(succ, pair, inv))
    c1, w1 = _ckernels.triple_scan(_i32(succ), _i32(pair))
    c2, w2 = _pykernels.triple_scan(succ, pair)
    assert (w1 is None) == (w2 is None)
    if w1 is None:
        assert c1 == c2
    else:
        assert w1[3] in ("prefix not in domain", "suffix not in domain",
                         "contraction not in domain", "contraction changes product")


@needs_compiled
@settings(max_examples=80, deadline=None)
@given(automata(), st.data())
def test_backends_agree_on_product_exploration(data, more):
    succ, _, _ = data
    k, n = succ.shape
    m = more.draw(st.integers(1, 5))
    nxt = np.array(more.draw(st.lists(st.integers(0, m - 1), min_size=m * n, max_size=m * n)),
                   dtype=np.int32).reshape(m, n)
    acc = np.array(more.draw(st.lists(st.booleans(), min_size=m, max_size=m)))
    acc[0] = True
    w1 = _ckernels.explore_product(_i32(succ), nxt, acc)
    w2 = _pykernels.explore_product(succ, nxt, acc)
    assert (w1 is None) == (w2 is None)
    if w1 is not None:
        assert len(w1) == len(w2)  # both breadth-first: shortest witnesses


@needs_compiled
@settings(max_examples=50, deadline=None)
@given(st.sampled_from(["s4", "sl23", "gl32"]), st.lists(st.integers(0, 10 ** 6), max_size=3))
def test_backends_agree_on_closure(key, raw):
    from helpers import setup

    G = setup(key)[0]
    seeds = [r % G.n for r in raw]
    a = _ckernels.closure(_i32(G.mul), seeds, G.identity)
    b = _pykernels.closure(G.mul, seeds, G.identity)
    assert sorted(a) == sorted(b)


@needs_compiled
@pytest.mark.parametrize("key", ["s4", "gl32"])
def test_backends_agree_on_localities(key):
    L = loc(key, "subcentric")
    pg = L.pg
    assert np.array_equal(_ckernels.domain_pairs(pg.succ), _pykernels.domain_pairs(pg.succ))
    assert _ckernels.triple_scan(pg.succ, pg.pair) == _pykernels.triple_scan(pg.succ, pg.pair)
    assert np.array_equal(_ckernels.conj_table(pg.succ, pg.pair, pg.inv),
                          _pykernels.conj_table(pg.succ, pg.pair, pg.inv))
    nxt, acc, _ = L.objects_dfa
    assert _ckernels.explore_product(pg.succ, nxt, acc) is None
    assert _pykernels.explore_product(pg.succ, nxt, acc) is None


def test_triple_scan_counts_group_words():
    L = loc("s4", "subcentric")  # a group: every word is in D
    count, wit = _kernels.triple_scan(L.pg.succ, L.pg.pair)
    assert wit is None and count == 24 ** 3


@needs_compiled
def test_benchmark_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    assert mod.main(["--group", "s4", "--repeat", "1"]) == 0
    assert "triple_scan" in capsys.readouterr().out
