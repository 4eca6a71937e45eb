"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--group gl32] [--delta subcentric] [--repeat 5]

Each kernel runs on the tables of one locality built from a builtin group.
The two backends must agree; the script stops if they do not.
"""

import argparse
import sys
import timeit

import numpy as np

from locality_lab._kernels import _pykernels
from locality_lab.groupio import builtin_group
from locality_lab.localities import build_locality_from_group

try:
    from locality_lab._kernels import _ckernels
except ImportError:
    _ckernels = None


def _i32(a):
    return np.ascontiguousarray(a, dtype=np.int32)


def cases(L):
    pg = L.pg
    succ, pair, inv = _i32(pg.succ), _i32(pg.pair), _i32(pg.inv)
    nxt, acc, _ = L.objects_dfa
    nxt, acc = _i32(nxt), np.asarray(acc)
    G = L.model[0]
    mul = _i32(G.mul)
    return {
        "domain_pairs": lambda k: k.domain_pairs(succ),
        "triple_scan": lambda k: k.triple_scan(succ, pair),
        "conj_table": lambda k: k.conj_table(succ, pair, inv),
        "explore_product": lambda k: k.explore_product(succ, nxt, acc),
        "closure": lambda k: k.closure(mul, [1, 2], G.identity),
    }


def _same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--group", default="gl32")
    ap.add_argument("--prime", type=int, default=2)
    ap.add_argument("--delta", default="subcentric")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels are not built; run pip install -e . first")
        return 1
    G = builtin_group(args.group)
    L = build_locality_from_group(G, args.prime, args.delta)
    print(f"{args.group} p={args.prime} delta={args.delta}: |L|={L.n}, "
          f"{L.pg.succ.shape[0]} domain states")
    print(f"{'kernel':<16} {'cython (ms)':>12} {'python (ms)':>12} {'speedup':>8}")
    for name, fn in cases(L).items():
        if not _same(fn(_ckernels), fn(_pykernels)):
            print(f"{name}: backends disagree")
            return 1
        tc = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat))
        tp = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat))
        print(f"{name:<16} {tc * 1e3:>12.3f} {tp * 1e3:>12.3f} {tp / tc:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
