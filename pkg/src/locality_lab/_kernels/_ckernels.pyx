# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the loops in ``_pykernels``.

Automaton state sets are packed into 64-bit masks, so these kernels need
at most 64 states; the dispatcher falls back to numpy beyond that.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int32_t, uint64_t
from collections import deque

cnp.import_array()


def closure(int32_t[:, ::1] mul, seeds, int identity):
    cdef Py_ssize_t n = mul.shape[0]
    cdef Py_ssize_t i, j, ng = 0, size = 1
    cdef int x, y, g
    cdef cnp.ndarray[cnp.uint8_t] inset = np.zeros(n, dtype=np.uint8)
    cdef cnp.ndarray[int32_t] elems = np.empty(n, dtype=np.int32)
    cdef cnp.ndarray[int32_t] gens = np.empty(n, dtype=np.int32)
    inset[identity] = 1
    elems[0] = identity
    for s in seeds:
        g = s
        if inset[g]:
            continue
        gens[ng] = g
        ng += 1
        i = 0
        while i < size:
            x = elems[i]
            for j in range(ng):
                y = mul[x, gens[j]]
                if not inset[y]:
                    inset[y] = 1
                    elems[size] = y
                    size += 1
            i += 1
    return sorted(elems[:size].tolist())


cdef inline uint64_t _step(int32_t[:, ::1] succ, uint64_t sub, int letter) nogil:
    cdef uint64_t out = 0
    cdef int s = 0, t
    while sub:
        if sub & 1:
            t = succ[s, letter]
            if t >= 0:
                out |= (<uint64_t>1) << t
        sub >>= 1
        s += 1
    return out


def domain_pairs(int32_t[:, ::1] succ):
    cdef Py_ssize_t k = succ.shape[0], n = succ.shape[1], a, b
    cdef uint64_t full = ((<uint64_t>1) << k) - 1 if k < 64 else <uint64_t>0xFFFFFFFFFFFFFFFF
    cdef uint64_t ra
    out = np.zeros((n, n), dtype=bool)
    cdef cnp.uint8_t[:, ::1] o = out.view(np.uint8)
    for a in range(n):
        ra = _step(succ, full, a)
        for b in range(n):
            o[a, b] = _step(succ, ra, b) != 0
    return out


def triple_scan(int32_t[:, ::1] succ, int32_t[:, ::1] pair):
    cdef Py_ssize_t k = succ.shape[0], n = succ.shape[1]
    cdef Py_ssize_t a, b, c
    cdef uint64_t full = ((<uint64_t>1) << k) - 1 if k < 64 else <uint64_t>0xFFFFFFFFFFFFFFFF
    cdef uint64_t ra, rab
    cdef long count = 0
    cdef int ab, bc, l, r
    cdef cnp.ndarray[uint64_t] has = np.zeros(n, dtype=np.uint64)
    cdef int s
    for c in range(n):
        for s in range(k):
            if succ[s, c] >= 0:
                has[c] |= (<uint64_t>1) << s
    for a in range(n):
        ra = _step(succ, full, a)
        for b in range(n):
            rab = _step(succ, ra, b)
            if not rab:
                continue
            for c in range(n):
                if not (rab & has[c]):
                    continue
                count += 1
                ab = pair[a, b]
                bc = pair[b, c]
                if ab < 0:
                    return count, (a, b, c, "prefix not in domain")
                if bc < 0:
                    return count, (a, b, c, "suffix not in domain")
                l = pair[ab, c]
                r = pair[a, bc]
                if l < 0 or r < 0:
                    return count, (a, b, c, "contraction not in domain")
                if l != r:
                    return count, (a, b, c, "contraction changes product")
    return count, None


def conj_table(int32_t[:, ::1] succ, int32_t[:, ::1] pair, int32_t[::1] inv):
    cdef Py_ssize_t k = succ.shape[0], n = succ.shape[1], f, x
    cdef uint64_t full = ((<uint64_t>1) << k) - 1 if k < 64 else <uint64_t>0xFFFFFFFFFFFFFFFF
    cdef uint64_t r1, r2
    cdef int fi
    out = np.full((n, n), -1, dtype=np.int32)
    cdef int32_t[:, ::1] o = out
    for f in range(n):
        fi = inv[f]
        r1 = _step(succ, full, fi)
        for x in range(n):
            r2 = _step(succ, r1, x)
            if _step(succ, r2, f) and pair[fi, x] >= 0:
                o[f, x] = pair[pair[fi, x], f]
    return out


def explore_product(int32_t[:, ::1] succ, int32_t[:, ::1] dfa_next, dfa_accept):
    cdef Py_ssize_t k = succ.shape[0], n = succ.shape[1]
    cdef uint64_t full = ((<uint64_t>1) << k) - 1 if k < 64 else <uint64_t>0xFFFFFFFFFFFFFFFF
    cdef uint64_t sub, nsub
    cdef int d, letter
    acc = [bool(x) for x in dfa_accept]
    start = (full, 0)
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        sub = node[0]
        d = node[1]
        if (sub != 0) != acc[d]:
            word = []
            while parent[node] is not None:
                node, letter = parent[node]
                word.append(letter)
            return word[::-1]
        for letter in range(n):
            nsub = _step(succ, sub, letter)
            child = (nsub, dfa_next[d, letter])
            if child not in parent:
                parent[child] = (node, letter)
                queue.append(child)
    return None
