"""Reference implementations of the hot loops, in numpy.

Domains of partial groups are given as automata: ``succ[state, letter]`` is
the next state or -1, and every state is initial.  A word lies in the
domain iff some run survives to the end.
"""

from collections import deque

import numpy as np


def closure(mul, seeds, identity):
    """Ids of the subgroup generated by ``seeds`` (sorted)."""
    n = mul.shape[0]
    inset = bytearray(n)
    inset[identity] = 1
    elems = [identity]
    gens = []
    for g in seeds:
        g = int(g)
        if inset[g]:
            continue
        gens.append(g)
        i = 0
        while i < len(elems):
            x = elems[i]
            row = mul[x]
            for h in gens:
                y = int(row[h])
                if not inset[y]:
                    inset[y] = 1
                    elems.append(y)
            i += 1
    return sorted(elems)


def _reach1(succ):
    k, n = succ.shape
    r = np.zeros((n, k), dtype=bool)
    for s in range(k):
        t = succ[s]
        ok = t >= 0
        r[np.nonzero(ok)[0], t[ok]] = True
    return r


def _reach2_row(succ, r1a):
    """States reachable after ``(a, b)`` for every b, given the states after a."""
    k, n = succ.shape
    out = np.zeros((n, k), dtype=bool)
    for s in np.nonzero(r1a)[0]:
        t = succ[s]
        ok = t >= 0
        out[np.nonzero(ok)[0], t[ok]] = True
    return out


def domain_pairs(succ):
    k, n = succ.shape
    r1 = _reach1(succ)
    d2 = np.zeros((n, n), dtype=bool)
    for a in range(n):
        d2[a] = _reach2_row(succ, r1[a]).any(axis=1)
    return d2


def triple_scan(succ, pair):
    """Exhaustive check of the length-3 partial group axioms on tables.

    For every (a, b, c) in the domain: (a, b) and (b, c) lie in the domain,
    (ab, c) and (a, bc) lie in the domain, and (ab)c = a(bc).
    Returns ``(count, witness)`` where witness is ``None`` or
    ``(a, b, c, reason)``.
    """
    k, n = succ.shape
    has = (succ >= 0).T.astype(np.int32)  # (n, k)
    r1 = _reach1(succ)
    d2 = pair >= 0
    count = 0
    for a in range(n):
        r2 = _reach2_row(succ, r1[a])  # (n, k)
        d3 = (r2.astype(np.int32) @ has.T) > 0  # (b, c)
        bs, cs = np.nonzero(d3)
        count += len(bs)
        if not len(bs):
            continue
        if not d2[a, bs].all():
            i = int(np.argmin(d2[a, bs]))
            return count, (a, int(bs[i]), int(cs[i]), "prefix not in domain")
        if not d2[bs, cs].all():
            i = int(np.argmin(d2[bs, cs]))
            return count, (a, int(bs[i]), int(cs[i]), "suffix not in domain")
        ab = pair[a, bs]
        bc = pair[bs, cs]
        left_ok = d2[ab, cs]
        right_ok = d2[a, bc]
        bad = ~(left_ok & right_ok)
        if bad.any():
            i = int(np.nonzero(bad)[0][0])
            return count, (a, int(bs[i]), int(cs[i]), "contraction not in domain")
        neq = pair[ab, cs] != pair[a, bc]
        if neq.any():
            i = int(np.nonzero(neq)[0][0])
            return count, (a, int(bs[i]), int(cs[i]), "contraction changes product")
    return count, None


def conj_table(succ, pair, inv):
    """``out[f, x] = Pi(f^-1, x, f)`` where defined, else -1."""
    k, n = succ.shape
    r1 = _reach1(succ)
    has = succ >= 0
    out = np.full((n, n), -1, dtype=np.int32)
    for f in range(n):
        fi = int(inv[f])
        r2 = _reach2_row(succ, r1[fi])  # states after (f^-1, x)
        ok = (r2 & has[:, f][None, :]).any(axis=1)
        xs = np.nonzero(ok)[0]
        if len(xs):
            mid = pair[fi, xs]
            out[f, xs] = np.where(mid >= 0, pair[np.maximum(mid, 0), f], -1)
    return out


def explore_product(succ, dfa_next, dfa_accept):
    """Breadth-first search of the product of the domain automaton and a DFA.

    The automaton accepts a word iff some run survives; the DFA starts in
    state 0.  Returns ``None`` when acceptance agrees on every reachable
    state, else a shortest word on which they disagree.
    """
    k, n = succ.shape
    start = (np.ones(k, dtype=bool).tobytes(), 0)
    parent = {start: None}
    subsets = {start[0]: np.ones(k, dtype=bool)}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        sub_key, d = node
        sub = subsets[sub_key]
        if bool(sub.any()) != bool(dfa_accept[d]):
            return _path(parent, node)
        nxt = np.zeros((n, k), dtype=bool)
        for s in np.nonzero(sub)[0]:
            t = succ[s]
            ok = t >= 0
            nxt[np.nonzero(ok)[0], t[ok]] = True
        dn = dfa_next[d]
        for letter in range(n):
            key = nxt[letter].tobytes()
            child = (key, int(dn[letter]))
            if child not in parent:
                parent[child] = (node, letter)
                subsets.setdefault(key, nxt[letter].copy())
                queue.append(child)
    return None


def _path(parent, node):
    word = []
    while parent[node] is not None:
        node, letter = parent[node]
        word.append(letter)
    return word[::-1]
