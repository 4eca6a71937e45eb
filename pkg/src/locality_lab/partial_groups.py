"""Partial groups: words, the domain D, the product Pi and inversion.

Elements are ids ``0..n-1``.  The domain is stored as an automaton
(``succ[state, letter]`` is the next state or -1, every state initial):
a word is in D iff some run survives.  Every construction in this package
produces its domain this way, since in a locality D is exactly the set of
words that conjugate through a chain of objects.  The product of a pair is
tabulated in ``pair`` (-1 outside D); longer products go through
``product_fn`` when one is given, otherwise through left folding.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from locality_lab import _kernels
from locality_lab.groups import bits, popcount, to_mask


class WordNotInDomain(Exception):
    def __init__(self, word):
        super().__init__(f"word not in domain: {tuple(word)}")
        self.word = tuple(word)


class NotConjugatable(Exception):
    pass


class NotAPartialSubgroup(Exception):
    pass


class PartialGroup:
    def __init__(self, labels, inv, pair, succ, identity, product_fn=None,
                 name=None, state_labels=None):
        self.labels = list(labels)
        self.n = len(self.labels)
        self.inv = np.ascontiguousarray(inv, dtype=np.int32)
        self.pair = np.ascontiguousarray(pair, dtype=np.int32)
        self.succ = np.ascontiguousarray(succ, dtype=np.int32)
        if self.succ.ndim != 2 or self.succ.shape[1] != self.n:
            raise ValueError("domain automaton has the wrong shape")
        self.identity = int(identity)
        self.product_fn = product_fn
        self.name = name
        self.state_labels = state_labels
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self._rows = self.succ.T.tolist()  # letter -> list of next states

    def __repr__(self):
        return f"<PartialGroup {self.name or ''} |L|={self.n} states={self.succ.shape[0]}>"

    def __len__(self):
        return self.n

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    # -- domain -------------------------------------------------------------

    def run(self, word, start: int | None = None) -> int:
        """Bitmask of automaton states alive after reading ``word``."""
        sub = (1 << self.succ.shape[0]) - 1 if start is None else start
        for g in word:
            row = self._rows[g]
            nxt = 0
            s = 0
            while sub:
                if sub & 1:
                    t = row[s]
                    if t >= 0:
                        nxt |= 1 << t
                sub >>= 1
                s += 1
            sub = nxt
            if not sub:
                return 0
        return sub

    def in_domain(self, word) -> bool:
        return not word or self.run(word) != 0

    @cached_property
    def domain2(self) -> np.ndarray:
        return _kernels.domain_pairs(self.succ)

    def children(self, sub: int):
        """Pairs (letter, next state set) with a surviving run from ``sub``."""
        cache = self.__dict__.setdefault("_children", {})
        out = cache.get(sub)
        if out is None:
            out = []
            for g in range(self.n):
                s2 = self.run((g,), sub)
                if s2:
                    out.append((g, s2))
            cache[sub] = out
        return out

    def words(self, length: int):
        """All words of the given length in D, in lexicographic order."""
        if length == 0:
            yield ()
            return
        full = (1 << self.succ.shape[0]) - 1
        stack = [((), full)]
        while stack:
            w, sub = stack.pop()
            if len(w) == length:
                yield w
                continue
            nxt = [(w + (g,), s2) for g, s2 in self.children(sub)]
            stack.extend(reversed(nxt))

    def count_words(self, length: int) -> int:
        """|D ∩ W_length|, by dynamic programming over automaton state sets."""
        full = (1 << self.succ.shape[0]) - 1
        layer = {full: 1}
        for _ in range(length):
            nxt = {}
            for sub, c in layer.items():
                for _, s2 in self.children(sub):
                    nxt[s2] = nxt.get(s2, 0) + c
            layer = nxt
        return sum(layer.values())

    def random_word(self, length: int, rng: random.Random):
        """A random word of D of the given length, or None if there is none."""
        full = (1 << self.succ.shape[0]) - 1
        for _ in range(50):
            sub, w = full, []
            for _ in range(length):
                options = self.children(sub)
                if not options:
                    break
                g, sub = rng.choice(options)
                w.append(g)
            else:
                return tuple(w)
        return None

    # -- product ------------------------------------------------------------

    def fold(self, word) -> int:
        if not word:
            return self.identity
        x = word[0]
        for g in word[1:]:
            x = int(self.pair[x, g])
            if x < 0:
                raise WordNotInDomain(word)
        return x

    def product(self, word) -> int:
        word = tuple(int(g) for g in word)
        if not self.in_domain(word):
            raise WordNotInDomain(word)
        if len(word) == 0:
            return self.identity
        if len(word) == 1:
            return word[0]
        if len(word) == 2:
            return int(self.pair[word[0], word[1]])
        if self.product_fn is not None:
            return self.product_fn(word)
        return self.fold(word)

    def inverse(self, f: int) -> int:
        return int(self.inv[f])

    def inverse_word(self, word):
        return tuple(int(self.inv[g]) for g in reversed(word))

    @cached_property
    def conj(self) -> np.ndarray:
        """``conj[g, x] = x^g = Pi(g^-1, x, g)`` where defined, else -1."""
        return _kernels.conj_table(self.succ, self.pair, self.inv)


# ---------------------------------------------------------------------------
# axiom suite


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: object = None
    detail: str = ""

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        extra = f" witness={self.witness}" if self.witness is not None else ""
        info = f" ({self.detail})" if self.detail else ""
        return f"{self.name}: {status}{info}{extra}"


@dataclass
class Report:
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def add(self, name, passed, witness=None, detail=""):
        self.results.append(CheckResult(name, bool(passed), witness, detail))

    def failures(self):
        return [r for r in self.results if not r.passed]

    def __getitem__(self, name):
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def text(self) -> str:
        return "\n".join(r.line() for r in self.results)


def _word_batch(L: PartialGroup, length: int, budget: int, seed: int):
    """Either all words of D of this length or a seeded sample of them."""
    total = L.count_words(length)
    if total <= budget:
        return list(L.words(length)), f"exhaustive {total}"
    rng = random.Random(seed + length)
    out = []
    for _ in range(budget):
        w = L.random_word(length, rng)
        if w is not None:
            out.append(w)
    return out, f"sampled {len(out)} of {total}"


def check_partial_group_axioms(L: PartialGroup, max_length: int = 3,
                               budget: int = 20000, seed: int = 0) -> Report:
    """Check the partial group axioms on words up to ``max_length``.

    Length-3 contraction is always checked exhaustively on the product
    tables.  Word-level checks are exhaustive while D has at most ``budget``
    words of a given length, and seeded samples beyond that.
    """
    rep = Report()
    n = L.n
    id_ = L.identity

    # length one and the empty word
    bad = next((f for f in range(n) if not L.in_domain((f,))), None)
    rep.add("letters-in-domain", bad is None, bad)
    rep.add("empty-product-is-identity", L.product(()) == id_)
    bad = next((f for f in range(n) if L.product((f,)) != f), None)
    rep.add("letter-product", bad is None, bad)

    # inversion is an involution
    bad = next((f for f in range(n) if L.inv[L.inv[f]] != f), None)
    rep.add("inversion-involution", bad is None, bad)

    # pair table agrees with the domain automaton
    d2 = L.domain2
    mism = np.argwhere(d2 != (L.pair >= 0))
    rep.add("pair-table-matches-domain", len(mism) == 0,
            tuple(int(x) for x in mism[0]) if len(mism) else None)

    # exhaustive length-3 contraction on tables
    count, wit = _kernels.triple_scan(L.succ, L.pair)
    rep.add("contraction-length-3", wit is None,
            None if wit is None else wit, f"{count} words")

    sub_w = con_w = inv_w = None
    details = []
    for length in range(1, max_length + 1):
        batch, how = _word_batch(L, length, budget, seed)
        details.append(f"len{length}: {how}")
        for w in batch:
            pw = L.product(w)
            if sub_w is None:
                for i in range(1, length):
                    if not (L.in_domain(w[:i]) and L.in_domain(w[i:])):
                        sub_w = w
                        break
            if con_w is None and length >= 2:
                for i in range(length):
                    for j in range(i + 1, length + 1):
                        if j - i == length:
                            continue
                        v = w[i:j]
                        w2 = w[:i] + (L.product(v),) + w[j:]
                        if not L.in_domain(w2) or L.product(w2) != pw:
                            con_w = (w, i, j)
                            break
                    if con_w is not None:
                        break
            if inv_w is None:
                wi = L.inverse_word(w) + w
                if not L.in_domain(wi) or L.product(wi) != id_:
                    inv_w = w
    d = "; ".join(details)
    rep.add("subwords-in-domain", sub_w is None, sub_w, d)
    rep.add("contraction", con_w is None, con_w, d)
    rep.add("inverse-cancellation", inv_w is None, inv_w, d)
    return rep


# ---------------------------------------------------------------------------
# conjugation and partial subgroups


def product(L: PartialGroup, w) -> int:
    return L.product(w)


def d_of(L: PartialGroup, g: int) -> set:
    """D(g): the x with (g^-1, x, g) in D."""
    return {int(x) for x in np.nonzero(L.conj[g] >= 0)[0]}


def conjugate(L: PartialGroup, x: int, g: int) -> int:
    y = int(L.conj[g, x])
    if y < 0:
        raise NotConjugatable(f"{x} is not in D({g})")
    return y


def s_sub_g(L: PartialGroup, S_mask: int, g: int) -> int:
    """S_g = {s in S ∩ D(g) : s^g in S}, as a mask of element ids."""
    row = L.conj[g]
    return to_mask(s for s in bits(S_mask) if row[s] >= 0 and (S_mask >> int(row[s])) & 1)


@dataclass(frozen=True)
class PartialSubgroup:
    parent: PartialGroup
    mask: int

    @property
    def elements(self):
        return bits(self.mask)

    def __len__(self):
        return popcount(self.mask)

    def __contains__(self, f):
        return bool((self.mask >> f) & 1)

    def __le__(self, other):
        return self.mask & ~other.mask == 0

    def __hash__(self):
        return hash(self.mask)

    def __eq__(self, other):
        return isinstance(other, PartialSubgroup) and other.mask == self.mask \
            and other.parent is self.parent


def is_partial_subgroup(L: PartialGroup, mask: int) -> bool:
    """Contains 1, closed under inversion and under products of pairs in D.

    Closure under pairs gives closure under all words of D, by contraction.
    """
    if not (mask >> L.identity) & 1:
        return False
    ids = np.array(bits(mask), dtype=np.int64)
    member = np.zeros(L.n, dtype=bool)
    member[ids] = True
    if not member[L.inv[ids]].all():
        return False
    sub = L.pair[np.ix_(ids, ids)]
    vals = sub[sub >= 0]
    return bool(member[vals].all())


def _mask_array(L, mask):
    member = np.zeros(L.n, dtype=bool)
    member[bits(mask)] = True
    return member


def is_partial_normal(L: PartialGroup, N) -> bool:
    mask = N.mask if isinstance(N, PartialSubgroup) else N
    if not is_partial_subgroup(L, mask):
        raise NotAPartialSubgroup("not a partial subgroup")
    member = _mask_array(L, mask)
    cols = L.conj[:, member]
    vals = cols[cols >= 0]
    return bool(member[vals].all())


def partial_subgroup_closure(L: PartialGroup, seed) -> PartialSubgroup:
    member = np.zeros(L.n, dtype=bool)
    member[L.identity] = True
    member[list(seed)] = True
    while True:
        before = int(member.sum())
        member[L.inv[member]] = True
        ids = np.nonzero(member)[0]
        sub = L.pair[np.ix_(ids, ids)]
        member[sub[sub >= 0]] = True
        if int(member.sum()) == before:
            break
    return PartialSubgroup(L, to_mask(np.nonzero(member)[0].tolist()))


def conjugation_closure(L: PartialGroup, mask: int) -> int:
    member = _mask_array(L, mask)
    while True:
        before = int(member.sum())
        cols = L.conj[:, member]
        member[cols[cols >= 0]] = True
        if int(member.sum()) == before:
            return to_mask(np.nonzero(member)[0].tolist())


def partial_normal_closure(L: PartialGroup, seed) -> PartialSubgroup:
    """Smallest partial normal subgroup containing ``seed``."""
    mask = to_mask(seed) if not isinstance(seed, int) else seed
    while True:
        m2 = partial_subgroup_closure(L, bits(conjugation_closure(L, mask))).mask
        if m2 == mask:
            return PartialSubgroup(L, mask)
        mask = m2


def conjugacy_classes(L: PartialGroup) -> list[int]:
    """Classes of the equivalence relation generated by x ~ x^g."""
    seen = 0
    out = []
    for x in range(L.n):
        if (seen >> x) & 1:
            continue
        cls = conjugation_closure(L, 1 << x)
        seen |= cls
        out.append(cls)
    return out


def is_homomorphism(src: PartialGroup, dst: PartialGroup, phi, max_length: int = 3,
                    budget: int = 20000, seed: int = 0):
    """Return None if ``phi`` maps D into D and respects products, else a witness word.

    ``phi`` is a sequence with ``phi[f]`` the image of ``f``.
    """
    phi = [int(x) for x in phi]
    if phi[src.identity] != dst.identity:
        return ("identity",)
    for f in range(src.n):
        if phi[int(src.inv[f])] != int(dst.inv[phi[f]]):
            return ("inverse", f)
    d2 = src.domain2
    a, b = np.nonzero(d2)
    pa = np.array(phi)[a]
    pb = np.array(phi)[b]
    ok = dst.pair[pa, pb] == np.array(phi)[src.pair[a, b]]
    if not ok.all():
        i = int(np.nonzero(~ok)[0][0])
        return (int(a[i]), int(b[i]))
    for length in range(3, max_length + 1):
        batch, _ = _word_batch(src, length, budget, seed)
        for w in batch:
            img = tuple(phi[g] for g in w)
            if not dst.in_domain(img) or dst.product(img) != phi[src.product(w)]:
                return w
    return None


def domain_equivalence_witness(A: PartialGroup, B: PartialGroup, phi, letters=None):
    """Compare the domains of A and B under the letter map ``phi`` on all word lengths.

    Explores the product of the two domain automata breadth-first.  Returns
    None when w ∈ D_A ⟺ phi(w) ∈ D_B for every word over ``letters``
    (default: all of A), else a shortest word where they differ.
    """
    from collections import deque

    letters = list(range(A.n)) if letters is None else list(letters)
    fa = (1 << A.succ.shape[0]) - 1
    fb = (1 << B.succ.shape[0]) - 1
    start = (fa, fb)
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        sa, sb = node
        for a in letters:
            na = A.run((a,), sa)
            nb = B.run((int(phi[a]),), sb)
            child = (na, nb)
            if bool(na) != bool(nb):
                word = [a]
                cur = node
                while parent[cur] is not None:
                    cur, g = parent[cur]
                    word.append(g)
                return tuple(word[::-1])
            if na and child not in parent:
                parent[child] = (node, a)
                queue.append(child)
    return None
