"""Localities (L, Δ, S).

A ``Locality`` wraps a ``PartialGroup`` with a Sylow subgroup S, given by
the element ids of L lying in S, and an object set Δ of subgroups of S.
Subgroups of S are bitmasks over S-local ids; the i-th element of S is
``S_ids[i]`` in L.  For localities built from a group M the S-local order
is the order of the ambient ids, so systems and object sets of different
localities over the same S compare directly.
"""

from __future__ import annotations

from collections import deque
from functools import cached_property

import numpy as np

from locality_lab import _kernels
from locality_lab.fusion import (
    FusionSystem,
    fusion_system_of_group,
    generate_fusion_system,
    is_F_closed,
    subgroup_classes,
)
from locality_lab.groups import FiniteGroup, bits, is_p_power, p_part, popcount, to_mask
from locality_lab.partial_groups import (
    PartialGroup,
    PartialSubgroup,
    Report,
    check_partial_group_axioms,
    is_partial_normal,
)


class LocalityError(Exception):
    pass


class GammaNotClosed(LocalityError):
    pass


class ObjectNotInDelta(LocalityError):
    pass


class NotASubObjectSet(LocalityError):
    pass


class DecompositionNotFound(LocalityError):
    pass


# ---------------------------------------------------------------------------
# object sets


class ObjectSet:
    """A set of subgroups of S (bitmasks over S-local ids)."""

    def __init__(self, S: FiniteGroup, members):
        self.S = S
        self.members = frozenset(members)

    @classmethod
    def closure(cls, S: FiniteGroup, F: FusionSystem, generators) -> "ObjectSet":
        """All overgroups in S of F-conjugates of the generators."""
        conj = set()
        for P in generators:
            conj |= F.conjugates(P)
        subs = S.subgroups()
        return cls(S, {Q for Q in subs if any(P & ~Q == 0 for P in conj)})

    def __contains__(self, P) -> bool:
        return P in self.members

    def __iter__(self):
        return iter(self.sorted())

    def __len__(self):
        return len(self.members)

    def __eq__(self, other):
        return isinstance(other, ObjectSet) and self.members == other.members

    def __hash__(self):
        return hash(self.members)

    def __le__(self, other):
        return self.members <= other.members

    def sorted(self) -> list[int]:
        return sorted(self.members, key=self.S.sort_key)

    @property
    def minimal_members(self) -> list[int]:
        return [P for P in self.sorted()
                if not any(Q != P and Q & ~P == 0 for Q in self.members)]

    def without(self, cls) -> "ObjectSet":
        return ObjectSet(self.S, self.members - set(cls))

    def union(self, other) -> "ObjectSet":
        return ObjectSet(self.S, self.members | set(other))


def delta_from_selector(S: FiniteGroup, F: FusionSystem, selector) -> ObjectSet:
    """Resolve a selector (cr-closure, centric, quasicentric, subcentric, or masks)."""
    if isinstance(selector, ObjectSet):
        return selector
    if isinstance(selector, str):
        cl = subgroup_classes(F)
        if selector == "cr-closure":
            return ObjectSet.closure(S, F, cl["centric_radical"])
        key = {"centric": "centric", "quasicentric": "quasicentric",
               "subcentric": "subcentric"}.get(selector)
        if key is None:
            raise ValueError(f"unknown delta selector {selector!r}")
        return ObjectSet(S, cl[key])
    return ObjectSet.closure(S, F, list(selector))


# ---------------------------------------------------------------------------
# the locality


class Locality:
    def __init__(self, pg: PartialGroup, S_ids, delta: ObjectSet, p: int,
                 name: str | None = None, model=None, parent_ids=None):
        self.pg = pg
        self.S_ids = [int(x) for x in S_ids]
        self.S_mask = to_mask(self.S_ids)
        self.delta = delta
        self.Sg = delta.S
        self.p = p
        self.name = name
        self.model = model  # (M, ambient ids) for localities built from a group
        self.parent_ids = parent_ids
        if self.Sg.n != len(self.S_ids):
            raise LocalityError("object set is over a group of the wrong order")
        self.s_of = np.full(pg.n, -1, dtype=np.int64)
        self.s_of[self.S_ids] = np.arange(len(self.S_ids))

    def __repr__(self):
        return (f"<Locality {self.name or ''} |L|={self.pg.n} |S|={len(self.S_ids)} "
                f"|Δ|={len(self.delta)}>")

    @property
    def n(self) -> int:
        return self.pg.n

    # -- conjugation on S ---------------------------------------------------

    @cached_property
    def sconj(self) -> np.ndarray:
        """``sconj[f, s]`` is the S-local id of s^f when s ∈ S_f, else -1."""
        c = self.pg.conj[:, self.S_ids]  # L ids or -1
        out = np.where(c >= 0, self.s_of[np.maximum(c, 0)], -1)
        return out.astype(np.int32)

    def S_f(self, f: int) -> int:
        return to_mask(np.nonzero(self.sconj[f] >= 0)[0].tolist())

    def conj_map(self, f: int):
        return tuple(int(x) for x in self.sconj[f])

    def conj_subgroup(self, P: int, f: int) -> int:
        row = self.sconj[f]
        out = 0
        for s in bits(P):
            y = int(row[s])
            if y < 0:
                raise LocalityError("subgroup not contained in S_f")
            out |= 1 << y
        return out

    def S_w(self, word) -> int:
        m = len(self.S_ids)
        img = np.arange(m)
        ext = np.concatenate([self.sconj, np.full((self.n, 1), -1, dtype=np.int32)], axis=1)
        for g in word:
            img = ext[g][img]  # index -1 hits the sentinel column
        return to_mask(np.nonzero(img >= 0)[0].tolist())

    def S_subgroup_L(self, P: int) -> int:
        """A subgroup of S as a mask of L ids."""
        return to_mask(self.S_ids[i] for i in bits(P))

    def L_to_S(self, mask: int) -> int:
        return to_mask(int(self.s_of[f]) for f in bits(mask) if self.s_of[f] >= 0)

    # -- the via-objects domain ---------------------------------------------

    @cached_property
    def objects_dfa(self):
        """Deterministic automaton for D_Δ: states are the maps c_w : S_w -> S.

        Returns (next-state table, accepting flags, state maps).
        """
        m = len(self.S_ids)
        ext = np.concatenate([self.sconj, np.full((self.n, 1), -1, dtype=np.int32)], axis=1)
        start = np.arange(m, dtype=np.int32)
        states = [start]
        index = {start.tobytes(): 0}
        rows = []
        i = 0
        while i < len(states):
            cur = states[i]
            nxt = ext[:, cur]  # (n, m): composite maps for every letter
            row = np.empty(self.n, dtype=np.int32)
            for f in range(self.n):
                key = nxt[f].tobytes()
                j = index.get(key)
                if j is None:
                    j = len(states)
                    index[key] = j
                    states.append(nxt[f].copy())
                row[f] = j
            rows.append(row)
            i += 1
        accept = np.array(
            [to_mask(np.nonzero(s >= 0)[0].tolist()) in self.delta for s in states], dtype=bool
        )
        return np.array(rows, dtype=np.int32), accept, states

    def in_D_delta(self, word) -> bool:
        return self.S_w(word) in self.delta

    # -- subgroups of L -----------------------------------------------------

    def normalizer_mask(self, P: int) -> int:
        """N_L(P) = {f : P ≤ S_f, P^f = P} as a mask of L ids."""
        ps = bits(P)
        sc = self.sconj[:, ps]
        ok = (sc >= 0).all(axis=1)
        out = 0
        for f in np.nonzero(ok)[0]:
            if to_mask(int(x) for x in sc[f]) == P:
                out |= 1 << int(f)
        return out

    def group_on(self, mask: int, name=None) -> FiniteGroup:
        """A subset of L that is a subgroup, as a FiniteGroup labelled by L ids.

        Raises LocalityError unless every word of length three over the
        subset is in D and the restricted products form a group.
        """
        ids = bits(mask)
        pg = self.pg
        sub = pg.pair[np.ix_(ids, ids)]
        if (sub < 0).any():
            raise LocalityError("a pair of the subset is outside D")
        pos = np.full(pg.n, -1, dtype=np.int64)
        pos[ids] = np.arange(len(ids))
        table = pos[sub]
        if (table < 0).any():
            raise LocalityError("subset not closed under products")
        for a in ids:
            start = pg.run((a,))
            for b in ids:
                s2 = pg.run((b,), start)
                if any(not pg.run((c,), s2) for c in ids):
                    raise LocalityError("a word of length three is outside D")
        t = table
        # associativity of the restricted table
        left = t[t[:, :, None], np.arange(len(ids))[None, None, :]]
        right = t[np.arange(len(ids))[:, None, None], t[None, :, :]]
        if not np.array_equal(left, right):
            raise LocalityError("restricted product is not associative")
        return FiniteGroup(ids, table, name=name)

    def normalizer_subgroup(self, P: int) -> FiniteGroup:
        if P not in self.delta:
            raise ObjectNotInDelta(bits(P))
        return self.group_on(self.normalizer_mask(P))

    def centralizer_partial(self, R: int) -> PartialSubgroup:
        rs = bits(R)
        sc = self.sconj[:, rs]
        ok = (sc == np.array(rs, dtype=np.int32)[None, :]).all(axis=1)
        return PartialSubgroup(self.pg, to_mask(np.nonzero(ok)[0].tolist()))

    # -- fusion -------------------------------------------------------------

    @cached_property
    def fusion(self) -> FusionSystem:
        seeds = {self.conj_map(f) for f in range(self.n)}
        return generate_fusion_system(self.Sg, seeds)

    def fusion_of_partial_subgroup(self, H) -> FusionSystem:
        """F_{H∩S}(H): generated by c_h : S_h ∩ H -> H ∩ S for h ∈ H."""
        mask = H.mask if isinstance(H, PartialSubgroup) else H
        T = self.L_to_S(mask)
        seeds = set()
        for h in bits(mask):
            row = self.sconj[h]
            seeds.add(tuple(int(row[s]) if (T >> s) & 1 and row[s] >= 0 and (T >> int(row[s])) & 1
                            else -1 for s in range(len(self.S_ids))))
        return generate_fusion_system(self.Sg, seeds, T)

    @cached_property
    def classes(self) -> dict:
        return subgroup_classes(self.fusion)

    def labels_of(self, mask: int):
        return [self.pg.labels[f] for f in bits(mask)]


def fusion_system_of(L: Locality) -> FusionSystem:
    return L.fusion


def fusion_of_partial_subgroup(L: Locality, H) -> FusionSystem:
    return L.fusion_of_partial_subgroup(H)


def normalizer_subgroup(L: Locality, P: int) -> FiniteGroup:
    return L.normalizer_subgroup(P)


def centralizer_partial(L: Locality, R: int) -> PartialSubgroup:
    return L.centralizer_partial(R)


# ---------------------------------------------------------------------------
# construction from a group


def _amb_to_local_S(S_amb: list[int]):
    return {g: i for i, g in enumerate(S_amb)}


def build_locality_from_group(M: FiniteGroup, p: int, gamma, S_mask: int | None = None,
                              F: FusionSystem | None = None, check_closed: bool = True,
                              name: str | None = None) -> Locality:
    """L_Γ(M) = {g ∈ M : S ∩ S^g ∈ Γ} with D the words threading through Γ."""
    S_mask = M.sylow(p) if S_mask is None else S_mask
    S_amb = bits(S_mask)
    if F is None:
        Sg, F = fusion_system_of_group(M, S_mask)
    else:
        Sg = F.S
    if not isinstance(gamma, ObjectSet):
        gamma = delta_from_selector(Sg, F, gamma)
    if not gamma.members:
        raise GammaNotClosed("empty object set")
    if check_closed and not is_F_closed(F, gamma.members):
        raise GammaNotClosed("object set is not closed under F-conjugation and overgroups")
    pos = _amb_to_local_S(S_amb)

    def local(mask_amb):
        return to_mask(pos[g] for g in bits(mask_amb))

    elems = [g for g in range(M.n)
             if local(S_mask & M.conjugate_mask(S_mask, g)) in gamma]
    lid = np.full(M.n, -1, dtype=np.int64)
    lid[elems] = np.arange(len(elems))
    n = len(elems)
    objs = gamma.sorted()
    oidx = {P: i for i, P in enumerate(objs)}
    amb_objs = [to_mask(S_amb[i] for i in bits(P)) for P in objs]
    succ = np.full((len(objs), n), -1, dtype=np.int32)
    for k, g in enumerate(elems):
        for i, Pa in enumerate(amb_objs):
            img = M.conjugate_mask(Pa, g)
            if img & ~S_mask == 0:
                j = oidx.get(local(img))
                if j is not None:
                    succ[i, k] = j
    el = np.array(elems, dtype=np.int64)
    inv = lid[M.inv[el]]
    prod = lid[M.mul[np.ix_(el, el)]]
    pg0 = PartialGroup(elems, inv, np.zeros((n, n), dtype=np.int32), succ,
                       int(lid[M.identity]))
    d2 = pg0.domain2
    if (prod[d2] < 0).any():
        raise LocalityError("a product in D leaves L")
    pair = np.where(d2, prod, -1)

    def product_fn(word):
        x = M.identity
        for f in word:
            x = int(M.mul[x, elems[f]])
        return int(lid[x])

    pg = PartialGroup(elems, inv, pair, succ, int(lid[M.identity]), product_fn,
                      name=name or getattr(M, "name", None), state_labels=objs)
    S_ids = [int(lid[g]) for g in S_amb]
    return Locality(pg, S_ids, gamma, p, name=pg.name, model=(M, elems))


def locality_from_group(M: FiniteGroup, p: int, selector="subcentric") -> Locality:
    return build_locality_from_group(M, p, selector)


# ---------------------------------------------------------------------------
# restriction


def restrict(L: Locality, delta2) -> Locality:
    """L|_Δ' = {f : S_f ∈ Δ'} with domain D_Δ'."""
    if not isinstance(delta2, ObjectSet):
        delta2 = ObjectSet(L.Sg, delta2)
    if not delta2.members or not delta2 <= L.delta:
        raise NotASubObjectSet("not a nonempty subset of Δ")
    if not is_F_closed(L.fusion, delta2.members):
        raise NotASubObjectSet("not F-closed")
    keep = [f for f in range(L.n) if L.S_f(f) in delta2]
    kid = np.full(L.n, -1, dtype=np.int64)
    kid[keep] = np.arange(len(keep))
    objs = delta2.sorted()
    oidx = {P: i for i, P in enumerate(objs)}
    n = len(keep)
    succ = np.full((len(objs), n), -1, dtype=np.int32)
    for k, f in enumerate(keep):
        row = L.sconj[f]
        for i, P in enumerate(objs):
            ps = bits(P)
            if all(row[s] >= 0 for s in ps):
                succ[i, k] = oidx[to_mask(int(row[s]) for s in ps)]
    kp = np.array(keep, dtype=np.int64)
    inv = kid[L.pg.inv[kp]]
    pg0 = PartialGroup(keep, inv, np.zeros((n, n), dtype=np.int32), succ, int(kid[L.pg.identity]))
    d2 = pg0.domain2
    prod = L.pg.pair[np.ix_(kp, kp)]
    if (prod[d2] < 0).any():
        raise LocalityError("restricted domain is not inside the original one")
    pair = np.where(d2, kid[np.maximum(prod, 0)], -1)

    def product_fn(word):
        return int(kid[L.pg.product([keep[f] for f in word])])

    labels = [L.pg.labels[f] for f in keep]
    pg = PartialGroup(labels, inv, pair, succ, int(kid[L.pg.identity]), product_fn,
                      name=L.pg.name, state_labels=objs)
    S_ids = [int(kid[f]) for f in L.S_ids]
    model = None
    if L.model is not None:
        M, elems = L.model
        model = (M, [elems[f] for f in keep])
    return Locality(pg, S_ids, delta2, L.p, name=L.name, model=model, parent_ids=keep)


# ---------------------------------------------------------------------------
# checks


def check_locality_axioms(L: Locality) -> Report:
    rep = Report()
    Sg = L.Sg
    # S is a p-subgroup of L
    try:
        S_grp = L.group_on(L.S_mask)
        ok = is_p_power(S_grp.n, L.p)
        rep.add("S-is-p-subgroup", ok)
    except Exception as exc:
        rep.add("S-is-p-subgroup", False, str(exc))
    # (L1): S is Sylow in N_L(S), equivalently maximal among p-subgroups
    try:
        N = L.group_on(L.normalizer_mask(Sg.full_mask))
        rep.add("L1-maximal-p-subgroup", p_part(N.n, L.p) == len(L.S_ids),
                None if p_part(N.n, L.p) == len(L.S_ids) else N.n)
    except Exception as exc:
        rep.add("L1-maximal-p-subgroup", False, str(exc))
    # (L2): D = D_Δ, compared on every word through the product automaton
    nxt, acc, _ = L.objects_dfa
    wit = _kernels.explore_product(L.pg.succ, nxt, acc)
    rep.add("L2-domain-via-objects", wit is None, None if wit is None else tuple(wit),
            "all word lengths")
    # (L3): overgroups of conjugates of objects are objects
    wit = None
    subs = Sg.subgroups()
    for P in L.delta.sorted():
        ps = bits(P)
        sc = L.sconj[:, ps]
        for f in np.nonzero((sc >= 0).all(axis=1))[0]:
            img = to_mask(int(x) for x in sc[f])
            for Q in subs:
                if img & ~Q == 0 and Q not in L.delta:
                    wit = (bits(P), int(f), bits(Q))
                    break
            if wit:
                break
        if wit:
            break
    rep.add("L3-overgroups-of-conjugates", wit is None, wit)
    return rep


def check_all(L: Locality, max_length: int = 3, budget: int = 20000) -> Report:
    rep = check_partial_group_axioms(L.pg, max_length, budget)
    rep.results.extend(check_locality_axioms(L).results)
    return rep


def proper_witness(L: Locality):
    """None if L is proper, else a reason."""
    cl = L.classes
    for P in cl["centric_radical"]:
        if P not in L.delta:
            return ("centric radical subgroup outside Δ", bits(P))
    for P in L.delta.members:
        if P not in cl["subcentric"]:
            return ("object is not subcentric", bits(P))
    for P in L.delta.sorted():
        G = L.normalizer_subgroup(P)
        if not G.is_characteristic_p(L.p):
            return ("normalizer not of characteristic p", bits(P))
    return None


def is_proper(L: Locality) -> bool:
    return proper_witness(L) is None


def alperin_decompose(L: Locality, f: int, bound: int = 6):
    """Write f = Π(n_1, ..., n_k) with n_i ∈ N_L(Q_i), Q_i ∈ Δ, S_f = S_w.

    Breadth-first over states (current image of S_f, prefix product).
    """
    start = L.S_f(f)
    normalized = {}
    for Q in sorted(L.delta.members, key=popcount, reverse=True):
        for g in bits(L.normalizer_mask(Q)):
            normalized.setdefault(g, Q)
    letters = sorted(normalized)
    pg = L.pg
    init = (start, pg.identity)
    parent = {init: None}
    queue = deque([(init, 0)])
    while queue:
        (X, h), depth = queue.popleft()
        if h == f:
            out = []
            node = (X, h)
            while parent[node] is not None:
                node, g = parent[node]
                out.append((normalized[g], g))
            return out[::-1] or [(normalized.get(f, start), f)]
        if depth == bound:
            continue
        for g in letters:
            row = L.sconj[g]
            xs = bits(X)
            if any(row[s] < 0 for s in xs):
                continue
            h2 = int(pg.pair[h, g])
            if h2 < 0:
                continue
            X2 = to_mask(int(row[s]) for s in xs)
            node = (X2, h2)
            if node not in parent:
                parent[node] = ((X, h), g)
                queue.append((node, depth + 1))
    raise DecompositionNotFound(f"no decomposition of {f} within length {bound}")


# ---------------------------------------------------------------------------
# the properties suite


def locality_properties(L: Locality, max_words: int = 4000, seed: int = 0) -> Report:
    """Exhaustive checks of the standard properties (a)-(g) of a locality.

    (c) and (f) quantify over words; all words of length <= 2 are used,
    plus a seeded sample of length-3 words of at most ``max_words``.
    """
    import random

    rep = Report()
    pg = L.pg
    Sg = L.Sg
    F = L.fusion
    norm = {P: L.normalizer_mask(P) for P in L.delta.sorted()}

    # (a)
    wit = None
    groups = {}
    for P, nm in norm.items():
        try:
            groups[P] = L.group_on(nm)
        except LocalityError as exc:
            wit = (bits(P), str(exc))
            break
    rep.add("a-normalizers-are-subgroups", wit is None, wit)

    # (b)
    wit = None
    for P, nm in norm.items():
        ps = bits(P)
        nids = bits(nm)
        for g in range(pg.n):
            if any(L.sconj[g, s] < 0 for s in ps):
                continue
            Q = L.conj_subgroup(P, g)
            if Q not in L.delta:
                wit = ("image not an object", bits(P), g)
                break
            row = pg.conj[g]
            imgs = [int(row[x]) for x in nids]
            if min(imgs) < 0:
                wit = ("normalizer not in D(g)", bits(P), g)
                break
            if to_mask(imgs) != norm[Q]:
                wit = ("c_g not onto N_L(Q)", bits(P), g)
                break
            for x in nids:
                for y in nids:
                    if row[int(pg.pair[x, y])] != pg.pair[row[x], row[y]]:
                        wit = ("c_g not a homomorphism", bits(P), g, x, y)
                        break
                if wit:
                    break
            if wit:
                break
        if wit:
            break
    rep.add("b-conjugation-isomorphisms", wit is None, wit)

    # words used by (c) and (f)
    rng = random.Random(seed)
    words = [(a,) for a in range(pg.n)]
    words += [w for w in pg.words(2)]
    total3 = pg.count_words(3)
    if total3 <= max_words:
        words += list(pg.words(3))
    else:
        words += [w for w in (pg.random_word(3, rng) for _ in range(max_words)) if w]

    # (c)
    wit = None
    for w in words:
        X0 = L.S_w(w)
        f = pg.product(w)
        for x in bits(norm.get(X0, 0)):
            y = x
            for g in w:
                y = int(pg.conj[g, y])
            if y != int(pg.conj[f, x]):
                wit = (w, x)
                break
        if wit:
            break
    rep.add("c-conjugation-composes", wit is None, wit, f"{len(words)} words")

    # (d)
    wit = None
    for g in range(pg.n):
        Sg_ = L.S_f(g)
        if Sg_ not in L.delta:
            wit = ("S_g not an object", g)
            break
        if L.conj_subgroup(Sg_, g) != L.S_f(int(pg.inv[g])):
            wit = ("S_g^g differs from S_(g^-1)", g)
            break
    rep.add("d-S_g-objects", wit is None, wit)

    # (e)
    wit = None
    for g in range(pg.n):
        gi = int(pg.inv[g])
        dg = np.nonzero(pg.conj[g] >= 0)[0]
        img = pg.conj[g, dg]
        if sorted(img.tolist()) != np.nonzero(pg.conj[gi] >= 0)[0].tolist():
            wit = ("c_g not onto D(g^-1)", g)
            break
        if not np.array_equal(pg.conj[gi, img], dg):
            wit = ("c_(g^-1) not inverse to c_g", g)
            break
    rep.add("e-conjugation-bijective", wit is None, wit)

    # (f)
    wit = None
    for w in words:
        Sw = L.S_w(w)
        if Sw & ~L.S_f(pg.product(w)):
            wit = ("S_w not in S_Pi(w)", w)
            break
    if wit is None:
        # words outside D: S_w ∉ Δ (length 2 exhaustively, length 3 sampled)
        d2 = pg.domain2
        for a, b in zip(*np.nonzero(~d2)):
            if L.S_w((int(a), int(b))) in L.delta:
                wit = ("S_w an object for w outside D", (int(a), int(b)))
                break
    rep.add("f-S_w-criterion", wit is None, wit)

    # (g)
    wit = None
    for Q in L.delta.sorted():
        if not F.is_fully_normalized(Q):
            continue
        G = groups.get(Q) or L.group_on(norm[Q])
        NSQ = Sg.normalizer(Q)
        if p_part(G.n, L.p) != popcount(NSQ):
            wit = ("N_S(Q) not Sylow in N_L(Q)", bits(Q))
            break
        for P in F.conjugates(Q):
            if P not in L.delta:
                continue
            NSP = Sg.normalizer(P)
            found = False
            for f in range(pg.n):
                row = L.sconj[f]
                if any(row[s] < 0 for s in bits(NSP)):
                    continue
                if L.conj_subgroup(P, f) == Q and L.conj_subgroup(NSP, f) & ~NSQ == 0:
                    found = True
                    break
            if not found:
                wit = ("no conjugating element", bits(P), bits(Q))
                break
        if wit:
            break
    rep.add("g-sylow-normalizers", wit is None, wit)
    return rep


def pns_sylow_conjugation(L: Locality, N_mask: int):
    """For each P ∈ Δ find n ∈ N with P ≤ S_n and N_T(P^n) Sylow in N_N(P^n).

    Returns None on success, else the failing P.
    """
    T = L.L_to_S(N_mask)
    for P in L.delta.sorted():
        ok = False
        for n in bits(N_mask):
            row = L.sconj[n]
            if any(row[s] < 0 for s in bits(P)):
                continue
            Q = L.conj_subgroup(P, n)
            NN = L.normalizer_mask(Q) & N_mask
            NT = L.Sg.normalizer(Q, T)
            if p_part(popcount(NN), L.p) == popcount(NT):
                ok = True
                break
        if not ok:
            return bits(P)
    return None


def gamma_locality(L: Locality, N_mask: int) -> Locality:
    """(N, Γ, T) with Γ = {P ∩ T : P ∈ Δ}, as a locality in its own right."""
    T = L.L_to_S(N_mask)
    Tg = L.Sg.as_group(T)
    Tpos = {s: i for i, s in enumerate(Tg.labels)}
    gamma_S = {P & T for P in L.delta.members}
    gamma = ObjectSet(Tg, {to_mask(Tpos[s] for s in bits(P)) for P in gamma_S})
    ids = bits(N_mask)
    nid = np.full(L.n, -1, dtype=np.int64)
    nid[ids] = np.arange(len(ids))
    objs = gamma.sorted()
    oidx = {P: i for i, P in enumerate(objs)}
    n = len(ids)
    T_S = [Tg.labels[i] for i in range(Tg.n)]  # S-local ids of T in order
    succ = np.full((len(objs), n), -1, dtype=np.int32)
    for k, f in enumerate(ids):
        row = L.sconj[f]
        for i, P in enumerate(objs):
            ps = [T_S[j] for j in bits(P)]
            if all(row[s] >= 0 and (T >> int(row[s])) & 1 for s in ps):
                succ[i, k] = oidx[to_mask(Tpos[int(row[s])] for s in ps)]
    ia = np.array(ids, dtype=np.int64)
    inv = nid[L.pg.inv[ia]]
    pg0 = PartialGroup(ids, inv, np.zeros((n, n), dtype=np.int32), succ, int(nid[L.pg.identity]))
    d2 = pg0.domain2
    prod = L.pg.pair[np.ix_(ia, ia)]
    if (prod[d2] < 0).any():
        raise LocalityError("Γ-domain is not inside D")
    pair = np.where(d2, nid[np.maximum(prod, 0)], -1)
    if (pair[d2] < 0).any():
        raise LocalityError("N is not closed under products")
    pg = PartialGroup([L.pg.labels[f] for f in ids], inv, pair, succ, int(nid[L.pg.identity]),
                      name=(L.name or "") + "/N")
    S_ids = [int(nid[L.S_ids[s]]) for s in T_S]
    return Locality(pg, S_ids, gamma, L.p, name=pg.name)


__all__ = [
    "ObjectSet", "Locality", "delta_from_selector", "build_locality_from_group",
    "locality_from_group", "restrict", "check_locality_axioms", "check_all", "is_proper",
    "proper_witness", "alperin_decompose", "locality_properties", "fusion_system_of",
    "fusion_of_partial_subgroup", "normalizer_subgroup", "centralizer_partial",
    "pns_sylow_conjugation", "gamma_locality", "is_partial_normal",
]
