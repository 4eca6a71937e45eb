"""Fusion systems over small p-groups, stored extensionally.

A morphism is a tuple ``m`` of length ``|S|`` with ``m[x]`` the image of
``x`` and -1 outside the domain.  A fusion system keeps, for every
subgroup ``P`` of its support ``T``, the set of morphisms with domain
``P``; the codomain is implicit (every morphism is an injection into T).
Subsystems of a fusion system over ``S`` live on the same group ``S`` with
a smaller support, so equality and inclusion are plain set comparisons.
"""

from __future__ import annotations

from collections import defaultdict, deque
from functools import cached_property

import numpy as np

from locality_lab.groups import FiniteGroup, bits, popcount, to_mask


class FusionError(Exception):
    pass


class NonInjectiveSeed(FusionError):
    pass


class NotSaturated(FusionError):
    pass


class NotFullyNormalized(FusionError):
    pass


class SupportNotStronglyClosed(FusionError):
    pass


def dom_mask(m) -> int:
    return to_mask(i for i, y in enumerate(m) if y >= 0)


def img_mask(m) -> int:
    return to_mask(y for y in m if y >= 0)


def restrict(m, P: int):
    return tuple(y if (P >> i) & 1 else -1 for i, y in enumerate(m))


def compose(a, b):
    """First ``a`` then ``b``; ``b`` must be defined on the image of ``a``."""
    out = []
    for y in a:
        if y < 0:
            out.append(-1)
        else:
            z = b[y]
            if z < 0:
                raise FusionError("composition outside domain")
            out.append(z)
    return tuple(out)


def invert(m):
    out = [-1] * len(m)
    for i, y in enumerate(m):
        if y >= 0:
            out[y] = i
    return tuple(out)


def identity_on(P: int, size: int):
    return tuple(i if (P >> i) & 1 else -1 for i in range(size))


def is_injective_hom(S: FiniteGroup, m) -> bool:
    P = dom_mask(m)
    if not S.is_subgroup(P):
        return False
    ids = bits(P)
    if len({m[i] for i in ids}) != len(ids):
        return False
    return all(m[int(S.mul[a, b])] == int(S.mul[m[a], m[b]]) for a in ids for b in ids)


class FusionSystem:
    """A fusion system over ``support`` (a subgroup of the group ``S``)."""

    def __init__(self, S: FiniteGroup, support: int, maps: dict, name: str | None = None):
        self.S = S
        self.support = support
        self.maps = {P: frozenset(v) for P, v in maps.items()}
        self.name = name
        self.m = S.n

    def __repr__(self):
        return f"<FusionSystem over order {popcount(self.support)} maps={self.size}>"

    @property
    def size(self) -> int:
        return sum(len(v) for v in self.maps.values())

    def __eq__(self, other):
        return (
            isinstance(other, FusionSystem)
            and self.support == other.support
            and np.array_equal(self.S.mul, other.S.mul)
            and self.maps == other.maps
        )

    def __hash__(self):
        return hash((self.support, frozenset(self.maps.items())))

    def __le__(self, other: "FusionSystem") -> bool:
        """Subsystem inclusion."""
        if self.support & ~other.support:
            return False
        return all(v <= other.maps.get(P, frozenset()) for P, v in self.maps.items())

    def all_maps(self):
        for v in self.maps.values():
            yield from v

    @cached_property
    def subgroups(self) -> list[int]:
        T = self.support
        return [P for P in self.S.subgroups() if P & ~T == 0]

    def hom(self, P: int, Q: int | None = None):
        Q = self.support if Q is None else Q
        return [m for m in self.maps.get(P, ()) if img_mask(m) & ~Q == 0]

    def aut(self, P: int):
        return [m for m in self.maps.get(P, ()) if img_mask(m) == P]

    def conjugates(self, P: int) -> set:
        return {img_mask(m) for m in self.maps.get(P, ())}

    @cached_property
    def classes(self) -> list[list[int]]:
        seen = set()
        out = []
        for P in self.subgroups:
            if P in seen:
                continue
            cls = sorted(self.conjugates(P), key=self.S.sort_key)
            seen.update(cls)
            out.append(cls)
        return out

    def class_of(self, P: int) -> list[int]:
        return sorted(self.conjugates(P), key=self.S.sort_key)

    def normalizer_in_support(self, P: int) -> int:
        return self.S.normalizer(P, self.support)

    def centralizer_in_support(self, P: int) -> int:
        return self.S.centralizer(P, self.support)

    def is_fully_normalized(self, P: int) -> bool:
        k = popcount(self.normalizer_in_support(P))
        return all(popcount(self.normalizer_in_support(Q)) <= k for Q in self.conjugates(P))

    def is_fully_centralized(self, P: int) -> bool:
        k = popcount(self.centralizer_in_support(P))
        return all(popcount(self.centralizer_in_support(Q)) <= k for Q in self.conjugates(P))

    def fully_normalized_rep(self, P: int) -> int:
        """The conjugate with largest normalizer; ties go to the smallest element list."""
        return max(
            self.class_of(P),
            key=lambda Q: (popcount(self.normalizer_in_support(Q)), [-x for x in bits(Q)]),
        )

    def inner(self, t: int, P: int):
        return restrict(tuple(int(x) for x in self.S.conj[t]), P)

    def aut_support(self, P: int):
        """Aut_T(P): conjugations by elements of N_T(P), restricted to P."""
        return {self.inner(t, P) for t in bits(self.normalizer_in_support(P))}

    def inn(self, P: int):
        return {self.inner(t, P) for t in bits(P)}

    def aut_group(self, P: int):
        """Aut_F(P) as a group; labels are the morphism tuples."""
        auts = sorted(self.aut(P))
        return _map_group(auts)

    def extensions(self, m, D: int):
        """Morphisms with domain ``D`` restricting to ``m``."""
        P = dom_mask(m)
        return [e for e in self.maps.get(D, ()) if restrict(e, P) == m]

    def has_extension(self, m, D: int, condition=None) -> bool:
        for e in self.extensions(m, D):
            if condition is None or condition(e):
                return True
        return False


def _map_group(auts) -> FiniteGroup:
    index = {a: i for i, a in enumerate(auts)}
    k = len(auts)
    table = np.empty((k, k), dtype=np.int32)
    for i, a in enumerate(auts):
        for j, b in enumerate(auts):
            table[i, j] = index[compose(a, b)]
    return FiniteGroup(auts, table)


# ---------------------------------------------------------------------------
# generation


def generate_fusion_system(S: FiniteGroup, seeds, support: int | None = None,
                           name: str | None = None) -> FusionSystem:
    """Least system over ``support`` containing the seeds and inner fusion.

    Closure under restriction, composition and inversion onto images is
    computed with a worklist until nothing new appears.
    """
    T = S.full_mask if support is None else support
    m = S.n
    subs = [P for P in S.subgroups() if P & ~T == 0]
    subs_of = {P: [Q for Q in subs if Q & ~P == 0 and Q != P] for P in subs}
    by_dom = defaultdict(set)
    by_img = defaultdict(set)
    work = deque()

    def add(x):
        P = dom_mask(x)
        if x in by_dom[P]:
            return
        by_dom[P].add(x)
        by_img[img_mask(x)].add(x)
        work.append(x)

    for s in seeds:
        s = tuple(int(v) for v in s)
        if len(s) != m or not is_injective_hom(S, s):
            raise NonInjectiveSeed(s)
        if dom_mask(s) & ~T or img_mask(s) & ~T:
            raise FusionError("seed leaves the support")
        add(s)
    for t in bits(T):
        add(restrict(tuple(int(v) for v in S.conj[t]), T))

    while work:
        x = work.popleft()
        P = dom_mask(x)
        Q = img_mask(x)
        add(invert(x))
        for R in subs_of[P]:
            add(restrict(x, R))
        for y in list(by_dom[Q]):
            add(compose(x, y))
        for w in list(by_img[P]):
            add(compose(w, x))
    return FusionSystem(S, T, by_dom, name)


def group_fusion_direct(G: FiniteGroup, S_mask: int, T_mask: int | None = None,
                        N_mask: int | None = None) -> tuple[FiniteGroup, FusionSystem]:
    """F_T(N) for N ≤ G with T = S ∩ N, by listing every c_n : P -> T directly.

    Returns the group S (ambient labels) and the system over T.
    """
    S = G.as_group(S_mask)
    pos = {g: i for i, g in enumerate(S.labels)}
    N_mask = G.full_mask if N_mask is None else N_mask
    T_amb = S_mask & N_mask if T_mask is None else T_mask
    T = to_mask(pos[g] for g in bits(T_amb))
    subs = [P for P in S.subgroups() if P & ~T == 0]
    maps = defaultdict(set)
    for n in bits(N_mask):
        row = G.conj[n]
        img = [-1] * S.n
        for s_amb, i in pos.items():
            y = int(row[s_amb])
            if (T_amb >> y) & 1:
                img[i] = pos[y]
        for P in subs:
            if all(img[i] >= 0 for i in bits(P)):
                maps[P].add(restrict(tuple(img), P))
    return S, FusionSystem(S, T, maps)


def fusion_system_of_group(G: FiniteGroup, S_mask: int) -> tuple[FiniteGroup, FusionSystem]:
    """F_S(G) generated from the conjugation maps c_g : S ∩ S^(g^-1) -> S."""
    S = G.as_group(S_mask)
    pos = {g: i for i, g in enumerate(S.labels)}
    seeds = set()
    for g in range(G.n):
        row = G.conj[g]
        img = [-1] * S.n
        for s_amb, i in pos.items():
            y = int(row[s_amb])
            if (S_mask >> y) & 1:
                img[i] = pos[y]
        seeds.add(tuple(img))
    return S, generate_fusion_system(S, seeds)


# ---------------------------------------------------------------------------
# local subsystems


def centralizer_system(F: FusionSystem, X: int) -> FusionSystem:
    """C_F(X) over C_T(X): restrictions of morphisms on AX fixing X pointwise."""
    C = F.centralizer_in_support(X)
    seeds = set()
    for A in F.S.subgroups():
        if A & ~C:
            continue
        AX = F.S.join(A, X)
        for e in F.maps.get(AX, ()):
            if all(e[x] == x for x in bits(X)):
                seeds.add(restrict(e, A))
    return generate_fusion_system(F.S, seeds, C)


def local_subsystem(F: FusionSystem, P: int, check: bool = True) -> FusionSystem:
    """N_F(P) over N_T(P): restrictions of morphisms on AP mapping P onto P."""
    if check and not F.is_fully_normalized(P):
        raise NotFullyNormalized(bits(P))
    N = F.normalizer_in_support(P)
    seeds = set()
    for A in F.S.subgroups():
        if A & ~N:
            continue
        AP = F.S.join(A, P)
        for e in F.maps.get(AP, ()):
            if img_mask(restrict(e, P)) == P:
                seeds.add(restrict(e, A))
    return generate_fusion_system(F.S, seeds, N)


def is_normal_subgroup(F: FusionSystem, X: int) -> bool:
    """X ⊴ F: every morphism extends to one on its domain times X, mapping X onto X."""
    if X & ~F.support or not F.S.is_normal(X, F.support):
        return False
    for P, ms in F.maps.items():
        PX = F.S.join(P, X)
        for x in ms:
            if not F.has_extension(x, PX, lambda e: img_mask(restrict(e, X)) == X):
                return False
    return True


def o_p(F: FusionSystem) -> int:
    """Largest subgroup normal in F."""
    cands = [X for X in F.subgroups if is_normal_subgroup(F, X)]
    best = max(cands, key=popcount)
    if any(X & ~best for X in cands):  # pragma: no cover - products of normal subgroups are normal
        raise FusionError("normal subgroups not contained in a largest one")
    return best


# ---------------------------------------------------------------------------
# saturation and subgroup classes


def saturation_witness(F: FusionSystem):
    """None if F is saturated, else (reason, subgroup, morphism-or-None)."""
    S = F.S
    p = _prime_of(popcount(F.support))
    for P in F.subgroups:
        if not F.is_fully_normalized(P):
            continue
        nA = len(F.aut(P))
        nAS = len(F.aut_support(P))
        if p is not None and _p_part(nA, p) != nAS:
            return ("not fully automized", P, None)
        autT = F.aut_support(P)
        for Q in F.conjugates(P):
            NTQ = F.normalizer_in_support(Q)
            for phi in F.maps.get(Q, ()):
                if img_mask(phi) != P:
                    continue
                phinv = invert(phi)
                Nphi = [g for g in bits(NTQ)
                        if compose(compose(phinv, F.inner(g, Q)), phi) in autT]
                D = S.generate(Nphi)
                if not F.has_extension(phi, D):
                    return ("not receptive", P, phi)
    return None


def is_saturated(F: FusionSystem) -> bool:
    return saturation_witness(F) is None


def _prime_of(n: int):
    for p in range(2, n + 1):
        if n % p == 0:
            return p
    return None


def _p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def subgroup_classes(F: FusionSystem, check: bool = True) -> dict:
    """The sets F^c, F^r, F^cr, F^q, F^s as sets of subgroup masks."""
    if check and not is_saturated(F):
        raise NotSaturated("subgroup classes need a saturated system")
    S = F.S
    p = _prime_of(popcount(F.support))
    centric, radical, quasi, sub = set(), set(), set(), set()
    for cls in F.classes:
        P = cls[0]
        if all(F.centralizer_in_support(Q) & ~Q == 0 for Q in cls):
            centric.update(cls)
        if _is_radical(F, P, p):
            radical.update(cls)
        if all(
            centralizer_system(F, Q) == _inner_system(S, F.centralizer_in_support(Q))
            for Q in cls if F.is_fully_centralized(Q)
        ):
            quasi.update(cls)
        ok = True
        for Q in cls:
            if not F.is_fully_normalized(Q):
                continue
            NF = local_subsystem(F, Q, check=False)
            X = o_p(NF)
            if NF.centralizer_in_support(X) & ~X:
                ok = False
                break
        if ok:
            sub.update(cls)
    return {
        "centric": centric,
        "radical": radical,
        "centric_radical": centric & radical,
        "quasicentric": quasi,
        "subcentric": sub,
    }


def _is_radical(F: FusionSystem, P: int, p) -> bool:
    if p is None:
        return True
    A = F.aut_group(P)
    op = {A.labels[i] for i in bits(A.big_o_p(p))}
    return op == F.inn(P)


def _inner_system(S: FiniteGroup, T: int) -> FusionSystem:
    return generate_fusion_system(S, [], T)


def inner_system(S: FiniteGroup, T: int | None = None) -> FusionSystem:
    """F_T(T)."""
    return _inner_system(S, S.full_mask if T is None else T)


# ---------------------------------------------------------------------------
# closure properties and normality


def is_strongly_closed(F: FusionSystem, T: int) -> bool:
    for P, ms in F.maps.items():
        if P & ~T:
            continue
        for x in ms:
            if img_mask(x) & ~T:
                return False
    return True


def is_F_closed(F: FusionSystem, delta) -> bool:
    delta = set(delta)
    for P in delta:
        if not F.conjugates(P) <= delta:
            return False
        for Q in F.subgroups:
            if P & ~Q == 0 and Q not in delta:
                return False
    return True


def normality_witness(F: FusionSystem, E: FusionSystem):
    """None if E is a normal subsystem of F, else (condition, witness)."""
    T = E.support
    if not E <= F:
        return ("not a subsystem", None)
    if not is_strongly_closed(F, T):
        return ("support not strongly closed", T)
    if not is_saturated(E):
        return ("subsystem not saturated", saturation_witness(E))
    autT = F.aut(T)
    # invariance
    for phi in E.all_maps():
        for a in autT:
            conj = conjugate_map(phi, a)
            if conj not in E.maps.get(dom_mask(conj), ()):
                return ("invariance", (phi, a))
    # Frattini
    emaps = set(E.all_maps())
    for P in E.subgroups:
        for phi in F.hom(P, T):
            if not any(compose(phi, invert(a)) in emaps for a in autT):
                return ("frattini", phi)
    # extension
    S = F.S
    CST = S.centralizer(T, F.support)
    TC = S.join(T, CST)
    ZT = S.centralizer(T, T)
    for alpha in E.aut(T):
        ok = False
        for e in F.extensions(alpha, TC):
            if img_mask(e) != TC:
                continue
            if all((ZT >> int(S.mul[S.inv[c], e[c]])) & 1 for c in bits(CST)):
                ok = True
                break
        if not ok:
            return ("extension", alpha)
    return None


def conjugate_map(phi, a):
    """phi^a = a^-1 phi a, a map from (dom phi)a to T."""
    out = [-1] * len(phi)
    for x in bits(dom_mask(phi)):
        out[a[x]] = a[phi[x]]
    return tuple(out)


def is_normal_subsystem(F: FusionSystem, E: FusionSystem) -> bool:
    return normality_witness(F, E) is None


# ---------------------------------------------------------------------------
# centres


def _centralized_by(big: FusionSystem, E: FusionSystem, X: int) -> bool:
    """E ⊆ C_big(X): every E-morphism extends in ``big`` to PX fixing X."""
    xs = bits(X)
    for P, ms in E.maps.items():
        PX = big.S.join(P, X)
        for phi in ms:
            if not big.has_extension(phi, PX, lambda e: all(e[x] == x for x in xs)):
                return False
    return True


def _largest(S: FiniteGroup, cands) -> int:
    best = max(cands, key=popcount)
    if any(X & ~best for X in cands):  # pragma: no cover
        raise FusionError("no largest candidate")
    return best


def center_of(E: FusionSystem) -> int:
    """Z(E): the largest X ≤ T with E contained in C_E(X)."""
    S = E.S
    ZT = S.centralizer(E.support, E.support)
    cands = [X for X in S.subgroups() if X & ~ZT == 0 and _centralized_by(E, E, X)]
    return _largest(S, cands)


def cs_of_subsystem(F: FusionSystem, E: FusionSystem) -> int:
    """C_S(E): the largest X ≤ C_S(T) with E contained in C_F(X)."""
    S = F.S
    C = S.centralizer(E.support, F.support)
    cands = [X for X in S.subgroups() if X & ~C == 0 and _centralized_by(F, E, X)]
    return _largest(S, cands)


def product_system(F: FusionSystem, E1: FusionSystem, E2: FusionSystem) -> FusionSystem:
    """Subsystem generated by E1 and E2 over the product of their supports."""
    S = F.S
    T = S.join(E1.support, E2.support)
    return generate_fusion_system(S, set(E1.all_maps()) | set(E2.all_maps()), T)


def restriction_to(F: FusionSystem, delta) -> FusionSystem:
    """F|_Δ: generated by the morphisms between members of Δ."""
    delta = set(delta)
    seeds = [x for P in delta for x in F.maps.get(P, ())
             if any(img_mask(x) & ~Q == 0 for Q in delta)]
    return generate_fusion_system(F.S, seeds, F.support)


__all__ = [
    "FusionSystem", "generate_fusion_system", "group_fusion_direct", "fusion_system_of_group",
    "is_saturated", "saturation_witness", "subgroup_classes", "is_strongly_closed",
    "is_F_closed", "is_normal_subsystem", "normality_witness", "center_of",
    "cs_of_subsystem", "local_subsystem", "centralizer_system", "o_p", "inner_system",
    "is_normal_subgroup", "product_system", "restriction_to",
]
