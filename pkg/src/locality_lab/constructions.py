"""Building new localities from old ones: expansion, gluing, quotients, products.

The expansion L⁺(R, M) is built from the triples Θ = {(x⁻¹, g, y)} modulo
the relation ≈ generated by ∼₀ and ⊢.  ∼₀ is decided through a key: with a
fixed representative c_U ∈ X for every conjugate U of R,

    (x⁻¹, g, y)  ∼₀  (c_U⁻¹, Π(c_U, x⁻¹)·g·Π(y, c_V⁻¹), c_V)

where U = R^x and V = R^y.  The construction checks on the full Θ that two
triples are ∼₀-related exactly when their keys agree, so the key is a
faithful stand-in and not an assumption.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from locality_lab.fusion import (
    FusionSystem,
    fusion_system_of_group,
    generate_fusion_system,
    local_subsystem,
    restriction_to,
)
from locality_lab.groups import FiniteGroup, bits, p_part, popcount, to_mask
from locality_lab.localities import (
    Locality,
    LocalityError,
    ObjectSet,
    build_locality_from_group,
    check_locality_axioms,
)
from locality_lab.partial_groups import (
    PartialGroup,
    PartialSubgroup,
    Report,
    WordNotInDomain,
    check_partial_group_axioms,
    domain_equivalence_witness,
    is_homomorphism,
    is_partial_normal,
    is_partial_subgroup,
)


class ConstructionError(Exception):
    pass


class HypothesisViolation(ConstructionError):
    def __init__(self, clause, witness=None):
        super().__init__(f"{clause}: {witness}")
        self.clause = clause
        self.witness = witness


class NotPartialNormal(ConstructionError):
    pass


class GlueError(ConstructionError):
    pass


# ---------------------------------------------------------------------------
# expansion


@dataclass
class Expansion:
    base: Locality
    R: int
    M: FiniteGroup
    iota: np.ndarray  # L id -> M id on N_L(R), else -1
    X: list
    conj: list  # F-conjugates of R (S-local masks)
    canon: dict  # U -> c_U
    A: dict  # x -> Π(c_U, x⁻¹) as an M id
    B: dict  # y -> Π(y, c_V⁻¹) as an M id
    U_of: dict  # x -> R^x
    class_of_key: dict  # (U, h, V) -> class id
    keys_of: list  # class id -> list of keys
    locality: Locality
    psi: np.ndarray  # M id -> class id of [1, m, 1]
    report: Report = field(default_factory=Report)

    def key(self, x: int, g: int, y: int):
        """Key of the triple (x⁻¹, g, y); x, y ∈ X and g an M id."""
        h = int(self.M.mul[int(self.M.mul[self.A[x], g]), self.B[y]])
        return (self.U_of[x], h, self.U_of[y])

    def class_of_triple(self, x: int, g: int, y: int) -> int:
        return self.class_of_key[self.key(x, g, y)]

    def triples(self, c: int):
        """All Θ triples (x, g, y) in class c."""
        M = self.M
        out = []
        for U, h, V in self.keys_of[c]:
            for x in self.X:
                if self.U_of[x] != U:
                    continue
                for y in self.X:
                    if self.U_of[y] != V:
                        continue
                    # h = A[x] g B[y]  =>  g = A[x]^-1 h B[y]^-1
                    g = int(M.mul[int(M.mul[int(M.inv[self.A[x]]), h]), int(M.inv[self.B[y]])])
                    out.append((x, g, y))
        return out


def _delta_R(L: Locality, R: int) -> set:
    Sg = L.Sg
    return {P for P in L.delta.members if R & ~P == 0 and Sg.is_normal(R, P)}


def check_expansion_hypotheses(L: Locality, R: int, M: FiniteGroup, iota, F: FusionSystem):
    """Raise HypothesisViolation for the first clause that fails."""
    Sg = L.Sg
    if R & ~Sg.full_mask or not Sg.is_subgroup(R):
        raise HypothesisViolation("R is a subgroup of S", bits(R))
    if restriction_to(F, L.delta.members) != L.fusion:
        raise HypothesisViolation("L is F-natural")
    if not F.is_fully_normalized(R):
        raise HypothesisViolation("R is fully normalized in F", bits(R))
    conj = sorted(F.conjugates(R), key=Sg.sort_key)
    for U, V in itertools.combinations(conj, 2):
        if Sg.join(U, V) not in L.delta:
            raise HypothesisViolation("<U,V> in Δ for distinct conjugates of R", (bits(U), bits(V)))
    nlr = L.normalizer_mask(R)
    iota = np.asarray(iota, dtype=np.int64)
    dom = to_mask(np.nonzero(iota >= 0)[0].tolist())
    if dom != nlr:
        raise HypothesisViolation("the identification is defined exactly on N_L(R)",
                                  bits(dom ^ nlr))
    imgs = iota[bits(nlr)]
    if len(set(imgs.tolist())) != len(imgs):
        raise HypothesisViolation("the identification of N_L(R) with M is injective")
    NSR = Sg.normalizer(R)
    s2m = {s: int(iota[L.S_ids[s]]) for s in bits(NSR)}
    m2s = {m: s for s, m in s2m.items()}
    R_M = to_mask(s2m[s] for s in bits(R))
    if not M.is_normal(R_M):
        raise HypothesisViolation("R is normal in M", bits(R))
    MS = to_mask(s2m.values())
    if not M.is_subgroup(MS) or p_part(M.n, L.p) != popcount(NSR):
        raise HypothesisViolation("N_S(R) is a Sylow subgroup of M", (M.n, popcount(NSR)))
    # N_F(R) = F_{N_S(R)}(M), as systems over the same S
    seeds = set()
    for m in range(M.n):
        row = M.conj[m]
        img = [-1] * Sg.n
        for s, ms in s2m.items():
            y = int(row[ms])
            if y in m2s:
                img[s] = m2s[y]
        seeds.add(tuple(img))
    FM = generate_fusion_system(Sg, seeds, NSR)
    if FM != local_subsystem(F, R):
        raise HypothesisViolation("N_F(R) equals the fusion system of M")
    # L_{Δ_R}(M) = N_L(R) as partial groups
    Sm = M.as_group(MS)
    spos = {g: i for i, g in enumerate(Sm.labels)}
    to_m = {s: spos[s2m[s]] for s in s2m}
    gamma = ObjectSet(Sm, {to_mask(to_m[s] for s in bits(P)) for P in _delta_R(L, R)})
    LM = build_locality_from_group(M, L.p, gamma, S_mask=MS, check_closed=False)
    mids = [int(iota[f]) for f in bits(nlr)]
    if sorted(LM.pg.labels) != sorted(mids):
        raise HypothesisViolation("L_{Δ_R}(M) and N_L(R) have the same elements")
    to_lm = {lab: i for i, lab in enumerate(LM.pg.labels)}
    phi = np.full(L.n, -1, dtype=np.int64)
    for f in bits(nlr):
        phi[f] = to_lm[int(iota[f])]
    wit = domain_equivalence_witness(L.pg, LM.pg, phi, letters=bits(nlr))
    if wit is not None:
        raise HypothesisViolation("L_{Δ_R}(M) and N_L(R) have the same domain", wit)
    for a in bits(nlr):
        for b in bits(nlr):
            c = int(L.pg.pair[a, b])
            if c >= 0 and int(LM.pg.pair[phi[a], phi[b]]) != phi[c]:
                raise HypothesisViolation("L_{Δ_R}(M) and N_L(R) have the same product", (a, b))
    return conj, nlr, iota


def expand(L: Locality, R: int, M: FiniteGroup, iota, F: FusionSystem | None = None,
           check: bool = True, name: str | None = None) -> Expansion:
    """The expansion (L⁺, Δ⁺, S) of L by the conjugates of R, with N_{L⁺}(R) ≅ M.

    ``iota`` maps L ids to M ids on N_L(R) (and is -1 elsewhere).  ``F`` is
    the ambient saturated system; it defaults to F_S(L).
    """
    F = L.fusion if F is None else F
    conj, nlr, iota = check_expansion_hypotheses(L, R, M, iota, F)
    pg, Sg = L.pg, L.Sg
    rep = Report()

    # X: the elements that may appear as x or y in a triple
    X, U_of = [], {}
    rs = bits(R)
    for x in range(L.n):
        row = L.sconj[x]
        if any(row[r] < 0 for r in rs):
            continue
        Sx = L.S_f(x)
        U = L.conj_subgroup(R, x)
        if L.conj_subgroup(Sg.normalizer(R, Sx), x) == Sg.normalizer(U):
            X.append(x)
            U_of[x] = U
    if set(U_of.values()) != set(conj):
        raise ConstructionError("X does not reach every conjugate of R")
    canon = {}
    for x in X:
        canon.setdefault(U_of[x], x)
    canon[R] = pg.identity

    def into_M(word):
        try:
            f = pg.product(word)
        except WordNotInDomain:
            raise ConstructionError(f"word {word} outside D") from None
        m = int(iota[f])
        if m < 0:
            raise ConstructionError(f"Π{word} is not in N_L(R)")
        return m

    A = {x: into_M((canon[U_of[x]], int(pg.inv[x]))) for x in X}
    B = {y: into_M((y, int(pg.inv[canon[U_of[y]]]))) for y in X}
    k = len(conj)
    cidx = {U: i for i, U in enumerate(conj)}
    Mm = M.mul

    # ∼₀ equals key equality: for all t and all (x̄, ȳ) the literal partner
    # ḡ = Π(x̄,x⁻¹)·g·Π(ȳ,y⁻¹)⁻¹ has the key of t
    by_U = {U: [x for x in X if U_of[x] == U] for U in conj}
    P = {}
    for U, xs in by_U.items():
        for xb in xs:
            for x in xs:
                P[xb, x] = into_M((xb, int(pg.inv[x])))
    wit = None
    g_all = np.arange(M.n)
    for U, xs in by_U.items():
        for V, ys in by_U.items():
            for x in xs:
                for y in ys:
                    h = Mm[Mm[A[x], g_all], B[y]]
                    for xb in xs:
                        left = Mm[P[xb, x], g_all]
                        for yb in ys:
                            gb = Mm[left, M.inv[P[yb, y]]]
                            hb = Mm[Mm[A[xb], gb], B[yb]]
                            if not np.array_equal(hb, h):
                                wit = (x, y, xb, yb)
                                break
                        if wit:
                            break
                    if wit:
                        break
                if wit:
                    break
    rep.add("sim0-is-key-equality", wit is None, wit, f"|Θ|={len(X) ** 2 * M.n}")
    if wit is not None:
        raise ConstructionError(f"∼₀ is not decided by keys: {wit}")

    # ≈ : union-find over L ∪ keys, joined along ⊢
    def kid(U, h, V):
        return L.n + (cidx[U] * M.n + h) * k + cidx[V]

    ds = DisjointSet(range(L.n + k * M.n * k))
    nlr_ids = bits(nlr)
    links = 0
    for x in X:
        xi = int(pg.inv[x])
        start = pg.run((xi,))
        if not start:
            continue
        for nl in nlr_ids:
            s2 = pg.run((nl,), start)
            if not s2:
                continue
            g = int(iota[nl])
            for y in X:
                if pg.run((y,), s2):
                    f = pg.product((xi, nl, y))
                    U, h, V = U_of[x], int(Mm[Mm[A[x], g], B[y]]), U_of[y]
                    ds.merge(f, kid(U, h, V))
                    links += 1
    subsets = ds.subsets()
    rep.add("theta-links", True, None, f"{links} ⊢ links")

    # classes: L elements keep their ids, new classes follow by smallest key
    cls_L = np.full(L.n, -1, dtype=np.int64)
    members = []
    for sub in subsets:
        ls = sorted(e for e in sub if e < L.n)
        ks = sorted(e - L.n for e in sub if e >= L.n)
        members.append((ls, ks))
    bad = [ls for ls, _ in members if len(ls) > 1]
    rep.add("L-embeds", not bad, bad[0] if bad else None, "f ≈ g only if f = g")
    if bad:
        raise ConstructionError(f"two elements of L are identified: {bad[0]}")
    with_L = sorted((ls[0], ks) for ls, ks in members if ls)
    pure = sorted((ks for ls, ks in members if not ls), key=lambda ks: ks[0])
    n_plus = len(with_L) + len(pure)
    if len(with_L) != L.n:
        raise ConstructionError("some element of L lies in no class")

    def decode(code):
        u, rest = divmod(code, M.n * k)
        h, v = divmod(rest, k)
        return (conj[u], h, conj[v])

    keys_of = [[] for _ in range(n_plus)]
    for f, ks in with_L:
        cls_L[f] = f
        keys_of[f] = [decode(c) for c in ks]
    for i, ks in enumerate(pure):
        keys_of[L.n + i] = [decode(c) for c in ks]
    class_of_key = {}
    for c, ks in enumerate(keys_of):
        for key in ks:
            class_of_key[key] = c

    # inversion [x⁻¹,f,y] ↦ [y⁻¹,f⁻¹,x], i.e. (U,h,V) ↦ (V,h⁻¹,U)
    inv_plus = np.full(n_plus, -1, dtype=np.int64)
    wit = None
    for c in range(n_plus):
        targets = {class_of_key[(V, int(M.inv[h]), U)] for U, h, V in keys_of[c]}
        if c < L.n:
            targets.add(int(pg.inv[c]))
        if len(targets) != 1:
            wit = c
            break
        inv_plus[c] = targets.pop()
    rep.add("inversion-well-defined", wit is None, wit)
    if wit is not None:
        raise ConstructionError(f"inversion is not well defined on class {wit}")

    # domain automaton: the states of L, then one state per conjugate of R
    s0 = pg.succ.shape[0]
    succ = np.full((s0 + k, n_plus), -1, dtype=np.int32)
    succ[:s0, :L.n] = pg.succ
    for c in range(n_plus):
        for U, h, V in keys_of[c]:
            i, j = s0 + cidx[U], s0 + cidx[V]
            if succ[i, c] not in (-1, j):
                raise ConstructionError(f"class {c} moves {bits(U)} to two conjugates")
            succ[i, c] = j

    # products of pairs, checked over every choice of keys
    from_U = [[[] for _ in range(k)] for _ in range(n_plus)]
    for c in range(n_plus):
        for U, h, V in keys_of[c]:
            from_U[c][cidx[U]].append((h, cidx[V]))
    pair = np.full((n_plus, n_plus), -1, dtype=np.int64)
    d2l = pg.domain2
    wit_def = wit_agree = None
    for a in range(n_plus):
        for U, h1, V in keys_of[a]:
            vi = cidx[V]
            for b in range(n_plus):
                for h2, wi in from_U[b][vi]:
                    c = class_of_key[(U, int(Mm[h1, h2]), conj[wi])]
                    if pair[a, b] == -1:
                        pair[a, b] = c
                    elif pair[a, b] != c and wit_def is None:
                        wit_def = (a, b)
    for a in range(L.n):
        for b in np.nonzero(d2l[a])[0]:
            c = int(pg.pair[a, b])
            if pair[a, b] not in (-1, c) and wit_agree is None:
                wit_agree = (a, int(b))
            pair[a, b] = c
    rep.add("product-well-defined", wit_def is None, wit_def, "all chain choices, length 2")
    rep.add("products-agree-on-D∩D0+", wit_agree is None, wit_agree)
    if wit_def is not None or wit_agree is not None:
        raise ConstructionError(f"product not well defined: {wit_def or wit_agree}")

    def key_chains(word):
        """Products of all key chains through the word, as classes."""
        out = set()
        for first in keys_of[word[0]]:
            stack = [(first[0], first[1], cidx[first[2]], 1)]
            while stack:
                U, h, vi, i = stack.pop()
                if i == len(word):
                    out.add(class_of_key[(U, h, conj[vi])])
                    continue
                for h2, wi in from_U[word[i]][vi]:
                    stack.append((U, int(Mm[h, h2]), wi, i + 1))
        return out

    def product_fn(word):
        if all(f < L.n for f in word) and pg.in_domain(word):
            return pg.product(word)
        vals = key_chains(word)
        if len(vals) != 1:
            raise ConstructionError(f"Π⁺ not well defined on {word}: {sorted(vals)}")
        return vals.pop()

    labels = list(pg.labels)
    for i in range(len(pure)):
        U, h, V = keys_of[L.n + i][0]
        labels.append(("+", tuple(bits(U)), M.labels[h], tuple(bits(V))))
    plus_delta = L.delta.union(Q for Q in Sg.subgroups() if any(U & ~Q == 0 for U in conj))
    state_labels = list(pg.state_labels or range(s0)) + [("R^", tuple(bits(U))) for U in conj]
    pgp = PartialGroup(labels, inv_plus, pair, succ, pg.identity, product_fn,
                       name=name or f"{L.name or 'L'}+", state_labels=state_labels)
    Lp = Locality(pgp, L.S_ids, plus_delta, L.p, name=pgp.name)

    # ψ : M -> N_{L⁺}(R), m ↦ [1, m, 1]
    one = pg.identity
    psi = np.array([class_of_key[(R, int(Mm[Mm[A[one], m], B[one]]), R)]
                    for m in range(M.n)], dtype=np.int64)
    exp = Expansion(L, R, M, iota, X, conj, canon, A, B, U_of, class_of_key, keys_of,
                    Lp, psi, rep)
    if check:
        verify_expansion(exp, F)
    return exp


def verify_expansion(exp: Expansion, F: FusionSystem | None = None, budget: int = 20000) -> Report:
    """The expansion is a locality over Δ⁺ with fusion F|_{Δ⁺} and N_{L⁺}(R) ≅ M."""
    rep = exp.report
    Lp, L, M = exp.locality, exp.base, exp.M
    pa = check_partial_group_axioms(Lp.pg, 3, budget)
    rep.add("partial-group-axioms", pa.passed, [r.name for r in pa.failures()] or None)
    la = check_locality_axioms(Lp)
    rep.add("locality-axioms", la.passed, [r.name for r in la.failures()] or None)
    if F is not None:
        want = restriction_to(F, Lp.delta.members)
        rep.add("fusion-is-F-restricted", Lp.fusion == want)
    # ψ is an isomorphism onto N_{L⁺}(R)
    N = Lp.normalizer_mask(exp.R)
    psi = exp.psi
    ok = to_mask(psi.tolist()) == N and len(set(psi.tolist())) == M.n
    wit = None
    if ok:
        for a in range(M.n):
            for b in range(M.n):
                if int(Lp.pg.pair[psi[a], psi[b]]) != int(psi[int(M.mul[a, b])]):
                    wit = (a, b)
                    break
            if wit:
                break
    rep.add("psi-isomorphism", ok and wit is None, wit)
    # L⁺ restricted to Δ is L: same elements with S_f ∈ Δ, same domain on them
    keep = [f for f in range(Lp.n) if Lp.S_f(f) in L.delta]
    same = keep == list(range(L.n))
    rep.add("restriction-is-L", same, None if same else keep[:8])
    ident_in_nlr = all(int(psi[exp.iota[f]]) == f for f in bits(L.normalizer_mask(exp.R)))
    rep.add("psi-extends-identity-on-N_L(R)", ident_in_nlr)
    return rep


def expand_in_model(L: Locality, R: int, name: str | None = None) -> Expansion:
    """Expansion of a locality built from a group G, with M = N_G(R).

    The ambient system is F_S(G).
    """
    if L.model is None:
        raise ConstructionError("the locality does not come from a group")
    G, elems = L.model
    S_amb = [elems[s] for s in L.S_ids]
    _, F = fusion_system_of_group(G, to_mask(S_amb))
    R_amb = to_mask(S_amb[s] for s in bits(R))
    Mmask = G.normalizer(R_amb)
    M = G.as_group(Mmask, name=f"N({bits(R)})")
    iota = np.full(L.n, -1, dtype=np.int64)
    for f in bits(L.normalizer_mask(R)):
        iota[f] = M.index.get(elems[f], -1)
    exp = expand(L, R, M, iota, F=F, name=name)
    return exp


# ---------------------------------------------------------------------------
# gluing homomorphisms


@dataclass
class GluedHomomorphism:
    phi: np.ndarray  # class id of L⁺ -> element of the target
    report: Report
    kernel: int
    aut_kernel: frozenset
    aut_kernel_phi1: frozenset
    aut_kernel_phi2: frozenset


def _aut_on_R(Loc: Locality, R: int, mask: int) -> frozenset:
    """{c_f|_R : f ∈ N_H(R)} for a subset H (mask) of Loc."""
    out = set()
    for f in bits(mask & Loc.normalizer_mask(R)):
        out.add(tuple(int(Loc.sconj[f, r]) for r in bits(R)))
    return frozenset(out)


def glue_homomorphism(exp: Expansion, target: Locality, phi1, phi2, budget: int = 20000,
                      raise_on_failure: bool = True) -> GluedHomomorphism:
    """Glue φ₁ : L -> L̃ and φ₂ : M -> L̃ agreeing on N_L(R) to φ : L⁺ -> L̃.

    φ is φ₁ on L and sends [x⁻¹, g, y] to Π̃(x⁻¹φ₁, gφ₂, yφ₁).  Also
    compares automizers of R in the kernels of φ, φ₁ and φ₂.
    """
    L, M, R = exp.base, exp.M, exp.R
    Lp = exp.locality
    tpg = target.pg
    phi1 = np.asarray(phi1, dtype=np.int64)
    phi2 = np.asarray(phi2, dtype=np.int64)
    rep = Report()
    nlr = bits(L.normalizer_mask(R))
    agree = all(phi1[f] == phi2[exp.iota[f]] for f in nlr)
    rep.add("phi1-phi2-agree-on-N_L(R)", agree)
    Rt = to_mask(int(phi1[L.S_ids[s]]) for s in bits(R))
    Rt_S = target.L_to_S(Rt)
    ok = popcount(Rt_S) == popcount(Rt) and Rt_S in target.delta
    rep.add("image-of-R-is-an-object", ok, None if ok else bits(Rt))
    w1 = is_homomorphism(L.pg, tpg, phi1, 3, budget)
    w2 = is_homomorphism(_group_pg(M), tpg, phi2, 2, budget)
    rep.add("phi1-homomorphism", w1 is None, w1)
    rep.add("phi2-homomorphism", w2 is None, w2)
    if raise_on_failure and not rep.passed:
        raise GlueError(rep.text())
    # φ on classes, checked on every triple of Θ
    phi = np.full(Lp.n, -1, dtype=np.int64)
    phi[:L.n] = phi1
    wit = None
    for c in range(Lp.n):
        vals = set()
        if c < L.n:
            vals.add(int(phi1[c]))
        for x, g, y in exp.triples(c):
            w = (int(phi1[int(L.pg.inv[x])]), int(phi2[g]), int(phi1[y]))
            if not tpg.in_domain(w):
                wit = ("triple image outside the target domain", (x, g, y))
                break
            vals.add(tpg.product(w))
        if wit:
            break
        if len(vals) != 1:
            wit = ("not constant on a class", c, sorted(vals))
            break
        phi[c] = vals.pop()
    rep.add("phi-well-defined", wit is None, wit, "every triple of Θ")
    if wit is not None:
        if raise_on_failure:
            raise GlueError(str(wit))
        return GluedHomomorphism(phi, rep, 0, frozenset(), frozenset(), frozenset())
    w = is_homomorphism(Lp.pg, tpg, phi, 3, budget)
    rep.add("phi-homomorphism", w is None, w)
    ker = to_mask(c for c in range(Lp.n) if phi[c] == tpg.identity)
    ker1 = to_mask(f for f in range(L.n) if phi1[f] == tpg.identity)
    a_ker = _aut_on_R(Lp, R, ker)
    a_ker1 = _aut_on_R(L, R, ker1)
    # ker φ₂ acts on R inside M
    s2m = {s: int(exp.iota[L.S_ids[s]]) for s in bits(L.Sg.normalizer(R))}
    m2s = {m: s for s, m in s2m.items()}
    a_ker2 = frozenset(
        tuple(m2s[int(M.conj[m, s2m[r]])] for r in bits(R))
        for m in range(M.n) if phi2[m] == tpg.identity
    )
    rep.add("kernel-automizer-matches-phi2", a_ker == a_ker2)
    return GluedHomomorphism(phi, rep, ker, a_ker, a_ker1, a_ker2)


def _group_pg(G: FiniteGroup) -> PartialGroup:
    """A group as a partial group whose domain is every word."""
    succ = np.zeros((1, G.n), dtype=np.int32)
    return PartialGroup(G.labels, G.inv, G.mul, succ, G.identity, name=G.name)


def rigid_isomorphism(exp: Expansion, target: Locality) -> tuple[np.ndarray, Report]:
    """Identify L⁺ with a locality L̃ ⊇ L built from the same group as L.

    Both φ₁ and φ₂ are the inclusions into the ambient group; the glued map
    must be a bijection that is the identity on S, matches the domains on
    every word length and preserves products.
    """
    L = exp.base
    if L.model is None or target.model is None:
        raise ConstructionError("both localities must come from the same group")
    G, elems = L.model
    G2, telems = target.model
    if G2 is not G and not np.array_equal(G.mul, G2.mul):
        raise ConstructionError("the localities come from different groups")
    tid = {g: i for i, g in enumerate(telems)}
    try:
        phi1 = [tid[g] for g in elems]
        phi2 = [tid[g] for g in exp.M.labels]
    except KeyError as exc:
        raise ConstructionError(f"ambient element {exc} is not in the target") from None
    glued = glue_homomorphism(exp, target, phi1, phi2)
    rep = glued.report
    phi = glued.phi
    Lp = exp.locality
    rep.add("bijective", sorted(phi.tolist()) == list(range(target.n)))
    rep.add("identity-on-S", [int(phi[s]) for s in Lp.S_ids] == list(target.S_ids))
    wit = domain_equivalence_witness(Lp.pg, target.pg, phi)
    rep.add("domains-match", wit is None, wit, "all word lengths")
    rep.add("objects-match", Lp.delta == target.delta)
    return phi, rep


# ---------------------------------------------------------------------------
# quotients


@dataclass
class Quotient:
    locality: Locality
    sigma: np.ndarray  # L id -> coset id
    cosets: list  # coset id -> mask of L ids
    report: Report


def quotient(L: Locality, N: int, budget: int = 20000) -> Quotient:
    """L/N over the maximal cosets of a partial normal subgroup N.

    Objects are the images of Δ; the domain is read off lifted conjugation
    edges and checked to be deterministic.
    """
    pg = L.pg
    if isinstance(N, PartialSubgroup):
        N = N.mask
    if not is_partial_subgroup(pg, N) or not is_partial_normal(pg, N):
        raise NotPartialNormal(bits(N))
    rep = Report()
    ns = bits(N)
    cos = []
    for f in range(pg.n):
        col = pg.pair[ns, f]
        cos.append(to_mask(int(v) for v in col if v >= 0))
    maximal = sorted({c for c in cos if not any(c != d and c & ~d == 0 for d in cos)})
    covered = 0
    part = True
    for c in maximal:
        part &= (covered & c) == 0
        covered |= c
    part &= covered == pg.full_mask
    rep.add("maximal-cosets-partition", part)
    if not part:
        raise ConstructionError("maximal cosets do not partition L")
    maximal.sort(key=lambda c: bits(c)[0])
    sigma = np.full(pg.n, -1, dtype=np.int64)
    for i, c in enumerate(maximal):
        sigma[bits(c)] = i
    m = len(maximal)
    inv = np.full(m, -1, dtype=np.int64)
    for f in range(pg.n):
        v = sigma[int(pg.inv[f])]
        if inv[sigma[f]] not in (-1, v):
            raise ConstructionError("inversion does not pass to cosets")
        inv[sigma[f]] = v
    one = int(sigma[pg.identity])
    rep.add("N-is-a-coset", maximal[one] == N)

    # S̄ = Sσ
    Sbar_ids = sorted({int(sigma[s]) for s in L.S_ids})
    spos = {c: i for i, c in enumerate(Sbar_ids)}
    table = np.empty((len(Sbar_ids), len(Sbar_ids)), dtype=np.int32)
    for a in L.S_ids:
        for b in L.S_ids:
            table[spos[int(sigma[a])], spos[int(sigma[b])]] = spos[int(sigma[int(pg.pair[a, b])])]
    Sbar = FiniteGroup(Sbar_ids, table, name="S/T")

    def img(P):
        return to_mask(spos[int(sigma[L.S_ids[s]])] for s in bits(P))

    objs = sorted({img(P) for P in L.delta.members}, key=Sbar.sort_key)
    oidx = {P: i for i, P in enumerate(objs)}
    succ = np.full((len(objs), m), -1, dtype=np.int32)
    for f in range(pg.n):
        row = L.sconj[f]
        for P in L.delta.members:
            ps = bits(P)
            if all(row[s] >= 0 for s in ps):
                i = oidx[img(P)]
                j = oidx[img(to_mask(int(row[s]) for s in ps))]
                c = int(sigma[f])
                if succ[i, c] not in (-1, j):
                    raise ConstructionError("quotient domain automaton is not deterministic")
                succ[i, c] = j
    pg0 = PartialGroup(list(range(m)), inv, np.zeros((m, m), dtype=np.int32), succ, one)
    d2 = pg0.domain2
    pair = np.full((m, m), -1, dtype=np.int64)
    a, b = np.nonzero(pg.domain2)
    sa, sb, sc = sigma[a], sigma[b], sigma[pg.pair[a, b]]
    for x, y, z in zip(sa.tolist(), sb.tolist(), sc.tolist()):
        if pair[x, y] not in (-1, z):
            raise ConstructionError("products do not pass to cosets")
        pair[x, y] = z
    lifted = pair >= 0
    missing = np.argwhere(d2 & ~lifted)
    extra = np.argwhere(lifted & ~d2)
    rep.add("pairs-lift", len(missing) == 0, missing[0].tolist() if len(missing) else None)
    rep.add("image-of-D-in-domain", len(extra) == 0, extra[0].tolist() if len(extra) else None)
    pair = np.where(d2, pair, -1)
    labels = [tuple(pg.labels[f] for f in bits(c)) for c in maximal]
    qpg = PartialGroup(labels, inv, pair, succ, one, name=f"{L.name or 'L'}/N",
                       state_labels=objs)
    Lq = Locality(qpg, Sbar_ids, ObjectSet(Sbar, objs), L.p, name=qpg.name)
    w = is_homomorphism(pg, qpg, sigma, 3, budget)
    rep.add("projection-homomorphism", w is None, w)
    rep.add("kernel-is-N", to_mask(f for f in range(pg.n) if sigma[f] == one) == N)
    return Quotient(Lq, sigma, maximal, rep)


# ---------------------------------------------------------------------------
# products of partial normal subgroups


def product_pns(L: Locality, M1: int, N1: int) -> int:
    """MN = {Π(m, n) : (m, n) ∈ D} for partial normal subgroups M and N."""
    pg = L.pg
    for X in (M1, N1):
        if not is_partial_subgroup(pg, X) or not is_partial_normal(pg, X):
            raise NotPartialNormal(bits(X))
    ms, ns = bits(M1), bits(N1)
    sub = pg.pair[np.ix_(ms, ns)]
    out = to_mask(int(v) for v in sub[sub >= 0].tolist())
    if not is_partial_subgroup(pg, out) or not is_partial_normal(pg, out):
        raise ConstructionError("product is not a partial normal subgroup")
    T = L.L_to_S(out)
    if T != L.Sg.product_set(L.L_to_S(M1), L.L_to_S(N1)):
        raise ConstructionError("(MN) ∩ S differs from (M ∩ S)(N ∩ S)")
    return out


__all__ = [
    "Expansion", "expand", "expand_in_model", "verify_expansion", "check_expansion_hypotheses",
    "glue_homomorphism", "rigid_isomorphism", "quotient", "product_pns", "Quotient",
    "HypothesisViolation", "ConstructionError", "NotPartialNormal", "GlueError",
]
