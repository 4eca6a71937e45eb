"""Partial normal subgroups of a locality and normal subsystems of its fusion system.

For a proper locality (L, Δ, S) with F^q ⊆ Δ ⊆ F^s the map

    Ψ : N ↦ F_{S∩N}(N)

is compared against an independent list of normal subsystems of F, built
either from a model of F or directly from F.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from locality_lab.constructions import product_pns
from locality_lab.fusion import (
    FusionSystem,
    compose,
    cs_of_subsystem,
    generate_fusion_system,
    group_fusion_direct,
    img_mask,
    invert,
    is_strongly_closed,
    normality_witness,
)
from locality_lab.groups import FiniteGroup, bits, popcount, to_mask
from locality_lab.localities import Locality, proper_witness, restrict
from locality_lab.partial_groups import (
    PartialSubgroup,
    Report,
    conjugacy_classes,
    is_partial_normal,
    is_partial_subgroup,
    partial_normal_closure,
)


class CorrespondenceError(Exception):
    pass


class DeltaRegimeUnsupported(CorrespondenceError):
    pass


class NotProper(CorrespondenceError):
    pass


class ImageNotNormal(CorrespondenceError):
    pass


class LiftNotFound(CorrespondenceError):
    pass


class NotARestriction(CorrespondenceError):
    pass


class ModelMismatch(CorrespondenceError):
    pass


class OracleTooLarge(CorrespondenceError):
    pass


# ---------------------------------------------------------------------------
# partial normal subgroups


@dataclass
class PNSList:
    subgroups: list  # masks of L ids, sorted by size then ids
    audit: str  # "passed", "failed ...", or "skipped ..."
    supports: dict = field(default_factory=dict)  # mask -> T = N ∩ S


def enumerate_pns(L: Locality, audit_bound: int = 60, max_classes: int = 18) -> PNSList:
    """All partial normal subgroups of L.

    Breadth-first: from each partial normal subgroup found so far, add one
    conjugacy class and take the partial normal closure.  When |L| is at
    most ``audit_bound`` the result is audited against every union of
    conjugacy classes that is a partial normal subgroup.
    """
    pg = L.pg
    classes = conjugacy_classes(pg)
    start = partial_normal_closure(pg, 1 << pg.identity).mask
    found = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for N in frontier:
            for c in classes:
                if c & ~N == 0:
                    continue
                N2 = partial_normal_closure(pg, N | c).mask
                if N2 not in found:
                    found.add(N2)
                    nxt.append(N2)
        frontier = nxt
    out = sorted(found, key=lambda m: (popcount(m), bits(m)))
    for N in out:
        T = L.L_to_S(N)
        if not is_strongly_closed(L.fusion, T):
            raise CorrespondenceError(f"N ∩ S is not strongly closed for {bits(N)}")
    audit = "skipped: |L| above the audit bound"
    if pg.n <= audit_bound:
        if len(classes) > max_classes:
            audit = f"skipped: {len(classes)} conjugacy classes"
        else:
            naive = set()
            ident = [c for c in classes if (c >> pg.identity) & 1][0]
            rest = [c for c in classes if c != ident]
            for r in range(len(rest) + 1):
                for combo in itertools.combinations(rest, r):
                    m = ident
                    for c in combo:
                        m |= c
                    if is_partial_subgroup(pg, m) and is_partial_normal(pg, m):
                        naive.add(m)
            audit = "passed" if naive == found else \
                f"failed: {len(naive)} by unions of classes, {len(found)} by closure"
    return PNSList(out, audit, {N: L.L_to_S(N) for N in out})


# ---------------------------------------------------------------------------
# Ψ


def _check_regime(L: Locality):
    cl = L.classes
    if not (cl["quasicentric"] <= L.delta.members <= cl["subcentric"]):
        raise DeltaRegimeUnsupported("Δ must satisfy F^q ⊆ Δ ⊆ F^s")


def psi(L: Locality, N) -> FusionSystem:
    """Ψ(N) = F_{S∩N}(N), checked to be normal in F_S(L)."""
    _check_regime(L)
    mask = N.mask if isinstance(N, PartialSubgroup) else N
    if not is_partial_subgroup(L.pg, mask) or not is_partial_normal(L.pg, mask):
        raise CorrespondenceError("not a partial normal subgroup")
    E = L.fusion_of_partial_subgroup(mask)
    wit = normality_witness(L.fusion, E)
    if wit is not None:
        raise ImageNotNormal(wit)
    return E


# ---------------------------------------------------------------------------
# normal subsystems, two independent routes


def normal_subsystems_from_model(F: FusionSystem, G: FiniteGroup, S_mask: int, p: int) -> list:
    """F_{S∩N}(N) for N ⊴ G, where G is a model of F (characteristic p)."""
    if not G.is_characteristic_p(p):
        raise ModelMismatch("the group is not of characteristic p")
    S0, FG = group_fusion_direct(G, S_mask)
    if S0.labels != F.S.labels or FG != F:
        raise ModelMismatch("the group does not realize F")
    out = []
    for N in G.normal_subgroups():
        _, E = group_fusion_direct(G, S_mask, N_mask=N)
        if E not in out and normality_witness(F, E) is None:
            out.append(E)
    return sorted(out, key=lambda E: (popcount(E.support), E.size))


def normal_subsystems_direct(F: FusionSystem, limit: int = 5000) -> list:
    """Normal subsystems found from F alone.

    For each strongly closed T and each choice of normal subgroups
    A_P ⊴ Aut_F(P) containing Aut_T(P), one per F-class of subgroups of T,
    generate the system from the transported A_P and keep it if it is normal.
    Every normal E over T arises this way, since Aut_E(P) ⊴ Aut_F(P) for P
    fully normalized and E is generated by such automizers (Alperin).
    """
    S = F.S
    out = []
    for T in F.subgroups:
        if not is_strongly_closed(F, T):
            continue
        reps = [cls for cls in F.classes if cls[0] & ~T == 0]
        options = []
        for cls in reps:
            P = max(cls, key=lambda Q: popcount(F.normalizer_in_support(Q)))
            A = F.aut_group(P)
            autT = {tuple(F.inner(t, P)) for t in bits(S.normalizer(P, T))}
            need = to_mask(A.index[a] for a in autT)
            opts = [Nm for Nm in A.normal_subgroups() if need & ~Nm == 0]
            options.append((P, cls, [[A.labels[i] for i in bits(Nm)] for Nm in opts]))
        total = 1
        for _, _, o in options:
            total *= len(o)
        if total > limit:
            raise OracleTooLarge(f"{total} automizer choices over {bits(T)}")
        for choice in itertools.product(*[o for _, _, o in options]):
            seeds = set()
            for (P, cls, _), auts in zip(options, choice):
                for Q in cls:
                    for iso in F.maps.get(P, ()):
                        if img_mask(iso) != Q:
                            continue
                        back = invert(iso)
                        for a in auts:
                            seeds.add(compose(compose(back, a), iso))
            E = generate_fusion_system(S, seeds, T)
            if any(set(E.aut(P)) != set(auts) for (P, _, _), auts in zip(options, choice)):
                continue
            if E not in out and normality_witness(F, E) is None:
                out.append(E)
    return sorted(out, key=lambda E: (popcount(E.support), E.size))


def enumerate_normal_subsystems(F: FusionSystem, model=None, p: int | None = None,
                                limit: int = 5000) -> list:
    """Normal subsystems of F; via a model (G, S_mask) when given, else from F alone."""
    if model is not None:
        G, S_mask = model
        return normal_subsystems_from_model(F, G, S_mask, p)
    return normal_subsystems_direct(F, limit)


def model_of(L: Locality):
    """(G, S_mask) when L comes from a group G of characteristic p, else None."""
    if L.model is None:
        return None
    G, elems = L.model
    if not G.is_characteristic_p(L.p):
        return None
    return G, to_mask(elems[s] for s in L.S_ids)


# ---------------------------------------------------------------------------
# the bijection


@dataclass
class BijectionResult:
    report: Report
    pns: PNSList
    images: list  # Ψ(N) in the order of pns.subgroups
    oracle: list
    oracle_route: str
    star: str = ""  # property (*): "passed", "failed ...", or "skipped ..."

    @property
    def passed(self) -> bool:
        return self.report.passed


def verify_bijection(L: Locality, audit_bound: int = 60, oracle: str = "auto",
                     limit: int = 5000) -> BijectionResult:
    """Check that Ψ is an inclusion-preserving bijection onto the normal subsystems.

    ``oracle`` is "model", "direct" or "auto" (model when one of
    characteristic p is at hand, else direct).  Both routes are run and
    compared when ``oracle`` is "both".
    """
    wit = proper_witness(L)
    if wit is not None:
        raise NotProper(wit)
    _check_regime(L)
    F = L.fusion
    pns = enumerate_pns(L, audit_bound)
    images = [psi(L, N) for N in pns.subgroups]
    model = model_of(L)
    if oracle == "auto":
        oracle = "model" if model is not None else "direct"
    if oracle == "model":
        if model is None:
            raise ModelMismatch("no model of characteristic p")
        normal = normal_subsystems_from_model(F, *model, L.p)
    elif oracle == "direct":
        normal = normal_subsystems_direct(F, limit)
    elif oracle == "both":
        normal = normal_subsystems_direct(F, limit)
        if model is not None:
            other = normal_subsystems_from_model(F, *model, L.p)
            if sorted(map(_sys_key, other)) != sorted(map(_sys_key, normal)):
                raise CorrespondenceError("the two oracle routes disagree")
    else:
        raise ValueError(f"unknown oracle {oracle!r}")
    rep = Report()
    rep.add("pns-audit", not pns.audit.startswith("failed"), None, pns.audit)
    # injective
    wit = None
    for i, j in itertools.combinations(range(len(images)), 2):
        if images[i] == images[j]:
            wit = (bits(pns.subgroups[i]), bits(pns.subgroups[j]))
            break
    rep.add("injective", wit is None, wit)
    # onto the oracle list
    got = {_sys_key(E) for E in images}
    want = {_sys_key(E) for E in normal}
    rep.add("surjective", got == want,
            None if got == want else {"missing": len(want - got), "extra": len(got - want)},
            f"{len(want)} normal subsystems")
    # inclusion in both directions
    w1 = w2 = None
    for i, j in itertools.permutations(range(len(images)), 2):
        Ni, Nj = pns.subgroups[i], pns.subgroups[j]
        if Ni & ~Nj == 0 and not images[i] <= images[j] and w1 is None:
            w1 = (bits(Ni), bits(Nj))
        if images[i] <= images[j] and Ni & ~Nj and w2 is None:
            w2 = (bits(Ni), bits(Nj))
    rep.add("inclusion-preserving", w1 is None, w1)
    rep.add("inclusion-reflecting", w2 is None, w2)
    # uniqueness: same T with TC_S(T) ∈ Δ forces different systems
    S = L.Sg
    wit = None
    for i, j in itertools.combinations(range(len(images)), 2):
        T = pns.supports[pns.subgroups[i]]
        if T != pns.supports[pns.subgroups[j]]:
            continue
        if S.join(T, S.centralizer(T)) in L.delta and images[i] == images[j]:
            wit = (bits(pns.subgroups[i]), bits(pns.subgroups[j]))
            break
    rep.add("uniqueness", wit is None, wit)
    res = BijectionResult(rep, pns, images, normal, oracle)
    res.star = property_star(L, pns)
    return res


def _sys_key(E: FusionSystem):
    return (E.support, frozenset(E.maps.items()))


def property_star(L: Locality, pns: PNSList | None = None) -> str:
    """For E ⊴ F: P₁ ∈ E^c and P₂ ∈ C_F(E)^c give P₁P₂ ∈ Δ.

    C_F(E) is read off a model: E = F_T(N) with N ⊴ G gives
    C_F(E) = F_{C_S(N)}(C_G(N)), used only when C_S(N) = C_S(E).
    """
    from locality_lab.fusion import subgroup_classes

    model = model_of(L)
    if model is None:
        return "skipped: no model of characteristic p"
    G, S_mask = model
    F = L.fusion
    S = L.Sg
    pos = {g: i for i, g in enumerate(S.labels)}
    for N in G.normal_subgroups():
        _, E = group_fusion_direct(G, S_mask, N_mask=N)
        if normality_witness(F, E) is not None:
            continue
        CG = G.centralizer(N)
        CS_amb = CG & S_mask
        CS = to_mask(pos[g] for g in bits(CS_amb))
        if cs_of_subsystem(F, E) != CS:
            return "skipped: C_S(N) and C_S(E) differ for a normal subgroup"
        _, C = group_fusion_direct(G, S_mask, N_mask=CG)
        Ec = subgroup_classes(E)["centric"]
        Cc = subgroup_classes(C)["centric"]
        for P1 in Ec:
            for P2 in Cc:
                if S.join(P1, P2) not in L.delta:
                    return f"failed: {bits(P1)} {bits(P2)}"
    return "passed"


def subsystem_lemmas(F: FusionSystem, E: FusionSystem) -> Report:
    """Centre and centralizer facts for a normal subsystem E over T.

    Z(E) ⊴ F and C_S(E) ∩ T = Z(E); when C_S(E) ≤ T also C_S(E) = Z(E),
    E^s ⊆ F^s and E^c ⊆ F^q.
    """
    from locality_lab.fusion import center_of, is_normal_subgroup, subgroup_classes

    rep = Report()
    T = E.support
    Z = center_of(E)
    CS = cs_of_subsystem(F, E)
    rep.add("Z(E)-normal-in-F", is_normal_subgroup(F, Z), None, f"|Z(E)|={popcount(Z)}")
    rep.add("C_S(E)∩T-is-Z(E)", CS & T == Z, None if CS & T == Z else (bits(CS & T), bits(Z)))
    if CS & ~T:
        rep.add("C_S(E)-in-T-consequences", True, None, "skipped: C_S(E) not inside T")
        return rep
    ce, cf = subgroup_classes(E), subgroup_classes(F)
    rep.add("C_S(E)-is-Z(E)", CS == Z)
    bad = sorted(ce["subcentric"] - cf["subcentric"])
    rep.add("E^s-in-F^s", not bad, bad[0] if bad else None)
    bad = sorted(ce["centric"] - cf["quasicentric"])
    rep.add("E^c-in-F^q", not bad, bad[0] if bad else None)
    return rep


# ---------------------------------------------------------------------------
# restriction and products


def phi_restrict(Lplus: Locality, L: Locality, Nplus: int) -> int:
    """Φ(N⁺) = N⁺ ∩ L, as a mask of ids of L (a restriction of L⁺)."""
    if L.parent_ids is None or not L.delta <= Lplus.delta:
        raise NotARestriction("L is not a restriction of L⁺")
    out = to_mask(i for i, f in enumerate(L.parent_ids) if (Nplus >> f) & 1)
    if not is_partial_subgroup(L.pg, out) or not is_partial_normal(L.pg, out):
        raise CorrespondenceError("N⁺ ∩ L is not partial normal in L")
    return out


def restriction_compatibility(Lplus: Locality, delta, audit_bound: int = 60) -> Report:
    """Φ : N⁺ ↦ N⁺ ∩ L is an inclusion-preserving bijection with Ψ_L ∘ Φ = Ψ_{L⁺}."""
    L = restrict(Lplus, delta)
    rep = Report()
    plus = enumerate_pns(Lplus, audit_bound).subgroups
    small = enumerate_pns(L, audit_bound).subgroups
    images = [phi_restrict(Lplus, L, N) for N in plus]
    rep.add("phi-bijective", sorted(images) == sorted(small) and len(set(images)) == len(images))
    wit = None
    for i, j in itertools.permutations(range(len(plus)), 2):
        a = plus[i] & ~plus[j] == 0
        b = images[i] & ~images[j] == 0
        if a != b:
            wit = (bits(plus[i]), bits(plus[j]))
            break
    rep.add("phi-inclusion-both-ways", wit is None, wit)
    wit = None
    for N, n in zip(plus, images):
        if psi(Lplus, N) != psi(L, n):
            wit = bits(N)
            break
    rep.add("psi-commutes-with-phi", wit is None, wit)
    return rep


def product_subsystems(L: Locality, E1: FusionSystem, E2: FusionSystem,
                       normal: list | None = None) -> FusionSystem:
    """E₁E₂ = Ψ(N₁N₂) for the partial normal subgroups N_i with Ψ(N_i) = E_i.

    Checks that the result is the smallest normal subsystem over S₁S₂
    containing E₁ and E₂.
    """
    pns = enumerate_pns(L, audit_bound=0).subgroups
    lifts = []
    for E in (E1, E2):
        hits = [N for N in pns if psi(L, N) == E]
        if not hits:
            raise LiftNotFound("no partial normal subgroup maps to the subsystem")
        lifts.append(hits[0])
    MN = product_pns(L, *lifts)
    E = psi(L, MN)
    S = L.Sg
    T = S.product_set(E1.support, E2.support)
    if E.support != T:
        raise CorrespondenceError("support of the product is not S₁S₂")
    normal = normal if normal is not None else [psi(L, N) for N in pns]
    for D in normal:
        if D.support == T and E1 <= D and E2 <= D and not E <= D:
            raise CorrespondenceError("product is not the smallest normal subsystem over S₁S₂")
    return E


__all__ = [
    "enumerate_pns", "psi", "verify_bijection", "enumerate_normal_subsystems",
    "normal_subsystems_from_model", "normal_subsystems_direct", "phi_restrict",
    "restriction_compatibility", "product_subsystems", "property_star", "model_of",
    "subsystem_lemmas",
    "DeltaRegimeUnsupported", "NotProper", "ImageNotNormal", "LiftNotFound",
    "NotARestriction", "ModelMismatch", "OracleTooLarge", "CorrespondenceError",
]
