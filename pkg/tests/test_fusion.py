import pytest

from locality_lab.fusion import (
    NonInjectiveSeed, NotSaturated, center_of, generate_fusion_system, group_fusion_direct,
    inner_system, is_F_closed, is_normal_subsystem, is_saturated, is_strongly_closed,
    o_p, restriction_to, saturation_witness, subgroup_classes,
)
from locality_lab.groups import PermGroup, popcount
from helpers import setup

# (|S|, subgroups of S, F-classes, |F^c|, |F^cr|, |F^q|, |F^s|, |O_p(F)|, |Z(S)|)
# checked by hand from the subgroup lattices of D8, Q8, V4 and C3
FACTS = {
    "s4": (8, 10, 7, 4, 2, 9, 10, 4, 2),
    "a4": (4, 5, 3, 1, 1, 4, 5, 4, 4),
    "sl23": (8, 6, 4, 4, 1, 4, 6, 8, 2),
    "d8": (8, 10, 8, 4, 1, 10, 10, 8, 2),
    "q8": (8, 6, 6, 4, 1, 6, 6, 8, 2),
    "s3": (3, 2, 2, 1, 1, 1, 2, 3, 3),
    "c2xs3": (4, 5, 5, 1, 1, 5, 5, 4, 4),
    "gl32": (8, 10, 6, 4, 3, 9, 9, 1, 2),
}


@pytest.mark.parametrize("key", sorted(FACTS))
def test_frozen_class_counts(key):
    G, p, S, Sg, F = setup(key)
    cl = subgroup_classes(F)
    got = (Sg.n, len(Sg.subgroups()), len(F.classes), len(cl["centric"]),
           len(cl["centric_radical"]), len(cl["quasicentric"]), len(cl["subcentric"]),
           popcount(o_p(F)), popcount(Sg.center()))
    assert got == FACTS[key]


@pytest.mark.parametrize("key", sorted(FACTS))
def test_generated_matches_direct_listing(key):
    G, p, S, Sg, F = setup(key)
    _, F2 = group_fusion_direct(G, S)
    assert F == F2


@pytest.mark.parametrize("key", sorted(FACTS))
def test_group_systems_saturated(key):
    F = setup(key)[4]
    assert saturation_witness(F) is None


@pytest.mark.parametrize("key", sorted(FACTS))
def test_class_containments(key):
    F = setup(key)[4]
    cl = subgroup_classes(F)
    assert cl["centric_radical"] <= cl["centric"] <= cl["quasicentric"] <= cl["subcentric"]
    for name in ("centric", "quasicentric", "subcentric"):
        assert is_F_closed(F, cl[name])


def _v4():
    V = PermGroup.from_cycles(["(1 2)", "(3 4)"], 4, name="V4")
    a, b = V.id_of_cycles("(1 2)"), V.id_of_cycles("(3 4)")
    return V, a, b


def test_swap_on_v4_not_saturated():
    V, a, b = _v4()
    swap = list(range(V.n))
    swap[a], swap[b] = b, a
    F = generate_fusion_system(V, [tuple(swap)])
    assert not is_saturated(F)
    assert saturation_witness(F)[0] == "not fully automized"
    with pytest.raises(NotSaturated):
        subgroup_classes(F)


def test_order_three_on_v4_saturated():
    V, a, b = _v4()
    c = V.prod(a, b)
    rot = list(range(V.n))
    rot[a], rot[b], rot[c] = b, c, a
    F = generate_fusion_system(V, [tuple(rot)])
    assert is_saturated(F)
    assert [len(c) for c in F.classes] == [1, 3, 1]


def test_non_injective_seed_rejected():
    V, a, b = _v4()
    bad = [V.identity] * V.n
    with pytest.raises(NonInjectiveSeed):
        generate_fusion_system(V, [tuple(bad)])


def test_inner_system_is_normal_in_itself():
    Sg = setup("d8")[3]
    F = inner_system(Sg)
    assert F == setup("d8")[4]
    assert is_normal_subsystem(F, F)


def test_strongly_closed():
    G, p, S, Sg, F = setup("s4")
    # O_2(S4) = V4 is strongly closed, a reflection subgroup of order 2 is not
    V = o_p(F)
    assert popcount(V) == 4 and is_strongly_closed(F, V)
    two = [P for P in Sg.subgroups() if popcount(P) == 2 and P & ~V]
    assert two and not any(is_strongly_closed(F, P) for P in two)


def test_centers():
    for key in ("d8", "q8"):
        Sg, F = setup(key)[3:]
        assert center_of(F) == Sg.center()
    # the 3-cycles of A4 move every involution
    assert popcount(center_of(setup("a4")[4])) == 1
    # fusion in SL(2,3) centralizes Z(Q8); in GL(3,2) nothing is central
    assert center_of(setup("sl23")[4]) == setup("sl23")[3].center()
    assert popcount(center_of(setup("gl32")[4])) == 1


def test_restriction_to_centric_gives_back_F():
    for key in ("s4", "gl32"):
        F = setup(key)[4]
        assert restriction_to(F, subgroup_classes(F)["centric"]) == F
