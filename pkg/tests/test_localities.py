import pytest

from locality_lab.groups import bits, popcount
from locality_lab.localities import (
    NotASubObjectSet, ObjectSet, alperin_decompose, build_locality_from_group,
    check_all, check_locality_axioms, gamma_locality, is_proper, locality_properties,
    pns_sylow_conjugation, proper_witness, restrict,
)
from locality_lab.partial_groups import conjugacy_classes, partial_normal_closure
from helpers import BATTERY, SELECTORS, loc, setup

# |L| for cr-closure, F^q, F^s
SIZES = {
    "s4": (24, 24, 24),
    "a4": (12, 12, 12),
    "sl23": (24, 24, 24),
    "d8": (8, 8, 8),
    "q8": (8, 8, 8),
    "s3": (6, 6, 6),
    "c2xs3": (4, 12, 12),
    "gl32": (40, 104, 104),
}


@pytest.mark.parametrize("key", sorted(SIZES))
def test_sizes(key):
    assert tuple(loc(key, sel).n for sel in SELECTORS) == SIZES[key]


def test_gl32_f_sub_c_locality_by_hand():
    # the cr-closure is {S and its two Klein fours}: |N_G(S)| + 2(|S4| - |D8|) = 8 + 32
    L = loc("gl32", "cr-closure")
    assert sorted(popcount(P) for P in L.delta) == [4, 4, 8]
    assert L.n == 8 + 2 * (24 - 8)


@pytest.mark.parametrize("key", BATTERY + ("gl32",))
@pytest.mark.parametrize("sel", SELECTORS)
def test_axioms(key, sel):
    rep = check_all(loc(key, sel))
    assert rep.passed, rep.text()


@pytest.mark.parametrize("key", BATTERY + ("gl32",))
def test_properties(key):
    rep = locality_properties(loc(key, "subcentric"))
    assert rep.passed, rep.text()


def test_proper():
    for key in BATTERY + ("gl32",):
        assert is_proper(loc(key, "subcentric"))
    wit = proper_witness(loc("c2xs3", "subcentric"))
    assert wit[0] == "normalizer not of characteristic p"


def test_removed_overgroup_fails_l3():
    L = loc("s4", "subcentric")
    S_full = L.Sg.full_mask
    L2 = build_locality_from_group(*setup("s4")[:2], "subcentric", S_mask=setup("s4")[2],
                                   F=setup("s4")[4])
    L2.delta = ObjectSet(L.Sg, L.delta.members - {S_full})
    rep = check_locality_axioms(L2)
    assert not rep["L3-overgroups-of-conjugates"].passed
    assert rep["L3-overgroups-of-conjugates"].witness[2] == bits(S_full)


def test_restrict_matches_direct_build():
    for key in ("s4", "gl32"):
        big = loc(key, "subcentric")
        small = loc(key, "cr-closure")
        R = restrict(big, small.delta)
        assert R.n == small.n
        amb_big = big.model[1]
        assert sorted(amb_big[f] for f in R.parent_ids) == sorted(small.model[1])
        assert check_all(R).passed


def test_restrict_rejects_non_closed():
    L = loc("gl32", "subcentric")
    P = next(P for P in L.delta.sorted() if popcount(P) == 2)
    with pytest.raises(NotASubObjectSet):
        restrict(L, [P])


@pytest.mark.parametrize("key", ("s4", "gl32"))
def test_alperin_decomposition(key):
    L = loc(key, "cr-closure")
    for f in range(L.n):
        parts = alperin_decompose(L, f)
        w = tuple(g for _, g in parts)
        assert L.pg.product(w) == f
        for Q, g in parts:
            assert Q in L.delta and (L.normalizer_mask(Q) >> g) & 1


@pytest.mark.parametrize("key", ("s4", "sl23", "gl32"))
def test_pns_give_localities(key):
    L = loc(key, "subcentric")
    for c in conjugacy_classes(L.pg):
        N = partial_normal_closure(L.pg, c).mask
        assert pns_sylow_conjugation(L, N) is None
        Lg = gamma_locality(L, N)
        assert Lg.n == popcount(N)
        assert check_all(Lg).passed
