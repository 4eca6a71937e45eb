import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.combinatorics import Permutation as SPerm
from sympy.combinatorics import PermutationGroup as SGroup

from locality_lab.groupio import BATTERY, EXTRA, builtin_group, builtin_record
from locality_lab.groups import (
    ElementNotInGroup,
    Perm,
    PermGroup,
    SizeBoundExceeded,
    Subgroup,
    big_o_p,
    bits,
    conjugate_subgroup,
    is_characteristic_p,
    normal_subgroups,
    normalizer,
    o_super_p,
    popcount,
    sylow_p,
)
from helpers import prime


def sympy_group(key):
    rec = builtin_record(key)
    gens = [SPerm(list(g.images)) for g in rec.gens]
    return SGroup(gens)


def test_perm_parsing_and_product():
    a = Perm.from_cycles("(1 2 3)", 4)
    b = Perm.from_cycles("(1 2)", 4)
    assert a.images == (1, 2, 0, 3)
    # a first, then b
    assert (a * b).images == tuple(b.images[i] for i in a.images)
    assert (a * a.inverse()) == Perm.identity(4)
    assert a.cycles() == "(1 2 3)"
    assert Perm.from_cycles("()", 3) == Perm.identity(3)


@pytest.mark.parametrize("text", ["(1 2", "(1 1)", "(0 1)", "(1 5)", "x"])
def test_perm_rejects_bad_cycles(text):
    with pytest.raises(ValueError):
        Perm.from_cycles(text, 4)


@pytest.mark.parametrize("key", BATTERY + EXTRA)
def test_order_and_sylow_match_sympy(key):
    G = builtin_group(key)
    H = sympy_group(key)
    p = prime(key)
    assert G.n == H.order()
    S = G.sylow(p)
    assert popcount(S) == H.sylow_subgroup(p).order()
    assert G.is_subgroup(S)
    assert popcount(G.center()) == H.center().order()
    assert G.is_abelian() == H.is_abelian


@pytest.mark.parametrize("key", BATTERY + EXTRA)
def test_sylow_count_matches_sympy(key):
    G = builtin_group(key)
    H = sympy_group(key)
    p = prime(key)
    P = H.sylow_subgroup(p)
    pe = list(P.generate())
    conjugates = {frozenset((g ** -1) * x * g for x in pe) for g in H.generate()}
    assert len(G.sylow_conjugates(p)) == len(conjugates)


def test_s4_frozen_facts():
    G = builtin_group("s4")
    assert [popcount(N) for N in G.normal_subgroups()] == [1, 4, 12, 24]
    V4 = G.big_o_p(2)
    assert popcount(V4) == 4
    assert G.centralizer(V4) == V4
    assert popcount(G.o_super_p(2)) == 12
    assert len(G.subgroups()) == 30
    assert G.is_characteristic_p(2)


def test_other_frozen_facts():
    assert len(builtin_group("q8").normal_subgroups()) == 6
    sl = builtin_group("sl23")
    Q = sl.as_group(sl.sylow(2))
    # Q8: one involution, non-abelian
    assert sum(1 for g in range(8) if Q.element_order(g) == 2) == 1
    assert not Q.is_abelian()
    assert not builtin_group("c2xs3").is_characteristic_p(2)
    assert len(builtin_group("gl32").normal_subgroups()) == 2
    assert len(builtin_group("a4").subgroups()) == 10


def _brute_subgroups(G):
    from itertools import combinations

    out = set()
    for a, b in combinations(range(G.n), 2):
        out.add(G.generate([a, b]))
    for a in range(G.n):
        out.add(G.generate([a]))
    return out


@pytest.mark.parametrize("key", ["s4", "a4", "d8", "q8", "s3", "sl23"])
def test_subgroup_lattice_against_two_generator_closure(key):
    # every subgroup of these groups is generated by two elements
    G = builtin_group(key)
    assert set(G.subgroups()) == _brute_subgroups(G)


def test_normal_subgroups_match_sympy_counts():
    for key in ("s4", "a4", "d8", "q8", "s3"):
        G = builtin_group(key)
        H = sympy_group(key)
        # a subgroup is normal iff it is a union of conjugacy classes and a subgroup
        normal = [N for N in G.subgroups() if G.is_normal(N)]
        assert sorted(map(popcount, normal)) == sorted(map(popcount, G.normal_subgroups()))
        assert len(H.conjugacy_classes()) == len(G.conjugacy_classes())


def test_operation_api():
    G = builtin_group("s4")
    P = sylow_p(G, 2)
    assert P.order == 8
    assert normalizer(G, P) == P
    assert big_o_p(G, 2).order == 4
    assert o_super_p(G, 2).order == 12
    assert is_characteristic_p(G, 2)
    assert [N.order for N in normal_subgroups(G)] == [1, 4, 12, 24]
    Q = conjugate_subgroup(P, 5)
    assert Q.order == 8 and Q <= Subgroup(G, G.full_mask)
    with pytest.raises(ElementNotInGroup):
        conjugate_subgroup(P, 99)


def test_size_bound(monkeypatch):
    monkeypatch.setenv("LOCALITY_LAB_MAX_ORDER", "10")
    with pytest.raises(SizeBoundExceeded):
        PermGroup.from_cycles(["(1 2 3 4)", "(1 2)"], 4)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 23), st.integers(0, 23), st.integers(0, 23))
def test_group_table_properties(a, b, c):
    G = builtin_group("s4")
    m = G.mul
    assert m[m[a, b], c] == m[a, m[b, c]]
    assert m[a, G.inv[a]] == G.identity
    # conjugation is a right action
    assert G.conj[m[a, b], c] == G.conj[b, G.conj[a, c]]
    # perm product agrees with the table
    assert G.perm(a) * G.perm(b) == G.perm(int(m[a, b]))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["s4", "sl23", "gl32", "a4"]), st.data())
def test_normalizer_contains_subgroup(key, data):
    G = builtin_group(key)
    subs = G.subgroups()
    H = data.draw(st.sampled_from(subs))
    N = G.normalizer(H)
    assert H & ~N == 0
    assert G.is_normal(H, N)
    C = G.centralizer(H)
    assert C & ~N == 0
    assert all(G.conj[g, x] == x for g in bits(C) for x in bits(H))
