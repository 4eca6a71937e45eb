import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from locality_lab.constructions import _group_pg
from locality_lab.groupio import builtin_group
from locality_lab.groups import bits, popcount
from locality_lab.partial_groups import (
    PartialGroup, WordNotInDomain, check_partial_group_axioms, conjugacy_classes,
    conjugate, domain_equivalence_witness, is_homomorphism, is_partial_normal,
    is_partial_subgroup, partial_normal_closure, partial_subgroup_closure,
)
from helpers import loc


def _copy(pg, pair=None, succ=None):
    return PartialGroup(pg.labels, pg.inv, pg.pair.copy() if pair is None else pair,
                        pg.succ.copy() if succ is None else succ, pg.identity)


def test_group_is_partial_group():
    G = builtin_group("s4")
    rep = check_partial_group_axioms(_group_pg(G))
    assert rep.passed, rep.text()


@pytest.mark.parametrize("key", ["s4", "sl23", "d8", "gl32"])
def test_locality_partial_group_axioms(key):
    rep = check_partial_group_axioms(loc(key, "cr-closure").pg)
    assert rep.passed, rep.text()


def test_gl32_domain_is_proper_subset():
    pg = loc("gl32", "cr-closure").pg
    # a genuine partial group: some pairs are not composable
    assert 0 < int(pg.domain2.sum()) < pg.n ** 2


def test_edited_pair_table_fails():
    pg = loc("s4", "subcentric").pg
    pair = pg.pair.copy()
    a, b = 1, 2
    pair[a, b] = (pair[a, b] + 1) % pg.n
    rep = check_partial_group_axioms(_copy(pg, pair=pair))
    assert not rep.passed
    assert rep["contraction-length-3"].witness is not None


def test_pair_outside_domain_detected():
    pg = loc("gl32", "cr-closure").pg
    a, b = map(int, np.argwhere(~pg.domain2)[0])
    pair = pg.pair.copy()
    pair[a, b] = pg.identity
    rep = check_partial_group_axioms(_copy(pg, pair=pair))
    assert rep["pair-table-matches-domain"].witness == (a, b)


def test_products_match_ambient_group():
    L = loc("gl32", "cr-closure")
    G, elems = L.model
    rng = random.Random(3)
    for length in (2, 3, 4, 5):
        for _ in range(200):
            w = L.pg.random_word(length, rng)
            if w is None:
                continue
            amb = elems[w[0]]
            for f in w[1:]:
                amb = int(G.mul[amb, elems[f]])
            assert elems[L.pg.product(w)] == amb


def test_product_outside_domain_raises():
    pg = loc("gl32", "cr-closure").pg
    a, b = map(int, np.argwhere(~pg.domain2)[0])
    with pytest.raises(WordNotInDomain):
        pg.product((a, b))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_inverse_word_cancels(data):
    pg = loc("gl32", "cr-closure").pg
    n = data.draw(st.integers(1, 4))
    w = pg.random_word(n, random.Random(data.draw(st.integers(0, 10 ** 6))))
    if w is None:
        return
    wi = pg.inverse_word(w) + tuple(w)
    assert pg.in_domain(wi)
    assert pg.product(wi) == pg.identity


def test_closures_are_partial_subgroups():
    pg = loc("gl32", "cr-closure").pg
    for x in range(pg.n):
        H = partial_subgroup_closure(pg, [x])
        assert is_partial_subgroup(pg, H.mask)
        N = partial_normal_closure(pg, [x])
        assert is_partial_normal(pg, N.mask)
        assert H <= N


def test_normal_closure_in_group_matches_group():
    G = builtin_group("s4")
    pg = _group_pg(G)
    for x in range(G.n):
        N = partial_normal_closure(pg, [x]).mask
        assert N == G.normal_closure(1 << x)


def test_conjugacy_classes_partition():
    for key in ("s4", "gl32"):
        pg = loc(key, "subcentric").pg
        cls = conjugacy_classes(pg)
        assert sum(popcount(c) for c in cls) == pg.n
        union = 0
        for c in cls:
            assert union & c == 0
            union |= c
    # S4 has five classes of elements
    assert len(conjugacy_classes(loc("s4", "subcentric").pg)) == 5


def test_conjugate_by_identity():
    pg = loc("sl23", "subcentric").pg
    for x in range(pg.n):
        assert conjugate(pg, x, pg.identity) == x


def test_identity_is_homomorphism():
    pg = loc("gl32", "cr-closure").pg
    assert is_homomorphism(pg, pg, list(range(pg.n))) is None


def test_domain_equivalence():
    pg = loc("gl32", "cr-closure").pg
    ident = list(range(pg.n))
    assert domain_equivalence_witness(pg, pg, ident) is None
    G = builtin_group("gl32")
    full = _group_pg(G)
    elems = loc("gl32", "cr-closure").model[1]
    w = domain_equivalence_witness(pg, full, elems)
    assert w is not None and len(w) == 2 and not pg.in_domain(w)


def test_partial_subgroup_needs_identity():
    pg = loc("s4", "subcentric").pg
    others = pg.full_mask & ~(1 << pg.identity)
    assert not is_partial_subgroup(pg, others)
    assert is_partial_subgroup(pg, 1 << pg.identity)
    assert bits(1 << pg.identity) == [pg.identity]
