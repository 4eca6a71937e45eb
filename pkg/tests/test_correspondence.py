import pytest

from locality_lab.correspondence import (
    DeltaRegimeUnsupported, NotProper, enumerate_pns, model_of, normal_subsystems_direct,
    normal_subsystems_from_model, product_subsystems, psi, restriction_compatibility,
    subsystem_lemmas, verify_bijection,
)
from locality_lab.fusion import is_normal_subsystem
from locality_lab.groups import popcount
from helpers import CHAR_P, loc

# number of partial normal subgroups, equal to the number of normal subsystems;
# for groups of characteristic p these are the normal subgroups of G
# containing no p'-part, counted by hand
COUNTS = {"s4": 4, "a4": 3, "sl23": 4, "d8": 6, "q8": 6, "s3": 3, "gl32": 2}


@pytest.mark.parametrize("key", sorted(COUNTS))
@pytest.mark.parametrize("sel", ("quasicentric", "subcentric"))
def test_bijection(key, sel):
    res = verify_bijection(loc(key, sel), oracle="auto")
    assert res.passed, res.report.text()
    assert len(res.pns.subgroups) == len(res.oracle) == COUNTS[key]


@pytest.mark.parametrize("key", CHAR_P)
def test_oracle_routes_agree(key):
    L = loc(key, "subcentric")
    a = normal_subsystems_direct(L.fusion)
    b = normal_subsystems_from_model(L.fusion, *model_of(L), L.p)
    assert a and set(map(_k, a)) == set(map(_k, b))


def _k(E):
    return (E.support, frozenset(E.all_maps()))


@pytest.mark.parametrize("key", CHAR_P)
def test_property_star(key):
    res = verify_bijection(loc(key, "subcentric"))
    assert res.star == "passed"


def test_images_are_normal():
    L = loc("gl32", "subcentric")
    for N in enumerate_pns(L).subgroups:
        assert is_normal_subsystem(L.fusion, psi(L, N))


def test_not_proper_rejected():
    with pytest.raises(NotProper):
        verify_bijection(loc("c2xs3", "subcentric"))


def test_delta_below_quasicentric_rejected():
    with pytest.raises(DeltaRegimeUnsupported):
        verify_bijection(loc("gl32", "cr-closure"))


@pytest.mark.parametrize("key", sorted(COUNTS))
def test_restriction_compatibility(key):
    Lp = loc(key, "subcentric")
    rep = restriction_compatibility(Lp, loc(key, "quasicentric").delta)
    assert rep.passed, rep.text()


@pytest.mark.parametrize("key", sorted(COUNTS))
def test_products(key):
    L = loc(key, "subcentric")
    normal = normal_subsystems_direct(L.fusion)
    for E1 in normal:
        for E2 in normal:
            E = product_subsystems(L, E1, E2, normal)
            assert E1 <= E and E2 <= E
            assert E.support == L.Sg.product_set(E1.support, E2.support)
            assert is_normal_subsystem(L.fusion, E)


@pytest.mark.parametrize("key", sorted(COUNTS))
def test_subsystem_lemmas(key):
    L = loc(key, "subcentric")
    for E in normal_subsystems_direct(L.fusion):
        rep = subsystem_lemmas(L.fusion, E)
        assert rep.passed, rep.text()


def test_pns_audit():
    for key in ("s4", "gl32"):
        pns = enumerate_pns(loc(key, "subcentric"), audit_bound=120)
        assert pns.audit.startswith("passed")
        # the whole locality and the trivial subgroup are always there
        sizes = sorted(popcount(N) for N in pns.subgroups)
        assert sizes[0] == 1 and sizes[-1] == loc(key, "subcentric").n
