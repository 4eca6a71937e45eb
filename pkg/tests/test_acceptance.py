"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The battery is S4, A4, SL(2,3), D8, Q8 at p = 2 and S3 at p = 3.  All are of
characteristic p, so the characteristic-p criteria run on every member.
"""

import time

import pytest

from locality_lab.constructions import expand_in_model, quotient, rigid_isomorphism, verify_expansion
from locality_lab.correspondence import (
    enumerate_pns, model_of, normal_subsystems_from_model, product_subsystems,
    restriction_compatibility, subsystem_lemmas, verify_bijection,
)
from locality_lab.fusion import is_normal_subsystem
from locality_lab.groups import bits
from locality_lab.localities import (
    ObjectSet, check_all, check_locality_axioms, locality_properties, proper_witness, restrict,
)
from locality_lab.partial_groups import PartialGroup, check_partial_group_axioms
from helpers import BATTERY, CHAR_P, SELECTORS, loc, setup

ALL = [(k, s) for k in BATTERY for s in SELECTORS]


@pytest.fixture
def verdict(capsys):
    def emit(n, failures, detail=""):
        ok = not failures
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f" ({detail})"
        if failures:
            line += f" first failure: {failures[0]}"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return emit


def test_criterion_1_axioms(verdict):
    t = time.perf_counter()
    bad = []
    for key, sel in ALL:
        rep = check_all(loc(key, sel))
        if not rep.passed:
            bad.append((key, sel, [r.line() for r in rep.failures()]))
    dt = time.perf_counter() - t
    if dt >= 60:
        bad.append(f"took {dt:.1f}s, budget 60s")
    verdict(1, bad, f"{len(ALL)} localities in {dt:.1f}s")


def test_criterion_2_locality_properties(verdict):
    bad = []
    for key, sel in ALL:
        rep = locality_properties(loc(key, sel))
        if not rep.passed:
            bad.append((key, sel, [r.line() for r in rep.failures()]))
    verdict(2, bad, f"properties (a)-(g) on {len(ALL)} localities")


def test_criterion_3_bijection(verdict):
    t = time.perf_counter()
    bad, total = [], 0
    for key in CHAR_P:
        for sel in ("quasicentric", "subcentric"):
            res = verify_bijection(loc(key, sel), oracle="model")
            total += len(res.oracle)
            if not res.passed:
                bad.append((key, sel, [r.line() for r in res.report.failures()]))
    dt = time.perf_counter() - t
    if dt >= 600:
        bad.append(f"took {dt:.1f}s, budget 600s")
    verdict(3, bad, f"{total} normal subsystems matched, {dt:.1f}s")


def test_criterion_4_restriction(verdict):
    bad = []
    for key in CHAR_P:
        rep = restriction_compatibility(loc(key, "subcentric"), loc(key, "quasicentric").delta)
        if not rep.passed:
            bad.append((key, [r.line() for r in rep.failures()]))
    verdict(4, bad, f"F^s to F^q on {len(CHAR_P)} members")


def _expansion_case(key, cls):
    Lf = loc(key, "subcentric")
    F = setup(key)[4]
    L = restrict(Lf, Lf.delta.without(cls))
    R = F.fully_normalized_rep(cls[0])
    exp = expand_in_model(L, R)
    rep = verify_expansion(exp, F)
    _, iso = rigid_isomorphism(exp, Lf)
    out = [r.line() for r in rep.failures() + iso.failures()]
    return out, f"{key}: {L.n}->{exp.locality.n}"


def test_criterion_5_expansion(verdict):
    bad, done = [], []
    cases = []
    for key in ("s4", "sl23"):
        one = 1 << loc(key, "subcentric").Sg.identity
        cases.append((key, [one]))
    Sg, F = setup("gl32")[3:]
    cases.append(("gl32", F.class_of(Sg.center())))
    for key, cls in cases:
        cr = loc(key, "cr-closure").classes["centric_radical"]
        assert not set(cls) & cr
        out, info = _expansion_case(key, cls)
        done.append(info)
        if out:
            bad.append((key, out))
    verdict(5, bad, "; ".join(done))


def test_criterion_6_quotients(verdict):
    bad, count = [], 0
    for key, sel in ALL:
        L = loc(key, sel)
        for N in enumerate_pns(L).subgroups:
            q = quotient(L, N)
            count += 1
            if not (q.report.passed and q.report["kernel-is-N"].passed):
                bad.append((key, sel, bits(N), [r.line() for r in q.report.failures()]))
    verdict(6, bad, f"{count} quotients")


def test_criterion_7_products(verdict):
    bad, count = [], 0
    for key in CHAR_P:
        L = loc(key, "subcentric")
        normal = normal_subsystems_from_model(L.fusion, *model_of(L), L.p)
        for E1 in normal:
            for E2 in normal:
                count += 1
                try:
                    E = product_subsystems(L, E1, E2, normal)
                except Exception as exc:
                    bad.append((key, repr(exc)))
                    continue
                T = L.Sg.product_set(E1.support, E2.support)
                ok = E.support == T and E1 <= E and E2 <= E and is_normal_subsystem(L.fusion, E)
                # minimal over the whole oracle lattice
                ok &= all(E <= D for D in normal if D.support == T and E1 <= D and E2 <= D)
                if not ok:
                    bad.append((key, bits(E1.support), bits(E2.support)))
    verdict(7, bad, f"{count} pairs")


def test_criterion_8_lemmas(verdict):
    bad, count = [], 0
    for key in BATTERY:
        L = loc(key, "subcentric")
        for E in normal_subsystems_from_model(L.fusion, *model_of(L), L.p):
            count += 1
            rep = subsystem_lemmas(L.fusion, E)
            if not rep.passed:
                bad.append((key, bits(E.support), [r.line() for r in rep.failures()]))
    verdict(8, bad, f"{count} normal subsystems")


def test_criterion_9_negative_controls(verdict):
    bad, seen = [], []

    # edited product table
    pg = loc("s4", "subcentric").pg
    pair = pg.pair.copy()
    pair[1, 2] = (pair[1, 2] + 1) % pg.n
    rep = check_partial_group_axioms(PartialGroup(pg.labels, pg.inv, pair, pg.succ, pg.identity))
    wit = [r.witness for r in rep.failures()]
    seen.append(f"edited table: {wit[0] if wit else None}")
    if rep.passed or wit[0] is None:
        bad.append("edited product table passed the axioms")

    # overgroup removed from Δ
    L = loc("s4", "subcentric")
    L2 = restrict(L, L.delta)
    L2.delta = ObjectSet(L.Sg, L.delta.members - {L.Sg.full_mask})
    r = check_locality_axioms(L2)["L3-overgroups-of-conjugates"]
    seen.append(f"removed overgroup: {r.witness}")
    if r.passed or r.witness is None:
        bad.append("removed overgroup passed L3")

    # not of characteristic p
    wit = proper_witness(loc("c2xs3", "subcentric"))
    seen.append(f"C2xS3: {wit}")
    if wit is None:
        bad.append("C2xS3 passed is_proper")

    verdict(9, bad, "; ".join(seen))
