from pathlib import Path

import numpy as np
import pytest

from locality_lab.correspondence import enumerate_pns
from locality_lab.localities import check_all, is_proper
from locality_lab.serialize import DumpFormatError, dumps, load, loads
from helpers import loc

DATA = Path(__file__).parent / "data"


@pytest.mark.parametrize("key,sel", [("s4", "subcentric"), ("gl32", "cr-closure"),
                                     ("c2xs3", "subcentric"), ("s3", "subcentric")])
def test_round_trip(key, sel):
    L = loc(key, sel)
    L2 = loads(dumps(L))
    assert np.array_equal(L.pg.pair, L2.pg.pair)
    assert np.array_equal(L.pg.succ, L2.pg.succ)
    assert np.array_equal(L.pg.inv, L2.pg.inv)
    assert L.S_ids == L2.S_ids and L.delta == L2.delta
    assert list(L.pg.labels) == list(L2.pg.labels)
    assert dumps(L2) == dumps(L)
    assert check_all(L2).passed
    assert is_proper(L2) == is_proper(L)
    assert L2.fusion == L.fusion


def test_round_trip_keeps_pns():
    L = loc("sl23", "subcentric")
    assert enumerate_pns(loads(dumps(L))).subgroups == enumerate_pns(L).subgroups


def test_fixture_is_current():
    assert (DATA / "s4_cr.dump").read_text() == dumps(loc("s4", "cr-closure"))


def test_mutated_fixture_loads_but_fails():
    L = load(DATA / "s4_cr_mutated.dump")
    rep = check_all(L)
    assert not rep.passed
    assert rep["contraction-length-3"].witness[3] == "contraction changes product"


@pytest.mark.parametrize("edit,msg", [
    (lambda t: t.replace("locality-lab-dump/1", "locality-lab-dump/9"), "schema"),
    (lambda t: "\n".join(x for x in t.splitlines() if not x.startswith("pair.3:")), "missing"),
    (lambda t: t.replace("\npair.0: ", "\npair.0: 99 "), "expected"),
    (lambda t: t + "garbage line\n", "key: value"),
], ids=["schema", "missing-row", "row-length", "garbage"])
def test_bad_dumps(edit, msg):
    text = edit(dumps(loc("s4", "cr-closure")))
    with pytest.raises(DumpFormatError, match=msg):
        loads(text)


def test_out_of_range_entry():
    text = dumps(loc("s4", "cr-closure")).replace("\npair.0: 0 ", "\npair.0: 77 ")
    with pytest.raises(DumpFormatError, match="out of range"):
        loads(text)
