"""Text dump and load of a locality.

The dump is line-oriented ``key: value`` with a schema header.  It holds the
element table (labels, inverses, pair products), the domain certificate
(the object automaton), S and Δ.  Longer products are folds of the pair
table, which is exact in a partial group.  When the locality came from a
permutation group the generators and element ids are stored too, so that
model-based checks still run after loading.
"""

import json

import numpy as np

from locality_lab.groups import FiniteGroup, Perm, PermGroup, bits, to_mask
from locality_lab.localities import Locality, ObjectSet
from locality_lab.partial_groups import PartialGroup

SCHEMA = "locality-lab-dump/1"


class DumpFormatError(ValueError):
    pass


def _ints(a) -> str:
    return " ".join(str(int(x)) for x in a)


def dumps(L: Locality) -> str:
    pg = L.pg
    out = [f"schema: {SCHEMA}"]
    out.append(f"name: {json.dumps(L.name)}")
    out.append(f"prime: {L.p}")
    out.append(f"elements: {pg.n}")
    out.append(f"identity: {pg.identity}")
    out.append(f"labels: {json.dumps([_jsonable(x) for x in pg.labels])}")
    out.append(f"inverse: {_ints(pg.inv)}")
    out.append(f"s_ids: {_ints(L.S_ids)}")
    out.append(f"s_labels: {json.dumps([_jsonable(x) for x in L.Sg.labels])}")
    out.append("delta: " + ";".join(",".join(map(str, bits(P))) for P in L.delta.sorted()))
    out.append(f"states: {pg.succ.shape[0]}")
    for i, row in enumerate(pg.succ):
        out.append(f"succ.{i}: {_ints(row)}")
    for i, row in enumerate(pg.pair):
        out.append(f"pair.{i}: {_ints(row)}")
    if L.model is not None and isinstance(L.model[0], PermGroup):
        G, elems = L.model
        gens = ";".join(G.perm(g).cycles() for g in _generators(G))
        out.append(f"model.degree: {G.degree}")
        out.append(f"model.gens: {gens}")
        out.append(f"model.elements: {_ints(elems)}")
    return "\n".join(out) + "\n"


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    return x


def _generators(G: FiniteGroup) -> list:
    gens, H = [], 1 << G.identity
    for g in range(G.n):
        if not (H >> g) & 1:
            gens.append(g)
            H = G.generate(gens)
    return gens


def dump(L: Locality, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(L))


def loads(text: str) -> Locality:
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise DumpFormatError(f"line {lineno}: expected 'key: value'")
        k, v = line.split(":", 1)
        fields[k.strip()] = v.strip()
    if fields.get("schema") != SCHEMA:
        raise DumpFormatError(f"unsupported schema {fields.get('schema')!r}")
    try:
        n = int(fields["elements"])
        k = int(fields["states"])
        p = int(fields["prime"])
        ident = int(fields["identity"])
        labels = [_tuplify(x) for x in json.loads(fields["labels"])]
        inv = _parse_ints(fields["inverse"], n)
        s_ids = _parse_ints(fields["s_ids"], None)
        s_labels = [_tuplify(x) for x in json.loads(fields["s_labels"])]
        succ = np.array([_parse_ints(fields[f"succ.{i}"], n) for i in range(k)], dtype=np.int32)
        pair = np.array([_parse_ints(fields[f"pair.{i}"], n) for i in range(n)], dtype=np.int32)
        delta_txt = fields["delta"]
        name = json.loads(fields["name"])
    except KeyError as exc:
        raise DumpFormatError(f"missing field {exc}") from None
    except (ValueError, json.JSONDecodeError) as exc:
        raise DumpFormatError(str(exc)) from None
    if len(labels) != n or len(s_labels) != len(s_ids):
        raise DumpFormatError("length mismatch")
    if (succ >= k).any() or (succ < -1).any() or (pair >= n).any() or (pair < -1).any():
        raise DumpFormatError("table entry out of range")
    pos = {f: i for i, f in enumerate(s_ids)}
    m = len(s_ids)
    table = np.empty((m, m), dtype=np.int32)
    for i, a in enumerate(s_ids):
        for j, b in enumerate(s_ids):
            c = int(pair[a, b])
            if c not in pos:
                raise DumpFormatError("S is not closed under the pair product")
            table[i, j] = pos[c]
    Sg = FiniteGroup(s_labels, table, name="S")
    members = []
    for chunk in delta_txt.split(";"):
        if chunk.strip():
            members.append(to_mask(int(x) for x in chunk.split(",")))
    pg = PartialGroup(labels, inv, pair, succ, ident, name=name)
    model = None
    if "model.gens" in fields:
        degree = int(fields["model.degree"])
        gens = [Perm.from_cycles(c, degree) for c in fields["model.gens"].split(";") if c.strip()]
        G = PermGroup(gens, degree, name=name)
        elems = _parse_ints(fields["model.elements"], n)
        model = (G, elems)
    return Locality(pg, s_ids, ObjectSet(Sg, members), p, name=name, model=model)


def _tuplify(x):
    return tuple(_tuplify(y) for y in x) if isinstance(x, list) else x


def _parse_ints(text: str, n):
    vals = [int(x) for x in text.split()]
    if n is not None and len(vals) != n:
        raise DumpFormatError(f"expected {n} integers, got {len(vals)}")
    return vals


def load(path) -> Locality:
    try:
        with open(path) as fh:
            return loads(fh.read())
    except OSError as exc:
        raise DumpFormatError(f"cannot read {path}: {exc}") from None
