"""Command line front end.

    locality-lab build      --group G --prime p --delta SEL [--dump PATH]
    locality-lab verify     --group G --prime p --delta SEL [--checks a,b] [--audit-bound N]
    locality-lab enumerate  {pns,subsystems} --group G --prime p --delta SEL

``--group`` takes a group file or ``builtin:<key>``; ``--load PATH`` reads
a dumped locality instead of building one.  ``--delta`` is one of
cr-closure, centric, quasicentric, subcentric, or ``list:`` followed by
members separated by ``;``, each given by generators separated by ``,``
(for example ``list:(1 2)(3 4),(1 3)(2 4)``).

Exit status: 0 all checks pass, 1 a check failed, 2 bad input,
3 a precondition of a construction or check does not hold.
"""

from __future__ import annotations

import argparse
import sys
import time

from locality_lab import __version__
from locality_lab.constructions import (
    ConstructionError,
    expand_in_model,
    quotient,
    rigid_isomorphism,
)
from locality_lab.correspondence import (
    CorrespondenceError,
    enumerate_normal_subsystems,
    enumerate_pns,
    model_of,
    normal_subsystems_direct,
    product_subsystems,
    psi,
    verify_bijection,
)
from locality_lab.fusion import FusionError, fusion_system_of_group, subgroup_classes
from locality_lab.groupio import GroupFileError, builtin_path, read_group_file
from locality_lab.groups import GroupError, Perm, PermGroup, bits, popcount, to_mask
from locality_lab.localities import (
    LocalityError,
    ObjectSet,
    build_locality_from_group,
    check_locality_axioms,
    delta_from_selector,
    locality_properties,
    proper_witness,
    restrict,
)
from locality_lab.partial_groups import Report, check_partial_group_axioms
from locality_lab.serialize import DumpFormatError, dump, load

REPORT_SCHEMA = "locality-lab-report/1"
CHECKS = ("axioms", "bijection", "expansion", "lemma-props", "products", "quotient")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PRECONDITION = 0, 1, 2, 3


class InputError(Exception):
    pass


class PreconditionError(Exception):
    pass


# ---------------------------------------------------------------------------
# instance


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


def _parse_explicit(G: PermGroup, text: str) -> list:
    members = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        ids = []
        for c in chunk.split(","):
            try:
                ids.append(G.id_of(Perm.from_cycles(c, G.degree)))
            except (ValueError, GroupError) as exc:
                raise InputError(f"bad object generator {c!r}: {exc}") from None
        members.append(G.generate(ids))
    if not members:
        raise InputError("empty object list")
    return members


def load_instance(args):
    """Return (locality, echo dict)."""
    if args.load:
        try:
            L = load(args.load)
        except DumpFormatError as exc:
            raise InputError(str(exc)) from None
        return L, {"source": args.load, "prime": L.p, "delta": "loaded"}
    if not args.group:
        raise InputError("--group or --load is required")
    path = args.group
    if path.startswith("builtin:"):
        try:
            path = builtin_path(path.split(":", 1)[1])
        except FileNotFoundError:
            raise InputError(f"unknown builtin group {args.group!r}") from None
    try:
        rec = read_group_file(path)
        G = rec.build()
    except (GroupFileError, GroupError, FileNotFoundError) as exc:
        raise InputError(str(exc)) from None
    p = args.prime if args.prime is not None else rec.prime
    if p is None:
        raise InputError("--prime is required (the group file has no default)")
    if not _is_prime(p) or G.n % p:
        raise InputError(f"{p} is not a prime dividing |G| = {G.n}")
    S_mask = G.sylow(p)
    Sg, F = fusion_system_of_group(G, S_mask)
    sel = args.delta
    try:
        if sel.startswith("list:"):
            members = _parse_explicit(G, sel[5:])
            pos = {g: i for i, g in enumerate(Sg.labels)}
            local = []
            for m in members:
                if m & ~S_mask:
                    raise InputError(f"object {bits(m)} is not inside the chosen Sylow subgroup")
                local.append(to_mask(pos[g] for g in bits(m)))
            delta = ObjectSet.closure(Sg, F, local)
        else:
            delta = delta_from_selector(Sg, F, sel)
        L = build_locality_from_group(G, p, delta, S_mask=S_mask, F=F, name=rec.name)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    except (LocalityError, FusionError) as exc:
        raise PreconditionError(f"{type(exc).__name__}: {exc}") from None
    return L, {"group": rec.name, "order": G.n, "prime": p, "delta": sel}


# ---------------------------------------------------------------------------
# reports


class Output:
    def __init__(self, command, echo):
        self.command = command
        self.echo = echo
        self.summary = []  # (key, value)
        self.checks = {}  # check id -> Report or ("precondition"/"skipped", reason)
        self.items = []  # enumerate rows: dicts
        self.started = time.perf_counter()

    def status(self) -> int:
        code = EXIT_OK
        for v in self.checks.values():
            if isinstance(v, Report):
                if not v.passed:
                    code = max(code, EXIT_FAIL) if code != EXIT_PRECONDITION else code
            elif v[0] == "precondition":
                code = EXIT_PRECONDITION
        return code

    def emit(self, mode: str, stream=None):
        stream = sys.stdout if stream is None else stream
        if mode == "structured":
            stream.write(self.structured())
        else:
            stream.write(self.text())

    def _rows(self):
        for cid in sorted(self.checks):
            v = self.checks[cid]
            if isinstance(v, Report):
                for r in sorted(v.results, key=lambda r: r.name):
                    yield f"{cid}.{r.name}", "pass" if r.passed else "fail", r.witness, r.detail
            else:
                yield cid, v[0], None, v[1]

    def structured(self) -> str:
        out = [f"schema: {REPORT_SCHEMA}", f"command: {self.command}"]
        for k in sorted(self.echo):
            out.append(f"instance.{k}: {self.echo[k]}")
        for k, v in self.summary:
            out.append(f"summary.{k}: {v}")
        for i, row in enumerate(self.items):
            for k in sorted(row):
                out.append(f"item.{i}.{k}: {row[k]}")
        for cid, verdict, wit, detail in self._rows():
            out.append(f"check.{cid}.verdict: {verdict}")
            if wit is not None:
                out.append(f"check.{cid}.witness: {wit}")
            if detail:
                out.append(f"check.{cid}.detail: {detail}")
        out.append(f"result: {_RESULT[self.status()]}")
        return "\n".join(out) + "\n"

    def text(self) -> str:
        out = [f"locality-lab {__version__} {self.command}"]
        out.append("  " + ", ".join(f"{k}={self.echo[k]}" for k in sorted(self.echo)))
        for k, v in self.summary:
            out.append(f"{k}: {v}")
        for row in self.items:
            out.append("  " + "  ".join(f"{k}={row[k]}" for k in sorted(row)))
        for cid, verdict, wit, detail in self._rows():
            line = f"[{verdict}] {cid}"
            if detail:
                line += f" ({detail})"
            if wit is not None:
                line += f" witness={wit}"
            out.append(line)
        out.append(f"result: {_RESULT[self.status()]} "
                   f"({time.perf_counter() - self.started:.2f}s)")
        return "\n".join(out) + "\n"


_RESULT = {EXIT_OK: "pass", EXIT_FAIL: "fail", EXIT_PRECONDITION: "precondition-failure"}


def _label(L, f) -> str:
    if L.model is not None and isinstance(L.model[0], PermGroup):
        G, elems = L.model
        return G.perm(elems[f]).cycles()
    return str(L.pg.labels[f])


def _summary(L, out: Output):
    out.summary.append(("elements", L.n))
    out.summary.append(("sylow_order", len(L.S_ids)))
    out.summary.append(("objects", len(L.delta)))
    try:
        classes = {frozenset(L.fusion.class_of(P)) for P in L.delta.members}
        out.summary.append(("object_classes", len(classes)))
        wit = proper_witness(L)
    except FusionError as exc:
        out.summary.append(("proper", f"undetermined ({exc})"))
        return
    out.summary.append(("proper", "true" if wit is None else "false"))
    if wit is not None:
        out.summary.append(("proper_witness", f"{wit[0]} {wit[1]}"))


# ---------------------------------------------------------------------------
# checks


def _check_axioms(L, args):
    rep = check_partial_group_axioms(L.pg, 3, args.budget)
    rep.results.extend(check_locality_axioms(L).results)
    return rep


def _check_lemma_props(L, args):
    return locality_properties(L, max_words=args.budget)


def _check_bijection(L, args):
    oracle = "both" if model_of(L) is not None else "direct"
    res = verify_bijection(L, args.audit_bound, oracle=oracle)
    rep = res.report
    rep.add("property-star", not res.star.startswith("failed"), None, res.star)
    return rep


def _check_products(L, args):
    rep = Report()
    normal = [psi(L, N) for N in enumerate_pns(L, 0).subgroups]
    wit = None
    count = 0
    for E1 in normal:
        for E2 in normal:
            try:
                product_subsystems(L, E1, E2, normal)
                count += 1
            except CorrespondenceError as exc:
                wit = str(exc)
                break
        if wit:
            break
    rep.add("products-minimal", wit is None, wit, f"{count} pairs")
    return rep


def _check_quotient(L, args):
    rep = Report()
    pns = enumerate_pns(L, 0).subgroups
    wit = None
    for N in pns:
        q = quotient(L, N, args.budget)
        if not q.report.passed:
            wit = (bits(N), [r.name for r in q.report.failures()])
            break
    rep.add("quotients-have-kernel-N", wit is None, wit, f"{len(pns)} partial normal subgroups")
    return rep


def deletable_class(L):
    """A class of minimal objects outside F^cr whose removal keeps Δ closed
    and satisfies the expansion hypothesis, with a fully normalized member.

    Returns (R, smaller Δ) or None.
    """
    F = L.fusion
    cr = subgroup_classes(F)["centric_radical"]
    S = L.Sg
    seen = set()
    for P in L.delta.minimal_members:
        if P in seen or P in cr:
            continue
        cls = F.conjugates(P)
        seen |= cls
        if cls & cr:
            continue
        rest = L.delta.members - cls
        if not rest:
            continue
        if any(S.join(U, V) not in rest for U in cls for V in cls if U != V):
            continue
        return F.fully_normalized_rep(P), ObjectSet(S, rest)
    return None


def _check_expansion(L, args):
    if L.model is None:
        return ("skipped", "no group to take normalizers in")
    found = deletable_class(L)
    if found is None:
        return ("skipped", "no deletable class of minimal objects")
    R, smaller = found
    Ls = restrict(L, smaller)
    exp = expand_in_model(Ls, R)
    rep = Report()
    rep.results.extend(exp.report.results)
    _, iso = rigid_isomorphism(exp, L)
    rep.results.extend(iso.results)
    rep.add("deleted-class", True, None, f"R of order {popcount(R)}, |L_smaller|={Ls.n}")
    return rep


_RUNNERS = {
    "axioms": _check_axioms,
    "bijection": _check_bijection,
    "expansion": _check_expansion,
    "lemma-props": _check_lemma_props,
    "products": _check_products,
    "quotient": _check_quotient,
}


def run_check(cid, L, args):
    try:
        return _RUNNERS[cid](L, args)
    except (CorrespondenceError, ConstructionError, LocalityError, FusionError) as exc:
        return ("precondition", f"{type(exc).__name__}: {exc}")


# ---------------------------------------------------------------------------
# commands


def cmd_build(args) -> Output:
    L, echo = load_instance(args)
    out = Output("build", echo)
    _summary(L, out)
    if args.dump:
        dump(L, args.dump)
        out.summary.append(("dumped", args.dump))
    return out


def cmd_verify(args) -> Output:
    L, echo = load_instance(args)
    out = Output("verify", echo)
    if args.checks is None:
        checks = list(CHECKS)
    else:
        checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    bad = [c for c in checks if c not in _RUNNERS]
    if bad:
        raise InputError(f"unknown checks: {', '.join(bad)}")
    out.summary.append(("elements", L.n))
    for cid in sorted(set(checks)):
        out.checks[cid] = run_check(cid, L, args)
    if args.dump:
        dump(L, args.dump)
    return out


def cmd_enumerate(args) -> Output:
    L, echo = load_instance(args)
    out = Output(f"enumerate {args.what}", echo)
    try:
        pns = enumerate_pns(L, args.audit_bound)
        images = [psi(L, N) for N in pns.subgroups]
        model = model_of(L)
        if model is not None:
            normal = enumerate_normal_subsystems(L.fusion, model, L.p)
        else:
            normal = normal_subsystems_direct(L.fusion)
    except (CorrespondenceError, FusionError, LocalityError) as exc:
        raise PreconditionError(f"{type(exc).__name__}: {exc}") from None
    ids = {(E.support, frozenset(E.maps.items())): f"E{i}" for i, E in enumerate(normal)}
    out.summary.append(("pns_audit", pns.audit))
    out.summary.append(("partial_normal_subgroups", len(pns.subgroups)))
    out.summary.append(("normal_subsystems", len(normal)))
    if args.what == "pns":
        for i, (N, E) in enumerate(zip(pns.subgroups, images)):
            out.items.append({
                "id": f"N{i}",
                "order": popcount(N),
                "support_order": popcount(pns.supports[N]),
                "generators": " ".join(_label(L, f) for f in _pns_generators(L, N)) or "()",
                "psi": ids.get((E.support, frozenset(E.maps.items())), "missing"),
            })
    else:
        back = {}
        for i, E in enumerate(images):
            back[(E.support, frozenset(E.maps.items()))] = f"N{i}"
        for i, E in enumerate(normal):
            key = (E.support, frozenset(E.maps.items()))
            out.items.append({
                "id": f"E{i}",
                "support_order": popcount(E.support),
                "morphisms": E.size,
                "support": " ".join(_label(L, L.S_ids[s]) for s in bits(E.support)),
                "psi_preimage": back.get(key, "missing"),
            })
    return out


def _pns_generators(L, N):
    from locality_lab.partial_groups import partial_normal_closure

    gens, H = [], 1 << L.pg.identity
    for f in bits(N):
        if not (H >> f) & 1:
            gens.append(f)
            H = partial_normal_closure(L.pg, H | (1 << f)).mask
    return gens


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", help="group file, or builtin:<key>")
    common.add_argument("--prime", type=int)
    common.add_argument("--delta", default="subcentric")
    common.add_argument("--checks", default=None)
    common.add_argument("--audit-bound", type=int, default=60, dest="audit_bound")
    common.add_argument("--budget", type=int, default=20000,
                        help="word budget for sampled length-3 checks")
    common.add_argument("--emit", choices=("text", "structured"), default="text")
    common.add_argument("--dump")
    common.add_argument("--load")
    parser = argparse.ArgumentParser(prog="locality-lab", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common])
    sub.add_parser("verify", parents=[common])
    en = sub.add_parser("enumerate", parents=[common])
    en.add_argument("what", choices=("pns", "subsystems"))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    cmd = {"build": cmd_build, "verify": cmd_verify, "enumerate": cmd_enumerate}[args.command]
    try:
        out = cmd(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionError as exc:
        print(f"precondition failure: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    out.emit(args.emit)
    return out.status()


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
