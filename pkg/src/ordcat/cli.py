"""Batch front end: load documents from JSON files, run checks, emit
deterministic reports.

Documents are UTF-8 JSON files with a top-level "kind" and "name".
Categories list objects as strings and morphisms as {id, src, tgt}
records, with composition as [g, f, gf] triples; posets as {elements,
relations} with relations the full non-reflexive order pairs; functor,
poset_map, set_functor, diagram and group documents reference other
documents either inline or by name (resolved across all files passed on
the command line).  A probe_suite document is a manifest configuring the
generated default suite.

Exit codes: 0 all checks pass, 1 check failure, 2 input error, 3
size-guard refusal.  Reports are deterministic for identical inputs;
`--format json|text` selects the rendering and `--jobs k` fans
independent probes out to a worker pool (merged by probe id).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor

from .fib import PosetDiagram, SetValued, is_fibration
from .fincat import FinCat, FinGroup, Functor, opposite
from .guards import SizeGuardError, StructuralError
from .kan import (check_lan_adjunction, colim_set, lan, lim_set,
                  pullback_set_functor, ran)
from .poset import FinPoset, PosetMap, poset_to_cat
from .report import CheckReport
from .segal import (check_complete, check_segal, discrete_family, iso_family,
                    nerve, simplicial_replacement, truncate_segal)
from .enhance import (check_axiom, counter_oracle, default_probes, k_oracle,
                      run_probe_suite)
from .yoneda import (aut_cat, aut_cat0, check_extended_restriction,
                     localization_square_check, yoneda_embedding)

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3

KINDS = ("category", "poset", "functor", "poset_map", "diagram",
         "set_functor", "group", "probe_suite")


class InputError(Exception):
    """Malformed document or unresolved reference."""


# -- document loading ---------------------------------------------------------


def _require(doc, field, where):
    if field not in doc:
        raise InputError(f"{where}: missing field {field!r}")
    return doc[field]


def load_documents(paths):
    """Parse every file and index the raw documents by name."""
    registry = {}
    order = []
    for path in paths:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as e:
            raise InputError(f"{path}: {e}")
        except json.JSONDecodeError as e:
            raise InputError(f"{path}: line {e.lineno}, column {e.colno}: "
                             f"{e.msg}")
        docs = raw if isinstance(raw, list) else [raw]
        for doc in docs:
            if not isinstance(doc, dict):
                raise InputError(f"{path}: document is not an object")
            kind = _require(doc, "kind", path)
            if kind not in KINDS:
                raise InputError(f"{path}: unknown kind {kind!r}")
            name = _require(doc, "name", path)
            if name in registry:
                raise InputError(f"{path}: duplicate document name {name!r}")
            registry[name] = doc
            order.append(name)
    return registry, order


def _resolve(ref, registry, expect, where):
    """A cross-reference is either an inline document or a name."""
    if isinstance(ref, dict):
        doc = ref
    elif isinstance(ref, str):
        doc = registry.get(ref)
        if doc is None:
            raise InputError(f"{where}: unresolved reference {ref!r}")
    else:
        raise InputError(f"{where}: bad reference {ref!r}")
    if doc.get("kind") != expect:
        raise InputError(f"{where}: expected a {expect} document, "
                         f"got {doc.get('kind')!r}")
    return doc


def build_category(doc, registry):
    name = doc["name"]
    objects = tuple(_require(doc, "objects", name))
    recs = _require(doc, "morphisms", name)
    mors, src, tgt = [], {}, {}
    for r in recs:
        m = _require(r, "id", name)
        mors.append(m)
        src[m] = _require(r, "src", name)
        tgt[m] = _require(r, "tgt", name)
    table = {}
    for trip in _require(doc, "composition", name):
        if len(trip) != 3:
            raise InputError(f"{name}: composition entries are [g, f, gf]")
        g, f, gf = trip
        table[(g, f)] = gf
    if "identities" in doc:
        ident = dict(doc["identities"])
    else:
        ident = _infer_identities(name, objects, mors, src, tgt, table)
    for x in objects:
        if x not in ident:
            raise InputError(f"{name}: no identity for object {x!r}")
    return FinCat(objects, mors, src, tgt, ident, compose=table, name=name)


def _infer_identities(name, objects, mors, src, tgt, table):
    """An identity is an endomorphism the table treats as a two-sided
    unit on every composite it appears in."""
    ident = {}
    for x in objects:
        cands = []
        for e in mors:
            if src[e] != x or tgt[e] != x:
                continue
            if table.get((e, e)) != e:
                continue
            if all(table.get((e, f), f) == f
                   for f in mors if tgt[f] == x) and \
               all(table.get((g, e), g) == g
                   for g in mors if src[g] == x):
                cands.append(e)
        if len(cands) != 1:
            raise InputError(
                f"{name}: cannot infer identity for {x!r} "
                f"({len(cands)} candidates); add an 'identities' field")
        ident[x] = cands[0]
    return ident


def build_poset(doc, registry):
    return FinPoset(doc.get("elements", ()),
                    [tuple(p) for p in doc.get("relations", ())],
                    name=doc["name"])


def build_functor(doc, registry):
    name = doc["name"]
    C = build_category(_resolve(_require(doc, "source", name), registry,
                                "category", name), registry)
    D = build_category(_resolve(_require(doc, "target", name), registry,
                                "category", name), registry)
    return Functor(C, D, _require(doc, "obj_map", name),
                   _require(doc, "mor_map", name), name=name)


def build_poset_map(doc, registry):
    name = doc["name"]
    P = build_poset(_resolve(_require(doc, "source", name), registry,
                             "poset", name), registry)
    Q = build_poset(_resolve(_require(doc, "target", name), registry,
                             "poset", name), registry)
    return PosetMap(P, Q, _require(doc, "mapping", name), name=name)


def build_set_functor(doc, registry):
    name = doc["name"]
    C = build_category(_resolve(_require(doc, "source", name), registry,
                                "category", name), registry)
    sets = _require(doc, "sets", name)
    maps = {m: dict(v) for m, v in _require(doc, "maps", name).items()}
    for x in C.objects:
        maps.setdefault(C.identity[x], {a: a for a in sets.get(x, ())})
    return SetValued(C, sets, maps, name=name)


def build_group(doc, registry):
    name = doc["name"]
    els = tuple(_require(doc, "elements", name))
    mul = {}
    for trip in _require(doc, "table", name):
        if len(trip) != 3:
            raise InputError(f"{name}: table entries are [g, h, gh]")
        g, h, gh = trip
        mul[(g, h)] = gh
    unit = doc.get("unit")
    if unit is None:
        units = [e for e in els
                 if all(mul.get((e, g)) == g and mul.get((g, e)) == g
                        for g in els)]
        if len(units) != 1:
            raise InputError(f"{name}: cannot infer unit; add a 'unit' field")
        unit = units[0]
    return FinGroup(els, mul, unit, name=name)


def build_diagram(doc, registry):
    name = doc["name"]
    J = build_poset(_resolve(_require(doc, "index", name), registry,
                             "poset", name), registry)
    fibers = {e: build_category(_resolve(ref, registry, "category", name),
                                registry)
              for e, ref in _require(doc, "fibers", name).items()}
    trans = {}
    for key, ref in doc.get("transitions", {}).items():
        a, sep, b = key.partition("<=")
        if not sep:
            raise InputError(f"{name}: transition keys look like 'a<=b'")
        fd = _resolve(ref, registry, "functor", name)
        lo, hi = fibers[a], fibers[b]
        trans[(a, b)] = Functor(hi, lo, _require(fd, "obj_map", name),
                                _require(fd, "mor_map", name),
                                name=fd.get("name", key))
    return PosetDiagram(J, fibers, trans)


def build_probe_suite(doc, registry):
    probes = default_probes(max_elements=doc.get("max_elements", 4),
                            max_s=doc.get("max_s", 2),
                            glue_elements=doc.get("glue_elements", 3))
    kinds = doc.get("kinds")
    if kinds:
        probes = [p for p in probes if p.kind in kinds]
    sample = doc.get("sample")
    if sample is not None:
        rng = random.Random(doc.get("_seed", 0))
        probes = sorted(rng.sample(probes, min(sample, len(probes))),
                        key=lambda p: p.probe_id)
    return probes


BUILDERS = {
    "category": build_category,
    "poset": build_poset,
    "functor": build_functor,
    "poset_map": build_poset_map,
    "set_functor": build_set_functor,
    "group": build_group,
    "diagram": build_diagram,
    "probe_suite": build_probe_suite,
}


def build(doc, registry):
    return BUILDERS[doc["kind"]](doc, registry)


# -- serialization back out ----------------------------------------------------


def category_to_doc(C, name=None):
    """A category as a document, relabeled compactly so the result is
    readable and round-trips through JSON."""
    oname = {x: f"o{k}" for k, x in enumerate(C.objects)}
    label = {m: f"m{k}" for k, m in enumerate(C.morphisms)}
    return {
        "kind": "category",
        "name": name or C.name,
        "objects": [oname[x] for x in C.objects],
        "morphisms": [{"id": label[m], "src": oname[C.src[m]],
                       "tgt": oname[C.tgt[m]]} for m in C.morphisms],
        "composition": sorted(
            [label[g], label[f], label[C.compose(g, f)]]
            for g, f in C.composable_pairs()),
        "identities": {oname[x]: label[C.identity[x]] for x in C.objects},
    }


# -- report assembly -------------------------------------------------------------


def emit(reports, fmt, out=sys.stdout):
    if fmt == "json":
        payload = [r.to_json() for r in reports]
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        for r in reports:
            out.write(r.render_text() + "\n")
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


def _validate_document(name, doc, registry):
    obj = build(doc, registry)
    kind = doc["kind"]
    if kind == "probe_suite":
        rep = CheckReport(f"check({name})", True)
        rep.details["probes"] = len(obj)
        return rep
    rep = obj.validate()
    rep.name = f"check({name})"
    return rep


# -- subcommands -------------------------------------------------------------------


def cmd_check(args, registry, order):
    reports = []
    for name in order:
        reports.append(_validate_document(name, registry[name], registry))
    return emit(reports, args.format)


def _the_category(args, registry, order):
    names = [n for n in order if registry[n]["kind"] == "category"]
    if not names:
        raise InputError("no category document given")
    return build(registry[names[0]], registry)


def cmd_nerve(args, registry, order):
    I = _the_category(args, registry, order)
    X = nerve(I, args.level)
    rep = CheckReport(f"nerve({I.name},{args.level})", True)
    for n in X.delta.objects:
        rep.details[f"level {n}"] = len(X.set(n))
    return emit([rep], args.format)


def cmd_replacement(args, registry, order):
    I = _the_category(args, registry, order)
    F = simplicial_replacement(I, args.level)
    rep = is_fibration(F)
    rep.name = f"replacement({I.name},{args.level})"
    rep.details["objects"] = len(F.total.objects)
    rep.details["morphisms"] = len(F.total.morphisms)
    return emit([rep], args.format)


def cmd_iso_family(args, registry, order):
    I = _the_category(args, registry, order)
    F = iso_family(I, args.level)
    rep = F.validate()
    rep.name = f"iso-family({I.name},{args.level})"
    for n in F.delta.objects:
        C = F.fibers[n]
        rep.details[f"fiber [{n}]"] = {"objects": len(C.objects),
                                       "morphisms": len(C.morphisms)}
    return emit([rep], args.format)


def _family(args, registry, order):
    I = _the_category(args, registry, order)
    if args.family == "discrete":
        return discrete_family(nerve(I, args.level))
    return iso_family(I, args.level)


def cmd_segal(args, registry, order):
    return emit([check_segal(_family(args, registry, order))], args.format)


def cmd_complete(args, registry, order):
    return emit([check_complete(_family(args, registry, order))], args.format)


def cmd_truncate(args, registry, order):
    I = _the_category(args, registry, order)
    H = truncate_segal(iso_family(I, args.level))
    rep = CheckReport(f"truncate({I.name},{args.level})", True)
    rep.details["category"] = category_to_doc(H)
    return emit([rep], args.format)


def _kan_inputs(args, registry, order):
    fnames = [n for n in order if registry[n]["kind"] == "functor"]
    enames = [n for n in order if registry[n]["kind"] == "set_functor"]
    gname = args.along or (fnames[0] if fnames else None)
    if gname is None or not enames:
        raise InputError("kan needs a functor (--along) and a set_functor")
    gamma = build(_resolve(gname, registry, "functor", "kan"), registry)
    E = build(registry[enames[0]], registry)
    # rebase E onto gamma's source so instance identity lines up
    E = SetValued(gamma.source, E.sets, E.maps, name=E.name)
    return gamma, E


def cmd_kan(args, registry, order):
    gamma, E = _kan_inputs(args, registry, order)
    rep = CheckReport(f"kan({gamma.name},{E.name},{args.dir})", True)
    res = lan(gamma, E) if args.dir == "left" else ran(gamma, E)
    for i in gamma.target.objects:
        rep.details[f"value at {i}"] = len(res.functor.set(i))
    rep.details["sizes"] = tuple(len(res.functor.set(i))
                                 for i in gamma.target.objects)
    return emit([rep], args.format)


def cmd_colim(args, registry, order):
    enames = [n for n in order if registry[n]["kind"] == "set_functor"]
    if not enames:
        raise InputError("colim/lim need a set_functor document")
    E = build(registry[enames[0]], registry)
    rep = CheckReport(f"{args.command}({E.name})", True)
    if args.command == "colim":
        reps, _ = colim_set(E, verify=True)
    else:
        reps, _ = lim_set(E, verify=True)
    rep.details["size"] = len(reps)
    rep.details["elements"] = sorted(repr(r) for r in reps)
    return emit([rep], args.format)


def cmd_probe(args, registry, order):
    I = _the_category(args, registry, order)
    suites = [n for n in order if registry[n]["kind"] == "probe_suite"]
    if suites:
        doc = dict(registry[suites[0]])
        doc.setdefault("_seed", args.seed or 0)
        probes = build_probe_suite(doc, registry)
    else:
        probes = default_probes()
    O = counter_oracle(I) if args.oracle == "counter" else k_oracle(I)
    if args.jobs and args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(lambda p: check_axiom(O, p), probes))
        reports.sort(key=lambda r: r.name)
        passed = all(r.passed for r in reports)
        summary = CheckReport(f"probe-suite({O.name})", passed)
        summary.details["probes"] = len(probes)
        for r in reports:
            if not r.passed:
                summary.add_failure(r.name, r.witness)
    else:
        reports, summary = run_probe_suite(O, probes)
    if args.verbose:
        return emit(reports + [summary], args.format)
    return emit([summary], args.format)


def cmd_yoneda(args, registry, order):
    I = _the_category(args, registry, order)
    rep = yoneda_embedding(I).report
    rest = check_extended_restriction(I)
    return emit([rep, rest], args.format)


def _the_group(registry, order):
    names = [n for n in order if registry[n]["kind"] == "group"]
    if not names:
        raise InputError("this command needs a group document")
    return build(registry[names[0]], registry)


def cmd_aut(args, registry, order):
    G = _the_group(registry, order)
    A, A0 = aut_cat(G), aut_cat0(G)
    rep = CheckReport(f"aut({G.name})", True)
    rep.details["Aut"] = len(A)
    rep.details["Out"] = len(A0)
    if args.format == "text":
        sys.stdout.write(f"Aut={len(A)}, Out={len(A0)}\n")
        return EXIT_PASS
    return emit([rep], args.format)


def cmd_locsquare(args, registry, order):
    return emit([localization_square_check(_the_group(registry, order))],
                args.format)


def cmd_report(args, registry, order):
    """One merged report over every document, sorted by name."""
    reports = [_validate_document(name, registry[name], registry)
               for name in sorted(order)]
    return emit(reports, args.format)


COMMANDS = {
    "check": cmd_check,
    "nerve": cmd_nerve,
    "replacement": cmd_replacement,
    "iso-family": cmd_iso_family,
    "segal": cmd_segal,
    "complete": cmd_complete,
    "truncate": cmd_truncate,
    "kan": cmd_kan,
    "colim": cmd_colim,
    "lim": cmd_colim,
    "probe": cmd_probe,
    "yoneda": cmd_yoneda,
    "aut": cmd_aut,
    "locsquare": cmd_locsquare,
    "report": cmd_report,
}


def make_parser():
    p = argparse.ArgumentParser(
        prog="ordcat",
        description="batch checks and reports for finite categories")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("files", nargs="*", help="JSON document files")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--level", type=int, default=3,
                   help="truncation level for nerve/family commands")
    p.add_argument("--family", choices=("iso", "discrete"), default="iso")
    p.add_argument("--along", help="name of the functor to extend along")
    p.add_argument("--dir", choices=("left", "right"), default="left")
    p.add_argument("--oracle", choices=("k", "counter"), default="k")
    p.add_argument("--seed", type=int, default=None,
                   help="seed for sampled probe suites")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker threads for independent probes")
    p.add_argument("--verbose", action="store_true",
                   help="per-probe lines, not just the summary")
    return p


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        registry, order = load_documents(args.files)
        return COMMANDS[args.command](args, registry, order)
    except InputError as e:
        sys.stderr.write(f"input error: {e}\n")
        return EXIT_INPUT
    except SizeGuardError as e:
        sys.stderr.write(f"size guard: {e}\n")
        return EXIT_GUARD
    except StructuralError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
