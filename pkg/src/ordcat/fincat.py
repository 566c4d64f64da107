"""Finite categories as explicit tables, with an exhaustive functor calculus.

A FinCat stores object ids, morphism ids, endpoint tables, identities
and a composition table (or a composition callback for categories that
are too large to tabulate eagerly but are still cheap to compose in).
Everything downstream -- functor classification, Karoubi completion,
iso-comma products, cylinders, commas, adjunction search -- works by
brute-force enumeration over these tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .guards import StructuralError, check_guard
from .report import CheckReport


class FinCat:
    def __init__(self, objects, morphisms, src, tgt, identity,
                 compose=None, compose_fn=None, name="C"):
        if compose is None and compose_fn is None:
            raise StructuralError("FinCat needs a composition table or callback")
        self.objects = tuple(objects)
        self.morphisms = tuple(morphisms)
        self.src = dict(src)
        self.tgt = dict(tgt)
        self.identity = dict(identity)
        self.name = name
        self._table = dict(compose) if compose is not None else {}
        self._compose_fn = compose_fn
        self._hom = None
        self._inv = {}
        self._mor_pos = {m: k for k, m in enumerate(self.morphisms)}

    # -- basic accessors -------------------------------------------------

    def compose(self, g, f):
        """Composite g after f."""
        key = (g, f)
        h = self._table.get(key)
        if h is None and key not in self._table:
            if self._compose_fn is None:
                raise StructuralError(f"no composite for {key!r} in {self.name}")
            h = self._compose_fn(g, f)
            self._table[key] = h
        return h

    def hom(self, a, b):
        if self._hom is None:
            hom = {}
            for m in self.morphisms:
                hom.setdefault((self.src[m], self.tgt[m]), []).append(m)
            self._hom = hom
        return self._hom.get((a, b), [])

    def mor_key(self, m):
        """Position of m in the canonical morphism order."""
        return self._mor_pos[m]

    def is_identity(self, m):
        return self.identity.get(self.src[m]) == m

    def inverse(self, m):
        """Two-sided inverse of m, or None; found by search and cached."""
        if m in self._inv:
            return self._inv[m]
        a, b = self.src[m], self.tgt[m]
        inv = None
        for g in self.hom(b, a):
            if (self.compose(g, m) == self.identity[a]
                    and self.compose(m, g) == self.identity[b]):
                inv = g
                break
        self._inv[m] = inv
        return inv

    def is_iso(self, m):
        return self.inverse(m) is not None

    def isos(self, a, b):
        return [m for m in self.hom(a, b) if self.is_iso(m)]

    def are_isomorphic(self, a, b):
        if a == b:
            return True
        return any(self.is_iso(m) for m in self.hom(a, b))

    def composable_pairs(self):
        for g in self.morphisms:
            for f in self.morphisms:
                if self.tgt[f] == self.src[g]:
                    yield g, f

    # protocol accessors shared with the lazy category views

    def id_of(self, x):
        return self.identity[x]

    def src_of(self, m):
        return self.src[m]

    def tgt_of(self, m):
        return self.tgt[m]

    def morphisms_iter(self):
        return iter(self.morphisms)

    # -- validation ------------------------------------------------------

    def validate(self):
        """Check every category axiom, reporting violations with witnesses."""
        rep = CheckReport(f"validate({self.name})", True)
        obs = set(self.objects)
        mors = set(self.morphisms)
        if len(obs) != len(self.objects):
            rep.add_failure("duplicate-object-ids", None)
        if len(mors) != len(self.morphisms):
            rep.add_failure("duplicate-morphism-ids", None)
        for m in self.morphisms:
            if self.src.get(m) not in obs:
                rep.add_failure("bad-source", m)
            if self.tgt.get(m) not in obs:
                rep.add_failure("bad-target", m)
        if not rep.passed:
            return rep
        for c in self.objects:
            e = self.identity.get(c)
            if e not in mors or self.src[e] != c or self.tgt[e] != c:
                rep.add_failure("bad-identity", c)
        if not rep.passed:
            return rep
        table_backed = self._compose_fn is None
        if table_backed:
            want = {(g, f) for g, f in self.composable_pairs()}
            got = set(self._table)
            for key in got - want:
                rep.add_failure("compose-not-composable", key)
            for key in want - got:
                rep.add_failure("compose-missing", key)
            if not rep.passed:
                return rep
        for g, f in self.composable_pairs():
            h = self.compose(g, f)
            if h not in mors or self.src[h] != self.src[f] or self.tgt[h] != self.tgt[g]:
                rep.add_failure("bad-composite-endpoints", (g, f, h))
        if not rep.passed:
            return rep
        for m in self.morphisms:
            if self.compose(m, self.identity[self.src[m]]) != m:
                rep.add_failure("right-unit", m)
            if self.compose(self.identity[self.tgt[m]], m) != m:
                rep.add_failure("left-unit", m)
        for g, f in self.composable_pairs():
            gf = self.compose(g, f)
            for h in self.morphisms:
                if self.src[h] != self.tgt[g]:
                    continue
                if self.compose(h, gf) != self.compose(self.compose(h, g), f):
                    rep.add_failure("associativity", (h, g, f))
        rep.details["objects"] = len(self.objects)
        rep.details["morphisms"] = len(self.morphisms)
        return rep

    def __repr__(self):
        return (f"FinCat({self.name}: {len(self.objects)} objects, "
                f"{len(self.morphisms)} morphisms)")


def validate(C):
    return C.validate()


# -- small constructors ----------------------------------------------------

def pt():
    return FinCat(("*",), (("*", "*"),), {("*", "*"): "*"}, {("*", "*"): "*"},
                  {"*": ("*", "*")}, {((("*", "*")), ("*", "*")): ("*", "*")},
                  name="pt")


def discrete_cat(objects, name="disc"):
    objects = tuple(objects)
    mors = tuple(("id", x) for x in objects)
    return FinCat(objects, mors,
                  {m: m[1] for m in mors}, {m: m[1] for m in mors},
                  {x: ("id", x) for x in objects},
                  {(m, m): m for m in mors}, name=name)


def opposite(C):
    """The opposite category; morphism ids are reused with swapped roles."""
    return FinCat(C.objects, C.morphisms, dict(C.tgt), dict(C.src),
                  dict(C.identity), compose_fn=lambda g, f: C.compose(f, g),
                  name=f"{C.name}^o")


def product_cat(C, D, name=None):
    objects = [(c, d) for c in C.objects for d in D.objects]
    mors = [(m, n) for m in C.morphisms for n in D.morphisms]
    return FinCat(
        objects, mors,
        {(m, n): (C.src[m], D.src[n]) for m, n in mors},
        {(m, n): (C.tgt[m], D.tgt[n]) for m, n in mors},
        {(c, d): (C.identity[c], D.identity[d]) for c, d in objects},
        compose_fn=lambda g, f: (C.compose(g[0], f[0]), D.compose(g[1], f[1])),
        name=name or f"{C.name}x{D.name}")


# -- functors and natural transformations -----------------------------------

class Functor:
    def __init__(self, source, target, obj_map, mor_map, name="F"):
        self.source = source
        self.target = target
        self.obj_map = dict(obj_map)
        self.mor_map = dict(mor_map)
        self.name = name

    def ob(self, x):
        return self.obj_map[x]

    def mor(self, m):
        return self.mor_map[m]

    def validate(self):
        rep = CheckReport(f"validate-functor({self.name})", True)
        C, D = self.source, self.target
        for x in C.objects:
            if self.obj_map.get(x) not in set(D.objects):
                rep.add_failure("bad-object-image", x)
        for m in C.morphisms:
            fm = self.mor_map.get(m)
            if fm not in set(D.morphisms):
                rep.add_failure("bad-morphism-image", m)
        if not rep.passed:
            return rep
        for m in C.morphisms:
            fm = self.mor_map[m]
            if D.src[fm] != self.obj_map[C.src[m]] or D.tgt[fm] != self.obj_map[C.tgt[m]]:
                rep.add_failure("endpoint-mismatch", m)
        for x in C.objects:
            if self.mor_map[C.identity[x]] != D.identity[self.obj_map[x]]:
                rep.add_failure("identity-not-preserved", x)
        for g, f in C.composable_pairs():
            if self.mor_map[C.compose(g, f)] != D.compose(self.mor_map[g], self.mor_map[f]):
                rep.add_failure("composition-not-preserved", (g, f))
        return rep

    def is_valid(self):
        return self.validate().passed

    def __eq__(self, other):
        return (isinstance(other, Functor)
                and self.source is other.source and self.target is other.target
                and self.obj_map == other.obj_map and self.mor_map == other.mor_map)

    def __hash__(self):
        return hash((id(self.source), id(self.target),
                     tuple(sorted(map(repr, self.obj_map.items()))),
                     tuple(sorted(map(repr, self.mor_map.items())))))

    def __repr__(self):
        return f"Functor({self.name}: {self.source.name} -> {self.target.name})"


def identity_functor(C):
    return Functor(C, C, {x: x for x in C.objects},
                   {m: m for m in C.morphisms}, name=f"id_{C.name}")


def compose_functors(G, F):
    """G after F."""
    if F.target is not G.source and F.target.objects != G.source.objects:
        raise StructuralError("functors not composable")
    return Functor(F.source, G.target,
                   {x: G.obj_map[F.obj_map[x]] for x in F.source.objects},
                   {m: G.mor_map[F.mor_map[m]] for m in F.source.morphisms},
                   name=f"{G.name}.{F.name}")


def constant_functor(C, D, d, name=None):
    return Functor(C, D, {x: d for x in C.objects},
                   {m: D.identity[d] for m in C.morphisms},
                   name=name or f"const_{d}")


class NatTrans:
    def __init__(self, source, target, component, name="a"):
        self.source = source          # Functor
        self.target = target          # Functor, same endpoints
        self.component = dict(component)
        self.name = name

    def at(self, x):
        return self.component[x]

    def is_natural(self):
        F, G = self.source, self.target
        D = F.target
        for x in F.source.objects:
            c = self.component.get(x)
            if c is None or D.src[c] != F.obj_map[x] or D.tgt[c] != G.obj_map[x]:
                return False
        for m in F.source.morphisms:
            x, y = F.source.src[m], F.source.tgt[m]
            if D.compose(G.mor_map[m], self.component[x]) != \
                    D.compose(self.component[y], F.mor_map[m]):
                return False
        return True

    def is_iso(self):
        D = self.source.target
        return all(D.is_iso(c) for c in self.component.values())

    def __eq__(self, other):
        return (isinstance(other, NatTrans) and self.source == other.source
                and self.target == other.target and self.component == other.component)

    def __repr__(self):
        return f"NatTrans({self.name}: {self.source.name} -> {self.target.name})"


def natural_transformations(F, G, guard=None):
    """All natural transformations F -> G, in lexicographic component order."""
    C, D = F.source, F.target
    objs = list(C.objects)
    cands = [D.hom(F.obj_map[x], G.obj_map[x]) for x in objs]
    size = 1
    for c in cands:
        size *= max(len(c), 1)
    check_guard(f"Nat({F.name},{G.name})", size, guard)
    results = []
    comp = {}

    def ok(k):
        x = objs[k]
        for m in C.morphisms:
            a, b = C.src[m], C.tgt[m]
            if a not in comp or b not in comp:
                continue
            if a != x and b != x:
                continue
            if D.compose(G.mor_map[m], comp[a]) != D.compose(comp[b], F.mor_map[m]):
                return False
        return True

    def rec(k):
        if k == len(objs):
            results.append(NatTrans(F, G, dict(comp)))
            return
        x = objs[k]
        for c in cands[k]:
            comp[x] = c
            if ok(k):
                rec(k + 1)
            del comp[x]

    rec(0)
    return results


def natural_isos(F, G, guard=None):
    return [a for a in natural_transformations(F, G, guard) if a.is_iso()]


def all_functors(C, D, guard=None):
    """All functors C -> D, enumerated deterministically with backtracking."""
    obj_cands = len(D.objects) ** len(C.objects)
    check_guard(f"Fun({C.name},{D.name}) objects", obj_cands, guard)
    nonid = [m for m in C.morphisms if not C.is_identity(m)]
    results = []
    for obj_images in itertools.product(D.objects, repeat=len(C.objects)):
        omap = dict(zip(C.objects, obj_images))
        mmap = {C.identity[x]: D.identity[omap[x]] for x in C.objects}
        size = 1
        for m in nonid:
            size *= max(len(D.hom(omap[C.src[m]], omap[C.tgt[m]])), 1)
        check_guard(f"Fun({C.name},{D.name}) morphisms", size, guard)

        def ok(m):
            for f in list(mmap):
                if C.tgt[f] == C.src[m]:
                    h = C.compose(m, f)
                    if h in mmap and D.compose(mmap[m], mmap[f]) != mmap[h]:
                        return False
                if C.tgt[m] == C.src[f]:
                    h = C.compose(f, m)
                    if h in mmap and D.compose(mmap[f], mmap[m]) != mmap[h]:
                        return False
            return True

        def rec(k):
            if k == len(nonid):
                results.append(Functor(C, D, dict(omap), dict(mmap)))
                return
            m = nonid[k]
            for d in D.hom(omap[C.src[m]], omap[C.tgt[m]]):
                mmap[m] = d
                if ok(m):
                    rec(k + 1)
                del mmap[m]

        rec(0)
    return results


# -- classification ---------------------------------------------------------

@dataclass(frozen=True)
class FunctorClass:
    full: bool
    faithful: bool
    essentially_surjective: bool
    conservative: bool

    @property
    def epivalence(self):
        return self.full and self.essentially_surjective and self.conservative

    @property
    def equivalence(self):
        return self.full and self.faithful and self.essentially_surjective

    def to_json(self):
        return {
            "full": self.full, "faithful": self.faithful,
            "essentially_surjective": self.essentially_surjective,
            "conservative": self.conservative,
            "epivalence": self.epivalence, "equivalence": self.equivalence,
        }


def classify_map(C, target, ob, mor):
    """Classify a functor given by callbacks into a category-like target.

    Both `C` and `target` need only implement the category protocol
    (objects, hom, compose, id_of, is_iso, morphisms_iter); this lets
    comparison functors into lazily-presented iso-comma products be
    classified without materializing them.
    """
    full = True
    faithful = True
    for a in C.objects:
        for b in C.objects:
            source_hom = C.hom(a, b)
            image = [mor(m) for m in source_hom]
            if len(set(image)) != len(image):
                faithful = False
            if not set(target.hom(ob(a), ob(b))) <= set(image):
                full = False
    conservative = True
    for m in C.morphisms_iter():
        if target.is_iso(mor(m)) and not C.is_iso(m):
            conservative = False
            break
    image_objects = []
    seen = set()
    for a in C.objects:
        d = ob(a)
        if d not in seen:
            seen.add(d)
            image_objects.append(d)
    ess = True
    for d in target.objects:
        if d in seen:
            continue
        if not any(_iso_between(target, e, d) for e in image_objects):
            ess = False
            break
    return FunctorClass(full, faithful, ess, conservative)


def _iso_between(target, a, b):
    if a == b:
        return True
    return any(target.is_iso(m) for m in target.hom(a, b))


def classify_functor(F):
    return classify_map(F.source, F.target, F.ob, F.mor)


def find_equivalence(C, D, guard=None):
    """Search Fun(C,D) for an equivalence; None if there is none."""
    for F in all_functors(C, D, guard):
        if classify_functor(F).equivalence:
            return F
    return None


# -- adjunctions ------------------------------------------------------------

@dataclass
class Adjunction:
    left: Functor
    right: Functor
    unit: NatTrans
    counit: NatTrans


def triangle_identities_hold(lam, rho, unit, counit):
    """Check both composites of (lambda -| rho) triangle identities."""
    C, Cp = lam.target, lam.source
    for cp in Cp.objects:
        # counit_{lam(cp)} . lam(unit_cp) = id
        m = C.compose(counit.at(lam.ob(cp)), lam.mor(unit.at(cp)))
        if m != C.identity[lam.ob(cp)]:
            return False
    for c in C.objects:
        # rho(counit_c) . unit_{rho(c)} = id
        m = Cp.compose(rho.mor(counit.at(c)), unit.at(rho.ob(c)))
        if m != Cp.identity[rho.ob(c)]:
            return False
    return True


def find_adjunction(lam, rho, guard=None):
    """Search for an adjunction lam -| rho among enumerated 2-cells."""
    C, Cp = lam.target, lam.source
    if rho.source is not C and rho.source.objects != C.objects:
        raise StructuralError("find_adjunction: mismatched endpoints")
    units = natural_transformations(identity_functor(Cp),
                                    compose_functors(rho, lam), guard)
    counits = natural_transformations(compose_functors(lam, rho),
                                      identity_functor(C), guard)
    for unit in units:
        for counit in counits:
            if triangle_identities_hold(lam, rho, unit, counit):
                return Adjunction(lam, rho, unit, counit)
    return None


# -- Karoubi completion ------------------------------------------------------

def karoubi(C):
    """Karoubi completion and the canonical embedding c -> <c, id>."""
    idem = [p for p in C.morphisms
            if C.src[p] == C.tgt[p] and C.compose(p, p) == p]
    objects = [(C.src[p], p) for p in idem]
    mors = []
    src, tgt = {}, {}
    for (c, p) in objects:
        for (cp, pp) in objects:
            for f in C.hom(c, cp):
                if C.compose(pp, f) == f and C.compose(f, p) == f:
                    m = ((c, p), (cp, pp), f)
                    mors.append(m)
                    src[m] = (c, p)
                    tgt[m] = (cp, pp)
    ident = {(c, p): ((c, p), (c, p), p) for (c, p) in objects}

    def comp(g, f):
        return (f[0], g[1], C.compose(g[2], f[2]))

    K = FinCat(objects, mors, src, tgt, ident, compose_fn=comp,
               name=f"kar({C.name})")
    emb = Functor(C, K,
                  {c: (c, C.identity[c]) for c in C.objects},
                  {m: ((C.src[m], C.identity[C.src[m]]),
                       (C.tgt[m], C.identity[C.tgt[m]]), m)
                   for m in C.morphisms},
                  name="kar-embed")
    return K, emb


def is_karoubi_closed(C):
    """Every idempotent p splits: some (a, b) with a.b = p and b.a = id."""
    for p in C.morphisms:
        c = C.src[p]
        if C.tgt[p] != c or C.compose(p, p) != p:
            continue
        found = False
        for d in C.objects:
            for b in C.hom(c, d):
                for a in C.hom(d, c):
                    if C.compose(a, b) == p and C.compose(b, a) == C.identity[d]:
                        found = True
                        break
                if found:
                    break
            if found:
                break
        if not found:
            return False
    return True


# -- iso-comma products -------------------------------------------------------

class IsoCommaView:
    """The iso-comma product C0 x_C C1 of g0: C0 -> C, g1: C1 -> C,
    presented lazily: objects are materialized, hom sets are computed on
    demand.  Suitable for classify_map; materialize with to_fincat().
    """

    def __init__(self, g0, g1, guard=None):
        if g0.target is not g1.target and g0.target.objects != g1.target.objects:
            raise StructuralError("iso_comma_product: different targets")
        self._init(g0.source, g1.source, g0.target,
                   g0.ob, g0.mor, g1.ob, g1.mor, guard)

    @classmethod
    def from_maps(cls, C0, C1, C, ob0, mor0, ob1, mor1, guard=None):
        """Build the view from protocol categories and callback legs."""
        view = cls.__new__(cls)
        view._init(C0, C1, C, ob0, mor0, ob1, mor1, guard)
        return view

    def _init(self, C0, C1, C, ob0, mor0, ob1, mor1, guard):
        self.C0, self.C1, self.C = C0, C1, C
        self._ob0, self._mor0 = ob0, mor0
        self._ob1, self._mor1 = ob1, mor1
        check_guard("iso-comma objects",
                    len(C0.objects) * len(C1.objects), guard)
        self.objects = []
        for c0 in C0.objects:
            for c1 in C1.objects:
                for a in _isos_between(C, ob0(c0), ob1(c1)):
                    self.objects.append((c0, c1, a))
        self.identity = {(c0, c1, a): ((c0, c1, a), (c0, c1, a),
                                       (C0.id_of(c0), C1.id_of(c1)))
                         for (c0, c1, a) in self.objects}
        self._hom = {}
        self._iso = {}

    def hom(self, x, y):
        key = (x, y)
        if key in self._hom:
            return self._hom[key]
        (c0, c1, a), (d0, d1, b) = x, y
        C = self.C
        out = []
        for f0 in self.C0.hom(c0, d0):
            lhs = C.compose(b, self._mor0(f0))
            for f1 in self.C1.hom(c1, d1):
                if lhs == C.compose(self._mor1(f1), a):
                    out.append((x, y, (f0, f1)))
        self._hom[key] = out
        return out

    def src_of(self, m):
        return m[0]

    def tgt_of(self, m):
        return m[1]

    def id_of(self, x):
        return self.identity[x]

    def morphisms_iter(self):
        for x in self.objects:
            for y in self.objects:
                yield from self.hom(x, y)

    def compose(self, g, f):
        return (f[0], g[1], (self.C0.compose(g[2][0], f[2][0]),
                             self.C1.compose(g[2][1], f[2][1])))

    def is_iso(self, m):
        if m in self._iso:
            return self._iso[m]
        x, y, _ = m
        res = False
        for g in self.hom(y, x):
            if (self.compose(g, m) == self.identity[x]
                    and self.compose(m, g) == self.identity[y]):
                res = True
                break
        self._iso[m] = res
        return res

    def to_fincat(self, guard=None, name=None):
        mors = []
        total = 0
        for x in self.objects:
            for y in self.objects:
                ms = self.hom(x, y)
                total += len(ms)
                check_guard("iso-comma morphisms", total, guard)
                mors.extend(ms)
        cat = FinCat(self.objects, mors,
                     {m: m[0] for m in mors}, {m: m[1] for m in mors},
                     dict(self.identity), compose_fn=self.compose,
                     name=name or "iso-comma")
        return cat


def _isos_between(cat, a, b):
    return [m for m in cat.hom(a, b) if cat.is_iso(m)]


def iso_comma_product(g0, g1, guard=None):
    """Materialized iso-comma product with its two projections."""
    view = IsoCommaView(g0, g1, guard)
    P = view.to_fincat(guard)
    p0 = Functor(P, g0.source, {x: x[0] for x in P.objects},
                 {m: m[2][0] for m in P.morphisms}, name="pr0")
    p1 = Functor(P, g1.source, {x: x[1] for x in P.objects},
                 {m: m[2][1] for m in P.morphisms}, name="pr1")
    return P, p0, p1


@dataclass
class CatSquare:
    """A square C01 -> C0, C01 -> C1, C0 -> C <- C1 commuting up to an
    isomorphism witness g0.f0 -> g1.f1."""
    f0: Functor
    f1: Functor
    g0: Functor
    g1: Functor
    witness: NatTrans


def square_comparison(square, guard=None, lazy=False):
    """The induced functor C01 -> C0 x_C C1 as callback maps plus target."""
    f0, f1, g0, g1, w = (square.f0, square.f1, square.g0, square.g1,
                         square.witness)
    if not w.is_natural() or not w.is_iso():
        raise StructuralError("comparison_to_product: witness is not a natural iso")
    if w.source != compose_functors(g0, f0) or w.target != compose_functors(g1, f1):
        raise StructuralError("comparison_to_product: witness has wrong endpoints")
    view = IsoCommaView(g0, g1, guard)

    def ob(x):
        return (f0.ob(x), f1.ob(x), w.at(x))

    def mor(m):
        C01 = f0.source
        return (ob(C01.src[m]), ob(C01.tgt[m]), (f0.mor(m), f1.mor(m)))

    return view, ob, mor


def comparison_to_product(square, guard=None):
    """Build the comparison functor to the iso-comma product and classify it."""
    view, ob, mor = square_comparison(square, guard)
    C01 = square.f0.source
    cls = classify_map(C01, view, ob, mor)
    P = view.to_fincat(guard)
    F = Functor(C01, P, {x: ob(x) for x in C01.objects},
                {m: mor(m) for m in C01.morphisms}, name="comparison")
    return F, cls


def classify_square(square, guard=None):
    """Classification of the comparison functor, without materializing."""
    view, ob, mor = square_comparison(square, guard)
    return classify_map(square.f0.source, view, ob, mor)


# -- cylinders ---------------------------------------------------------------

@dataclass
class CylinderResult:
    cat: FinCat
    s: Functor            # C0 -> C(gamma)
    t: Functor            # C1 -> C(gamma)
    t_dagger: Functor     # C(gamma) -> C1, left adjoint to t


@dataclass
class DualCylinderResult:
    cat: FinCat
    s: Functor            # C1 -> C^o(gamma)
    t: Functor            # C0 -> C^o(gamma)
    s_dagger: Functor     # C^o(gamma) -> C1, right adjoint to s


def _cyl_cat(gamma, dual, name):
    C0, C1 = gamma.source, gamma.target
    objects = [(0, c) for c in C0.objects] + [(1, c) for c in C1.objects]
    mors, src, tgt = [], {}, {}
    for l, D in ((0, C0), (1, C1)):
        for m in D.morphisms:
            mm = (l, l, m)
            mors.append(mm)
            src[mm], tgt[mm] = (l, D.src[m]), (l, D.tgt[m])
    # cross morphisms: for the cylinder Hom(c0, c1) = C1(gamma(c0), c1);
    # for the dual cylinder Hom(c1, c0) = C1(c1, gamma(c0)).
    for c0 in C0.objects:
        for c1 in C1.objects:
            if not dual:
                for f in C1.hom(gamma.ob(c0), c1):
                    mm = (0, 1, (c0, c1, f))
                    mors.append(mm)
                    src[mm], tgt[mm] = (0, c0), (1, c1)
            else:
                for f in C1.hom(c1, gamma.ob(c0)):
                    mm = (1, 0, (c1, c0, f))
                    mors.append(mm)
                    src[mm], tgt[mm] = (1, c1), (0, c0)
    ident = {(0, c): (0, 0, C0.identity[c]) for c in C0.objects}
    ident.update({(1, c): (1, 1, C1.identity[c]) for c in C1.objects})

    def comp(g, f):
        gl0, gl1, gm = g
        fl0, fl1, fm = f
        if gl0 == gl1 and fl0 == fl1:            # same side
            D = C0 if gl0 == 0 else C1
            return (gl0, gl1, D.compose(gm, fm))
        if not dual:
            if (fl0, fl1) == (0, 1):             # cross then C1
                c0, c1, h = fm
                return (0, 1, (c0, tgt[g][1], C1.compose(gm, h)))
            # C0 then cross: g = (0,1,(c0,c1,h)), f in C0
            c0, c1, h = gm
            return (0, 1, (src[f][1], c1, C1.compose(h, gamma.mor(fm))))
        else:
            if (fl0, fl1) == (1, 0):             # cross then C0
                c1, c0, h = fm
                return (1, 0, (c1, tgt[g][1], C1.compose(gamma.mor(gm), h)))
            # C1 then cross: g = (1,0,(c1,c0,h)), f in C1
            c1, c0, h = gm
            return (1, 0, (src[f][1], c0, C1.compose(h, fm)))

    return FinCat(objects, mors, src, tgt, ident, compose_fn=comp, name=name)


def cylinder(gamma):
    C0, C1 = gamma.source, gamma.target
    cat = _cyl_cat(gamma, False, f"C({gamma.name})")
    s = Functor(C0, cat, {c: (0, c) for c in C0.objects},
                {m: (0, 0, m) for m in C0.morphisms}, name="s")
    t = Functor(C1, cat, {c: (1, c) for c in C1.objects},
                {m: (1, 1, m) for m in C1.morphisms}, name="t")
    tdag_obj = {(0, c): gamma.ob(c) for c in C0.objects}
    tdag_obj.update({(1, c): c for c in C1.objects})
    tdag_mor = {}
    for m in cat.morphisms:
        l0, l1, mm = m
        if (l0, l1) == (0, 0):
            tdag_mor[m] = gamma.mor(mm)
        elif (l0, l1) == (1, 1):
            tdag_mor[m] = mm
        else:
            tdag_mor[m] = mm[2]
    t_dagger = Functor(cat, C1, tdag_obj, tdag_mor, name="t+")
    return CylinderResult(cat, s, t, t_dagger)


def dual_cylinder(gamma):
    C0, C1 = gamma.source, gamma.target
    cat = _cyl_cat(gamma, True, f"C^o({gamma.name})")
    s = Functor(C1, cat, {c: (1, c) for c in C1.objects},
                {m: (1, 1, m) for m in C1.morphisms}, name="s")
    t = Functor(C0, cat, {c: (0, c) for c in C0.objects},
                {m: (0, 0, m) for m in C0.morphisms}, name="t")
    sdag_obj = {(0, c): gamma.ob(c) for c in C0.objects}
    sdag_obj.update({(1, c): c for c in C1.objects})
    sdag_mor = {}
    for m in cat.morphisms:
        l0, l1, mm = m
        if (l0, l1) == (0, 0):
            sdag_mor[m] = gamma.mor(mm)
        elif (l0, l1) == (1, 1):
            sdag_mor[m] = mm
        else:
            sdag_mor[m] = mm[2]
    s_dagger = Functor(cat, C1, sdag_obj, sdag_mor, name="s+")
    return DualCylinderResult(cat, s, t, s_dagger)


# -- comma categories ---------------------------------------------------------

@dataclass
class CommaResult:
    cat: FinCat
    sigma: Functor
    tau: Functor
    eta: Functor


def comma_left(pi):
    """C/_pi I: triples (c, i, alpha: pi(c) -> i).

    sigma projects to C, tau to I, and eta: C -> C/_pi I is the unit
    embedding with tau . eta = pi on the nose.
    """
    C, I = pi.source, pi.target
    objects = [(c, i, a) for c in C.objects for i in I.objects
               for a in I.hom(pi.ob(c), i)]
    mors, src, tgt = [], {}, {}
    for x in objects:
        c, i, a = x
        for y in objects:
            cp, ip, ap = y
            for f in C.hom(c, cp):
                lhs = I.compose(ap, pi.mor(f))
                for g in I.hom(i, ip):
                    if lhs == I.compose(g, a):
                        m = (x, y, (f, g))
                        mors.append(m)
                        src[m], tgt[m] = x, y
    ident = {x: (x, x, (C.identity[x[0]], I.identity[x[1]])) for x in objects}

    def comp(g, f):
        return (f[0], g[1], (C.compose(g[2][0], f[2][0]),
                             I.compose(g[2][1], f[2][1])))

    cat = FinCat(objects, mors, src, tgt, ident, compose_fn=comp,
                 name=f"{C.name}/{I.name}")
    sigma = Functor(cat, C, {x: x[0] for x in objects},
                    {m: m[2][0] for m in mors}, name="sigma")
    tau = Functor(cat, I, {x: x[1] for x in objects},
                  {m: m[2][1] for m in mors}, name="tau")
    eta_ob = {c: (c, pi.ob(c), I.identity[pi.ob(c)]) for c in C.objects}
    eta = Functor(C, cat, eta_ob,
                  {m: (eta_ob[C.src[m]], eta_ob[C.tgt[m]], (m, pi.mor(m)))
                   for m in C.morphisms},
                  name="eta")
    return CommaResult(cat, sigma, tau, eta)


def comma_right(pi):
    """I\\_pi C: triples (c, i, alpha: i -> pi(c)).

    sigma projects to I (a fibration), tau to C, eta the unit embedding
    with sigma . eta = pi.
    """
    C, I = pi.source, pi.target
    objects = [(c, i, a) for c in C.objects for i in I.objects
               for a in I.hom(i, pi.ob(c))]
    mors, src, tgt = [], {}, {}
    for x in objects:
        c, i, a = x
        for y in objects:
            cp, ip, ap = y
            for f in C.hom(c, cp):
                lhs = I.compose(pi.mor(f), a)
                for g in I.hom(i, ip):
                    if lhs == I.compose(ap, g):
                        m = (x, y, (f, g))
                        mors.append(m)
                        src[m], tgt[m] = x, y
    ident = {x: (x, x, (C.identity[x[0]], I.identity[x[1]])) for x in objects}

    def comp(g, f):
        return (f[0], g[1], (C.compose(g[2][0], f[2][0]),
                             I.compose(g[2][1], f[2][1])))

    cat = FinCat(objects, mors, src, tgt, ident, compose_fn=comp,
                 name=f"{I.name}\\{C.name}")
    sigma = Functor(cat, I, {x: x[1] for x in objects},
                    {m: m[2][1] for m in mors}, name="sigma")
    tau = Functor(cat, C, {x: x[0] for x in objects},
                  {m: m[2][0] for m in mors}, name="tau")
    eta_ob = {c: (c, pi.ob(c), I.identity[pi.ob(c)]) for c in C.objects}
    eta = Functor(C, cat, eta_ob,
                  {m: (eta_ob[C.src[m]], eta_ob[C.tgt[m]], (m, pi.mor(m)))
                   for m in C.morphisms},
                  name="eta")
    return CommaResult(cat, sigma, tau, eta)


def arrow_category(C):
    """ar(C) = C/_id C, with sigma, tau and the identity-arrow embedding eta."""
    res = comma_left(identity_functor(C))
    res.cat.name = f"ar({C.name})"
    return res


# -- groups --------------------------------------------------------------------

class FinGroup:
    def __init__(self, elements, mul, unit, name="G"):
        self.elements = tuple(elements)
        self.mul = dict(mul)
        self.unit = unit
        self.name = name
        self.inv = {}
        for g in self.elements:
            for h in self.elements:
                if self.mul[(g, h)] == unit and self.mul[(h, g)] == unit:
                    self.inv[g] = h
                    break

    def op(self, g, h):
        return self.mul[(g, h)]

    def validate(self):
        rep = CheckReport(f"validate-group({self.name})", True)
        els = set(self.elements)
        for g in self.elements:
            if self.mul.get((self.unit, g)) != g or self.mul.get((g, self.unit)) != g:
                rep.add_failure("unit", g)
            if g not in self.inv:
                rep.add_failure("no-inverse", g)
        for g in self.elements:
            for h in self.elements:
                if self.mul.get((g, h)) not in els:
                    rep.add_failure("not-closed", (g, h))
        for g in self.elements:
            for h in self.elements:
                for k in self.elements:
                    if self.mul[(self.mul[(g, h)], k)] != self.mul[(g, self.mul[(h, k)])]:
                        rep.add_failure("associativity", (g, h, k))
                        return rep
        return rep

    def center(self):
        return [z for z in self.elements
                if all(self.op(z, g) == self.op(g, z) for g in self.elements)]

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"FinGroup({self.name}, order {len(self.elements)})"


def cyclic_group(n, name=None):
    els = tuple(range(n))
    return FinGroup(els, {(a, b): (a + b) % n for a in els for b in els}, 0,
                    name=name or f"Z/{n}")


def direct_product_group(G, H, name=None):
    els = tuple((g, h) for g in G.elements for h in H.elements)
    mul = {((g1, h1), (g2, h2)): (G.op(g1, g2), H.op(h1, h2))
           for (g1, h1) in els for (g2, h2) in els}
    return FinGroup(els, mul, (G.unit, H.unit),
                    name=name or f"{G.name}x{H.name}")


def symmetric_group(n, name=None):
    els = tuple(itertools.permutations(range(n)))
    mul = {(p, q): tuple(p[q[i]] for i in range(n)) for p in els for q in els}
    return FinGroup(els, mul, tuple(range(n)), name=name or f"S{n}")


def dihedral_group(n, name=None):
    """Dihedral group of order 2n: pairs (rotation, flip)."""
    els = tuple((r, f) for r in range(n) for f in (0, 1))

    def mult(a, b):
        r1, f1 = a
        r2, f2 = b
        if f1 == 0:
            return ((r1 + r2) % n, f2)
        return ((r1 - r2) % n, 1 - f2)

    return FinGroup(els, {(a, b): mult(a, b) for a in els for b in els},
                    (0, 0), name=name or f"D{n}")


def quaternion_group(name="Q8"):
    """The quaternion group as signed units {1,i,j,k} x {+,-}."""
    base = ["1", "i", "j", "k"]
    table = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }
    els = tuple((s, b) for s in (1, -1) for b in base)

    def mult(a, b):
        s1, b1 = a
        s2, b2 = b
        s3, b3 = table[(b1, b2)]
        return (s1 * s2 * s3, b3)

    return FinGroup(els, {(a, b): mult(a, b) for a in els for b in els},
                    (1, "1"), name=name)


def group_to_groupoid(G):
    """pt_G: one object, endomorphisms G."""
    obj = "*"
    return FinCat((obj,), G.elements, {g: obj for g in G.elements},
                  {g: obj for g in G.elements}, {obj: G.unit},
                  compose_fn=lambda g, f: G.op(g, f), name=f"pt_{G.name}")


def iso_groupoid(C, name=None):
    """C_*: all objects, only the invertible morphisms."""
    mors = [m for m in C.morphisms if C.is_iso(m)]
    return FinCat(C.objects, mors, {m: C.src[m] for m in mors},
                  {m: C.tgt[m] for m in mors}, dict(C.identity),
                  compose_fn=C.compose, name=name or f"{C.name}_*")
