"""Fibrations and cofibrations over finite bases.

Cartesian maps are detected by the direct universal lifting property,
transition functors are computed from deterministically chosen cartesian
lifts, and strict diagrams over posets go back and forth through the
Grothendieck construction.  Transposition, characteristic maps, section
categories and relative functor categories all live here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fincat import (FinCat, Functor, NatTrans, classify_functor,
                     compose_functors, identity_functor, natural_isos,
                     natural_transformations, all_functors, opposite)
from .guards import StructuralError, check_guard
from .poset import FinPoset, chain_poset, poset_to_cat
from .report import CheckReport


# -- cartesian morphisms -----------------------------------------------------

def is_cartesian(pi, f):
    """Universal lifting property of f: c -> c' with respect to pi.

    For every g: d -> c' and every h in the base with pi(f).h = pi(g)
    there must be exactly one lift of h through f.
    """
    C, I = pi.source, pi.target
    c, cp = C.src[f], C.tgt[f]
    pf = pi.mor(f)
    for d in C.objects:
        pd = pi.ob(d)
        base_hs = I.hom(pd, pi.ob(c))
        for g in C.hom(d, cp):
            pg = pi.mor(g)
            for h in base_hs:
                if I.compose(pf, h) != pg:
                    continue
                lifts = [ht for ht in C.hom(d, c)
                         if pi.mor(ht) == h and C.compose(f, ht) == g]
                if len(lifts) != 1:
                    return False
    return True


def cartesian_morphisms(pi):
    return frozenset(f for f in pi.source.morphisms if is_cartesian(pi, f))


class FiberedCat:
    """A functor total -> base with its cartesian morphisms precomputed.

    Fibers, cartesian lifts and transition functors are cached; the lift
    over an identity is always the identity, and otherwise the smallest
    morphism id among valid lifts is chosen.
    """

    def __init__(self, projection, index_poset=None):
        if not projection.is_valid():
            raise StructuralError("FiberedCat: projection is not a functor")
        self.projection = projection
        self.total = projection.source
        self.base = projection.target
        self.index_poset = index_poset
        self.cartesian = cartesian_morphisms(projection)
        self._fibers = {}
        self._trans = {}
        self._comp_iso = {}

    def fiber(self, i):
        if i not in self._fibers:
            C, pi = self.total, self.projection
            e = self.base.identity[i]
            objs = [c for c in C.objects if pi.ob(c) == i]
            mors = [m for m in C.morphisms if pi.mor(m) == e]
            self._fibers[i] = FinCat(
                objs, mors,
                {m: C.src[m] for m in mors}, {m: C.tgt[m] for m in mors},
                {c: C.identity[c] for c in objs},
                compose_fn=C.compose, name=f"{C.name}_{i}")
        return self._fibers[i]

    def cartesian_lift(self, f, c):
        """Chosen cartesian lift of f with target c, or None."""
        if self.base.is_identity(f):
            return self.total.identity[c]
        cands = [m for m in self.cartesian
                 if self.total.tgt[m] == c and self.projection.mor(m) == f]
        if not cands:
            return None
        return min(cands, key=self.total.mor_key)


def is_fibration(pi):
    """Every (f: i -> i', c over i') must admit a cartesian lift onto c."""
    F = pi if isinstance(pi, FiberedCat) else FiberedCat(pi)
    rep = CheckReport(f"is_fibration({F.projection.name})", True)
    for f in F.base.morphisms:
        if F.base.is_identity(f):
            continue
        ip = F.base.tgt[f]
        for c in F.fiber(ip).objects:
            if F.cartesian_lift(f, c) is None:
                rep.add_failure("no-cartesian-lift", (f, c))
    return rep


def _op_projection(pi):
    return Functor(opposite(pi.source), opposite(pi.target),
                   pi.obj_map, pi.mor_map, name=f"{pi.name}^o")


def op_fibered(F):
    """The opposite projection as a FiberedCat."""
    J = F.index_poset.opposite() if F.index_poset is not None else None
    return FiberedCat(_op_projection(F.projection), index_poset=J)


def is_cofibration(pi):
    proj = pi.projection if isinstance(pi, FiberedCat) else pi
    rep = is_fibration(_op_projection(proj))
    rep.name = f"is_cofibration({proj.name})"
    return rep


def transition_functor(F, f):
    """f^*: fiber(target f) -> fiber(source f) along chosen cartesian lifts."""
    if f in F._trans:
        return F._trans[f]
    C, I = F.total, F.base
    i, ip = I.src[f], I.tgt[f]
    Ci, Cip = F.fiber(i), F.fiber(ip)
    obj_map, lift = {}, {}
    for c in Cip.objects:
        m = F.cartesian_lift(f, c)
        if m is None:
            raise StructuralError(f"not a fibration: no cartesian lift of ({f!r}, {c!r})")
        obj_map[c] = C.src[m]
        lift[c] = m
    mor_map = {}
    for m in Cip.morphisms:
        c, d = Cip.src[m], Cip.tgt[m]
        g = C.compose(m, lift[c])
        cands = [h for h in Ci.hom(obj_map[c], obj_map[d])
                 if C.compose(lift[d], h) == g]
        if len(cands) != 1:
            raise StructuralError(f"cartesian lift not universal at {m!r}")
        mor_map[m] = cands[0]
    T = Functor(Cip, Ci, obj_map, mor_map, name=f"({f!r})^*")
    T.lifts = lift
    F._trans[f] = T
    return T


def transition_composition_iso(F, u, v):
    """Natural isomorphism u^* . v^* -> (v.u)^* for composable u: i -> i',
    v: i' -> i''; components are the unique factorizations of composed
    lifts through the lift of the composite."""
    key = (u, v)
    if key in F._comp_iso:
        return F._comp_iso[key]
    C, I = F.total, F.base
    w = I.compose(v, u)
    Tu, Tv, Tw = transition_functor(F, u), transition_functor(F, v), \
        transition_functor(F, w)
    i = I.src[u]
    Ci = F.fiber(i)
    comp = {}
    for c in F.fiber(I.tgt[v]).objects:
        lw = F.cartesian_lift(w, c)
        lv = F.cartesian_lift(v, c)
        lu = F.cartesian_lift(u, C.src[lv])
        g = C.compose(lv, lu)
        cands = [t for t in Ci.hom(Tu.ob(Tv.ob(c)), Tw.ob(c))
                 if C.compose(lw, t) == g]
        if len(cands) != 1:
            raise StructuralError(f"composite lift not universal at {c!r}")
        comp[c] = cands[0]
    iso = NatTrans(compose_functors(Tu, Tv), Tw, comp, name="comp-iso")
    F._comp_iso[key] = iso
    return iso


# -- strict diagrams over posets ----------------------------------------------

class PosetDiagram:
    """A strict diagram of categories over a finite poset.

    variance 'contra': trans[(a,b)]: fibers[b] -> fibers[a] for a <= b,
    composing strictly down chains; 'co' points the other way.  Missing
    identity transitions are filled in automatically.
    """

    def __init__(self, index, fibers, trans, variance="contra"):
        if variance not in ("contra", "co"):
            raise StructuralError(f"unknown variance {variance!r}")
        self.index = index
        self.fibers = dict(fibers)
        self.trans = dict(trans)
        self.variance = variance
        for j in index.elements:
            self.trans.setdefault((j, j), identity_functor(self.fibers[j]))

    def fiber(self, j):
        return self.fibers[j]

    def transition(self, a, b):
        return self.trans[(a, b)]

    def validate(self):
        rep = CheckReport(f"validate-diagram({self.index.name})", True)
        J = self.index
        for (a, b) in J.le:
            T = self.trans.get((a, b))
            if T is None:
                rep.add_failure("missing-transition", (a, b))
                continue
            lo, hi = (a, b) if self.variance == "contra" else (b, a)
            if T.source is not self.fibers[hi] or T.target is not self.fibers[lo]:
                rep.add_failure("transition-endpoints", (a, b))
            elif not T.is_valid():
                rep.add_failure("transition-not-functorial", (a, b))
        if not rep.passed:
            return rep
        for a in J.elements:
            if self.trans[(a, a)] != identity_functor(self.fibers[a]):
                rep.add_failure("identity-transition", a)
        for (a, b) in J.le:
            for c in J.elements:
                if not J.leq(b, c):
                    continue
                if self.variance == "contra":
                    two = compose_functors(self.trans[(a, b)], self.trans[(b, c)])
                else:
                    two = compose_functors(self.trans[(b, c)], self.trans[(a, b)])
                if two != self.trans[(a, c)]:
                    rep.add_failure("not-strict", (a, b, c))
        return rep


def grothendieck(D, guard=None):
    """Total category of a strict diagram: a fibration for variance
    'contra', a cofibration for variance 'co', over the index poset."""
    J = D.index
    B = poset_to_cat(J)
    objects = [(j, x) for j in J.elements for x in D.fibers[j].objects]
    check_guard("grothendieck objects", len(objects), guard)
    contra = D.variance == "contra"
    mors, src, tgt = [], {}, {}
    for (a, b) in sorted(J.le, key=lambda p: (J.elements.index(p[0]),
                                              J.elements.index(p[1]))):
        T = D.trans[(a, b)]
        for x in D.fibers[a].objects:
            for y in D.fibers[b].objects:
                if contra:
                    comps = D.fibers[a].hom(x, T.ob(y))
                else:
                    comps = D.fibers[b].hom(T.ob(x), y)
                check_guard("grothendieck morphisms", len(mors) + len(comps),
                            guard)
                for m in comps:
                    mid = ((a, x), (b, y), m)
                    mors.append(mid)
                    src[mid] = (a, x)
                    tgt[mid] = (b, y)
    ident = {(j, x): ((j, x), (j, x), D.fibers[j].identity[x])
             for (j, x) in objects}

    def comp(g, f):
        (a, x), (b, _), m = f
        _, (c, z), n = g
        if contra:
            h = D.fibers[a].compose(D.trans[(a, b)].mor(n), m)
        else:
            h = D.fibers[c].compose(n, D.trans[(b, c)].mor(m))
        return ((a, x), (c, z), h)

    total = FinCat(objects, mors, src, tgt, ident, compose_fn=comp,
                   name=f"gr({J.name})")
    proj = Functor(total, B, {(j, x): j for (j, x) in objects},
                   {m: (m[0][0], m[1][0]) for m in mors}, name="gr-proj")
    return FiberedCat(proj, index_poset=J)


def diagram_map(F0, F1, comps, D0, D1, name="dmap"):
    """The functor between Grothendieck totals induced by a strict
    fiberwise morphism of diagrams: comps[j]: D0.fibers[j] -> D1.fibers[j]
    commuting with the transitions on the nose."""
    if D0.variance != D1.variance:
        raise StructuralError("diagram_map: mixed variances")
    contra = D0.variance == "contra"
    omap = {(j, x): (j, comps[j].ob(x)) for (j, x) in F0.total.objects}
    mmap = {}
    for m in F0.total.morphisms:
        (a, x), (b, y), h = m
        comp = comps[a].mor(h) if contra else comps[b].mor(h)
        mmap[m] = ((a, comps[a].ob(x)), (b, comps[b].ob(y)), comp)
    return Functor(F0.total, F1.total, omap, mmap, name=name)


def base_poset(F):
    """Index poset of a FiberedCat whose base is thin and rigid."""
    if F.index_poset is not None:
        return F.index_poset
    B = F.base
    for a in B.objects:
        for b in B.objects:
            if len(B.hom(a, b)) > 1:
                raise StructuralError("unsupported: base is not thin")
            if a != b and B.hom(a, b) and B.hom(b, a):
                raise StructuralError("unsupported: base is not rigid")
    return FinPoset(B.objects,
                    [(a, b) for a in B.objects for b in B.objects
                     if B.hom(a, b)], name=B.name)


def extract_diagram(F, strict=True):
    """Recover a contravariant PosetDiagram from a fibration over a rigid
    base, using the chosen transition functors.  With strict=True the
    result must compose strictly (true e.g. for discrete fibrations and
    Grothendieck totals); otherwise a StructuralError is raised."""
    J = base_poset(F)
    B = F.base
    fibers = {j: F.fiber(j) for j in J.elements}
    trans = {}
    for (a, b) in J.le:
        f = B.hom(a, b)[0]
        trans[(a, b)] = transition_functor(F, f)
    D = PosetDiagram(J, fibers, trans, variance="contra")
    if strict:
        rep = D.validate()
        if not rep.passed:
            raise StructuralError(
                f"transition functors do not compose strictly: {rep.failures[0]}")
    return D


# -- set-valued functors and categories of elements ---------------------------

class SetValued:
    """A functor source -> Set given by tables: sets[x] is a list and
    maps[m] a dict from sets[src m] to sets[tgt m]."""

    def __init__(self, source, sets, maps, name="X"):
        self.source = source
        self.sets = {x: tuple(v) for x, v in sets.items()}
        self.maps = {m: dict(v) for m, v in maps.items()}
        self.name = name

    def set(self, x):
        return self.sets[x]

    def map(self, m):
        return self.maps[m]

    def validate(self):
        rep = CheckReport(f"validate-set-functor({self.name})", True)
        C = self.source
        for m in C.morphisms:
            t = self.maps.get(m)
            if t is None or set(t) != set(self.sets[C.src[m]]) \
                    or not set(t.values()) <= set(self.sets[C.tgt[m]]):
                rep.add_failure("bad-map", m)
        if not rep.passed:
            return rep
        for x in C.objects:
            if self.maps[C.identity[x]] != {a: a for a in self.sets[x]}:
                rep.add_failure("identity-not-preserved", x)
        for g, f in C.composable_pairs():
            gf = self.maps[C.compose(g, f)]
            if any(gf[a] != self.maps[g][self.maps[f][a]]
                   for a in self.sets[C.src[f]]):
                rep.add_failure("composition-not-preserved", (g, f))
        return rep


def elements(X, base=None):
    """Category of elements of X: I^o -> Set, as a discrete fibration
    over I.  `base` is I itself; by default the opposite of X.source
    (which shares its morphism ids)."""
    I = base if base is not None else opposite(X.source)
    objects = [(i, a) for i in I.objects for a in X.set(i)]
    mors, src, tgt = [], {}, {}
    for f in I.morphisms:
        i, ip = I.src[f], I.tgt[f]
        # in I^o the morphism f runs i' -> i, so X(f): X(i') -> X(i)
        for b in X.set(ip):
            m = ((i, X.map(f)[b]), (ip, b), f)
            mors.append(m)
            src[m] = (i, X.map(f)[b])
            tgt[m] = (ip, b)
    ident = {(i, a): ((i, a), (i, a), I.identity[i]) for (i, a) in objects}

    def comp(g, f):
        return (f[0], g[1], I.compose(g[2], f[2]))

    total = FinCat(objects, mors, src, tgt, ident, compose_fn=comp,
                   name=f"el({X.name})")
    proj = Functor(total, I, {(i, a): i for (i, a) in objects},
                   {m: m[2] for m in mors}, name="el-proj")
    return FiberedCat(proj)


# -- transposition ------------------------------------------------------------

def _transpose_fibration(F, guard=None):
    J = base_poset(F)
    Jo = J.opposite()
    Bo = poset_to_cat(Jo)
    C, pi, B = F.total, F.projection, F.base
    mors, src, tgt = [], {}, {}
    for x in C.objects:
        j = pi.ob(x)
        for y in C.objects:
            jp = pi.ob(y)
            if not J.leq(jp, j):
                continue
            u = B.hom(jp, j)[0]
            T = transition_functor(F, u)
            comps = F.fiber(jp).hom(T.ob(x), y)
            check_guard("transpose morphisms", len(mors) + len(comps), guard)
            for m in comps:
                mid = (x, y, m)
                mors.append(mid)
                src[mid] = x
                tgt[mid] = y
    ident = {x: (x, x, C.identity[x]) for x in C.objects}

    def comp(g, f):
        x, y, m = f
        _, z, n = g
        j, jp, jpp = pi.ob(x), pi.ob(y), pi.ob(z)
        u = B.hom(jp, j)[0]
        v = B.hom(jpp, jp)[0]
        Tv = transition_functor(F, v)
        tau = transition_composition_iso(F, v, u)
        Cjpp = F.fiber(jpp)
        theta = Cjpp.inverse(tau.at(x))
        return (x, z, Cjpp.compose(n, Cjpp.compose(Tv.mor(m), theta)))

    total = FinCat(list(C.objects), mors, src, tgt, ident, compose_fn=comp,
                   name=f"{C.name}^t")
    proj = Functor(total, Bo, {x: pi.ob(x) for x in C.objects},
                   {m: (pi.ob(m[0]), pi.ob(m[1])) for m in mors},
                   name="transpose-proj")
    return FiberedCat(proj, index_poset=Jo)


def transpose(F, guard=None):
    """Transpose a fibration over a poset into a cofibration over the
    opposite poset (and vice versa), keeping the same objects."""
    if is_fibration(F).passed:
        return _transpose_fibration(F, guard)
    if is_cofibration(F).passed:
        return op_fibered(_transpose_fibration(op_fibered(F), guard))
    raise StructuralError("transpose: neither a fibration nor a cofibration")


def functors_over(F, G, base_map=None, guard=None):
    """All functors F.total -> G.total commuting with the projections,
    along an isomorphism of bases (object-identity by default)."""
    pi0, pi1 = F.projection, G.projection
    if base_map is None:
        omap = {a: a for a in F.base.objects}
        mmap = {}
        for m in F.base.morphisms:
            cands = G.base.hom(F.base.src[m], F.base.tgt[m])
            if len(cands) != 1:
                raise StructuralError("functors_over: ambiguous base identification")
            mmap[m] = cands[0]
        base_map = Functor(F.base, G.base, omap, mmap, name="base-id")
    C, D = F.total, G.total
    obj_cands = {x: [d for d in D.objects if pi1.ob(d) == base_map.ob(pi0.ob(x))]
                 for x in C.objects}
    size = 1
    for v in obj_cands.values():
        size *= max(len(v), 1)
    check_guard("functors_over objects", size, guard)
    nonid = [m for m in C.morphisms if not C.is_identity(m)]
    objs = list(C.objects)
    results = []
    omap, mmap = {}, {}

    def mor_cands(m):
        want = base_map.mor(pi0.mor(m))
        return [n for n in D.hom(omap[C.src[m]], omap[C.tgt[m]])
                if pi1.mor(n) == want]

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

    def rec_mor(k):
        if k == len(nonid):
            results.append(Functor(C, D, dict(omap), dict(mmap), name="over"))
            return
        m = nonid[k]
        for n in mor_cands(m):
            mmap[m] = n
            if ok(m):
                rec_mor(k + 1)
            del mmap[m]

    def rec_obj(k):
        if k == len(objs):
            for x in objs:
                mmap[C.identity[x]] = D.identity[omap[x]]
            rec_mor(0)
            for x in objs:
                del mmap[C.identity[x]]
            return
        x = objs[k]
        for d in obj_cands[x]:
            omap[x] = d
            rec_obj(k + 1)
            del omap[x]

    rec_obj(0)
    return results


def equivalent_over_base(F, G, base_map=None, guard=None):
    """An equivalence of totals commuting with the projections, or None."""
    for T in functors_over(F, G, base_map, guard):
        if classify_functor(T).equivalence:
            return T
    return None


# -- characteristic maps -------------------------------------------------------

def characteristic_map(iota):
    """The classifier C -> [1] of a left-closed full embedding, sending
    the image to 0 and everything else to 1."""
    cls = classify_functor(iota)
    if not (cls.full and cls.faithful):
        raise StructuralError("characteristic_map: not a full embedding")
    if len(set(iota.obj_map.values())) != len(iota.obj_map):
        raise StructuralError("characteristic_map: not injective on objects")
    C = iota.target
    image = set(iota.obj_map.values())
    for m in C.morphisms:
        if C.tgt[m] in image and C.src[m] not in image:
            raise StructuralError(f"characteristic_map: not left-closed at {m!r}")
    arrow = poset_to_cat(chain_poset(1))
    omap = {c: 0 if c in image else 1 for c in C.objects}
    return Functor(C, arrow, omap,
                   {m: (omap[C.src[m]], omap[C.tgt[m]]) for m in C.morphisms},
                   name="chi")


# -- sections -------------------------------------------------------------------

def sections(pi, guard=None):
    """The category of sections of pi: objects are pairs (s, alpha) with
    s: I -> C and alpha: pi.s ~ id, morphisms are transformations s -> s'
    compatible with the alphas."""
    C, I = pi.source, pi.target
    data = []
    idI = identity_functor(I)
    for s in all_functors(I, C, guard):
        for al in natural_isos(compose_functors(pi, s), idI, guard):
            data.append((s, al))
    objects = list(range(len(data)))
    iobjs = list(I.objects)
    mors, src, tgt = [], {}, {}
    for a in objects:
        sa, ala = data[a]
        for b in objects:
            sb, alb = data[b]
            for phi in natural_transformations(sa, sb, guard):
                if any(I.compose(alb.at(i), pi.mor(phi.at(i))) != ala.at(i)
                       for i in iobjs):
                    continue
                m = (a, b, tuple(phi.at(i) for i in iobjs))
                check_guard("sections morphisms", len(mors) + 1, guard)
                mors.append(m)
                src[m] = a
                tgt[m] = b
    ident = {a: (a, a, tuple(C.identity[data[a][0].ob(i)] for i in iobjs))
             for a in objects}

    def comp(g, f):
        return (f[0], g[1], tuple(C.compose(x, y)
                                  for x, y in zip(g[2], f[2])))

    cat = FinCat(objects, mors, src, tgt, ident, compose_fn=comp,
                 name=f"sec({pi.name})")
    cat.section_data = data
    return cat


# -- functor categories and relative Fun ----------------------------------------

def functor_key(T):
    return (tuple(T.obj_map[x] for x in T.source.objects),
            tuple(T.mor_map[m] for m in T.source.morphisms))


def fun_cat(C, E, guard=None, name=None):
    """The category Fun(C, E), with functors interned as integer object
    ids; returns (category, list of functors in object order)."""
    funs = all_functors(C, E, guard)
    objects = list(range(len(funs)))
    cobjs = list(C.objects)
    mors, src, tgt = [], {}, {}
    for a in objects:
        for b in objects:
            for al in natural_transformations(funs[a], funs[b], guard):
                m = (a, b, tuple(al.at(x) for x in cobjs))
                check_guard("fun_cat morphisms", len(mors) + 1, guard)
                mors.append(m)
                src[m] = a
                tgt[m] = b
    ident = {a: (a, a, tuple(E.identity[funs[a].ob(x)] for x in cobjs))
             for a in objects}

    def comp(g, f):
        return (f[0], g[1], tuple(E.compose(x, y) for x, y in zip(g[2], f[2])))

    cat = FinCat(objects, mors, src, tgt, ident, compose_fn=comp,
                 name=name or f"Fun({C.name},{E.name})")
    return cat, funs


@dataclass
class RelativeFun:
    fibered: FiberedCat           # the relative functor category over J
    diagram: PosetDiagram         # its strict diagram of fibers
    funs: dict                    # j -> list of functors C_j -> E
    source: object                # the input FiberedCat
    target: FinCat                # E


def relative_fun(F, E, guard=None):
    """Fun(F|J, E): fiber over j is Fun(C_j, E), transitions precompose
    with the transition functors of F.  A fibration input yields a
    cofibration and vice versa; the chosen transitions of F must compose
    strictly (true for discrete and Grothendieck-built inputs)."""
    fib = is_fibration(F).passed
    if fib:
        D = extract_diagram(F)
    else:
        if not is_cofibration(F).passed:
            raise StructuralError("relative_fun: not a (co)fibration")
        Dop = extract_diagram(op_fibered(F))
        # covariant transitions of the cofibration, as functors of fibers
        D = _co_diagram_from_op(F, Dop)
    J = D.index
    fibers, funs, index_of = {}, {}, {}
    for j in J.elements:
        fibers[j], funs[j] = fun_cat(D.fibers[j], E, guard)
        index_of[j] = {functor_key(T): k for k, T in enumerate(funs[j])}
    out_variance = "co" if fib else "contra"
    trans = {}
    for (a, b) in J.le:
        T = D.trans[(a, b)]          # contra: C_b -> C_a ; co: C_a -> C_b
        # precomposition Fun(T.target, E) -> Fun(T.source, E)
        src_j = T.target
        src_key = a if D.variance == "contra" else b
        tgt_key = b if D.variance == "contra" else a
        omap, mmap = {}, {}
        srcobjs = list(src_j.objects)
        for k, G in enumerate(funs[src_key]):
            omap[k] = index_of[tgt_key][functor_key(compose_functors(G, T))]
        for m in fibers[src_key].morphisms:
            k1, k2, comps = m
            by_obj = dict(zip(srcobjs, comps))
            mmap[m] = (omap[k1], omap[k2],
                       tuple(by_obj[T.ob(x)] for x in T.source.objects))
        trans[(a, b)] = Functor(fibers[src_key], fibers[tgt_key], omap, mmap,
                                name=f"pre({a},{b})")
    RD = PosetDiagram(J, fibers, trans, variance=out_variance)
    return RelativeFun(grothendieck(RD, guard), RD, funs, F, E)


def _co_diagram_from_op(F, Dop):
    """Reinterpret the contra diagram of the opposite fibration as a
    covariant diagram of the cofibration itself."""
    Jop = Dop.index
    J = Jop.opposite()
    fibers = {j: F.fiber(j) for j in J.elements}
    trans = {}
    for (a, b) in J.le:
        Top = Dop.trans[(b, a)]       # fiber^op(b)... -> fiber^op(a)? no:
        # Dop is contra over J^o: trans[(b,a)]: fiber_op(a) -> fiber_op(b)
        trans[(a, b)] = Functor(fibers[a], fibers[b], Top.obj_map,
                                Top.mor_map, name=f"({a},{b})_!")
    return PosetDiagram(J, fibers, trans, variance="co")


def pullback_functors(p, q, guard=None):
    """Strict pullback of two functors with a common target.

    Returns (total, leg to p.source, leg to q.source).
    """
    C, D = p.source, q.source
    objects = [(x, y) for x in C.objects for y in D.objects
               if p.ob(x) == q.ob(y)]
    check_guard("pullback objects", len(objects), guard)
    mors, src, tgt = [], {}, {}
    for m in C.morphisms:
        pm = p.mor(m)
        for n in D.morphisms:
            if q.mor(n) != pm:
                continue
            mid = (m, n)
            check_guard("pullback morphisms", len(mors) + 1, guard)
            mors.append(mid)
            src[mid] = (C.src[m], D.src[n])
            tgt[mid] = (C.tgt[m], D.tgt[n])
    ident = {(x, y): (C.identity[x], D.identity[y]) for (x, y) in objects}
    total = FinCat(objects, mors, src, tgt, ident,
                   compose_fn=lambda g, f: (C.compose(g[0], f[0]),
                                            D.compose(g[1], f[1])),
                   name=f"{C.name}x{D.name}")
    leg0 = Functor(total, C, {o: o[0] for o in objects},
                   {m: m[0] for m in mors}, name="pb-pr0")
    leg1 = Functor(total, D, {o: o[1] for o in objects},
                   {m: m[1] for m in mors}, name="pb-pr1")
    return total, leg0, leg1


def fiber_product_over(F, G, guard=None):
    """Strict fiber product of two projections over the same base.

    Returns (total, projection-to-base, leg to F.total, leg to G.total).
    """
    C, D = F.total, G.total
    p0, p1 = F.projection, G.projection
    objects = [(x, c) for x in C.objects for c in D.objects
               if p0.ob(x) == p1.ob(c)]
    check_guard("fiber product objects", len(objects), guard)
    mors, src, tgt = [], {}, {}
    for m in C.morphisms:
        pm = p0.mor(m)
        for n in D.morphisms:
            if p1.mor(n) != pm:
                continue
            mid = (m, n)
            check_guard("fiber product morphisms", len(mors) + 1, guard)
            mors.append(mid)
            src[mid] = (C.src[m], D.src[n])
            tgt[mid] = (C.tgt[m], D.tgt[n])
    ident = {(x, c): (C.identity[x], D.identity[c]) for (x, c) in objects}

    def comp(g, f):
        return (C.compose(g[0], f[0]), D.compose(g[1], f[1]))

    total = FinCat(objects, mors, src, tgt, ident, compose_fn=comp,
                   name=f"{C.name}x_B{D.name}")
    proj = Functor(total, F.base, {(x, c): p0.ob(x) for (x, c) in objects},
                   {m: p0.mor(m[0]) for m in mors}, name="fp-proj")
    leg0 = Functor(total, C, {o: o[0] for o in objects},
                   {m: m[0] for m in mors}, name="fp-pr0")
    leg1 = Functor(total, D, {o: o[1] for o in objects},
                   {m: m[1] for m in mors}, name="fp-pr1")
    return total, proj, leg0, leg1


def relative_factorization(RF, Cover, gamma, guard=None):
    """Check the universal property of RF = relative_fun(F, E) on a test
    pair: Cover a FiberedCat over the same base and gamma a functor from
    the fiber product F x_B Cover to E.  Builds the transpose functor
    gamma~: Cover.total -> RF.total over the base and verifies that
    evaluation recovers gamma exactly."""
    F, E = RF.source, RF.target
    rep = CheckReport("relative-factorization", True)
    P, _, prF, prC = fiber_product_over(F, Cover, guard)
    fibration = is_fibration(F).passed
    J = RF.diagram.index
    pi, piC = F.projection, Cover.projection
    B = F.base

    # pointwise functors Phi_c: C_i -> E
    phi_idx, phi_fun = {}, {}
    for c in Cover.total.objects:
        i = piC.ob(c)
        Ci = F.fiber(i)
        omap = {x: gamma.ob((x, c)) for x in Ci.objects}
        mmap = {u: gamma.mor((u, Cover.total.identity[c])) for u in Ci.morphisms}
        Phi = Functor(Ci, E, omap, mmap, name=f"Phi_{c!r}")
        if not Phi.is_valid():
            rep.add_failure("pointwise-not-functorial", c)
            return rep
        key = functor_key(Phi)
        idx = next((k for k, T in enumerate(RF.funs[i])
                    if functor_key(T) == key), None)
        if idx is None:
            rep.add_failure("pointwise-functor-missing", c)
            return rep
        phi_idx[c] = (i, idx)
        phi_fun[c] = Phi

    # the comparison functor on morphisms of Cover.total
    tilde_ob = {c: phi_idx[c] for c in Cover.total.objects}
    tilde_mor = {}
    for n in Cover.total.morphisms:
        c, cp = Cover.total.src[n], Cover.total.tgt[n]
        i, ip = piC.ob(c), piC.ob(cp)
        u = piC.mor(n)
        idx_c, idx_cp = phi_idx[c][1], phi_idx[cp][1]
        T_rf = RF.diagram.trans[(i, ip)]
        if fibration:
            T = transition_functor(F, u)
            comps = []
            for x in F.fiber(ip).objects:
                lift = T.lifts[x] if not B.is_identity(u) else F.total.identity[x]
                comps.append(gamma.mor((lift, n)))
            mfib = (T_rf.ob(idx_c), idx_cp, tuple(comps))
        else:
            G = op_fibered(F)
            T = transition_functor(G, u)   # pushforward i -> i'
            comps = []
            for x in F.fiber(i).objects:
                lift = T.lifts[x] if not B.is_identity(u) else F.total.identity[x]
                comps.append(gamma.mor((lift, n)))
            mfib = (idx_c, T_rf.ob(idx_cp), tuple(comps))
        tilde_mor[n] = (tilde_ob[c], tilde_ob[cp], mfib)
    tilde = Functor(Cover.total, RF.fibered.total, tilde_ob, tilde_mor,
                    name="gamma~")
    if not tilde.is_valid():
        rep.add_failure("comparison-not-functorial", None)
        return rep

    # evaluation recovers gamma on every morphism of the fiber product
    for (m, n) in P.morphisms:
        x, c = F.total.src[m], Cover.total.src[n]
        xp, cp = F.total.tgt[m], Cover.total.tgt[n]
        u = pi.mor(m)
        Phi = phi_fun[c]
        comps = tilde_mor[n][2][2]
        if fibration:
            i, ip = pi.ob(x), pi.ob(xp)
            T = transition_functor(F, u)
            lift = (T.lifts[xp] if not B.is_identity(u)
                    else F.total.identity[xp])
            mbar = next(h for h in F.fiber(i).hom(x, F.total.src[lift])
                        if F.total.compose(lift, h) == m)
            fiber_objs = list(F.fiber(ip).objects)
            kappa = comps[fiber_objs.index(xp)]
            value = E.compose(kappa, Phi.mor(mbar))
        else:
            G = op_fibered(F)
            i, ip = pi.ob(x), pi.ob(xp)
            T = transition_functor(G, u)
            lift = (T.lifts[x] if not B.is_identity(u)
                    else F.total.identity[x])
            mbar = next(h for h in F.fiber(ip).hom(F.total.tgt[lift], xp)
                        if F.total.compose(h, lift) == m)
            fiber_objs = list(F.fiber(i).objects)
            kappa = comps[fiber_objs.index(x)]
            value = E.compose(phi_fun[cp].mor(mbar), kappa)
        if value != gamma.mor((m, n)):
            rep.add_failure("factorization-mismatch", (m, n))
            return rep
    rep.details["comparison"] = repr(tilde)
    return rep


# -- functors over a base --------------------------------------------------------

@dataclass
class LaxFunctorOver:
    """A functor between totals with a comparison 2-cell over the base;
    it is a functor over the base exactly when the 2-cell is invertible."""
    gamma: Functor                 # C0 -> C1
    alpha: NatTrans                # pi0 -> pi1 . gamma

    def validate(self):
        rep = CheckReport("validate-lax-over", True)
        if not self.alpha.is_natural():
            rep.add_failure("comparison-not-natural", None)
        return rep

    def is_functor_over(self):
        return self.validate().passed and self.alpha.is_iso()


def is_cartesian_functor(gamma, F0, F1):
    """Does gamma: F0.total -> F1.total over the base send cartesian maps
    to cartesian maps?"""
    rep = CheckReport(f"is_cartesian_functor({gamma.name})", True)
    over = compose_functors(F1.projection, gamma)
    if (over.obj_map != F0.projection.obj_map
            or over.mor_map != F0.projection.mor_map):
        rep.add_failure("not-over-the-base", None)
        return rep
    for m in sorted(F0.cartesian, key=F0.total.mor_key):
        if gamma.mor(m) not in F1.cartesian:
            rep.add_failure("cartesian-not-preserved", m)
    return rep
