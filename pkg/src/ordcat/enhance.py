"""Families of categories over finite posets and probe-based axiom checks.

A FamilyOracle presents a fibration over finite posets lazily: it
answers fiber and transition queries for the finitely many probes that
are actually evaluated.  Probes certify the enhancement axioms
(non-degeneracy, reflexivity, separatedness, additivity, semiexactness,
excision in both variants, and the cylinder axiom) at explicit finite
instances.  A passing suite certifies nothing beyond the instances
tested; the summary verdict says so.

Fibers of the built-in oracles are functor categories Fun(J^o, E).  For
a thin skeletal E they are posets of monotone maps and all probe
classifications reduce to pointwise-order bookkeeping on bitmasks; for
a general E (one-object groupoids in the test corpus) objects carry
explicit morphism assignments and hom sets are enumerated on demand.
"""

import itertools
from dataclasses import dataclass, field
from types import SimpleNamespace

from .guards import StructuralError, check_guard
from .report import CheckReport
from .poset import (FinPoset, PosetMap, chain_poset, discrete_poset,
                    product_poset, subposet, cone_left, linear_extension,
                    all_monotone_maps, canonical_poset, enumerate_posets,
                    standard_pushout_square, excision_square, cylinder_square)
from .fincat import (FinCat, Functor, IsoCommaView, classify_map, FunctorClass,
                     opposite)

PT = chain_poset(0)
PT_I = product_poset(PT, chain_poset(1), name="ptx[1]")


# -- fiber categories Fun(J^o, E) ---------------------------------------------

def poset_of_thin(E):
    """The underlying poset of a thin skeletal category, else None."""
    for a in E.objects:
        for b in E.objects:
            if len(E.hom(a, b)) > 1:
                return None
            if a != b and E.hom(a, b) and E.hom(b, a):
                return None
    le = [(a, b) for a in E.objects for b in E.objects if E.hom(a, b)]
    return FinPoset(tuple(E.objects), le, name=E.name)


class ThinFunCat:
    """Monotone maps J^o -> Q as a thin skeletal category.

    Objects are value tuples indexed by J.elements; a morphism x -> y is
    the pair (x, y) and exists iff x <= y pointwise.  Pointwise order is
    tested with down-set bitmasks, so hom checks are integer ops.
    """

    thin = True

    def __init__(self, J, Q, guard=None, name=None):
        self.J, self.Q = J, Q
        self.name = name or f"Fun({J.name}^o,{Q.name})"
        self.elements = J.elements
        self.pos = {x: i for i, x in enumerate(self.elements)}
        P = J.opposite()
        maps = all_monotone_maps(P, Q, guard)
        self.objects = sorted(
            tuple(f.mapping[x] for x in self.elements) for f in maps)
        self.intern = {c: c for c in self.objects}
        qpos = {q: i for i, q in enumerate(Q.elements)}
        down = {q: sum(1 << qpos[r] for r in Q.down_set(q)) for q in Q.elements}
        nq = len(Q.elements)
        self._mask = {
            c: sum(down[v] << (i * nq) for i, v in enumerate(c))
            for c in self.objects}
        self.identity = {c: (c, c) for c in self.objects}

    def leq(self, x, y):
        return self._mask[x] & ~self._mask[y] == 0

    def hom(self, x, y):
        return [(x, y)] if self.leq(x, y) else []

    def compose(self, g, f):
        if f[1] != g[0]:
            raise StructuralError("not composable")
        return (f[0], g[1])

    def id_of(self, x):
        return self.identity[x]

    def src_of(self, m):
        return m[0]

    def tgt_of(self, m):
        return m[1]

    def is_iso(self, m):
        return m[0] == m[1]

    def inverse(self, m):
        if m[0] != m[1]:
            raise StructuralError("not invertible")
        return m

    def iso_data(self, guard=None):
        """Thin skeletal: every object is its own isomorphism class."""
        return SimpleNamespace(
            rep_of={c: c for c in self.objects},
            to_rep={c: (c, c) for c in self.objects},
            reps=list(self.objects))

    def morphisms_iter(self):
        for x in self.objects:
            for y in self.objects:
                if self.leq(x, y):
                    yield (x, y)

    def to_fincat(self, guard=None, name=None):
        mors = list(self.morphisms_iter())
        check_guard("thin fiber morphisms", len(mors), guard)
        return FinCat(list(self.objects), mors,
                      {m: m[0] for m in mors}, {m: m[1] for m in mors},
                      dict(self.identity), compose_fn=self.compose,
                      name=name or self.name)


class GenFunCat:
    """Functors J^o -> E for an arbitrary finite E, enumerated once.

    An object is (values, arrows) with values indexed by J.elements and
    arrows indexed by the strict relations of J^o; a morphism is
    (F, G, components) with one E-morphism per element.  Hom sets are
    enumerated on demand and memoized.
    """

    thin = False

    def __init__(self, J, E, guard=None, name=None):
        self.J, self.E = J, E
        self.name = name or f"Fun({J.name}^o,{E.name})"
        self.elements = J.elements
        self.pos = {x: i for i, x in enumerate(self.elements)}
        P = J.opposite()
        self.P = P
        rels = sorted(((a, b) for a in P.elements for b in P.elements
                       if a != b and P.leq(a, b)), key=repr)
        # intervals first, so that composites are forced when reached
        rels.sort(key=lambda r: sum(1 for z in P.elements
                                    if z not in r and P.leq(r[0], z)
                                    and P.leq(z, r[1])))
        self.relations = rels
        self.relindex = {r: i for i, r in enumerate(rels)}
        self.order = linear_extension(P)
        self.is_groupoid = all(E.is_iso(m) for m in E.morphisms)
        self.objects = self._enumerate(guard)
        self.intern = {c: c for c in self.objects}
        self.identity = {
            F: (F, F, tuple(E.identity[F[0][self.pos[x]]]
                            for x in self.elements))
            for F in self.objects}
        self._hom = {}
        self._auts = {}
        self._isodata = None

    def _enumerate(self, guard):
        E, P = self.E, self.P
        check_guard(f"functors into {E.name}",
                    max(len(E.objects), 1) ** len(self.elements), guard)
        between = {
            r: [z for z in P.elements
                if z not in r and P.leq(r[0], z) and P.leq(z, r[1])]
            for r in self.relations}
        covers = [r for r in self.relations if not between[r]]
        # factorizations of each composite relation, indexed by either leg,
        # so that setting one leg can immediately force (and cross-check)
        # the composite
        users = {}
        for r in self.relations:
            for z in between[r]:
                p1, p2 = (r[0], z), (z, r[1])
                users.setdefault(p1, []).append((r, p2, True))
                users.setdefault(p2, []).append((r, p1, False))
        out = []
        order = self.order
        vals = {}
        arrows = {}
        trail = []

        def derive(d):
            # propagate a newly set relation value; False on inconsistency
            stack = [d]
            while stack:
                dd = stack.pop()
                mdd = arrows[dd]
                for r, other, dd_is_first in users.get(dd, ()):
                    mo = arrows.get(other)
                    if mo is None:
                        continue
                    val = (E.compose(mo, mdd) if dd_is_first
                           else E.compose(mdd, mo))
                    cur = arrows.get(r)
                    if cur is None:
                        arrows[r] = val
                        trail.append(r)
                        stack.append(r)
                    elif cur != val:
                        return False
            return True

        def assign_covers(k):
            if k == len(covers):
                out.append((tuple(vals[x] for x in self.elements),
                            tuple(arrows[r] for r in self.relations)))
                return
            r = covers[k]
            for m in E.hom(vals[r[0]], vals[r[1]]):
                mark = len(trail)
                arrows[r] = m
                trail.append(r)
                if derive(r):
                    assign_covers(k + 1)
                while len(trail) > mark:
                    del arrows[trail.pop()]

        def assign_values(k):
            if k == len(order):
                assign_covers(0)
                return
            x = order[k]
            for e in E.objects:
                if all(E.hom(vals[y], e)
                       for y in order[:k] if P.leq(y, x)):
                    vals[x] = e
                    assign_values(k + 1)
                    del vals[x]

        assign_values(0)
        return sorted(out, key=repr)

    def value(self, F, x):
        return F[0][self.pos[x]]

    def arrow(self, F, r):
        return F[1][self.relindex[r]]

    def hom(self, F, G):
        key = (id(F), id(G))
        cached = self._hom.get(key)
        if cached is not None:
            return cached[1]
        if self.is_groupoid:
            # every component of a transformation into a groupoid is
            # invertible, so Hom(F, G) is the conjugate of Aut(rep) by the
            # gauges onto the common representative -- and empty when the
            # representatives differ
            d = self.iso_data()
            rep = _rep_lookup(d, F)
            if rep != _rep_lookup(d, G):
                out = []
            else:
                E = self.E
                tF = _gauge_lookup(d, F)[2]
                tGi = tuple(E.inverse(t) for t in _gauge_lookup(d, G)[2])
                out = [(F, G,
                        tuple(E.compose(gi, E.compose(w, f))
                              for gi, w, f in zip(tGi, a[2], tF)))
                       for a in self._rep_auts(rep)]
            self._hom[key] = ((F, G), out)
            return out
        out = self._hom_backtrack(F, G)
        self._hom[key] = ((F, G), out)
        return out

    def _rep_auts(self, rep):
        if rep not in self._auts:
            self._auts[rep] = self._hom_backtrack(rep, rep)
        return self._auts[rep]

    def _hom_backtrack(self, F, G):
        E, P = self.E, self.P
        order = self.order
        out = []
        comp = {}

        def rec(k):
            if k == len(order):
                out.append((F, G, tuple(comp[x] for x in self.elements)))
                return
            x = order[k]
            for t in E.hom(self.value(F, x), self.value(G, x)):
                ok = True
                for y in order[:k]:
                    if P.leq(y, x):
                        if E.compose(t, self.arrow(F, (y, x))) != \
                                E.compose(self.arrow(G, (y, x)), comp[y]):
                            ok = False
                            break
                if ok:
                    comp[x] = t
                    rec(k + 1)
                    del comp[x]

        rec(0)
        return out

    def compose(self, g, f):
        if f[1] != g[0]:
            raise StructuralError("not composable")
        comps = tuple(self.E.compose(a, b) for a, b in zip(g[2], f[2]))
        return (f[0], g[1], comps)

    def id_of(self, x):
        return self.identity[x]

    def src_of(self, m):
        return m[0]

    def tgt_of(self, m):
        return m[1]

    def is_iso(self, m):
        if self.is_groupoid:
            return True
        return all(self.E.is_iso(t) for t in m[2])

    def inverse(self, m):
        return (m[1], m[0], tuple(self.E.inverse(t) for t in m[2]))

    def iso_data(self, guard=None):
        """Isomorphism classes with a chosen iso to each representative.

        For a groupoid target the classes are computed by gauge fixing:
        every object is conjugated so that its values sit at chosen
        E-representatives and its arrows on a spanning forest of the
        comparability graph become identities; the leftover freedom is
        the finite choice of gauge at each component root, minimized
        lexicographically.  Otherwise classes are found by pairwise
        search, guarded.
        """
        if self._isodata is None:
            if self.is_groupoid:
                self._isodata = self._gauge_classes()
            else:
                self._isodata = _brute_iso_data(self, guard)
        return self._isodata

    def _forest(self):
        """Spanning forest of the comparability graph: per element its
        discovery parent and the relation joining them."""
        P = self.P
        neigh = {x: [] for x in self.elements}
        for (a, b) in self.relations:
            neigh[a].append((b, (a, b)))
            neigh[b].append((a, (a, b)))
        seen = {}
        components = []
        for start in self.elements:
            if start in seen:
                continue
            comp, queue = [], [start]
            seen[start] = (None, None)
            while queue:
                x = queue.pop(0)
                comp.append(x)
                for y, rel in neigh[x]:
                    if y not in seen:
                        seen[y] = (x, rel)
                        queue.append(y)
            components.append(comp)
        return components, seen

    def _gauge_classes(self):
        E = self.E
        rep_e, to_rep_e = {}, {}
        for e in E.objects:
            for r in rep_e.values():
                isos = [m for m in E.hom(e, r) if E.is_iso(m)]
                if isos:
                    rep_e[e], to_rep_e[e] = r, isos[0]
                    break
            else:
                rep_e[e], to_rep_e[e] = e, E.identity[e]
        components, parent = self._forest()
        rep_of, to_rep = {}, {}
        for F in self.objects:
            gauge = {}
            for comp in components:
                best = None
                root = comp[0]
                e0 = rep_e[self.value(F, root)]
                for t0 in (m for m in E.hom(self.value(F, root), e0)
                           if E.is_iso(m)):
                    t = {root: t0}
                    for x in comp[1:]:
                        p, rel = parent[x]
                        if rel == (p, x):
                            t[x] = E.compose(t[p], E.inverse(self.arrow(F, rel)))
                        else:
                            t[x] = E.compose(t[p], self.arrow(F, rel))
                    key = tuple(
                        E.compose(E.compose(t[b], self.arrow(F, (a, b))),
                                  E.inverse(t[a]))
                        for (a, b) in self.relations if a in t and b in t)
                    if best is None or repr(key) < repr(best[0]):
                        best = (key, t)
                gauge.update(best[1] if best else
                             {root: to_rep_e[self.value(F, root)]})
            vals = tuple(rep_e[v] for v in F[0])
            arrows = tuple(
                E.compose(E.compose(gauge[b], self.arrow(F, (a, b))),
                          E.inverse(gauge[a]))
                for (a, b) in self.relations)
            G = (vals, arrows)
            rep_of[F] = G
            to_rep[F] = (F, G, tuple(gauge[x] for x in self.elements))
        reps = sorted(set(rep_of.values()), key=repr)
        # id-keyed mirrors avoid rehashing large tuples on hot lookups;
        # the keys are pinned by self.objects
        return SimpleNamespace(rep_of=rep_of, to_rep=to_rep, reps=reps,
                               rep_id={id(F): G for F, G in rep_of.items()},
                               to_rep_id={id(F): t
                                          for F, t in to_rep.items()})

    def morphisms_iter(self):
        for x in self.objects:
            for y in self.objects:
                yield from self.hom(x, y)

    def to_fincat(self, guard=None, name=None):
        mors = []
        for x in self.objects:
            for y in self.objects:
                mors.extend(self.hom(x, y))
                check_guard("fiber morphisms", len(mors), guard)
        return FinCat(list(self.objects), mors,
                      {m: m[0] for m in mors}, {m: m[1] for m in mors},
                      dict(self.identity), compose_fn=self.compose,
                      name=name or self.name)


def _brute_iso_data(C, guard=None):
    """Isomorphism classes of a fiber by pairwise search."""
    check_guard("iso class search", len(C.objects) ** 2, guard)
    rep_of, to_rep, reps = {}, {}, []
    for x in C.objects:
        for r in reps:
            iso = next((m for m in C.hom(x, r) if C.is_iso(m)), None)
            if iso is not None:
                rep_of[x], to_rep[x] = r, iso
                break
        else:
            rep_of[x], to_rep[x] = x, C.id_of(x)
            reps.append(x)
    return SimpleNamespace(rep_of=rep_of, to_rep=to_rep, reps=reps)


def fun_fiber(J, E, guard=None):
    """Fun(J^o, E) in the representation suited to E."""
    Q = poset_of_thin(E)
    if Q is not None:
        return ThinFunCat(J, Q, guard)
    return GenFunCat(J, E, guard)


# -- transition maps between fibers --------------------------------------------

class FiberMap:
    """A functor between fiber categories given by callbacks.

    Values are memoized: probe classifications evaluate the same
    restriction on the same object many times over.
    """

    def __init__(self, source, target, ob, mor, name="f*"):
        self.source, self.target = source, target
        self._ob_fn, self._mor_fn = ob, mor
        self._ob_cache, self._mor_cache = {}, {}
        self.name = name

    def ob(self, x):
        # keyed by identity: fiber objects and memoized hom/transition
        # outputs are stable instances, and the stored argument pins the
        # key against reuse of its id
        cached = self._ob_cache.get(id(x))
        if cached is None:
            cached = self._ob_cache[id(x)] = (x, self._ob_fn(x))
        return cached[1]

    def mor(self, m):
        cached = self._mor_cache.get(id(m))
        if cached is None:
            cached = self._mor_cache[id(m)] = (m, self._mor_fn(m))
        return cached[1]

    def __repr__(self):
        return f"FiberMap({self.name}: {self.source.name} -> {self.target.name})"


def compose_fiber_maps(g, f):
    return FiberMap(f.source, g.target,
                    lambda x: g.ob(f.ob(x)), lambda m: g.mor(f.mor(m)),
                    name=f"{g.name}.{f.name}")


def _precompose_thin(f, fibJp, fibJ):
    pos = fibJp.pos
    intern = fibJ.intern

    def ob(c):
        t = tuple(c[pos[f.mapping[x]]] for x in fibJ.elements)
        return intern.get(t, t)

    return FiberMap(fibJp, fibJ, ob, lambda m: (ob(m[0]), ob(m[1])),
                    name=f"{f.name}*")


def _precompose_gen(f, fibJp, fibJ):
    E = fibJ.E
    pos = fibJp.pos
    intern = fibJ.intern

    def ob(c):
        vals = tuple(c[0][pos[f.mapping[x]]] for x in fibJ.elements)
        arrows = []
        for (a, b) in fibJ.relations:
            fa, fb = f.mapping[a], f.mapping[b]
            if fa == fb:
                arrows.append(E.identity[c[0][pos[fa]]])
            else:
                arrows.append(c[1][fibJp.relindex[(fa, fb)]])
        t = (vals, tuple(arrows))
        return intern.get(t, t)

    fm = FiberMap(fibJp, fibJ, ob, None, name=f"{f.name}*")

    def mor(m):
        comps = tuple(m[2][pos[f.mapping[x]]] for x in fibJ.elements)
        return (fm.ob(m[0]), fm.ob(m[1]), comps)

    fm._mor_fn = mor
    return fm


# -- family oracles ------------------------------------------------------------

class FamilyOracle:
    """A family of categories over finite posets, evaluated lazily.

    fiber(J) is the fiber over J; transition(f) for f: J -> J' is the
    restriction functor fiber(J') -> fiber(J).  Built-in oracles are
    strict: transition(id) = id and transition(g.f) =
    transition(f).transition(g) hold on the nose.
    """

    def __init__(self, name, fiber_fn, transition_fn, strict=True):
        if not strict:
            raise StructuralError("family oracles must be strict")
        self.name = name
        self.strict = True
        self._fiber_fn = fiber_fn
        self._transition_fn = transition_fn
        self._fibers = {}
        self._trans = {}
        self._refl = {}

    def fiber(self, J, guard=None):
        key = J.key()
        if key not in self._fibers:
            self._fibers[key] = self._fiber_fn(J, guard)
        return self._fibers[key]

    def transition(self, f, guard=None):
        key = (f.source.key(), f.target.key(),
               tuple(sorted(f.mapping.items(), key=repr)))
        if key not in self._trans:
            self._trans[key] = self._transition_fn(
                f, self.fiber(f.target, guard), self.fiber(f.source, guard))
        return self._trans[key]


def k_oracle(E):
    """The family J |-> Fun(J^o, E) with precomposition transitions."""
    thin = poset_of_thin(E) is not None

    def fiber_fn(J, guard):
        return fun_fiber(J, E, guard)

    def transition_fn(f, fibJp, fibJ):
        if thin:
            return _precompose_thin(f, fibJp, fibJ)
        return _precompose_gen(f, fibJp, fibJ)

    return FamilyOracle(f"K({E.name})", fiber_fn, transition_fn)


def k_opposite(E):
    """The enhanced opposite of the K-oracle, which is K of the opposite."""
    return k_oracle(opposite(E))


class _DiscreteView:
    """The discrete category on the objects of a fiber."""

    thin = False

    def __init__(self, base):
        self.base = base
        self.name = f"disc({base.name})"
        self.objects = base.objects
        self.identity = {x: base.id_of(x) for x in base.objects}

    def hom(self, x, y):
        return [self.identity[x]] if x == y else []

    def compose(self, g, f):
        return g

    def id_of(self, x):
        return self.identity[x]

    def src_of(self, m):
        return self.base.src_of(m)

    def tgt_of(self, m):
        return self.base.tgt_of(m)

    def is_iso(self, m):
        return True

    def inverse(self, m):
        return m

    def iso_data(self, guard=None):
        return SimpleNamespace(
            rep_of={x: x for x in self.objects},
            to_rep=dict(self.identity),
            reps=list(self.objects))

    def morphisms_iter(self):
        return iter(self.identity.values())

    def to_fincat(self, guard=None, name=None):
        mors = list(self.identity.values())
        return FinCat(list(self.objects), mors,
                      {m: self.base.src_of(m) for m in mors},
                      {m: self.base.tgt_of(m) for m in mors},
                      dict(self.identity), compose_fn=self.compose,
                      name=name or self.name)


def counter_oracle(E):
    """A strict family that fails reflexivity: fibers are discretized.

    Identities survive discretization, so transitions stay functorial,
    but the unit component c -> e*s*c needed by the reflexivity axiom
    has nowhere to live as soon as some fiber object is not constant
    along the [1]-direction.
    """
    base = k_oracle(E)

    def fiber_fn(J, guard):
        return _DiscreteView(base.fiber(J, guard))

    def transition_fn(f, fibJp, fibJ):
        t = base.transition(f)
        return FiberMap(fibJp, fibJ, t.ob, t.mor, name=t.name)

    return FamilyOracle(f"disc-K({E.name})", fiber_fn, transition_fn)


# -- reflexivity structure ------------------------------------------------------

def _cyl_maps(J):
    JI = product_poset(J, chain_poset(1), name=f"{J.name}x[1]")
    e = PosetMap(JI, J, {(x, k): x for (x, k) in JI.elements}, name="e")
    s = PosetMap(J, JI, {x: (x, 0) for x in J.elements}, name="s")
    t = PosetMap(J, JI, {x: (x, 1) for x in J.elements}, name="t")
    return JI, e, s, t


def reflexive_structure(O, J, guard=None):
    """Verify the adjunction s* -| e* at J and return its unit.

    The counit is the identity s*e* = id (oracles are strict); the unit
    component at c must restrict to the identity along s and be the
    identity on objects pulled back along e.  Returns (report, data)
    where data carries the cylinder maps, the transitions and the unit
    as a dict, or None on failure.
    """
    key = J.key()
    if key in O._refl:
        return O._refl[key]
    JI, e, s, t = _cyl_maps(J)
    fibJ = O.fiber(J, guard)
    fibJI = O.fiber(JI, guard)
    estar = O.transition(e, guard)
    sstar = O.transition(s, guard)
    tstar = O.transition(t, guard)
    rep = CheckReport(f"reflexive({O.name},{J.name})", True)
    data = SimpleNamespace(J=J, JI=JI, e=e, s=s, t=t, fibJ=fibJ, fibJI=fibJI,
                           estar=estar, sstar=sstar, tstar=tstar, eta=None)
    for x in fibJ.objects:
        if sstar.ob(estar.ob(x)) != x:
            rep.add_failure("counit-not-identity", x)
            O._refl[key] = (rep, data)
            return rep, data
    must_be_id = {estar.ob(x) for x in fibJ.objects}
    cands = {}
    for c in fibJI.objects:
        d = estar.ob(sstar.ob(c))
        us = [h for h in fibJI.hom(c, d)
              if sstar.mor(h) == fibJ.id_of(sstar.ob(c))]
        if c in must_be_id:
            us = [h for h in us if h == fibJI.id_of(c)]
        if not us:
            rep.add_failure("no-unit-component", c)
            O._refl[key] = (rep, data)
            return rep, data
        cands[c] = us
    eta = _pick_natural_unit(fibJI, estar, sstar, cands, guard)
    if eta is None:
        rep.add_failure("unit-not-natural", None)
    data.eta = eta
    rep.details["unit-components"] = len(cands)
    O._refl[key] = (rep, data)
    return rep, data


def _pick_natural_unit(fibJI, estar, sstar, cands, guard):
    """A unit family natural in c, or None.  Thin fibers need no search."""
    if fibJI.thin:
        return {c: us[0] for c, us in cands.items()}
    size = 1
    for us in cands.values():
        size *= len(us)
        check_guard("unit candidates", size, guard)

    if getattr(fibJI, "is_groupoid", False):
        # every morphism factors through the gauge isos onto class
        # representatives, and naturality is closed under composition
        # and inverses, so the gauges plus the representative
        # automorphisms generate all naturality constraints
        d = fibJI.iso_data()
        gens = [d.to_rep[c] for c in fibJI.objects
                if d.to_rep[c] != fibJI.id_of(c)]
        for r in d.reps:
            gens.extend(fibJI.hom(r, r))
    else:
        gens = None

    def natural(eta):
        hs = gens if gens is not None else fibJI.morphisms_iter()
        for h in hs:
            c, cp = fibJI.src_of(h), fibJI.tgt_of(h)
            lhs = fibJI.compose(estar.mor(sstar.mor(h)), eta[c])
            if lhs != fibJI.compose(eta[cp], h):
                return False
        return True

    keys = list(cands)
    for choice in itertools.product(*(cands[c] for c in keys)):
        eta = dict(zip(keys, choice))
        if natural(eta):
            return eta
    return None


def nu_maps(O, J, guard=None):
    """Callback form of nu_J: fiber(Jx[1]) -> ar(fiber(J)).

    nu sends c to the arrow t*(a(c)) where a(c): c -> e*s*c is the unit
    of the reflexivity adjunction, and a morphism h to (t*h, s*h).
    """
    rep, data = reflexive_structure(O, J, guard)
    if not rep.passed:
        raise StructuralError(f"nu requires reflexivity at {J.name}: "
                              f"{rep.failures[0]}")
    tstar, sstar, eta = data.tstar, data.sstar, data.eta
    fibJI = data.fibJI

    def ob(c):
        return tstar.mor(eta[c])

    def mor(h):
        return (ob(fibJI.src_of(h)), ob(fibJI.tgt_of(h)),
                (tstar.mor(h), sstar.mor(h)))

    return data, ob, mor


class _ArView:
    """The arrow category of a fiber, presented lazily."""

    def __init__(self, C):
        self.C = C
        self.name = f"ar({C.name})"
        self.objects = list(C.morphisms_iter())
        self.identity = {
            f: (f, f, (C.id_of(C.src_of(f)), C.id_of(C.tgt_of(f))))
            for f in self.objects}

    def hom(self, f, g):
        C = self.C
        out = []
        for u in C.hom(C.src_of(f), C.src_of(g)):
            lhs = C.compose(g, u)
            for v in C.hom(C.tgt_of(f), C.tgt_of(g)):
                if lhs == C.compose(v, f):
                    out.append((f, g, (u, v)))
        return out

    def compose(self, g, f):
        return (f[0], g[1], (self.C.compose(g[2][0], f[2][0]),
                             self.C.compose(g[2][1], f[2][1])))

    def id_of(self, f):
        return self.identity[f]

    def src_of(self, m):
        return m[0]

    def tgt_of(self, m):
        return m[1]

    def is_iso(self, m):
        return self.C.is_iso(m[2][0]) and self.C.is_iso(m[2][1])

    def morphisms_iter(self):
        for f in self.objects:
            for g in self.objects:
                yield from self.hom(f, g)

    def to_fincat(self, guard=None, name=None):
        mors = []
        for f in self.objects:
            for g in self.objects:
                mors.extend(self.hom(f, g))
                check_guard("arrow category morphisms", len(mors), guard)
        return FinCat(list(self.objects), mors,
                      {m: m[0] for m in mors}, {m: m[1] for m in mors},
                      dict(self.identity), compose_fn=self.compose,
                      name=name or self.name)


def nu(O, J, guard=None):
    """nu_J as a materialized Functor fiber(Jx[1]) -> ar(fiber(J))."""
    data, ob, mor = nu_maps(O, J, guard)
    src = data.fibJI.to_fincat(guard)
    tgt = _ArView(data.fibJ).to_fincat(guard)
    return Functor(src, tgt, {c: ob(c) for c in src.objects},
                   {h: mor(h) for h in src.morphisms}, name=f"nu_{J.name}")


class _ProductView:
    """A finite product of fiber categories, presented lazily."""

    def __init__(self, cats, guard=None):
        self.cats = cats
        self.name = "x".join(c.name for c in cats) or "pt"
        total = 1
        for c in cats:
            total *= len(c.objects)
            check_guard("product objects", total, guard)
        self.objects = list(itertools.product(*(c.objects for c in cats)))
        self.identity = {
            x: (x, x, tuple(c.id_of(v) for c, v in zip(cats, x)))
            for x in self.objects}

    def hom(self, x, y):
        per = [c.hom(a, b) for c, a, b in zip(self.cats, x, y)]
        return [(x, y, comps) for comps in itertools.product(*per)]

    def compose(self, g, f):
        comps = tuple(c.compose(a, b)
                      for c, a, b in zip(self.cats, g[2], f[2]))
        return (f[0], g[1], comps)

    def id_of(self, x):
        return self.identity[x]

    def src_of(self, m):
        return m[0]

    def tgt_of(self, m):
        return m[1]

    def is_iso(self, m):
        return all(c.is_iso(t) for c, t in zip(self.cats, m[2]))

    def morphisms_iter(self):
        for x in self.objects:
            for y in self.objects:
                yield from self.hom(x, y)


# -- probes ----------------------------------------------------------------------

PROBE_KINDS = ("nondegenerate", "reflexive", "separated", "additive",
               "semiexact", "excision_i", "excision_ii", "cylinder",
               "truncation")


@dataclass
class Probe:
    """One finite instance of an enhancement axiom.

    Square probes carry a PosetSquare already validated by its
    constructor; additive probes carry the decomposition blocks.
    """
    kind: str
    label: str
    poset: FinPoset = None
    square: object = None
    blocks: tuple = None

    @property
    def probe_id(self):
        return f"{self.kind}[{self.label}]"


def _check_nondegenerate(O, J, rep, guard):
    fibJ = O.fiber(J, guard)
    fibpt = O.fiber(PT, guard)
    eps = [O.transition(PosetMap(PT, J, {0: j}, name=f"eps({j})"), guard)
           for j in J.elements]
    for m in fibJ.morphisms_iter():
        if all(fibpt.is_iso(t.mor(m)) for t in eps) and not fibJ.is_iso(m):
            rep.add_failure("not-conservative", m)
            return
    rep.details["fiber-objects"] = len(fibJ.objects)


def _check_separated(O, J, rep, guard):
    refl, data = reflexive_structure(O, J, guard)
    if not refl.passed:
        rep.add_failure("reflexivity-required", refl.witness)
        return
    if data.fibJ.thin:
        cls = _separated_thin(data)
    elif getattr(data.fibJ, "is_groupoid", False):
        _, ob, mor = nu_maps(O, J, guard)
        cls = _separated_groupoid(data, ob, mor)
    else:
        _, ob, mor = nu_maps(O, J, guard)
        cls = classify_map(data.fibJI, _ArView(data.fibJ), ob, mor)
    rep.details["classification"] = cls
    if not cls.epivalence:
        rep.add_failure("nu-not-epivalence", cls)


def _separated_groupoid(data, ob, mor):
    """Classify nu_J into the arrow category of a groupoid fiber.

    All arrows of a groupoid fiber are invertible, so two arrow objects
    are isomorphic exactly when their endpoints share an iso class, and
    essential surjectivity reduces to hitting every class.  Fullness and
    faithfulness are checked pairwise, skipping pairs whose arrow hom
    set is empty by class separation.
    """
    fibJ, fibJI = data.fibJ, data.fibJI
    d = fibJ.iso_data()
    items = [(c, ob(c)) for c in fibJI.objects]
    full = True
    faithful = True
    for c, a in items:
        for cp, ap in items:
            if _fiber_hom_empty(fibJ, a[0], ap[0]) \
                    or _fiber_hom_empty(fibJ, a[1], ap[1]):
                continue
            target = []
            for u in fibJ.hom(a[0], ap[0]):
                lhs = fibJ.compose(ap, u)
                for v in fibJ.hom(a[1], ap[1]):
                    if lhs == fibJ.compose(v, a):
                        target.append((a, ap, (u, v)))
            image = [mor(h) for h in fibJI.hom(c, cp)]
            if len(set(image)) != len(image):
                faithful = False
            if not set(target) <= set(image):
                full = False
    hit = {_rep_lookup(d, a[0]) for _, a in items}
    ess = all(r in hit for r in d.reps)
    return FunctorClass(full, faithful, ess, True)


def _separated_thin(data):
    """Classify nu_J between thin fibers with bitmask order tests."""
    fibJ, fibJI = data.fibJ, data.fibJI
    tob, sob = data.tstar.ob, data.sstar.ob
    rows = [(fibJI._mask[c], fibJ._mask[tob(c)], fibJ._mask[sob(c)])
            for c in fibJI.objects]
    full = True
    for mf, mt, ms in rows:
        for mf2, mt2, ms2 in rows:
            if mt & ~mt2 == 0 and ms & ~ms2 == 0 and mf & ~mf2 != 0:
                full = False
                break
        if not full:
            break
    images = {(tob(c), sob(c)) for c in fibJI.objects}
    faithful = len(images) == len(fibJI.objects)
    ess = all((x, y) in images
              for x in fibJ.objects for y in fibJ.objects if fibJ.leq(x, y))
    # thin skeletal: the only isos are identities, so conservativity
    # amounts to injectivity on comparable pairs, implied by faithful
    conservative = faithful or not any(
        fibJI.leq(c, cp) and c != cp and (tob(c), sob(c)) == (tob(cp), sob(cp))
        for c in fibJI.objects for cp in fibJI.objects)
    return FunctorClass(full, faithful, ess, conservative)


def _check_reflexive(O, J, rep, guard):
    refl, data = reflexive_structure(O, J, guard)
    rep.passed = refl.passed
    rep.failures = list(refl.failures)
    rep.details.update(refl.details)


def _check_additive(O, J, blocks, rep, guard):
    fibJ = O.fiber(J, guard)
    restrictions = []
    for block in blocks:
        Jb = subposet(J, list(block))
        incl = PosetMap(Jb, J, {x: x for x in Jb.elements}, name="incl")
        restrictions.append(O.transition(incl, guard))
    pv = _ProductView([r.target for r in restrictions], guard)

    def ob(c):
        return tuple(r.ob(c) for r in restrictions)

    def mor(m):
        return (ob(fibJ.src_of(m)), ob(fibJ.tgt_of(m)),
                tuple(r.mor(m) for r in restrictions))

    cls = classify_map(fibJ, pv, ob, mor)
    rep.details["classification"] = cls
    if not cls.equivalence:
        rep.add_failure("not-equivalence", cls)


def _square_transitions(O, sq, guard):
    fBR = O.fiber(sq.bottom_right, guard)
    rB = O.transition(sq.bottom, guard)
    rR = O.transition(sq.right, guard)
    rL = O.transition(sq.left, guard)
    rT = O.transition(sq.top, guard)
    for c in fBR.objects:
        if rL.ob(rB.ob(c)) != rT.ob(rR.ob(c)):
            raise StructuralError(f"square does not commute strictly at {c!r}")
    return fBR, rB, rR, rL, rT


def _check_square(O, sq, required, rep, guard):
    """Classify fiber(BR) -> fiber(BL) x_{fiber(TL)} fiber(TR)."""
    fBR, rB, rR, rL, rT = _square_transitions(O, sq, guard)
    if fBR.thin:
        cls = _square_thin(fBR, rB, rR, rL, rT)
    else:
        cls = _square_generic(fBR, rB, rR, rL, rT, guard)
    rep.details["classification"] = cls
    ok = cls.equivalence if required == "equivalence" else cls.epivalence
    if not ok:
        rep.add_failure(f"not-{required}", cls)


def _rep_lookup(d, x):
    r = d.rep_id.get(id(x)) if hasattr(d, "rep_id") else None
    return d.rep_of[x] if r is None else r


def _gauge_lookup(d, x):
    t = d.to_rep_id.get(id(x)) if hasattr(d, "to_rep_id") else None
    return d.to_rep[x] if t is None else t


def _fiber_hom_empty(C, x, y):
    """Cheap emptiness test for a fiber hom set; only ever answers True
    when the hom set is certainly empty (groupoid fibers, distinct iso
    classes)."""
    if getattr(C, "is_groupoid", False):
        d = C.iso_data()
        return _rep_lookup(d, x) != _rep_lookup(d, y)
    return False


def _square_generic(fBR, rB, rR, rL, rT, guard):
    """Classify the comparison into the iso-comma product without
    materializing it.

    Hom sets of the iso-comma between image objects (all of which carry
    an identity witness, the oracle being strict) are pairs of fiber
    morphisms agreeing in the corner fiber.  Essential surjectivity is
    decided classwise: every iso-comma object normalizes, via chosen
    isos onto class representatives, to a witness between
    representatives, and witnesses are hit exactly when every orbit
    under the representative automorphisms contains a normalized image.
    """
    fBL, fTR, fTL = rB.target, rR.target, rL.target
    obs = [(c, rB.ob(c), rR.ob(c)) for c in fBR.objects]
    full = True
    faithful = True
    for c, x, y in obs:
        for cp, xp, yp in obs:
            # strict commutation forces the image into the target hom
            # set, so both are empty when either restriction separates
            # the iso classes
            if _fiber_hom_empty(fBL, x, xp) or _fiber_hom_empty(fTR, y, yp):
                continue
            image = [(rB.mor(m), rR.mor(m)) for m in fBR.hom(c, cp)]
            if len(set(image)) != len(image):
                faithful = False
            target_hom = []
            for f0 in fBL.hom(x, xp):
                lhs = rL.mor(f0)
                for f1 in fTR.hom(y, yp):
                    if lhs == rT.mor(f1):
                        target_hom.append((f0, f1))
            if not set(target_hom) <= set(image):
                full = False
    conservative = True
    if not getattr(fBR, "is_groupoid", False):
        for m in fBR.morphisms_iter():
            if fBL.is_iso(rB.mor(m)) and fTR.is_iso(rR.mor(m)) \
                    and not fBR.is_iso(m):
                conservative = False
                break
    ess = _square_ess_surjective(fBR, rB, rR, rL, rT, guard)
    return FunctorClass(full, faithful, ess, conservative)


def _square_ess_surjective(fBR, rB, rR, rL, rT, guard):
    fBL, fTR, fTL = rB.target, rR.target, rL.target
    dataL = fBL.iso_data(guard)
    dataR = fTR.iso_data(guard)
    auts = {}

    def aut_of(C, r):
        key = (id(C), r)
        if key not in auts:
            auts[key] = [m for m in C.hom(r, r) if C.is_iso(m)]
        return auts[key]

    # orbits of witnesses between representatives under Aut x Aut
    orbit_of = {}
    orbits = []
    for a0 in dataL.reps:
        la = rL.ob(a0)
        lus = [rL.mor(fBL.inverse(u)) for u in aut_of(fBL, a0)]
        for b0 in dataR.reps:
            witnesses = [w for w in fTL.hom(la, rT.ob(b0)) if fTL.is_iso(w)]
            if not witnesses:
                continue
            tvs = [rT.mor(v) for v in aut_of(fTR, b0)]
            pending = set(witnesses)
            while pending:
                seed = pending.pop()
                orbit = {seed}
                frontier = [seed]
                while frontier:
                    w = frontier.pop()
                    for lu in lus:
                        wu = fTL.compose(w, lu)
                        for tv in tvs:
                            w2 = fTL.compose(tv, wu)
                            if w2 not in orbit:
                                orbit.add(w2)
                                frontier.append(w2)
                                pending.discard(w2)
                idx = len(orbits)
                orbits.append(False)
                for w in orbit:
                    orbit_of[(a0, b0, w)] = idx
    for c in fBR.objects:
        x, y = rB.ob(c), rR.ob(c)
        p, q = dataL.to_rep[x], dataR.to_rep[y]
        w = fTL.compose(rT.mor(q), fTL.inverse(rL.mor(p)))
        orbits[orbit_of[(dataL.rep_of[x], dataR.rep_of[y], w)]] = True
    return all(orbits)


def _square_thin(fBR, rB, rR, rL, rT):
    """Thin-fiber square comparison: the iso-comma target collapses to
    the strict pullback of object sets with pointwise order."""
    fBL, fTR = rB.target, rR.target
    rows = [(fBR._mask[c], fBL._mask[rB.ob(c)], fTR._mask[rR.ob(c)])
            for c in fBR.objects]
    full = True
    for mf, mb, mr in rows:
        for mf2, mb2, mr2 in rows:
            if mb & ~mb2 == 0 and mr & ~mr2 == 0 and mf & ~mf2 != 0:
                full = False
                break
        if not full:
            break
    images = {(rB.ob(c), rR.ob(c)) for c in fBR.objects}
    faithful = len(images) == len(fBR.objects)
    by_restriction = {}
    for y in fTR.objects:
        by_restriction.setdefault(rT.ob(y), []).append(y)
    ess = True
    for x in fBL.objects:
        for y in by_restriction.get(rL.ob(x), ()):
            if (x, y) not in images:
                ess = False
                break
        if not ess:
            break
    conservative = faithful or not any(
        fBR.leq(c, cp) and c != cp
        and (rB.ob(c), rR.ob(c)) == (rB.ob(cp), rR.ob(cp))
        for c in fBR.objects for cp in fBR.objects)
    return FunctorClass(full, faithful, ess, conservative)


def _check_truncation(O, J, rep, guard):
    try:
        _, cls = truncation_component(O, J, guard)
    except StructuralError as err:
        rep.add_failure("truncation-failed", str(err))
        return
    rep.details["classification"] = cls
    if not cls.equivalence:
        rep.add_failure("not-equivalence", cls)


def check_axiom(O, probe, guard=None):
    """Evaluate one probe against a family oracle."""
    rep = CheckReport(f"{O.name}:{probe.probe_id}", True)
    if probe.kind not in PROBE_KINDS:
        raise StructuralError(f"unknown probe kind {probe.kind!r}")
    if probe.kind == "nondegenerate":
        _check_nondegenerate(O, probe.poset, rep, guard)
    elif probe.kind == "reflexive":
        _check_reflexive(O, probe.poset, rep, guard)
    elif probe.kind == "separated":
        _check_separated(O, probe.poset, rep, guard)
    elif probe.kind == "additive":
        _check_additive(O, probe.poset, probe.blocks, rep, guard)
    elif probe.kind == "truncation":
        _check_truncation(O, probe.poset, rep, guard)
    elif probe.kind == "semiexact":
        _check_square(O, probe.square, "epivalence", rep, guard)
    else:
        _check_square(O, probe.square, "equivalence", rep, guard)
    return rep


def run_probe_suite(O, suite, guard=None):
    """Evaluate a suite of probes; the verdict is scoped to the suite.

    Returns (reports, summary).  The summary verdict never claims more
    than the instances tested.
    """
    reports = [check_axiom(O, p, guard) for p in suite]
    passed = all(r.passed for r in reports)
    summary = CheckReport(f"probe-suite({O.name})", passed)
    summary.details["probes"] = len(suite)
    if not suite:
        summary.details["warning"] = "empty suite: vacuous pass"
        summary.details["verdict"] = "vacuous pass (no probes)"
        return reports, summary
    if passed:
        summary.details["verdict"] = (
            f"restricted-enhanced certified at suite scope "
            f"({len(suite)} probes)")
    else:
        failing = sorted({r.name.split(":", 1)[1].split("[", 1)[0]
                          for r in reports if not r.passed})
        summary.details["verdict"] = "fail: " + ", ".join(failing)
        for r in reports:
            if not r.passed:
                summary.add_failure(r.name, r.witness)
    return reports, summary


# -- probe generators ------------------------------------------------------------

def _poset_autos(J):
    els = J.elements
    out = []
    for perm in itertools.permutations(els):
        m = dict(zip(els, perm))
        if all(J.leq(m[a], m[b]) == J.leq(a, b) for a in els for b in els):
            out.append(m)
    return out


def _map_orbit_key(J, mapping, auts_src, auts_tgt):
    best = None
    for sigma in auts_src:
        for tau in auts_tgt:
            key = tuple(repr(tau[mapping[sigma[x]]]) for x in J.elements)
            if best is None or key < best:
                best = key
    return best


def _connected_components(J):
    parent = {x: x for x in J.elements}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in J.relations():
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    comps = {}
    for x in J.elements:
        comps.setdefault(find(x), []).append(x)
    return [tuple(sorted(c, key=repr)) for c in comps.values()]


def _additive_probes(J):
    comps = _connected_components(J)
    probes = []
    if not comps:
        probes.append(Probe("additive", f"{J.name}:empty", poset=J, blocks=()))
        return probes
    all_block = tuple(sorted(J.elements, key=repr))
    probes.append(Probe("additive", f"{J.name}:whole", poset=J,
                        blocks=(all_block,)))
    n = len(comps)
    seen = set()
    for mask in range(1, 2 ** n - 1):
        left = tuple(sorted(itertools.chain.from_iterable(
            comps[i] for i in range(n) if mask >> i & 1), key=repr))
        right = tuple(sorted(itertools.chain.from_iterable(
            comps[i] for i in range(n) if not mask >> i & 1), key=repr))
        key = frozenset((left, right))
        if key in seen:
            continue
        seen.add(key)
        probes.append(Probe("additive", f"{J.name}:split{mask}", poset=J,
                            blocks=(left, right)))
    return probes


def _excision_probes(J, max_s, guard=None):
    probes = []
    auts_J = _poset_autos(J)
    for ns in range(1, max_s + 1):
        S = discrete_poset(tuple(range(ns)), name=f"S{ns}")
        T, _tip = cone_left(S)
        auts_T = _poset_autos(T)
        seen = set()
        for f in all_monotone_maps(J, T, guard):
            if set(f.mapping.values()) != set(T.elements):
                continue
            key = _map_orbit_key(J, f.mapping, auts_J, auts_T)
            if key in seen:
                continue
            seen.add(key)
            label = f"{J.name}:f={key}"
            for variant in ("i", "ii"):
                sq = excision_square(f, variant)
                probes.append(Probe(f"excision_{variant}",
                                    f"{label}", square=sq))
    return probes


def _cylinder_probes(J, guard=None):
    probes = []
    auts_J = _poset_autos(J)
    I1 = chain_poset(1)
    seen = set()
    for chi in all_monotone_maps(J, I1, guard):
        key = _map_orbit_key(J, chi.mapping, auts_J, [{0: 0, 1: 1}])
        if key in seen:
            continue
        seen.add(key)
        sq = cylinder_square(chi)
        probes.append(Probe("cylinder", f"{J.name}:chi={key}", square=sq))
    return probes


def _left_closed_subsets(J):
    out = []
    els = list(J.elements)
    for mask in range(2 ** len(els)):
        keep = [els[i] for i in range(len(els)) if mask >> i & 1]
        kset = set(keep)
        if all(a in kset for b in keep for a in J.down_set(b)):
            out.append(keep)
    return out


def _semiexact_probes(posets):
    """Standard pushout squares glued from left-closed embeddings."""
    from .poset import find_poset_iso
    probes = []
    seen = set()
    for J0 in posets:
        for keep0 in _left_closed_subsets(J0):
            D = subposet(J0, keep0, name="D")
            i0 = PosetMap(D, J0, {x: x for x in keep0}, name="i0")
            for J1 in posets:
                for keep1 in _left_closed_subsets(J1):
                    if len(keep1) != len(keep0):
                        continue
                    D1 = subposet(J1, keep1, name="D1")
                    iso = find_poset_iso(D, D1)
                    if iso is None:
                        continue
                    i1 = PosetMap(D, J1, dict(iso.mapping), name="i1")
                    sq, chi = standard_pushout_square(i0, i1)
                    key = (canonical_poset(sq.bottom_right).key(),
                           canonical_poset(D).key(),
                           canonical_poset(J0).key(),
                           canonical_poset(J1).key())
                    if key in seen or (key[0], key[1], key[3], key[2]) in seen:
                        continue
                    seen.add(key)
                    label = f"{J0.name}+_{D.name}{J1.name}#{len(seen)}"
                    probes.append(Probe("semiexact", label, square=sq))
    return probes


def default_probes(max_elements=4, max_s=2, glue_elements=3, guard=None):
    """The default probe suite.

    For every poset J with at most max_elements elements (one per iso
    class): a non-degeneracy, reflexivity and separatedness probe; an
    additivity probe per splitting of J into clopen pieces (at most two);
    excision probes for every surjective monotone map J -> S^< with
    |S| <= max_s, both variants, deduplicated up to automorphisms; a
    cylinder probe per map J -> [1] up to automorphisms.  Standard
    pushout squares are glued from left-closed embeddings between posets
    with at most glue_elements elements.
    """
    posets = enumerate_posets(max_elements)
    probes = []
    for J in posets:
        probes.append(Probe("nondegenerate", J.name, poset=J))
        probes.append(Probe("reflexive", J.name, poset=J))
        probes.append(Probe("separated", J.name, poset=J))
        probes.extend(_additive_probes(J))
        probes.extend(_excision_probes(J, max_s, guard))
        probes.extend(_cylinder_probes(J, guard))
    probes.extend(_semiexact_probes(
        [P for P in posets if len(P.elements) <= glue_elements]))
    return probes


# -- truncation -------------------------------------------------------------------

def _edge_arrow(O, J, c, j, jp, guard=None):
    """The structure arrow eps(jp)*c -> eps(j)*c for j <= jp in J."""
    chi = PosetMap(PT_I, J, {(0, 0): j, (0, 1): jp}, name="chi")
    rep, data = reflexive_structure(O, PT, guard)
    if not rep.passed:
        raise StructuralError(f"reflexivity fails at pt: {rep.failures[0]}")
    d = O.transition(chi, guard).ob(c)
    return data.tstar.mor(data.eta[d])


def truncation_component(O, J, guard=None):
    """The component fiber(J) -> Fun(J^o, fiber(pt)) of the truncation.

    Values are the point restrictions eps(j)*c; arrows come from the
    reflexivity unit via the cylinder [1] -> J at each relation.
    Returns (Functor, FunctorClass); for K-oracles the component is an
    isomorphism of categories.
    """
    fibJ = O.fiber(J, guard)
    fibpt = O.fiber(PT, guard)
    matpt = fibpt.to_fincat(guard)
    tgt = fun_fiber(J, matpt, guard)
    eps = {j: O.transition(PosetMap(PT, J, {0: j}, name=f"eps({j})"), guard)
           for j in J.elements}
    tgt_objects = set(tgt.objects)

    if tgt.thin:
        def ob(c):
            return tuple(eps[j].ob(c) for j in J.elements)
    else:
        def ob(c):
            vals = tuple(eps[j].ob(c) for j in J.elements)
            arrows = tuple(_edge_arrow(O, J, c, b, a, guard)
                           for (a, b) in tgt.relations)
            return (vals, arrows)

    for c in fibJ.objects:
        if ob(c) not in tgt_objects:
            raise StructuralError(
                f"truncation image at {c!r} is not functorial")

    def mor(m):
        return (ob(fibJ.src_of(m)), ob(fibJ.tgt_of(m)),
                tuple(eps[j].mor(m) for j in J.elements))

    if tgt.thin:
        def mor(m):  # noqa: F811 - thin morphisms carry no components
            return (ob(fibJ.src_of(m)), ob(fibJ.tgt_of(m)))

    cls = classify_map(fibJ, tgt, ob, mor)
    src_cat = fibJ.to_fincat(guard)
    tgt_cat = tgt.to_fincat(guard)
    F = Functor(src_cat, tgt_cat, {c: ob(c) for c in src_cat.objects},
                {m: mor(m) for m in src_cat.morphisms},
                name=f"tru_{J.name}")
    return F, cls


# -- subclass oracles --------------------------------------------------------------

class _SubFiberView:
    """The subcategory of a fiber cut out by a closed morphism class."""

    def __init__(self, base, objects, keep_mor, name):
        self.base = base
        self.thin = base.thin
        self.name = name
        self.objects = objects
        self._objset = set(objects)
        self._keep = keep_mor
        self.identity = {x: base.id_of(x) for x in objects}
        if self.thin:
            self._mask = {x: base._mask[x] for x in objects}

    def leq(self, x, y):
        return self.base.leq(x, y) and self._keep((x, y))

    def hom(self, x, y):
        return [m for m in self.base.hom(x, y) if self._keep(m)]

    def compose(self, g, f):
        return self.base.compose(g, f)

    def id_of(self, x):
        return self.identity[x]

    def src_of(self, m):
        return self.base.src_of(m)

    def tgt_of(self, m):
        return self.base.tgt_of(m)

    def is_iso(self, m):
        x, y = self.base.src_of(m), self.base.tgt_of(m)
        for g in self.hom(y, x):
            if self.base.compose(g, m) == self.identity[x] and \
                    self.base.compose(m, g) == self.identity[y]:
                return True
        return False

    def inverse(self, m):
        x, y = self.base.src_of(m), self.base.tgt_of(m)
        for g in self.hom(y, x):
            if self.base.compose(g, m) == self.identity[x] and \
                    self.base.compose(m, g) == self.identity[y]:
                return g
        raise StructuralError("not invertible")

    def iso_data(self, guard=None):
        return _brute_iso_data(self, guard)

    def morphisms_iter(self):
        for x in self.objects:
            for y in self.objects:
                yield from self.hom(x, y)

    def to_fincat(self, guard=None, name=None):
        mors = []
        for x in self.objects:
            for y in self.objects:
                mors.extend(self.hom(x, y))
                check_guard("subfiber morphisms", len(mors), guard)
        return FinCat(list(self.objects), mors,
                      {m: self.src_of(m) for m in mors},
                      {m: self.tgt_of(m) for m in mors},
                      dict(self.identity), compose_fn=self.compose,
                      name=name or self.name)


def _check_closed_class(fibpt, v):
    vset = set(v)
    for x in fibpt.objects:
        if fibpt.id_of(x) not in vset:
            raise StructuralError(f"class not closed: missing identity of {x!r}")
    mors = list(vset)
    for m in mors:
        for n in mors:
            if fibpt.tgt_of(m) == fibpt.src_of(n):
                if fibpt.compose(n, m) not in vset:
                    raise StructuralError(
                        f"class not closed under composition at {(m, n)!r}")
    return vset


def iso_class(O, guard=None):
    """The closed class of isomorphisms of fiber(pt)."""
    fibpt = O.fiber(PT, guard)
    return {m for m in fibpt.morphisms_iter() if fibpt.is_iso(m)}


def subclass_oracle(O, v, guard=None):
    """Restrict a family to a closed class v of point-fiber morphisms.

    The new fiber over J keeps the objects whose structure arrows along
    all relations of J lie in v, and the morphisms all of whose point
    components lie in v.
    """
    fibpt = O.fiber(PT, guard)
    vset = _check_closed_class(fibpt, v)

    def obj_ok(J, c):
        for (a, b) in J.relations():
            if a != b and _edge_arrow(O, J, c, a, b, guard) not in vset:
                return False
        return True

    def fiber_fn(J, g):
        base = O.fiber(J, g)
        eps = [O.transition(PosetMap(PT, J, {0: j}, name=f"eps({j})"), g)
               for j in J.elements]

        def keep_mor(m):
            try:
                return all(t.mor(m) in vset for t in eps)
            except KeyError:
                return False

        objects = [c for c in base.objects if obj_ok(J, c)]
        return _SubFiberView(base, objects, keep_mor,
                             name=f"sub({base.name})")

    def transition_fn(f, fibJp, fibJ):
        t = O.transition(f, guard)
        return FiberMap(fibJp, fibJ, t.ob, t.mor, name=t.name)

    return FamilyOracle(f"{O.name}|v", fiber_fn, transition_fn)
