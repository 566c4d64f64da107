"""Truncated simplicial machinery.

Simplex categories are truncated at a level bound N (default 3, which
is all the Segal, completeness and truncation checks need).  Nerves are
set-valued functors on the opposite simplex category, isomorphism
families are strict diagrams of groupoids indexed by simplex maps, and
truncation recovers a category from a complete Segal family.
"""

from __future__ import annotations

import itertools
from math import comb

from .fincat import (CatSquare, FinCat, Functor, NatTrans, classify_square,
                     product_cat)
from .fib import SetValued, elements
from .guards import StructuralError, check_guard
from .report import CheckReport


# -- the truncated simplex category ---------------------------------------------

def monotone_tuples(m, n):
    """All monotone maps [m] -> [n] as image tuples of length m + 1."""
    return [t for t in itertools.product(range(n + 1), repeat=m + 1)
            if all(t[i] <= t[i + 1] for i in range(m))]


def delta_cat(N):
    """The category of chains [0], ..., [N] and monotone maps."""
    objects = list(range(N + 1))
    mors, src, tgt = [], {}, {}
    for m in objects:
        for n in objects:
            for f in monotone_tuples(m, n):
                mid = (m, n, f)
                mors.append(mid)
                src[mid] = m
                tgt[mid] = n
    ident = {n: (n, n, tuple(range(n + 1))) for n in objects}

    def comp(g, f):
        return (f[0], g[1], tuple(g[2][v] for v in f[2]))

    cat = FinCat(objects, mors, src, tgt, ident, compose_fn=comp,
                 name=f"Delta<={N}")
    cat.level_bound = N
    return cat


def check_delta_hom_counts(delta):
    """|Hom([m],[n])| must be binomial(n+m+1, m+1)."""
    rep = CheckReport("delta-hom-counts", True)
    for m in delta.objects:
        for n in delta.objects:
            want = comb(n + m + 1, m + 1)
            if len(delta.hom(m, n)) != want:
                rep.add_failure("hom-count", (m, n))
    return rep


def special_maps(delta):
    """Maps f: [m] -> [n] with f(m) = n; closed under composition."""
    return frozenset(f for f in delta.morphisms if f[2][-1] == f[1])


# -- nerves ----------------------------------------------------------------------

def _paths(I, n, guard=None):
    """Functors [n] -> I as (objects, morphisms) tuples."""
    check_guard("nerve level", len(I.objects) * max(len(I.morphisms), 1) ** n,
                guard)
    if n == 0:
        return [((x,), ()) for x in I.objects]
    out = []

    def rec(objs, mors):
        if len(mors) == n:
            out.append((tuple(objs), tuple(mors)))
            return
        x = objs[-1]
        for m in I.morphisms:
            if I.src[m] == x:
                rec(objs + [I.tgt[m]], mors + [m])

    for x in I.objects:
        rec([x], [])
    return out


def _act(I, f, s):
    """Precompose a simplex s of level n with f = (m, n, images)."""
    m, _, imgs = f
    objs, mors = s
    new_objs = tuple(objs[v] for v in imgs)
    new_mors = []
    for i in range(1, m + 1):
        lo, hi = imgs[i - 1], imgs[i]
        g = I.identity[objs[lo]]
        for k in range(lo, hi):
            g = I.compose(mors[k], g)
        new_mors.append(g)
    return (new_objs, tuple(new_mors))


def nerve(I, N, guard=None):
    """The truncated nerve as a set-valued functor on the opposite of
    the simplex category: level n is the set of functors [n] -> I."""
    delta = delta_cat(N)
    from .fincat import opposite
    dop = opposite(delta)
    sets = {n: _paths(I, n, guard) for n in delta.objects}
    maps = {}
    for f in delta.morphisms:
        # f: [m] -> [n] acts X([n]) -> X([m])
        maps[f] = {s: _act(I, f, s) for s in sets[f[1]]}
    X = SetValued(dop, sets, maps, name=f"N({I.name})")
    X.delta = delta
    X.level_bound = N
    return X


def simplicial_replacement(I, N, guard=None):
    """The discrete fibration of elements of the nerve."""
    X = nerve(I, N, guard)
    return elements(X, base=X.delta)


def nerve_functoriality(gamma, N, guard=None):
    """A functor I -> I' induces maps of nerves commuting with every
    simplex map; checked exhaustively."""
    rep = CheckReport("nerve-functoriality", True)
    I, Ip = gamma.source, gamma.target
    X, Y = nerve(I, N, guard), nerve(Ip, N, guard)

    def push(s):
        objs, mors = s
        return (tuple(gamma.ob(x) for x in objs),
                tuple(gamma.mor(m) for m in mors))

    for f in X.delta.morphisms:
        for s in X.set(f[1]):
            if push(X.map(f)[s]) != Y.map(f)[push(s)]:
                rep.add_failure("not-simplicial", (f, s))
                return rep
    return rep


def double_nerve(I, n, m, guard=None):
    """Level (n, m) of the double nerve: chains of m composable
    isomorphisms of functors [n] -> I."""
    fiber = _iso_fiber(I, n, guard)
    if m == 0:
        return list(fiber.objects)
    out = []

    def rec(seq):
        if len(seq) == m:
            out.append(tuple(seq))
            check_guard("double nerve", len(out), guard)
            return
        for u in fiber.morphisms:
            if fiber.src[u] == fiber.tgt[seq[-1]]:
                rec(seq + [u])

    for start in fiber.morphisms:
        rec([start])
    return out


# -- isomorphism families ----------------------------------------------------------

def _iso_fiber(I, n, guard=None):
    """The groupoid of functors [n] -> I and their isomorphisms."""
    paths = _paths(I, n, guard)
    mors, src, tgt = [], {}, {}
    for phi in paths:
        for psi in paths:
            for comps in _path_isos(I, phi, psi):
                m = (phi, psi, comps)
                check_guard("iso fiber morphisms", len(mors) + 1, guard)
                mors.append(m)
                src[m] = phi
                tgt[m] = psi
    ident = {p: (p, p, tuple(I.identity[x] for x in p[0])) for p in paths}

    def comp(g, f):
        return (f[0], g[1], tuple(I.compose(a, b)
                                  for a, b in zip(g[2], f[2])))

    cat = FinCat(paths, mors, src, tgt, ident, compose_fn=comp,
                 name=f"iso({I.name})_{n}")
    return cat


def _path_isos(I, phi, psi):
    """Component tuples of natural isomorphisms phi -> psi."""
    (xs, fs), (ys, gs) = phi, psi
    n = len(xs) - 1
    results = []

    def rec(comps):
        i = len(comps)
        if i == n + 1:
            results.append(tuple(comps))
            return
        for a in I.isos(xs[i], ys[i]):
            if i == 0 or I.compose(a, fs[i - 1]) == I.compose(gs[i - 1],
                                                              comps[-1]):
                rec(comps + [a])

    rec([])
    return results


class TruncGroupoidFamily:
    """A strict family of groupoids indexed by the truncated simplex
    category: one groupoid per level and a strict contravariant action
    of simplex maps.  Strictness is legitimate because the simplex
    category is rigid."""

    def __init__(self, delta, fibers, trans, name="family"):
        self.delta = delta
        self.N = delta.level_bound
        self.fibers = dict(fibers)
        self.trans = dict(trans)
        self.name = name

    def fiber(self, n):
        return self.fibers[n]

    def transition(self, f):
        return self.trans[f]

    def validate(self):
        rep = CheckReport(f"validate-family({self.name})", True)
        for n in self.delta.objects:
            C = self.fibers[n]
            v = C.validate()
            if not v.passed:
                rep.add_failure("fiber-not-a-category", n)
                continue
            if any(not C.is_iso(m) for m in C.morphisms):
                rep.add_failure("fiber-not-a-groupoid", n)
        for f in self.delta.morphisms:
            T = self.trans.get(f)
            if T is None or T.source is not self.fibers[f[1]] \
                    or T.target is not self.fibers[f[0]]:
                rep.add_failure("transition-endpoints", f)
            elif not T.is_valid():
                rep.add_failure("transition-not-functorial", f)
        if not rep.passed:
            return rep
        for n in self.delta.objects:
            if self.trans[self.delta.identity[n]].obj_map != \
                    {x: x for x in self.fibers[n].objects}:
                rep.add_failure("identity-transition", n)
        for g, f in self.delta.composable_pairs():
            gf = self.delta.compose(g, f)
            lhs = self.trans[gf]
            Tg, Tf = self.trans[g], self.trans[f]
            if any(lhs.ob(x) != Tf.ob(Tg.ob(x))
                   for x in self.fibers[gf[1]].objects) or \
               any(lhs.mor(m) != Tf.mor(Tg.mor(m))
                   for m in self.fibers[gf[1]].morphisms):
                rep.add_failure("not-strict", (g, f))
        return rep


def iso_family(I, N, guard=None):
    """The family of groupoids of functors [n] -> I and isomorphisms,
    with transitions by precomposition."""
    delta = delta_cat(N)
    fibers = {n: _iso_fiber(I, n, guard) for n in delta.objects}
    trans = {}
    for f in delta.morphisms:
        m, n, imgs = f
        Cn, Cm = fibers[n], fibers[m]
        omap = {p: _act(I, f, p) for p in Cn.objects}
        mmap = {}
        for mo in Cn.morphisms:
            phi, psi, comps = mo
            mmap[mo] = (omap[phi], omap[psi],
                        tuple(comps[v] for v in imgs))
        trans[f] = Functor(Cn, Cm, omap, mmap, name=f"{f}^*")
    return TruncGroupoidFamily(delta, fibers, trans, name=f"iso({I.name})")


def discrete_family(X):
    """A nerve-style set-valued functor on the opposite simplex category
    as a family with discrete fibers."""
    from .fincat import discrete_cat
    delta = X.delta
    fibers = {n: discrete_cat(X.set(n), name=f"disc_{n}")
              for n in delta.objects}
    trans = {}
    for f in delta.morphisms:
        m, n, _ = f
        Cn, Cm = fibers[n], fibers[m]
        omap = {s: X.map(f)[s] for s in Cn.objects}
        trans[f] = Functor(Cn, Cm, omap,
                           {("id", s): ("id", omap[s]) for s in Cn.objects},
                           name=f"{f}^*")
    return TruncGroupoidFamily(delta, fibers, trans, name=f"disc({X.name})")


def constant_family(C, N):
    """All fibers equal to one groupoid, all transitions the identity."""
    from .fincat import identity_functor
    delta = delta_cat(N)
    fibers = {n: C for n in delta.objects}
    trans = {f: identity_functor(C) for f in delta.morphisms}
    return TruncGroupoidFamily(delta, fibers, trans, name=f"const({C.name})")


# -- Segal and completeness checks --------------------------------------------------

def _mor(delta, m, n, imgs):
    return (m, n, tuple(imgs))


def _identity_witness(f0, f1, g0, g1):
    top = None
    from .fincat import compose_functors
    top = compose_functors(g0, f0)
    return NatTrans(top, compose_functors(g1, f1),
                    {x: top.target.identity[top.ob(x)]
                     for x in top.source.objects})


def check_segal(F, guard=None):
    """Comparison fiber([n]) -> fiber([l]) x_{fiber([0])} fiber([n-l])
    must be an equivalence for every n > l > 0."""
    rep = CheckReport(f"segal({F.name})", True)
    delta = F.delta
    for n in range(2, F.N + 1):
        for l in range(1, n):
            t = _mor(delta, l, n, [a + n - l for a in range(l + 1)])
            s = _mor(delta, n - l, n, range(n - l + 1))
            i0 = _mor(delta, 0, l, [0])
            i1 = _mor(delta, 0, n - l, [n - l])
            sq = CatSquare(F.trans[t], F.trans[s], F.trans[i0], F.trans[i1],
                           _identity_witness(F.trans[t], F.trans[s],
                                             F.trans[i0], F.trans[i1]))
            cls = classify_square(sq, guard)
            if not cls.equivalence:
                rep.add_failure("segal-comparison", (n, l))
                rep.details[f"({n},{l})"] = cls
    return rep


def check_complete(F, guard=None):
    """The comparison of the completeness square built from the interval
    embeddings a -> 2a + l of [1] into [3] must be an equivalence."""
    rep = CheckReport(f"complete({F.name})", True)
    if F.N < 3:
        rep.add_failure("level-bound-too-small", F.N)
        return rep
    delta = F.delta
    C0, C1, C3 = F.fibers[0], F.fibers[1], F.fibers[3]
    P0 = product_cat(C0, C0, name="C0xC0")
    P1 = product_cat(C1, C1, name="C1xC1")
    e3 = _mor(delta, 3, 0, [0, 0, 0, 0])
    e1 = _mor(delta, 1, 0, [0, 0])
    mu0 = _mor(delta, 1, 3, [0, 2])
    mu1 = _mor(delta, 1, 3, [1, 3])
    f0 = F.trans[e3]                       # C0 -> C3
    f1 = Functor(C0, P0, {x: (x, x) for x in C0.objects},
                 {m: (m, m) for m in C0.morphisms}, name="diag")
    T0, T1, Te = F.trans[mu0], F.trans[mu1], F.trans[e1]
    g0 = Functor(C3, P1, {x: (T0.ob(x), T1.ob(x)) for x in C3.objects},
                 {m: (T0.mor(m), T1.mor(m)) for m in C3.morphisms},
                 name="mu0xmu1")
    g1 = Functor(P0, P1, {(x, y): (Te.ob(x), Te.ob(y)) for (x, y) in P0.objects},
                 {(m, k): (Te.mor(m), Te.mor(k)) for (m, k) in P0.morphisms},
                 name="exe")
    sq = CatSquare(f0, f1, g0, g1, _identity_witness(f0, f1, g0, g1))
    cls = classify_square(sq, guard)
    if not cls.equivalence:
        rep.add_failure("completeness-comparison", cls.to_json())
    return rep


# -- truncation ----------------------------------------------------------------------

def truncate_segal(F, guard=None, check=True):
    """Recover a category from a complete Segal family: objects are the
    objects of fiber([0]), morphisms are connected components of the
    groupoid of framed 1-simplices, composition goes through a Segal
    lift into fiber([2]) and is verified independent of the lift."""
    if check:
        seg = check_segal(F, guard)
        if not seg.passed:
            raise StructuralError(f"truncate_segal: Segal check failed: {seg.failures[0]}")
        cpl = check_complete(F, guard)
        if not cpl.passed:
            raise StructuralError(f"truncate_segal: completeness failed: {cpl.failures[0]}")
    delta = F.delta
    C0, C1, C2 = F.fibers[0], F.fibers[1], F.fibers[2]
    s = F.trans[_mor(delta, 0, 1, [0])]
    t = F.trans[_mor(delta, 0, 1, [1])]
    e = F.trans[_mor(delta, 1, 0, [0, 0])]
    m01 = F.trans[_mor(delta, 1, 2, [0, 1])]
    m12 = F.trans[_mor(delta, 1, 2, [1, 2])]
    m02 = F.trans[_mor(delta, 1, 2, [0, 2])]

    triples = {}
    for x in C0.objects:
        for y in C0.objects:
            tr = []
            for phi in C1.objects:
                for a in C0.isos(s.ob(phi), x):
                    for b in C0.isos(t.ob(phi), y):
                        tr.append((phi, a, b))
            triples[(x, y)] = tr

    # connected components via repeated merging along C1 morphisms
    cls_of, reps = {}, {}
    for key, tr in triples.items():
        parent = {q: q for q in tr}

        def find(q):
            while parent[q] != q:
                parent[q] = parent[parent[q]]
                q = parent[q]
            return q

        for (phi, a, b) in tr:
            for u in C1.morphisms:
                if C1.src[u] != phi:
                    continue
                phi2 = C1.tgt[u]
                a2 = C0.compose(a, C0.inverse(s.mor(u)))
                b2 = C0.compose(b, C0.inverse(t.mor(u)))
                ra, rb = find((phi, a, b)), find((phi2, a2, b2))
                if ra != rb:
                    parent[max(ra, rb, key=repr)] = min(ra, rb, key=repr)
        for q in tr:
            cls_of[(key, q)] = find(q)
        reps[key] = sorted({find(q) for q in tr}, key=repr)

    objects = list(C0.objects)
    mors, src, tgt = [], {}, {}
    for (x, y), rs in sorted(reps.items(), key=repr):
        for r in rs:
            mid = (x, y, r)
            mors.append(mid)
            src[mid] = x
            tgt[mid] = y

    def compose_triples(q1, q2, want_all=False):
        """All composites of q1: x -> y then q2: y -> z, as class reps."""
        (phi, a, b), (psi, c, d) = q1, q2
        found = set()
        for theta in C2.objects:
            for u in _isos_of(C1, m01.ob(theta), phi):
                for v in _isos_of(C1, m12.ob(theta), psi):
                    if C0.compose(b, t.mor(u)) != C0.compose(c, s.mor(v)):
                        continue
                    comp = (m02.ob(theta),
                            C0.compose(a, s.mor(u)),
                            C0.compose(d, t.mor(v)))
                    xz = (C0.tgt[comp[1]], C0.tgt[comp[2]])
                    found.add(cls_of[(xz, comp)])
                    if not want_all and found:
                        return found
        return found

    table = {}
    for f in mors:
        for g in mors:
            if tgt[f] != src[g]:
                continue
            composites = compose_triples(f[2], g[2], want_all=True)
            if len(composites) != 1:
                raise StructuralError(
                    f"truncate_segal: composite not unique for {(g, f)!r}: "
                    f"{len(composites)} classes")
            table[(g, f)] = (src[f], tgt[g], next(iter(composites)))

    ident = {}
    for x in objects:
        q = (e.ob(x), C0.identity[x], C0.identity[x])
        ident[x] = (x, x, cls_of[((x, x), q)])

    cat = FinCat(objects, mors, src, tgt, ident,
                 compose_fn=lambda g, f: table[(g, f)],
                 name=f"h+({F.name})")
    return cat


def _isos_of(C, a, b):
    return [m for m in C.hom(a, b) if C.is_iso(m)]
