"""Limits, colimits and Kan extensions of set-valued functors.

Colimits are quotients of disjoint unions computed with union-find,
limits are compatible families, and Kan extensions are computed
pointwise over comma fibers.  The base change comparison for diagrams
of cofibrations is constructed and checked elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fincat import (CatSquare, FinCat, Functor, NatTrans, classify_square,
                     compose_functors)
from .fib import (SetValued, FiberedCat, is_cofibration,
                  is_cartesian_functor)
from .guards import StructuralError, check_guard
from .report import CheckReport

SetFunctor = SetValued


@dataclass
class ConeData:
    functor: SetValued
    vertex: tuple
    legs: dict           # object -> dict element -> vertex element

    def is_cone(self):
        """Colimit cone: legs commute with every map of the diagram."""
        E = self.functor
        C = E.source
        for m in C.morphisms:
            a, b = C.src[m], C.tgt[m]
            for x in E.set(a):
                if self.legs[a][x] != self.legs[b][E.map(m)[x]]:
                    return False
        return True


@dataclass
class FamilyConeData:
    functor: SetValued
    vertex: tuple
    legs: dict           # object -> dict vertex element -> element

    def is_cone(self):
        """Limit cone: projections commute with every map of the diagram."""
        E = self.functor
        C = E.source
        for m in C.morphisms:
            a, b = C.src[m], C.tgt[m]
            for v in self.vertex:
                if E.map(m)[self.legs[a][v]] != self.legs[b][v]:
                    return False
        return True


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb, key=repr)] = min(ra, rb, key=repr)


def colim_set(E, verify=False, guard=None):
    """Colimit of a set-valued functor: the disjoint union of the E(i)
    modulo x ~ E(f)(x), with smallest-repr class representatives.  With
    verify=True the cone is checked universal against every enumerated
    cone with vertex of size <= |colim| + 1."""
    C = E.source
    nodes = [(i, x) for i in C.objects for x in E.set(i)]
    uf = _UnionFind(nodes)
    for m in C.morphisms:
        a, b = C.src[m], C.tgt[m]
        for x in E.set(a):
            uf.union((a, x), (b, E.map(m)[x]))
    reps = sorted({uf.find(n) for n in nodes}, key=repr)
    legs = {i: {x: uf.find((i, x)) for x in E.set(i)} for i in C.objects}
    cone = ConeData(E, tuple(reps), legs)
    if verify:
        rep = check_colim_universal(E, cone, guard)
        if not rep.passed:
            raise StructuralError(f"colimit cone not universal: {rep.failures[0]}")
    return tuple(reps), cone


def _all_cones(E, vertex, guard=None):
    """All colimit cones of E with the given vertex set."""
    C = E.source
    slots = [(i, x) for i in C.objects for x in E.set(i)]
    size = max(len(vertex), 1) ** len(slots)
    check_guard("cone enumeration", size, guard)
    out = []
    legs = {i: {} for i in C.objects}

    def consistent(k):
        i, x = slots[k]
        for m in C.morphisms:
            a, b = C.src[m], C.tgt[m]
            for y in E.set(a):
                z = E.map(m)[y]
                if y in legs[a] and z in legs[b] and legs[a][y] != legs[b][z]:
                    return False
        return True

    def rec(k):
        if k == len(slots):
            out.append({i: dict(v) for i, v in legs.items()})
            return
        i, x = slots[k]
        for v in vertex:
            legs[i][x] = v
            if consistent(k):
                rec(k + 1)
            del legs[i][x]

    rec(0)
    return out


def check_colim_universal(E, cone, guard=None):
    """Factorization test: every cone with a small vertex factors through
    `cone` by exactly one map."""
    rep = CheckReport("colim-universal", True)
    C = E.source
    V = list(cone.vertex)
    for k in range(len(V) + 2):
        W = list(range(k))
        for legs in _all_cones(E, W, guard):
            # u: V -> W is constrained pointwise by u(leg(x)) = leg'(x)
            n = 1
            forced = {}
            for i in C.objects:
                for x in E.set(i):
                    v = cone.legs[i][x]
                    if forced.setdefault(v, legs[i][x]) != legs[i][x]:
                        n = 0
            for v in V:
                if v not in forced:
                    n *= len(W)
            if n != 1:
                rep.add_failure("factorization-count", (k, n))
                return rep
    return rep


def _all_maps(A, B, guard=None):
    check_guard("map enumeration", max(len(B), 1) ** len(A), guard)
    if not A:
        yield {}
        return
    import itertools
    for values in itertools.product(B, repeat=len(A)):
        yield dict(zip(A, values))


def lim_set(E, verify=False, guard=None):
    """Limit of a set-valued functor: compatible families, represented
    as canonically sorted tuples of (object, element) pairs."""
    C = E.source
    objs = list(C.objects)
    size = 1
    for i in objs:
        size *= max(len(E.set(i)), 1)
    check_guard("limit families", size, guard)
    fams = []
    choice = {}

    def ok():
        for m in C.morphisms:
            a, b = C.src[m], C.tgt[m]
            if a in choice and b in choice and E.map(m)[choice[a]] != choice[b]:
                return False
        return True

    def rec(k):
        if k == len(objs):
            fams.append(tuple(sorted(choice.items(), key=repr)))
            return
        for x in E.set(objs[k]):
            choice[objs[k]] = x
            if ok():
                rec(k + 1)
            del choice[objs[k]]

    rec(0)
    fams.sort(key=repr)
    legs = {i: {f: dict(f)[i] for f in fams} for i in objs}
    cone = FamilyConeData(E, tuple(fams), legs)
    if verify:
        rep = check_lim_universal(E, cone, guard)
        if not rep.passed:
            raise StructuralError(f"limit cone not universal: {rep.failures[0]}")
    return tuple(fams), cone


def check_lim_universal(E, cone, guard=None):
    """Dual factorization test for limit cones."""
    rep = CheckReport("lim-universal", True)
    C = E.source
    V = list(cone.vertex)
    for k in range(len(V) + 2):
        W = list(range(k))
        # cones from W: per-object maps W -> E(i) commuting with E(f)
        slots = list(C.objects)
        all_legs = []

        def rec(j, legs):
            if j == len(slots):
                all_legs.append({i: dict(v) for i, v in legs.items()})
                return
            i = slots[j]
            for m in _all_maps(W, list(E.set(i)), guard):
                legs[i] = m
                good = True
                for mm in C.morphisms:
                    a, b = C.src[mm], C.tgt[mm]
                    if a in legs and b in legs and any(
                            E.map(mm)[legs[a][w]] != legs[b][w] for w in W):
                        good = False
                        break
                if good:
                    rec(j + 1, legs)
                del legs[i]

        rec(0, {})
        for legs in all_legs:
            # u: W -> V is constrained pointwise: u(w) must match all legs
            n = 1
            for w in W:
                n *= len([v for v in V
                          if all(cone.legs[i][v] == legs[i][w]
                                 for i in C.objects)])
            if n != 1:
                rep.add_failure("factorization-count", (k, n))
                return rep
    return rep


# -- comma fibers ---------------------------------------------------------------

def left_comma_fiber(gamma, i):
    """The category gamma / i: objects (i', a: gamma(i') -> i)."""
    Ip, I = gamma.source, gamma.target
    objects = [(ip, a) for ip in Ip.objects for a in I.hom(gamma.ob(ip), i)]
    mors, src, tgt = [], {}, {}
    for (ip, a) in objects:
        for (ip2, a2) in objects:
            for f in Ip.hom(ip, ip2):
                if I.compose(a2, gamma.mor(f)) == a:
                    m = ((ip, a), (ip2, a2), f)
                    mors.append(m)
                    src[m] = (ip, a)
                    tgt[m] = (ip2, a2)
    ident = {(ip, a): ((ip, a), (ip, a), Ip.identity[ip])
             for (ip, a) in objects}
    cat = FinCat(objects, mors, src, tgt, ident,
                 compose_fn=lambda g, f: (f[0], g[1], Ip.compose(g[2], f[2])),
                 name=f"{gamma.name}/{i!r}")
    return cat


def right_comma_fiber(gamma, i):
    """The category i \\ gamma: objects (i', a: i -> gamma(i'))."""
    Ip, I = gamma.source, gamma.target
    objects = [(ip, a) for ip in Ip.objects for a in I.hom(i, gamma.ob(ip))]
    mors, src, tgt = [], {}, {}
    for (ip, a) in objects:
        for (ip2, a2) in objects:
            for f in Ip.hom(ip, ip2):
                if I.compose(gamma.mor(f), a) == a2:
                    m = ((ip, a), (ip2, a2), f)
                    mors.append(m)
                    src[m] = (ip, a)
                    tgt[m] = (ip2, a2)
    ident = {(ip, a): ((ip, a), (ip, a), Ip.identity[ip])
             for (ip, a) in objects}
    cat = FinCat(objects, mors, src, tgt, ident,
                 compose_fn=lambda g, f: (f[0], g[1], Ip.compose(g[2], f[2])),
                 name=f"{i!r}\\{gamma.name}")
    return cat


def _restrict_to_comma(E, fiber):
    """E pulled back along the forgetful functor of a comma fiber."""
    sets = {o: E.set(o[0]) for o in fiber.objects}
    maps = {m: E.map(m[2]) for m in fiber.morphisms}
    return SetValued(fiber, sets, maps, name=f"{E.name}|")


# -- Kan extensions -------------------------------------------------------------

@dataclass
class LanResult:
    functor: SetValued       # the extension on the target category
    unit: dict                # i' -> dict E(i') -> extension(gamma(i'))
    cones: dict               # i -> ConeData over the comma fiber


def lan(gamma, E, guard=None):
    """Left Kan extension: pointwise colimits over left comma fibers."""
    Ip, I = gamma.source, gamma.target
    fibers = {i: left_comma_fiber(gamma, i) for i in I.objects}
    cones, sets = {}, {}
    for i in I.objects:
        _, cone = colim_set(_restrict_to_comma(E, fibers[i]), guard=guard)
        cones[i] = cone
        sets[i] = cone.vertex
    maps = {}
    for g in I.morphisms:
        a, b = I.src[g], I.tgt[g]
        table = {}
        for (ip, al) in fibers[a].objects:
            tgt_obj = (ip, I.compose(g, al))
            for x in E.set(ip):
                table[cones[a].legs[(ip, al)][x]] = \
                    cones[b].legs[tgt_obj][x]
        maps[g] = table
    out = SetValued(I, sets, maps, name=f"lan({E.name})")
    unit = {}
    for ip in Ip.objects:
        i = gamma.ob(ip)
        key = (ip, I.identity[i])
        unit[ip] = {x: cones[i].legs[key][x] for x in E.set(ip)}
    return LanResult(out, unit, cones)


@dataclass
class RanResult:
    functor: SetValued
    counit: dict              # i' -> dict extension(gamma(i')) -> E(i')
    cones: dict


def ran(gamma, E, guard=None):
    """Right Kan extension: pointwise limits over right comma fibers."""
    Ip, I = gamma.source, gamma.target
    fibers = {i: right_comma_fiber(gamma, i) for i in I.objects}
    cones, sets = {}, {}
    for i in I.objects:
        _, cone = lim_set(_restrict_to_comma(E, fibers[i]), guard=guard)
        cones[i] = cone
        sets[i] = cone.vertex
    maps = {}
    for g in I.morphisms:
        a, b = I.src[g], I.tgt[g]
        table = {}
        for fam in sets[a]:
            d = dict(fam)
            out_fam = tuple(sorted(
                (((ip, al), d[(ip, I.compose(al, g))])
                 for (ip, al) in fibers[b].objects), key=repr))
            table[fam] = out_fam
        maps[g] = table
    out = SetValued(I, sets, maps, name=f"ran({E.name})")
    counit = {}
    for ip in Ip.objects:
        i = gamma.ob(ip)
        key = (ip, I.identity[i])
        counit[ip] = {fam: dict(fam)[key] for fam in sets[i]}
    return RanResult(out, counit, cones)


# -- natural maps of set functors -------------------------------------------------

def pullback_set_functor(gamma, F):
    """gamma^* F: restriction of a set functor along gamma."""
    Ip = gamma.source
    return SetValued(Ip, {ip: F.set(gamma.ob(ip)) for ip in Ip.objects},
                     {m: F.map(gamma.mor(m)) for m in Ip.morphisms},
                     name=f"{gamma.name}^*{F.name}")


def set_nat_transformations(X, Y, guard=None):
    """All natural transformations X -> Y of set functors, as per-object
    map dictionaries."""
    C = X.source
    objs = list(C.objects)
    size = 1
    for i in objs:
        size *= max(len(Y.set(i)), 1) ** len(X.set(i))
    check_guard("set-functor nat enumeration", size, guard)
    results = []
    comp = {}

    def ok():
        for m in C.morphisms:
            a, b = C.src[m], C.tgt[m]
            if a in comp and b in comp and any(
                    comp[b][X.map(m)[x]] != Y.map(m)[comp[a][x]]
                    for x in X.set(a)):
                return False
        return True

    def rec(k):
        if k == len(objs):
            results.append({i: dict(v) for i, v in comp.items()})
            return
        i = objs[k]
        for m in _all_maps(list(X.set(i)), list(Y.set(i)), guard):
            comp[i] = m
            if ok():
                rec(k + 1)
            del comp[i]

    rec(0)
    return results


def set_functors_isomorphic(X, Y, guard=None):
    """A natural isomorphism X ~ Y, or None."""
    if any(len(X.set(i)) != len(Y.set(i)) for i in X.source.objects):
        return None
    for t in set_nat_transformations(X, Y, guard):
        if all(len(set(t[i].values())) == len(X.set(i))
               for i in X.source.objects):
            return t
    return None


def check_lan_adjunction(gamma, E, F, guard=None):
    """The canonical map Hom(lan E, F) -> Hom(E, gamma^* F) given by
    whiskering and the unit must be a bijection."""
    rep = CheckReport("lan-adjunction", True)
    L = lan(gamma, E, guard)
    left = set_nat_transformations(L.functor, F, guard)
    right = set_nat_transformations(E, pullback_set_functor(gamma, F), guard)
    images = []
    for phi in left:
        tr = {ip: {x: phi[gamma.ob(ip)][L.unit[ip][x]] for x in E.set(ip)}
              for ip in gamma.source.objects}
        images.append(tr)
    if len(left) != len(right):
        rep.add_failure("hom-count-mismatch", (len(left), len(right)))
    seen = []
    for tr in images:
        if tr in seen:
            rep.add_failure("transpose-not-injective", None)
            break
        seen.append(tr)
    for tr in images:
        if tr not in right:
            rep.add_failure("transpose-not-natural", None)
            break
    rep.details["hom_left"] = len(left)
    rep.details["hom_right"] = len(right)
    return rep


# -- base change -----------------------------------------------------------------

@dataclass
class BaseChangeDiagram:
    """Two composable squares

        I'0 --gamma_p--> I'1 --pi_p--> I'
         |phi0             |phi1         |phi
        I0  --gamma-->   I1  --pi-->   I

    with both squares cartesian, pi and pi.gamma cofibrations, and gamma
    cocartesian over I."""
    gamma_p: Functor
    pi_p: Functor
    phi0: Functor
    phi1: Functor
    phi: Functor
    gamma: Functor
    pi: Functor


def check_base_change(D, E, guard=None):
    """Check the preconditions of the diagram and that the base change
    comparison colim_{I'0/j} E.phi0 -> colim_{I0/phi1(j)} E is bijective
    for every object j of I'1."""
    rep = CheckReport("base-change", True)
    if compose_functors(D.phi1, D.gamma_p) != compose_functors(D.gamma, D.phi0):
        rep.add_failure("left-square-not-commuting", None)
    if compose_functors(D.phi, D.pi_p) != compose_functors(D.pi, D.phi1):
        rep.add_failure("right-square-not-commuting", None)
    if not rep.passed:
        return rep
    for tag, f0, f1, g0, g1 in (
            ("left", D.gamma_p, D.phi0, D.phi1, D.gamma),
            ("right", D.pi_p, D.phi1, D.phi, D.pi)):
        top = compose_functors(g0, f0)
        w = NatTrans(top, top,
                     {x: top.target.identity[top.ob(x)]
                      for x in top.source.objects})
        cls = classify_square(CatSquare(f0, f1, g0, g1, w), guard)
        if not cls.equivalence:
            rep.add_failure(f"{tag}-square-not-cartesian", cls.to_json())
    pig = compose_functors(D.pi, D.gamma)
    if not is_cofibration(D.pi).passed:
        rep.add_failure("pi-not-cofibration", None)
    if not is_cofibration(pig).passed:
        rep.add_failure("pi-gamma-not-cofibration", None)
    if rep.passed:
        r = is_cartesian_functor(
            Functor(opposite_of(D.gamma.source), opposite_of(D.gamma.target),
                    D.gamma.obj_map, D.gamma.mor_map, name="gamma^o"),
            FiberedCat(_op_functor(pig)), FiberedCat(_op_functor(D.pi)))
        if not r.passed:
            rep.add_failure("gamma-not-cocartesian", r.witness)
    if not rep.passed:
        return rep

    lanp = lan(D.gamma_p, pullback_set_functor(D.phi0, E), guard)
    lanE = lan(D.gamma, E, guard)
    I1p = D.gamma_p.target
    for j in I1p.objects:
        src_cone = lanp.cones[j]
        tgt_cone = lanE.cones[D.phi1.ob(j)]
        table = {}
        ok = True
        for (ip0, a) in src_cone.functor.source.objects:
            for x in E.set(D.phi0.ob(ip0)):
                v = src_cone.legs[(ip0, a)][x]
                w = tgt_cone.legs[(D.phi0.ob(ip0), D.phi1.mor(a))][x]
                if table.setdefault(v, w) != w:
                    ok = False
        if not ok or len(set(table.values())) != len(table) \
                or set(table.values()) != set(tgt_cone.vertex) \
                or set(table) != set(src_cone.vertex):
            rep.add_failure("base-change-not-bijective", j)
    rep.details["objects_checked"] = len(I1p.objects)
    return rep


def _op_functor(F):
    return Functor(opposite_of(F.source), opposite_of(F.target),
                   F.obj_map, F.mor_map, name=f"{F.name}^o")


_OPS = {}


def opposite_of(C):
    """Opposite categories memoized by identity, so functors between
    opposites share endpoint instances."""
    key = id(C)
    if key not in _OPS:
        from .fincat import opposite
        _OPS[key] = opposite(C)
    return _OPS[key]
