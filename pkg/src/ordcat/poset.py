"""Finite posets: dimensions, barycentric subdivisions, the cone and
sharp constructions, zigzags, and the standard-square builders.

Posets carry the full reflexive order relation (not a Hasse diagram), so
monotonicity and closedness tests are O(1) per pair.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .fincat import FinCat, Functor
from .guards import StructuralError, check_guard
from .report import CheckReport


class FinPoset:
    def __init__(self, elements, le, name="J"):
        """`le` is any iterable of pairs; reflexive pairs are added."""
        self.elements = tuple(elements)
        rel = set(le)
        rel.update((x, x) for x in self.elements)
        self.le = frozenset(rel)
        self.name = name

    def leq(self, a, b):
        return (a, b) in self.le

    def lt(self, a, b):
        return a != b and (a, b) in self.le

    def relations(self):
        """Non-reflexive order pairs, deterministically ordered."""
        idx = {x: k for k, x in enumerate(self.elements)}
        return sorted(((a, b) for a, b in self.le if a != b),
                      key=lambda p: (idx[p[0]], idx[p[1]]))

    def down_set(self, x):
        return [y for y in self.elements if self.leq(y, x)]

    def up_set(self, x):
        return [y for y in self.elements if self.leq(x, y)]

    def validate(self):
        rep = CheckReport(f"validate-poset({self.name})", True)
        els = set(self.elements)
        if len(els) != len(self.elements):
            rep.add_failure("duplicate-elements", None)
        for a, b in self.le:
            if a not in els or b not in els:
                rep.add_failure("bad-relation", (a, b))
        if not rep.passed:
            return rep
        for a, b in self.le:
            if a != b and (b, a) in self.le:
                rep.add_failure("antisymmetry", (a, b))
        for a, b in self.le:
            for c in self.elements:
                if (b, c) in self.le and (a, c) not in self.le:
                    rep.add_failure("transitivity", (a, b, c))
        return rep

    def opposite(self):
        return FinPoset(self.elements, [(b, a) for a, b in self.le],
                        name=f"{self.name}^o")

    def key(self):
        return (self.elements, tuple(self.relations()))

    def __eq__(self, other):
        return isinstance(other, FinPoset) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"FinPoset({self.name}: {len(self.elements)} elements)"


class PosetMap:
    def __init__(self, source, target, mapping, name="f"):
        self.source = source
        self.target = target
        self.mapping = dict(mapping)
        self.name = name

    def __call__(self, x):
        return self.mapping[x]

    def is_monotone(self):
        S, T = self.source, self.target
        return (all(x in self.mapping and self.mapping[x] in set(T.elements)
                    for x in S.elements)
                and all(T.leq(self.mapping[a], self.mapping[b])
                        for a, b in S.le))

    def validate(self):
        rep = CheckReport(f"validate-poset-map({self.name})", True)
        if not self.is_monotone():
            bad = [(a, b) for a, b in self.source.le
                   if not self.target.leq(self.mapping.get(a), self.mapping.get(b))]
            rep.add_failure("not-monotone", bad[:1] or None)
        return rep

    def is_injective(self):
        vals = [self.mapping[x] for x in self.source.elements]
        return len(set(vals)) == len(vals)

    def is_full_embedding(self):
        if not self.is_injective() or not self.is_monotone():
            return False
        return all(self.source.leq(a, b) == self.target.leq(self.mapping[a], self.mapping[b])
                   for a in self.source.elements for b in self.source.elements)

    def key(self):
        return (self.source.key(), self.target.key(),
                tuple(self.mapping[x] for x in self.source.elements))

    def __eq__(self, other):
        return isinstance(other, PosetMap) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"PosetMap({self.name}: {self.source.name} -> {self.target.name})"


def identity_map(P):
    return PosetMap(P, P, {x: x for x in P.elements}, name=f"id_{P.name}")


def compose_maps(g, f):
    return PosetMap(f.source, g.target,
                    {x: g.mapping[f.mapping[x]] for x in f.source.elements},
                    name=f"{g.name}.{f.name}")


def is_left_closed(f):
    """Full embedding with downward-closed image."""
    if not f.is_full_embedding():
        return False
    image = {f.mapping[x] for x in f.source.elements}
    return all(b not in image or a in image for a, b in f.target.le)


def is_right_closed(f):
    if not f.is_full_embedding():
        return False
    image = {f.mapping[x] for x in f.source.elements}
    return all(a not in image or b in image for a, b in f.target.le)


# -- stock posets -------------------------------------------------------------

def chain_poset(n, name=None):
    """The chain [n] = {0 <= 1 <= ... <= n}."""
    els = tuple(range(n + 1))
    return FinPoset(els, [(a, b) for a in els for b in els if a <= b],
                    name=name or f"[{n}]")


def discrete_poset(elements, name="S"):
    return FinPoset(elements, [], name=name)


def v_poset():
    """V = {0,1}^< : two incomparable points over a common bottom."""
    return FinPoset(("o", "0", "1"), [("o", "0"), ("o", "1")], name="V")


def product_poset(P, Q, name=None):
    els = [(p, q) for p in P.elements for q in Q.elements]
    le = [((p, q), (pp, qq)) for (p, q) in els for (pp, qq) in els
          if P.leq(p, pp) and Q.leq(q, qq)]
    return FinPoset(els, le, name=name or f"{P.name}x{Q.name}")


def disjoint_union_poset(P, Q, name=None):
    els = [(0, p) for p in P.elements] + [(1, q) for q in Q.elements]
    le = ([((0, a), (0, b)) for a, b in P.le]
          + [((1, a), (1, b)) for a, b in Q.le])
    return FinPoset(els, le, name=name or f"{P.name}+{Q.name}")


def subposet(P, keep, name=None):
    keep = [x for x in P.elements if x in set(keep)]
    return FinPoset(keep, [(a, b) for a, b in P.le
                           if a in set(keep) and b in set(keep)],
                    name=name or f"{P.name}|sub")


def pullback_poset(f, g, name=None):
    """{(p, q) : f(p) = g(q)} with the componentwise order."""
    els = [(p, q) for p in f.source.elements for q in g.source.elements
           if f.mapping[p] == g.mapping[q]]
    le = [((p, q), (pp, qq)) for (p, q) in els for (pp, qq) in els
          if f.source.leq(p, pp) and g.source.leq(q, qq)]
    return FinPoset(els, le, name=name or "pullback")


def comma_poset(f, name=None):
    """P/_f Q = {(p, q) : f(p) <= q} for f: P -> Q, ordered componentwise."""
    P, Q = f.source, f.target
    els = [(p, q) for p in P.elements for q in Q.elements
           if Q.leq(f.mapping[p], q)]
    le = [((p, q), (pp, qq)) for (p, q) in els for (pp, qq) in els
          if P.leq(p, pp) and Q.leq(q, qq)]
    return FinPoset(els, le, name=name or f"{P.name}/{Q.name}")


def _fresh(elements, base="o"):
    if base not in elements:
        return base
    k = 0
    while f"{base}{k}" in elements:
        k += 1
    return f"{base}{k}"


def cone_left(J, name=None):
    """J^< : J with a new initial element."""
    o = _fresh(J.elements)
    le = list(J.le) + [(o, x) for x in J.elements] + [(o, o)]
    return FinPoset((o,) + J.elements, le, name=name or f"{J.name}^<"), o


def cone_right(J, name=None):
    """J^> : J with a new terminal element."""
    o = _fresh(J.elements)
    le = list(J.le) + [(x, o) for x in J.elements] + [(o, o)]
    return FinPoset(J.elements + (o,), le, name=name or f"{J.name}^>"), o


# -- dimension and barycentric subdivision ------------------------------------

def linear_extension(P):
    order = []
    left = list(P.elements)
    while left:
        for x in left:
            if all(not P.lt(y, x) for y in left):
                order.append(x)
                left.remove(x)
                break
        else:
            raise StructuralError(f"{P.name} is not a poset")
    return order


def chain_dim(J):
    """Length of the longest chain minus one (-1 for the empty poset)."""
    if not J.elements:
        return -1
    depth = {}
    for x in linear_extension(J):
        depth[x] = max((depth[y] + 1 for y in J.elements
                        if J.lt(y, x)), default=0)
    return max(depth.values())


def chains(J):
    """All nonempty chains of J as frozensets, deterministically ordered."""
    order = linear_extension(J)
    out = []

    def rec(prefix, rest):
        for k, x in enumerate(rest):
            if all(J.leq(y, x) for y in prefix):
                chain = prefix + [x]
                out.append(frozenset(chain))
                rec(chain, rest[k + 1:])

    rec([], order)
    return out


def chain_max(J, c):
    for x in c:
        if all(J.leq(y, x) for y in c):
            return x
    raise StructuralError("not a chain")


def barycentric(J):
    """B(J): nonempty chains ordered by inclusion, with xi = max."""
    els = chains(J)
    le = [(a, b) for a in els for b in els if a <= b]
    B = FinPoset(els, le, name=f"B({J.name})")
    xi = PosetMap(B, J, {c: chain_max(J, c) for c in els}, name="xi")
    return B, xi


def barycentric_bar(J):
    """B-bar(J): chains with inclusion restricted to equal maxima.

    Returns the poset together with i': Bbar -> B(J) (identity on
    elements) and xi': Bbar -> J with discrete target.
    """
    B, xi = barycentric(J)
    le = [(a, b) for a, b in B.le if xi.mapping[a] == xi.mapping[b]]
    Bbar = FinPoset(B.elements, le, name=f"Bbar({J.name})")
    i_prime = PosetMap(Bbar, B, {c: c for c in B.elements}, name="i'")
    Jd = discrete_poset(J.elements, name=f"{J.name}_disc")
    xi_prime = PosetMap(Bbar, Jd, dict(xi.mapping), name="xi'")
    return Bbar, i_prime, xi_prime


# -- sharp constructions -------------------------------------------------------

def sharp(S_elements, name=None):
    """S-sharp: S x [1] plus a single new element o with (s,0) <= o."""
    S_elements = tuple(S_elements)
    o = _fresh([(s, k) for s in S_elements for k in (0, 1)])
    els = [(s, k) for s in S_elements for k in (0, 1)] + [o]
    le = [((s, 0), (s, 1)) for s in S_elements]
    le += [((s, 0), o) for s in S_elements]
    return FinPoset(els, le, name=name or "S#"), o


def _sharp_cone_map(S_elements, cone, cone_tip):
    """sharp(S) together with the map xi^o: S# -> S^< used in excision;
    (s,1) -> s, (s,0) -> o, o -> o.  `cone` must be the cone S^< with
    tip element `cone_tip` and the elements of S untouched."""
    P, o = sharp(S_elements)
    mapping = {o: cone_tip}
    for s in S_elements:
        mapping[(s, 1)] = s
        mapping[(s, 0)] = cone_tip
    return P, PosetMap(P, cone, mapping, name="xi^o"), o


def sharp2(S_elements, name=None):
    """S-sharp-sharp: the pushout of B(S^>) <- S -> S x [1].

    Elements are the chains of S^> (the chain {s} plays the role of
    (s,0)) together with top points (s,1)."""
    cone, tip = cone_left(discrete_poset(S_elements))
    P, _ = _sharp2_cone_map(S_elements, tip, cone)
    if name:
        P.name = name
    return P


def _sharp2_cone_map(S_elements, cone_tip, cone):
    S_elements = tuple(S_elements)
    Sgt, top = cone_right(discrete_poset(S_elements))
    B, _ = barycentric(Sgt)
    pts = [("p", s) for s in S_elements]
    els = [("b", c) for c in B.elements] + pts
    le = [(("b", a), ("b", b)) for a, b in B.le]
    le += [(("b", frozenset([s])), ("p", s)) for s in S_elements]
    P = FinPoset(els, le, name="S##")
    mapping = {("p", s): s for s in S_elements}
    for c in B.elements:
        mapping[("b", c)] = cone_tip
    return P, PosetMap(P, cone, mapping, name="h")


# -- zigzags -------------------------------------------------------------------

def zigzag(m, name=None):
    """Z_m = {0..m} with 0 <= 1 >= 2 <= 3 >= ..."""
    els = tuple(range(m + 1))
    le = []
    for k in els:
        if k % 2 == 1:
            le.append((k - 1, k))
            if k + 1 <= m:
                le.append((k + 1, k))
    return FinPoset(els, le, name=name or f"Z{m}")


def zeta(m):
    """zeta_m: Z_m -> [ceil(m/2)], k -> ceil(k/2)."""
    Z = zigzag(m)
    target = chain_poset((m + 1) // 2)
    return PosetMap(Z, target, {k: (k + 1) // 2 for k in Z.elements},
                    name=f"zeta{m}")


# -- squares -------------------------------------------------------------------

@dataclass
class PosetSquare:
    """A commuting square of posets

        TL --top--> TR
        |left       |right
        BL -bottom-> BR

    verified to be simultaneously a pullback and a pushout of the
    underlying sets."""
    kind: str
    top_left: FinPoset
    top_right: FinPoset
    bottom_left: FinPoset
    bottom_right: FinPoset
    top: PosetMap
    left: PosetMap
    right: PosetMap
    bottom: PosetMap

    def validate(self):
        rep = CheckReport(f"validate-square({self.kind})", True)
        for f in (self.top, self.left, self.right, self.bottom):
            if not f.is_monotone():
                rep.add_failure("not-monotone", f.name)
        if not rep.passed:
            return rep
        for x in self.top_left.elements:
            if self.bottom.mapping[self.left.mapping[x]] != \
                    self.right.mapping[self.top.mapping[x]]:
                rep.add_failure("not-commuting", x)
        # pullback of sets: TL -> BL x_BR TR bijective
        pairs = {(self.left.mapping[x], self.top.mapping[x])
                 for x in self.top_left.elements}
        if len(pairs) != len(self.top_left.elements):
            rep.add_failure("pullback-injectivity", None)
        want = {(b, t) for b in self.bottom_left.elements
                for t in self.top_right.elements
                if self.bottom.mapping[b] == self.right.mapping[t]}
        if pairs != want:
            rep.add_failure("pullback-surjectivity", sorted_repr(want - pairs))
        # pushout of sets: every BR element covered exactly once after gluing
        for z in self.bottom_right.elements:
            nb = sum(1 for b in self.bottom_left.elements
                     if self.bottom.mapping[b] == z)
            nt = sum(1 for t in self.top_right.elements
                     if self.right.mapping[t] == z)
            ntl = sum(1 for x in self.top_left.elements
                      if self.bottom.mapping[self.left.mapping[x]] == z)
            if nb + nt - ntl != 1:
                rep.add_failure("pushout-count", z)
        return rep


def sorted_repr(items):
    return sorted(map(repr, items))


def standard_pushout(i0, i1):
    """Glue J0 and J1 along J01 via left-closed full embeddings.

    Returns (J, chi: J -> V, e0: J0 -> J, e1: J1 -> J) where chi is the
    characteristic map onto V = {0,1}^<."""
    for f in (i0, i1):
        if not is_left_closed(f):
            bad = next(((a, b) for a, b in f.target.le
                        if b in {f.mapping[x] for x in f.source.elements}
                        and a not in {f.mapping[x] for x in f.source.elements}),
                       None)
            raise StructuralError(f"standard_pushout: {f.name} is not a "
                                  f"left-closed full embedding; witness {bad!r}")
    if i0.source.key() != i1.source.key():
        raise StructuralError("standard_pushout: embeddings have different sources")
    J01, J0, J1 = i0.source, i0.target, i1.target
    im0 = {i0.mapping[x]: x for x in J01.elements}
    im1 = {i1.mapping[x]: x for x in J01.elements}

    def lab0(x):
        return ("m", im0[x]) if x in im0 else ("l", x)

    def lab1(y):
        return ("m", im1[y]) if y in im1 else ("r", y)

    els = [lab0(x) for x in J0.elements]
    els += [("r", y) for y in J1.elements if y not in im1]
    le = [(lab0(a), lab0(b)) for a, b in J0.le]
    le += [(lab1(a), lab1(b)) for a, b in J1.le]
    J = FinPoset(els, le, name=f"{J0.name}+{J1.name}")
    rep = J.validate()
    if not rep.passed:
        raise StructuralError(f"standard_pushout: glued relation is not a poset: "
                              f"{rep.failures[0]}")
    V = v_poset()
    chi = PosetMap(J, V, {x: {"m": "o", "l": "0", "r": "1"}[x[0]] for x in els},
                   name="chi")
    e0 = PosetMap(J0, J, {x: lab0(x) for x in J0.elements}, name="e0")
    e1 = PosetMap(J1, J, {y: lab1(y) for y in J1.elements}, name="e1")
    return J, chi, e0, e1


def standard_pushout_square(i0, i1):
    """The standard pushout as a verified PosetSquare."""
    J, chi, e0, e1 = standard_pushout(i0, i1)
    sq = PosetSquare("standard_pushout", i0.source, i1.target, i0.target, J,
                     top=i1, left=i0, right=e1, bottom=e0)
    rep = sq.validate()
    if not rep.passed:
        raise StructuralError(f"standard pushout square invalid: {rep.failures[0]}")
    return sq, chi


def _cone_shape(T):
    """Return (S elements, tip) if T is a cone S^< over a discrete S."""
    bottoms = [x for x in T.elements
               if all(T.leq(x, y) for y in T.elements)]
    if len(bottoms) != 1:
        raise StructuralError(f"{T.name} is not a cone over a discrete set")
    o = bottoms[0]
    S = [x for x in T.elements if x != o]
    for a in S:
        for b in S:
            if a != b and T.leq(a, b):
                raise StructuralError(f"{T.name} is not a cone over a discrete set")
    return S, o


def excision_square(f, variant):
    """The excision square over f: J -> S^< (variant 'i' uses S-sharp,
    variant 'ii' uses S-sharp-sharp)."""
    if variant not in ("i", "ii"):
        raise StructuralError(f"unknown excision variant {variant!r}")
    J, T = f.source, f.target
    S, o = _cone_shape(T)
    Jo = subposet(J, [j for j in J.elements if f.mapping[j] == o],
                  name=f"{J.name}_o")
    if variant == "i":
        Sh, h, sharp_o = _sharp_cone_map(S, T, o)
        TLfib, fib_tip = cone_right(discrete_poset(S))   # S^>
        fib_lab = {s: (s, 0) for s in S}
        fib_lab[fib_tip] = sharp_o
    else:
        Sh, h = _sharp2_cone_map(S, o, T)
        Sgt, top = cone_right(discrete_poset(S))
        TLfib, _ = barycentric(Sgt)                      # B(S^>)
        fib_lab = {c: ("b", c) for c in TLfib.elements}
    X = pullback_poset(f, h, name=f"{J.name}x{Sh.name}")
    TL = product_poset(Jo, TLfib, name=f"{Jo.name}x{TLfib.name}")
    top = PosetMap(TL, Jo, {(j, v): j for (j, v) in TL.elements}, name="pr")
    left = PosetMap(TL, X, {(j, v): (j, fib_lab[v]) for (j, v) in TL.elements},
                    name="incl")
    right = PosetMap(Jo, J, {j: j for j in Jo.elements}, name="incl")
    bottom = PosetMap(X, J, {(j, u): j for (j, u) in X.elements}, name="pr")
    sq = PosetSquare(f"excision_{variant}", TL, Jo, X, J,
                     top=top, left=left, right=right, bottom=bottom)
    rep = sq.validate()
    if not rep.passed:
        raise StructuralError(f"excision square invalid: {rep.failures[0]}")
    return sq


def cylinder_square(chi):
    """The cylinder square of chi: J -> [1], with corner J0 x [1]."""
    J = chi.source
    if chi.target.key() != chain_poset(1).key():
        raise StructuralError("cylinder_square: chi must target [1]")
    J0 = subposet(J, [j for j in J.elements if chi.mapping[j] == 0],
                  name=f"{J.name}_0")
    JI = comma_poset(chi, name=f"{J.name}/[1]")
    two = chain_poset(2)
    # J/[1] -> ar([1]) = [2]: position of (chi(j), k) in (0,0) < (0,1) < (1,1)
    pos = {(0, 0): 0, (0, 1): 1, (1, 1): 2}
    m = PosetMap(JI, two, {(j, k): pos[(chi.mapping[j], k)]
                           for (j, k) in JI.elements}, name="m")
    z = zeta(3)
    X = pullback_poset(m, z, name=f"zeta*({JI.name})")
    TL = product_poset(J0, chain_poset(1), name=f"{J0.name}x[1]")
    top = PosetMap(TL, J0, {(j, l): j for (j, l) in TL.elements}, name="pr")
    # the fiber of zeta_3 over 1 is {1, 2} with 2 <= 1, i.e. [1] reversed
    left = PosetMap(TL, X, {(j, l): (((j, 1)), 2 - l) for (j, l) in TL.elements},
                    name="incl")
    right = PosetMap(J0, JI, {j: (j, 1) for j in J0.elements}, name="incl")
    bottom = PosetMap(X, JI, {(x, zz): x for (x, zz) in X.elements}, name="pr")
    sq = PosetSquare("cylinder", TL, J0, X, JI,
                     top=top, left=left, right=right, bottom=bottom)
    rep = sq.validate()
    if not rep.passed:
        raise StructuralError(f"cylinder square invalid: {rep.failures[0]}")
    return sq


# -- categories from posets ----------------------------------------------------

def poset_to_cat(J, name=None):
    """J as a category: morphisms are the order pairs."""
    mors = sorted(J.le, key=lambda p: ( _index(J, p[0]), _index(J, p[1])))
    return FinCat(J.elements, mors,
                  {m: m[0] for m in mors}, {m: m[1] for m in mors},
                  {x: (x, x) for x in J.elements},
                  compose_fn=lambda g, f: (f[0], g[1]),
                  name=name or J.name)


def _index(J, x):
    return J.elements.index(x)


def posetmap_to_functor(f, C=None, D=None):
    C = C or poset_to_cat(f.source)
    D = D or poset_to_cat(f.target)
    return Functor(C, D, {x: f.mapping[x] for x in f.source.elements},
                   {m: (f.mapping[m[0]], f.mapping[m[1]]) for m in C.morphisms},
                   name=f.name)


# -- enumeration and isomorphism ------------------------------------------------

def all_monotone_maps(P, Q, guard=None):
    check_guard(f"monotone({P.name},{Q.name})",
                max(len(Q.elements), 1) ** len(P.elements), guard)
    order = linear_extension(P)
    results = []
    assigned = {}

    def rec(k):
        if k == len(order):
            results.append(PosetMap(P, Q, dict(assigned)))
            return
        x = order[k]
        for q in Q.elements:
            if all(Q.leq(assigned[y], q) for y in order[:k] if P.leq(y, x)):
                assigned[x] = q
                rec(k + 1)
                del assigned[x]

    rec(0)
    return results


def poset_isomorphic(P, Q):
    return find_poset_iso(P, Q) is not None


def find_poset_iso(P, Q):
    """An order isomorphism P -> Q found by backtracking, or None."""
    if len(P.elements) != len(Q.elements):
        return None

    def profile(R, x):
        return (len(R.down_set(x)), len(R.up_set(x)))

    if sorted(profile(P, x) for x in P.elements) != \
            sorted(profile(Q, y) for y in Q.elements):
        return None
    order = linear_extension(P)
    assigned = {}
    used = set()

    def rec(k):
        if k == len(order):
            return dict(assigned)
        x = order[k]
        for y in Q.elements:
            if y in used or profile(P, x) != profile(Q, y):
                continue
            ok = all(P.leq(z, x) == Q.leq(assigned[z], y)
                     and P.leq(x, z) == Q.leq(y, assigned[z])
                     for z in order[:k])
            if ok:
                assigned[x] = y
                used.add(y)
                res = rec(k + 1)
                if res is not None:
                    return res
                del assigned[x]
                used.remove(y)
        return None

    res = rec(0)
    return None if res is None else PosetMap(P, Q, res, name="iso")


def canonical_poset(P):
    """Relabel to 0..n-1 with the lexicographically minimal relation set."""
    n = len(P.elements)
    best = None
    for perm in itertools.permutations(range(n)):
        rel = tuple(sorted((perm[i], perm[j])
                           for i in range(n) for j in range(n)
                           if i != j and P.leq(P.elements[i], P.elements[j])))
        if best is None or rel < best:
            best = rel
    return FinPoset(tuple(range(n)), best or [], name=P.name)


def enumerate_posets(max_size):
    """All posets with at most max_size elements, one per isomorphism
    class, grown by repeatedly adding a maximal element over a down-set."""
    levels = [[FinPoset((), [], name="empty")]]
    for n in range(1, max_size + 1):
        seen = {}
        for P in levels[n - 1]:
            for mask in range(2 ** (n - 1)):
                down = [P.elements[i] for i in range(n - 1) if mask >> i & 1]
                closure = set(down)
                for x in down:
                    closure.update(P.down_set(x))
                new = n - 1
                els = P.elements + (new,)
                le = list(P.le) + [(y, new) for y in closure]
                Q = canonical_poset(FinPoset(els, le))
                seen.setdefault(Q.key(), Q)
        levels.append([seen[k] for k in sorted(seen)])
    out = []
    for k, level in enumerate(levels):
        for P in level:
            P.name = f"P{k}_{len(out)}"
            out.append(P)
    return out
