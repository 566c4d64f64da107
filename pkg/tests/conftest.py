"""Shared builders for the test suite.

Everything here is deterministic: random generators always take an
explicit seeded Random instance, and enumerations inherit the library's
canonical orders.
"""

import random

import pytest

from ordcat import (FinPoset, PosetMap, SetValued, all_monotone_maps,
                    chain_poset, cyclic_group, group_to_groupoid,
                    poset_to_cat, v_poset)
from ordcat.poset import linear_extension


def chain_cat(n):
    return poset_to_cat(chain_poset(n))


def v_cat():
    return poset_to_cat(v_poset())


def pt_group(n):
    return group_to_groupoid(cyclic_group(n))


def random_poset(rng, n, density=0.4, name="P"):
    """A random poset on n elements: a random DAG on a fixed linear
    order, transitively closed."""
    els = tuple(range(n))
    le = set()
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                le.add((i, j))
    changed = True
    while changed:
        changed = False
        for (a, b) in list(le):
            for (c, d) in list(le):
                if b == c and (a, d) not in le:
                    le.add((a, d))
                    changed = True
    return FinPoset(els, le, name=name)


def random_monotone(rng, P, Q):
    maps = all_monotone_maps(P, Q)
    return maps[rng.randrange(len(maps))]


def random_set_functor(rng, C, max_size=3, name="E"):
    """A random set-valued functor on a poset category.

    Functoriality is guaranteed by construction: the values factor
    through a rank function into a chain, where composites are
    path-independent for free; sets are then relabeled per object.
    """
    J = FinPoset(C.objects, [(C.src[m], C.tgt[m]) for m in C.morphisms
                             if C.src[m] != C.tgt[m]])
    order = linear_extension(J)
    rank = {x: k for k, x in enumerate(order)}
    tiers = [[f"t{k}_{i}" for i in range(rng.randint(1, max_size))]
             for k in range(len(order))]
    steps = [{v: rng.choice(tiers[k + 1]) for v in tiers[k]}
             for k in range(len(order) - 1)]

    def chase(v, lo, hi):
        for k in range(lo, hi):
            v = steps[k][v]
        return v

    sets = {x: [f"{x}:{t}" for t in tiers[rank[x]]] for x in C.objects}
    maps = {}
    for m in C.morphisms:
        a, b = C.src[m], C.tgt[m]
        maps[m] = {f"{a}:{t}": f"{b}:{chase(t, rank[a], rank[b])}"
                   for t in tiers[rank[a]]}
    return SetValued(C, sets, maps, name=name)


def random_diagram(rng, J, max_fiber=2):
    """A random strict contravariant diagram of small categories over J.

    Strictness is free because the diagram factors through a linear
    extension: transitions are composites of independently chosen step
    functors between consecutive tiers, so all paths agree.
    """
    from ordcat import PosetDiagram, all_functors

    order = linear_extension(J)
    rank = {x: k for k, x in enumerate(order)}
    pool = [chain_cat(1), chain_cat(0), v_cat(), pt_group(2)]
    tiers = [pool[rng.randrange(len(pool))] for _ in order]
    steps = []
    for k in range(len(order) - 1):
        cands = all_functors(tiers[k + 1], tiers[k])
        steps.append(cands[rng.randrange(len(cands))])

    def chain_trans(lo, hi):
        from ordcat import compose_functors, identity_functor
        T = identity_functor(tiers[hi])
        for k in range(hi - 1, lo - 1, -1):
            T = compose_functors(steps[k], T)
        return T

    fibers = {x: tiers[rank[x]] for x in J.elements}
    trans = {(a, b): chain_trans(rank[a], rank[b])
             for (a, b) in J.le if a != b}
    return PosetDiagram(J, fibers, trans, variance="contra")


def kan_instance(rng, max_objects=4, max_size=3):
    """A random functor of poset categories with a set functor on its
    source."""
    from ordcat import posetmap_to_functor

    P = random_poset(rng, rng.randint(1, max_objects), name="I'")
    Q = random_poset(rng, rng.randint(1, max_objects), name="I")
    gamma = posetmap_to_functor(random_monotone(rng, P, Q))
    E = random_set_functor(rng, gamma.source, max_size)
    return gamma, E


def base_change_instance(rng, max_size=3):
    """A random base-change diagram built from product projections.

    pi is the projection K x I -> I (a cofibration), gamma = g x id for
    a random functor g: K0 -> K (cocartesian over I), and the primed row
    is the strict pullback K x I' along a random monotone phi: I' -> I,
    so both squares are cartesian by construction.
    """
    from ordcat import Functor, all_functors, posetmap_to_functor, product_cat
    from ordcat.kan import BaseChangeDiagram

    pool = [chain_poset(0), chain_poset(1), chain_poset(2), v_poset()]
    Ip_pos = pool[rng.randrange(len(pool))]
    I_pos = pool[rng.randrange(len(pool))]
    phi = posetmap_to_functor(random_monotone(rng, Ip_pos, I_pos))
    Ip, I = phi.source, phi.target
    K0 = chain_cat(rng.randint(0, 1))
    K = chain_cat(rng.randint(0, 1))
    gs = all_functors(K0, K)
    g = gs[rng.randrange(len(gs))]
    I0, I1 = product_cat(K0, I), product_cat(K, I)
    I0p, I1p = product_cat(K0, Ip), product_cat(K, Ip)

    def times(src, tgt, on_k, on_i, name):
        return Functor(src, tgt,
                       {(k, i): (on_k[0](k), on_i[0](i))
                        for (k, i) in src.objects},
                       {(mk, mi): (on_k[1](mk), on_i[1](mi))
                        for (mk, mi) in src.morphisms}, name=name)

    idf = (lambda x: x, lambda m: m)
    gf = (g.ob, g.mor)
    phif = (phi.ob, phi.mor)
    gamma = times(I0, I1, gf, idf, "gamma")
    gamma_p = times(I0p, I1p, gf, idf, "gamma'")
    phi0 = times(I0p, I0, idf, phif, "phi0")
    phi1 = times(I1p, I1, idf, phif, "phi1")
    pi = Functor(I1, I, {(k, i): i for (k, i) in I1.objects},
                 {(mk, mi): mi for (mk, mi) in I1.morphisms}, name="pi")
    pi_p = Functor(I1p, Ip, {(k, i): i for (k, i) in I1p.objects},
                   {(mk, mi): mi for (mk, mi) in I1p.morphisms}, name="pi'")
    E = random_set_functor(rng, I0, max_size)
    return BaseChangeDiagram(gamma_p, pi_p, phi0, phi1, phi, gamma, pi), E


@pytest.fixture
def rng():
    return random.Random(20260823)
