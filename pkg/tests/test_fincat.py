"""Finite categories: functors, natural transformations, comma and
cylinder constructions, groups, Karoubi completion.

Functor counts are frozen from a hand enumeration written as an oracle
here (assignments of generators checked for composition), not from the
library's own backtracking.
"""

import itertools

import pytest

from ordcat import (CatSquare, FinCat, Functor, NatTrans, all_functors,
                    arrow_category, classify_functor, classify_square,
                    comma_left, comma_right, compose_functors, cyclic_group,
                    dihedral_group, direct_product_group, discrete_cat,
                    find_equivalence, group_to_groupoid, identity_functor,
                    iso_comma_product, natural_isos, natural_transformations,
                    opposite, product_cat, pt, quaternion_group,
                    symmetric_group)
from ordcat.fincat import (cylinder, dual_cylinder, find_adjunction, karoubi,
                           is_karoubi_closed)

from .conftest import chain_cat, pt_group, v_cat


def brute_functor_count(C, D):
    """Oracle: try every object/morphism assignment directly."""
    count = 0
    mor_lists = list(C.morphisms)
    for omap in itertools.product(D.objects, repeat=len(C.objects)):
        od = dict(zip(C.objects, omap))
        cands = [D.hom(od[C.src[m]], od[C.tgt[m]]) for m in mor_lists]
        for pick in itertools.product(*cands):
            md = dict(zip(mor_lists, pick))
            if any(md[C.identity[x]] != D.identity[od[x]] for x in C.objects):
                continue
            if all(md[C.compose(g, f)] == D.compose(md[g], md[f])
                   for g, f in C.composable_pairs()):
                count += 1
    return count


class TestEnumeration:
    @pytest.mark.parametrize("n,m", [(0, 1), (1, 1), (1, 2), (2, 1)])
    def test_functor_count_chains(self, n, m):
        C, D = chain_cat(n), chain_cat(m)
        assert len(all_functors(C, D)) == brute_functor_count(C, D)

    def test_functor_count_groupoid(self):
        G = pt_group(2)
        assert len(all_functors(G, G)) == brute_functor_count(G, G)
        assert len(all_functors(chain_cat(1), G)) == \
            brute_functor_count(chain_cat(1), G)

    def test_nat_transformations_between_chain_functors(self):
        C, D = chain_cat(1), chain_cat(2)
        fs = all_functors(C, D)
        for F in fs:
            for G in fs:
                # in a thin target there is at most one transformation,
                # existing iff F <= G pointwise
                nats = natural_transformations(F, G)
                want = int(all(D.hom(F.ob(x), G.ob(x)) for x in C.objects))
                assert len(nats) == want

    def test_nat_count_on_group(self):
        G = pt_group(2)
        F = identity_functor(G)
        assert len(natural_transformations(F, F)) == 2
        assert len(natural_isos(F, F)) == 2


class TestClassification:
    def test_identity_is_equivalence(self):
        for C in (chain_cat(2), v_cat(), pt_group(3)):
            assert classify_functor(identity_functor(C)).equivalence

    def test_collapse_is_not_faithful(self):
        C = pt_group(2)
        P = pt()
        F = Functor(C, P, {"*": "*"},
                    {m: P.identity["*"] for m in C.morphisms}, name="!")
        cls = classify_functor(F)
        assert cls.full and cls.essentially_surjective and not cls.faithful

    def test_equivalence_with_redundant_object(self):
        # two isomorphic objects over one: an equivalence, not an iso
        G2 = cyclic_group(2)
        C = pt_group(2)
        D = FinCat(("a", "b"),
                   [(x, y, g) for x in "ab" for y in "ab"
                    for g in G2.elements],
                   {m: m[0] for m in
                    [(x, y, g) for x in "ab" for y in "ab"
                     for g in G2.elements]},
                   {m: m[1] for m in
                    [(x, y, g) for x in "ab" for y in "ab"
                     for g in G2.elements]},
                   {x: (x, x, G2.unit) for x in "ab"},
                   compose_fn=lambda g, f: (f[0], g[1],
                                            G2.op(g[2], f[2])),
                   name="2pt")
        assert D.validate().passed
        F = Functor(C, D, {"*": "a"},
                    {g: ("a", "a", g) for g in G2.elements}, name="j")
        assert classify_functor(F).equivalence
        assert find_equivalence(D, C) is not None


class TestCommaAndCylinder:
    def test_arrow_category_of_interval_is_chain2_up_to_equivalence(self):
        C = chain_cat(1)
        res = arrow_category(C)
        assert find_equivalence(res.cat, chain_cat(2)) is not None

    def test_comma_morphisms_factor_vertical_then_horizontal(self):
        pi = Functor(pt_group(2), chain_cat(1), {"*": 0},
                     {g: (0, 0) for g in cyclic_group(2).elements},
                     name="pi")
        res = comma_left(pi)
        cat = res.cat
        C, I = pi.source, pi.target
        for m in cat.morphisms:
            x, y, (f, g) = m
            mid = (x[0], y[1], I.compose(g, x[2]))
            vert = (x, mid, (C.identity[x[0]], g))
            horiz = (mid, y, (f, I.identity[y[1]]))
            assert cat.compose(horiz, vert) == m

    def test_eta_sections_sigma(self):
        pi = Functor(chain_cat(1), v_cat(), {0: "0", 1: "o"},
                     {(0, 0): ("0", "0"), (1, 1): ("o", "o"),
                      (0, 1): ("o", "0")}, name="pi")
        # v_cat arrows point o -> 0 and o -> 1; pick a valid functor
        pi = Functor(chain_cat(1), v_cat(), {0: "o", 1: "0"},
                     {(0, 0): ("o", "o"), (1, 1): ("0", "0"),
                      (0, 1): ("o", "0")}, name="pi")
        assert pi.is_valid()
        res = comma_left(pi)
        assert compose_functors(res.sigma, res.eta) == \
            identity_functor(pi.source)
        res2 = comma_right(pi)
        assert compose_functors(res2.tau, res2.eta) == \
            identity_functor(pi.source)

    def test_adjunctions_eta_sigma_and_tau_eta(self):
        pi = Functor(chain_cat(1), chain_cat(2),
                     {0: 0, 1: 2},
                     {(0, 0): (0, 0), (1, 1): (2, 2), (0, 1): (0, 2)},
                     name="pi")
        left = comma_left(pi)
        assert find_adjunction(left.eta, left.sigma) is not None
        right = comma_right(pi)
        assert find_adjunction(right.tau, right.eta) is not None

    def test_cylinder_hom_table(self):
        gamma = Functor(chain_cat(1), chain_cat(2),
                        {0: 0, 1: 1},
                        {(0, 0): (0, 0), (1, 1): (1, 1), (0, 1): (0, 1)},
                        name="g")
        res = cylinder(gamma)
        C0, C1, cat = gamma.source, gamma.target, res.cat
        for c0 in C0.objects:
            for c1 in C1.objects:
                assert len(cat.hom((0, c0), (1, c1))) == \
                    len(C1.hom(gamma.ob(c0), c1))
                assert cat.hom((1, c1), (0, c0)) == []

    def test_cylinder_cross_factorization(self):
        gamma = Functor(chain_cat(1), chain_cat(2),
                        {0: 0, 1: 1},
                        {(0, 0): (0, 0), (1, 1): (1, 1), (0, 1): (0, 1)},
                        name="g")
        res = cylinder(gamma)
        cat, C1 = res.cat, gamma.target
        for m in cat.morphisms:
            l0, l1, payload = m
            if (l0, l1) != (0, 1):
                continue
            c0, c1, f = payload
            unit = (0, 1, (c0, gamma.ob(c0), C1.identity[gamma.ob(c0)]))
            assert cat.compose(res.t.mor(f), unit) == m

    def test_cylinder_adjunction(self):
        gamma = Functor(pt(), chain_cat(1), {"*": 0},
                        {("*", "*"): (0, 0)}, name="g")
        res = cylinder(gamma)
        assert find_adjunction(res.t_dagger, res.t) is not None
        dres = dual_cylinder(gamma)
        assert find_adjunction(dres.s, dres.s_dagger) is not None


class TestSquares:
    def test_identity_square_is_equivalence(self):
        C = v_cat()
        idc = identity_functor(C)
        w = NatTrans(idc, idc, {x: C.identity[x] for x in C.objects})
        sq = CatSquare(idc, idc, idc, idc, w)
        assert classify_square(sq).equivalence

    def test_iso_comma_of_distinct_points_is_empty(self):
        C = chain_cat(1)
        f0 = Functor(pt(), C, {"*": 0}, {("*", "*"): (0, 0)}, name="0")
        f1 = Functor(pt(), C, {"*": 1}, {("*", "*"): (1, 1)}, name="1")
        P, _, _ = iso_comma_product(f0, f1)
        assert list(P.objects) == []


class TestGroups:
    @pytest.mark.parametrize("builder,order,center", [
        (lambda: cyclic_group(4), 4, 4),
        (lambda: symmetric_group(3), 6, 1),
        (lambda: dihedral_group(4), 8, 2),
        (lambda: quaternion_group(), 8, 2),
        (lambda: direct_product_group(cyclic_group(2), cyclic_group(2)),
         4, 4),
    ])
    def test_orders_and_centers(self, builder, order, center):
        G = builder()
        assert G.validate().passed
        assert len(G) == order
        assert len(G.center()) == center

    def test_groupoid_of_group_is_valid(self):
        for G in (cyclic_group(3), symmetric_group(3)):
            C = group_to_groupoid(G)
            assert C.validate().passed
            assert all(C.is_iso(m) for m in C.morphisms)


class TestKaroubi:
    def test_completion_splits_idempotents(self):
        # a monoid with one nonidentity idempotent
        M = FinCat(("*",), ("e", "p"), {"e": "*", "p": "*"},
                   {"e": "*", "p": "*"}, {"*": "e"},
                   compose={("e", "e"): "e", ("e", "p"): "p",
                            ("p", "e"): "p", ("p", "p"): "p"},
                   name="M")
        assert M.validate().passed
        assert not is_karoubi_closed(M)
        K, emb = karoubi(M)
        assert K.validate().passed
        assert is_karoubi_closed(K)
        assert classify_functor(emb).faithful
        assert classify_functor(emb).full

    def test_completion_of_complete_category_is_equivalent(self):
        C = chain_cat(1)
        K, emb = karoubi(C)
        assert classify_functor(emb).equivalence


class TestOpposite:
    def test_opposite_involution(self):
        for C in (chain_cat(2), v_cat(), pt_group(2)):
            D = opposite(opposite(C))
            assert D.objects == C.objects
            assert D.src == C.src and D.tgt == C.tgt

    def test_opposite_swaps_hom(self):
        C = chain_cat(2)
        D = opposite(C)
        for a in C.objects:
            for b in C.objects:
                assert len(D.hom(a, b)) == len(C.hom(b, a))
