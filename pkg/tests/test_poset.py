"""Poset toolkit: dimensions, subdivisions, sharps, zigzags, pushouts.

Derived counts are checked against independent brute-force oracles
written directly in this file (chains as totally ordered subsets,
dimension as longest-chain length), never against the library's own
enumeration order.
"""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ordcat import (FinPoset, PosetMap, all_monotone_maps, barycentric,
                    chain_dim, chain_poset, chains, cone_left, cone_right,
                    cylinder_square, discrete_poset, disjoint_union_poset,
                    enumerate_posets, excision_square, find_poset_iso,
                    is_left_closed, poset_isomorphic, poset_to_cat,
                    product_poset, sharp, sharp2, standard_pushout,
                    standard_pushout_square, subposet, v_poset, zeta, zigzag)
from ordcat.poset import identity_map, is_right_closed, sharp as _sharp

from .conftest import random_poset


def brute_chains(J):
    """Oracle: nonempty totally ordered subsets, found by subset scan."""
    out = []
    for r in range(1, len(J.elements) + 1):
        for sub in itertools.combinations(J.elements, r):
            if all(J.leq(a, b) or J.leq(b, a)
                   for a, b in itertools.combinations(sub, 2)):
                out.append(frozenset(sub))
    return out


def brute_dim(J):
    return max((len(c) for c in brute_chains(J)), default=0) - 1


class TestChainsAndDimension:
    @pytest.mark.parametrize("n", range(4))
    def test_chain_poset_dim(self, n):
        assert chain_dim(chain_poset(n)) == n

    def test_chain_enumeration_matches_subset_oracle(self):
        for J in enumerate_posets(4):
            got = {frozenset(c) for c in chains(J)}
            assert got == set(brute_chains(J))

    def test_dim_matches_longest_chain_oracle(self):
        for J in enumerate_posets(4):
            assert chain_dim(J) == brute_dim(J)


class TestBarycentric:
    def test_elements_are_the_nonempty_chains(self):
        for J in enumerate_posets(4):
            B, _ = barycentric(J)
            assert sorted(map(repr, B.elements)) == \
                sorted(map(repr, brute_chains(J)))

    def test_dimension_preserved(self):
        for J in enumerate_posets(4):
            B, _ = barycentric(J)
            assert chain_dim(B) == chain_dim(J)

    def test_order_is_inclusion(self):
        J = v_poset()
        B, _ = barycentric(J)
        for a in B.elements:
            for b in B.elements:
                assert B.leq(a, b) == (set(a) <= set(b))


class TestSharp:
    @pytest.mark.parametrize("n", range(5))
    def test_sharp_size(self, n):
        P, tip = sharp(range(n))
        assert len(P.elements) == 2 * n + 1
        assert P.validate().passed
        # the tip dominates exactly the bottom copy of S
        below = [x for x in P.elements if x != tip and P.leq(x, tip)]
        assert len(below) == n

    @pytest.mark.parametrize("n", range(1, 4))
    def test_sharp2_is_a_poset(self, n):
        P = sharp2(range(n))
        assert P.validate().passed


class TestZigzag:
    def test_zeta3_table(self):
        z = zeta(3)
        assert tuple(z.mapping[k] for k in range(4)) == (0, 1, 1, 2)
        assert z.is_monotone()

    @pytest.mark.parametrize("m", range(1, 6))
    def test_zeta_monotone_surjective(self, m):
        z = zeta(m)
        assert z.is_monotone()
        assert set(z.mapping.values()) == set(z.target.elements)

    def test_zigzag_dim(self):
        for m in range(1, 6):
            assert chain_dim(zigzag(m)) == 1


class TestStandardPushout:
    def test_interval_glued_at_a_point_is_v(self):
        P0 = chain_poset(1, name="[1]a")
        P1 = chain_poset(1, name="[1]b")
        pt = discrete_poset([0], name="[0]")
        i0 = PosetMap(pt, P0, {0: 0}, name="i0")
        i1 = PosetMap(pt, P1, {0: 0}, name="i1")
        J, chi, e0, e1 = standard_pushout(i0, i1)
        assert poset_isomorphic(J, v_poset())
        # characteristic map hits the tip exactly on the shared image
        assert sorted(chi.mapping.values()) == ["0", "1", "o"]
        assert chi.is_monotone()

    def test_pushout_square_validates(self):
        P0 = chain_poset(2)
        pt = discrete_poset([0])
        i0 = PosetMap(pt, P0, {0: 0}, name="i0")
        i1 = PosetMap(pt, chain_poset(1), {0: 0}, name="i1")
        sq, chi = standard_pushout_square(i0, i1)
        assert sq.validate().passed

    def test_rejects_non_left_closed(self):
        pt = discrete_poset([0])
        P = chain_poset(1)
        upper = PosetMap(pt, P, {0: 1}, name="upper")
        assert not is_left_closed(upper)
        from ordcat import StructuralError
        with pytest.raises(StructuralError):
            standard_pushout(upper, upper)


class TestClosedEmbeddings:
    def test_down_set_inclusions_are_left_closed(self):
        J = v_poset()
        for x in J.elements:
            keep = J.down_set(x)
            S = subposet(J, keep)
            inc = PosetMap(S, J, {y: y for y in keep}, name="inc")
            assert is_left_closed(inc)

    def test_up_set_inclusions_are_right_closed(self):
        J = v_poset()
        for x in J.elements:
            keep = J.up_set(x)
            S = subposet(J, keep)
            inc = PosetMap(S, J, {y: y for y in keep}, name="inc")
            assert is_right_closed(inc)


class TestEnumerationAndIso:
    def test_counts_up_to_iso(self):
        # 1, 1, 2, 5, 16 posets on 0..4 elements (OEIS A000112 prefix)
        sizes = {}
        for J in enumerate_posets(4):
            sizes[len(J.elements)] = sizes.get(len(J.elements), 0) + 1
        assert sizes == {0: 1, 1: 1, 2: 2, 3: 5, 4: 16}

    def test_no_two_enumerated_posets_isomorphic(self):
        posets = [J for J in enumerate_posets(3)]
        for a, b in itertools.combinations(posets, 2):
            if len(a.elements) == len(b.elements):
                assert not poset_isomorphic(a, b)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10 ** 6), st.integers(2, 5))
    def test_iso_found_after_relabel(self, seed, n):
        import random
        J = random_poset(random.Random(seed), n)
        perm = list(J.elements)
        random.Random(seed + 1).shuffle(perm)
        ren = dict(zip(J.elements, perm))
        K = FinPoset(perm, [(ren[a], ren[b]) for a, b in J.le], name="K")
        f = find_poset_iso(J, K)
        assert f is not None and f.is_full_embedding()


class TestSquares:
    def test_excision_squares_validate(self):
        J = chain_poset(2)
        cone, tip = cone_left(discrete_poset(["s"]))
        for f in all_monotone_maps(J, cone):
            if set(f.mapping.values()) == set(cone.elements):
                for variant in ("i", "ii"):
                    sq = excision_square(f, variant)
                    assert sq.validate().passed

    def test_cylinder_squares_validate(self):
        J = v_poset()
        for chi in all_monotone_maps(J, chain_poset(1)):
            sq = cylinder_square(chi)
            assert sq.validate().passed


class TestAlgebra:
    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10 ** 6), st.integers(1, 4), st.integers(1, 4))
    def test_product_and_sum_sizes(self, seed, n, m):
        import random
        r = random.Random(seed)
        P, Q = random_poset(r, n, name="P"), random_poset(r, m, name="Q")
        assert len(product_poset(P, Q)) == n * m
        assert len(disjoint_union_poset(P, Q)) == n + m

    def test_poset_to_cat_is_valid_and_thin(self):
        for J in enumerate_posets(3):
            C = poset_to_cat(J)
            assert C.validate().passed
            for a in C.objects:
                for b in C.objects:
                    assert len(C.hom(a, b)) <= 1
