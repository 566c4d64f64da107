"""Fibrations over posets: Grothendieck totals, transition functors,
transposes, set-valued functors and their categories of elements."""

import pytest

from ordcat import (FiberedCat, Functor, NatTrans, SetValued,
                    characteristic_map, chain_poset, compose_functors,
                    elements, extract_diagram, grothendieck,
                    identity_functor, is_cofibration, is_fibration,
                    natural_isos, poset_to_cat, sections, transpose,
                    v_poset)
from ordcat.fib import equivalent_over_base, transition_functor

from .conftest import (chain_cat, pt_group, random_diagram, random_poset,
                       random_set_functor, v_cat)


def fiber_embedding(D, F, j):
    """The relabeling x -> (j, x) of a diagram fiber into the
    Grothendieck total's fiber over j."""
    Cj = D.fibers[j]
    Fj = F.fiber(j)
    return Functor(Cj, Fj, {x: (j, x) for x in Cj.objects},
                   {m: ((j, Cj.src[m]), (j, Cj.tgt[m]), m)
                    for m in Cj.morphisms}, name=f"in_{j}")


class TestGrothendieck:
    def test_total_is_a_fibration(self, rng):
        for _ in range(5):
            J = random_poset(rng, 3)
            F = grothendieck(random_diagram(rng, J))
            assert is_fibration(F).passed
            assert F.total.validate().passed

    def test_round_trip_recovers_transitions(self, rng):
        for _ in range(5):
            J = random_poset(rng, 3)
            D = random_diagram(rng, J)
            F = grothendieck(D)
            D2 = extract_diagram(F)
            for (a, b) in J.le:
                lhs = compose_functors(fiber_embedding(D, F, a),
                                       D.trans[(a, b)])
                rhs = compose_functors(D2.trans[(a, b)],
                                       fiber_embedding(D, F, b))
                assert natural_isos(lhs, rhs), (a, b)

    def test_diagram_validates(self, rng):
        for _ in range(3):
            D = random_diagram(rng, random_poset(rng, 4))
            assert D.validate().passed


class TestTranspose:
    def test_transpose_is_a_cofibration(self, rng):
        J = chain_poset(2)
        F = grothendieck(random_diagram(rng, J))
        T = transpose(F)
        assert is_cofibration(T).passed

    def test_double_transpose_equivalent_over_base(self, rng):
        for _ in range(3):
            J = random_poset(rng, 3)
            F = grothendieck(random_diagram(rng, J))
            TT = transpose(transpose(F))
            assert equivalent_over_base(F, TT) is not None


class TestSetValued:
    def test_elements_is_a_discrete_fibration(self, rng):
        C = poset_to_cat(v_poset())
        X = random_set_functor(rng, poset_to_cat(v_poset().opposite()))
        # build on the opposite so elements() lands over V itself
        X = SetValued(poset_to_cat(v_poset().opposite()), X.sets, X.maps)
        F = elements(X)
        assert is_fibration(F).passed
        for j in F.base.objects:
            fib = F.fiber(j)
            assert len(fib.morphisms) == len(fib.objects)

    def test_fiber_sizes_match_sets(self, rng):
        Co = poset_to_cat(chain_poset(2).opposite())
        X = random_set_functor(rng, Co)
        F = elements(X)
        for j in F.base.objects:
            assert len(F.fiber(j).objects) == len(X.set(j))


class TestSectionsAndClassifiers:
    def test_sections_of_a_product_count(self):
        # constant diagram with fiber [1] over [1]: sections are
        # monotone choices, i.e. functors [1] -> [1]
        from ordcat import PosetDiagram
        J = chain_poset(1)
        C = chain_cat(1)
        D = PosetDiagram(J, {0: C, 1: C},
                         {(0, 1): identity_functor(C)})
        F = grothendieck(D)
        secs = sections(F.projection)
        assert len(secs.objects) == 3
        assert secs.validate().passed

    def test_characteristic_map_of_left_closed_embedding(self):
        C = chain_cat(2)
        sub = chain_cat(1)
        iota = Functor(sub, C, {0: 0, 1: 1},
                       {(0, 0): (0, 0), (1, 1): (1, 1), (0, 1): (0, 1)},
                       name="iota")
        chi = characteristic_map(iota)
        assert chi.ob(0) == 0 and chi.ob(1) == 0 and chi.ob(2) == 1


class TestTransitionFunctors:
    def test_transition_respects_identity(self, rng):
        J = random_poset(rng, 3)
        F = grothendieck(random_diagram(rng, J))
        for j in F.base.objects:
            T = transition_functor(F, F.base.identity[j])
            assert T == identity_functor(F.fiber(j))
