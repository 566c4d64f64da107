"""ordcat: finite categories, fibrations, Kan extensions, Segal families,
and probe-based verification of enhancement axioms."""

__version__ = "0.1.0"

from .guards import SizeGuardError, StructuralError, check_guard
from .report import CheckReport
from .poset import (FinPoset, PosetMap, PosetSquare, all_monotone_maps,
                    barycentric, barycentric_bar, chain_dim, chain_poset,
                    chains, cone_left, cone_right, cylinder_square,
                    discrete_poset, disjoint_union_poset, enumerate_posets,
                    excision_square, find_poset_iso, is_left_closed,
                    is_right_closed, poset_isomorphic, poset_to_cat,
                    posetmap_to_functor, product_poset, sharp, sharp2,
                    standard_pushout, standard_pushout_square, subposet,
                    v_poset, zeta, zigzag)
from .fincat import (CatSquare, FinCat, FinGroup, Functor, FunctorClass,
                     NatTrans, all_functors, arrow_category, classify_functor,
                     classify_map, classify_square, comma_left, comma_right,
                     comparison_to_product, compose_functors, cyclic_group,
                     dihedral_group, direct_product_group, discrete_cat,
                     find_adjunction, find_equivalence, group_to_groupoid,
                     identity_functor, iso_comma_product,
                     iso_groupoid, natural_isos, natural_transformations,
                     opposite, product_cat, pt, quaternion_group,
                     symmetric_group)
from .fib import (FiberedCat, LaxFunctorOver, PosetDiagram, SetValued,
                  characteristic_map, elements, extract_diagram,
                  grothendieck, is_cartesian, is_cartesian_functor,
                  is_cofibration, is_fibration, sections, transition_functor,
                  transpose)
from .kan import (check_base_change, check_colim_universal,
                  check_lan_adjunction, check_lim_universal, colim_set,
                  lan, lim_set, pullback_set_functor, ran,
                  set_functors_isomorphic, set_nat_transformations)
from .segal import (check_complete, check_segal, delta_cat, discrete_family,
                    iso_family, nerve, simplicial_replacement,
                    truncate_segal)
from .enhance import (FamilyOracle, Probe, check_axiom, counter_oracle,
                      default_probes, iso_class, k_opposite, k_oracle,
                      run_probe_suite, subclass_oracle)
from .yoneda import (aut_cat, aut_cat0, cartesian_hom_classes,
                     check_extended_restriction, check_yo_loc_ff,
                     extended_yoneda, lax_hom_classes,
                     localization_square_check, plain_hom_classes,
                     semidirect_product_group, yoneda_embedding)
