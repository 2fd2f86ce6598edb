//! Hand-worked instances with verdicts and counts computed by hand.

use std::collections::BTreeMap;

use procat::categories::{fgab, Category, FgAbMorphism, FgAbObject, FinSetMorphism, FinSetObject, Morphism, Object};
use procat::deciders::{
    check_morphism, check_system, extract_bimorphic_subtower, fill_square, rank, tor_system, FillMode, Property,
};
use procat::gallery::scenarios::{dyadic_tower, z8_nilpotent};
use procat::prosys::{
    cofinite_reindex, inverse_limit_finset_tower, pro_hom_to_object, InverseSystem, LevelMorphism, PosetIndex, Tail,
};
use procat::zlinalg::IntMatrix;

const H: usize = 10;

fn set(n: usize) -> FinSetObject {
    FinSetObject::range(n)
}

fn set_map(n: usize, m: usize, table: &[usize]) -> Morphism {
    FinSetMorphism::new(set(n), set(m), table.to_vec()).unwrap().into()
}

fn constant_set(n: usize) -> InverseSystem {
    InverseSystem::constant(Category::FinSet, set(n).into()).unwrap()
}

fn scalar(g: &FgAbObject, k: i64) -> Morphism {
    FgAbMorphism::scalar(g, k).unwrap().into()
}

#[test]
fn inclusion_of_constant_sets_is_strong_mono_but_not_epi() {
    let f = LevelMorphism::new(constant_set(2), constant_set(3), vec![set_map(2, 3, &[0, 2])], Tail::Periodic).unwrap();
    assert!(check_morphism(Property::Mono, &f, H).unwrap().holds());
    assert!(check_morphism(Property::StrongMono, &f, H).unwrap().holds());
    assert!(check_morphism(Property::Epi, &f, H).unwrap().fails());
    assert!(check_morphism(Property::Iso, &f, H).unwrap().fails());
}

#[test]
fn identity_is_iso_and_its_certificate_replays() {
    let x = dyadic_tower();
    let id = LevelMorphism::identity(&x).unwrap();
    for p in [Property::Iso, Property::Bimorphism, Property::StrongMono, Property::StrongEpi] {
        let v = check_morphism(p, &id, H).unwrap();
        assert!(v.certificate().is_some_and(|c| c.verify().is_ok()), "{}: {:?}", p, v);
    }
}

#[test]
fn collapsing_finset_tower_is_stable_at_a_point() {
    // {0,1,2} with every bond constant at 0: pro-isomorphic to one point.
    let x = InverseSystem::periodic(Category::FinSet, set(3).into(), set_map(3, 3, &[0, 0, 0])).unwrap();
    for p in [Property::Stable, Property::Movable, Property::UniformlyMovable] {
        assert!(check_system(p, &x, H).unwrap().holds(), "{}", p);
    }
    let (limit, _) = inverse_limit_finset_tower(&x).unwrap();
    assert_eq!(limit.len(), 1);
}

#[test]
fn permutation_tower_has_a_full_limit() {
    // A 3-cycle as every bond: threads are determined by their first coordinate.
    let x = InverseSystem::periodic(Category::FinSet, set(3).into(), set_map(3, 3, &[1, 2, 0])).unwrap();
    let (limit, _) = inverse_limit_finset_tower(&x).unwrap();
    assert_eq!(limit.len(), 3);
    assert!(check_system(Property::Stable, &x, H).unwrap().holds());
}

#[test]
fn dyadic_tower_fails_every_movability_flavor() {
    let x = dyadic_tower();
    for p in [Property::Movable, Property::UniformlyMovable, Property::SequentiallyMovable, Property::Stable] {
        assert!(check_system(p, &x, H).unwrap().fails(), "{}", p);
    }
}

#[test]
fn nilpotent_tower_is_movable_and_trivial() {
    let x = z8_nilpotent();
    assert!(check_system(Property::Movable, &x, H).unwrap().holds());
    assert!(check_system(Property::Stable, &x, H).unwrap().holds());
}

#[test]
fn homs_into_a_small_group_form_a_direct_limit() {
    // Hom(ℤ, ℤ/2) = ℤ/2, and doubling kills it, so the dyadic tower has one class.
    let z2: Object = FgAbObject::cyclic(2).into();
    assert_eq!(pro_hom_to_object(&dyadic_tower(), &z2, H).unwrap().count(), 1);
    // The constant tower ℤ/4 keeps Hom(ℤ/4, ℤ/2) = ℤ/2.
    let c4 = InverseSystem::constant(Category::FgAb, FgAbObject::cyclic(4).into()).unwrap();
    assert_eq!(pro_hom_to_object(&c4, &z2, H).unwrap().count(), 2);
    // Into a 3-element set, a 2-point constant tower has 3^2 classes.
    assert_eq!(pro_hom_to_object(&constant_set(2), &set(3).into(), H).unwrap().count(), 9);
}

#[test]
fn rank_counts_prime_power_summands_and_free_part() {
    // ℤ² ⊕ ℤ/6 ⊕ ℤ/4 ≅ ℤ² ⊕ ℤ/2 ⊕ ℤ/3 ⊕ ℤ/4.
    assert_eq!(rank(&FgAbObject::from_orders(&[0, 0, 6, 4])), 5);
    assert_eq!(rank(&FgAbObject::zero()), 0);
    assert_eq!(rank(&FgAbObject::cyclic(30)), 3);
}

#[test]
fn torsion_of_a_constant_tower() {
    let g = FgAbObject::free(1).direct_sum(&FgAbObject::cyclic(4));
    let x = InverseSystem::constant(Category::FgAb, g.into()).unwrap();
    let t = tor_system(&x).unwrap();
    let order = t.object(0).as_group().unwrap().order().unwrap();
    assert_eq!(order, 4.into());
}

#[test]
fn identity_square_has_a_filler_for_an_iso() {
    let g = FgAbObject::cyclic(6);
    let x = InverseSystem::constant(Category::FgAb, g.clone().into()).unwrap();
    // Multiplication by 5 is an automorphism of ℤ/6.
    let f = LevelMorphism::new(x.clone(), x.clone(), vec![scalar(&g, 5)], Tail::Periodic).unwrap();
    let id = LevelMorphism::identity(&x).unwrap();
    for mode in [FillMode::StrongMonoEpi, FillMode::MonoStrongEpi] {
        let u = fill_square(&f, &f, &id, &id, mode, H).unwrap();
        assert!(u.is_some(), "{:?}", mode);
    }
}

#[test]
fn bimorphic_subtower_of_an_automorphism_is_everything() {
    let g = FgAbObject::free(2);
    let x = InverseSystem::constant(Category::FgAb, g.clone().into()).unwrap();
    let swap = fgab::FgAbMorphism::new(g.clone(), g, IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]])).unwrap();
    let f = LevelMorphism::new(x.clone(), x, vec![swap.into()], Tail::Periodic).unwrap();
    let (s, sub) = extract_bimorphic_subtower(&f, H).unwrap().unwrap();
    assert_eq!((0..4).map(|n| s.at(n)).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    assert!(check_morphism(Property::Iso, &sub, H).unwrap().holds());
}

#[test]
fn cofinite_reindex_counts_subsets_with_a_maximum() {
    // a, b below top: {a}, {b}, {top}, {a,top}, {b,top}, {a,b,top}.
    let p = PosetIndex::from_relations(["a", "b", "top"], &[(0, 2), (1, 2)]).unwrap();
    let g: Object = FgAbObject::cyclic(2).into();
    let id = scalar(&FgAbObject::cyclic(2), 1);
    let bonds: BTreeMap<(usize, usize), Morphism> = [((2, 0), id.clone()), ((2, 1), id)].into_iter().collect();
    let x = InverseSystem::poset(Category::FgAb, p, vec![g; 3], bonds).unwrap();
    let r = cofinite_reindex(&x).unwrap();
    assert_eq!(r.subsets.len(), 6);
    assert!(r.subsets.iter().all(|s| !s.is_empty()));
}
