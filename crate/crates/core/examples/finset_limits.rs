//! Inverse limits of towers of finite sets, and the subtower on which a bimorphism is levelwise
//! an isomorphism.

use procat::categories::{Category, FinSetMorphism, FinSetObject, Morphism};
use procat::deciders::{check_morphism, extract_bimorphic_subtower, Property};
use procat::prosys::{inverse_limit_finset_tower, InverseSystem, LevelMorphism, Tail};

fn endo(table: &[usize]) -> Morphism {
    let s = FinSetObject::range(table.len());
    FinSetMorphism::new(s.clone(), s, table.to_vec()).unwrap().into()
}

fn main() {
    // 0 ↦ 0, 1 ↦ 0, 2 ↦ 1, 3 ↦ 3: eventually the image is {0, 3}.
    let x = InverseSystem::periodic(Category::FinSet, FinSetObject::range(4).into(), endo(&[0, 0, 1, 3])).unwrap();
    let (limit, _) = inverse_limit_finset_tower(&x).unwrap();
    println!("limit has {} threads", limit.len());

    // The bond itself, as a morphism X → X, is invertible up to bonds though no level of it
    // is a bijection.
    let f = LevelMorphism::new(x.clone(), x, vec![endo(&[0, 0, 1, 3])], Tail::Periodic).unwrap();
    for p in [Property::Mono, Property::Epi, Property::Iso] {
        println!("{}: {}", p, check_morphism(p, &f, 10).unwrap().label());
    }
    if let Some((s, sub)) = extract_bimorphic_subtower(&f, 10).unwrap() {
        let levels: Vec<usize> = (0..5).map(|n| s.at(n)).collect();
        println!(
            "subtower levels {:?}, iso there: {}",
            levels,
            check_morphism(Property::Iso, &sub, 10).unwrap().label()
        );
    }
}
