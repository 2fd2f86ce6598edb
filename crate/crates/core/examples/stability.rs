//! Movability and stability of towers of groups and sets.

use procat::categories::{Category, FinSetMorphism, FinSetObject};
use procat::deciders::{check_system, Property};
use procat::gallery::scenarios::{constant_tower, dyadic_tower, verdict_detail, z8_nilpotent};
use procat::prosys::InverseSystem;

fn main() {
    // {0..3} with the bond 0,1,2,3 ↦ 0,0,1,2: images shrink to a point.
    let shrink = FinSetMorphism::new(FinSetObject::range(4), FinSetObject::range(4), vec![0, 0, 1, 2]).unwrap();
    let sets = InverseSystem::periodic(Category::FinSet, FinSetObject::range(4).into(), shrink.into()).unwrap();
    let towers = [
        ("constant ℤ ⊕ ℤ/4", constant_tower()),
        ("dyadic ℤ ← ℤ ← ⋯", dyadic_tower()),
        ("ℤ/8 with ×2 bonds", z8_nilpotent()),
        ("shrinking sets", sets),
    ];
    for (name, x) in &towers {
        println!("{}", name);
        for p in [Property::Movable, Property::UniformlyMovable, Property::SequentiallyMovable, Property::Stable] {
            let v = check_system(p, x, 12).unwrap();
            println!("  {:<22} {:<8} {}", p.name(), v.label(), verdict_detail(&v));
        }
    }
}
