//! Mono and epi versus their strong versions on the two classic pro-group examples.

use procat::deciders::{check_morphism, Property};
use procat::gallery::scenarios::{dyadic_to_z, verdict_detail, z_to_z2};

fn main() {
    let horizon = 6;
    for (name, f) in [("ℤ → ℤ/2", z_to_z2()), ("dyadic tower → ℤ", dyadic_to_z())] {
        println!("{}", name);
        for p in [Property::Mono, Property::Epi, Property::StrongMono, Property::StrongEpi, Property::Iso] {
            let v = check_morphism(p, &f, horizon).unwrap();
            println!("  {:<12} {:<8} {}", p.name(), v.label(), verdict_detail(&v));
        }
    }
}
