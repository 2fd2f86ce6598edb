use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::categories::fgab::torsion_inclusion;
use crate::categories::{Category, FgAbObject, Morphism, Object};
use crate::prosys::{Index, InverseSystem, LevelMorphism, ProError};

fn inclusion(o: &Object) -> Result<Morphism, ProError> {
    let g = o.as_group().ok_or_else(|| ProError::Unsupported("torsion parts are taken in FgAb".into()))?;
    Ok(torsion_inclusion(g).into())
}

/// The restriction of `m: A → B` to torsion parts, from `ι_A` and `ι_B`.
fn restrict(m: &Morphism, from: &Morphism, to: &Morphism) -> Result<Morphism, ProError> {
    let cat = Category::FgAb;
    let along = cat.compose(m, from)?;
    cat.solve_right_factor(to, &along)?
        .ok_or_else(|| ProError::Invalid("a homomorphism failed to map torsion into torsion".into()))
}

fn require_fgab(c: &Category) -> Result<(), ProError> {
    if *c != Category::FgAb {
        return Err(ProError::Unsupported(format!("torsion parts are taken in fgab, not {}", c)));
    }
    Ok(())
}

/// The system of torsion subgroups, with the restricted bonds.
pub fn tor_system(x: &InverseSystem) -> Result<InverseSystem, ProError> {
    require_fgab(x.category())?;
    let cat = x.category().clone();
    let incl: Vec<Morphism> = x.objects().iter().map(inclusion).collect::<Result<_, _>>()?;
    let objects: Vec<Object> = incl.iter().map(|i| cat.source(i)).collect();
    let sys = match x.index() {
        Index::Tower(t) => {
            let steps = (0..t.stored())
                .map(|n| restrict(x.step(n), &incl[t.slot(n + 1)], &incl[n]))
                .collect::<Result<_, _>>()?;
            InverseSystem::tower(cat, *t, objects, steps)?
        }
        Index::Poset(p) => {
            let mut bonds = BTreeMap::new();
            for (&(b, a), m) in x.poset_bonds() {
                bonds.insert((b, a), restrict(m, &incl[b], &incl[a])?);
            }
            InverseSystem::poset(cat, p.clone(), objects, bonds)?
        }
    };
    sys.validate().map_err(ProError::Violation)?;
    Ok(sys)
}

/// `Tor(f): Tor(X) → Tor(Y)`, levelwise restrictions.
pub fn tor_morphism(f: &LevelMorphism) -> Result<LevelMorphism, ProError> {
    require_fgab(f.category())?;
    let (tx, ty) = (tor_system(f.source())?, tor_system(f.target())?);
    let comps = f
        .components()
        .iter()
        .enumerate()
        .map(|(a, m)| restrict(m, &inclusion(f.source().object(a))?, &inclusion(f.target().object(a))?))
        .collect::<Result<_, _>>()?;
    LevelMorphism::new(tx, ty, comps, f.tail())
}

fn distinct_primes(n: &BigInt) -> usize {
    let mut n = n.abs();
    let mut count = 0;
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if n.is_multiple_of(&p) {
            count += 1;
            while n.is_multiple_of(&p) {
                n /= &p;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        count += 1;
    }
    count
}

/// Size of a maximal independent set of elements of prime or infinite order: the free rank
/// plus the number of cyclic factors of prime power order.
pub fn rank(g: &FgAbObject) -> usize {
    let f = g.invariant_factors();
    f.free_rank() + f.torsion().iter().filter(|d| !d.is_zero()).map(distinct_primes).sum::<usize>()
}
