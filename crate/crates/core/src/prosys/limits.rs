use std::collections::BTreeSet;

use super::{InverseSystem, ProError, ProMorphism};
use crate::categories::{Category, FinSetMorphism, FinSetObject, Morphism, Object};

fn set_bond(x: &InverseSystem, beta: usize, alpha: usize) -> Result<FinSetMorphism, ProError> {
    match x.bond(beta, alpha)? {
        Morphism::Set(m) => Ok(m),
        _ => Err(ProError::Unsupported("inverse limits are computed for FinSet towers only".into())),
    }
}

/// The inverse limit of a FinSet tower with its projection.
///
/// With `Q` the bond across one tail period at the start `L` of the tail, a thread is
/// determined by its value at `L`, which must lie in the eventual image `E` of `Q`; `Q`
/// permutes `E`, so threads correspond to elements of `E`. The projection is stored over
/// the tower repeated with period `P · ord(Q|E)`.
pub fn inverse_limit_finset_tower(x: &InverseSystem) -> Result<(FinSetObject, ProMorphism), ProError> {
    let t = x.tower_index().ok_or_else(|| ProError::Unsupported("inverse limit of a poset system".into()))?;
    if *x.category() != Category::FinSet {
        return Err(ProError::Unsupported("inverse limits are computed for FinSet towers only".into()));
    }
    let (l, p) = (t.prefix_len, t.tail_period);
    let q = set_bond(x, l + p, l)?;
    let mut image: BTreeSet<usize> = (0..q.source().len()).collect();
    loop {
        let next: BTreeSet<usize> = image.iter().map(|&i| q.apply(i)).collect();
        if next.len() == image.len() {
            break;
        }
        image = next;
    }
    let eventual: Vec<usize> = image.into_iter().collect();
    // Order of Q as a permutation of E.
    let mut order = 1;
    'outer: loop {
        let mut all_fixed = true;
        for &e in &eventual {
            let mut v = e;
            for _ in 0..order {
                v = q.apply(v);
            }
            if v != e {
                all_fixed = false;
                break;
            }
        }
        if all_fixed {
            break 'outer;
        }
        order += 1;
    }
    let preimage_in_e = |v: usize| eventual.iter().copied().find(|&e| q.apply(e) == v).unwrap();
    let xl = match x.object(l) {
        Object::Set(s) => s.clone(),
        _ => unreachable!(),
    };
    let limit = FinSetObject::new(eventual.iter().map(|&e| xl.label(e).to_string())).map_err(ProError::Category)?;
    let target = x.reperiod(l, p * order)?;
    let mut maps = Vec::new();
    for n in 0..target.index().stored() {
        let k = if n <= l { 0 } else { (n - l).div_ceil(p) };
        let bond = set_bond(x, l + k * p, n)?;
        let table = eventual
            .iter()
            .map(|&e| {
                let mut v = e;
                for _ in 0..k {
                    v = preimage_in_e(v);
                }
                bond.apply(v)
            })
            .collect();
        let tgt = match x.object(n) {
            Object::Set(s) => s.clone(),
            _ => unreachable!(),
        };
        maps.push(Morphism::Set(FinSetMorphism::new(limit.clone(), tgt, table)?));
    }
    let proj = ProMorphism::from_object(Category::FinSet, Object::Set(limit.clone()), target, maps)?;
    Ok((limit, proj))
}

/// Classes of morphisms `X → P`, each represented by a morphism out of `X_level`.
#[derive(Clone, Debug)]
pub struct HomClasses {
    pub level: usize,
    pub representatives: Vec<Morphism>,
    /// False when a hom-set had to be truncated or the classes did not settle within the
    /// horizon.
    pub complete: bool,
}

impl HomClasses {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }
}

fn dedup(cat: &Category, ms: Vec<Morphism>) -> Vec<Morphism> {
    let mut out: Vec<Morphism> = Vec::new();
    for m in ms {
        if !out.iter().any(|o| cat.equal(o, &m)) {
            out.push(m);
        }
    }
    out
}

/// Morphisms from a pro-object to an object: the direct limit of `Hom(X_α, P)`.
///
/// For a tower, two morphisms out of `X_L` are identified once they agree after a bond,
/// and precomposing with the period bond `Q` maps `Hom(X_L, P)` into itself. The classes
/// are the eventual image of that map, reached after at most `|Hom(X_L, P)|` periods.
pub fn pro_hom_to_object(x: &InverseSystem, target: &Object, horizon: usize) -> Result<HomClasses, ProError> {
    let cat = x.category().clone();
    cat.check_object(target)?;
    let Some(t) = x.tower_index() else {
        let p = x.poset_index().unwrap();
        let m = p.maximum().expect("finite directed posets have a maximum");
        let homs = cat.enumerate_homs(x.object(m), target, 2)?;
        return Ok(HomClasses { level: m, representatives: homs.morphisms, complete: homs.complete });
    };
    let l = t.prefix_len;
    let q = x.period_bond(l)?;
    let homs = cat.enumerate_homs(x.object(l), target, 2)?;
    let mut complete = homs.complete;
    let mut current = dedup(&cat, homs.morphisms);
    let mut periods = 0;
    loop {
        let next = dedup(&cat, current.iter().map(|h| cat.compose(h, &q)).collect::<Result<_, _>>()?);
        if next.len() == current.len() {
            break;
        }
        current = next;
        periods += 1;
        if periods * t.tail_period > horizon {
            complete = false;
            break;
        }
    }
    Ok(HomClasses { level: l + periods * t.tail_period, representatives: current, complete })
}
