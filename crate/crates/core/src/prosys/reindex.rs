use std::collections::BTreeMap;

use super::{InverseSystem, PosetIndex, ProError, ProMorphism, Representative, Violation, ViolationKind};

/// A system reindexed by the subsets of the original index that have a maximum, ordered by
/// inclusion, together with the comparison morphism back to the original system.
#[derive(Clone, Debug)]
pub struct Reindexed {
    pub system: InverseSystem,
    /// Members of each new index element, as original indices in increasing order.
    pub subsets: Vec<Vec<usize>>,
    /// `Z' → X`, represented at `α` by the identity out of `{α}`.
    pub comparison: ProMorphism,
}

/// Reindex a finite-poset system so that every index has finitely many predecessors:
/// `Z'_σ = X_{max σ}` with bonds `p^{max τ}_{max σ}` for `σ ⊆ τ`.
pub fn cofinite_reindex(x: &InverseSystem) -> Result<Reindexed, ProError> {
    let p = x
        .poset_index()
        .ok_or_else(|| ProError::Unsupported("cofinite reindexing applies to finite-poset systems".into()))?;
    let n = p.len();
    if n > 16 {
        return Err(ProError::Unsupported(format!("{} elements is too many to enumerate subsets", n)));
    }
    let mut subsets: Vec<(Vec<usize>, usize)> = Vec::new();
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        if let Some(&m) = members.iter().find(|&&m| members.iter().all(|&a| p.leq(a, m))) {
            subsets.push((members, m));
        }
    }
    let k = subsets.len();
    let contains = |small: &[usize], big: &[usize]| small.iter().all(|a| big.contains(a));
    let mut leq = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            leq[i][j] = contains(&subsets[i].0, &subsets[j].0);
        }
    }
    let labels: Vec<String> = subsets
        .iter()
        .map(|(s, _)| format!("{{{}}}", s.iter().map(|&a| p.label(a)).collect::<Vec<_>>().join(",")))
        .collect();
    let index = PosetIndex::new(labels, leq)?;
    for i in 0..k {
        let below = (0..k).filter(|&j| index.leq(j, i)).count();
        if below >= 1 << subsets[i].0.len() {
            return Err(Violation {
                kind: ViolationKind::Shape,
                message: format!("{} has more predecessors than subsets", index.label(i)),
                triple: None,
            }
            .into());
        }
    }
    let objects = subsets.iter().map(|&(_, m)| x.object(m).clone()).collect();
    let mut bonds = BTreeMap::new();
    for i in 0..k {
        for j in 0..k {
            if i != j && index.leq(i, j) {
                bonds.insert((j, i), x.bond(subsets[j].1, subsets[i].1)?);
            }
        }
    }
    let system = InverseSystem::poset(x.category().clone(), index, objects, bonds)?;
    let reps = (0..n)
        .map(|a| {
            let from = subsets.iter().position(|(s, _)| s.as_slice() == [a]).unwrap();
            Ok(Representative { from, map: x.category().identity(x.object(a))? })
        })
        .collect::<Result<_, ProError>>()?;
    let comparison = ProMorphism::new(system.clone(), x.clone(), reps, None)?;
    Ok(Reindexed { system, subsets: subsets.into_iter().map(|(s, _)| s).collect(), comparison })
}
