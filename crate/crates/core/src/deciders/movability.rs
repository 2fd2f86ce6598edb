use std::collections::BTreeSet;

use super::certificate::{Certificate, Coverage, Entry, Lift, Subject};
use super::chains::HomGroup;
use super::{CounterWitness, FailReason, Property, Unresolved, Verdict};
use crate::categories::{Category, FgAbMorphism, FinSetMorphism, Morphism, Object};
use crate::prosys::{subtower, InverseSystem, ProError, SubtowerSelector};
use crate::zlinalg::{kernel_generators, lattice_contains, lattice_equal, IntMatrix};

/// Most cycles tried when looking for a periodic lift in FgAb.
const MAX_CYCLES: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MovabilityFlavor {
    /// For each `α` some `β` such that `p^β_α` lifts to every `X_γ`.
    Classical,
    /// The lifts come from one compatible family `X_β → X`.
    Uniform,
    /// The family condition on subtowers; the default selectors plus any given here.
    Sequential(Vec<SubtowerSelector>),
}

/// Identity, evens, odds and the shifts by one and two.
pub fn default_selectors() -> Vec<SubtowerSelector> {
    vec![
        SubtowerSelector::identity(),
        SubtowerSelector::evens(),
        SubtowerSelector::odds(),
        SubtowerSelector::shifted(1),
        SubtowerSelector::shifted(2),
    ]
}

fn unknown(horizon: usize, note: impl Into<String>) -> Verdict {
    Verdict::Unknown(Unresolved { horizon, note: note.into() })
}

pub fn check_movability(x: &InverseSystem, flavor: MovabilityFlavor, horizon: usize) -> Result<Verdict, ProError> {
    x.validate().map_err(ProError::Violation)?;
    let property = match flavor {
        MovabilityFlavor::Classical => Property::Movable,
        MovabilityFlavor::Uniform => Property::UniformlyMovable,
        MovabilityFlavor::Sequential(_) => Property::SequentiallyMovable,
    };
    if let Some(p) = x.poset_index() {
        let element = p.maximum().ok_or_else(|| ProError::Invalid("finite directed poset without a maximum".into()))?;
        let cert = Certificate::new(
            property,
            Subject::System(x.clone()),
            horizon,
            Coverage::Maximum,
            vec![Entry::Maximum { element }],
        );
        return Ok(Verdict::Holds(cert));
    }
    if x.category().is_dual() {
        return Ok(unknown(horizon, "movability is only decided for towers in FinSet and FgAb"));
    }
    let descent = strict_descent(x, horizon)?;
    let fails = |reason: FailReason| {
        let slot = match reason {
            FailReason::StrictDescent { slot, .. } => slot,
            _ => unreachable!(),
        };
        Verdict::Fails(CounterWitness {
            property,
            alpha: Some(slot),
            reason,
            evidence: format!(
                "images of p^γ_{} shrink forever as γ grows, so no β has p^β_{} lifting to every level",
                slot, slot
            ),
        })
    };
    match flavor {
        MovabilityFlavor::Sequential(extra) => {
            let mut selectors = default_selectors();
            for s in extra {
                if !selectors.contains(&s) {
                    selectors.push(s);
                }
            }
            if let Some(r) = descent {
                return Ok(fails(r));
            }
            let mut entries = Vec::new();
            for s in selectors {
                let z = subtower(x, &s)?;
                let s0 = s.at(0);
                let mut found = None;
                for beta in s0 + 1..=horizon.max(s0 + 1) {
                    if let Some((gamma, cycles, rho)) = find_family(&z, x.object(beta), 0, &x.bond(beta, s0)?)? {
                        found = Some(Entry::Sequential { selector: s.clone(), beta, gamma, cycles, rho });
                        break;
                    }
                }
                match found {
                    Some(e) => entries.push(e),
                    None => {
                        return Ok(unknown(horizon, format!("no periodic family found for the subtower along {:?}", s)))
                    }
                }
            }
            Ok(Verdict::Holds(Certificate::new(
                property,
                Subject::System(x.clone()),
                horizon,
                Coverage::Sampled,
                entries,
            )))
        }
        MovabilityFlavor::Uniform | MovabilityFlavor::Classical => {
            if let Some(r) = descent {
                return Ok(fails(r));
            }
            let t = x.tower_index().unwrap();
            // Finite sets always reach their stable images; search far enough to see them.
            let reach = if *x.category() == Category::FinSet {
                let biggest = x.objects().iter().map(|o| x.category().object_size(o)).max().unwrap_or(0);
                horizon.max(t.stored() + t.tail_period * (biggest + 1))
            } else {
                horizon
            };
            let mut entries = Vec::new();
            let mut lifted = false;
            for alpha in 0..t.stored() {
                let mut entry = None;
                for beta in alpha + 1..=reach {
                    if let Some((gamma, cycles, rho)) = find_family(x, x.object(beta), alpha, &x.bond(beta, alpha)?)? {
                        entry = Some(Entry::Family { alpha, beta, gamma, cycles, rho });
                        break;
                    }
                }
                if entry.is_none() && flavor == MovabilityFlavor::Classical && *x.category() == Category::FgAb {
                    entry = lifts_entry(x, alpha, horizon)?;
                    lifted |= entry.is_some();
                }
                match entry {
                    Some(e) => entries.push(e),
                    None => {
                        if let Some(inverses) = super::stability::tail_inverses(x)? {
                            let cert = Certificate::new(
                                property,
                                Subject::System(x.clone()),
                                horizon,
                                Coverage::TailInverses,
                                inverses,
                            );
                            return Ok(Verdict::Holds(cert));
                        }
                        return Ok(unknown(
                            horizon,
                            format!("no lifting data found for α={} and no proof that none exists", alpha),
                        ));
                    }
                }
            }
            let coverage = if lifted { Coverage::StableChain } else { Coverage::PeriodicShift };
            Ok(Verdict::Holds(Certificate::new(property, Subject::System(x.clone()), horizon, coverage, entries)))
        }
    }
}

/// `ρ: src → Z_γ` fixed by a power of the period bond, with `p^γ_α ρ = target`, for
/// `γ = max(L, α)`. Returns `(γ, cycles, ρ)`.
pub(crate) fn find_family(
    z: &InverseSystem,
    src: &Object,
    alpha: usize,
    target: &Morphism,
) -> Result<Option<(usize, usize, Morphism)>, ProError> {
    let t = z.tower_index().ok_or_else(|| ProError::Unsupported("families live on towers".into()))?;
    let gamma = t.prefix_len.max(alpha);
    match z.category() {
        Category::FinSet => {
            let q = z.period_bond(gamma)?;
            let q = q.as_set().unwrap();
            let mut image: BTreeSet<usize> = (0..q.source().len()).collect();
            loop {
                let next: BTreeSet<usize> = image.iter().map(|&i| q.apply(i)).collect();
                if next.len() == image.len() {
                    break;
                }
                image = next;
            }
            let mut cycles = 1;
            while !image.iter().all(|&e| (0..cycles).fold(e, |v, _| q.apply(v)) == e) {
                cycles += 1;
            }
            let p = z.bond(gamma, alpha)?;
            let p = p.as_set().unwrap();
            let tgt = target.as_set().unwrap();
            let mut table = Vec::new();
            for i in 0..tgt.source().len() {
                match image.iter().find(|&&e| p.apply(e) == tgt.apply(i)) {
                    Some(&e) => table.push(e),
                    None => return Ok(None),
                }
            }
            let zg = z.object(gamma).as_set().unwrap().clone();
            let rho = FinSetMorphism::new(src.as_set().unwrap().clone(), zg, table)?;
            Ok(Some((gamma, cycles, rho.into())))
        }
        Category::FgAb => {
            let zg = z.object(gamma).as_group().unwrap().clone();
            let za = z.object(alpha).as_group().unwrap().clone();
            let s = src.as_group().unwrap().clone();
            let sum = zg.direct_sum(&za);
            let p = z.bond(gamma, alpha)?;
            let p = p.as_group().unwrap().matrix().clone();
            let rhs = IntMatrix::zeros(zg.generators(), s.generators()).vstack(target.as_group().unwrap().matrix())?;
            let rhs: Morphism = FgAbMorphism::new(s, sum.clone(), rhs)?.into();
            for m in 1..=MAX_CYCLES {
                let qm = z.bond(gamma + m * t.tail_period, gamma)?;
                let qm = qm.as_group().unwrap().matrix().sub(&IntMatrix::identity(zg.generators()))?;
                let stacked: Morphism = FgAbMorphism::new(zg.clone(), sum.clone(), qm.vstack(&p)?)?.into();
                if let Some(rho) = Category::FgAb.solve_right_factor(&stacked, &rhs)? {
                    return Ok(Some((gamma, m, rho)));
                }
            }
            Ok(None)
        }
        Category::Dual(_) => Ok(None),
    }
}

/// FgAb: `p^β_α` lifts to every level iff it lies in `p^{γ₀}_α ∘ G` where `G` is the
/// eventual value of the decreasing chain `Q^k ∘ Hom(X_β, X_{γ₀})`. When the chain settles
/// within the horizon, record explicit lifts up to the horizon.
fn lifts_entry(x: &InverseSystem, alpha: usize, horizon: usize) -> Result<Option<Entry>, ProError> {
    let t = x.tower_index().unwrap();
    let grp = |a: usize| x.object(a).as_group().unwrap().clone();
    for beta in alpha + 1..=horizon {
        let g0 = t.prefix_len.max(beta);
        let hom = HomGroup::new(&grp(beta), &grp(g0))?;
        let down = HomGroup::new(&grp(beta), &grp(alpha))?;
        let q = x.period_bond(g0)?;
        let psi = IntMatrix::identity(grp(beta).generators()).kron(q.as_group().unwrap().matrix());
        let mut chain = hom.w.clone();
        let mut settled = false;
        for _ in 0..=horizon / t.tail_period + 1 {
            let next = psi.mul(&chain)?;
            if hom.same(&next, &chain)? {
                settled = true;
                break;
            }
            chain = next;
        }
        if !settled {
            continue;
        }
        let p = x.bond(g0, alpha)?;
        let pushed = IntMatrix::identity(grp(beta).generators()).kron(p.as_group().unwrap().matrix()).mul(&chain)?;
        let want = x.bond(beta, alpha)?;
        if !down.contains(&want.as_group().unwrap().matrix().vectorize(), &pushed)? {
            continue;
        }
        let mut lifts = Vec::new();
        for gamma in beta + 1..=horizon.max(beta + 1) {
            let r = Category::FgAb
                .solve_right_factor(&x.bond(gamma, alpha)?, &want)?
                .ok_or_else(|| ProError::Invalid(format!("stable chain promised a lift at γ={}", gamma)))?;
            lifts.push(Lift { gamma, r });
        }
        return Ok(Some(Entry::Lifts { alpha, beta, lifts }));
    }
    Ok(None)
}

/// A tail slot where the period bond is eventually injective on its images while the images
/// keep shrinking: `ker Q^{j+1} = ker Q^j` and `im Q^{j+1} ⊊ im Q^j`. Then `Q` maps each image
/// injectively onto the next, so the descent never stops and the images of `p^γ_slot` never
/// stabilize.
pub(crate) fn strict_descent(x: &InverseSystem, horizon: usize) -> Result<Option<FailReason>, ProError> {
    if *x.category() != Category::FgAb {
        return Ok(None);
    }
    let Some(t) = x.tower_index() else { return Ok(None) };
    for slot in t.prefix_len..t.stored() {
        let obj = x.object(slot).as_group().unwrap().clone();
        let rel = obj.relations();
        let power = |j: usize| -> Result<IntMatrix, ProError> {
            Ok(x.bond(slot + j * t.tail_period, slot)?.as_group().unwrap().matrix().clone())
        };
        let steps = horizon.saturating_sub(slot) / t.tail_period + 1;
        let mut cur = power(0)?;
        for j in 0..steps {
            let next = power(j + 1)?;
            let same_kernel = lattice_equal(&kernel_generators(&next, rel)?, &kernel_generators(&cur, rel)?, rel)?;
            if same_kernel && !lattice_contains(&cur, &next, rel)? {
                return Ok(Some(FailReason::StrictDescent { slot, from: j }));
            }
            cur = next;
        }
    }
    Ok(None)
}
