use std::collections::BTreeSet;

use super::certificate::{Certificate, Coverage, Entry, Subject};
use super::level::check_iso;
use super::movability::strict_descent;
use super::{CounterWitness, FailReason, Property, Unresolved, Verdict};
use crate::categories::{Category, Morphism, Object};
use crate::prosys::{levelize, sub2, InverseSystem, ProError, ProMorphism, ProTail, Representative, TowerIndex};
use crate::zlinalg::lattice_equal;

fn unknown(horizon: usize, note: impl Into<String>) -> Verdict {
    Verdict::Unknown(Unresolved { horizon, note: note.into() })
}

fn fails(slot: usize, from: usize, evidence: String) -> Verdict {
    Verdict::Fails(CounterWitness {
        property: Property::Stable,
        alpha: Some(slot),
        reason: FailReason::StrictDescent { slot, from },
        evidence,
    })
}

/// Levelize a comparison `X → constant(W)` and certify it as an isomorphism.
fn try_comparison(
    x: &InverseSystem,
    g: &ProMorphism,
    object: &Object,
    alpha: Option<usize>,
    horizon: usize,
) -> Result<Option<Verdict>, ProError> {
    let lev = match levelize(g, horizon) {
        Ok(l) => l,
        Err(ProError::Unresolved { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let Verdict::Holds(iso) = check_iso(&lev.level, horizon)? else { return Ok(None) };
    let entry = Entry::Stable {
        object: object.clone(),
        alpha,
        selector: lev.selector.expect("tower levelization records its selector"),
        comparison: Box::new(iso),
    };
    let cert =
        Certificate::new(Property::Stable, Subject::System(x.clone()), horizon, Coverage::PeriodicShift, vec![entry]);
    Ok(Some(Verdict::Holds(cert)))
}

/// `X → X_α` through the projection at `α`.
fn project_to(x: &InverseSystem, alpha: usize, horizon: usize) -> Result<Option<Verdict>, ProError> {
    let g = sub2(x).projection_morphism(alpha)?;
    try_comparison(x, &g, &x.object(alpha).clone(), Some(alpha), horizon)
}

/// Two-sided inverses of every tail step, when they all exist.
pub(crate) fn tail_inverses(x: &InverseSystem) -> Result<Option<Vec<Entry>>, ProError> {
    let Some(t) = x.tower_index() else { return Ok(None) };
    let cat = x.category();
    let mut entries = Vec::new();
    for slot in t.prefix_len..t.stored() {
        let step = x.step(slot);
        if !cat.is_iso(step)? {
            return Ok(None);
        }
        let id = cat.identity(x.object(slot))?;
        let Some(inverse) = cat.solve_right_factor(step, &id)? else { return Ok(None) };
        entries.push(Entry::TailInverse { slot, inverse });
    }
    Ok(Some(entries))
}

/// Powers `k` with `im Q^k = im Q^{k+1}` for the period bond at `slot`, looked for up to
/// `max_k`.
fn image_settles(x: &InverseSystem, t: TowerIndex, slot: usize, max_k: usize) -> Result<Option<usize>, ProError> {
    let power = |k: usize| x.bond(slot + k * t.tail_period, slot);
    match x.category() {
        Category::FinSet => {
            let mut cur: BTreeSet<usize> = power(0)?.as_set().unwrap().image();
            for k in 0..=max_k {
                let next = power(k + 1)?.as_set().unwrap().image();
                if next == cur {
                    return Ok(Some(k));
                }
                cur = next;
            }
            Ok(None)
        }
        Category::FgAb => {
            let rel = x.object(slot).as_group().unwrap().relations().clone();
            let mut cur = power(0)?.as_group().unwrap().matrix().clone();
            for k in 0..=max_k {
                let next = power(k + 1)?.as_group().unwrap().matrix().clone();
                if lattice_equal(&cur, &next, &rel)? {
                    return Ok(Some(k));
                }
                cur = next;
            }
            Ok(None)
        }
        Category::Dual(_) => Ok(None),
    }
}

/// Order of the period bond `q` on the settled image `m: W → X_L`, if it is at most
/// `bound`. The comparison `X → W` repeats with that many periods.
fn order_on_image(cat: &Category, m: &Morphism, q: &Morphism, bound: usize) -> Result<Option<usize>, ProError> {
    let Some(qw) = cat.solve_right_factor(m, &cat.compose(q, m)?)? else { return Ok(None) };
    let id = cat.identity(&cat.source(m))?;
    let mut pow = qw.clone();
    for c in 1..=bound.max(24) {
        if cat.equal(&pow, &id) {
            return Ok(Some(c));
        }
        pow = cat.compose(&qw, &pow)?;
    }
    Ok(None)
}

/// Whether `X` is isomorphic to a single object.
///
/// Towers go through a ladder: all-mono and all-epi towers are stable exactly when their
/// tail steps are isomorphisms; towers of finite sets or finitely generated groups are
/// stable exactly when the images of the period bonds settle (finite sets and f.g. abelian
/// groups admit no proper surjective endomorphisms), with the settled image as the witness;
/// failing that the levels themselves and the terminal object are tried as witnesses.
pub fn check_stability(x: &InverseSystem, horizon: usize) -> Result<Verdict, ProError> {
    x.validate().map_err(ProError::Violation)?;
    let cat = x.category().clone();
    if let Some(p) = x.poset_index() {
        let element = p.maximum().ok_or_else(|| ProError::Invalid("finite directed poset without a maximum".into()))?;
        let cert = Certificate::new(
            Property::Stable,
            Subject::System(x.clone()),
            horizon,
            Coverage::Maximum,
            vec![Entry::Maximum { element }],
        );
        return Ok(Verdict::Holds(cert));
    }
    let t = x.tower_index().unwrap();
    let l = t.prefix_len;
    let tail_iso = (l..t.stored()).map(|n| cat.is_iso(x.step(n))).collect::<Result<Vec<_>, _>>()?;
    let all_mono = x.steps().iter().map(|s| cat.is_mono(s)).collect::<Result<Vec<_>, _>>()?.into_iter().all(|b| b);
    let all_epi = x.steps().iter().map(|s| cat.is_epi(s)).collect::<Result<Vec<_>, _>>()?.into_iter().all(|b| b);
    if tail_iso.iter().all(|ok| *ok) {
        if let Some(v) = project_to(x, l, horizon)? {
            return Ok(v);
        }
        // An automorphism of infinite order in the tail leaves no periodic comparison map.
        if let Some(entries) = tail_inverses(x)? {
            let cert = Certificate::new(
                Property::Stable,
                Subject::System(x.clone()),
                horizon,
                Coverage::TailInverses,
                entries,
            );
            return Ok(Verdict::Holds(cert));
        }
    } else if all_mono || all_epi {
        let bad = tail_iso.iter().position(|ok| !ok).unwrap();
        let kind = if all_mono { "injective" } else { "surjective" };
        let evidence = format!("every bond is {} but the tail step at {} is not invertible", kind, l + bad);
        if !cat.is_dual() && *cat.base() == Category::FgAb && all_mono {
            return Ok(fails(l + bad, 0, evidence));
        }
    }
    if !cat.is_dual() {
        if let Some(FailReason::StrictDescent { slot, from }) = strict_descent(x, horizon)? {
            let evidence = format!(
                "images of the period bond at {} shrink strictly forever, so the tower is not Mittag-Leffler",
                slot
            );
            return Ok(fails(slot, from, evidence));
        }
        let max_k = match cat {
            Category::FinSet => x.objects().iter().map(|o| cat.object_size(o)).max().unwrap_or(0) + 1,
            _ => horizon / t.tail_period + 1,
        };
        let mut settled = Some(0);
        for slot in l..t.stored() {
            settled = match (settled, image_settles(x, t, slot, max_k)?) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
        }
        if let Some(k) = settled {
            let gamma0 = l + k * t.tail_period;
            let (e, m) = cat.image_factorization(&x.bond(gamma0, l)?)?;
            let w = cat.target(&e);
            if let Some(c) = order_on_image(&cat, &m, &x.period_bond(l)?, horizon)? {
                let target = InverseSystem::constant(cat.clone(), w.clone())?;
                let g = ProMorphism::new(
                    x.clone(),
                    target,
                    vec![Representative { from: gamma0, map: e }],
                    Some(ProTail { shift: c * t.tail_period, anchored: false }),
                )?;
                if let Some(v) = try_comparison(x, &g, &w, None, horizon)? {
                    return Ok(v);
                }
            }
        }
    }
    for alpha in 0..t.stored() {
        if let Some(v) = project_to(x, alpha, horizon)? {
            return Ok(v);
        }
    }
    let terminal = cat.terminal_object();
    let to_terminal = cat.to_terminal(x.object(0))?;
    let target = InverseSystem::constant(cat.clone(), terminal.clone())?;
    let anchored = t.prefix_len > 0;
    let g = ProMorphism::new(
        x.clone(),
        target,
        vec![Representative { from: 0, map: to_terminal }],
        Some(ProTail { shift: 0, anchored }),
    )?;
    if let Some(v) = try_comparison(x, &g, &terminal, None, horizon)? {
        return Ok(v);
    }
    Ok(unknown(horizon, "no witness object found within the horizon"))
}
