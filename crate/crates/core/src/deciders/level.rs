use super::certificate::{Certificate, Coverage, Entry, Premise, Subject};
use super::chains::chain_fails;
use super::{CounterWitness, FailReason, Property, Unresolved, Verdict};
use crate::categories::Morphism;
use crate::prosys::{Index, LevelMorphism, ProError, Tail, TowerIndex};

/// The levelwise condition behind each morphism property.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Cond {
    Mono,
    Epi,
    StrongMono,
    StrongEpi,
    Iso,
}

impl Cond {
    pub(crate) fn property(self) -> Property {
        match self {
            Cond::Mono => Property::Mono,
            Cond::Epi => Property::Epi,
            Cond::StrongMono => Property::StrongMono,
            Cond::StrongEpi => Property::StrongEpi,
            Cond::Iso => Property::Iso,
        }
    }

    fn evidence(self, label: &str) -> String {
        match self {
            Cond::Mono => format!(
                "not left-cancellable at α={}: for no β does f_β∘u = f_β∘v force p(X)^β_α∘u = p(X)^β_α∘v",
                label
            ),
            Cond::Epi => format!(
                "not right-cancellable at α={}: for no β does u∘f_α = v∘f_α force u∘p(Y)^β_α = v∘p(Y)^β_α",
                label
            ),
            Cond::StrongMono => format!("no left inverse at α={}: no g with g∘f_β = p(X)^β_α for any β", label),
            Cond::StrongEpi => format!("no right inverse at α={}: no g with f_α∘g = p(Y)^β_α for any β", label),
            Cond::Iso => format!("no inverse at α={}: no g inverting f up to bonds for any β", label),
        }
    }

    /// Weaker conditions whose failure at the same index implies this one fails.
    fn weaker(self) -> &'static [Cond] {
        match self {
            Cond::StrongMono => &[Cond::Mono],
            Cond::StrongEpi => &[Cond::Epi],
            Cond::Iso => &[Cond::StrongMono, Cond::StrongEpi],
            _ => &[],
        }
    }
}

/// The condition at `(α, β)`, with its certificate entry when it holds.
pub(crate) fn pair_test(f: &LevelMorphism, cond: Cond, alpha: usize, beta: usize) -> Result<Option<Entry>, ProError> {
    let cat = f.category();
    let (x, y) = (f.source(), f.target());
    Ok(match cond {
        Cond::Mono => {
            cat.cancel_left_before(&f.component(beta)?, &x.bond(beta, alpha)?)?.then_some(Entry::Mono { alpha, beta })
        }
        Cond::Epi => {
            cat.cancel_right_after(&f.component(alpha)?, &y.bond(beta, alpha)?)?.then_some(Entry::Epi { alpha, beta })
        }
        Cond::StrongMono => cat
            .solve_left_factor(&f.component(beta)?, &x.bond(beta, alpha)?)?
            .map(|g| Entry::StrongMono { alpha, beta, g }),
        Cond::StrongEpi => cat
            .solve_right_factor(&f.component(alpha)?, &y.bond(beta, alpha)?)?
            .map(|g| Entry::StrongEpi { alpha, beta, g }),
        Cond::Iso => cat
            .solve_iso_pair(&f.component(alpha)?, &f.component(beta)?, &x.bond(beta, alpha)?, &y.bond(beta, alpha)?)?
            .map(|g| Entry::Iso { alpha, beta, g }),
    })
}

/// Candidate `β` for `α`, smallest first: `α < β <= horizon` on towers, `β >= α` on posets.
pub(crate) fn betas(index: &Index, alpha: usize, horizon: usize) -> Vec<usize> {
    match index {
        Index::Tower(_) => (alpha + 1..=horizon).collect(),
        Index::Poset(p) => p.above(alpha),
    }
}

pub(crate) fn find_beta(
    f: &LevelMorphism,
    cond: Cond,
    alpha: usize,
    horizon: usize,
) -> Result<Option<Entry>, ProError> {
    for b in betas(f.index(), alpha, horizon) {
        if let Some(e) = pair_test(f, cond, alpha, b)? {
            return Ok(Some(e));
        }
    }
    Ok(None)
}

/// The data that determines the condition at `β` for fixed `α`, and its own evolution.
fn state(f: &LevelMorphism, cond: Cond, t: TowerIndex, alpha: usize, beta: usize) -> Result<Vec<Morphism>, ProError> {
    let mut s = Vec::new();
    let needs_x = !matches!(cond, Cond::Epi | Cond::StrongEpi);
    let needs_y = !matches!(cond, Cond::Mono | Cond::StrongMono);
    if needs_x {
        s.push(f.source().bond(beta, alpha)?);
        for j in 0..t.tail_period {
            s.push(f.component(beta + j)?);
        }
    }
    if needs_y {
        s.push(f.target().bond(beta, alpha)?);
    }
    Ok(s)
}

/// Two levels `β₁ < β₂ <= horizon` in the tail, a whole number of periods apart, with the
/// same state: the condition at `β` repeats from `β₁` on.
fn cycle(f: &LevelMorphism, cond: Cond, alpha: usize, horizon: usize) -> Result<Option<FailReason>, ProError> {
    let Some(t) = f.index().as_tower().copied() else { return Ok(None) };
    let cat = f.category();
    let start = t.prefix_len.max(alpha + 1);
    let mut states: Vec<(usize, Vec<Morphism>)> = Vec::new();
    for beta in start..=horizon {
        let s = state(f, cond, t, alpha, beta)?;
        for (b1, s1) in &states {
            if (beta - b1) % t.tail_period == 0 && s1.iter().zip(&s).all(|(a, b)| cat.equal(a, b)) {
                return Ok(Some(FailReason::CycleDetected { first: *b1, repeat: beta }));
            }
        }
        states.push((beta, s));
    }
    Ok(None)
}

/// A certified failure of `cond` at `alpha`, if one can be established.
pub(crate) fn fails_at(
    f: &LevelMorphism,
    cond: Cond,
    alpha: usize,
    horizon: usize,
) -> Result<Option<CounterWitness>, ProError> {
    if find_beta(f, cond, alpha, horizon)?.is_some() {
        return Ok(None);
    }
    let label = f.index().label(alpha);
    let witness = |reason| CounterWitness {
        property: cond.property(),
        alpha: Some(alpha),
        reason,
        evidence: cond.evidence(&label),
    };
    if f.index().as_poset().is_some() {
        return Ok(Some(witness(FailReason::Exhaustive)));
    }
    if let Some(r) = cycle(f, cond, alpha, horizon)? {
        return Ok(Some(witness(r)));
    }
    if let Some(r) = chain_fails(f, cond, alpha, horizon)? {
        return Ok(Some(witness(r)));
    }
    for weaker in cond.weaker() {
        if fails_at(f, *weaker, alpha, horizon)?.is_some() {
            return Ok(Some(witness(FailReason::Implied { by: weaker.property() })));
        }
    }
    Ok(None)
}

/// The fact about the period bond at `slot` that carries the condition from `α` to `α+P`
/// when the morphism has an anchored tail.
fn premise(f: &LevelMorphism, cond: Cond, slot: usize) -> Result<Option<Premise>, ProError> {
    let cat = f.category();
    let q = f.source().period_bond(slot)?;
    let id = cat.identity(f.source().object(slot))?;
    Ok(match cond {
        Cond::Mono => cat.is_mono(&q)?.then_some(Premise::Injective),
        Cond::Epi => cat.is_epi(&q)?.then_some(Premise::Surjective),
        Cond::StrongEpi => cat.solve_right_factor(&q, &id)?.map(|section| Premise::SplitEpi { section }),
        Cond::StrongMono | Cond::Iso => match cat.solve_right_factor(&q, &id)? {
            Some(inverse) if cat.equal(&cat.compose(&inverse, &q)?, &id) => Some(Premise::Iso { inverse }),
            _ => None,
        },
    })
}

fn unknown(horizon: usize, note: String) -> Verdict {
    Verdict::Unknown(Unresolved { horizon, note })
}

/// With an anchored tail the indices past the stored window are not shifts of stored ones,
/// so a failure may first show up there.
fn fails_past_window(f: &LevelMorphism, cond: Cond, horizon: usize) -> Result<Option<CounterWitness>, ProError> {
    if f.tail() != Tail::Anchored || f.index().as_tower().is_none() {
        return Ok(None);
    }
    for alpha in f.index().stored()..horizon {
        if let Some(cw) = fails_at(f, cond, alpha, horizon)? {
            return Ok(Some(cw));
        }
    }
    Ok(None)
}

/// Entries for every index of the window, or the verdict that ends the search.
fn collect(f: &LevelMorphism, cond: Cond, horizon: usize) -> Result<Result<(Vec<Entry>, Coverage), Verdict>, ProError> {
    let mut entries = Vec::new();
    let mut unresolved: Option<usize> = None;
    for alpha in 0..f.index().stored() {
        match find_beta(f, cond, alpha, horizon)? {
            Some(e) => entries.push(e),
            None => match fails_at(f, cond, alpha, horizon)? {
                Some(cw) => return Ok(Err(Verdict::Fails(cw))),
                None => {
                    unresolved.get_or_insert(alpha);
                }
            },
        }
    }
    if let Some(a) = unresolved {
        if let Some(cw) = fails_past_window(f, cond, horizon)? {
            return Ok(Err(Verdict::Fails(cw)));
        }
        return Ok(Err(unknown(
            horizon,
            format!("no admissible β <= {} for α={} and no proof that none exists", horizon, f.index().label(a)),
        )));
    }
    let coverage = match (f.index(), f.tail()) {
        (Index::Poset(_), _) => Coverage::Poset,
        (Index::Tower(_), Tail::Periodic) => Coverage::PeriodicShift,
        (Index::Tower(t), Tail::Anchored) => {
            for slot in t.prefix_len..t.stored() {
                match premise(f, cond, slot)? {
                    Some(p) => entries.push(Entry::Premise { slot, premise: p }),
                    None => {
                        if let Some(cw) = fails_past_window(f, cond, horizon)? {
                            return Ok(Err(Verdict::Fails(cw)));
                        }
                        return Ok(Err(unknown(
                            horizon,
                            format!(
                                "every checked α admits a β, but the anchored tail cannot be extended: \
                                 the period bond at {} lacks the needed property",
                                slot
                            ),
                        )));
                    }
                }
            }
            Coverage::AnchoredPremise
        }
    };
    Ok(Ok((entries, coverage)))
}

fn check_cond(f: &LevelMorphism, cond: Cond, horizon: usize) -> Result<Verdict, ProError> {
    f.validate().map_err(ProError::Violation)?;
    Ok(match collect(f, cond, horizon)? {
        Ok((entries, coverage)) => {
            Verdict::Holds(Certificate::new(cond.property(), Subject::Morphism(f.clone()), horizon, coverage, entries))
        }
        Err(v) => v,
    })
}

/// Monomorphism: for every `α` some `β` with `f_β∘u = f_β∘v ⟹ p(X)^β_α∘u = p(X)^β_α∘v`.
pub fn check_mono(f: &LevelMorphism, horizon: usize) -> Result<Verdict, ProError> {
    check_cond(f, Cond::Mono, horizon)
}

/// Epimorphism: for every `α` some `β` with `u∘f_α = v∘f_α ⟹ u∘p(Y)^β_α = v∘p(Y)^β_α`.
pub fn check_epi(f: &LevelMorphism, horizon: usize) -> Result<Verdict, ProError> {
    check_cond(f, Cond::Epi, horizon)
}

/// Strong monomorphism: for every `α` some `β` and `g: Y_β → X_α` with `g∘f_β = p(X)^β_α`.
pub fn check_strong_mono(f: &LevelMorphism, horizon: usize) -> Result<Verdict, ProError> {
    check_cond(f, Cond::StrongMono, horizon)
}

/// Strong epimorphism: for every `α` some `β` and `g: Y_β → X_α` with `f_α∘g = p(Y)^β_α`.
pub fn check_strong_epi(f: &LevelMorphism, horizon: usize) -> Result<Verdict, ProError> {
    check_cond(f, Cond::StrongEpi, horizon)
}

/// Isomorphism: one `g` per `α` satisfying both equations above.
pub fn check_iso(f: &LevelMorphism, horizon: usize) -> Result<Verdict, ProError> {
    check_cond(f, Cond::Iso, horizon)
}

/// Mono and epi together. A failure of either decides; otherwise an unknown part makes the
/// whole unknown.
pub fn check_bimorphism(f: &LevelMorphism, horizon: usize) -> Result<Verdict, ProError> {
    f.validate().map_err(ProError::Violation)?;
    let mono = collect(f, Cond::Mono, horizon)?;
    let epi = collect(f, Cond::Epi, horizon)?;
    Ok(match (mono, epi) {
        (Err(v @ Verdict::Fails(_)), _) | (_, Err(v @ Verdict::Fails(_))) => v,
        (Err(v), _) | (_, Err(v)) => v,
        (Ok((mut a, coverage)), Ok((b, _))) => {
            a.extend(b);
            Verdict::Holds(Certificate::new(Property::Bimorphism, Subject::Morphism(f.clone()), horizon, coverage, a))
        }
    })
}
