use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::level::{pair_test, Cond};
use super::Property;
use crate::categories::{Category, FgAbMorphism, FinSetMorphism, Morphism, Object};
use crate::prosys::{subtower, Index, InverseSystem, LevelMorphism, SubtowerSelector, Tail, TowerIndex};

pub const CERT_FORMAT: &str = "procat-cert/1";

/// What a certificate is about.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subject {
    Morphism(LevelMorphism),
    System(InverseSystem),
}

impl Subject {
    /// SHA-256 of the canonical JSON form.
    pub fn binding(&self) -> String {
        sha256_json(self)
    }

    pub fn category(&self) -> &Category {
        match self {
            Subject::Morphism(f) => f.category(),
            Subject::System(x) => x.category(),
        }
    }
}

fn sha256_json<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("certificate data serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// How the finitely many entries cover every index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coverage {
    /// One entry per index of the first `prefix + period` levels; the rest follow by
    /// shifting along the periodic tail.
    PeriodicShift,
    /// As above, for an anchored tail; `Premise` entries record the facts about the period
    /// bonds that make the shift argument work.
    AnchoredPremise,
    /// One entry per element of a finite index.
    Poset,
    /// The index has a maximum element.
    Maximum,
    /// Holds on a finite family of sampled selectors only.
    Sampled,
    /// Lifts are replayed up to the horizon; beyond it they follow from a stabilized chain
    /// of hom-subgroups.
    StableChain,
    /// Every tail step has a two-sided inverse, so the projection onto the first tail level
    /// is an isomorphism of pro-objects.
    TailInverses,
}

/// A fact about the period bond `Q = p^{slot+P}_{slot}` of the source.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum Premise {
    Injective,
    Surjective,
    Iso { inverse: Morphism },
    SplitEpi { section: Morphism },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lift {
    pub gamma: usize,
    pub r: Morphism,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Entry {
    /// `f_β u = f_β v ⟹ p(X)^β_α u = p(X)^β_α v`, with `β` least.
    Mono {
        alpha: usize,
        beta: usize,
    },
    /// `u f_α = v f_α ⟹ u p(Y)^β_α = v p(Y)^β_α`, with `β` least.
    Epi {
        alpha: usize,
        beta: usize,
    },
    /// `g ∘ f_β = p(X)^β_α`.
    StrongMono {
        alpha: usize,
        beta: usize,
        g: Morphism,
    },
    /// `f_α ∘ g = p(Y)^β_α`.
    StrongEpi {
        alpha: usize,
        beta: usize,
        g: Morphism,
    },
    /// Both of the above with one `g`.
    Iso {
        alpha: usize,
        beta: usize,
        g: Morphism,
    },
    Premise {
        slot: usize,
        premise: Premise,
    },
    /// `ρ: X_β → X_γ` fixed by `p^{γ+cP}_γ` with `p^γ_α ρ = p^β_α`, which spreads to a
    /// compatible family `X_β → X`.
    Family {
        alpha: usize,
        beta: usize,
        gamma: usize,
        cycles: usize,
        rho: Morphism,
    },
    /// `r: X_β → X_γ` with `p^γ_α r = p^β_α` for each listed `γ`.
    Lifts {
        alpha: usize,
        beta: usize,
        lifts: Vec<Lift>,
    },
    /// The family condition for the subtower `X_s` at its first index.
    Sequential {
        selector: SubtowerSelector,
        beta: usize,
        gamma: usize,
        cycles: usize,
        rho: Morphism,
    },
    /// `X_s` is isomorphic to the constant system on `object`, by the nested certificate.
    Stable {
        object: Object,
        alpha: Option<usize>,
        selector: SubtowerSelector,
        comparison: Box<Certificate>,
    },
    Maximum {
        element: usize,
    },
    /// `inverse: X_slot → X_{slot+1}` undoes the bond `p^{slot+1}_{slot}` on both sides.
    TailInverse {
        slot: usize,
        inverse: Morphism,
    },
}

/// A replayable proof that a property holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub format: String,
    pub property: Property,
    pub category: String,
    pub binding: String,
    pub subject: Subject,
    pub horizon: usize,
    pub coverage: Coverage,
    pub entries: Vec<Entry>,
    pub digest: String,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("unsupported certificate format {0:?}")]
    Format(String),
    #[error("binding mismatch: certificate is for {found}, expected {expected}")]
    Binding { expected: String, found: String },
    #[error("digest mismatch")]
    Digest,
    #[error("entry {index}: {message}")]
    Entry { index: usize, message: String },
    #[error("coverage: {0}")]
    Coverage(String),
}

impl VerifyError {
    /// Which layer rejected the certificate.
    pub fn caught_by(&self) -> &'static str {
        match self {
            VerifyError::Format(_) => "format",
            VerifyError::Binding { .. } => "binding",
            VerifyError::Digest => "digest",
            VerifyError::Entry { .. } | VerifyError::Coverage(_) => "replay",
        }
    }
}

impl Certificate {
    pub fn new(property: Property, subject: Subject, horizon: usize, coverage: Coverage, entries: Vec<Entry>) -> Self {
        let mut c = Certificate {
            format: CERT_FORMAT.to_string(),
            property,
            category: subject.category().to_string(),
            binding: subject.binding(),
            subject,
            horizon,
            coverage,
            entries,
            digest: String::new(),
        };
        c.reseal();
        c
    }

    /// Recompute the digest after editing. It covers every field but itself.
    pub fn reseal(&mut self) {
        self.digest = self.content_digest();
    }

    fn content_digest(&self) -> String {
        sha256_json(&(
            &self.format,
            self.property,
            &self.category,
            &self.binding,
            self.horizon,
            &self.coverage,
            &self.entries,
        ))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Check that the certificate is about `subject`, then replay it.
    pub fn verify_against(&self, subject: &Subject) -> Result<(), VerifyError> {
        let expected = subject.binding();
        if self.binding != expected {
            return Err(VerifyError::Binding { expected, found: self.binding.clone() });
        }
        self.verify()
    }

    /// Replay every entry. No searches: each step evaluates a stated equation, a decidable
    /// fact about a single morphism, or the absence of a witness at the finitely many
    /// indices below a claimed least `β`.
    pub fn verify(&self) -> Result<(), VerifyError> {
        if self.format != CERT_FORMAT {
            return Err(VerifyError::Format(self.format.clone()));
        }
        let found = self.subject.binding();
        if self.binding != found {
            return Err(VerifyError::Binding { expected: found, found: self.binding.clone() });
        }
        if self.content_digest() != self.digest {
            return Err(VerifyError::Digest);
        }
        if self.category != self.subject.category().to_string() {
            return Err(VerifyError::Coverage(format!("category {} does not match the subject", self.category)));
        }
        match &self.subject {
            Subject::Morphism(f) => self.verify_morphism(f),
            Subject::System(x) => self.verify_system(x),
        }
    }

    fn verify_morphism(&self, f: &LevelMorphism) -> Result<(), VerifyError> {
        f.validate().map_err(|v| VerifyError::Coverage(format!("subject is not a level morphism: {}", v)))?;
        let kinds: Vec<Property> = match self.property {
            Property::Bimorphism => vec![Property::Mono, Property::Epi],
            p if p.is_morphism_property() => vec![p],
            p => return Err(VerifyError::Coverage(format!("{} is not a morphism property", p))),
        };
        let mut premises = Vec::new();
        let mut covered: Vec<(Property, usize)> = Vec::new();
        for (i, e) in self.entries.iter().enumerate() {
            let bad = |message: String| VerifyError::Entry { index: i, message };
            let prop = match e {
                Entry::Mono { alpha, .. } => (Property::Mono, *alpha),
                Entry::Epi { alpha, .. } => (Property::Epi, *alpha),
                Entry::StrongMono { alpha, .. } => (Property::StrongMono, *alpha),
                Entry::StrongEpi { alpha, .. } => (Property::StrongEpi, *alpha),
                Entry::Iso { alpha, .. } => (Property::Iso, *alpha),
                Entry::Premise { slot, premise } => {
                    replay_premise(f, *slot, premise).map_err(bad)?;
                    premises.push((*slot, premise.clone()));
                    continue;
                }
                _ => return Err(bad("entry kind does not belong to a morphism certificate".into())),
            };
            if !kinds.contains(&prop.0) {
                return Err(bad(format!("{} entry in a {} certificate", prop.0, self.property)));
            }
            replay_level_entry(f, e).map_err(bad)?;
            covered.push(prop);
        }
        let window: Vec<usize> = (0..f.index().stored()).collect();
        for k in &kinds {
            for a in &window {
                if !covered.contains(&(*k, *a)) {
                    return Err(VerifyError::Coverage(format!("no {} entry for index {}", k, f.index().label(*a))));
                }
            }
        }
        let expected = match (f.index(), f.tail()) {
            (Index::Poset(_), _) => Coverage::Poset,
            (Index::Tower(_), Tail::Periodic) => Coverage::PeriodicShift,
            (Index::Tower(_), Tail::Anchored) => Coverage::AnchoredPremise,
        };
        if self.coverage != expected {
            return Err(VerifyError::Coverage(format!("expected {:?} coverage", expected)));
        }
        if let (Index::Tower(t), Tail::Anchored) = (f.index(), f.tail()) {
            for slot in t.prefix_len..t.stored() {
                for k in &kinds {
                    let ok = premises.iter().any(|(s, p)| *s == slot && premise_suffices(*k, p));
                    if !ok {
                        return Err(VerifyError::Coverage(format!(
                            "anchored tail needs a premise on the period bond at {} for {}",
                            slot, k
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn verify_system(&self, x: &InverseSystem) -> Result<(), VerifyError> {
        x.validate().map_err(|v| VerifyError::Coverage(format!("subject is not a valid system: {}", v)))?;
        if self.coverage == Coverage::Maximum {
            let [Entry::Maximum { element }] = self.entries.as_slice() else {
                return Err(VerifyError::Coverage("a maximum certificate has exactly one maximum entry".into()));
            };
            let p = x.poset_index().ok_or_else(|| VerifyError::Coverage("a tower has no maximum".into()))?;
            if *element >= p.len() || (0..p.len()).any(|a| !p.leq(a, *element)) {
                return Err(VerifyError::Entry { index: 0, message: format!("{} is not the maximum", element) });
            }
            return Ok(());
        }
        let t = x.tower_index().ok_or_else(|| VerifyError::Coverage("expected a tower for this coverage".into()))?;
        if self.coverage == Coverage::TailInverses {
            if !matches!(self.property, Property::Stable | Property::UniformlyMovable | Property::Movable) {
                return Err(VerifyError::Coverage(format!("{} is not certified by tail inverses", self.property)));
            }
            return replay_tail_inverses(x, t, &self.entries);
        }
        match self.property {
            Property::UniformlyMovable | Property::Movable => {
                if self.property == Property::UniformlyMovable && self.coverage != Coverage::PeriodicShift {
                    return Err(VerifyError::Coverage("uniform movability is certified by periodic families".into()));
                }
                let mut covered = Vec::new();
                for (i, e) in self.entries.iter().enumerate() {
                    let bad = |message: String| VerifyError::Entry { index: i, message };
                    match e {
                        Entry::Family { alpha, beta, gamma, cycles, rho } => {
                            if beta <= alpha {
                                return Err(bad(format!("β={} must exceed α={}", beta, alpha)));
                            }
                            replay_family(
                                x,
                                *alpha,
                                x.bond(*beta, *alpha).map_err(|e| bad(e.to_string()))?,
                                *beta,
                                *gamma,
                                *cycles,
                                rho,
                                x,
                            )
                            .map_err(bad)?;
                            covered.push(*alpha);
                        }
                        Entry::Lifts { alpha, beta, lifts } if self.property == Property::Movable => {
                            replay_lifts(x, *alpha, *beta, lifts, self.horizon).map_err(bad)?;
                            covered.push(*alpha);
                        }
                        _ => return Err(bad("unexpected entry kind for movability".into())),
                    }
                }
                for a in 0..t.stored() {
                    if !covered.contains(&a) {
                        return Err(VerifyError::Coverage(format!("no entry for index {}", a)));
                    }
                }
                Ok(())
            }
            Property::SequentiallyMovable => {
                if self.coverage != Coverage::Sampled || self.entries.is_empty() {
                    return Err(VerifyError::Coverage(
                        "sequential movability is certified on sampled selectors".into(),
                    ));
                }
                for (i, e) in self.entries.iter().enumerate() {
                    let bad = |message: String| VerifyError::Entry { index: i, message };
                    let Entry::Sequential { selector, beta, gamma, cycles, rho } = e else {
                        return Err(bad("unexpected entry kind for sequential movability".into()));
                    };
                    let z = subtower(x, selector).map_err(|e| bad(e.to_string()))?;
                    let s0 = selector.at(0);
                    if *beta <= s0 {
                        return Err(bad(format!("β={} must exceed s(0)={}", beta, s0)));
                    }
                    let target = x.bond(*beta, s0).map_err(|e| bad(e.to_string()))?;
                    replay_family(&z, 0, target, *beta, *gamma, *cycles, rho, x).map_err(bad)?;
                }
                for d in super::default_selectors() {
                    if !self.entries.iter().any(|e| matches!(e, Entry::Sequential { selector, .. } if *selector == d)) {
                        return Err(VerifyError::Coverage(format!("the default selector {:?} is not sampled", d)));
                    }
                }
                Ok(())
            }
            Property::Stable => {
                let [Entry::Stable { object, alpha, selector, comparison }] = self.entries.as_slice() else {
                    return Err(VerifyError::Coverage("a stability certificate has exactly one stable entry".into()));
                };
                let bad = |message: String| VerifyError::Entry { index: 0, message };
                if let Some(a) = alpha {
                    if *a >= t.stored() || x.object(*a) != object {
                        return Err(bad(format!("the witness object is not X_{}", a)));
                    }
                }
                if comparison.property != Property::Iso {
                    return Err(bad("nested certificate must prove an isomorphism".into()));
                }
                comparison.verify().map_err(|e| bad(format!("nested: {}", e)))?;
                let Subject::Morphism(g) = &comparison.subject else {
                    return Err(bad("nested certificate must be about a morphism".into()));
                };
                let xs = subtower(x, selector).map_err(|e| bad(e.to_string()))?;
                let cat = x.category();
                let n = g.index().stored() + xs.index().stored();
                for k in 0..n {
                    let same_obj = g.source().object(k) == xs.object(k);
                    let gs = g.source().bond(k + 1, k).map_err(|e| bad(e.to_string()))?;
                    if !same_obj || !cat.equal(&gs, xs.step(k)) {
                        return Err(bad(format!("comparison source differs from X_s at level {}", k)));
                    }
                    let gt = g.target().bond(k + 1, k).map_err(|e| bad(e.to_string()))?;
                    let id = cat.identity(object).map_err(|e| bad(e.to_string()))?;
                    if g.target().object(k) != object || !cat.equal(&gt, &id) {
                        return Err(bad(format!("comparison target is not constant at level {}", k)));
                    }
                }
                Ok(())
            }
            p => Err(VerifyError::Coverage(format!("{} is not a system property", p))),
        }
    }
}

fn replay_tail_inverses(x: &InverseSystem, t: TowerIndex, entries: &[Entry]) -> Result<(), VerifyError> {
    let cat = x.category();
    let mut covered = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        let bad = |message: String| VerifyError::Entry { index: i, message };
        let Entry::TailInverse { slot, inverse } = e else {
            return Err(bad("only tail-inverse entries belong here".into()));
        };
        if *slot < t.prefix_len || *slot >= t.stored() {
            return Err(bad(format!("slot {} is not in the tail window", slot)));
        }
        let step = x.step(*slot);
        witness(cat, inverse, x.object(*slot), x.object(slot + 1)).map_err(bad)?;
        let there = cat.compose(step, inverse).map_err(|e| bad(e.to_string()))?;
        let back = cat.compose(inverse, step).map_err(|e| bad(e.to_string()))?;
        let id_here = cat.identity(x.object(*slot)).map_err(|e| bad(e.to_string()))?;
        let id_up = cat.identity(x.object(slot + 1)).map_err(|e| bad(e.to_string()))?;
        if !cat.equal(&there, &id_here) || !cat.equal(&back, &id_up) {
            return Err(bad(format!("not an inverse of the bond at {}", slot)));
        }
        covered.push(*slot);
    }
    for slot in t.prefix_len..t.stored() {
        if !covered.contains(&slot) {
            return Err(VerifyError::Coverage(format!("no inverse for the tail step at {}", slot)));
        }
    }
    Ok(())
}

fn premise_suffices(p: Property, premise: &Premise) -> bool {
    match (p, premise) {
        (_, Premise::Iso { .. }) => true,
        (Property::Mono, Premise::Injective) => true,
        (Property::Epi, Premise::Surjective) | (Property::Epi, Premise::SplitEpi { .. }) => true,
        (Property::StrongEpi, Premise::SplitEpi { .. }) => true,
        _ => false,
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn replay_premise(f: &LevelMorphism, slot: usize, premise: &Premise) -> Result<(), String> {
    let t = f.index().as_tower().ok_or("premises apply to towers")?;
    if slot < t.prefix_len || slot >= t.stored() {
        return Err(format!("slot {} is not in the tail window", slot));
    }
    let cat = f.category();
    let q = f.source().period_bond(slot).map_err(err)?;
    let id = cat.identity(f.source().object(slot)).map_err(err)?;
    if let Premise::Iso { inverse: w } | Premise::SplitEpi { section: w } = premise {
        witness(cat, w, f.source().object(slot), f.source().object(slot))?;
    }
    let ok = match premise {
        Premise::Injective => cat.is_mono(&q).map_err(err)?,
        Premise::Surjective => cat.is_epi(&q).map_err(err)?,
        Premise::Iso { inverse } => {
            cat.equal(&cat.compose(&q, inverse).map_err(err)?, &id)
                && cat.equal(&cat.compose(inverse, &q).map_err(err)?, &id)
        }
        Premise::SplitEpi { section } => cat.equal(&cat.compose(&q, section).map_err(err)?, &id),
    };
    if ok {
        Ok(())
    } else {
        Err(format!("premise {:?} fails for the period bond at {}", premise, slot))
    }
}

fn check_pair_order(f: &LevelMorphism, alpha: usize, beta: usize) -> Result<(), String> {
    let n = f.index().stored();
    if alpha >= n {
        return Err(format!("index {} outside the checked window", alpha));
    }
    match f.index() {
        Index::Tower(_) if beta <= alpha => Err(format!("β={} must exceed α={}", beta, alpha)),
        Index::Poset(p) if beta >= p.len() || !p.leq(alpha, beta) => {
            Err(format!("β={} is not above α={}", beta, alpha))
        }
        _ => Ok(()),
    }
}

/// Candidate `β` values strictly between `α` and `β` in the index order (for minimality).
fn smaller_betas(f: &LevelMorphism, alpha: usize, beta: usize) -> Vec<usize> {
    match f.index() {
        Index::Tower(_) => (alpha + 1..beta).collect(),
        Index::Poset(p) => p.above(alpha).into_iter().filter(|&b| b != beta && p.leq(b, beta)).collect(),
    }
}

/// `m` is a well-formed morphism `source → target`.
fn witness(cat: &Category, m: &Morphism, source: &Object, target: &Object) -> Result<(), String> {
    cat.check_morphism(m).map_err(err)?;
    if cat.source(m) != *source || cat.target(m) != *target {
        return Err("witness has the wrong source or target".into());
    }
    match m {
        Morphism::Set(s) => FinSetMorphism::new(s.source().clone(), s.target().clone(), s.table().to_vec()).map(|_| ()),
        Morphism::Group(g) => FgAbMorphism::new(g.source().clone(), g.target().clone(), g.matrix().clone()).map(|_| ()),
    }
    .map_err(err)
}

/// No index strictly between `α` and `β` admits a witness.
fn least(f: &LevelMorphism, cond: Cond, alpha: usize, beta: usize) -> Result<(), String> {
    for b in smaller_betas(f, alpha, beta) {
        if pair_test(f, cond, alpha, b).map_err(err)?.is_some() {
            return Err(format!("β={} is not the least admissible index for α={} ({} works)", beta, alpha, b));
        }
    }
    Ok(())
}

pub(crate) fn replay_level_entry(f: &LevelMorphism, e: &Entry) -> Result<(), String> {
    let cat = f.category();
    let (x, y) = (f.source(), f.target());
    match e {
        Entry::Mono { alpha, beta } | Entry::Epi { alpha, beta } => {
            check_pair_order(f, *alpha, *beta)?;
            let is_mono = matches!(e, Entry::Mono { .. });
            let test = |b: usize| -> Result<bool, String> {
                if is_mono {
                    cat.cancel_left_before(&f.component(b).map_err(err)?, &x.bond(b, *alpha).map_err(err)?).map_err(err)
                } else {
                    cat.cancel_right_after(&f.component(*alpha).map_err(err)?, &y.bond(b, *alpha).map_err(err)?)
                        .map_err(err)
                }
            };
            if !test(*beta)? {
                return Err(format!("cancellation fails at α={}, β={}", alpha, beta));
            }
            for b in smaller_betas(f, *alpha, *beta) {
                if test(b)? {
                    return Err(format!("β={} is not the least admissible index for α={} ({} works)", beta, alpha, b));
                }
            }
            Ok(())
        }
        Entry::StrongMono { alpha, beta, g } => {
            check_pair_order(f, *alpha, *beta)?;
            witness(cat, g, y.object(*beta), x.object(*alpha))?;
            least(f, Cond::StrongMono, *alpha, *beta)?;
            let lhs = cat.compose(g, &f.component(*beta).map_err(err)?).map_err(err)?;
            if !cat.equal(&lhs, &x.bond(*beta, *alpha).map_err(err)?) {
                return Err(format!("g∘f_β ≠ p(X)^β_α at α={}, β={}", alpha, beta));
            }
            Ok(())
        }
        Entry::StrongEpi { alpha, beta, g } => {
            check_pair_order(f, *alpha, *beta)?;
            witness(cat, g, y.object(*beta), x.object(*alpha))?;
            least(f, Cond::StrongEpi, *alpha, *beta)?;
            let lhs = cat.compose(&f.component(*alpha).map_err(err)?, g).map_err(err)?;
            if !cat.equal(&lhs, &y.bond(*beta, *alpha).map_err(err)?) {
                return Err(format!("f_α∘g ≠ p(Y)^β_α at α={}, β={}", alpha, beta));
            }
            Ok(())
        }
        Entry::Iso { alpha, beta, g } => {
            check_pair_order(f, *alpha, *beta)?;
            witness(cat, g, y.object(*beta), x.object(*alpha))?;
            least(f, Cond::Iso, *alpha, *beta)?;
            let left = cat.compose(&f.component(*alpha).map_err(err)?, g).map_err(err)?;
            let right = cat.compose(g, &f.component(*beta).map_err(err)?).map_err(err)?;
            if !cat.equal(&left, &y.bond(*beta, *alpha).map_err(err)?)
                || !cat.equal(&right, &x.bond(*beta, *alpha).map_err(err)?)
            {
                return Err(format!("g is not an inverse up to bonds at α={}, β={}", alpha, beta));
            }
            Ok(())
        }
        _ => Err("not a level entry".into()),
    }
}

/// `ρ: X_β → Z_γ` with `Q^c ρ = ρ` for the period bond of `Z` at `γ`, and
/// `p(Z)^γ_α ρ = target`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn replay_family(
    z: &InverseSystem,
    alpha: usize,
    target: Morphism,
    beta: usize,
    gamma: usize,
    cycles: usize,
    rho: &Morphism,
    x: &InverseSystem,
) -> Result<(), String> {
    let t = z.tower_index().ok_or("families live on towers")?;
    if gamma < t.prefix_len || gamma < alpha || cycles == 0 {
        return Err(format!("γ={} must lie in the tail and above α={}, with at least one cycle", gamma, alpha));
    }
    let cat = z.category();
    witness(cat, rho, x.object(beta), z.object(gamma))?;
    let q = z.bond(gamma + cycles * t.tail_period, gamma).map_err(err)?;
    if !cat.equal(&cat.compose(&q, rho).map_err(err)?, rho) {
        return Err("ρ is not fixed by the period bond".into());
    }
    let down = cat.compose(&z.bond(gamma, alpha).map_err(err)?, rho).map_err(err)?;
    if !cat.equal(&down, &target) {
        return Err(format!("p^γ_α∘ρ differs from the required projection at α={}", alpha));
    }
    Ok(())
}

fn replay_lifts(x: &InverseSystem, alpha: usize, beta: usize, lifts: &[Lift], horizon: usize) -> Result<(), String> {
    if beta <= alpha {
        return Err(format!("β={} must exceed α={}", beta, alpha));
    }
    let cat = x.category();
    let target = x.bond(beta, alpha).map_err(err)?;
    for gamma in beta + 1..=horizon.max(beta + 1) {
        let l = lifts.iter().find(|l| l.gamma == gamma).ok_or_else(|| format!("no lift for γ={}", gamma))?;
        witness(cat, &l.r, x.object(beta), x.object(gamma))?;
        let down = cat.compose(&x.bond(gamma, alpha).map_err(err)?, &l.r).map_err(err)?;
        if !cat.equal(&down, &target) {
            return Err(format!("lift at γ={} does not cover p^β_α", gamma));
        }
    }
    Ok(())
}
