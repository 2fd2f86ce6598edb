use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::subtower::{greedy_sequence, Greedy};
use super::{Index, InverseSystem, PosetIndex, ProError, SubtowerSelector, TowerIndex, Violation, ViolationKind};
use crate::categories::{Category, Morphism};

/// How the components of a tower morphism continue past the stored levels.
///
/// `Periodic`: `f_{n+P} = f_n`. `Anchored`: `f_{n+P} = f_n ∘ p(X)^{n+P}_n`, which covers
/// families such as `f_n = 2^n` out of the dyadic tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tail {
    Periodic,
    Anchored,
}

/// A morphism between systems over the same index, given componentwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelMorphism {
    source: InverseSystem,
    target: InverseSystem,
    components: Vec<Morphism>,
    tail: Tail,
}

impl LevelMorphism {
    pub fn new(
        source: InverseSystem,
        target: InverseSystem,
        components: Vec<Morphism>,
        tail: Tail,
    ) -> Result<Self, ProError> {
        if source.category() != target.category() {
            return Err(ProError::Invalid("source and target live in different categories".into()));
        }
        if source.index() != target.index() {
            return Err(ProError::Invalid("a level morphism needs source and target over the same index".into()));
        }
        let n = source.index().stored();
        if components.len() != n {
            return Err(ProError::Invalid(format!("expected {} components, got {}", n, components.len())));
        }
        let cat = source.category().clone();
        for (a, c) in components.iter().enumerate() {
            cat.check_morphism(c)?;
            if cat.source(c) != *source.object(a) || cat.target(c) != *target.object(a) {
                return Err(ProError::Invalid(format!(
                    "component at {} does not go from X to Y at that level",
                    source.index().label(a)
                )));
            }
        }
        Ok(LevelMorphism { source, target, components, tail })
    }

    pub fn identity(x: &InverseSystem) -> Result<Self, ProError> {
        let comps = (0..x.index().stored()).map(|a| x.category().identity(x.object(a))).collect::<Result<_, _>>()?;
        Self::new(x.clone(), x.clone(), comps, Tail::Periodic)
    }

    pub fn source(&self) -> &InverseSystem {
        &self.source
    }

    pub fn target(&self) -> &InverseSystem {
        &self.target
    }

    pub fn category(&self) -> &Category {
        self.source.category()
    }

    pub fn index(&self) -> &Index {
        self.source.index()
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn components(&self) -> &[Morphism] {
        &self.components
    }

    /// `f_a` for any level `a`.
    pub fn component(&self, a: usize) -> Result<Morphism, ProError> {
        match self.index() {
            Index::Poset(_) => Ok(self.components[a].clone()),
            Index::Tower(t) => {
                if a < t.stored() || self.tail == Tail::Periodic {
                    return Ok(self.components[t.slot(a)].clone());
                }
                let base = t.slot(a);
                let f = &self.components[base];
                Ok(self.category().compose(f, &self.source.bond(a, base)?)?)
            }
        }
    }

    /// Check `p(Y)^β_α ∘ f_β = f_α ∘ p(X)^β_α`: on consecutive levels through one period for
    /// towers (which propagates along the tail), on all pairs for posets.
    pub fn validate(&self) -> Result<(), Violation> {
        let cat = self.category();
        let err = |e: ProError| Violation { kind: ViolationKind::Shape, message: e.to_string(), triple: None };
        let pairs: Vec<(usize, usize)> = match self.index() {
            Index::Tower(t) => (0..t.stored()).map(|n| (n + 1, n)).collect(),
            Index::Poset(p) => {
                let n = p.len();
                (0..n).flat_map(|b| (0..n).map(move |a| (b, a))).filter(|&(b, a)| a != b && p.leq(a, b)).collect()
            }
        };
        for (b, a) in pairs {
            let left = cat
                .compose(&self.target.bond(b, a).map_err(err)?, &self.component(b).map_err(err)?)
                .map_err(|e| err(e.into()))?;
            let right = cat
                .compose(&self.component(a).map_err(err)?, &self.source.bond(b, a).map_err(err)?)
                .map_err(|e| err(e.into()))?;
            if !cat.equal(&left, &right) {
                return Err(Violation {
                    kind: ViolationKind::NotLevel,
                    message: format!(
                        "square between levels {} and {} does not commute",
                        self.index().label(a),
                        self.index().label(b)
                    ),
                    triple: None,
                });
            }
        }
        Ok(())
    }

    /// Same morphism stored over a longer prefix and a multiple of the period.
    pub fn reperiod(&self, prefix_len: usize, tail_period: usize) -> Result<Self, ProError> {
        let source = self.source.reperiod(prefix_len, tail_period)?;
        let target = self.target.reperiod(prefix_len, tail_period)?;
        let comps = (0..prefix_len + tail_period).map(|n| self.component(n)).collect::<Result<_, _>>()?;
        Self::new(source, target, comps, self.tail)
    }

    /// `g ∘ f`, levelwise.
    pub fn compose(g: &LevelMorphism, f: &LevelMorphism) -> Result<LevelMorphism, ProError> {
        if f.target != g.source {
            return Err(ProError::Invalid("level morphisms are not composable".into()));
        }
        let cat = f.category();
        let comps = (0..f.index().stored())
            .map(|n| Ok(cat.compose(&g.component(n)?, &f.component(n)?)?))
            .collect::<Result<_, ProError>>()?;
        let tail = if f.tail == Tail::Periodic && g.tail == Tail::Periodic { Tail::Periodic } else { Tail::Anchored };
        Self::new(f.source.clone(), g.target.clone(), comps, tail)
    }

    /// Bring two tower morphisms to a common storage layout.
    pub fn align(f: &LevelMorphism, g: &LevelMorphism) -> Result<(LevelMorphism, LevelMorphism), ProError> {
        match (f.index(), g.index()) {
            (Index::Tower(a), Index::Tower(b)) => {
                let j = a.join(b);
                Ok((f.reperiod(j.prefix_len, j.tail_period)?, g.reperiod(j.prefix_len, j.tail_period)?))
            }
            _ => Ok((f.clone(), g.clone())),
        }
    }
}

/// A representative `X_from → Y_α` of the component of a pro-morphism at `α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Representative {
    pub from: usize,
    pub map: Morphism,
}

/// Tail rule of a pro-morphism between towers: past the stored target levels,
/// `σ(α+P) = σ(α) + shift`, and the representative either repeats or is precomposed with
/// the source bond `p^{σ(α)+shift}_{σ(α)}` (anchored).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProTail {
    pub shift: usize,
    pub anchored: bool,
}

/// A morphism of pro-objects given by one representative per target index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProMorphism {
    source: InverseSystem,
    target: InverseSystem,
    reps: Vec<Representative>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<ProTail>,
}

impl ProMorphism {
    pub fn new(
        source: InverseSystem,
        target: InverseSystem,
        reps: Vec<Representative>,
        tail: Option<ProTail>,
    ) -> Result<Self, ProError> {
        if source.category() != target.category() {
            return Err(ProError::Invalid("source and target live in different categories".into()));
        }
        if reps.len() != target.index().stored() {
            return Err(ProError::Invalid(format!(
                "expected {} representatives, got {}",
                target.index().stored(),
                reps.len()
            )));
        }
        match (source.index(), target.index(), tail) {
            (Index::Tower(xs), Index::Tower(ys), Some(t)) => {
                if !t.anchored {
                    if t.shift % xs.tail_period != 0 {
                        return Err(ProError::Invalid(format!(
                            "periodic representatives need a shift divisible by the source period {}",
                            xs.tail_period
                        )));
                    }
                    for r in &reps[ys.prefix_len..] {
                        if r.from < xs.prefix_len {
                            return Err(ProError::Invalid(
                                "periodic representatives in the tail must start in the source tail".into(),
                            ));
                        }
                    }
                }
            }
            (Index::Poset(_), Index::Poset(_), None) | (Index::Tower(_), Index::Poset(_), None) => {}
            (Index::Poset(_), Index::Tower(_), _) => {
                return Err(ProError::Unsupported("morphisms from a poset system to a tower".into()))
            }
            _ => return Err(ProError::Invalid("tower targets need a tail rule, poset targets none".into())),
        }
        let f = ProMorphism { source, target, reps, tail };
        let cat = f.source.category().clone();
        for a in 0..f.target.index().stored() {
            let (from, m) = (f.reps[a].from, &f.reps[a].map);
            cat.check_morphism(m)?;
            if let Index::Poset(p) = f.source.index() {
                if from >= p.len() {
                    return Err(ProError::Invalid(format!("representative index {} out of range", from)));
                }
            }
            if cat.source(m) != *f.source.object(from) || cat.target(m) != *f.target.object(a) {
                return Err(ProError::Invalid(format!(
                    "representative at {} does not go from X_{} to Y_{}",
                    f.target.index().label(a),
                    f.source.index().label(from),
                    f.target.index().label(a)
                )));
            }
        }
        Ok(f)
    }

    pub fn from_level(f: &LevelMorphism) -> Self {
        let reps = f.components().iter().enumerate().map(|(a, m)| Representative { from: a, map: m.clone() }).collect();
        let tail = f.index().as_tower().map(|t| ProTail { shift: t.tail_period, anchored: f.tail() == Tail::Anchored });
        ProMorphism { source: f.source().clone(), target: f.target().clone(), reps, tail }
    }

    /// A morphism from an object (as a constant tower) into a tower, `σ(n) = n`.
    pub fn from_object(
        category: Category,
        object: crate::categories::Object,
        target: InverseSystem,
        maps: Vec<Morphism>,
    ) -> Result<Self, ProError> {
        let t = target.tower_index().ok_or_else(|| ProError::Unsupported("object into a poset system".into()))?;
        let source = InverseSystem::constant(category, object)?;
        let reps = maps.into_iter().enumerate().map(|(a, map)| Representative { from: a, map }).collect();
        Self::new(source, target, reps, Some(ProTail { shift: t.tail_period, anchored: false }))
    }

    pub fn source(&self) -> &InverseSystem {
        &self.source
    }

    pub fn target(&self) -> &InverseSystem {
        &self.target
    }

    pub fn category(&self) -> &Category {
        self.source.category()
    }

    pub fn representatives(&self) -> &[Representative] {
        &self.reps
    }

    pub fn tail(&self) -> Option<ProTail> {
        self.tail
    }

    /// `σ(α)`.
    pub fn sigma(&self, a: usize) -> usize {
        match (self.target.index(), self.tail) {
            (Index::Tower(t), Some(tail)) if a >= t.stored() => {
                let k = (a - t.prefix_len) / t.tail_period;
                self.reps[t.slot(a)].from + k * tail.shift
            }
            _ => self.reps[a].from,
        }
    }

    /// The representative `X_{σ(α)} → Y_α`.
    pub fn rep(&self, a: usize) -> Result<Morphism, ProError> {
        match (self.target.index(), self.tail) {
            (Index::Tower(t), Some(tail)) if a >= t.stored() => {
                let base = &self.reps[t.slot(a)];
                if tail.anchored {
                    let s = self.sigma(a);
                    Ok(self.category().compose(&base.map, &self.source.bond(s, base.from)?)?)
                } else {
                    Ok(base.map.clone())
                }
            }
            _ => Ok(self.reps[a].map.clone()),
        }
    }

    /// The representative at `α` pushed down from level `λ >= σ(α)`.
    pub fn rep_at(&self, a: usize, lambda: usize) -> Result<Morphism, ProError> {
        let s = self.sigma(a);
        Ok(self.category().compose(&self.rep(a)?, &self.source.bond(lambda, s)?)?)
    }

    /// Whether `p(Y)^β_α ∘ f_β` and `f_α` agree once pushed to level `λ`.
    pub fn compatible_at(&self, beta: usize, a: usize, lambda: usize) -> Result<bool, ProError> {
        let cat = self.category();
        let left = cat.compose(&self.target.bond(beta, a)?, &self.rep_at(beta, lambda)?)?;
        Ok(cat.equal(&left, &self.rep_at(a, lambda)?))
    }

    /// Check compatibility for target pairs up to the horizon, pushing each pair to the
    /// first level where both representatives are defined and, failing that, deeper up to
    /// `horizon` further levels.
    pub fn check_compatible(&self, horizon: usize) -> Result<(), ProError> {
        let pairs: Vec<(usize, usize)> = match self.target.index() {
            Index::Tower(_) => (0..horizon).map(|n| (n + 1, n)).collect(),
            Index::Poset(p) => {
                let n = p.len();
                (0..n).flat_map(|b| (0..n).map(move |a| (b, a))).filter(|&(b, a)| a != b && p.leq(a, b)).collect()
            }
        };
        for (b, a) in pairs {
            let ok = match self.source.index() {
                Index::Tower(_) => {
                    let start = self.sigma(a).max(self.sigma(b));
                    let mut found = false;
                    for lambda in start..=start + horizon {
                        if self.compatible_at(b, a, lambda)? {
                            found = true;
                            break;
                        }
                    }
                    found
                }
                Index::Poset(p) => {
                    let (sa, sb) = (self.sigma(a), self.sigma(b));
                    let mut found = false;
                    for lambda in p.linear_extension() {
                        if p.leq(sa, lambda) && p.leq(sb, lambda) && self.compatible_at(b, a, lambda)? {
                            found = true;
                            break;
                        }
                    }
                    found
                }
            };
            if !ok {
                return Err(ProError::Unresolved {
                    horizon,
                    message: format!(
                        "representatives at {} and {} never agree",
                        self.target.index().label(a),
                        self.target.index().label(b)
                    ),
                });
            }
        }
        Ok(())
    }
}

/// A level form of a pro-morphism.
///
/// For towers the new source is the subtower `X_s` and the target is unchanged (up to
/// storage layout); `selector` records `s`. For posets the new index consists of the pairs
/// `(λ, μ)` listed in `pairs`, with `X'_{(λ,μ)} = X_λ` and `Y'_{(λ,μ)} = Y_μ`.
#[derive(Clone, Debug)]
pub struct Levelized {
    pub level: LevelMorphism,
    pub selector: Option<SubtowerSelector>,
    pub pairs: Option<Vec<(usize, usize)>>,
}

/// Reindex a pro-morphism into a level morphism.
///
/// Towers: `s(n)` is the smallest level `>= max(σ(n), s(n-1)+1)` at which the
/// representatives at `n-1` and `n` agree, and `f'_n = f_n ∘ p^{s(n)}_{σ(n)}`. The tail of
/// `s` is found by watching `s(n) - σ(n)` until it repeats over a whole period.
pub fn levelize(f: &ProMorphism, horizon: usize) -> Result<Levelized, ProError> {
    match (f.source.index(), f.target.index()) {
        (Index::Tower(xs), Index::Tower(ys)) => levelize_tower(f, *xs, *ys, horizon),
        (_, Index::Poset(p)) => levelize_poset(f, p),
        _ => Err(ProError::Unsupported("levelizing a morphism from a poset system into a tower".into())),
    }
}

fn is_already_level(f: &ProMorphism, ys: TowerIndex) -> bool {
    f.source.index() == f.target.index()
        && f.tail.is_some_and(|t| t.shift == ys.tail_period)
        && f.reps.iter().enumerate().all(|(a, r)| r.from == a)
}

fn levelize_tower(f: &ProMorphism, xs: TowerIndex, ys: TowerIndex, horizon: usize) -> Result<Levelized, ProError> {
    let tail = f.tail.expect("tower targets carry a tail rule");
    if is_already_level(f, ys) {
        let tail_kind = if tail.anchored { Tail::Anchored } else { Tail::Periodic };
        let comps = f.reps.iter().map(|r| r.map.clone()).collect();
        let level = LevelMorphism::new(f.source.clone(), f.target.clone(), comps, tail_kind)?;
        level.validate().map_err(|v| ProError::Unresolved { horizon, message: v.message })?;
        return Ok(Levelized { level, selector: Some(SubtowerSelector::identity()), pairs: None });
    }
    // σ may stay below the source prefix forever (a projection onto an early level); the
    // selector is then started at the prefix instead.
    let base = |n: usize| f.sigma(n).max(xs.prefix_len);
    let steady = ys.prefix_len;
    let mut ok = |n: usize, t: usize| -> Result<bool, ProError> { Ok(n == 0 || f.compatible_at(n, n - 1, t)?) };
    let selector = match greedy_sequence(&base, steady, ys.tail_period, horizon, &mut ok)? {
        Greedy::Found(s) => s,
        Greedy::Stuck(n) => {
            return Err(ProError::Unresolved {
                horizon,
                message: format!("representatives at {} and {} never agree", n - 1, n),
            })
        }
        Greedy::NoPattern => {
            return Err(ProError::Unresolved {
                horizon,
                message: "reindexing does not settle into a periodic pattern".into(),
            })
        }
    };
    let sub = super::subtower(&f.source, &selector)?;
    let sub_idx = sub.tower_index().unwrap();
    let joint = sub_idx.join(&ys);
    let sub = sub.reperiod(joint.prefix_len, joint.tail_period)?;
    let target = f.target.reperiod(joint.prefix_len, joint.tail_period)?;
    let cat = f.category();
    let comps = (0..joint.stored())
        .map(|n| {
            let sn = selector.at(n);
            Ok(cat.compose(&f.rep(n)?, &f.source.bond(sn, f.sigma(n))?)?)
        })
        .collect::<Result<_, ProError>>()?;
    let tail_kind = if tail.anchored { Tail::Anchored } else { Tail::Periodic };
    let level = LevelMorphism::new(sub, target, comps, tail_kind)?;
    level.validate().map_err(|v| ProError::Unresolved { horizon, message: v.message })?;
    Ok(Levelized { level, selector: Some(selector), pairs: None })
}

fn levelize_poset(f: &ProMorphism, yp: &PosetIndex) -> Result<Levelized, ProError> {
    let cat = f.category().clone();
    let lambdas: Vec<usize> = match f.source.index() {
        Index::Poset(p) => p.linear_extension(),
        Index::Tower(_) => return Err(ProError::Unsupported("levelizing a tower-to-poset morphism".into())),
    };
    let xp = f.source.poset_index().unwrap();
    // (λ, μ) belongs to the new index when λ >= σ(μ) and every representative below μ agrees
    // with the one at μ once pushed to λ.
    let mut pairs = Vec::new();
    for &mu in &yp.linear_extension() {
        for &lambda in &lambdas {
            if !xp.leq(f.sigma(mu), lambda) {
                continue;
            }
            let mut ok = true;
            for nu in 0..yp.len() {
                if nu != mu && yp.leq(nu, mu) && !(xp.leq(f.sigma(nu), lambda) && f.compatible_at(mu, nu, lambda)?) {
                    ok = false;
                    break;
                }
            }
            if ok {
                pairs.push((lambda, mu));
            }
        }
    }
    let n = pairs.len();
    let labels: Vec<String> = pairs.iter().map(|&(l, m)| format!("({},{})", xp.label(l), yp.label(m))).collect();
    let mut leq = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            leq[i][j] = xp.leq(pairs[i].0, pairs[j].0) && yp.leq(pairs[i].1, pairs[j].1);
        }
    }
    let index = PosetIndex::new(labels, leq).map_err(ProError::Violation)?;
    let mut xb = BTreeMap::new();
    let mut yb = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && index.leq(i, j) {
                xb.insert((j, i), f.source.bond(pairs[j].0, pairs[i].0)?);
                yb.insert((j, i), f.target.bond(pairs[j].1, pairs[i].1)?);
            }
        }
    }
    let xo = pairs.iter().map(|&(l, _)| f.source.object(l).clone()).collect();
    let yo = pairs.iter().map(|&(_, m)| f.target.object(m).clone()).collect();
    let source = InverseSystem::poset(cat.clone(), index.clone(), xo, xb)?;
    let target = InverseSystem::poset(cat.clone(), index, yo, yb)?;
    let comps = pairs.iter().map(|&(l, m)| f.rep_at(m, l)).collect::<Result<_, _>>()?;
    let level = LevelMorphism::new(source, target, comps, Tail::Periodic)?;
    Ok(Levelized { level, selector: None, pairs: Some(pairs) })
}
