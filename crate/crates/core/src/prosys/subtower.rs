use serde::{Deserialize, Serialize};

use super::{levelize, InverseSystem, LevelMorphism, ProError, ProMorphism, ProTail, Representative, TowerIndex};

/// A strictly increasing sequence `s: ℕ → ℕ`, given by an explicit prefix followed by
/// steps that repeat cyclically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubtowerSelector {
    prefix: Vec<usize>,
    tail_steps: Vec<usize>,
}

impl SubtowerSelector {
    pub fn new(prefix: Vec<usize>, tail_steps: Vec<usize>) -> Result<Self, ProError> {
        if prefix.is_empty() {
            return Err(ProError::Invalid("a selector needs at least one explicit value".into()));
        }
        if tail_steps.is_empty() || tail_steps.contains(&0) {
            return Err(ProError::Invalid("selector steps must be positive".into()));
        }
        if prefix.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ProError::Invalid(format!("selector {:?} is not strictly increasing", prefix)));
        }
        Ok(SubtowerSelector { prefix, tail_steps })
    }

    pub fn identity() -> Self {
        SubtowerSelector { prefix: vec![0], tail_steps: vec![1] }
    }

    pub fn evens() -> Self {
        SubtowerSelector { prefix: vec![0], tail_steps: vec![2] }
    }

    /// `n ↦ 2n + 1`.
    pub fn odds() -> Self {
        SubtowerSelector { prefix: vec![1], tail_steps: vec![2] }
    }

    /// `n ↦ n + d`.
    pub fn shifted(d: usize) -> Self {
        SubtowerSelector { prefix: vec![d], tail_steps: vec![1] }
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn tail_steps(&self) -> &[usize] {
        &self.tail_steps
    }

    pub fn at(&self, n: usize) -> usize {
        let last = self.prefix.len() - 1;
        if n <= last {
            return self.prefix[n];
        }
        let k = n - last;
        let len = self.tail_steps.len();
        let full: usize = self.tail_steps.iter().sum();
        let partial: usize = self.tail_steps[..k % len].iter().sum();
        self.prefix[last] + (k / len) * full + partial
    }

    pub fn is_identity(&self) -> bool {
        (0..self.prefix.len() + self.tail_steps.len()).all(|n| self.at(n) == n)
    }

    /// Index of the subtower `X_s`: data repeats once `s` is in the tail of `X` and the
    /// accumulated steps are a multiple of the period of `X`.
    pub fn subtower_index(&self, x: TowerIndex) -> TowerIndex {
        let start = (0..).find(|&n| self.at(n) >= x.prefix_len).unwrap();
        let prefix_len = (self.prefix.len() - 1).max(start);
        let sum: usize = self.tail_steps.iter().sum();
        let cycles = x.tail_period / num_integer::gcd(sum, x.tail_period);
        TowerIndex { prefix_len, tail_period: self.tail_steps.len() * cycles }
    }

    /// `s(n + P') - s(n)` in the tail, where `P'` is the subtower period.
    fn shift(&self, x: TowerIndex) -> usize {
        let idx = self.subtower_index(x);
        self.at(idx.prefix_len + idx.tail_period) - self.at(idx.prefix_len)
    }
}

/// `X_s`: objects `X_{s(n)}` with bonds `p^{s(n+1)}_{s(n)}`.
pub fn subtower(x: &InverseSystem, s: &SubtowerSelector) -> Result<InverseSystem, ProError> {
    let t = x.tower_index().ok_or_else(|| ProError::Unsupported("subtower of a poset system".into()))?;
    let idx = s.subtower_index(t);
    let objects = (0..idx.stored()).map(|n| x.object(s.at(n)).clone()).collect();
    let steps = (0..idx.stored()).map(|n| x.bond(s.at(n + 1), s.at(n))).collect::<Result<_, _>>()?;
    InverseSystem::tower(x.category().clone(), idx, objects, steps)
}

/// `X → X_s`, with identity representatives `X_{s(n)} → (X_s)_n`.
pub fn projection_morphism(x: &InverseSystem, s: &SubtowerSelector) -> Result<ProMorphism, ProError> {
    let t = x.tower_index().ok_or_else(|| ProError::Unsupported("subtower of a poset system".into()))?;
    let target = subtower(x, s)?;
    let cat = x.category();
    let reps = (0..target.index().stored())
        .map(|n| Ok(Representative { from: s.at(n), map: cat.identity(x.object(s.at(n)))? }))
        .collect::<Result<_, ProError>>()?;
    ProMorphism::new(x.clone(), target, reps, Some(ProTail { shift: s.shift(t), anchored: false }))
}

/// `X_s → X`: level `α` is represented by `p^{s(n)}_α` out of the first `n` with
/// `s(n) >= α`. The target is `X` stored with the period of the subtower.
pub fn section_morphism(x: &InverseSystem, s: &SubtowerSelector) -> Result<ProMorphism, ProError> {
    let t = x.tower_index().ok_or_else(|| ProError::Unsupported("subtower of a poset system".into()))?;
    let source = subtower(x, s)?;
    let sub = source.tower_index().unwrap();
    let shift = s.shift(t);
    let target = x.reperiod(t.prefix_len.max(s.at(sub.prefix_len)), shift)?;
    let reps = (0..target.index().stored())
        .map(|a| {
            let n = (0..).find(|&n| s.at(n) >= a).unwrap();
            Ok(Representative { from: n, map: x.bond(s.at(n), a)? })
        })
        .collect::<Result<_, ProError>>()?;
    ProMorphism::new(source, target, reps, Some(ProTail { shift: sub.tail_period, anchored: false }))
}

/// Outcome of a greedy search for an increasing sequence.
pub(crate) enum Greedy {
    Found(SubtowerSelector),
    /// No admissible value within the horizon at this position.
    Stuck(usize),
    /// The offsets never settled into a periodic pattern.
    NoPattern,
}

/// Build `t(n)`, the smallest value `>= max(base(n), t(n-1)+1)` accepted by `ok`, searching
/// `horizon` values past the lower bound. `base` must satisfy `base(n+period) = base(n)+c`
/// from `steady` on, and `ok` must be invariant under that shift; then a repeat of the
/// offsets `t(n) - base(n)` over two consecutive periods fixes the rest of the sequence.
pub(crate) fn greedy_sequence(
    base: &dyn Fn(usize) -> usize,
    steady: usize,
    period: usize,
    horizon: usize,
    ok: &mut dyn FnMut(usize, usize) -> Result<bool, ProError>,
) -> Result<Greedy, ProError> {
    let mut t: Vec<usize> = Vec::new();
    let mut off: Vec<usize> = Vec::new();
    let budget = steady + period * (horizon + 3);
    let mut n = 0;
    loop {
        let lower = if n == 0 { base(0) } else { base(n).max(t[n - 1] + 1) };
        let mut chosen = None;
        for cand in lower..=lower + horizon {
            if ok(n, cand)? {
                chosen = Some(cand);
                break;
            }
        }
        let Some(c) = chosen else { return Ok(Greedy::Stuck(n)) };
        t.push(c);
        off.push(c - base(n));
        n += 1;
        if n >= steady + 2 * period && (n - steady).is_multiple_of(period) {
            let k = n - 2 * period;
            if (0..period).all(|i| off[k + i] == off[k + period + i]) {
                let prefix = t[..=k].to_vec();
                let steps = (k..k + period).map(|i| t[i + 1] - t[i]).collect();
                return Ok(Greedy::Found(SubtowerSelector::new(prefix, steps)?));
            }
            // A slower base (a constant one, say) leaves the offsets growing while the
            // increments repeat. Callers validate what such a pattern produces.
            if n > steady + 3 * period {
                let k = n - 1 - 3 * period;
                let d = |i: usize| t[i + 1] - t[i];
                if (0..2 * period).all(|i| d(k + i) == d(k + period + i)) {
                    let prefix = t[..=k].to_vec();
                    let steps = (k..k + period).map(d).collect();
                    return Ok(Greedy::Found(SubtowerSelector::new(prefix, steps)?));
                }
            }
        }
        if n > budget {
            return Ok(Greedy::NoPattern);
        }
    }
}

/// A subtower `X_s` and a level morphism `g: X_s → Y` with `g ∘ p(X)_s = f`.
pub fn factor_through_subtower(f: &ProMorphism, horizon: usize) -> Result<(SubtowerSelector, LevelMorphism), ProError> {
    if !f.source().is_tower() || !f.target().is_tower() {
        return Err(ProError::Unsupported("factoring through a subtower needs towers".into()));
    }
    let lv = levelize(f, horizon)?;
    Ok((lv.selector.expect("tower levelization records its selector"), lv.level))
}

/// Given level morphisms `g, h: X_s → Y` and `f: Y → Z` with `f∘g` and `f∘h` equal as
/// pro-morphisms, find `t` with `t(n) >= s(n)` and
/// `f_n ∘ g_n ∘ p^{t(n)}_{s(n)} = f_n ∘ h_n ∘ p^{t(n)}_{s(n)}` for every `n`.
/// Each `t(n)` is the smallest admissible index. `None` when the horizon runs out.
pub fn equalize_on_subtower(
    x: &InverseSystem,
    s: &SubtowerSelector,
    f: &LevelMorphism,
    g: &LevelMorphism,
    h: &LevelMorphism,
    horizon: usize,
) -> Result<Option<SubtowerSelector>, ProError> {
    let xt = x.tower_index().ok_or_else(|| ProError::Unsupported("equalizing over a poset system".into()))?;
    if g.target() != f.source() || h.target() != f.source() || g.source() != h.source() {
        return Err(ProError::Invalid("f, g, h are not composable as f∘g and f∘h".into()));
    }
    let xs = subtower(x, s)?;
    let gt = g.index().as_tower().copied().ok_or_else(|| ProError::Unsupported("poset level morphisms".into()))?;
    if xs.tower_index().map(|i| i.join(&gt)) != Some(gt)
        || (0..gt.stored()).any(|n| g.source().object(n) != xs.object(n))
    {
        return Err(ProError::Invalid("g and h must start at the subtower X_s".into()));
    }
    let cat = x.category().clone();
    let fg: Vec<_> = (0..gt.stored())
        .map(|n| Ok(cat.compose(&f.component(n)?, &g.component(n)?)?))
        .collect::<Result<_, ProError>>()?;
    let fh: Vec<_> = (0..gt.stored())
        .map(|n| Ok(cat.compose(&f.component(n)?, &h.component(n)?)?))
        .collect::<Result<_, ProError>>()?;
    if fg.iter().zip(&fh).all(|(a, b)| cat.equal(a, b)) {
        return Ok(Some(s.clone()));
    }
    let steady = (0..).find(|&n| n >= gt.prefix_len && s.at(n) >= xt.prefix_len).unwrap();
    let period = gt.tail_period;
    let base = |n: usize| s.at(n);
    let mut ok = |n: usize, cand: usize| -> Result<bool, ProError> {
        let p = x.bond(cand, s.at(n))?;
        let slot = gt.slot(n);
        Ok(cat.equal(&cat.compose(&fg[slot], &p)?, &cat.compose(&fh[slot], &p)?))
    };
    match greedy_sequence(&base, steady, period, horizon, &mut ok)? {
        Greedy::Found(t) => Ok(Some(t)),
        Greedy::Stuck(_) | Greedy::NoPattern => Ok(None),
    }
}

/// The canonical data of `X → Sub₂(X)`: for each index `α` the projection `X → X_α`,
/// represented by `p^β_α` out of any `β >= α`.
#[derive(Clone, Debug)]
pub struct Sub2 {
    system: InverseSystem,
}

impl Sub2 {
    pub fn system(&self) -> &InverseSystem {
        &self.system
    }

    /// Representative `p^β_α` of the projection at `α`.
    pub fn projection(&self, alpha: usize, beta: usize) -> Result<crate::categories::Morphism, ProError> {
        self.system.bond(beta, alpha)
    }

    /// The projection at `α` as a pro-morphism from a tower `X` to the constant system on `X_α`.
    pub fn projection_morphism(&self, alpha: usize) -> Result<ProMorphism, ProError> {
        let t = self
            .system
            .tower_index()
            .ok_or_else(|| ProError::Unsupported("projections of a poset system onto a constant tower".into()))?;
        let cat = self.system.category().clone();
        let target = InverseSystem::constant(cat.clone(), self.system.object(alpha).clone())?;
        let map = cat.identity(self.system.object(alpha))?;
        // A zero shift keeps the representative fixed; below the tail of X that only type
        // checks as an anchored tail.
        let tail = ProTail { shift: 0, anchored: alpha < t.prefix_len };
        ProMorphism::new(self.system.clone(), target, vec![Representative { from: alpha, map }], Some(tail))
    }
}

pub fn sub2(x: &InverseSystem) -> Sub2 {
    Sub2 { system: x.clone() }
}
