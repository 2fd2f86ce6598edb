use super::level::{check_bimorphism, find_beta, pair_test, Cond};
use super::Verdict;
use crate::prosys::{subtower, LevelMorphism, ProError, SubtowerSelector};

fn least(f: &LevelMorphism, cond: Cond, alpha: usize, horizon: usize) -> Result<Option<usize>, ProError> {
    Ok(find_beta(f, cond, alpha, alpha + horizon)?.map(|e| match e {
        super::Entry::Mono { beta, .. } | super::Entry::Epi { beta, .. } => beta,
        _ => unreachable!(),
    }))
}

/// A subtower `X_s → Y_s` on which `f` is a bimorphism level by level: each step satisfies
/// the mono cancellation for `f_{s(n+1)}` and the epi cancellation for `f_{s(n)}` against
/// the bond `s(n+1) → s(n)`.
///
/// `s(0) = 0` and `s(n+1)` is the larger of the least mono and epi indices above `s(n)`.
/// For a periodic tail the next value only depends on `s(n)` modulo the period, so the
/// sequence repeats once a residue does. `Ok(None)` when a search runs out of horizon or
/// the bimorphism verdict is unknown.
pub fn extract_bimorphic_subtower(
    f: &LevelMorphism,
    horizon: usize,
) -> Result<Option<(SubtowerSelector, LevelMorphism)>, ProError> {
    let t = *f
        .index()
        .as_tower()
        .ok_or_else(|| ProError::Unsupported("bimorphic subtowers are extracted from towers".into()))?;
    match check_bimorphism(f, horizon)? {
        Verdict::Holds(_) => {}
        Verdict::Fails(cw) => return Err(ProError::Invalid(format!("not a bimorphism: {}", cw))),
        Verdict::Unknown(_) => return Ok(None),
    }
    let (l, p) = (t.prefix_len, t.tail_period);
    let mut s = vec![0usize];
    let selector = loop {
        let cur = *s.last().unwrap();
        let (Some(m), Some(e)) = (least(f, Cond::Mono, cur, horizon)?, least(f, Cond::Epi, cur, horizon)?) else {
            return Ok(None);
        };
        let next = m.max(e).max(cur + 1);
        s.push(next);
        let n = s.len() - 1;
        if next < l {
            continue;
        }
        let earlier = (0..n).find(|&k| s[k] >= l && (next - s[k]) % p == 0);
        if let Some(k) = earlier {
            let steps = (k..n).map(|i| s[i + 1] - s[i]).collect();
            break SubtowerSelector::new(s[..=k].to_vec(), steps)?;
        }
        if s.len() > l + p + 2 {
            return Ok(None);
        }
    };
    let xs = subtower(f.source(), &selector)?;
    let ys = subtower(f.target(), &selector)?;
    let idx = xs.tower_index().unwrap();
    let comps = (0..idx.stored()).map(|n| f.component(selector.at(n))).collect::<Result<_, _>>()?;
    let fs = LevelMorphism::new(xs, ys, comps, f.tail())?;
    fs.validate().map_err(ProError::Violation)?;
    for n in 0..idx.stored() + idx.tail_period {
        if pair_test(&fs, Cond::Mono, n, n + 1)?.is_none() || pair_test(&fs, Cond::Epi, n, n + 1)?.is_none() {
            return Err(ProError::Invalid(format!("extracted subtower fails the bimorphism conditions at step {}", n)));
        }
    }
    Ok(Some((selector, fs)))
}
