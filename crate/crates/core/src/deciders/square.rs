use super::certificate::Entry;
use super::level::{check_epi, check_mono, check_strong_epi, check_strong_mono};
use super::Verdict;
use crate::categories::Morphism;
use crate::prosys::{Index, LevelMorphism, ProError, ProMorphism, ProTail, Representative, Tail};

/// Which pair of hypotheses produces the diagonal filler.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FillMode {
    /// `f'` epi and `f` strong mono: `u_α = r_α ∘ g_{β(α)}` with `r_α ∘ f_{β(α)} = p(X)`.
    StrongMonoEpi,
    /// `f'` strong epi and `f` mono: `u_α = p(X)^{e}_α ∘ g'_e ∘ s_e` with `e = e(α)` from the
    /// cancellation of `f` and `f'_e ∘ s_e = p(T)`.
    MonoStrongEpi,
}

/// Per-`α` data `(β, morphism)` read off a certificate, indexed by `α`.
fn by_alpha(v: Verdict, n: usize) -> Option<Vec<(usize, Option<Morphism>)>> {
    let cert = match v {
        Verdict::Holds(c) => c,
        _ => return None,
    };
    let mut out = vec![None; n];
    for e in cert.entries {
        match e {
            Entry::Mono { alpha, beta } => out[alpha] = Some((beta, None)),
            Entry::StrongMono { alpha, beta, g } | Entry::StrongEpi { alpha, beta, g } => {
                out[alpha] = Some((beta, Some(g)))
            }
            _ => {}
        }
    }
    out.into_iter().collect()
}

fn same_endpoints(f_prime: &LevelMorphism, f: &LevelMorphism, g_prime: &LevelMorphism, g: &LevelMorphism) -> bool {
    f_prime.source() == g_prime.source()
        && f_prime.target() == g.source()
        && g_prime.target() == f.source()
        && g.target() == f.target()
}

/// Whether `a` and `b`, both maps `S_σ → W_α` for a tower or poset `S`, agree after
/// precomposing with some bond `S_λ → S_σ`, `λ` up to `σ + horizon`.
fn agree_eventually(
    s: &crate::prosys::InverseSystem,
    sigma: usize,
    a: &Morphism,
    b: &Morphism,
    horizon: usize,
) -> Result<bool, ProError> {
    let cat = s.category();
    let lambdas: Vec<usize> = match s.index() {
        Index::Tower(_) => (sigma..=sigma + horizon).collect(),
        Index::Poset(p) => p.above(sigma),
    };
    for l in lambdas {
        let p = s.bond(l, sigma)?;
        if cat.equal(&cat.compose(a, &p)?, &cat.compose(b, &p)?) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Diagonal filler `u: T → X` of the commutative square
///
/// ```text
///   Z --f'--> T
///   |g'       |g
///   v         v
///   X --f---> Y
/// ```
///
/// with `u ∘ f' = g'` and `f ∘ u = g`, checked as pro-morphisms. `None` when the mode's
/// hypotheses are not established within the horizon or the data has anchored tails this
/// construction cannot carry.
pub fn fill_square(
    f_prime: &LevelMorphism,
    f: &LevelMorphism,
    g_prime: &LevelMorphism,
    g: &LevelMorphism,
    mode: FillMode,
    horizon: usize,
) -> Result<Option<ProMorphism>, ProError> {
    if !same_endpoints(f_prime, f, g_prime, g) {
        return Err(ProError::Invalid("the four morphisms do not form a square Z → T, X → Y, Z → X, T → Y".into()));
    }
    if f_prime.index() != f.index() {
        return Err(ProError::Invalid("all four morphisms must live over one index".into()));
    }
    for m in [f_prime, f, g_prime, g] {
        m.validate().map_err(ProError::Violation)?;
    }
    let cat = f.category().clone();
    let index = f.index().clone();
    let (z, t, x) = (f_prime.source(), f_prime.target(), f.source());
    let stored = index.stored();
    let checked = match &index {
        Index::Tower(ti) => horizon.max(stored + ti.tail_period),
        Index::Poset(_) => stored,
    };
    for a in 0..checked {
        let left = cat.compose(&f.component(a)?, &g_prime.component(a)?)?;
        let right = cat.compose(&g.component(a)?, &f_prime.component(a)?)?;
        if !agree_eventually(z, a, &left, &right, horizon)? {
            return Err(ProError::Invalid(format!("the square does not commute at {}", index.label(a))));
        }
    }
    let period = index.as_tower().map(|ti| ti.tail_period);
    // Representatives at the stored indices; beyond them periodic data repeats with shift P.
    let locate = |a: usize, data: &[(usize, Option<Morphism>)]| -> (usize, Option<Morphism>) {
        match index.as_tower() {
            Some(ti) if a >= stored => {
                let k = (a - ti.prefix_len) / ti.tail_period;
                let (b, m) = &data[ti.slot(a)];
                (b + k * ti.tail_period, m.clone())
            }
            _ => data[a].clone(),
        }
    };
    let (reps, anchored) = match mode {
        FillMode::StrongMonoEpi => {
            if f.tail() == Tail::Anchored || !check_epi(f_prime, horizon)?.holds() {
                return Ok(None);
            }
            let Some(r) = by_alpha(check_strong_mono(f, horizon)?, stored) else { return Ok(None) };
            let reps = (0..stored)
                .map(|a| {
                    let (beta, ra) = locate(a, &r);
                    Ok(Representative { from: beta, map: cat.compose(&ra.unwrap(), &g.component(beta)?)? })
                })
                .collect::<Result<Vec<_>, ProError>>()?;
            (reps, g.tail() == Tail::Anchored)
        }
        FillMode::MonoStrongEpi => {
            if [f, f_prime, g_prime].iter().any(|m| m.tail() == Tail::Anchored) {
                return Ok(None);
            }
            let Some(e) = by_alpha(check_mono(f, horizon)?, stored) else { return Ok(None) };
            let Some(s) = by_alpha(check_strong_epi(f_prime, horizon)?, stored) else { return Ok(None) };
            let reps = (0..stored)
                .map(|a| {
                    let (ea, _) = locate(a, &e);
                    let (beta, se) = locate(ea, &s);
                    let lifted = cat.compose(&g_prime.component(ea)?, &se.unwrap())?;
                    Ok(Representative { from: beta, map: cat.compose(&x.bond(ea, a)?, &lifted)? })
                })
                .collect::<Result<Vec<_>, ProError>>()?;
            (reps, false)
        }
    };
    let tail = period.map(|p| ProTail { shift: p, anchored });
    let u = ProMorphism::new(t.clone(), x.clone(), reps, tail)?;
    for a in 0..checked {
        let sigma = u.sigma(a);
        let ua = u.rep(a)?;
        let left = cat.compose(&ua, &f_prime.component(sigma)?)?;
        let want = cat.compose(&g_prime.component(a)?, &z.bond(sigma, a)?)?;
        if !agree_eventually(z, sigma, &left, &want, horizon)? {
            return Ok(None);
        }
        let down = cat.compose(&f.component(a)?, &ua)?;
        let want = cat.compose(&g.component(a)?, &t.bond(sigma, a)?)?;
        if !agree_eventually(t, sigma, &down, &want, horizon)? {
            return Ok(None);
        }
    }
    Ok(Some(u))
}
