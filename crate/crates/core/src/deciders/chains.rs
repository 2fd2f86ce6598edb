//! Failure certificates for FgAb towers whose bonds never cycle (`×2` on `ℤ`, say).
//!
//! Fix `α` and `β₀ = max(L, α+1)`, and look only at `β_k = β₀ + kP`. All these levels carry
//! the same objects, the bonds `X_{β_k} → X_α` are `p₀ Q^k` for the period bond `Q`, and each
//! levelwise condition at `β_k` becomes membership in the `k`-th term of a chain obtained by
//! repeatedly taking preimages under `Q` (or under `h ↦ h∘Q` on a hom-group). Each term is
//! a function of the previous one, so once a term repeats the chain is periodic, and if the
//! condition failed along the way it fails for every `β`, since the conditions are
//! upward closed in `β`.

use super::level::Cond;
use super::FailReason;
use crate::categories::{Category, FgAbMorphism, FgAbObject, Morphism};
use crate::prosys::{LevelMorphism, ProError, Tail};
use crate::zlinalg::{kernel_generators, lattice_contains, lattice_equal, IntMatrix};

fn group(m: &Morphism) -> &FgAbMorphism {
    m.as_group().expect("FgAb data")
}

/// `Hom(A, B)` as a subquotient of `ℤ^{m_B n_A}` (column-major vectorized matrices):
/// well-defined matrices `w` modulo zero maps `z`.
pub(crate) struct HomGroup {
    pub(crate) w: IntMatrix,
    pub(crate) z: IntMatrix,
}

impl HomGroup {
    pub(crate) fn new(a: &FgAbObject, b: &FgAbObject) -> Result<Self, ProError> {
        let (ra, rb) = (a.relations(), b.relations());
        let lhs = ra.transpose().kron(&IntMatrix::identity(b.generators()));
        let rel = IntMatrix::identity(ra.cols()).kron(rb);
        let w = kernel_generators(&lhs, &rel)?;
        let z = IntMatrix::identity(a.generators()).kron(rb);
        Ok(HomGroup { w, z })
    }

    /// `{h : psi(h) ∈ k}` for a linear map `psi` of the hom-group to itself.
    pub(crate) fn preimage(&self, psi: &IntMatrix, k: &IntMatrix) -> Result<IntMatrix, ProError> {
        let pw = psi.mul(&self.w)?;
        let c = kernel_generators(&pw, &k.hstack(&self.z)?)?;
        Ok(self.w.mul(&c)?)
    }

    pub(crate) fn contains(&self, h: &IntMatrix, k: &IntMatrix) -> Result<bool, ProError> {
        Ok(lattice_contains(h, k, &self.z)?)
    }

    pub(crate) fn same(&self, a: &IntMatrix, b: &IntMatrix) -> Result<bool, ProError> {
        Ok(lattice_equal(a, b, &self.z)?)
    }
}

/// Preimage of the subgroup generated by `s` under an endomorphism `q` of a group with
/// relations `r`.
fn sub_preimage(q: &IntMatrix, s: &IntMatrix, r: &IntMatrix) -> Result<IntMatrix, ProError> {
    Ok(kernel_generators(q, &s.hstack(r)?)?)
}

/// Iterate `next` from `start`, failing the condition at every step, until a term repeats.
/// Returns the number of steps when the chain is certified, `None` if the condition holds
/// somewhere or no repeat shows up within `max_steps`.
fn run_chain<S: Clone>(
    start: S,
    max_steps: usize,
    mut holds: impl FnMut(&S) -> Result<bool, ProError>,
    mut next: impl FnMut(&S) -> Result<S, ProError>,
    mut same: impl FnMut(&S, &S) -> Result<bool, ProError>,
) -> Result<Option<usize>, ProError> {
    let mut seen: Vec<S> = Vec::new();
    let mut cur = start;
    for k in 0..=max_steps {
        if holds(&cur)? {
            return Ok(None);
        }
        for prev in &seen {
            if same(prev, &cur)? {
                return Ok(Some(k));
            }
        }
        let nxt = next(&cur)?;
        seen.push(cur);
        cur = nxt;
    }
    Ok(None)
}

/// Certify that `cond` fails at `alpha` for every `β`, for level morphisms of FgAb towers.
pub(crate) fn chain_fails(
    f: &LevelMorphism,
    cond: Cond,
    alpha: usize,
    horizon: usize,
) -> Result<Option<FailReason>, ProError> {
    if *f.category() != Category::FgAb {
        return Ok(None);
    }
    let Some(t) = f.index().as_tower().copied() else { return Ok(None) };
    let beta0 = t.prefix_len.max(alpha + 1);
    if beta0 > horizon {
        return Ok(None);
    }
    let max_steps = (horizon - beta0) / t.tail_period;
    let (x, y) = (f.source(), f.target());
    let xa = x.object(alpha).as_group().expect("FgAb").clone();
    let xb = x.object(beta0).as_group().expect("FgAb").clone();
    let ya = y.object(alpha).as_group().expect("FgAb").clone();
    let yb = y.object(beta0).as_group().expect("FgAb").clone();
    let qx = group(&x.period_bond(beta0)?).matrix().clone();
    let qy = group(&y.period_bond(beta0)?).matrix().clone();
    let p0 = group(&x.bond(beta0, alpha)?).matrix().clone();
    let h0 = group(&y.bond(beta0, alpha)?).matrix().clone();
    let fa = group(&f.component(alpha)?).matrix().clone();
    let fb = group(&f.component(beta0)?).matrix().clone();
    let anchored = f.tail() == Tail::Anchored;
    let (rxa, rxb, rya, ryb) = (xa.relations(), xb.relations(), ya.relations(), yb.relations());

    let steps = match cond {
        Cond::Mono if !anchored => {
            let ker_f = kernel_generators(&fb, ryb)?;
            run_chain(
                kernel_generators(&p0, rxa)?,
                max_steps,
                |s| Ok(lattice_contains(&ker_f, s, rxb)?),
                |s| sub_preimage(&qx, s, rxb),
                |a, b| Ok(lattice_equal(a, b, rxb)?),
            )?
        }
        Cond::Mono => run_chain(
            (kernel_generators(&fb, ryb)?, kernel_generators(&p0, rxa)?),
            max_steps,
            |(a, b)| Ok(lattice_contains(a, b, rxb)?),
            |(a, b)| Ok((sub_preimage(&qx, a, rxb)?, sub_preimage(&qx, b, rxb)?)),
            |(a1, b1), (a2, b2)| Ok(lattice_equal(a1, a2, rxb)? && lattice_equal(b1, b2, rxb)?),
        )?,
        Cond::Epi => {
            let everything = IntMatrix::identity(yb.generators());
            run_chain(
                kernel_generators(&h0, &fa.hstack(rya)?)?,
                max_steps,
                |e| Ok(lattice_contains(&everything, e, ryb)?),
                |e| sub_preimage(&qy, e, ryb),
                |a, b| Ok(lattice_equal(a, b, ryb)?),
            )?
        }
        Cond::StrongEpi => {
            // Inside Hom(Y_β₀, Y_α): K₀ = f_α ∘ Hom(Y_β₀, X_α), then preimages under h ↦ h∘Q_Y.
            let hom = HomGroup::new(&yb, &ya)?;
            let lifts = HomGroup::new(&yb, &xa)?;
            let k0 = IntMatrix::identity(yb.generators()).kron(&fa).mul(&lifts.w)?;
            let psi = qy.transpose().kron(&IntMatrix::identity(ya.generators()));
            let target = h0.vectorize();
            run_chain(k0, max_steps, |k| hom.contains(&target, k), |k| hom.preimage(&psi, k), |a, b| hom.same(a, b))?
        }
        Cond::StrongMono => {
            // Inside Hom(X_β₀, X_α): K₀ = Hom(Y_β₀, X_α) ∘ f_β₀, then preimages under h ↦ h∘Q_X.
            let hom = HomGroup::new(&xb, &xa)?;
            let lifts = HomGroup::new(&yb, &xa)?;
            let k0 = fb.transpose().kron(&IntMatrix::identity(xa.generators())).mul(&lifts.w)?;
            let psi = qx.transpose().kron(&IntMatrix::identity(xa.generators()));
            let target = p0.vectorize();
            if !anchored {
                run_chain(
                    k0,
                    max_steps,
                    |k| hom.contains(&target, k),
                    |k| hom.preimage(&psi, k),
                    |a, b| hom.same(a, b),
                )?
            } else {
                // g f₀ Q^k = p₀ Q^k iff g f₀ - p₀ lies in the kernel N_k of h ↦ h∘Q^k.
                let n0 = IntMatrix::zeros(target.rows(), 0);
                run_chain(
                    n0,
                    max_steps,
                    |n| hom.contains(&target, &k0.hstack(n)?),
                    |n| hom.preimage(&psi, n),
                    |a, b| hom.same(a, b),
                )?
            }
        }
        Cond::Iso => None,
    };
    Ok(steps.map(|steps| FailReason::ChainStabilized { base: beta0, period: t.tail_period, steps }))
}
