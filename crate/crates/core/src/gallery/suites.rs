//! Property suites: laws that must hold on every instance where the verdicts involved are
//! definite. Unknown verdicts are counted as skipped, never as passed.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::oracles;
use super::random::{
    instance_seed, random_composable, random_morphism, random_system, restrict_morphism_to_poset, restrict_to_poset,
    GeneratorParams, Instance, Kind,
};
use super::scenarios::builtin_scenarios;
use crate::categories::{Category, FgAbMorphism, FgAbObject, FinSetMorphism, FinSetObject, Morphism, Object};
use crate::deciders::{
    check_bimorphism, check_epi, check_iso, check_mono, check_morphism, check_movability, check_stability,
    check_strong_epi, check_strong_mono, check_system, default_selectors, extract_bimorphic_subtower, fill_square,
    tor_morphism, Certificate, Entry, FillMode, MovabilityFlavor, Premise, Property, Subject, Verdict,
};
use crate::prosys::{
    cofinite_reindex, inverse_limit_finset_tower, levelize, projection_morphism, subtower, Index, InverseSystem,
    LevelMorphism, ProError, ProMorphism, SubtowerSelector, TowerIndex,
};
use crate::zlinalg::{smith_normal_form, IntMatrix};

pub const SUITES: [&str; 11] = [
    "implication-lattice",
    "finset-collapse",
    "cancellation",
    "movability",
    "stability",
    "tor-preserves-strong-mono",
    "finset-oracle",
    "snf",
    "reindex",
    "certificates",
    "bimorphic-subtower",
];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LawTally {
    pub law: String,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

/// The first definite counterexample to a law, with everything needed to replay it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteViolation {
    pub law: String,
    pub instance: usize,
    pub seed: u64,
    pub detail: String,
    pub replay: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub n: usize,
    pub seed: u64,
    pub laws: Vec<LawTally>,
    pub notes: Vec<String>,
    pub violation: Option<SuiteViolation>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none() && self.laws.iter().all(|l| l.failed == 0)
    }

    pub fn law(&self, name: &str) -> Option<&LawTally> {
        self.laws.iter().find(|l| l.law == name)
    }

    pub fn total_failed(&self) -> usize {
        self.laws.iter().map(|l| l.failed).sum()
    }

    /// Replay document for the violation, if any.
    pub fn replay_document(&self) -> Option<Value> {
        self.violation.as_ref().map(|v| {
            json!({
                "suite": self.suite,
                "law": v.law,
                "instance": v.instance,
                "instance_seed": v.seed,
                "detail": v.detail,
                "data": v.replay,
            })
        })
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "ok" } else { "VIOLATION" };
        writeln!(f, "suite {}: {} (n={}, seed={})", self.suite, status, self.n, self.seed)?;
        let width = self.laws.iter().map(|l| l.law.chars().count()).max().unwrap_or(0);
        for l in &self.laws {
            let pad = width - l.law.chars().count();
            writeln!(
                f,
                "  {}{}  passed {:>4}  failed {:>3}  skipped {:>4}",
                l.law,
                " ".repeat(pad),
                l.passed,
                l.failed,
                l.skipped
            )?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {}", n)?;
        }
        if let Some(v) = &self.violation {
            writeln!(f, "  violation of \"{}\" at instance {} (seed {}): {}", v.law, v.instance, v.seed, v.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("unknown suite {name:?}; known suites: {known}", name = .0, known = SUITES.join(", "))]
    Unknown(String),
    #[error(transparent)]
    Pro(#[from] ProError),
}

enum Outcome {
    Pass,
    Fail(String),
    Skip,
}

struct Run {
    report: SuiteReport,
}

impl Run {
    fn new(suite: &str, n: usize, seed: u64, laws: &[&str]) -> Self {
        let laws = laws.iter().map(|l| LawTally { law: l.to_string(), ..Default::default() }).collect();
        Run { report: SuiteReport { suite: suite.into(), n, seed, laws, notes: Vec::new(), violation: None } }
    }

    fn tally(&mut self, law: &str) -> &mut LawTally {
        if let Some(i) = self.report.laws.iter().position(|l| l.law == law) {
            return &mut self.report.laws[i];
        }
        self.report.laws.push(LawTally { law: law.into(), ..Default::default() });
        self.report.laws.last_mut().unwrap()
    }

    fn record(
        &mut self,
        law: &str,
        outcome: Option<Outcome>,
        instance: usize,
        seed: u64,
        replay: impl FnOnce() -> Value,
    ) {
        let Some(outcome) = outcome else { return };
        let t = self.tally(law);
        match outcome {
            Outcome::Pass => t.passed += 1,
            Outcome::Skip => t.skipped += 1,
            Outcome::Fail(detail) => {
                t.failed += 1;
                if self.report.violation.is_none() {
                    self.report.violation =
                        Some(SuiteViolation { law: law.into(), instance, seed, detail, replay: replay() });
                }
            }
        }
    }

    fn stopped(&self) -> bool {
        self.report.violation.is_some()
    }

    fn note(&mut self, s: impl Into<String>) {
        self.report.notes.push(s.into());
    }
}

/// When the premise holds, the conclusion must not fail.
fn given(premise: bool, conclusion: &Verdict) -> Option<Outcome> {
    if !premise {
        return None;
    }
    Some(match conclusion {
        Verdict::Holds(_) => Outcome::Pass,
        Verdict::Fails(cw) => Outcome::Fail(cw.to_string()),
        Verdict::Unknown(_) => Outcome::Skip,
    })
}

/// Two definite verdicts must agree.
fn same(a: &Verdict, b: &Verdict) -> Outcome {
    if a.is_unknown() || b.is_unknown() {
        Outcome::Skip
    } else if a.holds() == b.holds() {
        Outcome::Pass
    } else {
        Outcome::Fail(format!("{} against {}", a.label(), b.label()))
    }
}

fn check(ok: bool, detail: impl FnOnce() -> String) -> Option<Outcome> {
    Some(if ok { Outcome::Pass } else { Outcome::Fail(detail()) })
}

fn replays(v: &Verdict) -> Option<Outcome> {
    let c = v.certificate()?;
    let round = Certificate::from_json(&c.to_json())
        .map_err(|e| e.to_string())
        .and_then(|c| c.verify().map_err(|e| e.to_string()));
    Some(match round {
        Ok(()) => Outcome::Pass,
        Err(e) => Outcome::Fail(format!("{} certificate rejected: {}", c.property, e)),
    })
}

fn kind_for(i: usize) -> Kind {
    if i.is_multiple_of(2) {
        Kind::FinSet
    } else {
        Kind::FgAb
    }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("instances serialize")
}

/// Run a named suite over `n` instances derived from `seed`.
pub fn run_suite(name: &str, n: usize, seed: u64) -> Result<SuiteReport, SuiteError> {
    let report = match name {
        "implication-lattice" => implication_lattice(n, seed)?,
        "finset-collapse" => finset_collapse(n, seed)?,
        "cancellation" => cancellation(n, seed)?,
        "movability" => movability(n, seed)?,
        "stability" => stability(n, seed)?,
        "tor-preserves-strong-mono" => tor_preserves(n, seed)?,
        "finset-oracle" => finset_oracle(n, seed)?,
        "snf" => snf(n, seed)?,
        "reindex" => reindex(n, seed)?,
        "certificates" => certificates(n, seed)?,
        "bimorphic-subtower" => bimorphic_subtower(n, seed)?,
        other => return Err(SuiteError::Unknown(other.to_string())),
    };
    Ok(report)
}

// ---- morphism laws ----

struct MorphismVerdicts {
    mono: Verdict,
    epi: Verdict,
    strong_mono: Verdict,
    strong_epi: Verdict,
    iso: Verdict,
    bimorphism: Verdict,
}

impl MorphismVerdicts {
    fn of(f: &LevelMorphism, h: usize) -> Result<Self, ProError> {
        Ok(MorphismVerdicts {
            mono: check_mono(f, h)?,
            epi: check_epi(f, h)?,
            strong_mono: check_strong_mono(f, h)?,
            strong_epi: check_strong_epi(f, h)?,
            iso: check_iso(f, h)?,
            bimorphism: check_bimorphism(f, h)?,
        })
    }

    fn all(&self) -> [&Verdict; 6] {
        [&self.mono, &self.epi, &self.strong_mono, &self.strong_epi, &self.iso, &self.bimorphism]
    }
}

/// Whether two pro-morphisms into a system agree at every stored index once pushed far
/// enough up the source.
fn same_pro_morphism(u: &ProMorphism, v: &ProMorphism, horizon: usize) -> Result<bool, ProError> {
    let cat = u.category().clone();
    for a in 0..u.target().index().stored() {
        let sigma = u.sigma(a).max(v.sigma(a));
        let lambdas: Vec<usize> = match u.source().index() {
            Index::Tower(_) => (sigma..=sigma + horizon).collect(),
            Index::Poset(p) => p.above(sigma),
        };
        let mut agree = false;
        for l in lambdas {
            if cat.equal(&u.rep_at(a, l)?, &v.rep_at(a, l)?) {
                agree = true;
                break;
            }
        }
        if !agree {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A two-point set or `ℤ/2`: a small object to count morphisms into.
fn small_object(cat: &Category) -> Object {
    match cat.base() {
        Category::FgAb => Object::Group(FgAbObject::cyclic(2)),
        _ => Object::Set(FinSetObject::range(2)),
    }
}

const LATTICE_LAWS: [&str; 12] = [
    "iso implies strong mono",
    "iso implies strong epi",
    "strong mono implies mono",
    "strong epi implies epi",
    "strong mono and epi imply iso",
    "strong epi and mono imply iso",
    "bimorphism is mono and epi",
    "strong mono and epi fill the identity square, and f is iso",
    "mono and strong epi fill the identity square, and f is iso",
    "the two fillers agree",
    "iso preserves morphism counts into a small object",
    "certificates replay",
];

fn implication_lattice(n: usize, seed: u64) -> Result<SuiteReport, ProError> {
    let mut run = Run::new("implication-lattice", n, seed, &LATTICE_LAWS);
    for i in 0..n {
        let s = instance_seed(seed, i);
        let f = random_morphism(&GeneratorParams::small(kind_for(i), s))?;
        let h = f.index().default_horizon();
        let v = MorphismVerdicts::of(&f, h)?;
        let replay = || to_json(&Instance::Morphism(f.clone()));
        run.record(LATTICE_LAWS[0], given(v.iso.holds(), &v.strong_mono), i, s, replay);
        run.record(LATTICE_LAWS[1], given(v.iso.holds(), &v.strong_epi), i, s, replay);
        run.record(LATTICE_LAWS[2], given(v.strong_mono.holds(), &v.mono), i, s, replay);
        run.record(LATTICE_LAWS[3], given(v.strong_epi.holds(), &v.epi), i, s, replay);
        run.record(LATTICE_LAWS[4], given(v.strong_mono.holds() && v.epi.holds(), &v.iso), i, s, replay);
        run.record(LATTICE_LAWS[5], given(v.strong_epi.holds() && v.mono.holds(), &v.iso), i, s, replay);
        let bi = if [&v.mono, &v.epi, &v.bimorphism].iter().any(|x| x.is_unknown()) {
            Outcome::Skip
        } else if v.bimorphism.holds() == (v.mono.holds() && v.epi.holds()) {
            Outcome::Pass
        } else {
            Outcome::Fail(format!(
                "bimorphism {}, mono {}, epi {}",
                v.bimorphism.label(),
                v.mono.label(),
                v.epi.label()
            ))
        };
        run.record(LATTICE_LAWS[6], Some(bi), i, s, replay);

        let id_x = LevelMorphism::identity(f.source())?;
        let id_y = LevelMorphism::identity(f.target())?;
        let mut fillers = Vec::new();
        for (law, mode, premise) in [
            (LATTICE_LAWS[7], FillMode::StrongMonoEpi, v.strong_mono.holds() && v.epi.holds()),
            (LATTICE_LAWS[8], FillMode::MonoStrongEpi, v.mono.holds() && v.strong_epi.holds()),
        ] {
            if !premise {
                continue;
            }
            let u = fill_square(&f, &f, &id_x, &id_y, mode, h)?;
            let outcome = match (&u, v.iso.holds()) {
                (Some(_), true) => Outcome::Pass,
                (None, _) => Outcome::Fail("no filler produced".into()),
                (Some(_), false) => Outcome::Fail(format!("filler produced but iso is {}", v.iso.label())),
            };
            run.record(law, Some(outcome), i, s, replay);
            fillers.extend(u);
        }
        if let [u1, u2] = fillers.as_slice() {
            let ok = same_pro_morphism(u1, u2, h)?;
            run.record(LATTICE_LAWS[9], check(ok, || "fillers differ".into()), i, s, replay);
        }
        if v.iso.holds() {
            let p = small_object(f.category());
            let hx = crate::prosys::pro_hom_to_object(f.source(), &p, h)?;
            let hy = crate::prosys::pro_hom_to_object(f.target(), &p, h)?;
            let outcome = if !(hx.complete && hy.complete) {
                Outcome::Skip
            } else if hx.count() == hy.count() {
                Outcome::Pass
            } else {
                Outcome::Fail(format!("{} morphisms out of X, {} out of Y", hx.count(), hy.count()))
            };
            run.record(LATTICE_LAWS[10], Some(outcome), i, s, replay);
        }
        for x in v.all() {
            run.record(LATTICE_LAWS[11], replays(x), i, s, replay);
        }
        if run.stopped() {
            break;
        }
    }
    Ok(run.report)
}

fn finset_collapse(n: usize, seed: u64) -> Result<SuiteReport, ProError> {
    let laws = [
        "mono iff strong mono, source levels non-empty",
        "epi iff strong epi",
        "a mono that is not strong mono has an empty source level",
        "certificates replay",
    ];
    let mut run = Run::new("finset-collapse", n, seed, &laws);
    let mut with_empty = 0;
    for i in 0..n {
        let s = instance_seed(seed, i);
        let f = random_morphism(&GeneratorParams::small(Kind::FinSet, s))?;
        let h = f.index().default_horizon();
        let (m, sm) = (check_mono(&f, h)?, check_strong_mono(&f, h)?);
        let (e, se) = (check_epi(&f, h)?, check_strong_epi(&f, h)?);
        // ∅ → {*} is mono but has no retraction, so the mono side needs inhabited levels.
        let empty_level = (0..f.index().stored()).any(|a| f.source().object(a).as_set().is_some_and(|x| x.is_empty()));
        with_empty += empty_level as usize;
        let replay = || to_json(&Instance::Morphism(f.clone()));
        if !empty_level {
            run.record(laws[0], Some(same(&m, &sm)), i, s, replay);
        }
        run.record(laws[1], Some(same(&e, &se)), i, s, replay);
        if m.holds() && sm.fails() {
            run.record(laws[2], check(empty_level, || "all source levels are inhabited".into()), i, s, replay);
        }
        for v in [&m, &sm, &e, &se] {
            run.record(laws[3], replays(v), i, s, replay);
        }
        if run.stopped() {
            break;
        }
    }
    run.note(format!("{} of {} morphisms have an empty source level", with_empty, n));
    Ok(run.report)
}

fn cancellation(n: usize, seed: u64) -> Result<SuiteReport, ProError> {
    let laws = [
        "strong mono g∘f gives strong mono f",
        "strong epi g∘f gives strong epi g",
        "strong monos compose",
        "strong epis compose",
        "monos compose",
        "epis compose",
    ];
    let mut run = Run::new("cancellation", n, seed, &laws);
    for i in 0..n {
        let s = instance_seed(seed, i);
        let (f, g) = random_composable(&GeneratorParams::small(kind_for(i), s))?;
        let gf = LevelMorphism::compose(&g, &f)?;
        let h = f.index().default_horizon();
        let (smf, smg, smgf) = (check_strong_mono(&f, h)?, check_strong_mono(&g, h)?, check_strong_mono(&gf, h)?);
        let (sef, seg, segf) = (check_strong_epi(&f, h)?, check_strong_epi(&g, h)?, check_strong_epi(&gf, h)?);
        let (mf, mg, mgf) = (check_mono(&f, h)?, check_mono(&g, h)?, check_mono(&gf, h)?);
        let (ef, eg, egf) = (check_epi(&f, h)?, check_epi(&g, h)?, check_epi(&gf, h)?);
        let replay = || json!({ "f": to_json(&f), "g": to_json(&g) });
        run.record(laws[0], given(smgf.holds(), &smf), i, s, replay);
        run.record(laws[1], given(segf.holds(), &seg), i, s, replay);
        run.record(laws[2], given(smf.holds() && smg.holds(), &smgf), i, s, replay);
        run.record(laws[3], given(sef.holds() && seg.holds(), &segf), i, s, replay);
        run.record(laws[4], given(mf.holds() && mg.holds(), &mgf), i, s, replay);
        run.record(laws[5], given(ef.holds() && eg.holds(), &egf), i, s, replay);
        if run.stopped() {
            break;
        }
    }
    Ok(run.report)
}

// ---- system laws ----

fn movability(n: usize, seed: u64) -> Result<SuiteReport, ProError> {
    let laws = [
        "uniformly movable implies movable",
        "movable implies sequentially movable",
        "stable implies uniformly movable",
        "finite-set towers are movable",
        "uniformly movable finite-set tower: limit projection is strong epi",
        "certificates replay",
    ];
    let mut run = Run::new("movability", n, seed, &laws);
    for i in 0..n {
        let s = instance_seed(seed, i);
        let x = random_system(&GeneratorParams::small(kind_for(i), s))?;
        let h = x.default_horizon();
        let mv = check_movability(&x, MovabilityFlavor::Classical, h)?;
        let un = check_movability(&x, MovabilityFlavor::Uniform, h)?;
        let sq = check_movability(&x, MovabilityFlavor::Sequential(Vec::new()), h)?;
        let st = check_stability(&x, h)?;
        let replay = || to_json(&Instance::System(x.clone()));
        run.record(laws[0], given(un.holds(), &mv), i, s, replay);
        run.record(laws[1], given(mv.holds(), &sq), i, s, replay);
        run.record(laws[2], given(st.holds(), &un), i, s, replay);
        let finset = *x.category() == Category::FinSet;
        run.record(laws[3], given(finset, &mv), i, s, replay);
        if finset && un.holds() {
            let (_, proj) = inverse_limit_finset_tower(&x)?;
            let outcome = match levelize(&proj, h) {
                Ok(lev) => given(true, &check_strong_epi(&lev.level, h)?),
                Err(ProError::Unresolved { .. }) => Some(Outcome::Skip),
                Err(e) => return Err(e),
            };
            run.record(laws[4], outcome, i, s, replay);
        }
        for v in [&mv, &un, &sq, &st] {
            run.record(laws[5], replays(v), i, s, replay);
        }
        if run.stopped() {
            break;
        }
    }
    Ok(run.report)
}

/// A tower of free groups with injective bonds, or of finite sets with injective bonds.
fn mono_tower(i: usize, seed: u64) -> Result<InverseSystem, ProError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = TowerIndex::new(rng.gen_range(0..=2), rng.gen_range(1..=2))?;
    let n = idx.stored();
    if i % 4 == 3 {
        // Finite sets shrinking by at most one element per step, injectively.
        let top = rng.gen_range(1..=4usize);
        let mut sizes = vec![top; n];
        for k in (0..idx.prefix_len).rev() {
            sizes[k] = sizes[k + 1] + rng.gen_range(0..=1);
        }
        let objects: Vec<Object> = sizes.iter().map(|&k| Object::Set(FinSetObject::range(k))).collect();
        let steps = (0..n)
            .map(|k| {
                let (src, dst) = (sizes[idx.slot(k + 1)], sizes[k]);
                let mut targets: Vec<usize> = (0..dst).collect();
                rand::seq::SliceRandom::shuffle(targets.as_mut_slice(), &mut rng);
                let m =
                    FinSetMorphism::new(FinSetObject::range(src), FinSetObject::range(dst), targets[..src].to_vec())?;
                Ok(Morphism::Set(m))
            })
            .collect::<Result<_, ProError>>()?;
        return InverseSystem::tower(Category::FinSet, idx, objects, steps);
    }
    let r = rng.gen_range(1..=2usize);
    let g = FgAbObject::free(r);
    let steps = (0..n)
        .map(|_| loop {
            let entries: Vec<i64> = (0..r * r).map(|_| rng.gen_range(-3..=3)).collect();
            let rows: Vec<Vec<i64>> = entries.chunks(r).map(|c| c.to_vec()).collect();
            let m = IntMatrix::from_rows(&rows);
            // Unimodular matrices are frequent enough to make stable towers common.
            let det =
                oracles::determinant(&rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect::<Vec<_>>());
            if det != 0 {
                break Ok(Morphism::Group(FgAbMorphism::new(g.clone(), g.clone(), m)?));
            }
        })
        .collect::<Result<_, ProError>>()?;
    InverseSystem::tower(Category::FgAb, idx, vec![Object::Group(g); n], steps)
}

fn stability(n: usize, seed: u64) -> Result<SuiteReport, ProError> {
    let laws = [
        "mono bonds: stable iff movable",
        "mono bonds: stable iff tail steps are isomorphisms",
        "mono bonds: movable iff tail steps are isomorphisms",
        "certificates replay",
    ];
    let mut run = Run::new("stability", n, seed, &laws);
    for i in 0..n {
        let s = instance_seed(seed, i);
        let x = mono_tower(i, s)?;
        x.validate().map_err(ProError::Violation)?;
        let h = x.default_horizon();
        let t = x.tower_index().unwrap();
        let cat = x.category();
        let tail_iso = (t.prefix_len..t.stored())
            .map(|k| cat.is_iso(x.step(k)))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .all(|b| b);
        let st = check_stability(&x, h)?;
        let mv = check_movability(&x, MovabilityFlavor::Classical, h)?;
        let replay = || to_json(&Instance::System(x.clone()));
        run.record(laws[0], Some(same(&st, &mv)), i, s, replay);
        let vs_iso = |v: &Verdict| {
            if v.is_unknown() {
                Outcome::Skip
            } else if v.holds() == tail_iso {
                Outcome::Pass
            } else {
                Outcome::Fail(format!("verdict {} but tail steps iso = {}", v.label(), tail_iso))
            }
        };
        run.record(laws[1], Some(vs_iso(&st)), i, s, replay);
        run.record(laws[2], Some(vs_iso(&mv)), i, s, replay);
        for v in [&st, &mv] {
            run.record(laws[3], replays(v), i, s, replay);
        }
        if run.stopped() {
            break;
        }
    }
    Ok(run.report)
}

fn tor_preserves(n: usize, seed: u64) -> Result<SuiteReport, ProError> {
    let laws = ["Tor keeps strong monomorphisms", "Tor keeps strong epimorphisms"];
    let mut run = Run::new("tor-preserves-strong-mono", n, seed, &laws);
    let (mut found, mut draws) = (0, 0);
    while found < n && draws < 40 * n.max(1) {
        let s = instance_seed(seed, draws);
        draws += 1;
        let f = random_morphism(&GeneratorParams::small(Kind::FgAb, s))?;
        let h = f.index().default_horizon();
        let sm = check_strong_mono(&f, h)?;
        if !sm.holds() {
            continue;
        }
        found += 1;
        let tf = tor_morphism(&f)?;
        let replay = || to_json(&Instance::Morphism(f.clone()));
        run.record(laws[0], given(true, &check_strong_mono(&tf, h)?), draws - 1, s, replay);
        let se = check_strong_epi(&f, h)?;
        if se.holds() {
            run.record(laws[1], given(true, &check_strong_epi(&tf, h)?), draws - 1, s, replay);
        }
        if run.stopped() {
            break;
        }
    }
    run.note(format!("{} strong monomorphisms among {} draws", found, draws));
    Ok(run.report)
}

// ---- oracles for the base solvers ----

fn random_table(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..m)).collect()
}

fn set_map(table: Vec<usize>, n: usize, m: usize) -> Result<Morphism, ProError> {
    Ok(Morphism::Set(FinSetMorphism::new(FinSetObject::range(n), FinSetObject::range(m), table)?))
}

fn finset_oracle(n: usize, seed: u64) -> Result<SuiteReport, ProError> {
    let laws = ["left cancellation matches enumeration", "right cancellation matches enumeration"];
    let mut run = Run::new("finset-oracle", n, seed, &laws);
    let cat = Category::FinSet;
    let (mut left_true, mut right_true) = (0, 0);
    for i in 0..n {
        let s = instance_seed(seed, i);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        // f: X → Y and p: X → W, |X| <= 3.
        let (x, y, w) = (rng.gen_range(0..=3), rng.gen_range(1..=4), rng.gen_range(1..=4));
        let f = random_table(&mut rng, x, y);
        let p = if rng.gen_bool(0.5) {
            let h = random_table(&mut rng, y, w);
            f.iter().map(|&v| h[v]).collect()
        } else {
            random_table(&mut rng, x, w)
        };
        let got = cat.cancel_left_before(&set_map(f.clone(), x, y)?, &set_map(p.clone(), x, w)?)?;
        let want = oracles::left_cancels(x, &f, &p, 5);
        left_true += want as usize;
        let replay = || json!({ "x": x, "f": f, "p": p });
        run.record(laws[0], check(got == want, || format!("solver {} enumeration {}", got, want)), i, s, replay);
        // f: X → Y and p: W → Y, |Y| <= 3.
        let (y, x, w) = (rng.gen_range(1..=3), rng.gen_range(0..=4), rng.gen_range(0..=4));
        let f = random_table(&mut rng, x, y);
        let p = if x > 0 && rng.gen_bool(0.5) {
            let h = random_table(&mut rng, w, x);
            h.iter().map(|&v| f[v]).collect()
        } else {
            random_table(&mut rng, w, y)
        };
        let got = cat.cancel_right_after(&set_map(f.clone(), x, y)?, &set_map(p.clone(), w, y)?)?;
        let want = oracles::right_cancels(y, &f, &p, 5);
        right_true += want as usize;
        let replay = || json!({ "y": y, "f": f, "p": p });
        run.record(laws[1], check(got == want, || format!("solver {} enumeration {}", got, want)), i, s, replay);
        if run.stopped() {
            break;
        }
    }
    run.note(format!("left cancellation held in {} of {} diagrams, right in {}", left_true, n, right_true));
    Ok(run.report)
}

fn snf(n: usize, seed: u64) -> Result<SuiteReport, ProError> {
    let laws = [
        "U·A·V = S",
        "U and V are unimodular",
        "S is diagonal with a divisibility chain",
        "invariant factors match gcds of minors",
    ];
    let mut run = Run::new("snf", n, seed, &laws);
    let det_of = |m: &IntMatrix| -> i128 {
        let rows = m.to_i64_rows().expect("small entries");
        oracles::determinant(&rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect::<Vec<_>>())
    };
    for i in 0..n {
        let s = instance_seed(seed, i);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let (r, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-5..=5)).collect()).collect();
        let a = IntMatrix::from_rows(&rows);
        let res = smith_normal_form(&a);
        let replay = || json!({ "matrix": rows });
        let product = res.u.mul(&a).and_then(|ua| ua.mul(&res.v));
        run.record(
            laws[0],
            check(product.as_ref().ok() == Some(&res.s), || format!("U·A·V differs from S for {:?}", rows)),
            i,
            s,
            replay,
        );
        let (du, dv) = (det_of(&res.u), det_of(&res.v));
        run.record(
            laws[1],
            check(du.abs() == 1 && dv.abs() == 1, || format!("det U = {}, det V = {}", du, dv)),
            i,
            s,
            replay,
        );
        let s_rows = res.s.to_i64_rows().expect("small entries");
        let off_diagonal_zero = (0..r).all(|p| (0..c).all(|q| p == q || s_rows[p][q] == 0));
        let d: Vec<i64> = (0..r.min(c)).map(|k| s_rows[k][k]).collect();
        let chain =
            d.iter().all(|&x| x >= 0) && d.windows(2).all(|w| if w[0] == 0 { w[1] == 0 } else { w[1] % w[0] == 0 });
        run.record(laws[2], check(off_diagonal_zero && chain, || format!("S = {:?}", s_rows)), i, s, replay);
        let nonzero: Vec<i128> = d.iter().filter(|&&x| x != 0).map(|&x| x as i128).collect();
        let want = oracles::invariant_factors_by_minors(&rows);
        run.record(
            laws[3],
            check(nonzero == want, || format!("diagonal {:?}, minors give {:?}", nonzero, want)),
            i,
            s,
            replay,
        );
        if run.stopped() {
            break;
        }
    }
    Ok(run.report)
}

// ---- reindexing ----

fn random_selector(rng: &mut ChaCha8Rng) -> Result<SubtowerSelector, ProError> {
    let mut prefix = vec![rng.gen_range(0..=2)];
    for _ in 0..rng.gen_range(0..=1) {
        let last = *prefix.last().unwrap();
        prefix.push(last + rng.gen_range(1..=2));
    }
    let steps = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(1..=3)).collect();
    SubtowerSelector::new(prefix, steps)
}

fn iso_outcome(g: &ProMorphism, h: usize) -> Result<Outcome, ProError> {
    match levelize(g, h) {
        Ok(lev) => Ok(match check_iso(&lev.level, h)? {
            Verdict::Holds(c) => match c.verify() {
                Ok(()) => Outcome::Pass,
                Err(e) => Outcome::Fail(format!("iso certificate rejected: {}", e)),
            },
            Verdict::Fails(cw) => Outcome::Fail(cw.to_string()),
            Verdict::Unknown(u) => Outcome::Fail(format!("iso undecided: {}", u.note)),
        }),
        Err(ProError::Unresolved { message, .. }) => Ok(Outcome::Fail(format!("levelization unresolved: {}", message))),
        Err(e) => Err(e),
    }
}

fn reindex(n: usize, seed: u64) -> Result<SuiteReport, ProError> {
    let laws =
        ["cofinite reindexing comparison is an isomorphism", "projection onto a cofinal subtower is an isomorphism"];
    let mut run = Run::new("reindex", n, seed, &laws);
    let posets = oracles::directed_posets(5);
    for (j, p) in posets.iter().enumerate() {
        let s = instance_seed(seed ^ 0x5EED, j);
        let y = random_system(&GeneratorParams::small(kind_for(j), s))?;
        let x = restrict_to_poset(&y, p)?;
        let r = cofinite_reindex(&x)?;
        let h = x.default_horizon();
        let replay = || to_json(&Instance::System(x.clone()));
        run.record(laws[0], Some(iso_outcome(&r.comparison, h)?), j, s, replay);
        if run.stopped() {
            return Ok(run.report);
        }
    }
    run.note(format!("{} directed posets with at most 5 elements, up to isomorphism", posets.len()));
    for i in 0..n {
        let s = instance_seed(seed, i);
        let x = random_system(&GeneratorParams::small(kind_for(i), s))?;
        let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0xA5A5);
        let sel = random_selector(&mut rng)?;
        let h = x.default_horizon() + 3 * sel.tail_steps().iter().sum::<usize>() + sel.prefix().last().unwrap();
        let g = projection_morphism(&x, &sel)?;
        let replay = || json!({ "system": to_json(&x), "selector": to_json(&sel) });
        run.record(laws[1], Some(iso_outcome(&g, h)?), i, s, replay);
        if run.stopped() {
            break;
        }
    }
    Ok(run.report)
}

// ---- certificate tampering ----

#[derive(Clone, Copy, Debug)]
enum Tamper {
    /// Move an entry to another index.
    Alpha,
    /// Lower a claimed least index, or push it to the trivial value.
    Beta,
    /// Change a witness morphism.
    Witness,
}

fn subject_index(c: &Certificate) -> Index {
    match &c.subject {
        Subject::Morphism(f) => f.index().clone(),
        Subject::System(x) => x.index().clone(),
    }
}

fn other_alpha(alpha: usize, stored: usize) -> usize {
    if stored <= 1 {
        1
    } else {
        (alpha + 1) % stored
    }
}

/// A strictly smaller (`down`) or larger index comparable to `beta`.
fn move_beta(index: &Index, beta: usize, down: bool, rng: &mut ChaCha8Rng) -> Option<usize> {
    match index {
        Index::Tower(_) => {
            if down {
                beta.checked_sub(1)
            } else {
                Some(beta + 1)
            }
        }
        Index::Poset(p) => {
            let options: Vec<usize> =
                (0..p.len()).filter(|&b| b != beta && if down { p.leq(b, beta) } else { p.leq(beta, b) }).collect();
            (!options.is_empty()).then(|| options[rng.gen_range(0..options.len())])
        }
    }
}

fn mutate(cat: &Category, m: &Morphism, rng: &mut ChaCha8Rng) -> Option<Morphism> {
    for _ in 0..8 {
        let changed = match m {
            Morphism::Set(s) => {
                let (n, k) = (s.source().len(), s.target().len());
                if n == 0 || k < 2 {
                    return None;
                }
                let i = rng.gen_range(0..n);
                let v = (s.table()[i] + rng.gen_range(1..k)) % k;
                Morphism::Set(s.with_entry(i, v).ok()?)
            }
            Morphism::Group(g) => {
                let (r, c) = g.matrix().shape();
                if r == 0 || c == 0 {
                    return None;
                }
                let mut mat = g.matrix().clone();
                let (i, j) = (rng.gen_range(0..r), rng.gen_range(0..c));
                let delta = if rng.gen_bool(0.5) { 1 } else { -1 };
                mat.set(i, j, mat.get(i, j) + delta);
                Morphism::Group(FgAbMorphism::new_unchecked(g.source().clone(), g.target().clone(), mat))
            }
        };
        if !cat.equal(&changed, m) {
            return Some(changed);
        }
    }
    None
}

/// Apply one tampering to a random applicable entry. `None` when nothing applies; the flag
/// tells whether a witness morphism was replaced.
fn tamper(c: &Certificate, kind: Tamper, reseal: bool, rng: &mut ChaCha8Rng) -> Option<(Certificate, bool)> {
    let mut out = c.clone();
    let index = subject_index(c);
    let stored = index.stored();
    let cat = c.subject.category().clone();
    let defaults = default_selectors();
    let mut order: Vec<usize> = (0..out.entries.len()).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), rng);
    for i in order {
        let mut morphism_changed = matches!(kind, Tamper::Witness);
        let e = &mut out.entries[i];
        let applied = match (e, kind) {
            (Entry::Mono { alpha, .. } | Entry::Epi { alpha, .. }, Tamper::Alpha)
            | (
                Entry::StrongMono { alpha, .. } | Entry::StrongEpi { alpha, .. } | Entry::Iso { alpha, .. },
                Tamper::Alpha,
            )
            | (Entry::Family { alpha, .. } | Entry::Lifts { alpha, .. }, Tamper::Alpha) => {
                *alpha = other_alpha(*alpha, stored);
                true
            }
            (
                Entry::Mono { beta, .. }
                | Entry::Epi { beta, .. }
                | Entry::StrongMono { beta, .. }
                | Entry::StrongEpi { beta, .. }
                | Entry::Iso { beta, .. },
                Tamper::Beta,
            ) => match move_beta(&index, *beta, true, rng) {
                Some(b) => {
                    *beta = b;
                    true
                }
                None => false,
            },
            (Entry::Mono { beta, .. } | Entry::Epi { beta, .. }, Tamper::Witness) => {
                match move_beta(&index, *beta, false, rng) {
                    Some(b) => {
                        *beta = b;
                        morphism_changed = false;
                        true
                    }
                    None => false,
                }
            }
            (Entry::StrongMono { g, .. } | Entry::StrongEpi { g, .. } | Entry::Iso { g, .. }, Tamper::Witness)
            | (Entry::Family { rho: g, .. } | Entry::Sequential { rho: g, .. }, Tamper::Witness)
            | (
                Entry::Premise { premise: Premise::Iso { inverse: g } | Premise::SplitEpi { section: g }, .. },
                Tamper::Witness,
            ) => match mutate(&cat, g, rng) {
                Some(m) => {
                    *g = m;
                    true
                }
                None => false,
            },
            (Entry::Lifts { lifts, .. }, Tamper::Witness) if !lifts.is_empty() => {
                let k = rng.gen_range(0..lifts.len());
                match mutate(&cat, &lifts[k].r, rng) {
                    Some(m) => {
                        lifts[k].r = m;
                        true
                    }
                    None => false,
                }
            }
            (Entry::Premise { slot, .. }, Tamper::Alpha | Tamper::Beta) => {
                *slot = stored;
                true
            }
            (Entry::Family { alpha, beta, .. } | Entry::Lifts { alpha, beta, .. }, Tamper::Beta) => {
                *beta = *alpha;
                true
            }
            (Entry::Sequential { selector, .. }, Tamper::Alpha) if defaults.contains(selector) => {
                let mut prefix = selector.prefix().to_vec();
                let steps = selector.tail_steps().to_vec();
                let mut bump = 1;
                loop {
                    prefix[0] = selector.prefix()[0] + bump;
                    let candidate = SubtowerSelector::new(prefix.clone(), steps.clone()).ok();
                    match candidate {
                        Some(s) if !defaults.contains(&s) => {
                            *selector = s;
                            break true;
                        }
                        Some(_) if bump < 4 => bump += 1,
                        _ => break false,
                    }
                }
            }
            (Entry::Sequential { selector, beta, .. }, Tamper::Beta) => {
                *beta = selector.at(0);
                true
            }
            (Entry::Stable { comparison, .. }, _) => match tamper(comparison, kind, reseal, rng) {
                Some((nested, changed)) => {
                    **comparison = nested;
                    morphism_changed = changed;
                    true
                }
                None => false,
            },
            (Entry::TailInverse { inverse, .. }, Tamper::Witness) => match mutate(&cat, inverse, rng) {
                Some(m) => {
                    *inverse = m;
                    true
                }
                None => false,
            },
            (Entry::TailInverse { slot, .. }, Tamper::Alpha | Tamper::Beta) => {
                *slot = if *slot + 1 < stored { *slot + 1 } else { stored };
                morphism_changed = false;
                true
            }
            (Entry::Maximum { element }, _) => {
                *element = if stored <= 1 { 1 } else { (*element + 1) % stored };
                morphism_changed = false;
                true
            }
            _ => false,
        };
        if applied {
            if reseal {
                out.reseal();
            }
            return Some((out, morphism_changed));
        }
    }
    None
}

/// `m` is a well-defined morphism `source → target`, checked with the base constructors.
fn well_formed(cat: &Category, m: &Morphism, source: &Object, target: &Object) -> bool {
    if cat.source(m) != *source || cat.target(m) != *target {
        return false;
    }
    match m {
        Morphism::Set(s) => FinSetMorphism::new(s.source().clone(), s.target().clone(), s.table().to_vec()).is_ok(),
        Morphism::Group(g) => FgAbMorphism::new(g.source().clone(), g.target().clone(), g.matrix().clone()).is_ok(),
    }
}

/// Whether every witness equation of `c` still holds, evaluated directly with composition
/// and equality in the base category. Used to discard tamperings that produce another
/// valid witness.
fn witnesses_hold(c: &Certificate) -> Result<bool, ProError> {
    let cat = c.subject.category().clone();
    let eq = |a: &Morphism, b: &Morphism| cat.equal(a, b);
    for e in &c.entries {
        let ok = match (&c.subject, e) {
            (Subject::Morphism(f), Entry::StrongMono { alpha, beta, g }) => {
                well_formed(&cat, g, f.target().object(*beta), f.source().object(*alpha))
                    && eq(&cat.compose(g, &f.component(*beta)?)?, &f.source().bond(*beta, *alpha)?)
            }
            (Subject::Morphism(f), Entry::StrongEpi { alpha, beta, g }) => {
                well_formed(&cat, g, f.target().object(*beta), f.source().object(*alpha))
                    && eq(&cat.compose(&f.component(*alpha)?, g)?, &f.target().bond(*beta, *alpha)?)
            }
            (Subject::Morphism(f), Entry::Iso { alpha, beta, g }) => {
                well_formed(&cat, g, f.target().object(*beta), f.source().object(*alpha))
                    && eq(&cat.compose(g, &f.component(*beta)?)?, &f.source().bond(*beta, *alpha)?)
                    && eq(&cat.compose(&f.component(*alpha)?, g)?, &f.target().bond(*beta, *alpha)?)
            }
            (
                Subject::Morphism(f),
                Entry::Premise { slot, premise: Premise::Iso { inverse: w } | Premise::SplitEpi { section: w } },
            ) => {
                let o = f.source().object(*slot);
                let q = f.source().period_bond(*slot)?;
                let id = cat.identity(o)?;
                let right = well_formed(&cat, w, o, o) && eq(&cat.compose(&q, w)?, &id);
                match e {
                    Entry::Premise { premise: Premise::Iso { .. }, .. } => right && eq(&cat.compose(w, &q)?, &id),
                    _ => right,
                }
            }
            (Subject::System(x), Entry::Family { alpha, beta, gamma, cycles, rho }) => {
                let t = x.tower_index().unwrap();
                well_formed(&cat, rho, x.object(*beta), x.object(*gamma))
                    && eq(&cat.compose(&x.bond(gamma + cycles * t.tail_period, *gamma)?, rho)?, rho)
                    && eq(&cat.compose(&x.bond(*gamma, *alpha)?, rho)?, &x.bond(*beta, *alpha)?)
            }
            (Subject::System(x), Entry::Lifts { alpha, beta, lifts }) => {
                let mut all = true;
                for l in lifts {
                    all &= well_formed(&cat, &l.r, x.object(*beta), x.object(l.gamma))
                        && eq(&cat.compose(&x.bond(l.gamma, *alpha)?, &l.r)?, &x.bond(*beta, *alpha)?);
                }
                all
            }
            (Subject::System(x), Entry::Sequential { selector, beta, gamma, cycles, rho }) => {
                let z = subtower(x, selector)?;
                let t = z.tower_index().unwrap();
                well_formed(&cat, rho, x.object(*beta), z.object(*gamma))
                    && eq(&cat.compose(&z.bond(gamma + cycles * t.tail_period, *gamma)?, rho)?, rho)
                    && eq(&cat.compose(&z.bond(*gamma, 0)?, rho)?, &x.bond(*beta, selector.at(0))?)
            }
            (Subject::System(x), Entry::TailInverse { slot, inverse }) => {
                let step = x.step(*slot);
                well_formed(&cat, inverse, x.object(*slot), x.object(slot + 1))
                    && eq(&cat.compose(step, inverse)?, &cat.identity(x.object(*slot))?)
                    && eq(&cat.compose(inverse, step)?, &cat.identity(x.object(slot + 1))?)
            }
            (_, Entry::Stable { comparison, .. }) => witnesses_hold(comparison)?,
            _ => true,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Holds certificates for every property: from the scenarios, random instances and
/// systems over finite posets.
fn certificate_pool(seed: u64) -> Result<BTreeMap<Property, Vec<Certificate>>, ProError> {
    const CAP: usize = 12;
    let mut pool: BTreeMap<Property, Vec<Certificate>> = BTreeMap::new();
    let mut add = |v: Verdict| {
        if let Verdict::Holds(c) = v {
            let list = pool.entry(c.property).or_default();
            if list.len() < CAP {
                list.push(c);
            }
        }
    };
    for sc in builtin_scenarios() {
        for ex in &sc.expectations {
            let v = match &sc.subject {
                Instance::Morphism(f) => check_morphism(ex.property, f, ex.horizon)?,
                Instance::System(x) => check_system(ex.property, x, ex.horizon)?,
            };
            add(v);
        }
    }
    for i in 0..40 {
        let s = instance_seed(seed, i);
        let kind = kind_for(i);
        let f = random_morphism(&GeneratorParams::small(kind, s))?;
        let h = f.index().default_horizon();
        for p in Property::ALL.iter().filter(|p| p.is_morphism_property()) {
            add(check_morphism(*p, &f, h)?);
        }
        let x = random_system(&GeneratorParams::small(kind, s))?;
        let h = x.default_horizon();
        for p in Property::ALL.iter().filter(|p| !p.is_morphism_property()) {
            add(check_system(*p, &x, h)?);
        }
    }
    for (j, p) in oracles::directed_posets(4).iter().enumerate().skip(2) {
        let s = instance_seed(seed ^ 0xB0B, j);
        let f = random_morphism(&GeneratorParams::small(kind_for(j), s))?;
        let fp = restrict_morphism_to_poset(&f, p)?;
        let h = fp.index().default_horizon();
        for q in Property::ALL.iter().filter(|q| q.is_morphism_property()) {
            add(check_morphism(*q, &fp, h)?);
        }
        add(check_stability(fp.source(), h)?);
    }
    Ok(pool)
}

fn certificates(n: usize, seed: u64) -> Result<SuiteReport, ProError> {
    let mut run = Run::new("certificates", n, seed, &[]);
    let pool = certificate_pool(seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for property in Property::ALL {
        let replay_law = format!("{} certificates replay", property);
        let tamper_law = format!("tampered {} certificates are rejected", property);
        let Some(certs) = pool.get(&property).filter(|c| !c.is_empty()) else {
            run.note(format!("no {} certificate in the pool", property));
            run.tally(&tamper_law);
            continue;
        };
        for (k, c) in certs.iter().enumerate() {
            let v = Verdict::Holds(c.clone());
            run.record(&replay_law, replays(&v), k, seed, || to_json(c));
        }
        let (mut digest, mut replay, mut excluded, mut inapplicable) = (0, 0, 0, 0);
        let mut done = 0;
        let mut attempts = 0;
        while done < n && attempts < 20 * n.max(1) {
            let kind = [Tamper::Alpha, Tamper::Beta, Tamper::Witness][attempts % 3];
            let reseal = (attempts / 3) % 2 == 1;
            let c = &certs[attempts % certs.len()];
            attempts += 1;
            let Some((t, changed)) = tamper(c, kind, reseal, &mut rng) else {
                inapplicable += 1;
                continue;
            };
            if changed && witnesses_hold(&t)? {
                excluded += 1;
                continue;
            }
            done += 1;
            let outcome = match t.verify() {
                Err(e) => {
                    if e.caught_by() == "digest" {
                        digest += 1;
                    } else {
                        replay += 1;
                    }
                    Outcome::Pass
                }
                Ok(()) => Outcome::Fail(format!("{:?} tampering (resealed: {}) was accepted", kind, reseal)),
            };
            run.record(
                &tamper_law,
                Some(outcome),
                done,
                seed,
                || json!({ "original": to_json(c), "tampered": to_json(&t) }),
            );
            if run.stopped() {
                return Ok(run.report);
            }
        }
        run.note(format!(
            "{}: {} tamperings, caught by digest {}, by replay {}; {} witness changes gave another valid witness, {} draws had no applicable entry",
            property, done, digest, replay, excluded, inapplicable
        ));
    }
    Ok(run.report)
}

// ---- bimorphic subtowers ----

fn table(m: &Morphism) -> Vec<usize> {
    m.as_set().expect("finite-set morphism").table().to_vec()
}

/// The map of inverse limits induced by `f`, as a bijection check on threads.
fn limit_map_is_bijective(f: &LevelMorphism) -> Result<bool, ProError> {
    let (lx, px) = inverse_limit_finset_tower(f.source())?;
    let (ly, py) = inverse_limit_finset_tower(f.target())?;
    let t = f.index().as_tower().copied().unwrap();
    let depth = t.stored() + 2 * t.tail_period;
    let mut hit = vec![0usize; ly.len()];
    for thread in 0..lx.len() {
        let image: Vec<usize> = (0..depth)
            .map(|a| Ok(f.component(a)?.as_set().unwrap().apply(px.rep(a)?.as_set().unwrap().apply(thread))))
            .collect::<Result<_, ProError>>()?;
        let matches: Vec<usize> = (0..ly.len())
            .filter(|&u| {
                (0..depth).all(|a| py.rep(a).map(|m| m.as_set().unwrap().apply(u) == image[a]).unwrap_or(false))
            })
            .collect();
        if matches.len() != 1 {
            return Ok(false);
        }
        hit[matches[0]] += 1;
    }
    Ok(hit.iter().all(|&k| k == 1))
}

fn bimorphic_subtower(n: usize, seed: u64) -> Result<SuiteReport, ProError> {
    let laws =
        ["extracted subtower passes exhaustive level checks", "bimorphism induces a bijection of inverse limits"];
    let mut run = Run::new("bimorphic-subtower", n, seed, &laws);
    for i in 0..n {
        let s = instance_seed(seed, i);
        let f = random_morphism(&GeneratorParams::small(Kind::FinSet, s))?;
        let h = f.index().default_horizon();
        if !check_bimorphism(&f, h)?.holds() {
            continue;
        }
        let replay = || to_json(&Instance::Morphism(f.clone()));
        let outcome = match extract_bimorphic_subtower(&f, h)? {
            None => Outcome::Skip,
            Some((_, fs)) => {
                let t = fs.index().as_tower().copied().unwrap();
                let (xs, ys) = (fs.source(), fs.target());
                let mut bad = None;
                for k in 0..t.stored() + t.tail_period {
                    let mono = oracles::left_cancels(
                        xs.object(k + 1).as_set().unwrap().len(),
                        &table(&fs.component(k + 1)?),
                        &table(&xs.bond(k + 1, k)?),
                        5,
                    );
                    let epi = oracles::right_cancels(
                        ys.object(k).as_set().unwrap().len(),
                        &table(&fs.component(k)?),
                        &table(&ys.bond(k + 1, k)?),
                        5,
                    );
                    if !(mono && epi) {
                        bad = Some(k);
                        break;
                    }
                }
                match bad {
                    None => Outcome::Pass,
                    Some(k) => Outcome::Fail(format!("step {} of the subtower fails the exhaustive check", k)),
                }
            }
        };
        run.record(laws[0], Some(outcome), i, s, replay);
        run.record(laws[1], check(limit_map_is_bijective(&f)?, || "limit map is not a bijection".into()), i, s, replay);
        if run.stopped() {
            break;
        }
    }
    Ok(run.report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(run_suite("bogus", 1, 0), Err(SuiteError::Unknown(_))));
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_suite("finset-collapse", 8, 3).unwrap();
        let b = run_suite("finset-collapse", 8, 3).unwrap();
        assert_eq!(a, b);
    }
}
