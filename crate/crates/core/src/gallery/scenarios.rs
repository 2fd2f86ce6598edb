use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::random::Instance;
use crate::categories::{Category, FgAbMorphism, FgAbObject, FinSetMorphism, FinSetObject, Morphism, Object};
use crate::deciders::{check_morphism, check_system, Entry, Property, Verdict};
use crate::prosys::{inverse_limit_finset_tower, InverseSystem, LevelMorphism, ProError, Tail, TowerIndex};
use crate::zlinalg::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expected {
    Holds,
    /// Holds, with a stability witness that is the trivial object.
    HoldsTrivially,
    Fails {
        alpha: Option<usize>,
    },
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Holds => write!(f, "Holds"),
            Expected::HoldsTrivially => write!(f, "Holds (≅ 0)"),
            Expected::Fails { alpha: Some(a) } => write!(f, "Fails at α={}", a),
            Expected::Fails { alpha: None } => write!(f, "Fails"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Expectation {
    pub property: Property,
    pub horizon: usize,
    pub expected: Expected,
}

/// A named instance with the verdicts it must produce and an independent check of the
/// facts behind them.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: &'static str,
    pub summary: &'static str,
    pub subject: Instance,
    pub expectations: Vec<Expectation>,
    pub oracle: fn(&Instance) -> Result<(), String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioLine {
    pub property: Property,
    pub expected: Expected,
    pub got: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub lines: Vec<ScenarioLine>,
    pub oracle: Result<(), String>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.oracle.is_ok() && self.lines.iter().all(|l| l.ok)
    }
}

impl fmt::Display for ScenarioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {}: {}", self.name, if self.passed() { "ok" } else { "MISMATCH" })?;
        for l in &self.lines {
            writeln!(
                f,
                "  {:<22} expected {:<16} got {:<8} {}{}",
                l.property.name(),
                l.expected.to_string(),
                l.got,
                if l.ok { "ok" } else { "MISMATCH" },
                if l.detail.is_empty() { String::new() } else { format!("  [{}]", l.detail) }
            )?;
        }
        match &self.oracle {
            Ok(()) => writeln!(f, "  oracle ok"),
            Err(e) => writeln!(f, "  oracle FAILED: {}", e),
        }
    }
}

/// Short human description of a verdict: the failing index or the stability witness.
pub fn verdict_detail(v: &Verdict) -> String {
    match v {
        Verdict::Holds(c) => match c.entries.first() {
            Some(Entry::Stable { object, alpha, .. }) => stable_witness(object, *alpha),
            _ => String::new(),
        },
        Verdict::Fails(cw) => cw.to_string(),
        Verdict::Unknown(u) => u.note.clone(),
    }
}

/// "≅ 0" for a trivial witness, otherwise the level it came from.
pub fn stable_witness(object: &Object, alpha: Option<usize>) -> String {
    let trivial = match object {
        Object::Group(g) => g.is_trivial(),
        Object::Set(s) => s.len() == 1,
    };
    match (trivial, alpha) {
        (true, _) => "≅ 0".to_string(),
        (false, Some(a)) => format!("witness α={}", a),
        (false, None) => format!("witness {}", object.describe()),
    }
}

fn matches(expected: &Expected, v: &Verdict) -> bool {
    match (expected, v) {
        (Expected::Holds, Verdict::Holds(_)) => true,
        (Expected::HoldsTrivially, Verdict::Holds(c)) => {
            matches!(c.entries.first(), Some(Entry::Stable { object, .. }) if stable_witness(object, None) == "≅ 0")
        }
        (Expected::Fails { alpha }, Verdict::Fails(cw)) => alpha.is_none() || *alpha == cw.alpha,
        _ => false,
    }
}

pub fn run_scenario(s: &Scenario) -> Result<ScenarioReport, ProError> {
    let mut lines = Vec::new();
    for e in &s.expectations {
        let v = match &s.subject {
            Instance::Morphism(f) => check_morphism(e.property, f, e.horizon)?,
            Instance::System(x) => check_system(e.property, x, e.horizon)?,
        };
        let mut ok = matches(&e.expected, &v);
        if let Verdict::Holds(c) = &v {
            if let Err(err) = c.verify() {
                ok = false;
                lines.push(ScenarioLine {
                    property: e.property,
                    expected: e.expected.clone(),
                    got: "Holds".into(),
                    ok,
                    detail: format!("certificate rejected: {}", err),
                });
                continue;
            }
        }
        lines.push(ScenarioLine {
            property: e.property,
            expected: e.expected.clone(),
            got: v.label().to_string(),
            ok,
            detail: verdict_detail(&v),
        });
    }
    Ok(ScenarioReport { name: s.name.to_string(), lines, oracle: (s.oracle)(&s.subject) })
}

pub fn find_scenario(name: &str) -> Option<Scenario> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}

fn z() -> FgAbObject {
    FgAbObject::free(1)
}

fn int_map(a: &FgAbObject, b: &FgAbObject, k: i64) -> FgAbMorphism {
    FgAbMorphism::new(a.clone(), b.clone(), IntMatrix::from_rows(&[vec![k]])).expect("scalar map between cyclic groups")
}

fn expect(property: Property, horizon: usize, expected: Expected) -> Expectation {
    Expectation { property, horizon, expected }
}

/// The projection `ℤ → ℤ/2` between constant systems.
pub fn z_to_z2() -> LevelMorphism {
    let (a, b) = (z(), FgAbObject::cyclic(2));
    let x = InverseSystem::constant(Category::FgAb, a.clone().into()).unwrap();
    let y = InverseSystem::constant(Category::FgAb, b.clone().into()).unwrap();
    LevelMorphism::new(x, y, vec![int_map(&a, &b, 1).into()], Tail::Periodic).unwrap()
}

/// `ℤ ←×2− ℤ ←×2− ⋯`.
pub fn dyadic_tower() -> InverseSystem {
    InverseSystem::periodic(Category::FgAb, z().into(), int_map(&z(), &z(), 2).into()).unwrap()
}

/// The dyadic tower into constant `ℤ` with `f_n = ×2ⁿ`.
pub fn dyadic_to_z() -> LevelMorphism {
    let y = InverseSystem::constant(Category::FgAb, z().into()).unwrap();
    LevelMorphism::new(dyadic_tower(), y, vec![int_map(&z(), &z(), 1).into()], Tail::Anchored).unwrap()
}

/// `ℤ ⊕ ℤ/4` with identity bonds.
pub fn constant_tower() -> InverseSystem {
    InverseSystem::constant(Category::FgAb, z().direct_sum(&FgAbObject::cyclic(4)).into()).unwrap()
}

/// `ℤ/8` with bonds `×2`: every composite of three bonds is zero.
pub fn z8_nilpotent() -> InverseSystem {
    let g = FgAbObject::cyclic(8);
    InverseSystem::periodic(Category::FgAb, g.clone().into(), int_map(&g, &g, 2).into()).unwrap()
}

/// Four points with bond `0→1, 1→0, 2→0, 3→2`: the images shrink to the 2-cycle `{0, 1}`.
pub fn finset_eventual_image() -> InverseSystem {
    let s = FinSetObject::range(4);
    let bond = FinSetMorphism::new(s.clone(), s.clone(), vec![1, 0, 0, 2]).unwrap();
    let idx = TowerIndex::new(1, 1).unwrap();
    let point = FinSetObject::point();
    let to_point = FinSetMorphism::new(s.clone(), point.clone(), vec![0; 4]).unwrap();
    InverseSystem::tower(
        Category::FinSet,
        idx,
        vec![Object::Set(point), Object::Set(s)],
        vec![Morphism::Set(to_point), Morphism::Set(bond)],
    )
    .unwrap()
}

fn group_of(o: &Object) -> &FgAbObject {
    o.as_group().expect("group scenario")
}

fn oracle_z_to_z2(i: &Instance) -> Result<(), String> {
    let Instance::Morphism(f) = i else { return Err("expected a morphism".into()) };
    let m = f.component(0).map_err(|e| e.to_string())?;
    let m = m.as_group().unwrap();
    // Surjective: the generator of ℤ hits the generator of ℤ/2.
    if (m.matrix().get(0, 0) % 2u8) == 0u8.into() {
        return Err("ℤ → ℤ/2 is not onto".into());
    }
    // A right inverse s would send 1 ∈ ℤ/2 to some n ∈ ℤ with 2n = 0, so n = 0 and f s = 0 ≠ id.
    let homs = Category::FgAb
        .enumerate_homs(&Object::Group(FgAbObject::cyclic(2)), &Object::Group(z()), 8)
        .map_err(|e| e.to_string())?;
    if homs.morphisms.iter().any(|h| !h.as_group().unwrap().matrix().is_zero()) {
        return Err("found a nonzero homomorphism ℤ/2 → ℤ".into());
    }
    Ok(())
}

fn oracle_dyadic_to_z(i: &Instance) -> Result<(), String> {
    let Instance::Morphism(f) = i else { return Err("expected a morphism".into()) };
    for beta in 0..=6usize {
        let fb = f.component(beta).map_err(|e| e.to_string())?;
        let k = fb.as_group().unwrap().matrix().get(0, 0).clone();
        if k != (1i64 << beta).into() {
            return Err(format!("f_{} is ×{}, expected ×2^{}", beta, k, beta));
        }
        // A left factor g with g·2^β = 2^(β-1) would be the integer 1/2.
        if beta >= 1 && (1i64 << (beta - 1)) % (1i64 << beta) == 0 {
            return Err(format!("×2^{} has an integer left factor onto 2^{}", beta, beta - 1));
        }
    }
    Ok(())
}

fn oracle_constant(i: &Instance) -> Result<(), String> {
    let Instance::System(x) = i else { return Err("expected a system".into()) };
    let cat = x.category();
    for n in 0..4 {
        let id = cat.identity(x.object(n)).map_err(|e| e.to_string())?;
        if !cat.equal(&x.bond(n + 1, n).map_err(|e| e.to_string())?, &id) {
            return Err(format!("bond at {} is not the identity", n));
        }
    }
    Ok(())
}

fn oracle_dyadic(i: &Instance) -> Result<(), String> {
    let Instance::System(x) = i else { return Err("expected a system".into()) };
    // im p^{k}_0 = 2^k ℤ: strictly smaller for every k.
    for k in 0..6 {
        let m = x.bond(k, 0).map_err(|e| e.to_string())?;
        let d = m.as_group().unwrap().matrix().get(0, 0).clone();
        if d != (1i64 << k).into() {
            return Err(format!("p^{}_0 is ×{}", k, d));
        }
    }
    if group_of(x.object(0)).is_finite() {
        return Err("ℤ should be infinite".into());
    }
    Ok(())
}

fn oracle_z8(i: &Instance) -> Result<(), String> {
    let Instance::System(x) = i else { return Err("expected a system".into()) };
    // 2·2·2 = 8 ≡ 0.
    let m = x.bond(3, 0).map_err(|e| e.to_string())?;
    let k = m.as_group().unwrap().matrix().get(0, 0).clone();
    if &k % 8u8 != 0u8.into() {
        return Err(format!("p^3_0 is ×{} on ℤ/8, not zero", k));
    }
    Ok(())
}

fn oracle_finset_limit(i: &Instance) -> Result<(), String> {
    let Instance::System(x) = i else { return Err("expected a system".into()) };
    // Threads correspond to periodic points of the tail bond.
    let q = x.period_bond(1).map_err(|e| e.to_string())?;
    let q = q.as_set().unwrap().clone();
    let periodic: BTreeSet<usize> = (0..q.source().len())
        .filter(|&e| (1..=q.source().len()).any(|k| (0..k).fold(e, |v, _| q.apply(v)) == e))
        .collect();
    let (limit, _) = inverse_limit_finset_tower(x).map_err(|e| e.to_string())?;
    if limit.len() != periodic.len() || periodic.len() != 2 {
        return Err(format!("limit has {} points, periodic points {}", limit.len(), periodic.len()));
    }
    Ok(())
}

pub fn builtin_scenarios() -> Vec<Scenario> {
    use Expected::*;
    use Property::*;
    vec![
        Scenario {
            name: "z-to-z2",
            summary: "projection ℤ → ℤ/2: an epimorphism without a right inverse",
            subject: Instance::Morphism(z_to_z2()),
            expectations: vec![
                expect(Epi, 3, Holds),
                expect(StrongEpi, 3, Fails { alpha: Some(0) }),
                expect(Mono, 3, Fails { alpha: Some(0) }),
                expect(Iso, 3, Fails { alpha: Some(0) }),
                expect(Bimorphism, 3, Fails { alpha: Some(0) }),
            ],
            oracle: oracle_z_to_z2,
        },
        Scenario {
            name: "dyadic-to-z",
            summary: "dyadic tower into ℤ with f_n = ×2ⁿ: mono but not strong mono",
            subject: Instance::Morphism(dyadic_to_z()),
            expectations: vec![
                expect(Mono, 6, Holds),
                expect(StrongMono, 6, Fails { alpha: Some(1) }),
                expect(Epi, 6, Fails { alpha: Some(1) }),
                expect(Bimorphism, 6, Fails { alpha: None }),
            ],
            oracle: oracle_dyadic_to_z,
        },
        Scenario {
            name: "constant-tower",
            summary: "ℤ ⊕ ℤ/4 with identity bonds",
            subject: Instance::System(constant_tower()),
            expectations: vec![
                expect(Movable, 3, Holds),
                expect(UniformlyMovable, 3, Holds),
                expect(SequentiallyMovable, 3, Holds),
                expect(Stable, 3, Holds),
            ],
            oracle: oracle_constant,
        },
        Scenario {
            name: "constant-identity",
            summary: "identity of the constant tower ℤ ⊕ ℤ/4",
            subject: Instance::Morphism(LevelMorphism::identity(&constant_tower()).unwrap()),
            expectations: [Mono, Epi, StrongMono, StrongEpi, Iso, Bimorphism]
                .into_iter()
                .map(|p| expect(p, 3, Holds))
                .collect(),
            oracle: |_| Ok(()),
        },
        Scenario {
            name: "dyadic",
            summary: "ℤ with bonds ×2: mono bonds that never become iso",
            subject: Instance::System(dyadic_tower()),
            expectations: vec![
                expect(Movable, 8, Fails { alpha: Some(0) }),
                expect(UniformlyMovable, 8, Fails { alpha: Some(0) }),
                expect(SequentiallyMovable, 8, Fails { alpha: Some(0) }),
                expect(Stable, 8, Fails { alpha: Some(0) }),
            ],
            oracle: oracle_dyadic,
        },
        Scenario {
            name: "z8-nilpotent",
            summary: "ℤ/8 with bonds ×2: pro-isomorphic to 0",
            subject: Instance::System(z8_nilpotent()),
            expectations: vec![
                expect(Stable, 6, HoldsTrivially),
                expect(Movable, 6, Holds),
                expect(UniformlyMovable, 6, Holds),
            ],
            oracle: oracle_z8,
        },
        Scenario {
            name: "finset-eventual-image",
            summary: "four points shrinking onto a 2-cycle; the inverse limit has two threads",
            subject: Instance::System(finset_eventual_image()),
            expectations: vec![
                expect(Movable, 6, Holds),
                expect(UniformlyMovable, 6, Holds),
                expect(SequentiallyMovable, 6, Holds),
                expect(Stable, 6, Holds),
            ],
            oracle: oracle_finset_limit,
        },
    ]
}
