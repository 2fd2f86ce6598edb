//! One PASS/FAIL line per acceptance criterion. Runs without the test harness so the lines
//! always print; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use procat::cli::{self, EXIT_HOLDS};
use procat::deciders::{check_morphism, check_system, Entry, Property, Verdict};
use procat::gallery::scenarios::{constant_tower, dyadic_to_z, dyadic_tower, stable_witness, z8_nilpotent, z_to_z2};
use procat::gallery::{builtin_scenarios, run_scenario, run_suite, Instance, SuiteReport};

/// Wall-clock budget for the two motivating morphism scenarios.
const SCENARIO_BUDGET: Duration = Duration::from_secs(1);
/// Largest horizon the motivating scenarios may need.
const SCENARIO_HORIZON: usize = 6;
const SEED: u64 = 7;

struct Board {
    lines: Vec<(usize, bool, String)>,
}

impl Board {
    fn record(&mut self, criterion: usize, ok: bool, detail: impl Into<String>) {
        let detail = detail.into();
        println!("criterion {}: {} {}", criterion, if ok { "PASS" } else { "FAIL" }, detail);
        self.lines.push((criterion, ok, detail));
    }

    fn suite(&mut self, criterion: usize, name: &str, n: usize) -> SuiteReport {
        let report = run_suite(name, n, SEED).expect("known suite");
        let detail = match &report.violation {
            None => format!("({} n={} seed={}: zero violations)", name, n, SEED),
            Some(v) => format!("({} n={}: {} violated at instance {}: {})", name, n, v.law, v.instance, v.detail),
        };
        self.record(criterion, report.passed(), detail);
        report
    }
}

fn verdict(property: Property, f: &procat::prosys::LevelMorphism) -> Verdict {
    check_morphism(property, f, SCENARIO_HORIZON).expect("scenario morphisms are well formed")
}

fn criterion_1(board: &mut Board) {
    let start = Instant::now();
    let (a, b) = (z_to_z2(), dyadic_to_z());
    let epi = verdict(Property::Epi, &a);
    let strong_epi = verdict(Property::StrongEpi, &a);
    let mono = verdict(Property::Mono, &b);
    let strong_mono = verdict(Property::StrongMono, &b);
    let elapsed = start.elapsed();
    let ok = epi.holds()
        && strong_epi.fails()
        && mono.holds()
        && matches!(strong_mono.counter_witness(), Some(cw) if cw.alpha == Some(1))
        && elapsed < SCENARIO_BUDGET;
    board.record(
        1,
        ok,
        format!(
            "(ℤ→ℤ/2: epi {}, strong-epi {}; dyadic→ℤ: mono {}, strong-mono {} at α={:?}; {:?})",
            epi.label(),
            strong_epi.label(),
            mono.label(),
            strong_mono.label(),
            strong_mono.counter_witness().and_then(|c| c.alpha),
            elapsed
        ),
    );
}

fn criterion_6(board: &mut Board) {
    let h = 12;
    let constant = constant_tower();
    let movable = check_system(Property::Movable, &constant, h).unwrap();
    let stable = check_system(Property::Stable, &constant, h).unwrap();

    let dyadic = dyadic_tower();
    let d_movable = check_system(Property::Movable, &dyadic, h).unwrap();
    let d_stable = check_system(Property::Stable, &dyadic, h).unwrap();
    // Bonds are monomorphisms, so not stable, not movable and not eventually iso coincide.
    let cat = dyadic.category().clone();
    let eventually_iso = dyadic.steps().iter().all(|s| cat.is_iso(s).unwrap());

    let z8 = z8_nilpotent();
    let z8_stable = check_system(Property::Stable, &z8, h).unwrap();
    let trivial = match z8_stable.certificate().and_then(|c| c.entries.first()) {
        Some(Entry::Stable { object, .. }) => stable_witness(object, None) == "≅ 0",
        _ => false,
    };

    let ok = movable.holds()
        && stable.holds()
        && d_movable.fails()
        && d_stable.fails()
        && !eventually_iso
        && z8_stable.holds()
        && trivial;
    board.record(
        6,
        ok,
        format!(
            "(constant: movable {}, stable {}; dyadic: movable {}, stable {}, eventually iso {}; ℤ/8 nilpotent: stable {}{})",
            movable.label(),
            stable.label(),
            d_movable.label(),
            d_stable.label(),
            eventually_iso,
            z8_stable.label(),
            if trivial { " ≅ 0" } else { "" }
        ),
    );
}

fn criterion_8(board: &mut Board) {
    let report = board.suite(8, "certificates", 50);
    let dir = tempfile::tempdir().unwrap();
    let (mut verified, mut rejected) = (0, Vec::new());
    for s in builtin_scenarios() {
        for e in &s.expectations {
            let v = match &s.subject {
                Instance::Morphism(f) => check_morphism(e.property, f, e.horizon).unwrap(),
                Instance::System(x) => check_system(e.property, x, e.horizon).unwrap(),
            };
            let Some(c) = v.certificate() else { continue };
            let path = dir.path().join(format!("{}-{}.cert.json", s.name, e.property));
            std::fs::write(&path, c.to_json()).unwrap();
            let out = cli::cmd_verify(&path, None);
            if out.code == EXIT_HOLDS {
                verified += 1;
            } else {
                rejected.push(format!("{}/{}: {}", s.name, e.property, out.stderr.trim()));
            }
        }
    }
    for note in &report.notes {
        println!("    {}", note);
    }
    board.record(
        8,
        rejected.is_empty() && verified > 0,
        format!("(cmd_verify accepted {} scenario certificates, rejected {:?})", verified, rejected),
    );
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut board = Board { lines: Vec::new() };
    criterion_1(&mut board);
    board.suite(2, "finset-collapse", 200);
    let lattice = board.suite(3, "implication-lattice", 200);
    let filler = lattice.law("strong mono and epi fill the identity square, and f is iso");
    board.record(
        3,
        filler.is_some_and(|t| t.passed > 0 && t.failed == 0),
        format!("(identity-square filler exercised {} times)", filler.map_or(0, |t| t.passed)),
    );
    board.suite(4, "finset-oracle", 100);
    board.suite(5, "snf", 100);
    criterion_6(&mut board);
    for s in builtin_scenarios() {
        let r = run_scenario(&s).unwrap();
        if !r.passed() {
            board.record(6, false, format!("(scenario {} mismatched)\n{}", s.name, r));
        }
    }
    board.suite(7, "reindex", 50);
    criterion_8(&mut board);
    board.suite(9, "tor-preserves-strong-mono", 100);
    println!("acceptance run took {:?}", start.elapsed());

    let failed: Vec<usize> = board.lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
    if failed.is_empty() {
        println!("all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {:?}", failed);
        ExitCode::FAILURE
    }
}
