//! Command implementations behind the `procat` binary. Each command returns its exit code
//! and the text it would print, so tests can drive it without a process.

pub mod document;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use document::{check_subject, SubjectRef};
pub use document::{parse_document, serialize_document, DocError, Query, Workspace, DOC_FORMAT};

use crate::deciders::{
    check_morphism, check_system, Certificate, CounterWitness, Property, Subject, Unresolved, Verdict,
};
use crate::gallery::scenarios::verdict_detail;
use crate::gallery::{builtin_scenarios, find_scenario, run_scenario, run_suite, Instance, SuiteError, SUITES};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_IO: i32 = 74;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn error(code: i32, message: impl std::fmt::Display) -> Self {
        Outcome { code, stdout: String::new(), stderr: format!("error: {}\n", message) }
    }
}

fn entry_count(n: usize) -> String {
    format!("{} {}", n, if n == 1 { "entry" } else { "entries" })
}

/// One answered query, printable for people and as JSON.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputRecord {
    pub property: Property,
    pub subject: String,
    pub horizon: usize,
    pub verdict: &'static str,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counter_witness: Option<CounterWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unresolved: Option<Unresolved>,
    pub elapsed_ms: f64,
}

impl OutputRecord {
    fn exit_code(&self) -> i32 {
        match self.verdict {
            "Holds" => EXIT_HOLDS,
            "Fails" => EXIT_FAILS,
            _ => EXIT_UNKNOWN,
        }
    }

    fn human(&self) -> String {
        let mut s = format!("{} {} (horizon {}): {}", self.property, self.subject, self.horizon, self.verdict);
        if !self.detail.is_empty() {
            write!(s, "\n  {}", self.detail).unwrap();
        }
        if let Some(u) = &self.unresolved {
            write!(s, "\n  {}", u.note).unwrap();
        }
        if let Some(c) = &self.certificate {
            write!(
                s,
                "\n  certificate: {}, {:?} coverage, digest {}",
                entry_count(c.entries.len()),
                c.coverage,
                &c.digest[..12]
            )
            .unwrap();
        }
        s
    }
}

fn answer(ws: &Workspace, q: &Query) -> Result<OutputRecord, String> {
    let start = Instant::now();
    let (verdict, horizon) = match ws.subject(&q.subject) {
        Some(SubjectRef::Morphism(f)) => {
            let h = q.horizon.unwrap_or_else(|| f.index().default_horizon());
            (check_morphism(q.property, f, h), h)
        }
        Some(SubjectRef::System(x)) => {
            let h = q.horizon.unwrap_or_else(|| x.default_horizon());
            (check_system(q.property, x, h), h)
        }
        None => return Err(format!("no subject named {:?}", q.subject)),
    };
    let verdict = verdict.map_err(|e| format!("{} {}: {}", q.property, q.subject, e))?;
    let detail = verdict_detail(&verdict);
    let (certificate, counter_witness, unresolved) = match &verdict {
        Verdict::Holds(c) => (Some(c.clone()), None, None),
        Verdict::Fails(cw) => (None, Some(cw.clone()), None),
        Verdict::Unknown(u) => (None, None, Some(u.clone())),
    };
    Ok(OutputRecord {
        property: q.property,
        subject: q.subject.clone(),
        horizon,
        verdict: verdict.label(),
        detail,
        certificate,
        counter_witness,
        unresolved,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Answer queries on worker threads; records come back in query order.
pub fn answer_all(ws: &Workspace, queries: &[Query]) -> Vec<Result<OutputRecord, String>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = queries.iter().map(|q| scope.spawn(move || answer(ws, q))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err("decider panicked".into()))).collect()
    })
}

fn read_input(path: &Path) -> Result<String, Outcome> {
    std::fs::read_to_string(path)
        .map_err(|e| Outcome::error(EXIT_NO_INPUT, format!("cannot read {}: {}", path.display(), e)))
}

pub struct CheckArgs<'a> {
    pub file: &'a Path,
    pub property: Option<&'a str>,
    pub subject: Option<&'a str>,
    pub horizon: Option<usize>,
    pub certificate_out: Option<&'a Path>,
    pub json: bool,
}

/// Decide the document's queries, or the one given on the command line. With several
/// queries the exit code is 1 if any fails, else 2 if any is unknown, else 0.
pub fn cmd_check(args: &CheckArgs) -> Outcome {
    let text = match read_input(args.file) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let ws = match parse_document(&text) {
        Ok(ws) => ws,
        Err(e) => return Outcome::error(EXIT_DATA, format!("{}: {}", args.file.display(), e)),
    };
    let queries: Vec<Query> = match args.property {
        Some(p) => {
            let property: Property = match p.parse() {
                Ok(p) => p,
                Err(e) => return Outcome::error(EXIT_USAGE, e),
            };
            let subject = match args.subject {
                Some(s) => s.to_string(),
                None => {
                    let candidates: Vec<&str> = if property.is_morphism_property() {
                        ws.morphisms.iter().map(|(n, _)| n.as_str()).collect()
                    } else {
                        ws.systems.iter().map(|(n, _)| n.as_str()).collect()
                    };
                    match candidates.as_slice() {
                        [one] => one.to_string(),
                        _ => {
                            return Outcome::error(
                                EXIT_USAGE,
                                format!("name the subject for {}; candidates: {}", property, candidates.join(", ")),
                            )
                        }
                    }
                }
            };
            if let Err(m) = check_subject(&ws, property, &subject) {
                return Outcome::error(EXIT_USAGE, m);
            }
            vec![Query { property, subject, horizon: args.horizon }]
        }
        None => {
            if args.subject.is_some() {
                return Outcome::error(EXIT_USAGE, "a subject needs a property");
            }
            if ws.queries.is_empty() {
                return Outcome::error(EXIT_USAGE, "the document has no queries; give a property and subject");
            }
            ws.queries.iter().map(|q| Query { horizon: args.horizon.or(q.horizon), ..q.clone() }).collect()
        }
    };
    if args.certificate_out.is_some() && queries.len() != 1 {
        return Outcome::error(EXIT_USAGE, "--certificate needs exactly one query");
    }
    let mut records = Vec::new();
    for r in answer_all(&ws, &queries) {
        match r {
            Ok(r) => records.push(r),
            Err(m) => return Outcome::error(EXIT_DATA, m),
        }
    }
    let mut out = Outcome::default();
    if let (Some(path), [record]) = (args.certificate_out, records.as_slice()) {
        match &record.certificate {
            Some(c) => {
                if let Err(e) = std::fs::write(path, c.to_json() + "\n") {
                    return Outcome::error(EXIT_IO, format!("cannot write {}: {}", path.display(), e));
                }
                writeln!(out.stderr, "certificate written to {}", path.display()).unwrap();
            }
            None => writeln!(out.stderr, "no certificate: the verdict is {}", record.verdict).unwrap(),
        }
    }
    if args.json {
        out.stdout = serde_json::to_string_pretty(&records).unwrap() + "\n";
    } else {
        for r in &records {
            writeln!(out.stdout, "{}", r.human()).unwrap();
        }
    }
    let codes: Vec<i32> = records.iter().map(OutputRecord::exit_code).collect();
    out.code = if codes.contains(&EXIT_FAILS) {
        EXIT_FAILS
    } else if codes.contains(&EXIT_UNKNOWN) {
        EXIT_UNKNOWN
    } else {
        EXIT_HOLDS
    };
    out
}

/// Replay a certificate, optionally checking that it is about a subject of a document.
pub fn cmd_verify(cert: &Path, against: Option<(&Path, &str)>) -> Outcome {
    let text = match read_input(cert) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let c = match Certificate::from_json(&text) {
        Ok(c) => c,
        Err(e) => return Outcome::error(EXIT_DATA, format!("{}: not a certificate: {}", cert.display(), e)),
    };
    let result = match against {
        None => c.verify(),
        Some((doc, name)) => {
            let text = match read_input(doc) {
                Ok(t) => t,
                Err(o) => return o,
            };
            let ws = match parse_document(&text) {
                Ok(ws) => ws,
                Err(e) => return Outcome::error(EXIT_DATA, format!("{}: {}", doc.display(), e)),
            };
            let subject = match ws.subject(name) {
                Some(SubjectRef::Morphism(f)) => Subject::Morphism(f.clone()),
                Some(SubjectRef::System(x)) => Subject::System(x.clone()),
                None => return Outcome::error(EXIT_USAGE, format!("no subject named {:?} in {}", name, doc.display())),
            };
            c.verify_against(&subject)
        }
    };
    match result {
        Ok(()) => Outcome {
            code: EXIT_HOLDS,
            stdout: format!("ok: {} certificate with {} replays\n", c.property, entry_count(c.entries.len())),
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: EXIT_FAILS,
            stdout: format!("rejected ({}): {}\n", e.caught_by(), e),
            stderr: String::new(),
        },
    }
}

/// Run a property suite. A violation is written to `replay_dir` as a JSON replay file.
pub fn cmd_suite(name: &str, n: usize, seed: u64, replay_dir: &Path, json: bool) -> Outcome {
    let report = match run_suite(name, n, seed) {
        Ok(r) => r,
        Err(e @ SuiteError::Unknown(_)) => return Outcome::error(EXIT_USAGE, e),
        Err(e) => return Outcome::error(EXIT_DATA, e),
    };
    let mut out = Outcome {
        code: if report.passed() { EXIT_HOLDS } else { EXIT_FAILS },
        stdout: if json { serde_json::to_string_pretty(&report).unwrap() + "\n" } else { report.to_string() },
        stderr: String::new(),
    };
    if let Some(doc) = report.replay_document() {
        let path: PathBuf =
            replay_dir.join(format!("{}-{}-{}.replay.json", name, seed, report.violation.as_ref().unwrap().instance));
        match std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap() + "\n") {
            Ok(()) => writeln!(out.stderr, "replay written to {}", path.display()).unwrap(),
            Err(e) => writeln!(out.stderr, "could not write replay file {}: {}", path.display(), e).unwrap(),
        }
    }
    out
}

pub fn suite_names() -> &'static [&'static str] {
    &SUITES
}

/// Run one built-in scenario, or all of them.
pub fn cmd_scenario(name: &str, json: bool) -> Outcome {
    let scenarios = if name == "all" {
        builtin_scenarios()
    } else {
        match find_scenario(name) {
            Some(s) => vec![s],
            None => {
                let known: Vec<&str> = builtin_scenarios().iter().map(|s| s.name).collect();
                return Outcome::error(
                    EXIT_USAGE,
                    format!("unknown scenario {:?}; known: all, {}", name, known.join(", ")),
                );
            }
        }
    };
    let mut out = Outcome::default();
    let mut reports = Vec::new();
    let mut all_passed = true;
    for s in &scenarios {
        match run_scenario(s) {
            Ok(r) => {
                all_passed &= r.passed();
                if !json {
                    out.stdout.push_str(&r.to_string());
                }
                reports.push(json!({
                    "name": r.name,
                    "passed": r.passed(),
                    "lines": r.lines.iter().map(|l| json!({
                        "property": l.property,
                        "expected": format!("{:?}", l.expected),
                        "got": l.got,
                        "ok": l.ok,
                        "detail": l.detail,
                    })).collect::<Vec<_>>(),
                    "oracle": r.oracle.as_ref().err(),
                }));
            }
            Err(e) => return Outcome::error(EXIT_DATA, format!("scenario {}: {}", s.name, e)),
        }
    }
    if json {
        out.stdout = serde_json::to_string_pretty(&reports).unwrap() + "\n";
    }
    out.code = if all_passed { EXIT_HOLDS } else { EXIT_FAILS };
    out
}

/// A scenario as a standalone document with its expectations as queries.
pub fn scenario_document(name: &str) -> Option<Workspace> {
    let s = find_scenario(name)?;
    let (mut ws, subject) = match &s.subject {
        Instance::Morphism(f) => {
            let mut ws = Workspace::new(f.category().clone());
            ws.add_morphism("f", f);
            (ws, "f")
        }
        Instance::System(x) => {
            let mut ws = Workspace::new(x.category().clone());
            ws.systems.push(("X".into(), x.clone()));
            (ws, "X")
        }
    };
    ws.queries = s
        .expectations
        .iter()
        .map(|e| Query { property: e.property, subject: subject.to_string(), horizon: Some(e.horizon) })
        .collect();
    Some(ws)
}
