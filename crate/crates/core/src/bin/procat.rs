use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use procat::cli::{self, CheckArgs, Outcome, EXIT_USAGE};

/// Decide properties of inverse systems of finite sets and finitely generated abelian
/// groups, with replayable certificates.
///
/// Exit codes: 0 holds, 1 fails (or a certificate is rejected), 2 unknown within the
/// horizon, 64 usage error, 65 malformed input, 66 missing input, 74 I/O error.
#[derive(Parser)]
#[command(name = "procat", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the queries of a document, or one property of a named subject.
    Check {
        file: PathBuf,
        /// mono, epi, strong-mono, strong-epi, iso, bimorphism, movable,
        /// uniformly-movable, sequentially-movable or stable.
        property: Option<String>,
        /// System or morphism name; optional when the document has only one candidate.
        subject: Option<String>,
        #[arg(long)]
        horizon: Option<usize>,
        /// Write the certificate of a Holds verdict to this file.
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Replay a certificate without searching.
    Verify {
        certificate: PathBuf,
        /// Also require the certificate to be about SUBJECT in this document.
        #[arg(long, requires = "subject")]
        against: Option<PathBuf>,
        #[arg(long, requires = "against")]
        subject: Option<String>,
    },
    /// Run a property suite over seeded random instances.
    Suite {
        /// One of the suite names; `procat suite list` prints them.
        name: String,
        #[arg(default_value_t = 100)]
        n: usize,
        #[arg(default_value_t = 7)]
        seed: u64,
        /// Where to write the replay file of a violation.
        #[arg(long, default_value = ".")]
        replay_dir: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run a built-in scenario, or `all`.
    Scenario {
        name: String,
        /// Print the scenario as a document instead of running it.
        #[arg(long)]
        export: bool,
        #[arg(long)]
        json: bool,
    },
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Check { file, property, subject, horizon, certificate, json } => cli::cmd_check(&CheckArgs {
            file: &file,
            property: property.as_deref(),
            subject: subject.as_deref(),
            horizon,
            certificate_out: certificate.as_deref(),
            json,
        }),
        Command::Verify { certificate, against, subject } => {
            cli::cmd_verify(&certificate, against.as_deref().zip(subject.as_deref()))
        }
        Command::Suite { name, .. } if name == "list" => {
            Outcome { code: 0, stdout: cli::suite_names().join("\n") + "\n", stderr: String::new() }
        }
        Command::Suite { name, n, seed, replay_dir, json } => cli::cmd_suite(&name, n, seed, &replay_dir, json),
        Command::Scenario { name, export: true, .. } => match cli::scenario_document(&name) {
            Some(ws) => match cli::serialize_document(&ws) {
                Ok(text) => Outcome { code: 0, stdout: text, stderr: String::new() },
                Err(e) => Outcome { code: cli::EXIT_DATA, stdout: String::new(), stderr: format!("error: {}\n", e) },
            },
            None => Outcome {
                code: EXIT_USAGE,
                stdout: String::new(),
                stderr: format!("error: unknown scenario {:?}\n", name),
            },
        },
        Command::Scenario { name, json, .. } => cli::cmd_scenario(&name, json),
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let out = run(args.command);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.code as u8)
}
