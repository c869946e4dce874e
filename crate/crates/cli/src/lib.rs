//! Command-line front end; the binary is a thin wrapper over [`run`].

use std::path::{Path, PathBuf};
use std::ffi::OsString;

use clap::{Args, Parser, Subcommand};
use prefopt::bench::run_suite;
use prefopt::config::{parse_config, ExperimentSpec};
use prefopt::output::emit_outputs;
use prefopt::Error;

const DEFAULT_OUT: &str = "prefopt-out";

#[derive(Parser)]
#[command(name = "prefopt", version, about = "Preference-guided multi-objective optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config with exactly one preference.
    Run(Opts),
    /// Run every preference in a config as an independent run.
    Suite(Opts),
}

#[derive(Args)]
struct Opts {
    /// TOML experiment config.
    config: PathBuf,
    /// Base seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long, env = "PREFOPT_OUT_DIR")]
    out: Option<PathBuf>,
    /// Worker threads; overrides the config.
    #[arg(long = "parallel")]
    parallel: Option<usize>,
    /// Also write plot.svg.
    #[arg(long)]
    plot: bool,
}

enum Failure {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else if matches!(e, Error::Io { .. }) {
            Failure::Io(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

fn load(opts: &Opts) -> Result<(ExperimentSpec, PathBuf), Failure> {
    let text = std::fs::read_to_string(&opts.config)
        .map_err(|e| Failure::Io(format!("{}: {e}", opts.config.display())))?;
    let mut spec = parse_config(&text)?;
    if let Some(seed) = opts.seed {
        if seed > i64::MAX as u64 {
            return Err(Failure::Validation(format!("seed {seed} exceeds {}", i64::MAX)));
        }
        spec.seed = seed;
    }
    if let Some(p) = opts.parallel {
        if p == 0 {
            return Err(Failure::Validation("--parallel must be at least 1".into()));
        }
        spec.parallelism = p;
    }
    spec.plot |= opts.plot;
    let out = opts
        .out
        .clone()
        .or_else(|| spec.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    Ok((spec, out))
}

fn execute(spec: &ExperimentSpec, out: &Path, single: bool) -> Result<String, Failure> {
    if single && spec.num_runs() != 1 {
        return Err(Failure::Validation(format!(
            "`run` needs exactly one preference, config has {}; use `suite`",
            spec.num_runs()
        )));
    }
    spec.validate()?;
    let problem = spec.build_problem()?;
    let prefs = spec.preferences()?;
    let suite = run_suite(&problem, &prefs, &spec.solver, &spec.suite_options())?;
    let written = emit_outputs(out, spec, &suite, spec.plot)?;

    let failures: Vec<_> = suite.runs.iter().filter(|r| r.error.is_some()).collect();
    if let Some(first) = failures.first() {
        let msg = format!(
            "{} of {} runs failed; first (run {}): {}",
            failures.len(),
            suite.runs.len(),
            first.index,
            first.error.as_deref().unwrap_or_default()
        );
        return Err(if failures.iter().any(|r| r.numerical_error) {
            Failure::Numerical(msg)
        } else {
            Failure::Validation(msg)
        });
    }
    let mut msg = format!(
        "{} run(s) written to {}",
        suite.runs.len(),
        written.summary.parent().unwrap_or(out).display()
    );
    if let Some(hv) = suite.hypervolume {
        msg.push_str(&format!("; hypervolume {hv}"));
    }
    if let Some(k) = suite.mean_kkt {
        msg.push_str(&format!("; mean kkt {k:e}"));
    }
    Ok(msg)
}

/// Parses `args` (including the program name), executes the command and
/// returns the process exit code: 0 success, 1 validation error, 2 numerical
/// abort, 3 I/O error.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (opts, single) = match &cli.command {
        Command::Run(o) => (o, true),
        Command::Suite(o) => (o, false),
    };
    match load(opts).and_then(|(spec, out)| execute(&spec, &out, single)) {
        Ok(msg) => {
            println!("{msg}");
            0
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}
