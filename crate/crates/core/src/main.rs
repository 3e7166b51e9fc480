use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gkv::harness::{self, load_spec, parse_sections, run_sections, run_suite, zoo, Report, RunConfig, Suite};
use gkv::Error;

/// Residual checks for generalized Kähler structures on coordinate patches.
#[derive(Parser)]
#[command(name = "gkv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite on a spec file and print or write the JSON report.
    Check {
        spec: PathBuf,
        /// validate, gk, identities, gauge, eigendist, theorem, fourdim, courant or all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Uniform tolerance for every identity check.
        #[arg(long)]
        tol: Option<f64>,
        /// Grid points per axis.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print or write the spec of a built-in example.
    Zoo {
        name: String,
        /// Parameter override, repeatable.
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Courant brackets of section pairs on a spec's patch.
    Courant {
        spec: PathBuf,
        #[arg(long)]
        sections: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>, Error> {
    raw.iter()
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("--param expects k=v, got '{kv}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("--param {k}: '{v}' is not a number")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn write_or_print(text: &str, path: Option<&Path>) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn summarize(r: &Report) {
    for c in r.checks.iter().filter(|c| !c.pass) {
        let tag = if c.gating { "FAIL" } else { "info" };
        let res = c.max_residual.map_or("NaN".to_string(), |x| format!("{x:.3e}"));
        eprintln!("{tag} {} residual {res} at {:?} [{}]", c.check_name, c.argmax_point, c.paper_ref);
    }
    let gating = r.checks.iter().filter(|c| c.gating).count();
    let failed = r.checks.iter().filter(|c| c.gating && !c.pass).count();
    eprintln!(
        "{}: {} checks ({gating} gating, {failed} failed), {} skipped, {} points",
        if r.pass { "PASS" } else { "FAIL" },
        r.checks.len(),
        r.skipped.len(),
        r.meta.points
    );
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Check { spec, suite, tol, grid, seed, report } => {
            let suite = Suite::parse(&suite)?;
            let spec = load_spec(&spec)?;
            let r = run_suite(&spec, suite, &RunConfig { tol, grid, seed })?;
            write_or_print(&r.to_json(), report.as_deref())?;
            summarize(&r);
            Ok(r.exit_code())
        }
        Command::Zoo { name, params, emit } => {
            let spec = zoo::generate(&name, &parse_params(&params)?)?;
            spec.validated()?;
            write_or_print(&spec.to_json(), emit.as_deref())?;
            Ok(0)
        }
        Command::Courant { spec, sections, report } => {
            let spec = load_spec(&spec)?;
            let text = std::fs::read_to_string(&sections)
                .map_err(|e| Error::Io(format!("{}: {e}", sections.display())))?;
            let r = run_sections(&spec, &parse_sections(&text)?, &RunConfig::default())?;
            write_or_print(&r.to_json(), report.as_deref())?;
            summarize(&r);
            Ok(r.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = harness::worker_pool()
        .and_then(|pool| pool.install(|| run(cli)))
        .unwrap_or_else(|e| {
            eprintln!("error: {e}");
            e.exit_code()
        });
    ExitCode::from(code as u8)
}
