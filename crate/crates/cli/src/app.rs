//! Command-line verbs.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::build::Built;
use crate::error::{invalid, Result};
use crate::report::{Report, SectionReport, Status, TaskReport};
use crate::scene::{Scene, TaskDecl};
use crate::suite::{run_suite, SuiteKind, SuiteOptions};
use crate::tasks::{describe_hom, describe_hom_text, oracle_compare, run_section, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "ntoda", version, about = "Toda brackets in n-angulated categories, driven by scene files")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Output {
    /// Write the JSON report to this path.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Print the JSON report on stdout instead of the text summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every task of a scene.
    Run {
        scene: PathBuf,
        #[command(flatten)]
        out: Output,
        /// Enumeration cap for oracle tasks.
        #[arg(long, default_value_t = 10_000_000)]
        cap: u128,
        /// Accepted for symmetry with `suite`; scene runs are deterministic.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the pinned basis of a hom space.
    DescribeHom {
        scene: PathBuf,
        #[arg(long)]
        src: String,
        #[arg(long)]
        tgt: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        shift: i64,
        /// Section name; defaults to the first one.
        #[arg(long)]
        section: Option<String>,
    },
    /// Brute-force every bracket task of a scene and compare with the solver.
    Oracle {
        scene: PathBuf,
        /// Only this task.
        #[arg(long)]
        task: Option<String>,
        #[arg(long, default_value_t = 10_000_000)]
        cap: u128,
        #[command(flatten)]
        out: Output,
    },
    /// Run a seeded property suite: coincidence, juggling, heller or ss-sign.
    Suite {
        name: SuiteKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        cases: usize,
        /// Scene with a quiver section (ss-sign).
        #[arg(long)]
        scene: Option<PathBuf>,
        /// Residue characteristics for the free local suites.
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        primes: Vec<u64>,
        #[command(flatten)]
        out: Output,
    },
}

fn scene_label(path: &Path, scene: &Scene) -> String {
    if scene.name.is_empty() {
        path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    } else {
        scene.name.clone()
    }
}

/// Builds each section and runs its tasks. A section that fails to build
/// contributes one errored task.
pub fn run_scene_value(scene: &Scene, label: &str, opts: &RunOptions) -> Result<Report> {
    let mut sections = Vec::new();
    for s in scene.sections()? {
        let built = Built::build(&s)?;
        sections.push(run_section(&built, &s, opts));
    }
    Ok(Report::new(label, sections))
}

pub fn run_scene(path: &Path, opts: &RunOptions) -> Result<Report> {
    let scene = Scene::load(path)?;
    run_scene_value(&scene, &scene_label(path, &scene), opts)
}

fn emit(out: &Output, json_text: String, text: String) -> Result<()> {
    if let Some(p) = &out.report {
        std::fs::write(p, &json_text)?;
    }
    if out.json {
        println!("{json_text}");
    } else {
        print!("{text}");
    }
    Ok(())
}

fn oracle_scene(path: &Path, only: Option<&str>, cap: u128) -> Result<Report> {
    let scene = Scene::load(path)?;
    let mut sections = Vec::new();
    for s in scene.sections()? {
        let built = Built::build(&s)?;
        let mut tasks = Vec::new();
        for (i, t) in s.tasks.iter().enumerate() {
            let name = t.display_name(i);
            if only.is_some_and(|o| o != name) {
                continue;
            }
            let (chain, flavor, extension) = match t {
                TaskDecl::Bracket { chain, flavor, extension, .. } | TaskDecl::Oracle { chain, flavor, extension, .. } => {
                    (chain, flavor, extension)
                }
                _ => continue,
            };
            let flavor = if flavor == "all" { "cc" } else { flavor.as_str() };
            let flavor = if extension.is_some() && flavor != "cc" { "cc" } else { flavor };
            let start = std::time::Instant::now();
            let (status, result, failures) = match oracle_compare(&built, chain, flavor, extension, cap) {
                Ok((v, true)) => (Status::Pass, v, vec![]),
                Ok((v, false)) => (Status::Fail, v, vec!["solver and oracle differ".to_string()]),
                Err(e) => (Status::Error, json!({ "error": e.to_string() }), vec![e.to_string()]),
            };
            tasks.push(TaskReport {
                name,
                task: "oracle".into(),
                status,
                result,
                failures,
                timing_ms: start.elapsed().as_millis() as u64,
            });
        }
        sections.push(SectionReport {
            name: built.name.clone(),
            provenance: built.provenance.clone(),
            morphisms: built.echo.clone(),
            tasks,
        });
    }
    Ok(Report::new(&scene_label(path, &scene), sections))
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run { scene, out, cap, seed: _ } => {
            let report = run_scene(&scene, &RunOptions { cap })?;
            emit(&out, report.to_json(), report.to_text())?;
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::DescribeHom { scene, src, tgt, shift, section } => {
            let sc = Scene::load(&scene)?;
            let sections = sc.sections()?;
            let s = match &section {
                Some(n) => sections.iter().find(|s| &s.name == n),
                None => sections.first(),
            };
            let Some(s) = s else { return invalid("no such section") };
            let built = Built::build(s)?;
            let v = describe_hom(&built, built.object(&src)?, built.object(&tgt)?.suspend(shift))?;
            print!("{}", describe_hom_text(&v));
            Ok(0)
        }
        Command::Oracle { scene, task, cap, out } => {
            let report = oracle_scene(&scene, task.as_deref(), cap)?;
            emit(&out, report.to_json(), report.to_text())?;
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Suite { name, seed, cases, scene, primes, out } => {
            let r = run_suite(name, &SuiteOptions { seed, cases, scene, primes })?;
            let json_text = serde_json::to_string_pretty(&r).expect("reports serialize");
            let mut text = format!(
                "suite {:?}: {} cases, {} checks, {} failures ({} ms)\n",
                r.suite,
                r.cases,
                r.checks,
                r.failures.len(),
                r.timing_ms
            );
            for f in &r.failures {
                text.push_str(&format!("  case {} (seed {}, p = {}): {}: {}\n", f.case, f.seed, f.p, f.law, f.detail));
            }
            emit(&out, json_text, text)?;
            Ok(if r.passed() { 0 } else { 1 })
        }
    }
}

/// Parses arguments, runs the verb and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
