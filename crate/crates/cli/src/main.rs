//! `rks`: build robust summaries, score them against the shared removal
//! schedule, run the two-round protocol and check invariants.
//!
//! Exit codes: 0 success, 1 diagnostic failure, 2 invariant violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use robust_knapsack::adversary::scores_to_csv;
use robust_knapsack::experiment::{
    build_all, build_stats_csv, evaluate_builds, invariant_suite, prepare, run_distributed,
    ExperimentConfig, PreparedWorkload, SummaryFile, Workload,
};
use robust_knapsack::{Error, SubmodularFn};

#[derive(Parser)]
#[command(name = "rks", version, about = "Adversarially robust submodular maximization under knapsack constraints")]
struct Cli {
    /// Experiment configuration (`section.key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Builds every configured algorithm's summaries and the size table.
    Build,
    /// Scores the persisted summaries round by round.
    Evaluate,
    /// Runs the two-round protocol for every estimate.
    Distributed,
    /// Runs the randomized invariant suite.
    Selfcheck {
        /// Number of random streams.
        #[arg(long, default_value_t = 2000)]
        streams: usize,
    },
}

/// A failed invariant rather than a bad input.
#[derive(Debug)]
struct Violation(String);

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Violation {}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::parse(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn summary_path(out: &Path, name: &str) -> PathBuf {
    out.join("summaries").join(format!("{name}.txt"))
}

fn build<F: SubmodularFn>(w: &Workload<F>, config: &ExperimentConfig, out: &Path) -> Result<()> {
    let builds = build_all(w, config)?;
    for b in &builds {
        write(&summary_path(out, b.name()), &SummaryFile::new(b, config).render())?;
        println!("{:<18} {:>6} elements", b.name(), b.size());
    }
    write(&out.join("build_stats.csv"), &build_stats_csv(&builds))?;
    write(&out.join("config.txt"), &config.render())?;
    Ok(())
}

fn evaluate<F: SubmodularFn>(w: &Workload<F>, config: &ExperimentConfig, out: &Path) -> Result<()> {
    let mut builds = Vec::new();
    for choice in &config.algorithms {
        let path = summary_path(out, choice.name());
        let text = fs::read_to_string(&path)
            .with_context(|| format!("reading {} (run `rks build` first)", path.display()))?;
        let file = SummaryFile::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
        file.check_against(config, &w.instance)?;
        builds.push(file.into_build());
    }
    let evaluation = match evaluate_builds(w, config, &builds) {
        Err(Error::InconsistentBound(m)) => return Err(Violation(m).into()),
        other => other?,
    };
    write(&out.join("scores.csv"), &scores_to_csv(&evaluation.scores)?)?;
    println!(
        "{} removal rounds, {} elements removed",
        evaluation.schedule.len(),
        evaluation.schedule.total_removed()
    );
    if let Some(last) = evaluation.scores.last().map(|s| s.round) {
        for s in evaluation.scores.iter().filter(|s| s.round == 0 || s.round == last) {
            println!("round {:>2} {:<18} ratio {:.4}", s.round, s.algorithm, s.ratio);
        }
    }
    Ok(())
}

fn distributed<F: SubmodularFn>(w: &Workload<F>, config: &ExperimentConfig, out: &Path) -> Result<()> {
    let report = run_distributed(w, config)?;
    for (j, run) in report.runs.iter().enumerate() {
        write(&out.join("transcripts").join(format!("guess_{j:03}.csv")), &run.transcript.to_csv())?;
    }
    let text = report.render();
    write(&out.join("distributed.txt"), &text)?;
    print!("{}", text.lines().last().map(|l| format!("{l}\n")).unwrap_or_default());
    if !report.all_equivalent() {
        bail!(Violation("central grid differs from the sequential grid".into()));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    if let Command::Selfcheck { streams } = cli.command {
        let seed = cli.seed.unwrap_or(0);
        let report = invariant_suite(streams, seed);
        println!("{} streams, {} checks, {} violations", report.streams, report.checks, report.violations.len());
        for v in &report.violations {
            eprintln!("violation: {v}");
        }
        if !report.passed() {
            bail!(Violation("invariant suite failed".into()));
        }
        return Ok(());
    }
    let config = load_config(cli)?;
    let workload = prepare(&config)?;
    macro_rules! dispatch {
        ($f:ident) => {
            match &workload {
                PreparedWorkload::Graph(w) => {
                    eprintln!("{}", w.label);
                    $f(w, &config, &cli.out)
                }
                PreparedWorkload::Movies(w) => {
                    eprintln!("{}", w.label);
                    $f(w, &config, &cli.out)
                }
            }
        };
    }
    match cli.command {
        Command::Build => dispatch!(build),
        Command::Evaluate => dispatch!(evaluate),
        Command::Distributed => dispatch!(distributed),
        Command::Selfcheck { .. } => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<Violation>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
