use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use multiorder::error::Error;
use multiorder::experiment::{self, ExperimentConfig, RunReport};

#[derive(Parser)]
#[command(name = "multiorder", version, about = "Orders on countable groups: sampling, identities and asymptotic pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an order and write its window [-radius, radius] as an order file
    SampleOrder(Settings),
    /// Act on an order file by a group element
    Act(Settings),
    /// Truncated distance between two order files
    Metric(Settings),
    /// Equivariance, reindexing and successor-orbit identities over sampled orders
    IdentitySuite(Settings),
    /// Detect tail-translate pairs of orders and reject independent ones
    LemmaCheck(Settings),
    /// Total variation between pattern laws of sampled orders and their translates
    Invariance(Settings),
    /// Block entropy of configurations read along sampled orders
    Entropy(Settings),
    /// Construct and certify an asymptotic pair for each sampled order
    BhrRun(Settings),
}

/// Every key of the config file is also a flag; flags win over the file.
#[derive(Args, Default)]
struct Settings {
    /// Flat key=value config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra key=value override (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Z, Z2, Z3 or H3 (comma list for batch commands)
    #[arg(long)]
    group: Option<String>,
    /// dirac-standard-Z, pair-swap-Z or hierarchical
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    sampler_seed: Option<String>,
    #[arg(long)]
    swap_prob: Option<String>,
    /// Seed of a single sample
    #[arg(long)]
    seed: Option<String>,
    /// Seed set: a..b, a..=b or a comma list
    #[arg(long)]
    seeds: Option<String>,
    /// Order window radius
    #[arg(long)]
    radius: Option<String>,
    /// Horizon K
    #[arg(long, short = 'K')]
    horizon: Option<String>,
    /// Metric depth N
    #[arg(long, short = 'N')]
    depth: Option<String>,
    #[arg(long)]
    alphabet: Option<String>,
    /// Configuration spec, e.g. random:alphabet=2:seed=7
    #[arg(long)]
    configuration: Option<String>,
    /// flip or parity-control
    #[arg(long)]
    pair: Option<String>,
    /// Group elements per sampled order
    #[arg(long)]
    elements: Option<String>,
    #[arg(long)]
    element_radius: Option<String>,
    /// Observation box radius
    #[arg(long)]
    box_radius: Option<String>,
    /// Group element, e.g. 1,-2
    #[arg(long, allow_hyphen_values = true)]
    element: Option<String>,
    #[arg(long)]
    pattern_radius: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    /// Block length
    #[arg(long)]
    block: Option<String>,
    #[arg(long)]
    tv_max: Option<String>,
    #[arg(long)]
    entropy_expect: Option<String>,
    #[arg(long)]
    entropy_tol: Option<String>,
    /// Order file
    #[arg(long)]
    order: Option<String>,
    /// Second order file
    #[arg(long)]
    order_b: Option<String>,
    /// Write the artifact or record stream here instead of stdout
    #[arg(long)]
    output: Option<String>,
}

impl Settings {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        let flags: [(&'static str, &Option<String>); 25] = [
            ("group", &self.group),
            ("family", &self.family),
            ("sampler-seed", &self.sampler_seed),
            ("swap-prob", &self.swap_prob),
            ("seed", &self.seed),
            ("seeds", &self.seeds),
            ("radius", &self.radius),
            ("horizon", &self.horizon),
            ("depth", &self.depth),
            ("alphabet", &self.alphabet),
            ("configuration", &self.configuration),
            ("pair", &self.pair),
            ("elements", &self.elements),
            ("element-radius", &self.element_radius),
            ("box-radius", &self.box_radius),
            ("element", &self.element),
            ("pattern-radius", &self.pattern_radius),
            ("samples", &self.samples),
            ("block", &self.block),
            ("tv-max", &self.tv_max),
            ("entropy-expect", &self.entropy_expect),
            ("entropy-tol", &self.entropy_tol),
            ("order", &self.order),
            ("order-b", &self.order_b),
            ("output", &self.output),
        ];
        flags.into_iter().filter_map(|(k, v)| v.as_deref().map(|v| (k, v))).collect()
    }

    fn resolve(&self) -> multiorder::error::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let text =
                std::fs::read_to_string(path).map_err(|e| Error::usage(format!("{}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        for (k, v) in self.overrides() {
            cfg.set(k, v)?;
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            cfg.set(k.trim(), v)?;
        }
        Ok(cfg)
    }
}

fn emit(report: &RunReport, cfg: &ExperimentConfig) -> std::io::Result<()> {
    let body = match &report.artifact {
        Some(a) => a.clone(),
        None => report.to_jsonl(),
    };
    match &cfg.output {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    if report.artifact.is_some() && cfg.output.is_none() {
        eprint!("{}", report.summary());
    } else {
        // artifact went to a file: the record stream is still worth keeping
        if report.artifact.is_some() {
            print!("{}", report.to_jsonl());
        }
        eprint!("{}", report.summary());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, settings) = match &cli.command {
        Command::SampleOrder(s) => ("sample-order", s),
        Command::Act(s) => ("act", s),
        Command::Metric(s) => ("metric", s),
        Command::IdentitySuite(s) => ("identity-suite", s),
        Command::LemmaCheck(s) => ("lemma-check", s),
        Command::Invariance(s) => ("invariance", s),
        Command::Entropy(s) => ("entropy", s),
        Command::BhrRun(s) => ("bhr-run", s),
    };
    let cfg = match settings.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match experiment::run(name, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&report, &cfg) {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(2);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
