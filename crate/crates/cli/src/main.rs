//! `dhub`: generate synthetic ecosystems, rank and explain matches, validate
//! data files and run the HTTP service.
//!
//! Exit codes: 0 success, 1 data or domain error, 2 usage error.

mod render;

use std::net::IpAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dhub_core::dataset::{all_violations, Dataset};
use dhub_core::engine::score_pair_at;
use dhub_core::store::Snapshot;
use dhub_core::synth::{generate, GenConfig};
use dhub_core::{explain, service, Domain, Store};

#[derive(Debug, Parser)]
#[command(name = "dhub", version, about = "Coordination hub: data generation, matching and service")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic, seeded ecosystem dataset.
    Gen(GenArgs),
    /// Rank every solution for one challenge.
    Match(MatchArgs),
    /// Explain the score of one challenge–solution pair.
    Explain(ExplainArgs),
    /// Check every record and reference in a data file.
    Validate(ValidateArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 250)]
    orgs: u64,
    #[arg(long, default_value_t = 120)]
    challenges: u64,
    #[arg(long, default_value_t = 150)]
    solutions: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
struct WeightArgs {
    /// Six raw weights (geographic, temporal, budget, capability,
    /// credibility, population); normalized to sum to 1.
    #[arg(long, num_args = 6, value_names = ["W1", "W2", "W3", "W4", "W5", "W6"], allow_negative_numbers = true)]
    weights: Option<Vec<f64>>,
}

impl WeightArgs {
    fn raw(&self) -> Option<[f64; 6]> {
        self.weights.as_ref().map(|w| std::array::from_fn(|i| w[i]))
    }
}

#[derive(Debug, Args)]
struct MatchArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    challenge: String,
    #[command(flatten)]
    weights: WeightArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    top: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Timestamp recorded on each result (RFC 3339); defaults to now.
    #[arg(long)]
    computed_at: Option<DateTime<Utc>>,
}

#[derive(Debug, Args)]
struct ExplainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    challenge: String,
    #[arg(long)]
    solution: String,
    #[command(flatten)]
    weights: WeightArgs,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    data: PathBuf,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, env = "DHUB_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, env = "DHUB_HOST", default_value = "127.0.0.1")]
    host: IpAddr,
    /// Dataset loaded when the store is empty.
    #[arg(long, env = "DHUB_DATA")]
    data: Option<PathBuf>,
    /// Snapshot file the service reads at start-up and writes on change.
    #[arg(long, env = "DHUB_STORE")]
    store: Option<PathBuf>,
    /// Intake question templates (JSON); built-in set when absent.
    #[arg(long, env = "DHUB_TEMPLATES")]
    templates: Option<PathBuf>,
    /// Origin allowed to call the API from a browser; repeatable.
    #[arg(long = "cors", env = "DHUB_CORS", value_delimiter = ',')]
    cors: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Match(a) => match_cmd(a),
        Command::Explain(a) => explain_cmd(a),
        Command::Validate(a) => validate(a),
        Command::Serve(a) => serve(a),
    }
}

fn load(path: &Path) -> Result<Store> {
    let ds = Dataset::import(path).with_context(|| format!("cannot load {}", path.display()))?;
    Ok(Store::from_dataset(ds)?)
}

fn gen(a: GenArgs) -> Result<()> {
    let config = GenConfig { seed: a.seed, n_orgs: a.orgs, n_challenges: a.challenges, n_solutions: a.solutions, ..GenConfig::default() };
    let ds = generate(&config)?;
    ds.export(&a.out)?;
    let [d, p, f] = ds.role_counts();
    println!("roles (Deployer/Provider/Financier): {d}/{p}/{f}");
    let domains = |it: &mut dyn Iterator<Item = Domain>| {
        let items: Vec<Domain> = it.collect();
        Domain::ALL
            .iter()
            .map(|dom| format!("{dom} {}", items.iter().filter(|x| *x == dom).count()))
            .collect::<Vec<_>>()
            .join(", ")
    };
    println!("challenge domains: {}", domains(&mut ds.challenges.iter().map(|c| c.domain)));
    println!("solution domains: {}", domains(&mut ds.solutions.iter().map(|s| s.domain)));
    println!(
        "wrote {} ({} organizations, {} challenges, {} solutions)",
        a.out.display(),
        ds.organizations.len(),
        ds.challenges.len(),
        ds.solutions.len()
    );
    Ok(())
}

fn match_cmd(a: MatchArgs) -> Result<()> {
    let mut store = load(&a.data)?;
    let profile = service::resolve_profile(a.weights.raw())?;
    let now = a.computed_at.unwrap_or_else(Utc::now);
    let top = a.top.map(|k| k as usize).or(Some(service::DEFAULT_TOP_K));
    let ranked = service::compute_matches(&mut store, &a.challenge, a.weights.raw(), top, now)?;
    match a.format {
        Format::Json => println!("{}", serde_json::to_string(&ranked)?),
        Format::Table => {
            let challenge = store.challenge(&a.challenge).expect("ranked challenges exist");
            print!("{}", render::match_table(challenge, &profile, a.weights.raw().is_none(), &ranked));
        }
    }
    Ok(())
}

fn explain_cmd(a: ExplainArgs) -> Result<()> {
    let store = load(&a.data)?;
    let profile = service::resolve_profile(a.weights.raw())?;
    let Some(challenge) = store.challenge(&a.challenge) else { bail!("challenge {} not found", a.challenge) };
    let Some(solution) = store.solution(&a.solution) else { bail!("solution {} not found", a.solution) };
    let provider = store.organization(&solution.provider_id).expect("stored solutions have providers");
    let m = score_pair_at(challenge, solution, provider, &profile, Utc::now())?;
    for line in explain(&m) {
        println!("{line}");
    }
    Ok(())
}

fn validate(a: ValidateArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.data).with_context(|| format!("cannot read {}", a.data.display()))?;
    let snap = Snapshot::parse(&text).with_context(|| format!("cannot parse {}", a.data.display()))?;
    let violations = all_violations(&snap.records());
    if violations.is_empty() {
        println!(
            "ok: {} organizations, {} challenges, {} solutions, {} matches, {} deployments",
            snap.organizations.len(),
            snap.challenges.len(),
            snap.solutions.len(),
            snap.matches.len(),
            snap.deployments.len()
        );
        return Ok(());
    }
    for v in &violations {
        println!("{v}");
    }
    bail!("{} violation(s) in {}", violations.len(), a.data.display())
}

fn serve(a: ServeArgs) -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let config = dhub_api::ServeConfig {
        port: a.port,
        host: a.host,
        store_path: a.store,
        seed_data: a.data,
        templates: a.templates,
        cors_origins: a.cors,
    };
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(dhub_api::serve(config))?;
    Ok(())
}
