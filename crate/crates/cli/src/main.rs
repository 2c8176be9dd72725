//! `orlicz`: command-line front end.
//!
//! Exit codes: 0 pass, 1 check failed, 2 input error.

// `!(x > a)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use orlicz_core::{Error, Result};

use config::{Command, DistributionInput, Exponent, MapKind, OrliczInput, RunConfig, TheoremId};

#[derive(Parser)]
#[command(name = "orlicz", version, about = "Orlicz norms from random variables and back")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Luxemburg norm of a vector.
    Norm(Overrides),
    /// Distribution generated by an Orlicz function.
    MakeDist(Overrides),
    /// Orlicz function generated by a distribution.
    MakeOrlicz(Overrides),
    /// Growth conditions at zero.
    Conditions(Overrides),
    /// Monte Carlo ratio stability for a norm equivalence.
    Verify {
        #[arg(value_enum)]
        theorem: Option<TheoremId>,
        #[command(flatten)]
        opts: Overrides,
    },
    /// Round-trip deviation reports.
    Roundtrip(Overrides),
    /// Distortion sweep of the L1 embedding.
    Embed(Overrides),
    /// Run the command named in the config file.
    Run(Overrides),
}

/// Flags override the matching config fields.
#[derive(Args, Default)]
struct Overrides {
    /// JSON config file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Orlicz function: a JSON file or inline JSON.
    #[arg(long)]
    orlicz: Option<String>,
    /// Distribution: a JSON file or inline JSON.
    #[arg(long)]
    distribution: Option<String>,
    /// Generator N for the general map: a JSON file or inline JSON.
    #[arg(long)]
    generator: Option<String>,
    #[arg(long, value_enum)]
    map: Option<MapKind>,
    /// Exponent p; `inf` allowed.
    #[arg(long)]
    p: Option<Exponent>,
    #[arg(long)]
    q: Option<f64>,
    /// Vector entries, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',')]
    ns: Option<Vec<usize>>,
    #[arg(long)]
    per_n: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    decades: Option<f64>,
    #[arg(long)]
    spread_bound: Option<f64>,
    #[arg(long)]
    stability_bound: Option<f64>,
}

fn json_or_path<T: serde::de::DeserializeOwned>(arg: &str) -> Result<T> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        serde_json::to_string(arg)?
    };
    Ok(serde_json::from_str(&text)?)
}

impl Overrides {
    fn apply(self, command: Option<Command>) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if command.is_some() {
            c.command = command;
        }
        if let Some(s) = &self.orlicz {
            c.orlicz = Some(json_or_path::<OrliczInput>(s)?);
        }
        if let Some(s) = &self.distribution {
            c.distribution = Some(json_or_path::<DistributionInput>(s)?);
        }
        if let Some(s) = &self.generator {
            c.generator = Some(json_or_path::<OrliczInput>(s)?);
        }
        c.map = self.map.or(c.map);
        c.p = self.p.or(c.p);
        c.q = self.q.or(c.q);
        c.x = self.x.or(c.x);
        c.ns = self.ns.or(c.ns);
        c.per_n = self.per_n.or(c.per_n);
        c.replicates = self.replicates.or(c.replicates);
        c.seed = self.seed.or(c.seed);
        c.workers = self.workers.or(c.workers);
        c.out = self.out.or(c.out);
        c.grid.points = self.points.unwrap_or(c.grid.points);
        c.grid.decades = self.decades.unwrap_or(c.grid.decades);
        c.tolerances.spread = self.spread_bound.or(c.tolerances.spread);
        c.tolerances.stability = self.stability_bound.unwrap_or(c.tolerances.stability);
        c.resolve()
    }
}

fn configure(cli: Cli) -> Result<RunConfig> {
    match cli.command {
        Cmd::Norm(o) => o.apply(Some(Command::Norm)),
        Cmd::MakeDist(o) => o.apply(Some(Command::MakeDist)),
        Cmd::MakeOrlicz(o) => o.apply(Some(Command::MakeOrlicz)),
        Cmd::Conditions(o) => o.apply(Some(Command::Conditions)),
        Cmd::Verify { theorem, opts } => {
            let mut c = opts.apply(Some(Command::Verify))?;
            c.theorem = theorem.or(c.theorem);
            Ok(c)
        }
        Cmd::Roundtrip(o) => o.apply(Some(Command::Roundtrip)),
        Cmd::Embed(o) => o.apply(Some(Command::Embed)),
        Cmd::Run(o) => {
            if o.config.is_none() {
                return Err(Error::InvalidInput("`run` needs --config".into()));
            }
            o.apply(None)
        }
    }
}

fn execute(cfg: &RunConfig) -> Result<run::Outcome> {
    match cfg.workers {
        Some(w) if w > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidInput(e.to_string()))?
            .install(|| run::run(cfg)),
        _ => run::run(cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure(cli).and_then(|cfg| execute(&cfg));
    match outcome {
        Ok(o) => {
            println!("{}", o.text.trim_end());
            if o.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
