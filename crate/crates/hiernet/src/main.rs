use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hiernet::commands::{parse_range, parse_sizes};
use hiernet::config_file;
use hiernet::{execute, replay, Command, ExperimentSpec, FitChoice, Result, RunReport};

#[derive(Parser)]
#[command(name = "hiernet", version, about = "Hierarchical social networks and information spreading")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Generator config file (flat key = value).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; replaces the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, created if absent.
    #[arg(long, default_value = "hiernet-out")]
    out: PathBuf,
    /// Scaled-down defaults (the default).
    #[arg(long, conflicts_with = "full")]
    quick: bool,
    /// Full-size defaults.
    #[arg(long)]
    full: bool,
    /// Network size; replaces the config's `n_total`.
    #[arg(long)]
    n: Option<usize>,
    /// Config overrides, `key=value`.
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build one network and write it as an edge list.
    Generate(Common),
    /// Clustering, path lengths and components of one network.
    Stats {
        #[command(flatten)]
        common: Common,
        /// BFS sources when sampling path lengths on large networks.
        #[arg(long)]
        sources: Option<usize>,
    },
    /// Log-log slope of mean clustering against network size.
    Scaling {
        #[command(flatten)]
        common: Common,
        /// Comma-separated sizes.
        #[arg(long)]
        sizes: Option<String>,
        /// Networks per size.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// One spreading realization with its trajectory.
    SirRun {
        #[command(flatten)]
        common: Common,
        /// Seed a uniformly chosen member of this layer.
        #[arg(long)]
        layer: Option<usize>,
    },
    /// Histogram of final refractory counts over many realizations.
    Ensemble {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        realizations: Option<u64>,
        #[arg(long)]
        layer: Option<usize>,
        /// Use the complete graph on `n_total` nodes.
        #[arg(long)]
        complete: bool,
        /// Generate a fresh network for every realization.
        #[arg(long)]
        regenerate: bool,
    },
    /// Layer-seeded ensembles for every layer of one network.
    LayerSweep {
        #[command(flatten)]
        common: Common,
        /// Realizations per layer.
        #[arg(long)]
        realizations: Option<u64>,
    },
    /// Root of r = 1 - exp(-2 r).
    Rstar {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Fit a histogram written by `ensemble`.
    Fit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        /// Inclusive `lo:hi` range of N_R.
        #[arg(long)]
        range: Option<String>,
        /// auto, power_law or gaussian.
        #[arg(long, default_value = "auto")]
        kind: String,
    },
    /// Run the whole experiment bundle and its report.
    Reproduce(Common),
    /// Re-run the experiment recorded in a manifest.
    Replay {
        manifest: PathBuf,
        /// Output directory; defaults to the manifest's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn resolve(command: Command, c: Common) -> Result<ExperimentSpec> {
    let base = match &c.config {
        Some(path) => config_file::read_config(path)?,
        None => command.default_config(),
    };
    let mut pairs = c.overrides.iter().map(|s| config_file::parse_override(s)).collect::<Result<Vec<_>>>()?;
    if let Some(n) = c.n {
        pairs.push(("n_total".into(), n.to_string()));
    }
    if let Some(seed) = c.seed {
        pairs.push(("seed".into(), seed.to_string()));
    }
    let config = config_file::apply_pairs(&base, &pairs)?;
    let mut spec = ExperimentSpec::new(command, config, c.out);
    spec.full = c.full;
    Ok(spec)
}

fn run(cli: Cli) -> Result<RunReport> {
    let spec = match cli.cmd {
        Cmd::Generate(c) => resolve(Command::Generate, c)?,
        Cmd::Stats { common, sources } => {
            let mut s = resolve(Command::Stats, common)?;
            s.sources = sources;
            s
        }
        Cmd::Scaling { common, sizes, samples } => {
            let mut s = resolve(Command::Scaling, common)?;
            s.sizes = sizes.as_deref().map(parse_sizes).transpose()?;
            s.samples = samples;
            s
        }
        Cmd::SirRun { common, layer } => {
            let mut s = resolve(Command::SirRun, common)?;
            s.layer = layer;
            s
        }
        Cmd::Ensemble { common, realizations, layer, complete, regenerate } => {
            let mut s = resolve(Command::Ensemble, common)?;
            s.realizations = realizations;
            s.layer = layer;
            s.complete = complete;
            s.regenerate = regenerate;
            s
        }
        Cmd::LayerSweep { common, realizations } => {
            let mut s = resolve(Command::LayerSweep, common)?;
            s.realizations = realizations;
            s
        }
        Cmd::Rstar { common, tol } => {
            let mut s = resolve(Command::Rstar, common)?;
            s.tol = tol;
            s
        }
        Cmd::Fit { common, input, range, kind } => {
            let mut s = resolve(Command::Fit, common)?;
            s.input = Some(input);
            s.range = range.as_deref().map(parse_range).transpose()?;
            s.kind = kind.parse::<FitChoice>()?;
            s
        }
        Cmd::Reproduce(c) => resolve(Command::Reproduce, c)?,
        Cmd::Replay { manifest, out } => return replay(&manifest, out.as_deref()),
    };
    execute(&spec)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            for line in report.lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hiernet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
