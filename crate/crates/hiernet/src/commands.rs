//! One function per subcommand, driven by a resolved [`ExperimentSpec`].
//!
//! Every run writes `<command>_<seed>.csv` (plus a few command-specific
//! companions) and a `manifest.txt` from which the run can be replayed.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hiernet_core::analysis::{self, FitKind, FitResult};
use hiernet_core::ensemble::SeedPool;
use hiernet_core::graphstats::PathOptions;
use hiernet_core::{netgen, rng, sir, Graph, HierarchyConfig, Seeding};

use crate::error::{Error, Result};
use crate::reproduce::{self, ReproducePlan};
use crate::summary::{self, KvDoc};
use crate::tables::{self, Table};
use crate::{edgelist, parallel};

pub const MANIFEST: &str = "manifest.txt";

/// Stream offsets so network generation, seed choice and realizations never
/// share a generator.
const SAMPLE_STREAM: u64 = 1;
const SPREAD_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Generate,
    Stats,
    Scaling,
    SirRun,
    Ensemble,
    LayerSweep,
    Rstar,
    Fit,
    Reproduce,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Generate,
        Command::Stats,
        Command::Scaling,
        Command::SirRun,
        Command::Ensemble,
        Command::LayerSweep,
        Command::Rstar,
        Command::Fit,
        Command::Reproduce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::Stats => "stats",
            Command::Scaling => "scaling",
            Command::SirRun => "sir-run",
            Command::Ensemble => "ensemble",
            Command::LayerSweep => "layer-sweep",
            Command::Rstar => "rstar",
            Command::Fit => "fit",
            Command::Reproduce => "reproduce",
        }
    }

    /// Config used when no `--config` is given.
    pub fn default_config(self) -> HierarchyConfig {
        match self {
            Command::SirRun => HierarchyConfig::propagation(1000, 8),
            Command::Ensemble | Command::LayerSweep => HierarchyConfig::propagation(10_000, 8),
            _ => HierarchyConfig::statistical(1000),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::config("command", format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitChoice {
    /// Split the histogram and fit both modes.
    #[default]
    Auto,
    PowerLaw,
    Gaussian,
}

impl FitChoice {
    fn name(self) -> &'static str {
        match self {
            FitChoice::Auto => "auto",
            FitChoice::PowerLaw => "power_law",
            FitChoice::Gaussian => "gaussian",
        }
    }
}

impl FromStr for FitChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(FitChoice::Auto),
            "power_law" | "power-law" | "power" => Ok(FitChoice::PowerLaw),
            "gaussian" => Ok(FitChoice::Gaussian),
            _ => Err(Error::config("kind", format!("unknown fit kind `{s}`"))),
        }
    }
}

/// A fully resolved run. The master seed equals `config.seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub command: Command,
    pub config: HierarchyConfig,
    pub out: PathBuf,
    pub full: bool,
    pub realizations: Option<u64>,
    pub layer: Option<usize>,
    pub sizes: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub input: Option<PathBuf>,
    pub range: Option<(usize, usize)>,
    pub kind: FitChoice,
    /// Run the ensemble on the complete graph of `n_total` nodes.
    pub complete: bool,
    /// Fresh network per realization.
    pub regenerate: bool,
    /// BFS sources when path lengths are sampled.
    pub sources: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(command: Command, config: HierarchyConfig, out: impl Into<PathBuf>) -> Self {
        ExperimentSpec {
            command,
            config,
            out: out.into(),
            full: false,
            realizations: None,
            layer: None,
            sizes: None,
            samples: None,
            tol: None,
            input: None,
            range: None,
            kind: FitChoice::Auto,
            complete: false,
            regenerate: false,
            sources: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    pub fn csv_name(&self) -> String {
        format!("{}_{}.csv", self.command, self.seed())
    }

    fn companion(&self, suffix: &str) -> String {
        format!("{}_{}_{suffix}", self.command, self.seed())
    }

    fn realizations_or_default(&self) -> u64 {
        self.realizations.unwrap_or(if self.full { 10_000 } else { 1_000 })
    }

    fn path_options(&self) -> PathOptions {
        let mut opts = PathOptions::default();
        if let Some(s) = self.sources {
            opts.sample_sources = s;
        }
        opts
    }

    pub fn to_manifest(&self) -> KvDoc {
        let mut doc = KvDoc::new();
        doc.set("command", self.command);
        doc.set("seed", self.seed());
        doc.set("scale", if self.full { "full" } else { "quick" });
        if let Some(r) = self.realizations {
            doc.set("realizations", r);
        }
        if let Some(l) = self.layer {
            doc.set("layer", l);
        }
        if let Some(s) = &self.sizes {
            doc.set("sizes", s.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","));
        }
        if let Some(s) = self.samples {
            doc.set("samples", s);
        }
        if let Some(t) = self.tol {
            doc.set("tol", t);
        }
        if let Some(p) = &self.input {
            doc.set("input", p.display());
        }
        if let Some((lo, hi)) = self.range {
            doc.set("range", format!("{lo}:{hi}"));
        }
        if self.command == Command::Fit {
            doc.set("kind", self.kind.name());
        }
        if self.complete {
            doc.set("complete", true);
        }
        if self.regenerate {
            doc.set("regenerate", true);
        }
        if let Some(s) = self.sources {
            doc.set("sources", s);
        }
        doc.set_config("config", &self.config);
        doc
    }

    /// Rebuilds a spec from a manifest, writing into `out`.
    pub fn from_manifest(doc: &KvDoc, out: impl Into<PathBuf>) -> Result<Self> {
        let command: Command = doc
            .get("command")
            .ok_or_else(|| Error::config("command", "missing from manifest"))?
            .parse()?;
        let config = doc.config("config")?.unwrap_or_else(|| command.default_config());
        let mut spec = ExperimentSpec::new(command, config, out);
        if let Some(seed) = doc.get("seed") {
            let seed: u64 = seed.parse().map_err(|_| Error::config("seed", format!("cannot parse `{seed}`")))?;
            if seed != spec.config.seed {
                return Err(Error::config("seed", "disagrees with config.seed"));
            }
        }
        spec.full = match doc.get("scale") {
            None | Some("quick") => false,
            Some("full") => true,
            Some(v) => return Err(Error::config("scale", format!("expected quick or full, got `{v}`"))),
        };
        spec.realizations = parse_opt(doc, "realizations")?;
        spec.layer = parse_opt(doc, "layer")?;
        spec.samples = parse_opt(doc, "samples")?;
        spec.tol = parse_opt(doc, "tol")?;
        spec.sources = parse_opt(doc, "sources")?;
        spec.sizes = doc.get("sizes").map(parse_sizes).transpose()?;
        spec.input = doc.get("input").map(PathBuf::from);
        spec.range = doc.get("range").map(parse_range).transpose()?;
        spec.kind = doc.get("kind").map_or(Ok(FitChoice::Auto), str::parse)?;
        spec.complete = parse_opt(doc, "complete")?.unwrap_or(false);
        spec.regenerate = parse_opt(doc, "regenerate")?.unwrap_or(false);
        Ok(spec)
    }
}

fn parse_opt<T: FromStr>(doc: &KvDoc, key: &str) -> Result<Option<T>> {
    doc.get(key)
        .map(|v| v.parse().map_err(|_| Error::config(key, format!("cannot parse `{v}`"))))
        .transpose()
}

pub fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::config("sizes", format!("cannot parse `{t}`"))))
        .collect()
}

/// `lo:hi`, inclusive.
pub fn parse_range(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::config("range", format!("expected lo:hi, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

/// What a run produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    /// Files written, relative to the output directory.
    pub files: Vec<String>,
    /// Lines for standard output.
    pub lines: Vec<String>,
}

struct Writer<'a> {
    dir: &'a Path,
    report: RunReport,
}

impl Writer<'_> {
    fn table(&mut self, name: String, t: &Table) -> Result<()> {
        t.write(&self.dir.join(&name))?;
        self.report.files.push(name);
        Ok(())
    }

    fn doc(&mut self, name: String, d: &KvDoc) -> Result<()> {
        d.write(&self.dir.join(&name))?;
        self.report.files.push(name);
        Ok(())
    }

    fn text(&mut self, name: String, s: &str) -> Result<()> {
        let path = self.dir.join(&name);
        fs::write(&path, s).map_err(|e| Error::io(&path, e))?;
        self.report.files.push(name);
        Ok(())
    }

    fn say(&mut self, line: impl Into<String>) {
        self.report.lines.push(line.into());
    }
}

/// Runs `spec`, writing its artifacts into `spec.out` (created if absent).
pub fn execute(spec: &ExperimentSpec) -> Result<RunReport> {
    spec.config.validate()?;
    fs::create_dir_all(&spec.out).map_err(|e| Error::io(&spec.out, e))?;
    let mut w = Writer { dir: &spec.out, report: RunReport::default() };
    match spec.command {
        Command::Generate => generate(spec, &mut w)?,
        Command::Stats => stats(spec, &mut w)?,
        Command::Scaling => scaling(spec, &mut w)?,
        Command::SirRun => sir_run(spec, &mut w)?,
        Command::Ensemble => ensemble(spec, &mut w)?,
        Command::LayerSweep => layer_sweep(spec, &mut w)?,
        Command::Rstar => rstar(spec, &mut w)?,
        Command::Fit => fit(spec, &mut w)?,
        Command::Reproduce => {
            let plan = if spec.full { ReproducePlan::full() } else { ReproducePlan::quick() };
            let rep = reproduce::run(&plan, spec.seed(), &spec.out)?;
            w.report.files.extend(rep.files);
            w.report.lines.extend(rep.lines);
        }
    }
    w.doc(MANIFEST.into(), &spec.to_manifest())?;
    Ok(w.report)
}

/// Re-runs the manifest at `manifest`, into `out` or the manifest's own
/// directory.
pub fn replay(manifest: &Path, out: Option<&Path>) -> Result<RunReport> {
    let doc = KvDoc::read(manifest)?;
    let dir = match out {
        Some(o) => o.to_path_buf(),
        None => manifest.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf),
    };
    execute(&ExperimentSpec::from_manifest(&doc, dir)?)
}

fn generate(spec: &ExperimentSpec, w: &mut Writer<'_>) -> Result<()> {
    let net = netgen::generate(&spec.config)?;
    w.table(spec.csv_name(), &tables::layer_table(&net.skeleton().layer_sizes()))?;
    w.text(format!("network_{}.txt", spec.seed()), &edgelist::format_network(&net))?;
    w.say(format!(
        "nodes={} edges={} layers={:?}",
        net.node_count(),
        net.graph().edge_count(),
        net.skeleton().layer_sizes()
    ));
    Ok(())
}

fn stats(spec: &ExperimentSpec, w: &mut Writer<'_>) -> Result<()> {
    let net = netgen::generate(&spec.config)?;
    let sample_seed = rng::derive_seed(spec.seed(), SAMPLE_STREAM);
    let s = parallel::statistics(net.graph(), &spec.path_options(), sample_seed);
    let row = tables::stats_row(&s).join(",");
    w.table(spec.csv_name(), &tables::stats_table([&s]))?;
    w.table(spec.companion("degrees.csv"), &tables::degree_table(&s))?;
    w.say(row);
    Ok(())
}

fn scaling(spec: &ExperimentSpec, w: &mut Writer<'_>) -> Result<()> {
    let sizes = spec.sizes.clone().unwrap_or_else(|| vec![1000, 3000, 10_000]);
    let samples = spec.samples.unwrap_or(if spec.full { 10 } else { 3 });
    let study = parallel::scaling_study(&spec.config, &sizes, samples)?;
    w.table(spec.csv_name(), &tables::scaling_table(&study))?;
    let mut doc = KvDoc::new();
    doc.set("seed", spec.seed());
    doc.set_config("config", &spec.config);
    doc.set("slope", study.slope());
    doc.set("intercept", study.fit.intercept);
    doc.set("rms", study.fit.rms);
    w.doc(spec.companion("summary.txt"), &doc)?;
    w.say(format!("slope={}", study.slope()));
    Ok(())
}

fn sir_run(spec: &ExperimentSpec, w: &mut Writer<'_>) -> Result<()> {
    let net = netgen::generate(&spec.config)?;
    let mut r = rng::stream(spec.seed(), SPREAD_STREAM);
    let outcome = match spec.layer {
        Some(d) => sir::run_with_layer_seed(&net, d, &mut r)?,
        None => {
            let seed = SeedPool::All(net.node_count()).draw(&mut r);
            let mut o = sir::run(net.graph(), seed, &mut r);
            o.seed_layer = Some(net.skeleton().layer_of(seed));
            o
        }
    };
    w.table(spec.csv_name(), &tables::trajectory_table(&outcome))?;
    let mut doc = KvDoc::new();
    doc.set("seed", spec.seed());
    doc.set_config("config", &spec.config);
    doc.set("seed_node", outcome.seed_node);
    doc.set("seed_layer", outcome.seed_layer.unwrap_or(0));
    doc.set("n_refractory", outcome.n_refractory);
    doc.set("lifetime", outcome.lifetime);
    doc.set("r", outcome.final_fraction());
    w.doc(spec.companion("summary.txt"), &doc)?;
    w.say(format!("r={} N_R={} T={}", outcome.final_fraction(), outcome.n_refractory, outcome.lifetime));
    Ok(())
}

fn ensemble(spec: &ExperimentSpec, w: &mut Writer<'_>) -> Result<()> {
    let n_real = spec.realizations_or_default();
    let master = rng::derive_seed(spec.seed(), SPREAD_STREAM);
    let seeding = spec.layer.map_or(Seeding::UniformRandom, Seeding::Layer);
    let hist = if spec.complete {
        if spec.layer.is_some() {
            return Err(Error::Usage("--layer makes no sense with --complete".into()));
        }
        let n = spec.config.n_total;
        parallel::run_ensemble_on_graph(&Graph::complete(n), SeedPool::All(n), n_real, master)?
    } else if spec.regenerate {
        parallel::run_ensemble_regenerating(&spec.config, seeding, n_real, master)?
    } else {
        let net = netgen::generate(&spec.config)?;
        parallel::run_ensemble(&net, seeding, n_real, master)?
    };
    w.table(spec.csv_name(), &tables::histogram_table(&hist))?;
    let a = summary::analyze(&hist)?;
    let mut doc = KvDoc::new();
    doc.set("seed", spec.seed());
    doc.set_config("config", &spec.config);
    doc.set("realizations", hist.n_realizations());
    doc.set("seeding", spec.layer.map_or("uniform".to_string(), |d| format!("layer{d}")));
    doc.set("graph", if spec.complete { "complete" } else { "hierarchical" });
    summary::set_analysis(&mut doc, &a);
    w.doc(spec.companion("summary.txt"), &doc)?;
    w.say(format!("r={} bimodal={} threshold={}", a.r, a.split.bimodal, a.split.threshold));
    Ok(())
}

fn layer_sweep(spec: &ExperimentSpec, w: &mut Writer<'_>) -> Result<()> {
    let n_real = spec.realizations_or_default();
    let sweep = parallel::layer_sweep(&spec.config, n_real, rng::derive_seed(spec.seed(), SPREAD_STREAM))?;
    w.table(spec.csv_name(), &tables::sweep_table(&sweep))?;
    let mut doc = KvDoc::new();
    doc.set("seed", spec.seed());
    doc.set_config("config", &spec.config);
    doc.set("layer_sizes", sweep.layer_sizes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","));
    doc.set("argmax_layer", sweep.argmax_layer());
    doc.set("argmin_layer", sweep.argmin_layer());
    w.doc(spec.companion("summary.txt"), &doc)?;
    for lf in &sweep.per_layer {
        w.say(format!("layer {} r={}", lf.layer, lf.r));
    }
    Ok(())
}

fn rstar(spec: &ExperimentSpec, w: &mut Writer<'_>) -> Result<()> {
    let tol = spec.tol.unwrap_or(1e-9);
    let r = analysis::solve_r_star(tol)?;
    let residual = 1.0 - (-2.0 * r).exp() - r;
    let mut t = Table::new(&["tol", "r_star", "residual"]);
    t.push([tol, r, residual]);
    w.table(spec.csv_name(), &t)?;
    w.say(format!("{r:.6}"));
    Ok(())
}

fn fit(spec: &ExperimentSpec, w: &mut Writer<'_>) -> Result<()> {
    let input = spec.input.as_ref().ok_or_else(|| Error::Usage("fit needs --input <histogram.csv>".into()))?;
    let hist = tables::read_histogram(input)?;
    let n = hist.network_size();
    let mut fits: Vec<FitResult> = Vec::new();
    match (spec.kind, spec.range) {
        (FitChoice::PowerLaw, range) => {
            let (lo, hi) = range.unwrap_or((1, n));
            fits.push(analysis::fit_power_law(&hist, lo, hi)?);
        }
        (FitChoice::Gaussian, range) => {
            let (lo, hi) = range.unwrap_or((0, n));
            fits.push(analysis::fit_gaussian(&hist, lo, hi)?);
        }
        (FitChoice::Auto, Some(_)) => {
            return Err(Error::Usage("--range needs --kind power_law or gaussian".into()));
        }
        (FitChoice::Auto, None) => {
            let a = summary::analyze(&hist)?;
            if let Some(small) = a.small_mode {
                fits.push(small?);
            }
            fits.push(a.large_mode?);
        }
    }
    let mut t = Table::new(&["kind", "range_lo", "range_hi", "points", "residual", "p1", "p2"]);
    let mut doc = KvDoc::new();
    doc.set("input", input.display());
    doc.set("realizations", hist.n_realizations());
    for (i, f) in fits.iter().enumerate() {
        let (kind, p1, p2) = match f.kind {
            FitKind::PowerLaw { exponent, prefactor } => ("power_law", exponent, prefactor),
            FitKind::Gaussian { mean, stddev } => ("gaussian", mean, stddev),
        };
        t.push([
            kind.to_string(),
            f.fit_range.0.to_string(),
            f.fit_range.1.to_string(),
            f.n_points.to_string(),
            f.residual.to_string(),
            p1.to_string(),
            p2.to_string(),
        ]);
        summary::set_fit(&mut doc, &format!("fit.{i}"), f);
        w.say(format!("{kind} {p1} {p2}"));
    }
    w.table(spec.csv_name(), &t)?;
    w.doc(spec.companion("summary.txt"), &doc)?;
    Ok(())
}
