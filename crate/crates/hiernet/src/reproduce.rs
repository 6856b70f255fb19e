//! The whole experiment bundle: statistics table, clustering scaling,
//! a single trajectory, four `N_R` ensembles and two layer sweeps, followed
//! by a report that checks each headline number against its reference band.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use hiernet_core::analysis;
use hiernet_core::ensemble::SeedPool;
use hiernet_core::graphstats::PathOptions;
use hiernet_core::{netgen, rng, sir, Graph, HierarchyConfig, NrHistogram, Seeding};

use crate::error::{Error, Result};
use crate::summary::{self, HistogramAnalysis, KvDoc};
use crate::tables::{self, Table};
use crate::parallel;

/// Reference table: `(N, C, APL, diameter)`.
pub const REFERENCE_TABLE: [(usize, f64, f64, usize); 14] = [
    (1000, 0.297, 4.2, 11),
    (2000, 0.180, 3.1, 11),
    (3000, 0.191, 4.3, 12),
    (4000, 0.153, 3.5, 9),
    (5000, 0.131, 3.6, 12),
    (6000, 0.130, 3.4, 10),
    (7000, 0.137, 3.4, 18),
    (8000, 0.116, 2.9, 12),
    (9000, 0.145, 2.7, 15),
    (10000, 0.135, 3.2, 16),
    (15000, 0.100, 3.5, 15),
    (20000, 0.137, 3.9, 17),
    (25000, 0.079, 3.0, 11),
    (30000, 0.083, 2.7, 11),
];

pub const CONSTANT_SWEEP_REFERENCE: [f64; 5] = [0.7721, 0.7791, 0.7834, 0.7827, 0.7828];
pub const GAUSSIAN_SWEEP_REFERENCE: [f64; 8] = [0.6752, 0.7017, 0.7499, 0.7824, 0.7894, 0.7898, 0.7898, 0.7523];

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleJob {
    pub name: String,
    pub config: HierarchyConfig,
    pub seeding: Seeding,
    pub realizations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepJob {
    pub name: String,
    pub config: HierarchyConfig,
    pub realizations: u64,
}

/// Sizes and counts for one bundle. Config seeds are ignored; every seed is
/// derived from the master seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ReproducePlan {
    pub table_sizes: Vec<usize>,
    pub path_options: PathOptions,
    pub scaling_sizes: Vec<usize>,
    pub scaling_seeds: usize,
    pub trajectory: HierarchyConfig,
    pub baseline_n: usize,
    pub baseline_realizations: u64,
    /// In order: uniform seeding (large m), layer 1, layer 3, Gaussian
    /// branching layer 1.
    pub ensembles: Vec<EnsembleJob>,
    /// Constant branching, then Gaussian branching.
    pub sweeps: Vec<SweepJob>,
}

impl ReproducePlan {
    fn build(n_const: usize, n_gauss: usize, realizations: u64, path_options: PathOptions, scaling_seeds: usize) -> Self {
        let constant = HierarchyConfig::propagation(n_const, 8);
        let gaussian = HierarchyConfig::propagation_gaussian(n_gauss, 8.0, 2.0);
        let job = |name: &str, config: &HierarchyConfig, seeding| EnsembleJob {
            name: name.into(),
            config: config.clone(),
            seeding,
            realizations,
        };
        ReproducePlan {
            table_sizes: REFERENCE_TABLE.iter().map(|r| r.0).collect(),
            path_options,
            scaling_sizes: vec![1000, 3000, 10_000],
            scaling_seeds,
            trajectory: HierarchyConfig::propagation(1000, 8),
            baseline_n: 1000,
            baseline_realizations: 10_000,
            ensembles: vec![
                job("uniform_m32", &HierarchyConfig::propagation(n_const, 32), Seeding::UniformRandom),
                job("layer1_m8", &constant, Seeding::Layer(1)),
                job("layer3_m8", &constant, Seeding::Layer(3)),
                job("layer1_gaussian", &gaussian, Seeding::Layer(1)),
            ],
            sweeps: vec![
                SweepJob { name: "constant".into(), config: constant, realizations },
                SweepJob { name: "gaussian".into(), config: gaussian, realizations },
            ],
        }
    }

    /// Every table size with sampled path lengths; propagation experiments at
    /// `N = 2000` (Gaussian sweep `N = 4000`) with 10^3 realizations.
    pub fn quick() -> Self {
        Self::build(2000, 4000, 1000, PathOptions { sample_cutoff: 2000, sample_sources: 200 }, 3)
    }

    /// Full-size experiments: `N = 10000` (Gaussian `N = 20000`), 10^4
    /// realizations, exact path lengths up to `N = 20000`.
    pub fn full() -> Self {
        Self::build(10_000, 20_000, 10_000, PathOptions::default(), 10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: String,
    pub reference: String,
    pub band: String,
    pub status: Status,
}

impl Check {
    fn band(name: impl Into<String>, x: f64, reference: f64, lo: f64, hi: f64) -> Self {
        Check {
            name: name.into(),
            measured: x.to_string(),
            reference: reference.to_string(),
            band: format!("[{lo}, {hi}]"),
            status: if x >= lo && x <= hi { Status::Pass } else { Status::Fail },
        }
    }

    fn holds(name: impl Into<String>, measured: impl ToString, reference: &str, ok: bool) -> Self {
        Check {
            name: name.into(),
            measured: measured.to_string(),
            reference: reference.into(),
            band: String::new(),
            status: if ok { Status::Pass } else { Status::Fail },
        }
    }

    fn info(name: impl Into<String>, measured: impl ToString, reference: impl ToString) -> Self {
        Check {
            name: name.into(),
            measured: measured.to_string(),
            reference: reference.to_string(),
            band: String::new(),
            status: Status::Info,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BundleReport {
    pub files: Vec<String>,
    pub lines: Vec<String>,
    pub checks: Vec<Check>,
    pub table_rows: usize,
    pub histograms: usize,
    pub sweeps: usize,
}

// Tags for seeds derived from the master seed.
const TABLE: u64 = 0x7ab1e;
const SCALING: u64 = 0x5ca1e;
const TRAJECTORY: u64 = 0x7ea1;
const BASELINE: u64 = 0xba5e;
const ENSEMBLE: u64 = 0xe45e;
const SWEEP: u64 = 0x5eeb;

fn sub(master: u64, tag: u64, index: u64) -> u64 {
    rng::derive_seed(rng::derive_seed(master, tag), index)
}

fn save(dir: &Path, files: &mut Vec<String>, name: String, bytes: &[u8]) -> Result<()> {
    let path = dir.join(&name);
    fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    files.push(name);
    Ok(())
}

fn power_exponent(a: &HistogramAnalysis) -> Option<f64> {
    match a.small_mode {
        Some(Ok(f)) => match f.kind {
            analysis::FitKind::PowerLaw { exponent, .. } => Some(exponent),
            _ => None,
        },
        _ => None,
    }
}

/// Runs `plan` with every seed derived from `master`, writing into `dir`.
pub fn run(plan: &ReproducePlan, master: u64, dir: &Path) -> Result<BundleReport> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut rep = BundleReport::default();
    let mut files = Vec::new();

    let r_star = analysis::solve_r_star(1e-12)?;
    rep.checks.push(Check::band("r_star", r_star, 0.796, 0.795, 0.797));

    let n = plan.baseline_n;
    let base = parallel::run_ensemble_on_graph(
        &Graph::complete(n),
        SeedPool::All(n),
        plan.baseline_realizations,
        sub(master, BASELINE, 0),
    )?;
    let r_base = base.average_fraction()?;
    rep.checks.push(Check::band("baseline_complete_graph_r", r_base, 0.7968, 0.7868, 0.8068));

    let mut stats = Vec::with_capacity(plan.table_sizes.len());
    for (i, &size) in plan.table_sizes.iter().enumerate() {
        let cfg = HierarchyConfig::statistical(size).with_seed(sub(master, TABLE, i as u64));
        let net = netgen::generate(&cfg)?;
        let s = parallel::statistics(net.graph(), &plan.path_options, sub(master, TABLE, 1 << 32 | i as u64));
        if let Some(&(_, c, apl, diam)) = REFERENCE_TABLE.iter().find(|r| r.0 == size) {
            rep.checks.push(Check::info(
                format!("table_N{size}"),
                format!("C={} apl={} diameter={}", s.clustering_avg, s.path.avg_path_length, s.path.diameter),
                format!("C={c} apl={apl} diameter={diam}"),
            ));
        }
        if size == 1000 {
            rep.checks.push(Check::band("table_N1000_clustering", s.clustering_avg, 0.297, 0.18, 0.42));
            rep.checks.push(Check::band("table_N1000_apl", s.path.avg_path_length, 4.2, 2.5, 5.5));
            rep.checks.push(Check::band("table_N1000_diameter", s.path.diameter as f64, 11.0, 6.0, 18.0));
        }
        stats.push(s);
    }
    rep.table_rows = stats.len();
    save(dir, &mut files, format!("table_{master}.csv"), &tables::stats_table(&stats).to_bytes()?)?;

    let template = HierarchyConfig::statistical(1000).with_seed(sub(master, SCALING, 0));
    match parallel::scaling_study(&template, &plan.scaling_sizes, plan.scaling_seeds) {
        Ok(study) => {
            save(dir, &mut files, format!("scaling_{master}.csv"), &tables::scaling_table(&study).to_bytes()?)?;
            rep.checks.push(Check::band("scaling_slope", study.slope(), -0.32, -0.45, -0.20));
        }
        Err(e) => rep.checks.push(Check::holds("scaling_slope", e, "-0.32", false)),
    }

    let traj_cfg = plan.trajectory.clone().with_seed(sub(master, TRAJECTORY, 0));
    let net = netgen::generate(&traj_cfg)?;
    let mut r = rng::stream(sub(master, TRAJECTORY, 1), 0);
    let seed_node = SeedPool::All(net.node_count()).draw(&mut r);
    let outcome = sir::run(net.graph(), seed_node, &mut r);
    save(dir, &mut files, format!("trajectory_{master}.csv"), &tables::trajectory_table(&outcome).to_bytes()?)?;
    rep.checks.push(Check::band("trajectory_final_r", outcome.final_fraction(), 0.794, 0.70, 0.85));

    let mut analyses = Vec::new();
    for (i, job) in plan.ensembles.iter().enumerate() {
        let cfg = job.config.clone().with_seed(sub(master, ENSEMBLE, i as u64));
        let net = netgen::generate(&cfg)?;
        let hist = parallel::run_ensemble(&net, job.seeding, job.realizations, sub(master, ENSEMBLE, 1 << 32 | i as u64))?;
        let a = summary::analyze(&hist)?;
        let mut doc = KvDoc::new();
        doc.set("name", &job.name);
        doc.set_config("config", &cfg);
        doc.set("realizations", hist.n_realizations());
        summary::set_analysis(&mut doc, &a);
        save(dir, &mut files, format!("ensemble_{}_{master}.csv", job.name), &tables::histogram_table(&hist).to_bytes()?)?;
        save(dir, &mut files, format!("ensemble_{}_{master}_summary.txt", job.name), doc.render().as_bytes())?;
        analyses.push((hist, a));
    }
    rep.histograms = analyses.len();
    ensemble_checks(&mut rep.checks, &analyses);

    let mut sweeps = Vec::new();
    for (i, job) in plan.sweeps.iter().enumerate() {
        let cfg = job.config.clone().with_seed(sub(master, SWEEP, i as u64));
        let sweep = parallel::layer_sweep(&cfg, job.realizations, sub(master, SWEEP, 1 << 32 | i as u64))?;
        save(dir, &mut files, format!("sweep_{}_{master}.csv", job.name), &tables::sweep_table(&sweep).to_bytes()?)?;
        sweeps.push(sweep.fractions());
    }
    rep.sweeps = sweeps.len();
    if let Some(r) = sweeps.first() {
        constant_sweep_checks(&mut rep.checks, r);
    }
    if let Some(r) = sweeps.get(1) {
        gaussian_sweep_checks(&mut rep.checks, r);
    }

    let mut t = Table::new(&["check", "measured", "reference", "band", "status"]);
    let mut text = String::new();
    for c in &rep.checks {
        t.push([c.name.as_str(), &c.measured, &c.reference, &c.band, c.status.label()]);
        let _ = writeln!(text, "{} {}: measured {} reference {} {}", c.status.label(), c.name, c.measured, c.reference, c.band);
    }
    save(dir, &mut files, format!("reproduce_{master}.csv"), &t.to_bytes()?)?;
    save(dir, &mut files, format!("report_{master}.txt"), text.as_bytes())?;
    rep.lines = text.lines().map(str::to_owned).collect();
    rep.files = files;
    Ok(rep)
}

fn ensemble_checks(checks: &mut Vec<Check>, analyses: &[(NrHistogram, HistogramAnalysis)]) {
    if let Some((_, a)) = analyses.first() {
        checks.push(Check::info("uniform_m32_r", a.r, "large-N_R bump, almost nothing near zero"));
        checks.push(Check::info("uniform_m32_mass_below_split", a.mass_below, "-"));
    }
    if let Some((h1, a1)) = analyses.get(1) {
        checks.push(Check::holds("layer1_m8_bimodal", a1.split.bimodal, "true", a1.split.bimodal));
        match power_exponent(a1) {
            Some(e) => checks.push(Check::band("layer1_m8_power_exponent", e, 3.0, 2.0, 4.0)),
            None => checks.push(Check::holds("layer1_m8_power_exponent", "none", "3", false)),
        }
        if let Some((h3, _)) = analyses.get(2) {
            let threshold = near_zero_threshold(h1, a1);
            checks.push(Check::band("layer3_m8_mass_below_split", h3.mass_below(threshold), 0.0, 0.0, 0.02));
        }
    }
    if let Some((_, a)) = analyses.get(3) {
        checks.push(Check::holds("layer1_gaussian_bimodal", a.split.bimodal, "true", a.split.bimodal));
        match power_exponent(a) {
            Some(e) => checks.push(Check::band("layer1_gaussian_power_exponent", e, 2.86, 2.0, 4.0)),
            None => checks.push(Check::holds("layer1_gaussian_power_exponent", "none", "2.86", false)),
        }
    }
}

/// The layer-1 split threshold, or `N / 10` when layer 1 shows no split.
pub fn near_zero_threshold(layer1: &NrHistogram, a: &HistogramAnalysis) -> usize {
    if a.split.bimodal {
        a.split.threshold
    } else {
        layer1.network_size() / 10
    }
}

fn argmax(r: &[f64]) -> usize {
    r.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map_or(0, |(i, _)| i + 1)
}

fn argmin(r: &[f64]) -> usize {
    r.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map_or(0, |(i, _)| i + 1)
}

fn constant_sweep_checks(checks: &mut Vec<Check>, r: &[f64]) {
    checks.push(Check::holds("constant_sweep_min_at_layer1", argmin(r), "1", argmin(r) == 1));
    let top = argmax(r);
    checks.push(Check::holds("constant_sweep_max_not_top", top, "3", top != 1));
    for (d, (&x, &p)) in r.iter().zip(&CONSTANT_SWEEP_REFERENCE).enumerate() {
        checks.push(Check::band(format!("constant_sweep_r{}", d + 1), x, p, p - 0.02, p + 0.02));
    }
}

fn gaussian_sweep_checks(checks: &mut Vec<Check>, r: &[f64]) {
    let p = GAUSSIAN_SWEEP_REFERENCE[0];
    checks.push(Check::band("gaussian_sweep_r1", r[0], p, p - 0.03, p + 0.03));
    let peak = r.iter().copied().fold(f64::MIN, f64::max);
    let bottom = *r.last().unwrap();
    checks.push(Check::holds(
        "gaussian_sweep_bottom_below_peak",
        format!("bottom={bottom} peak={peak}"),
        "0.7523 < 0.7898",
        bottom < peak,
    ));
    for (d, &x) in r.iter().enumerate() {
        checks.push(Check::info(
            format!("gaussian_sweep_r{}", d + 1),
            x,
            GAUSSIAN_SWEEP_REFERENCE.get(d).map_or("-".to_string(), f64::to_string),
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_plan_shape() {
        let p = ReproducePlan::quick();
        assert_eq!(p.table_sizes.len(), 14);
        assert_eq!(p.ensembles.len(), 4);
        assert_eq!(p.sweeps.len(), 2);
        assert!(p.ensembles.iter().all(|j| j.config.n_total <= 10_000 && j.realizations == 1000));
    }

    #[test]
    fn sweep_checks() {
        let mut c = Vec::new();
        constant_sweep_checks(&mut c, &[0.7721, 0.7791, 0.7834, 0.7827, 0.7828]);
        assert!(c.iter().all(|c| c.status == Status::Pass));
        let mut c = Vec::new();
        constant_sweep_checks(&mut c, &[0.80, 0.77, 0.77]);
        assert_eq!(c[0].status, Status::Fail);
        assert_eq!(c[1].status, Status::Fail);
    }
}
