//! Flat `key=value` documents: run summaries and manifests.

use std::fs;
use std::path::Path;

use hiernet_core::analysis::{self, FitKind, FitResult, ModeSplit};
use hiernet_core::{HierarchyConfig, NrHistogram};

use crate::config_file;
use crate::error::{Error, Result};

/// Ordered key-value pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KvDoc {
    pub entries: Vec<(String, String)>,
}

impl KvDoc {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        let key = key.into();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Adds every config key under `prefix.`.
    pub fn set_config(&mut self, prefix: &str, cfg: &HierarchyConfig) {
        for (k, v) in config_file::config_pairs(cfg) {
            self.set(format!("{prefix}.{k}"), v);
        }
    }

    /// The config stored under `prefix.`, if any.
    pub fn config(&self, prefix: &str) -> Result<Option<HierarchyConfig>> {
        let head = format!("{prefix}.");
        let pairs: Vec<(String, String)> = self
            .entries
            .iter()
            .filter_map(|(k, v)| Some((k.strip_prefix(&head)?.to_owned(), v.clone())))
            .collect();
        if pairs.is_empty() {
            return Ok(None);
        }
        config_file::apply_pairs(&HierarchyConfig::statistical(1000), &pairs).map(Some)
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = KvDoc::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(line, "expected key=value"))?;
            doc.set(k.trim(), v.trim());
        }
        Ok(doc)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}

pub fn set_fit(doc: &mut KvDoc, prefix: &str, fit: &FitResult) {
    match fit.kind {
        FitKind::PowerLaw { exponent, prefactor } => {
            doc.set(format!("{prefix}.kind"), "power_law");
            doc.set(format!("{prefix}.exponent"), exponent);
            doc.set(format!("{prefix}.prefactor"), prefactor);
        }
        FitKind::Gaussian { mean, stddev } => {
            doc.set(format!("{prefix}.kind"), "gaussian");
            doc.set(format!("{prefix}.mean"), mean);
            doc.set(format!("{prefix}.stddev"), stddev);
        }
    }
    doc.set(format!("{prefix}.range_lo"), fit.fit_range.0);
    doc.set(format!("{prefix}.range_hi"), fit.fit_range.1);
    doc.set(format!("{prefix}.points"), fit.n_points);
    doc.set(format!("{prefix}.residual"), fit.residual);
}

/// Mode split plus the two fits, each restricted to its side of the
/// threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramAnalysis {
    pub r: f64,
    pub r_stderr: f64,
    pub split: ModeSplit,
    pub mass_below: f64,
    /// Power law over `1..threshold`; only for bimodal histograms.
    pub small_mode: Option<hiernet_core::Result<FitResult>>,
    /// Gaussian over `threshold..=N` (the whole range when unimodal).
    pub large_mode: hiernet_core::Result<FitResult>,
}

pub fn analyze(h: &NrHistogram) -> hiernet_core::Result<HistogramAnalysis> {
    let split = analysis::split_modes(h)?;
    let n = h.network_size();
    let small_mode = split.bimodal.then(|| analysis::fit_power_law(h, 1, split.threshold.saturating_sub(1)));
    Ok(HistogramAnalysis {
        r: h.average_fraction()?,
        r_stderr: h.fraction_standard_error(),
        split,
        mass_below: h.mass_below(split.threshold),
        small_mode,
        large_mode: analysis::fit_gaussian(h, split.threshold, n),
    })
}

pub fn set_analysis(doc: &mut KvDoc, a: &HistogramAnalysis) {
    doc.set("r", a.r);
    doc.set("r_stderr", a.r_stderr);
    doc.set("split.bimodal", a.split.bimodal);
    doc.set("split.threshold", a.split.threshold);
    doc.set("split.low_peak", a.split.low_peak);
    doc.set("split.high_peak", a.split.high_peak);
    doc.set("split.mass_below", a.mass_below);
    for (prefix, fit) in [("fit.small", a.small_mode.as_ref()), ("fit.large", Some(&a.large_mode))] {
        match fit {
            Some(Ok(f)) => set_fit(doc, prefix, f),
            Some(Err(e)) => doc.set(format!("{prefix}.error"), e),
            None => {}
        }
    }
}
