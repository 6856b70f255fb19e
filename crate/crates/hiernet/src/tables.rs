//! CSV writers (and the histogram reader used by `fit`).
//!
//! Floats use Rust's shortest round-trip formatting so equal results give
//! byte-identical files.

use std::fs;
use std::path::Path;

use hiernet_core::graphstats::ScalingStudy;
use hiernet_core::{GraphStatistics, LayerSweepResult, NrHistogram, SirOutcome};

use crate::error::{Error, Result};

/// A CSV document assembled in memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        let row: Vec<String> = row.into_iter().map(|s| s.to_string()).collect();
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| Error::Usage(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()?).map_err(|e| Error::io(path, e))
    }
}

pub const STATS_HEADER: [&str; 5] = ["N", "clustering", "apl", "diameter", "components"];

pub fn stats_row(s: &GraphStatistics) -> Vec<String> {
    vec![
        s.n_nodes.to_string(),
        s.clustering_avg.to_string(),
        s.path.avg_path_length.to_string(),
        s.path.diameter.to_string(),
        s.path.n_components.to_string(),
    ]
}

pub fn stats_table<'a>(rows: impl IntoIterator<Item = &'a GraphStatistics>) -> Table {
    let mut t = Table::new(&STATS_HEADER);
    for s in rows {
        t.push(stats_row(s));
    }
    t
}

pub fn degree_table(s: &GraphStatistics) -> Table {
    let mut t = Table::new(&["degree", "count"]);
    for (k, &c) in s.degree_histogram.iter().enumerate() {
        t.push([k, c]);
    }
    t
}

pub fn layer_table(sizes: &[usize]) -> Table {
    let mut t = Table::new(&["layer", "size"]);
    for (i, &n) in sizes.iter().enumerate() {
        t.push([i + 1, n]);
    }
    t
}

/// `t,s,i,r` as fractions of `N`.
pub fn trajectory_table(outcome: &SirOutcome) -> Table {
    let mut t = Table::new(&["t", "s", "i", "r"]);
    for p in &outcome.trajectory {
        let n = (p.susceptible + p.infected + p.refractory) as f64;
        t.push([
            p.t.to_string(),
            (p.susceptible as f64 / n).to_string(),
            (p.infected as f64 / n).to_string(),
            (p.refractory as f64 / n).to_string(),
        ]);
    }
    t
}

/// Every bin `0..=N`, so the network size can be read back.
pub fn histogram_table(h: &NrHistogram) -> Table {
    let mut t = Table::new(&["n_r", "count", "frequency"]);
    for (k, &c) in h.counts().iter().enumerate() {
        t.push([k.to_string(), c.to_string(), h.frequency(k).to_string()]);
    }
    t
}

pub fn sweep_table(sweep: &LayerSweepResult) -> Table {
    let mut t = Table::new(&["layer", "r", "realizations"]);
    for lf in &sweep.per_layer {
        t.push([lf.layer.to_string(), lf.r.to_string(), lf.realizations.to_string()]);
    }
    t
}

pub fn scaling_table(study: &ScalingStudy) -> Table {
    let mut t = Table::new(&["N", "clustering", "samples"]);
    for r in &study.rows {
        t.push([r.n.to_string(), r.mean_clustering.to_string(), r.samples.to_string()]);
    }
    t
}

/// Reads an `n_r,count[,frequency]` file. The network size is the largest
/// `n_r` listed.
pub fn parse_histogram(bytes: &[u8], origin: &Path) -> Result<NrHistogram> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(ki), Some(ci)) = (col("n_r"), col("count")) else {
        return Err(Error::Parse { path: origin.into(), line: 1, message: "expected columns n_r,count".into() });
    };
    let mut entries = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| -> Result<u64> {
            rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| Error::Parse {
                path: origin.into(),
                line: idx + 2,
                message: format!("bad integer `{}`", rec.get(i).unwrap_or("")),
            })
        };
        entries.push((field(ki)? as usize, field(ci)?));
    }
    let n = entries.iter().map(|&(k, _)| k).max().unwrap_or(0);
    Ok(NrHistogram::from_counts(n, entries)?)
}

pub fn read_histogram(path: &Path) -> Result<NrHistogram> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_histogram(&bytes, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_round_trips() {
        let h = NrHistogram::from_counts(6, [(1, 3), (5, 2), (6, 1)]).unwrap();
        let bytes = histogram_table(&h).to_bytes().unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with("n_r,count,frequency\n0,0,0\n1,3,0.5\n"));
        assert_eq!(parse_histogram(&bytes, Path::new("mem")).unwrap(), h);
    }

    #[test]
    fn histogram_reader_rejects_garbage() {
        assert!(parse_histogram(b"a,b\n1,2\n", Path::new("mem")).is_err());
        assert!(parse_histogram(b"n_r,count\n1,x\n", Path::new("mem")).is_err());
    }
}
