//! Post-processing of `N_R` histograms and the homogeneous-limit solver.

use alloc::vec::Vec;

use crate::ensemble::NrHistogram;
use crate::{Error, Result};

/// Ordinary least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub rms: f64,
    pub n_points: usize,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, found: n });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    Ok(LinearFit { slope, intercept, rms: libm::sqrt(sse / nf), n_points: n })
}

fn r_star_residual(r: f64) -> f64 {
    1.0 - libm::exp(-2.0 * r) - r
}

/// Nontrivial root of `r = 1 - exp(-2 r)` by bisection on `[0.1, 1]`.
///
/// The returned value satisfies `|1 - exp(-2 r) - r| < tolerance` and lies
/// within `tolerance` of the root.
pub fn solve_r_star(tolerance: f64) -> Result<f64> {
    solve_r_star_in(0.1, 1.0, tolerance)
}

/// [`solve_r_star`] with a caller-chosen bracket.
pub fn solve_r_star_in(lo: f64, hi: f64, tolerance: f64) -> Result<f64> {
    if !(tolerance > 0.0) {
        return Err(Error::Domain("tolerance must be positive"));
    }
    let (mut lo, mut hi) = (lo, hi);
    if !(r_star_residual(lo) > 0.0 && r_star_residual(hi) < 0.0) {
        return Err(Error::Domain("bracket does not isolate the nontrivial root"));
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let g = r_star_residual(mid);
        if libm::fabs(g) < tolerance && hi - lo < tolerance {
            break;
        }
        if g > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Where a bimodal `N_R` histogram separates into its two modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSplit {
    /// Realizations with `N_R < threshold` belong to the small mode; 0 when
    /// unimodal.
    pub threshold: usize,
    pub bimodal: bool,
    /// Peak positions of the small and large modes (equal when unimodal).
    pub low_peak: usize,
    pub high_peak: usize,
}

/// A secondary peak must rise above twice the valley separating it from the
/// main peak.
const VALLEY_DEPTH: f64 = 0.5;
/// Its side of the valley must carry this much probability.
const MIN_MODE_MASS: f64 = 0.005;
/// Windowed peak and valley counts must differ by this many Poisson
/// standard deviations.
const PEAK_SIGNIFICANCE: f64 = 5.0;

/// Sums of `values` over a centered window of `window` bins, truncated at the
/// edges, together with the number of bins each sum covers.
fn window_sums(values: &[f64], window: usize) -> Vec<(f64, usize)> {
    let n = values.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in values {
        prefix.push(prefix.last().unwrap() + v);
    }
    let back = window / 2;
    let fwd = window - 1 - back;
    (0..n)
        .map(|k| {
            let a = k.saturating_sub(back);
            let b = (k + fwd + 1).min(n);
            (prefix[b] - prefix[a], b - a)
        })
        .collect()
}

/// Centered moving average over `window` bins, truncated at the edges.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    window_sums(values, window).into_iter().map(|(s, len)| s / len as f64).collect()
}

/// Smoothing window for `split_modes`: `max(3, N / 1000)` bins.
pub fn split_window(network_size: usize) -> usize {
    (network_size / 1000).max(3)
}

/// Locates the valley between the two modes of `histogram`.
///
/// Frequencies are smoothed with a centered moving average over
/// [`split_window`] bins. The main peak is the global maximum of the smoothed
/// curve. A secondary peak on either side qualifies when
///
/// * the lowest smoothed value between the peaks is at most half its height,
/// * its side of that valley holds at least 0.5% of the realizations, and
/// * its windowed count exceeds the valley's by five Poisson standard
///   deviations (this keeps sparse tails from posing as modes).
///
/// The highest qualifying peak wins; the threshold is the middle of the
/// lowest stretch between the two peaks.
pub fn split_modes(histogram: &NrHistogram) -> Result<ModeSplit> {
    if histogram.n_realizations() == 0 {
        return Err(Error::InsufficientData { needed: 1, found: 0 });
    }
    let counts: Vec<f64> = histogram.counts().iter().map(|&c| c as f64).collect();
    let sums = window_sums(&counts, split_window(histogram.network_size()));
    let smooth: Vec<f64> = sums.iter().map(|&(s, len)| s / len as f64).collect();
    let main = smooth
        .iter()
        .enumerate()
        .fold(0, |best, (k, &v)| if v > smooth[best] { k } else { best });

    let mut cumulative = Vec::with_capacity(counts.len() + 1);
    cumulative.push(0.0);
    for c in &counts {
        cumulative.push(cumulative.last().unwrap() + c);
    }
    let total = *cumulative.last().unwrap();
    let min_mass = MIN_MODE_MASS * total;

    // (peak height, peak position, valley midpoint)
    let mut best: Option<(f64, usize, usize)> = None;
    let mut consider = |peak: usize, lo: usize, hi: usize, side_mass: f64| {
        let height = smooth[peak];
        let mid = (lo + hi) / 2;
        if !(height > 0.0 && smooth[mid] <= VALLEY_DEPTH * height && side_mass >= min_mass) {
            return;
        }
        let p = sums[peak].0;
        let v = sums[mid].0;
        if p - v < PEAK_SIGNIFICANCE * libm::sqrt(p + v) {
            return;
        }
        if best.map_or(true, |(h, _, _)| height > h) {
            best = Some((height, peak, mid));
        }
    };

    // left of the main peak
    let (mut vmin, mut vlo, mut vhi) = (f64::INFINITY, main, main);
    for x in (0..main.saturating_sub(1)).rev() {
        let y = x + 1;
        if smooth[y] < vmin {
            (vmin, vlo, vhi) = (smooth[y], y, y);
        } else if smooth[y] == vmin {
            vlo = y;
        }
        consider(x, vlo, vhi, cumulative[(vlo + vhi) / 2 + 1]);
    }
    // right of the main peak
    let (mut vmin, mut vlo, mut vhi) = (f64::INFINITY, main, main);
    for x in main + 2..smooth.len() {
        let y = x - 1;
        if smooth[y] < vmin {
            (vmin, vlo, vhi) = (smooth[y], y, y);
        } else if smooth[y] == vmin {
            vhi = y;
        }
        consider(x, vlo, vhi, total - cumulative[(vlo + vhi) / 2]);
    }

    Ok(match best {
        Some((_, peak, threshold)) => ModeSplit {
            threshold,
            bimodal: true,
            low_peak: peak.min(main),
            high_peak: peak.max(main),
        },
        None => ModeSplit { threshold: 0, bimodal: false, low_peak: main, high_peak: main },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitKind {
    /// `f(N_R) ~ prefactor * N_R^-exponent`.
    PowerLaw { exponent: f64, prefactor: f64 },
    Gaussian { mean: f64, stddev: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub kind: FitKind,
    /// Inclusive `N_R` range the fit was restricted to.
    pub fit_range: (usize, usize),
    /// Non-empty bins used.
    pub n_points: usize,
    /// RMS residual: in `ln f` for power laws, in `f` for Gaussians.
    pub residual: f64,
}

fn check_range(histogram: &NrHistogram, lo: usize, hi: usize) -> Result<(usize, usize)> {
    if lo > hi {
        return Err(Error::Domain("empty fit range"));
    }
    Ok((lo, hi.min(histogram.network_size())))
}

/// Least-squares line through `(ln N_R, ln f)` over the non-empty bins with
/// `N_R` in `[lo, hi]` (and `N_R >= 1`).
pub fn fit_power_law(histogram: &NrHistogram, lo: usize, hi: usize) -> Result<FitResult> {
    let (lo, hi) = check_range(histogram, lo.max(1), hi)?;
    let total = histogram.n_realizations() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = histogram
        .nonzero()
        .filter(|&(k, _)| k >= lo && k <= hi)
        .map(|(k, c)| (libm::log(k as f64), libm::log(c as f64 / total)))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, found: xs.len() });
    }
    let line = linear_fit(&xs, &ys)?;
    if !(line.slope < 0.0) {
        return Err(Error::DegenerateFit("frequency does not decay"));
    }
    Ok(FitResult {
        kind: FitKind::PowerLaw { exponent: -line.slope, prefactor: libm::exp(line.intercept) },
        fit_range: (lo, hi),
        n_points: xs.len(),
        residual: line.rms,
    })
}

/// Method-of-moments normal fit of the realizations with `N_R` in
/// `[lo, hi]`. The residual compares `f` with the normal density scaled to
/// the mass inside the range, over the bins between the smallest and largest
/// observed `N_R` in range.
pub fn fit_gaussian(histogram: &NrHistogram, lo: usize, hi: usize) -> Result<FitResult> {
    let (lo, hi) = check_range(histogram, lo, hi)?;
    let bins: Vec<(usize, u64)> = histogram.nonzero().filter(|&(k, _)| k >= lo && k <= hi).collect();
    if bins.len() < 5 {
        return Err(Error::InsufficientData { needed: 5, found: bins.len() });
    }
    let count: u64 = bins.iter().map(|&(_, c)| c).sum();
    let n = count as f64;
    let mean = bins.iter().map(|&(k, c)| k as f64 * c as f64).sum::<f64>() / n;
    let var = bins
        .iter()
        .map(|&(k, c)| {
            let d = k as f64 - mean;
            d * d * c as f64
        })
        .sum::<f64>()
        / n;
    let stddev = libm::sqrt(var);
    if !(stddev > 0.0) {
        return Err(Error::DegenerateFit("zero spread"));
    }
    let weight = n / histogram.n_realizations() as f64;
    let norm = weight / (stddev * libm::sqrt(2.0 * core::f64::consts::PI));
    let (first, last) = (bins[0].0, bins[bins.len() - 1].0);
    let mut sse = 0.0;
    for k in first..=last {
        let z = (k as f64 - mean) / stddev;
        let e = histogram.frequency(k) - norm * libm::exp(-0.5 * z * z);
        sse += e * e;
    }
    Ok(FitResult {
        kind: FitKind::Gaussian { mean, stddev },
        fit_range: (lo, hi),
        n_points: bins.len(),
        residual: libm::sqrt(sse / (last - first + 1) as f64),
    })
}
