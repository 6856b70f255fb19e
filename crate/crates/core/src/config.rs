//! Generator parameters.

use core::fmt;

use thiserror::Error;

/// Which construction procedure to follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Random layer sizes; used for the small-world statistics.
    Statistical,
    /// Every non-bottom node gets its full complement of sons; used for the
    /// spreading experiments.
    Propagation,
}

/// How many sons a father may take.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Branching {
    /// Every father takes (at most, or exactly in propagation mode) `m` sons.
    Constant,
    /// Each father's son count is drawn from a normal distribution, rounded to
    /// the nearest integer and clamped to at least one.
    GaussianRounded { mu: f64, sigma: f64 },
}

/// Which upper-layer nodes a node is offered cross-layer shortcuts to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossLayerRule {
    /// Every node of every upper layer, weighted by height and social distance.
    AllUpper,
    /// Only the node's own skeleton ancestors, weighted by height alone.
    AncestorsOnly,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("n_total must be at least 2 (got {0})")]
    TooFewNodes(usize),
    #[error("m must be at least 1")]
    ZeroBranching,
    #[error("c1 must lie in [0, 1] (got {0})")]
    C1OutOfRange(f64),
    #[error("alpha must be finite and non-negative (got {0})")]
    NegativeAlpha(f64),
    #[error("first_layer_cap must lie in (0, 1] (got {0})")]
    FirstLayerCap(f64),
    #[error("gaussian branching needs finite mu > 0 and sigma >= 0 (got mu={mu}, sigma={sigma})")]
    GaussianParameters { mu: f64, sigma: f64 },
}

impl ConfigError {
    /// The configuration key responsible for the error.
    pub fn key(&self) -> &'static str {
        match self {
            ConfigError::TooFewNodes(_) => "n_total",
            ConfigError::ZeroBranching => "m",
            ConfigError::C1OutOfRange(_) => "c1",
            ConfigError::NegativeAlpha(_) => "alpha",
            ConfigError::FirstLayerCap(_) => "first_layer_cap",
            ConfigError::GaussianParameters { mu, .. } => {
                if mu.is_finite() && *mu > 0.0 {
                    "sigma"
                } else {
                    "mu"
                }
            }
        }
    }
}

/// All parameters of the hierarchical generator.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyConfig {
    /// Number of nodes `N`.
    pub n_total: usize,
    /// Sons per father (an upper bound in statistical mode).
    pub m: u32,
    /// Normalizing constant of the same-layer kernel.
    pub c1: f64,
    /// Homophily decay rate.
    pub alpha: f64,
    pub mode: Mode,
    pub branching: Branching,
    /// Largest first-layer size as a fraction of `N`.
    pub first_layer_cap: f64,
    pub cross_layer_rule: CrossLayerRule,
    pub seed: u64,
}

impl HierarchyConfig {
    pub const DEFAULT_C1: f64 = 0.2;
    pub const DEFAULT_ALPHA: f64 = 0.5;
    pub const DEFAULT_M: u32 = 6;
    pub const STATISTICAL_FIRST_LAYER_CAP: f64 = 1.0 / 100.0;
    pub const PROPAGATION_FIRST_LAYER_CAP: f64 = 1.0 / 1000.0;

    /// Statistical-mode parameters used for the small-world table
    /// (`c1 = 0.2`, `alpha = 0.5`, `m = 6`).
    pub fn statistical(n_total: usize) -> Self {
        HierarchyConfig {
            n_total,
            m: Self::DEFAULT_M,
            c1: Self::DEFAULT_C1,
            alpha: Self::DEFAULT_ALPHA,
            mode: Mode::Statistical,
            branching: Branching::Constant,
            first_layer_cap: Self::STATISTICAL_FIRST_LAYER_CAP,
            cross_layer_rule: CrossLayerRule::AllUpper,
            seed: 0,
        }
    }

    /// Propagation-mode parameters with constant branching `m`.
    pub fn propagation(n_total: usize, m: u32) -> Self {
        HierarchyConfig {
            n_total,
            m,
            mode: Mode::Propagation,
            first_layer_cap: Self::PROPAGATION_FIRST_LAYER_CAP,
            cross_layer_rule: CrossLayerRule::AncestorsOnly,
            ..Self::statistical(n_total)
        }
    }

    /// Propagation-mode parameters with Gaussian branching.
    pub fn propagation_gaussian(n_total: usize, mu: f64, sigma: f64) -> Self {
        let m = libm::round(mu).max(1.0) as u32;
        HierarchyConfig {
            branching: Branching::GaussianRounded { mu, sigma },
            ..Self::propagation(n_total, m)
        }
    }

    /// Switches mode and resets the mode-dependent defaults
    /// (`first_layer_cap`, `cross_layer_rule`).
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        match mode {
            Mode::Statistical => {
                self.first_layer_cap = Self::STATISTICAL_FIRST_LAYER_CAP;
                self.cross_layer_rule = CrossLayerRule::AllUpper;
            }
            Mode::Propagation => {
                self.first_layer_cap = Self::PROPAGATION_FIRST_LAYER_CAP;
                self.cross_layer_rule = CrossLayerRule::AncestorsOnly;
            }
        }
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_total < 2 {
            return Err(ConfigError::TooFewNodes(self.n_total));
        }
        if self.m == 0 {
            return Err(ConfigError::ZeroBranching);
        }
        if !(self.c1 >= 0.0 && self.c1 <= 1.0) {
            return Err(ConfigError::C1OutOfRange(self.c1));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(ConfigError::NegativeAlpha(self.alpha));
        }
        if !(self.first_layer_cap > 0.0 && self.first_layer_cap <= 1.0) {
            return Err(ConfigError::FirstLayerCap(self.first_layer_cap));
        }
        if let Branching::GaussianRounded { mu, sigma } = self.branching {
            if !(mu.is_finite() && mu > 0.0 && sigma.is_finite() && sigma >= 0.0) {
                return Err(ConfigError::GaussianParameters { mu, sigma });
            }
        }
        Ok(())
    }

    /// Largest admissible first-layer size, never below one.
    pub fn first_layer_max(&self) -> usize {
        let cap = libm::floor(self.first_layer_cap * self.n_total as f64) as usize;
        cap.clamp(1, self.n_total)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Statistical => "statistical",
            Mode::Propagation => "propagation",
        })
    }
}

impl fmt::Display for CrossLayerRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrossLayerRule::AllUpper => "all_upper",
            CrossLayerRule::AncestorsOnly => "ancestors_only",
        })
    }
}

impl core::str::FromStr for Mode {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "statistical" => Ok(Mode::Statistical),
            "propagation" => Ok(Mode::Propagation),
            _ => Err(()),
        }
    }
}

impl core::str::FromStr for CrossLayerRule {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "all_upper" => Ok(CrossLayerRule::AllUpper),
            "ancestors_only" => Ok(CrossLayerRule::AncestorsOnly),
            _ => Err(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        assert!(HierarchyConfig::statistical(1000).validate().is_ok());
        let p = HierarchyConfig::propagation(10_000, 8);
        assert!(p.validate().is_ok());
        assert_eq!(p.cross_layer_rule, CrossLayerRule::AncestorsOnly);
        assert_eq!(p.first_layer_max(), 10);
    }

    #[test]
    fn rejects_bad_parameters() {
        let base = HierarchyConfig::statistical(1000);
        let cases = [
            (HierarchyConfig { n_total: 1, ..base.clone() }, "n_total"),
            (HierarchyConfig { m: 0, ..base.clone() }, "m"),
            (HierarchyConfig { c1: -0.1, ..base.clone() }, "c1"),
            (HierarchyConfig { c1: 1.5, ..base.clone() }, "c1"),
            (HierarchyConfig { alpha: -0.1, ..base.clone() }, "alpha"),
            (HierarchyConfig { first_layer_cap: 0.0, ..base.clone() }, "first_layer_cap"),
            (
                HierarchyConfig {
                    branching: Branching::GaussianRounded { mu: 8.0, sigma: -1.0 },
                    ..base.clone()
                },
                "sigma",
            ),
        ];
        for (cfg, key) in cases {
            assert_eq!(cfg.validate().unwrap_err().key(), key);
        }
    }

    #[test]
    fn tiny_networks_still_get_one_root() {
        assert_eq!(HierarchyConfig::statistical(2).first_layer_max(), 1);
    }
}
