//! Flat `key = value` configuration files.
//!
//! ```text
//! # propagation run, constant branching
//! mode = propagation
//! n_total = 10000
//! m = 8
//! seed = 42
//! ```
//!
//! `mode` selects the defaults for `first_layer_cap` and `cross_layer_rule`;
//! any other key then overrides them. Blank lines and `#` comments are
//! ignored.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use hiernet_core::{Branching, CrossLayerRule, HierarchyConfig, Mode};

use crate::error::{Error, Result};

pub const KEYS: [&str; 11] = [
    "n_total",
    "m",
    "c1",
    "alpha",
    "mode",
    "branching",
    "mu",
    "sigma",
    "first_layer_cap",
    "cross_layer_rule",
    "seed",
];

/// Splits `text` into `(key, value)` pairs, rejecting unknown keys.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::config(line, format!("line {}: expected key = value", idx + 1)));
        };
        pairs.push((k.trim().to_owned(), v.trim().to_owned()));
    }
    Ok(pairs)
}

/// Parses a single `key=value` override.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    match s.split_once('=') {
        Some((k, v)) => Ok((k.trim().to_owned(), v.trim().to_owned())),
        None => Err(Error::config(s, "expected key=value")),
    }
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

/// Builds a validated config from `pairs`, starting from `base`.
pub fn apply_pairs(base: &HierarchyConfig, pairs: &[(String, String)]) -> Result<HierarchyConfig> {
    for (k, _) in pairs {
        if !KEYS.contains(&k.as_str()) {
            return Err(Error::config(k.as_str(), "unknown key"));
        }
    }
    let lookup = |key: &str| pairs.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str());

    let mut cfg = base.clone();
    if let Some(v) = lookup("mode") {
        let mode = Mode::from_str(v).map_err(|_| Error::config("mode", format!("unknown mode `{v}`")))?;
        cfg = cfg.with_mode(mode);
    }
    if let Some(v) = lookup("n_total") {
        cfg.n_total = number("n_total", v)?;
    }
    if let Some(v) = lookup("m") {
        cfg.m = number("m", v)?;
    }
    if let Some(v) = lookup("c1") {
        cfg.c1 = number("c1", v)?;
    }
    if let Some(v) = lookup("alpha") {
        cfg.alpha = number("alpha", v)?;
    }
    if let Some(v) = lookup("first_layer_cap") {
        cfg.first_layer_cap = number("first_layer_cap", v)?;
    }
    if let Some(v) = lookup("cross_layer_rule") {
        cfg.cross_layer_rule = CrossLayerRule::from_str(v)
            .map_err(|_| Error::config("cross_layer_rule", format!("unknown rule `{v}`")))?;
    }
    if let Some(v) = lookup("seed") {
        cfg.seed = number("seed", v)?;
    }

    let (old_mu, old_sigma) = match cfg.branching {
        Branching::GaussianRounded { mu, sigma } => (Some(mu), Some(sigma)),
        Branching::Constant => (None, None),
    };
    let mu = lookup("mu").map(|v| number::<f64>("mu", v)).transpose()?.or(old_mu);
    let sigma = lookup("sigma").map(|v| number::<f64>("sigma", v)).transpose()?.or(old_sigma);
    let gaussian = match lookup("branching") {
        Some("constant") => false,
        Some("gaussian") => true,
        Some(v) => return Err(Error::config("branching", format!("expected constant or gaussian, got `{v}`"))),
        None => matches!(cfg.branching, Branching::GaussianRounded { .. }),
    };
    if gaussian {
        let mu = mu.ok_or_else(|| Error::config("mu", "required with branching = gaussian"))?;
        let sigma = sigma.ok_or_else(|| Error::config("sigma", "required with branching = gaussian"))?;
        cfg.branching = Branching::GaussianRounded { mu, sigma };
        if lookup("m").is_none() && mu.is_finite() {
            cfg.m = mu.round().max(1.0) as u32;
        }
    } else {
        if lookup("mu").is_some() || lookup("sigma").is_some() {
            let key = if lookup("mu").is_some() { "mu" } else { "sigma" };
            return Err(Error::config(key, "only meaningful with branching = gaussian"));
        }
        cfg.branching = Branching::Constant;
    }

    cfg.validate()?;
    Ok(cfg)
}

/// Parses a whole config document. Defaults: statistical mode with
/// `N = 1000`.
pub fn parse_config(text: &str) -> Result<HierarchyConfig> {
    apply_pairs(&HierarchyConfig::statistical(1000), &parse_pairs(text)?)
}

pub fn read_config(path: &Path) -> Result<HierarchyConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

/// All keys of `cfg`, in [`KEYS`] order; `mu` and `sigma` only with Gaussian
/// branching.
pub fn config_pairs(cfg: &HierarchyConfig) -> Vec<(&'static str, String)> {
    let mut out = vec![
        ("n_total", cfg.n_total.to_string()),
        ("m", cfg.m.to_string()),
        ("c1", cfg.c1.to_string()),
        ("alpha", cfg.alpha.to_string()),
        ("mode", cfg.mode.to_string()),
    ];
    match cfg.branching {
        Branching::Constant => out.push(("branching", "constant".into())),
        Branching::GaussianRounded { mu, sigma } => {
            out.push(("branching", "gaussian".into()));
            out.push(("mu", mu.to_string()));
            out.push(("sigma", sigma.to_string()));
        }
    }
    out.push(("first_layer_cap", cfg.first_layer_cap.to_string()));
    out.push(("cross_layer_rule", cfg.cross_layer_rule.to_string()));
    out.push(("seed", cfg.seed.to_string()));
    out
}

pub fn format_config(cfg: &HierarchyConfig) -> String {
    config_pairs(cfg).into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_sets_defaults() {
        let cfg = parse_config("mode = propagation\nn_total = 500\nm = 8").unwrap();
        assert_eq!(cfg, HierarchyConfig::propagation(500, 8));
        let cfg = parse_config("# nothing\n\nn_total=200 # trailing").unwrap();
        assert_eq!(cfg, HierarchyConfig::statistical(200));
    }

    #[test]
    fn explicit_keys_override_mode_defaults() {
        let cfg = parse_config("first_layer_cap = 0.5\nmode = propagation\ncross_layer_rule = all_upper").unwrap();
        assert_eq!(cfg.first_layer_cap, 0.5);
        assert_eq!(cfg.cross_layer_rule, CrossLayerRule::AllUpper);
    }

    #[test]
    fn gaussian_branching() {
        let cfg = parse_config("mode=propagation\nn_total=20000\nbranching=gaussian\nmu=8\nsigma=2").unwrap();
        assert_eq!(cfg, HierarchyConfig::propagation_gaussian(20000, 8.0, 2.0));
        let err = parse_config("branching=gaussian\nmu=8").unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "sigma"));
    }

    #[test]
    fn errors_name_the_key() {
        for (text, key) in [
            ("colour = blue", "colour"),
            ("m = many", "m"),
            ("c1 = 1.5", "c1"),
            ("n_total = 1", "n_total"),
            ("mode = quantum", "mode"),
            ("alpha = -1", "alpha"),
            ("mu = 3", "mu"),
        ] {
            match parse_config(text) {
                Err(Error::Config { key: k, .. }) => assert_eq!(k, key, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn format_round_trips() {
        let cfg = HierarchyConfig::propagation_gaussian(777, 6.5, 1.25).with_seed(99);
        assert_eq!(parse_config(&format_config(&cfg)).unwrap(), cfg);
    }
}
