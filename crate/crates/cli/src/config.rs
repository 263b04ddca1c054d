//! JSON experiment configuration; command-line flags override file values.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Every field is optional; unset values fall back to per-family defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// koch | vicsek | cantor | interval
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Ambient dimension.
    #[arg(long = "d")]
    #[serde(alias = "d")]
    pub dim: Option<usize>,
    /// Realization depth (default: smallest depth within h/10 of the limit set).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Cells along the longest grid axis.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Padding around the geometry's bounding box.
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Boundary points of the interval family.
    #[arg(long, value_delimiter = ',')]
    pub boundary: Option<Vec<f64>>,
    /// Harmonic instead of arithmetic edge weights.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub harmonic: Option<bool>,

    /// Collar width of the relaxed capacity problem (default 8h).
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub cg_tol: Option<f64>,

    /// Center of the local region for hardy / collar.
    #[arg(long, value_delimiter = ',')]
    pub center: Option<Vec<f64>>,
    /// Radius of the local region for hardy / collar.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Tolerance of the inverse-power iteration.
    #[arg(long)]
    pub tol: Option<f64>,

    /// Starting point of the walk.
    #[arg(long, value_delimiter = ',')]
    pub start: Option<Vec<f64>>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub absorb_eps: Option<f64>,

    /// Sweep range `start:stop:count` for λ.
    #[arg(long)]
    pub lambdas: Option<String>,
    /// Sweep range `start:stop:count` for δ.
    #[arg(long)]
    pub deltas: Option<String>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),* $(,)?) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )*
    };
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    /// `self` with every value set in `flags` replaced.
    pub fn merged(mut self, flags: &Config) -> Self {
        overlay!(self, flags;
            family, lambda, dim, depth, resolution, margin, delta, seed, boundary, harmonic,
            eps, cg_tol, center, radius, tau, tol, start, horizon, trials, absorb_eps, lambdas, deltas);
        self
    }
}

/// Shared flags of every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON config file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Append records to this JSON Lines file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the CG residual trace of the solve to this CSV file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub values: Config,
}

impl Common {
    pub fn resolve(&self) -> CliResult<Config> {
        let base = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        Ok(base.merged(&self.values))
    }
}

/// Parses `start:stop:count` into `count` evenly spaced values, ends included.
pub fn parse_range(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::config(format!("range {spec:?} is not start:stop:count"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_include_both_ends() {
        let v = parse_range("0:2.5:11").unwrap();
        assert_eq!(v.len(), 11);
        assert_eq!(v[0], 0.0);
        assert!((v[10] - 2.5).abs() < 1e-15);
        assert!((v[4] - 1.0).abs() < 1e-15);
        assert_eq!(parse_range("0.3:0.3:1").unwrap(), vec![0.3]);
        for bad in ["1:2", "a:1:3", "0:1:0", "0:1:-2"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn flags_override_file_values() {
        let file: Config = serde_json::from_str(r#"{"family": "koch", "lambda": 0.25, "resolution": 64}"#).unwrap();
        let flags = Config {
            lambda: Some(0.3),
            ..Default::default()
        };
        let merged = file.merged(&flags);
        assert_eq!(merged.family.as_deref(), Some("koch"));
        assert_eq!(merged.lambda, Some(0.3));
        assert_eq!(merged.resolution, Some(64));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<Config>(r#"{"lamda": 0.3}"#).is_err());
    }
}
