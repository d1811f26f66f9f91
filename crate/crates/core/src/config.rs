//! Run configuration shared by the command-line tools and the verification
//! suite: the problem family plus every search/scan/output knob, serialized
//! into each JSON artifact so a result is reproducible from the artifact
//! alone.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{CutoffPolicy, Problem, Tolerances, DEFAULT_SERIES_ORDER};
use crate::wronskian::ScanGrid;
use crate::zerofinder::SearchRegion;

/// Everything one run needs. Unknown keys in a config file are rejected, and
/// the problem invariants are enforced on load, so a config that parses is a
/// config that runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub m: u32,
    /// Coefficient of the commutator variant term; 0 is the plain family.
    pub alpha: f64,
    pub tolerances: Tolerances,
    /// Riccati series truncation order.
    pub series_order: usize,
    pub cutoff: CutoffPolicy,
    /// ζ-region searched for Wronskian zeros.
    pub zero_region: SearchRegion,
    /// Cap on the number of zeros reported by a search.
    pub max_zeros: usize,
    /// Heatmap rectangle and resolution.
    pub scan: ScanGrid,
    /// Highest derivative order k in the D_k growth certificate.
    pub k_max: usize,
    /// Number of random abscissae in sampling checks (ODE residual probes).
    pub samples: usize,
    /// Seed for every randomized check; fixed so runs are reproducible.
    pub seed: u64,
    /// Directory artifacts are written to.
    pub out_dir: PathBuf,
    /// Wronskian cache directory; `None` disables caching. The
    /// `WZETA_CACHE_DIR` environment variable overrides this at the CLI.
    pub cache_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            m: 3,
            alpha: 0.0,
            tolerances: Tolerances::default(),
            series_order: DEFAULT_SERIES_ORDER,
            cutoff: CutoffPolicy::default(),
            zero_region: SearchRegion {
                re_lo: -6.0,
                re_hi: 6.0,
                im_lo: 0.05,
                im_hi: 8.0,
            },
            max_zeros: 8,
            scan: ScanGrid {
                re_lo: -4.0,
                re_hi: 4.0,
                im_lo: -4.0,
                im_hi: 4.0,
                n_re: 41,
                n_im: 41,
            },
            k_max: 30,
            samples: 20,
            seed: 7,
            out_dir: PathBuf::from("out"),
            cache_dir: None,
        }
    }
}

impl RunConfig {
    /// Default configuration for degree `m`.
    pub fn for_m(m: u32) -> RunConfig {
        RunConfig {
            m,
            ..RunConfig::default()
        }
    }

    /// The problem this configuration describes, with all invariants checked.
    pub fn problem(&self) -> Result<Problem> {
        Problem::with(
            self.m,
            self.alpha,
            self.tolerances,
            self.series_order,
            self.cutoff,
        )
    }

    /// Validate every field that has an invariant.
    pub fn validate(&self) -> Result<()> {
        self.problem()?;
        SearchRegion::new(
            self.zero_region.re_lo,
            self.zero_region.re_hi,
            self.zero_region.im_lo,
            self.zero_region.im_hi,
        )?;
        if self.scan.n_re < 2 || self.scan.n_im < 2 {
            return Err(Error::Config(format!(
                "scan resolution must be at least 2x2, got {}x{}",
                self.scan.n_re, self.scan.n_im
            )));
        }
        if !(self.scan.re_lo < self.scan.re_hi && self.scan.im_lo < self.scan.im_hi) {
            return Err(Error::Config(format!(
                "degenerate scan box [{},{}]x[{},{}]",
                self.scan.re_lo, self.scan.re_hi, self.scan.im_lo, self.scan.im_hi
            )));
        }
        if self.k_max == 0 {
            return Err(Error::Config("k_max must be at least 1".into()));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        Ok(())
    }

    /// Load and validate a JSON config file.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("parsing {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        for m in [2, 3, 4, 7] {
            RunConfig::for_m(m).validate().unwrap();
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<RunConfig>(r#"{"m": 3, "spurious": 1}"#).unwrap_err();
        assert!(err.to_string().contains("spurious"), "{err}");
    }

    #[test]
    fn partial_configs_fill_in_defaults() {
        let config: RunConfig = serde_json::from_str(r#"{"m": 4, "k_max": 12}"#).unwrap();
        assert_eq!(config.m, 4);
        assert_eq!(config.k_max, 12);
        assert_eq!(config.series_order, DEFAULT_SERIES_ORDER);
        config.validate().unwrap();
    }

    #[test]
    fn problem_invariants_enforced() {
        let config: RunConfig = serde_json::from_str(r#"{"m": 1}"#).unwrap();
        assert!(config.validate().is_err());

        let config: RunConfig =
            serde_json::from_str(r#"{"tolerances": {"ode_rel_tol": -1e-11, "match_tol": 1e-8, "zero_tol": 1e-9, "quad_tol": 1e-10}}"#)
                .unwrap();
        assert!(config.validate().is_err());
    }

    #[test]
    fn zero_area_scan_is_rejected() {
        let mut config = RunConfig::default();
        config.scan.re_hi = config.scan.re_lo;
        assert!(config.validate().is_err());
    }

    #[test]
    fn roundtrips_through_json() {
        let config = RunConfig::for_m(4);
        let text = serde_json::to_string_pretty(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), serde_json::to_string(&config).unwrap());
    }
}
