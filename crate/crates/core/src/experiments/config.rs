//! Sweep configuration: plain `key = value` lines, lists comma-separated.
//!
//! ```text
//! # linf sweep
//! family = linf_blowup
//! beta = 0.6, 0.75, 0.9
//! eps = 1e-1, 1e-2, 1e-3, 1e-4
//! n = 64, 128
//! output = linf.csv
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::counterexamples::{CounterexampleSpec, Family};
use crate::error::{Error, Result};
use crate::poisson::{CompatibilityPolicy, SolveOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub family: Family,
    pub betas: Vec<f64>,
    pub epss: Vec<f64>,
    /// Ascending. A row at resolution `n` uses an `n x 2n` disk grid and a
    /// `2n x n` half-plane grid.
    pub resolutions: Vec<usize>,
    pub output: Option<PathBuf>,
    pub solve: SolveOptions,
}

impl SweepConfig {
    pub fn new(family: Family, betas: Vec<f64>, epss: Vec<f64>, resolutions: Vec<usize>) -> Result<Self> {
        let cfg = Self {
            family,
            betas,
            epss,
            resolutions,
            output: None,
            solve: SolveOptions::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, len) in [
            ("beta", self.betas.len()),
            ("eps", self.epss.len()),
            ("n", self.resolutions.len()),
        ] {
            if len == 0 {
                return Err(Error::Config(format!("{name} list is empty")));
            }
        }
        if self.resolutions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "resolutions must be strictly ascending, got {:?}",
                self.resolutions
            )));
        }
        if let Some(&n) = self.resolutions.iter().find(|&&n| n < 8) {
            return Err(Error::Config(format!("resolution {n} is below the minimum 8")));
        }
        for &beta in &self.betas {
            for &eps in &self.epss {
                CounterexampleSpec::new(self.family, beta, eps).map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        if !(self.solve.tolerance > 0.0) {
            return Err(Error::Config(format!(
                "tolerance must be positive, got {}",
                self.solve.tolerance
            )));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        text.parse()
    }
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Config(format!("{key}: cannot parse {s:?}")))
        })
        .collect()
}

impl FromStr for SweepConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut family = None;
        let mut betas = None;
        let mut epss = None;
        let mut resolutions = None;
        let mut output = None;
        let mut solve = SolveOptions::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "family" => family = Some(value.parse::<Family>().map_err(|e| Error::Config(e.to_string()))?),
                "beta" => betas = Some(parse_list(key, value)?),
                "eps" => epss = Some(parse_list(key, value)?),
                "n" => resolutions = Some(parse_list(key, value)?),
                "output" if !value.is_empty() => output = Some(PathBuf::from(value)),
                "tolerance" => solve.tolerance = parse_list::<f64>(key, value)?.first().copied().unwrap_or(f64::NAN),
                "policy" => {
                    solve.policy = match value {
                        "project" => CompatibilityPolicy::Project,
                        "error" => CompatibilityPolicy::Error,
                        _ => return Err(Error::Config(format!("policy must be project or error, got {value:?}"))),
                    }
                }
                "max_mode" => {
                    solve.max_mode = Some(
                        value
                            .parse()
                            .map_err(|_| Error::Config(format!("max_mode: cannot parse {value:?}")))?,
                    )
                }
                _ => return Err(Error::Config(format!("line {}: unknown key {key:?}", lineno + 1))),
            }
        }
        let missing = |k: &str| Error::Config(format!("missing key {k:?}"));
        let cfg = SweepConfig {
            family: family.ok_or_else(|| missing("family"))?,
            betas: betas.ok_or_else(|| missing("beta"))?,
            epss: epss.ok_or_else(|| missing("eps"))?,
            resolutions: resolutions.ok_or_else(|| missing("n"))?,
            output,
            solve,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "# comment\nfamily = dirichlet_control\nbeta = 0.75\neps = 1e-1, 1e-2 ,1e-3\nn = 16, 32\noutput = out.csv\npolicy = error\ntolerance = 1e-5\n";

    #[test]
    fn parses_lists_and_options() {
        let cfg: SweepConfig = GOOD.parse().unwrap();
        assert_eq!(cfg.family, Family::DirichletControl);
        assert_eq!(cfg.epss, vec![1e-1, 1e-2, 1e-3]);
        assert_eq!(cfg.resolutions, vec![16, 32]);
        assert_eq!(cfg.output.as_deref(), Some(Path::new("out.csv")));
        assert_eq!(cfg.solve.policy, CompatibilityPolicy::Error);
        assert_eq!(cfg.solve.tolerance, 1e-5);
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            GOOD.replace("eps = 1e-1, 1e-2 ,1e-3", "eps ="),
            GOOD.replace("n = 16, 32", "n = 32, 16"),
            GOOD.replace("family = dirichlet_control", "family = nope"),
            GOOD.replace("beta = 0.75", "beta = 0.25"),
            GOOD.replace("beta = 0.75", ""),
            GOOD.replace("policy = error", "policy = maybe"),
            GOOD.replace("output = out.csv", "outptu = out.csv"),
            GOOD.replace("eps = 1e-1", "eps = 0.5"),
            format!("{GOOD}garbage line\n"),
        ] {
            assert!(matches!(bad.parse::<SweepConfig>(), Err(Error::Config(_))), "{bad}");
        }
        assert!(SweepConfig::new(Family::LinfBlowup, vec![0.75], vec![], vec![16]).is_err());
    }
}
