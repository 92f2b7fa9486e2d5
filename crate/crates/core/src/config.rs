//! Flat `key = value` sweep configuration.
//!
//! ```text
//! # uniform 3-SAT around the transition
//! dist = uniform
//! vars = 100
//! gamma_start = 3
//! gamma_stop = 6
//! gamma_step = 0.1
//! samples = 100
//! seed = 42
//! ```
//!
//! Keys: `dist` (`uniform`, `rich`, `nbhd`), `vars`, `k`, `copies`, `bucket`,
//! `p`, `gamma_start`, `gamma_stop`, `gamma_step`, `samples`, `seed`,
//! `timeout_ms`, `max_backtracks`, `metrics` (`true`/`false`), `timing`
//! (`wall`/`off`) and `workers`. Blank lines and `#` comments are ignored.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::gen::{
    Gamma, GeneratorSpec, NeighborhoodSpec, RichSpec, UniformSpec, DEFAULT_BUCKET_SIZE,
};
use crate::rng::Seed;
use crate::solver::SolverLimits;
use crate::sweep::{SweepError, SweepSpec, Timing};

pub const DEFAULT_K: u32 = 3;
pub const DEFAULT_SAMPLES: u32 = 100;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given twice")]
    Duplicate(String),
    #[error("invalid value `{value}` for `{key}`")]
    Value { key: String, value: String },
    #[error("missing required `{0}`")]
    Missing(&'static str),
    #[error("`{key}` does not apply to the {dist} distribution")]
    NotApplicable {
        key: &'static str,
        dist: Distribution,
    },
    #[error(transparent)]
    Sweep(#[from] SweepError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    Uniform,
    Rich,
    Neighborhood,
}

impl FromStr for Distribution {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "uniform" => Ok(Distribution::Uniform),
            "rich" => Ok(Distribution::Rich),
            "nbhd" => Ok(Distribution::Neighborhood),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distribution::Uniform => "uniform",
            Distribution::Rich => "rich",
            Distribution::Neighborhood => "nbhd",
        })
    }
}

/// Generator settings as given by the user, before defaults and checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GeneratorParams {
    pub dist: Option<Distribution>,
    pub vars: Option<u32>,
    pub k: Option<u32>,
    pub gamma: Option<Gamma>,
    pub copies: Option<u32>,
    pub bucket: Option<u32>,
    pub p: Option<f64>,
}

impl GeneratorParams {
    /// Fields set in `other` replace those in `self`.
    pub fn merge(self, other: GeneratorParams) -> GeneratorParams {
        GeneratorParams {
            dist: other.dist.or(self.dist),
            vars: other.vars.or(self.vars),
            k: other.k.or(self.k),
            gamma: other.gamma.or(self.gamma),
            copies: other.copies.or(self.copies),
            bucket: other.bucket.or(self.bucket),
            p: other.p.or(self.p),
        }
    }

    /// `copies` is rich-only, `bucket` and `p` are nbhd-only, and nbhd needs `p`.
    pub fn build(&self) -> Result<GeneratorSpec, ConfigError> {
        let dist = self.dist.ok_or(ConfigError::Missing("dist"))?;
        let vars = self.vars.ok_or(ConfigError::Missing("vars"))?;
        let gamma = self.gamma.ok_or(ConfigError::Missing("gamma"))?;
        let k = self.k.unwrap_or(DEFAULT_K);
        let reject = |key: &'static str, given: bool| {
            if given {
                Err(ConfigError::NotApplicable { key, dist })
            } else {
                Ok(())
            }
        };
        if dist != Distribution::Rich {
            reject("copies", self.copies.is_some())?;
        }
        if dist != Distribution::Neighborhood {
            reject("bucket", self.bucket.is_some())?;
            reject("p", self.p.is_some())?;
        }
        let spec = match dist {
            Distribution::Uniform => GeneratorSpec::Uniform(UniformSpec { vars, k, gamma }),
            Distribution::Rich => GeneratorSpec::Rich(RichSpec {
                vars,
                k,
                gamma,
                copies: self.copies.unwrap_or(1),
            }),
            Distribution::Neighborhood => GeneratorSpec::Neighborhood(NeighborhoodSpec {
                vars,
                k,
                gamma,
                bucket_size: self.bucket.unwrap_or(DEFAULT_BUCKET_SIZE),
                p: self.p.ok_or(ConfigError::Missing("p"))?,
            }),
        };
        spec.validate().map_err(SweepError::from)?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepConfig {
    pub generator: GeneratorParams,
    pub gamma_start: Option<Gamma>,
    pub gamma_stop: Option<Gamma>,
    pub gamma_step: Option<Gamma>,
    pub samples: Option<u32>,
    pub seed: Option<u64>,
    pub timeout_ms: Option<u64>,
    pub max_backtracks: Option<u64>,
    pub metrics: Option<bool>,
    pub timing: Option<Timing>,
    pub workers: Option<usize>,
}

fn value<T: FromStr>(key: &str, raw: &str) -> Result<T, ConfigError> {
    raw.parse().map_err(|_| ConfigError::Value {
        key: key.to_string(),
        value: raw.to_string(),
    })
}

/// Stores `parsed` in `slot`, refusing a second assignment.
fn put<T>(slot: &mut Option<T>, key: &str, parsed: T) -> Result<(), ConfigError> {
    if slot.is_some() {
        return Err(ConfigError::Duplicate(key.to_string()));
    }
    *slot = Some(parsed);
    Ok(())
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = SweepConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, raw) = line
                .split_once('=')
                .ok_or(ConfigError::Syntax { line: i + 1 })?;
            config.set(key.trim(), raw.trim())?;
        }
        Ok(config)
    }

    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), ConfigError> {
        let g = &mut self.generator;
        match key {
            "dist" => put(&mut g.dist, key, value(key, raw)?),
            "vars" => put(&mut g.vars, key, value(key, raw)?),
            "k" => put(&mut g.k, key, value(key, raw)?),
            "copies" => put(&mut g.copies, key, value(key, raw)?),
            "bucket" => put(&mut g.bucket, key, value(key, raw)?),
            "p" => put(&mut g.p, key, value(key, raw)?),
            "gamma_start" => put(&mut self.gamma_start, key, value(key, raw)?),
            "gamma_stop" => put(&mut self.gamma_stop, key, value(key, raw)?),
            "gamma_step" => put(&mut self.gamma_step, key, value(key, raw)?),
            "samples" => put(&mut self.samples, key, value(key, raw)?),
            "seed" => put(&mut self.seed, key, value(key, raw)?),
            "timeout_ms" => put(&mut self.timeout_ms, key, value(key, raw)?),
            "max_backtracks" => put(&mut self.max_backtracks, key, value(key, raw)?),
            "metrics" => put(&mut self.metrics, key, value(key, raw)?),
            "workers" => put(&mut self.workers, key, value(key, raw)?),
            "timing" => {
                let timing = match raw {
                    "wall" => Timing::Wall,
                    "off" => Timing::Off,
                    _ => {
                        return Err(ConfigError::Value {
                            key: key.to_string(),
                            value: raw.to_string(),
                        })
                    }
                };
                put(&mut self.timing, key, timing)
            }
            _ => Err(ConfigError::UnknownKey(key.to_string())),
        }
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merge(self, other: SweepConfig) -> SweepConfig {
        SweepConfig {
            generator: self.generator.merge(other.generator),
            gamma_start: other.gamma_start.or(self.gamma_start),
            gamma_stop: other.gamma_stop.or(self.gamma_stop),
            gamma_step: other.gamma_step.or(self.gamma_step),
            samples: other.samples.or(self.samples),
            seed: other.seed.or(self.seed),
            timeout_ms: other.timeout_ms.or(self.timeout_ms),
            max_backtracks: other.max_backtracks.or(self.max_backtracks),
            metrics: other.metrics.or(self.metrics),
            timing: other.timing.or(self.timing),
            workers: other.workers.or(self.workers),
        }
    }

    pub fn build(&self) -> Result<SweepSpec, ConfigError> {
        let gamma_start = self
            .gamma_start
            .ok_or(ConfigError::Missing("gamma_start"))?;
        let generator = GeneratorParams {
            gamma: Some(gamma_start),
            ..self.generator.clone()
        };
        let spec = SweepSpec {
            generator: generator.build()?,
            gamma_start,
            gamma_stop: self.gamma_stop.ok_or(ConfigError::Missing("gamma_stop"))?,
            gamma_step: self.gamma_step.ok_or(ConfigError::Missing("gamma_step"))?,
            samples_per_point: self.samples.unwrap_or(DEFAULT_SAMPLES),
            limits: SolverLimits {
                timeout: Duration::from_millis(self.timeout_ms.unwrap_or(0)),
                max_backtracks: self.max_backtracks.unwrap_or(0),
            },
            master_seed: Seed(self.seed.unwrap_or(0)),
            compute_metrics: self.metrics.unwrap_or(false),
            timing: self.timing.unwrap_or_default(),
            workers: self.workers,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# comment line
dist = nbhd
vars = 100   # trailing comment
p = 0.3
gamma_start = 3
gamma_stop = 6
gamma_step = 1/10
samples = 20
seed = 7
timing = off
";

    #[test]
    fn parses_and_builds() {
        let spec = SweepConfig::parse(SAMPLE).unwrap().build().unwrap();
        assert_eq!(spec.gamma_step, Gamma::new(1, 10));
        assert_eq!(spec.gamma_points().len(), 31);
        assert_eq!(spec.samples_per_point, 20);
        assert_eq!(spec.master_seed, Seed(7));
        assert_eq!(spec.timing, Timing::Off);
        assert_eq!(spec.limits, SolverLimits::UNLIMITED);
        match spec.generator {
            GeneratorSpec::Neighborhood(n) => {
                assert_eq!(
                    (n.vars, n.k, n.bucket_size, n.p),
                    (100, 3, DEFAULT_BUCKET_SIZE, 0.3)
                );
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn overrides_win() {
        let base = SweepConfig::parse(SAMPLE).unwrap();
        let mut over = SweepConfig::default();
        over.set("samples", "5").unwrap();
        over.set("p", "1").unwrap();
        let spec = base.merge(over).build().unwrap();
        assert_eq!(spec.samples_per_point, 5);
        assert!(matches!(spec.generator, GeneratorSpec::Neighborhood(n) if n.p == 1.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            SweepConfig::parse("vars 10"),
            Err(ConfigError::Syntax { line: 1 })
        ));
        assert!(matches!(
            SweepConfig::parse("colour = red"),
            Err(ConfigError::UnknownKey(_))
        ));
        assert!(matches!(
            SweepConfig::parse("vars = 1\nvars = 2"),
            Err(ConfigError::Duplicate(_))
        ));
        assert!(matches!(
            SweepConfig::parse("vars = -3"),
            Err(ConfigError::Value { .. })
        ));
        assert!(matches!(
            SweepConfig::parse("timing = cpu"),
            Err(ConfigError::Value { .. })
        ));
        assert!(matches!(
            SweepConfig::parse("dist = zipf"),
            Err(ConfigError::Value { .. })
        ));
        let missing = SweepConfig::parse("dist = uniform\nvars = 10")
            .unwrap()
            .build();
        assert!(matches!(missing, Err(ConfigError::Missing("gamma_start"))));
    }

    #[test]
    fn distribution_specific_keys() {
        let g = GeneratorParams {
            dist: Some(Distribution::Uniform),
            vars: Some(10),
            gamma: Some(Gamma::from_integer(2)),
            copies: Some(2),
            ..Default::default()
        };
        assert!(matches!(
            g.build(),
            Err(ConfigError::NotApplicable { key: "copies", .. })
        ));
        let g = GeneratorParams {
            dist: Some(Distribution::Neighborhood),
            copies: None,
            ..g
        };
        assert!(matches!(g.build(), Err(ConfigError::Missing("p"))));
        let g = GeneratorParams {
            dist: Some(Distribution::Rich),
            copies: Some(0),
            ..g
        };
        assert!(matches!(g.build(), Err(ConfigError::Sweep(_))));
        let g = GeneratorParams {
            copies: Some(3),
            ..g
        };
        assert!(matches!(g.build().unwrap(), GeneratorSpec::Rich(r) if r.copies == 3));
    }

    #[test]
    fn invalid_range_is_reported() {
        let text = "dist = uniform\nvars = 10\ngamma_start = 5\ngamma_stop = 4\ngamma_step = 1";
        let err = SweepConfig::parse(text).unwrap().build();
        assert!(matches!(
            err,
            Err(ConfigError::Sweep(SweepError::EmptyRange { .. }))
        ));
    }
}
