//! `key = value` settings files for `eval`.

use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::pec::{Backend, CheckConfig, SolverKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Denominator {
    #[default]
    All,
    Supported,
}

impl FromStr for Denominator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(Denominator::All),
            "supported" => Ok(Denominator::Supported),
            other => Err(format!("unknown denominator '{other}' (expected all or supported)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

/// Every `eval` flag. `None` means not given.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalSettings {
    pub input: Option<PathBuf>,
    pub depth: Option<usize>,
    pub timeout: Option<f64>,
    pub workers: Option<usize>,
    pub backend: Option<Backend>,
    pub solver: Option<SolverKind>,
    pub max_enum_bits: Option<u32>,
    pub report: Option<PathBuf>,
    pub dump: Option<PathBuf>,
    pub denominator: Option<Denominator>,
}

fn parse_value<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| ConfigError {
        line,
        message: format!("bad value for {key}: {e}"),
    })
}

impl EvalSettings {
    /// Blank lines and `#` comments are ignored; keys may use `-` or `_`.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut s = EvalSettings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body.split_once('=').ok_or_else(|| ConfigError {
                line,
                message: format!("expected key = value, got '{body}'"),
            })?;
            let key = k.trim().replace('-', "_");
            let v = v.trim();
            match key.as_str() {
                "input" => s.input = Some(v.into()),
                "depth" => s.depth = Some(parse_value(line, &key, v)?),
                "timeout" => s.timeout = Some(parse_value(line, &key, v)?),
                "workers" => s.workers = Some(parse_value(line, &key, v)?),
                "backend" => s.backend = Some(parse_value(line, &key, v)?),
                "solver" => s.solver = Some(parse_value(line, &key, v)?),
                "max_enum_bits" => s.max_enum_bits = Some(parse_value(line, &key, v)?),
                "report" => s.report = Some(v.into()),
                "dump" => s.dump = Some(v.into()),
                "denominator" => s.denominator = Some(parse_value(line, &key, v)?),
                other => {
                    return Err(ConfigError {
                        line,
                        message: format!("unknown key '{other}'"),
                    })
                }
            }
        }
        Ok(s)
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: EvalSettings) -> EvalSettings {
        EvalSettings {
            input: self.input.or(base.input),
            depth: self.depth.or(base.depth),
            timeout: self.timeout.or(base.timeout),
            workers: self.workers.or(base.workers),
            backend: self.backend.or(base.backend),
            solver: self.solver.or(base.solver),
            max_enum_bits: self.max_enum_bits.or(base.max_enum_bits),
            report: self.report.or(base.report),
            dump: self.dump.or(base.dump),
            denominator: self.denominator.or(base.denominator),
        }
    }

    pub fn check_config(&self) -> Result<CheckConfig, String> {
        let mut cfg = CheckConfig::default();
        if let Some(d) = self.depth {
            cfg.depth = d;
        }
        if let Some(t) = self.timeout {
            if !(t.is_finite() && t > 0.0) {
                return Err(format!("timeout must be positive, got {t}"));
            }
            cfg.timeout = Duration::from_secs_f64(t);
        }
        if let Some(b) = self.backend {
            cfg.backend = b;
        }
        if let Some(s) = self.solver {
            cfg.solver = s;
        }
        if let Some(m) = self.max_enum_bits {
            cfg.max_enum_bits = m;
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    pub fn workers(&self) -> Result<usize, String> {
        match self.workers {
            Some(0) => Err("workers must be at least 1".into()),
            Some(w) => Ok(w),
            None => Ok(1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_merge() {
        let file = EvalSettings::parse("# defaults\ndepth = 8\nbackend=smt\nmax-enum-bits = 24\n\nworkers = 4 # pool\n").unwrap();
        assert_eq!(file.depth, Some(8));
        assert_eq!(file.backend, Some(Backend::Smt));
        let cli = EvalSettings {
            depth: Some(5),
            ..Default::default()
        };
        let merged = cli.over(file);
        assert_eq!(merged.depth, Some(5));
        assert_eq!(merged.workers, Some(4));
        let cfg = merged.check_config().unwrap();
        assert_eq!((cfg.depth, cfg.max_enum_bits), (5, 24));
    }

    #[test]
    fn errors() {
        assert_eq!(EvalSettings::parse("a = 1").unwrap_err().line, 1);
        assert_eq!(EvalSettings::parse("\ndepth = x").unwrap_err().line, 2);
        assert!(EvalSettings::parse("depth").is_err());
        let zero = EvalSettings {
            workers: Some(0),
            ..Default::default()
        };
        assert!(zero.workers().is_err());
        let bad = EvalSettings {
            timeout: Some(-1.0),
            ..Default::default()
        };
        assert!(bad.check_config().is_err());
    }
}
