//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::cases::{TestCase, TestCaseId};
use crate::error::{Error, Result};
use crate::rkdg::DgVariant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeId {
    CtsdAder,
    Rkdg,
    Ldf,
    DivClean,
}

impl SchemeId {
    pub const ALL: [SchemeId; 4] = [SchemeId::CtsdAder, SchemeId::Rkdg, SchemeId::Ldf, SchemeId::DivClean];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::CtsdAder => "ctsd_ader",
            SchemeId::Rkdg => "rkdg",
            SchemeId::Ldf => "ldf",
            SchemeId::DivClean => "divclean",
        }
    }

    pub fn dg_variant(self) -> Option<DgVariant> {
        match self {
            SchemeId::CtsdAder => None,
            SchemeId::Rkdg => Some(DgVariant::Traditional),
            SchemeId::Ldf => Some(DgVariant::Ldf),
            SchemeId::DivClean => Some(DgVariant::DivClean),
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            Error::Config(format!("unknown scheme '{s}' (ctsd_ader, rkdg, ldf, divclean)"))
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub test: TestCaseId,
    pub scheme: SchemeId,
    pub degree: usize,
    pub elements: usize,
    /// Defaults to the test case's final time.
    pub t_final: Option<f64>,
    pub cfl: f64,
    pub c_h: Option<f64>,
    pub c_p2: Option<f64>,
    pub outdir: PathBuf,
    /// Record diagnostics every this many steps, plus the final step.
    pub diag_interval: usize,
    /// Additionally record at every multiple of this time.
    pub diag_dt: Option<f64>,
}

pub const KEYS: [&str; 11] = [
    "test",
    "scheme",
    "n",
    "elements",
    "tfinal",
    "cfl",
    "c_h",
    "c_p2",
    "outdir",
    "diag_interval",
    "diag_dt",
];

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            test: TestCaseId::Loop,
            scheme: SchemeId::CtsdAder,
            degree: 2,
            elements: 32,
            t_final: None,
            cfl: 0.8,
            c_h: None,
            c_p2: None,
            outdir: PathBuf::from("."),
            diag_interval: 10,
            diag_dt: None,
        }
    }
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for '{key}'")))
}

/// `key = value` pairs of a configuration text; `#` starts a comment.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected 'key = value', got '{line}'", lineno + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
        }
        if out.iter().any(|(k, _)| k == key) {
            return Err(Error::Config(format!("line {}: duplicate key '{key}'", lineno + 1)));
        }
        out.push((key.to_string(), value.to_string()));
    }
    Ok(out)
}

impl ExperimentConfig {
    pub fn new(test: TestCaseId, scheme: SchemeId, degree: usize, elements: usize) -> Self {
        Self {
            test,
            scheme,
            degree,
            elements,
            ..Self::default()
        }
    }

    /// Defaults overridden by the pairs of a configuration text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (k, v) in parse_key_values(text)? {
            config.set(&k, &v)?;
        }
        Ok(config)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "test" => self.test = value.parse()?,
            "scheme" => self.scheme = value.parse()?,
            "n" => self.degree = number(key, value)?,
            "elements" => self.elements = number(key, value)?,
            "tfinal" => self.t_final = Some(number(key, value)?),
            "cfl" => self.cfl = number(key, value)?,
            "c_h" => self.c_h = Some(number(key, value)?),
            "c_p2" => self.c_p2 = Some(number(key, value)?),
            "outdir" => self.outdir = PathBuf::from(value),
            "diag_interval" => self.diag_interval = number(key, value)?,
            "diag_dt" => self.diag_dt = Some(number(key, value)?),
            _ => {
                return Err(Error::Config(format!(
                    "unknown key '{key}' (expected one of {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
            .unwrap_or_else(|| TestCase::new(self.test).default_t_final)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.elements == 0 {
            return bad("elements must be at least 1".into());
        }
        let t = self.t_final();
        if !(t > 0.0 && t.is_finite()) {
            return bad(format!("tfinal must be positive, got {t}"));
        }
        if !(self.cfl > 0.0 && self.cfl.is_finite()) {
            return bad(format!("cfl must be positive, got {}", self.cfl));
        }
        if self.diag_interval == 0 {
            return bad("diag_interval must be at least 1".into());
        }
        if let Some(d) = self.diag_dt {
            if !(d > 0.0 && d.is_finite()) {
                return bad(format!("diag_dt must be positive, got {d}"));
            }
        }
        if self.test == TestCaseId::Rotating && self.scheme != SchemeId::CtsdAder {
            return bad(format!(
                "the rotating test needs Dirichlet boundaries, available only for ctsd_ader, not {}",
                self.scheme
            ));
        }
        if self.scheme == SchemeId::Ldf && self.degree > 3 {
            return Err(Error::UnsupportedOrder(self.degree));
        }
        if self.scheme != SchemeId::DivClean && (self.c_h.is_some() || self.c_p2.is_some()) {
            return bad("c_h and c_p2 apply to the divclean scheme only".into());
        }
        for (name, v) in [("c_h", self.c_h), ("c_p2", self.c_p2)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("{name} must be positive, got {v}"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments_and_blank_lines() {
        let c = ExperimentConfig::parse(
            "# loop run\n\ntest = smooth\nscheme=rkdg  # trailing\n n = 3\nelements = 16\ntfinal = 0.5\noutdir = out/a\n",
        )
        .unwrap();
        assert_eq!(c.test, TestCaseId::Smooth);
        assert_eq!(c.scheme, SchemeId::Rkdg);
        assert_eq!(c.degree, 3);
        assert_eq!(c.elements, 16);
        assert_eq!(c.t_final(), 0.5);
        assert_eq!(c.outdir, PathBuf::from("out/a"));
        assert_eq!(c.cfl, 0.8);
        assert_eq!(c.diag_interval, 10);
    }

    #[test]
    fn reports_malformed_input() {
        assert!(ExperimentConfig::parse("n 3").unwrap_err().is_config());
        assert!(ExperimentConfig::parse("n = three").unwrap_err().is_config());
        assert!(ExperimentConfig::parse("color = red").unwrap_err().is_config());
        assert!(ExperimentConfig::parse("n = 1\nn = 2").unwrap_err().is_config());
    }

    #[test]
    fn default_final_time_follows_the_test() {
        let mut c = ExperimentConfig::default();
        assert_eq!(c.t_final(), 2.0);
        c.test = TestCaseId::Rotating;
        assert_eq!(c.t_final(), std::f64::consts::PI);
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let mut c = ExperimentConfig::new(TestCaseId::Rotating, SchemeId::Rkdg, 2, 8);
        assert!(c.validate().unwrap_err().is_config());
        c.test = TestCaseId::Loop;
        c.scheme = SchemeId::Ldf;
        c.degree = 4;
        assert!(matches!(c.validate(), Err(Error::UnsupportedOrder(4))));
        let mut c = ExperimentConfig::default();
        c.c_h = Some(1.0);
        assert!(c.validate().is_err());
        c.scheme = SchemeId::DivClean;
        assert!(c.validate().is_ok());
        c.cfl = 0.0;
        assert!(c.validate().is_err());
    }
}
