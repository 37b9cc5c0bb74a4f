//! Run settings: built-in defaults, then an optional `key = value` file,
//! then command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use chrono::{DateTime, NaiveDate, Utc};
use kernelguard::classifier::ClassifierConfig;
use kernelguard::corpus::CloneType;
use kernelguard::evaluation::{CloneScope, DEFAULT_MIN_LINES};
use kernelguard::kernels::{KernelConfig, KernelKind, DEFAULT_LAMBDA, DEFAULT_MU};
use kernelguard::retrieval::DEFAULT_CANDIDATE_LIMIT;

/// Keys accepted in a config file; each mirrors the flag of the same name.
pub const CONFIG_KEYS: &[&str] = &[
    "kernel",
    "lambda",
    "mu",
    "k",
    "candidates",
    "normalize",
    "min-lines",
    "types",
    "scope",
    "project",
    "threads",
    "evaluate-from",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub kernel: KernelKind,
    pub lambda: f64,
    pub mu: f64,
    pub k: usize,
    pub candidates: usize,
    pub normalize: bool,
    pub min_lines: usize,
    pub types: Option<Vec<CloneType>>,
    pub scope: Option<CloneScope>,
    pub project: Option<String>,
    pub threads: usize,
    pub evaluate_from: Option<DateTime<Utc>>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            kernel: KernelKind::Ptk,
            lambda: DEFAULT_LAMBDA,
            mu: DEFAULT_MU,
            k: 1,
            candidates: DEFAULT_CANDIDATE_LIMIT,
            normalize: true,
            min_lines: DEFAULT_MIN_LINES,
            types: None,
            scope: None,
            project: None,
            threads: 0,
            evaluate_from: None,
        }
    }
}

/// Values given on the command line; `None` leaves the lower layer alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub kernel: Option<KernelKind>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub k: Option<usize>,
    pub candidates: Option<usize>,
    pub raw: bool,
    pub min_lines: Option<usize>,
    pub types: Option<Vec<CloneType>>,
    pub scope: Option<CloneScope>,
    pub project: Option<String>,
    pub threads: Option<usize>,
    pub evaluate_from: Option<DateTime<Utc>>,
}

/// Accepts RFC 3339 timestamps and plain `YYYY-MM-DD` dates (midnight UTC).
pub fn parse_instant(s: &str) -> Result<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Ok(t.with_timezone(&Utc));
    }
    let d = NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| anyhow!("invalid date {s:?}"))?;
    Ok(d.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc())
}

pub fn parse_types(s: &str) -> Result<Vec<CloneType>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<CloneType>().map_err(|e| anyhow!("{e}")))
        .collect()
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => bail!("expected a boolean, got {s:?}"),
    }
}

/// Parses `key = value` lines; `#` starts a comment line.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key = value", i + 1))?;
        let key = key.trim().replace('_', "-");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            bail!("line {}: unknown key {key:?}", i + 1);
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

impl Settings {
    pub fn apply_config(&mut self, entries: &BTreeMap<String, String>) -> Result<()> {
        for (key, value) in entries {
            let ctx = || format!("config key {key}");
            match key.as_str() {
                "kernel" => self.kernel = value.parse().map_err(|e| anyhow!("{e}")).with_context(ctx)?,
                "lambda" => self.lambda = value.parse().with_context(ctx)?,
                "mu" => self.mu = value.parse().with_context(ctx)?,
                "k" => self.k = value.parse().with_context(ctx)?,
                "candidates" => self.candidates = value.parse().with_context(ctx)?,
                "normalize" => self.normalize = parse_bool(value).with_context(ctx)?,
                "min-lines" => self.min_lines = value.parse().with_context(ctx)?,
                "types" => self.types = Some(parse_types(value).with_context(ctx)?),
                "scope" => self.scope = Some(value.parse().map_err(|e| anyhow!("{e}")).with_context(ctx)?),
                "project" => self.project = Some(value.clone()),
                "threads" => self.threads = value.parse().with_context(ctx)?,
                "evaluate-from" => self.evaluate_from = Some(parse_instant(value).with_context(ctx)?),
                _ => unreachable!("keys are checked while parsing"),
            }
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        macro_rules! take {
            ($($field:ident),*) => { $(if let Some(v) = o.$field.clone() { self.$field = v; })* };
        }
        take!(kernel, lambda, mu, k, candidates, min_lines, threads);
        if o.raw {
            self.normalize = false;
        }
        if o.types.is_some() {
            self.types = o.types.clone();
        }
        if o.scope.is_some() {
            self.scope = o.scope;
        }
        if o.project.is_some() {
            self.project = o.project.clone();
        }
        if o.evaluate_from.is_some() {
            self.evaluate_from = o.evaluate_from;
        }
    }

    /// Defaults, then the config file when given, then the flags.
    pub fn resolve(config: Option<&Path>, overrides: &Overrides) -> Result<Settings> {
        let mut s = Settings::default();
        if let Some(path) = config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            s.apply_config(&parse_config(&text).with_context(|| path.display().to_string())?)?;
        }
        s.apply_overrides(overrides);
        Ok(s)
    }

    pub fn kernel_config(&self) -> Result<KernelConfig> {
        Ok(KernelConfig::new(self.kernel, self.lambda, self.mu, self.normalize)?)
    }

    pub fn classifier_config(&self) -> Result<ClassifierConfig> {
        Ok(ClassifierConfig::new(self.k, self.kernel_config()?, self.candidates)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_library() {
        let s = Settings::default();
        let c = s.classifier_config().unwrap();
        assert_eq!(c, ClassifierConfig::default());
    }

    #[test]
    fn flags_win_over_config() {
        let cfg = parse_config("# tuned\nkernel = sstk\nk=5\nlambda = 0.5\n\nmin_lines = 8\n").unwrap();
        let mut s = Settings::default();
        s.apply_config(&cfg).unwrap();
        assert_eq!((s.kernel, s.k, s.lambda, s.min_lines), (KernelKind::Sstk, 5, 0.5, 8));
        s.apply_overrides(&Overrides {
            k: Some(2),
            ..Default::default()
        });
        assert_eq!((s.kernel, s.k), (KernelKind::Sstk, 2));
    }

    #[test]
    fn bad_config_lines() {
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("kernel").is_err());
        let mut s = Settings::default();
        assert!(s.apply_config(&parse_config("k = many").unwrap()).is_err());
        assert!(s.apply_config(&parse_config("kernel = tree").unwrap()).is_err());
    }

    #[test]
    fn instants_and_types() {
        assert_eq!(parse_instant("2020-02-01").unwrap(), parse_instant("2020-02-01T00:00:00Z").unwrap());
        assert!(parse_instant("February").is_err());
        assert_eq!(parse_types("t1, T2,vst3").unwrap(), vec![CloneType::T1, CloneType::T2, CloneType::Vst3]);
        assert!(parse_types("T9").is_err());
    }

    #[test]
    fn invalid_values_surface_as_errors() {
        let s = Settings {
            k: 0,
            ..Default::default()
        };
        assert!(s.classifier_config().is_err());
        let s = Settings {
            lambda: 0.0,
            ..Default::default()
        };
        assert!(s.kernel_config().is_err());
    }
}
