//! Run configuration: an optional TOML file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

/// A problem with the user's configuration; always reported on one line.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Run(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            CliError::Config(m) | CliError::Run(m) => m,
        };
        f.write_str(&msg.replace('\n', " "))
    }
}

impl From<powersim::error::Error> for CliError {
    fn from(e: powersim::error::Error) -> Self {
        use powersim::error::Error::*;
        match e {
            Parameter(_) | Design(_) | UnknownScenario { .. } => CliError::Config(e.to_string()),
            Numeric(_) | Simulation(_) => CliError::Run(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Every setting a command can take. Files and flags fill the same struct;
/// flags win.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub n: Option<usize>,
    pub n_list: Option<Vec<usize>>,
    pub target: Option<f64>,
    pub n_max: Option<usize>,
    pub alpha: Option<f64>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub invalid_policy: Option<String>,
    pub kind: Option<String>,
    pub level: Option<f64>,
    pub p: Option<f64>,
    pub mean: Option<f64>,
    pub sigma: Option<f64>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $(if $top.$f.is_some() { $base.$f = $top.$f; })*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("config: cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|msg| CliError::config(format!("config {}: {msg}", path.display())))
    }

    pub fn parse(text: &str) -> Result<RunConfig, String> {
        toml::from_str(text).map_err(|e: toml::de::Error| {
            let line = e.span().map(|s| text[..s.start].matches('\n').count() + 1);
            match line {
                Some(l) => format!("line {l}: {}", e.message()),
                None => e.message().to_string(),
            }
        })
    }

    /// Lays `top` over `self`; parameter overrides merge key by key.
    pub fn overlay(mut self, top: RunConfig) -> RunConfig {
        overlay!(self, top; scenario, n, n_list, target, n_max, alpha, reps, seed, workers,
            format, out, plot, invalid_policy, kind, level, p, mean, sigma);
        self.params.extend(top.params);
        self
    }

    /// Fails naming the first field that the command does not use.
    pub fn reject(&self, command: &str, fields: &[&str]) -> CliResult<()> {
        for &f in fields {
            let set = match f {
                "scenario" => self.scenario.is_some(),
                "params" => !self.params.is_empty(),
                "n" => self.n.is_some(),
                "n_list" => self.n_list.is_some(),
                "target" => self.target.is_some(),
                "n_max" => self.n_max.is_some(),
                "alpha" => self.alpha.is_some(),
                "plot" => self.plot.is_some(),
                "invalid_policy" => self.invalid_policy.is_some(),
                "kind" => self.kind.is_some(),
                "level" => self.level.is_some(),
                "p" => self.p.is_some(),
                "mean" => self.mean.is_some(),
                "sigma" => self.sigma.is_some(),
                _ => false,
            };
            if set {
                return Err(CliError::config(format!("{f}: not used by '{command}'")));
            }
        }
        Ok(())
    }
}

/// Parses a `key=value` parameter override.
pub fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("value of '{}' is not a number: '{v}'", k.trim()))?;
    Ok((k.trim().to_string(), v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_fields_and_params() {
        let c = RunConfig::parse("scenario = \"t-pooled\"\nn = 115\nalpha = 0.01\n[params]\neffect = 5.0\n").unwrap();
        assert_eq!(c.scenario.as_deref(), Some("t-pooled"));
        assert_eq!(c.n, Some(115));
        assert_eq!(c.params["effect"], 5.0);
    }

    #[test]
    fn unknown_field_names_it() {
        let e = RunConfig::parse("scenario = \"x\"\nrepz = 3\n").unwrap_err();
        assert!(e.contains("repz") && e.starts_with("line 2"), "{e}");
    }

    #[test]
    fn flags_override_file() {
        let mut file = RunConfig { n: Some(10), alpha: Some(0.01), ..Default::default() };
        file.params.insert("a".into(), 1.0);
        file.params.insert("b".into(), 2.0);
        let mut flags = RunConfig { n: Some(20), ..Default::default() };
        flags.params.insert("b".into(), 3.0);
        let c = file.overlay(flags);
        assert_eq!((c.n, c.alpha), (Some(20), Some(0.01)));
        assert_eq!((c.params["a"], c.params["b"]), (1.0, 3.0));
    }

    #[test]
    fn param_syntax() {
        assert_eq!(parse_param("sigma = 2.5").unwrap(), ("sigma".into(), 2.5));
        assert!(parse_param("sigma").is_err());
        assert!(parse_param("sigma=abc").is_err());
    }

    #[test]
    fn rejection_names_field() {
        let c = RunConfig { target: Some(0.8), ..Default::default() };
        let e = c.reject("power", &["n_list", "target"]).unwrap_err();
        assert_eq!(e.to_string(), "target: not used by 'power'");
        assert_eq!(e.exit_code(), 2);
    }
}
