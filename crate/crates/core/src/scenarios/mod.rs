//! The catalog of data-generating models. Each scenario binds a generator
//! carrying a minimum relevant effect to the test that analyses it, with
//! named parameters that can be overridden and a null variant that zeroes
//! the effect.

mod catalog;
mod models;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linmod::Variable;
use crate::probkit::RandomSource;
use crate::testkit::{ContingencyTable, TestResult};

pub use catalog::catalog;
pub use models::latent_cut;
use models::Model;

/// Admissible range of a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    Real,
    Positive,
    NonNegative,
    Probability,
    Correlation,
    /// Whole number ≥ 1.
    Count,
}

impl Bound {
    fn admits(self, v: f64) -> bool {
        v.is_finite()
            && match self {
                Bound::Real => true,
                Bound::Positive => v > 0.0,
                Bound::NonNegative => v >= 0.0,
                Bound::Probability => (0.0..=1.0).contains(&v),
                Bound::Correlation => v > -1.0 && v < 1.0,
                Bound::Count => v >= 1.0 && v.fract() == 0.0,
            }
    }
}

/// Value an effect parameter takes in the null variant.
#[derive(Debug, Clone, PartialEq)]
pub enum NullValue {
    Const(f64),
    /// Equal to another parameter, e.g. ρ = ρ₀.
    Param(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
struct ParamSpec {
    name: &'static str,
    bound: Bound,
}

#[derive(Debug, Clone, PartialEq)]
struct Effect {
    name: &'static str,
    null: NullValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    id: &'static str,
    title: &'static str,
    model: Model,
    default_n: usize,
    granularity: usize,
    min_n: usize,
    specs: Vec<ParamSpec>,
    values: BTreeMap<String, f64>,
    effects: Vec<Effect>,
    null: bool,
}

/// Serializable description of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub id: String,
    pub title: String,
    pub default_n: usize,
    pub granularity: usize,
    pub min_n: usize,
    pub params: BTreeMap<String, f64>,
    /// Effect parameters and their null values.
    pub effects: BTreeMap<String, f64>,
}

/// One generated data set, shaped for the scenario's test.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Count { successes: u64, trials: u64 },
    Counts(Vec<u64>),
    Sample(Vec<f64>),
    TwoSamples(Vec<f64>, Vec<f64>),
    Pairs(Vec<f64>, Vec<f64>),
    Table(ContingencyTable),
    Multivariate(DMatrix<f64>),
    TwoMultivariate(DMatrix<f64>, DMatrix<f64>),
    Linear { vars: Vec<Variable>, y: Vec<f64> },
    Binomial { x: Vec<f64>, successes: Vec<f64>, trials: Vec<f64> },
}

impl Dataset {
    /// Number of observational units (rows, draws or trials).
    pub fn size(&self) -> usize {
        match self {
            Dataset::Count { trials, .. } => *trials as usize,
            Dataset::Counts(c) => c.iter().sum::<u64>() as usize,
            Dataset::Sample(x) => x.len(),
            Dataset::TwoSamples(x, y) => x.len() + y.len(),
            Dataset::Pairs(x, _) => x.len(),
            Dataset::Table(t) => t.total() as usize,
            Dataset::Multivariate(m) => m.nrows(),
            Dataset::TwoMultivariate(a, b) => a.nrows() + b.nrows(),
            Dataset::Linear { y, .. } => y.len(),
            Dataset::Binomial { trials, .. } => trials.iter().sum::<f64>() as usize,
        }
    }
}

/// Looks up a catalog scenario by id.
pub fn find(id: &str) -> Result<Scenario> {
    let all = catalog();
    match all.iter().position(|s| s.id == id) {
        Some(i) => Ok(all[i].clone()),
        None => Err(Error::UnknownScenario {
            id: id.into(),
            valid: all.iter().map(|s| s.id).collect::<Vec<_>>().join(", "),
        }),
    }
}

pub fn ids() -> Vec<&'static str> {
    catalog().iter().map(|s| s.id).collect()
}

pub fn generate(s: &Scenario, n: usize, rng: &mut RandomSource) -> Result<Dataset> {
    s.generate(n, rng)
}

pub fn run_once(s: &Scenario, n: usize, rng: &mut RandomSource) -> Result<TestResult> {
    s.run_once(n, rng)
}

impl Scenario {
    pub fn id(&self) -> &'static str {
        self.id
    }

    pub fn title(&self) -> &'static str {
        self.title
    }

    /// Sample size printed with the model.
    pub fn default_n(&self) -> usize {
        self.default_n
    }

    /// `n` must be a multiple of this.
    pub fn granularity(&self) -> usize {
        self.granularity
    }

    /// Smallest admissible `n` (already a multiple of the granularity).
    pub fn min_n(&self) -> usize {
        self.min_n
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.values
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn effect_names(&self) -> Vec<&'static str> {
        self.effects.iter().map(|e| e.name).collect()
    }

    pub fn is_null(&self) -> bool {
        self.null
    }

    /// Whether each replication runs a nested resampling loop.
    pub fn is_randomization(&self) -> bool {
        matches!(self.model, Model::RandomizationUnpaired | Model::RandomizationPaired)
    }

    /// Replications used when none are requested.
    pub fn default_reps(&self) -> usize {
        if self.is_randomization() {
            500
        } else {
            5000
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Result<Self> {
        let spec = self.specs.iter().find(|p| p.name == name).ok_or_else(|| {
            let valid: Vec<&str> = self.specs.iter().map(|p| p.name).collect();
            Error::param(format!("scenario '{}' has no parameter '{name}' (valid: {})", self.id, valid.join(", ")))
        })?;
        if !spec.bound.admits(value) {
            return Err(Error::param(format!("parameter '{name}' = {value} is outside its range ({:?})", spec.bound)));
        }
        self.values.insert(name.into(), value);
        Ok(self)
    }

    pub fn with_params<'a>(self, overrides: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        overrides.into_iter().try_fold(self, |s, (k, v)| s.with_param(k, v))
    }

    /// Same generator with every effect parameter at its null value.
    pub fn null_variant(&self) -> Scenario {
        let mut s = self.clone();
        for e in &self.effects {
            let v = match e.null {
                NullValue::Const(v) => v,
                NullValue::Param(p) => self.get(p),
            };
            s.values.insert(e.name.into(), v);
        }
        s.null = true;
        s
    }

    pub fn summary(&self) -> ScenarioSummary {
        let null = self.null_variant();
        ScenarioSummary {
            id: self.id.into(),
            title: self.title.into(),
            default_n: self.default_n,
            granularity: self.granularity,
            min_n: self.min_n,
            params: self.values.clone(),
            effects: self.effects.iter().map(|e| (e.name.to_string(), null.get(e.name))).collect(),
        }
    }

    /// Rejects sample sizes the design cannot realize.
    pub fn check_n(&self, n: usize) -> Result<()> {
        if !n.is_multiple_of(self.granularity) {
            return Err(Error::design(format!(
                "scenario '{}' needs n to be a multiple of {} (got {n})",
                self.id, self.granularity
            )));
        }
        if n < self.min_n {
            return Err(Error::design(format!("scenario '{}' needs n >= {} (got {n})", self.id, self.min_n)));
        }
        Ok(())
    }

    pub fn generate(&self, n: usize, rng: &mut RandomSource) -> Result<Dataset> {
        self.check_n(n)?;
        models::generate(self, n, rng)
    }

    /// Applies the scenario's test. Randomization tests draw their
    /// resamples from `rng`.
    pub fn analyze(&self, data: &Dataset, rng: &mut RandomSource) -> Result<TestResult> {
        models::analyze(self, data, rng)
    }

    /// Generate, then test; nested resampling uses a child substream.
    pub fn run_once(&self, n: usize, rng: &mut RandomSource) -> Result<TestResult> {
        let data = self.generate(n, rng)?;
        let mut inner = rng.child(1);
        self.analyze(&data, &mut inner)
    }

    fn get(&self, name: &str) -> f64 {
        self.values[name]
    }

    /// A secondary group size (`m`, `n2`, …) at sample size `n`: its listed
    /// value scaled in proportion to `n / default_n`.
    pub fn group_size(&self, name: &str, n: usize) -> Result<usize> {
        if !self.values.contains_key(name) {
            return Err(Error::param(format!("scenario '{}' has no group size '{name}'", self.id)));
        }
        let m = (self.get(name) * n as f64 / self.default_n as f64).round() as usize;
        if m < 2 {
            return Err(Error::design(format!(
                "scenario '{}': n = {n} leaves '{name}' with {m} observation(s); need at least 2",
                self.id
            )));
        }
        Ok(m)
    }
}
