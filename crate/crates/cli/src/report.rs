//! Report rendering: JSON, CSV and aligned text tables.

use std::collections::BTreeMap;

use powersim::engine::{PowerEstimate, WidthEstimate};
use powersim::oracle::OracleMethod;
use powersim::scenarios::ScenarioSummary;
use serde::Serialize;

use crate::config::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

impl Format {
    pub fn parse(s: &str) -> CliResult<Format> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "table" => Ok(Format::Table),
            _ => Err(CliError::config(format!("format: unknown '{s}' (valid: json, csv, table)"))),
        }
    }
}

/// Object-safe view of `Serialize`.
pub trait ToJson {
    fn to_json(&self) -> String;
}

impl<T: Serialize> ToJson for T {
    fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Anything that can be printed in all three formats.
pub trait Report: ToJson {
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
    /// Rows for human reading; defaults to the exact rows.
    fn display_rows(&self) -> Vec<Vec<String>> {
        self.rows()
    }
    /// Lines shown above a text table.
    fn preamble(&self) -> Vec<String> {
        Vec::new()
    }
}

pub fn render(r: &dyn Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = r.to_json();
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = r.header().join(",");
            s.push('\n');
            for row in r.rows() {
                s.push_str(&row.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            s
        }
        Format::Table => {
            let mut s: String = r.preamble().into_iter().map(|l| l + "\n").collect();
            s.push_str(&table(&r.header(), &r.display_rows()));
            s
        }
    }
}

fn csv_field(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut s = line(header.to_vec());
    let rules: Vec<String> = width.iter().map(|&w| "-".repeat(w)).collect();
    s.push_str(&line(rules.iter().map(String::as_str).collect()));
    for row in rows {
        s.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    s
}

/// `k=v;k=v`, the flat form of a parameter map used in CSV and tables.
pub fn params_cell(params: &BTreeMap<String, f64>) -> String {
    params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

/// One power (or size) estimate.
#[derive(Debug, Clone, Serialize)]
pub struct PowerRow {
    #[serde(skip)]
    pub label: &'static str,
    pub scenario: String,
    pub params: BTreeMap<String, f64>,
    pub n: usize,
    pub alpha: f64,
    pub reps: usize,
    pub seed: u64,
    pub power: f64,
    pub mc_se: f64,
    pub ci95: [f64; 2],
    pub invalid: u64,
    pub elapsed_ms: u64,
}

impl PowerRow {
    pub fn new(label: &'static str, est: &PowerEstimate, params: &BTreeMap<String, f64>, seed: u64, elapsed_ms: u64) -> Self {
        PowerRow {
            label,
            scenario: est.scenario.clone(),
            params: params.clone(),
            n: est.n,
            alpha: est.alpha,
            reps: est.reps,
            seed,
            power: est.power,
            mc_se: est.mc_se,
            ci95: [est.ci95.0, est.ci95.1],
            invalid: est.invalid,
            elapsed_ms,
        }
    }

    const HEADER: [&'static str; 13] =
        ["label", "scenario", "params", "n", "alpha", "reps", "seed", "power", "mc_se", "ci95_lo", "ci95_hi", "invalid", "elapsed_ms"];

    fn cells(&self, exact: bool) -> Vec<String> {
        let num = |v: f64| if exact { v.to_string() } else { format!("{v:.4}") };
        vec![
            self.label.to_string(),
            self.scenario.clone(),
            params_cell(&self.params),
            self.n.to_string(),
            self.alpha.to_string(),
            self.reps.to_string(),
            self.seed.to_string(),
            num(self.power),
            num(self.mc_se),
            num(self.ci95[0]),
            num(self.ci95[1]),
            self.invalid.to_string(),
            self.elapsed_ms.to_string(),
        ]
    }
}

impl Report for PowerRow {
    fn header(&self) -> Vec<&'static str> {
        PowerRow::HEADER.to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![self.cells(true)]
    }

    fn display_rows(&self) -> Vec<Vec<String>> {
        vec![self.cells(false)]
    }
}

/// Several estimates of one scenario, e.g. a power curve.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct PowerRows(pub Vec<PowerRow>);

impl Report for PowerRows {
    fn header(&self) -> Vec<&'static str> {
        PowerRow::HEADER.to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.0.iter().map(|r| r.cells(true)).collect()
    }

    fn display_rows(&self) -> Vec<Vec<String>> {
        self.0.iter().map(|r| r.cells(false)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub scenario: String,
    pub params: BTreeMap<String, f64>,
    pub target: f64,
    pub alpha: f64,
    pub reps: usize,
    pub seed: u64,
    pub n_star: usize,
    pub confirmation: PowerRow,
    pub trace: Vec<PowerRow>,
    pub elapsed_ms: u64,
}

impl Report for SolveReport {
    fn header(&self) -> Vec<&'static str> {
        PowerRow::HEADER.to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.trace.iter().chain([&self.confirmation]).map(|r| r.cells(true)).collect()
    }

    fn display_rows(&self) -> Vec<Vec<String>> {
        self.trace.iter().chain([&self.confirmation]).map(|r| r.cells(false)).collect()
    }

    fn preamble(&self) -> Vec<String> {
        vec![format!(
            "{}: n* = {} for target power {} (confirmation {:.4} ± {:.4}, seed {})",
            self.scenario, self.n_star, self.target, self.confirmation.power, self.confirmation.mc_se, self.seed
        )]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WidthReport {
    pub kind: &'static str,
    pub n: usize,
    pub level: f64,
    pub reps: usize,
    pub seed: u64,
    pub p: f64,
    pub mean: f64,
    pub sigma: f64,
    pub mean_width: f64,
    pub sd_width: f64,
    pub q90_width: f64,
    pub elapsed_ms: u64,
}

impl WidthReport {
    pub fn new(w: &WidthEstimate, seed: u64, p: f64, mean: f64, sigma: f64, elapsed_ms: u64) -> Self {
        WidthReport {
            kind: w.kind.name(),
            n: w.n,
            level: w.level,
            reps: w.reps,
            seed,
            p,
            mean,
            sigma,
            mean_width: w.mean_width,
            sd_width: w.sd_width,
            q90_width: w.q90_width,
            elapsed_ms,
        }
    }
}

impl Report for WidthReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["kind", "n", "level", "reps", "seed", "p", "mean", "sigma", "mean_width", "sd_width", "q90_width", "elapsed_ms"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.kind.to_string(),
            self.n.to_string(),
            self.level.to_string(),
            self.reps.to_string(),
            self.seed.to_string(),
            self.p.to_string(),
            self.mean.to_string(),
            self.sigma.to_string(),
            self.mean_width.to_string(),
            self.sd_width.to_string(),
            self.q90_width.to_string(),
            self.elapsed_ms.to_string(),
        ]]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub scenario: String,
    pub params: BTreeMap<String, f64>,
    pub n: usize,
    pub alpha: f64,
    pub power: f64,
    pub method: OracleMethod,
}

impl Report for OracleReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["scenario", "params", "n", "alpha", "power", "method"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let method = serde_json::to_value(self.method).expect("method serializes");
        vec![vec![
            self.scenario.clone(),
            params_cell(&self.params),
            self.n.to_string(),
            self.alpha.to_string(),
            self.power.to_string(),
            method.as_str().unwrap_or_default().to_string(),
        ]]
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct ListReport(pub Vec<ScenarioSummary>);

impl Report for ListReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["id", "default_n", "granularity", "min_n", "title", "params"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.0
            .iter()
            .map(|s| {
                vec![
                    s.id.to_string(),
                    s.default_n.to_string(),
                    s.granularity.to_string(),
                    s.min_n.to_string(),
                    s.title.to_string(),
                    params_cell(&s.params),
                ]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> PowerRow {
        let mut params = BTreeMap::new();
        params.insert("effect".to_string(), 4.0);
        params.insert("sigma".to_string(), 7.5);
        PowerRow {
            label: "power",
            scenario: "t-one-sample".into(),
            params,
            n: 30,
            alpha: 0.05,
            reps: 1000,
            seed: 7,
            power: 0.803,
            mc_se: 0.012_580_540_529_168_58,
            ci95: [0.7774, 0.8263],
            invalid: 0,
            elapsed_ms: 5,
        }
    }

    #[test]
    fn json_schema() {
        let v: serde_json::Value = serde_json::from_str(&render(&row(), Format::Json)).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        for k in ["scenario", "params", "n", "alpha", "reps", "seed", "power", "mc_se", "ci95", "invalid", "elapsed_ms"] {
            assert!(keys.contains(&k), "{k}");
        }
        assert_eq!(v["ci95"].as_array().unwrap().len(), 2);
        assert!(v.get("label").is_none());
    }

    #[test]
    fn csv_keeps_full_precision() {
        let csv = render(&row(), Format::Csv);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
        assert!(lines[1].contains("0.01258054052916858"));
        assert!(lines[1].contains("effect=4;sigma=7.5"));
    }

    #[test]
    fn csv_quotes_commas() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\", ok"), "\"say \"\"hi\"\", ok\"");
    }

    #[test]
    fn table_aligns_columns() {
        let t = table(&["a", "bbb"], &[vec!["xxxx".into(), "y".into()]]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "a     bbb");
        assert_eq!(lines[2], "xxxx  y");
    }

    #[test]
    fn formats_parse() {
        assert_eq!(Format::parse("csv").unwrap(), Format::Csv);
        assert!(Format::parse("xml").unwrap_err().to_string().starts_with("format:"));
    }
}
