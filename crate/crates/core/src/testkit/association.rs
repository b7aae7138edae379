use super::{mean, Df, TestResult};
use crate::error::{Error, Result};
use crate::probkit::{norm_cdf, Distribution};

/// Two-way table of counts, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    cells: Vec<u64>,
}

impl ContingencyTable {
    pub fn new(rows: usize, cols: usize, cells: Vec<u64>) -> Result<Self> {
        if rows == 0 || cols == 0 || cells.len() != rows * cols {
            return Err(Error::param(format!("{} cells do not form a {rows}x{cols} table", cells.len())));
        }
        Ok(ContingencyTable { rows, cols, cells })
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::param("ragged contingency table"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Cross-tabulates paired category codes (`row < rows`, `col < cols`).
    pub fn tabulate(row_codes: &[usize], col_codes: &[usize], rows: usize, cols: usize) -> Result<Self> {
        if row_codes.len() != col_codes.len() {
            return Err(Error::param("row and column codes differ in length"));
        }
        let mut cells = vec![0u64; rows * cols];
        for (&r, &c) in row_codes.iter().zip(col_codes) {
            if r >= rows || c >= cols {
                return Err(Error::param(format!("code ({r}, {c}) outside a {rows}x{cols} table")));
            }
            cells[r * cols + c] += 1;
        }
        Self::new(rows, cols, cells)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.cells[r * self.cols + c]
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().sum()
    }

    pub fn row_margins(&self) -> Vec<u64> {
        self.cells.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_margins(&self) -> Vec<u64> {
        (0..self.cols).map(|c| (0..self.rows).map(|r| self.get(r, c)).sum()).collect()
    }
}

/// Pearson χ² test of homogeneity/independence without continuity
/// correction.
pub fn chisq_contingency(tab: &ContingencyTable) -> TestResult {
    let rm = tab.row_margins();
    let cm = tab.col_margins();
    if rm.contains(&0) || cm.contains(&0) {
        return TestResult::invalid("table has an empty row or column");
    }
    if tab.rows < 2 || tab.cols < 2 {
        return TestResult::invalid("table needs at least two rows and two columns");
    }
    let n = tab.total() as f64;
    let mut stat = 0.0;
    let mut small = false;
    for (r, &row_total) in rm.iter().enumerate() {
        for (c, &col_total) in cm.iter().enumerate() {
            let e = row_total as f64 * col_total as f64 / n;
            small |= e < 5.0;
            let d = tab.get(r, c) as f64 - e;
            stat += d * d / e;
        }
    }
    let df = ((tab.rows - 1) * (tab.cols - 1)) as f64;
    let p = Distribution::ChiSquared { df }.sf(stat).unwrap_or(1.0);
    let res = TestResult::new(stat, Some(Df::One(df)), p);
    if small {
        res.with_note("some expected counts are below 5")
    } else {
        res
    }
}

/// Test of a Pearson correlation: the exact t form when `rho0 == 0`, the
/// Fisher z approximation otherwise.
pub fn cor_test(x: &[f64], y: &[f64], rho0: f64) -> Result<TestResult> {
    if !(rho0 > -1.0 && rho0 < 1.0) {
        return Err(Error::param(format!("rho0 must lie in (-1, 1), got {rho0}")));
    }
    if x.len() != y.len() {
        return Err(Error::param("correlation needs paired samples of equal length"));
    }
    let n = x.len();
    let min_n = if rho0 == 0.0 { 3 } else { 4 };
    if n < min_n {
        return Ok(TestResult::invalid(format!("need at least {min_n} pairs")));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if !(sxx > 0.0 && syy > 0.0) {
        return Ok(TestResult::invalid("constant column"));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let nf = n as f64;
    Ok(if rho0 == 0.0 {
        let df = nf - 2.0;
        let t = r * df.sqrt() / (1.0 - r * r).sqrt();
        let (lo, up) = Distribution::StudentT { df }.tails(t)?;
        TestResult::new(t, Some(Df::One(df)), super::two_sided(lo, up))
    } else {
        let z = (r.atanh() - rho0.atanh()) * (nf - 3.0).sqrt();
        TestResult::new(z, None, 2.0 * norm_cdf(-z.abs()))
    })
}
