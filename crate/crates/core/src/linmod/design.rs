use std::ops::Range;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// How a factor is expanded into design columns.
#[derive(Debug, Clone, PartialEq)]
pub enum Coding {
    /// First level is the baseline; one indicator column per other level.
    Treatment,
    /// Custom `levels × (levels − 1)` contrast matrix with zero column sums.
    Contrasts(DMatrix<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorSpec {
    pub name: String,
    pub levels: Vec<String>,
    pub coding: Coding,
}

impl FactorSpec {
    pub fn new(name: impl Into<String>, levels: Vec<String>) -> Result<Self> {
        let name = name.into();
        if levels.len() < 2 {
            return Err(Error::design(format!("factor '{name}' needs at least two levels")));
        }
        for (i, l) in levels.iter().enumerate() {
            if levels[..i].contains(l) {
                return Err(Error::design(format!("factor '{name}' repeats level '{l}'")));
            }
        }
        Ok(FactorSpec { name, levels, coding: Coding::Treatment })
    }

    /// Factor with levels labelled `1..=k`.
    pub fn numbered(name: impl Into<String>, k: usize) -> Result<Self> {
        Self::new(name, (1..=k).map(|i| i.to_string()).collect())
    }

    pub fn with_contrasts(mut self, c: DMatrix<f64>) -> Result<Self> {
        let k = self.levels.len();
        if c.nrows() != k || c.ncols() != k - 1 {
            return Err(Error::design(format!(
                "contrasts for '{}' must be {k}x{}, got {}x{}",
                self.name,
                k - 1,
                c.nrows(),
                c.ncols()
            )));
        }
        for (j, col) in c.column_iter().enumerate() {
            if col.sum().abs() > 1e-12 * col.amax().max(1.0) {
                return Err(Error::design(format!("contrast {} of '{}' does not sum to zero", j + 1, self.name)));
            }
        }
        self.coding = Coding::Contrasts(c);
        Ok(self)
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// `levels × (levels − 1)` coding matrix.
    pub fn coding_matrix(&self) -> DMatrix<f64> {
        let k = self.levels.len();
        match &self.coding {
            Coding::Treatment => DMatrix::from_fn(k, k - 1, |i, j| if i == j + 1 { 1.0 } else { 0.0 }),
            Coding::Contrasts(c) => c.clone(),
        }
    }

    /// Pairwise orthogonality `Σᵢ c_ij·c_ik = 0` of the coding columns.
    pub fn is_orthogonal(&self) -> bool {
        let c = self.coding_matrix();
        let scale = c.amax().max(1.0);
        (0..c.ncols()).all(|j| (0..j).all(|k| c.column(j).dot(&c.column(k)).abs() <= 1e-12 * scale * scale))
    }

    fn column_labels(&self) -> Vec<String> {
        match self.coding {
            Coding::Treatment => self.levels[1..].iter().map(|l| format!("{}{l}", self.name)).collect(),
            Coding::Contrasts(_) => (1..self.levels.len()).map(|j| format!("{}{j}", self.name)).collect(),
        }
    }
}

/// A model variable observed on every row.
#[derive(Debug, Clone, PartialEq)]
pub enum Variable {
    Factor { spec: FactorSpec, codes: Vec<usize> },
    Covariate { name: String, values: Vec<f64> },
}

impl Variable {
    pub fn factor(spec: FactorSpec, codes: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = codes.iter().find(|&&c| c >= spec.n_levels()) {
            return Err(Error::design(format!("level code {bad} out of range for factor '{}'", spec.name)));
        }
        Ok(Variable::Factor { spec, codes })
    }

    pub fn covariate(name: impl Into<String>, values: Vec<f64>) -> Self {
        Variable::Covariate { name: name.into(), values }
    }

    pub fn name(&self) -> &str {
        match self {
            Variable::Factor { spec, .. } => &spec.name,
            Variable::Covariate { name, .. } => name,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Variable::Factor { codes, .. } => codes.len(),
            Variable::Covariate { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coding columns and their labels.
    fn columns(&self) -> (DMatrix<f64>, Vec<String>) {
        match self {
            Variable::Factor { spec, codes } => {
                let c = spec.coding_matrix();
                let m = DMatrix::from_fn(codes.len(), c.ncols(), |i, j| c[(codes[i], j)]);
                (m, spec.column_labels())
            }
            Variable::Covariate { name, values } => (DMatrix::from_column_slice(values.len(), 1, values), vec![name.clone()]),
        }
    }
}

/// Columns of a design matrix belonging to one model term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermSpan {
    pub name: String,
    pub columns: Range<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    matrix: DMatrix<f64>,
    columns: Vec<String>,
    terms: Vec<TermSpan>,
    rank: usize,
}

/// Relative tolerance on |R_jj| for rank detection.
pub const RANK_TOL: f64 = 1e-10;

impl DesignMatrix {
    /// Wraps an explicit matrix, checking that it has full column rank.
    pub fn from_matrix(matrix: DMatrix<f64>, columns: Vec<String>, terms: Vec<TermSpan>) -> Result<Self> {
        if columns.len() != matrix.ncols() {
            return Err(Error::design(format!("{} column names for {} columns", columns.len(), matrix.ncols())));
        }
        if terms.iter().map(|t| t.columns.len()).sum::<usize>() != matrix.ncols() {
            return Err(Error::design("term spans do not cover the columns"));
        }
        let aliased = aliased_columns(&matrix);
        if !aliased.is_empty() {
            let names: Vec<&str> = aliased.iter().map(|&j| columns[j].as_str()).collect();
            return Err(Error::design(format!("rank-deficient design; aliased column(s): {}", names.join(", "))));
        }
        let rank = matrix.ncols();
        Ok(DesignMatrix { matrix, columns, terms, rank })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn terms(&self) -> &[TermSpan] {
        &self.terms
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n_rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.matrix.ncols()
    }

    /// `X·β` as a plain vector.
    pub fn mul_beta(&self, beta: &[f64]) -> Result<Vec<f64>> {
        if beta.len() != self.n_cols() {
            return Err(Error::param(format!("{} coefficients for {} columns", beta.len(), self.n_cols())));
        }
        Ok((0..self.n_rows()).map(|i| self.matrix.row(i).iter().zip(beta).map(|(x, b)| x * b).sum()).collect())
    }
}

/// Indices of columns whose Householder pivot is negligible relative to
/// the largest column norm.
pub(crate) fn aliased_columns(x: &DMatrix<f64>) -> Vec<usize> {
    if x.ncols() == 0 {
        return Vec::new();
    }
    let scale = x.column_iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if x.nrows() < x.ncols() {
        return (x.nrows()..x.ncols()).collect();
    }
    let r = x.clone().qr().r();
    (0..x.ncols()).filter(|&j| !(r[(j, j)].abs() > RANK_TOL * scale)).collect()
}

/// Intercept plus the listed terms; each term is a list of variable names
/// (one name for a main effect, several for an interaction).
pub fn build_design(vars: &[Variable], terms: &[&[&str]]) -> Result<DesignMatrix> {
    let n = vars.first().map_or(0, Variable::len);
    if n == 0 {
        return Err(Error::design("design needs at least one nonempty variable"));
    }
    if let Some(v) = vars.iter().find(|v| v.len() != n) {
        return Err(Error::design(format!("variable '{}' has {} rows, expected {n}", v.name(), v.len())));
    }
    let mut blocks = vec![DMatrix::from_element(n, 1, 1.0)];
    let mut names = vec!["(Intercept)".to_string()];
    let mut spans = vec![TermSpan { name: "(Intercept)".into(), columns: 0..1 }];
    for term in terms {
        if term.is_empty() {
            return Err(Error::design("empty model term"));
        }
        let mut cols = DMatrix::from_element(n, 1, 1.0);
        let mut labels = vec![String::new()];
        for name in term.iter() {
            let var = vars
                .iter()
                .find(|v| v.name() == *name)
                .ok_or_else(|| Error::design(format!("unknown variable '{name}' in model term")))?;
            let (m, l) = var.columns();
            // first variable varies fastest
            let mut next = DMatrix::zeros(n, cols.ncols() * m.ncols());
            let mut next_labels = Vec::with_capacity(next.ncols());
            for (b, lb) in l.iter().enumerate() {
                for (a, la) in labels.iter().enumerate() {
                    let j = b * cols.ncols() + a;
                    next.set_column(j, &cols.column(a).component_mul(&m.column(b)));
                    next_labels.push(if la.is_empty() { lb.clone() } else { format!("{la}:{lb}") });
                }
            }
            cols = next;
            labels = next_labels;
        }
        let start = names.len();
        spans.push(TermSpan { name: term.join(":"), columns: start..start + cols.ncols() });
        names.extend(labels);
        blocks.push(cols);
    }
    let p = names.len();
    let mut matrix = DMatrix::zeros(n, p);
    let mut j = 0;
    for b in &blocks {
        matrix.columns_mut(j, b.ncols()).copy_from(b);
        j += b.ncols();
    }
    DesignMatrix::from_matrix(matrix, names, spans)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn treatment_coding_columns() {
        let g = FactorSpec::numbered("g", 3).unwrap();
        let v = Variable::factor(g, vec![0, 1, 2, 0, 1, 2]).unwrap();
        let d = build_design(&[v], &[&["g"]]).unwrap();
        assert_eq!(d.columns(), &["(Intercept)", "g2", "g3"]);
        assert_eq!(d.matrix().row(4).iter().copied().collect::<Vec<_>>(), vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn two_by_two_interaction() {
        let a = Variable::factor(FactorSpec::numbered("A", 2).unwrap(), vec![0, 1, 0, 1]).unwrap();
        let b = Variable::factor(FactorSpec::numbered("B", 2).unwrap(), vec![0, 0, 1, 1]).unwrap();
        let d = build_design(&[a, b], &[&["A"], &["B"], &["A", "B"]]).unwrap();
        assert_eq!(d.columns(), &["(Intercept)", "A2", "B2", "A2:B2"]);
        assert_eq!(d.n_cols(), 4);
        assert_eq!(d.matrix().column(3).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(d.terms()[3].columns, 3..4);
    }

    #[test]
    fn contrast_orthogonality() {
        let c = DMatrix::from_column_slice(3, 2, &[-1.0, 0.5, 0.5, 0.0, -1.0, 1.0]);
        let f = FactorSpec::numbered("grp", 3).unwrap().with_contrasts(c).unwrap();
        assert!(f.is_orthogonal());
        let bad = DMatrix::from_column_slice(3, 2, &[-1.0, 0.5, 0.5, -1.0, 1.0, 0.0]);
        let f = FactorSpec::numbered("grp", 3).unwrap().with_contrasts(bad).unwrap();
        assert!(!f.is_orthogonal());
        let not_contrast = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!(FactorSpec::numbered("grp", 3).unwrap().with_contrasts(not_contrast).is_err());
    }

    #[test]
    fn aliased_columns_are_named() {
        let x = Variable::covariate("x", vec![1.0, 2.0, 3.0]);
        let z = Variable::covariate("z", vec![2.0, 4.0, 6.0]);
        let err = build_design(&[x, z], &[&["x"], &["z"]]).unwrap_err();
        assert!(err.to_string().contains('z'), "{err}");
    }
}
