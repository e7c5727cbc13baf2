//! Design-matrix construction with rank checking.

use super::formula::{Formula, Term};
use super::frame::Frame;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// One estimable equation: outcome vector plus named regressor matrix.
#[derive(Debug, Clone)]
pub struct Equation {
    pub outcome_name: String,
    pub outcome: DVector<f64>,
    pub regressor_names: Vec<String>,
    pub x: DMatrix<f64>,
    pub has_intercept: bool,
}

impl Equation {
    pub fn n(&self) -> usize {
        self.outcome.len()
    }

    pub fn k(&self) -> usize {
        self.x.ncols()
    }

    /// Regressor column by name, exactly as stored.
    pub fn column(&self, name: &str) -> Option<DVector<f64>> {
        self.regressor_names
            .iter()
            .position(|n| n == name)
            .map(|i| self.x.column(i).into_owned())
    }
}

/// One- or two-equation dataset ready for estimation.
#[derive(Debug, Clone)]
pub struct Dataset {
    equations: Vec<Equation>,
}

impl Dataset {
    pub fn single(eq: Equation) -> Result<Self> {
        Self::build(vec![eq])
    }

    pub fn pair(eq1: Equation, eq2: Equation) -> Result<Self> {
        Self::build(vec![eq1, eq2])
    }

    fn build(equations: Vec<Equation>) -> Result<Self> {
        let n = equations[0].n();
        if n == 0 {
            return Err(Error::InvalidParameter("empty dataset".into()));
        }
        for eq in &equations {
            if eq.n() != n {
                return Err(Error::DimensionMismatch {
                    what: "equation length",
                    expected: n,
                    got: eq.n(),
                });
            }
            if eq.x.nrows() != n {
                return Err(Error::DimensionMismatch {
                    what: "design rows",
                    expected: n,
                    got: eq.x.nrows(),
                });
            }
        }
        Ok(Self { equations })
    }

    pub fn n(&self) -> usize {
        self.equations[0].n()
    }

    pub fn n_equations(&self) -> usize {
        self.equations.len()
    }

    pub fn equation(&self, i: usize) -> &Equation {
        &self.equations[i]
    }
}

/// Flags columns that are (numerically) linear combinations of earlier
/// ones, by modified Gram-Schmidt with re-orthogonalization.
fn dependent_columns(x: &DMatrix<f64>, names: &[String]) -> Vec<String> {
    let tol = 1e-8;
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut dependent = Vec::new();
    for j in 0..x.ncols() {
        let original = x.column(j).into_owned();
        let scale = original.norm();
        let mut v = original;
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dot(&v);
                v -= b * proj;
            }
        }
        if v.norm() <= tol * scale.max(f64::MIN_POSITIVE) {
            dependent.push(names[j].clone());
        } else {
            basis.push(&v / v.norm());
        }
    }
    dependent
}

/// Builds an [`Equation`] from named columns per the formula: regressors
/// in formula order, interaction columns constructed on the fly, and an
/// intercept appended last unless suppressed.
pub fn build_design(frame: &Frame, formula: &Formula) -> Result<Equation> {
    let n = frame.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty input frame".into()));
    }
    let outcome = frame
        .column(&formula.outcome)
        .ok_or_else(|| Error::UnknownVariable(formula.outcome.clone()))?;

    let mut names = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for term in &formula.terms {
        let col = match term {
            Term::Var(v) => frame
                .column(v)
                .ok_or_else(|| Error::UnknownVariable(v.clone()))?
                .to_vec(),
            Term::Interaction(a, b) => {
                let ca = frame
                    .column(a)
                    .ok_or_else(|| Error::UnknownVariable(a.clone()))?;
                let cb = frame
                    .column(b)
                    .ok_or_else(|| Error::UnknownVariable(b.clone()))?;
                ca.iter().zip(cb.iter()).map(|(x, y)| x * y).collect()
            }
        };
        names.push(term.column_name());
        columns.push(col);
    }
    if formula.intercept {
        names.push("intercept".into());
        columns.push(vec![1.0; n]);
    }

    for (name, col) in names.iter().zip(columns.iter()) {
        if col.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidParameter(format!(
                "column `{name}` is identically zero"
            )));
        }
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "column `{name}` contains non-finite values"
            )));
        }
    }

    let k = names.len();
    let x = DMatrix::from_fn(n, k, |i, j| columns[j][i]);
    let dependent = dependent_columns(&x, &names);
    if !dependent.is_empty() {
        return Err(Error::RankDeficient(dependent));
    }

    Ok(Equation {
        outcome_name: formula.outcome.clone(),
        outcome: DVector::from_vec(outcome.to_vec()),
        regressor_names: names,
        x,
        has_intercept: formula.intercept,
    })
}
