//! Dense linear programming: problem description, interior-point solve, and a
//! brute-force vertex-enumeration oracle for small instances.
//!
//! This is the single numerical engine behind both recovery formulations.
//! The contract is tolerance-based: an `Optimal` solution is primal feasible
//! within `feas_tol` (absolute, per constraint) and its objective is within
//! `tol` (relative) of the true optimum.

mod ipm;
mod oracle;

pub use oracle::oracle_solve_small;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// minimize c'x  subject to  A_eq x = b_eq,  A_ub x <= b_ub,  lower <= x <= upper.
///
/// Bound entries may be infinite; every other entry must be finite.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: DVector<f64>,
    pub a_eq: DMatrix<f64>,
    pub b_eq: DVector<f64>,
    pub a_ub: DMatrix<f64>,
    pub b_ub: DVector<f64>,
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
}

impl LinearProgram {
    /// A program over `objective.len()` free variables with no constraints yet.
    pub fn new(objective: Vec<f64>) -> Self {
        let k = objective.len();
        LinearProgram {
            objective: DVector::from_vec(objective),
            a_eq: DMatrix::zeros(0, k),
            b_eq: DVector::zeros(0),
            a_ub: DMatrix::zeros(0, k),
            b_ub: DVector::zeros(0),
            lower: DVector::from_element(k, f64::NEG_INFINITY),
            upper: DVector::from_element(k, f64::INFINITY),
        }
    }

    pub fn with_eq(mut self, a: DMatrix<f64>, b: DVector<f64>) -> Self {
        self.a_eq = a;
        self.b_eq = b;
        self
    }

    pub fn with_ub(mut self, a: DMatrix<f64>, b: DVector<f64>) -> Self {
        self.a_ub = a;
        self.b_ub = b;
        self
    }

    pub fn with_lower_bound(mut self, var: usize, bound: f64) -> Self {
        self.lower[var] = bound;
        self
    }

    pub fn with_upper_bound(mut self, var: usize, bound: f64) -> Self {
        self.upper[var] = bound;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.num_vars();
        if k == 0 {
            return Err(Error::InvalidInput("LP has no variables".into()));
        }
        if self.a_eq.ncols() != k || self.a_ub.ncols() != k {
            return Err(Error::InvalidDimension(format!(
                "constraint matrices must have {k} columns (got eq {}, ub {})",
                self.a_eq.ncols(),
                self.a_ub.ncols()
            )));
        }
        if self.a_eq.nrows() != self.b_eq.len() {
            return Err(Error::InvalidDimension(format!(
                "a_eq has {} rows but b_eq has {}",
                self.a_eq.nrows(),
                self.b_eq.len()
            )));
        }
        if self.a_ub.nrows() != self.b_ub.len() {
            return Err(Error::InvalidDimension(format!(
                "a_ub has {} rows but b_ub has {}",
                self.a_ub.nrows(),
                self.b_ub.len()
            )));
        }
        if self.lower.len() != k || self.upper.len() != k {
            return Err(Error::InvalidDimension(
                "bound vectors must match variable count".into(),
            ));
        }
        let finite = |m: &DMatrix<f64>| m.iter().all(|v| v.is_finite());
        if !finite(&self.a_eq)
            || !finite(&self.a_ub)
            || !self.b_eq.iter().all(|v| v.is_finite())
            || !self.b_ub.iter().all(|v| v.is_finite())
            || !self.objective.iter().all(|v| v.is_finite())
        {
            return Err(Error::InvalidInput(
                "non-finite entry in LP data (bounds are the only entries allowed infinite)".into(),
            ));
        }
        if self.lower.iter().any(|v| v.is_nan()) || self.upper.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidInput("NaN variable bound".into()));
        }
        if self.lower.iter().zip(self.upper.iter()).any(|(l, u)| l > u) {
            return Err(Error::InvalidInput(
                "lower bound exceeds upper bound".into(),
            ));
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &DVector<f64>) -> f64 {
        self.objective.dot(x)
    }

    /// Largest absolute constraint violation of `x` over all constraint kinds.
    pub fn max_violation(&self, x: &DVector<f64>) -> f64 {
        let mut worst = 0.0f64;
        if self.a_eq.nrows() > 0 {
            let r = &self.a_eq * x - &self.b_eq;
            worst = worst.max(r.amax());
        }
        if self.a_ub.nrows() > 0 {
            let r = &self.a_ub * x - &self.b_ub;
            worst = r.iter().fold(worst, |w, v| w.max(*v));
        }
        for j in 0..self.num_vars() {
            if self.lower[j].is_finite() {
                worst = worst.max(self.lower[j] - x[j]);
            }
            if self.upper[j].is_finite() {
                worst = worst.max(x[j] - self.upper[j]);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

impl std::fmt::Display for LpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
            LpStatus::NumericalFailure => "numerical-failure",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for LpStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimal" => Ok(LpStatus::Optimal),
            "infeasible" => Ok(LpStatus::Infeasible),
            "unbounded" => Ok(LpStatus::Unbounded),
            "numerical-failure" => Ok(LpStatus::NumericalFailure),
            other => Err(Error::InvalidInput(format!("unknown status {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: DVector<f64>,
    /// Meaningful only when `status == Optimal`; NaN otherwise.
    pub objective_value: f64,
    pub status: LpStatus,
    pub iterations: usize,
    pub max_constraint_violation: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Relative convergence tolerance on primal/dual residuals and gap.
    pub tol: f64,
    /// Absolute per-constraint feasibility required of an Optimal answer.
    pub feas_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-9,
            feas_tol: 1e-6,
            max_iter: 500,
        }
    }
}

/// Solve with default options.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    solve_lp_with(lp, &SolverOptions::default())
}

pub fn solve_lp_with(lp: &LinearProgram, opts: &SolverOptions) -> Result<LpSolution> {
    lp.validate()?;
    Ok(ipm::solve(lp, opts))
}
