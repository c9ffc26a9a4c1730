//! Brute-force vertex enumeration for small bounded linear programs.
//!
//! Every vertex of the feasible polyhedron has at least k active
//! constraints (equality rows are always active). The oracle solves the
//! k-by-k system for every candidate active set, keeps the feasible
//! vertices, and returns the one with minimal objective. It shares no code
//! with the interior-point path, which is the point: it exists to check
//! the solver, only on instances whose feasible region is bounded.

use nalgebra::{DMatrix, DVector};

use super::{LinearProgram, LpSolution, LpStatus};
use crate::error::{Error, Result};

const MAX_VARS: usize = 10;
const MAX_ROWS: usize = 26;
const MAX_COMBOS: u128 = 3_000_000;

struct Row {
    coeffs: Vec<f64>,
    rhs: f64,
    equality: bool,
}

fn gather_rows(lp: &LinearProgram) -> Vec<Row> {
    let k = lp.num_vars();
    let mut rows = Vec::new();
    for r in 0..lp.a_eq.nrows() {
        rows.push(Row {
            coeffs: (0..k).map(|j| lp.a_eq[(r, j)]).collect(),
            rhs: lp.b_eq[r],
            equality: true,
        });
    }
    for r in 0..lp.a_ub.nrows() {
        rows.push(Row {
            coeffs: (0..k).map(|j| lp.a_ub[(r, j)]).collect(),
            rhs: lp.b_ub[r],
            equality: false,
        });
    }
    for j in 0..k {
        if lp.upper[j].is_finite() {
            let mut coeffs = vec![0.0; k];
            coeffs[j] = 1.0;
            rows.push(Row {
                coeffs,
                rhs: lp.upper[j],
                equality: false,
            });
        }
        if lp.lower[j].is_finite() {
            let mut coeffs = vec![0.0; k];
            coeffs[j] = -1.0;
            rows.push(Row {
                coeffs,
                rhs: -lp.lower[j],
                equality: false,
            });
        }
    }
    // Duplicated rows do not change the feasible set but produce singular
    // active sets for every completion containing both copies; drop them.
    let mut deduped: Vec<Row> = Vec::new();
    for row in rows {
        let dup = deduped
            .iter()
            .any(|r| r.equality == row.equality && r.rhs == row.rhs && r.coeffs == row.coeffs);
        if !dup {
            deduped.push(row);
        }
    }
    deduped
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..r.min(n - r) {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Advance `choice` to the next r-combination of 0..n in lexicographic
/// order; false when exhausted.
fn next_combination(choice: &mut [usize], n: usize) -> bool {
    let r = choice.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if choice[i] < n - (r - i) {
            choice[i] += 1;
            for j in (i + 1)..r {
                choice[j] = choice[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn feasible(rows: &[Row], x: &DVector<f64>) -> bool {
    rows.iter().all(|row| {
        let lhs: f64 = row.coeffs.iter().zip(x.iter()).map(|(a, v)| a * v).sum();
        let tol = 1e-8 * (1.0 + row.rhs.abs());
        if row.equality {
            (lhs - row.rhs).abs() <= tol
        } else {
            lhs <= row.rhs + tol
        }
    })
}

/// Exact reference solve by vertex enumeration. Valid only when the feasible
/// region is bounded; with an unbounded region the reported minimum over
/// vertices is not the LP infimum.
pub fn oracle_solve_small(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let k = lp.num_vars();
    if k > MAX_VARS {
        return Err(Error::UnsupportedSize(format!(
            "oracle handles at most {MAX_VARS} variables, got {k}"
        )));
    }
    let rows = gather_rows(lp);
    if rows.len() > MAX_ROWS {
        return Err(Error::UnsupportedSize(format!(
            "oracle handles at most {MAX_ROWS} constraint rows, got {}",
            rows.len()
        )));
    }
    let eq_count = rows.iter().filter(|r| r.equality).count();
    if eq_count > k {
        return Err(Error::UnsupportedSize(format!(
            "{eq_count} independent equality rows exceed {k} variables"
        )));
    }
    let ineq: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i].equality).collect();
    let need = k - eq_count;
    if binomial(ineq.len(), need) > MAX_COMBOS {
        return Err(Error::UnsupportedSize(
            "too many active-set combinations".into(),
        ));
    }
    if ineq.len() < need {
        return Err(Error::UnsupportedSize(
            "fewer candidate active constraints than variables; the region has no vertex".into(),
        ));
    }

    let eq_rows: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].equality).collect();
    let mut best: Option<(f64, DVector<f64>)> = None;
    let mut combos_checked = 0usize;

    let mut choice: Vec<usize> = (0..need).collect();
    loop {
        combos_checked += 1;
        let mut m = DMatrix::zeros(k, k);
        let mut rhs = DVector::zeros(k);
        let active = eq_rows
            .iter()
            .copied()
            .chain(choice.iter().map(|&c| ineq[c]));
        for (r, row_idx) in active.enumerate() {
            for j in 0..k {
                m[(r, j)] = rows[row_idx].coeffs[j];
            }
            rhs[r] = rows[row_idx].rhs;
        }
        let lu = m.full_piv_lu();
        if let Some(x) = lu.solve(&rhs) {
            if x.iter().all(|v| v.is_finite()) && feasible(&rows, &x) {
                let obj = lp.objective_value(&x);
                if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                    best = Some((obj, x));
                }
            }
        }
        if !next_combination(&mut choice, ineq.len()) {
            break;
        }
    }

    match best {
        Some((obj, x)) => {
            let violation = lp.max_violation(&x);
            Ok(LpSolution {
                x,
                objective_value: obj,
                status: LpStatus::Optimal,
                iterations: combos_checked,
                max_constraint_violation: violation,
            })
        }
        None => Ok(LpSolution {
            x: DVector::zeros(k),
            objective_value: f64::NAN,
            status: LpStatus::Infeasible,
            iterations: combos_checked,
            max_constraint_violation: f64::NAN,
        }),
    }
}
