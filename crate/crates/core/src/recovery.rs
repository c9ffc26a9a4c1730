//! Signal recovery from compressive measurements.
//!
//! Both formulations optimize over the DCT coefficient vector s, with
//! A = Phi Psi' mapping coefficients to measurements:
//!
//! * Basis pursuit (BP): minimize ||s||_1 subject to A s = b, via the
//!   standard split `minimize sum(t) s.t. -t <= s <= t, A s = b`.
//! * Structure-constrained basis pursuit (SCBP): minimize ||s||_1 + alpha
//!   subject to ||A s - b||_1 <= epsilon and alpha*beta_l <= s <= alpha*beta_u
//!   with the scale alpha >= 0 jointly optimized.
//!
//! LP variable ordering is stable and documented: [s (n), t (n)] for BP and
//! [s (n), t (n), u (m), alpha (1)] for SCBP, where u majorizes |A s - b|.

use nalgebra::{DMatrix, DVector};

use crate::block::SignalBlock;
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus};
use crate::sensing::{MeasurementVector, SensingMatrix};
use crate::structure::{envelope_for_length, StructureEnvelope};
use crate::transform::{dct_basis, dct_inverse, CoefficientVector};

#[derive(Debug, Clone, Copy)]
pub struct SolveStats {
    pub iterations: usize,
    pub max_constraint_violation: f64,
}

/// Recovered coefficients and reconstruction, plus solver diagnostics.
/// On any non-`Optimal` status the vectors hold the solver's last iterate
/// and must not be treated as a recovery.
#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub s_hat: CoefficientVector,
    pub x_hat: SignalBlock,
    pub alpha: Option<f64>,
    pub status: LpStatus,
    /// ||A s_hat - b||_1 recomputed from the returned coefficients.
    pub residual_l1: f64,
    pub solve_stats: SolveStats,
}

fn sensing_in_coefficient_domain(phi: &SensingMatrix) -> DMatrix<f64> {
    phi.rows() * dct_basis(phi.n).transpose()
}

fn check_measurement(phi: &SensingMatrix, b: &MeasurementVector) -> Result<()> {
    if b.len() != phi.m || b.source_n != phi.n {
        return Err(Error::InvalidDimension(format!(
            "measurement ({} values from n={}) does not match sensing matrix ({}x{})",
            b.len(),
            b.source_n,
            phi.m,
            phi.n
        )));
    }
    Ok(())
}

/// LP for BP: variables [s (n), t (n)], 2n inequality rows, m equality rows.
pub fn build_bp_lp(phi: &SensingMatrix, b: &MeasurementVector) -> Result<LinearProgram> {
    check_measurement(phi, b)?;
    let (n, m) = (phi.n, phi.m);
    let k = 2 * n;

    let mut objective = vec![0.0; k];
    objective[n..].fill(1.0);

    let mut a_ub = DMatrix::zeros(2 * n, k);
    for i in 0..n {
        a_ub[(i, i)] = 1.0; // s_i - t_i <= 0
        a_ub[(i, n + i)] = -1.0;
        a_ub[(n + i, i)] = -1.0; // -s_i - t_i <= 0
        a_ub[(n + i, n + i)] = -1.0;
    }
    let b_ub = DVector::zeros(2 * n);

    let a = sensing_in_coefficient_domain(phi);
    let mut a_eq = DMatrix::zeros(m, k);
    a_eq.view_mut((0, 0), (m, n)).copy_from(&a);

    Ok(LinearProgram::new(objective)
        .with_ub(a_ub, b_ub)
        .with_eq(a_eq, b.values.clone()))
}

/// LP for SCBP: variables [s (n), t (n), u (m), alpha], inequality rows
/// ordered [±t (2n), As - u <= b (m), -As - u <= -b (m), sum(u) <= eps (1),
/// envelope (2n)], alpha bounded below by zero.
pub fn build_scbp_lp(
    phi: &SensingMatrix,
    b: &MeasurementVector,
    env: &StructureEnvelope,
    epsilon: f64,
) -> Result<LinearProgram> {
    build_scbp_lp_weighted(phi, b, env, epsilon, 1.0)
}

/// SCBP LP with an explicit weight on alpha in the objective. The weight
/// defaults to 1 everywhere in the recovery pipeline.
pub fn build_scbp_lp_weighted(
    phi: &SensingMatrix,
    b: &MeasurementVector,
    env: &StructureEnvelope,
    epsilon: f64,
    alpha_weight: f64,
) -> Result<LinearProgram> {
    check_measurement(phi, b)?;
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be a positive real, got {epsilon}"
        )));
    }
    if !alpha_weight.is_finite() || alpha_weight < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "alpha weight must be nonnegative, got {alpha_weight}"
        )));
    }
    let (n, m) = (phi.n, phi.m);
    let (beta_l, beta_u) = envelope_for_length(env, n)?;
    let k = 2 * n + m + 1;
    let alpha_col = 2 * n + m;

    let mut objective = vec![0.0; k];
    objective[n..2 * n].fill(1.0);
    objective[alpha_col] = alpha_weight;

    let rows = 4 * n + 2 * m + 1;
    let mut a_ub = DMatrix::zeros(rows, k);
    let mut b_ub = DVector::zeros(rows);

    for i in 0..n {
        a_ub[(i, i)] = 1.0; // s_i - t_i <= 0
        a_ub[(i, n + i)] = -1.0;
        a_ub[(n + i, i)] = -1.0; // -s_i - t_i <= 0
        a_ub[(n + i, n + i)] = -1.0;
    }

    let a = sensing_in_coefficient_domain(phi);
    for r in 0..m {
        for j in 0..n {
            a_ub[(2 * n + r, j)] = a[(r, j)]; // A s - u <= b
            a_ub[(2 * n + m + r, j)] = -a[(r, j)]; // -A s - u <= -b
        }
        a_ub[(2 * n + r, 2 * n + r)] = -1.0;
        a_ub[(2 * n + m + r, 2 * n + r)] = -1.0;
        b_ub[2 * n + r] = b.values[r];
        b_ub[2 * n + m + r] = -b.values[r];
    }

    let eps_row = 2 * n + 2 * m;
    for r in 0..m {
        a_ub[(eps_row, 2 * n + r)] = 1.0; // sum(u) <= epsilon
    }
    b_ub[eps_row] = epsilon;

    for i in 0..n {
        a_ub[(eps_row + 1 + i, i)] = 1.0; // s_i - beta_u_i * alpha <= 0
        a_ub[(eps_row + 1 + i, alpha_col)] = -beta_u[i];
        a_ub[(eps_row + 1 + n + i, i)] = -1.0; // -s_i + beta_l_i * alpha <= 0
        a_ub[(eps_row + 1 + n + i, alpha_col)] = beta_l[i];
    }

    Ok(LinearProgram::new(objective)
        .with_ub(a_ub, b_ub)
        .with_lower_bound(alpha_col, 0.0))
}

fn residual_l1(a: &DMatrix<f64>, s: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a * s - b).iter().map(|v| v.abs()).sum()
}

fn assemble(
    phi: &SensingMatrix,
    b: &MeasurementVector,
    solution: crate::lp::LpSolution,
    alpha_col: Option<usize>,
) -> Result<RecoveryResult> {
    let n = phi.n;
    let s: Vec<f64> = solution.x.as_slice()[..n].to_vec();
    let s_hat = CoefficientVector::new(s);
    let x_hat = if solution.status == LpStatus::Optimal {
        dct_inverse(&s_hat)?
    } else {
        SignalBlock::new(vec![0.0; n])
    };
    let a = sensing_in_coefficient_domain(phi);
    let res = residual_l1(&a, &DVector::from_column_slice(&s_hat.values), &b.values);
    Ok(RecoveryResult {
        s_hat,
        x_hat,
        alpha: alpha_col.map(|c| solution.x[c]),
        status: solution.status,
        residual_l1: res,
        solve_stats: SolveStats {
            iterations: solution.iterations,
            max_constraint_violation: solution.max_constraint_violation,
        },
    })
}

/// Recover by vanilla basis pursuit. A non-optimal solver status is carried
/// in the result rather than silently returning zeros.
pub fn bp_recover(phi: &SensingMatrix, b: &MeasurementVector) -> Result<RecoveryResult> {
    let lp = build_bp_lp(phi, b)?;
    let solution = solve_lp(&lp)?;
    let mut out = assemble(phi, b, solution, None)?;
    if out.status == LpStatus::Optimal {
        // Recheck the equality constraints from the raw coefficients.
        let a = sensing_in_coefficient_domain(phi);
        let s = DVector::from_column_slice(&out.s_hat.values);
        let linf = (a * s - &b.values).amax();
        if linf > 1e-6 {
            out.status = LpStatus::NumericalFailure;
        }
    }
    Ok(out)
}

/// Recover by structure-constrained basis pursuit with the given envelope
/// and residual budget epsilon. Infeasible instances (bounds exclude every
/// epsilon-consistent point) surface as a recovery-failed result.
pub fn scbp_recover(
    phi: &SensingMatrix,
    b: &MeasurementVector,
    env: &StructureEnvelope,
    epsilon: f64,
) -> Result<RecoveryResult> {
    scbp_recover_weighted(phi, b, env, epsilon, 1.0)
}

pub fn scbp_recover_weighted(
    phi: &SensingMatrix,
    b: &MeasurementVector,
    env: &StructureEnvelope,
    epsilon: f64,
    alpha_weight: f64,
) -> Result<RecoveryResult> {
    let lp = build_scbp_lp_weighted(phi, b, env, epsilon, alpha_weight)?;
    let solution = solve_lp(&lp)?;
    let alpha_col = 2 * phi.n + phi.m;
    let mut out = assemble(phi, b, solution, Some(alpha_col))?;
    if out.status == LpStatus::Optimal {
        // Recheck the residual budget and the envelope box from raw outputs.
        let alpha = out.alpha.unwrap_or(0.0);
        let (beta_l, beta_u) = envelope_for_length(env, phi.n)?;
        let in_envelope = out
            .s_hat
            .values
            .iter()
            .enumerate()
            .all(|(i, &v)| v >= alpha * beta_l[i] - 1e-6 && v <= alpha * beta_u[i] + 1e-6);
        if out.residual_l1 > epsilon + 1e-6 || !in_envelope || alpha < -1e-9 {
            out.status = LpStatus::NumericalFailure;
        }
    }
    Ok(out)
}
