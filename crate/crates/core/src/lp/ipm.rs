//! Homogeneous self-dual interior-point method with Mehrotra
//! predictor-corrector steps.
//!
//! The program is brought to the conic form
//!
//! ```text
//!   minimize    c'x
//!   subject to  A x = b,   G x + s = h,   s >= 0,
//! ```
//!
//! where G collects the user's inequality rows and the finite variable
//! bounds. The homogeneous embedding adds the scaling pair (tau, kappa):
//! at convergence tau > 0 yields an optimal point, while kappa > 0 yields
//! a Farkas-type certificate of primal infeasibility or unboundedness.
//!
//! Each Newton step reduces, after eliminating (s, z, kappa), to a
//! system in (dx, dy, dtau) built around
//!
//! ```text
//!   [ H   A' ]        H = G' inv(W) G,   W = diag(s ./ z),
//!   [ A   0  ]
//! ```
//!
//! solved by a Cholesky factorization of H and a Schur complement on the
//! equality block. G rows are stored sparsely, so accumulating H costs
//! sum of nnz(row)^2 rather than q*k^2; the recovery LPs mix a few dense
//! rows with many two-entry rows and this is where the solver spends its
//! time.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{LinearProgram, LpSolution, LpStatus, SolverOptions};

struct SparseRow {
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl SparseRow {
    fn dot(&self, v: &DVector<f64>) -> f64 {
        self.idx
            .iter()
            .zip(&self.val)
            .map(|(&j, &a)| a * v[j])
            .sum()
    }
}

struct Standard {
    c: DVector<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    g: Vec<SparseRow>,
    h: DVector<f64>,
    k: usize,
    p: usize,
    q: usize,
}

impl Standard {
    fn from_lp(lp: &LinearProgram) -> Standard {
        let k = lp.num_vars();
        let mut g = Vec::new();
        let mut h = Vec::new();
        for r in 0..lp.a_ub.nrows() {
            let mut idx = Vec::new();
            let mut val = Vec::new();
            for j in 0..k {
                let v = lp.a_ub[(r, j)];
                if v != 0.0 {
                    idx.push(j);
                    val.push(v);
                }
            }
            g.push(SparseRow { idx, val });
            h.push(lp.b_ub[r]);
        }
        for j in 0..k {
            if lp.upper[j].is_finite() {
                g.push(SparseRow {
                    idx: vec![j],
                    val: vec![1.0],
                });
                h.push(lp.upper[j]);
            }
            if lp.lower[j].is_finite() {
                g.push(SparseRow {
                    idx: vec![j],
                    val: vec![-1.0],
                });
                h.push(-lp.lower[j]);
            }
        }
        let p = lp.a_eq.nrows();
        let q = g.len();
        Standard {
            c: lp.objective.clone(),
            a: lp.a_eq.clone(),
            b: lp.b_eq.clone(),
            g,
            h: DVector::from_vec(h),
            k,
            p,
            q,
        }
    }

    fn g_mul(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.q, |i, _| self.g[i].dot(v))
    }

    fn gt_mul(&self, z: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.k);
        for (row, &zi) in self.g.iter().zip(z.iter()) {
            if zi != 0.0 {
                for (&j, &a) in row.idx.iter().zip(&row.val) {
                    out[j] += a * zi;
                }
            }
        }
        out
    }
}

struct Point {
    x: DVector<f64>,
    y: DVector<f64>,
    z: DVector<f64>,
    s: DVector<f64>,
    tau: f64,
    kappa: f64,
}

struct Direction {
    dx: DVector<f64>,
    dy: DVector<f64>,
    dz: DVector<f64>,
    ds: DVector<f64>,
    dtau: f64,
    dkappa: f64,
}

/// Factorization of the reduced KKT matrix for one iteration.
struct KktSolver<'a> {
    std: &'a Standard,
    w_inv: DVector<f64>,
    chol_h: Cholesky<f64, Dyn>,
    /// H^{-1} A' (k x p), empty when there are no equality rows.
    hinv_at: DMatrix<f64>,
    chol_schur: Option<Cholesky<f64, Dyn>>,
}

fn chol_with_bumping(mut m: DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let n = m.nrows();
    let max_diag = (0..n).fold(0.0f64, |acc, i| acc.max(m[(i, i)]));
    let mut delta = 0.0f64;
    loop {
        let trial = if delta == 0.0 {
            m.clone()
        } else {
            for i in 0..n {
                m[(i, i)] += delta;
            }
            m.clone()
        };
        match Cholesky::new(trial) {
            Some(c) => return Some(c),
            None => {
                let next = if delta == 0.0 {
                    1e-12 * (1.0 + max_diag)
                } else {
                    delta * 100.0
                };
                if next > 1e-2 * (1.0 + max_diag) {
                    return None;
                }
                delta = next;
            }
        }
    }
}

impl<'a> KktSolver<'a> {
    fn factor(std: &'a Standard, w_inv: DVector<f64>) -> Option<KktSolver<'a>> {
        let k = std.k;
        let mut h = DMatrix::zeros(k, k);
        {
            // Accumulate the lower triangle column-by-column: entry (ib, ia)
            // with ib >= ia sits at offset ia*k + ib in column-major storage,
            // so the inner loop is a contiguous stream.
            let hs = h.as_mut_slice();
            for (row, &wi) in std.g.iter().zip(w_inv.iter()) {
                let nnz = row.idx.len();
                for ai in 0..nnz {
                    let wa = wi * row.val[ai];
                    let col_base = row.idx[ai] * k;
                    for bi in ai..nnz {
                        hs[col_base + row.idx[bi]] += wa * row.val[bi];
                    }
                }
            }
        }
        for i in 0..k {
            for j in (i + 1)..k {
                h[(i, j)] = h[(j, i)];
            }
        }
        let chol_h = chol_with_bumping(h)?;
        let (hinv_at, chol_schur) = if std.p > 0 {
            let mut hinv_at = std.a.transpose();
            chol_h.solve_mut(&mut hinv_at);
            let schur = &std.a * &hinv_at;
            let chol_s = chol_with_bumping(schur)?;
            (hinv_at, Some(chol_s))
        } else {
            (DMatrix::zeros(k, 0), None)
        };
        Some(KktSolver {
            std,
            w_inv,
            chol_h,
            hinv_at,
            chol_schur,
        })
    }

    /// Exact H v through the sparse G rows (used for refinement).
    fn h_mul(&self, v: &DVector<f64>) -> DVector<f64> {
        let gv = self.std.g_mul(v);
        self.std.gt_mul(&gv.component_mul(&self.w_inv))
    }

    /// Solve [H A'; A 0] [dx; dy] = [f; g] with one refinement pass against
    /// the unregularized operator.
    fn solve_kkt(&self, f: &DVector<f64>, g: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let (mut dx, mut dy) = self.solve_once(f, g);
        let rf = if self.std.p > 0 {
            f - self.h_mul(&dx) - self.std.a.transpose() * &dy
        } else {
            f - self.h_mul(&dx)
        };
        let rg = if self.std.p > 0 {
            g - &self.std.a * &dx
        } else {
            DVector::zeros(0)
        };
        let (ex, ey) = self.solve_once(&rf, &rg);
        dx += ex;
        dy += ey;
        (dx, dy)
    }

    fn solve_once(&self, f: &DVector<f64>, g: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        if self.std.p == 0 {
            let mut dx = f.clone();
            self.chol_h.solve_mut(&mut dx);
            return (dx, DVector::zeros(0));
        }
        let mut hinv_f = f.clone();
        self.chol_h.solve_mut(&mut hinv_f);
        let mut dy = &self.std.a * &hinv_f - g;
        self.chol_schur.as_ref().unwrap().solve_mut(&mut dy);
        let dx = hinv_f - &self.hinv_at * &dy;
        (dx, dy)
    }
}

struct Residuals {
    rd: DVector<f64>,
    rp: DVector<f64>,
    rg: DVector<f64>,
    rt: f64,
}

fn residuals(std: &Standard, pt: &Point) -> Residuals {
    let rd = if std.p > 0 {
        std.a.transpose() * &pt.y + std.gt_mul(&pt.z) + &std.c * pt.tau
    } else {
        std.gt_mul(&pt.z) + &std.c * pt.tau
    };
    let rp = &std.a * &pt.x - &std.b * pt.tau;
    let rg = std.g_mul(&pt.x) + &pt.s - &std.h * pt.tau;
    let rt = std.c.dot(&pt.x) + std.b.dot(&pt.y) + std.h.dot(&pt.z) + pt.kappa;
    Residuals { rd, rp, rg, rt }
}

fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Largest alpha in (0, cap] keeping v + alpha dv >= 0 componentwise.
fn max_step(v: &DVector<f64>, dv: &DVector<f64>, cap: f64) -> f64 {
    let mut alpha = cap;
    for (vi, di) in v.iter().zip(dv.iter()) {
        if *di < 0.0 {
            alpha = alpha.min(-vi / di);
        }
    }
    alpha
}

/// Best scaled iterate seen so far, kept as a fallback for near-converged
/// runs that stall before hitting the target tolerance.
struct BestPoint {
    metric: f64,
    x: DVector<f64>,
    objective: f64,
}

pub(super) fn solve(lp: &LinearProgram, opts: &SolverOptions) -> LpSolution {
    let std = Standard::from_lp(lp);
    let (k, q) = (std.k, std.q);

    let mut pt = Point {
        x: DVector::zeros(k),
        y: DVector::zeros(std.p),
        z: DVector::from_element(q, 1.0),
        s: DVector::from_element(q, 1.0),
        tau: 1.0,
        kappa: 1.0,
    };

    let bnorm = 1.0 + inf_norm(&std.b);
    let hnorm = 1.0 + inf_norm(&std.h);
    let cnorm = 1.0 + inf_norm(&std.c);
    let degree = (q + 1) as f64;

    let mut best: Option<BestPoint> = None;
    let mut best_mu = f64::INFINITY;
    let mut stall = 0usize;

    // Accept a stalled run only if it already reached a tolerance still
    // comfortably inside the feasibility contract.
    let tol_accept = (opts.tol * 100.0).min(1e-7);

    let finish_failure = |best: &Option<BestPoint>, iterations: usize| -> LpSolution {
        if let Some(bp) = best {
            if bp.metric <= tol_accept {
                let violation = lp.max_violation(&bp.x);
                if violation <= opts.feas_tol {
                    return LpSolution {
                        x: bp.x.clone(),
                        objective_value: bp.objective,
                        status: LpStatus::Optimal,
                        iterations,
                        max_constraint_violation: violation,
                    };
                }
            }
            return LpSolution {
                x: bp.x.clone(),
                objective_value: f64::NAN,
                status: LpStatus::NumericalFailure,
                iterations,
                max_constraint_violation: lp.max_violation(&bp.x),
            };
        }
        LpSolution {
            x: DVector::zeros(k),
            objective_value: f64::NAN,
            status: LpStatus::NumericalFailure,
            iterations,
            max_constraint_violation: f64::NAN,
        }
    };

    for iter in 0..opts.max_iter {
        let res = residuals(&std, &pt);
        let mu = (pt.s.dot(&pt.z) + pt.tau * pt.kappa) / degree;

        // Convergence metrics of the scaled point.
        let xs = &pt.x / pt.tau;
        let pres_eq = if std.p > 0 {
            inf_norm(&(&std.a * &xs - &std.b)) / bnorm
        } else {
            0.0
        };
        let pres_in = {
            let r = std.g_mul(&xs) + &pt.s / pt.tau - &std.h;
            inf_norm(&r) / hnorm
        };
        let dres = {
            let ys = &pt.y / pt.tau;
            let zs = &pt.z / pt.tau;
            let r = if std.p > 0 {
                std.a.transpose() * ys + std.gt_mul(&zs) + &std.c
            } else {
                std.gt_mul(&zs) + &std.c
            };
            inf_norm(&r) / cnorm
        };
        let pobj = std.c.dot(&xs);
        let dobj = -(std.b.dot(&pt.y) + std.h.dot(&pt.z)) / pt.tau;
        let relgap = (pobj - dobj).abs() / (1.0 + pobj.abs().max(dobj.abs()));
        let metric = pres_eq.max(pres_in).max(dres).max(relgap);

        if best.as_ref().is_none_or(|b| metric < b.metric) {
            best = Some(BestPoint {
                metric,
                x: xs.clone(),
                objective: pobj,
            });
        }

        if metric <= opts.tol {
            let violation = lp.max_violation(&xs);
            let status = if violation <= opts.feas_tol {
                LpStatus::Optimal
            } else {
                LpStatus::NumericalFailure
            };
            return LpSolution {
                x: xs,
                objective_value: pobj,
                status,
                iterations: iter,
                max_constraint_violation: violation,
            };
        }

        // Farkas-type certificate checks on the unscaled iterate.
        let theta = -(std.b.dot(&pt.y) + std.h.dot(&pt.z));
        if theta > 0.0 {
            let r = if std.p > 0 {
                std.a.transpose() * &pt.y + std.gt_mul(&pt.z)
            } else {
                std.gt_mul(&pt.z)
            };
            if inf_norm(&r) * hnorm.max(bnorm) <= 1e-9 * theta {
                return LpSolution {
                    x: DVector::zeros(k),
                    objective_value: f64::NAN,
                    status: LpStatus::Infeasible,
                    iterations: iter,
                    max_constraint_violation: f64::NAN,
                };
            }
        }
        let omega = -std.c.dot(&pt.x);
        if omega > 0.0 {
            let ray_eq = if std.p > 0 {
                inf_norm(&(&std.a * &pt.x))
            } else {
                0.0
            };
            let ray_in = std.g_mul(&pt.x).iter().fold(0.0f64, |m, v| m.max(*v));
            if ray_eq.max(ray_in) * cnorm <= 1e-9 * omega {
                return LpSolution {
                    x: DVector::zeros(k),
                    objective_value: f64::NAN,
                    status: LpStatus::Unbounded,
                    iterations: iter,
                    max_constraint_violation: f64::NAN,
                };
            }
        }
        // tau collapsed without a clean certificate: classify by the sign
        // pattern rather than looping to the iteration cap.
        if pt.tau <= 1e-12 * pt.kappa.max(1.0) {
            let status = if theta > 0.0 && omega <= 0.0 {
                LpStatus::Infeasible
            } else if omega > 0.0 && theta <= 0.0 {
                LpStatus::Unbounded
            } else {
                LpStatus::NumericalFailure
            };
            return LpSolution {
                x: DVector::zeros(k),
                objective_value: f64::NAN,
                status,
                iterations: iter,
                max_constraint_violation: f64::NAN,
            };
        }

        if mu < best_mu * 0.999 {
            best_mu = mu;
            stall = 0;
        } else {
            stall += 1;
            if stall > 30 {
                return finish_failure(&best, iter);
            }
        }

        let w_inv = pt.z.component_div(&pt.s);
        let kkt = match KktSolver::factor(&std, w_inv) {
            Some(kkt) => kkt,
            None => return finish_failure(&best, iter),
        };

        // Static column: K [dx2; dy2] = [G' inv(W) h - c; b].
        let f2 = std.gt_mul(&std.h.component_mul(&kkt.w_inv)) - &std.c;
        let (dx2, dy2) = kkt.solve_kkt(&f2, &std.b);
        let dz2 = (std.g_mul(&dx2) - &std.h).component_mul(&kkt.w_inv);
        let denom = std.c.dot(&dx2) + std.b.dot(&dy2) + std.h.dot(&dz2) - pt.kappa / pt.tau;

        let newton =
            |gamma: f64, corr_sz: Option<&DVector<f64>>, corr_tk: f64| -> Option<Direction> {
                let eta = 1.0 - gamma;
                let mut rhs_sz = DVector::from_fn(q, |i, _| -pt.s[i] * pt.z[i] + gamma * mu);
                if let Some(c) = corr_sz {
                    rhs_sz -= c;
                }
                let rhs_tk = -pt.tau * pt.kappa + gamma * mu - corr_tk;

                let zinv_rhs = DVector::from_fn(q, |i, _| rhs_sz[i] / pt.z[i]);
                let rg_bar = &res.rg * (-eta);
                let f1 =
                    &res.rd * (-eta) - std.gt_mul(&(&zinv_rhs - &rg_bar).component_mul(&kkt.w_inv));
                let g1 = &res.rp * (-eta);
                let (dx1, dy1) = kkt.solve_kkt(&f1, &g1);
                let dz1 = (std.g_mul(&dx1) + &zinv_rhs - &rg_bar).component_mul(&kkt.w_inv);

                if denom.abs() < 1e-300 {
                    return None;
                }
                let numer = -eta * res.rt
                    - std.c.dot(&dx1)
                    - std.b.dot(&dy1)
                    - std.h.dot(&dz1)
                    - rhs_tk / pt.tau;
                let dtau = numer / denom;
                let dx = &dx1 + &dx2 * dtau;
                let dy = &dy1 + &dy2 * dtau;
                let dz = &dz1 + &dz2 * dtau;
                let ds = DVector::from_fn(q, |i, _| (rhs_sz[i] - pt.s[i] * dz[i]) / pt.z[i]);
                let dkappa = (rhs_tk - pt.kappa * dtau) / pt.tau;
                if dx.iter().any(|v| !v.is_finite())
                    || dz.iter().any(|v| !v.is_finite())
                    || !dtau.is_finite()
                    || !dkappa.is_finite()
                {
                    return None;
                }
                Some(Direction {
                    dx,
                    dy,
                    dz,
                    ds,
                    dtau,
                    dkappa,
                })
            };

        let step_of = |d: &Direction| -> f64 {
            let mut alpha = max_step(&pt.s, &d.ds, 1.0);
            alpha = alpha.min(max_step(&pt.z, &d.dz, 1.0));
            if d.dtau < 0.0 {
                alpha = alpha.min(-pt.tau / d.dtau);
            }
            if d.dkappa < 0.0 {
                alpha = alpha.min(-pt.kappa / d.dkappa);
            }
            alpha
        };

        // Predictor.
        let aff = match newton(0.0, None, 0.0) {
            Some(d) => d,
            None => return finish_failure(&best, iter),
        };
        let alpha_aff = step_of(&aff);
        let mu_aff = {
            let s = &pt.s + &aff.ds * alpha_aff;
            let z = &pt.z + &aff.dz * alpha_aff;
            let tau = pt.tau + alpha_aff * aff.dtau;
            let kappa = pt.kappa + alpha_aff * aff.dkappa;
            (s.dot(&z) + tau * kappa) / degree
        };
        let gamma = ((mu_aff / mu).powi(3)).clamp(0.0, 1.0);

        // Corrector.
        let corr = aff.ds.component_mul(&aff.dz);
        let dir = match newton(gamma, Some(&corr), aff.dtau * aff.dkappa) {
            Some(d) => d,
            None => return finish_failure(&best, iter),
        };
        let alpha = (0.99 * step_of(&dir)).min(1.0);
        if alpha <= 1e-14 {
            return finish_failure(&best, iter);
        }

        pt.x += &dir.dx * alpha;
        pt.y += &dir.dy * alpha;
        pt.z += &dir.dz * alpha;
        pt.s += &dir.ds * alpha;
        pt.tau += alpha * dir.dtau;
        pt.kappa += alpha * dir.dkappa;

        if !pt.tau.is_finite() || !pt.kappa.is_finite() || pt.tau <= 0.0 {
            return finish_failure(&best, iter);
        }
    }

    finish_failure(&best, opts.max_iter)
}
