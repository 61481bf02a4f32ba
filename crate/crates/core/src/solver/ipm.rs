//! Interior-point engine for `max c . x` subject to `-y <= A x <= y`.
//!
//! Feasible-start Mehrotra predictor-corrector on the normal equations:
//! `x = 0` is strictly interior whenever `y > 0` (almost surely under the
//! Gaussian model), and the dual variables start from the least-squares
//! solution of `A^T v = c` split into nonnegative parts, so both primal
//! and dual infeasibilities begin at roundoff level. The dual residual is
//! still carried in the Newton right-hand side every iteration, which pulls
//! back any drift that ill-conditioned late iterations inject.
//!
//! Each iteration factors `A^T D A` (D diagonal, from the complementarity
//! pairs) by dense Cholesky with a ridge fallback, takes the affine step to
//! pick the centering weight, then the corrected step with the usual
//! fraction-to-the-boundary rule. Slacks are updated incrementally, never
//! recomputed from `x`, so they stay strictly positive.

use ndarray::{Array1, Array2, Axis};

use super::{certificate_residuals, SolverConfig};

pub(crate) struct IpmOutcome {
    pub solution: Array1<f64>,
    pub dual: Array1<f64>,
    pub iterations: usize,
}

const STEP_SHRINK: f64 = 0.99995;
const D_CAP: f64 = 1e18;
const STALL_PATIENCE: usize = 20;

pub(crate) fn solve(
    a: &Array2<f64>,
    y: &Array1<f64>,
    c: &Array1<f64>,
    cfg: &SolverConfig,
) -> IpmOutcome {
    let (m, _n) = a.dim();
    let mut x = Array1::<f64>::zeros(c.len());
    let mut s1 = y.clone();
    let mut s2 = y.clone();

    let v = dual_start(a, c);
    let pad = 0.1 * (1.0 + v.iter().fold(0.0_f64, |acc, &t| acc.max(t.abs())));
    let mut mu = v.mapv(|t| t.max(0.0) + pad);
    let mut lam = v.mapv(|t| (-t).max(0.0) + pad);

    let mut best_score = f64::INFINITY;
    let mut stall = 0usize;
    let mut iterations = 0usize;

    loop {
        let u = &mu - &lam;
        let (feas, gap, dres) = certificate_residuals(a, y, c, &x, &u);
        if feas <= cfg.eps_feasibility && gap <= cfg.eps_gap && dres <= cfg.eps_gap {
            return IpmOutcome {
                solution: x,
                dual: u,
                iterations,
            };
        }
        let score = feas.max(gap).max(dres);
        if score < 0.9 * best_score {
            best_score = score;
            stall = 0;
        } else {
            stall += 1;
        }
        if iterations >= cfg.max_iterations || stall >= STALL_PATIENCE {
            return IpmOutcome {
                solution: x,
                dual: u,
                iterations,
            };
        }
        iterations += 1;

        let mut d = Array1::<f64>::zeros(m);
        for i in 0..m {
            d[i] = (mu[i] / s1[i] + lam[i] / s2[i]).min(D_CAP);
        }
        let scaled = a * &d.view().insert_axis(Axis(1));
        let normal = scaled.t().dot(a);
        let factor = factor_spd(normal);

        // affine predictor: the rhs collapses to c exactly
        let dx_aff = chol_solve(&factor, c);
        let adx_aff = a.dot(&dx_aff);
        let mut dmu_aff = Array1::<f64>::zeros(m);
        let mut dlam_aff = Array1::<f64>::zeros(m);
        for i in 0..m {
            dmu_aff[i] = -mu[i] + mu[i] * adx_aff[i] / s1[i];
            dlam_aff[i] = -lam[i] - lam[i] * adx_aff[i] / s2[i];
        }
        let ap_aff = max_step(&s1, &adx_aff, -1.0).min(max_step(&s2, &adx_aff, 1.0));
        let ad_aff = max_step_plain(&mu, &dmu_aff).min(max_step_plain(&lam, &dlam_aff));

        let mu_bar = (mu.dot(&s1) + lam.dot(&s2)) / (2.0 * m as f64);
        let mut mu_aff = 0.0;
        for i in 0..m {
            mu_aff += (mu[i] + ad_aff * dmu_aff[i]) * (s1[i] - ap_aff * adx_aff[i]);
            mu_aff += (lam[i] + ad_aff * dlam_aff[i]) * (s2[i] + ap_aff * adx_aff[i]);
        }
        mu_aff /= 2.0 * m as f64;
        let sigma = (mu_aff / mu_bar).clamp(0.0, 1.0).powi(3);

        // corrected step; w1/w2 carry the centering and second-order terms
        let target = sigma * mu_bar;
        let mut w1 = Array1::<f64>::zeros(m);
        let mut w2 = Array1::<f64>::zeros(m);
        for i in 0..m {
            w1[i] = (target - dmu_aff[i] * (-adx_aff[i])) / s1[i];
            w2[i] = (target - dlam_aff[i] * adx_aff[i]) / s2[i];
        }
        let rhs = c + &a.t().dot(&(&w2 - &w1));
        let dx = chol_solve(&factor, &rhs);
        let adx = a.dot(&dx);
        let mut dmu = Array1::<f64>::zeros(m);
        let mut dlam = Array1::<f64>::zeros(m);
        for i in 0..m {
            dmu[i] = w1[i] - mu[i] + mu[i] * adx[i] / s1[i];
            dlam[i] = w2[i] - lam[i] - lam[i] * adx[i] / s2[i];
        }

        let ap = (STEP_SHRINK * max_step(&s1, &adx, -1.0).min(max_step(&s2, &adx, 1.0))).min(1.0);
        let ad = (STEP_SHRINK * max_step_plain(&mu, &dmu).min(max_step_plain(&lam, &dlam))).min(1.0);

        for i in 0..x.len() {
            x[i] += ap * dx[i];
        }
        for i in 0..m {
            s1[i] -= ap * adx[i];
            s2[i] += ap * adx[i];
            mu[i] += ad * dmu[i];
            lam[i] += ad * dlam[i];
            debug_assert!(s1[i] > 0.0 && s2[i] > 0.0 && mu[i] > 0.0 && lam[i] > 0.0);
        }
    }
}

/// Least-squares point `v = A (A^T A)^{-1} c`, which satisfies `A^T v = c`
/// whenever `A` has full column rank. A rank-deficient gram matrix falls
/// back to a ridge factorization; the main loop repairs the resulting dual
/// infeasibility through the Newton rhs.
fn dual_start(a: &Array2<f64>, c: &Array1<f64>) -> Array1<f64> {
    let gram = a.t().dot(a);
    let factor = factor_spd(gram);
    a.dot(&chol_solve(&factor, c))
}

/// Largest step in `[0, 1]` keeping `z + t * sign * adx > 0` componentwise.
fn max_step(z: &Array1<f64>, adx: &Array1<f64>, sign: f64) -> f64 {
    let mut t = 1.0_f64;
    for (zi, ai) in z.iter().zip(adx.iter()) {
        let dz = sign * ai;
        if dz < 0.0 {
            t = t.min(-zi / dz);
        }
    }
    t
}

fn max_step_plain(z: &Array1<f64>, dz: &Array1<f64>) -> f64 {
    let mut t = 1.0_f64;
    for (zi, di) in z.iter().zip(dz.iter()) {
        if *di < 0.0 {
            t = t.min(-zi / di);
        }
    }
    t
}

/// Cholesky factorization with escalating ridge regularization. The ridge
/// only activates when late-stage conditioning (degenerate optima drive
/// some diagonal entries of D to the cap) defeats the plain factorization.
fn factor_spd(mat: Array2<f64>) -> Array2<f64> {
    let n = mat.nrows();
    let mean_diag = (0..n).map(|i| mat[(i, i)].abs()).sum::<f64>() / n as f64;
    let mut ridge = 0.0_f64;
    for attempt in 0..8 {
        let mut work = mat.clone();
        if ridge > 0.0 {
            for i in 0..n {
                work[(i, i)] += ridge;
            }
        }
        if cholesky_in_place(&mut work) {
            return work;
        }
        ridge = if attempt == 0 {
            1e-14 * mean_diag.max(f64::MIN_POSITIVE)
        } else {
            ridge * 100.0
        };
    }
    // last resort: a heavily damped factor is still a usable descent model
    let mut work = mat;
    for i in 0..n {
        work[(i, i)] += mean_diag.max(1.0);
    }
    let ok = cholesky_in_place(&mut work);
    debug_assert!(ok, "damped normal matrix must factor");
    work
}

/// In-place lower Cholesky; returns false on a non-positive pivot.
fn cholesky_in_place(mat: &mut Array2<f64>) -> bool {
    let n = mat.nrows();
    let row = mat.as_slice_mut().expect("normal matrix is contiguous");
    for i in 0..n {
        for j in 0..=i {
            let dot: f64 = row[i * n..i * n + j]
                .iter()
                .zip(&row[j * n..j * n + j])
                .map(|(a, b)| a * b)
                .sum();
            let sum = row[i * n + j] - dot;
            if i == j {
                if !(sum > 0.0) || !sum.is_finite() {
                    return false;
                }
                row[i * n + i] = sum.sqrt();
            } else {
                row[i * n + j] = sum / row[j * n + j];
            }
        }
    }
    true
}

/// Solve `L L^T x = b` given the lower factor.
fn chol_solve(l: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let n = l.nrows();
    let lr = l.as_slice().expect("factor is contiguous");
    let mut out = b.to_vec();
    for i in 0..n {
        let dot: f64 = lr[i * n..i * n + i]
            .iter()
            .zip(&out[..i])
            .map(|(a, b)| a * b)
            .sum();
        out[i] = (out[i] - dot) / lr[i * n + i];
    }
    for i in (0..n).rev() {
        let mut sum = out[i];
        for (k, ok) in out.iter().enumerate().take(n).skip(i + 1) {
            sum -= lr[k * n + i] * ok;
        }
        out[i] = sum / lr[i * n + i];
    }
    Array1::from(out)
}
