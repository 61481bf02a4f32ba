//! Exact LP optimum for tiny instances by vertex enumeration.
//!
//! The feasible set `{ x : |a_i . x| <= y_i }` is a polytope whose vertices
//! lie on intersections of n of the 2m bounding hyperplanes
//! `a_i . x = +-y_i`. A vertex uses n *distinct* rows (the two hyperplanes
//! of one row are parallel), so enumerating row subsets and sign patterns,
//! solving each n-by-n system, and keeping the feasible points visits every
//! vertex. Boundedness — needed for the vertex maximum to equal the LP
//! optimum — holds exactly when the sensing matrix has full column rank,
//! which is checked up front.

use itertools::Itertools;
use ndarray::{Array1, Array2};

use super::{ProblemInstance, SolverError};

const MAX_N: usize = 3;
const MAX_M: usize = 12;

/// Independent correctness oracle: the exact maximizer of `anchor . x` over
/// the instance polytope, for instances small enough to enumerate
/// (`n <= 3`, `m <= 12`). Among objective ties within 1e-12 the
/// lexicographically smallest vertex is returned, so results are stable.
pub fn vertex_oracle(
    instance: &ProblemInstance,
    anchor: &Array1<f64>,
) -> Result<Array1<f64>, SolverError> {
    let (m, n) = instance.dims();
    if n > MAX_N || m > MAX_M {
        return Err(SolverError::OracleLimit { n, m });
    }
    if anchor.len() != n {
        return Err(SolverError::DimensionMismatch {
            expected: n,
            got: anchor.len(),
        });
    }
    let a = instance.sensing();
    let y = instance.magnitudes();
    if rank(a) < n {
        return Err(SolverError::Unbounded);
    }
    let y_scale = y.iter().fold(1.0_f64, |acc, &v| acc.max(v.abs()));
    let feas_tol = 1e-9 * y_scale;

    let mut best: Option<(f64, Array1<f64>)> = None;
    for rows in (0..m).combinations(n) {
        for signs in 0..(1_u32 << n) {
            let mut system = Array2::<f64>::zeros((n, n));
            let mut rhs = Array1::<f64>::zeros(n);
            for (j, &row) in rows.iter().enumerate() {
                let sign = if signs >> j & 1 == 0 { 1.0 } else { -1.0 };
                for k in 0..n {
                    system[(j, k)] = a[(row, k)];
                }
                rhs[j] = sign * y[row];
            }
            let Some(x) = solve_dense(system, rhs) else {
                continue;
            };
            let feasible = a
                .dot(&x)
                .iter()
                .zip(y.iter())
                .all(|(axi, yi)| axi.abs() <= yi + feas_tol);
            if !feasible {
                continue;
            }
            let objective = anchor.dot(&x);
            match &best {
                Some((best_obj, best_x))
                    if objective < best_obj - 1e-12
                        || (objective <= best_obj + 1e-12 && !lex_less(&x, best_x)) => {}
                _ => best = Some((objective, x)),
            }
        }
    }
    best.map(|(_, x)| x).ok_or(SolverError::Unbounded)
}

fn lex_less(a: &Array1<f64>, b: &Array1<f64>) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Column rank via Gaussian elimination with partial pivoting.
fn rank(a: &Array2<f64>) -> usize {
    let (m, n) = a.dim();
    let mut work = a.clone();
    let scale = work.iter().fold(0.0_f64, |acc, &v| acc.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let tol = 1e-12 * scale;
    let mut rank = 0;
    for col in 0..n {
        let pivot_row = (rank..m)
            .max_by(|&i, &j| {
                work[(i, col)]
                    .abs()
                    .partial_cmp(&work[(j, col)].abs())
                    .unwrap()
            })
            .unwrap_or(rank);
        if rank >= m || work[(pivot_row, col)].abs() <= tol {
            continue;
        }
        if pivot_row != rank {
            for k in 0..n {
                work.swap((pivot_row, k), (rank, k));
            }
        }
        for i in rank + 1..m {
            let f = work[(i, col)] / work[(rank, col)];
            for k in col..n {
                work[(i, k)] -= f * work[(rank, k)];
            }
        }
        rank += 1;
    }
    rank
}

/// Solve a small dense system by Gaussian elimination with partial
/// pivoting; None when (numerically) singular.
fn solve_dense(mut a: Array2<f64>, mut b: Array1<f64>) -> Option<Array1<f64>> {
    let n = a.nrows();
    let scale = a.iter().fold(0.0_f64, |acc, &v| acc.max(v.abs()));
    let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[(i, col)]
                    .abs()
                    .partial_cmp(&a[(j, col)].abs())
                    .unwrap()
            })
            .unwrap();
        if a[(pivot, col)].abs() <= tol {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap((pivot, k), (col, k));
            }
            b.swap(pivot, col);
        }
        for i in col + 1..n {
            let f = a[(i, col)] / a[(col, col)];
            for k in col..n {
                a[(i, k)] -= f * a[(col, k)];
            }
            b[i] -= f * b[col];
        }
    }
    let mut x = Array1::<f64>::zeros(n);
    for i in (0..n).rev() {
        let mut sum = b[i];
        for k in i + 1..n {
            sum -= a[(i, k)] * x[k];
        }
        x[i] = sum / a[(i, i)];
    }
    Some(x)
}
