//! Small dense symmetric eigenproblems.
//!
//! Matrices here are at most 16×16 (Schouten matrices, Hessians of curvature
//! functions), so a cyclic Jacobi sweep is fast enough and gives eigenvalues
//! to near machine precision with no tuning.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Largest |a_ij - a_ji| over the matrix.
pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

/// Eigenvalues and eigenvectors (columns) of a symmetric matrix by cyclic
/// Jacobi rotations. Eigenvalues are returned in non-increasing order with
/// the eigenvector columns permuted to match.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Input(format!("matrix is {}x{}, not square", n, a.ncols())));
    }
    let scale = a.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let asym = asymmetry(a);
    if asym > 1e-10 * scale {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }

    let mut m = (a + a.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-2 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for r in 0..n {
                    let mrp = m[(r, p)];
                    let mrq = m[(r, q)];
                    m[(r, p)] = c * mrp - s * mrq;
                    m[(r, q)] = s * mrp + c * mrq;
                }
                for r in 0..n {
                    let mpr = m[(p, r)];
                    let mqr = m[(q, r)];
                    m[(p, r)] = c * mpr - s * mqr;
                    m[(q, r)] = s * mpr + c * mqr;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Eigenvalues only, non-increasing.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    jacobi_eigen(a).map(|(values, _)| values)
}
