//! Doubly nonnegative membership: symmetric, entrywise nonnegative, and
//! positive semidefinite.
//!
//! For 2x2 symmetric bimatrix distributions viewed as matrices, mixtures of
//! invariant products are exactly the normalized completely positive
//! matrices. Every completely positive matrix is doubly nonnegative; the
//! converse holds only up to dimension 4, so in dimension 5 and up a passing
//! check certifies membership of the relaxation only.
//!
//! Nonnegativity is checked exactly on the rationals; semidefiniteness uses
//! floating-point Jacobi eigenvalues with a tolerance on the smallest one.

use crate::error::{Error, Result};
use crate::rational::{rat_to_f64, Rat};
use num::traits::Signed;

pub const DEFAULT_DNN_TOL: f64 = 1e-9;

/// Dimension up to which doubly nonnegative implies completely positive.
pub const CP_EXACT_DIMENSION: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DnnVerdict {
    Member,
    NonMember,
    /// Passed the relaxation in dimension >= 5, or landed within the
    /// eigenvalue tolerance band.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct DnnReport {
    pub verdict: DnnVerdict,
    pub dimension: usize,
    pub min_eigenvalue: f64,
    /// First exactly negative entry, if any.
    pub negative_entry: Option<(usize, usize)>,
    /// True when the verdict only certifies the relaxation (dimension >= 5).
    pub relaxation_only: bool,
}

/// Tests a square symmetric rational matrix for doubly nonnegative
/// membership. Non-symmetric input is an error, not a verdict.
pub fn dnn_membership(matrix: &[Vec<Rat>], tol: f64) -> Result<DnnReport> {
    let k = matrix.len();
    if k == 0 {
        return Err(Error::InvalidArgument("empty matrix".to_string()));
    }
    if matrix.iter().any(|row| row.len() != k) {
        return Err(Error::Dimension("matrix is not square".to_string()));
    }
    for i in 0..k {
        for j in (i + 1)..k {
            if matrix[i][j] != matrix[j][i] {
                return Err(Error::InvalidArgument(format!(
                    "matrix is not symmetric at ({i},{j})"
                )));
            }
        }
    }
    let mut negative_entry = None;
    'outer: for i in 0..k {
        for j in 0..k {
            if matrix[i][j].is_negative() {
                negative_entry = Some((i, j));
                break 'outer;
            }
        }
    }
    let dense: Vec<Vec<f64>> = matrix
        .iter()
        .map(|row| row.iter().map(rat_to_f64).collect())
        .collect();
    let eigenvalues = symmetric_eigenvalues(&dense);
    let min_eigenvalue = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);

    // A minimum eigenvalue of -tol or better passes: singular matrices such
    // as rank-one products sit exactly at zero and are genuine members.
    let verdict = if negative_entry.is_some() || min_eigenvalue < -tol {
        DnnVerdict::NonMember
    } else if k <= CP_EXACT_DIMENSION {
        DnnVerdict::Member
    } else {
        DnnVerdict::Inconclusive
    };
    let relaxation_only =
        k > CP_EXACT_DIMENSION && negative_entry.is_none() && min_eigenvalue >= -tol;
    Ok(DnnReport {
        verdict,
        dimension: k,
        min_eigenvalue,
        negative_entry,
        relaxation_only,
    })
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(matrix: &[Vec<f64>]) -> Vec<f64> {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let scale: f64 = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    eig
}
