//! Dense least-squares solves for the outer-layer weights.

use std::time::Instant;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::solvers::SolveLstsq;
use faer::linalg::svd::{self, ComputeSvdVectors};
use faer::diag::Diag;
use faer::Mat;
use serde::Serialize;

use crate::assembly::{DenseMatrix, LinearSystem};
use crate::error::{Error, Result};
use crate::par::Execution;

/// Outer-layer weights, one per basis function.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    pub values: Vec<f64>,
}

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub residual_norm: f64,
    pub rank: usize,
    /// Largest over smallest retained singular value (`NaN` when the method
    /// does not reveal singular values).
    pub condition_estimate: f64,
    pub elapsed_seconds: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SolveMethod {
    /// Truncated SVD; minimum-norm and rank revealing.
    #[default]
    Svd,
    /// Householder QR without pivoting, for full-rank tall systems.
    HouseholderQr,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveOptions {
    /// Relative singular value cutoff; `None` means `eps * max(rows, cols)`.
    pub rcond: Option<f64>,
    pub method: SolveMethod,
    pub execution: Execution,
}

pub fn default_rcond(rows: usize, cols: usize) -> f64 {
    f64::EPSILON * rows.max(cols) as f64
}

/// Minimum-norm least-squares solution of `M U = b`, discarding singular
/// values below `rcond * s_max`.
pub fn solve(system: &LinearSystem, rcond: f64) -> Result<(WeightVector, SolveReport)> {
    solve_with(
        system,
        SolveOptions {
            rcond: Some(rcond),
            ..Default::default()
        },
    )
}

pub fn solve_with(system: &LinearSystem, opts: SolveOptions) -> Result<(WeightVector, SolveReport)> {
    solve_dense(&system.matrix, &system.rhs, opts)
}

pub fn solve_dense(matrix: &DenseMatrix, rhs: &[f64], opts: SolveOptions) -> Result<(WeightVector, SolveReport)> {
    let (m, n) = (matrix.rows(), matrix.cols());
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("cannot solve an empty {m}x{n} system")));
    }
    if rhs.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: rhs.len(),
        });
    }
    let rcond = opts.rcond.unwrap_or_else(|| default_rcond(m, n));
    if !(rcond >= 0.0) {
        return Err(Error::InvalidArgument(format!("rcond must be non-negative, got {rcond}")));
    }
    if let Some(pos) = matrix.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "matrix entry ({}, {}) is not finite",
            pos / n,
            pos % n
        )));
    }
    if let Some(i) = rhs.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("right-hand side entry {i} is not finite")));
    }

    let start = Instant::now();
    let (values, rank, condition_estimate) = match opts.method {
        SolveMethod::Svd => svd_solve(matrix, rhs, rcond, opts.execution)?,
        SolveMethod::HouseholderQr => {
            if m < n {
                return Err(Error::InvalidArgument(
                    "Householder QR needs at least as many rows as columns".into(),
                ));
            }
            let b = Mat::from_fn(m, 1, |i, _| rhs[i]);
            let x = matrix.as_faer().qr().solve_lstsq(&b);
            ((0..n).map(|i| x[(i, 0)]).collect(), n, f64::NAN)
        }
    };
    let elapsed_seconds = start.elapsed().as_secs_f64();
    if values.iter().any(|v: &f64| !v.is_finite()) {
        return Err(Error::Solver("solution has non-finite entries".into()));
    }
    let weights = WeightVector::new(values);
    let residual_norm = norm2(&residual_dense(matrix, rhs, &weights)?);
    Ok((
        weights,
        SolveReport {
            residual_norm,
            rank,
            condition_estimate,
            elapsed_seconds,
        },
    ))
}

fn svd_solve(matrix: &DenseMatrix, rhs: &[f64], rcond: f64, exec: Execution) -> Result<(Vec<f64>, usize, f64)> {
    let (m, n) = (matrix.rows(), matrix.cols());
    let k = m.min(n);
    let par = exec.faer_par();
    let mut s = Diag::<f64>::zeros(k);
    let mut u = Mat::<f64>::zeros(m, k);
    let mut v = Mat::<f64>::zeros(n, k);
    let scratch = svd::svd_scratch::<f64>(
        m,
        n,
        ComputeSvdVectors::Thin,
        ComputeSvdVectors::Thin,
        par,
        Default::default(),
    );
    let mut mem = MemBuffer::new(scratch);
    svd::svd(
        matrix.as_faer(),
        s.as_mut(),
        Some(u.as_mut()),
        Some(v.as_mut()),
        par,
        MemStack::new(&mut mem),
        Default::default(),
    )
    .map_err(|e| Error::Solver(format!("SVD did not converge: {e:?}")))?;

    let sv: Vec<f64> = (0..k).map(|i| s.column_vector()[i]).collect();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let cutoff = rcond * smax;
    let rank = sv.iter().filter(|&&x| x > cutoff && x > 0.0).count();

    // x = V_r diag(1/s_r) U_r^T b
    let b = faer::ColRef::from_slice(rhs);
    let mut coeff = vec![0.0; k];
    for (i, c) in coeff.iter_mut().enumerate() {
        if sv[i] > cutoff && sv[i] > 0.0 {
            *c = (u.col(i).transpose() * b) / sv[i];
        }
    }
    let mut x = vec![0.0; n];
    for (i, &c) in coeff.iter().enumerate() {
        if c != 0.0 {
            let col = v.col(i);
            for (xj, r) in x.iter_mut().enumerate() {
                *r += c * col[xj];
            }
        }
    }
    let smin = sv
        .iter()
        .copied()
        .filter(|&x| x > cutoff && x > 0.0)
        .fold(f64::INFINITY, f64::min);
    let condition = if rank == 0 { f64::INFINITY } else { smax / smin };
    Ok((x, rank, condition))
}

/// Singular values in non-increasing order.
pub fn singular_values(matrix: &DenseMatrix) -> Result<Vec<f64>> {
    matrix
        .as_faer()
        .singular_values()
        .map_err(|e| Error::Solver(format!("SVD did not converge: {e:?}")))
}

/// `M U - b`, row by row.
pub fn residual(system: &LinearSystem, weights: &WeightVector) -> Result<Vec<f64>> {
    residual_dense(&system.matrix, &system.rhs, weights)
}

fn residual_dense(matrix: &DenseMatrix, rhs: &[f64], weights: &WeightVector) -> Result<Vec<f64>> {
    if rhs.len() != matrix.rows() {
        return Err(Error::DimensionMismatch {
            expected: matrix.rows(),
            found: rhs.len(),
        });
    }
    let mut r = matrix.mul_vec(&weights.values)?;
    for (ri, bi) in r.iter_mut().zip(rhs) {
        *ri -= bi;
    }
    Ok(r)
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{Block, BlockTag};
    use approx::assert_relative_eq;

    fn system(rows: &[Vec<f64>], rhs: &[f64]) -> LinearSystem {
        LinearSystem {
            matrix: DenseMatrix::from_rows(rows).unwrap(),
            rhs: rhs.to_vec(),
            blocks: vec![Block {
                tag: BlockTag::Pde,
                rows: 0..rows.len(),
            }],
        }
    }

    #[test]
    fn identity_system() {
        let s = system(
            &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
            &[1.0, 2.0, 3.0],
        );
        let (u, rep) = solve(&s, default_rcond(3, 3)).unwrap();
        for (a, b) in u.values.iter().zip([1.0, 2.0, 3.0]) {
            assert_relative_eq!(*a, b, epsilon = 1e-14);
        }
        assert!(rep.residual_norm < 1e-14);
        assert_eq!(rep.rank, 3);
        assert_relative_eq!(rep.condition_estimate, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn consistent_overdetermined() {
        let s = system(&[vec![1.0], vec![1.0]], &[2.0, 2.0]);
        let (u, rep) = solve(&s, 0.0).unwrap();
        assert_relative_eq!(u.values[0], 2.0, epsilon = 1e-14);
        assert!(rep.residual_norm < 1e-14);
    }

    #[test]
    fn inconsistent_overdetermined() {
        // normal equations: 2u = 2 -> u = 1, residual (1, -1)
        let s = system(&[vec![1.0], vec![1.0]], &[0.0, 2.0]);
        let (u, rep) = solve(&s, 0.0).unwrap();
        assert_relative_eq!(u.values[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(rep.residual_norm, 2f64.sqrt(), epsilon = 1e-14);
        let r = residual(&s, &u).unwrap();
        assert_relative_eq!(r[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(r[1], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn residual_of_zero_weights_is_minus_rhs() {
        let s = system(&[vec![1.0, 2.0], vec![3.0, 4.0]], &[5.0, -6.0]);
        assert_eq!(residual(&s, &WeightVector::zeros(2)).unwrap(), vec![-5.0, 6.0]);
        assert!(residual(&s, &WeightVector::zeros(3)).is_err());
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let s = system(&[vec![1.0, f64::NAN]], &[1.0]);
        assert!(matches!(solve(&s, 0.0), Err(Error::InvalidInput(_))));
        let s = system(&[vec![1.0]], &[f64::INFINITY]);
        assert!(matches!(solve(&s, 0.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn rank_deficient_gives_minimum_norm() {
        // columns are parallel: rank 1
        let s = system(
            &[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]],
            &[1.0, 2.0, 3.0],
        );
        let (u, rep) = solve(&s, default_rcond(3, 2)).unwrap();
        assert_eq!(rep.rank, 1);
        // minimum-norm solution of u1 + 2 u2 = 1 is (1, 2) / 5
        assert_relative_eq!(u.values[0], 0.2, epsilon = 1e-12);
        assert_relative_eq!(u.values[1], 0.4, epsilon = 1e-12);
    }

    #[test]
    fn qr_matches_svd_on_full_rank() {
        let rows: Vec<Vec<f64>> = (0..8)
            .map(|i| {
                let x = i as f64 / 7.0;
                vec![1.0, x, x * x]
            })
            .collect();
        let rhs: Vec<f64> = (0..8).map(|i| (i as f64).sin()).collect();
        let s = system(&rows, &rhs);
        let (a, _) = solve(&s, 0.0).unwrap();
        let (b, rep) = solve_with(
            &s,
            SolveOptions {
                method: SolveMethod::HouseholderQr,
                ..Default::default()
            },
        )
        .unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert_relative_eq!(*x, *y, epsilon = 1e-10);
        }
        assert_eq!(rep.rank, 3);
    }
}
