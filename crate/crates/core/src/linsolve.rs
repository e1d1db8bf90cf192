//! Sparse direct solves backed by faer's sparse LU.
//!
//! faer is built without its thread pool, so factorizations are sequential
//! and bit-reproducible.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Side;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Required relative residual `‖Ax - b‖ / ‖b‖`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Refinement steps tried before giving up on the residual contract.
const MAX_REFINEMENT_STEPS: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub residual_norm: f64,
    pub method: String,
    pub n: usize,
    pub nnz: usize,
    pub refinement_steps: usize,
}

fn to_faer(a: &SparseMatrix) -> Result<SparseColMat<usize, f64>> {
    let trips: Vec<_> = a.iter().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    SparseColMat::try_new_from_triplets(a.nrows, a.ncols, &trips)
        .map_err(|e| Error::DimensionMismatch(format!("sparse conversion failed: {e:?}")))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `‖Ax - b‖ / ‖b‖`, or the absolute residual when `b = 0`.
pub fn relative_residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> Result<f64> {
    let ax = a.mul_vec(x)?;
    let r: Vec<f64> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
    let nb = norm(b);
    Ok(if nb > 0.0 { norm(&r) / nb } else { norm(&r) })
}

pub fn solve(a: &SparseMatrix, b: &[f64]) -> Result<SolveReport> {
    if a.nrows != a.ncols {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}",
            a.nrows, a.ncols
        )));
    }
    if b.len() != a.nrows {
        return Err(Error::DimensionMismatch(format!(
            "rhs has length {} for {} rows",
            b.len(),
            a.nrows
        )));
    }
    let n = a.nrows;
    if n == 0 {
        return Ok(SolveReport {
            solution: Vec::new(),
            residual_norm: 0.0,
            method: "empty".into(),
            n,
            nnz: 0,
            refinement_steps: 0,
        });
    }
    let lu = to_faer(a)?.sp_lu().map_err(|_| Error::SingularMatrix)?;
    let lu_solve = |rhs: &[f64]| -> Result<Vec<f64>> {
        let x = lu.solve(Col::<f64>::from_fn(n, |i| rhs[i]));
        let x: Vec<f64> = (0..n).map(|i| x[i]).collect();
        if x.iter().all(|v| v.is_finite()) {
            Ok(x)
        } else {
            Err(Error::SingularMatrix)
        }
    };

    let mut x = lu_solve(b)?;
    let mut residual = relative_residual(a, &x, b)?;
    let mut steps = 0;
    while residual > RESIDUAL_TOL && steps < MAX_REFINEMENT_STEPS {
        let ax = a.mul_vec(&x)?;
        let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let dx = lu_solve(&r)?;
        x.iter_mut().zip(&dx).for_each(|(xi, di)| *xi += di);
        residual = relative_residual(a, &x, b)?;
        steps += 1;
    }
    if residual > RESIDUAL_TOL {
        return Err(Error::ResidualTooLarge {
            residual,
            tol: RESIDUAL_TOL,
        });
    }
    Ok(SolveReport {
        solution: x,
        residual_norm: residual,
        method: "sparse-lu".into(),
        n,
        nnz: a.nnz(),
        refinement_steps: steps,
    })
}

/// Succeeds iff a sparse Cholesky factorization of `a` exists.
pub fn cholesky_check(a: &SparseMatrix) -> Result<()> {
    if a.nrows != a.ncols {
        return Err(Error::NotSpd);
    }
    if a.nrows == 0 {
        return Ok(());
    }
    to_faer(a)?
        .sp_cholesky(Side::Lower)
        .map(|_| ())
        .map_err(|_| Error::NotSpd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_returns_rhs() {
        let b = vec![1.5, -2.0, 3.25];
        let r = solve(&SparseMatrix::identity(3), &b).unwrap();
        assert_eq!(r.solution, b);
        assert_eq!(r.residual_norm, 0.0);
    }

    #[test]
    fn two_by_two() {
        let a = SparseMatrix::from_triplets(
            2,
            2,
            &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)],
        )
        .unwrap();
        let r = solve(&a, &[3.0, 5.0]).unwrap();
        assert_relative_eq!(r.solution[0], 0.8, max_relative = 1e-14);
        assert_relative_eq!(r.solution[1], 1.4, max_relative = 1e-14);
        assert!(r.residual_norm <= RESIDUAL_TOL);
    }

    #[test]
    fn nonsymmetric_system() {
        let a = SparseMatrix::from_triplets(
            3,
            3,
            &[
                (0, 1, 2.0),
                (1, 0, 1.0),
                (1, 2, -1.0),
                (2, 2, 4.0),
                (2, 0, 1.0),
            ],
        )
        .unwrap();
        let x = [1.0, -1.0, 0.5];
        let b = a.mul_vec(&x).unwrap();
        let r = solve(&a, &b).unwrap();
        for (u, v) in r.solution.iter().zip(x) {
            assert_relative_eq!(*u, v, epsilon = 1e-14);
        }
    }

    #[test]
    fn singular_and_mismatched() {
        let a = SparseMatrix::from_triplets(
            2,
            2,
            &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)],
        )
        .unwrap();
        assert!(matches!(
            solve(&a, &[1.0, 2.0]),
            Err(Error::SingularMatrix | Error::ResidualTooLarge { .. })
        ));
        assert!(matches!(
            solve(&a, &[1.0]),
            Err(Error::DimensionMismatch(_))
        ));
        let rect = SparseMatrix::from_triplets(2, 3, &[]).unwrap();
        assert!(matches!(
            solve(&rect, &[1.0, 2.0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn cholesky_detects_indefinite() {
        let spd = SparseMatrix::from_triplets(
            2,
            2,
            &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)],
        )
        .unwrap();
        assert!(cholesky_check(&spd).is_ok());
        let indef = SparseMatrix::from_triplets(
            2,
            2,
            &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)],
        )
        .unwrap();
        assert!(matches!(cholesky_check(&indef), Err(Error::NotSpd)));
    }

    #[test]
    fn deterministic() {
        let n = 50;
        let mut trips = Vec::new();
        for i in 0..n {
            trips.push((i, i, 4.0 + i as f64 * 0.01));
            if i + 1 < n {
                trips.push((i, i + 1, -1.0));
                trips.push((i + 1, i, -1.3));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &trips).unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        assert_eq!(
            solve(&a, &b).unwrap().solution,
            solve(&a, &b).unwrap().solution
        );
    }
}
