//! Direct sparse LU solve of the assembled saddle-point system.

use faer::prelude::*;
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMat, Triplet};

use crate::assembly::AssembledSystem;
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

pub const RESIDUAL_TOL: f64 = 1e-10;
pub const PRESSURE_MEAN_TOL: f64 = 1e-9;
const MAX_REFINEMENT_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    Singular,
    ToleranceNotMet,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::Singular => "singular",
            SolveStatus::ToleranceNotMet => "tolerance_not_met",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizationStats {
    pub dim: usize,
    pub nnz: usize,
    pub refinement_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// `‖b - Ax‖ / ‖b‖`
    pub residual_norm: f64,
    /// value of the mean-pressure constraint row at the solution
    pub pressure_mean: f64,
    pub stats: FactorizationStats,
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// nodal unknowns followed by the multiplier
    pub coeffs: Vec<f64>,
    pub report: SolveReport,
}

impl Solution {
    /// Nodal `(u1, u2, p)` coefficients without the multiplier.
    pub fn fields(&self) -> &[f64] {
        &self.coeffs[..self.coeffs.len() - 1]
    }
}

/// Factorizes and solves `A x = b` for a general square sparse matrix.
/// Returns [`Error::SingularMatrix`] when the factorization breaks down or
/// produces non-finite values.
pub fn solve_csr(a: &CsrMatrix, b: &[f64]) -> Result<(Vec<f64>, f64, usize)> {
    let n = a.n_rows;
    let triplets: Vec<Triplet<usize, usize, f64>> = a.iter().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, a.n_cols, &triplets)
        .map_err(|e| Error::Factorization(format!("{e:?}")))?;
    let lu = mat.sp_lu().map_err(|e| match e {
        LuError::SymbolicSingular { .. } => Error::SingularMatrix,
        LuError::Generic(e) => Error::Factorization(format!("{e:?}")),
    })?;
    let solve = |rhs: &[f64]| -> Vec<f64> {
        let col = Col::<f64>::from_fn(n, |i| rhs[i]);
        let x = lu.solve(&col);
        (0..n).map(|i| x[i]).collect()
    };

    let b_norm = norm(b);
    let scale = if b_norm > 0.0 { b_norm } else { 1.0 };
    let mut x = solve(b);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularMatrix);
    }
    let mut r = residual(a, &x, b);
    let mut steps = 0;
    while norm(&r) / scale > RESIDUAL_TOL && steps < MAX_REFINEMENT_STEPS {
        let dx = solve(&r);
        if dx.iter().any(|v| !v.is_finite()) {
            break;
        }
        let candidate: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let rc = residual(a, &candidate, b);
        if norm(&rc) >= norm(&r) {
            break;
        }
        x = candidate;
        r = rc;
        steps += 1;
    }
    Ok((x, norm(&r) / scale, steps))
}

/// Solves an assembled system and checks the residual and the pressure
/// constraint.
pub fn solve(system: &AssembledSystem) -> Result<Solution> {
    let (x, residual_norm, steps) = solve_csr(&system.matrix, &system.rhs)?;
    let pressure_mean: f64 = system.matrix.row(system.multiplier).map(|(c, v)| v * x[c]).sum();
    let p_norm = norm(&system.pressure_dofs.iter().map(|&d| x[d]).collect::<Vec<_>>());
    let mean_ok = pressure_mean.abs() <= PRESSURE_MEAN_TOL * p_norm.max(f64::MIN_POSITIVE);
    let status = if residual_norm <= RESIDUAL_TOL && mean_ok {
        SolveStatus::Converged
    } else {
        SolveStatus::ToleranceNotMet
    };
    Ok(Solution {
        coeffs: x,
        report: SolveReport {
            status,
            residual_norm,
            pressure_mean,
            stats: FactorizationStats {
                dim: system.dim(),
                nnz: system.matrix.nnz(),
                refinement_steps: steps,
            },
        },
    })
}

fn residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    a.matvec(x).iter().zip(b).map(|(ax, b)| b - ax).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
