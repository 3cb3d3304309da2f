//! Thomas algorithm for the tridiagonal systems produced by the implicit scheme.
//!
//! The diffusion matrix has diagonal `1 + 2ν` and off-diagonals `-ν` with
//! `ν > 0`, so it is strictly diagonally dominant and elimination without
//! pivoting is stable.

use thiserror::Error;

/// Smallest pivot magnitude accepted during forward elimination.
pub const PIVOT_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("tridiagonal system is empty")]
    Empty,
    #[error("inconsistent band lengths: diag={diag}, sub={sub}, sup={sup}, rhs={rhs}")]
    DimensionMismatch {
        diag: usize,
        sub: usize,
        sup: usize,
        rhs: usize,
    },
    #[error("pivot {pivot:e} in row {row} is below the singularity floor")]
    SingularPivot { row: usize, pivot: f64 },
}

/// A tridiagonal linear system `A x = rhs` stored by bands.
///
/// Row `i` reads `sub[i-1] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(
        sub: Vec<f64>,
        diag: Vec<f64>,
        sup: Vec<f64>,
        rhs: Vec<f64>,
    ) -> Result<Self, SolveError> {
        let system = Self {
            sub,
            diag,
            sup,
            rhs,
        };
        system.check_shape()?;
        Ok(system)
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn check_shape(&self) -> Result<(), SolveError> {
        let n = self.diag.len();
        if n == 0 {
            return Err(SolveError::Empty);
        }
        if self.rhs.len() != n || self.sub.len() != n - 1 || self.sup.len() != n - 1 {
            return Err(SolveError::DimensionMismatch {
                diag: n,
                sub: self.sub.len(),
                sup: self.sup.len(),
                rhs: self.rhs.len(),
            });
        }
        Ok(())
    }

    /// Computes `A x` for residual checks.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.sup[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Solves the system with a single forward sweep and back substitution.
    pub fn solve(&self) -> Result<Vec<f64>, SolveError> {
        self.check_shape()?;
        let n = self.len();

        let mut sup_prime = vec![0.0; n];
        let mut rhs_prime = vec![0.0; n];

        let mut pivot = self.diag[0];
        if pivot.abs() < PIVOT_FLOOR || !pivot.is_finite() {
            return Err(SolveError::SingularPivot { row: 0, pivot });
        }
        if n > 1 {
            sup_prime[0] = self.sup[0] / pivot;
        }
        rhs_prime[0] = self.rhs[0] / pivot;

        for i in 1..n {
            let lower = self.sub[i - 1];
            pivot = self.diag[i] - lower * sup_prime[i - 1];
            if pivot.abs() < PIVOT_FLOOR || !pivot.is_finite() {
                return Err(SolveError::SingularPivot { row: i, pivot });
            }
            if i + 1 < n {
                sup_prime[i] = self.sup[i] / pivot;
            }
            rhs_prime[i] = (self.rhs[i] - lower * rhs_prime[i - 1]) / pivot;
        }

        let mut x = rhs_prime;
        for i in (0..n - 1).rev() {
            x[i] -= sup_prime[i] * x[i + 1];
        }
        Ok(x)
    }
}
