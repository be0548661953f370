// SPDX-License-Identifier: AGPL-3.0-only

//! Dense Hermitian eigendecomposition.
//!
//! A thin, validating layer over nalgebra's symmetric eigensolver for
//! complex Hermitian matrices. Input matrices must be *exactly* Hermitian
//! (`H[a,b] == conj(H[b,a])` as floating-point values, which the crate's
//! accumulating builders guarantee by construction, conjugation being exact
//! in IEEE arithmetic). Results come back with eigenvalues in ascending
//! order; when eigenvectors are requested the columns are permuted to match
//! and every eigenpair is checked against the residual bound
//!
//! ```text
//! ||H v - lambda v||_2 <= 1e-10 * max(1, max_entry(|H|) * order).
//! ```

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

/// Relative scale of the eigenpair residual bound enforced by [`eigh`].
const RESIDUAL_SCALE: f64 = 1e-10;

/// Maximum Jacobi-style sweeps allowed before the solver reports failure.
const MAX_EIGEN_ITERATIONS: usize = 100_000;

/// A square complex matrix validated (or built) to be exactly Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Zero matrix of the given order.
    #[must_use]
    pub fn zeros(order: usize) -> Self {
        Self {
            m: DMatrix::zeros(order, order),
        }
    }

    /// Validates a dense matrix: square, finite entries, and exact
    /// conjugate symmetry (which forces exactly real diagonal entries).
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidParams {
                reason: format!("matrix is {}x{}, must be square", m.nrows(), m.ncols()),
            });
        }
        for a in 0..m.nrows() {
            for b in a..m.ncols() {
                let upper = m[(a, b)];
                let lower = m[(b, a)];
                if !upper.re.is_finite() || !upper.im.is_finite() {
                    return Err(Error::NonFinite { what: "matrix" });
                }
                if upper.re != lower.re || upper.im != -lower.im {
                    return Err(Error::NotHermitian { row: a, col: b });
                }
            }
        }
        Ok(Self { m })
    }

    /// Matrix order (number of rows).
    #[must_use]
    pub fn order(&self) -> usize {
        self.m.nrows()
    }

    /// Entry at `(row, col)`.
    #[must_use]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    /// Borrow of the underlying dense matrix.
    #[must_use]
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    /// Accumulates a hopping amplitude: `H[a,b] += z` together with its
    /// Hermitian partner `H[b,a] += conj(z)`. A self-hop (`a == b`) lands
    /// both terms on the diagonal, contributing `2 Re(z)` with an exactly
    /// zero imaginary part — the correct behavior when a periodic direction
    /// is short enough that a hop and its reverse connect the same pair.
    pub(crate) fn add_hop(&mut self, a: usize, b: usize, z: Complex64) {
        self.m[(a, b)] += z;
        self.m[(b, a)] += z.conj();
    }

    /// Accumulates a real diagonal term `H[a,a] += x`.
    pub(crate) fn add_real_diag(&mut self, a: usize, x: f64) {
        self.m[(a, a)] += Complex64::new(x, 0.0);
    }

    /// Scales every entry by a real factor; a real scale commutes with
    /// conjugation componentwise, so Hermiticity stays exact.
    pub(crate) fn scale_real(&mut self, factor: f64) {
        for z in self.m.iter_mut() {
            *z *= factor;
        }
    }
}

/// Eigendecomposition result with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// When requested: orthonormal eigenvectors, column `j` belonging to
    /// `eigenvalues[j]`.
    pub vectors: Option<DMatrix<Complex64>>,
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back ascending; with `want_vectors` the matching
/// eigenvector columns are returned and every pair is verified against the
/// residual bound documented at module level.
pub fn eigh(h: &HermitianMatrix, want_vectors: bool) -> Result<EigenResult> {
    let order = h.order();
    if order == 0 {
        return Ok(EigenResult {
            eigenvalues: Vec::new(),
            vectors: want_vectors.then(|| DMatrix::zeros(0, 0)),
        });
    }
    let se = SymmetricEigen::try_new(h.m.clone(), f64::EPSILON, MAX_EIGEN_ITERATIONS)
        .ok_or(Error::EigenConvergence { order })?;

    let mut perm: Vec<usize> = (0..order).collect();
    perm.sort_by(|&i, &j| {
        se.eigenvalues[i]
            .partial_cmp(&se.eigenvalues[j])
            .expect("eigenvalues of a finite Hermitian matrix are finite")
    });
    let eigenvalues: Vec<f64> = perm.iter().map(|&i| se.eigenvalues[i]).collect();

    let vectors = if want_vectors {
        let v = DMatrix::from_fn(order, order, |r, c| se.eigenvectors[(r, perm[c])]);
        let magnitude = h.m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let bound = RESIDUAL_SCALE * (magnitude * order as f64).max(1.0);
        for (j, &lambda) in eigenvalues.iter().enumerate() {
            let col = v.column(j);
            let residual = (&h.m * col - col * Complex64::new(lambda, 0.0)).norm();
            if residual > bound {
                return Err(Error::ResidualTooLarge {
                    order,
                    residual,
                    bound,
                });
            }
        }
        Some(v)
    } else {
        None
    };

    Ok(EigenResult {
        eigenvalues,
        vectors,
    })
}
