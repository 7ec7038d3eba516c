//! Dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Full singular value decomposition `X = U Σ Vᵀ` with square orthogonal
/// factors and singular values sorted nonincreasing.
#[derive(Debug, Clone)]
pub struct FullSvd {
    /// `n × n`
    pub u: DMatrix<f64>,
    /// Length `min(n, m)`, nonincreasing.
    pub singular_values: DVector<f64>,
    /// `m × m`
    pub v: DMatrix<f64>,
}

impl FullSvd {
    pub fn new(x: &DMatrix<f64>) -> Self {
        let (n, m) = x.shape();
        let k = n.min(m);
        if k == 0 {
            return Self {
                u: DMatrix::identity(n, n),
                singular_values: DVector::zeros(0),
                v: DMatrix::identity(m, m),
            };
        }
        let svd = x.clone().svd(true, true);
        let u_thin = svd.u.expect("requested U");
        let v_thin = svd.v_t.expect("requested Vᵀ").transpose();
        let sigma = svd.singular_values;

        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
        let singular_values = DVector::from_iterator(k, order.iter().map(|&i| sigma[i]));
        let u_sorted = DMatrix::from_columns(&order.iter().map(|&i| u_thin.column(i)).collect::<Vec<_>>());
        let v_sorted = DMatrix::from_columns(&order.iter().map(|&i| v_thin.column(i)).collect::<Vec<_>>());

        Self {
            u: complete_orthonormal_basis(&u_sorted),
            singular_values,
            v: complete_orthonormal_basis(&v_sorted),
        }
    }

    /// Singular values padded with zeros to length `m` (one per column of `V`).
    pub fn extended_singular_values(&self) -> DVector<f64> {
        let m = self.v.ncols();
        DVector::from_fn(m, |i, _| self.singular_values.get(i).copied().unwrap_or(0.0))
    }

    /// Values below `max(n, m)·ε·σ_max` are treated as exact zeros.
    pub fn rank_tolerance(&self) -> f64 {
        let dim = self.u.nrows().max(self.v.nrows()) as f64;
        let smax = self.singular_values.get(0).copied().unwrap_or(0.0);
        dim * f64::EPSILON * smax
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        let (n, m) = (self.u.nrows(), self.v.nrows());
        let mut sigma = DMatrix::zeros(n, m);
        for (i, s) in self.singular_values.iter().enumerate() {
            sigma[(i, i)] = *s;
        }
        &self.u * sigma * self.v.transpose()
    }
}

/// Extends orthonormal columns `q` (`d × k`) to a `d × d` orthogonal matrix.
/// The first `k` columns are returned unchanged.
pub fn complete_orthonormal_basis(q: &DMatrix<f64>) -> DMatrix<f64> {
    let (d, k) = q.shape();
    if k >= d {
        return q.columns(0, d).into_owned();
    }
    let mut stacked = DMatrix::zeros(d, k + d);
    stacked.columns_mut(0, k).copy_from(q);
    stacked.columns_mut(k, d).fill_with_identity();
    let full_q = stacked.qr().q();
    let mut out = DMatrix::zeros(d, d);
    out.columns_mut(0, k).copy_from(q);
    out.columns_mut(k, d - k).copy_from(&full_q.columns(k, d - k));
    out
}

/// Eigenvalues of a symmetric matrix, sorted nonincreasing.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let mut vals: Vec<f64> = SymmetricEigen::new(a.clone()).eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| y.total_cmp(x));
    vals
}

/// Spectral norm of a symmetric positive semidefinite matrix.
pub fn psd_spectral_norm(a: &DMatrix<f64>) -> f64 {
    symmetric_eigenvalues(a).first().copied().unwrap_or(0.0).max(0.0)
}

pub fn smallest_singular_value(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    a.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}
