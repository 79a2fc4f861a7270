//! Dense linear algebra used by the solvers: column-scaled least squares by
//! Householder QR, rank-revealing orthonormalization, and principal-angle
//! measurements.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Overdetermined least-squares system with a cached QR factorization.
#[derive(Debug, Clone)]
pub struct LeastSquares<T: ComplexField<RealField = f64>> {
    q_adj: DMatrix<T>,
    r: DMatrix<T>,
    col_scale: Vec<f64>,
    condition: f64,
}

impl<T: ComplexField<RealField = f64> + Copy> LeastSquares<T> {
    /// Columns are normalized to unit 2-norm before factorization; the
    /// reported condition number is that of the scaled matrix.
    pub fn new(mut a: DMatrix<T>) -> Self {
        assert!(a.nrows() >= a.ncols(), "least squares needs at least as many rows as columns");
        let mut col_scale = Vec::with_capacity(a.ncols());
        for mut col in a.column_iter_mut() {
            let norm = col.norm();
            let s = if norm > 0.0 { 1.0 / norm } else { 1.0 };
            col.scale_mut(s);
            col_scale.push(s);
        }
        let qr = a.qr();
        let r = qr.r();
        let q_adj = qr.q().adjoint();
        let sv = r.clone().singular_values();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for s in sv.iter() {
            lo = lo.min(*s);
            hi = hi.max(*s);
        }
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        LeastSquares { q_adj, r, col_scale, condition }
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn ncols(&self) -> usize {
        self.col_scale.len()
    }

    pub fn solve(&self, b: &DVector<T>) -> DVector<T> {
        let n = self.ncols();
        let top = &self.q_adj * b;
        let mut x = self.r.solve_upper_triangular(&top).unwrap_or_else(|| DVector::from_element(n, T::zero()));
        for (xi, s) in x.iter_mut().zip(&self.col_scale) {
            *xi = xi.scale(*s);
        }
        x
    }
}

/// Orthonormal basis for the column space of `a` (Euclidean inner product),
/// dropping directions whose singular value is below `rel_tol·σ_max`.
/// Returns the basis and all singular values in descending order.
pub fn orthonormal_columns(a: &DMatrix<C64>, rel_tol: f64) -> (DMatrix<C64>, Vec<f64>) {
    if a.ncols() == 0 {
        return (DMatrix::zeros(a.nrows(), 0), vec![]);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = sv.first().copied().unwrap_or(0.0);
    let keep: Vec<usize> =
        order.iter().copied().filter(|&i| smax > 0.0 && svd.singular_values[i] > rel_tol * smax).collect();
    let mut q = DMatrix::zeros(a.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        q.set_column(c, &u.column(i));
    }
    (q, sv)
}

/// Largest singular value.
pub fn spectral_norm(a: &DMatrix<C64>) -> f64 {
    if a.ncols() == 0 || a.nrows() == 0 {
        return 0.0;
    }
    a.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Sine of the largest principal angle from `span(qa)` into `span(qb)`:
/// `‖(I − Q_b Q_bᴴ) Q_a‖₂`. Both inputs must have orthonormal columns.
/// This is one-sided: it is zero whenever `span(qa) ⊆ span(qb)`.
pub fn sine_into(qa: &DMatrix<C64>, qb: &DMatrix<C64>) -> f64 {
    if qa.ncols() == 0 {
        return 0.0;
    }
    let residual = qa - qb * (qb.adjoint() * qa);
    spectral_norm(&residual)
}

/// Cosines of all principal angles between two orthonormal bases, descending.
pub fn principal_cosines(qa: &DMatrix<C64>, qb: &DMatrix<C64>) -> Vec<f64> {
    if qa.ncols() == 0 || qb.ncols() == 0 {
        return vec![];
    }
    let mut c: Vec<f64> = (qa.adjoint() * qb).singular_values().iter().map(|s| s.min(1.0)).collect();
    c.sort_by(|a, b| b.total_cmp(a));
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn least_squares_recovers_exact_solution() {
        let a = DMatrix::from_fn(12, 4, |i, j| {
            ((i * i * 7 + j * j * 3 + i * j) as f64 * 0.37).sin() * 10f64.powi(j as i32)
        });
        let x = DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0]);
        let b = &a * &x;
        let ls = LeastSquares::new(a);
        let got = ls.solve(&b);
        assert_abs_diff_eq!((got - x).norm(), 0.0, epsilon = 1e-12);
        assert!(ls.condition() < 1e3);
    }

    #[test]
    fn complex_least_squares_uses_adjoint() {
        let a =
            DMatrix::from_fn(10, 3, |i, j| C64::new((i as f64 * 0.3).powi(j as i32), ((i * j * j) as f64 * 0.2).cos()));
        let x = DVector::from_vec(vec![C64::new(1.0, 1.0), C64::new(-0.5, 2.0), C64::new(0.0, -1.0)]);
        let b = &a * &x;
        let got = LeastSquares::new(a).solve(&b);
        assert_abs_diff_eq!((got - x).norm(), 0.0, epsilon = 1e-11);
    }

    #[test]
    fn sine_between_planes() {
        let t = 0.3f64;
        let qa =
            DMatrix::from_column_slice(3, 1, &[C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0), C64::new(0.0, 0.0)]);
        let qb = DMatrix::from_column_slice(3, 1, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
        assert_abs_diff_eq!(sine_into(&qa, &qb), t.sin(), epsilon = 1e-14);
        assert_abs_diff_eq!(principal_cosines(&qa, &qb)[0], t.cos(), epsilon = 1e-14);
    }

    #[test]
    fn orthonormal_columns_drops_dependent_directions() {
        let a = DMatrix::from_fn(6, 3, |i, j| {
            C64::new(if j == 2 { (i as f64) * 2.0 } else { (i as f64).powi(j as i32) }, 0.0)
        });
        let (q, sv) = orthonormal_columns(&a, 1e-10);
        assert_eq!(q.ncols(), 2);
        assert_eq!(sv.len(), 3);
        assert_abs_diff_eq!((q.adjoint() * &q - DMatrix::identity(2, 2)).norm(), 0.0, epsilon = 1e-12);
    }
}
