use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{normal_derivative, DirichletSolver, HarmonicRep, OmegaDensity, Tolerances};
use crate::error::{Error, Result};
use crate::geometry::{compensated_sum, BoundaryField, BoundarySampling};
use crate::series::AnalyticRep;

/// Coefficients `a_1..a_n` of the harmonic unit `u_a = Σ a_j h_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicUnit {
    pub a: Vec<f64>,
}

impl HarmonicUnit {
    pub fn zero(n: usize) -> Self {
        HarmonicUnit { a: vec![0.0; n] }
    }

    pub fn is_trivial(&self) -> bool {
        self.a.iter().all(|x| *x == 0.0)
    }

    /// `Σ a_j h_j` given `units[j−1] = h_j`.
    pub fn to_rep(&self, units: &[HarmonicRep], domain_template: &HarmonicRep) -> HarmonicRep {
        let mut out = domain_template.scale(0.0);
        for (a, h) in self.a.iter().zip(units) {
            out = out.add_scaled(h, *a);
        }
        out
    }
}

/// `p_jk = ∫_Γ h_j ∂h_k/∂n ds = Per(h_k, γ_j)` with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMatrix {
    p: DMatrix<f64>,
    symmetry_defect: f64,
    min_singular: f64,
}

impl PeriodMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.p[(j - 1, k - 1)]
    }

    /// `max |p_jk − p_kj|`.
    pub fn symmetry_defect(&self) -> f64 {
        self.symmetry_defect
    }

    pub fn min_singular(&self) -> f64 {
        self.min_singular
    }
}

/// Harmonic extensions `h_1..h_n` of the hole indicators.
pub fn harmonic_unit_basis(solver: &DirichletSolver, tol: &Tolerances) -> Result<Vec<HarmonicRep>> {
    let s = solver.sampling();
    (1..=solver.domain().n_holes()).map(|j| solver.solve(&BoundaryField::indicator(s, j), tol)).collect()
}

/// `Q_j = (∂h_j/∂n)/(dω/ds)` at the nodes.
pub fn q_functions(units: &[HarmonicRep], omega: &OmegaDensity, s: &BoundarySampling) -> Vec<BoundaryField> {
    units
        .iter()
        .map(|h| {
            let dn = normal_derivative(h, s);
            let vals = dn.values().iter().zip(omega.density()).map(|(v, d)| C64::new(v.re / d, 0.0)).collect();
            BoundaryField::new(s, vals).expect("sized from the sampling")
        })
        .collect()
}

fn quadrature_period(dn: &BoundaryField, j: usize, s: &BoundarySampling) -> f64 {
    compensated_sum(s.component_range(j).map(|i| dn.values()[i].re * s.weights()[i]))
}

/// `Per(u, γ_j) = ∫_{Γ_j} ∂u/∂n ds` (normal into Ω), cross-checked against
/// `2π·b_j` from the log coefficient.
pub fn period(u: &HarmonicRep, j: usize, s: &BoundarySampling, tol: &Tolerances) -> Result<f64> {
    let n = u.domain().n_holes();
    if j == 0 || j > n {
        return Err(Error::Shape(format!("hole index {j} outside 1..={n}")));
    }
    let dn = normal_derivative(u, s);
    let quad = quadrature_period(&dn, j, s);
    let series = 2.0 * std::f64::consts::PI * u.log_coeffs()[j - 1];
    let scale = 1.0f64.max(series.abs());
    if !((quad - series).abs() <= tol.period * scale) {
        return Err(Error::PeriodMismatch { hole: j, quadrature: quad, series });
    }
    Ok(quad)
}

fn all_periods(u: &HarmonicRep, s: &BoundarySampling, tol: &Tolerances) -> Result<Vec<f64>> {
    (1..=u.domain().n_holes()).map(|j| period(u, j, s, tol)).collect()
}

pub fn period_matrix(units: &[HarmonicRep], s: &BoundarySampling, tol: &Tolerances) -> Result<PeriodMatrix> {
    let n = units.len();
    let mut p = DMatrix::zeros(n, n);
    for (k, h) in units.iter().enumerate() {
        let per = all_periods(h, s, tol)?;
        for j in 0..n {
            p[(j, k)] = per[j];
        }
    }
    let mut symmetry_defect = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            symmetry_defect = symmetry_defect.max((p[(j, k)] - p[(k, j)]).abs());
        }
    }
    let min_singular =
        if n == 0 { f64::INFINITY } else { p.clone().singular_values().iter().copied().fold(f64::INFINITY, f64::min) };
    if !(min_singular > tol.min_singular) {
        return Err(Error::SingularMatrix(min_singular));
    }
    Ok(PeriodMatrix { p, symmetry_defect, min_singular })
}

/// Solves `Σ_k p_jk a_k = −Per(u, γ_j)` so that `u + u_a` has a single-valued
/// conjugate, then verifies the corrected periods.
pub fn conjugation_correction(
    u: &HarmonicRep,
    pm: &PeriodMatrix,
    units: &[HarmonicRep],
    s: &BoundarySampling,
    tol: &Tolerances,
) -> Result<HarmonicUnit> {
    let n = pm.dim();
    if n == 0 {
        return Ok(HarmonicUnit::zero(0));
    }
    if !(pm.min_singular > tol.min_singular) {
        return Err(Error::SingularMatrix(pm.min_singular));
    }
    let rhs = DVector::from_iterator(n, all_periods(u, s, tol)?.into_iter().map(|x| -x));
    let a = pm.p.clone().lu().solve(&rhs).ok_or(Error::SingularMatrix(pm.min_singular))?;
    let unit = HarmonicUnit { a: a.iter().copied().collect() };
    let corrected = u.add_scaled(&unit.to_rep(units, u), 1.0);
    for j in 1..=n {
        let per = period(&corrected, j, s, tol)?;
        if !(per.abs() <= tol.period * 1.0f64.max(rhs.amax())) {
            return Err(Error::NonzeroPeriod { hole: j, period: per });
        }
    }
    Ok(unit)
}

/// Analytic `f` with `Re f = u` and `Im f(ŵ) = 0`. The log coefficients of
/// `u` must vanish (all periods zero).
pub fn analytic_completion(u: &HarmonicRep, tol: &Tolerances) -> Result<AnalyticRep> {
    for (j, b) in u.log_coeffs().iter().enumerate() {
        let per = 2.0 * std::f64::consts::PI * b;
        if !(per.abs() <= tol.period) {
            return Err(Error::NonzeroPeriod { hole: j + 1, period: per });
        }
    }
    let mut f = u.analytic_part().clone();
    // The series already carries the conjugate term-wise; only the imaginary
    // constant is free.
    let base = u.domain().base_point();
    let im = crate::series::Holomorphic::eval(&f, base).im;
    f.add_constant(C64::new(0.0, -im));
    Ok(f)
}
