//! Harmonic analysis on circular domains: the series Dirichlet solver and
//! everything built on it (Green's function, harmonic measure, harmonic
//! units, periods, the period matrix, conjugation).
//!
//! A harmonic function is stored as `Re f(w) + Σ_j b_j log|w − c_j|` with `f`
//! an [`AnalyticRep`]. This basis is complete for circular domains and makes
//! periods, conjugates and normal derivatives exact term by term.

mod context;
mod green;
mod units;

pub use context::HarmonicContext;
pub use green::{greens_function, harmonic_measure_density, integrate_omega, GreensFunction, OmegaDensity};
pub use units::{
    analytic_completion, conjugation_correction, harmonic_unit_basis, period, period_matrix, q_functions, HarmonicUnit,
    PeriodMatrix,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{fmt_point, BoundaryField, BoundarySampling, CircularDomain};
use crate::linalg::LeastSquares;
use crate::par;
use crate::series::{basis_row, AnalyticRep, Holomorphic};

/// Numerical thresholds shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Max boundary misfit of a Dirichlet solve, relative to `max(1, ‖data‖∞)`.
    pub boundary_residual: f64,
    /// Allowed disagreement between quadrature and series periods; also the
    /// bound on periods left after conjugation correction.
    pub period: f64,
    /// Allowed deviation of the harmonic-measure mass from 1.
    pub mass: f64,
    /// Largest acceptable condition number of a collocation matrix.
    pub condition_limit: f64,
    /// Smallest acceptable singular value of the period matrix.
    pub min_singular: f64,
    /// Relative residual allowed when fitting boundary data by a series.
    pub fit_residual: f64,
    /// Per-component relative modulus deviation for the inner predicate.
    pub inner: f64,
    /// Slack in the Jensen equality for the outer predicate.
    pub outer: f64,
    /// Relative fit residual separating divisibility from a pole.
    pub divides: f64,
    /// Largest admissible |log modulus| for outer construction.
    pub max_log_modulus: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            boundary_residual: 1e-8,
            period: 1e-8,
            mass: 1e-8,
            condition_limit: 1e12,
            min_singular: 1e-10,
            fit_residual: 1e-6,
            inner: 1e-7,
            outer: 1e-7,
            divides: 1e-6,
            max_log_modulus: 50.0,
        }
    }
}

impl Tolerances {
    /// Defaults with the three base tolerances (residual, period, mass)
    /// replaced by `tol`.
    pub fn with_base(tol: f64) -> Self {
        Tolerances { boundary_residual: tol, period: tol, mass: tol, ..Default::default() }
    }
}

/// Series representation of a real harmonic function on Ω.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicRep {
    analytic: AnalyticRep,
    logs: Vec<f64>,
    residual: f64,
    condition: f64,
}

impl HarmonicRep {
    /// `u = Re(analytic) + Σ logs[j−1]·log|w − c_j|`.
    pub fn new(analytic: AnalyticRep, logs: Vec<f64>) -> Self {
        assert_eq!(logs.len(), analytic.domain().n_holes());
        HarmonicRep { analytic, logs, residual: 0.0, condition: 1.0 }
    }

    pub fn from_analytic(analytic: AnalyticRep) -> Self {
        let n = analytic.domain().n_holes();
        Self::new(analytic, vec![0.0; n])
    }

    /// `log|w − c_j|` for hole `j ≥ 1`.
    pub fn log_term(domain: &CircularDomain, truncation: usize, j: usize) -> Self {
        let mut logs = vec![0.0; domain.n_holes()];
        logs[j - 1] = 1.0;
        Self::new(AnalyticRep::zero(domain, truncation), logs)
    }

    pub fn constant(domain: &CircularDomain, truncation: usize, c: f64) -> Self {
        Self::from_analytic(AnalyticRep::constant(domain, truncation, C64::new(c, 0.0)))
    }

    pub fn domain(&self) -> &CircularDomain {
        self.analytic.domain()
    }

    pub fn truncation(&self) -> usize {
        self.analytic.truncation()
    }

    /// The analytic part `f` with `u = Re f + logs`.
    pub fn analytic_part(&self) -> &AnalyticRep {
        &self.analytic
    }

    pub fn constant_term(&self) -> f64 {
        self.analytic.constant_term().re
    }

    /// Coefficients `b_j` of `log|w − c_j|`, `j = 1..=n`.
    pub fn log_coeffs(&self) -> &[f64] {
        &self.logs
    }

    /// Max boundary misfit recorded by the solve that produced this rep.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Evaluates without checking membership in Ω (valid on Γ as well).
    pub fn eval_unchecked(&self, w: C64) -> f64 {
        let mut u = self.analytic.eval(w).re;
        for (b, hole) in self.logs.iter().zip(self.domain().holes()) {
            if *b != 0.0 {
                u += b * (w - hole.center).norm().ln();
            }
        }
        u
    }

    /// `F'(w)` for the multivalued analytic `F` with `Re F = u`; the
    /// gradient of `u` is `conj(F')`.
    pub fn complex_derivative(&self, w: C64) -> C64 {
        let mut d = self.analytic.derivative(w);
        for (b, hole) in self.logs.iter().zip(self.domain().holes()) {
            d += *b / (w - hole.center);
        }
        d
    }

    pub fn trace(&self, s: &BoundarySampling) -> BoundaryField {
        BoundaryField::from_fn(s, |w| C64::new(self.eval_unchecked(w), 0.0))
    }

    /// `self + a·other`.
    pub fn add_scaled(&self, other: &HarmonicRep, a: f64) -> Self {
        let analytic = self.analytic.add_scaled(&other.analytic, C64::new(a, 0.0));
        let logs = self.logs.iter().zip(&other.logs).map(|(x, y)| x + a * y).collect();
        HarmonicRep {
            analytic,
            logs,
            residual: self.residual + a.abs() * other.residual,
            condition: self.condition.max(other.condition),
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        HarmonicRep {
            analytic: self.analytic.scale(C64::new(a, 0.0)),
            logs: self.logs.iter().map(|b| a * b).collect(),
            residual: a.abs() * self.residual,
            condition: self.condition,
        }
    }
}

/// Value of `u` at an interior point.
pub fn evaluate_harmonic(rep: &HarmonicRep, w: C64) -> Result<f64> {
    if !rep.domain().contains(w) {
        return Err(Error::Domain(fmt_point(w)));
    }
    Ok(rep.eval_unchecked(w))
}

/// `∂u/∂n` at every node, `n` the unit normal pointing into Ω, by term-wise
/// differentiation of the series.
pub fn normal_derivative(rep: &HarmonicRep, s: &BoundarySampling) -> BoundaryField {
    let vals: Vec<C64> = par::map_range(s.len(), |i| {
        let d = rep.complex_derivative(s.nodes()[i]);
        C64::new((d * s.normals()[i]).re, 0.0)
    });
    BoundaryField::new(s, vals).expect("sized from the sampling")
}

/// Least-squares collocation solver for the Dirichlet problem, factored once
/// per (domain, sampling, truncation) and reused for every right-hand side.
#[derive(Debug, Clone)]
pub struct DirichletSolver {
    domain: CircularDomain,
    sampling: BoundarySampling,
    truncation: usize,
    lsq: LeastSquares<f64>,
}

impl DirichletSolver {
    pub fn new(domain: &CircularDomain, s: &BoundarySampling, truncation: usize, tol: &Tolerances) -> Result<Self> {
        let m = s.nodes_per_component();
        if truncation == 0 || 2 * truncation + 2 > m {
            return Err(Error::Resolution(format!("truncation K = {truncation} needs 1 <= K <= M/2 - 1 with M = {m}")));
        }
        let n = domain.n_holes();
        let ncols = 1 + 2 * truncation * (n + 1) + n;
        let rows: Vec<Vec<f64>> = par::map_range(s.len(), |i| {
            let w = s.nodes()[i];
            let basis = basis_row(domain, truncation, w);
            let mut row = Vec::with_capacity(ncols);
            row.push(1.0);
            for b in &basis[1..] {
                row.push(b.re);
                row.push(-b.im);
            }
            for hole in domain.holes() {
                row.push((w - hole.center).norm().ln());
            }
            row
        });
        let a = DMatrix::from_fn(s.len(), ncols, |i, j| rows[i][j]);
        let lsq = LeastSquares::new(a);
        if !(lsq.condition() <= tol.condition_limit) {
            return Err(Error::IllConditioned { condition: lsq.condition(), limit: tol.condition_limit });
        }
        Ok(DirichletSolver { domain: domain.clone(), sampling: s.clone(), truncation, lsq })
    }

    pub fn domain(&self) -> &CircularDomain {
        &self.domain
    }

    pub fn sampling(&self) -> &BoundarySampling {
        &self.sampling
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn condition(&self) -> f64 {
        self.lsq.condition()
    }

    /// Solves and records the boundary misfit without judging it.
    pub fn solve_unchecked(&self, data: &BoundaryField) -> Result<HarmonicRep> {
        self.sampling.check(data)?;
        if data.imag_defect() > 1e-12 {
            return Err(Error::Shape("Dirichlet data must be real-valued".into()));
        }
        let b = DVector::from_iterator(data.len(), data.values().iter().map(|z| z.re));
        if b.iter().any(|x| !x.is_finite()) {
            return Err(Error::UnboundedData("Dirichlet data contains non-finite values".into()));
        }
        let x = self.lsq.solve(&b);
        let k = self.truncation;
        let n = self.domain.n_holes();
        let mut flat = Vec::with_capacity(1 + k * (n + 1));
        flat.push(C64::new(x[0], 0.0));
        for p in 0..k * (n + 1) {
            flat.push(C64::new(x[1 + 2 * p], x[2 + 2 * p]));
        }
        let analytic = crate::series::rep_from_flat(&self.domain, k, &flat);
        let logs = (0..n).map(|j| x[1 + 2 * k * (n + 1) + j]).collect();
        let mut rep = HarmonicRep::new(analytic, logs);
        let fitted = rep.trace(&self.sampling);
        rep.residual = fitted.values().iter().zip(data.values()).map(|(a, b)| (a.re - b.re).abs()).fold(0.0, f64::max);
        rep.condition = self.lsq.condition();
        Ok(rep)
    }

    /// Solves and fails with [`Error::Residual`] when the misfit exceeds
    /// `tol.boundary_residual · max(1, ‖data‖∞)`.
    pub fn solve(&self, data: &BoundaryField, tol: &Tolerances) -> Result<HarmonicRep> {
        let rep = self.solve_unchecked(data)?;
        let bound = tol.boundary_residual * data.max_abs().max(1.0);
        if !(rep.residual <= bound) {
            return Err(Error::Residual { residual: rep.residual, tol: bound });
        }
        Ok(rep)
    }
}

/// One-shot Dirichlet solve. Prefer [`DirichletSolver`] for repeated solves.
pub fn solve_dirichlet(
    domain: &CircularDomain,
    s: &BoundarySampling,
    data: &BoundaryField,
    truncation: usize,
    tol: &Tolerances,
) -> Result<HarmonicRep> {
    DirichletSolver::new(domain, s, truncation, tol)?.solve(data, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Circle;
    use approx::assert_abs_diff_eq;

    fn annulus() -> CircularDomain {
        CircularDomain::annulus(0.5, C64::new(0.5f64.sqrt(), 0.0)).unwrap()
    }

    fn two_hole() -> CircularDomain {
        CircularDomain::new(
            Circle::new(C64::new(0.0, 0.0), 1.0),
            vec![Circle::new(C64::new(-0.4, 0.0), 0.15), Circle::new(C64::new(0.4, 0.0), 0.15)],
            C64::new(0.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn log_modulus_is_its_own_extension() {
        let d = annulus();
        let s = BoundarySampling::new(&d, 64).unwrap();
        let data = BoundaryField::from_fn(&s, |w| C64::new(w.norm().ln(), 0.0));
        let u = solve_dirichlet(&d, &s, &data, 16, &Tolerances::default()).unwrap();
        assert_abs_diff_eq!(u.log_coeffs()[0], 1.0, epsilon = 1e-12);
        assert!(u.analytic_part().tail_magnitude(16) < 1e-12);
        assert_abs_diff_eq!(u.constant_term(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn constants_are_reproduced() {
        let d = two_hole();
        let s = BoundarySampling::new(&d, 64).unwrap();
        let data = BoundaryField::constant(&s, C64::new(1.0, 0.0));
        let u = solve_dirichlet(&d, &s, &data, 20, &Tolerances::default()).unwrap();
        assert_abs_diff_eq!(u.constant_term(), 1.0, epsilon = 1e-12);
        assert!(u.log_coeffs().iter().all(|b| b.abs() < 1e-12));
        assert!(u.analytic_part().tail_magnitude(20) < 1e-12);
    }

    // Oracle: on A(0.5, 1) the harmonic function with data Re w on |w| = 1 and 0
    // on |w| = 0.5 is Re(αw + β/w) with α + β̄ = 1 and 0.5α + 2β̄ = 0, i.e.
    // α = 4/3, β = −1/3.
    #[test]
    fn matches_two_by_two_oracle() {
        let d = annulus();
        let s = BoundarySampling::new(&d, 64).unwrap();
        let data = BoundaryField::from_fn(&s, |w| C64::new(if w.norm() > 0.75 { w.re } else { 0.0 }, 0.0));
        let u = solve_dirichlet(&d, &s, &data, 16, &Tolerances::default()).unwrap();
        let oracle = |w: C64| (w * (4.0 / 3.0) - 1.0 / (3.0 * w)).re;
        for &w in &[C64::new(0.75, 0.0), C64::new(-0.6, 0.3), C64::new(0.1, 0.8)] {
            assert_abs_diff_eq!(evaluate_harmonic(&u, w).unwrap(), oracle(w), epsilon = 1e-12);
        }
        // Re w itself is harmonic everywhere.
        let data = BoundaryField::from_fn(&s, |w| C64::new(w.re, 0.0));
        let u = solve_dirichlet(&d, &s, &data, 16, &Tolerances::default()).unwrap();
        assert_abs_diff_eq!(evaluate_harmonic(&u, C64::new(0.75, 0.0)).unwrap(), 0.75, epsilon = 1e-12);
    }

    #[test]
    fn evaluation_outside_domain_fails() {
        let d = annulus();
        let u = HarmonicRep::constant(&d, 4, 1.0);
        assert_eq!(evaluate_harmonic(&u, C64::new(0.2, 0.0)).unwrap_err().kind(), "DomainError");
        assert_eq!(evaluate_harmonic(&u, C64::new(1.0, 0.0)).unwrap_err().kind(), "DomainError");
        assert_eq!(evaluate_harmonic(&u, C64::new(0.9, 0.0)).unwrap(), 1.0);
    }

    #[test]
    fn normal_derivative_examples() {
        let d = annulus();
        let s = BoundarySampling::new(&d, 32).unwrap();
        let u = HarmonicRep::log_term(&d, 4, 1);
        let dn = normal_derivative(&u, &s);
        for i in s.component_range(0) {
            assert_abs_diff_eq!(dn.values()[i].re, -1.0, epsilon = 1e-14);
        }
        let h1 = u.scale(1.0 / 0.5f64.ln());
        let dn = normal_derivative(&h1, &s);
        for i in s.component_range(1) {
            assert_abs_diff_eq!(dn.values()[i].re, 1.0 / (0.5 * 0.5f64.ln()), epsilon = 1e-13);
        }
        let c = HarmonicRep::constant(&d, 4, 3.0);
        assert!(normal_derivative(&c, &s).max_abs() < 1e-15);
    }

    #[test]
    fn resolution_and_residual_errors() {
        let d = annulus();
        let s = BoundarySampling::new(&d, 32).unwrap();
        let tol = Tolerances::default();
        assert_eq!(DirichletSolver::new(&d, &s, 16, &tol).unwrap_err().kind(), "ResolutionError");
        // a jump inside one component cannot be matched by a smooth series
        let data = BoundaryField::from_fn(&s, |w| C64::new(if w.im > 0.0 { 1.0 } else { 0.0 }, 0.0));
        let err = solve_dirichlet(&d, &s, &data, 8, &tol).unwrap_err();
        assert_eq!(err.kind(), "ResidualError");
        let complex = BoundaryField::constant(&s, C64::new(0.0, 1.0));
        assert_eq!(solve_dirichlet(&d, &s, &complex, 8, &tol).unwrap_err().kind(), "ShapeError");
    }
}
