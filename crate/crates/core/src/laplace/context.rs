use num_complex::Complex64 as C64;

use super::green::density_from_green;
use super::{
    analytic_completion, conjugation_correction, greens_function, harmonic_unit_basis, period_matrix, q_functions,
    DirichletSolver, GreensFunction, HarmonicRep, HarmonicUnit, OmegaDensity, PeriodMatrix, Tolerances,
};
use crate::error::Result;
use crate::geometry::{BoundaryField, BoundarySampling, CircularDomain};
use crate::series::{AnalyticFitter, AnalyticRep};

/// Everything that depends only on (domain, M, K): the factored solver,
/// harmonic measure at the base point, harmonic units, period matrix and
/// the `Q_j`. Built once and shared by the Hardy-space and Galerkin layers.
#[derive(Debug, Clone)]
pub struct HarmonicContext {
    domain: CircularDomain,
    sampling: BoundarySampling,
    midpoints: BoundarySampling,
    solver: DirichletSolver,
    fitter: AnalyticFitter,
    tol: Tolerances,
    green: GreensFunction,
    omega: OmegaDensity,
    h0: HarmonicRep,
    units: Vec<HarmonicRep>,
    periods: PeriodMatrix,
    q: Vec<BoundaryField>,
}

impl HarmonicContext {
    pub fn new(domain: &CircularDomain, m: usize, k: usize, tol: Tolerances) -> Result<Self> {
        let sampling = BoundarySampling::new(domain, m)?;
        let midpoints = BoundarySampling::with_shift(domain, m, 0.5)?;
        let solver = DirichletSolver::new(domain, &sampling, k, &tol)?;
        let fitter = AnalyticFitter::new(domain, &sampling, k)?;
        let green = greens_function(&solver, domain.base_point(), &tol)?;
        let omega = density_from_green(&green, &sampling, &tol)?;
        let h0 = solver.solve(&BoundaryField::indicator(&sampling, 0), &tol)?;
        let units = harmonic_unit_basis(&solver, &tol)?;
        let periods = period_matrix(&units, &sampling, &tol)?;
        let q = q_functions(&units, &omega, &sampling);
        Ok(HarmonicContext {
            domain: domain.clone(),
            sampling,
            midpoints,
            solver,
            fitter,
            tol,
            green,
            omega,
            h0,
            units,
            periods,
            q,
        })
    }

    pub fn domain(&self) -> &CircularDomain {
        &self.domain
    }

    pub fn sampling(&self) -> &BoundarySampling {
        &self.sampling
    }

    /// Sampling at the angular midpoints of the solver nodes, used to check
    /// fits away from the collocation points.
    pub fn midpoints(&self) -> &BoundarySampling {
        &self.midpoints
    }

    pub fn solver(&self) -> &DirichletSolver {
        &self.solver
    }

    /// Complex series fitter on the solver nodes at the solver truncation.
    pub fn fitter(&self) -> &AnalyticFitter {
        &self.fitter
    }

    pub fn truncation(&self) -> usize {
        self.solver.truncation()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn green(&self) -> &GreensFunction {
        &self.green
    }

    pub fn omega(&self) -> &OmegaDensity {
        &self.omega
    }

    pub fn h0(&self) -> &HarmonicRep {
        &self.h0
    }

    /// `h_1..h_n`.
    pub fn units(&self) -> &[HarmonicRep] {
        &self.units
    }

    pub fn period_matrix(&self) -> &PeriodMatrix {
        &self.periods
    }

    pub fn q_functions(&self) -> &[BoundaryField] {
        &self.q
    }

    pub fn solve(&self, data: &BoundaryField) -> Result<HarmonicRep> {
        self.solver.solve(data, &self.tol)
    }

    /// `Σ a_j h_j`.
    pub fn unit_rep(&self, unit: &HarmonicUnit) -> HarmonicRep {
        unit.to_rep(&self.units, &self.h0)
    }

    /// Correction `a` and the corrected function `u + u_a`.
    pub fn correct(&self, u: &HarmonicRep) -> Result<(HarmonicUnit, HarmonicRep)> {
        let a = conjugation_correction(u, &self.periods, &self.units, &self.sampling, &self.tol)?;
        let corrected = u.add_scaled(&self.unit_rep(&a), 1.0);
        Ok((a, corrected))
    }

    pub fn complete(&self, u: &HarmonicRep) -> Result<AnalyticRep> {
        analytic_completion(u, &self.tol)
    }

    /// `∫ f dω` for a field on the solver nodes.
    pub fn integrate_omega(&self, f: &BoundaryField) -> Result<C64> {
        super::integrate_omega(f, &self.omega, &self.sampling)
    }

    /// `∫ f dω` for a real-valued slice on the solver nodes.
    pub fn integrate_omega_real(&self, f: &[f64]) -> f64 {
        crate::geometry::compensated_sum(f.iter().zip(self.omega.weights()).map(|(a, b)| a * b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn disk_context_has_empty_period_machinery() {
        let d = CircularDomain::unit_disk(C64::new(0.0, 0.0)).unwrap();
        let ctx = HarmonicContext::new(&d, 32, 8, Tolerances::default()).unwrap();
        assert!(ctx.units().is_empty());
        assert!(ctx.q_functions().is_empty());
        assert_eq!(ctx.period_matrix().dim(), 0);
        let u = ctx.solve(&BoundaryField::from_fn(ctx.sampling(), |w| C64::new(w.re, 0.0))).unwrap();
        let (a, v) = ctx.correct(&u).unwrap();
        assert!(a.is_trivial());
        assert_abs_diff_eq!(v.eval_unchecked(C64::new(0.3, 0.0)), 0.3, epsilon = 1e-13);
        let g = ctx.green();
        assert_abs_diff_eq!(g.eval(C64::new(0.5, 0.0)).unwrap(), -(0.5f64).ln(), epsilon = 1e-13);
    }
}
