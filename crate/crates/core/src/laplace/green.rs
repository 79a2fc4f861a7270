use num_complex::Complex64 as C64;

use super::{DirichletSolver, HarmonicRep, Tolerances};
use crate::error::{Error, Result};
use crate::geometry::{fmt_point, BoundaryField, BoundarySampling, CircularDomain};
use crate::par;

/// Green's function `g(w, p) = −log|w − p| + u(w)` with `u` the harmonic
/// extension of `log|w − p|`, so `g = 0` on Γ and `g > 0` in Ω.
#[derive(Debug, Clone)]
pub struct GreensFunction {
    pole: C64,
    regular: HarmonicRep,
}

impl GreensFunction {
    pub fn pole(&self) -> C64 {
        self.pole
    }

    /// The harmonic part `u`.
    pub fn regular_part(&self) -> &HarmonicRep {
        &self.regular
    }

    pub fn eval(&self, w: C64) -> Result<f64> {
        if !self.regular.domain().contains(w) || w == self.pole {
            return Err(Error::Domain(fmt_point(w)));
        }
        Ok(self.eval_unchecked(w))
    }

    pub fn eval_unchecked(&self, w: C64) -> f64 {
        -(w - self.pole).norm().ln() + self.regular.eval_unchecked(w)
    }

    /// `∂g/∂n` at the nodes of `s`, normal into Ω.
    pub fn normal_derivative(&self, s: &BoundarySampling) -> BoundaryField {
        let vals = par::map_range(s.len(), |i| {
            let w = s.nodes()[i];
            let d = self.regular.complex_derivative(w) - 1.0 / (w - self.pole);
            C64::new((d * s.normals()[i]).re, 0.0)
        });
        BoundaryField::new(s, vals).expect("sized from the sampling")
    }
}

pub fn greens_function(solver: &DirichletSolver, pole: C64, tol: &Tolerances) -> Result<GreensFunction> {
    if !solver.domain().contains(pole) {
        return Err(Error::Domain(fmt_point(pole)));
    }
    let data = BoundaryField::from_fn(solver.sampling(), |w| C64::new((w - pole).norm().ln(), 0.0));
    let regular = solver.solve(&data, tol)?;
    Ok(GreensFunction { pole, regular })
}

/// Harmonic measure of the base point, sampled on the boundary nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaDensity {
    density: Vec<f64>,
    weights: Vec<f64>,
    mass: f64,
    component_mass: Vec<f64>,
}

impl OmegaDensity {
    /// `dω/ds` at every node.
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Quadrature weights for `dω`: density times arclength weight.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `ω(Γ_j)` for each component.
    pub fn component_mass(&self) -> &[f64] {
        &self.component_mass
    }

    pub fn min_density(&self) -> f64 {
        self.density.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `dω/ds = (1/2π)·∂g/∂n` for the Green's function with pole at the base
/// point. Fails with [`Error::Mass`] when the total mass misses 1 or the
/// density is not positive.
pub fn harmonic_measure_density(
    domain: &CircularDomain,
    solver: &DirichletSolver,
    tol: &Tolerances,
) -> Result<OmegaDensity> {
    let green = greens_function(solver, domain.base_point(), tol)?;
    density_from_green(&green, solver.sampling(), tol)
}

pub(crate) fn density_from_green(
    green: &GreensFunction,
    s: &BoundarySampling,
    tol: &Tolerances,
) -> Result<OmegaDensity> {
    let dn = green.normal_derivative(s);
    let density: Vec<f64> = dn.values().iter().map(|v| v.re / (2.0 * std::f64::consts::PI)).collect();
    let weights: Vec<f64> = density.iter().zip(s.weights()).map(|(d, w)| d * w).collect();
    let component_mass: Vec<f64> =
        (0..s.n_components()).map(|j| s.component_range(j).map(|i| weights[i]).sum()).collect();
    let mass: f64 = component_mass.iter().sum();
    let positive = density.iter().all(|d| *d > 0.0);
    if !((mass - 1.0).abs() <= tol.mass) || !positive {
        return Err(Error::Mass { mass, tol: tol.mass });
    }
    Ok(OmegaDensity { density, weights, mass, component_mass })
}

/// `∫_Γ f dω` by node quadrature.
pub fn integrate_omega(f: &BoundaryField, omega: &OmegaDensity, s: &BoundarySampling) -> Result<C64> {
    s.check(f)?;
    if omega.weights.len() != f.len() {
        return Err(Error::Shape(format!("density has {} nodes, field has {}", omega.weights.len(), f.len())));
    }
    Ok(f.values().iter().zip(&omega.weights).map(|(v, w)| v * *w).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Circle;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn disk_density_is_uniform() {
        let d = CircularDomain::unit_disk(C64::new(0.0, 0.0)).unwrap();
        let s = BoundarySampling::new(&d, 64).unwrap();
        let tol = Tolerances::default();
        let solver = DirichletSolver::new(&d, &s, 8, &tol).unwrap();
        let om = harmonic_measure_density(&d, &solver, &tol).unwrap();
        for x in om.density() {
            assert_abs_diff_eq!(*x, 1.0 / (2.0 * PI), epsilon = 1e-13);
        }
        assert_abs_diff_eq!(om.mass(), 1.0, epsilon = 1e-13);
    }

    // Poisson kernel oracle for an off-centre base point in the disk.
    #[test]
    fn disk_density_matches_poisson_kernel() {
        let p = C64::new(0.3, 0.2);
        let d = CircularDomain::unit_disk(p).unwrap();
        let s = BoundarySampling::new(&d, 128).unwrap();
        let tol = Tolerances::default();
        let solver = DirichletSolver::new(&d, &s, 48, &tol).unwrap();
        let om = harmonic_measure_density(&d, &solver, &tol).unwrap();
        for (w, x) in s.nodes().iter().zip(om.density()) {
            let poisson = (1.0 - p.norm_sqr()) / (2.0 * PI * (w - p).norm_sqr());
            assert_abs_diff_eq!(*x, poisson, epsilon = 1e-12);
        }
    }

    // Annulus with base point on the real axis at radius ρ: the harmonic
    // measure of the inner circle is log ρ / log r (the unit h_1 at ρ).
    #[test]
    fn annulus_component_mass_matches_log_ratio() {
        let rho = 0.75;
        let d = CircularDomain::annulus(0.5, C64::new(rho, 0.0)).unwrap();
        let s = BoundarySampling::new(&d, 256).unwrap();
        let tol = Tolerances::default();
        let solver = DirichletSolver::new(&d, &s, 96, &tol).unwrap();
        let om = harmonic_measure_density(&d, &solver, &tol).unwrap();
        assert_abs_diff_eq!(om.component_mass()[1], rho.ln() / 0.5f64.ln(), epsilon = 1e-10);
        assert!(om.min_density() > 0.0);
        let g = greens_function(&solver, d.base_point(), &tol).unwrap();
        assert!(g.eval(C64::new(-0.7, 0.1)).unwrap() > 0.0);
        assert!(g.eval(d.base_point()).is_err());
    }

    #[test]
    fn annulus_green_vanishes_between_nodes() {
        let d = CircularDomain::annulus(0.5, C64::new(0.75, 0.0)).unwrap();
        let s = BoundarySampling::new(&d, 256).unwrap();
        let tol = Tolerances::default();
        let solver = DirichletSolver::new(&d, &s, 96, &tol).unwrap();
        let g = greens_function(&solver, d.base_point(), &tol).unwrap();
        let mid = BoundarySampling::with_shift(&d, 256, 0.5).unwrap();
        let worst = mid.nodes().iter().map(|w| g.eval_unchecked(*w).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "max |g| on the boundary = {worst:e}");
    }

    #[test]
    fn green_is_symmetric() {
        let d = CircularDomain::new(
            Circle::new(C64::new(0.0, 0.0), 1.0),
            vec![Circle::new(C64::new(-0.4, 0.0), 0.15), Circle::new(C64::new(0.4, 0.0), 0.15)],
            C64::new(0.0, 0.0),
        )
        .unwrap();
        let s = BoundarySampling::new(&d, 256).unwrap();
        let tol = Tolerances::default();
        let solver = DirichletSolver::new(&d, &s, 96, &tol).unwrap();
        let a = C64::new(0.1, 0.5);
        let b = C64::new(-0.2, -0.45);
        let ga = greens_function(&solver, a, &tol).unwrap();
        let gb = greens_function(&solver, b, &tol).unwrap();
        assert_abs_diff_eq!(ga.eval(b).unwrap(), gb.eval(a).unwrap(), epsilon = 1e-10);
    }

    #[test]
    fn mass_error_when_underresolved() {
        let d = CircularDomain::annulus(0.5, C64::new(0.95, 0.0)).unwrap();
        let s = BoundarySampling::new(&d, 16).unwrap();
        let tol = Tolerances { boundary_residual: 1.0, ..Default::default() };
        let solver = DirichletSolver::new(&d, &s, 4, &tol).unwrap();
        let err = harmonic_measure_density(&d, &solver, &tol).unwrap_err();
        assert_eq!(err.kind(), "MassError");
    }
}
