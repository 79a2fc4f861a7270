use num_complex::Complex64 as C64;
use serde::Serialize;

use super::argument::{count_zeros_in_circle, locate_zeros, winding_vector, ZeroCluster, ZeroSearch};
use super::{is_inner, is_outer, probe_grid, AnalyticRep, Holomorphic, InnerCheck, ZeroFreeForm};
use crate::error::{Error, Result};
use crate::geometry::{fmt_point, BoundaryField, BoundarySampling};
use crate::laplace::{HarmonicContext, HarmonicUnit};
use crate::par;

/// `h = exp(completion(u − u₀))` with `u` the harmonic extension of the data
/// and `u₀ = Σ a_j h_j` the harmonic unit that kills the periods. On `Γ_j`,
/// `log|h| = data − a_j`.
pub fn outer_from_log_modulus(
    log_modulus: &BoundaryField,
    ctx: &HarmonicContext,
) -> Result<(ZeroFreeForm, HarmonicUnit)> {
    let limit = ctx.tolerances().max_log_modulus;
    if let Some(bad) = log_modulus.values().iter().find(|v| !(v.re.abs() <= limit)) {
        return Err(Error::UnboundedData(format!("log-modulus value {} outside ±{limit}", bad.re)));
    }
    let u = ctx.solve(log_modulus)?;
    let (correction, corrected) = ctx.correct(&u)?;
    let g = ctx.complete(&corrected)?;
    let unit = HarmonicUnit { a: correction.a.iter().map(|x| -x).collect() };
    Ok((ZeroFreeForm::exp(g), unit))
}

/// `b = ψ·h` with `h` outer and `|ψ|` constant on each component.
#[derive(Debug, Clone)]
pub struct SaitoSplit {
    pub psi: BoundaryField,
    pub h: ZeroFreeForm,
    pub unit: HarmonicUnit,
    /// Per-component relative deviation of `|ψ|` from its mean.
    pub psi_deviation: Vec<f64>,
}

pub fn saito_split(b: &BoundaryField, ctx: &HarmonicContext) -> Result<SaitoSplit> {
    let s = ctx.sampling();
    s.check(b)?;
    if b.values().iter().any(|v| !(v.norm() > 0.0) || !v.norm().is_finite()) {
        return Err(Error::UnboundedData("data vanishes or is infinite at a node; 1/b is unbounded".into()));
    }
    let log_mod = b.map(|v| C64::new(v.norm().ln(), 0.0));
    let (h, unit) = outer_from_log_modulus(&log_mod, ctx)?;
    let vals: Vec<C64> = b.values().iter().zip(s.nodes()).map(|(v, w)| v / h.eval(*w)).collect();
    let psi = BoundaryField::new(s, vals)?;
    let psi_deviation = (0..s.n_components())
        .map(|j| {
            let m: Vec<f64> = psi.component(j).iter().map(|v| v.norm()).collect();
            let mean = m.iter().sum::<f64>() / m.len() as f64;
            m.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max) / mean
        })
        .collect();
    Ok(SaitoSplit { psi, h, unit, psi_deviation })
}

/// `f = φ·g` with `φ` inner (normalized, `|φ| = 1` on Γ₀) and `g` outer.
#[derive(Debug, Clone)]
pub struct InnerOuterResult {
    pub inner: AnalyticRep,
    pub outer: ZeroFreeForm,
    /// `|φ|` on each component; entry 0 is 1.
    pub component_moduli: Vec<f64>,
    /// `a` with `|φ| = e^{a_j}` on `Γ_j`.
    pub unit: HarmonicUnit,
    pub winding: Vec<i64>,
    pub zeros_in_domain: i64,
    /// `max |f − φg|` over nodes and midpoints, relative to `max |f|`.
    pub residual: f64,
    /// Series fit misfit of `φ`, relative to `max |φ|`.
    pub fit_residual: f64,
    pub inner_check: InnerCheck,
}

impl InnerOuterResult {
    pub fn summary(&self) -> FactorSummary {
        FactorSummary {
            component_moduli: self.component_moduli.clone(),
            unit: self.unit.a.clone(),
            winding: self.winding.clone(),
            zeros_in_domain: self.zeros_in_domain,
            residual: self.residual,
            fit_residual: self.fit_residual,
            inner: self.inner_check.inner,
            inner_deviation: self.inner_check.deviations.iter().copied().fold(0.0, f64::max),
        }
    }
}

/// Serializable digest of an [`InnerOuterResult`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorSummary {
    pub component_moduli: Vec<f64>,
    pub unit: Vec<f64>,
    pub winding: Vec<i64>,
    pub zeros_in_domain: i64,
    pub residual: f64,
    pub fit_residual: f64,
    pub inner: bool,
    pub inner_deviation: f64,
}

fn nonvanishing_trace<H: Holomorphic + ?Sized>(f: &H, s: &BoundarySampling) -> Result<(Vec<C64>, f64)> {
    let vals: Vec<C64> = par::map(s.nodes(), |w| f.eval(*w));
    let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Precondition("function must be nonzero and finite on the boundary".into()));
    }
    if let Some(i) = vals.iter().position(|v| !(v.norm() > 1e-14 * scale)) {
        return Err(Error::BoundaryZero(format!("function vanishes at boundary node {}", fmt_point(s.nodes()[i]))));
    }
    Ok((vals, scale))
}

/// Fits `num/den` (node values) by a series and checks the fit at the
/// midpoints against the same quotient. Returns the series and the relative
/// misfit.
fn fit_quotient<N, D>(num: &N, den: &D, ctx: &HarmonicContext) -> Result<(AnalyticRep, f64)>
where
    N: Holomorphic + ?Sized,
    D: Holomorphic + ?Sized,
{
    let s = ctx.sampling();
    let q: Vec<C64> = par::map(s.nodes(), |w| num.eval(*w) / den.eval(*w));
    let scale = q.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let (rep, node_misfit) = ctx.fitter().fit(&BoundaryField::new(s, q)?)?;
    let mid = par::map(ctx.midpoints().nodes(), |w| (rep.eval(*w) - num.eval(*w) / den.eval(*w)).norm());
    let misfit = mid.into_iter().fold(node_misfit, f64::max);
    Ok((rep, misfit / scale.max(f64::MIN_POSITIVE)))
}

pub fn inner_outer_factor<H: Holomorphic + ?Sized>(f: &H, ctx: &HarmonicContext) -> Result<InnerOuterResult> {
    let s = ctx.sampling();
    let (vals, scale) = nonvanishing_trace(f, s)?;
    let log_mod = BoundaryField::from_real(s, vals.iter().map(|v| v.norm().ln()).collect())?;
    let (mut g, unit) = outer_from_log_modulus(&log_mod, ctx)?;
    let (mut phi, fit_residual) = fit_quotient(f, &g, ctx)?;
    if !(fit_residual <= ctx.tolerances().fit_residual) {
        return Err(Error::Fit { residual: fit_residual, tol: ctx.tolerances().fit_residual });
    }
    // Ray convention: φ is real and positive at the first outer node.
    let theta = phi.eval(s.nodes()[0]).arg();
    phi = phi.scale(C64::from_polar(1.0, -theta));
    g.rotate(theta);
    let residual = s
        .nodes()
        .iter()
        .chain(ctx.midpoints().nodes())
        .map(|w| (f.eval(*w) - phi.eval(*w) * g.eval(*w)).norm())
        .fold(0.0, f64::max)
        / scale;
    let winding = winding_vector(f, s)?;
    let inner_check = is_inner(&phi, s, ctx.tolerances().inner);
    let component_moduli = std::iter::once(1.0).chain(unit.a.iter().map(|a| a.exp())).collect();
    Ok(InnerOuterResult {
        inner: phi,
        outer: g,
        component_moduli,
        unit,
        winding: winding.holes,
        zeros_in_domain: winding.zeros_in_domain,
        residual,
        fit_residual,
        inner_check,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvertibilityCheck {
    pub invertible: bool,
    pub zeros_in_domain: i64,
    pub min_probe_modulus: f64,
    /// Verdict of the independent outer test.
    pub outer: bool,
    pub agree: bool,
}

/// Zero-free in Ω (argument principle and probe grid), cross-checked
/// against the outer test.
pub fn is_invertible_inner<H: Holomorphic + ?Sized>(phi: &H, ctx: &HarmonicContext) -> Result<InvertibilityCheck> {
    let s = ctx.sampling();
    let (_, scale) = nonvanishing_trace(phi, s)?;
    let w = winding_vector(phi, s)?;
    let probes = probe_grid(ctx.domain(), 41, 0.02 * ctx.domain().min_radius());
    let min_probe_modulus = par::map(&probes, |p| phi.eval(*p).norm()).into_iter().fold(f64::INFINITY, f64::min);
    let invertible = w.zeros_in_domain == 0 && min_probe_modulus > 1e-12 * scale;
    let outer = is_outer(phi, ctx)?.outer;
    Ok(InvertibilityCheck {
        invertible,
        zeros_in_domain: w.zeros_in_domain,
        min_probe_modulus,
        outer,
        agree: outer == invertible,
    })
}

fn check_zero_set(zeros: &[(C64, usize)], ctx: &HarmonicContext) -> Result<()> {
    for (z, nu) in zeros {
        if *nu == 0 {
            return Err(Error::Config(format!("zero {} has multiplicity 0", fmt_point(*z))));
        }
        let d = ctx.domain().boundary_distance(*z);
        if d.abs() <= 1e-9 {
            return Err(Error::ZeroOnBoundary(fmt_point(*z)));
        }
        if d < 0.0 {
            return Err(Error::Domain(fmt_point(*z)));
        }
    }
    Ok(())
}

/// Inner part of `Π (w − z_i)^{ν_i}`, with each zero and multiplicity
/// verified by a small-circle argument-principle count.
pub fn zero_based_inner(zeros: &[(C64, usize)], ctx: &HarmonicContext) -> Result<InnerOuterResult> {
    check_zero_set(zeros, ctx)?;
    let pts: Vec<(C64, i32)> = zeros.iter().map(|(z, nu)| (*z, *nu as i32)).collect();
    let poly = move |w: C64| pts.iter().fold(C64::new(1.0, 0.0), |acc, (z, nu)| acc * (w - z).powi(*nu));
    let res = inner_outer_factor(&poly, ctx)?;
    for (i, (z, nu)) in zeros.iter().enumerate() {
        let sep = zeros
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, (y, _))| (y - z).norm())
            .fold(f64::INFINITY, f64::min);
        let radius = 0.5 * ctx.domain().boundary_distance(*z).min(sep);
        let count = count_zeros_in_circle(&res.inner, *z, radius)?;
        if count != *nu as i64 {
            return Err(Error::ZeroLocalization(format!(
                "inner factor has {count} zeros near {}, expected {nu}",
                fmt_point(*z)
            )));
        }
    }
    Ok(res)
}

/// Zero set with multiplicities shared by two finite zero sets; points
/// closer than `1e−9` are identified.
pub fn gcd_zero_based(a: &[(C64, usize)], b: &[(C64, usize)]) -> Vec<(C64, usize)> {
    a.iter()
        .filter_map(|(z, m)| b.iter().find(|(y, _)| (y - z).norm() < 1e-9).map(|(_, n)| (*z, (*m).min(*n))))
        .collect()
}

/// `φ = φ₀·φ₁` with `φ₀` carrying every zero of `φ` in Ω.
#[derive(Debug, Clone)]
pub struct BlaschkeSplit {
    pub zeros: Vec<ZeroCluster>,
    pub blaschke: AnalyticRep,
    pub singular: AnalyticRep,
    pub singular_check: InvertibilityCheck,
    pub singular_inner: InnerCheck,
    pub fit_residual: f64,
}

/// Modified Newton polish of a zero of known multiplicity.
pub(crate) fn polish(f: &AnalyticRep, z: C64, m: usize) -> C64 {
    let mut z = z;
    for _ in 0..30 {
        let d = f.derivative(z);
        if d.norm() == 0.0 {
            break;
        }
        let step = f.eval(z) / d * m as f64;
        if !step.norm().is_finite() || step.norm() > 1e-3 {
            break;
        }
        z -= step;
        if step.norm() < 1e-15 {
            break;
        }
    }
    z
}

/// Separates the zeros of an inner function from its zero-free part. With
/// analytic boundaries a finite series has no singular inner factor, so the
/// zero-free part is certified invertible instead.
pub fn blaschke_singular_split(phi: &AnalyticRep, ctx: &HarmonicContext) -> Result<BlaschkeSplit> {
    let s = ctx.sampling();
    let w = winding_vector(phi, s)?;
    let clusters = locate_zeros(phi, s, w.zeros_in_domain, ZeroSearch::default())?;
    let zeros: Vec<ZeroCluster> =
        clusters.iter().map(|c| ZeroCluster { location: polish(phi, c.location, c.multiplicity), ..*c }).collect();
    let set: Vec<(C64, usize)> = zeros.iter().map(|c| (c.location, c.multiplicity)).collect();
    let phi0 = zero_based_inner(&set, ctx)?.inner;
    let (phi1, fit_residual) = fit_quotient(phi, &phi0, ctx)?;
    if !(fit_residual <= ctx.tolerances().fit_residual) {
        return Err(Error::Fit { residual: fit_residual, tol: ctx.tolerances().fit_residual });
    }
    let singular_check = is_invertible_inner(&phi1, ctx)?;
    let singular_inner = is_inner(&phi1, s, ctx.tolerances().inner);
    Ok(BlaschkeSplit { zeros, blaschke: phi0, singular: phi1, singular_check, singular_inner, fit_residual })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivisibilityCheck {
    pub divides: bool,
    /// Relative misfit of the quotient series on nodes and midpoints.
    pub fit_residual: f64,
    /// `max |q|` on the interior probe grid over `max |q|` on Γ.
    pub interior_ratio: f64,
}

/// `φ | ψ`: the quotient `ψ/φ` fits an analytic series and stays bounded.
pub fn divides<A, B>(phi: &A, psi: &B, ctx: &HarmonicContext) -> Result<DivisibilityCheck>
where
    A: Holomorphic + ?Sized,
    B: Holomorphic + ?Sized,
{
    let s = ctx.sampling();
    nonvanishing_trace(phi, s)?;
    let (q, fit_residual) = fit_quotient(psi, phi, ctx)?;
    let bmax = s.nodes().iter().map(|w| q.eval(*w).norm()).fold(0.0, f64::max);
    let probes = probe_grid(ctx.domain(), 31, 0.02 * ctx.domain().min_radius());
    let imax = par::map(&probes, |p| q.eval(*p).norm()).into_iter().fold(0.0, f64::max);
    let interior_ratio = imax / bmax.max(f64::MIN_POSITIVE);
    let divides = fit_residual < ctx.tolerances().divides && interior_ratio <= 1.0 + 1e-6;
    Ok(DivisibilityCheck { divides, fit_residual, interior_ratio })
}

/// `φ | ψ` and `ψ | φ`.
pub fn equivalent_inner<A, B>(phi: &A, psi: &B, ctx: &HarmonicContext) -> Result<bool>
where
    A: Holomorphic + ?Sized,
    B: Holomorphic + ?Sized,
{
    Ok(divides(phi, psi, ctx)?.divides && divides(psi, phi, ctx)?.divides)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Circle, CircularDomain};
    use crate::hardy::tests::annulus_ctx;
    use crate::laplace::Tolerances;
    use approx::assert_abs_diff_eq;

    #[test]
    fn outer_from_constant_and_log_data() {
        let ctx = annulus_ctx();
        let s = ctx.sampling();
        let (h, a) = outer_from_log_modulus(&BoundaryField::constant(s, C64::new(0.0, 0.0)), &ctx).unwrap();
        assert!(a.a.iter().all(|x| x.abs() < 1e-12));
        assert_abs_diff_eq!((h.eval(C64::new(0.8, 0.0)) - 1.0).norm(), 0.0, epsilon = 1e-12);

        let data = BoundaryField::from_fn(s, |w| C64::new(w.norm().ln(), 0.0));
        let (h, a) = outer_from_log_modulus(&data, &ctx).unwrap();
        assert_abs_diff_eq!(a.a[0], -(2.0f64.ln()), epsilon = 1e-10);
        assert_abs_diff_eq!((h.eval(C64::new(-0.1, 0.7)) - 1.0).norm(), 0.0, epsilon = 1e-10);

        let data = BoundaryField::from_fn(s, |w| C64::new((w - 2.0).norm().ln(), 0.0));
        let (h, a) = outer_from_log_modulus(&data, &ctx).unwrap();
        assert!(a.a[0].abs() < 1e-10);
        let r0 = h.eval(C64::new(0.6, 0.2)) / (C64::new(0.6, 0.2) - 2.0);
        let r1 = h.eval(C64::new(-0.3, -0.7)) / (C64::new(-0.3, -0.7) - 2.0);
        assert_abs_diff_eq!(r0.norm(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!((r0 - r1).norm(), 0.0, epsilon = 1e-10);

        let bad = BoundaryField::constant(s, C64::new(f64::NEG_INFINITY, 0.0));
        assert_eq!(outer_from_log_modulus(&bad, &ctx).unwrap_err().kind(), "UnboundedDataError");
    }

    #[test]
    fn saito_split_examples() {
        let ctx = annulus_ctx();
        let s = ctx.sampling();
        let b = BoundaryField::from_fn(s, |w| C64::new(1.0 / (w.norm() + 1.0), 0.0));
        let split = saito_split(&b, &ctx).unwrap();
        assert!(split.psi_deviation.iter().all(|d| *d < 1e-8));
        let one = BoundaryField::constant(s, C64::new(1.0, 0.0));
        let split = saito_split(&one, &ctx).unwrap();
        assert!(split.psi.values().iter().all(|v| (v - 1.0).norm() < 1e-12));
        let zero_arc = BoundaryField::from_fn(s, |w| C64::new(w.re.max(0.0), 0.0));
        assert_eq!(saito_split(&zero_arc, &ctx).unwrap_err().kind(), "UnboundedDataError");
    }

    #[test]
    fn factor_outer_function() {
        let ctx = annulus_ctx();
        let r = inner_outer_factor(&|w: C64| w - 2.0, &ctx).unwrap();
        assert!(r.residual < 1e-10);
        assert!(r.inner_check.inner);
        let p = C64::new(0.2, -0.6);
        assert_abs_diff_eq!((r.inner.eval(p) - 1.0).norm(), 0.0, epsilon = 1e-9);
        assert_eq!(r.winding, vec![0]);
    }

    #[test]
    fn factor_product_with_monomial() {
        let ctx = annulus_ctx();
        let f = |w: C64| w * (w - 2.0);
        let r = inner_outer_factor(&f, &ctx).unwrap();
        assert!(r.residual < 1e-6);
        assert_eq!(r.winding, vec![1]);
        assert_abs_diff_eq!(r.component_moduli[1], 0.5, epsilon = 1e-9);
        assert!(equivalent_inner(&r.inner, &|w: C64| w, &ctx).unwrap());
        assert!(is_invertible_inner(&r.inner, &ctx).unwrap().invertible);
    }

    // Zero inside the hole: the inner part is w (up to rotation), and
    // log|φ(ŵ)| = a_1 h_1(ŵ).
    #[test]
    fn factor_with_zero_in_hole() {
        let ctx = annulus_ctx();
        let f = |w: C64| w - 0.25;
        let r = inner_outer_factor(&f, &ctx).unwrap();
        let base = ctx.domain().base_point();
        let h1 = ctx.units()[0].eval_unchecked(base);
        assert_abs_diff_eq!(r.inner.eval(base).norm().ln(), r.unit.a[0] * h1, epsilon = 1e-9);
        assert!(r.unit.a[0].abs() > 0.1);
        let gap = is_outer(&f, &ctx).unwrap().gap.unwrap();
        assert!(gap.abs() < 1e-9);
    }

    #[test]
    fn zero_based_inner_examples() {
        let ctx = annulus_ctx();
        let base = ctx.domain().base_point();
        let r = zero_based_inner(&[], &ctx).unwrap();
        assert_abs_diff_eq!((r.inner.eval(C64::new(0.7, 0.3)) - 1.0).norm(), 0.0, epsilon = 1e-10);
        let r = zero_based_inner(&[(base, 1)], &ctx).unwrap();
        assert!(r.inner_check.inner);
        assert_eq!(r.zeros_in_domain, 1);
        assert!(r.inner.eval(base).norm() < 1e-9);
        let z0 = C64::new(-0.3, 0.6);
        let r = zero_based_inner(&[(z0, 2)], &ctx).unwrap();
        assert_eq!(count_zeros_in_circle(&r.inner, z0, 0.05).unwrap(), 2);
        let err = zero_based_inner(&[(C64::new(0.0, 1.0), 1)], &ctx).unwrap_err();
        assert_eq!(err.kind(), "ZeroOnBoundaryError");
    }

    #[test]
    fn invertibility_examples() {
        let ctx = annulus_ctx();
        let c = is_invertible_inner(&|w: C64| w, &ctx).unwrap();
        assert!(c.invertible && c.agree);
        let c = is_invertible_inner(&|_: C64| C64::new(1.0, 0.0), &ctx).unwrap();
        assert!(c.invertible && c.agree);
        let base = ctx.domain().base_point();
        let phi = inner_outer_factor(&move |w: C64| (w - base) * (w - 2.0), &ctx).unwrap().inner;
        let c = is_invertible_inner(&phi, &ctx).unwrap();
        assert!(!c.invertible && c.agree);
    }

    #[test]
    fn blaschke_split_examples() {
        let ctx = annulus_ctx();
        let base = ctx.domain().base_point();
        let w_rep = ctx.fitter().fit(&crate::series::trace(&|w: C64| w, ctx.sampling())).unwrap().0;
        let split = blaschke_singular_split(&w_rep, &ctx).unwrap();
        assert!(split.zeros.is_empty());
        assert!(split.singular_check.invertible);
        assert_abs_diff_eq!((split.singular.eval(C64::new(0.6, 0.1)) - C64::new(0.6, 0.1)).norm(), 0.0, epsilon = 1e-9);

        let phi = zero_based_inner(&[(base, 1)], &ctx).unwrap().inner;
        let split = blaschke_singular_split(&phi, &ctx).unwrap();
        assert_eq!(split.zeros.len(), 1);
        assert_abs_diff_eq!((split.zeros[0].location - base).norm(), 0.0, epsilon = 1e-9);
        assert!(split.singular_check.invertible);
        assert!(equivalent_inner(&split.blaschke, &phi, &ctx).unwrap());
    }

    #[test]
    fn divisibility_examples() {
        let ctx = annulus_ctx();
        let w = |w: C64| w;
        let w2 = |w: C64| w * w;
        assert!(divides(&w, &w2, &ctx).unwrap().divides);
        assert!(divides(&w2, &w, &ctx).unwrap().divides);
        assert!(equivalent_inner(&w, &|w: C64| w.powi(3), &ctx).unwrap());
        let base = ctx.domain().base_point();
        let phi = zero_based_inner(&[(base, 1)], &ctx).unwrap().inner;
        let one = |_: C64| C64::new(1.0, 0.0);
        let c = divides(&phi, &one, &ctx).unwrap();
        assert!(!c.divides);
        assert!(divides(&one, &phi, &ctx).unwrap().divides);
        assert!(!equivalent_inner(&phi, &one, &ctx).unwrap());
        assert!(equivalent_inner(&phi, &phi, &ctx).unwrap());
    }

    #[test]
    fn gcd_takes_min_multiplicity() {
        let a = [(C64::new(0.1, 0.6), 2), (C64::new(-0.7, 0.0), 1)];
        let b = [(C64::new(0.1, 0.6), 1), (C64::new(0.0, -0.7), 3)];
        assert_eq!(gcd_zero_based(&a, &b), vec![(C64::new(0.1, 0.6), 1)]);
    }

    #[test]
    fn two_hole_factorization() {
        let d = CircularDomain::new(
            Circle::new(C64::new(0.0, 0.0), 1.0),
            vec![Circle::new(C64::new(-0.4, 0.0), 0.15), Circle::new(C64::new(0.4, 0.0), 0.15)],
            C64::new(0.0, 0.0),
        )
        .unwrap();
        let ctx = HarmonicContext::new(&d, 256, 96, Tolerances::default()).unwrap();
        let f = |w: C64| (w + 0.4) * (w - C64::new(0.1, 0.5)) * (w - 3.0);
        let r = inner_outer_factor(&f, &ctx).unwrap();
        assert!(r.residual < 1e-6);
        assert_eq!(r.winding, vec![1, 0]);
        assert_eq!(r.zeros_in_domain, 1);
        assert!(r.inner_check.inner);
        let split = blaschke_singular_split(&r.inner, &ctx).unwrap();
        assert_eq!(split.zeros.len(), 1);
        assert_abs_diff_eq!((split.zeros[0].location - C64::new(0.1, 0.5)).norm(), 0.0, epsilon = 1e-8);
        assert!(split.singular_check.invertible);
    }
}
