//! Hardy-space layer: inner/outer predicates, outer functions from boundary
//! moduli, inner-outer and Blaschke/singular factorization, winding vectors,
//! divisibility of inner functions and the affiliated graph map.

mod affiliated;
mod argument;
mod expr;
mod factor;

pub use affiliated::{affiliated_graph, AffiliatedReport, AffiliatedStats};
pub use argument::{count_zeros_in_circle, locate_zeros, winding_vector, WindingReport, ZeroCluster, ZeroSearch};
pub use expr::{CorpusFunction, Expr, PointTable};
pub(crate) use factor::polish;
pub use factor::{
    blaschke_singular_split, divides, equivalent_inner, gcd_zero_based, inner_outer_factor, is_invertible_inner,
    outer_from_log_modulus, saito_split, zero_based_inner, BlaschkeSplit, DivisibilityCheck, FactorSummary,
    InnerOuterResult, InvertibilityCheck, SaitoSplit,
};

use num_complex::Complex64 as C64;
use serde::Serialize;

pub use crate::series::{AnalyticRep, Holomorphic};

use crate::error::{Error, Result};
use crate::geometry::{BoundarySampling, CircularDomain};
use crate::laplace::HarmonicContext;
use crate::par;

/// `φ(w) = Π_j (w − a_j)^{k_j} · exp(g(w))`; zero-free on Ω by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroFreeForm {
    winding: Vec<i64>,
    anchors: Vec<C64>,
    exponent: AnalyticRep,
}

impl ZeroFreeForm {
    /// Anchors default to the hole centres.
    pub fn new(winding: Vec<i64>, exponent: AnalyticRep) -> Self {
        let anchors = exponent.domain().holes().iter().map(|h| h.center).collect();
        Self::with_anchors(winding, anchors, exponent)
    }

    pub fn with_anchors(winding: Vec<i64>, anchors: Vec<C64>, exponent: AnalyticRep) -> Self {
        assert_eq!(winding.len(), anchors.len());
        assert_eq!(winding.len(), exponent.domain().n_holes());
        ZeroFreeForm { winding, anchors, exponent }
    }

    /// `exp(g)`, the shape of every outer function built here.
    pub fn exp(exponent: AnalyticRep) -> Self {
        let n = exponent.domain().n_holes();
        Self::new(vec![0; n], exponent)
    }

    pub fn winding(&self) -> &[i64] {
        &self.winding
    }

    pub fn anchors(&self) -> &[C64] {
        &self.anchors
    }

    pub fn exponent(&self) -> &AnalyticRep {
        &self.exponent
    }

    pub fn domain(&self) -> &CircularDomain {
        self.exponent.domain()
    }

    /// Multiplies by the unimodular constant `e^{iθ}`.
    pub fn rotate(&mut self, theta: f64) {
        self.exponent.add_constant(C64::new(0.0, theta));
    }

    /// Multiplies by `e^{c}`.
    pub fn scale_exp(&mut self, c: C64) {
        self.exponent.add_constant(c);
    }

    /// `log|φ(w)|`.
    pub fn log_modulus(&self, w: C64) -> f64 {
        let mut s = self.exponent.eval(w).re;
        for (k, a) in self.winding.iter().zip(&self.anchors) {
            s += *k as f64 * (w - a).norm().ln();
        }
        s
    }
}

impl Holomorphic for ZeroFreeForm {
    fn eval(&self, w: C64) -> C64 {
        let mut v = self.exponent.eval(w).exp();
        for (k, a) in self.winding.iter().zip(&self.anchors) {
            if *k != 0 {
                v *= (w - a).powi(*k as i32);
            }
        }
        v
    }
}

/// Per-component arclength mean of `|f|` and max relative deviation from it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusProfile {
    pub means: Vec<f64>,
    pub deviations: Vec<f64>,
}

pub fn boundary_modulus_profile<H: Holomorphic + ?Sized>(f: &H, s: &BoundarySampling) -> ModulusProfile {
    let moduli: Vec<f64> = par::map(s.nodes(), |w| f.eval(*w).norm());
    let mut means = Vec::with_capacity(s.n_components());
    let mut deviations = Vec::with_capacity(s.n_components());
    for j in 0..s.n_components() {
        let vals = &moduli[s.component_range(j)];
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let dev = if mean > 0.0 { vals.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max) / mean } else { 0.0 };
        means.push(mean);
        deviations.push(dev);
    }
    ModulusProfile { means, deviations }
}

/// Outcome of the inner predicate. `moduli` are rescaled so that the outer
/// circle has modulus 1; `scale` is the factor removed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerCheck {
    pub inner: bool,
    pub moduli: Vec<f64>,
    pub scale: f64,
    pub deviations: Vec<f64>,
}

/// Constant modulus on each boundary component, within `tol` relative.
/// The zero function is inner.
pub fn is_inner<H: Holomorphic + ?Sized>(f: &H, s: &BoundarySampling, tol: f64) -> InnerCheck {
    let profile = boundary_modulus_profile(f, s);
    let scale = profile.means[0];
    let inner = profile.deviations.iter().all(|d| *d < tol);
    let moduli =
        if scale > 0.0 { profile.means.iter().map(|m| m / scale).collect() } else { vec![0.0; profile.means.len()] };
    InnerCheck { inner, moduli, scale, deviations: profile.deviations }
}

/// Both sides of the Jensen inequality `log|f(ŵ)| ≤ ∫ log|f| dω`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OuterCheck {
    pub outer: bool,
    /// `log|f(ŵ)|`; `None` when `f(ŵ) = 0`.
    pub log_at_base: Option<f64>,
    pub mean_log: f64,
    /// `∫ log|f| dω − log|f(ŵ)|`, nonnegative up to quadrature error.
    pub gap: Option<f64>,
    pub zero_at_base: bool,
}

/// Royden's outer test: equality in Jensen within `tol.outer`.
pub fn is_outer<H: Holomorphic + ?Sized>(f: &H, ctx: &HarmonicContext) -> Result<OuterCheck> {
    let s = ctx.sampling();
    let vals: Vec<C64> = par::map(s.nodes(), |w| f.eval(*w));
    let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Precondition("outer test needs a nonzero, finite function".into()));
    }
    if vals.iter().any(|v| v.norm() == 0.0) {
        return Err(Error::BoundaryZero("function vanishes at a boundary node".into()));
    }
    let logs: Vec<f64> = vals.iter().map(|v| v.norm().ln()).collect();
    let mean_log = ctx.integrate_omega_real(&logs);
    let at_base = f.eval(ctx.domain().base_point()).norm();
    if at_base <= 1e-14 * scale {
        return Ok(OuterCheck { outer: false, log_at_base: None, mean_log, gap: None, zero_at_base: true });
    }
    let log_at_base = at_base.ln();
    let gap = mean_log - log_at_base;
    Ok(OuterCheck {
        outer: gap <= ctx.tolerances().outer,
        log_at_base: Some(log_at_base),
        mean_log,
        gap: Some(gap),
        zero_at_base: false,
    })
}

/// Interior probe points at least `margin` from Γ on a regular grid.
pub(crate) fn probe_grid(domain: &CircularDomain, per_axis: usize, margin: f64) -> Vec<C64> {
    let o = domain.outer();
    let mut pts = Vec::new();
    for i in 0..per_axis {
        for j in 0..per_axis {
            let x = -1.0 + 2.0 * (i as f64 + 0.5) / per_axis as f64;
            let y = -1.0 + 2.0 * (j as f64 + 0.5) / per_axis as f64;
            let w = o.center + C64::new(x, y) * o.radius;
            if domain.contains(w) && domain.boundary_distance(w) > margin {
                pts.push(w);
            }
        }
    }
    pts
}
