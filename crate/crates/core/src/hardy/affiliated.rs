use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{is_outer, outer_from_log_modulus, AnalyticRep, Holomorphic, ZeroFreeForm};
use crate::error::{Error, Result};
use crate::geometry::BoundaryField;
use crate::laplace::{HarmonicContext, HarmonicUnit};
use crate::par;

/// Pieces of the graph map `Φ(g) = (η·b·g, ψ·a·g)` with `a = u/F`,
/// `b = v/F` and `F` outer with `|F| ≍ |u| + |v|`.
#[derive(Debug, Clone)]
pub struct AffiliatedReport {
    pub a: AnalyticRep,
    pub b: AnalyticRep,
    pub f: ZeroFreeForm,
    pub unit: HarmonicUnit,
    pub stats: AffiliatedStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffiliatedStats {
    /// `min (|a| + |b|)` over nodes and midpoints.
    pub c: f64,
    /// `max (|a| + |b|)` over nodes and midpoints.
    pub big_c: f64,
    /// Per-component mean of `|a| + |b|`.
    pub component_level: Vec<f64>,
    pub a_fit_residual: f64,
    pub b_fit_residual: f64,
    /// `max |Φ(F) − (η·v, ψ·u)|` on nodes and midpoints, relative.
    pub graph_residual: f64,
}

fn fit_ratio<N: Holomorphic + ?Sized>(
    num: &N,
    den: &ZeroFreeForm,
    ctx: &HarmonicContext,
) -> Result<(AnalyticRep, f64)> {
    let s = ctx.sampling();
    let vals: Vec<C64> = par::map(s.nodes(), |w| num.eval(*w) / den.eval(*w));
    let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let (rep, node) = ctx.fitter().fit(&BoundaryField::new(s, vals)?)?;
    let mid = par::map(ctx.midpoints().nodes(), |w| (rep.eval(*w) - num.eval(*w) / den.eval(*w)).norm());
    let misfit = mid.into_iter().fold(node, f64::max) / scale.max(f64::MIN_POSITIVE);
    let tol = ctx.tolerances().fit_residual;
    if !(misfit <= tol) {
        return Err(Error::Fit { residual: misfit, tol });
    }
    Ok((rep, misfit))
}

/// Builds `a`, `b` for inner `ψ, η` and bounded outer `u, v`, and measures
/// the constants in `c ≤ |a| + |b| ≤ C`.
pub fn affiliated_graph<P, E, U, V>(psi: &P, eta: &E, u: &U, v: &V, ctx: &HarmonicContext) -> Result<AffiliatedReport>
where
    P: Holomorphic + ?Sized,
    E: Holomorphic + ?Sized,
    U: Holomorphic + ?Sized,
    V: Holomorphic + ?Sized,
{
    for (name, check) in [("u", is_outer(u, ctx)), ("v", is_outer(v, ctx))] {
        let ok = match check {
            Ok(c) => c.outer,
            Err(Error::Precondition(_)) => false,
            Err(e) => return Err(e),
        };
        if !ok {
            return Err(Error::Precondition(format!("{name} must be a nonzero outer function")));
        }
    }
    let s = ctx.sampling();
    let logsum = BoundaryField::from_fn(s, |w| C64::new((u.eval(w).norm() + v.eval(w).norm()).ln(), 0.0));
    let (f, unit) = outer_from_log_modulus(&logsum, ctx)?;
    let (a, a_fit_residual) = fit_ratio(u, &f, ctx)?;
    let (b, b_fit_residual) = fit_ratio(v, &f, ctx)?;

    let pts: Vec<C64> = s.nodes().iter().chain(ctx.midpoints().nodes()).copied().collect();
    let levels: Vec<f64> = par::map(&pts, |w| a.eval(*w).norm() + b.eval(*w).norm());
    let c = levels.iter().copied().fold(f64::INFINITY, f64::min);
    let big_c = levels.iter().copied().fold(0.0, f64::max);
    let component_level = (0..s.n_components())
        .map(|j| {
            let r = s.component_range(j);
            levels[r.clone()].iter().sum::<f64>() / r.len() as f64
        })
        .collect();
    let graph = par::map(&pts, |w| {
        let fw = f.eval(*w);
        let first = eta.eval(*w) * b.eval(*w) * fw - eta.eval(*w) * v.eval(*w);
        let second = psi.eval(*w) * a.eval(*w) * fw - psi.eval(*w) * u.eval(*w);
        let scale = (eta.eval(*w) * v.eval(*w)).norm() + (psi.eval(*w) * u.eval(*w)).norm();
        (first.norm() + second.norm()) / scale.max(f64::MIN_POSITIVE)
    });
    let graph_residual = graph.into_iter().fold(0.0, f64::max);
    Ok(AffiliatedReport {
        a,
        b,
        f,
        unit,
        stats: AffiliatedStats { c, big_c, component_level, a_fit_residual, b_fit_residual, graph_residual },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::tests::annulus_ctx;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_data_gives_constant_levels() {
        let ctx = annulus_ctx();
        let one = |_: C64| C64::new(1.0, 0.0);
        let r = affiliated_graph(&one, &one, &one, &one, &ctx).unwrap();
        assert_abs_diff_eq!(r.f.eval(C64::new(0.7, 0.2)).norm(), 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.stats.c, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.stats.big_c, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn monomial_pair_has_positive_bounds() {
        let ctx = annulus_ctx();
        let r = affiliated_graph(
            &|w: C64| w,
            &|_: C64| C64::new(1.0, 0.0),
            &|w: C64| w - 2.0,
            &|_: C64| C64::new(1.0, 0.0),
            &ctx,
        )
        .unwrap();
        assert!(r.stats.c > 0.0 && r.stats.big_c.is_finite());
        assert!(r.stats.c <= r.stats.big_c);
        assert!(r.stats.graph_residual < 1e-6);
    }

    #[test]
    fn rejects_zero_or_inner_data() {
        let ctx = annulus_ctx();
        let one = |_: C64| C64::new(1.0, 0.0);
        let zero = |_: C64| C64::new(0.0, 0.0);
        let err = affiliated_graph(&one, &one, &zero, &one, &ctx).unwrap_err();
        assert_eq!(err.kind(), "PreconditionError");
        let base = ctx.domain().base_point();
        let err = affiliated_graph(&one, &one, &move |w: C64| w - base, &one, &ctx).unwrap_err();
        assert_eq!(err.kind(), "PreconditionError");
    }
}
