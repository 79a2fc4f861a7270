use serde::Serialize;

use super::subspace::{
    beurling_angle, cyclicity_distance, extract_inner_generator, generate_invariant_subspace, invariance_defect,
    InnerPrediction,
};
use super::GalerkinSpace;
use crate::error::Result;
use crate::hardy::{equivalent_inner, inner_outer_factor, is_outer, Holomorphic};
use crate::laplace::HarmonicContext;
use crate::{geometry::BoundaryField, par};

/// Slack allowed when checking that a sweep is nonincreasing.
const MONOTONE_FLOOR: f64 = 1e-12;

/// One corpus element `f = φ·g`. When `inner` is absent the inner part is
/// taken from the inner-outer factorization of `f`.
pub struct CorpusEntry {
    pub label: String,
    pub f: Box<dyn Holomorphic>,
    pub inner: Option<Box<dyn Holomorphic>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeurlingConfig {
    pub degrees: Vec<usize>,
    /// Degree of the multiples `φ·r` required to lie in the model.
    pub d0: usize,
    /// Cyclicity distance at the largest degree below which `f` counts as cyclic.
    pub cyclic_threshold: f64,
    pub extract: bool,
}

impl Default for BeurlingConfig {
    fn default() -> Self {
        BeurlingConfig { degrees: vec![4, 8, 12], d0: 0, cyclic_threshold: 1e-2, extract: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeRecord {
    pub d: usize,
    pub rank: usize,
    pub angle: f64,
    pub generator_sine: f64,
    pub containment_sine: f64,
    pub cyclicity: f64,
    pub leakage: f64,
    pub invariance_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeurlingRecord {
    pub label: String,
    pub outer: bool,
    pub degrees: Vec<DegreeRecord>,
    pub angle_monotone: bool,
    pub cyclicity_monotone: bool,
    pub cyclic: bool,
    /// `cyclic == outer`.
    pub agrees: bool,
    /// Extracted generator equivalent to the inner part, when requested.
    pub extracted_equivalent: Option<bool>,
}

fn nonincreasing(xs: impl Iterator<Item = f64> + Clone) -> bool {
    xs.clone().zip(xs.skip(1)).all(|(a, b)| b <= a + MONOTONE_FLOOR)
}

fn run_entry(
    entry: &CorpusEntry,
    ctx: &HarmonicContext,
    space: &GalerkinSpace,
    cfg: &BeurlingConfig,
) -> Result<BeurlingRecord> {
    let s = space.sampling();
    let f = BoundaryField::from_fn(s, |w| entry.f.eval(w));
    let phi = match &entry.inner {
        Some(p) => BoundaryField::from_fn(s, |w| p.eval(w)),
        None => inner_outer_factor(entry.f.as_ref(), ctx)?.inner.trace(s),
    };
    let prediction = InnerPrediction::new(&phi, space, cfg.d0)?;
    let outer = is_outer(entry.f.as_ref(), ctx)?.outer;
    let mut degrees = Vec::with_capacity(cfg.degrees.len());
    let mut last_model = None;
    for &d in &cfg.degrees {
        let model = generate_invariant_subspace(&f, space, d, &entry.label)?;
        let a = beurling_angle(&model, &prediction);
        degrees.push(DegreeRecord {
            d,
            rank: model.rank(),
            angle: a.angle,
            generator_sine: a.generator_sine,
            containment_sine: a.containment_sine,
            cyclicity: cyclicity_distance(&model, space),
            leakage: model.leakage,
            invariance_defect: invariance_defect(&model, space),
        });
        last_model = Some(model);
    }
    let cyclic = degrees.last().is_some_and(|r| r.cyclicity < cfg.cyclic_threshold);
    let extracted_equivalent = match (&last_model, cfg.extract) {
        (Some(model), true) => {
            let ext = extract_inner_generator(model, space, ctx)?;
            Some(match &entry.inner {
                Some(p) => equivalent_inner(ext.generator(), p.as_ref(), ctx)?,
                None => equivalent_inner(ext.generator(), &inner_outer_factor(entry.f.as_ref(), ctx)?.inner, ctx)?,
            })
        }
        _ => None,
    };
    Ok(BeurlingRecord {
        label: entry.label.clone(),
        outer,
        angle_monotone: nonincreasing(degrees.iter().map(|r| r.angle)),
        cyclicity_monotone: nonincreasing(degrees.iter().map(|r| r.cyclicity)),
        degrees,
        cyclic,
        agrees: cyclic == outer,
        extracted_equivalent,
    })
}

/// Runs the degree sweep for every corpus element, in parallel over the
/// corpus. Records come back in corpus order.
pub fn run_beurling(
    ctx: &HarmonicContext,
    space: &GalerkinSpace,
    corpus: &[CorpusEntry],
    cfg: &BeurlingConfig,
) -> Result<Vec<BeurlingRecord>> {
    par::try_map(corpus, |e| run_entry(e, ctx, space, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galerkin::build_space;
    use crate::geometry::CircularDomain;
    use crate::laplace::Tolerances;
    use num_complex::Complex64 as C64;

    #[test]
    fn small_sweep() {
        let d = CircularDomain::annulus(0.5, C64::new(0.5f64.sqrt(), 0.0)).unwrap();
        let ctx = HarmonicContext::new(&d, 256, 96, Tolerances::default()).unwrap();
        let space = build_space(&ctx, 24).unwrap();
        let corpus = vec![
            CorpusEntry { label: "w-2".into(), f: Box::new(|w: C64| w - 2.0), inner: None },
            CorpusEntry {
                label: "w^2*exp(w/3)".into(),
                f: Box::new(|w: C64| w * w * (w / 3.0).exp()),
                inner: Some(Box::new(|w: C64| w * w)),
            },
        ];
        let cfg = BeurlingConfig { extract: true, ..Default::default() };
        let recs = run_beurling(&ctx, &space, &corpus, &cfg).unwrap();
        for r in &recs {
            assert!(r.outer && r.cyclic && r.agrees, "{r:?}");
            assert!(r.angle_monotone && r.cyclicity_monotone, "{r:?}");
            assert!(r.degrees.last().unwrap().angle < 1e-3, "{r:?}");
            assert_eq!(r.extracted_equivalent, Some(true));
        }
    }
}
