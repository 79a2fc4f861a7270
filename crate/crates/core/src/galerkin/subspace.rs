use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{BasisLabel, GalerkinSpace, RANK_TOL};
use crate::error::{Error, Result};
use crate::geometry::BoundaryField;
use crate::hardy::{
    inner_outer_factor, locate_zeros, polish, winding_vector, AnalyticRep, Holomorphic, InnerOuterResult, ZeroCluster,
    ZeroSearch,
};
use crate::laplace::HarmonicContext;
use crate::linalg::{orthonormal_columns, sine_into};

/// Highest derivative order tried when the model vanishes at the base point.
const MAX_ORDER: usize = 8;
/// A functional counts as vanishing on the model below this fraction of its
/// norm on the analytic block.
const VANISH_TOL: f64 = 1e-6;

/// Orthonormalized span of `{r·f : deg r ≤ D}` in scaled coordinates.
#[derive(Debug, Clone)]
pub struct SubspaceModel {
    pub label: String,
    pub degree: usize,
    basis: DMatrix<C64>,
    generators: DMatrix<C64>,
    generator_labels: Vec<BasisLabel>,
    pub singular_values: Vec<f64>,
    /// Sine of the angle from the model into the ambient analytic block.
    pub leakage: f64,
}

impl SubspaceModel {
    pub fn basis(&self) -> &DMatrix<C64> {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthonormal basis of the span of generators with multiplier degree
    /// at most `d`.
    fn sub_basis(&self, d: usize) -> DMatrix<C64> {
        let cols: Vec<usize> =
            (0..self.generator_labels.len()).filter(|&c| self.generator_labels[c].degree() <= d).collect();
        orthonormal_columns(&self.generators.select_columns(&cols), RANK_TOL).0
    }

    fn project_out(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        x - &self.basis * (self.basis.adjoint() * x)
    }
}

/// Multiplier degrees must stay within half the ambient degree so products
/// remain representable.
pub fn generate_invariant_subspace(
    f: &BoundaryField,
    space: &GalerkinSpace,
    degree: usize,
    label: &str,
) -> Result<SubspaceModel> {
    space.sampling().check(f)?;
    if 2 * degree > space.truncation() {
        return Err(Error::Precondition(format!(
            "multiplier degree {degree} exceeds half the ambient degree {}",
            space.truncation()
        )));
    }
    if !(space.norm(f.values()) > 1e-12) {
        return Err(Error::RankCollapse(format!("generator '{label}' is numerically zero")));
    }
    let cols: Vec<usize> = (0..space.labels().len()).filter(|&c| space.labels()[c].degree() <= degree).collect();
    let generator_labels: Vec<BasisLabel> = cols.iter().map(|&c| space.labels()[c]).collect();
    let mut generators = space.analytic_columns().select_columns(&cols);
    for (i, mut row) in generators.row_iter_mut().enumerate() {
        row *= f.values()[i];
    }
    let (basis, singular_values) = orthonormal_columns(&generators, RANK_TOL);
    if basis.ncols() == 0 {
        return Err(Error::RankCollapse(format!("generator '{label}' spans nothing")));
    }
    let leakage = sine_into(&basis, space.h2_basis());
    Ok(SubspaceModel {
        label: label.to_string(),
        degree,
        basis,
        generators,
        generator_labels,
        singular_values,
        leakage,
    })
}

/// `max ‖(I − P_S) r·S_{D−deg r}‖` over multipliers `r` of degree
/// `1..=D`: products that stay within degree `D` must stay in the model.
pub fn invariance_defect(model: &SubspaceModel, space: &GalerkinSpace) -> f64 {
    let d = model.degree;
    let sqrt_w: Vec<f64> = space.sqrt_w.clone();
    let mut worst = 0.0f64;
    let mut subs: Vec<Option<DMatrix<C64>>> = vec![None; d + 1];
    for (c, label) in space.labels().iter().enumerate() {
        let deg = label.degree();
        if deg == 0 || deg > d {
            continue;
        }
        let sub = subs[d - deg].get_or_insert_with(|| model.sub_basis(d - deg));
        let mut x = sub.clone();
        for (i, mut row) in x.row_iter_mut().enumerate() {
            row *= space.analytic_columns()[(i, c)] / sqrt_w[i];
        }
        let defect = crate::linalg::spectral_norm(&model.project_out(&x));
        worst = worst.max(defect);
    }
    worst
}

/// Predicted invariant subspace `φ·H²_K` and its generator part
/// `span{φ·r : deg r ≤ d₀}`.
#[derive(Debug, Clone)]
pub struct InnerPrediction {
    full: DMatrix<C64>,
    generator: DMatrix<C64>,
}

impl InnerPrediction {
    pub fn new(phi: &BoundaryField, space: &GalerkinSpace, d0: usize) -> Result<Self> {
        space.sampling().check(phi)?;
        let mut cols = space.analytic_columns().clone();
        for (i, mut row) in cols.row_iter_mut().enumerate() {
            row *= phi.values()[i];
        }
        let low: Vec<usize> = (0..space.labels().len()).filter(|&c| space.labels()[c].degree() <= d0).collect();
        let generator = orthonormal_columns(&cols.select_columns(&low), RANK_TOL).0;
        let full = orthonormal_columns(&cols, RANK_TOL).0;
        if generator.ncols() == 0 {
            return Err(Error::RankCollapse("inner function is numerically zero".into()));
        }
        Ok(InnerPrediction { full, generator })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeurlingAngle {
    /// `max(generator_sine, containment_sine)`.
    pub angle: f64,
    /// Sine from `span{φ·r : deg r ≤ d₀}` into the model.
    pub generator_sine: f64,
    /// Sine from the model into `φ·H²_K`.
    pub containment_sine: f64,
}

/// Distance between a model and its predicted form `φ·H²`: the model must
/// sit inside `φ·H²_K` and must contain the low-degree multiples of `φ`.
pub fn beurling_angle(model: &SubspaceModel, prediction: &InnerPrediction) -> BeurlingAngle {
    let generator_sine = sine_into(&prediction.generator, &model.basis);
    let containment_sine = sine_into(&model.basis, &prediction.full);
    BeurlingAngle { angle: generator_sine.max(containment_sine), generator_sine, containment_sine }
}

/// `‖1 − P_S 1‖` in `L²(ω)`; the constant has unit norm.
pub fn cyclicity_distance(model: &SubspaceModel, space: &GalerkinSpace) -> f64 {
    let one = DVector::from_iterator(space.sqrt_w.len(), space.sqrt_w.iter().map(|s| C64::new(*s, 0.0)));
    let p = &model.basis * (model.basis.adjoint() * &one);
    (one - p).norm()
}

/// `‖v ↦ v^{(order)}(z)‖` on the model relative to the analytic block.
fn relative_functional(model: &SubspaceModel, space: &GalerkinSpace, z: C64, order: usize) -> (f64, DVector<C64>) {
    let l = space.derivative_functional(z, order);
    let on_model = model.basis.transpose() * &l;
    let ambient = space.h2_basis().transpose() * &l;
    (on_model.norm() / ambient.norm().max(f64::MIN_POSITIVE), on_model)
}

/// How far the model is from annihilating evaluation at `z`.
pub fn evaluation_defect(model: &SubspaceModel, space: &GalerkinSpace, z: C64) -> f64 {
    relative_functional(model, space, z, 0).0
}

/// Order to which every element of the model vanishes at `z`, capped at `cap`.
fn common_order(model: &SubspaceModel, space: &GalerkinSpace, z: C64, cap: usize) -> usize {
    (0..cap).find(|&m| relative_functional(model, space, z, m).0 > VANISH_TOL).unwrap_or(cap)
}

#[derive(Debug, Clone)]
pub struct ExtractedGenerator {
    /// Derivative order at the base point used for the extremal problem.
    pub order: usize,
    /// Unit-norm model element maximizing `|v^{(order)}(ŵ)|`.
    pub extremal: AnalyticRep,
    pub extremal_fit: f64,
    /// Zeros shared by the whole model.
    pub common_zeros: Vec<ZeroCluster>,
    /// Zeros of the extremal element that the model does not share; they
    /// come from the reproducing kernel and are divided out.
    pub kernel_zeros: Vec<ZeroCluster>,
    /// Inner-outer factorization of the extremal element with the kernel
    /// zeros removed; its inner part is the generator.
    pub factor: InnerOuterResult,
}

impl ExtractedGenerator {
    pub fn generator(&self) -> &AnalyticRep {
        &self.factor.inner
    }
}

/// Inner generator of a model `φ·H²` from the extremal problem
/// `max |v^{(m)}(ŵ)|` over unit vectors, `m` the smallest order at which
/// the model does not vanish.
pub fn extract_inner_generator(
    model: &SubspaceModel,
    space: &GalerkinSpace,
    ctx: &HarmonicContext,
) -> Result<ExtractedGenerator> {
    let base = space.domain().base_point();
    let (order, functional) = (0..=MAX_ORDER)
        .map(|m| (m, relative_functional(model, space, base, m)))
        .find(|(_, (rel, _))| *rel > VANISH_TOL)
        .map(|(m, (_, l))| (m, l))
        .ok_or_else(|| {
            Error::ExtremalDegenerate(format!("model vanishes to order above {MAX_ORDER} at the base point"))
        })?;
    let norm = functional.norm();
    let coeffs = functional.map(|v| v.conj() / norm);
    let values = space.from_coords(&(&model.basis * coeffs))?;
    let (extremal, extremal_fit) = ctx.fitter().fit(&values)?;
    let s = ctx.sampling();
    let count = winding_vector(&extremal, s)?.zeros_in_domain;
    // Kernel zeros may sit close to Γ, so the collar is narrowed until the
    // search can reach them.
    let mut clusters = Err(Error::ZeroOnBoundary(String::new()));
    for margin_fraction in [3e-2, 3e-3, 3e-4] {
        clusters = locate_zeros(&extremal, s, count, ZeroSearch { margin_fraction, ..Default::default() });
        if !matches!(clusters, Err(Error::ZeroOnBoundary(_))) {
            break;
        }
    }
    let clusters = clusters?;
    let mut common_zeros = Vec::new();
    let mut kernel_zeros = Vec::new();
    for c in clusters {
        let z = polish(&extremal, c.location, c.multiplicity);
        let shared = common_order(model, space, z, c.multiplicity);
        if shared > 0 {
            common_zeros.push(ZeroCluster { location: z, multiplicity: shared, ..c });
        }
        if c.multiplicity > shared {
            kernel_zeros.push(ZeroCluster { location: z, multiplicity: c.multiplicity - shared, ..c });
        }
    }
    let stripped = {
        let ext = &extremal;
        let kz = &kernel_zeros;
        move |w: C64| kz.iter().fold(ext.eval(w), |acc, c| acc / (w - c.location).powi(c.multiplicity as i32))
    };
    let factor = inner_outer_factor(&stripped, ctx)?;
    Ok(ExtractedGenerator { order, extremal, extremal_fit, common_zeros, kernel_zeros, factor })
}
