//! Finite-dimensional model of `L²(Γ, ω)`.
//!
//! Vectors live on the boundary nodes in scaled coordinates
//! `v_i = √μ_i · f(ζ_i)`, with `μ_i` the ω-quadrature weights, so the
//! `L²(ω)` inner product is the Euclidean one. The model splits into the
//! analytic block (truncated series of degree `K`), the conjugates of
//! analytic functions vanishing at the base point, and the `n`-dimensional
//! block spanned by the `Q_j`.

mod experiment;
mod subspace;

pub use experiment::{run_beurling, BeurlingConfig, BeurlingRecord, CorpusEntry, DegreeRecord};
pub use subspace::{
    beurling_angle, cyclicity_distance, evaluation_defect, extract_inner_generator, generate_invariant_subspace,
    invariance_defect, BeurlingAngle, ExtractedGenerator, InnerPrediction, SubspaceModel,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryField, BoundarySampling, CircularDomain};
use crate::laplace::HarmonicContext;
use crate::linalg::{orthonormal_columns, spectral_norm};
use crate::series::basis_row;

/// Relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-10;

/// `((w − c₀)/r₀)^k` is `(0, k)`; `(r_j/(w − c_j))^k` is `(j, −k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BasisLabel {
    pub component: usize,
    pub power: i64,
}

impl BasisLabel {
    pub fn degree(&self) -> usize {
        self.power.unsigned_abs() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceDiagnostics {
    pub dims: [usize; 3],
    pub gram_min_eigenvalue: f64,
    pub gram_condition: f64,
    /// `max ‖Q_aᴴ Q_b‖` over pairs of distinct blocks.
    pub block_overlap: f64,
    /// `‖(P_h + P_c + P_n) − I‖` on the span of all three blocks.
    pub partition_defect: f64,
    /// `max |⟨Q_j, Re b⟩| / (‖Q_j‖‖Re b‖)` over the analytic basis.
    pub n_orthogonality: f64,
}

#[derive(Debug, Clone)]
pub struct GalerkinSpace {
    sampling: BoundarySampling,
    truncation: usize,
    sqrt_w: Vec<f64>,
    labels: Vec<BasisLabel>,
    analytic_raw: DMatrix<C64>,
    h2: DMatrix<C64>,
    conj: DMatrix<C64>,
    n_raw: DMatrix<C64>,
    n_block: DMatrix<C64>,
    diagnostics: SpaceDiagnostics,
}

/// Labels in [`basis_row`] order.
fn labels(domain: &CircularDomain, k: usize) -> Vec<BasisLabel> {
    let mut out: Vec<BasisLabel> = (0..=k as i64).map(|p| BasisLabel { component: 0, power: p }).collect();
    for j in 1..=domain.n_holes() {
        out.extend((1..=k as i64).map(|p| BasisLabel { component: j, power: -p }));
    }
    out
}

fn hcat(blocks: &[&DMatrix<C64>]) -> DMatrix<C64> {
    let rows = blocks[0].nrows();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        out.columns_mut(c, b.ncols()).copy_from(b);
        c += b.ncols();
    }
    out
}

/// Builds the three blocks at ambient degree `k`.
pub fn build_space(ctx: &HarmonicContext, k: usize) -> Result<GalerkinSpace> {
    let s = ctx.sampling();
    let domain = ctx.domain();
    let m = s.nodes_per_component();
    if m < 4 * k {
        return Err(Error::Resolution(format!(
            "{m} nodes per circle cannot resolve degree {k}; need at least {}",
            4 * k
        )));
    }
    let sqrt_w: Vec<f64> = ctx.omega().weights().iter().map(|w| w.sqrt()).collect();
    let n = s.len();
    let rows = crate::par::map(s.nodes(), |w| basis_row(domain, k, *w));
    let labels = labels(domain, k);
    let analytic_raw = DMatrix::from_fn(n, labels.len(), |i, c| rows[i][c] * sqrt_w[i]);
    let base = basis_row(domain, k, domain.base_point());
    // Conjugates of the nonconstant basis, shifted to vanish at the base point.
    let conj_raw = DMatrix::from_fn(n, labels.len() - 1, |i, c| (rows[i][c + 1] - base[c + 1]).conj() * sqrt_w[i]);
    let q = ctx.q_functions();
    let n_raw = DMatrix::from_fn(n, q.len(), |i, c| q[c].values()[i] * sqrt_w[i]);

    let all = hcat(&[&analytic_raw, &conj_raw, &n_raw]);
    let sv = all.clone().singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = smax / smin;
    let limit = ctx.tolerances().condition_limit;
    if !(condition <= limit) {
        return Err(Error::IllConditioned { condition, limit });
    }
    let (h2, _) = orthonormal_columns(&analytic_raw, RANK_TOL);
    let (conj, _) = orthonormal_columns(&conj_raw, RANK_TOL);
    let (n_block, _) = orthonormal_columns(&n_raw, RANK_TOL);

    let overlap = |a: &DMatrix<C64>, b: &DMatrix<C64>| spectral_norm(&(a.adjoint() * b));
    let block_overlap = overlap(&h2, &conj).max(overlap(&h2, &n_block)).max(overlap(&conj, &n_block));
    let (span, _) = orthonormal_columns(&hcat(&[&h2, &conj, &n_block]), RANK_TOL);
    let proj = |b: &DMatrix<C64>| b * (b.adjoint() * &span);
    let partition_defect = spectral_norm(&(proj(&h2) + proj(&conj) + proj(&n_block) - &span));
    let mut n_orthogonality = 0.0f64;
    for qc in n_raw.column_iter() {
        for bc in analytic_raw.column_iter() {
            let re: DVector<f64> = bc.map(|v| v.re);
            let qr: DVector<f64> = qc.map(|v| v.re);
            let denom = re.norm() * qr.norm();
            if denom > 0.0 {
                n_orthogonality = n_orthogonality.max(re.dot(&qr).abs() / denom);
            }
        }
    }
    let diagnostics = SpaceDiagnostics {
        dims: [h2.ncols(), conj.ncols(), n_block.ncols()],
        gram_min_eigenvalue: smin * smin,
        gram_condition: condition * condition,
        block_overlap,
        partition_defect,
        n_orthogonality,
    };
    Ok(GalerkinSpace {
        sampling: s.clone(),
        truncation: k,
        sqrt_w,
        labels,
        analytic_raw,
        h2,
        conj,
        n_raw,
        n_block,
        diagnostics,
    })
}

/// Block projections of a boundary field.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub h2: BoundaryField,
    pub conj: BoundaryField,
    pub n: BoundaryField,
    /// Coefficients of the `n` part on `Q₁, …, Q_n`.
    pub n_coeffs: Vec<C64>,
    /// `L²(ω)` norm of what the model does not represent.
    pub residual: f64,
}

impl GalerkinSpace {
    pub fn domain(&self) -> &CircularDomain {
        self.sampling.domain()
    }

    pub fn sampling(&self) -> &BoundarySampling {
        &self.sampling
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn diagnostics(&self) -> &SpaceDiagnostics {
        &self.diagnostics
    }

    /// Orthonormal basis of the analytic block, in scaled coordinates.
    pub fn h2_basis(&self) -> &DMatrix<C64> {
        &self.h2
    }

    pub fn conj_basis(&self) -> &DMatrix<C64> {
        &self.conj
    }

    pub fn n_basis(&self) -> &DMatrix<C64> {
        &self.n_block
    }

    /// Scaled analytic basis columns in label order.
    pub fn analytic_columns(&self) -> &DMatrix<C64> {
        &self.analytic_raw
    }

    pub fn to_coords(&self, values: &[C64]) -> DVector<C64> {
        DVector::from_iterator(values.len(), values.iter().zip(&self.sqrt_w).map(|(v, s)| v * *s))
    }

    pub fn from_coords(&self, v: &DVector<C64>) -> Result<BoundaryField> {
        BoundaryField::new(&self.sampling, v.iter().zip(&self.sqrt_w).map(|(x, s)| x / *s).collect())
    }

    /// `L²(ω)` norm of a node vector.
    pub fn norm(&self, values: &[C64]) -> f64 {
        self.to_coords(values).norm()
    }

    pub fn decompose(&self, f: &BoundaryField) -> Result<Decomposition> {
        self.sampling.check(f)?;
        let v = self.to_coords(f.values());
        let part = |q: &DMatrix<C64>| q * (q.adjoint() * &v);
        let (h, c, nn) = (part(&self.h2), part(&self.conj), part(&self.n_block));
        let residual = (&v - &h - &c - &nn).norm();
        let n_coeffs = if self.n_raw.ncols() == 0 {
            vec![]
        } else {
            let ls = crate::linalg::LeastSquares::new(self.n_raw.clone());
            ls.solve(&nn).iter().copied().collect()
        };
        Ok(Decomposition {
            h2: self.from_coords(&h)?,
            conj: self.from_coords(&c)?,
            n: self.from_coords(&nn)?,
            n_coeffs,
            residual,
        })
    }

    /// Coordinates of the functional `v ↦ f^{(order)}(z)` on analytic node
    /// vectors, by the Cauchy integral over Γ: `value = Σ ℓ_i v_i`.
    pub fn derivative_functional(&self, z: C64, order: usize) -> DVector<C64> {
        let s = &self.sampling;
        let m = s.nodes_per_component() as f64;
        let fact: f64 = (1..=order).map(|k| k as f64).product();
        let domain = s.domain();
        DVector::from_iterator(
            s.len(),
            (0..s.len()).map(|i| {
                let j = s.component_of(i);
                let c = domain.circle(j).center;
                let orient = if j == 0 { 1.0 } else { -1.0 };
                let zeta = s.nodes()[i];
                orient * (zeta - c) / m * fact / (zeta - z).powi(order as i32 + 1) / self.sqrt_w[i]
            }),
        )
    }
}
