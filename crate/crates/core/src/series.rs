//! Laurent-type series on a circular domain.
//!
//! The basis is `((w − c₀)/r₀)^k` for `k = 0..=K` together with
//! `(r_j/(w − c_j))^k` for `k = 1..=K` and each hole `j`. Both families have
//! unit modulus on their own circle and decay away from it, which keeps
//! collocation matrices well scaled.

use num_complex::Complex64 as C64;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryField, BoundarySampling, CircularDomain};
use crate::linalg::LeastSquares;
use crate::par;

/// Anything that can be evaluated as a holomorphic function near Γ.
pub trait Holomorphic: Sync {
    fn eval(&self, w: C64) -> C64;
}

impl<F> Holomorphic for F
where
    F: Fn(C64) -> C64 + Sync,
{
    fn eval(&self, w: C64) -> C64 {
        self(w)
    }
}

/// Boundary trace of `f` on the nodes of `s`.
pub fn trace<H: Holomorphic + ?Sized>(f: &H, s: &BoundarySampling) -> BoundaryField {
    BoundaryField::from_fn(s, |w| f.eval(w))
}

/// Single-valued analytic function as a truncated series in the domain basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticRep {
    domain: CircularDomain,
    truncation: usize,
    outer: Vec<C64>,
    holes: Vec<Vec<C64>>,
}

impl AnalyticRep {
    pub fn zero(domain: &CircularDomain, truncation: usize) -> Self {
        AnalyticRep {
            domain: domain.clone(),
            truncation,
            outer: vec![C64::new(0.0, 0.0); truncation + 1],
            holes: vec![vec![C64::new(0.0, 0.0); truncation]; domain.n_holes()],
        }
    }

    pub fn constant(domain: &CircularDomain, truncation: usize, c: C64) -> Self {
        let mut f = Self::zero(domain, truncation);
        f.outer[0] = c;
        f
    }

    /// Builds a series from coefficient arrays: `outer[k]` multiplies
    /// `((w−c₀)/r₀)^k` for `k = 0..=K`, `holes[j][k−1]` multiplies
    /// `(r_j/(w−c_j))^k`.
    pub fn from_parts(domain: &CircularDomain, outer: Vec<C64>, holes: Vec<Vec<C64>>) -> Self {
        assert!(!outer.is_empty(), "outer coefficients include the constant term");
        let truncation = outer.len() - 1;
        assert_eq!(holes.len(), domain.n_holes());
        assert!(holes.iter().all(|h| h.len() == truncation));
        AnalyticRep { domain: domain.clone(), truncation, outer, holes }
    }

    pub fn domain(&self) -> &CircularDomain {
        &self.domain
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn outer_coeffs(&self) -> &[C64] {
        &self.outer
    }

    pub fn hole_coeffs(&self, j: usize) -> &[C64] {
        &self.holes[j - 1]
    }

    pub fn constant_term(&self) -> C64 {
        self.outer[0]
    }

    pub fn add_constant(&mut self, c: C64) {
        self.outer[0] += c;
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        out.outer.iter_mut().for_each(|a| *a *= c);
        out.holes.iter_mut().flatten().for_each(|a| *a *= c);
        out
    }

    /// `self + c·other`; both series must share domain and truncation.
    pub fn add_scaled(&self, other: &AnalyticRep, c: C64) -> Self {
        assert_eq!(self.truncation, other.truncation, "truncation mismatch");
        let mut out = self.clone();
        for (a, b) in out.outer.iter_mut().zip(&other.outer) {
            *a += c * b;
        }
        for (ha, hb) in out.holes.iter_mut().zip(&other.holes) {
            for (a, b) in ha.iter_mut().zip(hb) {
                *a += c * b;
            }
        }
        out
    }

    pub fn derivative(&self, w: C64) -> C64 {
        let outer = self.domain.outer();
        let z = (w - outer.center) / outer.radius;
        let mut acc = C64::new(0.0, 0.0);
        for k in (1..=self.truncation).rev() {
            acc = acc * z + self.outer[k] * k as f64;
        }
        let mut total = acc / outer.radius;
        for (j, coeffs) in self.holes.iter().enumerate() {
            let hole = &self.domain.holes()[j];
            let t = hole.radius / (w - hole.center);
            let mut acc = C64::new(0.0, 0.0);
            for k in (1..=self.truncation).rev() {
                acc = acc * t + coeffs[k - 1] * k as f64;
            }
            total -= acc * t * t / hole.radius;
        }
        total
    }

    pub fn trace(&self, s: &BoundarySampling) -> BoundaryField {
        trace(self, s)
    }

    /// Largest coefficient modulus among the top `tail` degrees; a cheap
    /// truncation indicator.
    pub fn tail_magnitude(&self, tail: usize) -> f64 {
        let lo = self.truncation.saturating_sub(tail).max(1);
        let mut m = 0.0f64;
        for k in lo..=self.truncation {
            m = m.max(self.outer[k].norm());
            for h in &self.holes {
                m = m.max(h[k - 1].norm());
            }
        }
        m
    }
}

impl Holomorphic for AnalyticRep {
    fn eval(&self, w: C64) -> C64 {
        let outer = self.domain.outer();
        let z = (w - outer.center) / outer.radius;
        let mut acc = C64::new(0.0, 0.0);
        for a in self.outer.iter().rev() {
            acc = acc * z + a;
        }
        for (j, coeffs) in self.holes.iter().enumerate() {
            let hole = &self.domain.holes()[j];
            let t = hole.radius / (w - hole.center);
            let mut h = C64::new(0.0, 0.0);
            for b in coeffs.iter().rev() {
                h = h * t + b;
            }
            acc += h * t;
        }
        acc
    }
}

/// Complex least-squares fit of node values by an [`AnalyticRep`], factored
/// once per (sampling, truncation).
#[derive(Debug, Clone)]
pub struct AnalyticFitter {
    domain: CircularDomain,
    sampling: BoundarySampling,
    truncation: usize,
    lsq: LeastSquares<C64>,
}

impl AnalyticFitter {
    pub fn new(domain: &CircularDomain, s: &BoundarySampling, truncation: usize) -> Result<Self> {
        let m = s.nodes_per_component();
        if 2 * truncation + 2 > m {
            return Err(Error::Resolution(format!("fit truncation K = {truncation} needs K <= M/2 - 1 with M = {m}")));
        }
        let rows: Vec<Vec<C64>> = par::map(s.nodes(), |w| basis_row(domain, truncation, *w));
        let ncols = rows[0].len();
        let a = DMatrix::from_fn(s.len(), ncols, |i, j| rows[i][j]);
        Ok(AnalyticFitter { domain: domain.clone(), sampling: s.clone(), truncation, lsq: LeastSquares::new(a) })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn condition(&self) -> f64 {
        self.lsq.condition()
    }

    /// Best series for the node values, with the max node misfit.
    pub fn fit(&self, data: &BoundaryField) -> Result<(AnalyticRep, f64)> {
        self.sampling.check(data)?;
        let b = DVector::from_column_slice(data.values());
        let x = self.lsq.solve(&b);
        let rep = rep_from_flat(&self.domain, self.truncation, x.as_slice());
        let misfit =
            data.values().iter().zip(self.sampling.nodes()).map(|(v, w)| (rep.eval(*w) - v).norm()).fold(0.0, f64::max);
        Ok((rep, misfit))
    }
}

/// Values of every basis function at `w`, in the column order used by the
/// least-squares fits: outer `k = 0..=K`, then each hole `k = 1..=K`.
pub(crate) fn basis_row(domain: &CircularDomain, truncation: usize, w: C64) -> Vec<C64> {
    let mut row = Vec::with_capacity(1 + truncation * domain.n_components());
    let outer = domain.outer();
    let z = (w - outer.center) / outer.radius;
    let mut p = C64::new(1.0, 0.0);
    for _ in 0..=truncation {
        row.push(p);
        p *= z;
    }
    for hole in domain.holes() {
        let t = hole.radius / (w - hole.center);
        let mut p = t;
        for _ in 0..truncation {
            row.push(p);
            p *= t;
        }
    }
    row
}

/// Inverse of [`basis_row`]'s ordering.
pub(crate) fn rep_from_flat(domain: &CircularDomain, truncation: usize, flat: &[C64]) -> AnalyticRep {
    let outer = flat[..=truncation].to_vec();
    let holes = (0..domain.n_holes())
        .map(|j| {
            let start = truncation + 1 + j * truncation;
            flat[start..start + truncation].to_vec()
        })
        .collect();
    AnalyticRep::from_parts(domain, outer, holes)
}
