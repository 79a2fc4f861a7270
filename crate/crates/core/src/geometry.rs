//! Circular multiply connected domains, equiangular boundary samplings and
//! sampled boundary fields.
//!
//! Components are indexed `0..=n` with `0` the outer circle. Every component
//! is parametrized counterclockwise, `c_j + r_j e^{iθ}`, and carries the unit
//! normal pointing into the domain: `−e^{iθ}` on the outer circle and
//! `+e^{iθ}` on the holes.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Circle {
    pub center: C64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: C64, radius: f64) -> Self {
        Circle { center, radius }
    }

    pub fn point(&self, theta: f64) -> C64 {
        self.center + C64::from_polar(self.radius, theta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircularDomain {
    outer: Circle,
    holes: Vec<Circle>,
    base_point: C64,
}

impl CircularDomain {
    /// Validates the raw geometry and builds the domain.
    pub fn new(outer: Circle, holes: Vec<Circle>, base_point: C64) -> Result<Self> {
        let finite = |c: &Circle| c.center.re.is_finite() && c.center.im.is_finite();
        if !finite(&outer) || !(outer.radius.is_finite() && outer.radius > 0.0) {
            return Err(Error::InvalidGeometry("outer circle needs a finite center and positive radius".into()));
        }
        for (i, h) in holes.iter().enumerate() {
            if !finite(h) || !(h.radius.is_finite() && h.radius > 0.0) {
                return Err(Error::InvalidGeometry(format!(
                    "hole {} needs a finite center and positive radius",
                    i + 1
                )));
            }
            if (h.center - outer.center).norm() + h.radius >= outer.radius {
                return Err(Error::Containment(i + 1));
            }
        }
        for i in 0..holes.len() {
            for j in i + 1..holes.len() {
                if (holes[i].center - holes[j].center).norm() <= holes[i].radius + holes[j].radius {
                    return Err(Error::Overlap(i + 1, j + 1));
                }
            }
        }
        let domain = CircularDomain { outer, holes, base_point };
        if !domain.contains(base_point) {
            return Err(Error::BasePoint(fmt_point(base_point)));
        }
        Ok(domain)
    }

    /// Annulus `inner < |w| < 1`.
    pub fn annulus(inner: f64, base_point: C64) -> Result<Self> {
        Self::new(Circle::new(C64::new(0.0, 0.0), 1.0), vec![Circle::new(C64::new(0.0, 0.0), inner)], base_point)
    }

    pub fn unit_disk(base_point: C64) -> Result<Self> {
        Self::new(Circle::new(C64::new(0.0, 0.0), 1.0), vec![], base_point)
    }

    pub fn from_config(cfg: &DomainConfig) -> Result<Self> {
        let circle = |c: &CircleConfig| Circle::new(C64::new(c.center[0].0, c.center[1].0), c.radius.0);
        Self::new(
            circle(&cfg.outer),
            cfg.holes.iter().map(circle).collect(),
            C64::new(cfg.base_point[0].0, cfg.base_point[1].0),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: DomainConfig = serde_json::from_str(text)?;
        Self::from_config(&cfg)
    }

    pub fn to_config(&self) -> DomainConfig {
        let circle = |c: &Circle| CircleConfig {
            center: [Decimal(c.center.re), Decimal(c.center.im)],
            radius: Decimal(c.radius),
        };
        DomainConfig {
            outer: circle(&self.outer),
            holes: self.holes.iter().map(circle).collect(),
            base_point: [Decimal(self.base_point.re), Decimal(self.base_point.im)],
        }
    }

    pub fn outer(&self) -> &Circle {
        &self.outer
    }

    pub fn holes(&self) -> &[Circle] {
        &self.holes
    }

    /// Component `j` of the boundary, `0` being the outer circle.
    pub fn circle(&self, j: usize) -> &Circle {
        if j == 0 {
            &self.outer
        } else {
            &self.holes[j - 1]
        }
    }

    pub fn base_point(&self) -> C64 {
        self.base_point
    }

    /// Number of holes `n`.
    pub fn n_holes(&self) -> usize {
        self.holes.len()
    }

    pub fn n_components(&self) -> usize {
        self.holes.len() + 1
    }

    /// The disk case is accepted but has trivial period machinery.
    pub fn is_simply_connected(&self) -> bool {
        self.holes.is_empty()
    }

    /// Signed distance to Γ, positive inside Ω.
    pub fn boundary_distance(&self, w: C64) -> f64 {
        let mut d = self.outer.radius - (w - self.outer.center).norm();
        for h in &self.holes {
            d = d.min((w - h.center).norm() - h.radius);
        }
        d
    }

    pub fn contains(&self, w: C64) -> bool {
        self.boundary_distance(w) > 0.0
    }

    /// Smallest radius among all components.
    pub fn min_radius(&self) -> f64 {
        self.holes.iter().map(|h| h.radius).fold(self.outer.radius, f64::min)
    }
}

pub(crate) fn fmt_point(w: C64) -> String {
    format!("({}, {})", w.re, w.im)
}

/// Serializes a point as `[re, im]`.
pub fn serialize_point<S: serde::Serializer>(w: &C64, ser: S) -> std::result::Result<S::Ok, S::Error> {
    [w.re, w.im].serialize(ser)
}

/// A real number given either as a JSON number or as an exact decimal string.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Decimal(pub f64);

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(x) => Ok(Decimal(x)),
            Raw::Str(s) => s
                .trim()
                .parse::<f64>()
                .map(Decimal)
                .map_err(|e| serde::de::Error::custom(format!("bad decimal {s:?}: {e}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleConfig {
    pub center: [Decimal; 2],
    pub radius: Decimal,
}

/// JSON form of a domain:
/// `{"outer": {"center": [x,y], "radius": r}, "holes": [...], "base_point": [x,y]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainConfig {
    pub outer: CircleConfig,
    #[serde(default)]
    pub holes: Vec<CircleConfig>,
    pub base_point: [Decimal; 2],
}

/// Equiangular nodes, `m` per component, with arclength weights and
/// into-domain unit normals. Node storage is component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySampling {
    domain: CircularDomain,
    m: usize,
    shift: f64,
    nodes: Vec<C64>,
    angles: Vec<f64>,
    normals: Vec<C64>,
    weights: Vec<f64>,
}

impl BoundarySampling {
    pub fn new(domain: &CircularDomain, m: usize) -> Result<Self> {
        Self::with_shift(domain, m, 0.0)
    }

    /// Sampling whose angles are offset by `shift` node spacings; `0.5`
    /// gives the midpoints of the standard sampling.
    pub fn with_shift(domain: &CircularDomain, m: usize, shift: f64) -> Result<Self> {
        if m < 8 || !m.is_multiple_of(2) {
            return Err(Error::Resolution(format!("nodes per component must be even and at least 8, got {m}")));
        }
        let comps = domain.n_components();
        let mut nodes = Vec::with_capacity(comps * m);
        let mut angles = Vec::with_capacity(comps * m);
        let mut normals = Vec::with_capacity(comps * m);
        let mut weights = Vec::with_capacity(comps * m);
        let h = 2.0 * PI / m as f64;
        for j in 0..comps {
            let c = domain.circle(j);
            let sign = if j == 0 { -1.0 } else { 1.0 };
            for k in 0..m {
                let theta = (k as f64 + shift) * h;
                let e = C64::from_polar(1.0, theta);
                nodes.push(c.center + e * c.radius);
                angles.push(theta);
                normals.push(e * sign);
                weights.push(c.radius * h);
            }
        }
        Ok(BoundarySampling { domain: domain.clone(), m, shift, nodes, angles, normals, weights })
    }

    pub fn domain(&self) -> &CircularDomain {
        &self.domain
    }

    pub fn nodes_per_component(&self) -> usize {
        self.m
    }

    pub fn n_components(&self) -> usize {
        self.nodes.len() / self.m
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn nodes(&self) -> &[C64] {
        &self.nodes
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Unit normals pointing into the domain.
    pub fn normals(&self) -> &[C64] {
        &self.normals
    }

    /// Arclength weights `ds`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn component_range(&self, j: usize) -> std::ops::Range<usize> {
        j * self.m..(j + 1) * self.m
    }

    /// Component index of flat node index `i`.
    pub fn component_of(&self, i: usize) -> usize {
        i / self.m
    }

    pub fn check(&self, f: &BoundaryField) -> Result<()> {
        if f.m != self.m || f.values.len() != self.nodes.len() {
            return Err(Error::Shape(format!(
                "field has {} nodes ({} per component), sampling has {} ({} per component)",
                f.values.len(),
                f.m,
                self.nodes.len(),
                self.m
            )));
        }
        Ok(())
    }
}

/// Values of a (complex) function at the nodes of a sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryField {
    m: usize,
    values: Vec<C64>,
}

impl BoundaryField {
    pub fn new(s: &BoundarySampling, values: Vec<C64>) -> Result<Self> {
        let f = BoundaryField { m: s.m, values };
        s.check(&f)?;
        Ok(f)
    }

    pub fn from_real(s: &BoundarySampling, values: Vec<f64>) -> Result<Self> {
        Self::new(s, values.into_iter().map(|x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn<F>(s: &BoundarySampling, f: F) -> Self
    where
        F: Fn(C64) -> C64 + Sync + Send,
    {
        BoundaryField { m: s.m, values: par::map(&s.nodes, |&w| f(w)) }
    }

    pub fn constant(s: &BoundarySampling, c: C64) -> Self {
        BoundaryField { m: s.m, values: vec![c; s.len()] }
    }

    /// Indicator of component `j`.
    pub fn indicator(s: &BoundarySampling, j: usize) -> Self {
        let values = (0..s.len())
            .map(|i| if s.component_of(i) == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
            .collect();
        BoundaryField { m: s.m, values }
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn nodes_per_component(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn component(&self, j: usize) -> &[C64] {
        &self.values[j * self.m..(j + 1) * self.m]
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest imaginary part relative to the largest modulus.
    pub fn imag_defect(&self) -> f64 {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max) / scale
    }

    pub fn map<F: Fn(C64) -> C64>(&self, f: F) -> Self {
        BoundaryField { m: self.m, values: self.values.iter().map(|&z| f(z)).collect() }
    }

    pub fn zip_with<F: Fn(C64, C64) -> C64>(&self, other: &BoundaryField, f: F) -> Result<Self> {
        if self.m != other.m || self.values.len() != other.values.len() {
            return Err(Error::Shape("fields sampled differently".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(BoundaryField { m: self.m, values })
    }

    /// Writes CSV with columns `component,angle,re,im`.
    pub fn write_csv<W: Write>(&self, s: &BoundarySampling, out: W) -> Result<()> {
        s.check(self)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["component", "angle", "re", "im"])?;
        for (i, z) in self.values.iter().enumerate() {
            w.write_record([
                s.component_of(i).to_string(),
                format!("{:.16e}", s.angles[i]),
                format!("{:.16e}", z.re),
                format!("{:.16e}", z.im),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads CSV with columns `component,angle,re,im`; rows must match the
    /// sampling's nodes in order.
    pub fn read_csv<R: Read>(s: &BoundarySampling, input: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            component: usize,
            angle: f64,
            re: f64,
            im: f64,
        }
        let mut rdr = csv::Reader::from_reader(input);
        let mut values = Vec::with_capacity(s.len());
        for (i, row) in rdr.deserialize::<Row>().enumerate() {
            let row = row?;
            if i >= s.len() || row.component != s.component_of(i) || (row.angle - s.angles[i]).abs() > 1e-9 {
                return Err(Error::Shape(format!("csv row {i} does not match the sampling")));
            }
            values.push(C64::new(row.re, row.im));
        }
        Self::new(s, values)
    }
}

/// Trapezoidal value of `∫_Γ f ds`.
pub fn integrate_arclength(f: &BoundaryField, s: &BoundarySampling) -> Result<C64> {
    s.check(f)?;
    let re = compensated_sum(f.values.iter().zip(&s.weights).map(|(z, w)| z.re * w));
    let im = compensated_sum(f.values.iter().zip(&s.weights).map(|(z, w)| z.im * w));
    Ok(C64::new(re, im))
}

/// Neumaier summation; keeps quadrature sums accurate to a few ulps.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
