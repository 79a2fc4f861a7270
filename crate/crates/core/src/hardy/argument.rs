//! Argument-principle tools: winding numbers along boundary circles, zero
//! counts inside contours, and quadtree zero localization.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::Holomorphic;
use crate::error::{Error, Result};
use crate::geometry::{fmt_point, BoundarySampling, CircularDomain};
use crate::par;

const MAX_STEP: f64 = PI / 4.0;
const MAX_DEPTH: u32 = 48;

/// Why tracking the argument along a path failed.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Track {
    /// `|f|` fell below the floor: a zero sits on or next to the path.
    NearZero(C64),
    /// Refinement did not settle.
    Depth,
}

struct Tracker<'a, H: ?Sized, P> {
    f: &'a H,
    path: P,
    floor: f64,
}

impl<H: Holomorphic + ?Sized, P: Fn(f64) -> C64> Tracker<'_, H, P> {
    fn value(&self, t: f64) -> std::result::Result<C64, Track> {
        let w = (self.path)(t);
        let v = self.f.eval(w);
        if !(v.norm() > self.floor) {
            return Err(Track::NearZero(w));
        }
        Ok(v)
    }

    fn segment(&self, t0: f64, t1: f64, f0: C64, f1: C64, depth: u32) -> std::result::Result<f64, Track> {
        let tm = 0.5 * (t0 + t1);
        let fm = self.value(tm)?;
        let d1 = (fm / f0).arg();
        let d2 = (f1 / fm).arg();
        if d1.abs() < MAX_STEP && d2.abs() < MAX_STEP {
            return Ok(d1 + d2);
        }
        if depth >= MAX_DEPTH {
            return Err(Track::Depth);
        }
        Ok(self.segment(t0, tm, f0, fm, depth + 1)? + self.segment(tm, t1, fm, f1, depth + 1)?)
    }

    /// Total change of `arg f` along `path(t)`, `t ∈ [t0, t1]`, starting
    /// from `pieces` equal segments.
    fn change(&self, t0: f64, t1: f64, pieces: usize) -> std::result::Result<f64, Track> {
        let mut total = 0.0;
        let mut prev = self.value(t0)?;
        for p in 0..pieces {
            let a = t0 + (t1 - t0) * p as f64 / pieces as f64;
            let b = t0 + (t1 - t0) * (p + 1) as f64 / pieces as f64;
            let next = self.value(b)?;
            total += self.segment(a, b, prev, next, 0)?;
            prev = next;
        }
        Ok(total)
    }
}

/// Winding of `f` around each boundary circle, all traversed
/// counterclockwise, and the implied zero count in Ω.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindingReport {
    /// `k_j` for holes `j = 1..n`.
    pub holes: Vec<i64>,
    pub outer: i64,
    /// Argument principle: `outer − Σ k_j`.
    pub zeros_in_domain: i64,
    /// Largest distance of a raw winding from its rounded value.
    pub max_defect: f64,
}

fn circle_winding<H: Holomorphic + ?Sized>(
    f: &H,
    center: C64,
    radius: f64,
    pieces: usize,
    floor: f64,
) -> std::result::Result<f64, Track> {
    let tracker = Tracker { f, path: |t: f64| center + C64::from_polar(radius, t), floor };
    Ok(tracker.change(0.0, TAU, pieces)? / TAU)
}

fn track_error(e: Track, what: &str) -> Error {
    match e {
        Track::NearZero(w) => Error::BoundaryZero(format!("{what}: |f| vanishes near {}", fmt_point(w))),
        Track::Depth => Error::BoundaryZero(format!("{what}: argument tracking did not resolve")),
    }
}

fn scale_on<H: Holomorphic + ?Sized>(f: &H, s: &BoundarySampling) -> f64 {
    par::map(s.nodes(), |w| f.eval(*w).norm()).into_iter().fold(0.0, f64::max)
}

pub fn winding_vector<H: Holomorphic + ?Sized>(f: &H, s: &BoundarySampling) -> Result<WindingReport> {
    let domain = s.domain();
    let scale = scale_on(f, s);
    if !(scale > 0.0) {
        return Err(Error::BoundaryZero("function vanishes on the boundary".into()));
    }
    let floor = 1e-13 * scale;
    let raw: Vec<std::result::Result<f64, Track>> = par::map_range(domain.n_components(), |j| {
        let c = domain.circle(j);
        circle_winding(f, c.center, c.radius, s.nodes_per_component(), floor)
    });
    let mut rounded = Vec::with_capacity(raw.len());
    let mut max_defect = 0.0f64;
    for (j, r) in raw.into_iter().enumerate() {
        let x = r.map_err(|e| track_error(e, &format!("winding on component {j}")))?;
        let k = x.round();
        let defect = (x - k).abs();
        if defect >= 0.1 {
            return Err(Error::NonIntegerWinding { component: j, defect });
        }
        max_defect = max_defect.max(defect);
        rounded.push(k as i64);
    }
    let outer = rounded[0];
    let holes = rounded[1..].to_vec();
    let zeros_in_domain = outer - holes.iter().sum::<i64>();
    Ok(WindingReport { holes, outer, zeros_in_domain, max_defect })
}

/// Number of zeros minus poles of `f` inside the circle.
pub fn count_zeros_in_circle<H: Holomorphic + ?Sized>(f: &H, center: C64, radius: f64) -> Result<i64> {
    let scale =
        (0..16).map(|i| f.eval(center + C64::from_polar(radius, TAU * i as f64 / 16.0)).norm()).fold(0.0, f64::max);
    let x = circle_winding(f, center, radius, 32, 1e-14 * scale).map_err(|e| track_error(e, "zero count"))?;
    let k = x.round();
    if (x - k).abs() >= 0.1 {
        return Err(Error::ZeroLocalization(format!("non-integer count {x} around {}", fmt_point(center))));
    }
    Ok(k as i64)
}

/// A zero (or tight cluster of zeros) found by subdivision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroCluster {
    #[serde(serialize_with = "crate::geometry::serialize_point")]
    pub location: C64,
    pub multiplicity: usize,
    /// Side length of the cell that isolated the cluster.
    pub cell_size: f64,
}

/// Settings for [`locate_zeros`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroSearch {
    /// Cells are split until their longer side is below this.
    pub min_cell: f64,
    /// Cells are also split while their count exceeds one and they are
    /// larger than this; a multi-zero cell below it becomes a cluster.
    pub cluster_size: f64,
    /// Width of the boundary collar excluded from the search, as a fraction
    /// of the smallest radius.
    pub margin_fraction: f64,
}

impl Default for ZeroSearch {
    fn default() -> Self {
        ZeroSearch { min_cell: 1e-6, cluster_size: 1e-4, margin_fraction: 0.03 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Cell {
    fn size(&self) -> f64 {
        (self.x1 - self.x0).max(self.y1 - self.y0)
    }

    fn center(&self) -> C64 {
        C64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    fn corners(&self) -> [C64; 4] {
        [C64::new(self.x0, self.y0), C64::new(self.x1, self.y0), C64::new(self.x1, self.y1), C64::new(self.x0, self.y1)]
    }

    fn nearest(&self, w: C64) -> C64 {
        C64::new(w.re.clamp(self.x0, self.x1), w.im.clamp(self.y0, self.y1))
    }

    /// True when the closed cell misses the points of Ω farther than
    /// `margin` from Γ.
    fn outside(&self, d: &CircularDomain, margin: f64) -> bool {
        let o = d.outer();
        if (self.nearest(o.center) - o.center).norm() >= o.radius - margin {
            return true;
        }
        d.holes().iter().any(|h| self.corners().iter().all(|c| (c - h.center).norm() <= h.radius + margin))
    }

    fn inside(&self, d: &CircularDomain) -> bool {
        let o = d.outer();
        self.corners().iter().all(|c| (c - o.center).norm() < o.radius)
            && d.holes().iter().all(|h| (self.nearest(h.center) - h.center).norm() > h.radius)
    }

    fn split(&self, fx: f64, fy: f64) -> [Cell; 4] {
        let xm = self.x0 + fx * (self.x1 - self.x0);
        let ym = self.y0 + fy * (self.y1 - self.y0);
        [
            Cell { x0: self.x0, x1: xm, y0: self.y0, y1: ym },
            Cell { x0: xm, x1: self.x1, y0: self.y0, y1: ym },
            Cell { x0: xm, x1: self.x1, y0: ym, y1: self.y1 },
            Cell { x0: self.x0, x1: xm, y0: ym, y1: self.y1 },
        ]
    }
}

struct Locator<'a, H: ?Sized> {
    f: &'a H,
    domain: &'a CircularDomain,
    opts: ZeroSearch,
    floor: f64,
    margin: f64,
}

enum Count {
    /// The cell reaches outside Ω, where the series may have poles and
    /// spurious zeros; it is only subdivided.
    Unknown,
    Known(i64),
}

const SPLITS: [(f64, f64); 6] =
    [(0.5, 0.5), (0.4871, 0.5183), (0.5217, 0.4761), (0.4633, 0.4589), (0.5391, 0.5427), (0.4412, 0.5606)];

impl<H: Holomorphic + ?Sized> Locator<'_, H> {
    fn count(&self, cell: &Cell) -> std::result::Result<Count, Track> {
        if !cell.inside(self.domain) {
            return Ok(Count::Unknown);
        }
        let [a, b, c, d] = cell.corners();
        let path = |t: f64| {
            let (p, q, u) = if t < 1.0 {
                (a, b, t)
            } else if t < 2.0 {
                (b, c, t - 1.0)
            } else if t < 3.0 {
                (c, d, t - 2.0)
            } else {
                (d, a, t - 3.0)
            };
            p + (q - p) * u
        };
        let tracker = Tracker { f: self.f, path, floor: self.floor };
        let x = tracker.change(0.0, 4.0, 16)? / TAU;
        let k = x.round();
        if (x - k).abs() >= 0.1 {
            return Err(Track::Depth);
        }
        Ok(Count::Known(k as i64))
    }

    fn explore(&self, cell: Cell, count: Count) -> Result<Vec<ZeroCluster>> {
        if cell.outside(self.domain, self.margin) {
            return Ok(vec![]);
        }
        if let Count::Known(k) = count {
            if k == 0 {
                return Ok(vec![]);
            }
            if k < 0 {
                return Err(Error::ZeroLocalization(format!("negative count {k} in a pole-free cell")));
            }
            let size = cell.size();
            if size < self.opts.min_cell || (size < self.opts.cluster_size && k == 1) {
                return Ok(vec![ZeroCluster { location: cell.center(), multiplicity: k as usize, cell_size: size }]);
            }
        }
        for &(fx, fy) in &SPLITS {
            let children = cell.split(fx, fy);
            let counts: Vec<std::result::Result<Count, Track>> = par::map(&children, |c| self.count(c));
            if counts.iter().any(|c| c.is_err()) {
                continue;
            }
            let counts: Vec<Count> = counts.into_iter().map(|c| c.unwrap()).collect();
            if let Count::Known(k) = count {
                let all_known: Option<i64> = counts
                    .iter()
                    .map(|c| match c {
                        Count::Known(x) => Some(*x),
                        Count::Unknown => None,
                    })
                    .sum();
                if all_known.is_some_and(|s| s != k) {
                    continue;
                }
            }
            let pairs: Vec<(Cell, Count)> = children.into_iter().zip(counts).collect();
            let found: Vec<Result<Vec<ZeroCluster>>> = par::map(&pairs, |(c, k)| {
                let k = match k {
                    Count::Known(x) => Count::Known(*x),
                    Count::Unknown => Count::Unknown,
                };
                self.explore(*c, k)
            });
            let mut out = Vec::new();
            for r in found {
                out.extend(r?);
            }
            return Ok(out);
        }
        Err(Error::ZeroLocalization(format!(
            "could not split the cell around {} without a zero on an edge",
            fmt_point(cell.center())
        )))
    }
}

/// Zeros of `f` in Ω by quadtree subdivision with argument-principle counts.
/// `expected` is the boundary count (see [`winding_vector`]); a mismatch with
/// the located total raises [`Error::ZeroLocalization`].
pub fn locate_zeros<H: Holomorphic + ?Sized>(
    f: &H,
    s: &BoundarySampling,
    expected: i64,
    opts: ZeroSearch,
) -> Result<Vec<ZeroCluster>> {
    let domain = s.domain();
    if expected == 0 {
        return Ok(vec![]);
    }
    let scale = scale_on(f, s);
    // Zeros are searched at distance > margin from Γ; the collar inside the
    // margin is certified zero-free by comparing windings on parallel circles.
    let margin = opts.margin_fraction * domain.min_radius();
    let floor = 1e-13 * scale;
    for j in 0..domain.n_components() {
        let c = domain.circle(j);
        let inward = if j == 0 { -margin } else { margin };
        let pieces = s.nodes_per_component();
        let on = circle_winding(f, c.center, c.radius, pieces, floor).map_err(|e| track_error(e, "collar check"))?;
        let off = circle_winding(f, c.center, c.radius + inward, pieces, floor)
            .map_err(|e| track_error(e, "collar check"))?;
        let collar = if j == 0 { on - off } else { off - on };
        if collar.round() != 0.0 {
            return Err(Error::ZeroOnBoundary(format!(
                "{} zero(s) within {margin:.1e} of boundary component {j}",
                collar.round()
            )));
        }
    }
    let o = domain.outer();
    // An off-centre root box keeps dyadic split lines away from symmetric points.
    let c = o.center + C64::new(0.0137, 0.0291) * o.radius;
    let h = 1.07 * o.radius;
    let root = Cell { x0: c.re - h, x1: c.re + h, y0: c.im - h, y1: c.im + h };
    let loc = Locator { f, domain, opts, floor: 1e-15 * scale, margin };
    let mut zeros = loc.explore(root, Count::Unknown)?;
    zeros.sort_by(|a, b| a.location.re.total_cmp(&b.location.re).then(a.location.im.total_cmp(&b.location.im)));
    let total: usize = zeros.iter().map(|z| z.multiplicity).sum();
    if total as i64 != expected {
        return Err(Error::ZeroLocalization(format!(
            "located {total} zeros but the boundary argument principle gives {expected}"
        )));
    }
    Ok(zeros)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Circle;
    use approx::assert_abs_diff_eq;

    fn annulus() -> (CircularDomain, BoundarySampling) {
        let d = CircularDomain::annulus(0.5, C64::new(0.5f64.sqrt(), 0.0)).unwrap();
        let s = BoundarySampling::new(&d, 64).unwrap();
        (d, s)
    }

    #[test]
    fn winding_examples() {
        let (_, s) = annulus();
        assert_eq!(winding_vector(&|w: C64| w, &s).unwrap().holes, vec![1]);
        assert_eq!(winding_vector(&|w: C64| w - 2.0, &s).unwrap().holes, vec![0]);
        assert_eq!(winding_vector(&|w: C64| w * w, &s).unwrap().holes, vec![2]);
        let r = winding_vector(&|w: C64| w.powi(-3), &s).unwrap();
        assert_eq!((r.holes[0], r.outer, r.zeros_in_domain), (-3, -3, 0));
        let r = winding_vector(&|w: C64| (w - 0.75) * (w + C64::new(0.0, 0.6)), &s).unwrap();
        assert_eq!(r.zeros_in_domain, 2);
        // a zero right on the outer circle cannot be wound around
        let err = winding_vector(&|w: C64| w - 1.0, &s).unwrap_err();
        assert_eq!(err.kind(), "BoundaryZeroError");
    }

    #[test]
    fn counts_in_small_circles() {
        let f = |w: C64| (w - 0.3).powi(2) * (w + 0.5);
        assert_eq!(count_zeros_in_circle(&f, C64::new(0.3, 0.0), 0.1).unwrap(), 2);
        assert_eq!(count_zeros_in_circle(&f, C64::new(-0.1, 0.0), 0.2).unwrap(), 0);
        assert_eq!(count_zeros_in_circle(&|w: C64| 1.0 / w, C64::new(0.0, 0.0), 0.2).unwrap(), -1);
    }

    #[test]
    fn locates_simple_and_double_zeros() {
        let (_, s) = annulus();
        let a = C64::new(0.5f64.sqrt(), 0.0);
        let b = C64::new(-0.3, -0.6);
        let f = move |w: C64| (w - a) * (w - b).powi(2) / w;
        let r = winding_vector(&f, &s).unwrap();
        assert_eq!(r.zeros_in_domain, 3);
        let z = locate_zeros(&f, &s, 3, ZeroSearch::default()).unwrap();
        assert_eq!(z.len(), 2);
        let double = z.iter().find(|c| c.multiplicity == 2).unwrap();
        assert!((double.location - b).norm() < 1e-4);
        let simple = z.iter().find(|c| c.multiplicity == 1).unwrap();
        assert!((simple.location - a).norm() < 1e-4);
    }

    #[test]
    fn ignores_zeros_in_holes_and_detects_mismatch() {
        let d = CircularDomain::new(
            Circle::new(C64::new(0.0, 0.0), 1.0),
            vec![Circle::new(C64::new(-0.4, 0.0), 0.15), Circle::new(C64::new(0.4, 0.0), 0.15)],
            C64::new(0.0, 0.0),
        )
        .unwrap();
        let s = BoundarySampling::new(&d, 64).unwrap();
        let z0 = C64::new(0.05, 0.45);
        let f = move |w: C64| (w - 0.42) * (w - z0) * (w + 1.3);
        let r = winding_vector(&f, &s).unwrap();
        assert_eq!(r.holes, vec![0, 1]);
        assert_eq!(r.zeros_in_domain, 1);
        let z = locate_zeros(&f, &s, 1, ZeroSearch::default()).unwrap();
        assert_eq!(z.len(), 1);
        assert_abs_diff_eq!((z[0].location - z0).norm(), 0.0, epsilon = 1e-4);
        assert_eq!(locate_zeros(&f, &s, 2, ZeroSearch::default()).unwrap_err().kind(), "ZeroLocalizationError");
    }
}
