//! Gauge norms on the sampled measure space `(Γ, ω)`.
//!
//! The measure is discrete: node `i` carries mass `μ_i` equal to its
//! ω-quadrature weight, renormalized so that `Σ μ_i = 1`. Every norm here is
//! a function of `|f|`, so all work happens on nonnegative node vectors.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryField, BoundarySampling};
use crate::laplace::OmegaDensity;
use crate::series::Holomorphic;

/// Probability weights on the boundary nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    mu: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn from_omega(omega: &OmegaDensity) -> Self {
        Self::from_weights(omega.weights().to_vec())
    }

    pub fn from_weights(w: Vec<f64>) -> Self {
        let total: f64 = w.iter().sum();
        DiscreteMeasure { mu: w.into_iter().map(|x| x / total).collect() }
    }

    pub fn uniform(n: usize) -> Self {
        DiscreteMeasure { mu: vec![1.0 / n as f64; n] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.mu
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// `∫ f h dμ`.
    pub fn pair(&self, f: &[C64], h: &[C64]) -> C64 {
        f.iter().zip(h).zip(&self.mu).map(|((a, b), m)| a * b * *m).sum()
    }

    pub fn l1(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.mu).map(|(a, m)| a * m).sum()
    }
}

/// An exponent in `[1, ∞]`; serialized as a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Exponent {
    pub fn is_infinite(&self) -> bool {
        self.0.is_infinite()
    }

    /// Hölder conjugate.
    pub fn conjugate(&self) -> Exponent {
        let p = self.0;
        if p == 1.0 {
            Exponent(f64::INFINITY)
        } else if p.is_infinite() {
            Exponent(1.0)
        } else {
            Exponent(p / (p - 1.0))
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Exponent(x)),
            Raw::Text(t) => match t.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "∞" => Ok(Exponent(f64::INFINITY)),
                other => other.parse().map(Exponent).map_err(serde::de::Error::custom),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub w: f64,
    pub p: Exponent,
}

/// `P`: `‖·‖_p`; `Max`: `max_k w_k‖·‖_{p_k}`; `Sum`: `Σ_k w_k‖·‖_{p_k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GaugeNormSpec {
    P { p: Exponent },
    Max { terms: Vec<Term> },
    Sum { terms: Vec<Term> },
}

fn p_norm(x: &[f64], mu: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return x.iter().zip(mu).filter(|(_, m)| **m > 0.0).map(|(a, _)| *a).fold(0.0, f64::max);
    }
    if p == 1.0 {
        return x.iter().zip(mu).map(|(a, m)| a * m).sum();
    }
    let scale = x.iter().copied().fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = x.iter().zip(mu).map(|(a, m)| m * (a / scale).powf(p)).sum();
    scale * s.powf(1.0 / p)
}

impl GaugeNormSpec {
    pub fn p(p: f64) -> Self {
        GaugeNormSpec::P { p: Exponent(p) }
    }

    /// Structural checks: exponents in `[1, ∞]`, positive finite weights,
    /// and `∞` only as a pure `p = ∞` spec.
    pub fn validate(&self) -> Result<()> {
        let check_p = |p: Exponent| {
            if !(p.0 >= 1.0) {
                return Err(Error::Config(format!("exponent {} is below 1", p.0)));
            }
            Ok(())
        };
        match self {
            GaugeNormSpec::P { p } => check_p(*p),
            GaugeNormSpec::Max { terms } | GaugeNormSpec::Sum { terms } => {
                if terms.is_empty() {
                    return Err(Error::Config("gauge spec needs at least one term".into()));
                }
                for t in terms {
                    check_p(t.p)?;
                    if t.p.is_infinite() {
                        return Err(Error::Config("p = inf is only supported as a pure p-norm".into()));
                    }
                    if !(t.w > 0.0 && t.w.is_finite()) {
                        return Err(Error::Config(format!("term weight {} must be positive and finite", t.w)));
                    }
                }
                Ok(())
            }
        }
    }

    /// `α(x)` for a nonnegative node vector.
    pub fn eval_abs(&self, x: &[f64], m: &DiscreteMeasure) -> f64 {
        let mu = m.weights();
        match self {
            GaugeNormSpec::P { p } => p_norm(x, mu, p.0),
            GaugeNormSpec::Max { terms } => terms.iter().map(|t| t.w * p_norm(x, mu, t.p.0)).fold(0.0, f64::max),
            GaugeNormSpec::Sum { terms } => terms.iter().map(|t| t.w * p_norm(x, mu, t.p.0)).sum(),
        }
    }

    fn terms(&self) -> Vec<Term> {
        match self {
            GaugeNormSpec::P { p } => vec![Term { w: 1.0, p: *p }],
            GaugeNormSpec::Max { terms } | GaugeNormSpec::Sum { terms } => terms.clone(),
        }
    }
}

/// `α(f)` over the discrete measure.
pub fn gauge_eval(spec: &GaugeNormSpec, f: &BoundaryField, m: &DiscreteMeasure) -> Result<f64> {
    if f.len() != m.len() {
        return Err(Error::Shape(format!("field has {} nodes, measure has {}", f.len(), m.len())));
    }
    let x: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    Ok(spec.eval_abs(&x, m))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub alpha_one: f64,
    /// `min α(f) − ‖f‖₁` over the probe family.
    pub dominating_margin: f64,
    /// `ω(E_m)` for the nested arcs.
    pub arc_masses: Vec<f64>,
    /// `α(χ_{E_m})`.
    pub continuity: Vec<f64>,
    /// False for `p = ∞`, which is admitted without the continuity axiom.
    pub continuity_applicable: bool,
}

fn probe_family(s: &BoundarySampling) -> Vec<Vec<f64>> {
    let n = s.len();
    let mut out = vec![vec![1.0; n]];
    for j in 0..s.n_components() {
        let mut v = vec![0.0; n];
        for i in s.component_range(j) {
            v[i] = 1.0;
        }
        out.push(v);
    }
    for k in 1..=3 {
        out.push(s.nodes().iter().map(|w| w.norm().powi(k) + w.re.abs()).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..16 {
        out.push((0..n).map(|_| rng.gen::<f64>()).collect());
    }
    for _ in 0..8 {
        out.push((0..n).map(|_| if rng.gen::<f64>() < 0.05 { rng.gen::<f64>() * 10.0 } else { 0.0 }).collect());
    }
    out
}

/// α(1) = 1, dominating (`α(f) ≥ ‖f‖₁` on probes) and continuity along
/// nested arcs of Γ₀ shrinking to a single node.
pub fn check_gauge_axioms(spec: &GaugeNormSpec, m: &DiscreteMeasure, s: &BoundarySampling) -> Result<AxiomReport> {
    spec.validate()?;
    let n = s.len();
    if m.len() != n {
        return Err(Error::Shape(format!("measure has {} nodes, sampling has {n}", m.len())));
    }
    let alpha_one = spec.eval_abs(&vec![1.0; n], m);
    let dominating_margin = probe_family(s).iter().map(|x| spec.eval_abs(x, m) - m.l1(x)).fold(f64::INFINITY, f64::min);
    let mut arc_masses = Vec::new();
    let mut continuity = Vec::new();
    let mut len = s.nodes_per_component() / 2;
    while len >= 1 {
        let mut chi = vec![0.0; n];
        chi[..len].iter_mut().for_each(|v| *v = 1.0);
        arc_masses.push(m.l1(&chi));
        continuity.push(spec.eval_abs(&chi, m));
        len /= 2;
    }
    let continuity_applicable = !matches!(spec, GaugeNormSpec::P { p } if p.is_infinite());
    let report = AxiomReport { alpha_one, dominating_margin, arc_masses, continuity, continuity_applicable };
    if (alpha_one - 1.0).abs() > 1e-12 {
        return Err(Error::AxiomViolation(format!("alpha(1) = {alpha_one}, expected 1")));
    }
    if dominating_margin < -1e-12 {
        return Err(Error::AxiomViolation(format!("not dominating: alpha(f) - |f|_1 = {dominating_margin:e}")));
    }
    if continuity_applicable && report.continuity.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::AxiomViolation("alpha(chi_E) does not decrease along shrinking arcs".into()));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DualMethod {
    ClosedForm,
    Ascent,
    Minimax,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualResult {
    pub value: f64,
    /// `⟨|f|, x⟩ / α(x)` at the best ascent point; equals `value` for closed forms.
    pub lower_bound: f64,
    pub iterations: usize,
    pub stationarity: f64,
    pub method: DualMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualOptions {
    /// Iteration budget; `None` means 10 per node.
    pub budget: Option<usize>,
    /// Stop when `Σ π_i |log r_i|` falls below this.
    pub stationarity: f64,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions { budget: None, stationarity: 1e-9 }
    }
}

/// `α′(f) = sup{|∫ f h dμ| : α(h) ≤ 1}`. Closed form for p-norms, ascent
/// for sums, and a minimax over term weights for maxima.
pub fn dual_norm(
    spec: &GaugeNormSpec,
    f: &BoundaryField,
    m: &DiscreteMeasure,
    opts: DualOptions,
) -> Result<DualResult> {
    spec.validate()?;
    if let GaugeNormSpec::P { p } = spec {
        let g: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
        let value = p_norm(&g, m.weights(), p.conjugate().0);
        return Ok(DualResult {
            value,
            lower_bound: value,
            iterations: 0,
            stationarity: 0.0,
            method: DualMethod::ClosedForm,
        });
    }
    dual_norm_iterative(spec, f, m, opts)
}

/// Iterative dual norm for any finite-exponent spec, used directly for
/// sums and maxima and as a cross-check of the closed forms.
pub fn dual_norm_iterative(
    spec: &GaugeNormSpec,
    f: &BoundaryField,
    m: &DiscreteMeasure,
    opts: DualOptions,
) -> Result<DualResult> {
    spec.validate()?;
    if f.len() != m.len() {
        return Err(Error::Shape(format!("field has {} nodes, measure has {}", f.len(), m.len())));
    }
    let g: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    let terms = spec.terms();
    if terms.iter().any(|t| t.p.is_infinite()) {
        return Err(Error::Config("iterative dual norm needs finite exponents".into()));
    }
    match spec {
        GaugeNormSpec::Max { terms } if terms.len() > 1 => minimax_dual(terms, &g, m, opts),
        _ => Ok(ascent(&terms, &g, m, opts)?.result),
    }
}

fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    let mx = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    mx + v.iter().map(|x| (x - mx).exp()).sum::<f64>().ln()
}

struct AscentState {
    log_f: f64,
    log_r: Vec<f64>,
    /// `log r_i` divided by the local curvature `p_eff − 1`.
    step: Vec<f64>,
    pi: Vec<f64>,
}

struct AscentOutcome {
    result: DualResult,
    /// Maximizer on all nodes, scaled to `max x = 1`.
    x: Vec<f64>,
}

/// Maximizes `⟨g, x⟩ / Σ_k w_k‖x‖_{p_k}` over `x > 0` on the support of `g`
/// with multiplicative updates `x_i ← x_i·r_i^{η/(p_eff,i − 1)}`, where
/// `r_i` is the ratio of the pairing share to the norm's Euler share at
/// node `i` and `p_eff,i` the exponent of the local Euler share.
fn ascent(terms: &[Term], g: &[f64], m: &DiscreteMeasure, opts: DualOptions) -> Result<AscentOutcome> {
    let support: Vec<usize> = (0..g.len()).filter(|&i| g[i] > 0.0 && m.weights()[i] > 0.0).collect();
    if support.is_empty() {
        return Ok(AscentOutcome {
            result: DualResult {
                value: 0.0,
                lower_bound: 0.0,
                iterations: 0,
                stationarity: 0.0,
                method: DualMethod::Ascent,
            },
            x: vec![0.0; g.len()],
        });
    }
    let lmu: Vec<f64> = support.iter().map(|&i| m.weights()[i].ln()).collect();
    let lg: Vec<f64> = support.iter().map(|&i| g[i].ln()).collect();
    let eval = |y: &[f64]| -> AscentState {
        let log_pair = log_sum_exp((0..y.len()).map(|i| lmu[i] + lg[i] + y[i]));
        let log_norms: Vec<f64> =
            terms.iter().map(|t| log_sum_exp((0..y.len()).map(|i| lmu[i] + t.p.0 * y[i])) / t.p.0).collect();
        let alpha: f64 = terms.iter().zip(&log_norms).map(|(t, ln)| t.w * ln.exp()).sum();
        let log_alpha = alpha.ln();
        let n = y.len();
        let (mut log_r, mut step, mut pi) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for i in 0..n {
            let log_pi = lmu[i] + lg[i] + y[i] - log_pair;
            let parts: Vec<f64> =
                terms.iter().zip(&log_norms).map(|(t, ln)| t.w.ln() + t.p.0 * y[i] + (1.0 - t.p.0) * ln).collect();
            let lse = log_sum_exp(parts.iter().copied());
            let p_eff: f64 = terms.iter().zip(&parts).map(|(t, l)| t.p.0 * (l - lse).exp()).sum();
            let lr = log_pi - (lmu[i] + lse - log_alpha);
            pi.push(log_pi.exp());
            log_r.push(lr);
            step.push(lr / (p_eff - 1.0).max(1e-3));
        }
        AscentState { log_f: log_pair - log_alpha, log_r, step, pi }
    };
    let finish = |y: &[f64], state: &AscentState, it: usize, stat: f64| {
        let v = state.log_f.exp();
        let mut x = vec![0.0; g.len()];
        for (k, &i) in support.iter().enumerate() {
            x[i] = y[k].exp();
        }
        AscentOutcome {
            result: DualResult {
                value: v,
                lower_bound: v,
                iterations: it,
                stationarity: stat,
                method: DualMethod::Ascent,
            },
            x,
        }
    };
    let budget = opts.budget.unwrap_or(10 * g.len());
    let mut y = vec![0.0; support.len()];
    let mut state = eval(&y);
    let mut eta = 1.0f64;
    let mut stat = f64::INFINITY;
    for it in 0..budget {
        stat = state.pi.iter().zip(&state.log_r).map(|(p, r)| p * r.abs()).sum();
        if stat < opts.stationarity {
            return Ok(finish(&y, &state, it, stat));
        }
        let mut trial: Vec<f64> = y.iter().zip(&state.step).map(|(a, r)| a + eta * r).collect();
        let top = trial.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        trial.iter_mut().for_each(|v| *v = (*v - top).max(-700.0));
        let next = eval(&trial);
        if next.log_f >= state.log_f - 1e-15 {
            y = trial;
            state = next;
            eta = (eta * 2.0).min(1.0);
        } else {
            eta *= 0.5;
            if eta < 1e-14 {
                // No representable improvement is left.
                return Ok(finish(&y, &state, it, stat));
            }
        }
    }
    Err(Error::Convergence(format!("dual-norm ascent used {budget} iterations; stationarity {stat:e}")))
}

fn weighted_terms(terms: &[Term], lam: &[f64]) -> Vec<Term> {
    terms.iter().zip(lam).filter(|(_, l)| **l > 0.0).map(|(t, l)| Term { w: t.w * l, p: t.p }).collect()
}

/// `α′ = min_λ (Σ_k λ_k w_k‖·‖_{p_k})′` over the simplex, by golden-section
/// sweeps over pairs of coordinates. The maximizer `x` at the final weights
/// gives the certificate `⟨g, x⟩ / α(x) ≤ α′`.
fn minimax_dual(terms: &[Term], g: &[f64], m: &DiscreteMeasure, opts: DualOptions) -> Result<DualResult> {
    let k = terms.len();
    let mut iterations = 0usize;
    let mut objective = |lam: &[f64]| -> Result<AscentOutcome> {
        let out = ascent(&weighted_terms(terms, lam), g, m, opts)?;
        iterations += out.result.iterations;
        Ok(out)
    };
    let mut lam = vec![1.0 / k as f64; k];
    let mut best = objective(&lam)?;
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _sweep in 0..50 {
        let before = best.result.value;
        for a in 0..k {
            for b in a + 1..k {
                let total = lam[a] + lam[b];
                let at = |t: f64, lam: &[f64]| {
                    let mut l = lam.to_vec();
                    l[a] = t * total;
                    l[b] = (1.0 - t) * total;
                    l
                };
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                let mut x1 = hi - phi * (hi - lo);
                let mut x2 = lo + phi * (hi - lo);
                let mut f1 = objective(&at(x1, &lam))?.result.value;
                let mut f2 = objective(&at(x2, &lam))?.result.value;
                while hi - lo > 1e-10 {
                    if f1 <= f2 {
                        hi = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = hi - phi * (hi - lo);
                        f1 = objective(&at(x1, &lam))?.result.value;
                    } else {
                        lo = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = lo + phi * (hi - lo);
                        f2 = objective(&at(x2, &lam))?.result.value;
                    }
                }
                let cand = at(0.5 * (lo + hi), &lam);
                let out = objective(&cand)?;
                if out.result.value < best.result.value {
                    best = out;
                    lam = cand;
                }
            }
        }
        if k == 2 || before - best.result.value <= 1e-13 * best.result.value {
            break;
        }
    }
    let spec = GaugeNormSpec::Max { terms: terms.to_vec() };
    let pair: f64 = best.x.iter().zip(g).zip(m.weights()).map(|((a, b), w)| a * b * w).sum();
    let lower_bound = if pair > 0.0 { pair / spec.eval_abs(&best.x, m) } else { 0.0 };
    Ok(DualResult {
        value: best.result.value,
        lower_bound,
        iterations,
        stationarity: best.result.stationarity,
        method: DualMethod::Minimax,
    })
}

/// At desk scale every series function is bounded, so membership in `H^α`
/// reduces to a finite norm; the norm is the content.
pub fn h_alpha_membership<H: Holomorphic + ?Sized>(
    f: &H,
    spec: &GaugeNormSpec,
    m: &DiscreteMeasure,
    s: &BoundarySampling,
) -> Result<(bool, f64)> {
    let field = BoundaryField::from_fn(s, |w| f.eval(w));
    let a = gauge_eval(spec, &field, m)?;
    Ok((a.is_finite(), a))
}

/// `max(0, |∫ f h dμ| − α(f)·α′(h))`.
pub fn holder_violation(
    spec: &GaugeNormSpec,
    f: &BoundaryField,
    h: &BoundaryField,
    m: &DiscreteMeasure,
) -> Result<f64> {
    let lhs = m.pair(f.values(), h.values()).norm();
    let rhs = gauge_eval(spec, f, m)? * dual_norm(spec, h, m, DualOptions::default())?.value;
    Ok((lhs - rhs).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CircularDomain;
    use crate::laplace::HarmonicContext;
    use approx::assert_abs_diff_eq;

    fn setup() -> (HarmonicContext, DiscreteMeasure) {
        let d = CircularDomain::annulus(0.5, C64::new(0.5f64.sqrt(), 0.0)).unwrap();
        let ctx = HarmonicContext::new(&d, 128, 48, Default::default()).unwrap();
        let m = DiscreteMeasure::from_omega(ctx.omega());
        (ctx, m)
    }

    fn max_spec() -> GaugeNormSpec {
        GaugeNormSpec::Max { terms: vec![Term { w: 1.0, p: Exponent(1.0) }, Term { w: 0.5, p: Exponent(2.0) }] }
    }

    #[test]
    fn parses_config_json() {
        let s: GaugeNormSpec = serde_json::from_str(r#"{"kind": "p", "p": 2}"#).unwrap();
        assert_eq!(s, GaugeNormSpec::p(2.0));
        let s: GaugeNormSpec = serde_json::from_str(r#"{"kind": "p", "p": "inf"}"#).unwrap();
        assert_eq!(s, GaugeNormSpec::p(f64::INFINITY));
        let s: GaugeNormSpec =
            serde_json::from_str(r#"{"kind":"max","terms":[{"w":1,"p":1},{"w":0.5,"p":2}]}"#).unwrap();
        assert_eq!(s, max_spec());
        let bad = GaugeNormSpec::Max { terms: vec![Term { w: 1.0, p: Exponent(f64::INFINITY) }] };
        assert_eq!(bad.validate().unwrap_err().kind(), "ConfigError");
        assert_eq!(serde_json::to_string(&GaugeNormSpec::p(f64::INFINITY)).unwrap(), r#"{"kind":"p","p":"inf"}"#);
    }

    #[test]
    fn eval_examples() {
        let (ctx, m) = setup();
        let s = ctx.sampling();
        let one = BoundaryField::constant(s, C64::new(1.0, 0.0));
        assert_abs_diff_eq!(gauge_eval(&GaugeNormSpec::p(1.0), &one, &m).unwrap(), 1.0, epsilon = 1e-14);
        let chi = BoundaryField::indicator(s, 1);
        assert_abs_diff_eq!(gauge_eval(&GaugeNormSpec::p(2.0), &chi, &m).unwrap(), 0.5f64.sqrt(), epsilon = 1e-8);
        assert_abs_diff_eq!(gauge_eval(&max_spec(), &one, &m).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn axiom_examples() {
        let (ctx, m) = setup();
        let s = ctx.sampling();
        let r = check_gauge_axioms(&GaugeNormSpec::p(2.0), &m, s).unwrap();
        for (a, mass) in r.continuity.iter().zip(&r.arc_masses) {
            assert_abs_diff_eq!(*a, mass.sqrt(), epsilon = 1e-14);
        }
        let half = GaugeNormSpec::Sum { terms: vec![Term { w: 0.5, p: Exponent(1.0) }] };
        assert_eq!(check_gauge_axioms(&half, &m, s).unwrap_err().kind(), "AxiomViolation");
        let r = check_gauge_axioms(&GaugeNormSpec::p(1.0), &m, s).unwrap();
        assert_abs_diff_eq!(r.dominating_margin, 0.0, epsilon = 1e-14);
        assert!(check_gauge_axioms(&max_spec(), &m, s).is_ok());
        let r = check_gauge_axioms(&GaugeNormSpec::p(f64::INFINITY), &m, s).unwrap();
        assert!(!r.continuity_applicable);
    }

    #[test]
    fn dual_examples() {
        let (ctx, m) = setup();
        let s = ctx.sampling();
        let one = BoundaryField::constant(s, C64::new(1.0, 0.0));
        let opts = DualOptions::default();
        assert_abs_diff_eq!(dual_norm(&GaugeNormSpec::p(2.0), &one, &m, opts).unwrap().value, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            dual_norm_iterative(&GaugeNormSpec::p(2.0), &one, &m, opts).unwrap().value,
            1.0,
            epsilon = 1e-12
        );
        let f = BoundaryField::from_fn(s, |w| w - 2.0);
        let sup = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert_abs_diff_eq!(dual_norm(&GaugeNormSpec::p(1.0), &f, &m, opts).unwrap().value, sup, epsilon = 1e-14);
        let it = dual_norm_iterative(&GaugeNormSpec::p(1.0), &f, &m, opts).unwrap();
        assert_abs_diff_eq!(it.value, sup, epsilon = 1e-6);
        let zero = BoundaryField::constant(s, C64::new(0.0, 0.0));
        for spec in [GaugeNormSpec::p(1.5), max_spec()] {
            assert_eq!(dual_norm(&spec, &zero, &m, opts).unwrap().value, 0.0);
        }
    }

    // α′ for the max spec lies between the duals of its terms and matches
    // its own lower-bound certificate.
    #[test]
    fn max_dual_is_certified() {
        let (ctx, m) = setup();
        let s = ctx.sampling();
        let f = BoundaryField::from_fn(s, |w| (w * 3.0).exp() + 0.2);
        let r = dual_norm(&max_spec(), &f, &m, DualOptions::default()).unwrap();
        assert_eq!(r.method, DualMethod::Minimax);
        assert!((r.value - r.lower_bound).abs() < 1e-6 * r.value);
        let d1 = dual_norm(&GaugeNormSpec::p(1.0), &f, &m, DualOptions::default()).unwrap().value;
        assert!(r.value <= d1 + 1e-9);
        let g = BoundaryField::from_fn(s, |w| w * w + 0.3);
        assert!(holder_violation(&max_spec(), &g, &f, &m).unwrap() <= 1e-9);
    }

    mod props {
        use super::*;
        use proptest::prelude::{prop_assert, proptest, ProptestConfig};

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn holder_and_dual_dominating(seed in 0u64..1000, pi in 0usize..5) {
                let (ctx, m) = setup();
                let s = ctx.sampling();
                let p = [1.0, 1.5, 2.0, 3.0, f64::INFINITY][pi];
                let spec = GaugeNormSpec::p(p);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let f = BoundaryField::new(s, (0..s.len()).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect()).unwrap();
                let h = BoundaryField::new(s, (0..s.len()).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>())).collect()).unwrap();
                prop_assert!(holder_violation(&spec, &f, &h, &m).unwrap() <= 1e-9);
                let dual = dual_norm(&spec, &f, &m, DualOptions::default()).unwrap().value;
                let l1 = m.l1(&f.values().iter().map(|v| v.norm()).collect::<Vec<_>>());
                prop_assert!(dual >= l1 - 1e-12);
                // the dual of the dual gives back the norm
                let back = GaugeNormSpec::P { p: Exponent(p).conjugate() };
                let dd = dual_norm(&back, &f, &m, DualOptions::default()).unwrap().value;
                prop_assert!((dd - gauge_eval(&spec, &f, &m).unwrap()).abs() < 1e-6);
            }

            #[test]
            fn ascent_matches_closed_form(seed in 0u64..1000, pi in 0usize..4) {
                let (ctx, m) = setup();
                let s = ctx.sampling();
                let spec = GaugeNormSpec::p([1.0, 1.5, 2.0, 3.0][pi]);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let f = BoundaryField::new(s, (0..s.len()).map(|_| C64::new(rng.gen::<f64>(), 0.0)).collect()).unwrap();
                let exact = dual_norm(&spec, &f, &m, DualOptions::default()).unwrap().value;
                let it = dual_norm_iterative(&spec, &f, &m, DualOptions::default()).unwrap().value;
                prop_assert!((exact - it).abs() < 1e-6, "{} vs {}", exact, it);
            }

            // A sum of norms is at least each weighted term, so its dual is
            // at most each term's dual divided by the weight.
            #[test]
            fn sum_dual_below_term_duals(seed in 0u64..1000) {
                let (ctx, m) = setup();
                let s = ctx.sampling();
                let spec = GaugeNormSpec::Sum { terms: vec![Term { w: 0.6, p: Exponent(1.0) }, Term { w: 0.4, p: Exponent(3.0) }] };
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let f = BoundaryField::new(s, (0..s.len()).map(|_| C64::new(rng.gen::<f64>(), rng.gen::<f64>())).collect()).unwrap();
                let d = dual_norm(&spec, &f, &m, DualOptions::default()).unwrap().value;
                let d1 = dual_norm(&GaugeNormSpec::p(1.0), &f, &m, DualOptions::default()).unwrap().value / 0.6;
                let d3 = dual_norm(&GaugeNormSpec::p(3.0), &f, &m, DualOptions::default()).unwrap().value / 0.4;
                prop_assert!(d <= d1.min(d3) + 1e-9);
                let l1 = m.l1(&f.values().iter().map(|v| v.norm()).collect::<Vec<_>>());
                prop_assert!(d >= l1 - 1e-9);
            }
        }
    }
}
