use serde::Serialize;
use serde_json::Value;

use royden_core::galerkin::{build_space, run_beurling, BeurlingConfig, BeurlingRecord, CorpusEntry, SpaceDiagnostics};
use royden_core::gauge::{
    check_gauge_axioms, dual_norm, gauge_eval, h_alpha_membership, AxiomReport, DiscreteMeasure, DualOptions,
    DualResult, GaugeNormSpec,
};
use royden_core::geometry::{BoundaryField, DomainConfig};
use royden_core::hardy::{
    affiliated_graph, inner_outer_factor, is_outer, locate_zeros, winding_vector, AffiliatedStats, CorpusFunction,
    Expr, FactorSummary, Holomorphic, OuterCheck, PointTable, ZeroCluster, ZeroSearch,
};
use royden_core::laplace::{HarmonicContext, Tolerances};
use royden_core::{Error, Result};

use crate::manifest::{CorpusItem, Entry};
use crate::report::{fmt_f64, Output, Table};
use crate::Command;

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))
}

fn context(e: &Entry) -> Result<HarmonicContext> {
    HarmonicContext::new(&e.domain, e.m, e.k_solve, e.tolerances)
}

fn resolve(src: &str, ctx: &HarmonicContext, points: &PointTable) -> Result<CorpusFunction> {
    Expr::parse(src)?.resolve(ctx, points)
}

fn resolve_item(item: &CorpusItem, ctx: &HarmonicContext, points: &PointTable) -> Result<CorpusFunction> {
    resolve(&item.label(), ctx, points)
}

/// Node index, component and angle columns shared by the boundary tables.
fn node_prefix(ctx: &HarmonicContext, i: usize) -> Vec<String> {
    let s = ctx.sampling();
    vec![i.to_string(), s.component_of(i).to_string(), fmt_f64(s.angles()[i])]
}

pub fn run(cmd: Command, e: &Entry) -> Result<Output> {
    match cmd {
        Command::Measure => measure(e),
        Command::Factor => factor(e),
        Command::Beurling => beurling(e),
        Command::Gauge => gauge(e),
        Command::Affiliated => affiliated(e),
    }
}

#[derive(Serialize)]
struct MeasureReport {
    domain: DomainConfig,
    m: usize,
    k_solve: usize,
    tolerances: Tolerances,
    mass: f64,
    component_mass: Vec<f64>,
    min_density: f64,
    /// `h_j(ŵ)` for each hole.
    h_at_base: Vec<f64>,
    period_matrix: Vec<Vec<f64>>,
    symmetry_defect: f64,
    min_singular: f64,
    /// `∫_{Γ_k} Q_j dω`, row `j`.
    q_component_integrals: Vec<Vec<f64>>,
}

fn measure(e: &Entry) -> Result<Output> {
    let ctx = context(e)?;
    let s = ctx.sampling();
    let om = ctx.omega();
    let base = ctx.domain().base_point();
    let pm = ctx.period_matrix();
    let n = pm.dim();
    let q = ctx.q_functions();
    let q_component_integrals = q
        .iter()
        .map(|qj| {
            (0..s.n_components())
                .map(|k| s.component_range(k).map(|i| qj.values()[i].re * om.weights()[i]).sum())
                .collect()
        })
        .collect();
    let report = MeasureReport {
        domain: ctx.domain().to_config(),
        m: e.m,
        k_solve: e.k_solve,
        tolerances: e.tolerances,
        mass: om.mass(),
        component_mass: om.component_mass().to_vec(),
        min_density: om.min_density(),
        h_at_base: ctx.units().iter().map(|h| h.eval_unchecked(base)).collect(),
        period_matrix: (1..=n).map(|j| (1..=n).map(|k| pm.get(j, k)).collect()).collect(),
        symmetry_defect: pm.symmetry_defect(),
        min_singular: pm.min_singular(),
        q_component_integrals,
    };
    let mut omega = Table::new("omega", &["node", "component", "theta", "x", "y", "density", "weight"]);
    for i in 0..s.len() {
        let mut row = node_prefix(&ctx, i);
        let w = s.nodes()[i];
        row.extend([w.re, w.im, om.density()[i], om.weights()[i]].map(fmt_f64));
        omega.push(row);
    }
    let cols: Vec<String> = (1..=n).map(|k| format!("p_{k}")).collect();
    let mut periods = Table::new("period_matrix", &cols.iter().map(String::as_str).collect::<Vec<_>>());
    for j in 1..=n {
        periods.push((1..=n).map(|k| fmt_f64(pm.get(j, k))).collect());
    }
    let mut header = vec!["node".to_string(), "component".into(), "theta".into()];
    header.extend((1..=n).map(|j| format!("Q_{j}")));
    let mut qt = Table::new("q_functions", &header.iter().map(String::as_str).collect::<Vec<_>>());
    for i in 0..s.len() {
        let mut row = node_prefix(&ctx, i);
        row.extend(q.iter().map(|qj| fmt_f64(qj.values()[i].re)));
        qt.push(row);
    }
    Ok(Output { report: to_value(&report)?, tables: vec![omega, periods, qt] })
}

#[derive(Serialize)]
struct FactorRecord {
    label: String,
    factor: FactorSummary,
    outer: OuterCheck,
    zeros: Vec<ZeroCluster>,
}

fn factor(e: &Entry) -> Result<Output> {
    let ctx = context(e)?;
    let s = ctx.sampling();
    let mut records = Vec::new();
    let mut summary = Table::new("factor", &["label", "residual", "fit_residual", "zeros_in_domain", "inner", "outer"]);
    let mut moduli = Table::new("moduli", &["label", "component", "modulus", "winding"]);
    for item in &e.corpus {
        let label = item.label();
        let f = resolve_item(item, &ctx, &e.points)?;
        let r = inner_outer_factor(&f, &ctx)?;
        let outer = is_outer(&f, &ctx)?;
        let count = winding_vector(&f, s)?.zeros_in_domain;
        let zeros = locate_zeros(&f, s, count, ZeroSearch::default())?;
        let sm = r.summary();
        summary.push(vec![
            label.clone(),
            fmt_f64(sm.residual),
            fmt_f64(sm.fit_residual),
            sm.zeros_in_domain.to_string(),
            sm.inner.to_string(),
            outer.outer.to_string(),
        ]);
        for (j, m) in sm.component_moduli.iter().enumerate() {
            let wind = if j == 0 { String::new() } else { sm.winding[j - 1].to_string() };
            moduli.push(vec![label.clone(), j.to_string(), fmt_f64(*m), wind]);
        }
        records.push(FactorRecord { label, factor: sm, outer, zeros });
    }
    Ok(Output {
        report: to_value(&serde_json::json!({ "functions": to_value(&records)? }))?,
        tables: vec![summary, moduli],
    })
}

#[derive(Serialize)]
struct BeurlingReport {
    k: usize,
    m: usize,
    degrees: Vec<usize>,
    d0: usize,
    space: SpaceDiagnostics,
    records: Vec<BeurlingRecord>,
}

fn beurling(e: &Entry) -> Result<Output> {
    let ctx = context(e)?;
    let space = build_space(&ctx, e.k)?;
    let corpus = e
        .corpus
        .iter()
        .map(|item| {
            let inner: Option<Box<dyn Holomorphic>> = match item.inner() {
                Some(i) => Some(Box::new(resolve(i, &ctx, &e.points)?)),
                None => None,
            };
            Ok(CorpusEntry { label: item.label(), f: Box::new(resolve_item(item, &ctx, &e.points)?), inner })
        })
        .collect::<Result<Vec<_>>>()?;
    let cfg = BeurlingConfig { degrees: e.degrees.clone(), d0: e.d0, extract: e.extract, ..Default::default() };
    let records = run_beurling(&ctx, &space, &corpus, &cfg)?;
    let mut angles = Table::new(
        "angles",
        &[
            "label",
            "d",
            "rank",
            "angle",
            "generator_sine",
            "containment_sine",
            "cyclicity",
            "leakage",
            "invariance_defect",
        ],
    );
    let mut verdicts =
        Table::new("verdicts", &["label", "outer", "cyclic", "agrees", "angle_monotone", "extracted_equivalent"]);
    for r in &records {
        for d in &r.degrees {
            let mut row = vec![r.label.clone(), d.d.to_string(), d.rank.to_string()];
            row.extend(
                [d.angle, d.generator_sine, d.containment_sine, d.cyclicity, d.leakage, d.invariance_defect]
                    .map(fmt_f64),
            );
            angles.push(row);
        }
        verdicts.push(vec![
            r.label.clone(),
            r.outer.to_string(),
            r.cyclic.to_string(),
            r.agrees.to_string(),
            r.angle_monotone.to_string(),
            r.extracted_equivalent.map(|b| b.to_string()).unwrap_or_default(),
        ]);
    }
    let report = BeurlingReport {
        k: e.k,
        m: e.m,
        degrees: e.degrees.clone(),
        d0: e.d0,
        space: space.diagnostics().clone(),
        records,
    };
    Ok(Output { report: to_value(&report)?, tables: vec![angles, verdicts] })
}

#[derive(Serialize)]
struct NormRecord {
    label: String,
    alpha: f64,
    finite: bool,
    dual: DualResult,
}

#[derive(Serialize)]
struct GaugeReport {
    spec: GaugeNormSpec,
    axioms: AxiomReport,
    norms: Vec<NormRecord>,
}

fn gauge(e: &Entry) -> Result<Output> {
    let spec = e.gauge.clone().ok_or_else(|| Error::Config("missing gauge spec".into()))?;
    let ctx = context(e)?;
    let s = ctx.sampling();
    let m = DiscreteMeasure::from_omega(ctx.omega());
    let axioms = check_gauge_axioms(&spec, &m, s)?;
    let mut norms = Vec::new();
    let mut table = Table::new("norms", &["label", "alpha", "dual", "lower_bound", "method", "iterations"]);
    for item in &e.corpus {
        let f = resolve_item(item, &ctx, &e.points)?;
        let (finite, alpha) = h_alpha_membership(&f, &spec, &m, s)?;
        let field = BoundaryField::from_fn(s, |w| f.eval(w));
        debug_assert_eq!(alpha, gauge_eval(&spec, &field, &m)?);
        let dual = dual_norm(&spec, &field, &m, DualOptions::default())?;
        let method = to_value(&dual.method)?.as_str().unwrap_or_default().to_string();
        table.push(vec![
            item.label(),
            fmt_f64(alpha),
            fmt_f64(dual.value),
            fmt_f64(dual.lower_bound),
            method,
            dual.iterations.to_string(),
        ]);
        norms.push(NormRecord { label: item.label(), alpha, finite, dual });
    }
    let mut cont = Table::new("continuity", &["arc_mass", "alpha"]);
    for (a, b) in axioms.arc_masses.iter().zip(&axioms.continuity) {
        cont.push(vec![fmt_f64(*a), fmt_f64(*b)]);
    }
    Ok(Output { report: to_value(&GaugeReport { spec, axioms, norms })?, tables: vec![table, cont] })
}

#[derive(Serialize)]
struct AffiliatedOut {
    psi: String,
    eta: String,
    u: String,
    v: String,
    stats: AffiliatedStats,
}

fn affiliated(e: &Entry) -> Result<Output> {
    let spec = e.affiliated.clone().ok_or_else(|| Error::Config("missing affiliated spec".into()))?;
    let ctx = context(e)?;
    let get = |src: &str| resolve(src, &ctx, &e.points);
    let (psi, eta, u, v) = (get(&spec.psi)?, get(&spec.eta)?, get(&spec.u)?, get(&spec.v)?);
    let r = affiliated_graph(&psi, &eta, &u, &v, &ctx)?;
    let s = ctx.sampling();
    let mut levels = Table::new("levels", &["node", "component", "theta", "abs_a", "abs_b", "level"]);
    for i in 0..s.len() {
        let w = s.nodes()[i];
        let (a, b) = (r.a.eval(w).norm(), r.b.eval(w).norm());
        let mut row = node_prefix(&ctx, i);
        row.extend([a, b, a + b].map(fmt_f64));
        levels.push(row);
    }
    let out = AffiliatedOut { psi: spec.psi, eta: spec.eta, u: spec.u, v: spec.v, stats: r.stats };
    Ok(Output { report: to_value(&out)?, tables: vec![levels] })
}
