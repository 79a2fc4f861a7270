use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;

use royden_core::gauge::GaugeNormSpec;
use royden_core::geometry::{CircularDomain, Decimal, DomainConfig};
use royden_core::laplace::Tolerances;
use royden_core::{Error, Result, C64};

use crate::Command;

/// Domain given by path (relative to the manifest) or inline.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DomainRef {
    Path(PathBuf),
    Inline(DomainConfig),
}

/// A corpus element: one expression, or an inner and an outer factor.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CorpusItem {
    Expr(String),
    Split { inner: String, outer: String },
}

impl CorpusItem {
    pub fn label(&self) -> String {
        match self {
            CorpusItem::Expr(e) => e.clone(),
            CorpusItem::Split { inner, outer } => format!("({inner})*({outer})"),
        }
    }

    pub fn inner(&self) -> Option<&str> {
        match self {
            CorpusItem::Expr(_) => None,
            CorpusItem::Split { inner, .. } => Some(inner),
        }
    }
}

fn one() -> String {
    "1".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffiliatedSpec {
    #[serde(default = "one")]
    pub psi: String,
    #[serde(default = "one")]
    pub eta: String,
    pub u: String,
    #[serde(default = "one")]
    pub v: String,
}

fn default_m() -> usize {
    256
}

fn default_k_solve() -> usize {
    96
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    command: Option<String>,
    name: Option<String>,
    domain: DomainRef,
    #[serde(default = "default_m")]
    m: usize,
    #[serde(default = "default_k_solve")]
    k_solve: usize,
    k: Option<usize>,
    d: Option<usize>,
    degrees: Option<Vec<usize>>,
    #[serde(default)]
    d0: usize,
    #[serde(default)]
    extract: bool,
    #[serde(default)]
    tolerances: serde_json::Map<String, Value>,
    gauge: Option<GaugeNormSpec>,
    #[serde(default)]
    corpus: Vec<CorpusItem>,
    #[serde(default)]
    points: BTreeMap<String, [Decimal; 2]>,
    affiliated: Option<AffiliatedSpec>,
    out: Option<PathBuf>,
}

/// One validated experiment.
#[derive(Debug, Clone)]
pub struct Entry {
    pub name: String,
    pub domain: CircularDomain,
    pub m: usize,
    pub k_solve: usize,
    /// Ambient Galerkin degree.
    pub k: usize,
    pub degrees: Vec<usize>,
    pub d0: usize,
    pub extract: bool,
    pub tolerances: Tolerances,
    pub gauge: Option<GaugeNormSpec>,
    pub corpus: Vec<CorpusItem>,
    pub points: BTreeMap<String, C64>,
    pub affiliated: Option<AffiliatedSpec>,
    pub out: Option<PathBuf>,
}

/// Default tolerances, with `ROYDEN_LAB_TOL` replacing the base tolerance.
pub fn base_tolerances() -> Result<Tolerances> {
    match std::env::var("ROYDEN_LAB_TOL") {
        Ok(v) => {
            let t: f64 =
                v.trim().parse().map_err(|_| Error::Config(format!("ROYDEN_LAB_TOL={v:?} is not a number")))?;
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::Config(format!("ROYDEN_LAB_TOL={t} must lie in (0, 1)")));
            }
            Ok(Tolerances::with_base(t))
        }
        Err(_) => Ok(Tolerances::default()),
    }
}

fn merge_tolerances(base: &Tolerances, over: &serde_json::Map<String, Value>) -> Result<Tolerances> {
    let mut v = serde_json::to_value(base).map_err(|e| Error::Config(e.to_string()))?;
    let map = v.as_object_mut().expect("tolerances serialize to an object");
    for (k, val) in over {
        if !map.contains_key(k) {
            return Err(Error::Config(format!("unknown tolerance '{k}'")));
        }
        map.insert(k.clone(), val.clone());
    }
    Ok(serde_json::from_value(v)?)
}

fn load_domain(d: &DomainRef, dir: &Path) -> Result<CircularDomain> {
    match d {
        DomainRef::Inline(cfg) => CircularDomain::from_config(cfg),
        DomainRef::Path(p) => {
            let path = dir.join(p);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Config(format!("cannot read domain file {}: {e}", path.display())))?;
            CircularDomain::from_json(&text)
        }
    }
}

fn validate(raw: RawEntry, name: String, cmd: Command, dir: &Path, base: &Tolerances) -> Result<Entry> {
    if let Some(c) = &raw.command {
        if c != cmd.name() {
            return Err(Error::Config(format!("entry '{name}' is a '{c}' manifest, not '{}'", cmd.name())));
        }
    }
    let domain = load_domain(&raw.domain, dir)?;
    let k = raw.k.unwrap_or(24);
    let degrees = match (raw.degrees, raw.d) {
        (Some(ds), _) => ds,
        (None, Some(d)) => (1..=3).map(|i| i * d / 3).filter(|x| *x > 0).collect::<BTreeSet<_>>().into_iter().collect(),
        (None, None) => vec![4, 8, 12],
    };
    if cmd == Command::Beurling {
        if degrees.is_empty() {
            return Err(Error::Config("degree list is empty".into()));
        }
        if let Some(d) = degrees.iter().find(|d| 2 * **d > k) {
            return Err(Error::Config(format!("multiplier degree {d} exceeds k/2 = {}", k / 2)));
        }
    }
    let needs_corpus = matches!(cmd, Command::Factor | Command::Beurling | Command::Gauge);
    if needs_corpus && raw.corpus.is_empty() {
        return Err(Error::Config(format!("'{}' needs a non-empty corpus", cmd.name())));
    }
    if cmd == Command::Gauge && raw.gauge.is_none() {
        return Err(Error::Config("'gauge' needs a gauge spec".into()));
    }
    if cmd == Command::Affiliated && raw.affiliated.is_none() {
        return Err(Error::Config("'affiliated' needs psi, eta, u and v".into()));
    }
    if let Some(g) = &raw.gauge {
        g.validate()?;
    }
    Ok(Entry {
        name,
        domain,
        m: raw.m,
        k_solve: raw.k_solve,
        k,
        degrees,
        d0: raw.d0,
        extract: raw.extract,
        tolerances: merge_tolerances(base, &raw.tolerances)?,
        gauge: raw.gauge,
        corpus: raw.corpus,
        points: raw.points.into_iter().map(|(k, [x, y])| (k, C64::new(x.0, y.0))).collect(),
        affiliated: raw.affiliated,
        out: raw.out.map(|p| dir.join(p)),
    })
}

/// Reads a manifest holding one entry object or a list of them.
pub fn load(path: &Path, cmd: Command) -> Result<Vec<Entry>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read manifest {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run").to_string();
    let base = base_tolerances()?;
    let items = match value {
        Value::Array(items) => items,
        v @ Value::Object(_) => vec![v],
        _ => return Err(Error::Config("manifest must be an object or a list of objects".into())),
    };
    let many = items.len() > 1;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(items.len());
    for (i, item) in items.into_iter().enumerate() {
        let raw: RawEntry =
            serde_json::from_value(item).map_err(|e| Error::Config(format!("manifest entry {i}: {e}")))?;
        let name = raw.name.clone().unwrap_or_else(|| if many { format!("{stem}-{i}") } else { stem.clone() });
        if !seen.insert(name.clone()) {
            return Err(Error::Config(format!("duplicate entry name '{name}'")));
        }
        out.push(validate(raw, name, cmd, dir, &base)?);
    }
    if out.is_empty() {
        return Err(Error::Config("manifest has no entries".into()));
    }
    Ok(out)
}
