//! Batch verification and the append-only JSON-lines report store.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use chrono::{DateTime, SecondsFormat, Utc};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bijection::{DivBijection, Matched, OrderMultiset};
use crate::catalog::CatalogEntry;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, DEFAULT_LATTICE_CAP};
use crate::symmetric::{compare_with_cyclic, rational_string, WeightFunction};

use super::{check_am, check_bij, check_min, MinFragment};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Bij,
    Min,
    /// `G in AM` implies `G in Min`.
    Am,
    /// `e_k(G) < e_k(C_n)` for the identity weight.
    Psi,
}

impl Property {
    pub const ALL: [Property; 4] = [Property::Bij, Property::Min, Property::Am, Property::Psi];
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Bij => "bij",
            Property::Min => "min",
            Property::Am => "am",
            Property::Psi => "psi",
        })
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "bij" => Ok(Property::Bij),
            "min" => Ok(Property::Min),
            "am" => Ok(Property::Am),
            "psi" => Ok(Property::Psi),
            other => Err(format!("unknown property {other:?} (expected bij, min, am or psi)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Verified,
    Refuted,
    SkippedCap,
}

/// One line of the report store; field order is the on-disk order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub ts: String,
    pub group: String,
    pub order: usize,
    pub property: String,
    pub outcome: Outcome,
    pub witness: Option<Value>,
    pub ms: u64,
}

/// A catalog slot: a built group or an entry skipped for exceeding the cap.
#[derive(Clone, Debug)]
pub enum BatchItem {
    Group(FiniteGroup),
    Skipped { name: String, order: usize },
}

impl BatchItem {
    pub fn name(&self) -> &str {
        match self {
            BatchItem::Group(g) => g.name(),
            BatchItem::Skipped { name, .. } => name,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            BatchItem::Group(g) => g.order(),
            BatchItem::Skipped { order, .. } => *order,
        }
    }
}

/// Builds catalog entries, turning cap overflows into skipped slots.
pub fn catalog_items(entries: &[CatalogEntry], cap: usize) -> Result<Vec<BatchItem>> {
    entries
        .iter()
        .map(|entry| match entry.build(cap) {
            Ok(g) => Ok(BatchItem::Group(g)),
            Err(Error::CapExceeded { .. }) => Ok(BatchItem::Skipped {
                name: entry.name.clone(),
                order: entry.order,
            }),
            Err(e) => Err(e),
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct BatchOptions {
    pub lattice_cap: usize,
    pub seed: Option<u64>,
    pub jobs: usize,
    /// Largest `k` compared by the `psi` property.
    pub psi_k: usize,
    /// Fixed timestamp; when set, runtimes are reported as zero.
    pub fixed_timestamp: Option<String>,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            lattice_cap: DEFAULT_LATTICE_CAP,
            seed: None,
            jobs: 1,
            psi_k: 6,
            fixed_timestamp: None,
        }
    }
}

impl BatchOptions {
    /// Reads `SOURCE_DATE_EPOCH` (seconds) into a fixed timestamp.
    pub fn with_env_timestamp(mut self) -> Result<Self> {
        if let Ok(raw) = std::env::var("SOURCE_DATE_EPOCH") {
            let secs: i64 = raw.trim().parse().map_err(|_| {
                Error::HypothesisViolated(format!("SOURCE_DATE_EPOCH is not an integer: {raw:?}"))
            })?;
            let ts = DateTime::<Utc>::from_timestamp(secs, 0).ok_or_else(|| {
                Error::HypothesisViolated(format!("SOURCE_DATE_EPOCH out of range: {secs}"))
            })?;
            self.fixed_timestamp = Some(ts.to_rfc3339_opts(SecondsFormat::Secs, true));
        }
        Ok(self)
    }
}

/// Append-only JSONL file; appends are serialized through a mutex.
#[derive(Debug)]
pub struct ReportStore {
    path: PathBuf,
    file: Mutex<File>,
}

impl ReportStore {
    pub fn open(path: &Path) -> Result<Self> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|source| Error::Persistence {
                path: path.to_path_buf(),
                source,
            })?;
        Ok(ReportStore {
            path: path.to_path_buf(),
            file: Mutex::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, reports: &[VerificationReport]) -> Result<()> {
        let mut buf = Vec::new();
        for r in reports {
            serde_json::to_writer(&mut buf, r).expect("reports serialize");
            buf.push(b'\n');
        }
        let mut file = self.file.lock().unwrap_or_else(|e| e.into_inner());
        file.write_all(&buf)
            .and_then(|()| file.flush())
            .map_err(|source| Error::Persistence {
                path: self.path.clone(),
                source,
            })
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BatchSummary {
    pub verified: usize,
    pub refuted: usize,
    pub skipped: usize,
    pub wall_ms: u64,
    pub reports: Vec<VerificationReport>,
}

fn class_flow_witness(b: &DivBijection) -> Value {
    let mut flow: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    for c in b.certificate() {
        *flow.entry(c).or_insert(0) += 1;
    }
    let rows: Vec<[u64; 3]> = flow.into_iter().map(|((a, b), f)| [a, b, f]).collect();
    json!({ "class_flow": rows })
}

fn bij_report(group: &FiniteGroup, seed: Option<u64>) -> (Outcome, Value) {
    let fragment = check_bij(group, seed);
    match &fragment.certificate {
        Matched::Found(b) => (Outcome::Verified, class_flow_witness(b)),
        Matched::Blocked(v) => (
            Outcome::Refuted,
            json!({
                "left": OrderMultiset::of_group(group),
                "right": OrderMultiset::of_cyclic(group.order() as u64),
                "violation": v,
            }),
        ),
    }
}

fn min_witness(m: &MinFragment) -> Value {
    json!({
        "normals": m.normals,
        "cosets": m.cosets,
        "matchings": m.cases.len(),
        "existential_reading": m.in_min_existential,
        "counterexample": m.counterexample,
    })
}

fn cap_witness(err: &Error) -> Value {
    json!({ "reason": err.to_string() })
}

fn is_cap(err: &Error) -> bool {
    matches!(err, Error::CapExceeded { .. } | Error::LatticeCapExceeded { .. })
}

fn min_report(group: &FiniteGroup, options: &BatchOptions) -> Result<(Outcome, Value)> {
    match check_min(group, options.lattice_cap) {
        Ok(m) => {
            let outcome = if m.in_min {
                Outcome::Verified
            } else {
                Outcome::Refuted
            };
            Ok((outcome, min_witness(&m)))
        }
        Err(e) if is_cap(&e) => Ok((Outcome::SkippedCap, cap_witness(&e))),
        Err(e) => Err(e),
    }
}

fn am_report(group: &FiniteGroup, options: &BatchOptions) -> Result<(Outcome, Value)> {
    let am = match check_am(group, options.lattice_cap) {
        Ok(am) => am,
        Err(e) if is_cap(&e) => return Ok((Outcome::SkippedCap, cap_witness(&e))),
        Err(e) => return Err(e),
    };
    let mut witness = json!({
        "semisimple": am.is_semisimple,
        "strict": am.strict,
        "loose": am.loose,
    });
    if !am.in_am_strict() && !am.in_am_loose() {
        return Ok((Outcome::Verified, witness));
    }
    match check_min(group, options.lattice_cap) {
        Ok(m) => {
            witness["min"] = min_witness(&m);
            let outcome = if m.in_min {
                Outcome::Verified
            } else {
                Outcome::Refuted
            };
            Ok((outcome, witness))
        }
        Err(e) if is_cap(&e) => Ok((Outcome::SkippedCap, cap_witness(&e))),
        Err(e) => Err(e),
    }
}

fn psi_report(group: &FiniteGroup, options: &BatchOptions) -> Result<(Outcome, Value)> {
    if group.is_cyclic() {
        return Ok((Outcome::Verified, json!({ "cyclic": true })));
    }
    let f = WeightFunction::identity(group.order() as u64);
    let rows = compare_with_cyclic(group, &f, options.psi_k)?;
    let values: Vec<Value> = rows
        .iter()
        .map(|c| {
            json!({
                "k": c.k,
                "group": rational_string(&c.group_value),
                "cyclic": rational_string(&c.cyclic_value),
                "holds": c.holds,
            })
        })
        .collect();
    let outcome = if rows.iter().all(|c| c.holds) {
        Outcome::Verified
    } else {
        Outcome::Refuted
    };
    Ok((outcome, json!({ "weight": "identity", "comparisons": values })))
}

fn now(options: &BatchOptions) -> String {
    options
        .fixed_timestamp
        .clone()
        .unwrap_or_else(|| Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true))
}

/// Reports for one catalog slot, one per property in the given order.
pub fn verify_group(
    item: &BatchItem,
    properties: &[Property],
    options: &BatchOptions,
) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::with_capacity(properties.len());
    for &property in properties {
        let start = Instant::now();
        let (outcome, witness) = match item {
            BatchItem::Skipped { .. } => (
                Outcome::SkippedCap,
                json!({ "reason": "group exceeds the element cap" }),
            ),
            BatchItem::Group(group) => match property {
                Property::Bij => bij_report(group, options.seed),
                Property::Min => min_report(group, options)?,
                Property::Am => am_report(group, options)?,
                Property::Psi => psi_report(group, options)?,
            },
        };
        let ms = if options.fixed_timestamp.is_some() {
            0
        } else {
            start.elapsed().as_millis() as u64
        };
        out.push(VerificationReport {
            ts: now(options),
            group: item.name().to_string(),
            order: item.order(),
            property: property.to_string(),
            outcome,
            witness: Some(witness),
            ms,
        });
    }
    Ok(out)
}

/// Runs `properties` over `items` ordered by `(order, name)`, across
/// `options.jobs` threads, then appends every report to `store` in that
/// order.
pub fn batch_verify(
    items: &[BatchItem],
    properties: &[Property],
    options: &BatchOptions,
    store: Option<&ReportStore>,
) -> Result<BatchSummary> {
    let start = Instant::now();
    let mut ordered: Vec<&BatchItem> = items.iter().collect();
    ordered.sort_by(|a, b| (a.order(), a.name()).cmp(&(b.order(), b.name())));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs.max(1))
        .build()
        .expect("thread pool");
    let per_item: Vec<Result<Vec<VerificationReport>>> = pool.install(|| {
        ordered
            .par_iter()
            .map(|item| verify_group(item, properties, options))
            .collect()
    });
    let mut reports = Vec::new();
    for r in per_item {
        reports.extend(r?);
    }
    if let Some(store) = store {
        store.append(&reports)?;
    }
    let count = |o: Outcome| reports.iter().filter(|r| r.outcome == o).count();
    Ok(BatchSummary {
        verified: count(Outcome::Verified),
        refuted: count(Outcome::Refuted),
        skipped: count(Outcome::SkippedCap),
        wall_ms: if options.fixed_timestamp.is_some() {
            0
        } else {
            start.elapsed().as_millis() as u64
        },
        reports,
    })
}
