//! Measure catalog, orchestration of a full run, and report serialization.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::balance;
use crate::dataset::{Dataset, NumericMatrix, OvoResult, PairValue};
use crate::dimensionality::{self, PcaSummary};
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::feature;
use crate::linearity::{self, LinearFit};
use crate::neighborhood;
use crate::network::{self, EpsilonGraph};

/// Slack allowed when checking a value against its documented range.
const BOUND_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeasureGroup {
    Feature,
    Linearity,
    Neighborhood,
    Network,
    Dimensionality,
    Balance,
}

impl MeasureGroup {
    pub const ALL: [MeasureGroup; 6] = [
        MeasureGroup::Feature,
        MeasureGroup::Linearity,
        MeasureGroup::Neighborhood,
        MeasureGroup::Network,
        MeasureGroup::Dimensionality,
        MeasureGroup::Balance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureGroup::Feature => "feature",
            MeasureGroup::Linearity => "linearity",
            MeasureGroup::Neighborhood => "neighborhood",
            MeasureGroup::Network => "network",
            MeasureGroup::Dimensionality => "dimensionality",
            MeasureGroup::Balance => "balance",
        }
    }

    pub fn members(self) -> impl Iterator<Item = MeasureId> {
        MeasureId::ALL
            .into_iter()
            .filter(move |id| id.group() == self)
    }
}

/// The 22 measures, declared in catalog order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeasureId {
    F1,
    F1v,
    F2,
    F3,
    F4,
    L1,
    L2,
    L3,
    N1,
    N2,
    N3,
    N4,
    T1,
    Lsc,
    Density,
    ClsCoef,
    Hubs,
    T2,
    T3,
    T4,
    C1,
    C2,
}

/// Admissible range of a measure value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub lower_inclusive: bool,
    pub upper: f64,
    pub upper_inclusive: bool,
}

impl Bounds {
    const fn closed(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            lower_inclusive: true,
            upper,
            upper_inclusive: true,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        let above = if self.lower_inclusive {
            v >= self.lower - BOUND_TOLERANCE
        } else {
            v > self.lower
        };
        let below = if self.upper_inclusive {
            v <= self.upper + BOUND_TOLERANCE
        } else {
            v < self.upper
        };
        v.is_finite() && above && below
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lower_inclusive { '[' } else { '(' },
            self.lower,
            self.upper,
            if self.upper_inclusive { ']' } else { ')' }
        )
    }
}

impl MeasureId {
    pub const ALL: [MeasureId; 22] = [
        MeasureId::F1,
        MeasureId::F1v,
        MeasureId::F2,
        MeasureId::F3,
        MeasureId::F4,
        MeasureId::L1,
        MeasureId::L2,
        MeasureId::L3,
        MeasureId::N1,
        MeasureId::N2,
        MeasureId::N3,
        MeasureId::N4,
        MeasureId::T1,
        MeasureId::Lsc,
        MeasureId::Density,
        MeasureId::ClsCoef,
        MeasureId::Hubs,
        MeasureId::T2,
        MeasureId::T3,
        MeasureId::T4,
        MeasureId::C1,
        MeasureId::C2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureId::F1 => "F1",
            MeasureId::F1v => "F1v",
            MeasureId::F2 => "F2",
            MeasureId::F3 => "F3",
            MeasureId::F4 => "F4",
            MeasureId::L1 => "L1",
            MeasureId::L2 => "L2",
            MeasureId::L3 => "L3",
            MeasureId::N1 => "N1",
            MeasureId::N2 => "N2",
            MeasureId::N3 => "N3",
            MeasureId::N4 => "N4",
            MeasureId::T1 => "T1",
            MeasureId::Lsc => "LSC",
            MeasureId::Density => "Density",
            MeasureId::ClsCoef => "ClsCoef",
            MeasureId::Hubs => "Hubs",
            MeasureId::T2 => "T2",
            MeasureId::T3 => "T3",
            MeasureId::T4 => "T4",
            MeasureId::C1 => "C1",
            MeasureId::C2 => "C2",
        }
    }

    pub fn group(self) -> MeasureGroup {
        use MeasureId::*;
        match self {
            F1 | F1v | F2 | F3 | F4 => MeasureGroup::Feature,
            L1 | L2 | L3 => MeasureGroup::Linearity,
            N1 | N2 | N3 | N4 | T1 | Lsc => MeasureGroup::Neighborhood,
            Density | ClsCoef | Hubs => MeasureGroup::Network,
            T2 | T3 | T4 => MeasureGroup::Dimensionality,
            C1 | C2 => MeasureGroup::Balance,
        }
    }

    /// Whether the value is a mean over class pairs.
    pub fn is_pairwise(self) -> bool {
        use MeasureId::*;
        matches!(self, F1v | F2 | F3 | F4 | L1 | L2 | L3)
    }

    /// Documented range for a dataset with `n` examples and `m` features.
    pub fn bounds(self, n: usize, m: usize) -> Bounds {
        use MeasureId::*;
        match self {
            L1 => Bounds {
                upper_inclusive: false,
                ..Bounds::closed(0.0, 1.0)
            },
            Lsc => Bounds::closed(0.0, 1.0 - 1.0 / n as f64),
            T2 | T3 => Bounds {
                lower_inclusive: false,
                ..Bounds::closed(0.0, m as f64)
            },
            _ => Bounds::closed(0.0, 1.0),
        }
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownMeasure(s.trim().to_string()))
    }
}

/// A set of measures, kept in catalog order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection(Vec<MeasureId>);

impl Selection {
    pub fn all() -> Self {
        Self(MeasureId::ALL.to_vec())
    }

    /// Builds a selection from measure ids and group names (`all` selects
    /// everything). Matching ignores case.
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let mut ids = Vec::new();
        for item in items {
            let item = item.as_ref().trim();
            if item.is_empty() {
                continue;
            }
            if item.eq_ignore_ascii_case("all") {
                ids.extend(MeasureId::ALL);
            } else if let Some(g) = MeasureGroup::ALL
                .into_iter()
                .find(|g| g.name().eq_ignore_ascii_case(item))
            {
                ids.extend(g.members());
            } else {
                ids.push(item.parse()?);
            }
        }
        if ids.is_empty() {
            return Err(Error::InvalidParameter("empty measure selection".into()));
        }
        ids.sort_unstable();
        ids.dedup();
        Ok(Self(ids))
    }

    pub fn ids(&self) -> &[MeasureId] {
        &self.0
    }

    pub fn contains(&self, id: MeasureId) -> bool {
        self.0.contains(&id)
    }

    fn any(&self, ids: &[MeasureId]) -> bool {
        ids.iter().any(|&id| self.contains(id))
    }
}

impl FromStr for Selection {
    type Err = Error;

    /// Comma-separated ids and group names.
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(&s.split(',').collect::<Vec<_>>())
    }
}

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SVM_C: f64 = crate::svm::DEFAULT_C;
pub const ORDINAL_ENCODING: &str = "ordinal";

/// Settings that influence measure values, recorded in every report.
#[derive(Debug, Clone, PartialEq)]
pub struct RunParams {
    /// Seed for the interpolation in L3 and N4.
    pub seed: u64,
    /// Neighborhood radius of the graph measures.
    pub epsilon: f64,
    /// Regularization of the linear classifier.
    pub svm_c: f64,
    /// Whether missing cells were imputed at load time.
    pub impute: bool,
    /// How symbolic features were turned into numbers.
    pub encoding: String,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            epsilon: network::DEFAULT_EPSILON,
            svm_c: DEFAULT_SVM_C,
            impute: false,
            encoding: ORDINAL_ENCODING.to_string(),
        }
    }
}

impl RunParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1], got {}",
                self.epsilon
            )));
        }
        if !(self.svm_c > 0.0 && self.svm_c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "regularization C must be positive, got {}",
                self.svm_c
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureStatus {
    Ok,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult {
    /// Present exactly when the status is ok; always finite.
    pub value: Option<f64>,
    /// Class-pair breakdown of pairwise measures, as class names.
    pub per_pair: Option<Vec<(String, String, f64)>>,
    /// Secondary value; for C1 the normalized class entropy.
    pub alternate: Option<f64>,
    /// Time spent in this measure, excluding shared precomputation.
    pub elapsed: Duration,
    pub status: MeasureStatus,
}

impl MeasureResult {
    fn failed(reason: String, elapsed: Duration) -> Self {
        Self {
            value: None,
            per_pair: None,
            alternate: None,
            elapsed,
            status: MeasureStatus::Failed(reason),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == MeasureStatus::Ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityReport {
    pub dataset_id: String,
    pub n: usize,
    pub m: usize,
    pub n_classes: usize,
    pub measures: BTreeMap<MeasureId, MeasureResult>,
    pub run_params: RunParams,
    pub warnings: Vec<String>,
}

/// Intermediate results shared by several measures. Failures are kept as
/// messages so that every dependent measure reports the same reason.
struct Shared {
    encoded: Option<NumericMatrix>,
    distances: Option<DistanceMatrix>,
    graph: Option<std::result::Result<EpsilonGraph, String>>,
    pca: Option<std::result::Result<PcaSummary, String>>,
    fits: Option<std::result::Result<Vec<LinearFit>, String>>,
}

struct Outcome {
    value: f64,
    per_pair: Option<Vec<PairValue>>,
    alternate: Option<f64>,
}

impl From<f64> for Outcome {
    fn from(value: f64) -> Self {
        Self {
            value,
            per_pair: None,
            alternate: None,
        }
    }
}

impl From<OvoResult> for Outcome {
    fn from(r: OvoResult) -> Self {
        Self {
            value: r.value,
            per_pair: Some(r.per_pair),
            alternate: None,
        }
    }
}

fn shared_ref<T>(slot: &Option<std::result::Result<T, String>>) -> std::result::Result<&T, String> {
    match slot {
        Some(Ok(v)) => Ok(v),
        Some(Err(e)) => Err(e.clone()),
        None => Err("intermediate result was not prepared".into()),
    }
}

fn evaluate(
    d: &Dataset,
    id: MeasureId,
    params: &RunParams,
    shared: &Shared,
) -> std::result::Result<Outcome, String> {
    use MeasureId::*;
    let labels = d.labels();
    let text = |e: Error| e.to_string();
    let dist = || {
        shared
            .distances
            .as_ref()
            .ok_or_else(|| "distances unavailable".to_string())
    };
    let encoded = || {
        shared
            .encoded
            .as_ref()
            .ok_or_else(|| "encoding unavailable".to_string())
    };
    Ok(match id {
        F1 => feature::f1_encoded(encoded()?, labels, d.n_classes())
            .map_err(text)?
            .into(),
        F1v => feature::f1v(d).map_err(text)?.into(),
        F2 => feature::f2(d).map_err(text)?.into(),
        F3 => feature::f3(d).map_err(text)?.into(),
        F4 => feature::f4(d).map_err(text)?.into(),
        L1 => linearity::l1_from_fits(shared_ref(&shared.fits)?)
            .map_err(text)?
            .into(),
        L2 => linearity::l2_from_fits(shared_ref(&shared.fits)?)
            .map_err(text)?
            .into(),
        L3 => linearity::l3_from_fits(d, shared_ref(&shared.fits)?, params.seed)
            .map_err(text)?
            .into(),
        N1 => neighborhood::n1_with(dist()?, labels).into(),
        N2 => neighborhood::n2_with(dist()?, labels).map_err(text)?.into(),
        N3 => neighborhood::n3_with(dist()?, labels).into(),
        N4 => neighborhood::n4_with(d, encoded()?, params.seed).into(),
        T1 => neighborhood::t1_with(dist()?, labels).map_err(text)?.into(),
        Lsc => neighborhood::lsc_with(dist()?, labels)
            .map_err(text)?
            .into(),
        Density => network::density(shared_ref(&shared.graph)?)
            .map_err(text)?
            .into(),
        ClsCoef => network::clustering_coefficient(shared_ref(&shared.graph)?).into(),
        Hubs => network::hubs(shared_ref(&shared.graph)?).into(),
        T2 => dimensionality::t2(d).into(),
        T3 => dimensionality::t3_from(d, shared_ref(&shared.pca)?).into(),
        T4 => dimensionality::t4_from(d, shared_ref(&shared.pca)?).into(),
        C1 => Outcome {
            value: balance::c1(d).map_err(text)?,
            per_pair: None,
            alternate: Some(balance::normalized_entropy(d.class_counts()).map_err(text)?),
        },
        C2 => balance::c2(d).map_err(text)?.into(),
    })
}

/// Evaluates the selected measures on `d`. Shared intermediates are built
/// once up front; the measures then run in parallel and a failing measure
/// does not affect the others. Only invalid parameters abort the run.
pub fn compute_all(
    d: &Dataset,
    dataset_id: &str,
    selection: &Selection,
    params: &RunParams,
) -> Result<ComplexityReport> {
    use MeasureId::*;
    params.validate()?;
    let mut warnings = Vec::new();
    if d.is_single_class() {
        warnings.push("dataset has a single class".to_string());
    }

    let needs_encoded = selection.any(&[F1, N4, T3, T4]);
    let needs_distances = selection.any(&[N1, N2, N3, T1, Lsc, Density, ClsCoef, Hubs]);
    let encoded = needs_encoded.then(|| d.to_numeric());
    let distances = needs_distances.then(|| DistanceMatrix::from_view(&d.view()));
    let graph = selection.any(&[Density, ClsCoef, Hubs]).then(|| {
        network::build_graph(
            distances.as_ref().expect("distances prepared"),
            d.labels(),
            params.epsilon,
        )
        .map_err(|e| e.to_string())
    });
    let pca = selection.any(&[T3, T4]).then(|| {
        dimensionality::pca_encoded(encoded.as_ref().expect("encoding prepared"))
            .map_err(|e| e.to_string())
    });
    if pca.is_some() && d.has_symbolic() {
        warnings
            .push("symbolic features enter the principal components as ordinal codes".to_string());
    }
    let fits = selection
        .any(&[L1, L2, L3])
        .then(|| linearity::fit_pairs(d, params.svm_c).map_err(|e| e.to_string()));
    if let Some(Ok(fits)) = &fits {
        for f in fits.iter().filter(|f| !f.model.converged) {
            warnings.push(format!(
                "linear classifier for classes `{}` vs `{}` did not converge",
                d.class_names()[f.classes.0],
                d.class_names()[f.classes.1]
            ));
        }
    }
    let shared = Shared {
        encoded,
        distances,
        graph,
        pca,
        fits,
    };

    let results: Vec<(MeasureId, MeasureResult)> = selection
        .ids()
        .par_iter()
        .map(|&id| {
            let start = Instant::now();
            let outcome = evaluate(d, id, params, &shared);
            let elapsed = start.elapsed();
            let result = match outcome {
                Err(reason) => MeasureResult::failed(reason, elapsed),
                Ok(o) => {
                    let bounds = id.bounds(d.n(), d.m());
                    if bounds.contains(o.value) {
                        MeasureResult {
                            value: Some(o.value),
                            per_pair: o.per_pair.map(|pairs| {
                                pairs
                                    .into_iter()
                                    .map(|p| {
                                        (
                                            d.class_names()[p.classes.0].clone(),
                                            d.class_names()[p.classes.1].clone(),
                                            p.value,
                                        )
                                    })
                                    .collect()
                            }),
                            alternate: o.alternate,
                            elapsed,
                            status: MeasureStatus::Ok,
                        }
                    } else {
                        MeasureResult::failed(
                            format!("value {} outside {}", o.value, bounds),
                            elapsed,
                        )
                    }
                }
            };
            (id, result)
        })
        .collect();

    Ok(ComplexityReport {
        dataset_id: dataset_id.to_string(),
        n: d.n(),
        m: d.m(),
        n_classes: d.n_classes(),
        measures: results.into_iter().collect(),
        run_params: params.clone(),
        warnings,
    })
}

/// Column names of the delimited-row form for the given measures.
pub fn csv_header(ids: &[MeasureId]) -> Vec<String> {
    let mut header: Vec<String> = ["dataset", "n", "m", "n_classes"]
        .map(String::from)
        .to_vec();
    header.extend(ids.iter().map(|id| id.name().to_string()));
    header.push("warnings".into());
    header
}

/// Renders records as delimited text, one line per record.
pub fn csv_lines(records: &[Vec<String>]) -> String {
    let mut out = csv::Writer::from_writer(Vec::new());
    for r in records {
        out.write_record(r).expect("writing to memory");
    }
    String::from_utf8(out.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

impl ComplexityReport {
    pub fn failed_count(&self) -> usize {
        self.measures.values().filter(|r| !r.is_ok()).count()
    }

    pub fn value(&self, id: MeasureId) -> Option<f64> {
        self.measures.get(&id).and_then(|r| r.value)
    }

    pub fn ids(&self) -> Vec<MeasureId> {
        self.measures.keys().copied().collect()
    }

    /// Object with fixed key order. Elapsed times are left out unless
    /// `include_timings` is set, so identical runs serialize identically.
    pub fn to_json_value(&self, include_timings: bool) -> Value {
        let mut measures = Map::new();
        for (id, r) in &self.measures {
            let mut entry = Map::new();
            match &r.status {
                MeasureStatus::Ok => {
                    entry.insert("status".into(), json!("ok"));
                    entry.insert("value".into(), json!(r.value));
                }
                MeasureStatus::Failed(reason) => {
                    entry.insert("status".into(), json!({ "failed": reason }));
                }
            }
            if let Some(alt) = r.alternate {
                entry.insert("alternate".into(), json!(alt));
            }
            if let Some(pairs) = &r.per_pair {
                let list: Vec<Value> = pairs
                    .iter()
                    .map(|(a, b, v)| json!({ "classes": [a, b], "value": v }))
                    .collect();
                entry.insert("per_pair".into(), Value::Array(list));
            }
            if include_timings {
                entry.insert("elapsed_ms".into(), json!(r.elapsed.as_secs_f64() * 1e3));
            }
            measures.insert(id.name().into(), Value::Object(entry));
        }
        json!({
            "dataset": self.dataset_id,
            "n": self.n,
            "m": self.m,
            "n_classes": self.n_classes,
            "run_params": {
                "seed": self.run_params.seed,
                "epsilon": self.run_params.epsilon,
                "svm_c": self.run_params.svm_c,
                "impute": self.run_params.impute,
                "encoding": self.run_params.encoding,
            },
            "measures": measures,
            "warnings": self.warnings,
        })
    }

    pub fn to_json(&self, include_timings: bool) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value(include_timings))
            .expect("report values serialize");
        s.push('\n');
        s
    }

    /// One delimited row for `ids`; measures that failed or were not
    /// computed leave an empty cell.
    pub fn csv_record(&self, ids: &[MeasureId]) -> Vec<String> {
        let mut record = vec![
            self.dataset_id.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.n_classes.to_string(),
        ];
        record.extend(
            ids.iter()
                .map(|id| self.value(*id).map(|v| v.to_string()).unwrap_or_default()),
        );
        let mut notes = self.warnings.clone();
        for (id, r) in &self.measures {
            if let MeasureStatus::Failed(reason) = &r.status {
                notes.push(format!("{id}: {reason}"));
            }
        }
        record.push(notes.join("; "));
        record
    }

    /// Header plus a single row.
    pub fn to_csv(&self) -> String {
        let ids = self.ids();
        csv_lines(&[csv_header(&ids), self.csv_record(&ids)])
    }

    /// Aligned plain-text table, one measure per line.
    pub fn to_table(&self, include_timings: bool) -> String {
        let mut out = format!(
            "dataset {}  n={}  m={}  classes={}\n",
            self.dataset_id, self.n, self.m, self.n_classes
        );
        let mut header = format!("{:<8} {:<15} {:>12}  status", "measure", "group", "value");
        if include_timings {
            header.push_str("  ms");
        }
        out.push_str(&header);
        out.push('\n');
        for (id, r) in &self.measures {
            let value = r
                .value
                .map_or_else(|| "-".to_string(), |v| format!("{v:.6}"));
            let status = match &r.status {
                MeasureStatus::Ok => "ok".to_string(),
                MeasureStatus::Failed(reason) => format!("failed: {reason}"),
            };
            let mut line = format!(
                "{:<8} {:<15} {:>12}  {status}",
                id.name(),
                id.group().name(),
                value
            );
            if include_timings {
                line.push_str(&format!("  {:.1}", r.elapsed.as_secs_f64() * 1e3));
            }
            out.push_str(&line);
            out.push('\n');
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::FeatureColumn;
    use crate::synth;

    #[test]
    fn selection_parsing() {
        let s: Selection = "N3, f1".parse().unwrap();
        assert_eq!(s.ids(), &[MeasureId::F1, MeasureId::N3]);
        let s: Selection = "balance,C1".parse().unwrap();
        assert_eq!(s.ids(), &[MeasureId::C1, MeasureId::C2]);
        assert_eq!(Selection::parse(&["all"]).unwrap(), Selection::all());
        assert!(matches!("N3,Q9".parse::<Selection>(), Err(Error::UnknownMeasure(s)) if s == "Q9"));
        assert!("".parse::<Selection>().is_err());
    }

    #[test]
    fn groups_cover_catalog() {
        let total: usize = MeasureGroup::ALL.iter().map(|g| g.members().count()).sum();
        assert_eq!(total, 22);
    }

    #[test]
    fn full_report_on_two_classes() {
        let d = synth::make_clusters(15, 2, 3.0, 1.0, 5).unwrap();
        let report = compute_all(&d, "blobs", &Selection::all(), &RunParams::default()).unwrap();
        assert_eq!(report.measures.len(), 22);
        for (id, r) in &report.measures {
            assert!(r.is_ok(), "{id}: {:?}", r.status);
        }
    }

    #[test]
    fn balance_on_single_class_fails_cleanly() {
        let d = Dataset::new(
            vec![FeatureColumn::numeric("x", vec![1.0, 2.0, 3.0]).unwrap()],
            "y",
            &["a", "a", "a"],
        )
        .unwrap();
        let report = compute_all(
            &d,
            "one",
            &"balance".parse().unwrap(),
            &RunParams::default(),
        )
        .unwrap();
        assert_eq!(report.measures.len(), 2);
        for r in report.measures.values() {
            assert!(
                matches!(&r.status, MeasureStatus::Failed(reason) if reason.contains("classes"))
            );
        }
    }

    #[test]
    fn repeated_runs_agree() {
        let d = synth::make_clusters(10, 3, 2.0, 1.0, 1).unwrap();
        let sel: Selection = "N3".parse().unwrap();
        let a = compute_all(&d, "x", &sel, &RunParams::default()).unwrap();
        let b = compute_all(&d, "x", &sel, &RunParams::default()).unwrap();
        assert_eq!(a.value(MeasureId::N3), b.value(MeasureId::N3));
        assert_eq!(a.to_json(false), b.to_json(false));
    }

    #[test]
    fn serialized_forms() {
        let d = Dataset::new(
            vec![FeatureColumn::numeric("x", vec![1.0, 2.0, 3.0]).unwrap()],
            "y",
            &["a", "a", "a"],
        )
        .unwrap();
        let report =
            compute_all(&d, "one", &"T2,C2".parse().unwrap(), &RunParams::default()).unwrap();
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "dataset,n,m,n_classes,T2,C2,warnings"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("one,3,1,1,0.3333333333333333,,"));
        let json = report.to_json_value(false);
        assert_eq!(json["measures"]["T2"]["status"], "ok");
        assert!(json["measures"]["C2"]["status"]["failed"].is_string());
        assert!(json["measures"]["T2"].get("elapsed_ms").is_none());
        assert!(report.to_json_value(true)["measures"]["T2"]
            .get("elapsed_ms")
            .is_some());
    }

    #[test]
    fn invalid_params_abort() {
        let d = synth::alternating_line(4).unwrap();
        let params = RunParams {
            epsilon: 0.0,
            ..RunParams::default()
        };
        assert!(compute_all(&d, "x", &Selection::all(), &params).is_err());
    }

    #[test]
    fn bound_checks() {
        assert!(!MeasureId::L1.bounds(10, 2).contains(1.0));
        assert!(MeasureId::Lsc.bounds(10, 2).contains(0.9));
        assert!(!MeasureId::Lsc.bounds(10, 2).contains(0.95));
        assert!(!MeasureId::T2.bounds(10, 2).contains(0.0));
        assert!(MeasureId::T2.bounds(10, 2).contains(2.0));
        assert!(!MeasureId::F1.bounds(10, 2).contains(f64::NAN));
    }
}
