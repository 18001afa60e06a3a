//! Tabular classification data: typed feature columns, class labels, views
//! over subsets of rows, and the scaled numeric encoding consumed by the
//! measures.

use std::collections::HashMap;
use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Cell contents treated as missing during ingestion.
const MISSING_TOKENS: &[&str] = &["", "NA", "na", "NaN", "nan", "?"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Numeric,
    Symbolic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    /// Category codes index into `categories`, which keeps first-appearance order.
    Symbolic {
        codes: Vec<usize>,
        categories: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureColumn {
    name: String,
    data: ColumnData,
}

impl FeatureColumn {
    pub fn numeric(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(name));
        }
        Ok(Self {
            name,
            data: ColumnData::Numeric(values),
        })
    }

    pub fn symbolic<S: AsRef<str>>(name: impl Into<String>, values: &[S]) -> Self {
        let (codes, categories) = encode_first_appearance(values.iter().map(AsRef::as_ref));
        Self {
            name: name.into(),
            data: ColumnData::Symbolic { codes, categories },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> FeatureKind {
        match self.data {
            ColumnData::Numeric(_) => FeatureKind::Numeric,
            ColumnData::Symbolic { .. } => FeatureKind::Symbolic,
        }
    }

    pub fn data(&self) -> &ColumnData {
        &self.data
    }

    pub fn len(&self) -> usize {
        match &self.data {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Symbolic { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(min, max)` of a numeric column; `None` for symbolic or empty columns.
    pub fn observed_range(&self) -> Option<(f64, f64)> {
        match &self.data {
            ColumnData::Numeric(v) if !v.is_empty() => Some(min_max(v.iter().copied())),
            _ => None,
        }
    }

    pub fn categories(&self) -> Option<&[String]> {
        match &self.data {
            ColumnData::Symbolic { categories, .. } => Some(categories),
            ColumnData::Numeric(_) => None,
        }
    }

    /// Numeric value, or the ordinal code of a symbolic cell.
    pub fn ordinal(&self, row: usize) -> f64 {
        match &self.data {
            ColumnData::Numeric(v) => v[row],
            ColumnData::Symbolic { codes, .. } => codes[row] as f64,
        }
    }

    fn cell_text(&self, row: usize) -> String {
        match &self.data {
            ColumnData::Numeric(v) => v[row].to_string(),
            ColumnData::Symbolic { codes, categories } => categories[codes[row]].clone(),
        }
    }
}

fn encode_first_appearance<'a>(values: impl Iterator<Item = &'a str>) -> (Vec<usize>, Vec<String>) {
    let mut index: HashMap<&'a str, usize> = HashMap::new();
    let mut categories = Vec::new();
    let codes = values
        .map(|v| {
            *index.entry(v).or_insert_with(|| {
                categories.push(v.to_string());
                categories.len() - 1
            })
        })
        .collect();
    (codes, categories)
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

/// An immutable labeled table. Class indices follow the first appearance of
/// each class name in the label sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<FeatureColumn>,
    label_name: String,
    labels: Vec<usize>,
    class_names: Vec<String>,
    class_counts: Vec<usize>,
}

impl Dataset {
    pub fn new<S: AsRef<str>>(
        columns: Vec<FeatureColumn>,
        label_name: impl Into<String>,
        labels: &[S],
    ) -> Result<Self> {
        let n = labels.len();
        if n < 2 {
            return Err(Error::InvalidDataset(format!(
                "at least 2 examples required, found {n}"
            )));
        }
        if columns.is_empty() {
            return Err(Error::InvalidDataset("at least 1 feature required".into()));
        }
        if let Some(c) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::InvalidDataset(format!(
                "column `{}` has {} values, expected {n}",
                c.name(),
                c.len()
            )));
        }
        let (labels, class_names) = encode_first_appearance(labels.iter().map(AsRef::as_ref));
        let mut class_counts = vec![0; class_names.len()];
        for &l in &labels {
            class_counts[l] += 1;
        }
        Ok(Self {
            columns,
            label_name: label_name.into(),
            labels,
            class_names,
            class_counts,
        })
    }

    /// Number of examples.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of features.
    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn columns(&self) -> &[FeatureColumn] {
        &self.columns
    }

    pub fn label_name(&self) -> &str {
        &self.label_name
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    pub fn is_single_class(&self) -> bool {
        self.class_names.len() < 2
    }

    pub fn has_symbolic(&self) -> bool {
        self.columns
            .iter()
            .any(|c| c.kind() == FeatureKind::Symbolic)
    }

    pub fn feature_kinds(&self) -> Vec<FeatureKind> {
        self.columns.iter().map(FeatureColumn::kind).collect()
    }

    /// View over every row.
    pub fn view(&self) -> DatasetView<'_> {
        DatasetView {
            base: self,
            rows: (0..self.n()).collect(),
            class_pair: None,
        }
    }

    /// Scaled numeric encoding of the full dataset.
    pub fn to_numeric(&self) -> NumericMatrix {
        self.view().to_numeric()
    }

    /// One view per unordered class pair, in `(i, j)` order with `i < j`.
    pub fn ovo_views(&self) -> Result<Vec<DatasetView<'_>>> {
        let nc = self.n_classes();
        if nc < 2 {
            return Err(Error::TooFewClasses {
                required: 2,
                found: nc,
            });
        }
        let mut views = Vec::with_capacity(nc * (nc - 1) / 2);
        for a in 0..nc {
            for b in a + 1..nc {
                let rows = (0..self.n())
                    .filter(|&r| self.labels[r] == a || self.labels[r] == b)
                    .collect();
                views.push(DatasetView {
                    base: self,
                    rows,
                    class_pair: Some((a, b)),
                });
            }
        }
        Ok(views)
    }

    /// Writes the dataset as header-bearing delimited text, label column last.
    pub fn write_delimited<W: Write>(&self, writer: W, delimiter: u8) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .delimiter(delimiter)
            .from_writer(writer);
        let mut header: Vec<&str> = self.columns.iter().map(FeatureColumn::name).collect();
        header.push(&self.label_name);
        out.write_record(&header)?;
        for row in 0..self.n() {
            let mut record: Vec<String> = self.columns.iter().map(|c| c.cell_text(row)).collect();
            record.push(self.class_names[self.labels[row]].clone());
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// A subset of a dataset's rows, optionally restricted to one class pair.
#[derive(Debug, Clone)]
pub struct DatasetView<'a> {
    base: &'a Dataset,
    rows: Vec<usize>,
    class_pair: Option<(usize, usize)>,
}

impl<'a> DatasetView<'a> {
    pub fn new(base: &'a Dataset, rows: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; base.n()];
        for &r in &rows {
            if r >= base.n() {
                return Err(Error::InvalidDataset(format!("row {r} out of range")));
            }
            if std::mem::replace(&mut seen[r], true) {
                return Err(Error::InvalidDataset(format!("row {r} selected twice")));
            }
        }
        Ok(Self {
            base,
            rows,
            class_pair: None,
        })
    }

    pub fn base(&self) -> &'a Dataset {
        self.base
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn class_pair(&self) -> Option<(usize, usize)> {
        self.class_pair
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Base-dataset class index of each selected row.
    pub fn labels(&self) -> Vec<usize> {
        self.rows.iter().map(|&r| self.base.labels[r]).collect()
    }

    /// For a pair view, `true` marks rows of the second class of the pair.
    pub fn second_class_mask(&self) -> Option<Vec<bool>> {
        let (_, b) = self.class_pair?;
        Some(
            self.rows
                .iter()
                .map(|&r| self.base.labels[r] == b)
                .collect(),
        )
    }

    /// Min-max scaled encoding over the view's rows. Symbolic columns use
    /// their ordinal codes; constant columns map to zeros.
    pub fn to_numeric(&self) -> NumericMatrix {
        let n = self.rows.len();
        let m = self.base.m();
        let mut data = vec![0.0; n * m];
        for (j, col) in self.base.columns.iter().enumerate() {
            let (lo, hi) = min_max(self.rows.iter().map(|&r| col.ordinal(r)));
            let range = hi - lo;
            if range > 0.0 {
                for (i, &r) in self.rows.iter().enumerate() {
                    data[i * m + j] = ((col.ordinal(r) - lo) / range).clamp(0.0, 1.0);
                }
            }
        }
        NumericMatrix {
            rows: n,
            cols: m,
            data,
            kinds: self.base.feature_kinds(),
        }
    }
}

/// Row-major matrix with every entry in `[0, 1]`, plus the kind of the
/// feature each column came from.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    kinds: Vec<FeatureKind>,
}

impl NumericMatrix {
    /// Builds a matrix from already-encoded rows; used for raw solver inputs
    /// and tests. Entries are not rescaled.
    pub fn from_rows(rows: &[Vec<f64>], kinds: Vec<FeatureKind>) -> Result<Self> {
        let cols = kinds.len();
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::InvalidDataset(format!(
                "row has {} entries, expected {cols}",
                r.len()
            )));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
            kinds,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn kinds(&self) -> &[FeatureKind] {
        &self.kinds
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.rows).map(move |i| self.data[i * self.cols + j])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Arithmetic mean of per-subproblem values.
pub fn ovo_aggregate(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyAggregate);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Measure value for one class pair of a one-versus-one decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct PairValue {
    pub classes: (usize, usize),
    pub value: f64,
}

/// Mean over class pairs, with the per-pair breakdown kept.
#[derive(Debug, Clone, PartialEq)]
pub struct OvoResult {
    pub value: f64,
    pub per_pair: Vec<PairValue>,
}

impl OvoResult {
    pub fn from_pairs(per_pair: Vec<PairValue>) -> Result<Self> {
        let values: Vec<f64> = per_pair.iter().map(|p| p.value).collect();
        Ok(Self {
            value: ovo_aggregate(&values)?,
            per_pair,
        })
    }
}

/// Evaluates a binary measure on every class-pair view and averages.
pub fn ovo_apply<F>(d: &Dataset, measure: F) -> Result<OvoResult>
where
    F: Fn(&DatasetView<'_>) -> Result<f64> + Sync,
{
    let views = d.ovo_views()?;
    let per_pair = views
        .par_iter()
        .map(|v| {
            Ok(PairValue {
                classes: v.class_pair().expect("ovo views carry a pair"),
                value: measure(v)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    OvoResult::from_pairs(per_pair)
}

/// Scaled encoding of a two-class view plus a mask marking the second class.
pub(crate) fn binary_encoding(view: &DatasetView<'_>) -> Result<(NumericMatrix, Vec<bool>)> {
    let (first, second) = match view.class_pair() {
        Some(pair) => pair,
        None => {
            let mut present: Vec<usize> = view.labels();
            present.sort_unstable();
            present.dedup();
            if present.len() != 2 {
                return Err(Error::TooFewClasses {
                    required: 2,
                    found: present.len(),
                });
            }
            (present[0], present[1])
        }
    };
    let labels = view.labels();
    for class in [first, second] {
        if !labels.contains(&class) {
            return Err(Error::ClassTooSmall {
                class: view.base().class_names()[class].clone(),
                size: 0,
                required: 1,
            });
        }
    }
    if let Some(&other) = labels.iter().find(|&&l| l != first && l != second) {
        return Err(Error::InvalidParameter(format!(
            "view holds class `{}` outside its pair",
            view.base().class_names()[other]
        )));
    }
    let mask = labels.iter().map(|&l| l == second).collect();
    Ok((view.to_numeric(), mask))
}

/// Which column of the input holds the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    /// Matched against the header; falls back to a zero-based index when no
    /// header cell matches and the text parses as one.
    Name(String),
    Index(usize),
}

impl LabelColumn {
    fn resolve(&self, header: &[String]) -> Result<usize> {
        match self {
            LabelColumn::Index(i) if *i < header.len() => Ok(*i),
            LabelColumn::Index(i) => Err(Error::LabelColumnNotFound(i.to_string())),
            LabelColumn::Name(name) => header
                .iter()
                .position(|h| h == name)
                .or_else(|| name.parse::<usize>().ok().filter(|&i| i < header.len()))
                .ok_or_else(|| Error::LabelColumnNotFound(name.clone())),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    /// Field delimiter; detected from the header line when `None`.
    pub delimiter: Option<u8>,
    /// Replace missing cells with the column median (numeric) or mode (symbolic).
    pub impute: bool,
}

fn detect_delimiter(header_line: &str) -> u8 {
    let tabs = header_line.matches('\t').count();
    let commas = header_line.matches(',').count();
    if tabs > commas {
        b'\t'
    } else {
        b','
    }
}

fn is_missing(cell: &str) -> bool {
    MISSING_TOKENS.contains(&cell)
}

/// Parses header-bearing delimited text into a [`Dataset`].
///
/// A column is numeric iff every non-missing cell parses as a finite real.
/// A label column with a single distinct value is accepted; callers can
/// check [`Dataset::is_single_class`].
pub fn load_dataset<R: Read>(
    mut source: R,
    label: &LabelColumn,
    options: &IngestOptions,
) -> Result<Dataset> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let header_line = text.lines().find(|l| !l.trim().is_empty());
    let Some(header_line) = header_line else {
        return Err(Error::EmptyInput);
    };
    let delimiter = options
        .delimiter
        .unwrap_or_else(|| detect_delimiter(header_line));

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let label_idx = label.resolve(&header)?;

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    for record in reader.records() {
        let record = record?;
        for (j, cell) in record.iter().enumerate() {
            cells[j].push(cell.to_string());
        }
    }
    if cells[label_idx].is_empty() {
        return Err(Error::EmptyInput);
    }

    // earliest gap in reading order; labels are never imputed
    let first_gap = cells
        .iter()
        .enumerate()
        .filter(|&(j, _)| j == label_idx || !options.impute)
        .filter_map(|(j, col)| col.iter().position(|c| is_missing(c)).map(|row| (row, j)))
        .min();
    if let Some((row, j)) = first_gap {
        return Err(Error::MissingValue {
            row: row + 1,
            column: header[j].clone(),
        });
    }

    let labels = std::mem::take(&mut cells[label_idx]);

    let mut columns = Vec::with_capacity(header.len() - 1);
    for (j, raw) in cells.into_iter().enumerate() {
        if j == label_idx {
            continue;
        }
        columns.push(parse_column(&header[j], raw, options.impute)?);
    }
    let dataset = Dataset::new(columns, header[label_idx].clone(), &labels)?;
    if dataset.is_single_class() {
        log::warn!("label column `{}` has a single class", dataset.label_name());
    }
    Ok(dataset)
}

fn parse_column(name: &str, mut raw: Vec<String>, impute: bool) -> Result<FeatureColumn> {
    let missing: Vec<usize> = (0..raw.len()).filter(|&i| is_missing(&raw[i])).collect();
    if let (Some(&row), false) = (missing.first(), impute) {
        return Err(Error::MissingValue {
            row: row + 1,
            column: name.to_string(),
        });
    }
    if missing.len() == raw.len() {
        return Err(Error::NothingToImpute(name.to_string()));
    }

    let parsed: Option<Vec<Option<f64>>> = raw
        .iter()
        .map(|cell| {
            if is_missing(cell) {
                Some(None)
            } else {
                cell.parse::<f64>().ok().filter(|v| v.is_finite()).map(Some)
            }
        })
        .collect();

    match parsed {
        Some(values) => {
            let mut present: Vec<f64> = values.iter().flatten().copied().collect();
            let fill = median(&mut present);
            FeatureColumn::numeric(
                name,
                values.into_iter().map(|v| v.unwrap_or(fill)).collect(),
            )
        }
        None => {
            if !missing.is_empty() {
                let fill = mode(raw.iter().filter(|c| !is_missing(c)).map(String::as_str));
                for &i in &missing {
                    raw[i] = fill.clone();
                }
            }
            Ok(FeatureColumn::symbolic(name, &raw))
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Most frequent value; ties go to the earliest-appearing one.
fn mode<'a>(values: impl Iterator<Item = &'a str>) -> String {
    let (codes, categories) = encode_first_appearance(values);
    let mut counts = vec![0usize; categories.len()];
    for c in codes {
        counts[c] += 1;
    }
    let best = counts
        .iter()
        .enumerate()
        .fold(0, |best, (i, &c)| if c > counts[best] { i } else { best });
    categories[best].clone()
}
