//! Feature-based measures: how well individual features (or the features
//! taken together along axis-parallel cuts) separate the classes.

use nalgebra::{DMatrix, DVector};

use crate::dataset::{binary_encoding, ovo_apply, Dataset, DatasetView, NumericMatrix, OvoResult};
use crate::error::{Error, Result};
use crate::linalg::pinv_apply;

/// Eigenvalues of the within-class scatter below this fraction of the
/// largest one are dropped from the pseudo-inverse.
pub const PINV_RELATIVE_CUTOFF: f64 = 1e-10;

/// Within-class sum of squares below this fraction of the total is treated
/// as zero in the discriminant ratio.
const DEGENERATE_SCATTER: f64 = 1e-12;

/// Per-class extrema of one feature over a two-class subset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapInterval {
    pub feature: usize,
    pub maxmin: f64,
    pub minmax: f64,
    pub maxmax: f64,
    pub minmin: f64,
}

impl OverlapInterval {
    /// Strictly inside the overlap region.
    pub fn contains(&self, value: f64) -> bool {
        value > self.maxmin && value < self.minmax
    }

    /// Normalized overlap length, with zero-range features counting as fully
    /// overlapping.
    pub fn overlap_ratio(&self) -> f64 {
        let range = self.maxmax - self.minmin;
        if range <= 0.0 {
            return 1.0;
        }
        (self.minmax - self.maxmin).max(0.0) / range
    }
}

/// Overlap interval of `feature` restricted to `rows`; `None` when either
/// class has no row in the subset.
pub fn overlap_interval(
    x: &NumericMatrix,
    second: &[bool],
    rows: &[usize],
    feature: usize,
) -> Option<OverlapInterval> {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for &r in rows {
        let c = usize::from(second[r]);
        let v = x.get(r, feature);
        lo[c] = lo[c].min(v);
        hi[c] = hi[c].max(v);
    }
    if lo.iter().any(|v| v.is_infinite()) {
        return None;
    }
    Some(OverlapInterval {
        feature,
        maxmin: lo[0].max(lo[1]),
        minmax: hi[0].min(hi[1]),
        maxmax: hi[0].max(hi[1]),
        minmin: lo[0].min(lo[1]),
    })
}

/// Discriminant ratio of one feature: between-class over within-class sum
/// of squares. A positive numerator over a vanishing denominator is `+inf`;
/// a constant feature scores 0.
pub fn discriminant_ratio(values: &[f64], labels: &[usize], n_classes: usize) -> f64 {
    let n = values.len() as f64;
    let mut sums = vec![0.0; n_classes];
    let mut counts = vec![0usize; n_classes];
    for (&v, &l) in values.iter().zip(labels) {
        sums[l] += v;
        counts[l] += 1;
    }
    let overall = values.iter().sum::<f64>() / n;
    let means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    let between: f64 = means
        .iter()
        .zip(&counts)
        .map(|(&mu, &c)| c as f64 * (mu - overall).powi(2))
        .sum();
    let within: f64 = values
        .iter()
        .zip(labels)
        .map(|(&v, &l)| (v - means[l]).powi(2))
        .sum();
    let total = between + within;
    if total <= 0.0 {
        0.0
    } else if within <= DEGENERATE_SCATTER * total {
        f64::INFINITY
    } else {
        between / within
    }
}

/// Maximum Fisher's discriminant ratio, inverted into `[0, 1]`.
pub fn f1(d: &Dataset) -> Result<f64> {
    f1_encoded(&d.to_numeric(), d.labels(), d.n_classes())
}

pub fn f1_encoded(x: &NumericMatrix, labels: &[usize], n_classes: usize) -> Result<f64> {
    if n_classes < 2 {
        return Err(Error::TooFewClasses {
            required: 2,
            found: n_classes,
        });
    }
    let best = (0..x.n_cols())
        .map(|j| {
            let column: Vec<f64> = x.column(j).collect();
            discriminant_ratio(&column, labels, n_classes)
        })
        .fold(0.0, f64::max);
    Ok(if best.is_infinite() {
        0.0
    } else {
        1.0 / (1.0 + best)
    })
}

/// Scatter matrices and projection direction of a two-class problem.
#[derive(Debug, Clone)]
pub struct ScatterPair {
    pub between: DMatrix<f64>,
    pub within: DMatrix<f64>,
    pub direction: DVector<f64>,
}

impl ScatterPair {
    /// Directional Fisher criterion `d'Bd / d'Wd`; zero for a null direction.
    pub fn fisher_criterion(&self) -> f64 {
        let d = &self.direction;
        let num = d.dot(&(&self.between * d));
        let den = d.dot(&(&self.within * d));
        if d.norm() == 0.0 || den <= 0.0 {
            0.0
        } else {
            num / den
        }
    }
}

/// Builds the proportion-weighted within-class scatter (population
/// covariances), the between-class scatter and `W^+ (mu_1 - mu_2)`.
pub fn scatter_pair(x: &NumericMatrix, second: &[bool]) -> Result<ScatterPair> {
    let m = x.n_cols();
    let n = x.n_rows();
    let mut counts = [0usize; 2];
    let mut means = [DVector::zeros(m), DVector::zeros(m)];
    for (i, &s) in second.iter().enumerate() {
        let c = usize::from(s);
        counts[c] += 1;
        means[c] += DVector::from_column_slice(x.row(i));
    }
    for c in 0..2 {
        if counts[c] < 2 {
            return Err(Error::ClassTooSmall {
                class: if c == 0 {
                    "first".into()
                } else {
                    "second".into()
                },
                size: counts[c],
                required: 2,
            });
        }
        means[c] /= counts[c] as f64;
    }
    let mut within = DMatrix::zeros(m, m);
    for (i, &s) in second.iter().enumerate() {
        let c = usize::from(s);
        let centered = DVector::from_column_slice(x.row(i)) - &means[c];
        // p_c * Sigma_c = (n_c / n) * (1 / n_c) * sum = sum / n
        within.ger(1.0 / n as f64, &centered, &centered, 1.0);
    }
    let delta = &means[0] - &means[1];
    let between = &delta * delta.transpose();
    let direction = pinv_apply(within.clone(), &delta, PINV_RELATIVE_CUTOFF);
    Ok(ScatterPair {
        between,
        within,
        direction,
    })
}

/// Directional-vector Fisher ratio for one class pair.
pub fn f1v_pair(view: &DatasetView<'_>) -> Result<f64> {
    let (x, second) = binary_encoding(view)?;
    let labels = view.labels();
    for want in [false, true] {
        let members: Vec<usize> = labels
            .iter()
            .zip(&second)
            .filter(|(_, &s)| s == want)
            .map(|(&l, _)| l)
            .collect();
        if members.len() < 2 {
            return Err(Error::ClassTooSmall {
                class: view.base().class_names()[members[0]].clone(),
                size: members.len(),
                required: 2,
            });
        }
    }
    Ok(1.0 / (1.0 + scatter_pair(&x, &second)?.fisher_criterion()))
}

pub fn f1v(d: &Dataset) -> Result<OvoResult> {
    ovo_apply(d, f1v_pair)
}

/// Volume of the overlapping region for one class pair.
pub fn f2_pair(view: &DatasetView<'_>) -> Result<f64> {
    let (x, second) = binary_encoding(view)?;
    let rows: Vec<usize> = (0..x.n_rows()).collect();
    Ok((0..x.n_cols())
        .filter_map(|j| overlap_interval(&x, &second, &rows, j))
        .map(|iv| iv.overlap_ratio())
        .product())
}

pub fn f2(d: &Dataset) -> Result<OvoResult> {
    ovo_apply(d, f2_pair)
}

/// Number of `rows` strictly inside the overlap region of `feature`.
fn overlap_count(x: &NumericMatrix, second: &[bool], rows: &[usize], feature: usize) -> usize {
    match overlap_interval(x, second, rows, feature) {
        Some(iv) => rows
            .iter()
            .filter(|&&r| iv.contains(x.get(r, feature)))
            .count(),
        None => 0,
    }
}

/// Maximum individual feature efficiency (complemented) for one class pair.
pub fn f3_pair(view: &DatasetView<'_>) -> Result<f64> {
    let (x, second) = binary_encoding(view)?;
    let rows: Vec<usize> = (0..x.n_rows()).collect();
    let best = (0..x.n_cols())
        .map(|j| overlap_count(&x, &second, &rows, j))
        .min()
        .unwrap_or(0);
    Ok(best as f64 / x.n_rows() as f64)
}

pub fn f3(d: &Dataset) -> Result<OvoResult> {
    ovo_apply(d, f3_pair)
}

/// Collective feature efficiency for one class pair.
///
/// Each round picks the unused feature with the fewest examples strictly
/// inside its overlap region (lowest index on ties) and keeps only those
/// examples; rounds stop when features or examples run out.
pub fn f4_pair(view: &DatasetView<'_>) -> Result<f64> {
    let (x, second) = binary_encoding(view)?;
    let n = x.n_rows();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut unused: Vec<usize> = (0..x.n_cols()).collect();
    while !unused.is_empty() && !remaining.is_empty() {
        let (pos, _) = unused
            .iter()
            .enumerate()
            .map(|(pos, &j)| (pos, overlap_count(&x, &second, &remaining, j)))
            .min_by_key(|&(_, count)| count)
            .expect("unused is non-empty");
        let feature = unused.remove(pos);
        remaining = match overlap_interval(&x, &second, &remaining, feature) {
            Some(iv) => remaining
                .into_iter()
                .filter(|&r| iv.contains(x.get(r, feature)))
                .collect(),
            None => Vec::new(),
        };
    }
    Ok(remaining.len() as f64 / n as f64)
}

pub fn f4(d: &Dataset) -> Result<OvoResult> {
    ovo_apply(d, f4_pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::FeatureColumn;

    fn one_feature(a: &[f64], b: &[f64]) -> Dataset {
        let mut values = a.to_vec();
        values.extend_from_slice(b);
        let labels: Vec<&str> = a.iter().map(|_| "A").chain(b.iter().map(|_| "B")).collect();
        Dataset::new(
            vec![FeatureColumn::numeric("f", values).unwrap()],
            "y",
            &labels,
        )
        .unwrap()
    }

    #[test]
    fn f1_hand_value() {
        let d = one_feature(&[0.0, 1.0], &[2.0, 3.0]);
        assert!((f1(&d).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn f1_equal_means_is_one() {
        let d = one_feature(&[0.0, 2.0], &[1.0, 1.0]);
        assert_eq!(f1(&d).unwrap(), 1.0);
    }

    #[test]
    fn f1_zero_within_scatter_is_zero() {
        let d = one_feature(&[1.0, 1.0], &[3.0, 3.0]);
        assert_eq!(f1(&d).unwrap(), 0.0);
    }

    #[test]
    fn f1_single_class_errors() {
        let d = Dataset::new(
            vec![FeatureColumn::numeric("f", vec![1.0, 2.0]).unwrap()],
            "y",
            &["A", "A"],
        )
        .unwrap();
        assert!(matches!(f1(&d), Err(Error::TooFewClasses { .. })));
    }

    #[test]
    fn f1v_hand_value() {
        let d = one_feature(&[0.0, 1.0], &[4.0, 5.0]);
        let v = f1v(&d).unwrap().value;
        assert!((v - 1.0 / 65.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn f1v_identical_centroids() {
        let d = one_feature(&[0.0, 2.0], &[1.0, 1.0]);
        assert!((f1v(&d).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn f1v_rejects_singleton_class() {
        let d = one_feature(&[0.0, 2.0], &[1.0]);
        match f1v(&d) {
            Err(Error::ClassTooSmall { class, size, .. }) => {
                assert_eq!(class, "B");
                assert_eq!(size, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn f2_interval_values() {
        let d = one_feature(&[0.0, 4.0], &[2.0, 6.0]);
        assert!((f2(&d).unwrap().value - 1.0 / 3.0).abs() < 1e-12);
        let disjoint = one_feature(&[0.0, 1.0], &[2.0, 3.0]);
        assert_eq!(f2(&disjoint).unwrap().value, 0.0);
    }

    #[test]
    fn f2_product_over_features() {
        let d = Dataset::new(
            vec![
                FeatureColumn::numeric("f", vec![0.0, 4.0, 2.0, 6.0]).unwrap(),
                FeatureColumn::numeric("g", vec![0.0, 4.0, 2.0, 6.0]).unwrap(),
            ],
            "y",
            &["A", "A", "B", "B"],
        )
        .unwrap();
        assert!((f2(&d).unwrap().value - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn f2_constant_feature_is_neutral() {
        let d = Dataset::new(
            vec![
                FeatureColumn::numeric("f", vec![0.0, 4.0, 2.0, 6.0]).unwrap(),
                FeatureColumn::numeric("c", vec![1.0; 4]).unwrap(),
            ],
            "y",
            &["A", "A", "B", "B"],
        )
        .unwrap();
        assert!((f2(&d).unwrap().value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn f3_and_f4_hand_values() {
        let d = one_feature(&[1.0, 3.0, 5.0, 7.0], &[4.0, 6.0, 8.0, 10.0]);
        assert!((f3(&d).unwrap().value - 0.25).abs() < 1e-12);
        assert!((f4(&d).unwrap().value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn separating_feature_zeroes_f3_and_f4() {
        let d = Dataset::new(
            vec![
                FeatureColumn::numeric("noise", vec![0.0, 5.0, 1.0, 4.0]).unwrap(),
                FeatureColumn::numeric("sep", vec![0.0, 1.0, 2.0, 3.0]).unwrap(),
            ],
            "y",
            &["A", "A", "B", "B"],
        )
        .unwrap();
        assert_eq!(f3(&d).unwrap().value, 0.0);
        assert_eq!(f4(&d).unwrap().value, 0.0);
    }

    #[test]
    fn f4_second_round_discriminates_more() {
        // f and g each leave two examples in overlap; after f's round the
        // survivors (rows 1 and 4) are separated by g.
        let d = Dataset::new(
            vec![
                FeatureColumn::numeric("f", vec![0.0, 2.0, 3.0, 1.5, 2.5, 5.0]).unwrap(),
                FeatureColumn::numeric("g", vec![0.5, 0.0, 0.6, 0.4, 1.0, 0.55]).unwrap(),
            ],
            "y",
            &["A", "A", "A", "B", "B", "B"],
        )
        .unwrap();
        let f3v = f3(&d).unwrap().value;
        let f4v = f4(&d).unwrap().value;
        assert!(f4v <= f3v);
        assert!(f4v < f3v, "{f4v} {f3v}");
    }

    #[test]
    fn ovo_mean_of_identical_pairs() {
        // Three classes, each pair with the same one-dimensional geometry up to shift.
        let d = Dataset::new(
            vec![FeatureColumn::numeric("f", vec![0.0, 1.0, 4.0, 5.0, 8.0, 9.0]).unwrap()],
            "y",
            &["A", "A", "B", "B", "C", "C"],
        )
        .unwrap();
        let r = f1v(&d).unwrap();
        assert_eq!(r.per_pair.len(), 3);
        // A-B and B-C match; A-C is further apart.
        assert!((r.per_pair[0].value - r.per_pair[2].value).abs() < 1e-12);
    }
}
