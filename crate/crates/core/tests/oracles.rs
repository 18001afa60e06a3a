//! Measures checked against brute-force re-implementations.

// the oracles index like the formulas they transcribe
#![allow(clippy::needless_range_loop)]

use complexity::balance::{c1_from_counts, c2_from_counts};
use complexity::feature::{f1, f2, f3};
use complexity::linearity::{l1, l2};
use complexity::neighborhood::{lsc, minimum_spanning_tree, n3};
use complexity::network::build_graph;
use complexity::synth::random_mixed;
use complexity::{Dataset, DistanceMatrix, FeatureColumn, FeatureKind, NumericMatrix};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn random_dataset(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize) -> Dataset {
    let nc = rng.random_range(2..=5);
    let n = rng.random_range(nc.max(10)..=max_n);
    let m = rng.random_range(1..=max_m);
    random_mixed(n, m, nc, rng.random()).unwrap()
}

fn gower(x: &NumericMatrix, i: usize, j: usize) -> f64 {
    let mut total = 0.0;
    for (k, kind) in x.kinds().iter().enumerate() {
        let (a, b) = (x.get(i, k), x.get(j, k));
        total += match kind {
            FeatureKind::Numeric => (a - b).abs(),
            FeatureKind::Symbolic => f64::from(u8::from(a != b)),
        };
    }
    total / x.n_cols() as f64
}

fn distances(d: &Dataset) -> Vec<Vec<f64>> {
    let x = d.to_numeric();
    (0..d.n())
        .map(|i| (0..d.n()).map(|j| gower(&x, i, j)).collect())
        .collect()
}

fn loo_1nn_error(dist: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = dist.len();
    let mut errors = 0;
    for i in 0..n {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if j != i && best.is_none_or(|(_, b)| dist[i][j] < b) {
                best = Some((j, dist[i][j]));
            }
        }
        if labels[best.unwrap().0] != labels[i] {
            errors += 1;
        }
    }
    errors as f64 / n as f64
}

#[test]
fn n3_matches_leave_one_out_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let d = random_dataset(&mut rng, 200, 8);
        assert_eq!(n3(&d), loo_1nn_error(&distances(&d), d.labels()));
    }
}

/// Decodes a Pruefer sequence into the edge list of a labeled tree.
fn pruefer_tree(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).unwrap();
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn exhaustive_mst_weight(dist: &[Vec<f64>]) -> f64 {
    let n = dist.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return dist[0][1];
    }
    let mut best = f64::INFINITY;
    let mut seq = vec![0; n - 2];
    loop {
        let w: f64 = pruefer_tree(&seq, n).iter().map(|&(a, b)| dist[a][b]).sum();
        best = best.min(w);
        let mut k = 0;
        while k < seq.len() && seq[k] == n - 1 {
            seq[k] = 0;
            k += 1;
        }
        if k == seq.len() {
            return best;
        }
        seq[k] += 1;
    }
}

#[test]
fn mst_weight_matches_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let n = rng.random_range(2..=8);
        let nc = rng.random_range(1..=n.min(3));
        let d = random_mixed(n, rng.random_range(1..=4), nc, rng.random()).unwrap();
        let mst = minimum_spanning_tree(&DistanceMatrix::from_view(&d.view()));
        assert_eq!(mst.edges.len(), n - 1);
        let expected = exhaustive_mst_weight(&distances(&d));
        assert!(
            (mst.total_weight() - expected).abs() < 1e-12,
            "{} vs {expected}",
            mst.total_weight()
        );
    }
}

#[test]
fn graph_edges_match_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let d = random_dataset(&mut rng, 120, 6);
        let epsilon = rng.random_range(0.05..0.5);
        let dist = distances(&d);
        let mut expected = Vec::new();
        for i in 0..d.n() {
            for j in i + 1..d.n() {
                if d.labels()[i] == d.labels()[j] && dist[i][j] < epsilon {
                    expected.push((i, j));
                }
            }
        }
        let g = build_graph(&DistanceMatrix::from_view(&d.view()), d.labels(), epsilon).unwrap();
        let got: Vec<(usize, usize)> = g.edges().iter().map(|&(i, j, _)| (i, j)).collect();
        assert_eq!(got, expected);
    }
}

fn raw_column(d: &Dataset, j: usize) -> Vec<f64> {
    let col = &d.columns()[j];
    (0..d.n()).map(|r| col.ordinal(r)).collect()
}

fn fisher_ratio(values: &[f64], labels: &[usize], nc: usize) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut between = 0.0;
    let mut within = 0.0;
    for c in 0..nc {
        let members: Vec<f64> = values
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == c)
            .map(|(&v, _)| v)
            .collect();
        let mu = members.iter().sum::<f64>() / members.len() as f64;
        between += members.len() as f64 * (mu - mean).powi(2);
        within += members.iter().map(|v| (v - mu).powi(2)).sum::<f64>();
    }
    match (between > 0.0, within > 0.0) {
        (false, _) => 0.0,
        (true, false) => f64::INFINITY,
        (true, true) => between / within,
    }
}

fn pair_rows(d: &Dataset, a: usize, b: usize) -> Vec<usize> {
    (0..d.n())
        .filter(|&r| d.labels()[r] == a || d.labels()[r] == b)
        .collect()
}

/// Per-feature `(maxmin, minmax, maxmax, minmin)` over two classes.
fn extremes(values: &[f64], labels: &[usize], rows: &[usize], a: usize) -> (f64, f64, f64, f64) {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for &r in rows {
        let c = usize::from(labels[r] != a);
        lo[c] = lo[c].min(values[r]);
        hi[c] = hi[c].max(values[r]);
    }
    (
        lo[0].max(lo[1]),
        hi[0].min(hi[1]),
        hi[0].max(hi[1]),
        lo[0].min(lo[1]),
    )
}

#[test]
fn feature_measures_match_direct_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..40 {
        let d = random_dataset(&mut rng, 150, 6);
        let (m, nc, labels) = (d.m(), d.n_classes(), d.labels());
        let columns: Vec<Vec<f64>> = (0..m).map(|j| raw_column(&d, j)).collect();

        let best = columns
            .iter()
            .map(|c| fisher_ratio(c, labels, nc))
            .fold(0.0, f64::max);
        let expected_f1 = if best.is_infinite() {
            0.0
        } else {
            1.0 / (1.0 + best)
        };
        assert!((f1(&d).unwrap() - expected_f1).abs() < TOL);

        let (mut sum2, mut sum3, mut pairs) = (0.0, 0.0, 0);
        for a in 0..nc {
            for b in a + 1..nc {
                let rows = pair_rows(&d, a, b);
                let mut volume = 1.0;
                let mut fewest = usize::MAX;
                for col in &columns {
                    let (maxmin, minmax, maxmax, minmin) = extremes(col, labels, &rows, a);
                    volume *= if maxmax > minmin {
                        (minmax - maxmin).max(0.0) / (maxmax - minmin)
                    } else {
                        1.0
                    };
                    let inside = rows
                        .iter()
                        .filter(|&&r| col[r] > maxmin && col[r] < minmax)
                        .count();
                    fewest = fewest.min(inside);
                }
                sum2 += volume;
                sum3 += fewest as f64 / rows.len() as f64;
                pairs += 1;
            }
        }
        assert!((f2(&d).unwrap().value - sum2 / pairs as f64).abs() < TOL);
        assert!((f3(&d).unwrap().value - sum3 / pairs as f64).abs() < TOL);
    }
}

#[test]
fn lsc_matches_direct_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..40 {
        let d = random_dataset(&mut rng, 150, 6);
        let dist = distances(&d);
        let n = d.n();
        let mut total = 0;
        for i in 0..n {
            let enemy = (0..n)
                .filter(|&j| d.labels()[j] != d.labels()[i])
                .map(|j| dist[i][j])
                .fold(f64::INFINITY, f64::min);
            total += 1 + (0..n).filter(|&j| j != i && dist[i][j] < enemy).count();
        }
        let expected = 1.0 - total as f64 / (n * n) as f64;
        assert!((lsc(&d).unwrap() - expected).abs() < TOL);
    }
}

#[test]
fn balance_matches_direct_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..200 {
        let nc = rng.random_range(2..=6);
        let counts: Vec<usize> = (0..nc).map(|_| rng.random_range(1..500)).collect();
        let n: usize = counts.iter().sum();
        let entropy: f64 = counts
            .iter()
            .map(|&c| {
                let p = c as f64 / n as f64;
                -p * p.ln()
            })
            .sum();
        let c1 = 1.0 - entropy / (nc as f64).ln();
        let ir = (nc as f64 - 1.0) / nc as f64
            * counts
                .iter()
                .map(|&c| c as f64 / (n - c) as f64)
                .sum::<f64>();
        assert!((c1_from_counts(&counts).unwrap() - c1).abs() < TOL);
        assert!((c2_from_counts(&counts).unwrap() - (1.0 - 1.0 / ir)).abs() < TOL);
    }
}

/// Sum of slacks at the soft-margin optimum, found by enumerating which
/// multipliers sit at 0, at `c`, or strictly between, and keeping the
/// assignment whose equality system yields a KKT point.
fn active_set_slack_sum(x: &NumericMatrix, y: &[f64], c: f64) -> Option<f64> {
    let n = x.n_rows();
    let kernel =
        |i: usize, j: usize| -> f64 { x.row(i).iter().zip(x.row(j)).map(|(a, b)| a * b).sum() };
    let slack = 1e-7;
    let mut found: Option<f64> = None;
    for code in 0..3usize.pow(n as u32) {
        let state: Vec<usize> = (0..n).map(|i| code / 3usize.pow(i as u32) % 3).collect();
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let bound: Vec<usize> = (0..n).filter(|&i| state[i] == 1).collect();
        let mut alpha = vec![0.0; n];
        for &i in &bound {
            alpha[i] = c;
        }
        let bias_range: (f64, f64);
        if free.is_empty() {
            if bound.iter().map(|&i| y[i]).sum::<f64>().abs() > 1e-12 {
                continue;
            }
            bias_range = (f64::NEG_INFINITY, f64::INFINITY);
        } else {
            let k = free.len();
            let mut a = DMatrix::zeros(k + 1, k + 1);
            let mut rhs = DVector::zeros(k + 1);
            for (p, &i) in free.iter().enumerate() {
                for (q, &j) in free.iter().enumerate() {
                    a[(p, q)] = y[i] * y[j] * kernel(i, j);
                }
                a[(p, k)] = y[i];
                a[(k, p)] = y[i];
                rhs[p] = 1.0
                    - bound
                        .iter()
                        .map(|&j| y[i] * y[j] * c * kernel(i, j))
                        .sum::<f64>();
            }
            rhs[k] = -c * bound.iter().map(|&j| y[j]).sum::<f64>();
            let Some(sol) = a.clone().lu().solve(&rhs) else {
                continue;
            };
            if (&a * &sol - &rhs).amax() > 1e-9 {
                continue;
            }
            for (p, &i) in free.iter().enumerate() {
                alpha[i] = sol[p];
            }
            if free
                .iter()
                .any(|&i| alpha[i] < -slack || alpha[i] > c + slack)
            {
                continue;
            }
            bias_range = (sol[k], sol[k]);
        }
        let m = x.n_cols();
        let w: Vec<f64> = (0..m)
            .map(|k| (0..n).map(|i| alpha[i] * y[i] * x.get(i, k)).sum())
            .collect();
        let raw = |i: usize| -> f64 { w.iter().zip(x.row(i)).map(|(a, b)| a * b).sum() };
        // zero multipliers need y f >= 1, bounded ones y f <= 1
        let (mut lo, mut hi) = bias_range;
        for i in 0..n {
            let (need_above, s) = match state[i] {
                0 => (true, raw(i)),
                1 => (false, raw(i)),
                _ => continue,
            };
            // y (s + b) >= 1  or  <= 1
            let edge = y[i] - s;
            if (y[i] > 0.0) == need_above {
                lo = lo.max(edge - slack);
            } else {
                hi = hi.min(edge + slack);
            }
        }
        if lo > hi {
            continue;
        }
        let b = if lo.is_finite() {
            lo
        } else if hi.is_finite() {
            hi
        } else {
            0.0
        };
        let total: f64 = (0..n).map(|i| (1.0 - y[i] * (raw(i) + b)).max(0.0)).sum();
        if let Some(prev) = found {
            assert!(
                (prev - total).abs() < 1e-5,
                "two KKT points disagree: {prev} vs {total}"
            );
        } else {
            found = Some(total);
        }
    }
    found
}

#[test]
fn l1_matches_active_set_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    for _ in 0..150 {
        let n = rng.random_range(3..=6);
        let m = rng.random_range(1..=2);
        let mut labels: Vec<&str> = (0..n)
            .map(|_| if rng.random_bool(0.5) { "a" } else { "b" })
            .collect();
        labels[0] = "a";
        labels[1] = "b";
        let columns = (0..m)
            .map(|k| {
                let values = (0..n).map(|_| rng.random_range(0.0..10.0)).collect();
                FeatureColumn::numeric(format!("x{k}"), values).unwrap()
            })
            .collect();
        let d = Dataset::new(columns, "y", &labels).unwrap();
        let x = d.to_numeric();
        let y: Vec<f64> = d
            .labels()
            .iter()
            .map(|&l| if l == 1 { 1.0 } else { -1.0 })
            .collect();
        for c in [1.0, 100.0] {
            let total = active_set_slack_sum(&x, &y, c).expect("oracle finds a KKT point");
            let s = total / n as f64;
            let expected = s / (1.0 + s);
            let got = l1(&d, c).unwrap().value;
            assert!(
                (got - expected).abs() < 1e-3,
                "L1 {got} vs oracle {expected}"
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 300);
}

/// Fewest errors any threshold on a single feature can make, either side up.
fn best_threshold_error(values: &[f64], positive: &[bool]) -> f64 {
    let mut cuts: Vec<f64> = values.to_vec();
    cuts.sort_by(f64::total_cmp);
    let mut candidates = vec![cuts[0] - 1.0];
    candidates.extend(cuts.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    candidates.push(cuts[cuts.len() - 1] + 1.0);
    let mut best = usize::MAX;
    for t in candidates {
        for up in [false, true] {
            let errors = values
                .iter()
                .zip(positive)
                .filter(|&(&v, &p)| (v > t) == up && !p || (v > t) != up && p)
                .count();
            best = best.min(errors);
        }
    }
    best as f64 / values.len() as f64
}

#[test]
fn l2_respects_threshold_oracle() {
    let values = vec![0.0, 1.0, 10.0, 5.0];
    let labels = ["A", "A", "A", "B"];
    let d = Dataset::new(
        vec![FeatureColumn::numeric("x", values.clone()).unwrap()],
        "y",
        &labels,
    )
    .unwrap();
    let positive: Vec<bool> = d.labels().iter().map(|&l| l == 1).collect();
    let floor = best_threshold_error(&values, &positive);
    assert_eq!(floor, 0.25);
    assert!(l2(&d, 100.0).unwrap().value >= floor);

    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..100 {
        let n = rng.random_range(4..30);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let mut positive: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        positive[0] = false;
        positive[1] = true;
        let labels: Vec<&str> = positive
            .iter()
            .map(|&p| if p { "B" } else { "A" })
            .collect();
        let d = Dataset::new(
            vec![FeatureColumn::numeric("x", values.clone()).unwrap()],
            "y",
            &labels,
        )
        .unwrap();
        let got = l2(&d, 100.0).unwrap().value;
        assert!(got >= best_threshold_error(&values, &positive) - 1e-15);
    }
}
