//! Vargha-Delaney A12 and an effect-size-gated Scott-Knott ranking.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// A12 at or beyond these bounds counts as a non-small difference.
pub const A12_LARGE: f64 = 0.6;
pub const A12_SMALL: f64 = 0.4;

/// Probability that a random draw from `xs` exceeds one from `ys`, with ties
/// counted as half.
pub fn a12(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::Empty("a12 sample"));
    }
    let mut sorted = ys.to_vec();
    sorted.sort_by(f64::total_cmp);
    // Counting via two binary searches per x keeps this O((n + m) log m).
    let twice: u64 = xs
        .iter()
        .map(|&x| {
            let below = sorted.partition_point(|&y| y < x) as u64;
            let not_above = sorted.partition_point(|&y| y <= x) as u64;
            2 * below + (not_above - below)
        })
        .sum();
    Ok(twice as f64 / (2.0 * xs.len() as f64 * ys.len() as f64))
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankedGroup {
    pub label: String,
    pub samples: Vec<f64>,
    pub median: f64,
    /// 1 is best.
    pub rank: usize,
}

/// Groups in best-first median order, each with its rank.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedGroups {
    pub groups: Vec<RankedGroup>,
}

impl RankedGroups {
    pub fn rank_of(&self, label: &str) -> Option<usize> {
        self.groups.iter().find(|g| g.label == label).map(|g| g.rank)
    }

    pub fn rank_count(&self) -> usize {
        self.groups.iter().map(|g| g.rank).max().unwrap_or(0)
    }
}

/// Sorts groups by median (best first, label breaks ties), then recursively
/// splits at the cut maximizing the between-group sum of squares, keeping a
/// split only when the pooled sides differ by a non-small A12.
pub fn scott_knott(groups: Vec<(String, Vec<f64>)>, smaller_is_better: bool) -> Result<RankedGroups> {
    if groups.is_empty() {
        return Err(Error::Empty("scott-knott groups"));
    }
    if let Some((label, _)) = groups.iter().find(|(_, s)| s.is_empty()) {
        return Err(Error::invalid(format!("group {label:?} has no samples")));
    }
    if groups.iter().flat_map(|(_, s)| s).any(|v| !v.is_finite()) {
        return Err(Error::invalid("samples must be finite"));
    }
    let mut groups: Vec<RankedGroup> = groups
        .into_iter()
        .map(|(label, samples)| RankedGroup {
            median: median(&samples),
            label,
            samples,
            rank: 0,
        })
        .collect();
    groups.sort_by(|a, b| {
        let by_median = a.median.total_cmp(&b.median);
        let by_median = if smaller_is_better { by_median } else { by_median.reverse() };
        by_median.then_with(|| a.label.cmp(&b.label))
    });

    let mut segments = Vec::new();
    split(&groups, 0, &mut segments);
    for (rank, (lo, hi)) in segments.into_iter().enumerate() {
        for g in &mut groups[lo..hi] {
            g.rank = rank + 1;
        }
    }
    Ok(RankedGroups { groups })
}

/// Appends the accepted segments of `groups` (offset by `base`) in order.
fn split(groups: &[RankedGroup], base: usize, out: &mut Vec<(usize, usize)>) {
    if let Some(cut) = best_cut(groups) {
        let left: Vec<f64> = groups[..cut].iter().flat_map(|g| g.samples.iter().copied()).collect();
        let right: Vec<f64> = groups[cut..].iter().flat_map(|g| g.samples.iter().copied()).collect();
        let effect = a12(&left, &right).expect("nonempty sides");
        if effect >= A12_LARGE || effect <= A12_SMALL {
            split(&groups[..cut], base, out);
            split(&groups[cut..], base + cut, out);
            return;
        }
    }
    out.push((base, base + groups.len()));
}

fn best_cut(groups: &[RankedGroup]) -> Option<usize> {
    if groups.len() < 2 {
        return None;
    }
    let sums: Vec<(f64, f64)> = groups
        .iter()
        .map(|g| (g.samples.iter().sum(), g.samples.len() as f64))
        .collect();
    let (total, n) = sums.iter().fold((0.0, 0.0), |(s, c), &(a, b)| (s + a, c + b));
    let mu = total / n;
    let mut best: Option<(usize, f64)> = None;
    let (mut ls, mut ln) = (0.0, 0.0);
    for cut in 1..groups.len() {
        ls += sums[cut - 1].0;
        ln += sums[cut - 1].1;
        let (rs, rn) = (total - ls, n - ln);
        let gain = ln * (ls / ln - mu).powi(2) + rn * (rs / rn - mu).powi(2);
        if best.is_none_or(|(_, g)| gain.partial_cmp(&g) == Some(Ordering::Greater)) {
            best = Some((cut, gain));
        }
    }
    best.map(|(c, _)| c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_a12(xs: &[f64], ys: &[f64]) -> f64 {
        let mut s = 0.0;
        for x in xs {
            for y in ys {
                s += if x > y { 1.0 } else if x == y { 0.5 } else { 0.0 };
            }
        }
        s / (xs.len() * ys.len()) as f64
    }

    #[test]
    fn a12_examples() {
        assert_eq!(a12(&[1.0, 2.0], &[1.0, 3.0]).unwrap(), 0.375);
        assert_eq!(a12(&[5.0, 6.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(a12(&[3.0; 4], &[3.0; 7]).unwrap(), 0.5);
        assert!(a12(&[], &[1.0]).is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn scott_knott_examples() {
        let one = scott_knott(vec![("a".into(), vec![1.0, 2.0])], true).unwrap();
        assert_eq!(one.rank_of("a"), Some(1));

        let same = scott_knott((0..5).map(|i| (format!("g{i}"), vec![7.0; 20])).collect(), true).unwrap();
        assert_eq!(same.rank_count(), 1);

        let low: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let high: Vec<f64> = (0..20).map(|i| 100.0 + i as f64).collect();
        let two = scott_knott(vec![("hi".into(), high.clone()), ("lo".into(), low.clone())], true).unwrap();
        assert_eq!(two.rank_of("lo"), Some(1));
        assert_eq!(two.rank_of("hi"), Some(2));
        let flipped = scott_knott(vec![("hi".into(), high), ("lo".into(), low)], false).unwrap();
        assert_eq!(flipped.rank_of("hi"), Some(1));

        assert!(scott_knott(vec![], true).is_err());
        assert!(scott_knott(vec![("e".into(), vec![])], true).is_err());
    }

    #[test]
    fn three_tiers() {
        let g = |c: f64| (0..10).map(|i| c + i as f64 * 0.1).collect::<Vec<_>>();
        let r = scott_knott(
            vec![("b".into(), g(10.0)), ("a".into(), g(0.0)), ("a2".into(), g(0.05)), ("c".into(), g(50.0))],
            true,
        )
        .unwrap();
        assert_eq!(r.rank_of("a"), Some(1));
        assert_eq!(r.rank_of("a2"), Some(1));
        assert_eq!(r.rank_of("b"), Some(2));
        assert_eq!(r.rank_of("c"), Some(3));
    }

    fn groups() -> impl Strategy<Value = Vec<(String, Vec<f64>)>> {
        prop::collection::vec(prop::collection::vec(0.0..10.0f64, 1..12), 1..7).prop_map(|gs| {
            gs.into_iter().enumerate().map(|(i, s)| (format!("g{i}"), s)).collect()
        })
    }

    proptest! {
        #[test]
        fn a12_matches_pair_count_and_is_antisymmetric(
            xs in prop::collection::vec(0u8..6, 1..30),
            ys in prop::collection::vec(0u8..6, 1..30),
        ) {
            let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
            let ys: Vec<f64> = ys.into_iter().map(f64::from).collect();
            let a = a12(&xs, &ys).unwrap();
            prop_assert!((a - brute_a12(&xs, &ys)).abs() < 1e-12);
            prop_assert!((a + a12(&ys, &xs).unwrap() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn ranks_follow_medians_and_ignore_input_order(gs in groups(), rot in 0usize..7) {
            let r = scott_knott(gs.clone(), true).unwrap();
            let ranks: Vec<usize> = r.groups.iter().map(|g| g.rank).collect();
            prop_assert_eq!(ranks[0], 1);
            for w in ranks.windows(2) {
                prop_assert!(w[1] == w[0] || w[1] == w[0] + 1);
            }
            for a in &r.groups {
                for b in &r.groups {
                    if a.rank < b.rank {
                        prop_assert!(a.median <= b.median);
                    }
                }
            }
            let mut rotated = gs.clone();
            let k = rot % rotated.len();
            rotated.rotate_left(k);
            let r2 = scott_knott(rotated, true).unwrap();
            for g in &r.groups {
                prop_assert_eq!(r2.rank_of(&g.label), Some(g.rank));
            }
        }
    }
}
