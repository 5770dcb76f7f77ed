//! Dominance predicates and sorts.
//!
//! * binary (Pareto) domination: no worse everywhere, strictly better somewhere;
//! * indicator domination: the exponential quality indicator
//!   `M(x, y) = Σ_j −exp(w_j (x_j − y_j) / n) / n`, with `x ≻ y` iff
//!   `M(y, x) > M(x, y)`;
//! * ε-domination;
//! * non-dominated sorting into fronts and domination-count scoring.
//!
//! Objective values are used raw; nothing here rescales them.

use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problem::{EvaluatedPoint, ObjectiveSchema, Sense};

/// `true` iff `x` is no worse than `y` on every objective and strictly
/// better on at least one.
pub fn binary_dominates(x: &[f64], y: &[f64], schema: &ObjectiveSchema) -> Result<bool> {
    schema.check(x)?;
    schema.check(y)?;
    Ok(dominates(x, y, schema.senses()))
}

/// The indicator `M(x, y)`.
pub fn indicator_value(x: &[f64], y: &[f64], schema: &ObjectiveSchema) -> Result<f64> {
    schema.check(x)?;
    schema.check(y)?;
    Ok(indicator(x, y, schema.senses()))
}

pub fn indicator_dominates(x: &[f64], y: &[f64], schema: &ObjectiveSchema) -> Result<bool> {
    schema.check(x)?;
    schema.check(y)?;
    Ok(indicator_wins(x, y, schema.senses()))
}

/// `true` iff `x`, moved by `eps` toward better on every objective, is no
/// worse than `y` everywhere.
pub fn epsilon_dominates(x: &[f64], y: &[f64], eps: f64, schema: &ObjectiveSchema) -> Result<bool> {
    if !(eps >= 0.0) {
        return Err(Error::invalid(format!("epsilon must be non-negative, got {eps}")));
    }
    schema.check(x)?;
    schema.check(y)?;
    Ok(x.iter()
        .zip(y)
        .zip(schema.senses())
        .all(|((&a, &b), &s)| s.orient(a) - eps <= s.orient(b)))
}

#[inline]
pub(crate) fn dominates(x: &[f64], y: &[f64], senses: &[Sense]) -> bool {
    let mut strictly = false;
    for ((&a, &b), &s) in x.iter().zip(y).zip(senses) {
        let (a, b) = (s.orient(a), s.orient(b));
        if a > b {
            return false;
        }
        if a < b {
            strictly = true;
        }
    }
    strictly
}

#[inline]
pub(crate) fn indicator(x: &[f64], y: &[f64], senses: &[Sense]) -> f64 {
    let n = senses.len() as f64;
    x.iter()
        .zip(y)
        .zip(senses)
        .map(|((&a, &b), &s)| -(s.weight() * (a - b) / n).exp() / n)
        .sum()
}

/// `M(y, x) > M(x, y)`. When raw objective gaps are large enough for the
/// exponentials to overflow, the same inequality is decided in log space:
/// with `d_j = w_j (x_j − y_j) / n` it reads `logsumexp(d) > logsumexp(−d)`.
#[inline]
pub(crate) fn indicator_wins(x: &[f64], y: &[f64], senses: &[Sense]) -> bool {
    let (m_yx, m_xy) = (indicator(y, x, senses), indicator(x, y, senses));
    if m_yx.is_finite() && m_xy.is_finite() {
        return m_yx > m_xy;
    }
    let n = senses.len() as f64;
    let d: Vec<f64> = x
        .iter()
        .zip(y)
        .zip(senses)
        .map(|((&a, &b), &s)| s.weight() * (a - b) / n)
        .collect();
    log_sum_exp(d.iter().copied()) > log_sum_exp(d.iter().map(|v| -v))
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let top = values.clone().fold(f64::NEG_INFINITY, f64::max);
    top + values.map(|v| (v - top).exp()).sum::<f64>().ln()
}

/// Points split into successive non-dominated fronts. Entries are positions
/// in the slice that was sorted; front 0 is the non-dominated set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontPartition {
    pub fronts: Vec<Vec<usize>>,
}

impl FrontPartition {
    pub fn first(&self) -> &[usize] {
        &self.fronts[0]
    }

    /// Front index of every position.
    pub fn ranks(&self) -> Vec<usize> {
        let n = self.fronts.iter().map(Vec::len).sum();
        let mut rank = vec![0; n];
        for (r, front) in self.fronts.iter().enumerate() {
            for &i in front {
                rank[i] = r;
            }
        }
        rank
    }
}

fn check_points(points: &[EvaluatedPoint], schema: &ObjectiveSchema) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Empty("points"));
    }
    points.iter().try_for_each(|p| schema.check(&p.objectives))
}

/// Fast non-dominated sort. Within each front, positions are ordered by
/// ascending `eval_index`.
pub fn nondominated_sort(points: &[EvaluatedPoint], schema: &ObjectiveSchema) -> Result<FrontPartition> {
    check_points(points, schema)?;
    let vectors: Vec<&[f64]> = points.iter().map(|p| &p.objectives[..]).collect();
    let mut fronts = sort_vectors(&vectors, schema.senses());
    for f in &mut fronts {
        f.sort_by_key(|&i| (points[i].eval_index, i));
    }
    Ok(FrontPartition { fronts })
}

pub(crate) fn sort_vectors(vectors: &[&[f64]], senses: &[Sense]) -> Vec<Vec<usize>> {
    let n = vectors.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for p in 0..n {
        for q in p + 1..n {
            if dominates(vectors[p], vectors[q], senses) {
                dominates_list[p].push(q);
                dominated_by[q] += 1;
            } else if dominates(vectors[q], vectors[p], senses) {
                dominates_list[q].push(p);
                dominated_by[p] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominates_list[p] {
                dominated_by[q] -= 1;
                if dominated_by[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Positions of the non-dominated points, ordered by ascending `eval_index`.
///
/// Cheaper than a full [`nondominated_sort`] when only front 0 is needed.
pub fn first_front(points: &[EvaluatedPoint], schema: &ObjectiveSchema) -> Result<Vec<usize>> {
    check_points(points, schema)?;
    let vectors: Vec<&[f64]> = points.iter().map(|p| &p.objectives[..]).collect();
    let mut front = first_front_vectors(&vectors, schema.senses());
    front.sort_by_key(|&i| (points[i].eval_index, i));
    Ok(front)
}

/// Front 0 of raw vectors, as ascending positions.
///
/// After sorting lexicographically in "smaller is better" space, a point can
/// only be dominated by points before it, so one pass against the growing
/// archive suffices. Identical vectors end up adjacent and share a verdict,
/// so the archive holds only distinct vectors.
pub(crate) fn first_front_vectors(vectors: &[&[f64]], senses: &[Sense]) -> Vec<usize> {
    let oriented: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| v.iter().zip(senses).map(|(&x, &s)| s.orient(x)).collect())
        .collect();
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(&oriented[a], &oriented[b]).then(a.cmp(&b)));
    let mut archive: Vec<usize> = Vec::new();
    let mut front = Vec::new();
    let mut previous: Option<(usize, bool)> = None;
    for &i in &order {
        let keep = match previous {
            Some((p, verdict)) if oriented[p] == oriented[i] => verdict,
            _ => {
                let beaten = archive
                    .iter()
                    .any(|&a| dominates_oriented(&oriented[a], &oriented[i]));
                if !beaten {
                    archive.push(i);
                }
                !beaten
            }
        };
        if keep {
            front.push(i);
        }
        previous = Some((i, keep));
    }
    front.sort_unstable();
    front
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

#[inline]
fn dominates_oriented(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (&x, &y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Number of other points each point indicator-dominates.
pub fn domination_scores(points: &[EvaluatedPoint], schema: &ObjectiveSchema) -> Result<Vec<usize>> {
    check_points(points, schema)?;
    let vectors: Vec<&[f64]> = points.iter().map(|p| &p.objectives[..]).collect();
    Ok(scores_vectors(&vectors, schema.senses()))
}

/// Identical vectors never indicator-dominate each other, so scoring runs
/// over distinct vectors weighted by multiplicity.
pub(crate) fn scores_vectors(vectors: &[&[f64]], senses: &[Sense]) -> Vec<usize> {
    let mut slot: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut unique: Vec<&[f64]> = Vec::new();
    let mut count: Vec<usize> = Vec::new();
    let mut which = Vec::with_capacity(vectors.len());
    for v in vectors {
        let key: Vec<u64> = v.iter().map(|x| (x + 0.0).to_bits()).collect();
        let k = *slot.entry(key).or_insert_with(|| {
            unique.push(v);
            count.push(0);
            unique.len() - 1
        });
        count[k] += 1;
        which.push(k);
    }
    let score_of = |k: usize| -> usize {
        unique
            .iter()
            .zip(&count)
            .enumerate()
            .filter(|&(l, (u, _))| l != k && indicator_wins(unique[k], u, senses))
            .map(|(_, (_, &c))| c)
            .sum()
    };
    let unique_scores: Vec<usize> = if unique.len() > 256 {
        (0..unique.len()).into_par_iter().map(score_of).collect()
    } else {
        (0..unique.len()).map(score_of).collect()
    };
    which.into_iter().map(|k| unique_scores[k]).collect()
}

/// `|{y ∈ pool : x ≻ y}|` under indicator domination.
pub fn domination_score(x: &EvaluatedPoint, pool: &[EvaluatedPoint], schema: &ObjectiveSchema) -> Result<usize> {
    check_points(pool, schema)?;
    schema.check(&x.objectives)?;
    if !pool.contains(x) {
        return Err(Error::invalid(format!(
            "point with eval_index {} is not in the pool",
            x.eval_index
        )));
    }
    Ok(pool
        .iter()
        .filter(|y| indicator_wins(&x.objectives, &y.objectives, schema.senses()))
        .count())
}

/// The point with the highest domination score; ties go to the lowest
/// `eval_index`. Returns the point and its score.
pub fn best_individual<'a>(
    points: &'a [EvaluatedPoint],
    schema: &ObjectiveSchema,
) -> Result<(&'a EvaluatedPoint, usize)> {
    let scores = domination_scores(points, schema)?;
    let best = (0..points.len())
        .max_by(|&a, &b| {
            scores[a]
                .cmp(&scores[b])
                .then(points[b].eval_index.cmp(&points[a].eval_index))
        })
        .expect("nonempty");
    Ok((&points[best], scores[best]))
}
