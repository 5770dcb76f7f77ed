//! Minimal NSGA-II: binary tournaments on (front rank, crowding distance),
//! uniform crossover, per-gene resampling mutation, and elitist truncation of
//! parents ∪ offspring by non-dominated sort plus crowding distance.
//!
//! Offspring on tabular problems are snapped to the nearest unmeasured row
//! so every evaluation is a real measurement. Generative problems repair
//! their own offspring.

use std::sync::Arc;

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dominance::{first_front, nondominated_sort};
use crate::error::{Error, Result};
use crate::problem::{
    seeded_rng, DecisionPoint, DecisionScaler, EvaluatedPoint, Generator, ObjectiveSchema, Problem, Source, Table,
};
use crate::run::RunResult;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Nsga2Config {
    pub pop_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    /// Per-gene mutation probability; `None` means `1 / decision arity`.
    pub mutation_prob: Option<f64>,
    pub seed: u64,
}

impl Default for Nsga2Config {
    fn default() -> Self {
        Self {
            pop_size: 100,
            generations: 50,
            crossover_prob: 0.9,
            mutation_prob: None,
            seed: 0,
        }
    }
}

impl Nsga2Config {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 4 || self.pop_size % 2 != 0 {
            return Err(Error::invalid(format!(
                "pop_size must be even and at least 4, got {}",
                self.pop_size
            )));
        }
        if self.generations == 0 {
            return Err(Error::invalid("generations must be at least 1"));
        }
        let probs = [Some(self.crossover_prob), self.mutation_prob];
        if probs.iter().flatten().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::invalid("probabilities must lie in [0, 1]"));
        }
        Ok(())
    }
}

enum Space<'a> {
    Table {
        table: &'a Table,
        scaler: DecisionScaler,
        used: Vec<bool>,
    },
    Generated {
        generator: Arc<dyn Generator>,
        next_id: usize,
    },
}

impl Space<'_> {
    fn initial(&mut self, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<DecisionPoint>> {
        match self {
            Space::Table { table, used, .. } => {
                if table.len() < n {
                    return Err(Error::invalid(format!(
                        "table of {} rows is smaller than the population of {n}",
                        table.len()
                    )));
                }
                Ok(index::sample(rng, table.len(), n)
                    .into_iter()
                    .map(|row| {
                        used[row] = true;
                        table.point(row)
                    })
                    .collect())
            }
            Space::Generated { generator, next_id } => Ok((0..n)
                .map(|_| {
                    *next_id += 1;
                    DecisionPoint::new(*next_id - 1, generator.sample(rng))
                })
                .collect()),
        }
    }

    fn materialize(&mut self, mut decisions: Vec<f64>) -> DecisionPoint {
        match self {
            Space::Table { table, scaler, used } => {
                let mut best: Option<(usize, f64)> = None;
                let any_free = used.iter().any(|u| !u);
                for row in 0..table.len() {
                    if any_free && used[row] {
                        continue;
                    }
                    let d = scaler.distance(table.decisions(row), &decisions);
                    if best.is_none_or(|(_, bd)| d < bd) {
                        best = Some((row, d));
                    }
                }
                let (row, _) = best.expect("table is nonempty");
                used[row] = true;
                table.point(row)
            }
            Space::Generated { generator, next_id } => {
                generator.repair(&mut decisions);
                *next_id += 1;
                DecisionPoint::new(*next_id - 1, decisions)
            }
        }
    }
}

fn gene_values(problem: &Problem) -> Vec<Vec<f64>> {
    match problem.source() {
        Source::Tabular(t) => (0..problem.decision_arity())
            .map(|j| {
                let mut v: Vec<f64> = (0..t.len()).map(|r| t.decisions(r)[j]).collect();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            })
            .collect(),
        Source::Generative(g) => (0..problem.decision_arity()).map(|j| g.gene_values(j)).collect(),
    }
}

pub fn run_nsga2(problem: &mut Problem, config: Nsga2Config) -> Result<RunResult> {
    config.validate()?;
    let schema = problem.schema().clone();
    let arity = problem.decision_arity();
    let mutation_prob = config.mutation_prob.unwrap_or(1.0 / arity.max(1) as f64);
    let values = gene_values(problem);
    let mut rng = seeded_rng(config.seed);

    let source = problem.source().clone();
    let mut space = match &source {
        Source::Tabular(t) => Space::Table {
            table: t,
            scaler: DecisionScaler::fit((0..t.len()).map(|r| t.decisions(r))),
            used: vec![false; t.len()],
        },
        Source::Generative(g) => Space::Generated {
            generator: Arc::clone(g),
            next_id: 0,
        },
    };

    let mut evaluated = Vec::new();
    let mut population = Vec::with_capacity(config.pop_size);
    for p in space.initial(config.pop_size, &mut rng)? {
        let e = problem.evaluate(&p)?;
        evaluated.push(e.clone());
        population.push(e);
    }

    for _ in 0..config.generations {
        let (rank, crowd) = rank_and_crowding(&population, &schema)?;
        let mut children: Vec<Vec<f64>> = Vec::with_capacity(config.pop_size);
        while children.len() < config.pop_size {
            let a = tournament(&rank, &crowd, &mut rng);
            let b = tournament(&rank, &crowd, &mut rng);
            let mut c1 = population[a].point.decisions.clone();
            let mut c2 = population[b].point.decisions.clone();
            if rng.random_bool(config.crossover_prob) {
                for j in 0..arity {
                    if rng.random_bool(0.5) {
                        std::mem::swap(&mut c1[j], &mut c2[j]);
                    }
                }
            }
            for c in [&mut c1, &mut c2] {
                for (j, gene) in c.iter_mut().enumerate() {
                    if !values[j].is_empty() && rng.random_bool(mutation_prob) {
                        *gene = values[j][rng.random_range(0..values[j].len())];
                    }
                }
            }
            children.push(c1);
            children.push(c2);
        }

        let mut combined = population;
        for c in children {
            let e = problem.evaluate(&space.materialize(c))?;
            evaluated.push(e.clone());
            combined.push(e);
        }
        let keep = environmental_selection(&combined, config.pop_size, &schema)?;
        population = keep.into_iter().map(|i| combined[i].clone()).collect();
    }

    let best = first_front(&population, &schema)?
        .into_iter()
        .map(|i| population[i].clone())
        .collect();
    Ok(RunResult {
        evals: evaluated.len(),
        evaluated,
        best,
        trace: Vec::new(),
    })
}

fn rank_and_crowding(pop: &[EvaluatedPoint], schema: &ObjectiveSchema) -> Result<(Vec<usize>, Vec<f64>)> {
    let partition = nondominated_sort(pop, schema)?;
    let mut crowd = vec![0.0; pop.len()];
    for front in &partition.fronts {
        let members: Vec<EvaluatedPoint> = front.iter().map(|&i| pop[i].clone()).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&members, schema)) {
            crowd[i] = d;
        }
    }
    Ok((partition.ranks(), crowd))
}

fn tournament(rank: &[usize], crowd: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let a = rng.random_range(0..rank.len());
    let b = rng.random_range(0..rank.len());
    if rank[b] < rank[a] || (rank[b] == rank[a] && crowd[b] > crowd[a]) {
        b
    } else {
        a
    }
}

/// Crowding distance of each member of a front: boundary points get +∞,
/// interior points the sum over objectives of the range-normalized gap
/// between their neighbors.
pub fn crowding_distance(front: &[EvaluatedPoint], schema: &ObjectiveSchema) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut dist = vec![0.0; n];
    for m in 0..schema.len() {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| front[a].objectives[m].total_cmp(&front[b].objectives[m]).then(a.cmp(&b)));
        let lo = front[order[0]].objectives[m];
        let hi = front[order[n - 1]].objectives[m];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for k in 1..n - 1 {
            let gap = front[order[k + 1]].objectives[m] - front[order[k - 1]].objectives[m];
            dist[order[k]] += gap / range;
        }
    }
    dist
}

/// Chooses `n` survivors: whole fronts in order, then the least crowded
/// members of the first front that does not fit (ties by `eval_index`).
/// Returns positions in `points`.
pub fn environmental_selection(points: &[EvaluatedPoint], n: usize, schema: &ObjectiveSchema) -> Result<Vec<usize>> {
    if n > points.len() {
        return Err(Error::invalid(format!("cannot select {n} of {} points", points.len())));
    }
    let partition = nondominated_sort(points, schema)?;
    let mut out = Vec::with_capacity(n);
    for front in &partition.fronts {
        let room = n - out.len();
        if room == 0 {
            break;
        }
        if front.len() <= room {
            out.extend_from_slice(front);
            continue;
        }
        let members: Vec<EvaluatedPoint> = front.iter().map(|&i| points[i].clone()).collect();
        let d = crowding_distance(&members, schema);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| {
            d[b].total_cmp(&d[a])
                .then(members[a].eval_index.cmp(&members[b].eval_index))
        });
        out.extend(order.into_iter().take(room).map(|k| front[k]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{ObjectiveVector, Sense};

    fn ep(i: usize, o: &[f64]) -> EvaluatedPoint {
        EvaluatedPoint {
            point: DecisionPoint::new(i, vec![i as f64]),
            objectives: ObjectiveVector::new(o.to_vec()).unwrap(),
            eval_index: i,
        }
    }

    fn minmin() -> ObjectiveSchema {
        ObjectiveSchema::from_senses(&[Sense::Min, Sense::Min])
    }

    fn line(n: usize) -> Problem {
        let rows = (0..n)
            .map(|i| {
                let x = i as f64 / (n - 1) as f64;
                (vec![x], vec![x, 1.0 - x])
            })
            .collect();
        Problem::tabular("line", vec!["x".into()], minmin(), rows).unwrap()
    }

    #[test]
    fn crowding_examples() {
        let s = minmin();
        assert!(crowding_distance(&[ep(0, &[0.0, 1.0]), ep(1, &[1.0, 0.0])], &s)
            .iter()
            .all(|d| d.is_infinite()));
        let d = crowding_distance(&[ep(0, &[0.0, 2.0]), ep(1, &[1.0, 1.0]), ep(2, &[2.0, 0.0])], &s);
        assert_eq!(d[1], 2.0);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        let same: Vec<EvaluatedPoint> = (0..4).map(|i| ep(i, &[1.0, 1.0])).collect();
        let d = crowding_distance(&same, &s);
        assert_eq!(d.iter().filter(|v| v.is_infinite()).count(), 2);
        assert_eq!(d.iter().filter(|&&v| v == 0.0).count(), 2);
    }

    #[test]
    fn selection_keeps_front_zero() {
        let s = minmin();
        let pts = vec![
            ep(0, &[5.0, 5.0]),
            ep(1, &[0.0, 3.0]),
            ep(2, &[4.0, 4.0]),
            ep(3, &[3.0, 0.0]),
            ep(4, &[1.0, 1.0]),
            ep(5, &[6.0, 6.0]),
        ];
        let keep = environmental_selection(&pts, 3, &s).unwrap();
        assert_eq!(keep.len(), 3);
        for front_zero in [1, 3, 4] {
            assert!(keep.contains(&front_zero));
        }
        let keep = environmental_selection(&pts, 4, &s).unwrap();
        assert!(keep.contains(&2));
        // Front 0 larger than the room: boundary points survive.
        let flat: Vec<EvaluatedPoint> = (0..5).map(|i| ep(i, &[i as f64, 4.0 - i as f64])).collect();
        let mut keep = environmental_selection(&flat, 2, &s).unwrap();
        keep.sort_unstable();
        assert_eq!(keep, vec![0, 4]);
    }

    #[test]
    fn budget_identity() {
        let mut p = line(50);
        let cfg = Nsga2Config {
            pop_size: 4,
            generations: 1,
            ..Nsga2Config::with_seed(3)
        };
        let r = run_nsga2(&mut p, cfg).unwrap();
        assert_eq!(r.evals, 8);
        assert_eq!(p.eval_count(), 8);

        let cfg = Nsga2Config {
            pop_size: 10,
            generations: 7,
            ..Nsga2Config::with_seed(1)
        };
        let r = run_nsga2(&mut p.fresh(), cfg).unwrap();
        assert_eq!(r.evals, 80);
        assert_eq!(r, run_nsga2(&mut p.fresh(), cfg).unwrap());
    }

    #[test]
    fn snapping_reuses_rows_only_when_exhausted() {
        let mut p = line(12);
        let cfg = Nsga2Config {
            pop_size: 4,
            generations: 5,
            ..Nsga2Config::with_seed(9)
        };
        let r = run_nsga2(&mut p, cfg).unwrap();
        let ids: Vec<usize> = r.evaluated.iter().map(|e| e.id()).collect();
        let mut first12 = ids[..12].to_vec();
        first12.sort_unstable();
        first12.dedup();
        assert_eq!(first12.len(), 12, "all rows measured before any repeat");
    }

    #[test]
    fn config_validation() {
        let mut p = line(200);
        for bad in [
            Nsga2Config { pop_size: 3, ..Nsga2Config::default() },
            Nsga2Config { pop_size: 6, generations: 0, ..Nsga2Config::default() },
            Nsga2Config { pop_size: 6, crossover_prob: 1.5, ..Nsga2Config::default() },
            Nsga2Config { pop_size: 6, mutation_prob: Some(-0.1), ..Nsga2Config::default() },
        ] {
            assert!(run_nsga2(&mut p, bad).is_err());
        }
        // Table smaller than the population.
        assert!(run_nsga2(&mut line(50), Nsga2Config::default()).is_err());
    }

    fn spread(points: &[EvaluatedPoint], schema: &ObjectiveSchema) -> f64 {
        let front = first_front(points, schema).unwrap();
        let f1: Vec<f64> = front.iter().map(|&i| points[i].objectives[0]).collect();
        f1.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - f1.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn final_front_spreads_wider_than_initial() {
        let s = minmin();
        let mut initial = Vec::new();
        let mut last = Vec::new();
        for seed in 0..20 {
            let mut p = line(1000);
            let r = run_nsga2(&mut p, Nsga2Config::with_seed(seed)).unwrap();
            initial.push(spread(&r.evaluated[..100], &s));
            last.push(spread(&r.best, &s));
        }
        let median = |v: &mut Vec<f64>| {
            v.sort_by(f64::total_cmp);
            (v[9] + v[10]) / 2.0
        };
        assert!(median(&mut last) > median(&mut initial));
    }
}
