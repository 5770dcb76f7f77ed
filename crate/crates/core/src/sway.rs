//! Sampling baseline: recursive bi-clustering of a large random pool.
//!
//! Each level measures two distant poles, keeps the half of the items
//! nearer the pole that wins an indicator-domination comparison, and stops
//! when a cluster is smaller than `enough`, at which point every item of the
//! cluster is measured.

use std::collections::HashMap;

use rand::{Rng, RngCore};

use crate::dominance::{first_front, indicator_wins};
use crate::error::{Error, Result};
use crate::problem::{seeded_rng, DecisionPoint, DecisionScaler, EvaluatedPoint, Problem};
use crate::run::RunResult;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SwayConfig {
    /// Recursion floor; `None` means `⌈√|pool|⌉`.
    pub enough: Option<usize>,
    pub seed: u64,
}

impl SwayConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { enough: None, seed }
    }

    pub fn enough_for(&self, pool_len: usize) -> usize {
        self.enough
            .unwrap_or_else(|| (pool_len as f64).sqrt().ceil() as usize)
            .max(2)
    }
}

/// A SWAY run with the recursion details kept for inspection.
#[derive(Clone, Debug, PartialEq)]
pub struct SwayRun {
    pub result: RunResult,
    /// Ids of the points in each emitted cluster, in emission order.
    pub leaves: Vec<Vec<usize>>,
    pub pole_evals: usize,
    /// Deepest recursion level reached; the root is level 1.
    pub depth: usize,
}

pub fn run_sway(problem: &mut Problem, pool: &[DecisionPoint], config: SwayConfig) -> Result<RunResult> {
    run_sway_detailed(problem, pool, config).map(|r| r.result)
}

pub fn run_sway_detailed(problem: &mut Problem, pool: &[DecisionPoint], config: SwayConfig) -> Result<SwayRun> {
    if pool.len() < 2 {
        return Err(Error::invalid("pool needs at least 2 points"));
    }
    if config.enough == Some(0) || config.enough == Some(1) {
        return Err(Error::invalid("enough must be at least 2"));
    }
    let mut state = State {
        problem,
        pool,
        scaler: DecisionScaler::fit(pool.iter().map(|p| p.decisions.as_slice())),
        enough: config.enough_for(pool.len()),
        rng: seeded_rng(config.seed),
        poles: HashMap::new(),
        evaluated: Vec::new(),
        leaves: Vec::new(),
        pole_evals: 0,
        depth: 0,
    };
    state.recurse((0..pool.len()).collect(), 1)?;

    let schema = state.problem.schema().clone();
    // A pole that also lands in a leaf is measured twice; keep one copy.
    let mut seen = std::collections::HashSet::new();
    let best = first_front(&state.evaluated, &schema)?
        .into_iter()
        .map(|i| &state.evaluated[i])
        .filter(|e| seen.insert(e.id()))
        .cloned()
        .collect();
    Ok(SwayRun {
        result: RunResult {
            evals: state.evaluated.len(),
            best,
            evaluated: state.evaluated,
            trace: Vec::new(),
        },
        leaves: state.leaves,
        pole_evals: state.pole_evals,
        depth: state.depth,
    })
}

struct State<'a> {
    problem: &'a mut Problem,
    pool: &'a [DecisionPoint],
    scaler: DecisionScaler,
    enough: usize,
    rng: rand_chacha::ChaCha8Rng,
    /// Pool position -> index in `evaluated` of its pole measurement.
    poles: HashMap<usize, usize>,
    evaluated: Vec<EvaluatedPoint>,
    leaves: Vec<Vec<usize>>,
    pole_evals: usize,
    depth: usize,
}

impl State<'_> {
    fn recurse(&mut self, items: Vec<usize>, depth: usize) -> Result<()> {
        self.depth = self.depth.max(depth);
        if items.len() < self.enough {
            return self.emit(items);
        }
        let points: Vec<&DecisionPoint> = items.iter().map(|&i| &self.pool[i]).collect();
        let (w, e) = match distant_pair(&points, &self.scaler, &mut self.rng) {
            Ok(pair) => pair,
            Err(Error::Degenerate(_)) => return self.emit(items),
            Err(other) => return Err(other),
        };
        let (west, east) = (items[w], items[e]);
        let west_obj = self.measure_pole(west)?;
        let east_obj = self.measure_pole(east)?;
        let senses = self.problem.schema().senses();
        let west_wins = indicator_wins(&west_obj, &east_obj, senses);
        let east_wins = indicator_wins(&east_obj, &west_obj, senses);
        if !west_wins && !east_wins {
            return self.emit(items);
        }

        let positions = project_with(&points, points[w], points[e], &self.scaler)?;
        let mut order: Vec<usize> = (0..items.len()).collect();
        order.sort_by(|&a, &b| {
            positions[a]
                .total_cmp(&positions[b])
                .then(self.pool[items[a]].id.cmp(&self.pool[items[b]].id))
        });
        let sorted: Vec<usize> = order.into_iter().map(|k| items[k]).collect();
        let mid = sorted.len() / 2;
        if west_wins {
            self.recurse(sorted[..mid].to_vec(), depth + 1)?;
        }
        if east_wins {
            self.recurse(sorted[mid..].to_vec(), depth + 1)?;
        }
        Ok(())
    }

    fn measure_pole(&mut self, pos: usize) -> Result<Vec<f64>> {
        if let Some(&k) = self.poles.get(&pos) {
            return Ok(self.evaluated[k].objectives.to_vec());
        }
        let e = self.problem.evaluate(&self.pool[pos])?;
        let objectives = e.objectives.to_vec();
        self.poles.insert(pos, self.evaluated.len());
        self.evaluated.push(e);
        self.pole_evals += 1;
        Ok(objectives)
    }

    fn emit(&mut self, items: Vec<usize>) -> Result<()> {
        for &i in &items {
            let e = self.problem.evaluate(&self.pool[i])?;
            self.evaluated.push(e);
        }
        self.leaves.push(items.iter().map(|&i| self.pool[i].id).collect());
        Ok(())
    }
}

/// Position of every item along the west→east axis, by the cosine rule:
/// `(a² + c² − b²) / 2c` with `a`, `b` the distances to west and east and
/// `c` the distance between the poles. Distances are Euclidean over
/// min-max-normalized decisions of `items`.
pub fn project(items: &[DecisionPoint], west: &DecisionPoint, east: &DecisionPoint) -> Result<Vec<f64>> {
    let scaler = DecisionScaler::fit(
        items
            .iter()
            .chain([west, east])
            .map(|p| p.decisions.as_slice()),
    );
    let refs: Vec<&DecisionPoint> = items.iter().collect();
    project_with(&refs, west, east, &scaler)
}

fn project_with(
    items: &[&DecisionPoint],
    west: &DecisionPoint,
    east: &DecisionPoint,
    scaler: &DecisionScaler,
) -> Result<Vec<f64>> {
    let c = scaler.distance(&west.decisions, &east.decisions);
    if c == 0.0 {
        return Err(Error::Degenerate("poles coincide"));
    }
    Ok(items
        .iter()
        .map(|p| {
            let a = scaler.distance(&p.decisions, &west.decisions);
            let b = scaler.distance(&p.decisions, &east.decisions);
            (a * a + c * c - b * b) / (2.0 * c)
        })
        .collect())
}

/// FastMap pole pair: from a random anchor, `west` is the farthest item and
/// `east` the item farthest from `west`. Ties go to the lowest id.
pub fn two_distant_points(items: &[DecisionPoint], seed: u64) -> Result<(DecisionPoint, DecisionPoint)> {
    if items.len() < 2 {
        return Err(Error::invalid("need at least 2 items"));
    }
    let scaler = DecisionScaler::fit(items.iter().map(|p| p.decisions.as_slice()));
    let refs: Vec<&DecisionPoint> = items.iter().collect();
    let (w, e) = distant_pair(&refs, &scaler, &mut seeded_rng(seed))?;
    Ok((items[w].clone(), items[e].clone()))
}

fn distant_pair(items: &[&DecisionPoint], scaler: &DecisionScaler, rng: &mut dyn RngCore) -> Result<(usize, usize)> {
    let anchor = rng.random_range(0..items.len());
    let west = farthest(items, items[anchor], scaler);
    let east = farthest(items, items[west], scaler);
    if scaler.distance(&items[west].decisions, &items[east].decisions) == 0.0 {
        return Err(Error::Degenerate("all items coincide in decision space"));
    }
    Ok((west, east))
}

fn farthest(items: &[&DecisionPoint], from: &DecisionPoint, scaler: &DecisionScaler) -> usize {
    let mut best = 0;
    let mut best_d = f64::NEG_INFINITY;
    for (i, p) in items.iter().enumerate() {
        let d = scaler.distance(&p.decisions, &from.decisions);
        if d > best_d || (d == best_d && p.id < items[best].id) {
            best = i;
            best_d = d;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{ObjectiveSchema, Sense};

    fn pts(xs: &[&[f64]]) -> Vec<DecisionPoint> {
        xs.iter()
            .enumerate()
            .map(|(i, x)| DecisionPoint::new(i, x.to_vec()))
            .collect()
    }

    fn problem(rows: Vec<(Vec<f64>, Vec<f64>)>) -> Problem {
        let arity = rows[0].0.len();
        Problem::tabular(
            "t",
            (0..arity).map(|j| format!("x{j}")).collect(),
            ObjectiveSchema::from_senses(&[Sense::Min, Sense::Min]),
            rows,
        )
        .unwrap()
    }

    #[test]
    fn projection_of_poles_and_midpoint() {
        let items = pts(&[&[0.0, 0.0], &[1.0, 1.0], &[0.5, 0.5], &[0.2, 0.9]]);
        let pos = project(&items, &items[0], &items[1]).unwrap();
        let c = 2f64.sqrt();
        assert!(pos[0].abs() < 1e-12);
        assert!((pos[1] - c).abs() < 1e-12);
        assert!((pos[2] - c / 2.0).abs() < 1e-12);
        assert!(project(&items, &items[0], &items[0]).is_err());
    }

    #[test]
    fn poles_on_a_segment_are_its_ends() {
        let items = pts(&[&[0.3], &[0.0], &[0.9], &[1.0], &[0.5]]);
        for seed in 0..10 {
            let (w, e) = two_distant_points(&items, seed).unwrap();
            let mut ends = [w.id, e.id];
            ends.sort_unstable();
            assert_eq!(ends, [1, 3]);
            assert_eq!(two_distant_points(&items, seed).unwrap(), (w, e));
        }
        let two = pts(&[&[0.0], &[4.0]]);
        let (w, e) = two_distant_points(&two, 3).unwrap();
        assert_ne!(w.id, e.id);
        let same = pts(&[&[1.0], &[1.0], &[1.0]]);
        assert!(matches!(two_distant_points(&same, 0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn small_pool_is_a_single_leaf() {
        let rows = (0..5).map(|i| (vec![i as f64], vec![i as f64, 4.0 - i as f64])).collect();
        let mut p = problem(rows);
        let pool = p.sample_pool(5, 0).unwrap();
        let r = run_sway_detailed(&mut p, &pool, SwayConfig { enough: Some(10), seed: 0 }).unwrap();
        assert_eq!(r.result.evals, 5);
        assert_eq!(r.pole_evals, 0);
        assert_eq!(r.result.best.len(), 5);
    }

    #[test]
    fn identical_objectives_emit_whole_pool() {
        let rows = (0..50).map(|i| (vec![i as f64], vec![1.0, 1.0])).collect();
        let mut p = problem(rows);
        let pool = p.sample_pool(50, 0).unwrap();
        let r = run_sway_detailed(&mut p, &pool, SwayConfig::with_seed(1)).unwrap();
        assert_eq!(r.result.evals, 2 + 50);
        assert_eq!(r.leaves.len(), 1);
        assert_eq!(p.eval_count(), 52);
        // Duplicated pole measurements are collapsed in `best`.
        assert_eq!(r.result.best.len(), 50);
    }

    #[test]
    fn gradient_problem_respects_depth_and_pole_bounds() {
        let n = 2000usize;
        let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
            .map(|i| {
                let x = i as f64 / n as f64;
                let y = ((i * 37) % n) as f64 / n as f64;
                (vec![x, y], vec![x + y, 1.0 - x + y])
            })
            .collect();
        for seed in 0..10 {
            let mut p = problem(rows.clone());
            let pool = p.sample_pool(n, seed).unwrap();
            let cfg = SwayConfig::with_seed(seed);
            let enough = cfg.enough_for(n);
            let r = run_sway_detailed(&mut p, &pool, cfg).unwrap();
            let levels = ((n as f64) / enough as f64).log2().ceil() as usize;
            assert!(r.depth <= levels + 1, "depth {} > {}", r.depth, levels + 1);
            assert_eq!(r.leaves.len(), 1, "one side wins at every level");
            assert!(r.pole_evals <= 2 * levels + 2);
            let leaf_total: usize = r.leaves.iter().map(Vec::len).sum();
            assert_eq!(r.result.evals, r.pole_evals + leaf_total);
            assert_eq!(p.eval_count(), r.result.evals);
            assert_eq!(run_sway_detailed(&mut p.fresh(), &pool, cfg).unwrap(), r);
        }
    }

    #[test]
    fn leaves_never_repeat_points() {
        let n = 300usize;
        // Objectives unrelated to geometry, so either side may win.
        let rows = (0..n)
            .map(|i| {
                let x = i as f64;
                (vec![x, (i * 13 % 17) as f64], vec![(i * 7 % 11) as f64, (i * 5 % 13) as f64])
            })
            .collect();
        let mut p = problem(rows);
        let pool = p.sample_pool(n, 4).unwrap();
        let r = run_sway_detailed(&mut p, &pool, SwayConfig { enough: Some(8), seed: 4 }).unwrap();
        let mut all: Vec<usize> = r.leaves.concat();
        let total = all.len();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), total);
        assert!(run_sway(&mut p, &pool[..1], SwayConfig::default()).is_err());
    }
}
