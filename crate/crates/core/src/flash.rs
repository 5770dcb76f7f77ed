//! Sequential model-based optimization with one regression tree per
//! objective.
//!
//! After measuring a random initial sample, each iteration fits a tree per
//! objective on everything measured so far, predicts every unmeasured
//! candidate, keeps the predicted non-dominated set, and measures the member
//! of that set with the highest indicator-domination score. An iteration
//! whose measurement leaves the non-dominated set unchanged costs a life;
//! the run stops when lives or candidates run out.

use rand::seq::index;

use crate::cart::{RegressionTree, TreeParams};
use crate::dominance::{first_front, first_front_vectors, scores_vectors};
use crate::error::{Error, Result};
use crate::problem::{seeded_rng, DecisionPoint, ObjectiveSchema, Problem};
use crate::run::{RunResult, TraceRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlashConfig {
    pub size0: usize,
    pub lives: usize,
    pub seed: u64,
}

impl Default for FlashConfig {
    fn default() -> Self {
        Self {
            size0: 20,
            lives: 10,
            seed: 0,
        }
    }
}

impl FlashConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.size0 == 0 {
            return Err(Error::invalid("size0 must be at least 1"));
        }
        if self.lives == 0 {
            return Err(Error::invalid("lives must be at least 1"));
        }
        Ok(())
    }
}

pub fn run_flash(problem: &mut Problem, pool: &[DecisionPoint], config: FlashConfig) -> Result<RunResult> {
    config.validate()?;
    if config.size0 > pool.len() {
        return Err(Error::invalid(format!(
            "initial sample of {} exceeds pool of {}",
            config.size0,
            pool.len()
        )));
    }
    let schema = problem.schema().clone();
    let mut rng = seeded_rng(config.seed);

    let mut measured = vec![false; pool.len()];
    let mut evaluated = Vec::new();
    for i in index::sample(&mut rng, pool.len(), config.size0) {
        measured[i] = true;
        evaluated.push(problem.evaluate(&pool[i])?);
    }
    // Positions in `evaluated`, ordered by eval_index.
    let mut best: Vec<usize> = first_front(&evaluated, &schema)?;
    let mut lives = config.lives;
    let mut trace = Vec::new();

    while lives > 0 && evaluated.len() < pool.len() {
        let models = fit_models(&evaluated, &schema)?;
        let candidates: Vec<usize> = (0..pool.len()).filter(|&i| !measured[i]).collect();
        let points: Vec<&DecisionPoint> = candidates.iter().map(|&i| &pool[i]).collect();
        let pick = candidates[select_next(&points, &models, &schema)?];

        measured[pick] = true;
        evaluated.push(problem.evaluate(&pool[pick])?);
        let newest = evaluated.len() - 1;

        let mut more = best.clone();
        more.push(newest);
        let vectors: Vec<&[f64]> = more.iter().map(|&i| &evaluated[i].objectives[..]).collect();
        let tmp: Vec<usize> = first_front_vectors(&vectors, schema.senses())
            .into_iter()
            .map(|k| more[k])
            .collect();
        // Both lists are in ascending evaluation order, so equal sets compare equal.
        if tmp == best {
            lives -= 1;
        } else {
            best = tmp;
        }
        trace.push(TraceRecord {
            chosen: pool[pick].id,
            lives,
            front_size: best.len(),
        });
    }

    Ok(RunResult {
        best: best.iter().map(|&i| evaluated[i].clone()).collect(),
        evals: evaluated.len(),
        evaluated,
        trace,
    })
}

fn fit_models(evaluated: &[crate::problem::EvaluatedPoint], schema: &ObjectiveSchema) -> Result<Vec<RegressionTree>> {
    let inputs: Vec<&[f64]> = evaluated.iter().map(|e| e.decisions()).collect();
    (0..schema.len())
        .map(|o| {
            let targets: Vec<f64> = evaluated.iter().map(|e| e.objectives[o]).collect();
            RegressionTree::fit(&inputs, &targets, TreeParams::default())
        })
        .collect()
}

/// Picks the most promising candidate under the surrogate models: the
/// predicted non-dominated set is narrowed to its highest
/// indicator-domination score, ties going to the lowest id.
pub fn what_to_evaluate_next<'a>(
    candidates: &'a [DecisionPoint],
    models: &[RegressionTree],
    schema: &ObjectiveSchema,
) -> Result<&'a DecisionPoint> {
    let refs: Vec<&DecisionPoint> = candidates.iter().collect();
    Ok(&candidates[select_next(&refs, models, schema)?])
}

fn select_next(candidates: &[&DecisionPoint], models: &[RegressionTree], schema: &ObjectiveSchema) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::Empty("candidates"));
    }
    if models.len() != schema.len() {
        return Err(Error::LengthMismatch {
            expected: schema.len(),
            got: models.len(),
        });
    }
    let mut predictions = Vec::with_capacity(candidates.len());
    for c in candidates {
        let row = models
            .iter()
            .map(|m| m.predict(&c.decisions))
            .collect::<Result<Vec<f64>>>()?;
        predictions.push(row);
    }
    let vectors: Vec<&[f64]> = predictions.iter().map(Vec::as_slice).collect();
    let front = first_front_vectors(&vectors, schema.senses());
    let front_vectors: Vec<&[f64]> = front.iter().map(|&i| vectors[i]).collect();
    let scores = scores_vectors(&front_vectors, schema.senses());
    let winner = (0..front.len())
        .max_by(|&a, &b| {
            scores[a]
                .cmp(&scores[b])
                .then(candidates[front[b]].id.cmp(&candidates[front[a]].id))
        })
        .expect("front of a nonempty set is nonempty");
    Ok(front[winner])
}
