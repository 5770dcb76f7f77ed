//! Multi-objective next release planning.
//!
//! A plan assigns each requirement to a release `1..=P` or leaves it out
//! (`0`). Objectives, with `score_i = Σ_j wt_j · importance(c_j, r_i)`:
//!
//! * `f1 = Σ_i (score_i · (P − x_i + 1) − risk_i · x_i) · y_i` (maximize)
//! * `f2 = Σ_i score_i · y_i` (maximize)
//! * `f3 = Σ_i cost_i · y_i` (minimize)
//!
//! A plan is feasible when every release stays within its budget and every
//! implemented requirement has its dependencies implemented no later.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::{index, SliceRandom};
use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::problem::{seeded_rng, Generator, ObjectiveSchema, ObjectiveVector, Problem, Sense};

/// A generated or loaded next-release instance. Dependencies are `(a, b)`
/// pairs meaning requirement `a` depends on requirement `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonrpInstance {
    releases: usize,
    cost: Vec<f64>,
    risk: Vec<f64>,
    weight: Vec<f64>,
    importance: Vec<Vec<f64>>,
    deps: Vec<(usize, usize)>,
    budget: Vec<f64>,
    score: Vec<f64>,
}

/// Release assignment per requirement; 0 means "not implemented".
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReleasePlan(pub Vec<usize>);

impl ReleasePlan {
    pub fn empty(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn to_decisions(&self) -> Vec<f64> {
        self.0.iter().map(|&r| r as f64).collect()
    }

    pub fn from_decisions(decisions: &[f64], releases: usize) -> Result<Self> {
        decisions
            .iter()
            .map(|&d| {
                if d.fract() == 0.0 && d >= 0.0 && d <= releases as f64 {
                    Ok(d as usize)
                } else {
                    Err(Error::invalid(format!("release value {d} is not in 0..={releases}")))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    OverBudget { release: usize, cost: f64, budget: f64 },
    /// `dependent` is implemented but `dependency` is missing or comes later.
    Precedence { dependent: usize, dependency: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

impl MonrpInstance {
    pub fn new(
        releases: usize,
        cost: Vec<f64>,
        risk: Vec<f64>,
        weight: Vec<f64>,
        importance: Vec<Vec<f64>>,
        deps: Vec<(usize, usize)>,
        budget: Vec<f64>,
    ) -> Result<Self> {
        let n = cost.len();
        if n == 0 || releases == 0 || weight.is_empty() {
            return Err(Error::invalid("requirement, release and client counts must be at least 1"));
        }
        if risk.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: risk.len() });
        }
        if importance.len() != weight.len() {
            return Err(Error::LengthMismatch {
                expected: weight.len(),
                got: importance.len(),
            });
        }
        if let Some(row) = importance.iter().find(|r| r.len() != n) {
            return Err(Error::LengthMismatch { expected: n, got: row.len() });
        }
        if budget.len() != releases {
            return Err(Error::LengthMismatch {
                expected: releases,
                got: budget.len(),
            });
        }
        let all_finite = cost.iter().chain(&risk).chain(&weight).chain(&budget).chain(importance.iter().flatten());
        if all_finite.clone().any(|v| !v.is_finite()) {
            return Err(Error::invalid("instance values must be finite"));
        }
        if cost.iter().chain(&weight).chain(&budget).any(|&v| v <= 0.0) {
            return Err(Error::invalid("costs, weights and budgets must be positive"));
        }
        if risk.iter().chain(importance.iter().flatten()).any(|&v| v < 0.0) {
            return Err(Error::invalid("risks and importances must be non-negative"));
        }
        if let Some(&(a, b)) = deps.iter().find(|&&(a, b)| a >= n || b >= n || a == b) {
            return Err(Error::invalid(format!("bad dependency {a} -> {b}")));
        }
        if has_cycle(n, &deps) {
            return Err(Error::invalid("dependencies contain a cycle"));
        }
        let score = (0..n)
            .map(|i| weight.iter().zip(&importance).map(|(w, row)| w * row[i]).sum())
            .collect();
        Ok(Self {
            releases,
            cost,
            risk,
            weight,
            importance,
            deps,
            budget,
            score,
        })
    }

    /// Seeded random instance named `N-P-M-dep%-funding%`.
    ///
    /// Costs are uniform integers in 1..=20, risks 1..=10, client weights
    /// 1..=5 and importances 0..=5. `⌊dep_pct·N/100⌋` distinct dependency
    /// edges point backwards along a random topological order. Every
    /// release gets `funding_pct/100 · Σ cost / P`.
    pub fn generate(
        requirements: usize,
        releases: usize,
        clients: usize,
        dep_pct: f64,
        funding_pct: f64,
        seed: u64,
    ) -> Result<Self> {
        if requirements == 0 || releases == 0 || clients == 0 {
            return Err(Error::invalid("N, P and M must be at least 1"));
        }
        if !(0.0..=100.0).contains(&dep_pct) {
            return Err(Error::invalid(format!("dependency percentage {dep_pct} outside [0, 100]")));
        }
        if !(funding_pct > 0.0 && funding_pct.is_finite()) {
            return Err(Error::invalid(format!("funding percentage {funding_pct} must be positive")));
        }
        let n = requirements;
        let edges = (dep_pct * n as f64 / 100.0).floor() as usize;
        let pairs = n * (n - 1) / 2;
        if edges > pairs {
            return Err(Error::invalid(format!(
                "{edges} dependency edges requested but only {pairs} pairs exist"
            )));
        }

        let mut rng = seeded_rng(seed);
        let cost: Vec<f64> = (0..n).map(|_| rng.random_range(1..=20) as f64).collect();
        let risk: Vec<f64> = (0..n).map(|_| rng.random_range(1..=10) as f64).collect();
        let weight: Vec<f64> = (0..clients).map(|_| rng.random_range(1..=5) as f64).collect();
        let importance: Vec<Vec<f64>> = (0..clients)
            .map(|_| (0..n).map(|_| rng.random_range(0..=5) as f64).collect())
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let deps = index::sample(&mut rng, pairs.max(1), edges)
            .into_iter()
            .map(|k| {
                let (earlier, later) = decode_pair(k);
                (order[later], order[earlier])
            })
            .collect();
        let total: f64 = cost.iter().sum();
        let budget = vec![funding_pct / 100.0 * total / releases as f64; releases];
        Self::new(releases, cost, risk, weight, importance, deps, budget)
    }

    pub fn requirements(&self) -> usize {
        self.cost.len()
    }

    pub fn releases(&self) -> usize {
        self.releases
    }

    pub fn clients(&self) -> usize {
        self.weight.len()
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn risk(&self) -> &[f64] {
        &self.risk
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn importance(&self) -> &[Vec<f64>] {
        &self.importance
    }

    pub fn deps(&self) -> &[(usize, usize)] {
        &self.deps
    }

    pub fn budget(&self) -> &[f64] {
        &self.budget
    }

    pub fn score(&self) -> &[f64] {
        &self.score
    }

    pub fn schema() -> ObjectiveSchema {
        ObjectiveSchema::new(
            vec!["f1".into(), "f2".into(), "f3".into()],
            vec![Sense::Max, Sense::Max, Sense::Min],
        )
        .expect("static schema")
    }

    fn check_plan(&self, plan: &ReleasePlan) -> Result<()> {
        if plan.0.len() != self.requirements() {
            return Err(Error::LengthMismatch {
                expected: self.requirements(),
                got: plan.0.len(),
            });
        }
        if let Some(&r) = plan.0.iter().find(|&&r| r > self.releases) {
            return Err(Error::invalid(format!("release {r} exceeds {}", self.releases)));
        }
        Ok(())
    }

    /// `(f1, f2, f3)`; feasibility is not checked.
    pub fn evaluate_plan(&self, plan: &ReleasePlan) -> Result<ObjectiveVector> {
        self.check_plan(plan)?;
        let p = self.releases as f64;
        let (mut f1, mut f2, mut f3) = (0.0, 0.0, 0.0);
        for (i, &x) in plan.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let x = x as f64;
            f1 += self.score[i] * (p - x + 1.0) - self.risk[i] * x;
            f2 += self.score[i];
            f3 += self.cost[i];
        }
        ObjectiveVector::new(vec![f1, f2, f3])
    }

    pub fn is_feasible(&self, plan: &ReleasePlan) -> Result<Feasibility> {
        self.check_plan(plan)?;
        let mut violations = Vec::new();
        let spent = self.release_costs(&plan.0);
        for k in 1..=self.releases {
            if spent[k] > self.budget[k - 1] {
                violations.push(Violation::OverBudget {
                    release: k,
                    cost: spent[k],
                    budget: self.budget[k - 1],
                });
            }
        }
        for &(a, b) in &self.deps {
            let (xa, xb) = (plan.0[a], plan.0[b]);
            if xa > 0 && (xb == 0 || xb > xa) {
                violations.push(Violation::Precedence {
                    dependent: a,
                    dependency: b,
                });
            }
        }
        Ok(Feasibility {
            feasible: violations.is_empty(),
            violations,
        })
    }

    /// Index 0 holds the (unconstrained) cost of unimplemented requirements.
    fn release_costs(&self, release: &[usize]) -> Vec<f64> {
        let mut spent = vec![0.0; self.releases + 1];
        for (i, &k) in release.iter().enumerate() {
            spent[k] += self.cost[i];
        }
        spent
    }

    pub fn random_valid_plan(&self, seed: u64) -> ReleasePlan {
        self.random_valid_plan_with(&mut seeded_rng(seed))
    }

    /// Uniform random assignment, then precedence repair (pull dependencies
    /// earlier, drop dependents whose dependency is missing), then random
    /// eviction from over-budget releases.
    pub fn random_valid_plan_with(&self, rng: &mut dyn RngCore) -> ReleasePlan {
        let mut x: Vec<usize> = (0..self.requirements())
            .map(|_| rng.random_range(0..=self.releases))
            .collect();

        let mut changed = true;
        while changed {
            changed = false;
            for &(a, b) in &self.deps {
                if x[a] == 0 {
                    continue;
                }
                if x[b] == 0 {
                    x[a] = 0;
                    changed = true;
                } else if x[b] > x[a] {
                    x[b] = x[a];
                    changed = true;
                }
            }
        }

        let mut spent = self.release_costs(&x);
        for k in 1..=self.releases {
            while spent[k] > self.budget[k - 1] {
                let members: Vec<usize> = (0..x.len()).filter(|&i| x[i] == k).collect();
                let out = members[rng.random_range(0..members.len())];
                x[out] = 0;
                spent[k] -= self.cost[out];
            }
        }
        self.drop_broken_dependents(&mut x);
        ReleasePlan(x)
    }

    /// Drops implemented requirements whose dependencies are missing or late,
    /// until none remain. Never increases any release's cost.
    fn drop_broken_dependents(&self, x: &mut [usize]) {
        let mut changed = true;
        while changed {
            changed = false;
            for &(a, b) in &self.deps {
                if x[a] > 0 && (x[b] == 0 || x[b] > x[a]) {
                    x[a] = 0;
                    changed = true;
                }
            }
        }
    }

    /// Deterministic repair for search operators: drop broken dependents,
    /// evict the lowest-score requirements from over-budget releases, then
    /// drop dependents broken by the evictions.
    pub fn repair_plan(&self, plan: &mut ReleasePlan) {
        let x = &mut plan.0;
        for r in x.iter_mut() {
            *r = (*r).min(self.releases);
        }
        self.drop_broken_dependents(x);
        let mut spent = self.release_costs(x);
        for k in 1..=self.releases {
            if spent[k] <= self.budget[k - 1] {
                continue;
            }
            let mut members: Vec<usize> = (0..x.len()).filter(|&i| x[i] == k).collect();
            members.sort_by(|&a, &b| self.score[a].total_cmp(&self.score[b]).then(a.cmp(&b)));
            for i in members {
                if spent[k] <= self.budget[k - 1] {
                    break;
                }
                x[i] = 0;
                spent[k] -= self.cost[i];
            }
        }
        self.drop_broken_dependents(x);
    }

    /// Wraps the instance as a generative [`Problem`] with decisions
    /// `r1..rN` and objectives `f1, f2, f3`.
    pub fn into_problem(self, name: impl Into<String>) -> Problem {
        let names = (1..=self.requirements()).map(|i| format!("r{i}")).collect();
        Problem::generative(name, names, Self::schema(), Arc::new(self)).expect("arity matches by construction")
    }
}

fn decode_pair(mut k: usize) -> (usize, usize) {
    let mut later = 1;
    while k >= later {
        k -= later;
        later += 1;
    }
    (k, later)
}

fn has_cycle(n: usize, deps: &[(usize, usize)]) -> bool {
    let mut indegree = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in deps {
        out[b].push(a);
        indegree[a] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut seen = 0;
    while let Some(v) = ready.pop() {
        seen += 1;
        for &w in &out[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.push(w);
            }
        }
    }
    seen != n
}

impl Generator for MonrpInstance {
    fn decision_arity(&self) -> usize {
        self.requirements()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        self.random_valid_plan_with(rng).to_decisions()
    }

    fn evaluate(&self, decisions: &[f64]) -> Result<Vec<f64>> {
        let plan = ReleasePlan::from_decisions(decisions, self.releases)?;
        self.evaluate_plan(&plan).map(ObjectiveVector::into_inner)
    }

    fn gene_values(&self, _index: usize) -> Vec<f64> {
        (0..=self.releases).map(|r| r as f64).collect()
    }

    fn repair(&self, decisions: &mut [f64]) {
        let mut plan = ReleasePlan(
            decisions
                .iter()
                .map(|d| d.round().clamp(0.0, self.releases as f64) as usize)
                .collect(),
        );
        self.repair_plan(&mut plan);
        for (d, r) in decisions.iter_mut().zip(&plan.0) {
            *d = *r as f64;
        }
    }
}

fn write_row(f: &mut fmt::Formatter<'_>, tag: &str, values: &[f64]) -> fmt::Result {
    write!(f, "{tag}")?;
    for v in values {
        write!(f, " {v}")?;
    }
    writeln!(f)
}

/// Line-oriented text form. Floats use the shortest representation that
/// parses back to the same bits.
impl fmt::Display for MonrpInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "monrp {} {} {}", self.requirements(), self.releases, self.clients())?;
        write_row(f, "cost", &self.cost)?;
        write_row(f, "risk", &self.risk)?;
        write_row(f, "weight", &self.weight)?;
        for row in &self.importance {
            write_row(f, "importance", row)?;
        }
        for (a, b) in &self.deps {
            writeln!(f, "dep {a} {b}")?;
        }
        write_row(f, "budget", &self.budget)
    }
}

impl FromStr for MonrpInstance {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            source_name: "monrp".into(),
            line,
            column: 0,
            message,
        };
        let mut header = None;
        let (mut cost, mut risk, mut weight, mut budget) = (None, None, None, None);
        let mut importance = Vec::new();
        let mut deps = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let mut words = line.split_whitespace();
            let Some(tag) = words.next() else { continue };
            let rest: Vec<&str> = words.collect();
            let floats = || -> Result<Vec<f64>> {
                rest.iter()
                    .map(|w| w.parse::<f64>().map_err(|_| err(lineno, format!("bad number {w:?}"))))
                    .collect()
            };
            let ints = || -> Result<Vec<usize>> {
                rest.iter()
                    .map(|w| w.parse::<usize>().map_err(|_| err(lineno, format!("bad integer {w:?}"))))
                    .collect()
            };
            match tag {
                "monrp" => {
                    let v = ints()?;
                    if v.len() != 3 {
                        return Err(err(lineno, "header needs N P M".into()));
                    }
                    header = Some((v[0], v[1], v[2]));
                }
                "cost" => cost = Some(floats()?),
                "risk" => risk = Some(floats()?),
                "weight" => weight = Some(floats()?),
                "importance" => importance.push(floats()?),
                "budget" => budget = Some(floats()?),
                "dep" => {
                    let v = ints()?;
                    if v.len() != 2 {
                        return Err(err(lineno, "dep needs two indices".into()));
                    }
                    deps.push((v[0], v[1]));
                }
                other => return Err(err(lineno, format!("unknown record {other:?}"))),
            }
        }
        let (n, p, m) = header.ok_or_else(|| err(1, "missing monrp header".into()))?;
        let missing = |what: &str| err(0, format!("missing {what} record"));
        let inst = Self::new(
            p,
            cost.ok_or_else(|| missing("cost"))?,
            risk.ok_or_else(|| missing("risk"))?,
            weight.ok_or_else(|| missing("weight"))?,
            importance,
            deps,
            budget.ok_or_else(|| missing("budget"))?,
        )?;
        if inst.requirements() != n || inst.clients() != m {
            return Err(err(1, "header counts disagree with the records".into()));
        }
        Ok(inst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn tiny(score_weight: f64, importance: f64, risk: f64, cost: f64, budget: f64, releases: usize) -> MonrpInstance {
        MonrpInstance::new(
            releases,
            vec![cost],
            vec![risk],
            vec![score_weight],
            vec![vec![importance]],
            vec![],
            vec![budget; releases],
        )
        .unwrap()
    }

    #[test]
    fn generated_variants_match_their_names() {
        let n1 = MonrpInstance::generate(50, 4, 5, 0.0, 110.0, 7).unwrap();
        assert!(n1.deps().is_empty());
        let total: f64 = n1.cost().iter().sum();
        for b in n1.budget() {
            assert_eq!(*b, 1.10 * total / 4.0);
        }
        let n3 = MonrpInstance::generate(50, 4, 5, 4.0, 90.0, 7).unwrap();
        assert_eq!(n3.deps().len(), 2);
        let total: f64 = n3.cost().iter().sum();
        assert!(n3.budget().iter().all(|&b| b == 0.90 * total / 4.0));
        let dense = MonrpInstance::generate(10, 3, 2, 100.0, 100.0, 1).unwrap();
        assert_eq!(dense.deps().len(), 10);
        assert!(!has_cycle(10, dense.deps()));
        let mut d = dense.deps().to_vec();
        d.sort_unstable();
        d.dedup();
        assert_eq!(d.len(), 10);
        assert_eq!(
            MonrpInstance::generate(10, 3, 2, 30.0, 90.0, 5).unwrap(),
            MonrpInstance::generate(10, 3, 2, 30.0, 90.0, 5).unwrap()
        );
    }

    #[test]
    fn attribute_ranges() {
        let inst = MonrpInstance::generate(200, 3, 6, 10.0, 100.0, 2).unwrap();
        assert!(inst.cost().iter().all(|&c| (1.0..=20.0).contains(&c) && c.fract() == 0.0));
        assert!(inst.risk().iter().all(|&c| (1.0..=10.0).contains(&c)));
        assert!(inst.weight().iter().all(|&c| (1.0..=5.0).contains(&c)));
        assert!(inst.importance().iter().flatten().all(|&c| (0.0..=5.0).contains(&c)));
    }

    #[test]
    fn generate_rejects_bad_parameters() {
        assert!(MonrpInstance::generate(0, 4, 5, 0.0, 100.0, 0).is_err());
        assert!(MonrpInstance::generate(5, 4, 5, 101.0, 100.0, 0).is_err());
        assert!(MonrpInstance::generate(5, 4, 5, 10.0, 0.0, 0).is_err());
        assert!(MonrpInstance::generate(2, 1, 1, 100.0, 100.0, 0).is_err());
    }

    #[test]
    fn objective_examples() {
        let inst = MonrpInstance::generate(8, 4, 3, 25.0, 100.0, 3).unwrap();
        let zero = inst.evaluate_plan(&ReleasePlan::empty(8)).unwrap();
        assert_eq!(zero.values(), &[0.0, 0.0, 0.0]);

        // score = 3·4 = 12, risk 5, cost 7.
        let one = tiny(3.0, 4.0, 5.0, 7.0, 100.0, 4);
        let v = one.evaluate_plan(&ReleasePlan(vec![1])).unwrap();
        assert_eq!(v.values(), &[4.0 * 12.0 - 5.0, 12.0, 7.0]);
        let late = one.evaluate_plan(&ReleasePlan(vec![4])).unwrap();
        assert_eq!(v[0] - late[0], 3.0 * (12.0 + 5.0));
        assert!(one.evaluate_plan(&ReleasePlan(vec![1, 0])).is_err());
        assert!(one.evaluate_plan(&ReleasePlan(vec![5])).is_err());
    }

    #[test]
    fn feasibility_examples() {
        let inst = MonrpInstance::new(
            2,
            vec![4.0, 6.0],
            vec![1.0, 1.0],
            vec![1.0],
            vec![vec![1.0, 1.0]],
            vec![(0, 1)],
            vec![10.0, 10.0],
        )
        .unwrap();
        assert!(inst.is_feasible(&ReleasePlan(vec![0, 0])).unwrap().feasible);
        let f = inst.is_feasible(&ReleasePlan(vec![1, 0])).unwrap();
        assert_eq!(
            f.violations,
            vec![Violation::Precedence { dependent: 0, dependency: 1 }]
        );
        let late = inst.is_feasible(&ReleasePlan(vec![1, 2])).unwrap();
        assert!(!late.feasible);
        // Budget boundary is inclusive.
        assert!(inst.is_feasible(&ReleasePlan(vec![1, 1])).unwrap().feasible);
        let single = tiny(1.0, 1.0, 1.0, 5.0, 5.0, 1);
        assert!(single.is_feasible(&ReleasePlan(vec![1])).unwrap().feasible);
        let over = tiny(1.0, 1.0, 1.0, 5.0, 4.5, 1);
        assert!(matches!(
            over.is_feasible(&ReleasePlan(vec![1])).unwrap().violations[..],
            [Violation::OverBudget { release: 1, .. }]
        ));
    }

    #[test]
    fn cyclic_dependencies_rejected() {
        let r = MonrpInstance::new(
            1,
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![1.0],
            vec![vec![1.0, 1.0]],
            vec![(0, 1), (1, 0)],
            vec![5.0],
        );
        assert!(r.is_err());
    }

    #[test]
    fn unconstrained_sampling_needs_no_repair() {
        let inst = MonrpInstance::generate(30, 4, 3, 0.0, 1000.0, 5).unwrap();
        let mut rng = seeded_rng(11);
        let raw: Vec<usize> = (0..30).map(|_| rng.random_range(0..=4)).collect();
        assert_eq!(inst.random_valid_plan(11).0, raw);
        assert_eq!(inst.random_valid_plan(11), inst.random_valid_plan(11));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let mut inst = MonrpInstance::generate(12, 3, 4, 50.0, 97.3, 8).unwrap();
        inst.risk[0] = 0.1 + 0.2;
        let text = inst.to_string();
        let back: MonrpInstance = text.parse().unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.to_string(), text);
        assert!("monrp 1 1 1\ncost 1\n".parse::<MonrpInstance>().is_err());
        assert!("bogus".parse::<MonrpInstance>().is_err());
    }

    #[test]
    fn generative_problem_wrapper() {
        let inst = MonrpInstance::generate(20, 3, 2, 20.0, 90.0, 4).unwrap();
        let mut p = inst.clone().into_problem("n");
        let pool = p.sample_pool(50, 1).unwrap();
        assert_eq!(pool.len(), 50);
        for d in &pool {
            let plan = ReleasePlan::from_decisions(&d.decisions, 3).unwrap();
            assert!(inst.is_feasible(&plan).unwrap().feasible);
        }
        let e = p.evaluate(&pool[0]).unwrap();
        assert_eq!(e.objectives.len(), 3);
        assert_eq!(p.eval_count(), 1);
    }

    fn instance() -> impl Strategy<Value = MonrpInstance> {
        (1usize..25, 1usize..6, 1usize..4, 0u8..=100, 50u8..150, any::<u64>()).prop_map(|(n, p, m, d, f, seed)| {
            let d = (d as usize).min(if n > 1 { 100 * (n - 1) / 2 } else { 0 });
            MonrpInstance::generate(n, p, m, d as f64, f as f64, seed).unwrap()
        })
    }

    proptest! {
        #[test]
        fn sampled_and_repaired_plans_are_feasible(inst in instance(), seed in any::<u64>()) {
            let plan = inst.random_valid_plan(seed);
            prop_assert!(inst.is_feasible(&plan).unwrap().feasible);
            let mut rng = seeded_rng(seed ^ 0x5eed);
            let mut junk = ReleasePlan((0..inst.requirements()).map(|_| rng.random_range(0..=inst.releases())).collect());
            inst.repair_plan(&mut junk);
            prop_assert!(inst.is_feasible(&junk).unwrap().feasible);
        }

        #[test]
        fn adding_a_requirement_never_lowers_cost(inst in instance(), seed in any::<u64>()) {
            let mut plan = inst.random_valid_plan(seed);
            if let Some(i) = plan.0.iter().position(|&r| r == 0) {
                let before = inst.evaluate_plan(&plan).unwrap()[2];
                plan.0[i] = 1;
                prop_assert!(inst.evaluate_plan(&plan).unwrap()[2] >= before);
            }
        }

        #[test]
        fn delaying_by_one_release_costs_score_plus_risk(inst in instance(), seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
            let mut plan = inst.random_valid_plan(seed);
            let i = pick.index(inst.requirements());
            plan.0[i] = plan.0[i].clamp(1, inst.releases());
            if plan.0[i] < inst.releases() {
                let before = inst.evaluate_plan(&plan).unwrap()[0];
                plan.0[i] += 1;
                let after = inst.evaluate_plan(&plan).unwrap()[0];
                prop_assert_eq!(after - before, -(inst.score()[i] + inst.risk()[i]));
            }
        }
    }
}
