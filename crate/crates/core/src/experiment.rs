//! Seeded multi-repeat experiments, the results file format, and the
//! routines behind the `flash` command-line tool.
//!
//! Repeat `r` uses seed `base + r` for its candidate pool and every
//! optimizer. Each optimizer gets its own problem instance, so evaluation
//! counts never leak between them. After all repeats finish, the best sets
//! of every run are pooled into one reference front, and GD/IGD are computed
//! for each run against it.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index;
use rayon::prelude::*;

use crate::dominance::first_front;
use crate::domtree::{build_domination_tree, tree_stats};
use crate::error::{Error, Result};
use crate::flash::{run_flash, FlashConfig};
use crate::metrics::{gd, igd, reference_front};
use crate::monrp::MonrpInstance;
use crate::nsga2::{run_nsga2, Nsga2Config};
use crate::problem::{load_tabular, parse_tabular, seeded_rng, DecisionPoint, EvaluatedPoint, Problem};
use crate::run::RunResult;
use crate::stats::{median, scott_knott};
use crate::sway::{run_sway, SwayConfig};
use crate::synth::synthetic;

pub const RESULTS_HEADER: &str = "run,algo,evals,gd,igd,wall_ms";

/// Where a problem comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSource {
    Tabular(PathBuf),
    /// `monrp:N-P-M-dep-funding`
    Monrp {
        requirements: usize,
        releases: usize,
        clients: usize,
        dep_pct: f64,
        funding_pct: f64,
    },
    /// `monrp-file:<path>`, a serialized instance.
    MonrpFile(PathBuf),
    /// `synth:<name>`
    Synthetic(String),
}

impl FromStr for ProblemSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("monrp:") {
            let parts: Vec<&str> = rest.split('-').collect();
            let bad = || Error::invalid(format!("expected monrp:N-P-M-dep-funding, got {s:?}"));
            if parts.len() != 5 {
                return Err(bad());
            }
            let int = |i: usize| parts[i].parse::<usize>().map_err(|_| bad());
            let real = |i: usize| parts[i].parse::<f64>().map_err(|_| bad());
            Ok(Self::Monrp {
                requirements: int(0)?,
                releases: int(1)?,
                clients: int(2)?,
                dep_pct: real(3)?,
                funding_pct: real(4)?,
            })
        } else if let Some(path) = s.strip_prefix("monrp-file:") {
            Ok(Self::MonrpFile(path.into()))
        } else if let Some(name) = s.strip_prefix("synth:") {
            Ok(Self::Synthetic(name.to_owned()))
        } else if s.is_empty() {
            Err(Error::invalid("empty problem source"))
        } else {
            Ok(Self::Tabular(s.into()))
        }
    }
}

impl ProblemSource {
    /// Loads or builds the problem. Generated instances use `seed`;
    /// synthetics get `pool` rows.
    pub fn load(&self, pool: usize, seed: u64) -> Result<Problem> {
        match self {
            Self::Tabular(path) => load_tabular(path),
            Self::Monrp {
                requirements,
                releases,
                clients,
                dep_pct,
                funding_pct,
            } => {
                let inst = MonrpInstance::generate(*requirements, *releases, *clients, *dep_pct, *funding_pct, seed)?;
                Ok(inst.into_problem(format!(
                    "monrp-{requirements}-{releases}-{clients}-{dep_pct}-{funding_pct}"
                )))
            }
            Self::MonrpFile(path) => {
                let inst: MonrpInstance = fs::read_to_string(path)?.parse()?;
                let name = path
                    .file_stem()
                    .map_or_else(|| "monrp".to_owned(), |s| s.to_string_lossy().into_owned());
                Ok(inst.into_problem(name))
            }
            Self::Synthetic(name) => synthetic(name, pool),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Flash,
    Sway,
    Nsga2,
    Random,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Self::Flash, Self::Sway, Self::Nsga2, Self::Random];

    pub fn name(self) -> &'static str {
        match self {
            Self::Flash => "flash",
            Self::Sway => "sway",
            Self::Nsga2 => "nsga2",
            Self::Random => "random",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown algorithm {s:?}; expected flash, sway, nsga2 or random")))
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub source: ProblemSource,
    pub algorithms: Vec<Algorithm>,
    pub repeats: usize,
    pub seed: u64,
    pub pool: usize,
    pub flash: FlashConfig,
    pub nsga2: Nsga2Config,
    /// Evaluation budget for random search when flash is not run alongside.
    pub random_budget: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(source: ProblemSource, algorithms: Vec<Algorithm>) -> Self {
        Self {
            source,
            algorithms,
            repeats: 20,
            seed: 0,
            pool: 10_000,
            flash: FlashConfig::default(),
            nsga2: Nsga2Config::default(),
            random_budget: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::invalid("repeats must be at least 1"));
        }
        if self.pool == 0 {
            return Err(Error::invalid("pool size must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::invalid("no algorithms given"));
        }
        let mut seen = self.algorithms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.algorithms.len() {
            return Err(Error::invalid("an algorithm is listed twice"));
        }
        if self.algorithms.contains(&Algorithm::Random)
            && !self.algorithms.contains(&Algorithm::Flash)
            && self.random_budget.is_none()
        {
            return Err(Error::invalid(
                "random search needs flash in the same experiment or an explicit budget",
            ));
        }
        self.flash.validate()?;
        self.nsga2.validate()
    }
}

/// One optimizer run within an experiment.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub run: usize,
    pub algo: Algorithm,
    pub evals: usize,
    pub gd: f64,
    pub igd: f64,
    pub wall_ms: f64,
    pub result: RunResult,
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub problem: Problem,
    /// Sorted by `(run, algorithm name)`.
    pub records: Vec<RunRecord>,
}

/// Runs every algorithm on every repeat and scores all runs against the
/// pooled reference front. Repeats run in parallel; the output does not
/// depend on scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Experiment> {
    spec.validate()?;
    let problem = spec.source.load(spec.pool, spec.seed)?;
    let pool_size = match problem.table() {
        Some(t) => spec.pool.min(t.len()),
        None => spec.pool,
    };

    let per_repeat: Vec<Vec<RunRecord>> = (0..spec.repeats)
        .into_par_iter()
        .map(|r| run_repeat(spec, &problem, pool_size, r))
        .collect::<Result<_>>()?;
    let mut records: Vec<RunRecord> = per_repeat.into_iter().flatten().collect();
    records.sort_by(|a, b| (a.run, a.algo.name()).cmp(&(b.run, b.algo.name())));

    let everything: Vec<&[f64]> = records
        .iter()
        .flat_map(|rec| rec.result.best.iter().map(|p| &p.objectives[..]))
        .collect();
    let reference = reference_front(&everything, problem.schema())?;
    let scores: Vec<(f64, f64)> = records
        .par_iter()
        .map(|rec| {
            let best: Vec<&[f64]> = rec.result.best.iter().map(|p| &p.objectives[..]).collect();
            Ok((gd(&best, &reference, problem.schema())?, igd(&best, &reference, problem.schema())?))
        })
        .collect::<Result<_>>()?;
    for (rec, (g, i)) in records.iter_mut().zip(scores) {
        rec.gd = g;
        rec.igd = i;
    }
    Ok(Experiment { problem, records })
}

fn run_repeat(spec: &ExperimentSpec, problem: &Problem, pool_size: usize, run: usize) -> Result<Vec<RunRecord>> {
    let seed = spec.seed.wrapping_add(run as u64);
    let pool = problem.sample_pool(pool_size, seed)?;
    // Random search borrows flash's budget, so flash goes first.
    let mut order = spec.algorithms.clone();
    order.sort();
    let mut flash_evals = None;
    let mut out = Vec::with_capacity(order.len());
    for algo in order {
        let mut instance = problem.fresh();
        let started = Instant::now();
        let result = match algo {
            Algorithm::Flash => run_flash(&mut instance, &pool, FlashConfig { seed, ..spec.flash })?,
            Algorithm::Sway => run_sway(&mut instance, &pool, SwayConfig::with_seed(seed))?,
            Algorithm::Nsga2 => run_nsga2(&mut instance, Nsga2Config { seed, ..spec.nsga2 })?,
            Algorithm::Random => {
                let budget = flash_evals.or(spec.random_budget).expect("validated");
                cmd_random(&mut instance, &pool, budget, seed)?
            }
        };
        let wall_ms = started.elapsed().as_secs_f64() * 1000.0;
        if algo == Algorithm::Flash {
            flash_evals = Some(result.evals);
        }
        out.push(RunRecord {
            run,
            algo,
            evals: result.evals,
            gd: f64::NAN,
            igd: f64::NAN,
            wall_ms,
            result,
        });
    }
    Ok(out)
}

/// Evaluates `budget` pool points chosen uniformly without replacement.
pub fn cmd_random(problem: &mut Problem, pool: &[DecisionPoint], budget: usize, seed: u64) -> Result<RunResult> {
    if budget == 0 {
        return Err(Error::invalid("random search budget must be at least 1"));
    }
    if budget > pool.len() {
        return Err(Error::invalid(format!(
            "random search budget {budget} exceeds the pool of {}",
            pool.len()
        )));
    }
    let mut rng = seeded_rng(seed);
    let evaluated = index::sample(&mut rng, pool.len(), budget)
        .into_iter()
        .map(|i| problem.evaluate(&pool[i]))
        .collect::<Result<Vec<_>>>()?;
    let front = first_front(&evaluated, problem.schema())?;
    Ok(RunResult {
        best: front.iter().map(|&i| evaluated[i].clone()).collect(),
        evals: evaluated.len(),
        evaluated,
        trace: Vec::new(),
    })
}

/// The results table. `wall_ms` is written as 0 unless `timing` is set, so
/// that identical specs produce identical files.
pub fn results_csv(records: &[RunRecord], timing: bool) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in records {
        let wall = if timing { r.wall_ms } else { 0.0 };
        let _ = writeln!(out, "{},{},{},{:.6},{:.6},{:.6}", r.run, r.algo, r.evals, r.gd, r.igd, wall);
    }
    out
}

/// Evaluated points in tabular form: decision columns, then objective
/// columns prefixed with their sense. Rows follow evaluation order.
pub fn points_csv(problem: &Problem, points: &[EvaluatedPoint]) -> String {
    let schema = problem.schema();
    let mut header: Vec<String> = problem.decision_names().to_vec();
    header.extend(
        schema
            .names()
            .iter()
            .zip(schema.senses())
            .map(|(n, s)| format!("{}{n}", s.prefix())),
    );
    let mut out = header.join(",");
    out.push('\n');
    for p in points {
        let cells: Vec<String> = p
            .decisions()
            .iter()
            .chain(p.objectives.iter())
            .map(|v| v.to_string())
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn run_file(dir: &Path, run: usize, algo: Algorithm) -> PathBuf {
    dir.join("runs").join(format!("run{run}_{algo}.csv"))
}

/// Runs the experiment and writes the results file plus one points file per
/// run under `runs/` next to it.
pub fn cmd_run(spec: &ExperimentSpec, out: &Path, timing: bool) -> Result<Experiment> {
    let exp = run_experiment(spec)?;
    let dir = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir.join("runs"))?;
    for rec in &exp.records {
        fs::write(run_file(dir, rec.run, rec.algo), points_csv(&exp.problem, &rec.result.evaluated))?;
    }
    fs::write(out, results_csv(&exp.records, timing))?;
    Ok(exp)
}

/// Domination tree of one run's evaluated points, followed by a
/// `nodes=<n> leaves=<l>` line.
pub fn cmd_tree(dir: &Path, run: usize, algo: Algorithm) -> Result<String> {
    let path = run_file(dir, run, algo);
    let text = fs::read_to_string(&path)?;
    let problem = parse_tabular(&text, &path.display().to_string())?;
    let table = problem.table().expect("parsed problems are tabular");
    let points: Vec<EvaluatedPoint> = (0..table.len())
        .map(|row| EvaluatedPoint {
            point: table.point(row),
            objectives: table.objectives(row).clone(),
            eval_index: row,
        })
        .collect();
    tree_report(&problem, &points)
}

pub fn tree_report(problem: &Problem, points: &[EvaluatedPoint]) -> Result<String> {
    let dt = build_domination_tree(points, problem.schema(), problem.decision_names())?;
    let (nodes, leaves) = tree_stats(&dt);
    let mut out = dt.render();
    let _ = writeln!(out, "nodes={nodes} leaves={leaves}");
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    Gd,
    Igd,
    Evals,
}

impl Measure {
    pub fn column(self) -> &'static str {
        match self {
            Self::Gd => "gd",
            Self::Igd => "igd",
            Self::Evals => "evals",
        }
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gd" => Ok(Self::Gd),
            "igd" => Ok(Self::Igd),
            "evals" => Ok(Self::Evals),
            _ => Err(Error::invalid(format!("unknown measure {s:?}; expected gd, igd or evals"))),
        }
    }
}

/// Samples of `measure` per algorithm, in first-appearance order.
pub fn read_measure(text: &str, measure: Measure, source_name: &str) -> Result<Vec<(String, Vec<f64>)>> {
    let err = |line: usize, column: usize, message: String| Error::Parse {
        source_name: source_name.to_owned(),
        line,
        column,
        message,
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| err(1, 0, "missing header".into()))?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |col: &str| {
        names
            .iter()
            .position(|n| *n == col)
            .ok_or_else(|| err(1, 0, format!("missing {col:?} column")))
    };
    let algo_col = find("algo")?;
    let value_col = find(measure.column())?;
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for (i, line) in lines {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != names.len() {
            return Err(err(i + 1, 0, format!("expected {} cells, found {}", names.len(), cells.len())));
        }
        let value: f64 = cells[value_col]
            .parse()
            .map_err(|_| err(i + 1, value_col + 1, format!("not a number: {:?}", cells[value_col])))?;
        let algo = cells[algo_col];
        match groups.iter_mut().find(|(a, _)| a == algo) {
            Some((_, v)) => v.push(value),
            None => groups.push((algo.to_owned(), vec![value])),
        }
    }
    if groups.is_empty() {
        return Err(err(1, 0, "no result rows".into()));
    }
    Ok(groups)
}

/// `100 · value / baseline`, with `inf` for a zero baseline under a nonzero
/// value and 100 when both are zero.
pub fn percent_of(value: f64, baseline: f64) -> String {
    if baseline == 0.0 {
        if value == 0.0 {
            "100.0".into()
        } else {
            "inf".into()
        }
    } else {
        format!("{:.1}", 100.0 * value / baseline)
    }
}

/// Scott-Knott table of one measure (smaller is better). Rows are in rank
/// order: `rank,algo,median,pct` where `pct` is the median as a percentage
/// of the baseline algorithm's median. The baseline defaults to the first
/// algorithm in the file.
pub fn cmd_stats(path: &Path, measure: Measure, baseline: Option<&str>) -> Result<String> {
    let text = fs::read_to_string(path)?;
    stats_report(&text, measure, baseline, &path.display().to_string())
}

pub fn stats_report(text: &str, measure: Measure, baseline: Option<&str>, source_name: &str) -> Result<String> {
    let groups = read_measure(text, measure, source_name)?;
    let baseline = baseline.unwrap_or(&groups[0].0).to_owned();
    let base_median = groups
        .iter()
        .find(|(a, _)| *a == baseline)
        .map(|(_, v)| median(v))
        .ok_or_else(|| Error::invalid(format!("baseline {baseline:?} not found in results")))?;
    let ranked = scott_knott(groups, true)?;
    let mut out = format!("rank,algo,median,pct_of_{baseline}\n");
    for g in &ranked.groups {
        let _ = writeln!(out, "{},{},{:.6},{}", g.rank, g.label, g.median, percent_of(g.median, base_median));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sources_and_algorithms() {
        assert_eq!(
            "monrp:50-4-5-0-110".parse::<ProblemSource>().unwrap(),
            ProblemSource::Monrp {
                requirements: 50,
                releases: 4,
                clients: 5,
                dep_pct: 0.0,
                funding_pct: 110.0
            }
        );
        assert!("monrp:50-4-5".parse::<ProblemSource>().is_err());
        assert_eq!(
            "synth:line".parse::<ProblemSource>().unwrap(),
            ProblemSource::Synthetic("line".into())
        );
        assert_eq!(
            "data/x.csv".parse::<ProblemSource>().unwrap(),
            ProblemSource::Tabular("data/x.csv".into())
        );
        assert_eq!("nsga2".parse::<Algorithm>().unwrap(), Algorithm::Nsga2);
        assert!("ga".parse::<Algorithm>().is_err());
        assert!("hv".parse::<Measure>().is_err());
    }

    #[test]
    fn random_search_examples() {
        let mut p = synthetic("sphere2", 60).unwrap();
        let pool = p.sample_pool(60, 1).unwrap();
        let one = cmd_random(&mut p.fresh(), &pool, 1, 3).unwrap();
        assert_eq!(one.evals, 1);
        assert_eq!(one.best.len(), 1);
        assert_eq!(one.best[0], one.evaluated[0]);

        let all = cmd_random(&mut p, &pool, 60, 3).unwrap();
        assert_eq!(all.evals, 60);
        assert_eq!(p.eval_count(), 60);
        let mut ids: Vec<usize> = all.best.iter().map(|e| e.id()).collect();
        ids.sort_unstable();
        let table = p.table().unwrap();
        let mut truth: Vec<usize> = (0..60)
            .filter(|&i| {
                !(0..60).any(|j| {
                    crate::dominance::binary_dominates(table.objectives(j), table.objectives(i), p.schema()).unwrap()
                })
            })
            .collect();
        truth.sort_unstable();
        assert_eq!(ids, truth);
        assert!(cmd_random(&mut p.fresh(), &pool, 61, 3).is_err());
        assert!(cmd_random(&mut p.fresh(), &pool, 0, 3).is_err());
    }

    #[test]
    fn percentages() {
        assert_eq!(percent_of(5.0, 10.0), "50.0");
        assert_eq!(percent_of(3.0, 0.0), "inf");
        assert_eq!(percent_of(0.0, 0.0), "100.0");
    }

    #[test]
    fn spec_validation() {
        let mut spec = ExperimentSpec::new(ProblemSource::Synthetic("line".into()), vec![Algorithm::Random]);
        assert!(spec.validate().is_err());
        spec.random_budget = Some(5);
        assert!(spec.validate().is_ok());
        spec.repeats = 0;
        assert!(spec.validate().is_err());
        let dup = ExperimentSpec::new(ProblemSource::Synthetic("line".into()), vec![Algorithm::Sway, Algorithm::Sway]);
        assert!(dup.validate().is_err());
    }

    #[test]
    fn small_experiment_shares_one_reference_front() {
        let mut spec = ExperimentSpec::new(
            ProblemSource::Synthetic("sphere2".into()),
            vec![Algorithm::Random, Algorithm::Flash, Algorithm::Sway],
        );
        spec.repeats = 3;
        spec.pool = 200;
        let exp = run_experiment(&spec).unwrap();
        assert_eq!(exp.records.len(), 9);
        let keys: Vec<(usize, &str)> = exp.records.iter().map(|r| (r.run, r.algo.name())).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        for run in 0..3 {
            let flash = exp.records.iter().find(|r| r.run == run && r.algo == Algorithm::Flash).unwrap();
            let random = exp.records.iter().find(|r| r.run == run && r.algo == Algorithm::Random).unwrap();
            assert_eq!(flash.evals, random.evals);
        }
        let union: Vec<Vec<f64>> = exp
            .records
            .iter()
            .flat_map(|r| r.result.best.iter().map(|p| p.objectives.values().to_vec()))
            .collect();
        let reference = reference_front(&union, exp.problem.schema()).unwrap();
        for rec in &exp.records {
            let best: Vec<Vec<f64>> = rec.result.best.iter().map(|p| p.objectives.values().to_vec()).collect();
            assert_eq!(rec.gd, gd(&best, &reference, exp.problem.schema()).unwrap());
            assert_eq!(rec.igd, igd(&best, &reference, exp.problem.schema()).unwrap());
        }
        assert!(exp.records.iter().all(|r| r.gd >= 0.0 && r.igd >= 0.0));
        let again = run_experiment(&spec).unwrap();
        assert_eq!(results_csv(&exp.records, false), results_csv(&again.records, false));
    }

    #[test]
    fn stats_table() {
        let text = "run,algo,evals,gd,igd,wall_ms\n0,a,10,0.1,0.2,0\n1,a,12,0.1,0.2,0\n0,b,100,0.1,0.2,0\n1,b,110,0.1,0.2,0\n";
        let out = stats_report(text, Measure::Evals, Some("b"), "t").unwrap();
        assert_eq!(out, "rank,algo,median,pct_of_b\n1,a,11.000000,10.5\n2,b,105.000000,100.0\n");
        assert!(stats_report(text, Measure::Evals, Some("zzz"), "t").is_err());
        assert!(stats_report("run,algo,evals\n0,a,1\n", Measure::Gd, None, "t").is_err());
    }
}
