//! Shared domain types: objective schemas, decision and objective vectors,
//! and the [`Problem`] abstraction with its evaluation counter.
//!
//! A problem is either *tabular* (a finite pool of rows whose objectives were
//! measured ahead of time) or *generative* (a sampler plus an evaluator, such
//! as a next-release planning instance).

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::ops::Deref;
use std::path::Path;
use std::sync::Arc;

use rand::seq::index;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Builds the deterministic RNG used by every seeded operation in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Optimization direction of one objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    /// The `w_j` weight of the exponential indicator: −1 for minimized
    /// objectives, +1 for maximized ones.
    pub fn weight(self) -> f64 {
        match self {
            Sense::Min => -1.0,
            Sense::Max => 1.0,
        }
    }

    /// Value mapped into "smaller is better" space.
    #[inline]
    pub(crate) fn orient(self, v: f64) -> f64 {
        match self {
            Sense::Min => v,
            Sense::Max => -v,
        }
    }

    pub fn prefix(self) -> char {
        match self {
            Sense::Min => '-',
            Sense::Max => '+',
        }
    }
}

/// Names and optimization senses of a problem's objectives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectiveSchema {
    names: Vec<String>,
    senses: Vec<Sense>,
}

impl ObjectiveSchema {
    pub fn new(names: Vec<String>, senses: Vec<Sense>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Empty("objective schema"));
        }
        if names.len() != senses.len() {
            return Err(Error::LengthMismatch {
                expected: names.len(),
                got: senses.len(),
            });
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::invalid(format!("duplicate objective name {n:?}")));
            }
        }
        Ok(Self { names, senses })
    }

    /// Schema with generated names `f1..fn` and the given senses.
    pub fn from_senses(senses: &[Sense]) -> Self {
        let names = (1..=senses.len()).map(|i| format!("f{i}")).collect();
        Self::new(names, senses.to_vec()).expect("generated names are unique and nonempty")
    }

    pub fn len(&self) -> usize {
        self.senses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.senses.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn senses(&self) -> &[Sense] {
        &self.senses
    }

    pub(crate) fn check(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: v.len(),
            });
        }
        match v.iter().position(|x| !x.is_finite()) {
            Some(index) => Err(Error::NonFinite { index, value: v[index] }),
            None => Ok(()),
        }
    }
}

/// A point of the decision space. Categorical decisions are stored as their
/// integer codes.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionPoint {
    pub id: usize,
    pub decisions: Vec<f64>,
}

impl DecisionPoint {
    pub fn new(id: usize, decisions: Vec<f64>) -> Self {
        Self { id, decisions }
    }
}

/// Finite objective values, aligned with an [`ObjectiveSchema`].
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for ObjectiveVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for ObjectiveVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// A decision point together with its measured objectives and the position
/// of that measurement in the run's evaluation order.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluatedPoint {
    pub point: DecisionPoint,
    pub objectives: ObjectiveVector,
    pub eval_index: usize,
}

impl EvaluatedPoint {
    pub fn id(&self) -> usize {
        self.point.id
    }

    pub fn decisions(&self) -> &[f64] {
        &self.point.decisions
    }
}

/// Sampler plus evaluator for problems whose decision space is not a fixed
/// table.
pub trait Generator: fmt::Debug + Send + Sync {
    fn decision_arity(&self) -> usize;

    /// Draws one valid decision vector.
    fn sample(&self, rng: &mut dyn RngCore) -> Vec<f64>;

    fn evaluate(&self, decisions: &[f64]) -> Result<Vec<f64>>;

    /// Every value decision `index` may take; used by mutation operators.
    fn gene_values(&self, index: usize) -> Vec<f64>;

    /// Makes an arbitrary decision vector valid in place.
    fn repair(&self, decisions: &mut [f64]);
}

/// Pre-measured rows of a tabular problem.
#[derive(Debug)]
pub struct Table {
    decisions: Vec<Vec<f64>>,
    objectives: Vec<ObjectiveVector>,
    categories: Vec<Option<Vec<String>>>,
}

impl Table {
    pub fn len(&self) -> usize {
        self.decisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decisions.is_empty()
    }

    pub fn decisions(&self, row: usize) -> &[f64] {
        &self.decisions[row]
    }

    pub fn objectives(&self, row: usize) -> &ObjectiveVector {
        &self.objectives[row]
    }

    /// For each decision column, the category labels in code order when the
    /// column was categorical in the source file.
    pub fn categories(&self) -> &[Option<Vec<String>>] {
        &self.categories
    }

    pub fn point(&self, row: usize) -> DecisionPoint {
        DecisionPoint::new(row, self.decisions[row].clone())
    }
}

#[derive(Clone, Debug)]
pub enum Source {
    Tabular(Arc<Table>),
    Generative(Arc<dyn Generator>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    Tabular,
    Generative,
}

/// An evaluable search space with an evaluation counter.
///
/// Cloning shares the underlying table or generator; use [`Problem::fresh`]
/// for an independent instance with a zeroed counter.
#[derive(Clone, Debug)]
pub struct Problem {
    name: String,
    decision_names: Vec<String>,
    schema: ObjectiveSchema,
    source: Source,
    eval_count: usize,
}

impl Problem {
    /// Builds a tabular problem from `(decisions, objectives)` rows. Row
    /// order defines point ids.
    pub fn tabular(
        name: impl Into<String>,
        decision_names: Vec<String>,
        schema: ObjectiveSchema,
        rows: Vec<(Vec<f64>, Vec<f64>)>,
    ) -> Result<Self> {
        let arity = decision_names.len();
        let mut decisions = Vec::with_capacity(rows.len());
        let mut objectives = Vec::with_capacity(rows.len());
        for (d, o) in rows {
            if d.len() != arity {
                return Err(Error::LengthMismatch {
                    expected: arity,
                    got: d.len(),
                });
            }
            schema.check(&o)?;
            decisions.push(d);
            objectives.push(ObjectiveVector::new(o)?);
        }
        if let Some((a, b)) = conflicting_duplicate(&decisions, &objectives) {
            return Err(Error::invalid(format!(
                "rows {a} and {b} have identical decisions but different objectives"
            )));
        }
        let table = Table {
            decisions,
            objectives,
            categories: vec![None; arity],
        };
        Ok(Self {
            name: name.into(),
            decision_names,
            schema,
            source: Source::Tabular(Arc::new(table)),
            eval_count: 0,
        })
    }

    pub fn generative(
        name: impl Into<String>,
        decision_names: Vec<String>,
        schema: ObjectiveSchema,
        generator: Arc<dyn Generator>,
    ) -> Result<Self> {
        if decision_names.len() != generator.decision_arity() {
            return Err(Error::LengthMismatch {
                expected: generator.decision_arity(),
                got: decision_names.len(),
            });
        }
        Ok(Self {
            name: name.into(),
            decision_names,
            schema,
            source: Source::Generative(generator),
            eval_count: 0,
        })
    }

    /// Independent instance sharing the same data, with the counter at 0.
    pub fn fresh(&self) -> Self {
        Self {
            eval_count: 0,
            ..self.clone()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn decision_names(&self) -> &[String] {
        &self.decision_names
    }

    pub fn decision_arity(&self) -> usize {
        self.decision_names.len()
    }

    pub fn schema(&self) -> &ObjectiveSchema {
        &self.schema
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn kind(&self) -> ProblemKind {
        match self.source {
            Source::Tabular(_) => ProblemKind::Tabular,
            Source::Generative(_) => ProblemKind::Generative,
        }
    }

    pub fn table(&self) -> Option<&Table> {
        match &self.source {
            Source::Tabular(t) => Some(t),
            Source::Generative(_) => None,
        }
    }

    pub fn eval_count(&self) -> usize {
        self.eval_count
    }

    /// Measures `point`, stamping it with the next evaluation index.
    pub fn evaluate(&mut self, point: &DecisionPoint) -> Result<EvaluatedPoint> {
        if point.decisions.len() != self.decision_arity() {
            return Err(Error::LengthMismatch {
                expected: self.decision_arity(),
                got: point.decisions.len(),
            });
        }
        let objectives = match &self.source {
            Source::Tabular(t) => {
                if point.id >= t.len() {
                    return Err(Error::UnknownPoint(point.id));
                }
                t.objectives[point.id].clone()
            }
            Source::Generative(g) => {
                let values = g.evaluate(&point.decisions)?;
                self.schema.check(&values)?;
                ObjectiveVector::new(values)?
            }
        };
        let eval_index = self.eval_count;
        self.eval_count += 1;
        Ok(EvaluatedPoint {
            point: point.clone(),
            objectives,
            eval_index,
        })
    }

    /// Draws `n` decision points. Tabular problems sample rows without
    /// replacement; generative problems draw fresh valid vectors with ids
    /// `0..n`.
    pub fn sample_pool(&self, n: usize, seed: u64) -> Result<Vec<DecisionPoint>> {
        if n == 0 {
            return Err(Error::invalid("pool size must be at least 1"));
        }
        let mut rng = seeded_rng(seed);
        match &self.source {
            Source::Tabular(t) => {
                if n > t.len() {
                    return Err(Error::invalid(format!(
                        "requested {n} points from a pool of {}",
                        t.len()
                    )));
                }
                Ok(index::sample(&mut rng, t.len(), n)
                    .into_iter()
                    .map(|row| t.point(row))
                    .collect())
            }
            Source::Generative(g) => Ok((0..n)
                .map(|id| DecisionPoint::new(id, g.sample(&mut rng)))
                .collect()),
        }
    }
}

fn conflicting_duplicate(
    decisions: &[Vec<f64>],
    objectives: &[ObjectiveVector],
) -> Option<(usize, usize)> {
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    for (row, d) in decisions.iter().enumerate() {
        let key: Vec<u64> = d.iter().map(|v| (v + 0.0).to_bits()).collect();
        match seen.get(&key) {
            Some(&first) if objectives[first] != objectives[row] => return Some((first, row)),
            Some(_) => {}
            None => {
                seen.insert(key, row);
            }
        }
    }
    None
}

/// Loads a tabular problem from a comma-separated file.
///
/// The header names decision columns plainly and objective columns with a
/// `-` (minimize) or `+` (maximize) prefix. Decision columns holding any
/// non-numeric cell are integer-coded in first-appearance order.
pub fn load_tabular(path: impl AsRef<Path>) -> Result<Problem> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "table".to_owned());
    parse_tabular(&text, &name)
}

/// Parses the tabular format from a string; `name` is used in errors and as
/// the problem name.
pub fn parse_tabular(text: &str, name: &str) -> Result<Problem> {
    let err = |line: usize, column: usize, message: String| Error::Parse {
        source_name: name.to_owned(),
        line,
        column,
        message,
    };

    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| err(1, 0, "missing header".into()))?;
    let header = header.strip_prefix('\u{feff}').unwrap_or(header);

    enum Column {
        Decision(usize),
        Objective(usize),
    }
    let mut columns = Vec::new();
    let mut decision_names = Vec::new();
    let mut objective_names = Vec::new();
    let mut senses = Vec::new();
    for (c, raw) in header.split(',').enumerate() {
        let raw = raw.trim();
        let (sense, bare) = match raw.chars().next() {
            Some('-') => (Some(Sense::Min), &raw[1..]),
            Some('+') => (Some(Sense::Max), &raw[1..]),
            _ => (None, raw),
        };
        let bare = bare.trim();
        if bare.is_empty() {
            return Err(err(1, c + 1, "empty column name".into()));
        }
        if decision_names.iter().chain(&objective_names).any(|n: &String| n == bare) {
            return Err(err(1, c + 1, format!("duplicate column name {bare:?}")));
        }
        match sense {
            Some(s) => {
                columns.push(Column::Objective(objective_names.len()));
                objective_names.push(bare.to_owned());
                senses.push(s);
            }
            None => {
                columns.push(Column::Decision(decision_names.len()));
                decision_names.push(bare.to_owned());
            }
        }
    }
    if objective_names.is_empty() {
        return Err(err(1, 0, "no objective columns".into()));
    }
    let schema = ObjectiveSchema::new(objective_names, senses)?;

    let arity = decision_names.len();
    let mut raw_decisions: Vec<Vec<&str>> = Vec::new();
    let mut objectives = Vec::new();
    let mut line_numbers = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != columns.len() {
            return Err(err(
                lineno,
                0,
                format!("expected {} cells, found {}", columns.len(), cells.len()),
            ));
        }
        let mut d = vec![""; arity];
        let mut o = vec![0.0; schema.len()];
        for (c, (col, cell)) in columns.iter().zip(&cells).enumerate() {
            match *col {
                Column::Decision(j) => {
                    if cell.is_empty() {
                        return Err(err(lineno, c + 1, "empty cell".into()));
                    }
                    d[j] = cell;
                }
                Column::Objective(j) => {
                    o[j] = parse_finite(cell)
                        .ok_or_else(|| err(lineno, c + 1, format!("non-numeric cell {cell:?}")))?;
                }
            }
        }
        raw_decisions.push(d);
        objectives.push(o);
        line_numbers.push(lineno);
    }

    // Encode each decision column, numerically when every cell parses.
    let mut categories = vec![None; arity];
    let mut decisions = vec![vec![0.0; arity]; raw_decisions.len()];
    for j in 0..arity {
        let numeric: Option<Vec<f64>> = raw_decisions.iter().map(|r| parse_finite(r[j])).collect();
        match numeric {
            Some(values) => {
                for (row, v) in values.into_iter().enumerate() {
                    decisions[row][j] = v;
                }
            }
            None => {
                let mut labels: Vec<String> = Vec::new();
                for (row, r) in raw_decisions.iter().enumerate() {
                    let code = match labels.iter().position(|l| l == r[j]) {
                        Some(code) => code,
                        None => {
                            labels.push(r[j].to_owned());
                            labels.len() - 1
                        }
                    };
                    decisions[row][j] = code as f64;
                }
                categories[j] = Some(labels);
            }
        }
    }

    let objectives: Vec<ObjectiveVector> = objectives
        .into_iter()
        .map(|o| ObjectiveVector::new(o).expect("cells were parsed as finite"))
        .collect();
    if let Some((a, b)) = conflicting_duplicate(&decisions, &objectives) {
        return Err(err(
            line_numbers[b],
            0,
            format!(
                "duplicate of line {} with conflicting objectives",
                line_numbers[a]
            ),
        ));
    }

    Ok(Problem {
        name: name.to_owned(),
        decision_names,
        schema,
        source: Source::Tabular(Arc::new(Table {
            decisions,
            objectives,
            categories,
        })),
        eval_count: 0,
    })
}

fn parse_finite(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Min-max normalization of decision columns, fitted on a set of points.
#[derive(Clone, Debug)]
pub struct DecisionScaler {
    lo: Vec<f64>,
    span: Vec<f64>,
}

impl DecisionScaler {
    pub fn fit<'a, I>(points: I) -> Self
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut lo: Vec<f64> = Vec::new();
        let mut hi: Vec<f64> = Vec::new();
        for p in points {
            if lo.is_empty() {
                lo = p.to_vec();
                hi = p.to_vec();
                continue;
            }
            for (j, &v) in p.iter().enumerate() {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        let span = lo.iter().zip(&hi).map(|(l, h)| h - l).collect();
        Self { lo, span }
    }

    /// Euclidean distance after scaling each column to [0, 1]. Constant
    /// columns contribute nothing.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut sum = 0.0;
        for j in 0..a.len() {
            let s = self.span.get(j).copied().unwrap_or(0.0);
            if s > 0.0 {
                let d = (a[j] - b[j]) / s;
                sum += d * d;
            }
        }
        sum.sqrt()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lo
    }
}
