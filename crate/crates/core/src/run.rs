use crate::problem::EvaluatedPoint;

/// One iteration of an optimizer's main loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRecord {
    /// Id of the point evaluated in this iteration.
    pub chosen: usize,
    pub lives: usize,
    /// Size of the non-dominated set after the iteration.
    pub front_size: usize,
}

/// Everything an optimizer run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    /// All measurements, in evaluation order.
    pub evaluated: Vec<EvaluatedPoint>,
    /// The final non-dominated set.
    pub best: Vec<EvaluatedPoint>,
    pub evals: usize,
    pub trace: Vec<TraceRecord>,
}
