//! C ABI for `flash-core`.
//!
//! Every fallible function returns a [`FlashStatus`]; on failure a message
//! is available from [`flash_last_error`] on the same thread. Problems and
//! run results are opaque handles released with their `_free` functions.
//! Enumerations are passed as plain integers and validated on entry.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use flash_core::experiment::cmd_random;
use flash_core::flash::{run_flash, FlashConfig};
use flash_core::monrp::MonrpInstance;
use flash_core::nsga2::{run_nsga2, Nsga2Config};
use flash_core::sway::{run_sway, SwayConfig};
use flash_core::{dominance, stats, synth, Error, ObjectiveSchema, Problem, RunResult, Sense};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlashStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    LengthMismatch = 5,
    NonFinite = 6,
    BufferTooSmall = 7,
    Internal = 8,
}

/// Values accepted wherever a function takes an algorithm code.
#[repr(C)]
pub enum FlashAlgorithm {
    Flash = 0,
    Sway = 1,
    Nsga2 = 2,
    Random = 3,
}

/// Values accepted wherever a function takes objective senses.
#[repr(C)]
pub enum FlashSense {
    Minimize = 0,
    Maximize = 1,
}

/// Settings for [`flash_run`]. Start from [`flash_run_params_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct FlashRunParams {
    /// Candidate pool size; capped at the table size for tabular problems.
    pub pool: usize,
    pub seed: u64,
    pub size0: usize,
    pub lives: usize,
    pub pop_size: usize,
    pub generations: usize,
    /// Evaluations for random search; must be at least 1 for that algorithm.
    pub random_budget: usize,
}

/// Opaque problem handle.
pub struct FlashProblem(Problem);

/// Opaque run result handle.
pub struct FlashRun {
    result: RunResult,
    objectives: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("interior NULs replaced"));
}

fn status_of(err: &Error) -> FlashStatus {
    match err {
        Error::Parse { .. } => FlashStatus::Parse,
        Error::LengthMismatch { .. } => FlashStatus::LengthMismatch,
        Error::NonFinite { .. } => FlashStatus::NonFinite,
        Error::Io(_) => FlashStatus::Io,
        _ => FlashStatus::InvalidArgument,
    }
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), (FlashStatus, String)>) -> FlashStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            FlashStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FlashStatus::Internal
        }
    }
}

fn core(err: Error) -> (FlashStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (FlashStatus, String) {
    (FlashStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> (FlashStatus, String) {
    (FlashStatus::InvalidArgument, msg.into())
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (FlashStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (FlashStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn schema_arg(senses: *const i32, n: usize) -> Result<ObjectiveSchema, (FlashStatus, String)> {
    let codes = slice_arg(senses, n, "senses")?;
    let senses = codes
        .iter()
        .map(|&c| match c {
            0 => Ok(Sense::Min),
            1 => Ok(Sense::Max),
            other => Err(invalid(format!("unknown sense code {other}"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if senses.is_empty() {
        return Err(invalid("at least one objective is required"));
    }
    Ok(ObjectiveSchema::from_senses(&senses))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), (FlashStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn flash_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads a tabular problem from a CSV file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flash_problem_load_tabular(path: *const c_char, out: *mut *mut FlashProblem) -> FlashStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let problem = flash_core::load_tabular(path).map_err(core)?;
        put(out, Box::into_raw(Box::new(FlashProblem(problem))), "out")
    })
}

/// Builds a built-in synthetic problem (`line`, `sphere2` or `step`).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flash_problem_synthetic(
    name: *const c_char,
    rows: usize,
    out: *mut *mut FlashProblem,
) -> FlashStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let problem = synth::synthetic(name, rows).map_err(core)?;
        put(out, Box::into_raw(Box::new(FlashProblem(problem))), "out")
    })
}

/// Generates a next-release planning problem.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flash_problem_monrp(
    requirements: usize,
    releases: usize,
    clients: usize,
    dep_pct: f64,
    funding_pct: f64,
    seed: u64,
    out: *mut *mut FlashProblem,
) -> FlashStatus {
    guard(|| {
        let inst = MonrpInstance::generate(requirements, releases, clients, dep_pct, funding_pct, seed).map_err(core)?;
        let problem = inst.into_problem("monrp");
        put(out, Box::into_raw(Box::new(FlashProblem(problem))), "out")
    })
}

/// # Safety
/// `problem` must come from a `flash_problem_*` constructor and not have
/// been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn flash_problem_free(problem: *mut FlashProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Number of decision variables; 0 for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn flash_problem_decision_count(problem: *const FlashProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.0.decision_arity())
}

/// Number of objectives; 0 for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn flash_problem_objective_count(problem: *const FlashProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.0.schema().len())
}

#[no_mangle]
pub extern "C" fn flash_run_params_default() -> FlashRunParams {
    let f = FlashConfig::default();
    let g = Nsga2Config::default();
    FlashRunParams {
        pool: 10_000,
        seed: 0,
        size0: f.size0,
        lives: f.lives,
        pop_size: g.pop_size,
        generations: g.generations,
        random_budget: 0,
    }
}

/// Runs one optimizer on a fresh copy of `problem`. `algorithm` is a
/// [`FlashAlgorithm`] value.
///
/// # Safety
/// `problem` must be a live handle, `params` null (defaults) or valid, and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flash_run(
    problem: *const FlashProblem,
    algorithm: i32,
    params: *const FlashRunParams,
    out: *mut *mut FlashRun,
) -> FlashStatus {
    guard(|| {
        let problem = problem.as_ref().ok_or_else(|| null("problem"))?;
        let params = params.as_ref().copied().unwrap_or_else(|| flash_run_params_default());
        let base = &problem.0;
        let pool_size = base.table().map_or(params.pool, |t| params.pool.min(t.len()));
        let pool = base.sample_pool(pool_size, params.seed).map_err(core)?;
        let mut instance = base.fresh();
        let result = match algorithm {
            0 => run_flash(
                &mut instance,
                &pool,
                FlashConfig {
                    size0: params.size0,
                    lives: params.lives,
                    seed: params.seed,
                },
            ),
            1 => run_sway(&mut instance, &pool, SwayConfig::with_seed(params.seed)),
            2 => run_nsga2(
                &mut instance,
                Nsga2Config {
                    pop_size: params.pop_size,
                    generations: params.generations,
                    seed: params.seed,
                    ..Nsga2Config::default()
                },
            ),
            3 => cmd_random(&mut instance, &pool, params.random_budget, params.seed),
            other => return Err(invalid(format!("unknown algorithm code {other}"))),
        }
        .map_err(core)?;
        let run = FlashRun {
            result,
            objectives: base.schema().len(),
        };
        put(out, Box::into_raw(Box::new(run)), "out")
    })
}

/// # Safety
/// `run` must come from [`flash_run`] and not have been freed. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn flash_run_free(run: *mut FlashRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Evaluations used by the run; 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn flash_run_evals(run: *const FlashRun) -> usize {
    run.as_ref().map_or(0, |r| r.result.evals)
}

/// Size of the run's final non-dominated set; 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn flash_run_best_count(run: *const FlashRun) -> usize {
    run.as_ref().map_or(0, |r| r.result.best.len())
}

/// Copies the best set's objectives row by row into `buffer`, which must
/// hold `best_count × objective_count` values.
///
/// # Safety
/// `run` must be a live handle and `buffer` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn flash_run_best_objectives(run: *const FlashRun, buffer: *mut f64, len: usize) -> FlashStatus {
    guard(|| {
        let run = run.as_ref().ok_or_else(|| null("run"))?;
        let need = run.result.best.len() * run.objectives;
        if len < need {
            return Err((FlashStatus::BufferTooSmall, format!("buffer holds {len} values, {need} needed")));
        }
        if need > 0 && buffer.is_null() {
            return Err(null("buffer"));
        }
        for (k, v) in run.result.best.iter().flat_map(|p| p.objectives.iter()).enumerate() {
            buffer.add(k).write(*v);
        }
        Ok(())
    })
}

/// Pareto domination of `x` over `y`. `senses` holds [`FlashSense`] codes.
///
/// # Safety
/// `x`, `y` and `senses` must each be valid for `n` reads; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn flash_binary_dominates(
    x: *const f64,
    y: *const f64,
    senses: *const i32,
    n: usize,
    out: *mut bool,
) -> FlashStatus {
    guard(|| {
        let schema = schema_arg(senses, n)?;
        let (x, y) = (slice_arg(x, n, "x")?, slice_arg(y, n, "y")?);
        let v = dominance::binary_dominates(x, y, &schema).map_err(core)?;
        put(out, v, "out")
    })
}

/// The exponential quality indicator `M(x, y)`.
///
/// # Safety
/// `x`, `y` and `senses` must each be valid for `n` reads; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn flash_indicator_value(
    x: *const f64,
    y: *const f64,
    senses: *const i32,
    n: usize,
    out: *mut f64,
) -> FlashStatus {
    guard(|| {
        let schema = schema_arg(senses, n)?;
        let (x, y) = (slice_arg(x, n, "x")?, slice_arg(y, n, "y")?);
        let v = dominance::indicator_value(x, y, &schema).map_err(core)?;
        put(out, v, "out")
    })
}

/// Vargha-Delaney A12 of `xs` over `ys`.
///
/// # Safety
/// `xs` must be valid for `nx` reads, `ys` for `ny`; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn flash_a12(xs: *const f64, nx: usize, ys: *const f64, ny: usize, out: *mut f64) -> FlashStatus {
    guard(|| {
        let v = stats::a12(slice_arg(xs, nx, "xs")?, slice_arg(ys, ny, "ys")?).map_err(core)?;
        put(out, v, "out")
    })
}
