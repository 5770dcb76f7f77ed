//! Built-in tabular problems that need no external data.
//!
//! Decisions come from additive low-discrepancy (Weyl) sequences, so every
//! table is a pure function of its size.
//!
//! * `line`: decisions `(x, y)` with `x` on an even grid over `[0, 1]`;
//!   objectives `(x + y, 1 − x + y)`, both minimized. The trade-off runs
//!   along `x` and `y` is a shared penalty, so the front is the low-`y`
//!   strip.
//! * `sphere2`: two quadratic bowls centred at `(¼, ¼)` and `(¾, ¾)`.
//! * `step`: the L1 distances to `(¼, ¼)` and `(¾, ¾)`, each quantized to
//!   quarter steps. Piecewise constant with many ties.

use crate::error::{Error, Result};
use crate::problem::{ObjectiveSchema, Problem, Sense};

pub const SYNTHETICS: [&str; 3] = ["line", "sphere2", "step"];

const GOLDEN: f64 = 0.618_033_988_749_894_9;
// Reciprocals of the plastic number and its square.
const R2: [f64; 2] = [0.754_877_666_246_692_7, 0.569_840_290_998_053_2];

fn weyl2(i: usize) -> [f64; 2] {
    let i = i as f64;
    [(0.5 + i * R2[0]).fract(), (0.5 + i * R2[1]).fract()]
}

/// Builds the synthetic `name` with `n` rows.
pub fn synthetic(name: &str, n: usize) -> Result<Problem> {
    if n < 2 {
        return Err(Error::invalid("synthetic problems need at least 2 rows"));
    }
    let rows: Vec<(Vec<f64>, Vec<f64>)> = match name {
        "line" => (0..n)
            .map(|i| {
                let x = i as f64 / (n - 1) as f64;
                let y = (i as f64 * GOLDEN).fract();
                (vec![x, y], vec![x + y, 1.0 - x + y])
            })
            .collect(),
        "sphere2" => (0..n)
            .map(|i| {
                let [a, b] = weyl2(i);
                let f1 = (a - 0.25).powi(2) + (b - 0.25).powi(2);
                let f2 = (a - 0.75).powi(2) + (b - 0.75).powi(2);
                (vec![a, b], vec![f1, f2])
            })
            .collect(),
        "step" => (0..n)
            .map(|i| {
                let [a, b] = weyl2(i);
                let f1 = (4.0 * ((a - 0.25).abs() + (b - 0.25).abs())).floor();
                let f2 = (4.0 * ((a - 0.75).abs() + (b - 0.75).abs())).floor();
                (vec![a, b], vec![f1, f2])
            })
            .collect(),
        other => {
            return Err(Error::invalid(format!(
                "unknown synthetic {other:?}; expected one of {}",
                SYNTHETICS.join(", ")
            )))
        }
    };
    Problem::tabular(
        format!("synth:{name}"),
        vec!["x1".into(), "x2".into()],
        ObjectiveSchema::from_senses(&[Sense::Min, Sense::Min]),
        rows,
    )
}
