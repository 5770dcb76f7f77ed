//! Generational distance (GD) and inverted generational distance (IGD)
//! against a pooled reference front.
//!
//! All distances are Euclidean after min-max normalization by the reference
//! front's per-objective bounds. An axis on which the reference front has
//! zero range contributes nothing.

use std::collections::HashSet;

use crate::dominance::first_front_vectors;
use crate::error::{Error, Result};
use crate::problem::{ObjectiveSchema, ObjectiveVector};

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceFront {
    points: Vec<ObjectiveVector>,
    min: Vec<f64>,
    max: Vec<f64>,
}

impl ReferenceFront {
    /// Uses `points` as given, without filtering dominated vectors. Handy
    /// when the true front is known.
    pub fn from_points<R: AsRef<[f64]>>(points: &[R]) -> Result<Self> {
        let first = points.first().ok_or(Error::Empty("reference front"))?;
        let m = first.as_ref().len();
        let points = points
            .iter()
            .map(|p| {
                let p = p.as_ref();
                if p.len() != m {
                    return Err(Error::LengthMismatch { expected: m, got: p.len() });
                }
                ObjectiveVector::new(p.to_vec())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::with_bounds(points))
    }

    fn with_bounds(points: Vec<ObjectiveVector>) -> Self {
        let m = points.first().map_or(0, |p| p.len());
        let min = (0..m)
            .map(|j| points.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min))
            .collect();
        let max = (0..m)
            .map(|j| points.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        Self { points, min, max }
    }

    pub fn points(&self) -> &[ObjectiveVector] {
        &self.points
    }

    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn max(&self) -> &[f64] {
        &self.max
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn normalize(&self, v: &[f64]) -> Vec<f64> {
        v.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&x, (&lo, &hi))| if hi > lo { (x - lo) / (hi - lo) } else { 0.0 })
            .collect()
    }
}

/// Front 0 of the union of all solutions, with duplicate vectors collapsed.
/// Points keep their first-appearance order.
pub fn reference_front<R: AsRef<[f64]>>(solutions: &[R], schema: &ObjectiveSchema) -> Result<ReferenceFront> {
    if solutions.is_empty() {
        return Err(Error::Empty("reference front input"));
    }
    let mut seen = HashSet::new();
    let mut unique: Vec<&[f64]> = Vec::new();
    for s in solutions {
        let v = s.as_ref();
        schema.check(v)?;
        if seen.insert(v.iter().map(|x| (x + 0.0).to_bits()).collect::<Vec<_>>()) {
            unique.push(v);
        }
    }
    let front = first_front_vectors(&unique, schema.senses());
    let points = front
        .iter()
        .map(|&i| ObjectiveVector::new(unique[i].to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReferenceFront::with_bounds(points))
}

fn mean_nearest(from: &[Vec<f64>], to: &[Vec<f64>]) -> f64 {
    let total: f64 = from
        .iter()
        .map(|a| {
            to.iter()
                .map(|b| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / from.len() as f64
}

fn normalized<R: AsRef<[f64]>>(
    obtained: &[R],
    reference: &ReferenceFront,
    schema: &ObjectiveSchema,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    if obtained.is_empty() {
        return Err(Error::Empty("obtained solutions"));
    }
    if reference.is_empty() {
        return Err(Error::Empty("reference front"));
    }
    if reference.min.len() != schema.len() {
        return Err(Error::LengthMismatch {
            expected: schema.len(),
            got: reference.min.len(),
        });
    }
    let a = obtained
        .iter()
        .map(|o| schema.check(o.as_ref()).map(|_| reference.normalize(o.as_ref())))
        .collect::<Result<Vec<_>>>()?;
    let r = reference.points.iter().map(|p| reference.normalize(p)).collect();
    Ok((a, r))
}

/// Mean distance from each obtained point to its nearest reference point.
pub fn gd<R: AsRef<[f64]>>(obtained: &[R], reference: &ReferenceFront, schema: &ObjectiveSchema) -> Result<f64> {
    let (a, r) = normalized(obtained, reference, schema)?;
    Ok(mean_nearest(&a, &r))
}

/// Mean distance from each reference point to its nearest obtained point.
pub fn igd<R: AsRef<[f64]>>(obtained: &[R], reference: &ReferenceFront, schema: &ObjectiveSchema) -> Result<f64> {
    let (a, r) = normalized(obtained, reference, schema)?;
    Ok(mean_nearest(&r, &a))
}
