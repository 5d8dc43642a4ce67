//! Piecewise-linear horizontal curves starting at the origin.
//!
//! Along a horizontal curve the vertical coordinate obeys
//! `ż = ½ [x, ẋ]`. On a straight segment `p → q` the integrand is
//! constant, so the segment contributes exactly `½ [p, q]`.

use nalgebra::DVector;

use crate::algebra::{GroupPoint, HTypeAlgebra};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PolylinePath {
    pub knots: Vec<DVector<f64>>,
}

impl PolylinePath {
    pub fn new(knots: Vec<DVector<f64>>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Invalid("a polyline needs at least two knots".into()));
        }
        Ok(Self { knots })
    }

    pub fn endpoint(&self, alg: &HTypeAlgebra) -> Result<GroupPoint> {
        polyline_endpoint(alg, &self.knots)
    }

    pub fn length(&self) -> f64 {
        polyline_length(&self.knots)
    }

    /// Same curve traversed backwards from its last knot, translated so it
    /// starts at the origin again.
    pub fn reversed(&self) -> Self {
        let last = self.knots.last().unwrap().clone();
        Self {
            knots: self.knots.iter().rev().map(|k| k - &last).collect(),
        }
    }
}

/// Endpoint `(x, z)` reached by the horizontal lift of the polyline through
/// `knots` (the first knot is the starting horizontal position, `z` starts
/// at 0).
pub fn polyline_endpoint(alg: &HTypeAlgebra, knots: &[DVector<f64>]) -> Result<GroupPoint> {
    if knots.len() < 2 {
        return Err(Error::Invalid("a polyline needs at least two knots".into()));
    }
    let mut z = DVector::zeros(alg.r());
    for w in knots.windows(2) {
        z += alg.bracket(&w[0], &w[1])? * 0.5;
    }
    GroupPoint::from_vectors(alg, knots.last().unwrap().clone(), z)
}

pub fn polyline_length(knots: &[DVector<f64>]) -> f64 {
    knots.windows(2).map(|w| (&w[1] - &w[0]).norm()).sum()
}
