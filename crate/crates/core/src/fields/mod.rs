//! Electrostatic potentials: analytic basis functions, grid solutions and
//! their voltage-weighted superposition.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

mod diff;
pub mod grid;
mod rect;

pub use diff::{field_gradient, hessian, DEFAULT_RELATIVE_STEP, MIN_DIFF_STEP};
pub use grid::{solve_laplace_grid, FaceCondition, GridField, GridProblem, GridSpec, SorOptions};
pub use rect::{rect_electrode_potential, RectBasis};

pub type Point = Vector3<f64>;

/// A scalar potential with first and second spatial derivatives.
///
/// Basis functions are dimensionless (potential per applied volt); a
/// [`Superposition`] with voltage weights yields volts.
pub trait ScalarField: Send + Sync + fmt::Debug {
    fn potential(&self, p: &Point) -> Result<f64>;
    fn gradient(&self, p: &Point) -> Result<Vector3<f64>>;
    fn hessian(&self, p: &Point) -> Result<Matrix3<f64>>;

    /// Characteristic feature size, m.
    fn length_scale(&self) -> f64;

    /// Step for finite differences of derivative quantities built on this
    /// field. Analytic fields use a tiny fraction of their length scale; grid
    /// fields use their node spacing.
    fn diff_step(&self) -> f64 {
        DEFAULT_RELATIVE_STEP * self.length_scale()
    }

    /// Coordinate along which the field is exactly constant, if any.
    fn invariant_axis(&self) -> Option<usize> {
        None
    }
}

/// Ideal hyperbolic quadrupole per volt: `(x^2 - y^2) / (2 r0^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadrupoleBasis {
    pub r0: f64,
}

impl ScalarField for QuadrupoleBasis {
    fn potential(&self, p: &Point) -> Result<f64> {
        Ok((p.x * p.x - p.y * p.y) / (2.0 * self.r0 * self.r0))
    }

    fn gradient(&self, p: &Point) -> Result<Vector3<f64>> {
        let k = 1.0 / (self.r0 * self.r0);
        Ok(Vector3::new(k * p.x, -k * p.y, 0.0))
    }

    fn hessian(&self, _p: &Point) -> Result<Matrix3<f64>> {
        let k = 1.0 / (self.r0 * self.r0);
        Ok(Matrix3::from_diagonal(&Vector3::new(k, -k, 0.0)))
    }

    fn length_scale(&self) -> f64 {
        self.r0
    }

    fn invariant_axis(&self) -> Option<usize> {
        Some(2)
    }
}

/// Potential of a uniform field `E`: `-E . p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformField {
    pub field: Vector3<f64>,
    pub length_scale: f64,
}

impl ScalarField for UniformField {
    fn potential(&self, p: &Point) -> Result<f64> {
        Ok(-self.field.dot(p))
    }

    fn gradient(&self, _p: &Point) -> Result<Vector3<f64>> {
        Ok(-self.field)
    }

    fn hessian(&self, _p: &Point) -> Result<Matrix3<f64>> {
        Ok(Matrix3::zeros())
    }

    fn length_scale(&self) -> f64 {
        self.length_scale
    }
}

/// Weighted sum `sum_i w_i b_i` of fields.
#[derive(Clone, Debug, Default)]
pub struct Superposition {
    terms: Vec<(f64, Arc<dyn ScalarField>)>,
}

impl Superposition {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, weight: f64, field: Arc<dyn ScalarField>) {
        self.terms.push((weight, field));
    }

    pub fn with(mut self, weight: f64, field: Arc<dyn ScalarField>) -> Self {
        self.push(weight, field);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(f64, Arc<dyn ScalarField>)] {
        &self.terms
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { terms: self.terms.iter().map(|(w, f)| (w * factor, f.clone())).collect() }
    }
}

impl ScalarField for Superposition {
    fn potential(&self, p: &Point) -> Result<f64> {
        let mut acc = 0.0;
        for (w, f) in &self.terms {
            acc += w * f.potential(p)?;
        }
        Ok(acc)
    }

    fn gradient(&self, p: &Point) -> Result<Vector3<f64>> {
        let mut acc = Vector3::zeros();
        for (w, f) in &self.terms {
            acc += *w * f.gradient(p)?;
        }
        Ok(acc)
    }

    fn hessian(&self, p: &Point) -> Result<Matrix3<f64>> {
        let mut acc = Matrix3::zeros();
        for (w, f) in &self.terms {
            acc += *w * f.hessian(p)?;
        }
        Ok(acc)
    }

    fn length_scale(&self) -> f64 {
        let s = self.terms.iter().map(|(_, f)| f.length_scale()).fold(f64::INFINITY, f64::min);
        if s.is_finite() {
            s
        } else {
            1.0
        }
    }

    fn diff_step(&self) -> f64 {
        let s = self.terms.iter().map(|(_, f)| f.diff_step()).fold(0.0, f64::max);
        if s > 0.0 {
            s
        } else {
            DEFAULT_RELATIVE_STEP * self.length_scale()
        }
    }

    fn invariant_axis(&self) -> Option<usize> {
        let mut axes = self.terms.iter().map(|(_, f)| f.invariant_axis());
        let first = axes.next()??;
        axes.all(|a| a == Some(first)).then_some(first)
    }
}

/// Basis functions keyed by electrode id.
#[derive(Clone, Debug, Default)]
pub struct PotentialField {
    basis: BTreeMap<String, Arc<dyn ScalarField>>,
}

impl PotentialField {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: impl Into<String>, basis: Arc<dyn ScalarField>) {
        self.basis.insert(id.into(), basis);
    }

    pub fn get(&self, id: &str) -> Result<&Arc<dyn ScalarField>> {
        self.basis.get(id).ok_or_else(|| Error::Lookup(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.basis.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// The voltage-weighted combination as a field of its own.
    pub fn combine(&self, voltages: &BTreeMap<String, f64>) -> Result<Superposition> {
        let mut s = Superposition::new();
        for (id, v) in voltages {
            s.push(*v, self.get(id)?.clone());
        }
        Ok(s)
    }

    /// `sum_i V_i b_i(p)`, in volts.
    pub fn superpose(&self, voltages: &BTreeMap<String, f64>, p: &Point) -> Result<f64> {
        let mut acc = 0.0;
        for (id, v) in voltages {
            acc += v * self.get(id)?.potential(p)?;
        }
        Ok(acc)
    }
}

/// Free-function form of [`PotentialField::superpose`].
pub fn superpose(field: &PotentialField, voltages: &BTreeMap<String, f64>, p: &Point) -> Result<f64> {
    field.superpose(voltages, p)
}
