//! Uniform-grid Laplace solver (successive over-relaxation) and the
//! interpolated field it produces.
//!
//! Nodes sit at `origin + h (i, j, k)`. An axis with a single node is
//! degenerate: the problem is solved in the remaining dimensions and the
//! resulting field is invariant along that axis.

use std::io::Write;

use nalgebra::{Matrix3, Vector3};

use super::{Point, ScalarField};
use crate::error::{Error, Result};
use crate::geometry::Rect;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub origin: [f64; 3],
    pub spacing: f64,
    pub dims: [usize; 3],
}

impl GridSpec {
    /// Grid covering `[min, max]` with spacing `h`. Axes with `min == max` are
    /// degenerate. The upper bound is rounded to a whole number of cells.
    pub fn from_bounds(min: [f64; 3], max: [f64; 3], h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Configuration(format!("grid spacing must be positive, got {h}")));
        }
        let mut dims = [1; 3];
        for a in 0..3 {
            let span = max[a] - min[a];
            if !(span.is_finite() && span >= 0.0) {
                return Err(Error::Configuration(format!("grid bounds on axis {a} are inverted")));
            }
            dims[a] = (span / h).round() as usize + 1;
        }
        Ok(Self { origin: min, spacing: h, dims })
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.dims[2];
        let j = (idx / self.dims[2]) % self.dims[1];
        let i = idx / (self.dims[1] * self.dims[2]);
        [i, j, k]
    }

    pub fn position(&self, idx: usize) -> Point {
        let c = self.coords(idx);
        Point::new(
            self.origin[0] + c[0] as f64 * self.spacing,
            self.origin[1] + c[1] as f64 * self.spacing,
            self.origin[2] + c[2] as f64 * self.spacing,
        )
    }

    pub fn max_corner(&self) -> [f64; 3] {
        let mut m = self.origin;
        for (a, v) in m.iter_mut().enumerate() {
            *v += (self.dims[a] - 1) as f64 * self.spacing;
        }
        m
    }

    pub fn active_axes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..3).filter(|&a| self.dims[a] > 1)
    }

    fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => self.dims[1] * self.dims[2],
            1 => self.dims[2],
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceCondition {
    Unset,
    /// Node values on the face are fixed.
    Dirichlet,
    /// Zero normal derivative (mirror about the face).
    Neumann,
}

/// Boundary-value problem on a grid: fixed (Dirichlet) nodes, including any
/// electrode nodes inside the box, plus a condition for every face.
#[derive(Clone, Debug)]
pub struct GridProblem {
    pub spec: GridSpec,
    fixed: Vec<bool>,
    values: Vec<f64>,
    faces: [[FaceCondition; 2]; 3],
}

impl GridProblem {
    pub fn new(spec: GridSpec) -> Self {
        let n = spec.len();
        Self { spec, fixed: vec![false; n], values: vec![0.0; n], faces: [[FaceCondition::Unset; 2]; 3] }
    }

    fn face_nodes(&self, axis: usize, side: usize) -> Vec<usize> {
        let d = self.spec.dims;
        let fixed_coord = if side == 0 { 0 } else { d[axis] - 1 };
        let mut out = Vec::new();
        for i in 0..d[0] {
            for j in 0..d[1] {
                for k in 0..d[2] {
                    if [i, j, k][axis] == fixed_coord {
                        out.push(self.spec.index(i, j, k));
                    }
                }
            }
        }
        out
    }

    /// Fix every not-yet-fixed node of a face to `f(position)`. Nodes fixed
    /// earlier (e.g. by another face) keep their value.
    pub fn dirichlet_face(&mut self, axis: usize, side: usize, f: impl Fn(&Point) -> f64) -> &mut Self {
        for idx in self.face_nodes(axis, side) {
            if !self.fixed[idx] {
                self.fixed[idx] = true;
                self.values[idx] = f(&self.spec.position(idx));
            }
        }
        self.faces[axis][side] = FaceCondition::Dirichlet;
        self
    }

    pub fn neumann_face(&mut self, axis: usize, side: usize) -> &mut Self {
        self.faces[axis][side] = FaceCondition::Neumann;
        self
    }

    /// Fix nodes anywhere in the box where `f` returns a value (electrodes).
    pub fn fix_where(&mut self, f: impl Fn(&Point) -> Option<f64>) -> &mut Self {
        for idx in 0..self.spec.len() {
            if let Some(v) = f(&self.spec.position(idx)) {
                self.fixed[idx] = true;
                self.values[idx] = v;
            }
        }
        self
    }

    /// Starting values of the free nodes (fixed nodes keep their value).
    pub fn initial_guess(&mut self, guess: &[f64]) -> Result<&mut Self> {
        if guess.len() != self.values.len() {
            return Err(Error::Configuration("initial guess does not match the grid".into()));
        }
        for (idx, g) in guess.iter().enumerate() {
            if !self.fixed[idx] {
                self.values[idx] = *g;
            }
        }
        Ok(self)
    }

    /// Bottom face `z = origin_z` carries planar electrodes; each node takes
    /// the electrode coverage of its surrounding cell (so edge nodes get 1/2,
    /// corner nodes 1/4). The remaining faces are Dirichlet with `outer`.
    pub fn planar(spec: GridSpec, electrodes: &[(Rect, f64)], outer: impl Fn(&Point) -> f64) -> Self {
        let h = spec.spacing;
        let mut p = Self::new(spec);
        p.dirichlet_face(2, 0, |q| {
            let cell = Rect::new(q.x - 0.5 * h, q.x + 0.5 * h, q.y - 0.5 * h, q.y + 0.5 * h);
            electrodes.iter().map(|(r, v)| v * r.intersection_area(&cell)).sum::<f64>() / (h * h)
        });
        for (axis, side) in [(0, 0), (0, 1), (1, 0), (1, 1), (2, 1)] {
            p.dirichlet_face(axis, side, &outer);
        }
        p
    }

    fn check(&self) -> Result<()> {
        for a in self.spec.active_axes() {
            for side in 0..2 {
                if self.faces[a][side] == FaceCondition::Unset {
                    return Err(Error::Configuration(format!("no boundary condition on face (axis {a}, side {side})")));
                }
            }
        }
        if self.spec.active_axes().next().is_none() {
            return Err(Error::Configuration("grid has no active axis".into()));
        }
        Ok(())
    }

    fn voltage_scale(&self) -> f64 {
        let s = self
            .values
            .iter()
            .zip(&self.fixed)
            .filter(|(_, f)| **f)
            .map(|(v, _)| v.abs())
            .fold(0.0, f64::max);
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SorOptions {
    pub omega: f64,
    /// Convergence threshold on the max node residual, relative to the largest
    /// boundary voltage.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SorOptions {
    fn default() -> Self {
        Self { omega: 1.9, tol: 1e-8, max_iters: 100_000 }
    }
}

impl SorOptions {
    /// Optimal over-relaxation factor for the longest active axis.
    pub fn optimal_omega(spec: &GridSpec) -> f64 {
        let n = spec.active_axes().map(|a| spec.dims[a]).max().unwrap_or(2) as f64;
        2.0 / (1.0 + (std::f64::consts::PI / n).sin())
    }
}

/// Solve the discrete Laplace equation by lexicographic SOR.
///
/// The residual of a free node is `|mean(neighbours) - u|`; iteration stops
/// once the largest residual seen in a sweep is below `tol` times the
/// boundary voltage scale.
pub fn solve_laplace_grid(problem: &GridProblem, opts: &SorOptions) -> Result<GridField> {
    problem.check()?;
    if !(opts.tol > 0.0) || !(0.0 < opts.omega && opts.omega < 2.0) {
        return Err(Error::Configuration("SOR requires tol > 0 and 0 < omega < 2".into()));
    }
    let spec = problem.spec;
    let d = spec.dims;
    let axes: Vec<usize> = spec.active_axes().collect();
    let strides: Vec<usize> = axes.iter().map(|&a| spec.stride(a)).collect();
    let inv_count = 1.0 / (2 * axes.len()) as f64;
    let threshold = opts.tol * problem.voltage_scale();
    let fixed = &problem.fixed;
    let mut u = problem.values.clone();

    let mut residual = f64::INFINITY;
    for iter in 1..=opts.max_iters {
        residual = 0.0;
        for i in 0..d[0] {
            for j in 0..d[1] {
                let base = spec.index(i, j, 0);
                for k in 0..d[2] {
                    let idx = base + k;
                    if fixed[idx] {
                        continue;
                    }
                    let c = [i, j, k];
                    let mut sum = 0.0;
                    for (&a, &s) in axes.iter().zip(&strides) {
                        let ca = c[a];
                        let lo = if ca > 0 { idx - s } else { idx + s };
                        let hi = if ca + 1 < d[a] { idx + s } else { idx - s };
                        sum += u[lo] + u[hi];
                    }
                    let r = sum * inv_count - u[idx];
                    residual = f64::max(residual, r.abs());
                    u[idx] += opts.omega * r;
                }
            }
        }
        if residual <= threshold {
            return Ok(GridField { spec, values: u, iterations: iter, residual, feature_scale: None });
        }
    }
    Err(Error::Convergence { iterations: opts.max_iters, residual })
}

/// Solved grid potential; trilinear interpolation between nodes.
#[derive(Clone, Debug)]
pub struct GridField {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    feature_scale: Option<f64>,
}

impl GridField {
    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Configuration("grid values do not match the grid".into()));
        }
        Ok(Self { spec, values, iterations: 0, residual: 0.0, feature_scale: None })
    }

    /// Set the length scale reported to analysis code (defaults to the spacing).
    pub fn with_feature_scale(mut self, scale: f64) -> Self {
        self.feature_scale = Some(scale);
        self
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.spec.index(i, j, k)]
    }

    /// Interpolate onto another grid (e.g. as initial guess for a finer solve).
    pub fn resample(&self, spec: &GridSpec) -> Result<Vec<f64>> {
        (0..spec.len()).map(|idx| self.potential(&spec.position(idx))).collect()
    }

    /// Write `x,y,z,potential_volts` rows, `x` outermost.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "x,y,z,potential_volts")?;
        for idx in 0..self.spec.len() {
            let p = self.spec.position(idx);
            writeln!(w, "{}", crate::format::csv_row(&[p.x, p.y, p.z, self.values[idx]]))?;
        }
        Ok(())
    }

    fn locate(&self, p: &Point) -> Result<[(usize, f64); 3]> {
        let h = self.spec.spacing;
        let mut out = [(0, 0.0); 3];
        for a in 0..3 {
            let n = self.spec.dims[a];
            if n == 1 {
                continue;
            }
            let t = (p[a] - self.spec.origin[a]) / h;
            let slack = 1e-9;
            if !(t >= -slack && t <= (n - 1) as f64 + slack) {
                return Err(Error::Domain(format!("point {:?} lies outside the grid on axis {a}", p.as_slice())));
            }
            let t = t.clamp(0.0, (n - 1) as f64);
            let i = (t.floor() as usize).min(n - 2);
            out[a] = (i, t - i as f64);
        }
        Ok(out)
    }
}

impl ScalarField for GridField {
    fn potential(&self, p: &Point) -> Result<f64> {
        let loc = self.locate(p)?;
        let d = self.spec.dims;
        let mut acc = 0.0;
        for corner in 0..8usize {
            let mut w = 1.0;
            let mut c = [0usize; 3];
            for a in 0..3 {
                let bit = (corner >> a) & 1;
                if d[a] == 1 {
                    if bit == 1 {
                        w = 0.0;
                    }
                    continue;
                }
                let (i, f) = loc[a];
                c[a] = i + bit;
                w *= if bit == 1 { f } else { 1.0 - f };
            }
            if w != 0.0 {
                acc += w * self.node(c[0], c[1], c[2]);
            }
        }
        Ok(acc)
    }

    fn gradient(&self, p: &Point) -> Result<Vector3<f64>> {
        let h = self.spec.spacing;
        let mut g = Vector3::zeros();
        for a in self.spec.active_axes() {
            let mut e = Vector3::zeros();
            e[a] = h;
            g[a] = (self.potential(&(p + e))? - self.potential(&(p - e))?) / (2.0 * h);
        }
        Ok(g)
    }

    fn hessian(&self, p: &Point) -> Result<Matrix3<f64>> {
        let h = self.spec.spacing;
        let mut m = Matrix3::zeros();
        for a in self.spec.active_axes() {
            let mut e = Vector3::zeros();
            e[a] = h;
            let col = (self.gradient(&(p + e))? - self.gradient(&(p - e))?) / (2.0 * h);
            m.set_column(a, &col);
        }
        Ok(0.5 * (m + m.transpose()))
    }

    fn length_scale(&self) -> f64 {
        self.feature_scale.unwrap_or(self.spec.spacing)
    }

    fn diff_step(&self) -> f64 {
        self.spec.spacing
    }

    fn invariant_axis(&self) -> Option<usize> {
        let flat: Vec<usize> = (0..3).filter(|&a| self.spec.dims[a] == 1).collect();
        (flat.len() == 1).then(|| flat[0])
    }
}
