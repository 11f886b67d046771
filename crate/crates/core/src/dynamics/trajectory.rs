//! Fixed-step RK4 trajectories in the full time-dependent field and in the
//! static pseudopotential.

use std::io::Write;

use nalgebra::Vector3;

use crate::analysis::TrapModel;
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::format::csv_row;
use crate::geometry::Geometry;

/// Minimum number of integration steps per rf period.
pub const MIN_STEPS_PER_PERIOD: f64 = 50.0;

/// Divergence radius in units of the layout's characteristic length.
pub const DIVERGENCE_SCALE: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryState {
    pub t: f64,
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
}

impl TrajectoryState {
    pub fn at_rest(position: Vector3<f64>) -> Self {
        Self { t: 0.0, position, velocity: Vector3::zeros() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryOptions {
    pub dt: f64,
    pub duration: f64,
    /// Keep every n-th step (the initial state is always kept).
    pub sample_every: usize,
    /// Uniform stray field, V/m.
    pub stray_field: Vector3<f64>,
}

impl TrajectoryOptions {
    pub fn new(dt: f64, duration: f64) -> Self {
        Self { dt, duration, sample_every: 1, stray_field: Vector3::zeros() }
    }

    pub fn sample_every(mut self, n: usize) -> Self {
        self.sample_every = n.max(1);
        self
    }

    pub fn with_stray_field(mut self, e: Vector3<f64>) -> Self {
        self.stray_field = e;
        self
    }

    fn check(&self) -> Result<usize> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Configuration(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::Configuration(format!("duration must be positive, got {}", self.duration)));
        }
        Ok((self.duration / self.dt).round().max(1.0) as usize)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectoryState>,
    /// Set when the ion left the divergence radius or the field domain.
    pub diverged: bool,
    pub divergence_time: Option<f64>,
}

impl Trajectory {
    /// One coordinate of every sample.
    pub fn component(&self, axis: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.position[axis]).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// Sample spacing, s.
    pub fn sample_interval(&self) -> f64 {
        match self.samples.as_slice() {
            [a, b, ..] => b.t - a.t,
            _ => 0.0,
        }
    }

    /// `t_s,x_m,y_m,z_m,vx,vy,vz`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "t_s,x_m,y_m,z_m,vx,vy,vz")?;
        for s in &self.samples {
            let (p, v) = (s.position, s.velocity);
            writeln!(w, "{}", csv_row(&[s.t, p.x, p.y, p.z, v.x, v.y, v.z]))?;
        }
        Ok(())
    }
}

type Accel<'a> = dyn Fn(&Vector3<f64>, f64) -> Result<Vector3<f64>> + 'a;

/// `n` RK4 steps of `x'' = f(x, s)` in the independent variable `s`.
/// Returns the sampled states with `s` mapped to time by `to_time`, and
/// velocities scaled by `v_scale`.
#[allow(clippy::too_many_arguments)]
fn rk4(
    f: &Accel,
    x0: Vector3<f64>,
    v0: Vector3<f64>,
    s0: f64,
    h: f64,
    n: usize,
    every: usize,
    stop: &dyn Fn(&Vector3<f64>) -> bool,
    to_time: &dyn Fn(f64) -> f64,
    v_scale: f64,
) -> Trajectory {
    let state = |s: f64, x: Vector3<f64>, v: Vector3<f64>| TrajectoryState { t: to_time(s), position: x, velocity: v * v_scale };
    let mut samples = vec![state(s0, x0, v0)];
    let (mut x, mut v) = (x0, v0);
    for i in 0..n {
        let s = s0 + i as f64 * h;
        let step = (|| -> Result<(Vector3<f64>, Vector3<f64>)> {
            let a1 = f(&x, s)?;
            let (x2, v2) = (x + 0.5 * h * v, v + 0.5 * h * a1);
            let a2 = f(&x2, s + 0.5 * h)?;
            let (x3, v3) = (x + 0.5 * h * v2, v + 0.5 * h * a2);
            let a3 = f(&x3, s + 0.5 * h)?;
            let (x4, v4) = (x + h * v3, v + h * a3);
            let a4 = f(&x4, s + h)?;
            Ok((
                x + h / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4),
                v + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
            ))
        })();
        let s1 = s0 + (i + 1) as f64 * h;
        match step {
            Ok((xn, vn)) if xn.iter().chain(vn.iter()).all(|c| c.is_finite()) && !stop(&xn) => {
                x = xn;
                v = vn;
                if (i + 1) % every == 0 || i + 1 == n {
                    samples.push(state(s1, x, v));
                }
            }
            _ => {
                return Trajectory { samples, diverged: true, divergence_time: Some(to_time(s1)) };
            }
        }
    }
    Trajectory { samples, diverged: false, divergence_time: None }
}

fn divergence_radius(model: &TrapModel) -> f64 {
    DIVERGENCE_SCALE * model.length_scale()
}

/// Ion motion in the full time-dependent electrode potential plus an
/// optional uniform stray field.
///
/// Hyperbolic layouts are integrated in Mathieu time `zeta = Omega t / 2` on
/// the closed-form equations; all others in SI time on the basis-function
/// field. Leaving the divergence radius (10 characteristic lengths from the
/// origin) or the field domain ends the run with `diverged` set.
pub fn integrate_trajectory(model: &TrapModel, init: &TrajectoryState, opts: &TrajectoryOptions) -> Result<Trajectory> {
    let n = opts.check()?;
    let drive = &model.layout().drive;
    let guard = std::f64::consts::TAU / (MIN_STEPS_PER_PERIOD * drive.omega);
    if opts.dt > guard * (1.0 + 1e-12) {
        return Err(Error::Configuration(format!(
            "time step {} s exceeds the resolution guard 2 pi / (50 Omega) = {guard} s",
            opts.dt
        )));
    }
    let ion = model.ion();
    let qm = ion.charge / ion.mass;
    let radius = divergence_radius(model);
    let stop = |x: &Vector3<f64>| x.norm() > radius;
    let every = opts.sample_every.max(1);
    let t0 = init.t;
    let om = drive.omega;

    if let Geometry::Hyperbolic { r0 } = model.layout().geometry {
        let k = 4.0 * qm / (r0 * r0 * om * om);
        let (a, q) = (k * drive.offset, 0.5 * k * drive.amplitude);
        let phase = drive.phase("rf");
        let stray = 4.0 * qm / (om * om) * opts.stray_field;
        let f = move |x: &Vector3<f64>, z: f64| -> Result<Vector3<f64>> {
            let c = a - 2.0 * q * (2.0 * z + phase).cos();
            Ok(Vector3::new(-c * x.x, c * x.y, 0.0) + stray)
        };
        let z0 = 0.5 * om * t0;
        let to_time = move |z: f64| 2.0 * z / om;
        return Ok(rk4(&f, init.position, init.velocity * (2.0 / om), z0, 0.5 * om * opts.dt, n, every, &stop, &to_time, 0.5 * om));
    }

    let stray = qm * opts.stray_field;
    let f = |x: &Vector3<f64>, t: f64| -> Result<Vector3<f64>> { Ok(-qm * model.potential_gradient_at(x, t)? + stray) };
    Ok(rk4(&f, init.position, init.velocity, t0, opts.dt, n, every, &stop, &|t| t, 1.0))
}

/// Secular motion only: the ion moves in the static effective potential
/// `psi + Q phi_dc` (plus stray field). No resolution guard applies.
pub fn integrate_pseudo_trajectory(model: &TrapModel, init: &TrajectoryState, opts: &TrajectoryOptions) -> Result<Trajectory> {
    let n = opts.check()?;
    let ion = model.ion();
    let radius = divergence_radius(model);
    let stop = |x: &Vector3<f64>| x.norm() > radius;
    let stray = ion.charge * opts.stray_field;
    let f = |x: &Vector3<f64>, _t: f64| -> Result<Vector3<f64>> {
        let mut g = model.pseudo_gradient(x)?;
        if !model.static_field().is_empty() {
            g += ion.charge * model.static_field().gradient(x)?;
        }
        Ok((stray - g) / ion.mass)
    };
    Ok(rk4(&f, init.position, init.velocity, init.t, opts.dt, n, opts.sample_every.max(1), &stop, &|t| t, 1.0))
}
