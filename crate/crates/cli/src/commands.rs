use std::fmt::Write as _;
use std::fs;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use paultrap::analysis::{analyze, find_rf_nil, TrapMetrics, TrapModel};
use paultrap::config::TrapConfig;
use paultrap::dynamics::{integrate_pseudo_trajectory, integrate_trajectory, stability_map, TrajectoryOptions, TrajectoryState};
use paultrap::electrical::{
    breakdown_voltage, impedance, material, power_dissipated, BreakdownMode, BreakdownSpec, CircuitModel, PowerEstimate,
};
use paultrap::format::fmt_f64;
use paultrap::geometry::{ion_from_catalog, Geometry};
use paultrap::heating::{
    fit_measurements, heating_rate, heating_rate_for, read_measurements, HeatingEstimate, NoiseModel, PowerLawFit,
    TemperatureLaw,
};

use crate::{AnalyzeArgs, Cli, Command, DissipationArgs, Global, HeatingArgs, MapArgs, ScanArgs, TrajectoryArgs};

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<paultrap::Error> for Failure {
    fn from(e: paultrap::Error) -> Self {
        Failure { code: if e.is_input_error() { 2 } else { 3 }, message: e.to_string() }
    }
}

fn input(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type Outcome = Result<(), Failure>;

pub fn run(cli: &Cli) -> Outcome {
    if cli.global.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
            .map_err(|e| input(format!("thread pool: {e}")))?;
    }
    let g = &cli.global;
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(g, a),
        Command::StabilityMap(a) => cmd_stability_map(g, a),
        Command::Trajectory(a) => cmd_trajectory(g, a),
        Command::Scan(a) => cmd_scan(g, a),
        Command::Heating(a) => cmd_heating(g, a),
        Command::Dissipation(a) => cmd_dissipation(g, a),
    }
}

fn load_config(g: &Global) -> Result<TrapConfig, Failure> {
    let path = g.config.as_ref().ok_or_else(|| input("--config is required for this command"))?;
    let text = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    TrapConfig::from_json(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

/// Artifact to `--out` (then the summary to stdout) or to stdout. Nothing is
/// written unless the whole artifact was produced.
fn emit(g: &Global, content: &str, summary: impl FnOnce() -> String) -> Outcome {
    match &g.out {
        Some(path) => {
            fs::write(path, content).map_err(|e| input(format!("{}: {e}", path.display())))?;
            print!("{}", summary());
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn to_json(v: &impl Serialize) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(paultrap::Error::from)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct SamplingCheck {
    samples: usize,
    seed: u64,
    min_psi_j: f64,
    negative: usize,
}

#[derive(Serialize)]
struct AnalyzeReport {
    #[serde(flatten)]
    metrics: TrapMetrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampling_check: Option<SamplingCheck>,
}

fn sampling_check(model: &TrapModel, n: usize, seed: u64) -> Result<SamplingCheck, Failure> {
    let b = model.search_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_psi_j = f64::INFINITY;
    let mut negative = 0;
    for _ in 0..n {
        let p = Vector3::from_fn(|i, _| if b.max[i] > b.min[i] { rng.random_range(b.min[i]..b.max[i]) } else { b.min[i] });
        let psi = model.pseudopotential(&p)?;
        min_psi_j = min_psi_j.min(psi);
        negative += usize::from(psi < 0.0);
    }
    Ok(SamplingCheck { samples: n, seed, min_psi_j, negative })
}

fn summary_table(m: &TrapMetrics) -> String {
    let mut s = String::new();
    let v3 = |v: &[f64; 3]| format!("{} {} {}", fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2]));
    let _ = writeln!(s, "{:<26}{}", "rf nil (m)", v3(&m.rf_nil_m));
    let _ = writeln!(s, "{:<26}{} eV", "trap depth", fmt_f64(m.depth_ev));
    let _ = writeln!(s, "{:<26}{}", "secular frequencies (Hz)", v3(&m.secular_frequencies_hz));
    let _ = writeln!(s, "{:<26}{}", "radial rotation (rad)", fmt_f64(m.theta_rad));
    let _ = writeln!(s, "{:<26}{}", "a", v3(&m.a));
    let _ = writeln!(s, "{:<26}{}", "q", v3(&m.q));
    let _ = writeln!(s, "{:<26}{}", "q effective", fmt_f64(m.q_effective));
    let _ = writeln!(s, "{:<26}{} (r0' = {} m)", "efficiency eta", fmt_f64(m.eta), fmt_f64(m.r0_prime_m));
    for w in &m.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

fn cmd_analyze(g: &Global, a: &AnalyzeArgs) -> Outcome {
    let cfg = load_config(g)?;
    let model = cfg.model()?;
    let metrics = analyze(&model)?;
    let check = if a.samples > 0 { Some(sampling_check(&model, a.samples, g.seed)?) } else { None };
    if let Some(c) = &check {
        if c.negative > 0 {
            return Err(Failure { code: 3, message: format!("pseudopotential negative at {} sample points", c.negative) });
        }
    }
    let table = summary_table(&metrics);
    let json = to_json(&AnalyzeReport { metrics, sampling_check: check })?;
    emit(g, &json, || table)
}

fn cmd_stability_map(g: &Global, a: &MapArgs) -> Outcome {
    for (lo, hi, name) in [(a.a_min, a.a_max, "a"), (a.q_min, a.q_max, "q")] {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(input(format!("{name} range must satisfy min <= max, got [{lo}, {hi}]")));
        }
    }
    if a.na < 2 || a.nq < 2 {
        return Err(input(format!("map resolution must be at least 2x2, got {}x{}", a.na, a.nq)));
    }
    let map = stability_map((a.a_min, a.a_max), (a.q_min, a.q_max), a.na, a.nq)?;
    let mut out = Vec::new();
    map.write_csv(&mut out)?;
    let stable = map.cells.iter().filter(|c| c.overlap.is_stable()).count();
    emit(g, &String::from_utf8_lossy(&out), || format!("{} cells, {stable} stable in both axes\n", map.cells.len()))
}

fn vec3(v: &[f64], name: &str) -> Result<Vector3<f64>, Failure> {
    match v {
        [x, y, z] => Ok(Vector3::new(*x, *y, *z)),
        _ => Err(input(format!("--{name} takes three comma-separated values"))),
    }
}

fn cmd_trajectory(g: &Global, a: &TrajectoryArgs) -> Outcome {
    let cfg = load_config(g)?;
    let model = cfg.model()?;
    let nil = match model.layout().geometry {
        Geometry::Hyperbolic { .. } => Vector3::zeros(),
        _ => find_rf_nil(&model, &model.search_box())?,
    };
    if !(a.periods > 0.0 && a.periods.is_finite()) || a.steps_per_period == 0 {
        return Err(input("--periods and --steps-per-period must be positive"));
    }
    let period = std::f64::consts::TAU / model.layout().drive.omega;
    let dt = period / a.steps_per_period as f64;
    let init = TrajectoryState { t: 0.0, position: nil + vec3(&a.offset, "offset")?, velocity: vec3(&a.velocity, "velocity")? };
    let opts = TrajectoryOptions::new(dt, a.periods * period)
        .sample_every(a.sample_every)
        .with_stray_field(vec3(&a.stray, "stray")?);
    let tr = if a.pseudo { integrate_pseudo_trajectory(&model, &init, &opts)? } else { integrate_trajectory(&model, &init, &opts)? };
    let mut out = Vec::new();
    tr.write_csv(&mut out)?;
    emit(g, &String::from_utf8_lossy(&out), || match tr.divergence_time {
        Some(t) => format!("{} samples; diverged at t = {} s\n", tr.samples.len(), fmt_f64(t)),
        None => format!("{} samples; bounded\n", tr.samples.len()),
    })
}

const SCAN_COLUMNS: [&str; 26] = [
    "rf_nil_x_m",
    "rf_nil_y_m",
    "rf_nil_z_m",
    "depth_j",
    "depth_ev",
    "escape_x_m",
    "escape_y_m",
    "escape_z_m",
    "omega_1_rad_s",
    "omega_2_rad_s",
    "omega_3_rad_s",
    "f_1_hz",
    "f_2_hz",
    "f_3_hz",
    "theta_rad",
    "a_1",
    "a_2",
    "a_3",
    "q_1",
    "q_2",
    "q_3",
    "q_effective",
    "eta",
    "r0_prime_m",
    "warnings",
    "error",
];

fn metric_fields(m: &TrapMetrics) -> Vec<String> {
    let mut v: Vec<f64> = Vec::new();
    v.extend(m.rf_nil_m);
    v.push(m.depth_j);
    v.push(m.depth_ev);
    v.extend(m.escape_point_m);
    v.extend(m.secular_frequencies_rad_s);
    v.extend(m.secular_frequencies_hz);
    v.push(m.theta_rad);
    v.extend(m.a);
    v.extend(m.q);
    v.push(m.q_effective);
    v.push(m.eta);
    v.push(m.r0_prime_m);
    let mut s: Vec<String> = v.into_iter().map(fmt_f64).collect();
    s.push(m.warnings.join("; "));
    s
}

fn cmd_scan(g: &Global, a: &ScanArgs) -> Outcome {
    let cfg = load_config(g)?;
    cfg.check_path(&a.param)?;
    if a.values.is_empty() {
        return Err(input("--values must list at least one value"));
    }
    let rows: Vec<Vec<String>> = a
        .values
        .par_iter()
        .map(|&v| {
            let mut row = vec![fmt_f64(v)];
            match cfg.with_value(&a.param, v).and_then(|c| c.model()).and_then(|m| analyze(&m)) {
                Ok(m) => {
                    row.extend(metric_fields(&m));
                    row.push(String::new());
                }
                Err(e) => {
                    row.extend(std::iter::repeat_n(String::new(), SCAN_COLUMNS.len() - 1));
                    row.push(e.to_string());
                }
            }
            row
        })
        .collect();
    let failed = rows.iter().filter(|r| !r.last().is_some_and(|e| e.is_empty())).count();
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = std::iter::once(a.param.as_str()).chain(SCAN_COLUMNS).collect();
    let csv_err = |e: csv::Error| input(format!("csv: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for r in &rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| input(format!("csv: {e}")))?;
    emit(g, &String::from_utf8_lossy(&bytes), || format!("{} points, {failed} failed\n", rows.len()))
}

#[derive(Serialize)]
struct FitReport {
    #[serde(flatten)]
    fit: PowerLawFit,
    ordinate: &'static str,
}

#[derive(Serialize)]
struct HeatingReport {
    ion: String,
    omega_m_rad_s: f64,
    omega_rf_rad_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    noise_model: Option<NoiseModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    flat_s_e_v2_m2_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distance_m: Option<f64>,
    temperature_k: f64,
    #[serde(flatten)]
    estimate: HeatingEstimate,
}

fn cmd_heating(g: &Global, a: &HeatingArgs) -> Outcome {
    if let Some(path) = &a.measurements {
        let file = fs::File::open(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
        let fit = fit_measurements(&read_measurements(file)?)?;
        let json = to_json(&FitReport { fit, ordinate: "omega * S_E, rad/s x V^2/m^2/Hz" })?;
        return emit(g, &json, || format!("exponent {} over {} points\n", fmt_f64(fit.exponent), fit.n_points));
    }
    let cfg = match &g.config {
        Some(_) => Some(load_config(g)?),
        None => None,
    };
    let ion = match &cfg {
        Some(c) => c.ion()?,
        None => ion_from_catalog(&a.ion)?,
    };
    let omega_rf = a
        .omega_rf
        .or(cfg.as_ref().map(|c| c.drive.omega))
        .ok_or_else(|| input("--omega-rf (or a --config) is required"))?;
    let omega_m = a.omega_m.ok_or_else(|| input("--omega-m is required"))?;
    if !(omega_m > 0.0 && omega_m < omega_rf) {
        return Err(input(format!("--omega-m must lie in (0, omega_rf = {omega_rf}), got {omega_m}")));
    }
    let (estimate, noise_model, distance) = if let Some(s) = a.s_e {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(input("--s-e must be >= 0"));
        }
        (heating_rate_for(&ion, omega_m, omega_rf, |_| Ok(s), a.cross)?, None, None)
    } else {
        let omega0 = a.omega0.ok_or_else(|| input("--omega0 is required with a noise model"))?;
        let d0 = a.d0.ok_or_else(|| input("--d0 is required with a noise model"))?;
        let base = if a.cryogenic {
            NoiseModel::from_temperature_law(TemperatureLaw::cryogenic(), omega0, d0)?
        } else {
            NoiseModel::new(a.s0.ok_or_else(|| input("--s0, --s-e or --cryogenic is required"))?, omega0, d0)?
        };
        let noise = base.with_distance_exponent(a.beta).with_frequency_exponent(a.frequency_exponent);
        let d = a.distance.unwrap_or(d0);
        (heating_rate(&ion, omega_m, omega_rf, &noise, d, a.temperature, a.cross)?, Some(noise), Some(d))
    };
    let report = HeatingReport {
        ion: ion.name.clone(),
        omega_m_rad_s: omega_m,
        omega_rf_rad_s: omega_rf,
        noise_model,
        flat_s_e_v2_m2_hz: a.s_e,
        distance_m: distance,
        temperature_k: a.temperature,
        estimate,
    };
    let json = to_json(&report)?;
    emit(g, &json, || format!("heating rate {} quanta/s\n", fmt_f64(report.estimate.ndot)))
}

#[derive(Serialize)]
struct Breakdown {
    gap_m: f64,
    bulk_v: f64,
    surface_v: f64,
    spec: BreakdownSpec,
}

#[derive(Serialize)]
struct DissipationReport {
    v0_volts: f64,
    circuit: CircuitModel,
    conductance_s: f64,
    impedance_re_ohm: f64,
    impedance_im_ohm: f64,
    power: PowerEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    breakdown: Option<Breakdown>,
}

fn cmd_dissipation(g: &Global, a: &DissipationArgs) -> Outcome {
    let tan_delta = match (a.tan_delta, &a.material) {
        (Some(t), None) => t,
        (None, Some(name)) => material(name)?.tan_delta,
        _ => return Err(input("give exactly one of --tan-delta or --material")),
    };
    let circuit = CircuitModel::new(a.resistance, a.capacitance, tan_delta, a.omega)?.with_inductance(a.inductance)?;
    let z = impedance(&circuit)?;
    let power = power_dissipated(a.v0, &circuit)?;
    let breakdown = match (a.e_ref, a.d_ref, a.gap) {
        (None, None, None) => None,
        (Some(e_ref), Some(d_ref), Some(gap)) => {
            let spec = BreakdownSpec {
                e_ref,
                d_ref,
                bulk_exponent: a.bulk_exponent,
                flashover_exponent: a.flashover_exponent,
                surface_ratio: a.surface_ratio,
            };
            Some(Breakdown {
                gap_m: gap,
                bulk_v: breakdown_voltage(&spec, gap, BreakdownMode::Bulk)?,
                surface_v: breakdown_voltage(&spec, gap, BreakdownMode::Surface)?,
                spec,
            })
        }
        _ => return Err(input("breakdown needs all of --e-ref, --d-ref and --gap")),
    };
    let report = DissipationReport {
        v0_volts: a.v0,
        conductance_s: circuit.conductance(),
        circuit,
        impedance_re_ohm: z.re,
        impedance_im_ohm: z.im,
        power,
        breakdown,
    };
    let json = to_json(&report)?;
    emit(g, &json, || {
        format!("dissipated power {} W (small-loss limit {} W)\n", fmt_f64(power.full_w), fmt_f64(power.simplified_w))
    })
}
