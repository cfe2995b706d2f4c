//! Tumble-recovery scenarios, the full-circle sweep, and result persistence.
//!
//! A tumble-recovery case starts the body at rest, rotated `theta0` degrees
//! about a random axis, with the hover set-point (identity attitude, zero
//! rate) as the reference. Random axes come from a ChaCha8 stream keyed by
//! the case seed: three standard normals via the Box-Muller transform,
//! normalized onto the unit sphere. Per-case seeds are derived from the
//! sweep's base seed and `theta0` with a SplitMix64 mix, so every law sees
//! the same axis at the same `theta0` and the comparison is paired.

use std::fs;
use std::io::{BufWriter, Write as _};
use std::ops::RangeInclusive;
use std::path::Path;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use thiserror::Error;

use crate::control::{ControlLawId, Gains, Reference};
use crate::dynamics::{simulate, BodyState, InertiaMatrix, StepperId, TrajectoryRecord};
use crate::quat::{Quat, Vec3};

/// Default principal inertia, kg·m²; a 32 g quadrotor class body.
pub const DEFAULT_INERTIA_DIAG: [f64; 3] = [16.57e-6, 16.66e-6, 29.26e-6];
pub const DEFAULT_K_THETA: f64 = 1000.0;
pub const DEFAULT_K_OMEGA: f64 = 100.0;
pub const DEFAULT_DT: f64 = 1e-4;
pub const DEFAULT_T_FINAL: f64 = 5.0;
/// Log every 10th step: 1 kHz at the default dt.
pub const DEFAULT_LOG_EVERY: usize = 10;
/// Coarse CI mode: 1 ms steps, every step logged (still 1 kHz).
pub const FAST_DT: f64 = 1e-3;
pub const FAST_LOG_EVERY: usize = 1;
/// Figure-of-merit threshold for `stabilization_time`.
pub const STABILIZATION_THRESHOLD_DEG: f64 = 15.0;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("theta0 must be in [1, 359] degrees, got {0}")]
    ThetaOutOfRange(u32),
    #[error("trajectory has no samples")]
    EmptyTrajectory,
    #[error("dwell window must be positive, got {0}")]
    BadDwell(f64),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
}

/// Everything one closed-loop run needs; pure data, so identical configs
/// give bit-identical trajectories.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub inertia: InertiaMatrix,
    pub gains: Gains,
    pub law: ControlLawId,
    pub stepper: StepperId,
    pub dt: f64,
    pub t_final: f64,
    pub log_every: usize,
    pub initial: BodyState,
    pub reference: Reference,
    pub seed: u64,
    /// Zero-order-hold period for the controller; `None` evaluates the
    /// torque continuously at every integrator stage.
    pub control_hold: Option<f64>,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(format!("dt must be positive, got {}", self.dt));
        }
        if !self.t_final.is_finite() || self.t_final < self.dt {
            return Err(format!("t_final must be at least dt, got {}", self.t_final));
        }
        if self.log_every == 0 {
            return Err("log_every must be at least 1".into());
        }
        let qnorm = self.initial.q.norm();
        if (qnorm - 1.0).abs() > 1e-9 {
            return Err(format!("initial quaternion is not unit (norm {qnorm})"));
        }
        if !self.initial.omega.is_finite() {
            return Err("initial angular velocity must be finite".into());
        }
        if let Some(hold) = self.control_hold {
            if !hold.is_finite() || hold <= 0.0 {
                return Err(format!("control hold period must be positive, got {hold}"));
            }
        }
        Ok(())
    }
}

/// One sweep case: which law, the initial rotation, and what came out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub law: ControlLawId,
    pub theta0_deg: u32,
    pub seed: u64,
    /// First time the rotation error dropped below the threshold, if ever.
    /// `None` also marks cases that faulted (their other fields are NaN).
    pub stab_time_s: Option<f64>,
    pub final_theta_e_rad: f64,
    pub max_torque_nm: f64,
}

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the per-case seed from a sweep's base seed and `theta0`.
///
/// Depends on `theta0` but not on the law, so paired cases share an axis.
pub fn case_seed(base_seed: u64, theta0_deg: u32) -> u64 {
    splitmix64(base_seed ^ (theta0_deg as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// f64 in (0, 1) from the top 53 bits of a u64 draw; never exactly 0 or 1.
fn open01(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Uniform direction on the unit sphere: three Box-Muller standard normals,
/// normalized. Deterministic in the seed.
pub fn random_unit_axis(seed: u64) -> Vec3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let (u1, u2) = (open01(&mut rng), open01(&mut rng));
        let (u3, u4) = (open01(&mut rng), open01(&mut rng));
        let r1 = (-2.0 * u1.ln()).sqrt();
        let r2 = (-2.0 * u3.ln()).sqrt();
        let g = Vec3::new(
            r1 * (std::f64::consts::TAU * u2).cos(),
            r1 * (std::f64::consts::TAU * u2).sin(),
            r2 * (std::f64::consts::TAU * u4).cos(),
        );
        let norm = g.norm();
        if norm > 1e-6 {
            return g * (1.0 / norm);
        }
    }
}

/// Build the standard tumble-recovery case: at rest, `theta0_deg` away from
/// the hover set-point about a seed-derived random axis.
pub fn make_tumble_config(
    theta0_deg: u32,
    law: ControlLawId,
    seed: u64,
) -> Result<SimConfig, ExperimentError> {
    if !(1..=359).contains(&theta0_deg) {
        return Err(ExperimentError::ThetaOutOfRange(theta0_deg));
    }
    let axis = random_unit_axis(seed);
    let q0 = Quat::from_axis_angle(axis, (theta0_deg as f64).to_radians())
        .expect("axis is unit by construction");
    let [jx, jy, jz] = DEFAULT_INERTIA_DIAG;
    Ok(SimConfig {
        inertia: InertiaMatrix::from_diagonal(jx, jy, jz).expect("default inertia is SPD"),
        gains: Gains::new(DEFAULT_K_THETA, DEFAULT_K_OMEGA).expect("default gains are positive"),
        law,
        stepper: StepperId::Dp5,
        dt: DEFAULT_DT,
        t_final: DEFAULT_T_FINAL,
        log_every: DEFAULT_LOG_EVERY,
        initial: BodyState::new(q0, Vec3::ZERO),
        reference: Reference::constant(Quat::IDENTITY).expect("identity is unit"),
        seed,
        control_hold: None,
    })
}

/// First sample time with `theta_e` strictly below `threshold_deg`.
pub fn stabilization_time(
    traj: &TrajectoryRecord,
    threshold_deg: f64,
) -> Result<Option<f64>, ExperimentError> {
    if traj.samples.is_empty() {
        return Err(ExperimentError::EmptyTrajectory);
    }
    let threshold = threshold_deg.to_radians();
    Ok(traj
        .samples
        .iter()
        .find(|s| s.theta_e < threshold)
        .map(|s| s.t))
}

/// Sustained-dwell variant: first sample time opening a below-threshold run
/// that lasts at least `dwell_s`.
pub fn stabilization_time_sustained(
    traj: &TrajectoryRecord,
    threshold_deg: f64,
    dwell_s: f64,
) -> Result<Option<f64>, ExperimentError> {
    if traj.samples.is_empty() {
        return Err(ExperimentError::EmptyTrajectory);
    }
    if !dwell_s.is_finite() || dwell_s <= 0.0 {
        return Err(ExperimentError::BadDwell(dwell_s));
    }
    let threshold = threshold_deg.to_radians();
    let mut run_start: Option<f64> = None;
    for s in &traj.samples {
        if s.theta_e < threshold {
            let start = *run_start.get_or_insert(s.t);
            if s.t - start >= dwell_s {
                return Ok(Some(start));
            }
        } else {
            run_start = None;
        }
    }
    Ok(None)
}

fn run_case(law: ControlLawId, theta0_deg: u32, base_seed: u64, fast: bool) -> SweepRow {
    let seed = case_seed(base_seed, theta0_deg);
    let mut config = match make_tumble_config(theta0_deg, law, seed) {
        Ok(c) => c,
        Err(_) => unreachable!("theta range validated by run_sweep"),
    };
    if fast {
        config.dt = FAST_DT;
        config.log_every = FAST_LOG_EVERY;
    }
    match simulate(&config) {
        Ok(traj) => {
            let stab = stabilization_time(&traj, STABILIZATION_THRESHOLD_DEG)
                .expect("simulate always logs the initial sample");
            let final_theta = traj.samples.last().map(|s| s.theta_e).unwrap_or(f64::NAN);
            let max_tau = traj
                .samples
                .iter()
                .map(|s| s.tau.norm())
                .fold(0.0f64, f64::max);
            SweepRow {
                law,
                theta0_deg,
                seed,
                stab_time_s: stab,
                final_theta_e_rad: final_theta,
                max_torque_nm: max_tau,
            }
        }
        Err(_) => SweepRow {
            law,
            theta0_deg,
            seed,
            stab_time_s: None,
            final_theta_e_rad: f64::NAN,
            max_torque_nm: f64::NAN,
        },
    }
}

/// Run every (law, theta0) case of the sweep.
///
/// Cases are independent pure jobs; `parallelism` of 1 runs them inline,
/// 0 lets the thread pool pick a width. Output rows are ordered by
/// (law, theta0) and are bit-identical regardless of worker count.
/// Integration faults are recorded in their row, never fatal to the sweep.
pub fn run_sweep(
    laws: &[ControlLawId],
    theta_range: RangeInclusive<u32>,
    base_seed: u64,
    parallelism: usize,
    fast: bool,
) -> Result<Vec<SweepRow>, ExperimentError> {
    for theta in [*theta_range.start(), *theta_range.end()] {
        if !(1..=359).contains(&theta) {
            return Err(ExperimentError::ThetaOutOfRange(theta));
        }
    }
    let mut law_list = laws.to_vec();
    law_list.sort_unstable();
    law_list.dedup();
    let jobs: Vec<(ControlLawId, u32)> = law_list
        .iter()
        .flat_map(|&law| theta_range.clone().map(move |theta| (law, theta)))
        .collect();

    let rows = if parallelism == 1 {
        jobs.iter()
            .map(|&(law, theta)| run_case(law, theta, base_seed, fast))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .map_err(|e| ExperimentError::ThreadPool(e.to_string()))?;
        pool.install(|| {
            jobs.par_iter()
                .map(|&(law, theta)| run_case(law, theta, base_seed, fast))
                .collect()
        })
    };
    Ok(rows)
}

pub const SWEEP_CSV_HEADER: &str =
    "law,theta0_deg,seed,stab_time_s,final_theta_e_rad,max_torque_Nm";
pub const TRAJECTORY_CSV_HEADER: &str =
    "t_s,qw,qx,qy,qz,wx,wy,wz,theta_e_rad,n_norm,p1_norm,p2_norm,tau_x,tau_y,tau_z";

/// Write sweep rows as CSV. An absent stabilization time (including NaN)
/// is encoded as an empty field.
pub fn write_results(rows: &[SweepRow], path: &Path) -> Result<(), ExperimentError> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        let stab = match r.stab_time_s {
            Some(v) if !v.is_nan() => v.to_string(),
            _ => String::new(),
        };
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.law, r.theta0_deg, r.seed, stab, r.final_theta_e_rad, r.max_torque_nm
        )?;
    }
    w.flush()?;
    Ok(())
}

fn parse_field<T: FromStr>(
    raw: &str,
    what: &str,
    path: &str,
    line: usize,
) -> Result<T, ExperimentError>
where
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e| ExperimentError::Parse {
        path: path.to_string(),
        line,
        msg: format!("bad {what} '{raw}': {e}"),
    })
}

/// Read a sweep table back; inverse of [`write_results`].
pub fn read_results(path: &Path) -> Result<Vec<SweepRow>, ExperimentError> {
    let text = fs::read_to_string(path)?;
    let shown = path.display().to_string();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == SWEEP_CSV_HEADER => {}
        Some((_, header)) => {
            return Err(ExperimentError::Parse {
                path: shown,
                line: 1,
                msg: format!("unexpected header '{header}'"),
            })
        }
        None => {
            return Err(ExperimentError::Parse {
                path: shown,
                line: 1,
                msg: "empty file".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 6 {
            return Err(ExperimentError::Parse {
                path: shown,
                line,
                msg: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let law = ControlLawId::from_str(fields[0]).map_err(|e| ExperimentError::Parse {
            path: shown.clone(),
            line,
            msg: e.to_string(),
        })?;
        let stab = if fields[3].is_empty() {
            None
        } else {
            let v: f64 = parse_field(fields[3], "stab_time_s", &shown, line)?;
            if v.is_nan() {
                None
            } else {
                Some(v)
            }
        };
        rows.push(SweepRow {
            law,
            theta0_deg: parse_field(fields[1], "theta0_deg", &shown, line)?,
            seed: parse_field(fields[2], "seed", &shown, line)?,
            stab_time_s: stab,
            final_theta_e_rad: parse_field(fields[4], "final_theta_e_rad", &shown, line)?,
            max_torque_nm: parse_field(fields[5], "max_torque_Nm", &shown, line)?,
        });
    }
    Ok(rows)
}

/// One row of a trajectory dump; carries exactly the CSV columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajPoint {
    pub t: f64,
    pub q: Quat,
    pub omega: Vec3,
    pub theta_e: f64,
    pub n_norm: f64,
    pub p1_norm: f64,
    pub p2_norm: f64,
    pub tau: Vec3,
}

/// Dump a trajectory record in the fixed 15-column layout.
pub fn write_trajectory(traj: &TrajectoryRecord, path: &Path) -> Result<(), ExperimentError> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{TRAJECTORY_CSV_HEADER}")?;
    for s in &traj.samples {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.t,
            s.q.m,
            s.q.n.x,
            s.q.n.y,
            s.q.n.z,
            s.omega.x,
            s.omega.y,
            s.omega.z,
            s.theta_e,
            s.n_norm,
            s.p1_norm,
            s.p2_norm,
            s.tau.x,
            s.tau.y,
            s.tau.z
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Read a trajectory dump back as plain points.
pub fn read_trajectory(path: &Path) -> Result<Vec<TrajPoint>, ExperimentError> {
    let text = fs::read_to_string(path)?;
    let shown = path.display().to_string();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == TRAJECTORY_CSV_HEADER => {}
        Some((_, header)) => {
            return Err(ExperimentError::Parse {
                path: shown,
                line: 1,
                msg: format!("unexpected header '{header}'"),
            })
        }
        None => {
            return Err(ExperimentError::Parse {
                path: shown,
                line: 1,
                msg: "empty file".into(),
            })
        }
    }
    let mut points = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 15 {
            return Err(ExperimentError::Parse {
                path: shown,
                line,
                msg: format!("expected 15 fields, got {}", fields.len()),
            });
        }
        let mut vals = [0.0f64; 15];
        for (i, (v, raw_field)) in vals.iter_mut().zip(&fields).enumerate() {
            *v = parse_field(raw_field, &format!("column {}", i + 1), &shown, line)?;
        }
        points.push(TrajPoint {
            t: vals[0],
            q: Quat::new(vals[1], vals[2], vals[3], vals[4]),
            omega: Vec3::new(vals[5], vals[6], vals[7]),
            theta_e: vals[8],
            n_norm: vals[9],
            p1_norm: vals[10],
            p2_norm: vals[11],
            tau: Vec3::new(vals[12], vals[13], vals[14]),
        });
    }
    Ok(points)
}
