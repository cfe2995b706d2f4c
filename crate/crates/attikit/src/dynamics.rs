//! Open-loop rigid-body rotational dynamics and fixed-step integration.
//!
//! The state is an attitude quaternion plus a body-frame angular velocity;
//! its time derivative follows Euler's second law,
//!
//! ```text
//! qdot     = 1/2 * q * [0, omega]
//! omegadot = J^-1 * (tau - omega x J omega)
//! ```
//!
//! Two explicit fixed-step integrators are provided: classical fourth-order
//! Runge-Kutta and the Dormand-Prince 5(4) tableau run at fixed step with
//! the embedded error estimate skipped (only the fifth-order solution is
//! formed, so the FSAL seventh stage is never evaluated). The quaternion is
//! renormalized once per step; that is the single drift-control point of
//! the whole pipeline.

use thiserror::Error;

use crate::control::{attitude_error, control_torque, sea_vector, ControlLawId};
use crate::experiments::SimConfig;
use crate::quat::{Mat3, Quat, Vec3};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid inertia matrix: {0}")]
    InvalidInertia(String),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("non-finite derivative at t = {t} s (last state q = {q}, omega = {omega})")]
    IntegrationFault { t: f64, q: Quat, omega: Vec3 },
}

/// Symmetric positive-definite inertia matrix with its inverse cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaMatrix {
    j: Mat3,
    j_inv: Mat3,
}

impl InertiaMatrix {
    pub fn from_diagonal(jx: f64, jy: f64, jz: f64) -> Result<Self, SimError> {
        Self::from_matrix(Mat3::diagonal(jx, jy, jz))
    }

    pub fn from_matrix(j: Mat3) -> Result<Self, SimError> {
        let scale = j.e.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if scale == 0.0 || !j.e.iter().flatten().all(|v| v.is_finite()) {
            return Err(SimError::InvalidInertia(
                "entries must be finite and nonzero".into(),
            ));
        }
        let sym_tol = 1e-12 * scale.max(1.0);
        for i in 0..3 {
            for k in (i + 1)..3 {
                if (j.e[i][k] - j.e[k][i]).abs() > sym_tol {
                    return Err(SimError::InvalidInertia(format!(
                        "not symmetric: |J[{i}][{k}] - J[{k}][{i}]| = {}",
                        (j.e[i][k] - j.e[k][i]).abs()
                    )));
                }
            }
        }
        // Sylvester criterion on the leading principal minors
        let m1 = j.e[0][0];
        let m2 = j.e[0][0] * j.e[1][1] - j.e[0][1] * j.e[1][0];
        let m3 = j.det();
        if m1 <= 0.0 || m2 <= 0.0 || m3 <= 0.0 {
            return Err(SimError::InvalidInertia(format!(
                "not positive definite: leading minors {m1}, {m2}, {m3}"
            )));
        }
        let j_inv = invert_via_adjugate(&j, m3);
        let residual = j.mul_mat(j_inv).max_abs_diff(Mat3::IDENTITY);
        if residual > 1e-10 {
            return Err(SimError::InvalidInertia(format!(
                "inverse residual {residual} exceeds 1e-10"
            )));
        }
        Ok(Self { j, j_inv })
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.j
    }

    pub fn inverse(&self) -> &Mat3 {
        &self.j_inv
    }

    /// `J v`
    #[inline]
    pub fn apply(&self, v: Vec3) -> Vec3 {
        self.j.mul_vec(v)
    }

    /// `J^-1 v`
    #[inline]
    pub fn apply_inverse(&self, v: Vec3) -> Vec3 {
        self.j_inv.mul_vec(v)
    }
}

fn invert_via_adjugate(m: &Mat3, det: f64) -> Mat3 {
    let e = m.e;
    let inv_det = 1.0 / det;
    let cof =
        |r1: usize, c1: usize, r2: usize, c2: usize| e[r1][c1] * e[r2][c2] - e[r1][c2] * e[r2][c1];
    Mat3::new([
        [
            cof(1, 1, 2, 2) * inv_det,
            cof(0, 2, 2, 1) * inv_det,
            cof(0, 1, 1, 2) * inv_det,
        ],
        [
            cof(1, 2, 2, 0) * inv_det,
            cof(0, 0, 2, 2) * inv_det,
            cof(0, 2, 1, 0) * inv_det,
        ],
        [
            cof(1, 0, 2, 1) * inv_det,
            cof(0, 1, 2, 0) * inv_det,
            cof(0, 0, 1, 1) * inv_det,
        ],
    ])
}

/// Attitude quaternion (body relative to inertial) and body-frame angular
/// velocity. The integrator keeps `q` within 1e-9 of unit norm at every
/// exposed sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyState {
    pub q: Quat,
    pub omega: Vec3,
}

impl BodyState {
    pub const fn new(q: Quat, omega: Vec3) -> Self {
        Self { q, omega }
    }

    pub fn at_rest() -> Self {
        Self {
            q: Quat::IDENTITY,
            omega: Vec3::ZERO,
        }
    }
}

/// Fixed-step integrator selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepperId {
    Rk4,
    Dp5,
}

/// Time derivative of [`BodyState`] under an applied torque.
///
/// The returned quaternion is a rate, not a rotation; it is not unit length.
pub fn openloop_deriv(state: &BodyState, tau: Vec3, inertia: &InertiaMatrix) -> (Quat, Vec3) {
    let qdot = (state.q * Quat::pure(state.omega)) * 0.5;
    let gyro = state.omega.cross(inertia.apply(state.omega));
    let omegadot = inertia.apply_inverse(tau - gyro);
    (qdot, omegadot)
}

struct Tableau {
    stages: usize,
    c: [f64; 6],
    a: [[f64; 6]; 6],
    b: [f64; 6],
}

const RK4: Tableau = Tableau {
    stages: 4,
    c: [0.0, 0.5, 0.5, 1.0, 0.0, 0.0],
    a: [
        [0.0; 6],
        [0.5, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.5, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        [0.0; 6],
        [0.0; 6],
    ],
    b: [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0, 0.0, 0.0],
};

const DP5: Tableau = Tableau {
    stages: 6,
    c: [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0],
    a: [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
    ],
    b: [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
};

type StateVec = [f64; 7];

#[inline]
fn pack(s: &BodyState) -> StateVec {
    [
        s.q.m, s.q.n.x, s.q.n.y, s.q.n.z, s.omega.x, s.omega.y, s.omega.z,
    ]
}

#[inline]
fn unpack(y: &StateVec) -> BodyState {
    BodyState {
        q: Quat::new(y[0], y[1], y[2], y[3]),
        omega: Vec3::new(y[4], y[5], y[6]),
    }
}

/// One explicit fixed step of the open-loop dynamics under `torque_fn`.
///
/// The torque is re-evaluated at every stage of the tableau. The updated
/// quaternion is renormalized before returning; identical inputs produce
/// bit-identical outputs.
pub fn step<F>(
    state: &BodyState,
    torque_fn: &mut F,
    t: f64,
    dt: f64,
    inertia: &InertiaMatrix,
    stepper: StepperId,
) -> Result<BodyState, SimError>
where
    F: FnMut(f64, &BodyState) -> Vec3,
{
    let tableau = match stepper {
        StepperId::Rk4 => &RK4,
        StepperId::Dp5 => &DP5,
    };
    let fault = |t: f64| SimError::IntegrationFault {
        t,
        q: state.q,
        omega: state.omega,
    };

    let y0 = pack(state);
    let mut k = [[0.0; 7]; 6];
    for i in 0..tableau.stages {
        let mut yi = y0;
        for (j, kj) in k.iter().enumerate().take(i) {
            let aij = tableau.a[i][j];
            if aij != 0.0 {
                for (y, kv) in yi.iter_mut().zip(kj) {
                    *y += dt * aij * kv;
                }
            }
        }
        let si = unpack(&yi);
        let tau = torque_fn(t + tableau.c[i] * dt, &si);
        let (qdot, omegadot) = openloop_deriv(&si, tau, inertia);
        k[i] = [
            qdot.m, qdot.n.x, qdot.n.y, qdot.n.z, omegadot.x, omegadot.y, omegadot.z,
        ];
        if !k[i].iter().all(|v| v.is_finite()) {
            return Err(fault(t));
        }
    }

    let mut y1 = y0;
    for (i, ki) in k.iter().enumerate().take(tableau.stages) {
        let bi = tableau.b[i];
        for (y, kv) in y1.iter_mut().zip(ki) {
            *y += dt * bi * kv;
        }
    }
    let s1 = unpack(&y1);
    let q = s1.q.normalize().map_err(|_| fault(t))?;
    Ok(BodyState { q, omega: s1.omega })
}

/// One logged point of a closed-loop trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub q: Quat,
    pub omega: Vec3,
    /// Attitude error against the reference at `t`.
    pub q_e: Quat,
    pub omega_e: Vec3,
    /// Rotation error in `[0, 2*pi]`.
    pub theta_e: f64,
    pub axis_defined: bool,
    /// Norms of the three proportional-term vectors at this state.
    pub n_norm: f64,
    pub p1_norm: f64,
    pub p2_norm: f64,
    /// Control torque applied at this instant.
    pub tau: Vec3,
}

/// Time-sampled log of a single closed-loop run.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub config: SimConfig,
    pub samples: Vec<TrajectorySample>,
}

impl TrajectoryRecord {
    /// Spacing between logged samples.
    pub fn sample_dt(&self) -> f64 {
        self.config.dt * self.config.log_every as f64
    }
}

fn make_sample(
    t: f64,
    state: &BodyState,
    config: &SimConfig,
    tau_override: Option<Vec3>,
) -> TrajectorySample {
    let r = config.reference.at(t);
    let q_e = attitude_error(state.q, r.q_d);
    let aa = q_e.axis_angle();
    let omega_d = crate::control::omega_des_from_rate(state.q, r.q_d, r.qdot_d);
    let omega_e = omega_d - state.omega;
    let tau = tau_override
        .unwrap_or_else(|| control_torque(config.law, state, &r, &config.inertia, &config.gains));
    TrajectorySample {
        t,
        q: state.q,
        omega: state.omega,
        q_e,
        omega_e,
        theta_e: aa.angle,
        axis_defined: aa.axis_defined,
        n_norm: sea_vector(ControlLawId::Benchmark, q_e).norm(),
        p1_norm: sea_vector(ControlLawId::Sea1, q_e).norm(),
        p2_norm: sea_vector(ControlLawId::Sea2, q_e).norm(),
        tau,
    }
}

/// Run one closed-loop simulation to `t_final`, logging every
/// `log_every`-th step (plus the initial state).
///
/// The run always covers the full horizon; stabilization detection is a
/// post-pass over the record. By default the control torque is evaluated
/// continuously (at every integrator stage); setting
/// [`SimConfig::control_hold`] switches to a zero-order hold at that period.
pub fn simulate(config: &SimConfig) -> Result<TrajectoryRecord, SimError> {
    config.validate().map_err(SimError::InvalidConfig)?;
    let n_steps = ((config.t_final / config.dt).round() as usize).max(1);
    let hold_steps = config
        .control_hold
        .map(|period| ((period / config.dt).round() as usize).max(1));

    let mut state = config.initial;
    let mut samples = Vec::with_capacity(n_steps / config.log_every + 2);
    let mut held_tau = Vec3::ZERO;
    samples.push(make_sample(0.0, &state, config, None));

    for i in 0..n_steps {
        let t = i as f64 * config.dt;
        state = match hold_steps {
            None => {
                let mut torque = |tt: f64, s: &BodyState| {
                    control_torque(
                        config.law,
                        s,
                        &config.reference.at(tt),
                        &config.inertia,
                        &config.gains,
                    )
                };
                step(
                    &state,
                    &mut torque,
                    t,
                    config.dt,
                    &config.inertia,
                    config.stepper,
                )?
            }
            Some(h) => {
                if i % h == 0 {
                    held_tau = control_torque(
                        config.law,
                        &state,
                        &config.reference.at(t),
                        &config.inertia,
                        &config.gains,
                    );
                }
                let mut torque = |_: f64, _: &BodyState| held_tau;
                step(
                    &state,
                    &mut torque,
                    t,
                    config.dt,
                    &config.inertia,
                    config.stepper,
                )?
            }
        };
        if (i + 1) % config.log_every == 0 {
            let t_next = (i + 1) as f64 * config.dt;
            let tau_logged = hold_steps.map(|_| held_tau);
            samples.push(make_sample(t_next, &state, config, tau_logged));
        }
    }
    Ok(TrajectoryRecord {
        config: config.clone(),
        samples,
    })
}
