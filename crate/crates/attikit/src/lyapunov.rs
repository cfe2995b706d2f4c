//! Numerical certification of the closed-loop stability argument.
//!
//! For each axis-angle law there is a candidate Lyapunov function,
//!
//! ```text
//! V1 = 1/2 k_theta^-1 |omega_e|^2 + 1/4 theta_e^2        + c (n_e.n_e + n_e.omega_e)
//! V2 = 1/2 k_theta^-1 |omega_e|^2 + 16 sin^2(theta_e / 8) + c  n_e.n_e + c n_e.omega_e
//! ```
//!
//! bounded below by `x^T P x` and decreasing at least as fast as
//! `-x^T Q x`, where `x = [|n_e|, |omega_e|]` and
//!
//! ```text
//! P = | c            -c/2          |   Q = | c k_theta        -c(k_omega+1)/2         |
//!     | -c/2   k_theta^-1 / 2      |       | -c(k_omega+1)/2   k_theta^-1 k_omega - c/2 |
//! ```
//!
//! both positive definite for small enough `c > 0`. Everything here checks
//! those claims numerically: [`pq_matrices`] builds P and Q,
//! [`max_feasible_c`] locates the feasibility edge, [`equilibrium_scan`]
//! refutes spurious closed-loop fixed points on a grid, and
//! [`decrease_check`] differentiates V along a simulated trajectory and
//! verifies the quadratic decrease bound sample by sample. The derivative
//! is taken by central differences over the logged samples, so the check
//! exercises the whole pipeline (dynamics, control law, V) at once.

use serde::Serialize;
use thiserror::Error;

use crate::control::{sea_vector, ControlLawId, Gains};
use crate::dynamics::TrajectoryRecord;
use crate::quat::{Quat, Vec3};

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("law {law} does not pair with {which:?} (sea1 with V1, sea2 with V2)")]
    LawMismatch {
        law: ControlLawId,
        which: LyapunovFn,
    },
    #[error("P or Q not positive definite at c = {c}: {detail}")]
    InfeasibleC { c: f64, detail: String },
    #[error("no feasible c in (0, 1e6]")]
    NoFeasibleC,
    #[error("trajectory needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("decrease check requires a constant reference")]
    NonConstantReference,
}

/// Which candidate Lyapunov function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LyapunovFn {
    V1,
    V2,
}

impl LyapunovFn {
    /// The law whose closed loop this function certifies.
    pub fn matching_law(&self) -> ControlLawId {
        match self {
            Self::V1 => ControlLawId::Sea1,
            Self::V2 => ControlLawId::Sea2,
        }
    }
}

/// The bound matrices P and Q for a given coupling constant `c`, with their
/// smallest eigenvalues (closed-form symmetric 2x2 eigensolve).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityMatrices {
    pub p: [[f64; 2]; 2],
    pub q: [[f64; 2]; 2],
    pub c: f64,
    pub lambda_min_p: f64,
    pub lambda_min_q: f64,
}

impl StabilityMatrices {
    pub fn both_pd(&self) -> bool {
        self.lambda_min_p > 0.0 && self.lambda_min_q > 0.0
    }

    /// Leading principal minors, for diagnostics when a matrix fails.
    pub fn minors(m: &[[f64; 2]; 2]) -> (f64, f64) {
        (m[0][0], m[0][0] * m[1][1] - m[0][1] * m[1][0])
    }
}

fn sym2_min_eig(m: &[[f64; 2]; 2]) -> f64 {
    let (a, b, d) = (m[0][0], m[0][1], m[1][1]);
    0.5 * ((a + d) - ((a - d).powi(2) + 4.0 * b * b).sqrt())
}

/// Build P and Q from the gains and coupling constant.
pub fn pq_matrices(gains: &Gains, c: f64) -> StabilityMatrices {
    let k_theta = gains.k_theta();
    let k_omega = gains.k_omega();
    let p = [[c, -0.5 * c], [-0.5 * c, 0.5 / k_theta]];
    let q = [
        [c * k_theta, -0.5 * c * (k_omega + 1.0)],
        [-0.5 * c * (k_omega + 1.0), k_omega / k_theta - 0.5 * c],
    ];
    StabilityMatrices {
        p,
        q,
        c,
        lambda_min_p: sym2_min_eig(&p),
        lambda_min_q: sym2_min_eig(&q),
    }
}

/// Largest `c` (to relative resolution 1e-6) keeping both P and Q positive
/// definite. The feasible set is an interval anchored at 0+, so a bisection
/// between a feasible and an infeasible point brackets the edge.
pub fn max_feasible_c(gains: &Gains) -> Result<f64, CheckError> {
    let feasible = |c: f64| pq_matrices(gains, c).both_pd();
    let mut hi = 1e6;
    if feasible(hi) {
        return Ok(hi);
    }
    let mut lo = hi;
    loop {
        lo /= 10.0;
        if lo < 1e-300 {
            return Err(CheckError::NoFeasibleC);
        }
        if feasible(lo) {
            break;
        }
    }
    while hi - lo > 1e-6 * lo {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// First candidate Lyapunov function.
pub fn v1(q_e: &Quat, omega_e: Vec3, gains: &Gains, c: f64) -> f64 {
    let theta = q_e.axis_angle().angle;
    let n = q_e.n;
    0.5 / gains.k_theta() * omega_e.norm_squared()
        + 0.25 * theta * theta
        + c * (n.norm_squared() + n.dot(omega_e))
}

/// Second candidate Lyapunov function.
pub fn v2(q_e: &Quat, omega_e: Vec3, gains: &Gains, c: f64) -> f64 {
    let theta = q_e.axis_angle().angle;
    let n = q_e.n;
    let s = (theta / 8.0).sin();
    0.5 / gains.k_theta() * omega_e.norm_squared()
        + 16.0 * s * s
        + c * n.norm_squared()
        + c * n.dot(omega_e)
}

pub fn lyapunov_value(which: LyapunovFn, q_e: &Quat, omega_e: Vec3, gains: &Gains, c: f64) -> f64 {
    match which {
        LyapunovFn::V1 => v1(q_e, omega_e, gains, c),
        LyapunovFn::V2 => v2(q_e, omega_e, gains, c),
    }
}

/// Norm of the stacked 7-component closed-loop right-hand side
/// (4 quaternion-rate components plus 3 rate-error components) at the
/// given error state; zero exactly at a fixed point.
pub fn equilibrium_residual(law: ControlLawId, q_e: &Quat, omega_e: Vec3, gains: &Gains) -> f64 {
    let qdot_e = (Quat::pure(omega_e) * *q_e) * 0.5;
    let omegadot_e = sea_vector(law, *q_e) * gains.k_theta() + omega_e * gains.k_omega();
    (qdot_e.norm_squared() + omegadot_e.norm_squared()).sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanHit {
    pub theta_deg: u32,
    pub omega: [f64; 3],
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub law: String,
    pub threshold: f64,
    pub grid_points: usize,
    pub hits: Vec<ScanHit>,
}

impl ScanReport {
    /// True when the only residual zero on the grid is the origin.
    pub fn unique_equilibrium_at_origin(&self) -> bool {
        self.hits.len() == 1 && self.hits[0].theta_deg == 0 && self.hits[0].omega == [0.0, 0.0, 0.0]
    }
}

/// Residual scan over theta in whole degrees (0..=359) crossed with a
/// 5-per-axis rate grid on [-10, 10] rad/s. The residual is axis-invariant
/// (the quaternion-rate norm is |omega_e|/2 and the torque norm depends on
/// the angle only), so one fixed axis suffices. A grid scan cannot prove
/// uniqueness, but it refutes spurious equilibria at the sweep's own
/// resolution.
pub fn equilibrium_scan(law: ControlLawId, gains: &Gains) -> ScanReport {
    let axis = Vec3::new(1.0, 0.0, 0.0);
    let rates = [-10.0, -5.0, 0.0, 5.0, 10.0];
    let threshold = 1e-6 * gains.k_theta();
    let mut hits = Vec::new();
    let mut grid_points = 0usize;
    for theta_deg in 0u32..360 {
        let q_e =
            Quat::from_axis_angle(axis, (theta_deg as f64).to_radians()).expect("fixed unit axis");
        for wx in rates {
            for wy in rates {
                for wz in rates {
                    grid_points += 1;
                    let omega = Vec3::new(wx, wy, wz);
                    let residual = equilibrium_residual(law, &q_e, omega, gains);
                    if residual <= threshold {
                        hits.push(ScanHit {
                            theta_deg,
                            omega: [wx, wy, wz],
                            residual,
                        });
                    }
                }
            }
        }
    }
    ScanReport {
        law: law.to_string(),
        threshold,
        grid_points,
        hits,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MarginSample {
    pub t: f64,
    pub v: f64,
    pub vdot: f64,
    /// Components of `x_e = [|n_e|, |omega_e|]` at this sample.
    pub n_norm: f64,
    pub omega_norm: f64,
    /// `vdot + lambda_min(Q) * |x_e|^2`; at or below tolerance when the
    /// decrease bound holds.
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecreaseParams {
    pub law: String,
    pub lyapunov: LyapunovFn,
    pub c: f64,
    pub k_theta: f64,
    pub k_omega: f64,
    pub lambda_min_p: f64,
    pub lambda_min_q: f64,
    pub sample_dt: f64,
    pub scheme: String,
    pub tol_decrease: f64,
    pub tol_monotone: f64,
    pub margin_violations: usize,
    pub monotonicity_violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecreaseReport {
    pub check: String,
    pub params: DecreaseParams,
    pub samples: Vec<MarginSample>,
    pub worst_margin: f64,
    pub violations: usize,
}

/// Differentiate V along the trajectory and verify the decrease bound
/// `vdot <= -lambda_min(Q) |x|^2 + tol` at every interior sample, plus
/// monotone non-increase of V itself.
///
/// The tolerance absorbs the central-difference truncation error and scales
/// with the logging period: `1e-2 * max(1, |V(t0)|) * (sample_dt / 1e-3)`.
pub fn decrease_check(
    traj: &TrajectoryRecord,
    which: LyapunovFn,
    gains: &Gains,
    c: f64,
) -> Result<DecreaseReport, CheckError> {
    if traj.config.law != which.matching_law() {
        return Err(CheckError::LawMismatch {
            law: traj.config.law,
            which,
        });
    }
    if !traj.config.reference.is_constant() {
        return Err(CheckError::NonConstantReference);
    }
    let matrices = pq_matrices(gains, c);
    if !matrices.both_pd() {
        let (which_m, m) = if matrices.lambda_min_p <= 0.0 {
            ("P", &matrices.p)
        } else {
            ("Q", &matrices.q)
        };
        let (m1, m2) = StabilityMatrices::minors(m);
        return Err(CheckError::InfeasibleC {
            c,
            detail: format!("{which_m} has leading minors {m1}, {m2}"),
        });
    }
    if traj.samples.len() < 3 {
        return Err(CheckError::TooFewSamples {
            needed: 3,
            got: traj.samples.len(),
        });
    }

    let h = traj.sample_dt();
    let values: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| lyapunov_value(which, &s.q_e, s.omega_e, gains, c))
        .collect();
    let tol_decrease = 1e-2 * values[0].abs().max(1.0) * (h / 1e-3);
    let tol_monotone = tol_decrease * h;

    let mut samples = Vec::with_capacity(values.len() - 2);
    let mut worst_margin = f64::NEG_INFINITY;
    let mut margin_violations = 0usize;
    for i in 1..values.len() - 1 {
        let s = &traj.samples[i];
        let vdot = (values[i + 1] - values[i - 1]) / (2.0 * h);
        let n_norm = s.q_e.n.norm();
        let omega_norm = s.omega_e.norm();
        let margin = vdot + matrices.lambda_min_q * (n_norm * n_norm + omega_norm * omega_norm);
        if margin > tol_decrease {
            margin_violations += 1;
        }
        worst_margin = worst_margin.max(margin);
        samples.push(MarginSample {
            t: s.t,
            v: values[i],
            vdot,
            n_norm,
            omega_norm,
            margin,
        });
    }
    let monotonicity_violations = values
        .windows(2)
        .filter(|w| w[1] - w[0] > tol_monotone)
        .count();

    Ok(DecreaseReport {
        check: match which {
            LyapunovFn::V1 => "lyapunov_decrease_v1".to_string(),
            LyapunovFn::V2 => "lyapunov_decrease_v2".to_string(),
        },
        params: DecreaseParams {
            law: traj.config.law.to_string(),
            lyapunov: which,
            c,
            k_theta: gains.k_theta(),
            k_omega: gains.k_omega(),
            lambda_min_p: matrices.lambda_min_p,
            lambda_min_q: matrices.lambda_min_q,
            sample_dt: h,
            scheme: "central-difference".to_string(),
            tol_decrease,
            tol_monotone,
            margin_violations,
            monotonicity_violations,
        },
        samples,
        worst_margin: if worst_margin.is_finite() {
            worst_margin
        } else {
            0.0
        },
        violations: margin_violations + monotonicity_violations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KinSample {
    pub t: f64,
    /// `| fd(n_e) - (m_e omega_e + omega_e x n_e) / 2 |`
    pub ndot_err: f64,
    /// `| fd(theta_e) - omega_e . u_e |`; absent where the axis is
    /// undefined or the angle reflects off 0 or 2*pi inside the stencil.
    pub thetadot_err: Option<f64>,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KinematicParams {
    pub sample_dt: f64,
    pub scheme: String,
    pub safety: f64,
    pub theta_samples_skipped: usize,
    pub max_ndot_err: f64,
    pub max_thetadot_err: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KinematicReport {
    pub check: String,
    pub params: KinematicParams,
    pub samples: Vec<KinSample>,
    pub worst_margin: f64,
    pub violations: usize,
}

/// Check the error-kinematics identities along a logged trajectory with a
/// constant reference:
///
/// ```text
/// d/dt n_e     = (m_e omega_e + omega_e x n_e) / 2
/// d/dt theta_e = omega_e . u_e
/// ```
///
/// Both sides are compared per interior sample, the left sides by central
/// differences. The per-sample tolerance scales with the cube of the local
/// rate and with the estimated rate curvature, which is what bounds the
/// truncation error of the stencil.
pub fn kinematic_identity_check(traj: &TrajectoryRecord) -> KinematicReport {
    const SAFETY: f64 = 4.0;
    let h = traj.sample_dt();
    let s = &traj.samples;
    let mut samples = Vec::new();
    let mut skipped = 0usize;
    let mut max_ndot_err = 0.0f64;
    let mut max_thetadot_err = 0.0f64;
    let mut worst_margin = f64::NEG_INFINITY;
    let mut violations = 0usize;

    for i in 1..s.len().saturating_sub(1) {
        let (prev, cur, next) = (&s[i - 1], &s[i], &s[i + 1]);
        let w = cur.omega_e.norm();
        let wdot = (next.omega_e - prev.omega_e) * (1.0 / (2.0 * h));
        let wddot = (next.omega_e - cur.omega_e * 2.0 + prev.omega_e) * (1.0 / (h * h));
        let scale = wddot.norm() + 3.0 * wdot.norm() * (1.0 + w) + (1.0 + w).powi(3);
        let tol = 1e-9 + SAFETY * h * h / 6.0 * scale;

        let ndot_fd = (next.q_e.n - prev.q_e.n) * (1.0 / (2.0 * h));
        let ndot_claim = (cur.q_e.m * cur.omega_e + cur.omega_e.cross(cur.q_e.n)) * 0.5;
        let ndot_err = (ndot_fd - ndot_claim).norm();
        max_ndot_err = max_ndot_err.max(ndot_err);
        worst_margin = worst_margin.max(ndot_err - tol);
        if ndot_err > tol {
            violations += 1;
        }

        // the angle reflects at 0 and 2*pi; skip stencils that may touch
        let guard = 2.0
            * h
            * [prev, cur, next]
                .iter()
                .map(|x| x.omega_e.norm())
                .fold(0.0, f64::max)
            + 1e-9;
        let near_fold = [prev, cur, next].iter().any(|x| {
            !x.axis_defined || x.theta_e < guard || x.theta_e > std::f64::consts::TAU - guard
        });
        let thetadot_err = if near_fold {
            skipped += 1;
            None
        } else {
            let fd = (next.theta_e - prev.theta_e) / (2.0 * h);
            let aa = cur.q_e.axis_angle();
            let err = (fd - cur.omega_e.dot(aa.axis)).abs();
            max_thetadot_err = max_thetadot_err.max(err);
            worst_margin = worst_margin.max(err - tol);
            if err > tol {
                violations += 1;
            }
            Some(err)
        };
        samples.push(KinSample {
            t: cur.t,
            ndot_err,
            thetadot_err,
            tol,
        });
    }

    KinematicReport {
        check: "kinematic_identity".to_string(),
        params: KinematicParams {
            sample_dt: h,
            scheme: "central-difference".to_string(),
            safety: SAFETY,
            theta_samples_skipped: skipped,
            max_ndot_err,
            max_thetadot_err,
        },
        samples,
        worst_margin: if worst_margin.is_finite() {
            worst_margin
        } else {
            0.0
        },
        violations,
    }
}
