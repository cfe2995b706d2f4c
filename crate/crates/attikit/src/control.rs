//! Attitude-error computation, reference transforms, and the torque laws.
//!
//! Three feedback laws share one structure,
//!
//! ```text
//! tau = J * (k_theta * p + k_omega * omega_e + omegadot_d) + omega x J omega
//! ```
//!
//! and differ only in the proportional-term vector `p` built from the
//! attitude error `q_e = q^-1 * q_d` (angle `theta_e`, axis `u_e`):
//!
//! * benchmark: `p = n_e = u_e * sin(theta_e / 2)`, the quaternion vector
//!   part, whose magnitude peaks at `theta_e = pi` and shrinks beyond it;
//! * `sea1`: `p = u_e * theta_e / 2`, magnitude linear in the error;
//! * `sea2`: `p = 2 * u_e * sin(theta_e / 4)`, strictly increasing over
//!   `[0, 2*pi)` with a slope that tapers, easing actuator load.
//!
//! The scale factors make all three agree to third order near zero error.
//! No hemisphere flip is ever applied to `q_e`: errors beyond `pi` are acted
//! on as-is, which is the entire point of the two axis-angle laws. Where the
//! error axis is undefined (`theta_e` within [`crate::quat::EPS_AXIS`] of
//! `0` or `2*pi`) the proportional term is zero: exact at the equilibrium,
//! and a deterministic selection at the antipode where the axis flips sign.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dynamics::{BodyState, InertiaMatrix};
use crate::quat::{Quat, Vec3};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("gain must be strictly positive, got {0}")]
    NonPositiveGain(f64),
    #[error("reference rate is not tangent to the unit sphere (scalar part {0})")]
    InconsistentReference(f64),
    #[error("reference quaternion is not unit length (norm = {0})")]
    NonUnitReference(f64),
    #[error("reference samples jump at index {index} (chord {gap})")]
    DiscontinuousReference { index: usize, gap: f64 },
    #[error("sampled reference needs at least two samples spaced by a positive dt")]
    DegenerateTrack,
    #[error("unknown control law '{0}' (expected b, sea1, or sea2)")]
    UnknownLaw(String),
}

/// Proportional and derivative feedback gains, both strictly positive.
///
/// Values are carried exactly as configured; `k_theta` multiplies the
/// (dimensionless) proportional-term vector and `k_omega` the angular-rate
/// error in rad/s, both inside `J * [...]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    k_theta: f64,
    k_omega: f64,
}

impl Gains {
    pub fn new(k_theta: f64, k_omega: f64) -> Result<Self, ControlError> {
        if !k_theta.is_finite() || k_theta <= 0.0 {
            return Err(ControlError::NonPositiveGain(k_theta));
        }
        if !k_omega.is_finite() || k_omega <= 0.0 {
            return Err(ControlError::NonPositiveGain(k_omega));
        }
        Ok(Self { k_theta, k_omega })
    }

    #[inline]
    pub fn k_theta(&self) -> f64 {
        self.k_theta
    }

    #[inline]
    pub fn k_omega(&self) -> f64 {
        self.k_omega
    }
}

/// Selects which torque law to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ControlLawId {
    Benchmark,
    Sea1,
    Sea2,
}

impl ControlLawId {
    pub const ALL: [ControlLawId; 3] = [Self::Benchmark, Self::Sea1, Self::Sea2];

    /// Short token used on the command line and in CSV files.
    pub fn token(&self) -> &'static str {
        match self {
            Self::Benchmark => "b",
            Self::Sea1 => "sea1",
            Self::Sea2 => "sea2",
        }
    }
}

impl fmt::Display for ControlLawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for ControlLawId {
    type Err = ControlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "b" | "benchmark" => Ok(Self::Benchmark),
            "sea1" => Ok(Self::Sea1),
            "sea2" => Ok(Self::Sea2),
            other => Err(ControlError::UnknownLaw(other.to_string())),
        }
    }
}

/// Reference pose, pose rate, and body-frame acceleration feedforward at one
/// instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefSample {
    pub q_d: Quat,
    /// Time derivative of `q_d`; tangent to the unit sphere.
    pub qdot_d: Quat,
    /// Desired angular acceleration in body coordinates.
    pub omegadot_d_body: Vec3,
}

/// Time-parameterized attitude reference.
#[derive(Debug, Clone)]
pub enum Reference {
    /// Fixed set-point; rate and feedforward are identically zero.
    Constant { q_d: Quat },
    /// Uniformly sampled track, interpolated with a centripetal-free
    /// Catmull-Rom cubic per component and renormalized; the rate is the
    /// cubic's derivative projected onto the sphere's tangent space.
    Sampled(SampledTrack),
}

#[derive(Debug, Clone)]
pub struct SampledTrack {
    t0: f64,
    dt: f64,
    quats: Vec<Quat>,
    omegadot: Option<Vec<Vec3>>,
}

impl Reference {
    pub fn constant(q_d: Quat) -> Result<Self, ControlError> {
        let norm = q_d.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(ControlError::NonUnitReference(norm));
        }
        Ok(Self::Constant { q_d })
    }

    /// Build a sampled track starting at `t0` with spacing `dt`.
    ///
    /// Samples are normalized on entry; consecutive samples further apart
    /// than a 0.5 chord in R^4 are rejected as discontinuous. An optional
    /// feedforward track of the same length supplies `omegadot_d_body`.
    pub fn sampled(
        t0: f64,
        dt: f64,
        quats: Vec<Quat>,
        omegadot: Option<Vec<Vec3>>,
    ) -> Result<Self, ControlError> {
        if quats.len() < 2 || !dt.is_finite() || dt <= 0.0 {
            return Err(ControlError::DegenerateTrack);
        }
        if let Some(track) = &omegadot {
            if track.len() != quats.len() {
                return Err(ControlError::DegenerateTrack);
            }
        }
        let mut normalized = Vec::with_capacity(quats.len());
        for q in &quats {
            let norm = q.norm();
            if (norm - 1.0).abs() > 1e-3 {
                return Err(ControlError::NonUnitReference(norm));
            }
            normalized.push(q.normalize().expect("norm checked above"));
        }
        for (i, pair) in normalized.windows(2).enumerate() {
            let gap = (pair[1] + pair[0] * -1.0).norm();
            if gap > 0.5 {
                return Err(ControlError::DiscontinuousReference { index: i, gap });
            }
        }
        Ok(Self::Sampled(SampledTrack {
            t0,
            dt,
            quats: normalized,
            omegadot,
        }))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant { .. })
    }

    /// Evaluate the reference at time `t`.
    pub fn at(&self, t: f64) -> RefSample {
        match self {
            Self::Constant { q_d } => RefSample {
                q_d: *q_d,
                qdot_d: Quat::ZERO,
                omegadot_d_body: Vec3::ZERO,
            },
            Self::Sampled(track) => track.at(t),
        }
    }
}

impl SampledTrack {
    fn at(&self, t: f64) -> RefSample {
        let n = self.quats.len();
        let s = ((t - self.t0) / self.dt).clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).min(n - 2);
        let u = s - i as f64;
        let p0 = self.quats[i.saturating_sub(1)];
        let p1 = self.quats[i];
        let p2 = self.quats[i + 1];
        let p3 = self.quats[(i + 2).min(n - 1)];

        // Catmull-Rom basis per component
        let herm = |a: f64, b: f64, c: f64, d: f64| {
            let (u2, u3) = (u * u, u * u * u);
            0.5 * (2.0 * b
                + (c - a) * u
                + (2.0 * a - 5.0 * b + 4.0 * c - d) * u2
                + (3.0 * b - a - 3.0 * c + d) * u3)
        };
        let herm_d = |a: f64, b: f64, c: f64, d: f64| {
            let u2 = u * u;
            0.5 * ((c - a)
                + 2.0 * (2.0 * a - 5.0 * b + 4.0 * c - d) * u
                + 3.0 * (3.0 * b - a - 3.0 * c + d) * u2)
                / self.dt
        };
        let raw = Quat::new(
            herm(p0.m, p1.m, p2.m, p3.m),
            herm(p0.n.x, p1.n.x, p2.n.x, p3.n.x),
            herm(p0.n.y, p1.n.y, p2.n.y, p3.n.y),
            herm(p0.n.z, p1.n.z, p2.n.z, p3.n.z),
        );
        let raw_dot = Quat::new(
            herm_d(p0.m, p1.m, p2.m, p3.m),
            herm_d(p0.n.x, p1.n.x, p2.n.x, p3.n.x),
            herm_d(p0.n.y, p1.n.y, p2.n.y, p3.n.y),
            herm_d(p0.n.z, p1.n.z, p2.n.z, p3.n.z),
        );
        let norm = raw.norm();
        let q_d = raw * (1.0 / norm);
        // project the rate onto the tangent space of the unit sphere
        let radial = q_d.m * raw_dot.m + q_d.n.dot(raw_dot.n);
        let qdot_d = (raw_dot + q_d * (-radial)) * (1.0 / norm);

        let omegadot_d_body = match &self.omegadot {
            None => Vec3::ZERO,
            Some(track) => {
                let a = track[i];
                let b = track[i + 1];
                a + (b - a) * u
            }
        };
        RefSample {
            q_d,
            qdot_d,
            omegadot_d_body,
        }
    }
}

/// Attitude error `q_e = q^-1 * q_d`: the rotation carrying the current
/// body frame onto the desired one, in body coordinates. No hemisphere flip.
#[inline]
pub fn attitude_error(q: Quat, q_d: Quat) -> Quat {
    q.conjugate() * q_d
}

/// Desired body-frame angular velocity from the reference pose and rate.
///
/// First recovers the rate in desired-body coordinates from
/// `2 * q_d^-1 * qdot_d` (whose scalar part must vanish for a rate tangent
/// to the unit sphere), then re-expresses it in the current body frame via
/// the two rotation matrices.
pub fn desired_omega_body(q: Quat, q_d: Quat, qdot_d: Quat) -> Result<Vec3, ControlError> {
    let w = (q_d.conjugate() * qdot_d) * 2.0;
    if w.m.abs() > 1e-6 {
        return Err(ControlError::InconsistentReference(w.m));
    }
    Ok(omega_hat_to_body(q, q_d, w.n))
}

/// Same transform as [`desired_omega_body`] but without the tangency gate;
/// used on the hot path where the reference was validated at construction.
pub(crate) fn omega_des_from_rate(q: Quat, q_d: Quat, qdot_d: Quat) -> Vec3 {
    let w = (q_d.conjugate() * qdot_d) * 2.0;
    omega_hat_to_body(q, q_d, w.n)
}

fn omega_hat_to_body(q: Quat, q_d: Quat, omega_hat: Vec3) -> Vec3 {
    if omega_hat == Vec3::ZERO {
        return Vec3::ZERO;
    }
    let s = q.rotation_matrix_raw();
    let s_d = q_d.rotation_matrix_raw();
    s.transpose().mul_vec(s_d.mul_vec(omega_hat))
}

/// Proportional-term vector of the chosen law at the attitude error `q_e`.
///
/// Returns the zero vector when the error axis is undefined.
pub fn sea_vector(law: ControlLawId, q_e: Quat) -> Vec3 {
    let aa = q_e.axis_angle();
    if !aa.axis_defined {
        return Vec3::ZERO;
    }
    match law {
        ControlLawId::Benchmark => q_e.n,
        ControlLawId::Sea1 => aa.axis * (0.5 * aa.angle),
        ControlLawId::Sea2 => aa.axis * (2.0 * (0.25 * aa.angle).sin()),
    }
}

/// Control torque of the chosen law at the given state and reference sample.
///
/// The gyroscopic term `omega x J omega` cancels the coupling in the
/// open-loop dynamics, so the closed-loop rate-error dynamics reduce to
/// `omegadot_e = -(k_theta * p + k_omega * omega_e)` for a constant
/// reference.
pub fn control_torque(
    law: ControlLawId,
    state: &BodyState,
    reference: &RefSample,
    inertia: &InertiaMatrix,
    gains: &Gains,
) -> Vec3 {
    let q_e = attitude_error(state.q, reference.q_d);
    let p = sea_vector(law, q_e);
    let omega_d = omega_des_from_rate(state.q, reference.q_d, reference.qdot_d);
    let omega_e = omega_d - state.omega;
    let inner = p * gains.k_theta() + omega_e * gains.k_omega() + reference.omegadot_d_body;
    inertia.apply(inner) + state.omega.cross(inertia.apply(state.omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit(v: Vec3) -> Vec3 {
        v * (1.0 / v.norm())
    }

    fn spin_track(rate: f64, dt: f64, n: usize) -> Vec<Quat> {
        (0..n)
            .map(|i| Quat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), rate * i as f64 * dt).unwrap())
            .collect()
    }

    #[test]
    fn gains_must_be_positive() {
        assert!(Gains::new(1000.0, 100.0).is_ok());
        assert!(Gains::new(0.0, 1.0).is_err());
        assert!(Gains::new(1.0, -3.0).is_err());
        assert!(Gains::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn law_tokens_round_trip() {
        for law in ControlLawId::ALL {
            assert_eq!(law.token().parse::<ControlLawId>().unwrap(), law);
        }
        assert!("sea3".parse::<ControlLawId>().is_err());
    }

    #[test]
    fn attitude_error_of_matching_pose_is_identity() {
        let q = Quat::new(0.4, 0.3, -0.5, 0.2).normalize().unwrap();
        let q_e = attitude_error(q, q);
        assert!((q_e + Quat::IDENTITY * -1.0).norm() < 1e-15);
    }

    #[test]
    fn attitude_error_from_identity_to_half_turn() {
        let q_d = Quat::new(0.0, 0.0, 0.0, 1.0);
        assert_eq!(attitude_error(Quat::IDENTITY, q_d), q_d);
    }

    #[test]
    fn attitude_error_inverts_the_initial_offset() {
        // q = rotation by theta about u, q_d = identity: the error must undo
        // it, i.e. carry angle theta about -u (in body coordinates).
        for theta_deg in [30.0f64, 120.0, 250.0, 340.0] {
            let u = unit(Vec3::new(0.3, -0.8, 0.52));
            let theta = theta_deg.to_radians();
            let q = Quat::from_axis_angle(u, theta).unwrap();
            let aa = attitude_error(q, Quat::IDENTITY).axis_angle();
            assert_relative_eq!(aa.angle, theta, epsilon = 1e-12);
            assert!((aa.axis + u).norm() < 1e-12);
        }
    }

    #[test]
    fn desired_omega_is_zero_for_constant_reference() {
        let q = Quat::new(0.9, 0.1, 0.2, -0.1).normalize().unwrap();
        let q_d = Quat::new(0.2, 0.5, -0.4, 0.7).normalize().unwrap();
        let w = desired_omega_body(q, q_d, Quat::ZERO).unwrap();
        assert_eq!(w, Vec3::ZERO);
    }

    #[test]
    fn desired_omega_passes_through_when_frames_align() {
        let rate = 0.8;
        let q_d = Quat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), 0.3).unwrap();
        // qdot for a z-spin: 1/2 * q_d * [0, omega]
        let qdot = (q_d * Quat::pure(Vec3::new(0.0, 0.0, rate))) * 0.5;
        let w = desired_omega_body(q_d, q_d, qdot).unwrap();
        assert!((w - Vec3::new(0.0, 0.0, rate)).norm() < 1e-12);
    }

    #[test]
    fn desired_omega_matches_finite_difference_of_the_track() {
        let rate = 1.3;
        let h = 1e-6;
        let t = 0.7;
        let axis = unit(Vec3::new(0.2, 0.9, -0.4));
        let at = |t: f64| Quat::from_axis_angle(axis, rate * t).unwrap();
        let qdot_fd = (at(t + h) + at(t - h) * -1.0) * (1.0 / (2.0 * h));
        let q = Quat::new(0.8, -0.1, 0.4, 0.2).normalize().unwrap();
        let w = desired_omega_body(q, at(t), qdot_fd).unwrap();
        // spin axis re-expressed in the body frame of q
        let expected = q
            .rotation_matrix_raw()
            .transpose()
            .mul_vec(at(t).rotation_matrix_raw().mul_vec(axis * rate));
        assert!((w - expected).norm() < 1e-5);
    }

    #[test]
    fn desired_omega_rejects_non_tangent_rate() {
        let q_d = Quat::IDENTITY;
        let qdot = Quat::new(0.1, 0.0, 0.0, 0.0); // radial: pushes off the sphere
        assert!(matches!(
            desired_omega_body(Quat::IDENTITY, q_d, qdot),
            Err(ControlError::InconsistentReference(_))
        ));
    }

    #[test]
    fn sea_vectors_at_half_turn() {
        let q_e = Quat::new(0.0, 1.0, 0.0, 0.0);
        let n = sea_vector(ControlLawId::Benchmark, q_e);
        let p1 = sea_vector(ControlLawId::Sea1, q_e);
        let p2 = sea_vector(ControlLawId::Sea2, q_e);
        assert!((n - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((p1 - Vec3::new(PI / 2.0, 0.0, 0.0)).norm() < 1e-12);
        assert!((p2 - Vec3::new(2.0_f64.sqrt(), 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sea_norms_at_300_degrees_keep_their_ordering() {
        let u = unit(Vec3::new(1.0, 2.0, -2.0));
        let q_e = Quat::from_axis_angle(u, 300.0_f64.to_radians()).unwrap();
        let n = sea_vector(ControlLawId::Benchmark, q_e).norm();
        let p1 = sea_vector(ControlLawId::Sea1, q_e).norm();
        let p2 = sea_vector(ControlLawId::Sea2, q_e).norm();
        assert_relative_eq!(n, 0.5, epsilon = 1e-12);
        assert_relative_eq!(p1, 150.0_f64.to_radians(), epsilon = 1e-12);
        assert_relative_eq!(p2, 2.0 * 75.0_f64.to_radians().sin(), epsilon = 1e-12);
        assert!(p1 > p2 && p2 > n);
    }

    #[test]
    fn sea_vectors_vanish_at_identity_error() {
        for law in ControlLawId::ALL {
            assert_eq!(sea_vector(law, Quat::IDENTITY), Vec3::ZERO);
        }
        // antipode: axis undefined, deterministic zero output
        let antipode = Quat::new(-1.0, 0.0, 0.0, 0.0);
        for law in ControlLawId::ALL {
            assert_eq!(sea_vector(law, antipode), Vec3::ZERO);
        }
    }

    #[test]
    fn small_angle_agreement_between_all_laws() {
        let u = unit(Vec3::new(-0.4, 0.7, 0.59));
        for k in 1..=100 {
            let theta = 0.001 * k as f64; // up to 0.1 rad
            let q_e = Quat::from_axis_angle(u, theta).unwrap();
            let vecs = ControlLawId::ALL.map(|law| sea_vector(law, q_e));
            for i in 0..3 {
                for j in (i + 1)..3 {
                    let diff = (vecs[i] - vecs[j]).norm();
                    assert!(
                        diff <= 0.003 * theta,
                        "laws {i},{j} differ by {diff} at theta {theta}"
                    );
                }
            }
        }
    }

    #[test]
    fn sea_magnitudes_increase_but_benchmark_peaks_at_pi() {
        let u = Vec3::new(0.0, 1.0, 0.0);
        let norms: Vec<[f64; 3]> = (1..360)
            .map(|deg| {
                let q_e = Quat::from_axis_angle(u, (deg as f64).to_radians()).unwrap();
                [
                    sea_vector(ControlLawId::Benchmark, q_e).norm(),
                    sea_vector(ControlLawId::Sea1, q_e).norm(),
                    sea_vector(ControlLawId::Sea2, q_e).norm(),
                ]
            })
            .collect();
        for w in norms.windows(2) {
            assert!(w[1][1] > w[0][1], "sea1 magnitude must increase");
            assert!(w[1][2] > w[0][2], "sea2 magnitude must increase");
        }
        // benchmark magnitude rises to 180 deg then falls
        for w in norms[..179].windows(2) {
            assert!(w[1][0] > w[0][0]);
        }
        for w in norms[179..].windows(2) {
            assert!(w[1][0] < w[0][0]);
        }
    }

    #[test]
    fn control_torque_vanishes_at_the_set_point() {
        let j = InertiaMatrix::from_diagonal(1.0, 2.0, 3.0).unwrap();
        let gains = Gains::new(1000.0, 100.0).unwrap();
        let q_d = Quat::new(0.3, 0.1, -0.2, 0.5).normalize().unwrap();
        let reference = Reference::constant(q_d).unwrap().at(0.0);
        let state = BodyState::new(q_d, Vec3::ZERO);
        for law in ControlLawId::ALL {
            assert!(control_torque(law, &state, &reference, &j, &gains).norm() < 1e-12);
        }
    }

    #[test]
    fn control_torque_damping_matches_hand_computation() {
        // at the set-point with omega = z: tau = J*(-k_omega * z) + 0
        let j = InertiaMatrix::from_diagonal(1.0, 2.0, 3.0).unwrap();
        let gains = Gains::new(1000.0, 100.0).unwrap();
        let reference = Reference::constant(Quat::IDENTITY).unwrap().at(0.0);
        let state = BodyState::new(Quat::IDENTITY, Vec3::new(0.0, 0.0, 1.0));
        for law in ControlLawId::ALL {
            let tau = control_torque(law, &state, &reference, &j, &gains);
            assert!((tau - Vec3::new(0.0, 0.0, -300.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn control_torque_depends_on_pose_only_through_the_error() {
        let j = InertiaMatrix::from_diagonal(1.0, 2.0, 3.0).unwrap();
        let gains = Gains::new(1000.0, 100.0).unwrap();
        let q_e = Quat::from_axis_angle(unit(Vec3::new(1.0, 1.0, 0.2)), 2.1).unwrap();
        let omega = Vec3::new(0.4, -0.2, 1.1);
        let torque_for = |q: Quat| {
            let q_d = q * q_e;
            let reference = Reference::constant(q_d.normalize().unwrap())
                .unwrap()
                .at(0.0);
            control_torque(
                ControlLawId::Sea2,
                &BodyState::new(q, omega),
                &reference,
                &j,
                &gains,
            )
        };
        let qa = Quat::new(0.7, 0.1, 0.1, -0.3).normalize().unwrap();
        let qb = Quat::new(-0.2, 0.6, -0.5, 0.4).normalize().unwrap();
        assert!((torque_for(qa) - torque_for(qb)).norm() < 1e-9);
    }

    #[test]
    fn sampled_reference_rate_is_tangent_and_matches_the_track() {
        let rate = 0.9;
        let dt = 0.01;
        let track = Reference::sampled(0.0, dt, spin_track(rate, dt, 200), None).unwrap();
        let s = track.at(0.77);
        let w = (s.q_d.conjugate() * s.qdot_d) * 2.0;
        assert!(w.m.abs() < 1e-9, "rate must stay tangent, scalar {}", w.m);
        assert!((w.n - Vec3::new(0.0, 0.0, rate)).norm() < 1e-3);
    }

    #[test]
    fn sampled_reference_rejects_jumps() {
        let mut quats = spin_track(0.5, 0.01, 10);
        quats[5] = Quat::from_axis_angle(Vec3::new(1.0, 0.0, 0.0), 2.0).unwrap();
        assert!(matches!(
            Reference::sampled(0.0, 0.01, quats, None),
            Err(ControlError::DiscontinuousReference { .. })
        ));
    }

    proptest! {
        #[test]
        fn sea_vectors_point_along_the_error_axis(
            raw in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0),
            theta in 0.01..(2.0 * PI - 0.01),
        ) {
            let v = Vec3::new(raw.0, raw.1, raw.2);
            prop_assume!(v.norm() > 1e-3);
            let u = unit(v);
            let q_e = Quat::from_axis_angle(u, theta).unwrap();
            for law in ControlLawId::ALL {
                let p = sea_vector(law, q_e);
                // positive multiple of the axis, never flipped
                prop_assert!(p.dot(u) > 0.0);
                prop_assert!(p.cross(u).norm() < 1e-9 * p.norm().max(1.0));
            }
            let p1 = sea_vector(ControlLawId::Sea1, q_e).norm();
            let p2 = sea_vector(ControlLawId::Sea2, q_e).norm();
            prop_assert!(p2 < p1);
        }
    }
}
