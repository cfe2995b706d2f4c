//! Rigid-body attitude control toolkit.
//!
//! The crate simulates a torque-driven rigid body under three attitude
//! feedback laws (a quaternion-proportional benchmark and two axis-angle
//! laws whose proportional effort keeps growing with the rotation error)
//! and ships the machinery to certify and benchmark them:
//!
//! * [`quat`]: quaternion / rotation algebra with the conventions the
//!   rest of the crate assumes (scalar-first storage, Hamilton product,
//!   angles in `[0, 2*pi)` with no shortest-path folding);
//! * [`dynamics`]: Euler rigid-body dynamics with fixed-step RK4 and
//!   Dormand-Prince integrators and the closed-loop simulation driver;
//! * [`control`]: attitude-error computation, reference transforms, and
//!   the three torque laws;
//! * [`lyapunov`]: numerical stability certification with bound matrices,
//!   equilibrium-residual scans, and decrease checks along trajectories;
//! * [`experiments`]: tumble-recovery scenarios, the 359-angle sweep
//!   with paired per-case seeds, and CSV persistence.

pub mod control;
pub mod dynamics;
pub mod experiments;
pub mod lyapunov;
pub mod quat;

pub use control::{ControlLawId, Gains, RefSample, Reference};
pub use dynamics::{simulate, step, BodyState, InertiaMatrix, StepperId, TrajectoryRecord};
pub use experiments::{make_tumble_config, run_sweep, stabilization_time, SimConfig, SweepRow};
pub use quat::{AxisAngle, Mat3, Quat, Vec3};
