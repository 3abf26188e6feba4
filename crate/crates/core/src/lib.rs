//! Non-iterative temporal finite element integration of forced-damped
//! Duffing oscillators,
//!
//! ```text
//! m u'' + c u' + k u + beta u^3 = f(t)
//! ```
//!
//! The integrator works on a mixed formulation carrying displacement `u`,
//! the impulse of the linear spring force `J` and the linear momentum `p`.
//! Every time step reduces to one scalar cubic in the end-of-step
//! displacement, solved in closed form; `J` and `p` then follow explicitly.
//! No Newton iteration over the nonlinear term is performed.
//!
//! The crate is `no_std` (it needs `alloc` for trajectories) and ships:
//!
//! * [`system`]: oscillator parameters, forcing, states and trajectories.
//! * [`cubic`]: real-root analysis of the per-step cubic.
//! * [`integrator`]: the stepper and the fixed-step driver.
//! * [`rkf45`]: an adaptive Runge-Kutta-Fehlberg 4(5) reference integrator.
//! * [`experiments`]: the hard/soft/inverted example catalog, comparison
//!   metrics and the time-step convergence study.
//!
//! ```
//! use ehp_duffing::experiments::find;
//! use ehp_duffing::integrator::integrate;
//!
//! let spec = find("T1E1").unwrap();
//! let init = spec.initial_state();
//! let traj = integrate(&spec.system, init, 0.01, 1.0, &spec.forcing).unwrap();
//! assert_eq!(traj.states.len(), 101);
//! ```
#![no_std]
#![warn(missing_docs)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod math;

pub mod cubic;
pub mod experiments;
pub mod integrator;
pub mod rkf45;
pub mod system;

pub use cubic::{CubicAnalysis, CubicCoefficients, CubicError, Roots};
pub use experiments::{ComparisonReport, ConvergenceReport, ExperimentSpec, OscillatorKind};
pub use integrator::{integrate, step, IntegrateError, Residuals, StepDiagnostics, StepError};
pub use rkf45::{integrate_adaptive, PhasePoint, RkfConfig, RkfError};
pub use system::{DuffingSystem, Excitation, Forcing, State, SystemError, Trajectory};
