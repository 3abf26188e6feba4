//! Oscillator definition, forcing, and the state/trajectory containers.

use alloc::vec::Vec;
use core::fmt;

use crate::integrator::StepDiagnostics;
use crate::math;

/// Reasons a [`DuffingSystem`] cannot be constructed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemError {
    /// A parameter was NaN or infinite.
    NonFinite,
    /// `m <= 0`.
    NonPositiveMass(f64),
    /// `c < 0`.
    NegativeDamping(f64),
    /// `k == 0`: without a linear spring the spring-force impulse and the
    /// flexibility `1/k` are undefined (the Ueda oscillator).
    ZeroStiffness,
}

impl fmt::Display for SystemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemError::NonFinite => write!(f, "system parameters must be finite"),
            SystemError::NonPositiveMass(m) => write!(f, "mass must be positive, got {m}"),
            SystemError::NegativeDamping(c) => write!(f, "damping must be non-negative, got {c}"),
            SystemError::ZeroStiffness => {
                write!(
                    f,
                    "linear stiffness k = 0 is not supported (flexibility 1/k undefined)"
                )
            }
        }
    }
}

impl core::error::Error for SystemError {}

/// Single-degree-of-freedom Duffing oscillator `m u'' + c u' + k u + beta u^3 = f`.
///
/// `k` may be negative (inverted oscillator) and `beta` may take any sign.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DuffingSystem {
    m: f64,
    c: f64,
    k: f64,
    beta: f64,
    a: f64,
}

impl DuffingSystem {
    /// Validates the parameters and derives the flexibility `a = 1/k`.
    pub fn new(m: f64, c: f64, k: f64, beta: f64) -> Result<Self, SystemError> {
        if !(m.is_finite() && c.is_finite() && k.is_finite() && beta.is_finite()) {
            return Err(SystemError::NonFinite);
        }
        if m <= 0.0 {
            return Err(SystemError::NonPositiveMass(m));
        }
        if c < 0.0 {
            return Err(SystemError::NegativeDamping(c));
        }
        if k == 0.0 {
            return Err(SystemError::ZeroStiffness);
        }
        Ok(Self {
            m,
            c,
            k,
            beta,
            a: 1.0 / k,
        })
    }

    /// Mass.
    pub fn mass(&self) -> f64 {
        self.m
    }

    /// Viscous damping coefficient.
    pub fn damping(&self) -> f64 {
        self.c
    }

    /// Linear spring stiffness.
    pub fn stiffness(&self) -> f64 {
        self.k
    }

    /// Cubic stiffness coefficient.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Flexibility of the linear spring, `1/k`.
    pub fn flexibility(&self) -> f64 {
        self.a
    }

    /// Restoring force `k u + beta u^3`.
    pub fn restoring_force(&self, u: f64) -> f64 {
        self.k * u + self.beta * u * u * u
    }
}

/// Anything that yields a force as a pure function of time.
pub trait Excitation {
    /// Force at time `t`.
    fn value_at(&self, t: f64) -> f64;
}

impl<F: Fn(f64) -> f64> Excitation for F {
    fn value_at(&self, t: f64) -> f64 {
        self(t)
    }
}

/// Closed-form external forcing.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Forcing {
    /// No external force.
    Zero,
    /// Constant force.
    Constant {
        /// Force value.
        value: f64,
    },
    /// `amplitude * cos(omega t + phase)`.
    Harmonic {
        /// Force amplitude.
        amplitude: f64,
        /// Angular frequency (rad/time).
        omega: f64,
        /// Phase (rad).
        phase: f64,
    },
}

impl Forcing {
    /// `amplitude * cos(omega t)`.
    pub const fn cosine(amplitude: f64, omega: f64) -> Self {
        Forcing::Harmonic {
            amplitude,
            omega,
            phase: 0.0,
        }
    }
}

impl Excitation for Forcing {
    fn value_at(&self, t: f64) -> f64 {
        match *self {
            Forcing::Zero => 0.0,
            Forcing::Constant { value } => value,
            Forcing::Harmonic {
                amplitude,
                omega,
                phase,
            } => amplitude * math::cos(omega * t + phase),
        }
    }
}

/// One time node of the mixed trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct State {
    /// Time.
    pub t: f64,
    /// Displacement.
    pub u: f64,
    /// Impulse of the linear spring force, defined up to a constant.
    pub j: f64,
    /// Linear momentum.
    pub p: f64,
}

impl State {
    /// Velocity `p / m`.
    pub fn velocity(&self, system: &DuffingSystem) -> f64 {
        self.p / system.mass()
    }

    /// True when every field is finite.
    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.u.is_finite() && self.j.is_finite() && self.p.is_finite()
    }
}

/// Initial node: displacement `u0`, momentum `m v0`, and `J = 0`.
///
/// Only increments of `J` enter the discrete equations, so its starting
/// value is a free reference and is pinned to zero.
pub fn initial_state(system: &DuffingSystem, u0: f64, v0: f64) -> State {
    State {
        t: 0.0,
        u: u0,
        j: 0.0,
        p: system.mass() * v0,
    }
}

/// Fixed-step trajectory with one diagnostics record per step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Nodes in time order, starting with the initial state.
    pub states: Vec<State>,
    /// Nominal step size. The last step may be shorter so that the
    /// trajectory ends exactly on the requested horizon.
    pub dt: f64,
    /// `diagnostics[i]` describes the step from `states[i]` to `states[i + 1]`.
    pub diagnostics: Vec<StepDiagnostics>,
}

impl Trajectory {
    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.diagnostics.len()
    }

    /// Last node.
    pub fn last(&self) -> &State {
        // constructed with at least the initial state
        self.states.last().expect("trajectory is never empty")
    }

    /// Displacements in node order.
    pub fn displacements(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(|s| s.u)
    }

    /// Number of steps whose cubic had more than one real root.
    pub fn ambiguous_steps(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.was_ambiguous).count()
    }
}
