//! Adaptive Runge-Kutta-Fehlberg 4(5) reference integrator.
//!
//! Integrates the first-order form `u' = v`, `v' = (f - c v - k u - beta u^3) / m`
//! with the classic six-stage Fehlberg pair. The fifth-order solution is
//! propagated; the difference to the embedded fourth-order one drives the
//! step controller. Steps are clamped so that every requested sample time
//! is hit exactly, so no interpolation is needed.

use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::system::{DuffingSystem, Excitation};

/// Step-size controller settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RkfConfig {
    /// Absolute error tolerance.
    pub abserr: f64,
    /// Relative error tolerance.
    pub relerr: f64,
    /// First trial step.
    pub h_init: f64,
    /// Smallest step the controller may propose.
    pub h_min: f64,
    /// Largest step.
    pub h_max: f64,
    /// Gain applied to the optimal step estimate.
    pub safety_factor: f64,
    /// Upper bound on attempted steps.
    pub max_steps: u64,
}

impl Default for RkfConfig {
    fn default() -> Self {
        Self {
            abserr: 1e-7,
            relerr: 1e-6,
            h_init: 1e-3,
            h_min: 1e-12,
            h_max: 1.0,
            safety_factor: 0.9,
            max_steps: 100_000_000,
        }
    }
}

impl RkfConfig {
    /// Default controller with the given tolerances.
    pub fn with_tolerances(abserr: f64, relerr: f64) -> Self {
        Self {
            abserr,
            relerr,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), RkfError> {
        let ok = self.abserr > 0.0
            && self.relerr > 0.0
            && self.h_min > 0.0
            && self.h_min <= self.h_init
            && self.h_init <= self.h_max
            && self.h_max.is_finite()
            && self.safety_factor > 0.0;
        if ok {
            Ok(())
        } else {
            Err(RkfError::InvalidConfig)
        }
    }
}

/// Failure of [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RkfError {
    /// Tolerances or step bounds violate `0 < h_min <= h_init <= h_max`.
    InvalidConfig,
    /// Sample times are unsorted, non-finite, or outside `[0, t_total]`.
    InvalidSampleTimes,
    /// The controller asked for a step below `h_min` at time `t`.
    StepSizeUnderflow {
        /// Time at which the controller gave up.
        t: f64,
    },
    /// More than `max_steps` attempts were needed.
    MaxStepsExceeded,
    /// The solution left the finite range at time `t`.
    NonFinite {
        /// Time of the last finite state.
        t: f64,
    },
}

impl fmt::Display for RkfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RkfError::InvalidConfig => write!(f, "invalid RKF45 configuration"),
            RkfError::InvalidSampleTimes => {
                write!(f, "sample times must be sorted and within [0, t_total]")
            }
            RkfError::StepSizeUnderflow { t } => write!(f, "step size underflow at t = {t}"),
            RkfError::MaxStepsExceeded => write!(f, "maximum number of RKF45 steps exceeded"),
            RkfError::NonFinite { t } => write!(f, "solution became non-finite after t = {t}"),
        }
    }
}

impl core::error::Error for RkfError {}

/// Displacement and velocity at a sample time.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PhasePoint {
    /// Time.
    pub t: f64,
    /// Displacement.
    pub u: f64,
    /// Velocity.
    pub v: f64,
}

/// Right-hand side of the first-order system at `(t, u, v)`.
pub fn rhs<E: Excitation + ?Sized>(
    system: &DuffingSystem,
    forcing: &E,
    t: f64,
    y: [f64; 2],
) -> [f64; 2] {
    let [u, v] = y;
    let accel =
        (forcing.value_at(t) - system.damping() * v - system.restoring_force(u)) / system.mass();
    [v, accel]
}

// Fehlberg tableau
const C2: f64 = 1.0 / 4.0;
const C3: f64 = 3.0 / 8.0;
const C4: f64 = 12.0 / 13.0;
const C6: f64 = 1.0 / 2.0;

const A21: f64 = 1.0 / 4.0;
const A31: f64 = 3.0 / 32.0;
const A32: f64 = 9.0 / 32.0;
const A41: f64 = 1932.0 / 2197.0;
const A42: f64 = -7200.0 / 2197.0;
const A43: f64 = 7296.0 / 2197.0;
const A51: f64 = 439.0 / 216.0;
const A52: f64 = -8.0;
const A53: f64 = 3680.0 / 513.0;
const A54: f64 = -845.0 / 4104.0;
const A61: f64 = -8.0 / 27.0;
const A62: f64 = 2.0;
const A63: f64 = -3544.0 / 2565.0;
const A64: f64 = 1859.0 / 4104.0;
const A65: f64 = -11.0 / 40.0;

const B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];
const B4: [f64; 6] = [
    25.0 / 216.0,
    0.0,
    1408.0 / 2565.0,
    2197.0 / 4104.0,
    -1.0 / 5.0,
    0.0,
];

const MIN_GROWTH: f64 = 0.1;
const MAX_GROWTH: f64 = 5.0;

/// One trial step; returns the fifth-order solution and the scaled error.
fn trial_step<E: Excitation + ?Sized>(
    system: &DuffingSystem,
    forcing: &E,
    config: &RkfConfig,
    t: f64,
    y: [f64; 2],
    h: f64,
) -> ([f64; 2], f64) {
    let f = |t: f64, y: [f64; 2]| rhs(system, forcing, t, y);
    let at = |k: &[[f64; 2]], w: &[f64]| -> [f64; 2] {
        let mut out = y;
        for (ki, wi) in k.iter().zip(w) {
            out[0] += h * wi * ki[0];
            out[1] += h * wi * ki[1];
        }
        out
    };

    let k1 = f(t, y);
    let k2 = f(t + C2 * h, at(&[k1], &[A21]));
    let k3 = f(t + C3 * h, at(&[k1, k2], &[A31, A32]));
    let k4 = f(t + C4 * h, at(&[k1, k2, k3], &[A41, A42, A43]));
    let k5 = f(t + h, at(&[k1, k2, k3, k4], &[A51, A52, A53, A54]));
    let k6 = f(
        t + C6 * h,
        at(&[k1, k2, k3, k4, k5], &[A61, A62, A63, A64, A65]),
    );
    let ks = [k1, k2, k3, k4, k5, k6];

    let y5 = at(&ks, &B5);
    let y4 = at(&ks, &B4);
    let mut err: f64 = 0.0;
    for i in 0..2 {
        let mag = math::abs(y[i]).max(math::abs(y5[i]));
        err = err.max(math::abs(y5[i] - y4[i]) / (config.abserr + config.relerr * mag));
    }
    (y5, err)
}

/// Integrates from `(u0, v0)` at `t = 0` to `t_total`, recording the
/// solution at each of `sample_times` (sorted, within `[0, t_total]`).
pub fn integrate_adaptive<E: Excitation + ?Sized>(
    system: &DuffingSystem,
    init: (f64, f64),
    t_total: f64,
    forcing: &E,
    config: &RkfConfig,
    sample_times: &[f64],
) -> Result<Vec<PhasePoint>, RkfError> {
    config.validate()?;
    let sorted = sample_times.windows(2).all(|w| w[0] <= w[1]);
    let in_range = sample_times
        .iter()
        .all(|&t| t.is_finite() && (0.0..=t_total).contains(&t));
    if !(t_total.is_finite() && t_total >= 0.0 && sorted && in_range) {
        return Err(RkfError::InvalidSampleTimes);
    }

    let mut out = Vec::with_capacity(sample_times.len());
    let mut t = 0.0;
    let mut y = [init.0, init.1];
    let mut h = config.h_init;
    let mut attempts: u64 = 0;

    let mut targets = sample_times
        .iter()
        .copied()
        .chain(core::iter::once(t_total))
        .peekable();
    let mut remaining_samples = sample_times.len();
    while let Some(&target) = targets.peek() {
        if t >= target {
            if remaining_samples > 0 {
                out.push(PhasePoint {
                    t: target,
                    u: y[0],
                    v: y[1],
                });
                remaining_samples -= 1;
            }
            targets.next();
            continue;
        }
        attempts += 1;
        if attempts > config.max_steps {
            return Err(RkfError::MaxStepsExceeded);
        }

        let gap = target - t;
        // clamp onto the target, absorbing slivers smaller than 1% of a step
        let clamped = h >= gap * 0.99;
        let h_try = if clamped { gap } else { h };
        let (y_new, err) = trial_step(system, forcing, config, t, y, h_try);
        if !err.is_finite() {
            if h_try <= config.h_min {
                return Err(RkfError::NonFinite { t });
            }
            h = (h_try * MIN_GROWTH).max(config.h_min);
            continue;
        }

        let growth = if err == 0.0 {
            MAX_GROWTH
        } else {
            (config.safety_factor * math::powf(err, -0.2)).clamp(MIN_GROWTH, MAX_GROWTH)
        };
        if err <= 1.0 {
            t = if clamped { target } else { t + h_try };
            y = y_new;
            // a clamped step says nothing about the controller's preferred size
            let next = if clamped {
                h.max(h_try * growth)
            } else {
                h_try * growth
            };
            h = next.min(config.h_max);
        } else {
            let next = h_try * growth;
            if next < config.h_min {
                return Err(RkfError::StepSizeUnderflow { t });
            }
            h = next;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::Forcing;

    #[test]
    fn rhs_examples() {
        let sho = DuffingSystem::new(1.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(rhs(&sho, &Forcing::Zero, 0.0, [1.0, 0.0]), [0.0, -1.0]);

        let inverted = DuffingSystem::new(1.0, 0.3, -1.0, 1.0).unwrap();
        let f = Forcing::cosine(0.2, 1.2);
        let d = rhs(&inverted, &f, 0.0, [1.0, 0.0]);
        assert_eq!(d[0], 0.0);
        assert!((d[1] - 0.2).abs() < 1e-15);

        // unforced equilibria of the inverted well at u = +-1 and 0
        for u in [-1.0, 0.0, 1.0] {
            assert_eq!(rhs(&inverted, &Forcing::Zero, 3.0, [u, 0.0]), [0.0, 0.0]);
        }
    }

    #[test]
    fn harmonic_period() {
        let sho = DuffingSystem::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let tau = 2.0 * core::f64::consts::PI;
        let out = integrate_adaptive(
            &sho,
            (1.0, 0.0),
            tau,
            &Forcing::Zero,
            &RkfConfig::default(),
            &[tau],
        )
        .unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].t, tau);
        assert!((out[0].u - 1.0).abs() < 1e-5);
        assert!(out[0].v.abs() < 1e-5);
    }

    #[test]
    fn samples_hit_requested_times() {
        let sys = DuffingSystem::new(1.0, 0.2, 1.0, 0.1).unwrap();
        let times: std::vec::Vec<f64> = (0..=250).map(|i| i as f64 * 0.04).collect();
        let out = integrate_adaptive(
            &sys,
            (3.0, 0.0),
            10.0,
            &Forcing::cosine(0.5, 2.00649),
            &RkfConfig::default(),
            &times,
        )
        .unwrap();
        assert_eq!(out.len(), times.len());
        for (p, t) in out.iter().zip(&times) {
            assert_eq!(p.t.to_bits(), t.to_bits());
        }
        assert_eq!((out[0].u, out[0].v), (3.0, 0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let sys = DuffingSystem::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let cfg = RkfConfig::default();
        assert_eq!(
            integrate_adaptive(&sys, (1.0, 0.0), 1.0, &Forcing::Zero, &cfg, &[0.5, 0.2]),
            Err(RkfError::InvalidSampleTimes)
        );
        assert_eq!(
            integrate_adaptive(&sys, (1.0, 0.0), 1.0, &Forcing::Zero, &cfg, &[2.0]),
            Err(RkfError::InvalidSampleTimes)
        );
        let bad = RkfConfig {
            h_min: 1.0,
            h_init: 0.1,
            ..cfg
        };
        assert_eq!(
            integrate_adaptive(&sys, (1.0, 0.0), 1.0, &Forcing::Zero, &bad, &[]),
            Err(RkfError::InvalidConfig)
        );
    }

    #[test]
    fn blow_up_is_reported() {
        // soft spring pushed far outside its well diverges in finite time
        let sys = DuffingSystem::new(1.0, 0.0, 1.0, -1.0).unwrap();
        let err = integrate_adaptive(
            &sys,
            (10.0, 0.0),
            10.0,
            &Forcing::Zero,
            &RkfConfig::default(),
            &[10.0],
        );
        assert!(
            matches!(
                err,
                Err(RkfError::StepSizeUnderflow { .. }) | Err(RkfError::NonFinite { .. })
            ),
            "{err:?}"
        );
    }
}
