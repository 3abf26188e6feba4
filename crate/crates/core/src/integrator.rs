//! Non-iterative fixed-step integrator.
//!
//! With linear interpolation of `u` and `J` over a step `[t0, t0 + h]`, a
//! constant force sample `f` and end-node momenta `p0`, `p1`, stationarity
//! of the discrete action gives three equations:
//!
//! ```text
//! start:    m/h (u1-u0) + c/2 (u1-u0) + (J1-J0)/2 - f h/2 - p0 + Q = 0
//! end:     -m/h (u1-u0) + c/2 (u1-u0) + (J1-J0)/2 - f h/2 + p1 + Q = 0
//! impulse:  a/h (J1-J0) - (u1+u0)/2 = 0
//!
//! Q = beta h / 20 (4 u0^3 + 3 u0^2 u1 + 2 u0 u1^2 + u1^3)
//! ```
//!
//! Eliminating `J1 - J0` from the first equation with the third leaves a
//! cubic in `u1` (see [`assemble_cubic`]). Among its real roots the one
//! nearest `u0` is taken, after which `J1` follows from the impulse
//! equation and `p1` from the sum of the start and end equations.

use alloc::vec::Vec;
use core::fmt;

use crate::cubic::{self, CubicAnalysis, CubicCoefficients, CubicError, Roots};
use crate::math;
use crate::system::{DuffingSystem, Excitation, State, Trajectory};

/// Tolerance on the two momentum-balance residuals, relative to [`step_scale`].
pub const BALANCE_RESIDUAL_TOL: f64 = 1e-9;
/// Tolerance on the impulse residual, relative to `max(1, |u0| + |u1|)`.
pub const IMPULSE_RESIDUAL_TOL: f64 = 1e-12;
/// Allowed rounding in the impulse residual, in ulps of its largest term.
pub const IMPULSE_RESIDUAL_ULPS: f64 = 64.0;

/// Steps counts within this relative distance of an integer are rounded
/// instead of adding a sliver step.
const STEP_COUNT_SNAP: f64 = 1e-9;

/// Why a single step was rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepError {
    /// Step length was not a positive finite number.
    InvalidStepSize(f64),
    /// The reduced equation had no real root.
    NoRealRoot,
    /// The cubic solver rejected the coefficients.
    Cubic(CubicError),
    /// The accepted step violates the discrete equations.
    ResidualCheckFailed(Residuals),
    /// The produced state contains NaN or infinity.
    NonFiniteState,
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepError::InvalidStepSize(h) => write!(f, "invalid step size {h}"),
            StepError::NoRealRoot => write!(f, "step equation has no real root"),
            StepError::Cubic(e) => write!(f, "cubic solve failed: {e}"),
            StepError::ResidualCheckFailed(r) => write!(
                f,
                "residual check failed (start {:e}, end {:e}, impulse {:e})",
                r.start, r.end, r.impulse
            ),
            StepError::NonFiniteState => write!(f, "step produced a non-finite state"),
        }
    }
}

impl core::error::Error for StepError {}

/// Failure of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrateError {
    /// `dt` was not a positive finite number.
    InvalidStepSize(f64),
    /// `t_total` was not finite or shorter than `dt`.
    InvalidHorizon(f64),
    /// The initial state contains NaN or infinity.
    NonFiniteInitialState,
    /// Step `index` (0-based, from `states[index]`) failed.
    Step {
        /// Index of the failing step.
        index: usize,
        /// Underlying failure.
        source: StepError,
    },
}

impl fmt::Display for IntegrateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegrateError::InvalidStepSize(dt) => {
                write!(f, "time step must be positive and finite, got {dt}")
            }
            IntegrateError::InvalidHorizon(t) => {
                write!(
                    f,
                    "total time must be finite and at least one time step, got {t}"
                )
            }
            IntegrateError::NonFiniteInitialState => write!(f, "initial state must be finite"),
            IntegrateError::Step { index, source } => write!(f, "step {index} failed: {source}"),
        }
    }
}

impl core::error::Error for IntegrateError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            IntegrateError::Step { source, .. } => Some(source),
            _ => None,
        }
    }
}

/// Left-hand sides of the three discrete equations at an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Residuals {
    /// Balance at the start node (variation of `u0`).
    pub start: f64,
    /// Balance at the end node (variation of `u1`).
    pub end: f64,
    /// Impulse/displacement compatibility (variation of `J`).
    pub impulse: f64,
}

/// How the step equation was solved.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum RootSolve {
    /// Proper cubic.
    Cubic(CubicAnalysis),
    /// Negligible cubic coefficient (`beta = 0`): quadratic or linear solve.
    Degenerate(Roots),
}

impl RootSolve {
    /// Real roots found.
    pub fn roots(&self) -> &[f64] {
        match self {
            RootSolve::Cubic(a) => &a.roots,
            RootSolve::Degenerate(r) => r,
        }
    }
}

/// Per-step record of how the new state was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StepDiagnostics {
    /// Step length actually used.
    pub dt: f64,
    /// Coefficients of the step cubic.
    pub coeffs: CubicCoefficients,
    /// Root analysis.
    pub solve: RootSolve,
    /// Displacement accepted for the end node.
    pub selected_root: f64,
    /// More than one real root was available.
    pub was_ambiguous: bool,
    /// The depressed-cubic coefficient `s` was positive, which guarantees a
    /// single real root. For a degenerate equation: exactly one root.
    pub uniqueness_satisfied: bool,
    /// Residuals of the discrete equations at the accepted state.
    pub residuals: Residuals,
    /// Force sample used over the step.
    pub f_end: f64,
}

/// Cubic part of the start-node balance,
/// `beta h / 20 (4 u0^3 + 3 u0^2 u1 + 2 u0 u1^2 + u1^3)`.
pub fn q_term(beta: f64, dt: f64, u0: f64, u1: f64) -> f64 {
    beta * dt / 20.0 * (4.0 * u0 * u0 * u0 + 3.0 * u0 * u0 * u1 + 2.0 * u0 * u1 * u1 + u1 * u1 * u1)
}

/// Coefficients of the step cubic in `u1`: the start-node balance with the
/// impulse equation substituted, multiplied through by `20 a h`.
pub fn assemble_cubic(
    system: &DuffingSystem,
    state0: &State,
    dt: f64,
    f_end: f64,
) -> CubicCoefficients {
    let (m, c, a, beta) = (
        system.mass(),
        system.damping(),
        system.flexibility(),
        system.beta(),
    );
    let (u0, p0) = (state0.u, state0.p);
    let h2 = dt * dt;
    CubicCoefficients {
        a: beta * a * h2,
        b: 2.0 * beta * a * h2 * u0,
        c: 5.0 * h2 + 20.0 * m * a + 10.0 * c * a * dt + 3.0 * beta * a * u0 * u0 * h2,
        d: 5.0 * u0 * h2 - 10.0 * c * a * u0 * dt - 20.0 * a * dt * p0 - 20.0 * m * a * u0
            + 4.0 * beta * a * u0 * u0 * u0 * h2
            - 10.0 * a * dt * dt * f_end,
    }
}

/// Sign of the depressed-cubic coefficient `s` of the step cubic at
/// displacement `u0`: `s > 0` guarantees a single real root.
///
/// `s` does not depend on the momentum or forcing. Returns
/// `(s > 0, s)`; fails with [`CubicError::DegenerateCubic`] when the
/// equation is not a proper cubic (`beta = 0`).
pub fn uniqueness_condition(
    system: &DuffingSystem,
    u0: f64,
    dt: f64,
) -> Result<(bool, f64), CubicError> {
    let probe = State {
        t: 0.0,
        u: u0,
        j: 0.0,
        p: 0.0,
    };
    let coeffs = assemble_cubic(system, &probe, dt, 0.0);
    if !coeffs.is_finite() {
        return Err(CubicError::NonFiniteInput);
    }
    if coeffs.is_degenerate() {
        return Err(CubicError::DegenerateCubic);
    }
    let a1 = coeffs.b / coeffs.a;
    let s = coeffs.c / coeffs.a - a1 * a1 / 3.0;
    Ok((s > 0.0, s))
}

/// Evaluates the three discrete equations for a candidate step.
pub fn residuals(
    system: &DuffingSystem,
    state0: &State,
    state1: &State,
    dt: f64,
    f_end: f64,
) -> Residuals {
    let (m, c, a) = (system.mass(), system.damping(), system.flexibility());
    let du = state1.u - state0.u;
    let dj = state1.j - state0.j;
    let q = q_term(system.beta(), dt, state0.u, state1.u);
    let shared = c / 2.0 * du + 0.5 * dj - f_end * dt / 2.0 + q;
    Residuals {
        start: m / dt * du + shared - state0.p,
        end: -m / dt * du + shared + state1.p,
        impulse: a / dt * dj - 0.5 * (state1.u + state0.u),
    }
}

/// Scale for the momentum-balance residuals of a step.
pub fn step_scale(
    system: &DuffingSystem,
    state0: &State,
    state1: &State,
    dt: f64,
    f_end: f64,
) -> f64 {
    let inertia = system.mass() * math::abs(state1.u - state0.u) / dt;
    math::abs(state0.p)
        .max(math::abs(state1.p))
        .max(inertia)
        .max(math::abs(f_end) * dt)
        .max(1.0)
}

/// Bound on the impulse residual from rounding in the stored impulses:
/// `IMPULSE_RESIDUAL_ULPS` ulps of the largest term once `J1 - J0` is
/// expanded, never below the absolute floor
/// `IMPULSE_RESIDUAL_TOL * max(1, |u0| + |u1|)`.
pub fn impulse_residual_bound(
    system: &DuffingSystem,
    state0: &State,
    state1: &State,
    dt: f64,
) -> f64 {
    let ratio = math::abs(system.flexibility() / dt);
    let largest = (ratio * math::abs(state0.j))
        .max(ratio * math::abs(state1.j))
        .max(0.5 * math::abs(state0.u))
        .max(0.5 * math::abs(state1.u));
    let floor = IMPULSE_RESIDUAL_TOL * (math::abs(state0.u) + math::abs(state1.u)).max(1.0);
    (IMPULSE_RESIDUAL_ULPS * f64::EPSILON * largest).max(floor)
}

/// Advances `state0` by `dt` under `forcing`.
pub fn step<E: Excitation + ?Sized>(
    system: &DuffingSystem,
    state0: &State,
    dt: f64,
    forcing: &E,
) -> Result<(State, StepDiagnostics), StepError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(StepError::InvalidStepSize(dt));
    }
    step_to(system, state0, state0.t + dt, forcing)
}

/// Advances `state0` to time `t1`; the step length is `t1 - state0.t`.
fn step_to<E: Excitation + ?Sized>(
    system: &DuffingSystem,
    state0: &State,
    t1: f64,
    forcing: &E,
) -> Result<(State, StepDiagnostics), StepError> {
    let dt = t1 - state0.t;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(StepError::InvalidStepSize(dt));
    }
    let f_end = forcing.value_at(t1);
    let coeffs = assemble_cubic(system, state0, dt, f_end);

    let (solve, uniqueness_satisfied) = if coeffs.is_degenerate() {
        let roots = cubic::solve_degenerate(&coeffs).map_err(|e| match e {
            CubicError::NoSolution | CubicError::IndeterminateSolution => StepError::NoRealRoot,
            other => StepError::Cubic(other),
        })?;
        (RootSolve::Degenerate(roots), roots.len() == 1)
    } else {
        let analysis = cubic::analyze(&coeffs).map_err(StepError::Cubic)?;
        (RootSolve::Cubic(analysis), analysis.s > 0.0)
    };
    let (u1, was_ambiguous) =
        cubic::select_root(solve.roots(), state0.u).map_err(|_| StepError::NoRealRoot)?;

    let a = system.flexibility();
    let j1 = state0.j + dt / (2.0 * a) * (state0.u + u1);
    let dj = j1 - state0.j;
    let p1 = state0.p + f_end * dt
        - system.damping() * (u1 - state0.u)
        - dj
        - 2.0 * q_term(system.beta(), dt, state0.u, u1);
    let state1 = State {
        t: t1,
        u: u1,
        j: j1,
        p: p1,
    };
    if !state1.is_finite() {
        return Err(StepError::NonFiniteState);
    }

    let res = residuals(system, state0, &state1, dt, f_end);
    let scale = step_scale(system, state0, &state1, dt, f_end);
    let balance_tol = BALANCE_RESIDUAL_TOL * scale;
    if !(math::abs(res.start) <= balance_tol
        && math::abs(res.end) <= balance_tol
        && math::abs(res.impulse) <= impulse_residual_bound(system, state0, &state1, dt))
    {
        return Err(StepError::ResidualCheckFailed(res));
    }

    let diag = StepDiagnostics {
        dt,
        coeffs,
        solve,
        selected_root: u1,
        was_ambiguous,
        uniqueness_satisfied,
        residuals: res,
        f_end,
    };
    Ok((state1, diag))
}

/// Number of steps needed to cover `t_total` with steps of `dt`; ratios
/// within rounding of an integer are not padded with a sliver step.
pub fn step_count(dt: f64, t_total: f64) -> usize {
    let ratio = t_total / dt;
    let nearest = math::round(ratio);
    let n = if math::abs(ratio - nearest) <= STEP_COUNT_SNAP * nearest.max(1.0) {
        nearest
    } else {
        math::ceil(ratio)
    };
    n as usize
}

/// Node time `i` of a run of `n` steps starting at `t0`.
pub fn node_time(t0: f64, dt: f64, t_total: f64, n: usize, i: usize) -> f64 {
    if i == n {
        t0 + t_total
    } else {
        t0 + i as f64 * dt
    }
}

/// All node times of a run from `t0`, matching those produced by
/// [`integrate`].
pub fn node_times(t0: f64, dt: f64, t_total: f64) -> Vec<f64> {
    let n = step_count(dt, t_total);
    (0..=n).map(|i| node_time(t0, dt, t_total, n, i)).collect()
}

/// Integrates from `init` with nominal step `dt` until `init.t + t_total`.
///
/// Node times are `init.t + i dt`; the final node lands exactly on the
/// horizon, shortening the last step when `t_total` is not a multiple of
/// `dt`.
pub fn integrate<E: Excitation + ?Sized>(
    system: &DuffingSystem,
    init: State,
    dt: f64,
    t_total: f64,
    forcing: &E,
) -> Result<Trajectory, IntegrateError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(IntegrateError::InvalidStepSize(dt));
    }
    if !(t_total.is_finite() && t_total >= dt * (1.0 - STEP_COUNT_SNAP)) {
        return Err(IntegrateError::InvalidHorizon(t_total));
    }
    if !init.is_finite() {
        return Err(IntegrateError::NonFiniteInitialState);
    }

    let n = step_count(dt, t_total);
    let mut states = Vec::with_capacity(n + 1);
    let mut diagnostics = Vec::with_capacity(n);
    states.push(init);
    let mut current = init;
    for i in 0..n {
        let t1 = node_time(init.t, dt, t_total, n, i + 1);
        let (next, diag) = step_to(system, &current, t1, forcing)
            .map_err(|source| IntegrateError::Step { index: i, source })?;
        states.push(next);
        diagnostics.push(diag);
        current = next;
    }
    Ok(Trajectory {
        states,
        dt,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{initial_state, Forcing};

    fn type_one() -> DuffingSystem {
        DuffingSystem::new(1.0, 0.2, 1.0, 0.1).unwrap()
    }

    #[test]
    fn q_term_values() {
        assert_eq!(q_term(0.0, 0.3, 1.7, -2.0), 0.0);
        assert_eq!(q_term(1.0, 1.0, 1.0, 1.0), 0.5);
        // constant u: beta u^3 h / 2
        let q = q_term(0.1, 0.01, 3.0, 3.0);
        assert!((q - 0.1 * 27.0 * 0.01 / 2.0).abs() < 1e-17);
        assert!((q - 0.0135).abs() < 1e-16);
    }

    #[test]
    fn cubic_coefficients_type_one_first_step() {
        let sys = type_one();
        let s0 = initial_state(&sys, 3.0, 0.0);
        let c = assemble_cubic(&sys, &s0, 0.01, 0.5);
        assert!((c.a - 1e-5).abs() < 1e-20);
        assert!((c.b - 6e-5).abs() < 1e-19);
        // exact rational expansion: C = 2002077/100000, D = -187681/3125
        assert!((c.c - 20.02077).abs() < 1e-12);
        assert!((c.d - -60.05792).abs() < 1e-12);
    }

    #[test]
    fn type_one_first_step_golden() {
        // u1 from bisection on the start balance over [2, 4]; J1 and p1 from
        // the impulse equation and the summed balances
        let sys = type_one();
        let (s1, diag) = step(
            &sys,
            &initial_state(&sys, 3.0, 0.0),
            0.01,
            &Forcing::cosine(0.5, 2.00649),
        )
        .unwrap();
        // 40-digit bisection with f_end = 0.5 cos(2.00649 * 0.01)
        assert!((s1.u - 2.999_740_272_875_183_8).abs() < 1e-14);
        assert!((s1.j - 0.029_998_701_364_375_919).abs() < 1e-15);
        assert!((s1.p - -0.051_945_424_963_237_221).abs() < 1e-13);
        assert!(diag.f_end == Forcing::cosine(0.5, 2.00649).value_at(0.01));
        assert!(!diag.was_ambiguous && diag.uniqueness_satisfied);
    }

    #[test]
    fn linear_system_has_no_cubic_terms() {
        let sys = DuffingSystem::new(1.3, 0.4, 2.0, 0.0).unwrap();
        let s0 = State {
            t: 0.0,
            u: 0.7,
            j: 0.0,
            p: -0.2,
        };
        let c = assemble_cubic(&sys, &s0, 0.05, 0.3);
        assert_eq!((c.a, c.b), (0.0, 0.0));
        let a = sys.flexibility();
        assert_eq!(
            c.c,
            5.0 * 0.05 * 0.05 + 20.0 * 1.3 * a + 10.0 * 0.4 * a * 0.05
        );
    }

    #[test]
    fn zero_step_limit_keeps_displacement() {
        let sys = type_one();
        let s0 = State {
            t: 0.0,
            u: 3.0,
            j: 0.0,
            p: 0.4,
        };
        let c = assemble_cubic(&sys, &s0, 0.0, 0.5);
        assert_eq!(c.c, 20.0);
        assert_eq!(c.d, -60.0);
        assert_eq!(-c.d / c.c, 3.0);
    }

    #[test]
    fn cubic_is_scaled_start_balance() {
        // Q(x) must equal 20 a h * start-residual with J from the impulse equation.
        let sys = DuffingSystem::new(1.7, 0.3, -1.4, 0.9).unwrap();
        let s0 = State {
            t: 0.0,
            u: 0.8,
            j: 0.25,
            p: -0.6,
        };
        let (dt, f) = (0.03, 0.45);
        let coeffs = assemble_cubic(&sys, &s0, dt, f);
        let a = sys.flexibility();
        for x in [-2.0, -0.3, 0.0, 0.81, 1.5, 4.0] {
            let j1 = s0.j + dt / (2.0 * a) * (s0.u + x);
            let s1 = State {
                t: dt,
                u: x,
                j: j1,
                p: 0.0,
            };
            let r = residuals(&sys, &s0, &s1, dt, f);
            let lhs = coeffs.eval(x);
            let rhs = 20.0 * a * dt * r.start;
            assert!(
                (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
                "x={x}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn equilibrium_is_fixed_point() {
        let sys = DuffingSystem::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let rest = initial_state(&sys, 0.0, 0.0);
        let (s1, diag) = step(&sys, &rest, 0.01, &Forcing::Zero).unwrap();
        assert_eq!(
            s1,
            State {
                t: 0.01,
                u: 0.0,
                j: 0.0,
                p: 0.0
            }
        );
        assert!(!diag.was_ambiguous);
    }

    #[test]
    fn frozen_state_violates_impulse_equation() {
        let sys = DuffingSystem::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let s0 = State {
            t: 0.0,
            u: 0.6,
            j: 0.0,
            p: 0.0,
        };
        let r = residuals(&sys, &s0, &s0, 0.1, 0.0);
        assert_eq!(r.impulse, -0.6);
        let origin = State {
            t: 0.0,
            u: 0.0,
            j: 0.0,
            p: 0.0,
        };
        assert_eq!(residuals(&sys, &origin, &origin, 0.1, 0.0).impulse, 0.0);
    }

    #[test]
    fn start_residual_sensitivity_matches_finite_difference() {
        let sys = type_one();
        let s0 = initial_state(&sys, 3.0, 0.0);
        let forcing = Forcing::cosine(0.5, 2.00649);
        let dt = 0.01;
        let (s1, diag) = step(&sys, &s0, dt, &forcing).unwrap();
        let eps = 1e-6;
        let bumped = State {
            u: s1.u + eps,
            ..s1
        };
        let r = residuals(&sys, &s0, &bumped, dt, diag.f_end);
        // d/du1 of the start residual with J held fixed
        let analytic = sys.mass() / dt
            + sys.damping() / 2.0
            + sys.beta() * dt / 20.0 * (3.0 * s0.u * s0.u + 4.0 * s0.u * s1.u + 3.0 * s1.u * s1.u);
        let measured = (r.start - diag.residuals.start) / eps;
        assert!(
            (measured - analytic).abs() < 1e-6 * analytic,
            "{measured} vs {analytic}"
        );
    }

    #[test]
    fn linear_step_matches_two_by_two_solve() {
        let sys = DuffingSystem::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let s0 = initial_state(&sys, 1.0, 0.0);
        let dt = 0.01;
        let (s1, _) = step(&sys, &s0, dt, &Forcing::Zero).unwrap();
        // m/h (u1-u0) + (J1-J0)/2 = p0,  a/h (J1-J0) = (u0+u1)/2, solved by Cramer
        let (m, a) = (1.0, 1.0);
        let (a11, a12, b1) = (m / dt, 0.5, m / dt * s0.u + s0.p);
        let (a21, a22, b2) = (-0.5, a / dt, 0.5 * s0.u);
        let det = a11 * a22 - a12 * a21;
        let u1 = (b1 * a22 - a12 * b2) / det;
        let dj = (a11 * b2 - a21 * b1) / det;
        let p1 = s0.p - dj;
        assert!((s1.u - u1).abs() <= 1e-14);
        assert!((s1.p - p1).abs() <= 1e-14);
    }

    #[test]
    fn step_rejects_bad_dt() {
        let sys = type_one();
        let s0 = initial_state(&sys, 1.0, 0.0);
        assert_eq!(
            step(&sys, &s0, 0.0, &Forcing::Zero).unwrap_err(),
            StepError::InvalidStepSize(0.0)
        );
        assert!(step(&sys, &s0, f64::NAN, &Forcing::Zero).is_err());
    }

    #[test]
    fn step_counts() {
        assert_eq!(step_count(0.01, 100.0), 10000);
        assert_eq!(step_count(0.001, 40.0), 40000);
        assert_eq!(step_count(0.1, 1.0), 10);
        assert_eq!(step_count(0.3, 1.0), 4);
        assert_eq!(step_count(0.5, 0.5), 1);
    }

    #[test]
    fn single_step_horizon() {
        let sys = type_one();
        let traj = integrate(
            &sys,
            initial_state(&sys, 3.0, 0.0),
            0.01,
            0.01,
            &Forcing::Zero,
        )
        .unwrap();
        assert_eq!(traj.states.len(), 2);
        assert_eq!(traj.diagnostics.len(), 1);
    }

    #[test]
    fn truncated_last_step_lands_on_horizon() {
        let sys = type_one();
        let traj = integrate(
            &sys,
            initial_state(&sys, 3.0, 0.0),
            0.3,
            1.0,
            &Forcing::Zero,
        )
        .unwrap();
        assert_eq!(traj.states.len(), 5);
        assert_eq!(traj.last().t, 1.0);
        assert!((traj.diagnostics[3].dt - 0.1).abs() < 1e-15);
    }

    #[test]
    fn integrate_argument_errors() {
        let sys = type_one();
        let init = initial_state(&sys, 3.0, 0.0);
        assert_eq!(
            integrate(&sys, init, -0.1, 1.0, &Forcing::Zero),
            Err(IntegrateError::InvalidStepSize(-0.1))
        );
        assert_eq!(
            integrate(&sys, init, 0.1, 0.05, &Forcing::Zero),
            Err(IntegrateError::InvalidHorizon(0.05))
        );
        let bad = State {
            u: f64::INFINITY,
            ..init
        };
        assert_eq!(
            integrate(&sys, bad, 0.1, 1.0, &Forcing::Zero),
            Err(IntegrateError::NonFiniteInitialState)
        );
    }

    #[test]
    fn failing_step_reports_its_index() {
        // force blows up after t = 0.25
        let sys = type_one();
        let forcing = |t: f64| if t > 0.25 { f64::NAN } else { 0.0 };
        let err = integrate(&sys, initial_state(&sys, 1.0, 0.0), 0.1, 1.0, &forcing).unwrap_err();
        match err {
            IntegrateError::Step { index, .. } => assert_eq!(index, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn uniqueness_examples() {
        let sys = type_one();
        let (ok, s) = uniqueness_condition(&sys, 3.0, 0.01).unwrap();
        assert!(ok && s > 0.0);
        let (dt, a, m, c, beta) = (0.01, 1.0, 1.0, 0.2, 0.1);
        let (_, s0) = uniqueness_condition(&sys, 0.0, dt).unwrap();
        let expected = (5.0 * dt * dt + 20.0 * m * a + 10.0 * c * a * dt) / (beta * a * dt * dt);
        assert!((s0 - expected).abs() <= 1e-12 * expected);
        // s(u0) = s(0) + 5/3 u0^2
        let (_, s3) = uniqueness_condition(&sys, 3.0, dt).unwrap();
        assert!((s3 - (expected + 15.0)).abs() <= 1e-9 * expected);

        let linear = DuffingSystem::new(1.0, 0.2, 1.0, 0.0).unwrap();
        assert_eq!(
            uniqueness_condition(&linear, 1.0, 0.01),
            Err(CubicError::DegenerateCubic)
        );
    }

    #[test]
    fn uniqueness_agrees_with_root_count_inverted() {
        let sys = DuffingSystem::new(1.0, 0.3, -1.0, 1.0).unwrap();
        let (ok, _) = uniqueness_condition(&sys, 1.0, 0.001).unwrap();
        let s0 = initial_state(&sys, 1.0, 0.0);
        let an = cubic::analyze(&assemble_cubic(&sys, &s0, 0.001, 0.2)).unwrap();
        if ok {
            assert_eq!(an.n_real_roots(), 1);
        }
    }
}
