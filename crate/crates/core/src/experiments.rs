//! Example catalog (hard, soft and inverted oscillators), displacement
//! comparison against the RKF45 reference, and the time-step convergence
//! study.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::integrator::{self, IntegrateError};
use crate::math;
use crate::rkf45::{self, RkfConfig, RkfError};
use crate::system::{initial_state, DuffingSystem, Forcing, State, Trajectory};

/// Stiffness regime of a Duffing oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum OscillatorKind {
    /// `k > 0`, `beta > 0`.
    Hard,
    /// `k > 0`, `beta < 0`.
    Soft,
    /// `k < 0`, `beta > 0`.
    Inverted,
}

impl OscillatorKind {
    /// Kind implied by the signs of `k` and `beta`, if any.
    pub fn classify(system: &DuffingSystem) -> Option<Self> {
        match (system.stiffness() > 0.0, system.beta()) {
            (true, b) if b > 0.0 => Some(Self::Hard),
            (true, b) if b < 0.0 => Some(Self::Soft),
            (false, b) if b > 0.0 => Some(Self::Inverted),
            _ => None,
        }
    }

    /// Lower-case name.
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Hard => "hard",
            Self::Soft => "soft",
            Self::Inverted => "inverted",
        }
    }
}

impl core::str::FromStr for OscillatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hard" => Ok(Self::Hard),
            "soft" => Ok(Self::Soft),
            "inverted" => Ok(Self::Inverted),
            other => Err(alloc::format!(
                "unknown oscillator type '{other}' (hard, soft, inverted)"
            )),
        }
    }
}

/// A named example: system, forcing, initial conditions and default run
/// parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExperimentSpec {
    /// Catalog identifier, e.g. `T1E1`.
    pub id: &'static str,
    /// Stiffness regime.
    pub kind: OscillatorKind,
    /// Oscillator parameters.
    pub system: DuffingSystem,
    /// External force.
    pub forcing: Forcing,
    /// Initial displacement.
    pub u0: f64,
    /// Initial velocity.
    pub v0: f64,
    /// Default time step.
    pub dt_default: f64,
    /// Default analysis time.
    pub t_total_default: f64,
}

impl ExperimentSpec {
    /// Initial node for the integrator.
    pub fn initial_state(&self) -> State {
        initial_state(&self.system, self.u0, self.v0)
    }
}

fn system(m: f64, c: f64, k: f64, beta: f64) -> DuffingSystem {
    DuffingSystem::new(m, c, k, beta).expect("catalog parameters are valid")
}

/// The fourteen catalog examples, in table order.
pub fn catalog() -> Vec<ExperimentSpec> {
    let mut out = Vec::with_capacity(14);

    let hard = system(1.0, 0.2, 1.0, 0.1);
    let hard_force = Forcing::cosine(0.5, 2.00649);
    for (id, u0, v0) in [
        ("T1E1", 3.0, 0.0),
        ("T1E2", -3.0, 0.0),
        ("T1E3", -1.0, 1.0),
        ("T1E4", 1.0, 1.0),
    ] {
        out.push(ExperimentSpec {
            id,
            kind: OscillatorKind::Hard,
            system: hard,
            forcing: hard_force,
            u0,
            v0,
            dt_default: 0.01,
            t_total_default: 100.0,
        });
    }

    let soft_force = Forcing::cosine(1.0 / 3.0, 0.6);
    for (id, c, u0, v0) in [
        ("T2E1", 0.24, 0.519674, 0.072267),
        ("T2E2", 0.24, 1.0, 0.0),
        ("T2E3", 0.002, 0.55404958, 0.0011051),
        ("T2E4", 0.002, 1.0, -0.531),
    ] {
        out.push(ExperimentSpec {
            id,
            kind: OscillatorKind::Soft,
            system: system(1.0, c, 1.0, -1.0 / 6.0),
            forcing: soft_force,
            u0,
            v0,
            dt_default: 0.01,
            t_total_default: 100.0,
        });
    }

    let inverted = system(1.0, 0.3, -1.0, 1.0);
    for (id, f0, dt, t_total) in [
        ("T3E1", 0.2, 0.01, 100.0),
        ("T3E2", 0.28, 0.01, 100.0),
        ("T3E3", 0.29, 0.01, 100.0),
        ("T3E4", 0.37, 0.01, 100.0),
        ("T3E5", 0.5, 0.001, 40.0),
        ("T3E6", 0.65, 0.001, 100.0),
    ] {
        out.push(ExperimentSpec {
            id,
            kind: OscillatorKind::Inverted,
            system: inverted,
            forcing: Forcing::cosine(f0, 1.2),
            u0: 1.0,
            v0: 0.0,
            dt_default: dt,
            t_total_default: t_total,
        });
    }
    out
}

/// Looks up a catalog entry by id (case-insensitive).
pub fn find(id: &str) -> Option<ExperimentSpec> {
    catalog()
        .into_iter()
        .find(|s| s.id.eq_ignore_ascii_case(id))
}

/// Failures of the comparison and convergence drivers.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentError {
    /// The comparison grid has no points after `t = 0`.
    EmptyGrid,
    /// Reference and candidate series do not share the same sample times.
    GridMismatch,
    /// The time-step list is unusable.
    InvalidDtList(String),
    /// The fixed-step integrator failed.
    Integrate(IntegrateError),
    /// The reference integrator failed.
    Reference(RkfError),
}

impl fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentError::EmptyGrid => {
                write!(f, "comparison grid is empty (horizon must exceed zero)")
            }
            ExperimentError::GridMismatch => write!(f, "series are not sampled on the same grid"),
            ExperimentError::InvalidDtList(why) => write!(f, "invalid time-step list: {why}"),
            ExperimentError::Integrate(e) => write!(f, "integration failed: {e}"),
            ExperimentError::Reference(e) => write!(f, "reference integration failed: {e}"),
        }
    }
}

impl core::error::Error for ExperimentError {}

impl From<IntegrateError> for ExperimentError {
    fn from(e: IntegrateError) -> Self {
        ExperimentError::Integrate(e)
    }
}

impl From<RkfError> for ExperimentError {
    fn from(e: RkfError) -> Self {
        ExperimentError::Reference(e)
    }
}

/// Displacement differences between a candidate and a reference series.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ComparisonReport {
    /// Experiment id.
    pub id: String,
    /// Time step of the candidate run.
    pub dt: f64,
    /// Common sample times.
    pub grid: Vec<f64>,
    /// Largest pointwise `|u_candidate - u_reference|`.
    pub max_abs_diff_u: f64,
    /// Root-mean-square displacement difference.
    pub rms_diff_u: f64,
    /// `rms_diff_u` over the RMS of the reference displacement.
    pub rel_rms_u: f64,
    /// End of the compared interval.
    pub horizon: f64,
}

impl ComparisonReport {
    /// Compares two `(t, u)` series sampled at identical times.
    pub fn from_series(
        id: &str,
        dt: f64,
        reference: &[(f64, f64)],
        candidate: &[(f64, f64)],
    ) -> Result<Self, ExperimentError> {
        if reference.len() < 2 {
            return Err(ExperimentError::EmptyGrid);
        }
        if reference.len() != candidate.len()
            || reference.iter().zip(candidate).any(|(r, c)| r.0 != c.0)
        {
            return Err(ExperimentError::GridMismatch);
        }
        let n = reference.len() as f64;
        let mut max_abs: f64 = 0.0;
        let mut sq_diff = 0.0;
        let mut sq_ref = 0.0;
        for (r, c) in reference.iter().zip(candidate) {
            let d = c.1 - r.1;
            max_abs = max_abs.max(math::abs(d));
            sq_diff += d * d;
            sq_ref += r.1 * r.1;
        }
        let rms_diff = math::sqrt(sq_diff / n);
        let rms_ref = math::sqrt(sq_ref / n);
        let rel = if rms_diff == 0.0 {
            0.0
        } else {
            rms_diff / rms_ref
        };
        Ok(Self {
            id: id.to_string(),
            dt,
            grid: reference.iter().map(|p| p.0).collect(),
            max_abs_diff_u: max_abs,
            rms_diff_u: rms_diff,
            rel_rms_u: rel,
            horizon: reference[reference.len() - 1].0,
        })
    }
}

/// Reference samples taken at the nodes of `trajectory`.
pub fn reference_on_grid(
    spec: &ExperimentSpec,
    trajectory: &Trajectory,
    rkf_config: &RkfConfig,
) -> Result<Vec<rkf45::PhasePoint>, RkfError> {
    let times: Vec<f64> = trajectory.states.iter().map(|s| s.t).collect();
    let horizon = times.last().copied().unwrap_or(0.0);
    rkf45::integrate_adaptive(
        &spec.system,
        (spec.u0, spec.v0),
        horizon,
        &spec.forcing,
        rkf_config,
        &times,
    )
}

/// Runs the fixed-step integrator at `dt` and the RKF45 reference over
/// `[0, horizon]`, and compares displacements on the fixed-step grid.
pub fn run_comparison(
    spec: &ExperimentSpec,
    dt: f64,
    horizon: f64,
    rkf_config: &RkfConfig,
) -> Result<ComparisonReport, ExperimentError> {
    if !(horizon > 0.0) {
        return Err(ExperimentError::EmptyGrid);
    }
    let traj = integrator::integrate(
        &spec.system,
        spec.initial_state(),
        dt,
        horizon,
        &spec.forcing,
    )?;
    let reference = reference_on_grid(spec, &traj, rkf_config)?;
    compare_trajectory(spec.id, &traj, &reference)
}

/// Compares a fixed-step trajectory with reference samples on its grid.
pub fn compare_trajectory(
    id: &str,
    trajectory: &Trajectory,
    reference: &[rkf45::PhasePoint],
) -> Result<ComparisonReport, ExperimentError> {
    let cand: Vec<(f64, f64)> = trajectory.states.iter().map(|s| (s.t, s.u)).collect();
    let refr: Vec<(f64, f64)> = reference.iter().map(|p| (p.t, p.u)).collect();
    ComparisonReport::from_series(id, trajectory.dt, &refr, &cand)
}

/// Displacement error of several step sizes against a fine-step reference.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConvergenceReport {
    /// Experiment id.
    pub id: String,
    /// Step sizes studied, in input order.
    pub dt_list: Vec<f64>,
    /// Step size of the reference run.
    pub reference_dt: f64,
    /// Spacing of the common comparison grid.
    pub grid_spacing: f64,
    /// RMS displacement difference to the reference, per entry of `dt_list`.
    pub rms_vs_reference: Vec<f64>,
    /// Least-squares slope of `ln rms` against `ln dt`; `None` with fewer
    /// than two usable points.
    pub observed_order: Option<f64>,
}

/// Least-squares slope of `ln(error)` against `ln(dt)`.
///
/// Needs at least two distinct step sizes with positive finite errors.
pub fn fit_order(dts: &[f64], errors: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = dts
        .iter()
        .zip(errors)
        .filter(|(d, e)| **d > 0.0 && **e > 0.0 && e.is_finite())
        .map(|(d, e)| (math::ln(*d), math::ln(*e)))
        .collect();
    if pts.len() < 2 || pts.len() != dts.len() {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Expresses every step size as an integer multiple of `reference_dt` and
/// returns those multiples together with their least common multiple, the
/// stride (in reference steps) of the coarsest grid shared by all runs.
pub fn comparison_stride(
    dt_list: &[f64],
    reference_dt: f64,
) -> Result<(Vec<usize>, usize), ExperimentError> {
    if dt_list.is_empty() {
        return Err(ExperimentError::InvalidDtList("empty".to_string()));
    }
    if !(reference_dt > 0.0 && reference_dt.is_finite()) {
        return Err(ExperimentError::InvalidDtList(alloc::format!(
            "reference step {reference_dt} is not positive"
        )));
    }
    let mut multiples = Vec::with_capacity(dt_list.len());
    let mut lcm = 1usize;
    for &dt in dt_list {
        let ratio = dt / reference_dt;
        let k = math::round(ratio);
        if !(dt > reference_dt) || math::abs(ratio - k) > 1e-9 * k {
            return Err(ExperimentError::InvalidDtList(alloc::format!(
                "step {dt} is not an integer multiple (> 1) of the reference step {reference_dt}"
            )));
        }
        let k = k as usize;
        lcm = lcm / gcd(lcm, k) * k;
        multiples.push(k);
    }
    Ok((multiples, lcm))
}

impl ConvergenceReport {
    /// Builds the report from already computed runs; `runs[i]` must have
    /// been integrated with `dt_list[i]` over the same horizon as `reference`.
    pub fn from_trajectories(
        id: &str,
        dt_list: &[f64],
        reference_dt: f64,
        reference: &Trajectory,
        runs: &[Trajectory],
    ) -> Result<Self, ExperimentError> {
        let (multiples, stride) = comparison_stride(dt_list, reference_dt)?;
        if runs.len() != dt_list.len() {
            return Err(ExperimentError::GridMismatch);
        }
        let points = (reference.states.len() - 1) / stride;
        if points == 0 {
            return Err(ExperimentError::EmptyGrid);
        }
        let mut rms = Vec::with_capacity(runs.len());
        for (run, &k) in runs.iter().zip(&multiples) {
            let per_node = stride / k;
            let mut sq = 0.0;
            for g in 0..=points {
                let r = reference
                    .states
                    .get(g * stride)
                    .ok_or(ExperimentError::GridMismatch)?;
                let c = run
                    .states
                    .get(g * per_node)
                    .ok_or(ExperimentError::GridMismatch)?;
                if math::abs(r.t - c.t) > 1e-9 * r.t.max(1.0) {
                    return Err(ExperimentError::GridMismatch);
                }
                sq += (c.u - r.u) * (c.u - r.u);
            }
            rms.push(math::sqrt(sq / (points + 1) as f64));
        }
        Ok(Self {
            id: id.to_string(),
            dt_list: dt_list.to_vec(),
            reference_dt,
            grid_spacing: stride as f64 * reference_dt,
            observed_order: fit_order(dt_list, &rms),
            rms_vs_reference: rms,
        })
    }
}

/// Integrates `spec` at every step in `dt_list` and at `reference_dt`, all
/// over `[0, t_total]`, and measures displacement RMS differences on the
/// coarsest grid common to all runs.
pub fn convergence_study(
    spec: &ExperimentSpec,
    dt_list: &[f64],
    reference_dt: f64,
    t_total: f64,
) -> Result<ConvergenceReport, ExperimentError> {
    comparison_stride(dt_list, reference_dt)?;
    let run = |dt: f64| {
        integrator::integrate(
            &spec.system,
            spec.initial_state(),
            dt,
            t_total,
            &spec.forcing,
        )
    };
    let reference = run(reference_dt)?;
    let runs = dt_list
        .iter()
        .map(|&dt| run(dt))
        .collect::<Result<Vec<_>, _>>()?;
    ConvergenceReport::from_trajectories(spec.id, dt_list, reference_dt, &reference, &runs)
}
