use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ehp_duffing::experiments::{self, catalog, comparison_stride, find, run_comparison};
use ehp_duffing::integrator::{integrate, node_times};
use ehp_duffing::{
    integrate_adaptive, ConvergenceReport, DuffingSystem, ExperimentSpec, Forcing, PhasePoint,
    Residuals, RkfConfig, Trajectory,
};
use serde::Serialize;

use crate::args::{
    CatalogArgs, Cli, Command, CompareArgs, ConvergenceArgs, Format, Method, SimulateArgs,
};
use crate::error::CliError;
use crate::parallel::{map_ordered, thread_limit};
use crate::svg::{self, Panel, Series};
use crate::trajectory_csv::{ehp_rows, reference_rows, write_rows, Row};

const CUSTOM_DT: f64 = 0.01;
const CUSTOM_T_END: f64 = 100.0;

/// Runs one parsed command, printing listings and stdout reports to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Catalog(a) => cmd_catalog(&a, out),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Compare(a) => cmd_compare(&a, out),
        Command::Convergence(a) => cmd_convergence(&a, out),
    }
}

fn lookup(id: &str) -> Result<ExperimentSpec, CliError> {
    find(id).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown example '{id}' (see `ehp-duffing catalog`)"
        ))
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn emit_json<T: Serialize>(
    value: &T,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    match path {
        Some(p) => write_file(p, text.as_bytes()),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn harmonic_parts(f: &Forcing) -> (f64, f64, f64) {
    match *f {
        Forcing::Zero => (0.0, 0.0, 0.0),
        Forcing::Constant { value } => (value, 0.0, 0.0),
        Forcing::Harmonic {
            amplitude,
            omega,
            phase,
        } => (amplitude, omega, phase),
    }
}

fn cmd_catalog(args: &CatalogArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let specs: Vec<ExperimentSpec> = catalog()
        .into_iter()
        .filter(|s| args.kind.is_none_or(|k| s.kind == k))
        .collect();
    let io = |e| CliError::io(Path::new("<stdout>"), e);
    match args.format {
        Format::Json => emit_json(&specs, None, out),
        Format::Table => {
            writeln!(
                out,
                "{:<5} {:<8} {:>4} {:>6} {:>4} {:>10} {:>10} {:>8} {:>11} {:>10} {:>6} {:>6}",
                "id", "type", "m", "c", "k", "beta", "F0", "omega", "u0", "v0", "dt", "t_end"
            )
            .map_err(io)?;
            for s in &specs {
                let (f0, omega, _) = harmonic_parts(&s.forcing);
                let sys = &s.system;
                writeln!(
                    out,
                    "{:<5} {:<8} {:>4} {:>6} {:>4} {:>10.6} {:>10.6} {:>8} {:>11} {:>10} {:>6} {:>6}",
                    s.id,
                    s.kind.as_str(),
                    sys.mass(),
                    sys.damping(),
                    sys.stiffness(),
                    sys.beta(),
                    f0,
                    omega,
                    s.u0,
                    s.v0,
                    s.dt_default,
                    s.t_total_default
                )
                .map_err(io)?;
            }
            Ok(())
        }
    }
}

/// Fully resolved `simulate` configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub id: String,
    pub system: DuffingSystem,
    pub forcing: Forcing,
    pub u0: f64,
    pub v0: f64,
    pub dt: f64,
    pub t_total: f64,
    pub method: Method,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub rkf: RkfConfig,
}

impl RunConfig {
    /// Applies explicit flags on top of the example's values, or on top of
    /// an unforced unit oscillator at rest when no example is named.
    pub fn resolve(args: &SimulateArgs) -> Result<Self, CliError> {
        let base = args.example.as_deref().map(lookup).transpose()?;
        let p = &args.system;
        let (m, c, k, beta, u0, v0, forcing, dt, t_total, id) = match &base {
            Some(s) => (
                s.system.mass(),
                s.system.damping(),
                s.system.stiffness(),
                s.system.beta(),
                s.u0,
                s.v0,
                s.forcing,
                s.dt_default,
                s.t_total_default,
                s.id.to_string(),
            ),
            None => (
                1.0,
                0.0,
                1.0,
                0.0,
                0.0,
                0.0,
                Forcing::Zero,
                CUSTOM_DT,
                CUSTOM_T_END,
                "custom".to_string(),
            ),
        };
        let system = DuffingSystem::new(
            p.m.unwrap_or(m),
            p.c.unwrap_or(c),
            p.k.unwrap_or(k),
            p.beta.unwrap_or(beta),
        )
        .map_err(|e| CliError::Usage(e.to_string()))?;
        let forcing = if p.f0.is_some() || p.omega.is_some() || p.phase.is_some() {
            let (a, w, ph) = harmonic_parts(&forcing);
            Forcing::Harmonic {
                amplitude: p.f0.unwrap_or(a),
                omega: p.omega.unwrap_or(w),
                phase: p.phase.unwrap_or(ph),
            }
        } else {
            forcing
        };
        let cfg = RunConfig {
            id,
            system,
            forcing,
            u0: p.u0.unwrap_or(u0),
            v0: p.v0.unwrap_or(v0),
            dt: args.dt.unwrap_or(dt),
            t_total: args.t_end.unwrap_or(t_total),
            method: args.method,
            csv: args.csv.clone(),
            json: args.json.clone(),
            svg: args.svg.clone(),
            rkf: RkfConfig::with_tolerances(args.tolerances.abserr, args.tolerances.relerr),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(CliError::Usage(format!(
                "--dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_total > 0.0 && self.t_total.is_finite()) {
            return Err(CliError::Usage(format!(
                "--t-end must be positive, got {}",
                self.t_total
            )));
        }
        if !(self.u0.is_finite() && self.v0.is_finite()) {
            return Err(CliError::Usage("initial conditions must be finite".into()));
        }
        if self.csv.is_none() && self.json.is_none() && self.svg.is_none() {
            return Err(CliError::Usage(
                "nothing to write: give at least one of --csv, --json, --svg".into(),
            ));
        }
        Ok(())
    }
}

enum RunOutput {
    Ehp(Trajectory),
    Reference(Vec<PhasePoint>),
}

#[derive(Serialize)]
struct SimulationSummary<'a> {
    id: &'a str,
    method: &'static str,
    dt: f64,
    horizon: f64,
    system: DuffingSystem,
    forcing: Forcing,
    u0: f64,
    v0: f64,
    steps: usize,
    ambiguous_root_steps: Option<usize>,
    uniqueness_violations: Option<usize>,
    max_residual: Option<Residuals>,
    max_abs_diff_u: Option<f64>,
    rms_diff_u: Option<f64>,
    rel_rms_u: Option<f64>,
}

fn max_residuals(traj: &Trajectory) -> Residuals {
    traj.diagnostics
        .iter()
        .fold(Residuals::default(), |acc, d| Residuals {
            start: acc.start.max(d.residuals.start.abs()),
            end: acc.end.max(d.residuals.end.abs()),
            impulse: acc.impulse.max(d.residuals.impulse.abs()),
        })
}

/// Path for the second series of `--method both`: `out.csv` -> `out-rkf45.csv`.
pub fn reference_csv_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}-rkf45.{}", ext.to_string_lossy()),
        None => format!("{stem}-rkf45"),
    };
    path.with_file_name(name)
}

fn csv_bytes(rows: &[Row]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows).expect("writing to memory cannot fail");
    buf
}

fn phase_series(
    label: &str,
    points: impl Iterator<Item = (f64, f64, f64)> + Clone,
) -> (Series, Series) {
    (
        Series {
            label: label.to_string(),
            points: points.clone().map(|(t, u, _)| (t, u)).collect(),
        },
        Series {
            label: label.to_string(),
            points: points.map(|(_, u, v)| (u, v)).collect(),
        },
    )
}

fn two_panel_plot(title: &str, curves: Vec<(Series, Series)>) -> String {
    let (history, phase): (Vec<_>, Vec<_>) = curves.into_iter().unzip();
    svg::render(&[
        Panel {
            title: format!("{title}: displacement"),
            x_label: "t".into(),
            y_label: "u".into(),
            series: history,
        },
        Panel {
            title: format!("{title}: phase portrait"),
            x_label: "u".into(),
            y_label: "v".into(),
            series: phase,
        },
    ])
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(args)?;
    let threads = thread_limit()?;
    let jobs: &[Method] = match cfg.method {
        Method::Ehp => &[Method::Ehp],
        Method::Rkf45 => &[Method::Rkf45],
        Method::Both => &[Method::Ehp, Method::Rkf45],
    };
    let init = ehp_duffing::system::initial_state(&cfg.system, cfg.u0, cfg.v0);
    let results = map_ordered(jobs, threads, |m| -> Result<RunOutput, CliError> {
        match m {
            Method::Rkf45 => {
                if !(cfg.t_total >= cfg.dt) {
                    return Err(CliError::Usage(format!(
                        "--t-end {} is shorter than --dt {}",
                        cfg.t_total, cfg.dt
                    )));
                }
                let times = node_times(0.0, cfg.dt, cfg.t_total);
                let pts = integrate_adaptive(
                    &cfg.system,
                    (cfg.u0, cfg.v0),
                    cfg.t_total,
                    &cfg.forcing,
                    &cfg.rkf,
                    &times,
                )?;
                Ok(RunOutput::Reference(pts))
            }
            _ => Ok(RunOutput::Ehp(integrate(
                &cfg.system,
                init,
                cfg.dt,
                cfg.t_total,
                &cfg.forcing,
            )?)),
        }
    });
    let mut ehp = None;
    let mut reference = None;
    for r in results {
        match r? {
            RunOutput::Ehp(t) => ehp = Some(t),
            RunOutput::Reference(p) => reference = Some(p),
        }
    }

    if let Some(path) = &cfg.csv {
        match (&ehp, &reference) {
            (Some(t), r) => {
                write_file(path, &csv_bytes(&ehp_rows(&cfg.system, t)))?;
                if let Some(r) = r {
                    write_file(&reference_csv_path(path), &csv_bytes(&reference_rows(r)))?;
                }
            }
            (None, Some(r)) => write_file(path, &csv_bytes(&reference_rows(r)))?,
            (None, None) => unreachable!("at least one method ran"),
        }
    }

    if let Some(path) = &cfg.svg {
        let mut curves = Vec::new();
        if let Some(t) = &ehp {
            curves.push(phase_series(
                "EHP",
                t.states.iter().map(|s| (s.t, s.u, s.velocity(&cfg.system))),
            ));
        }
        if let Some(r) = &reference {
            curves.push(phase_series("RKF45", r.iter().map(|p| (p.t, p.u, p.v))));
        }
        write_file(path, two_panel_plot(&cfg.id, curves).as_bytes())?;
    }

    if let Some(path) = &cfg.json {
        let comparison = match (&ehp, &reference) {
            (Some(t), Some(r)) => Some(experiments::compare_trajectory(&cfg.id, t, r)?),
            _ => None,
        };
        let summary = SimulationSummary {
            id: &cfg.id,
            method: match cfg.method {
                Method::Ehp => "ehp",
                Method::Rkf45 => "rkf45",
                Method::Both => "both",
            },
            dt: cfg.dt,
            horizon: cfg.t_total,
            system: cfg.system,
            forcing: cfg.forcing,
            u0: cfg.u0,
            v0: cfg.v0,
            steps: ehp.as_ref().map_or_else(
                || reference.as_ref().map_or(0, |r| r.len() - 1),
                |t| t.steps(),
            ),
            ambiguous_root_steps: ehp.as_ref().map(Trajectory::ambiguous_steps),
            uniqueness_violations: ehp.as_ref().map(|t| {
                t.diagnostics
                    .iter()
                    .filter(|d| !d.uniqueness_satisfied)
                    .count()
            }),
            max_residual: ehp.as_ref().map(max_residuals),
            max_abs_diff_u: comparison.as_ref().map(|c| c.max_abs_diff_u),
            rms_diff_u: comparison.as_ref().map(|c| c.rms_diff_u),
            rel_rms_u: comparison.as_ref().map(|c| c.rel_rms_u),
        };
        emit_json(&summary, Some(path), &mut std::io::sink())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CompareOutput<'a> {
    id: &'a str,
    dt: f64,
    horizon: f64,
    grid_points: usize,
    max_abs_diff_u: f64,
    rms_diff_u: f64,
    rel_rms_u: f64,
    abserr: f64,
    relerr: f64,
}

fn cmd_compare(args: &CompareArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = lookup(&args.example)?;
    let dt = args.dt.unwrap_or(spec.dt_default);
    let horizon = args.horizon.unwrap_or(spec.t_total_default);
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(CliError::Usage(format!(
            "zero-length comparison grid: --horizon must be positive, got {horizon}"
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(CliError::Usage(format!("--dt must be positive, got {dt}")));
    }
    let rkf = RkfConfig::with_tolerances(args.tolerances.abserr, args.tolerances.relerr);
    let report = run_comparison(&spec, dt, horizon, &rkf)?;
    let output = CompareOutput {
        id: spec.id,
        dt,
        horizon: report.horizon,
        grid_points: report.grid.len(),
        max_abs_diff_u: report.max_abs_diff_u,
        rms_diff_u: report.rms_diff_u,
        rel_rms_u: report.rel_rms_u,
        abserr: rkf.abserr,
        relerr: rkf.relerr,
    };
    emit_json(&output, args.json.as_deref(), out)
}

#[derive(Serialize)]
struct ConvergenceOutput {
    #[serde(flatten)]
    report: ConvergenceReport,
    strictly_decreasing: bool,
}

fn cmd_convergence(args: &ConvergenceArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = lookup(&args.example)?;
    if !(args.t_end > 0.0 && args.t_end.is_finite()) {
        return Err(CliError::Usage(format!(
            "--t-end must be positive, got {}",
            args.t_end
        )));
    }
    comparison_stride(&args.dts, args.reference_dt)?;
    let threads = thread_limit()?;
    let mut steps = vec![args.reference_dt];
    steps.extend(&args.dts);
    let runs = map_ordered(&steps, threads, |&dt| {
        integrate(
            &spec.system,
            spec.initial_state(),
            dt,
            args.t_end,
            &spec.forcing,
        )
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let (reference, coarse) = runs.split_first().expect("reference run present");
    let report = ConvergenceReport::from_trajectories(
        spec.id,
        &args.dts,
        args.reference_dt,
        reference,
        coarse,
    )?;

    if let Some(path) = &args.svg {
        let curves = runs
            .iter()
            .zip(&steps)
            .map(|(t, dt)| {
                let label = if std::ptr::eq(t, reference) {
                    format!("dt = {dt} (reference)")
                } else {
                    format!("dt = {dt}")
                };
                phase_series(
                    &label,
                    t.states
                        .iter()
                        .map(|s| (s.t, s.u, s.velocity(&spec.system))),
                )
            })
            .collect();
        write_file(path, two_panel_plot(spec.id, curves).as_bytes())?;
    }

    let strictly_decreasing = report.rms_vs_reference.windows(2).all(|w| w[1] < w[0]);
    emit_json(
        &ConvergenceOutput {
            report,
            strictly_decreasing,
        },
        args.json.as_deref(),
        out,
    )
}
