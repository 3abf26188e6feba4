//! Real roots of `A x^3 + B x^2 + C x + D`.
//!
//! [`analyze`] reduces a proper cubic to monic form `x^3 + A1 x^2 + B1 x + C1`,
//! then to the depressed cubic `y^3 + s y + r = 0` with `x = y - A1/3`:
//!
//! ```text
//! r = 2 A1^3 / 27 - A1 B1 / 3 + C1
//! s = B1 - A1^2 / 3
//! disc = r^2 / 4 + s^3 / 27
//! ```
//!
//! `disc > 0` gives one real root (Cardano), `disc < 0` three distinct real
//! roots (trigonometric form), and a narrow band around zero is treated as
//! the repeated-root case. Every closed-form estimate is polished with a
//! few Newton steps on the original coefficients.
//!
//! When the leading coefficient is negligible the equation is really a
//! quadratic or linear one; [`analyze`] refuses it and [`solve_degenerate`]
//! handles it with the cancellation-free quadratic formula.

use core::fmt;
use core::ops::Deref;

use crate::math;

pub use crate::integrator::uniqueness_condition;

/// Relative size below which the leading coefficient is treated as zero.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;
/// Multiple of the discriminant's rounding-error bound treated as zero.
pub const DISCRIMINANT_BAND_SAFETY: f64 = 8.0;
/// Roots closer than `ROOT_MERGE_TOL * (1 + |x|)` are reported once.
pub const ROOT_MERGE_TOL: f64 = 1e-9;
/// Guaranteed bound on reported roots: `|Q(x)| <= ROOT_RESIDUAL_TOL * term_scale(x)`.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-12;
/// Newton stops once the residual is down to rounding level.
const POLISH_TARGET: f64 = 2.0 * f64::EPSILON;
/// Newton iterations allowed per root.
pub const MAX_POLISH_ITERATIONS: usize = 20;

/// Errors from the cubic solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CubicError {
    /// A coefficient was NaN or infinite.
    NonFiniteInput,
    /// `|A|` is negligible; use [`solve_degenerate`].
    DegenerateCubic,
    /// The reduced equation is `D = 0` with `D != 0`.
    NoSolution,
    /// Every coefficient vanishes; any `x` is a root.
    IndeterminateSolution,
    /// [`select_root`] was given no roots.
    EmptyRootSet,
}

impl fmt::Display for CubicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            CubicError::NonFiniteInput => "cubic coefficients must be finite",
            CubicError::DegenerateCubic => "leading coefficient is negligible",
            CubicError::NoSolution => "degenerate equation has no solution",
            CubicError::IndeterminateSolution => "all coefficients vanish",
            CubicError::EmptyRootSet => "no roots to select from",
        };
        f.write_str(msg)
    }
}

impl core::error::Error for CubicError {}

/// Coefficients of `A x^3 + B x^2 + C x + D`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CubicCoefficients {
    /// Cubic coefficient.
    pub a: f64,
    /// Quadratic coefficient.
    pub b: f64,
    /// Linear coefficient.
    pub c: f64,
    /// Constant term.
    pub d: f64,
}

impl CubicCoefficients {
    /// Builds `a x^3 + b x^2 + c x + d`.
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        ((self.a * x + self.b) * x + self.c) * x + self.d
    }

    /// First derivative.
    pub fn derivative(&self, x: f64) -> f64 {
        (3.0 * self.a * x + 2.0 * self.b) * x + self.c
    }

    /// Size of the largest monomial at `x` (floored at 1); the yardstick for
    /// root residuals.
    pub fn term_scale(&self, x: f64) -> f64 {
        let ax = math::abs(x);
        max4(
            math::abs(self.a) * ax * ax * ax,
            math::abs(self.b) * ax * ax,
            math::abs(self.c) * ax,
            math::abs(self.d),
        )
        .max(1.0)
    }

    /// True when every coefficient is finite.
    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    /// True when `|A|` is too small for the cubic formulas.
    pub fn is_degenerate(&self) -> bool {
        let scale = max4(math::abs(self.b), math::abs(self.c), math::abs(self.d), 1.0);
        math::abs(self.a) <= DEGENERACY_THRESHOLD * scale
    }
}

/// Up to three real roots in ascending order, stored inline.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Roots {
    values: [f64; 3],
    len: usize,
}

impl Roots {
    /// No roots.
    pub const fn empty() -> Self {
        Self {
            values: [0.0; 3],
            len: 0,
        }
    }

    /// Builds a sorted, merged root set from up to three values.
    pub fn from_slice(xs: &[f64]) -> Self {
        let mut out = Self::empty();
        for &x in xs.iter().take(3) {
            // adding +0 turns a negative zero into a positive one
            out.values[out.len] = x + 0.0;
            out.len += 1;
        }
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        let v = &mut self.values[..self.len];
        v.sort_unstable_by(|a, b| a.total_cmp(b));
        let mut kept = 0;
        for i in 0..self.len {
            let x = self.values[i];
            if kept > 0 {
                let prev = self.values[kept - 1];
                if math::abs(x - prev) <= ROOT_MERGE_TOL * (1.0 + math::abs(x).max(math::abs(prev)))
                {
                    continue;
                }
            }
            self.values[kept] = x;
            kept += 1;
        }
        self.len = kept;
    }
}

impl Deref for Roots {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values[..self.len]
    }
}

/// Monic reduction, discriminant, and real roots of a proper cubic.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CubicAnalysis {
    /// `B / A`.
    pub a1: f64,
    /// `C / A`.
    pub b1: f64,
    /// `D / A`.
    pub c1: f64,
    /// Constant term of the depressed cubic.
    pub r: f64,
    /// Linear coefficient of the depressed cubic.
    pub s: f64,
    /// `r^2/4 + s^3/27`; positive means a single real root.
    pub disc: f64,
    /// Half-width of the band around zero in which the sign of `disc` is
    /// not trusted (repeated-root regime).
    pub disc_band: f64,
    /// Real roots, ascending.
    pub roots: Roots,
}

impl CubicAnalysis {
    /// Number of distinct real roots reported.
    pub fn n_real_roots(&self) -> usize {
        self.roots.len()
    }

    /// True when `disc` falls inside the repeated-root band.
    pub fn is_repeated_root_regime(&self) -> bool {
        math::abs(self.disc) <= self.disc_band
    }
}

fn max4(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a.max(b).max(c.max(d))
}

/// Discriminant `r^2/4 + s^3/27` and a bound on its rounding error.
///
/// Two algebraically identical expressions are evaluated: the depressed
/// form, and the expansion in monic coefficients
/// `(4 A1^3 C1 - A1^2 B1^2 + 4 B1^3 + 27 C1^2 - 18 A1 B1 C1) / 108`.
/// The one with the smaller error bound is returned.
fn discriminant(a1: f64, b1: f64, c1: f64, r: f64, s: f64) -> (f64, f64) {
    let eps = f64::EPSILON;
    let r_terms = math::abs(2.0 * a1 * a1 * a1 / 27.0) + math::abs(a1 * b1 / 3.0) + math::abs(c1);
    let s_terms = math::abs(b1) + a1 * a1 / 3.0;
    let depressed = r * r / 4.0 + s * s * s / 27.0;
    let depressed_err = eps
        * (math::abs(r) * r_terms
            + 2.0 * s * s * s_terms / 9.0
            + r * r / 4.0
            + math::abs(s * s * s) / 27.0);

    let terms = [
        4.0 * a1 * a1 * a1 * c1,
        -a1 * a1 * b1 * b1,
        4.0 * b1 * b1 * b1,
        27.0 * c1 * c1,
        -18.0 * a1 * b1 * c1,
    ];
    let expanded = terms.iter().sum::<f64>() / 108.0;
    let expanded_err = 4.0 * eps * terms.iter().map(|t| math::abs(*t)).sum::<f64>() / 108.0;

    if expanded_err < depressed_err {
        (expanded, expanded_err)
    } else {
        (depressed, depressed_err)
    }
}

/// Full analysis of a proper cubic.
///
/// With three real roots only the one of largest magnitude is taken from the
/// trigonometric form; the other two come from the deflated quadratic. In
/// the repeated-root band the closed-form simple and double roots are used
/// and kept only if they polish onto a genuine real root.
pub fn analyze(coeffs: &CubicCoefficients) -> Result<CubicAnalysis, CubicError> {
    if !coeffs.is_finite() {
        return Err(CubicError::NonFiniteInput);
    }
    if coeffs.is_degenerate() {
        return Err(CubicError::DegenerateCubic);
    }

    let a1 = coeffs.b / coeffs.a;
    let b1 = coeffs.c / coeffs.a;
    let c1 = coeffs.d / coeffs.a;
    let r = 2.0 * a1 * a1 * a1 / 27.0 - a1 * b1 / 3.0 + c1;
    let s = b1 - a1 * a1 / 3.0;
    let (disc, disc_err) = discriminant(a1, b1, c1, r, s);
    let band = DISCRIMINANT_BAND_SAFETY * disc_err;
    let shift = a1 / 3.0;

    let regime = if disc > band {
        Regime::OneReal
    } else if disc < -band {
        Regime::ThreeReal
    } else {
        Regime::Repeated
    };

    let roots = match regime {
        Regime::OneReal => {
            // Cardano with the cancellation-free sign choice
            let q = -0.5 * r;
            let w = math::cbrt(q + math::copysign(math::sqrt(math::abs(disc)), q));
            let y = if w == 0.0 { 0.0 } else { w - s / (3.0 * w) };
            Roots::from_slice(&[polish(coeffs, y - shift)])
        }
        Regime::ThreeReal => {
            let m = 2.0 * math::sqrt(math::abs(s) / 3.0);
            let arg = (1.5 * r / s * math::sqrt(math::abs(3.0 / s))).clamp(-1.0, 1.0);
            let theta = math::acos(arg) / 3.0;
            let third = 2.0 * core::f64::consts::PI / 3.0;
            let largest = (0..3)
                .map(|i| m * math::cos(theta - third * i as f64) - shift)
                .fold(0.0, |best: f64, x| {
                    if math::abs(x) > math::abs(best) {
                        x
                    } else {
                        best
                    }
                });
            let x1 = polish(coeffs, largest);
            // deflate to A x^2 + q1 x + q0, working from the constant term,
            // which is the stable direction for the root of largest magnitude
            let (q1, q0) = if x1 == 0.0 {
                (coeffs.b, coeffs.c)
            } else {
                let q0 = -coeffs.d / x1;
                ((q0 - coeffs.c) / x1, q0)
            };
            let q = -0.5
                * (q1 + math::copysign(math::sqrt((q1 * q1 - 4.0 * coeffs.a * q0).max(0.0)), q1));
            let pair = if q == 0.0 {
                [0.0, 0.0]
            } else {
                [q / coeffs.a, q0 / q]
            };
            Roots::from_slice(&[x1, polish(coeffs, pair[0]), polish(coeffs, pair[1])])
        }
        Regime::Repeated => {
            // exact for disc = 0: simple root 3r/s and double root -3r/(2s)
            let estimates: &[f64] = if s == 0.0 {
                &[-shift]
            } else {
                &[3.0 * r / s - shift, -1.5 * r / s - shift]
            };
            let mut kept = [0.0; 2];
            let mut n = 0;
            let mut best = (f64::INFINITY, 0.0);
            for &e in estimates {
                let x = polish(coeffs, e);
                let rel = math::abs(coeffs.eval(x)) / coeffs.term_scale(x);
                if rel < best.0 {
                    best = (rel, x);
                }
                // a near-coincident complex pair masquerades as a double root
                // but does not polish onto a real root
                if rel <= ROOT_RESIDUAL_TOL {
                    kept[n] = x;
                    n += 1;
                }
            }
            if n == 0 {
                kept[0] = best.1;
                n = 1;
            }
            Roots::from_slice(&kept[..n])
        }
    };
    Ok(CubicAnalysis {
        a1,
        b1,
        c1,
        r,
        s,
        disc,
        disc_band: band,
        roots,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    OneReal,
    ThreeReal,
    Repeated,
}

/// Newton refinement from a closed-form estimate; only improving iterates
/// are accepted.
fn polish(coeffs: &CubicCoefficients, mut x: f64) -> f64 {
    let mut fx = coeffs.eval(x);
    for _ in 0..MAX_POLISH_ITERATIONS {
        if math::abs(fx) <= POLISH_TARGET * coeffs.term_scale(x) {
            break;
        }
        let dfx = coeffs.derivative(x);
        if dfx == 0.0 || !dfx.is_finite() {
            break;
        }
        let next = x - fx / dfx;
        let f_next = coeffs.eval(next);
        if !(math::abs(f_next) < math::abs(fx)) {
            break;
        }
        x = next;
        fx = f_next;
    }
    x
}

/// Real roots of `B x^2 + C x + D` (or `C x + D`) for a cubic whose leading
/// coefficient is negligible.
pub fn solve_degenerate(coeffs: &CubicCoefficients) -> Result<Roots, CubicError> {
    if !coeffs.is_finite() {
        return Err(CubicError::NonFiniteInput);
    }
    let (b, c, d) = (coeffs.b, coeffs.c, coeffs.d);
    let negligible = |x: f64, scale: f64| math::abs(x) <= DEGENERACY_THRESHOLD * scale.max(1.0);

    if !negligible(b, math::abs(c).max(math::abs(d))) {
        let disc = c * c - 4.0 * b * d;
        if disc < 0.0 {
            return Ok(Roots::empty());
        }
        let q = -0.5 * (c + math::copysign(math::sqrt(disc), c));
        if q == 0.0 {
            // c == 0 and d == 0
            return Ok(Roots::from_slice(&[0.0]));
        }
        return Ok(Roots::from_slice(&[q / b, d / q]));
    }
    if !negligible(c, math::abs(d)) {
        return Ok(Roots::from_slice(&[-d / c]));
    }
    if negligible(d, 1.0) {
        Err(CubicError::IndeterminateSolution)
    } else {
        Err(CubicError::NoSolution)
    }
}

/// Picks the root closest to `u0`; exact ties go to the smaller root.
///
/// Returns the chosen root and whether more than one candidate existed.
pub fn select_root(roots: &[f64], u0: f64) -> Result<(f64, bool), CubicError> {
    let (&first, rest) = roots.split_first().ok_or(CubicError::EmptyRootSet)?;
    let mut best = first;
    let mut best_dist = math::abs(first - u0);
    for &x in rest {
        let dist = math::abs(x - u0);
        if dist < best_dist || (dist == best_dist && x < best) {
            best = x;
            best_dist = dist;
        }
    }
    Ok((best, roots.len() > 1))
}
