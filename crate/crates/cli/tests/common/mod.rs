//! Oracles written from the governing equations, independent of the
//! library's solver code.

#![allow(dead_code)]

pub fn eval(c: [f64; 4], x: f64) -> f64 {
    ((c[0] * x + c[1]) * x + c[2]) * x + c[3]
}

/// `1 + (1 + max |coeff / leading|)`: every real root lies inside.
pub fn search_radius(c: [f64; 4]) -> f64 {
    let lead = c[0].abs();
    1.0 + 1.0
        + (c[1].abs() / lead)
            .max(c[2].abs() / lead)
            .max(c[3].abs() / lead)
}

pub fn bisect(c: [f64; 4], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = eval(c, lo);
    if flo == 0.0 {
        return lo;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let fm = eval(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
}

/// Real roots of odd multiplicity, ascending: the line is cut at the
/// critical points into monotone pieces and each sign change is bisected.
pub fn sign_change_roots(c: [f64; 4]) -> Vec<f64> {
    let r = search_radius(c);
    let (qa, qb, qc) = (3.0 * c[0], 2.0 * c[1], c[2]);
    let mut knots = vec![-r];
    let disc = qb * qb - 4.0 * qa * qc;
    if disc > 0.0 {
        let sq = disc.sqrt();
        let mut crit = [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)];
        crit.sort_by(f64::total_cmp);
        knots.extend(crit.iter().copied().filter(|x| x.abs() < r));
    }
    knots.push(r);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (f0, f1) = (eval(c, w[0]), eval(c, w[1]));
        if f0 == 0.0 {
            if roots.last() != Some(&w[0]) {
                roots.push(w[0]);
            }
        } else if f1 == 0.0 {
            roots.push(w[1]);
        } else if (f0 < 0.0) != (f1 < 0.0) {
            roots.push(bisect(c, w[0], w[1]));
        }
    }
    roots
}

/// Oscillator parameters with the flexibility `a = 1/k`.
#[derive(Debug, Clone, Copy)]
pub struct Params {
    pub m: f64,
    pub c: f64,
    pub k: f64,
    pub beta: f64,
}

impl Params {
    pub fn a(&self) -> f64 {
        1.0 / self.k
    }
}

/// Cubic part of the start balance.
pub fn q(beta: f64, h: f64, u0: f64, u1: f64) -> f64 {
    beta * h / 20.0
        * (4.0 * u0.powi(3) + 3.0 * u0.powi(2) * u1 + 2.0 * u0 * u1.powi(2) + u1.powi(3))
}

/// Left-hand sides of the start balance, end balance and impulse equation.
pub fn residuals(
    p: &Params,
    h: f64,
    f: f64,
    (u0, j0, p0): (f64, f64, f64),
    (u1, j1, p1): (f64, f64, f64),
) -> [f64; 3] {
    let qq = q(p.beta, h, u0, u1);
    let du = u1 - u0;
    let dj = j1 - j0;
    [
        p.m / h * du + p.c / 2.0 * du + dj / 2.0 - f * h / 2.0 - p0 + qq,
        -p.m / h * du + p.c / 2.0 * du + dj / 2.0 - f * h / 2.0 + p1 + qq,
        p.a() / h * dj - (u1 + u0) / 2.0,
    ]
}

/// `max(1, |p0|, |p1|, m |u1 - u0| / h, |f| h)`.
pub fn step_scale(p: &Params, h: f64, f: f64, u0: f64, u1: f64, p0: f64, p1: f64) -> f64 {
    1f64.max(p0.abs())
        .max(p1.abs())
        .max(p.m * (u1 - u0).abs() / h)
        .max(f.abs() * h)
}

/// Coefficients of the step cubic in `u1`, from the start balance with the
/// impulse increment eliminated.
pub fn step_cubic(p: &Params, h: f64, f: f64, u0: f64, p0: f64) -> [f64; 4] {
    let (m, c, b, a) = (p.m, p.c, p.beta, p.a());
    [
        b * a * h * h,
        2.0 * b * a * h * h * u0,
        5.0 * h * h + 20.0 * m * a + 10.0 * c * a * h + 3.0 * b * a * u0 * u0 * h * h,
        5.0 * u0 * h * h - 10.0 * c * a * u0 * h - 20.0 * a * h * p0 - 20.0 * m * a * u0
            + 4.0 * b * a * u0.powi(3) * h * h
            - 10.0 * a * h * h * f,
    ]
}

/// With no cubic term: Cramer's rule on the start balance and impulse
/// equation for `(u1, J1 - J0)`, then the end balance for `p1`.
pub fn linear_step(p: &Params, h: f64, f: f64, u0: f64, p0: f64) -> (f64, f64, f64) {
    let a11 = p.m / h + p.c / 2.0;
    let (a12, a21, a22) = (0.5, -0.5, p.a() / h);
    let b1 = f * h / 2.0 + p0 + a11 * u0;
    let b2 = 0.5 * u0;
    let det = a11 * a22 - a12 * a21;
    let u1 = (b1 * a22 - a12 * b2) / det;
    let dj = (a11 * b2 - a21 * b1) / det;
    let p1 = p.m / h * (u1 - u0) - p.c / 2.0 * (u1 - u0) - dj / 2.0 + f * h / 2.0;
    (u1, dj, p1)
}

/// Exact solution of `m u'' + c u' + k u = F cos(w t)` for an underdamped
/// oscillator.
pub fn damped_driven(p: &Params, force: f64, w: f64, u0: f64, v0: f64, t: f64) -> f64 {
    let (m, c, k) = (p.m, p.c, p.k);
    let d = (k - m * w * w).powi(2) + (c * w).powi(2);
    let ca = force * (k - m * w * w) / d;
    let cb = force * c * w / d;
    let w0 = (k / m).sqrt();
    let zeta = c / (2.0 * (k * m).sqrt());
    let wd = w0 * (1.0 - zeta * zeta).sqrt();
    let h0 = u0 - ca;
    let hv = v0 - cb * w;
    let homogeneous = (-zeta * w0 * t).exp()
        * (h0 * (wd * t).cos() + (hv + zeta * w0 * h0) / wd * (wd * t).sin());
    homogeneous + ca * (w * t).cos() + cb * (w * t).sin()
}

/// Least-squares slope of `ln e` against `ln h`.
pub fn log_slope(h: &[f64], e: &[f64]) -> f64 {
    let xs: Vec<f64> = h.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|x| x.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
