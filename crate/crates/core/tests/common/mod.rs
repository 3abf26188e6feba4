//! Independent root enumeration for cubics: brackets between critical
//! points, then plain bisection. Shares nothing with the closed-form solver.

#![allow(dead_code)]

pub fn eval(c: [f64; 4], x: f64) -> f64 {
    ((c[0] * x + c[1]) * x + c[2]) * x + c[3]
}

/// `1 + (1 + max |coeff / leading|)`.
pub fn search_radius(c: [f64; 4]) -> f64 {
    let lead = c[0].abs();
    let cauchy = 1.0
        + (c[1].abs() / lead)
            .max(c[2].abs() / lead)
            .max(c[3].abs() / lead);
    1.0 + cauchy
}

pub fn bisect(c: [f64; 4], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = eval(c, lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
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
    0.5 * (lo + hi)
}

/// Roots of odd multiplicity in `[-R, R]`, ascending.
pub fn sign_change_roots(c: [f64; 4]) -> Vec<f64> {
    let r = search_radius(c);
    // critical points split the line into monotone pieces
    let (qa, qb, qc) = (3.0 * c[0], 2.0 * c[1], c[2]);
    let mut knots = vec![-r];
    let disc = qb * qb - 4.0 * qa * qc;
    if disc > 0.0 {
        let sq = disc.sqrt();
        let mut crit = [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)];
        crit.sort_by(|a, b| a.total_cmp(b));
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
