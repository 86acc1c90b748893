//! One-dimensional solvers used to pin down the oracle multipliers.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarSolution {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Brent's method for a root of `f` on `[a, b]`, given `f(a)` and `f(b)` of
/// opposite sign (or one of them zero).
///
/// Terminates when the bracket is narrower than `rtol * |x| + atol` or `f`
/// vanishes exactly. Returns `None` if the endpoints do not bracket a root.
pub fn brent_root(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    rtol: f64,
    max_iter: usize,
) -> Option<ScalarSolution> {
    if fa == 0.0 {
        return Some(ScalarSolution { x: a, value: 0.0, iterations: 0 });
    }
    if fb == 0.0 {
        return Some(ScalarSolution { x: b, value: 0.0, iterations: 0 });
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return None;
    }

    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    let atol = f64::MIN_POSITIVE;

    for iter in 1..=max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * (rtol * b.abs() + atol);
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Some(ScalarSolution { x: b, value: fb, iterations: iter });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Some(ScalarSolution { x: b, value: fb, iterations: max_iter })
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_section_max(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rtol: f64,
    max_iter: usize,
) -> ScalarSolution {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while iterations < max_iter && (hi - lo) > rtol * (lo.abs() + hi.abs()).max(f64::MIN_POSITIVE) {
        iterations += 1;
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        ScalarSolution { x: x1, value: f1, iterations }
    } else {
        ScalarSolution { x: x2, value: f2, iterations }
    }
}

/// Bisection on the sign of a decreasing function; returns the last point
/// with a nonnegative value.
pub fn bisect_decreasing(
    mut f: impl FnMut(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    rtol: f64,
    max_iter: usize,
) -> ScalarSolution {
    let mut iterations = 0;
    while iterations < max_iter && (hi - lo) > rtol * hi.abs().max(f64::MIN_POSITIVE) {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ScalarSolution { x: lo, value: f(lo), iterations }
}
