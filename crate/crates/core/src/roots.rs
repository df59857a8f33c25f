//! Scalar root finding and 1-D minimization used by the solvers.

use crate::error::{Error, Result};

/// A root located inside a bracket of width `width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub width: f64,
    pub iterations: usize,
}

fn no_sign_change(lo: f64, hi: f64) -> Error {
    Error::Config(format!("no sign change on [{lo}, {hi}]"))
}

/// Plain bisection on a sign change of `f` over `[lo, hi]`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Root> {
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(Root { x: a, width: 0.0, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, width: 0.0, iterations: 0 });
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(no_sign_change(lo, hi));
    }
    let neg_at_a = fa < 0.0;
    let mut iterations = 0;
    while (b - a).abs() > tol && iterations < 2000 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        iterations += 1;
        if fm == 0.0 {
            return Ok(Root { x: m, width: 0.0, iterations });
        }
        if (fm < 0.0) == neg_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Root {
        x: 0.5 * (a + b),
        width: (b - a).abs(),
        iterations,
    })
}

/// Safeguarded Newton iteration: Newton steps that stay inside the current
/// bracket are taken, otherwise the bracket is bisected.
///
/// `f` returns the value and the derivative.
pub fn newton_bisect<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_newton: usize) -> Result<Root>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let (fa, _) = f(a);
    let (fb, _) = f(b);
    if fa == 0.0 {
        return Ok(Root { x: a, width: 0.0, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, width: 0.0, iterations: 0 });
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(no_sign_change(lo, hi));
    }
    let neg_at_a = fa < 0.0;
    let mut x = 0.5 * (a + b);
    let mut newton_steps = 0;
    let mut iterations = 0;
    loop {
        let (fx, dfx) = f(x);
        iterations += 1;
        if fx == 0.0 {
            return Ok(Root { x, width: 0.0, iterations });
        }
        if (fx < 0.0) == neg_at_a {
            a = x;
        } else {
            b = x;
        }
        if b - a <= tol || iterations > 4000 {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let candidate = x - fx / dfx;
        let last = x;
        x = if newton_steps < max_newton && candidate.is_finite() && candidate > a && candidate < b
        {
            newton_steps += 1;
            candidate
        } else {
            mid
        };
        // converged Newton step: tighten the bracket around it and stop
        if (x - last).abs() <= 0.25 * tol {
            let (fl, _) = f(x - tol);
            let (fh, _) = f(x + tol);
            if (fl < 0.0) == neg_at_a && (fh < 0.0) != neg_at_a {
                return Ok(Root { x, width: 2.0 * tol, iterations });
            }
        }
    }
    let x = if a <= x && x <= b { x } else { 0.5 * (a + b) };
    Ok(Root { x, width: b - a, iterations })
}

/// Golden-section search for a minimum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut guard = 0;
    while (b - a).abs() > tol && guard < 500 {
        guard += 1;
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // report the best point seen in the final bracket
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .min_by(|l, r| l.1.total_cmp(&r.1))
        .unwrap()
}
