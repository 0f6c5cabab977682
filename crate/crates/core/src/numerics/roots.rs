//! Bracketing root finding (Brent's method).

use crate::error::{Error, Result};

/// Root of `f` in `[lo, hi]`, which must bracket a sign change.
///
/// Stops once `|f(x)| <= tol` or the bracket has shrunk to a few ulps.
pub fn brent_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    brent_root_xtol(f, lo, hi, tol, 0.0)
}

/// Brent's method with both a residual tolerance `ftol` and a bracket-width
/// tolerance `xtol`.
pub fn brent_root_xtol<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, ftol: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Evaluation(format!(
            "root function is NaN at bracket end ({a}, {b})"
        )));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi, f_lo: fa, f_hi: fb });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..500 {
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
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb.abs() <= ftol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::Evaluation(format!("root function is NaN at {b}")));
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_of_two() {
        let r = brent_root(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn root_at_end_and_log() {
        assert_eq!(brent_root(|x| x, 0.0, 1.0, 1e-14).unwrap(), 0.0);
        let r = brent_root(|x: f64| x.exp() - 2.0, 0.0, 1.0, 1e-15).unwrap();
        assert!((r - std::f64::consts::LN_2).abs() < 1e-13);
    }

    #[test]
    fn no_bracket() {
        let err = brent_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
    }

    #[test]
    fn width_tolerance() {
        let r = brent_root_xtol(|x: f64| x.powi(3) - 0.001, 0.0, 1.0, 0.0, 1e-6).unwrap();
        assert!((r - 0.1).abs() < 1e-6);
    }
}
