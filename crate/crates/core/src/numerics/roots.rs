//! Bracketed scalar root finding (Brent's method).

use super::Tolerance;
use crate::{Error, Result};

/// Root of `f` on the bracket `[lo, hi]`, requiring `f(lo) * f(hi) <= 0`.
pub fn find_root<F>(mut f: F, (lo, hi): (f64, f64), tol: Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::NoBracket { lo, hi, flo: fa, fhi: fb });
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;
    for _ in 0..tol.max_evals {
        let xtol = f64::max(tol.abs, tol.rel * b.abs()).max(4.0 * f64::EPSILON * b.abs());
        if fb == 0.0 || (b - a).abs() <= xtol {
            return Ok(b);
        }
        let mut s;
        if fa != fc && fb != fc {
            // inverse quadratic interpolation
            s = a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb));
        } else {
            s = b - fb * (b - a) / (fb - fa);
        }
        let between = {
            let m = (3.0 * a + b) / 4.0;
            (s > m.min(b) && s < m.max(b)) || (s < m.min(b) && s > m.max(b))
        };
        let cond = !between
            || (mflag && (s - b).abs() >= (b - c).abs() / 2.0)
            || (!mflag && (s - b).abs() >= (c - d).abs() / 2.0)
            || (mflag && (b - c).abs() < xtol)
            || (!mflag && (c - d).abs() < xtol);
        if cond {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerance = Tolerance {
        abs: 1e-13,
        rel: 1e-13,
        max_evals: 200,
    };

    #[test]
    fn linear() {
        let r = find_root(|x| x - 1.0, (0.0, 2.0), TOL).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sinh_two_x_equals_one() {
        // bisection oracle, frozen: 0.5*asinh(1) = 0.5*ln(1+sqrt(2))
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for _ in 0..60 {
            let m = 0.5 * (lo + hi);
            if (2.0 * m).sinh() < 1.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        let oracle = 0.5 * (lo + hi);
        let r = find_root(|x| (2.0 * x).sinh() - 1.0, (0.0, 1.0), TOL).unwrap();
        assert!((r - oracle).abs() < 1e-12);
        assert!((r - 0.44068679350977147).abs() < 1e-12);
        // commonly quoted as 0.44
        assert!((r - 0.4407).abs() < 1e-4);
    }

    #[test]
    fn trivial_fixed_point() {
        // tanh(m Tc/T)/m = 1 at T = Tc has the trivial solution m = 0;
        // written as g(m) = tanh(m) - m, the bracket endpoint is the root.
        let r = find_root(|m: f64| m.tanh() - m, (0.0, 0.5), TOL).unwrap();
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn no_bracket() {
        assert!(matches!(
            find_root(|x| x * x + 1.0, (-1.0, 1.0), TOL),
            Err(Error::NoBracket { .. })
        ));
    }

    #[test]
    fn residual_small_after_root() {
        let f = |x: f64| (x - 0.3) * (x + 2.0) * (x + 5.0);
        let r = find_root(f, (0.0, 1.0), TOL).unwrap();
        // |f(r)| <= 10 * tol.abs * max|f| on the bracket
        let maxf = f(1.0).abs().max(f(0.0).abs());
        assert!(f(r).abs() <= 10.0 * 1e-13 * maxf + 1e-15);
    }
}
