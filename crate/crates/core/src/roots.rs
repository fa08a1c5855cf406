//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Bisection on a sign-changing bracket, stopped when the interval is below `tol`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::NoBracket(format!("f({lo}) = {flo}, f({hi}) = {fhi}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= tol || mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisection followed by a few secant-Newton steps kept inside the bracket.
pub fn bisect_polish<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut x = bisect(&mut f, lo, hi, tol)?;
    let mut fx = f(x);
    let h = (tol * 1e-2).max(f64::EPSILON * x.abs().max(1.0) * 16.0);
    for _ in 0..3 {
        if fx == 0.0 {
            break;
        }
        let d = (f(x + h) - f(x - h)) / (2.0 * h);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let nx = x - fx / d;
        if !(nx >= lo && nx <= hi) || (nx - x).abs() > 10.0 * tol {
            break;
        }
        let nf = f(nx);
        if nf.abs() >= fx.abs() {
            break;
        }
        x = nx;
        fx = nf;
    }
    Ok(x)
}

/// Roots of `f` on `[lo, hi]`, found by scanning `n` equal cells for sign changes.
pub fn scan_roots<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, n: usize, tol: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    for i in 0..n {
        if fs[i] == 0.0 {
            roots.push(xs[i]);
        } else if fs[i].signum() != fs[i + 1].signum() && fs[i + 1] != 0.0 {
            if let Ok(r) = bisect(&mut f, xs[i], xs[i + 1], tol) {
                roots.push(r);
            }
        }
    }
    if fs[n] == 0.0 {
        roots.push(xs[n]);
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn finds_cos_root() {
        let r = bisect_polish(f64::cos, 1.0, 2.0, 1e-12).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn rejects_unbracketed() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn scan_finds_all_sine_roots() {
        let r = scan_roots(f64::sin, 0.5, 10.0, 200, 1e-13);
        assert_eq!(r.len(), 3);
        for (i, x) in r.iter().enumerate() {
            assert!((x - (i + 1) as f64 * std::f64::consts::PI).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn cubic_root_recovered(c in -5.0f64..5.0) {
            let r = bisect_polish(|x| x * x * x - c, -3.0, 3.0, 1e-13).unwrap();
            prop_assert!((r - c.cbrt()).abs() < 1e-11);
        }
    }
}
