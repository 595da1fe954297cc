//! Scalar root finding: bracketed bisection with secant acceleration, and
//! log-spaced sign-change scans.

use crate::error::{Error, Result};

/// Root of `f` in `[a, b]`; requires `f(a)` and `f(b)` of opposite sign (or one zero).
///
/// Terminates when the bracket is below `rtol` relative to its midpoint.
pub fn bracketed<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rtol: f64) -> Result<f64> {
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::RootNotBracketed(format!(
            "f({a:e})={fa:e}, f({b:e})={fb:e}"
        )));
    }
    for _ in 0..400 {
        let width = b - a;
        if width <= rtol * 0.5 * (a.abs() + b.abs()) || width <= f64::MIN_POSITIVE {
            break;
        }
        let secant = b - fb * (b - a) / (fb - fa);
        let bisect = 0.5 * (a + b);
        // accept the secant point only if it lies well inside the bracket
        let x = if secant.is_finite() && secant > a + 0.05 * width && secant < b - 0.05 * width {
            secant
        } else {
            bisect
        };
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // a secant step that barely moved an endpoint is followed by a bisection
        if x == secant && (b - a) > 0.5 * width {
            let m = 0.5 * (a + b);
            let fm = f(m);
            if fm == 0.0 {
                return Ok(m);
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// `n` log-uniform points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Consecutive grid intervals over which `f` changes sign.
pub fn sign_changes<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64]) -> Vec<(f64, f64)> {
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 0..grid.len().saturating_sub(1) {
        let (y0, y1) = (vals[i], vals[i + 1]);
        if y0 == 0.0 {
            out.push((grid[i], grid[i]));
        } else if y0.signum() != y1.signum() && y1 != 0.0 {
            out.push((grid[i], grid[i + 1]));
        }
    }
    if let Some(&last) = vals.last() {
        if last == 0.0 {
            let x = grid[grid.len() - 1];
            out.push((x, x));
        }
    }
    out
}

/// All roots found by a log-spaced scan of `[lo, hi]` with `n` samples, each refined.
pub fn roots_in<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, n: usize, rtol: f64) -> Vec<f64> {
    let grid = log_grid(lo, hi, n);
    let brackets = sign_changes(&mut f, &grid);
    brackets
        .into_iter()
        .filter_map(|(a, b)| if a == b { Some(a) } else { bracketed(&mut f, a, b, rtol).ok() })
        .collect()
}

/// Grows `hi` geometrically from `start` until `f(hi)` has sign `want` (±1).
pub fn expand_up<F: FnMut(f64) -> f64>(mut f: F, start: f64, want: f64, max_doublings: u32) -> Option<f64> {
    let mut x = start;
    for _ in 0..max_doublings {
        let y = f(x);
        if y != 0.0 && y.signum() == want.signum() {
            return Some(x);
        }
        x *= 2.0;
    }
    None
}

/// Shrinks `lo` geometrically from `start` until `f(lo)` has sign `want`.
pub fn expand_down<F: FnMut(f64) -> f64>(mut f: F, start: f64, want: f64, max_halvings: u32) -> Option<f64> {
    let mut x = start;
    for _ in 0..max_halvings {
        let y = f(x);
        if y != 0.0 && y.signum() == want.signum() {
            return Some(x);
        }
        x *= 0.5;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn finds_simple_roots() {
        let r = bracketed(|x| x * x - 2.0, 0.0, 3.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        let r = bracketed(|x: f64| x.ln() + 5.0, 1e-6, 1.0, 1e-14).unwrap();
        assert!((r - (-5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn unbracketed_is_error() {
        assert!(matches!(bracketed(|x| x * x + 1.0, -1.0, 2.0, 1e-12), Err(Error::RootNotBracketed(_))));
    }

    #[test]
    fn scan_finds_all_roots() {
        let roots = roots_in(|x| (x - 0.01) * (x - 1.0) * (x - 50.0), 1e-3, 1e3, 512, 1e-13);
        assert_eq!(roots.len(), 3);
        for (r, e) in roots.iter().zip([0.01, 1.0, 50.0]) {
            assert!((r - e).abs() < 1e-11 * e);
        }
    }

    proptest! {
        #[test]
        fn power_roots(c in 0.01f64..100.0, k in 0.3f64..4.0) {
            let r = bracketed(|x: f64| x.powf(k) - c, 1e-9, 1e12, 1e-13).unwrap();
            prop_assert!((r - c.powf(1.0 / k)).abs() <= 1e-11 * r);
        }
    }
}
