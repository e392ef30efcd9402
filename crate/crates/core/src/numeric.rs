//! Internal numerical helpers: adaptive Simpson quadrature and
//! golden-section maximization.

use num_complex::Complex64;

use crate::error::{Error, Result};

type C64 = Complex64;

const MAX_DEPTH: u32 = 50;

fn simpson(fa: C64, fm: C64, fb: C64, h: f64) -> C64 {
    (fa + fm * 4.0 + fb) * (h / 6.0)
}

fn refine(
    eval: &mut dyn FnMut(f64) -> C64,
    a: f64,
    b: f64,
    fa: C64,
    fm: C64,
    fb: C64,
    whole: C64,
    tol: f64,
    depth: u32,
) -> Result<C64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = eval(lm);
    let frm = eval(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.norm() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Numerical(format!(
            "quadrature refinement disagreement {:.3e} above tolerance at depth {depth} on [{a:.6e}, {b:.6e}]",
            delta.norm() / 15.0
        )));
    }
    let l = refine(eval, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
    let r = refine(eval, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
    Ok(l + r)
}

/// Adaptive Simpson integral of a complex-valued integrand over [a, b].
///
/// The refinement stops once the local Richardson disagreement is below the
/// tolerance share of each subinterval; exceeding the depth limit reports a
/// numerical error instead of returning an unconverged value.
pub(crate) fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<C64>
where
    F: FnMut(f64) -> C64,
{
    if !(a.is_finite() && b.is_finite()) || b <= a {
        return Err(Error::Invalid(format!(
            "quadrature interval [{a}, {b}] must be finite and increasing"
        )));
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    refine(&mut f, a, b, fa, fm, fb, whole, tol, 0)
}

/// Real-valued adaptive Simpson integral. Production paths integrate
/// complex integrands; this wrapper only backs test oracles.
#[cfg(test)]
pub(crate) fn adaptive_simpson_real<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    adaptive_simpson(|t| C64::new(f(t), 0.0), a, b, tol).map(|v| v.re)
}

/// Golden-section search for the maximum of f on [lo, hi]; returns the
/// abscissa (within tol_x) and the value there.
pub(crate) fn golden_section_max<F>(f: F, lo: f64, hi: f64, tol_x: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > tol_x {
        if fc >= fd {
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
    (x, f(x))
}
