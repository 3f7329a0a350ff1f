use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use super::bessel::{bessel_j, BesselOrder};
use crate::error::{Error, Result};

// Consecutive positive zeros of J_nu are more than 2.4 apart for every nu >= 0,
// so a half-unit scan sees at most one sign change per step.
const SCAN_STEP: f64 = 0.5;

/// The `index`-th positive zero `j_{nu,index}` of `J_nu`.
pub fn bessel_zero(order: BesselOrder, index: usize) -> Result<f64> {
    if index == 0 {
        return Err(Error::Domain("Bessel zero index starts at 1".into()));
    }
    let nu = order.value();
    let f = |x: f64| bessel_j(order, x);

    // J_nu has no zeros in (0, nu].
    let mut lo = nu.max(0.0);
    let mut f_lo = if lo == 0.0 { 1.0 } else { f(lo)? };
    let limit = mcmahon(nu, index) + 4.0 * PI + 10.0;
    let mut found = 0;
    while lo < limit {
        let hi = lo + SCAN_STEP;
        let f_hi = f(hi)?;
        if f_hi == 0.0 {
            found += 1;
            if found == index {
                return Ok(hi);
            }
            // Step past the exact zero so the next bracket starts with a sign.
            lo = hi + 1e-9;
            f_lo = f(lo)?;
            continue;
        }
        if f_lo.signum() != f_hi.signum() {
            found += 1;
            if found == index {
                return refine(&f, lo, hi, f_lo, f_hi);
            }
        }
        lo = hi;
        f_lo = f_hi;
    }
    Err(Error::Convergence(format!("could not bracket zero #{index} of J_{nu} below x = {limit:.3}")))
}

/// McMahon's large-zero expansion, used only to bound the scan.
fn mcmahon(nu: f64, k: usize) -> f64 {
    let beta = (k as f64 + 0.5 * nu - 0.25) * PI;
    let mu = 4.0 * nu * nu;
    beta - (mu - 1.0) / (8.0 * beta) - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * beta).powi(3))
}

/// Illinois-modified regula falsi on a sign-changing bracket, with bisection
/// whenever the secant step stalls.
fn refine<F>(f: &F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut side = 0i8;
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 * b.abs().max(1.0) {
            break;
        }
        let secant = (a * fb - b * fa) / (fb - fa);
        let width = b - a;
        let c = if secant.is_finite() && secant > a + 0.01 * width && secant < b - 0.01 * width {
            secant
        } else {
            0.5 * (a + b)
        };
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    let root = 0.5 * (a + b);
    if (b - a).abs() > 1e-10 {
        return Err(Error::Convergence(format!("bracket [{a}, {b}] did not shrink")));
    }
    Ok(root)
}

/// Volume of the ball of radius `j_{n/2-1,1}` in `R^n`: the smallest possible
/// nodal-domain volume of the unit-wavenumber plane wave.
pub fn faber_krahn_floor(dim: usize) -> Result<f64> {
    if dim < 2 {
        return Err(Error::Domain(format!("dimension must be at least 2, got {dim}")));
    }
    let n = dim as f64;
    let radius = bessel_zero(BesselOrder::new(0.5 * n - 1.0)?, 1)?;
    Ok(PI.powf(0.5 * n) / gamma(0.5 * n + 1.0) * radius.powf(n))
}
