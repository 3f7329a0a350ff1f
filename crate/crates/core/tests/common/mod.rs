//! Independent numerical oracles shared by the integration tests. Nothing in
//! here calls into the library's special-function code.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Ascending power series for `J_n`, integer `n`, summed until the terms stop
/// changing the sum. Accurate to ~1e-13 for `x <= 12`.
pub fn bessel_series(n: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut lead = 1.0;
    for k in 1..=n {
        lead *= half / k as f64;
    }
    let mut term = lead;
    let mut sum = lead;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -half * half / (k * (k + n as f64));
        sum += term;
        if term.abs() < 1e-20 && k > half {
            break;
        }
    }
    sum
}

/// Bessel's integral `J_n(x) = (1/2pi) int_0^{2pi} cos(n t - x sin t) dt` by the
/// trapezoid rule, which converges geometrically for this periodic integrand.
pub fn bessel_integral(n: u32, x: f64) -> f64 {
    let points = (2.0 * (x + n as f64) + 64.0) as usize;
    let step = 2.0 * PI / points as f64;
    let sum: f64 = (0..points)
        .map(|i| {
            let t = i as f64 * step;
            (n as f64 * t - x * t.sin()).cos()
        })
        .sum();
    sum / points as f64
}

/// Spherical-Bessel closed form for half-integer orders `J_{m+1/2}`, by
/// upward recurrence from `J_{1/2}` and `J_{-1/2}` (stable for `x > m`).
pub fn bessel_half_integer_upward(m: u32, x: f64) -> f64 {
    let a = (2.0 / (PI * x)).sqrt();
    let mut prev = a * x.cos(); // J_{-1/2}
    let mut cur = a * x.sin(); // J_{1/2}
    for k in 0..m {
        let nu = k as f64 + 0.5;
        let next = 2.0 * nu / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Bisection on a sign-changing bracket.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    assert!(fa * f(b) < 0.0, "bracket does not change sign");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const GK_WEIGHTS_G: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS_K[7] * fc;
    let mut gauss = GK_WEIGHTS_G[3] * fc;
    for i in 0..7 {
        let dx = h * GK_NODES[i];
        let s = f(c - dx) + f(c + dx);
        kronrod += GK_WEIGHTS_K[i] * s;
        if i % 2 == 1 {
            gauss += GK_WEIGHTS_G[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) quadrature to an absolute tolerance.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gk15(f, a, b);
        if err <= tol || depth > 40 {
            return value;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, 0.5 * tol, depth + 1) + recurse(f, m, b, 0.5 * tol, depth + 1)
    }
    recurse(f, a, b, tol, 0)
}

/// The expected nodal length per unit area of a unit-variance isotropic field
/// is `p_F(0) E|grad F|` (Kac-Rice), with `grad F` independent of `F(x)` and
/// each component of variance `-K''(0)`. Both factors are computed here by
/// quadrature, the variance from a finite difference of the series `J_0`.
pub fn kac_rice_length_density() -> f64 {
    let delta = 1e-3;
    let var = -(bessel_series(0, delta) - 2.0 + bessel_series(0, delta)) / (delta * delta);
    let sd = var.sqrt();
    let gauss = |g: f64| (-g * g / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
    let lim = 12.0 * sd;
    let inner = |g1: f64| {
        let f = |g2: f64| g1.hypot(g2) * gauss(g2);
        gauss(g1) * integrate(&f, -lim, lim, 1e-12)
    };
    let mean_norm = integrate(&inner, -lim, lim, 1e-11);
    mean_norm / (2.0 * PI).sqrt()
}

/// The planar annulus kernel from its definition: the average of
/// `cos(r s cos phi)` over the annulus `alpha <= s <= 1` in polar coordinates.
pub fn annulus_kernel_2d(alpha: f64, r: f64) -> f64 {
    if alpha == 1.0 {
        let inner = |phi: f64| (r * phi.cos()).cos();
        return integrate(&inner, 0.0, 2.0 * PI, 1e-13) / (2.0 * PI);
    }
    let radial = |s: f64| {
        let inner = |phi: f64| (r * s * phi.cos()).cos();
        s * integrate(&inner, 0.0, 2.0 * PI, 1e-13)
    };
    integrate(&radial, alpha, 1.0, 1e-12) / (PI * (1.0 - alpha * alpha))
}

/// The 3-D annulus kernel from the radial average of `sin(s r) / (s r)` with
/// weight `s^2`.
pub fn annulus_kernel_3d(alpha: f64, r: f64) -> f64 {
    let sinc = |z: f64| if z == 0.0 { 1.0 } else { z.sin() / z };
    if alpha == 1.0 {
        return sinc(r);
    }
    let radial = |s: f64| s * s * sinc(s * r);
    integrate(&radial, alpha, 1.0, 1e-13) * 3.0 / (1.0 - alpha.powi(3))
}

/// Recursive 4-neighbour flood fill on an `nx x ny` sign grid, optionally
/// wrapping both axes. Labels are numbered in raster order of first visit.
pub fn flood_fill_labels(positive: &[bool], nx: usize, ny: usize, wrap: bool) -> Vec<u32> {
    fn fill(i: usize, j: usize, label: u32, sign: bool, ctx: (&[bool], usize, usize, bool), out: &mut Vec<u32>) {
        let (positive, nx, ny, wrap) = ctx;
        let idx = j * nx + i;
        if out[idx] != u32::MAX || positive[idx] != sign {
            return;
        }
        out[idx] = label;
        let mut next = Vec::with_capacity(4);
        if i + 1 < nx {
            next.push((i + 1, j));
        } else if wrap {
            next.push((0, j));
        }
        if i > 0 {
            next.push((i - 1, j));
        } else if wrap {
            next.push((nx - 1, j));
        }
        if j + 1 < ny {
            next.push((i, j + 1));
        } else if wrap {
            next.push((i, 0));
        }
        if j > 0 {
            next.push((i, j - 1));
        } else if wrap {
            next.push((i, ny - 1));
        }
        for (a, b) in next {
            fill(a, b, label, sign, ctx, out);
        }
    }
    let mut out = vec![u32::MAX; nx * ny];
    let mut next = 0;
    for idx in 0..nx * ny {
        if out[idx] == u32::MAX {
            fill(idx % nx, idx / nx, next, positive[idx], (positive, nx, ny, wrap), &mut out);
            next += 1;
        }
    }
    out
}
