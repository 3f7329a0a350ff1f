//! Bessel functions of the first kind for real non-negative order.
//!
//! Small arguments use the ascending series. Everywhere else the whole ladder
//! `J_{mu+k}(x)`, `mu = frac(nu)`, is generated by Miller's backward
//! recurrence and normalized with a closed identity: `J_0 + 2 sum J_{2k} = 1`
//! for integer orders, the trigonometric closed forms of `J_{1/2}` and
//! `J_{-1/2}` for half-integer orders, and Neumann's generalization
//! `(x/2)^mu = sum (mu+2k) Gamma(mu+k)/k! J_{mu+2k}(x)` otherwise.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};

/// Largest order accepted by [`bessel_j`].
pub const MAX_ORDER: f64 = 200.0;

const RESCALE_LIMIT: f64 = 1e200;
const RESCALE_FACTOR: f64 = 1e-200;

/// Order `nu` of a Bessel function, validated to be finite and in `[0, MAX_ORDER]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(Error::Domain(format!("Bessel order must be finite and non-negative, got {nu}")));
        }
        if nu > MAX_ORDER {
            return Err(Error::Domain(format!("Bessel order {nu} exceeds the supported maximum {MAX_ORDER}")));
        }
        Ok(Self(nu))
    }

    /// Integer order shortcut; panics only if `n > MAX_ORDER`.
    pub fn integer(n: u32) -> Self {
        Self::new(n as f64).expect("integer Bessel order out of range")
    }

    pub fn half_integer(twice: u32) -> Self {
        Self::new(twice as f64 / 2.0).expect("half-integer Bessel order out of range")
    }

    pub fn value(self) -> f64 {
        self.0
    }

    fn class(self) -> OrderClass {
        let frac = self.0 - self.0.floor();
        if frac == 0.0 {
            OrderClass::Integer
        } else if frac == 0.5 {
            OrderClass::HalfInteger
        } else {
            OrderClass::General(frac)
        }
    }
}

impl TryFrom<f64> for BesselOrder {
    type Error = Error;

    fn try_from(nu: f64) -> Result<Self> {
        Self::new(nu)
    }
}

impl From<BesselOrder> for f64 {
    fn from(order: BesselOrder) -> f64 {
        order.0
    }
}

#[derive(Debug, Clone, Copy)]
enum OrderClass {
    Integer,
    HalfInteger,
    General(f64),
}

/// `J_nu(x)` for `x >= 0`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("Bessel argument must be finite and non-negative, got {x}")));
    }
    let nu = order.value();
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if x <= 12.0 || x * x <= 4.0 * (nu + 1.0) {
        return Ok(ascending_series(nu, x));
    }
    let base = nu.floor() as usize;
    let ladder = match order.class() {
        OrderClass::Integer => miller_ladder(0.0, x, base, Normalization::Integer),
        OrderClass::HalfInteger => miller_ladder(0.5, x, base, Normalization::HalfInteger),
        OrderClass::General(mu) => miller_ladder(mu, x, base, Normalization::Neumann),
    };
    Ok(ladder[base])
}

/// `J_0(x), ..., J_nmax(x)` in one backward sweep.
///
/// This is the workhorse of the plane-wave sampler, which needs every order
/// up to the truncation index at each grid node.
pub fn bessel_j_integer_orders(x: f64, nmax: usize) -> Vec<f64> {
    assert!(x.is_finite() && x >= 0.0, "Bessel argument must be finite and non-negative");
    if x == 0.0 {
        let mut out = vec![0.0; nmax + 1];
        out[0] = 1.0;
        return out;
    }
    if x < 1e-6 {
        return (0..=nmax).map(|n| ascending_series(n as f64, x)).collect();
    }
    miller_ladder(0.0, x, nmax, Normalization::Integer)
}

/// Ascending power series `sum_k (-1)^k (x/2)^{nu+2k} / (k! Gamma(nu+k+1))`.
fn ascending_series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let lead = if nu == 0.0 { 1.0 } else { (nu * half.ln() - ln_gamma(nu + 1.0)).exp() };
    if lead == 0.0 {
        return 0.0;
    }
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && kf > half {
            break;
        }
    }
    lead * sum
}

#[derive(Debug, Clone, Copy)]
enum Normalization {
    Integer,
    HalfInteger,
    Neumann,
}

/// Backward recurrence for `J_{mu+k}(x)`, `k = 0..=kmax`.
fn miller_ladder(mu: f64, x: f64, kmax: usize, norm: Normalization) -> Vec<f64> {
    let top = (kmax as f64 + mu).max(x);
    let start = (top + 20.0 + 10.0 * top.cbrt()).ceil() as usize;
    let start = start.max(kmax + 20);

    let mut out = vec![0.0; kmax + 1];
    let mut above = 0.0; // f_{k+1}
    let mut current = 1e-30; // f_k
    let mut sum = 0.0;

    // Neumann weights (mu+2j) Gamma(mu+j)/j! are produced top-down from a
    // bottom-up table to keep the sweep single-pass.
    let neumann = matches!(norm, Normalization::Neumann).then(|| neumann_weights(mu, start / 2 + 1));

    let mut k = start;
    loop {
        if k <= kmax {
            out[k] = current;
        }
        if k % 2 == 0 {
            let weight = match norm {
                Normalization::Integer => {
                    if k == 0 {
                        1.0
                    } else {
                        2.0
                    }
                }
                Normalization::HalfInteger => 0.0,
                Normalization::Neumann => neumann.as_ref().map(|w| w[k / 2]).unwrap_or(0.0),
            };
            sum += weight * current;
        }
        if current.abs() > RESCALE_LIMIT {
            current *= RESCALE_FACTOR;
            above *= RESCALE_FACTOR;
            sum *= RESCALE_FACTOR;
            for v in out.iter_mut().skip(k) {
                *v *= RESCALE_FACTOR;
            }
        }
        if k == 0 {
            break;
        }
        let below = 2.0 * (mu + k as f64) / x * current - above;
        above = current;
        current = below;
        k -= 1;
    }

    let scale = match norm {
        Normalization::Integer => 1.0 / sum,
        Normalization::Neumann => (mu * (0.5 * x).ln()).exp() / sum,
        Normalization::HalfInteger => {
            // `current` holds f_0 = f_{1/2}; one more step yields f_{-1/2}.
            let f_half = current;
            let f_minus_half = 2.0 * mu / x * current - above;
            let amplitude = (2.0 / (PI * x)).sqrt();
            let (s, c) = x.sin_cos();
            if s.abs() >= c.abs() {
                amplitude * s / f_half
            } else {
                amplitude * c / f_minus_half
            }
        }
    };
    for v in &mut out {
        *v *= scale;
    }
    out
}

fn neumann_weights(mu: f64, count: usize) -> Vec<f64> {
    let mut weights = Vec::with_capacity(count + 1);
    let gamma_mu1 = gamma(mu + 1.0);
    weights.push(gamma_mu1);
    // g_j = Gamma(mu+j)/j!, g_1 = Gamma(mu+1)
    let mut g = gamma_mu1;
    for j in 1..=count {
        if j > 1 {
            g *= (mu + j as f64 - 1.0) / j as f64;
        }
        weights.push((mu + 2.0 * j as f64) * g);
    }
    weights
}

/// `Gamma(nu+1) (2/z)^nu J_nu(z)`: the entire function equal to 1 at the origin.
pub(crate) fn normalized_bessel(nu: f64, z: f64) -> Result<f64> {
    if z < 2.0 {
        let q = -0.25 * z * z;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..100 {
            let kf = k as f64;
            term *= q / (kf * (nu + kf));
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
        }
        return Ok(sum);
    }
    let j = bessel_j(BesselOrder::new(nu)?, z)?;
    Ok((ln_gamma(nu + 1.0) + nu * (2.0 / z).ln()).exp() * j)
}
