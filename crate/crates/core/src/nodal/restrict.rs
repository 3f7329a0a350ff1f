use serde::{Deserialize, Serialize};

use super::{AreaEstimator, NodalDecomposition};
use crate::error::{Error, Result};
use crate::sampler::GridSpec;

/// Domains of area at most `t` inside an open ball (`inside`) and meeting the
/// closed ball (`meeting`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallCounts {
    pub inside: usize,
    pub meeting: usize,
}

/// Count domains with area `<= t` lying in the open ball `B(center, radius)`
/// and meeting its closure, deciding membership by node positions. On a torus
/// distances are taken to the nearest periodic image.
pub fn restrict_counts(
    dec: &NodalDecomposition,
    center: [f64; 2],
    radius: f64,
    t: f64,
    estimator: AreaEstimator,
) -> Result<BallCounts> {
    if t.is_nan() {
        return Err(Error::Geometry("threshold t is not a number".into()));
    }
    let m = ball_membership(dec, center, radius)?;
    let mut counts = BallCounts { inside: 0, meeting: 0 };
    for (k, d) in dec.domains.iter().enumerate() {
        if d.area_by(estimator) > t {
            continue;
        }
        if m.inside[k] {
            counts.inside += 1;
        }
        if m.meets[k] {
            counts.meeting += 1;
        }
    }
    Ok(counts)
}

/// Per-domain ball membership by node position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallMembership {
    /// Every node of the domain lies in the open ball.
    pub inside: Vec<bool>,
    /// Some node lies in the closed ball.
    pub meets: Vec<bool>,
}

pub fn ball_membership(dec: &NodalDecomposition, center: [f64; 2], radius: f64) -> Result<BallMembership> {
    let grid = dec.grid();
    if !(radius.is_finite() && radius > 0.0) || center.iter().any(|c| !c.is_finite()) {
        return Err(Error::Geometry(format!("invalid ball: center {center:?}, radius {radius}")));
    }
    let side = match *grid {
        GridSpec::PlanarWindow { side, .. } => {
            let half = 0.5 * side;
            if center[0].abs() + radius > half + 1e-9 || center[1].abs() + radius > half + 1e-9 {
                return Err(Error::Geometry(format!(
                    "ball of radius {radius} about {center:?} leaves the window [-{half}, {half}]^2"
                )));
            }
            None
        }
        GridSpec::Torus { side, dim: 2, .. } => Some(side),
        _ => return Err(Error::Geometry("ball counts need a planar or 2-D torus grid".into())),
    };
    let n = grid.shape()[0];
    let mut inside_nodes = vec![0usize; dec.domains.len()];
    let mut meets = vec![false; dec.domains.len()];
    let r2 = radius * radius;
    for (idx, &label) in dec.labels.iter().enumerate() {
        let x = grid.axis_coordinate(idx % n) - center[0];
        let y = grid.axis_coordinate(idx / n) - center[1];
        let (dx, dy) = match side {
            Some(l) => (x - l * (x / l).round(), y - l * (y / l).round()),
            None => (x, y),
        };
        let d2 = dx * dx + dy * dy;
        if d2 < r2 {
            inside_nodes[label as usize] += 1;
        }
        if d2 <= r2 {
            meets[label as usize] = true;
        }
    }
    let inside = dec.domains.iter().zip(&inside_nodes).map(|(d, &k)| k == d.node_count).collect();
    Ok(BallMembership { inside, meets })
}
