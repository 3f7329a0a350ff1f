//! Discrete integral-geometric sandwich.
//!
//! With `c` the grid node nearest the window centre, centres `u` running over
//! grid nodes and `D` the number of grid offsets `v` with `|v| < r`:
//!
//! ```text
//! lower  = sum_{|u-c| < R-r} N(t; u, r)  / D
//! middle = N(t; c, R)
//! upper  = sum_{|u-c| < R+r} N*(t; u, r) / D
//! ```
//!
//! `N` counts domains of area `<= t` whose nodes all lie in the open ball,
//! `N*` those with a node in the closed ball. A domain inside `B(u, r)` with
//! `|u - c| < R - r` is inside `B(c, R)`, and is inside `B(u, r)` for at most
//! `D` centres; a domain inside `B(c, R)` meets `B(u, r)` for at least the `D`
//! centres within `r` of any of its nodes. So `lower <= middle <= upper`
//! holds exactly on every grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nodal::{restrict_counts, AreaEstimator, NodalDecomposition};
use crate::sampler::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichVerdict {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    #[serde(with = "super::extended_f64")]
    pub t: f64,
    pub lower: f64,
    pub middle: usize,
    pub upper: f64,
    pub holds: bool,
}

impl SandwichVerdict {
    pub fn spread(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Row half-widths of the lattice disk `|v| < rho` (open) or `<= rho` (closed),
/// in grid steps, for row offsets `-m..=m`.
fn disk_rows(rho: f64, closed: bool) -> Vec<(i64, i64)> {
    let m = rho.floor() as i64;
    let inside = |dx: i64, dy: i64| {
        let d2 = (dx * dx + dy * dy) as f64;
        if closed {
            d2 <= rho * rho
        } else {
            d2 < rho * rho
        }
    };
    (-m..=m)
        .filter_map(|dy| {
            let w = (0..=m).rev().find(|&dx| inside(dx, dy))?;
            Some((dy, w))
        })
        .collect()
}

/// Sliding multiset of labels over a lattice disk.
struct DiskCounter<'a> {
    rows: Vec<(i64, i64)>,
    labels: &'a [u32],
    n: i64,
    counts: Vec<u32>,
    eligible: &'a [bool],
    sizes: &'a [u32],
    full: usize,
    touched: usize,
}

impl<'a> DiskCounter<'a> {
    fn node(&self, i: i64, j: i64) -> Option<u32> {
        (i >= 0 && j >= 0 && i < self.n && j < self.n).then(|| self.labels[(j * self.n + i) as usize])
    }

    fn add(&mut self, i: i64, j: i64) {
        if let Some(l) = self.node(i, j) {
            let l = l as usize;
            if !self.eligible[l] {
                return;
            }
            if self.counts[l] == 0 {
                self.touched += 1;
            }
            self.counts[l] += 1;
            if self.counts[l] == self.sizes[l] {
                self.full += 1;
            }
        }
    }

    fn remove(&mut self, i: i64, j: i64) {
        if let Some(l) = self.node(i, j) {
            let l = l as usize;
            if !self.eligible[l] {
                return;
            }
            if self.counts[l] == self.sizes[l] {
                self.full -= 1;
            }
            self.counts[l] -= 1;
            if self.counts[l] == 0 {
                self.touched -= 1;
            }
        }
    }

    fn fill(&mut self, ci: i64, cj: i64) {
        for k in 0..self.rows.len() {
            let (dy, w) = self.rows[k];
            for dx in -w..=w {
                self.add(ci + dx, cj + dy);
            }
        }
    }

    fn clear(&mut self, ci: i64, cj: i64) {
        for k in 0..self.rows.len() {
            let (dy, w) = self.rows[k];
            for dx in -w..=w {
                self.remove(ci + dx, cj + dy);
            }
        }
    }

    /// Move the centre from `(ci, cj)` to `(ci + 1, cj)`.
    fn step(&mut self, ci: i64, cj: i64) {
        for k in 0..self.rows.len() {
            let (dy, w) = self.rows[k];
            self.remove(ci - w, cj + dy);
            self.add(ci + 1 + w, cj + dy);
        }
    }
}

pub fn sandwich_check(
    dec: &NodalDecomposition,
    r: f64,
    big_r: f64,
    t: f64,
    estimator: AreaEstimator,
) -> Result<SandwichVerdict> {
    let (side, h) = match *dec.grid() {
        GridSpec::PlanarWindow { side, spacing } => (side, spacing),
        _ => return Err(Error::Geometry("sandwich check needs a planar window".into())),
    };
    if !(r > 0.0 && r < big_r && big_r.is_finite()) || t.is_nan() {
        return Err(Error::Geometry(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
    }
    let n = dec.grid().shape()[0] as i64;
    let c = (n - 1) / 2;
    let center = [dec.grid().axis_coordinate(c as usize), dec.grid().axis_coordinate(c as usize)];
    if center[0].abs() + big_r + r > 0.5 * side + 1e-9 {
        return Err(Error::Geometry(format!("B(R + r) = B({}) does not fit in the window of side {side}", big_r + r)));
    }
    let middle = restrict_counts(dec, center, big_r, t, estimator)?.inside;

    let eligible: Vec<bool> = dec.domains.iter().map(|d| d.area_by(estimator) <= t).collect();
    let sizes: Vec<u32> = dec.domains.iter().map(|d| d.node_count as u32).collect();
    let open_rows = disk_rows(r / h, false);
    let disk_size: i64 = open_rows.iter().map(|&(_, w)| 2 * w + 1).sum();
    let make = |rows| DiskCounter {
        rows,
        labels: &dec.labels,
        n,
        counts: vec![0; dec.domains.len()],
        eligible: &eligible,
        sizes: &sizes,
        full: 0,
        touched: 0,
    };
    let mut open = make(open_rows);
    let mut closed = make(disk_rows(r / h, true));

    let inner2 = ((big_r - r) / h).powi(2);
    let outer2 = ((big_r + r) / h).powi(2);
    let reach = ((big_r + r) / h).floor() as i64;
    let (mut lower_sum, mut upper_sum) = (0u64, 0u64);
    for dy in -reach..=reach {
        let row2 = (dy * dy) as f64;
        if row2 >= outer2 {
            continue;
        }
        let w = (0..=reach).rev().find(|&dx| ((dx * dx) as f64) + row2 < outer2).expect("row inside disk");
        let cj = c + dy;
        let mut ci = c - w;
        open.fill(ci, cj);
        closed.fill(ci, cj);
        loop {
            let dx = ci - c;
            upper_sum += closed.touched as u64;
            if ((dx * dx) as f64) + row2 < inner2 {
                lower_sum += open.full as u64;
            }
            if ci == c + w {
                break;
            }
            open.step(ci, cj);
            closed.step(ci, cj);
            ci += 1;
        }
        open.clear(ci, cj);
        closed.clear(ci, cj);
    }
    let lower = lower_sum as f64 / disk_size as f64;
    let upper = upper_sum as f64 / disk_size as f64;
    let m = middle as f64;
    Ok(SandwichVerdict { r, big_r, t, lower, middle, upper, holds: lower <= m && m <= upper })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_threshold_round_trips() {
        let v =
            SandwichVerdict { r: 5.0, big_r: 15.0, t: f64::INFINITY, lower: 1.0, middle: 2, upper: 3.0, holds: true };
        let json = serde_json::to_string(&v).unwrap();
        assert!(json.contains("\"t\":\"inf\""));
        assert_eq!(serde_json::from_str::<SandwichVerdict>(&json).unwrap(), v);
    }

    #[test]
    fn lattice_disk_sizes() {
        let count = |rows: &[(i64, i64)]| rows.iter().map(|&(_, w)| 2 * w + 1).sum::<i64>();
        assert_eq!(count(&disk_rows(1.0, false)), 1);
        assert_eq!(count(&disk_rows(1.0, true)), 5);
        assert_eq!(count(&disk_rows(1.5, false)), 9);
        assert_eq!(count(&disk_rows(2.0, false)), 9);
        assert_eq!(count(&disk_rows(2.0, true)), 13);
    }
}
