//! Marching squares over primal grid cells.
//!
//! Crossing points are placed on cell edges by linear interpolation. A saddle
//! cell (diagonal corners of equal sign) is resolved by the mean of its four
//! corners, which stands in for the cell-centre value: a non-negative mean
//! joins the positive corners, otherwise the negative ones.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::label::{is_positive, DisjointSet, Topology};
use crate::sampler::GridSpec;

/// One closed or open nodal line, with the labels on either side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub plus: Vec<u32>,
    pub minus: Vec<u32>,
    pub length: f64,
    /// False when the line runs off the grid (window edge or polar cap).
    pub closed: bool,
}

pub(crate) struct CellGeometry {
    pub perimeter: Vec<f64>,
    pub subcell_area: Vec<f64>,
    pub contours: Vec<Contour>,
    pub total_length: f64,
}

const CORNERS: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];

struct Segment {
    edges: [usize; 2],
    length: f64,
    plus: [u32; 2],
    minus: [u32; 2],
}

/// Local metric of one cell in unit-square coordinates.
#[derive(Clone, Copy)]
enum Metric {
    Flat { h: f64 },
    Sphere { theta0: f64, dtheta: f64, dphi: f64 },
}

impl Metric {
    fn length(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        match *self {
            Metric::Flat { h } => h * (b.0 - a.0).hypot(b.1 - a.1),
            Metric::Sphere { theta0, dtheta, dphi } => {
                let s = (theta0 + 0.5 * (a.1 + b.1) * dtheta).sin();
                ((b.1 - a.1) * dtheta).hypot(s * (b.0 - a.0) * dphi)
            }
        }
    }

    fn cell_area(&self) -> f64 {
        match *self {
            Metric::Flat { h } => h * h,
            Metric::Sphere { theta0, dtheta, dphi } => dphi * (theta0.cos() - (theta0 + dtheta).cos()),
        }
    }
}

fn shoelace(points: &[(f64, f64)]) -> f64 {
    let n = points.len();
    let mut acc = 0.0;
    for k in 0..n {
        let (x0, y0) = points[k];
        let (x1, y1) = points[(k + 1) % n];
        acc += x0 * y1 - x1 * y0;
    }
    0.5 * acc.abs()
}

fn add_shared(target: &mut [f64], labels: &[u32], amount: f64) {
    let mut distinct: Vec<u32> = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let share = amount / distinct.len() as f64;
    for l in distinct {
        target[l as usize] += share;
    }
}

pub(crate) fn trace(values: &[f64], labels: &[u32], domain_count: usize, grid: &GridSpec) -> CellGeometry {
    let topo = Topology::of(grid);
    let [nx, ny, _] = topo.shape;
    let mut perimeter = vec![0.0; domain_count];
    let mut subcell_area = vec![0.0; domain_count];
    let mut segments: Vec<Segment> = Vec::new();

    let (ci, cj) = match grid {
        GridSpec::PlanarWindow { .. } => (nx - 1, ny - 1),
        GridSpec::Torus { .. } => (nx, ny),
        GridSpec::LatLongSphere { .. } => (nx, ny - 1),
    };
    let node = |i: usize, j: usize| (j % ny) * nx + (i % nx);

    for j in 0..cj {
        let metric = match *grid {
            GridSpec::LatLongSphere { n_theta, n_phi } => {
                let dtheta = PI / n_theta as f64;
                Metric::Sphere { theta0: (j as f64 + 0.5) * dtheta, dtheta, dphi: 2.0 * PI / n_phi as f64 }
            }
            _ => Metric::Flat { h: grid.spacing() },
        };
        let cell_area = metric.cell_area();
        for i in 0..ci {
            let idx = [node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)];
            let v = idx.map(|n| values[n]);
            let lab = idx.map(|n| labels[n]);
            let pos = v.map(is_positive);
            let mask = pos.iter().enumerate().fold(0u8, |m, (k, &p)| m | (u8::from(p) << k));
            if mask == 0 || mask == 15 {
                add_shared(&mut subcell_area, &[lab[0], lab[1], lab[2], lab[3]], cell_area);
                continue;
            }
            // horizontal edges carry even ids, vertical edges odd ids
            let edge_id = [2 * idx[0], 2 * idx[1] + 1, 2 * idx[3], 2 * idx[0] + 1];
            let cross = |k: usize| {
                let (a, b) = (k, (k + 1) % 4);
                let t = v[a] / (v[a] - v[b]);
                let (pa, pb) = (CORNERS[a], CORNERS[b]);
                (pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1))
            };
            let crossed = |k: usize| pos[k] != pos[(k + 1) % 4];
            let saddle = mask == 0b0101 || mask == 0b1010;
            if saddle {
                let mean = 0.25 * v.iter().sum::<f64>();
                let plus_joined = is_positive(mean);
                let pts = [cross(0), cross(1), cross(2), cross(3)];
                // corners cut off: those whose sign is not the joined one
                let cut: Vec<usize> = (0..4).filter(|&k| pos[k] != plus_joined).collect();
                let joined: Vec<usize> = (0..4).filter(|&k| pos[k] == plus_joined).collect();
                let joined_labels = [lab[joined[0]], lab[joined[1]]];
                let mut cut_area = 0.0;
                for &c in &cut {
                    // edge c leaves corner c, edge c-1 arrives at it
                    let (e_in, e_out) = ((c + 3) % 4, c);
                    let tri = [pts[e_in], CORNERS[c], pts[e_out]];
                    let area = shoelace(&tri) * cell_area;
                    cut_area += area;
                    add_shared(&mut subcell_area, &[lab[c]], area);
                    let length = metric.length(pts[e_in], pts[e_out]);
                    let (plus, minus) =
                        if pos[c] { ([lab[c]; 2], joined_labels) } else { (joined_labels, [lab[c]; 2]) };
                    segments.push(Segment { edges: [edge_id[e_in], edge_id[e_out]], length, plus, minus });
                }
                add_shared(&mut subcell_area, &joined_labels, cell_area - cut_area);
                continue;
            }
            // one plus polygon walked around the cell boundary
            let mut poly = Vec::with_capacity(6);
            let mut ends = Vec::with_capacity(2);
            for k in 0..4 {
                if pos[k] {
                    poly.push(CORNERS[k]);
                }
                if crossed(k) {
                    let p = cross(k);
                    poly.push(p);
                    ends.push((k, p));
                }
            }
            let plus_area = shoelace(&poly) * cell_area;
            let plus_labels: Vec<u32> = (0..4).filter(|&k| pos[k]).map(|k| lab[k]).collect();
            let minus_labels: Vec<u32> = (0..4).filter(|&k| !pos[k]).map(|k| lab[k]).collect();
            add_shared(&mut subcell_area, &plus_labels, plus_area);
            add_shared(&mut subcell_area, &minus_labels, cell_area - plus_area);
            let length = metric.length(ends[0].1, ends[1].1);
            // labels on each side are 4-adjacent within the cell, hence equal
            segments.push(Segment {
                edges: [edge_id[ends[0].0], edge_id[ends[1].0]],
                length,
                plus: [plus_labels[0]; 2],
                minus: [minus_labels[0]; 2],
            });
        }
    }

    let mut total_length = 0.0;
    for s in &segments {
        total_length += s.length;
        add_shared(&mut perimeter, &s.plus, s.length);
        add_shared(&mut perimeter, &s.minus, s.length);
    }

    let contours = link_contours(&segments, 2 * values.len());
    CellGeometry { perimeter, subcell_area, contours, total_length }
}

fn link_contours(segments: &[Segment], edge_count: usize) -> Vec<Contour> {
    let mut sets = DisjointSet::new(edge_count);
    let mut incidence = vec![0u8; edge_count];
    for s in segments {
        sets.union(s.edges[0] as u32, s.edges[1] as u32);
        incidence[s.edges[0]] += 1;
        incidence[s.edges[1]] += 1;
    }
    let mut contour_of_root = std::collections::HashMap::new();
    let mut contours: Vec<Contour> = Vec::new();
    for s in segments {
        let root = sets.find(s.edges[0] as u32);
        let id = *contour_of_root.entry(root).or_insert_with(|| {
            contours.push(Contour { plus: Vec::new(), minus: Vec::new(), length: 0.0, closed: true });
            contours.len() - 1
        });
        let c = &mut contours[id];
        c.length += s.length;
        c.plus.extend_from_slice(&s.plus);
        c.minus.extend_from_slice(&s.minus);
        if s.edges.iter().any(|&e| incidence[e] < 2) {
            c.closed = false;
        }
    }
    for c in &mut contours {
        c.plus.sort_unstable();
        c.plus.dedup();
        c.minus.sort_unstable();
        c.minus.dedup();
    }
    contours
}
