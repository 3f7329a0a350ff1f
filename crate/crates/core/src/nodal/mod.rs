//! Nodal domains of sampled fields.

mod contour;
mod label;
mod nesting;
mod perturb;
mod restrict;

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use contour::Contour;
pub use label::{is_positive, DisjointSet};
pub use nesting::{nesting_graph, NestingGraph};
pub use perturb::{perturbation_stability, PerturbationReport, PerturbationRow};
pub use restrict::{ball_membership, restrict_counts, BallCounts, BallMembership};

use crate::sampler::{FieldSample, GridSpec};
use label::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn of(value: f64) -> Self {
        if is_positive(value) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Node adjacency used for labeling: nearest neighbours along each axis
/// (4 in 2-D, 6 in 3-D).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Connectivity {
    #[default]
    FourConnected,
}

/// Which area a domain is measured by when thresholds are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaEstimator {
    /// Member nodes times node weight.
    #[default]
    CellCount,
    /// Marching-squares clipped area of the primal cells.
    Subcell,
}

/// Inclusive node-index rectangle (a box in 3-D).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: [usize; 3],
    pub max: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainRecord {
    pub label: u32,
    pub sign: Sign,
    pub node_count: usize,
    pub area: f64,
    pub subcell_area: f64,
    pub perimeter: f64,
    pub boundary_component_count: usize,
    pub touches_window: bool,
    pub bounding_box: BoundingBox,
    pub diameter_hint: f64,
}

impl DomainRecord {
    pub fn area_by(&self, estimator: AreaEstimator) -> f64 {
        match estimator {
            AreaEstimator::CellCount => self.area,
            AreaEstimator::Subcell => self.subcell_area,
        }
    }

    pub fn is_interior(&self) -> bool {
        !self.touches_window
    }
}

/// Labels, per-domain records and (once measured) the traced nodal lines of
/// one sample. Keeps the sample it was built from.
#[derive(Debug, Clone)]
pub struct NodalDecomposition {
    pub sample: FieldSample,
    pub labels: Vec<u32>,
    pub domains: Vec<DomainRecord>,
    pub connectivity: Connectivity,
    pub contours: Vec<Contour>,
    pub nodal_length: f64,
    pub measured: bool,
}

impl NodalDecomposition {
    pub fn grid(&self) -> &GridSpec {
        &self.sample.grid
    }

    pub fn domain_count(&self) -> usize {
        self.domains.len()
    }

    pub fn interior(&self) -> impl Iterator<Item = &DomainRecord> {
        self.domains.iter().filter(|d| d.is_interior())
    }

    /// Domain table as CSV, one row per domain in label order.
    pub fn domain_csv(&self) -> String {
        let mut out = String::from("label,sign,area,perimeter,boundary_components,touches_window\n");
        for d in &self.domains {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                d.label,
                d.sign.symbol(),
                d.area,
                d.perimeter,
                d.boundary_component_count,
                d.touches_window
            );
        }
        out
    }
}

/// Connected components of `{F >= 0}` and `{F < 0}`, with node-count areas.
/// Perimeters and boundary counts stay zero until [`measure_domains`].
pub fn label_domains(sample: &FieldSample) -> NodalDecomposition {
    let grid = sample.grid;
    let topo = Topology::of(&grid);
    let (labels, count) = label::component_labels(&sample.values, &topo);
    let weights = grid.node_weights();

    let empty = BoundingBox { min: [usize::MAX; 3], max: [0; 3] };
    let mut domains: Vec<DomainRecord> = (0..count)
        .map(|l| DomainRecord {
            label: l as u32,
            sign: Sign::Plus,
            node_count: 0,
            area: 0.0,
            subcell_area: 0.0,
            perimeter: 0.0,
            boundary_component_count: 0,
            touches_window: false,
            bounding_box: empty,
            diameter_hint: 0.0,
        })
        .collect();
    for (idx, &l) in labels.iter().enumerate() {
        let d = &mut domains[l as usize];
        if d.node_count == 0 {
            d.sign = Sign::of(sample.values[idx]);
        }
        d.node_count += 1;
        d.area += weights[idx];
        let c = topo.coords(idx);
        for a in 0..3 {
            d.bounding_box.min[a] = d.bounding_box.min[a].min(c[a]);
            d.bounding_box.max[a] = d.bounding_box.max[a].max(c[a]);
        }
        if topo.on_window_edge(c) {
            d.touches_window = true;
        }
    }
    let steps = axis_steps(&grid);
    for d in &mut domains {
        d.subcell_area = d.area;
        let b = d.bounding_box;
        d.diameter_hint = (0..3).map(|a| ((b.max[a] - b.min[a]) as f64 * steps[a]).powi(2)).sum::<f64>().sqrt();
    }
    NodalDecomposition {
        sample: sample.clone(),
        labels,
        domains,
        connectivity: Connectivity::FourConnected,
        contours: Vec::new(),
        nodal_length: 0.0,
        measured: false,
    }
}

fn axis_steps(grid: &GridSpec) -> [f64; 3] {
    match *grid {
        GridSpec::LatLongSphere { n_theta, n_phi } => [2.0 * PI / n_phi as f64, PI / n_theta as f64, 0.0],
        _ => [grid.spacing(); 3],
    }
}

/// Trace nodal lines and fill in perimeters, subcell areas and boundary
/// component counts. On 3-D grids only the labeling is available and those
/// fields stay at zero (subcell area falls back to the node-count area).
pub fn measure_domains(mut dec: NodalDecomposition) -> NodalDecomposition {
    if dec.measured || dec.sample.grid.dim() != 2 {
        dec.measured = true;
        return dec;
    }
    let geo = contour::trace(&dec.sample.values, &dec.labels, dec.domains.len(), &dec.sample.grid);
    let mut boundary_counts = vec![0usize; dec.domains.len()];
    for c in &geo.contours {
        for &l in c.plus.iter().chain(&c.minus) {
            boundary_counts[l as usize] += 1;
        }
    }
    let mut subcell = geo.subcell_area;
    if let GridSpec::LatLongSphere { n_theta, n_phi } = dec.sample.grid {
        // the caps inside the first and last rows are shared out per node
        let share = 2.0 * PI * (1.0 - (0.5 * PI / n_theta as f64).cos()) / n_phi as f64;
        for row in [0, n_theta - 1] {
            for &l in &dec.labels[row * n_phi..(row + 1) * n_phi] {
                subcell[l as usize] += share;
            }
        }
    }
    for (k, d) in dec.domains.iter_mut().enumerate() {
        d.perimeter = geo.perimeter[k];
        d.boundary_component_count = boundary_counts[k];
        d.subcell_area = subcell[k];
    }
    dec.contours = geo.contours;
    dec.nodal_length = geo.total_length;
    dec.measured = true;
    dec
}

/// Label and measure in one step.
pub fn decompose(sample: &FieldSample) -> NodalDecomposition {
    measure_domains(label_domains(sample))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::sampler::SpectralModel;

    fn planar(values: Vec<f64>, n: usize) -> FieldSample {
        let h = 0.5;
        // tiny grids below the validated minimum, built directly
        let grid = GridSpec::PlanarWindow { side: h * (n - 1) as f64, spacing: h };
        FieldSample { model: SpectralModel::PlaneWave2D, grid, values, seed: 0, index: 0 }
    }

    #[test]
    fn all_positive_is_one_touching_domain() {
        let dec = decompose(&planar(vec![1.0; 9], 3));
        assert_eq!(dec.domain_count(), 1);
        assert_eq!(dec.domains[0].sign, Sign::Plus);
        assert!(dec.domains[0].touches_window);
    }

    #[test]
    fn checkerboard_has_four_domains() {
        let dec = label_domains(&planar(vec![1.0, -1.0, -1.0, 1.0], 2));
        assert_eq!(dec.domain_count(), 4);
    }

    #[test]
    fn zero_counts_as_positive() {
        let dec = label_domains(&planar(vec![0.0, 1.0, 1.0, 1.0], 2));
        assert_eq!(dec.domain_count(), 1);
    }

    #[test]
    fn single_node_island() {
        let mut values = vec![-1.0; 25];
        values[12] = 1.0;
        let dec = decompose(&planar(values, 5));
        let island = dec.domains.iter().find(|d| d.sign == Sign::Plus).unwrap();
        let h = 0.5;
        assert_eq!(island.area, h * h);
        assert!(!island.touches_window);
        // crossings at the edge midpoints: a diamond of side h / sqrt(2)
        assert!((island.perimeter - 4.0 * h * 0.5f64.sqrt()).abs() < 1e-12);
        assert!(island.perimeter > 0.0 && island.perimeter <= 4.0 * h);
        assert_eq!(island.boundary_component_count, 1);
        assert_eq!(dec.contours.len(), 1);
        assert!(dec.contours[0].closed);
    }

    #[test]
    fn torus_product_of_sines() {
        let grid = GridSpec::Torus { side: 2.0 * PI, spacing: 2.0 * PI / 64.0, dim: 2 };
        // shifted half a step so no node sits on the nodal lines
        let h = 2.0 * PI / 64.0;
        let values = (0..64 * 64)
            .map(|k| {
                let (i, j) = (k % 64, k / 64);
                ((i as f64 + 0.5) * h).sin() * ((j as f64 + 0.5) * h).sin()
            })
            .collect();
        let sample = FieldSample {
            model: SpectralModel::BandLimitedTorus { dim: 2, alpha: 0.0 },
            grid,
            values,
            seed: 0,
            index: 0,
        };
        let dec = decompose(&sample);
        assert_eq!(dec.domain_count(), 4);
        for d in &dec.domains {
            assert!((d.area - PI * PI).abs() < 0.02 * PI * PI, "{d:?}");
            assert!((d.perimeter - 4.0 * PI).abs() < 0.02 * 4.0 * PI, "{d:?}");
        }
        let plus = dec.domains.iter().filter(|d| d.sign == Sign::Plus).count();
        assert_eq!(plus, 2);
    }

    #[test]
    fn sphere_weights_partition() {
        let grid = GridSpec::sphere(12, 24).unwrap();
        let sample = FieldSample::synthetic(
            SpectralModel::SphericalHarmonic { degree: 3 },
            grid,
            (0..12 * 24).map(|k| ((k * 7919) % 13) as f64 - 6.0).collect(),
        )
        .unwrap();
        let dec = decompose(&sample);
        let total: f64 = dec.domains.iter().map(|d| d.area).sum();
        assert!((total - 4.0 * PI).abs() < 1e-9);
        let subcell: f64 = dec.domains.iter().map(|d| d.subcell_area).sum();
        assert!((subcell - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn csv_header_and_order() {
        let dec = decompose(&planar(vec![1.0, -1.0, -1.0, 1.0], 2));
        let csv = dec.domain_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("label,sign,area,perimeter,boundary_components,touches_window"));
        assert!(lines.next().unwrap().starts_with("0,+,"));
        assert_eq!(csv.lines().count(), 5);
    }
}
