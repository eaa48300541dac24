//! Panelized boundaries: closed curves in the plane, triangulated spheres,
//! truncated Lipschitz graphs, and generic closed test geometries, together
//! with probe points for nontangential limits and local refinement for
//! near-singular quadrature.
//!
//! Every panel carries a centroid, a unit normal pointing into the lower /
//! exterior domain, a positive quadrature weight (its share of the surface
//! measure) and its vertices. Quadrature everywhere is the centroid rule.

mod generate;
mod json;

pub use generate::*;

use crate::error::{Error, Result};
use crate::kernels::PointVec;

/// A single flat quadrature panel of the discretized boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub centroid: PointVec,
    pub normal: PointVec,
    pub weight: f64,
    pub vertices: Vec<PointVec>,
}

impl Panel {
    /// Largest pairwise vertex distance; falls back to a weight-derived
    /// scale if the panel has fewer than two vertices.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                d = d.max(self.vertices[i].distance(&self.vertices[j]));
            }
        }
        if d == 0.0 {
            self.weight
        } else {
            d
        }
    }
}

/// Which domain the mesh bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshKind {
    Interior,
    Exterior,
    Graph,
}

/// Which side of the boundary an off-surface point belongs to. `Plus` is the
/// interior domain / the region above a graph, `Minus` its complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(&self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// A discretized boundary surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub n: usize,
    pub kind: MeshKind,
    pub panels: Vec<Panel>,
}

impl SurfaceMesh {
    pub fn closed(&self) -> bool {
        self.kind != MeshKind::Graph
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.panels.iter().map(|p| p.weight).sum()
    }

    pub fn max_panel_diameter(&self) -> f64 {
        self.panels.iter().map(|p| p.diameter()).fold(0.0, f64::max)
    }

    /// Distance from a point to the closest panel centroid, with that
    /// panel's index.
    pub fn closest_panel(&self, x: &PointVec) -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (i, p) in self.panels.iter().enumerate() {
            let d = p.centroid.distance(x);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Check the structural invariants: unit normals, positive weights,
    /// and for closed meshes the divergence-theorem identity sum(nu w) = 0.
    pub fn validate(&self) -> Result<()> {
        if self.panels.is_empty() {
            return Err(Error::InvalidMesh("mesh has no panels".into()));
        }
        for (i, p) in self.panels.iter().enumerate() {
            if p.centroid.dim() != self.n || p.normal.dim() != self.n {
                return Err(Error::InvalidMesh(format!("panel {i} dimension mismatch")));
            }
            if (p.normal.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidMesh(format!(
                    "panel {i} normal has length {:.15}",
                    p.normal.norm()
                )));
            }
            if !(p.weight > 0.0) {
                return Err(Error::InvalidMesh(format!("panel {i} weight {} <= 0", p.weight)));
            }
        }
        if self.closed() {
            let mut flux = vec![0.0; self.n];
            for p in &self.panels {
                for (f, c) in flux.iter_mut().zip(p.normal.coords()) {
                    *f += c * p.weight;
                }
            }
            let flux_norm = flux.iter().map(|f| f * f).sum::<f64>().sqrt();
            if flux_norm > 1e-10 * self.total_weight() {
                return Err(Error::InvalidMesh(format!(
                    "closed mesh has nonzero normal flux {flux_norm:.3e}"
                )));
            }
        }
        Ok(())
    }
}

/// Probe points approximating nontangential approach to the boundary along
/// straight normal offsets.
#[derive(Debug, Clone)]
pub struct ProbeSet {
    pub points: Vec<PointVec>,
    pub side: Side,
    pub offsets: Vec<f64>,
    /// Set when the offset is below twice the largest panel diameter, where
    /// the centroid rule needs local refinement to stay accurate.
    pub warning: Option<String>,
}

/// One probe per panel at `centroid -/+ offset * normal`; minus moves into
/// the interior domain D+ (normals point into D-).
pub fn probe_points(mesh: &SurfaceMesh, side: Side, offset: f64) -> Result<ProbeSet> {
    if !(offset > 0.0) {
        return Err(Error::InvalidMesh(format!("probe offset {offset} must be positive")));
    }
    let sign = match side {
        Side::Plus => -1.0,
        Side::Minus => 1.0,
    };
    let points: Vec<PointVec> =
        mesh.panels.iter().map(|p| p.centroid.axpy(sign * offset, &p.normal)).collect();
    let warn_at = 2.0 * mesh.max_panel_diameter();
    let warning = (offset < warn_at).then(|| {
        format!("probe offset {offset:.3e} below 2 x panel diameter {warn_at:.3e}; near-singular quadrature needs refinement")
    });
    Ok(ProbeSet { points, side, offsets: vec![offset; mesh.panel_count()], warning })
}

/// Result of local refinement: the refined mesh plus, for every refined
/// panel, the index of the original panel it came from.
#[derive(Debug, Clone)]
pub struct RefinedMesh {
    pub mesh: SurfaceMesh,
    pub parent: Vec<usize>,
}

fn split_panel(panel: &Panel) -> Vec<Panel> {
    match panel.vertices.len() {
        2 => {
            // Segment: bisect at the straight midpoint; the two halves keep
            // the parent normal and split the weight by sub-length, which
            // preserves the total weight exactly.
            let a = &panel.vertices[0];
            let b = &panel.vertices[1];
            let mid = a.add(b).scale(0.5);
            [(a.clone(), mid.clone()), (mid, b.clone())]
                .into_iter()
                .map(|(v0, v1)| {
                    let len_frac = v0.distance(&v1) / a.distance(b);
                    Panel {
                        centroid: v0.add(&v1).scale(0.5),
                        normal: panel.normal.clone(),
                        weight: panel.weight * len_frac,
                        vertices: vec![v0, v1],
                    }
                })
                .collect()
        }
        3 => {
            // Triangle: standard 4-way midpoint split, flat, weight shared
            // equally (exact for the flat parent triangle).
            let v = &panel.vertices;
            let m01 = v[0].add(&v[1]).scale(0.5);
            let m12 = v[1].add(&v[2]).scale(0.5);
            let m20 = v[2].add(&v[0]).scale(0.5);
            [
                [v[0].clone(), m01.clone(), m20.clone()],
                [v[1].clone(), m12.clone(), m01.clone()],
                [v[2].clone(), m20.clone(), m12.clone()],
                [m01, m12, m20],
            ]
            .into_iter()
            .map(|tri| Panel {
                centroid: tri[0].add(&tri[1]).add(&tri[2]).scale(1.0 / 3.0),
                normal: panel.normal.clone(),
                weight: panel.weight / 4.0,
                vertices: tri.to_vec(),
            })
            .collect()
        }
        _ => vec![panel.clone()],
    }
}

/// Split panels near `point` `depth` times with parent tracking. A panel is
/// split when its diameter exceeds a third of its distance to the point.
pub fn refine_near_tracked(mesh: &SurfaceMesh, point: &PointVec, depth: usize) -> RefinedMesh {
    let mut current = mesh.clone();
    let mut parent: Vec<usize> = (0..mesh.panel_count()).collect();
    for _ in 0..depth {
        let mut panels = Vec::with_capacity(current.panel_count());
        let mut next_parent = Vec::with_capacity(current.panel_count());
        let mut any = false;
        for (p, &pa) in current.panels.iter().zip(&parent) {
            let dist = p.centroid.distance(point);
            if p.diameter() > dist / 3.0 {
                any = true;
                for child in split_panel(p) {
                    panels.push(child);
                    next_parent.push(pa);
                }
            } else {
                panels.push(p.clone());
                next_parent.push(pa);
            }
        }
        current = SurfaceMesh { n: mesh.n, kind: mesh.kind, panels };
        parent = next_parent;
        if !any {
            break;
        }
    }
    RefinedMesh { mesh: current, parent }
}

/// Local panel subdivision near a point; `depth = 0` returns the mesh as is.
pub fn refine_near(mesh: &SurfaceMesh, point: &PointVec, depth: usize) -> SurfaceMesh {
    refine_near_tracked(mesh, point, depth).mesh
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn circle_chord_weights() {
        let mesh = make_circle(4).unwrap();
        assert_eq!(mesh.panel_count(), 4);
        // Inscribed square perimeter.
        assert_relative_eq!(mesh.total_weight(), 4.0 * 2f64.sqrt(), max_relative = 1e-14);
        mesh.validate().unwrap();
        for p in &mesh.panels {
            assert!(p.centroid.dot(&p.normal) > 0.0, "normals must point outward");
            assert_relative_eq!(p.centroid.norm(), 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn circle_weight_converges_second_order() {
        let err = |m: usize| (2.0 * PI - make_circle(m).unwrap().total_weight()).abs();
        let (e1, e2) = (err(64), err(128));
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.05, "weight convergence order {order}");
    }

    #[test]
    fn sphere_counts_and_area() {
        let mesh = make_sphere(3).unwrap();
        assert_eq!(mesh.panel_count(), 20 * 4usize.pow(3));
        let area = mesh.total_weight();
        assert!((area - 4.0 * PI).abs() / (4.0 * PI) < 0.01, "area {area} not within 1% of 4pi");
        for p in &mesh.panels {
            assert!(p.centroid.dot(&p.normal) > 0.0);
        }
        mesh.validate().unwrap();
    }

    #[test]
    fn sphere_euler_characteristic() {
        for subdiv in 0..=2 {
            let (v, e, f) = icosphere_euler_counts(subdiv);
            assert_eq!(v as i64 - e as i64 + f as i64, 2, "subdiv {subdiv}");
        }
    }

    #[test]
    fn flat_graph_normals_exact() {
        let mesh = make_graph_curve(&|_| 0.0, 10.0, 100).unwrap();
        for p in &mesh.panels {
            assert_eq!(p.normal.coords(), &[0.0, -1.0]);
            assert_eq!(p.centroid.coord(1), 0.0);
        }
    }

    #[test]
    fn lipschitz_graph_slopes_and_length() {
        let m = 64;
        let mesh = make_graph_curve(&|x: f64| x.abs() / 2.0, 8.0, m).unwrap();
        for p in &mesh.panels {
            let (a, b) = (&p.vertices[0], &p.vertices[1]);
            let slope = (b.coord(1) - a.coord(1)).abs() / (b.coord(0) - a.coord(0)).abs();
            assert!(slope <= 0.5 + 1e-12);
        }
        // Even panel count puts a node on the kink, so the polyline length is exact.
        assert_relative_eq!(mesh.total_weight(), 16.0 * 1.25f64.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn polygon_and_cube() {
        let square = make_polygon(&[
            PointVec::new(vec![0.0, 0.0]),
            PointVec::new(vec![1.0, 0.0]),
            PointVec::new(vec![1.0, 1.0]),
            PointVec::new(vec![0.0, 1.0]),
        ])
        .unwrap();
        assert_eq!(square.total_weight(), 4.0);
        let mut flux = [0.0, 0.0];
        for p in &square.panels {
            flux[0] += p.normal.coord(0) * p.weight;
            flux[1] += p.normal.coord(1) * p.weight;
        }
        assert_eq!(flux, [0.0, 0.0]);

        let cube = make_cube_surface(3).unwrap();
        assert_relative_eq!(cube.total_weight(), 6.0, max_relative = 1e-13);
        cube.validate().unwrap();
    }

    #[test]
    fn probes_sit_on_the_requested_side() {
        let mesh = make_circle(32).unwrap();
        let inner = probe_points(&mesh, Side::Plus, 0.1).unwrap();
        for p in &inner.points {
            assert_relative_eq!(p.norm(), 0.9, max_relative = 1e-14);
        }
        let outer = probe_points(&mesh, Side::Minus, 0.1).unwrap();
        for p in &outer.points {
            assert_relative_eq!(p.norm(), 1.1, max_relative = 1e-14);
        }
    }

    #[test]
    fn probe_offset_warning() {
        let mesh = make_circle(16).unwrap();
        // Panel diameter ~ 0.39, so an offset of 0.05 is under-resolved.
        assert!(probe_points(&mesh, Side::Plus, 0.05).unwrap().warning.is_some());
        assert!(probe_points(&mesh, Side::Plus, 1.0).unwrap().warning.is_none());
    }

    #[test]
    fn refine_preserves_weight() {
        let point = PointVec::new(vec![1.0, 0.0]);
        let mesh = make_circle(16).unwrap();
        assert_eq!(refine_near(&mesh, &point, 0), mesh);
        let refined = refine_near(&mesh, &point, 3);
        assert!(refined.panel_count() > mesh.panel_count());
        assert_relative_eq!(refined.total_weight(), mesh.total_weight(), max_relative = 1e-12);

        let sphere = make_sphere(1).unwrap();
        let refined = refine_near(&sphere, &PointVec::new(vec![0.0, 0.0, 1.0]), 2);
        assert_relative_eq!(refined.total_weight(), sphere.total_weight(), max_relative = 1e-12);
    }

    #[test]
    fn refinement_improves_near_singular_single_layer() {
        use crate::kernels::laplace_fundamental;
        // Single layer potential of the unit density on the circle vanishes
        // inside; quadrature error at a nearby probe must drop with depth
        // while the nearest panels are still being split. Once the 1/3 rule
        // saturates, the flat sub-chord geometry sets the error floor.
        let mesh = make_circle(64).unwrap();
        let probe = PointVec::new(vec![0.95, 0.0]);
        let value = |m: &SurfaceMesh| -> f64 {
            m.panels
                .iter()
                .map(|p| laplace_fundamental(&p.centroid.sub(&probe)).unwrap() * p.weight)
                .sum()
        };
        let mut prev = f64::INFINITY;
        for depth in 0..3 {
            let err = value(&refine_near(&mesh, &probe, depth)).abs();
            assert!(err < prev, "depth {depth}: {err:.3e} !< {prev:.3e}");
            prev = err;
        }
        // The saturated refinement stays well below the unrefined error.
        let unrefined = value(&mesh).abs();
        let saturated = value(&refine_near(&mesh, &probe, 8)).abs();
        assert!(saturated < 0.25 * unrefined);
    }
}
