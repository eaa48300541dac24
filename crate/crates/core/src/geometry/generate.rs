//! Mesh constructors.

use std::collections::HashMap;

use super::{MeshKind, Panel, SurfaceMesh};
use crate::error::{Error, Result};
use crate::kernels::PointVec;

/// Unit circle split into `m` equal arcs. Panel centroids sit on the circle
/// at the arc midpoints, normals are radial, and the weight is the chord
/// length (midpoint rule on the inscribed polygon).
pub fn make_circle(m: usize) -> Result<SurfaceMesh> {
    if m < 3 {
        return Err(Error::InvalidMesh(format!("circle needs at least 3 panels, got {m}")));
    }
    let chord = 2.0 * (std::f64::consts::PI / m as f64).sin();
    let panels = (0..m)
        .map(|i| {
            let t0 = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
            let t1 = 2.0 * std::f64::consts::PI * (i + 1) as f64 / m as f64;
            let tm = 0.5 * (t0 + t1);
            let centroid = PointVec::new(vec![tm.cos(), tm.sin()]);
            Panel {
                normal: centroid.clone(),
                centroid,
                weight: chord,
                vertices: vec![
                    PointVec::new(vec![t0.cos(), t0.sin()]),
                    PointVec::new(vec![t1.cos(), t1.sin()]),
                ],
            }
        })
        .collect();
    Ok(SurfaceMesh { n: 2, kind: MeshKind::Interior, panels })
}

/// Icosahedron vertices and faces, vertices normalized to the unit sphere.
fn icosahedron() -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let norm = (1.0 + phi * phi).sqrt();
    let (a, b) = (1.0 / norm, phi / norm);
    let vertices = vec![
        [-a, b, 0.0],
        [a, b, 0.0],
        [-a, -b, 0.0],
        [a, -b, 0.0],
        [0.0, -a, b],
        [0.0, a, b],
        [0.0, -a, -b],
        [0.0, a, -b],
        [b, 0.0, -a],
        [b, 0.0, a],
        [-b, 0.0, -a],
        [-b, 0.0, a],
    ];
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (vertices, faces)
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn subdivide(
    vertices: &mut Vec<[f64; 3]>,
    faces: &[[usize; 3]],
) -> Vec<[usize; 3]> {
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut out = Vec::with_capacity(faces.len() * 4);
    let mut mid = |i: usize, j: usize, vertices: &mut Vec<[f64; 3]>| -> usize {
        let key = if i < j { (i, j) } else { (j, i) };
        *midpoint.entry(key).or_insert_with(|| {
            let (a, b) = (vertices[i], vertices[j]);
            let m = normalize3([
                0.5 * (a[0] + b[0]),
                0.5 * (a[1] + b[1]),
                0.5 * (a[2] + b[2]),
            ]);
            vertices.push(m);
            vertices.len() - 1
        })
    };
    for &[v0, v1, v2] in faces {
        let m01 = mid(v0, v1, vertices);
        let m12 = mid(v1, v2, vertices);
        let m20 = mid(v2, v0, vertices);
        out.push([v0, m01, m20]);
        out.push([v1, m12, m01]);
        out.push([v2, m20, m12]);
        out.push([m01, m12, m20]);
    }
    out
}

/// Vertex / edge / face counts of the subdivided icosphere, for the Euler
/// characteristic check.
pub fn icosphere_euler_counts(subdivisions: usize) -> (usize, usize, usize) {
    let (mut vertices, mut faces) = icosahedron();
    for _ in 0..subdivisions {
        faces = subdivide(&mut vertices, &faces);
    }
    let mut edges = std::collections::HashSet::new();
    for f in &faces {
        for (i, j) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            edges.insert(if i < j { (i, j) } else { (j, i) });
        }
    }
    (vertices.len(), edges.len(), faces.len())
}

/// Unit sphere as a radially projected subdivided icosahedron. Panel weight
/// is the flat triangle area; its centroid is radially projected onto the
/// sphere with the radial direction as normal, so the double layer kernel
/// sees exact on-sphere geometry.
pub fn make_sphere(subdivisions: usize) -> Result<SurfaceMesh> {
    if subdivisions > 6 {
        return Err(Error::InvalidMesh(format!("sphere subdivision {subdivisions} too fine")));
    }
    let (mut vertices, mut faces) = icosahedron();
    for _ in 0..subdivisions {
        faces = subdivide(&mut vertices, &faces);
    }
    let panels = faces
        .iter()
        .map(|&[i, j, k]| {
            let (a, b, c) = (vertices[i], vertices[j], vertices[k]);
            let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
            let cross = [
                u[1] * v[2] - u[2] * v[1],
                u[2] * v[0] - u[0] * v[2],
                u[0] * v[1] - u[1] * v[0],
            ];
            let area = 0.5 * (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
            let centroid = normalize3([
                (a[0] + b[0] + c[0]) / 3.0,
                (a[1] + b[1] + c[1]) / 3.0,
                (a[2] + b[2] + c[2]) / 3.0,
            ]);
            Panel {
                centroid: PointVec::new(centroid.to_vec()),
                normal: PointVec::new(centroid.to_vec()),
                weight: area,
                vertices: vec![
                    PointVec::new(a.to_vec()),
                    PointVec::new(b.to_vec()),
                    PointVec::new(c.to_vec()),
                ],
            }
        })
        .collect();
    Ok(SurfaceMesh { n: 3, kind: MeshKind::Interior, panels })
}

/// Polyline over x in [-R, R] for the graph of `phi`, truncated. Normals
/// point below the graph (into D-), so D+ is the region above.
pub fn make_graph_curve(phi: &dyn Fn(f64) -> f64, extent: f64, m: usize) -> Result<SurfaceMesh> {
    if m < 2 || !(extent > 0.0) {
        return Err(Error::InvalidMesh(format!("invalid graph parameters R={extent}, m={m}")));
    }
    let dx = 2.0 * extent / m as f64;
    let panels = (0..m)
        .map(|i| {
            let x0 = -extent + dx * i as f64;
            let x1 = -extent + dx * (i + 1) as f64;
            let (y0, y1) = (phi(x0), phi(x1));
            let len = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
            // Rotate the tangent (dx, dy) by -90 degrees: (dy, -dx) points below.
            let normal = PointVec::new(vec![(y1 - y0) / len, -(x1 - x0) / len]);
            Panel {
                centroid: PointVec::new(vec![0.5 * (x0 + x1), 0.5 * (y0 + y1)]),
                normal,
                weight: len,
                vertices: vec![PointVec::new(vec![x0, y0]), PointVec::new(vec![x1, y1])],
            }
        })
        .collect();
    Ok(SurfaceMesh { n: 2, kind: MeshKind::Graph, panels })
}

/// Flat square patch of the plane x3 = 0 in R^3, an m x m cell grid over
/// [-R, R]^2 with normals -e3. Used for half-space comparisons.
pub fn make_graph_plane(extent: f64, m: usize) -> Result<SurfaceMesh> {
    if m < 2 || !(extent > 0.0) {
        return Err(Error::InvalidMesh(format!("invalid plane parameters R={extent}, m={m}")));
    }
    let dx = 2.0 * extent / m as f64;
    let mut panels = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let x0 = -extent + dx * i as f64;
            let y0 = -extent + dx * j as f64;
            let (x1, y1) = (x0 + dx, y0 + dx);
            panels.push(Panel {
                centroid: PointVec::new(vec![0.5 * (x0 + x1), 0.5 * (y0 + y1), 0.0]),
                normal: PointVec::new(vec![0.0, 0.0, -1.0]),
                weight: dx * dx,
                vertices: vec![
                    PointVec::new(vec![x0, y0, 0.0]),
                    PointVec::new(vec![x1, y0, 0.0]),
                    PointVec::new(vec![x1, y1, 0.0]),
                    PointVec::new(vec![x0, y1, 0.0]),
                ],
            });
        }
    }
    Ok(SurfaceMesh { n: 3, kind: MeshKind::Graph, panels })
}

/// Closed polygon from counterclockwise vertices; one panel per edge with
/// the outward normal.
pub fn make_polygon(vertices: &[PointVec]) -> Result<SurfaceMesh> {
    if vertices.len() < 3 {
        return Err(Error::InvalidMesh("polygon needs at least 3 vertices".into()));
    }
    if vertices.iter().any(|v| v.dim() != 2) {
        return Err(Error::InvalidMesh("polygon vertices must be planar".into()));
    }
    let m = vertices.len();
    let panels = (0..m)
        .map(|i| {
            let a = &vertices[i];
            let b = &vertices[(i + 1) % m];
            let len = a.distance(b);
            // Outward normal of a counterclockwise polygon: rotate the
            // tangent by -90 degrees.
            let normal =
                PointVec::new(vec![(b.coord(1) - a.coord(1)) / len, -(b.coord(0) - a.coord(0)) / len]);
            Panel {
                centroid: a.add(b).scale(0.5),
                normal,
                weight: len,
                vertices: vec![a.clone(), b.clone()],
            }
        })
        .collect();
    Ok(SurfaceMesh { n: 2, kind: MeshKind::Interior, panels })
}

/// An ellipse with semi-axes `a`, `b` sampled as an m-gon.
pub fn make_ellipse(a: f64, b: f64, m: usize) -> Result<SurfaceMesh> {
    if m < 3 {
        return Err(Error::InvalidMesh(format!("ellipse needs at least 3 panels, got {m}")));
    }
    let vertices: Vec<PointVec> = (0..m)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
            PointVec::new(vec![a * t.cos(), b * t.sin()])
        })
        .collect();
    make_polygon(&vertices)
}

/// Surface of the unit cube [0,1]^3, each face an m x m grid of square panels.
pub fn make_cube_surface(m: usize) -> Result<SurfaceMesh> {
    if m < 1 {
        return Err(Error::InvalidMesh("cube needs at least 1 cell per edge".into()));
    }
    let h = 1.0 / m as f64;
    let mut panels = Vec::with_capacity(6 * m * m);
    // (fixed axis, fixed value, outward normal sign)
    for (axis, value, sign) in
        [(0, 0.0, -1.0), (0, 1.0, 1.0), (1, 0.0, -1.0), (1, 1.0, 1.0), (2, 0.0, -1.0), (2, 1.0, 1.0)]
    {
        let (u_axis, v_axis) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for i in 0..m {
            for j in 0..m {
                let mut at = |u: f64, v: f64| {
                    let mut c = [0.0; 3];
                    c[axis] = value;
                    c[u_axis] = u;
                    c[v_axis] = v;
                    PointVec::new(c.to_vec())
                };
                let (u0, v0) = (h * i as f64, h * j as f64);
                let (u1, v1) = (u0 + h, v0 + h);
                let mut normal = [0.0; 3];
                normal[axis] = sign;
                panels.push(Panel {
                    centroid: at(0.5 * (u0 + u1), 0.5 * (v0 + v1)),
                    normal: PointVec::new(normal.to_vec()),
                    weight: h * h,
                    vertices: vec![at(u0, v0), at(u1, v0), at(u1, v1), at(u0, v1)],
                });
            }
        }
    }
    Ok(SurfaceMesh { n: 3, kind: MeshKind::Interior, panels })
}
