//! Off-boundary Cauchy extensions C+/- h, their grade splitting, analytic
//! derivatives, and the Rellich identity check.

use nalgebra::DMatrix;

use super::{require_off_surface, BoundaryField};
use crate::algebra::Multivector;
use crate::error::{Error, Result};
use crate::geometry::{refine_near_tracked, MeshKind, Side, SurfaceMesh};
use crate::kernels::{cauchy_kernel, cauchy_kernel_jacobian, PointVec};

/// Refine the mesh near `x` until every panel's diameter is at most a third
/// of its distance to `x`; children index their original panel so the
/// piecewise-constant density carries over.
fn refine_for_point(mesh: &SurfaceMesh, x: &PointVec) -> (SurfaceMesh, Vec<usize>) {
    let refined = refine_near_tracked(mesh, x, 24);
    (refined.mesh, refined.parent)
}

/// Cauchy extension C+/- h(x) = +/- sum_j E(y_j - x) nu_j h_j w_j with
/// near-singular refinement. Refuses points within a tenth of the local
/// panel size of the surface.
pub fn cauchy_extend(h: &BoundaryField, x: &PointVec, side: Side) -> Result<Multivector> {
    let mesh = h.mesh();
    require_off_surface(mesh, x)?;
    let (fine, parent) = refine_for_point(mesh, x);
    let n = mesh.n;
    let mut sum = Multivector::zero(n);
    for (panel, &pa) in fine.panels.iter().zip(&parent) {
        let e = cauchy_kernel(&panel.centroid.sub(x))?;
        let term = e.clifford(&panel.normal.to_multivector()).clifford(h.value(pa));
        sum.axpy(panel.weight, &term);
    }
    Ok(sum.scale(side.sign()))
}

/// Grade splitting of the extension of a grade-k density:
/// (V1, U, V2) = ((C h)_{k-2}, (C h)_k, (C h)_{k+2}).
pub fn cauchy_extend_grades(
    h: &BoundaryField,
    k: usize,
    x: &PointVec,
    side: Side,
) -> Result<(Multivector, Multivector, Multivector)> {
    let n = h.mesh().n;
    let full = cauchy_extend(h, x, side)?;
    let v1 = if k >= 2 { full.grade(k - 2) } else { Multivector::zero(n) };
    let v2 = if k + 2 <= n { full.grade(k + 2) } else { Multivector::zero(n) };
    Ok((v1, full.grade(k), v2))
}

/// Analytic derivatives (dF, deltaF) of the extension F = C+/- h at x, via
/// the closed-form Jacobian of the Cauchy kernel.
pub fn cauchy_extend_derivative(
    h: &BoundaryField,
    x: &PointVec,
    side: Side,
) -> Result<(Multivector, Multivector)> {
    let mesh = h.mesh();
    require_off_surface(mesh, x)?;
    let (fine, parent) = refine_for_point(mesh, x);
    let n = mesh.n;
    let mut df = Multivector::zero(n);
    let mut delta_f = Multivector::zero(n);
    for (panel, &pa) in fine.panels.iter().zip(&parent) {
        let jac = cauchy_kernel_jacobian(&panel.centroid.sub(x))?;
        let nu_h = panel.normal.to_multivector().clifford(h.value(pa));
        for l in 0..n {
            // d/dx_l of E(y - x) is minus the kernel Jacobian column l.
            let col: Vec<f64> = (0..n).map(|i| -jac[i][l]).collect();
            let term = Multivector::from_vector(&col).clifford(&nu_h);
            let e_l = Multivector::basis_vector(n, l + 1);
            df.axpy(panel.weight, &e_l.exterior(&term));
            delta_f.axpy(panel.weight, &e_l.interior_left(&term));
        }
    }
    Ok((df.scale(side.sign()), delta_f.scale(side.sign())))
}

/// Both sides of the Rellich identity for the trace f of a monogenic field
/// on a graph mesh, with a constant transversal field theta (so the volume
/// term vanishes): lhs = int |f|^2 <nu, theta>, rhs = -2 int <nu _| f, f-hat theta>.
pub struct RellichCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

pub fn rellich_check(f: &BoundaryField, theta: &PointVec) -> Result<RellichCheck> {
    let mesh = f.mesh();
    if mesh.kind != MeshKind::Graph {
        return Err(Error::Unsupported("Rellich check needs a graph mesh".into()));
    }
    let theta_mv = theta.to_multivector();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for (panel, value) in mesh.panels.iter().zip(f.values()) {
        let nu = panel.normal.to_multivector();
        lhs += value.norm_sq() * panel.normal.dot(theta) * panel.weight;
        let inner = nu.interior_left(value).scalar_product(&value.involution().clifford(&theta_mv));
        rhs += -2.0 * inner * panel.weight;
    }
    let residual = (lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE);
    Ok(RellichCheck { lhs, rhs, residual })
}

/// Dense matrix of the map h -> trace of (C side h) restricted to blade
/// lists, evaluated at probe points rather than by jump relations. Used by
/// tests; the boundary trace itself is E+/-.
pub fn extension_matrix_at_points(
    h_mesh: &SurfaceMesh,
    points: &[PointVec],
    side: Side,
    row_blades: &[u32],
    col_blades: &[u32],
) -> Result<DMatrix<f64>> {
    let n = h_mesh.n;
    let rb = row_blades.len();
    let cb = col_blades.len();
    let mut out = DMatrix::zeros(points.len() * rb, h_mesh.panel_count() * cb);
    for (pi, x) in points.iter().enumerate() {
        let refined = refine_near_tracked(h_mesh, x, 24);
        for (panel, &pa) in refined.mesh.panels.iter().zip(&refined.parent) {
            let e = cauchy_kernel(&panel.centroid.sub(x))?;
            let g = e.clifford(&panel.normal.to_multivector()).scale(side.sign() * panel.weight);
            for (tj, &t) in col_blades.iter().enumerate() {
                let image = g.clifford(&Multivector::basis_blade(crate::algebra::Blade::from_mask(
                    n, t,
                )));
                for (si, &s) in row_blades.iter().enumerate() {
                    out[(pi * rb + si, pa * cb + tj)] += image.coeff_mask(s);
                }
            }
        }
    }
    Ok(out)
}
