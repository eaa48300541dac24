//! Assembly of the dense boundary operator matrices.
//!
//! The principal value is discretized by dropping the self panel and
//! calibrating the diagonal: on closed meshes the scalar-to-scalar entry is
//! row-sum calibrated so that K 1 = 1 exactly (the discrete image of
//! C+ 1 = 1), on graph meshes it is 0 (the flat-boundary value); all other
//! diagonal blade entries are 0.
//!
//! Assembly is parallel over panel-column blocks; every matrix entry is
//! written exactly once and the diagonal calibration sums rows in ascending
//! panel order, so results are bit-identical for any thread count.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{OperatorLabel, OperatorMatrix};
use crate::algebra::{epsilon_masks, masks_of_grade, Multivector};
use crate::error::{Error, Result};
use crate::kernels::cauchy_kernel_coords;
use crate::geometry::SurfaceMesh;

/// All blade masks for dimension n.
pub fn all_blades(n: usize) -> Vec<u32> {
    (0..1u32 << n).collect()
}

fn position_table(n: usize, blades: &[u32]) -> Vec<Option<usize>> {
    let mut table = vec![None; 1 << n];
    for (i, &b) in blades.iter().enumerate() {
        table[b as usize] = Some(i);
    }
    table
}

/// Double layer kernel entry K_ij = 2 <E(y_j - x_i), nu_j> w_j, i != j.
fn k_entry(mesh: &SurfaceMesh, i: usize, j: usize) -> Result<f64> {
    let diff = mesh.panels[j].centroid.sub(&mesh.panels[i].centroid);
    let e = cauchy_kernel_coords(&diff).map_err(|_| {
        Error::InvalidMesh(format!("panels {i} and {j} have coincident centroids"))
    })?;
    let nu = mesh.panels[j].normal.coords();
    Ok(2.0 * mesh.panels[j].weight * e.iter().zip(nu).map(|(a, b)| a * b).sum::<f64>())
}

fn diagonal_scalar_entries(mesh: &SurfaceMesh) -> Result<Vec<f64>> {
    let m = mesh.panel_count();
    if !mesh.closed() {
        return Ok(vec![0.0; m]);
    }
    (0..m)
        .map(|i| {
            let mut sum = 0.0;
            for j in 0..m {
                if j != i {
                    sum += k_entry(mesh, i, j)?;
                }
            }
            Ok(1.0 - sum)
        })
        .collect()
}

enum KernelOp {
    /// f -> 2 w_j E(y_j - x_i) nu_j f
    Cauchy,
    /// f -> 2 w_j E(y_j - x_i) f-hat nu_j
    Rotation,
}

/// Assemble a blade-restricted block of E or EN.
fn assemble_kernel_block(
    mesh: &Arc<SurfaceMesh>,
    row_blades: Vec<u32>,
    col_blades: Vec<u32>,
    op: KernelOp,
    label: OperatorLabel,
) -> Result<OperatorMatrix> {
    let n = mesh.n;
    let m = mesh.panel_count();
    let (rb, cb) = (row_blades.len(), col_blades.len());
    let row_pos = position_table(n, &row_blades);
    let scalar_row = row_pos[0];
    let scalar_col = position_table(n, &col_blades)[0];
    let diag = diagonal_scalar_entries(mesh)?;

    // Check centroid separation up front so the parallel fill cannot fail.
    for i in 0..m {
        for j in i + 1..m {
            if mesh.panels[i].centroid.distance(&mesh.panels[j].centroid) < crate::kernels::SINGULAR_RADIUS {
                return Err(Error::InvalidMesh(format!("panels {i} and {j} have coincident centroids")));
            }
        }
    }

    let mut matrix = DMatrix::zeros(m * rb, m * cb);
    let nrows = m * rb;
    // Column block j occupies cb contiguous columns of the column-major store.
    matrix
        .as_mut_slice()
        .par_chunks_mut(nrows * cb)
        .enumerate()
        .for_each(|(j, cols)| {
            let pj = &mesh.panels[j];
            let nu = pj.normal.coords();
            for i in 0..m {
                if i == j {
                    // Diagonal convention: scalar-to-scalar entry only.
                    if let (Some(sr), Some(sc)) = (scalar_row, scalar_col) {
                        cols[sc * nrows + i * rb + sr] = diag[i];
                    }
                    continue;
                }
                let diff = pj.centroid.sub(&mesh.panels[i].centroid);
                let e = cauchy_kernel_coords(&diff).expect("separation checked above");
                let w2 = 2.0 * pj.weight;
                match op {
                    KernelOp::Cauchy => {
                        // g = 2 w E nu has grades 0 and 2; block is left
                        // multiplication by g.
                        let mut g = Multivector::zero(n);
                        for (a, &ea) in e.iter().enumerate() {
                            for (b, &nb) in nu.iter().enumerate() {
                                let (sa, sb) = (1u32 << a, 1u32 << b);
                                g.set_coeff_mask(
                                    sa ^ sb,
                                    g.coeff_mask(sa ^ sb) + w2 * ea * nb * epsilon_masks(sa, sb),
                                );
                            }
                        }
                        for (tj, &t) in col_blades.iter().enumerate() {
                            let col = &mut cols[tj * nrows..(tj + 1) * nrows];
                            for (s0, &gc) in g.coeffs().iter().enumerate() {
                                if gc == 0.0 {
                                    continue;
                                }
                                let s0 = s0 as u32;
                                if let Some(si) = row_pos[(s0 ^ t) as usize] {
                                    col[i * rb + si] += gc * epsilon_masks(s0, t);
                                }
                            }
                        }
                    }
                    KernelOp::Rotation => {
                        // f -> 2 w E f-hat nu, column by column over basis blades.
                        for (tj, &t) in col_blades.iter().enumerate() {
                            let col = &mut cols[tj * nrows..(tj + 1) * nrows];
                            let inv_sign = if t.count_ones() & 1 == 1 { -1.0 } else { 1.0 };
                            for (c, &nc) in nu.iter().enumerate() {
                                if nc == 0.0 {
                                    continue;
                                }
                                let cmask = 1u32 << c;
                                let tn = t ^ cmask;
                                let sign_tc = epsilon_masks(t, cmask);
                                for (a, &ea) in e.iter().enumerate() {
                                    let amask = 1u32 << a;
                                    if let Some(si) = row_pos[(amask ^ tn) as usize] {
                                        col[i * rb + si] += w2
                                            * inv_sign
                                            * ea
                                            * nc
                                            * sign_tc
                                            * epsilon_masks(amask, tn);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        });

    Ok(OperatorMatrix { mesh: mesh.clone(), label, row_blades, col_blades, matrix })
}

/// The principal value Cauchy integral E on all of L2(Sigma; /\).
pub fn assemble_cauchy_pv(mesh: &Arc<SurfaceMesh>) -> Result<OperatorMatrix> {
    let blades = all_blades(mesh.n);
    assemble_kernel_block(mesh, blades.clone(), blades, KernelOp::Cauchy, OperatorLabel::CauchyE)
}

/// Blade-restricted block of E (rows and columns limited to the given masks).
pub fn assemble_cauchy_block(
    mesh: &Arc<SurfaceMesh>,
    row_blades: Vec<u32>,
    col_blades: Vec<u32>,
) -> Result<OperatorMatrix> {
    assemble_kernel_block(mesh, row_blades, col_blades, KernelOp::Cauchy, OperatorLabel::CauchyE)
}

/// Grade k -> grade k block of E.
pub fn assemble_cauchy_grade_block(mesh: &Arc<SurfaceMesh>, k: usize) -> Result<OperatorMatrix> {
    let blades = masks_of_grade(mesh.n, k);
    assemble_cauchy_block(mesh, blades.clone(), blades)
}

/// The scalar double layer potential K: the grade-0 block of E.
pub fn assemble_double_layer(mesh: &Arc<SurfaceMesh>) -> Result<OperatorMatrix> {
    let mut op = assemble_kernel_block(mesh, vec![0], vec![0], KernelOp::Cauchy, OperatorLabel::DoubleLayerK)?;
    op.label = OperatorLabel::DoubleLayerK;
    Ok(op)
}

/// The rotation operator EN f(x) = 2 p.v. int E(y-x) f-hat(y) nu(y) dsigma,
/// assembled directly from the kernel (not as a product of E and N).
pub fn assemble_rotation(mesh: &Arc<SurfaceMesh>) -> Result<OperatorMatrix> {
    let blades = all_blades(mesh.n);
    assemble_kernel_block(mesh, blades.clone(), blades, KernelOp::Rotation, OperatorLabel::RotationEN)
}

/// Assemble a pointwise (block diagonal) operator from its action on blades.
fn assemble_pointwise(
    mesh: &Arc<SurfaceMesh>,
    label: OperatorLabel,
    action: impl Fn(&Multivector, &Multivector) -> Multivector + Sync,
) -> OperatorMatrix {
    let n = mesh.n;
    let m = mesh.panel_count();
    let b = 1usize << n;
    let mut matrix = DMatrix::zeros(m * b, m * b);
    for (i, panel) in mesh.panels.iter().enumerate() {
        let nu = panel.normal.to_multivector();
        for t in 0..b {
            let image = action(&nu, &Multivector::basis_blade(crate::algebra::Blade::from_mask(
                n,
                t as u32,
            )));
            for (s, &c) in image.coeffs().iter().enumerate() {
                if c != 0.0 {
                    matrix[(i * b + s, i * b + t)] = c;
                }
            }
        }
    }
    OperatorMatrix {
        mesh: mesh.clone(),
        label,
        row_blades: all_blades(n),
        col_blades: all_blades(n),
        matrix,
    }
}

/// The reflection N f = nu f-hat nu.
pub fn assemble_normal_reflection(mesh: &Arc<SurfaceMesh>) -> OperatorMatrix {
    assemble_pointwise(mesh, OperatorLabel::ReflectionN, |nu, f| {
        nu.clifford(&f.involution()).clifford(nu)
    })
}

/// The tangential and normal projections
/// N+ g = nu _| (nu ^ g) and N- g = nu ^ (nu _| g).
pub fn tangential_normal_projections(mesh: &Arc<SurfaceMesh>) -> (OperatorMatrix, OperatorMatrix) {
    let plus = assemble_pointwise(mesh, OperatorLabel::ProjTangential, |nu, f| {
        nu.interior_left(&nu.exterior(f))
    });
    let minus = assemble_pointwise(mesh, OperatorLabel::ProjNormal, |nu, f| {
        nu.exterior(&nu.interior_left(f))
    });
    (plus, minus)
}

/// Hardy projection E+/- = (I +/- E) / 2 from an assembled E.
pub fn hardy_projection(e: &OperatorMatrix, sign: f64) -> OperatorMatrix {
    assert!(sign == 1.0 || sign == -1.0, "sign must be +/- 1");
    let id = OperatorMatrix::identity(e.mesh.clone(), e.row_blades.clone());
    let mut out = id.add(&e.scale(sign)).scale(0.5);
    out.label = if sign > 0.0 { OperatorLabel::HardyPlus } else { OperatorLabel::HardyMinus };
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary_ops::BoundaryField;
    use crate::geometry::{make_circle, make_graph_curve, make_sphere};
    use crate::kernels::{unit_sphere_area, PointVec};
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn frob(m: &nalgebra::DMatrix<f64>) -> f64 {
        m.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    #[test]
    fn flat_graph_k_is_exactly_zero() {
        let mesh = Arc::new(make_graph_curve(&|_| 0.0, 10.0, 64).unwrap());
        let k = assemble_double_layer(&mesh).unwrap();
        for v in k.matrix.iter() {
            assert!(v.abs() <= 1e-15, "entry {v}");
        }
    }

    #[test]
    fn flat_graph_scalar_block_of_full_e_is_zero() {
        let mesh = Arc::new(make_graph_curve(&|_| 0.0, 10.0, 32).unwrap());
        let e = assemble_cauchy_pv(&mesh).unwrap();
        let block = e.grade_block(0, 0);
        assert_eq!(frob(&block.matrix), 0.0);
    }

    #[test]
    fn disk_mean_value_law() {
        let mesh = Arc::new(make_circle(256).unwrap());
        let k = assemble_double_layer(&mesh).unwrap();
        for (name, f) in [
            ("1", Box::new(|_: f64| 1.0) as Box<dyn Fn(f64) -> f64>),
            ("cos t", Box::new(|t: f64| t.cos())),
            ("cos 3t", Box::new(|t: f64| (3.0 * t).cos())),
        ] {
            let u = BoundaryField::from_scalar_fn(mesh.clone(), |c| f(c.coord(1).atan2(c.coord(0))));
            let ku = k.apply(&u);
            let mean = u.values().iter().zip(&mesh.panels).map(|(v, p)| v.coeff_mask(0) * p.weight).sum::<f64>()
                / mesh.total_weight();
            let err = ku
                .values()
                .iter()
                .map(|v| (v.coeff_mask(0) - mean).abs())
                .fold(0.0f64, f64::max);
            assert!(err <= 5e-2, "{name}: sup error {err:.3e}");
        }
    }

    #[test]
    fn sphere_kernel_closed_form() {
        // Example kernel on the unit sphere: off-diagonal K entries must
        // match 2 w_j / (2^{n/2} sigma_{n-1} (1 - <x_i, y_j>)^{n/2 - 1}).
        let mesh = Arc::new(make_sphere(2).unwrap());
        let k = assemble_double_layer(&mesh).unwrap();
        let sigma = unit_sphere_area(3).unwrap();
        let m = mesh.panel_count();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let dot = mesh.panels[i].centroid.dot(&mesh.panels[j].centroid);
                let expect = 2.0 * mesh.panels[j].weight
                    / (2f64.powf(1.5) * sigma * (1.0 - dot).sqrt());
                let rel = (k.matrix[(i, j)] - expect).abs() / expect.abs();
                worst = worst.max(rel);
            }
        }
        assert!(worst <= 1e-10, "worst relative error {worst:.3e}");
    }

    #[test]
    fn reflection_squares_to_identity() {
        for mesh in [Arc::new(make_circle(32).unwrap()), Arc::new(make_sphere(0).unwrap())] {
            let n_op = assemble_normal_reflection(&mesh);
            let id = OperatorMatrix::identity(mesh.clone(), all_blades(mesh.n));
            let res = n_op.compose(&n_op).sub(&id);
            assert!(frob(&res.matrix) / frob(&id.matrix) < 1e-14);
        }
    }

    #[test]
    fn reflection_on_flat_boundary_fixes_tangent() {
        // nu = -e2, f = e1: N f = nu (-e1) nu = e1.
        let mesh = Arc::new(make_graph_curve(&|_| 0.0, 4.0, 8).unwrap());
        let n_op = assemble_normal_reflection(&mesh);
        let f = BoundaryField::from_fn(mesh.clone(), |_| Multivector::basis_vector(2, 1));
        let nf = n_op.apply(&f);
        for v in nf.values() {
            assert_eq!(v, &Multivector::basis_vector(2, 1));
        }
    }

    #[test]
    fn projections_sum_split_and_reflect() {
        let mesh = Arc::new(make_sphere(0).unwrap());
        let (np, nm) = tangential_normal_projections(&mesh);
        let n_op = assemble_normal_reflection(&mesh);
        let id = OperatorMatrix::identity(mesh.clone(), all_blades(3));
        let scale = frob(&id.matrix);
        // N+ + N- = I, N+ N- = 0, (N+)^2 = N+, N+ - N- = N.
        assert!(frob(&np.add(&nm).sub(&id).matrix) / scale < 1e-14);
        assert!(frob(&np.compose(&nm).matrix) / scale < 1e-14);
        assert!(frob(&np.compose(&np).sub(&np).matrix) / scale < 1e-14);
        assert!(frob(&np.sub(&nm).sub(&n_op).matrix) / scale < 1e-14);
    }

    #[test]
    fn reflection_blade_identity_brute_force() {
        // nu f-hat nu = nu _| (nu ^ f) - nu ^ (nu _| f) for unit vectors,
        // checked over the whole basis for n <= 4.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in 2..=4 {
            for _ in 0..20 {
                let coords: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
                let nu = Multivector::from_vector(
                    &coords.iter().map(|c| c / norm).collect::<Vec<_>>(),
                );
                for mask in 0..1u32 << n {
                    let f = Multivector::basis_blade(crate::algebra::Blade::from_mask(n, mask));
                    let lhs = nu.clifford(&f.involution()).clifford(&nu);
                    let rhs = &nu.interior_left(&nu.exterior(&f)) - &nu.exterior(&nu.interior_left(&f));
                    assert!((&lhs - &rhs).is_zero(1e-13), "n={n} mask={mask:#b}");
                }
            }
        }
    }

    #[test]
    fn rotation_direct_matches_product() {
        for mesh in [Arc::new(make_circle(24).unwrap()), Arc::new(make_sphere(0).unwrap())] {
            let en_direct = assemble_rotation(&mesh).unwrap();
            let e = assemble_cauchy_pv(&mesh).unwrap();
            let n_op = assemble_normal_reflection(&mesh);
            let en_product = e.compose(&n_op);
            let rel = frob(&en_direct.sub(&en_product).matrix) / frob(&en_product.matrix);
            assert!(rel < 1e-12, "direct vs product: {rel:.3e}");
        }
    }

    #[test]
    fn rotation_projection_identities_exact() {
        for mesh in [Arc::new(make_circle(16).unwrap()), Arc::new(make_sphere(0).unwrap())] {
            let e = assemble_cauchy_pv(&mesh).unwrap();
            let n_op = assemble_normal_reflection(&mesh);
            let en = e.compose(&n_op);
            let id = OperatorMatrix::identity(mesh.clone(), all_blades(mesh.n));
            let (np, nm) = tangential_normal_projections(&mesh);
            let ep = hardy_projection(&e, 1.0);
            let em = hardy_projection(&e, -1.0);
            let scale = frob(&id.add(&en).matrix);
            // I + EN = 2 (E+ N+ + E- N-), I - EN = 2 (E+ N- + E- N+).
            let lhs = id.add(&en);
            let rhs = ep.compose(&np).add(&em.compose(&nm)).scale(2.0);
            assert!(frob(&lhs.sub(&rhs).matrix) / scale < 1e-13);
            let lhs = id.sub(&en);
            let rhs = ep.compose(&nm).add(&em.compose(&np)).scale(2.0);
            assert!(frob(&lhs.sub(&rhs).matrix) / scale < 1e-13);
        }
    }

    #[test]
    fn hardy_projections_partition_identity() {
        let mesh = Arc::new(make_circle(64).unwrap());
        let e = assemble_cauchy_pv(&mesh).unwrap();
        let ep = hardy_projection(&e, 1.0);
        let em = hardy_projection(&e, -1.0);
        let id = OperatorMatrix::identity(mesh.clone(), all_blades(2));
        assert_eq!(ep.add(&em).matrix, id.matrix);
        // E+ E- = (I - E^2)/4 exactly.
        let lhs = ep.compose(&em);
        let rhs = id.sub(&e.compose(&e)).scale(0.25);
        let rel = frob(&lhs.sub(&rhs).matrix) / frob(&rhs.matrix);
        assert!(rel < 1e-12);
    }

    #[test]
    fn e_squared_close_to_identity_and_improves() {
        let mut residuals = Vec::new();
        for m in [64, 128, 256] {
            let mesh = Arc::new(make_circle(m).unwrap());
            let e = assemble_cauchy_pv(&mesh).unwrap();
            let e2 = e.compose(&e);
            // Band-limited random fields: white noise sees the O(1) defect
            // of any fixed-order p.v. discretization at the grid scale.
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let mut worst = 0.0f64;
            for _ in 0..10 {
                let coefs: Vec<(usize, u32, f64, f64)> = (0..=4)
                    .flat_map(|k| {
                        (0..4u32).map(|b| (k, b, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect::<Vec<_>>()
                    })
                    .collect();
                let f = BoundaryField::from_fn(mesh.clone(), |c| {
                    let t = c.coord(1).atan2(c.coord(0));
                    let mut v = Multivector::zero(2);
                    for &(k, b, a, ph) in &coefs {
                        v.set_coeff_mask(b, v.coeff_mask(b) + a * (k as f64 * t + ph).cos());
                    }
                    v
                });
                let diff = e2.apply(&f).sub(&f);
                worst = worst.max(diff.norm() / f.norm());
            }
            residuals.push(worst);
        }
        assert!(residuals[2] <= 0.1, "residual at m=256: {:.3}", residuals[2]);
        assert!(residuals[0] > residuals[1] && residuals[1] > residuals[2], "{residuals:?}");
    }

    #[test]
    fn disk_cauchy_closed_form_on_trig_densities() {
        // On the unit circle E(cos mt) = sin(mt) e12 (scalar part is the
        // mean, zero for m >= 1).
        let mesh = Arc::new(make_circle(512).unwrap());
        let e = assemble_cauchy_pv(&mesh).unwrap();
        for mode in 1..=3 {
            let u = BoundaryField::from_scalar_fn(mesh.clone(), |c| {
                (mode as f64 * c.coord(1).atan2(c.coord(0))).cos()
            });
            let expect = BoundaryField::from_fn(mesh.clone(), |c| {
                let t = c.coord(1).atan2(c.coord(0));
                let mut v = Multivector::zero(2);
                v.set_coeff_mask(0b11, (mode as f64 * t).sin());
                v
            });
            let got = e.apply(&u);
            let err = got.sub(&expect).norm() / expect.norm();
            assert!(err <= 1e-2, "mode {mode}: {err:.3e}");
        }
    }

    #[test]
    fn hardy_plus_fixes_interior_hardy_data() {
        // h = trace of E(. - p), p outside: an interior monogenic field, so
        // E+ h = h up to quadrature error.
        let mesh = Arc::new(make_circle(256).unwrap());
        let p = PointVec::new(vec![0.0, 1.5]);
        let h = BoundaryField::from_fn(mesh.clone(), |c| {
            crate::kernels::cauchy_kernel(&c.sub(&p)).unwrap()
        });
        let e = assemble_cauchy_pv(&mesh).unwrap();
        let ep = hardy_projection(&e, 1.0);
        let err = ep.apply(&h).sub(&h).norm() / h.norm();
        assert!(err < 5e-3, "E+ h vs h: {err:.3e}");
    }

    #[test]
    fn coincident_centroids_rejected() {
        let mut mesh = make_circle(8).unwrap();
        let p = mesh.panels[0].clone();
        mesh.panels[4] = p;
        let mesh = Arc::new(mesh);
        assert!(matches!(assemble_double_layer(&mesh), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn dimension_of_grade_blocks() {
        let mesh = Arc::new(make_sphere(0).unwrap());
        let block = assemble_cauchy_grade_block(&mesh, 1).unwrap();
        assert_eq!(block.nrows(), 20 * 3);
        assert_eq!(block.ncols(), 20 * 3);
        // Matches the block carved out of the full operator.
        let e = assemble_cauchy_pv(&mesh).unwrap();
        let carved = e.grade_block(1, 1);
        assert_eq!(block.matrix, carved.matrix);
    }
}
