//! Dense Nystrom discretization of the boundary operators: the principal
//! value Cauchy integral E, the Hardy projections E+/E-, the double layer
//! potential K, the reflection N with its tangential/normal projections,
//! the rotation EN, and off-boundary Cauchy extensions.
//!
//! Stacked coefficient layout: degree of freedom `panel * B + b` is the
//! coefficient of blade `blades[b]` on that panel, with `blades` the
//! ascending list of included blade masks.

mod assemble;
mod dump;
mod extend;

pub use assemble::*;
pub use dump::*;
pub use extend::*;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::{masks_of_grade, Multivector};
use crate::error::{Error, Result};
use crate::geometry::SurfaceMesh;

/// One multivector value per panel: the discrete stand-in for L2(Sigma).
#[derive(Debug, Clone)]
pub struct BoundaryField {
    mesh: Arc<SurfaceMesh>,
    values: Vec<Multivector>,
}

impl BoundaryField {
    pub fn new(mesh: Arc<SurfaceMesh>, values: Vec<Multivector>) -> Self {
        assert_eq!(values.len(), mesh.panel_count(), "one value per panel");
        assert!(values.iter().all(|v| v.dim() == mesh.n), "value dimension must match mesh");
        BoundaryField { mesh, values }
    }

    pub fn zeros(mesh: Arc<SurfaceMesh>) -> Self {
        let n = mesh.n;
        let values = vec![Multivector::zero(n); mesh.panel_count()];
        BoundaryField { mesh, values }
    }

    /// Field from a function of the panel centroid.
    pub fn from_fn(mesh: Arc<SurfaceMesh>, f: impl Fn(&crate::kernels::PointVec) -> Multivector) -> Self {
        let values = mesh.panels.iter().map(|p| f(&p.centroid)).collect();
        BoundaryField::new(mesh, values)
    }

    pub fn from_scalar_fn(mesh: Arc<SurfaceMesh>, f: impl Fn(&crate::kernels::PointVec) -> f64) -> Self {
        let n = mesh.n;
        BoundaryField::from_fn(mesh, |c| Multivector::scalar(n, f(c)))
    }

    pub fn mesh(&self) -> &Arc<SurfaceMesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[Multivector] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &Multivector {
        &self.values[i]
    }

    pub fn value_mut(&mut self, i: usize) -> &mut Multivector {
        &mut self.values[i]
    }

    pub fn map(&self, f: impl Fn(usize, &Multivector) -> Multivector) -> Self {
        let values = self.values.iter().enumerate().map(|(i, v)| f(i, v)).collect();
        BoundaryField::new(self.mesh.clone(), values)
    }

    pub fn grade(&self, k: usize) -> Self {
        self.map(|_, v| v.grade(k))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|_, v| v.scale(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(Arc::ptr_eq(&self.mesh, &other.mesh) || self.mesh == other.mesh);
        self.map(|i, v| v + &other.values[i])
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert!(Arc::ptr_eq(&self.mesh, &other.mesh) || self.mesh == other.mesh);
        self.map(|i, v| v - &other.values[i])
    }

    /// Weighted L2 norm: ||f||^2 = sum_i |f_i|^2 w_i.
    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .zip(&self.mesh.panels)
            .map(|((a, b), p)| a.scalar_product(b) * p.weight)
            .sum()
    }

    /// Stack the coefficients of the listed blades into a vector.
    pub fn to_stacked(&self, blades: &[u32]) -> DVector<f64> {
        let b = blades.len();
        let mut out = DVector::zeros(self.values.len() * b);
        for (i, v) in self.values.iter().enumerate() {
            for (j, &mask) in blades.iter().enumerate() {
                out[i * b + j] = v.coeff_mask(mask);
            }
        }
        out
    }

    pub fn from_stacked(mesh: Arc<SurfaceMesh>, blades: &[u32], x: &DVector<f64>) -> Self {
        let b = blades.len();
        assert_eq!(x.len(), mesh.panel_count() * b);
        let n = mesh.n;
        let values = (0..mesh.panel_count())
            .map(|i| {
                let mut v = Multivector::zero(n);
                for (j, &mask) in blades.iter().enumerate() {
                    v.set_coeff_mask(mask, x[i * b + j]);
                }
                v
            })
            .collect();
        BoundaryField::new(mesh, values)
    }
}

/// Which operator a matrix discretizes; fixes the expected identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OperatorLabel {
    CauchyE,
    HardyPlus,
    HardyMinus,
    DoubleLayerK,
    ReflectionN,
    ProjTangential,
    ProjNormal,
    RotationEN,
    Identity,
    Derived,
}

impl OperatorLabel {
    pub fn tag(&self) -> &'static str {
        match self {
            OperatorLabel::CauchyE => "E",
            OperatorLabel::HardyPlus => "EPLUS",
            OperatorLabel::HardyMinus => "EMINUS",
            OperatorLabel::DoubleLayerK => "K",
            OperatorLabel::ReflectionN => "N",
            OperatorLabel::ProjTangential => "NPLUS",
            OperatorLabel::ProjNormal => "NMINUS",
            OperatorLabel::RotationEN => "EN",
            OperatorLabel::Identity => "I",
            OperatorLabel::Derived => "DERIVED",
        }
    }
}

/// Dense linear map on stacked boundary-field coefficients.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub mesh: Arc<SurfaceMesh>,
    pub label: OperatorLabel,
    /// Blade masks included in rows and columns, ascending.
    pub row_blades: Vec<u32>,
    pub col_blades: Vec<u32>,
    pub matrix: DMatrix<f64>,
}

impl OperatorMatrix {
    pub fn identity(mesh: Arc<SurfaceMesh>, blades: Vec<u32>) -> Self {
        let dim = mesh.panel_count() * blades.len();
        OperatorMatrix {
            mesh,
            label: OperatorLabel::Identity,
            row_blades: blades.clone(),
            col_blades: blades,
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn apply(&self, f: &BoundaryField) -> BoundaryField {
        let x = f.to_stacked(&self.col_blades);
        let y = &self.matrix * x;
        BoundaryField::from_stacked(self.mesh.clone(), &self.row_blades, &y)
    }

    /// Composition `self o other`.
    pub fn compose(&self, other: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.col_blades, other.row_blades, "blade sets do not chain");
        OperatorMatrix {
            mesh: self.mesh.clone(),
            label: OperatorLabel::Derived,
            row_blades: self.row_blades.clone(),
            col_blades: other.col_blades.clone(),
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn add(&self, other: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.row_blades, other.row_blades);
        assert_eq!(self.col_blades, other.col_blades);
        OperatorMatrix {
            mesh: self.mesh.clone(),
            label: OperatorLabel::Derived,
            row_blades: self.row_blades.clone(),
            col_blades: self.col_blades.clone(),
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.row_blades, other.row_blades);
        assert_eq!(self.col_blades, other.col_blades);
        OperatorMatrix {
            mesh: self.mesh.clone(),
            label: OperatorLabel::Derived,
            row_blades: self.row_blades.clone(),
            col_blades: self.col_blades.clone(),
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn scale(&self, s: f64) -> OperatorMatrix {
        OperatorMatrix {
            mesh: self.mesh.clone(),
            label: OperatorLabel::Derived,
            row_blades: self.row_blades.clone(),
            col_blades: self.col_blades.clone(),
            matrix: self.matrix.scale(s),
        }
    }

    /// Extract the sub-block acting grade -> grade.
    pub fn grade_block(&self, row_grade: usize, col_grade: usize) -> OperatorMatrix {
        let n = self.mesh.n;
        let row_sel = masks_of_grade(n, row_grade);
        let col_sel = masks_of_grade(n, col_grade);
        let rb = self.row_blades.len();
        let cb = self.col_blades.len();
        let row_pos: Vec<usize> = row_sel
            .iter()
            .map(|m| self.row_blades.iter().position(|x| x == m).expect("row grade not present"))
            .collect();
        let col_pos: Vec<usize> = col_sel
            .iter()
            .map(|m| self.col_blades.iter().position(|x| x == m).expect("col grade not present"))
            .collect();
        let m = self.mesh.panel_count();
        let mut out = DMatrix::zeros(m * row_sel.len(), m * col_sel.len());
        for i in 0..m {
            for (si, &sp) in row_pos.iter().enumerate() {
                for j in 0..m {
                    for (tj, &tp) in col_pos.iter().enumerate() {
                        out[(i * row_sel.len() + si, j * col_sel.len() + tj)] =
                            self.matrix[(i * rb + sp, j * cb + tp)];
                    }
                }
            }
        }
        OperatorMatrix {
            mesh: self.mesh.clone(),
            label: OperatorLabel::Derived,
            row_blades: row_sel,
            col_blades: col_sel,
            matrix: out,
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.matrix.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Diagnostics for every linear solve; the residual is always recomputed
/// from the returned solution, never taken from solver internals.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub unknowns: usize,
    /// ||A x - b|| / ||b|| recomputed post hoc (weighted norm).
    pub residual: f64,
    pub condition: Option<f64>,
    /// Truncation rank of an SVD solve.
    pub rank: Option<usize>,
    pub singular_values_used: Option<usize>,
    pub singular_values_discarded: Option<usize>,
    pub smallest_kept_singular_value: Option<f64>,
    pub largest_singular_value: Option<f64>,
    /// Compatibility defect of the data, e.g. |int u psi| on exterior domains.
    pub compatibility_defect: Option<f64>,
}

impl SolveReport {
    pub fn new(unknowns: usize, residual: f64) -> Self {
        SolveReport {
            unknowns,
            residual,
            condition: None,
            rank: None,
            singular_values_used: None,
            singular_values_discarded: None,
            smallest_kept_singular_value: None,
            largest_singular_value: None,
            compatibility_defect: None,
        }
    }
}

/// Validate that a point is usable as an off-surface evaluation point.
pub fn require_off_surface(mesh: &SurfaceMesh, x: &crate::kernels::PointVec) -> Result<(usize, f64)> {
    let (idx, dist) = mesh.closest_panel(x);
    let panel_size = mesh.panels[idx].diameter();
    if dist < 0.1 * panel_size {
        return Err(Error::NearSingular { dist, panel: panel_size });
    }
    Ok((idx, dist))
}
