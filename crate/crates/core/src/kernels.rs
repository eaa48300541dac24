//! Closed-form kernels: the Cauchy kernel E(x), the Laplace fundamental
//! solution, unit-sphere areas and the analytic Jacobian of E.

use crate::algebra::Multivector;
use crate::error::{Error, Result};

/// Points closer to the origin than this are treated as singular.
pub const SINGULAR_RADIUS: f64 = 1e-13;

/// A point of R^n, also viewable as a grade-1 multivector.
#[derive(Debug, Clone, PartialEq)]
pub struct PointVec {
    coords: Vec<f64>,
}

impl PointVec {
    pub fn new(coords: Vec<f64>) -> Self {
        assert!(!coords.is_empty(), "point needs at least one coordinate");
        assert!(coords.iter().all(|c| c.is_finite()), "point coordinates must be finite");
        PointVec { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        PointVec { coords: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.coords[i]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "point dimension mismatch");
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "point dimension mismatch");
        PointVec { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "point dimension mismatch");
        PointVec { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        PointVec { coords: self.coords.iter().map(|c| c * s).collect() }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "point dimension mismatch");
        PointVec { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + s * b).collect() }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).norm()
    }

    pub fn to_multivector(&self) -> Multivector {
        Multivector::from_vector(&self.coords)
    }

    pub fn normalize(&self) -> Self {
        self.scale(1.0 / self.norm())
    }
}

impl From<&[f64]> for PointVec {
    fn from(coords: &[f64]) -> Self {
        PointVec::new(coords.to_vec())
    }
}

/// Gamma(k) for integer and half-integer arguments, exact up to rounding.
fn gamma_half(twice_arg: usize) -> f64 {
    // twice_arg = 2k so the argument is k = twice_arg / 2.
    let mut g;
    let mut x;
    if twice_arg % 2 == 0 {
        g = 1.0; // Gamma(1)
        x = 1.0;
    } else {
        g = std::f64::consts::PI.sqrt(); // Gamma(1/2)
        x = 0.5;
    }
    let target = twice_arg as f64 / 2.0;
    while x + 0.5 < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// Area of the unit sphere S^{n-1} in R^n: sigma_{n-1} = 2 pi^{n/2} / Gamma(n/2).
pub fn unit_sphere_area(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let pi = std::f64::consts::PI;
    Ok(2.0 * pi.powf(n as f64 / 2.0) / gamma_half(n))
}

fn check_regular(x: &PointVec) -> Result<f64> {
    let r = x.norm();
    if r < SINGULAR_RADIUS {
        Err(Error::SingularEvaluation(r))
    } else {
        Ok(r)
    }
}

/// The Cauchy kernel E(x) = x / (sigma_{n-1} |x|^n) as a grade-1 multivector.
pub fn cauchy_kernel(x: &PointVec) -> Result<Multivector> {
    let r = check_regular(x)?;
    let n = x.dim();
    let sigma = unit_sphere_area(n)?;
    Ok(x.to_multivector().scale(1.0 / (sigma * r.powi(n as i32))))
}

/// Kernel coordinates without the multivector wrapper; hot-path helper.
pub fn cauchy_kernel_coords(x: &PointVec) -> Result<Vec<f64>> {
    let r = check_regular(x)?;
    let n = x.dim();
    let sigma = unit_sphere_area(n)?;
    let s = 1.0 / (sigma * r.powi(n as i32));
    Ok(x.coords().iter().map(|c| c * s).collect())
}

/// Fundamental solution of the Laplacian with E(x) = grad Phi(x):
/// Phi = log|x| / (2 pi) for n = 2 and -1/((n-2) sigma_{n-1} |x|^{n-2}) for n >= 3.
pub fn laplace_fundamental(x: &PointVec) -> Result<f64> {
    let r = check_regular(x)?;
    let n = x.dim();
    let sigma = unit_sphere_area(n)?;
    if n == 2 {
        Ok(r.ln() / sigma)
    } else {
        Ok(-1.0 / ((n as f64 - 2.0) * sigma * r.powi(n as i32 - 2)))
    }
}

/// Analytic Jacobian d_j E_i(x) = (delta_ij |x|^2 - n x_i x_j) / (sigma_{n-1} |x|^{n+2}),
/// returned row-major as J[i][j].
pub fn cauchy_kernel_jacobian(x: &PointVec) -> Result<Vec<Vec<f64>>> {
    let r = check_regular(x)?;
    let n = x.dim();
    let sigma = unit_sphere_area(n)?;
    let r2 = r * r;
    let denom = sigma * r.powi(n as i32 + 2);
    let mut jac = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { r2 } else { 0.0 };
            // x_i * x_j first: IEEE multiplication commutes, so the matrix
            // comes out exactly symmetric.
            jac[i][j] = (delta - n as f64 * (x.coord(i) * x.coord(j))) / denom;
        }
    }
    Ok(jac)
}
