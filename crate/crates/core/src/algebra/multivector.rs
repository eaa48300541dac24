use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use super::{epsilon_masks, Blade, GradeRange, MAX_DIM};

/// Element of the exterior algebra of R^n: 2^n real coefficients, one per
/// basis blade, stored dense in ascending mask order.
#[derive(Clone, PartialEq)]
pub struct Multivector {
    dim: usize,
    coeffs: Vec<f64>,
}

impl Multivector {
    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} outside 1..={MAX_DIM}");
        Multivector { dim, coeffs: vec![0.0; 1 << dim] }
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        let mut m = Multivector::zero(dim);
        m.coeffs[0] = value;
        m
    }

    /// The basis vector `e_i` (1-based index).
    pub fn basis_vector(dim: usize, i: usize) -> Self {
        Multivector::basis_blade(Blade::from_indices(dim, &[i]))
    }

    pub fn basis_blade(blade: Blade) -> Self {
        let mut m = Multivector::zero(blade.dim());
        m.coeffs[blade.mask() as usize] = 1.0;
        m
    }

    /// Grade-1 multivector from coordinates.
    pub fn from_vector(coords: &[f64]) -> Self {
        let dim = coords.len();
        let mut m = Multivector::zero(dim);
        for (i, &c) in coords.iter().enumerate() {
            m.coeffs[1 << i] = c;
        }
        m
    }

    pub fn from_coeffs(dim: usize, coeffs: Vec<f64>) -> Self {
        assert!((1..=MAX_DIM).contains(&dim));
        assert_eq!(coeffs.len(), 1 << dim, "coefficient vector has wrong length");
        Multivector { dim, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, blade: Blade) -> f64 {
        assert_eq!(blade.dim(), self.dim);
        self.coeffs[blade.mask() as usize]
    }

    pub fn coeff_mask(&self, mask: u32) -> f64 {
        self.coeffs[mask as usize]
    }

    pub fn set_coeff_mask(&mut self, mask: u32, value: f64) {
        self.coeffs[mask as usize] = value;
    }

    /// Coordinates of the grade-1 part.
    pub fn vector_part(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.coeffs[1 << i]).collect()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.abs() <= tol)
    }

    fn assert_same_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "multivector dimension mismatch");
    }

    /// Exterior product `a ^ b`: e_s ^ e_t = eps(s,t) e_{s u t}, zero on overlap.
    pub fn exterior(&self, other: &Self) -> Self {
        self.assert_same_dim(other);
        let mut out = Multivector::zero(self.dim);
        for (s, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let s = s as u32;
            for (t, &b) in other.coeffs.iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                let t = t as u32;
                if s & t != 0 {
                    continue;
                }
                out.coeffs[(s | t) as usize] += epsilon_masks(s, t) * a * b;
            }
        }
        out
    }

    /// Left interior product `w _| x`: e_s _| e_t = eps(s, t\s) e_{t\s} for s in t.
    pub fn interior_left(&self, other: &Self) -> Self {
        self.assert_same_dim(other);
        let mut out = Multivector::zero(self.dim);
        for (s, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let s = s as u32;
            for (t, &b) in other.coeffs.iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                let t = t as u32;
                if s & t != s {
                    continue;
                }
                let rest = t & !s;
                out.coeffs[rest as usize] += epsilon_masks(s, rest) * a * b;
            }
        }
        out
    }

    /// Right interior product `x |_ w`: e_s |_ e_t = eps(s\t, t) e_{s\t} for t in s.
    pub fn interior_right(&self, other: &Self) -> Self {
        self.assert_same_dim(other);
        let mut out = Multivector::zero(self.dim);
        for (s, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let s = s as u32;
            for (t, &b) in other.coeffs.iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                let t = t as u32;
                if s & t != t {
                    continue;
                }
                let rest = s & !t;
                out.coeffs[rest as usize] += epsilon_masks(rest, t) * a * b;
            }
        }
        out
    }

    /// Clifford product: e_s e_t = eps(s,t) e_{s xor t}.
    pub fn clifford(&self, other: &Self) -> Self {
        self.assert_same_dim(other);
        let mut out = Multivector::zero(self.dim);
        for (s, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let s = s as u32;
            for (t, &b) in other.coeffs.iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                let t = t as u32;
                out.coeffs[(s ^ t) as usize] += epsilon_masks(s, t) * a * b;
            }
        }
        out
    }

    /// Restriction to the grade-k part.
    pub fn grade(&self, k: usize) -> Self {
        let mut out = Multivector::zero(self.dim);
        for (s, &a) in self.coeffs.iter().enumerate() {
            if (s as u32).count_ones() as usize == k {
                out.coeffs[s] = a;
            }
        }
        out
    }

    /// Restriction to a grade range.
    pub fn grade_range(&self, range: GradeRange) -> Self {
        let mut out = Multivector::zero(self.dim);
        for (s, &a) in self.coeffs.iter().enumerate() {
            if range.contains((s as u32).count_ones() as usize) {
                out.coeffs[s] = a;
            }
        }
        out
    }

    /// Largest grade with a coefficient above `tol`.
    pub fn max_grade(&self, tol: f64) -> Option<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > tol)
            .map(|(s, _)| (s as u32).count_ones() as usize)
            .max()
    }

    /// Blade-orthonormal inner product <x,y>.
    pub fn scalar_product(&self, other: &Self) -> f64 {
        self.assert_same_dim(other);
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// The involution `a -> a-hat` negating odd grades.
    pub fn involution(&self) -> Self {
        let mut out = self.clone();
        for (s, c) in out.coeffs.iter_mut().enumerate() {
            if (s as u32).count_ones() & 1 == 1 {
                *c = -*c;
            }
        }
        out
    }

    /// Hodge dual `a e_{1..n}` taken with the Clifford product.
    pub fn hodge_dual(&self) -> Self {
        self.clifford(&Multivector::basis_blade(Blade::pseudoscalar(self.dim)))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= s;
        }
        out
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Self) {
        self.assert_same_dim(other);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }
}

impl Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        self.assert_same_dim(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        Multivector { dim: self.dim, coeffs }
    }
}

impl Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        self.assert_same_dim(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        Multivector { dim: self.dim, coeffs }
    }
}

impl AddAssign<&Multivector> for Multivector {
    fn add_assign(&mut self, rhs: &Multivector) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&Multivector> for Multivector {
    fn sub_assign(&mut self, rhs: &Multivector) {
        self.axpy(-1.0, rhs);
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: f64) -> Multivector {
        self.scale(rhs)
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector(n={}, {})", self.dim, self)
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if s == 0 {
                write!(f, "{c}")?;
            } else {
                let idx: Vec<String> =
                    Blade::from_mask(self.dim, s as u32).indices().iter().map(|i| i.to_string()).collect();
                write!(f, "{c} e{}", idx.join(","))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
