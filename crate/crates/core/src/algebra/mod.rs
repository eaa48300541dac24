//! Exterior algebra of R^n with the exterior, interior and Clifford products.
//!
//! Basis blades `e_s` are indexed by subsets `s` of `{1,..,n}`, encoded as
//! n-bit masks (bit `i-1` set means index `i` is present). A [`Multivector`]
//! stores a dense array of 2^n real coefficients in ascending mask order,
//! so all signs are computed exactly by bit counting and the only rounding
//! is ordinary scalar arithmetic.
//!
//! Binary operations panic on mismatched dimensions; they are programmer
//! errors, not data errors.

mod multivector;
mod serialize;

pub use multivector::Multivector;

/// Largest supported dimension. 2^12 coefficients is already far beyond
/// anything the boundary operators need (n <= 4 in practice).
pub const MAX_DIM: usize = 12;

/// A single basis blade `e_s` of the exterior algebra of R^n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Blade {
    dim: usize,
    mask: u32,
}

impl Blade {
    /// Blade from a bit mask. Bit `i-1` of `mask` encodes index `i`.
    pub fn from_mask(dim: usize, mask: u32) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&dim),
            "blade dimension {dim} outside 1..={MAX_DIM}"
        );
        assert!(
            mask < (1u32 << dim),
            "mask {mask:#b} has bits beyond dimension {dim}"
        );
        Blade { dim, mask }
    }

    /// Blade from 1-based indices, which must be strictly increasing.
    pub fn from_indices(dim: usize, indices: &[usize]) -> Self {
        let mut mask = 0u32;
        let mut prev = 0usize;
        for &i in indices {
            assert!(i >= 1 && i <= dim, "index {i} outside 1..={dim}");
            assert!(i > prev, "indices must be strictly increasing");
            prev = i;
            mask |= 1 << (i - 1);
        }
        Blade::from_mask(dim, mask)
    }

    /// The scalar blade (empty index set).
    pub fn scalar(dim: usize) -> Self {
        Blade::from_mask(dim, 0)
    }

    /// The pseudoscalar blade `e_{1..n}`.
    pub fn pseudoscalar(dim: usize) -> Self {
        Blade::from_mask(dim, (1u32 << dim) - 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    /// Grade |s| of the blade.
    pub fn grade(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// 1-based indices in ascending order.
    pub fn indices(&self) -> Vec<usize> {
        (0..self.dim).filter(|b| self.mask >> b & 1 == 1).map(|b| b + 1).collect()
    }
}

/// Inclusive grade range used to slice multivectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GradeRange {
    pub lo: usize,
    pub hi: usize,
}

impl GradeRange {
    pub fn new(lo: usize, hi: usize, dim: usize) -> Self {
        assert!(lo <= hi && hi <= dim, "invalid grade range {lo}..={hi} for dimension {dim}");
        GradeRange { lo, hi }
    }

    pub fn contains(&self, grade: usize) -> bool {
        (self.lo..=self.hi).contains(&grade)
    }
}

/// Permutation sign eps(s,t) = (-1)^{#{(i,j) in s x t : i > j}} on bit masks.
pub fn epsilon_masks(s: u32, t: u32) -> f64 {
    let mut inversions = 0u32;
    let mut bits = s;
    while bits != 0 {
        let p = bits.trailing_zeros();
        inversions += (t & ((1u32 << p) - 1)).count_ones();
        bits &= bits - 1;
    }
    if inversions & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Permutation sign eps(s,t) for two blades of the same dimension.
pub fn epsilon(s: Blade, t: Blade) -> i32 {
    assert_eq!(s.dim, t.dim, "epsilon on blades of different dimension");
    epsilon_masks(s.mask, t.mask) as i32
}

/// All blade masks of dimension `n` with the given grade, ascending.
pub fn masks_of_grade(n: usize, grade: usize) -> Vec<u32> {
    (0..1u32 << n).filter(|m| m.count_ones() as usize == grade).collect()
}
