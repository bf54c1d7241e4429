//! Open subsets of `C^N`: symbolic expressions, grid discretisation,
//! Hausdorff machinery and kernels of domain sequences.

mod domain;
mod grid;
mod hausdorff;
mod kernel;

pub use domain::{BoundingBox, Classification, DomainExpr};
pub use grid::{boundary_sample, sample, Grid, GridKind, GridMask, SampleCloud, SampleTag};
pub use hausdorff::{hausdorff_distance, mask_hausdorff, rho_distance, rho_distance_on};
pub use kernel::{
    check_kernel_convergence, compact_absorption_index, kernel_of_sequence, kernel_of_terms,
    kernel_stage, Absorption, DomainSequence, FSet, Kernel, KernelRegion, KernelVerdict,
    KernelVerdictKind,
};

use crate::{Complex64, Error, Result};

/// A point of `C^N` in Euclidean coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<Complex64>,
}

impl Point {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("point must have N >= 1 coordinates".into()));
        }
        if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coordinate in {coords:?}")));
        }
        Ok(Self { coords })
    }

    /// Point with real coordinates; panics on empty or non-finite input.
    pub fn real(xs: &[f64]) -> Self {
        Self::new(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect()).expect("valid real point")
    }

    /// Point from interleaved `[re_1, im_1, ..., re_N, im_N]`.
    pub fn from_re_im(flat: &[f64]) -> Result<Self> {
        if flat.len() % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "expected an even number of reals, got {}",
                flat.len()
            )));
        }
        Self::new(flat.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            coords: vec![Complex64::new(0.0, 0.0); dim.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn to_re_im(&self) -> Vec<f64> {
        self.coords.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        dist(&self.coords, &other.coords)
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, z) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if z.im == 0.0 {
                write!(f, "{}", z.re)?;
            } else {
                write!(f, "{}{:+}i", z.re, z.im)?;
            }
        }
        write!(f, ")")
    }
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Hermitian inner product `⟨a, b⟩ = Σ a_i conj(b_i)`.
pub(crate) fn hdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}
