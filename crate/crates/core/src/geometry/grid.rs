use std::collections::VecDeque;

use rayon::prelude::*;

use super::domain::BoundingBox;
use super::{DomainExpr, Point};
use crate::{Complex64, Error, Result};

const MAX_CELLS: usize = 150_000_000;

/// How grid cells map to points of `C^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Cells live in modulus space `(|z_1|, ..., |z_N|)`, one axis per
    /// complex coordinate. Exact for rotation-invariant (Reinhardt) sets:
    /// distances, interiors and connectivity all factor through the moduli.
    Reinhardt,
    /// Cells tile `R^{2N}` over a bounding box.
    Full,
}

/// A regular grid of pitch `h`, row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    kind: GridKind,
    dim: usize,
    lo: Vec<f64>,
    shape: Vec<usize>,
    strides: Vec<usize>,
    h: f64,
}

fn check_pitch(h: f64) -> Result<()> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("grid pitch must be positive, got {h}")))
    }
}

impl Grid {
    fn build(kind: GridKind, dim: usize, lo: Vec<f64>, shape: Vec<usize>, h: f64) -> Result<Self> {
        let total = shape.iter().try_fold(1usize, |acc, s| acc.checked_mul(*s));
        match total {
            Some(t) if t <= MAX_CELLS => {}
            _ => {
                return Err(Error::InvalidInput(format!(
                    "grid of shape {shape:?} exceeds {MAX_CELLS} cells; increase h"
                )))
            }
        }
        let mut strides = vec![1; shape.len()];
        for a in (0..shape.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * shape[a + 1];
        }
        Ok(Self {
            kind,
            dim,
            lo,
            shape,
            strides,
            h,
        })
    }

    /// Full grid over `bbox`; cell centres sit at `lo + k h`.
    pub fn full(bbox: &BoundingBox, h: f64) -> Result<Self> {
        check_pitch(h)?;
        let shape = bbox
            .lo
            .iter()
            .zip(&bbox.hi)
            .map(|(l, u)| ((u - l) / h).floor() as usize + 1)
            .collect();
        Self::build(GridKind::Full, bbox.real_dim() / 2, bbox.lo.clone(), shape, h)
    }

    /// Modulus-space grid on `[0, rmax_i]`.
    pub fn reinhardt(rmax: &[f64], h: f64) -> Result<Self> {
        check_pitch(h)?;
        if rmax.is_empty() || rmax.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidInput("modulus extents must be positive".into()));
        }
        let shape = rmax.iter().map(|r| (r / h).ceil() as usize + 1).collect();
        Self::build(GridKind::Reinhardt, rmax.len(), vec![0.0; rmax.len()], shape, h)
    }

    /// Smallest convenient grid holding every domain with a `2h` margin:
    /// modulus space when all of them are Reinhardt, full space otherwise.
    pub fn covering(domains: &[&DomainExpr], h: f64) -> Result<Self> {
        check_pitch(h)?;
        let Some(first) = domains.first() else {
            return Err(Error::InvalidInput("no domains to cover".into()));
        };
        let dim = first.dim();
        if domains.iter().any(|d| d.dim() != dim) {
            return Err(Error::InvalidInput("domains differ in dimension".into()));
        }
        if domains.iter().all(|d| d.is_reinhardt()) {
            let rmax: Vec<f64> = (0..dim)
                .map(|i| domains.iter().map(|d| d.modulus_bound(i)).fold(0.0, f64::max) + 2.0 * h)
                .collect();
            Self::reinhardt(&rmax, h)
        } else {
            let bb = domains[1..]
                .iter()
                .fold(first.bounding_box(), |acc, d| acc.hull(&d.bounding_box()));
            Self::full(&bb.expanded(2.0 * h), h)
        }
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pitch(&self) -> f64 {
        self.h
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn axis_values(&self, idx: usize) -> Vec<f64> {
        let mut rest = idx;
        self.strides
            .iter()
            .zip(&self.lo)
            .map(|(s, l)| {
                let k = rest / s;
                rest %= s;
                l + k as f64 * self.h
            })
            .collect()
    }

    /// Representative point of a cell.
    pub fn coords(&self, idx: usize) -> Vec<Complex64> {
        let v = self.axis_values(idx);
        match self.kind {
            GridKind::Reinhardt => v.iter().map(|r| Complex64::new(*r, 0.0)).collect(),
            GridKind::Full => v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect(),
        }
    }

    pub fn point(&self, idx: usize) -> Point {
        Point::new(self.coords(idx)).expect("grid points are finite")
    }

    /// Coordinates used for distances: moduli or `(re, im)` pairs.
    pub fn metric_coords(&self, idx: usize) -> Vec<f64> {
        self.axis_values(idx)
    }

    /// Projects a point into the grid's metric coordinates.
    pub fn project(&self, p: &Point) -> Vec<f64> {
        match self.kind {
            GridKind::Reinhardt => p.coords().iter().map(|z| z.norm()).collect(),
            GridKind::Full => p.to_re_im(),
        }
    }

    /// Nearest cell to `p`, if it lies inside the grid.
    pub fn nearest_index(&self, p: &Point) -> Option<usize> {
        if p.dim() != self.dim {
            return None;
        }
        let x = self.project(p);
        let mut idx = 0;
        for (a, xa) in x.iter().enumerate() {
            let k = ((xa - self.lo[a]) / self.h).round();
            if k < 0.0 || k >= self.shape[a] as f64 {
                return None;
            }
            idx += k as usize * self.strides[a];
        }
        Some(idx)
    }

    /// Calls `f` with each axis neighbour; `None` means off the grid.
    /// In modulus space the neighbour below `r = 0` is its mirror at `r = h`.
    #[inline]
    pub fn for_each_neighbor(&self, idx: usize, mut f: impl FnMut(Option<usize>)) {
        for (&s, &n) in self.strides.iter().zip(&self.shape) {
            let k = (idx / s) % n;
            if k + 1 < n {
                f(Some(idx + s));
            } else {
                f(None);
            }
            if k > 0 {
                f(Some(idx - s));
            } else if self.kind == GridKind::Reinhardt && n > 1 {
                f(Some(idx + s));
            } else {
                f(None);
            }
        }
    }

    /// Signed distance of `D` at every cell.
    pub fn sdf_field(&self, d: &DomainExpr) -> Result<Vec<f64>> {
        if d.dim() != self.dim {
            return Err(Error::InvalidInput("domain and grid differ in dimension".into()));
        }
        if self.kind == GridKind::Reinhardt && !d.is_reinhardt() {
            return Err(Error::InvalidInput(
                "modulus-space grid requires a Reinhardt domain".into(),
            ));
        }
        Ok((0..self.len())
            .into_par_iter()
            .map(|i| d.sdf_at(&self.coords(i)))
            .collect())
    }

    /// Cells whose representative lies in the open set.
    pub fn classify(&self, d: &DomainExpr) -> Result<GridMask> {
        Ok(GridMask {
            bits: self.sdf_field(d)?.into_iter().map(|s| s < 0.0).collect(),
        })
    }

    /// Exact Euclidean distance (in metric coordinates) from every cell to
    /// the nearest set cell of `mask`; `INFINITY` everywhere for an empty mask.
    pub fn distance_transform(&self, mask: &GridMask) -> Vec<f64> {
        let mut f: Vec<f64> = mask.bits.iter().map(|&b| if b { 0.0 } else { f64::INFINITY }).collect();
        for a in 0..self.shape.len() {
            let n = self.shape[a];
            let s = self.strides[a];
            let starts: Vec<usize> = (0..self.len()).filter(|i| (i / s) % n == 0).collect();
            let lines: Vec<Vec<f64>> = starts
                .par_iter()
                .map(|&st| {
                    let line: Vec<f64> = (0..n).map(|k| f[st + k * s]).collect();
                    edt_1d(&line)
                })
                .collect();
            for (st, line) in starts.iter().zip(lines) {
                for (k, v) in line.into_iter().enumerate() {
                    f[st + k * s] = v;
                }
            }
        }
        f.into_par_iter().map(|d2| d2.sqrt() * self.h).collect()
    }
}

/// Felzenszwalb–Huttenlocher squared distance transform of one line.
fn edt_1d(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![f64::INFINITY; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0f64; n + 1];
    let mut k: usize = 0;
    let mut started = false;
    for q in 0..n {
        if !f[q].is_finite() {
            continue;
        }
        if !started {
            v[0] = q;
            z[0] = f64::NEG_INFINITY;
            z[1] = f64::INFINITY;
            started = true;
            continue;
        }
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                v[0] = q;
                z[0] = f64::NEG_INFINITY;
                z[1] = f64::INFINITY;
                break;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    if !started {
        return out;
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
    out
}

/// A set of grid cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMask {
    bits: Vec<bool>,
}

impl GridMask {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn empty(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    pub fn and_assign(&mut self, other: &GridMask) {
        self.bits
            .par_iter_mut()
            .zip(&other.bits)
            .for_each(|(a, b)| *a = *a && *b);
    }

    pub fn or(&self, other: &GridMask) -> GridMask {
        GridMask {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a || *b).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &GridMask) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    /// Grid interior: cells all of whose neighbours are set.
    pub fn erode(&self, grid: &Grid) -> GridMask {
        let bits = (0..self.bits.len())
            .into_par_iter()
            .map(|i| {
                if !self.bits[i] {
                    return false;
                }
                let mut keep = true;
                grid.for_each_neighbor(i, |j| keep &= j.is_some_and(|j| self.bits[j]));
                keep
            })
            .collect();
        GridMask { bits }
    }

    /// One-cell dilation, clipped to `within`.
    pub fn dilate_within(&self, grid: &Grid, within: &GridMask) -> GridMask {
        let bits = (0..self.bits.len())
            .into_par_iter()
            .map(|i| {
                if !within.bits[i] {
                    return false;
                }
                if self.bits[i] {
                    return true;
                }
                let mut hit = false;
                grid.for_each_neighbor(i, |j| hit |= j.is_some_and(|j| self.bits[j]));
                hit
            })
            .collect();
        GridMask { bits }
    }

    /// Axis-neighbour connected component containing `seed`.
    pub fn component(&self, grid: &Grid, seed: usize) -> GridMask {
        let mut out = vec![false; self.bits.len()];
        if !self.bits[seed] {
            return GridMask { bits: out };
        }
        let mut queue = VecDeque::from([seed]);
        out[seed] = true;
        while let Some(i) = queue.pop_front() {
            grid.for_each_neighbor(i, |j| {
                if let Some(j) = j {
                    if self.bits[j] && !out[j] {
                        out[j] = true;
                        queue.push_back(j);
                    }
                }
            });
        }
        GridMask { bits: out }
    }

    /// Cells whose neighbourhood contains both set and unset cells.
    pub fn boundary(&self, grid: &Grid) -> GridMask {
        let bits = (0..self.bits.len())
            .into_par_iter()
            .map(|i| {
                let me = self.bits[i];
                let mut mixed = false;
                grid.for_each_neighbor(i, |j| mixed |= j.map_or(false, |j| self.bits[j]) != me);
                mixed
            })
            .collect();
        GridMask { bits }
    }

    /// Set cells together with their discrete boundary.
    pub fn closure(&self, grid: &Grid) -> GridMask {
        self.or(&self.boundary(grid))
    }

    pub fn to_cloud(&self, grid: &Grid, tag: SampleTag) -> SampleCloud {
        let points: Vec<Point> = self
            .bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| grid.point(i))
            .collect();
        SampleCloud {
            empty: points.is_empty(),
            points,
            resolution: grid.pitch(),
            tag,
            kind: grid.kind(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleTag {
    Interior,
    Boundary,
    Closure,
}

impl SampleTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SampleTag::Interior => "interior",
            SampleTag::Boundary => "boundary",
            SampleTag::Closure => "closure",
        }
    }
}

/// Finite point sample of a set at pitch `resolution`.
///
/// Clouds produced on a modulus-space grid hold one real representative
/// `(|z_1|, ..., |z_N|)` per torus orbit; distances between two such clouds
/// equal the distances between the rotation-invariant sets they stand for.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCloud {
    pub points: Vec<Point>,
    pub resolution: f64,
    pub tag: SampleTag,
    pub kind: GridKind,
    /// Set when sampling found nothing, usually because `h` exceeds the
    /// feature size.
    pub empty: bool,
}

impl SampleCloud {
    pub fn from_points(points: Vec<Point>, resolution: f64, tag: SampleTag) -> Self {
        Self {
            empty: points.is_empty(),
            points,
            resolution,
            tag,
            kind: GridKind::Full,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// One flat real vector per point in the cloud's metric coordinates.
    pub fn metric_points(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .map(|p| match self.kind {
                GridKind::Reinhardt => p.coords().iter().map(|z| z.norm()).collect(),
                GridKind::Full => p.to_re_im(),
            })
            .collect()
    }
}

fn sampling_grid(d: &DomainExpr, bbox: &BoundingBox, h: f64) -> Result<Grid> {
    check_pitch(h)?;
    if bbox.real_dim() != 2 * d.dim() {
        return Err(Error::InvalidInput("box and domain differ in dimension".into()));
    }
    if !bbox.contains_box(&d.bounding_box()) {
        return Err(Error::InvalidInput("sampling box must contain the domain".into()));
    }
    Grid::full(&bbox.expanded(h), h)
}

/// Interior sample of `D` on a full grid over `bbox`.
pub fn sample(d: &DomainExpr, bbox: &BoundingBox, h: f64) -> Result<SampleCloud> {
    let grid = sampling_grid(d, bbox, h)?;
    Ok(grid.classify(d)?.to_cloud(&grid, SampleTag::Interior))
}

/// Grid points with a mixed-sign neighbourhood.
pub fn boundary_sample(d: &DomainExpr, bbox: &BoundingBox, h: f64) -> Result<SampleCloud> {
    let grid = sampling_grid(d, bbox, h)?;
    Ok(grid.classify(d)?.boundary(&grid).to_cloud(&grid, SampleTag::Boundary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_bidisc() -> DomainExpr {
        DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap()
    }

    #[test]
    fn interior_sample_contains_origin() {
        let d = unit_bidisc();
        let c = sample(&d, &d.bounding_box(), 0.5).unwrap();
        assert!(!c.empty);
        assert!(c.points.iter().any(|p| p.norm() < 1e-12));
        assert!(c.points.iter().all(|p| d.is_inside(p)));
    }

    #[test]
    fn empty_difference_is_flagged() {
        let d = DomainExpr::difference(unit_bidisc(), unit_bidisc()).unwrap();
        let c = sample(&d, &d.bounding_box(), 0.25).unwrap();
        assert!(c.empty && c.is_empty());
    }

    #[test]
    fn boundary_points_are_near_the_boundary() {
        let d = DomainExpr::centered_polydisc(&[1.0]).unwrap();
        let h = 0.05;
        let c = boundary_sample(&d, &d.bounding_box(), h).unwrap();
        assert!(!c.is_empty());
        for p in &c.points {
            let r = p.coords()[0].norm();
            assert!((r - 1.0).abs() <= h + 1e-12, "{p}");
        }
    }

    #[test]
    fn edt_matches_brute_force() {
        let g = Grid::reinhardt(&[1.0, 1.0], 0.1).unwrap();
        let bits: Vec<bool> = (0..g.len()).map(|i| i % 17 == 3).collect();
        let m = GridMask::new(bits.clone());
        let dt = g.distance_transform(&m);
        for i in 0..g.len() {
            let xi = g.metric_coords(i);
            let brute = (0..g.len())
                .filter(|j| bits[*j])
                .map(|j| {
                    let xj = g.metric_coords(j);
                    xi.iter().zip(&xj).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            assert!((dt[i] - brute).abs() < 1e-9);
        }
    }

    #[test]
    fn reinhardt_mirror_keeps_axis_cells_interior() {
        let d = DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap();
        let g = Grid::covering(&[&d], 0.1).unwrap();
        assert_eq!(g.kind(), GridKind::Reinhardt);
        let m = g.classify(&d).unwrap();
        let e = m.erode(&g);
        let o = g.nearest_index(&Point::origin(2)).unwrap();
        assert!(e.get(o));
        assert_eq!(m.component(&g, o).count(), m.count());
    }
}
