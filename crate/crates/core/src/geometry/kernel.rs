use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::domain::BoundingBox;
use super::grid::{Grid, GridMask, SampleCloud, SampleTag};
use super::hausdorff::rho_distance_on;
use super::{hdot, DomainExpr, Point};
use crate::rng::SeedStream;
use crate::{Error, Result};

type Generator = Arc<dyn Fn(usize) -> Result<DomainExpr> + Send + Sync>;
type IndexFilter = Arc<dyn Fn(usize) -> bool + Send + Sync>;

/// Symbolic description of an escape-limit set.
#[derive(Debug, Clone, PartialEq)]
pub enum FSet {
    Empty,
    /// `{ t·d : inner < |t| < outer }` inside the complex line through 0
    /// spanned by the unit vector `d`.
    LineAnnulus {
        direction: Point,
        inner: f64,
        outer: f64,
    },
    Union(Vec<FSet>),
}

impl FSet {
    pub fn line_annulus(direction: Point, inner: f64, outer: f64) -> Result<Self> {
        let n = direction.norm();
        if n == 0.0 || !(0.0 <= inner && inner < outer && outer.is_finite()) {
            return Err(Error::InvalidInput("line annulus needs d ≠ 0 and 0 ≤ inner < outer".into()));
        }
        Ok(FSet::LineAnnulus {
            direction: Point::new(direction.coords().iter().map(|z| z / n).collect())?,
            inner,
            outer,
        })
    }

    /// Euclidean distance from `p` to the closure of the set.
    pub fn distance(&self, p: &Point) -> f64 {
        match self {
            FSet::Empty => f64::INFINITY,
            FSet::LineAnnulus {
                direction,
                inner,
                outer,
            } => {
                let d = direction.coords();
                let t = hdot(p.coords(), d);
                let perp2: f64 = p
                    .coords()
                    .iter()
                    .zip(d)
                    .map(|(z, di)| (z - t * di).norm_sqr())
                    .sum();
                let r = t.norm();
                let radial = r - r.clamp(*inner, *outer);
                (perp2.max(0.0) + radial * radial).sqrt()
            }
            FSet::Union(parts) => parts.iter().map(|f| f.distance(p)).fold(f64::INFINITY, f64::min),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            FSet::Empty => true,
            FSet::LineAnnulus { .. } => false,
            FSet::Union(parts) => parts.iter().all(|f| f.is_empty()),
        }
    }
}

/// An indexed family `n ↦ W_n`, `n ≥ 1`, with a distinguished base point.
#[derive(Clone)]
pub struct DomainSequence {
    label: String,
    generator: Generator,
    base_point: Point,
    declared_kernel: Option<DomainExpr>,
    declared_f: Option<FSet>,
    subsequences: Vec<(String, IndexFilter)>,
}

impl fmt::Debug for DomainSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DomainSequence")
            .field("label", &self.label)
            .field("base_point", &self.base_point)
            .field("declared_kernel", &self.declared_kernel)
            .field("declared_f", &self.declared_f)
            .field("subsequences", &self.subsequences.len())
            .finish()
    }
}

impl DomainSequence {
    pub fn new(
        label: impl Into<String>,
        base_point: Point,
        generator: impl Fn(usize) -> Result<DomainExpr> + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            generator: Arc::new(generator),
            base_point,
            declared_kernel: None,
            declared_f: None,
            subsequences: Vec::new(),
        }
    }

    pub fn with_kernel(mut self, w: DomainExpr) -> Self {
        self.declared_kernel = Some(w);
        self
    }

    pub fn with_f(mut self, f: FSet) -> Self {
        self.declared_f = Some(f);
        self
    }

    /// Registers a named subsequence `{n : keep(n)}` that `detect_F`
    /// examines in addition to the full, even and odd ones.
    pub fn with_subsequence(
        mut self,
        name: impl Into<String>,
        keep: impl Fn(usize) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.subsequences.push((name.into(), Arc::new(keep)));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn base_point(&self) -> &Point {
        &self.base_point
    }

    pub fn declared_kernel(&self) -> Option<&DomainExpr> {
        self.declared_kernel.as_ref()
    }

    pub fn declared_f(&self) -> Option<&FSet> {
        self.declared_f.as_ref()
    }

    pub fn declared_subsequences(&self) -> impl Iterator<Item = (&str, &IndexFilter)> {
        self.subsequences.iter().map(|(n, f)| (n.as_str(), f))
    }

    /// `W_n` without the base-point check.
    pub fn raw_term(&self, n: usize) -> Result<DomainExpr> {
        if n == 0 {
            return Err(Error::InvalidInput("sequences are indexed from n = 1".into()));
        }
        (self.generator)(n)
    }

    /// `W_n`, verifying that the base point is interior.
    pub fn term(&self, n: usize) -> Result<DomainExpr> {
        let w = self.raw_term(n)?;
        if w.dim() != self.base_point.dim() || !w.is_inside(&self.base_point) {
            return Err(Error::BasePointMissing { n });
        }
        Ok(w)
    }

    /// The subsequence `k ↦ W_{indices[k]}` (indices are 1-based).
    pub fn subsequence(&self, indices: Vec<usize>) -> Result<DomainSequence> {
        if indices.windows(2).any(|w| w[0] >= w[1]) || indices.first() == Some(&0) {
            return Err(Error::InvalidInput("subsequence indices must increase from 1".into()));
        }
        let parent = self.generator.clone();
        let idx = Arc::new(indices);
        Ok(DomainSequence {
            label: format!("{}[sub]", self.label),
            generator: Arc::new(move |k| match idx.get(k - 1) {
                Some(&n) => parent(n),
                None => Err(Error::InvalidInput(format!("subsequence has no term {k}"))),
            }),
            base_point: self.base_point.clone(),
            declared_kernel: self.declared_kernel.clone(),
            declared_f: self.declared_f.clone(),
            subsequences: Vec::new(),
        })
    }
}

/// A grid region approximating the kernel.
#[derive(Debug, Clone)]
pub struct KernelRegion {
    pub grid: Grid,
    pub mask: GridMask,
    /// The base point sits within one cell of the boundary of the grid
    /// interior, so the component through it is not resolved at this pitch.
    pub marginal: bool,
    /// The index `n` whose stage `V_n` represents the union.
    pub stage: usize,
}

impl KernelRegion {
    pub fn cloud(&self) -> SampleCloud {
        self.mask.to_cloud(&self.grid, SampleTag::Interior)
    }
}

/// Kernel of a domain sequence, or the degenerate marker `{0}`.
#[derive(Debug, Clone)]
pub enum Kernel {
    Region(KernelRegion),
    Degenerate { marginal: bool },
}

impl Kernel {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Kernel::Degenerate { .. })
    }

    pub fn region(&self) -> Option<&KernelRegion> {
        match self {
            Kernel::Region(r) => Some(r),
            Kernel::Degenerate { .. } => None,
        }
    }

    pub fn marginal(&self) -> bool {
        match self {
            Kernel::Region(r) => r.marginal,
            Kernel::Degenerate { marginal } => *marginal,
        }
    }

    /// `ρ` between the kernel and a domain, evaluated on the kernel's grid.
    pub fn rho_to(&self, w: &DomainExpr) -> Result<f64> {
        match self {
            Kernel::Region(r) => rho_distance_on(&r.grid, &r.mask, &r.grid.classify(w)?),
            Kernel::Degenerate { .. } => Err(Error::UndefinedHausdorff("degenerate kernel")),
        }
    }
}

/// The stage index used to represent `∪ V_n`.
///
/// `V_n` grows with `n`, so the union is its last term; with finitely many
/// terms, `Ṽ_n` for `n` near `n_max` intersects too few sets to be
/// representative, so the union is read off at the midpoint.
pub fn kernel_stage(n_max: usize) -> usize {
    n_max.div_ceil(2).max(1)
}

/// `V` from an eventual intersection: grid interior, component of the base
/// cell, then one dilation back inside `Ṽ`.
fn stage_region(grid: &Grid, vtilde: &GridMask, base: usize, stage: usize) -> Kernel {
    let interior = vtilde.erode(grid);
    let marginal = vtilde.get(base) && !interior.get(base);
    let comp = interior.component(grid, base);
    if comp.is_empty() {
        return Kernel::Degenerate { marginal };
    }
    Kernel::Region(KernelRegion {
        grid: grid.clone(),
        mask: comp.dilate_within(grid, vtilde),
        marginal,
        stage,
    })
}

fn grid_for(seq: &DomainSequence, n_max: usize, bbox: &BoundingBox, h: f64) -> Result<(Grid, Vec<DomainExpr>)> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let terms: Vec<DomainExpr> = (1..=n_max).map(|n| seq.term(n)).collect::<Result<_>>()?;
    let refs: Vec<&DomainExpr> = terms.iter().collect();
    let grid = if refs.iter().all(|d| d.is_reinhardt()) {
        Grid::covering(&refs, h)?
    } else {
        if bbox.real_dim() != 2 * seq.base_point().dim() {
            return Err(Error::InvalidInput("box and sequence differ in dimension".into()));
        }
        Grid::full(bbox, h)?
    };
    Ok((grid, terms))
}

/// Kernels of several index sets of the same terms, sharing one pass over
/// the classified terms.
fn kernels_of_index_sets(
    grid: &Grid,
    terms: &[DomainExpr],
    base: &Point,
    sets: &[Vec<usize>],
) -> Result<Vec<Kernel>> {
    let base_idx = grid
        .nearest_index(base)
        .ok_or_else(|| Error::InvalidInput(format!("base point {base} lies outside the grid")))?;
    let n_max = terms.len();
    let stage = kernel_stage(n_max);
    let mut acc: Vec<Option<GridMask>> = vec![None; sets.len()];
    for n in stage..=n_max {
        let users: Vec<usize> = (0..sets.len()).filter(|s| sets[*s].contains(&n)).collect();
        if users.is_empty() {
            continue;
        }
        let m = grid.classify(&terms[n - 1])?;
        for s in users {
            match &mut acc[s] {
                Some(a) => a.and_assign(&m),
                slot @ None => *slot = Some(m.clone()),
            }
        }
    }
    acc.into_iter()
        .zip(sets)
        .map(|(a, set)| match a {
            Some(vt) => Ok(stage_region(grid, &vt, base_idx, stage)),
            None => Err(Error::InvalidInput(format!(
                "index set {:?}.. has no term at or beyond n = {stage}",
                set.iter().take(4).collect::<Vec<_>>()
            ))),
        })
        .collect()
}

/// Kernel of explicitly given terms `W_1, ..., W_{n_max}` on `grid`.
pub fn kernel_of_terms(grid: &Grid, terms: &[DomainExpr], base: &Point) -> Result<Kernel> {
    let all: Vec<usize> = (1..=terms.len()).collect();
    Ok(kernels_of_index_sets(grid, terms, base, &[all])?.remove(0))
}

/// Kernel of `S` from its first `n_max` terms at pitch `h`.
///
/// Reinhardt families are sampled in modulus space and ignore `bbox`.
/// Resolution requires features that vanish in the limit to drop below one
/// cell by the stage index, i.e. `n_max ≳ 2/(feature·h)` for arms of width
/// `1/n`.
pub fn kernel_of_sequence(seq: &DomainSequence, n_max: usize, bbox: &BoundingBox, h: f64) -> Result<Kernel> {
    let (grid, terms) = grid_for(seq, n_max, bbox, h)?;
    kernel_of_terms(&grid, &terms, seq.base_point())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelVerdictKind {
    Converges,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct KernelVerdict {
    pub kind: KernelVerdictKind,
    pub witness: String,
    /// Kernel of the full sequence.
    pub kernel: Kernel,
    /// `ρ` from the full kernel to each subsequence kernel, by name.
    pub distances: Vec<(String, f64)>,
}

/// Compares the kernel of `S` with the kernels of the even, odd and
/// `subsequence_count` seeded random subsequences; all must agree within
/// `2h` in `ρ`.
pub fn check_kernel_convergence(
    seq: &DomainSequence,
    subsequence_count: usize,
    n_max: usize,
    bbox: &BoundingBox,
    h: f64,
    seed: u64,
) -> Result<KernelVerdict> {
    let (grid, terms) = grid_for(seq, n_max, bbox, h)?;
    let stage = kernel_stage(n_max);
    let mut names = vec!["full".to_string(), "even".to_string(), "odd".to_string()];
    let mut sets: Vec<Vec<usize>> = vec![
        (1..=n_max).collect(),
        (1..=n_max).filter(|n| n % 2 == 0).collect(),
        (1..=n_max).filter(|n| n % 2 == 1).collect(),
    ];
    let stream = SeedStream::new(seed).child("kernel-subsequences");
    for s in 0..subsequence_count {
        let mut rng = stream.indexed(s as u64).rng();
        let mut set: Vec<usize> = (1..=n_max).filter(|_| rng.gen_bool(0.5)).collect();
        if !set.iter().any(|n| *n >= stage) {
            set.push(n_max);
        }
        names.push(format!("random{s}"));
        sets.push(set);
    }
    let kernels = kernels_of_index_sets(&grid, &terms, seq.base_point(), &sets)?;
    let tol = 2.0 * h;
    let full = kernels[0].clone();
    let mut distances = Vec::new();
    let mut kind = KernelVerdictKind::Converges;
    let mut witness = String::new();
    if kernels.iter().any(|k| k.marginal()) {
        kind = KernelVerdictKind::Inconclusive;
        witness = "base point within one cell of the interior boundary".into();
    }
    for (name, k) in names.iter().zip(&kernels).skip(1) {
        let d = match (&full, k) {
            (Kernel::Degenerate { .. }, Kernel::Degenerate { .. }) => 0.0,
            (Kernel::Region(a), Kernel::Region(b)) => rho_distance_on(&grid, &a.mask, &b.mask)?,
            _ => f64::INFINITY,
        };
        distances.push((name.clone(), d));
        if d > tol && kind != KernelVerdictKind::Fails {
            kind = KernelVerdictKind::Fails;
            witness = format!("{name} subsequence kernel differs: rho = {d:.4} > {tol:.4}");
        }
    }
    if kind == KernelVerdictKind::Converges {
        witness = format!("{} kernels agree within rho {tol:.4}", kernels.len());
    }
    Ok(KernelVerdict {
        kind,
        witness,
        kernel: full,
        distances,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Absorption {
    Index(usize),
    NotAbsorbed,
}

/// Smallest `n₀ ≤ n_max` with `K ⊂ W_n` for every `n ∈ [n₀, n_max]`.
pub fn compact_absorption_index(seq: &DomainSequence, k: &SampleCloud, n_max: usize) -> Result<Absorption> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let mut first = None;
    for n in (1..=n_max).rev() {
        let w = seq.raw_term(n)?;
        if k.points.iter().all(|p| w.is_inside(p)) {
            first = Some(n);
        } else {
            break;
        }
    }
    Ok(first.map_or(Absorption::NotAbsorbed, Absorption::Index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex64;

    fn arm_bidisc() -> DomainSequence {
        let w = DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap();
        let w2 = w.clone();
        DomainSequence::new("arm_bidisc", Point::origin(2), move |n| {
            DomainExpr::union(vec![
                w2.clone(),
                DomainExpr::centered_polydisc(&[2.0, 1.0 / n as f64])?,
            ])
        })
        .with_kernel(w)
    }

    fn bb2() -> BoundingBox {
        DomainExpr::centered_polydisc(&[2.0, 2.0]).unwrap().bounding_box()
    }

    #[test]
    fn constant_sequence_kernel_is_the_domain() {
        let w = DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap();
        let w2 = w.clone();
        let s = DomainSequence::new("const", Point::origin(2), move |_| Ok(w2.clone()));
        let k = kernel_of_sequence(&s, 4, &bb2(), 0.05).unwrap();
        assert!(k.rho_to(&w).unwrap() <= 0.1);
    }

    #[test]
    fn example_kernel_drops_the_arm() {
        let h = 0.05;
        let s = arm_bidisc();
        let k = kernel_of_sequence(&s, 60, &bb2(), h).unwrap();
        let r = k.rho_to(s.declared_kernel().unwrap()).unwrap();
        assert!(r <= 2.0 * h, "{r}");
    }

    #[test]
    fn shrinking_polydiscs_are_degenerate() {
        let s = DomainSequence::new("shrink", Point::origin(2), |n| {
            DomainExpr::centered_polydisc(&[1.0 / n as f64, 1.0 / n as f64])
        });
        assert!(kernel_of_sequence(&s, 40, &bb2(), 0.05).unwrap().is_degenerate());
    }

    #[test]
    fn base_point_violation_is_reported() {
        let s = DomainSequence::new("bad", Point::real(&[0.5, 0.0]), |n| {
            DomainExpr::centered_polydisc(&[1.0 / n as f64, 1.0])
        });
        assert_eq!(
            kernel_of_sequence(&s, 5, &bb2(), 0.1).unwrap_err(),
            Error::BasePointMissing { n: 2 }
        );
    }

    #[test]
    fn alternating_sequence_fails() {
        let s = DomainSequence::new("alt", Point::origin(2), |n| {
            let r = if n % 2 == 0 { 1.0 } else { 2.0 };
            DomainExpr::centered_polydisc(&[r, r])
        });
        let v = check_kernel_convergence(&s, 2, 20, &bb2(), 0.05, 1).unwrap();
        assert_eq!(v.kind, KernelVerdictKind::Fails);
    }

    #[test]
    fn absorption_of_single_point() {
        let k = SampleCloud::from_points(vec![Point::real(&[0.5, 0.0])], 0.1, SampleTag::Closure);
        assert_eq!(compact_absorption_index(&arm_bidisc(), &k, 30).unwrap(), Absorption::Index(1));
        let out = SampleCloud::from_points(vec![Point::real(&[0.0, 1.5])], 0.1, SampleTag::Closure);
        assert_eq!(compact_absorption_index(&arm_bidisc(), &out, 30).unwrap(), Absorption::NotAbsorbed);
    }

    #[test]
    fn line_annulus_distance() {
        let f = FSet::line_annulus(Point::real(&[1.0, 0.0]), 1.0, 2.0).unwrap();
        assert_eq!(f.distance(&Point::real(&[1.5, 0.0])), 0.0);
        let p = Point::new(vec![Complex64::new(0.0, 1.5), Complex64::new(0.3, 0.0)]).unwrap();
        assert!((f.distance(&p) - 0.3).abs() < 1e-12);
        assert!((f.distance(&Point::real(&[0.5, 0.0])) - 0.5).abs() < 1e-12);
    }
}
