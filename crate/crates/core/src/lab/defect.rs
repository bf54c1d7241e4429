use std::collections::HashMap;

use rayon::prelude::*;

use crate::eta::leaf_model;
use crate::foliation::{LeafChart, LeafModel, MonomialChart, PolyVectorField, TraceOptions};
use crate::geometry::{BoundingBox, DomainExpr, DomainSequence, Grid, GridKind, Point, SampleCloud, SampleTag};
use crate::planar::{PlanarDomain, SampledDomain};
use crate::{Complex64, Error, Result};

/// Fraction of tail indices that must reach a point for it to count as a
/// limit of escaping points.
pub const F_HIT_FRACTION: f64 = 0.6;

/// Points `p` at distance more than `2h` from `W` such that `W_n` comes
/// within `h` of `p` for at least 60% of the indices `n ∈ [⌈n_max/2⌉, n_max]`
/// of the full, even, odd or some declared subsequence.
pub fn detect_f(seq: &DomainSequence, w: &DomainExpr, bbox: &BoundingBox, h: f64, n_max: usize) -> Result<SampleCloud> {
    if n_max < 2 {
        return Err(Error::InvalidInput("n_max must be at least 2".into()));
    }
    let first = n_max.div_ceil(2);
    let tail: Vec<usize> = (first..=n_max).collect();
    let terms: Vec<DomainExpr> = tail.iter().map(|&n| seq.raw_term(n)).collect::<Result<_>>()?;
    let reinhardt = w.is_reinhardt() && terms.iter().all(|t| t.is_reinhardt());
    let grid = if reinhardt {
        let mut all: Vec<&DomainExpr> = vec![w];
        all.extend(terms.iter());
        Grid::covering(&all, h)?
    } else {
        if bbox.real_dim() != 2 * w.dim() {
            return Err(Error::InvalidInput("box and domain differ in dimension".into()));
        }
        Grid::full(bbox, h)?
    };
    let mut subsets: Vec<Vec<usize>> = vec![
        (0..tail.len()).collect(),
        (0..tail.len()).filter(|&k| tail[k] % 2 == 0).collect(),
        (0..tail.len()).filter(|&k| tail[k] % 2 == 1).collect(),
    ];
    for (_, keep) in seq.declared_subsequences() {
        subsets.push((0..tail.len()).filter(|&k| keep(tail[k])).collect());
    }
    subsets.retain(|s| !s.is_empty());
    let need: Vec<usize> = subsets
        .iter()
        .map(|s| (F_HIT_FRACTION * s.len() as f64).ceil() as usize)
        .collect();
    let cell_hits = |z: &[Complex64]| -> bool {
        if w.sdf_at(z) <= 2.0 * h {
            return false;
        }
        let mut hit: Vec<Option<bool>> = vec![None; terms.len()];
        subsets.iter().zip(&need).any(|(s, &need)| {
            let mut count = 0;
            for (seen, &k) in s.iter().enumerate() {
                let b = *hit[k].get_or_insert_with(|| terms[k].sdf_at(z) < h);
                count += b as usize;
                if count >= need {
                    return true;
                }
                if count + (s.len() - seen - 1) < need {
                    return false;
                }
            }
            false
        })
    };
    // Blocks of BLOCK^d cells are pruned first: every sdf is 1-Lipschitz,
    // so the centre value bounds the whole block.
    const BLOCK: usize = 4;
    let shape = grid.shape().to_vec();
    let bshape: Vec<usize> = shape.iter().map(|n| n.div_ceil(BLOCK)).collect();
    let ravel = |k: &[usize]| k.iter().zip(&shape).fold(0, |acc, (k, n)| acc * n + k);
    let mut hits: Vec<usize> = (0..bshape.iter().product::<usize>())
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rest = b;
            let mut first = vec![0; shape.len()];
            for a in (0..shape.len()).rev() {
                first[a] = (rest % bshape[a]) * BLOCK;
                rest /= bshape[a];
            }
            let last: Vec<usize> = first.iter().zip(&shape).map(|(f, n)| (f + BLOCK).min(*n) - 1).collect();
            let (z0, z1) = (grid.coords(ravel(&first)), grid.coords(ravel(&last)));
            let c: Vec<Complex64> = z0.iter().zip(&z1).map(|(a, b)| (a + b) * 0.5).collect();
            let r = 0.5 * crate::geometry::dist(&z0, &z1);
            let mut out = Vec::new();
            if w.sdf_at(&c) + r <= 2.0 * h {
                return out.into_iter();
            }
            let miss: Vec<bool> = terms.iter().map(|t| t.sdf_at(&c) - r >= h).collect();
            let open = subsets
                .iter()
                .zip(&need)
                .any(|(s, &need)| s.iter().filter(|&&k| !miss[k]).count() >= need);
            if !open {
                return out.into_iter();
            }
            let mut k = first.clone();
            loop {
                let i = ravel(&k);
                if cell_hits(&grid.coords(i)) {
                    out.push(i);
                }
                let mut a = shape.len();
                loop {
                    if a == 0 {
                        return out.into_iter();
                    }
                    a -= 1;
                    if k[a] < last[a] {
                        k[a] += 1;
                        break;
                    }
                    k[a] = first[a];
                }
            }
        })
        .collect();
    hits.sort_unstable();
    let mut cloud = SampleCloud::from_points(hits.into_iter().map(|i| grid.point(i)).collect(), h, SampleTag::Closure);
    cloud.kind = grid.kind();
    Ok(cloud)
}

/// Hash-grid index of a cloud for radius-bounded nearest distances.
#[derive(Debug, Clone)]
pub struct CloudIndex {
    kind: GridKind,
    cell: f64,
    points: Vec<Vec<f64>>,
    /// Buckets by hashed cell index; collisions only merge buckets.
    buckets: HashMap<u64, Vec<usize>>,
}

impl CloudIndex {
    /// `radius` bounds the queries this index answers exactly.
    pub fn new(cloud: &SampleCloud, radius: f64) -> Self {
        let points = cloud.metric_points();
        let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Self::hash(&Self::key(p, radius))).or_default().push(i);
        }
        Self {
            kind: cloud.kind,
            cell: radius,
            points,
            buckets,
        }
    }

    fn hash(key: &[i64]) -> u64 {
        key.iter()
            .fold(0x9e37_79b9_7f4a_7c15u64, |h, &k| crate::rng::mix64(h ^ k as u64))
    }

    fn key(p: &[f64], cell: f64) -> Vec<i64> {
        p.iter().map(|x| (x / cell).floor() as i64).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Metric coordinates of `z` for this cloud.
    pub fn metric(&self, z: &[Complex64]) -> Vec<f64> {
        match self.kind {
            GridKind::Reinhardt => z.iter().map(|c| c.norm()).collect(),
            GridKind::Full => z.iter().flat_map(|c| [c.re, c.im]).collect(),
        }
    }

    /// Visits squared distances to the points of the neighbouring buckets,
    /// own bucket first, until `visit` returns `true`.
    fn scan(&self, x: &[f64], mut visit: impl FnMut(f64) -> bool) {
        let base = Self::key(x, self.cell);
        let dim = base.len();
        let mut visit_bucket = |key: &[i64]| {
            if let Some(ids) = self.buckets.get(&Self::hash(key)) {
                for &i in ids {
                    let d: f64 = self.points[i].iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                    if visit(d) {
                        return true;
                    }
                }
            }
            false
        };
        if visit_bucket(&base) {
            return;
        }
        let mut offset = vec![-1i64; dim];
        let mut key = base.clone();
        loop {
            if offset.iter().any(|&o| o != 0) {
                for a in 0..dim {
                    key[a] = base[a] + offset[a];
                }
                if visit_bucket(&key) {
                    return;
                }
            }
            let mut a = 0;
            while a < dim {
                offset[a] += 1;
                if offset[a] <= 1 {
                    break;
                }
                offset[a] = -1;
                a += 1;
            }
            if a == dim {
                break;
            }
        }
    }

    /// Distance from `z` to the cloud when below the index radius, else
    /// `INFINITY`.
    pub fn distance(&self, z: &[Complex64]) -> f64 {
        let mut best = f64::INFINITY;
        self.scan(&self.metric(z), |d| {
            best = best.min(d);
            false
        });
        let d = best.sqrt();
        if d < self.cell {
            d
        } else {
            f64::INFINITY
        }
    }

    /// Whether some sample lies within `r ≤` the index radius of `z`.
    pub fn within(&self, z: &[Complex64], r: f64) -> bool {
        debug_assert!(r <= self.cell);
        let mut found = false;
        self.scan(&self.metric(z), |d| {
            found = d < r * r;
            found
        });
        found
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    /// Closed-form chart.
    Exact,
    /// Traced or rasterised leaf; lower confidence.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub defective: bool,
    /// Distance from the leaf to the `F` samples (`INFINITY` beyond `9h`).
    pub distance: f64,
    pub confidence: Confidence,
    /// The traced leaf stopped before leaving the domain on some ray.
    pub truncated: bool,
}

/// Whether the chart's moduli depend on `|q|` only.
fn is_radial(m: &MonomialChart) -> bool {
    m.offset.iter().zip(&m.exps).all(|(a, k)| *k == 0 || a.norm() == 0.0)
}

fn radial_moduli(m: &MonomialChart, r: f64) -> Vec<f64> {
    (0..m.exps.len())
        .map(|i| {
            if m.exps[i] == 0 {
                (m.offset[i] + m.coeffs[i]).norm()
            } else {
                m.coeffs[i].norm() * r.powi(m.exps[i] as i32)
            }
        })
        .collect()
}

/// Indices of the targets that may lie within `cutoff` of `φ(|q| ≤ r_max)`.
/// Uses `|z_i − a_i − c_i q^k| ≥ ||z_i − a_i| − |c_i| |q|^k|` against a
/// sampled modulus curve; every target is kept when the bound does not
/// apply.
fn near_targets(m: &MonomialChart, targets: &[Vec<f64>], kind: GridKind, r_max: f64, cutoff: f64) -> Vec<usize> {
    let offset = m.offset.iter().any(|a| a.norm() > 0.0);
    if (kind == GridKind::Reinhardt && offset) || !r_max.is_finite() {
        return (0..targets.len()).collect();
    }
    let speed: f64 = m
        .coeffs
        .iter()
        .zip(&m.exps)
        .map(|(c, &k)| c.norm() * k as f64 * r_max.powi(k as i32 - 1).max(1.0))
        .sum::<f64>()
        .max(1e-12);
    let step = 0.25 * cutoff;
    let count = ((r_max * speed / step).ceil() as usize).clamp(1, 1_000_000);
    let curve: Vec<Point> = (0..=count)
        .map(|i| {
            let r = r_max * i as f64 / count as f64;
            let z = m.coeffs.iter().zip(&m.exps).map(|(c, &k)| Complex64::new(c.norm() * r.powi(k as i32), 0.0));
            Point::new(z.collect()).expect("finite")
        })
        .collect();
    let index = CloudIndex::new(&SampleCloud::from_points(curve, step, SampleTag::Closure), cutoff + step);
    targets
        .par_iter()
        .enumerate()
        .filter(|(_, f)| {
            let moduli: Vec<Complex64> = match kind {
                GridKind::Reinhardt => f.iter().map(|v| Complex64::new(*v, 0.0)).collect(),
                GridKind::Full => f
                    .chunks(2)
                    .zip(&m.offset)
                    .map(|(c, a)| Complex64::new((Complex64::new(c[0], c[1]) - a).norm(), 0.0))
                    .collect(),
            };
            index.distance(&moduli) - 0.5 * step < cutoff
        })
        .map(|(i, _)| i)
        .collect()
}

/// Closest chart parameters to each target, in the index's metric.
fn chart_projections(m: &MonomialChart, targets: &[Vec<f64>], kind: GridKind) -> Vec<(Complex64, f64)> {
    targets
        .par_iter()
        .map(|f| match kind {
            GridKind::Reinhardt if is_radial(m) => project_radial(m, f),
            _ => project_full(m, f, kind),
        })
        .collect()
}

fn project_radial(m: &MonomialChart, f: &[f64]) -> (Complex64, f64) {
    let cost = |r: f64| -> f64 {
        radial_moduli(m, r)
            .iter()
            .zip(f)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
    };
    let mut best = (0.0, f64::INFINITY);
    for i in 0..m.exps.len() {
        if m.exps[i] == 0 || m.coeffs[i].norm() == 0.0 {
            continue;
        }
        let seed = (f[i] / m.coeffs[i].norm()).powf(1.0 / m.exps[i] as f64);
        // Golden-section search around the seed.
        let (mut a, mut b) = (0.0f64, 2.0 * seed + 1e-9);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if cost(c) < cost(d) {
                b = d;
            } else {
                a = c;
            }
        }
        for r in [0.5 * (a + b), seed] {
            let c = cost(r);
            if c < best.1 {
                best = (r, c);
            }
        }
    }
    (Complex64::new(best.0, 0.0), best.1.sqrt())
}

fn project_full(m: &MonomialChart, f: &[f64], kind: GridKind) -> (Complex64, f64) {
    let target: Vec<Complex64> = match kind {
        GridKind::Full => f.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect(),
        GridKind::Reinhardt => f.iter().map(|r| Complex64::new(*r, 0.0)).collect(),
    };
    let dist = |q: Complex64| -> f64 {
        let z = m.eval(q);
        match kind {
            GridKind::Full => crate::geometry::dist(&z, &target),
            GridKind::Reinhardt => z
                .iter()
                .zip(f)
                .map(|(a, b)| (a.norm() - b).powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    };
    let mut seeds = Vec::new();
    for i in 0..m.exps.len() {
        let k = m.exps[i];
        if k == 0 || m.coeffs[i].norm() == 0.0 {
            continue;
        }
        let w = (target[i] - m.offset[i]) / m.coeffs[i];
        let r = w.norm().powf(1.0 / k as f64);
        let a = w.arg() / k as f64;
        for j in 0..k {
            seeds.push(Complex64::from_polar(r, a + std::f64::consts::TAU * j as f64 / k as f64));
        }
    }
    let mut best = (Complex64::new(0.0, 0.0), f64::INFINITY);
    for mut q in seeds {
        if kind == GridKind::Full {
            for _ in 0..12 {
                let z = m.eval(q);
                let dz = m.derivative(q);
                let n2: f64 = dz.iter().map(|c| c.norm_sqr()).sum();
                if n2 < 1e-300 {
                    break;
                }
                let step: Complex64 = target.iter().zip(&z).zip(&dz).map(|((t, a), d)| (t - a) * d.conj()).sum();
                q += step / n2;
            }
        }
        let d = dist(q);
        if d < best.1 {
            best = (q, d);
        }
    }
    best
}

/// Image points of a leaf's planar domain, for sampled fallbacks.
fn leaf_image_samples(leaf: &LeafModel, pitch: f64) -> Vec<(Complex64, Vec<Complex64>)> {
    match (&leaf.chart, &leaf.domain) {
        (LeafChart::Flow(t), _) => t
            .rays
            .iter()
            .flat_map(|r| r.samples.iter().map(|(s, z)| (Complex64::new(*s, 0.0), z.clone())))
            .collect(),
        (LeafChart::Monomial(m), PlanarDomain::Sampled(s)) => s.cells().map(|(q, _)| (q, m.eval(q))).collect(),
        (LeafChart::Monomial(m), dom) => {
            let r = dom.outer_radius();
            let n = (2.0 * r / pitch).ceil() as i64;
            let mut out = Vec::new();
            for i in -n..=n {
                for j in -n..=n {
                    let q = Complex64::new(i as f64 * pitch, j as f64 * pitch);
                    if dom.contains(q) {
                        out.push((q, m.eval(q)));
                    }
                }
            }
            out
        }
    }
}

/// Distance from the leaf in `U` to the `F` samples, with the nearest
/// chart parameter when the chart is closed-form.
fn leaf_distance(leaf: &LeafModel, f: &SampleCloud, h: f64) -> (f64, Option<Complex64>, Confidence) {
    match (&leaf.chart, leaf.is_exact()) {
        (LeafChart::Monomial(m), true) => {
            let all = f.metric_points();
            let keep = near_targets(m, &all, f.kind, leaf.domain.outer_radius(), 9.0 * h);
            let targets: Vec<Vec<f64>> = keep.into_iter().map(|i| all[i].clone()).collect();
            let proj = chart_projections(m, &targets, f.kind);
            let mut best = (f64::INFINITY, None);
            for (q, d) in proj {
                if d < best.0 && leaf.domain.contains(q) {
                    best = (d, Some(q));
                }
            }
            (best.0, best.1, Confidence::Exact)
        }
        _ => {
            let index = CloudIndex::new(f, 9.0 * h);
            let d = leaf_image_samples(leaf, h / 4.0)
                .par_iter()
                .map(|(_, z)| index.distance(z))
                .reduce(|| f64::INFINITY, f64::min);
            (d, None, Confidence::Sampled)
        }
    }
}

/// The `F` samples farther than one cell diagonal from `E`. Leaves never
/// meet `E`, so samples on it cannot make a point defective.
fn regular_samples(x: &PolyVectorField, f: &SampleCloud) -> SampleCloud {
    let e = x.singular_template();
    if e.is_empty() || f.is_empty() {
        return f.clone();
    }
    let dim = f.points[0].dim() * if f.kind == GridKind::Full { 2 } else { 1 };
    let tol = f.resolution * (dim as f64).sqrt();
    let mut out = f.clone();
    out.points.retain(|p| e.distance(p) > tol);
    out.empty = out.points.is_empty();
    out
}

fn check_regular(x: &PolyVectorField, p: &Point) -> Result<()> {
    let v = x.eval_at(p)?;
    if x.singular_template().contains(p, 1e-12) || crate::geometry::norm(&v) < 1e-14 {
        return Err(Error::OnSingularSet(format!("{p}")));
    }
    Ok(())
}

/// Whether the leaf of `p` in the ambient `U` meets the `h`-neighbourhood
/// of the `F` samples, i.e. whether `p` is in the defective set.
pub fn defective_membership(x: &PolyVectorField, f: &SampleCloud, p: &Point, u: &DomainExpr, h: f64) -> Result<Membership> {
    check_regular(x, p)?;
    let f = &regular_samples(x, f);
    if f.is_empty() {
        return Ok(Membership {
            defective: false,
            distance: f64::INFINITY,
            confidence: Confidence::Exact,
            truncated: false,
        });
    }
    let leaf = leaf_model(x, p, u, &TraceOptions::default())?;
    let (d, _, confidence) = leaf_distance(&leaf, f, h);
    let truncated = matches!(&leaf.chart, LeafChart::Flow(t) if t.truncated);
    Ok(Membership {
        defective: d < h,
        distance: d,
        confidence,
        truncated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemovabilityKind {
    Removable,
    NotRemovable,
    Inconclusive,
}

impl RemovabilityKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RemovabilityKind::Removable => "removable",
            RemovabilityKind::NotRemovable => "not_removable",
            RemovabilityKind::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Removability {
    pub kind: RemovabilityKind,
    /// `area(A_{3h}) / area(A_{9h})` for `A_r = {q : d(φ(q), F) < r}`.
    pub area_ratio: f64,
    /// Largest image radius of a leafwise disc inside `A_h`.
    pub max_disc: f64,
}

/// Cells per side of the parameter raster of [`removability_check`].
const RASTER: usize = 250;

/// Estimates whether `L_p ∩ F` has interior in the leaf. The leafwise
/// neighbourhoods `A_r` of `F` scale like `r²` around isolated points and
/// `r` around arcs, but stay put around open patches; a disc of image
/// radius above `4h` inside `A_h` certifies a patch.

pub fn removability_check(x: &PolyVectorField, f: &SampleCloud, p: &Point, u: &DomainExpr, h: f64) -> Result<Removability> {
    check_regular(x, p)?;
    let removable = Removability {
        kind: RemovabilityKind::Removable,
        area_ratio: 0.0,
        max_disc: 0.0,
    };
    let f = &regular_samples(x, f);
    if f.is_empty() {
        return Ok(removable);
    }
    let leaf = leaf_model(x, p, u, &TraceOptions::default())?;
    let (d, _, _) = leaf_distance(&leaf, f, h);
    if d >= 9.0 * h {
        return Ok(removable);
    }
    let m = match (&leaf.chart, leaf.is_exact()) {
        (LeafChart::Monomial(m), true) => m.clone(),
        _ => {
            return Ok(Removability {
                kind: RemovabilityKind::Inconclusive,
                area_ratio: f64::NAN,
                max_disc: f64::NAN,
            })
        }
    };
    // Parameters whose image comes within 9h of F.
    let all = f.metric_points();
    let keep = near_targets(&m, &all, f.kind, leaf.domain.outer_radius(), 9.0 * h);
    let targets: Vec<Vec<f64>> = keep.into_iter().map(|i| all[i].clone()).collect();
    let near: Vec<Complex64> = chart_projections(&m, &targets, f.kind)
        .into_iter()
        .filter(|(q, dq)| *dq < 9.0 * h && leaf.domain.contains(*q))
        .map(|(q, _)| q)
        .collect();
    let speed = |q: Complex64| m.derivative(q).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let slow = near.iter().map(|q| speed(*q)).fold(f64::INFINITY, f64::min).max(1e-6);
    let margin = 12.0 * h / slow;
    let (lo, hi) = if f.kind == GridKind::Reinhardt && is_radial(&m) {
        let r = near.iter().map(|q| q.norm()).fold(0.0, f64::max) + margin;
        (Complex64::new(-r, -r), Complex64::new(r, r))
    } else {
        let (mut lo, mut hi) = (near[0], near[0]);
        for q in &near {
            lo = Complex64::new(lo.re.min(q.re), lo.im.min(q.im));
            hi = Complex64::new(hi.re.max(q.re), hi.im.max(q.im));
        }
        (lo - Complex64::new(margin, margin), hi + Complex64::new(margin, margin))
    };
    let pitch = (hi.re - lo.re).max(hi.im - lo.im) / RASTER as f64;
    let fine = CloudIndex::new(f, 3.0 * h);
    let index = CloudIndex::new(f, 9.0 * h);
    let dist_at = |q: Complex64| -> f64 {
        if !leaf.domain.contains(q) {
            return f64::INFINITY;
        }
        fine.distance(&m.eval(q))
    };
    let nx = ((hi.re - lo.re) / pitch).ceil() as usize + 1;
    let ny = ((hi.im - lo.im) / pitch).ceil() as usize + 1;
    let (a3, a9) = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let q = lo + Complex64::new((k / ny) as f64 * pitch, (k % ny) as f64 * pitch);
            if !leaf.domain.contains(q) {
                return (0.0, 0.0);
            }
            let z = m.eval(q);
            let near3 = fine.distance(&z) < 3.0 * h;
            let near9 = near3 || index.within(&z, 9.0 * h);
            let w = speed(q).powi(2) * pitch * pitch;
            (near3 as u8 as f64 * w, near9 as u8 as f64 * w)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let ratio = if a9 > 0.0 { a3 / a9 } else { 0.0 };
    let core = SampledDomain::from_predicate(|q| dist_at(q) < h, lo, hi, pitch, None)?;
    let max_disc = core
        .cells()
        .map(|(q, c)| (c - pitch * std::f64::consts::SQRT_2).max(0.0) * speed(q))
        .fold(0.0, f64::max);
    let kind = if max_disc > 4.0 * h {
        RemovabilityKind::NotRemovable
    } else if ratio < 0.5 {
        RemovabilityKind::Removable
    } else {
        RemovabilityKind::Inconclusive
    };
    Ok(Removability {
        kind,
        area_ratio: ratio,
        max_disc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::families::{arm_bidisc, arm_tridisc, shrinking_shell};
    use crate::foliation::FieldPreset;

    #[test]
    fn limit_set_inside_e_makes_nothing_defective() {
        let fam = arm_tridisc(FieldPreset::XZyZy).unwrap();
        let f = detect_f(&fam.sequence, &fam.w, &fam.ambient.bounding_box(), 0.05, 200).unwrap();
        assert!(!f.is_empty());
        // The leaf {(t, 1.5, 0)} accumulates on (0, 1.5, 0) ∈ F ⊂ E.
        let p = Point::real(&[0.05, 1.5, 0.0]);
        let m = defective_membership(&fam.field, &f, &p, &fam.ambient, 0.05).unwrap();
        assert!(!m.defective, "{m:?}");
    }

    #[test]
    fn arm_limit_set_is_the_annulus() {
        let fam = arm_bidisc();
        let bb = fam.ambient.bounding_box();
        let f = detect_f(&fam.sequence, &fam.w, &bb, 0.02, 200).unwrap();
        assert!(!f.is_empty());
        let decl = fam.sequence.declared_f().unwrap();
        for p in &f.points {
            assert!(decl.distance(p) <= 0.04, "{p}");
        }
        // Covers the segment 1.1 ≤ |x| ≤ 1.9 on the x axis.
        for k in 0..=8 {
            let r = 1.1 + 0.1 * k as f64;
            assert!(f.points.iter().any(|p| (p.coords()[0].re - r).abs() < 0.03 && p.coords()[1].norm() < 0.03));
        }
    }

    #[test]
    fn hausdorff_family_has_empty_limit_set() {
        let fam = shrinking_shell();
        let f = detect_f(&fam.sequence, &fam.w, &fam.ambient.bounding_box(), 0.02, 200).unwrap();
        assert!(f.is_empty(), "{}", f.len());
    }

    #[test]
    fn tridisc_limit_set_is_on_the_y_axis() {
        let fam = arm_tridisc(FieldPreset::XZyZy).unwrap();
        let f = detect_f(&fam.sequence, &fam.w, &fam.ambient.bounding_box(), 0.02, 200).unwrap();
        assert!(!f.is_empty());
        let decl = fam.sequence.declared_f().unwrap();
        assert!(f.points.iter().all(|p| decl.distance(p) <= 0.04));
    }

    #[test]
    fn radial_leaf_in_the_arm_is_defective_and_not_removable() {
        let fam = arm_bidisc();
        let h = 0.02;
        let f = detect_f(&fam.sequence, &fam.w, &fam.ambient.bounding_box(), h, 200).unwrap();
        let p = Point::real(&[0.5, 0.0]);
        let m = defective_membership(&fam.field, &f, &p, &fam.ambient, h).unwrap();
        assert!(m.defective);
        let r = removability_check(&fam.field, &f, &p, &fam.ambient, h).unwrap();
        assert_eq!(r.kind, RemovabilityKind::NotRemovable, "{r:?}");
        let off = defective_membership(&fam.field, &f, &Point::real(&[0.3, 0.3]), &fam.ambient, h).unwrap();
        assert!(!off.defective);
    }

    #[test]
    fn empty_limit_set_is_vacuous() {
        let fam = arm_bidisc();
        let e = SampleCloud::from_points(vec![], 0.1, SampleTag::Closure);
        let p = Point::real(&[0.5, 0.2]);
        assert!(!defective_membership(&fam.field, &e, &p, &fam.ambient, 0.1).unwrap().defective);
        assert_eq!(
            removability_check(&fam.field, &e, &p, &fam.ambient, 0.1).unwrap().kind,
            RemovabilityKind::Removable
        );
    }
}
