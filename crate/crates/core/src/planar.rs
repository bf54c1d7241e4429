//! Poincaré densities of planar model domains, curvature −1.
//!
//! The unit disc carries `2/(1−|q|²)|dq|`; every other density here is the
//! push-forward of that one through an explicit covering map.

use std::f64::consts::PI;

use crate::{Complex64, Error, Result};

/// Inputs closer than this to a puncture or boundary circle are rejected.
pub const SINGULAR_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityProvenance {
    ClosedForm,
    /// Pulled back through a covering map, evaluated pointwise.
    Oracle,
    BoundPair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicDensity {
    pub value: f64,
    pub provenance: DensityProvenance,
}

fn radius_ok(name: &str, r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be a positive real, got {r}")))
    }
}

fn finite(q: Complex64) -> Result<()> {
    if q.re.is_finite() && q.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("non-finite planar point {q}")))
    }
}

/// `2R/(R² − |q|²)` on `D(0, R)`.
pub fn density_disc(q: Complex64, big_r: f64) -> Result<HyperbolicDensity> {
    radius_ok("disc radius", big_r)?;
    finite(q)?;
    let m = q.norm();
    if m >= big_r - SINGULAR_MARGIN {
        return Err(Error::OutsideDomain(format!("|q| = {m} not below R = {big_r}")));
    }
    Ok(HyperbolicDensity {
        value: 2.0 * big_r / (big_r * big_r - m * m),
        provenance: DensityProvenance::ClosedForm,
    })
}

/// `2/(|q|·|log(|q|²/R²)|)` on `D(0, R)∖{0}`.
pub fn density_punctured_disc(q: Complex64, big_r: f64) -> Result<HyperbolicDensity> {
    radius_ok("punctured disc radius", big_r)?;
    finite(q)?;
    let m = q.norm();
    if m <= SINGULAR_MARGIN || m >= big_r - SINGULAR_MARGIN {
        return Err(Error::OutsideDomain(format!(
            "|q| = {m} not in (0, {big_r}); the density diverges there"
        )));
    }
    Ok(HyperbolicDensity {
        value: 2.0 / (m * ((m * m) / (big_r * big_r)).ln().abs()),
        provenance: DensityProvenance::ClosedForm,
    })
}

/// Density of `{r < |q| < R}` through the covering chain
/// `q ↦ ζ = i(π/L)(log q − log r) ↦ u = e^ζ` onto the upper half plane,
/// `L = log(R/r)`, pulling back `|du|/Im u`.
pub fn density_annulus(q: Complex64, r: f64, big_r: f64) -> Result<HyperbolicDensity> {
    radius_ok("inner radius", r)?;
    radius_ok("outer radius", big_r)?;
    finite(q)?;
    if r >= big_r {
        return Err(Error::InvalidInput(format!("annulus needs r < R, got {r} ≥ {big_r}")));
    }
    let m = q.norm();
    if m <= r + SINGULAR_MARGIN || m >= big_r - SINGULAR_MARGIN {
        return Err(Error::OutsideDomain(format!("|q| = {m} not in ({r}, {big_r})")));
    }
    let l = (big_r / r).ln();
    let i = Complex64::i();
    let k = i * (PI / l);
    let zeta = k * (q.ln() - r.ln());
    let u = zeta.exp();
    let du_dq = u * k / q;
    Ok(HyperbolicDensity {
        value: du_dq.norm() / u.im,
        provenance: DensityProvenance::Oracle,
    })
}

/// Planar model domains carrying an explicit Poincaré density.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanarDomain {
    Disc { center: Complex64, radius: f64 },
    PuncturedDisc { center: Complex64, radius: f64 },
    Annulus { center: Complex64, inner: f64, outer: f64 },
    Sampled(SampledDomain),
    Star(StarDomain),
}

impl PlanarDomain {
    pub fn disc(radius: f64) -> Result<Self> {
        radius_ok("disc radius", radius)?;
        Ok(PlanarDomain::Disc {
            center: Complex64::new(0.0, 0.0),
            radius,
        })
    }

    pub fn punctured_disc(radius: f64) -> Result<Self> {
        radius_ok("punctured disc radius", radius)?;
        Ok(PlanarDomain::PuncturedDisc {
            center: Complex64::new(0.0, 0.0),
            radius,
        })
    }

    pub fn annulus(inner: f64, outer: f64) -> Result<Self> {
        radius_ok("inner radius", inner)?;
        radius_ok("outer radius", outer)?;
        if inner >= outer {
            return Err(Error::InvalidInput(format!("annulus needs r < R, got {inner} ≥ {outer}")));
        }
        Ok(PlanarDomain::Annulus {
            center: Complex64::new(0.0, 0.0),
            inner,
            outer,
        })
    }

    pub fn contains(&self, q: Complex64) -> bool {
        match self {
            PlanarDomain::Disc { center, radius } => (q - center).norm() < *radius,
            PlanarDomain::PuncturedDisc { center, radius } => {
                let m = (q - center).norm();
                m > 0.0 && m < *radius
            }
            PlanarDomain::Annulus { center, inner, outer } => {
                let m = (q - center).norm();
                m > *inner && m < *outer
            }
            PlanarDomain::Sampled(s) => s.contains(q),
            PlanarDomain::Star(s) => s.contains(q),
        }
    }

    /// Closed-form density of a catalog kind; `Sampled` domains answer only
    /// through [`density_bounds`].
    pub fn density(&self, q: Complex64) -> Result<HyperbolicDensity> {
        match self {
            PlanarDomain::Disc { center, radius } => density_disc(q - center, *radius),
            PlanarDomain::PuncturedDisc { center, radius } => density_punctured_disc(q - center, *radius),
            PlanarDomain::Annulus { center, inner, outer } => density_annulus(q - center, *inner, *outer),
            PlanarDomain::Sampled(_) | PlanarDomain::Star(_) => Err(Error::InvalidInput(
                "sampled domains have density bounds only".into(),
            )),
        }
    }

    /// Largest `|q|` over the domain, for catalog kinds centred at 0.
    pub fn outer_radius(&self) -> f64 {
        match self {
            PlanarDomain::Disc { center, radius } | PlanarDomain::PuncturedDisc { center, radius } => {
                center.norm() + radius
            }
            PlanarDomain::Annulus { center, outer, .. } => center.norm() + outer,
            PlanarDomain::Sampled(s) => s.max_modulus(),
            PlanarDomain::Star(s) => s.radii.iter().copied().fold(0.0, f64::max),
        }
    }
}

/// A domain star-shaped about 0, known by its radius along `m` equally
/// spaced rays. Between two rays the boundary is the chord joining the ray
/// tips.
#[derive(Debug, Clone, PartialEq)]
pub struct StarDomain {
    radii: Vec<f64>,
}

impl StarDomain {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.len() < 3 {
            return Err(Error::InvalidInput("star domain needs at least 3 rays".into()));
        }
        for r in &radii {
            radius_ok("ray radius", *r)?;
        }
        Ok(Self { radii })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn ray_angle(&self, j: usize) -> f64 {
        std::f64::consts::TAU * j as f64 / self.radii.len() as f64
    }

    pub fn radius_at(&self, theta: f64) -> f64 {
        let m = self.radii.len();
        let step = std::f64::consts::TAU / m as f64;
        let t = theta.rem_euclid(std::f64::consts::TAU) / step;
        let j = (t.floor() as usize).min(m - 1);
        let (a, b) = (self.radii[j], self.radii[(j + 1) % m]);
        let u = (t - j as f64).clamp(0.0, 1.0) * step;
        a * b * step.sin() / (a * u.sin() + b * (step - u).sin())
    }

    pub fn contains(&self, q: Complex64) -> bool {
        q.norm() < self.radius_at(q.arg())
    }

    pub fn inner_radius(&self) -> f64 {
        self.radii.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn tip(&self, j: usize) -> Complex64 {
        Complex64::from_polar(self.radii[j % self.radii.len()], self.ray_angle(j))
    }

    /// Distance from `c` to the boundary polygon; 0 when `c` is outside.
    pub fn boundary_distance(&self, c: Complex64) -> f64 {
        if !self.contains(c) {
            return 0.0;
        }
        (0..self.radii.len())
            .map(|j| segment_distance(c, self.tip(j), self.tip(j + 1)))
            .fold(f64::INFINITY, f64::min)
    }
}

fn segment_distance(c: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let t = (((c - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0);
    (a + ab * t - c).norm()
}

/// A planar open set known through a membership raster.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDomain {
    lo: Complex64,
    h: f64,
    nx: usize,
    ny: usize,
    inside: Vec<bool>,
    /// Distance from each cell centre to the nearest outside cell centre.
    clearance: Vec<f64>,
    puncture: Option<Complex64>,
    /// Clearance around the puncture, ignoring the puncture itself.
    puncture_clearance: f64,
}

impl SampledDomain {
    /// Rasterises `{ q ∈ [lo, hi] : inside(q) }` at pitch `h`. A declared
    /// `puncture` is a point removed from the set; it is not sampled.
    pub fn from_predicate(
        inside: impl Fn(Complex64) -> bool + Sync,
        lo: Complex64,
        hi: Complex64,
        h: f64,
        puncture: Option<Complex64>,
    ) -> Result<Self> {
        radius_ok("raster pitch", h)?;
        finite(lo)?;
        finite(hi)?;
        if hi.re <= lo.re || hi.im <= lo.im {
            return Err(Error::InvalidInput("raster box is empty".into()));
        }
        // One ring of guaranteed outside cells keeps clearances finite.
        let lo = lo - Complex64::new(h, h);
        let nx = ((hi.re - lo.re) / h).ceil() as usize + 2;
        let ny = ((hi.im - lo.im) / h).ceil() as usize + 2;
        if nx.saturating_mul(ny) > 64_000_000 {
            return Err(Error::InvalidInput("raster too fine".into()));
        }
        let cell = |i: usize, j: usize| lo + Complex64::new(i as f64 * h, j as f64 * h);
        let bits: Vec<bool> = {
            use rayon::prelude::*;
            (0..nx * ny)
                .into_par_iter()
                .map(|k| {
                    let (i, j) = (k / ny, k % ny);
                    i > 0 && j > 0 && i + 1 < nx && j + 1 < ny && inside(cell(i, j))
                })
                .collect()
        };
        let clearance = planar_edt(&bits.iter().map(|b| !b).collect::<Vec<_>>(), nx, ny, h);
        let mut s = Self {
            lo,
            h,
            nx,
            ny,
            inside: bits,
            clearance,
            puncture,
            puncture_clearance: 0.0,
        };
        if let Some(p) = puncture {
            s.puncture_clearance = s.clearance_at(p).unwrap_or(0.0);
        }
        Ok(s)
    }

    pub fn pitch(&self) -> f64 {
        self.h
    }

    /// Radius of a punctured disc about the puncture inside the set.
    pub fn puncture_clearance(&self) -> f64 {
        self.puncture_clearance
    }

    pub fn puncture(&self) -> Option<Complex64> {
        self.puncture
    }

    fn cell_of(&self, q: Complex64) -> Option<usize> {
        let i = ((q.re - self.lo.re) / self.h).round();
        let j = ((q.im - self.lo.im) / self.h).round();
        if i < 0.0 || j < 0.0 || i >= self.nx as f64 || j >= self.ny as f64 {
            return None;
        }
        Some(i as usize * self.ny + j as usize)
    }

    fn centre(&self, k: usize) -> Complex64 {
        self.lo + Complex64::new((k / self.ny) as f64 * self.h, (k % self.ny) as f64 * self.h)
    }

    pub fn contains(&self, q: Complex64) -> bool {
        if self.puncture.is_some_and(|p| p == q) {
            return false;
        }
        self.cell_of(q).is_some_and(|k| self.inside[k])
    }

    /// Conservative radius of a disc around `q` inside the set: the cell
    /// clearance minus the offset to the cell centre and one cell diagonal.
    pub fn clearance_at(&self, q: Complex64) -> Option<f64> {
        let k = self.cell_of(q)?;
        if !self.inside[k] {
            return None;
        }
        let r = self.clearance[k] - (q - self.centre(k)).norm() - self.h * std::f64::consts::SQRT_2;
        (r > 0.0).then_some(r)
    }

    /// Largest distance from `q` to a set cell, plus one cell diagonal.
    pub fn max_distance_from(&self, q: Complex64) -> f64 {
        use rayon::prelude::*;
        let far = (0..self.inside.len())
            .into_par_iter()
            .filter(|k| self.inside[*k])
            .map(|k| (self.centre(k) - q).norm())
            .reduce(|| 0.0, f64::max);
        far + self.h * std::f64::consts::SQRT_2
    }

    pub fn max_modulus(&self) -> f64 {
        self.max_distance_from(Complex64::new(0.0, 0.0))
    }

    /// Inside cell centres, for Monte-Carlo candidates.
    pub fn cells(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        (0..self.inside.len())
            .filter(|k| self.inside[*k])
            .map(|k| (self.centre(k), self.clearance[k]))
    }

    pub fn is_empty(&self) -> bool {
        !self.inside.iter().any(|b| *b)
    }

    /// Four-neighbour component of the cell holding `q0`.
    pub fn component_of(&self, q0: Complex64) -> Result<SampledDomain> {
        let seed = self
            .cell_of(q0)
            .filter(|k| self.inside[*k])
            .ok_or_else(|| Error::OutsideDomain(format!("{q0} is not in the raster")))?;
        let (nx, ny) = (self.nx, self.ny);
        let mut keep = vec![false; nx * ny];
        keep[seed] = true;
        let mut queue = std::collections::VecDeque::from([seed]);
        while let Some(k) = queue.pop_front() {
            let (i, j) = (k / ny, k % ny);
            let mut near = Vec::with_capacity(4);
            if i > 0 {
                near.push(k - ny);
            }
            if i + 1 < nx {
                near.push(k + ny);
            }
            if j > 0 {
                near.push(k - 1);
            }
            if j + 1 < ny {
                near.push(k + 1);
            }
            for n in near {
                if self.inside[n] && !keep[n] {
                    keep[n] = true;
                    queue.push_back(n);
                }
            }
        }
        let clearance = planar_edt(&keep.iter().map(|b| !b).collect::<Vec<_>>(), nx, ny, self.h);
        let mut s = Self {
            inside: keep,
            clearance,
            puncture_clearance: 0.0,
            ..self.clone()
        };
        if let Some(p) = s.puncture {
            s.puncture_clearance = s.clearance_at(p).unwrap_or(0.0);
        }
        Ok(s)
    }
}

/// Exact Euclidean distance from each cell to the nearest `target` cell.
fn planar_edt(target: &[bool], nx: usize, ny: usize, h: f64) -> Vec<f64> {
    let mut f: Vec<f64> = target.iter().map(|t| if *t { 0.0 } else { f64::INFINITY }).collect();
    for i in 0..nx {
        let line: Vec<f64> = (0..ny).map(|j| f[i * ny + j]).collect();
        for (j, v) in edt_line(&line).into_iter().enumerate() {
            f[i * ny + j] = v;
        }
    }
    for j in 0..ny {
        let line: Vec<f64> = (0..nx).map(|i| f[i * ny + j]).collect();
        for (i, v) in edt_line(&line).into_iter().enumerate() {
            f[i * ny + j] = v;
        }
    }
    f.into_iter().map(|d| d.sqrt() * h).collect()
}

/// Lower envelope of the parabolas `(q − p)² + f(p)`, linear time.
fn edt_line(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![f64::INFINITY; n];
    let mut v: Vec<usize> = Vec::with_capacity(n);
    let mut z: Vec<f64> = Vec::with_capacity(n + 1);
    let meet = |a: usize, b: usize| ((f[b] + (b * b) as f64) - (f[a] + (a * a) as f64)) / (2.0 * (b as f64 - a as f64));
    for q in (0..n).filter(|q| f[*q].is_finite()) {
        while let Some(&last) = v.last() {
            let s = meet(last, q);
            if s <= z[z.len() - 1] {
                v.pop();
                z.pop();
            } else {
                break;
            }
        }
        z.push(v.last().map_or(f64::NEG_INFINITY, |&last| meet(last, q)));
        v.push(q);
    }
    if v.is_empty() {
        return out;
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while k + 1 < v.len() && z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityBounds {
    pub lower: f64,
    /// `None` when no catalog subdomain around `q` was found.
    pub upper: Option<f64>,
}

/// Brackets the density of a sampled domain at `q` between catalog
/// superdomains (lower) and subdomains (upper).
pub fn density_bounds(d: &SampledDomain, q: Complex64) -> Result<DensityBounds> {
    finite(q)?;
    if !d.contains(q) {
        return Err(Error::OutsideDomain(format!("{q} is not interior to the sampled domain")));
    }
    let mut lower = density_disc(Complex64::new(0.0, 0.0), d.max_distance_from(q))?.value;
    let mut upper = d
        .clearance_at(q)
        .map(|r| 2.0 / r);
    if let Some(p) = d.puncture {
        let rel = q - p;
        let outer = d.max_distance_from(p);
        if rel.norm() > SINGULAR_MARGIN {
            lower = lower.max(density_punctured_disc(rel, outer)?.value);
            let inner = d.puncture_clearance;
            if rel.norm() < inner - SINGULAR_MARGIN {
                let v = density_punctured_disc(rel, inner)?.value;
                upper = Some(upper.map_or(v, |u| u.min(v)));
            }
        }
    }
    if let Some(u) = upper {
        debug_assert!(lower <= u * (1.0 + 1e-12));
    }
    Ok(DensityBounds { lower, upper })
}

/// Holomorphic covering maps from the unit disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cover {
    Identity,
    /// `z ↦ R z` onto `D(0, R)`.
    Scaled { radius: f64 },
    /// `z ↦ R·exp(−(1+z)/(1−z))` onto `D(0, R)∖{0}`.
    Exponential { radius: f64 },
    /// `z ↦ r·exp(−i(L/π)·log u)`, `u = i(1+z)/(1−z)`, onto `{r < |q| < R}`.
    Annular { inner: f64, outer: f64 },
}

impl Cover {
    pub fn target(&self) -> Result<PlanarDomain> {
        match *self {
            Cover::Identity => PlanarDomain::disc(1.0),
            Cover::Scaled { radius } => PlanarDomain::disc(radius),
            Cover::Exponential { radius } => PlanarDomain::punctured_disc(radius),
            Cover::Annular { inner, outer } => PlanarDomain::annulus(inner, outer),
        }
    }

    /// `(π(z), π'(z))`.
    pub fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        finite(z)?;
        if z.norm() >= 1.0 - SINGULAR_MARGIN {
            return Err(Error::OutsideDomain(format!("{z} is not in the unit disc")));
        }
        let one = Complex64::new(1.0, 0.0);
        Ok(match *self {
            Cover::Identity => (z, one),
            Cover::Scaled { radius } => (z * radius, Complex64::new(radius, 0.0)),
            Cover::Exponential { radius } => {
                let w = (-(one + z) / (one - z)).exp() * radius;
                (w, w * (-2.0) / ((one - z) * (one - z)))
            }
            Cover::Annular { inner, outer } => {
                let i = Complex64::i();
                let l = (outer / inner).ln();
                let u = i * (one + z) / (one - z);
                let du = i * 2.0 / ((one - z) * (one - z));
                let q = (-i * (l / PI) * u.ln()).exp() * inner;
                (q, q * (-i * (l / PI)) * du / u)
            }
        })
    }
}

/// `|λ_target(π(z))·|π'(z)| − λ_D(z)|`; zero up to rounding for a true
/// local isometry.
pub fn pushforward_consistency_check(cover: &Cover, z: Complex64) -> Result<f64> {
    let (w, dw) = cover.eval(z)?;
    let target = cover.target()?.density(w)?.value;
    let source = density_disc(z, 1.0)?.value;
    Ok((target * dw.norm() - source).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edt_line_matches_brute_force() {
        let inf = f64::INFINITY;
        for f in [
            vec![inf, 0.0, inf, inf, 4.0, inf, 0.0, inf],
            vec![inf, inf, inf],
            vec![9.0, 1.0, 0.0, 25.0, inf, 2.0],
            vec![0.0],
        ] {
            let brute: Vec<f64> = (0..f.len())
                .map(|q| {
                    (0..f.len())
                        .map(|p| (q as f64 - p as f64).powi(2) + f[p])
                        .fold(inf, f64::min)
                })
                .collect();
            assert_eq!(edt_line(&f), brute);
        }
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn disc_values() {
        assert_eq!(density_disc(c(0.0), 1.0).unwrap().value, 2.0);
        assert_eq!(density_disc(c(0.0), 2.0).unwrap().value, 1.0);
        assert!((density_disc(c(0.5), 1.0).unwrap().value - 8.0 / 3.0).abs() < 1e-12);
        assert!(density_disc(c(1.0), 1.0).is_err());
    }

    #[test]
    fn punctured_disc_values() {
        let v1 = density_punctured_disc(c(0.5), 1.0).unwrap().value;
        assert!((v1 - 2.0 / (0.5 * 4f64.ln())).abs() < 1e-12);
        assert!((v1 - 2.885390).abs() < 1e-6);
        let v2 = density_punctured_disc(c(0.5), 2.0).unwrap().value;
        assert!((v2 - 1.442695).abs() < 1e-6);
        assert!(density_punctured_disc(c(0.0), 1.0).is_err());
        let mut prev = 0.0;
        for k in 2..40 {
            let v = density_punctured_disc(c(2f64.powi(-k)), 1.0).unwrap().value;
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn annulus_oracle() {
        let p = density_punctured_disc(c(0.5), 1.0).unwrap().value;
        let a = density_annulus(c(0.5), 1e-9, 1.0).unwrap();
        assert_eq!(a.provenance, DensityProvenance::Oracle);
        // The gap decays like 1/log(1/r)², so 1e-4 needs r far below 1e-8.
        assert!((a.value - p).abs() < 1e-2);
        assert!((density_annulus(c(0.5), 1e-100, 1.0).unwrap().value - p).abs() < 1e-4);
        let mut prev = f64::INFINITY;
        for k in [2, 4, 8, 16, 32, 64, 128, 256] {
            let gap = density_annulus(c(0.5), 10f64.powi(-k), 1.0).unwrap().value - p;
            assert!(gap > 0.0 && gap < prev);
            prev = gap;
        }
        assert!(density_annulus(c(0.5), 0.1, 1.0).unwrap().value > density_disc(c(0.5), 1.0).unwrap().value);
        // The inversion q ↦ rR/q̄ is an isometry, so |q|·λ(q) is symmetric
        // about the core circle |q| = √(rR) and minimal there.
        let (r, big_r) = (0.2f64, 1.0f64);
        let mid = (r * big_r).sqrt();
        let scaled = |t: f64| t * density_annulus(Complex64::from_polar(t, 1.0), r, big_r).unwrap().value;
        for t in [0.25, 0.3, 0.4, 0.6, 0.9] {
            assert!(scaled(t) >= scaled(mid));
            assert!((scaled(t) - scaled(r * big_r / t)).abs() < 1e-12);
        }
    }

    #[test]
    fn covers_are_local_isometries() {
        for cover in [
            Cover::Identity,
            Cover::Scaled { radius: 2.0 },
            Cover::Exponential { radius: 1.0 },
            Cover::Annular { inner: 0.3, outer: 1.5 },
        ] {
            for z in [c(0.0), c(0.3), Complex64::new(-0.2, 0.6)] {
                let r = pushforward_consistency_check(&cover, z).unwrap();
                assert!(r < 1e-12, "{cover:?} at {z}: {r}");
            }
        }
    }

    #[test]
    fn sampled_bounds_bracket_closed_forms() {
        let disc = SampledDomain::from_predicate(|q| q.norm() < 1.0, Complex64::new(-1.0, -1.0), Complex64::new(1.0, 1.0), 0.01, None)
            .unwrap();
        let b = density_bounds(&disc, c(0.0)).unwrap();
        assert!(b.lower <= 2.0 && 2.0 <= b.upper.unwrap());
        let punct = SampledDomain::from_predicate(
            |q| q.norm() < 1.0,
            Complex64::new(-1.0, -1.0),
            Complex64::new(1.0, 1.0),
            0.01,
            Some(c(0.0)),
        )
        .unwrap();
        let b = density_bounds(&punct, c(0.5)).unwrap();
        assert!(b.lower <= 2.885390 && 2.885390 <= b.upper.unwrap(), "{b:?}");
    }
}
