//! The modulus of uniformization `η(p) = sup |f'(0)|` over holomorphic discs
//! `f` tangent to the foliation with `f(0) = p`.
//!
//! With the unit disc carrying density `λ_D(0) = 2`, a leaf chart `φ: Ω → L`
//! gives `η(φ(q₀)) = ‖φ'(q₀)‖ / λ_Ω(q₀)`, and any holomorphic `g: D → Ω`
//! with `g(0) = q₀` gives the lower bound `‖φ'(q₀)‖·|g'(0)| / 2`.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;

use crate::foliation::{
    catalog_chart, traced_leaf_model, truncate_chart, LeafChart, LeafModel, LeafProvenance, PolyVectorField,
    TraceOptions,
};
use crate::geometry::{norm, DomainExpr, Point};
use crate::planar::{density_bounds, density_disc, density_punctured_disc, Cover, PlanarDomain};
use crate::rng::SeedStream;
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaMethod {
    ClosedForm,
    McSandwich,
}

impl EtaMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EtaMethod::ClosedForm => "closed_form",
            EtaMethod::McSandwich => "mc_sandwich",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaEstimate {
    pub lower: f64,
    /// `f64::INFINITY` when no upper bound is available.
    pub upper: f64,
    pub exact: Option<f64>,
    pub method: EtaMethod,
    pub seed: u64,
    pub budget: usize,
    /// No admissible Monte-Carlo candidate was found.
    pub starved: bool,
}

impl EtaEstimate {
    pub fn closed_form(value: f64) -> Self {
        Self {
            lower: value,
            upper: value,
            exact: Some(value),
            method: EtaMethod::ClosedForm,
            seed: 0,
            budget: 0,
            starved: false,
        }
    }

    /// Best point value: the exact value, else the midpoint of a finite
    /// sandwich, else the lower bound.
    pub fn value(&self) -> f64 {
        match self.exact {
            Some(v) => v,
            None if self.upper.is_finite() => 0.5 * (self.lower + self.upper),
            None => self.lower,
        }
    }

    /// `(upper − lower) / upper`; 0 for closed forms.
    pub fn relative_width(&self) -> f64 {
        if self.exact.is_some() || self.upper == 0.0 {
            0.0
        } else {
            (self.upper - self.lower) / self.upper
        }
    }

    /// Distance between the two intervals `[lower, upper]`.
    pub fn gap_to(&self, other: &EtaEstimate) -> f64 {
        (self.lower - other.upper).max(other.lower - self.upper).max(0.0)
    }
}

fn on_singular(x: &PolyVectorField, p: &Point) -> Result<bool> {
    let v = x.eval_at(p)?;
    Ok(x.singular_template().contains(p, 1e-12) || norm(&v) < 1e-14)
}

/// `η = 0` on the singular set.
pub fn eta_on_e(x: &PolyVectorField, p: &Point) -> Result<EtaEstimate> {
    if !on_singular(x, p)? {
        return Err(Error::NotOnSingularSet(format!("{p}")));
    }
    Ok(EtaEstimate::closed_form(0.0))
}

/// `‖φ'(q₀)‖ / λ_Ω(q₀)` on an exactly truncated catalog leaf.
pub fn eta_exact(leaf: &LeafModel, p: &Point) -> Result<EtaEstimate> {
    let chart = match (&leaf.chart, leaf.provenance) {
        (LeafChart::Monomial(m), LeafProvenance::CatalogExact) => m,
        _ => return Err(Error::InvalidInput("closed-form η needs an exact catalog leaf".into())),
    };
    let q0 = leaf.base_preimage;
    let image = chart.eval(q0);
    if crate::geometry::dist(&image, p.coords()) > 1e-9 * (1.0 + p.norm()) {
        return Err(Error::InvalidInput(format!("{p} is not φ(q₀) for this chart")));
    }
    let lambda = leaf.domain.density(q0)?.value;
    Ok(EtaEstimate::closed_form(leaf.base_derivative_norm() / lambda))
}

/// Leaf of `p` in `D`: catalog chart if available, otherwise traced with
/// `opts`.
pub fn leaf_model(x: &PolyVectorField, p: &Point, d: &DomainExpr, opts: &TraceOptions) -> Result<LeafModel> {
    if p.dim() != d.dim() || !d.is_inside(p) {
        return Err(Error::OutsideDomain(format!("{p} is not in the domain")));
    }
    match catalog_chart(x, p)? {
        Some((chart, q0)) => {
            let (domain, provenance) = truncate_chart(&chart, d, q0, None)?;
            Ok(LeafModel {
                chart: LeafChart::Monomial(chart),
                domain,
                base_preimage: q0,
                provenance,
            })
        }
        None => traced_leaf_model(x, p, d, opts),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McFamily {
    /// Universal cover of a catalog `Ω`, recentred by a disc automorphism.
    Cover,
    SubDisc,
    SubPuncturedDisc,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOutcome {
    /// Largest `|g'(0)|·(1−ε)` found, in the leaf's planar coordinate.
    pub best_derivative: f64,
    pub family: Option<McFamily>,
    pub epsilon: f64,
}

/// `|π'(z₀)|(1−|z₀|²)` for the cover `π` with `π(z₀) = w`.
fn cover_derivative(cover: Cover, w: Complex64) -> Option<f64> {
    let one = Complex64::new(1.0, 0.0);
    let z0 = match cover {
        Cover::Identity => w,
        Cover::Scaled { radius } => w / radius,
        Cover::Exponential { radius } => {
            let l = (w / radius).ln();
            (one + l) / (l - one)
        }
        Cover::Annular { inner, outer } => {
            let big_l = (outer / inner).ln();
            let u = (Complex64::i() * (std::f64::consts::PI / big_l) * (w / inner).ln()).exp();
            (u - Complex64::i()) / (u + Complex64::i())
        }
    };
    let (_, d) = cover.eval(z0).ok()?;
    Some(d.norm() * (1.0 - z0.norm_sqr()))
}

/// `|g'(0)|` for `g: D → D(c, ρ)` with `g(0) = q₀`.
fn disc_derivative(c: Complex64, rho: f64, q0: Complex64) -> Option<f64> {
    let d2 = (q0 - c).norm_sqr();
    (d2 < rho * rho).then(|| (rho * rho - d2) / rho)
}

/// `|g'(0)|` for the universal cover `g: D → D*(c, r)` with `g(0) = q₀`.
fn punctured_derivative(c: Complex64, r: f64, q0: Complex64) -> Option<f64> {
    let rel = q0 - c;
    if rel.norm() >= r || rel.norm() < 1e-300 {
        return None;
    }
    density_punctured_disc(rel, r).ok().map(|d| 2.0 / d.value)
}

fn random_unit(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..TAU))
}

/// `reach` is the largest distance from `q0` to a sampled domain's cells.
fn trial(domain: &PlanarDomain, q0: Complex64, reach: f64, rng: &mut impl Rng, family: McFamily) -> Option<f64> {
    let u: f64 = rng.gen();
    match (domain, family) {
        (PlanarDomain::Disc { center, radius }, McFamily::Cover) => {
            cover_derivative(Cover::Scaled { radius: *radius }, q0 - center)
        }
        (PlanarDomain::PuncturedDisc { center, radius }, McFamily::Cover) => {
            cover_derivative(Cover::Exponential { radius: *radius }, q0 - center)
        }
        (PlanarDomain::Annulus { center, inner, outer }, McFamily::Cover) => cover_derivative(
            Cover::Annular {
                inner: *inner,
                outer: *outer,
            },
            q0 - center,
        ),
        (PlanarDomain::Disc { center, radius }, McFamily::SubDisc) => {
            let c = center + random_unit(rng) * (u * radius);
            disc_derivative(c, radius - (c - center).norm(), q0)
        }
        (PlanarDomain::PuncturedDisc { center, radius }, McFamily::SubDisc) => {
            let c = center + random_unit(rng) * (u * radius);
            let m = (c - center).norm();
            disc_derivative(c, m.min(radius - m), q0)
        }
        (PlanarDomain::Annulus { center, inner, outer }, McFamily::SubDisc) => {
            let c = center + random_unit(rng) * (inner + u * (outer - inner));
            let m = (c - center).norm();
            disc_derivative(c, (m - inner).min(outer - m), q0)
        }
        (PlanarDomain::Sampled(s), McFamily::SubDisc) => {
            let c = q0 + random_unit(rng) * (u * u * reach);
            disc_derivative(c, s.clearance_at(c)?, q0)
        }
        (PlanarDomain::Sampled(s), McFamily::SubPuncturedDisc) => {
            let p = s.puncture()?;
            let r = s.puncture_clearance() * (0.5 + 0.5 * u);
            punctured_derivative(p, r, q0)
        }
        (PlanarDomain::Star(s), McFamily::SubDisc) => {
            let dir = random_unit(rng);
            let c = dir * (u * s.radius_at(dir.arg()));
            disc_derivative(c, s.boundary_distance(c), q0)
        }
        _ => None,
    }
}

fn families(domain: &PlanarDomain) -> &'static [McFamily] {
    match domain {
        PlanarDomain::Disc { .. } | PlanarDomain::PuncturedDisc { .. } | PlanarDomain::Annulus { .. } => {
            &[McFamily::Cover, McFamily::SubDisc]
        }
        PlanarDomain::Sampled(_) => &[McFamily::SubDisc, McFamily::SubPuncturedDisc],
        PlanarDomain::Star(_) => &[McFamily::SubDisc],
    }
}

/// Running maximum of `|g'(0)|·(1−ε)` over `budget` seeded trials. Trial `i`
/// draws from substream `i`, so a larger budget extends a smaller one.
pub fn mc_search(domain: &PlanarDomain, q0: Complex64, budget: usize, seed: u64) -> McOutcome {
    let stream = SeedStream::new(seed).child("eta-mc");
    let fams = families(domain);
    let reach = match domain {
        PlanarDomain::Sampled(s) => s.max_distance_from(q0),
        _ => 0.0,
    };
    let none = McOutcome {
        best_derivative: 0.0,
        family: None,
        epsilon: 1.0,
    };
    (0..budget)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.indexed(i as u64).rng();
            let eps = 0.5f64.powi(rng.gen_range(1..=20));
            let family = fams[i % fams.len()];
            match trial(domain, q0, reach, &mut rng, family) {
                Some(d) if d.is_finite() && d > 0.0 => McOutcome {
                    best_derivative: d * (1.0 - eps),
                    family: Some(family),
                    epsilon: eps,
                },
                _ => none,
            }
        })
        .reduce(|| none, |a, b| {
            if b.best_derivative > a.best_derivative {
                b
            } else {
                a
            }
        })
}

fn mc_estimate(leaf: &LeafModel, budget: usize, seed: u64) -> EtaEstimate {
    let out = mc_search(&leaf.domain, leaf.base_preimage, budget, seed);
    EtaEstimate {
        lower: leaf.base_derivative_norm() * out.best_derivative / 2.0,
        upper: f64::INFINITY,
        exact: None,
        method: EtaMethod::McSandwich,
        seed,
        budget,
        starved: out.family.is_none(),
    }
}

/// Monte-Carlo lower bound from discs `φ∘g` into the leaf of `p` in `D`.
pub fn eta_mc_lower(x: &PolyVectorField, p: &Point, d: &DomainExpr, budget: usize, seed: u64) -> Result<EtaEstimate> {
    let leaf = leaf_model(x, p, d, &TraceOptions::default())?;
    Ok(mc_estimate(&leaf, budget, seed))
}

/// Upper bound from `D ⊂ D_outer` and the closed form in `D_outer`.
pub fn eta_upper_inclusion(x: &PolyVectorField, p: &Point, d: &DomainExpr, outer: &DomainExpr) -> Result<EtaEstimate> {
    check_inclusion(d, outer)?;
    let leaf = leaf_model(x, p, outer, &TraceOptions::default())?;
    let e = eta_exact(&leaf, p)
        .map_err(|_| Error::InvalidInput("the leaf in the outer domain is not catalog-exact".into()))?;
    Ok(EtaEstimate {
        lower: 0.0,
        exact: None,
        ..e
    })
}

/// Seeded interior samples of `inner` must lie in `outer`.
pub fn check_inclusion(inner: &DomainExpr, outer: &DomainExpr) -> Result<()> {
    if inner.dim() != outer.dim() {
        return Err(Error::InvalidInput("domains differ in dimension".into()));
    }
    let bb = inner.bounding_box();
    let mut rng = SeedStream::new(0).child("inclusion").rng();
    let n = inner.dim();
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..20_000 {
        for (i, zi) in z.iter_mut().enumerate() {
            *zi = Complex64::new(
                rng.gen_range(bb.lo[2 * i]..bb.hi[2 * i]),
                rng.gen_range(bb.lo[2 * i + 1]..bb.hi[2 * i + 1]),
            );
        }
        if inner.sdf_at(&z) < 0.0 && outer.sdf_at(&z) >= 0.0 {
            return Err(Error::InclusionViolated(format!(
                "{} is in the inner domain only",
                Point::new(z.clone())?
            )));
        }
    }
    Ok(())
}

/// `η ≤ ‖X(p)‖ / (|X_i(p)|·λ_T(p_i))`, minimised over coordinates: the
/// projection of a tangent disc to the `i`-th axis lands in the disc of
/// radius `sup_D |z_i|`, punctured when `{z_i = 0}` is invariant.
pub fn eta_upper_projection(x: &PolyVectorField, p: &Point, d: &DomainExpr) -> Result<EtaEstimate> {
    let v = x.eval_at(p)?;
    let vn = norm(&v);
    let mut best = f64::INFINITY;
    for (i, vi) in v.iter().enumerate() {
        let b = d.modulus_bound(i);
        let pi = p.coords()[i];
        if vi.norm() < 1e-300 || !b.is_finite() || pi.norm() >= b {
            continue;
        }
        let lambda = if x.hyperplane_invariant(i) && pi.norm() > 0.0 {
            density_punctured_disc(pi, b)?.value
        } else {
            density_disc(pi, b)?.value
        };
        best = best.min(vn / (vi.norm() * lambda));
    }
    Ok(EtaEstimate {
        lower: 0.0,
        upper: best,
        exact: None,
        method: EtaMethod::McSandwich,
        seed: 0,
        budget: 0,
        starved: false,
    })
}

#[derive(Debug, Clone)]
pub struct EtaOptions {
    pub budget: usize,
    pub seed: u64,
    /// A catalog superdomain for inclusion upper bounds.
    pub outer: Option<DomainExpr>,
    pub trace: TraceOptions,
}

impl Default for EtaOptions {
    fn default() -> Self {
        Self {
            budget: 10_000,
            seed: 7,
            outer: None,
            trace: TraceOptions {
                rays: 128,
                ..TraceOptions::default()
            },
        }
    }
}

/// `η` of `p` in `D`: 0 on the singular set, closed form on exact catalog
/// leaves, a Monte-Carlo sandwich otherwise.
pub fn eta_estimate(x: &PolyVectorField, p: &Point, d: &DomainExpr, opts: &EtaOptions) -> Result<EtaEstimate> {
    if on_singular(x, p)? {
        return Ok(EtaEstimate::closed_form(0.0));
    }
    let leaf = leaf_model(x, p, d, &opts.trace)?;
    eta_on_leaf(x, p, d, &leaf, opts)
}

/// As [`eta_estimate`] with a precomputed leaf of `p` in `D`.
pub fn eta_on_leaf(x: &PolyVectorField, p: &Point, d: &DomainExpr, leaf: &LeafModel, opts: &EtaOptions) -> Result<EtaEstimate> {
    if leaf.is_exact() {
        return eta_exact(leaf, p);
    }
    let mut est = mc_estimate(leaf, opts.budget, opts.seed);
    est.upper = eta_upper_projection(x, p, d)?.upper;
    if let Some(outer) = &opts.outer {
        est.upper = est.upper.min(eta_upper_inclusion(x, p, d, outer)?.upper);
    }
    if let PlanarDomain::Sampled(s) = &leaf.domain {
        let b = density_bounds(s, leaf.base_preimage)?;
        est.upper = est.upper.min(leaf.base_derivative_norm() / b.lower);
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::{leaf_through_catalog, FieldPreset};

    fn unit_bidisc() -> DomainExpr {
        DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap()
    }

    #[test]
    fn radial_leaf_values() {
        let x = PolyVectorField::preset(FieldPreset::Radial(2));
        let p = Point::real(&[0.5, 0.0]);
        let l = leaf_through_catalog(&x, &p, &unit_bidisc()).unwrap();
        let e = eta_exact(&l, &p).unwrap().exact.unwrap();
        assert!((e - 4f64.ln() / 4.0).abs() < 1e-12);
        let big = DomainExpr::centered_polydisc(&[5.0, 5.0]).unwrap();
        let u = eta_upper_inclusion(&x, &p, &unit_bidisc(), &big).unwrap();
        assert!((u.upper - 100f64.ln() / 4.0).abs() < 1e-12);
        assert!(eta_upper_inclusion(&x, &p, &big, &unit_bidisc()).is_err());
    }

    #[test]
    fn weighted_leaf_value() {
        let x = PolyVectorField::preset(FieldPreset::Weighted12);
        let p = Point::real(&[0.5, 0.25]);
        let l = leaf_through_catalog(&x, &p, &unit_bidisc()).unwrap();
        let e = eta_exact(&l, &p).unwrap().exact.unwrap();
        let lambda = 2.0 / (0.5 * 4f64.ln());
        assert!((e - 2f64.sqrt() / lambda).abs() < 1e-12, "{e}");
    }

    #[test]
    fn mc_reaches_the_closed_form_from_below() {
        let x = PolyVectorField::preset(FieldPreset::Radial(2));
        let p = Point::real(&[0.5, 0.0]);
        let exact = 4f64.ln() / 4.0;
        let small = eta_mc_lower(&x, &p, &unit_bidisc(), 1_000, 7).unwrap().lower;
        let big = eta_mc_lower(&x, &p, &unit_bidisc(), 10_000, 7).unwrap().lower;
        assert!(small <= big && big <= exact);
        assert!(big >= 0.95 * exact);
    }

    #[test]
    fn cover_family_is_a_shrink_of_the_extremal_disc() {
        let dom = PlanarDomain::punctured_disc(1.0).unwrap();
        let q0 = Complex64::new(0.5, 0.0);
        let out = mc_search(&dom, q0, 400, 3);
        let exact = 2.0 / dom.density(q0).unwrap().value;
        assert_eq!(out.family, Some(McFamily::Cover));
        assert!((out.best_derivative - (1.0 - out.epsilon) * exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn annulus_cover_derivative_matches_density() {
        let q = Complex64::new(0.3, 0.4);
        let d = cover_derivative(Cover::Annular { inner: 0.2, outer: 1.0 }, q).unwrap();
        let lam = crate::planar::density_annulus(q, 0.2, 1.0).unwrap().value;
        assert!((d - 2.0 / lam).abs() < 1e-9, "{d} {}", 2.0 / lam);
    }

    #[test]
    fn singular_points_have_zero_eta() {
        let x = PolyVectorField::preset(FieldPreset::XyZyZx);
        assert_eq!(eta_on_e(&x, &Point::real(&[0.5, 0.0, 0.0])).unwrap().exact, Some(0.0));
        assert!(eta_on_e(&x, &Point::real(&[0.5, 0.1, 0.0])).is_err());
    }

    #[test]
    fn projection_bound_is_sharp_on_a_half_plane_leaf() {
        // Leaf (x₀eᵗ, y(t), y(t)) with time domain {Re t < log(1/|x₀|)}.
        let x = PolyVectorField::preset(FieldPreset::XZyZy);
        let w = DomainExpr::centered_polydisc(&[1.0, 1.0, 1.0]).unwrap();
        let x0 = 0.8;
        let a = (1.0 / x0 as f64).ln();
        let y0 = 1.0 / (a + 3.0);
        let p = Point::real(&[x0, y0, y0]);
        let v = norm(&x.eval_at(&p).unwrap());
        let up = eta_upper_projection(&x, &p, &w).unwrap().upper;
        assert!((up - v * a).abs() < 1e-12 * v * a);
        let est = eta_estimate(&x, &p, &w, &EtaOptions::default()).unwrap();
        assert!(est.lower <= up);
        assert!(est.relative_width() < 0.05, "{est:?}");
    }
}
