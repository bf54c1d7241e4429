use super::trace::{trace_leaf, TraceOptions, TracedLeaf};
use super::{FieldPreset, PolyVectorField};
use crate::geometry::{DomainExpr, Point};
use crate::planar::{PlanarDomain, SampledDomain, StarDomain};
use crate::{Complex64, Error, Result};

/// `φ_i(q) = a_i + c_i q^{k_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialChart {
    pub offset: Vec<Complex64>,
    pub coeffs: Vec<Complex64>,
    pub exps: Vec<u32>,
    /// `φ(0)` lies on the singular set and is removed from the leaf.
    pub punctured: bool,
}

impl MonomialChart {
    pub fn monomial(coeffs: Vec<Complex64>, exps: Vec<u32>) -> Self {
        Self {
            offset: vec![Complex64::new(0.0, 0.0); coeffs.len()],
            coeffs,
            exps,
            punctured: true,
        }
    }

    pub fn eval(&self, q: Complex64) -> Vec<Complex64> {
        self.offset
            .iter()
            .zip(&self.coeffs)
            .zip(&self.exps)
            .map(|((a, c), k)| a + c * q.powu(*k))
            .collect()
    }

    pub fn derivative(&self, q: Complex64) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .zip(&self.exps)
            .map(|(c, k)| match k {
                0 => Complex64::new(0.0, 0.0),
                k => c * (*k as f64) * q.powu(k - 1),
            })
            .collect()
    }

    fn is_centred(&self) -> bool {
        self.offset.iter().zip(&self.exps).all(|(a, k)| *k == 0 || a.norm() == 0.0)
    }

    /// Exact truncation radius when `{q : φ(q) ∈ D}` is a disc about 0.
    fn radial_radius(&self, d: &DomainExpr) -> Option<f64> {
        if !self.is_centred() {
            return None;
        }
        let constant = |i: usize| self.offset[i] + if self.exps[i] == 0 { self.coeffs[i] } else { 0.0.into() };
        let r = match d {
            DomainExpr::Polydisc { center, radii } => {
                if center.norm() != 0.0 {
                    return None;
                }
                let mut r = f64::INFINITY;
                for i in 0..radii.len() {
                    if self.exps[i] == 0 || self.coeffs[i].norm() == 0.0 {
                        if constant(i).norm() >= radii[i] {
                            return Some(0.0);
                        }
                    } else {
                        r = r.min((radii[i] / self.coeffs[i].norm()).powf(1.0 / self.exps[i] as f64));
                    }
                }
                r
            }
            DomainExpr::Ball { center, radius } => {
                if center.norm() != 0.0 {
                    return None;
                }
                let f = |s: f64| -> f64 {
                    (0..self.exps.len())
                        .map(|i| {
                            if self.exps[i] == 0 {
                                constant(i).norm_sqr()
                            } else {
                                self.coeffs[i].norm_sqr() * s.powi(2 * self.exps[i] as i32)
                            }
                        })
                        .sum()
                };
                let r2 = radius * radius;
                if f(0.0) >= r2 {
                    return Some(0.0);
                }
                let mut hi = 1.0;
                while f(hi) < r2 {
                    hi *= 2.0;
                    if hi > 1e12 {
                        return Some(f64::INFINITY);
                    }
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) < r2 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
            DomainExpr::Union(children) => {
                let mut r: f64 = 0.0;
                for c in children {
                    r = r.max(self.radial_radius(c)?);
                }
                r
            }
            DomainExpr::Intersection(children) => {
                let mut r = f64::INFINITY;
                for c in children {
                    r = r.min(self.radial_radius(c)?);
                }
                r
            }
            _ => return None,
        };
        Some(r)
    }

    /// Radius of the disc about 0 guaranteed by the rotation-invariant
    /// members of a union.
    fn radial_lower(&self, d: &DomainExpr) -> Option<f64> {
        match d {
            DomainExpr::Union(children) => children
                .iter()
                .filter_map(|c| self.radial_radius(c))
                .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r)))),
            other => self.radial_radius(other),
        }
    }

    /// A radius beyond which `φ` certainly leaves `D`.
    fn escape_radius(&self, d: &DomainExpr) -> f64 {
        (0..self.exps.len())
            .filter(|i| self.exps[*i] > 0 && self.coeffs[*i].norm() > 0.0)
            .map(|i| {
                ((d.modulus_bound(i) + self.offset[i].norm()) / self.coeffs[i].norm())
                    .powf(1.0 / self.exps[i] as f64)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafProvenance {
    /// Closed-form chart on an exactly truncated catalog domain.
    CatalogExact,
    /// Closed-form chart on a rasterised truncation.
    CatalogSampled,
    /// Complex-time flow chart on a star-shaped time domain.
    Traced,
}

#[derive(Debug, Clone)]
pub enum LeafChart {
    Monomial(MonomialChart),
    Flow(Box<TracedLeaf>),
}

/// A leaf `L_{p,D}` as a chart `φ: Ω → C^N` with `φ(q₀) = p`.
#[derive(Debug, Clone)]
pub struct LeafModel {
    pub chart: LeafChart,
    pub domain: PlanarDomain,
    pub base_preimage: Complex64,
    pub provenance: LeafProvenance,
}

impl LeafModel {
    /// `φ'(q₀)`.
    pub fn base_derivative(&self) -> Vec<Complex64> {
        match &self.chart {
            LeafChart::Monomial(m) => m.derivative(self.base_preimage),
            LeafChart::Flow(t) => t.velocity.clone(),
        }
    }

    pub fn base_derivative_norm(&self) -> f64 {
        self.base_derivative().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn monomial(&self) -> Option<&MonomialChart> {
        match &self.chart {
            LeafChart::Monomial(m) => Some(m),
            LeafChart::Flow(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.provenance == LeafProvenance::CatalogExact
    }
}

/// Planar truncation `{q : φ(q) ∈ D}` of a chart, component of `q₀`.
///
/// Exact for rotation-invariant unions and intersections of centred
/// polydiscs and balls. Otherwise the set is rasterised at `pitch`; when the
/// component of `q₀` stays within one pitch of the disc guaranteed by the
/// rotation-invariant members of `D`, that disc is returned as exact.
pub fn truncate_chart(
    chart: &MonomialChart,
    d: &DomainExpr,
    q0: Complex64,
    pitch: Option<f64>,
) -> Result<(PlanarDomain, LeafProvenance)> {
    let make = |r: f64| {
        if chart.punctured {
            PlanarDomain::punctured_disc(r)
        } else {
            PlanarDomain::disc(r)
        }
    };
    if let Some(r) = chart.radial_radius(d) {
        if !r.is_finite() {
            return Err(Error::InvalidInput("leaf is not bounded in the domain".into()));
        }
        if q0.norm() >= r {
            return Err(Error::OutsideDomain(format!("base preimage {q0} outside radius {r}")));
        }
        return Ok((make(r)?, LeafProvenance::CatalogExact));
    }
    if let (DomainExpr::Polydisc { center, radii }, false) = (d, chart.punctured) {
        // Affine chart with a single moving coordinate.
        let moving: Vec<usize> = (0..chart.exps.len()).filter(|i| chart.exps[*i] == 1).collect();
        if moving.len() == 1 && chart.coeffs[moving[0]] == Complex64::new(1.0, 0.0) {
            let i = moving[0];
            let fixed_ok = (0..radii.len())
                .filter(|j| *j != i)
                .all(|j| (chart.eval(q0)[j] - center.coords()[j]).norm() < radii[j]);
            if fixed_ok {
                let dom = PlanarDomain::Disc {
                    center: center.coords()[i] - chart.offset[i],
                    radius: radii[i],
                };
                if !dom.contains(q0) {
                    return Err(Error::OutsideDomain("base point outside the domain".into()));
                }
                return Ok((dom, LeafProvenance::CatalogExact));
            }
        }
    }
    let big = chart.escape_radius(d);
    if !big.is_finite() {
        return Err(Error::InvalidInput("leaf is not bounded in the domain".into()));
    }
    let pitch = pitch.unwrap_or(big / 300.0);
    let lo = Complex64::new(-big, -big);
    let hi = Complex64::new(big, big);
    let raster = SampledDomain::from_predicate(
        |q| d.sdf_at(&chart.eval(q)) < 0.0,
        lo,
        hi,
        pitch,
        chart.punctured.then_some(Complex64::new(0.0, 0.0)),
    )?;
    let comp = raster.component_of(q0)?;
    if let Some(r1) = chart.radial_lower(d) {
        if r1 > q0.norm() && comp.max_modulus() <= r1 + 2.0 * pitch * std::f64::consts::SQRT_2 {
            return Ok((make(r1)?, LeafProvenance::CatalogExact));
        }
    }
    Ok((PlanarDomain::Sampled(comp), LeafProvenance::CatalogSampled))
}

fn check_regular(x: &PolyVectorField, p: &Point) -> Result<()> {
    let v = x.eval_at(p)?;
    if x.singular_template().contains(p, 1e-12) || v.iter().all(|c| c.norm() < 1e-14) {
        return Err(Error::OnSingularSet(format!("{p}")));
    }
    Ok(())
}

/// Closed-form chart through `p` for catalog fields, with `q₀`.
pub fn catalog_chart(x: &PolyVectorField, p: &Point) -> Result<Option<(MonomialChart, Complex64)>> {
    check_regular(x, p)?;
    let z = p.coords();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let chart = |coeffs: Vec<Complex64>, exps: Vec<u32>| MonomialChart::monomial(coeffs, exps);
    Ok(match x.catalog_kind() {
        Some(FieldPreset::Radial(_)) => {
            let r = p.norm();
            let u: Vec<Complex64> = z.iter().map(|c| c / r).collect();
            let n = u.len();
            Some((chart(u, vec![1; n]), Complex64::new(r, 0.0)))
        }
        Some(FieldPreset::Weighted12) => {
            if z[0] != zero {
                let c = z[1] / (z[0] * z[0]);
                Some((chart(vec![one, c], vec![1, 2]), z[0]))
            } else {
                Some((chart(vec![zero, one], vec![0, 1]), z[1]))
            }
        }
        Some(FieldPreset::XZyZy) => {
            let (x0, y0, z0) = (z[0], z[1], z[2]);
            if x0 != zero && y0 == zero {
                Some((chart(vec![one, zero, z0], vec![1, 0, 0]), x0))
            } else if x0 != zero && z0 == zero {
                Some((chart(vec![one, y0, zero], vec![1, 0, 0]), x0))
            } else if x0 == zero && y0 == z0 {
                Some((chart(vec![zero, one, one], vec![0, 1, 1]), y0))
            } else {
                None
            }
        }
        Some(FieldPreset::XyZyZx) => {
            let (x0, y0, z0) = (z[0], z[1], z[2]);
            if z0 == zero {
                Some((chart(vec![one, y0, zero], vec![1, 0, 0]), x0))
            } else if y0 == zero {
                Some((chart(vec![x0, zero, one], vec![0, 0, 1]), z0))
            } else if x0 == zero {
                Some((chart(vec![zero, one, z0], vec![0, 1, 0]), y0))
            } else {
                None
            }
        }
        Some(FieldPreset::Constant { axis, .. }) => {
            let mut m = MonomialChart {
                offset: z.to_vec(),
                coeffs: vec![zero; z.len()],
                exps: vec![0; z.len()],
                punctured: false,
            };
            m.coeffs[axis] = one;
            m.exps[axis] = 1;
            for (i, c) in m.coeffs.iter_mut().enumerate() {
                if i != axis {
                    *c = zero;
                }
            }
            Some((m, zero))
        }
        None => None,
    })
}

/// The leaf of `p` in `D`: a closed-form chart when `X` and `p` are in the
/// catalog, a traced complex-time chart otherwise.
pub fn leaf_through_catalog(x: &PolyVectorField, p: &Point, d: &DomainExpr) -> Result<LeafModel> {
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
        None => traced_leaf_model(x, p, d, &TraceOptions::default()),
    }
}

/// Leaf model on the star-shaped time domain of a traced leaf.
pub fn traced_leaf_model(x: &PolyVectorField, p: &Point, d: &DomainExpr, opts: &TraceOptions) -> Result<LeafModel> {
    let t = trace_leaf(x, p, d, opts)?;
    let domain = PlanarDomain::Star(StarDomain::new(t.rays.iter().map(|r| r.exit).collect())?);
    Ok(LeafModel {
        chart: LeafChart::Flow(Box::new(t)),
        domain,
        base_preimage: Complex64::new(0.0, 0.0),
        provenance: LeafProvenance::Traced,
    })
}
