use super::{dist, hdot, norm, Point};
use crate::{Complex64, Error, Result};

/// Interior / exterior classification of a point against a domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Interior,
    Exterior,
    NearBoundary,
}

/// Axis-aligned box in the real coordinates `(re_1, im_1, ..., re_N, im_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || lo.len() % 2 != 0 {
            return Err(Error::InvalidInput("bounding box needs 2N matching bounds".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !a.is_finite() || !b.is_finite() || a > b) {
            return Err(Error::InvalidInput(format!("degenerate bounding box {lo:?}..{hi:?}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn real_dim(&self) -> usize {
        self.lo.len()
    }

    pub fn hull(&self, other: &BoundingBox) -> BoundingBox {
        BoundingBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    fn meet(&self, other: &BoundingBox) -> BoundingBox {
        let lo: Vec<f64> = self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect();
        let hi: Vec<f64> = self
            .hi
            .iter()
            .zip(&other.hi)
            .zip(&lo)
            .map(|((a, b), l)| a.min(*b).max(*l))
            .collect();
        BoundingBox { lo, hi }
    }

    pub fn expanded(&self, by: f64) -> BoundingBox {
        BoundingBox {
            lo: self.lo.iter().map(|x| x - by).collect(),
            hi: self.hi.iter().map(|x| x + by).collect(),
        }
    }

    pub fn contains_box(&self, other: &BoundingBox) -> bool {
        self.lo.iter().zip(&other.lo).all(|(a, b)| a <= b)
            && self.hi.iter().zip(&other.hi).all(|(a, b)| a >= b)
    }
}

/// A symbolic open set of `C^N`.
///
/// Membership is decided through a signed distance `sdf`: negative inside,
/// positive outside. For every primitive the value is the exact Euclidean
/// signed distance; unions and intersections combine by `min`/`max`, which
/// stays exact outside a union and is a bound elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainExpr {
    Polydisc {
        center: Point,
        radii: Vec<f64>,
    },
    Ball {
        center: Point,
        radius: f64,
    },
    /// Neighbourhood of the real segment `[a, b]`.
    Tube {
        a: Point,
        b: Point,
        radius: f64,
    },
    /// `{ base + t·d + w : |t| < extent, w ⊥ d, |w| < width }` for a unit
    /// complex direction `d`: a thin neighbourhood of a complex line disc.
    LineNeighborhood {
        base: Point,
        direction: Point,
        extent: f64,
        width: f64,
    },
    Union(Vec<DomainExpr>),
    Intersection(Vec<DomainExpr>),
    Difference(Box<DomainExpr>, Box<DomainExpr>),
    Thickening {
        child: Box<DomainExpr>,
        epsilon: f64,
    },
}

fn positive(name: &str, r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be a positive real, got {r}")))
    }
}

fn combine_excess(excess: &[f64]) -> f64 {
    if excess.iter().all(|e| *e <= 0.0) {
        excess.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    } else {
        excess.iter().map(|e| e.max(0.0).powi(2)).sum::<f64>().sqrt()
    }
}

impl DomainExpr {
    pub fn polydisc(center: Point, radii: Vec<f64>) -> Result<Self> {
        if radii.len() != center.dim() {
            return Err(Error::InvalidInput("polyradius length must match dimension".into()));
        }
        for r in &radii {
            positive("polyradius", *r)?;
        }
        Ok(DomainExpr::Polydisc { center, radii })
    }

    /// Polydisc centred at the origin.
    pub fn centered_polydisc(radii: &[f64]) -> Result<Self> {
        Self::polydisc(Point::origin(radii.len()), radii.to_vec())
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        positive("ball radius", radius)?;
        Ok(DomainExpr::Ball { center, radius })
    }

    pub fn tube(a: Point, b: Point, radius: f64) -> Result<Self> {
        positive("tube radius", radius)?;
        if a.dim() != b.dim() {
            return Err(Error::InvalidInput("tube endpoints differ in dimension".into()));
        }
        Ok(DomainExpr::Tube { a, b, radius })
    }

    pub fn line_neighborhood(base: Point, direction: Point, extent: f64, width: f64) -> Result<Self> {
        positive("line extent", extent)?;
        positive("line width", width)?;
        let n = direction.norm();
        if n == 0.0 || base.dim() != direction.dim() {
            return Err(Error::InvalidInput("line direction must be nonzero and match base".into()));
        }
        let direction = Point::new(direction.coords().iter().map(|z| z / n).collect())?;
        Ok(DomainExpr::LineNeighborhood {
            base,
            direction,
            extent,
            width,
        })
    }

    pub fn union(children: Vec<DomainExpr>) -> Result<Self> {
        Self::check_children(&children)?;
        Ok(DomainExpr::Union(children))
    }

    pub fn intersection(children: Vec<DomainExpr>) -> Result<Self> {
        Self::check_children(&children)?;
        Ok(DomainExpr::Intersection(children))
    }

    pub fn difference(left: DomainExpr, right: DomainExpr) -> Result<Self> {
        if left.dim() != right.dim() {
            return Err(Error::InvalidInput("difference operands differ in dimension".into()));
        }
        Ok(DomainExpr::Difference(Box::new(left), Box::new(right)))
    }

    pub fn thickening(child: DomainExpr, epsilon: f64) -> Result<Self> {
        positive("thickening epsilon", epsilon)?;
        Ok(DomainExpr::Thickening {
            child: Box::new(child),
            epsilon,
        })
    }

    fn check_children(children: &[DomainExpr]) -> Result<()> {
        let Some(first) = children.first() else {
            return Err(Error::InvalidInput("set operation needs at least one child".into()));
        };
        if children.iter().any(|c| c.dim() != first.dim()) {
            return Err(Error::InvalidInput("set operands differ in dimension".into()));
        }
        Ok(())
    }

    /// Re-checks every invariant of a tree built through the raw enum.
    pub fn validate(&self) -> Result<()> {
        match self {
            DomainExpr::Polydisc { center, radii } => {
                Self::polydisc(center.clone(), radii.clone()).map(|_| ())
            }
            DomainExpr::Ball { radius, .. } => positive("ball radius", *radius),
            DomainExpr::Tube { a, b, radius } => Self::tube(a.clone(), b.clone(), *radius).map(|_| ()),
            DomainExpr::LineNeighborhood {
                base,
                direction,
                extent,
                width,
            } => Self::line_neighborhood(base.clone(), direction.clone(), *extent, *width).map(|_| ()),
            DomainExpr::Union(c) | DomainExpr::Intersection(c) => {
                Self::check_children(c)?;
                c.iter().try_for_each(|d| d.validate())
            }
            DomainExpr::Difference(l, r) => {
                l.validate()?;
                r.validate()
            }
            DomainExpr::Thickening { child, epsilon } => {
                positive("thickening epsilon", *epsilon)?;
                child.validate()
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainExpr::Polydisc { center, .. } | DomainExpr::Ball { center, .. } => center.dim(),
            DomainExpr::Tube { a, .. } => a.dim(),
            DomainExpr::LineNeighborhood { base, .. } => base.dim(),
            DomainExpr::Union(c) | DomainExpr::Intersection(c) => c[0].dim(),
            DomainExpr::Difference(l, _) => l.dim(),
            DomainExpr::Thickening { child, .. } => child.dim(),
        }
    }

    /// Signed distance at raw coordinates (no dimension check).
    pub fn sdf_at(&self, z: &[Complex64]) -> f64 {
        match self {
            DomainExpr::Polydisc { center, radii } => {
                let excess: Vec<f64> = z
                    .iter()
                    .zip(center.coords())
                    .zip(radii)
                    .map(|((zi, ci), r)| (zi - ci).norm() - r)
                    .collect();
                combine_excess(&excess)
            }
            DomainExpr::Ball { center, radius } => dist(z, center.coords()) - radius,
            DomainExpr::Tube { a, b, radius } => {
                let ab: Vec<Complex64> = b.coords().iter().zip(a.coords()).map(|(x, y)| x - y).collect();
                let az: Vec<Complex64> = z.iter().zip(a.coords()).map(|(x, y)| x - y).collect();
                let len2 = norm(&ab).powi(2);
                let t = if len2 > 0.0 {
                    (hdot(&az, &ab).re / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let d = az
                    .iter()
                    .zip(&ab)
                    .map(|(p, q)| (p - q * t).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                d - radius
            }
            DomainExpr::LineNeighborhood {
                base,
                direction,
                extent,
                width,
            } => {
                let v: Vec<Complex64> = z.iter().zip(base.coords()).map(|(x, y)| x - y).collect();
                let t = hdot(&v, direction.coords());
                let w = v
                    .iter()
                    .zip(direction.coords())
                    .map(|(vi, di)| (vi - t * di).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                combine_excess(&[t.norm() - extent, w - width])
            }
            DomainExpr::Union(c) => c.iter().map(|d| d.sdf_at(z)).fold(f64::INFINITY, f64::min),
            DomainExpr::Intersection(c) => {
                c.iter().map(|d| d.sdf_at(z)).fold(f64::NEG_INFINITY, f64::max)
            }
            DomainExpr::Difference(l, r) => l.sdf_at(z).max(-r.sdf_at(z)),
            DomainExpr::Thickening { child, epsilon } => child.sdf_at(z) - epsilon,
        }
    }

    pub fn sdf(&self, p: &Point) -> Result<f64> {
        if p.dim() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "point of dimension {} against domain of dimension {}",
                p.dim(),
                self.dim()
            )));
        }
        Ok(self.sdf_at(p.coords()))
    }

    /// Classifies `p`; `NearBoundary` means the signed distance is below `tol`.
    pub fn contains(&self, p: &Point, tol: f64) -> Result<Classification> {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
        }
        let s = self.sdf(p)?;
        Ok(if s < -tol {
            Classification::Interior
        } else if s > tol {
            Classification::Exterior
        } else {
            Classification::NearBoundary
        })
    }

    pub fn is_inside(&self, p: &Point) -> bool {
        p.dim() == self.dim() && self.sdf_at(p.coords()) < 0.0
    }

    pub fn bounding_box(&self) -> BoundingBox {
        let around = |c: &Point, rad: &dyn Fn(usize) -> f64| {
            let mut lo = Vec::new();
            let mut hi = Vec::new();
            for (i, z) in c.coords().iter().enumerate() {
                let r = rad(i);
                lo.extend([z.re - r, z.im - r]);
                hi.extend([z.re + r, z.im + r]);
            }
            BoundingBox { lo, hi }
        };
        match self {
            DomainExpr::Polydisc { center, radii } => around(center, &|i| radii[i]),
            DomainExpr::Ball { center, radius } => around(center, &|_| *radius),
            DomainExpr::Tube { a, b, radius } => {
                around(a, &|_| *radius).hull(&around(b, &|_| *radius))
            }
            DomainExpr::LineNeighborhood {
                base,
                direction,
                extent,
                width,
            } => around(base, &|i| extent * direction.coords()[i].norm() + width),
            DomainExpr::Union(c) => c[1..]
                .iter()
                .fold(c[0].bounding_box(), |acc, d| acc.hull(&d.bounding_box())),
            DomainExpr::Intersection(c) => c[1..]
                .iter()
                .fold(c[0].bounding_box(), |acc, d| acc.meet(&d.bounding_box())),
            DomainExpr::Difference(l, _) => l.bounding_box(),
            DomainExpr::Thickening { child, epsilon } => child.bounding_box().expanded(*epsilon),
        }
    }

    /// Upper bound for `|z_i|` over the domain.
    pub fn modulus_bound(&self, i: usize) -> f64 {
        match self {
            DomainExpr::Polydisc { center, radii } => center.coords()[i].norm() + radii[i],
            DomainExpr::Ball { center, radius } => center.coords()[i].norm() + radius,
            DomainExpr::Tube { a, b, radius } => {
                a.coords()[i].norm().max(b.coords()[i].norm()) + radius
            }
            DomainExpr::LineNeighborhood {
                base,
                direction,
                extent,
                width,
            } => base.coords()[i].norm() + extent * direction.coords()[i].norm() + width,
            DomainExpr::Union(c) => c.iter().map(|d| d.modulus_bound(i)).fold(0.0, f64::max),
            DomainExpr::Intersection(c) => {
                c.iter().map(|d| d.modulus_bound(i)).fold(f64::INFINITY, f64::min)
            }
            DomainExpr::Difference(l, _) => l.modulus_bound(i),
            DomainExpr::Thickening { child, epsilon } => child.modulus_bound(i) + epsilon,
        }
    }

    /// True when the set is invariant under every rotation
    /// `z ↦ (e^{iθ_1} z_1, ..., e^{iθ_N} z_N)`.
    pub fn is_reinhardt(&self) -> bool {
        let at_origin = |c: &Point| c.coords().iter().all(|z| z.norm() == 0.0);
        match self {
            DomainExpr::Polydisc { center, .. } | DomainExpr::Ball { center, .. } => at_origin(center),
            DomainExpr::Tube { .. } | DomainExpr::LineNeighborhood { .. } => false,
            DomainExpr::Union(c) | DomainExpr::Intersection(c) => c.iter().all(|d| d.is_reinhardt()),
            DomainExpr::Difference(l, r) => l.is_reinhardt() && r.is_reinhardt(),
            DomainExpr::Thickening { child, .. } => child.is_reinhardt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polydisc_membership() {
        let p = DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap();
        let tol = 1e-9;
        assert_eq!(p.contains(&Point::real(&[0.5, 0.0]), tol).unwrap(), Classification::Interior);
        assert_eq!(p.contains(&Point::real(&[2.0, 0.0]), tol).unwrap(), Classification::Exterior);
        assert_eq!(
            p.contains(&Point::real(&[1.0, 0.3]), tol).unwrap(),
            Classification::NearBoundary
        );
        let arm = DomainExpr::centered_polydisc(&[2.0, 0.1]).unwrap();
        let u = DomainExpr::union(vec![p, arm]).unwrap();
        assert_eq!(u.contains(&Point::real(&[1.5, 0.05]), tol).unwrap(), Classification::Interior);
    }

    #[test]
    fn polydisc_sdf_is_euclidean_outside() {
        let p = DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap();
        let s = p.sdf(&Point::real(&[1.1, 1.1])).unwrap();
        assert!((s - 0.1 * 2f64.sqrt()).abs() < 1e-12);
        let s = p.sdf(&Point::real(&[0.5, -0.25])).unwrap();
        assert!((s + 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_finite_and_mismatched_input_rejected() {
        assert!(Point::new(vec![c(f64::NAN, 0.0)]).is_err());
        let p = DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap();
        assert!(p.contains(&Point::real(&[0.0]), 1e-9).is_err());
        assert!(p.contains(&Point::real(&[0.0, 0.0]), 0.0).is_err());
        assert!(DomainExpr::centered_polydisc(&[1.0, -1.0]).is_err());
        assert!(DomainExpr::ball(Point::origin(2), 0.0).is_err());
    }

    #[test]
    fn line_neighborhood_and_tube() {
        let ln = DomainExpr::line_neighborhood(
            Point::origin(2),
            Point::real(&[1.0, 1.0]),
            3.0,
            0.1,
        )
        .unwrap();
        let on_line = Point::new(vec![c(0.3, 0.7), c(0.3, 0.7)]).unwrap();
        assert!(ln.is_inside(&on_line));
        let off = Point::new(vec![c(0.3, 0.0), c(-0.3, 0.0)]).unwrap();
        assert!((ln.sdf(&off).unwrap() - (0.18f64.sqrt() - 0.1)).abs() < 1e-12);
        let t = DomainExpr::tube(Point::real(&[0.0, 0.0]), Point::real(&[2.0, 0.0]), 0.1).unwrap();
        assert!(t.is_inside(&Point::real(&[1.0, 0.05])));
        assert!(!t.is_inside(&Point::new(vec![c(1.0, 0.2), c(0.0, 0.0)]).unwrap()));
        assert!(!ln.is_reinhardt() && !t.is_reinhardt());
    }

    #[test]
    fn set_algebra() {
        let a = DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap();
        let empty = DomainExpr::difference(a.clone(), a.clone()).unwrap();
        assert!(!empty.is_inside(&Point::real(&[0.0, 0.0])));
        let th = DomainExpr::thickening(a.clone(), 0.5).unwrap();
        assert!(th.is_inside(&Point::real(&[1.4, 0.0])));
        assert!(th.is_reinhardt());
        let bb = th.bounding_box();
        assert_eq!(bb.hi[0], 1.5);
        assert_eq!(a.modulus_bound(1), 1.0);
    }
}
