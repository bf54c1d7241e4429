//! Polynomial vector fields on `C^N`, their singular sets, catalog leaf
//! charts, complex-time leaf tracing and the transversal-type cone test.

mod catalog;
mod cone;
mod trace;

pub use catalog::{
    catalog_chart, leaf_through_catalog, traced_leaf_model, truncate_chart, LeafChart, LeafModel, LeafProvenance,
    MonomialChart,
};
pub use cone::{transversal_type_check, ConeVerdict, ConeVerdictKind};
pub use trace::{trace_leaf, StopReason, TraceOptions, TracedLeaf, TracedRay};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::geometry::{BoundingBox, Point};
use crate::{Complex64, Error, Result};

/// `coeff · z^exps`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub exps: Vec<u32>,
    pub coeff: Complex64,
}

impl Monomial {
    pub fn new(exps: Vec<u32>, coeff: Complex64) -> Self {
        Self { exps, coeff }
    }

    fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.exps
            .iter()
            .zip(z)
            .fold(self.coeff, |acc, (e, zi)| acc * zi.powu(*e))
    }

    fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.exps.iter().enumerate().filter(|(_, e)| **e > 0).map(|(i, _)| i)
    }
}

/// A holomorphic polynomial vector field `X = Σ X_i ∂/∂z_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVectorField {
    dim: usize,
    components: Vec<Vec<Monomial>>,
}

/// Named fields with exactly known leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldPreset {
    /// `X(z) = z` in `C^N`.
    Radial(usize),
    /// `x ∂x + 2y ∂y`.
    Weighted12,
    /// `x ∂x + zy ∂y + zy ∂z`.
    XZyZy,
    /// `xy ∂x + zy ∂y + zx ∂z`.
    XyZyZx,
    /// `∂/∂z_axis` in `C^N`.
    Constant { dim: usize, axis: usize },
}

impl FieldPreset {
    pub fn dim(&self) -> usize {
        match *self {
            FieldPreset::Radial(n) => n.max(1),
            FieldPreset::Weighted12 => 2,
            FieldPreset::XZyZy | FieldPreset::XyZyZx => 3,
            FieldPreset::Constant { dim, .. } => dim.max(1),
        }
    }

    /// Config name: `radial2`, `weighted12`, `xzyzy`, `xyzyzx`, `constant2_0`.
    pub fn name(&self) -> String {
        match *self {
            FieldPreset::Radial(n) => format!("radial{n}"),
            FieldPreset::Weighted12 => "weighted12".into(),
            FieldPreset::XZyZy => "xzyzy".into(),
            FieldPreset::XyZyZx => "xyzyzx".into(),
            FieldPreset::Constant { dim, axis } => format!("constant{dim}_{axis}"),
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown field `{s}`"));
        Ok(match s {
            "weighted12" => FieldPreset::Weighted12,
            "xzyzy" => FieldPreset::XZyZy,
            "xyzyzx" => FieldPreset::XyZyZx,
            _ => {
                if let Some(n) = s.strip_prefix("radial") {
                    FieldPreset::Radial(n.parse().map_err(|_| bad())?)
                } else if let Some(rest) = s.strip_prefix("constant") {
                    let (d, a) = rest.split_once('_').ok_or_else(bad)?;
                    let (dim, axis): (usize, usize) = (d.parse().map_err(|_| bad())?, a.parse().map_err(|_| bad())?);
                    if axis >= dim {
                        return Err(bad());
                    }
                    FieldPreset::Constant { dim, axis }
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

fn mono(exps: &[u32], c: f64) -> Monomial {
    Monomial::new(exps.to_vec(), Complex64::new(c, 0.0))
}

impl PolyVectorField {
    pub fn new(components: Vec<Vec<Monomial>>) -> Result<Self> {
        let dim = components.len();
        if dim == 0 {
            return Err(Error::InvalidInput("a vector field needs N ≥ 1 components".into()));
        }
        let mut cleaned = Vec::with_capacity(dim);
        for comp in components {
            let mut terms: Vec<Monomial> = Vec::new();
            for m in comp {
                if m.exps.len() != dim {
                    return Err(Error::InvalidInput(format!(
                        "monomial exponent {:?} does not have {dim} entries",
                        m.exps
                    )));
                }
                if !(m.coeff.re.is_finite() && m.coeff.im.is_finite()) {
                    return Err(Error::InvalidInput("non-finite coefficient".into()));
                }
                match terms.iter_mut().find(|t| t.exps == m.exps) {
                    Some(t) => t.coeff += m.coeff,
                    None => terms.push(m),
                }
            }
            terms.retain(|t| t.coeff.norm() != 0.0);
            terms.sort_by(|a, b| a.exps.cmp(&b.exps));
            cleaned.push(terms);
        }
        if cleaned.iter().all(|c| c.is_empty()) {
            return Err(Error::InvalidInput("the zero field does not define a foliation".into()));
        }
        Ok(Self {
            dim,
            components: cleaned,
        })
    }

    pub fn preset(p: FieldPreset) -> Self {
        let comps = match p {
            FieldPreset::Radial(n) => (0..n.max(1))
                .map(|i| {
                    let mut e = vec![0; n.max(1)];
                    e[i] = 1;
                    vec![mono(&e, 1.0)]
                })
                .collect(),
            FieldPreset::Weighted12 => vec![vec![mono(&[1, 0], 1.0)], vec![mono(&[0, 1], 2.0)]],
            FieldPreset::XZyZy => vec![
                vec![mono(&[1, 0, 0], 1.0)],
                vec![mono(&[0, 1, 1], 1.0)],
                vec![mono(&[0, 1, 1], 1.0)],
            ],
            FieldPreset::XyZyZx => vec![
                vec![mono(&[1, 1, 0], 1.0)],
                vec![mono(&[0, 1, 1], 1.0)],
                vec![mono(&[1, 0, 1], 1.0)],
            ],
            FieldPreset::Constant { dim, axis } => (0..dim.max(1))
                .map(|i| {
                    if i == axis {
                        vec![mono(&vec![0; dim.max(1)], 1.0)]
                    } else {
                        vec![]
                    }
                })
                .collect(),
        };
        Self::new(comps).expect("presets are valid")
    }

    /// The preset this field equals, if any.
    pub fn catalog_kind(&self) -> Option<FieldPreset> {
        let mut candidates = vec![
            FieldPreset::Radial(self.dim),
            FieldPreset::Weighted12,
            FieldPreset::XZyZy,
            FieldPreset::XyZyZx,
        ];
        candidates.extend((0..self.dim).map(|axis| FieldPreset::Constant { dim: self.dim, axis }));
        candidates.into_iter().find(|c| Self::preset(*c) == *self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Vec<Monomial>] {
        &self.components
    }

    pub fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.components
            .iter()
            .map(|c| c.iter().map(|m| m.eval(z)).sum())
            .collect()
    }

    pub fn eval_at(&self, p: &Point) -> Result<Vec<Complex64>> {
        if p.dim() != self.dim {
            return Err(Error::InvalidInput("point and field differ in dimension".into()));
        }
        Ok(self.eval(p.coords()))
    }

    /// Complex Jacobian `∂X_i/∂z_j`.
    pub fn jacobian(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        let n = self.dim;
        let mut j = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (i, comp) in self.components.iter().enumerate() {
            for m in comp {
                for k in 0..n {
                    let e = m.exps[k];
                    if e == 0 {
                        continue;
                    }
                    let mut d = m.clone();
                    d.exps[k] -= 1;
                    d.coeff *= e as f64;
                    j[(i, k)] += d.eval(z);
                }
            }
        }
        j
    }

    /// Whether `{z_i = 0}` is invariant, i.e. `z_i` divides `X_i`.
    pub fn hyperplane_invariant(&self, i: usize) -> bool {
        self.components[i].iter().all(|m| m.exps[i] > 0)
    }

    /// Coordinate subspaces on which the field vanishes identically.
    pub fn singular_template(&self) -> SingularSet {
        let n = self.dim;
        let vanishes_on = |mask: u32| {
            self.components
                .iter()
                .flatten()
                .all(|m| m.support().any(|i| mask & (1 << i) == 0))
        };
        let zero_sets: Vec<u32> = (0..(1u32 << n)).filter(|m| vanishes_on(*m)).collect();
        let maximal: Vec<Vec<usize>> = zero_sets
            .iter()
            .filter(|m| !zero_sets.iter().any(|o| *o != **m && *o & **m == **m))
            .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
            .collect();
        SingularSet {
            dim: n,
            subspaces: maximal,
            points: Vec::new(),
        }
    }
}

/// Zero set of a field: coordinate subspaces (by spanning axes) plus
/// isolated points found numerically off those subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSet {
    pub dim: usize,
    pub subspaces: Vec<Vec<usize>>,
    pub points: Vec<Point>,
}

impl SingularSet {
    pub fn is_empty(&self) -> bool {
        self.subspaces.is_empty() && self.points.is_empty()
    }

    /// True when the set is fully described by coordinate subspaces.
    pub fn is_symbolic(&self) -> bool {
        self.points.is_empty()
    }

    fn subspace_distance(&self, s: &[usize], z: &[Complex64]) -> f64 {
        z.iter()
            .enumerate()
            .filter(|(i, _)| !s.contains(i))
            .map(|(_, zi)| zi.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn distance(&self, p: &Point) -> f64 {
        self.distance_at(p.coords())
    }

    pub fn distance_at(&self, z: &[Complex64]) -> f64 {
        let a = self
            .subspaces
            .iter()
            .map(|s| self.subspace_distance(s, z))
            .fold(f64::INFINITY, f64::min);
        let b = self.points.iter().map(|q| crate::geometry::dist(q.coords(), z)).fold(f64::INFINITY, f64::min);
        a.min(b)
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        self.distance(p) <= tol
    }

    /// Coordinate subspaces through `p`: the tangent cone of the template
    /// part of `E` at `p`.
    pub fn subspaces_through(&self, p: &Point, tol: f64) -> Vec<Vec<usize>> {
        self.subspaces
            .iter()
            .filter(|s| self.subspace_distance(s, p.coords()) <= tol)
            .cloned()
            .collect()
    }

    pub fn describe(&self) -> String {
        const NAMES: [&str; 3] = ["x", "y", "z"];
        let axis = |i: usize| {
            if self.dim <= 3 {
                NAMES[i].to_string()
            } else {
                format!("z{}", i + 1)
            }
        };
        let mut parts: Vec<String> = self
            .subspaces
            .iter()
            .map(|s| match s.len() {
                0 => "{0}".to_string(),
                1 => format!("{}-axis", axis(s[0])),
                _ => format!("span({})", s.iter().map(|i| axis(*i)).collect::<Vec<_>>().join(",")),
            })
            .collect();
        parts.extend(self.points.iter().map(|p| format!("{{{p}}}")));
        if parts.is_empty() {
            "∅".into()
        } else {
            parts.join(" ∪ ")
        }
    }
}

/// Zero set of `X` inside `bbox`: the algebraic template, plus grid
/// candidates (`max |X_i| < tol`) polished by Gauss–Newton and kept only
/// when they lie off the template.
pub fn singular_set(x: &PolyVectorField, bbox: &BoundingBox, h: f64) -> Result<SingularSet> {
    if bbox.real_dim() != 2 * x.dim() {
        return Err(Error::InvalidInput("box and field differ in dimension".into()));
    }
    let mut set = x.singular_template();
    let grid = crate::geometry::Grid::full(bbox, h)?;
    let tol = 2.0 * h * (1.0 + lipschitz_scale(x, bbox));
    let seeds: Vec<Vec<Complex64>> = (0..grid.len())
        .into_par_iter()
        .filter_map(|i| {
            let z = grid.coords(i);
            let v = x.eval(&z);
            (v.iter().map(|c| c.norm()).fold(0.0, f64::max) < tol).then_some(z)
        })
        .collect();
    let polished: Vec<Vec<Complex64>> = seeds
        .into_par_iter()
        .filter_map(|z| gauss_newton(x, z))
        .collect();
    for z in polished {
        let p = Point::new(z)?;
        // Zeros within one cell of the template are the template itself.
        if set.contains(&p, h) {
            continue;
        }
        if set.points.iter().any(|q| q.distance(&p) < h) {
            continue;
        }
        set.points.push(p);
    }
    Ok(set)
}

fn lipschitz_scale(x: &PolyVectorField, bbox: &BoundingBox) -> f64 {
    let r = bbox
        .lo
        .iter()
        .chain(&bbox.hi)
        .map(|v| v.abs())
        .fold(1.0, f64::max);
    x.components()
        .iter()
        .flatten()
        .map(|m| {
            let deg: u32 = m.exps.iter().sum();
            m.coeff.norm() * deg as f64 * r.powi(deg.saturating_sub(1) as i32)
        })
        .fold(0.0, f64::max)
}

fn gauss_newton(x: &PolyVectorField, mut z: Vec<Complex64>) -> Option<Vec<Complex64>> {
    for _ in 0..60 {
        let v = x.eval(&z);
        let res: f64 = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if res < 1e-14 {
            return Some(z);
        }
        let j = x.jacobian(&z);
        let pinv = j.pseudo_inverse(1e-12).ok()?;
        let step = pinv * nalgebra::DVector::from_vec(v);
        for (zi, s) in z.iter_mut().zip(step.iter()) {
            *zi -= s;
        }
    }
    let res: f64 = x.eval(&z).iter().map(|c| c.norm()).fold(0.0, f64::max);
    (res < 1e-12).then_some(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainExpr;

    fn cube(n: usize, r: f64) -> BoundingBox {
        DomainExpr::centered_polydisc(&vec![r; n]).unwrap().bounding_box()
    }

    #[test]
    fn radial_singular_set_is_origin() {
        let x = PolyVectorField::preset(FieldPreset::Radial(2));
        let s = singular_set(&x, &cube(2, 1.0), 0.25).unwrap();
        assert_eq!(s.subspaces, vec![Vec::<usize>::new()]);
        assert!(s.points.is_empty());
        assert!(s.contains(&Point::origin(2), 1e-12));
    }

    #[test]
    fn three_axes() {
        let x = PolyVectorField::preset(FieldPreset::XyZyZx);
        let s = singular_set(&x, &cube(3, 1.0), 0.5).unwrap();
        let mut subs = s.subspaces.clone();
        subs.sort();
        assert_eq!(subs, vec![vec![0], vec![1], vec![2]]);
        assert!(s.is_symbolic());
        let y = PolyVectorField::preset(FieldPreset::XZyZy);
        let mut subs = y.singular_template().subspaces;
        subs.sort();
        assert_eq!(subs, vec![vec![1], vec![2]]);
    }

    #[test]
    fn constant_field_has_no_zeros() {
        let x = PolyVectorField::preset(FieldPreset::Constant { dim: 2, axis: 0 });
        assert!(singular_set(&x, &cube(2, 1.0), 0.25).unwrap().is_empty());
    }

    #[test]
    fn off_template_zeros_are_found_and_polished() {
        // X = (x − 1/2, y): single zero at (1/2, 0), not a coordinate subspace.
        let x = PolyVectorField::new(vec![
            vec![mono(&[1, 0], 1.0), mono(&[0, 0], -0.5)],
            vec![mono(&[0, 1], 1.0)],
        ])
        .unwrap();
        let s = singular_set(&x, &cube(2, 1.0), 0.25).unwrap();
        assert!(s.subspaces.is_empty());
        assert_eq!(s.points.len(), 1);
        for v in x.eval_at(&s.points[0]).unwrap() {
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn catalog_recognition() {
        for p in [FieldPreset::Radial(3), FieldPreset::Weighted12, FieldPreset::XZyZy] {
            assert_eq!(PolyVectorField::preset(p).catalog_kind(), Some(p));
        }
        assert!(PolyVectorField::preset(FieldPreset::XZyZy).hyperplane_invariant(0));
        assert!(PolyVectorField::preset(FieldPreset::XZyZy).hyperplane_invariant(2));
        assert!(!PolyVectorField::preset(FieldPreset::Constant { dim: 2, axis: 0 }).hyperplane_invariant(0));
    }
}
