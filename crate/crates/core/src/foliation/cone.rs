use rand::Rng;

use super::PolyVectorField;
use crate::geometry::{hdot, norm, Point};
use crate::rng::SeedStream;
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeVerdictKind {
    Transversal,
    NotTransversal,
    Inconclusive,
}

impl ConeVerdictKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConeVerdictKind::Transversal => "transversal",
            ConeVerdictKind::NotTransversal => "not_transversal",
            ConeVerdictKind::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConeVerdict {
    pub kind: ConeVerdictKind,
    /// Smallest angle between a sampled leaf direction and the tangent cone
    /// of the singular set.
    pub min_angle: f64,
    /// Leaf direction realising `min_angle`, phase-normalised.
    pub witness: Option<Vec<Complex64>>,
    pub samples: usize,
}

const SCALES: usize = 8;

/// Angle between the complex line through the unit vector `v` and the
/// coordinate subspace spanned by `s`.
fn angle_to_subspace(v: &[Complex64], s: &[usize]) -> f64 {
    let perp: f64 = v
        .iter()
        .enumerate()
        .filter(|(i, _)| !s.contains(i))
        .map(|(_, c)| c.norm_sqr())
        .sum();
    perp.sqrt().min(1.0).asin()
}

fn phase_normalised(v: &[Complex64]) -> Vec<Complex64> {
    let big = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or_default();
    let u = if big.norm() > 0.0 { big.conj() / big.norm() } else { Complex64::new(1.0, 0.0) };
    v.iter().map(|c| c * u).collect()
}

/// Compares normalised leaf directions `X(q)/‖X(q)‖` for `q → p` with the
/// tangent cone of `E` at `p ∈ E`. Directions approach along the coordinate
/// axes first, then along seeded random complex directions, each at
/// `radius·2^{-k}` for eight dyadic `k`.
pub fn transversal_type_check(
    x: &PolyVectorField,
    p: &Point,
    radius: f64,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<ConeVerdict> {
    if p.dim() != x.dim() {
        return Err(Error::InvalidInput("point and field differ in dimension".into()));
    }
    if !(radius > 0.0) || !(tol > 0.0) || samples == 0 {
        return Err(Error::InvalidInput("cone test needs positive radius, tol and samples".into()));
    }
    let e = x.singular_template();
    let on_template = e.contains(p, 1e-12);
    let vanishes = norm(&x.eval(p.coords())) < 1e-12;
    if !vanishes {
        return Err(Error::NotOnSingularSet(format!("{p}")));
    }
    let inconclusive = ConeVerdict {
        kind: ConeVerdictKind::Inconclusive,
        min_angle: f64::NAN,
        witness: None,
        samples: 0,
    };
    if !on_template {
        // Isolated numerical zeros carry no symbolic tangent cone.
        return Ok(inconclusive);
    }
    let cone = e.subspaces_through(p, 1e-12);
    let n = p.dim();
    let mut rng = SeedStream::new(seed).child("cone").rng();
    let mut dirs: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| Complex64::new((i == j) as u8 as f64, 0.0)).collect())
        .take(samples)
        .collect();
    while dirs.len() < samples {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let m = norm(&v);
        if m > 1e-9 {
            dirs.push(v.iter().map(|c| c / m).collect());
        }
    }
    let mut best = f64::INFINITY;
    let mut witness = None;
    let mut used = 0;
    for d in &dirs {
        for k in 0..SCALES {
            let r = radius * 0.5f64.powi(k as i32);
            let q: Vec<Complex64> = p.coords().iter().zip(d).map(|(a, b)| a + b * r).collect();
            let v = x.eval(&q);
            let m = norm(&v);
            if m < 1e-300 || e.distance_at(&q) < 1e-14 {
                continue;
            }
            let v: Vec<Complex64> = v.iter().map(|c| c / m).collect();
            debug_assert!((hdot(&v, &v).re - 1.0).abs() < 1e-9);
            used += 1;
            let a = cone
                .iter()
                .map(|s| angle_to_subspace(&v, s))
                .fold(std::f64::consts::FRAC_PI_2, f64::min);
            if a < best {
                best = a;
                witness = Some(phase_normalised(&v));
            }
        }
    }
    if used == 0 {
        return Ok(inconclusive);
    }
    let kind = if best < tol {
        ConeVerdictKind::NotTransversal
    } else if best > 10.0 * tol {
        ConeVerdictKind::Transversal
    } else {
        ConeVerdictKind::Inconclusive
    };
    Ok(ConeVerdict {
        kind,
        min_angle: best,
        witness,
        samples: used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::FieldPreset;

    #[test]
    fn axis_field_is_not_transversal_along_x_axis() {
        let x = PolyVectorField::preset(FieldPreset::XyZyZx);
        let v = transversal_type_check(&x, &Point::real(&[0.5, 0.0, 0.0]), 0.1, 64, 0.05, 1).unwrap();
        assert_eq!(v.kind, ConeVerdictKind::NotTransversal);
        let w = v.witness.unwrap();
        assert!((w[0] - Complex64::new(1.0, 0.0)).norm() < 1e-3, "{w:?}");
    }

    #[test]
    fn weighted_field_is_transversal_at_origin() {
        let x = PolyVectorField::preset(FieldPreset::Weighted12);
        let v = transversal_type_check(&x, &Point::origin(2), 0.1, 64, 0.05, 1).unwrap();
        assert_eq!(v.kind, ConeVerdictKind::Transversal);
        assert!((v.min_angle - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn mixed_field_is_transversal_near_origin() {
        let x = PolyVectorField::preset(FieldPreset::XZyZy);
        for t in [0.01, 0.1, -0.05] {
            let v = transversal_type_check(&x, &Point::real(&[0.0, t, 0.0]), 1e-3, 64, 0.05, 7).unwrap();
            assert_eq!(v.kind, ConeVerdictKind::Transversal, "{t}: {}", v.min_angle);
        }
    }

    #[test]
    fn regular_point_is_rejected() {
        let x = PolyVectorField::preset(FieldPreset::Radial(2));
        assert!(matches!(
            transversal_type_check(&x, &Point::real(&[0.5, 0.0]), 0.1, 8, 0.05, 1),
            Err(Error::NotOnSingularSet(_))
        ));
    }
}
