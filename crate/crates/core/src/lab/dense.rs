use super::families::{dense_direction, diagonal_pairs, dense_lines, dense_n_max, Family};
use crate::geometry::{DomainExpr, Point, SampleCloud};
use crate::{Complex64, Error, Result};

/// The sequence `W_{j,m} = P(1,1) ∪ R_{j,m}` enumerated along anti-diagonals
/// and truncated once every line has reached tube radius `1/m_max`.
#[derive(Debug, Clone)]
pub struct DenseConstruction {
    pub family: Family,
    pub j_max: usize,
    pub m_max: usize,
    pub n_max: usize,
    /// Boundary points `q_1, ..., q_{j_max}` spanning the lines.
    pub directions: Vec<Point>,
}

pub fn dense_defective_construction(j_max: usize, m_max: usize) -> Result<DenseConstruction> {
    if m_max == 0 {
        return Err(Error::InvalidInput("m_max must be at least 1".into()));
    }
    let family = dense_lines(j_max)?;
    Ok(DenseConstruction {
        family,
        j_max,
        m_max,
        n_max: dense_n_max(j_max, m_max),
        directions: (1..=j_max).map(dense_direction).collect::<Result<_>>()?,
    })
}

impl DenseConstruction {
    /// Euclidean distance from `p` to `∪_j L_j`.
    pub fn line_distance(&self, p: &Point) -> f64 {
        self.directions
            .iter()
            .map(|d| line_distance(p.coords(), d.coords()))
            .fold(f64::INFINITY, f64::min)
    }

    /// Widest tube `1/m` among the terms that `detect_f` reads at `n_max`.
    pub fn tail_width(&self) -> f64 {
        let pairs = diagonal_pairs(self.j_max, self.n_max);
        pairs[self.n_max.div_ceil(2) - 1..]
            .iter()
            .map(|&(_, m)| 1.0 / m as f64)
            .fold(0.0, f64::max)
    }
}

/// Distance from `z` to the complex line `C·d`.
pub fn line_distance(z: &[Complex64], d: &[Complex64]) -> f64 {
    let dd: f64 = d.iter().map(|c| c.norm_sqr()).sum();
    let t: Complex64 = z.iter().zip(d).map(|(a, b)| a * b.conj()).sum::<Complex64>() / dd;
    z.iter()
        .zip(d)
        .map(|(a, b)| (a - t * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// For each target, the nearest sampled point of `S ∩ W` on the radial
/// leaves `C*·f` through the `F` samples. Feet outside `W` are pulled back
/// along the leaf towards the origin.
pub fn radial_leaf_samples(f: &SampleCloud, w: &DomainExpr, targets: &[Point]) -> Vec<Point> {
    use rayon::prelude::*;
    targets
        .par_iter()
        .filter_map(|c| {
            let mut best: Option<(f64, Vec<Complex64>)> = None;
            for p in &f.points {
                let d = p.coords();
                let dd: f64 = d.iter().map(|v| v.norm_sqr()).sum();
                if dd == 0.0 {
                    continue;
                }
                let t: Complex64 = c.coords().iter().zip(d).map(|(a, b)| a * b.conj()).sum::<Complex64>() / dd;
                if t.norm() == 0.0 {
                    continue;
                }
                let mut z: Vec<Complex64> = d.iter().map(|v| v * t).collect();
                let mut s = 1.0;
                while w.sdf_at(&z) >= 0.0 && s > 1e-3 {
                    s *= 0.95;
                    z = d.iter().map(|v| v * t * s).collect();
                }
                if w.sdf_at(&z) >= 0.0 {
                    continue;
                }
                let dist = crate::geometry::dist(&z, c.coords());
                if best.as_ref().is_none_or(|(b, _)| dist < *b) {
                    best = Some((dist, z));
                }
            }
            best.map(|(_, z)| Point::new(z).expect("finite"))
        })
        .collect()
}

/// Test points `(z, z̄)` of the real slice of `P(1,1)` on a 9×9 grid of
/// `z = a + ib`, `a, b ∈ {−0.66 + 0.17k}`, avoiding the origin.
pub fn slice_test_grid() -> Vec<Point> {
    let vals: Vec<f64> = (0..9).map(|k| -0.66 + 0.17 * k as f64).collect();
    let mut out = Vec::with_capacity(81);
    for &a in &vals {
        for &b in &vals {
            let z = Complex64::new(a, b);
            out.push(Point::new(vec![z, z.conj()]).expect("finite"));
        }
    }
    out
}

/// Largest distance from a test point to its nearest sample.
pub fn covering_radius(tests: &[Point], samples: &[Point]) -> f64 {
    use rayon::prelude::*;
    tests
        .par_iter()
        .map(|t| samples.iter().map(|s| t.distance(s)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_distance_is_orthogonal() {
        let d = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let z = [Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)];
        assert!((line_distance(&z, &d) - 2f64.sqrt()).abs() < 1e-12);
        let on = [Complex64::new(0.0, 2.0), Complex64::new(-2.0, 0.0)];
        assert!(line_distance(&on, &d) < 1e-12);
    }

    #[test]
    fn exact_lines_cover_the_slice_grid() {
        let c = dense_defective_construction(8, 8).unwrap();
        let worst = slice_test_grid().iter().map(|p| c.line_distance(p)).fold(0.0, f64::max);
        assert!(worst < 0.25, "{worst}");
        let one = dense_defective_construction(1, 8).unwrap();
        let worst1 = slice_test_grid().iter().map(|p| one.line_distance(p)).fold(0.0, f64::max);
        assert!(worst1 > 0.25);
    }

    #[test]
    fn slice_grid_lies_in_the_bidisc_off_the_origin() {
        let w = DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap();
        for p in slice_test_grid() {
            assert!(w.is_inside(&p) && p.norm() > 0.01);
        }
    }
}
