use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use super::domain::BoundingBox;
use super::grid::{Grid, GridKind, GridMask, SampleCloud};
use super::DomainExpr;
use crate::{Error, Result};

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `sup_a d(a, B)`; points of `a` whose distance cannot raise `floor` stop early.
fn directed(a: &[Vec<f64>], b_sorted: &[Vec<f64>], floor: &AtomicU64) -> f64 {
    a.par_iter()
        .map(|p| {
            let cmax = f64::from_bits(floor.load(Ordering::Relaxed));
            let start = b_sorted.partition_point(|q| q[0] < p[0]);
            let mut best = f64::INFINITY;
            let (mut lo, mut hi) = (start, start);
            loop {
                let left = lo > 0 && (p[0] - b_sorted[lo - 1][0]).powi(2) < best;
                let right = hi < b_sorted.len() && (b_sorted[hi][0] - p[0]).powi(2) < best;
                if !left && !right {
                    break;
                }
                if left {
                    lo -= 1;
                    best = best.min(sq(p, &b_sorted[lo]));
                }
                if right {
                    best = best.min(sq(p, &b_sorted[hi]));
                    hi += 1;
                }
                if best <= cmax * cmax {
                    return 0.0;
                }
            }
            let d = best.sqrt();
            floor.fetch_max(d.to_bits(), Ordering::Relaxed);
            d
        })
        .reduce(|| 0.0, f64::max)
}

/// Hausdorff distance `max(sup_a d(a,B), sup_b d(b,A))` between two clouds.
pub fn hausdorff_distance(a: &SampleCloud, b: &SampleCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::UndefinedHausdorff("empty sample cloud"));
    }
    if a.kind != b.kind {
        return Err(Error::InvalidInput(
            "clouds mix modulus-space and full-space representations".into(),
        ));
    }
    let mut pa = a.metric_points();
    let mut pb = b.metric_points();
    if pa.iter().chain(&pb).any(|p| p.len() != pa[0].len()) {
        return Err(Error::InvalidInput("clouds differ in dimension".into()));
    }
    let by_first = |x: &Vec<f64>, y: &Vec<f64>| x[0].total_cmp(&y[0]);
    pa.sort_by(by_first);
    pb.sort_by(by_first);
    // Non-negative f64 bit patterns order like the floats themselves.
    let floor = AtomicU64::new(0f64.to_bits());
    let ab = directed(&pa, &pb, &floor);
    let ba = directed(&pb, &pa, &floor);
    Ok(ab.max(ba))
}

/// Hausdorff distance between two cell sets of the same grid, exact on the
/// cell centres.
pub fn mask_hausdorff(grid: &Grid, a: &GridMask, b: &GridMask) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::UndefinedHausdorff("empty cell set"));
    }
    let da = grid.distance_transform(a);
    let db = grid.distance_transform(b);
    let sup = |mask: &GridMask, dt: &[f64]| {
        mask.bits()
            .par_iter()
            .zip(dt)
            .filter(|(m, _)| **m)
            .map(|(_, d)| *d)
            .reduce(|| 0.0, f64::max)
    };
    Ok(sup(a, &db).max(sup(b, &da)))
}

/// `ρ(U, V) = H(Ū, V̄) + H(∂U, ∂V)` for two open cell sets of one grid.
pub fn rho_distance_on(grid: &Grid, u: &GridMask, v: &GridMask) -> Result<f64> {
    let bu = u.boundary(grid);
    let bv = v.boundary(grid);
    let closures = mask_hausdorff(grid, &u.or(&bu), &v.or(&bv))?;
    let boundaries = mask_hausdorff(grid, &bu, &bv)?;
    Ok(closures + boundaries)
}

/// `ρ(U, V)` at pitch `h`. Pairs of Reinhardt domains are sampled in
/// modulus space; anything else on a full grid over `bbox`.
pub fn rho_distance(u: &DomainExpr, v: &DomainExpr, bbox: &BoundingBox, h: f64) -> Result<f64> {
    let grid = if u.is_reinhardt() && v.is_reinhardt() {
        Grid::covering(&[u, v], h)?
    } else {
        let need = u.bounding_box().hull(&v.bounding_box());
        if bbox.real_dim() != need.real_dim() || !bbox.contains_box(&need) {
            return Err(Error::InvalidInput("box must contain both domains".into()));
        }
        Grid::full(&bbox.expanded(2.0 * h), h)?
    };
    debug_assert!(grid.kind() == GridKind::Full || u.is_reinhardt());
    rho_distance_on(&grid, &grid.classify(u)?, &grid.classify(v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{grid::SampleTag, sample, Point};

    fn closed_disc_cloud(r: f64, h: f64) -> SampleCloud {
        let n = (r / h).round() as i64;
        let mut pts = Vec::new();
        for i in -n..=n {
            for j in -n..=n {
                let (x, y) = (i as f64 * h, j as f64 * h);
                if x * x + y * y <= r * r + 1e-12 {
                    pts.push(Point::from_re_im(&[x, y]).unwrap());
                }
            }
        }
        SampleCloud::from_points(pts, h, SampleTag::Closure)
    }

    #[test]
    fn nested_balls_in_one_variable() {
        let a = closed_disc_cloud(1.0, 0.01);
        let b = closed_disc_cloud(2.0, 0.01);
        let d = hausdorff_distance(&a, &b).unwrap();
        assert!((d - 1.0).abs() <= 0.02, "{d}");
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn empty_cloud_is_an_error() {
        let a = closed_disc_cloud(1.0, 0.1);
        let e = SampleCloud::from_points(vec![], 0.1, SampleTag::Closure);
        assert!(matches!(hausdorff_distance(&a, &e), Err(Error::UndefinedHausdorff(_))));
    }

    #[test]
    fn rho_of_concentric_bidiscs() {
        // Corners (1,1) and (1+δ,1+δ) are √2·δ apart, for closures and
        // boundaries alike.
        let h = 0.01;
        let u = DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap();
        let v = DomainExpr::centered_polydisc(&[1.1, 1.1]).unwrap();
        let r = rho_distance(&u, &v, &v.bounding_box(), h).unwrap();
        let exact = 2.0 * 2f64.sqrt() * 0.1;
        assert!((r - exact).abs() <= 4.0 * h, "{r}");
        assert_eq!(rho_distance(&u, &u, &u.bounding_box(), h).unwrap(), 0.0);
    }

    #[test]
    fn rho_example_arm_stays_away() {
        let w = DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap();
        for n in [5usize, 20] {
            let arm = DomainExpr::centered_polydisc(&[2.0, 1.0 / n as f64]).unwrap();
            let wn = DomainExpr::union(vec![w.clone(), arm]).unwrap();
            let r = rho_distance(&wn, &w, &wn.bounding_box(), 0.02).unwrap();
            assert!(r >= 1.0 - 0.04, "{r}");
        }
    }

    #[test]
    fn cloud_and_mask_distances_agree() {
        let u = DomainExpr::centered_polydisc(&[1.0]).unwrap();
        let v = DomainExpr::centered_polydisc(&[0.5]).unwrap();
        let bb = u.bounding_box();
        let a = sample(&u, &bb, 0.05).unwrap();
        let b = sample(&v, &bb, 0.05).unwrap();
        let d = hausdorff_distance(&a, &b).unwrap();
        assert!((d - 0.5).abs() <= 0.1, "{d}");
    }
}
