use std::time::Instant;

use folmetlab::geometry::BoundingBox;
use folmetlab::lab::{covering_radius, dense_defective_construction, detect_f, radial_leaf_samples, slice_test_grid};

fn main() -> folmetlab::Result<()> {
    let h: f64 = std::env::args().nth(1).map_or(0.1, |s| s.parse().expect("pitch"));
    let c = dense_defective_construction(8, 8)?;
    println!("n_max = {}", c.n_max);
    let bbox = BoundingBox::new(vec![-2.0; 4], vec![2.0; 4])?;
    let t = Instant::now();
    let f = detect_f(&c.family.sequence, &c.family.w, &bbox, h, c.n_max)?;
    println!("F: {} samples in {:.1?}", f.len(), t.elapsed());
    let far = f.points.iter().map(|p| c.line_distance(p)).fold(0.0, f64::max);
    println!("largest distance from F to the lines: {far:.4} (tube {:.4} + pitch)", c.tail_width());
    let grid = slice_test_grid();
    let s = radial_leaf_samples(&f, &c.family.w, &grid);
    println!("S samples: {}, covering radius of the slice grid: {:.4}", s.len(), covering_radius(&grid, &s));
    let exact = grid.iter().map(|p| c.line_distance(p)).fold(0.0, f64::max);
    println!("exact lines cover the grid within {exact:.4}");
    Ok(())
}
