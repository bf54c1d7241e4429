use folmetlab::foliation::FieldPreset;
use folmetlab::geometry::{BoundingBox, Point};
use folmetlab::lab::families::{arm_tridisc, diagonal_tube};
use folmetlab::lab::{defective_membership, detect_f, removability_check};

fn main() -> folmetlab::Result<()> {
    let h = 0.05;
    let fam = arm_tridisc(FieldPreset::XZyZy)?;
    let f = detect_f(&fam.sequence, &fam.w, &fam.w.bounding_box().expanded(1.5), h, 200)?;
    let (lo, hi) = f
        .points
        .iter()
        .map(|p| p.coords()[1].norm())
        .fold((f64::INFINITY, 0.0f64), |(a, b), m| (a.min(m), b.max(m)));
    let off = f
        .points
        .iter()
        .map(|p| p.coords()[0].norm().hypot(p.coords()[2].norm()))
        .fold(0.0, f64::max);
    println!("tridisc arm: {} samples of F, {lo:.3} <= |y| <= {hi:.3}, off the y axis by <= {off:.3}", f.len());

    let tube = diagonal_tube();
    let h = 0.1;
    let bbox = BoundingBox::new(vec![-3.5; 4], vec![3.5; 4])?;
    let t = std::time::Instant::now();
    let f = detect_f(&tube.sequence, &tube.w, &bbox, h, 200)?;
    println!("diagonal tube: {} samples of F in {:.1?}", f.len(), t.elapsed());
    for xy in [[0.5, 0.2], [0.5, 0.05], [0.8, 0.5], [0.5, 0.4]] {
        let p = Point::real(&xy);
        let m = defective_membership(&tube.field, &f, &p, &tube.ambient, h)?;
        let r = removability_check(&tube.field, &f, &p, &tube.ambient, h)?;
        println!(
            "  {p}: defective = {}, distance {:.3}, removability {} (area ratio {:.3})",
            m.defective,
            m.distance,
            r.kind.as_str(),
            r.area_ratio
        );
    }
    Ok(())
}
