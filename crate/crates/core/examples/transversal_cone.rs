use folmetlab::foliation::{transversal_type_check, FieldPreset, PolyVectorField};
use folmetlab::geometry::Point;

fn main() -> folmetlab::Result<()> {
    let cases = [
        (FieldPreset::XZyZy, Point::real(&[0.0, 0.01, 0.0])),
        (FieldPreset::XZyZy, Point::real(&[0.0, 0.0, 0.02])),
        (FieldPreset::XyZyZx, Point::real(&[0.5, 0.0, 0.0])),
        (FieldPreset::Radial(2), Point::origin(2)),
    ];
    for (preset, p) in cases {
        let x = PolyVectorField::preset(preset);
        let v = transversal_type_check(&x, &p, 0.05, 32, 1e-3, 11)?;
        print!("{} at {p}: {} (min angle {:.2e})", preset.name(), v.kind.as_str(), v.min_angle);
        if let Some(w) = &v.witness {
            let s: Vec<String> = w.iter().map(|c| format!("{:.3}", c)).collect();
            print!(", witness [{}]", s.join(", "));
        }
        println!();
    }
    Ok(())
}
