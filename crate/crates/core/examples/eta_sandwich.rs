use folmetlab::eta::{eta_estimate, EtaOptions};
use folmetlab::foliation::{FieldPreset, PolyVectorField};
use folmetlab::geometry::{DomainExpr, Point};

fn main() -> folmetlab::Result<()> {
    let opts = EtaOptions::default();
    let bidisc = DomainExpr::centered_polydisc(&[1.0, 1.0])?;
    let ball = DomainExpr::ball(Point::origin(2), 1.0)?;
    let shifted = DomainExpr::ball(Point::real(&[0.3, 0.0]), 1.0)?;
    let radial = PolyVectorField::preset(FieldPreset::Radial(2));
    let weighted = PolyVectorField::preset(FieldPreset::Weighted12);

    let runs = [
        ("radial, bidisc", &radial, &bidisc, Point::real(&[0.5, 0.0])),
        ("radial, ball", &radial, &ball, Point::real(&[0.3, 0.4])),
        ("x∂x + 2y∂y, bidisc", &weighted, &bidisc, Point::real(&[0.5, 0.5])),
        ("x∂x + 2y∂y, ball", &weighted, &ball, Point::real(&[0.4, 0.3])),
        ("radial, shifted ball", &radial, &shifted, Point::real(&[0.5, 0.3])),
        ("x∂x + 2y∂y, shifted", &weighted, &shifted, Point::real(&[0.6, 0.2])),
        ("x∂x + 2y∂y, on E", &weighted, &bidisc, Point::origin(2)),
    ];
    for (name, x, d, p) in runs {
        let e = eta_estimate(x, &p, d, &opts)?;
        match e.exact {
            Some(v) => println!("{name:>20} at {p}: eta = {v:.9} ({})", e.method.as_str()),
            None => println!(
                "{name:>20} at {p}: {:.6} <= eta <= {:.6}  width {:.2}% ({})",
                e.lower,
                e.upper,
                100.0 * e.relative_width(),
                e.method.as_str()
            ),
        }
    }
    Ok(())
}
