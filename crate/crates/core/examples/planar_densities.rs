use folmetlab::planar::{density_bounds, pushforward_consistency_check, Cover, PlanarDomain, SampledDomain, StarDomain};
use folmetlab::Complex64;

fn main() -> folmetlab::Result<()> {
    let q = Complex64::new(0.5, 0.0);
    for d in [
        PlanarDomain::disc(1.0)?,
        PlanarDomain::punctured_disc(1.0)?,
        PlanarDomain::annulus(0.25, 1.0)?,
    ] {
        let l = d.density(q)?;
        println!("{d:?}: lambda(0.5) = {:.10} ({:?})", l.value, l.provenance);
    }

    let covers = [
        Cover::Scaled { radius: 2.0 },
        Cover::Exponential { radius: 1.0 },
        Cover::Annular { inner: 0.5, outer: 2.0 },
    ];
    for c in covers {
        let worst = (0..40)
            .map(|k| {
                let z = Complex64::from_polar(0.9 * k as f64 / 40.0, 0.7 * k as f64);
                pushforward_consistency_check(&c, z)
            })
            .collect::<folmetlab::Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!("{c:?}: pushforward residual {worst:.2e}");
    }

    let star = StarDomain::new(vec![1.0, 0.6, 1.4, 0.8, 1.1])?;
    let (lo, hi) = (Complex64::new(-1.5, -1.5), Complex64::new(1.5, 1.5));
    let raster = SampledDomain::from_predicate(|z| star.contains(z), lo, hi, 0.01, None)?;
    let b = density_bounds(&raster, Complex64::new(0.1, 0.0))?;
    println!("five-armed star at 0.1: {:.6} <= lambda <= {:?}", b.lower, b.upper);
    Ok(())
}
