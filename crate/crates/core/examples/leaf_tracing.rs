use folmetlab::eta::leaf_model;
use folmetlab::foliation::{trace_leaf, Monomial, PolyVectorField, TraceOptions};
use folmetlab::geometry::{DomainExpr, Point};
use folmetlab::Complex64;

fn main() -> folmetlab::Result<()> {
    // X = (x + y², -y), outside the closed-form catalog.
    let one = Complex64::new(1.0, 0.0);
    let x = PolyVectorField::new(vec![
        vec![Monomial::new(vec![1, 0], one), Monomial::new(vec![0, 2], one)],
        vec![Monomial::new(vec![0, 1], -one)],
    ])?;
    let d = DomainExpr::ball(Point::origin(2), 1.0)?;
    let p = Point::real(&[0.3, 0.2]);
    let opts = TraceOptions { rays: 32, ..TraceOptions::default() };
    let leaf = trace_leaf(&x, &p, &d, &opts)?;
    let cloud = leaf.cloud(0.01);
    println!("traced {} rays, {} samples, truncated = {}", leaf.rays.len(), cloud.len(), leaf.truncated);
    for r in leaf.rays.iter().step_by(8) {
        println!("  theta {:.3}: exit time {:.4} ({:?})", r.theta, r.exit, r.reason);
    }
    let reach = cloud.points.iter().map(|q| q.norm()).fold(0.0, f64::max);
    println!("farthest sample from the origin: {reach:.4}");
    let model = leaf_model(&x, &p, &d, &opts)?;
    println!("leaf model: {:?}, |phi'(q0)| = {:.4}", model.provenance, model.base_derivative_norm());
    Ok(())
}
