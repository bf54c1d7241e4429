use folmetlab::foliation::FieldPreset;
use folmetlab::geometry::{BoundingBox, Point};
use folmetlab::lab::families::{arm_bidisc, arm_tridisc, shrinking_shell};
use folmetlab::lab::{
    detect_f, hausdorff_to_kernel_check, pointwise_convergence_experiment, uniform_convergence_experiment,
    ConvergenceSetup,
};

fn main() -> folmetlab::Result<()> {
    let arm = arm_bidisc();
    let mut s = ConvergenceSetup::new(arm.field.clone(), arm.sequence.clone(), arm.w.clone(), arm.ambient.clone());
    s.points = vec![Point::real(&[0.5, 0.0]), Point::real(&[0.3, 0.3])];
    s.schedule = vec![1, 10, 100, 1000];
    s.f = Some(detect_f(&arm.sequence, &arm.w, &arm.w.bounding_box().expanded(1.5), 0.02, 200)?);
    let rep = pointwise_convergence_experiment(&s)?;
    println!("bidisc arm, pointwise:");
    for r in &rep.rows {
        println!(
            "  {} n = {:>4}: eta_n {:.7} eta_W {:.7} gap {:.7} in S {:?}",
            r.point,
            r.n,
            r.eta_n.value(),
            r.eta_w.value(),
            r.gap,
            r.in_s
        );
    }
    println!("  verdicts {:?}", rep.verdicts);

    let tri = arm_tridisc(FieldPreset::XZyZy)?;
    let mut u = ConvergenceSetup::new(tri.field.clone(), tri.sequence.clone(), tri.w.clone(), tri.ambient.clone());
    u.points = vec![
        Point::real(&[0.5, 0.0, 0.0]),
        Point::real(&[0.3, 0.2, 0.0]),
        Point::real(&[0.2, 0.0, 0.4]),
        Point::real(&[0.4, 0.3, 0.1]),
    ];
    u.schedule = vec![10, 100, 200];
    let rep = uniform_convergence_experiment(&u)?;
    println!("tridisc arm, uniform: sup gaps {:?}, verdicts {:?}", rep.sup_gaps(), rep.verdicts);

    let bbox = BoundingBox::new(vec![-3.0; 4], vec![3.0; 4])?;
    for fam in [shrinking_shell(), arm_bidisc()] {
        let r = hausdorff_to_kernel_check(&fam.sequence, &fam.w, &bbox, 0.02, &[5, 10, 20, 50, 100])?;
        println!("{}: Hausdorff to kernel {} ({})", fam.name, if r.pass() { "holds" } else { "fails" }, r.message);
    }
    Ok(())
}
