use folmetlab::geometry::{check_kernel_convergence, rho_distance, BoundingBox, KernelVerdictKind};
use folmetlab::lab::families::{alternating, arm_bidisc, shrinking_shell};

fn main() -> folmetlab::Result<()> {
    let h = 0.02;
    let bbox = BoundingBox::new(vec![-3.0; 4], vec![3.0; 4])?;

    let shell = shrinking_shell();
    for n in [1, 2, 5, 10, 20] {
        let r = rho_distance(&shell.sequence.term(n)?, &shell.w, &bbox, h)?;
        println!("shrinking shell: rho(W_{n}, W) = {r:.4}   (exact {:.4})", 2.0 * 2f64.sqrt() / n as f64);
    }

    for fam in [arm_bidisc(), alternating()] {
        let v = check_kernel_convergence(&fam.sequence, 5, 200, &bbox, h, 7)?;
        let verdict = match v.kind {
            KernelVerdictKind::Converges => "converges",
            KernelVerdictKind::Fails => "fails",
            KernelVerdictKind::Inconclusive => "inconclusive",
        };
        println!("{}: {verdict} ({})", fam.name, v.witness);
        for (label, d) in &v.distances {
            println!("  {label:>12}: rho to common kernel {d:.4}");
        }
        if let Ok(r) = v.kernel.rho_to(&fam.w) {
            println!("  kernel vs declared limit: {r:.4}");
        }
    }
    Ok(())
}
