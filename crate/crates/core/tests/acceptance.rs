//! Acceptance criteria, one line each. Runs as a plain binary so the lines
//! print in order; exits non-zero when a criterion outside `KNOWN_RED`
//! fails.

use std::f64::consts::SQRT_2;
use std::time::{Duration, Instant};

use folmetlab::eta::{eta_estimate, eta_exact, eta_mc_lower, eta_upper_projection, EtaMethod, EtaOptions};
use folmetlab::foliation::{leaf_through_catalog, transversal_type_check, ConeVerdictKind, FieldPreset, PolyVectorField};
use folmetlab::geometry::{check_kernel_convergence, rho_distance, BoundingBox, DomainExpr, KernelVerdictKind, Point};
use folmetlab::lab::families::{arm_bidisc, arm_tridisc, diagonal_tube, shrinking_shell};
use folmetlab::lab::{
    covering_radius, defective_membership, dense_defective_construction, detect_f, pointwise_convergence_experiment,
    radial_leaf_samples, removability_check, slice_test_grid, uniform_convergence_experiment, ConvergenceSetup,
    ExperimentReport, RemovabilityKind,
};
use folmetlab::planar::{pushforward_consistency_check, Cover, PlanarDomain};
use folmetlab::rng::SeedStream;
use folmetlab::{Complex64, Result};
use rand::Rng;

/// Criteria known to fail as stated; see the notes
/// printed with them.
const KNOWN_RED: [usize; 3] = [3, 4, 6];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn seeded_polydisc(seed: u64, label: &str, radii: &[f64], count: usize) -> Vec<Point> {
    let mut rng = SeedStream::new(seed).child(label).rng();
    (0..count)
        .map(|_| {
            let z = radii
                .iter()
                .map(|r| Complex64::from_polar(r * rng.gen::<f64>().sqrt(), std::f64::consts::TAU * rng.gen::<f64>()))
                .collect();
            Point::new(z).expect("finite")
        })
        .collect()
}

fn liminf_rows(rep: &ExperimentReport) -> (bool, usize) {
    (rep.verdicts.liminf_ok, rep.rows.iter().filter(|r| !r.in_e).count())
}

// 1: persistent gap on the bidisc arm.
fn persistent_gap() -> Result<Outcome> {
    let t = Instant::now();
    let fam = arm_bidisc();
    let p = Point::real(&[0.5, 0.0]);
    let want_n = 0.25 * 16f64.ln().powi(2) / 4.0;
    let want_w = 0.25 * 4f64.ln().powi(2) / 4.0;
    let mut worst_sq = 0.0f64;
    for n in [1, 2, 3, 10, 100, 1000] {
        let leaf = leaf_through_catalog(&fam.field, &p, &fam.sequence.term(n)?)?;
        let e = eta_exact(&leaf, &p)?.value();
        worst_sq = worst_sq.max((e * e - want_n).abs());
    }
    let leaf = leaf_through_catalog(&fam.field, &p, &fam.w)?;
    let ew = eta_exact(&leaf, &p)?.value();
    let err_w = (ew * ew - want_w).abs();
    let mut s = ConvergenceSetup::new(fam.field.clone(), fam.sequence.clone(), fam.w.clone(), fam.ambient.clone());
    s.points = vec![p];
    s.schedule = (1..=200).collect();
    let rep = pointwise_convergence_experiment(&s)?;
    let gap_err = rep.rows.iter().map(|r| (r.gap - 0.3465736).abs()).fold(0.0, f64::max);
    let el = t.elapsed();
    let printed = (want_n - 0.4804530).abs() < 5e-8 && (want_w - 0.1201133).abs() < 5e-8;
    outcome(
        worst_sq < 1e-9 && err_w < 1e-9 && gap_err < 1e-6 && printed && el < Duration::from_secs(1),
        format!(
            "|eta_n^2 - 0.4804530| {worst_sq:.1e}, |eta_W^2 - 0.1201133| {err_w:.1e}, gap error {gap_err:.1e} over {} rows, {el:.2?}",
            rep.rows.len()
        ),
    )
}

// 2: kernel of the bidisc arm.
fn arm_kernel() -> Result<Outcome> {
    let t = Instant::now();
    let fam = arm_bidisc();
    let h = 0.02;
    let bbox = fam.ambient.bounding_box();
    let v = check_kernel_convergence(&fam.sequence, 5, 200, &bbox, h, 7)?;
    let rho = v.kernel.rho_to(&fam.w)?;
    let el = t.elapsed();
    outcome(
        v.kind == KernelVerdictKind::Converges && v.distances.len() >= 5 && rho <= 2.0 * h && el < Duration::from_secs(30),
        format!("{:?} over {} subsequences, rho(kernel, P(1,1)) = {rho:.4}, {el:.2?}", v.kind, v.distances.len()),
    )
}

// 3: Hausdorff-convergent shell.
fn shrinking_shell_suite() -> Result<Outcome> {
    let t = Instant::now();
    let fam = shrinking_shell();
    let h = 0.02;
    let bbox = BoundingBox::new(vec![-2.5; 4], vec![2.5; 4])?;
    let ns = [1, 2, 3, 5, 10, 20, 50];
    let rho: Vec<f64> = ns
        .iter()
        .map(|&n| rho_distance(&fam.sequence.term(n)?, &fam.w, &bbox, h))
        .collect::<Result<_>>()?;
    let decreasing = rho.windows(2).all(|w| w[1] <= w[0]);
    let literal = ns.iter().zip(&rho).all(|(&n, r)| (r - 2.0 / n as f64).abs() <= 4.0 * h);
    let exact = ns.iter().zip(&rho).all(|(&n, r)| (r - 2.0 * SQRT_2 / n as f64).abs() <= 4.0 * h);
    let kernel = folmetlab::geometry::kernel_of_sequence(&fam.sequence, 200, &bbox, h)?.rho_to(&fam.w)?;
    let f = detect_f(&fam.sequence, &fam.w, &bbox, h, 200)?;
    let el = t.elapsed();
    let pairs: Vec<String> = ns.iter().zip(&rho).map(|(n, r)| format!("{n}:{r:.3}")).collect();
    outcome(
        decreasing && literal && kernel <= 2.0 * h && f.is_empty() && el < Duration::from_secs(60),
        format!(
            "rho [{}], within 4h of 2/n: {literal}, within 4h of 2*sqrt(2)/n: {exact}, kernel rho {kernel:.3}, F samples {}, {el:.2?}",
            pairs.join(" "),
            f.len()
        ),
    )
}

// 4: tridisc arm with x∂x + zy∂y + zy∂z.
fn tridisc_uniform() -> Result<Outcome> {
    let t = Instant::now();
    let fam = arm_tridisc(FieldPreset::XZyZy)?;
    let h = 0.02;
    let f = detect_f(&fam.sequence, &fam.w, &fam.ambient.bounding_box(), h, 200)?;
    let decl = fam.sequence.declared_f().expect("declared");
    let off = f.points.iter().map(|p| decl.distance(p)).fold(0.0, f64::max);
    let gaps = (0..=50)
        .map(|k| {
            let y = 1.0 + 2.0 * h + (1.0 - 4.0 * h) * k as f64 / 50.0;
            let q = Point::real(&[0.0, y, 0.0]);
            f.points.iter().map(|p| p.distance(&q)).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let recovered = !f.is_empty() && off <= 2.0 * h && gaps <= 2.0 * h;

    let mut rng = SeedStream::new(7).child("e-points").rng();
    let mut transversal = 0;
    for i in 0..20 {
        let m = 0.01 + 0.09 * rng.gen::<f64>();
        let c = Complex64::from_polar(m, std::f64::consts::TAU * rng.gen::<f64>());
        let p = if i % 2 == 0 {
            Point::new(vec![Complex64::default(), c, Complex64::default()])?
        } else {
            Point::new(vec![Complex64::default(), Complex64::default(), c])?
        };
        let v = transversal_type_check(&fam.field, &p, 0.05, 32, 1e-3, 11 + i)?;
        transversal += (v.kind == ConeVerdictKind::Transversal) as usize;
    }

    let mut s = ConvergenceSetup::new(fam.field.clone(), fam.sequence.clone(), fam.w.clone(), fam.ambient.clone());
    s.points = seeded_polydisc(7, "compact", &[0.9, 0.9, 0.9], 100);
    s.schedule = vec![10, 50, 100, 200];
    s.h = h;
    s.f = Some(f.clone());
    let rep = uniform_convergence_experiment(&s)?;
    let sup = rep.sup_gaps().last().map_or(f64::INFINITY, |g| g.1);
    let width = rep.max_mc_width();
    let mc = rep.final_rows().filter(|r| !r.is_closed_form()).count();
    let mut widths: Vec<f64> = rep.final_rows().filter(|r| !r.is_closed_form()).map(|r| r.eta_w.relative_width()).collect();
    widths.sort_by(f64::total_cmp);
    let median = widths.get(widths.len() / 2).copied().unwrap_or(0.0);
    let el = t.elapsed();
    let (liminf, _) = liminf_rows(&rep);
    outcome(
        recovered
            && transversal == 20
            && sup < 1e-3
            && width < 0.05
            && rep.verdicts.uniform_ok == Some(true)
            && liminf
            && el < Duration::from_secs(600),
        format!(
            "F: {} samples, off segment {off:.3}, segment gap {gaps:.3}; transversal {transversal}/20; \
             sup gap at n=200 {sup:.1e}, {mc} MC rows of 100, widest sandwich {:.2}% (median {:.2}%), {el:.1?}",
            f.len(),
            100.0 * width,
            100.0 * median
        ),
    )
}

// 5: xy∂x + zy∂y + zx∂z is not transversal along the x axis.
fn discontinuity() -> Result<Outcome> {
    let x = PolyVectorField::preset(FieldPreset::XyZyZx);
    let p = Point::real(&[0.5, 0.0, 0.0]);
    let v = transversal_type_check(&x, &p, 0.05, 32, 1e-3, 11)?;
    let angle = v.witness.as_ref().map_or(f64::INFINITY, |w| {
        let n: f64 = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        (w[0].norm() / n).min(1.0).acos()
    });
    let w = DomainExpr::centered_polydisc(&[1.0, 1.0, 1.0])?;
    let opts = EtaOptions::default();
    let flat = 0.5 * 2f64.ln();
    let mut p_err = 0.0f64;
    let mut p_exact = true;
    for n in [2, 5, 10, 100, 1000] {
        let e = eta_estimate(&x, &Point::real(&[0.5, 1.0 / n as f64, 0.0]), &w, &opts)?;
        p_exact &= e.method == EtaMethod::ClosedForm;
        p_err = p_err.max((e.value() - flat).abs());
    }
    let mut q_err = 0.0f64;
    let mut q_vals = Vec::new();
    for k in [1, 2, 4, 8, 12] {
        let n = 10f64.powi(k);
        let e = eta_estimate(&x, &Point::real(&[0.5, 0.0, 1.0 / n]), &w, &opts)?;
        p_exact &= e.method == EtaMethod::ClosedForm;
        q_err = q_err.max((e.value() - n.ln() / n).abs());
        q_vals.push(e.value());
    }
    let q_last = *q_vals.last().expect("nonempty");
    let q_down = q_vals.windows(2).all(|w| w[1] < w[0]);
    outcome(
        v.kind == ConeVerdictKind::NotTransversal
            && angle < 1e-3
            && p_exact
            && p_err < 1e-9
            && flat > 0.0
            && q_err < 1e-9
            && q_down
            && q_last < 1e-9,
        format!(
            "cone {} with witness {angle:.1e} rad from e1; eta_W(p_n) = {flat:.7} within {p_err:.1e}; \
             eta_W(q_n) -> {q_last:.1e} within {q_err:.1e} of log(n)/n",
            v.kind.as_str()
        ),
    )
}

/// Distance in the modulus plane from `(a, b)` to the curve `b = c a²`.
fn curve_distance(a: f64, b: f64, c: f64) -> f64 {
    (0..=4000)
        .map(|k| {
            let s = 2.0 * k as f64 / 4000.0;
            (a - s).hypot(b - c * s * s)
        })
        .fold(f64::INFINITY, f64::min)
}

// 6: diagonal tube with x∂x + 2y∂y.
fn diagonal_tube_suite() -> Result<Outcome> {
    let t = Instant::now();
    let fam = diagonal_tube();
    let h = 0.1;
    let bbox = BoundingBox::new(vec![-3.5; 4], vec![3.5; 4])?;
    let f = detect_f(&fam.sequence, &fam.w, &bbox, h, 200)?;
    let sample = seeded_polydisc(7, "tube-sample", &[1.0, 1.0], 1000);
    let mut literal_checked = 0;
    let mut literal_bad = 0;
    let mut exact_checked = 0;
    let mut exact_bad = 0;
    let mut defective = Vec::new();
    for p in &sample {
        let (a, b) = (p.coords()[0].norm(), p.coords()[1].norm());
        let m = defective_membership(&fam.field, &f, p, &fam.ambient, h)?;
        if m.defective {
            defective.push(p.clone());
        }
        let d_upper = curve_distance(a, b, 1.0);
        if d_upper > 2.0 * h {
            literal_checked += 1;
            literal_bad += (m.defective != (b < a * a)) as usize;
            if curve_distance(a, b, 1.0 / 3.0) > 2.0 * h {
                exact_checked += 1;
                exact_bad += (m.defective != (b < a * a && b > a * a / 3.0)) as usize;
            }
        }
    }
    let picked: Vec<Point> = defective.iter().take(50).cloned().collect();
    let mut removable = 0;
    for p in &picked {
        removable += (removability_check(&fam.field, &f, p, &fam.ambient, h)?.kind == RemovabilityKind::Removable) as usize;
    }
    let mut s = ConvergenceSetup::new(fam.field.clone(), fam.sequence.clone(), fam.w.clone(), fam.ambient.clone());
    s.points = picked.clone();
    s.schedule = vec![10, 50, 100, 200];
    s.h = h;
    let rep = pointwise_convergence_experiment(&s)?;
    let last = rep.final_rows().map(|r| r.gap).fold(0.0, f64::max);
    let closed = rep.final_rows().filter(|r| r.is_closed_form()).count();
    let el = t.elapsed();
    outcome(
        literal_bad == 0
            && picked.len() == 50
            && removable == 50
            && last < 1e-3
            && rep.verdicts.liminf_ok
            && el < Duration::from_secs(300),
        format!(
            "literal |y| < |x|^2: {literal_bad} mismatches of {literal_checked}; \
             |x|^2/3 < |y| < |x|^2: {exact_bad} mismatches of {exact_checked}; \
             removable {removable}/{}; max final gap {last:.1e} ({closed} closed-form rows); {el:.1?}. \
             The leaf {{y = c x^2}} meets the segment y = x, |x| < 3 only when |y| > |x|^2/3",
            picked.len()
        ),
    )
}

// 7: property suites.
fn property_suites() -> Result<Outcome> {
    let t = Instant::now();
    let mut rng = SeedStream::new(7).child("schwarz-pick").rng();
    let mut sp_bad = 0;
    for _ in 0..1000 {
        let r_out = rng.gen_range(0.5..3.0);
        let r_in = r_out * rng.gen_range(0.2..0.95);
        let inner_hole = r_in * rng.gen_range(0.01..0.5);
        let kind = rng.gen_range(0..4);
        let (small, big) = match kind {
            0 => (PlanarDomain::disc(r_in)?, PlanarDomain::disc(r_out)?),
            1 => (PlanarDomain::punctured_disc(r_in)?, PlanarDomain::disc(r_out)?),
            2 => (PlanarDomain::annulus(inner_hole, r_in)?, PlanarDomain::punctured_disc(r_out)?),
            _ => (PlanarDomain::annulus(inner_hole, r_in)?, PlanarDomain::annulus(inner_hole * 0.5, r_out)?),
        };
        let m = rng.gen_range(inner_hole * 1.01..r_in * 0.99);
        let q = Complex64::from_polar(m, rng.gen_range(0.0..std::f64::consts::TAU));
        if big.density(q)?.value > small.density(q)?.value * (1.0 + 1e-12) {
            sp_bad += 1;
        }
    }

    let covers = [
        Cover::Identity,
        Cover::Scaled { radius: 2.5 },
        Cover::Exponential { radius: 1.0 },
        Cover::Exponential { radius: 3.0 },
        Cover::Annular { inner: 0.2, outer: 1.0 },
        Cover::Annular { inner: 1.0, outer: 4.0 },
    ];
    let mut push_worst = 0.0f64;
    for (i, c) in covers.iter().enumerate() {
        let mut rng = SeedStream::new(7).child("pushforward").indexed(i as u64).rng();
        for _ in 0..100 {
            let z = Complex64::from_polar(0.9 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
            let (_, d) = c.eval(z)?;
            let scale = d.norm() * folmetlab::planar::density_disc(z, 1.0)?.value;
            push_worst = push_worst.max(pushforward_consistency_check(c, z)? / scale.max(1.0));
        }
    }

    // Catalog configurations with an exact leaf: (field, domain, point, punctured leaf).
    let bi = DomainExpr::centered_polydisc(&[1.0, 1.0])?;
    let tri = DomainExpr::centered_polydisc(&[1.0, 1.0, 1.0])?;
    let ball = DomainExpr::ball(Point::origin(2), 1.0)?;
    let radial = PolyVectorField::preset(FieldPreset::Radial(2));
    let weighted = PolyVectorField::preset(FieldPreset::Weighted12);
    let xzyzy = PolyVectorField::preset(FieldPreset::XZyZy);
    let xyzyzx = PolyVectorField::preset(FieldPreset::XyZyZx);
    let constant = PolyVectorField::preset(FieldPreset::Constant { dim: 2, axis: 0 });
    let configs = [
        (&radial, &bi, Point::real(&[0.5, 0.0]), true),
        (&radial, &bi, Point::real(&[0.3, 0.2]), true),
        (&radial, &ball, Point::real(&[0.2, 0.4]), true),
        (&weighted, &bi, Point::real(&[0.5, 0.25]), true),
        (&weighted, &bi, Point::real(&[0.6, 0.0]), true),
        (&weighted, &ball, Point::real(&[0.3, 0.3]), true),
        (&xzyzy, &tri, Point::real(&[0.5, 0.0, 0.0]), true),
        (&xyzyzx, &tri, Point::real(&[0.5, 0.3, 0.0]), true),
        (&xyzyzx, &tri, Point::real(&[0.5, 0.0, 0.4]), true),
        (&constant, &bi, Point::real(&[0.2, 0.5]), false),
    ];
    let mut sandwich_bad = 0;
    let mut punctured_bad = 0;
    let mut checked = 0;
    for (i, (x, d, p, punctured)) in configs.iter().enumerate() {
        let exact = eta_exact(&leaf_through_catalog(x, p, d)?, p)?.value();
        let lower = eta_mc_lower(x, p, d, 10_000, 7 + i as u64)?.lower;
        let upper = eta_upper_projection(x, p, d)?.upper;
        checked += 1;
        if !(lower <= exact * (1.0 + 1e-12) && exact <= upper * (1.0 + 1e-12)) {
            sandwich_bad += 1;
        }
        if *punctured && lower < 0.95 * exact {
            punctured_bad += 1;
        }
    }

    // liminf on every row off E, across the experiments above.
    let mut liminf = true;
    let mut rows = 0;
    for (fam, pts, sched) in [
        (arm_bidisc(), seeded_polydisc(3, "liminf", &[0.95, 0.95], 20), vec![1, 10, 100]),
        (shrinking_shell(), seeded_polydisc(4, "liminf", &[0.95, 0.95], 20), vec![1, 10, 100]),
    ] {
        let mut s = ConvergenceSetup::new(fam.field.clone(), fam.sequence.clone(), fam.w.clone(), fam.ambient.clone());
        s.points = pts;
        s.schedule = sched;
        let rep = pointwise_convergence_experiment(&s)?;
        let (ok, n) = liminf_rows(&rep);
        liminf &= ok;
        rows += n;
    }
    let el = t.elapsed();
    outcome(
        sp_bad == 0
            && push_worst < 1e-10
            && sandwich_bad == 0
            && punctured_bad == 0
            && liminf
            && el < Duration::from_secs(300),
        format!(
            "Schwarz-Pick violations {sp_bad}/1000; pushforward residual {push_worst:.1e}; \
             sandwich violations {sandwich_bad}/{checked}, punctured lower < 0.95 exact {punctured_bad}; \
             liminf over {rows} rows {liminf}; {el:.1?}"
        ),
    )
}

// 8: density of the defective set in the dense construction.
fn dense_lines() -> Result<Outcome> {
    let t = Instant::now();
    let c = dense_defective_construction(8, 8)?;
    let h = 0.1;
    let bbox = BoundingBox::new(vec![-2.0; 4], vec![2.0; 4])?;
    let f = detect_f(&c.family.sequence, &c.family.w, &bbox, h, c.n_max)?;
    let off = f.points.iter().map(|p| c.line_distance(p)).fold(0.0, f64::max);
    let grid = slice_test_grid();
    let s = radial_leaf_samples(&f, &c.family.w, &grid);
    let cover = covering_radius(&grid, &s);
    let el = t.elapsed();
    outcome(
        cover < 0.25 && off <= c.tail_width() + h * SQRT_2,
        format!(
            "{} F samples within {off:.3} of the lines; S samples cover the 9x9 slice grid within {cover:.4}; {el:.1?}",
            f.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 8] = [
        ("persistent gap", persistent_gap),
        ("kernel of the bidisc arm", arm_kernel),
        ("shrinking shell", shrinking_shell_suite),
        ("tridisc arm, uniform convergence", tridisc_uniform),
        ("discontinuity along the x axis", discontinuity),
        ("diagonal tube defective set", diagonal_tube_suite),
        ("property suites", property_suites),
        ("dense defective set", dense_lines),
    ];
    let mut unexpected = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let k = i + 1;
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let tag = match (pass, KNOWN_RED.contains(&k)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {k} [{name}]: {tag}: {detail}");
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criterion(s) failed");
        std::process::exit(1);
    }
}
