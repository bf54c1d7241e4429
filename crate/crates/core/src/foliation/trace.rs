use rayon::prelude::*;

use super::{PolyVectorField, SingularSet};
use crate::geometry::{DomainExpr, Point, SampleCloud, SampleTag};
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone)]
pub struct TraceOptions {
    /// Number of equally spaced complex-time directions.
    pub rays: usize,
    pub s_max: f64,
    pub initial_step: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Stop when the distance to the singular set falls below this.
    pub singular_tol: f64,
    pub max_steps: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            rays: 64,
            s_max: 50.0,
            initial_step: 1e-2,
            rtol: 1e-10,
            atol: 1e-12,
            singular_tol: 1e-6,
            max_steps: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ExitedDomain,
    NearSingular,
    MaxTime,
    StepUnderflow,
    StepBudget,
}

/// Solution of `dz/ds = e^{iθ} X(z)` from the base point.
#[derive(Debug, Clone)]
pub struct TracedRay {
    pub theta: f64,
    /// Time at which the ray stopped.
    pub exit: f64,
    pub reason: StopReason,
    pub samples: Vec<(f64, Vec<Complex64>)>,
}

#[derive(Debug, Clone)]
pub struct TracedLeaf {
    pub base: Point,
    /// `X(p)`, the derivative of the time chart at 0.
    pub velocity: Vec<Complex64>,
    pub rays: Vec<TracedRay>,
    /// Some ray stopped for a reason other than leaving the domain.
    pub truncated: bool,
}

impl TracedLeaf {
    pub fn cloud(&self, resolution: f64) -> SampleCloud {
        let pts = self
            .rays
            .iter()
            .flat_map(|r| r.samples.iter())
            .filter_map(|(_, z)| Point::new(z.clone()).ok())
            .collect();
        SampleCloud::from_points(pts, resolution, SampleTag::Interior)
    }

    /// Unit tangents `X(z)/‖X(z)‖` at every sample.
    pub fn tangents(&self, x: &PolyVectorField) -> Vec<(Vec<Complex64>, Vec<Complex64>)> {
        self.rays
            .iter()
            .flat_map(|r| r.samples.iter())
            .map(|(_, z)| {
                let v = x.eval(z);
                let n = crate::geometry::norm(&v);
                (z.clone(), v.iter().map(|c| c / n).collect())
            })
            .collect()
    }
}

// Dormand–Prince 5(4).
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One step; returns the fifth-order point and the scaled error.
fn dp_step(f: &impl Fn(&[Complex64]) -> Vec<Complex64>, z: &[Complex64], h: f64, opts: &TraceOptions) -> (Vec<Complex64>, f64) {
    debug_assert!(C[0] == 0.0);
    let n = z.len();
    let mut k: Vec<Vec<Complex64>> = Vec::with_capacity(7);
    for s in 0..7 {
        let mut y = z.to_vec();
        for (j, kj) in k.iter().enumerate() {
            for i in 0..n {
                y[i] += kj[i] * (h * A[s][j]);
            }
        }
        k.push(f(&y));
    }
    let mut hi = z.to_vec();
    let mut err = 0.0f64;
    for i in 0..n {
        let mut d5 = Complex64::new(0.0, 0.0);
        let mut d4 = Complex64::new(0.0, 0.0);
        for s in 0..7 {
            d5 += k[s][i] * B5[s];
            d4 += k[s][i] * B4[s];
        }
        hi[i] += d5 * h;
        let scale = opts.atol + opts.rtol * z[i].norm().max(hi[i].norm());
        err = err.max(((d5 - d4) * h).norm() / scale);
    }
    (hi, err)
}

fn trace_ray(
    x: &PolyVectorField,
    e: &SingularSet,
    d: &DomainExpr,
    p: &[Complex64],
    theta: f64,
    opts: &TraceOptions,
) -> TracedRay {
    let rot = Complex64::from_polar(1.0, theta);
    let f = |z: &[Complex64]| -> Vec<Complex64> { x.eval(z).into_iter().map(|v| v * rot).collect() };
    let inside = |z: &[Complex64]| d.sdf_at(z) < 0.0;
    let mut z = p.to_vec();
    let mut s = 0.0;
    let mut h = opts.initial_step;
    let mut samples = vec![(0.0, z.clone())];
    let mut reason = StopReason::MaxTime;
    let mut steps = 0;
    while s < opts.s_max {
        steps += 1;
        if steps > opts.max_steps {
            reason = StopReason::StepBudget;
            break;
        }
        if h < 1e-14 {
            reason = StopReason::StepUnderflow;
            break;
        }
        let hs = h.min(opts.s_max - s);
        let (zn, err) = dp_step(&f, &z, hs, opts);
        let ok = err <= 1.0 && zn.iter().all(|c| c.re.is_finite() && c.im.is_finite());
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        if !ok {
            h = hs * factor.min(0.5);
            continue;
        }
        if !inside(&zn) {
            // Bisect the step length for the exit time.
            let (mut lo, mut hi) = (0.0, hs);
            let mut last = z.clone();
            for _ in 0..48 {
                let mid = 0.5 * (lo + hi);
                let (zm, _) = dp_step(&f, &z, mid, opts);
                if inside(&zm) {
                    lo = mid;
                    last = zm;
                } else {
                    hi = mid;
                }
            }
            s += lo;
            if lo > 0.0 {
                samples.push((s, last));
            }
            reason = StopReason::ExitedDomain;
            break;
        }
        s += hs;
        z = zn;
        samples.push((s, z.clone()));
        if e.distance_at(&z) < opts.singular_tol {
            reason = StopReason::NearSingular;
            break;
        }
        h = hs * factor;
    }
    TracedRay {
        theta,
        exit: s,
        reason,
        samples,
    }
}

/// Traces the leaf of `X` through `p` in `D` along `opts.rays` complex-time
/// directions. The time domain of the leaf is star-shaped about 0 with the
/// exit times as radii.
pub fn trace_leaf(x: &PolyVectorField, p: &Point, d: &DomainExpr, opts: &TraceOptions) -> Result<TracedLeaf> {
    if p.dim() != x.dim() || p.dim() != d.dim() {
        return Err(Error::InvalidInput("field, point and domain differ in dimension".into()));
    }
    if !d.is_inside(p) {
        return Err(Error::OutsideDomain(format!("{p} is not in the domain")));
    }
    if opts.rays < 3 || !(opts.s_max > 0.0) || !(opts.initial_step > 0.0) {
        return Err(Error::InvalidInput("trace needs ≥ 3 rays and positive times".into()));
    }
    let e = x.singular_template();
    let velocity = x.eval_at(p)?;
    if e.contains(p, opts.singular_tol) || crate::geometry::norm(&velocity) < 1e-14 {
        return Err(Error::OnSingularSet(format!("{p}")));
    }
    let rays: Vec<TracedRay> = (0..opts.rays)
        .into_par_iter()
        .map(|j| {
            let theta = std::f64::consts::TAU * j as f64 / opts.rays as f64;
            trace_ray(x, &e, d, p.coords(), theta, opts)
        })
        .collect();
    let truncated = rays.iter().any(|r| r.reason != StopReason::ExitedDomain);
    Ok(TracedLeaf {
        base: p.clone(),
        velocity,
        rays,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::FieldPreset;

    fn opts(rays: usize) -> TraceOptions {
        TraceOptions {
            rays,
            s_max: 20.0,
            ..TraceOptions::default()
        }
    }

    #[test]
    fn weighted_leaf_stays_on_parabola() {
        let x = PolyVectorField::preset(FieldPreset::Weighted12);
        let w = DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap();
        let p = Point::real(&[0.5, 0.2]);
        let t = trace_leaf(&x, &p, &w, &opts(16)).unwrap();
        let (x0, y0) = (p.coords()[0], p.coords()[1]);
        for r in &t.rays {
            for (_, z) in &r.samples {
                assert!((x0 * x0 * z[1] - y0 * z[0] * z[0]).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn radial_rays_are_collinear_and_exit_on_time() {
        let x = PolyVectorField::preset(FieldPreset::Radial(2));
        let w = DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap();
        let p = Point::real(&[0.5, 0.25]);
        let t = trace_leaf(&x, &p, &w, &opts(8)).unwrap();
        for r in &t.rays {
            for (_, z) in &r.samples {
                assert!((z[0] * 0.25 - z[1] * 0.5).norm() < 1e-9);
            }
        }
        // Along θ = 0 the point 0.5·e^s leaves the unit bidisc at s = log 2.
        assert_eq!(t.rays[0].reason, StopReason::ExitedDomain);
        assert!((t.rays[0].exit - 2f64.ln()).abs() < 1e-9, "{}", t.rays[0].exit);
    }

    #[test]
    fn constant_field_traces_segment() {
        let x = PolyVectorField::preset(FieldPreset::Constant { dim: 2, axis: 0 });
        let w = DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap();
        let t = trace_leaf(&x, &Point::origin(2), &w, &opts(4)).unwrap();
        for r in &t.rays {
            assert!((r.exit - 1.0).abs() < 1e-9);
            for (_, z) in &r.samples {
                assert_eq!(z[1], Complex64::new(0.0, 0.0));
            }
        }
        assert!(!t.truncated);
    }

    #[test]
    fn starting_on_singular_set_is_rejected() {
        let x = PolyVectorField::preset(FieldPreset::Radial(2));
        let w = DomainExpr::centered_polydisc(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            trace_leaf(&x, &Point::origin(2), &w, &opts(4)),
            Err(Error::OnSingularSet(_))
        ));
    }
}
