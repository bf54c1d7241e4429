use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::defect::{defective_membership, detect_f};
use crate::eta::{eta_estimate, EtaEstimate, EtaMethod, EtaOptions};
use crate::foliation::PolyVectorField;
use crate::geometry::{kernel_of_sequence, rho_distance, BoundingBox, DomainExpr, DomainSequence, Kernel, Point, SampleCloud};
use crate::rng::SeedStream;
use crate::{Error, Result};

/// Relative tolerance for rows estimated by the Monte-Carlo sandwich.
pub const MC_RELATIVE_TOL: f64 = 0.05;

/// Inputs shared by the convergence experiments.
#[derive(Debug, Clone)]
pub struct ConvergenceSetup {
    pub field: PolyVectorField,
    pub sequence: DomainSequence,
    pub w: DomainExpr,
    /// Ambient domain `U` holding the leaves through `F`.
    pub ambient: DomainExpr,
    pub points: Vec<Point>,
    /// Increasing indices `n` at which `η_n` is evaluated.
    pub schedule: Vec<usize>,
    pub h: f64,
    /// Absolute tolerance for closed-form rows.
    pub tol: f64,
    pub eta: EtaOptions,
    /// Escape-limit samples; `None` skips the defective-set column.
    pub f: Option<SampleCloud>,
    /// Accept compacts that meet `E` (transversal-type foliations).
    pub allow_e: bool,
}

impl ConvergenceSetup {
    pub fn new(field: PolyVectorField, sequence: DomainSequence, w: DomainExpr, ambient: DomainExpr) -> Self {
        Self {
            field,
            sequence,
            w,
            ambient,
            points: Vec::new(),
            schedule: Vec::new(),
            h: 0.02,
            tol: 1e-3,
            eta: EtaOptions::default(),
            f: None,
            allow_e: false,
        }
    }

    /// Uniform tolerance for closed-form rows: `max(10h, 1e-4)`.
    pub fn uniform_tol(&self) -> f64 {
        (10.0 * self.h).max(1e-4)
    }
}

#[derive(Debug, Clone)]
pub struct ReportRow {
    pub point: Point,
    pub n: usize,
    pub eta_n: EtaEstimate,
    pub eta_w: EtaEstimate,
    /// Distance between the `η_n` and `η_W` intervals.
    pub gap: f64,
    pub in_s: Option<bool>,
    pub in_e: bool,
    pub flags: Vec<String>,
}

impl ReportRow {
    pub fn is_closed_form(&self) -> bool {
        self.eta_n.method == EtaMethod::ClosedForm && self.eta_w.method == EtaMethod::ClosedForm
    }

    /// `tol` for closed-form rows, 5% of `η_W` otherwise.
    pub fn tolerance(&self, tol: f64) -> f64 {
        if self.is_closed_form() {
            tol
        } else {
            tol.max(MC_RELATIVE_TOL * self.eta_w.value())
        }
    }

    pub fn excluded(&self) -> bool {
        self.in_e || self.in_s == Some(true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Pointwise,
    Uniform,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Pointwise => "pointwise",
            ExperimentKind::Uniform => "uniform",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdicts {
    pub pointwise_ok: bool,
    /// Only set by the uniform experiment.
    pub uniform_ok: Option<bool>,
    pub liminf_ok: bool,
}

impl Verdicts {
    pub fn all_pass(&self) -> bool {
        self.pointwise_ok && self.liminf_ok && self.uniform_ok.unwrap_or(true)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub rows: Vec<ReportRow>,
    pub verdicts: Verdicts,
    pub tol: f64,
    pub runtime: Duration,
}

impl ExperimentReport {
    fn last_n(&self) -> Option<usize> {
        self.rows.iter().map(|r| r.n).max()
    }

    /// Rows at the largest scheduled `n`.
    pub fn final_rows(&self) -> impl Iterator<Item = &ReportRow> {
        let last = self.last_n();
        self.rows.iter().filter(move |r| Some(r.n) == last)
    }

    /// `sup_K |η_n − η_W|` over closed-form rows, per scheduled `n`.
    pub fn sup_gaps(&self) -> Vec<(usize, f64)> {
        let mut ns: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        ns.sort_unstable();
        ns.dedup();
        ns.into_iter()
            .map(|n| {
                let s = self
                    .rows
                    .iter()
                    .filter(|r| r.n == n && r.is_closed_form())
                    .map(|r| r.gap)
                    .fold(0.0, f64::max);
                (n, s)
            })
            .collect()
    }

    /// Largest relative sandwich width among Monte-Carlo rows.
    pub fn max_mc_width(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| !r.is_closed_form())
            .flat_map(|r| [r.eta_n.relative_width(), r.eta_w.relative_width()])
            .fold(0.0, f64::max)
    }

    /// Recomputes the verdicts from the rows.
    pub fn recompute_verdicts(&self) -> Verdicts {
        let tol = self.tol;
        let last = self.last_n().unwrap_or(0);
        let tail_start = last.div_ceil(2);
        let pointwise_ok = self
            .final_rows()
            .filter(|r| !r.excluded())
            .all(|r| r.gap <= r.tolerance(tol));
        let liminf_ok = self
            .rows
            .iter()
            .filter(|r| !r.in_e && r.n >= tail_start)
            .all(|r| r.eta_n.upper >= r.eta_w.lower - r.tolerance(tol));
        let uniform_ok = match self.kind {
            ExperimentKind::Pointwise => None,
            ExperimentKind::Uniform => {
                let sup = self.sup_gaps().last().map_or(0.0, |s| s.1);
                let mc_ok = self
                    .final_rows()
                    .filter(|r| !r.is_closed_form())
                    .all(|r| r.gap <= r.tolerance(tol) && r.eta_w.relative_width() < MC_RELATIVE_TOL);
                Some(sup < tol && mc_ok)
            }
        };
        Verdicts {
            pointwise_ok,
            uniform_ok,
            liminf_ok,
        }
    }
}

fn row_options(base: &EtaOptions, i: usize, n: usize) -> EtaOptions {
    let mut o = base.clone();
    o.seed = SeedStream::new(base.seed).child("experiment").indexed(i as u64).indexed(n as u64).seed();
    o
}

fn on_e(x: &PolyVectorField, p: &Point) -> bool {
    x.singular_template().contains(p, 1e-12) || crate::geometry::norm(&x.eval(p.coords())) < 1e-14
}

fn flag_estimate(flags: &mut Vec<String>, tag: &str, e: &EtaEstimate) {
    if e.starved {
        flags.push(format!("{tag}_starved"));
    }
    if e.method == EtaMethod::McSandwich && !e.upper.is_finite() {
        flags.push(format!("{tag}_no_upper"));
    }
}

fn membership(setup: &ConvergenceSetup, p: &Point, in_e: bool) -> Result<Option<bool>> {
    match (&setup.f, in_e) {
        (Some(f), false) => Ok(Some(defective_membership(&setup.field, f, p, &setup.ambient, setup.h)?.defective)),
        (Some(_), true) => Ok(Some(false)),
        (None, _) => Ok(None),
    }
}

fn run_rows(setup: &ConvergenceSetup, in_s: &[Option<bool>]) -> Result<Vec<ReportRow>> {
    if setup.schedule.is_empty() || setup.schedule.windows(2).any(|w| w[0] >= w[1]) || setup.schedule[0] == 0 {
        return Err(Error::InvalidInput("schedule must be a nonempty increasing list of n ≥ 1".into()));
    }
    let terms: Vec<DomainExpr> = setup.schedule.iter().map(|&n| setup.sequence.term(n)).collect::<Result<_>>()?;
    let x = &setup.field;
    let per_point: Vec<Vec<ReportRow>> = setup
        .points
        .par_iter()
        .enumerate()
        .map(|(i, p)| -> Result<Vec<ReportRow>> {
            let in_e = on_e(x, p);
            let eta_w = eta_estimate(x, p, &setup.w, &row_options(&setup.eta, i, 0))?;
            setup
                .schedule
                .iter()
                .zip(&terms)
                .map(|(&n, wn)| {
                    let eta_n = eta_estimate(x, p, wn, &row_options(&setup.eta, i, n))?;
                    let mut flags = Vec::new();
                    flag_estimate(&mut flags, "eta_n", &eta_n);
                    flag_estimate(&mut flags, "eta_w", &eta_w);
                    if in_s[i] == Some(true) {
                        flags.push("in_s".into());
                    }
                    Ok(ReportRow {
                        point: p.clone(),
                        n,
                        gap: eta_n.gap_to(&eta_w),
                        eta_n,
                        eta_w: eta_w.clone(),
                        in_s: in_s[i],
                        in_e,
                        flags,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

fn finish(kind: ExperimentKind, rows: Vec<ReportRow>, tol: f64, start: Instant) -> ExperimentReport {
    let mut report = ExperimentReport {
        kind,
        rows,
        verdicts: Verdicts {
            pointwise_ok: true,
            uniform_ok: None,
            liminf_ok: true,
        },
        tol,
        runtime: Duration::ZERO,
    };
    report.verdicts = report.recompute_verdicts();
    report.runtime = start.elapsed();
    report
}

/// `η_n(p)` along the schedule against `η_W(p)` for every sample point.
/// Points of `S` (when `F` is given) and of `E` are reported but do not
/// enter `pointwise_ok`.
pub fn pointwise_convergence_experiment(setup: &ConvergenceSetup) -> Result<ExperimentReport> {
    let start = Instant::now();
    let in_s: Vec<Option<bool>> = setup
        .points
        .par_iter()
        .map(|p| membership(setup, p, on_e(&setup.field, p)))
        .collect::<Result<_>>()?;
    let rows = run_rows(setup, &in_s)?;
    Ok(finish(ExperimentKind::Pointwise, rows, setup.tol, start))
}

/// Decay of `sup_K |η_n − η_W|` on the compact sample `K = setup.points`,
/// which must avoid `S` and, unless `allow_e`, `E`.
pub fn uniform_convergence_experiment(setup: &ConvergenceSetup) -> Result<ExperimentReport> {
    let start = Instant::now();
    let in_s: Vec<Option<bool>> = setup
        .points
        .par_iter()
        .map(|p| membership(setup, p, on_e(&setup.field, p)))
        .collect::<Result<_>>()?;
    let bad: Vec<&Point> = setup
        .points
        .iter()
        .zip(&in_s)
        .filter(|(p, s)| **s == Some(true) || (!setup.allow_e && on_e(&setup.field, p)))
        .map(|(p, _)| p)
        .collect();
    if let Some(first) = bad.first() {
        return Err(Error::CompactMeetsExcluded {
            count: bad.len(),
            first: format!("{first}"),
        });
    }
    let rows = run_rows(setup, &in_s)?;
    Ok(finish(ExperimentKind::Uniform, rows, setup.tol, start))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HausdorffStage {
    /// `ρ(W_n, W) → 0`.
    Rho,
    /// `ker(W_n) = W`.
    Kernel,
    /// `F = ∅`.
    EmptyF,
}

impl HausdorffStage {
    pub fn as_str(&self) -> &'static str {
        match self {
            HausdorffStage::Rho => "rho",
            HausdorffStage::Kernel => "kernel",
            HausdorffStage::EmptyF => "empty_f",
        }
    }
}

#[derive(Debug, Clone)]
pub struct HausdorffKernelReport {
    /// `(n, ρ(W_n, W))` along the schedule.
    pub rho: Vec<(usize, f64)>,
    /// `ρ(ker, W)`; `None` if the kernel was not reached or degenerate.
    pub kernel_rho: Option<f64>,
    pub f_samples: Option<usize>,
    pub failed: Option<HausdorffStage>,
    pub message: String,
}

impl HausdorffKernelReport {
    pub fn pass(&self) -> bool {
        self.failed.is_none()
    }
}

/// Checks `ρ(W_n, W) → 0`, then `ker(W_n) ≈ W` within `2h`, then `F = ∅`,
/// stopping at the first stage that fails.
pub fn hausdorff_to_kernel_check(
    seq: &DomainSequence,
    w: &DomainExpr,
    bbox: &BoundingBox,
    h: f64,
    schedule: &[usize],
) -> Result<HausdorffKernelReport> {
    let n_max = *schedule
        .iter()
        .max()
        .ok_or_else(|| Error::InvalidInput("empty schedule".into()))?;
    let rho: Vec<(usize, f64)> = schedule
        .par_iter()
        .map(|&n| Ok((n, rho_distance(&seq.term(n)?, w, bbox, h)?)))
        .collect::<Result<_>>()?;
    let mut report = HausdorffKernelReport {
        rho,
        kernel_rho: None,
        f_samples: None,
        failed: None,
        message: String::new(),
    };
    let first = report.rho[0].1;
    let last = report.rho[report.rho.len() - 1].1;
    let monotone = report.rho.windows(2).all(|p| p[1].1 <= p[0].1 + 2.0 * h);
    if !(last <= 5.0 * h || (monotone && last <= first / 4.0)) {
        report.failed = Some(HausdorffStage::Rho);
        report.message = format!("not Hausdorff-convergent: rho(W_{n_max}, W) = {last:.4}");
        return Ok(report);
    }
    let kernel = kernel_of_sequence(seq, n_max, bbox, h)?;
    let kr = match &kernel {
        Kernel::Region(_) => kernel.rho_to(w)?,
        Kernel::Degenerate { .. } => f64::INFINITY,
    };
    report.kernel_rho = Some(kr);
    if kr > 2.0 * h {
        report.failed = Some(HausdorffStage::Kernel);
        report.message = format!("kernel differs from W: rho = {kr:.4}");
        return Ok(report);
    }
    let f = detect_f(seq, w, bbox, h, n_max)?;
    report.f_samples = Some(f.len());
    if !f.is_empty() {
        report.failed = Some(HausdorffStage::EmptyF);
        report.message = format!("{} escape-limit samples", f.len());
        return Ok(report);
    }
    report.message = format!("rho {first:.4} -> {last:.4}, kernel rho {kr:.4}, F empty");
    Ok(report)
}
