//! CSV and SVG output, and dispatch of experiment configs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;

use crate::config::{self, ExperimentConfig, ExperimentType, Item, PointsSpec, Section, SequenceSpec, Value};
use crate::eta::{eta_estimate, EtaEstimate, EtaOptions};
use crate::foliation::PolyVectorField;
use crate::geometry::{check_kernel_convergence, BoundingBox, DomainExpr, DomainSequence, KernelVerdictKind, Point, SampleCloud};
use crate::lab::families::{family_by_name, Family};
use crate::lab::{
    covering_radius, defective_membership, dense_defective_construction, detect_f, hausdorff_to_kernel_check,
    pointwise_convergence_experiment, radial_leaf_samples, removability_check, slice_test_grid,
    uniform_convergence_experiment, ConvergenceSetup, ExperimentReport,
};
use crate::rng::SeedStream;
use crate::{Error, Result};

/// Process exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERDICT: i32 = 2;

fn coord_header(dim: usize) -> String {
    (1..=dim).map(|i| format!("re_{i},im_{i}")).collect::<Vec<_>>().join(",")
}

fn coords(p: &Point) -> String {
    p.to_re_im().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Report rows: coordinates, `n`, `η_n`, `η_W`, gap, `S` and `E`
/// membership, flags. An empty report gives the header alone.
pub fn report_csv(report: &ExperimentReport, dim: usize) -> String {
    let mut out = format!("{},n,eta_n,eta_W,gap,in_S,in_E,flags\n", coord_header(dim));
    for r in &report.rows {
        let in_s = r.in_s.map_or(String::new(), |b| b.to_string());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            coords(&r.point),
            r.n,
            r.eta_n.value(),
            r.eta_w.value(),
            r.gap,
            in_s,
            r.in_e,
            r.flags.join("|")
        );
    }
    out
}

/// One row per estimate: coordinates, lower, upper, exact, method, seed,
/// budget.
pub fn eta_csv(rows: &[(Point, EtaEstimate)], dim: usize) -> String {
    let mut out = format!("{},lower,upper,exact,method,seed,budget\n", coord_header(dim));
    for (p, e) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            coords(p),
            e.lower,
            e.upper,
            e.exact.map_or(String::new(), |v| v.to_string()),
            e.method.as_str(),
            e.seed,
            e.budget
        );
    }
    out
}

/// One row per sample: coordinates and tag.
pub fn cloud_csv(cloud: &SampleCloud, dim: usize) -> String {
    let mut out = format!("{},tag\n", coord_header(dim));
    for p in &cloud.points {
        let _ = writeln!(out, "{},{}", coords(p), cloud.tag.as_str());
    }
    out
}

// ---------------------------------------------------------------- svg

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// `η_n` against `n` per point, with `η_W` dashed.
    EtaVsN,
    /// `max |η_n − η_W|` against `n`.
    GapVsN,
    /// Samples projected to the plane of coordinate `k` (1-based); `None`
    /// picks the coordinate with the widest spread.
    Scatter(Option<usize>),
}

impl PlotKind {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "eta_vs_n" => PlotKind::EtaVsN,
            "gap_vs_n" => PlotKind::GapVsN,
            "scatter" => PlotKind::Scatter(None),
            _ => match s.strip_prefix("scatter").and_then(|k| k.parse::<usize>().ok()) {
                Some(k) if k >= 1 => PlotKind::Scatter(Some(k)),
                _ => {
                    return Err(Error::Config(format!(
                        "unknown plot `{s}`; expected eta_vs_n, gap_vs_n, scatter or scatterK"
                    )))
                }
            },
        })
    }

    pub fn name(&self) -> String {
        match self {
            PlotKind::EtaVsN => "eta_vs_n".into(),
            PlotKind::GapVsN => "gap_vs_n".into(),
            PlotKind::Scatter(None) => "scatter".into(),
            PlotKind::Scatter(Some(k)) => format!("scatter{k}"),
        }
    }
}

/// A parsed CSV table.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty csv".into()))?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(|s| s.trim().to_string()).collect()).collect();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != header.len() {
                return Err(Error::Parse {
                    line: i + 2,
                    column: 1,
                    message: format!("expected {} fields, found {}", header.len(), r.len()),
                });
            }
        }
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    fn num(&self, row: usize, col: usize) -> Result<f64> {
        self.rows[row][col].parse().map_err(|_| Error::Parse {
            line: row + 2,
            column: col + 1,
            message: format!("`{}` is not a number", self.rows[row][col]),
        })
    }

    fn dim(&self) -> usize {
        (1..).take_while(|i| self.column(&format!("re_{i}")).is_some()).count()
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const M: f64 = 56.0;
/// Larger clouds are thinned by a fixed stride.
const SCATTER_CAP: usize = 20_000;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let lim = |it: &mut dyn Iterator<Item = f64>| {
            it.filter(|v| v.is_finite())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
        };
        let (mut x0, mut x1) = lim(&mut xs.clone());
        let (mut y0, mut y1) = lim(&mut ys.clone());
        for (a, b) in [(&mut x0, &mut x1), (&mut y0, &mut y1)] {
            if !a.is_finite() {
                (*a, *b) = (0.0, 1.0);
            }
            if *b - *a < 1e-12 {
                *a -= 0.5 * a.abs().max(1.0) * 0.1;
                *b += 0.5 * b.abs().max(1.0) * 0.1;
            }
            let pad = 0.05 * (*b - *a);
            *a -= pad;
            *b += pad;
        }
        Self { x0, x1, y0, y1 }
    }

    fn sx(&self, x: f64) -> f64 {
        M + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * M)
    }

    fn sy(&self, y: f64) -> f64 {
        H - M - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * M)
    }

    fn axes(&self, out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let _ = writeln!(
            out,
            r##"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"##
        );
        let _ = writeln!(out, r##"<rect width="{W}" height="{H}" fill="white"/>"##);
        let _ = writeln!(
            out,
            r##"<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="black"/>"##,
            W - 2.0 * M,
            H - 2.0 * M
        );
        for k in 0..=4 {
            let t = k as f64 / 4.0;
            let xv = self.x0 + t * (self.x1 - self.x0);
            let yv = self.y0 + t * (self.y1 - self.y0);
            let (px, py) = (self.sx(xv), self.sy(yv));
            let _ = writeln!(
                out,
                r##"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"##,
                H - M + 16.0,
                tick(xv)
            );
            let _ = writeln!(
                out,
                r##"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
                M - 6.0,
                py + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(out, r##"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"##, W / 2.0, esc(title));
        let _ = writeln!(out, r##"<text x="{}" y="{}" text-anchor="middle">{}</text>"##, W / 2.0, H - 12.0, esc(xlabel));
        let _ = writeln!(
            out,
            r##"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"##,
            H / 2.0,
            H / 2.0,
            esc(ylabel)
        );
    }
}

fn tick(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 1e-3 && v.abs() < 1e4) {
        format!("{v:.4}").trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polyline(out: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str, dashed: bool) {
    let path: Vec<String> = pts
        .iter()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(x, y)| format!("{:.2},{:.2}", f.sx(*x), f.sy(*y)))
        .collect();
    let dash = if dashed { r##" stroke-dasharray="6 4""## } else { "" };
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"##,
        path.join(" ")
    );
    for (x, y) in pts.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
        let _ = writeln!(out, r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"##, f.sx(*x), f.sy(*y));
    }
}

/// Renders a static SVG from a report or cloud table. Empty tables are
/// refused.
pub fn svg_from_table(t: &Table, kind: PlotKind) -> Result<String> {
    if t.rows.is_empty() {
        return Err(Error::InvalidInput("cannot plot an empty report".into()));
    }
    let dim = t.dim();
    let mut out = String::new();
    match kind {
        PlotKind::EtaVsN | PlotKind::GapVsN => {
            let need = |c: &str| t.column(c).ok_or_else(|| Error::InvalidInput(format!("csv has no `{c}` column")));
            let (cn, ce, cw, cg) = (need("n")?, need("eta_n")?, need("eta_W")?, need("gap")?);
            // Group rows by point, keeping first-seen order.
            let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
            for (i, r) in t.rows.iter().enumerate() {
                let key = r[..2 * dim].join(",");
                match groups.iter_mut().find(|g| g.0 == key) {
                    Some(g) => g.1.push(i),
                    None => groups.push((key, vec![i])),
                }
            }
            let ns: Vec<f64> = (0..t.rows.len()).map(|i| t.num(i, cn)).collect::<Result<_>>()?;
            if kind == PlotKind::EtaVsN {
                let es: Vec<f64> = (0..t.rows.len()).map(|i| t.num(i, ce)).collect::<Result<_>>()?;
                let ws: Vec<f64> = (0..t.rows.len()).map(|i| t.num(i, cw)).collect::<Result<_>>()?;
                let f = Frame::new(ns.iter().copied(), es.iter().chain(&ws).copied());
                f.axes(&mut out, "eta_n against n (eta_W dashed)", "n", "eta");
                for (k, (_, idx)) in groups.iter().enumerate() {
                    let c = PALETTE[k % PALETTE.len()];
                    let curve: Vec<(f64, f64)> = idx.iter().map(|&i| (ns[i], es[i])).collect();
                    polyline(&mut out, &f, &curve, c, false);
                    let limit: Vec<(f64, f64)> = vec![(f.x0, ws[idx[0]]), (f.x1, ws[idx[0]])];
                    let path = format!(
                        "{:.2},{:.2} {:.2},{:.2}",
                        f.sx(limit[0].0),
                        f.sy(limit[0].1),
                        f.sx(limit[1].0),
                        f.sy(limit[1].1)
                    );
                    let _ = writeln!(
                        out,
                        r##"<polyline points="{path}" fill="none" stroke="{c}" stroke-width="1" stroke-dasharray="6 4"/>"##
                    );
                }
            } else {
                let mut ordered: Vec<f64> = ns.clone();
                ordered.sort_by(f64::total_cmp);
                ordered.dedup();
                let sup: Vec<(f64, f64)> = ordered
                    .iter()
                    .map(|&n| {
                        let g = (0..t.rows.len())
                            .filter(|&i| ns[i] == n)
                            .map(|i| t.num(i, cg))
                            .collect::<Result<Vec<f64>>>()?;
                        Ok((n, g.into_iter().fold(0.0, f64::max)))
                    })
                    .collect::<Result<_>>()?;
                let f = Frame::new(sup.iter().map(|p| p.0), sup.iter().map(|p| p.1).chain([0.0]));
                f.axes(&mut out, "sup gap against n", "n", "max |eta_n - eta_W|");
                polyline(&mut out, &f, &sup, PALETTE[0], false);
            }
        }
        PlotKind::Scatter(axis) => {
            if dim == 0 {
                return Err(Error::InvalidInput("csv has no coordinate columns".into()));
            }
            let pts: Vec<Vec<f64>> = (0..t.rows.len())
                .map(|i| (0..2 * dim).map(|c| t.num(i, c)).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?;
            let k = match axis {
                Some(k) if k <= dim => k - 1,
                Some(k) => return Err(Error::InvalidInput(format!("coordinate {k} exceeds dimension {dim}"))),
                None => (0..dim)
                    .max_by(|&a, &b| spread(&pts, a).total_cmp(&spread(&pts, b)))
                    .expect("dim ≥ 1"),
            };
            let f = Frame::new(pts.iter().map(|p| p[2 * k]), pts.iter().map(|p| p[2 * k + 1]));
            f.axes(&mut out, &format!("samples in the z_{} plane", k + 1), &format!("re z_{}", k + 1), &format!("im z_{}", k + 1));
            let stride = pts.len().div_ceil(SCATTER_CAP);
            for p in pts.iter().step_by(stride) {
                let _ = writeln!(
                    out,
                    r##"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="{}" fill-opacity="0.6"/>"##,
                    f.sx(p[2 * k]),
                    f.sy(p[2 * k + 1]),
                    PALETTE[0]
                );
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn spread(pts: &[Vec<f64>], k: usize) -> f64 {
    let m: Vec<f64> = pts.iter().map(|p| p[2 * k].hypot(p[2 * k + 1])).collect();
    let lo = m.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

// ---------------------------------------------------------------- dispatch

/// The objects an experiment config refers to.
pub struct Resolved {
    pub field: Option<PolyVectorField>,
    pub sequence: DomainSequence,
    pub w: DomainExpr,
    pub ambient: DomainExpr,
    pub bbox: BoundingBox,
    pub family: Option<Family>,
}

pub fn resolve(cfg: &ExperimentConfig) -> Result<Resolved> {
    let spec = cfg
        .sequence
        .as_ref()
        .ok_or_else(|| Error::Config("missing section `sequence`".into()))?;
    let (family, sequence, w, ambient) = match spec {
        SequenceSpec::Family { name, j_max, .. } => {
            let fam = family_by_name(name, None, *j_max)?;
            (Some(fam.clone()), fam.sequence, fam.w, fam.ambient)
        }
        SequenceSpec::Terms { terms, limit, base } => {
            let list = terms.clone();
            let seq = DomainSequence::new("terms", base.clone(), move |n| Ok(list[n.min(list.len()) - 1].clone()))
                .with_kernel(limit.clone());
            let mut all = terms.clone();
            all.push(limit.clone());
            (None, seq, limit.clone(), DomainExpr::union(all)?)
        }
    };
    let w = cfg.w.clone().unwrap_or(w);
    let ambient = cfg.ambient.clone().unwrap_or(ambient);
    if let Some(x) = &cfg.field {
        if x.dim() != w.dim() {
            return Err(Error::Config(format!(
                "field acts on C^{} but the domains live in C^{}",
                x.dim(),
                w.dim()
            )));
        }
    }
    let bbox = cfg.bbox.clone().unwrap_or_else(|| ambient.bounding_box());
    Ok(Resolved {
        field: cfg.field.clone(),
        sequence,
        w,
        ambient,
        bbox,
        family,
    })
}

/// Sample points of a config; polydisc specs draw seeded uniform points.
pub fn sample_points(cfg: &ExperimentConfig) -> Result<Vec<Point>> {
    match &cfg.points {
        None => Ok(vec![]),
        Some(PointsSpec::List(p)) => Ok(p.clone()),
        Some(PointsSpec::Polydisc { radii, count }) => {
            let mut rng = SeedStream::new(cfg.seed).child("points").rng();
            (0..*count)
                .map(|_| {
                    Point::new(
                        radii
                            .iter()
                            .map(|r| {
                                let m = r * rng.gen::<f64>().sqrt();
                                crate::Complex64::from_polar(m, std::f64::consts::TAU * rng.gen::<f64>())
                            })
                            .collect(),
                    )
                })
                .collect()
        }
    }
}

fn eta_options(cfg: &ExperimentConfig) -> EtaOptions {
    EtaOptions {
        budget: cfg.budget,
        seed: SeedStream::new(cfg.seed).child("eta").seed(),
        ..EtaOptions::default()
    }
}

/// Artifacts and verdict of one run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub csv: String,
    pub summary: String,
    pub svg: Option<String>,
    pub written: Vec<PathBuf>,
}

fn summary_text(cfg: &ExperimentConfig, mut fields: Vec<Item>, pass: bool) -> String {
    fields.insert(0, Item::new("pass", Value::Bool(pass)));
    let items = vec![
        Item::new(
            "summary",
            Value::Section(Section {
                tag: None,
                items: fields,
                pos: Default::default(),
            }),
        ),
        Item::new(
            "config",
            Value::Section(Section {
                tag: None,
                items: cfg.to_items(),
                pos: Default::default(),
            }),
        ),
    ];
    config::to_string(&items)
}

fn num(x: f64) -> Value {
    Value::Num(x)
}

fn need_field(r: &Resolved) -> Result<&PolyVectorField> {
    r.field.as_ref().ok_or_else(|| Error::Config("missing section `field`".into()))
}

fn convergence(cfg: &ExperimentConfig, r: &Resolved) -> Result<(ExperimentReport, Vec<Item>)> {
    let x = need_field(r)?;
    let mut setup = ConvergenceSetup::new(x.clone(), r.sequence.clone(), r.w.clone(), r.ambient.clone());
    setup.points = sample_points(cfg)?;
    setup.schedule = cfg.schedule.clone();
    setup.h = cfg.h;
    setup.tol = cfg.tol;
    setup.eta = eta_options(cfg);
    setup.allow_e = cfg.allow_e;
    if cfg.detect_f {
        setup.f = Some(detect_f(&r.sequence, &r.w, &r.bbox, cfg.h, cfg.n_max)?);
    }
    let report = if cfg.experiment == ExperimentType::Uniform {
        uniform_convergence_experiment(&setup)?
    } else {
        pointwise_convergence_experiment(&setup)?
    };
    let v = report.verdicts;
    let mut items = vec![
        Item::new("pointwise_ok", Value::Bool(v.pointwise_ok)),
        Item::new("liminf_ok", Value::Bool(v.liminf_ok)),
    ];
    if let Some(u) = v.uniform_ok {
        items.push(Item::new("uniform_ok", Value::Bool(u)));
        if let Some((_, s)) = report.sup_gaps().last() {
            items.push(Item::new("sup_gap", num(*s)));
        }
    }
    items.push(Item::new("tol", num(report.tol)));
    items.push(Item::new("rows", Value::Int(report.rows.len() as i64)));
    if let Some(f) = &setup.f {
        items.push(Item::new("f_samples", Value::Int(f.len() as i64)));
    }
    items.push(Item::new(
        "excluded_points",
        Value::Int(report.final_rows().filter(|row| row.excluded()).count() as i64),
    ));
    Ok((report, items))
}

/// Runs a parsed config. Input errors surface as `Err`; the exit code
/// separates passing verdicts (0) from failing ones (2).
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let start = std::time::Instant::now();
    let (csv, mut items, pass, default_plot) = match cfg.experiment {
        ExperimentType::Pointwise | ExperimentType::Uniform => {
            let r = resolve(cfg)?;
            let (report, items) = convergence(cfg, &r)?;
            let pass = report.verdicts.all_pass();
            (report_csv(&report, r.w.dim()), items, pass, Some(PlotKind::EtaVsN))
        }
        ExperimentType::Hausdorff => {
            let r = resolve(cfg)?;
            let rep = hausdorff_to_kernel_check(&r.sequence, &r.w, &r.bbox, cfg.h, &cfg.schedule)?;
            let mut csv = String::from("n,rho\n");
            for (n, rho) in &rep.rho {
                let _ = writeln!(csv, "{n},{rho}");
            }
            let mut items = vec![Item::new("message", Value::Str(rep.message.clone()))];
            if let Some(s) = rep.failed {
                items.push(Item::new("failed_stage", Value::Str(s.as_str().into())));
            }
            if let Some(k) = rep.kernel_rho {
                items.push(Item::new("kernel_rho", num(k)));
            }
            (csv, items, rep.pass(), None)
        }
        ExperimentType::Kernel => {
            let r = resolve(cfg)?;
            let v = check_kernel_convergence(&r.sequence, cfg.subsequences, cfg.n_max, &r.bbox, cfg.h, cfg.seed)?;
            let mut csv = String::from("subsequence,rho\n");
            for (name, d) in &v.distances {
                let _ = writeln!(csv, "{name},{d}");
            }
            let verdict = match v.kind {
                KernelVerdictKind::Converges => "converges",
                KernelVerdictKind::Fails => "fails",
                KernelVerdictKind::Inconclusive => "inconclusive",
            };
            let mut items = vec![
                Item::new("verdict", Value::Str(verdict.into())),
                Item::new("witness", Value::Str(v.witness.clone())),
            ];
            if let Ok(rho) = v.kernel.rho_to(&r.w) {
                items.push(Item::new("kernel_rho", num(rho)));
            }
            (csv, items, v.kind == KernelVerdictKind::Converges, None)
        }
        ExperimentType::Eta => {
            let x = cfg.field.as_ref().ok_or_else(|| Error::Config("missing section `field`".into()))?;
            let d = match (&cfg.domain, &cfg.sequence) {
                (Some(d), _) => d.clone(),
                (None, Some(_)) => resolve(cfg)?.w,
                (None, None) => return Err(Error::Config("eta needs `domain` or `sequence`".into())),
            };
            let opts = eta_options(cfg);
            let pts = sample_points(cfg)?;
            let rows = pts
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let mut o = opts.clone();
                    o.seed = SeedStream::new(opts.seed).indexed(i as u64).seed();
                    Ok((p.clone(), eta_estimate(x, p, &d, &o)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let items = vec![Item::new("rows", Value::Int(rows.len() as i64))];
            (eta_csv(&rows, d.dim()), items, true, None)
        }
        ExperimentType::Defect => {
            let r = resolve(cfg)?;
            let x = need_field(&r)?;
            let f = detect_f(&r.sequence, &r.w, &r.bbox, cfg.h, cfg.n_max)?;
            let mut items = vec![Item::new("f_samples", Value::Int(f.len() as i64))];
            let mut pass = true;
            if let Some(decl) = r.sequence.declared_f() {
                let worst = f.points.iter().map(|p| decl.distance(p)).fold(0.0, f64::max);
                items.push(Item::new("max_distance_to_declared_f", num(worst)));
                pass = worst <= 2.0 * cfg.h;
            }
            for p in sample_points(cfg)? {
                let m = defective_membership(x, &f, &p, &r.ambient, cfg.h)?;
                let rem = removability_check(x, &f, &p, &r.ambient, cfg.h)?;
                items.push(Item::new(
                    "point",
                    Value::Section(Section {
                        tag: None,
                        items: vec![
                            Item::new("at", Value::List(p.to_re_im().into_iter().map(num).collect())),
                            Item::new("defective", Value::Bool(m.defective)),
                            Item::new("removability", Value::Str(rem.kind.as_str().into())),
                        ],
                        pos: Default::default(),
                    }),
                ));
            }
            (cloud_csv(&f, r.w.dim()), items, pass, Some(PlotKind::Scatter(None)))
        }
        ExperimentType::Dense => {
            let (j_max, m_max) = match &cfg.sequence {
                Some(SequenceSpec::Family { name, j_max, m_max }) if name == "dense_lines" => (*j_max, *m_max),
                _ => return Err(Error::Config("dense runs need `sequence { family = dense_lines }`".into())),
            };
            let c = dense_defective_construction(j_max, m_max)?;
            let bbox = cfg
                .bbox
                .clone()
                .unwrap_or(BoundingBox::new(vec![-2.0; 4], vec![2.0; 4])?);
            let f = detect_f(&c.family.sequence, &c.family.w, &bbox, cfg.h, c.n_max)?;
            let tests = slice_test_grid();
            let s = radial_leaf_samples(&f, &c.family.w, &tests);
            let cover = if s.is_empty() { f64::INFINITY } else { covering_radius(&tests, &s) };
            let off = f.points.iter().map(|p| c.line_distance(p)).fold(0.0, f64::max);
            let items = vec![
                Item::new("n_max", Value::Int(c.n_max as i64)),
                Item::new("f_samples", Value::Int(f.len() as i64)),
                Item::new("max_f_distance_to_lines", num(off)),
                Item::new("slice_covering_radius", num(cover)),
            ];
            let pass = cover < 0.25 && off <= c.tail_width() + cfg.h * 2f64.sqrt();
            (cloud_csv(&f, 2), items, pass, Some(PlotKind::Scatter(None)))
        }
    };
    items.push(Item::new("runtime_s", num(start.elapsed().as_secs_f64())));
    let summary = summary_text(cfg, items, pass);
    let svg = match (&cfg.output.svg, &cfg.output.plot) {
        (None, None) => None,
        (_, plot) => {
            let kind = match plot {
                Some(p) => PlotKind::parse(p)?,
                None => default_plot.unwrap_or(PlotKind::Scatter(None)),
            };
            let t = Table::parse(&csv)?;
            if t.rows.is_empty() {
                None
            } else {
                Some(svg_from_table(&t, kind)?)
            }
        }
    };
    Ok(RunOutcome {
        exit_code: if pass { EXIT_PASS } else { EXIT_VERDICT },
        csv,
        summary,
        svg,
        written: vec![],
    })
}

fn write(path: &Path, text: &str) -> Result<PathBuf> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(path.to_path_buf())
}

/// Reads, runs and writes a config; output paths are relative to the
/// config's directory and default to `<stem>.csv`, `<stem>.summary`
/// and `<stem>.svg`.
pub fn run_config(path: &Path) -> Result<RunOutcome> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let cfg = ExperimentConfig::parse(&text)?;
    run_at(&cfg, path)
}

/// As [`run_config`] for an already parsed config located at `path`.
pub fn run_at(cfg: &ExperimentConfig, path: &Path) -> Result<RunOutcome> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    let mut out = run(cfg)?;
    let o = &cfg.output;
    let target = |given: &Option<String>, ext: &str| dir.join(given.clone().unwrap_or(format!("{stem}.{ext}")));
    out.written.push(write(&target(&o.csv, "csv"), &out.csv)?);
    out.written.push(write(&target(&o.summary, "summary"), &out.summary)?);
    if let Some(svg) = &out.svg {
        out.written.push(write(&target(&o.svg, "svg"), svg)?);
    }
    Ok(out)
}

/// Plots an existing CSV to `<csv stem>.<kind>.svg` unless `out` is given.
pub fn plot_csv(csv: &Path, kind: PlotKind, out: Option<&Path>) -> Result<PathBuf> {
    let text = std::fs::read_to_string(csv).map_err(|e| Error::Io(format!("{}: {e}", csv.display())))?;
    let svg = svg_from_table(&Table::parse(&text)?, kind)?;
    let target = match out {
        Some(p) => p.to_path_buf(),
        None => csv.with_extension(format!("{}.svg", kind.name())),
    };
    write(&target, &svg)
}
