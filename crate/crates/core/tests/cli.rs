use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use folmetlab::report::Table;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn folmetlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_folmetlab"))
        .args(args)
        .env("FOLMETLAB_THREADS", "1")
        .output()
        .expect("spawn folmetlab")
}

fn staged(dir: &Path, name: &str) -> PathBuf {
    let to = dir.join(name);
    std::fs::copy(configs().join(name), &to).unwrap();
    to
}

#[test]
fn pointwise_config_passes_and_reports_the_limit_eta() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = staged(dir.path(), "arm_bidisc_pointwise.cfg");
    let out = folmetlab(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("arm_bidisc_pointwise.csv")).unwrap();
    let t = Table::parse(&csv).unwrap();
    let (eta_n, eta_w) = (t.column("eta_n").unwrap(), t.column("eta_W").unwrap());
    let n = t.column("n").unwrap();
    let num = |r: &Vec<String>, c: usize| r[c].parse::<f64>().unwrap();
    assert!((num(&t.rows[0], eta_w) - 4f64.ln() / 4.0).abs() < 1e-6);
    let last = t.rows.iter().find(|r| num(r, 0) == 0.5 && num(r, n) == 200.0).unwrap();
    assert!((num(last, eta_n) - 2f64.ln()).abs() < 1e-6);
    assert!(dir.path().join("arm_bidisc_pointwise.svg").exists());
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(summary.contains("pass = true"), "{summary}");
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let cfg = staged(d.path(), "weighted_eta.cfg");
        let out = folmetlab(&["run", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("weighted_eta.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn kernel_subcommand_checks_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = staged(dir.path(), "arm_bidisc_kernel.cfg");
    let out = folmetlab(&["kernel", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_section_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = staged(dir.path(), "missing_field.cfg");
    let out = folmetlab(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("field"));
}

#[test]
fn malformed_config_names_the_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "experiment = pointwise\nh = [0.1,\n").unwrap();
    let out = folmetlab(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error:"), "{err}");
    assert!(err.contains(':'), "{err}");
}

#[test]
fn missing_file_is_an_input_error() {
    let out = folmetlab(&["run", "/nonexistent/nowhere.cfg"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verdict_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("one_line.cfg");
    let text = std::fs::read_to_string(configs().join("dense_lines.cfg"))
        .unwrap()
        .replace("j_max = 8", "j_max = 1");
    std::fs::write(&cfg, text).unwrap();
    let out = folmetlab(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("pass = false"));
}

#[test]
fn report_plots_an_existing_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    std::fs::write(
        &csv,
        "re_1,im_1,re_2,im_2,n,eta_n,eta_W,gap,in_S,in_E,flags\n\
         0.5,0,0,0,1,0.6931,0.3466,0.3466,1,0,\n\
         0.5,0,0,0,10,0.6931,0.3466,0.3466,1,0,\n\
         0.5,0,0,0,100,0.6931,0.3466,0.3466,1,0,\n",
    )
    .unwrap();
    let svg = dir.path().join("rows.svg");
    let out = folmetlab(&["report", csv.to_str().unwrap(), "--plot", "eta_vs_n", "--out", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let bad = folmetlab(&["report", csv.to_str().unwrap(), "--plot", "histogram"]);
    assert_eq!(bad.status.code(), Some(1));
}
