use folmetlab::config::ExperimentConfig;
use folmetlab::report::{run_at, EXIT_PASS};

const CONFIG: &str = "
experiment = pointwise
field { preset = radial2 }
sequence { family = arm_bidisc }
points = [[0.5, 0, 0, 0], [0.3, 0, 0.3, 0]]
schedule = [1, 10, 100]
output { plot = eta_vs_n }
";

fn main() -> folmetlab::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG)?;
    println!("normalised config:\n{}", cfg.to_config_string());
    let dir = std::env::temp_dir().join("folmetlab-run-config");
    std::fs::create_dir_all(&dir).map_err(|e| folmetlab::Error::Io(e.to_string()))?;
    let out = run_at(&cfg, &dir.join("arm.cfg"))?;
    println!("exit code {} ({})", out.exit_code, if out.exit_code == EXIT_PASS { "pass" } else { "verdict failed" });
    for p in &out.written {
        println!("wrote {}", p.display());
    }
    print!("{}", out.csv);
    Ok(())
}
