//! Drive the harness from an inline TOML configuration.

use equicont::harness::{run, ExperimentConfig};

const CONFIG: &str = r#"
[problem]
kind = "harmonic"
target = "circle"
family = "channel_torus"
eps = 0.2

[grid]
n = 16

[run]
mode = "verify"
samples = 5
"#;

fn main() -> equicont::Result<()> {
    let config = ExperimentConfig::from_toml(CONFIG)?;
    let report = run(&config, None)?;
    for c in &report.checks {
        println!("{:<28} {:.2e} <= {:.0e} {}", c.name, c.value, c.threshold, c.passed);
    }
    println!("passed {}", report.passed);
    Ok(())
}
