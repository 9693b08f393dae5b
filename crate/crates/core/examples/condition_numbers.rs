//! One-norm condition estimates for each multiplier stabilization and for
//! the penalty method.
//!
//! ```text
//! cargo run --release --example condition_numbers
//! ```

use cutdarcy::assembly::{Method, MultiplierStab};
use cutdarcy::harness::{loglog_slope, run_experiment, Example, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let mut variants: Vec<(String, ExperimentConfig)> = Vec::new();
    for stab in [MultiplierStab::Sc, MultiplierStab::ScHat, MultiplierStab::ScTilde] {
        let mut cfg = ExperimentConfig::new(Example::Ex1);
        cfg.stabilization.multiplier_stab = stab;
        variants.push((stab.name().to_string(), cfg));
    }
    let mut cfg = ExperimentConfig::new(Example::Ex1);
    cfg.method = Method::Penalty { lambda: Method::DEFAULT_PENALTY };
    variants.push(("penalty".into(), cfg));

    for (name, cfg) in variants {
        let rows = run_experiment(&cfg)?;
        let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
        let ks: Vec<f64> = rows.iter().map(|r| r.condest.unwrap_or(f64::NAN)).collect();
        let listed: Vec<String> = ks.iter().map(|k| format!("{k:.2e}")).collect();
        println!("{name:>9}: {}  slope {:.2}", listed.join(" "), loglog_slope(&hs, &ks));
    }
    Ok(())
}
