//! Spurious velocities for a zero-velocity flow with a cubic pressure:
//! piecewise linear against piecewise constant multipliers.
//!
//! ```text
//! cargo run --release --example table1_multiplier_degree
//! ```

use cutdarcy::fespace::MultiplierDegree;
use cutdarcy::harness::{run_experiment, Example, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    println!("{:>8} {:>6} {:>5} {:>14} {:>8}", "C", "deg", "nx", "|u_h|", "eoc");
    for c in [1e2, 1e4] {
        for degree in [MultiplierDegree::Linear, MultiplierDegree::Constant] {
            let mut cfg = ExperimentConfig::new(Example::Ex1_2 { c });
            cfg.multiplier_degree = degree;
            cfg.condest = false;
            for row in run_experiment(&cfg)? {
                let eoc = row.eoc.map_or(String::from("-"), |e| format!("{:.3}", e[0]));
                println!("{c:>8.0e} {:>6} {:>5} {:>14.6e} {eoc:>8}", degree.as_int(), row.nx, row.errors.err_u_l2);
            }
        }
    }
    Ok(())
}
