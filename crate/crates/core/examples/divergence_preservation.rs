//! With a piecewise constant source the discrete divergence matches the
//! source pointwise, independently of the mesh size and of the velocity error.
//!
//! ```text
//! cargo run --release --example divergence_preservation
//! ```

use cutdarcy::harness::{run_experiment, Example, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let mut cfg = ExperimentConfig::new(Example::ConstantDivergence { g0: 2.0 });
    cfg.condest = false;
    println!("{:>5} {:>14} {:>14}", "nx", "|u - u_h|", "max |div - g|");
    for row in run_experiment(&cfg)? {
        println!("{:>5} {:>14.6e} {:>14.3e}", row.nx, row.errors.err_u_l2, row.errors.err_div_max);
    }
    Ok(())
}
