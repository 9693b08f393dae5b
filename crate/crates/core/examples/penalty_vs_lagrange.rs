//! Multiplier and penalty imposition of the flux condition on a rectangle
//! with flux, pressure and unfitted boundary parts.
//!
//! ```text
//! cargo run --release --example penalty_vs_lagrange
//! ```

use cutdarcy::assembly::Method;
use cutdarcy::harness::{run_experiment, Example, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    for method in [Method::Lagrange, Method::Penalty { lambda: Method::DEFAULT_PENALTY }] {
        let mut cfg = ExperimentConfig::new(Example::MixedBc);
        cfg.method = method;
        println!("method {}", method.name());
        println!("{:>5} {:>12} {:>12} {:>12} {:>7} {:>7}", "nx", "err_u", "err_p", "condest", "eoc_u", "eoc_p");
        for r in run_experiment(&cfg)? {
            let eoc = r.eoc.map_or([f64::NAN; 3], |v| v);
            println!(
                "{:>5} {:>12.4e} {:>12.4e} {:>12.4e} {:>7.3} {:>7.3}",
                r.nx,
                r.errors.err_u_l2,
                r.errors.err_p_l2,
                r.condest.unwrap_or(f64::NAN),
                eoc[0],
                eoc[1]
            );
        }
    }
    Ok(())
}
