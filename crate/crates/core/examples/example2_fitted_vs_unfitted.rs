//! The rectangle problem on a mesh whose top row is cut by the boundary,
//! next to the same problem on a fitted mesh.
//!
//! ```text
//! cargo run --release --example example2_fitted_vs_unfitted
//! ```

use cutdarcy::harness::{run_experiment, Example, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    for example in [Example::Ex2Unfitted, Example::Ex2Fitted] {
        let mut cfg = ExperimentConfig::new(example);
        cfg.condest = false;
        println!("example {}", example.label());
        println!("{:>5} {:>12} {:>12} {:>12} {:>7} {:>7} {:>7}", "nx", "err_u", "err_p", "err_div", "eoc_u", "eoc_p", "eoc_div");
        for r in run_experiment(&cfg)? {
            let e = r.errors;
            let eoc = r.eoc.map_or([f64::NAN; 3], |v| v);
            println!(
                "{:>5} {:>12.4e} {:>12.4e} {:>12.4e} {:>7.3} {:>7.3} {:>7.3}",
                r.nx, e.err_u_l2, e.err_p_l2, e.err_div_l2, eoc[0], eoc[1], eoc[2]
            );
        }
    }
    Ok(())
}
