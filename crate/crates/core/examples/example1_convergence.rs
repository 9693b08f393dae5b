//! Convergence study on the disk with the trigonometric solution.
//!
//! ```text
//! cargo run --release --example example1_convergence
//! ```

use cutdarcy::harness::{run_experiment, write_csv, Example, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let cfg = ExperimentConfig::new(Example::Ex1);
    let rows = run_experiment(&cfg)?;
    write_csv(std::io::stdout().lock(), &cfg, &rows)?;
    Ok(())
}
