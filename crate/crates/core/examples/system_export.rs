//! Assembles one level, writes the matrix and right-hand side in
//! MatrixMarket format and checks the round trip.
//!
//! ```text
//! cargo run --release --example system_export -- /tmp/ex1_nx20
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};

use cutdarcy::harness::{solve_level, Example, ExperimentConfig};
use cutdarcy::io::{read_matrix_market, write_matrix_market, write_vector_market};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let stem = std::env::args().nth(1).unwrap_or_else(|| "ex1_nx20".into());
    let mut cfg = ExperimentConfig::new(Example::Ex1);
    cfg.condest = false;
    let run = solve_level(&cfg, 20)?;
    let a = &run.system.matrix;

    let mtx = format!("{stem}.mtx");
    let mut w = BufWriter::new(File::create(&mtx)?);
    write_matrix_market(&mut w, a)?;
    w.flush()?;
    let mut w = BufWriter::new(File::create(format!("{stem}_rhs.mtx"))?);
    write_vector_market(&mut w, &run.system.rhs)?;
    w.flush()?;

    let back = read_matrix_market(BufReader::new(File::open(&mtx)?))?;
    println!("{mtx}: {} x {}, {} entries", a.nrows, a.ncols, a.nnz());
    println!("round trip exact: {}", &back == a);
    println!("symmetric: {}", a.is_symmetric());
    println!("relative residual of the solve: {:.2e}", run.solution.residual);
    Ok(())
}
