//! Macroelement partitions for several thresholds, and the effect of
//! restricting the ghost penalties to faces inside macroelements.
//!
//! ```text
//! cargo run --release --example macroelements
//! ```

use cutdarcy::assembly::FaceSelection;
use cutdarcy::harness::{run_experiment, Example, ExperimentConfig};
use cutdarcy::macroelement::build_macro_partition;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let mesh = Example::Ex1.build_mesh(40)?;
    let faces = mesh.stabilization_faces().len();
    println!("{} active elements, {} cut, {} stabilization faces", mesh.n_elements(), mesh.n_cut(), faces);
    println!("{:>6} {:>7} {:>7} {:>9} {:>12}", "delta", "small", "macros", "max dist", "macro faces");
    for delta in [0.05, 0.1, 0.3, 0.5, 0.9] {
        let part = build_macro_partition(&mesh, delta)?;
        let small = part.assignment.len() - part.roots.len();
        let grouped = part.roots.iter().filter(|&&r| part.members(r).len() > 1).count();
        let far = part.distance.iter().max().copied().unwrap_or(0);
        println!("{delta:>6} {small:>7} {grouped:>7} {far:>9} {:>12}", part.macro_faces.len());
    }

    println!();
    for faces in [FaceSelection::AllSigma, FaceSelection::MacroOnly] {
        let mut cfg = ExperimentConfig::new(Example::Ex1);
        cfg.stabilization.faces = faces;
        for row in run_experiment(&cfg)? {
            println!(
                "{faces:?} nx={:<3} err_u {:.3e} err_p {:.3e} condest {:.3e}",
                row.nx,
                row.errors.err_u_l2,
                row.errors.err_p_l2,
                row.condest.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
