//! Clipped areas and boundary lengths of a disk under refinement.
//!
//! ```text
//! cargo run --release --example cut_geometry
//! ```

use std::f64::consts::PI;

use cutdarcy::geometry::{clip_element, LevelSet, Point};
use cutdarcy::mesh::{build_background_mesh, extract_active_mesh, Rect};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = 0.45;
    let disk = LevelSet::circle(Point::new(0.5, 0.5), r);

    // A single element cut by a vertical line.
    let tri = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
    let half = LevelSet::analytic(|x| x.x - 0.5, |_| Point::new(1.0, 0.0));
    let cg = clip_element(0, &tri, &half)?;
    println!("clipped triangle: area {:.6} over {} vertices, segment length {:.6}", cg.area(), cg.polygon.len(), cg.segment_length());

    println!("{:>5} {:>8} {:>14} {:>14}", "nx", "cut", "area error", "length error");
    for nx in [8, 16, 32, 64, 128] {
        let bg = build_background_mesh(nx, nx, Rect::unit())?;
        let mesh = extract_active_mesh(bg, &disk, &[])?;
        let da = (mesh.domain_area() - PI * r * r).abs();
        let dl = (mesh.boundary_length() - 2.0 * PI * r).abs();
        println!("{nx:>5} {:>8} {da:>14.3e} {dl:>14.3e}", mesh.n_cut());
    }
    Ok(())
}
