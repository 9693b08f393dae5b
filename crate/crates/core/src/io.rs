//! Plain-text dumps: active mesh, macroelement partition and MatrixMarket.

use std::io::{self, BufRead, Write};

use crate::geometry::Location;
use crate::linalg::{SparseMatrix, Triplets};
use crate::macroelement::MacroPartition;
use crate::mesh::ActiveMesh;

fn location_name(l: Location) -> &'static str {
    match l {
        Location::Inside => "inside",
        Location::Cut => "cut",
        Location::Outside => "outside",
    }
}

/// Vertices, triangles with their classification, and the boundary pieces.
///
/// ```text
/// vertices <n>
/// <x> <y>
/// triangles <m>
/// <v0> <v1> <v2> <inside|cut|outside>
/// segments <k>
/// <triangle> <x0> <y0> <x1> <y1> <nx> <ny> <volume fraction>
/// ```
pub fn write_mesh<W: Write>(mut out: W, mesh: &ActiveMesh) -> io::Result<()> {
    let bg = &mesh.background;
    writeln!(out, "vertices {}", bg.vertices.len())?;
    for v in &bg.vertices {
        writeln!(out, "{:.17e} {:.17e}", v.x, v.y)?;
    }
    writeln!(out, "triangles {}", bg.triangles.len())?;
    for (t, tri) in bg.triangles.iter().enumerate() {
        writeln!(out, "{} {} {} {}", tri[0], tri[1], tri[2], location_name(mesh.classification[t]))?;
    }
    let segments: Vec<_> = mesh.cuts.iter().filter_map(|c| c.boundary_segment.map(|s| (c, s))).collect();
    writeln!(out, "segments {}", segments.len())?;
    for (c, [a, b]) in segments {
        writeln!(
            out,
            "{} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e}",
            c.element_id, a.x, a.y, b.x, b.y, c.segment_normal.x, c.segment_normal.y, c.volume_fraction
        )?;
    }
    Ok(())
}

/// One row per active element: background id, background id of its root,
/// face distance to the root and volume fraction.
pub fn write_macro_csv<W: Write>(mut out: W, mesh: &ActiveMesh, partition: &MacroPartition) -> io::Result<()> {
    writeln!(out, "element,root,distance,volume_fraction")?;
    for a in 0..mesh.n_elements() {
        writeln!(
            out,
            "{},{},{},{:.9e}",
            mesh.elements[a],
            mesh.elements[partition.assignment[a]],
            partition.distance[a],
            mesh.volume_fraction(a)
        )?;
    }
    Ok(())
}

/// Coordinate format, general, one-based indices.
pub fn write_matrix_market<W: Write>(mut out: W, a: &SparseMatrix) -> io::Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", a.nrows, a.ncols, a.nnz())?;
    for (i, j, v) in a.iter() {
        writeln!(out, "{} {} {:.17e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

/// Dense column vector in array format.
pub fn write_vector_market<W: Write>(mut out: W, x: &[f64]) -> io::Result<()> {
    writeln!(out, "%%MatrixMarket matrix array real general")?;
    writeln!(out, "{} 1", x.len())?;
    for v in x {
        writeln!(out, "{v:.17e}")?;
    }
    Ok(())
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

/// Reads a real coordinate matrix (`general` or `symmetric`).
pub fn read_matrix_market<R: BufRead>(input: R) -> io::Result<SparseMatrix> {
    let mut lines = input.lines();
    let banner = lines.next().ok_or_else(|| invalid("empty input"))??;
    let fields: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.len() < 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(invalid(format!("unsupported banner: {banner}")));
    }
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(invalid(format!("unsupported field type {}", fields[3])));
    }
    let symmetric = match fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(invalid(format!("unsupported symmetry {other}"))),
    };
    let mut body = lines.filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty() && !l.starts_with('%')));
    let size = body.next().ok_or_else(|| invalid("missing size line"))??;
    let dims: Vec<usize> =
        size.split_whitespace().map(|t| t.parse().map_err(|_| invalid("bad size line"))).collect::<Result<_, _>>()?;
    let [nrows, ncols, nnz] = dims[..] else { return Err(invalid("size line needs three integers")) };
    let mut t = Triplets::new(nrows, ncols);
    for _ in 0..nnz {
        let line = body.next().ok_or_else(|| invalid("fewer entries than announced"))??;
        let mut it = line.split_whitespace();
        let mut index = |n: usize| -> io::Result<usize> {
            let k: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| invalid(format!("bad entry: {line}")))?;
            if k == 0 || k > n {
                return Err(invalid(format!("index out of range: {line}")));
            }
            Ok(k - 1)
        };
        let i = index(nrows)?;
        let j = index(ncols)?;
        let v: f64 = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| invalid(format!("bad entry: {line}")))?;
        t.push(i, j, v);
        if symmetric && i != j {
            t.push(j, i, v);
        }
    }
    Ok(t.to_matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{LevelSet, Point};
    use crate::macroelement::build_macro_partition;
    use crate::mesh::{build_background_mesh, extract_active_mesh, Rect};

    #[test]
    fn matrix_market_round_trip_is_exact() {
        let mut t = Triplets::new(3, 4);
        t.push(0, 0, 0.1);
        t.push(2, 3, -1.0 / 3.0);
        t.push(1, 2, 6.02e23);
        let a = t.to_matrix();
        let mut buf = Vec::new();
        write_matrix_market(&mut buf, &a).unwrap();
        let b = read_matrix_market(buf.as_slice()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn symmetric_matrix_market_is_expanded() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 4\n2 1 -1\n";
        let a = read_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(a.get(0, 1), -1.0);
        assert_eq!(a.get(1, 0), -1.0);
        assert_eq!(a.get(0, 0), 4.0);
    }

    #[test]
    fn malformed_matrix_market_is_rejected() {
        assert!(read_matrix_market("%%MatrixMarket matrix array real general\n1 1\n1\n".as_bytes()).is_err());
        assert!(read_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n".as_bytes()).is_err());
        assert!(read_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n".as_bytes()).is_err());
    }

    #[test]
    fn mesh_and_macro_dumps_have_announced_sizes() {
        let bg = build_background_mesh(6, 6, Rect::unit()).unwrap();
        let mesh = extract_active_mesh(bg, &LevelSet::circle(Point::new(0.5, 0.5), 0.4), &[]).unwrap();
        let mut buf = Vec::new();
        write_mesh(&mut buf, &mesh).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "vertices 49");
        assert_eq!(lines[50], "triangles 72");
        let k: usize = lines[123].strip_prefix("segments ").unwrap().parse().unwrap();
        assert_eq!(k, mesh.n_cut());
        assert_eq!(lines.len(), 124 + k);

        let part = build_macro_partition(&mesh, 0.3).unwrap();
        let mut buf = Vec::new();
        write_macro_csv(&mut buf, &mesh, &part).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), mesh.n_elements() + 1);
    }
}
