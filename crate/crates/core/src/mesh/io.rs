//! Plain-text mesh format.
//!
//! ```text
//! nv nt nbe
//! x y [theta b]      one line per vertex
//! i j k              one line per triangle, counter-clockwise
//! i j t              one line per boundary edge, t = adjacent triangle
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use super::Mesh;
use crate::{Error, Result, Vec2};

pub fn write_mesh(mesh: &Mesh, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!(
        "{} {} {}\n",
        mesh.vertices.len(),
        mesh.triangles.len(),
        mesh.boundary_edges.len()
    ));
    for (p, theta) in mesh.vertices.iter().zip(&mesh.boundary_param) {
        match theta {
            Some(t) => out.push_str(&format!("{} {} {} b\n", p.x, p.y, t)),
            None => out.push_str(&format!("{} {}\n", p.x, p.y)),
        }
    }
    for t in &mesh.triangles {
        out.push_str(&format!("{} {} {}\n", t[0], t[1], t[2]));
    }
    for e in &mesh.boundary_edges {
        out.push_str(&format!("{} {} {}\n", e.vertices[0], e.vertices[1], e.triangle));
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

/// Writes the mesh and a `.json` sidecar with its metrics.
pub fn write_mesh_with_metrics(mesh: &Mesh, path: &Path) -> Result<()> {
    write_mesh(mesh, path)?;
    let sidecar = path.with_extension("json");
    fs::write(sidecar, serde_json::to_string_pretty(&mesh.metrics())?)?;
    Ok(())
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, line: usize) -> Result<T> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::InvalidInput(format!("mesh file line {line}: malformed record")))
}

pub fn read_mesh(path: &Path) -> Result<Mesh> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (ln, header) = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty mesh file".into()))?;
    let mut it = header.split_whitespace();
    let nv: usize = parse(it.next(), ln + 1)?;
    let nt: usize = parse(it.next(), ln + 1)?;
    let nbe: usize = parse(it.next(), ln + 1)?;

    let mut vertices = Vec::with_capacity(nv);
    let mut params = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("mesh file truncated in vertices".into()))?;
        let mut it = line.split_whitespace();
        let x: f64 = parse(it.next(), ln + 1)?;
        let y: f64 = parse(it.next(), ln + 1)?;
        let theta = match it.next() {
            Some(t) => {
                let theta: f64 = parse(Some(t), ln + 1)?;
                if it.next() != Some("b") {
                    return Err(Error::InvalidInput(format!("mesh file line {}: missing boundary flag", ln + 1)));
                }
                Some(theta)
            }
            None => None,
        };
        vertices.push(Vec2::new(x, y));
        params.push(theta);
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("mesh file truncated in triangles".into()))?;
        let mut it = line.split_whitespace();
        triangles.push([parse(it.next(), ln + 1)?, parse(it.next(), ln + 1)?, parse(it.next(), ln + 1)?]);
    }
    let mesh = Mesh::from_parts(vertices, params, triangles)?;
    if mesh.boundary_edges.len() != nbe {
        return Err(Error::InvalidInput(format!(
            "mesh file declares {nbe} boundary edges, triangulation has {}",
            mesh.boundary_edges.len()
        )));
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SmoothDomain;
    use crate::mesh::build_mesh;

    #[test]
    fn round_trip_is_exact() {
        let disk = SmoothDomain::disk(1.0).unwrap();
        let mesh = build_mesh(&disk, 0.3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("disk.mesh");
        write_mesh_with_metrics(&mesh, &path).unwrap();
        let back = read_mesh(&path).unwrap();
        assert_eq!(back.vertices, mesh.vertices);
        assert_eq!(back.boundary_param, mesh.boundary_param);
        assert_eq!(back.triangles, mesh.triangles);
        assert_eq!(back.boundary_edges, mesh.boundary_edges);
        assert!(path.with_extension("json").exists());
    }
}
