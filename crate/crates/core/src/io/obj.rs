use std::fmt::Write as _;
use std::path::Path;

use super::{io_err, IoError};
use crate::shapegen::TriangleMesh;

/// Wavefront OBJ with positions, normals and 1-based `f v//vn` faces.
pub fn format_obj(mesh: &TriangleMesh<f64>) -> String {
    let mut s = String::new();
    for p in &mesh.positions {
        writeln!(s, "v {} {} {}", p.x, p.y, p.z).unwrap();
    }
    for n in &mesh.normals {
        writeln!(s, "vn {} {} {}", n.x, n.y, n.z).unwrap();
    }
    for t in &mesh.triangles {
        let [a, b, c] = t.map(|i| i + 1);
        writeln!(s, "f {a}//{a} {b}//{b} {c}//{c}").unwrap();
    }
    s
}

pub fn write_obj(path: &Path, mesh: &TriangleMesh<f64>) -> Result<(), IoError> {
    std::fs::write(path, format_obj(mesh)).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match() {
        let mesh = TriangleMesh::uv_sphere(1.0, 8, 4);
        let text = format_obj(&mesh);
        assert_eq!(
            text.lines().filter(|l| l.starts_with("v ")).count(),
            mesh.vertex_count()
        );
        assert_eq!(
            text.lines().filter(|l| l.starts_with("f ")).count(),
            mesh.triangle_count()
        );
    }
}
