//! Field and matrix exports: VTK legacy unstructured grids with a CSV twin,
//! and Matrix Market dumps of the assembled operators.

use crate::assembly::{AssembledSystem, DofMap};
use crate::basis::LocalBasisSet;
use crate::geometry::Mesh;
use crate::{Error, Result, Vec2};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// One sampled point of an exported field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub element: usize,
    /// Local sample slot: vertices 0..3, then edge-slot midpoints 3..6.
    pub local: usize,
    pub position: Vec2,
    pub ux: f64,
    pub uy: f64,
}

impl FieldSample {
    pub fn magnitude(&self) -> f64 {
        (self.ux * self.ux + self.uy * self.uy).sqrt()
    }
}

/// Samples a free-dof coefficient vector per element at the three vertices
/// and three edge midpoints, evaluating on the correct side of cut elements.
pub fn sample_field(
    mesh: &Mesh,
    bases: &[LocalBasisSet],
    dofmap: &DofMap,
    coeffs: &[f64],
) -> Vec<FieldSample> {
    let mut samples = Vec::with_capacity(6 * mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let l2g = dofmap.local_to_global(mesh, t);
        let mut dofs = [0.0; 6];
        for (i, &gdof) in l2g.iter().enumerate() {
            if let Some(fi) = dofmap.free_index[gdof] {
                dofs[i] = coeffs[fi];
            }
        }
        let verts = mesh.triangle_vertices(t);
        let points = [
            verts[0],
            verts[1],
            verts[2],
            (verts[1] + verts[2]) * 0.5,
            (verts[2] + verts[0]) * 0.5,
            (verts[0] + verts[1]) * 0.5,
        ];
        for (local, &p) in points.iter().enumerate() {
            let funcs = bases[t].funcs_on(bases[t].side_at(p));
            let mut v = Vec2::zeros();
            for i in 0..6 {
                v += funcs[i].eval(p) * dofs[i];
            }
            samples.push(FieldSample {
                element: t,
                local,
                position: p,
                ux: v.x,
                uy: v.y,
            });
        }
    }
    samples
}

/// Writes the sampled field as a VTK legacy ASCII unstructured grid (each
/// element subdivided into four triangles over its six sample points) plus a
/// CSV twin with identical values. Returns the two paths written.
pub fn export_field(
    mesh: &Mesh,
    bases: &[LocalBasisSet],
    dofmap: &DofMap,
    coeffs: &[f64],
    out_dir: &Path,
    stem: &str,
) -> Result<(PathBuf, PathBuf)> {
    let samples = sample_field(mesh, bases, dofmap, coeffs);
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.display().to_string(), e))?;
    let vtk_path = out_dir.join(format!("{stem}.vtk"));
    let csv_path = out_dir.join(format!("{stem}.csv"));

    let nt = mesh.num_triangles();
    let mut vtk = String::new();
    vtk.push_str("# vtk DataFile Version 3.0\n");
    vtk.push_str("displacement field\n");
    vtk.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(vtk, "POINTS {} double", samples.len());
    for s in &samples {
        let _ = writeln!(vtk, "{} {} 0", s.position.x, s.position.y);
    }
    // Four sub-triangles per element: corner triangles plus the middle one.
    let _ = writeln!(vtk, "CELLS {} {}", 4 * nt, 4 * nt * 4);
    for t in 0..nt {
        let base = 6 * t;
        for tri in [[0, 5, 4], [1, 3, 5], [2, 4, 3], [3, 4, 5]] {
            let _ = writeln!(vtk, "3 {} {} {}", base + tri[0], base + tri[1], base + tri[2]);
        }
    }
    let _ = writeln!(vtk, "CELL_TYPES {}", 4 * nt);
    for _ in 0..4 * nt {
        vtk.push_str("5\n");
    }
    let _ = writeln!(vtk, "POINT_DATA {}", samples.len());
    for (name, pick) in [
        ("ux", (|s: &FieldSample| s.ux) as fn(&FieldSample) -> f64),
        ("uy", |s| s.uy),
        ("magnitude", |s| s.magnitude()),
    ] {
        let _ = writeln!(vtk, "SCALARS {name} double 1");
        vtk.push_str("LOOKUP_TABLE default\n");
        for s in &samples {
            let _ = writeln!(vtk, "{}", pick(s));
        }
    }
    write_file(&vtk_path, vtk.as_bytes())?;

    let mut csv = String::from("element,local,x,y,ux,uy,magnitude\n");
    for s in &samples {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            s.element,
            s.local,
            s.position.x,
            s.position.y,
            s.ux,
            s.uy,
            s.magnitude()
        );
    }
    write_file(&csv_path, csv.as_bytes())?;
    Ok((vtk_path, csv_path))
}

/// Reads a field CSV back into samples (lossless round trip).
pub fn read_field_csv(path: &Path) -> Result<Vec<FieldSample>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::ConfigParse(format!(
                "{}:{}: expected 7 fields, found {}",
                path.display(),
                lineno + 1,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| Error::ConfigParse(format!("{}:{}: {e}", path.display(), lineno + 1)))
        };
        samples.push(FieldSample {
            element: fields[0]
                .parse()
                .map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))?,
            local: fields[1]
                .parse()
                .map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))?,
            position: Vec2::new(parse(fields[2])?, parse(fields[3])?),
            ux: parse(fields[4])?,
            uy: parse(fields[5])?,
        });
    }
    Ok(samples)
}

/// Writes the assembled operator and mass matrices in Matrix Market format.
/// Returns the paths of `A.mtx` and `M.mtx`.
pub fn export_matrices(sys: &AssembledSystem, out_dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.display().to_string(), e))?;
    let a_path = out_dir.join("A.mtx");
    let m_path = out_dir.join("M.mtx");
    let write = |path: &Path, mat: &crate::assembly::SparseSymmetric| -> Result<()> {
        let file =
            std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut buf = std::io::BufWriter::new(file);
        mat.write_matrix_market(&mut buf)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Ok(())
    };
    write(&a_path, &sys.operator)?;
    write(&m_path, &sys.mass)?;
    Ok((a_path, m_path))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut file =
        std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    file.write_all(bytes)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble, build_bases, AssemblyConfig};
    use crate::geometry::{build_uniform_mesh, interface_geometry, LevelSet};
    use crate::material::LameField;

    #[test]
    fn zero_vector_exports_zero_field() {
        let mesh = build_uniform_mesh(2).unwrap();
        let mat = LameField::uniform(1.0, 1.0).unwrap();
        let geo = interface_geometry(&mesh, &LevelSet::None).unwrap();
        let bases = build_bases(&mesh, &geo, &mat).unwrap();
        let sys = assemble(&mesh, &geo, &bases, &mat, &AssemblyConfig::default()).unwrap();
        let coeffs = vec![0.0; sys.dofmap.num_free()];
        let samples = sample_field(&mesh, &bases, &sys.dofmap, &coeffs);
        assert_eq!(samples.len(), 6 * mesh.num_triangles());
        assert!(samples.iter().all(|s| s.ux == 0.0 && s.uy == 0.0));
    }

    #[test]
    fn constant_interpolant_on_cut_elements() {
        // Constant dof values reproduce the constant exactly, including on
        // cut elements sampled on both sides of the interface.
        let mesh = build_uniform_mesh(8).unwrap();
        let ls = LevelSet::circle(Vec2::new(0.0, 0.0), 0.6).unwrap();
        let mat = LameField::new(0.5, 2.5, 5.0, 25.0).unwrap();
        let geo = interface_geometry(&mesh, &ls).unwrap();
        let bases = build_bases(&mesh, &geo, &mat).unwrap();
        let dofmap = DofMap::new(&mesh);
        let mut coeffs = vec![0.0; dofmap.num_free()];
        for (slot, &gdof) in dofmap.free_dofs.iter().enumerate() {
            coeffs[slot] = if gdof % 2 == 0 { 2.0 } else { -3.0 };
        }
        for s in sample_field(&mesh, &bases, &dofmap, &coeffs) {
            // Skip elements touching the boundary, whose constrained dofs
            // are zeroed and break the constant.
            let l2g = dofmap.local_to_global(&mesh, s.element);
            if l2g.iter().any(|&g| dofmap.free_index[g].is_none()) {
                continue;
            }
            assert!((s.ux - 2.0).abs() < 1e-10, "ux at {:?}", s.position);
            assert!((s.uy + 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let mesh = build_uniform_mesh(3).unwrap();
        let ls = LevelSet::circle(Vec2::new(0.0, 0.0), 0.6).unwrap();
        let mat = LameField::new(0.5, 2.5, 5.0, 25.0).unwrap();
        let geo = interface_geometry(&mesh, &ls).unwrap();
        let bases = build_bases(&mesh, &geo, &mat).unwrap();
        let dofmap = DofMap::new(&mesh);
        let coeffs: Vec<f64> = (0..dofmap.num_free())
            .map(|i| ((i * 37 % 17) as f64 / 7.0 - 1.0) * 0.831)
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let (vtk, csv) = export_field(&mesh, &bases, &dofmap, &coeffs, dir.path(), "mode").unwrap();
        assert!(vtk.exists());
        let want = sample_field(&mesh, &bases, &dofmap, &coeffs);
        let got = read_field_csv(&csv).unwrap();
        assert_eq!(want.len(), got.len());
        for (a, b) in want.iter().zip(&got) {
            assert_eq!(a.element, b.element);
            assert_eq!(a.local, b.local);
            assert_eq!(a.ux.to_bits(), b.ux.to_bits());
            assert_eq!(a.uy.to_bits(), b.uy.to_bits());
            assert_eq!(a.position.x.to_bits(), b.position.x.to_bits());
            assert_eq!(a.position.y.to_bits(), b.position.y.to_bits());
        }
        let vtk_text = std::fs::read_to_string(&vtk).unwrap();
        assert!(vtk_text.starts_with("# vtk DataFile Version 3.0\n"));
        assert!(vtk_text.contains("SCALARS magnitude double 1"));
    }
}
