//! Mesh JSON: `{"n":2,"kind":"interior","panels":[{"c":[..],"nu":[..],"w":..,"v":[[..],..]},..]}`.

use serde::{Deserialize, Serialize};

use super::{MeshKind, Panel, SurfaceMesh};
use crate::error::{Error, Result};
use crate::kernels::PointVec;

#[derive(Serialize, Deserialize)]
struct PanelRepr {
    c: Vec<f64>,
    nu: Vec<f64>,
    w: f64,
    v: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct MeshRepr {
    n: usize,
    kind: MeshKind,
    panels: Vec<PanelRepr>,
}

impl SurfaceMesh {
    pub fn to_json(&self) -> Result<String> {
        let repr = MeshRepr {
            n: self.n,
            kind: self.kind,
            panels: self
                .panels
                .iter()
                .map(|p| PanelRepr {
                    c: p.centroid.coords().to_vec(),
                    nu: p.normal.coords().to_vec(),
                    w: p.weight,
                    v: p.vertices.iter().map(|v| v.coords().to_vec()).collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string(&repr)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let repr: MeshRepr = serde_json::from_str(json)?;
        let panels = repr
            .panels
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                if p.c.len() != repr.n || p.nu.len() != repr.n {
                    return Err(Error::InvalidMesh(format!("panel {i} dimension mismatch")));
                }
                Ok(Panel {
                    centroid: PointVec::new(p.c),
                    normal: PointVec::new(p.nu),
                    weight: p.w,
                    vertices: p.v.into_iter().map(PointVec::new).collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mesh = SurfaceMesh { n: repr.n, kind: repr.kind, panels };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn write_json_file(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_json_file(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{make_circle, make_sphere};

    #[test]
    fn roundtrip() {
        for mesh in [make_circle(8).unwrap(), make_sphere(0).unwrap()] {
            let json = mesh.to_json().unwrap();
            let back = super::SurfaceMesh::from_json(&json).unwrap();
            assert_eq!(back, mesh);
        }
    }

    #[test]
    fn rejects_corrupt_mesh() {
        let mesh = make_circle(8).unwrap();
        let json = mesh.to_json().unwrap().replace("\"w\":", "\"w\":-");
        assert!(super::SurfaceMesh::from_json(&json).is_err());
    }
}
