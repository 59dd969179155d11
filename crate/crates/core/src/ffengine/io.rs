//! Mesh and chain files: OFF, a JSON mesh format and JSON chains.

use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::chain::{Piece, PolyChain};
use super::complex::{Chart, GeoComplex};
use super::FFError;

/// `{"vertices": [[x, …]], "simplices": [[i, …]], "charts": [[[u, …], …]]?}`.
/// Chart points follow the vertex order of their simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshDocument {
    pub vertices: Vec<Vec<f64>>,
    pub simplices: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charts: Option<Vec<Vec<Vec<f64>>>>,
}

impl MeshDocument {
    pub fn build(self) -> Result<GeoComplex, FFError> {
        let vertices = self.vertices.into_iter().map(DVector::from_vec).collect();
        let charts = self.charts.map(|cs| {
            cs.into_iter()
                .map(|c| Chart {
                    model: c.into_iter().map(DVector::from_vec).collect(),
                })
                .collect()
        });
        GeoComplex::new(vertices, self.simplices, charts)
    }

    pub fn from_complex(cx: &GeoComplex) -> MeshDocument {
        let maximal = cx.maximal();
        MeshDocument {
            vertices: cx
                .vertices()
                .iter()
                .map(|v| v.iter().copied().collect())
                .collect(),
            simplices: maximal
                .iter()
                .map(|&m| cx.vertices_of(m).to_vec())
                .collect(),
            charts: Some(
                maximal
                    .iter()
                    .map(|&m| {
                        cx.chart(m)
                            .expect("maximal cells carry charts")
                            .model
                            .iter()
                            .map(|p| p.iter().copied().collect())
                            .collect()
                    })
                    .collect(),
            ),
        }
    }
}

pub fn mesh_from_json(text: &str) -> Result<GeoComplex, FFError> {
    let doc: MeshDocument =
        serde_json::from_str(text).map_err(|e| FFError::Parse(e.to_string()))?;
    doc.build()
}

pub fn mesh_to_json(cx: &GeoComplex) -> String {
    serde_json::to_string(&MeshDocument::from_complex(cx)).expect("serializable")
}

/// Reads an OFF file. Faces become simplices; the `OFF` header line may be followed by a
/// dimension prefix as in `4OFF`.
pub fn parse_off(text: &str) -> Result<GeoComplex, FFError> {
    let bad = |s: &str| FFError::Parse(format!("OFF: {s}"));
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    let header = tokens.next().ok_or_else(|| bad("empty file"))?;
    let ambient = match header.strip_suffix("OFF") {
        Some("") => 3,
        Some(prefix) => {
            let dim = prefix.strip_prefix('n').unwrap_or(prefix);
            if dim.is_empty() {
                tokens
                    .next()
                    .ok_or_else(|| bad("missing dimension"))?
                    .parse()
                    .map_err(|_| bad("bad dimension"))?
            } else {
                dim.parse().map_err(|_| bad("bad header"))?
            }
        }
        None => return Err(bad("missing OFF header")),
    };
    let mut num = |what: &str| -> Result<String, FFError> {
        tokens.next().map(str::to_owned).ok_or_else(|| bad(what))
    };
    let nv: usize = num("vertex count")?
        .parse()
        .map_err(|_| bad("vertex count"))?;
    let nf: usize = num("face count")?.parse().map_err(|_| bad("face count"))?;
    let _edges = num("edge count")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let mut v = Vec::with_capacity(ambient);
        for _ in 0..ambient {
            v.push(
                num("coordinate")?
                    .parse::<f64>()
                    .map_err(|_| bad("coordinate"))?,
            );
        }
        vertices.push(DVector::from_vec(v));
    }
    let mut simplices = Vec::with_capacity(nf);
    for _ in 0..nf {
        let len: usize = num("face size")?.parse().map_err(|_| bad("face size"))?;
        let mut f = Vec::with_capacity(len);
        for _ in 0..len {
            f.push(
                num("face index")?
                    .parse::<usize>()
                    .map_err(|_| bad("face index"))?,
            );
        }
        simplices.push(f);
    }
    GeoComplex::new(vertices, simplices, None)
}

pub fn write_off(cx: &GeoComplex) -> String {
    let n = cx.ambient_dim();
    let mut out = if n == 3 {
        "OFF\n".to_owned()
    } else {
        format!("{n}OFF\n")
    };
    out += &format!("{} {} 0\n", cx.vertices().len(), cx.maximal().len());
    for v in cx.vertices() {
        out += &v
            .iter()
            .map(|c| format!("{c:?}"))
            .collect::<Vec<_>>()
            .join(" ");
        out.push('\n');
    }
    for &m in cx.maximal() {
        let vs = cx.vertices_of(m);
        out += &format!(
            "{} {}\n",
            vs.len(),
            vs.iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        );
    }
    out
}

/// Loads `.off` files as OFF and anything else as JSON.
pub fn load_mesh(path: &Path) -> Result<GeoComplex, FFError> {
    let text = std::fs::read_to_string(path)?;
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("off"))
    {
        parse_off(&text)
    } else {
        mesh_from_json(&text)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceDocument {
    /// Vertex ids of the host cell.
    pub host: Vec<usize>,
    /// Barycentric coordinates in the host, in sorted vertex order.
    pub points: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainDocument {
    pub k: usize,
    pub pieces: Vec<PieceDocument>,
}

impl ChainDocument {
    pub fn from_chain(cx: &GeoComplex, chain: &PolyChain) -> ChainDocument {
        ChainDocument {
            k: chain.k,
            pieces: chain
                .pieces
                .iter()
                .map(|p| PieceDocument {
                    host: cx.vertices_of(p.host).to_vec(),
                    points: p
                        .points
                        .iter()
                        .map(|b| b.iter().copied().collect())
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn build(self, cx: &GeoComplex) -> Result<PolyChain, FFError> {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for p in self.pieces {
            let mut host = p.host.clone();
            host.sort_unstable();
            let id = cx
                .cell_id(&host)
                .ok_or(FFError::UnknownCell(p.host.clone()))?;
            let points = p
                .points
                .into_iter()
                .map(|b| {
                    // Reorder into sorted vertex order.
                    let mut v = DVector::zeros(b.len());
                    for (c, vert) in b.iter().zip(&p.host) {
                        if let Ok(pos) = host.binary_search(vert) {
                            if pos < v.len() {
                                v[pos] = *c;
                            }
                        }
                    }
                    v
                })
                .collect();
            pieces.push(Piece { host: id, points });
        }
        PolyChain::new(cx, self.k, pieces)
    }
}

pub fn chain_from_json(cx: &GeoComplex, text: &str) -> Result<PolyChain, FFError> {
    let doc: ChainDocument =
        serde_json::from_str(text).map_err(|e| FFError::Parse(e.to_string()))?;
    doc.build(cx)
}

pub fn chain_to_json(cx: &GeoComplex, chain: &PolyChain) -> String {
    serde_json::to_string(&ChainDocument::from_chain(cx, chain)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn off_roundtrip() {
        let text = "OFF\n# square\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n3 0 2 3\n";
        let cx = parse_off(text).unwrap();
        assert_eq!((cx.count(0), cx.count(1), cx.count(2)), (4, 5, 2));
        let again = parse_off(&write_off(&cx)).unwrap();
        assert_eq!(again.cells(2), cx.cells(2));
        assert!(parse_off("OFF\n4 2 0\n0 0 0\n").is_err());
        assert!(parse_off("PLY\n").is_err());
    }

    #[test]
    fn json_mesh_roundtrip_keeps_charts() {
        let cx = GeoComplex::flat_torus(3, 4).unwrap();
        let back = mesh_from_json(&mesh_to_json(&cx)).unwrap();
        assert_eq!(back.cells(2), cx.cells(2));
        let m = cx.maximal()[0];
        assert_eq!(back.chart(m), cx.chart(m));
    }

    #[test]
    fn chain_roundtrip_and_host_order() {
        let cx = GeoComplex::unit_square();
        let text = r#"{"k":1,"pieces":[{"host":[2,0,1],"points":[[0.2,0.5,0.3],[0.1,0.1,0.8]]}]}"#;
        let chain = chain_from_json(&cx, text).unwrap();
        assert_eq!(cx.vertices_of(chain.pieces[0].host), &[0, 1, 2]);
        assert!((chain.pieces[0].points[0][2] - 0.2).abs() < 1e-15);
        let back = chain_from_json(&cx, &chain_to_json(&cx, &chain)).unwrap();
        assert_eq!(back, chain);
        assert!(matches!(
            chain_from_json(
                &cx,
                r#"{"k":1,"pieces":[{"host":[1,3],"points":[[1,0],[0,1]]}]}"#
            ),
            Err(FFError::UnknownCell(_))
        ));
    }
}
