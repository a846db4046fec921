//! Catalog files: one JSON header line followed by one JSON record per entry.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::enumerate2d::PolygonEntry;
use crate::enumerate3d::{
    entry_id, surface_name, CatalogEntry, Category, Classification, Recipe, Tallies,
};
use crate::error::{Error, Result};
use crate::fans::SurfaceClass;
use crate::geometry::{hull, LatticePolytope};
use crate::labels::TriangulationLabel;
use crate::lattice::{cross, LatticeVector};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogHeader {
    pub schema_version: u32,
    pub dim: usize,
    pub max_points: usize,
    pub count: usize,
    /// Entries per assigned category; recomputed and checked on load.
    pub category_counts: BTreeMap<Category, usize>,
    /// Entries per embedding dimension `num_points - 1`.
    pub embedding_counts: BTreeMap<usize, usize>,
    /// Pipeline statistics, 3-D only.
    pub tallies: Option<Tallies>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryRecord {
    pub id: String,
    pub category: Category,
    pub recipe: Option<Recipe>,
    pub vertices: Vec<LatticeVector>,
    pub num_points: usize,
    pub f_vector: Vec<usize>,
    pub label: Option<TriangulationLabel>,
    pub minimal: bool,
    pub parent: Option<String>,
    pub fiber_description: String,
}

impl EntryRecord {
    pub fn polytope(&self) -> Result<LatticePolytope> {
        hull(&self.vertices)
    }
}

impl From<&CatalogEntry> for EntryRecord {
    fn from(e: &CatalogEntry) -> Self {
        let (v, ed, f) = e.f_vector;
        Self {
            id: e.id.clone(),
            category: e.category,
            recipe: Some(e.recipe.clone()),
            vertices: e.polytope.vertices().to_vec(),
            num_points: e.num_points(),
            f_vector: vec![v, ed, f],
            label: Some(e.label.clone()),
            minimal: e.minimal,
            parent: e.parent.clone(),
            fiber_description: e.fiber_description.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogFile {
    pub header: CatalogHeader,
    pub entries: Vec<EntryRecord>,
}

fn counts(entries: &[EntryRecord]) -> (BTreeMap<Category, usize>, BTreeMap<usize, usize>) {
    let mut cats = BTreeMap::new();
    let mut dims = BTreeMap::new();
    for e in entries {
        *cats.entry(e.category).or_insert(0) += 1;
        *dims.entry(e.num_points - 1).or_insert(0) += 1;
    }
    (cats, dims)
}

fn parse_err(reason: impl Into<String>) -> Error {
    Error::Parse {
        what: "catalog".into(),
        reason: reason.into(),
    }
}

impl CatalogFile {
    fn assemble(
        dim: usize,
        max_points: usize,
        mut entries: Vec<EntryRecord>,
        tallies: Option<Tallies>,
    ) -> Self {
        entries.sort_by(|a, b| a.id.cmp(&b.id));
        let (category_counts, embedding_counts) = counts(&entries);
        Self {
            header: CatalogHeader {
                schema_version: SCHEMA_VERSION,
                dim,
                max_points,
                count: entries.len(),
                category_counts,
                embedding_counts,
                tallies,
            },
            entries,
        }
    }

    pub fn from_classification(c: &Classification, max_points: usize) -> Self {
        let entries = c.entries.iter().map(EntryRecord::from).collect();
        Self::assemble(3, max_points, entries, Some(c.tallies.clone()))
    }

    /// 2-D catalog: triangles count as simplices, trapezoids as Cayley
    /// polytopes of two segments, everything else as blow-ups.
    pub fn from_polygons(polys: &[PolygonEntry], max_points: usize) -> Self {
        let mut by_points: BTreeMap<usize, Vec<&PolygonEntry>> = BTreeMap::new();
        for p in polys {
            by_points.entry(p.num_points()).or_default().push(p);
        }
        let mut entries = Vec::new();
        for (n, ps) in by_points {
            for (i, p) in ps.into_iter().enumerate() {
                let category = match p.fan_class {
                    SurfaceClass::ProjectivePlane => Category::Simplex,
                    SurfaceClass::Hirzebruch(_) => Category::CayleySegments,
                    SurfaceClass::BlownUp { .. } => Category::Blowup,
                };
                let v = p.num_vertices();
                entries.push(EntryRecord {
                    id: entry_id(2, n, i + 1),
                    category,
                    recipe: None,
                    vertices: p.polygon.vertices().to_vec(),
                    num_points: n,
                    f_vector: vec![v, v],
                    label: None,
                    minimal: p.minimal,
                    parent: None,
                    fiber_description: format!(
                        "{} embedded in P^{}",
                        surface_name(&p.fan_class.to_string()),
                        n - 1
                    ),
                });
            }
        }
        Self::assemble(2, max_points, entries, None)
    }

    pub fn get(&self, id: &str) -> Option<&EntryRecord> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e).expect("entries serialize"));
            out.push('\n');
        }
        out
    }

    /// Parses and checks the header against the records.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| parse_err("empty file"))?;
        let header: CatalogHeader =
            serde_json::from_str(first).map_err(|e| parse_err(format!("line 1: {e}")))?;
        if header.schema_version != SCHEMA_VERSION {
            return Err(parse_err(format!(
                "unsupported schema version {}",
                header.schema_version
            )));
        }
        let mut entries = Vec::new();
        for (i, line) in lines {
            let rec: EntryRecord = serde_json::from_str(line)
                .map_err(|e| parse_err(format!("line {}: {e}", i + 1)))?;
            if rec.vertices.iter().any(|v| v.dim() != header.dim) {
                return Err(parse_err(format!(
                    "line {}: vertices are not {}-dimensional",
                    i + 1,
                    header.dim
                )));
            }
            entries.push(rec);
        }
        if entries.len() != header.count {
            return Err(parse_err(format!(
                "header says {} entries, found {}",
                header.count,
                entries.len()
            )));
        }
        if !entries.windows(2).all(|w| w[0].id < w[1].id) {
            return Err(parse_err("entries are not sorted by id"));
        }
        let (cats, dims) = counts(&entries);
        if cats != header.category_counts || dims != header.embedding_counts {
            return Err(parse_err("header tallies do not match the entries"));
        }
        Ok(Self { header, entries })
    }

    pub fn read(path: &std::path::Path) -> std::result::Result<Self, ReadError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ReadError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(ReadError::Parse)
    }

    pub fn write(&self, path: &std::path::Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json_lines())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Parse(Error),
}

/// Vertex indices of facet `f`, counterclockwise as seen from outside.
pub fn oriented_facet(p: &LatticePolytope, f: usize) -> Vec<usize> {
    let facet = &p.facets()[f];
    let verts = &facet.vertices;
    let mut cycle = vec![verts[0]];
    while cycle.len() < verts.len() {
        let last = *cycle.last().unwrap();
        let next = verts
            .iter()
            .copied()
            .find(|&w| !cycle.contains(&w) && p.is_edge(last, w))
            .expect("facet boundary is a cycle");
        cycle.push(next);
    }
    let (a, b, c) = (p.vertex(cycle[0]), p.vertex(cycle[1]), p.vertex(cycle[2]));
    // the stored normal points inwards
    if cross(&(b - a), &(c - a)).dot(&facet.inequality.normal) > 0 {
        cycle.reverse();
    }
    cycle
}

/// OFF mesh of a 3-polytope, or of a polygon placed at height zero.
pub fn to_off(p: &LatticePolytope) -> String {
    let mut s = String::from("OFF\n");
    let coords = |v: &LatticeVector| {
        let z = if v.dim() == 3 { v.get(2) } else { 0 };
        format!("{} {} {}", v.get(0), v.get(1), z)
    };
    if p.dim() == 3 {
        let _ = writeln!(
            s,
            "{} {} {}",
            p.vertices().len(),
            p.facets().len(),
            p.edges().len()
        );
        for v in p.vertices() {
            let _ = writeln!(s, "{}", coords(v));
        }
        for f in 0..p.facets().len() {
            let cyc = oriented_facet(p, f);
            let idx: Vec<String> = cyc.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(s, "{} {}", cyc.len(), idx.join(" "));
        }
    } else {
        let cyc = p.polygon_cycle();
        let _ = writeln!(s, "{} 1 {}", cyc.len(), cyc.len());
        for v in p.vertices() {
            let _ = writeln!(s, "{}", coords(v));
        }
        let idx: Vec<String> = cyc.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(s, "{} {}", cyc.len(), idx.join(" "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::k_delta;
    use crate::enumerate2d::enumerate_smooth_polygons;
    use crate::enumerate3d::{classify, ClosureConfig};

    #[test]
    fn round_trip() {
        let c = classify(ClosureConfig::new(10));
        let cat = CatalogFile::from_classification(&c, 10);
        let text = cat.to_json_lines();
        let back = CatalogFile::parse(&text).unwrap();
        assert_eq!(back, cat);
        assert_eq!(back.to_json_lines(), text);
        for e in &back.entries {
            assert_eq!(e.polytope().unwrap().num_points(), e.num_points);
        }
    }

    #[test]
    fn polygon_catalog_round_trip() {
        let cat = CatalogFile::from_polygons(&enumerate_smooth_polygons(8), 8);
        assert_eq!(CatalogFile::parse(&cat.to_json_lines()).unwrap(), cat);
        assert!(cat.entries.iter().all(|e| e.id.starts_with("smooth2-")));
    }

    #[test]
    fn rejects_bad_input() {
        let c = classify(ClosureConfig::new(8));
        let text = CatalogFile::from_classification(&c, 8).to_json_lines();
        let truncated: String = text.lines().take(2).map(|l| format!("{l}\n")).collect();
        assert!(CatalogFile::parse(&truncated).is_err());
        assert!(CatalogFile::parse("").is_err());
        assert!(CatalogFile::parse(&text.replacen(
            "\"schema_version\":1",
            "\"schema_version\":9",
            1
        ))
        .is_err());
        let half = &text[..text.len() / 2];
        assert!(CatalogFile::parse(half).is_err());
    }

    #[test]
    fn off_of_simplex() {
        let off = to_off(&k_delta(3, 1).unwrap());
        let lines: Vec<&str> = off.lines().collect();
        assert_eq!(lines[0], "OFF");
        assert_eq!(lines[1], "4 4 6");
        assert!(lines[6..].iter().all(|l| l.starts_with("3 ")));
    }

    #[test]
    fn off_faces_point_outwards() {
        let p = k_delta(3, 2).unwrap();
        let centroid2 = p
            .vertices()
            .iter()
            .fold(LatticeVector::zero(3), |a, &v| a + v);
        for f in 0..p.facets().len() {
            let c = oriented_facet(&p, f);
            let (a, b, d) = (p.vertex(c[0]), p.vertex(c[1]), p.vertex(c[2]));
            let n = cross(&(b - a), &(d - a));
            // outward: the centroid lies on the negative side
            assert!(n.dot(&(centroid2 - a.scale(4))) < 0);
        }
    }
}
