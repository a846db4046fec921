//! Triangulation labels of simple 3-polytopes, small triangulations of the
//! sphere, and lattice-point lower bounds read off from labels.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::LatticePolytope;

/// The word `m_1^{v_1} m_2^{v_2} ...`: `v_m` facets with `m` edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriangulationLabel {
    counts: BTreeMap<u32, u32>,
}

impl TriangulationLabel {
    pub fn from_sizes(sizes: impl IntoIterator<Item = u32>) -> Self {
        let mut counts = BTreeMap::new();
        for m in sizes {
            *counts.entry(m).or_insert(0) += 1;
        }
        Self { counts }
    }

    /// `(base, exponent)` pairs by increasing base.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.counts.iter().map(|(&m, &v)| (m, v))
    }

    pub fn count(&self, m: u32) -> u32 {
        self.counts.get(&m).copied().unwrap_or(0)
    }

    /// Facet sizes in non-decreasing order.
    pub fn sizes(&self) -> Vec<u32> {
        self.terms()
            .flat_map(|(m, v)| std::iter::repeat_n(m, v as usize))
            .collect()
    }

    pub fn num_facets(&self) -> u32 {
        self.counts.values().sum()
    }

    /// Vertices of a simple polytope with this label.
    pub fn num_vertices(&self) -> u32 {
        2 * self.num_facets().saturating_sub(2)
    }

    /// Sum over facets of the number of edges.
    pub fn edge_incidences(&self) -> u32 {
        self.terms().map(|(m, v)| m * v).sum()
    }
}

impl fmt::Display for TriangulationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.terms().map(|(m, v)| format!("{m}^{v}")).collect();
        write!(f, "{}", words.join(" "))
    }
}

impl FromStr for TriangulationLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: String| Error::Parse {
            what: "label".into(),
            reason,
        };
        let mut counts = BTreeMap::new();
        for word in s.split_whitespace() {
            let (m, v) = word.split_once('^').unwrap_or((word, "1"));
            let m: u32 = m
                .parse()
                .map_err(|_| bad(format!("bad base in {word:?}")))?;
            let v: u32 = v
                .parse()
                .map_err(|_| bad(format!("bad exponent in {word:?}")))?;
            if m < 3 || v == 0 {
                return Err(bad(format!("{word:?} is not a facet term")));
            }
            *counts.entry(m).or_insert(0) += v;
        }
        if counts.is_empty() {
            return Err(bad("empty label".into()));
        }
        Ok(Self { counts })
    }
}

impl Serialize for TriangulationLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TriangulationLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Multiset of facet edge counts of a simple 3-polytope.
pub fn label(p: &LatticePolytope) -> Result<TriangulationLabel> {
    if p.dim() != 3 {
        return Err(Error::UnsupportedDimension(p.dim()));
    }
    if !p.is_simple() {
        return Err(Error::NotSimple);
    }
    Ok(TriangulationLabel::from_sizes(
        p.facets().iter().map(|f| f.vertices.len() as u32),
    ))
}

/// Raises `raise` facet sizes (chosen as a sub-multiset) and adds one facet
/// of size `new`.
fn raised_labels(l: &TriangulationLabel, raise: usize, new: u32) -> BTreeSet<TriangulationLabel> {
    let terms: Vec<(u32, u32)> = l.terms().collect();
    let mut out = BTreeSet::new();
    fn rec(
        terms: &[(u32, u32)],
        i: usize,
        left: usize,
        picked: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if left == 0 {
            out.push(picked.clone());
            return;
        }
        if i == terms.len() {
            return;
        }
        let (m, v) = terms[i];
        for take in 0..=(v as usize).min(left) {
            for _ in 0..take {
                picked.push(m);
            }
            rec(terms, i + 1, left - take, picked, out);
            for _ in 0..take {
                picked.pop();
            }
        }
    }
    let mut choices = Vec::new();
    rec(&terms, 0, raise, &mut Vec::new(), &mut choices);
    for pick in choices {
        let mut sizes = l.sizes();
        for m in &pick {
            let pos = sizes.iter().position(|x| x == m).unwrap();
            sizes.remove(pos);
        }
        sizes.extend(pick.iter().map(|m| m + 1));
        sizes.push(new);
        out.insert(TriangulationLabel::from_sizes(sizes));
    }
    out
}

/// Labels after blowing up a vertex: three facets gain an edge, a triangle appears.
pub fn vertex_blowup_labels(l: &TriangulationLabel) -> BTreeSet<TriangulationLabel> {
    raised_labels(l, 3, 3)
}

/// Labels after blowing up an edge: two facets gain an edge, a quadrilateral appears.
pub fn edge_blowup_labels(l: &TriangulationLabel) -> BTreeSet<TriangulationLabel> {
    raised_labels(l, 2, 4)
}

/// A combinatorial triangulation of the 2-sphere as a rotation system:
/// `rot[v]` lists the neighbours of `v` in counterclockwise order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    rot: Vec<Vec<usize>>,
}

impl Triangulation {
    pub fn tetrahedron() -> Self {
        Self::from_triangles(4, &[[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]])
    }

    /// Builds the rotation system from consistently oriented triangles.
    fn from_triangles(n: usize, tris: &[[usize; 3]]) -> Self {
        // at vertex a, triangle (a, b, c) means c follows b counterclockwise
        let mut next: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
        for t in tris {
            for r in 0..3 {
                let (a, b, c) = (t[r], t[(r + 1) % 3], t[(r + 2) % 3]);
                next[a].insert(b, c);
            }
        }
        let rot = next
            .iter()
            .map(|succ| {
                let start = *succ.keys().next().unwrap();
                let mut cyc = vec![start];
                let mut cur = succ[&start];
                while cur != start {
                    cyc.push(cur);
                    cur = succ[&cur];
                }
                cyc
            })
            .collect();
        Self { rot }
    }

    fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for (a, nb) in self.rot.iter().enumerate() {
            let d = nb.len();
            for i in 0..d {
                let (b, c) = (nb[i], nb[(i + 1) % d]);
                if a < b && a < c {
                    out.push([a, b, c]);
                }
            }
        }
        out
    }

    pub fn num_vertices(&self) -> usize {
        self.rot.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rot[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.rot[v]
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.rot[a].contains(&b)
    }

    /// Vertex degrees as a label: vertices of the triangulation are facets of
    /// the dual simple polytope.
    pub fn label(&self) -> TriangulationLabel {
        TriangulationLabel::from_sizes(self.rot.iter().map(|n| n.len() as u32))
    }

    /// All triangulations obtained by splitting one vertex into an edge.
    pub fn vertex_splits(&self) -> Vec<Triangulation> {
        let n = self.rot.len();
        let tris = self.triangles();
        let mut out = Vec::new();
        for v in 0..n {
            let link = &self.rot[v];
            let d = link.len();
            for i in 0..d {
                for j in (i + 1)..(i + d) {
                    let (ci, cj) = (link[i], link[j % d]);
                    // v keeps the fan of triangles from c_i to c_j, the new
                    // vertex takes the rest
                    let keep: BTreeSet<(usize, usize)> =
                        (i..j).map(|k| (link[k % d], link[(k + 1) % d])).collect();
                    let mut new_tris = Vec::new();
                    for t in &tris {
                        let Some(r) = t.iter().position(|&x| x == v) else {
                            new_tris.push(*t);
                            continue;
                        };
                        let (b, c) = (t[(r + 1) % 3], t[(r + 2) % 3]);
                        if keep.contains(&(b, c)) {
                            new_tris.push([v, b, c]);
                        } else {
                            new_tris.push([n, b, c]);
                        }
                    }
                    new_tris.push([v, cj, n]);
                    new_tris.push([v, n, ci]);
                    out.push(Self::from_triangles(n + 1, &new_tris));
                }
            }
        }
        out
    }

    /// Lexicographically least breadth-first code over all starting darts
    /// and both orientations; equal codes mean isomorphic triangulations.
    pub fn canonical_code(&self) -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        for u in 0..self.rot.len() {
            for &v in &self.rot[u] {
                for mirror in [false, true] {
                    let code = self.bfs_code(u, v, mirror);
                    if best.as_ref().is_none_or(|b| code < *b) {
                        best = Some(code);
                    }
                }
            }
        }
        best.unwrap_or_default()
    }

    fn bfs_code(&self, u: usize, v: usize, mirror: bool) -> Vec<usize> {
        let n = self.rot.len();
        let mut number = vec![usize::MAX; n];
        let mut first = vec![usize::MAX; n];
        let mut queue = vec![u];
        number[u] = 1;
        first[u] = v;
        let mut code = Vec::with_capacity(3 * n * 2);
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            let nb = &self.rot[x];
            let d = nb.len();
            let start = nb.iter().position(|&y| y == first[x]).unwrap();
            for k in 0..d {
                let idx = if mirror {
                    (start + d - k) % d
                } else {
                    (start + k) % d
                };
                let y = nb[idx];
                if number[y] == usize::MAX {
                    number[y] = queue.len() + 1;
                    first[y] = x;
                    queue.push(y);
                }
                code.push(number[y]);
            }
            code.push(0);
        }
        code
    }
}

/// All triangulations of the sphere with `n` vertices up to isomorphism,
/// for `4 <= n <= max_n`, indexed by `n`.
pub fn triangulations_up_to(max_n: usize) -> BTreeMap<usize, Vec<Triangulation>> {
    let mut out = BTreeMap::new();
    let mut layer = vec![Triangulation::tetrahedron()];
    for n in 4..=max_n {
        if n > 4 {
            let mut seen = BTreeMap::new();
            for t in &layer {
                for s in t.vertex_splits() {
                    seen.entry(s.canonical_code()).or_insert(s);
                }
            }
            layer = seen.into_values().collect();
        }
        out.insert(n, layer.clone());
    }
    out
}

fn small_triangulations() -> &'static BTreeMap<usize, Vec<Triangulation>> {
    static CACHE: OnceLock<BTreeMap<usize, Vec<Triangulation>>> = OnceLock::new();
    CACHE.get_or_init(|| triangulations_up_to(8))
}

/// Labels of all triangulations of the sphere with at most `max_facets`
/// vertices (at most 8).
pub fn realizable_labels(max_facets: usize) -> BTreeSet<TriangulationLabel> {
    assert!(
        max_facets <= 8,
        "triangulations are tabulated up to 8 vertices"
    );
    small_triangulations()
        .range(..=max_facets)
        .flat_map(|(_, ts)| ts.iter().map(|t| t.label()))
        .collect()
}

pub fn is_realizable(l: &TriangulationLabel) -> bool {
    let n = l.num_facets() as usize;
    (4..=8).contains(&n) && small_triangulations()[&n].iter().any(|t| t.label() == *l)
}

/// Fewest lattice points off the vertices of a smooth polygon with `m` edges:
/// the minimum over the smooth polygons with at most 12 lattice points, and
/// `13 - m` when there is none.
pub fn min_non_vertex_points(m: u32) -> i64 {
    static TABLE: OnceLock<BTreeMap<u32, i64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = BTreeMap::new();
        for poly in crate::enumerate2d::enumerate_smooth_polygons(12) {
            let p = &poly.polygon;
            let edges = p.vertices().len() as u32;
            let extra = (p.num_points() - p.vertices().len()) as i64;
            let e = t.entry(edges).or_insert(extra);
            *e = (*e).min(extra);
        }
        t
    });
    table.get(&m).copied().unwrap_or(13 - m as i64)
}

fn base_count(l: &TriangulationLabel) -> i64 {
    l.num_vertices() as i64
        + l.terms()
            .map(|(m, v)| v as i64 * min_non_vertex_points(m))
            .sum::<i64>()
}

/// Largest set of pentagon-pentagon adjacencies in which every pentagon is
/// used at most twice: each minimal pentagon has two boundary points off
/// its vertices, and each can be shared with one neighbour.
fn shared_pentagon_points(t: &Triangulation) -> i64 {
    let pent: Vec<usize> = (0..t.num_vertices())
        .filter(|&v| t.degree(v) == 5)
        .collect();
    let mut pairs = Vec::new();
    for (a, &x) in pent.iter().enumerate() {
        for &y in &pent[a + 1..] {
            if t.is_adjacent(x, y) {
                pairs.push((x, y));
            }
        }
    }
    let mut best = 0;
    for mask in 0u32..(1 << pairs.len()) {
        let mut use_count = BTreeMap::new();
        let ok = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .all(|(_, &(x, y))| {
                let a = use_count.entry(x).or_insert(0);
                *a += 1;
                let a = *a;
                let b = use_count.entry(y).or_insert(0);
                *b += 1;
                a <= 2 && *b <= 2
            });
        if ok {
            best = best.max(mask.count_ones() as i64);
        }
    }
    best
}

/// Lower bound on the lattice points of a smooth 3-polytope with label `l`:
/// its vertices plus the fewest non-vertex points each facet can carry, less
/// the points two pentagons can share, minimized over triangulations with
/// that label.
pub fn facet_point_lower_bound(l: &TriangulationLabel) -> Result<i64> {
    let n = l.num_facets() as usize;
    if !(4..=8).contains(&n) {
        return Err(Error::UnrealizableLabel(l.to_string()));
    }
    small_triangulations()[&n]
        .iter()
        .filter(|t| t.label() == *l)
        .map(|t| base_count(l) - shared_pentagon_points(t))
        .min()
        .ok_or_else(|| Error::UnrealizableLabel(l.to_string()))
}

/// The same count without a triangulation: pentagon sharing is capped by
/// what any planar arrangement of the pentagons allows.
pub fn label_point_lower_bound(l: &TriangulationLabel) -> i64 {
    let p5 = l.count(5) as i64;
    let shared = match p5 {
        0 | 1 => 0,
        2 => 1,
        _ => p5,
    };
    base_count(l) - shared
}
