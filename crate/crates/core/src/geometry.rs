//! Exact convex hulls, face lattices and lattice points of 2- and 3-polytopes.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{cross, det2, rank, LatticeVector, UnimodularAffineMap};

/// The half-space `normal . x >= offset` with a primitive inner normal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FacetInequality {
    pub normal: LatticeVector,
    pub offset: i64,
}

impl FacetInequality {
    /// `normal . p - offset`; non-negative on the polytope.
    #[inline]
    pub fn slack(&self, p: &LatticeVector) -> i64 {
        self.normal.dot(p) - self.offset
    }

    #[inline]
    pub fn contains(&self, p: &LatticeVector) -> bool {
        self.slack(p) >= 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub inequality: FacetInequality,
    /// Vertex indices. In 3-D they are ordered counterclockwise as seen from
    /// outside; in 2-D the pair follows the counterclockwise boundary.
    pub vertices: Vec<usize>,
}

/// A face of a polytope named by vertex indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Face {
    Vertex(usize),
    /// Endpoints in increasing index order.
    Edge(usize, usize),
}

impl Face {
    pub fn edge(a: usize, b: usize) -> Self {
        Face::Edge(a.min(b), a.max(b))
    }

    pub fn vertices(&self) -> Vec<usize> {
        match *self {
            Face::Vertex(v) => vec![v],
            Face::Edge(a, b) => vec![a, b],
        }
    }
}

/// A full-dimensional convex lattice polytope in Z^2 or Z^3.
///
/// Immutable once built; the face lattice and the lattice points are computed
/// eagerly by [`hull`].
#[derive(Clone)]
pub struct LatticePolytope {
    dim: usize,
    vertices: Vec<LatticeVector>,
    facets: Vec<Facet>,
    edges: Vec<(usize, usize)>,
    vertex_facets: Vec<Vec<usize>>,
    neighbors: Vec<Vec<usize>>,
    points: Vec<LatticeVector>,
}

impl fmt::Debug for LatticePolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LatticePolytope")
            .field("dim", &self.dim)
            .field("vertices", &self.vertices)
            .finish()
    }
}

impl PartialEq for LatticePolytope {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl Eq for LatticePolytope {}

/// Convex hull of a finite point set of full affine dimension.
pub fn hull(points: &[LatticeVector]) -> Result<LatticePolytope> {
    let first = points.first().ok_or(Error::Empty)?;
    let dim = first.dim();
    for p in points {
        p.check_dim(dim)?;
    }
    let mut pts: Vec<LatticeVector> = points.to_vec();
    pts.sort_unstable();
    pts.dedup();

    let diffs: Vec<LatticeVector> = pts.iter().map(|p| *p - pts[0]).collect();
    let found = rank(&diffs);
    if found != dim {
        return Err(Error::Degenerate {
            found,
            ambient: dim,
        });
    }

    let inequalities = if dim == 2 {
        facets_2d(&pts)
    } else {
        facets_3d(&pts)
    };

    let vertices: Vec<LatticeVector> = pts
        .iter()
        .copied()
        .filter(|p| {
            let active: Vec<LatticeVector> = inequalities
                .iter()
                .filter(|f| f.slack(p) == 0)
                .map(|f| f.normal)
                .collect();
            rank(&active) == dim
        })
        .collect();

    Ok(LatticePolytope::assemble(dim, vertices, inequalities))
}

/// Candidate half-spaces through pairs of points; keeps the supporting ones.
fn facets_2d(pts: &[LatticeVector]) -> Vec<FacetInequality> {
    let mut out = BTreeSet::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = pts[j] - pts[i];
            let (n, _) = LatticeVector::new2(-d.get(1), d.get(0))
                .primitive()
                .expect("points are distinct");
            push_if_supporting(&mut out, pts, n, pts[i]);
        }
    }
    out.into_iter().collect()
}

fn facets_3d(pts: &[LatticeVector]) -> Vec<FacetInequality> {
    let mut out = BTreeSet::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let a = pts[j] - pts[i];
            for k in j + 1..pts.len() {
                let c = cross(&a, &(pts[k] - pts[i]));
                if c.is_zero() {
                    continue;
                }
                let (n, _) = c.primitive().expect("nonzero");
                let candidate = FacetInequality {
                    normal: n,
                    offset: n.dot(&pts[i]),
                };
                if out.contains(&candidate) || out.contains(&negate(candidate)) {
                    continue;
                }
                push_if_supporting(&mut out, pts, n, pts[i]);
            }
        }
    }
    out.into_iter().collect()
}

fn negate(f: FacetInequality) -> FacetInequality {
    FacetInequality {
        normal: -f.normal,
        offset: -f.offset,
    }
}

fn push_if_supporting(
    out: &mut BTreeSet<FacetInequality>,
    pts: &[LatticeVector],
    n: LatticeVector,
    base: LatticeVector,
) {
    let c = n.dot(&base);
    let (mut pos, mut neg) = (false, false);
    for p in pts {
        match (n.dot(p) - c).cmp(&0) {
            Ordering::Greater => pos = true,
            Ordering::Less => neg = true,
            Ordering::Equal => {}
        }
        if pos && neg {
            return;
        }
    }
    if !neg {
        out.insert(FacetInequality {
            normal: n,
            offset: c,
        });
    } else {
        out.insert(FacetInequality {
            normal: -n,
            offset: -c,
        });
    }
}

/// Sorts `idx` counterclockwise around their centroid, looking against `outer`
/// (3-D) or in the standard orientation (2-D, `outer` ignored).
fn cyclic_order(vertices: &[LatticeVector], idx: &mut [usize], outer: Option<LatticeVector>) {
    let m = idx.len() as i64;
    let dim = vertices[0].dim();
    let sum = idx
        .iter()
        .fold(LatticeVector::zero(dim), |acc, &i| acc + vertices[i]);
    let rel: BTreeMap<usize, (i64, i64)> = {
        let r0 = vertices[idx[0]].scale(m) - sum;
        idx.iter()
            .map(|&i| {
                let r = vertices[i].scale(m) - sum;
                let xy = match outer {
                    Some(o) => (r.dot(&r0), r.dot(&cross(&o, &r0))),
                    None => (r.dot(&r0), det2(&r0, &r)),
                };
                (i, xy)
            })
            .collect()
    };
    let half = |(x, y): (i64, i64)| if y > 0 || (y == 0 && x > 0) { 0 } else { 1 };
    idx.sort_by(|a, b| {
        let (pa, pb) = (rel[a], rel[b]);
        half(pa)
            .cmp(&half(pb))
            .then_with(|| 0.cmp(&(pa.0 * pb.1 - pa.1 * pb.0)))
    });
}

impl LatticePolytope {
    fn assemble(
        dim: usize,
        mut vertices: Vec<LatticeVector>,
        inequalities: Vec<FacetInequality>,
    ) -> Self {
        vertices.sort_unstable();
        let vertex_facets: Vec<Vec<usize>> = vertices
            .iter()
            .map(|v| {
                inequalities
                    .iter()
                    .enumerate()
                    .filter(|(_, f)| f.slack(v) == 0)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();

        let mut facets: Vec<Facet> = inequalities
            .iter()
            .enumerate()
            .map(|(fi, ineq)| {
                let mut vs: Vec<usize> = (0..vertices.len())
                    .filter(|&v| vertex_facets[v].contains(&fi))
                    .collect();
                if dim == 3 {
                    cyclic_order(&vertices, &mut vs, Some(-ineq.normal));
                }
                Facet {
                    inequality: *ineq,
                    vertices: vs,
                }
            })
            .collect();

        let mut edges = Vec::new();
        if dim == 2 {
            let mut cycle: Vec<usize> = (0..vertices.len()).collect();
            cyclic_order(&vertices, &mut cycle, None);
            for k in 0..cycle.len() {
                let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
                edges.push((a.min(b), a.max(b)));
            }
            for f in &mut facets {
                // orient each edge along the counterclockwise boundary
                let (a, b) = (f.vertices[0], f.vertices[1]);
                let pa = cycle.iter().position(|&x| x == a).unwrap();
                if cycle[(pa + 1) % cycle.len()] != b {
                    f.vertices.swap(0, 1);
                }
            }
        } else {
            for a in 0..vertices.len() {
                for b in a + 1..vertices.len() {
                    let shared = vertex_facets[a]
                        .iter()
                        .filter(|f| vertex_facets[b].contains(f))
                        .count();
                    if shared >= 2 {
                        edges.push((a, b));
                    }
                }
            }
        }
        edges.sort_unstable();

        let mut neighbors = vec![Vec::new(); vertices.len()];
        for &(a, b) in &edges {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }

        let points = scan_points(dim, &vertices, &inequalities);

        Self {
            dim,
            vertices,
            facets,
            edges,
            vertex_facets,
            neighbors,
            points,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[LatticeVector] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> LatticeVector {
        self.vertices[i]
    }

    pub fn vertex_index(&self, p: &LatticeVector) -> Option<usize> {
        self.vertices.binary_search(p).ok()
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn inequalities(&self) -> impl Iterator<Item = &FacetInequality> {
        self.facets.iter().map(|f| &f.inequality)
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Indices of the facets through vertex `v`.
    pub fn facets_at(&self, v: usize) -> &[usize] {
        &self.vertex_facets[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    /// Primitive directions of the edges leaving vertex `v`.
    pub fn edge_directions(&self, v: usize) -> Vec<LatticeVector> {
        self.neighbors[v]
            .iter()
            .map(|&w| (self.vertices[w] - self.vertices[v]).primitive().unwrap().0)
            .collect()
    }

    /// Facets containing every vertex of `face`.
    pub fn facets_containing(&self, face: &Face) -> Vec<usize> {
        let vs = face.vertices();
        self.vertex_facets[vs[0]]
            .iter()
            .copied()
            .filter(|f| vs.iter().all(|&v| self.vertex_facets[v].contains(f)))
            .collect()
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    /// Vertex indices of a 2-D polygon in counterclockwise order.
    pub fn polygon_cycle(&self) -> Vec<usize> {
        assert_eq!(self.dim, 2);
        let mut cycle = vec![self.facets[0].vertices[0]];
        while cycle.len() < self.vertices.len() {
            let last = *cycle.last().unwrap();
            let f = self
                .facets
                .iter()
                .find(|f| f.vertices[0] == last)
                .expect("closed boundary");
            cycle.push(f.vertices[1]);
        }
        // start from the lexicographically smallest vertex
        let start = cycle.iter().position(|&v| v == 0).unwrap();
        cycle.rotate_left(start);
        cycle
    }

    /// All lattice points, sorted lexicographically.
    pub fn lattice_points(&self) -> &[LatticeVector] {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn contains(&self, p: &LatticeVector) -> bool {
        p.dim() == self.dim && self.inequalities().all(|f| f.contains(p))
    }

    /// (vertices, edges, facets).
    pub fn f_vector(&self) -> (usize, usize, usize) {
        (self.vertices.len(), self.edges.len(), self.facets.len())
    }

    /// Number of lattice segments on the edge between vertices `a` and `b`.
    pub fn edge_lattice_length(&self, a: usize, b: usize) -> Result<i64> {
        if a >= self.vertices.len() || b >= self.vertices.len() || !self.is_edge(a, b) {
            return Err(Error::NotAFace(format!("({a},{b}) is not an edge")));
        }
        Ok((self.vertices[b] - self.vertices[a]).content())
    }

    /// Every vertex lies on exactly `dim` edges.
    pub fn is_simple(&self) -> bool {
        self.neighbors.iter().all(|n| n.len() == self.dim)
    }

    /// In a 3-polytope, whether facet `f` is a smooth polygon in its own
    /// affine lattice: at each vertex the two primitive edge directions span
    /// the lattice of the facet plane.
    pub fn facet_is_smooth(&self, f: usize) -> bool {
        assert_eq!(self.dim, 3);
        let facet = &self.facets[f];
        let n = facet.inequality.normal;
        let k = facet.vertices.len();
        (0..k).all(|i| {
            let v = self.vertices[facet.vertices[i]];
            let prev = self.vertices[facet.vertices[(i + k - 1) % k]];
            let next = self.vertices[facet.vertices[(i + 1) % k]];
            let d1 = (next - v).primitive().unwrap().0;
            let d2 = (prev - v).primitive().unwrap().0;
            let c = cross(&d1, &d2);
            c == n || c == -n
        })
    }

    /// Lattice points of facet `f` (3-D).
    pub fn facet_points(&self, f: usize) -> Vec<LatticeVector> {
        let ineq = self.facets[f].inequality;
        self.points
            .iter()
            .copied()
            .filter(|p| ineq.slack(p) == 0)
            .collect()
    }

    /// Image under a unimodular affine map.
    pub fn image(&self, m: &UnimodularAffineMap) -> LatticePolytope {
        let vs: Vec<LatticeVector> = self.vertices.iter().map(|v| m.apply_unchecked(v)).collect();
        hull(&vs).expect("unimodular image stays full-dimensional")
    }

    pub fn translate(&self, t: LatticeVector) -> LatticePolytope {
        self.image(&UnimodularAffineMap::translation_by(t))
    }
}

fn scan_points(
    dim: usize,
    vertices: &[LatticeVector],
    ineqs: &[FacetInequality],
) -> Vec<LatticeVector> {
    let mut lo = [i64::MAX; 3];
    let mut hi = [i64::MIN; 3];
    for v in vertices {
        for i in 0..dim {
            lo[i] = lo[i].min(v.get(i));
            hi[i] = hi[i].max(v.get(i));
        }
    }
    let mut out = Vec::new();
    let (zlo, zhi) = if dim == 3 { (lo[2], hi[2]) } else { (0, 0) };
    for x in lo[0]..=hi[0] {
        for y in lo[1]..=hi[1] {
            for z in zlo..=zhi {
                let p = if dim == 3 {
                    LatticeVector::new3(x, y, z)
                } else {
                    LatticeVector::new2(x, y)
                };
                if ineqs.iter().all(|f| f.contains(&p)) {
                    out.push(p);
                }
            }
        }
    }
    out
}
