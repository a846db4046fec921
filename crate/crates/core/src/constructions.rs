//! Dilated simplices, Cayley polytopes, blow-ups and blow-downs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fans::{is_smooth, normal_fan};
use crate::geometry::{hull, Face, FacetInequality, LatticePolytope};
use crate::lattice::LatticeVector;

/// How a Cayley-type catalog entry is built.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CayleyRecipe {
    /// `k` times the standard simplex.
    Simplex { k: i64 },
    /// Three parallel segments of lengths `i >= j >= k` at height `s`.
    Segments { s: i64, i: i64, j: i64, k: i64 },
    /// Two strictly isomorphic polygons at heights 0 and `s`, the second one
    /// translated by `t`. `base` names the common normal fan.
    Pair {
        s: i64,
        base: String,
        p0: Vec<LatticeVector>,
        p1: Vec<LatticeVector>,
        t: LatticeVector,
    },
}

impl CayleyRecipe {
    pub fn build(&self) -> Result<LatticePolytope> {
        match self {
            CayleyRecipe::Simplex { k } => k_delta(3, *k),
            CayleyRecipe::Segments { s, i, j, k } => cayley_segments(*s, *i, *j, *k),
            CayleyRecipe::Pair { s, p0, p1, t, .. } => cayley_pair(&hull(p0)?, &hull(p1)?, *s, *t),
        }
    }
}

fn positive(name: &str, x: i64) -> Result<()> {
    if x < 1 {
        return Err(Error::Parse {
            what: name.into(),
            reason: format!("{x} is not a positive integer"),
        });
    }
    Ok(())
}

/// `conv(0, k e_1, ..., k e_d)`.
pub fn k_delta(d: usize, k: i64) -> Result<LatticePolytope> {
    if !(2..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    positive("k", k)?;
    let mut pts = vec![LatticeVector::zero(d)];
    pts.extend((0..d).map(|i| LatticeVector::unit(d, i).scale(k)));
    hull(&pts)
}

/// `conv([0,i] x (0,0), [0,j] x (s,0), [0,k] x (0,s))`.
pub fn cayley_segments(s: i64, i: i64, j: i64, k: i64) -> Result<LatticePolytope> {
    for (n, x) in [("s", s), ("i", i), ("j", j), ("k", k)] {
        positive(n, x)?;
    }
    let v = LatticeVector::new3;
    hull(&[
        v(0, 0, 0),
        v(i, 0, 0),
        v(0, s, 0),
        v(j, s, 0),
        v(0, 0, s),
        v(k, 0, s),
    ])
}

/// Divisibility criterion for smoothness of [`cayley_segments`].
pub fn segments_smooth(s: i64, i: i64, j: i64, k: i64) -> bool {
    (j - i) % s == 0 && (k - i) % s == 0 && (k - j) % s == 0
}

/// Vertex pairs `(v0, v1)` of two strictly isomorphic polygons with the same
/// normal cone.
fn matched_vertices(
    p0: &LatticePolytope,
    p1: &LatticePolytope,
) -> Result<Vec<(LatticeVector, LatticeVector)>> {
    if p0.dim() != 2 || p1.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: if p0.dim() != 2 { p0.dim() } else { p1.dim() },
        });
    }
    if normal_fan(p0) != normal_fan(p1) {
        return Err(Error::NotStrictlyIsomorphic);
    }
    let cone = |p: &LatticePolytope, v: usize| {
        let mut n: Vec<LatticeVector> = p
            .facets_at(v)
            .iter()
            .map(|&f| p.facets()[f].inequality.normal)
            .collect();
        n.sort_unstable();
        n
    };
    Ok((0..p0.vertices().len())
        .map(|a| {
            let c = cone(p0, a);
            let b = (0..p1.vertices().len())
                .find(|&b| cone(p1, b) == c)
                .expect("equal fans");
            (p0.vertex(a), p1.vertex(b))
        })
        .collect())
}

/// `conv(P0 x {0}, (P1 + t) x {s})` for strictly isomorphic polygons.
pub fn cayley_pair(
    p0: &LatticePolytope,
    p1: &LatticePolytope,
    s: i64,
    t: LatticeVector,
) -> Result<LatticePolytope> {
    positive("s", s)?;
    t.check_dim(2)?;
    matched_vertices(p0, p1)?;
    let mut pts: Vec<LatticeVector> = p0.vertices().iter().map(|v| v.extend3(0)).collect();
    pts.extend(p1.vertices().iter().map(|v| (*v + t).extend3(s)));
    hull(&pts)
}

/// Smoothness of [`cayley_pair`] from the edge criterion: every connecting
/// edge carries `s + 1` lattice points.
pub fn pair_smooth(
    p0: &LatticePolytope,
    p1: &LatticePolytope,
    s: i64,
    t: LatticeVector,
) -> Result<bool> {
    positive("s", s)?;
    let pairs = matched_vertices(p0, p1)?;
    let divisible = pairs.iter().all(|(a, b)| {
        let d = *b + t - *a;
        d.get(0) % s == 0 && d.get(1) % s == 0
    });
    if !divisible {
        return Ok(false);
    }
    let p = cayley_pair(p0, p1, s, t)?;
    Ok(p.vertices().len() == 2 * pairs.len())
}

/// Faces that can be blown up: vertices, and edges in dimension 3.
pub fn blowup_faces(p: &LatticePolytope) -> Vec<Face> {
    let mut out: Vec<Face> = (0..p.vertices().len()).map(Face::Vertex).collect();
    if p.dim() == 3 {
        out.extend(p.edges().iter().map(|&(a, b)| Face::Edge(a, b)));
    }
    out
}

/// The inequality cutting off `face` at level `k`.
pub fn exceptional_inequality(p: &LatticePolytope, face: &Face, k: i64) -> FacetInequality {
    let fs = p.facets_containing(face);
    let mut normal = LatticeVector::zero(p.dim());
    let mut offset = 0;
    for f in fs {
        normal = normal + p.facets()[f].inequality.normal;
        offset += p.facets()[f].inequality.offset;
    }
    FacetInequality {
        normal,
        offset: offset + k,
    }
}

fn check_face(p: &LatticePolytope, face: &Face) -> Result<()> {
    let n = p.vertices().len();
    match *face {
        Face::Vertex(v) if v < n => Ok(()),
        Face::Edge(a, b) if p.dim() == 3 && a < n && b < n && p.is_edge(a, b) => Ok(()),
        _ => Err(Error::NotAFace(format!("{face:?}"))),
    }
}

/// `Bl_F^k(P)`: truncation of `face` at lattice depth `k`.
pub fn blow_up_face(p: &LatticePolytope, face: &Face, k: i64) -> Result<LatticePolytope> {
    check_face(p, face)?;
    let invalid = |reason: &str| Error::InvalidBlowUp {
        level: k,
        reason: reason.to_string(),
    };
    if k < 1 {
        return Err(invalid("level must be positive"));
    }
    if !is_smooth(p) {
        return Err(Error::NotSmooth("blow-ups need a smooth polytope".into()));
    }
    let cut = exceptional_inequality(p, face, k);
    let in_face = face.vertices();
    let mut verts = Vec::new();
    for (w, &x) in p.vertices().iter().enumerate() {
        if in_face.contains(&w) {
            continue;
        }
        if cut.slack(&x) <= 0 {
            return Err(invalid("the cut reaches another vertex"));
        }
        verts.push(x);
    }
    for &w in &in_face {
        let x = p.vertex(w);
        for &u in p.neighbors(w) {
            if in_face.contains(&u) {
                continue;
            }
            let (dir, len) = (p.vertex(u) - x).primitive()?;
            let rate = cut.normal.dot(&dir);
            let depth = -cut.slack(&x);
            if rate <= 0 || depth % rate != 0 {
                return Err(invalid("the new vertex is not a lattice point"));
            }
            if depth / rate >= len {
                return Err(invalid("the cut consumes an edge"));
            }
            verts.push(x + dir.scale(depth / rate));
        }
    }
    let q = hull(&verts)?;
    let expected_sides = if in_face.len() == 1 { p.dim() } else { 4 };
    let new_facet = q.facets().iter().find(|f| f.inequality == cut);
    let ok = new_facet.is_some_and(|f| f.vertices.len() == expected_sides)
        && q.facets().len() == p.facets().len() + 1
        && q.vertices().len()
            == p.vertices().len() - in_face.len() + in_face.len() * (p.dim() - in_face.len() + 1)
        && is_smooth(&q);
    if !ok {
        return Err(invalid("the truncation is not a smooth blow-up"));
    }
    Ok(q)
}

fn det_i128(d: usize, f: &dyn Fn(usize, usize) -> i128) -> i128 {
    if d == 2 {
        f(0, 0) * f(1, 1) - f(0, 1) * f(1, 0)
    } else {
        f(0, 0) * (f(1, 1) * f(2, 2) - f(1, 2) * f(2, 1))
            - f(0, 1) * (f(1, 0) * f(2, 2) - f(1, 2) * f(2, 0))
            + f(0, 2) * (f(1, 0) * f(2, 1) - f(1, 1) * f(2, 0))
    }
}

/// Common point of the hyperplanes `n_i . x = c_i` as numerators over a
/// positive denominator; `None` if they do not meet in a single point.
fn intersect(ineqs: &[&FacetInequality]) -> Option<(Vec<i128>, i128)> {
    let d = ineqs.len();
    let m = |r: usize, c: usize| ineqs[r].normal.get(c) as i128;
    let base = det_i128(d, &m);
    if base == 0 {
        return None;
    }
    let sign = base.signum();
    let nums = (0..d)
        .map(|i| {
            sign * det_i128(d, &|r, c| {
                if c == i {
                    ineqs[r].offset as i128
                } else {
                    m(r, c)
                }
            })
        })
        .collect();
    Some((nums, base.abs()))
}

/// Undoes a blow-up whose exceptional facet is `facet`, if there is one.
pub fn blow_down(p: &LatticePolytope, facet: usize) -> Option<LatticePolytope> {
    if !is_smooth(p) || facet >= p.facets().len() {
        return None;
    }
    let removed = p.facets()[facet].inequality;
    let rest: Vec<&FacetInequality> = p
        .inequalities()
        .enumerate()
        .filter(|&(i, _)| i != facet)
        .map(|(_, f)| f)
        .collect();
    let d = p.dim();
    let mut verts = Vec::new();
    for subset in crate::fans::combinations(&(0..rest.len()).collect::<Vec<_>>(), d) {
        let sel: Vec<&FacetInequality> = subset.iter().map(|&i| rest[i]).collect();
        let Some((nums, den)) = intersect(&sel) else {
            continue;
        };
        let feasible = rest.iter().all(|f| {
            let dot: i128 = (0..d).map(|c| f.normal.get(c) as i128 * nums[c]).sum();
            dot >= f.offset as i128 * den
        });
        if !feasible {
            continue;
        }
        if nums.iter().any(|x| x % den != 0) {
            // the coarsened polytope has a non-lattice vertex
            return None;
        }
        let x: Vec<i64> = nums.iter().map(|x| (x / den) as i64).collect();
        verts.push(LatticeVector::new(&x).unwrap());
    }
    verts.sort_unstable();
    verts.dedup();
    let q = hull(&verts).ok()?;
    // bounded with exactly the remaining facets
    let mut have: Vec<FacetInequality> = q.inequalities().copied().collect();
    let mut want: Vec<FacetInequality> = rest.iter().map(|f| **f).collect();
    have.sort_unstable();
    want.sort_unstable();
    if have != want || !is_smooth(&q) {
        return None;
    }
    let cut: Vec<usize> = (0..q.vertices().len())
        .filter(|&v| removed.slack(&q.vertex(v)) < 0)
        .collect();
    let face = match cut[..] {
        [v] => Face::Vertex(v),
        [a, b] if d == 3 && q.is_edge(a, b) => Face::Edge(a, b),
        _ => return None,
    };
    let ex = exceptional_inequality(&q, &face, 0);
    let k = removed.offset - ex.offset;
    if ex.normal != removed.normal || k < 1 {
        return None;
    }
    match blow_up_face(&q, &face, k) {
        Ok(b) if b == *p => Some(q),
        _ => None,
    }
}

/// Exceptional facets of `p` with their blow-downs.
pub fn blow_downs(p: &LatticePolytope) -> Vec<(usize, LatticePolytope)> {
    (0..p.facets().len())
        .filter_map(|f| blow_down(p, f).map(|q| (f, q)))
        .collect()
}

/// Not a blow-up of another smooth polytope along a face.
pub fn is_minimal(p: &LatticePolytope) -> bool {
    (0..p.facets().len()).all(|f| blow_down(p, f).is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fans::{stellar_subdivide, Cone};
    use proptest::prelude::*;

    fn v2(x: i64, y: i64) -> LatticeVector {
        LatticeVector::new2(x, y)
    }
    fn v3(x: i64, y: i64, z: i64) -> LatticeVector {
        LatticeVector::new3(x, y, z)
    }

    /// Counts lattice points slice by slice: the segments polytope at height
    /// (a, b) with a + b <= s is a segment whose length interpolates i, j, k.
    fn segments_points_by_slices(s: i64, i: i64, j: i64, k: i64) -> usize {
        let mut n = 0;
        for a in 0..=s {
            for b in 0..=(s - a) {
                let c = s - a - b;
                let num = c * i + a * j + b * k;
                n += (num / s + 1) as usize;
            }
        }
        n
    }

    #[test]
    fn dilated_simplices() {
        assert_eq!(k_delta(3, 1).unwrap().num_points(), 4);
        assert_eq!(k_delta(3, 2).unwrap().num_points(), 10);
        assert_eq!(k_delta(3, 3).unwrap().num_points(), 20);
        assert_eq!(k_delta(2, 3).unwrap().num_points(), 10);
        assert!(k_delta(4, 1).is_err());
        assert!(k_delta(3, 0).is_err());
    }

    #[test]
    fn segment_cayley_point_counts() {
        assert_eq!(cayley_segments(2, 3, 1, 1).unwrap().num_points(), 16);
        assert_eq!(cayley_segments(2, 2, 2, 2).unwrap().num_points(), 18);
        assert_eq!(cayley_segments(2, 1, 1, 1).unwrap().num_points(), 12);
        for i in 1..=11 {
            for j in 1..=i {
                for k in 1..=j {
                    let p = cayley_segments(1, i, j, k).unwrap();
                    assert_eq!(p.num_points() as i64, i + j + k + 3);
                    assert_eq!(p.num_points(), segments_points_by_slices(1, i, j, k));
                }
            }
        }
    }

    #[test]
    fn segment_smoothness_agrees_with_vertex_test() {
        assert!(segments_smooth(1, 5, 3, 2));
        assert!(segments_smooth(2, 3, 1, 1));
        assert!(!segments_smooth(2, 2, 1, 1));
        for s in 1..=4 {
            for i in 1..=7 {
                for j in 1..=i {
                    for k in 1..=j {
                        let p = cayley_segments(s, i, j, k).unwrap();
                        assert_eq!(
                            segments_smooth(s, i, j, k),
                            is_smooth(&p),
                            "{s} {i} {j} {k}"
                        );
                        if s <= 2 && segments_smooth(s, i, j, k) {
                            assert_eq!(p.num_points(), segments_points_by_slices(s, i, j, k));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pair_examples() {
        let d1 = k_delta(2, 1).unwrap();
        let d2 = k_delta(2, 2).unwrap();
        let prism = cayley_pair(&d1, &d1, 4, v2(0, 0)).unwrap();
        assert_eq!(prism.num_points(), 15);
        assert!(pair_smooth(&d1, &d1, 4, v2(0, 0)).unwrap());
        assert!(pair_smooth(&d2, &d1, 1, v2(0, 0)).unwrap());
        assert!(!pair_smooth(&d2, &d1, 2, v2(0, 0)).unwrap());
        assert!(!is_smooth(&cayley_pair(&d2, &d1, 2, v2(0, 0)).unwrap()));
        let square = hull(&[v2(0, 0), v2(1, 0), v2(0, 1), v2(1, 1)]).unwrap();
        assert_eq!(
            cayley_pair(&d1, &square, 1, v2(0, 0)),
            Err(Error::NotStrictlyIsomorphic)
        );
        let a = cayley_pair(&d2, &d2, 2, v2(0, 0)).unwrap();
        let b = cayley_segments(2, 2, 2, 2).unwrap();
        assert!(crate::iso::are_isomorphic(&a, &b));
    }

    #[test]
    fn pair_smoothness_agrees_with_vertex_test() {
        let polys = [
            k_delta(2, 1).unwrap(),
            k_delta(2, 2).unwrap(),
            k_delta(2, 3).unwrap(),
            hull(&[v2(0, 0), v2(2, 0), v2(0, 1), v2(1, 1)]).unwrap(),
            hull(&[v2(0, 0), v2(3, 0), v2(0, 1), v2(1, 1)]).unwrap(),
        ];
        for p0 in &polys {
            for p1 in &polys {
                for s in 1..=3 {
                    for tx in 0..s {
                        for ty in 0..s {
                            let t = v2(tx, ty);
                            match pair_smooth(p0, p1, s, t) {
                                Ok(b) => {
                                    assert_eq!(b, is_smooth(&cayley_pair(p0, p1, s, t).unwrap()))
                                }
                                Err(e) => assert_eq!(e, Error::NotStrictlyIsomorphic),
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn simplex_vertex_blow_ups() {
        let p = k_delta(3, 3).unwrap();
        let o = Face::Vertex(p.vertex_index(&v3(0, 0, 0)).unwrap());
        let b1 = blow_up_face(&p, &o, 1).unwrap();
        assert_eq!(b1.num_points(), 19);
        let b2 = blow_up_face(&p, &o, 2).unwrap();
        assert_eq!(b2.num_points(), 16);
        assert!(matches!(
            blow_up_face(&p, &o, 3),
            Err(Error::InvalidBlowUp { level: 3, .. })
        ));
        assert_eq!(b1.f_vector(), (6, 9, 5));
        // the exceptional facet is a triangle
        assert!(b1
            .facets()
            .iter()
            .any(|f| f.inequality.normal == v3(1, 1, 1) && f.vertices.len() == 3));
    }

    #[test]
    fn edge_blow_up_adds_quadrilateral() {
        let p = k_delta(3, 3).unwrap();
        let a = p.vertex_index(&v3(0, 0, 0)).unwrap();
        let b = p.vertex_index(&v3(3, 0, 0)).unwrap();
        let q = blow_up_face(&p, &Face::edge(a, b), 1).unwrap();
        assert_eq!(q.f_vector(), (6, 9, 5));
        assert!(q
            .facets()
            .iter()
            .any(|f| f.inequality.normal == v3(0, 1, 1) && f.vertices.len() == 4));
        assert!(blow_up_face(&p, &Face::edge(a, a), 1).is_err());
    }

    #[test]
    fn blow_down_examples() {
        let p = k_delta(3, 3).unwrap();
        let o = Face::Vertex(p.vertex_index(&v3(0, 0, 0)).unwrap());
        let b1 = blow_up_face(&p, &o, 1).unwrap();
        let ex = b1
            .facets()
            .iter()
            .position(|f| f.inequality.normal == v3(1, 1, 1))
            .unwrap();
        assert_eq!(blow_down(&b1, ex), Some(p.clone()));
        let d3 = k_delta(3, 1).unwrap();
        assert!(is_minimal(&d3));
        assert!(is_minimal(&cayley_segments(1, 1, 1, 1).unwrap()));
        assert!(!is_minimal(&b1));
        // cutting an edge of 3 * simplex at depth one gives the s = 2 segments polytope
        let c = cayley_segments(2, 3, 1, 1).unwrap();
        let downs = blow_downs(&c);
        assert_eq!(downs.len(), 1);
        assert!(crate::iso::are_isomorphic(
            &downs[0].1,
            &k_delta(3, 3).unwrap()
        ));
    }

    #[test]
    fn four_vertex_blow_up_of_triple_simplex() {
        let mut p = k_delta(3, 3).unwrap();
        for c in [v3(0, 0, 0), v3(3, 0, 0), v3(0, 3, 0), v3(0, 0, 3)] {
            let v = p.vertex_index(&c).unwrap();
            p = blow_up_face(&p, &Face::Vertex(v), 1).unwrap();
        }
        assert_eq!(p.num_points(), 16);
        assert_eq!(p.f_vector(), (12, 18, 8));
        assert!(!is_minimal(&p));
        assert_eq!(blow_downs(&p).len(), 4);
        assert_eq!(crate::fans::blowdown_candidates(&normal_fan(&p)).len(), 4);
    }

    #[test]
    fn polygon_corner_chops() {
        let p = k_delta(2, 3).unwrap();
        let q = blow_up_face(&p, &Face::Vertex(0), 1).unwrap();
        assert_eq!(q.num_points(), 9);
        assert_eq!(q.vertices().len(), 4);
        assert!(!is_minimal(&q));
        assert!(is_minimal(&p));
        assert!(blow_up_face(&p, &Face::Vertex(0), 3).is_err());
    }

    fn smooth_corpus() -> Vec<LatticePolytope> {
        let mut out = vec![
            k_delta(3, 1).unwrap(),
            k_delta(3, 2).unwrap(),
            k_delta(3, 3).unwrap(),
        ];
        for (s, i, j, k) in [
            (1, 2, 1, 1),
            (1, 3, 2, 1),
            (2, 3, 1, 1),
            (1, 4, 4, 2),
            (3, 4, 1, 1),
        ] {
            out.push(cayley_segments(s, i, j, k).unwrap());
        }
        out
    }

    #[test]
    fn blow_up_matches_stellar_subdivision_and_round_trips() {
        for p in smooth_corpus() {
            let fan = normal_fan(&p);
            for face in blowup_faces(&p) {
                let normals: Vec<LatticeVector> = p
                    .facets_containing(&face)
                    .iter()
                    .map(|&f| p.facets()[f].inequality.normal)
                    .collect();
                let sigma = Cone::new(normals).unwrap();
                for k in 1.. {
                    let Ok(q) = blow_up_face(&p, &face, k) else {
                        break;
                    };
                    assert_eq!(q.vertices().len(), p.vertices().len() + 2);
                    assert_eq!(q.facets().len(), p.facets().len() + 1);
                    assert_eq!(normal_fan(&q), stellar_subdivide(&fan, &sigma).unwrap());
                    let ex = exceptional_inequality(&p, &face, k);
                    let fi = q.facets().iter().position(|f| f.inequality == ex).unwrap();
                    assert_eq!(blow_down(&q, fi), Some(p.clone()));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn segments_point_count(i in 1i64..12, dj in 0i64..12, dk in 0i64..12) {
            let j = (i - dj).max(1);
            let k = (j - dk).max(1);
            let p = cayley_segments(1, i, j, k).unwrap();
            prop_assert_eq!(p.num_points() as i64, i + j + k + 3);
        }
    }
}
