//! Smooth lattice polygons up to isomorphism.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use crate::constructions::{blow_up_face, is_minimal, k_delta};
use crate::fans::{normal_fan, surface_class, SurfaceClass};
use crate::geometry::{hull, Face, LatticePolytope};
use crate::iso::{canonical_form, CanonicalForm};
use crate::lattice::{det2, LatticeVector};

/// One isomorphism class of smooth polygons.
#[derive(Clone, Debug)]
pub struct PolygonEntry {
    pub canonical: CanonicalForm,
    pub polygon: LatticePolytope,
    pub minimal: bool,
    pub fan_class: SurfaceClass,
}

impl PolygonEntry {
    fn new(canonical: CanonicalForm) -> Self {
        let polygon = canonical.polytope();
        Self {
            minimal: is_minimal(&polygon),
            fan_class: surface_class(&normal_fan(&polygon)),
            polygon,
            canonical,
        }
    }

    pub fn num_points(&self) -> usize {
        self.canonical.num_points()
    }

    pub fn num_vertices(&self) -> usize {
        self.polygon.vertices().len()
    }
}

/// Lattice points of the smooth trapezoid with bottom `a`, top `b` and height `h`.
fn trapezoid_points(a: i64, b: i64, h: i64) -> i64 {
    let r = (a - b) / h;
    (0..=h).map(|y| a - r * y + 1).sum()
}

/// Dilated triangles and smooth trapezoids with at most `budget` lattice points.
pub fn minimal_seeds(budget: usize) -> Vec<LatticePolytope> {
    let budget = budget as i64;
    let mut out = Vec::new();
    let mut k = 1;
    while (k + 1) * (k + 2) / 2 <= budget {
        out.push(k_delta(2, k).unwrap());
        k += 1;
    }
    let v = LatticeVector::new2;
    for h in 1..budget {
        if 2 * (h + 1) > budget {
            break;
        }
        for r in 0.. {
            if trapezoid_points(1 + r * h, 1, h) > budget {
                break;
            }
            for b in 1.. {
                let a = b + r * h;
                if trapezoid_points(a, b, h) > budget {
                    break;
                }
                out.push(hull(&[v(0, 0), v(a, 0), v(0, h), v(b, h)]).unwrap());
            }
        }
    }
    out
}

/// Closure of the seeds with at most `seed_budget` points under corner chops,
/// restricted to polygons with at most `max_points` points.
pub fn chop_closure(max_points: usize, seed_budget: usize) -> BTreeSet<CanonicalForm> {
    let mut seen: BTreeMap<CanonicalForm, LatticePolytope> = BTreeMap::new();
    let mut stack = Vec::new();
    for s in minimal_seeds(seed_budget) {
        let c = canonical_form(&s).expect("seeds are smooth");
        if let Entry::Vacant(slot) = seen.entry(c) {
            let p = slot.key().polytope();
            slot.insert(p.clone());
            stack.push(p);
        }
    }
    while let Some(p) = stack.pop() {
        for v in 0..p.vertices().len() {
            for k in 1.. {
                let Ok(q) = blow_up_face(&p, &Face::Vertex(v), k) else {
                    break;
                };
                let c = canonical_form(&q).expect("chops stay smooth");
                if let Entry::Vacant(slot) = seen.entry(c) {
                    let q = slot.key().polytope();
                    slot.insert(q.clone());
                    stack.push(q);
                }
            }
        }
    }
    seen.into_keys()
        .filter(|c| c.num_points() <= max_points)
        .collect()
}

/// Chop closure with the seed budget raised until the output is stable.
pub fn stable_chop_closure(max_points: usize) -> BTreeSet<CanonicalForm> {
    let mut budget = max_points;
    let mut prev = chop_closure(max_points, budget);
    loop {
        budget += 3;
        let next = chop_closure(max_points, budget);
        if next == prev {
            return next;
        }
        prev = next;
    }
}

/// All smooth polygons with at most `max_points` lattice points, by canonical form.
pub fn enumerate_smooth_polygons(max_points: usize) -> Vec<PolygonEntry> {
    stable_chop_closure(max_points)
        .into_iter()
        .map(PolygonEntry::new)
        .collect()
}

/// Angle order on directions, starting at the positive x-axis.
fn angle_cmp(a: &LatticeVector, b: &LatticeVector) -> Ordering {
    let half = |v: &LatticeVector| u8::from(!(v.get(1) > 0 || (v.get(1) == 0 && v.get(0) > 0)));
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&det2(a, b)))
}

/// Independent enumeration: walk the boundary of every smooth polygon with a
/// vertex at the origin, edges along the positive axes there, and all
/// vertices in `[0, bound]^2`.
pub fn box_search(max_points: usize, bound: i64) -> BTreeSet<CanonicalForm> {
    let mut out = BTreeSet::new();
    let start = LatticeVector::new2(1, 0);
    let last = LatticeVector::new2(0, -1);
    let mut verts = vec![LatticeVector::zero(2)];
    walk(start, &mut verts, 0, max_points, bound, &last, &mut out);
    out
}

fn walk(
    dir: LatticeVector,
    verts: &mut Vec<LatticeVector>,
    boundary: usize,
    max_points: usize,
    bound: i64,
    last: &LatticeVector,
    out: &mut BTreeSet<CanonicalForm>,
) {
    let here = *verts.last().unwrap();
    for len in 1..=bound {
        let next = here + dir.scale(len);
        if next.get(0) < 0 || next.get(1) < 0 || next.get(0) > bound || next.get(1) > bound {
            break;
        }
        let b = boundary + len as usize;
        if b >= max_points {
            break;
        }
        // close with the edge down the y-axis
        if next.get(0) == 0
            && next.get(1) > 0
            && det2(&dir, last) == 1
            && b + next.get(1) as usize <= max_points
        {
            let mut vs = verts.clone();
            vs.push(next);
            if let Ok(p) = hull(&vs) {
                if p.vertices().len() == vs.len() && p.num_points() <= max_points {
                    if let Ok(c) = canonical_form(&p) {
                        out.insert(c);
                    }
                }
            }
        }
        // turn to each direction e with det(dir, e) = 1 before the final one
        let (dx, dy) = (dir.get(0), dir.get(1));
        // particular solution of dx*ey - dy*ex = 1
        let (g, s, t) = ext_gcd(dx, -dy);
        debug_assert_eq!(g.abs(), 1);
        let base = LatticeVector::new2(t * g, s * g);
        for m in -2 * bound - 2..=2 * bound + 2 {
            let e = base + dir.scale(m);
            if e.get(0).abs() > bound || e.get(1).abs() > bound {
                continue;
            }
            if angle_cmp(&dir, &e) != Ordering::Less || angle_cmp(&e, last) != Ordering::Less {
                continue;
            }
            verts.push(next);
            walk(e, verts, b, max_points, bound, last, out);
            verts.pop();
        }
    }
}

/// `(g, s, t)` with `a s + b t = g = gcd(a, b)`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = ext_gcd(b, a % b);
        (g, t, s - (a / b) * t)
    }
}
