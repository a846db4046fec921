//! Complete simplicial fans: normal fans, unimodularity, Hirzebruch fans and
//! stellar subdivisions.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::geometry::LatticePolytope;
use crate::lattice::{det, LatticeVector};

/// A cone given by primitive generators, stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cone {
    generators: Vec<LatticeVector>,
}

impl Cone {
    pub fn new(generators: Vec<LatticeVector>) -> Result<Self> {
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            gens.push(g.primitive()?.0);
        }
        gens.sort_unstable();
        gens.dedup();
        Ok(Self { generators: gens })
    }

    pub fn generators(&self) -> &[LatticeVector] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    /// Sum of the generators (the unimodular subdivision direction).
    pub fn generator_sum(&self) -> LatticeVector {
        let d = self.generators[0].dim();
        self.generators
            .iter()
            .fold(LatticeVector::zero(d), |a, g| a + *g)
    }
}

/// A complete fan stored through its maximal cones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fan {
    dim: usize,
    rays: Vec<LatticeVector>,
    /// Maximal cones as sorted ray-index lists, sorted.
    cones: Vec<Vec<usize>>,
}

impl Fan {
    /// Builds a fan from maximal cones; ray and cone order is canonical.
    pub fn from_cones(dim: usize, cones: &[Vec<LatticeVector>]) -> Result<Self> {
        let mut rays = BTreeSet::new();
        let mut prim = Vec::new();
        for c in cones {
            let mut g = Vec::new();
            for r in c {
                r.check_dim(dim)?;
                let p = r.primitive()?.0;
                rays.insert(p);
                g.push(p);
            }
            prim.push(g);
        }
        let rays: Vec<LatticeVector> = rays.into_iter().collect();
        let mut idx: Vec<Vec<usize>> = prim
            .iter()
            .map(|c| {
                let mut v: Vec<usize> = c.iter().map(|r| rays.binary_search(r).unwrap()).collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        idx.sort_unstable();
        idx.dedup();
        Ok(Self {
            dim,
            rays,
            cones: idx,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn maximal_cones(&self) -> Vec<Cone> {
        self.cones
            .iter()
            .map(|c| Cone {
                generators: c.iter().map(|&i| self.rays[i]).collect(),
            })
            .collect()
    }

    pub fn cone_indices(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones.iter().all(|c| c.len() == self.dim)
    }

    /// Every maximal cone is generated by a lattice basis.
    pub fn is_unimodular(&self) -> bool {
        self.cones.iter().all(|c| {
            c.len() == self.dim && {
                let g: Vec<LatticeVector> = c.iter().map(|&i| self.rays[i]).collect();
                det(&g).unwrap().abs() == 1
            }
        })
    }

    /// Completeness of a simplicial fan: every codimension-one face of a
    /// maximal cone is shared by exactly one other maximal cone lying on the
    /// opposite side, and a generic direction lies in exactly one cone.
    pub fn is_complete(&self) -> bool {
        if !self.is_simplicial() {
            return false;
        }
        let mut walls: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (ci, c) in self.cones.iter().enumerate() {
            for skip in 0..c.len() {
                let mut w = c.clone();
                w.remove(skip);
                walls.entry(w).or_default().push(ci);
            }
        }
        for (wall, cs) in &walls {
            if cs.len() != 2 {
                return false;
            }
            let apex = |ci: usize| {
                let c = &self.cones[ci];
                let other = *c.iter().find(|i| !wall.contains(i)).unwrap();
                let mut g: Vec<LatticeVector> = wall.iter().map(|&i| self.rays[i]).collect();
                g.push(self.rays[other]);
                det(&g).unwrap().signum()
            };
            if apex(cs[0]) * apex(cs[1]) >= 0 {
                return false;
            }
        }
        // covering degree along a generic direction
        let probe = if self.dim == 2 {
            LatticeVector::new2(1_000_003, 7_919)
        } else {
            LatticeVector::new3(1_000_003, 7_919, 104_729)
        };
        let hits = self
            .cones
            .iter()
            .filter(|c| {
                let g: Vec<LatticeVector> = c.iter().map(|&i| self.rays[i]).collect();
                strictly_inside(&g, &probe)
            })
            .count();
        hits == 1
    }

    /// Maximal cones containing the given ray index.
    pub fn star_of_ray(&self, r: usize) -> Vec<&Vec<usize>> {
        self.cones.iter().filter(|c| c.contains(&r)).collect()
    }

    fn ray_index(&self, r: &LatticeVector) -> Option<usize> {
        self.rays.binary_search(r).ok()
    }

    /// Whether `sigma` is a face of some maximal cone.
    pub fn contains_cone(&self, sigma: &Cone) -> bool {
        self.cone_face_indices(sigma).is_some()
    }

    fn cone_face_indices(&self, sigma: &Cone) -> Option<Vec<usize>> {
        let idx: Option<Vec<usize>> = sigma.generators.iter().map(|g| self.ray_index(g)).collect();
        let idx = idx?;
        self.cones
            .iter()
            .any(|c| idx.iter().all(|i| c.contains(i)))
            .then_some(idx)
    }
}

/// Whether `x` lies in the open simplicial cone spanned by `g` (Cramer signs).
fn strictly_inside(g: &[LatticeVector], x: &LatticeVector) -> bool {
    let d = det(g).unwrap();
    if d == 0 {
        return false;
    }
    (0..g.len()).all(|i| {
        let mut h = g.to_vec();
        h[i] = *x;
        let di = det(&h).unwrap();
        di != 0 && di.signum() == d.signum()
    })
}

/// Inner normal fan: one maximal cone per vertex, spanned by the primitive
/// inner normals of the facets through it.
pub fn normal_fan(p: &LatticePolytope) -> Fan {
    let cones: Vec<Vec<LatticeVector>> = (0..p.vertices().len())
        .map(|v| {
            p.facets_at(v)
                .iter()
                .map(|&f| p.facets()[f].inequality.normal)
                .collect()
        })
        .collect();
    Fan::from_cones(p.dim(), &cones).expect("facet normals are primitive")
}

pub fn is_unimodular(f: &Fan) -> bool {
    f.is_unimodular()
}

/// Vertex test: simple, and the primitive edge directions at every vertex
/// form a lattice basis.
pub fn is_smooth(p: &LatticePolytope) -> bool {
    p.is_simple() && (0..p.vertices().len()).all(|v| det(&p.edge_directions(v)).unwrap().abs() == 1)
}

/// The fan of the Hirzebruch surface F_r with rays (1,0), (0,1), (0,-1), (-1,r).
pub fn hirzebruch_fan(r: i64) -> Fan {
    assert!(r >= 0, "Hirzebruch parameter must be non-negative");
    let v = LatticeVector::new2;
    let (a, b, c, d) = (v(1, 0), v(0, 1), v(0, -1), v(-1, r));
    Fan::from_cones(2, &[vec![a, b], vec![a, c], vec![c, d], vec![d, b]]).unwrap()
}

/// Stellar subdivision of a unimodular fan at the sum of the generators of
/// `sigma` (a face of dimension at least 2 of some maximal cone).
pub fn stellar_subdivide(f: &Fan, sigma: &Cone) -> Result<Fan> {
    let idx = f.cone_face_indices(sigma).ok_or(Error::ConeNotInFan)?;
    if idx.len() < 2 {
        return Err(Error::RaySubdivision);
    }
    let p = sigma.generator_sum();
    let mut cones = Vec::new();
    for c in &f.cones {
        let gens: Vec<LatticeVector> = c.iter().map(|&i| f.rays[i]).collect();
        if idx.iter().all(|i| c.contains(i)) {
            for &drop in &idx {
                let mut g: Vec<LatticeVector> = c
                    .iter()
                    .filter(|&&i| i != drop)
                    .map(|&i| f.rays[i])
                    .collect();
                g.push(p);
                cones.push(g);
            }
        } else {
            cones.push(gens);
        }
    }
    Fan::from_cones(f.dim, &cones)
}

/// Rays of `f` that are exceptional for some unimodular stellar subdivision,
/// together with the cone they blow down to.
pub fn blowdown_candidates(f: &Fan) -> Vec<(LatticeVector, Cone)> {
    let mut out = Vec::new();
    for (ri, ray) in f.rays.iter().enumerate() {
        let star = f.star_of_ray(ri);
        let link: BTreeSet<usize> = star
            .iter()
            .flat_map(|c| c.iter().copied())
            .filter(|&i| i != ri)
            .collect();
        let link: Vec<usize> = link.into_iter().collect();
        for k in 2..=f.dim.min(link.len()) {
            for subset in combinations(&link, k) {
                let gens: Vec<LatticeVector> = subset.iter().map(|&i| f.rays[i]).collect();
                let sum = gens.iter().fold(LatticeVector::zero(f.dim), |a, g| a + *g);
                if sum != *ray {
                    continue;
                }
                let Some(coarse) = coarsen(f, ri, &subset) else {
                    continue;
                };
                let sigma = Cone::new(gens).unwrap();
                if coarse.is_unimodular()
                    && coarse.is_complete()
                    && stellar_subdivide(&coarse, &sigma).ok().as_ref() == Some(f)
                {
                    out.push((*ray, sigma));
                }
            }
        }
    }
    out
}

/// Removes ray `ri` and re-fills its star with cones containing `sigma`.
fn coarsen(f: &Fan, ri: usize, sigma: &[usize]) -> Option<Fan> {
    let mut cones: Vec<Vec<LatticeVector>> = Vec::new();
    let mut refill: BTreeSet<Vec<usize>> = BTreeSet::new();
    for c in &f.cones {
        if !c.contains(&ri) {
            cones.push(c.iter().map(|&i| f.rays[i]).collect());
            continue;
        }
        // each cone of the star is {ray} + (sigma minus one generator) + rest
        let rest: Vec<usize> = c
            .iter()
            .copied()
            .filter(|&i| i != ri && !sigma.contains(&i))
            .collect();
        if rest.len() + sigma.len() != f.dim {
            return None;
        }
        let mut merged: Vec<usize> = sigma.to_vec();
        merged.extend(rest);
        merged.sort_unstable();
        refill.insert(merged);
    }
    for c in refill {
        cones.push(c.iter().map(|&i| f.rays[i]).collect());
    }
    Fan::from_cones(f.dim, &cones).ok()
}

pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

/// Self-intersection numbers `b_i` of a smooth complete 2-D fan, read
/// counterclockwise from the ray of smallest angle: `u_{i-1} + u_{i+1} = -b_i u_i`.
pub fn self_intersections(f: &Fan) -> Vec<i64> {
    assert_eq!(f.dim, 2);
    let rays = ccw_rays(f);
    let n = rays.len();
    (0..n)
        .map(|i| {
            let s = rays[(i + n - 1) % n] + rays[(i + 1) % n];
            let u = rays[i];
            // s = -b u
            if u.get(0) != 0 {
                -s.get(0) / u.get(0)
            } else {
                -s.get(1) / u.get(1)
            }
        })
        .collect()
}

/// Rays of a 2-D fan sorted by angle in [0, 2pi).
pub fn ccw_rays(f: &Fan) -> Vec<LatticeVector> {
    let mut rays = f.rays.clone();
    let half = |v: &LatticeVector| {
        if v.get(1) > 0 || (v.get(1) == 0 && v.get(0) > 0) {
            0
        } else {
            1
        }
    };
    rays.sort_by(|a, b| {
        half(a)
            .cmp(&half(b))
            .then_with(|| 0.cmp(&crate::lattice::det2(a, b)))
    });
    rays
}

/// Isomorphism class of a smooth complete 2-D fan, as a readable name.
///
/// Classes are told apart by the cyclic self-intersection sequence up to
/// rotation and reflection; `P2` and `F{r}` are recognised by ray count.
pub fn surface_class(f: &Fan) -> SurfaceClass {
    let b = self_intersections(f);
    match b.len() {
        3 => SurfaceClass::ProjectivePlane,
        4 => SurfaceClass::Hirzebruch(b.iter().map(|x| x.abs()).max().unwrap()),
        n => SurfaceClass::BlownUp {
            rays: n,
            sequence: canonical_cycle(&b),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SurfaceClass {
    ProjectivePlane,
    Hirzebruch(i64),
    /// A smooth toric surface with more than four rays.
    BlownUp {
        rays: usize,
        sequence: Vec<i64>,
    },
}

impl std::fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SurfaceClass::ProjectivePlane => write!(f, "P2"),
            SurfaceClass::Hirzebruch(r) => write!(f, "F{r}"),
            // n rays: n - 3 blow-ups of the plane
            SurfaceClass::BlownUp { rays, .. } => write!(f, "Bl{}(P2)", rays - 3),
        }
    }
}

fn canonical_cycle(b: &[i64]) -> Vec<i64> {
    let n = b.len();
    let mut best: Option<Vec<i64>> = None;
    for rev in [false, true] {
        let seq: Vec<i64> = if rev {
            b.iter().rev().copied().collect()
        } else {
            b.to_vec()
        };
        for s in 0..n {
            let rot: Vec<i64> = (0..n).map(|i| seq[(s + i) % n]).collect();
            if best.as_ref().is_none_or(|bst| rot < *bst) {
                best = Some(rot);
            }
        }
    }
    best.unwrap()
}
