//! Canonical forms of smooth polytopes via corner normalization.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fans::is_smooth;
use crate::geometry::{hull, LatticePolytope};
use crate::lattice::{LatticeVector, UnimodularAffineMap};

/// Sorted lattice-point set of the lexicographically least corner normalization.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub points: Vec<LatticeVector>,
}

impl CanonicalForm {
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.dim())
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    /// The normalized polytope itself.
    pub fn polytope(&self) -> LatticePolytope {
        hull(&self.points).expect("canonical forms are full-dimensional")
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Maps sending vertex `v` to the origin and its edge directions, in each of
/// the `d!` orders, to the standard basis.
pub fn corner_frames(p: &LatticePolytope, v: usize) -> Result<Vec<UnimodularAffineMap>> {
    let dirs = p.edge_directions(v);
    if dirs.len() != p.dim() {
        return Err(Error::NotSmooth(format!(
            "vertex {} is not simple",
            p.vertex(v)
        )));
    }
    let mut out = Vec::new();
    for perm in permutations(dirs.len()) {
        let cols: Vec<LatticeVector> = perm.iter().map(|&i| dirs[i]).collect();
        let frame = UnimodularAffineMap::from_columns(&cols).map_err(|_| {
            Error::NotSmooth(format!(
                "edge directions at {} are not a basis",
                p.vertex(v)
            ))
        })?;
        // x = v + M y, so the normalization is y = M^-1 (x - v)
        let to_corner = UnimodularAffineMap::translation_by(-p.vertex(v)).then(&frame.inverse());
        out.push(to_corner);
    }
    Ok(out)
}

/// Images of `p` under every corner frame at `v`.
pub fn corner_normalizations(p: &LatticePolytope, v: usize) -> Result<Vec<LatticePolytope>> {
    Ok(corner_frames(p, v)?.iter().map(|m| p.image(m)).collect())
}

fn normalized_points(p: &LatticePolytope, m: &UnimodularAffineMap) -> Vec<LatticeVector> {
    let mut pts: Vec<LatticeVector> = p
        .lattice_points()
        .iter()
        .map(|x| m.apply_unchecked(x))
        .collect();
    pts.sort_unstable();
    pts
}

/// Canonical form together with a map taking `p` onto it.
pub fn canonical_form_with_map(
    p: &LatticePolytope,
) -> Result<(CanonicalForm, UnimodularAffineMap)> {
    if !is_smooth(p) {
        return Err(Error::NotSmooth(
            "canonical forms need a smooth polytope".into(),
        ));
    }
    let mut best: Option<(Vec<LatticeVector>, UnimodularAffineMap)> = None;
    for v in 0..p.vertices().len() {
        for m in corner_frames(p, v)? {
            let pts = normalized_points(p, &m);
            if best.as_ref().is_none_or(|(b, _)| pts < *b) {
                best = Some((pts, m));
            }
        }
    }
    let (points, m) = best.expect("polytopes have vertices");
    Ok((CanonicalForm { points }, m))
}

pub fn canonical_form(p: &LatticePolytope) -> Result<CanonicalForm> {
    canonical_form_with_map(p).map(|(c, _)| c)
}

/// A unimodular affine map taking `p` onto `q`, if the two are isomorphic.
pub fn isomorphism(
    p: &LatticePolytope,
    q: &LatticePolytope,
) -> Result<Option<UnimodularAffineMap>> {
    if p.dim() != q.dim() {
        return Ok(None);
    }
    let (cp, mp) = canonical_form_with_map(p)?;
    let (cq, mq) = canonical_form_with_map(q)?;
    Ok((cp == cq).then(|| mp.then(&mq.inverse())))
}

/// Smooth polytopes of different dimension or non-smooth input compare unequal.
pub fn are_isomorphic(p: &LatticePolytope, q: &LatticePolytope) -> bool {
    matches!(isomorphism(p, q), Ok(Some(_)))
}

/// Number of distinct point sets among all corner normalizations of `p`.
pub fn distinct_corner_normalizations(p: &LatticePolytope) -> Result<usize> {
    let mut seen = BTreeSet::new();
    for v in 0..p.vertices().len() {
        for m in corner_frames(p, v)? {
            seen.insert(normalized_points(p, &m));
        }
    }
    Ok(seen.len())
}
