//! Reference implementations used to cross-check the library. Each one
//! takes a deliberately different route from the code it checks.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::rngs::StdRng;
use rand::Rng;
use smoothpoly::normality::Binomial;
use smoothpoly::{LatticePolytope, LatticeVector, UnimodularAffineMap};

pub fn v3(x: i64, y: i64, z: i64) -> LatticeVector {
    LatticeVector::new3(x, y, z)
}

fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != c)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { 1 } else { -1 };
                sign * m[0][c] * det(&minor)
            })
            .sum(),
    }
}

/// Transposed cofactor matrix: `m * adj(m) = det(m) * I`.
#[allow(clippy::needless_range_loop)]
fn adjugate(m: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![1]];
    }
    let mut adj = vec![vec![0; n]; n];
    for r in 0..n {
        for c in 0..n {
            let minor: Vec<Vec<i128>> = (0..n)
                .filter(|&i| i != r)
                .map(|i| (0..n).filter(|&j| j != c).map(|j| m[i][j]).collect())
                .collect();
            let sign = if (r + c) % 2 == 0 { 1 } else { -1 };
            adj[c][r] = sign * det(&minor);
        }
    }
    adj
}

/// Columns `pts[idx[k]] - pts[idx[0]]` as a square matrix.
fn frame(pts: &[LatticeVector], idx: &[usize]) -> Vec<Vec<i128>> {
    let d = pts[0].dim();
    (0..d)
        .map(|r| {
            idx[1..]
                .iter()
                .map(|&k| (pts[k].get(r) - pts[idx[0]].get(r)) as i128)
                .collect()
        })
        .collect()
}

fn ordered_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(n: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !cur.contains(&i) {
                cur.push(i);
                go(n, len, cur, out);
                cur.pop();
            }
        }
    }
    go(n, len, &mut cur, &mut out);
    out
}

/// Unimodular affine equivalence of two vertex sets by brute force: fix an
/// affine frame among the vertices of `p` and try every ordered tuple of
/// vertices of `q` as its image.
pub fn affinely_equivalent(p: &[LatticeVector], q: &[LatticeVector]) -> bool {
    if p.len() != q.len() || p.is_empty() || p[0].dim() != q[0].dim() {
        return false;
    }
    let d = p[0].dim();
    let Some(base) = ordered_tuples(p.len(), d + 1)
        .into_iter()
        .find(|t| det(&frame(p, t)) != 0)
    else {
        return false;
    };
    let fp = frame(p, &base);
    let dp = det(&fp);
    let adj = adjugate(&fp);
    let targets: HashSet<&LatticeVector> = q.iter().collect();
    'tuples: for t in ordered_tuples(q.len(), d + 1) {
        let fq = frame(q, &t);
        let mut m = vec![vec![0i128; d]; d];
        for r in 0..d {
            for c in 0..d {
                let s: i128 = (0..d).map(|k| fq[r][k] * adj[k][c]).sum();
                if s % dp != 0 {
                    continue 'tuples;
                }
                m[r][c] = s / dp;
            }
        }
        if det(&m).abs() != 1 {
            continue;
        }
        let image = |x: &LatticeVector| -> LatticeVector {
            let coords: Vec<i64> = (0..d)
                .map(|r| {
                    let lin: i128 = (0..d)
                        .map(|c| m[r][c] * (x.get(c) - p[base[0]].get(c)) as i128)
                        .sum();
                    (lin + q[t[0]].get(r) as i128) as i64
                })
                .collect();
            LatticeVector::new(&coords).unwrap()
        };
        if p.iter().all(|x| targets.contains(&image(x))) {
            return true;
        }
    }
    false
}

/// Random lattice automorphism of Z^d composed with a translation.
pub fn random_unimodular(rng: &mut StdRng, d: usize) -> UnimodularAffineMap {
    let mut m: Vec<Vec<i64>> = (0..d)
        .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
        .collect();
    for _ in 0..rng.gen_range(1..6) {
        let (i, j) = (rng.gen_range(0..d), rng.gen_range(0..d));
        if i == j {
            let s = rng.gen_range(0..d);
            m.swap(i, s);
            for x in &mut m[i] {
                *x = -*x;
            }
        } else {
            let k = rng.gen_range(-2..=2);
            let row = m[j].clone();
            for (x, y) in m[i].iter_mut().zip(row) {
                *x += k * y;
            }
        }
    }
    let t: Vec<i64> = (0..d).map(|_| rng.gen_range(-5..=5)).collect();
    UnimodularAffineMap::new(&m, LatticeVector::new(&t).unwrap()).unwrap()
}

/// Smoothness straight from the definition: `d` edges at every vertex whose
/// primitive directions have determinant +-1.
pub fn smooth_by_definition(p: &LatticePolytope) -> bool {
    let d = p.dim();
    (0..p.vertices().len()).all(|v| {
        let nb = p.neighbors(v);
        if nb.len() != d {
            return false;
        }
        let cols: Vec<Vec<i128>> = nb
            .iter()
            .map(|&u| {
                let (dir, _) = (p.vertex(u) - p.vertex(v)).primitive().unwrap();
                dir.coords().iter().map(|&x| x as i128).collect()
            })
            .collect();
        det(&cols).abs() == 1
    })
}

type Tri = BTreeSet<[usize; 3]>;

fn sorted3(a: usize, b: usize, c: usize) -> [usize; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

fn adjacency(t: &Tri, n: usize) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); n];
    for f in t {
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    adj[f[i]].insert(f[j]);
                }
            }
        }
    }
    adj
}

fn isomorphic_triangulations(a: &Tri, b: &Tri, n: usize) -> bool {
    let (aa, ab) = (adjacency(a, n), adjacency(b, n));
    let mut da: Vec<usize> = aa.iter().map(BTreeSet::len).collect();
    let mut db: Vec<usize> = ab.iter().map(BTreeSet::len).collect();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return false;
    }
    #[allow(clippy::too_many_arguments)]
    fn extend(
        v: usize,
        n: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        aa: &[BTreeSet<usize>],
        ab: &[BTreeSet<usize>],
        a: &Tri,
        b: &Tri,
    ) -> bool {
        if v == n {
            return a
                .iter()
                .all(|f| b.contains(&sorted3(map[f[0]], map[f[1]], map[f[2]])));
        }
        for w in 0..n {
            if used[w] || aa[v].len() != ab[w].len() {
                continue;
            }
            if (0..v).any(|u| aa[v].contains(&u) != ab[w].contains(&map[u])) {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if extend(v + 1, n, map, used, aa, ab, a, b) {
                return true;
            }
            used[w] = false;
        }
        false
    }
    extend(0, n, &mut vec![0; n], &mut vec![false; n], &aa, &ab, a, b)
}

/// Diagonal flips of a triangulation of the sphere.
fn flips(t: &Tri, n: usize) -> Vec<Tri> {
    let adj = adjacency(t, n);
    let mut by_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for f in t {
        for (x, y, z) in [(f[0], f[1], f[2]), (f[0], f[2], f[1]), (f[1], f[2], f[0])] {
            by_edge.entry((x, y)).or_default().push(z);
        }
    }
    let mut out = Vec::new();
    for (&(a, b), opp) in &by_edge {
        let (c, d) = (opp[0], opp[1]);
        if adj[c].contains(&d) {
            continue;
        }
        let mut u = t.clone();
        u.remove(&sorted3(a, b, c));
        u.remove(&sorted3(a, b, d));
        u.insert(sorted3(c, d, a));
        u.insert(sorted3(c, d, b));
        out.push(u);
    }
    out
}

/// Number of combinatorial types of triangulations of the 2-sphere with `n`
/// vertices: all of them are connected by diagonal flips, so a search over
/// the flip graph from a stacked triangulation finds every type.
pub fn sphere_triangulation_count(n: usize) -> usize {
    assert!(n >= 4);
    let mut start: Tri = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
        .into_iter()
        .collect();
    for k in 4..n {
        let f = *start.iter().next().unwrap();
        start.remove(&f);
        start.insert(sorted3(f[0], f[1], k));
        start.insert(sorted3(f[1], f[2], k));
        start.insert(sorted3(f[0], f[2], k));
    }
    let mut found: Vec<Tri> = vec![start];
    let mut next = 0;
    while next < found.len() {
        let t = found[next].clone();
        next += 1;
        for u in flips(&t, n) {
            if !found.iter().any(|f| isomorphic_triangulations(f, &u, n)) {
                found.push(u);
            }
        }
    }
    found.len()
}

/// Homogeneous binomials of degree `<= max_degree` spanning the kernel of
/// the monomial map of `a` in each degree: within a fiber of the map, every
/// monomial minus the first one.
pub fn kernel_binomials(a: &[Vec<u32>], max_degree: u32) -> Vec<Binomial> {
    let n = a.len();
    let mut out = Vec::new();
    for deg in 2..=max_degree {
        let mut fibers: BTreeMap<Vec<u32>, Vec<Vec<u32>>> = BTreeMap::new();
        let mut expo = vec![0u32; n];
        fn monomials(
            i: usize,
            left: u32,
            expo: &mut Vec<u32>,
            a: &[Vec<u32>],
            fibers: &mut BTreeMap<Vec<u32>, Vec<Vec<u32>>>,
        ) {
            if i + 1 == expo.len() {
                expo[i] = left;
                let img: Vec<u32> = (0..a[0].len())
                    .map(|c| expo.iter().zip(a).map(|(e, p)| e * p[c]).sum())
                    .collect();
                fibers.entry(img).or_default().push(expo.clone());
                return;
            }
            for e in 0..=left {
                expo[i] = e;
                monomials(i + 1, left - e, expo, a, fibers);
            }
        }
        monomials(0, deg, &mut expo, a, &mut fibers);
        for ms in fibers.values() {
            for m in &ms[1..] {
                let b = Binomial::new(m.clone(), ms[0].clone());
                if !b.is_zero() && b.degree() == deg {
                    out.push(b);
                }
            }
        }
    }
    out
}

/// The two monomials of `b` have the same image under `a`.
pub fn in_kernel(a: &[Vec<u32>], b: &Binomial) -> bool {
    let image = |e: &[u32]| -> Vec<u32> {
        (0..a[0].len())
            .map(|c| e.iter().zip(a).map(|(x, p)| x * p[c]).sum())
            .collect()
    };
    image(&b.plus) == image(&b.minus)
}
