//! Toric ideals of lattice point configurations and Gröbner bases of
//! binomial ideals.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LatticePolytope;
use crate::lattice::LatticeVector;

/// Computations abort beyond these.
pub const MAX_DEGREE: u32 = 20;
pub const MAX_BASIS_SIZE: usize = 10_000;

/// `x^plus - x^minus` with disjoint supports.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Binomial {
    pub plus: Vec<u32>,
    pub minus: Vec<u32>,
}

fn degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

fn lcm(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

impl Binomial {
    /// Cancels the common monomial factor. Valid in the prime ideals used
    /// here, which contain no monomials.
    pub fn new(mut plus: Vec<u32>, mut minus: Vec<u32>) -> Self {
        for (p, m) in plus.iter_mut().zip(minus.iter_mut()) {
            let g = (*p).min(*m);
            *p -= g;
            *m -= g;
        }
        Self { plus, minus }
    }

    pub fn num_vars(&self) -> usize {
        self.plus.len()
    }

    pub fn is_zero(&self) -> bool {
        self.plus == self.minus
    }

    pub fn degree(&self) -> u32 {
        degree(&self.plus).max(degree(&self.minus))
    }

    pub fn is_homogeneous(&self) -> bool {
        degree(&self.plus) == degree(&self.minus)
    }

    /// Oriented so that `plus` is the leading term.
    fn oriented(self, ord: &MonomialOrder) -> Self {
        if ord.cmp(&self.plus, &self.minus) == Ordering::Less {
            Self {
                plus: self.minus,
                minus: self.plus,
            }
        } else {
            self
        }
    }

    fn lies_in(&self, a: &[Vec<u32>]) -> bool {
        let dim = a.first().map_or(0, |v| v.len());
        (0..dim).all(|c| {
            let side = |e: &[u32]| {
                e.iter()
                    .zip(a)
                    .map(|(&k, p)| k as i64 * p[c] as i64)
                    .sum::<i64>()
            };
            side(&self.plus) == side(&self.minus)
        })
    }
}

impl fmt::Display for Binomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mono = |e: &[u32]| {
            let parts: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{k}", i + 1)
                    }
                })
                .collect();
            if parts.is_empty() {
                "1".to_string()
            } else {
                parts.join("*")
            }
        };
        write!(f, "{} - {}", mono(&self.plus), mono(&self.minus))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderKind {
    Lex,
    DegRevLex,
    /// The first `block` variables (in `perm` order) compared by degrevlex,
    /// ties broken by degrevlex on the rest.
    Elimination {
        block: usize,
    },
}

/// A monomial order; `perm[0]` is the most significant variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub perm: Vec<usize>,
}

fn degrevlex(a: &[u32], b: &[u32], vars: &[usize]) -> Ordering {
    let da: u32 = vars.iter().map(|&i| a[i]).sum();
    let db: u32 = vars.iter().map(|&i| b[i]).sum();
    da.cmp(&db).then_with(|| {
        for &i in vars.iter().rev() {
            match a[i].cmp(&b[i]) {
                Ordering::Equal => continue,
                o => return o.reverse(),
            }
        }
        Ordering::Equal
    })
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, perm: Vec<usize>) -> Result<Self> {
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        if sorted != (0..perm.len()).collect::<Vec<_>>() {
            return Err(Error::Parse {
                what: "variable order".into(),
                reason: format!("{perm:?} is not a permutation"),
            });
        }
        if let OrderKind::Elimination { block } = kind {
            if block > perm.len() {
                return Err(Error::Parse {
                    what: "variable order".into(),
                    reason: format!("block {block} exceeds {} variables", perm.len()),
                });
            }
        }
        Ok(Self { kind, perm })
    }

    pub fn lex(n: usize) -> Self {
        Self::new(OrderKind::Lex, (0..n).collect()).unwrap()
    }

    pub fn degrevlex(n: usize) -> Self {
        Self::new(OrderKind::DegRevLex, (0..n).collect()).unwrap()
    }

    pub fn num_vars(&self) -> usize {
        self.perm.len()
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match self.kind {
            OrderKind::Lex => {
                for &i in &self.perm {
                    match a[i].cmp(&b[i]) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            OrderKind::DegRevLex => degrevlex(a, b, &self.perm),
            OrderKind::Elimination { block } => {
                let (hi, lo) = self.perm.split_at(block);
                degrevlex(a, b, hi).then_with(|| degrevlex(a, b, lo))
            }
        }
    }
}

/// `A = {(p - p_min, 1)}` over the lattice points, `p_min` the coordinatewise
/// minimum, in the lexicographic order of the points.
pub fn point_config(p: &LatticePolytope) -> Vec<Vec<u32>> {
    point_config_of(p.lattice_points())
}

pub fn point_config_of(points: &[LatticeVector]) -> Vec<Vec<u32>> {
    let dim = points.first().map_or(0, |p| p.dim());
    let mins: Vec<i64> = (0..dim)
        .map(|c| points.iter().map(|p| p.get(c)).min().unwrap())
        .collect();
    let mut pts: Vec<&LatticeVector> = points.iter().collect();
    pts.sort();
    pts.iter()
        .map(|p| {
            let mut v: Vec<u32> = (0..dim).map(|c| (p.get(c) - mins[c]) as u32).collect();
            v.push(1);
            v
        })
        .collect()
}

struct Basis<'a> {
    ord: &'a MonomialOrder,
    elems: Vec<Binomial>,
}

impl<'a> Basis<'a> {
    fn find_divisor(&self, m: &[u32]) -> Option<&Binomial> {
        self.elems.iter().find(|g| divides(&g.plus, m))
    }

    /// Normal form of the leading term only; the result is oriented.
    fn reduce_lead(&self, mut f: Binomial) -> Binomial {
        loop {
            if f.is_zero() {
                return f;
            }
            let Some(g) = self.find_divisor(&f.plus) else {
                return f;
            };
            let plus: Vec<u32> = f
                .plus
                .iter()
                .zip(&g.plus)
                .zip(&g.minus)
                .map(|((a, b), c)| a - b + c)
                .collect();
            f = Binomial::new(plus, f.minus).oriented(self.ord);
        }
    }

    /// Full normal form: leading and trailing terms irreducible.
    fn reduce_full(&self, f: Binomial) -> Binomial {
        let mut f = self.reduce_lead(f);
        while !f.is_zero() {
            let Some(g) = self.find_divisor(&f.minus) else {
                break;
            };
            let minus: Vec<u32> = f
                .minus
                .iter()
                .zip(&g.plus)
                .zip(&g.minus)
                .map(|((a, b), c)| a - b + c)
                .collect();
            f = Binomial::new(f.plus, minus).oriented(self.ord);
            f = self.reduce_lead(f);
        }
        f
    }
}

fn s_binomial(f: &Binomial, g: &Binomial) -> Binomial {
    let l = lcm(&f.plus, &g.plus);
    // (l/lf) f - (l/lg) g = x^(l - lf + tf) ... the leading terms cancel
    let a: Vec<u32> = l
        .iter()
        .zip(&f.plus)
        .zip(&f.minus)
        .map(|((l, p), m)| l - p + m)
        .collect();
    let b: Vec<u32> = l
        .iter()
        .zip(&g.plus)
        .zip(&g.minus)
        .map(|((l, p), m)| l - p + m)
        .collect();
    Binomial::new(a, b)
}

fn check_caps(b: &Binomial, size: usize) -> Result<()> {
    if b.degree() > MAX_DEGREE {
        return Err(Error::ResourceCap(format!(
            "basis degree {} exceeds {MAX_DEGREE}",
            b.degree()
        )));
    }
    if size > MAX_BASIS_SIZE {
        return Err(Error::ResourceCap(format!(
            "basis size exceeds {MAX_BASIS_SIZE}"
        )));
    }
    Ok(())
}

/// Reduced Gröbner basis of the ideal generated by `gens`, sorted by
/// leading term. Uses normal pair selection with ties broken by index.
pub fn reduced_groebner(gens: &[Binomial], ord: &MonomialOrder) -> Result<Vec<Binomial>> {
    let mut basis = Basis {
        ord,
        elems: Vec::new(),
    };
    for g in gens {
        if g.num_vars() != ord.num_vars() || g.minus.len() != ord.num_vars() {
            return Err(Error::DimensionMismatch {
                expected: ord.num_vars(),
                got: g.num_vars(),
            });
        }
    }
    // pairs keyed by (lcm degree, i, j)
    let mut pairs: BTreeSet<(u32, usize, usize)> = BTreeSet::new();
    let add = |basis: &mut Basis<'_>,
               pairs: &mut BTreeSet<(u32, usize, usize)>,
               h: Binomial|
     -> Result<()> {
        let j = basis.elems.len();
        check_caps(&h, j + 1)?;
        for (i, g) in basis.elems.iter().enumerate() {
            if !coprime(&g.plus, &h.plus) {
                pairs.insert((degree(&lcm(&g.plus, &h.plus)), i, j));
            }
        }
        basis.elems.push(h);
        Ok(())
    };
    for g in gens {
        let h = basis.reduce_lead(g.clone().oriented(ord));
        if !h.is_zero() {
            add(&mut basis, &mut pairs, h)?;
        }
    }
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    while let Some(&(d, i, j)) = pairs.iter().next() {
        pairs.remove(&(d, i, j));
        done.insert((i, j));
        let l = lcm(&basis.elems[i].plus, &basis.elems[j].plus);
        // chain criterion
        let chain = (0..basis.elems.len()).any(|k| {
            k != i
                && k != j
                && divides(&basis.elems[k].plus, &l)
                && done.contains(&(i.min(k), i.max(k)))
                && done.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let h = basis.reduce_lead(s_binomial(&basis.elems[i], &basis.elems[j]).oriented(ord));
        if !h.is_zero() {
            add(&mut basis, &mut pairs, h)?;
        }
    }
    // minimal, then reduced
    let elems = std::mem::take(&mut basis.elems);
    let mut minimal: Vec<Binomial> = Vec::new();
    for (i, g) in elems.iter().enumerate() {
        let redundant = elems
            .iter()
            .enumerate()
            .any(|(k, h)| k != i && divides(&h.plus, &g.plus) && (h.plus != g.plus || k < i));
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others = Basis {
            ord,
            elems: minimal
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, g)| g.clone())
                .collect(),
        };
        let g = &minimal[i];
        // the leading term is irreducible by minimality; reduce the tail
        let mut minus = g.minus.clone();
        while let Some(h) = others.find_divisor(&minus) {
            minus = minus
                .iter()
                .zip(&h.plus)
                .zip(&h.minus)
                .map(|((a, b), c)| a - b + c)
                .collect();
        }
        reduced.push(Binomial::new(g.plus.clone(), minus));
    }
    reduced.sort_by(|a, b| ord.cmp(&a.plus, &b.plus));
    Ok(reduced)
}

/// Whether every S-binomial of `basis` reduces to zero.
pub fn is_groebner_basis(basis: &[Binomial], ord: &MonomialOrder) -> bool {
    let b = Basis {
        ord,
        elems: basis.to_vec(),
    };
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let s = s_binomial(&basis[i], &basis[j]).oriented(ord);
            if !b.reduce_full(s).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Whether `f` reduces to zero modulo the Gröbner basis `basis`.
pub fn reduces_to_zero(f: &Binomial, basis: &[Binomial], ord: &MonomialOrder) -> bool {
    let b = Basis {
        ord,
        elems: basis.to_vec(),
    };
    b.reduce_full(f.clone().oriented(ord)).is_zero()
}

/// Reduced Gröbner basis of the toric ideal of `a` under `ord` (an order on
/// the `a.len()` configuration variables), by elimination of the torus
/// variables. Nonnegative exponents make saturation unnecessary.
pub fn toric_groebner(a: &[Vec<u32>], ord: &MonomialOrder) -> Result<Vec<Binomial>> {
    let n = a.len();
    if ord.num_vars() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: ord.num_vars(),
        });
    }
    let Some(d) = a.first().map(|v| v.len()) else {
        return Ok(Vec::new());
    };
    // variables t_1..t_d, then x_1..x_n in the order of `ord`
    let perm: Vec<usize> = (0..d).chain(ord.perm.iter().map(|&i| i + d)).collect();
    let elim = MonomialOrder::new(OrderKind::Elimination { block: d }, perm)?;
    let gens: Vec<Binomial> = a
        .iter()
        .enumerate()
        .map(|(j, aj)| {
            let mut x = vec![0; d + n];
            x[d + j] = 1;
            let mut t = aj.clone();
            t.extend(std::iter::repeat_n(0, n));
            Binomial::new(x, t)
        })
        .collect();
    // the x part of the eliminating basis is the degrevlex basis of the ideal
    let ideal = restrict(reduced_groebner(&gens, &elim)?, d);
    match ord.kind {
        OrderKind::DegRevLex => Ok(ideal),
        _ => reduced_groebner(&ideal, ord),
    }
}

fn restrict(basis: Vec<Binomial>, d: usize) -> Vec<Binomial> {
    basis
        .into_iter()
        .filter(|b| b.plus[..d].iter().chain(&b.minus[..d]).all(|&e| e == 0))
        .map(|b| Binomial {
            plus: b.plus[d..].to_vec(),
            minus: b.minus[d..].to_vec(),
        })
        .collect()
}

/// Generators of the toric ideal of `a`: its reduced degrevlex Gröbner basis
/// under the given variable order.
pub fn toric_ideal(a: &[Vec<u32>]) -> Result<Vec<Binomial>> {
    toric_groebner(a, &MonomialOrder::degrevlex(a.len()))
}

/// Variable orders tried by the normality checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariableOrder {
    /// Points in lexicographic order.
    Default,
    Reverse,
    /// Boundary points first, then interior points, each lexicographic.
    BoundaryFirst,
}

impl VariableOrder {
    pub const ALL: [VariableOrder; 3] = [
        VariableOrder::Default,
        VariableOrder::Reverse,
        VariableOrder::BoundaryFirst,
    ];

    /// Permutation of the variables of `point_config(p)`.
    pub fn permutation(self, p: &LatticePolytope) -> Vec<usize> {
        let n = p.num_points();
        match self {
            VariableOrder::Default => (0..n).collect(),
            VariableOrder::Reverse => (0..n).rev().collect(),
            VariableOrder::BoundaryFirst => {
                let mut pts = p.lattice_points().to_vec();
                pts.sort();
                let on_boundary = |x: &LatticeVector| p.inequalities().any(|f| f.slack(x) == 0);
                let (mut b, i): (Vec<usize>, Vec<usize>) =
                    (0..n).partition(|&k| on_boundary(&pts[k]));
                b.extend(i);
                b
            }
        }
    }
}

impl fmt::Display for VariableOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VariableOrder::Default => "default",
            VariableOrder::Reverse => "reverse",
            VariableOrder::BoundaryFirst => "boundary-first",
        })
    }
}

impl std::str::FromStr for VariableOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(VariableOrder::Default),
            "reverse" => Ok(VariableOrder::Reverse),
            "boundary-first" => Ok(VariableOrder::BoundaryFirst),
            _ => Err(Error::Parse {
                what: "variable order".into(),
                reason: format!("unknown order {s:?}"),
            }),
        }
    }
}

/// Reduced degrevlex basis of the toric ideal of `p`.
pub fn degrevlex_basis(p: &LatticePolytope, order: VariableOrder) -> Result<Vec<Binomial>> {
    let ord = MonomialOrder::new(OrderKind::DegRevLex, order.permutation(p))?;
    toric_groebner(&point_config(p), &ord)
}

/// Reduced lex basis of the toric ideal of `p`.
pub fn lex_basis(p: &LatticePolytope, order: VariableOrder) -> Result<Vec<Binomial>> {
    let ord = MonomialOrder::new(OrderKind::Lex, order.permutation(p))?;
    toric_groebner(&point_config(p), &ord)
}

pub fn is_quadratic_gb(p: &LatticePolytope) -> Result<bool> {
    Ok(degrevlex_basis(p, VariableOrder::Default)?
        .iter()
        .all(|b| b.degree() == 2))
}

pub fn has_squarefree_lex_initial(p: &LatticePolytope) -> Result<bool> {
    Ok(lex_basis(p, VariableOrder::Default)?
        .iter()
        .all(|b| b.plus.iter().all(|&e| e <= 1)))
}

/// Outcome of both checks for one polytope under one variable order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalityResult {
    pub order: VariableOrder,
    pub num_points: usize,
    pub degrevlex_size: usize,
    pub max_degree: u32,
    pub quadratic: bool,
    pub lex_size: usize,
    pub squarefree: bool,
}

pub fn check_normality(p: &LatticePolytope, order: VariableOrder) -> Result<NormalityResult> {
    let a = point_config(p);
    let dr = degrevlex_basis(p, order)?;
    let lx = lex_basis(p, order)?;
    debug_assert!(dr
        .iter()
        .chain(&lx)
        .all(|b| b.is_homogeneous() && b.lies_in(&a)));
    Ok(NormalityResult {
        order,
        num_points: p.num_points(),
        degrevlex_size: dr.len(),
        max_degree: dr.iter().map(Binomial::degree).max().unwrap_or(0),
        quadratic: dr.iter().all(|b| b.degree() == 2),
        lex_size: lx.len(),
        squarefree: lx.iter().all(|b| b.plus.iter().all(|&e| e <= 1)),
    })
}

/// Searches for a variable order with a quadratic reduced degrevlex basis:
/// the named orders first, then `attempts` random permutations drawn from a
/// generator seeded with `seed`. Returns the first permutation that works.
pub fn search_quadratic_order(
    p: &LatticePolytope,
    attempts: usize,
    seed: u64,
) -> Result<Option<Vec<usize>>> {
    let a = point_config(p);
    let quadratic = |perm: &[usize]| -> Result<bool> {
        let ord = MonomialOrder::new(OrderKind::DegRevLex, perm.to_vec())?;
        Ok(toric_groebner(&a, &ord)?.iter().all(|b| b.degree() == 2))
    };
    for o in VariableOrder::ALL {
        let perm = o.permutation(p);
        if quadratic(&perm)? {
            return Ok(Some(perm));
        }
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..a.len()).collect();
    for _ in 0..attempts {
        perm.shuffle(&mut rng);
        if quadratic(&perm)? {
            return Ok(Some(perm));
        }
    }
    Ok(None)
}
