//! Exact integer linear algebra in Z^2 and Z^3.
//!
//! Coordinates are `i64`; the workspace builds with overflow checks in every
//! profile, so an overflow aborts instead of wrapping. Values in this crate stay
//! far below that range.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or direction of Z^2 or Z^3.
///
/// Unused trailing coordinates of a 2-D vector are kept at zero, so the derived
/// ordering is lexicographic for vectors of equal dimension.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector {
    dim: u8,
    c: [i64; 3],
}

impl LatticeVector {
    pub fn new(coords: &[i64]) -> Result<Self> {
        match coords.len() {
            2 => Ok(Self::new2(coords[0], coords[1])),
            3 => Ok(Self::new3(coords[0], coords[1], coords[2])),
            n => Err(Error::UnsupportedDimension(n)),
        }
    }

    pub const fn new2(x: i64, y: i64) -> Self {
        Self {
            dim: 2,
            c: [x, y, 0],
        }
    }

    pub const fn new3(x: i64, y: i64, z: i64) -> Self {
        Self {
            dim: 3,
            c: [x, y, z],
        }
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3, "unsupported dimension {dim}");
        Self {
            dim: dim as u8,
            c: [0; 3],
        }
    }

    /// The i-th standard basis vector.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.c[i] = 1;
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[i64] {
        &self.c[..self.dim as usize]
    }

    #[inline]
    pub fn get(&self, i: usize) -> i64 {
        debug_assert!(i < self.dim());
        self.c[i]
    }

    pub fn is_zero(&self) -> bool {
        self.c == [0; 3]
    }

    pub fn dot(&self, other: &Self) -> i64 {
        debug_assert_eq!(self.dim, other.dim);
        self.c[0] * other.c[0] + self.c[1] * other.c[1] + self.c[2] * other.c[2]
    }

    /// Greatest common divisor of the coordinates (0 for the zero vector).
    pub fn content(&self) -> i64 {
        self.coords().iter().fold(0, |g, &x| gcd(g, x))
    }

    /// Splits `self = g * w` with `w` primitive and `g > 0`.
    pub fn primitive(&self) -> Result<(Self, i64)> {
        let g = self.content();
        if g == 0 {
            return Err(Error::ZeroVector);
        }
        let mut w = *self;
        for x in &mut w.c {
            *x /= g;
        }
        Ok((w, g))
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut w = *self;
        for x in &mut w.c {
            *x *= k;
        }
        w
    }

    /// Drops the last coordinate of a 3-D vector.
    pub fn truncate2(&self) -> Self {
        Self::new2(self.c[0], self.c[1])
    }

    /// Appends a coordinate to a 2-D vector.
    pub fn extend3(&self, z: i64) -> Self {
        debug_assert_eq!(self.dim, 2);
        Self::new3(self.c[0], self.c[1], z)
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            })
        }
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Add for LatticeVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            c: [
                self.c[0] + rhs.c[0],
                self.c[1] + rhs.c[1],
                self.c[2] + rhs.c[2],
            ],
        }
    }
}

impl Sub for LatticeVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            c: [
                self.c[0] - rhs.c[0],
                self.c[1] - rhs.c[1],
                self.c[2] - rhs.c[2],
            ],
        }
    }
}

impl Neg for LatticeVector {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1)
    }
}

impl Mul<LatticeVector> for i64 {
    type Output = LatticeVector;
    fn mul(self, rhs: LatticeVector) -> LatticeVector {
        rhs.scale(self)
    }
}

impl Serialize for LatticeVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.dim()))?;
        for x in self.coords() {
            seq.serialize_element(x)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for LatticeVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = LatticeVector;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of 2 or 3 integers")
            }
            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut coords = Vec::with_capacity(3);
                while let Some(x) = seq.next_element::<i64>()? {
                    coords.push(x);
                }
                LatticeVector::new(&coords).map_err(de::Error::custom)
            }
        }
        deserializer.deserialize_seq(V)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn cross(a: &LatticeVector, b: &LatticeVector) -> LatticeVector {
    debug_assert!(a.dim() == 3 && b.dim() == 3);
    let (a, b) = (a.c, b.c);
    LatticeVector::new3(
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )
}

/// 2-D cross product `a.x * b.y - a.y * b.x`.
pub fn det2(a: &LatticeVector, b: &LatticeVector) -> i64 {
    a.c[0] * b.c[1] - a.c[1] * b.c[0]
}

pub fn det3(a: &LatticeVector, b: &LatticeVector, c: &LatticeVector) -> i64 {
    cross(a, b).dot(c)
}

/// Determinant of the square matrix whose columns are `vs`.
pub fn det(vs: &[LatticeVector]) -> Result<i64> {
    let d = vs.len();
    if d != 2 && d != 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    for v in vs {
        v.check_dim(d)?;
    }
    Ok(if d == 2 {
        det2(&vs[0], &vs[1])
    } else {
        det3(&vs[0], &vs[1], &vs[2])
    })
}

/// True iff `vs` is a basis of Z^d (|det| = 1).
pub fn is_lattice_basis(vs: &[LatticeVector]) -> Result<bool> {
    Ok(det(vs)?.abs() == 1)
}

/// Rank of a list of vectors of a common dimension.
pub fn rank(vs: &[LatticeVector]) -> usize {
    let Some(first) = vs.first() else { return 0 };
    let dim = first.dim();
    // fraction-free Gaussian elimination
    let mut rows: Vec<[i64; 3]> = vs.iter().map(|v| v.c).collect();
    let mut r = 0;
    for col in 0..dim {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r];
        for row in rows.iter_mut().skip(r + 1) {
            let f = row[col];
            if f != 0 {
                for k in 0..3 {
                    row[k] = row[k] * pivot[col] - pivot[k] * f;
                }
                let g = row.iter().fold(0, |g, &x| gcd(g, x));
                if g > 1 {
                    row.iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        r += 1;
    }
    r
}

/// A lattice-preserving affine map `x -> matrix * x + translation`.
///
/// Composition convention: `a.then(&b)` applies `a` first and `b` second.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct UnimodularAffineMap {
    dim: usize,
    /// Row-major; only the leading `dim x dim` block is used.
    matrix: [[i64; 3]; 3],
    translation: LatticeVector,
}

impl UnimodularAffineMap {
    pub fn identity(dim: usize) -> Self {
        let mut matrix = [[0; 3]; 3];
        for (i, row) in matrix.iter_mut().enumerate().take(dim) {
            row[i] = 1;
        }
        Self {
            dim,
            matrix,
            translation: LatticeVector::zero(dim),
        }
    }

    /// Builds a map from matrix rows and a translation; rejects |det| != 1.
    pub fn new(rows: &[Vec<i64>], translation: LatticeVector) -> Result<Self> {
        let dim = translation.dim();
        if rows.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: rows.len(),
            });
        }
        let mut matrix = [[0; 3]; 3];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            matrix[i][..dim].copy_from_slice(row);
        }
        let m = Self {
            dim,
            matrix,
            translation,
        };
        let d = m.det();
        if d.abs() != 1 {
            return Err(Error::NotUnimodular(d));
        }
        Ok(m)
    }

    /// The linear map sending `e_i` to `columns[i]`.
    pub fn from_columns(columns: &[LatticeVector]) -> Result<Self> {
        let dim = columns.len();
        let rows: Vec<Vec<i64>> = (0..dim)
            .map(|i| columns.iter().map(|c| c.get(i)).collect())
            .collect();
        for c in columns {
            c.check_dim(dim)?;
        }
        Self::new(&rows, LatticeVector::zero(dim))
    }

    /// The translation `x -> x + t`.
    pub fn translation_by(t: LatticeVector) -> Self {
        Self {
            translation: t,
            ..Self::identity(t.dim())
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix_rows(&self) -> Vec<Vec<i64>> {
        (0..self.dim)
            .map(|i| self.matrix[i][..self.dim].to_vec())
            .collect()
    }

    pub fn translation(&self) -> LatticeVector {
        self.translation
    }

    pub fn det(&self) -> i64 {
        let cols: Vec<LatticeVector> = (0..self.dim).map(|j| self.column(j)).collect();
        det(&cols).expect("dimension checked at construction")
    }

    fn column(&self, j: usize) -> LatticeVector {
        let mut v = LatticeVector::zero(self.dim);
        for i in 0..self.dim {
            v.c[i] = self.matrix[i][j];
        }
        v
    }

    pub fn apply_linear(&self, p: &LatticeVector) -> LatticeVector {
        let mut out = LatticeVector::zero(self.dim);
        for i in 0..self.dim {
            out.c[i] = (0..self.dim).map(|j| self.matrix[i][j] * p.c[j]).sum();
        }
        out
    }

    pub fn apply(&self, p: &LatticeVector) -> Result<LatticeVector> {
        p.check_dim(self.dim)?;
        Ok(self.apply_unchecked(p))
    }

    #[inline]
    pub(crate) fn apply_unchecked(&self, p: &LatticeVector) -> LatticeVector {
        self.apply_linear(p) + self.translation
    }

    /// `self` followed by `next`.
    #[allow(clippy::needless_range_loop)]
    pub fn then(&self, next: &Self) -> Self {
        assert_eq!(self.dim, next.dim);
        let mut matrix = [[0; 3]; 3];
        for i in 0..self.dim {
            for j in 0..self.dim {
                matrix[i][j] = (0..self.dim)
                    .map(|k| next.matrix[i][k] * self.matrix[k][j])
                    .sum();
            }
        }
        Self {
            dim: self.dim,
            matrix,
            translation: next.apply_unchecked(&self.translation),
        }
    }

    #[allow(clippy::needless_range_loop)]
    pub fn inverse(&self) -> Self {
        let d = self.det();
        let n = self.dim;
        let m = &self.matrix;
        let mut inv = [[0; 3]; 3];
        if n == 2 {
            inv[0][0] = m[1][1] * d;
            inv[0][1] = -m[0][1] * d;
            inv[1][0] = -m[1][0] * d;
            inv[1][1] = m[0][0] * d;
        } else {
            // adjugate divided by det (= multiplied, as det is +-1)
            for i in 0..3 {
                for j in 0..3 {
                    let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                    let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                    inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) * d;
                }
            }
        }
        let lin = Self {
            dim: n,
            matrix: inv,
            translation: LatticeVector::zero(n),
        };
        let t = -lin.apply_linear(&self.translation);
        Self {
            translation: t,
            ..lin
        }
    }
}

impl fmt::Display for UnimodularAffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .matrix_rows()
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(
            f,
            "matrix [{}] translation {}",
            rows.join(", "),
            self.translation
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v3(x: i64, y: i64, z: i64) -> LatticeVector {
        LatticeVector::new3(x, y, z)
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(v3(2, 4, 6).primitive().unwrap(), (v3(1, 2, 3), 2));
        assert_eq!(v3(0, 1, 0).primitive().unwrap(), (v3(0, 1, 0), 1));
        assert_eq!(v3(-3, 0, 0).primitive().unwrap(), (v3(-1, 0, 0), 3));
        assert_eq!(v3(0, 0, 0).primitive(), Err(Error::ZeroVector));
        assert_eq!(
            Error::ZeroVector.to_string(),
            "zero has no primitive direction"
        );
    }

    #[test]
    fn lattice_basis_examples() {
        let e = |i| LatticeVector::unit(3, i);
        assert!(is_lattice_basis(&[e(0), e(1), e(2)]).unwrap());
        assert!(
            !is_lattice_basis(&[LatticeVector::new2(1, 0), LatticeVector::new2(1, 2)]).unwrap()
        );
        assert!(is_lattice_basis(&[v3(1, 0, 0), v3(1, 1, 0), v3(1, 1, 1)]).unwrap());
        assert!(is_lattice_basis(&[v3(1, 0, 0), LatticeVector::new2(0, 1), v3(0, 0, 1)]).is_err());
        assert!(is_lattice_basis(&[v3(1, 0, 0), v3(0, 1, 0)]).is_err());
    }

    #[test]
    fn apply_examples() {
        let id = UnimodularAffineMap::identity(3);
        assert_eq!(id.apply(&v3(5, 7, 9)).unwrap(), v3(5, 7, 9));

        let phi =
            UnimodularAffineMap::new(&[vec![-1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]], v3(2, 0, 0))
                .unwrap();
        assert_eq!(phi.apply(&v3(0, 0, 0)).unwrap(), v3(2, 0, 0));

        let shear =
            UnimodularAffineMap::new(&[vec![1, -1], vec![0, 1]], LatticeVector::zero(2)).unwrap();
        assert_eq!(
            shear.apply(&LatticeVector::new2(1, 1)).unwrap(),
            LatticeVector::new2(0, 1)
        );
        assert!(shear.apply(&v3(1, 1, 1)).is_err());
    }

    #[test]
    fn non_unimodular_matrix_is_rejected() {
        let r = UnimodularAffineMap::new(&[vec![2, 0], vec![0, 1]], LatticeVector::zero(2));
        assert_eq!(r, Err(Error::NotUnimodular(2)));
    }

    #[test]
    fn composition_order() {
        let t = UnimodularAffineMap::translation_by(LatticeVector::new2(1, 0));
        let swap =
            UnimodularAffineMap::new(&[vec![0, 1], vec![1, 0]], LatticeVector::zero(2)).unwrap();
        let p = LatticeVector::new2(0, 0);
        // translate first, then swap: (0,0) -> (1,0) -> (0,1)
        assert_eq!(t.then(&swap).apply(&p).unwrap(), LatticeVector::new2(0, 1));
        assert_eq!(swap.then(&t).apply(&p).unwrap(), LatticeVector::new2(1, 0));
    }

    #[test]
    fn rank_of_vectors() {
        assert_eq!(rank(&[v3(1, 2, 3), v3(2, 4, 6)]), 1);
        assert_eq!(rank(&[v3(1, 0, 0), v3(0, 1, 0), v3(1, 1, 0)]), 2);
        assert_eq!(rank(&[v3(1, 0, 0), v3(0, 1, 0), v3(1, 1, 1)]), 3);
        assert_eq!(rank(&[]), 0);
    }

    fn unimodular3() -> impl Strategy<Value = UnimodularAffineMap> {
        // products of elementary shears and a sign flip
        (
            prop::collection::vec((0usize..3, 0usize..3, -3i64..=3), 0..6),
            prop::bool::ANY,
            (-5i64..=5, -5i64..=5, -5i64..=5),
        )
            .prop_map(|(shears, flip, (a, b, c))| {
                let mut m = UnimodularAffineMap::identity(3);
                for (i, j, k) in shears {
                    if i == j {
                        continue;
                    }
                    let mut rows = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
                    rows[i][j] = k;
                    let e = UnimodularAffineMap::new(&rows, LatticeVector::zero(3)).unwrap();
                    m = m.then(&e);
                }
                if flip {
                    let f = UnimodularAffineMap::new(
                        &[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]],
                        LatticeVector::zero(3),
                    )
                    .unwrap();
                    m = m.then(&f);
                }
                m.then(&UnimodularAffineMap::translation_by(v3(a, b, c)))
            })
    }

    proptest! {
        #[test]
        fn inverse_round_trip(m in unimodular3(), x in -20i64..20, y in -20i64..20, z in -20i64..20) {
            let p = v3(x, y, z);
            prop_assert_eq!(m.inverse().apply(&m.apply(&p).unwrap()).unwrap(), p);
            prop_assert_eq!(m.det().abs(), 1);
        }

        #[test]
        fn basis_test_ignores_order_and_sign(m in unimodular3(), perm in 0usize..6, neg in 0usize..3) {
            let mut cols: Vec<LatticeVector> = (0..3).map(|j| m.apply_linear(&LatticeVector::unit(3, j))).collect();
            prop_assert!(is_lattice_basis(&cols).unwrap());
            let p = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]][perm];
            cols = p.iter().map(|&i| cols[i]).collect();
            cols[neg] = -cols[neg];
            prop_assert!(is_lattice_basis(&cols).unwrap());
            cols[0] = cols[0].scale(2);
            prop_assert!(!is_lattice_basis(&cols).unwrap());
        }

        #[test]
        fn primitive_scaling_law(x in -50i64..50, y in -50i64..50, z in -50i64..50, k in 1i64..20) {
            let v = v3(x, y, z);
            prop_assume!(!v.is_zero());
            let (w, g) = v.primitive().unwrap();
            prop_assert_eq!(w.scale(g), v);
            prop_assert!(w.is_primitive());
            prop_assert_eq!(v.scale(k).primitive().unwrap(), (w, k * g));
        }
    }
}
