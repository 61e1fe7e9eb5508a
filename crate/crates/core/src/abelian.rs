//! Integer matrices, Smith normal form and finitely generated abelian groups.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect())
            .collect();
        write!(f, "IntMatrix{rows:?}")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows_with_cols(rows, cols)
    }

    /// Like [`Self::from_rows`] but keeps the column count for empty input.
    pub fn from_rows_with_cols<T: Into<BigInt> + Clone>(rows: &[Vec<T>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, x.clone().into());
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(columns: &[Vec<BigInt>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column has wrong length");
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, d) in entries.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (a, x) in self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> IntMatrix {
        let mut out = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out.set(i - r0, j - c0, self.get(i, j).clone());
            }
        }
        out
    }

    /// Bareiss fraction-free determinant.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            for c in 0..self.cols {
                self.data.swap(i * self.cols + c, j * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + i, r * self.cols + j);
            }
        }
    }

    /// `row_i += q * row_j`
    fn add_row(&mut self, i: usize, j: usize, q: &BigInt) {
        for c in 0..self.cols {
            let t = q * &self.data[j * self.cols + c];
            self.data[i * self.cols + c] += t;
        }
    }

    /// `col_i += q * col_j`
    fn add_col(&mut self, i: usize, j: usize, q: &BigInt) {
        for r in 0..self.rows {
            let t = q * &self.data[r * self.cols + j];
            self.data[r * self.cols + i] += t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let x = std::mem::take(&mut self.data[i * self.cols + c]);
            self.data[i * self.cols + c] = -x;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            let x = std::mem::take(&mut self.data[r * self.cols + j]);
            self.data[r * self.cols + j] = -x;
        }
    }
}

/// `u * a * v = d` with `u`, `v` unimodular, `d` diagonal with
/// `d_1 | d_2 | ...` and nonnegative entries.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    /// Diagonal entries, `min(rows, cols)` of them.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Nearest-integer quotient, so that `|a - q b| <= |b| / 2`.
fn round_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut q, r) = a.div_mod_floor(b);
    if (&r * 2u32).abs() > b.abs() {
        q += 1;
    }
    q
}

struct SmithState {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
}

impl SmithState {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
    }

    /// `row_i += q row_j`
    fn add_row(&mut self, i: usize, j: usize, q: &BigInt) {
        self.a.add_row(i, j, q);
        self.u.add_row(i, j, q);
        self.u_inv.add_col(j, i, &-q);
    }

    fn add_col(&mut self, i: usize, j: usize, q: &BigInt) {
        self.a.add_col(i, j, q);
        self.v.add_col(i, j, q);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }
}

/// Smith normal form with deterministic pivoting: the nonzero entry of
/// smallest absolute value, ties broken in row-major order.
pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let (m, n) = (a.rows, a.cols);
    let mut s = SmithState {
        a: a.clone(),
        u: IntMatrix::identity(m),
        u_inv: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
    };
    for t in 0..m.min(n) {
        let Some((pi, pj)) = smallest_entry(&s.a, (t..m).flat_map(|i| (t..n).map(move |j| (i, j))))
        else {
            break;
        };
        s.swap_rows(t, pi);
        s.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if !s.a.get(i, t).is_zero() {
                    let q = round_quotient(s.a.get(i, t), s.a.get(t, t));
                    s.add_row(i, t, &-q);
                    dirty |= !s.a.get(i, t).is_zero();
                }
            }
            for j in t + 1..n {
                if !s.a.get(t, j).is_zero() {
                    let q = round_quotient(s.a.get(t, j), s.a.get(t, t));
                    s.add_col(j, t, &-q);
                    dirty |= !s.a.get(t, j).is_zero();
                }
            }
            if dirty {
                let cross = (t..m).map(|i| (i, t)).chain((t + 1..n).map(|j| (t, j)));
                let (pi, pj) = smallest_entry(&s.a, cross).expect("pivot is nonzero");
                s.swap_rows(t, pi);
                s.swap_cols(t, pj);
                continue;
            }
            // Row and column are clear; enforce divisibility of the rest.
            let pivot = s.a.get(t, t).clone();
            let offender = (t + 1..m).find(|&i| {
                (t + 1..n).any(|j| !s.a.get(i, j).is_multiple_of(&pivot))
            });
            match offender {
                Some(i) => s.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if s.a.get(t, t).is_negative() {
            s.negate_row(t);
        }
    }
    Smith { u: s.u, u_inv: s.u_inv, d: s.a, v: s.v }
}

fn smallest_entry(
    a: &IntMatrix,
    cells: impl Iterator<Item = (usize, usize)>,
) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    let mut cells: Vec<(usize, usize)> = cells.collect();
    cells.sort_unstable();
    for (i, j) in cells {
        let x = a.get(i, j);
        if x.is_zero() {
            continue;
        }
        let ax = x.abs();
        if best.as_ref().is_none_or(|(_, b)| ax < *b) {
            best = Some(((i, j), ax));
        }
    }
    best.map(|(c, _)| c)
}

/// A particular solution and generators of the homogeneous solutions of
/// `A x = b (mod col-span R)`.
#[derive(Debug, Clone)]
pub struct LatticeSolution {
    pub particular: Vec<BigInt>,
    pub homogeneous: Vec<Vec<BigInt>>,
}

/// Certificate of infeasibility: `functional . A` and `functional . R`
/// vanish modulo `modulus` while `functional . b` does not. A zero modulus
/// means the functional vanishes over the integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Infeasible {
    pub functional: Vec<BigInt>,
    pub modulus: BigInt,
}

impl From<Infeasible> for Error {
    fn from(_: Infeasible) -> Self {
        Error::NoSolution
    }
}

/// Solves `A x = b` modulo the column span of `R` (which must have as many
/// rows as `A`).
pub fn solve_mod_lattice(
    a: &IntMatrix,
    b: &[BigInt],
    r: &IntMatrix,
) -> std::result::Result<LatticeSolution, Infeasible> {
    assert_eq!(a.rows, b.len(), "right-hand side has wrong length");
    assert_eq!(a.rows, r.rows, "relation matrix has wrong row count");
    let n = a.cols;
    let big = a.hstack(r);
    let snf = smith_normal_form(&big);
    let c = snf.u.mul_vec(b);
    let diag = snf.diagonal();
    let total = big.cols;
    let mut y = vec![BigInt::zero(); total];
    for (i, ci) in c.iter().enumerate() {
        let di = diag.get(i).cloned().unwrap_or_default();
        if di.is_zero() {
            if !ci.is_zero() {
                return Err(Infeasible { functional: snf.u.row(i), modulus: BigInt::zero() });
            }
        } else {
            let (q, rem) = ci.div_mod_floor(&di);
            if !rem.is_zero() {
                return Err(Infeasible { functional: snf.u.row(i), modulus: di });
            }
            y[i] = q;
        }
    }
    let z = snf.v.mul_vec(&y);
    let particular = z[..n].to_vec();
    let homogeneous = (0..total)
        .filter(|&i| diag.get(i).is_none_or(|d| d.is_zero()))
        .map(|i| snf.v.col(i)[..n].to_vec())
        .filter(|h| h.iter().any(|x| !x.is_zero()))
        .collect();
    Ok(LatticeSolution { particular, homogeneous })
}

/// `Z^rank / col-span(relations)`.
#[derive(Debug, Clone)]
pub struct FgAbelian {
    pub rank: usize,
    pub relations: IntMatrix,
}

/// A quotient of `Z^m` in Smith coordinates: `Z^m/L = (+) Z/factors[i]`
/// (0 means a free summand).
#[derive(Debug, Clone)]
pub struct QuotientMap {
    pub factors: Vec<BigInt>,
    /// `factors.len() x m`: ambient coordinates to quotient coordinates.
    pub proj: IntMatrix,
    /// `m x factors.len()`: a section of `proj`.
    pub lift: IntMatrix,
}

impl QuotientMap {
    /// Quotient coordinates, reduced into `[0, d_i)` for finite factors.
    pub fn project(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.proj
            .mul_vec(x)
            .into_iter()
            .zip(&self.factors)
            .map(|(y, d)| if d.is_zero() { y } else { y.mod_floor(d) })
            .collect()
    }

    pub fn order(&self) -> Option<BigInt> {
        if self.factors.iter().any(|d| d.is_zero()) {
            None
        } else {
            Some(self.factors.iter().product())
        }
    }

    pub fn presentation(&self) -> FgAbelian {
        FgAbelian::from_factors(&self.factors)
    }

    /// Order of the class of `x`.
    pub fn element_order(&self, x: &[BigInt]) -> Result<BigInt> {
        order_in_factors(&self.factors, &self.project(x))
    }

    pub fn is_zero(&self, x: &[BigInt]) -> bool {
        self.project(x).iter().all(|y| y.is_zero())
    }
}

pub fn order_in_factors(factors: &[BigInt], y: &[BigInt]) -> Result<BigInt> {
    let mut order = BigInt::one();
    for (d, c) in factors.iter().zip(y) {
        if d.is_zero() {
            if !c.is_zero() {
                return Err(Error::InfiniteOrder);
            }
        } else {
            order = order.lcm(&(d / d.gcd(c)));
        }
    }
    Ok(order)
}

impl FgAbelian {
    pub fn new(rank: usize, relations: IntMatrix) -> Self {
        assert_eq!(relations.rows, rank);
        FgAbelian { rank, relations }
    }

    /// `(+) Z/d_i`.
    pub fn from_factors(factors: &[BigInt]) -> Self {
        FgAbelian { rank: factors.len(), relations: IntMatrix::diagonal(factors) }
    }

    /// Presentation of `P / <generators>`.
    pub fn quotient(&self, generators: &[Vec<BigInt>]) -> QuotientMap {
        let gens = IntMatrix::from_columns(generators, self.rank);
        let stacked = self.relations.hstack(&gens);
        let snf = smith_normal_form(&stacked);
        let diag = snf.diagonal();
        let keep: Vec<usize> = (0..self.rank)
            .filter(|&i| diag.get(i).is_none_or(|d| !d.is_one()))
            .collect();
        let factors = keep.iter().map(|&i| diag.get(i).cloned().unwrap_or_default()).collect();
        let proj_rows: Vec<Vec<BigInt>> = keep.iter().map(|&i| snf.u.row(i)).collect();
        let lift_cols: Vec<Vec<BigInt>> = keep.iter().map(|&i| snf.u_inv.col(i)).collect();
        QuotientMap {
            factors,
            proj: IntMatrix::from_rows_with_cols(&proj_rows, self.rank),
            lift: IntMatrix::from_columns(&lift_cols, self.rank),
        }
    }

    pub fn smith(&self) -> QuotientMap {
        self.quotient(&[])
    }

    /// Invariant factors `d_1 | d_2 | ...` (units dropped, 0 for free summands).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.smith().factors
    }

    pub fn order(&self) -> Option<BigInt> {
        self.smith().order()
    }

    pub fn element_order(&self, x: &[BigInt]) -> Result<BigInt> {
        self.smith().element_order(x)
    }

    pub fn contains(&self, generators: &[Vec<BigInt>], x: &[BigInt]) -> bool {
        self.quotient(generators).is_zero(x)
    }
}

/// Convenience conversion for small factor lists.
pub fn to_u64s(v: &[BigInt]) -> Vec<u64> {
    v.iter().map(|x| x.to_u64().expect("value fits in u64")).collect()
}

pub fn bigints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn check_smith(a: &IntMatrix) -> Smith {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(a.rows()));
        assert_eq!(s.u.determinant().abs(), BigInt::one());
        assert_eq!(s.v.determinant().abs(), BigInt::one());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        let diag = s.diagonal();
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        s
    }

    #[test]
    fn smith_examples() {
        assert_eq!(check_smith(&mat(&[&[2, 0], &[0, 3]])).diagonal(), bigints(&[1, 6]));
        let s = check_smith(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
        assert_eq!(check_smith(&mat(&[&[0]])).diagonal(), bigints(&[0]));
        assert_eq!(
            check_smith(&mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]])).diagonal(),
            bigints(&[2, 6, 12])
        );
        check_smith(&IntMatrix::zeros(0, 3));
        check_smith(&mat(&[&[4, 6]]));
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(mat(&[&[2, 0], &[0, 3]]).determinant(), BigInt::from(6));
        assert_eq!(mat(&[&[0, 1], &[1, 0]]).determinant(), BigInt::from(-1));
        assert_eq!(mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]).determinant(), BigInt::from(-3));
        assert_eq!(mat(&[&[1, 2], &[2, 4]]).determinant(), BigInt::zero());
    }

    #[test]
    fn solve_examples() {
        let sol = solve_mod_lattice(&mat(&[&[2]]), &bigints(&[1]), &mat(&[&[5]])).unwrap();
        assert_eq!(sol.particular[0].mod_floor(&BigInt::from(5)), BigInt::from(3));
        let sol = solve_mod_lattice(&mat(&[&[2]]), &bigints(&[0]), &mat(&[&[5]])).unwrap();
        assert_eq!(sol.particular, bigints(&[0]));
        let err = solve_mod_lattice(&mat(&[&[2]]), &bigints(&[1]), &mat(&[&[4]])).unwrap_err();
        // functional . b must be nonzero mod the modulus while killing A and R
        let f = &err.functional;
        assert!(!err.modulus.is_zero());
        assert!((&f[0] * BigInt::from(2)).is_multiple_of(&err.modulus));
        assert!((&f[0] * BigInt::from(4)).is_multiple_of(&err.modulus));
        assert!(!f[0].is_multiple_of(&err.modulus));
        // over the integers: x + y = 1, x + y = 2
        let err = solve_mod_lattice(&mat(&[&[1, 1], &[1, 1]]), &bigints(&[1, 2]), &IntMatrix::zeros(2, 0))
            .unwrap_err();
        assert!(err.modulus.is_zero());
    }

    #[test]
    fn quotient_examples() {
        let z4 = FgAbelian::from_factors(&bigints(&[4]));
        assert_eq!(z4.quotient(&[bigints(&[2])]).factors, bigints(&[2]));
        let v4 = FgAbelian::from_factors(&bigints(&[2, 2]));
        assert_eq!(v4.quotient(&[bigints(&[1, 1])]).factors, bigints(&[2]));
        assert_eq!(v4.quotient(&[]).factors, bigints(&[2, 2]));
        let all = v4.quotient(&[bigints(&[1, 0]), bigints(&[0, 1])]);
        assert!(all.factors.is_empty());
        assert_eq!(all.order(), Some(BigInt::one()));
        let q = FgAbelian::new(2, IntMatrix::zeros(2, 0)).quotient(&[bigints(&[2, 0])]);
        assert_eq!(q.factors, bigints(&[2, 0]));
        assert_eq!(q.order(), None);
    }

    #[test]
    fn order_examples() {
        let z6 = FgAbelian::from_factors(&bigints(&[6]));
        assert_eq!(z6.element_order(&bigints(&[0])).unwrap(), BigInt::one());
        assert_eq!(z6.element_order(&bigints(&[2])).unwrap(), BigInt::from(3));
        let g = FgAbelian::from_factors(&bigints(&[4, 2]));
        assert_eq!(g.element_order(&bigints(&[1, 1])).unwrap(), BigInt::from(4));
        let z = FgAbelian::new(1, IntMatrix::zeros(1, 0));
        assert_eq!(z.element_order(&bigints(&[3])), Err(Error::InfiniteOrder));
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-9i64..10, r * c).prop_map(move |v| {
                let rows: Vec<Vec<i64>> = v.chunks(c).map(|x| x.to_vec()).collect();
                IntMatrix::from_rows(&rows)
            })
        })
    }

    proptest! {
        #[test]
        fn smith_identity_holds(a in small_matrix()) {
            check_smith(&a);
        }

        #[test]
        fn smith_is_deterministic(a in small_matrix()) {
            let s1 = smith_normal_form(&a);
            let s2 = smith_normal_form(&a);
            prop_assert_eq!(s1.u, s2.u);
            prop_assert_eq!(s1.v, s2.v);
        }

        #[test]
        fn quotient_by_everything_is_trivial(a in small_matrix()) {
            let p = FgAbelian::new(a.rows(), a.clone());
            let gens: Vec<Vec<BigInt>> = (0..a.rows())
                .map(|i| (0..a.rows()).map(|j| BigInt::from((i == j) as i64)).collect())
                .collect();
            prop_assert!(p.quotient(&gens).factors.is_empty());
        }

        #[test]
        fn solutions_substitute(a in small_matrix(), seed in proptest::collection::vec(-5i64..6, 6)) {
            let x0: Vec<BigInt> = seed.iter().take(a.cols()).map(|&x| BigInt::from(x)).collect();
            prop_assume!(x0.len() == a.cols());
            let b = a.mul_vec(&x0);
            let r = IntMatrix::diagonal(&vec![BigInt::from(6); a.rows()]);
            let sol = solve_mod_lattice(&a, &b, &r).unwrap();
            let p = FgAbelian::new(a.rows(), r.clone());
            let diff: Vec<BigInt> = a.mul_vec(&sol.particular).iter().zip(&b).map(|(x, y)| x - y).collect();
            prop_assert!(p.contains(&[], &diff));
            for h in &sol.homogeneous {
                prop_assert!(p.contains(&[], &a.mul_vec(h)));
            }
        }
    }
}
