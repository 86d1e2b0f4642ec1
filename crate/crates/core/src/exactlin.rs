//! Exact integer linear algebra.
//!
//! Smith normal form with unimodular transforms, ranks, integer right inverses
//! and certification of short exact sequences `0 -> Z^n -> Z^r -> Z^(r-n) -> 0`.
//!
//! Matrices hold `i64` entries. Every arithmetic step is checked; when a
//! 64-bit computation overflows, the same algorithm is rerun over `BigInt` and
//! the result is narrowed back, so callers only ever see [`Error::Overflow`]
//! when the answer itself does not fit.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "MatrixRepr", try_from = "MatrixRepr")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

/// JSON shape: `{"rows":n,"cols":m,"entries":[[...],...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<i64>>,
}

impl From<IntMatrix> for MatrixRepr {
    fn from(m: IntMatrix) -> Self {
        MatrixRepr {
            rows: m.rows,
            cols: m.cols,
            entries: m.to_rows(),
        }
    }
}

impl TryFrom<MatrixRepr> for IntMatrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        if r.entries.len() != r.rows {
            return Err(Error::DimensionMismatch(format!(
                "declared {} rows, found {}",
                r.rows,
                r.entries.len()
            )));
        }
        let mut m = IntMatrix::zeros(r.rows, r.cols);
        for (i, row) in r.entries.iter().enumerate() {
            if row.len() != r.cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    r.cols
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from row vectors. All rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        IntMatrix::try_from(MatrixRepr {
            rows: r,
            cols: c,
            entries: rows,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn entries(&self) -> impl Iterator<Item = i64> + '_ {
        self.data.iter().copied()
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn place(&mut self, r0: usize, c0: usize, block: &IntMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j));
            }
        }
    }

    /// Columns selected by index, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for (k, &j) in cols.iter().enumerate() {
            for i in 0..self.rows {
                m.set(i, k, self.get(i, j));
            }
        }
        m
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc: i64 = 0;
                for k in 0..self.cols {
                    let p = self
                        .get(i, k)
                        .checked_mul(rhs.get(k, j))
                        .ok_or(Error::Overflow("matrix product"))?;
                    acc = acc.checked_add(p).ok_or(Error::Overflow("matrix product"))?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    fn to_big(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = i64;

    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// `left * M * right = diag(invariant_factors)` padded with zeros.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnfDecomposition {
    pub left: IntMatrix,
    /// Length `min(rows, cols)`; nonzero entries first, each dividing the next.
    pub diag: Vec<i64>,
    pub right: IntMatrix,
}

impl SnfDecomposition {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|&&d| d != 0).count()
    }

    /// The `rows x cols` diagonal matrix carrying the invariant factors.
    pub fn diagonal_matrix(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.left.rows(), self.right.rows());
        for (i, &v) in self.diag.iter().enumerate() {
            d.set(i, i, v);
        }
        d
    }
}

/// Ring operations the elimination needs. `None` signals overflow.
trait Scalar: Clone + PartialEq + fmt::Debug {
    fn nil() -> Self;
    fn unit() -> Self;
    fn vanishes(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn cmp_abs(&self, other: &Self) -> Ordering;
    fn plus(&self, b: &Self) -> Option<Self>;
    fn times(&self, b: &Self) -> Option<Self>;
    fn negated(&self) -> Option<Self>;
    /// Truncating quotient.
    fn quot(&self, b: &Self) -> Option<Self>;
    fn divides(&self, b: &Self) -> bool;

    /// `self - q * b`
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        self.plus(&q.times(b)?.negated()?)
    }
}

impl Scalar for i64 {
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn vanishes(&self) -> bool {
        *self == 0
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.unsigned_abs().cmp(&other.unsigned_abs())
    }
    fn plus(&self, b: &Self) -> Option<Self> {
        self.checked_add(*b)
    }
    fn times(&self, b: &Self) -> Option<Self> {
        self.checked_mul(*b)
    }
    fn negated(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn quot(&self, b: &Self) -> Option<Self> {
        self.checked_div(*b)
    }
    fn divides(&self, b: &Self) -> bool {
        // b % self, guarding MIN % -1
        *self == -1 || b % self == 0
    }
}

impl Scalar for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.magnitude().cmp(other.magnitude())
    }
    fn plus(&self, b: &Self) -> Option<Self> {
        Some(self + b)
    }
    fn times(&self, b: &Self) -> Option<Self> {
        Some(self * b)
    }
    fn negated(&self) -> Option<Self> {
        Some(-self)
    }
    fn quot(&self, b: &Self) -> Option<Self> {
        Some(self / b)
    }
    fn divides(&self, b: &Self) -> bool {
        Zero::is_zero(&(b % self))
    }
}

type Dense<T> = Vec<Vec<T>>;

fn identity_dense<T: Scalar>(n: usize) -> Dense<T> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::unit() } else { T::nil() })
                .collect()
        })
        .collect()
}

/// `row[dst] -= q * row[src]`
fn row_sub<T: Scalar>(m: &mut Dense<T>, dst: usize, src: usize, q: &T) -> Option<()> {
    for j in 0..m[dst].len() {
        let v = m[dst][j].sub_mul(q, &m[src][j])?;
        m[dst][j] = v;
    }
    Some(())
}

fn col_sub<T: Scalar>(m: &mut Dense<T>, dst: usize, src: usize, q: &T) -> Option<()> {
    for row in m.iter_mut() {
        let v = row[dst].sub_mul(q, &row[src])?;
        row[dst] = v;
    }
    Some(())
}

fn swap_cols<T>(m: &mut Dense<T>, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// Smith normal form by smallest-pivot elimination. Returns `(U, diag, V)`
/// with `U A V = D`, or `None` if the scalar type overflowed.
fn snf_dense<T: Scalar>(mut a: Dense<T>, rows: usize, cols: usize) -> Option<(Dense<T>, Vec<T>, Dense<T>)> {
    let mut u = identity_dense::<T>(rows);
    let mut v = identity_dense::<T>(cols);
    let steps = rows.min(cols);
    let mut diag = vec![T::nil(); steps];

    'outer: for t in 0..steps {
        loop {
            // smallest |a_ij| over the trailing block, first in row-major order on ties
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j].vanishes() {
                        continue;
                    }
                    match pivot {
                        Some((pi, pj)) if a[i][j].cmp_abs(&a[pi][pj]) != Ordering::Less => {}
                        _ => pivot = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                break 'outer;
            };
            a.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut v, t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].vanishes() {
                    continue;
                }
                let q = a[i][t].quot(&a[t][t])?;
                row_sub(&mut a, i, t, &q)?;
                row_sub(&mut u, i, t, &q)?;
                clean &= a[i][t].vanishes();
            }
            for j in t + 1..cols {
                if a[t][j].vanishes() {
                    continue;
                }
                let q = a[t][j].quot(&a[t][t])?;
                col_sub(&mut a, j, t, &q)?;
                col_sub(&mut v, j, t, &q)?;
                clean &= a[t][j].vanishes();
            }
            if !clean {
                continue;
            }

            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[t][t].divides(&a[i][j])));
            match offender {
                Some(i) => {
                    let m1 = T::unit().negated()?;
                    row_sub(&mut a, t, i, &m1)?;
                    row_sub(&mut u, t, i, &m1)?;
                }
                None => break,
            }
        }
        if a[t][t].is_neg() {
            for x in a[t].iter_mut() {
                *x = x.negated()?;
            }
            for x in u[t].iter_mut() {
                *x = x.negated()?;
            }
        }
        diag[t] = a[t][t].clone();
    }
    Some((u, diag, v))
}

fn narrow(m: &Dense<BigInt>, what: &'static str) -> Result<IntMatrix> {
    let rows: Option<Vec<Vec<i64>>> = m
        .iter()
        .map(|r| r.iter().map(ToPrimitive::to_i64).collect())
        .collect();
    let rows = rows.ok_or(Error::Overflow(what))?;
    let c = rows.first().map_or(0, Vec::len);
    let mut out = IntMatrix::zeros(rows.len(), c);
    for (i, r) in rows.iter().enumerate() {
        for (j, &x) in r.iter().enumerate() {
            out.set(i, j, x);
        }
    }
    Ok(out)
}

fn from_dense(m: Dense<i64>, rows: usize, cols: usize) -> IntMatrix {
    IntMatrix {
        rows,
        cols,
        data: m.into_iter().flatten().collect(),
    }
}

/// Smith normal form `left * M * right = D` with unimodular `left`, `right`.
pub fn smith_normal_form(m: &IntMatrix) -> Result<SnfDecomposition> {
    if m.rows == 0 || m.cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    if let Some((u, d, v)) = snf_dense(m.to_rows(), m.rows, m.cols) {
        return Ok(SnfDecomposition {
            left: from_dense(u, m.rows, m.rows),
            diag: d,
            right: from_dense(v, m.cols, m.cols),
        });
    }
    let (u, d, v) = snf_dense(m.to_big(), m.rows, m.cols).expect("bigint arithmetic cannot overflow");
    Ok(SnfDecomposition {
        left: narrow(&u, "smith normal form (left transform)")?,
        diag: d
            .iter()
            .map(|x| x.to_i64().ok_or(Error::Overflow("invariant factor")))
            .collect::<Result<_>>()?,
        right: narrow(&v, "smith normal form (right transform)")?,
    })
}

/// Rank over Q, read off as the number of nonzero invariant factors.
pub fn integer_rank(m: &IntMatrix) -> Result<usize> {
    if m.rows == 0 || m.cols == 0 {
        return Ok(0);
    }
    Ok(smith_normal_form(m)?.rank())
}

/// Outcome of the five independent checks on `0 -> Z^n --tV--> Z^r --W--> Z^(r-n) -> 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    /// (a) `W * tV = 0`
    pub orthogonal: bool,
    /// (b) `rank V = n`
    pub rank_v: usize,
    pub expected_rank_v: usize,
    /// (c) `rank W = r - n`
    pub rank_w: usize,
    pub expected_rank_w: usize,
    /// (d) every invariant factor of V is 1
    pub v_factors: Vec<i64>,
    /// (e) every invariant factor of W is 1
    pub w_factors: Vec<i64>,
}

impl ExactnessReport {
    pub fn v_saturated(&self) -> bool {
        self.v_factors.iter().all(|&d| d == 1)
    }

    pub fn w_surjective(&self) -> bool {
        self.w_factors.iter().all(|&d| d == 1)
    }

    /// Letters of the failed conditions, `a` through `e`.
    pub fn failures(&self) -> Vec<char> {
        let mut f = Vec::new();
        if !self.orthogonal {
            f.push('a');
        }
        if self.rank_v != self.expected_rank_v {
            f.push('b');
        }
        if self.rank_w != self.expected_rank_w {
            f.push('c');
        }
        if !self.v_saturated() {
            f.push('d');
        }
        if !self.w_surjective() {
            f.push('e');
        }
        f
    }

    pub fn is_exact(&self) -> bool {
        self.failures().is_empty()
    }
}

/// Certifies exactness of `0 -> Z^n -> Z^r -> Z^(r-n) -> 0` for an `n x r`
/// matrix `V` and an `(r-n) x r` matrix `W`.
pub fn verify_exact_sequence(v: &IntMatrix, w: &IntMatrix) -> Result<ExactnessReport> {
    if v.cols != w.cols || v.rows + w.rows != v.cols {
        return Err(Error::DimensionMismatch(format!(
            "V is {}x{}, W is {}x{}",
            v.rows, v.cols, w.rows, w.cols
        )));
    }
    let orthogonal = w.checked_mul(&v.transpose())?.is_zero();
    let sv = smith_normal_form(v)?;
    let sw = smith_normal_form(w)?;
    Ok(ExactnessReport {
        orthogonal,
        rank_v: sv.rank(),
        expected_rank_v: v.rows,
        rank_w: sw.rank(),
        expected_rank_w: w.rows,
        v_factors: sv.diag,
        w_factors: sw.diag,
    })
}

/// Integer `B` with `W * B = I`, built as `right[:, ..m] * left` from the
/// Smith form of `W`. Requires every invariant factor of `W` to be 1.
pub fn integer_right_inverse(w: &IntMatrix) -> Result<IntMatrix> {
    let snf = smith_normal_form(w)?;
    let m = w.rows;
    if snf.diag.len() < m || snf.diag.iter().any(|&d| d != 1) {
        return Err(Error::NotSurjective(snf.diag));
    }
    let idx: Vec<usize> = (0..m).collect();
    let head = snf.right.select_columns(&idx);
    match head.checked_mul(&snf.left) {
        Ok(b) => Ok(b),
        Err(Error::Overflow(_)) => {
            let hb = head.to_big();
            let lb = snf.left.to_big();
            let prod: Dense<BigInt> = hb
                .iter()
                .map(|row| {
                    (0..m)
                        .map(|j| row.iter().zip(&lb).map(|(a, l)| a * &l[j]).sum())
                        .collect()
                })
                .collect();
            narrow(&prod, "integer right inverse")
        }
        Err(e) => Err(e),
    }
}

/// Rank over Q by fraction-free elimination on big integers.
///
/// This route shares no code with the Smith form and is used where an
/// independent rank is wanted.
pub fn rank_over_q(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot_row = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let g = pivot_row[c].gcd(&row[c]);
            let fp = &row[c] / &g;
            let fr = &pivot_row[c] / &g;
            for j in c..cols {
                row[j] = &row[j] * &fr - &pivot_row[j] * &fp;
            }
            let content = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            if !content.is_zero() && !content.is_one() {
                for x in row.iter_mut() {
                    *x = &*x / &content;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Column rank of an integer matrix restricted to the given columns.
pub fn column_rank(m: &IntMatrix, cols: &[usize]) -> usize {
    let sub = m.select_columns(cols).transpose();
    rank_over_q(&sub.to_big())
}

/// Determinant by Bareiss elimination.
pub fn determinant(m: &IntMatrix) -> Result<BigInt> {
    if m.rows != m.cols {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", m.rows, m.cols)));
    }
    let n = m.rows;
    let mut a = m.to_big();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(BigInt::zero());
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(if n == 0 { sign } else { sign * &a[n - 1][n - 1] })
}

/// Result of solving a rational linear system `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    Unique(Vec<BigRational>),
    Inconsistent,
    /// Consistent, with a solution space of the given dimension.
    Underdetermined(usize),
}

/// Gauss-Jordan elimination over Q for a possibly overdetermined system.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational], unknowns: usize) -> LinearSolution {
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..unknowns {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][c].recip();
        for x in m[rank].iter_mut() {
            *x = &*x * &inv;
        }
        let pr = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == rank || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pr) {
                *x = &*x - &f * p;
            }
        }
        pivots.push(c);
        rank += 1;
    }
    if m[rank..].iter().any(|row| !row[unknowns].is_zero()) {
        return LinearSolution::Inconsistent;
    }
    if rank < unknowns {
        return LinearSolution::Underdetermined(unknowns - rank);
    }
    let mut x = vec![BigRational::zero(); unknowns];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][unknowns].clone();
    }
    LinearSolution::Unique(x)
}
