//! Weight matrix `W` and vertex matrix `V` of the quasimap moduli space for
//! bidegree `(d1, d2)`, assembled from their named blocks.
//!
//! Rows of `W` are labelled `z_0..z_d1, w_0..w_d2, f_(1,1)..f_(d1,d2)`; rows of
//! `V` are `z, w, g^(d1)_1..g^(d1)_(d1-1), g, g^(d2)_1..g^(d2)_(d2-1)`. Both
//! share the column labels
//! `a^1, a^2, b^1, b^2, u~_0, u_1, .., u_(d1-1), u~_d1` expanded componentwise.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactlin::IntMatrix;

/// Bidegree `(d1, d2)` with `d1 >= d2 > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Degree {
    d1: usize,
    d2: usize,
}

impl Degree {
    pub fn new(d1: i64, d2: i64) -> Result<Self> {
        if d2 <= 0 || d1 < d2 {
            return Err(Error::InvalidDegree { d1, d2 });
        }
        Ok(Degree {
            d1: d1 as usize,
            d2: d2 as usize,
        })
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    /// Number of rays, `(d1+3)(d2+3) - 6`.
    pub fn r(&self) -> usize {
        (self.d1 + 3) * (self.d2 + 3) - 6
    }

    /// Lattice dimension, `2 d1 + 2 d2 + 1`.
    pub fn n(&self) -> usize {
        2 * self.d1 + 2 * self.d2 + 1
    }

    /// Rank of the torus acting on homogeneous coordinates, `(d1+1)(d2+1) + 1`.
    pub fn torus_rank(&self) -> usize {
        (self.d1 + 1) * (self.d2 + 1) + 1
    }

    /// Whether `(i, j)` indexes a `u` coordinate: the grid minus both corners.
    pub fn in_index_set(&self, i: usize, j: usize) -> bool {
        i <= self.d1 && j <= self.d2 && (i, j) != (0, 0) && (i, j) != (self.d1, self.d2)
    }

    /// The `u` index set in column order.
    pub fn index_set(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..=self.d1 {
            for j in 0..=self.d2 {
                if self.in_index_set(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// All degrees with `1 <= d2 <= d1 <= max`.
    pub fn all_up_to(max: usize) -> Vec<Degree> {
        let mut out = Vec::new();
        for d1 in 1..=max {
            for d2 in 1..=d1 {
                out.push(Degree { d1, d2 });
            }
        }
        out
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.d1, self.d2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowLabel {
    Z(usize),
    W(usize),
    F(usize, usize),
    /// `g_i^(d1)`
    GD1(usize),
    G,
    /// `g_j^(d2)`
    GD2(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ColLabel {
    /// `a_i^k`, `k` in {1, 2}
    A { i: usize, k: u8 },
    /// `b_j^k`
    B { j: usize, k: u8 },
    /// `u_(i,j)`
    U(usize, usize),
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RowLabel::Z(i) => write!(f, "z_{i}"),
            RowLabel::W(j) => write!(f, "w_{j}"),
            RowLabel::F(i, j) => write!(f, "f_({i},{j})"),
            RowLabel::GD1(i) => write!(f, "g_{i}^(d1)"),
            RowLabel::G => write!(f, "g"),
            RowLabel::GD2(j) => write!(f, "g_{j}^(d2)"),
        }
    }
}

impl fmt::Display for ColLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ColLabel::A { i, k } => write!(f, "a_{i}^{k}"),
            ColLabel::B { j, k } => write!(f, "b_{j}^{k}"),
            ColLabel::U(i, j) => write!(f, "u_({i},{j})"),
        }
    }
}

impl Serialize for RowLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for ColLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Column labels shared by `W` and `V`.
pub fn column_labels(d: Degree) -> Vec<ColLabel> {
    let mut cols = Vec::with_capacity(d.r());
    for k in 1..=2 {
        cols.extend((0..=d.d1).map(|i| ColLabel::A { i, k }));
    }
    for k in 1..=2 {
        cols.extend((0..=d.d2).map(|j| ColLabel::B { j, k }));
    }
    cols.extend(d.index_set().into_iter().map(|(i, j)| ColLabel::U(i, j)));
    cols
}

pub fn weight_row_labels(d: Degree) -> Vec<RowLabel> {
    let mut rows: Vec<RowLabel> = (0..=d.d1).map(RowLabel::Z).collect();
    rows.extend((0..=d.d2).map(RowLabel::W));
    for i in 1..=d.d1 {
        rows.extend((1..=d.d2).map(|j| RowLabel::F(i, j)));
    }
    rows
}

pub fn vertex_row_labels(d: Degree) -> Vec<RowLabel> {
    let mut rows: Vec<RowLabel> = (0..=d.d1).map(RowLabel::Z).collect();
    rows.extend((0..=d.d2).map(RowLabel::W));
    rows.extend((1..d.d1).map(RowLabel::GD1));
    rows.push(RowLabel::G);
    rows.extend((1..d.d2).map(RowLabel::GD2));
    rows
}

/// Integer matrix with labelled rows and columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabeledIntMatrix {
    pub degree: Degree,
    pub matrix: IntMatrix,
    pub row_labels: Vec<RowLabel>,
    pub col_labels: Vec<ColLabel>,
}

impl LabeledIntMatrix {
    pub fn row_index(&self, label: RowLabel) -> Option<usize> {
        self.row_labels.iter().position(|&l| l == label)
    }

    pub fn col_index(&self, label: ColLabel) -> Option<usize> {
        self.col_labels.iter().position(|&l| l == label)
    }

    /// Entry by labels; rows or columns that do not exist read as zero.
    pub fn entry(&self, row: RowLabel, col: ColLabel) -> i64 {
        match (self.row_index(row), self.col_index(col)) {
            (Some(i), Some(j)) => self.matrix.get(i, j),
            _ => 0,
        }
    }

    pub fn column_of(&self, col: ColLabel) -> Option<Vec<i64>> {
        self.col_index(col).map(|j| self.matrix.column(j))
    }

    /// Bordered layout: column labels on top, row labels on the left, with
    /// rules between the labelled blocks.
    pub fn pretty(&self) -> String {
        let col_names: Vec<String> = self.col_labels.iter().map(ToString::to_string).collect();
        let row_names: Vec<String> = self.row_labels.iter().map(ToString::to_string).collect();
        let lw = row_names.iter().map(String::len).max().unwrap_or(0);
        let cw: Vec<usize> = col_names.iter().map(|s| s.len().max(2)).collect();
        let col_breaks: Vec<bool> = (0..self.col_labels.len())
            .map(|j| j > 0 && col_group(self.col_labels[j - 1], self.degree) != col_group(self.col_labels[j], self.degree))
            .collect();
        let row_breaks: Vec<bool> = (0..self.row_labels.len())
            .map(|i| i > 0 && row_group(self.row_labels[i - 1]) != row_group(self.row_labels[i]))
            .collect();

        let mut out = String::new();
        let mut header = format!("{:>lw$} ", "");
        for (j, name) in col_names.iter().enumerate() {
            if col_breaks[j] {
                header.push_str(" |");
            }
            header.push_str(&format!(" {:>w$}", name, w = cw[j]));
        }
        let width = header.len();
        out.push_str(&header);
        out.push('\n');
        for i in 0..self.row_labels.len() {
            if row_breaks[i] {
                out.push_str(&"-".repeat(width));
                out.push('\n');
            }
            let mut line = format!("{:>lw$} ", row_names[i]);
            for j in 0..self.col_labels.len() {
                if col_breaks[j] {
                    line.push_str(" |");
                }
                line.push_str(&format!(" {:>w$}", self.matrix.get(i, j), w = cw[j]));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("label");
        for c in &self.col_labels {
            out.push(',');
            out.push_str(&c.to_string());
        }
        out.push('\n');
        for (i, r) in self.row_labels.iter().enumerate() {
            out.push_str(&r.to_string());
            for v in self.matrix.row(i) {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Block name of a column, matching the bordered displays.
fn col_group(c: ColLabel, d: Degree) -> (u8, usize) {
    match c {
        ColLabel::A { k, .. } => (k - 1, 0),
        ColLabel::B { k, .. } => (k + 1, 0),
        ColLabel::U(i, _) => (4, if i == d.d1 { usize::MAX } else { i }),
    }
}

fn row_group(r: RowLabel) -> (u8, usize) {
    match r {
        RowLabel::Z(_) => (0, 0),
        RowLabel::W(_) => (1, 0),
        RowLabel::F(i, _) => (2, i),
        RowLabel::GD1(_) => (3, 0),
        RowLabel::G => (4, 0),
        RowLabel::GD2(_) => (5, 0),
    }
}

/// Column offsets of the labelled blocks.
struct Layout {
    d: Degree,
}

impl Layout {
    fn a(&self, k: usize) -> usize {
        (k - 1) * (self.d.d1 + 1)
    }

    fn b(&self, k: usize) -> usize {
        2 * (self.d.d1 + 1) + (k - 1) * (self.d.d2 + 1)
    }

    /// Offset of `u~_0` (`s = 0`), `u_s` or `u~_d1` (`s = d1`).
    fn u(&self, s: usize) -> usize {
        let base = 2 * (self.d.d1 + 1) + 2 * (self.d.d2 + 1);
        if s == 0 {
            base
        } else {
            base + self.d.d2 + (s - 1) * (self.d.d2 + 1)
        }
    }

    fn z(&self) -> usize {
        0
    }

    fn w(&self) -> usize {
        self.d.d1 + 1
    }

    fn f(&self, p: usize) -> usize {
        self.d.d1 + self.d.d2 + 2 + (p - 1) * self.d.d2
    }

    fn g_d1(&self) -> usize {
        self.d.d1 + self.d.d2 + 2
    }

    fn g(&self) -> usize {
        2 * self.d.d1 + self.d.d2 + 1
    }

    fn g_d2(&self) -> usize {
        self.g() + 1
    }
}

fn matrix_with(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> IntMatrix {
    let mut m = IntMatrix::zeros(rows, cols);
    for &(i, j, v) in entries {
        m.set(i, j, v);
    }
    m
}

fn negated(m: &IntMatrix) -> IntMatrix {
    let mut out = m.clone();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i, j, -m.get(i, j));
        }
    }
    out
}

/// Named blocks of `W` and `V`. Row and column counts follow the displays;
/// `z`-blocks have `d1+1` rows, `w`-blocks `d2+1`, `f`-blocks `d2`.
pub mod blocks {
    use super::*;

    /// `z x u~_0`: a single `-1` at row `z_1` in the last column.
    pub fn u_0(d: Degree) -> IntMatrix {
        matrix_with(d.d1 + 1, d.d2, &[(1, d.d2 - 1, -1)])
    }

    /// `z x u~_d1`: a single `-1` at row `z_(d1-1)` in the first column.
    pub fn u_d1(d: Degree) -> IntMatrix {
        matrix_with(d.d1 + 1, d.d2, &[(d.d1 - 1, 0, -1)])
    }

    /// `z x u_i` for `1 <= i <= d1-1`.
    pub fn k(d: Degree, i: usize) -> IntMatrix {
        let last = d.d2;
        matrix_with(
            d.d1 + 1,
            d.d2 + 1,
            &[(i - 1, 0, -1), (i, 0, 1), (i, last, 1), (i + 1, last, -1)],
        )
    }

    /// `w x u~_0`.
    pub fn l_0(d: Degree) -> IntMatrix {
        let mut m = IntMatrix::zeros(d.d2 + 1, d.d2);
        for c in 0..d.d2 - 1 {
            m.set(c, c, -1);
            m.set(c + 1, c, 1);
        }
        m.set(d.d2 - 1, d.d2 - 1, -1);
        m
    }

    /// `w x u~_d1`.
    pub fn l_d1(d: Degree) -> IntMatrix {
        let mut m = IntMatrix::zeros(d.d2 + 1, d.d2);
        m.set(1, 0, -1);
        for t in 1..d.d2 {
            m.set(t, t, 1);
            m.set(t + 1, t, -1);
        }
        m
    }

    /// `f_1 x u~_0`, square lower bidiagonal.
    pub fn j_d_tilde(d: Degree) -> IntMatrix {
        let mut m = IntMatrix::zeros(d.d2, d.d2);
        for r in 0..d.d2 {
            m.set(r, r, 1);
            if r > 0 {
                m.set(r, r - 1, -1);
            }
        }
        m
    }

    /// `f_p x u_(p-1)` for `2 <= p <= d1`.
    pub fn j_d(d: Degree) -> IntMatrix {
        let mut m = IntMatrix::zeros(d.d2, d.d2 + 1);
        for r in 0..d.d2 {
            m.set(r, r, -1);
            m.set(r, r + 1, 1);
        }
        m
    }

    /// `f_p x u_p` for `1 <= p <= d1-1`.
    pub fn j_u(d: Degree) -> IntMatrix {
        let mut m = IntMatrix::zeros(d.d2, d.d2 + 1);
        for r in 0..d.d2 {
            m.set(r, r, 1);
            m.set(r, r + 1, -1);
        }
        m
    }

    /// `f_d1 x u~_d1`, square upper bidiagonal.
    pub fn j_u_tilde(d: Degree) -> IntMatrix {
        let mut m = IntMatrix::zeros(d.d2, d.d2);
        for r in 0..d.d2 {
            m.set(r, r, 1);
            if r + 1 < d.d2 {
                m.set(r, r + 1, -1);
            }
        }
        m
    }

    /// `(N-1) x (N+1)` second-difference stencil `(1, -2, 1)`.
    pub fn a_tilde(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n.saturating_sub(1), n + 1);
        for k in 0..n.saturating_sub(1) {
            m.set(k, k, 1);
            m.set(k, k + 1, -2);
            m.set(k, k + 2, 1);
        }
        m
    }

    /// `g^(d1) x u_i`: row `g_i^(d1)` filled with ones.
    pub fn e_tilde(d: Degree, i: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(d.d1 - 1, d.d2 + 1);
        for t in 0..=d.d2 {
            m.set(i - 1, t, 1);
        }
        m
    }

    /// `g^(d2) x u~_0`: identity followed by a zero column.
    pub fn i_r(d: Degree) -> IntMatrix {
        let mut m = IntMatrix::zeros(d.d2 - 1, d.d2);
        for t in 0..d.d2 - 1 {
            m.set(t, t, 1);
        }
        m
    }

    /// `g^(d2) x u_i`: zero column, identity, zero column.
    pub fn i_lr(d: Degree) -> IntMatrix {
        let mut m = IntMatrix::zeros(d.d2 - 1, d.d2 + 1);
        for t in 0..d.d2 - 1 {
            m.set(t, t + 1, 1);
        }
        m
    }

    /// `g^(d2) x u~_d1`: zero column followed by identity.
    pub fn i_l(d: Degree) -> IntMatrix {
        let mut m = IntMatrix::zeros(d.d2 - 1, d.d2);
        for t in 0..d.d2 - 1 {
            m.set(t, t + 1, 1);
        }
        m
    }
}

/// The `(r-n) x r` weight matrix.
pub fn build_weight_matrix(d: Degree) -> LabeledIntMatrix {
    let lay = Layout { d };
    let mut m = IntMatrix::zeros(d.torus_rank(), d.r());
    let id_z = IntMatrix::identity(d.d1 + 1);
    let id_w = IntMatrix::identity(d.d2 + 1);
    m.place(lay.z(), lay.a(1), &id_z);
    m.place(lay.z(), lay.a(2), &id_z);
    m.place(lay.w(), lay.b(1), &id_w);
    m.place(lay.w(), lay.b(2), &id_w);

    m.place(lay.z(), lay.u(0), &blocks::u_0(d));
    for i in 1..d.d1 {
        m.place(lay.z(), lay.u(i), &blocks::k(d, i));
    }
    m.place(lay.z(), lay.u(d.d1), &blocks::u_d1(d));

    m.place(lay.w(), lay.u(0), &blocks::l_0(d));
    m.place(lay.w(), lay.u(d.d1), &blocks::l_d1(d));

    m.place(lay.f(1), lay.u(0), &blocks::j_d_tilde(d));
    for p in 1..d.d1 {
        m.place(lay.f(p), lay.u(p), &blocks::j_u(d));
        m.place(lay.f(p + 1), lay.u(p), &blocks::j_d(d));
    }
    m.place(lay.f(d.d1), lay.u(d.d1), &blocks::j_u_tilde(d));

    LabeledIntMatrix {
        degree: d,
        matrix: m,
        row_labels: weight_row_labels(d),
        col_labels: column_labels(d),
    }
}

/// The `n x r` vertex matrix; its columns generate the rays of the fan.
pub fn build_vertex_matrix(d: Degree) -> LabeledIntMatrix {
    let lay = Layout { d };
    let mut m = IntMatrix::zeros(d.n(), d.r());
    let id_z = IntMatrix::identity(d.d1 + 1);
    let id_w = IntMatrix::identity(d.d2 + 1);
    m.place(lay.z(), lay.a(1), &id_z);
    m.place(lay.z(), lay.a(2), &negated(&id_z));
    m.place(lay.w(), lay.b(1), &id_w);
    m.place(lay.w(), lay.b(2), &negated(&id_w));

    if d.d1 > 1 {
        m.place(lay.g_d1(), lay.a(2), &blocks::a_tilde(d.d1));
        for i in 1..d.d1 {
            m.place(lay.g_d1(), lay.u(i), &blocks::e_tilde(d, i));
        }
    }

    let g = lay.g();
    m.set(g, lay.a(2), 1);
    m.set(g, lay.a(2) + 1, -1);
    m.set(g, lay.b(2), -1);
    m.set(g, lay.b(2) + 1, 1);
    for t in 0..d.d2 {
        m.set(g, lay.u(0) + t, -1);
    }
    for i in 1..d.d1 {
        m.set(g, lay.u(i), 1);
    }
    m.set(g, lay.u(d.d1), 1);

    if d.d2 > 1 {
        m.place(lay.g_d2(), lay.b(2), &blocks::a_tilde(d.d2));
        m.place(lay.g_d2(), lay.u(0), &blocks::i_r(d));
        for i in 1..d.d1 {
            m.place(lay.g_d2(), lay.u(i), &blocks::i_lr(d));
        }
        m.place(lay.g_d2(), lay.u(d.d1), &blocks::i_l(d));
    }

    LabeledIntMatrix {
        degree: d,
        matrix: m,
        row_labels: vertex_row_labels(d),
        col_labels: column_labels(d),
    }
}

/// The four column-sum identities of the `u` columns of `W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "identity")]
pub enum ColumnIdentity {
    /// `sum_j w_u(i,j) = -e_z(i-1) + 2 e_z(i) - e_z(i+1)`
    RowSecondDifference { i: usize },
    /// `sum_i w_u(i,j) = -e_w(j-1) + 2 e_w(j) - e_w(j+1)`
    ColumnSecondDifference { j: usize },
    /// f-part of the sum over `p < i, q > j` equals `e_f(i,j+1)`
    UpperRectangle { i: usize, j: usize },
    /// f-part of the sum over `p > i, q < j` equals `e_f(i+1,j)`
    LowerRectangle { i: usize, j: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    #[serde(flatten)]
    pub identity: ColumnIdentity,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn count(&self, pred: impl Fn(&ColumnIdentity) -> bool) -> usize {
        self.checks.iter().filter(|c| pred(&c.identity)).count()
    }
}

/// Checks every instance of the four `u`-column identities on a weight matrix.
pub fn verify_column_identities(w: &LabeledIntMatrix) -> IdentityReport {
    let d = w.degree;
    let rows = w.row_labels.len();
    let sum_u = |cells: &mut dyn Iterator<Item = (usize, usize)>| -> Vec<i64> {
        let mut acc = vec![0i64; rows];
        for (p, q) in cells {
            if let Some(col) = w.column_of(ColLabel::U(p, q)) {
                for (a, v) in acc.iter_mut().zip(col) {
                    *a += v;
                }
            }
        }
        acc
    };
    let unit = |label: RowLabel, coef: i64, into: &mut Vec<i64>| {
        if let Some(i) = w.row_index(label) {
            into[i] += coef;
        }
    };
    let f_part = |v: &[i64]| -> Vec<i64> {
        w.row_labels
            .iter()
            .zip(v)
            .filter(|(l, _)| matches!(l, RowLabel::F(..)))
            .map(|(_, &x)| x)
            .collect()
    };

    let mut report = IdentityReport::default();
    for i in 1..d.d1 {
        let lhs = sum_u(&mut (0..=d.d2).map(|j| (i, j)));
        let mut rhs = vec![0; rows];
        unit(RowLabel::Z(i - 1), -1, &mut rhs);
        unit(RowLabel::Z(i), 2, &mut rhs);
        unit(RowLabel::Z(i + 1), -1, &mut rhs);
        report.checks.push(IdentityCheck {
            identity: ColumnIdentity::RowSecondDifference { i },
            passed: lhs == rhs,
        });
    }
    for j in 1..d.d2 {
        let lhs = sum_u(&mut (0..=d.d1).map(|i| (i, j)));
        let mut rhs = vec![0; rows];
        unit(RowLabel::W(j - 1), -1, &mut rhs);
        unit(RowLabel::W(j), 2, &mut rhs);
        unit(RowLabel::W(j + 1), -1, &mut rhs);
        report.checks.push(IdentityCheck {
            identity: ColumnIdentity::ColumnSecondDifference { j },
            passed: lhs == rhs,
        });
    }
    for (i, j) in d.index_set() {
        let cells: Vec<(usize, usize)> = (0..i)
            .flat_map(|p| (j + 1..=d.d2).map(move |q| (p, q)))
            .filter(|&(p, q)| d.in_index_set(p, q))
            .collect();
        let lhs = sum_u(&mut cells.into_iter());
        let mut rhs = vec![0; rows];
        unit(RowLabel::F(i, j + 1), 1, &mut rhs);
        report.checks.push(IdentityCheck {
            identity: ColumnIdentity::UpperRectangle { i, j },
            passed: f_part(&lhs) == f_part(&rhs),
        });

        let cells: Vec<(usize, usize)> = (i + 1..=d.d1)
            .flat_map(|p| (0..j).map(move |q| (p, q)))
            .filter(|&(p, q)| d.in_index_set(p, q))
            .collect();
        let lhs = sum_u(&mut cells.into_iter());
        let mut rhs = vec![0; rows];
        unit(RowLabel::F(i + 1, j), 1, &mut rhs);
        report.checks.push(IdentityCheck {
            identity: ColumnIdentity::LowerRectangle { i, j },
            passed: f_part(&lhs) == f_part(&rhs),
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fixture_w_1_1() -> IntMatrix {
        IntMatrix::from_rows(vec![
            vec![1, 0, 1, 0, 0, 0, 0, 0, 0, -1],
            vec![0, 1, 0, 1, 0, 0, 0, 0, -1, 0],
            vec![0, 0, 0, 0, 1, 0, 1, 0, -1, 0],
            vec![0, 0, 0, 0, 0, 1, 0, 1, 0, -1],
            vec![0, 0, 0, 0, 0, 0, 0, 0, 1, 1],
        ])
        .unwrap()
    }

    pub(crate) fn fixture_v_1_1() -> IntMatrix {
        IntMatrix::from_rows(vec![
            vec![1, 0, -1, 0, 0, 0, 0, 0, 0, 0],
            vec![0, 1, 0, -1, 0, 0, 0, 0, 0, 0],
            vec![0, 0, 0, 0, 1, 0, -1, 0, 0, 0],
            vec![0, 0, 0, 0, 0, 1, 0, -1, 0, 0],
            vec![0, 0, 1, -1, 0, 0, -1, 1, -1, 1],
        ])
        .unwrap()
    }

    fn deg(d1: i64, d2: i64) -> Degree {
        Degree::new(d1, d2).unwrap()
    }

    /// `f`-row entries of the `u` columns, stated entrywise rather than by blocks.
    fn f_entry_rule(p: usize, q: usize, s: usize, t: usize) -> i64 {
        if (p, q) == (s, t) || (p, q) == (s + 1, t + 1) {
            -1
        } else if (p, q) == (s + 1, t) || (p, q) == (s, t + 1) {
            1
        } else {
            0
        }
    }

    #[test]
    fn degree_validation() {
        assert!(Degree::new(1, 2).is_err());
        assert!(Degree::new(0, 0).is_err());
        assert!(Degree::new(3, 0).is_err());
        let d = deg(2, 1);
        assert_eq!((d.r(), d.n(), d.torus_rank()), (14, 7, 7));
    }

    #[test]
    fn fixture_matrices_1_1() {
        let d = deg(1, 1);
        assert_eq!(build_weight_matrix(d).matrix, fixture_w_1_1());
        let v = build_vertex_matrix(d);
        assert_eq!(v.matrix, fixture_v_1_1());
        assert_eq!(v.matrix.row(4), &[0, 0, 1, -1, 0, 0, -1, 1, -1, 1]);
    }

    #[test]
    fn labels_for_1_1() {
        let d = deg(1, 1);
        let names: Vec<String> = column_labels(d).iter().map(ToString::to_string).collect();
        assert_eq!(
            names,
            ["a_0^1", "a_1^1", "a_0^2", "a_1^2", "b_0^1", "b_1^1", "b_0^2", "b_1^2", "u_(0,1)", "u_(1,0)"]
        );
        let rows: Vec<String> = weight_row_labels(d).iter().map(ToString::to_string).collect();
        assert_eq!(rows, ["z_0", "z_1", "w_0", "w_1", "f_(1,1)"]);
    }

    #[test]
    fn u10_column_of_2_1() {
        let w = build_weight_matrix(deg(2, 1));
        assert_eq!(w.matrix.rows(), 7);
        assert_eq!(w.matrix.cols(), 14);
        assert_eq!(w.column_of(ColLabel::U(1, 0)).unwrap(), vec![-1, 1, 0, 0, 0, 1, -1]);
    }

    #[test]
    fn a1_block_is_standard_basis() {
        for d in Degree::all_up_to(4) {
            let w = build_weight_matrix(d);
            for i in 0..=d.d1() {
                let col = w.column_of(ColLabel::A { i, k: 1 }).unwrap();
                let mut e = vec![0; w.matrix.rows()];
                e[i] = 1;
                assert_eq!(col, e);
            }
        }
    }

    #[test]
    fn dimensions_entries_and_orthogonality() {
        for d in Degree::all_up_to(5) {
            let w = build_weight_matrix(d);
            let v = build_vertex_matrix(d);
            assert_eq!((w.matrix.rows(), w.matrix.cols()), (d.torus_rank(), d.r()));
            assert_eq!((v.matrix.rows(), v.matrix.cols()), (d.n(), d.r()));
            assert_eq!(v.row_labels.len(), d.n());
            assert!(w.matrix.entries().chain(v.matrix.entries()).all(|x| (-2..=2).contains(&x)));
            assert!(v.matrix.checked_mul(&w.matrix.transpose()).unwrap().is_zero(), "{d}");
            for j in 0..d.r() {
                assert!(v.matrix.column(j).iter().any(|&x| x != 0), "{d} column {j}");
            }
        }
    }

    #[test]
    fn f_rows_follow_entry_rule() {
        for d in Degree::all_up_to(5) {
            let w = build_weight_matrix(d);
            for (s, t) in d.index_set() {
                for p in 1..=d.d1() {
                    for q in 1..=d.d2() {
                        assert_eq!(
                            w.entry(RowLabel::F(p, q), ColLabel::U(s, t)),
                            f_entry_rule(p, q, s, t),
                            "{d} f_({p},{q}) u_({s},{t})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn column_identities_small() {
        let r = verify_column_identities(&build_weight_matrix(deg(1, 1)));
        assert!(r.all_passed());
        assert_eq!(r.count(|c| matches!(c, ColumnIdentity::RowSecondDifference { .. })), 0);
        assert_eq!(r.count(|c| matches!(c, ColumnIdentity::ColumnSecondDifference { .. })), 0);
        assert_eq!(r.count(|c| matches!(c, ColumnIdentity::UpperRectangle { .. })), 2);

        let w = build_weight_matrix(deg(2, 1));
        let sum: Vec<i64> = (0..7)
            .map(|row| w.entry(w.row_labels[row], ColLabel::U(1, 0)) + w.entry(w.row_labels[row], ColLabel::U(1, 1)))
            .collect();
        assert_eq!(&sum[..5], &[-1, 2, -1, 0, 0]);
        assert!(verify_column_identities(&w).all_passed());
        assert!(verify_column_identities(&build_weight_matrix(deg(3, 2))).all_passed());
    }

    #[test]
    fn column_identities_all_degrees() {
        for d in Degree::all_up_to(5) {
            let r = verify_column_identities(&build_weight_matrix(d));
            assert!(r.all_passed(), "{d}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn tampered_matrix_fails_identities() {
        let mut w = build_weight_matrix(deg(3, 2));
        let j = w.col_index(ColLabel::U(1, 1)).unwrap();
        let i = w.row_index(RowLabel::F(1, 1)).unwrap();
        w.matrix.set(i, j, w.matrix.get(i, j) + 1);
        assert!(!verify_column_identities(&w).all_passed());
    }

    #[test]
    fn pretty_and_csv() {
        let w = build_weight_matrix(deg(1, 1));
        let p = w.pretty();
        assert!(p.lines().next().unwrap().contains("a_0^1"));
        assert!(p.contains("f_(1,1)"));
        assert_eq!(p.lines().filter(|l| l.starts_with('-')).count(), 2);
        let csv = w.to_csv();
        assert_eq!(csv.lines().count(), 6);
        assert_eq!(csv.lines().nth(5).unwrap(), "f_(1,1),0,0,0,0,0,0,0,0,1,1");
    }
}
