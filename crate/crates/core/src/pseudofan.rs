//! Primitive collections of the fan and the min-value system that certifies
//! it is complete and simplicial.
//!
//! For a target `y` indexed by rays, the system asks for `x` indexed by the
//! rows of `W` such that for every primitive collection `P`
//!
//! ```text
//! min { -y_rho + sum_mu W[mu][rho] x_mu : rho in P } = 0.
//! ```
//!
//! [`solve_amvc`] builds the solution layer by layer in closed form
//! (boundary maxima, the two tridiagonal min-systems, then the `f` layer from
//! rectangular partial sums of the reduced target), and checks every
//! equation exactly before returning. [`enumerate_activity_patterns`] is the
//! exhaustive oracle.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::{solve_rational, LinearSolution};
use crate::rational::{q_max, serialize_vec, sum, Q};
use crate::toricdata::{build_weight_matrix, column_labels, ColLabel, Degree, LabeledIntMatrix, RowLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind")]
pub enum CollectionKind {
    /// `{a_i^1, a_i^2}` for `i` in `{0, d1}`
    PairA { i: usize },
    /// `{b_j^1, b_j^2}` for `j` in `{0, d2}`
    PairB { j: usize },
    /// `{a_i^1, a_i^2, u_(i,j)}`, `1 <= i <= d1-1`
    TripleA { i: usize, j: usize },
    /// `{b_j^1, b_j^2, u_(i,j)}`, `1 <= j <= d2-1`
    TripleB { i: usize, j: usize },
    /// `{u_(i,j), u_(k,l)}` with `i < k` and `l < j`
    PairU { first: (usize, usize), second: (usize, usize) },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimitiveCollection {
    #[serde(flatten)]
    pub kind: CollectionKind,
    pub members: Vec<ColLabel>,
    /// Column indices of `members`, ascending.
    #[serde(skip)]
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimitiveCollectionSet {
    pub degree: Degree,
    pub collections: Vec<PrimitiveCollection>,
}

impl PrimitiveCollectionSet {
    pub fn len(&self) -> usize {
        self.collections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.collections.is_empty()
    }

    /// `4 + (d1-1)(d2+1) + (d2-1)(d1+1) + C(d1+1,2) C(d2+1,2)`
    pub fn expected_len(d: Degree) -> usize {
        let (d1, d2) = (d.d1(), d.d2());
        4 + (d1 - 1) * (d2 + 1) + (d2 - 1) * (d1 + 1) + (d1 * (d1 + 1) / 2) * (d2 * (d2 + 1) / 2)
    }

    /// Every ray lies in some collection.
    pub fn covers_all_rays(&self) -> bool {
        let covered: BTreeSet<usize> = self.collections.iter().flat_map(|c| c.indices.iter().copied()).collect();
        covered.len() == self.degree.r()
    }

    /// No collection contains another.
    pub fn is_antichain(&self) -> bool {
        let sets: Vec<BTreeSet<usize>> = self
            .collections
            .iter()
            .map(|c| c.indices.iter().copied().collect())
            .collect();
        sets.iter()
            .enumerate()
            .all(|(a, sa)| sets.iter().enumerate().all(|(b, sb)| a == b || !sa.is_subset(sb)))
    }

    /// Collections as sorted lists of 1-based column positions.
    pub fn as_positions(&self) -> Vec<Vec<usize>> {
        self.collections
            .iter()
            .map(|c| c.indices.iter().map(|i| i + 1).collect())
            .collect()
    }
}

pub fn build_primitive_collections(d: Degree) -> PrimitiveCollectionSet {
    let labels = column_labels(d);
    let index_of = |l: ColLabel| labels.iter().position(|&c| c == l).expect("label present");
    let (d1, d2) = (d.d1(), d.d2());
    let a = |i: usize| [ColLabel::A { i, k: 1 }, ColLabel::A { i, k: 2 }];
    let b = |j: usize| [ColLabel::B { j, k: 1 }, ColLabel::B { j, k: 2 }];

    let mut raw: Vec<(CollectionKind, Vec<ColLabel>)> = vec![
        (CollectionKind::PairA { i: 0 }, a(0).to_vec()),
        (CollectionKind::PairA { i: d1 }, a(d1).to_vec()),
        (CollectionKind::PairB { j: 0 }, b(0).to_vec()),
        (CollectionKind::PairB { j: d2 }, b(d2).to_vec()),
    ];
    for i in 1..d1 {
        for j in 0..=d2 {
            let mut m = a(i).to_vec();
            m.push(ColLabel::U(i, j));
            raw.push((CollectionKind::TripleA { i, j }, m));
        }
    }
    for j in 1..d2 {
        for i in 0..=d1 {
            let mut m = b(j).to_vec();
            m.push(ColLabel::U(i, j));
            raw.push((CollectionKind::TripleB { i, j }, m));
        }
    }
    for (i, j) in d.index_set() {
        for (k, l) in d.index_set() {
            if i < k && l < j {
                raw.push((
                    CollectionKind::PairU {
                        first: (i, j),
                        second: (k, l),
                    },
                    vec![ColLabel::U(i, j), ColLabel::U(k, l)],
                ));
            }
        }
    }

    let mut collections: Vec<PrimitiveCollection> = raw
        .into_iter()
        .map(|(kind, mut members)| {
            members.sort_by_key(|&l| index_of(l));
            let indices = members.iter().map(|&l| index_of(l)).collect();
            PrimitiveCollection { kind, members, indices }
        })
        .collect();
    collections.sort_by(|x, y| x.indices.cmp(&y.indices));
    collections.dedup_by(|x, y| x.indices == y.indices);
    PrimitiveCollectionSet { degree: d, collections }
}

/// A target vector `y`, one entry per ray in column order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinValueSystem {
    pub degree: Degree,
    pub y: Vec<Q>,
}

impl MinValueSystem {
    pub fn new(degree: Degree, y: Vec<Q>) -> Result<Self> {
        if y.len() != degree.r() {
            return Err(Error::WrongLength {
                expected: degree.r(),
                got: y.len(),
            });
        }
        Ok(MinValueSystem { degree, y })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinValueSolution {
    /// One entry per row of `W`.
    #[serde(serialize_with = "serialize_vec")]
    pub x: Vec<Q>,
    /// Minimum over each primitive collection; all zero for a solution.
    #[serde(serialize_with = "serialize_vec")]
    pub residuals: Vec<Q>,
}

/// Weight matrix and primitive collections for one degree, reused across solves.
#[derive(Clone, Debug)]
pub struct AmvcProblem {
    pub degree: Degree,
    pub weight: LabeledIntMatrix,
    pub collections: PrimitiveCollectionSet,
}

impl AmvcProblem {
    pub fn new(degree: Degree) -> Self {
        AmvcProblem {
            degree,
            weight: build_weight_matrix(degree),
            collections: build_primitive_collections(degree),
        }
    }

    fn check_len(&self, y: &[Q]) -> Result<()> {
        if y.len() != self.degree.r() {
            return Err(Error::WrongLength {
                expected: self.degree.r(),
                got: y.len(),
            });
        }
        Ok(())
    }

    /// `-y_rho + sum_mu W[mu][rho] x_mu` for every ray.
    pub fn member_values(&self, y: &[Q], x: &[Q]) -> Vec<Q> {
        let m = &self.weight.matrix;
        (0..m.cols())
            .map(|rho| {
                let mut acc = -y[rho].clone();
                for (mu, xm) in x.iter().enumerate() {
                    let w = m.get(mu, rho);
                    if w != 0 {
                        acc += xm * Q::from_integer(w.into());
                    }
                }
                acc
            })
            .collect()
    }

    /// Minimum of the member values over each collection.
    pub fn residuals(&self, y: &[Q], x: &[Q]) -> Vec<Q> {
        let vals = self.member_values(y, x);
        self.collections
            .collections
            .iter()
            .map(|c| {
                c.indices
                    .iter()
                    .map(|&i| vals[i].clone())
                    .min()
                    .expect("collections are nonempty")
            })
            .collect()
    }

    /// Whether `x` solves the system: every residual is zero and every
    /// member value of every collection is nonnegative.
    pub fn is_solution(&self, y: &[Q], x: &[Q]) -> bool {
        let vals = self.member_values(y, x);
        self.collections.collections.iter().all(|c| {
            c.indices.iter().all(|&i| !vals[i].is_negative()) && c.indices.iter().any(|&i| vals[i].is_zero())
        })
    }

    fn y_at(&self, y: &[Q], label: ColLabel) -> Q {
        let j = self.weight.col_index(label).expect("label present");
        y[j].clone()
    }

    fn y_max_pair_a(&self, y: &[Q], i: usize) -> Q {
        q_max(&self.y_at(y, ColLabel::A { i, k: 1 }), &self.y_at(y, ColLabel::A { i, k: 2 }))
    }

    fn y_max_pair_b(&self, y: &[Q], j: usize) -> Q {
        q_max(&self.y_at(y, ColLabel::B { j, k: 1 }), &self.y_at(y, ColLabel::B { j, k: 2 }))
    }

    pub fn solve(&self, y: &[Q]) -> Result<MinValueSolution> {
        self.check_len(y)?;
        let d = self.degree;
        let (d1, d2) = (d.d1(), d.d2());
        let boundary = solve_boundary(self, y)?;

        let mut xz = vec![Q::zero(); d1 + 1];
        xz[0] = boundary.z_first.clone();
        xz[d1] = boundary.z_last.clone();
        if d1 >= 2 {
            let a: Vec<Q> = (1..d1).map(|i| self.y_max_pair_a(y, i)).collect();
            let c: Vec<Q> = (1..d1)
                .map(|i| sum((0..=d2).map(|j| self.y_at(y, ColLabel::U(i, j))).collect::<Vec<_>>().iter()))
                .collect();
            let inner = solve_tridiagonal_min_system(&boundary.z_first, &boundary.z_last, &a, &c)?;
            xz[1..d1].clone_from_slice(&inner);
        }

        let mut xw = vec![Q::zero(); d2 + 1];
        xw[0] = boundary.w_first.clone();
        xw[d2] = boundary.w_last.clone();
        if d2 >= 2 {
            let b: Vec<Q> = (1..d2).map(|j| self.y_max_pair_b(y, j)).collect();
            let c: Vec<Q> = (1..d2)
                .map(|j| sum((0..=d1).map(|i| self.y_at(y, ColLabel::U(i, j))).collect::<Vec<_>>().iter()))
                .collect();
            let inner = solve_tridiagonal_min_system(&boundary.w_first, &boundary.w_last, &b, &c)?;
            xw[1..d2].clone_from_slice(&inner);
        }

        let yp = reduce_to_y_prime(self, y, &xz, &xw)?;
        let xf = solve_f_layer(&yp)?;

        let mut x = Vec::with_capacity(d.torus_rank());
        for label in &self.weight.row_labels {
            x.push(match *label {
                RowLabel::Z(i) => xz[i].clone(),
                RowLabel::W(j) => xw[j].clone(),
                RowLabel::F(i, j) => xf[i - 1][j - 1].clone(),
                _ => unreachable!("weight rows are z, w, f"),
            });
        }

        let vals = self.member_values(y, &x);
        let mut residuals = Vec::with_capacity(self.collections.len());
        for (index, c) in self.collections.collections.iter().enumerate() {
            let min = c.indices.iter().map(|&i| vals[i].clone()).min().expect("nonempty");
            if !min.is_zero() {
                return Err(Error::ResidualNonzero {
                    index,
                    value: crate::rational::to_text(&min),
                });
            }
            residuals.push(min);
        }
        Ok(MinValueSolution { x, residuals })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryValues {
    pub z_first: Q,
    pub z_last: Q,
    pub w_first: Q,
    pub w_last: Q,
}

/// `x_z0, x_zd1, x_w0, x_wd2` as the maxima of the two target entries in the
/// corresponding boundary pair.
pub fn solve_boundary(problem: &AmvcProblem, y: &[Q]) -> Result<BoundaryValues> {
    problem.check_len(y)?;
    let d = problem.degree;
    Ok(BoundaryValues {
        z_first: problem.y_max_pair_a(y, 0),
        z_last: problem.y_max_pair_a(y, d.d1()),
        w_first: problem.y_max_pair_b(y, 0),
        w_last: problem.y_max_pair_b(y, d.d2()),
    })
}

/// Solves, for `1 <= i <= m`,
///
/// ```text
/// min { x_i - a_i, -c_i - x_(i-1) + 2 x_i - x_(i+1) } = 0
/// ```
///
/// with `x_0 = left` and `x_(m+1) = right`, by trying every choice of active
/// argument. Exactly one feasible `x` must come out; anything else is an error.
pub fn solve_tridiagonal_min_system(left: &Q, right: &Q, a: &[Q], c: &[Q]) -> Result<Vec<Q>> {
    let m = a.len();
    if c.len() != m {
        return Err(Error::WrongLength { expected: m, got: c.len() });
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let one = Q::from_integer(1.into());
    let two = Q::from_integer(2.into());
    let mut found: Vec<Vec<Q>> = Vec::new();
    for mask in 0u64..(1u64 << m) {
        let mut rows = vec![vec![Q::zero(); m]; m];
        let mut rhs = vec![Q::zero(); m];
        for i in 0..m {
            if mask >> i & 1 == 1 {
                rows[i][i] = one.clone();
                rhs[i] = a[i].clone();
            } else {
                rows[i][i] = two.clone();
                rhs[i] = c[i].clone();
                if i > 0 {
                    rows[i][i - 1] = -one.clone();
                } else {
                    rhs[i] += left;
                }
                if i + 1 < m {
                    rows[i][i + 1] = -one.clone();
                } else {
                    rhs[i] += right;
                }
            }
        }
        let LinearSolution::Unique(x) = solve_rational(&rows, &rhs, m) else {
            continue;
        };
        let at = |k: isize| -> Q {
            if k < 0 {
                left.clone()
            } else if k as usize >= m {
                right.clone()
            } else {
                x[k as usize].clone()
            }
        };
        let feasible = (0..m).all(|i| {
            let first = &x[i] - &a[i];
            let second = -&c[i] - at(i as isize - 1) + &two * &x[i] - at(i as isize + 1);
            !first.is_negative() && !second.is_negative()
        });
        if feasible && !found.contains(&x) {
            found.push(x);
        }
    }
    match found.len() {
        1 => Ok(found.pop().expect("one solution")),
        0 => Err(Error::NoSolution("tridiagonal min-system".into())),
        k => Err(Error::MultipleSolutions(k)),
    }
}

/// Reduced target on the full `(d1+1) x (d2+1)` grid; the two excluded
/// corners read as zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YPrime {
    pub degree: Degree,
    grid: Vec<Vec<Q>>,
}

impl YPrime {
    /// Builds a reduced target from grid values; corner entries are ignored.
    pub fn from_grid(degree: Degree, mut grid: Vec<Vec<Q>>) -> Result<Self> {
        if grid.len() != degree.d1() + 1 || grid.iter().any(|r| r.len() != degree.d2() + 1) {
            return Err(Error::DimensionMismatch("reduced target grid".into()));
        }
        grid[0][0] = Q::zero();
        grid[degree.d1()][degree.d2()] = Q::zero();
        Ok(YPrime { degree, grid })
    }

    pub fn get(&self, p: isize, q: isize) -> Q {
        if p < 0 || q < 0 {
            return Q::zero();
        }
        let (p, q) = (p as usize, q as usize);
        if self.degree.in_index_set(p, q) {
            self.grid[p][q].clone()
        } else {
            Q::zero()
        }
    }

    /// Sum over the rectangle `p..=s`, `q..=t`; zero when empty.
    pub fn delta(&self, p: isize, q: isize, s: isize, t: isize) -> Q {
        let mut acc = Q::zero();
        if p > s || q > t {
            return acc;
        }
        for k in p..=s {
            for l in q..=t {
                acc += self.get(k, l);
            }
        }
        acc
    }

    pub fn row_sum(&self, i: usize) -> Q {
        self.delta(i as isize, 0, i as isize, self.degree.d2() as isize)
    }

    pub fn col_sum(&self, j: usize) -> Q {
        self.delta(0, j as isize, self.degree.d1() as isize, j as isize)
    }
}

/// `y'_(i,j) = y_(i,j) - sum_p W[z_p][u_(i,j)] x_zp - sum_q W[w_q][u_(i,j)] x_wq`.
pub fn reduce_to_y_prime(problem: &AmvcProblem, y: &[Q], xz: &[Q], xw: &[Q]) -> Result<YPrime> {
    problem.check_len(y)?;
    let d = problem.degree;
    if xz.len() != d.d1() + 1 || xw.len() != d.d2() + 1 {
        return Err(Error::DimensionMismatch("z/w layer lengths".into()));
    }
    let w = &problem.weight;
    let mut grid = vec![vec![Q::zero(); d.d2() + 1]; d.d1() + 1];
    for (i, j) in d.index_set() {
        let col = ColLabel::U(i, j);
        let mut v = problem.y_at(y, col);
        for (p, x) in xz.iter().enumerate() {
            let c = w.entry(RowLabel::Z(p), col);
            if c != 0 {
                v -= x * Q::from_integer(c.into());
            }
        }
        for (q, x) in xw.iter().enumerate() {
            let c = w.entry(RowLabel::W(q), col);
            if c != 0 {
                v -= x * Q::from_integer(c.into());
            }
        }
        grid[i][j] = v;
    }
    YPrime::from_grid(d, grid)
}

/// `x_(i,j) = max { Delta_(i,0)^(d1,j-1), Delta_(0,j)^(i-1,d2) }` for
/// `1 <= i <= d1`, `1 <= j <= d2`, returned as `x[i-1][j-1]`.
///
/// The reduced target must have nonpositive sums along every interior row
/// `1 <= i <= d1-1` and interior column `1 <= j <= d2-1`.
pub fn solve_f_layer(yp: &YPrime) -> Result<Vec<Vec<Q>>> {
    let d = yp.degree;
    let (d1, d2) = (d.d1() as isize, d.d2() as isize);
    for i in 1..d.d1() {
        if yp.row_sum(i).is_positive() {
            return Err(Error::PreconditionViolated(format!("row {i} of y' sums to a positive value")));
        }
    }
    for j in 1..d.d2() {
        if yp.col_sum(j).is_positive() {
            return Err(Error::PreconditionViolated(format!("column {j} of y' sums to a positive value")));
        }
    }
    Ok((1..=d1)
        .map(|i| {
            (1..=d2)
                .map(|j| q_max(&yp.delta(i, 0, d1, j - 1), &yp.delta(0, j, i - 1, d2)))
                .collect()
        })
        .collect())
}

/// A random reduced target whose interior row and column sums are
/// nonpositive: excess in an interior row is taken off its column-0 entry,
/// excess in an interior column off its row-0 entry.
pub fn random_admissible_y_prime<R: rand::Rng>(d: Degree, rng: &mut R, range: i64) -> YPrime {
    let mut grid = vec![vec![Q::zero(); d.d2() + 1]; d.d1() + 1];
    for (i, j) in d.index_set() {
        grid[i][j] = Q::from_integer(rng.gen_range(-range..=range).into());
    }
    for row in grid.iter_mut().take(d.d1()).skip(1) {
        let s = sum(row.iter());
        if s.is_positive() {
            row[0] -= s;
        }
    }
    for j in 1..d.d2() {
        let s = sum(grid.iter().map(|row| &row[j]));
        if s.is_positive() {
            grid[0][j] -= s;
        }
    }
    YPrime::from_grid(d, grid).expect("grid has the right shape")
}

/// Whether `f` (as returned by [`solve_f_layer`]) satisfies
/// `x(i+1,j) + x(i,j+1) = max{ y'(i,j) + x(i,j) + x(i+1,j+1), D(i+1,0; d1,j-1) + D(0,j+1; i-1,d2) }`
/// for every `(i,j)` in the index set, with `x` zero off the `d1 x d2` block.
pub fn f_layer_recursion_holds(yp: &YPrime, f: &[Vec<Q>]) -> bool {
    let d = yp.degree;
    let (d1, d2) = (d.d1() as isize, d.d2() as isize);
    let x = |i: isize, j: isize| -> Q {
        if (1..=d1).contains(&i) && (1..=d2).contains(&j) {
            f[i as usize - 1][j as usize - 1].clone()
        } else {
            Q::zero()
        }
    };
    d.index_set().into_iter().all(|(i, j)| {
        let (i, j) = (i as isize, j as isize);
        let lhs = x(i + 1, j) + x(i, j + 1);
        let rhs = q_max(
            &(yp.get(i, j) + x(i, j) + x(i + 1, j + 1)),
            &(yp.delta(i + 1, 0, d1, j - 1) + yp.delta(0, j + 1, i - 1, d2)),
        );
        lhs == rhs
    })
}

pub fn solve_amvc(sys: &MinValueSystem) -> Result<MinValueSolution> {
    AmvcProblem::new(sys.degree).solve(&sys.y)
}

/// Largest number of equations the exhaustive oracle accepts.
pub const ORACLE_GUARD: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ActivityEnumeration {
    pub solutions: Vec<MinValueSolution>,
    pub patterns_tried: u64,
    /// Patterns whose equalities are consistent but leave `x` undetermined.
    pub degenerate_patterns: u64,
}

/// Tries every choice of one active member per collection, solves the
/// resulting linear equalities exactly, and keeps the nonnegative solutions.
/// Solutions are deduplicated by value.
pub fn enumerate_activity_patterns(sys: &MinValueSystem) -> Result<ActivityEnumeration> {
    AmvcProblem::new(sys.degree).enumerate(&sys.y)
}

impl AmvcProblem {
    pub fn enumerate(&self, y: &[Q]) -> Result<ActivityEnumeration> {
        self.check_len(y)?;
        let cols = &self.collections.collections;
        if cols.len() > ORACLE_GUARD {
            return Err(Error::GuardExceeded(cols.len(), ORACLE_GUARD));
        }
        let unknowns = self.weight.matrix.rows();
        let coeff: Vec<Vec<Q>> = (0..self.weight.matrix.cols())
            .map(|rho| {
                (0..unknowns)
                    .map(|mu| Q::from_integer(self.weight.matrix.get(mu, rho).into()))
                    .collect()
            })
            .collect();

        let mut choice = vec![0usize; cols.len()];
        let mut out = ActivityEnumeration {
            solutions: Vec::new(),
            patterns_tried: 0,
            degenerate_patterns: 0,
        };
        loop {
            out.patterns_tried += 1;
            let mut active: Vec<usize> = cols.iter().zip(&choice).map(|(c, &k)| c.indices[k]).collect();
            active.sort_unstable();
            active.dedup();
            let rows: Vec<Vec<Q>> = active.iter().map(|&rho| coeff[rho].clone()).collect();
            let rhs: Vec<Q> = active.iter().map(|&rho| y[rho].clone()).collect();
            match solve_rational(&rows, &rhs, unknowns) {
                LinearSolution::Unique(x) => {
                    if self.is_solution(y, &x) && !out.solutions.iter().any(|s| s.x == x) {
                        let residuals = self.residuals(y, &x);
                        out.solutions.push(MinValueSolution { x, residuals });
                    }
                }
                LinearSolution::Underdetermined(_) => out.degenerate_patterns += 1,
                LinearSolution::Inconsistent => {}
            }

            // mixed-radix increment
            let mut k = 0;
            loop {
                if k == choice.len() {
                    return Ok(out);
                }
                choice[k] += 1;
                if choice[k] < cols[k].indices.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }
}

/// `min{a, b_i} = 0` for every `i`.
pub fn each_min_zero(a: &Q, bs: &[Q]) -> bool {
    bs.iter().all(|b| std::cmp::min(a, b).is_zero())
}

/// `min{a, sum b_i} = 0` and every `b_i >= 0`.
pub fn aggregated_min_zero(a: &Q, bs: &[Q]) -> bool {
    let s = sum(bs.iter());
    std::cmp::min(a, &s).is_zero() && bs.iter().all(|b| !b.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn deg(d1: i64, d2: i64) -> Degree {
        Degree::new(d1, d2).unwrap()
    }

    fn random_y(d: Degree, rng: &mut ChaCha8Rng, range: i64) -> Vec<Q> {
        (0..d.r()).map(|_| q(rng.gen_range(-range..=range))).collect()
    }

    #[test]
    fn collections_1_1() {
        let pcs = build_primitive_collections(deg(1, 1));
        assert_eq!(pcs.as_positions(), vec![vec![1, 3], vec![2, 4], vec![5, 7], vec![6, 8], vec![9, 10]]);
        assert!(pcs.covers_all_rays());
        assert!(pcs.is_antichain());
    }

    #[test]
    fn collections_2_1() {
        let pcs = build_primitive_collections(deg(2, 1));
        assert_eq!(pcs.len(), 9);
        let triples = pcs
            .collections
            .iter()
            .filter(|c| matches!(c.kind, CollectionKind::TripleA { i: 1, .. }))
            .count();
        assert_eq!(triples, 2);
        let upairs: Vec<_> = pcs
            .collections
            .iter()
            .filter_map(|c| match c.kind {
                CollectionKind::PairU { first, second } => Some((first, second)),
                _ => None,
            })
            .collect();
        assert_eq!(upairs, vec![((0, 1), (1, 0)), ((0, 1), (2, 0)), ((1, 1), (2, 0))]);
    }

    #[test]
    fn collection_counts_and_axioms() {
        for d in Degree::all_up_to(5) {
            let pcs = build_primitive_collections(d);
            assert_eq!(pcs.len(), PrimitiveCollectionSet::expected_len(d), "{d}");
            assert!(pcs.covers_all_rays(), "{d}");
            assert!(pcs.is_antichain(), "{d}");
            assert!(pcs.collections.iter().all(|c| (2..=3).contains(&c.members.len())));
        }
    }

    #[test]
    fn boundary_maxima() {
        let p = AmvcProblem::new(deg(1, 1));
        let mut y = vec![q(0); 10];
        y[0] = q(3);
        y[2] = q(-1);
        let b = solve_boundary(&p, &y).unwrap();
        assert_eq!(b.z_first, q(3));
        let b = solve_boundary(&p, &vec![q(0); 10]).unwrap();
        assert!(b.z_first.is_zero() && b.z_last.is_zero() && b.w_first.is_zero() && b.w_last.is_zero());
    }

    #[test]
    fn tridiagonal_small_cases() {
        let z = solve_tridiagonal_min_system(&q(0), &q(0), &[q(0)], &[q(0)]).unwrap();
        assert_eq!(z, vec![q(0)]);
        let z = solve_tridiagonal_min_system(&q(1), &q(2), &[q(5)], &[q(0)]).unwrap();
        assert_eq!(z, vec![q(5)]);
        assert!(solve_tridiagonal_min_system(&q(0), &q(0), &[], &[]).unwrap().is_empty());
    }

    /// Grid search over sixths (every pattern solution has denominator
    /// dividing 6), in integer arithmetic scaled by 6.
    #[test]
    fn tridiagonal_against_grid_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let v: Vec<i64> = (0..6).map(|_| rng.gen_range(-8..=8)).collect();
            let (l, r, a, c) = (v[0], v[1], [v[2], v[3]], [v[4], v[5]]);
            let sol = solve_tridiagonal_min_system(&q(l), &q(r), &[q(a[0]), q(a[1])], &[q(c[0]), q(c[1])]).unwrap();
            let mut hits = Vec::new();
            for x1 in -600i64..=600 {
                for x2 in -600i64..=600 {
                    let e1 = (x1 - 6 * a[0]).min(-6 * c[0] - 6 * l + 2 * x1 - x2);
                    let e2 = (x2 - 6 * a[1]).min(-6 * c[1] - x1 + 2 * x2 - 6 * r);
                    if e1 == 0 && e2 == 0 {
                        hits.push(vec![Q::new(x1.into(), 6.into()), Q::new(x2.into(), 6.into())]);
                    }
                }
            }
            assert_eq!(hits, vec![sol]);
        }
    }

    #[test]
    fn closed_form_1_1() {
        let p = AmvcProblem::new(deg(1, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let y = random_y(p.degree, &mut rng, 50);
            let s = p.solve(&y).unwrap();
            let m = |a: usize, b: usize| q_max(&y[a - 1], &y[b - 1]);
            let x5 = q_max(&(&y[8] + m(2, 4) + m(5, 7)), &(&y[9] + m(1, 3) + m(6, 8)));
            assert_eq!(s.x, vec![m(1, 3), m(2, 4), m(5, 7), m(6, 8), x5]);
        }
        let s = p.solve(&vec![q(0); 10]).unwrap();
        assert!(s.x.iter().all(Zero::is_zero));
    }

    #[test]
    fn y_prime_for_1_1() {
        let p = AmvcProblem::new(deg(1, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y = random_y(p.degree, &mut rng, 20);
        let xz = vec![q(2), q(-3)];
        let xw = vec![q(7), q(1)];
        let yp = reduce_to_y_prime(&p, &y, &xz, &xw).unwrap();
        // column u_(0,1) of W is (0,-1,-1,0,1): y'_(0,1) = y_9 + x_z1 + x_w0
        assert_eq!(yp.get(0, 1), &y[8] + q(-3) + q(7));
        // column u_(1,0) is (-1,0,0,-1,1)
        assert_eq!(yp.get(1, 0), &y[9] + q(2) + q(1));
        let zero = reduce_to_y_prime(&p, &vec![q(0); 10], &[q(0), q(0)], &[q(0), q(0)]).unwrap();
        assert!(zero.get(0, 1).is_zero() && zero.get(1, 0).is_zero());
    }

    #[test]
    fn f_layer_base_cases() {
        let d = deg(1, 1);
        let grid = vec![vec![q(0), q(4)], vec![q(-2), q(0)]];
        let yp = YPrime::from_grid(d, grid).unwrap();
        assert_eq!(solve_f_layer(&yp).unwrap(), vec![vec![q(4)]]);
        let zero = YPrime::from_grid(deg(3, 2), vec![vec![q(0); 3]; 4]).unwrap();
        assert!(solve_f_layer(&zero).unwrap().iter().flatten().all(Zero::is_zero));
    }

    #[test]
    fn f_layer_rejects_positive_interior_row() {
        let d = deg(2, 1);
        let grid = vec![vec![q(0), q(0)], vec![q(1), q(0)], vec![q(0), q(0)]];
        let yp = YPrime::from_grid(d, grid).unwrap();
        assert!(matches!(solve_f_layer(&yp), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn interior_sums_nonpositive_after_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for d in [deg(3, 1), deg(3, 3), deg(4, 2)] {
            let p = AmvcProblem::new(d);
            for _ in 0..30 {
                let y = random_y(d, &mut rng, 30);
                let s = p.solve(&y).unwrap();
                let xz: Vec<Q> = s.x[..=d.d1()].to_vec();
                let xw: Vec<Q> = s.x[d.d1() + 1..d.d1() + d.d2() + 2].to_vec();
                let yp = reduce_to_y_prime(&p, &y, &xz, &xw).unwrap();
                for i in 1..d.d1() {
                    assert!(!yp.row_sum(i).is_positive());
                }
                for j in 1..d.d2() {
                    assert!(!yp.col_sum(j).is_positive());
                }
            }
        }
    }

    #[test]
    fn f_layer_satisfies_recursion() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for d in Degree::all_up_to(4) {
            let p = AmvcProblem::new(d);
            for _ in 0..10 {
                let y = random_y(d, &mut rng, 30);
                let s = p.solve(&y).unwrap();
                let xz = s.x[..=d.d1()].to_vec();
                let xw = s.x[d.d1() + 1..d.d1() + d.d2() + 2].to_vec();
                let yp = reduce_to_y_prime(&p, &y, &xz, &xw).unwrap();
                assert!(f_layer_recursion_holds(&yp, &solve_f_layer(&yp).unwrap()), "{d}");

                let yp = random_admissible_y_prime(d, &mut rng, 20);
                assert!(f_layer_recursion_holds(&yp, &solve_f_layer(&yp).unwrap()), "{d}");
            }
        }
    }

    #[test]
    fn homogeneity() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for d in [deg(2, 1), deg(3, 2)] {
            let p = AmvcProblem::new(d);
            for _ in 0..10 {
                let y = random_y(d, &mut rng, 40);
                let lambda = Q::new(rng.gen_range(0..=9).into(), rng.gen_range(1..=5).into());
                let scaled: Vec<Q> = y.iter().map(|v| v * &lambda).collect();
                let x: Vec<Q> = p.solve(&y).unwrap().x.iter().map(|v| v * &lambda).collect();
                assert_eq!(p.solve(&scaled).unwrap().x, x);
            }
        }
    }

    #[test]
    fn translation_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for d in [deg(1, 1), deg(2, 2), deg(3, 1)] {
            let p = AmvcProblem::new(d);
            let m = &p.weight.matrix;
            for _ in 0..10 {
                let y = random_y(d, &mut rng, 40);
                let t: Vec<Q> = (0..m.rows()).map(|_| q(rng.gen_range(-20..=20))).collect();
                let shifted: Vec<Q> = (0..m.cols())
                    .map(|rho| {
                        let mut v = y[rho].clone();
                        for (mu, tm) in t.iter().enumerate() {
                            v += tm * q(m.get(mu, rho));
                        }
                        v
                    })
                    .collect();
                let x = p.solve(&y).unwrap().x;
                let expected: Vec<Q> = x.iter().zip(&t).map(|(a, b)| a + b).collect();
                assert_eq!(p.solve(&shifted).unwrap().x, expected);
            }
        }
    }

    #[test]
    fn solver_residuals_across_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for d in Degree::all_up_to(5) {
            let p = AmvcProblem::new(d);
            for _ in 0..10 {
                let y = random_y(d, &mut rng, 50);
                let s = p.solve(&y).unwrap_or_else(|e| panic!("{d}: {e}"));
                assert!(s.residuals.iter().all(Zero::is_zero));
                assert!(p.is_solution(&y, &s.x));
            }
        }
    }

    #[test]
    fn oracle_1_1() {
        let p = AmvcProblem::new(deg(1, 1));
        let e = p.enumerate(&vec![q(0); 10]).unwrap();
        assert_eq!(e.patterns_tried, 32);
        assert_eq!(e.solutions.len(), 1);
        assert!(e.solutions[0].x.iter().all(Zero::is_zero));

        let y: Vec<Q> = [17, -3, 8, 41, -29, 5, 12, -44, 2, 33].iter().map(|&v| q(v)).collect();
        let e = p.enumerate(&y).unwrap();
        assert_eq!(e.solutions.len(), 1);
        assert_eq!(e.solutions[0].x, p.solve(&y).unwrap().x);
    }

    #[test]
    fn oracle_2_1() {
        let p = AmvcProblem::new(deg(2, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let y = random_y(p.degree, &mut rng, 50);
            let e = p.enumerate(&y).unwrap();
            assert_eq!(e.solutions.len(), 1);
            assert_eq!(e.solutions[0].x, p.solve(&y).unwrap().x);
        }
    }

    #[test]
    fn oracle_guard() {
        let d = deg(4, 4);
        assert!(PrimitiveCollectionSet::expected_len(d) > ORACLE_GUARD);
        let sys = MinValueSystem::new(d, vec![q(0); d.r()]).unwrap();
        assert!(matches!(enumerate_activity_patterns(&sys), Err(Error::GuardExceeded(..))));
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(MinValueSystem::new(deg(1, 1), vec![q(0); 9]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn aggregation_equivalence(a in -3i64..=3, bs in proptest::collection::vec(-3i64..=3, 1..5)) {
                let a = q(a);
                let bs: Vec<Q> = bs.into_iter().map(q).collect();
                prop_assert_eq!(each_min_zero(&a, &bs), aggregated_min_zero(&a, &bs));
            }
        }
    }
}
