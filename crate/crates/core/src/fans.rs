//! Cone counts, simpliciality spot checks and Betti numbers of the fan.
//!
//! A set of rays spans a cone exactly when it contains no primitive
//! collection, so all counting happens on the collection hypergraph.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::column_rank;
use crate::pseudofan::{build_primitive_collections, PrimitiveCollectionSet};
use crate::toricdata::{build_vertex_matrix, ColLabel, Degree};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeCountTable {
    pub degree: Degree,
    pub kmax: usize,
    /// `counts[k]` is the number of `k`-dimensional cones.
    pub counts: Vec<u64>,
}

/// Incidence of rays in primitive collections, with per-collection fill counters.
struct Hypergraph {
    sizes: Vec<usize>,
    by_ray: Vec<Vec<usize>>,
}

impl Hypergraph {
    fn new(pcs: &PrimitiveCollectionSet) -> Self {
        let mut by_ray = vec![Vec::new(); pcs.degree.r()];
        for (c, coll) in pcs.collections.iter().enumerate() {
            for &i in &coll.indices {
                by_ray[i].push(c);
            }
        }
        Hypergraph {
            sizes: pcs.collections.iter().map(|c| c.indices.len()).collect(),
            by_ray,
        }
    }

    fn can_add(&self, fill: &[usize], v: usize) -> bool {
        self.by_ray[v].iter().all(|&c| fill[c] + 1 < self.sizes[c])
    }

    fn add(&self, fill: &mut [usize], v: usize) {
        for &c in &self.by_ray[v] {
            fill[c] += 1;
        }
    }

    fn remove(&self, fill: &mut [usize], v: usize) {
        for &c in &self.by_ray[v] {
            fill[c] -= 1;
        }
    }
}

struct Counter<'a> {
    graph: &'a Hypergraph,
    fill: Vec<usize>,
    counts: Vec<u64>,
    nodes: u64,
    budget: Option<u64>,
}

impl Counter<'_> {
    fn descend(&mut self, start: usize, size: usize) -> Result<()> {
        let kmax = self.counts.len() - 1;
        for v in start..self.graph.by_ray.len() {
            if !self.graph.can_add(&self.fill, v) {
                continue;
            }
            self.nodes += 1;
            if let Some(b) = self.budget {
                if self.nodes > b {
                    return Err(Error::BudgetExceeded(b));
                }
            }
            self.counts[size + 1] += 1;
            if size + 1 < kmax {
                self.graph.add(&mut self.fill, v);
                self.descend(v + 1, size + 1)?;
                self.graph.remove(&mut self.fill, v);
            }
        }
        Ok(())
    }
}

/// Number of cones of each dimension `0..=kmax`, by depth-first search over
/// rays in column order. `budget` caps the number of cones visited.
pub fn count_cones(d: Degree, kmax: usize, budget: Option<u64>) -> Result<ConeCountTable> {
    if kmax > d.n() {
        return Err(Error::KmaxOutOfRange { kmax, max: d.n() });
    }
    let pcs = build_primitive_collections(d);
    let graph = Hypergraph::new(&pcs);
    let mut counter = Counter {
        graph: &graph,
        fill: vec![0; pcs.len()],
        counts: vec![0; kmax + 1],
        nodes: 0,
        budget,
    };
    counter.counts[0] = 1;
    if kmax > 0 {
        counter.descend(0, 0)?;
    }
    Ok(ConeCountTable {
        degree: d,
        kmax,
        counts: counter.counts,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleFailure {
    pub members: Vec<ColLabel>,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplicialSampleReport {
    pub degree: Degree,
    pub trials: usize,
    pub seed: u64,
    /// Samples whose size is `n` and whose generators are independent.
    pub passed: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub failures: Vec<SampleFailure>,
}

impl SimplicialSampleReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }
}

/// Completes random ray orders greedily to maximal cones and checks that
/// each has `n` linearly independent generators.
pub fn verify_simplicial_sample(d: Degree, trials: usize, seed: u64) -> SimplicialSampleReport {
    let pcs = build_primitive_collections(d);
    let graph = Hypergraph::new(&pcs);
    let v = build_vertex_matrix(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..d.r()).collect();
    let mut report = SimplicialSampleReport {
        degree: d,
        trials,
        seed,
        passed: 0,
        min_size: usize::MAX,
        max_size: 0,
        failures: Vec::new(),
    };
    for _ in 0..trials {
        order.shuffle(&mut rng);
        let mut fill = vec![0; pcs.len()];
        let mut cone = Vec::new();
        for &ray in &order {
            if graph.can_add(&fill, ray) {
                graph.add(&mut fill, ray);
                cone.push(ray);
            }
        }
        cone.sort_unstable();
        let rank = column_rank(&v.matrix, &cone);
        report.min_size = report.min_size.min(cone.len());
        report.max_size = report.max_size.max(cone.len());
        if rank == cone.len() && cone.len() == d.n() {
            report.passed += 1;
        } else {
            report.failures.push(SampleFailure {
                members: cone.iter().map(|&i| v.col_labels[i]).collect(),
                rank,
            });
        }
    }
    if trials == 0 {
        report.min_size = 0;
    }
    report
}

/// Even Betti numbers `b_0, b_2, ..., b_2n`; odd ones vanish.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoincarePolynomial {
    pub degree: Degree,
    /// `betti[k]` is `b_2k`.
    pub betti: Vec<i128>,
}

impl PoincarePolynomial {
    /// Coefficients of `t^0 .. t^2n`, odd ones zero.
    pub fn coefficients(&self) -> Vec<i128> {
        let mut out = vec![0; 2 * self.betti.len() - 1];
        for (k, b) in self.betti.iter().enumerate() {
            out[2 * k] = *b;
        }
        out
    }

    pub fn is_palindromic(&self) -> bool {
        self.betti.iter().eq(self.betti.iter().rev())
    }

    /// Euler characteristic, which is also the number of maximal cones.
    pub fn euler_characteristic(&self) -> i128 {
        self.betti.iter().sum()
    }
}

impl fmt::Display for PoincarePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &b) in self.betti.iter().enumerate() {
            if b == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (k, b) {
                (0, _) => write!(f, "{b}")?,
                (1, 1) => f.write_str("t^2")?,
                (1, _) => write!(f, "{b}t^2")?,
                (_, 1) => write!(f, "t^{}", 2 * k)?,
                _ => write!(f, "{b}t^{}", 2 * k)?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

pub fn binomial(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// `b_2k = sum_{i=k}^{n} (-1)^(i-k) C(i,k) |cones of dim n-i|` wherever the
/// needed counts are available, the rest by `b_2k = b_2(n-k)`. Where both
/// apply they must agree.
pub fn betti_numbers(table: &ConeCountTable) -> Result<PoincarePolynomial> {
    let n = table.degree.n();
    let have = table.kmax.min(table.counts.len().saturating_sub(1));
    if have < n / 2 {
        return Err(Error::InsufficientCounts { have, need: n / 2 });
    }
    let direct = |k: usize| -> Option<i128> {
        if n - k > have {
            return None;
        }
        let mut acc = 0i128;
        for i in k..=n {
            let term = binomial(i, k) * table.counts[n - i] as i128;
            if (i - k).is_multiple_of(2) {
                acc += term;
            } else {
                acc -= term;
            }
        }
        Some(acc)
    };
    let formula: Vec<Option<i128>> = (0..=n).map(direct).collect();
    let mut betti = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mirrored = formula[n - k];
        let b = match (formula[k], mirrored) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::InconsistentBetti(format!("b_{} = {a} but b_{} = {b}", 2 * k, 2 * (n - k))));
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => unreachable!("every degree is reachable by the formula or its mirror"),
        };
        betti.push(b);
    }
    if betti[0] != 1 || betti.iter().any(|&b| b < 0) {
        return Err(Error::InconsistentBetti(format!("{betti:?}")));
    }
    Ok(PoincarePolynomial {
        degree: table.degree,
        betti,
    })
}

/// Comparison with `(1+t^2)^exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BinomialComparison {
    pub exponent: usize,
    pub binomial_betti: Vec<i128>,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoincareResult {
    pub polynomial: PoincarePolynomial,
    pub counts: ConeCountTable,
    /// Present for `d2 = 1`, against `(1+t^2)^(2 d1 + 3)`.
    pub comparison: Option<BinomialComparison>,
}

pub fn poincare_polynomial(d: Degree, budget: Option<u64>) -> Result<PoincareResult> {
    let counts = count_cones(d, d.n() / 2, budget)?;
    let polynomial = betti_numbers(&counts)?;
    let comparison = (d.d2() == 1).then(|| {
        let exponent = 2 * d.d1() + 3;
        let binomial_betti: Vec<i128> = (0..=exponent).map(|k| binomial(exponent, k)).collect();
        BinomialComparison {
            exponent,
            equal: binomial_betti == polynomial.betti,
            binomial_betti,
        }
    });
    Ok(PoincareResult {
        polynomial,
        counts,
        comparison,
    })
}
