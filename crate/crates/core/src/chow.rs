//! Chow group, rational Chow ring and the quotient presentation of the
//! moduli space.
//!
//! Generators `h_1 .. h_(r-n)` follow the row order of `W`; the divisor of a
//! ray is the linear form given by its column of `W`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::{integer_right_inverse, rank_over_q, IntMatrix};
use crate::pseudofan::{build_primitive_collections, CollectionKind, PrimitiveCollectionSet};
use crate::toricdata::{build_weight_matrix, ColLabel, Degree, LabeledIntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorClass {
    pub ray: ColLabel,
    pub coordinates: Vec<i64>,
}

/// Integer basis of the Chow group of divisors and the class of every
/// torus-invariant divisor in it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChowGroupBasis {
    /// `r x (r-n)` with `W * basis = I`.
    pub basis: IntMatrix,
    pub divisor_classes: Vec<DivisorClass>,
}

pub fn chow_group_basis(w: &LabeledIntMatrix) -> Result<ChowGroupBasis> {
    let basis = integer_right_inverse(&w.matrix)?;
    if w.matrix.checked_mul(&basis)? != IntMatrix::identity(w.matrix.rows()) {
        return Err(Error::NotSurjective(Vec::new()));
    }
    let divisor_classes = w
        .col_labels
        .iter()
        .enumerate()
        .map(|(j, &ray)| DivisorClass {
            ray,
            coordinates: w.matrix.column(j),
        })
        .collect();
    Ok(ChowGroupBasis { basis, divisor_classes })
}

/// `sum_k c_k h_k` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct LinearForm(pub Vec<i64>);

impl LinearForm {
    /// `Some(k)` when the form is exactly `h_(k+1)`.
    fn as_generator(&self) -> Option<usize> {
        let mut nz = self.0.iter().enumerate().filter(|(_, &c)| c != 0);
        match (nz.next(), nz.next()) {
            (Some((k, 1)), None) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            if mag == 1 {
                write!(f, "{sign}h{}", k + 1)?;
            } else {
                write!(f, "{sign}{mag}h{}", k + 1)?;
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Product of the divisor forms of one primitive collection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub collection: Vec<ColLabel>,
    pub factors: Vec<LinearForm>,
}

impl Relation {
    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    /// Factors with multiplicities, in first-appearance order.
    pub fn grouped(&self) -> Vec<(&LinearForm, usize)> {
        let mut out: Vec<(&LinearForm, usize)> = Vec::new();
        for f in &self.factors {
            match out.iter_mut().find(|(g, _)| *g == f) {
                Some((_, m)) => *m += 1,
                None => out.push((f, 1)),
            }
        }
        out
    }

    /// Text with `times` between factors, e.g. `h2^2(-h1+h2+h6-h7)` for an
    /// empty separator.
    pub fn render(&self, times: &str) -> String {
        self.grouped()
            .into_iter()
            .map(|(form, m)| {
                let base = match form.as_generator() {
                    Some(k) => format!("h{}", k + 1),
                    None => format!("({form})"),
                };
                if m == 1 {
                    base
                } else {
                    format!("{base}^{m}")
                }
            })
            .collect::<Vec<_>>()
            .join(times)
    }

    /// Expanded polynomial.
    pub fn expand(&self) -> Polynomial {
        let g = self.factors.first().map_or(0, |f| f.0.len());
        let mut acc = Polynomial::one(g);
        for f in &self.factors {
            acc = acc.times_linear(f);
        }
        acc
    }

    /// Multiset of factors, for comparisons up to reordering.
    pub fn factor_multiset(&self) -> Vec<Vec<i64>> {
        let mut v: Vec<Vec<i64>> = self.factors.iter().map(|f| f.0.clone()).collect();
        v.sort();
        v
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(""))
    }
}

/// Polynomial in `h_1 .. h_g` with integer coefficients, keyed by exponent vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    pub vars: usize,
    pub terms: BTreeMap<Vec<u32>, BigInt>,
}

impl Polynomial {
    pub fn one(vars: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; vars], BigInt::one());
        Polynomial { vars, terms }
    }

    pub fn times_linear(&self, form: &LinearForm) -> Polynomial {
        let mut terms: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (mono, c) in &self.terms {
            for (k, &a) in form.0.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let mut m = mono.clone();
                m[k] += 1;
                *terms.entry(m).or_insert_with(BigInt::zero) += c * BigInt::from(a);
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Polynomial { vars: self.vars, terms }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.iter().sum::<u32>());
        match degs.next() {
            Some(d) => degs.all(|e| e == d),
            None => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChowPresentation {
    pub degree: Degree,
    pub num_generators: usize,
    pub relations: Vec<Relation>,
}

impl ChowPresentation {
    pub fn from_parts(w: &LabeledIntMatrix, pcs: &PrimitiveCollectionSet) -> Self {
        let relations = pcs
            .collections
            .iter()
            .map(|c| Relation {
                collection: c.members.clone(),
                factors: c.indices.iter().map(|&j| LinearForm(w.matrix.column(j))).collect(),
            })
            .collect();
        ChowPresentation {
            degree: pcs.degree,
            num_generators: w.matrix.rows(),
            relations,
        }
    }
}

pub fn chow_presentation(d: Degree) -> ChowPresentation {
    ChowPresentation::from_parts(&build_weight_matrix(d), &build_primitive_collections(d))
}

/// All exponent vectors of total degree `k` in `g` variables, in
/// lexicographically decreasing order.
pub fn monomials(g: usize, k: usize) -> Vec<Vec<u32>> {
    fn go(g: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == g {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=k).rev() {
            prefix.push(e);
            go(g, k - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if g == 0 {
        if k == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(g, k as u32, &mut Vec::new(), &mut out);
    out
}

/// Dimension of each graded piece `0..=kmax` of the quotient ring, from the
/// rank of the span of monomial multiples of the relations. `budget` bounds
/// the number of matrix entries per degree.
pub fn graded_dimensions(p: &ChowPresentation, kmax: usize, budget: Option<u64>) -> Result<Vec<usize>> {
    let g = p.num_generators;
    let expanded: Vec<(usize, Polynomial)> = p.relations.iter().map(|r| (r.degree(), r.expand())).collect();
    let mut dims = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        let basis = monomials(g, k);
        let index: HashMap<&Vec<u32>, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let multipliers: Vec<(usize, Vec<Vec<u32>>)> = expanded
            .iter()
            .enumerate()
            .filter(|(_, (deg, _))| *deg <= k)
            .map(|(i, (deg, _))| (i, monomials(g, k - deg)))
            .collect();
        let row_count: u64 = multipliers.iter().map(|(_, m)| m.len() as u64).sum();
        if let Some(b) = budget {
            if row_count.saturating_mul(basis.len() as u64) > b {
                return Err(Error::BudgetExceeded(b));
            }
        }
        let mut rows = Vec::with_capacity(row_count as usize);
        for (i, mults) in &multipliers {
            let poly = &expanded[*i].1;
            for m in mults {
                let mut row = vec![BigInt::zero(); basis.len()];
                for (mono, c) in &poly.terms {
                    let prod: Vec<u32> = mono.iter().zip(m).map(|(a, b)| a + b).collect();
                    row[index[&prod]] += c;
                }
                rows.push(row);
            }
        }
        dims.push(basis.len() - rank_over_q(&rows));
    }
    Ok(dims)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dialect {
    /// Ring and ideal declarations in Macaulay2 syntax.
    Macaulay2,
    PlainText,
}

impl FromStr for Dialect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "macaulay2" | "m2" | "cas" => Ok(Dialect::Macaulay2),
            "plain" | "text" | "plain-text" => Ok(Dialect::PlainText),
            _ => Err(Error::UnknownDialect(s.to_string())),
        }
    }
}

pub fn emit_cas_script(p: &ChowPresentation, dialect: &str) -> Result<String> {
    let dialect: Dialect = dialect.parse()?;
    let vars: Vec<String> = (1..=p.num_generators).map(|k| format!("h{k}")).collect();
    let mut out = String::new();
    match dialect {
        Dialect::Macaulay2 => {
            out.push_str(&format!("-- Chow ring of degree {}\n", p.degree));
            out.push_str(&format!("R = QQ[{}];\n", vars.join(",")));
            if !p.relations.is_empty() {
                let gens: Vec<String> = p.relations.iter().map(|r| r.render("*")).collect();
                out.push_str(&format!("I = ideal(\n  {}\n);\n", gens.join(",\n  ")));
                out.push_str("A = R/I;\n");
            }
        }
        Dialect::PlainText => {
            out.push_str(&format!("degree: {}\n", p.degree));
            out.push_str(&format!("ring: Q[{}]\n", vars.join(", ")));
            if !p.relations.is_empty() {
                out.push_str("relations:\n");
                for r in &p.relations {
                    out.push_str(&format!("  {}\n", r.render("")));
                }
            }
        }
    }
    Ok(out)
}

/// The common zero set of some coordinates, one per primitive collection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExcludedLocus {
    #[serde(flatten)]
    pub kind: CollectionKind,
    pub coordinates: Vec<ColLabel>,
    pub display: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuliPresentation {
    pub degree: Degree,
    pub coordinates: Vec<ColLabel>,
    pub torus_rank: usize,
    /// Torus weights, columns in coordinate order.
    pub weights: LabeledIntMatrix,
    pub excluded_locus: Vec<ExcludedLocus>,
}

impl ModuliPresentation {
    /// The excluded set as a union of its loci.
    pub fn excluded_display(&self) -> String {
        self.excluded_locus
            .iter()
            .map(|l| l.display.as_str())
            .collect::<Vec<_>>()
            .join(" ∪ ")
    }
}

/// Coordinates `a_0, .., a_d1, b_0, .., b_d2`, then the `u` blocks row by row.
pub fn definition_order(d: Degree) -> Vec<ColLabel> {
    let mut out = Vec::with_capacity(d.r());
    for i in 0..=d.d1() {
        out.push(ColLabel::A { i, k: 1 });
        out.push(ColLabel::A { i, k: 2 });
    }
    for j in 0..=d.d2() {
        out.push(ColLabel::B { j, k: 1 });
        out.push(ColLabel::B { j, k: 2 });
    }
    out.extend(d.index_set().into_iter().map(|(i, j)| ColLabel::U(i, j)));
    out
}

fn locus_display(kind: CollectionKind) -> String {
    let u = |(i, j): (usize, usize)| format!("u_({i},{j})");
    match kind {
        CollectionKind::PairA { i } => format!("{{a_{i} = 0}}"),
        CollectionKind::PairB { j } => format!("{{b_{j} = 0}}"),
        CollectionKind::TripleA { i, j } => format!("{{(a_{i}, {}) = 0}}", u((i, j))),
        CollectionKind::TripleB { i, j } => format!("{{(b_{j}, {}) = 0}}", u((i, j))),
        CollectionKind::PairU { first, second } => format!("{{({}, {}) = (0,0)}}", u(first), u(second)),
    }
}

pub fn moduli_presentation(d: Degree) -> ModuliPresentation {
    let w = build_weight_matrix(d);
    let coordinates = definition_order(d);
    let cols: Vec<usize> = coordinates
        .iter()
        .map(|&l| w.col_index(l).expect("every coordinate is a column"))
        .collect();
    let weights = LabeledIntMatrix {
        degree: d,
        matrix: w.matrix.select_columns(&cols),
        row_labels: w.row_labels.clone(),
        col_labels: coordinates.clone(),
    };
    let excluded_locus = build_primitive_collections(d)
        .collections
        .into_iter()
        .map(|c| ExcludedLocus {
            kind: c.kind,
            display: locus_display(c.kind),
            coordinates: c.members,
        })
        .collect();
    ModuliPresentation {
        degree: d,
        coordinates,
        torus_rank: d.torus_rank(),
        weights,
        excluded_locus,
    }
}
