//! Exact polynomials in `Q[ε_1, ..., ε_n, δ]`, GKM conditions on moment graphs,
//! equivariant Euler classes, and the Knutson–Tao basis of `X(1, 3)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::momentgraph::{Character, MomentGraph};
use crate::necklace::{enumerate_necklaces, Necklace};

/// Exponents of `ε_1, ..., ε_n` followed by the exponent of `δ`.
///
/// Ordered graded-lexicographically with the largest monomial first, so a
/// `BTreeMap` iterates terms in printing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    n: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl MultiPoly {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: BigRational) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Monomial(vec![0; n + 1]), c);
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, BigRational::one())
    }

    pub fn from_int(n: usize, c: i64) -> Self {
        Self::constant(n, BigRational::from_integer(c.into()))
    }

    /// `ε_i`, with `i` in `1..=n`.
    pub fn eps(n: usize, i: usize) -> Self {
        assert!((1..=n).contains(&i), "ε index {i} out of range 1..={n}");
        let mut e = vec![0; n + 1];
        e[i - 1] = 1;
        let mut p = Self::zero(n);
        p.add_term(Monomial(e), BigRational::one());
        p
    }

    pub fn delta(n: usize) -> Self {
        let mut e = vec![0; n + 1];
        e[n] = 1;
        let mut p = Self::zero(n);
        p.add_term(Monomial(e), BigRational::one());
        p
    }

    /// `ε_i - ε_j - m δ`.
    pub fn linear(n: usize, i: usize, j: usize, m: i64) -> Self {
        &(&Self::eps(n, i) - &Self::eps(n, j))
            - &Self::delta(n).scale(&BigRational::from_integer(m.into()))
    }

    pub fn from_character(c: &Character) -> Self {
        let n = c.eps.len();
        let mut p = Self::zero(n);
        for (i, &a) in c.eps.iter().enumerate() {
            if a != 0 {
                p = &p + &Self::eps(n, i + 1).scale(&BigRational::from_integer(a.into()));
            }
        }
        &p + &Self::delta(n).scale(&BigRational::from_integer(c.delta.into()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry(m.clone())
            .or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn check_same_ring(&self, other: &Self) {
        assert_eq!(
            self.n, other.n,
            "polynomials live in rings with different n"
        );
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Cohomological degree: twice the polynomial degree. `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| 2 * m.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            Some(d) => degs.all(|e| e == d),
            None => true,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.n), |acc, _| &acc * self)
    }

    /// Substitutes `ε_j := ε_{j'} + m δ`.
    pub fn substitute_edge(&self, j: usize, jp: usize, m: i64) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        let mq = BigRational::from_integer(m.into());
        for (mono, c) in &self.terms {
            let a = mono.0[j - 1];
            let mut binom = BigInt::one();
            for t in 0..=a {
                // C(a, t) (ε_{j'})^t (m δ)^(a - t)
                let mut e = mono.0.clone();
                e[j - 1] = 0;
                e[jp - 1] += t;
                e[n] += a - t;
                let coeff = c * BigRational::from_integer(binom.clone()) * pow_q(&mq, a - t);
                out.add_term(Monomial(e), coeff);
                binom = binom * BigInt::from(a - t) / BigInt::from(t + 1);
            }
        }
        out
    }
}

fn pow_q(x: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_same_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    // exponents add when monomials multiply
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_same_ring(rhs);
        let mut out = MultiPoly::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let e = ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect();
                out.add_term(Monomial(e), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let factors: Vec<String> =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        let var = if i == self.n {
                            "d".to_string()
                        } else {
                            format!("e{}", i + 1)
                        };
                        if e == 1 {
                            var
                        } else {
                            format!("{var}^{e}")
                        }
                    })
                    .collect();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Parses the text format in a ring with `n` ε-variables, e.g. `e1^2*d - 3*e2 + 1/2`.
pub fn parse_poly(n: usize, s: &str) -> Result<MultiPoly> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return invalid("empty polynomial");
    }
    let mut out = MultiPoly::zero(n);
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for ch in compact.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() {
            terms.push((neg, std::mem::take(&mut cur)));
            neg = ch == '-';
        } else if ch == '+' || ch == '-' {
            neg ^= ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return invalid(format!("dangling sign in {s:?}"));
    }
    terms.push((neg, cur));
    for (neg, t) in terms {
        let mut coeff = BigRational::one();
        let mut e = vec![0u32; n + 1];
        for factor in t.split('*') {
            let (base, exp) = match factor.split_once('^') {
                Some((b, x)) => (
                    b,
                    x.parse::<u32>().map_err(|_| {
                        Error::InvalidArgument(format!("bad exponent in {factor:?}"))
                    })?,
                ),
                None => (factor, 1),
            };
            if base == "d" {
                e[n] += exp;
            } else if let Some(idx) = base.strip_prefix('e') {
                let i: usize = idx
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad variable {base:?}")))?;
                if !(1..=n).contains(&i) {
                    return invalid(format!("variable e{i} outside e1..e{n}"));
                }
                e[i - 1] += exp;
            } else {
                let c: BigRational = base
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad coefficient {base:?}")))?;
                coeff *= pow_q(&c, exp);
            }
        }
        if neg {
            coeff = -coeff;
        }
        out.add_term(Monomial(e), coeff);
    }
    Ok(out)
}

/// True iff `alpha = ε_j - ε_{j'} - m δ` divides `p`, tested by the substitution
/// `ε_j := ε_{j'} + m δ`.
pub fn divides_linear(alpha: &Character, p: &MultiPoly) -> Result<bool> {
    let Some((j, jp, m)) = alpha.as_edge() else {
        return invalid(format!("{alpha} is not of the form e_j - e_j' - m d"));
    };
    if alpha.eps.len() != p.n() {
        return invalid(format!(
            "character has {} ε-coordinates, polynomial ring has {}",
            alpha.eps.len(),
            p.n()
        ));
    }
    Ok(p.substitute_edge(j, jp, m).is_zero())
}

/// A tuple `(z_N)` indexed by all necklaces of `(k, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GkmTuple {
    k: usize,
    n: usize,
    values: BTreeMap<Necklace, MultiPoly>,
}

impl GkmTuple {
    pub fn new(k: usize, n: usize, values: BTreeMap<Necklace, MultiPoly>) -> Result<Self> {
        let expected = enumerate_necklaces(k, n)?;
        if values.len() != expected.len() || !expected.iter().all(|v| values.contains_key(v)) {
            return invalid(format!("tuple is not keyed by the necklaces of ({k}, {n})"));
        }
        if values.values().any(|p| p.n() != n) {
            return invalid("tuple entries live in the wrong polynomial ring");
        }
        Ok(Self { k, n, values })
    }

    pub fn from_pairs(k: usize, n: usize, pairs: Vec<(Necklace, MultiPoly)>) -> Result<Self> {
        Self::new(k, n, pairs.into_iter().collect())
    }

    pub fn constant(k: usize, n: usize, c: i64) -> Result<Self> {
        let values = enumerate_necklaces(k, n)?
            .into_iter()
            .map(|v| (v, MultiPoly::from_int(n, c)))
            .collect();
        Self::new(k, n, values)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, v: &Necklace) -> Option<&MultiPoly> {
        self.values.get(v)
    }

    pub fn values(&self) -> &BTreeMap<Necklace, MultiPoly> {
        &self.values
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&MultiPoly, &MultiPoly) -> MultiPoly) -> Self {
        assert!(
            self.k == other.k && self.n == other.n,
            "tuples over different graphs"
        );
        let values = self
            .values
            .iter()
            .map(|(v, p)| (v.clone(), op(p, &other.values[v])))
            .collect();
        Self {
            k: self.k,
            n: self.n,
            values,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    /// Largest entry degree; `None` when every entry is zero.
    pub fn degree(&self) -> Option<u32> {
        self.values.values().filter_map(MultiPoly::degree).max()
    }

    /// Vertices with nonzero entries.
    pub fn support(&self) -> Vec<&Necklace> {
        self.values
            .iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(v, _)| v)
            .collect()
    }

    pub fn to_json(&self) -> String {
        let values: BTreeMap<String, String> = self
            .values
            .iter()
            .map(|(v, p)| {
                (
                    serde_json::to_string(v).expect("necklace serializes"),
                    p.to_string(),
                )
            })
            .collect();
        serde_json::to_string(&JsonTuple {
            k: self.k,
            n: self.n,
            values,
        })
        .expect("tuple serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: JsonTuple = serde_json::from_str(s)
            .map_err(|e| Error::InvalidArgument(format!("bad tuple JSON: {e}")))?;
        let mut values = BTreeMap::new();
        for (key, poly) in raw.values {
            let v: Necklace = serde_json::from_str(&key)
                .map_err(|e| Error::InvalidArgument(format!("bad necklace key {key:?}: {e}")))?;
            values.insert(v, parse_poly(raw.n, &poly)?);
        }
        Self::new(raw.k, raw.n, values)
    }
}

#[derive(Serialize, Deserialize)]
struct JsonTuple {
    k: usize,
    n: usize,
    values: BTreeMap<String, String>,
}

/// An edge whose GKM congruence fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub src: Necklace,
    pub dst: Necklace,
    pub label: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} ({})", self.src, self.dst, self.label)
    }
}

/// Edges `N -> N'` of `g` where `label` does not divide `z_N - z_N'`.
/// Empty means `t` is a GKM class.
pub fn gkm_violations(t: &GkmTuple, g: &MomentGraph) -> Result<Vec<Violation>> {
    if t.k != g.k() || t.n != g.n() || t.values.len() != g.vertices().len() {
        return invalid("tuple and moment graph have different vertex sets");
    }
    let vs = g.vertices();
    let checks: Vec<Result<Option<Violation>>> = g
        .edges()
        .par_iter()
        .map(|e| {
            let (a, b) = (&vs[e.src], &vs[e.dst]);
            let diff = &t.values[a] - &t.values[b];
            Ok((!divides_linear(&e.label, &diff)?).then(|| Violation {
                src: a.clone(),
                dst: b.clone(),
                label: e.label.to_string(),
            }))
        })
        .collect();
    let mut out = Vec::new();
    for c in checks {
        out.extend(c?);
    }
    Ok(out)
}

pub fn is_gkm_class(t: &GkmTuple, g: &MomentGraph) -> Result<bool> {
    Ok(gkm_violations(t, g)?.is_empty())
}

/// Product of the labels on the outgoing edges of `v`.
pub fn euler_class(g: &MomentGraph, v: &Necklace) -> Result<MultiPoly> {
    let idx = g.index_of(v)?;
    Ok(g.out_edges(idx).fold(MultiPoly::one(g.n()), |acc, e| {
        &acc * &MultiPoly::from_character(&e.label)
    }))
}

/// Vertex order of the Knutson–Tao tuples for `X(1, 3)`.
pub const KT_ORDER: [&str; 7] = ["123", "121", "133", "223", "111", "222", "333"];

fn kt_tuple(entries: [MultiPoly; 7]) -> GkmTuple {
    let pairs = KT_ORDER
        .iter()
        .zip(entries)
        .map(|(s, p)| (s.parse().expect("fixed necklace"), p))
        .collect();
    GkmTuple::from_pairs(1, 3, pairs).expect("fixture is keyed by the (1,3) necklaces")
}

fn kt_basis_with_last(last: MultiPoly) -> Vec<GkmTuple> {
    let a = |i, j, m| MultiPoly::linear(3, i, j, m);
    let z = || MultiPoly::zero(3);
    let one = || MultiPoly::one(3);
    vec![
        kt_tuple([one(), one(), one(), one(), one(), one(), one()]),
        kt_tuple([z(), z(), a(3, 2, 1), z(), a(1, 2, 2), z(), a(3, 2, 1)]),
        kt_tuple([z(), a(1, 3, 1), z(), z(), a(1, 3, 1), a(2, 3, 2), z()]),
        kt_tuple([z(), z(), z(), a(2, 1, 1), z(), a(2, 1, 1), a(3, 1, 2)]),
        kt_tuple([z(), z(), z(), z(), &a(1, 2, 2) * &a(1, 3, 1), z(), z()]),
        kt_tuple([z(), z(), z(), z(), z(), &a(2, 1, 1) * &a(2, 3, 2), z()]),
        kt_tuple([z(), z(), z(), z(), z(), z(), last]),
    ]
}

/// The seven tuples exactly as printed, last entry `(α_{21} - δ)(α_{32} - δ)` included.
pub fn kt_basis_printed() -> Vec<GkmTuple> {
    kt_basis_with_last(&MultiPoly::linear(3, 2, 1, 1) * &MultiPoly::linear(3, 3, 2, 1))
}

/// The printed tuples with the last entry replaced by the Euler class
/// `(α_{31} - 2δ)(α_{32} - δ)` at `333`.
pub fn kt_basis_corrected() -> Vec<GkmTuple> {
    kt_basis_with_last(&MultiPoly::linear(3, 3, 1, 2) * &MultiPoly::linear(3, 3, 2, 1))
}

#[derive(Debug, Clone, Serialize)]
pub struct KtTupleReport {
    pub index: usize,
    pub degree: u32,
    pub violations: Vec<Violation>,
    pub support_minimum: Option<Necklace>,
    pub distinguished_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KtReport {
    pub tuples: Vec<KtTupleReport>,
    /// Number of tuples in cohomological degree 0, 2, 4, ...
    pub degree_histogram: Vec<usize>,
    pub histogram_ok: bool,
    pub passed: bool,
}

/// Checks GKM congruences, degrees and distinguished entries of a candidate
/// basis of `H_T(X(1, 3))`.
pub fn verify_kt_tuples(tuples: &[GkmTuple]) -> Result<KtReport> {
    let g = crate::momentgraph::build(1, 3)?;
    let mut reports = Vec::new();
    let mut histogram = Vec::new();
    for (idx, t) in tuples.iter().enumerate() {
        let violations = gkm_violations(t, &g)?;
        let homogeneous = t.values.values().all(MultiPoly::is_homogeneous);
        let degree = t.degree().unwrap_or(0);
        let slot = (degree / 2) as usize;
        if histogram.len() <= slot {
            histogram.resize(slot + 1, 0);
        }
        histogram[slot] += 1;
        let support = t.support();
        // the support must have a unique minimum in the closure order
        let minimum = support
            .iter()
            .find(|v| {
                support
                    .iter()
                    .all(|w| crate::necklace::necklace_leq_unchecked(v, w))
            })
            .map(|v| (*v).clone());
        let distinguished_ok = match &minimum {
            Some(v) => homogeneous && t.values[v] == euler_class(&g, v)?,
            None => false,
        };
        reports.push(KtTupleReport {
            index: idx + 1,
            degree,
            violations,
            support_minimum: minimum,
            distinguished_ok,
        });
    }
    let expected: Vec<usize> = crate::momentgraph::poincare_of(&g)?
        .iter()
        .map(|&c| c as usize)
        .collect();
    let histogram_ok = histogram == expected;
    let passed = histogram_ok
        && reports
            .iter()
            .all(|r| r.violations.is_empty() && r.distinguished_ok);
    Ok(KtReport {
        tuples: reports,
        degree_histogram: histogram,
        histogram_ok,
        passed,
    })
}

/// Runs the checks on the printed fixture.
pub fn verify_kt_example() -> Result<KtReport> {
    verify_kt_tuples(&kt_basis_printed())
}

impl FromStr for MultiPoly {
    type Err = Error;

    /// Infers `n` from the largest `ε` index present (at least 1).
    fn from_str(s: &str) -> Result<Self> {
        let n = s
            .split(|c: char| !c.is_ascii_alphanumeric())
            .filter_map(|tok| tok.strip_prefix('e').and_then(|i| i.parse::<usize>().ok()))
            .max()
            .unwrap_or(1);
        parse_poly(n, s)
    }
}
