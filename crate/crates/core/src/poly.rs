//! Sparse weight-graded polynomials in the generators `v_i`, `t_i` and the
//! rational logarithm generators `m_i`, with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dvr::{Prime, Valuation};
use crate::monomial::{weight, ExponentSeq};

/// A mixed monomial `v^α t^β m^γ`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub v: ExponentSeq,
    pub t: ExponentSeq,
    pub m: ExponentSeq,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn v(v: ExponentSeq) -> Self {
        Monomial { v, ..Default::default() }
    }

    pub fn t(t: ExponentSeq) -> Self {
        Monomial { t, ..Default::default() }
    }

    pub fn m(m: ExponentSeq) -> Self {
        Monomial { m, ..Default::default() }
    }

    pub fn vt(v: ExponentSeq, t: ExponentSeq) -> Self {
        Monomial { v, t, m: ExponentSeq::empty() }
    }

    pub fn weight(&self, p: Prime) -> u64 {
        weight(&self.v, p) + weight(&self.t, p) + weight(&self.m, p)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial { v: self.v.add(&other.v), t: self.t.add(&other.t), m: self.m.add(&other.m) }
    }

    pub fn is_pure_t(&self) -> bool {
        self.v.is_empty() && self.m.is_empty()
    }
}

// t-exponents dominate so that a polynomial reads as a polynomial in t with
// coefficients in v, m.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.t.cmp(&other.t).then_with(|| self.v.cmp(&other.v)).then_with(|| self.m.cmp(&other.m))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [("v", &self.v), ("t", &self.t), ("m", &self.m)]
            .into_iter()
            .filter(|(_, e)| !e.is_empty())
            .map(|(name, e)| e.monomial_string(name))
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// A finitely supported map from monomials to non-zero rationals.
///
/// Values produced by the workbench are weight-homogeneous; `weight` reports
/// the common weight and `is_homogeneous` checks it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPoly {
    prime: Prime,
    terms: BTreeMap<Monomial, BigRational>,
}

impl GradedPoly {
    pub fn zero(prime: Prime) -> Self {
        GradedPoly { prime, terms: BTreeMap::new() }
    }

    pub fn one(prime: Prime) -> Self {
        Self::term(prime, Monomial::one(), BigRational::one())
    }

    pub fn constant(prime: Prime, c: BigRational) -> Self {
        Self::term(prime, Monomial::one(), c)
    }

    pub fn term(prime: Prime, mono: Monomial, c: BigRational) -> Self {
        let mut p = Self::zero(prime);
        p.add_term(mono, c);
        p
    }

    pub fn from_terms(prime: Prime, terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Self::zero(prime);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: &Monomial) -> BigRational {
        self.terms.get(mono).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, mono: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Common weight of all terms; `None` for zero or inhomogeneous values.
    pub fn weight(&self) -> Option<u64> {
        let mut it = self.terms.keys().map(|m| m.weight(self.prime));
        let w = it.next()?;
        it.all(|x| x == w).then_some(w)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.weight().is_some()
    }

    pub fn add(&self, other: &GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> GradedPoly {
        if c.is_zero() {
            return GradedPoly::zero(self.prime);
        }
        GradedPoly { prime: self.prime, terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul(&self, other: &GradedPoly) -> GradedPoly {
        let mut out = GradedPoly::zero(self.prime);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> GradedPoly {
        let mut base = self.clone();
        let mut acc = GradedPoly::one(self.prime);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Replaces every `m_i` by `values[i]` (a polynomial without `m`s).
    pub fn substitute_m(&self, values: &[GradedPoly]) -> GradedPoly {
        let mut out = GradedPoly::zero(self.prime);
        for (mono, c) in &self.terms {
            let mut factor = GradedPoly::term(self.prime, Monomial::vt(mono.v.clone(), mono.t.clone()), c.clone());
            for (i, &e) in mono.m.entries().iter().enumerate() {
                if e > 0 {
                    factor = factor.mul(&values[i + 1].pow(e as u64));
                }
            }
            out = out.add(&factor);
        }
        out
    }

    /// The `v`-polynomial multiplying `t^β`.
    pub fn t_coefficient(&self, beta: &ExponentSeq) -> GradedPoly {
        GradedPoly::from_terms(
            self.prime,
            self.terms
                .iter()
                .filter(|(m, _)| &m.t == beta)
                .map(|(m, c)| (Monomial { v: m.v.clone(), t: ExponentSeq::empty(), m: m.m.clone() }, c.clone())),
        )
    }

    /// Groups terms by their `t`-exponent.
    pub fn by_t(&self) -> BTreeMap<ExponentSeq, GradedPoly> {
        let mut out: BTreeMap<ExponentSeq, GradedPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.t.clone())
                .or_insert_with(|| GradedPoly::zero(self.prime))
                .add_term(Monomial { v: m.v.clone(), t: ExponentSeq::empty(), m: m.m.clone() }, c.clone());
        }
        out
    }

    /// Sets every `t_i` to zero.
    pub fn counit(&self) -> GradedPoly {
        self.t_coefficient(&ExponentSeq::empty())
    }

    /// Terms with neither `v` nor `m`.
    pub fn pure_t_terms(&self) -> Vec<(ExponentSeq, BigRational)> {
        self.terms.iter().filter(|(m, _)| m.is_pure_t()).map(|(m, c)| (m.t.clone(), c.clone())).collect()
    }

    pub fn min_valuation(&self) -> Valuation {
        self.terms.values().map(|c| self.prime.valuation(c)).min().unwrap_or(Valuation::Infinite)
    }

    pub fn has_m(&self) -> bool {
        self.terms.keys().any(|m| !m.m.is_empty())
    }

    pub fn has_t(&self) -> bool {
        self.terms.keys().any(|m| !m.t.is_empty())
    }
}

/// Outcome of an integrality check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralityReport {
    pub integral: bool,
    pub offenders: Vec<(Monomial, BigRational)>,
}

pub fn check_integrality(poly: &GradedPoly) -> IntegralityReport {
    let p = poly.prime();
    let offenders: Vec<(Monomial, BigRational)> =
        poly.terms().filter(|(_, c)| !p.is_integral(c)).map(|(m, c)| (m.clone(), c.clone())).collect();
    IntegralityReport { integral: offenders.is_empty(), offenders }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = m.to_string();
            if mono == "1" {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}·{mono}")?;
            }
        }
        Ok(())
    }
}
