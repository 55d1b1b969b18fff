//! The coefficient ring `BP_* = Z_(p)[v_1, v_2, …]` with Hazewinkel
//! generators and the right unit `η_R : BP_* → BP_*(BP) = BP_*[t_1, t_2, …]`.
//!
//! The logarithm coefficients satisfy
//!
//! ```text
//! p·m_k = Σ_{0≤i<k} m_i · v_{k-i}^{p^i},      m_0 = 1,
//! η_R(m_k) = Σ_{i+j=k} m_i · t_j^{p^i},        t_0 = 1.
//! ```
//!
//! Solving the first identity for `v_k` and applying the ring map `η_R`
//! expresses `η_R(v_k)` through `η_R(m_i)` and `η_R(v_j)` for `j < k`. The
//! `m`s are rational; every `η_R(v^γ)` comes out p-integral, which is
//! checked on every entry.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dvr::Prime;
use crate::error::{Error, Result};
use crate::monomial::{enumerate_weight, generator_weight, max_index_for, weight, ExponentSeq};
use crate::poly::{check_integrality, GradedPoly, Monomial};

pub const CONVENTION: &str = "hazewinkel";

/// `m_k` as a rational polynomial in `v_1, …, v_k`.
pub fn hazewinkel_m(k: usize, p: Prime) -> GradedPoly {
    hazewinkel_m_all(k, p).pop().expect("non-empty")
}

/// `[m_0, m_1, …, m_k]`.
pub fn hazewinkel_m_all(k: usize, p: Prime) -> Vec<GradedPoly> {
    let inv_p = BigRational::new(BigInt::one(), p.to_bigint());
    let mut ms = vec![GradedPoly::one(p)];
    for n in 1..=k {
        let mut acc = GradedPoly::zero(p);
        for (i, m_i) in ms.iter().enumerate() {
            let v = Monomial::v(ExponentSeq::generator(n - i, p.pow(i as u32).try_into().expect("small")));
            acc = acc.add(&m_i.mul(&GradedPoly::term(p, v, BigRational::one())));
        }
        ms.push(acc.scale(&inv_p));
    }
    ms
}

/// `η_R(m_k) = Σ_{i+j=k} m_i t_j^{p^i}`, with the `m_i` kept symbolic.
pub fn eta_r_m_symbolic(k: usize, p: Prime) -> GradedPoly {
    let mut out = GradedPoly::zero(p);
    for i in 0..=k {
        let j = k - i;
        let m = if i == 0 { ExponentSeq::empty() } else { ExponentSeq::generator(i, 1) };
        let t = if j == 0 {
            ExponentSeq::empty()
        } else {
            ExponentSeq::generator(j, p.pow(i as u32).try_into().expect("small"))
        };
        out.add_term(Monomial { v: ExponentSeq::empty(), t, m }, BigRational::one());
    }
    out
}

/// `η_R(v_1), …, η_R(v_K)` where `K` is the largest index of weight at most `max_weight`.
fn eta_r_generators(p: Prime, max_weight: u64) -> Result<Vec<GradedPoly>> {
    let top = max_index_for(max_weight, p);
    let ms = hazewinkel_m_all(top, p);
    let eta_m: Vec<GradedPoly> = (0..=top).map(|k| eta_r_m_symbolic(k, p).substitute_m(&ms)).collect();
    let pr = BigRational::from_integer(p.to_bigint());
    // index 0 is unused so that gens[k] = η_R(v_k)
    let mut gens = vec![GradedPoly::one(p)];
    for k in 1..=top {
        // v_k = p·m_k − Σ_{1≤i<k} m_i v_{k-i}^{p^i}
        let mut e = eta_m[k].scale(&pr);
        for i in 1..k {
            let power = gens[k - i].pow(num_traits::pow(p.get() as u64, i));
            e = e.sub(&eta_m[i].mul(&power));
        }
        if e.has_m() {
            return Err(Error::Inconsistent(format!("m-generator survived in η_R(v_{k})")));
        }
        let report = check_integrality(&e);
        if !report.integral {
            let (mono, c) = &report.offenders[0];
            return Err(Error::Inconsistent(format!("η_R(v_{k}) has non-integral coefficient {c} on {mono}")));
        }
        if e.weight() != Some(generator_weight(k, p)) {
            return Err(Error::Inconsistent(format!("η_R(v_{k}) is not homogeneous of weight {}", generator_weight(k, p))));
        }
        gens.push(e);
    }
    Ok(gens)
}

/// Memoized `η_R(v^γ)` for every `v`-monomial of weight at most `max_weight`.
///
/// The table is filled completely on construction and immutable afterwards,
/// so it can be shared across threads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaRTable {
    prime: Prime,
    max_weight: u64,
    entries: BTreeMap<ExponentSeq, GradedPoly>,
}

impl EtaRTable {
    pub fn build(prime: Prime, max_weight: u64) -> Result<Self> {
        let gens = eta_r_generators(prime, max_weight)?;
        let mut entries = BTreeMap::new();
        for r in 0..=max_weight {
            for gamma in enumerate_weight(r, prime) {
                let value = match gamma.entries().iter().position(|&e| e > 0) {
                    None => GradedPoly::one(prime),
                    Some(i) => {
                        let rest = gamma.checked_sub(&ExponentSeq::generator(i + 1, 1)).expect("positive entry");
                        entries
                            .get(&rest)
                            .map(|prev: &GradedPoly| prev.mul(&gens[i + 1]))
                            .expect("lower weight filled first")
                    }
                };
                let report = check_integrality(&value);
                if !report.integral {
                    let (mono, c) = &report.offenders[0];
                    return Err(Error::Inconsistent(format!(
                        "η_R(v^{gamma}) has non-integral coefficient {c} on {mono}"
                    )));
                }
                entries.insert(gamma, value);
            }
        }
        Ok(EtaRTable { prime, max_weight, entries })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn max_weight(&self) -> u64 {
        self.max_weight
    }

    pub fn convention(&self) -> &'static str {
        CONVENTION
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ExponentSeq, &GradedPoly)> {
        self.entries.iter()
    }

    /// `η_R(v^γ)`.
    pub fn eta_r_v(&self, gamma: &ExponentSeq) -> Result<&GradedPoly> {
        let w = weight(gamma, self.prime);
        if w > self.max_weight {
            return Err(Error::WeightExceedsBound { weight: w, bound: self.max_weight });
        }
        self.entries
            .get(gamma)
            .ok_or_else(|| Error::Inconsistent(format!("table missing entry {gamma}")))
    }

    /// The `v`-polynomial `c_{γ,β}` with `η_R(v^γ) = Σ_β c_{γ,β} t^β`.
    pub fn coefficient_of_t(&self, gamma: &ExponentSeq, beta: &ExponentSeq) -> Result<GradedPoly> {
        Ok(self.eta_r_v(gamma)?.t_coefficient(beta))
    }

    /// The scalar `μ_{γ,β}`: the coefficient of the pure monomial `t^β` in `η_R(v^γ)`.
    pub fn mu(&self, gamma: &ExponentSeq, beta: &ExponentSeq) -> Result<BigRational> {
        Ok(self.eta_r_v(gamma)?.coefficient(&Monomial::t(beta.clone())))
    }

    pub fn to_cache(&self) -> CacheFile {
        let entries = self
            .entries
            .iter()
            .map(|(gamma, poly)| CacheEntry {
                v_exponents: gamma.entries().to_vec(),
                terms: poly
                    .terms()
                    .map(|(m, c)| CacheTerm {
                        v_exponents: m.v.entries().to_vec(),
                        t_exponents: m.t.entries().to_vec(),
                        coefficient_numerator: c.numer().to_string(),
                        coefficient_denominator: c.denom().to_string(),
                    })
                    .collect(),
            })
            .collect();
        CacheFile {
            prime: self.prime.get(),
            convention: CONVENTION.to_string(),
            max_weight: self.max_weight,
            entries,
        }
    }

    pub fn from_cache(cache: CacheFile) -> Result<Self> {
        if cache.convention != CONVENTION {
            return Err(Error::CacheMismatch(format!("unsupported generator convention {:?}", cache.convention)));
        }
        let prime = Prime::new(cache.prime)?;
        let mut entries = BTreeMap::new();
        for entry in cache.entries {
            let gamma = ExponentSeq::new(entry.v_exponents);
            let w = weight(&gamma, prime);
            let mut poly = GradedPoly::zero(prime);
            for term in entry.terms {
                let num: BigInt = term
                    .coefficient_numerator
                    .parse()
                    .map_err(|_| Error::MalformedCache(format!("bad numerator {:?}", term.coefficient_numerator)))?;
                let den: BigInt = term
                    .coefficient_denominator
                    .parse()
                    .map_err(|_| Error::MalformedCache(format!("bad denominator {:?}", term.coefficient_denominator)))?;
                if den.is_zero() {
                    return Err(Error::MalformedCache("zero denominator".into()));
                }
                poly.add_term(
                    Monomial::vt(ExponentSeq::new(term.v_exponents), ExponentSeq::new(term.t_exponents)),
                    BigRational::new(num, den),
                );
            }
            if !poly.is_zero() && poly.weight() != Some(w) {
                return Err(Error::MalformedCache(format!("entry {gamma} is not homogeneous of weight {w}")));
            }
            if !check_integrality(&poly).integral {
                return Err(Error::MalformedCache(format!("entry {gamma} is not {prime}-integral")));
            }
            entries.insert(gamma, poly);
        }
        for r in 0..=cache.max_weight {
            if let Some(missing) = enumerate_weight(r, prime).into_iter().find(|g| !entries.contains_key(g)) {
                return Err(Error::MalformedCache(format!("missing entry {missing}")));
            }
        }
        if entries.len() != (0..=cache.max_weight).map(|r| enumerate_weight(r, prime).len()).sum::<usize>() {
            return Err(Error::MalformedCache("entries beyond max_weight".into()));
        }
        Ok(EtaRTable { prime, max_weight: cache.max_weight, entries })
    }

    /// Deterministic JSON text of the cache document.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.to_cache())?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_cache(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// On-disk form of an [`EtaRTable`]. Coefficients are decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheFile {
    pub prime: u32,
    pub convention: String,
    pub max_weight: u64,
    pub entries: Vec<CacheEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub v_exponents: Vec<u32>,
    pub terms: Vec<CacheTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheTerm {
    pub v_exponents: Vec<u32>,
    pub t_exponents: Vec<u32>,
    pub coefficient_numerator: String,
    pub coefficient_denominator: String,
}

/// Checks the structural laws of one table entry: counit, top pure-`t`
/// term, homogeneity. Returns a description of the first violation.
pub fn check_entry_laws(gamma: &ExponentSeq, poly: &GradedPoly) -> Result<(), String> {
    let p = poly.prime();
    let counit = poly.counit();
    let expected = GradedPoly::term(p, Monomial::v(gamma.clone()), BigRational::one());
    if counit != expected {
        return Err(format!("counit of η_R(v^{gamma}) is {counit}, expected {expected}"));
    }
    let pure = poly.pure_t_terms();
    let top_coeff = BigRational::from_integer(p.pow(gamma.total()));
    match pure.iter().max_by(|a, b| a.0.cmp(&b.0)) {
        None => return Err(format!("η_R(v^{gamma}) has no pure t-term")),
        Some((top, c)) => {
            if top != gamma {
                return Err(format!("top pure t-term of η_R(v^{gamma}) is t^{top}"));
            }
            if *c != top_coeff {
                return Err(format!("top coefficient of η_R(v^{gamma}) is {c}, expected {top_coeff}"));
            }
        }
    }
    if poly.weight() != Some(weight(gamma, p)) {
        return Err(format!("η_R(v^{gamma}) is not homogeneous of weight {}", weight(gamma, p)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dvr::{rat, rat_frac};

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn s<const N: usize>(v: [u32; N]) -> ExponentSeq {
        ExponentSeq::from(v)
    }

    /// Independent expansion of `m_2`: `v_2/p + v_1^{p+1}/p^2`.
    #[test]
    fn hazewinkel_m_examples() {
        for prime in [3, 5, 7] {
            let p = Prime::new(prime).unwrap();
            assert_eq!(hazewinkel_m(0, p), GradedPoly::one(p));
            let pp = prime as i64;
            assert_eq!(
                hazewinkel_m(1, p),
                GradedPoly::term(p, Monomial::v(s([1])), rat_frac(1, pp))
            );
            let m2 = GradedPoly::from_terms(
                p,
                [
                    (Monomial::v(s([0, 1])), rat_frac(1, pp)),
                    (Monomial::v(ExponentSeq::generator(1, prime + 1)), rat_frac(1, pp * pp)),
                ],
            );
            assert_eq!(hazewinkel_m(2, p), m2);
        }
    }

    #[test]
    fn eta_r_small_values() {
        let p = p3();
        let t = EtaRTable::build(p, 4).unwrap();
        assert_eq!(t.eta_r_v(&ExponentSeq::empty()).unwrap(), &GradedPoly::one(p));
        assert_eq!(t.eta_r_v(&s([1])).unwrap().to_string(), "v_1 + 3·t_1");
        assert_eq!(t.mu(&s([2]), &s([2])).unwrap(), rat(9));
        assert!(matches!(t.eta_r_v(&s([5])), Err(Error::WeightExceedsBound { .. })));
    }

    /// `η_R(v_2)` at p = 3, expanded by hand from
    /// `η_R(v_2) = 3 η_R(m_2) − η_R(m_1) η_R(v_1)^3` with `m_1 = v_1/3`,
    /// `m_2 = v_2/3 + v_1^4/9`.
    #[test]
    fn eta_r_v2_by_hand() {
        let p = p3();
        let ms = hazewinkel_m_all(2, p);
        let v1 = GradedPoly::from_terms(p, [(Monomial::v(s([1])), rat(1)), (Monomial::t(s([1])), rat(3))]);
        let eta_m1 = ms[1].add(&GradedPoly::term(p, Monomial::t(s([1])), rat(1)));
        let eta_m2 = ms[2]
            .add(&ms[1].mul(&GradedPoly::term(p, Monomial::t(s([3])), rat(1))))
            .add(&GradedPoly::term(p, Monomial::t(s([0, 1])), rat(1)));
        let expected = eta_m2.scale(&rat(3)).sub(&eta_m1.mul(&v1.pow(3)));
        let t = EtaRTable::build(p, 4).unwrap();
        assert_eq!(t.eta_r_v(&s([0, 1])).unwrap(), &expected);
        assert!(check_integrality(&expected).integral);
        assert_eq!(t.mu(&s([0, 1]), &s([0, 1])).unwrap(), rat(3));
        assert_eq!(t.mu(&s([0, 1]), &s([4])).unwrap(), rat(-27));
    }

    #[test]
    fn coefficient_of_t_examples() {
        let p = p3();
        let t = EtaRTable::build(p, 8).unwrap();
        assert_eq!(t.coefficient_of_t(&s([1]), &s([1])).unwrap(), GradedPoly::constant(p, rat(3)));
        for gamma in [s([2]), s([4]), s([0, 1]), s([3, 1])] {
            assert_eq!(
                t.coefficient_of_t(&gamma, &ExponentSeq::empty()).unwrap(),
                GradedPoly::term(p, Monomial::v(gamma.clone()), rat(1))
            );
        }
        assert!(t.coefficient_of_t(&s([4]), &s([0, 1])).unwrap().is_zero());
    }

    #[test]
    fn structural_laws_hold_at_p5() {
        let p = Prime::new(5).unwrap();
        let t = EtaRTable::build(p, 7).unwrap();
        for (g, poly) in t.entries() {
            check_entry_laws(g, poly).unwrap();
        }
    }

    #[test]
    fn cache_round_trip() {
        let t = EtaRTable::build(p3(), 5).unwrap();
        let text = t.to_json().unwrap();
        let back = EtaRTable::from_json(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn cache_rejects_bad_documents() {
        let t = EtaRTable::build(p3(), 2).unwrap();
        let mut doc = t.to_cache();
        doc.convention = "araki".into();
        assert!(matches!(EtaRTable::from_cache(doc), Err(Error::CacheMismatch(_))));

        let mut doc = t.to_cache();
        doc.entries.pop();
        assert!(matches!(EtaRTable::from_cache(doc), Err(Error::MalformedCache(_))));

        let mut doc = t.to_cache();
        doc.entries[1].terms[0].coefficient_denominator = "3".into();
        assert!(EtaRTable::from_cache(doc).is_err());
    }
}
