//! Exponent sequences indexing monomials `v^α` (and `t^α`), ordered right
//! lexicographically.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dvr::Prime;

/// A finite sequence of non-negative exponents `(α_1, …, α_m)` with
/// `α_m ≠ 0`, or the empty sequence. Index `i` (1-based) is the exponent of
/// the `i`-th generator.
///
/// `Ord` is the right-lexicographic order: sequences are compared as if padded
/// with zeros, from the highest index down. A shorter sequence is therefore
/// smaller than a longer one.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<u32>", into = "Vec<u32>")]
pub struct ExponentSeq(Vec<u32>);

impl ExponentSeq {
    pub fn empty() -> Self {
        ExponentSeq(Vec::new())
    }

    /// Trailing zeros are stripped.
    pub fn new(mut entries: Vec<u32>) -> Self {
        while entries.last() == Some(&0) {
            entries.pop();
        }
        ExponentSeq(entries)
    }

    /// The sequence of the single generator with index `i ≥ 1`, raised to `e`.
    pub fn generator(i: usize, e: u32) -> Self {
        assert!(i >= 1, "generator indices start at 1");
        let mut v = vec![0; i];
        v[i - 1] = e;
        ExponentSeq::new(v)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Exponent of generator `i` (1-based); zero past the end.
    pub fn get(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    /// Total degree `Σ α_i` as a polynomial.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &ExponentSeq) -> ExponentSeq {
        let n = self.len().max(other.len());
        let v = (1..=n).map(|i| self.get(i) + other.get(i)).collect();
        ExponentSeq::new(v)
    }

    /// `self - other` if every entry of `other` is at most the matching entry.
    pub fn checked_sub(&self, other: &ExponentSeq) -> Option<ExponentSeq> {
        if other.len() > self.len() {
            return None;
        }
        let v = (1..=self.len())
            .map(|i| self.get(i).checked_sub(other.get(i)))
            .collect::<Option<Vec<_>>>()?;
        Some(ExponentSeq::new(v))
    }

    pub fn scale(&self, k: u32) -> ExponentSeq {
        ExponentSeq::new(self.0.iter().map(|&a| a * k).collect())
    }

    pub fn weight(&self, p: Prime) -> u64 {
        weight(self, p)
    }

    /// Whether `v^α` lies in `J_n = (v_{n+1}, v_{n+2}, …)`.
    pub fn in_ideal(&self, n: u32) -> bool {
        in_ideal(self, n)
    }

    /// Formats the monomial with the given variable letter, e.g. `v_1^2 v_3`.
    pub fn monomial_string(&self, var: &str) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, &e)| if e == 1 { format!("{var}_{}", i + 1) } else { format!("{var}_{}^{e}", i + 1) })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }
}

impl From<Vec<u32>> for ExponentSeq {
    fn from(v: Vec<u32>) -> Self {
        ExponentSeq::new(v)
    }
}

impl From<ExponentSeq> for Vec<u32> {
    fn from(s: ExponentSeq) -> Vec<u32> {
        s.0
    }
}

impl<const N: usize> From<[u32; N]> for ExponentSeq {
    fn from(v: [u32; N]) -> Self {
        ExponentSeq::new(v.to_vec())
    }
}

impl fmt::Display for ExponentSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Ord for ExponentSeq {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self, other)
    }
}

impl PartialOrd for ExponentSeq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Right-lexicographic comparison, from the highest index down.
pub fn compare(a: &ExponentSeq, b: &ExponentSeq) -> Ordering {
    let n = a.len().max(b.len());
    for i in (1..=n).rev() {
        match a.get(i).cmp(&b.get(i)) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Weight `(p^i - 1)/(p - 1) = 1 + p + … + p^{i-1}` of the generator `v_i`.
pub fn generator_weight(i: usize, p: Prime) -> u64 {
    let p = p.get() as u64;
    (0..i).fold(0u64, |acc, _| acc * p + 1)
}

/// `Σ α_i (1 + p + … + p^{i-1})`; the topological degree is `2(p-1)` times this.
pub fn weight(a: &ExponentSeq, p: Prime) -> u64 {
    a.entries()
        .iter()
        .enumerate()
        .map(|(i, &e)| e as u64 * generator_weight(i + 1, p))
        .sum()
}

/// Largest generator index whose weight does not exceed `r`.
pub fn max_index_for(r: u64, p: Prime) -> usize {
    let mut i = 0;
    while generator_weight(i + 1, p) <= r {
        i += 1;
    }
    i
}

/// All sequences of weight `r` using generator indices `≤ max_index`,
/// ascending in the right-lexicographic order.
pub fn enumerate_weight_bounded(r: u64, max_index: usize, p: Prime) -> Vec<ExponentSeq> {
    let weights: Vec<u64> = (1..=max_index).map(|i| generator_weight(i, p)).collect();
    let mut out = Vec::new();
    let mut current = vec![0u32; max_index];
    fill(&weights, max_index, r, &mut current, &mut out);
    out
}

/// `enumerate_weight_bounded` with the largest useful index.
pub fn enumerate_weight(r: u64, p: Prime) -> Vec<ExponentSeq> {
    enumerate_weight_bounded(r, max_index_for(r, p), p)
}

// Chooses exponents from the highest index down, smallest first, so that the
// output is produced already sorted.
fn fill(weights: &[u64], idx: usize, remaining: u64, current: &mut Vec<u32>, out: &mut Vec<ExponentSeq>) {
    if idx == 0 {
        if remaining == 0 {
            out.push(ExponentSeq::new(current.clone()));
        }
        return;
    }
    let w = weights[idx - 1];
    let max = remaining / w;
    for e in 0..=max {
        current[idx - 1] = e as u32;
        fill(weights, idx - 1, remaining - e * w, current, out);
    }
    current[idx - 1] = 0;
}

pub fn in_ideal(a: &ExponentSeq, n: u32) -> bool {
    a.len() > n as usize
}
