//! Finite windows of the congruence ring `S_g` for the Adams summand.
//!
//! `Ψ^k` acts on `π_{2(p-1)i}` as `k^{(p-1)i}`, so its window is
//! `(k^{(p-1)i})_{i ≤ N}`. The window of `S_g` is computed as the stabilized
//! `Z_(p)`-span of Adams windows for `k = 0` and `k = p^s q^a`, where `q` is
//! a topological generator of the p-adic units.

use num_rational::BigRational;
use serde::Serialize;

use crate::centre::diagonal_window_lattice;
use crate::dvr::{DvrLattice, PAdicScalar, Prime};
use crate::error::{Error, Result};
use crate::hopf::EtaRTable;
use crate::ops::adams_scalar;

/// A window `(μ_0, …, μ_N)` of p-integral scalars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceWindow {
    pub prime: Prime,
    pub entries: Vec<PAdicScalar>,
}

impl SequenceWindow {
    pub fn new(prime: Prime, entries: Vec<BigRational>) -> Result<Self> {
        let entries = entries.into_iter().map(|x| PAdicScalar::new(x, prime)).collect::<Result<_>>()?;
        Ok(SequenceWindow { prime, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn unit(prime: Prime, len: usize, index: usize) -> Self {
        let entries = (0..len).map(|i| if i == index { PAdicScalar::one() } else { PAdicScalar::zero() }).collect();
        SequenceWindow { prime, entries }
    }

    /// Entrywise product.
    pub fn pointwise(&self, other: &SequenceWindow) -> SequenceWindow {
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).collect();
        SequenceWindow { prime: self.prime, entries }
    }
}

/// `(k^{(p-1)i})_{i=0..N}` with `0^0 = 1`.
pub fn adams_sequence(k: &PAdicScalar, big_n: u64, p: Prime) -> SequenceWindow {
    SequenceWindow { prime: p, entries: (0..=big_n).map(|i| adams_scalar(k, i, p)).collect() }
}

/// Smallest positive integer that is a primitive root modulo `p^2`.
pub fn default_q(p: Prime) -> u64 {
    (2..).find(|&q| is_primitive_root_mod_p2(q, p)).expect("primitive roots exist modulo p^2")
}

/// Whether `q` generates the units modulo `p^2`, hence topologically
/// generates the p-adic units.
pub fn is_primitive_root_mod_p2(q: u64, p: Prime) -> bool {
    let pp = p.get() as u64;
    let m = pp * pp;
    let order = pp * (pp - 1);
    if q.is_multiple_of(pp) {
        return false;
    }
    let mut x = 1u64;
    for k in 1..=order {
        x = x * (q % m) % m;
        if x == 1 {
            return k == order;
        }
    }
    false
}

/// Caps for the Adams-generator search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SgCaps {
    pub q: u64,
    /// Largest exponent `a` in `q^a`.
    pub max_a: u64,
    /// Largest exponent `s` in `p^s`.
    pub max_s: u64,
    /// Consecutive unchanged rounds required before declaring stability.
    pub margin: u64,
}

impl SgCaps {
    pub fn defaults(p: Prime, big_n: u64) -> Self {
        SgCaps { q: default_q(p), max_a: big_n + 8, max_s: 3, margin: 4 }
    }
}

/// Evidence that the generator search reached a fixed point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizationCertificate {
    /// Round `t` adds every `p^s q^a` with `max(a, s) = t` inside the caps.
    pub rounds: u64,
    pub last_change: u64,
    pub generators: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SgWindow {
    pub big_n: u64,
    pub caps: SgCaps,
    pub lattice: DvrLattice,
    pub certificate: StabilizationCertificate,
}

/// The stabilized `Z_(p)`-span of Adams windows.
///
/// Round 0 holds `Ψ^0` and `Ψ^1`; round `t` adds `Ψ^{p^s q^a}` for
/// `max(a, s) = t`, `a ≤ max_a`, `s ≤ max_s`. The search stops once `margin`
/// consecutive rounds leave the echelon form unchanged; if the caps run out
/// first the call fails.
pub fn sg_window(big_n: u64, p: Prime, caps: SgCaps) -> Result<SgWindow> {
    let len = big_n as usize + 1;
    let q = PAdicScalar::from_int(caps.q);
    let pp = PAdicScalar::from_int(p.get());
    let window = |k: &PAdicScalar| adams_sequence(k, big_n, p).entries;
    let mut gens: Vec<Vec<PAdicScalar>> = vec![window(&PAdicScalar::zero()), window(&PAdicScalar::one())];
    let mut lattice = DvrLattice::from_integral(p, &gens, len)?;
    let mut last_change = 0;
    let mut t = 0;
    while t - last_change < caps.margin {
        t += 1;
        if t > caps.max_a.max(caps.max_s) {
            return Err(Error::NotStabilized(format!(
                "window N={big_n}: last change at round {last_change}, caps a≤{} s≤{} exhausted before {} quiet rounds",
                caps.max_a, caps.max_s, caps.margin
            )));
        }
        let mut added = 0;
        for a in 0..=t.min(caps.max_a) {
            for s in 0..=t.min(caps.max_s) {
                if a.max(s) != t {
                    continue;
                }
                let k = &pp.pow(s as u32) * &q.pow(a as u32);
                gens.push(window(&k));
                added += 1;
            }
        }
        if added == 0 {
            continue;
        }
        let next = DvrLattice::from_integral(p, lattice.basis().iter().cloned().chain(gens[gens.len() - added..].iter().cloned()).collect::<Vec<_>>().as_slice(), len)?;
        if next != lattice {
            lattice = next;
            last_change = t;
        }
    }
    Ok(SgWindow {
        big_n,
        caps,
        lattice,
        certificate: StabilizationCertificate { rounds: t, last_change, generators: gens.len() },
    })
}

/// Membership certificate of a window in `S_g`, re-verified by expansion.
pub fn sg_membership(w: &SequenceWindow, sg: &SgWindow) -> Result<Option<Vec<PAdicScalar>>> {
    let cert = sg.lattice.membership(&w.entries)?;
    if let Some(c) = &cert {
        if sg.lattice.combine(c) != w.entries {
            return Err(Error::Inconsistent("membership certificate does not reproduce the window".into()));
        }
    }
    Ok(cert)
}

/// Summary of a lattice for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeSummary {
    pub rank: usize,
    pub ambient_rank: usize,
    pub pivot_exponents: Vec<u32>,
    pub elementary_divisors: Vec<u32>,
}

impl From<&DvrLattice> for LatticeSummary {
    fn from(l: &DvrLattice) -> Self {
        LatticeSummary {
            rank: l.rank(),
            ambient_rank: l.ambient_rank(),
            pivot_exponents: l.pivots().iter().map(|p| p.exponent).collect(),
            elementary_divisors: l.elementary_divisors(),
        }
    }
}

/// `S_g` window against the diagonal window lattice at one height.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeComparison {
    pub big_n: u64,
    pub height: u32,
    pub sg: LatticeSummary,
    pub diagonal: LatticeSummary,
    /// `S_g window ⊆ diagonal lattice`.
    pub inclusion: bool,
    /// `diagonal lattice ⊆ S_g window`.
    pub reverse_inclusion: bool,
    /// `log_p` of the index of the `S_g` window in the diagonal lattice, when included.
    pub gap: Option<u64>,
    /// First `S_g` basis vector outside the diagonal lattice.
    pub witness: Option<Vec<String>>,
}

pub fn compare_with_diagonal_window(
    big_n: u64,
    n: u32,
    table: &EtaRTable,
    sg: &SgWindow,
) -> Result<LatticeComparison> {
    if sg.big_n != big_n {
        return Err(Error::DimensionMismatch { expected: big_n as usize + 1, found: sg.big_n as usize + 1 });
    }
    let diag = diagonal_window_lattice(big_n, n, table)?;
    let witness = sg
        .lattice
        .basis()
        .iter()
        .find(|b| !diag.contains(b))
        .map(|b| b.iter().map(ToString::to_string).collect());
    let inclusion = witness.is_none();
    Ok(LatticeComparison {
        big_n,
        height: n,
        sg: (&sg.lattice).into(),
        diagonal: (&diag).into(),
        inclusion,
        reverse_inclusion: diag.is_sublattice_of(&sg.lattice),
        gap: if inclusion { sg.lattice.colength_in(&diag) } else { None },
        witness,
    })
}

/// Exact `p`-adic scalar from a signed integer.
pub fn zp(k: i64) -> PAdicScalar {
    PAdicScalar::from_int(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn adams_sequence_examples() {
        let p = p3();
        assert!(adams_sequence(&zp(1), 4, p).entries.iter().all(PAdicScalar::is_one));
        assert_eq!(adams_sequence(&zp(0), 3, p).entries, vec![zp(1), zp(0), zp(0), zp(0)]);
        assert_eq!(adams_sequence(&zp(2), 3, p).entries, vec![zp(1), zp(4), zp(16), zp(64)]);
    }

    #[test]
    fn default_q_values() {
        assert_eq!(default_q(p3()), 2);
        assert_eq!(default_q(Prime::new(5).unwrap()), 2);
        // 2 has order 3 modulo 7, so it is not a primitive root modulo 49.
        assert_eq!(default_q(Prime::new(7).unwrap()), 3);
        let p = p3();
        assert!(is_primitive_root_mod_p2(2, p));
        assert!(!is_primitive_root_mod_p2(4, p));
        assert!(!is_primitive_root_mod_p2(3, p));
    }

    #[test]
    fn sg_window_small() {
        let p = p3();
        let w0 = sg_window(0, p, SgCaps::defaults(p, 0)).unwrap();
        assert!(w0.lattice.is_full());
        let w1 = sg_window(1, p, SgCaps::defaults(p, 1)).unwrap();
        assert!(w1.lattice.is_full());
        for big_n in 0..=8 {
            let w = sg_window(big_n, p, SgCaps::defaults(p, big_n)).unwrap();
            let two = SequenceWindow { prime: p, entries: adams_sequence(&zp(2), big_n, p).entries };
            assert!(sg_membership(&two, &w).unwrap().is_some());
        }
    }

    #[test]
    fn sg_fails_loudly_when_caps_too_small() {
        let p = p3();
        let caps = SgCaps { q: 2, max_a: 2, max_s: 1, margin: 4 };
        assert!(matches!(sg_window(6, p, caps), Err(Error::NotStabilized(_))));
    }

    #[test]
    fn membership_rejects_length_mismatch() {
        let p = p3();
        let w = sg_window(2, p, SgCaps::defaults(p, 2)).unwrap();
        assert!(sg_membership(&SequenceWindow::unit(p, 2, 0), &w).is_err());
    }
}
