//! Truncations `BP⟨n⟩_* = BP_*/J_n` at the level of coefficient actions.
//!
//! In each weight the monomial basis splits as `R ⊕ J`, with `R` the
//! monomials in `v_1, …, v_n` and `J` those in `J_n`. Realized elementary
//! operations vanish on every `J` column, so their restriction to `R` is a
//! legitimate action on `BP⟨n⟩_*` without constructing any splitting map.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dvr::{commutant, Commutant, DvrLattice, PAdicScalar, Prime, RatMatrix};
use crate::error::{Error, Result};
use crate::hopf::EtaRTable;
use crate::monomial::{enumerate_weight, in_ideal, ExponentSeq};
use crate::ops::{action_matrix, adams_scalar, elementary_realize, stable_generators};

/// Partition of the weight-`r` basis into the non-`J_n` and `J_n` parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSplit {
    pub weight: u64,
    pub height: u32,
    pub basis: Vec<ExponentSeq>,
    pub r_indices: Vec<usize>,
    pub j_indices: Vec<usize>,
}

impl BlockSplit {
    pub fn r_monomials(&self) -> Vec<&ExponentSeq> {
        self.r_indices.iter().map(|&i| &self.basis[i]).collect()
    }

    pub fn j_monomials(&self) -> Vec<&ExponentSeq> {
        self.j_indices.iter().map(|&i| &self.basis[i]).collect()
    }
}

/// Splits the weight-`r` basis and certifies that every `R` monomial
/// precedes every `J` monomial.
pub fn block_split(r: u64, n: u32, p: Prime) -> Result<BlockSplit> {
    if n == 0 {
        return Err(Error::Config("height must be at least 1".into()));
    }
    let basis = enumerate_weight(r, p);
    let (j_indices, r_indices): (Vec<usize>, Vec<usize>) = (0..basis.len()).partition(|&i| in_ideal(&basis[i], n));
    if let (Some(&last_r), Some(&first_j)) = (r_indices.last(), j_indices.first()) {
        if last_r > first_j {
            return Err(Error::Inconsistent(format!(
                "weight {r}, height {n}: {} in R follows {} in J",
                basis[last_r], basis[first_j]
            )));
        }
    }
    Ok(BlockSplit { weight: r, height: n, basis, r_indices, j_indices })
}

/// A realized elementary operation restricted to the `R` block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectedElementary {
    pub alpha: ExponentSeq,
    pub beta: ExponentSeq,
    pub mu_bar: PAdicScalar,
    pub matrix: RatMatrix,
}

pub fn projected_elementary(
    alpha: &ExponentSeq,
    beta: &ExponentSeq,
    split: &BlockSplit,
    table: &EtaRTable,
) -> Result<ProjectedElementary> {
    for m in [alpha, beta] {
        if in_ideal(m, split.height) {
            return Err(Error::InIdeal { monomial: m.to_string(), height: split.height });
        }
    }
    let real = elementary_realize(alpha, beta, table)?;
    for &j in &split.j_indices {
        let col_clear = (0..split.basis.len()).all(|i| real.matrix.matrix.get(i, j).is_zero());
        if !col_clear {
            return Err(Error::Inconsistent(format!(
                "realized E_{{{alpha},{beta}}} does not vanish on J column {}",
                split.basis[j]
            )));
        }
    }
    let matrix = real.matrix.matrix.submatrix(&split.r_indices, &split.r_indices);
    Ok(ProjectedElementary { alpha: alpha.clone(), beta: beta.clone(), mu_bar: real.mu_bar, matrix })
}

/// The full family `{μ̄_{α,β} E_{α,β} : α, β ∈ R}` on the `R` block.
pub fn projected_family(split: &BlockSplit, table: &EtaRTable) -> Result<Vec<ProjectedElementary>> {
    let r_mons = split.r_monomials();
    let mut out = Vec::with_capacity(r_mons.len() * r_mons.len());
    for a in &r_mons {
        for b in &r_mons {
            out.push(projected_elementary(a, b, split, table)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct CentreReport {
    pub weight: u64,
    pub height: u32,
    pub r_size: usize,
    pub j_size: usize,
    pub commutant: Commutant,
}

impl CentreReport {
    pub fn rank(&self) -> usize {
        self.commutant.rank
    }

    pub fn is_scalar(&self) -> bool {
        self.commutant.is_scalar()
    }
}

/// Commutant of the projected elementary family in weight `r`, height `n`.
pub fn centre_commutant(r: u64, n: u32, table: &EtaRTable) -> Result<CentreReport> {
    let p = table.prime();
    if r > table.max_weight() {
        return Err(Error::WeightExceedsBound { weight: r, bound: table.max_weight() });
    }
    let split = block_split(r, n, p)?;
    let family = projected_family(&split, table)?;
    let mats: Vec<RatMatrix> = family.into_iter().map(|f| f.matrix).collect();
    let commutant = commutant(p, split.r_indices.len(), &mats)?;
    Ok(CentreReport { weight: r, height: n, r_size: split.r_indices.len(), j_size: split.j_indices.len(), commutant })
}

/// Windows `(μ_0, …, μ_N)` realizable by a single `Z_(p)`-combination of
/// [`stable_generators`] whose action in every weight `r ≤ N` maps the `J`
/// block into itself and is the scalar `μ_r` on `R` modulo `J`.
///
/// Unknowns are the combination coefficients followed by the window; the
/// constraints are the `R`-row entries of the combined action. The result is
/// the projection of the integral solution module onto the window.
pub fn diagonal_window_lattice(big_n: u64, n: u32, table: &EtaRTable) -> Result<DvrLattice> {
    let p = table.prime();
    if big_n > table.max_weight() {
        return Err(Error::WeightExceedsBound { weight: big_n, bound: table.max_weight() });
    }
    let gens = stable_generators(big_n, p);
    let g = gens.len();
    let unknowns = g + big_n as usize + 1;
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for r in 0..=big_n {
        let split = block_split(r, n, p)?;
        let actions: Vec<RatMatrix> =
            gens.iter().map(|op| action_matrix(op, r, table).map(|m| m.matrix)).collect::<Result<_>>()?;
        for &i in &split.r_indices {
            for j in 0..split.basis.len() {
                let mut row = vec![BigRational::zero(); unknowns];
                for (k, a) in actions.iter().enumerate() {
                    row[k] = a.get(i, j).clone();
                }
                if i == j {
                    row[g + r as usize] = -BigRational::one();
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let kernel = if rows.is_empty() {
        DvrLattice::full(p, unknowns).basis().to_vec()
    } else {
        RatMatrix::from_rows(rows)?.integral_kernel(p)?
    };
    let windows: Vec<Vec<PAdicScalar>> = kernel.into_iter().map(|v| v[g..].to_vec()).collect();
    DvrLattice::from_integral(p, &windows, big_n as usize + 1)
}

/// One weight of an `ι̂_n` window: the scalar and its `R`-block matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IotaWindowEntry {
    pub weight: u64,
    pub scalar: PAdicScalar,
    pub matrix: RatMatrix,
}

/// Action of `Σ_k coeff(k) Ψ^k` on the `R` block in each weight `r ≤ N`.
pub fn iota_hat_n_window(
    combination: &[(PAdicScalar, PAdicScalar)],
    big_n: u64,
    n: u32,
    p: Prime,
) -> Result<Vec<IotaWindowEntry>> {
    (0..=big_n)
        .map(|r| {
            let split = block_split(r, n, p)?;
            let scalar = combination
                .iter()
                .fold(PAdicScalar::zero(), |acc, (k, c)| &acc + &(c * &adams_scalar(k, r, p)));
            let matrix = RatMatrix::scalar(split.r_indices.len(), scalar.as_rational().clone());
            Ok(IotaWindowEntry { weight: r, scalar, matrix })
        })
        .collect()
}

pub fn window_of(entries: &[IotaWindowEntry]) -> Vec<PAdicScalar> {
    entries.iter().map(|e| e.scalar.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::bigint_scalar;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn s<const N: usize>(v: [u32; N]) -> ExponentSeq {
        ExponentSeq::from(v)
    }

    #[test]
    fn block_split_examples() {
        let p = p3();
        let b = block_split(4, 1, p).unwrap();
        assert_eq!(b.r_monomials(), vec![&s([4])]);
        assert_eq!(b.j_monomials(), vec![&s([0, 1])]);
        let b = block_split(4, 2, p).unwrap();
        assert_eq!(b.r_indices.len(), 2);
        assert!(b.j_indices.is_empty());
        let b = block_split(13, 2, p).unwrap();
        assert_eq!(b.j_monomials(), vec![&s([0, 0, 1])]);
        assert!(block_split(4, 0, p).is_err());
    }

    #[test]
    fn projected_examples() {
        let p = p3();
        let t = EtaRTable::build(p, 8).unwrap();
        let split = block_split(4, 1, p).unwrap();
        let fam = projected_family(&split, &t).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam[0].matrix, RatMatrix::scalar(1, fam[0].mu_bar.as_rational().clone()));
        assert!(matches!(
            projected_elementary(&s([0, 1]), &s([4]), &split, &t),
            Err(Error::InIdeal { .. })
        ));

        let split = block_split(8, 2, p).unwrap();
        assert_eq!(projected_family(&split, &t).unwrap().len(), 9);

        // Empty J block: the projection is the unrestricted realization.
        let split = block_split(8, 3, p).unwrap();
        for f in projected_family(&split, &t).unwrap() {
            let full = elementary_realize(&f.alpha, &f.beta, &t).unwrap();
            assert_eq!(f.matrix, full.matrix.matrix);
        }
    }

    #[test]
    fn centre_examples() {
        let p = p3();
        let t = EtaRTable::build(p, 8).unwrap();
        for (r, n) in [(0, 1), (4, 1), (8, 2)] {
            let c = centre_commutant(r, n, &t).unwrap();
            assert_eq!(c.rank(), 1, "r={r} n={n}");
            assert!(c.is_scalar());
        }
    }

    #[test]
    fn diagonal_lattice_small() {
        let p = p3();
        let t = EtaRTable::build(p, 4).unwrap();
        for n in [1, 2] {
            assert!(diagonal_window_lattice(0, n, &t).unwrap().is_full());
            let l = diagonal_window_lattice(3, n, &t).unwrap();
            assert!(l.contains(&vec![PAdicScalar::one(); 4]));
        }
    }

    #[test]
    fn iota_examples() {
        let p = p3();
        let id = iota_hat_n_window(&[(bigint_scalar(1), bigint_scalar(1))], 5, 1, p).unwrap();
        assert!(window_of(&id).iter().all(PAdicScalar::is_one));
        let q = iota_hat_n_window(&[(bigint_scalar(2), bigint_scalar(1))], 3, 1, p).unwrap();
        assert_eq!(window_of(&q), [1, 4, 16, 64].map(bigint_scalar));
        let d = iota_hat_n_window(
            &[(bigint_scalar(1), bigint_scalar(1)), (bigint_scalar(0), bigint_scalar(-1))],
            3,
            1,
            p,
        )
        .unwrap();
        assert_eq!(window_of(&d), [0, 1, 1, 1].map(bigint_scalar));
    }
}
