//! Stable operations as `BP_*`-linear functionals on `t`-monomials and their
//! matrix actions on homotopy, one weight at a time.
//!
//! An operation `φ` acts on coefficients through the right unit,
//! `φ_*(v^γ) = Σ_β φ̄(t^β) · c_{γ,β}` where `η_R(v^γ) = Σ_β c_{γ,β} t^β`.
//! Matrices are indexed by the right-lex ordered monomial basis of a weight;
//! entry `(α, γ)` is the coefficient of `v^α` in the image of `v^γ`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dvr::{PAdicScalar, Prime, RatMatrix, Valuation};
use crate::error::{Error, Result};
use crate::hopf::EtaRTable;
use crate::monomial::{enumerate_weight, weight, ExponentSeq};
use crate::poly::{GradedPoly, Monomial};

/// A `BP_*`-linear functional on `BP_*(BP)`, given by its values on finitely
/// many `t`-monomials (zero elsewhere).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpFunctional {
    pub name: String,
    /// Weight of the operation's degree.
    pub shift: u64,
    pub support: BTreeMap<ExponentSeq, GradedPoly>,
}

impl OpFunctional {
    pub fn is_counit(&self) -> bool {
        self.shift == 0
            && self.support.len() == 1
            && self.support.get(&ExponentSeq::empty()).is_some_and(|v| *v == GradedPoly::one(v.prime()))
    }
}

impl fmt::Display for OpFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// `φ_β`: sends `t^β` to 1 and every other `t`-monomial to 0.
pub fn phi_beta(beta: &ExponentSeq, p: Prime) -> OpFunctional {
    let mut support = BTreeMap::new();
    support.insert(beta.clone(), GradedPoly::one(p));
    OpFunctional { name: format!("phi_{beta}"), shift: weight(beta, p), support }
}

/// The counit `φ_∅`, acting as the identity.
pub fn counit(p: Prime) -> OpFunctional {
    OpFunctional { name: "counit".into(), ..phi_beta(&ExponentSeq::empty(), p) }
}

/// `φ_{α,β} = v^α φ_β`, a degree-zero operation.
pub fn phi_alpha_beta(alpha: &ExponentSeq, beta: &ExponentSeq, p: Prime) -> Result<OpFunctional> {
    let (wa, wb) = (weight(alpha, p), weight(beta, p));
    if wa != wb {
        return Err(Error::WeightMismatch {
            left: alpha.to_string(),
            left_weight: wa,
            right: beta.to_string(),
            right_weight: wb,
        });
    }
    if alpha.is_empty() {
        return Ok(counit(p));
    }
    let mut support = BTreeMap::new();
    support.insert(beta.clone(), GradedPoly::term(p, Monomial::v(alpha.clone()), BigRational::one()));
    Ok(OpFunctional { name: format!("phi_{alpha},{beta}"), shift: 0, support })
}

/// A square matrix acting on the weight-`r` part of `BP_*`, in the monomial basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeMatrix {
    pub weight: u64,
    pub basis: Vec<ExponentSeq>,
    pub matrix: RatMatrix,
}

impl DegreeMatrix {
    pub fn zero(weight: u64, basis: Vec<ExponentSeq>) -> Self {
        let n = basis.len();
        DegreeMatrix { weight, basis, matrix: RatMatrix::zeros(n, n) }
    }

    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, a: &ExponentSeq) -> Option<usize> {
        self.basis.binary_search(a).ok()
    }

    /// Entry `(α, γ)`: the coefficient of `v^α` in the image of `v^γ`.
    pub fn entry(&self, alpha: &ExponentSeq, gamma: &ExponentSeq) -> Option<&BigRational> {
        Some(self.matrix.get(self.index_of(alpha)?, self.index_of(gamma)?))
    }

    /// `c · E_{α,β}` on the same basis.
    pub fn elementary_like(&self, alpha: &ExponentSeq, beta: &ExponentSeq, c: &BigRational) -> Option<DegreeMatrix> {
        let (i, j) = (self.index_of(alpha)?, self.index_of(beta)?);
        let mut m = RatMatrix::zeros(self.size(), self.size());
        m.set(i, j, c.clone());
        Some(DegreeMatrix { weight: self.weight, basis: self.basis.clone(), matrix: m })
    }

    pub fn is_integral(&self, p: Prime) -> bool {
        self.matrix.is_integral(p)
    }
}

/// The action of a degree-zero functional on the weight-`r` part of `BP_*`.
pub fn action_matrix(op: &OpFunctional, r: u64, table: &EtaRTable) -> Result<DegreeMatrix> {
    if op.shift != 0 {
        return Err(Error::NonZeroDegree(op.shift));
    }
    if r > table.max_weight() {
        return Err(Error::WeightExceedsBound { weight: r, bound: table.max_weight() });
    }
    let p = table.prime();
    let mut out = DegreeMatrix::zero(r, enumerate_weight(r, p));
    for (col, gamma) in out.basis.clone().iter().enumerate() {
        let by_t = table.eta_r_v(gamma)?.by_t();
        let mut image = GradedPoly::zero(p);
        for (beta, value) in &op.support {
            if let Some(c) = by_t.get(beta) {
                image = image.add(&value.mul(c));
            }
        }
        for (mono, c) in image.terms() {
            let row = out.index_of(&mono.v).filter(|_| mono.t.is_empty() && mono.m.is_empty()).ok_or_else(|| {
                Error::Inconsistent(format!("{} maps v^{gamma} outside weight {r}: {mono}", op.name))
            })?;
            out.matrix.set(row, col, c.clone());
        }
    }
    if !out.is_integral(p) {
        return Err(Error::Inconsistent(format!("action of {} in weight {r} is not integral", op.name)));
    }
    Ok(out)
}

/// `k^{(p-1)r}` with `0^0 = 1`.
pub fn adams_scalar(k: &PAdicScalar, r: u64, p: Prime) -> PAdicScalar {
    k.pow(((p.get() - 1) as u64 * r) as u32)
}

/// `Ψ^k` on a weight-`r` group of rank `size`: the scalar matrix `k^{(p-1)r}·I`.
pub fn adams_matrix(k: &PAdicScalar, r: u64, size: usize, p: Prime) -> RatMatrix {
    RatMatrix::scalar(size, adams_scalar(k, r, p).into_rational())
}

/// The outcome of realizing a multiple of an elementary matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub alpha: ExponentSeq,
    pub beta: ExponentSeq,
    /// `μ̄ = p^s`, the least power of `p` for which the solve is integral.
    pub mu_bar: PAdicScalar,
    /// Coefficients of `φ_{α,γ}` for `γ ≥ β`; zero coefficients omitted.
    pub coefficients: BTreeMap<ExponentSeq, PAdicScalar>,
    /// `Σ_γ coeff(γ) · M_{α,γ}`, recomputed from the action matrices.
    pub matrix: DegreeMatrix,
}

impl Realization {
    pub fn mu_bar_valuation(&self, p: Prime) -> u32 {
        match self.mu_bar.valuation(p) {
            Valuation::Finite(v) => v as u32,
            Valuation::Infinite => unreachable!("μ̄ is non-zero"),
        }
    }
}

/// Finds `μ̄ ≠ 0` and `Z_(p)`-coefficients with `Σ_γ x_γ M_{α,γ} = μ̄ E_{α,β}`
/// on the full weight-`r` basis.
///
/// Row `α` of `M_{α,γ}` is `(μ_{δ,γ})_δ` and every other row vanishes, so the
/// system is `U x = μ̄ e_β` with `U[δ][γ] = μ_{δ,γ}`. `U` is lower triangular
/// in the right-lex order with non-zero diagonal, so forward substitution
/// solves it over `Q`; the result is then scaled to the least integral
/// multiple.
pub fn elementary_realize(alpha: &ExponentSeq, beta: &ExponentSeq, table: &EtaRTable) -> Result<Realization> {
    let p = table.prime();
    let r = weight(alpha, p);
    phi_alpha_beta(alpha, beta, p)?;
    if r > table.max_weight() {
        return Err(Error::WeightExceedsBound { weight: r, bound: table.max_weight() });
    }
    let basis = enumerate_weight(r, p);
    let n = basis.len();
    let target = basis.binary_search(beta).expect("β has weight r");
    let mut u = vec![vec![BigRational::zero(); n]; n];
    for (d, delta) in basis.iter().enumerate() {
        for (g, gamma) in basis.iter().enumerate() {
            u[d][g] = table.mu(delta, gamma)?;
        }
    }
    for d in 0..n {
        if u[d][d].is_zero() {
            return Err(Error::Inconsistent(format!("μ_{{{0},{0}}} vanishes", basis[d])));
        }
        if let Some(g) = (d + 1..n).find(|&g| !u[d][g].is_zero()) {
            return Err(Error::Inconsistent(format!("μ_{{{},{}}} ≠ 0 although {0} < {1}", basis[d], basis[g])));
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for d in 0..n {
        let mut rhs = if d == target { BigRational::one() } else { BigRational::zero() };
        for g in 0..d {
            if !x[g].is_zero() {
                rhs -= &u[d][g] * &x[g];
            }
        }
        x[d] = rhs / &u[d][d];
    }
    let min_val = x.iter().map(|c| p.valuation(c)).min().and_then(Valuation::finite).unwrap_or(0);
    let s = (-min_val).max(0) as u32;
    let mu_bar = PAdicScalar::p_power(p, s);
    let scale = BigRational::from_integer(p.pow(s));
    let mut coefficients = BTreeMap::new();
    for (g, c) in x.into_iter().enumerate() {
        if !c.is_zero() {
            if g < target {
                return Err(Error::Inconsistent(format!("realization uses φ_{{{alpha},{}}} below β", basis[g])));
            }
            coefficients.insert(basis[g].clone(), PAdicScalar::new(c * &scale, p)?);
        }
    }
    let mut total = DegreeMatrix::zero(r, basis.clone());
    for (gamma, c) in &coefficients {
        let m = action_matrix(&phi_alpha_beta(alpha, gamma, p)?, r, table)?;
        total.matrix = total.matrix.add(&m.matrix.scale(c.as_rational()))?;
    }
    let expected = total.elementary_like(alpha, beta, mu_bar.as_rational()).expect("α, β in basis");
    if total != expected {
        return Err(Error::Inconsistent(format!(
            "realization of E_{{{alpha},{beta}}} does not re-multiply to μ̄·E"
        )));
    }
    Ok(Realization { alpha: alpha.clone(), beta: beta.clone(), mu_bar, coefficients, matrix: total })
}

/// The counit and every `φ_{α,β}` with `weight(α) = weight(β) ≤ n`, ordered by
/// weight, then `α`, then `β`.
pub fn stable_generators(n: u64, p: Prime) -> Vec<OpFunctional> {
    let mut out = vec![counit(p)];
    for r in 1..=n {
        let basis = enumerate_weight(r, p);
        for a in &basis {
            for b in &basis {
                out.push(phi_alpha_beta(a, b, p).expect("same weight"));
            }
        }
    }
    out
}

pub fn bigint_scalar(k: i64) -> PAdicScalar {
    PAdicScalar::from_int(BigInt::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dvr::rat;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn s<const N: usize>(v: [u32; N]) -> ExponentSeq {
        ExponentSeq::from(v)
    }

    #[test]
    fn phi_examples() {
        let p = p3();
        let c = phi_beta(&ExponentSeq::empty(), p);
        assert_eq!(c.shift, 0);
        let f = phi_beta(&s([1]), p);
        assert_eq!(f.shift, 1);
        assert_eq!(f.support[&s([1])], GradedPoly::one(p));
        assert_eq!(phi_beta(&s([0, 1]), p).shift, 4);

        let g = phi_alpha_beta(&s([1]), &s([1]), p).unwrap();
        assert_eq!(g.support[&s([1])].to_string(), "v_1");
        let g = phi_alpha_beta(&s([4]), &s([0, 1]), p).unwrap();
        assert_eq!(g.support[&s([0, 1])].to_string(), "v_1^4");
        assert!(phi_alpha_beta(&ExponentSeq::empty(), &ExponentSeq::empty(), p).unwrap().is_counit());
        assert!(matches!(phi_alpha_beta(&s([1]), &s([2]), p), Err(Error::WeightMismatch { .. })));
    }

    #[test]
    fn counit_is_identity() {
        let p = p3();
        let t = EtaRTable::build(p, 8).unwrap();
        for r in 0..=8 {
            let m = action_matrix(&counit(p), r, &t).unwrap();
            assert_eq!(m.matrix, RatMatrix::identity(m.size()));
        }
    }

    #[test]
    fn action_matrix_weight_four() {
        let p = p3();
        let t = EtaRTable::build(p, 4).unwrap();
        let m = action_matrix(&phi_alpha_beta(&s([0, 1]), &s([0, 1]), p).unwrap(), 4, &t).unwrap();
        let expected = m.elementary_like(&s([0, 1]), &s([0, 1]), &rat(3)).unwrap();
        assert_eq!(m, expected);

        let m = action_matrix(&phi_alpha_beta(&s([4]), &s([4]), p).unwrap(), 4, &t).unwrap();
        assert_eq!(m.entry(&s([4]), &s([4])), Some(&rat(81)));
        // c_{(0,1),(4)} = μ_{(0,1),(4)} = −27
        assert_eq!(m.entry(&s([4]), &s([0, 1])), Some(&rat(-27)));
        assert!(m.entry(&s([0, 1]), &s([4])).unwrap().is_zero());
        assert!(m.entry(&s([0, 1]), &s([0, 1])).unwrap().is_zero());
    }

    #[test]
    fn action_matrix_errors() {
        let p = p3();
        let t = EtaRTable::build(p, 2).unwrap();
        assert!(matches!(action_matrix(&phi_beta(&s([1]), p), 1, &t), Err(Error::NonZeroDegree(1))));
        assert!(matches!(action_matrix(&counit(p), 3, &t), Err(Error::WeightExceedsBound { .. })));
    }

    #[test]
    fn adams_examples() {
        let p = p3();
        assert_eq!(adams_matrix(&bigint_scalar(1), 5, 3, p), RatMatrix::identity(3));
        assert!(adams_matrix(&bigint_scalar(0), 2, 2, p).is_zero());
        assert_eq!(adams_matrix(&bigint_scalar(0), 0, 1, p), RatMatrix::identity(1));
        assert_eq!(adams_matrix(&bigint_scalar(2), 2, 2, p), RatMatrix::scalar(2, rat(16)));
    }

    #[test]
    fn realize_examples() {
        let p = p3();
        let t = EtaRTable::build(p, 8).unwrap();
        let r = elementary_realize(&s([4]), &s([0, 1]), &t).unwrap();
        assert_eq!(r.mu_bar, bigint_scalar(3));
        assert_eq!(r.coefficients.len(), 1);
        assert_eq!(r.coefficients[&s([0, 1])], bigint_scalar(1));

        let r = elementary_realize(&s([1]), &s([1]), &t).unwrap();
        assert_eq!(r.mu_bar, bigint_scalar(3));
        assert_eq!(r.coefficients[&s([1])], bigint_scalar(1));

        for w in 0..=8 {
            let basis = enumerate_weight(w, p);
            let top = basis.last().unwrap();
            let r = elementary_realize(&basis[0], top, &t).unwrap();
            assert_eq!(r.mu_bar, PAdicScalar::p_power(p, top.total()));
            assert_eq!(r.coefficients.len(), 1);
        }
    }

    #[test]
    fn stable_generator_counts() {
        let p = p3();
        assert_eq!(stable_generators(0, p).len(), 1);
        let g1 = stable_generators(1, p);
        assert_eq!(g1.len(), 2);
        assert_eq!(g1[1].name, "phi_(1),(1)");
        assert_eq!(stable_generators(4, p).len(), 8);
    }

    #[test]
    fn degree_zero_ops_preserve_every_weight() {
        let p = p3();
        let t = EtaRTable::build(p, 8).unwrap();
        for g in stable_generators(4, p) {
            for r in 0..=8 {
                let m = action_matrix(&g, r, &t).unwrap();
                assert_eq!(m.size(), enumerate_weight(r, p).len());
            }
        }
    }
}
