//! Exact arithmetic over the p-local integers `Z_(p)` and exact linear
//! algebra over `Q` and `Z_(p)`.
//!
//! Scalars are reduced fractions over arbitrary-precision integers. The
//! p-local ring is the subring of fractions whose denominator is prime to
//! `p`; [`PAdicScalar`] holds exactly those. Linear algebra runs on dense
//! [`RatMatrix`] values and returns integral data as [`PAdicScalar`]s.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An odd prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) || (3..).step_by(2).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(Error::NotOddPrime(p));
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    pub fn pow(self, e: u32) -> BigInt {
        num_traits::pow(self.to_bigint(), e as usize)
    }

    /// Exponent of `p` in a non-zero integer; `None` for zero.
    pub fn valuation_int(self, n: &BigInt) -> Option<u32> {
        if n.is_zero() {
            return None;
        }
        let p = self.to_bigint();
        let mut n = n.abs();
        let mut e = 0;
        loop {
            let (q, r) = n.div_rem(&p);
            if !r.is_zero() {
                return Some(e);
            }
            n = q;
            e += 1;
        }
    }

    pub fn valuation(self, q: &BigRational) -> Valuation {
        match self.valuation_int(q.numer()) {
            None => Valuation::Infinite,
            Some(num) => {
                let den = self.valuation_int(q.denom()).unwrap_or(0);
                Valuation::Finite(num as i64 - den as i64)
            }
        }
    }

    pub fn is_integral(self, q: &BigRational) -> bool {
        self.valuation_int(q.denom()) == Some(0)
    }

    /// Splits a non-zero rational as `p^v · u` with `u` a p-adic unit.
    pub fn split(self, q: &BigRational) -> Option<(i64, BigRational)> {
        match self.valuation(q) {
            Valuation::Infinite => None,
            Valuation::Finite(v) => {
                let unit = if v >= 0 {
                    q / BigRational::from_integer(self.pow(v as u32))
                } else {
                    q * BigRational::from_integer(self.pow((-v) as u32))
                };
                Some((v, unit))
            }
        }
    }

    /// Canonical representative in `[0, p^e)` of an integral rational modulo `p^e`.
    pub fn residue(self, q: &BigRational, e: u32) -> BigInt {
        debug_assert!(self.is_integral(q));
        let modulus = self.pow(e);
        if e == 0 {
            return BigInt::zero();
        }
        let inv = q
            .denom()
            .mod_floor(&modulus)
            .modinv(&modulus)
            .expect("denominator is a unit modulo p^e");
        (q.numer() * inv).mod_floor(&modulus)
    }
}

impl TryFrom<u32> for Prime {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A p-adic valuation; zero has infinite valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// An element of `Z_(p)`: a reduced fraction whose denominator is prime to `p`.
///
/// The prime is checked at construction and not stored; sums, differences and
/// products of p-integral fractions are p-integral for every `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PAdicScalar(BigRational);

impl PAdicScalar {
    pub fn new(value: BigRational, p: Prime) -> Result<Self> {
        if p.is_integral(&value) {
            Ok(PAdicScalar(value))
        } else {
            Err(Error::NonIntegral { entry: value.to_string(), prime: p.get() })
        }
    }

    pub fn from_int<T: Into<BigInt>>(n: T) -> Self {
        PAdicScalar(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        PAdicScalar(BigRational::zero())
    }

    pub fn one() -> Self {
        PAdicScalar(BigRational::one())
    }

    pub fn p_power(p: Prime, e: u32) -> Self {
        PAdicScalar::from_int(p.pow(e))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn valuation(&self, p: Prime) -> Valuation {
        p.valuation(&self.0)
    }

    pub fn is_unit(&self, p: Prime) -> bool {
        self.valuation(p) == Valuation::Finite(0)
    }

    /// Quotient in `Z_(p)`, if it exists.
    pub fn div_exact(&self, divisor: &PAdicScalar, p: Prime) -> Option<PAdicScalar> {
        if divisor.is_zero() {
            return None;
        }
        let q = &self.0 / &divisor.0;
        p.is_integral(&q).then_some(PAdicScalar(q))
    }

    pub fn pow(&self, e: u32) -> PAdicScalar {
        PAdicScalar(num_traits::pow(self.0.clone(), e as usize))
    }
}

impl fmt::Display for PAdicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for PAdicScalar {
            type Output = PAdicScalar;
            fn $m(self, rhs: PAdicScalar) -> PAdicScalar {
                PAdicScalar(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a PAdicScalar> for &'a PAdicScalar {
            type Output = PAdicScalar;
            fn $m(self, rhs: &'a PAdicScalar) -> PAdicScalar {
                PAdicScalar((&self.0).$m(&rhs.0))
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for PAdicScalar {
    type Output = PAdicScalar;
    fn neg(self) -> PAdicScalar {
        PAdicScalar(-self.0)
    }
}

/// Valuation of a scalar, as a free function.
pub fn valuation(x: &PAdicScalar, p: Prime) -> Valuation {
    x.valuation(p)
}

/// Dense matrix over `Q`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, BigRational::one())
    }

    pub fn scalar(n: usize, c: BigRational) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    /// The elementary matrix with a single `1` at `(i, j)`.
    pub fn elementary(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.set(i, j, BigRational::one());
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, found: row.len() });
            }
            data.extend(row);
        }
        Ok(RatMatrix { rows: r, cols: c, data })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
            .expect("rectangular input")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Returns the common diagonal entry if this is a scalar matrix.
    pub fn scalar_value(&self) -> Option<BigRational> {
        if !self.is_square() {
            return None;
        }
        if self.rows == 0 {
            return Some(BigRational::zero());
        }
        let d = self.get(0, 0).clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                if (i == j && *e != d) || (i != j && !e.is_zero()) {
                    return None;
                }
            }
        }
        Some(d)
    }

    pub fn is_integral(&self, p: Prime) -> bool {
        self.data.iter().all(|x| p.is_integral(x))
    }

    pub fn scale(&self, c: &BigRational) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn add(&self, other: &RatMatrix) -> Result<RatMatrix> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(RatMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &RatMatrix) -> Result<RatMatrix> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(RatMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn commutes_with(&self, other: &RatMatrix) -> Result<bool> {
        Ok(self.mul(other)? == other.mul(self)?)
    }

    /// Restriction to the given row and column index sets.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> RatMatrix {
        let mut out = RatMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    fn same_shape(&self, other: &RatMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(())
    }

    fn to_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn rank(&self) -> usize {
        self.cols - self.kernel_over_field().len()
    }

    /// Basis of `{x ∈ Q^cols : Ax = 0}` read off the reduced row echelon form.
    pub fn kernel_over_field(&self) -> Vec<Vec<BigRational>> {
        let mut a = self.to_rows();
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(found) = (r..self.rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, found);
            let inv = a[r][c].recip();
            for x in a[r].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = a[r].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i != r && !row[c].is_zero() {
                    let f = row[c].clone();
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        if !y.is_zero() {
                            *x -= &f * y;
                        }
                    }
                }
            }
            pivot_cols.push(c);
            r += 1;
            if r == self.rows {
                break;
            }
        }
        let mut kernel = Vec::new();
        for f in (0..self.cols).filter(|c| !pivot_cols.contains(c)) {
            let mut v = vec![BigRational::zero(); self.cols];
            v[f] = BigRational::one();
            for (i, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -a[i][f].clone();
            }
            kernel.push(v);
        }
        kernel
    }

    /// Basis of the `Z_(p)`-module `{x ∈ Z_(p)^cols : Ax = 0}`.
    ///
    /// Unimodular column elimination: each row pivots on its entry of least
    /// valuation, so every elimination factor lies in `Z_(p)`. The trailing
    /// columns of the accumulated transform span the kernel over `Z_(p)`,
    /// which is the saturation of the rational kernel.
    pub fn integral_kernel(&self, p: Prime) -> Result<Vec<Vec<PAdicScalar>>> {
        if let Some(bad) = self.data.iter().find(|x| !p.is_integral(x)) {
            return Err(Error::NonIntegral { entry: bad.to_string(), prime: p.get() });
        }
        let n = self.cols;
        // Stored column-major so column operations touch contiguous memory.
        let mut a: Vec<Vec<BigRational>> =
            (0..n).map(|j| (0..self.rows).map(|i| self.get(i, j).clone()).collect()).collect();
        let mut t: Vec<Vec<BigRational>> =
            (0..n).map(|j| (0..n).map(|i| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
        let mut k = 0;
        for i in 0..self.rows {
            if k == n {
                break;
            }
            let best = (k..n)
                .filter(|&j| !a[j][i].is_zero())
                .min_by_key(|&j| p.valuation(&a[j][i]));
            let Some(j) = best else { continue };
            a.swap(k, j);
            t.swap(k, j);
            let pivot = a[k][i].clone();
            for j in k + 1..n {
                if a[j][i].is_zero() {
                    continue;
                }
                let f = &a[j][i] / &pivot;
                let (head, tail) = a.split_at_mut(j);
                axpy(&mut tail[0], &f, &head[k]);
                let (head, tail) = t.split_at_mut(j);
                axpy(&mut tail[0], &f, &head[k]);
            }
            k += 1;
        }
        Ok(t.into_iter().skip(k).map(|col| col.into_iter().map(PAdicScalar).collect()).collect())
    }
}

/// `y -= f·x`
fn axpy(y: &mut [BigRational], f: &BigRational, x: &[BigRational]) {
    for (a, b) in y.iter_mut().zip(x) {
        if !b.is_zero() {
            *a -= f * b;
        }
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// A pivot of a lattice echelon form: the basis vector leading at `index`
/// has entry exactly `p^exponent` there.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pivot {
    pub index: usize,
    pub exponent: u32,
}

/// A finitely generated `Z_(p)`-submodule of `Z_(p)^n` in canonical
/// echelon (Hermite) form.
///
/// Basis vectors are ordered by leading coordinate. Each leading entry is a
/// pure power of `p`, and every entry sitting above a pivot is the canonical
/// residue in `[0, p^e)`. Two lattices are equal iff their forms are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DvrLattice {
    prime: Prime,
    ambient_rank: usize,
    basis: Vec<Vec<PAdicScalar>>,
    pivots: Vec<Pivot>,
}

impl DvrLattice {
    pub fn full(prime: Prime, ambient_rank: usize) -> Self {
        let basis = (0..ambient_rank)
            .map(|i| (0..ambient_rank).map(|j| if i == j { PAdicScalar::one() } else { PAdicScalar::zero() }).collect())
            .collect();
        let pivots = (0..ambient_rank).map(|index| Pivot { index, exponent: 0 }).collect();
        DvrLattice { prime, ambient_rank, basis, pivots }
    }

    /// Canonical echelon form of the `Z_(p)`-span of `generators`.
    pub fn echelon(prime: Prime, generators: &[Vec<BigRational>], ambient_rank: usize) -> Result<Self> {
        let mut rows = Vec::with_capacity(generators.len());
        for g in generators {
            if g.len() != ambient_rank {
                return Err(Error::DimensionMismatch { expected: ambient_rank, found: g.len() });
            }
            if let Some(bad) = g.iter().find(|x| !prime.is_integral(x)) {
                return Err(Error::NonIntegral { entry: bad.to_string(), prime: prime.get() });
            }
            if g.iter().any(|x| !x.is_zero()) {
                rows.push(g.clone());
            }
        }
        Ok(Self::echelon_rows(prime, rows, ambient_rank))
    }

    pub fn from_integral(prime: Prime, generators: &[Vec<PAdicScalar>], ambient_rank: usize) -> Result<Self> {
        let rows: Vec<Vec<BigRational>> =
            generators.iter().map(|g| g.iter().map(|x| x.as_rational().clone()).collect()).collect();
        Self::echelon(prime, &rows, ambient_rank)
    }

    fn echelon_rows(prime: Prime, mut rows: Vec<Vec<BigRational>>, n: usize) -> Self {
        let mut done = 0;
        let mut pivots = Vec::new();
        for c in 0..n {
            let best = (done..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by_key(|&i| prime.valuation(&rows[i][c]));
            let Some(i) = best else { continue };
            rows.swap(done, i);
            let (e, unit) = prime.split(&rows[done][c]).expect("non-zero pivot");
            let inv = unit.recip();
            for x in rows[done].iter_mut() {
                *x *= &inv;
            }
            let pivot = rows[done][c].clone();
            for i in done + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let f = &rows[i][c] / &pivot;
                let (head, tail) = rows.split_at_mut(i);
                axpy(&mut tail[0], &f, &head[done]);
            }
            pivots.push(Pivot { index: c, exponent: e as u32 });
            done += 1;
        }
        rows.truncate(done);
        // Reduce entries above each pivot to canonical residues.
        for (i, piv) in pivots.iter().enumerate() {
            let modulus = BigRational::from_integer(prime.pow(piv.exponent));
            for j in 0..i {
                let x = rows[j][piv.index].clone();
                let r = BigRational::from_integer(prime.residue(&x, piv.exponent));
                let f = (x - r) / &modulus;
                if !f.is_zero() {
                    let (head, tail) = rows.split_at_mut(i);
                    axpy(&mut head[j], &f, &tail[0]);
                }
            }
        }
        let basis = rows.into_iter().map(|r| r.into_iter().map(PAdicScalar).collect()).collect();
        DvrLattice { prime, ambient_rank: n, basis, pivots }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<PAdicScalar>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[Pivot] {
        &self.pivots
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.ambient_rank && self.pivots.iter().all(|p| p.exponent == 0)
    }

    /// Coefficients expressing `v` over the echelon basis, if `v` lies in the lattice.
    pub fn membership(&self, v: &[PAdicScalar]) -> Result<Option<Vec<PAdicScalar>>> {
        if v.len() != self.ambient_rank {
            return Err(Error::DimensionMismatch { expected: self.ambient_rank, found: v.len() });
        }
        let mut residual: Vec<PAdicScalar> = v.to_vec();
        let mut coeffs = Vec::with_capacity(self.rank());
        for (row, piv) in self.basis.iter().zip(&self.pivots) {
            if residual[..piv.index].iter().any(|x| !x.is_zero()) {
                return Ok(None);
            }
            let lead = &row[piv.index];
            let Some(c) = residual[piv.index].div_exact(lead, self.prime) else {
                return Ok(None);
            };
            if !c.is_zero() {
                for (r, b) in residual.iter_mut().zip(row) {
                    *r = &*r - &(&c * b);
                }
            }
            coeffs.push(c);
        }
        if residual.iter().any(|x| !x.is_zero()) {
            return Ok(None);
        }
        Ok(Some(coeffs))
    }

    /// `Σ coeffs[i] · basis[i]`.
    pub fn combine(&self, coeffs: &[PAdicScalar]) -> Vec<PAdicScalar> {
        let mut out = vec![PAdicScalar::zero(); self.ambient_rank];
        for (c, row) in coeffs.iter().zip(&self.basis) {
            for (o, b) in out.iter_mut().zip(row) {
                *o = &*o + &(c * b);
            }
        }
        out
    }

    pub fn contains(&self, v: &[PAdicScalar]) -> bool {
        matches!(self.membership(v), Ok(Some(_)))
    }

    /// Whether every basis vector of `self` lies in `other`.
    pub fn is_sublattice_of(&self, other: &DvrLattice) -> bool {
        self.ambient_rank == other.ambient_rank && self.basis.iter().all(|b| other.contains(b))
    }

    /// Projection onto the first `k` coordinates.
    pub fn project_prefix(&self, k: usize) -> Result<DvrLattice> {
        let k = k.min(self.ambient_rank);
        let rows: Vec<Vec<PAdicScalar>> = self.basis.iter().map(|b| b[..k].to_vec()).collect();
        DvrLattice::from_integral(self.prime, &rows, k)
    }

    /// Smith invariants of the basis matrix, as ascending p-exponents.
    pub fn elementary_divisors(&self) -> Vec<u32> {
        let p = self.prime;
        let mut m: Vec<Vec<BigRational>> =
            self.basis.iter().map(|r| r.iter().map(|x| x.as_rational().clone()).collect()).collect();
        let rows = m.len();
        let cols = self.ambient_rank;
        let mut out = Vec::new();
        for k in 0..rows.min(cols) {
            let mut best: Option<(usize, usize, Valuation)> = None;
            for (i, row) in m.iter().enumerate().skip(k) {
                for (j, x) in row.iter().enumerate().skip(k) {
                    let v = p.valuation(x);
                    if v != Valuation::Infinite && best.is_none_or(|b| v < b.2) {
                        best = Some((i, j, v));
                    }
                }
            }
            let Some((bi, bj, v)) = best else { break };
            m.swap(k, bi);
            for row in m.iter_mut() {
                row.swap(k, bj);
            }
            let pivot = m[k][k].clone();
            for i in k + 1..rows {
                if !m[i][k].is_zero() {
                    let f = &m[i][k] / &pivot;
                    let (head, tail) = m.split_at_mut(i);
                    axpy(&mut tail[0], &f, &head[k]);
                }
            }
            // Column clearing only touches row k once the rows below are cleared.
            for x in &mut m[k][k + 1..cols] {
                *x = BigRational::zero();
            }
            out.push(v.finite().expect("finite") as u32);
        }
        out.sort_unstable();
        out
    }

    /// `log_p [other : self]` when `self ⊆ other` and both have equal rank.
    pub fn colength_in(&self, other: &DvrLattice) -> Option<u64> {
        if self.rank() != other.rank() || !self.is_sublattice_of(other) {
            return None;
        }
        let a: u64 = self.elementary_divisors().iter().map(|&e| e as u64).sum();
        let b: u64 = other.elementary_divisors().iter().map(|&e| e as u64).sum();
        Some(a - b)
    }
}

/// The commutant `{X : XM = MX for all M}` of a family of square matrices.
#[derive(Clone, Debug)]
pub struct Commutant {
    pub size: usize,
    /// Dimension over the fraction field.
    pub rank: usize,
    /// A `Z_(p)`-basis of the integral commutant, in canonical form.
    pub basis: Vec<RatMatrix>,
}

impl Commutant {
    pub fn is_scalar(&self) -> bool {
        self.basis.iter().all(|b| b.scalar_value().is_some())
    }
}

/// Solves `XM - MX = 0` for all `M` in `mats`: rank over `Q` from the
/// reduced row echelon form, integral basis from the saturated kernel. The
/// two ranks must agree and every basis element is re-verified.
pub fn commutant(p: Prime, size: usize, mats: &[RatMatrix]) -> Result<Commutant> {
    for m in mats {
        if m.rows() != size || m.cols() != size {
            return Err(Error::DimensionMismatch { expected: size, found: m.rows().max(m.cols()) });
        }
    }
    let k = size;
    let unknowns = k * k;
    let mut system = RatMatrix::zeros(mats.len() * unknowns, unknowns);
    for (mi, m) in mats.iter().enumerate() {
        for a in 0..k {
            for b in 0..k {
                let row = mi * unknowns + a * k + b;
                for c in 0..k {
                    // (XM)_{ab} = Σ_c X_{ac} M_{cb}
                    let coef = m.get(c, b);
                    if !coef.is_zero() {
                        let idx = a * k + c;
                        let cur = system.get(row, idx) + coef;
                        system.set(row, idx, cur);
                    }
                    // (MX)_{ab} = Σ_c M_{ac} X_{cb}
                    let coef = m.get(a, c);
                    if !coef.is_zero() {
                        let idx = c * k + b;
                        let cur = system.get(row, idx) - coef;
                        system.set(row, idx, cur);
                    }
                }
            }
        }
    }
    let rank = system.kernel_over_field().len();
    let integral = system.integral_kernel(p)?;
    if integral.len() != rank {
        return Err(Error::Inconsistent(format!(
            "commutant rank over Q is {rank} but saturated kernel has rank {}",
            integral.len()
        )));
    }
    let canonical = DvrLattice::from_integral(p, &integral, unknowns)?;
    let basis: Vec<RatMatrix> = canonical
        .basis()
        .iter()
        .map(|v| {
            let rows = (0..k).map(|a| (0..k).map(|b| v[a * k + b].as_rational().clone()).collect()).collect();
            RatMatrix::from_rows(rows).map(|m| if k == 0 { RatMatrix::zeros(0, 0) } else { m })
        })
        .collect::<Result<_>>()?;
    for x in &basis {
        for m in mats {
            if !x.commutes_with(m)? {
                return Err(Error::Inconsistent("commutant basis element fails XM = MX".into()));
            }
        }
    }
    Ok(Commutant { size, rank, basis })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn vecs(v: &[&[i64]]) -> Vec<Vec<BigRational>> {
        v.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    fn ints(v: &[i64]) -> Vec<PAdicScalar> {
        v.iter().map(|&x| PAdicScalar::from_int(x)).collect()
    }

    #[test]
    fn prime_guard() {
        assert!(Prime::new(2).is_err());
        assert!(Prime::new(9).is_err());
        assert!(Prime::new(1).is_err());
        assert_eq!(Prime::new(5).unwrap().get(), 5);
    }

    #[test]
    fn valuation_examples() {
        let p = p3();
        assert_eq!(PAdicScalar::one().valuation(p), Valuation::Finite(0));
        let x = PAdicScalar::new(rat_frac(18, 7), p).unwrap();
        assert_eq!(valuation(&x, p), Valuation::Finite(2));
        assert_eq!(PAdicScalar::zero().valuation(p), Valuation::Infinite);
        assert!(PAdicScalar::new(rat_frac(1, 3), p).is_err());
    }

    #[test]
    fn residue_of_fraction() {
        let p = p3();
        // 1/2 ≡ 5 mod 9
        assert_eq!(p.residue(&rat_frac(1, 2), 2), BigInt::from(5));
        assert_eq!(p.residue(&rat(-1), 1), BigInt::from(2));
    }

    #[test]
    fn echelon_examples() {
        let p = p3();
        let full = DvrLattice::echelon(p, &vecs(&[&[1, 0], &[0, 1]]), 2).unwrap();
        assert!(full.is_full());

        let l = DvrLattice::echelon(p, &vecs(&[&[3, 0], &[0, 1], &[3, 3]]), 2).unwrap();
        assert_eq!(l.pivots(), &[Pivot { index: 0, exponent: 1 }, Pivot { index: 1, exponent: 0 }]);
        assert_eq!(l.basis(), &[ints(&[3, 0]), ints(&[0, 1])]);

        let l = DvrLattice::echelon(p, &vecs(&[&[2, 4]]), 2).unwrap();
        assert_eq!(l.pivots(), &[Pivot { index: 0, exponent: 0 }]);
        assert_eq!(l.basis(), &[ints(&[1, 2])]);
    }

    #[test]
    fn echelon_rejects_non_integral() {
        let p = p3();
        let g = vec![vec![rat_frac(1, 3), rat(0)]];
        assert!(matches!(DvrLattice::echelon(p, &g, 2), Err(Error::NonIntegral { .. })));
        assert!(DvrLattice::echelon(p, &vecs(&[&[1, 2, 3]]), 2).is_err());
    }

    #[test]
    fn reduction_above_pivot() {
        let p = p3();
        // (1, 7) and (0, 9): 7 reduces mod 9 to 7, (1, 16) must give the same form.
        let a = DvrLattice::echelon(p, &vecs(&[&[1, 7], &[0, 9]]), 2).unwrap();
        let b = DvrLattice::echelon(p, &vecs(&[&[1, 16], &[0, 9]]), 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.basis()[0], ints(&[1, 7]));
    }

    #[test]
    fn membership_examples() {
        let p = p3();
        let full = DvrLattice::full(p, 2);
        assert!(full.membership(&ints(&[5, -7])).unwrap().is_some());

        let l = DvrLattice::echelon(p, &vecs(&[&[3, 0], &[0, 1]]), 2).unwrap();
        assert!(l.membership(&ints(&[1, 0])).unwrap().is_none());
        let cert = l.membership(&ints(&[3, 1])).unwrap().unwrap();
        assert_eq!(cert, ints(&[1, 1]));
        assert_eq!(l.combine(&cert), ints(&[3, 1]));

        assert!(matches!(l.membership(&ints(&[1])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn commutant_examples() {
        let p = p3();
        let k = 3;
        let all: Vec<RatMatrix> =
            (0..k).flat_map(|i| (0..k).map(move |j| RatMatrix::elementary(k, i, j))).collect();
        let c = commutant(p, k, &all).unwrap();
        assert_eq!(c.rank, 1);
        assert!(c.is_scalar());
        assert_eq!(c.basis[0], RatMatrix::identity(k));

        let c = commutant(p, k, &[]).unwrap();
        assert_eq!(c.rank, 9);

        let d = RatMatrix::from_i64(&[&[1, 0], &[0, 2]]);
        let c = commutant(p, 2, &[d]).unwrap();
        assert_eq!(c.rank, 2);
        assert!(c.basis.iter().all(|b| b.get(0, 1).is_zero() && b.get(1, 0).is_zero()));
    }

    #[test]
    fn commutant_saturates_over_zp() {
        // The commutant of 3·E_{01} is spanned over Q by I and E_{01}; the
        // integral kernel must return the saturated basis, not 3·E_{01}.
        let p = p3();
        let m = RatMatrix::from_i64(&[&[0, 3], &[0, 0]]);
        let c = commutant(p, 2, &[m]).unwrap();
        assert_eq!(c.rank, 2);
        let l = DvrLattice::echelon(
            p,
            &c.basis.iter().map(|b| b.entries().to_vec()).collect::<Vec<_>>(),
            4,
        )
        .unwrap();
        assert!(l.contains(&ints(&[0, 1, 0, 0])));
    }

    #[test]
    fn integral_kernel_matches_rational_rank() {
        let p = p3();
        let a = RatMatrix::from_i64(&[&[3, 6, 9], &[1, 2, 3]]);
        assert_eq!(a.kernel_over_field().len(), 2);
        let k = a.integral_kernel(p).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: BigRational = v.iter().zip([1, 2, 3]).map(|(x, c)| x.as_rational() * rat(c)).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn smith_vs_pivots() {
        let p = p3();
        let l = DvrLattice::echelon(p, &vecs(&[&[3, 1]]), 2).unwrap();
        assert_eq!(l.pivots()[0].exponent, 1);
        assert_eq!(l.elementary_divisors(), vec![0]);
        let l = DvrLattice::echelon(p, &vecs(&[&[3, 0], &[0, 9]]), 2).unwrap();
        assert_eq!(l.elementary_divisors(), vec![1, 2]);
        assert_eq!(l.colength_in(&DvrLattice::full(p, 2)), Some(3));
    }
}
