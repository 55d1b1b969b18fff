//! Verification suites run by `bpcentre verify` and the acceptance tests.
//!
//! Each suite produces one [`Check`] per exact property it tests. Mathematical
//! inconsistencies found while computing a check become failing checks with
//! the error as witness; configuration errors propagate.

use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;

use crate::centre::{block_split, centre_commutant, iota_hat_n_window, projected_family};
use crate::config::RunConfig;
use crate::dvr::{PAdicScalar, Prime, RatMatrix};
use crate::error::{Error, Result};
use crate::hopf::{check_entry_laws, eta_r_m_symbolic, hazewinkel_m, hazewinkel_m_all, EtaRTable};
use crate::ktheory::{adams_sequence, compare_with_diagonal_window, sg_membership, sg_window, SgCaps, SgWindow};
use crate::monomial::{enumerate_weight, generator_weight, ExponentSeq};
use crate::ops::{adams_matrix, elementary_realize};
use crate::poly::{check_integrality, GradedPoly};
use crate::report::{CacheInfo, Check, LatticeReport, Report, Suite};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteName {
    EtaR,
    Triangular,
    Realize,
    Centre,
    Congruence,
    All,
}

impl SuiteName {
    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::EtaR => "etaR",
            SuiteName::Triangular => "triangular",
            SuiteName::Realize => "realize",
            SuiteName::Centre => "centre",
            SuiteName::Congruence => "congruence",
            SuiteName::All => "all",
        }
    }
}

impl FromStr for SuiteName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "etaR" | "eta-r" | "etar" => SuiteName::EtaR,
            "triangular" => SuiteName::Triangular,
            "realize" => SuiteName::Realize,
            "centre" | "center" => SuiteName::Centre,
            "congruence" => SuiteName::Congruence,
            "all" => SuiteName::All,
            other => return Err(Error::Config(format!("unknown suite {other:?}"))),
        })
    }
}

/// Turns mathematical failures into a failing witness; keeps usage errors.
fn soft<T>(r: Result<T>) -> Result<Result<T, String>> {
    match r {
        Ok(x) => Ok(Ok(x)),
        Err(e @ (Error::Config(_) | Error::NotOddPrime(_) | Error::Io(_))) => Err(e),
        Err(e) => Ok(Err(e.to_string())),
    }
}

/// Weight ceiling used by the product spot checks of the η_R suite.
const RING_MAP_WEIGHT: u64 = 8;
/// Weight ceiling for the `ι̂_n` centrality checks.
const IOTA_WEIGHT: u64 = 10;

/// Integrality, counit, top pure-`t` term, homogeneity, the `η_R(v_1)`
/// string, the defining relation for `m_k`, multiplicativity, and agreement
/// with a fresh build through a serialization round trip.
pub fn eta_r_suite(table: &EtaRTable) -> Result<Suite> {
    let p = table.prime();
    let mut suite = Suite::new(SuiteName::EtaR.as_str());
    for (gamma, poly) in table.entries() {
        let integ = check_integrality(poly);
        let r = if !integ.integral {
            let (m, c) = &integ.offenders[0];
            Err(format!("coefficient {c} on {m} is not {p}-integral"))
        } else {
            check_entry_laws(gamma, poly).map(|()| format!("{} terms", poly.len()))
        };
        suite.push(Check::from_result(format!("laws/v^{gamma}"), r));
    }

    if table.max_weight() >= 1 {
        let v1 = table.eta_r_v(&ExponentSeq::generator(1, 1))?.to_string();
        let expected = format!("v_1 + {p}·t_1");
        suite.push(Check::new("eta_r(v_1)", v1 == expected, v1));
    }

    // η_R(m_k) two ways: Σ m_i t_{k-i}^{p^i} with m_i in the v's, and m_k
    // with every v-monomial replaced by its table entry.
    let mut k = 1;
    while generator_weight(k, p) <= table.max_weight() {
        let lhs = eta_r_m_symbolic(k, p).substitute_m(&hazewinkel_m_all(k, p));
        let mut rhs = GradedPoly::zero(p);
        for (mono, c) in hazewinkel_m(k, p).terms() {
            rhs = rhs.add(&table.eta_r_v(&mono.v)?.scale(c));
        }
        let diff = lhs.sub(&rhs);
        suite.push(Check::new(
            format!("ring-map/m_{k}"),
            diff.is_zero(),
            if diff.is_zero() { format!("{} terms agree", lhs.len()) } else { format!("difference {diff}") },
        ));
        k += 1;
    }

    let bound = table.max_weight().min(RING_MAP_WEIGHT);
    let mut pairs = 0usize;
    let mut bad = None;
    'outer: for r1 in 1..=bound {
        for r2 in r1..=bound - r1 {
            for a in enumerate_weight(r1, p) {
                for b in enumerate_weight(r2, p) {
                    pairs += 1;
                    let prod = table.eta_r_v(&a)?.mul(table.eta_r_v(&b)?);
                    if &prod != table.eta_r_v(&a.add(&b))? {
                        bad = Some(format!("η_R(v^{a})·η_R(v^{b}) ≠ η_R(v^{})", a.add(&b)));
                        break 'outer;
                    }
                }
            }
        }
    }
    suite.push(Check::new(
        "ring-map/products",
        bad.is_none(),
        bad.unwrap_or_else(|| format!("{pairs} products up to weight {bound}")),
    ));

    let json = table.to_json()?;
    let round = soft(EtaRTable::from_json(&json).and_then(|t| t.to_json()))?;
    suite.push(Check::new(
        "cache/roundtrip",
        round.as_ref().is_ok_and(|s| *s == json),
        match &round {
            Ok(s) if *s == json => format!("{} bytes identical", json.len()),
            Ok(_) => "re-serialized cache differs".into(),
            Err(e) => e.clone(),
        },
    ));
    let fresh = soft(EtaRTable::build(p, table.max_weight()))?;
    suite.push(Check::new(
        "cache/rebuild",
        fresh.as_ref().is_ok_and(|f| f == table),
        match &fresh {
            Ok(f) if f == table => format!("{} entries match a fresh build", table.len()),
            Ok(_) => "table differs from a fresh build".into(),
            Err(e) => e.clone(),
        },
    ));
    Ok(suite)
}

/// `μ_{γ,β} = 0` for `γ < β` and `μ_{β,β} = p^{Σβ}` in every weight.
pub fn triangular_suite(table: &EtaRTable) -> Result<Suite> {
    let mut suite = Suite::new(SuiteName::Triangular.as_str());
    for r in 0..=table.max_weight() {
        suite.push(triangular_check(table, r)?);
    }
    Ok(suite)
}

pub fn triangular_check(table: &EtaRTable, r: u64) -> Result<Check> {
    let p = table.prime();
    let basis = enumerate_weight(r, p);
    let mut bad = None;
    'outer: for (gi, gamma) in basis.iter().enumerate() {
        for (bi, beta) in basis.iter().enumerate() {
            let mu = table.mu(gamma, beta)?;
            let expected = match gi.cmp(&bi) {
                std::cmp::Ordering::Less => Some(BigRational::zero()),
                std::cmp::Ordering::Equal => Some(BigRational::from_integer(p.pow(beta.total()))),
                std::cmp::Ordering::Greater => None,
            };
            if let Some(e) = expected {
                if mu != e {
                    bad = Some(format!("μ_{{{gamma},{beta}}} = {mu}, expected {e}"));
                    break 'outer;
                }
            }
        }
    }
    let n = basis.len();
    Ok(Check::new(
        format!("weight/{r}"),
        bad.is_none(),
        bad.unwrap_or_else(|| format!("{} pairs above the diagonal vanish, {n} diagonal entries are p^(Σβ)", n * n.saturating_sub(1) / 2)),
    ))
}

/// Every `(α, β)` in every weight realizes `μ̄ E_{α,β}` with integral
/// coefficients; the witness records `log_p μ̄`.
pub fn realize_suite(table: &EtaRTable) -> Result<Suite> {
    let p = table.prime();
    let mut suite = Suite::new(SuiteName::Realize.as_str());
    for r in 0..=table.max_weight() {
        let basis = enumerate_weight(r, p);
        for a in &basis {
            for b in &basis {
                let real = soft(elementary_realize(a, b, table))?;
                let id = format!("E_{{{a},{b}}}");
                suite.push(match real {
                    Ok(x) => Check::new(
                        id,
                        !x.mu_bar.is_zero() && x.matrix.is_integral(p),
                        format!("μ̄ = {p}^{}, {} coefficients", x.mu_bar_valuation(p), x.coefficients.len()),
                    ),
                    Err(e) => Check::new(id, false, e),
                });
            }
        }
    }
    Ok(suite)
}

/// Tested Adams combinations `Σ c_k Ψ^k`: `Ψ^q`, `Ψ^p`, `Ψ^1 − Ψ^0`, `Ψ^q − Ψ^1`.
pub fn iota_combinations(p: Prime, q: u64) -> Vec<(String, Vec<(PAdicScalar, PAdicScalar)>)> {
    let z = |k: i64| PAdicScalar::from_int(k);
    let q = PAdicScalar::from_int(q);
    let pp = PAdicScalar::from_int(p.get());
    vec![
        (format!("Ψ^{q}"), vec![(q.clone(), z(1))]),
        (format!("Ψ^{pp}"), vec![(pp, z(1))]),
        ("Ψ^1 - Ψ^0".into(), vec![(z(1), z(1)), (z(0), z(-1))]),
        (format!("Ψ^{q} - Ψ^1"), vec![(q, z(1)), (z(1), z(-1))]),
    ]
}

/// Block order for heights up to 3 and each configured height; commutant of
/// the projected elementary family per height and weight; `ι̂_n` centrality.
pub fn centre_suite(config: &RunConfig, table: &EtaRTable) -> Result<Suite> {
    let p = table.prime();
    let mut suite = Suite::new(SuiteName::Centre.as_str());
    let mut heights: Vec<u32> = (1..=3).chain(config.heights.iter().copied()).collect();
    heights.sort_unstable();
    heights.dedup();
    for &n in &heights {
        suite.push(block_order_check(n, table.max_weight(), p)?);
    }
    for &n in &config.heights {
        for r in 0..=table.max_weight() {
            let id = format!("commutant/n={n}/r={r}");
            suite.push(match soft(centre_commutant(r, n, table))? {
                Ok(c) => Check::new(
                    id,
                    c.rank() == 1 && c.is_scalar(),
                    format!("|R| = {}, |J| = {}, commutant rank {}, scalar {}", c.r_size, c.j_size, c.rank(), c.is_scalar()),
                ),
                Err(e) => Check::new(id, false, e),
            });
        }
    }
    let top = table.max_weight().min(IOTA_WEIGHT);
    for &n in &config.heights {
        for (name, combo) in iota_combinations(p, config.q) {
            let id = format!("iota/n={n}/{name}");
            suite.push(Check::from_result(id, soft(iota_centrality(&combo, top, n, table))?));
        }
    }
    Ok(suite)
}

/// Every `R`-monomial precedes every `J`-monomial in weights `0..=max_weight`.
pub fn block_order_check(n: u32, max_weight: u64, p: Prime) -> Result<Check> {
    let mut bad = None;
    for r in 0..=max_weight {
        match soft(block_split(r, n, p))? {
            Ok(_) => {}
            Err(e) => {
                bad = Some(e);
                break;
            }
        }
    }
    Ok(Check::new(
        format!("block-order/n={n}"),
        bad.is_none(),
        bad.unwrap_or_else(|| format!("R precedes J in weights 0..={max_weight}")),
    ))
}

/// The combination's window matrices commute with every projected realized
/// operation on the `R` block, and its full-basis scalar matrices commute
/// with every full realized operation.
pub fn iota_centrality(
    combo: &[(PAdicScalar, PAdicScalar)],
    top: u64,
    n: u32,
    table: &EtaRTable,
) -> Result<String> {
    let p = table.prime();
    let window = iota_hat_n_window(combo, top, n, p)?;
    let mut tested = 0usize;
    for entry in &window {
        let split = block_split(entry.weight, n, p)?;
        for f in projected_family(&split, table)? {
            if !entry.matrix.commutes_with(&f.matrix)? {
                return Err(Error::Inconsistent(format!(
                    "window matrix in weight {} does not commute with E_{{{},{}}}",
                    entry.weight, f.alpha, f.beta
                )));
            }
            tested += 1;
        }
        let full = combo.iter().try_fold(RatMatrix::zeros(split.basis.len(), split.basis.len()), |acc, (k, c)| {
            acc.add(&adams_matrix(k, entry.weight, split.basis.len(), p).scale(c.as_rational()))
        })?;
        for a in &split.basis {
            for b in &split.basis {
                let real = elementary_realize(a, b, table)?;
                if !full.commutes_with(&real.matrix.matrix)? {
                    return Err(Error::Inconsistent(format!(
                        "full window matrix in weight {} does not commute with E_{{{a},{b}}}",
                        entry.weight
                    )));
                }
                tested += 1;
            }
        }
    }
    Ok(format!("{tested} commutations in weights 0..={top}"))
}

/// `Ψ^k` for `k ∈ {0, 1, q, q², p, pq}`.
pub fn adams_generators(p: Prime, q: u64) -> Vec<u64> {
    let pp = p.get() as u64;
    vec![0, 1, q, q * q, pp, pp * q]
}

/// Health of the `S_g` oracle for windows `0..=max_n`: stabilization,
/// membership of the Adams generators, and nesting under `N ↦ N+1`.
/// Returns the computed windows alongside the checks.
pub fn sg_health(p: Prime, max_n: u64, caps: impl Fn(u64) -> SgCaps) -> Result<(Vec<Check>, Vec<Option<SgWindow>>)> {
    let mut checks = Vec::new();
    let mut windows = Vec::new();
    for big_n in 0..=max_n {
        let c = caps(big_n);
        let w = soft(sg_window(big_n, p, c))?;
        checks.push(match &w {
            Ok(w) => Check::new(
                format!("stabilize/N={big_n}"),
                true,
                format!(
                    "stable from round {} over {} rounds, {} generators",
                    w.certificate.last_change, w.certificate.rounds, w.certificate.generators
                ),
            ),
            Err(e) => Check::new(format!("stabilize/N={big_n}"), false, e.clone()),
        });
        if let Ok(w) = &w {
            let mut missing = Vec::new();
            for k in adams_generators(p, c.q) {
                let seq = adams_sequence(&PAdicScalar::from_int(k), big_n, p);
                match soft(sg_membership(&seq, w))? {
                    Ok(Some(_)) => {}
                    Ok(None) => missing.push(format!("Ψ^{k}")),
                    Err(e) => missing.push(format!("Ψ^{k}: {e}")),
                }
            }
            checks.push(Check::new(
                format!("adams/N={big_n}"),
                missing.is_empty(),
                if missing.is_empty() {
                    format!("k ∈ {:?} certified", adams_generators(p, c.q))
                } else {
                    format!("not certified: {}", missing.join(", "))
                },
            ));
        }
        windows.push(w.ok());
    }
    for big_n in 0..max_n {
        if let (Some(a), Some(b)) = (&windows[big_n as usize], &windows[big_n as usize + 1]) {
            let proj = b.lattice.project_prefix(big_n as usize + 1)?;
            checks.push(Check::new(
                format!("nested/N={big_n}"),
                proj == a.lattice,
                if proj == a.lattice {
                    "projection of window N+1 equals window N".to_string()
                } else {
                    format!(
                        "projection has divisors {:?}, window N has {:?}",
                        proj.elementary_divisors(),
                        a.lattice.elementary_divisors()
                    )
                },
            ));
        }
    }
    Ok((checks, windows))
}

/// `S_g` window `N` against the diagonal lattice at every configured height.
pub fn lattice_report(config: &RunConfig, table: &EtaRTable, big_n: u64) -> Result<LatticeReport> {
    let sg = sg_window(big_n, config.prime, config.caps_for(big_n))?;
    let comparisons = config
        .heights
        .iter()
        .map(|&n| compare_with_diagonal_window(big_n, n, table, &sg))
        .collect::<Result<Vec<_>>>()?;
    Ok(LatticeReport::new(&sg, comparisons))
}

/// `S_g` health for windows up to `N`, then `S_g ⊆ diagonal` per window
/// and height.
pub fn congruence_suite(config: &RunConfig, table: &EtaRTable) -> Result<Suite> {
    let p = config.prime;
    let mut suite = Suite::new(SuiteName::Congruence.as_str());
    let (checks, windows) = sg_health(p, config.window, |n| config.caps_for(n))?;
    suite.checks.extend(checks);
    for (big_n, w) in windows.iter().enumerate() {
        let Some(sg) = w else { continue };
        for &n in &config.heights {
            let id = format!("inclusion/N={big_n}/n={n}");
            suite.push(match soft(compare_with_diagonal_window(big_n as u64, n, table, sg))? {
                Ok(c) => {
                    let witness = match &c.witness {
                        Some(v) => format!(
                            "S_g vector ({}) outside the diagonal lattice; S_g divisors {:?}, diagonal divisors {:?}",
                            v.join(", "),
                            c.sg.elementary_divisors,
                            c.diagonal.elementary_divisors
                        ),
                        None => format!(
                            "gap {}; S_g divisors {:?}, diagonal divisors {:?}",
                            c.gap.unwrap_or(0),
                            c.sg.elementary_divisors,
                            c.diagonal.elementary_divisors
                        ),
                    };
                    Check::new(id, c.inclusion, witness)
                }
                Err(e) => Check::new(id, false, e),
            });
        }
    }
    Ok(suite)
}

/// Runs `which` and assembles a report. The congruence suite also attaches
/// the lattice section for the configured window.
pub fn run_verify(config: &RunConfig, table: &EtaRTable, cache: Option<CacheInfo>, which: SuiteName) -> Result<Report> {
    let mut suites = Vec::new();
    let wants = |s: SuiteName| which == SuiteName::All || which == s;
    if wants(SuiteName::EtaR) {
        suites.push(eta_r_suite(table)?);
    }
    if wants(SuiteName::Triangular) {
        suites.push(triangular_suite(table)?);
    }
    if wants(SuiteName::Realize) {
        suites.push(realize_suite(table)?);
    }
    if wants(SuiteName::Centre) {
        suites.push(centre_suite(config, table)?);
    }
    let mut lattices = None;
    if wants(SuiteName::Congruence) {
        suites.push(congruence_suite(config, table)?);
        lattices = soft(lattice_report(config, table, config.window))?.ok();
    }
    Ok(Report { config: config.clone(), cache, suites, lattices })
}

/// Report holding only the lattice section for the configured window.
pub fn run_lattices(config: &RunConfig, table: &EtaRTable, cache: Option<CacheInfo>) -> Result<Report> {
    let lattices = lattice_report(config, table, config.window)?;
    Ok(Report { config: config.clone(), cache, suites: Vec::new(), lattices: Some(lattices) })
}

/// Per-weight term count and largest coefficient valuation of the table.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct WeightSummary {
    pub weight: u64,
    pub monomials: usize,
    pub terms: usize,
    pub max_valuation: u32,
}

pub fn table_summary(table: &EtaRTable) -> Vec<WeightSummary> {
    let p = table.prime();
    (0..=table.max_weight())
        .map(|r| {
            let basis = enumerate_weight(r, p);
            let mut terms = 0;
            let mut max_valuation = 0;
            for g in &basis {
                let poly = table.eta_r_v(g).expect("weight within bound");
                terms += poly.len();
                for (_, c) in poly.terms() {
                    if let Some(v) = p.valuation(c).finite() {
                        max_valuation = max_valuation.max(v as u32);
                    }
                }
            }
            WeightSummary { weight: r, monomials: basis.len(), terms, max_valuation }
        })
        .collect()
}
