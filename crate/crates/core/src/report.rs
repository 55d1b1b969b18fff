//! Verification reports, their renderings, and cache handling for runs.
//!
//! Reports carry no timestamps or host details: identical configurations
//! produce byte-identical output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::hopf::EtaRTable;
use crate::ktheory::{LatticeComparison, StabilizationCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub id: String,
    pub status: Status,
    pub witness: String,
}

impl Check {
    pub fn new(id: impl Into<String>, ok: bool, witness: impl Into<String>) -> Self {
        Check { id: id.into(), status: Status::from_bool(ok), witness: witness.into() }
    }

    /// A check whose computation itself failed; the error is the witness.
    pub fn from_result(id: impl Into<String>, r: Result<String, String>) -> Self {
        match r {
            Ok(w) => Check::new(id, true, w),
            Err(w) => Check::new(id, false, w),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Suite {
    pub name: String,
    pub checks: Vec<Check>,
}

impl Suite {
    pub fn new(name: impl Into<String>) -> Self {
        Suite { name: name.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

/// Lattice section: `S_g` window against the diagonal lattice per height.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeReport {
    pub big_n: u64,
    /// Elementary divisor exponents of the `S_g` window.
    pub sg: Vec<u32>,
    /// Elementary divisor exponents of the diagonal lattice, keyed by height.
    pub diagonal: BTreeMap<u32, Vec<u32>>,
    /// `S_g ⊆ diagonal` at every height.
    pub inclusion: bool,
    /// `log_p` index of `S_g` in the diagonal lattice, keyed by height; null when not included.
    pub gap: BTreeMap<u32, Option<u64>>,
    pub stabilization: StabilizationCertificate,
    pub comparisons: Vec<LatticeComparison>,
}

impl LatticeReport {
    pub fn new(sg: &crate::ktheory::SgWindow, comparisons: Vec<LatticeComparison>) -> Self {
        LatticeReport {
            big_n: sg.big_n,
            sg: sg.lattice.elementary_divisors(),
            diagonal: comparisons.iter().map(|c| (c.height, c.diagonal.elementary_divisors.clone())).collect(),
            inclusion: comparisons.iter().all(|c| c.inclusion),
            gap: comparisons.iter().map(|c| (c.height, c.gap)).collect(),
            stabilization: sg.certificate.clone(),
            comparisons,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CacheInfo {
    pub path: String,
    /// SHA-256 of the canonical cache document.
    pub fingerprint: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Built,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub config: RunConfig,
    pub cache: Option<CacheInfo>,
    pub suites: Vec<Suite>,
    pub lattices: Option<LatticeReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(Suite::passed) && self.lattices.as_ref().is_none_or(|l| l.inclusion)
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self)?;
                s.push('\n');
                Ok(s)
            }
            OutputFormat::Csv => Ok(self.to_csv()),
            OutputFormat::Markdown => Ok(self.to_markdown()),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::from("section,id,status,witness\n");
        for suite in &self.suites {
            for c in &suite.checks {
                let _ = writeln!(out, "{},{},{},{}", csv_field(&suite.name), csv_field(&c.id), c.status.as_str(), csv_field(&c.witness));
            }
        }
        if let Some(l) = &self.lattices {
            let _ = writeln!(out, "lattices,sg,,{}", csv_field(&divisors(&l.sg)));
            for (h, d) in &l.diagonal {
                let _ = writeln!(out, "lattices,diagonal/n={h},,{}", csv_field(&divisors(d)));
            }
            for c in &l.comparisons {
                let _ = writeln!(
                    out,
                    "lattices,inclusion/n={},{},{}",
                    c.height,
                    Status::from_bool(c.inclusion).as_str(),
                    csv_field(&comparison_witness(c))
                );
            }
        }
        out
    }

    fn to_markdown(&self) -> String {
        let mut out = String::from("# bpcentre report\n\n## Configuration\n\n");
        let c = &self.config;
        let _ = writeln!(out, "- p = {}", c.prime);
        let _ = writeln!(out, "- max weight = {}", c.max_weight);
        let _ = writeln!(out, "- heights = {:?}", c.heights);
        let _ = writeln!(out, "- window N = {}", c.window);
        let _ = writeln!(out, "- q = {}", c.q);
        let _ = writeln!(out, "- margin = {}", c.margin);
        if let Some(cache) = &self.cache {
            let _ = writeln!(out, "- η_R cache = `{}` (sha256 `{}`)", cache.path, cache.fingerprint);
        }
        for suite in &self.suites {
            let _ = writeln!(
                out,
                "\n## Suite `{}` — {}\n\n| check | status | witness |\n|---|---|---|",
                suite.name,
                Status::from_bool(suite.passed()).as_str()
            );
            for ch in &suite.checks {
                let _ = writeln!(out, "| {} | {} | {} |", md_cell(&ch.id), ch.status.as_str(), md_cell(&ch.witness));
            }
        }
        if let Some(l) = &self.lattices {
            let _ = writeln!(out, "\n## Lattices (window N = {})\n", l.big_n);
            let _ = writeln!(
                out,
                "S_g window: elementary divisors {} (stable after round {}, {} rounds, {} Adams generators)\n",
                divisors(&l.sg),
                l.stabilization.last_change,
                l.stabilization.rounds,
                l.stabilization.generators
            );
            out.push_str("| height n | diagonal divisors | S_g ⊆ diagonal | gap | diagonal ⊆ S_g | witness |\n|---|---|---|---|---|---|\n");
            for c in &l.comparisons {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} |",
                    c.height,
                    divisors(&c.diagonal.elementary_divisors),
                    Status::from_bool(c.inclusion).as_str(),
                    c.gap.map_or("—".to_string(), |g| g.to_string()),
                    c.reverse_inclusion,
                    md_cell(&comparison_witness(c))
                );
            }
        }
        out
    }
}

fn divisors(d: &[u32]) -> String {
    let parts: Vec<String> = d.iter().map(|e| format!("p^{e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn comparison_witness(c: &LatticeComparison) -> String {
    match &c.witness {
        Some(w) => format!("S_g vector ({}) outside diagonal lattice", w.join(", ")),
        None => format!("gap {}", c.gap.map_or("?".into(), |g| g.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn md_cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

/// SHA-256 of the canonical JSON form of `table`.
pub fn fingerprint(table: &EtaRTable) -> Result<String> {
    let digest = Sha256::digest(table.to_json()?.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Loads the configured cache, or builds and persists it when absent.
///
/// A cache for a different prime or weight bound is rejected rather than
/// silently replaced.
pub fn load_or_build(config: &RunConfig) -> Result<(EtaRTable, CacheInfo, CacheStatus)> {
    let path: PathBuf = config.cache_path();
    let (table, status) = if path.exists() {
        let t = EtaRTable::load(&path)?;
        if t.prime() != config.prime || t.max_weight() != config.max_weight {
            return Err(Error::CacheMismatch(format!(
                "{} holds p={} max weight {}, run asks for p={} max weight {}",
                path.display(),
                t.prime(),
                t.max_weight(),
                config.prime,
                config.max_weight
            )));
        }
        (t, CacheStatus::Hit)
    } else {
        let t = EtaRTable::build(config.prime, config.max_weight)?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        t.save(&path)?;
        (t, CacheStatus::Built)
    };
    let info = CacheInfo { path: path.display().to_string(), fingerprint: fingerprint(&table)? };
    Ok((table, info, status))
}
