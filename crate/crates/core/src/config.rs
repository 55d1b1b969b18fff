//! Run configuration shared by the CLI and the FFI layer.

use std::path::PathBuf;

use serde::Serialize;

use crate::dvr::Prime;
use crate::error::{Error, Result};
use crate::ktheory::{is_primitive_root_mod_p2, SgCaps};

/// Directory override for the η_R cache.
pub const CACHE_DIR_ENV: &str = "BPCENTRE_CACHE_DIR";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub prime: Prime,
    pub max_weight: u64,
    pub heights: Vec<u32>,
    pub window: u64,
    pub q: u64,
    /// Explicit `(max_a, max_s)` generator caps; defaults depend on the window.
    pub caps: Option<(u64, u64)>,
    pub margin: u64,
    pub format: OutputFormat,
    #[serde(skip)]
    pub cache: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults for prime `p`: weight bound 13, heights 1 and 2, window 5.
    pub fn new(p: u32) -> Result<Self> {
        let prime = Prime::new(p)?;
        let window = 5;
        let caps = SgCaps::defaults(prime, window);
        Ok(RunConfig {
            prime,
            max_weight: 13,
            heights: vec![1, 2],
            window,
            q: caps.q,
            caps: None,
            margin: caps.margin,
            format: OutputFormat::Json,
            cache: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.window > self.max_weight {
            return Err(Error::Config(format!(
                "window N={} exceeds max weight {}",
                self.window, self.max_weight
            )));
        }
        if self.heights.is_empty() || self.heights.contains(&0) {
            return Err(Error::Config("heights must be a non-empty list of positive integers".into()));
        }
        if !is_primitive_root_mod_p2(self.q, self.prime) {
            return Err(Error::Config(format!("q={} is not a primitive root modulo {}²", self.q, self.prime)));
        }
        if self.margin == 0 {
            return Err(Error::Config("margin must be positive".into()));
        }
        Ok(())
    }

    pub fn caps_for(&self, big_n: u64) -> SgCaps {
        let d = SgCaps::defaults(self.prime, big_n);
        let (max_a, max_s) = self.caps.unwrap_or((d.max_a, d.max_s));
        SgCaps { q: self.q, max_a, max_s, margin: self.margin }
    }

    /// Explicit path, else `$BPCENTRE_CACHE_DIR/<name>`, else `./<name>`.
    pub fn cache_path(&self) -> PathBuf {
        if let Some(p) = &self.cache {
            return p.clone();
        }
        let name = format!("eta_r_p{}_w{}.json", self.prime, self.max_weight);
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(dir) => PathBuf::from(dir).join(name),
            None => PathBuf::from(name),
        }
    }
}
