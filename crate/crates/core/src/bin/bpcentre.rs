use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bpcentre::config::RunConfig;
use bpcentre::monomial::ExponentSeq;
use bpcentre::report::{load_or_build, CacheStatus};
use bpcentre::suites::{run_lattices, run_verify, table_summary, SuiteName};
use bpcentre::Error;

/// Exact verification of BP operations, truncation centres and the
/// Adams-summand congruence lattice.
#[derive(Parser, Debug)]
#[command(name = "bpcentre", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build (or load) the η_R table and print per-weight statistics.
    EtaTable,
    /// Run a verification suite: etaR, triangular, realize, centre, congruence or all.
    Verify { suite: String },
    /// Compare the S_g window with the diagonal lattice at each height.
    Lattices,
}

#[derive(Args, Debug)]
struct Opts {
    /// Odd prime.
    #[arg(long = "p", global = true, default_value_t = 3)]
    p: u32,
    /// Largest weight held in the η_R table.
    #[arg(long, global = true, default_value_t = 13)]
    max_weight: u64,
    /// Truncation heights, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    heights: Option<Vec<u32>>,
    /// Window length N for the lattice computations (default min(5, max weight)).
    #[arg(long = "N", global = true)]
    big_n: Option<u64>,
    /// Topological generator of the p-adic units (a primitive root mod p²).
    #[arg(long, global = true)]
    q: Option<u64>,
    /// Cache file path; otherwise $BPCENTRE_CACHE_DIR or the working directory.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// json, csv or markdown.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Generator caps `M,S` for Ψ^{p^s q^a}: a ≤ M, s ≤ S.
    #[arg(long, global = true)]
    caps: Option<String>,
    /// Unchanged rounds required before the S_g search stops.
    #[arg(long, global = true)]
    margin: Option<u64>,
}

impl Opts {
    fn config(&self) -> Result<RunConfig, Error> {
        let mut c = RunConfig::new(self.p)?;
        c.max_weight = self.max_weight;
        c.window = self.big_n.unwrap_or(c.window.min(self.max_weight));
        if let Some(h) = &self.heights {
            c.heights = h.clone();
        }
        if let Some(q) = self.q {
            c.q = q;
        }
        if let Some(m) = self.margin {
            c.margin = m;
        }
        if let Some(caps) = &self.caps {
            let parts: Vec<&str> = caps.split(',').collect();
            let parsed = match parts.as_slice() {
                [a, s] => a.trim().parse().ok().zip(s.trim().parse().ok()),
                _ => None,
            };
            c.caps = Some(parsed.ok_or_else(|| Error::Config(format!("--caps expects M,S, got {caps:?}")))?);
        }
        c.format = self.format.parse()?;
        c.cache = self.cache.clone();
        c.validate()?;
        Ok(c)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotOddPrime(_)
        | Error::Config(_)
        | Error::CacheMismatch(_)
        | Error::MalformedCache(_)
        | Error::Io(_)
        | Error::Json(_) => 2,
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let config = cli.opts.config()?;
    let suite = match &cli.command {
        Command::Verify { suite } => Some(suite.parse::<SuiteName>()?),
        _ => None,
    };
    let (table, info, status) = load_or_build(&config)?;
    let status = match status {
        CacheStatus::Hit => "cache hit",
        CacheStatus::Built => "cache built",
    };
    match &cli.command {
        Command::EtaTable => {
            println!("{status}: {} (sha256 {})", info.path, info.fingerprint);
            println!("p = {}, max weight = {}, {} entries", table.prime(), table.max_weight(), table.len());
            if table.max_weight() >= 1 {
                println!("η_R(v_1) = {}", table.eta_r_v(&ExponentSeq::generator(1, 1))?);
            }
            println!("weight  monomials  terms  max valuation");
            for w in table_summary(&table) {
                println!("{:>6}  {:>9}  {:>5}  {:>13}", w.weight, w.monomials, w.terms, w.max_valuation);
            }
            Ok(true)
        }
        Command::Verify { .. } => {
            let which = suite.expect("parsed above");
            eprintln!("{status}: {}", info.path);
            let report = run_verify(&config, &table, Some(info), which)?;
            print!("{}", report.render(config.format)?);
            for s in &report.suites {
                for c in s.failures() {
                    eprintln!("FAIL {}/{}: {}", s.name, c.id, c.witness);
                }
            }
            Ok(report.passed())
        }
        Command::Lattices => {
            eprintln!("{status}: {}", info.path);
            let report = run_lattices(&config, &table, Some(info))?;
            print!("{}", report.render(config.format)?);
            if let Some(l) = &report.lattices {
                for c in l.comparisons.iter().filter(|c| !c.inclusion) {
                    eprintln!(
                        "FAIL inclusion at N={}, n={}: S_g vector ({}) is not in the diagonal lattice",
                        c.big_n,
                        c.height,
                        c.witness.as_deref().unwrap_or_default().join(", ")
                    );
                }
            }
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
