//! The `weakseq` command line.
//!
//! Results go to stdout as JSON (CSV for `reproduce-tables`), progress and
//! diagnostics to stderr. Exit codes: 0 success, 1 negative or incomplete
//! result, 2 usage error, 3 resource limit.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::certify::{
    make_certificate, parse_certificates, reproduce_tables, table_certificates,
    verify_theorem_coverage, Certificate, KScope, Tier, Verdict,
};
use crate::error::{Error, Result};
use crate::poly::{
    coefficient, Algorithm, ExtractOptions, FactorDump, FactorSystem, FamilyKind, Monomial,
};
use crate::probabilistic::{
    estimate_collision_mean, estimate_failure_probability, exact_collision_mean,
    exact_failure_probability, EstimateReport, TrialConfig,
};
use crate::search::{
    backtracking_search, construct_t3, exhaustive_check, find_low_collision_ordering,
    greedy_prefix, ExhaustReport, GreedyOptions, SearchBudget, SearchOutcome, Variant,
};
use crate::zn::{classify_ordering, partial_sums, window_collisions, Modulus, Ordering, SubsetSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "weakseq", version, about = "Exact t-weak sequencing tools for subsets of Z_n")]
pub struct Cli {
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, global = true, env = "WEAKSEQ_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Memory cap for coefficient extraction, in bytes or with a K/M/G suffix.
    #[arg(long = "mem-cap", global = true, env = "WEAKSEQ_MEM_CAP", value_parser = parse_size, default_value = "8G")]
    pub mem_cap: u64,

    /// Indent JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an ordering for equal partial sums within distance t.
    Verify(VerifyArgs),
    /// Look for a t-weak sequencing of a set.
    Search(SearchArgs),
    /// Build a 3-weak sequencing of a set of size at least 4.
    #[command(name = "construct-t3")]
    ConstructT3(SetArgs),
    /// Search every k-subset of Z_n \ {0} for a t-weak sequencing.
    Exhaust(ExhaustArgs),
    /// Build a polynomial system and report its shape.
    Build(BuildArgs),
    /// Exact coefficient of a monomial in a polynomial system.
    Coeff(CoeffArgs),
    /// Compute a nonvanishing certificate.
    Certify(CertifyArgs),
    /// Check that a set of certificates covers every size k and prime p.
    Theorem(TheoremArgs),
    /// Recompute the certificate tables and compare with the stored values.
    #[command(name = "reproduce-tables")]
    ReproduceTables(TablesArgs),
    /// Estimate failure probabilities and collision counts of random orderings.
    Montecarlo(MonteCarloArgs),
}

#[derive(Debug, Args)]
pub struct SetArgs {
    /// Order of the cyclic group.
    #[arg(long)]
    pub n: u64,
    /// Comma separated residues, e.g. 1,2,5,-3.
    #[arg(long, allow_hyphen_values = true)]
    pub set: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub n: u64,
    /// The ordering, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub set: String,
    #[arg(long)]
    pub t: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Backtrack,
    Greedy,
    LowCollision,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long)]
    pub t: usize,
    #[arg(long, value_enum, default_value_t = Method::Backtrack)]
    pub method: Method,
    /// Node budget for the backtracking search.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Wall-clock limit for the backtracking search, in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Prefix length for the greedy method.
    #[arg(long)]
    pub h: Option<usize>,
    #[arg(long, default_value = "main")]
    pub variant: Variant,
    /// Greedy method: start with n/2 when it is in the set.
    #[arg(long)]
    pub involution_first: bool,
    /// Seed for the low-collision method.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    pub restarts: u64,
}

#[derive(Debug, Args)]
pub struct ExhaustArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub t: usize,
    /// Sizes to check: `a..b` (inclusive) or a single `k`.
    #[arg(long, value_parser = parse_k_range)]
    pub k: RangeInclusive<usize>,
    /// Node budget per subset.
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// One of F, P, Pbar, Q, Qbar, Htop, Hbartop.
    #[arg(long)]
    pub family: Option<FamilyKind>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub ell: Option<usize>,
}

impl FamilyArgs {
    fn system(&self) -> Result<FactorSystem> {
        let kind = self
            .family
            .ok_or_else(|| Error::precondition("--family is required"))?;
        FactorSystem::build(kind.with_params(self.k, self.t, self.ell)?)
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Write the factors as JSON `[{vars, coeffs}, ...]` to this file.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoeffArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Read the system from a factor dump instead of building a family.
    #[arg(long, conflicts_with = "family")]
    pub system: Option<PathBuf>,
    /// Exponents, comma separated.
    #[arg(long)]
    pub monomial: String,
    #[arg(long, default_value = "auto")]
    pub algorithm: Algorithm,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("scope").required(true).args(["k", "k_min"])))]
pub struct CertifyArgs {
    #[arg(long)]
    pub variant: Variant,
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub ell: usize,
    /// Certificate for this exact size.
    #[arg(long)]
    pub k: Option<usize>,
    /// Certificate for every size from this one on.
    #[arg(long)]
    pub k_min: Option<usize>,
    #[arg(long)]
    pub monomial: String,
    #[arg(long, default_value = "auto")]
    pub algorithm: Algorithm,
    /// Write the certificate to this file as a one-element JSON array.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// With --out, add to the certificates already in the file.
    #[arg(long, requires = "out")]
    pub append: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["certs", "builtin"])))]
pub struct TheoremArgs {
    #[arg(long)]
    pub variant: Variant,
    #[arg(long)]
    pub t: usize,
    /// Certificates, as a JSON array or one object per line.
    #[arg(long)]
    pub certs: Option<PathBuf>,
    /// Use the stored table values instead of a file.
    #[arg(long)]
    pub builtin: bool,
    /// Recompute every coefficient before trusting it.
    #[arg(long)]
    pub recompute: bool,
    #[arg(long, default_value = "auto")]
    pub algorithm: Algorithm,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[arg(long)]
    pub variant: Variant,
    #[arg(long)]
    pub t: usize,
    #[arg(long, default_value = "fast")]
    pub tier: Tier,
    /// Write the CSV here and print the JSON report on stdout instead.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the computed certificates to this file.
    #[arg(long)]
    pub certs_out: Option<PathBuf>,
    #[arg(long, default_value = "auto")]
    pub algorithm: Algorithm,
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    #[arg(long)]
    pub n: u64,
    /// Tuple length; taken from --set when that is given.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub t: usize,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, required_unless_present = "exact")]
    pub seed: Option<u64>,
    /// Estimate the collision mean over orderings of this set.
    #[arg(long, allow_hyphen_values = true)]
    pub set: Option<String>,
    /// Enumerate every outcome instead of sampling.
    #[arg(long)]
    pub exact: bool,
}

fn parse_size(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    let (digits, mult) = match s.chars().last() {
        Some('K' | 'k') => (&s[..s.len() - 1], 1u64 << 10),
        Some('M' | 'm') => (&s[..s.len() - 1], 1 << 20),
        Some('G' | 'g') => (&s[..s.len() - 1], 1 << 30),
        Some('T' | 't') => (&s[..s.len() - 1], 1 << 40),
        _ => (s, 1),
    };
    digits
        .trim()
        .parse::<u64>()
        .ok()
        .and_then(|v| v.checked_mul(mult))
        .ok_or_else(|| format!("invalid size {s:?}, expected bytes or a K/M/G/T suffix"))
}

fn parse_k_range(s: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let bad = || format!("invalid range {s:?}, expected a..b or k");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

/// What a subcommand produced.
struct Outcome {
    body: Body,
    code: i32,
}

enum Body {
    Json(serde_json::Value),
    Text(String),
}

impl Outcome {
    fn json(value: impl Serialize, code: i32) -> Result<Self> {
        Ok(Outcome {
            body: Body::Json(serde_json::to_value(value)?),
            code,
        })
    }
}

/// Exit code for an error that ended a command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ResourceLimit { .. } | Error::Unfactored(_) => EXIT_RESOURCE,
        Error::ZeroCoefficient
        | Error::InvalidCertificate(_)
        | Error::GreedyExhausted { .. }
        | Error::InternalInvariant { .. } => EXIT_NEGATIVE,
        _ => EXIT_USAGE,
    }
}

fn error_kind(code: i32) -> &'static str {
    match code {
        EXIT_NEGATIVE => "negative",
        EXIT_RESOURCE => "resource",
        _ => "usage",
    }
}

fn print_json(value: &serde_json::Value, pretty: bool) {
    let text = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .expect("JSON values always serialize");
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

/// Parse arguments, run the command, print the result and return the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                    EXIT_USAGE
                } else {
                    EXIT_OK
                };
            }
            let _ = e.print();
            print_json(
                &json!({"error": {"kind": "usage", "message": e.kind().to_string()}}),
                false,
            );
            return EXIT_USAGE;
        }
    };
    if cli.threads > 0 {
        // Fails only if a pool exists already, in which case it stays.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match dispatch(&cli) {
        Ok(Outcome { body, code }) => {
            match body {
                Body::Json(v) => print_json(&v, cli.pretty),
                Body::Text(s) => {
                    let _ = std::io::stdout().lock().write_all(s.as_bytes());
                }
            }
            code
        }
        Err(err) => {
            let code = exit_code(&err);
            eprintln!("error: {err}");
            print_json(
                &json!({"error": {"kind": error_kind(code), "message": err.to_string()}}),
                cli.pretty,
            );
            code
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let opts = |algorithm| ExtractOptions {
        algorithm,
        memory_cap: cli.mem_cap,
    };
    match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Search(a) => search(a),
        Command::ConstructT3(a) => construct(a),
        Command::Exhaust(a) => exhaust(a),
        Command::Build(a) => build(a),
        Command::Coeff(a) => coeff(a, opts(a.algorithm)),
        Command::Certify(a) => certify(a, opts(a.algorithm)),
        Command::Theorem(a) => theorem(a, opts(a.algorithm)),
        Command::ReproduceTables(a) => tables(a, opts(a.algorithm)),
        Command::Montecarlo(a) => montecarlo(a),
    }
}

fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let m = Modulus::new(a.n)?;
    let ordering = Ordering::parse(m, &a.set)?;
    let violations = crate::zn::t_weak_violations(&ordering, a.t)?;
    let code = if violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    Outcome::json(
        json!({
            "n": m.get(),
            "t": a.t,
            "ordering": ordering.sequence(),
            "partial_sums": partial_sums(&ordering).as_slice(),
            "class": classify_ordering(&ordering),
            "violations": violations,
        }),
        code,
    )
}

#[derive(Serialize)]
struct SearchReport {
    status: &'static str,
    method: &'static str,
    ordering: Option<Vec<u32>>,
    violations: Option<Vec<(usize, usize)>>,
    nodes_visited: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    restarts_used: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound_met: Option<bool>,
}

impl SearchReport {
    fn new(status: &'static str, method: &'static str) -> Self {
        SearchReport {
            status,
            method,
            ordering: None,
            violations: None,
            nodes_visited: None,
            seed: None,
            restarts_used: None,
            bound_met: None,
        }
    }

    fn with_ordering(mut self, ordering: &Ordering, t: usize) -> Self {
        let sums = partial_sums(ordering);
        self.violations = Some(window_collisions(&sums, t));
        self.ordering = Some(ordering.sequence().to_vec());
        self
    }
}

fn search(a: &SearchArgs) -> Result<Outcome> {
    let m = Modulus::new(a.set.n)?;
    let set = SubsetSpec::parse(m, &a.set.set)?;
    match a.method {
        Method::Backtrack => {
            let budget = SearchBudget {
                max_nodes: a.budget.unwrap_or(SearchBudget::default().max_nodes),
                time_limit: a.time_limit.map(Duration::from_secs_f64),
            };
            let outcome = backtracking_search(&set, a.t, budget)?;
            let mut report = SearchReport::new(outcome.status(), "backtrack");
            if let Some(o) = outcome.ordering() {
                report = report.with_ordering(o, a.t);
            }
            report.nodes_visited = Some(outcome.nodes());
            let code = match outcome {
                SearchOutcome::Found { .. } => EXIT_OK,
                SearchOutcome::NoneExists { .. } => EXIT_NEGATIVE,
                SearchOutcome::BudgetExhausted { .. } => EXIT_RESOURCE,
            };
            Outcome::json(report, code)
        }
        Method::Greedy => {
            let h = a
                .h
                .ok_or_else(|| Error::precondition("--method greedy needs --h"))?;
            let opts = GreedyOptions {
                variant: a.variant,
                involution_first: a.involution_first,
            };
            let prefix = greedy_prefix(&set, a.t, h, opts)?;
            Outcome::json(SearchReport::new("found", "greedy").with_ordering(&prefix, a.t), EXIT_OK)
        }
        Method::LowCollision => {
            let seed = a
                .seed
                .ok_or_else(|| Error::precondition("--method low-collision needs --seed"))?;
            let found = find_low_collision_ordering(&set, a.t, seed, a.restarts)?;
            let mut report = SearchReport::new(
                if found.violations == 0 { "found" } else { "partial" },
                "low-collision",
            )
            .with_ordering(&found.ordering, a.t);
            report.seed = Some(seed);
            report.restarts_used = Some(found.restarts_used);
            report.bound_met = Some(found.bound_met);
            let code = if found.bound_met { EXIT_OK } else { EXIT_NEGATIVE };
            Outcome::json(report, code)
        }
    }
}

fn construct(a: &SetArgs) -> Result<Outcome> {
    let m = Modulus::new(a.n)?;
    let set = SubsetSpec::parse(m, &a.set)?;
    let ordering = construct_t3(&set)?;
    let report = SearchReport::new("found", "construct-t3").with_ordering(&ordering, 3);
    Outcome::json(report, EXIT_OK)
}

fn exhaust(a: &ExhaustArgs) -> Result<Outcome> {
    let m = Modulus::new(a.n)?;
    let budget = SearchBudget::nodes(a.budget);
    let mut merged: Option<ExhaustReport> = None;
    for k in a.k.clone() {
        let started = Instant::now();
        let part = exhaustive_check(m, a.t, k..=k, budget)?;
        if let Some(s) = part.sizes.first() {
            eprintln!(
                "k = {k}: {} subsets, {} sequenceable, {} counterexamples, {} undecided ({:.1}s)",
                s.subsets,
                s.sequenceable,
                s.counterexamples,
                s.undecided,
                started.elapsed().as_secs_f64()
            );
        }
        match merged.as_mut() {
            None => merged = Some(part),
            Some(r) => {
                r.sizes.extend(part.sizes);
                r.counterexamples.extend(part.counterexamples);
                r.undecided.extend(part.undecided);
            }
        }
    }
    let mut report = merged.expect("a range has at least one size");
    report.k_range = (*a.k.start(), *a.k.end());
    let (status, code) = if !report.counterexamples.is_empty() {
        ("counterexample", EXIT_NEGATIVE)
    } else if !report.undecided.is_empty() {
        ("undecided", EXIT_RESOURCE)
    } else {
        ("all_sequenceable", EXIT_OK)
    };
    let mut value = serde_json::to_value(&report)?;
    value["status"] = json!(status);
    Outcome::json(value, code)
}

fn build(a: &BuildArgs) -> Result<Outcome> {
    let sys = a.family.system()?;
    if let Some(path) = &a.dump {
        fs::write(path, serde_json::to_string(&sys.dump())?)?;
        eprintln!("wrote {} factors to {}", sys.degree(), path.display());
    }
    Outcome::json(
        json!({
            "family": sys.family().map(|f| f.to_string()),
            "num_vars": sys.num_vars(),
            "degree": sys.degree(),
        }),
        EXIT_OK,
    )
}

fn coeff(a: &CoeffArgs, opts: ExtractOptions) -> Result<Outcome> {
    let monomial = Monomial::parse(&a.monomial)?;
    let sys = match &a.system {
        Some(path) => {
            let dump: Vec<FactorDump> = serde_json::from_str(&fs::read_to_string(path)?)?;
            FactorSystem::from_dump(monomial.len(), dump)?
        }
        None => a.family.system()?,
    };
    let started = Instant::now();
    let value = coefficient(&sys, &monomial, opts)?;
    eprintln!("coefficient computed in {:.2}s", started.elapsed().as_secs_f64());
    Outcome::json(
        json!({
            "family": sys.family().map(|f| f.to_string()),
            "monomial": monomial.exponents(),
            "degree": sys.degree(),
            "coefficient": value.to_string(),
        }),
        EXIT_OK,
    )
}

fn read_certificates(path: &Path) -> Result<Vec<Certificate>> {
    parse_certificates(&fs::read_to_string(path)?)
}

fn write_certificates(path: &Path, certs: &[Certificate]) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(certs)?)?;
    Ok(())
}

fn certify(a: &CertifyArgs, opts: ExtractOptions) -> Result<Outcome> {
    let scope = match (a.k, a.k_min) {
        (Some(k), None) => KScope::Exact(k),
        (None, Some(k)) => KScope::AtLeast(k),
        _ => return Err(Error::precondition("give exactly one of --k and --k-min")),
    };
    let monomial = Monomial::parse(&a.monomial)?;
    let started = Instant::now();
    let cert = make_certificate(a.variant, a.t, a.ell, scope, &monomial, opts)?;
    eprintln!("certificate computed in {:.2}s", started.elapsed().as_secs_f64());
    if let Some(path) = &a.out {
        let mut all = if a.append && path.exists() {
            read_certificates(path)?
        } else {
            Vec::new()
        };
        all.push(cert.clone());
        write_certificates(path, &all)?;
    }
    Outcome::json(cert, EXIT_OK)
}

fn theorem(a: &TheoremArgs, opts: ExtractOptions) -> Result<Outcome> {
    let certs = match &a.certs {
        Some(path) => read_certificates(path)?,
        None => table_certificates(a.variant, a.t)?,
    };
    if a.recompute {
        for (i, c) in certs.iter().enumerate() {
            let started = Instant::now();
            c.verify_with_recompute(opts)
                .map_err(|e| Error::InvalidCertificate(format!("certificate {i}: {e}")))?;
            eprintln!("certificate {i} recomputed in {:.2}s", started.elapsed().as_secs_f64());
        }
    }
    let report = verify_theorem_coverage(a.variant, a.t, &certs)?;
    for gap in &report.gaps {
        let to = gap.k_to.map_or("inf".to_string(), |k| k.to_string());
        eprintln!(
            "gap: k in [{}, {to}] is {:?}, open primes {:?}",
            gap.k_from, gap.status, gap.primes
        );
    }
    let code = match report.verdict {
        Verdict::Complete => EXIT_OK,
        Verdict::Incomplete => EXIT_NEGATIVE,
    };
    Outcome::json(report, code)
}

fn tables(a: &TablesArgs, opts: ExtractOptions) -> Result<Outcome> {
    eprintln!("reproducing ({}, t = {}) tables, {:?} tier", a.variant, a.t, a.tier);
    let rep = reproduce_tables(a.variant, a.t, a.tier, opts)?;
    for r in &rep.rows {
        let k = match r.k_scope {
            KScope::Exact(k) => k.to_string(),
            KScope::AtLeast(k) => format!(">={k}"),
        };
        let what = if r.coefficient.is_some() {
            format!("{:.2}s", r.seconds)
        } else {
            "degree only".to_string()
        };
        eprintln!("table {} k={k} ell={}: {what}", r.table, r.ell);
        for m in &r.mismatches {
            eprintln!(
                "  mismatch in {}: expected {}, got {}",
                m.field, m.expected, m.actual
            );
        }
    }
    if let Some(path) = &a.certs_out {
        write_certificates(path, &rep.certificates)?;
        eprintln!("wrote {} certificates to {}", rep.certificates.len(), path.display());
    }
    let code = if rep.all_match() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    match &a.csv {
        Some(path) => {
            fs::write(path, rep.to_csv())?;
            Outcome::json(&rep, code)
        }
        None => Ok(Outcome {
            body: Body::Text(rep.to_csv()),
            code,
        }),
    }
}

fn montecarlo(a: &MonteCarloArgs) -> Result<Outcome> {
    let m = Modulus::new(a.n)?;
    let report: EstimateReport = match &a.set {
        Some(list) => {
            let set = SubsetSpec::parse(m, list)?;
            if let Some(k) = a.k {
                if k != set.len() {
                    return Err(Error::precondition(format!(
                        "--k {k} disagrees with the set size {}",
                        set.len()
                    )));
                }
            }
            if a.exact {
                exact_collision_mean(&set, a.t)?
            } else {
                estimate_collision_mean(&set, a.t, a.trials, a.seed.expect("required by clap"))?
            }
        }
        None => {
            let k = a
                .k
                .ok_or_else(|| Error::precondition("give --k or --set"))?;
            if a.exact {
                exact_failure_probability(m.get(), k, a.t)?
            } else {
                estimate_failure_probability(&TrialConfig {
                    n: m.get(),
                    k,
                    t: a.t,
                    trials: a.trials,
                    seed: a.seed.expect("required by clap"),
                })?
            }
        }
    };
    let code = if report.bound_satisfied {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    Outcome::json(report, code)
}
