//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage error, 3 a verification failed,
//! 4 the request exceeds the configured resource limits, 1 anything else
//! (I/O and the like).
//!
//! Cache directory precedence: `--cache-dir`, then `KNOTPI_CACHE`, else no
//! cache. Only the mathematical parameters are echoed into reports, so the
//! output does not depend on caching, thread count or output format.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::cache::Cache;
use crate::chi::ChiAlgebra;
use crate::conf::check_homology_identities;
use crate::cosimplicial::{formality_collapse_check, SpectralSequencePage};
use crate::error::{Error, Result};
use crate::pipeline::{
    chi_cosimplicial, compare_pi_table, e2_page, homology_cosimplicial, homology_side_e2,
    homotopy_e1, knot_pi_table, Limits,
};
use crate::quillen::verify_quasi_iso;
use crate::report::{read_csv, Cell, Format, Report};

pub const CACHE_ENV: &str = "KNOTPI_CACHE";

#[derive(Parser, Debug, Clone)]
#[command(
    name = "knotpi",
    version,
    about = "Exact rational computations for spaces of long knots"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Cache directory (overrides KNOTPI_CACHE).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = Limits::default().max_weight)]
    pub weight_limit: usize,
    #[arg(long, global = true, default_value_t = Limits::default().max_level)]
    pub level_limit: usize,
    /// Include basis labels in the report.
    #[arg(long, global = true)]
    pub labels: bool,
    /// Include wall-clock time (makes output nondeterministic).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Dimensions (and bases) of χ(n) in weights 1..=weight.
    Chi {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        weight: usize,
    },
    /// Homotopy-side E¹ page.
    E1 {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p_max: usize,
        #[arg(long)]
        weight: usize,
    },
    /// Homotopy-side E² page.
    E2 {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p_max: usize,
        #[arg(long)]
        weight: usize,
    },
    /// dim π_m(long knots mod immersions) ⊗ ℚ for 1 <= m <= m_max.
    PiTable {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m_max: usize,
        /// Externally supplied table (csv with columns m, dim) to compare against.
        #[arg(long)]
        expect: Option<PathBuf>,
    },
    /// φⁿ: chain map, naturality and quasi-isomorphism up to bracket length `weight`.
    VerifyPhi {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        weight: usize,
    },
    /// Cosimplicial identities for χ(•) (weights 1..=weight) and H(K(•))
    /// (word lengths 1..=weight), levels 0..=n.
    VerifyCosimplicial {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        weight: usize,
    },
    /// E³, E⁴ against E² on stable entries, both sides.
    CollapseCheck {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p_max: usize,
        #[arg(long)]
        weight: usize,
    },
    /// Homology-side E² from H₊(K(•)) in word lengths 1..=weight.
    HomologyE2 {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p_max: usize,
        #[arg(long)]
        weight: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Chi { .. } => "chi",
            Command::E1 { .. } => "e1",
            Command::E2 { .. } => "e2",
            Command::PiTable { .. } => "pi-table",
            Command::VerifyPhi { .. } => "verify-phi",
            Command::VerifyCosimplicial { .. } => "verify-cosimplicial",
            Command::CollapseCheck { .. } => "collapse-check",
            Command::HomologyE2 { .. } => "homology-e2",
        }
    }

    fn params(&self) -> BTreeMap<String, String> {
        let pairs: Vec<(&str, usize)> = match *self {
            Command::Chi { n, d, weight }
            | Command::VerifyPhi { n, d, weight }
            | Command::VerifyCosimplicial { n, d, weight } => {
                vec![("n", n), ("d", d), ("weight", weight)]
            }
            Command::E1 { d, p_max, weight }
            | Command::E2 { d, p_max, weight }
            | Command::CollapseCheck { d, p_max, weight }
            | Command::HomologyE2 { d, p_max, weight } => {
                vec![("d", d), ("p_max", p_max), ("weight", weight)]
            }
            Command::PiTable { d, m_max, .. } => vec![("d", d), ("m_max", m_max)],
        };
        pairs
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    fn d(&self) -> usize {
        match *self {
            Command::Chi { d, .. }
            | Command::E1 { d, .. }
            | Command::E2 { d, .. }
            | Command::PiTable { d, .. }
            | Command::VerifyPhi { d, .. }
            | Command::VerifyCosimplicial { d, .. }
            | Command::CollapseCheck { d, .. }
            | Command::HomologyE2 { d, .. } => d,
        }
    }
}

fn usage(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

/// Range checks done before any computation.
pub fn validate(cmd: &Command, limits: Limits) -> Result<()> {
    let d = cmd.d();
    let min_d = match cmd {
        Command::Chi { .. } | Command::VerifyPhi { .. } | Command::VerifyCosimplicial { .. } => 3,
        _ => 4,
    };
    if d < min_d {
        return Err(usage(if min_d == 4 {
            format!(
                "d = {d}: the spectral sequence for long knots is only considered for d >= 4 \
                 (it collapses at E² and converges when d >= 4)"
            )
        } else {
            format!("d = {d}: χ(n) needs d >= 3")
        }));
    }
    let guard = |what: &str, got: usize, max: usize| -> Result<()> {
        if got > max {
            Err(Error::ResourceGuard(format!(
                "{what} = {got} exceeds the limit {max} (raise it with --{what}-limit)"
            )))
        } else {
            Ok(())
        }
    };
    match *cmd {
        Command::Chi { n, weight, .. }
        | Command::VerifyPhi { n, weight, .. }
        | Command::VerifyCosimplicial { n, weight, .. } => {
            if weight == 0 {
                return Err(usage("weight must be at least 1".into()));
            }
            guard("level", n, limits.max_level)?;
            guard("weight", weight, limits.max_weight)?;
        }
        Command::E1 { p_max, weight, .. }
        | Command::E2 { p_max, weight, .. }
        | Command::CollapseCheck { p_max, weight, .. }
        | Command::HomologyE2 { p_max, weight, .. } => {
            if weight == 0 {
                return Err(usage("weight must be at least 1".into()));
            }
            guard("level", p_max, limits.max_level)?;
            guard("weight", weight, limits.max_weight)?;
        }
        Command::PiTable { m_max, .. } => {
            if m_max == 0 {
                return Err(usage("m-max must be at least 1".into()));
            }
        }
    }
    Ok(())
}

/// Reads an `m,dim` csv (extra columns ignored).
fn read_expected_table(path: &std::path::Path) -> Result<BTreeMap<i64, usize>> {
    let text = std::fs::read_to_string(path)?;
    let (cols, rows) = read_csv(&text)?;
    let col = |name: &str| {
        cols.iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Parse(format!("{}: no column {name}", path.display())))
    };
    let (im, id) = (col("m")?, col("dim")?);
    rows.iter()
        .map(|row| match (&row[im], &row[id]) {
            (Cell::Int(m), Cell::Int(dim)) if *dim >= 0 => Ok((*m, *dim as usize)),
            _ => Err(Error::Parse(format!("{}: bad row {row:?}", path.display()))),
        })
        .collect()
}

fn page_report(report: &mut Report, page: &SpectralSequencePage, labels: bool) {
    for e in page.entries.iter().filter(|e| e.dim > 0) {
        report.push_row(vec![
            e.s.into(),
            e.p().into(),
            e.q.into(),
            (e.q - e.s as i64).into(),
            e.dim.into(),
            e.stable.into(),
        ]);
        if labels {
            report
                .labels
                .insert(format!("E{}[{},{}]", page.r, e.p(), e.q), e.labels.clone());
        }
    }
    report.notes.push(format!(
        "E{} page truncated at level {}; columns s = -p >= 0, total degree m = q + p; \
         entries with stable = false may still change with more levels",
        page.r, page.truncation
    ));
}

const PAGE_COLUMNS: [&str; 6] = ["s", "p", "q", "m", "dim", "stable"];

/// Runs a parsed command and builds its report.
pub fn execute(cmd: &Command, common: &Common, cache: Option<Cache>) -> Result<Report> {
    let limits = Limits {
        max_weight: common.weight_limit,
        max_level: common.level_limit,
    };
    validate(cmd, limits)?;
    let start = Instant::now();
    let chi = ChiAlgebra::with_cache(cmd.d(), cache)?;
    let params = cmd.params();
    let name = cmd.name();
    let mut report = match *cmd {
        Command::Chi { n, d, weight } => {
            let mut r = Report::new(name, params, &["n", "weight", "degree", "dim"]);
            for w in 1..=weight {
                let c = chi.component(n, w)?;
                r.push_row(vec![
                    n.into(),
                    w.into(),
                    (w * (d - 2)).into(),
                    c.dim().into(),
                ]);
                if common.labels {
                    r.labels.insert(format!("weight {w}"), c.labels().to_vec());
                }
            }
            r
        }
        Command::E1 { p_max, weight, .. } => {
            let mut r = Report::new(name, params, &PAGE_COLUMNS);
            let e1 = homotopy_e1(&chi, p_max, weight)?;
            page_report(&mut r, &e1.page, common.labels);
            r
        }
        Command::E2 { p_max, weight, .. } => {
            let mut r = Report::new(name, params, &PAGE_COLUMNS);
            let e1 = homotopy_e1(&chi, p_max, weight)?;
            page_report(&mut r, &e2_page(&e1)?, common.labels);
            r
        }
        Command::HomologyE2 { d, p_max, weight } => {
            let mut r = Report::new(name, params, &PAGE_COLUMNS);
            page_report(
                &mut r,
                &homology_side_e2(d, p_max, weight * (d - 1))?,
                common.labels,
            );
            r
        }
        Command::PiTable {
            m_max, ref expect, ..
        } => {
            let mut r = Report::new(name, params, &["m", "dim", "complete"]);
            let expected = expect.as_deref().map(read_expected_table).transpose()?;
            let t = knot_pi_table(&chi, m_max, limits)?;
            for row in &t.rows {
                r.push_row(vec![row.m.into(), row.dim.into(), row.complete.into()]);
                let bideg: Vec<String> = row
                    .bidegrees
                    .iter()
                    .map(|b| format!("E2[{},{}] dim {}", b.p, b.q, b.dim))
                    .collect();
                if !bideg.is_empty() {
                    r.labels.insert(format!("m={}", row.m), bideg);
                }
            }
            for s in &t.support {
                r.check(
                    format!(
                        "weight {} normalized columns vanish beyond p = {} (levels <= {}; dims {:?})",
                        s.weight,
                        s.weight + 1,
                        s.max_level,
                        s.column_dims
                    ),
                    s.holds,
                );
            }
            if let Some(expected) = expected {
                let mismatches = compare_pi_table(&t, &expected);
                for mm in &mismatches {
                    let got = mm
                        .computed
                        .map_or("not computed".to_string(), |x| x.to_string());
                    r.check(
                        format!(
                            "supplied table at m = {}: expected {}, got {got}",
                            mm.m, mm.expected
                        ),
                        false,
                    );
                }
                r.check(
                    format!("supplied table agrees on {} rows", expected.len()),
                    mismatches.is_empty(),
                );
            }
            r.notes.push(format!(
                "weights 1..={}, levels 0..={}; m = q + p with p <= 0",
                t.weight_max, t.p_max
            ));
            r
        }
        Command::VerifyPhi { n, weight, .. } => {
            let mut r = Report::new(
                name,
                params,
                &[
                    "length",
                    "brackets",
                    "degree",
                    "homology_dim",
                    "chi_dim",
                    "phi_rank",
                    "pass",
                ],
            );
            let q = verify_quasi_iso(&chi, n, weight)?;
            for e in &q.entries {
                r.push_row(vec![
                    e.length.into(),
                    e.brackets.into(),
                    e.degree.into(),
                    e.homology_dim.into(),
                    e.chi_dim.into(),
                    e.phi_rank.into(),
                    e.pass.into(),
                ]);
            }
            r.check("phi is a chain map", q.chain_map);
            for e in &q.entries {
                r.check(
                    format!(
                        "H(phi) iso in length {} bracket length {}",
                        e.length, e.brackets
                    ),
                    e.pass,
                );
            }
            for c in &q.naturality {
                r.check(
                    format!("phi natural for {} in length {}", c.map, c.length),
                    c.pass,
                );
            }
            r
        }
        Command::VerifyCosimplicial { n, d, weight } => {
            let mut r = Report::new(name, params, &["side", "grade", "identities", "failures"]);
            for w in 1..=weight {
                let checks = chi.check_cosimplicial_identities(n, w)?;
                let failures = checks.iter().filter(|c| !c.holds).count();
                r.push_row(vec![
                    "chi".into(),
                    w.into(),
                    checks.len().into(),
                    failures.into(),
                ]);
                for c in checks.iter().filter(|c| !c.holds) {
                    r.check(format!("chi weight {w}: {}", c.name), false);
                }
                r.check(format!("chi weight {w}: all identities"), failures == 0);
            }
            for k in 1..=weight {
                let checks = check_homology_identities(n, k, d)?;
                let failures = checks.iter().filter(|c| !c.1).count();
                r.push_row(vec![
                    "homology".into(),
                    (k * (d - 1)).into(),
                    checks.len().into(),
                    failures.into(),
                ]);
                for (nm, _) in checks.iter().filter(|c| !c.1) {
                    r.check(format!("homology degree {}: {nm}", k * (d - 1)), false);
                }
                r.check(
                    format!("homology degree {}: all identities", k * (d - 1)),
                    failures == 0,
                );
            }
            r
        }
        Command::CollapseCheck { d, p_max, weight } => {
            let mut r = Report::new(
                name,
                params,
                &["side", "s", "q", "r", "dim_r", "dim_2", "stable"],
            );
            let sides = [
                ("chi", chi_cosimplicial(&chi, p_max, weight)?),
                (
                    "homology",
                    homology_cosimplicial(d, p_max, weight * (d - 1))?,
                ),
            ];
            for (side, v) in &sides {
                let c = formality_collapse_check(v, 4)?;
                for e in c.entries.iter().filter(|e| e.dim_r > 0 || e.dim_2 > 0) {
                    r.push_row(vec![
                        (*side).into(),
                        e.s.into(),
                        e.q.into(),
                        e.r.into(),
                        e.dim_r.into(),
                        e.dim_2.into(),
                        e.stable.into(),
                    ]);
                }
                r.check(format!("{side}: E3 = E4 = E2 on stable entries"), c.passed);
            }
            r
        }
    };
    if common.timing {
        report.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) | Error::Parse(_) => 2,
        Error::Verification(_) => 3,
        Error::ResourceGuard(_) => 4,
        _ => 1,
    }
}

/// Full CLI behaviour minus the process exit, for embedding and tests.
/// `env_cache` is the value of `KNOTPI_CACHE`, if any.
pub fn run<I, T>(argv: I, env_cache: Option<PathBuf>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let fail = |e: Error| Outcome {
        code: exit_code(&e),
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    };
    let cache = match cli.common.cache_dir.clone().or(env_cache) {
        Some(dir) => match Cache::new(dir) {
            Ok(c) => Some(c),
            Err(e) => return fail(e),
        },
        None => None,
    };
    let result = match cli.common.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(&cli.command, &cli.common, cache)),
            Err(e) => Err(Error::InvalidParameter(format!("thread pool: {e}"))),
        },
        None => execute(&cli.command, &cli.common, cache),
    };
    match result {
        Ok(report) => {
            let passed = report.passed();
            Outcome {
                code: if passed { 0 } else { 3 },
                stdout: report.emit(cli.common.format),
                stderr: if passed {
                    String::new()
                } else {
                    "error: verification failed\n".into()
                },
            }
        }
        Err(e) => fail(e),
    }
}
