//! Command-line front end.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chars::{
    format_complex, sl2_irr_table, t2_irr_table, verify_orthogonality, IrrTable,
    OrthogonalityReport,
};
use crate::cosets::{decomposability_suite, orbit_suite, DecompositionCase, DoubleCosetCheck};
use crate::error::Error;
use crate::ff::Fq;
use crate::jacquet::{
    verify_klingen, verify_siegel, Context, PsiSpec, SweepOptions, VerificationReport,
};
use crate::matgrp::{sp4_subgroup, Parabolic, SubgroupName};

pub const SUPPORTED_Q: [u32; 4] = [3, 5, 7, 11];
/// Samples per group in the sampled closure check.
const AXIOM_SAMPLES: usize = 200;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "sp4-jacquet",
    version,
    about = "Twisted Jacquet modules of Sp4(F_q): exhaustive verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run verification suites and emit a report.
    Verify(VerifyArgs),
    /// Dump the character tables of GL2, SL2, O2(C), T2(C) and L.
    Tables(CommonArgs),
    /// Dump double-coset representatives and sizes.
    Orbits(CommonArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Field size: one of 3, 5, 7, 11.
    #[arg(long, default_value_t = 3)]
    pub q: u32,
    /// γ in C = diag(γ, 0), a residue in [1, q).
    #[arg(long, default_value_t = 1)]
    pub gamma: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Allow the theorem suites at q = 11 (tens of seconds in a release build).
    #[arg(long)]
    pub deep: bool,
    /// Include wall-clock timings; the report is then no longer byte-reproducible.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Orbits,
    Decomposability,
    Tables,
    Siegel,
    Klingen,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Validated run parameters.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub q: u32,
    pub gamma: u8,
    pub suite: Suite,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub deep: bool,
    pub seed: u64,
    #[serde(skip)]
    pub timings: bool,
}

#[derive(Debug, PartialEq, Eq)]
pub struct UsageError(pub String);

impl RunConfig {
    pub fn new(
        common: &CommonArgs,
        suite: Suite,
        deep: bool,
        timings: bool,
    ) -> Result<Self, UsageError> {
        if !SUPPORTED_Q.contains(&common.q) {
            return Err(UsageError(format!(
                "--q {} is not supported; choose one of 3, 5, 7, 11",
                common.q
            )));
        }
        if common.gamma == 0 || common.gamma >= common.q {
            return Err(UsageError(format!("--gamma must lie in [1, {})", common.q)));
        }
        if common.q == 11 && !deep && matches!(suite, Suite::Siegel | Suite::Klingen) {
            return Err(UsageError(
                "theorem suites at q = 11 require --deep (roughly 10-20 s per γ in a release build)".into(),
            ));
        }
        Ok(RunConfig {
            q: common.q,
            gamma: common.gamma as u8,
            suite,
            format: common.format,
            out: common.out.clone(),
            deep,
            seed: common.seed,
            timings,
        })
    }

    fn runs(&self, s: Suite) -> bool {
        self.suite == s || self.suite == Suite::All
    }

    fn runs_theorems(&self) -> bool {
        self.q < 11 || self.deep
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    #[serde(flatten)]
    pub config: RunConfig,
    pub skipped: Vec<String>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub group: String,
    pub order: usize,
    pub samples: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitSection {
    pub double_cosets: Vec<DoubleCosetCheck>,
    pub group_axioms: Vec<AxiomCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableCertificate {
    pub group: String,
    pub order: usize,
    pub classes: usize,
    pub irreducibles: usize,
    pub orthogonality: OrthogonalityReport,
}

/// The `verify` report.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub meta: Meta,
    pub orbits: Option<OrbitSection>,
    pub decomposability: Option<Vec<DecompositionCase>>,
    pub tables: Option<Vec<TableCertificate>>,
    pub siegel: Vec<VerificationReport>,
    pub klingen: Vec<VerificationReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableDump {
    pub group: String,
    pub class_reps: Vec<String>,
    pub class_sizes: Vec<usize>,
    pub rows: Vec<TableRow>,
    pub orthogonality: OrthogonalityReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub label: String,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TablesReport {
    pub meta: Meta,
    pub tables: Vec<TableDump>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitsReport {
    pub meta: Meta,
    pub orbits: Vec<DoubleCosetCheck>,
}

fn meta(command: &'static str, config: &RunConfig) -> Meta {
    Meta {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        config: config.clone(),
        skipped: Vec::new(),
        pass: false,
        wall_time_ms: None,
    }
}

fn all_tables(fq: &Fq, ctx: &Context) -> (Vec<IrrTable<2>>, IrrTable<4>) {
    let g = &ctx.groups;
    (
        vec![
            ctx.gl2.clone(),
            sl2_irr_table(fq, &g.sl2),
            ctx.o2.clone(),
            t2_irr_table(fq, &g.t2),
        ],
        ctx.l.clone(),
    )
}

fn certificate<const N: usize>(t: &IrrTable<N>) -> TableCertificate {
    TableCertificate {
        group: t.group.clone(),
        order: t.classes.order(),
        classes: t.classes.num_classes(),
        irreducibles: t.rows.len(),
        orthogonality: verify_orthogonality(t),
    }
}

fn dump<const N: usize>(t: &IrrTable<N>) -> TableDump {
    TableDump {
        group: t.group.clone(),
        class_reps: t.classes.class_reps.iter().map(|r| r.hex()).collect(),
        class_sizes: t.classes.class_sizes.clone(),
        rows: t
            .rows
            .iter()
            .map(|(l, f)| TableRow {
                label: l.to_string(),
                values: f.values.iter().map(|v| format_complex(*v)).collect(),
            })
            .collect(),
        orthogonality: verify_orthogonality(t),
    }
}

fn group_axioms(fq: &Fq, gamma: u8, seed: u64) -> Vec<AxiomCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    [
        SubgroupName::Mpsi,
        SubgroupName::Spsi,
        SubgroupName::N,
        SubgroupName::U,
    ]
    .into_iter()
    .map(|name| {
        let g = sp4_subgroup(fq, name.clone(), gamma);
        AxiomCheck {
            group: name.to_string(),
            order: g.order(),
            samples: AXIOM_SAMPLES,
            pass: g.check_group_axioms_sampled(fq, AXIOM_SAMPLES, &mut rng),
        }
    })
    .collect()
}

/// Runs the selected verification suites.
pub fn run_verify(config: &RunConfig) -> Result<Report, Error> {
    let started = Instant::now();
    let fq = Fq::new(config.q)?;
    let mut m = meta("verify", config);
    let mut report = Report {
        meta: m.clone(),
        orbits: None,
        decomposability: None,
        tables: None,
        siegel: Vec::new(),
        klingen: Vec::new(),
    };
    if config.runs(Suite::Orbits) {
        report.orbits = Some(OrbitSection {
            double_cosets: orbit_suite(&fq, config.gamma)?,
            group_axioms: group_axioms(&fq, config.gamma, config.seed),
        });
    }
    if config.runs(Suite::Decomposability) {
        let mut cases = decomposability_suite(&fq, Parabolic::Siegel, config.gamma);
        cases.extend(decomposability_suite(&fq, Parabolic::Klingen, config.gamma));
        report.decomposability = Some(cases);
    }
    let theorems = config.runs(Suite::Siegel) || config.runs(Suite::Klingen);
    if theorems && !config.runs_theorems() {
        m.skipped
            .extend(["siegel".to_string(), "klingen".to_string()]);
    }
    let need_ctx = config.runs(Suite::Tables) || (theorems && config.runs_theorems());
    if need_ctx {
        if config.q == 11 {
            eprintln!("note: building character data at q = 11 takes a while");
        }
        let ctx = Context::new(config.q)?;
        if config.runs(Suite::Tables) {
            let (small, l) = all_tables(&fq, &ctx);
            let mut certs: Vec<_> = small.iter().map(certificate).collect();
            certs.push(certificate(&l));
            report.tables = Some(certs);
        }
        if config.runs_theorems() {
            let spec = PsiSpec::rank_one(&fq, config.gamma)?;
            let opts = SweepOptions {
                timings: config.timings,
            };
            if config.runs(Suite::Siegel) {
                report.siegel = verify_siegel(&ctx, &spec, opts)?;
            }
            if config.runs(Suite::Klingen) {
                report.klingen = verify_klingen(&ctx, &spec, opts)?;
            }
        }
    }
    m.pass = failures(&report).is_empty();
    if config.timings {
        m.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    report.meta = m;
    Ok(report)
}

/// Human-readable names of every failing check.
pub fn failures(r: &Report) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(o) = &r.orbits {
        for c in o.double_cosets.iter().filter(|c| !c.pass) {
            out.push(format!(
                "orbits: {} (count {}, expected {})",
                c.name, c.count, c.expected
            ));
        }
        for a in o.group_axioms.iter().filter(|a| !a.pass) {
            out.push(format!("orbits: group axioms of {}", a.group));
        }
    }
    if let Some(d) = &r.decomposability {
        for c in d.iter().filter(|c| !c.result.holds) {
            out.push(format!(
                "decomposability: {} {} {} (counterexample {})",
                c.parabolic,
                c.weyl,
                c.condition,
                c.result.counterexample.as_deref().unwrap_or("-")
            ));
        }
    }
    if let Some(t) = &r.tables {
        for c in t.iter().filter(|c| !c.orthogonality.ok) {
            out.push(format!("tables: {} orthogonality", c.group));
        }
    }
    for v in r.siegel.iter().chain(&r.klingen).filter(|v| !v.passed()) {
        out.push(format!("{}: {} [{}]", v.parabolic, v.inducing, v.case));
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn verdict(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

/// Flat `section,item,verdict,detail` rows.
fn verify_rows(r: &Report) -> Vec<[String; 4]> {
    let mut rows = Vec::new();
    if let Some(o) = &r.orbits {
        for c in &o.double_cosets {
            rows.push([
                "orbits".into(),
                c.name.clone(),
                verdict(c.pass).into(),
                format!(
                    "count={} expected={} matched={}",
                    c.count,
                    c.expected,
                    c.matched.join(";")
                ),
            ]);
        }
        for a in &o.group_axioms {
            rows.push([
                "group_axioms".into(),
                a.group.clone(),
                verdict(a.pass).into(),
                format!("order={} samples={}", a.order, a.samples),
            ]);
        }
    }
    if let Some(d) = &r.decomposability {
        for c in d {
            rows.push([
                "decomposability".into(),
                format!("{} {} {}", c.parabolic, c.weyl, c.condition),
                verdict(c.result.holds).into(),
                format!("lhs={} rhs={}", c.result.lhs_size, c.result.rhs_size),
            ]);
        }
    }
    if let Some(t) = &r.tables {
        for c in t {
            rows.push([
                "tables".into(),
                c.group.clone(),
                verdict(c.orthogonality.ok).into(),
                format!(
                    "order={} classes={} degree_sum={} max_row_error={:.1e} max_column_error={:.1e}",
                    c.order,
                    c.classes,
                    c.orthogonality.degree_sum,
                    c.orthogonality.max_row_error,
                    c.orthogonality.max_column_error
                ),
            ]);
        }
    }
    for v in r.siegel.iter().chain(&r.klingen) {
        rows.push([
            v.parabolic.to_string(),
            v.inducing.clone(),
            verdict(v.passed()).into(),
            format!(
                "case={} dim={}/{} summands={} max_err={:.1e}",
                v.case,
                v.computed_dimension,
                v.predicted_dimension,
                v.summands.join("+"),
                v.max_pointwise_error
            ),
        ]);
    }
    rows
}

pub fn render_verify(r: &Report, format: Format) -> String {
    match format {
        Format::Json => to_json(r),
        Format::Csv => {
            let mut s = String::from("section,item,verdict,detail\n");
            for row in verify_rows(r) {
                let cells: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
        Format::Text => {
            let m = &r.meta;
            let mut s = format!(
                "{} {} verify q={} gamma={} suite={:?}\n",
                m.tool, m.version, m.config.q, m.config.gamma, m.config.suite
            );
            for [sec, item, v, detail] in verify_rows(r) {
                let _ = writeln!(s, "{:<4} {sec:<16} {item:<40} {detail}", v.to_uppercase());
            }
            for k in &m.skipped {
                let _ = writeln!(s, "SKIP {k} (q = 11 theorem suites need --deep)");
            }
            let _ = writeln!(s, "overall: {}", verdict(m.pass).to_uppercase());
            s
        }
    }
}

pub fn run_tables(config: &RunConfig) -> Result<TablesReport, Error> {
    let fq = Fq::new(config.q)?;
    let ctx = Context::new(config.q)?;
    let (small, l) = all_tables(&fq, &ctx);
    let mut tables: Vec<TableDump> = small.iter().map(dump).collect();
    tables.push(dump(&l));
    let mut m = meta("tables", config);
    m.pass = tables.iter().all(|t| t.orthogonality.ok);
    Ok(TablesReport { meta: m, tables })
}

pub fn render_tables(r: &TablesReport, format: Format) -> String {
    match format {
        Format::Json => to_json(r),
        Format::Csv | Format::Text => {
            let mut s = String::new();
            for t in &r.tables {
                if format == Format::Text {
                    let _ = writeln!(
                        s,
                        "{} ({} classes, orthogonality {})",
                        t.group,
                        t.class_reps.len(),
                        verdict(t.orthogonality.ok)
                    );
                }
                let _ = writeln!(s, "group,label,{}", t.class_reps.join(","));
                let _ = writeln!(
                    s,
                    "{},class_size,{}",
                    t.group,
                    t.class_sizes
                        .iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                );
                for row in &t.rows {
                    let _ = writeln!(
                        s,
                        "{},{},{}",
                        t.group,
                        csv_field(&row.label),
                        row.values.join(",")
                    );
                }
                s.push('\n');
            }
            s
        }
    }
}

pub fn run_orbits(config: &RunConfig) -> Result<OrbitsReport, Error> {
    let fq = Fq::new(config.q)?;
    let orbits = orbit_suite(&fq, config.gamma)?;
    let mut m = meta("orbits", config);
    m.pass = orbits.iter().all(|c| c.pass);
    Ok(OrbitsReport { meta: m, orbits })
}

pub fn render_orbits(r: &OrbitsReport, format: Format) -> String {
    match format {
        Format::Json => to_json(r),
        Format::Csv | Format::Text => {
            let mut s = String::from("double_coset,index,representative,matched,size\n");
            for c in &r.orbits {
                for i in 0..c.count {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{}",
                        csv_field(&c.name),
                        i,
                        c.representatives[i],
                        csv_field(&c.matched[i]),
                        c.sizes[i]
                    );
                }
            }
            s
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// Writes `contents` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn emit(config: &RunConfig, body: &str) -> Result<(), String> {
    match &config.out {
        Some(p) => write_atomic(p, body).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

/// Executes a parsed command line and returns the exit code.
pub fn run(cli: Cli) -> i32 {
    let (config, command) = match &cli.command {
        Command::Verify(a) => (
            RunConfig::new(&a.common, a.suite, a.deep, a.timings),
            "verify",
        ),
        Command::Tables(c) => (RunConfig::new(c, Suite::Tables, false, false), "tables"),
        Command::Orbits(c) => (RunConfig::new(c, Suite::Orbits, false, false), "orbits"),
    };
    let config = match config {
        Ok(c) => c,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let outcome = match command {
        "verify" => run_verify(&config).map(|r| {
            for f in failures(&r) {
                eprintln!("FAIL {f}");
            }
            (render_verify(&r, config.format), r.meta.pass)
        }),
        "tables" => run_tables(&config).map(|r| (render_tables(&r, config.format), r.meta.pass)),
        _ => run_orbits(&config).map(|r| (render_orbits(&r, config.format), r.meta.pass)),
    };
    match outcome {
        Ok((body, pass)) => {
            if let Err(e) = emit(&config, &body) {
                eprintln!("error: {e}");
                return EXIT_FAIL;
            }
            if pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAIL
        }
    }
}
