//! Command-line front end.
//!
//! Exit codes: 0 verified, 1 a mathematical check failed, 2 input or usage error.

mod certificate;

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use certificate::{Certificate, Format, Section, Status};

use crate::catalog::{self, ShapeOperatorSet};
use crate::curvature::{self, RiemannTensor};
use crate::sweep::{self, SweepVerdict};
use crate::tracealg::{self, TraceExpr};

/// Numeric sweeps pass when every coefficient deviates by less than this.
pub const NUMERIC_SWEEP_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 1000;
/// Largest generator count replayed by the full built-in suite.
pub const SUITE_G4_MAX_P: u32 = 10;

pub const EXIT_VERIFIED: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{0}")]
    Catalog(#[from] catalog::CatalogError),
    #[error("{0}")]
    Trace(#[from] tracealg::TraceError),
    #[error("cannot read '{path}': {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "willmore-cert",
    version,
    about = "Exact verification of Willmore, minimality, Einstein and spectral properties from shape operators"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Include a Unix timestamp in the certificate.
    #[arg(long, global = true)]
    timestamp: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepMode {
    Symbolic,
    Numeric,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the curvature and Willmore checks on a built-in name or a dataset file.
    Verify { dataset: String },
    /// Check that the characteristic polynomial of Σ t_α A_α is the same for every unit normal.
    Sweep {
        dataset: String,
        #[arg(long, value_enum)]
        mode: SweepMode,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reduce a trace goal modulo a set of trace relations.
    Tracecheck {
        /// Relation file, or `g4` for the built-in g = 4 hypotheses.
        #[arg(long)]
        rules: String,
        #[arg(long)]
        goal: String,
        /// Number of generators A1..Ap.
        #[arg(long)]
        indices: u32,
    },
    /// Reproduce every built-in computation (the default when no command is given).
    Paper,
}

/// Runs the CLI with explicit argument list and output streams; returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
                return EXIT_VERIFIED;
            }
            let _ = err.write_all(text.as_bytes());
            return EXIT_INPUT_ERROR;
        }
    };
    let result = match cli.command.unwrap_or(Command::Paper) {
        Command::Verify { dataset } => load_dataset(&dataset).map(|d| verify_certificate(&d)),
        Command::Sweep {
            dataset,
            mode,
            samples,
            seed,
        } => {
            if samples == 0 {
                Err(InputError::Usage("--samples must be at least 1".into()))
            } else {
                load_dataset(&dataset).map(|d| sweep_certificate(&d, mode, samples, seed))
            }
        }
        Command::Tracecheck {
            rules,
            goal,
            indices,
        } => tracecheck_certificate(&rules, &goal, indices),
        Command::Paper => Ok(suite_certificate()),
    };
    match result {
        Ok(mut cert) => {
            if cli.timestamp {
                cert.timestamp = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .ok()
                    .map(|d| d.as_secs());
            }
            let _ = out.write_all(cert.render(cli.format).as_bytes());
            if cert.verified() {
                EXIT_VERIFIED
            } else {
                let _ = writeln!(err, "failed checks: {}", cert.failed_sections().join(", "));
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}

/// A built-in dataset name, otherwise a path to a dataset file.
pub fn load_dataset(name_or_path: &str) -> Result<ShapeOperatorSet, InputError> {
    if catalog::BUILTIN_NAMES.contains(&name_or_path) {
        return Ok(catalog::builtin(name_or_path)?);
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(catalog::CatalogError::UnknownDataset(name_or_path.to_string()).into());
    }
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: name_or_path.to_string(),
        source,
    })?;
    Ok(catalog::parse_dataset(&text)?)
}

/// Curvature, Willmore and tensor-symmetry checks for one dataset.
pub fn verify_certificate(data: &ShapeOperatorSet) -> Certificate {
    let mut cert = Certificate::new(&data.name);
    for s in verify_sections(data) {
        cert.push(s);
    }
    cert.push(symbolic_sweep_section("sweep", data, Status::Info));
    cert
}

fn verify_sections(data: &ShapeOperatorSet) -> Vec<Section> {
    let (n, p) = (data.n(), data.p());
    let mut sections = Vec::new();

    let mut info = Section::new("dataset", Status::Info)
        .entry("name", &data.name)
        .entry("dim", n)
        .entry("codim", p)
        .entry("ambient", format!("S^{}", n + p));
    if let (Some(g), Some(m)) = (data.g_tag, data.m_tag) {
        info.push("g", g);
        info.push("m", m);
    }
    sections.push(info);

    let traces = curvature::operator_traces(data);
    let minimal = traces.iter().all(|t| t.is_zero());
    let mut s = Section::new("minimality", Status::from_bool(minimal));
    for (label, t) in data.labels().iter().zip(&traces) {
        s.push(format!("trace.{label}"), t);
    }
    sections.push(s);

    let s_value = curvature::square_norm_s(data);
    sections.push(
        Section::new("square_norm", Status::Info)
            .entry("S", &s_value)
            .entry(
                "constancy",
                "assumed (single-point data of a homogeneous submanifold)",
            ),
    );

    let tensor = RiemannTensor::assemble(data);
    let audit = tensor.audit_symmetries();
    let mut sym = Section::new("riemann_symmetries", Status::from_bool(audit.passed()))
        .entry("quadruples", audit.quadruples)
        .entry("violations", audit.violations);
    if let Some([i, j, k, l]) = audit.first_violation {
        sym.push(
            "first_violation",
            format!("({},{},{},{})", i + 1, j + 1, k + 1, l + 1),
        );
    }

    if !minimal {
        for name in [
            "ricci",
            "einstein",
            "willmore",
            "willmore_ricci_form",
            "willmore_consistency",
        ] {
            sections.push(
                Section::new(name, Status::Skipped).entry("reason", "dataset is not minimal"),
            );
        }
        sections.push(sym);
        return sections;
    }

    let ric = curvature::ricci(data).expect("minimal data");
    let scalar = ric.scalar_curvature();
    let expected_scalar = crate::exactnum::QuadExt::from_int((n * (n - 1)) as i64) - &s_value;
    let contraction_ok = tensor.contract() == ric.matrix;
    let mut rs = Section::new(
        "ricci",
        Status::from_bool(scalar == expected_scalar && contraction_ok),
    );
    for i in 0..n {
        let row: Vec<String> = ric.matrix.row(i).iter().map(ToString::to_string).collect();
        rs.push(format!("row.{}", i + 1), format!("[{}]", row.join(", ")));
    }
    rs.push("scalar_curvature", &scalar);
    rs.push("n(n-1)-S", &expected_scalar);
    rs.push("gauss_contraction_matches", contraction_ok);
    sections.push(rs);

    let einstein = curvature::einstein_check(&ric);
    sections.push(Section::new("einstein", Status::Info).entry(
        "constant",
        einstein.map_or_else(|| "absent".to_string(), |c| c.to_string()),
    ));

    let report = curvature::willmore_forms(data, &ric.matrix);
    let mut w = Section::new("willmore", Status::from_bool(report.willmore))
        .entry("hypothesis", "minimal with constant S");
    for (label, t) in data.labels().iter().zip(&report.per_normal_traces) {
        w.push(format!("tr_sumsq_times.{label}"), t);
    }
    sections.push(w);

    let mut wr = Section::new(
        "willmore_ricci_form",
        Status::from_bool(report.ricci_form_willmore),
    );
    for (label, t) in data.labels().iter().zip(&report.ricci_form_traces) {
        wr.push(format!("tr_ricci_times.{label}"), t);
    }
    sections.push(wr);

    let failure = curvature::consistency_failure(data, &report);
    let agree = report.willmore == report.ricci_form_willmore;
    let mut c = Section::new(
        "willmore_consistency",
        Status::from_bool(failure.is_none() && agree),
    )
    .entry("identity", "Tr(Ric*A) = (n-1)*Tr(A) - Tr(sum_sq*A)")
    .entry("verdicts_agree", agree);
    if let Some(a) = failure {
        c.push("first_failure", &data.labels()[a]);
    }
    sections.push(c);
    sections.push(sym);
    sections
}

fn symbolic_sweep_section(
    name: &str,
    data: &ShapeOperatorSet,
    status_if_constant: Status,
) -> Section {
    match sweep::symbolic_sweep(data) {
        SweepVerdict::Constant(cp) => Section::new(name, status_if_constant)
            .entry("mode", "symbolic")
            .entry("constant", cp),
        SweepVerdict::NonConstant { power, reduced } => {
            let status = if status_if_constant == Status::Info {
                Status::Info
            } else {
                Status::Fail
            };
            Section::new(name, status).entry("mode", "symbolic").entry(
                "non-constant",
                format!("coefficient of l^{power} reduces to {reduced}"),
            )
        }
    }
}

fn numeric_sweep_section(
    name: &str,
    data: &ShapeOperatorSet,
    samples: usize,
    seed: u64,
) -> Section {
    let dev = sweep::numeric_sweep(data, samples, seed);
    Section::new(name, Status::from_bool(dev < NUMERIC_SWEEP_TOLERANCE))
        .entry("mode", "numeric")
        .entry("samples", samples)
        .entry("seed", seed)
        .entry("max_deviation", format!("{dev:.3e}"))
        .entry("tolerance", format!("{NUMERIC_SWEEP_TOLERANCE:.0e}"))
}

pub fn sweep_certificate(
    data: &ShapeOperatorSet,
    mode: SweepMode,
    samples: usize,
    seed: u64,
) -> Certificate {
    let mut cert = Certificate::new(&data.name);
    cert.push(match mode {
        SweepMode::Symbolic => symbolic_sweep_section("sweep", data, Status::Pass),
        SweepMode::Numeric => numeric_sweep_section("sweep", data, samples, seed),
    });
    cert
}

/// Reduces `goal_text` modulo the relations in `rules` (`g4` or a file path).
pub fn tracecheck_certificate(
    rules: &str,
    goal_text: &str,
    p: u32,
) -> Result<Certificate, InputError> {
    if p == 0 {
        return Err(InputError::Usage("--indices must be at least 1".into()));
    }
    let (labels, relations): (Vec<String>, Vec<TraceExpr>) = if rules == "g4" {
        tracealg::g4_relations(p)?
            .into_iter()
            .map(|r| (r.label, r.expr))
            .unzip()
    } else {
        let text = std::fs::read_to_string(rules).map_err(|source| InputError::Io {
            path: rules.to_string(),
            source,
        })?;
        let rels = tracealg::parse_relations(&text)?;
        (
            (1..=rels.len()).map(|i| format!("rule[{i}]")).collect(),
            rels,
        )
    };
    let goal = tracealg::parse_trace_expr(goal_text)?;
    for (what, e) in std::iter::once(("goal", &goal)).chain(relations.iter().map(|r| ("rule", r))) {
        if let Some(k) = e.max_index().filter(|&k| k > p) {
            return Err(InputError::Usage(format!(
                "{what} references A{k} but --indices is {p}"
            )));
        }
    }
    let basis = tracealg::EchelonBasis::new(&relations);
    let reduction = basis.reduce(&goal);
    let mut s = Section::new("tracecheck", Status::from_bool(reduction.is_proved()))
        .entry("rules", rules)
        .entry("indices", p)
        .entry("relations", relations.len())
        .entry("rank", basis.rank())
        .entry("goal", &goal);
    for (i, step) in reduction.steps.iter().enumerate() {
        s.push(
            format!("step.{}", i + 1),
            format!(
                "eliminate Tr({}) with multiplier {} using row of {}",
                step.pivot, step.multiplier, labels[step.relation]
            ),
        );
    }
    s.push("residual", &reduction.residual);
    let mut cert = Certificate::new(format!("tracecheck p={p}"));
    cert.push(s);
    Ok(cert)
}

/// Every built-in dataset, both sweeps, and the g = 4 replay for `p = 1..=10`.
pub fn suite_certificate() -> Certificate {
    let mut cert = Certificate::new("builtin-suite");
    for data in catalog::builtins() {
        let name = data.name.clone();
        for mut s in verify_sections(&data) {
            s.name = format!("{name}.{}", s.name);
            cert.push(s);
        }
        cert.push(symbolic_sweep_section(
            &format!("{name}.sweep_symbolic"),
            &data,
            Status::Pass,
        ));
        cert.push(numeric_sweep_section(
            &format!("{name}.sweep_numeric"),
            &data,
            DEFAULT_SAMPLES,
            0,
        ));
    }
    for p in 1..=SUITE_G4_MAX_P {
        let section = match tracealg::verify_g4(p) {
            Ok(report) => {
                let mut s = Section::new(format!("g4.p{p}"), Status::from_bool(report.verdict))
                    .entry("relations", report.relations.len())
                    .entry("rank", report.rank);
                for g in &report.goals {
                    s.push(format!("goal.{}", g.alpha), &g.goal);
                    s.push(format!("steps.{}", g.alpha), g.reduction.steps.len());
                    s.push(format!("residual.{}", g.alpha), &g.reduction.residual);
                }
                s
            }
            Err(e) => Section::new(format!("g4.p{p}"), Status::Fail).entry("error", e),
        };
        cert.push(section);
    }
    cert
}
