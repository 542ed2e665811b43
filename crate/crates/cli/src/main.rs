mod certify;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gess_core::bell::{
    self, classical_bound, family_stabilizer, max_eigenvalue, quantum_value_on_subspace, sos_recipe, verify_sos,
    BellExpression, DEFAULT_BRUTE_LIMIT,
};
use gess_core::constructions::{construction2_generators, ghz_generators, h_operators, max_generators};
use gess_core::error::{Category, Error};
use gess_core::faces::{default_g_label, face_analysis};
use gess_core::gme::{summarize, DEFAULT_ORACLE_LIMIT};
use gess_core::pauli::{format_text, parse_any};
use gess_core::random::{random_observables, rng_from_seed};
use gess_core::selftest::canonical_pipeline;
use gess_core::stabilizer::{validate, StabilizerSet, DEFAULT_DENSE_LIMIT};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "gess", version, about = "Genuinely entangled stabilizer subspaces and their Bell inequalities")]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug, Serialize)]
pub struct RunConfig {
    /// Largest qubit count for dense matrix work.
    #[arg(long, global = true, default_value_t = DEFAULT_DENSE_LIMIT, value_parser = positive)]
    pub dense_limit: usize,
    /// Largest party count for the exhaustive classical bound.
    #[arg(long, global = true, default_value_t = DEFAULT_BRUTE_LIMIT, value_parser = positive)]
    pub brute_limit: usize,
    /// Random observable sets drawn for sum-of-squares checks.
    #[arg(long, global = true, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, global = true, default_value_t = 2024)]
    pub seed: u64,
    /// Absolute tolerance for quantum values and residuals.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a generator file and decide whether its subspace is GME.
    CheckGme {
        path: Option<PathBuf>,
        #[arg(long = "file")]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
        oracle_limit: usize,
        /// Exit with the validation code when the subspace is not GME.
        #[arg(long)]
        require_gme: bool,
    },
    /// Print a generator family in the text format.
    Construct {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        cyclic: bool,
    },
    #[command(subcommand)]
    Bell(BellCommand),
    #[command(subcommand)]
    Selftest(SelftestCommand),
    /// Signed states, their behaviours and the face dimension.
    Faces {
        #[arg(long)]
        n: usize,
        /// One-based generator used as the extra correlator label.
        #[arg(long)]
        g_label: Option<usize>,
    },
    /// Full pipeline for the maximal family, emitting a certificate.
    Certify {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Kind {
    Ghz,
    C2,
    Max,
    H,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FamilyArg {
    Max,
    Cyclic,
    Chsh,
}

impl From<FamilyArg> for bell::Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Max => bell::Family::Max,
            FamilyArg::Cyclic => bell::Family::Cyclic,
            FamilyArg::Chsh => bell::Family::Chsh,
        }
    }
}

#[derive(Args, Debug)]
struct ExprSource {
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long)]
    n: Option<usize>,
    /// Bell expression JSON as written by `bell synth`.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum BellCommand {
    /// Write a family member as JSON.
    Synth {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Exhaustive local deterministic bound.
    Classical(ExprSource),
    /// Largest eigenvalue with canonical observables, plus the subspace range for families.
    Quantum(ExprSource),
    /// Sum-of-squares identity on random observables.
    Sos {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: Option<usize>,
        /// Local dimension of the random observables (even).
        #[arg(long, default_value_t = 2)]
        local_dim: usize,
    },
}

#[derive(Subcommand, Debug)]
enum SelftestCommand {
    /// Canonical observables against every codeword of the maximal family.
    Verify {
        #[arg(long)]
        n: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.category() {
            Category::Validation => 2,
            Category::BoundMismatch => 3,
            Category::ResourceLimit => 4,
            Category::Io => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

type CliResult = std::result::Result<(), Failure>;

/// Stdout write that tolerates a closed pipe.
fn out(s: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn emit<T: Serialize>(cfg: &RunConfig, value: &T, text: impl FnOnce() -> String) {
    if cfg.json {
        out(&format!("{}\n", serde_json::to_string_pretty(value).expect("serializable report")));
    } else {
        out(&text());
    }
}

fn read_file(path: &PathBuf) -> Result<String, Error> {
    Ok(std::fs::read_to_string(path)?)
}

fn family_n(family: FamilyArg, n: Option<usize>) -> Result<usize, Error> {
    match (family, n) {
        (FamilyArg::Chsh, None) => Ok(2),
        (_, Some(n)) => Ok(n),
        (_, None) => Err(Error::Precondition("--n is required for this family".into())),
    }
}

fn load_expr(src: &ExprSource) -> Result<(BellExpression, Option<StabilizerSet>), Error> {
    match (&src.file, src.family) {
        (Some(path), None) => Ok((serde_json::from_str(&read_file(path)?)?, None)),
        (None, Some(f)) => {
            let n = family_n(f, src.n)?;
            let (set, _) = family_stabilizer(f.into(), n)?;
            Ok((bell::synth(f.into(), n)?, Some(set)))
        }
        _ => Err(Error::Precondition("give exactly one of --family or --file".into())),
    }
}

fn check_gme(cfg: &RunConfig, path: Option<PathBuf>, file: Option<PathBuf>, limit: usize, require: bool) -> CliResult {
    let path = path.or(file).ok_or_else(|| Error::Precondition("no generator file given".into()))?;
    let ops = parse_any(&read_file(&path)?)?;
    let set = StabilizerSet::from_ops(ops)?;
    let report = validate(&set)?;
    if !report.is_valid() {
        emit(cfg, &report, || format!("invalid stabilizer: {report:?}\n"));
        return Err(Error::InvalidStabilizer(format!("{} is not a valid stabilizer", path.display())).into());
    }
    let summary = summarize(&set, limit)?;
    let gme = summary.rank_criterion;
    #[derive(Serialize)]
    struct Out<'a> {
        validation: &'a gess_core::stabilizer::ValidationReport,
        gme: &'a gess_core::gme::GmeSummary,
    }
    emit(cfg, &Out { validation: &report, gme: &summary }, || {
        let mut s = String::new();
        let dim = report.subspace_dim_log2.map_or("?".to_string(), |d| format!("2^{d}"));
        writeln!(s, "N={} k={} independent={} dim={dim}", summary.n, summary.k, report.independent).unwrap();
        writeln!(s, "dim K(S) = {} (GME needs {})", summary.dim_k, summary.n.saturating_sub(1)).unwrap();
        let oracle = summary.oracle.map_or("skipped".to_string(), |o| o.to_string());
        writeln!(s, "rank criterion: {}  bipartition oracle: {oracle}", summary.rank_criterion).unwrap();
        writeln!(s, "{}", if gme { "GME" } else { "not GME" }).unwrap();
        s
    });
    if summary.oracle.is_some_and(|o| o != gme) {
        return Err(Error::Precondition("rank criterion and oracle disagree".into()).into());
    }
    if require && !gme {
        return Err(Failure { code: 2, message: "subspace is not GME".into() });
    }
    Ok(())
}

fn construct(kind: Kind, n: usize, cyclic: bool) -> CliResult {
    let ops = match kind {
        Kind::Ghz => ghz_generators(n)?.generators().to_vec(),
        Kind::C2 => construction2_generators(n, cyclic)?.generators().to_vec(),
        Kind::Max => max_generators(n)?.generators().to_vec(),
        Kind::H => h_operators(n)?,
    };
    out(&format_text(&ops));
    Ok(())
}

fn bell_cmd(cfg: &RunConfig, cmd: BellCommand) -> CliResult {
    match cmd {
        BellCommand::Synth { family, n } => {
            let e = bell::synth(family.into(), family_n(family, n)?)?;
            out(&format!("{}\n", serde_json::to_string_pretty(&e).expect("serializable expression")));
            Ok(())
        }
        BellCommand::Classical(src) => {
            let (e, _) = load_expr(&src)?;
            let r = classical_bound(&e, cfg.brute_limit)?;
            emit(cfg, &r, || format!("classical bound {} ({:.12})\nwitness {:?}\n", r.value, r.value_f64, r.witness));
            match e.classical_bound() {
                Some(claimed) if claimed != r.value => {
                    Err(Error::BoundMismatch { stage: "classical bound".into(), expected: claimed.to_f64(), actual: r.value_f64 }
                        .into())
                }
                _ => Ok(()),
            }
        }
        BellCommand::Quantum(src) => {
            let (e, set) = load_expr(&src)?;
            let obs = bell::canonical_observables(e.n_parties());
            let top = max_eigenvalue(&e, &obs, cfg.dense_limit)?;
            let range = set.as_ref().map(|s| quantum_value_on_subspace(&e, s, cfg.dense_limit)).transpose()?;
            #[derive(Serialize)]
            struct Out {
                max_eigenvalue: f64,
                subspace_range: Option<(f64, f64)>,
                quantum_bound: Option<f64>,
            }
            let qb = e.quantum_bound().map(|q| q.to_f64());
            emit(cfg, &Out { max_eigenvalue: top, subspace_range: range, quantum_bound: qb }, || {
                let mut s = format!("max eigenvalue (canonical observables) {top:.12}\n");
                if let Some((lo, hi)) = range {
                    writeln!(s, "subspace values in [{lo:.12}, {hi:.12}]").unwrap();
                }
                if let Some(q) = qb {
                    writeln!(s, "closed form {q:.12}").unwrap();
                }
                s
            });
            if let Some(q) = qb {
                let values = [Some(top), range.map(|r| r.0), range.map(|r| r.1)];
                if let Some(bad) = values.into_iter().flatten().find(|v| (v - q).abs() > cfg.tol) {
                    return Err(Error::BoundMismatch { stage: "quantum value".into(), expected: q, actual: bad }.into());
                }
            }
            Ok(())
        }
        BellCommand::Sos { family, n, local_dim } => {
            let n = family_n(family, n)?;
            let (set, w) = family_stabilizer(family.into(), n)?;
            let e = bell::synth(family.into(), n)?;
            let recipe = sos_recipe(&set, &w)?;
            let shift = recipe.shift.to_f64();
            let residuals: Vec<f64> = (0..cfg.trials as u64)
                .into_par_iter()
                .map(|t| {
                    let mut rng = rng_from_seed(cfg.seed.wrapping_add(t));
                    verify_sos(&e, &random_observables(&mut rng, &vec![local_dim; n]), shift, &recipe, cfg.dense_limit)
                })
                .collect::<Result<_, Error>>()?;
            let worst = residuals.iter().copied().fold(0.0, f64::max);
            #[derive(Serialize)]
            struct Out<'a> {
                shift: String,
                trials: usize,
                max_residual: f64,
                recipe: &'a bell::SosRecipe,
            }
            emit(cfg, &Out { shift: recipe.shift.to_string(), trials: cfg.trials, max_residual: worst, recipe: &recipe }, || {
                format!("shift {} ({shift:.12}), {} trials, max residual {worst:.3e}\n", recipe.shift, cfg.trials)
            });
            if worst > cfg.tol {
                return Err(Error::Numerical { what: "sum-of-squares identity".into(), residual: worst }.into());
            }
            Ok(())
        }
    }
}

fn selftest(cfg: &RunConfig, n: usize) -> CliResult {
    let s = canonical_pipeline(n, cfg.dense_limit)?;
    emit(cfg, &s, || {
        let mut out = format!("N={n}: {} codewords\n", s.codewords);
        writeln!(out, "{:>8}  {:>12}  {:>10}", "codeword", "max residual", "fidelity").unwrap();
        for (i, r) in s.reports.iter().enumerate() {
            let fid = r.projector_fidelity.map_or("-".into(), |f| format!("{f:.10}"));
            writeln!(out, "{i:>8}  {:>12.3e}  {fid:>10}", r.max_residual).unwrap();
        }
        let worst = s.site_errors.iter().copied().fold(0.0, f64::max);
        writeln!(out, "site pairs canonicalized, max error {worst:.3e}").unwrap();
        writeln!(out, "scope: {}", s.scope).unwrap();
        writeln!(out, "{}", if s.passed { "PASS" } else { "FAIL" }).unwrap();
        out
    });
    if !s.passed {
        return Err(Failure { code: 2, message: "stabilization conditions violated".into() });
    }
    Ok(())
}

fn faces(cfg: &RunConfig, n: usize, g: Option<usize>) -> CliResult {
    let g = match g {
        Some(g) => g,
        None => default_g_label(n)?,
    };
    let r = face_analysis(n, g, cfg.dense_limit)?;
    emit(cfg, &r, || {
        let mut s = format!(
            "N={n} k_min={}: face dimension {} (expected {})\nquantum bound {:.12}\n",
            r.k_min, r.dimension, r.expected_dimension, r.quantum_bound
        );
        for st in &r.states {
            let signs: String = st.signs.iter().map(|&m| if m { '-' } else { '+' }).collect();
            writeln!(s, "  signs [{signs}]  value {:.12}  gap {:.3e}", st.bell_value, st.violation_gap).unwrap();
        }
        s
    });
    if !r.matches() {
        return Err(Error::BoundMismatch {
            stage: "face dimension".into(),
            expected: r.expected_dimension as f64,
            actual: r.dimension as f64,
        }
        .into());
    }
    Ok(())
}

fn run_certify(cfg: &RunConfig, n: usize) -> CliResult {
    let (cert, err) = certify::certify(n, cfg);
    emit(cfg, &cert, || {
        let mut s = format!("certificate for N={n} (k_min={})\n", cert.k_min);
        for st in &cert.stages {
            writeln!(s, "  {:<10} {:?}  {}", st.name, st.status, st.detail).unwrap();
        }
        if let (Some(c), Some(q)) = (&cert.beta_c, &cert.beta_q) {
            writeln!(s, "beta_C = {}  beta_Q = {} ({:.12})", c.exact, q.exact, q.value).unwrap();
        }
        if let Some(d) = cert.face_dimension {
            writeln!(s, "face dimension {d}").unwrap();
        }
        writeln!(s, "{}", if cert.passed { "PASS" } else { "FAIL" }).unwrap();
        s
    });
    match err {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> CliResult {
    let cfg = &cli.cfg;
    if let Some(w) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global()
            .map_err(|e| Failure { code: 1, message: e.to_string() })?;
    }
    match cli.command {
        Command::CheckGme { path, file, oracle_limit, require_gme } => {
            check_gme(cfg, path, file, oracle_limit, require_gme)
        }
        Command::Construct { kind, n, cyclic } => construct(kind, n, cyclic),
        Command::Bell(cmd) => bell_cmd(cfg, cmd),
        Command::Selftest(SelftestCommand::Verify { n }) => selftest(cfg, n),
        Command::Faces { n, g_label } => faces(cfg, n, g_label),
        Command::Certify { n } => run_certify(cfg, n),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
