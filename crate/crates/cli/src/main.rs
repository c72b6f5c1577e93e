//! `fibbraid` command-line front end.

mod json;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::Rational64;
use serde_json::{json, Value};

use fibbraid::blocks::{braid_consistency_check, monodromy_matrix, ContinuationPath, Puncture};
use fibbraid::braidrep::{generators_with, Limits, MatrixJson, RData};
use fibbraid::cftchars::{full_character, full_character_summands, parafermion_char, QSeries};
use fibbraid::fusion::{BasisKind, Label, PathBasis};
use fibbraid::gatesynth::{
    distance, evaluate_cached, leakage, leakage_of_matrix, named_gate, search, BraidWord, GateTarget, PhaseMode,
    SearchMethod, SearchOptions, GATE_NAMES,
};
use fibbraid::interferometry::{initialize_register, monodromy, oscillation_amplitude, sweep, sweep_csv, InterferometerConfig};
use fibbraid::verify::{self, Suite};
use fibbraid::CMatrix64;

use json::{to_stable_string, OutputEnvelope, SCHEMA_VERSION};

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "fibbraid", version, about = "Fibonacci-anyon braid representations and gate compilation")]
struct Cli {
    /// Worker threads for the search (default: all cores)
    #[arg(long, global = true, env = "FIBBRAID_THREADS")]
    threads: Option<usize>,
    /// Report wall-clock time in elapsed_ms (otherwise 0, keeping output byte-stable)
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit the braid generators B_1..B_{n-1}
    Gens(GensArgs),
    /// Run a verification suite
    Verify(VerifyArgs),
    /// Evaluate a braid word
    Eval(EvalArgs),
    /// Search for a braid word approximating a gate
    Compile(CompileArgs),
    /// Leakage of a word out of the computational subspace
    Leakage(LeakageArgs),
    /// Interferometer conductance and α sweeps
    Interfere(InterfereArgs),
    /// Simulate antidot register initialization
    InitSim(InitSimArgs),
    /// Character q-series
    Chars(CharsArgs),
    /// Conformal-block monodromies
    Blocks(BlocksArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct GensArgs {
    /// Number of anyons
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Total fusion charge (I or eps)
    #[arg(long, default_value = "I")]
    charge: Label,
    /// Row order: canonical, recursive or paper
    #[arg(long, default_value = "canonical")]
    basis: BasisKind,
    /// Pure parafermion phases (drop the u(1) factor q^3)
    #[arg(long)]
    pure: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// artin, paper-words, blocks, chars or all
    #[arg(long, default_value = "all")]
    suite: Suite,
    /// Strand counts for the artin suite (repeatable)
    #[arg(long = "n", default_values_t = [4usize, 6, 8])]
    strands: Vec<usize>,
}

#[derive(Args)]
struct EvalArgs {
    /// Braid word, e.g. "B1^4 B2^-2 B1"
    #[arg(long)]
    word: String,
    #[arg(long, default_value_t = 4)]
    strands: usize,
    #[arg(long, default_value = "I")]
    charge: Label,
    /// Named gate to measure the distance to
    #[arg(long)]
    target: Option<String>,
    /// exact or up-to-phase
    #[arg(long, default_value = "exact")]
    phase_mode: PhaseMode,
}

#[derive(Args)]
struct CompileArgs {
    /// Named target gate
    #[arg(long, conflicts_with = "matrix_file")]
    target: Option<String>,
    /// JSON matrix file with [re, im] entries, row-major
    #[arg(long)]
    matrix_file: Option<PathBuf>,
    /// Weave budget (sum of |exponents|)
    #[arg(long, default_value_t = 10)]
    max_weaves: u32,
    /// exhaustive or mitm
    #[arg(long, default_value = "exhaustive")]
    method: SearchMethod,
    /// Largest |exponent| per factor
    #[arg(long, default_value_t = 5)]
    max_exponent: u32,
    /// Generators to use, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2])]
    generators: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    strands: usize,
    #[arg(long, default_value = "I")]
    charge: Label,
    /// exact or up-to-phase
    #[arg(long, default_value = "exact")]
    phase_mode: PhaseMode,
    /// Exit with code 3 when the best distance exceeds this
    #[arg(long)]
    max_error: Option<f64>,
    /// Write a CSV of the best word at each weave budget 1..=max-weaves
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct LeakageArgs {
    #[arg(long)]
    word: String,
    /// Register size; the word acts on 2·qubits + 2 anyons
    #[arg(long, default_value_t = 2)]
    qubits: usize,
}

#[derive(Args)]
struct InterfereArgs {
    /// Tunnelling amplitude t1 as "re" or "re,im"
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    t1: String,
    /// Tunnelling amplitude t2 as "re" or "re,im"
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    t2: String,
    /// Aharonov-Bohm phase α
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Charge on the antidot: I or eps
    #[arg(long, default_value = "eps")]
    inner: Label,
    /// Tunnelling quasiparticle: sigma1 or sigma2
    #[arg(long, default_value = "sigma1")]
    probe: Label,
    /// Sweep α over this many points in [0, 2π)
    #[arg(long)]
    sweep: Option<usize>,
    /// Print the sweep as CSV instead of JSON
    #[arg(long, requires = "sweep")]
    csv: bool,
}

#[derive(Args)]
struct InitSimArgs {
    #[arg(long, default_value_t = 1)]
    qubits: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-antidot trial cap
    #[arg(long, default_value_t = 1000)]
    max_trials: u32,
}

#[derive(Args)]
struct CharsArgs {
    /// Coset sector label (I, psi1, psi2, sigma1, sigma2, eps)
    #[arg(long, conflicts_with = "full")]
    sector: Option<Label>,
    /// Full character χ_{l,ρ} given as "l,rho"
    #[arg(long, allow_hyphen_values = true)]
    full: Option<String>,
    /// Window above the leading exponent
    #[arg(long, default_value_t = 10)]
    order: i64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct BlocksArgs {
    /// Loop target: 0, 1 or inf
    #[arg(long, default_value = "1")]
    around: Puncture,
    /// Base point as "re" or "re,im"
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    base: String,
    /// Loop radius
    #[arg(long, default_value_t = 0.5)]
    radius: f64,
    /// Nodes on the circle
    #[arg(long, default_value_t = 256)]
    steps: usize,
    /// Per-step series truncation tolerance
    #[arg(long, default_value_t = 1e-13)]
    tolerance: f64,
    /// Also run the cross-check against the braid generators
    #[arg(long)]
    consistency: bool,
}

/// Result of a subcommand: payload plus exit status.
enum Outcome {
    Json(Value, u8),
    Text(String, u8),
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().with_context(|| format!("bad number {p:?}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => bail!("expected \"re\" or \"re,im\", got {s:?}"),
    }
}

fn matrix_json(m: &CMatrix64) -> Value {
    serde_json::to_value(MatrixJson::new(m, None)).expect("matrix serializes")
}

fn matrix_table(m: &CMatrix64) -> String {
    let mut s = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format!("{:>24}", format!("{:+.6}{:+.6}i", m[(i, j)].re, m[(i, j)].im))).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

fn cmd_gens(a: &GensArgs) -> Result<Outcome> {
    let rdata = if a.pure { RData::pure_parafermion() } else { RData::default() };
    let gens = generators_with::<f64>(a.n, a.charge, &rdata, &Limits::default())?;
    let gens = gens.into_iter().map(|g| g.in_basis(a.basis)).collect::<Result<Vec<_>, _>>()?;
    let basis = PathBasis::new(a.n, a.charge, a.basis)?;
    let paths: Vec<String> = basis.paths().iter().map(|p| p.to_string()).collect();
    match a.format {
        Format::Table => {
            let mut s = format!("# n={} charge={} basis={:?} dim={}\n# paths: {}\n", a.n, a.charge.name(), a.basis, basis.dim(), paths.join(" "));
            for (k, g) in gens.iter().enumerate() {
                s.push_str(&format!("B{}\n", k + 1));
                s.push_str(&matrix_table(&g.matrix));
            }
            Ok(Outcome::Text(s, 0))
        }
        Format::Json => Ok(Outcome::Json(
            json!({
                "strands": a.n,
                "charge": a.charge,
                "basis": a.basis,
                "dim": basis.dim(),
                "paths": paths,
                "generators": gens.iter().map(|g| matrix_json(&g.matrix)).collect::<Vec<_>>(),
            }),
            0,
        )),
    }
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome> {
    let r = verify::run(a.suite, &a.strands);
    let code = if r.pass { 0 } else { EXIT_VERIFY };
    Ok(Outcome::Json(serde_json::to_value(&r)?, code))
}

fn cmd_eval(a: &EvalArgs) -> Result<Outcome> {
    let word = BraidWord::parse(&a.word, a.strands)?;
    let m = evaluate_cached(&word, a.charge)?;
    let mut payload = json!({
        "word": word.to_string(),
        "strands": a.strands,
        "charge": a.charge,
        "weave_count": word.weave_count(),
        "factor_count": word.factor_count(),
        "matrix": matrix_json(&m),
        "unitarity_defect": m.unitarity_defect(),
    });
    if a.charge == Label::I && a.strands.is_multiple_of(2) {
        payload["leakage"] = json!(leakage_of_matrix(&m, a.strands)?);
    }
    if let Some(t) = &a.target {
        let target = named_gate(t).ok_or_else(|| anyhow!("unknown gate {t:?}; known: {}", GATE_NAMES.join(", ")))?;
        let m2 = if target.rows() == m.rows() {
            m.clone()
        } else {
            let idx = fibbraid::gatesynth::computational_indices(a.strands, a.charge)?;
            m.submatrix(&idx, &idx)
        };
        payload["target"] = json!(t);
        payload["phase_mode"] = json!(a.phase_mode);
        payload["distance"] = json!(distance(&m2, &target, a.phase_mode)?);
    }
    Ok(Outcome::Json(payload, 0))
}

fn read_matrix_file(p: &PathBuf) -> Result<CMatrix64> {
    let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    if let Ok(m) = serde_json::from_str::<MatrixJson>(&text) {
        return Ok(m.to_matrix()?);
    }
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text).context("matrix file must hold [re, im] rows")?;
    let rows = rows.into_iter().map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()).collect();
    Ok(CMatrix64::from_rows(rows)?)
}

fn cmd_compile(a: &CompileArgs) -> Result<Outcome> {
    let target = match (&a.target, &a.matrix_file) {
        (Some(name), None) => GateTarget::named(name, a.phase_mode)?,
        (None, Some(p)) => GateTarget::new(p.display().to_string(), read_matrix_file(p)?, a.phase_mode)?,
        _ => bail!("give exactly one of --target or --matrix-file"),
    };
    let opts = SearchOptions {
        max_weaves: a.max_weaves,
        method: a.method,
        generators: a.generators.clone(),
        max_exponent: a.max_exponent,
        strands: a.strands,
        charge: a.charge,
        max_error: a.max_error,
    };
    if let Some(path) = &a.trace {
        let mut csv = String::from("max_weaves,distance,weave_count,word\n");
        for w in 1..=a.max_weaves {
            let r = search(&target, &SearchOptions { max_weaves: w, ..opts.clone() })?;
            csv.push_str(&format!("{w},{},{},{}\n", json::format_f64(r.distance), r.weave_count, r.word));
        }
        fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    let r = search(&target, &opts)?;
    let code = if r.budget_exhausted { EXIT_BUDGET } else { 0 };
    let mut v = serde_json::to_value(&r)?;
    v["word"] = json!(r.word.to_string());
    v["target"] = json!(target.name);
    Ok(Outcome::Json(v, code))
}

fn cmd_leakage(a: &LeakageArgs) -> Result<Outcome> {
    let word = BraidWord::parse(&a.word, 2 * a.qubits + 2)?;
    let l = leakage(&word, a.qubits)?;
    Ok(Outcome::Json(json!({"word": word.to_string(), "qubits": a.qubits, "strands": word.strands, "leakage": l}), 0))
}

fn cmd_interfere(a: &InterfereArgs) -> Result<Outcome> {
    let cfg = InterferometerConfig { t1: parse_complex(&a.t1)?, t2: parse_complex(&a.t2)?, alpha: a.alpha, inner: a.inner, probe: a.probe };
    if let Some(points) = a.sweep {
        let rows = sweep(&cfg, points)?;
        if a.csv {
            return Ok(Outcome::Text(sweep_csv(&rows), 0));
        }
        return Ok(Outcome::Json(json!({"config": cfg, "rows": rows}), 0));
    }
    let m = monodromy(cfg.probe, cfg.inner)?;
    Ok(Outcome::Json(
        json!({
            "config": cfg,
            "monodromy": m,
            "sigma_xx": fibbraid::interferometry::sigma_xx(&cfg)?,
            "amplitude": oscillation_amplitude(&cfg)?,
        }),
        0,
    ))
}

fn cmd_init_sim(a: &InitSimArgs) -> Result<Outcome> {
    let r = initialize_register(a.qubits, a.seed, a.max_trials)?;
    Ok(Outcome::Json(serde_json::to_value(&r)?, 0))
}

fn series_table(s: &QSeries) -> String {
    let mut out = String::from("q_exponent\ty_exponent\tcoefficient\n");
    for t in s.rows() {
        out.push_str(&format!("{}\t{}\t{}\n", t.q_exponent, t.y_exponent, t.coefficient));
    }
    out
}

fn cmd_chars(a: &CharsArgs) -> Result<Outcome> {
    let order = Rational64::from_integer(a.order);
    let (series, meta) = match (&a.sector, &a.full) {
        (Some(lab), None) => {
            let (sigma, q) = lab.sigma_q();
            (parafermion_char(sigma, q, order)?, json!({"sector": lab, "sigma": sigma, "Q": q}))
        }
        (None, Some(spec)) => {
            let parts: Vec<i64> = spec.split(',').map(|x| x.trim().parse::<i64>()).collect::<Result<_, _>>().context("--full expects \"l,rho\"")?;
            let [l, rho] = parts[..] else { bail!("--full expects \"l,rho\"") };
            let summands = full_character_summands(l, rho)?;
            (full_character(l, rho, order)?, json!({"l": l, "rho": rho, "summands": summands}))
        }
        _ => bail!("give exactly one of --sector or --full"),
    };
    match a.format {
        Format::Table => Ok(Outcome::Text(series_table(&series), 0)),
        Format::Json => {
            let mut v = meta;
            v["order"] = json!(a.order);
            v["leading_exponent"] = json!(series.leading_exponent().map(|e| e.to_string()));
            v["terms"] = serde_json::to_value(series.rows())?;
            Ok(Outcome::Json(v, 0))
        }
    }
}

fn cmd_blocks(a: &BlocksArgs) -> Result<Outcome> {
    let base = parse_complex(&a.base)?;
    let path = ContinuationPath { radius: a.radius, steps: a.steps, tolerance: a.tolerance };
    let m = monodromy_matrix(a.around, base, &path)?;
    let mut v = json!({"around": a.around, "base": [base.re, base.im], "path": path, "monodromy": matrix_json(&m)});
    let mut code = 0;
    if a.consistency {
        let r = braid_consistency_check()?;
        if !r.pass {
            code = EXIT_VERIFY;
        }
        v["consistency"] = serde_json::to_value(r)?;
    }
    Ok(Outcome::Json(v, code))
}

fn command_name(c: &Cmd) -> &'static str {
    match c {
        Cmd::Gens(_) => "gens",
        Cmd::Verify(_) => "verify",
        Cmd::Eval(_) => "eval",
        Cmd::Compile(_) => "compile",
        Cmd::Leakage(_) => "leakage",
        Cmd::Interfere(_) => "interfere",
        Cmd::InitSim(_) => "init-sim",
        Cmd::Chars(_) => "chars",
        Cmd::Blocks(_) => "blocks",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let start = Instant::now();
    let result = match &cli.cmd {
        Cmd::Gens(a) => cmd_gens(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Compile(a) => cmd_compile(a),
        Cmd::Leakage(a) => cmd_leakage(a),
        Cmd::Interfere(a) => cmd_interfere(a),
        Cmd::InitSim(a) => cmd_init_sim(a),
        Cmd::Chars(a) => cmd_chars(a),
        Cmd::Blocks(a) => cmd_blocks(a),
    };
    match result {
        Ok(Outcome::Text(s, code)) => {
            print!("{s}");
            ExitCode::from(code)
        }
        Ok(Outcome::Json(payload, code)) => {
            let elapsed_ms = if cli.timing { start.elapsed().as_millis() as u64 } else { 0 };
            let env = OutputEnvelope { schema_version: SCHEMA_VERSION, command: command_name(&cli.cmd).into(), payload, elapsed_ms };
            let v = serde_json::to_value(env).expect("envelope serializes");
            print!("{}", to_stable_string(&v));
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
