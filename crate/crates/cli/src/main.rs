use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use discordant::blocks::STRUCTURAL_TOL;
use discordant::circulant::THEOREM_TOL;
use discordant::sampling::random_zero_discord;
use discordant::schema::{State, StateFile};
use discordant::simplex::{simplex_grid, SimplexConfig, SimplexRow};
use discordant::states::BellWeights;
use discordant::suites::{run_suites, SuiteConfig, NUMERIC_MAX_D, NUMERIC_ZERO};
use discordant::{
    bell_zero_discord_check, circulant_theorem_check, discord, is_prime, structural_discord_zero, DiscordResult,
    Error, OptimizerConfig, Side, StructuralVerdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const EXIT_INPUT: u8 = 2;
const EXIT_DISAGREE: u8 = 3;

#[derive(Parser)]
#[command(name = "discordant", version, about = "Zero-discord analysis of two-qudit circulant states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural and numeric discord verdicts for one state.
    Analyze(AnalyzeArgs),
    /// Randomized consistency suites for one prime dimension.
    Verify(VerifyArgs),
    /// Grid over the two-qubit orthogonal-invariant simplex.
    Simplex(SimplexArgs),
    /// Write a state file for one of the families.
    Build(BuildArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Werner,
    Isotropic,
    Orthogonal,
    /// Classical Bell-diagonal weights from `--alpha` and `--pi`.
    Bell,
    /// A random zero-discord circulant family on `--side`.
    Generated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SideArg {
    A,
    B,
    Both,
}

impl SideArg {
    fn sides(self) -> Vec<Side> {
        match self {
            SideArg::A => vec![Side::A],
            SideArg::B => vec![Side::B],
            SideArg::Both => vec![Side::A, Side::B],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Weights `a,b,c` of the orthogonal family.
    #[arg(long, value_delimiter = ',')]
    abc: Option<Vec<f64>>,
    #[arg(long)]
    alpha: Option<usize>,
    /// Bell residue weights, rescaled to sum to `1/d`.
    #[arg(long, value_delimiter = ',')]
    pi: Option<Vec<f64>>,
}

#[derive(Args, Clone, Debug)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    starts: Option<usize>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// State file; alternatively describe the state with `--family`.
    input: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, value_enum, default_value = "both")]
    side: SideArg,
    /// Structural tolerance.
    #[arg(long, default_value_t = STRUCTURAL_TOL)]
    tol: f64,
    /// Skip the numeric oracle.
    #[arg(long)]
    no_numeric: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SimplexArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Numeric discord at every n-th grid point; 0 disables it.
    #[arg(long, default_value_t = 10)]
    every: usize,
    /// Tolerance on `|b − c|` for the zero-discord flag.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Side of a generated family.
    #[arg(long, value_enum, default_value = "a")]
    side: SideArg,
    /// Emit the dense matrix instead of the family parameters.
    #[arg(long)]
    dense: bool,
    #[command(flatten)]
    common: Common,
}

/// A failed command: exit code and message.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(EXIT_INPUT, e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure(EXIT_INPUT, e.to_string())
    }
}

fn input_error(msg: impl Into<String>) -> Failure {
    Failure(EXIT_INPUT, msg.into())
}

fn seed(common: &Common) -> Result<u64, Failure> {
    match std::env::var("DISCORDANT_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| input_error(format!("DISCORDANT_SEED = {v:?} is not an unsigned integer"))),
        Err(_) => Ok(common.seed),
    }
}

fn optimizer(common: &Common) -> Result<OptimizerConfig, Failure> {
    let mut cfg = OptimizerConfig::with_seed(seed(common)?);
    if let Some(s) = common.starts {
        cfg.starts = s;
    }
    if cfg.starts == 0 {
        return Err(input_error("--starts must be at least 1"));
    }
    Ok(cfg)
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    match &common.output {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn state_file(f: &FamilyArgs, side: Side, seed: u64) -> Result<StateFile, Failure> {
    let family = f.family.ok_or_else(|| input_error("give a state file or --family"))?;
    let d = f.d.ok_or_else(|| input_error("--d is required with --family"))?;
    let lambda = || f.lambda.ok_or_else(|| input_error("--lambda is required for this family"));
    Ok(match family {
        Family::Werner => StateFile::werner(d, lambda()?),
        Family::Isotropic => StateFile::isotropic(d, lambda()?),
        Family::Orthogonal => {
            let abc = f.abc.as_deref().ok_or_else(|| input_error("--abc is required for the orthogonal family"))?;
            let abc: [f64; 3] = abc.try_into().map_err(|_| input_error("--abc takes three weights"))?;
            StateFile::orthogonal(d, abc)
        }
        Family::Bell => {
            let alpha = f.alpha.ok_or_else(|| input_error("--alpha is required for the bell family"))?;
            let pi = f.pi.as_deref().ok_or_else(|| input_error("--pi is required for the bell family"))?;
            let total: f64 = pi.iter().sum();
            if !total.is_finite() || total <= 0.0 || pi.iter().any(|x| *x < 0.0) {
                return Err(input_error("--pi must be non-negative with a positive sum"));
            }
            let pi: Vec<f64> = pi.iter().map(|x| x / (total * d as f64)).collect();
            StateFile::from_bell(&BellWeights::classical(d, alpha, &pi)?)
        }
        Family::Generated => {
            let (spec, _) = random_zero_discord(d, side, &mut ChaCha8Rng::seed_from_u64(seed))?;
            StateFile::from_circulant(&spec)
        }
    })
}

#[derive(Serialize)]
struct SideReport {
    side: Side,
    structural: StructuralVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    theorem: Option<StructuralVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    numeric: Option<DiscordResult>,
    agreement: bool,
}

#[derive(Serialize)]
struct Tolerances {
    structural: f64,
    theorem: f64,
    numeric_zero: f64,
}

#[derive(Serialize)]
struct AnalysisReport {
    d: usize,
    circulant: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    bell: Option<StructuralVerdict>,
    sides: Vec<SideReport>,
    /// Numeric verdicts count towards agreement only up to this dimension.
    numeric_trusted_up_to: usize,
    agreement: bool,
    tolerances: Tolerances,
}

fn analyze_side(state: &State, side: Side, tol: f64, numeric: Option<&OptimizerConfig>) -> Result<SideReport, Failure> {
    let d = state.d;
    let structural = structural_discord_zero(&state.density, d, side, tol)?;
    let theorem = match &state.circulant {
        Some(spec) if is_prime(d) => Some(circulant_theorem_check(spec, side, THEOREM_TOL)?),
        _ => None,
    };
    let numeric = numeric.map(|cfg| discord(&state.density, d, side, cfg)).transpose()?;
    let mut agreement = theorem.as_ref().is_none_or(|t| t.zero_discord == structural.zero_discord);
    if let Some(r) = &numeric {
        if d <= NUMERIC_MAX_D {
            agreement &= (r.discord <= NUMERIC_ZERO) == structural.zero_discord;
        }
    }
    Ok(SideReport { side, structural, theorem, numeric, agreement })
}

fn analyze(args: &AnalyzeArgs) -> Result<u8, Failure> {
    let file = match &args.input {
        Some(path) => StateFile::parse(&read(path)?)?,
        None => state_file(&args.family, Side::A, seed(&args.common)?)?,
    };
    let state = file.build()?;
    let cfg = optimizer(&args.common)?;
    let numeric = (!args.no_numeric).then_some(&cfg);
    let sides =
        args.side.sides().into_iter().map(|s| analyze_side(&state, s, args.tol, numeric)).collect::<Result<Vec<_>, _>>()?;
    let bell = match &state.bell {
        Some(w) if is_prime(state.d) => Some(bell_zero_discord_check(w, 1e-12)?),
        _ => None,
    };
    let mut agreement = sides.iter().all(|s| s.agreement);
    if let Some(b) = &bell {
        agreement &= sides.iter().all(|s| s.structural.zero_discord == b.zero_discord);
    }
    let report = AnalysisReport {
        d: state.d,
        circulant: state.circulant.is_some(),
        bell,
        sides,
        numeric_trusted_up_to: NUMERIC_MAX_D,
        agreement,
        tolerances: Tolerances { structural: args.tol, theorem: THEOREM_TOL, numeric_zero: NUMERIC_ZERO },
    };
    emit(&args.common, &to_json(&report))?;
    Ok(if agreement { 0 } else { EXIT_DISAGREE })
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let mut cfg = SuiteConfig::new(args.d, seed(&args.common)?);
    cfg.optimizer = optimizer(&args.common)?;
    if let Some(n) = args.samples {
        cfg.samples = n;
    }
    let report = run_suites(&cfg)?;
    for s in &report.suites {
        let status = if s.skipped { "skipped" } else if s.failed == 0 { "pass" } else { "FAIL" };
        eprintln!("{:<13} {status:<7} {} passed, {} failed", s.name, s.passed, s.failed);
        if let Some(f) = &s.first_failure {
            eprintln!("    {f}");
        }
    }
    emit(&args.common, &to_json(&report))?;
    Ok(if report.all_passed() { 0 } else { EXIT_DISAGREE })
}

fn simplex_csv(rows: &[SimplexRow]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["b", "c", "separable", "zero_discord", "numeric_discord"]).map_err(csv_error)?;
    for r in rows {
        let flag = |x: bool| if x { "1" } else { "0" };
        let numeric = r.numeric_discord.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([r.b.to_string(), r.c.to_string(), flag(r.separable).into(), flag(r.zero_discord).into(), numeric])
            .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| input_error(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

fn csv_error(e: csv::Error) -> Failure {
    input_error(e.to_string())
}

fn simplex(args: &SimplexArgs) -> Result<u8, Failure> {
    if args.d != 2 {
        return Err(input_error(format!("the simplex is defined for d = 2, got {}", args.d)));
    }
    if args.steps == 0 {
        return Err(input_error("--steps must be at least 1"));
    }
    let cfg = SimplexConfig {
        steps: args.steps,
        every: (args.every > 0).then_some(args.every),
        tol: args.tol,
        optimizer: optimizer(&args.common)?,
    };
    let rows = simplex_grid(&cfg)?;
    let text = match args.format {
        Format::Csv => simplex_csv(&rows)?,
        Format::Json => to_json(&rows),
    };
    emit(&args.common, &text)?;
    Ok(0)
}

fn build(args: &BuildArgs) -> Result<u8, Failure> {
    let side = match args.side {
        SideArg::Both => return Err(input_error("--side must be A or B for build")),
        s => s.sides()[0],
    };
    let file = state_file(&args.family, side, seed(&args.common)?)?;
    let state = file.build()?;
    let file = if args.dense { StateFile::from_dense(&state.density, state.d) } else { file };
    emit(&args.common, &(file.to_json() + "\n"))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Verify(a) => verify(a),
        Command::Simplex(a) => simplex(a),
        Command::Build(a) => build(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
