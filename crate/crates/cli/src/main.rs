use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qmc_core::classical::{classical_cmi, classical_relative_entropy, closest_markov, ClassicalJointFile};
use qmc_core::entropy::conditional_mutual_information;
use qmc_core::io::{FamilySpec, OptResultFile, StateFile};
use qmc_core::optimize::{minimize_delta, minimize_ep, OptConfig, ShapeMode};
use qmc_core::verify::{run_suite, Suite};
use qmc_core::{Error, Family};

#[derive(Parser)]
#[command(name = "qmc", version, about = "Distance of tripartite quantum states from quantum Markov chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print I(A:C|B) of a state file.
    Cmi { state: PathBuf },
    /// Upper estimate of the distance to the Markov states, with the I(A:C|B) lower bound.
    Delta {
        state: PathBuf,
        #[command(flatten)]
        opt: OptArgs,
        /// Write the full optimizer result as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closest classical Markov chain X - Y - Z of a joint distribution.
    Classical {
        dist: PathBuf,
        /// Write the projected distribution Q as JSON.
        #[arg(long)]
        project: Option<PathBuf>,
    },
    /// Upper estimate of the entanglement of purification of the AC marginal.
    Ep {
        state: PathBuf,
        #[command(flatten)]
        opt: OptArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a state from one of the example families.
    Family {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a family parameter and write closed forms and estimates as CSV.
    Scan {
        family: FamilyName,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Run seeded invariant suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: SuiteName,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Clone)]
struct OptArgs {
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    shape: Option<ShapeName>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl OptArgs {
    fn config(&self) -> OptConfig {
        OptConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            tol: self.tol,
            seed: self.seed,
            shape_mode: self.shape.map(|s| match s {
                ShapeName::Trivial => ShapeMode::Trivial,
                ShapeName::Enumerate => ShapeMode::Enumerate,
                ShapeName::Full => ShapeMode::Full,
            }),
            ..OptConfig::default()
        }
    }
}

#[derive(Args)]
struct FamilyArgs {
    /// Family name; omit when giving --spec.
    #[arg(required_unless_present = "spec")]
    name: Option<FamilyName>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    /// Family spec JSON file, e.g. {"family": "cq", "probs": [..], "states": [..]}.
    #[arg(long, conflicts_with = "name")]
    spec: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeName {
    Trivial,
    Enumerate,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    PsiX,
    ZetaD,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteName {
    Entropy,
    Classical,
    Markov,
    Optimizer,
    All,
}

/// Failure with its exit status.
enum Failure {
    Input(String),
    NotConverged(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

/// Fixed 12-decimal rendering without a negative zero.
fn fmt12(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_state(path: &Path) -> Result<qmc_core::State, Failure> {
    let file = StateFile::parse(&read(path)?)?;
    Ok(file.to_state::<f64>()?.to_tripartite()?)
}

fn cmd_cmi(state: &Path) -> CliResult {
    let rho = load_state(state)?;
    println!("{}", fmt12(conditional_mutual_information(&rho)?));
    Ok(())
}

fn cmd_delta(state: &Path, opt: &OptArgs, out: Option<&Path>) -> CliResult {
    let rho = load_state(state)?;
    let r = minimize_delta(&rho, &opt.config())?;
    if let Some(out) = out {
        write(out, &OptResultFile::from_result(&r).to_json())?;
    }
    println!("lower {}", fmt12(r.lower_bound));
    println!("upper {}", fmt12(r.value));
    if !r.converged {
        return Err(Failure::NotConverged("no restart met the convergence tolerance".into()));
    }
    Ok(())
}

fn cmd_classical(dist: &Path, project: Option<&Path>) -> CliResult {
    let file: ClassicalJointFile =
        serde_json::from_str(&read(dist)?).map_err(|e| Failure::Input(format!("malformed input: {e}")))?;
    let p = file.into_joint()?;
    let q = closest_markov(&p);
    let d = classical_relative_entropy(&p, &q)?;
    if let Some(path) = project {
        let text = serde_json::to_string_pretty(&ClassicalJointFile::from_joint(&q)).expect("plain data");
        write(path, &text)?;
    }
    println!("cmi {}", fmt12(classical_cmi(&p)));
    println!("relent {}", fmt12(d.value));
    Ok(())
}

fn cmd_ep(state: &Path, opt: &OptArgs, out: Option<&Path>) -> CliResult {
    let file = StateFile::parse(&read(state)?)?;
    let (ac, dims) = file.to_ac_matrix::<f64>()?;
    let r = minimize_ep(&ac, dims, &opt.config())?;
    if let Some(out) = out {
        write(out, &OptResultFile::from_result(&r).to_json())?;
    }
    println!("lower {}", fmt12(r.lower_bound));
    println!("upper {}", fmt12(r.value));
    if !r.converged {
        return Err(Failure::NotConverged("no restart met the convergence tolerance".into()));
    }
    Ok(())
}

fn build_family(name: FamilyName, value: f64) -> Result<Family, Failure> {
    let spec = match name {
        FamilyName::PsiX => FamilySpec::PsiX { x: value },
        FamilyName::ZetaD => {
            if value.fract() != 0.0 || value < 0.0 {
                return Err(Failure::Input(format!("d must be a whole number, got {value}")));
            }
            FamilySpec::ZetaD { d: value as usize }
        }
    };
    Ok(spec.build::<f64>()?)
}

fn cmd_family(args: &FamilyArgs, out: Option<&Path>) -> CliResult {
    let point = match (&args.spec, args.name) {
        (Some(path), _) => FamilySpec::parse(&read(path)?)?.build::<f64>()?,
        (None, Some(FamilyName::PsiX)) => {
            let x = args.x.ok_or_else(|| Failure::Input("psi-x needs --x".into()))?;
            build_family(FamilyName::PsiX, x)?
        }
        (None, Some(FamilyName::ZetaD)) => {
            let d = args.d.ok_or_else(|| Failure::Input("zeta-d needs --d".into()))?;
            build_family(FamilyName::ZetaD, d as f64)?
        }
        (None, None) => return Err(Failure::Input("give a family name or --spec".into())),
    };
    let text = StateFile::from_family(&point.state).to_json();
    match out {
        Some(path) => write(path, &text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

pub const CSV_HEADER: &str = "param,S_A,S_B,cmi,delta_lower,delta_upper,delta_hat,ratio";

fn cmd_scan(family: FamilyName, grid: &[f64], csv: Option<&Path>, opt: &OptArgs) -> CliResult {
    let cfg = opt.config();
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    let mut all_converged = true;
    for &value in grid {
        let point = build_family(family, value)?;
        let rho = point.state.to_tripartite()?;
        let r = minimize_delta(&rho, &cfg)?;
        all_converged &= r.converged;
        let cf = &point.closed_forms;
        let cmi = cf.cmi.unwrap_or(r.lower_bound);
        let field = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        let row = [
            value.to_string(),
            field(cf.s_a),
            field(cf.s_b),
            cmi.to_string(),
            field(cf.delta_lower),
            field(cf.delta_upper),
            r.value.to_string(),
            (r.value / cmi).to_string(),
        ];
        text.push_str(&row.join(","));
        text.push('\n');
    }
    match csv {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    if !all_converged {
        return Err(Failure::NotConverged("a grid point had no converged restart".into()));
    }
    Ok(())
}

fn cmd_verify(suite: SuiteName, seed: u64) -> CliResult {
    let suite = match suite {
        SuiteName::Entropy => Suite::Entropy,
        SuiteName::Classical => Suite::Classical,
        SuiteName::Markov => Suite::Markov,
        SuiteName::Optimizer => Suite::Optimizer,
        SuiteName::All => Suite::All,
    };
    let report = run_suite(suite, seed);
    print!("{report}");
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Input("invariant failures".into()))
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("QMC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match &cli.command {
        Command::Cmi { state } => cmd_cmi(state),
        Command::Delta { state, opt, out } => cmd_delta(state, opt, out.as_deref()),
        Command::Classical { dist, project } => cmd_classical(dist, project.as_deref()),
        Command::Ep { state, opt, out } => cmd_ep(state, opt, out.as_deref()),
        Command::Family { family, out } => cmd_family(family, out.as_deref()),
        Command::Scan { family, grid, csv, opt } => cmd_scan(*family, grid, csv.as_deref(), opt),
        Command::Verify { suite, seed } => cmd_verify(*suite, *seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::NotConverged(msg)) => {
            eprintln!("warning: {msg}");
            ExitCode::from(3)
        }
    }
}
