use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use virloop::analysis::{
    cor31_check, endo_probe, iso_check, iso_poly_coeffs, iso_poly_identity_check, iso_refute,
    module_signature, psi_separation, square_grid, theorem31_x, ProbeStatus, Separation, XCase,
};
use virloop::modules_int::{is_irreducible_int, IntModule, IntVector, PsiSource};
use virloop::notation::{parse_label, parse_scalar, parse_tensor_vector, parse_uea};
use virloop::run::{self, AlgebraSpec, ModuleSpec, PhiSpec, Report, RunConfig};
use virloop::{CharacterPsi, Error, Scalar, Tensor};

const EXIT_CONFIG: u8 = 3;

/// Exact computations with modules over the loop-Virasoro algebra.
#[derive(Parser)]
#[command(name = "virloop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Submodule closure in an intermediate-series module.
    IntModule(IntArgs),
    /// Level dimensions and Gram ranks of V(φ).
    Verma(VermaArgs),
    /// Weight data of the tensor module, or the action of an element.
    Tensor(TensorArgs),
    /// Endomorphism probe at v_φ ⊗ v_m.
    EndoProbe(EndoArgs),
    /// Depth-reducing operator X applied to a weight vector.
    XProbe(XArgs),
    /// Cyclicity certificate for a non-unit b.
    Cor31(Cor31Args),
    /// Separates two modules with different characters ψ.
    PsiSep(PsiSepArgs),
    /// Coefficients of the isomorphism polynomial system.
    IsoCoeffs(IsoCoeffArgs),
    /// Compares isomorphism signatures of two modules.
    IsoCheck(IsoCheckArgs),
    /// Runs a JSON config (or `demo:<name>`) and writes a report.
    Run(RunArgs),
    /// Writes exact CSV fixtures for a config.
    Fixtures(FixtureArgs),
}

/// Comma-separated scalars, one flag occurrence.
#[derive(Clone)]
struct List(Vec<Scalar>);

fn scalar_list(s: &str) -> Result<List, String> {
    s.split(',')
        .map(|x| parse_scalar(x).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()
        .map(List)
}

fn scalar(s: &str) -> Result<Scalar, String> {
    parse_scalar(s).map_err(|e| e.to_string())
}

fn window(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected lo,hi, got {s:?}"))?;
    let lo = a.trim().parse::<i64>().map_err(|e| e.to_string())?;
    let hi = b.trim().parse::<i64>().map_err(|e| e.to_string())?;
    if lo > hi {
        return Err(format!("empty window [{lo}, {hi}]"));
    }
    Ok((lo, hi))
}

#[derive(Args, Clone)]
struct VermaParams {
    /// Coefficient algebra: trivial, "truncated-poly d", "split k", "cyclic-group n".
    #[arg(long = "B", visible_alias = "algebra", default_value = "trivial")]
    algebra: String,
    /// φ(d_0 ⊗ e_j), comma separated.
    #[arg(long, value_parser = scalar_list, allow_hyphen_values = true)]
    phi: List,
    /// φ(C ⊗ e_j), comma separated; zero by default.
    #[arg(long, value_parser = scalar_list, allow_hyphen_values = true)]
    central: Option<List>,
    #[arg(long, default_value_t = 2)]
    depth: usize,
}

#[derive(Args, Clone)]
struct ModuleParams {
    #[command(flatten)]
    verma: VermaParams,
    #[arg(long, value_parser = scalar, allow_hyphen_values = true)]
    alpha: Scalar,
    #[arg(long, value_parser = scalar, allow_hyphen_values = true)]
    beta: Scalar,
    /// ψ(e_j), comma separated; must be a unital character of B.
    #[arg(long, value_parser = scalar_list, allow_hyphen_values = true)]
    psi: Option<List>,
    #[arg(long, value_parser = window, allow_hyphen_values = true, default_value = "-8,8")]
    window: (i64, i64),
}

impl ModuleParams {
    fn spec(&self) -> virloop::Result<ModuleSpec> {
        let alg = AlgebraSpec::Builtin(self.verma.algebra.clone());
        let dim = alg.build().map_err(|e| Error::config("--B", e.to_string()))?.dim();
        Ok(ModuleSpec {
            algebra: alg,
            phi: PhiSpec {
                d0: self.verma.phi.0.clone(),
                c: self.verma.central.clone().map(|l| l.0),
            },
            psi: self
                .psi
                .clone()
                .map(|l| l.0)
                .unwrap_or_else(|| default_psi(&self.verma.algebra, dim)),
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            depth: self.verma.depth,
        })
    }

    fn build(&self) -> virloop::Result<Tensor> {
        self.spec()?.build("").map_err(flag_names)
    }
}

/// ψ = first coordinate functional, a character of every builtin except
/// cyclic groups, where ψ(g) = 1.
fn default_psi(algebra: &str, dim: usize) -> Vec<Scalar> {
    if algebra.starts_with("cyclic-group") {
        vec![Scalar::from(1); dim]
    } else {
        let mut v = vec![Scalar::from(0); dim];
        v[0] = Scalar::from(1);
        v
    }
}

fn flag_names(e: Error) -> Error {
    match e {
        Error::Config { path, message } => {
            let flag = match path.as_str() {
                "algebra" => "--B".to_string(),
                "phi.d0" | "phi" => "--phi".to_string(),
                "phi.c" => "--central".to_string(),
                other => format!("--{other}"),
            };
            Error::Config { path: flag, message }
        }
        other => other,
    }
}

#[derive(Args)]
struct IntArgs {
    #[arg(long, value_parser = scalar, allow_hyphen_values = true)]
    alpha: Scalar,
    #[arg(long, value_parser = scalar, allow_hyphen_values = true)]
    beta: Scalar,
    /// ψ(b) for the acting generators; 1 by default.
    #[arg(long, value_parser = scalar, allow_hyphen_values = true)]
    psi: Option<Scalar>,
    #[arg(long, value_parser = window, allow_hyphen_values = true, default_value = "-12,12")]
    window: (i64, i64),
    /// Index k of the seed vector v_k.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    seed: i64,
    #[arg(long, default_value_t = 6)]
    max_degree: i64,
    /// Use V_{α,β} on all of Z instead of the normalized module.
    #[arg(long)]
    raw: bool,
}

#[derive(Args)]
struct VermaArgs {
    #[command(flatten)]
    verma: VermaParams,
    /// Directory for gram.csv, radical.csv and friends.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct TensorArgs {
    #[command(flatten)]
    module: ModuleParams,
    #[command(subcommand)]
    op: Option<TensorOp>,
}

#[derive(Subcommand)]
enum TensorOp {
    /// Evaluates ELEMENT · VECTOR, e.g. --element "d[1] d[-1]" --vector "v @ 2".
    Act {
        #[arg(long, allow_hyphen_values = true)]
        element: String,
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
    },
}

#[derive(Args)]
struct EndoArgs {
    #[command(flatten)]
    module: ModuleParams,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    m: i64,
    /// Depth k of the probed weight vector; the module depth by default.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    Ii,
}

#[derive(Args)]
struct XArgs {
    #[command(flatten)]
    module: ModuleParams,
    #[arg(long, value_enum)]
    case: CaseArg,
    /// Basis label of b, or 1.
    #[arg(long, default_value = "1")]
    b: String,
    /// Weight vector, e.g. "d[-1] v @ 1".
    #[arg(long, allow_hyphen_values = true)]
    w: String,
}

#[derive(Args)]
struct Cor31Args {
    #[command(flatten)]
    module: ModuleParams,
    #[arg(long)]
    b: String,
}

#[derive(Args)]
struct PsiSepArgs {
    #[command(flatten)]
    module: ModuleParams,
    #[arg(long, value_parser = scalar_list, allow_hyphen_values = true)]
    psi2: List,
    #[arg(long, value_parser = scalar, allow_hyphen_values = true)]
    alpha2: Option<Scalar>,
    #[arg(long, value_parser = scalar, allow_hyphen_values = true)]
    beta2: Option<Scalar>,
}

#[derive(Args)]
struct IsoCoeffArgs {
    #[arg(long, value_parser = scalar, allow_hyphen_values = true)]
    a: Scalar,
    #[arg(long, value_parser = scalar, allow_hyphen_values = true)]
    beta1: Scalar,
    #[arg(long, value_parser = scalar, allow_hyphen_values = true)]
    q: Scalar,
    #[arg(long, value_parser = scalar, allow_hyphen_values = true)]
    beta2: Scalar,
}

#[derive(Args)]
struct IsoCheckArgs {
    #[command(flatten)]
    module: ModuleParams,
    #[arg(long, value_parser = scalar_list, allow_hyphen_values = true)]
    phi2: Option<List>,
    #[arg(long, value_parser = scalar_list, allow_hyphen_values = true)]
    central2: Option<List>,
    #[arg(long, value_parser = scalar_list, allow_hyphen_values = true)]
    psi2: Option<List>,
    #[arg(long, value_parser = scalar, allow_hyphen_values = true)]
    alpha2: Option<Scalar>,
    #[arg(long, value_parser = scalar, allow_hyphen_values = true)]
    beta2: Option<Scalar>,
    /// Also search for a concrete non-isomorphism witness.
    #[arg(long)]
    refute: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Config path, or demo:cor31-split.
    config: String,
    /// Overrides the config's output path.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FixtureArgs {
    config: String,
    #[arg(long, default_value = "fixtures")]
    out: PathBuf,
}

fn load(config: &str) -> virloop::Result<RunConfig> {
    if let Some(name) = config.strip_prefix("demo:") {
        return run::demo_config(name).ok_or_else(|| {
            Error::config("config", format!("unknown demo {name:?}; known: {}", run::DEMOS.join(", ")))
        });
    }
    run::load_config(std::path::Path::new(config))
}

fn emit<T: Serialize>(value: &T) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value).expect("serializable");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn status_code(s: ProbeStatus) -> u8 {
    s.exit_code() as u8
}

fn execute(cmd: Command) -> virloop::Result<u8> {
    match cmd {
        Command::IntModule(a) => {
            let psi = PsiSource::Character(CharacterPsi::new(vec![a.psi.clone().unwrap_or(Scalar::from(1))]));
            let module = if a.raw {
                IntModule::raw(a.alpha.clone(), a.beta.clone(), psi)
            } else {
                IntModule::prime_module(&a.alpha, &a.beta, psi)
            };
            let closure = module
                .submodule_closure(&[IntVector::basis(a.seed)], a.window, a.max_degree)
                .map_err(|e| Error::config("--seed", e.to_string()))?;
            #[derive(Serialize)]
            struct Out {
                alpha: Scalar,
                beta: Scalar,
                irreducible: bool,
                #[serde(flatten)]
                closure: virloop::modules_int::ClosureReport,
            }
            emit(&Out {
                alpha: module.alpha().clone(),
                beta: module.beta().clone(),
                irreducible: is_irreducible_int(module.alpha(), module.beta()),
                closure: closure.report(),
            });
            Ok(0)
        }
        Command::Verma(a) => {
            let params = ModuleParams {
                verma: a.verma.clone(),
                alpha: Scalar::from(0),
                beta: Scalar::from(0),
                psi: None,
                window: (0, 0),
            };
            let spec = params.spec()?;
            let module = spec.build("").map_err(flag_names)?;
            if let Some(dir) = &a.dump {
                let cfg = RunConfig {
                    algebra: spec.algebra.clone(),
                    phi: spec.phi.clone(),
                    psi: spec.psi.clone(),
                    alpha: spec.alpha.clone(),
                    beta: spec.beta.clone(),
                    depth: spec.depth,
                    window: (0, 0),
                    probes: Vec::new(),
                    seed: 0,
                    property_samples: 0,
                    output: None,
                    record_timing: false,
                };
                run::fixture_dump(&cfg, dir)?;
            }
            emit(&module.verma().level_reports());
            Ok(0)
        }
        Command::Tensor(a) => {
            let module = a.module.build()?;
            match a.op {
                Some(TensorOp::Act { element, vector }) => {
                    let alg = module.verma().algebra().clone();
                    let u = parse_uea(&alg, &element).map_err(|e| Error::config("--element", e.to_string()))?;
                    let v = parse_tensor_vector(&module, &vector)
                        .map_err(|e| Error::config("--vector", e.to_string()))?;
                    let out = module.act_uea(&u, &v)?;
                    #[derive(Serialize)]
                    struct Out {
                        element: String,
                        input: Vec<virloop::TensorTerm>,
                        result: Vec<virloop::TensorTerm>,
                        weight_offsets: Vec<i64>,
                    }
                    emit(&Out {
                        element: u.to_string(),
                        input: v.to_terms(),
                        result: out.to_terms(),
                        weight_offsets: out.weight_split().keys().copied().collect(),
                    });
                }
                None => {
                    let mut weights = Vec::new();
                    for n in a.module.window.0..=a.module.window.1 {
                        weights.push(run::WeightDim {
                            offset: n,
                            weight: module.weight(n),
                            truncated_dim: module.truncated_weight_dim(n, module.depth())?,
                        });
                    }
                    #[derive(Serialize)]
                    struct Out {
                        weights: Vec<run::WeightDim>,
                        generation: virloop::GenerationReport,
                    }
                    emit(&Out {
                        weights,
                        generation: module.generation_check(module.depth(), a.module.window)?,
                    });
                }
            }
            Ok(0)
        }
        Command::EndoProbe(a) => {
            let module = a.module.build()?;
            let cert = endo_probe(&module, a.m, a.k.unwrap_or(module.depth()))?;
            emit(&cert);
            Ok(status_code(cert.status))
        }
        Command::XProbe(a) => {
            let module = a.module.build()?;
            let b = parse_label(module.verma().algebra(), &a.b).map_err(|e| Error::config("--b", e.to_string()))?;
            let w = parse_tensor_vector(&module, &a.w).map_err(|e| Error::config("--w", e.to_string()))?;
            let case = match a.case {
                CaseArg::I => XCase::I,
                CaseArg::Ii => XCase::II,
            };
            let cert = theorem31_x(case, &module, &b, &w)?;
            emit(&cert);
            Ok(status_code(cert.status))
        }
        Command::Cor31(a) => {
            let module = a.module.build()?;
            let b = parse_label(module.verma().algebra(), &a.b).map_err(|e| Error::config("--b", e.to_string()))?;
            let cert = cor31_check(&module, &b, a.module.window)?;
            emit(&cert);
            Ok(status_code(cert.status))
        }
        Command::PsiSep(a) => {
            let m1 = a.module.build()?;
            let mut p2 = a.module.clone();
            p2.psi = Some(a.psi2.clone());
            if let Some(x) = &a.alpha2 {
                p2.alpha = x.clone();
            }
            if let Some(x) = &a.beta2 {
                p2.beta = x.clone();
            }
            let m2 = p2.build().map_err(|e| match e {
                Error::Config { path, message } => Error::Config {
                    path: format!("{path}2"),
                    message,
                },
                other => other,
            })?;
            let sep = psi_separation(&m1, &m2, m1.depth(), a.module.window)?;
            emit(&sep);
            Ok(match &sep {
                Separation::Equal => 0,
                Separation::Witness(c) => status_code(c.status),
            })
        }
        Command::IsoCoeffs(a) => {
            #[derive(Serialize)]
            struct Out {
                coefficients: virloop::analysis::IsoPolyCoeffs<Scalar>,
                identity_on_grid: bool,
            }
            let holds = iso_poly_identity_check(&a.a, &a.beta1, &a.q, &a.beta2, &square_grid(1, 4))?;
            emit(&Out {
                coefficients: iso_poly_coeffs(&a.a, &a.beta1, &a.q, &a.beta2),
                identity_on_grid: holds,
            });
            Ok(0)
        }
        Command::IsoCheck(a) => {
            let m1 = a.module.build()?;
            let mut p2 = a.module.clone();
            if let Some(x) = &a.phi2 {
                p2.verma.phi = x.clone();
            }
            if let Some(x) = &a.central2 {
                p2.verma.central = Some(x.clone());
            }
            if let Some(x) = &a.psi2 {
                p2.psi = Some(x.clone());
            }
            if let Some(x) = &a.alpha2 {
                p2.alpha = x.clone();
            }
            if let Some(x) = &a.beta2 {
                p2.beta = x.clone();
            }
            let m2 = p2.build()?;
            let (s1, s2) = (module_signature(&m1)?, module_signature(&m2)?);
            let refutation = if a.refute {
                iso_refute(&m1, &m2, m1.depth(), a.module.window)?
            } else {
                None
            };
            emit(&run::IsoCheckResult {
                isomorphic: iso_check(&s1, &s2),
                signature1: s1,
                signature2: s2,
                refutation,
            });
            Ok(0)
        }
        Command::Run(a) => {
            let mut cfg = load(&a.config)?;
            if let Some(out) = a.output {
                cfg.output = Some(out.display().to_string());
            }
            let report: Report = run::run_to_file(&cfg)?;
            if cfg.output.is_none() {
                use std::io::Write;
                let _ = std::io::stdout().lock().write_all(report.to_json().as_bytes());
            }
            eprintln!("status: {}", report.status);
            Ok(status_code(report.status))
        }
        Command::Fixtures(a) => {
            let cfg = load(&a.config)?;
            for p in run::fixture_dump(&cfg, &a.out)? {
                println!("{}", p.display());
            }
            Ok(0)
        }
    }
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config { .. }
            | Error::Parse(_)
            | Error::DimensionMismatch { .. }
            | Error::NonCommutative { .. }
            | Error::NonAssociative { .. }
            | Error::BadUnit(_)
            | Error::InvalidAlgebra(_)
            | Error::ForbiddenIndex
            | Error::Invalid(_)
    )
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("VIRLOOP_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("VIRLOOP_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_CONFIG);
    }
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_config_error(&e) { EXIT_CONFIG } else { 1 })
        }
    }
}
