//! Batch runs: JSON configs, reports, and exact CSV fixtures.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    cor31_check, endo_probe, iso_check, iso_poly_coeffs, iso_poly_identity_check,
    iso_poly_identity_check_with, iso_refute, module_signature, psi_separation, square_grid,
    theorem31_x, IsoPolyCoeffs, IsoSignature, ProbeCertificate, ProbeStatus, Refutation,
    Separation, XCase,
};
use crate::coeff_algebra::{AlgebraB, BElem, CharacterPsi};
use crate::error::{Error, Result};
use crate::loop_vir::{BasisGen, LoopVir};
use crate::modules_int::{is_irreducible_int, IndexSet, IntModule, PsiSource};
use crate::notation::{parse_label, parse_tensor_vector};
use crate::scalar::GaussianRational as Scalar;
use crate::tensor_mod::{GenerationReport, TensorModule, TensorVector};
use crate::verma::{FunctionalPhi, LevelReport, VermaModule};

/// Largest depth a config may request.
pub const MAX_DEPTH: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraSpec {
    /// `trivial`, `truncated-poly d`, `split k`, `cyclic-group n`.
    Builtin(String),
    StructureConstants {
        /// `constants[i][j]` holds the coordinates of `e_i e_j`.
        constants: Vec<Vec<Vec<Scalar>>>,
        unit: Vec<Scalar>,
        #[serde(default)]
        labels: Option<Vec<String>>,
        #[serde(default)]
        name: Option<String>,
    },
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<AlgebraB<Scalar>> {
        match self {
            AlgebraSpec::Builtin(s) => AlgebraB::builtin(s),
            AlgebraSpec::StructureConstants {
                constants,
                unit,
                labels,
                name,
            } => AlgebraB::from_structure_constants(
                name.clone().unwrap_or_else(|| "custom".into()),
                constants.clone(),
                unit.clone(),
                labels.clone(),
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSpec {
    pub d0: Vec<Scalar>,
    #[serde(default)]
    pub c: Option<Vec<Scalar>>,
}

impl PhiSpec {
    pub fn build(&self, dim: usize) -> FunctionalPhi<Scalar> {
        let c = self
            .c
            .clone()
            .unwrap_or_else(|| vec![Scalar::from(0); dim]);
        FunctionalPhi::new(self.d0.clone(), c)
    }
}

/// An element of B: a label (`e0`, `t`, `1`, ...) or coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BSpec {
    Label(String),
    Coords(Vec<Scalar>),
}

impl BSpec {
    pub fn build(&self, alg: &AlgebraB<Scalar>) -> Result<BElem<Scalar>> {
        match self {
            BSpec::Label(l) => parse_label(alg, l),
            BSpec::Coords(c) => {
                let b = BElem(c.clone());
                alg.check_dim(&b)?;
                Ok(b)
            }
        }
    }
}

/// Parameters of one tensor module `V(φ) ⊗ V'_{α,β,ψ}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub algebra: AlgebraSpec,
    pub phi: PhiSpec,
    pub psi: Vec<Scalar>,
    pub alpha: Scalar,
    pub beta: Scalar,
    pub depth: usize,
}

fn at(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Config { .. } => e,
        other => Error::config(path, other.to_string()),
    }
}

impl ModuleSpec {
    /// Validates every field against the algebra; errors name the field.
    pub fn build(&self, prefix: &str) -> Result<TensorModule<Scalar>> {
        let p = |f: &str| {
            if prefix.is_empty() {
                f.to_string()
            } else {
                format!("{prefix}.{f}")
            }
        };
        let alg = self.algebra.build().map_err(at(&p("algebra")))?;
        let dim = alg.dim();
        if self.phi.d0.len() != dim {
            return Err(Error::config(
                p("phi.d0"),
                format!("expected {dim} values, got {}", self.phi.d0.len()),
            ));
        }
        if let Some(c) = &self.phi.c {
            if c.len() != dim {
                return Err(Error::config(
                    p("phi.c"),
                    format!("expected {dim} values, got {}", c.len()),
                ));
            }
        }
        let psi = CharacterPsi::new(self.psi.clone());
        if self.psi.len() != dim {
            return Err(Error::config(
                p("psi"),
                format!("expected {dim} values, got {}", self.psi.len()),
            ));
        }
        if !psi.check_character(&alg) {
            return Err(Error::config(p("psi"), "not a unital character of B"));
        }
        if self.depth > MAX_DEPTH {
            return Err(Error::config(
                p("depth"),
                format!("depth {} exceeds the limit {MAX_DEPTH}", self.depth),
            ));
        }
        let verma = VermaModule::new(Arc::new(alg), self.phi.build(dim), self.depth)
            .map_err(at(&p("phi")))?;
        let int = IntModule::prime_module(&self.alpha, &self.beta, PsiSource::Character(psi));
        TensorModule::new(Arc::new(verma), int).map_err(at(&p("psi")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProbeSpec {
    EndoProbe {
        m: i64,
        k: usize,
    },
    XProbe {
        case: XCase,
        b: BSpec,
        /// Vector expression, e.g. `d[-1] v @ 1`.
        w: String,
    },
    Cor31 {
        b: BSpec,
        #[serde(default)]
        window: Option<(i64, i64)>,
    },
    PsiSep {
        psi2: Vec<Scalar>,
        #[serde(default)]
        phi2: Option<PhiSpec>,
        #[serde(default)]
        alpha2: Option<Scalar>,
        #[serde(default)]
        beta2: Option<Scalar>,
    },
    IsoCheck {
        #[serde(default)]
        psi2: Option<Vec<Scalar>>,
        #[serde(default)]
        phi2: Option<PhiSpec>,
        #[serde(default)]
        alpha2: Option<Scalar>,
        #[serde(default)]
        beta2: Option<Scalar>,
        #[serde(default)]
        refute: bool,
    },
    IsoPoly {
        samples: usize,
    },
    Generation {
        #[serde(default)]
        depth: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub algebra: AlgebraSpec,
    pub phi: PhiSpec,
    pub psi: Vec<Scalar>,
    pub alpha: Scalar,
    pub beta: Scalar,
    pub depth: usize,
    pub window: (i64, i64),
    #[serde(default)]
    pub probes: Vec<ProbeSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub property_samples: usize,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub record_timing: bool,
}

impl RunConfig {
    pub fn module(&self) -> ModuleSpec {
        ModuleSpec {
            algebra: self.algebra.clone(),
            phi: self.phi.clone(),
            psi: self.psi.clone(),
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            depth: self.depth,
        }
    }
}

/// Parses a config; syntax and type errors carry the JSON path.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(&path, e.into_inner().to_string())
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    parse_config(&fs::read_to_string(path)?)
}

pub const DEMOS: &[&str] = &["cor31-split"];

/// Bundled configs.
pub fn demo_config(name: &str) -> Option<RunConfig> {
    let text = match name {
        "cor31-split" => include_str!("../demos/cor31-split.json"),
        _ => return None,
    };
    Some(parse_config(text).expect("bundled demo parses"))
}

fn other_module(
    base: &ModuleSpec,
    psi2: Option<&Vec<Scalar>>,
    phi2: Option<&PhiSpec>,
    alpha2: Option<&Scalar>,
    beta2: Option<&Scalar>,
) -> ModuleSpec {
    ModuleSpec {
        algebra: base.algebra.clone(),
        phi: phi2.cloned().unwrap_or_else(|| base.phi.clone()),
        psi: psi2.cloned().unwrap_or_else(|| base.psi.clone()),
        alpha: alpha2.cloned().unwrap_or_else(|| base.alpha.clone()),
        beta: beta2.cloned().unwrap_or_else(|| base.beta.clone()),
        depth: base.depth,
    }
}

/// Checks everything that can be checked without computing.
pub fn validate(config: &RunConfig) -> Result<TensorModule<Scalar>> {
    let (lo, hi) = config.window;
    if lo > hi {
        return Err(Error::config("window", format!("empty window [{lo}, {hi}]")));
    }
    let module = config.module().build("")?;
    let alg = module.verma().algebra().clone();
    for (i, probe) in config.probes.iter().enumerate() {
        let p = |f: &str| format!("probes[{i}].{f}");
        match probe {
            ProbeSpec::EndoProbe { m, k } => {
                if *k > config.depth {
                    return Err(Error::config(p("k"), format!("k = {k} exceeds depth {}", config.depth)));
                }
                if !module.int().index_set().contains(*m) {
                    return Err(Error::config(p("m"), Error::ForbiddenIndex.to_string()));
                }
            }
            ProbeSpec::XProbe { b, w, .. } => {
                b.build(&alg).map_err(at(&p("b")))?;
                parse_tensor_vector(&module, w).map_err(at(&p("w")))?;
            }
            ProbeSpec::Cor31 { b, window } => {
                b.build(&alg).map_err(at(&p("b")))?;
                if let Some((a, z)) = window {
                    if a > z {
                        return Err(Error::config(p("window"), format!("empty window [{a}, {z}]")));
                    }
                }
            }
            ProbeSpec::PsiSep {
                psi2,
                phi2,
                alpha2,
                beta2,
            } => {
                other_module(&config.module(), Some(psi2), phi2.as_ref(), alpha2.as_ref(), beta2.as_ref())
                    .build(&format!("probes[{i}]"))
                    .map_err(|e| rename_second(e, i))?;
            }
            ProbeSpec::IsoCheck {
                psi2,
                phi2,
                alpha2,
                beta2,
                ..
            } => {
                other_module(&config.module(), psi2.as_ref(), phi2.as_ref(), alpha2.as_ref(), beta2.as_ref())
                    .build(&format!("probes[{i}]"))
                    .map_err(|e| rename_second(e, i))?;
            }
            ProbeSpec::IsoPoly { .. } => {}
            ProbeSpec::Generation { depth } => {
                if depth.is_some_and(|d| d > config.depth) {
                    return Err(Error::config(p("depth"), "exceeds the module depth"));
                }
            }
        }
    }
    Ok(module)
}

/// Module-2 fields are spelled with a `2` suffix in probe specs.
fn rename_second(e: Error, i: usize) -> Error {
    match e {
        Error::Config { path, message } => {
            let prefix = format!("probes[{i}].");
            let rest = path.strip_prefix(&prefix).unwrap_or(&path);
            let head = rest.split('.').next().unwrap_or(rest);
            let renamed = match head {
                "phi" | "psi" | "alpha" | "beta" => rest.replacen(head, &format!("{head}2"), 1),
                _ => rest.to_string(),
            };
            Error::Config {
                path: format!("{prefix}{renamed}"),
                message,
            }
        }
        other => other,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSummary {
    pub name: String,
    pub dim: usize,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntSummary {
    pub alpha: Scalar,
    pub beta: Scalar,
    pub index_set: String,
    pub irreducible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightDim {
    pub offset: i64,
    pub weight: Scalar,
    pub truncated_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoCheckResult {
    pub isomorphic: bool,
    pub signature1: IsoSignature<Scalar>,
    pub signature2: IsoSignature<Scalar>,
    pub refutation: Option<Refutation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoPolySample {
    pub a: Scalar,
    pub beta1: Scalar,
    pub q: Scalar,
    pub beta2: Scalar,
    pub coeffs: IsoPolyCoeffs<Scalar>,
    pub identity_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoPolyResult {
    pub grid: (i64, i64),
    pub samples: Vec<IsoPolySample>,
    pub all_hold: bool,
    pub perturbation_rejected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeResult {
    EndoProbe(ProbeCertificate),
    XProbe(ProbeCertificate),
    Cor31(ProbeCertificate),
    PsiSep(Separation),
    IsoCheck(IsoCheckResult),
    IsoPoly(IsoPolyResult),
    Generation(GenerationReport),
}

impl ProbeResult {
    pub fn status(&self) -> ProbeStatus {
        match self {
            ProbeResult::EndoProbe(c) | ProbeResult::XProbe(c) | ProbeResult::Cor31(c) => c.status,
            ProbeResult::PsiSep(Separation::Witness(c)) => c.status,
            ProbeResult::PsiSep(Separation::Equal) | ProbeResult::IsoCheck(_) => ProbeStatus::Pass,
            ProbeResult::IsoPoly(r) => {
                if r.all_hold && r.perturbation_rejected {
                    ProbeStatus::Pass
                } else {
                    ProbeStatus::Fail
                }
            }
            ProbeResult::Generation(g) => {
                if g.covered {
                    ProbeStatus::Pass
                } else {
                    ProbeStatus::Fail
                }
            }
        }
    }
}

/// Fail beats hypothesis-unsatisfiable beats pass.
pub fn combine(statuses: impl IntoIterator<Item = ProbeStatus>) -> ProbeStatus {
    let mut out = ProbeStatus::Pass;
    for s in statuses {
        match s {
            ProbeStatus::Fail => return ProbeStatus::Fail,
            ProbeStatus::HypothesisUnsatisfiable => out = s,
            ProbeStatus::Pass => {}
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub samples: usize,
    pub passed: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: RunConfig,
    pub algebra: AlgebraSummary,
    pub verma: Vec<LevelReport>,
    pub int_module: IntSummary,
    pub weights: Vec<WeightDim>,
    pub probes: Vec<ProbeResult>,
    pub property_checks: Option<PropertyReport>,
    pub status: ProbeStatus,
    pub timing_ms: Option<u64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Report> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Equality ignoring the timing field.
    pub fn same_results(&self, other: &Report) -> bool {
        let strip = |r: &Report| Report {
            timing_ms: None,
            ..r.clone()
        };
        strip(self) == strip(other)
    }
}

fn run_probe(
    config: &RunConfig,
    module: &TensorModule<Scalar>,
    probe: &ProbeSpec,
    seed: u64,
) -> Result<ProbeResult> {
    let alg = module.verma().algebra().clone();
    Ok(match probe {
        ProbeSpec::EndoProbe { m, k } => ProbeResult::EndoProbe(endo_probe(module, *m, *k)?),
        ProbeSpec::XProbe { case, b, w } => {
            let b = b.build(&alg)?;
            let w = parse_tensor_vector(module, w)?;
            ProbeResult::XProbe(theorem31_x(*case, module, &b, &w)?)
        }
        ProbeSpec::Cor31 { b, window } => {
            let b = b.build(&alg)?;
            ProbeResult::Cor31(cor31_check(module, &b, window.unwrap_or(config.window))?)
        }
        ProbeSpec::PsiSep {
            psi2,
            phi2,
            alpha2,
            beta2,
        } => {
            let m2 = other_module(&config.module(), Some(psi2), phi2.as_ref(), alpha2.as_ref(), beta2.as_ref())
                .build("")?;
            ProbeResult::PsiSep(psi_separation(module, &m2, config.depth, config.window)?)
        }
        ProbeSpec::IsoCheck {
            psi2,
            phi2,
            alpha2,
            beta2,
            refute,
        } => {
            let m2 = other_module(&config.module(), psi2.as_ref(), phi2.as_ref(), alpha2.as_ref(), beta2.as_ref())
                .build("")?;
            let s1 = module_signature(module)?;
            let s2 = module_signature(&m2)?;
            let refutation = if *refute {
                iso_refute(module, &m2, config.depth, config.window)?
            } else {
                None
            };
            ProbeResult::IsoCheck(IsoCheckResult {
                isomorphic: iso_check(&s1, &s2),
                signature1: s1,
                signature2: s2,
                refutation,
            })
        }
        ProbeSpec::IsoPoly { samples } => ProbeResult::IsoPoly(iso_poly_run(*samples, seed)?),
        ProbeSpec::Generation { depth } => ProbeResult::Generation(
            module.generation_check(depth.unwrap_or(config.depth), config.window)?,
        ),
    })
}

/// A random Gaussian rational with small numerator and denominator.
pub fn random_scalar(rng: &mut impl Rng) -> Scalar {
    let re = Scalar::from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=6));
    if rng.gen_bool(0.25) {
        re + Scalar::from_ratio(rng.gen_range(-4..=4), rng.gen_range(1..=4)) * Scalar::i()
    } else {
        re
    }
}

/// Seeded samples of the isomorphism polynomial identity on `{1..4}²`.
pub fn iso_poly_run(samples: usize, seed: u64) -> Result<IsoPolyResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = square_grid(1, 4);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let (a, b1, q, b2) = (
            random_scalar(&mut rng),
            random_scalar(&mut rng),
            random_scalar(&mut rng),
            random_scalar(&mut rng),
        );
        let holds = iso_poly_identity_check(&a, &b1, &q, &b2, &grid)?;
        out.push(IsoPolySample {
            coeffs: iso_poly_coeffs(&a, &b1, &q, &b2),
            a,
            beta1: b1,
            q,
            beta2: b2,
            identity_holds: holds,
        });
    }
    // Control: a shifted constant term must break the identity.
    let zero = Scalar::from(0);
    let (a, q, b2) = (Scalar::from(1), Scalar::from(2), Scalar::from(3));
    let mut bumped = iso_poly_coeffs(&a, &zero, &q, &b2);
    bumped.c_const += Scalar::from(1);
    let rejected = !iso_poly_identity_check_with(&bumped, (&a, &zero, &q, &b2), &grid)?;
    Ok(IsoPolyResult {
        grid: (1, 4),
        all_hold: out.iter().all(|s| s.identity_holds),
        samples: out,
        perturbation_rejected: rejected,
    })
}

/// Seeded checks of `x·(y·v) - y·(x·v) = [x,y]·v` on the tensor module.
pub fn property_checks(module: &TensorModule<Scalar>, window: (i64, i64), samples: usize, seed: u64) -> Result<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vir = LoopVir::new(module.verma().algebra().clone());
    let dim = vir.algebra().dim();
    let depth = module.depth();
    let idx = module.int().index_set();
    let ks: Vec<i64> = (window.0..=window.1).filter(|&k| idx.contains(k)).collect();
    if ks.is_empty() {
        return Err(Error::config("window", "no admissible index in the window"));
    }
    let mut failures = Vec::new();
    for s in 0..samples {
        let level = rng.gen_range(0..=depth);
        let q = rng.gen_range(0..module.verma().vphi_dim(level)?.max(1));
        if module.verma().vphi_dim(level)? == 0 {
            continue;
        }
        let k = ks[rng.gen_range(0..ks.len())];
        let budget = ((depth - level) / 2) as i64;
        let gen = |rng: &mut ChaCha8Rng| {
            if rng.gen_bool(0.15) {
                BasisGen::c(rng.gen_range(0..dim))
            } else {
                BasisGen::d(rng.gen_range(-budget..=3), rng.gen_range(0..dim))
            }
        };
        let (x, y) = (gen(&mut rng), gen(&mut rng));
        let v = TensorVector::basis(level, q, k);
        let lhs = module
            .act_gen(&x, &module.act_gen(&y, &v)?)?
            .sub(&module.act_gen(&y, &module.act_gen(&x, &v)?)?);
        let rhs = module.act_lie(&vir.bracket_basis(&x, &y), &v)?;
        if lhs != rhs {
            failures.push(format!("sample {s}: x = {x}, y = {y}, v = x[{level},{q}] @ {k}"));
        }
    }
    Ok(PropertyReport {
        samples,
        passed: samples - failures.len(),
        failures,
    })
}

/// Executes a config. Identical configs give identical reports; timing is
/// recorded only when `record_timing` is set.
pub fn run(config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let module = validate(config)?;
    let verma = module.verma();
    let alg = verma.algebra();
    let int = module.int();
    let probes = config
        .probes
        .par_iter()
        .enumerate()
        .map(|(i, p)| run_probe(config, &module, p, config.seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let property_checks = if config.property_samples > 0 {
        Some(property_checks(&module, config.window, config.property_samples, config.seed)?)
    } else {
        None
    };
    let mut weights = Vec::new();
    for offset in config.window.0..=config.window.1 {
        weights.push(WeightDim {
            offset,
            weight: module.weight(offset),
            truncated_dim: module.truncated_weight_dim(offset, config.depth)?,
        });
    }
    let mut statuses: Vec<ProbeStatus> = probes.iter().map(ProbeResult::status).collect();
    if property_checks.as_ref().is_some_and(|p| !p.failures.is_empty()) {
        statuses.push(ProbeStatus::Fail);
    }
    Ok(Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        algebra: AlgebraSummary {
            name: alg.name().to_string(),
            dim: alg.dim(),
            labels: alg.labels().to_vec(),
        },
        verma: verma.level_reports(),
        int_module: IntSummary {
            alpha: int.alpha().clone(),
            beta: int.beta().clone(),
            index_set: match int.index_set() {
                IndexSet::All => "Z".into(),
                IndexSet::NonZero => "Z-{0}".into(),
            },
            irreducible: is_irreducible_int(int.alpha(), int.beta()),
        },
        weights,
        probes,
        property_checks,
        status: combine(statuses),
        timing_ms: config
            .record_timing
            .then(|| start.elapsed().as_millis() as u64),
    })
}

/// Runs a config and writes the report to `config.output` when set.
pub fn run_to_file(config: &RunConfig) -> Result<Report> {
    let report = run(config)?;
    if let Some(out) = &config.output {
        fs::write(out, report.to_json())?;
    }
    Ok(report)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Writes `gram.csv`, `radical.csv`, `action.csv`, `monomials.csv` and
/// `levels.json` into `dir`. Values are exact strings; rows are in a fixed
/// order, so reruns are byte-identical.
pub fn fixture_dump(config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let module = config.module().build("")?;
    let verma = module.verma();
    let dim = verma.algebra().dim();
    fs::create_dir_all(dir)?;
    let path = |name: &str| dir.join(name);

    let mut gram = csv::Writer::from_path(path("gram.csv")).map_err(csv_err)?;
    gram.write_record(["level", "row", "col", "value"]).map_err(csv_err)?;
    let mut radical = csv::Writer::from_path(path("radical.csv")).map_err(csv_err)?;
    radical
        .write_record(["level", "vector", "monomial", "value"])
        .map_err(csv_err)?;
    let mut monomials = csv::Writer::from_path(path("monomials.csv")).map_err(csv_err)?;
    monomials
        .write_record(["level", "index", "monomial", "in_quotient_basis"])
        .map_err(csv_err)?;
    for level in verma.levels().iter().filter(|l| l.level >= 1) {
        let lv = level.level.to_string();
        for (r, row) in level.gram.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                gram.write_record([lv.clone(), r.to_string(), c.to_string(), x.to_string()])
                    .map_err(csv_err)?;
            }
        }
        for (v, vec) in level.radical.iter().enumerate() {
            for (j, x) in vec.iter().enumerate() {
                if !num_traits::Zero::is_zero(x) {
                    radical
                        .write_record([lv.clone(), v.to_string(), level.monomials[j].to_string(), x.to_string()])
                        .map_err(csv_err)?;
                }
            }
        }
        for (j, m) in level.monomials.iter().enumerate() {
            monomials
                .write_record([
                    lv.clone(),
                    j.to_string(),
                    m.to_string(),
                    level.quotient.contains(&j).to_string(),
                ])
                .map_err(csv_err)?;
        }
    }

    let mut action = csv::Writer::from_path(path("action.csv")).map_err(csv_err)?;
    action
        .write_record(["generator", "source_level", "source_index", "target_level", "target_index", "value"])
        .map_err(csv_err)?;
    let mut gens = Vec::new();
    for degree in [-1, 1, 2] {
        for j in 0..dim {
            gens.push(BasisGen::d(degree, j));
        }
    }
    for level in 1..=verma.depth() {
        for g in &gens {
            let target = level as i64 - g.degree;
            if target < 1 || target > verma.depth() as i64 {
                continue;
            }
            for q in 0..verma.vphi_dim(level)? {
                let x = verma.basis_vector(level, q)?;
                if let Some(img) = verma.act_on_vphi(g, &x)? {
                    for (t, c) in img.coords.iter().enumerate() {
                        if !num_traits::Zero::is_zero(c) {
                            action
                                .write_record([
                                    g.to_string(),
                                    level.to_string(),
                                    q.to_string(),
                                    img.level.to_string(),
                                    t.to_string(),
                                    c.to_string(),
                                ])
                                .map_err(csv_err)?;
                        }
                    }
                }
            }
        }
    }
    for w in [&mut gram, &mut radical, &mut monomials, &mut action] {
        w.flush()?;
    }
    let levels: BTreeMap<usize, LevelReport> = verma
        .level_reports()
        .into_iter()
        .map(|r| (r.level, r))
        .collect();
    let mut json = serde_json::to_string_pretty(&levels).expect("levels serialize");
    json.push('\n');
    fs::write(path("levels.json"), json)?;
    Ok(["gram.csv", "radical.csv", "monomials.csv", "action.csv", "levels.json"]
        .iter()
        .map(|n| path(n))
        .collect())
}
