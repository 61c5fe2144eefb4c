//! Executable probes for the structure of `V(φ) ⊗ V'_{α,β,ψ}`: the
//! endomorphism probe, the depth-reducing operators behind the cyclicity
//! criterion, the cyclicity certificate for a non-unit `b`, ψ-separation of
//! non-isomorphic modules, and the polynomial system of the isomorphism
//! classification.
//!
//! Every probe returns a [`ProbeCertificate`] whose recorded operators,
//! inputs and outputs can be replayed with [`ProbeCertificate::replay`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coeff_algebra::{AlgebraB, BElem, CharacterPsi};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::SparseEchelon;
use crate::loop_vir::{BasisGen, Generator, UeaElement};
use crate::modules_int::{IntModule, PsiSource};
use crate::tensor_mod::{TensorKey, TensorModule, TensorTerm, TensorVector};
use crate::verma::{FunctionalPhi, PbwMonomial, PbwVector, VphiVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeStatus {
    Pass,
    Fail,
    HypothesisUnsatisfiable,
}

impl ProbeStatus {
    /// 0 pass, 1 fail, 2 hypothesis unsatisfiable.
    pub fn exit_code(self) -> i32 {
        match self {
            ProbeStatus::Pass => 0,
            ProbeStatus::Fail => 1,
            ProbeStatus::HypothesisUnsatisfiable => 2,
        }
    }
}

impl fmt::Display for ProbeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProbeStatus::Pass => "pass",
            ProbeStatus::Fail => "fail",
            ProbeStatus::HypothesisUnsatisfiable => "hypothesis-unsatisfiable",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeKind {
    EndoProbe,
    XProbeCaseI,
    XProbeCaseII,
    Cor31,
    PsiSeparation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum XCase {
    I,
    II,
}

/// One word of an operator: `coeff · g_1 g_2 ⋯ g_r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordRecord {
    pub coeff: String,
    pub word: Vec<String>,
}

/// `operator · input = output` in module number `module`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayRecord {
    pub label: String,
    pub module: usize,
    pub operator: Vec<WordRecord>,
    pub input: Vec<TensorTerm>,
    pub output: Vec<TensorTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LAttempt {
    pub l: i64,
    pub outcome: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeCertificate {
    pub kind: ProbeKind,
    pub status: ProbeStatus,
    pub parameters: BTreeMap<String, String>,
    pub operator: Vec<WordRecord>,
    pub facts: Vec<Fact>,
    pub ranks: BTreeMap<String, usize>,
    pub attempts: Vec<LAttempt>,
    pub replays: Vec<ReplayRecord>,
    pub witness: Vec<TensorTerm>,
    pub notes: Vec<String>,
}

impl ProbeCertificate {
    fn new(kind: ProbeKind) -> Self {
        ProbeCertificate {
            kind,
            status: ProbeStatus::Fail,
            parameters: BTreeMap::new(),
            operator: Vec::new(),
            facts: Vec::new(),
            ranks: BTreeMap::new(),
            attempts: Vec::new(),
            replays: Vec::new(),
            witness: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == ProbeStatus::Pass
    }

    pub fn fact(&self, name: &str) -> Option<&Fact> {
        self.facts.iter().find(|f| f.name == name)
    }

    fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    fn push_fact(&mut self, name: &str, holds: bool, detail: impl Into<String>) -> bool {
        self.facts.push(Fact {
            name: name.to_string(),
            holds,
            detail: detail.into(),
        });
        holds
    }

    fn record<F: Field>(
        &mut self,
        label: impl Into<String>,
        module: usize,
        op: &UeaElement<F>,
        input: &TensorVector<F>,
        output: &TensorVector<F>,
    ) {
        self.replays.push(ReplayRecord {
            label: label.into(),
            module,
            operator: uea_to_records(op),
            input: input.to_terms(),
            output: output.to_terms(),
        });
    }

    fn unsatisfiable(mut self, note: impl Into<String>) -> Self {
        self.status = ProbeStatus::HypothesisUnsatisfiable;
        self.notes.push(note.into());
        self
    }

    /// Re-executes every replay record; `modules[r.module]` is the module the
    /// record refers to. True iff every recorded output is reproduced.
    pub fn replay<F: Field>(&self, modules: &[&TensorModule<F>]) -> Result<bool> {
        for r in &self.replays {
            let module = modules.get(r.module).ok_or_else(|| {
                Error::Invalid(format!("replay needs module #{}", r.module))
            })?;
            let op = records_to_uea::<F>(&r.operator)?;
            let input = TensorVector::from_terms(&r.input)?;
            let expected = TensorVector::from_terms(&r.output)?;
            if module.act_uea(&op, &input)? != expected {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn uea_to_records<F: Field>(u: &UeaElement<F>) -> Vec<WordRecord> {
    u.words()
        .map(|(w, c)| WordRecord {
            coeff: c.to_string(),
            word: w.iter().map(ToString::to_string).collect(),
        })
        .collect()
}

pub fn records_to_uea<F: Field>(records: &[WordRecord]) -> Result<UeaElement<F>> {
    let mut out = UeaElement::zero();
    for r in records {
        let c = F::parse_text(&r.coeff)
            .ok_or_else(|| Error::Parse(format!("bad coefficient {:?}", r.coeff)))?;
        let word = r
            .word
            .iter()
            .map(|g| g.parse::<BasisGen>())
            .collect::<Result<Vec<_>>>()?;
        out.add_word(word, c);
    }
    Ok(out)
}

fn fmt_elem<F: Field>(b: &BElem<F>) -> String {
    let parts: Vec<String> = b.coords().iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn lie<F: Field>(degree: i64, b: &BElem<F>) -> UeaElement<F> {
    UeaElement::from_lie(&Generator::d(degree, b.clone()).to_element())
}

fn product<F: Field>(factors: &[UeaElement<F>]) -> UeaElement<F> {
    factors
        .iter()
        .fold(UeaElement::identity(), |acc, f| acc.word_multiply(f))
}

fn psi_values<F: Field>(int: &IntModule<F>) -> Result<CharacterPsi<F>> {
    match &int.params().psi {
        PsiSource::Character(psi) => Ok(psi.clone()),
        PsiSource::Abstract => Err(Error::Invalid(
            "probes need a concrete character ψ on a finite-dimensional B".into(),
        )),
    }
}

/// Outcome of the search for the probe index n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeSearch {
    Found(i64),
    /// Every candidate failed; some condition vanishes identically in n.
    Degenerate { scanned: (i64, i64) },
}

/// Smallest `n > k` with
/// `(α+m+nβ)(α+n+m+nβ) ≠ 0` and, for `1 <= i <= k`,
/// `(α+i+m+2nβ)(α+m+nβ)(α+n+m+nβ) ≠ (α+m+2nβ)(α+i+m+nβ)(α+i+n+m+nβ)`.
///
/// Each condition fails on at most three n unless it fails identically, so
/// scanning `3k + 3` candidates decides the question.
pub fn find_probe_n<F: Field>(alpha: &F, beta: &F, m: i64, k: usize) -> ProbeSearch {
    let k = k as i64;
    let lo = k + 1;
    let hi = k + 3 + 3 * k;
    let am = alpha.clone() + F::from_i64(m);
    for n in lo..=hi {
        let nf = F::from_i64(n);
        let p = am.clone() + nf.clone() * beta.clone();
        let q = p.clone() + nf.clone();
        let r = am.clone() + F::from_i64(2 * n) * beta.clone();
        if (p.clone() * q.clone()).is_zero() {
            continue;
        }
        let ok = (1..=k).all(|i| {
            let fi = F::from_i64(i);
            let lhs = (r.clone() + fi.clone()) * p.clone() * q.clone();
            let rhs = r.clone() * (p.clone() + fi.clone()) * (q.clone() + fi);
            lhs != rhs
        });
        if ok {
            return ProbeSearch::Found(n);
        }
    }
    ProbeSearch::Degenerate { scanned: (lo, hi) }
}

/// `w = d_{2n} - (α+m+2nβ)/((α+m+nβ)(α+m+n+nβ)) d_n²` with `d_j = d_j ⊗ 1`.
pub fn endo_operator<F: Field>(alg: &AlgebraB<F>, alpha: &F, beta: &F, m: i64, n: i64) -> Result<(UeaElement<F>, F)> {
    let am = alpha.clone() + F::from_i64(m);
    let nf = F::from_i64(n);
    let num = am.clone() + F::from_i64(2 * n) * beta.clone();
    let p = am.clone() + nf.clone() * beta.clone();
    let den = p.clone() * (p + nf);
    let ratio = num * den.inv().ok_or(Error::DivisionByZero)?;
    let dn = lie(n, alg.unit());
    let w = lie(2 * n, alg.unit()).add(&product(&[dn.clone(), dn]).scale(&-ratio.clone()));
    Ok((w, ratio))
}

/// The endomorphism probe at `v_φ ⊗ v_m` with depth `k`: `w` kills
/// `v_φ ⊗ v_m`, and the images `w·(x ⊗ v_{m+i})` over the quotient basis
/// of every level `1 <= i <= k` are nonzero and independent.
pub fn endo_probe<F: Field>(module: &TensorModule<F>, m: i64, k: usize) -> Result<ProbeCertificate> {
    if k > module.depth() {
        return Err(Error::DepthExceeded {
            level: k,
            depth: module.depth(),
        });
    }
    let int = module.int();
    let idx = int.index_set();
    if !idx.contains(m) {
        return Err(Error::ForbiddenIndex);
    }
    let (alpha, beta) = (int.alpha().clone(), int.beta().clone());
    let mut cert = ProbeCertificate::new(ProbeKind::EndoProbe);
    cert.param("alpha", &alpha);
    cert.param("beta", &beta);
    cert.param("m", m);
    cert.param("k", k);
    let n = match find_probe_n(&alpha, &beta, m, k) {
        ProbeSearch::Found(n) => n,
        ProbeSearch::Degenerate { scanned } => {
            return Ok(cert.unsatisfiable(format!(
                "degenerate parameters: no n in [{}, {}] satisfies the probe conditions, one of them vanishes identically",
                scanned.0, scanned.1
            )));
        }
    };
    cert.param("n", n);
    let (w, ratio) = endo_operator(module.verma().algebra(), &alpha, &beta, m, n)?;
    cert.param("ratio", &ratio);
    cert.operator = uea_to_records(&w);

    let seed = module.highest(m)?;
    let image = module.act_uea(&w, &seed)?;
    cert.record("w on v_phi (x) v_m", 0, &w, &seed, &image);
    let annihilates = cert.push_fact("annihilation", image.is_zero(), "w·(v_φ ⊗ v_m) = 0");

    let mut span: SparseEchelon<TensorKey, F> = SparseEchelon::new();
    let mut expected = 0;
    let mut all_nonzero = true;
    for i in 1..=k {
        if !idx.contains(m + i as i64) {
            cert.notes
                .push(format!("level {i} skipped: v_{} is not in the module", m + i as i64));
            continue;
        }
        let dim = module.verma().vphi_dim(i)?;
        expected += dim;
        for q in 0..dim {
            let x = TensorVector::basis(i, q, m + i as i64);
            let y = module.act_uea(&w, &x)?;
            if y.is_zero() {
                all_nonzero = false;
            }
            span.insert(y.as_sparse());
            cert.record(format!("w on x[{i},{q}] (x) v_{}", m + i as i64), 0, &w, &x, &y);
        }
    }
    let nonzero = cert.push_fact("images-nonzero", all_nonzero, "w·(x_{-i} ⊗ v_{m+i}) ≠ 0 for every basis x_{-i}");
    cert.ranks.insert("independence-rank".into(), span.rank());
    cert.ranks.insert("expected-rank".into(), expected);
    let independent = cert.push_fact(
        "independence",
        span.rank() == expected,
        format!("rank {} of {expected} images", span.rank()),
    );
    cert.status = if annihilates && nonzero && independent {
        ProbeStatus::Pass
    } else {
        ProbeStatus::Fail
    };
    Ok(cert)
}

/// Bound on the l-scan of [`theorem31_x`] for top depth `n`.
pub fn l_max(n: usize) -> i64 {
    50 + 10 * n as i64
}

fn vphi_part<F: Field>(module: &TensorModule<F>, w: &TensorVector<F>, level: usize) -> Result<VphiVector<F>> {
    let mut x = module.verma().vphi_zero(level)?;
    for (&(i, q, _), c) in w.terms() {
        if i == level {
            x.coords[q] = c.clone();
        }
    }
    Ok(x)
}

fn act_elem_vphi<F: Field>(
    module: &TensorModule<F>,
    degree: i64,
    b: &BElem<F>,
    x: &VphiVector<F>,
) -> Result<bool> {
    let mut acc: Option<Vec<F>> = None;
    for (j, c) in b.terms() {
        if let Some(img) = module.verma().act_on_vphi(&BasisGen::d(degree, j), x)? {
            let acc = acc.get_or_insert_with(|| vec![F::zero(); img.coords.len()]);
            for (a, y) in acc.iter_mut().zip(img.coords) {
                *a = a.clone() + c.clone() * y;
            }
        }
    }
    Ok(acc.is_some_and(|v| v.iter().any(|y| !y.is_zero())))
}

/// The depth-reducing operator X of the cyclicity criterion, for a weight
/// vector `w = Σ_{i<=n} x_{-i} ⊗ v_{m+i}` with `x_{-n} ≠ 0`.
///
/// Case I (β ≠ 0): `X = d_l⊗b - (α+m+n+lβ)/((α+m+n+β)(α+m+n+1+(l-1)β)) d_{l-1} d_1⊗b`.
/// Case II (β = 0): `X = d_{2l}⊗b - 1/((α+m+n+1)(α+m+n+l)) d_l d_{l-1} d_1⊗b`.
///
/// Scans `l = n+1, …, l_max(n)` and stops at the first l with `X·w ≠ 0`.
pub fn theorem31_x<F: Field>(
    case: XCase,
    module: &TensorModule<F>,
    b: &BElem<F>,
    w: &TensorVector<F>,
) -> Result<ProbeCertificate> {
    module.check(w)?;
    let alg = module.verma().algebra().clone();
    alg.check_dim(b)?;
    let kind = match case {
        XCase::I => ProbeKind::XProbeCaseI,
        XCase::II => ProbeKind::XProbeCaseII,
    };
    let mut cert = ProbeCertificate::new(kind);
    let int = module.int();
    let (alpha, beta) = (int.alpha().clone(), int.beta().clone());
    cert.param("alpha", &alpha);
    cert.param("beta", &beta);
    cert.param("b", fmt_elem(b));
    if w.is_zero() {
        return Err(Error::Invalid("w must be nonzero".into()));
    }
    let m = w
        .weight_offset()
        .ok_or_else(|| Error::Invalid("w is not a weight vector".into()))?;
    let n = w.top_depth().expect("nonzero");
    cert.param("m", m);
    cert.param("n", n);
    cert.witness = w.to_terms();

    if !(alpha.clone() + beta.clone()).is_integer() {
        cert.push_fact("alpha+beta-not-integer", true, "α + β ∉ Z");
    } else {
        cert.push_fact("alpha+beta-not-integer", false, "α + β ∉ Z");
        return Ok(cert.unsatisfiable("hypothesis α + β ∉ Z fails"));
    }
    match case {
        XCase::I if beta.is_zero() => return Ok(cert.unsatisfiable("Case I needs β ≠ 0")),
        XCase::II if !beta.is_zero() => return Ok(cert.unsatisfiable("Case II needs β = 0")),
        _ => {}
    }
    if n == 0 {
        cert.notes.push("top depth 0: w is already a multiple of v_φ ⊗ v_m".into());
        cert.status = ProbeStatus::Pass;
        return Ok(cert);
    }
    let top = vphi_part(module, w, n)?;
    if !act_elem_vphi(module, 1, b, &top)? {
        if act_elem_vphi(module, 2, b, &top)? {
            return Ok(cert.unsatisfiable(
                "d_1⊗b·x_{-n} = 0 but d_2⊗b·x_{-n} ≠ 0: the d_2 branch has no explicit operator",
            ));
        }
        return Err(Error::Invalid(
            "d_1⊗b·x_{-n} = 0 and d_2⊗b·x_{-n} = 0: input rejected".into(),
        ));
    }

    let amn = alpha.clone() + F::from_i64(m + n as i64);
    let top_in = module.highest(m + n as i64)?;
    let d1b = lie(1, b);
    let bound = l_max(n);
    cert.param("l_max", bound);
    for l in (n as i64 + 1)..=bound {
        let lf = F::from_i64(l);
        let (head, tail, num, den) = match case {
            XCase::I => (
                lie(l, b),
                vec![lie(l - 1, alg.unit()), d1b.clone()],
                amn.clone() + lf.clone() * beta.clone(),
                (amn.clone() + beta.clone())
                    * (amn.clone() + F::one() + (lf.clone() - F::one()) * beta.clone()),
            ),
            XCase::II => (
                lie(2 * l, b),
                vec![lie(l, alg.unit()), lie(l - 1, alg.unit()), d1b.clone()],
                F::one(),
                (amn.clone() + F::one()) * (amn.clone() + lf.clone()),
            ),
        };
        let Some(inv) = den.inv() else {
            cert.attempts.push(LAttempt {
                l,
                outcome: "denominator-zero".into(),
            });
            continue;
        };
        let ratio = num * inv;
        let x = head.add(&product(&tail).scale(&-ratio.clone()));
        let kill = module.act_uea(&x, &top_in)?;
        let xw = module.act_uea(&x, w)?;
        let reduced = xw.top_depth().is_none_or(|d| d < n);
        let outcome = if !kill.is_zero() {
            "annihilation-failed"
        } else if !reduced {
            "depth-not-reduced"
        } else if xw.is_zero() {
            "zero-output"
        } else {
            "pass"
        };
        cert.attempts.push(LAttempt {
            l,
            outcome: outcome.into(),
        });
        if outcome == "zero-output" {
            continue;
        }
        cert.param("l", l);
        cert.param("ratio", &ratio);
        cert.operator = uea_to_records(&x);
        cert.record("X on v_phi (x) v_{m+n}", 0, &x, &top_in, &kill);
        cert.record("X on w", 0, &x, w, &xw);
        cert.push_fact("annihilation", kill.is_zero(), "X·(v_φ ⊗ v_{m+n}) = 0");
        cert.push_fact(
            "depth-reduced",
            reduced,
            format!("top depth of X·w is {:?}, input top depth {n}", xw.top_depth()),
        );
        cert.push_fact("nonzero", !xw.is_zero(), "X·w ≠ 0");
        cert.status = if outcome == "pass" {
            ProbeStatus::Pass
        } else {
            ProbeStatus::Fail
        };
        return Ok(cert);
    }
    cert.notes.push(format!("X·w = 0 for every admissible l ≤ {bound}"));
    cert.status = ProbeStatus::Fail;
    Ok(cert)
}

fn is_nilpotent<F: Field>(alg: &AlgebraB<F>, b: &BElem<F>) -> Result<bool> {
    let mut p = b.clone();
    for _ in 0..=alg.dim() {
        if p.is_zero() {
            return Ok(true);
        }
        p = alg.mult(&p, b)?;
    }
    Ok(p.is_zero())
}

/// Cyclicity certificate for a `b` with `ψ(b) ≠ 0` and `φ(d_0 ⊗ <b>) = 0`:
/// (a) `d_{-1}⊗b·ṽ_φ` lies in the radical at level 1; (b) the ladder
/// identities `d_{-1}⊗b·(v_φ⊗v_{n+1}) = ψ(b)(α+n+1-β) v_φ⊗v_n` and
/// `d_1⊗b·(v_φ⊗v_n) = ψ(b)(α+n+β) v_φ⊗v_{n+1}` hold with nonzero
/// coefficients on the window; (c) hence all `U(Vir_B)(v_φ⊗v_n)` coincide.
pub fn cor31_check<F: Field>(
    module: &TensorModule<F>,
    b: &BElem<F>,
    window: (i64, i64),
) -> Result<ProbeCertificate> {
    let alg = module.verma().algebra().clone();
    alg.check_dim(b)?;
    if module.depth() < 1 {
        return Err(Error::DepthExceeded { level: 1, depth: 0 });
    }
    let int = module.int();
    let psi = psi_values(int)?;
    let phi = module.verma().phi().clone();
    let (alpha, beta) = (int.alpha().clone(), int.beta().clone());
    let mut cert = ProbeCertificate::new(ProbeKind::Cor31);
    cert.param("alpha", &alpha);
    cert.param("beta", &beta);
    cert.param("b", fmt_elem(b));
    cert.param("window", format!("[{}, {}]", window.0, window.1));

    let psi_b = psi.eval(b);
    cert.param("psi(b)", &psi_b);
    let mut ok = true;
    ok &= cert.push_fact(
        "alpha+beta-not-integer",
        !(alpha.clone() + beta.clone()).is_integer(),
        "α + β ∉ Z",
    );
    ok &= cert.push_fact(
        "alpha-beta-not-integer",
        !(alpha.clone() - beta.clone()).is_integer(),
        "α - β ∉ Z",
    );
    let psi_ok = cert.push_fact("psi(b)-nonzero", !psi_b.is_zero(), format!("ψ(b) = {psi_b}"));
    if !psi_ok && is_nilpotent(&alg, b)? {
        cert.notes
            .push("b is nilpotent, so ψ(b) = 0 for every character: hypothesis unsatisfiable for this B".into());
    }
    ok &= psi_ok;
    let ideal = alg.ideal_generated(b)?;
    let bad: Vec<String> = ideal
        .iter()
        .filter(|a| !phi_d0(&phi, a).is_zero())
        .map(fmt_elem)
        .collect();
    ok &= cert.push_fact(
        "phi-vanishes-on-ideal",
        bad.is_empty(),
        if bad.is_empty() {
            format!("φ(d_0 ⊗ a) = 0 on a basis of <b> of size {}", ideal.len())
        } else {
            format!("φ(d_0 ⊗ a) ≠ 0 for a in {}", bad.join(", "))
        },
    );
    if !ok {
        return Ok(cert.unsatisfiable("preconditions fail, see facts"));
    }

    // (a)
    let mut x = PbwVector::zero();
    for (j, c) in b.terms() {
        x.add_scaled(c, &PbwVector::monomial(PbwMonomial::from_factors(vec![(1, j)])));
    }
    let level1 = module.verma().level(1)?;
    let in_radical = level1.in_radical(&level1.to_dense(&x)?);
    let stage_a = cert.push_fact(
        "radical-membership",
        in_radical,
        "d_{-1}⊗b·ṽ_φ lies in the radical at level 1",
    );

    // (b)
    let down = lie(-1, b);
    let up = lie(1, b);
    let idx = int.index_set();
    let mut stage_b = true;
    let mut zero_coeffs = Vec::new();
    for n in window.0..window.1 {
        if !idx.contains(n) || !idx.contains(n + 1) {
            continue;
        }
        let nf = F::from_i64(n);
        let c_down = psi_b.clone() * (alpha.clone() + nf.clone() + F::one() - beta.clone());
        let c_up = psi_b.clone() * (alpha.clone() + nf + beta.clone());
        let src = module.highest(n + 1)?;
        let got = module.act_uea(&down, &src)?;
        stage_b &= got == module.highest(n)?.scale(&c_down);
        cert.record(format!("d_-1 b ladder at n={n}"), 0, &down, &src, &got);
        let src = module.highest(n)?;
        let got = module.act_uea(&up, &src)?;
        stage_b &= got == module.highest(n + 1)?.scale(&c_up);
        cert.record(format!("d_1 b ladder at n={n}"), 0, &up, &src, &got);
        if c_down.is_zero() || c_up.is_zero() {
            zero_coeffs.push(n);
        }
    }
    let stage_b = cert.push_fact("ladders", stage_b, "both ladder identities hold exactly on the window");
    let nonzero = cert.push_fact(
        "ladder-coefficients-nonzero",
        zero_coeffs.is_empty(),
        format!("vanishing ladder coefficients at n in {zero_coeffs:?}"),
    );

    // (c)
    let stage_c = cert.push_fact(
        "cyclic-span-equality",
        stage_a && stage_b && nonzero,
        "U(Vir_B)(v_φ ⊗ v_n) is the same for every n in the window",
    );
    cert.operator = uea_to_records(&down.add(&up));
    cert.status = if stage_a && stage_b && stage_c {
        ProbeStatus::Pass
    } else {
        ProbeStatus::Fail
    };
    Ok(cert)
}

fn phi_d0<F: Field>(phi: &FunctionalPhi<F>, a: &BElem<F>) -> F {
    a.terms()
        .fold(F::zero(), |acc, (j, c)| acc + c.clone() * phi.d0[j].clone())
}

/// Result of [`psi_separation`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Separation {
    Equal,
    Witness(Box<ProbeCertificate>),
}

/// If `ψ1 ≠ ψ2`, finds `b` with `ψ1(b) = 0 ≠ ψ2(b)` and checks on five values
/// of `l > depth` that `d_l ⊗ b` kills the truncation of module 1 (levels
/// `<= depth`, `k` in the window) while acting nonzero on `v_{φ2} ⊗ v_k`.
pub fn psi_separation<F: Field>(
    m1: &TensorModule<F>,
    m2: &TensorModule<F>,
    depth: usize,
    window: (i64, i64),
) -> Result<Separation> {
    let psi1 = psi_values(m1.int())?;
    let psi2 = psi_values(m2.int())?;
    if psi1.values.len() != psi2.values.len() {
        return Err(Error::DimensionMismatch {
            expected: psi1.values.len(),
            got: psi2.values.len(),
        });
    }
    if depth > m1.depth() {
        return Err(Error::DepthExceeded {
            level: depth,
            depth: m1.depth(),
        });
    }
    if psi1 == psi2 {
        return Ok(Separation::Equal);
    }
    let b = psi1
        .kernel()
        .into_iter()
        .find(|b| !psi2.eval(b).is_zero())
        .ok_or_else(|| {
            Error::Invalid("ker ψ1 = ker ψ2 with ψ1 ≠ ψ2: ψ is not a unital character".into())
        })?;
    let mut cert = ProbeCertificate::new(ProbeKind::PsiSeparation);
    cert.param("b", fmt_elem(&b));
    cert.param("psi1(b)", psi1.eval(&b));
    cert.param("psi2(b)", psi2.eval(&b));
    cert.param("depth", depth);
    cert.param("window", format!("[{}, {}]", window.0, window.1));

    let (a2, b2) = (m2.int().alpha().clone(), m2.int().beta().clone());
    let idx2 = m2.int().index_set();
    let k = (window.0..=window.1)
        .find(|&k| idx2.contains(k) && !(a2.clone() + F::from_i64(k)).is_zero())
        .ok_or_else(|| Error::Invalid("window has no usable index for module 2".into()))?;
    cert.param("k", k);
    let idx1 = m1.int().index_set();
    let mut ls = Vec::new();
    let mut l = depth as i64 + 1;
    while ls.len() < 5 {
        if !(a2.clone() + F::from_i64(k) + F::from_i64(l) * b2.clone()).is_zero() {
            ls.push(l);
        }
        l += 1;
    }
    cert.param("l", format!("{ls:?}"));
    let mut ok = true;
    for &l in &ls {
        let op = lie(l, &b);
        let mut killed = true;
        for i in 0..=depth {
            for kk in window.0..=window.1 {
                if !idx1.contains(kk) {
                    continue;
                }
                for q in 0..m1.verma().vphi_dim(i)? {
                    killed &= m1.act_uea(&op, &TensorVector::basis(i, q, kk))?.is_zero();
                }
            }
        }
        if idx1.contains(k) {
            let src = m1.highest(k)?;
            let img = m1.act_uea(&op, &src)?;
            cert.record(format!("d_{l} b on module 1"), 0, &op, &src, &img);
        }
        let src = m2.highest(k)?;
        let img = m2.act_uea(&op, &src)?;
        cert.record(format!("d_{l} b on module 2"), 1, &op, &src, &img);
        ok &= cert.push_fact(
            &format!("annihilates-module-1 l={l}"),
            killed,
            "d_l⊗b kills every truncated basis vector of module 1",
        );
        ok &= cert.push_fact(
            &format!("acts-on-module-2 l={l}"),
            !img.is_zero(),
            format!("d_l⊗b·(v_φ2 ⊗ v_{k}) = {img}"),
        );
    }
    cert.operator = uea_to_records(&lie(ls[0], &b));
    cert.status = if ok { ProbeStatus::Pass } else { ProbeStatus::Fail };
    Ok(Separation::Witness(Box::new(cert)))
}

/// The coefficients of the polynomial in (m, n) that the isomorphism
/// classification extracts, in their printed grouping, with `A = α1 + l`
/// and `Q = α2 + p + i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoPolyCoeffs<F: Field> {
    pub c_mnsum: F,
    pub c_lin: F,
    pub c_mn: F,
    pub c_sq: F,
    pub c_const: F,
}

impl<F: Field> IsoPolyCoeffs<F> {
    pub fn all_zero(&self) -> bool {
        [&self.c_mnsum, &self.c_lin, &self.c_mn, &self.c_sq, &self.c_const]
            .iter()
            .all(|c| c.is_zero())
    }

    /// `c_mnsum·mn(m+n) + c_lin·(m+n) + c_mn·mn + c_sq·(m²+n²) + c_const`.
    pub fn eval(&self, m: i64, n: i64) -> F {
        let (mf, nf) = (F::from_i64(m), F::from_i64(n));
        let s = mf.clone() + nf.clone();
        let p = mf.clone() * nf.clone();
        self.c_mnsum.clone() * p.clone() * s.clone()
            + self.c_lin.clone() * s
            + self.c_mn.clone() * p
            + self.c_sq.clone() * (mf.clone() * mf + nf.clone() * nf)
            + self.c_const.clone()
    }
}

pub fn iso_poly_coeffs<F: Field>(a: &F, beta1: &F, q: &F, beta2: &F) -> IsoPolyCoeffs<F> {
    let (a, b1, q, b2) = (a.clone(), beta1.clone(), q.clone(), beta2.clone());
    let one = F::one();
    let two = F::from_i64(2);
    IsoPolyCoeffs {
        c_mnsum: b1.clone() * b2.clone() * (b1.clone() - b2.clone()),
        c_lin: a.clone() * q.clone() * (b2.clone() - b1.clone()) + b1.clone() * q.clone() * q.clone()
            - b2.clone() * a.clone() * a.clone(),
        c_mn: a.clone() * b2.clone() * (b2.clone() - one.clone() - two.clone() * b1.clone())
            + b1.clone() * q.clone() * (one + two * b2.clone() - b1.clone()),
        c_sq: b1.clone() * b2 * (q.clone() - a.clone()),
        c_const: a.clone() * (q.clone() - a) * q,
    }
}

/// Right side minus left side of
/// `(A+nβ1)(A+n+mβ1)(Q+(m+n)β2) = (A+(m+n)β1)(Q+nβ2)(Q+n+mβ2)`.
pub fn iso_poly_difference<F: Field>(a: &F, beta1: &F, q: &F, beta2: &F, m: i64, n: i64) -> F {
    let (mf, nf) = (F::from_i64(m), F::from_i64(n));
    let s = mf.clone() + nf.clone();
    let lhs = (a.clone() + nf.clone() * beta1.clone())
        * (a.clone() + nf.clone() + mf.clone() * beta1.clone())
        * (q.clone() + s.clone() * beta2.clone());
    let rhs = (a.clone() + s * beta1.clone())
        * (q.clone() + nf.clone() * beta2.clone())
        * (q.clone() + nf + mf * beta2.clone());
    rhs - lhs
}

/// Compares the grouped polynomial against the direct expansion on a grid
/// of at least 16 distinct points, which certifies a polynomial identity of
/// degree at most 3 in each variable when the grid contains a 4×4 product.
pub fn iso_poly_identity_check_with<F: Field>(
    coeffs: &IsoPolyCoeffs<F>,
    (a, beta1, q, beta2): (&F, &F, &F, &F),
    grid: &[(i64, i64)],
) -> Result<bool> {
    let mut pts = grid.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 16 {
        return Err(Error::Invalid(format!(
            "grid needs at least 16 distinct points, got {}",
            pts.len()
        )));
    }
    Ok(pts
        .iter()
        .all(|&(m, n)| coeffs.eval(m, n) == iso_poly_difference(a, beta1, q, beta2, m, n)))
}

pub fn iso_poly_identity_check<F: Field>(a: &F, beta1: &F, q: &F, beta2: &F, grid: &[(i64, i64)]) -> Result<bool> {
    let coeffs = iso_poly_coeffs(a, beta1, q, beta2);
    iso_poly_identity_check_with(&coeffs, (a, beta1, q, beta2), grid)
}

/// `{lo..=hi}²`.
pub fn square_grid(lo: i64, hi: i64) -> Vec<(i64, i64)> {
    (lo..=hi).flat_map(|m| (lo..=hi).map(move |n| (m, n))).collect()
}

/// The complete isomorphism invariant: ψ, φ, and the normalized (α, β).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoSignature<F: Field> {
    pub psi: Vec<F>,
    pub phi_d0: Vec<F>,
    pub phi_c: Vec<F>,
    pub alpha: F,
    pub beta: F,
}

pub fn iso_signature<F: Field>(phi: &FunctionalPhi<F>, alpha: &F, beta: &F, psi: &CharacterPsi<F>) -> IsoSignature<F> {
    let int = IntModule::prime_module(alpha, beta, PsiSource::Abstract);
    IsoSignature {
        psi: psi.values.clone(),
        phi_d0: phi.d0.clone(),
        phi_c: phi.c.clone(),
        alpha: int.alpha().clone(),
        beta: int.beta().clone(),
    }
}

pub fn module_signature<F: Field>(module: &TensorModule<F>) -> Result<IsoSignature<F>> {
    let psi = psi_values(module.int())?;
    Ok(iso_signature(module.verma().phi(), module.int().alpha(), module.int().beta(), &psi))
}

pub fn iso_check<F: Field>(s1: &IsoSignature<F>, s2: &IsoSignature<F>) -> bool {
    s1 == s2
}

/// A concrete reason two modules are not isomorphic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Refutation {
    PsiSeparation(Box<ProbeCertificate>),
    /// `φ1(d_0) + α1 - φ2(d_0) - α2 ∉ Z`: the weight supports are disjoint.
    WeightSupport { difference: String },
}

/// Looks for a concrete non-isomorphism witness. `None` means the
/// signatures agree or no witness of the supported kinds exists.
pub fn iso_refute<F: Field>(
    m1: &TensorModule<F>,
    m2: &TensorModule<F>,
    depth: usize,
    window: (i64, i64),
) -> Result<Option<Refutation>> {
    if iso_check(&module_signature(m1)?, &module_signature(m2)?) {
        return Ok(None);
    }
    if let Separation::Witness(cert) = psi_separation(m1, m2, depth, window)? {
        return Ok(Some(Refutation::PsiSeparation(cert)));
    }
    let diff = m1.weight(0) - m2.weight(0);
    if !diff.is_integer() {
        return Ok(Some(Refutation::WeightSupport {
            difference: diff.to_string(),
        }));
    }
    Ok(None)
}
