//! The loop-Virasoro Lie algebra Vir_B = Vir ⊗ B and formal words in its
//! enveloping algebra.
//!
//! Bracket convention (kept everywhere downstream):
//!
//! ```text
//! [d_m ⊗ a, d_n ⊗ b] = (n - m) d_{m+n} ⊗ ab + δ_{m,-n} (m³ - m)/12 C ⊗ ab
//! [d_n ⊗ a, C ⊗ b]   = 0
//! ```

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::coeff_algebra::{AlgebraB, BElem};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::add_entry;

pub const MAX_DEGREE: i64 = 1_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum GenKind {
    D,
    C,
}

/// A basis element `d_n ⊗ e_j` or `C ⊗ e_j` of Vir_B.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct BasisGen {
    pub kind: GenKind,
    pub degree: i64,
    pub bidx: usize,
}

impl BasisGen {
    pub fn d(degree: i64, bidx: usize) -> Self {
        BasisGen {
            kind: GenKind::D,
            degree,
            bidx,
        }
    }

    pub fn c(bidx: usize) -> Self {
        BasisGen {
            kind: GenKind::C,
            degree: 0,
            bidx,
        }
    }

    pub fn is_central(&self) -> bool {
        self.kind == GenKind::C
    }

    /// The anti-involution ω: d_n ⊗ b ↦ d_{-n} ⊗ b, C ⊗ b ↦ C ⊗ b.
    pub fn omega(self) -> Self {
        BasisGen {
            degree: -self.degree,
            ..self
        }
    }
}

impl Ord for BasisGen {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.degree, self.kind, self.bidx).cmp(&(other.degree, other.kind, other.bidx))
    }
}

impl PartialOrd for BasisGen {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BasisGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GenKind::D => write!(f, "d[{}]*e{}", self.degree, self.bidx),
            GenKind::C => write!(f, "C*e{}", self.bidx),
        }
    }
}

/// Inverse of `Display`: `d[n]*e{j}` or `C*e{j}`.
impl std::str::FromStr for BasisGen {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad basis generator {s:?}"));
        let s = s.trim();
        let (head, idx) = s.rsplit_once("*e").ok_or_else(bad)?;
        let bidx: usize = idx.parse().map_err(|_| bad())?;
        if head == "C" {
            return Ok(BasisGen::c(bidx));
        }
        let deg = head
            .strip_prefix("d[")
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        Ok(BasisGen::d(deg.parse().map_err(|_| bad())?, bidx))
    }
}

/// `d_n ⊗ b` or `C ⊗ b` for an arbitrary `b ∈ B`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Generator<F: Field> {
    pub kind: GenKind,
    pub degree: i64,
    pub b: BElem<F>,
}

impl<F: Field> Generator<F> {
    pub fn d(degree: i64, b: BElem<F>) -> Self {
        Generator {
            kind: GenKind::D,
            degree,
            b,
        }
    }

    pub fn c(b: BElem<F>) -> Self {
        Generator {
            kind: GenKind::C,
            degree: 0,
            b,
        }
    }

    pub fn to_element(&self) -> LieElement<F> {
        let mut out = LieElement::zero();
        for (j, c) in self.b.terms() {
            let g = BasisGen {
                kind: self.kind,
                degree: self.degree,
                bidx: j,
            };
            out.add_term(g, c.clone());
        }
        out
    }
}

/// A finite linear combination of basis generators, stored without zeros in
/// the canonical (degree, kind, B-index) order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LieElement<F: Field> {
    terms: BTreeMap<BasisGen, F>,
}

impl<F: Field> Default for LieElement<F> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<F: Field> LieElement<F> {
    pub fn zero() -> Self {
        LieElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(g: BasisGen) -> Self {
        Self::term(g, F::one())
    }

    pub fn term(g: BasisGen, c: F) -> Self {
        let mut out = Self::zero();
        out.add_term(g, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, g: BasisGen, c: F) {
        add_entry(&mut self.terms, g, c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisGen, &F)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &BasisGen) -> F {
        self.terms.get(g).cloned().unwrap_or_else(F::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(*g, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-F::one()))
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LieElement {
            terms: self
                .terms
                .iter()
                .map(|(g, x)| (*g, x.clone() * c.clone()))
                .collect(),
        }
    }

    /// Splits into (Vir⁻_B, Vir⁰_B, Vir⁺_B) parts by the sign of the degree.
    pub fn triangular_part(&self) -> (Self, Self, Self) {
        let mut parts = (Self::zero(), Self::zero(), Self::zero());
        for (g, c) in &self.terms {
            let part = match g.degree.cmp(&0) {
                Ordering::Less => &mut parts.0,
                Ordering::Equal => &mut parts.1,
                Ordering::Greater => &mut parts.2,
            };
            part.add_term(*g, c.clone());
        }
        parts
    }
}

impl<F: Field> fmt::Display for LieElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(g, c)| format!("({c})*{g}"))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `(m³ - m) / 12` as an exact field element.
pub fn central_coefficient<F: Field>(m: i64) -> F {
    let m = BigInt::from(m);
    let num = &m * &m * &m - &m;
    F::from_bigint(num) / F::from_i64(12)
}

/// The Lie algebra Vir_B over a fixed coefficient algebra.
#[derive(Clone, Debug)]
pub struct LoopVir<F: Field> {
    algebra: Arc<AlgebraB<F>>,
}

impl<F: Field> LoopVir<F> {
    pub fn new(algebra: Arc<AlgebraB<F>>) -> Self {
        LoopVir { algebra }
    }

    pub fn algebra(&self) -> &Arc<AlgebraB<F>> {
        &self.algebra
    }

    pub fn check_gen(&self, g: &BasisGen) -> Result<()> {
        if g.degree.abs() > MAX_DEGREE {
            return Err(Error::DegreeOutOfRange(g.degree));
        }
        if g.kind == GenKind::C && g.degree != 0 {
            return Err(Error::Invalid("central generators carry degree 0".into()));
        }
        if g.bidx >= self.algebra.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.algebra.dim(),
                got: g.bidx + 1,
            });
        }
        Ok(())
    }

    pub fn check(&self, x: &LieElement<F>) -> Result<()> {
        x.terms().try_for_each(|(g, _)| self.check_gen(g))
    }

    pub fn element(&self, g: &Generator<F>) -> Result<LieElement<F>> {
        self.algebra.check_dim(&g.b)?;
        let x = g.to_element();
        self.check(&x)?;
        Ok(x)
    }

    /// Bracket of two basis generators (no validation).
    pub fn bracket_basis(&self, x: &BasisGen, y: &BasisGen) -> LieElement<F> {
        let mut out = LieElement::zero();
        if x.is_central() || y.is_central() {
            return out;
        }
        let (m, n) = (x.degree, y.degree);
        let s = m + n;
        let central = if s == 0 && !(-1..=1).contains(&m) {
            Some(central_coefficient::<F>(m))
        } else {
            None
        };
        for (k, c) in self.algebra.basis_product(x.bidx, y.bidx) {
            if n != m {
                out.add_term(BasisGen::d(s, *k), F::from_i64(n - m) * c.clone());
            }
            if let Some(cc) = &central {
                out.add_term(BasisGen::c(*k), cc.clone() * c.clone());
            }
        }
        out
    }

    pub fn bracket(&self, x: &LieElement<F>, y: &LieElement<F>) -> Result<LieElement<F>> {
        self.check(x)?;
        self.check(y)?;
        let mut out = LieElement::zero();
        for (gx, cx) in x.terms() {
            for (gy, cy) in y.terms() {
                let cxy = cx.clone() * cy.clone();
                for (g, c) in self.bracket_basis(gx, gy).terms() {
                    out.add_term(*g, c.clone() * cxy.clone());
                }
            }
        }
        Ok(out)
    }
}

/// A scalar multiple of an ordered product of generators. Words act on
/// vectors right to left; the empty word is the identity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UeaWord<F: Field> {
    pub coeff: F,
    pub factors: Vec<BasisGen>,
}

impl<F: Field> UeaWord<F> {
    pub fn identity() -> Self {
        UeaWord {
            coeff: F::one(),
            factors: Vec::new(),
        }
    }

    pub fn new(coeff: F, factors: Vec<BasisGen>) -> Self {
        UeaWord { coeff, factors }
    }
}

/// A finite sum of words with like words combined.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UeaElement<F: Field> {
    words: BTreeMap<Vec<BasisGen>, F>,
}

impl<F: Field> UeaElement<F> {
    pub fn zero() -> Self {
        UeaElement {
            words: BTreeMap::new(),
        }
    }

    pub fn identity() -> Self {
        Self::from_word(UeaWord::identity())
    }

    pub fn from_word(w: UeaWord<F>) -> Self {
        let mut out = Self::zero();
        out.add_word(w.factors, w.coeff);
        out
    }

    pub fn generator(g: BasisGen) -> Self {
        Self::from_word(UeaWord::new(F::one(), vec![g]))
    }

    pub fn from_lie(x: &LieElement<F>) -> Self {
        let mut out = Self::zero();
        for (g, c) in x.terms() {
            out.add_word(vec![*g], c.clone());
        }
        out
    }

    pub fn add_word(&mut self, factors: Vec<BasisGen>, c: F) {
        add_entry(&mut self.words, factors, c);
    }

    pub fn words(&self) -> impl Iterator<Item = (&Vec<BasisGen>, &F)> {
        self.words.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.words {
            out.add_word(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &F) -> Self {
        let mut out = Self::zero();
        for (w, x) in &self.words {
            out.add_word(w.clone(), x.clone() * c.clone());
        }
        out
    }

    /// Free concatenation product `self · other`.
    pub fn word_multiply(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (u, a) in &self.words {
            for (v, b) in &other.words {
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_word(w, a.clone() * b.clone());
            }
        }
        out
    }

    /// Image under the anti-involution ω (reverses products).
    pub fn omega(&self) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.words {
            out.add_word(w.iter().rev().map(|g| g.omega()).collect(), c.clone());
        }
        out
    }

    pub fn to_words(&self) -> Vec<UeaWord<F>> {
        self.words
            .iter()
            .map(|(w, c)| UeaWord::new(c.clone(), w.clone()))
            .collect()
    }
}

impl<F: Field> fmt::Display for UeaElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.words.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .words
            .iter()
            .map(|(w, c)| {
                let body: Vec<String> = w.iter().map(ToString::to_string).collect();
                if body.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c}) {}", body.join(" "))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}
