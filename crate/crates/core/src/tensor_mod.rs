//! The tensor module `V(φ) ⊗ V'_{α,β,ψ}` with the diagonal action
//! `g·(x ⊗ v) = (g·x) ⊗ v + x ⊗ (g·v)`.
//!
//! A summand `x_{-i} ⊗ v_k` has weight `φ(d_0) + α + (k - i)`; the integer
//! `k - i` is called its weight offset.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{add_entry, SparseEchelon, SparseVec};
use crate::loop_vir::{BasisGen, Generator, LieElement, UeaElement};
use crate::modules_int::IntModule;
use crate::verma::{pbw_basis, VermaModule, VphiVector};

/// `(V(φ) level i, quotient-basis index, k)`.
pub type TensorKey = (usize, usize, i64);

/// A finite sum `Σ c · x ⊗ v_k` over basis pairs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorVector<F: Field> {
    terms: SparseVec<TensorKey, F>,
}

impl<F: Field> Default for TensorVector<F> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<F: Field> TensorVector<F> {
    pub fn zero() -> Self {
        TensorVector {
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(level: usize, index: usize, k: i64) -> Self {
        let mut out = Self::zero();
        out.add_term((level, index, k), F::one());
        out
    }

    pub fn add_term(&mut self, key: TensorKey, c: F) {
        add_entry(&mut self.terms, key, c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TensorKey, &F)> {
        self.terms.iter()
    }

    pub fn as_sparse(&self) -> &SparseVec<TensorKey, F> {
        &self.terms
    }

    pub fn coeff(&self, key: &TensorKey) -> F {
        self.terms.get(key).cloned().unwrap_or_else(F::zero)
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

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(&F::one(), other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(&-F::one(), other);
        out
    }

    pub fn scale(&self, c: &F) -> Self {
        let mut out = Self::zero();
        out.add_scaled(c, self);
        out
    }

    pub fn add_scaled(&mut self, c: &F, other: &Self) {
        crate::linalg::axpy(&mut self.terms, c, &other.terms);
    }

    /// Highest V(φ) level present.
    pub fn top_depth(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.0).max()
    }

    /// Groups summands by weight offset `k - i`.
    pub fn weight_split(&self) -> BTreeMap<i64, TensorVector<F>> {
        let mut out: BTreeMap<i64, TensorVector<F>> = BTreeMap::new();
        for (key, c) in &self.terms {
            out.entry(key.2 - key.0 as i64)
                .or_default()
                .add_term(*key, c.clone());
        }
        out
    }

    /// The weight offset if all summands share one.
    pub fn weight_offset(&self) -> Option<i64> {
        let split = self.weight_split();
        (split.len() == 1).then(|| *split.keys().next().expect("one key"))
    }

    pub fn to_terms(&self) -> Vec<TensorTerm> {
        self.terms
            .iter()
            .map(|(&(level, index, k), c)| TensorTerm {
                level,
                index,
                k,
                coeff: c.to_string(),
            })
            .collect()
    }

    pub fn from_terms(terms: &[TensorTerm]) -> Result<Self> {
        let mut out = Self::zero();
        for t in terms {
            let c = F::parse_text(&t.coeff)
                .ok_or_else(|| Error::Parse(format!("bad coefficient {:?}", t.coeff)))?;
            out.add_term((t.level, t.index, t.k), c);
        }
        Ok(out)
    }
}

impl<F: Field> fmt::Display for TensorVector<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((i, q, k), c)| format!("({c}) x[{i},{q}]@{k}"))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Serializable summand with the coefficient in canonical text form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorTerm {
    pub level: usize,
    pub index: usize,
    pub k: i64,
    pub coeff: String,
}

/// `V^φ_{α,β,ψ}` over a shared, already computed `V(φ)`.
#[derive(Clone, Debug)]
pub struct TensorModule<F: Field> {
    verma: Arc<VermaModule<F>>,
    int: IntModule<F>,
}

impl<F: Field> TensorModule<F> {
    pub fn new(verma: Arc<VermaModule<F>>, int: IntModule<F>) -> Result<Self> {
        let dim = verma.algebra().dim();
        for j in 0..dim {
            int.psi_basis(j)?;
        }
        Ok(TensorModule { verma, int })
    }

    pub fn verma(&self) -> &Arc<VermaModule<F>> {
        &self.verma
    }

    pub fn int(&self) -> &IntModule<F> {
        &self.int
    }

    pub fn depth(&self) -> usize {
        self.verma.depth()
    }

    pub fn check(&self, x: &TensorVector<F>) -> Result<()> {
        for &(i, q, k) in x.terms.keys() {
            if !self.int.index_set().contains(k) {
                return Err(Error::ForbiddenIndex);
            }
            let dim = self.verma.vphi_dim(i)?;
            if q >= dim {
                return Err(Error::Invalid(format!(
                    "V(φ) level {i} has dimension {dim}, index {q} out of range"
                )));
            }
        }
        Ok(())
    }

    /// `v_φ ⊗ v_k`.
    pub fn highest(&self, k: i64) -> Result<TensorVector<F>> {
        if !self.int.index_set().contains(k) {
            return Err(Error::ForbiddenIndex);
        }
        Ok(TensorVector::basis(0, 0, k))
    }

    /// `x ⊗ v_k` for a `V(φ)` vector.
    pub fn pure(&self, x: &VphiVector<F>, k: i64) -> Result<TensorVector<F>> {
        if !self.int.index_set().contains(k) {
            return Err(Error::ForbiddenIndex);
        }
        let mut out = TensorVector::zero();
        for (q, c) in x.coords.iter().enumerate() {
            out.add_term((x.level, q, k), c.clone());
        }
        Ok(out)
    }

    /// Exact action of a basis generator. Fails with `DepthExceeded` when a
    /// summand would leave the computed part of `V(φ)`.
    pub fn act_gen(&self, g: &BasisGen, x: &TensorVector<F>) -> Result<TensorVector<F>> {
        self.check(x)?;
        let psi = self.int.psi_basis(g.bidx)?;
        let mut by_pair: BTreeMap<(usize, i64), Vec<F>> = BTreeMap::new();
        for (&(i, q, k), c) in &x.terms {
            let coords = by_pair
                .entry((i, k))
                .or_insert_with(|| vec![F::zero(); self.verma.vphi_dim(i).unwrap_or(0)]);
            coords[q] = c.clone();
        }
        let mut out = TensorVector::zero();
        for ((i, k), coords) in by_pair {
            let xv = VphiVector { level: i, coords };
            if let Some(img) = self.verma.act_on_vphi(g, &xv)? {
                for (q, c) in img.coords.into_iter().enumerate() {
                    out.add_term((img.level, q, k), c);
                }
            }
            let target = k + g.degree;
            if g.kind == crate::loop_vir::GenKind::D
                && !psi.is_zero()
                && self.int.index_set().contains(target)
            {
                let f = psi.clone() * self.int.coefficient(g.degree, k);
                if !f.is_zero() {
                    for (q, c) in xv.coords.iter().enumerate() {
                        out.add_term((i, q, target), f.clone() * c.clone());
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn act_lie(&self, x: &LieElement<F>, v: &TensorVector<F>) -> Result<TensorVector<F>> {
        let mut out = TensorVector::zero();
        for (g, c) in x.terms() {
            out.add_scaled(c, &self.act_gen(g, v)?);
        }
        Ok(out)
    }

    pub fn act(&self, g: &Generator<F>, v: &TensorVector<F>) -> Result<TensorVector<F>> {
        self.act_lie(&g.to_element(), v)
    }

    /// Applies a word right to left.
    pub fn act_word(&self, word: &[BasisGen], v: &TensorVector<F>) -> Result<TensorVector<F>> {
        let mut cur = v.clone();
        for g in word.iter().rev() {
            if cur.is_zero() {
                break;
            }
            cur = self.act_gen(g, &cur)?;
        }
        Ok(cur)
    }

    pub fn act_uea(&self, u: &UeaElement<F>, v: &TensorVector<F>) -> Result<TensorVector<F>> {
        let mut out = TensorVector::zero();
        for (w, c) in u.words() {
            out.add_scaled(c, &self.act_word(w, v)?);
        }
        Ok(out)
    }

    /// `φ(d_0) + α + n`, the eigenvalue of `d_0 ⊗ 1` on weight offset `n`.
    pub fn weight(&self, offset: i64) -> F {
        self.verma.highest_weight() + self.int.alpha().clone() + F::from_i64(offset)
    }

    /// Number of truncated basis vectors of the given weight offset.
    pub fn truncated_weight_dim(&self, offset: i64, depth: usize) -> Result<usize> {
        let mut total = 0;
        for i in 0..=depth {
            if self.int.index_set().contains(offset + i as i64) {
                total += self.verma.vphi_dim(i)?;
            }
        }
        Ok(total)
    }

    /// Checks that every basis vector `x_{-i} ⊗ v_k` with `i <= depth` and
    /// `k` in the window lies in the span of `u·(v_φ ⊗ v_m)` for PBW words
    /// `u` of depth at most `depth`.
    pub fn generation_check(&self, depth: usize, window: (i64, i64)) -> Result<GenerationReport> {
        if depth > self.depth() {
            return Err(Error::DepthExceeded {
                level: depth,
                depth: self.depth(),
            });
        }
        let dim = self.verma.algebra().dim();
        let idx = self.int.index_set();
        let mut offsets: Vec<i64> = Vec::new();
        for k in window.0..=window.1 {
            for i in 0..=depth {
                offsets.push(k - i as i64);
            }
        }
        offsets.sort_unstable();
        offsets.dedup();
        let mut per_weight = Vec::new();
        let mut covered = true;
        for n in offsets {
            let mut span: SparseEchelon<TensorKey, F> = SparseEchelon::new();
            for j in 0..=depth {
                let m = n + j as i64;
                if !idx.contains(m) {
                    continue;
                }
                let seed = TensorVector::basis(0, 0, m);
                for mono in pbw_basis(dim, j) {
                    let v = self.act_word(&mono.to_word(), &seed)?;
                    span.insert(v.as_sparse());
                }
            }
            let mut targets = 0;
            let mut hit = 0;
            for i in 0..=depth {
                let k = n + i as i64;
                if k < window.0 || k > window.1 || !idx.contains(k) {
                    continue;
                }
                for q in 0..self.verma.vphi_dim(i)? {
                    targets += 1;
                    if span.contains(TensorVector::basis(i, q, k).as_sparse()) {
                        hit += 1;
                    }
                }
            }
            covered &= hit == targets;
            per_weight.push(WeightCoverage {
                offset: n,
                targets,
                covered: hit,
                span_rank: span.rank(),
            });
        }
        Ok(GenerationReport {
            covered,
            per_weight,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightCoverage {
    pub offset: i64,
    pub targets: usize,
    pub covered: usize,
    pub span_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub covered: bool,
    pub per_weight: Vec<WeightCoverage>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff_algebra::{AlgebraB, CharacterPsi};
    use crate::modules_int::PsiSource;
    use crate::scalar::GaussianRational as S;
    use crate::verma::FunctionalPhi;

    fn s(x: &str) -> S {
        x.parse().unwrap()
    }

    fn module(h: &str, alpha: &str, beta: &str, depth: usize) -> TensorModule<S> {
        let verma = VermaModule::new(
            Arc::new(AlgebraB::trivial()),
            FunctionalPhi::scalar(s(h), s("0")),
            depth,
        )
        .unwrap();
        let psi = PsiSource::Character(CharacterPsi::new(vec![s("1")]));
        TensorModule::new(Arc::new(verma), IntModule::prime_module(&s(alpha), &s(beta), psi)).unwrap()
    }

    #[test]
    fn highest_weight_vector_action() {
        let t = module("1", "1/2", "2", 2);
        let v = t.highest(3).unwrap();
        let got = t.act_gen(&BasisGen::d(2, 0), &v).unwrap();
        // ψ(1)(α + m + nβ) = 1/2 + 3 + 4
        assert_eq!(got, TensorVector::basis(0, 0, 5).scale(&s("15/2")));
        let c = t.act_gen(&BasisGen::c(0), &v).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn weight_split_examples() {
        let t = module("1", "1/2", "2", 2);
        let v = TensorVector::<S>::basis(0, 0, 3);
        let split = v.weight_split();
        assert_eq!(split.len(), 1);
        assert_eq!(split[&3], v);
        let w = TensorVector::basis(1, 0, 3).add(&TensorVector::basis(0, 0, 2));
        assert_eq!(w.weight_offset(), Some(2));
        assert!(TensorVector::<S>::zero().weight_split().is_empty());
        // d_0 acts by φ(d_0) + α + n
        let got = t.act_gen(&BasisGen::d(0, 0), &w).unwrap();
        assert_eq!(got, w.scale(&t.weight(2)));
    }

    #[test]
    fn depth_overflow_is_an_error() {
        let t = module("1", "1/2", "2", 1);
        let x = TensorVector::basis(1, 0, 0);
        assert!(matches!(
            t.act_gen(&BasisGen::d(-1, 0), &x),
            Err(Error::DepthExceeded { level: 2, depth: 1 })
        ));
    }

    #[test]
    fn generation_examples() {
        let t = module("1", "1/2", "2", 2);
        assert!(t.generation_check(2, (-4, 4)).unwrap().covered);
        assert!(t.generation_check(0, (-4, 4)).unwrap().covered);
        let t00 = module("1", "0", "0", 2);
        let rep = t00.generation_check(2, (-3, 3)).unwrap();
        assert!(rep.covered);
        assert!(matches!(t00.highest(0), Err(Error::ForbiddenIndex)));
    }
}
