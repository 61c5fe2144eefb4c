//! Intermediate-series modules `V_{α,β,ψ}` and their irreducible versions.
//!
//! `d_n ⊗ b · v_k = ψ(b)(α + k + nβ) v_{k+n}` and `C ⊗ b · v_k = 0`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::coeff_algebra::{BElem, CharacterPsi};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{add_entry, SparseEchelon, SparseVec};
use crate::loop_vir::{BasisGen, GenKind, Generator, LieElement};

/// Which basis indices `v_k` belong to the module.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum IndexSet {
    /// all of Z
    All,
    /// Z − {0}: the quotient `V_{0,0} / C v_0`
    NonZero,
}

impl IndexSet {
    pub fn contains(&self, k: i64) -> bool {
        match self {
            IndexSet::All => true,
            IndexSet::NonZero => k != 0,
        }
    }
}

/// How elements of B act: through a character on a finite-dimensional B, or
/// abstractly, with each generator carrying its ψ-value.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PsiSource<F: Field> {
    Character(CharacterPsi<F>),
    Abstract,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntParams<F: Field> {
    pub alpha: F,
    pub beta: F,
    pub psi: PsiSource<F>,
    pub index_set: IndexSet,
    pub normalized: bool,
}

/// A generator in abstract-B mode: `(kind, degree, ψ(b))`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntGen<F: Field> {
    pub kind: GenKind,
    pub degree: i64,
    pub psi_value: F,
}

/// A finite combination `Σ c_k v_k`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct IntVector<F: Field> {
    coeffs: BTreeMap<i64, F>,
}

impl<F: Field> IntVector<F> {
    pub fn zero() -> Self {
        IntVector {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn basis(k: i64) -> Self {
        Self::term(k, F::one())
    }

    pub fn term(k: i64, c: F) -> Self {
        let mut out = Self::zero();
        out.add_term(k, c);
        out
    }

    pub fn from_sparse(coeffs: SparseVec<i64, F>) -> Self {
        IntVector {
            coeffs: coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn add_term(&mut self, k: i64, c: F) {
        add_entry(&mut self.coeffs, k, c);
    }

    pub fn coeff(&self, k: i64) -> F {
        self.coeffs.get(&k).cloned().unwrap_or_else(F::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &F)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_sparse(&self) -> &SparseVec<i64, F> {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k, -c.clone());
        }
        out
    }
}

/// An intermediate-series module with fixed parameters.
#[derive(Clone, Debug)]
pub struct IntModule<F: Field> {
    params: IntParams<F>,
}

impl<F: Field> IntModule<F> {
    /// The raw module `V_{α,β,ψ}` on all of Z, without normalization.
    pub fn raw(alpha: F, beta: F, psi: PsiSource<F>) -> Self {
        IntModule {
            params: IntParams {
                alpha,
                beta,
                psi,
                index_set: IndexSet::All,
                normalized: false,
            },
        }
    }

    /// The canonical irreducible representative `V'_{α,β,ψ}`: α is shifted
    /// into `0 <= Re α < 1`, β = 1 is replaced by β = 0, and the pair (0, 0)
    /// is realized as the quotient by `C v_0`.
    pub fn prime_module(alpha: &F, beta: &F, psi: PsiSource<F>) -> Self {
        let (alpha0, _) = alpha.split_integer_shift();
        let beta0 = if beta.is_one() { F::zero() } else { beta.clone() };
        let index_set = if alpha0.is_zero() && beta0.is_zero() {
            IndexSet::NonZero
        } else {
            IndexSet::All
        };
        IntModule {
            params: IntParams {
                alpha: alpha0,
                beta: beta0,
                psi,
                index_set,
                normalized: true,
            },
        }
    }

    pub fn from_params(params: IntParams<F>) -> Self {
        IntModule { params }
    }

    pub fn params(&self) -> &IntParams<F> {
        &self.params
    }

    pub fn alpha(&self) -> &F {
        &self.params.alpha
    }

    pub fn beta(&self) -> &F {
        &self.params.beta
    }

    pub fn index_set(&self) -> IndexSet {
        self.params.index_set
    }

    /// `α + k + nβ`.
    pub fn coefficient(&self, n: i64, k: i64) -> F {
        self.params.alpha.clone() + F::from_i64(k) + F::from_i64(n) * self.params.beta.clone()
    }

    /// ψ(e_j) for a finite-dimensional B.
    pub fn psi_basis(&self, j: usize) -> Result<F> {
        match &self.params.psi {
            PsiSource::Character(psi) => psi.values.get(j).cloned().ok_or(Error::DimensionMismatch {
                expected: psi.values.len(),
                got: j + 1,
            }),
            PsiSource::Abstract => Err(Error::Invalid(
                "abstract-B module: supply ψ(b) with the generator".into(),
            )),
        }
    }

    pub fn psi_of(&self, b: &BElem<F>) -> Result<F> {
        match &self.params.psi {
            PsiSource::Character(psi) => {
                if b.dim() != psi.values.len() {
                    return Err(Error::DimensionMismatch {
                        expected: psi.values.len(),
                        got: b.dim(),
                    });
                }
                Ok(psi.eval(b))
            }
            PsiSource::Abstract => Err(Error::Invalid(
                "abstract-B module: supply ψ(b) with the generator".into(),
            )),
        }
    }

    pub fn check_vector(&self, v: &IntVector<F>) -> Result<()> {
        if v.terms().any(|(k, _)| !self.params.index_set.contains(k)) {
            return Err(Error::ForbiddenIndex);
        }
        Ok(())
    }

    /// Action of `d_n ⊗ b` (or `C ⊗ b`) where `psi_value = ψ(b)`.
    pub fn act_scaled(&self, kind: GenKind, degree: i64, psi_value: &F, v: &IntVector<F>) -> Result<IntVector<F>> {
        self.check_vector(v)?;
        Ok(self.act_scaled_unchecked(kind, degree, psi_value, v))
    }

    pub(crate) fn act_scaled_unchecked(
        &self,
        kind: GenKind,
        degree: i64,
        psi_value: &F,
        v: &IntVector<F>,
    ) -> IntVector<F> {
        let mut out = IntVector::zero();
        if kind == GenKind::C || psi_value.is_zero() {
            return out;
        }
        for (k, c) in v.terms() {
            let target = k + degree;
            if !self.params.index_set.contains(target) {
                continue;
            }
            let coef = psi_value.clone() * self.coefficient(degree, k) * c.clone();
            out.add_term(target, coef);
        }
        out
    }

    pub fn act_gen(&self, g: &IntGen<F>, v: &IntVector<F>) -> Result<IntVector<F>> {
        self.act_scaled(g.kind, g.degree, &g.psi_value, v)
    }

    pub fn act_basis(&self, g: &BasisGen, v: &IntVector<F>) -> Result<IntVector<F>> {
        let psi = self.psi_basis(g.bidx)?;
        self.act_scaled(g.kind, g.degree, &psi, v)
    }

    pub fn act(&self, g: &Generator<F>, v: &IntVector<F>) -> Result<IntVector<F>> {
        let psi = self.psi_of(&g.b)?;
        self.act_scaled(g.kind, g.degree, &psi, v)
    }

    pub fn act_lie(&self, x: &LieElement<F>, v: &IntVector<F>) -> Result<IntVector<F>> {
        let mut out = IntVector::zero();
        for (g, c) in x.terms() {
            let part = self.act_basis(g, v)?;
            for (k, y) in part.terms() {
                out.add_term(k, c.clone() * y.clone());
            }
        }
        Ok(out)
    }

    /// Closes span(seeds) under `d_n`, `|n| <= max_degree`, inside the index
    /// window; components leaving the window are dropped.
    pub fn submodule_closure(
        &self,
        seeds: &[IntVector<F>],
        window: (i64, i64),
        max_degree: i64,
    ) -> Result<Closure<F>> {
        let (lo, hi) = window;
        let in_window = |k: i64| lo <= k && k <= hi && self.params.index_set.contains(k);
        for s in seeds {
            self.check_vector(s)?;
            if s.terms().any(|(k, _)| !in_window(k)) {
                return Err(Error::Invalid(format!(
                    "seed support leaves the window [{lo}, {hi}]"
                )));
            }
        }
        let mut span: SparseEchelon<i64, F> = SparseEchelon::new();
        let mut frontier: Vec<SparseVec<i64, F>> = seeds
            .iter()
            .filter_map(|s| span.insert(s.as_sparse()))
            .collect();
        let one = F::one();
        while let Some(v) = frontier.pop() {
            let v = IntVector::from_sparse(v);
            for n in -max_degree..=max_degree {
                let image = self.act_scaled_unchecked(GenKind::D, n, &one, &v);
                let kept: SparseVec<i64, F> = image
                    .terms()
                    .filter(|(k, _)| in_window(*k))
                    .map(|(k, c)| (k, c.clone()))
                    .collect();
                if let Some(r) = span.insert(&kept) {
                    frontier.push(r);
                }
            }
        }
        let reachable: BTreeSet<i64> = span.rows().flat_map(|r| r.keys().copied()).collect();
        let window_size = (lo..=hi).filter(|&k| self.params.index_set.contains(k)).count();
        Ok(Closure {
            basis: span.rows().cloned().map(IntVector::from_sparse).collect(),
            reachable,
            window_size,
        })
    }
}

/// Result of [`IntModule::submodule_closure`].
#[derive(Clone, Debug)]
pub struct Closure<F: Field> {
    pub basis: Vec<IntVector<F>>,
    pub reachable: BTreeSet<i64>,
    pub window_size: usize,
}

impl<F: Field> Closure<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// True iff the closure is a nonzero proper subspace of the window.
    pub fn is_proper(&self) -> bool {
        self.dim() > 0 && self.dim() < self.window_size
    }

    pub fn report(&self) -> ClosureReport {
        ClosureReport {
            reachable_indices: self.reachable.iter().copied().collect(),
            basis_dim: self.dim(),
            proper_submodule_found: self.is_proper(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub reachable_indices: Vec<i64>,
    pub basis_dim: usize,
    pub proper_submodule_found: bool,
}

/// `V_{α,β}` is irreducible unless α ∈ Z and β ∈ {0, 1}.
///
/// Note the condition "α ∉ Z and β ∉ {0,1}" is sufficient but not
/// necessary: `V_{1/2,0}` is irreducible, as the closure oracle confirms.
pub fn is_irreducible_int<F: Field>(alpha: &F, beta: &F) -> bool {
    !(alpha.is_integer() && (beta.is_zero() || beta.is_one()))
}

/// Irreducibility as seen by the closure oracle: every single `v_k` in the
/// window generates the whole window.
pub fn closure_says_irreducible<F: Field>(
    module: &IntModule<F>,
    window: (i64, i64),
    max_degree: i64,
) -> Result<bool> {
    for k in window.0..=window.1 {
        if !module.index_set().contains(k) {
            continue;
        }
        let c = module.submodule_closure(&[IntVector::basis(k)], window, max_degree)?;
        if c.dim() < c.window_size {
            return Ok(false);
        }
    }
    Ok(true)
}
