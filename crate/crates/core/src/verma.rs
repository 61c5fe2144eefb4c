//! Truncated Verma modules `M(φ)`, the contravariant form, and the graded
//! pieces of the irreducible quotient `V(φ) = M(φ)/N(φ)`.
//!
//! `N(φ)` is computed level by level as the radical of the contravariant
//! form `⟨u, u'⟩ = coefficient of ṽ_φ in ω(u)·u'`, where ω is the
//! anti-involution `d_n ⊗ b ↦ d_{-n} ⊗ b`, `C ⊗ b ↦ C ⊗ b`. Every proper
//! graded submodule misses the highest-weight line, so it lies in the radical;
//! the radical itself is a proper submodule, hence it is the maximal one.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff_algebra::AlgebraB;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{add_entry, dot, mat_vec, rref, Rref, SparseVec};
use crate::loop_vir::{BasisGen, GenKind, LoopVir, UeaElement};

/// φ on Vir⁰_B, by its values on `d_0 ⊗ e_j` and `C ⊗ e_j`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FunctionalPhi<F: Field> {
    pub d0: Vec<F>,
    pub c: Vec<F>,
}

impl<F: Field> FunctionalPhi<F> {
    pub fn new(d0: Vec<F>, c: Vec<F>) -> Self {
        FunctionalPhi { d0, c }
    }

    /// `φ(d_0) = h`, `φ(C) = c` on B = C.
    pub fn scalar(h: F, c: F) -> Self {
        FunctionalPhi {
            d0: vec![h],
            c: vec![c],
        }
    }

    pub fn dim(&self) -> usize {
        self.d0.len()
    }

    /// Value on a degree-0 basis generator.
    pub fn eval(&self, g: &BasisGen) -> F {
        debug_assert_eq!(g.degree, 0);
        match g.kind {
            GenKind::D => self.d0[g.bidx].clone(),
            GenKind::C => self.c[g.bidx].clone(),
        }
    }

    /// `φ(d_0 ⊗ 1)`, the highest weight.
    pub fn highest_weight(&self, alg: &AlgebraB<F>) -> F {
        alg.unit()
            .terms()
            .fold(F::zero(), |acc, (j, x)| acc + x.clone() * self.d0[j].clone())
    }

    pub fn check(&self, alg: &AlgebraB<F>) -> Result<()> {
        for len in [self.d0.len(), self.c.len()] {
            if len != alg.dim() {
                return Err(Error::DimensionMismatch {
                    expected: alg.dim(),
                    got: len,
                });
            }
        }
        Ok(())
    }
}

/// A canonical PBW monomial `d_{-n_1}⊗e_{j_1} ⋯ d_{-n_r}⊗e_{j_r} ṽ_φ` with
/// `n_1 >= n_2 >= ...` and ties ordered by non-decreasing `j`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct PbwMonomial(Vec<(i64, usize)>);

fn factor_precedes(a: &(i64, usize), b: &(i64, usize)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 <= b.1)
}

impl PbwMonomial {
    pub fn highest() -> Self {
        PbwMonomial(Vec::new())
    }

    /// Sorts arbitrary `(depth, bidx)` factors into canonical order.
    pub fn from_factors(mut factors: Vec<(i64, usize)>) -> Self {
        assert!(factors.iter().all(|f| f.0 >= 1), "PBW factors have depth >= 1");
        factors.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        PbwMonomial(factors)
    }

    pub fn factors(&self) -> &[(i64, usize)] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.iter().map(|f| f.0 as usize).sum()
    }

    pub fn is_highest(&self) -> bool {
        self.0.is_empty()
    }

    /// The monomial as a word of negative generators, leftmost first.
    pub fn to_word(&self) -> Vec<BasisGen> {
        self.0.iter().map(|&(n, j)| BasisGen::d(-n, j)).collect()
    }
}

impl Ord for PbwMonomial {
    /// Fewer factors first, then lexicographic with deeper factors first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| {
            for (a, b) in self.0.iter().zip(&other.0) {
                let c = b.0.cmp(&a.0).then(a.1.cmp(&b.1));
                if c != Ordering::Equal {
                    return c;
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for PbwMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PbwMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("v");
        }
        let parts: Vec<String> = self.0.iter().map(|(n, j)| format!("d[-{n}]*e{j}")).collect();
        write!(f, "{} v", parts.join(" "))
    }
}

/// An element of `M(φ)` in PBW coordinates.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PbwVector<F: Field> {
    pub terms: SparseVec<PbwMonomial, F>,
}

impl<F: Field> PbwVector<F> {
    pub fn zero() -> Self {
        PbwVector {
            terms: BTreeMap::new(),
        }
    }

    pub fn highest() -> Self {
        Self::monomial(PbwMonomial::highest())
    }

    pub fn monomial(m: PbwMonomial) -> Self {
        let mut t = BTreeMap::new();
        t.insert(m, F::one());
        PbwVector { terms: t }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &PbwMonomial) -> F {
        self.terms.get(m).cloned().unwrap_or_else(F::zero)
    }

    /// Coefficient on ṽ_φ.
    pub fn highest_coeff(&self) -> F {
        self.coeff(&PbwMonomial::highest())
    }

    /// The common depth of all monomials, if homogeneous and nonzero.
    pub fn level(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(PbwMonomial::depth);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn add_scaled(&mut self, c: &F, other: &Self) {
        crate::linalg::axpy(&mut self.terms, c, &other.terms);
    }
}

type ActCache<F> = Mutex<HashMap<(BasisGen, PbwMonomial), Arc<SparseVec<PbwMonomial, F>>>>;

/// Normal-ordering engine computing `g · m` for basis generators `g` and PBW
/// monomials `m`, memoized.
pub struct PbwEngine<F: Field> {
    vir: LoopVir<F>,
    phi: FunctionalPhi<F>,
    cache: ActCache<F>,
}

impl<F: Field> fmt::Debug for PbwEngine<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PbwEngine").field("phi", &self.phi).finish()
    }
}

impl<F: Field> PbwEngine<F> {
    pub fn new(algebra: Arc<AlgebraB<F>>, phi: FunctionalPhi<F>) -> Result<Self> {
        phi.check(&algebra)?;
        Ok(PbwEngine {
            vir: LoopVir::new(algebra),
            phi,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn vir(&self) -> &LoopVir<F> {
        &self.vir
    }

    pub fn phi(&self) -> &FunctionalPhi<F> {
        &self.phi
    }

    pub fn algebra(&self) -> &Arc<AlgebraB<F>> {
        self.vir.algebra()
    }

    /// `g · m` in PBW coordinates.
    pub fn act_gen(&self, g: BasisGen, m: &PbwMonomial) -> Arc<SparseVec<PbwMonomial, F>> {
        let key = (g, m.clone());
        if let Some(hit) = self.cache.lock().expect("cache poisoned").get(&key) {
            return hit.clone();
        }
        let out = Arc::new(self.act_gen_uncached(g, m));
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(key, out.clone());
        out
    }

    fn act_gen_uncached(&self, g: BasisGen, m: &PbwMonomial) -> SparseVec<PbwMonomial, F> {
        let mut out = SparseVec::new();
        if g.degree > 0 && g.degree as usize > m.depth() {
            return out;
        }
        let Some((first, rest)) = m.0.split_first() else {
            match g.degree.cmp(&0) {
                Ordering::Greater => {}
                Ordering::Equal => add_entry(&mut out, PbwMonomial::highest(), self.phi.eval(&g)),
                Ordering::Less => {
                    out.insert(PbwMonomial(vec![(-g.degree, g.bidx)]), F::one());
                }
            }
            return out;
        };
        if g.degree < 0 && g.kind == GenKind::D && factor_precedes(&(-g.degree, g.bidx), first) {
            let mut f = Vec::with_capacity(m.0.len() + 1);
            f.push((-g.degree, g.bidx));
            f.extend_from_slice(&m.0);
            out.insert(PbwMonomial(f), F::one());
            return out;
        }
        // g · y · rest = y · (g · rest) + [g, y] · rest
        let y = BasisGen::d(-first.0, first.1);
        let rest = PbwMonomial(rest.to_vec());
        let inner = self.act_gen(g, &rest);
        for (mono, c) in inner.iter() {
            let part = self.act_gen(y, mono);
            crate::linalg::axpy(&mut out, c, &part);
        }
        for (h, c) in self.vir.bracket_basis(&g, &y).terms() {
            let part = self.act_gen(*h, &rest);
            crate::linalg::axpy(&mut out, c, &part);
        }
        out
    }

    pub fn act_gen_vec(&self, g: BasisGen, v: &PbwVector<F>) -> PbwVector<F> {
        let mut out = PbwVector::zero();
        for (m, c) in &v.terms {
            crate::linalg::axpy(&mut out.terms, c, &self.act_gen(g, m));
        }
        out
    }

    /// Applies a word right to left.
    pub fn act_word(&self, word: &[BasisGen], v: &PbwVector<F>) -> PbwVector<F> {
        let mut cur = v.clone();
        for g in word.iter().rev() {
            if cur.is_zero() {
                break;
            }
            cur = self.act_gen_vec(*g, &cur);
        }
        cur
    }

    pub fn act_element(&self, u: &UeaElement<F>, v: &PbwVector<F>) -> PbwVector<F> {
        let mut out = PbwVector::zero();
        for (w, c) in u.words() {
            out.add_scaled(c, &self.act_word(w, v));
        }
        out
    }

    /// `u · ṽ_φ` in canonical PBW form.
    pub fn normal_order(&self, u: &UeaElement<F>) -> PbwVector<F> {
        self.act_element(u, &PbwVector::highest())
    }

    /// ⟨a, b⟩ for two monomials.
    pub fn form_monomials(&self, a: &PbwMonomial, b: &PbwMonomial) -> F {
        if a.depth() != b.depth() {
            return F::zero();
        }
        // ω(y_1 ⋯ y_r) = ω(y_r) ⋯ ω(y_1): apply ω(y_1) first.
        let mut cur = PbwVector::monomial(b.clone());
        for &(n, j) in &a.0 {
            cur = self.act_gen_vec(BasisGen::d(n, j), &cur);
            if cur.is_zero() {
                break;
            }
        }
        cur.highest_coeff()
    }

    pub fn gram_matrix(&self, basis: &[PbwMonomial]) -> Vec<Vec<F>> {
        basis
            .par_iter()
            .map(|a| basis.iter().map(|b| self.form_monomials(a, b)).collect())
            .collect()
    }
}

/// All canonical monomials of depth `k` over a `dim`-dimensional B, in
/// canonical order.
pub fn pbw_basis(dim: usize, k: usize) -> Vec<PbwMonomial> {
    fn rec(
        remaining: i64,
        max_factor: (i64, usize),
        dim: usize,
        prefix: &mut Vec<(i64, usize)>,
        out: &mut Vec<PbwMonomial>,
    ) {
        if remaining == 0 {
            out.push(PbwMonomial(prefix.clone()));
            return;
        }
        for n in (1..=remaining.min(max_factor.0)).rev() {
            let j_start = if n == max_factor.0 { max_factor.1 } else { 0 };
            for j in j_start..dim {
                prefix.push((n, j));
                rec(remaining - n, (n, j), dim, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(k as i64, (k as i64, 0), dim, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// One graded piece of `M(φ)` and of `V(φ)`.
#[derive(Clone, Debug)]
pub struct VphiLevel<F: Field> {
    pub level: usize,
    pub monomials: Vec<PbwMonomial>,
    index: HashMap<PbwMonomial, usize>,
    pub gram: Vec<Vec<F>>,
    rref: Rref<F>,
    /// Radical basis, dense over `monomials`; one vector per free column.
    pub radical: Vec<Vec<F>>,
    /// Indices into `monomials` of the quotient basis (the pivot columns).
    pub quotient: Vec<usize>,
}

impl<F: Field> VphiLevel<F> {
    fn build(engine: &PbwEngine<F>, level: usize) -> Self {
        let monomials = pbw_basis(engine.algebra().dim(), level);
        let gram = engine.gram_matrix(&monomials);
        let rref = rref(&gram, monomials.len());
        let radical = rref.kernel();
        let quotient = rref.pivots.clone();
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        VphiLevel {
            level,
            monomials,
            index,
            gram,
            rref,
            radical,
            quotient,
        }
    }

    pub fn pbw_dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn gram_rank(&self) -> usize {
        self.rref.rank()
    }

    pub fn radical_dim(&self) -> usize {
        self.radical.len()
    }

    pub fn vphi_dim(&self) -> usize {
        self.quotient.len()
    }

    pub fn monomial_index(&self, m: &PbwMonomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Dense coordinates of a level-`k` PBW vector.
    pub fn to_dense(&self, x: &PbwVector<F>) -> Result<Vec<F>> {
        let mut out = vec![F::zero(); self.monomials.len()];
        for (m, c) in &x.terms {
            let i = self.monomial_index(m).ok_or_else(|| {
                Error::Invalid(format!("monomial {m} is not at level {}", self.level))
            })?;
            out[i] = c.clone();
        }
        Ok(out)
    }

    pub fn from_dense(&self, v: &[F]) -> PbwVector<F> {
        let mut out = PbwVector::zero();
        for (m, c) in self.monomials.iter().zip(v) {
            if !c.is_zero() {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    pub fn radical_vectors(&self) -> Vec<PbwVector<F>> {
        self.radical.iter().map(|v| self.from_dense(v)).collect()
    }

    /// True iff the dense vector lies in the radical (`G x = 0`).
    pub fn in_radical(&self, x: &[F]) -> bool {
        mat_vec(&self.gram, x).iter().all(F::is_zero)
    }

    /// Coordinates of `x mod radical` in the quotient basis.
    pub fn reduce_dense(&self, x: &[F]) -> Vec<F> {
        let free = self.rref.free_columns();
        self.quotient
            .iter()
            .enumerate()
            .map(|(r, &p)| {
                free.iter().fold(x[p].clone(), |acc, &f| {
                    if x[f].is_zero() {
                        acc
                    } else {
                        acc + self.rref.rows[r][f].clone() * x[f].clone()
                    }
                })
            })
            .collect()
    }

    /// The PBW representative of quotient coordinates.
    pub fn lift(&self, coords: &[F]) -> PbwVector<F> {
        let mut out = PbwVector::zero();
        for (q, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                out.terms.insert(self.monomials[self.quotient[q]].clone(), c.clone());
            }
        }
        out
    }

    /// Contravariant form of two dense vectors at this level.
    pub fn form(&self, x: &[F], y: &[F]) -> F {
        dot(x, &mat_vec(&self.gram, y))
    }
}

/// An element of `V(φ)` at a single level, in quotient-basis coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VphiVector<F: Field> {
    pub level: usize,
    pub coords: Vec<F>,
}

impl<F: Field> VphiVector<F> {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(F::is_zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    pub pbw_dim: usize,
    pub gram_rank: usize,
    pub radical_dim: usize,
    pub vphi_dim: usize,
}

/// `M(φ)` and `V(φ)` computed through depth `D`.
#[derive(Debug)]
pub struct VermaModule<F: Field> {
    engine: PbwEngine<F>,
    levels: Vec<VphiLevel<F>>,
}

impl<F: Field> VermaModule<F> {
    pub fn new(algebra: Arc<AlgebraB<F>>, phi: FunctionalPhi<F>, depth: usize) -> Result<Self> {
        let engine = PbwEngine::new(algebra, phi)?;
        let mut out = VermaModule {
            engine,
            levels: Vec::new(),
        };
        out.extend_depth(depth);
        Ok(out)
    }

    /// Computes all levels up to `depth`; levels are independent and built
    /// in parallel.
    pub fn extend_depth(&mut self, depth: usize) {
        let start = self.levels.len();
        if depth < start {
            return;
        }
        let engine = &self.engine;
        let new: Vec<VphiLevel<F>> = (start..=depth)
            .into_par_iter()
            .map(|k| VphiLevel::build(engine, k))
            .collect();
        self.levels.extend(new);
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn engine(&self) -> &PbwEngine<F> {
        &self.engine
    }

    pub fn phi(&self) -> &FunctionalPhi<F> {
        self.engine.phi()
    }

    pub fn algebra(&self) -> &Arc<AlgebraB<F>> {
        self.engine.algebra()
    }

    pub fn highest_weight(&self) -> F {
        self.phi().highest_weight(self.algebra())
    }

    pub fn level(&self, k: usize) -> Result<&VphiLevel<F>> {
        self.levels.get(k).ok_or(Error::DepthExceeded {
            level: k,
            depth: self.depth(),
        })
    }

    pub fn levels(&self) -> &[VphiLevel<F>] {
        &self.levels
    }

    pub fn vphi_dim(&self, k: usize) -> Result<usize> {
        Ok(self.level(k)?.vphi_dim())
    }

    pub fn gram_matrix(&self, k: usize) -> Result<&Vec<Vec<F>>> {
        Ok(&self.level(k)?.gram)
    }

    pub fn radical_basis(&self, k: usize) -> Result<Vec<PbwVector<F>>> {
        Ok(self.level(k)?.radical_vectors())
    }

    pub fn normal_order(&self, u: &UeaElement<F>) -> PbwVector<F> {
        self.engine.normal_order(u)
    }

    /// `x mod N(φ)` in the quotient basis of its level.
    pub fn vphi_reduce(&self, x: &PbwVector<F>) -> Result<VphiVector<F>> {
        let level = match x.level() {
            Some(l) => l,
            None if x.is_zero() => 0,
            None => return Err(Error::Invalid("PBW vector is not homogeneous".into())),
        };
        let lv = self.level(level)?;
        let dense = lv.to_dense(x)?;
        Ok(VphiVector {
            level,
            coords: lv.reduce_dense(&dense),
        })
    }

    pub fn vphi_zero(&self, level: usize) -> Result<VphiVector<F>> {
        Ok(VphiVector {
            level,
            coords: vec![F::zero(); self.level(level)?.vphi_dim()],
        })
    }

    /// `v_φ`.
    pub fn highest_vector(&self) -> VphiVector<F> {
        VphiVector {
            level: 0,
            coords: vec![F::one()],
        }
    }

    pub fn basis_vector(&self, level: usize, q: usize) -> Result<VphiVector<F>> {
        let mut v = self.vphi_zero(level)?;
        if q >= v.coords.len() {
            return Err(Error::Invalid(format!("V(φ) level {level} has no basis vector {q}")));
        }
        v.coords[q] = F::one();
        Ok(v)
    }

    pub fn lift(&self, x: &VphiVector<F>) -> Result<PbwVector<F>> {
        Ok(self.level(x.level)?.lift(&x.coords))
    }

    /// Acts on `V(φ)`; returns `None` when the result would sit below level 0
    /// (it is then zero).
    pub fn act_on_vphi(&self, g: &BasisGen, x: &VphiVector<F>) -> Result<Option<VphiVector<F>>> {
        let target = x.level as i64 - g.degree;
        if target < 0 {
            return Ok(None);
        }
        let target = target as usize;
        if target > self.depth() {
            return Err(Error::DepthExceeded {
                level: target,
                depth: self.depth(),
            });
        }
        let lifted = self.lift(x)?;
        let image = self.engine.act_gen_vec(*g, &lifted);
        let lv = self.level(target)?;
        let dense = lv.to_dense(&image)?;
        Ok(Some(VphiVector {
            level: target,
            coords: lv.reduce_dense(&dense),
        }))
    }

    pub fn level_reports(&self) -> Vec<LevelReport> {
        self.levels
            .iter()
            .map(|l| LevelReport {
                level: l.level,
                pbw_dim: l.pbw_dim(),
                gram_rank: l.gram_rank(),
                radical_dim: l.radical_dim(),
                vphi_dim: l.vphi_dim(),
            })
            .collect()
    }
}
