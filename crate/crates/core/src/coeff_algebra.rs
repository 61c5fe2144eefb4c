//! Finite-dimensional commutative associative unital coefficient algebras B,
//! given by structure constants, together with their characters.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{SparseEchelon, SparseVec};

/// An element of B in coordinates over the declared basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct BElem<F: Field>(pub Vec<F>);

impl<F: Field> BElem<F> {
    pub fn zero(dim: usize) -> Self {
        BElem(vec![F::zero(); dim])
    }

    pub fn basis(dim: usize, j: usize) -> Self {
        let mut v = vec![F::zero(); dim];
        v[j] = F::one();
        BElem(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(F::is_zero)
    }

    pub fn coords(&self) -> &[F] {
        &self.0
    }

    /// Nonzero coordinates as `(basis index, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &F)> {
        self.0.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    fn to_sparse(&self) -> SparseVec<usize, F> {
        self.terms().map(|(j, c)| (j, c.clone())).collect()
    }
}

/// B with structure constants `e_i e_j = Σ_k c[i][j][k] e_k`.
#[derive(Clone, PartialEq, Eq)]
pub struct AlgebraB<F: Field> {
    name: String,
    labels: Vec<String>,
    /// Flattened `[i * dim + j] -> sparse product e_i e_j`.
    table: Vec<Vec<(usize, F)>>,
    unit: BElem<F>,
}

impl<F: Field> fmt::Debug for AlgebraB<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraB({}, dim={})", self.name, self.dim())
    }
}

impl<F: Field> AlgebraB<F> {
    /// Validates commutativity, associativity and the unit law.
    pub fn from_structure_constants(
        name: impl Into<String>,
        constants: Vec<Vec<Vec<F>>>,
        unit: Vec<F>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let dim = constants.len();
        if dim == 0 {
            return Err(Error::InvalidAlgebra("dimension must be positive".into()));
        }
        for (i, row) in constants.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidAlgebra(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for cell in row {
                if cell.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: cell.len(),
                    });
                }
            }
        }
        if unit.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: unit.len(),
            });
        }
        let labels = match labels {
            Some(l) if l.len() == dim => l,
            Some(l) => {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: l.len(),
                })
            }
            None => (0..dim).map(|j| format!("e{j}")).collect(),
        };
        let table = constants
            .iter()
            .flat_map(|row| {
                row.iter().map(|cell| {
                    cell.iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(k, c)| (k, c.clone()))
                        .collect()
                })
            })
            .collect();
        let alg = AlgebraB {
            name: name.into(),
            labels,
            table,
            unit: BElem(unit),
        };
        alg.validate()?;
        Ok(alg)
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                if self.basis_product(i, j) != self.basis_product(j, i) {
                    return Err(Error::NonCommutative { i, j });
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let ei = BElem::basis(d, i);
                    let ej = BElem::basis(d, j);
                    let ek = BElem::basis(d, k);
                    let left = self.mul_unchecked(&self.mul_unchecked(&ei, &ej), &ek);
                    let right = self.mul_unchecked(&ei, &self.mul_unchecked(&ej, &ek));
                    if left != right {
                        return Err(Error::NonAssociative { i, j, k });
                    }
                }
            }
        }
        for i in 0..d {
            if self.mul_unchecked(&self.unit, &BElem::basis(d, i)) != BElem::basis(d, i) {
                return Err(Error::BadUnit(i));
            }
        }
        Ok(())
    }

    /// B = C.
    pub fn trivial() -> Self {
        Self::truncated_poly(1).expect("C is valid")
    }

    /// C[t]/(t^d), basis 1, t, ..., t^(d-1).
    pub fn truncated_poly(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidAlgebra("truncated-poly needs d >= 1".into()));
        }
        let mut c = vec![vec![vec![F::zero(); d]; d]; d];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if i + j < d {
                    cell[i + j] = F::one();
                }
            }
        }
        let labels = (0..d)
            .map(|j| match j {
                0 => "1".to_string(),
                1 => "t".to_string(),
                _ => format!("t^{j}"),
            })
            .collect();
        let name = if d == 1 {
            "trivial".to_string()
        } else {
            format!("truncated-poly {d}")
        };
        Self::from_structure_constants(name, c, BElem::basis(d, 0).0, Some(labels))
    }

    /// C^k with orthogonal idempotents e_0, ..., e_(k-1).
    pub fn split(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidAlgebra("split needs k >= 1".into()));
        }
        let mut c = vec![vec![vec![F::zero(); k]; k]; k];
        for (i, row) in c.iter_mut().enumerate() {
            row[i][i] = F::one();
        }
        Self::from_structure_constants(format!("split {k}"), c, vec![F::one(); k], None)
    }

    /// Group algebra of Z/nZ, basis g^0, ..., g^(n-1).
    pub fn cyclic_group(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidAlgebra("cyclic-group needs n >= 1".into()));
        }
        let mut c = vec![vec![vec![F::zero(); n]; n]; n];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                cell[(i + j) % n] = F::one();
            }
        }
        let labels = (0..n).map(|j| format!("g^{j}")).collect();
        Self::from_structure_constants(
            format!("cyclic-group {n}"),
            c,
            BElem::basis(n, 0).0,
            Some(labels),
        )
    }

    /// Parses `"trivial"`, `"truncated-poly d"`, `"split k"`, `"cyclic-group n"`.
    pub fn builtin(spec: &str) -> Result<Self> {
        let mut it = spec.split_whitespace();
        let head = it.next().unwrap_or("");
        let arg = it.next().map(str::parse::<usize>);
        let need = |a: Option<std::result::Result<usize, _>>| -> Result<usize> {
            match a {
                Some(Ok(v)) => Ok(v),
                _ => Err(Error::Parse(format!("builtin {spec:?} needs a size"))),
            }
        };
        match head {
            "trivial" | "C" => Ok(Self::trivial()),
            "truncated-poly" => Self::truncated_poly(need(arg)?),
            "split" => Self::split(need(arg)?),
            "cyclic-group" => Self::cyclic_group(need(arg)?),
            _ => Err(Error::Parse(format!("unknown builtin algebra {spec:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.unit.dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        if let Some(j) = self.labels.iter().position(|l| l == label) {
            return Some(j);
        }
        label
            .strip_prefix('e')
            .and_then(|r| r.parse::<usize>().ok())
            .filter(|&j| j < self.dim())
    }

    pub fn unit(&self) -> &BElem<F> {
        &self.unit
    }

    pub fn basis(&self, j: usize) -> BElem<F> {
        BElem::basis(self.dim(), j)
    }

    /// Sparse product `e_i e_j`.
    pub fn basis_product(&self, i: usize, j: usize) -> &[(usize, F)] {
        &self.table[i * self.dim() + j]
    }

    pub fn structure_constants(&self) -> Vec<Vec<Vec<F>>> {
        let d = self.dim();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let mut cell = vec![F::zero(); d];
                        for (k, c) in self.basis_product(i, j) {
                            cell[*k] = c.clone();
                        }
                        cell
                    })
                    .collect()
            })
            .collect()
    }

    fn mul_unchecked(&self, a: &BElem<F>, b: &BElem<F>) -> BElem<F> {
        let mut out = vec![F::zero(); self.dim()];
        for (i, x) in a.terms() {
            for (j, y) in b.terms() {
                let xy = x.clone() * y.clone();
                for (k, c) in self.basis_product(i, j) {
                    out[*k] = out[*k].clone() + xy.clone() * c.clone();
                }
            }
        }
        BElem(out)
    }

    pub fn mult(&self, a: &BElem<F>, b: &BElem<F>) -> Result<BElem<F>> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub fn check_dim(&self, a: &BElem<F>) -> Result<()> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: a.dim(),
            });
        }
        Ok(())
    }

    /// Echelon basis of the ideal ⟨b⟩, closing span{b} under multiplication
    /// by basis elements until the dimension stops growing.
    pub fn ideal_generated(&self, b: &BElem<F>) -> Result<Vec<BElem<F>>> {
        self.check_dim(b)?;
        let mut span: SparseEchelon<usize, F> = SparseEchelon::new();
        let mut frontier = Vec::new();
        if let Some(r) = span.insert(&b.to_sparse()) {
            frontier.push(r);
        }
        while let Some(v) = frontier.pop() {
            let v = self.elem_from_sparse(&v);
            for j in 0..self.dim() {
                let p = self.mul_unchecked(&self.basis(j), &v);
                if let Some(r) = span.insert(&p.to_sparse()) {
                    frontier.push(r);
                }
            }
        }
        Ok(span.rows().map(|r| self.elem_from_sparse(r)).collect())
    }

    /// True iff `b` has an inverse in B.
    pub fn is_unit(&self, b: &BElem<F>) -> Result<bool> {
        Ok(self.ideal_generated(b)?.len() == self.dim())
    }

    fn elem_from_sparse(&self, v: &SparseVec<usize, F>) -> BElem<F> {
        let mut out = BElem::zero(self.dim());
        for (j, c) in v {
            out.0[*j] = c.clone();
        }
        out
    }
}

/// Values ψ(e_j) of a linear functional meant to be a unital character.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CharacterPsi<F: Field> {
    pub values: Vec<F>,
}

impl<F: Field> CharacterPsi<F> {
    pub fn new(values: Vec<F>) -> Self {
        CharacterPsi { values }
    }

    pub fn eval(&self, b: &BElem<F>) -> F {
        b.terms()
            .fold(F::zero(), |acc, (j, c)| acc + c.clone() * self.values[j].clone())
    }

    pub fn eval_basis(&self, j: usize) -> &F {
        &self.values[j]
    }

    /// ψ(ab) = ψ(a)ψ(b) on all basis pairs and ψ(1) = 1.
    pub fn check_character(&self, alg: &AlgebraB<F>) -> bool {
        if self.values.len() != alg.dim() {
            return false;
        }
        if !self.eval(alg.unit()).is_one() {
            return false;
        }
        (0..alg.dim()).all(|i| {
            (0..alg.dim()).all(|j| {
                let lhs = alg
                    .basis_product(i, j)
                    .iter()
                    .fold(F::zero(), |acc, (k, c)| acc + c.clone() * self.values[*k].clone());
                lhs == self.values[i].clone() * self.values[j].clone()
            })
        })
    }

    /// Basis of ker ψ as echelonized coordinate vectors.
    pub fn kernel(&self) -> Vec<BElem<F>> {
        let r = crate::linalg::rref(std::slice::from_ref(&self.values), self.values.len());
        r.kernel().into_iter().map(BElem).collect()
    }
}
