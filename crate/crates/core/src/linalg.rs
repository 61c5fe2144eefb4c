//! Exact elimination over a [`Field`]: incremental sparse echelon bases and
//! dense reduced row echelon forms with leftmost-pivot selection.

use std::collections::BTreeMap;

use crate::field::Field;

pub type SparseVec<K, F> = BTreeMap<K, F>;

/// `acc += c * v`, dropping entries that cancel.
pub fn axpy<K: Ord + Clone, F: Field>(acc: &mut SparseVec<K, F>, c: &F, v: &SparseVec<K, F>) {
    if c.is_zero() {
        return;
    }
    for (k, x) in v {
        add_entry(acc, k.clone(), c.clone() * x.clone());
    }
}

pub fn add_entry<K: Ord, F: Field>(acc: &mut SparseVec<K, F>, k: K, x: F) {
    if x.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match acc.entry(k) {
        Entry::Vacant(e) => {
            e.insert(x);
        }
        Entry::Occupied(mut e) => {
            let s = e.get().clone() + x;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

pub fn scale<K: Ord + Clone, F: Field>(v: &SparseVec<K, F>, c: &F) -> SparseVec<K, F> {
    if c.is_zero() {
        return SparseVec::new();
    }
    v.iter().map(|(k, x)| (k.clone(), c.clone() * x.clone())).collect()
}

/// A reduced echelon basis of a subspace of `F^(K)`, grown one vector at a
/// time. Every row has leading coefficient 1 at its pivot (its smallest
/// key) and zeros at every other row's pivot.
#[derive(Clone, Debug)]
pub struct SparseEchelon<K: Ord + Clone, F: Field> {
    rows: BTreeMap<K, SparseVec<K, F>>,
}

impl<K: Ord + Clone, F: Field> Default for SparseEchelon<K, F> {
    fn default() -> Self {
        SparseEchelon {
            rows: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone, F: Field> SparseEchelon<K, F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec<K, F>> {
        self.rows.values()
    }

    /// Residual of `v` modulo the span.
    pub fn reduce(&self, v: &SparseVec<K, F>) -> SparseVec<K, F> {
        let mut out = v.clone();
        for (p, row) in &self.rows {
            if let Some(c) = out.get(p).cloned() {
                axpy(&mut out, &(-c), row);
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseVec<K, F>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span; returns the new normalized row if the rank grew.
    pub fn insert(&mut self, v: &SparseVec<K, F>) -> Option<SparseVec<K, F>> {
        let r = self.reduce(v);
        let (pivot, lead) = match r.iter().next() {
            Some((k, x)) => (k.clone(), x.clone()),
            None => return None,
        };
        let r = scale(&r, &lead.inv().expect("nonzero lead"));
        for row in self.rows.values_mut() {
            if let Some(c) = row.get(&pivot).cloned() {
                axpy(row, &(-c), &r);
            }
        }
        self.rows.insert(pivot, r.clone());
        Some(r)
    }
}

/// Reduced row echelon form of a dense matrix.
#[derive(Clone, Debug)]
pub struct Rref<F: Field> {
    pub rows: Vec<Vec<F>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl<F: Field> Rref<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// Kernel basis: one vector per free column, with a 1 at that column.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = vec![F::zero(); self.ncols];
                v[f] = F::one();
                for (r, &p) in self.pivots.iter().enumerate() {
                    v[p] = -self.rows[r][f].clone();
                }
                v
            })
            .collect()
    }
}

/// Gauss-Jordan elimination, scanning columns left to right.
pub fn rref<F: Field>(matrix: &[Vec<F>], ncols: usize) -> Rref<F> {
    let mut m: Vec<Vec<F>> = matrix.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(sel) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, sel);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = x.clone() - f.clone() * p.clone();
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    Rref {
        rows: m,
        pivots,
        ncols,
    }
}

pub fn mat_vec<F: Field>(m: &[Vec<F>], v: &[F]) -> Vec<F> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
        })
        .collect()
}

pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(F::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn rank_of<F: Field>(vectors: &[Vec<F>]) -> usize {
    let ncols = vectors.first().map_or(0, Vec::len);
    rref(vectors, ncols).rank()
}
