//! Dense normal-ordering oracle for `U(Vir_B) ⊗ Cφ`, written against the
//! defining relations only. It rewrites whole words by adjacent swaps
//! (bubble sort with commutator corrections) and shares no code with the
//! library's recursive engine beyond B's multiplication table.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use virloop::{Algebra, Scalar};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum G {
    /// `d_n ⊗ e_j`
    D(i64, usize),
    /// `C ⊗ e_j`
    C(usize),
}

pub struct Oracle<'a> {
    pub alg: &'a Algebra,
    pub h: Vec<Scalar>,
    pub c: Vec<Scalar>,
}

/// Canonical order of negative factors: larger depth first, then smaller
/// B-index.
fn in_order(a: (i64, usize), b: (i64, usize)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 <= b.1)
}

impl<'a> Oracle<'a> {
    /// `e_a e_b` as (index, coefficient) pairs.
    fn product(&self, a: usize, b: usize) -> Vec<(usize, Scalar)> {
        let p = self.alg.mult(&self.alg.basis(a), &self.alg.basis(b)).unwrap();
        p.coords()
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| (k, x.clone()))
            .collect()
    }

    /// `[x, y]` straight from the defining bracket.
    pub fn bracket(&self, x: G, y: G) -> Vec<(G, Scalar)> {
        let (G::D(m, a), G::D(n, b)) = (x, y) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for (k, c) in self.product(a, b) {
            if n != m {
                out.push((G::D(m + n, k), Scalar::from(n - m) * c.clone()));
            }
            if m + n == 0 && m * m * m != m {
                out.push((G::C(k), Scalar::from_ratio(m * m * m - m, 12) * c));
            }
        }
        out
    }

    /// `word · ṽ_φ` as a map from PBW factor lists `[(depth, j), …]` to
    /// coefficients.
    pub fn normal_form(&self, word: &[G]) -> BTreeMap<Vec<(i64, usize)>, Scalar> {
        let mut pending: BTreeMap<Vec<G>, Scalar> = BTreeMap::new();
        pending.insert(word.to_vec(), Scalar::one());
        let mut out: BTreeMap<Vec<(i64, usize)>, Scalar> = BTreeMap::new();
        let push = |map: &mut BTreeMap<Vec<G>, Scalar>, w: Vec<G>, c: Scalar| {
            if c.is_zero() {
                return;
            }
            let e = map.entry(w).or_insert_with(Scalar::zero);
            *e = e.clone() + c;
        };
        while let Some((mut w, coeff)) = pending.pop_first() {
            if coeff.is_zero() {
                continue;
            }
            if let Some(p) = w.iter().position(|g| matches!(g, G::C(_))) {
                let G::C(j) = w.remove(p) else { unreachable!() };
                push(&mut pending, w, coeff * self.c[j].clone());
                continue;
            }
            match w.last() {
                Some(G::D(n, _)) if *n > 0 => continue,
                Some(&G::D(0, j)) => {
                    w.pop();
                    push(&mut pending, w, coeff * self.h[j].clone());
                    continue;
                }
                _ => {}
            }
            let bad = (0..w.len().saturating_sub(1)).find(|&i| match (w[i], w[i + 1]) {
                (G::D(m, _), G::D(n, _)) if m >= 0 => n < 0,
                (G::D(m, a), G::D(n, b)) if n < 0 => !in_order((-m, a), (-n, b)),
                _ => false,
            });
            match bad {
                None => {
                    let key: Vec<(i64, usize)> = w
                        .iter()
                        .map(|g| match *g {
                            G::D(n, j) => (-n, j),
                            G::C(_) => unreachable!(),
                        })
                        .collect();
                    let e = out.entry(key).or_insert_with(Scalar::zero);
                    *e = e.clone() + coeff;
                }
                Some(i) => {
                    let (x, y) = (w[i], w[i + 1]);
                    let mut swapped = w.clone();
                    swapped.swap(i, i + 1);
                    push(&mut pending, swapped, coeff.clone());
                    for (g, c) in self.bracket(x, y) {
                        let mut v = w[..i].to_vec();
                        v.push(g);
                        v.extend_from_slice(&w[i + 2..]);
                        push(&mut pending, v, coeff.clone() * c);
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// `⟨u, u'⟩ = coefficient of ṽ_φ in ω(u) u' ṽ_φ`.
    pub fn form(&self, u: &[(i64, usize)], v: &[(i64, usize)]) -> Scalar {
        let mut word: Vec<G> = u.iter().rev().map(|&(n, j)| G::D(n, j)).collect();
        word.extend(v.iter().map(|&(n, j)| G::D(-n, j)));
        self.normal_form(&word)
            .get(&Vec::new())
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn gram(&self, basis: &[Vec<(i64, usize)>]) -> Vec<Vec<Scalar>> {
        basis
            .iter()
            .map(|u| basis.iter().map(|v| self.form(u, v)).collect())
            .collect()
    }
}

/// Rank by plain Gaussian elimination on a dense copy.
pub fn dense_rank(m: &[Vec<Scalar>]) -> usize {
    let mut a: Vec<Vec<Scalar>> = m.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let inv = Scalar::one() / a[rank][c].clone();
        for r in 0..a.len() {
            if r != rank && !a[r][c].is_zero() {
                let f = a[r][c].clone() * inv.clone();
                for k in c..cols {
                    let t = a[rank][k].clone() * f.clone();
                    a[r][k] = a[r][k].clone() - t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Number of depth-k PBW monomials over a `dim`-dimensional B: the
/// coefficient of q^k in ∏_{n≥1} (1 - q^n)^{-dim}.
pub fn pbw_count(dim: usize, k: usize) -> usize {
    let mut series = vec![0usize; k + 1];
    series[0] = 1;
    for n in 1..=k {
        for _ in 0..dim {
            for i in n..=k {
                series[i] += series[i - n];
            }
        }
    }
    series[k]
}
