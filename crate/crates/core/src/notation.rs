//! Text notation for elements and module vectors.
//!
//! ```text
//! element  := term (('+' | '-') term)*
//! term     := [scalar '*'] factor (' ' factor)*
//! factor   := 'd[' int ']' ['*' label] | 'C' ['*' label] | scalar
//! vector   := vterm (('+' | '-') vterm)*
//! vterm    := [scalar '*'] factor* ('v' | 'x[' level ',' index ']') '@' int
//! ```
//!
//! Labels are the algebra's basis labels, `e<j>`, or `1` for the unit.
//! Complex scalars with both parts go in parentheses: `(1/2+i)*d[1]*t`.

use crate::coeff_algebra::{AlgebraB, BElem};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::loop_vir::{Generator, LieElement, UeaElement};
use crate::tensor_mod::{TensorModule, TensorVector};
use crate::verma::PbwVector;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Splits at top-level `+`/`-`, keeping the sign with each piece.
fn split_sum(s: &str) -> Vec<(bool, String)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut neg = false;
    let mut prev: Option<char> = None;
    for ch in s.chars() {
        match ch {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            _ => {}
        }
        let at_boundary = depth == 0
            && (ch == '+' || ch == '-')
            && prev.is_none_or(|p| p != '*' && p != '/' && p != '@');
        if at_boundary {
            if !cur.trim().is_empty() {
                out.push((neg, cur.trim().to_string()));
            } else if ch == '-' {
                neg = !neg;
                prev = Some(ch);
                continue;
            }
            cur.clear();
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
        if !ch.is_whitespace() {
            prev = Some(ch);
        }
    }
    if !cur.trim().is_empty() {
        out.push((neg, cur.trim().to_string()));
    }
    out
}

pub fn parse_scalar<F: Field>(s: &str) -> Result<F> {
    let t = s.trim();
    let t = t
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(t);
    F::parse_text(t).ok_or_else(|| parse_err(format!("bad scalar {s:?}")))
}

/// A label of `alg`, `e<j>`, or `1` for the unit.
pub fn parse_label<F: Field>(alg: &AlgebraB<F>, label: &str) -> Result<BElem<F>> {
    let label = label.trim();
    if let Some(j) = alg.label_index(label) {
        return Ok(alg.basis(j));
    }
    if label == "1" {
        return Ok(alg.unit().clone());
    }
    Err(parse_err(format!("unknown basis label {label:?} for {}", alg.name())))
}

/// Splits `a*b*c` at top-level `*`.
fn split_star(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            '*' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

enum Factor<F: Field> {
    Scalar(F),
    Gen(Generator<F>),
}

/// One whitespace-free token: `[scalar*]d[n][*label]`, `[scalar*]C[*label]`
/// or a scalar.
fn parse_token<F: Field>(alg: &AlgebraB<F>, tok: &str) -> Result<Vec<Factor<F>>> {
    let parts = split_star(tok);
    let mut out = Vec::new();
    let mut i = 0;
    while i < parts.len() {
        let p = parts[i].trim();
        let gen_deg = if p == "C" {
            Some(None)
        } else if let Some(deg) = p.strip_prefix("d[").and_then(|r| r.strip_suffix(']')) {
            let n: i64 = deg
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad degree in {p:?}")))?;
            Some(Some(n))
        } else {
            None
        };
        match gen_deg {
            Some(deg) => {
                let b = match parts.get(i + 1) {
                    Some(next) if !is_generator(next) && parse_label(alg, next).is_ok() => {
                        i += 1;
                        parse_label(alg, next)?
                    }
                    _ => alg.unit().clone(),
                };
                out.push(Factor::Gen(match deg {
                    Some(n) => Generator::d(n, b),
                    None => Generator::c(b),
                }));
            }
            None => out.push(Factor::Scalar(parse_scalar(p)?)),
        }
        i += 1;
    }
    Ok(out)
}

fn is_generator(p: &str) -> bool {
    let p = p.trim();
    p == "C" || p.starts_with("d[")
}

fn parse_product<F: Field>(alg: &AlgebraB<F>, term: &str) -> Result<(F, Vec<Generator<F>>)> {
    let mut coeff = F::one();
    let mut gens = Vec::new();
    for tok in term.split_whitespace() {
        for f in parse_token(alg, tok)? {
            match f {
                Factor::Scalar(c) => coeff = coeff * c,
                Factor::Gen(g) => gens.push(g),
            }
        }
    }
    Ok((coeff, gens))
}

/// A Lie element: a sum of scaled single generators.
pub fn parse_lie<F: Field>(alg: &AlgebraB<F>, s: &str) -> Result<LieElement<F>> {
    let terms = split_sum(s);
    if terms.is_empty() {
        return Err(parse_err("empty element"));
    }
    let mut out = LieElement::zero();
    for (neg, term) in terms {
        let (c, gens) = parse_product(alg, &term)?;
        if gens.len() != 1 {
            return Err(parse_err(format!("{term:?} is not a single generator")));
        }
        let c = if neg { -c } else { c };
        out = out.add(&gens[0].to_element().scale(&c));
    }
    Ok(out)
}

/// An element of the enveloping algebra: a sum of scaled products.
pub fn parse_uea<F: Field>(alg: &AlgebraB<F>, s: &str) -> Result<UeaElement<F>> {
    let terms = split_sum(s);
    if terms.is_empty() {
        return Err(parse_err("empty element"));
    }
    let mut out = UeaElement::zero();
    for (neg, term) in terms {
        let (c, gens) = parse_product(alg, &term)?;
        let c = if neg { -c } else { c };
        let prod = gens.iter().fold(UeaElement::identity(), |acc, g| {
            acc.word_multiply(&UeaElement::from_lie(&g.to_element()))
        });
        out = out.add(&prod.scale(&c));
    }
    Ok(out)
}

/// A tensor-module vector, e.g. `d[-1]*t v @ 2 - 3*x[2,1] @ 0`.
pub fn parse_tensor_vector<F: Field>(module: &TensorModule<F>, s: &str) -> Result<TensorVector<F>> {
    let alg = module.verma().algebra().clone();
    let terms = split_sum(s);
    if terms.is_empty() {
        return Err(parse_err("empty vector"));
    }
    let mut out = TensorVector::zero();
    for (neg, term) in terms {
        let (left, k) = term
            .rsplit_once('@')
            .ok_or_else(|| parse_err(format!("{term:?} lacks '@ k'")))?;
        let k: i64 = k
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("bad index in {term:?}")))?;
        let mut toks: Vec<&str> = left.split_whitespace().collect();
        let last = toks
            .pop()
            .ok_or_else(|| parse_err(format!("{term:?} lacks 'v' or 'x[i,q]'")))?;
        let mut pieces = split_star(last);
        let base = pieces.pop().expect("nonempty").trim();
        let prefix = pieces.join("*");
        if !prefix.is_empty() {
            toks.push(&prefix);
        }
        let (mut c, gens) = parse_product(&alg, &toks.join(" "))?;
        if neg {
            c = -c;
        }
        let vphi = if base == "v" {
            let word = gens.iter().fold(UeaElement::identity(), |acc, g| {
                acc.word_multiply(&UeaElement::from_lie(&g.to_element()))
            });
            let pbw = module.verma().engine().act_element(&word, &PbwVector::highest());
            module.verma().vphi_reduce(&pbw)?
        } else if let Some(inner) = base.strip_prefix("x[").and_then(|r| r.strip_suffix(']')) {
            if !gens.is_empty() {
                return Err(parse_err(format!("{term:?}: generators only apply to 'v'")));
            }
            let (i, q) = inner
                .split_once(',')
                .ok_or_else(|| parse_err(format!("bad basis vector {base:?}")))?;
            let i: usize = i.trim().parse().map_err(|_| parse_err(format!("bad level in {base:?}")))?;
            let q: usize = q.trim().parse().map_err(|_| parse_err(format!("bad index in {base:?}")))?;
            module.verma().basis_vector(i, q)?
        } else {
            return Err(parse_err(format!("{term:?} must end in 'v' or 'x[i,q]' before '@'")));
        };
        out.add_scaled(&c, &module.pure(&vphi, k)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff_algebra::CharacterPsi;
    use crate::loop_vir::BasisGen;
    use crate::modules_int::{IntModule, PsiSource};
    use crate::scalar::GaussianRational as S;
    use crate::verma::{FunctionalPhi, VermaModule};
    use std::sync::Arc;

    fn s(x: &str) -> S {
        x.parse().unwrap()
    }

    #[test]
    fn lie_elements() {
        let alg = AlgebraB::<S>::truncated_poly(3).unwrap();
        let x = parse_lie(&alg, "d[2]*t - 1/2*d[-1]*t^2 + (1+i)*C*1").unwrap();
        assert_eq!(x.coeff(&BasisGen::d(2, 1)), s("1"));
        assert_eq!(x.coeff(&BasisGen::d(-1, 2)), s("-1/2"));
        assert_eq!(x.coeff(&BasisGen::c(0)), s("1+i"));
        let y = parse_lie(&alg, "d[-3]").unwrap();
        assert_eq!(y.coeff(&BasisGen::d(-3, 0)), s("1"));
        assert!(parse_lie(&alg, "d[1]*q").is_err());
        assert!(parse_lie(&alg, "d[1] d[2]").is_err());
        let split = AlgebraB::<S>::split(2).unwrap();
        let u = parse_lie(&split, "i*d[0]*1").unwrap();
        assert_eq!(u.coeff(&BasisGen::d(0, 0)), s("i"));
        assert_eq!(u.coeff(&BasisGen::d(0, 1)), s("i"));
    }

    #[test]
    fn products() {
        let alg = AlgebraB::<S>::trivial();
        let u = parse_uea(&alg, "2*d[1] d[-1] - d[0]").unwrap();
        let words: Vec<_> = u.words().map(|(w, c)| (w.clone(), c.clone())).collect();
        assert_eq!(words.len(), 2);
        assert!(words.contains(&(vec![BasisGen::d(1, 0), BasisGen::d(-1, 0)], s("2"))));
        assert!(words.contains(&(vec![BasisGen::d(0, 0)], s("-1"))));
    }

    #[test]
    fn tensor_vectors() {
        let verma = VermaModule::new(
            Arc::new(AlgebraB::<S>::trivial()),
            FunctionalPhi::scalar(s("1"), s("0")),
            2,
        )
        .unwrap();
        let int = IntModule::prime_module(&s("1/2"), &s("2"), PsiSource::Character(CharacterPsi::new(vec![s("1")])));
        let t = TensorModule::new(Arc::new(verma), int).unwrap();
        let v = parse_tensor_vector(&t, "v @ 3").unwrap();
        assert_eq!(v, TensorVector::basis(0, 0, 3));
        let w = parse_tensor_vector(&t, "1/2*d[-1] v @ 1 - x[2,1] @ 0").unwrap();
        assert_eq!(w.coeff(&(1, 0, 1)), s("1/2"));
        assert_eq!(w.coeff(&(2, 1, 0)), s("-1"));
        assert!(parse_tensor_vector(&t, "v").is_err());
        let neg = parse_tensor_vector(&t, "-v @ -3 + d[-2] v @ -1").unwrap();
        assert_eq!(neg.coeff(&(0, 0, -3)), s("-1"));
        assert_eq!(neg.weight_offset(), Some(-3));
    }
}
