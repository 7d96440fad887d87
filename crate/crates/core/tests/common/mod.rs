//! Classical Chevalley–Eilenberg oracle for sl(2), written without the
//! library's braid or ghost machinery.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use qbrst::brst::{BrstCoefficients, GhostAlgebra, GhostPolynomial};
use qbrst::Scalar;

pub type Chain = BTreeMap<(Vec<usize>, Vec<usize>), BigRational>;

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `[x_i, x_j]` in the basis h, e, f.
pub fn sl2_bracket(i: usize, j: usize) -> Vec<(usize, BigRational)> {
    let (h, e, f) = (0, 1, 2);
    let one = |k, c: i64| vec![(k, int(c))];
    match (i, j) {
        (0, 1) => one(e, 2),
        (1, 0) => one(e, -2),
        (0, 2) => one(f, -2),
        (2, 0) => one(f, 2),
        (1, 2) => one(h, 1),
        (2, 1) => one(h, -1),
        _ => Vec::new(),
    }
}

/// Sorts the wedge indices, returning `None` on a repeated index.
fn sort_wedge(mut k: Vec<usize>) -> Option<(Vec<usize>, i64)> {
    let mut sign = 1;
    for i in 0..k.len() {
        for j in 0..k.len() - 1 - i {
            if k[j] == k[j + 1] {
                return None;
            }
            if k[j] > k[j + 1] {
                k.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if k.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((k, sign))
}

fn push(out: &mut Chain, word: Vec<usize>, wedge: Vec<usize>, c: BigRational) {
    if let Some((k, s)) = sort_wedge(wedge) {
        let key = (word, k);
        let e = out.entry(key.clone()).or_insert_with(BigRational::zero);
        *e += c * int(s);
        if e.is_zero() {
            out.remove(&key);
        }
    }
}

/// `d(a ⊗ x_1∧…∧x_n) = Σ_i (−1)^{i+1} a x_i ⊗ …x̂_i…
///  + Σ_{i<j} (−1)^{i+j} a ⊗ [x_i, x_j]∧…x̂_i…x̂_j…`.
pub fn ce_differential(
    bracket: impl Fn(usize, usize) -> Vec<(usize, BigRational)>,
    a: &[usize],
    x: &[usize],
) -> Chain {
    let n = x.len();
    let mut out = Chain::new();
    for i in 0..n {
        let sign = if i % 2 == 0 { 1 } else { -1 };
        let mut word = a.to_vec();
        word.push(x[i]);
        let rest: Vec<usize> = x.iter().enumerate().filter(|&(p, _)| p != i).map(|(_, &v)| v).collect();
        push(&mut out, word, rest, int(sign));
    }
    for i in 0..n {
        for j in i + 1..n {
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            for (k, c) in bracket(x[i], x[j]) {
                let mut wedge = vec![k];
                wedge.extend(x.iter().enumerate().filter(|&(p, _)| p != i && p != j).map(|(_, &v)| v));
                push(&mut out, a.to_vec(), wedge, c * int(sign));
            }
        }
    }
    out
}

/// Reads a ghost polynomial in the wedge basis: the canonical coordinate at
/// a strictly increasing index tuple is the coefficient of that wedge.
pub fn to_chain(alg: &GhostAlgebra, p: &GhostPolynomial) -> Chain {
    let n = alg.structure().n();
    let mut out = Chain::new();
    for ((word, m), v) in alg.canonical_form(p) {
        for (flat, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut idx = vec![0; m];
            let mut f = flat;
            for slot in idx.iter_mut().rev() {
                *slot = f % n;
                f /= n;
            }
            if idx.windows(2).all(|w| w[0] < w[1]) {
                let r = c.as_rational().expect("rational").clone();
                out.insert((word.clone(), idx), r);
            }
        }
    }
    out
}

/// `Q(a γ_J)` in the wedge basis.
pub fn q_chain(alg: &GhostAlgebra, coeffs: &BrstCoefficients, a: &[usize], j: &[usize]) -> Chain {
    let p = GhostPolynomial::term(a.to_vec(), j.len(), alg.monomial(j));
    let q = alg.apply_q(coeffs, &p, None).expect("apply_q");
    to_chain(alg, &q)
}

pub fn scaled(c: &Chain, s: i64) -> Chain {
    c.iter().map(|(k, v)| (k.clone(), v * int(s))).collect()
}

pub fn one() -> BigRational {
    BigRational::one()
}

pub fn scalar(x: &BigRational) -> Scalar {
    Scalar::from(x.clone())
}

/// Rewrites every word in increasing PBW order using
/// `x_i x_j = x_j x_i + [x_i, x_j]`.
pub fn pbw(bracket: &impl Fn(usize, usize) -> Vec<(usize, BigRational)>, c: &Chain) -> Chain {
    let mut out = Chain::new();
    let mut todo: Vec<((Vec<usize>, Vec<usize>), BigRational)> = c.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    while let Some(((w, k), v)) = todo.pop() {
        match w.windows(2).position(|p| p[0] > p[1]) {
            None => {
                let e = out.entry((w, k)).or_insert_with(BigRational::zero);
                *e += v;
            }
            Some(p) => {
                let mut swapped = w.clone();
                swapped.swap(p, p + 1);
                todo.push(((swapped, k.clone()), v.clone()));
                for (g, b) in bracket(w[p], w[p + 1]) {
                    let mut shorter = w[..p].to_vec();
                    shorter.push(g);
                    shorter.extend(&w[p + 2..]);
                    todo.push(((shorter, k.clone()), &v * b));
                }
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}
