//! Braid group algebra elements, their evaluation in a representation, and
//! the identity suite relating antisymmetrizers, shuffles, `Y` and the
//! Jucys–Murphy elements.
//!
//! A word `[a, b, c]` stands for `σ̂_a σ̂_b σ̂_c` (1-based, negative entries
//! are inverse generators) and evaluates to `σ_a ∘ σ_b ∘ σ_c`.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linop::{pow, LinOp, Mismatch};
use crate::report::{CheckItem, VerificationReport, Witness};
use crate::scalar::Scalar;

pub type Word = Vec<i32>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BraidElement {
    terms: BTreeMap<Word, Scalar>,
}

impl BraidElement {
    pub fn zero() -> Self {
        BraidElement::default()
    }

    pub fn one() -> Self {
        BraidElement::word(Scalar::one(), Vec::new())
    }

    pub fn word(c: Scalar, w: Word) -> Self {
        let mut e = BraidElement::zero();
        e.add_term(c, w);
        e
    }

    pub fn generator(i: usize) -> Self {
        BraidElement::word(Scalar::one(), vec![i as i32])
    }

    pub fn inverse_generator(i: usize) -> Self {
        BraidElement::word(Scalar::one(), vec![-(i as i32)])
    }

    /// `σ̂_from σ̂_{from-1} … σ̂_to`, or `σ̂_from σ̂_{from+1} … σ̂_to` when
    /// `from < to`.
    pub fn chain(from: usize, to: usize) -> Self {
        let w: Word = if from >= to {
            (to..=from).rev().map(|i| i as i32).collect()
        } else {
            (from..=to).map(|i| i as i32).collect()
        };
        BraidElement::word(Scalar::one(), w)
    }

    fn add_term(&mut self, c: Scalar, w: Word) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(w).or_insert_with(Scalar::zero);
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &BraidElement) -> BraidElement {
        let mut e = self.clone();
        for (w, c) in &o.terms {
            e.add_term(c.clone(), w.clone());
        }
        e
    }

    pub fn sub(&self, o: &BraidElement) -> BraidElement {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> BraidElement {
        self.scale(&-Scalar::one())
    }

    pub fn scale(&self, s: &Scalar) -> BraidElement {
        let mut e = BraidElement::zero();
        for (w, c) in &self.terms {
            e.add_term(c * s, w.clone());
        }
        e
    }

    pub fn mul(&self, o: &BraidElement) -> BraidElement {
        let mut e = BraidElement::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                e.add_term(c1 * c2, w);
            }
        }
        e
    }

    /// Conjugation by `T_k`: every generator index shifted by `k`.
    pub fn shift(&self, k: usize) -> BraidElement {
        let k = k as i32;
        BraidElement {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| {
                    let w = w.iter().map(|&g| if g > 0 { g + k } else { g - k }).collect();
                    (w, c.clone())
                })
                .collect(),
        }
    }

    pub fn max_generator(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|w| w.iter().map(|g| g.unsigned_abs() as usize))
            .max()
            .unwrap_or(0)
    }
}

fn sign(e: usize) -> Scalar {
    if e % 2 == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

fn check_range(k: usize, m: usize) -> Result<()> {
    if k == 0 || k > m {
        return Err(Error::BadRange(format!("{k}→{m}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// `f_{k→m} = 1 − σ̂_{m−1} + σ̂_{m−2}σ̂_{m−1} − …` or
/// `f̄_{k→m} = 1 − σ̂_k + σ̂_{k+1}σ̂_k − …`.
pub fn build_f(dir: Direction, k: usize, m: usize) -> Result<BraidElement> {
    check_range(k, m)?;
    let mut e = BraidElement::one();
    for len in 1..=(m - k) {
        let w = match dir {
            Direction::Forward => BraidElement::chain(m - len, m - 1),
            Direction::Backward => BraidElement::chain(k + len - 1, k),
        };
        e = e.add(&w.scale(&sign(len)));
    }
    Ok(e)
}

pub fn f(k: usize, m: usize) -> Result<BraidElement> {
    build_f(Direction::Forward, k, m)
}

pub fn fbar(k: usize, m: usize) -> Result<BraidElement> {
    build_f(Direction::Backward, k, m)
}

/// Factors `[f_{k→n}, f_{k→n−1}, …, f_{k→k+1}]` whose product is `A_{k→n}`;
/// empty when `k ≥ n`.
pub fn antisymmetrizer_factors(k: usize, n: usize) -> Vec<BraidElement> {
    ((k + 1)..=n)
        .rev()
        .map(|m| f(k, m).expect("valid range"))
        .collect()
}

/// `A_{1→n}` as a single formal sum (`n!` words).
pub fn build_antisymmetrizer(n: usize) -> Result<BraidElement> {
    if n == 0 {
        return Err(Error::BadRange("antisymmetrizer needs n ≥ 1".into()));
    }
    Ok(product(&antisymmetrizer_factors(1, n)))
}

/// `A_{k→n}`, with `A_{n+1→n} = 1`.
pub fn antisymmetrizer_range(k: usize, n: usize) -> Result<BraidElement> {
    if k == 0 || k > n + 1 {
        return Err(Error::BadRange(format!("{k}→{n}")));
    }
    Ok(product(&antisymmetrizer_factors(k, n)))
}

pub fn product(factors: &[BraidElement]) -> BraidElement {
    factors.iter().fold(BraidElement::one(), |acc, x| acc.mul(x))
}

/// The quantum shuffle `x^{(m)}_n`.
pub fn build_shuffle(m: usize, n: usize) -> Result<BraidElement> {
    if m > n {
        return Err(Error::BadRange(format!("x^({m})_{n}")));
    }
    let mut memo = BTreeMap::new();
    Ok(shuffle_rec(m, n, &mut memo))
}

fn shuffle_rec(p: usize, n: usize, memo: &mut BTreeMap<(usize, usize), BraidElement>) -> BraidElement {
    if p == 0 || p == n {
        return BraidElement::one();
    }
    if let Some(e) = memo.get(&(p, n)) {
        return e.clone();
    }
    // x^{(p)}_n = x^{(p−1)}_{n−1} − (−1)^{p−1} x^{(p)}_{n−1} σ̂_{n−1} … σ̂_{n−p}
    let a = shuffle_rec(p - 1, n - 1, memo);
    let b = shuffle_rec(p, n - 1, memo).mul(&BraidElement::chain(n - 1, n - p));
    let e = a.sub(&b.scale(&sign(p - 1)));
    memo.insert((p, n), e.clone());
    e
}

/// `Y_{k→r+1}` in product form; `r1` is `r + 1`.
pub fn build_y(k: usize, r1: usize) -> Result<BraidElement> {
    check_range(k, r1)?;
    let r = r1 - 1;
    let mut e = BraidElement::one();
    for s in 0..(r1 - k) {
        let mut w: Word = ((r - s)..r).map(|i| i as i32).collect();
        w.extend([r as i32, r as i32]);
        let factor = BraidElement::one().sub(&BraidElement::word(sign(s), w));
        e = e.mul(&factor);
    }
    Ok(e)
}

/// `Y_{k→r+1}` in the Zagier form
/// `(1 + σ̂_r)(1 − σ̂_{r−1}σ̂_r)… f_{k→r+1}`.
pub fn build_y_zagier(k: usize, r1: usize) -> Result<BraidElement> {
    check_range(k, r1)?;
    let r = r1 - 1;
    let mut e = BraidElement::one();
    for s in 0..(r1 - k) {
        let factor = BraidElement::one().add(&BraidElement::chain(r - s, r).scale(&sign(s)));
        e = e.mul(&factor);
    }
    Ok(e.mul(&f(k, r1)?))
}

/// `J_1 = 1`, `J_{r+1} = σ̂_r J_r σ̂_r`.
pub fn build_jucys_murphy(r: usize) -> Result<BraidElement> {
    if r == 0 {
        return Err(Error::BadRange("Jucys–Murphy index starts at 1".into()));
    }
    let mut e = BraidElement::one();
    for i in 1..r {
        let g = BraidElement::generator(i);
        e = g.mul(&e).mul(&g);
    }
    Ok(e)
}

pub type SparseVec = BTreeMap<usize, Scalar>;

fn axpy(out: &mut SparseVec, c: &Scalar, v: &SparseVec) {
    for (k, x) in v {
        let slot = out.entry(*k).or_insert_with(Scalar::zero);
        *slot = &*slot + &(c * x);
    }
}

fn prune(mut v: SparseVec) -> SparseVec {
    v.retain(|_, x| !x.is_zero());
    v
}

/// A braid group representation generated by a 2→2 operator placed on
/// adjacent legs.
#[derive(Clone, Debug)]
pub struct Representation {
    generator: LinOp,
    inverse: Option<LinOp>,
    gen_cols: Vec<Vec<(usize, Scalar)>>,
    inv_cols: Option<Vec<Vec<(usize, Scalar)>>>,
}

impl Representation {
    /// Computes the inverse image by exact solve when the generator is
    /// invertible over the scalar ring.
    pub fn new(generator: LinOp) -> Result<Self> {
        if generator.in_legs() != 2 || generator.out_legs() != 2 {
            return Err(Error::ArityMismatch("braid generator image must be 2→2".into()));
        }
        let inverse = generator.inverse().ok();
        Ok(Self::assemble(generator, inverse))
    }

    pub fn with_inverse(generator: LinOp, inverse: LinOp) -> Result<Self> {
        if generator.in_legs() != 2 || generator.out_legs() != 2 {
            return Err(Error::ArityMismatch("braid generator image must be 2→2".into()));
        }
        let id = LinOp::identity(generator.dim(), 2);
        if generator.compose(&inverse)? != id || inverse.compose(&generator)? != id {
            return Err(Error::Shape("declared inverse is not a two-sided inverse".into()));
        }
        Ok(Self::assemble(generator, Some(inverse)))
    }

    fn assemble(generator: LinOp, inverse: Option<LinOp>) -> Self {
        Representation {
            gen_cols: generator.column_lists(),
            inv_cols: inverse.as_ref().map(LinOp::column_lists),
            generator,
            inverse,
        }
    }

    /// The flip `e_a ⊗ e_b ↦ e_b ⊗ e_a` on `d` dimensions.
    pub fn permutation(d: usize) -> Self {
        Representation::new(permutation_op(d)).expect("2→2")
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn generator(&self) -> &LinOp {
        &self.generator
    }

    pub fn inverse(&self) -> Option<&LinOp> {
        self.inverse.as_ref()
    }

    pub fn braid_relation_mismatch(&self) -> Option<Mismatch> {
        let s1 = self.generator.embed_at(1, 3).expect("fits");
        let s2 = self.generator.embed_at(2, 3).expect("fits");
        let l = s1.compose(&s2).and_then(|x| x.compose(&s1)).expect("shapes");
        let r = s2.compose(&s1).and_then(|x| x.compose(&s2)).expect("shapes");
        l.first_mismatch(&r).expect("shapes")
    }

    fn apply_generator(&self, g: i32, v: &SparseVec, legs: usize) -> Result<SparseVec> {
        let cols = if g > 0 {
            &self.gen_cols
        } else {
            self.inv_cols.as_ref().ok_or(Error::MissingInverse)?
        };
        let k = g.unsigned_abs() as usize;
        let d = self.dim();
        let stride = pow(d, legs - k - 1);
        let dd = d * d;
        let mut out = SparseVec::new();
        for (x, c) in v {
            let pair = (x / stride) % dd;
            let base = x - pair * stride;
            for (o, s) in &cols[pair] {
                let slot = out.entry(base + o * stride).or_insert_with(Scalar::zero);
                *slot = &*slot + &(c * s);
            }
        }
        Ok(prune(out))
    }

    fn check_fits(&self, e: &BraidElement, legs: usize) -> Result<()> {
        let m = e.max_generator();
        if m > 0 && m + 1 > legs {
            return Err(Error::StrandOverflow { index: m, legs });
        }
        Ok(())
    }

    pub fn apply_word(&self, w: &[i32], v: &SparseVec, legs: usize) -> Result<SparseVec> {
        let mut cur = v.clone();
        for &g in w.iter().rev() {
            if cur.is_empty() {
                break;
            }
            cur = self.apply_generator(g, &cur, legs)?;
        }
        Ok(cur)
    }

    pub fn apply(&self, e: &BraidElement, v: &SparseVec, legs: usize) -> Result<SparseVec> {
        self.check_fits(e, legs)?;
        let mut out = SparseVec::new();
        for (w, c) in e.terms() {
            axpy(&mut out, c, &self.apply_word(w, v, legs)?);
        }
        Ok(prune(out))
    }

    /// Applies `factors[0] ∘ factors[1] ∘ …` to the given basis columns.
    pub fn evaluate_columns(
        &self,
        factors: &[BraidElement],
        legs: usize,
        cols: &[usize],
    ) -> Result<Vec<SparseVec>> {
        for e in factors {
            self.check_fits(e, legs)?;
        }
        cols.par_iter()
            .map(|&c| {
                let mut v = SparseVec::from([(c, Scalar::one())]);
                for e in factors.iter().rev() {
                    if v.is_empty() {
                        break;
                    }
                    v = self.apply(e, &v, legs)?;
                }
                Ok(v)
            })
            .collect()
    }

    pub fn evaluate_product(&self, factors: &[BraidElement], legs: usize) -> Result<LinOp> {
        let d = self.dim();
        let n = pow(d, legs);
        let cols: Vec<usize> = (0..n).collect();
        let columns = self.evaluate_columns(factors, legs, &cols)?;
        let mut op = LinOp::zeros(d, legs, legs);
        for (c, v) in columns.into_iter().enumerate() {
            for (r, x) in v {
                op.set_at(r, c, x);
            }
        }
        Ok(op)
    }

    pub fn evaluate(&self, e: &BraidElement, legs: usize) -> Result<LinOp> {
        self.evaluate_product(std::slice::from_ref(e), legs)
    }

    /// `A_{1→n}` on `n` legs.
    pub fn antisymmetrizer(&self, n: usize) -> LinOp {
        self.evaluate_product(&antisymmetrizer_factors(1, n), n.max(1))
            .expect("generators fit")
    }
}

pub fn permutation_op(d: usize) -> LinOp {
    let mut p = LinOp::zeros(d, 2, 2);
    for a in 0..d {
        for b in 0..d {
            p.set(&[a, b], &[b, a], Scalar::one());
        }
    }
    p
}

pub fn evaluate(e: &BraidElement, rep: &Representation, legs: usize) -> Result<LinOp> {
    rep.evaluate(e, legs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Height {
    Exact(usize),
    AtLeast(usize),
}

impl std::fmt::Display for Height {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Height::Exact(h) => write!(f, "{h}"),
            Height::AtLeast(h) => write!(f, ">= {h}"),
        }
    }
}

impl Height {
    /// Exact value, or the lower bound when the search was cut off.
    pub fn bound(&self) -> usize {
        match self {
            Height::Exact(h) | Height::AtLeast(h) => *h,
        }
    }
}

fn all_zero(cols: &[SparseVec]) -> bool {
    cols.iter().all(|c| c.is_empty())
}

/// Smallest `h ≤ n_max` with `A_{1→h+1} = 0`.
pub fn compute_height(rep: &Representation, n_max: usize) -> Height {
    let d = rep.dim();
    for h in 1..=n_max {
        let legs = h + 1;
        let cols: Vec<usize> = (0..pow(d, legs)).collect();
        let a = rep
            .evaluate_columns(&antisymmetrizer_factors(1, legs), legs, &cols)
            .expect("generators fit");
        if all_zero(&a) {
            return Height::Exact(h);
        }
    }
    Height::AtLeast(n_max + 1)
}

/// One identity instance: `Π lhs = Π rhs` on `legs` strands.
struct Instance {
    id: &'static str,
    subject: String,
    legs: usize,
    lhs: Vec<BraidElement>,
    rhs: Vec<BraidElement>,
}

impl Instance {
    fn new(id: &'static str, subject: String, lhs: Vec<BraidElement>, rhs: Vec<BraidElement>) -> Self {
        let legs = lhs
            .iter()
            .chain(&rhs)
            .map(BraidElement::max_generator)
            .max()
            .unwrap_or(0)
            + 1;
        Instance {
            id,
            subject,
            legs,
            lhs,
            rhs,
        }
    }

    fn run(&self, rep: &Representation) -> CheckItem {
        let start = Instant::now();
        let outcome = rep
            .evaluate_product(&self.lhs, self.legs)
            .and_then(|l| Ok((l, rep.evaluate_product(&self.rhs, self.legs)?)))
            .and_then(|(l, r)| l.first_mismatch(&r));
        let item = match outcome {
            Ok(m) => CheckItem::compare(self.id, &self.subject, m.map(|m| Witness::from_mismatch(&m, 0))),
            Err(e) => CheckItem::skipped(self.id, &self.subject, e.to_string()),
        };
        item.with_elapsed(start.elapsed())
    }
}

fn identity_instances(n_max: usize) -> Vec<Instance> {
    let mut v = Vec::new();
    for n in 2..=n_max {
        let mut via_fbar = vec![fbar(1, n).unwrap()];
        via_fbar.extend(antisymmetrizer_factors(2, n));
        v.push(Instance::new(
            "antisymmetrizer_recursions",
            format!("n={n}"),
            antisymmetrizer_factors(1, n),
            via_fbar,
        ));
    }
    for n in 1..=n_max {
        for m in 1..=n {
            let mut rhs = vec![build_shuffle(n - m, n).unwrap()];
            rhs.extend(antisymmetrizer_factors(1, m));
            rhs.extend(antisymmetrizer_factors(m + 1, n));
            v.push(Instance::new(
                "shuffle_factorization",
                format!("n={n},m={m}"),
                antisymmetrizer_factors(1, n),
                rhs,
            ));

            let lhs: Vec<_> = (m..=n).rev().map(|j| f(1, j).unwrap()).collect();
            let mut rhs = vec![build_shuffle(n - m + 1, n).unwrap()];
            rhs.extend(antisymmetrizer_factors(m, n));
            v.push(Instance::new("ffxa", format!("n={n},m={m}"), lhs, rhs));

            let lhs: Vec<_> = (1..=m).map(|j| fbar(j, n).unwrap()).collect();
            let mut rhs = vec![build_shuffle(n - m, n).unwrap()];
            rhs.extend(antisymmetrizer_factors(1, m));
            v.push(Instance::new("ffxb", format!("n={n},m={m}"), lhs, rhs));
        }
    }
    for m in 1..=n_max {
        v.push(Instance::new(
            "shuffle_first",
            format!("m={m}"),
            vec![build_shuffle(1, m).unwrap()],
            vec![f(1, m).unwrap()],
        ));
        if m >= 2 {
            v.push(Instance::new(
                "shuffle_last",
                format!("n={m}"),
                vec![build_shuffle(m - 1, m).unwrap()],
                vec![fbar(1, m).unwrap()],
            ));
        }
    }
    for m in 2..n_max {
        // x^{(2)}_{m+1} = Σ_j f_{1→m−j} (σ̂_{m−j+1}σ̂_{m−j}) … (σ̂_m σ̂_{m−1})
        let mut sum = BraidElement::zero();
        for j in 0..m {
            let mut term = f(1, m - j).unwrap();
            for i in (m - j + 1)..=m {
                term = term.mul(&BraidElement::chain(i, i - 1));
            }
            sum = sum.add(&term);
        }
        v.push(Instance::new(
            "shuffle_two_explicit",
            format!("m={m}"),
            vec![build_shuffle(2, m + 1).unwrap()],
            vec![sum],
        ));
    }
    for n in 3..=n_max {
        for m in 2..n {
            for k in 1..m {
                let lhs = vec![build_shuffle(n - m, n).unwrap(), build_shuffle(m - k, m).unwrap()];
                let rhs = vec![
                    build_shuffle(n - k, n).unwrap(),
                    build_shuffle(n - m, n - k).unwrap().shift(k),
                ];
                v.push(Instance::new(
                    "shuffle_associativity",
                    format!("n={n},m={m},k={k}"),
                    lhs,
                    rhs,
                ));
            }
        }
    }
    for r in 1..n_max {
        let lhs = vec![build_y(1, r + 1).unwrap(), fbar(1, r).unwrap()];
        let head = f(1, r + 1)
            .unwrap()
            .mul(&BraidElement::chain(r, 1))
            .scale(&sign(r + 1))
            .add(&fbar(1, r + 1).unwrap());
        let y2 = build_y(2, r + 1).unwrap();
        v.push(Instance::new(
            "y_fbar",
            format!("r={r}"),
            lhs.clone(),
            vec![head, y2.clone()],
        ));
        let head_f = f(1, r)
            .unwrap()
            .mul(&BraidElement::generator(r))
            .mul(&BraidElement::chain(r, 1))
            .scale(&sign(r))
            .add(&fbar(1, r).unwrap());
        v.push(Instance::new(
            "y_fbar_factored",
            format!("r={r}"),
            lhs,
            vec![head_f, y2],
        ));
    }
    for r1 in 2..=n_max {
        for k in 1..r1 {
            v.push(Instance::new(
                "zagier_factorization",
                format!("k={k},r+1={r1}"),
                vec![build_y(k, r1).unwrap()],
                vec![build_y_zagier(k, r1).unwrap()],
            ));
        }
    }
    for m in 1..n_max {
        v.push(Instance::new(
            "f_fbar_exchange",
            format!("m={m}"),
            vec![f(1, m + 1).unwrap(), fbar(1, m).unwrap()],
            vec![fbar(1, m + 1).unwrap(), f(2, m + 1).unwrap()],
        ));
    }
    for r in 2..=n_max {
        let jr = build_jucys_murphy(r).unwrap();
        for m in 1..r {
            let jm = build_jucys_murphy(m).unwrap();
            v.push(Instance::new(
                "jucys_murphy_commute",
                format!("r={r},m={m}"),
                vec![jr.mul(&jm)],
                vec![jm.mul(&jr)],
            ));
        }
        for m in 1..r.saturating_sub(1) {
            let g = BraidElement::generator(m);
            v.push(Instance::new(
                "jucys_murphy_generator",
                format!("r={r},m={m}"),
                vec![g.mul(&jr)],
                vec![jr.mul(&g)],
            ));
        }
    }
    v
}

/// Evaluates every identity instance with `n ≤ n_max` strands.
pub fn verify_braid_suite(rep: &Representation, n_max: usize, label: &str) -> VerificationReport {
    let instances = identity_instances(n_max);
    let mut items: Vec<CheckItem> = instances.par_iter().map(|i| i.run(rep)).collect();
    for it in &mut items {
        it.subject = format!("{label} {}", it.subject);
    }
    items.sort_by(|a, b| (&a.id, &a.subject).cmp(&(&b.id, &b.subject)));
    let mut report = VerificationReport::new(format!("braid identities ({label})"));
    for it in items {
        report.push(it);
    }
    report
}
