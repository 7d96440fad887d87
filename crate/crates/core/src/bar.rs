//! The bar complex of `U` (the algebra generated by `χ_i` modulo the
//! quantum Lie relations), the two-sided ideal of relations, and the
//! tensors `W_{n+1}` describing the boundary on antisymmetric chains.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use rayon::prelude::*;

use crate::braid::{self, BraidElement};
use crate::brst::{test_monomials, BrstCoefficients, GhostAlgebra, GhostPolynomial};
use crate::error::{Error, Result};
use crate::field::Frac;
use crate::linalg::Echelon;
use crate::linop::{digits, flatten, pow, LinOp};
use crate::qlie::StructureConstants;
use crate::report::{CheckItem, VerificationReport, Witness};
use crate::scalar::Scalar;

pub type Word = Vec<usize>;

/// Linear combination of free χ-words (0-based letters).
pub type WordSum = BTreeMap<Word, Scalar>;

/// Word sums over the fraction field, used for reduction.
pub type FracWordSum = BTreeMap<Word, Frac>;

fn fmt_word(w: &[usize]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter().map(|x| format!("χ{}", x + 1)).collect()
}

fn to_frac(ws: &WordSum) -> FracWordSum {
    ws.iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(w, c)| (w.clone(), Frac::from(c)))
        .collect()
}

/// `u · g_{ij} · v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealGenerator {
    pub left: Word,
    pub relator: (usize, usize),
    pub right: Word,
}

impl IdealGenerator {
    pub fn describe(&self) -> String {
        format!(
            "{}·g{},{}·{}",
            fmt_word(&self.left),
            self.relator.0 + 1,
            self.relator.1 + 1,
            fmt_word(&self.right)
        )
    }
}

/// A certificate `Σ c_k u_k g_k v_k` for membership in the ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealWitness {
    pub terms: Vec<(Frac, IdealGenerator)>,
}

impl IdealWitness {
    /// Multiplies the certificate back out.
    pub fn expand(&self, ideal: &Ideal) -> FracWordSum {
        let mut out = FracWordSum::new();
        for (c, g) in &self.terms {
            for (w, x) in ideal.generator_sum(g) {
                let slot = out.entry(w).or_insert_with(Frac::zero);
                *slot = slot.add(&c.mul(&x));
            }
        }
        out.retain(|_, x| !x.is_zero());
        out
    }
}

#[derive(Clone, Debug)]
pub enum Membership {
    Member(IdealWitness),
    /// Normal form of the element, nonzero.
    NonMember(FracWordSum),
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

/// The two-sided ideal generated by
/// `g_{ij} = Σ (δ − σ)[(i,j)][(k,l)] χ_k χ_l − Σ C[(i,j)][k] χ_k`,
/// truncated to words of length ≤ `cap`.
#[derive(Clone, Debug)]
pub struct Ideal {
    n: usize,
    cap: usize,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    relators: Vec<FracWordSum>,
    generators: Vec<IdealGenerator>,
    echelon: Echelon,
}

fn all_words(n: usize, len: usize) -> impl Iterator<Item = Word> {
    (0..pow(n, len)).map(move |f| digits(f, len, n))
}

impl Ideal {
    /// Spans `u g_{ij} v` for all words with `|u| + |v| ≤ cap − 2`.
    pub fn new(sc: &StructureConstants, cap: usize) -> Self {
        let n = sc.n();
        // longest words first, so normal forms prefer short words
        let mut words: Vec<Word> = Vec::new();
        for len in (0..=cap).rev() {
            words.extend(all_words(n, len));
        }
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let mut relators = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut g = FracWordSum::new();
                g.insert(vec![i, j], Frac::one());
                for k in 0..n {
                    for l in 0..n {
                        let s = sc.sigma.get(&[i, j], &[k, l]);
                        if !s.is_zero() {
                            let slot = g.entry(vec![k, l]).or_insert_with(Frac::zero);
                            *slot = slot.sub(&Frac::from(s));
                        }
                    }
                    let s = sc.c.get(&[i, j], &[k]);
                    if !s.is_zero() {
                        g.insert(vec![k], Frac::from(s).neg());
                    }
                }
                g.retain(|_, x| !x.is_zero());
                relators.push(g);
            }
        }
        let mut ideal = Ideal {
            n,
            cap,
            echelon: Echelon::new(words.len()),
            words,
            index,
            relators,
            generators: Vec::new(),
        };
        if cap >= 2 {
            for total in 0..=(cap - 2) {
                for lu in 0..=total {
                    for u in all_words(n, lu) {
                        for v in all_words(n, total - lu) {
                            for i in 0..n {
                                for j in 0..n {
                                    let g = IdealGenerator {
                                        left: u.clone(),
                                        relator: (i, j),
                                        right: v.clone(),
                                    };
                                    let vec = ideal.to_vector(&ideal.generator_sum(&g)).expect("within cap");
                                    ideal.echelon.insert(vec);
                                    ideal.generators.push(g);
                                }
                            }
                        }
                    }
                }
            }
        }
        ideal
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Dimension of the truncated ideal.
    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn generator_sum(&self, g: &IdealGenerator) -> FracWordSum {
        self.relators[g.relator.0 * self.n + g.relator.1]
            .iter()
            .map(|(w, x)| {
                let mut full = g.left.clone();
                full.extend(w);
                full.extend(&g.right);
                (full, x.clone())
            })
            .collect()
    }

    fn to_vector(&self, ws: &FracWordSum) -> Result<Vec<Frac>> {
        let mut v = vec![Frac::zero(); self.words.len()];
        for (w, x) in ws {
            if w.len() > self.cap {
                return Err(Error::DegreeCapExceeded {
                    found: w.len(),
                    cap: self.cap,
                });
            }
            v[self.index[w]] = x.clone();
        }
        Ok(v)
    }

    fn from_vector(&self, v: Vec<Frac>) -> FracWordSum {
        v.into_iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (self.words[i].clone(), x))
            .collect()
    }

    pub fn reduce_frac(&self, ws: &FracWordSum) -> Result<Membership> {
        let v = self.to_vector(ws)?;
        Ok(match self.echelon.express(&v) {
            Ok(combo) => Membership::Member(IdealWitness {
                terms: combo
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| (c, self.generators[k].clone()))
                    .collect(),
            }),
            Err(residual) => Membership::NonMember(self.from_vector(residual)),
        })
    }

    pub fn reduce(&self, ws: &WordSum) -> Result<Membership> {
        self.reduce_frac(&to_frac(ws))
    }

    /// Canonical representative of the class of `ws` in `U`.
    pub fn normal_form(&self, ws: &FracWordSum) -> Result<FracWordSum> {
        let v = self.to_vector(ws)?;
        Ok(self.from_vector(self.echelon.normal_form(&v)))
    }
}

/// Element of `⊕_m U^{⊗m}` with free words in every slot.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BarChain {
    terms: BTreeMap<Vec<Word>, Scalar>,
}

impl BarChain {
    pub fn zero() -> Self {
        BarChain::default()
    }

    pub fn term(slots: Vec<Word>, c: Scalar) -> Self {
        let mut b = BarChain::zero();
        b.add_term(slots, &c);
        b
    }

    pub fn add_term(&mut self, slots: Vec<Word>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(slots.clone()).or_insert_with(Scalar::zero);
        *slot = &*slot + c;
        if slot.is_zero() {
            self.terms.remove(&slots);
        }
    }

    pub fn add(&self, o: &BarChain) -> BarChain {
        let mut out = self.clone();
        for (s, c) in &o.terms {
            out.add_term(s.clone(), c);
        }
        out
    }

    pub fn sub(&self, o: &BarChain) -> BarChain {
        self.add(&o.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> BarChain {
        let mut out = BarChain::zero();
        for (s, x) in &self.terms {
            out.add_term(s.clone(), &(x * c));
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Word>, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `b(a_0 ⊗ … ⊗ a_m) = Σ_{i=1}^{m} (−1)^{m−i} a_0 ⊗ … ⊗ a_{i−1}a_i ⊗ … ⊗ a_m`
    /// (slots counted from 1). Every term needs at least two slots.
    pub fn boundary(&self) -> Result<BarChain> {
        let mut out = BarChain::zero();
        for (slots, c) in &self.terms {
            if slots.len() < 2 {
                return Err(Error::DegreeTooLow(slots.len()));
            }
            let m = slots.len() - 1;
            for i in 1..=m {
                let mut merged = Vec::with_capacity(m);
                merged.extend_from_slice(&slots[..i - 1]);
                let mut w = slots[i - 1].clone();
                w.extend(&slots[i]);
                merged.push(w);
                merged.extend_from_slice(&slots[i + 1..]);
                let s = if (m - i) % 2 == 0 { c.clone() } else { -c.clone() };
                out.add_term(merged, &s);
            }
        }
        Ok(out)
    }

    /// `δ(c) = c ⊗ 1`.
    pub fn homotopy(&self) -> BarChain {
        let mut out = BarChain::zero();
        for (slots, c) in &self.terms {
            let mut s = slots.clone();
            s.push(Vec::new());
            out.add_term(s, c);
        }
        out
    }
}

/// `a ⊗ (γ-tensor c)`: the chain `Σ_l c_l a ⊗ χ_{l1} ⊗ … ⊗ χ_{lm}`.
pub fn embed_raw(a: &[usize], raw: &[Scalar], m: usize, n: usize) -> BarChain {
    let mut out = BarChain::zero();
    for (l, c) in raw.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut slots = vec![a.to_vec()];
        slots.extend(digits(l, m, n).into_iter().map(|x| vec![x]));
        out.add_term(slots, c);
    }
    out
}

/// The antisymmetric chain `a ⊗ γ_{j1}∧…∧γ_{jm}`, i.e. row `j` of `A_{1→m}`
/// spread over single-letter slots.
pub fn antisymmetrize_chain(antisym: &LinOp, a: &[usize], j: &[usize]) -> BarChain {
    let n = antisym.dim();
    let row = flatten(j, n);
    let raw: Vec<Scalar> = (0..antisym.cols()).map(|c| antisym.at(row, c).clone()).collect();
    embed_raw(a, &raw, j.len(), n)
}

/// `ι(a·c) = a ⊗ A_{1→m}^T c` spread over single-letter slots.
pub fn chain_map_i(alg: &GhostAlgebra, p: &GhostPolynomial) -> BarChain {
    let n = alg.structure().n();
    let mut out = BarChain::zero();
    for (w, m, c) in p.terms() {
        out = out.add(&embed_raw(w, &alg.canonical(c, m), m, n));
    }
    out
}

/// `W_{r}` by `W_2 = C`, `W_{m+1} = Z_{m+1} − W_m ⊗ 1`; (r−1)-in/r-out.
pub fn build_w(sc: &StructureConstants, r: usize) -> Result<LinOp> {
    if r < 2 {
        return Err(Error::BadRange(format!("W_{r} is defined for r ≥ 2")));
    }
    let mut w = sc.c.clone();
    for m in 2..r {
        w = sc.build_z(m + 1)?.sub(&w.embed(0, 1))?;
    }
    Ok(w)
}

/// `W_r = Σ_{k=2}^{r} (−1)^{r−k} Z_k ⊗ 1^{⊗(r−k)}`.
pub fn build_w_alternating(sc: &StructureConstants, r: usize) -> Result<LinOp> {
    if r < 2 {
        return Err(Error::BadRange(format!("W_{r} is defined for r ≥ 2")));
    }
    let mut total = LinOp::zeros(sc.n(), r - 1, r);
    for k in 2..=r {
        let z = sc.build_z(k)?.embed(0, r - k);
        total = if (r - k) % 2 == 0 { total.add(&z)? } else { total.sub(&z)? };
    }
    Ok(total)
}

/// `W_r = Σ_{k=1}^{r−1} (−1)^{r−1−k} f̄_{k+1→r} C_k δ…`.
pub fn build_w_explicit(sc: &StructureConstants, r: usize) -> Result<LinOp> {
    if r < 2 {
        return Err(Error::BadRange(format!("W_{r} is defined for r ≥ 2")));
    }
    let rep = sc.sigma_rep();
    let mut total = LinOp::zeros(sc.n(), r - 1, r);
    for k in 1..r {
        let ck = sc.c.embed(k - 1, r - 1 - k);
        let term = rep.evaluate(&braid::fbar(k + 1, r)?, r)?.compose(&ck)?;
        total = if (r - 1 - k) % 2 == 0 { total.add(&term)? } else { total.sub(&term)? };
    }
    Ok(total)
}

/// The block of `(f̄_{1→r} − 1) R_1 … R_{r−1}` in the extended
/// representation; equals `(−1)^{r−1} W_r`.
pub fn build_w_r_form(sc: &StructureConstants, r: usize) -> Result<LinOp> {
    if r < 2 {
        return Err(Error::BadRange(format!("W_{r} is defined for r ≥ 2")));
    }
    let head = braid::fbar(1, r)?.sub(&BraidElement::one());
    sc.extended_block(&[head, BraidElement::chain(1, r - 1)], r)
}

/// `A_{1→n+1} Σ_{k=1}^{n} (−1)^{n−k} t_k`, with `t_k` acting on leg `k` of `n`.
pub fn lifted_sum(sc: &StructureConstants, t: &LinOp, n: usize) -> Result<LinOp> {
    let mut total = LinOp::zeros(sc.n(), n, n + 1);
    for k in 1..=n {
        let tk = t.embed(k - 1, n - k);
        total = if (n - k) % 2 == 0 { total.add(&tk)? } else { total.sub(&tk)? };
    }
    sc.sigma_rep().antisymmetrizer(n + 1).compose(&total)
}

fn mismatch(a: &LinOp, b: &LinOp) -> Option<Witness> {
    a.first_mismatch(b)
        .expect("same shape")
        .map(|m| Witness::from_mismatch(&m, 1))
}

/// The four forms of `W_{n+1}` agree, and
/// `A_{1→n+1} Σ (−1)^{n−k} t_k = W_{n+1} A_{1→n}` for the chosen lift and
/// for lifts shifted by kernel vectors of `1 − σ`.
pub fn verify_w_identity(sc: &StructureConstants, n_max: usize) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("W tensors ({})", sc.name));
    let lift = match sc.solve_t_lift() {
        Ok(l) => l,
        Err(e) => {
            rep.push(CheckItem::skipped("w_lift_identity", "", e.to_string()));
            return rep;
        }
    };
    let mut lifts = vec![("t".to_string(), lift.t.clone())];
    for idx in 0..lift.kernel.len().min(2) {
        let j = (idx * 7) % sc.n();
        lifts.push((
            format!("t+kernel[{idx}]⊗e{}", j + 1),
            lift.shifted(idx, j, &Scalar::from(idx as i64 + 1)),
        ));
    }
    let rows: Vec<Vec<CheckItem>> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let start = Instant::now();
            let mut out = Vec::new();
            let subject = format!("n={n}");
            let w = match build_w(sc, n + 1) {
                Ok(w) => w,
                Err(e) => return vec![CheckItem::skipped("w_forms", subject, e.to_string())],
            };
            let forms = [
                ("alternating", build_w_alternating(sc, n + 1)),
                ("explicit", build_w_explicit(sc, n + 1)),
                ("R-block", build_w_r_form(sc, n + 1).map(|b| if n % 2 == 1 { b.neg() } else { b })),
            ];
            for (label, other) in forms {
                out.push(match other {
                    Ok(o) => CheckItem::compare("w_forms", format!("{subject} recursive vs {label}"), mismatch(&w, &o)),
                    Err(e) => CheckItem::skipped("w_forms", format!("{subject} {label}"), e.to_string()),
                });
            }
            let rhs = w.compose(&sc.sigma_rep().antisymmetrizer(n)).expect("shapes");
            for (label, t) in &lifts {
                let lhs = lifted_sum(sc, t, n).expect("shapes");
                out.push(CheckItem::compare("w_lift_identity", format!("{subject} {label}"), mismatch(&lhs, &rhs)));
            }
            let elapsed = start.elapsed();
            out.into_iter().map(|c| c.with_elapsed(elapsed)).collect()
        })
        .collect();
    for r in rows {
        for c in r {
            rep.push(c);
        }
    }
    rep
}

/// Slot-wise normal forms of bar chains, cached per word.
pub struct ChainReducer<'a> {
    ideal: &'a Ideal,
    cache: HashMap<Word, FracWordSum>,
}

pub type FracChain = BTreeMap<Vec<Word>, Frac>;

impl<'a> ChainReducer<'a> {
    pub fn new(ideal: &'a Ideal) -> Self {
        ChainReducer {
            ideal,
            cache: HashMap::new(),
        }
    }

    fn word(&mut self, w: &Word) -> Result<FracWordSum> {
        if let Some(v) = self.cache.get(w) {
            return Ok(v.clone());
        }
        let nf = self.ideal.normal_form(&BTreeMap::from([(w.clone(), Frac::one())]))?;
        self.cache.insert(w.clone(), nf.clone());
        Ok(nf)
    }

    /// Normal form of the slots in `range`; the other slots are kept as they are.
    pub fn reduce(&mut self, chain: &BarChain, from_slot: usize) -> Result<FracChain> {
        let mut out = FracChain::new();
        for (slots, c) in chain.terms() {
            let mut partial: Vec<(Vec<Word>, Frac)> = vec![(slots[..from_slot.min(slots.len())].to_vec(), Frac::from(c))];
            for w in slots.iter().skip(from_slot) {
                let nf = self.word(w)?;
                let mut next = Vec::with_capacity(partial.len() * nf.len());
                for (p, x) in &partial {
                    for (v, y) in &nf {
                        let mut q = p.clone();
                        q.push(v.clone());
                        next.push((q, x.mul(y)));
                    }
                }
                partial = next;
            }
            for (p, x) in partial {
                let slot = out.entry(p).or_insert_with(Frac::zero);
                *slot = slot.add(&x);
            }
        }
        out.retain(|_, x| !x.is_zero());
        Ok(out)
    }
}

fn fmt_slots(slots: &[Word]) -> String {
    slots.iter().map(|w| fmt_word(w)).collect::<Vec<_>>().join("⊗")
}

fn first_chain_mismatch(a: &FracChain, b: &FracChain) -> Option<Witness> {
    let zero = Frac::zero();
    a.keys()
        .chain(b.keys())
        .find(|k| a.get(*k).unwrap_or(&zero) != b.get(*k).unwrap_or(&zero))
        .map(|k| Witness::new(fmt_slots(k), a.get(k).unwrap_or(&zero), b.get(k).unwrap_or(&zero)))
}

fn fmt_monomial(a: &[usize], j: &[usize]) -> String {
    let j = j.iter().map(|x| format!("γ{}", x + 1)).collect::<Vec<_>>().join("∧");
    format!("{}·{j}", fmt_word(a))
}

/// The boundary of `a ⊗ γ_{j1}∧…∧γ_{j_{n+1}}` equals
/// `(−1)^n Σ f̄_{1→n+1}[j][l] aχ_{l1} ⊗ γ_{l2}∧… + a ⊗ Σ W_{n+1}[j][m] γ_m`
/// after reducing every slot modulo the ideal. Chains of degree up to
/// `max_chain_degree` (number of slots) are tested, with `a ∈ {1, χ_i}`.
pub fn verify_subcomplex(sc: &StructureConstants, max_chain_degree: usize) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("antisymmetric chains form a subcomplex ({})", sc.name));
    let n = sc.n();
    let ideal = Ideal::new(sc, 3);
    let srep = sc.sigma_rep();
    for deg in 2..max_chain_degree {
        let start = Instant::now();
        let subject = format!("chain degree {}", deg + 1);
        let prepared = (|| -> Result<_> {
            let a_top = srep.antisymmetrizer(deg);
            let a_low = srep.antisymmetrizer(deg - 1);
            let fbar = srep.evaluate(&braid::fbar(1, deg)?, deg)?;
            let w = build_w(sc, deg)?;
            Ok((a_top, a_low, fbar, w))
        })();
        let (a_top, a_low, fbar, w) = match prepared {
            Ok(p) => p,
            Err(e) => {
                rep.push(CheckItem::skipped("subcomplex", subject, e.to_string()));
                continue;
            }
        };
        let sign = if deg % 2 == 1 { Scalar::one() } else { -Scalar::one() };
        let results: Vec<Result<Option<Witness>>> = test_monomials(n, deg)
            .par_iter()
            .map(|(a, j)| {
                let mut red = ChainReducer::new(&ideal);
                let lhs = antisymmetrize_chain(&a_top, a, j).boundary()?;
                let row = flatten(j, n);
                let mut rhs = BarChain::zero();
                for l in 0..pow(n, deg) {
                    let x = fbar.at(row, l);
                    if x.is_zero() {
                        continue;
                    }
                    let idx = digits(l, deg, n);
                    let mut head = a.clone();
                    head.push(idx[0]);
                    rhs = rhs.add(&antisymmetrize_chain(&a_low, &head, &idx[1..]).scale(&(x * &sign)));
                }
                for m in 0..pow(n, deg - 1) {
                    let x = w.at(row, m);
                    if !x.is_zero() {
                        rhs = rhs.add(&antisymmetrize_chain(&a_low, a, &digits(m, deg - 1, n)).scale(x));
                    }
                }
                let l = red.reduce(&lhs, 0)?;
                let r = red.reduce(&rhs, 0)?;
                Ok(first_chain_mismatch(&l, &r).map(|mut wt| {
                    wt.component = format!("{} at {}", fmt_monomial(a, j), wt.component);
                    wt
                }))
            })
            .collect();
        let mut item = CheckItem::pass("subcomplex", subject.clone());
        for r in results {
            match r {
                Ok(None) => {}
                Ok(Some(wt)) => {
                    item = CheckItem::fail("subcomplex", subject.clone(), Some(wt));
                    break;
                }
                Err(e) => {
                    item = CheckItem::skipped("subcomplex", subject.clone(), e.to_string());
                    break;
                }
            }
        }
        rep.push(item.with_elapsed(start.elapsed()));
    }
    rep
}

/// Compares `b ι(M)` with `ι Q(M)` for `M = a γ_{j1}∧…∧γ_{jd}`.
///
/// The tail slots of `b ι(M)` are reduced to single letters; for every
/// leading word the tail tensor must lie in the image of the antisymmetric
/// chains, and the canonical coordinates of both sides must differ by an
/// element of the ideal in the leading slot.
pub fn chain_map_defect(
    alg: &GhostAlgebra,
    coeffs: &BrstCoefficients,
    ideal: &Ideal,
    a: &[usize],
    j: &[usize],
) -> Result<Option<Witness>> {
    let n = alg.structure().n();
    let d = j.len();
    let m = alg.antisymmetrizer(d).clone();
    let lhs = antisymmetrize_chain(&m, a, j).boundary()?;
    let mut red = ChainReducer::new(ideal);
    let lhs = red.reduce(&lhs, 1)?;
    let tail_len = pow(n, d - 1);
    let mut t_b: BTreeMap<Word, Vec<Frac>> = BTreeMap::new();
    for (slots, x) in &lhs {
        if slots[1..].iter().any(|w| w.len() != 1) {
            return Ok(Some(Witness::new(
                format!("{} at {}", fmt_monomial(a, j), fmt_slots(slots)),
                x,
                "tail slot outside the generators",
            )));
        }
        let tail: Vec<usize> = slots[1..].iter().map(|w| w[0]).collect();
        let v = t_b
            .entry(slots[0].clone())
            .or_insert_with(|| vec![Frac::zero(); tail_len]);
        let k = flatten(&tail, n);
        v[k] = v[k].add(x);
    }
    // image of A_{1→d−1}^T is the row space of A_{1→d−1}
    let low = alg.antisymmetrizer(d - 1);
    let mut rows = Echelon::new(tail_len);
    for r in 0..low.rows() {
        rows.insert((0..low.cols()).map(|c| Frac::from(low.at(r, c))).collect());
    }
    for (w, v) in &t_b {
        if rows.normal_form(v).iter().any(|x| !x.is_zero()) {
            return Ok(Some(Witness::new(
                format!("{} leading word {}", fmt_monomial(a, j), fmt_word(w)),
                "tail tensor",
                "not antisymmetric",
            )));
        }
    }
    let q = alg.apply_q(coeffs, &GhostPolynomial::term(a.to_vec(), d, alg.monomial(j)), None)?;
    let canon_frac = |v: &[Frac]| -> Vec<Frac> {
        let mut out = vec![Frac::zero(); low.cols()];
        for (r, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (c, o) in out.iter_mut().enumerate() {
                let s = low.at(r, c);
                if !s.is_zero() {
                    *o = o.add(&Frac::from(s).mul(x));
                }
            }
        }
        out
    };
    let mut diff: BTreeMap<usize, FracWordSum> = BTreeMap::new();
    let mut add = |w: &Word, coords: Vec<Frac>, negate: bool| {
        for (k, x) in coords.into_iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let slot = diff.entry(k).or_default().entry(w.clone()).or_insert_with(Frac::zero);
            *slot = if negate { slot.sub(&x) } else { slot.add(&x) };
        }
    };
    for (w, v) in &t_b {
        add(w, v.clone(), false);
    }
    for (w, deg, c) in q.terms() {
        debug_assert_eq!(deg, d - 1);
        let v: Vec<Frac> = c.iter().map(Frac::from).collect();
        add(w, canon_frac(&v), true);
    }
    for (k, ws) in diff {
        let mut ws = ws;
        ws.retain(|_, x| !x.is_zero());
        if ws.is_empty() {
            continue;
        }
        let coord = || digits(k, d - 1, n).iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(",");
        match ideal.reduce_frac(&ws)? {
            Membership::NonMember(res) => {
                let (w, x) = res.iter().next().expect("nonzero residual");
                return Ok(Some(Witness::new(
                    format!("{} coordinate [{}] word {}", fmt_monomial(a, j), coord(), fmt_word(w)),
                    x,
                    "0 mod ideal",
                )));
            }
            Membership::Member(cert) => {
                if cert.expand(ideal) != ws {
                    return Ok(Some(Witness::new(
                        format!("{} coordinate [{}]", fmt_monomial(a, j), coord()),
                        "certificate",
                        "does not expand to the residual",
                    )));
                }
            }
        }
    }
    Ok(None)
}

/// `b ∘ ι = ι ∘ Q` on monomials of ghost degree `1..=n_max`.
pub fn verify_chain_map(alg: &GhostAlgebra, coeffs: &BrstCoefficients, n_max: usize) -> VerificationReport {
    let sc = alg.structure();
    let mut rep = VerificationReport::new(format!("ι is a chain map ({})", sc.name));
    let ideal = Ideal::new(sc, 3);
    for d in 1..=n_max.min(alg.max_degree()) {
        let start = Instant::now();
        let subject = format!("n={d}");
        let results: Vec<Result<Option<Witness>>> = test_monomials(sc.n(), d)
            .par_iter()
            .map(|(a, j)| chain_map_defect(alg, coeffs, &ideal, a, j))
            .collect();
        let mut item = CheckItem::pass("chain_map", subject.clone());
        for r in results {
            match r {
                Ok(None) => {}
                Ok(Some(w)) => {
                    item = CheckItem::fail("chain_map", subject.clone(), Some(w));
                    break;
                }
                Err(e) => {
                    item = CheckItem::skipped("chain_map", subject.clone(), e.to_string());
                    break;
                }
            }
        }
        rep.push(item.with_elapsed(start.elapsed()));
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brst::build_brst_recursive;
    use crate::format::bundled;
    use proptest::prelude::*;

    fn word_sum(terms: &[(&[usize], i64)]) -> WordSum {
        terms.iter().map(|(w, c)| (w.to_vec(), Scalar::from(*c))).collect()
    }

    #[test]
    fn ideal_membership_and_witness() {
        let sc = bundled("sl2").unwrap();
        let ideal = Ideal::new(&sc, 3);
        // χ2χ3 − χ3χ2 − χ1 is the relation [e, f] = h
        let rel = word_sum(&[(&[1, 2], 1), (&[2, 1], -1), (&[0], -1)]);
        let Membership::Member(w) = ideal.reduce(&rel).unwrap() else { panic!("relation not in ideal") };
        assert_eq!(w.expand(&ideal), to_frac(&rel));
        assert!(!w.terms.is_empty());

        // χ1 · relation · nothing, scaled
        let mut shifted = WordSum::new();
        for (k, v) in &rel {
            let mut word = vec![0];
            word.extend(k);
            shifted.insert(word, v * &Scalar::from(3));
        }
        let Membership::Member(w) = ideal.reduce(&shifted).unwrap() else { panic!() };
        assert_eq!(w.expand(&ideal), to_frac(&shifted));

        let commutator = word_sum(&[(&[1, 2], 1), (&[2, 1], -1)]);
        match ideal.reduce(&commutator).unwrap() {
            Membership::NonMember(nf) => assert!(!nf.is_empty()),
            Membership::Member(_) => panic!("commutator alone is not in the ideal"),
        }
        assert!(!ideal.reduce(&word_sum(&[(&[], 1)])).unwrap().is_member());
        assert!(matches!(
            ideal.reduce(&word_sum(&[(&[0, 0, 0, 0], 1)])),
            Err(Error::DegreeCapExceeded { found: 4, cap: 3 })
        ));
    }

    #[test]
    fn normal_forms_prefer_short_words() {
        let sc = bundled("sl2").unwrap();
        let ideal = Ideal::new(&sc, 2);
        let nf = ideal
            .normal_form(&to_frac(&word_sum(&[(&[1, 2], 1), (&[2, 1], -1)])))
            .unwrap();
        assert_eq!(nf, to_frac(&word_sum(&[(&[0], 1)])));
    }

    #[test]
    fn abelian_ideal_is_commutative() {
        let sc = bundled("abelian1").unwrap();
        let ideal = Ideal::new(&sc, 3);
        // one generator with σ = 1: the relation is trivial
        assert_eq!(ideal.rank(), 0);
    }

    #[test]
    fn boundary_of_small_chains() {
        let c = BarChain::term(vec![vec![0], vec![1], vec![2]], Scalar::one());
        let b = c.boundary().unwrap();
        let expected = BarChain::term(vec![vec![0, 1], vec![2]], -Scalar::one())
            .add(&BarChain::term(vec![vec![0], vec![1, 2]], Scalar::one()));
        assert_eq!(b, expected);
        assert!(matches!(
            BarChain::term(vec![vec![0]], Scalar::one()).boundary(),
            Err(Error::DegreeTooLow(1))
        ));
    }

    fn chain(max_slots: usize) -> impl Strategy<Value = BarChain> {
        let term = (
            (2..=max_slots).prop_flat_map(|k| proptest::collection::vec(proptest::collection::vec(0usize..3, 0..=2), k)),
            -4i64..=4,
        );
        proptest::collection::vec(term, 1..6).prop_map(|ts| {
            let mut c = BarChain::zero();
            for (slots, x) in ts {
                c.add_term(slots, &Scalar::from(x));
            }
            c
        })
    }

    proptest! {
        #[test]
        fn boundary_squares_to_zero(c in chain(5)) {
            let lifted = c.homotopy();
            prop_assert!(lifted.boundary().unwrap().boundary().unwrap().is_zero());
        }

        #[test]
        fn homotopy_contracts(c in chain(5)) {
            let lhs = c.boundary().unwrap().homotopy().add(&c.homotopy().boundary().unwrap());
            prop_assert_eq!(lhs, c);
        }
    }

    #[test]
    fn w_forms_agree() {
        for name in ["sl2", "gl11", "hecke2"] {
            let sc = bundled(name).unwrap();
            let rep = verify_w_identity(&sc, 3);
            assert!(rep.all_passed(), "{}", rep.render(false));
            assert!(rep.find("w_lift_identity").count() >= 3);
        }
        let sc = bundled("sl2").unwrap();
        assert_eq!(build_w(&sc, 2).unwrap(), sc.c);
        assert_eq!(build_w_r_form(&sc, 2).unwrap(), sc.c.neg());
    }

    #[test]
    fn antisymmetric_chains_close() {
        let sc = bundled("sl2").unwrap();
        let rep = verify_subcomplex(&sc, 4);
        assert!(rep.all_passed(), "{}", rep.render(false));
        assert_eq!(rep.checks.len(), 2);
    }

    #[test]
    fn chain_map_on_sl2_and_hecke2() {
        for name in ["sl2", "hecke2"] {
            let sc = bundled(name).unwrap();
            let t = sc.solve_t_lift().unwrap().t;
            let coeffs = build_brst_recursive(&sc, &t, 2).unwrap();
            let alg = GhostAlgebra::new(&sc, 3).unwrap();
            let rep = verify_chain_map(&alg, &coeffs, 2);
            assert!(rep.all_passed(), "{}", rep.render(false));
        }
    }

    #[test]
    fn chain_map_embeds_rows_of_the_antisymmetrizer() {
        let sc = bundled("sl2").unwrap();
        let alg = GhostAlgebra::new(&sc, 2).unwrap();
        let p = GhostPolynomial::term(vec![0], 2, alg.monomial(&[1, 2]));
        let expected = BarChain::term(vec![vec![0], vec![1], vec![2]], Scalar::one())
            .sub(&BarChain::term(vec![vec![0], vec![2], vec![1]], Scalar::one()));
        assert_eq!(chain_map_i(&alg, &p), expected);
    }
}
