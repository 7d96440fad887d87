//! Grading matrices and the structure they leave invariant.
//!
//! A grading matrix `D` acts on `V_N`. It is a grading of `(σ, C)` when
//! `(D⊗D)σ = σ(D⊗D)` and `(D⊗D)C = C D`; for the super case `D` is the
//! parity matrix `diag((−1)^{p_i})` and `σ` is the super-permutation.

use std::time::Instant;

use crate::braid::Representation;
use crate::error::{Error, Result};
use crate::linop::LinOp;
use crate::qlie::{check_yang_baxter, StructureConstants};
use crate::report::{CheckItem, VerificationReport, Witness};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct GradingMatrix {
    d: LinOp,
    inverse: LinOp,
    parities: Option<Vec<u8>>,
}

fn sign(odd: bool) -> Scalar {
    Scalar::from(if odd { -1 } else { 1 })
}

impl GradingMatrix {
    pub fn new(d: LinOp) -> Result<Self> {
        if d.in_legs() != 1 || d.out_legs() != 1 {
            return Err(Error::Shape("a grading matrix maps one leg to one leg".into()));
        }
        let inverse = d.inverse()?;
        Ok(GradingMatrix {
            d,
            inverse,
            parities: None,
        })
    }

    pub fn identity(n: usize) -> Self {
        GradingMatrix::new(LinOp::identity(n, 1)).expect("invertible")
    }

    pub fn diagonal(entries: &[Scalar]) -> Result<Self> {
        let mut d = LinOp::zeros(entries.len(), 1, 1);
        for (i, e) in entries.iter().enumerate() {
            d.set(&[i], &[i], e.clone());
        }
        GradingMatrix::new(d)
    }

    /// `diag((−1)^{p_i})`; every parity must be 0 or 1.
    pub fn from_parities(parities: &[u8]) -> Result<Self> {
        if let Some(p) = parities.iter().find(|&&p| p > 1) {
            return Err(Error::Shape(format!("parity {p} is not 0 or 1")));
        }
        let entries: Vec<Scalar> = parities.iter().map(|&p| sign(p == 1)).collect();
        let mut g = GradingMatrix::diagonal(&entries)?;
        g.parities = Some(parities.to_vec());
        Ok(g)
    }

    /// The grading stored with the algebra, if any. A diagonal ±1 matrix is
    /// recognised as a parity grading.
    pub fn of(sc: &StructureConstants) -> Result<Option<Self>> {
        let Some(d) = &sc.grading else { return Ok(None) };
        let n = d.dim();
        let diag_pm1 = d.nonzeros().all(|(r, c, _)| r == c)
            && (0..n).all(|i| {
                let v = d.at(i, i);
                *v == Scalar::one() || *v == Scalar::from(-1)
            });
        if diag_pm1 {
            let p: Vec<u8> = (0..n).map(|i| u8::from(*d.at(i, i) != Scalar::one())).collect();
            return GradingMatrix::from_parities(&p).map(Some);
        }
        GradingMatrix::new(d.clone()).map(Some)
    }

    pub fn matrix(&self) -> &LinOp {
        &self.d
    }

    pub fn inverse(&self) -> &LinOp {
        &self.inverse
    }

    pub fn parities(&self) -> Option<&[u8]> {
        self.parities.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.d.dim()
    }

    /// `1 ⊕ D` on `V_{N+1}`, fixing the auxiliary direction 0.
    pub fn extended(&self) -> LinOp {
        let n = self.dim();
        let mut e = LinOp::zeros(n + 1, 1, 1);
        e.set(&[0], &[0], Scalar::one());
        for (r, c, v) in self.d.nonzeros() {
            e.set(&[r + 1], &[c + 1], v.clone());
        }
        e
    }

    fn check_dim(&self, sc: &StructureConstants) -> Result<()> {
        if self.dim() != sc.n() {
            return Err(Error::Shape(format!(
                "grading matrix has dimension {}, algebra has {}",
                self.dim(),
                sc.n()
            )));
        }
        Ok(())
    }
}

fn mismatch(a: &LinOp, b: &LinOp, offset: usize) -> Option<Witness> {
    a.first_mismatch(b)
        .expect("shapes agree")
        .map(|m| Witness::from_mismatch(&m, offset))
}

fn timed(f: impl FnOnce() -> CheckItem) -> CheckItem {
    let t = Instant::now();
    f().with_elapsed(t.elapsed())
}

/// Checks `(D⊗D)σ = σ(D⊗D)` and `(D⊗D)C = C D`.
pub fn validate_grading(sc: &StructureConstants, d: &GradingMatrix) -> Result<VerificationReport> {
    d.check_dim(sc)?;
    let dd = d.d.kron(&d.d)?;
    let mut rep = VerificationReport::new(format!("grading ({})", sc.name));
    rep.push(timed(|| {
        let l = dd.compose(&sc.sigma).unwrap();
        let r = sc.sigma.compose(&dd).unwrap();
        CheckItem::compare("grading_sigma", "(D⊗D)σ = σ(D⊗D)", mismatch(&l, &r, 1))
    }));
    rep.push(timed(|| {
        let l = dd.compose(&sc.c).unwrap();
        let r = sc.c.compose(&d.d).unwrap();
        CheckItem::compare("grading_bracket", "(D⊗D)C = C D", mismatch(&l, &r, 1))
    }));
    Ok(rep)
}

/// `σ' = (D⊗D)σ(D⊗D)⁻¹`, `C' = (D⊗D)C D⁻¹`.
pub fn transform_structure(sc: &StructureConstants, d: &GradingMatrix) -> Result<StructureConstants> {
    d.check_dim(sc)?;
    let dd = d.d.kron(&d.d)?;
    let dd_inv = d.inverse.kron(&d.inverse)?;
    let sigma = dd.compose(&sc.sigma)?.compose(&dd_inv)?;
    let c = dd.compose(&sc.c)?.compose(&d.inverse)?;
    let mut out = StructureConstants::new(sc.name.clone(), sigma, c)?;
    out.field = sc.field;
    out.properties = sc.properties.clone();
    out.grading = sc.grading.clone();
    Ok(out)
}

/// `𝒟₁ R 𝒟₁⁻¹` with `𝒟 = 1 ⊕ D`.
pub fn twisted_extended_r(sc: &StructureConstants, d: &GradingMatrix) -> Result<LinOp> {
    d.check_dim(sc)?;
    let e = d.extended();
    let id = LinOp::identity(sc.n() + 1, 1);
    let e1 = e.kron(&id)?;
    let e1_inv = e.inverse()?.kron(&id)?;
    e1.compose(&sc.build_extended_r())?.compose(&e1_inv)
}

pub fn check_twisted_yang_baxter(sc: &StructureConstants, d: &GradingMatrix) -> Result<VerificationReport> {
    let r = twisted_extended_r(sc, d)?;
    let mut rep = check_yang_baxter(&r, &format!("{}, twisted", sc.name));
    for item in &mut rep.checks {
        item.id = "twisted_yang_baxter".into();
    }
    Ok(rep)
}

fn leading(d: &LinOp, n: usize) -> Result<LinOp> {
    let mut out = LinOp::identity(d.dim(), 0);
    for _ in 0..n - 1 {
        out = out.kron(d)?;
    }
    out.kron(&LinOp::identity(d.dim(), 1))
}

/// `D₁⁻¹…D_{n−1}⁻¹ A_{1→n} D₁…D_{n−1}`.
pub fn twisted_antisymmetrizer(sc: &StructureConstants, d: &GradingMatrix, n: usize) -> Result<LinOp> {
    d.check_dim(sc)?;
    if n == 0 {
        return Err(Error::BadRange("the antisymmetrizer needs n ≥ 1".into()));
    }
    let a = sc.sigma_rep().antisymmetrizer(n);
    leading(&d.inverse, n)?.compose(&a)?.compose(&leading(&d.d, n)?)
}

/// `σ^{mk}_{ij} = (−1)^{p_m p_k} δ^m_j δ^k_i`.
pub fn super_permutation_sigma(parities: &[u8]) -> LinOp {
    let n = parities.len();
    let mut s = LinOp::zeros(n, 2, 2);
    for i in 0..n {
        for j in 0..n {
            s.set(&[i, j], &[j, i], sign(parities[i] == 1 && parities[j] == 1));
        }
    }
    s
}

/// Component formula for `D₁σD₁⁻¹` with `σ` the super-permutation and `D` the
/// parity matrix: `−(−1)^{(p_m+1)(p_k+1)} δ^m_j δ^k_i`.
pub fn twisted_super_permutation(parities: &[u8]) -> LinOp {
    let n = parities.len();
    let mut s = LinOp::zeros(n, 2, 2);
    for i in 0..n {
        for j in 0..n {
            let (pm, pk) = (u32::from(parities[j]), u32::from(parities[i]));
            s.set(&[i, j], &[j, i], sign((pm + 1) * (pk + 1) % 2 == 0));
        }
    }
    s
}

/// Invariance, the fixed point of the transformation, twisted Yang–Baxter,
/// the twisted antisymmetrizers up to `n_max`, and for parity gradings the
/// super-permutation formulas.
pub fn verify_grading_suite(sc: &StructureConstants, d: &GradingMatrix, n_max: usize) -> Result<VerificationReport> {
    let mut rep = validate_grading(sc, d)?;
    rep.subject = format!("grading suite ({})", sc.name);

    rep.push(timed(|| match transform_structure(sc, d) {
        Ok(t) => {
            let w = mismatch(&t.sigma, &sc.sigma, 1).or_else(|| mismatch(&t.c, &sc.c, 1));
            CheckItem::compare("transform_fixed_point", "(σ', C') = (σ, C)", w)
        }
        Err(e) => CheckItem::fail("transform_fixed_point", "", None).with_note(e.to_string()),
    }));

    rep.extend(check_twisted_yang_baxter(sc, d)?);

    let rep_sigma = sc.sigma_rep();
    for n in 1..=n_max {
        rep.push(timed(|| {
            let subject = format!("n={n}");
            match twisted_antisymmetrizer(sc, d, n) {
                Ok(tw) => {
                    let a = rep_sigma.antisymmetrizer(n);
                    if tw.is_zero() == a.is_zero() && tw.rank() == a.rank() {
                        CheckItem::pass("twisted_antisymmetrizer", subject)
                    } else {
                        CheckItem::fail("twisted_antisymmetrizer", subject, None)
                            .with_note(format!("rank {} vs {}", tw.rank(), a.rank()))
                    }
                }
                Err(e) => CheckItem::fail("twisted_antisymmetrizer", subject, None).with_note(e.to_string()),
            }
        }));
    }

    if let Some(p) = d.parities() {
        rep.push(timed(|| {
            let s = Representation::new(super_permutation_sigma(p)).expect("2→2");
            let square = s.generator().compose(s.generator()).unwrap();
            let w = s
                .braid_relation_mismatch()
                .map(|m| Witness::from_mismatch(&m, 1))
                .or_else(|| mismatch(&square, &LinOp::identity(p.len(), 2), 1));
            CheckItem::compare("super_permutation", "braid relation and σ² = 1", w)
        }));
        rep.push(timed(|| {
            let id = LinOp::identity(p.len(), 1);
            let d1 = d.matrix().kron(&id).unwrap();
            let d1_inv = d.inverse().kron(&id).unwrap();
            let tw = d1.compose(&super_permutation_sigma(p)).unwrap().compose(&d1_inv).unwrap();
            CheckItem::compare(
                "twisted_super_permutation",
                "D₁σD₁⁻¹ component formula",
                mismatch(&tw, &twisted_super_permutation(p), 1),
            )
        }));
    }
    Ok(rep)
}
