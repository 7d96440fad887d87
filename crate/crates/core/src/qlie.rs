//! Structure constants `(σ, C)` of a quantum Lie algebra, the extended
//! R-matrix, the Yang–Baxter constraints, the t-lift and the `Z` tensors.
//!
//! Storage: `σ^{kl}_{ij}` sits at `sigma[(i,j)][(k,l)]` and `C^k_{ij}` at
//! `c[(i,j)][k]`, so `C` is a 1-in/2-out operator and the defining relation
//! reads `Σ (δ − σ)[(i,j)][(k,l)] χ_k χ_l = Σ C[(i,j)][k] χ_k`.

use std::time::Instant;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::braid::{self, Representation};
use crate::error::{Error, Result};
use crate::linalg;
use crate::linop::{digits, flatten, pow, LegFlag, LinOp};
use crate::report::{CheckItem, VerificationReport, Witness};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarField {
    Rational,
    Laurent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureConstants {
    pub name: String,
    pub field: ScalarField,
    pub sigma: LinOp,
    pub c: LinOp,
    pub grading: Option<LinOp>,
    pub properties: Vec<String>,
}

/// A solution `t` of `(1 − σ) t = C` together with a basis of `ker(1 − σ)`
/// (vectors on two legs).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TLift {
    pub t: LinOp,
    pub kernel: Vec<LinOp>,
}

impl TLift {
    /// `t + κ ⊗ e_j^*` for the kernel vector `κ = kernel[idx]`.
    pub fn shifted(&self, idx: usize, j: usize, scale: &Scalar) -> LinOp {
        let n = self.t.dim();
        let mut t = self.t.clone();
        for r in 0..n * n {
            let k = self.kernel[idx].at(r, 0);
            if !k.is_zero() {
                let cur = t.at(r, j).clone();
                t.set_at(r, j, cur + k * scale);
            }
        }
        t
    }
}

fn witness(a: &LinOp, b: &LinOp, offset: usize) -> Option<Witness> {
    a.first_mismatch(b)
        .expect("shapes agree")
        .map(|m| Witness::from_mismatch(&m, offset))
}

impl StructureConstants {
    pub fn new(name: impl Into<String>, sigma: LinOp, c: LinOp) -> Result<Self> {
        let n = sigma.dim();
        if sigma.in_legs() != 2 || sigma.out_legs() != 2 {
            return Err(Error::Shape("σ must act on two legs".into()));
        }
        if c.dim() != n || c.in_legs() != 1 || c.out_legs() != 2 {
            return Err(Error::Shape(format!("C must map one leg to two legs over dimension {n}")));
        }
        let laurent = sigma.data().iter().chain(c.data()).any(Scalar::is_laurent);
        Ok(StructureConstants {
            name: name.into(),
            field: if laurent {
                ScalarField::Laurent
            } else {
                ScalarField::Rational
            },
            sigma,
            c,
            grading: None,
            properties: Vec::new(),
        })
    }

    pub fn with_grading(mut self, d: LinOp) -> Result<Self> {
        if d.dim() != self.n() || d.in_legs() != 1 || d.out_legs() != 1 {
            return Err(Error::Shape("grading must be an N×N matrix".into()));
        }
        self.grading = Some(d);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.sigma.dim()
    }

    /// Evaluates every scalar at `q = q0`.
    pub fn specialize(&self, q0: &BigRational) -> Result<Self> {
        let f = |s: &Scalar| s.specialize(q0);
        Ok(StructureConstants {
            name: self.name.clone(),
            field: ScalarField::Rational,
            sigma: self.sigma.map_scalars(f)?,
            c: self.c.map_scalars(f)?,
            grading: self.grading.as_ref().map(|d| d.map_scalars(f)).transpose()?,
            properties: self.properties.clone(),
        })
    }

    pub fn sigma_rep(&self) -> Representation {
        Representation::new(self.sigma.clone()).expect("2→2")
    }

    pub fn sigma_inverse(&self) -> Result<LinOp> {
        self.sigma.inverse()
    }

    /// The `(N+1)² × (N+1)²` matrix with index 0 as the auxiliary direction.
    pub fn build_extended_r(&self) -> LinOp {
        let n = self.n();
        let d = n + 1;
        let mut r = LinOp::zeros(d, 2, 2);
        for (row, col, v) in self.sigma.nonzeros() {
            let (i, j) = (row / n + 1, row % n + 1);
            let (k, l) = (col / n + 1, col % n + 1);
            r.set(&[i, j], &[k, l], v.clone());
        }
        for (row, col, v) in self.c.nonzeros() {
            let (k, l) = (row / n + 1, row % n + 1);
            r.set(&[k, l], &[0, col + 1], v.clone());
        }
        for b in 0..d {
            r.set(&[b, 0], &[0, b], Scalar::one());
            r.set(&[0, b], &[b, 0], Scalar::one());
        }
        r
    }

    pub fn extended_rep(&self) -> Representation {
        Representation::new(self.build_extended_r()).expect("2→2")
    }

    fn sigma_at(&self, k: usize, legs: usize) -> LinOp {
        self.sigma.embed_at(k, legs).expect("fits")
    }

    fn c_at(&self, k: usize, legs: usize) -> LinOp {
        self.c.embed_at(k, legs).expect("fits")
    }

    pub fn validate_structure(&self) -> VerificationReport {
        let mut rep = VerificationReport::new(format!("structure constants ({})", self.name));
        let n2 = self.n() * self.n();
        let timed = |f: &dyn Fn() -> CheckItem| {
            let t = Instant::now();
            f().with_elapsed(t.elapsed())
        };

        rep.push(timed(&|| {
            if self.sigma.rank() == n2 {
                CheckItem::pass("sigma_invertible", "")
            } else {
                CheckItem::fail("sigma_invertible", "", None).with_note("σ is singular")
            }
        }));
        rep.push(timed(&|| {
            let shifted = self.sigma.sub(&LinOp::identity(self.n(), 2)).expect("shape");
            if shifted.rank() < n2 {
                CheckItem::pass("sigma_eigenvalue_one", "")
            } else {
                CheckItem::fail("sigma_eigenvalue_one", "", None)
                    .with_note("det(σ − 1) ≠ 0")
            }
        }));
        rep.push(timed(&|| {
            let (s1, s2) = (self.sigma_at(1, 3), self.sigma_at(2, 3));
            let l = s1.compose(&s2).unwrap().compose(&s1).unwrap();
            let r = s2.compose(&s1).unwrap().compose(&s2).unwrap();
            CheckItem::compare("braid_relation", "σ1σ2σ1 = σ2σ1σ2", witness(&l, &r, 1))
        }));
        rep.push(timed(&|| {
            let c1 = self.c_at(1, 3);
            let l = c1.compose(&self.c).unwrap();
            let r = self
                .sigma_at(2, 3)
                .compose(&l)
                .unwrap()
                .add(&self.c_at(2, 3).compose(&self.c).unwrap())
                .unwrap();
            CheckItem::compare("q_jacobi", "C1δ3C1 = σ2C1δ3C1 + C2C1", witness(&l, &r, 1))
        }));
        rep.push(timed(&|| {
            let l = self.c_at(1, 3).compose(&self.sigma).unwrap();
            let r = self
                .sigma_at(2, 3)
                .compose(&self.sigma_at(1, 3))
                .unwrap()
                .compose(&self.c_at(2, 3))
                .unwrap();
            CheckItem::compare("bracket_braiding", "C1δ3σ1 = σ2σ1C2", witness(&l, &r, 1))
        }));
        rep.push(timed(&|| {
            let x = self
                .sigma_at(2, 3)
                .compose(&self.c_at(1, 3))
                .unwrap()
                .add(&self.c_at(2, 3))
                .unwrap();
            let l = x.compose(&self.sigma).unwrap();
            let r = self.sigma_at(1, 3).compose(&x).unwrap();
            CheckItem::compare(
                "mixed_commutation",
                "(σ2C1δ3 + C2)σ1 = σ1(σ2C1δ3 + C2)",
                witness(&l, &r, 1),
            )
        }));
        for p in &self.properties {
            rep.push(timed(&|| self.check_property(p)));
        }
        rep
    }

    fn check_property(&self, p: &str) -> CheckItem {
        let id = "declared_property";
        match p {
            "sigma_involutive" => {
                let sq = self.sigma.compose(&self.sigma).unwrap();
                CheckItem::compare(id, p, witness(&sq, &LinOp::identity(self.n(), 2), 1))
            }
            "bracket_zero" => {
                CheckItem::compare(id, p, witness(&self.c, &LinOp::zeros(self.n(), 1, 2), 1))
            }
            _ => CheckItem::skipped(id, p, "unknown property"),
        }
    }

    /// Checks `R2R1R2 = R1R2R1` on three copies of `V_{N+1}`.
    pub fn check_yang_baxter(&self) -> VerificationReport {
        check_yang_baxter(&self.build_extended_r(), &self.name)
    }

    /// Minimal-support solution of `(1 − σ) t = C` and a basis of `ker(1 − σ)`.
    pub fn solve_t_lift(&self) -> Result<TLift> {
        let n = self.n();
        let a = LinOp::identity(n, 2).sub(&self.sigma)?.to_matrix();
        let t = linalg::solve(&a, &self.c.to_matrix())?;
        let t = LinOp::from_matrix(n, 1, 2, &t)?;
        let kernel = linalg::kernel(&a)
            .into_iter()
            .map(|v| {
                let col: Vec<Vec<_>> = v.into_iter().map(|x| vec![x]).collect();
                LinOp::from_matrix(n, 0, 2, &col)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TLift { t, kernel })
    }

    /// `Z_r` by the recursion `Z_{r+1} = C_r + σ_r Z_r δ_{r+1}`, `Z_2 = C`;
    /// an (r−1)-in/r-out operator.
    pub fn build_z(&self, r: usize) -> Result<LinOp> {
        if r < 2 {
            return Err(Error::BadRange(format!("Z_{r} is defined for r ≥ 2")));
        }
        let mut z = self.c.clone();
        for m in 2..r {
            // z = Z_m, build Z_{m+1} on m+1 output legs
            z = self
                .c_at(m, m + 1)
                .add(&self.sigma_at(m, m + 1).compose(&z.embed(0, 1))?)?;
        }
        Ok(z)
    }

    /// `Z_{r}` as the explicit sum `C_{r−1} + σ_{r−1}C_{r−2}δ_r + … `.
    pub fn build_z_explicit(&self, r: usize) -> Result<LinOp> {
        if r < 2 {
            return Err(Error::BadRange(format!("Z_{r} is defined for r ≥ 2")));
        }
        let n = self.n();
        let mut total = LinOp::zeros(n, r - 1, r);
        for k in 1..r {
            // σ_{r−1} … σ_{k+1} C_k δ…
            let mut term = self.c.embed(k - 1, r - 1 - k);
            for m in (k + 1)..r {
                term = self.sigma_at(m, r).compose(&term)?;
            }
            total = total.add(&term)?;
        }
        Ok(total)
    }

    /// Block of `factors[0] ∘ factors[1] ∘ …` in the extended representation
    /// with every output a vector leg and inputs `(vector^{legs−1}, 0)`; a
    /// (legs−1)-in/legs-out operator over `V_N`.
    pub fn extended_block(&self, factors: &[braid::BraidElement], legs: usize) -> Result<LinOp> {
        let n = self.n();
        let d = n + 1;
        let cols: Vec<usize> = (0..pow(n, legs - 1))
            .map(|c| {
                let mut idx: Vec<usize> = digits(c, legs - 1, n).into_iter().map(|x| x + 1).collect();
                idx.push(0);
                flatten(&idx, d)
            })
            .collect();
        let columns = self.extended_rep().evaluate_columns(factors, legs, &cols)?;
        let mut block = LinOp::zeros(n, legs - 1, legs);
        for (c, col) in columns.into_iter().enumerate() {
            for (row, v) in col {
                let idx = digits(row, legs, d);
                if idx.iter().all(|&x| x > 0) {
                    let small: Vec<usize> = idx.iter().map(|x| x - 1).collect();
                    block.set_at(flatten(&small, n), c, v);
                }
            }
        }
        Ok(block)
    }

    /// Block `P_{1→r} J_r P^{1→r−1, 0}` of the Jucys–Murphy element in the
    /// extended representation.
    pub fn jucys_murphy_block(&self, r: usize) -> Result<LinOp> {
        let rep = self.extended_rep();
        let j = rep.evaluate(&braid::build_jucys_murphy(r)?, r)?;
        let mut inp = vec![LegFlag::Vector; r - 1];
        inp.push(LegFlag::Auxiliary);
        j.project_block(&vec![LegFlag::Vector; r], &inp)
    }
}

pub fn check_yang_baxter(r: &LinOp, label: &str) -> VerificationReport {
    let start = Instant::now();
    let r1 = r.embed_at(1, 3).expect("2→2");
    let r2 = r.embed_at(2, 3).expect("2→2");
    let l = r2.compose(&r1).unwrap().compose(&r2).unwrap();
    let rr = r1.compose(&r2).unwrap().compose(&r1).unwrap();
    let mut rep = VerificationReport::new(format!("Yang–Baxter ({label})"));
    rep.push(CheckItem::compare("yang_baxter", "R2R1R2 = R1R2R1", witness(&l, &rr, 0)).with_elapsed(start.elapsed()));
    rep
}

/// Adds `delta` to the single bracket component `C^k_{ij}` (1-based).
pub fn perturb_bracket(sc: &StructureConstants, i: usize, j: usize, k: usize, delta: i64) -> StructureConstants {
    let mut out = sc.clone();
    let cur = out.c.get(&[i - 1, j - 1], &[k - 1]).clone();
    out.c.set(&[i - 1, j - 1], &[k - 1], cur + Scalar::from(delta));
    out.name = format!("{} (perturbed)", sc.name);
    out
}
