//! Dense exact operators `V^{⊗m} → V^{⊗n}`.
//!
//! Components are stored row-major as `(out multi-index, in multi-index)`
//! with the first leg most significant. Operators act on column vectors from
//! the left: `a.compose(&b)` is `a ∘ b`. Indices are 0-based internally; on
//! the extended space `V_{N+1}` index 0 is the auxiliary direction and
//! `1..=N` are the vector directions.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Frac;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinOp {
    dim: usize,
    in_legs: usize,
    out_legs: usize,
    data: Vec<Scalar>,
}

pub fn pow(d: usize, k: usize) -> usize {
    d.pow(k as u32)
}

/// Splits a flat index into `legs` digits base `d`, first leg most significant.
pub fn digits(mut flat: usize, legs: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0; legs];
    for slot in out.iter_mut().rev() {
        *slot = flat % d;
        flat /= d;
    }
    out
}

pub fn flatten(idx: &[usize], d: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * d + i)
}

/// A component where two operators disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub out_index: Vec<usize>,
    pub in_index: Vec<usize>,
    pub left: Scalar,
    pub right: Scalar,
}

impl LinOp {
    pub fn new(dim: usize, in_legs: usize, out_legs: usize, data: Vec<Scalar>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimMismatch("base dimension must be positive".into()));
        }
        let expected = pow(dim, in_legs + out_legs);
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "expected {expected} components, found {}",
                data.len()
            )));
        }
        Ok(LinOp {
            dim,
            in_legs,
            out_legs,
            data,
        })
    }

    pub fn zeros(dim: usize, in_legs: usize, out_legs: usize) -> Self {
        LinOp {
            dim,
            in_legs,
            out_legs,
            data: vec![Scalar::zero(); pow(dim, in_legs + out_legs)],
        }
    }

    pub fn identity(dim: usize, legs: usize) -> Self {
        let mut op = LinOp::zeros(dim, legs, legs);
        let n = pow(dim, legs);
        for i in 0..n {
            op.data[i * n + i] = Scalar::one();
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn in_legs(&self) -> usize {
        self.in_legs
    }

    pub fn out_legs(&self) -> usize {
        self.out_legs
    }

    pub fn rows(&self) -> usize {
        pow(self.dim, self.out_legs)
    }

    pub fn cols(&self) -> usize {
        pow(self.dim, self.in_legs)
    }

    pub fn data(&self) -> &[Scalar] {
        &self.data
    }

    pub fn at(&self, row: usize, col: usize) -> &Scalar {
        &self.data[row * self.cols() + col]
    }

    pub fn set_at(&mut self, row: usize, col: usize, v: Scalar) {
        let c = self.cols();
        self.data[row * c + col] = v;
    }

    pub fn get(&self, out: &[usize], inn: &[usize]) -> &Scalar {
        self.at(flatten(out, self.dim), flatten(inn, self.dim))
    }

    pub fn set(&mut self, out: &[usize], inn: &[usize], v: Scalar) {
        let (r, c) = (flatten(out, self.dim), flatten(inn, self.dim));
        self.set_at(r, c, v);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    /// Nonzero components as `(row, col, value)`.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        let cols = self.cols();
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(k, v)| (k / cols, k % cols, v))
    }

    /// Per input column, the list of nonzero `(row, value)` entries.
    pub fn column_lists(&self) -> Vec<Vec<(usize, Scalar)>> {
        let mut cols = vec![Vec::new(); self.cols()];
        for (r, c, v) in self.nonzeros() {
            cols[c].push((r, v.clone()));
        }
        cols
    }

    fn same_shape(&self, o: &LinOp) -> Result<()> {
        if self.dim != o.dim {
            return Err(Error::DimMismatch(format!("{} vs {}", self.dim, o.dim)));
        }
        if self.in_legs != o.in_legs || self.out_legs != o.out_legs {
            return Err(Error::ArityMismatch(format!(
                "{}→{} vs {}→{}",
                self.in_legs, self.out_legs, o.in_legs, o.out_legs
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &LinOp) -> Result<LinOp> {
        self.same_shape(o)?;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        Ok(LinOp { data, ..*self.shape() })
    }

    pub fn sub(&self, o: &LinOp) -> Result<LinOp> {
        self.same_shape(o)?;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect();
        Ok(LinOp { data, ..*self.shape() })
    }

    pub fn scale(&self, c: &Scalar) -> LinOp {
        let data = self
            .data
            .iter()
            .map(|a| if a.is_zero() { Scalar::zero() } else { a * c })
            .collect();
        LinOp { data, ..*self.shape() }
    }

    pub fn neg(&self) -> LinOp {
        LinOp {
            data: self.data.iter().map(|a| -a).collect(),
            ..*self.shape()
        }
    }

    fn shape(&self) -> &LinOp {
        self
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinOp) -> Result<LinOp> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        if self.in_legs != other.out_legs {
            return Err(Error::ArityMismatch(format!(
                "cannot compose {}-in operator after {}-out operator",
                self.in_legs, other.out_legs
            )));
        }
        let (rows, mid, cols) = (self.rows(), self.cols(), other.cols());
        let mut data = vec![Scalar::zero(); rows * cols];
        let rhs = other.column_lists_by_row();
        for r in 0..rows {
            let out = &mut data[r * cols..(r + 1) * cols];
            for m in 0..mid {
                let a = &self.data[r * mid + m];
                if a.is_zero() {
                    continue;
                }
                for (c, b) in &rhs[m] {
                    out[*c] = &out[*c] + &(a * b);
                }
            }
        }
        Ok(LinOp {
            dim: self.dim,
            in_legs: other.in_legs,
            out_legs: self.out_legs,
            data,
        })
    }

    fn column_lists_by_row(&self) -> Vec<Vec<(usize, Scalar)>> {
        let cols = self.cols();
        (0..self.rows())
            .map(|r| {
                self.data[r * cols..(r + 1) * cols]
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (c, v.clone()))
                    .collect()
            })
            .collect()
    }

    /// Tensor product with `self` on the leading legs.
    pub fn kron(&self, o: &LinOp) -> Result<LinOp> {
        if self.dim != o.dim {
            return Err(Error::DimMismatch(format!("{} vs {}", self.dim, o.dim)));
        }
        let mut out = LinOp::zeros(self.dim, self.in_legs + o.in_legs, self.out_legs + o.out_legs);
        let (oc, or) = (o.cols(), o.rows());
        let cols = out.cols();
        let onz: Vec<_> = o.nonzeros().map(|(r, c, v)| (r, c, v.clone())).collect();
        for (r1, c1, v1) in self.nonzeros() {
            for (r2, c2, v2) in &onz {
                out.data[(r1 * or + r2) * cols + c1 * oc + c2] = v1 * v2;
            }
        }
        Ok(out)
    }

    /// `1^{⊗before} ⊗ self ⊗ 1^{⊗after}`.
    pub fn embed(&self, before: usize, after: usize) -> LinOp {
        let mut op = self.clone();
        if before > 0 {
            op = LinOp::identity(self.dim, before).kron(&op).expect("same dim");
        }
        if after > 0 {
            op = op.kron(&LinOp::identity(self.dim, after)).expect("same dim");
        }
        op
    }

    /// Places `self` so that its output legs occupy legs `k..k+out_legs-1`
    /// (1-based) of an `n`-leg output; identity on all other legs.
    pub fn embed_at(&self, k: usize, n: usize) -> Result<LinOp> {
        if k == 0 || k + self.out_legs > n + 1 {
            return Err(Error::OutOfRange(format!(
                "{}-leg operator at position {k} of {n}",
                self.out_legs
            )));
        }
        Ok(self.embed(k - 1, n + 1 - k - self.out_legs))
    }

    pub fn transpose(&self) -> LinOp {
        let (rows, cols) = (self.rows(), self.cols());
        let mut data = vec![Scalar::zero(); rows * cols];
        for (r, c, v) in self.nonzeros() {
            data[c * rows + r] = v.clone();
        }
        LinOp {
            dim: self.dim,
            in_legs: self.out_legs,
            out_legs: self.in_legs,
            data,
        }
    }

    pub fn map_scalars(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<LinOp> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(LinOp { data, ..*self.shape() })
    }

    pub fn first_mismatch(&self, o: &LinOp) -> Result<Option<Mismatch>> {
        self.same_shape(o)?;
        let cols = self.cols();
        Ok(self
            .data
            .iter()
            .zip(&o.data)
            .position(|(a, b)| a != b)
            .map(|k| Mismatch {
                out_index: digits(k / cols, self.out_legs, self.dim),
                in_index: digits(k % cols, self.in_legs, self.dim),
                left: self.data[k].clone(),
                right: o.data[k].clone(),
            }))
    }

    pub fn to_matrix(&self) -> Matrix {
        let cols = self.cols();
        (0..self.rows())
            .map(|r| self.data[r * cols..(r + 1) * cols].iter().map(Frac::from).collect())
            .collect()
    }

    pub fn from_matrix(dim: usize, in_legs: usize, out_legs: usize, m: &Matrix) -> Result<LinOp> {
        let data = m
            .iter()
            .flat_map(|row| row.iter().map(Frac::to_scalar))
            .collect::<Result<Vec<_>>>()?;
        LinOp::new(dim, in_legs, out_legs, data)
    }

    /// Exact inverse of a square operator.
    pub fn inverse(&self) -> Result<LinOp> {
        if self.in_legs != self.out_legs {
            return Err(Error::ArityMismatch("inverse of a non-square operator".into()));
        }
        let inv = crate::linalg::inverse(&self.to_matrix())?;
        LinOp::from_matrix(self.dim, self.in_legs, self.out_legs, &inv)
    }

    pub fn rank(&self) -> usize {
        crate::linalg::rank(&self.to_matrix())
    }

    /// Sub-block with auxiliary legs pinned to index 0 and vector legs
    /// restricted to `1..=N`; the result lives over `V_N`.
    pub fn project_block(&self, out_pattern: &[LegFlag], in_pattern: &[LegFlag]) -> Result<LinOp> {
        if out_pattern.len() != self.out_legs || in_pattern.len() != self.in_legs {
            return Err(Error::PatternMismatch(format!(
                "pattern arity {}→{} for a {}→{} operator",
                in_pattern.len(),
                out_pattern.len(),
                self.in_legs,
                self.out_legs
            )));
        }
        if self.dim < 2 {
            return Err(Error::PatternMismatch("base space has no vector directions".into()));
        }
        if out_pattern.iter().chain(in_pattern).any(|f| *f == LegFlag::Full) {
            return Err(Error::PatternMismatch(
                "full legs cannot be restricted to V_N".into(),
            ));
        }
        let n = self.dim - 1;
        let count = |p: &[LegFlag]| p.iter().filter(|f| **f == LegFlag::Vector).count();
        let (vo, vi) = (count(out_pattern), count(in_pattern));
        let lift = |small: &[usize], pattern: &[LegFlag]| -> Vec<usize> {
            let mut it = small.iter();
            pattern
                .iter()
                .map(|f| match f {
                    LegFlag::Vector => it.next().unwrap() + 1,
                    _ => 0,
                })
                .collect()
        };
        let mut out = LinOp::zeros(n, vi, vo);
        for r in 0..pow(n, vo) {
            let big_r = flatten(&lift(&digits(r, vo, n), out_pattern), self.dim);
            for c in 0..pow(n, vi) {
                let big_c = flatten(&lift(&digits(c, vi, n), in_pattern), self.dim);
                let v = self.at(big_r, big_c);
                if !v.is_zero() {
                    out.set_at(r, c, v.clone());
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for LinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LinOp(d={}, {}→{}) {{", self.dim, self.in_legs, self.out_legs)?;
        for (r, c, v) in self.nonzeros() {
            writeln!(
                f,
                "  {:?} <- {:?}: {}",
                digits(r, self.out_legs, self.dim),
                digits(c, self.in_legs, self.dim),
                v
            )?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LegFlag {
    /// Indices `1..=N`.
    Vector,
    /// The index 0.
    Auxiliary,
    /// No restriction.
    Full,
}

/// Diagonal projector on `V_{N+1}^{⊗k}` selecting a per-leg index pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projector {
    pub base_dim: usize,
    pub flags: Vec<LegFlag>,
}

impl Projector {
    pub fn new(base_dim: usize, flags: Vec<LegFlag>) -> Self {
        Projector { base_dim, flags }
    }

    pub fn to_linop(&self) -> LinOp {
        let legs = self.flags.len();
        let mut op = LinOp::zeros(self.base_dim, legs, legs);
        for i in 0..pow(self.base_dim, legs) {
            let keep = digits(i, legs, self.base_dim)
                .iter()
                .zip(&self.flags)
                .all(|(&x, f)| match f {
                    LegFlag::Vector => x != 0,
                    LegFlag::Auxiliary => x == 0,
                    LegFlag::Full => true,
                });
            if keep {
                op.set_at(i, i, Scalar::one());
            }
        }
        op
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn from_ints(dim: usize, i: usize, o: usize, v: &[i64]) -> LinOp {
        LinOp::new(dim, i, o, v.iter().map(|&x| Scalar::from(x)).collect()).unwrap()
    }

    fn perm(d: usize) -> LinOp {
        let mut p = LinOp::zeros(d, 2, 2);
        for a in 0..d {
            for b in 0..d {
                p.set(&[a, b], &[b, a], Scalar::one());
            }
        }
        p
    }

    /// Kronecker product computed straight from the definition.
    fn naive_kron(a: &LinOp, b: &LinOp) -> LinOp {
        let d = a.dim();
        let mut out = LinOp::zeros(d, a.in_legs() + b.in_legs(), a.out_legs() + b.out_legs());
        for r in 0..out.rows() {
            for c in 0..out.cols() {
                let ro = digits(r, out.out_legs(), d);
                let co = digits(c, out.in_legs(), d);
                let v = a.get(&ro[..a.out_legs()], &co[..a.in_legs()])
                    * b.get(&ro[a.out_legs()..], &co[a.in_legs()..]);
                out.set_at(r, c, v);
            }
        }
        out
    }

    #[test]
    fn identity_and_projectors_are_idempotent() {
        let id = LinOp::identity(3, 2);
        assert_eq!(id.compose(&id).unwrap(), id);
        let p = Projector::new(3, vec![LegFlag::Vector]).to_linop();
        assert_eq!(p.compose(&p).unwrap(), p);
        let one_minus = LinOp::identity(3, 1).sub(&p).unwrap();
        let expect = from_ints(3, 1, 1, &[1, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(one_minus.compose(&one_minus).unwrap(), expect);
        let mixed = Projector::new(3, vec![LegFlag::Full, LegFlag::Auxiliary]).to_linop();
        assert_eq!(mixed.compose(&mixed).unwrap(), mixed);
    }

    #[test]
    fn embed_matches_kronecker() {
        let s = perm(3);
        assert_eq!(s.embed_at(1, 2).unwrap(), s);
        let e = s.embed_at(2, 3).unwrap();
        assert_eq!(e, naive_kron(&LinOp::identity(3, 1), &s));
        assert!(s.embed_at(3, 3).is_err());
        assert!(s.embed_at(0, 3).is_err());
    }

    #[test]
    fn embed_mixed_arity() {
        // 1-in/2-out bracket tensor placed at leg 1 of three output legs
        let mut c = LinOp::zeros(2, 1, 2);
        c.set(&[0, 1], &[1], Scalar::from(5));
        let e = c.embed_at(1, 3).unwrap();
        assert_eq!((e.in_legs(), e.out_legs()), (2, 3));
        assert_eq!(e.get(&[0, 1, 1], &[1, 1]), &Scalar::from(5));
        assert_eq!(e.get(&[0, 1, 0], &[1, 1]), &Scalar::zero());
    }

    #[test]
    fn compose_errors() {
        let a = LinOp::identity(2, 1);
        let b = LinOp::identity(2, 2);
        assert!(matches!(a.compose(&b), Err(Error::ArityMismatch(_))));
        assert!(matches!(a.compose(&LinOp::identity(3, 1)), Err(Error::DimMismatch(_))));
        assert!(LinOp::new(2, 1, 1, vec![Scalar::zero(); 3]).is_err());
    }

    #[test]
    fn project_identity_block() {
        let id = LinOp::identity(4, 1);
        let v = [LegFlag::Vector];
        assert_eq!(id.project_block(&v, &v).unwrap(), LinOp::identity(3, 1));
        assert!(id.project_block(&[LegFlag::Full], &v).is_err());
        assert!(id.project_block(&v, &[]).is_err());
    }

    fn small_op(legs_in: usize, legs_out: usize) -> impl Strategy<Value = LinOp> {
        let n = pow(2, legs_in + legs_out);
        proptest::collection::vec(-3i64..=3, n)
            .prop_map(move |v| from_ints(2, legs_in, legs_out, &v))
    }

    proptest! {
        #[test]
        fn compose_is_associative(a in small_op(2, 1), b in small_op(1, 2), c in small_op(2, 1)) {
            let left = a.compose(&b).unwrap().compose(&c).unwrap();
            let right = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn disjoint_embeddings_commute(a in small_op(1, 1), b in small_op(2, 2)) {
            let ea = a.embed_at(1, 3).unwrap();
            let eb = b.embed_at(2, 3).unwrap();
            prop_assert_eq!(ea.compose(&eb).unwrap(), eb.compose(&ea).unwrap());
        }
    }
}
