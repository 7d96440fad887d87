//! Exact Gaussian elimination over ℚ(q). Pivot choice is the first nonzero
//! entry in column order, so every result is deterministic.

use crate::error::{Error, Result};
use crate::field::Frac;

pub type Matrix = Vec<Vec<Frac>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Frac::zero(); cols]; rows]
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        if !inv.is_one() {
            for x in m[r][c..].iter_mut() {
                *x = x.mul(&inv);
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                if !p.is_zero() {
                    *x = x.sub(&f.mul(p));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut m = m.clone();
    rref(&mut m).len()
}

/// Solves `a x = b` for every column of `b`. Free variables are set to zero.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let rhs = b.first().map_or(0, |r| r.len());
    if b.len() != rows {
        return Err(Error::DimMismatch(format!("{} equations vs {} right-hand rows", rows, b.len())));
    }
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().chain(rb.iter()).cloned().collect())
        .collect();
    let pivots = rref(&mut aug);
    if pivots.iter().any(|&p| p >= cols) {
        return Err(Error::NoSolution("right-hand side is not in the column space".into()));
    }
    let mut x = zeros(cols, rhs);
    for (r, &p) in pivots.iter().enumerate() {
        for j in 0..rhs {
            x[p][j] = aug[r][cols + j].clone();
        }
    }
    Ok(x)
}

/// Basis of the right null space, one vector per free column.
pub fn kernel(a: &Matrix) -> Vec<Vec<Frac>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Frac::zero(); cols];
        v[free] = Frac::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = m[r][free].neg();
        }
        basis.push(v);
    }
    basis
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("inverse of a non-square matrix".into()));
    }
    let mut id = zeros(n, n);
    for (i, row) in id.iter_mut().enumerate() {
        row[i] = Frac::one();
    }
    if rank(a) < n {
        return Err(Error::NoSolution("matrix is singular".into()));
    }
    solve(a, &id)
}

/// Incrementally maintained reduced echelon basis of a subspace, with each
/// basis row remembering the combination of inserted vectors it came from.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    rows: Vec<(usize, Vec<Frac>, Vec<Frac>)>,
    inserted: usize,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon {
            dim,
            rows: Vec::new(),
            inserted: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    fn reduce_tracked(&self, v: &mut [Frac], combo: &mut Vec<Frac>) {
        for (p, row, rc) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = x.sub(&f.mul(y));
                }
            }
            if combo.len() < rc.len() {
                combo.resize(rc.len(), Frac::zero());
            }
            for (x, y) in combo.iter_mut().zip(rc) {
                if !y.is_zero() {
                    *x = x.sub(&f.mul(y));
                }
            }
        }
    }

    /// Adds a generator. Returns whether the rank grew.
    pub fn insert(&mut self, mut v: Vec<Frac>) -> bool {
        assert_eq!(v.len(), self.dim);
        let idx = self.inserted;
        self.inserted += 1;
        let mut combo = vec![Frac::zero(); self.inserted];
        combo[idx] = Frac::one();
        self.reduce_tracked(&mut v, &mut combo);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].inv().expect("nonzero");
        for x in v.iter_mut() {
            *x = x.mul(&inv);
        }
        for x in combo.iter_mut() {
            *x = x.mul(&inv);
        }
        for (_, row, rc) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, y) in row.iter_mut().zip(&v) {
                if !y.is_zero() {
                    *x = x.sub(&f.mul(y));
                }
            }
            rc.resize(combo.len(), Frac::zero());
            for (x, y) in rc.iter_mut().zip(&combo) {
                if !y.is_zero() {
                    *x = x.sub(&f.mul(y));
                }
            }
        }
        self.rows.push((p, v, combo));
        self.rows.sort_by_key(|r| r.0);
        true
    }

    /// Canonical remainder of `v` modulo the span: zero on every pivot column.
    pub fn normal_form(&self, v: &[Frac]) -> Vec<Frac> {
        let mut v = v.to_vec();
        let mut scratch = Vec::new();
        self.reduce_tracked(&mut v, &mut scratch);
        v
    }

    /// Expresses `v` as a combination of the inserted generators, or returns
    /// the nonzero remainder.
    pub fn express(&self, v: &[Frac]) -> std::result::Result<Vec<Frac>, Vec<Frac>> {
        let mut r = v.to_vec();
        let mut combo = vec![Frac::zero(); self.inserted];
        self.reduce_tracked(&mut r, &mut combo);
        if r.iter().all(|x| x.is_zero()) {
            combo.resize(self.inserted, Frac::zero());
            Ok(combo.into_iter().map(|c| c.neg()).collect())
        } else {
            Err(r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| Frac::from_int(x)).collect())
            .collect()
    }

    #[test]
    fn solve_minimal_support() {
        // x + y = 2 with free y: expect (2, 0)
        let x = solve(&m(&[&[1, 1]]), &m(&[&[2]])).unwrap();
        assert_eq!(x, m(&[&[2], &[0]]));
        assert!(solve(&m(&[&[0, 0]]), &m(&[&[1]])).is_err());
    }

    #[test]
    fn kernel_and_inverse() {
        let a = m(&[&[1, 2], &[2, 4]]);
        let k = kernel(&a);
        assert_eq!(k, vec![vec![Frac::from_int(-2), Frac::one()]]);
        let b = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&b).unwrap();
        assert_eq!(inv, m(&[&[1, -1], &[-1, 2]]));
        assert!(inverse(&a).is_err());
    }

    #[test]
    fn echelon_express_reproduces_vector() {
        let mut e = Echelon::new(3);
        let gens = m(&[&[1, 1, 0], &[0, 1, 1], &[1, 2, 1]]);
        for g in &gens {
            e.insert(g.clone());
        }
        assert_eq!(e.rank(), 2);
        let target = m(&[&[2, 5, 3]]).remove(0);
        let combo = e.express(&target).unwrap();
        let mut back = vec![Frac::zero(); 3];
        for (c, g) in combo.iter().zip(&gens) {
            for (b, x) in back.iter_mut().zip(g) {
                *b = b.add(&c.mul(x));
            }
        }
        assert_eq!(back, target);
        assert!(e.express(&m(&[&[1, 0, 0]]).remove(0)).is_err());
    }
}
