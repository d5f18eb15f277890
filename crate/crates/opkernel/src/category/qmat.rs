//! Sparse exact rational matrices, stored column-major.
//!
//! Columns are indexed by the source basis and hold `(row, coefficient)`
//! entries sorted by row with zero coefficients dropped, so equality of
//! canonical forms is plain structural equality. Most structural maps in
//! this crate are monomial (at most one entry per column), which keeps
//! even large coproduct decompositions cheap.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    rows: usize,
    cols: Vec<Vec<(u32, Rat)>>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat {
            rows,
            cols: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        QMat {
            rows: n,
            cols: (0..n).map(|i| vec![(i as u32, Rat::one())]).collect(),
        }
    }

    pub fn from_cols(rows: usize, cols: Vec<Vec<(u32, Rat)>>) -> Self {
        let mut m = QMat { rows, cols };
        m.normalize();
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let cols = (0..cols)
            .map(|c| {
                (0..rows)
                    .filter_map(|r| {
                        let v = f(r, c);
                        (!v.is_zero()).then_some((r as u32, v))
                    })
                    .collect()
            })
            .collect();
        QMat { rows, cols }
    }

    fn normalize(&mut self) {
        for col in &mut self.cols {
            col.retain(|(_, v)| !v.is_zero());
            col.sort_by_key(|&(r, _)| r);
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, c: usize) -> &[(u32, Rat)] {
        &self.cols[c]
    }

    pub fn entry(&self, r: usize, c: usize) -> Rat {
        self.cols[c]
            .iter()
            .find(|&&(ri, _)| ri as usize == r)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rat)> {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r as usize, c, v)))
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    /// `g` after `self` is not what this computes: `composed(g, f)` is
    /// the usual `g . f`.
    pub fn composed(g: &QMat, f: &QMat) -> QMat {
        assert_eq!(g.cols(), f.rows, "composition shape mismatch");
        let cols = f
            .cols
            .iter()
            .map(|fcol| {
                let mut acc: std::collections::BTreeMap<u32, Rat> = Default::default();
                for (mid, a) in fcol {
                    for (r, b) in &g.cols[*mid as usize] {
                        let e = acc.entry(*r).or_insert_with(Rat::zero);
                        *e += a * b;
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        QMat { rows: g.rows, cols }
    }

    /// Kronecker-style tensor with the first factor most significant.
    pub fn tensor(mats: &[&QMat]) -> QMat {
        let rows = mats.iter().map(|m| m.rows).product();
        let src_dims: Vec<usize> = mats.iter().map(|m| m.cols()).collect();
        let dst_dims: Vec<usize> = mats.iter().map(|m| m.rows).collect();
        let total_cols: usize = src_dims.iter().product();
        let mut cols = Vec::with_capacity(total_cols);
        for c in 0..total_cols {
            let digits = super::node::decode(c, &src_dims);
            let mut entries: Vec<(u32, Rat)> = vec![(0, Rat::one())];
            for (i, m) in mats.iter().enumerate() {
                let factor = m.col(digits[i]);
                let mut next = Vec::with_capacity(entries.len() * factor.len());
                for (r0, v0) in &entries {
                    for (r1, v1) in factor {
                        next.push((
                            r0 * dst_dims[i] as u32 + r1,
                            v0 * v1,
                        ));
                    }
                }
                entries = next;
            }
            entries.sort_by_key(|&(r, _)| r);
            cols.push(entries);
        }
        QMat { rows, cols }
    }

    /// The block injection of the `i`-th summand into a direct sum.
    pub fn injection(dims: &[usize], i: usize) -> QMat {
        let rows = dims.iter().sum();
        let offset: usize = dims[..i].iter().sum();
        QMat {
            rows,
            cols: (0..dims[i])
                .map(|c| vec![((offset + c) as u32, Rat::one())])
                .collect(),
        }
    }

    /// Concatenate columns (the copairing out of a direct sum).
    pub fn concat_cols(rows: usize, mats: &[&QMat]) -> QMat {
        let mut cols = Vec::new();
        for m in mats {
            assert_eq!(m.rows, rows);
            cols.extend(m.cols.iter().cloned());
        }
        QMat { rows, cols }
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols()), (other.rows, other.cols()));
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut acc: std::collections::BTreeMap<u32, Rat> = Default::default();
                for (r, v) in a.iter().chain(b) {
                    let e = acc.entry(*r).or_insert_with(Rat::zero);
                    *e += v;
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        QMat { rows: self.rows, cols }
    }

    pub fn scale(&self, k: &Rat) -> QMat {
        if k.is_zero() {
            return QMat::zero(self.rows, self.cols());
        }
        let cols = self
            .cols
            .iter()
            .map(|col| col.iter().map(|(r, v)| (*r, v * k)).collect())
            .collect();
        QMat { rows: self.rows, cols }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn swapped_columns(&self, i: usize, j: usize) -> QMat {
        let mut cols = self.cols.clone();
        cols.swap(i, j);
        QMat {
            rows: self.rows,
            cols,
        }
    }

    /// At most one entry per column.
    pub fn is_monomial(&self) -> bool {
        self.cols.iter().all(|c| c.len() <= 1)
    }

    pub fn rank(&self) -> usize {
        // Gaussian elimination over the rationals; sizes in this crate
        // stay small enough for the dense sweep.
        let mut work: Vec<Vec<Rat>> = self
            .cols
            .iter()
            .map(|col| {
                let mut dense = vec![Rat::zero(); self.rows];
                for (r, v) in col {
                    dense[*r as usize] = v.clone();
                }
                dense
            })
            .collect();
        let mut rank = 0;
        for row in 0..self.rows {
            let Some(pivot) = (rank..work.len()).find(|&c| !work[c][row].is_zero()) else {
                continue;
            };
            work.swap(rank, pivot);
            let p = work[rank][row].clone();
            for c in rank + 1..work.len() {
                if !work[c][row].is_zero() {
                    let factor = &work[c][row] / &p;
                    for r in row..self.rows {
                        let delta = &work[rank][r] * &factor;
                        work[c][r] -= delta;
                    }
                }
            }
            rank += 1;
            if rank == work.len() {
                break;
            }
        }
        rank
    }

    /// Gauss-Jordan inverse; `None` when singular. Meant for the small
    /// matrices that show up in group actions and basis changes.
    pub fn inverse(&self) -> Option<QMat> {
        if self.rows != self.cols() {
            return None;
        }
        let n = self.rows;
        let mut a: Vec<Vec<Rat>> = (0..n)
            .map(|r| (0..n).map(|c| self.entry(r, c)).collect())
            .collect();
        let mut inv: Vec<Vec<Rat>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| if r == c { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].clone();
            for c in 0..n {
                a[col][c] /= &p;
                inv[col][c] /= &p;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in 0..n {
                        let d = &a[col][c] * &f;
                        a[r][c] -= d;
                        let d = &inv[col][c] * &f;
                        inv[r][c] -= d;
                    }
                }
            }
        }
        Some(QMat::from_fn(n, n, |r, c| inv[r][c].clone()))
    }

    pub fn is_invertible(&self) -> bool {
        if self.rows != self.cols() {
            return false;
        }
        if self.is_monomial() {
            // A monomial square matrix is invertible exactly when every
            // row is hit once by a nonzero entry.
            let mut hit = vec![false; self.rows];
            for col in &self.cols {
                match col.as_slice() {
                    [(r, v)] if !v.is_zero() => {
                        if hit[*r as usize] {
                            return false;
                        }
                        hit[*r as usize] = true;
                    }
                    _ => return false,
                }
            }
            return hit.iter().all(|&h| h);
        }
        self.rank() == self.rows
    }

    /// Is every nonzero entry equal to one, with at most one per column?
    pub fn is_permutation_like(&self) -> bool {
        self.is_monomial() && self.cols.iter().flatten().all(|(_, v)| v.is_one())
    }
}

pub fn rat_to_string(v: &Rat) -> String {
    if v.denom().is_one() {
        format!("{}", v.numer())
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn rat_from_str(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_identity() {
        let id3 = QMat::identity(3);
        let m = QMat::from_fn(3, 2, |r, c| rat_int((r * 2 + c) as i64));
        assert_eq!(QMat::composed(&id3, &m), m);
        let n = QMat::from_fn(2, 3, |r, c| rat_int(if r == c { 1 } else { 0 }));
        let p = QMat::composed(&n, &m);
        assert_eq!(p.rows(), 2);
        assert_eq!(p.cols(), 2);
        assert_eq!(p.entry(0, 0), rat_int(0));
        assert_eq!(p.entry(1, 1), rat_int(3));
    }

    #[test]
    fn tensor_dims_multiply() {
        let a = QMat::identity(2);
        let b = QMat::from_fn(3, 1, |r, _| rat_int(r as i64));
        let t = QMat::tensor(&[&a, &b]);
        assert_eq!(t.rows(), 6);
        assert_eq!(t.cols(), 2);
        assert_eq!(t.entry(2, 0), rat_int(2));
        assert_eq!(t.entry(5, 1), rat_int(2));
    }

    #[test]
    fn rank_and_invertibility() {
        let m = QMat::from_fn(2, 2, |r, c| rat_int((r + c) as i64));
        assert_eq!(m.rank(), 2);
        assert!(m.is_invertible());
        let s = QMat::from_fn(2, 2, |r, c| rat_int(((r + 1) * (c + 1)) as i64));
        assert_eq!(s.rank(), 1);
        assert!(!s.is_invertible());
        let perm = QMat::from_cols(2, vec![vec![(1, rat_int(1))], vec![(0, rat_int(1))]]);
        assert!(perm.is_invertible());
        assert!(perm.is_permutation_like());
    }

    #[test]
    fn rational_strings() {
        assert_eq!(rat_to_string(&rat(3, 6)), "1/2");
        assert_eq!(rat_to_string(&rat_int(-4)), "-4");
        assert_eq!(rat_from_str("7/2").unwrap(), rat(7, 2));
        assert_eq!(rat_from_str("-5").unwrap(), rat_int(-5));
        assert!(rat_from_str("1/0").is_none());
    }
}
