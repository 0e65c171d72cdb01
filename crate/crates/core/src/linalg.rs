//! Sparse exact linear algebra: incremental row echelon form with optional
//! tracking of how each echelon row was built from the inserted vectors.

use crate::rational::Q;
use num::{One, Zero};
use std::collections::{BTreeMap, HashMap};

/// Sparse vector, sorted by index, no explicit zeros.
pub type SparseVec = Vec<(usize, Q)>;

pub fn from_map(m: BTreeMap<usize, Q>) -> SparseVec {
    m.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn axpy(acc: &mut BTreeMap<usize, Q>, a: &Q, v: &SparseVec) {
    for (i, c) in v {
        let e = acc.entry(*i).or_insert_with(Q::zero);
        *e += a * c;
        if e.is_zero() {
            acc.remove(i);
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    combos: Vec<SparseVec>,
    pivot_row: HashMap<usize, usize>,
    track: bool,
    inserted: usize,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Keeps, for every echelon row, its expression in the inserted vectors.
    pub fn tracking() -> Self {
        Echelon { track: true, ..Self::default() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current rows. Returns the residual and the
    /// coefficients `c_r` with `v = residual + sum c_r row_r`.
    fn reduce(&self, v: &SparseVec) -> (BTreeMap<usize, Q>, Vec<(usize, Q)>) {
        let mut acc: BTreeMap<usize, Q> = v.iter().cloned().collect();
        let mut used = Vec::new();
        let mut cursor = 0usize;
        loop {
            let next = acc
                .range(cursor..)
                .find(|(k, _)| self.pivot_row.contains_key(k))
                .map(|(k, c)| (*k, c.clone()));
            let Some((col, c)) = next else { break };
            let r = self.pivot_row[&col];
            axpy(&mut acc, &(-c.clone()), &self.rows[r]);
            used.push((r, c));
            cursor = col + 1;
        }
        (acc, used)
    }

    /// Inserts a vector; returns true if it enlarged the span.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let id = self.inserted;
        self.inserted += 1;
        let (res, used) = self.reduce(v);
        let Some((&lead, lc)) = res.iter().next() else { return false };
        let inv = Q::one() / lc;
        let row: SparseVec = res.iter().map(|(k, c)| (*k, c * &inv)).collect();
        if self.track {
            let mut combo: BTreeMap<usize, Q> = BTreeMap::new();
            combo.insert(id, Q::one());
            for (r, c) in &used {
                axpy(&mut combo, &(-c.clone()), &self.combos[*r]);
            }
            self.combos.push(combo.into_iter().map(|(k, c)| (k, c * &inv)).collect());
        }
        self.pivot_row.insert(lead, self.rows.len());
        self.rows.push(row);
        true
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Writes `v` as a combination of the inserted vectors (by insertion
    /// index). Requires tracking mode; `None` if `v` is not in the span.
    pub fn solve(&self, v: &SparseVec) -> Option<SparseVec> {
        assert!(self.track, "solve needs a tracking echelon");
        let (res, used) = self.reduce(v);
        if !res.is_empty() {
            return None;
        }
        let mut out = BTreeMap::new();
        for (r, c) in &used {
            axpy(&mut out, c, &self.combos[*r]);
        }
        Some(from_map(out))
    }
}

pub fn rank(vectors: &[SparseVec]) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// Dense matrix over Q, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Q>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data: Vec<Q> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * c);
        Mat { rows: r, cols: c, data }
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows);
        let mut out = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn add_scaled(&mut self, c: &Q, o: &Mat) {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        if c.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            if !b.is_zero() {
                *a += c * b;
            }
        }
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn commutator(&self, o: &Mat) -> Mat {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn kron(&self, o: &Mat) -> Mat {
        let mut out = Mat::zeros(self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        let b = o.get(k, l);
                        if !b.is_zero() {
                            out.set(i * o.rows + k, j * o.cols + l, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let vs: Vec<SparseVec> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| !self.get(i, j).is_zero())
                    .map(|j| (j, self.get(i, j).clone()))
                    .collect()
            })
            .collect();
        rank(&vs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn rank_and_solve() {
        let v1 = vec![(0, q(1)), (1, q(2))];
        let v2 = vec![(1, q(1)), (2, q(1))];
        let v3 = vec![(0, q(1)), (1, q(4)), (2, q(2))];
        assert_eq!(rank(&[v1.clone(), v2.clone(), v3.clone()]), 2);
        let mut e = Echelon::tracking();
        e.insert(&v1);
        e.insert(&v2);
        let c = e.solve(&v3).unwrap();
        assert_eq!(c, vec![(0, q(1)), (1, q(2))]);
        assert!(e.solve(&vec![(2, q(1))]).is_none());
    }

    #[test]
    fn kron_identity() {
        let a = Mat::from_rows(vec![vec![q(1), q(2)], vec![q(3), q(4)]]);
        let i = Mat::identity(2);
        assert_eq!(a.kron(&i).mul(&i.kron(&a)), a.kron(&a));
    }
}
