//! Exact integer linear algebra: matrices over unbounded integers, row
//! Hermite normal form with transform, Smith normal form with transforms,
//! and lattices (subgroups of Z^d) with membership and incremental basis
//! extension.
//!
//! Conventions: vectors are rows and matrices act on the right, so a basis
//! of a lattice is a set of rows. Pivoting is deterministic (smallest
//! absolute value, first occurrence on ties) to make all outputs
//! reproducible. Divisor sequences list finite factors ascending with 1s
//! dropped; 0 denotes an infinite cyclic factor and sorts last.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense matrix of unbounded integers, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntegerMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<BigInt> {
        self.row(i).to_vec()
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(|x| x.is_zero())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row a += k * row b
    pub fn add_row_multiple(&mut self, a: usize, b: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(b, j) * k;
            let e = &mut self.entries[a * self.cols + j];
            *e += v;
        }
    }

    /// col a += k * col b
    pub fn add_col_multiple(&mut self, a: usize, b: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, b) * k;
            let e = &mut self.entries[i * self.cols + a];
            *e += v;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let e = &mut self.entries[i * self.cols + j];
            let v = -std::mem::take(e);
            *e = v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let e = &mut self.entries[i * self.cols + j];
            let v = -std::mem::take(e);
            *e = v;
        }
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntegerMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a * other.get(k, j);
                    let e = &mut out.entries[i * other.cols + j];
                    *e += v;
                }
            }
        }
        out
    }

    /// Determinant by fraction-free Gaussian elimination (square matrices).
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !m.get(i, k).is_zero()) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
            }
            for i in k + 1..n {
                m.set(i, k, BigInt::zero());
            }
            prev = m.get(k, k).clone();
        }
        let d = m.get(n - 1, n - 1).clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }
}

impl std::fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntegerMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Row Hermite normal form. Returns (H, U) with U unimodular, U * A = H.
/// H has the same dimensions as A; zero rows are moved to the bottom.
/// Pivot entries are positive, entries above a pivot lie in [0, pivot).
pub fn hnf(a: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix) {
    let mut h = a.clone();
    let mut u = IntegerMatrix::identity(a.rows);
    let mut r = 0;
    for c in 0..h.cols {
        if r == h.rows {
            break;
        }
        // Euclid on the rows r.. in column c until at most one nonzero remains.
        loop {
            let mut best: Option<usize> = None;
            let mut count = 0;
            for i in r..h.rows {
                if !h.get(i, c).is_zero() {
                    count += 1;
                    best = match best {
                        None => Some(i),
                        Some(b) if h.get(i, c).abs() < h.get(b, c).abs() => Some(i),
                        keep => keep,
                    };
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(r, b);
            u.swap_rows(r, b);
            if count == 1 {
                break;
            }
            let pivot = h.get(r, c).clone();
            for i in r + 1..h.rows {
                if h.get(i, c).is_zero() {
                    continue;
                }
                let q = -(h.get(i, c) / &pivot);
                h.add_row_multiple(i, r, &q);
                u.add_row_multiple(i, r, &q);
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        let pivot = h.get(r, c).clone();
        for i in 0..r {
            let q = -h.get(i, c).div_floor(&pivot);
            h.add_row_multiple(i, r, &q);
            u.add_row_multiple(i, r, &q);
        }
        r += 1;
    }
    (h, u)
}

/// Result of a Smith normal form computation: p * a * q = s with s diagonal,
/// d_1 | d_2 | ..., and p, q unimodular. qinv is the inverse of q.
pub struct SnfResult {
    pub s: IntegerMatrix,
    pub p: IntegerMatrix,
    pub q: IntegerMatrix,
    pub qinv: IntegerMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s.get(i, i).clone()).collect()
    }
}

/// Smith normal form with transforms.
pub fn snf(a: &IntegerMatrix) -> SnfResult {
    let mut s = a.clone();
    let mut p = IntegerMatrix::identity(a.rows);
    let mut q = IntegerMatrix::identity(a.cols);
    let mut qinv = IntegerMatrix::identity(a.cols);
    let n = a.rows.min(a.cols);
    let mut t = 0;
    while t < n {
        // Deterministic pivot: smallest nonzero absolute value in the
        // trailing submatrix, first occurrence in row-major order.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..s.rows {
            for j in t..s.cols {
                if s.get(i, j).is_zero() {
                    continue;
                }
                pivot = match pivot {
                    None => Some((i, j)),
                    Some((pi, pj)) if s.get(i, j).abs() < s.get(pi, pj).abs() => Some((i, j)),
                    keep => keep,
                };
            }
        }
        let Some((pi, pj)) = pivot else { break };
        s.swap_rows(t, pi);
        p.swap_rows(t, pi);
        s.swap_cols(t, pj);
        q.swap_cols(t, pj);
        qinv.swap_rows(t, pj);
        loop {
            let mut clean = true;
            let d = s.get(t, t).clone();
            for i in t + 1..s.rows {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let qq = -(s.get(i, t) / &d);
                s.add_row_multiple(i, t, &qq);
                p.add_row_multiple(i, t, &qq);
                if !s.get(i, t).is_zero() {
                    // remainder smaller than pivot: swap up and restart
                    s.swap_rows(t, i);
                    p.swap_rows(t, i);
                    clean = false;
                    break;
                }
            }
            if !clean {
                continue;
            }
            let d = s.get(t, t).clone();
            for j in t + 1..s.cols {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let qq = -(s.get(t, j) / &d);
                s.add_col_multiple(j, t, &qq);
                q.add_col_multiple(j, t, &qq);
                qinv.add_row_multiple(t, j, &-&qq);
                if !s.get(t, j).is_zero() {
                    s.swap_cols(t, j);
                    q.swap_cols(t, j);
                    qinv.swap_rows(t, j);
                    clean = false;
                    break;
                }
            }
            if !clean {
                continue;
            }
            // row and column t are clear; enforce divisibility of the rest
            let d = s.get(t, t).clone();
            let mut offender = None;
            'scan: for i in t + 1..s.rows {
                for j in t + 1..s.cols {
                    if !(s.get(i, j) % &d).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    s.add_row_multiple(t, i, &one);
                    p.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            p.negate_row(t);
        }
        t += 1;
    }
    SnfResult { s, p, q, qinv }
}

type SparseRow = Vec<(usize, BigInt)>;

fn sparse_get(row: &SparseRow, col: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&col, |e| e.0).ok().map(|i| &row[i].1)
}

/// target += k * source, dropping zeros.
fn sparse_axpy(target: &SparseRow, k: &BigInt, source: &SparseRow) -> SparseRow {
    if k.is_zero() {
        return target.clone();
    }
    let mut out = Vec::with_capacity(target.len() + source.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < source.len() {
        match (target.get(i), source.get(j)) {
            (Some(t), Some(s)) if t.0 == s.0 => {
                let v = &t.1 + k * &s.1;
                if !v.is_zero() {
                    out.push((t.0, v));
                }
                i += 1;
                j += 1;
            }
            (Some(t), Some(s)) if t.0 < s.0 => {
                out.push(t.clone());
                i += 1;
            }
            (Some(_), Some(s)) => {
                let v = k * &s.1;
                out.push((s.0, v));
                j += 1;
            }
            (Some(t), None) => {
                out.push(t.clone());
                i += 1;
            }
            (None, Some(s)) => {
                let v = k * &s.1;
                out.push((s.0, v));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

fn sparse_neg(row: &SparseRow) -> SparseRow {
    row.iter().map(|(c, v)| (*c, -v)).collect()
}

fn sparse_from_dense(v: &[BigInt]) -> SparseRow {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

fn sparse_to_dense(row: &SparseRow, dim: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); dim];
    for (c, v) in row {
        out[*c] = v.clone();
    }
    out
}

/// A subgroup of Z^d kept as a sparse row basis in Hermite normal form:
/// at most one basis row per pivot column, pivots strictly increasing,
/// pivot entries positive, entries above a pivot reduced into [0, pivot).
#[derive(Clone)]
pub struct IntegerLattice {
    dim: usize,
    rows: Vec<SparseRow>, // sorted by pivot (= first) column
}

impl IntegerLattice {
    pub fn empty(dim: usize) -> Self {
        IntegerLattice { dim, rows: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        let mut l = Self::empty(dim);
        for i in 0..dim {
            l.rows.push(vec![(i, BigInt::one())]);
        }
        l
    }

    pub fn from_rows(dim: usize, rows: impl IntoIterator<Item = Vec<BigInt>>) -> Self {
        let mut l = Self::empty(dim);
        for r in rows {
            l.add_vector_in_place(&r);
        }
        l
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Pivot columns in increasing order.
    pub fn pivot_cols(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r[0].0).collect()
    }

    /// Basis rows as a dense matrix in HNF (rank x dim).
    pub fn basis_matrix(&self) -> IntegerMatrix {
        IntegerMatrix::from_rows(self.rows.iter().map(|r| sparse_to_dense(r, self.dim)).collect())
    }

    pub fn basis_sparse(&self) -> &[SparseRow] {
        &self.rows
    }

    /// Floor-reduce v by the basis; the result is the canonical coset
    /// representative (entries at pivot columns in [0, pivot)).
    fn reduce_sparse(&self, v: &SparseRow) -> SparseRow {
        let mut v = v.clone();
        for row in &self.rows {
            let p = row[0].0;
            let Some(x) = sparse_get(&v, p) else { continue };
            let q = -x.div_floor(&row[0].1);
            if !q.is_zero() {
                v = sparse_axpy(&v, &q, row);
            }
        }
        v
    }

    /// Membership with canonical residue: residue is zero iff v is in the
    /// lattice.
    pub fn membership(&self, v: &[BigInt]) -> (bool, Vec<BigInt>) {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        let r = self.reduce_sparse(&sparse_from_dense(v));
        (r.is_empty(), sparse_to_dense(&r, self.dim))
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.membership(v).0
    }

    /// Add a vector; returns true iff the lattice grew.
    pub fn add_vector_in_place(&mut self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        self.add_sparse(sparse_from_dense(v))
    }

    pub fn add_vector(&self, v: &[BigInt]) -> (IntegerLattice, bool) {
        let mut l = self.clone();
        let changed = l.add_vector_in_place(v);
        (l, changed)
    }

    pub fn add_sparse(&mut self, v: SparseRow) -> bool {
        let mut work = vec![v];
        let mut changed = false;
        while let Some(v) = work.pop() {
            let mut v = self.reduce_sparse(&v);
            if v.is_empty() {
                continue;
            }
            changed = true;
            let lead = v[0].0;
            match self.rows.binary_search_by_key(&lead, |r| r[0].0) {
                Ok(i) => {
                    // collision: combine to the gcd, queue both remainders
                    let row = self.rows[i].clone();
                    let e = num_integer::gcd(v[0].1.clone(), row[0].1.clone());
                    let ext = BigInt::extended_gcd(&row[0].1, &v[0].1);
                    debug_assert_eq!(ext.gcd, e);
                    let mut w = sparse_axpy(&sparse_scale(&row, &ext.x), &ext.y, &v);
                    if w[0].1.is_negative() {
                        w = sparse_neg(&w);
                    }
                    let qr = -(&row[0].1 / &w[0].1);
                    let qv = -(&v[0].1 / &w[0].1);
                    let row_rem = sparse_axpy(&row, &qr, &w);
                    let v_rem = sparse_axpy(&v, &qv, &w);
                    self.rows[i] = w;
                    if !row_rem.is_empty() {
                        work.push(row_rem);
                    }
                    if !v_rem.is_empty() {
                        work.push(v_rem);
                    }
                }
                Err(i) => {
                    if v[0].1.is_negative() {
                        v = sparse_neg(&v);
                    }
                    self.rows.insert(i, v);
                }
            }
        }
        if changed {
            self.normalize_above();
        }
        changed
    }

    /// Re-establish the above-pivot reduction invariant.
    fn normalize_above(&mut self) {
        for i in 0..self.rows.len() {
            let mut j = i + 1;
            while j < self.rows.len() {
                let p = self.rows[j][0].0;
                let piv = self.rows[j][0].1.clone();
                if let Some(x) = sparse_get(&self.rows[i], p) {
                    let q = -x.div_floor(&piv);
                    if !q.is_zero() {
                        let src = self.rows[j].clone();
                        self.rows[i] = sparse_axpy(&self.rows[i], &q, &src);
                    }
                }
                j += 1;
            }
        }
    }

    /// Elementary divisors of Z^dim / L: finite factors ascending with 1s
    /// dropped, one 0 per infinite factor, zeros last.
    pub fn abelian_invariants(&self) -> Vec<BigInt> {
        let free_rank = self.dim - self.rows.len();
        let mut divs: Vec<BigInt> = if self.rows.is_empty() {
            Vec::new()
        } else {
            let res = snf(&self.basis_matrix());
            res.diagonal().into_iter().filter(|d| !d.is_one() && !d.is_zero()).collect()
        };
        divs.sort();
        divs.extend(std::iter::repeat(BigInt::zero()).take(free_rank));
        divs
    }
}

fn sparse_scale(row: &SparseRow, k: &BigInt) -> SparseRow {
    if k.is_zero() {
        return Vec::new();
    }
    row.iter().map(|(c, v)| (*c, k * v)).collect()
}

impl std::fmt::Debug for IntegerLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IntegerLattice(dim={}, rank={})", self.dim, self.rows.len())
    }
}

/// Divisor sequence of the quotient Z^dim / <rows>, same convention as
/// `IntegerLattice::abelian_invariants`.
pub fn abelian_invariants_of_rows(dim: usize, rows: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    IntegerLattice::from_rows(dim, rows).abelian_invariants()
}
