//! Exact integer linear algebra: Smith normal form, rank, minors and
//! integer-lattice membership. Every entry is a [`BigInt`]; nothing here
//! touches floating point.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(IntMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from row vectors. Panics on ragged input; use
    /// [`IntMatrix::new`] for fallible construction.
    pub fn from_rows<T, R>(rows: &[R]) -> Self
    where
        T: Clone + Into<BigInt>,
        R: AsRef<[T]>,
    {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), cols, "ragged rows");
            entries.extend(row.iter().cloned().map(Into::into));
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            entries,
        }
    }

    /// Builds a `d × columns.len()` matrix whose columns are the given vectors.
    pub fn from_columns<T, C>(d: usize, columns: &[C]) -> Self
    where
        T: Clone + Into<BigInt>,
        C: AsRef<[T]>,
    {
        let mut m = Self::zeros(d, columns.len());
        for (j, col) in columns.iter().enumerate() {
            let col = col.as_ref();
            assert_eq!(col.len(), d, "column length differs from d");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone().into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Submatrix made of the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> IntMatrix {
        let mut m = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                m[(i, jj)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> IntMatrix {
        let mut entries = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            entries.extend_from_slice(self.row(i));
        }
        IntMatrix {
            rows: rows.len(),
            cols: self.cols,
            entries,
        }
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = false;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = !sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let val = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = val / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        let det = a[(n - 1, n - 1)].clone();
        Ok(if sign { -det } else { det })
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, c: &BigInt) {
        for k in 0..self.cols {
            let s = &self.entries[src * self.cols + k];
            if !s.is_zero() {
                let delta = c * s;
                self.entries[dst * self.cols + k] += delta;
            }
        }
    }

    /// col[dst] += c * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, c: &BigInt) {
        for r in 0..self.rows {
            let s = &self.entries[r * self.cols + src];
            if !s.is_zero() {
                let delta = c * s;
                self.entries[r * self.cols + dst] += delta;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for k in 0..self.cols {
            let e = &mut self.entries[i * self.cols + k];
            *e = -std::mem::take(e);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            let e = &mut self.entries[r * self.cols + j];
            *e = -std::mem::take(e);
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.entries[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "incompatible shapes");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

/// Writes one row per line, entries separated by single spaces. This is
/// the matrix text format accepted by [`crate::cli_io::parse_matrix`].
impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{}", self.row(i).iter().join(" "))?;
        }
        Ok(())
    }
}

/// `u · a · v = diag(factors, 0, …)` with `u`, `v` unimodular.
///
/// The inverses of both transforms are carried along so that callers can
/// map back out of Smith coordinates without a separate inversion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    /// Invariant factors `d_1 | d_2 | … | d_r`, all positive. Ones are kept.
    pub factors: Vec<BigInt>,
    pub rank: usize,
}

impl SmithDecomposition {
    /// The diagonal matrix `D` with the shape of the decomposed matrix.
    pub fn diagonal(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.u.rows(), self.v.rows());
        for (i, f) in self.factors.iter().enumerate() {
            d[(i, i)] = f.clone();
        }
        d
    }
}

/// `u · a · v = diag(factors, 0, …)` without the inverse transforms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithTransforms {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub factors: Vec<BigInt>,
    pub rank: usize,
}

struct SmithState {
    a: IntMatrix,
    /// `(u, v)`, when tracked.
    transforms: Option<(IntMatrix, IntMatrix)>,
    /// `(u_inv, v_inv)`, when tracked.
    inverses: Option<(IntMatrix, IntMatrix)>,
}

impl SmithState {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        if let Some((u, _)) = &mut self.transforms {
            u.swap_rows(i, j);
        }
        if let Some((u_inv, _)) = &mut self.inverses {
            u_inv.swap_cols(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        if let Some((_, v)) = &mut self.transforms {
            v.swap_cols(i, j);
        }
        if let Some((_, v_inv)) = &mut self.inverses {
            v_inv.swap_rows(i, j);
        }
    }

    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.a.add_row_multiple(dst, src, c);
        if let Some((u, _)) = &mut self.transforms {
            u.add_row_multiple(dst, src, c);
        }
        if let Some((u_inv, _)) = &mut self.inverses {
            u_inv.add_col_multiple(src, dst, &-c);
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.a.add_col_multiple(dst, src, c);
        if let Some((_, v)) = &mut self.transforms {
            v.add_col_multiple(dst, src, c);
        }
        if let Some((_, v_inv)) = &mut self.inverses {
            v_inv.add_row_multiple(src, dst, &-c);
        }
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        if let Some((u, _)) = &mut self.transforms {
            u.negate_row(i);
        }
        if let Some((u_inv, _)) = &mut self.inverses {
            u_inv.negate_col(i);
        }
    }

    /// Nonzero entry of least absolute value in the trailing block starting
    /// at `(t, t)`; ties go to the lowest `(row, col)`.
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let e = &self.a[(i, j)];
                if e.is_zero() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(b) => e.magnitude() < self.a[b].magnitude(),
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    /// Clears row `t` and column `t` below/right of the pivot. Returns false
    /// if some remainder stayed nonzero.
    fn eliminate(&mut self, t: usize) -> bool {
        if self.a[(t, t)].is_negative() {
            self.negate_row(t);
        }
        let p = self.a[(t, t)].clone();
        let mut clean = true;
        for i in t + 1..self.a.rows() {
            if self.a[(i, t)].is_zero() {
                continue;
            }
            let q = self.a[(i, t)].div_floor(&p);
            if !q.is_zero() {
                self.add_row(i, t, &-q);
            }
            clean &= self.a[(i, t)].is_zero();
        }
        for j in t + 1..self.a.cols() {
            if self.a[(t, j)].is_zero() {
                continue;
            }
            let q = self.a[(t, j)].div_floor(&p);
            if !q.is_zero() {
                self.add_col(j, t, &-q);
            }
            clean &= self.a[(t, j)].is_zero();
        }
        clean
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Track {
    Nothing,
    Transforms,
    Everything,
}

fn reduce(a: &IntMatrix, track: Track) -> (SmithState, Vec<BigInt>) {
    let (m, n) = (a.rows(), a.cols());
    let identities = || (IntMatrix::identity(m), IntMatrix::identity(n));
    let mut st = SmithState {
        a: a.clone(),
        transforms: (track != Track::Nothing).then(identities),
        inverses: (track == Track::Everything).then(identities),
    };
    let mut factors = Vec::new();
    for t in 0..m.min(n) {
        let Some((pi, pj)) = st.pivot(t) else { break };
        st.swap_rows(t, pi);
        st.swap_cols(t, pj);
        loop {
            if !st.eliminate(t) {
                let (pi, pj) = st.pivot(t).expect("nonzero remainder exists");
                st.swap_rows(t, pi);
                st.swap_cols(t, pj);
                continue;
            }
            // Row and column are clear; the pivot must divide the rest.
            let p = st.a[(t, t)].clone();
            let offender = (t + 1..m)
                .cartesian_product(t + 1..n)
                .find(|&(i, j)| !st.a[(i, j)].is_multiple_of(&p));
            match offender {
                Some((i, _)) => st.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        factors.push(st.a[(t, t)].clone());
    }
    (st, factors)
}

/// Smith normal form of an arbitrary integer matrix.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (st, factors) = reduce(a, Track::Everything);
    let (u, v) = st.transforms.expect("transforms were tracked");
    let (u_inv, v_inv) = st.inverses.expect("inverses were tracked");
    SmithDecomposition {
        u,
        u_inv,
        v,
        v_inv,
        rank: factors.len(),
        factors,
    }
}

/// Same reduction as [`smith_normal_form`], skipping the inverse transforms.
/// Roughly halves the work when `a` has many more rows than columns.
pub fn smith_transforms(a: &IntMatrix) -> SmithTransforms {
    let (st, factors) = reduce(a, Track::Transforms);
    let (u, v) = st.transforms.expect("transforms were tracked");
    SmithTransforms {
        u,
        v,
        rank: factors.len(),
        factors,
    }
}

/// Invariant factors only. The work is linear in the larger dimension of
/// `a` for a fixed smaller one.
pub fn invariant_factors(a: &IntMatrix) -> Vec<BigInt> {
    reduce(a, Track::Nothing).1
}

/// Rank over the rationals, by fraction-free elimination.
pub fn rank(a: &IntMatrix) -> usize {
    let mut m = a.clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        m.swap_rows(r, p);
        for i in r + 1..rows {
            if m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone();
            let g = m[(r, c)].clone();
            for j in c..cols {
                let val = &m[(i, j)] * &g - &m[(r, j)] * &f;
                m[(i, j)] = val;
            }
        }
        r += 1;
    }
    r
}

/// gcd of all `k × k` minors, `k = cols(a)`. The columns must be independent.
pub fn gcd_of_maximal_minors(a: &IntMatrix) -> Result<BigInt> {
    let k = a.cols();
    if rank(a) < k {
        return Err(Error::DependentColumns);
    }
    let mut g = BigInt::zero();
    for rows in (0..a.rows()).combinations(k) {
        let det = a.select_rows(&rows).determinant()?;
        g = g.gcd(&det);
        if g.is_one() {
            break;
        }
    }
    Ok(g)
}

/// Integer coefficients `c` with `basis · c = target`, or `None` when the
/// target is outside the integer column span of `basis`.
pub fn solve_integer_membership(
    basis: &IntMatrix,
    target: &[BigInt],
) -> Result<Option<Vec<BigInt>>> {
    if target.len() != basis.rows() {
        return Err(Error::DimensionMismatch {
            expected: basis.rows(),
            found: target.len(),
        });
    }
    let snf = smith_normal_form(basis);
    let y = snf.u.mul_vec(target)?;
    let mut w = vec![BigInt::zero(); basis.cols()];
    for (i, yi) in y.iter().enumerate() {
        if i < snf.rank {
            let (q, r) = yi.div_rem(&snf.factors[i]);
            if !r.is_zero() {
                return Ok(None);
            }
            w[i] = q;
        } else if !yi.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(snf.v.mul_vec(&w)?))
}
