//! Exact integer matrix algebra: Smith normal form, determinants, cokernels,
//! integer linear systems.
//!
//! Everything here works over arbitrary-precision integers. Matrices are
//! immutable values; every operation returns a fresh matrix.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("no integer solution")]
    NoSolution,
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        IntMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix::new(rows, cols, vec![BigInt::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn diag(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    /// Builds a matrix from small-integer rows. All rows must have equal length.
    /// A matrix with zero rows needs an explicit column count; use
    /// [`IntMatrix::from_rows_with_cols`].
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        Self::from_rows_with_cols(rows, cols)
    }

    pub fn from_rows_with_cols<R: AsRef<[i64]>>(rows: &[R], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix::new(rows.len(), cols, data)
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        IntMatrix::new(n, cols, data)
    }

    /// Column vector from a slice.
    pub fn column(v: &[BigInt]) -> Self {
        IntMatrix::new(v.len(), 1, v.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix::new(self.cols, self.rows, data)
    }

    /// Returns a copy with entry `(i, j)` replaced.
    pub fn with_entry(&self, i: usize, j: usize, value: BigInt) -> Self {
        let mut m = self.clone();
        m.data[i * self.cols + j] = value;
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        IntMatrix::new(idx.len(), self.cols, data)
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for i in 0..self.rows {
            for &j in idx {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix::new(self.rows, idx.len(), data)
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        IntMatrix::new(self.rows, cols, data)
    }

    /// `[self ; other]`
    pub fn vstack(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        IntMatrix::new(self.rows + other.rows, self.cols, data)
    }

    /// Block diagonal `diag(self, other)`.
    pub fn block_diag(&self, other: &IntMatrix) -> Self {
        let top = self.hstack(&IntMatrix::zeros(self.rows, other.cols));
        let bottom = IntMatrix::zeros(other.rows, self.cols).hstack(other);
        top.vstack(&bottom)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "mul_vec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        IntMatrix::new(self.rows, self.cols, self.data.iter().map(|x| x * k).collect())
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = vec![BigInt::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(IntMatrix::new(self.rows, other.cols, data))
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        smith_normal_form(self).rank()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;
    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        IntMatrix::new(self.rows, self.cols, self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;
    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        IntMatrix::new(self.rows, self.cols, self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;
    fn neg(self) -> IntMatrix {
        IntMatrix::new(self.rows, self.cols, self.data.iter().map(|x| -x).collect())
    }
}

/// `U * A * V = S` with `U`, `V` unimodular and `S` diagonal with a
/// nonnegative divisibility chain. The inverses of `U` and `V` are kept as
/// well; cokernel lifts need them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries `d_1, ..., d_min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.s.rows().min(self.s.cols());
        (0..k).map(|i| self.s.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|d| !d.is_zero()).count()
    }
}

struct Work {
    rows: usize,
    cols: usize,
    s: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    u_inv: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    v_inv: Vec<Vec<BigInt>>,
}

fn ident(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn axpy(dst: &mut [BigInt], c: &BigInt, src: &[BigInt]) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d += c * s;
        }
    }
}

fn add_row_multiple(m: &mut [Vec<BigInt>], dst: usize, c: &BigInt, src: usize) {
    let src_row = m[src].clone();
    axpy(&mut m[dst], c, &src_row);
}

fn add_col_multiple(m: &mut [Vec<BigInt>], dst: usize, c: &BigInt, src: usize) {
    for row in m.iter_mut() {
        if !row[src].is_zero() {
            let t = c * &row[src];
            row[dst] += t;
        }
    }
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

impl Work {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.s.swap(a, b);
        self.u.swap(a, b);
        swap_cols(&mut self.u_inv, a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        swap_cols(&mut self.s, a, b);
        swap_cols(&mut self.v, a, b);
        self.v_inv.swap(a, b);
    }

    /// row_dst += c * row_src
    fn add_row(&mut self, dst: usize, c: &BigInt, src: usize) {
        add_row_multiple(&mut self.s, dst, c, src);
        add_row_multiple(&mut self.u, dst, c, src);
        add_col_multiple(&mut self.u_inv, src, &-c, dst);
    }

    /// col_dst += c * col_src
    fn add_col(&mut self, dst: usize, c: &BigInt, src: usize) {
        add_col_multiple(&mut self.s, dst, c, src);
        add_col_multiple(&mut self.v, dst, c, src);
        add_row_multiple(&mut self.v_inv, src, &-c, dst);
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.s[i].iter_mut() {
            *x = -&*x;
        }
        for x in self.u[i].iter_mut() {
            *x = -&*x;
        }
        for row in self.u_inv.iter_mut() {
            row[i] = -&row[i];
        }
    }

    /// Smallest nonzero |entry| in the trailing block, ties to lowest (row, col).
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.s[i][j];
                if x.is_zero() {
                    continue;
                }
                let a = x.abs();
                if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                    best = Some((i, j, a));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    fn run(&mut self) {
        let k = self.rows.min(self.cols);
        for t in 0..k {
            loop {
                let Some((pi, pj)) = self.pivot(t) else { return };
                self.swap_rows(t, pi);
                self.swap_cols(t, pj);
                let p = self.s[t][t].clone();
                let mut clean = true;
                for i in t + 1..self.rows {
                    if !self.s[i][t].is_zero() {
                        let q = &self.s[i][t] / &p;
                        if !q.is_zero() {
                            self.add_row(i, &-q, t);
                        }
                        clean &= self.s[i][t].is_zero();
                    }
                }
                for j in t + 1..self.cols {
                    if !self.s[t][j].is_zero() {
                        let q = &self.s[t][j] / &p;
                        if !q.is_zero() {
                            self.add_col(j, &-q, t);
                        }
                        clean &= self.s[t][j].is_zero();
                    }
                }
                if !clean {
                    continue;
                }
                // divisibility of the trailing block
                let bad = (t + 1..self.rows)
                    .find(|&i| (t + 1..self.cols).any(|j| !self.s[i][j].is_multiple_of(&p)));
                match bad {
                    Some(i) => self.add_row(t, &BigInt::one(), i),
                    None => break,
                }
            }
            if self.s[t][t].is_negative() {
                self.negate_row(t);
            }
        }
    }
}

fn to_matrix(rows: Vec<Vec<BigInt>>, cols: usize) -> IntMatrix {
    IntMatrix::from_big_rows(rows, cols)
}

/// Smith normal form with transformation matrices.
///
/// Pivot choice is deterministic: the smallest nonzero absolute value in the
/// remaining block, ties broken by lowest (row, col).
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut w = Work {
        rows: m,
        cols: n,
        s: a.to_rows(),
        u: ident(m),
        u_inv: ident(m),
        v: ident(n),
        v_inv: ident(n),
    };
    w.run();
    SmithDecomposition {
        s: to_matrix(w.s, n),
        u: to_matrix(w.u, m),
        u_inv: to_matrix(w.u_inv, m),
        v: to_matrix(w.v, n),
        v_inv: to_matrix(w.v_inv, n),
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &IntMatrix) -> Result<BigInt, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut m = a.to_rows();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    Ok(sign * &m[n - 1][n - 1])
}

/// Presentation of `Z^rows / A Z^cols`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cokernel {
    /// Nontrivial invariant factors (each >= 2, divisibility chain), followed
    /// by one zero per free generator.
    pub invariant_factors: Vec<BigInt>,
    /// `k x rows`: ambient coordinates to factor coordinates.
    pub projection: IntMatrix,
    /// `rows x k`: column `i` is an ambient lift of factor generator `i`.
    pub lift: IntMatrix,
}

impl Cokernel {
    pub fn torsion_count(&self) -> usize {
        self.invariant_factors.iter().filter(|d| !d.is_zero()).count()
    }

    pub fn free_rank(&self) -> usize {
        self.invariant_factors.len() - self.torsion_count()
    }
}

pub fn cokernel(a: &IntMatrix) -> Cokernel {
    let snf = smith_normal_form(a);
    let diag = snf.diagonal();
    let keep: Vec<usize> = (0..a.rows())
        .filter(|&i| diag.get(i).is_none_or(|d| !d.is_one()))
        .collect();
    let invariant_factors = keep.iter().map(|&i| diag.get(i).cloned().unwrap_or_default()).collect();
    Cokernel {
        invariant_factors,
        projection: snf.u.select_rows(&keep),
        lift: snf.u_inv.select_cols(&keep),
    }
}

/// Some integer `x` with `A x = b`.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
    if b.len() != a.rows() {
        return Err(LinalgError::ShapeMismatch(format!("rhs length {} vs {} rows", b.len(), a.rows())));
    }
    let snf = smith_normal_form(a);
    let c = snf.u.mul_vec(b);
    let diag = snf.diagonal();
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, ci) in c.iter().enumerate() {
        match diag.get(i) {
            Some(d) if !d.is_zero() => {
                if !ci.is_multiple_of(d) {
                    return Err(LinalgError::NoSolution);
                }
                y[i] = ci / d;
            }
            _ => {
                if !ci.is_zero() {
                    return Err(LinalgError::NoSolution);
                }
            }
        }
    }
    Ok(snf.v.mul_vec(&y))
}

/// Basis (as columns) of the integer kernel `{x : A x = 0}`.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let idx: Vec<usize> = (r..a.cols()).collect();
    snf.v.select_cols(&idx)
}

/// Inverse over the rationals, `None` when singular.
pub fn rational_inverse(a: &IntMatrix) -> Result<Option<Vec<Vec<BigRational>>>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = a.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Ok(None);
        };
        m.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[c].clone();
                for (x, y) in m[i].iter_mut().zip(pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    Ok(Some(m.into_iter().map(|row| row[n..].to_vec()).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// gcd of all k x k minors, by brute-force enumeration.
    fn determinantal_divisor(a: &IntMatrix, k: usize) -> BigInt {
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        let mut g = BigInt::zero();
        for r in subsets(a.rows(), k) {
            for c in subsets(a.cols(), k) {
                let minor = a.select_rows(&r).select_cols(&c);
                g = g.gcd(&determinant(&minor).unwrap());
            }
        }
        g
    }

    fn check_decomposition(a: &IntMatrix) {
        let d = smith_normal_form(a);
        assert_eq!(&(&d.u * a) * &d.v, d.s);
        assert!(determinant(&d.u).unwrap().abs().is_one());
        assert!(determinant(&d.v).unwrap().abs().is_one());
        assert_eq!(&d.u * &d.u_inv, IntMatrix::identity(a.rows()));
        assert_eq!(&d.v * &d.v_inv, IntMatrix::identity(a.cols()));
        let diag = d.diagonal();
        for i in 0..d.s.rows() {
            for j in 0..d.s.cols() {
                if i != j {
                    assert!(d.s.get(i, j).is_zero());
                }
            }
        }
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
    }

    #[test]
    fn snf_examples() {
        let s = smith_normal_form(&IntMatrix::from_rows(&[[2, 0], [0, 3]])).s;
        assert_eq!(s, IntMatrix::from_rows(&[[1, 0], [0, 6]]));
        assert_eq!(smith_normal_form(&IntMatrix::identity(3)).s, IntMatrix::identity(3));
        let s = smith_normal_form(&IntMatrix::from_rows(&[[2, 4], [6, 8]])).s;
        assert_eq!(s, IntMatrix::from_rows(&[[2, 0], [0, 4]]));
    }

    #[test]
    fn snf_matches_minor_gcd_oracle() {
        for a in [
            IntMatrix::from_rows(&[[2, 0], [0, 3]]),
            IntMatrix::from_rows(&[[2, 4], [6, 8]]),
            IntMatrix::from_rows(&[[4, 6, 2], [2, 8, 10], [6, 0, 4]]),
            IntMatrix::from_rows(&[[0, 0, 5], [3, 0, 0]]),
        ] {
            let diag = smith_normal_form(&a).diagonal();
            let mut prev = BigInt::one();
            for k in 1..=diag.len() {
                let dk = determinantal_divisor(&a, k);
                let expected = if dk.is_zero() { BigInt::zero() } else { &dk / &prev };
                assert_eq!(diag[k - 1], expected, "{a} at k={k}");
                if !dk.is_zero() {
                    prev = dk;
                }
            }
        }
    }

    #[test]
    fn snf_degenerate_shapes() {
        check_decomposition(&IntMatrix::zeros(0, 3));
        check_decomposition(&IntMatrix::zeros(2, 0));
        check_decomposition(&IntMatrix::zeros(2, 2));
        check_decomposition(&IntMatrix::from_rows(&[[-5]]));
        assert_eq!(smith_normal_form(&IntMatrix::from_rows(&[[-5]])).s, IntMatrix::from_rows(&[[5]]));
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&IntMatrix::identity(4)).unwrap(), BigInt::one());
        assert_eq!(determinant(&IntMatrix::from_rows(&[[1, 1], [1, 1]])).unwrap(), BigInt::zero());
        assert_eq!(determinant(&IntMatrix::from_rows(&[[2, 1], [1, 2]])).unwrap(), BigInt::from(3));
        assert_eq!(
            determinant(&IntMatrix::from_rows(&[[1, 2]])),
            Err(LinalgError::NonSquare { rows: 1, cols: 2 })
        );
        // needs a row swap
        assert_eq!(determinant(&IntMatrix::from_rows(&[[0, 1], [1, 0]])).unwrap(), BigInt::from(-1));
    }

    #[test]
    fn cokernel_examples() {
        let c = cokernel(&IntMatrix::from_rows(&[[0]]));
        assert_eq!(c.invariant_factors, big(&[0]));
        let c = cokernel(&IntMatrix::from_rows(&[[3]]));
        assert_eq!(c.invariant_factors, big(&[3]));
        let c = cokernel(&IntMatrix::from_rows(&[[2, 0], [0, 2]]));
        assert_eq!(c.invariant_factors, big(&[2, 2]));
        // more generators than relations
        let c = cokernel(&IntMatrix::from_rows(&[[2], [0]]));
        assert_eq!(c.invariant_factors, big(&[2, 0]));
        assert_eq!(&c.projection * &c.lift, IntMatrix::identity(2));
    }

    #[test]
    fn solve_examples() {
        let id = IntMatrix::identity(2);
        assert_eq!(solve_integer(&id, &big(&[5, 7])).unwrap(), big(&[5, 7]));
        assert_eq!(solve_integer(&IntMatrix::from_rows(&[[2]]), &big(&[3])), Err(LinalgError::NoSolution));
        let a = IntMatrix::from_rows(&[[2, 3]]);
        let x = solve_integer(&a, &big(&[1])).unwrap();
        assert_eq!(a.mul_vec(&x), big(&[1]));
    }

    #[test]
    fn kernel_basis_spans_kernel() {
        let a = IntMatrix::from_rows(&[[2, 4, 6], [1, 2, 3]]);
        let k = kernel_basis(&a);
        assert_eq!(k.cols(), 2);
        assert!((&a * &k).is_zero());
    }

    #[test]
    fn rational_inverse_examples() {
        let inv = rational_inverse(&IntMatrix::from_rows(&[[2, 1], [1, 2]])).unwrap().unwrap();
        let third = |n: i64| BigRational::new(n.into(), 3.into());
        assert_eq!(inv, vec![vec![third(2), third(-1)], vec![third(-1), third(2)]]);
        assert!(rational_inverse(&IntMatrix::from_rows(&[[1, 1], [1, 1]])).unwrap().is_none());
    }

    fn arb_matrix(max_dim: usize) -> impl Strategy<Value = IntMatrix> {
        (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-9i64..=9, r * c)
                .prop_map(move |v| IntMatrix::new(r, c, v.into_iter().map(BigInt::from).collect()))
        })
    }

    fn arb_square_pair(max_dim: usize) -> impl Strategy<Value = (IntMatrix, IntMatrix)> {
        (1..=max_dim).prop_flat_map(|n| {
            let m = proptest::collection::vec(-5i64..=5, n * n)
                .prop_map(move |v| IntMatrix::new(n, n, v.into_iter().map(BigInt::from).collect()));
            (m.clone(), m)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn snf_invariants(a in arb_matrix(8)) {
            check_decomposition(&a);
        }

        #[test]
        fn solve_is_sound(a in arb_matrix(5), seed in proptest::collection::vec(-4i64..=4, 5)) {
            let b: Vec<BigInt> = (0..a.rows()).map(|i| BigInt::from(seed[i % seed.len()])).collect();
            match solve_integer(&a, &b) {
                Ok(x) => prop_assert_eq!(a.mul_vec(&x), b),
                Err(e) => {
                    prop_assert_eq!(e, LinalgError::NoSolution);
                    // b lies in the image lattice iff appending it keeps the
                    // rank and the product of nonzero invariant factors
                    let nonzero = |m: &IntMatrix| -> Vec<BigInt> {
                        smith_normal_form(m).diagonal().into_iter().filter(|d| !d.is_zero()).collect()
                    };
                    let lhs = nonzero(&a);
                    let rhs = nonzero(&a.hstack(&IntMatrix::column(&b)));
                    let same = lhs.len() == rhs.len()
                        && lhs.iter().product::<BigInt>() == rhs.iter().product::<BigInt>();
                    prop_assert!(!same);
                }
            }
        }

        #[test]
        fn determinant_is_multiplicative((a, b) in arb_square_pair(5)) {
            let lhs = determinant(&(&a * &b)).unwrap();
            prop_assert_eq!(lhs, determinant(&a).unwrap() * determinant(&b).unwrap());
        }
    }
}
