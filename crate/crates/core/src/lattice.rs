//! Integer lattice algorithms on `Zⁿ`.
//!
//! Everything here runs in checked 64-bit arithmetic: an intermediate that
//! does not fit is reported as [`LatticeError::Overflow`], never wrapped.
//! The Smith normal form is the single engine behind primitivity tests,
//! completion of primitive sets to `Z`-bases, and inversion of unimodular
//! matrices.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vectors are linearly dependent (rank {rank} < {count})")]
    LinearlyDependent { rank: usize, count: usize },
    #[error("set is not primitive: elementary divisor d_{index} = {divisor}")]
    NotPrimitive { index: usize, divisor: i64 },
    #[error("matrix is not unimodular (det = {det})")]
    NotUnimodular { det: i64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("direction vector is zero")]
    ZeroDirection,
    #[error("denominator must be positive, got {0}")]
    BadDenominator(i64),
    #[error("empty vector")]
    Empty,
}

pub type Result<T> = std::result::Result<T, LatticeError>;

fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(LatticeError::Overflow("add"))
}

fn sub(a: i64, b: i64) -> Result<i64> {
    a.checked_sub(b).ok_or(LatticeError::Overflow("sub"))
}

fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(LatticeError::Overflow("mul"))
}

fn neg(a: i64) -> Result<i64> {
    a.checked_neg().ok_or(LatticeError::Overflow("neg"))
}

/// Extended Euclid on a pair: returns `(g, x, y)` with `a*x + b*y = g >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> Result<(i64, i64, i64)> {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, sub(old_r, mul(q, r)?)?);
        (old_s, s) = (s, sub(old_s, mul(q, s)?)?);
        (old_t, t) = (t, sub(old_t, mul(q, t)?)?);
    }
    if old_r < 0 {
        Ok((neg(old_r)?, neg(old_s)?, neg(old_t)?))
    } else {
        Ok((old_r, old_s, old_t))
    }
}

/// A vector in `Zⁿ`, `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntVector(Vec<i64>);

impl IntVector {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(LatticeError::Empty);
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n.max(1)])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn dot(&self, other: &IntVector) -> Result<i64> {
        self.check_dim(other)?;
        self.0
            .iter()
            .zip(&other.0)
            .try_fold(0i64, |acc, (&a, &b)| add(acc, mul(a, b)?))
    }

    fn check_dim(&self, other: &IntVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl From<IntVector> for Vec<i64> {
    fn from(v: IntVector) -> Self {
        v.0
    }
}

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(LatticeError::DimensionMismatch { expected: c, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { rows: r, cols: c, data })
    }

    /// Matrix whose columns are the given vectors (all in `Zⁿ`).
    pub fn from_columns(n: usize, cols: &[IntVector]) -> Result<Self> {
        let mut m = Self::zeros(n, cols.len());
        for (j, v) in cols.iter().enumerate() {
            if v.dim() != n {
                return Err(LatticeError::DimensionMismatch { expected: n, got: v.dim() });
            }
            for i in 0..n {
                m[(i, j)] = v.0[i];
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<i64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> IntVector {
        IntVector((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(LatticeError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0i64;
                for k in 0..self.cols {
                    acc = add(acc, mul(self[(i, k)], other[(k, j)])?)?;
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &IntVector) -> Result<IntVector> {
        if self.cols != v.dim() {
            return Err(LatticeError::DimensionMismatch { expected: self.cols, got: v.dim() });
        }
        let mut out = vec![0i64; self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            for k in 0..self.cols {
                *o = add(*o, mul(self[(i, k)], v.0[k])?)?;
            }
        }
        Ok(IntVector(out))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Exact determinant by fraction-free (Bareiss) elimination in 128-bit
    /// intermediates.
    pub fn det(&self) -> Result<i64> {
        if !self.is_square() {
            return Err(LatticeError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut a: Vec<Vec<i128>> =
            (0..n).map(|i| self.row(i).into_iter().map(i128::from).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(p) => {
                        a.swap(k, p);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[i][j]
                        .checked_mul(a[k][k])
                        .and_then(|x| a[i][k].checked_mul(a[k][j]).and_then(|y| x.checked_sub(y)))
                        .ok_or(LatticeError::Overflow("det"))?;
                    a[i][j] = v / prev;
                }
            }
            prev = a[k][k];
        }
        let d = sign * a[n - 1][n - 1];
        i64::try_from(d).map_err(|_| LatticeError::Overflow("det"))
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && matches!(self.det(), Ok(1) | Ok(-1))
    }

    /// Inverse of a unimodular matrix, read off its Smith form `U S V = I`.
    pub fn unimodular_inverse(&self) -> Result<IntMatrix> {
        let det = self.det()?;
        if det.abs() != 1 {
            return Err(LatticeError::NotUnimodular { det });
        }
        let snf = SmithDecomposition::new(self)?;
        snf.v.mul(&snf.u)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: i64) -> Result<()> {
        for j in 0..self.cols {
            let v = add(self[(dst, j)], mul(c, self[(src, j)])?)?;
            self[(dst, j)] = v;
        }
        Ok(())
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: i64) -> Result<()> {
        for i in 0..self.rows {
            let v = add(self[(i, dst)], mul(c, self[(i, src)])?)?;
            self[(i, dst)] = v;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) -> Result<()> {
        for j in 0..self.cols {
            self[(i, j)] = neg(self[(i, j)])?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `U·M·V = D` with the inverses of both transforms carried along.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithDecomposition {
    pub fn new(m: &IntMatrix) -> Result<Self> {
        let (r, c) = (m.rows, m.cols);
        let mut s = Self {
            u: IntMatrix::identity(r),
            u_inv: IntMatrix::identity(r),
            d: m.clone(),
            v: IntMatrix::identity(c),
            v_inv: IntMatrix::identity(c),
        };
        for t in 0..r.min(c) {
            if !s.pivot_to(t)? {
                break;
            }
            loop {
                s.clear_column(t)?;
                s.clear_row(t)?;
                if (t + 1..r).any(|i| s.d[(i, t)] != 0) {
                    continue;
                }
                // divisibility: any remaining entry not divisible by the pivot
                // gets its row folded into the pivot row and we go again
                let p = s.d[(t, t)];
                let bad = (t + 1..r)
                    .flat_map(|i| (t + 1..c).map(move |j| (i, j)))
                    .find(|&(i, j)| s.d[(i, j)] % p != 0);
                match bad {
                    Some((i, _)) => s.row_add(t, i, 1)?,
                    None => break,
                }
            }
            if s.d[(t, t)] < 0 {
                s.row_negate(t)?;
            }
        }
        Ok(s)
    }

    /// Diagonal entries `d_1 | d_2 | ...`, length `min(rows, cols)`.
    pub fn divisors(&self) -> Vec<i64> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)]).collect()
    }

    pub fn rank(&self) -> usize {
        self.divisors().iter().filter(|&&x| x != 0).count()
    }

    // Moves the smallest nonzero entry of the trailing block to (t,t).
    fn pivot_to(&mut self, t: usize) -> Result<bool> {
        let mut best: Option<(usize, usize, u64)> = None;
        for i in t..self.d.rows {
            for j in t..self.d.cols {
                let a = self.d[(i, j)].unsigned_abs();
                if a != 0 && best.is_none_or(|(_, _, b)| a < b) {
                    best = Some((i, j, a));
                }
            }
        }
        match best {
            None => Ok(false),
            Some((i, j, _)) => {
                self.row_swap(t, i);
                self.col_swap(t, j);
                Ok(true)
            }
        }
    }

    fn clear_column(&mut self, t: usize) -> Result<()> {
        loop {
            let mut done = true;
            for i in t + 1..self.d.rows {
                let a = self.d[(i, t)];
                if a == 0 {
                    continue;
                }
                let q = a / self.d[(t, t)];
                self.row_add(i, t, neg(q)?)?;
                if self.d[(i, t)] != 0 {
                    // remainder is smaller than the pivot: swap it in
                    self.row_swap(t, i);
                    done = false;
                }
            }
            if done {
                return Ok(());
            }
        }
    }

    fn clear_row(&mut self, t: usize) -> Result<()> {
        loop {
            let mut done = true;
            for j in t + 1..self.d.cols {
                let a = self.d[(t, j)];
                if a == 0 {
                    continue;
                }
                let q = a / self.d[(t, t)];
                self.col_add(j, t, neg(q)?)?;
                if self.d[(t, j)] != 0 {
                    self.col_swap(t, j);
                    done = false;
                }
            }
            if done {
                return Ok(());
            }
        }
    }

    fn row_swap(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn col_swap(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    fn row_add(&mut self, dst: usize, src: usize, c: i64) -> Result<()> {
        self.d.add_row(dst, src, c)?;
        self.u.add_row(dst, src, c)?;
        // (I + c E_{dst,src})^{-1} = I - c E_{dst,src}, applied on the right
        self.u_inv.add_col(src, dst, neg(c)?)
    }

    fn col_add(&mut self, dst: usize, src: usize, c: i64) -> Result<()> {
        self.d.add_col(dst, src, c)?;
        self.v.add_col(dst, src, c)?;
        self.v_inv.add_row(src, dst, neg(c)?)
    }

    fn row_negate(&mut self, i: usize) -> Result<()> {
        self.d.negate_row(i)?;
        self.u.negate_row(i)?;
        for r in 0..self.u_inv.rows {
            self.u_inv[(r, i)] = neg(self.u_inv[(r, i)])?;
        }
        Ok(())
    }
}

/// Smith normal form: unimodular `U`, `V` and diagonal `D = U·M·V` with
/// `d_i | d_{i+1}` and `d_i >= 0`.
pub fn smith_normal_form(m: &IntMatrix) -> Result<(IntMatrix, IntMatrix, IntMatrix)> {
    let s = SmithDecomposition::new(m)?;
    Ok((s.u, s.d, s.v))
}

/// Higher-dimensional Bézout identity: `g = gcd(|v_1|, ..., |v_n|)` and a
/// coefficient vector `a` with `v·a = g`.
pub fn gcd_bezout(v: &IntVector) -> Result<(i64, IntVector)> {
    let mut g = 0i64;
    let mut a = vec![0i64; v.dim()];
    for (i, &x) in v.0.iter().enumerate() {
        let (ng, s, t) = ext_gcd(g, x)?;
        if ng == g {
            continue;
        }
        for c in a.iter_mut().take(i) {
            *c = mul(*c, s)?;
        }
        a[i] = t;
        g = ng;
    }
    Ok((g, IntVector(a)))
}

fn column_matrix(vectors: &[IntVector]) -> Result<Option<IntMatrix>> {
    let Some(first) = vectors.first() else {
        return Ok(None);
    };
    IntMatrix::from_columns(first.dim(), vectors).map(Some)
}

/// `span_Z(vectors) = span_R(vectors) ∩ Zⁿ`, i.e. every elementary divisor of
/// the column matrix equals one. Rejects linearly dependent input.
pub fn is_primitive(vectors: &[IntVector]) -> Result<bool> {
    let Some(m) = column_matrix(vectors)? else {
        return Ok(true);
    };
    let snf = SmithDecomposition::new(&m)?;
    let rank = snf.rank();
    if rank < vectors.len() {
        return Err(LatticeError::LinearlyDependent { rank, count: vectors.len() });
    }
    Ok(snf.divisors().iter().all(|&d| d == 1))
}

/// Completes a primitive set `v_1..v_l` in `Zⁿ` to a `Z`-basis, returned as
/// the columns of an `n×n` unimodular matrix whose first `l` columns are the
/// inputs.
///
/// The completion is not unique; this one is `U⁻¹·diag(V⁻¹, I)` from the Smith
/// form `U·M·V = [I; 0]`, so the extra columns are `U⁻¹ e_j`.
pub fn extend_to_unimodular(n: usize, vectors: &[IntVector]) -> Result<IntMatrix> {
    let Some(m) = column_matrix(vectors)? else {
        return Ok(IntMatrix::identity(n));
    };
    if m.rows() != n {
        return Err(LatticeError::DimensionMismatch { expected: n, got: m.rows() });
    }
    let l = vectors.len();
    let snf = SmithDecomposition::new(&m)?;
    let rank = snf.rank();
    if rank < l {
        return Err(LatticeError::LinearlyDependent { rank, count: l });
    }
    if let Some((index, &divisor)) = snf.divisors().iter().enumerate().find(|(_, &d)| d != 1) {
        return Err(LatticeError::NotPrimitive { index: index + 1, divisor });
    }
    let mut block = IntMatrix::identity(n);
    for i in 0..l {
        for j in 0..l {
            block[(i, j)] = snf.v_inv[(i, j)];
        }
    }
    let mut basis = snf.u_inv.mul(&block)?;
    // the product reproduces the inputs exactly; copy them to be explicit
    for (j, v) in vectors.iter().enumerate() {
        for i in 0..n {
            debug_assert_eq!(basis[(i, j)], v.0[i]);
            basis[(i, j)] = v.0[i];
        }
    }
    Ok(basis)
}

/// Product of `steps` random elementary unimodular matrices (row additions
/// with multipliers in `[-2, 2]` and sign flips). Its leading columns form
/// a primitive set by construction.
pub fn random_unimodular<R: rand::Rng>(n: usize, steps: usize, rng: &mut R) -> Result<IntMatrix> {
    let mut m = IntMatrix::identity(n);
    if n == 1 {
        return Ok(m);
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c: i64 = rng.gen_range(-2..=2);
        let mut e = IntMatrix::identity(n);
        e[(i, j)] = c;
        if rng.gen_bool(0.1) {
            e[(i, i)] = -1;
        }
        m = m.mul(&e)?;
    }
    Ok(m)
}

/// A nonzero rational direction `numerator / denominator`, stored reduced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalDirection {
    numerator: IntVector,
    denominator: i64,
}

impl RationalDirection {
    pub fn new(numerator: IntVector, denominator: i64) -> Result<Self> {
        if denominator <= 0 {
            return Err(LatticeError::BadDenominator(denominator));
        }
        if numerator.is_zero() {
            return Err(LatticeError::ZeroDirection);
        }
        let (g, _) = gcd_bezout(&numerator)?;
        let (c, _, _) = ext_gcd(g, denominator)?;
        let numerator = IntVector(numerator.0.iter().map(|x| x / c).collect());
        Ok(Self { numerator, denominator: denominator / c })
    }

    pub fn integer(v: IntVector) -> Result<Self> {
        Self::new(v, 1)
    }

    pub fn numerator(&self) -> &IntVector {
        &self.numerator
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }
}

/// Minimal `T > 0` with `T·v ∈ Zⁿ`, the period of `t ↦ [t v]` on the torus.
pub fn direction_period(v: &RationalDirection) -> Result<Ratio<i64>> {
    let (g, _) = gcd_bezout(&v.numerator)?;
    if g == 0 {
        return Err(LatticeError::ZeroDirection);
    }
    Ok(Ratio::new(v.denominator, g))
}

/// Index map of the unitary `ψ[x] ↦ ψ[Sx]` on Fourier labels: `l ↦ Sᵀl`.
pub fn fourier_automorphism_index(s: &IntMatrix, l: &IntVector) -> Result<IntVector> {
    let det = s.det()?;
    if det.abs() != 1 {
        return Err(LatticeError::NotUnimodular { det });
    }
    s.transpose().mul_vec(l)
}
