//! Dense real and split-complex matrices.
//!
//! [`RealMatrix`] stores its entries in row-major order. A complex matrix is
//! kept as a pair of real matrices of equal shape ([`SplitComplexMatrix`]),
//! so every complex operation here is written in terms of real blocks.
//!
//! Kernels never reject non-finite entries; NaN and infinity propagate so
//! that divergence stays observable to the caller. The one exception is
//! [`pinv`], whose SVD requires finite input.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    /// Builds a matrix from row-major data.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                op: "RealMatrix::new",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from a slice of equally long rows.
    ///
    /// Panics if the rows are ragged; intended for literal data.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|v| k * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Shape {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &RealVector) -> Result<RealVector> {
        if self.cols != v.len() {
            return Err(Error::Shape {
                op: "matvec",
                left: self.shape(),
                right: (v.len(), 1),
            });
        }
        Ok(RealVector(
            self.data
                .chunks_exact(self.cols.max(1))
                .take(self.rows)
                .map(|row| row.iter().zip(v.as_slice()).map(|(a, b)| a * b).sum())
                .collect(),
        ))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = other.shape();
        Self::from_fn(self.rows * p, self.cols * q, |r, c| {
            self.get(r / p, c / q) * other.get(r % p, c % q)
        })
    }

    /// Assembles `[[a, b], [c, d]]` from four blocks of equal shape.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        let shape = a.shape();
        for blk in [b, c, d] {
            if blk.shape() != shape {
                return Err(Error::Shape {
                    op: "from_blocks",
                    left: shape,
                    right: blk.shape(),
                });
            }
        }
        let (r, k) = shape;
        Ok(Self::from_fn(2 * r, 2 * k, |i, j| {
            let blk = match (i < r, j < k) {
                (true, true) => a,
                (true, false) => b,
                (false, true) => c,
                (false, false) => d,
            };
            blk.get(i % r, j % k)
        }))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest absolute entrywise difference; shapes must agree.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.data.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
    }
}

/// Dense real column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct RealVector(pub Vec<f64>);

impl RealVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Shape {
                op,
                left: (self.len(), 1),
                right: (other.len(), 1),
            });
        }
        Ok(Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "vector add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "vector sub", |a, b| a - b)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self(self.0.iter().map(|v| k * v).collect())
    }

    /// `self + k * other`
    pub fn axpy(&self, k: f64, other: &Self) -> Result<Self> {
        self.zip_with(other, "axpy", |a, b| a + k * b)
    }

    /// Stacks `top` above `bottom`.
    pub fn stack(top: &Self, bottom: &Self) -> Self {
        let mut v = Vec::with_capacity(top.len() + bottom.len());
        v.extend_from_slice(&top.0);
        v.extend_from_slice(&bottom.0);
        Self(v)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl From<Vec<f64>> for RealVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Complex matrix held as its real part and imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitComplexMatrix {
    pub re: RealMatrix,
    pub im: RealMatrix,
}

impl SplitComplexMatrix {
    pub fn new(re: RealMatrix, im: RealMatrix) -> Result<Self> {
        if re.shape() != im.shape() {
            return Err(Error::Shape {
                op: "SplitComplexMatrix::new",
                left: re.shape(),
                right: im.shape(),
            });
        }
        Ok(Self { re, im })
    }

    pub fn from_real(re: RealMatrix) -> Self {
        let im = RealMatrix::zeros(re.rows(), re.cols());
        Self { re, im }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            re: RealMatrix::zeros(rows, cols),
            im: RealMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_real(RealMatrix::identity(n))
    }

    pub fn rows(&self) -> usize {
        self.re.rows()
    }

    pub fn cols(&self) -> usize {
        self.re.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.re.shape()
    }

    /// Entry `(r, c)` as a `(re, im)` pair.
    pub fn get(&self, r: usize, c: usize) -> (f64, f64) {
        (self.re.get(r, c), self.im.get(r, c))
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            re: self.re.add(&other.re)?,
            im: self.im.add(&other.im)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            re: self.re.sub(&other.re)?,
            im: self.im.sub(&other.im)?,
        })
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            re: self.re.scale(k),
            im: self.im.scale(k),
        }
    }

    /// Multiplies every entry by the complex scalar `re + i im`.
    pub fn scale_complex(&self, re: f64, im: f64) -> Self {
        Self {
            re: self
                .re
                .zip_with(&self.im, "scale_complex", |a, b| re * a - im * b)
                .unwrap(),
            im: self
                .re
                .zip_with(&self.im, "scale_complex", |a, b| re * b + im * a)
                .unwrap(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        complex_matmul(self, other)
    }

    pub fn conjugate(&self) -> Self {
        conjugate(self)
    }

    pub fn transpose(&self) -> Self {
        Self {
            re: self.re.transpose(),
            im: self.im.transpose(),
        }
    }

    pub fn hermitian_transpose(&self) -> Self {
        Self {
            re: self.re.transpose(),
            im: self.im.transpose().scale(-1.0),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius_norm(self)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self
            .re
            .max_abs_diff(&other.re)?
            .max(self.im.max_abs_diff(&other.im)?))
    }
}

/// Complex product `a · b` in split form.
pub fn complex_matmul(
    a: &SplitComplexMatrix,
    b: &SplitComplexMatrix,
) -> Result<SplitComplexMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::Shape {
            op: "complex_matmul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let re = a.re.matmul(&b.re)?.sub(&a.im.matmul(&b.im)?)?;
    let im = a.re.matmul(&b.im)?.add(&a.im.matmul(&b.re)?)?;
    Ok(SplitComplexMatrix { re, im })
}

/// Entrywise complex conjugate.
pub fn conjugate(m: &SplitComplexMatrix) -> SplitComplexMatrix {
    SplitComplexMatrix {
        re: m.re.clone(),
        im: m.im.scale(-1.0),
    }
}

/// Column-major stacking of a real matrix: entry `(s, t)` lands at `t * rows + s`.
pub fn vec_real(m: &RealMatrix) -> RealVector {
    let (rows, cols) = m.shape();
    let mut out = Vec::with_capacity(rows * cols);
    for c in 0..cols {
        for r in 0..rows {
            out.push(m.get(r, c));
        }
    }
    RealVector(out)
}

/// Inverse of [`vec_real`].
pub fn unvec_real(v: &[f64], rows: usize, cols: usize) -> Result<RealMatrix> {
    if v.len() != rows * cols {
        return Err(Error::Shape {
            op: "unvec",
            left: (v.len(), 1),
            right: (rows, cols),
        });
    }
    Ok(RealMatrix::from_fn(rows, cols, |r, c| v[c * rows + r]))
}

/// Column-stacking `vec` of a complex matrix, returned as an `rows*cols × 1` matrix.
pub fn vec(m: &SplitComplexMatrix) -> SplitComplexMatrix {
    let n = m.rows() * m.cols();
    SplitComplexMatrix {
        re: RealMatrix::new(n, 1, vec_real(&m.re).0).unwrap(),
        im: RealMatrix::new(n, 1, vec_real(&m.im).0).unwrap(),
    }
}

/// Reshapes a complex column back into a `rows × cols` matrix.
pub fn unvec(v: &SplitComplexMatrix, rows: usize, cols: usize) -> Result<SplitComplexMatrix> {
    if v.cols() != 1 {
        return Err(Error::Shape {
            op: "unvec",
            left: v.shape(),
            right: (rows * cols, 1),
        });
    }
    Ok(SplitComplexMatrix {
        re: unvec_real(v.re.as_slice(), rows, cols)?,
        im: unvec_real(v.im.as_slice(), rows, cols)?,
    })
}

/// Complex Kronecker product `a ⊗ b`.
pub fn kron(a: &SplitComplexMatrix, b: &SplitComplexMatrix) -> SplitComplexMatrix {
    let re = a.re.kron(&b.re).sub(&a.im.kron(&b.im)).unwrap();
    let im = a.re.kron(&b.im).add(&a.im.kron(&b.re)).unwrap();
    SplitComplexMatrix { re, im }
}

/// Frobenius norm over both parts. NaN and infinity propagate.
pub fn frobenius_norm(m: &SplitComplexMatrix) -> f64 {
    m.re.as_slice()
        .iter()
        .chain(m.im.as_slice())
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}

/// Relative singular-value cutoff used when none is supplied.
pub fn default_pinv_tolerance(rows: usize, cols: usize) -> f64 {
    f64::EPSILON * rows.max(cols) as f64
}

/// Maximum one-sided Jacobi sweeps before [`pinv`] reports non-convergence.
const MAX_JACOBI_SWEEPS: usize = 80;

type Columns = Vec<Vec<f64>>;

/// Thin SVD of a tall matrix by one-sided Jacobi rotations.
///
/// Returns `(B, V)` with `W V = B`, the columns of `B` mutually orthogonal
/// and `V` orthogonal, so the singular values are the column norms of `B`.
/// Both are returned column-major (`B[k]` is column `k`).
fn jacobi_svd(w: &RealMatrix) -> Option<(Columns, Columns)> {
    let (rows, cols) = w.shape();
    debug_assert!(rows >= cols);
    let mut b: Vec<Vec<f64>> = (0..cols)
        .map(|c| (0..rows).map(|r| w.get(r, c)).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|c| (0..cols).map(|r| f64::from(u8::from(r == c))).collect())
        .collect();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let threshold = rows as f64 * f64::EPSILON;

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = dot(&b[p], &b[p]);
                let beta = dot(&b[q], &b[q]);
                let gamma = dot(&b[p], &b[q]);
                if gamma == 0.0 || gamma.abs() <= threshold * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for cols_of in [&mut b, &mut v] {
                    let (lo, hi) = cols_of.split_at_mut(q);
                    for (xp, xq) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                        let (a, bq) = (*xp, *xq);
                        *xp = c * a - s * bq;
                        *xq = s * a + c * bq;
                    }
                }
            }
        }
        if !rotated {
            return Some((b, v));
        }
    }
    None
}

/// Moore–Penrose pseudo-inverse through an SVD.
///
/// Singular values at or below `tolerance * σ_max` are treated as zero.
pub fn pinv(w: &RealMatrix, tolerance: f64) -> Result<RealMatrix> {
    let (rows, cols) = w.shape();
    if rows < cols {
        return Ok(pinv(&w.transpose(), tolerance)?.transpose());
    }
    if !w.is_finite() {
        return Err(Error::Numeric {
            op: "pinv",
            detail: format!("{rows}x{cols} input has non-finite entries"),
        });
    }
    let (b, v) = jacobi_svd(w).ok_or_else(|| Error::Numeric {
        op: "pinv",
        detail: format!(
            "SVD did not converge in {MAX_JACOBI_SWEEPS} sweeps for {rows}x{cols} matrix with Frobenius norm {:e}",
            w.frobenius_norm()
        ),
    })?;
    let sigma: Vec<f64> = b
        .iter()
        .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let sigma_max = sigma.iter().fold(0.0_f64, |m, &s| m.max(s));
    let cutoff = tolerance * sigma_max;

    // W⁺ = Σ_k v_k u_kᵀ / σ_k, and b_k = σ_k u_k
    let mut out = RealMatrix::zeros(cols, rows);
    for (k, &s) in sigma.iter().enumerate() {
        if s == 0.0 || s <= cutoff {
            continue;
        }
        let inv2 = 1.0 / (s * s);
        for (i, &vi) in v[k].iter().enumerate() {
            let vik = vi * inv2;
            if vik == 0.0 {
                continue;
            }
            let row = &mut out.data[i * rows..(i + 1) * rows];
            for (dst, &bj) in row.iter_mut().zip(&b[k]) {
                *dst += vik * bj;
            }
        }
    }
    Ok(out)
}
