//! Dense complex linear algebra for register sizes up to six qubits.
//!
//! Matrices are stored row-major. Qubit 0 is the most significant bit of a
//! computational-basis index, so `|q0 q1 ... q(n-1)>` maps to
//! `q0 * 2^(n-1) + ... + q(n-1)`.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register the linear-algebra layer is sized for.
pub const MAX_QUBITS: usize = 6;

/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as numerical drift and set to zero.
pub const PSD_CLAMP: f64 = 1e-10;

/// Eigenvalues below `-PSD_REJECT` mean the input was not positive semidefinite.
pub const PSD_REJECT: f64 = 1e-8;

/// Hermiticity tolerance accepted by [`herm_eig`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for col in 0..self.cols {
                let z = self[(r, col)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting bad shapes and non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty matrix {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::default(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(1.0, 0.0);
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = c(d, 0.0);
        }
        m
    }

    /// `|v><v|` for a column vector `v`.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn pauli_x() -> Self {
        let z = Complex64::default();
        let one = c(1.0, 0.0);
        Self::new(2, 2, vec![z, one, one, z]).expect("static shape")
    }

    pub fn pauli_y() -> Self {
        let z = Complex64::default();
        Self::new(2, 2, vec![z, c(0.0, -1.0), c(0.0, 1.0), z]).expect("static shape")
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diag(&[1.0, -1.0])
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

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul inner dimensions");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::default() {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self^dagger`.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    fn hermitian_part(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] = c(self[(i, i)].re, 0.0);
            for j in i + 1..self.cols {
                let avg = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                out[(i, j)] = avg;
                out[(j, i)] = avg.conj();
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let s = a[(ai, aj)];
            for bi in 0..b.rows {
                for bj in 0..b.cols {
                    out[(ai * b.rows + bi, aj * b.cols + bj)] = s * b[(bi, bj)];
                }
            }
        }
    }
    out
}

/// Number of qubits `n` with `2^n == dim`, if `dim` is a power of two.
pub fn qubits_for_dim(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}

/// Reduces an `n_qubits` operator to the qubits listed in `keep` (sorted, distinct).
pub fn partial_trace(
    rho: &ComplexMatrix,
    n_qubits: usize,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    if !rho.is_square() {
        return Err(Error::Dimension(format!(
            "partial trace of a {}x{} matrix",
            rho.rows, rho.cols
        )));
    }
    match qubits_for_dim(rho.rows) {
        Some(n) if n == n_qubits => {}
        _ => {
            return Err(Error::Dimension(format!(
                "matrix dimension {} is not 2^{n_qubits}",
                rho.rows
            )))
        }
    }
    if keep.is_empty() {
        return Err(Error::Dimension(
            "partial trace must keep at least one qubit".into(),
        ));
    }
    if let Some(&index) = keep.iter().find(|&&q| q >= n_qubits) {
        return Err(Error::QubitIndex { index, n_qubits });
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Dimension(format!(
            "kept qubit list {keep:?} must be sorted and distinct"
        )));
    }

    let traced: Vec<usize> = (0..n_qubits).filter(|q| !keep.contains(q)).collect();
    let bit = |q: usize| 1usize << (n_qubits - 1 - q);
    let embed = |sub: usize, qubits: &[usize]| -> usize {
        let k = qubits.len();
        qubits
            .iter()
            .enumerate()
            .filter(|(pos, _)| sub & (1 << (k - 1 - pos)) != 0)
            .map(|(_, &q)| bit(q))
            .sum()
    };

    let kd = 1usize << keep.len();
    let td = 1usize << traced.len();
    let kept_idx: Vec<usize> = (0..kd).map(|s| embed(s, keep)).collect();
    let traced_idx: Vec<usize> = (0..td).map(|s| embed(s, &traced)).collect();

    let mut out = ComplexMatrix::zeros(kd, kd);
    for (i, &ki) in kept_idx.iter().enumerate() {
        for (j, &kj) in kept_idx.iter().enumerate() {
            out[(i, j)] = traced_idx.iter().map(|&t| rho[(ki | t, kj | t)]).sum();
        }
    }
    Ok(out)
}

/// Spectrum and eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Sorted in descending order.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }

    /// `V diag(f(λ)) V^dagger`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::default();
                for (k, &lk) in fl.iter().enumerate() {
                    if lk != 0.0 {
                        acc += v[(i, k)] * v[(j, k)].conj() * lk;
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

/// Cyclic complex Jacobi eigendecomposition of a Hermitian matrix.
pub fn herm_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eig of a {}x{} matrix",
            a.rows, a.cols
        )));
    }
    let herm_err = a.hermiticity_error();
    if herm_err > HERMITIAN_TOL {
        return Err(Error::NotHermitian(herm_err));
    }
    let n = a.rows;
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let scale = m.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut converged = n == 1 || scale == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(sweeps));
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        converged = off <= 1e-15 * scale || off < f64::MIN_POSITIVE;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, dst)] = v[(i, src)];
        }
    }
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Zeroes `m[p][q]` with a unitary two-plane rotation `J`: `m <- J^† m J`, `v <- v J`.
fn jacobi_rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = m[(p, q)];
    let beta = b.norm();
    if beta == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Phase-align the off-diagonal entry, then apply a real Jacobi rotation.
    let phase = b / beta;
    let zeta = (aqq - app) / (2.0 * beta);
    let t = if zeta.is_infinite() {
        0.5 / zeta
    } else {
        zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;
    let ph_conj = phase.conj();

    // J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on the (p, q) plane.
    let jpp = c(cs, 0.0);
    let jpq = c(sn, 0.0);
    let jqp = ph_conj * (-sn);
    let jqq = ph_conj * cs;

    let n = m.rows;
    for i in 0..n {
        let mp = m[(i, p)];
        let mq = m[(i, q)];
        m[(i, p)] = mp * jpp + mq * jqp;
        m[(i, q)] = mp * jpq + mq * jqq;
        let vp = v[(i, p)];
        let vq = v[(i, q)];
        v[(i, p)] = vp * jpp + vq * jqp;
        v[(i, q)] = vp * jpq + vq * jqq;
    }
    for j in 0..n {
        let mp = m[(p, j)];
        let mq = m[(q, j)];
        m[(p, j)] = jpp.conj() * mp + jqp.conj() * mq;
        m[(q, j)] = jpq.conj() * mp + jqq.conj() * mq;
    }
    m[(p, q)] = Complex64::default();
    m[(q, p)] = Complex64::default();
    m[(p, p)] = c(m[(p, p)].re, 0.0);
    m[(q, q)] = c(m[(q, q)].re, 0.0);
}

/// Clamps drift in `[-PSD_CLAMP, 0)` to zero; leaves everything else alone.
#[inline]
pub fn clamp_eigenvalue(l: f64) -> f64 {
    if (-PSD_CLAMP..0.0).contains(&l) {
        0.0
    } else {
        l
    }
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(a)?;
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -PSD_REJECT {
        return Err(Error::NotPsd(min));
    }
    Ok(eig.reconstruct_with(|l| l.max(0.0).sqrt()))
}

/// `σy⊗σy · conj(ρ) · σy⊗σy` for a two-qubit operator.
pub fn spin_flip(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.rows != 4 || rho.cols != 4 {
        return Err(Error::Dimension(format!(
            "spin flip needs a 4x4 matrix, got {}x{}",
            rho.rows, rho.cols
        )));
    }
    // σy⊗σy is real and anti-diagonal with entries (-1, 1, 1, -1) from the top-right,
    // so conjugation permutes indices i -> 3 - i and multiplies by the sign product.
    let sign = [-1.0, 1.0, 1.0, -1.0];
    let mut out = ComplexMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            out[(i, j)] = rho[(3 - i, 3 - j)].conj() * (sign[i] * sign[j]);
        }
    }
    Ok(out)
}
