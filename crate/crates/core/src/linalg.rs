//! Dense complex linear algebra.
//!
//! Everything here works on small row-major matrices: density matrices of a
//! single player's register, the coefficient blocks of a shared state, and
//! the state vectors themselves (as single-column matrices). The spectral
//! routines are built on a cyclic Jacobi eigensolver for Hermitian input.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default cap on simulated state size, in qubits.
pub const DEFAULT_MAX_QUBITS: usize = 14;

/// Eigenvalues whose magnitude is at most this are treated as zero by
/// [`positive_part`].
pub const ZERO_EIGENVALUE_BAND: f64 = 1e-12;

/// Tolerance used when checking that an input is Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// A dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = r(1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from complex rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| r(rows[i][j]))
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = r(v);
        }
        m
    }

    /// A column vector.
    pub fn column(entries: Vec<C64>) -> Self {
        Self { rows: entries.len(), cols: 1, data: entries }
    }

    /// The rank-one matrix `u v^dagger`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
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

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * k).collect() }
    }

    pub fn scale_c(&self, k: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * k).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |m - m^dagger|`, or infinity for a non-square matrix.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Copy of the `rows x cols` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Transpose without conjugation.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &'a Matrix) -> Matrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &'a Matrix) -> Matrix {
        self.checked_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &'a Matrix) -> Matrix {
        self.checked_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for z in self.row(i) {
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`, refusing results wider or taller than
/// `2^DEFAULT_MAX_QUBITS`.
pub fn tensor_product(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    tensor_product_capped(a, b, DEFAULT_MAX_QUBITS)
}

pub fn tensor_product_capped(a: &Matrix, b: &Matrix, max_qubits: usize) -> Result<Matrix> {
    let rows = a.rows.checked_mul(b.rows);
    let cols = a.cols.checked_mul(b.cols);
    let cap = 1usize << max_qubits.min(usize::BITS as usize - 2);
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) if r <= cap && c <= cap => (r, c),
        (r, c) => {
            let dim = r.unwrap_or(usize::MAX).max(c.unwrap_or(usize::MAX));
            let qubits = (usize::BITS - dim.saturating_sub(1).leading_zeros()) as usize;
            return Err(Error::StateTooLarge { qubits, max: max_qubits });
        }
    };
    let mut out = Matrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let s = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = s * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigensystem {
    /// Sorted in descending order.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector of `values[k]`.
    pub vectors: Matrix,
}

impl HermitianEigensystem {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.col(k)
    }

    /// `V diag(f(λ)) V^dagger`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let mut out = Matrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            let v = self.vector(k);
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.reconstruct_with(|l| l)
    }
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// The input is symmetrized as `(m + m^dagger)/2` after the Hermiticity check.
pub fn hermitian_eig(m: &Matrix) -> Result<HermitianEigensystem> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.rows;
    let mut a = Matrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = Matrix::identity(n);

    let scale = a.frobenius_norm();
    let target = 1e-15 * scale.max(f64::MIN_POSITIVE);
    let off_norm = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[(i, j)].norm_sqr();
            }
        }
        (2.0 * s).sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual: off_norm(&a) });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q, target / n as f64);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigensystem { values, vectors })
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, skip_below: f64) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag <= skip_below {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = 0.5 * (2.0 * mag).atan2(aqq - app);
    let (s, cth) = theta.sin_cos();
    let ph_conj = phase.conj();
    let n = a.rows;

    // A <- A J with J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q).
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * cth - akq * ph_conj * s;
        a[(k, q)] = akp * s + akq * ph_conj * cth;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cth - vkq * ph_conj * s;
        v[(k, q)] = vkp * s + vkq * ph_conj * cth;
    }
    // A <- J^dagger A.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * cth - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * cth;
    }
    a[(p, q)] = r(0.0);
    a[(q, p)] = r(0.0);
    a[(p, p)] = r(a[(p, p)].re);
    a[(q, q)] = r(a[(q, q)].re);
}

/// Singular values in descending order.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    let gram = &m.adjoint() * m;
    let eig = hermitian_eig(&gram)?;
    Ok(eig.values.into_iter().map(|l| l.max(0.0).sqrt()).collect())
}

/// Sum of singular values. Hermitian input takes the eigenvalue route.
pub fn trace_norm(m: &Matrix) -> Result<f64> {
    if m.is_square() && m.is_hermitian(HERMITIAN_TOL) {
        let eig = hermitian_eig(m)?;
        Ok(eig.values.iter().map(|l| l.abs()).sum())
    } else {
        Ok(singular_values(m)?.iter().sum())
    }
}

/// `Σ_{λ>0} λ v v^dagger`, dropping eigenvalues within [`ZERO_EIGENVALUE_BAND`].
pub fn positive_part(m: &Matrix) -> Result<Matrix> {
    let eig = hermitian_eig(m)?;
    Ok(eig.reconstruct_with(|l| if l > ZERO_EIGENVALUE_BAND { l } else { 0.0 }))
}

/// Projector onto the span of eigenvectors with eigenvalue above the zero band.
pub fn positive_projector(m: &Matrix) -> Result<Matrix> {
    let eig = hermitian_eig(m)?;
    Ok(eig.reconstruct_with(|l| if l > ZERO_EIGENVALUE_BAND { 1.0 } else { 0.0 }))
}

/// Smallest eigenvalue of a Hermitian matrix (0 for the empty matrix).
pub fn min_eigenvalue(m: &Matrix) -> Result<f64> {
    Ok(hermitian_eig(m)?.values.last().copied().unwrap_or(0.0))
}

/// Reduced density matrix on the qubits in `keep`.
///
/// Qubit 0 is the most significant bit of a basis index. The kept qubits
/// appear in ascending index order in the result, whatever order `keep`
/// lists them in.
pub fn partial_trace(rho: &Matrix, qubit_count: usize, keep: &[usize]) -> Result<Matrix> {
    let dim = 1usize << qubit_count;
    if rho.rows != dim || rho.cols != dim {
        return Err(Error::Dimension(format!("{}x{} matrix for {qubit_count} qubits", rho.rows, rho.cols)));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&q| q >= qubit_count) {
        return Err(Error::QubitOutOfRange { index: bad, count: qubit_count });
    }
    let traced: Vec<usize> = (0..qubit_count).filter(|q| !kept.contains(q)).collect();
    let spread = |bits: usize, qubits: &[usize]| -> usize {
        let m = qubits.len();
        qubits
            .iter()
            .enumerate()
            .filter(|(k, _)| bits >> (m - 1 - k) & 1 == 1)
            .map(|(_, &q)| 1usize << (qubit_count - 1 - q))
            .sum()
    };
    let kd = 1usize << kept.len();
    let kept_offsets: Vec<usize> = (0..kd).map(|b| spread(b, &kept)).collect();
    let traced_offsets: Vec<usize> = (0..1usize << traced.len()).map(|b| spread(b, &traced)).collect();
    let mut out = Matrix::zeros(kd, kd);
    for (i, &oi) in kept_offsets.iter().enumerate() {
        for (j, &oj) in kept_offsets.iter().enumerate() {
            out[(i, j)] = traced_offsets.iter().map(|&t| rho[(oi | t, oj | t)]).sum();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn pauli_x() -> Matrix {
        Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    #[test]
    fn kron_identity_and_basis() {
        assert_eq!(tensor_product(&Matrix::identity(2), &Matrix::identity(2)).unwrap(), Matrix::identity(4));
        let k0 = Matrix::column(vec![r(1.0), r(0.0)]);
        let k1 = Matrix::column(vec![r(0.0), r(1.0)]);
        let k01 = tensor_product(&k0, &k1).unwrap();
        assert_eq!(k01.data(), &[r(0.0), r(1.0), r(0.0), r(0.0)]);
    }

    #[test]
    fn hadamard_on_first_qubit() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = Matrix::from_real_rows(&[&[s, s], &[s, -s]]);
        let hi = tensor_product(&h, &Matrix::identity(2)).unwrap();
        let ket00 = Matrix::column(vec![r(1.0), r(0.0), r(0.0), r(0.0)]);
        let out = &hi * &ket00;
        let expect = [s, 0.0, s, 0.0];
        for (z, e) in out.data().iter().zip(expect) {
            assert!(close(z.re, e, 1e-15) && z.im == 0.0);
        }
    }

    #[test]
    fn kron_refuses_oversized_result() {
        let v = Matrix::column(vec![r(1.0); 1 << 8]);
        let err = tensor_product_capped(&v, &v, 14).unwrap_err();
        assert_eq!(err, Error::StateTooLarge { qubits: 16, max: 14 });
    }

    #[test]
    fn eig_diagonal_and_pauli() {
        let e = hermitian_eig(&Matrix::diag(&[3.0, -1.0])).unwrap();
        assert_eq!(e.values, vec![3.0, -1.0]);
        let e = hermitian_eig(&pauli_x()).unwrap();
        assert!(close(e.values[0], 1.0, 1e-14) && close(e.values[1], -1.0, 1e-14));
    }

    #[test]
    fn eig_naive_state_operator() {
        // (1/3)ρ − (2/3)σ for ρ = |1⟩⟨1|, σ = |+⟩⟨+|; roots of λ² + λ/3 − 1/9.
        let m = Matrix::from_real_rows(&[&[-1.0 / 3.0, -1.0 / 3.0], &[-1.0 / 3.0, 0.0]]);
        let e = hermitian_eig(&m).unwrap();
        let s5 = 5f64.sqrt();
        assert!(close(e.values[0], (-1.0 + s5) / 6.0, 1e-14));
        assert!(close(e.values[1], (-1.0 - s5) / 6.0, 1e-14));
        assert!(close(trace_norm(&m).unwrap(), s5 / 3.0, 1e-14));
    }

    #[test]
    fn eig_rejects_non_hermitian_and_non_square() {
        let m = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
        assert!(matches!(hermitian_eig(&Matrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn trace_norm_basics() {
        assert_eq!(trace_norm(&Matrix::zeros(3, 3)).unwrap(), 0.0);
        assert!(close(trace_norm(&Matrix::identity(2)).unwrap(), 2.0, 1e-15));
        // Non-Hermitian: nilpotent shift has singular values {1, 0}.
        let m = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(close(trace_norm(&m).unwrap(), 1.0, 1e-14));
    }

    #[test]
    fn positive_part_examples() {
        let p = positive_part(&Matrix::diag(&[1.0, -2.0])).unwrap();
        assert!((&p - &Matrix::diag(&[1.0, 0.0])).max_abs() < 1e-15);
        assert_eq!(positive_part(&Matrix::zeros(2, 2)).unwrap(), Matrix::zeros(2, 2));
        let p = positive_part(&pauli_x()).unwrap();
        let half = Matrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!((&p - &half).max_abs() < 1e-14);
        assert!(positive_part(&Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let k0 = [r(1.0), r(0.0)];
        let k1 = [r(0.0), r(1.0)];
        let prod = tensor_product(&Matrix::outer(&k0, &k0), &Matrix::outer(&k1, &k1)).unwrap();
        assert_eq!(partial_trace(&prod, 2, &[0]).unwrap(), Matrix::outer(&k0, &k0));
        assert_eq!(partial_trace(&prod, 2, &[1]).unwrap(), Matrix::outer(&k1, &k1));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = [r(s), r(0.0), r(0.0), r(s)];
        let rho = Matrix::outer(&bell, &bell);
        let red = partial_trace(&rho, 2, &[0]).unwrap();
        assert!((&red - &Matrix::diag(&[0.5, 0.5])).max_abs() < 1e-15);

        let t = 1.0 / 3f64.sqrt();
        let naive = [r(0.0), r(t), r(t), r(t)];
        let red = partial_trace(&Matrix::outer(&naive, &naive), 2, &[0]).unwrap();
        // ψ₀₁ψ₁₁* survives the trace, so the reduced state is not diagonal.
        let third = 1.0 / 3.0;
        let expect = Matrix::from_real_rows(&[&[third, third], &[third, 2.0 * third]]);
        assert!((&red - &expect).max_abs() < 1e-15);

        assert!(matches!(partial_trace(&rho, 2, &[2]), Err(Error::QubitOutOfRange { index: 2, count: 2 })));
    }
}
