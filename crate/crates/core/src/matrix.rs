//! Dense complex-matrix kernel.
//!
//! Everything here works on small row-major complex matrices: the largest
//! objects in practice are `d² × d²` density matrices with `d ≤ 13`, so a
//! plain `Vec` with explicit loops is both simple and fast enough.
//! Hermitian eigendecomposition is delegated to `nalgebra`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::Side;

/// Relative Hermiticity tolerance for density matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unit-trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative eigenvalue tolerated in a density matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues below this count as exact zeros in entropies.
pub const ENTROPY_CUTOFF: f64 = 1e-12;
/// Default relative tolerance of [`is_normal`].
pub const NORMAL_TOL: f64 = 1e-9;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix("matrix must be non-empty".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    /// Real matrix from row-major values.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(rows, cols, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// `‖M − M†‖_F ≤ tol · max(1, ‖M‖_F)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let mut diff = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                diff += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        diff.sqrt() <= tol * self.frobenius_norm().max(1.0)
    }

    /// True when every off-diagonal entry is below `tol` in modulus.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].norm() <= tol))
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in dst.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

/// Unit-trace positive semidefinite Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and stores the exactly-Hermitian part of `matrix`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::InvalidState("matrix is not Hermitian".into()));
        }
        let matrix = matrix.hermitian_part();
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min_eig = eigenvalues_hermitian(&matrix)[0];
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// Maximally mixed state `I/n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64) }
    }

    /// Pure state `|ψ⟩⟨ψ|`; `psi` is normalized first.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize state vector".into()));
        }
        let v: Vec<_> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&v, &v))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns).
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// `Σ λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| self.eigenvectors[(i, k)] * self.eigenvectors[(j, k)].conj() * self.eigenvalues[k])
                .sum()
        })
    }
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * rb, a.cols() * cb, |r, c| a[(r / rb, c / cb)] * b[(r % rb, c % cb)])
}

/// Reduced state after tracing out `traced` from a `dA·dB`-dimensional state.
pub fn partial_trace(rho: &DensityMatrix, d_a: usize, d_b: usize, traced: Side) -> Result<DensityMatrix> {
    if d_a == 0 || d_b == 0 || rho.dim() != d_a * d_b {
        return Err(Error::Dimension(format!(
            "state of dimension {} does not factor as {d_a} x {d_b}",
            rho.dim()
        )));
    }
    let m = rho.matrix();
    let reduced = match traced {
        Side::B => ComplexMatrix::from_fn(d_a, d_a, |i, j| (0..d_b).map(|k| m[(i * d_b + k, j * d_b + k)]).sum()),
        Side::A => ComplexMatrix::from_fn(d_b, d_b, |k, l| (0..d_a).map(|i| m[(i * d_b + k, i * d_b + l)]).sum()),
    };
    DensityMatrix::new(reduced)
}

/// Hermitian eigendecomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("eigendecomposition of a {}x{} matrix", m.rows(), m.cols())));
    }
    let eig = m.hermitian_part().to_nalgebra().symmetric_eigen();
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// Ascending eigenvalues of a matrix assumed square and Hermitian.
pub(crate) fn eigenvalues_hermitian(m: &ComplexMatrix) -> Vec<f64> {
    debug_assert!(m.is_square());
    let mut ev: Vec<f64> = if m.rows() == 2 {
        let (a, d) = (m[(0, 0)].re, m[(1, 1)].re);
        let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        let hi = mean + rad;
        // det / hi keeps full absolute accuracy on the small root
        let lo = if hi.abs() > 0.0 && mean > 0.0 { (a * d - b.norm_sqr()) / hi } else { mean - rad };
        vec![lo, hi]
    } else {
        m.hermitian_part().to_nalgebra().symmetric_eigenvalues().iter().copied().collect()
    };
    ev.sort_by(f64::total_cmp);
    ev
}

/// `−Σ λ log₂ λ` over eigenvalues, with sub-cutoff values counted as zero.
pub(crate) fn entropy_of_eigenvalues(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&x| x > ENTROPY_CUTOFF)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy in bits of an arbitrary unit-trace Hermitian matrix.
pub(crate) fn entropy_bits(m: &ComplexMatrix) -> f64 {
    entropy_of_eigenvalues(&eigenvalues_hermitian(m))
}

/// Von Neumann entropy `−tr(ρ log₂ ρ)` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_bits(rho.matrix())
}

/// `‖MM† − M†M‖_F ≤ tol · max(1, ‖M‖_F²)`.
pub fn is_normal(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("normality of a {}x{} matrix", m.rows(), m.cols())));
    }
    let adj = m.adjoint();
    let defect = (&(m * &adj) - &(&adj * m)).frobenius_norm();
    let scale = m.frobenius_norm().powi(2).max(1.0);
    Ok(defect <= tol * scale)
}

/// `‖AB − BA‖_F`.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() || (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(Error::Dimension(format!(
            "commutator of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok((&(a * b) - &(b * a)).frobenius_norm())
}
