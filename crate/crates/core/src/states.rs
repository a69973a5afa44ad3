//! State families: circulant states and the symmetric and Bell-diagonal
//! families that live inside them.
//!
//! Index convention: the entry `a⁽ⁿ⁾_{ij}` couples the product basis vector
//! `e_i ⊗ e_{i+n}` (row) with `e_j ⊗ e_{j+n}` (column), all indices mod `d`.
//! In the flattened `d² × d²` matrix that is row `i·d + (i+n mod d)`,
//! column `j·d + (j+n mod d)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{eigenvalues_hermitian, ComplexMatrix, DensityMatrix, HERMITIAN_TOL, ONE, PSD_TOL, TRACE_TOL, ZERO};

/// Threshold below which a state counts as block diagonal over the sectors `Σ_n`.
pub const CIRCULANT_TOL: f64 = 1e-10;
/// Normalization tolerance for probability weights.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Powers `λ^k`, `k = 0..d`, of `λ = exp(2πi/d)`. Index exponents mod `d`.
pub fn roots_of_unity(d: usize) -> Vec<Complex64> {
    (0..d).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64)).collect()
}

/// Sector `n` of the product basis vector `e_i ⊗ e_k`, i.e. `k − i mod d`.
#[inline]
pub fn sector(i: usize, k: usize, d: usize) -> usize {
    (k + d - i) % d
}

/// Flattened index of `e_i ⊗ e_{i+n}`.
#[inline]
pub(crate) fn sector_index(i: usize, n: usize, d: usize) -> usize {
    i * d + (i + n) % d
}

/// Cyclic shift `S e_n = e_{n+1 mod d}`.
pub fn shift_operator(d: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::Dimension(format!("shift operator needs d >= 2, got {d}")));
    }
    Ok(ComplexMatrix::from_fn(d, d, |r, c| if r == (c + 1) % d { ONE } else { ZERO }))
}

/// Flip operator `F = Σ e_ij ⊗ e_ji`.
pub fn flip_operator(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d * d, d * d, |r, c| if r / d == c % d && r % d == c / d { ONE } else { ZERO })
}

/// Maximally entangled projector `P⁺_d`.
pub fn maximally_entangled(d: usize) -> DensityMatrix {
    let mut psi = vec![ZERO; d * d];
    for i in 0..d {
        psi[i * d + i] = ONE;
    }
    DensityMatrix::pure(&psi).expect("non-zero vector")
}

fn check_psd(m: &ComplexMatrix, what: &str) -> Result<()> {
    if !m.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::InvalidSpec(format!("{what} is not Hermitian")));
    }
    let min = eigenvalues_hermitian(m)[0];
    if min < -PSD_TOL {
        return Err(Error::InvalidSpec(format!("{what} has negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

/// The `d` coefficient matrices of a circulant state.
#[derive(Clone, Debug, PartialEq)]
pub struct CirculantSpec {
    d: usize,
    a: Vec<ComplexMatrix>,
}

impl CirculantSpec {
    /// Checks that every `a⁽ⁿ⁾` is a `d × d` PSD matrix and the traces sum to one.
    pub fn new(d: usize, a: Vec<ComplexMatrix>) -> Result<Self> {
        if d < 2 {
            return Err(Error::Dimension(format!("circulant states need d >= 2, got {d}")));
        }
        if a.len() != d {
            return Err(Error::Dimension(format!("expected {d} coefficient matrices, got {}", a.len())));
        }
        for (n, m) in a.iter().enumerate() {
            if (m.rows(), m.cols()) != (d, d) {
                return Err(Error::Dimension(format!("a^({n}) is {}x{}, expected {d}x{d}", m.rows(), m.cols())));
            }
            check_psd(m, &format!("a^({n})"))?;
        }
        let total: f64 = a.iter().map(|m| m.trace().re).sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidSpec(format!("coefficient traces sum to {total}, expected 1")));
        }
        let a = a.into_iter().map(|m| m.hermitian_part()).collect();
        Ok(Self { d, a })
    }

    /// Rescales the matrices so their traces sum to one, then validates.
    pub fn normalized(d: usize, a: Vec<ComplexMatrix>) -> Result<Self> {
        let total: f64 = a.iter().map(|m| m.trace().re).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidSpec(format!("cannot normalize total trace {total}")));
        }
        Self::new(d, a.into_iter().map(|m| m.scale_real(1.0 / total)).collect())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// The matrix `a⁽ⁿ⁾`.
    pub fn coefficient(&self, n: usize) -> &ComplexMatrix {
        &self.a[n]
    }

    pub fn coefficients(&self) -> &[ComplexMatrix] {
        &self.a
    }

    /// True when every `a⁽ⁿ⁾` is diagonal, i.e. the state is diagonal in the product basis.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.a.iter().all(|m| m.is_diagonal(tol))
    }

    /// Assembles the dense `d² × d²` matrix without validation.
    pub(crate) fn assemble(&self) -> ComplexMatrix {
        let d = self.d;
        let mut rho = ComplexMatrix::zeros(d * d, d * d);
        for (n, a) in self.a.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    rho[(sector_index(i, n, d), sector_index(j, n, d))] = a[(i, j)];
                }
            }
        }
        rho
    }
}

/// Dense density matrix of a circulant state.
pub fn circulant_state(spec: &CirculantSpec) -> Result<DensityMatrix> {
    DensityMatrix::new(spec.assemble()).map_err(|e| Error::InvalidSpec(e.to_string()))
}

/// Extracts the coefficient matrices of `rho` if it is block diagonal over the sectors.
pub fn project_circulant(rho: &DensityMatrix, d: usize) -> Result<CirculantSpec> {
    if d < 2 || rho.dim() != d * d {
        return Err(Error::Dimension(format!("state of dimension {} is not {d}x{d}", rho.dim())));
    }
    let m = rho.matrix();
    let mut residual = 0.0;
    for r in 0..d * d {
        for c in 0..d * d {
            if sector(r / d, r % d, d) != sector(c / d, c % d, d) {
                residual += m[(r, c)].norm_sqr();
            }
        }
    }
    let residual = residual.sqrt();
    if residual > CIRCULANT_TOL {
        return Err(Error::NotCirculant { residual });
    }
    let a = (0..d)
        .map(|n| ComplexMatrix::from_fn(d, d, |i, j| m[(sector_index(i, n, d), sector_index(j, n, d))]))
        .collect();
    CirculantSpec::new(d, a)
}

/// Probability weights `p_{mn}` of a Bell-diagonal state.
#[derive(Clone, Debug, PartialEq)]
pub struct BellWeights {
    d: usize,
    p: Vec<f64>,
}

impl BellWeights {
    /// `rows[m][n] = p_{mn}`.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.len();
        if d < 2 {
            return Err(Error::Dimension(format!("Bell weights need d >= 2, got {d}")));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::Dimension(format!("weight row of length {}, expected {d}", bad.len())));
        }
        let p: Vec<f64> = rows.into_iter().flatten().collect();
        if let Some(x) = p.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidSpec(format!("weight {x} is not a probability")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidSpec(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { d, p })
    }

    /// Weights `p_{ik} = π_{i + kα mod d}`; `π` must sum to `1/d`.
    pub fn classical(d: usize, alpha: usize, pi: &[f64]) -> Result<Self> {
        if pi.len() != d {
            return Err(Error::Dimension(format!("pi has {} entries, expected {d}", pi.len())));
        }
        if alpha >= d {
            return Err(Error::Index(format!("alpha = {alpha} must be below d = {d}")));
        }
        let total: f64 = pi.iter().sum();
        if (total - 1.0 / d as f64).abs() > WEIGHT_TOL {
            return Err(Error::InvalidSpec(format!("pi sums to {total}, expected 1/{d}")));
        }
        Self::new((0..d).map(|i| (0..d).map(|k| pi[(i + k * alpha) % d]).collect()).collect())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.p[m * self.d + n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.p.chunks(self.d).map(<[f64]>::to_vec).collect()
    }
}

/// Projector `P_{mn} = (I ⊗ U_{mn}) P⁺ (I ⊗ U_{mn}†)` with `U_{mn} e_k = λ^{mk} e_{k+n}`.
pub fn bell_projector(m: usize, n: usize, d: usize) -> Result<DensityMatrix> {
    if m >= d || n >= d {
        return Err(Error::Index(format!("Bell index ({m}, {n}) out of range for d = {d}")));
    }
    let roots = roots_of_unity(d);
    let mut psi = vec![ZERO; d * d];
    for k in 0..d {
        psi[sector_index(k, n, d)] = roots[(m * k) % d];
    }
    DensityMatrix::pure(&psi)
}

/// Circulant coefficients `a⁽ⁿ⁾_{ij} = (1/d) Σ_m p_{mn} λ^{m(i−j)}` of a Bell-diagonal state.
pub fn bell_diagonal_state(w: &BellWeights) -> Result<CirculantSpec> {
    let d = w.d();
    let roots = roots_of_unity(d);
    let a = (0..d)
        .map(|n| {
            ComplexMatrix::from_fn(d, d, |i, j| {
                let diff = (i + d - j) % d;
                (0..d).map(|m| roots[(m * diff) % d] * w.get(m, n)).sum::<Complex64>() / d as f64
            })
        })
        .collect();
    CirculantSpec::new(d, a)
}

/// Werner state `((1−λ)/d²) I⊗I + (λ/d) F`.
///
/// The flip operator pairs `e_i ⊗ e_j` with `e_j ⊗ e_i`, which lie in
/// sectors `j−i` and `i−j`; those coincide only for `d = 2`, so the state is
/// circulant only for `d = 2` or `λ = 0` and is built densely here.
/// Use [`project_circulant`] to obtain coefficients where they exist.
pub fn werner_state(d: usize, lambda: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::Dimension(format!("Werner state needs d >= 2, got {d}")));
    }
    if !lambda.is_finite() {
        return Err(Error::InvalidSpec(format!("lambda = {lambda}")));
    }
    let df = d as f64;
    let id = ComplexMatrix::identity(d * d).scale_real((1.0 - lambda) / (df * df));
    let rho = &id + &flip_operator(d).scale_real(lambda / df);
    DensityMatrix::new(rho).map_err(|e| Error::InvalidSpec(format!("Werner state at lambda = {lambda}: {e}")))
}

/// Isotropic state `((1−λ)/d²) I⊗I + λ P⁺_d`.
pub fn isotropic_state(d: usize, lambda: f64) -> Result<CirculantSpec> {
    if d < 2 {
        return Err(Error::Dimension(format!("isotropic state needs d >= 2, got {d}")));
    }
    if !lambda.is_finite() {
        return Err(Error::InvalidSpec(format!("lambda = {lambda}")));
    }
    let df = d as f64;
    let noise = (1.0 - lambda) / (df * df);
    let mut a = Vec::with_capacity(d);
    a.push(ComplexMatrix::from_fn(d, d, |i, j| {
        Complex64::new(if i == j { lambda / df + noise } else { lambda / df }, 0.0)
    }));
    for _ in 1..d {
        a.push(ComplexMatrix::identity(d).scale_real(noise));
    }
    CirculantSpec::new(d, a).map_err(|e| Error::InvalidSpec(format!("isotropic state at lambda = {lambda}: {e}")))
}

fn check_simplex_weights(w: &[f64]) -> Result<()> {
    if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidSpec(format!("weights {w:?} must be non-negative")));
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidSpec(format!("weights {w:?} sum to {total}, expected 1")));
    }
    Ok(())
}

/// `O(d) ⊗ O(d)`-invariant state `a P̃₀ + b P̃₁ + c P̃₂` with
/// `P₀ = Q⁺ − P⁺`, `P₁ = Q⁻`, `P₂ = P⁺` normalized to unit trace.
///
/// Assembled from the projectors. For `d = 2` the result is the X-state
/// `(1/4)[[a+2c,·,·,2c−a],[·,a+2b,a−2b,·],[·,a−2b,a+2b,·],[2c−a,·,·,a+2c]]`.
pub fn orthogonal_invariant_state(abc: [f64; 3], d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::Dimension(format!("orthogonal-invariant state needs d >= 2, got {d}")));
    }
    check_simplex_weights(&abc)?;
    let [a, b, c] = abc;
    let df = d as f64;
    let id = ComplexMatrix::identity(d * d);
    let flip = flip_operator(d);
    let p_plus = maximally_entangled(d).into_matrix();
    let q_plus = (&id + &flip).scale_real(0.5);
    let q_minus = (&id - &flip).scale_real(0.5);
    let p0 = &q_plus - &p_plus;
    let tr0 = df * (df + 1.0) / 2.0 - 1.0;
    let tr1 = df * (df - 1.0) / 2.0;
    let rho = &(&p0.scale_real(a / tr0) + &q_minus.scale_real(b / tr1)) + &p_plus.scale_real(c);
    DensityMatrix::new(rho).map_err(|e| Error::InvalidSpec(e.to_string()))
}

fn check_dmat(d: usize, dmat: &[Vec<f64>]) -> Result<()> {
    if dmat.len() != d || dmat.iter().any(|r| r.len() != d) {
        return Err(Error::Dimension(format!("dmat must be {d}x{d}")));
    }
    for (i, row) in dmat.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if i != j && !(x.is_finite() && *x >= 0.0) {
                return Err(Error::InvalidSpec(format!("d_{i}{j} = {x} must be non-negative")));
            }
        }
    }
    Ok(())
}

/// State invariant under a maximal commuting subgroup:
/// `Σ a_ij e_ij ⊗ e_ij + Σ_{i≠j} d_ij e_ii ⊗ e_jj`. Diagonal entries of `dmat` are ignored.
pub fn commuting_group_invariant_state(a: &ComplexMatrix, dmat: &[Vec<f64>]) -> Result<CirculantSpec> {
    let d = a.rows();
    if !a.is_square() {
        return Err(Error::Dimension(format!("a must be square, got {}x{}", a.rows(), a.cols())));
    }
    check_dmat(d, dmat)?;
    let mut coeffs = vec![a.clone()];
    for k in 1..d {
        let diag: Vec<Complex64> = (0..d).map(|i| Complex64::new(dmat[i][(i + k) % d], 0.0)).collect();
        coeffs.push(ComplexMatrix::from_diag(&diag));
    }
    CirculantSpec::new(d, coeffs)
}

/// Positive-partial-transpose test `|a_ij|² ≤ d_ij d_ji` for the commuting-group family.
pub fn ppt_check_commuting(a: &ComplexMatrix, dmat: &[Vec<f64>]) -> bool {
    let d = a.rows();
    (0..d).all(|i| (0..d).all(|j| i == j || a[(i, j)].norm_sqr() <= dmat[i][j] * dmat[j][i] + 1e-12))
}

/// The symmetric families parameterized by a scalar or a weight triple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SymmetricParams {
    Werner { d: usize, lambda: f64 },
    Isotropic { d: usize, lambda: f64 },
    Orthogonal { d: usize, abc: [f64; 3] },
}

impl SymmetricParams {
    pub fn build(&self) -> Result<DensityMatrix> {
        match *self {
            SymmetricParams::Werner { d, lambda } => werner_state(d, lambda),
            SymmetricParams::Isotropic { d, lambda } => circulant_state(&isotropic_state(d, lambda)?),
            SymmetricParams::Orthogonal { d, abc } => orthogonal_invariant_state(abc, d),
        }
    }
}
