//! Numeric discord: mutual information minus the classical correlation
//! extracted by the best rank-one projective measurement on one party.
//!
//! The optimizer only ever finds a lower bound on the classical correlation,
//! so the returned discord is an upper bound on the true value.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::blocks::{extract_blocks, BlockDecomposition};
use crate::error::{Error, Result};
use crate::matrix::{eigenvalues_hermitian, partial_trace, von_neumann_entropy, DensityMatrix, ENTROPY_CUTOFF};
use crate::optimize::{minimize_over_bases, Basis, SearchSettings};
use crate::Side;

/// Outcomes below this probability are ignored.
pub const MIN_OUTCOME: f64 = 1e-14;
/// Discord values this close to zero are reported as exactly zero.
pub const ZERO_CLIP: f64 = 1e-9;
const GRAM_TOL: f64 = 1e-10;

/// Ordered orthonormal basis defining a rank-one projective measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Complex64>>", into = "Vec<Vec<Complex64>>")]
pub struct MeasurementBasis {
    vectors: Vec<Vec<Complex64>>,
}

impl MeasurementBasis {
    /// Checks that the Gram matrix is the identity within `1e−10`.
    pub fn new(vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 || vectors.iter().any(|v| v.len() != d) {
            return Err(Error::InvalidMeasurement(format!("need {d} vectors of length {d}")));
        }
        for a in 0..d {
            for b in 0..d {
                let overlap: Complex64 = vectors[a].iter().zip(&vectors[b]).map(|(x, y)| x.conj() * y).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                if (overlap - expected).norm() > GRAM_TOL {
                    return Err(Error::InvalidMeasurement(format!("Gram entry ({a}, {b}) is {overlap}")));
                }
            }
        }
        Ok(Self { vectors })
    }

    pub fn computational(d: usize) -> Self {
        Self { vectors: (0..d).map(|k| (0..d).map(|i| Complex64::new((i == k) as u8 as f64, 0.0)).collect()).collect() }
    }

    pub fn d(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }
}

impl TryFrom<Vec<Vec<Complex64>>> for MeasurementBasis {
    type Error = Error;

    fn try_from(v: Vec<Vec<Complex64>>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MeasurementBasis> for Vec<Vec<Complex64>> {
    fn from(b: MeasurementBasis) -> Self {
        b.vectors
    }
}

/// Search settings for [`classical_correlation`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub max_iters: u64,
    pub f_tol: f64,
    pub seed: u64,
    /// Use the exhaustive Bloch-angle grid when `d = 2`.
    pub grid_2d: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { starts: 24, max_iters: 2000, f_tol: 1e-10, seed: 0, grid_2d: true }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.starts == 0 || !self.f_tol.is_finite() || self.f_tol <= 0.0 {
            return Err(Error::InvalidSpec("optimizer needs starts >= 1 and f_tol > 0".into()));
        }
        Ok(())
    }

    fn settings(&self) -> SearchSettings {
        SearchSettings {
            starts: self.starts,
            max_iters: self.max_iters,
            f_tol: self.f_tol,
            seed: self.seed,
            grid_2d: self.grid_2d,
        }
    }
}

/// Numeric discord of one side.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscordResult {
    pub side: Side,
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub discord: f64,
    pub best_measurement: MeasurementBasis,
    pub starts_converged: usize,
}

impl Serialize for DiscordResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DiscordResult", 6)?;
        st.serialize_field("I", &self.mutual_information)?;
        st.serialize_field("C", &self.classical_correlation)?;
        st.serialize_field("D", &self.discord)?;
        st.serialize_field("side", &self.side)?;
        st.serialize_field("basis", &self.best_measurement)?;
        st.serialize_field("starts_converged", &self.starts_converged)?;
        st.end()
    }
}

fn check_dim(rho: &DensityMatrix, d: usize) -> Result<()> {
    if d == 0 || rho.dim() != d * d {
        return Err(Error::Dimension(format!("state of dimension {} is not {d}x{d}", rho.dim())));
    }
    Ok(())
}

/// `S(ρ_A) + S(ρ_B) − S(ρ)` in bits.
pub fn mutual_information(rho: &DensityMatrix, d: usize) -> Result<f64> {
    check_dim(rho, d)?;
    let ra = partial_trace(rho, d, d, Side::B)?;
    let rb = partial_trace(rho, d, d, Side::A)?;
    Ok(von_neumann_entropy(&ra) + von_neumann_entropy(&rb) - von_neumann_entropy(rho))
}

/// `p S(σ/p)` for an unnormalized conditional state `σ` with `p = tr σ`.
fn weighted_entropy(eigenvalues: &[f64]) -> f64 {
    let p: f64 = eigenvalues.iter().sum();
    if p < MIN_OUTCOME {
        return 0.0;
    }
    eigenvalues.iter().filter(|&&x| x / p > ENTROPY_CUTOFF).map(|&x| -x * (x / p).log2()).sum::<f64>().max(0.0)
}

/// `Σ_k p_k S(ρ_{·|k})` given the blocks whose contraction yields the conditional states.
fn conditional_entropy_with(conditionals: &BlockDecomposition, basis: &[Vec<Complex64>]) -> f64 {
    basis.iter().map(|u| weighted_entropy(&eigenvalues_hermitian(&conditionals.contract(u)))).sum()
}

/// Blocks whose contraction with a measurement vector on `side` gives the other party's state.
fn conditional_family(rho: &DensityMatrix, d: usize, side: Side) -> Result<BlockDecomposition> {
    extract_blocks(rho, d, side.other())
}

/// `S(ρ_other | {Π_k})` for a measurement on `side`.
pub fn conditional_entropy(rho: &DensityMatrix, d: usize, basis: &MeasurementBasis, side: Side) -> Result<f64> {
    check_dim(rho, d)?;
    if basis.d() != d {
        return Err(Error::InvalidMeasurement(format!("basis of dimension {} for d = {d}", basis.d())));
    }
    Ok(conditional_entropy_with(&conditional_family(rho, d, side)?, basis.vectors()))
}

fn unmeasured_entropy(rho: &DensityMatrix, d: usize, side: Side) -> Result<f64> {
    // tracing out the measured party leaves the other one
    Ok(von_neumann_entropy(&partial_trace(rho, d, d, side)?))
}

/// Best classical correlation `S(ρ_other) − min S(ρ_other | Π)` and the basis achieving it.
pub fn classical_correlation(rho: &DensityMatrix, d: usize, side: Side, cfg: &OptimizerConfig) -> Result<(f64, MeasurementBasis)> {
    let (c, basis, _) = optimize(rho, d, side, cfg, f64::NEG_INFINITY)?;
    Ok((c, basis))
}

fn optimize(
    rho: &DensityMatrix,
    d: usize,
    side: Side,
    cfg: &OptimizerConfig,
    target: f64,
) -> Result<(f64, MeasurementBasis, usize)> {
    check_dim(rho, d)?;
    cfg.validate()?;
    let family = conditional_family(rho, d, side)?;
    let s_other = unmeasured_entropy(rho, d, side)?;
    let f = |b: &Basis| conditional_entropy_with(&family, b);
    let found = minimize_over_bases(f, d, &cfg.settings(), target);
    let basis = MeasurementBasis::new(found.basis).expect("search returns orthonormal bases");
    Ok((s_other - found.value, basis, found.converged))
}

/// `D = I − C` for a measurement on `side`, clipped to zero within `1e−9`.
pub fn discord(rho: &DensityMatrix, d: usize, side: Side, cfg: &OptimizerConfig) -> Result<DiscordResult> {
    let mi = mutual_information(rho, d)?;
    let s_other = unmeasured_entropy(rho, d, side)?;
    // conditional entropy that would make the discord vanish
    let target = s_other - mi + 1e-12;
    let (mut c, best_measurement, starts_converged) = optimize(rho, d, side, cfg, target)?;
    let mut dis = mi - c;
    if dis.abs() <= ZERO_CLIP || dis < 0.0 {
        c = mi;
        dis = 0.0;
    }
    Ok(DiscordResult {
        side,
        mutual_information: mi,
        classical_correlation: c,
        discord: dis,
        best_measurement,
        starts_converged,
    })
}
