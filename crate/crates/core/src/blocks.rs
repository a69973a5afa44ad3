//! Block families of a bipartite state and the general commutation criterion.
//!
//! Writing `ρ = Σ e_ij ⊗ ρ⁽ᴮ⁾_ij = Σ ρ⁽ᴬ⁾_αβ ⊗ e_αβ`, the discord measured on
//! side `X` vanishes iff the family `ρ⁽ˣ⁾` consists of normal, mutually
//! commuting matrices.

use serde::{Deserialize, Serialize};

use crate::circulant::PhaseVector;
use crate::error::{Error, Result};
use crate::matrix::{commutator_norm, ComplexMatrix, DensityMatrix};
use crate::Side;

/// Default relative tolerance for structural tests.
pub const STRUCTURAL_TOL: f64 = 1e-9;

/// The `d × d` array of `d × d` blocks acting on one party.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDecomposition {
    side: Side,
    d: usize,
    blocks: Vec<ComplexMatrix>,
}

impl BlockDecomposition {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `ρ⁽ᴮ⁾_ij` for side B, `ρ⁽ᴬ⁾_ij` for side A.
    pub fn block(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.blocks[i * self.d + j]
    }

    /// Blocks `(i, j)` with `i ≤ j`, in lexicographic order. The rest are their adjoints.
    pub fn upper(&self) -> impl Iterator<Item = ((usize, usize), &ComplexMatrix)> {
        let d = self.d;
        (0..d).flat_map(move |i| (i..d).map(move |j| ((i, j), self.block(i, j))))
    }

    /// `Σ_ij c̄_i c_j · block(i, j)`: the unnormalized state of the other party
    /// after projecting this family's label space onto `c`.
    pub(crate) fn contract(&self, c: &[num_complex::Complex64]) -> ComplexMatrix {
        let d = self.d;
        let mut out = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let w = c[i].conj() * c[j];
                let b = self.block(i, j);
                for r in 0..d {
                    for s in 0..d {
                        out[(r, s)] += w * b[(r, s)];
                    }
                }
            }
        }
        out
    }
}

/// Splits `rho` on `C^d ⊗ C^d` into blocks.
///
/// Side B: `block[i][j][k,l] = ρ[i·d+k, j·d+l]`.
/// Side A: `block[α][β][i,j] = ρ[i·d+α, j·d+β]`.
pub fn extract_blocks(rho: &DensityMatrix, d: usize, side: Side) -> Result<BlockDecomposition> {
    if d == 0 || rho.dim() != d * d {
        return Err(Error::Dimension(format!("state of dimension {} is not {d}x{d}", rho.dim())));
    }
    let m = rho.matrix();
    let mut blocks = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            blocks.push(match side {
                Side::B => ComplexMatrix::from_fn(d, d, |k, l| m[(i * d + k, j * d + l)]),
                Side::A => ComplexMatrix::from_fn(d, d, |k, l| m[(k * d + i, l * d + j)]),
            });
        }
    }
    Ok(BlockDecomposition { side, d, blocks })
}

/// Which test produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    GeneralCommutation,
    CirculantTheorem,
    BellTheorem,
    DiagonalClassical,
}

/// Evidence attached to a negative verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// A block that fails the normality test.
    NonNormal { block: (usize, usize), defect: f64 },
    /// Two blocks whose commutator exceeds the threshold.
    Commutator { first: (usize, usize), second: (usize, usize), norm: f64 },
    /// A closed-form condition violated at entry `(i, j)` of `a⁽ᵏ⁾`.
    Condition { id: String, k: usize, i: usize, j: usize, residual: f64 },
}

/// Outcome of a structural zero-discord test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuralVerdict {
    pub side: Side,
    pub zero_discord: bool,
    pub criterion: Criterion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<usize>,
    #[serde(default, rename = "phases", skip_serializing_if = "Option::is_none")]
    pub fitted_phases: Option<PhaseVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl StructuralVerdict {
    pub(crate) fn zero(side: Side, criterion: Criterion) -> Self {
        Self { side, zero_discord: true, criterion, alpha: None, fitted_phases: None, pi: None, witness: None }
    }

    pub(crate) fn nonzero(side: Side, criterion: Criterion, witness: Witness) -> Self {
        Self { witness: Some(witness), zero_discord: false, ..Self::zero(side, criterion) }
    }
}

fn normality_defect(m: &ComplexMatrix) -> f64 {
    let adj = m.adjoint();
    (&(m * &adj) - &(&adj * m)).frobenius_norm()
}

/// General criterion, valid for any `d`: the discord measured on `side` is zero
/// iff the blocks `ρ⁽ˢⁱᵈᵉ⁾` are normal and mutually commute.
///
/// A block is normal when `‖BB† − B†B‖ ≤ tol·max(1, ‖B‖²)`, a pair commutes when
/// `‖[B₁, B₂]‖ ≤ tol·max(1, ‖B₁‖‖B₂‖)`. Only blocks with `i ≤ j` are compared:
/// once they are normal, commuting with `B` implies commuting with `B†`.
/// The witness is the worst violation relative to its threshold, ties going to
/// the lexicographically first pair.
pub fn structural_discord_zero(rho: &DensityMatrix, d: usize, side: Side, tol: f64) -> Result<StructuralVerdict> {
    let family = extract_blocks(rho, d, side)?;
    let blocks: Vec<_> = family.upper().collect();
    let norms: Vec<f64> = blocks.iter().map(|(_, b)| b.frobenius_norm()).collect();

    fn consider(worst: &mut Option<(f64, Witness)>, ratio: f64, w: Witness) {
        if ratio > 1.0 && worst.as_ref().is_none_or(|(r, _)| ratio > *r) {
            *worst = Some((ratio, w));
        }
    }
    let mut worst = None;
    for (x, (ij, b)) in blocks.iter().enumerate() {
        let defect = normality_defect(b);
        consider(&mut worst, defect / (tol * norms[x].powi(2).max(1.0)), Witness::NonNormal { block: *ij, defect });
    }
    if worst.is_none() {
        for x in 0..blocks.len() {
            for y in x + 1..blocks.len() {
                let norm = commutator_norm(blocks[x].1, blocks[y].1)?;
                let ratio = norm / (tol * (norms[x] * norms[y]).max(1.0));
                consider(&mut worst, ratio, Witness::Commutator { first: blocks[x].0, second: blocks[y].0, norm });
            }
        }
    }
    Ok(match worst {
        None => StructuralVerdict::zero(side, Criterion::GeneralCommutation),
        Some((_, w)) => StructuralVerdict::nonzero(side, Criterion::GeneralCommutation, w),
    })
}
