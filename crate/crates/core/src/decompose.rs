//! Explicit classical-quantum form `Σ p_k |k⟩⟨k| ⊗ ρ_k` of a zero-discord state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blocks::{extract_blocks, structural_discord_zero, BlockDecomposition, STRUCTURAL_TOL};
use crate::error::{Error, Result};
use crate::matrix::{eig_hermitian, ComplexMatrix, DensityMatrix};
use crate::Side;
use num_complex::Complex64;

/// Minimum outcome probability kept in a decomposition.
pub const MIN_WEIGHT: f64 = 1e-14;
/// Eigenvalue gap below which a random combination is considered degenerate.
const GAP_TOL: f64 = 1e-8;
const RETRIES: usize = 5;
const SEED: u64 = 0x005e_ed0f_b10c;

/// One term `p_k |k⟩⟨k| ⊗ ρ_k` (side A) or `p_k ρ_k ⊗ |k⟩⟨k|` (side B).
#[derive(Clone, Debug)]
pub struct ClassicalComponent {
    pub probability: f64,
    pub vector: Vec<Complex64>,
    pub conditional: DensityMatrix,
}

/// Hermitian generators `(B + B†)/2` and `(B − B†)/2i` of a block family.
fn hermitian_generators(family: &BlockDecomposition) -> Vec<ComplexMatrix> {
    let i_half = Complex64::new(0.0, -0.5);
    family
        .upper()
        .flat_map(|(_, b)| {
            let adj = b.adjoint();
            [(b + &adj).scale_real(0.5), (b - &adj).scale(i_half)]
        })
        .collect()
}

fn min_gap(eigenvalues: &[f64]) -> f64 {
    eigenvalues.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

fn columns(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.cols()).map(|j| m.column(j)).collect()
}

/// Splits each subspace into eigenspaces of every generator in turn.
fn sequential_refinement(generators: &[ComplexMatrix], d: usize) -> Vec<Vec<Complex64>> {
    let mut spaces: Vec<ComplexMatrix> = vec![ComplexMatrix::identity(d)];
    for g in generators {
        let scale = g.frobenius_norm().max(1.0);
        let mut next = Vec::new();
        for q in spaces {
            if q.cols() == 1 {
                next.push(q);
                continue;
            }
            let restricted = &(&q.adjoint() * g) * &q;
            let spec = eig_hermitian(&restricted).expect("square");
            let mut start = 0;
            for end in 1..=spec.eigenvalues.len() {
                if end == spec.eigenvalues.len() || spec.eigenvalues[end] - spec.eigenvalues[end - 1] > GAP_TOL * scale {
                    let block = ComplexMatrix::from_fn(q.cols(), end - start, |r, c| spec.eigenvectors[(r, start + c)]);
                    next.push(&q * &block);
                    start = end;
                }
            }
        }
        spaces = next;
    }
    spaces.iter().flat_map(columns).collect()
}

/// Orthonormal basis that diagonalizes every block of a commuting normal family.
pub(crate) fn common_eigenbasis(family: &BlockDecomposition) -> Vec<Vec<Complex64>> {
    let d = family.d();
    let generators = hermitian_generators(family);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..RETRIES {
        let mut combo = ComplexMatrix::zeros(d, d);
        for g in &generators {
            combo = &combo + &g.scale_real(rng.random_range(-1.0..1.0));
        }
        let spec = eig_hermitian(&combo).expect("square");
        if min_gap(&spec.eigenvalues) >= GAP_TOL {
            return columns(&spec.eigenvectors);
        }
    }
    sequential_refinement(&generators, d)
}

/// Decomposes a state with zero discord on `side` into its classical-quantum form.
///
/// The basis `|k⟩` on the measured party diagonalizes the blocks `ρ⁽ˢⁱᵈᵉ⁾`; the
/// conditional states live on the other party. Outcomes with `p_k < 1e−14` are dropped.
pub fn classical_decomposition(rho: &DensityMatrix, d: usize, side: Side) -> Result<Vec<ClassicalComponent>> {
    let verdict = structural_discord_zero(rho, d, side, STRUCTURAL_TOL)?;
    if !verdict.zero_discord {
        return Err(Error::Precondition(format!("state has nonzero discord on side {side}")));
    }
    let measured = extract_blocks(rho, d, side)?;
    let other = extract_blocks(rho, d, side.other())?;
    let mut out = Vec::new();
    for vector in common_eigenbasis(&measured) {
        let sigma = other.contract(&vector).hermitian_part();
        let probability = sigma.trace().re;
        if probability < MIN_WEIGHT {
            continue;
        }
        let conditional = clip_to_state(sigma.scale_real(1.0 / probability));
        out.push(ClassicalComponent { probability, vector, conditional });
    }
    Ok(out)
}

/// Projects a unit-trace Hermitian matrix with round-off negativity onto the PSD cone.
fn clip_to_state(m: ComplexMatrix) -> DensityMatrix {
    if let Ok(rho) = DensityMatrix::new(m.clone()) {
        return rho;
    }
    let spec = eig_hermitian(&m).expect("square");
    let clipped: Vec<f64> = spec.eigenvalues.iter().map(|x| x.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let rebuilt = crate::matrix::Spectrum {
        eigenvalues: clipped.iter().map(|x| x / total).collect(),
        eigenvectors: spec.eigenvectors,
    }
    .reconstruct();
    DensityMatrix::new(rebuilt).expect("clipped spectrum is a state")
}

/// `Σ p_k |k⟩⟨k| ⊗ ρ_k` (side A) or `Σ p_k ρ_k ⊗ |k⟩⟨k|` (side B).
pub fn reassemble(components: &[ClassicalComponent], side: Side) -> ComplexMatrix {
    let d = components.first().map_or(1, |c| c.vector.len());
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for c in components {
        let proj = ComplexMatrix::outer(&c.vector, &c.vector);
        let term = match side {
            Side::A => crate::matrix::kron(&proj, c.conditional.matrix()),
            Side::B => crate::matrix::kron(c.conditional.matrix(), &proj),
        };
        out = &out + &term.scale_real(c.probability);
    }
    out
}
