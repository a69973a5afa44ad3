//! Seeded random draws of states, phases, weights and perturbations.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::circulant::{generate_zero_discord, PhaseVector};
use crate::error::Result;
use crate::matrix::ComplexMatrix;
use crate::states::{BellWeights, CirculantSpec};
use crate::Side;

pub use crate::optimize::random_unitary;

/// Range of the identity weight mixed into [`random_psd`].
const MIX: (f64, f64) = (0.3, 0.7);

/// Unit-trace matrix `(1−w)|ψ⟩⟨ψ| + w I/d` with `w` uniform in `[0.3, 0.7]`,
/// random phases on `ψ` and `|ψ_i|² ≥ 1/(2d)`.
///
/// Every coherence is then a fixed fraction of its populations, and the
/// spectrum stays above `0.3/d`, so perturbations of size `0.01/d` keep the
/// state valid after the generator rescales by `1/d`.
pub fn random_psd(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let df = d as f64;
    let raw: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let psi: Vec<Complex64> = raw
        .iter()
        .map(|x| Complex64::from_polar((0.5 / df + 0.5 * x / total).sqrt(), rng.random_range(-PI..PI)))
        .collect();
    let w = rng.random_range(MIX.0..MIX.1);
    ComplexMatrix::from_fn(d, d, |r, c| {
        let floor = if r == c { w / df } else { 0.0 };
        psi[r] * psi[c].conj() * (1.0 - w) + floor
    })
}

/// Phases uniform in `(−π, π]` with `φ_0 = 0`.
pub fn random_phases(d: usize, rng: &mut impl Rng) -> PhaseVector {
    let mut phi: Vec<f64> = (0..d).map(|_| rng.random_range(-PI..PI)).collect();
    phi[0] = 0.0;
    PhaseVector::new(phi).expect("finite phases")
}

/// Zero-discord circulant state on `side` from random `a⁽⁰⁾` and phases.
pub fn random_zero_discord(d: usize, side: Side, rng: &mut impl Rng) -> Result<(CirculantSpec, PhaseVector)> {
    let phases = random_phases(d, rng);
    let spec = generate_zero_discord(&random_psd(d, rng), &phases, side)?;
    Ok((spec, phases))
}

/// Flat Dirichlet draw of `d × d` Bell weights.
pub fn random_bell_weights(d: usize, rng: &mut impl Rng) -> BellWeights {
    let raw: Vec<f64> = (0..d * d).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let mut rows: Vec<Vec<f64>> = raw.chunks(d).map(|r| r.iter().map(|x| x / total).collect()).collect();
    fix_total(&mut rows);
    BellWeights::new(rows).expect("normalized weights")
}

/// Absorbs the rounding error of a normalization into the largest entry.
fn fix_total(rows: &mut [Vec<f64>]) {
    let total: f64 = rows.iter().flatten().sum();
    let (mut bi, mut bj) = (0, 0);
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if *x > rows[bi][bj] {
                (bi, bj) = (i, j);
            }
        }
    }
    rows[bi][bj] += 1.0 - total;
}

/// Random `π` with `Σπ = 1/d`.
pub fn random_pi(d: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum::<f64>() * d as f64;
    raw.into_iter().map(|x| x / total).collect()
}

/// Kinds of departure from a zero-discord family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Perturbation {
    /// Changes `|a⁽ᵏ⁾_ij|` by `δ`, keeping the phase.
    Modulus,
    /// Moves `δ` of population from `a⁽ᵏ⁾_jj` to `a⁽ᵏ⁾_ii`.
    Diagonal,
    /// Rotates `a⁽ᵏ⁾_ij` so that the entry moves by `δ`. Needs `d ≥ 3`: for `d = 2`
    /// a single coherence phase is always absorbed into `V`.
    Phase,
}

impl Perturbation {
    pub const ALL: [Perturbation; 3] = [Perturbation::Modulus, Perturbation::Diagonal, Perturbation::Phase];
}

/// Changes one entry pair of a random `a⁽ᵏ⁾`, `k ≥ 1`, by exactly `delta` in modulus.
/// Returns `None` when the result is not a valid state or the kind does not apply.
pub fn perturb(spec: &CirculantSpec, kind: Perturbation, delta: f64, rng: &mut impl Rng) -> Option<CirculantSpec> {
    let d = spec.d();
    if kind == Perturbation::Phase && d < 3 {
        return None;
    }
    let k = rng.random_range(1..d);
    let i = rng.random_range(0..d);
    let j = (i + rng.random_range(1..d)) % d;
    let mut a = spec.coefficients().to_vec();
    let m = &mut a[k];
    match kind {
        Perturbation::Modulus => {
            let z = m[(i, j)];
            let bumped = if z.norm() > 1e-12 {
                z * ((z.norm() + delta) / z.norm())
            } else {
                Complex64::from_polar(delta, rng.random_range(-PI..PI))
            };
            m[(i, j)] = bumped;
            m[(j, i)] = bumped.conj();
        }
        Perturbation::Diagonal => {
            m[(i, i)] += delta;
            m[(j, j)] -= delta;
        }
        Perturbation::Phase => {
            let z = m[(i, j)];
            if z.norm() < delta / 2.0 {
                return None;
            }
            let angle = 2.0 * (delta / (2.0 * z.norm())).asin();
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let rotated = z * Complex64::from_polar(1.0, sign * angle);
            m[(i, j)] = rotated;
            m[(j, i)] = rotated.conj();
        }
    }
    CirculantSpec::new(d, a).ok()
}

/// Draws zero-discord families until one admits the perturbation.
pub fn random_perturbed(
    d: usize,
    side: Side,
    kind: Perturbation,
    delta: f64,
    rng: &mut impl Rng,
) -> Result<CirculantSpec> {
    loop {
        let (spec, _) = random_zero_discord(d, side, rng)?;
        if let Some(p) = perturb(&spec, kind, delta, rng) {
            return Ok(p);
        }
    }
}
