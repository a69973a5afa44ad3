//! Search over orthonormal bases of `C^d` for the minimum of a basis function.
//!
//! `d = 2` uses a Bloch-angle grid followed by local refinement. Larger `d`
//! parameterizes bases as `U₀ exp(iH)` with `H` Hermitian and zero on the
//! diagonal (diagonal phases only rephase basis vectors), and runs Nelder–Mead
//! from several starting unitaries `U₀`.

use std::f64::consts::PI;

use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matrix::{eig_hermitian, ComplexMatrix};

/// A list of `d` orthonormal vectors.
pub type Basis = Vec<Vec<Complex64>>;

/// Settings shared by both search paths.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SearchSettings {
    pub starts: usize,
    pub max_iters: u64,
    pub f_tol: f64,
    pub seed: u64,
    pub grid_2d: bool,
}

/// Best basis found, its value, and how many local searches converged.
#[derive(Clone, Debug)]
pub(crate) struct SearchOutcome {
    pub basis: Basis,
    pub value: f64,
    pub converged: usize,
}

const GRID_THETA: usize = 181;
const GRID_PHI: usize = 360;
const GRID_REFINE: usize = 4;
const INITIAL_STEP: f64 = 0.3;
const RESTARTS: usize = 2;

struct Closure<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Closure<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> Result<f64, argmin::core::Error> {
        Ok((self.0)(x))
    }
}

pub(crate) struct LocalMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

/// Nelder–Mead from `x0` with an axis-aligned initial simplex of size `step`,
/// restarted from the best vertex while that still improves the value.
pub(crate) fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], step: f64, max_iters: u64, f_tol: f64) -> LocalMinimum {
    let f = Closure(f);
    let mut best = LocalMinimum { x: x0.to_vec(), value: (f.0)(x0), converged: false };
    for _ in 0..=RESTARTS {
        let mut simplex = vec![best.x.clone()];
        for i in 0..x0.len() {
            let mut v = best.x.clone();
            v[i] += step;
            simplex.push(v);
        }
        let solver = NelderMead::new(simplex).with_sd_tolerance(f_tol).expect("positive tolerance");
        let result = Executor::new(Closure(&f.0), solver).configure(|s| s.max_iters(max_iters)).run();
        let Ok(result) = result else { break };
        let state = result.state();
        let converged =
            matches!(state.get_termination_status(), TerminationStatus::Terminated(TerminationReason::SolverConverged));
        let value = state.get_best_cost();
        let improved = best.value - value;
        if let Some(x) = state.get_best_param() {
            if value < best.value {
                best.x = x.clone();
                best.value = value;
            }
        }
        best.converged = converged;
        if improved <= f_tol {
            break;
        }
    }
    best
}

/// Measurement basis `{(cos θ/2, e^{iφ} sin θ/2), (−e^{−iφ} sin θ/2, cos θ/2)}`.
pub(crate) fn bloch_basis(theta: f64, phi: f64) -> Basis {
    let (s, c) = (0.5 * theta).sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    vec![
        vec![Complex64::new(c, 0.0), e * s],
        vec![-e.conj() * s, Complex64::new(c, 0.0)],
    ]
}

/// Columns of `u` as basis vectors.
pub(crate) fn basis_from_unitary(u: &ComplexMatrix) -> Basis {
    (0..u.cols()).map(|j| u.column(j)).collect()
}

/// `exp(iH)` for Hermitian `H` built from the off-diagonal parameters `x`.
pub(crate) fn unitary_from_params(x: &[f64], d: usize) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(d, d);
    let mut t = 0;
    for p in 0..d {
        for q in p + 1..d {
            let z = Complex64::new(x[t], x[t + 1]);
            h[(p, q)] = z;
            h[(q, p)] = z.conj();
            t += 2;
        }
    }
    let spec = eig_hermitian(&h).expect("square");
    let v = &spec.eigenvectors;
    ComplexMatrix::from_fn(d, d, |r, c| {
        (0..d).map(|k| v[(r, k)] * Complex64::from_polar(1.0, spec.eigenvalues[k]) * v[(c, k)].conj()).sum()
    })
}

/// Gram–Schmidt on the columns of a matrix with independent complex normal entries.
pub fn random_unitary(d: usize, rng: &mut impl rand::Rng) -> ComplexMatrix {
    loop {
        let g: Vec<Vec<Complex64>> = (0..d)
            .map(|_| (0..d).map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))).collect())
            .collect();
        if let Some(cols) = orthonormalize(g) {
            return ComplexMatrix::from_fn(d, d, |r, c| cols[c][r]);
        }
    }
}

fn orthonormalize(mut cols: Vec<Vec<Complex64>>) -> Option<Vec<Vec<Complex64>>> {
    for j in 0..cols.len() {
        for k in 0..j {
            let overlap: Complex64 = cols[k].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
            let prev = cols[k].clone();
            for (x, p) in cols[j].iter_mut().zip(&prev) {
                *x -= overlap * p;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-10 {
            return None;
        }
        for x in &mut cols[j] {
            *x /= norm;
        }
    }
    Some(cols)
}

/// `F[n][m] = λ^{nm}/√d`.
pub(crate) fn fourier(d: usize) -> ComplexMatrix {
    chirp(d, 0)
}

/// `[n][m] = exp(iπ(c·k·n² + 2mn)/d)/√d` with `c = 2` for odd `d` and `c = 1` for even `d`.
/// For odd prime `d` these are the standard mutually unbiased bases.
pub(crate) fn chirp(d: usize, k: usize) -> ComplexMatrix {
    let norm = 1.0 / (d as f64).sqrt();
    let c = if d % 2 == 1 { 2 } else { 1 };
    ComplexMatrix::from_fn(d, d, |n, m| {
        let phase = ((c * k * n * n + 2 * m * n) % (2 * d)) as f64 * PI / d as f64;
        Complex64::from_polar(norm, phase)
    })
}

/// Starting unitaries in order: computational, Fourier, chirps, then seeded random ones.
pub(crate) fn start_unitaries(d: usize, count: usize, seed: u64) -> Vec<ComplexMatrix> {
    let mut out = vec![ComplexMatrix::identity(d), fourier(d)];
    out.extend((1..d).map(|k| chirp(d, k)));
    out.truncate(count);
    let mut index = out.len() as u64;
    while out.len() < count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        out.push(random_unitary(d, &mut rng));
        index += 1;
    }
    out
}

/// Minimizes `f` over bases. Stops early once a value at or below `target` is found.
pub(crate) fn minimize_over_bases(f: impl Fn(&Basis) -> f64, d: usize, cfg: &SearchSettings, target: f64) -> SearchOutcome {
    if d == 2 && cfg.grid_2d {
        minimize_qubit(f, cfg, target)
    } else {
        minimize_general(f, d, cfg, target)
    }
}

fn minimize_qubit(f: impl Fn(&Basis) -> f64, cfg: &SearchSettings, target: f64) -> SearchOutcome {
    let at = |x: &[f64]| f(&bloch_basis(x[0], x[1]));
    let mut grid: Vec<(f64, f64, f64)> = Vec::with_capacity(GRID_THETA * GRID_PHI);
    for i in 0..GRID_THETA {
        let theta = i as f64 * PI / (GRID_THETA - 1) as f64;
        for j in 0..GRID_PHI {
            let phi = j as f64 * 2.0 * PI / GRID_PHI as f64;
            grid.push((at(&[theta, phi]), theta, phi));
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));
    let step = PI / (GRID_THETA - 1) as f64;
    let mut best = SearchOutcome { basis: bloch_basis(grid[0].1, grid[0].2), value: grid[0].0, converged: 0 };
    for &(_, theta, phi) in grid.iter().take(GRID_REFINE) {
        let local = nelder_mead(at, &[theta, phi], step, cfg.max_iters, cfg.f_tol);
        best.converged += local.converged as usize;
        if local.value < best.value {
            best.value = local.value;
            best.basis = bloch_basis(local.x[0], local.x[1]);
        }
        if best.value <= target {
            break;
        }
    }
    best
}

fn minimize_general(f: impl Fn(&Basis) -> f64, d: usize, cfg: &SearchSettings, target: f64) -> SearchOutcome {
    let dim = d * (d - 1);
    let mut best: Option<SearchOutcome> = None;
    for u0 in start_unitaries(d, cfg.starts.max(1), cfg.seed) {
        let at = |x: &[f64]| f(&basis_from_unitary(&(&u0 * &unitary_from_params(x, d))));
        let local = nelder_mead(at, &vec![0.0; dim], INITIAL_STEP, cfg.max_iters, cfg.f_tol);
        let basis = basis_from_unitary(&(&u0 * &unitary_from_params(&local.x, d)));
        let converged = local.converged as usize;
        match &mut best {
            Some(b) => {
                b.converged += converged;
                if local.value < b.value {
                    b.value = local.value;
                    b.basis = basis;
                }
            }
            None => best = Some(SearchOutcome { basis, value: local.value, converged }),
        }
        if best.as_ref().is_some_and(|b| b.value <= target) {
            break;
        }
    }
    best.expect("at least one start")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram_defect(u: &ComplexMatrix) -> f64 {
        (&(&u.adjoint() * u) - &ComplexMatrix::identity(u.rows())).frobenius_norm()
    }

    #[test]
    fn parameterized_and_random_unitaries_are_unitary() {
        let x = [0.3, -1.2, 0.7, 0.1, 2.0, -0.4];
        assert!(gram_defect(&unitary_from_params(&x, 3)) < 1e-13);
        assert_eq!(unitary_from_params(&[0.0; 6], 3), ComplexMatrix::identity(3));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 2..=7 {
            assert!(gram_defect(&random_unitary(d, &mut rng)) < 1e-12);
            assert!(gram_defect(&fourier(d)) < 1e-12);
            for k in 1..d {
                assert!(gram_defect(&chirp(d, k)) < 1e-12);
            }
        }
    }

    #[test]
    fn bloch_basis_is_orthonormal() {
        for (t, p) in [(0.0, 0.0), (1.0, 2.0), (PI, 5.0)] {
            let b = bloch_basis(t, p);
            let u = ComplexMatrix::from_fn(2, 2, |r, c| b[c][r]);
            assert!(gram_defect(&u) < 1e-15);
        }
    }

    #[test]
    fn starts_are_deterministic() {
        let a = start_unitaries(3, 8, 42);
        let b = start_unitaries(3, 8, 42);
        assert_eq!(a, b);
        assert_eq!(a[0], ComplexMatrix::identity(3));
        assert_ne!(start_unitaries(3, 8, 43)[6], a[6]);
        assert_eq!(start_unitaries(5, 2, 0).len(), 2);
    }

    #[test]
    fn nelder_mead_finds_a_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2);
        let m = nelder_mead(f, &[0.0, 0.0], 0.3, 2000, 1e-14);
        assert!(m.value < 1e-10);
        assert!((m.x[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn basis_search_finds_a_target_vector() {
        // maximize |⟨e_0|u_0⟩|² for a fixed direction w
        let w = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let f = |b: &Basis| -((b[0][0].conj() * w[0] + b[0][1].conj() * w[1]).norm_sqr());
        let cfg = SearchSettings { starts: 4, max_iters: 2000, f_tol: 1e-12, seed: 3, grid_2d: true };
        let grid = minimize_over_bases(f, 2, &cfg, f64::NEG_INFINITY);
        assert!((grid.value + 1.0).abs() < 1e-9);
        let general = minimize_over_bases(f, 2, &SearchSettings { grid_2d: false, ..cfg }, f64::NEG_INFINITY);
        assert!((general.value + 1.0).abs() < 1e-8);
    }
}
