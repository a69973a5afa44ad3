use discordant::blocks::STRUCTURAL_TOL;
use discordant::circulant::THEOREM_TOL;
use discordant::decompose::reassemble;
use discordant::sampling::{random_bell_weights, random_perturbed, random_psd, random_unitary, random_zero_discord, Perturbation};
use discordant::schema::StateFile;
use discordant::states::{bell_diagonal_state, circulant_state};
use discordant::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn side() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::A), Just(Side::B)]
}

fn prime() -> impl Strategy<Value = usize> {
    prop_oneof![Just(2usize), Just(3), Just(5)]
}

fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn state(n: usize, seed: u64) -> DensityMatrix {
    DensityMatrix::new(random_psd(n, &mut seeded(seed))).unwrap()
}

fn kind(d: usize, pick: usize) -> Perturbation {
    let kinds: &[Perturbation] = if d >= 3 { &Perturbation::ALL } else { &Perturbation::ALL[..2] };
    kinds[pick % kinds.len()]
}

fn local(rho: &DensityMatrix, d: usize, seed: u64) -> DensityMatrix {
    let mut rng = seeded(seed);
    let u = kron(&random_unitary(d, &mut rng), &random_unitary(d, &mut rng));
    let m = &(&u * rho.matrix()) * &u.adjoint();
    DensityMatrix::new(m.hermitian_part()).unwrap()
}

fn quick() -> OptimizerConfig {
    OptimizerConfig { starts: 8, ..OptimizerConfig::with_seed(3) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_reconstructs(n in 1usize..=25, seed in any::<u64>()) {
        let m = random_psd(n, &mut seeded(seed));
        let spec = eig_hermitian(&m).unwrap();
        prop_assert!((&spec.reconstruct() - &m).max_abs() < 1e-12);
        prop_assert!(spec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn entropy_is_unitarily_invariant(n in 2usize..=9, seed in any::<u64>()) {
        let rho = state(n, seed);
        let u = random_unitary(n, &mut seeded(seed ^ 1));
        let rotated = DensityMatrix::new((&(&u * rho.matrix()) * &u.adjoint()).hermitian_part()).unwrap();
        prop_assert!((von_neumann_entropy(&rho) - von_neumann_entropy(&rotated)).abs() < 1e-10);
    }

    #[test]
    fn normality_is_adjoint_symmetric(n in 1usize..=6, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let m = &random_unitary(n, &mut rng) * &random_psd(n, &mut rng);
        prop_assert_eq!(is_normal(&m, 1e-10).unwrap(), is_normal(&m.adjoint(), 1e-10).unwrap());
    }

    #[test]
    fn partial_traces_keep_unit_trace(da in 1usize..=4, db in 1usize..=4, seed in any::<u64>(), traced in side()) {
        let rho = state(da * db, seed);
        let m = partial_trace(&rho, da, db, traced).unwrap();
        prop_assert_eq!(m.dim(), if traced == Side::A { db } else { da });
        prop_assert!((m.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn state_files_round_trip(d in prime(), seed in any::<u64>(), s in side()) {
        let (spec, _) = random_zero_discord(d, s, &mut seeded(seed)).unwrap();
        let back = StateFile::parse(&StateFile::from_circulant(&spec).to_json()).unwrap().build().unwrap();
        prop_assert_eq!(back.circulant.unwrap(), spec);
        let w = random_bell_weights(d, &mut seeded(seed));
        let back = StateFile::parse(&StateFile::from_bell(&w).to_json()).unwrap().build().unwrap();
        prop_assert_eq!(back.bell.unwrap(), w);
    }

    #[test]
    fn generated_families_pass_both_checkers(d in prime(), seed in any::<u64>(), s in side()) {
        let (spec, _) = random_zero_discord(d, s, &mut seeded(seed)).unwrap();
        prop_assert!(circulant_theorem_check(&spec, s, THEOREM_TOL).unwrap().zero_discord);
        let rho = circulant_state(&spec).unwrap();
        prop_assert!(structural_discord_zero(&rho, d, s, STRUCTURAL_TOL).unwrap().zero_discord);
    }

    #[test]
    fn closed_form_and_general_criterion_agree(d in prime(), seed in any::<u64>(), s in side(), check in side(), pick in 0usize..4) {
        let mut rng = seeded(seed);
        let spec = if pick == 3 {
            random_zero_discord(d, s, &mut rng).unwrap().0
        } else {
            random_perturbed(d, s, kind(d, pick), 1e-2, &mut rng).unwrap()
        };
        let rho = circulant_state(&spec).unwrap();
        let t = circulant_theorem_check(&spec, check, THEOREM_TOL).unwrap();
        let g = structural_discord_zero(&rho, d, check, STRUCTURAL_TOL).unwrap();
        prop_assert_eq!(t.zero_discord, g.zero_discord);
        if t.zero_discord {
            prop_assert!(circulant_necessary_conditions(&spec, check, THEOREM_TOL).unwrap().passed());
        }
    }

    #[test]
    fn negative_verdicts_carry_checkable_witnesses(d in prime(), seed in any::<u64>(), s in side(), pick in 0usize..3) {
        let spec = random_perturbed(d, s, kind(d, pick), 1e-2, &mut seeded(seed)).unwrap();
        let rho = circulant_state(&spec).unwrap();
        let v = structural_discord_zero(&rho, d, s, STRUCTURAL_TOL).unwrap();
        prop_assert!(!v.zero_discord);
        let blocks = extract_blocks(&rho, d, s).unwrap();
        match v.witness.unwrap() {
            Witness::Commutator { first, second, .. } => {
                let (x, y) = (blocks.block(first.0, first.1), blocks.block(second.0, second.1));
                let bound = STRUCTURAL_TOL * (x.frobenius_norm() * y.frobenius_norm()).max(1.0);
                prop_assert!(commutator_norm(x, y).unwrap() > bound);
            }
            Witness::NonNormal { block, .. } => prop_assert!(!is_normal(blocks.block(block.0, block.1), STRUCTURAL_TOL).unwrap()),
            w => prop_assert!(false, "unexpected witness {:?}", w),
        }
    }

    #[test]
    fn bell_classical_means_both_sides(d in prime(), seed in any::<u64>(), alpha in 0usize..5) {
        let mut rng = seeded(seed);
        let w = if alpha < d {
            BellWeights::classical(d, alpha, &discordant::sampling::random_pi(d, &mut rng)).unwrap()
        } else {
            random_bell_weights(d, &mut rng)
        };
        let rho = circulant_state(&bell_diagonal_state(&w).unwrap()).unwrap();
        let a = structural_discord_zero(&rho, d, Side::A, STRUCTURAL_TOL).unwrap().zero_discord;
        let b = structural_discord_zero(&rho, d, Side::B, STRUCTURAL_TOL).unwrap().zero_discord;
        if bell_zero_discord_check(&w, 1e-12).unwrap().zero_discord {
            prop_assert!(a && b);
        }
        prop_assert_eq!(a, b);
    }

    #[test]
    fn classical_decomposition_reassembles(d in prime(), seed in any::<u64>(), s in side()) {
        let (spec, _) = random_zero_discord(d, s, &mut seeded(seed)).unwrap();
        let rho = circulant_state(&spec).unwrap();
        let parts = classical_decomposition(&rho, d, s).unwrap();
        prop_assert!((&reassemble(&parts, s) - rho.matrix()).max_abs() <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn classical_correlation_is_bounded_by_mutual_information(d in 2usize..=3, seed in any::<u64>(), s in side()) {
        let rho = state(d * d, seed);
        let r = discord(&rho, d, s, &quick()).unwrap();
        prop_assert!(r.classical_correlation <= r.mutual_information + 1e-9);
        prop_assert!(r.discord >= -1e-7);
        prop_assert!((r.discord - (r.mutual_information - r.classical_correlation)).abs() <= 1e-12 || r.discord == 0.0);
    }

    #[test]
    fn discord_is_deterministic(seed in any::<u64>(), s in side()) {
        let rho = state(9, seed);
        prop_assert_eq!(discord(&rho, 3, s, &quick()).unwrap(), discord(&rho, 3, s, &quick()).unwrap());
    }

    #[test]
    fn discord_is_local_unitary_invariant(seed in any::<u64>(), s in side()) {
        let rho = state(4, seed);
        let cfg = OptimizerConfig::with_seed(5);
        let x = discord(&rho, 2, s, &cfg).unwrap().discord;
        let y = discord(&local(&rho, 2, seed ^ 7), 2, s, &cfg).unwrap().discord;
        prop_assert!((x - y).abs() <= 2e-6, "{} vs {}", x, y);
    }

    #[test]
    fn bell_diagonal_discord_is_side_symmetric(d in 2usize..=3, seed in any::<u64>()) {
        let w = random_bell_weights(d, &mut seeded(seed));
        let rho = circulant_state(&bell_diagonal_state(&w).unwrap()).unwrap();
        let cfg = OptimizerConfig::with_seed(5);
        let a = discord(&rho, d, Side::A, &cfg).unwrap().discord;
        let b = discord(&rho, d, Side::B, &cfg).unwrap().discord;
        prop_assert!((a - b).abs() <= 2e-6, "{} vs {}", a, b);
    }
}
