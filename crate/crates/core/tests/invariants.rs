use contbound::afw::jordan_decompose;
use contbound::bounds::{audenaert_bound, entropy_energy_bound, winter_energy_bound};
use contbound::classical::{shannon_entropy, JointDistribution};
use contbound::hamiltonians::{g, SpectrumSequence};
use contbound::harness::sampling::interpolate_toward;
use contbound::linalg::{compress_to_support, mirsky_rearrange, trace_distance, CMatrix, DensityOperator};
use contbound::random::{haar_unitary, random_density, random_simplex, rng_for};
use proptest::prelude::*;

fn pair(seed: u64, dim: usize) -> (DensityOperator, DensityOperator) {
    let mut rng = rng_for(seed, 0);
    let r1 = 1 + (seed as usize) % dim;
    let r2 = 1 + (seed as usize / 7) % dim;
    (random_density(dim, r1, &mut rng), random_density(dim, r2, &mut rng))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_distance_is_a_bounded_symmetric(seed in any::<u64>(), dim in 2usize..12) {
        let (a, b) = pair(seed, dim);
        let ab = trace_distance(&a, &b).unwrap();
        let ba = trace_distance(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&ab));
        prop_assert!(trace_distance(&a, &a).unwrap() < 1e-12);
    }

    /// Half the l1 distance of sorted spectra is at most the trace distance.
    #[test]
    fn sorted_spectra_are_closer(seed in any::<u64>(), dim in 2usize..16) {
        let (a, b) = pair(seed, dim);
        let spec: f64 = a.eigenvalues().iter().zip(b.eigenvalues()).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0;
        prop_assert!(spec <= trace_distance(&a, &b).unwrap() + 1e-9);
        let r = mirsky_rearrange(&a, &b).unwrap();
        prop_assert!((trace_distance(&a, &r).unwrap() - spec).abs() < 1e-9);
        prop_assert!((r.entropy() - b.entropy()).abs() < 1e-9);
    }

    #[test]
    fn entropy_at_most_log_rank(seed in any::<u64>(), dim in 1usize..16) {
        let (a, _) = pair(seed, dim);
        prop_assert!(a.entropy() >= -1e-12);
        prop_assert!(a.entropy() <= (a.rank() as f64).ln() + 1e-9);
    }

    #[test]
    fn folding_onto_support_lowers_entropy(seed in any::<u64>(), dim in 2usize..24, n in 1usize..24) {
        let n = n.min(dim);
        let mut rng = rng_for(seed, 1);
        let p = random_simplex(dim, &mut rng);
        let basis: CMatrix = haar_unitary(dim, &mut rng);
        let sigma = DensityOperator::from_spectrum(&p, &basis).unwrap();
        let folded = compress_to_support(&sigma, &basis, n).unwrap();
        prop_assert!(folded.entropy() <= sigma.entropy() + 1e-9);
        prop_assert!(folded.rank() <= n);
    }

    #[test]
    fn interpolation_hits_target(seed in any::<u64>(), dim in 2usize..10, eps in 0.0f64..1.0) {
        let (a, b) = pair(seed, dim);
        let d0 = trace_distance(&a, &b).unwrap();
        let s = interpolate_toward(&a, &b, eps).unwrap();
        prop_assert!((trace_distance(&a, &s).unwrap() - d0.min(eps)).abs() < 1e-9);
    }

    #[test]
    fn audenaert_holds(seed in any::<u64>(), dim in 2usize..10) {
        let (a, b) = pair(seed, dim);
        let eps = trace_distance(&a, &b).unwrap().min(1.0);
        prop_assert!((a.entropy() - b.entropy()).abs() <= audenaert_bound(dim, eps).unwrap() + 1e-9);
    }

    #[test]
    fn energy_bounds_are_monotone(e in 0.01f64..20.0, eps in 0.001f64..0.99, de in 0.0f64..5.0, deps in 0.0f64..0.01) {
        let spec = SpectrumSequence::number_operator();
        let base = entropy_energy_bound(&spec, e, eps).unwrap();
        prop_assert!(entropy_energy_bound(&spec, e + de, eps).unwrap() >= base - 1e-12);
        prop_assert!(entropy_energy_bound(&spec, e, (eps + deps).min(1.0)).unwrap() >= base - 1e-12);
        prop_assert!(winter_energy_bound(&spec, e, eps).unwrap() >= 0.0);
    }

    #[test]
    fn g_is_increasing_and_concave(x in 0.0f64..100.0, h in 1e-3f64..1.0) {
        let (a, b, c) = (g(x).unwrap(), g(x + h).unwrap(), g(x + 2.0 * h).unwrap());
        prop_assert!(b > a);
        prop_assert!(a + c <= 2.0 * b + 1e-12);
    }

    #[test]
    fn jordan_parts_balance(seed in any::<u64>(), n in 2usize..30) {
        let mut rng = rng_for(seed, 2);
        let mu = random_simplex(n, &mut rng);
        let nu = random_simplex(n, &mut rng);
        let j = jordan_decompose(&mu, &nu).unwrap();
        prop_assert!((j.masses.0 - j.epsilon).abs() < 1e-12);
        prop_assert!((j.masses.1 - j.epsilon).abs() < 1e-12);
        for i in 0..n {
            prop_assert!(j.plus[i] * j.minus[i] == 0.0);
            prop_assert!((mu[i] - nu[i] - j.epsilon * (j.plus[i] - j.minus[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn total_correlation_nonnegative(seed in any::<u64>(), d1 in 1usize..8, d2 in 1usize..8, d3 in 1usize..4) {
        let mut rng = rng_for(seed, 3);
        let w = random_simplex(d1 * d2 * d3, &mut rng);
        let entries = w.into_iter().enumerate().map(|(i, p)| (vec![i / (d2 * d3), (i / d3) % d2, i % d3], p)).collect();
        let joint = JointDistribution::normalized(3, entries).unwrap();
        prop_assert!(joint.total_correlation() >= 0.0);
        let a = random_simplex(d1, &mut rng);
        let b = random_simplex(d2, &mut rng);
        let prod = JointDistribution::product(&[&a, &b]).unwrap();
        prop_assert!(prod.total_correlation() < 1e-12);
        prop_assert!((prod.equivocation().unwrap() - shannon_entropy(&a)).abs() < 1e-12);
    }
}
