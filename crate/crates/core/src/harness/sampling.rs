//! Seeded generators of state pairs at a prescribed distance.
//!
//! Each sampler draws the constrained state first, draws the partner
//! independently, then mixes the partner toward the first state until the
//! distance is at most the target. All quantities involved (trace distance
//! of states, blockwise trace distance of q-c states, total variation of
//! measures) scale linearly along that segment, so the mixing weight is
//! available in closed form.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::Exp1;

use crate::bounds::{Constraint, QcEnsembleState};
use crate::classical::JointDistribution;
use crate::error::{Error, Result};
use crate::linalg::{trace_distance, CMatrix, DensityOperator, C64};
use crate::oscillator::{default_cutoff, Atom, CoherentMixture};
use crate::random::{haar_unitary, near_identity_unitary, random_density, random_simplex};

/// Weight `t` such that `(1 - t) sigma + t rho` sits at distance
/// `min(dist, eps)` from `rho`.
pub fn mixing_weight(dist: f64, eps: f64) -> f64 {
    if dist <= eps {
        0.0
    } else {
        1.0 - eps / dist
    }
}

/// `(1 - t) sigma + t rho` at trace distance at most `eps` from `rho`.
pub fn interpolate_toward(rho: &DensityOperator, sigma: &DensityOperator, eps: f64) -> Result<DensityOperator> {
    let t = mixing_weight(trace_distance(rho, sigma)?, eps);
    if t == 0.0 {
        return Ok(sigma.clone());
    }
    DensityOperator::mixture(&[1.0 - t, t], &[sigma, rho])
}

/// Random weights on a random support of size `1..=n`, or on `support` when
/// given.
fn random_weights<R: Rng + ?Sized>(n: usize, support: Option<&[usize]>, rng: &mut R) -> Vec<f64> {
    let chosen: Vec<usize> = match support {
        Some(s) => s.to_vec(),
        None => {
            let k = rng.random_range(1..=n);
            sample_indices(rng, n, k).into_vec()
        }
    };
    let w = random_simplex(chosen.len(), rng);
    let mut p = vec![0.0; n];
    for (i, x) in chosen.into_iter().zip(w) {
        p[i] = x;
    }
    p
}

/// Mixes `p` toward its lowest-energy point until `sum p_i levels_i <= energy`.
fn cap_weights(p: &mut [f64], levels: &[f64], energy: f64) -> Result<()> {
    let mean: f64 = p.iter().zip(levels).map(|(a, b)| a * b).sum();
    if mean <= energy {
        return Ok(());
    }
    let (low, &e_low) = levels
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty levels");
    if e_low > energy {
        return Err(Error::InfeasibleConstraint(format!("lowest level {e_low} exceeds cap {energy}")));
    }
    let s = (mean - energy) / (mean - e_low);
    for x in p.iter_mut() {
        *x *= 1.0 - s;
    }
    p[low] += s;
    Ok(())
}

/// Mixes `rho` toward the computational ground state until its energy is at
/// most `energy`.
fn cap_state(rho: DensityOperator, levels: &[f64], energy: f64) -> Result<DensityOperator> {
    let e = rho.diagonal_expectation(levels)?;
    if e <= energy {
        return Ok(rho);
    }
    if levels[0] > energy {
        return Err(Error::InfeasibleConstraint(format!("ground level {} exceeds cap {energy}", levels[0])));
    }
    let s = (e - energy) / (e - levels[0]);
    let mut ground = vec![0.0; rho.dim()];
    ground[0] = 1.0;
    let ground = DensityOperator::from_probabilities(&ground)?;
    DensityOperator::mixture(&[1.0 - s, s], &[&rho, &ground])
}

fn check_rank(r: usize, dim: usize) -> Result<()> {
    if r == 0 || r > dim {
        return Err(Error::InfeasibleConstraint(format!("rank {r} at dimension {dim}")));
    }
    Ok(())
}

fn in_basis(p: &[f64], basis: Option<&CMatrix>) -> Result<DensityOperator> {
    match basis {
        Some(u) => DensityOperator::from_spectrum(p, u),
        None => DensityOperator::from_probabilities(p),
    }
}

/// Diagonal weights on a product space `d_a x d_b` obeying `constraint` on
/// the first factor; `levels` lists the first factor's energies.
fn constrained_weights<R: Rng + ?Sized>(
    d_a: usize,
    d_b: usize,
    constraint: Option<&Constraint>,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let n = d_a * d_b;
    match constraint {
        None => Ok(random_weights(n, None, rng)),
        Some(Constraint::Rank(r)) => {
            check_rank(*r, d_a)?;
            let rows = sample_indices(rng, d_a, *r).into_vec();
            let support: Vec<usize> = rows.iter().flat_map(|&a| (0..d_b).map(move |b| a * d_b + b)).collect();
            // random sub-support so that the joint state is not always full rank
            let k = rng.random_range(1..=support.len());
            let pick: Vec<usize> = sample_indices(rng, support.len(), k).into_iter().map(|i| support[i]).collect();
            Ok(random_weights(n, Some(&pick), rng))
        }
        Some(Constraint::Energy { spec, energy }) => {
            let la = spec.values(d_a)?;
            let levels: Vec<f64> = (0..n).map(|i| la[i / d_b]).collect();
            let mut p = random_weights(n, None, rng);
            cap_weights(&mut p, &levels, *energy)?;
            Ok(p)
        }
    }
}

/// Commuting states on `C^dim`, diagonal in a shared random basis, with
/// `rho` obeying `constraint` (and `sigma` too when `both`), at trace
/// distance at most `eps`.
///
/// Under an energy constraint the shared basis is the eigenbasis of the
/// Hamiltonian, since a generic basis has no vector of energy near the
/// ground level.
pub fn sample_commuting_pair<R: Rng + ?Sized>(
    dim: usize,
    constraint: Option<&Constraint>,
    both: bool,
    eps: f64,
    rng: &mut R,
) -> Result<(DensityOperator, DensityOperator)> {
    sample_commuting_bipartite(dim, 1, constraint, both, eps, rng)
}

/// As [`sample_commuting_pair`] on `C^{d_a} (x) C^{d_b}` with the constraint
/// applied to the first marginal; the shared basis is a product of local
/// bases.
pub fn sample_commuting_bipartite<R: Rng + ?Sized>(
    d_a: usize,
    d_b: usize,
    constraint: Option<&Constraint>,
    both: bool,
    eps: f64,
    rng: &mut R,
) -> Result<(DensityOperator, DensityOperator)> {
    let energy = matches!(constraint, Some(Constraint::Energy { .. }));
    let p = constrained_weights(d_a, d_b, constraint, rng)?;
    let q = constrained_weights(d_a, d_b, if both { constraint } else { None }, rng)?;
    let tv = 0.5 * p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>();
    let t = mixing_weight(tv, eps);
    let q: Vec<f64> = p.iter().zip(&q).map(|(a, b)| (1.0 - t) * b + t * a).collect();
    let u_a = if energy { None } else { Some(haar_unitary(d_a, rng)) };
    let u_b = if d_b > 1 { Some(haar_unitary(d_b, rng)) } else { None };
    let basis = match (u_a, u_b) {
        (None, None) => None,
        (Some(a), None) => Some(a),
        (a, Some(b)) => Some(a.unwrap_or_else(|| CMatrix::identity(d_a, d_a)).kronecker(&b)),
    };
    Ok((in_basis(&p, basis.as_ref())?, in_basis(&q, basis.as_ref())?))
}

/// Random state of random rank obeying `constraint`; energies refer to the
/// computational basis.
pub fn sample_state<R: Rng + ?Sized>(dim: usize, constraint: Option<&Constraint>, rng: &mut R) -> Result<DensityOperator> {
    match constraint {
        None => Ok(random_density(dim, rng.random_range(1..=dim), rng)),
        Some(Constraint::Rank(r)) => {
            check_rank(*r, dim)?;
            let k = rng.random_range(1..=*r);
            let inner = random_density(*r, k, rng);
            let v = haar_unitary(dim, rng).columns(0, *r).into_owned();
            DensityOperator::new(&v * inner.matrix().as_ref() * v.adjoint())
        }
        Some(Constraint::Energy { spec, energy }) => {
            let levels = spec.values(dim)?;
            let rho = if rng.random_bool(0.5) {
                random_density(dim, rng.random_range(1..=dim), rng)
            } else {
                near_thermal(&levels, *energy, rng)?
            };
            cap_state(rho, &levels, *energy)
        }
    }
}

/// Noisy thermal weights at a random inverse temperature around the one
/// matching `energy`, slightly rotated out of the energy basis. These sit
/// close to the entropy maximizers that make energy bounds nearly tight.
fn near_thermal<R: Rng + ?Sized>(levels: &[f64], energy: f64, rng: &mut R) -> Result<DensityOperator> {
    let spread = levels[levels.len() - 1] - levels[0];
    if spread == 0.0 {
        return Ok(random_density(levels.len(), levels.len(), rng));
    }
    let target = (energy - levels[0]).max(1e-3 * spread);
    let beta = rng.random_range(0.3..3.0) / target;
    let mut w: Vec<f64> = levels
        .iter()
        .map(|e| (-(e - levels[0]) * beta).exp() * rng.sample::<f64, _>(Exp1))
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    if rng.random_bool(0.5) {
        return DensityOperator::from_probabilities(&w);
    }
    let u = near_identity_unitary(levels.len(), rng.random_range(0.0..0.2), rng);
    DensityOperator::from_spectrum(&w, &u)
}

/// General (non-commuting) pair: `rho` obeys `constraint`, `sigma` as well
/// when `both`, at trace distance at most `eps`.
pub fn sample_general_pair<R: Rng + ?Sized>(
    dim: usize,
    constraint: Option<&Constraint>,
    both: bool,
    eps: f64,
    rng: &mut R,
) -> Result<(DensityOperator, DensityOperator)> {
    let rho = sample_state(dim, constraint, rng)?;
    let sigma = sample_state(dim, if both { constraint } else { None }, rng)?;
    let sigma = interpolate_toward(&rho, &sigma, eps)?;
    Ok((rho, sigma))
}

/// Pair with `rho` drawn under `first` and `sigma` under `second`; here
/// `rho` is the state moved toward `sigma`, so only `second` survives the
/// mixing exactly.
pub fn sample_split_pair<R: Rng + ?Sized>(
    dim: usize,
    first: Option<&Constraint>,
    second: Option<&Constraint>,
    eps: f64,
    rng: &mut R,
) -> Result<(DensityOperator, DensityOperator)> {
    let rho = sample_state(dim, first, rng)?;
    let sigma = sample_state(dim, second, rng)?;
    let rho = interpolate_toward(&sigma, &rho, eps)?;
    Ok((rho, sigma))
}

fn sample_qc<R: Rng + ?Sized>(dim: usize, k: usize, constraint: Option<&Constraint>, rng: &mut R) -> Result<QcEnsembleState> {
    let weights = random_simplex(k, rng);
    let comps = match constraint {
        Some(Constraint::Rank(r)) => {
            // common support so that rank rho_A <= r
            check_rank(*r, dim)?;
            let v = haar_unitary(dim, rng).columns(0, *r).into_owned();
            weights
                .into_iter()
                .map(|w| {
                    let inner = random_density(*r, rng.random_range(1..=*r), rng);
                    Ok((w, DensityOperator::new(&v * inner.matrix().as_ref() * v.adjoint())?))
                })
                .collect::<Result<Vec<_>>>()?
        }
        other => weights
            .into_iter()
            .map(|w| Ok((w, sample_state(dim, other, rng)?)))
            .collect::<Result<Vec<_>>>()?,
    };
    QcEnsembleState::new(comps)
}

/// Blockwise `(1 - t) sigma + t rho` for q-c states with aligned labels.
pub fn mix_qc(rho: &QcEnsembleState, sigma: &QcEnsembleState, t: f64) -> Result<QcEnsembleState> {
    let n = rho.components().len().max(sigma.components().len());
    let dim = rho.dim_a();
    let mut comps = Vec::with_capacity(n);
    for k in 0..n {
        let a = rho.components().get(k);
        let b = sigma.components().get(k);
        let pa = a.map_or(0.0, |c| t * c.0);
        let pb = b.map_or(0.0, |c| (1.0 - t) * c.0);
        let w = pa + pb;
        let state = match (a, b) {
            _ if w == 0.0 => a.or(b).map(|c| c.1.clone()).expect("one side present"),
            (Some(a), Some(b)) => DensityOperator::mixture(&[pa / w, pb / w], &[&a.1, &b.1])?,
            (Some(a), None) => a.1.clone(),
            (None, Some(b)) => b.1.clone(),
            (None, None) => unreachable!(),
        };
        if state.dim() != dim {
            return Err(Error::DimMismatch(dim, state.dim()));
        }
        comps.push((w, state));
    }
    let total: f64 = comps.iter().map(|c| c.0).sum();
    for c in &mut comps {
        c.0 /= total;
    }
    QcEnsembleState::new(comps)
}

/// Pair of q-c states with `components` classical labels on `C^dim (x) C^K`.
pub fn sample_qc_pair<R: Rng + ?Sized>(
    dim: usize,
    components: usize,
    constraint: Option<&Constraint>,
    both: bool,
    eps: f64,
    rng: &mut R,
) -> Result<(QcEnsembleState, QcEnsembleState)> {
    let rho = sample_qc(dim, components, constraint, rng)?;
    let sigma = sample_qc(dim, components, if both { constraint } else { None }, rng)?;
    let t = mixing_weight(rho.trace_distance(&sigma)?, eps);
    let sigma = if t == 0.0 { sigma } else { mix_qc(&rho, &sigma, t)? };
    Ok((rho, sigma))
}

/// Pair of two-qubit states of random ranks.
pub fn sample_two_qubit_pair<R: Rng + ?Sized>(eps: f64, rng: &mut R) -> Result<(DensityOperator, DensityOperator)> {
    sample_general_pair(4, None, false, eps, rng)
}

/// Bivariate distributions on `d1 x d2` values; the constraint refers to
/// the first variable (its support size or its mean energy).
pub fn sample_classical_pair<R: Rng + ?Sized>(
    d1: usize,
    d2: usize,
    constraint: Option<&Constraint>,
    eps: f64,
    rng: &mut R,
) -> Result<(JointDistribution, JointDistribution)> {
    let to_joint = |w: Vec<f64>| {
        JointDistribution::normalized(2, w.into_iter().enumerate().map(|(i, p)| (vec![i / d2, i % d2], p)).collect())
    };
    let p = to_joint(constrained_weights(d1, d2, constraint, rng)?)?;
    let q = to_joint(random_weights(d1 * d2, None, rng))?;
    let t = mixing_weight(p.tv(&q)?, eps);
    let q = if t == 0.0 { q } else { q.mixture(&p, t)? };
    Ok((p, q))
}

fn random_point<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    let phi = std::f64::consts::TAU * rng.random::<f64>();
    C64::from_polar(r, phi)
}

fn random_mixture<R: Rng + ?Sized>(modes: usize, atoms: usize, radius: f64, cutoff: usize, rng: &mut R) -> Result<CoherentMixture> {
    let k = rng.random_range(1..=atoms.max(1));
    let w = random_simplex(k, rng);
    let list = w
        .into_iter()
        .map(|w| Atom::new((0..modes).map(|_| random_point(radius, rng)).collect(), w))
        .collect();
    CoherentMixture::with_cutoff(modes, list, cutoff)
}

/// Two-mode atomic measures with amplitudes in the disk of `radius`, at
/// total variation at most `eps`; the Fock cutoff covers the whole disk.
pub fn sample_oscillator_pair<R: Rng + ?Sized>(
    atoms: usize,
    radius: f64,
    eps: f64,
    rng: &mut R,
) -> Result<(CoherentMixture, CoherentMixture)> {
    let cutoff = default_cutoff(C64::new(radius, 0.0));
    let mu = random_mixture(2, atoms, radius, cutoff, rng)?;
    let nu = random_mixture(2, atoms, radius, cutoff, rng)?;
    let t = mixing_weight(crate::oscillator::measure_tv(&mu, &nu)?, eps);
    if t == 0.0 {
        return Ok((mu, nu));
    }
    let mut list: Vec<Atom> = nu.atoms().iter().map(|a| Atom::new(a.z.clone(), (1.0 - t) * a.weight)).collect();
    list.extend(mu.atoms().iter().map(|a| Atom::new(a.z.clone(), t * a.weight)));
    let total: f64 = list.iter().map(|a| a.weight).sum();
    for a in &mut list {
        a.weight /= total;
    }
    Ok((mu, CoherentMixture::with_cutoff(2, list, cutoff)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::mean_energy;
    use crate::hamiltonians::SpectrumSequence;
    use crate::linalg::{difference, Subsystem};
    use crate::random::rng_for;
    use approx::assert_abs_diff_eq;

    fn energy(e: f64) -> Constraint {
        Constraint::Energy {
            spec: SpectrumSequence::number_operator(),
            energy: e,
        }
    }

    #[test]
    fn zero_target_gives_equal_states() {
        let mut rng = rng_for(1, 0);
        let (rho, sigma) = sample_commuting_pair(6, None, false, 0.0, &mut rng).unwrap();
        assert!(trace_distance(&rho, &sigma).unwrap() < 1e-12);
    }

    #[test]
    fn distances_hit_target() {
        let mut rng = rng_for(2, 0);
        for eps in [0.01, 0.1, 0.3] {
            let (rho, sigma) = sample_general_pair(8, None, false, eps, &mut rng).unwrap();
            let d = trace_distance(&rho, &sigma).unwrap();
            assert!(d <= eps + 1e-9, "{d} > {eps}");
            let (rho, sigma) = sample_commuting_pair(8, Some(&Constraint::Rank(2)), false, eps, &mut rng).unwrap();
            assert!(trace_distance(&rho, &sigma).unwrap() <= eps + 1e-9);
            assert!(rho.rank() <= 2);
            let comm = rho.matrix().as_ref() * sigma.matrix().as_ref() - sigma.matrix().as_ref() * rho.matrix().as_ref();
            assert!(comm.norm() < 1e-10);
        }
    }

    #[test]
    fn rank_one_pairs_have_equal_entropy() {
        let mut rng = rng_for(3, 0);
        let (rho, sigma) = sample_split_pair(5, Some(&Constraint::Rank(1)), Some(&Constraint::Rank(1)), 1.0, &mut rng).unwrap();
        assert_abs_diff_eq!(rho.entropy(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sigma.entropy(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn energy_caps_hold() {
        let mut rng = rng_for(4, 0);
        let c = energy(1.0);
        let spec = SpectrumSequence::number_operator();
        for _ in 0..20 {
            let (rho, sigma) = sample_commuting_pair(64, Some(&c), true, 0.2, &mut rng).unwrap();
            assert!(mean_energy(&rho, &spec).unwrap() <= 1.0 + 1e-9);
            assert!(mean_energy(&sigma, &spec).unwrap() <= 1.0 + 1e-9);
            let (rho, _) = sample_general_pair(16, Some(&c), false, 0.2, &mut rng).unwrap();
            assert!(mean_energy(&rho, &spec).unwrap() <= 1.0 + 1e-9);
        }
        let infeasible = Constraint::Energy {
            spec: SpectrumSequence::explicit(vec![2.0, 3.0, 4.0]).unwrap(),
            energy: 1.0,
        };
        assert!(matches!(
            sample_commuting_pair(3, Some(&infeasible), false, 0.1, &mut rng),
            Err(Error::InfeasibleConstraint(_))
        ));
    }

    #[test]
    fn bipartite_marginal_constraints() {
        let mut rng = rng_for(5, 0);
        let (rho, _) = sample_commuting_bipartite(4, 3, Some(&Constraint::Rank(2)), false, 0.1, &mut rng).unwrap();
        assert!(rho.partial_trace(4, 3, Subsystem::A).unwrap().rank() <= 2);
        let (rho, sigma) = sample_commuting_bipartite(4, 3, Some(&energy(0.5)), true, 0.1, &mut rng).unwrap();
        let levels = [0.0, 1.0, 2.0, 3.0];
        for s in [&rho, &sigma] {
            let a = s.partial_trace(4, 3, Subsystem::A).unwrap();
            assert!(a.diagonal_expectation(&levels).unwrap() <= 0.5 + 1e-9);
        }
        assert!(difference(&rho, &sigma).unwrap().trace_norm() <= 0.2 + 1e-9);
    }

    #[test]
    fn qc_pairs() {
        let mut rng = rng_for(6, 0);
        let (rho, sigma) = sample_qc_pair(6, 3, Some(&Constraint::Rank(2)), false, 0.15, &mut rng).unwrap();
        assert!(rho.reduced_a().unwrap().rank() <= 2);
        assert!(rho.trace_distance(&sigma).unwrap() <= 0.15 + 1e-9);
        let direct = trace_distance(&rho.assemble().unwrap(), &sigma.assemble().unwrap()).unwrap();
        assert!(direct <= 0.15 + 1e-9);
    }

    #[test]
    fn classical_and_oscillator_pairs() {
        let mut rng = rng_for(7, 0);
        let (p, q) = sample_classical_pair(6, 4, Some(&Constraint::Rank(2)), 0.2, &mut rng).unwrap();
        assert!(p.support_size(0).unwrap() <= 2);
        assert!(p.tv(&q).unwrap() <= 0.2 + 1e-12);
        let (mu, nu) = sample_oscillator_pair(3, 1.0, 0.25, &mut rng).unwrap();
        assert!(mu.cutoff() <= 32);
        assert!(crate::oscillator::measure_tv(&mu, &nu).unwrap() <= 0.25 + 1e-12);
        assert!(mu.atoms().iter().all(|a| a.z.iter().all(|z| z.norm() <= 1.0)));
    }
}
