//! Mutual information and its continuity bounds for commuting and
//! classical oscillator states.

use crate::error::{check_unit_interval, Result};
use crate::hamiltonians::{g_unchecked, max_entropy, SpectrumSequence};
use crate::linalg::{DensityOperator, Subsystem};

use super::Envelope;

#[derive(Debug, Clone, PartialEq)]
pub enum MiMode {
    /// `I(rho) - I(sigma) <= 2 eps ln r + 2 g(eps)`, `r = rank rho_A1`.
    RankOneSided { rank: usize },
    /// Both directions, with the rank of a marginal of each state.
    RankTwoSided { rank_rho: usize, rank_sigma: usize },
    /// `|I(rho) - I(sigma)| <= 2 eps F(E/eps) + 2 g(eps)` for commuting states
    /// whose first marginals have energy at most `E`.
    EnergyCommuting { spec: SpectrumSequence, energy: f64 },
    /// `I(rho(mu)) - I(rho(nu)) <= eps g(E/eps) + 2 g(eps)` for two-mode
    /// classical states, the first mode of `mu` having mean photon number
    /// at most `E`, with `eps` the total variation of the measures.
    ClassicalOscillator { energy: f64 },
}

fn rank_term(rank: usize, eps: f64) -> f64 {
    2.0 * eps * (rank.max(1) as f64).ln() + 2.0 * g_unchecked(eps)
}

pub fn mi_bound(mode: &MiMode, eps: f64) -> Result<Envelope> {
    check_unit_interval("epsilon", eps)?;
    let zero = |one_sided: bool| {
        if one_sided {
            Envelope::one_sided(0.0)
        } else {
            Envelope::symmetric(0.0)
        }
    };
    Ok(match mode {
        MiMode::RankOneSided { rank } => {
            if eps == 0.0 {
                return Ok(zero(true));
            }
            Envelope::one_sided(rank_term(*rank, eps))
        }
        MiMode::RankTwoSided { rank_rho, rank_sigma } => Envelope {
            lower: if eps == 0.0 { 0.0 } else { rank_term(*rank_sigma, eps) },
            upper: if eps == 0.0 { 0.0 } else { rank_term(*rank_rho, eps) },
        },
        MiMode::EnergyCommuting { spec, energy } => {
            if eps == 0.0 {
                return Ok(zero(false));
            }
            Envelope::symmetric(2.0 * eps * max_entropy(spec, energy / eps)? + 2.0 * g_unchecked(eps))
        }
        MiMode::ClassicalOscillator { energy } => {
            Envelope::one_sided(crate::oscillator::classical_mi_bound(*energy, eps)?)
        }
    })
}

/// `I(A:B) = S(rho_A) + S(rho_B) - S(rho)` on `C^{d_a} (x) C^{d_b}`.
pub fn mutual_information(rho: &DensityOperator, d_a: usize, d_b: usize) -> Result<f64> {
    let a = rho.partial_trace(d_a, d_b, Subsystem::A)?;
    let b = rho.partial_trace(d_a, d_b, Subsystem::B)?;
    Ok(a.entropy() + b.entropy() - rho.entropy())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::tensor;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn zero_distance_gives_zero() {
        let modes = [
            MiMode::RankOneSided { rank: 3 },
            MiMode::RankTwoSided { rank_rho: 2, rank_sigma: 5 },
            MiMode::EnergyCommuting {
                spec: SpectrumSequence::number_operator(),
                energy: 1.0,
            },
            MiMode::ClassicalOscillator { energy: 1.0 },
        ];
        for m in &modes {
            assert_eq!(mi_bound(m, 0.0).unwrap().upper, 0.0);
        }
    }

    #[test]
    fn rank_example() {
        let env = mi_bound(&MiMode::RankOneSided { rank: 2 }, 0.25).unwrap();
        assert_abs_diff_eq!(env.upper, 0.5 * LN_2 + 2.0 * g_unchecked(0.25), epsilon = 1e-15);
        assert!(env.lower.is_infinite());
    }

    #[test]
    fn classical_form_is_tighter() {
        let spec = SpectrumSequence::number_operator();
        for e in [0.5, 1.0, 4.0] {
            for eps in [0.01, 0.1, 0.5, 1.0] {
                let q = mi_bound(&MiMode::EnergyCommuting { spec: spec.clone(), energy: e }, eps).unwrap();
                let c = mi_bound(&MiMode::ClassicalOscillator { energy: e }, eps).unwrap();
                assert!(c.upper < q.upper);
            }
        }
    }

    #[test]
    fn product_and_correlated_states() {
        let a = DensityOperator::from_probabilities(&[0.3, 0.7]).unwrap();
        let b = DensityOperator::from_probabilities(&[0.6, 0.1, 0.3]).unwrap();
        let ab = tensor(&a, &b).unwrap();
        assert_abs_diff_eq!(mutual_information(&ab, 2, 3).unwrap(), 0.0, epsilon = 1e-12);
        let corr = DensityOperator::from_probabilities(&[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_abs_diff_eq!(mutual_information(&corr, 2, 2).unwrap(), LN_2, epsilon = 1e-12);
    }
}
