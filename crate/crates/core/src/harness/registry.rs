//! Named bounds a campaign can exercise, each with its own pair sampler.

use rand::Rng;

use crate::afw::LaaClassParams;
use crate::bounds::{
    eof_bound, entropy_energy_bound, mean_energy, mi_bound, mixed_bound, mutual_information, qce_bound,
    refined_entropy_bound, two_sided_energy_bound, wootters_eof, BoundReport, Constraint, Envelope, MiMode,
};
use crate::classical::{alhejji_smith_bound, classical_energy_bound, classical_rank_bound};
use crate::error::{Error, Result};
use crate::linalg::{trace_distance, Subsystem};
use crate::oscillator::{classical_mi_value, mean_photon, measure_tv};
use crate::random::rng_for;

use super::config::CampaignConfig;
use super::sampling::{
    sample_classical_pair, sample_commuting_bipartite, sample_general_pair, sample_oscillator_pair, sample_qc_pair,
    sample_split_pair, sample_two_qubit_pair,
};

/// Registry order fixes the RNG stream of each bound.
pub const BOUNDS: [&str; 14] = [
    "sh-cb",
    "w-cb-2",
    "cor-3",
    "mixed",
    "qce-qc-1",
    "qce-qc-2",
    "qce-qc-1++",
    "qce-qc-2++",
    "i-2-1",
    "i-2-2",
    "eq-1-cb",
    "eq-2-cb",
    "ef-cb-1",
    "mi-c",
];

pub fn bound_index(name: &str) -> Option<usize> {
    BOUNDS.iter().position(|b| *b == name)
}

/// Stream id of one (bound, trial) pair.
pub fn stream_id(bound: usize, trial: usize) -> u64 {
    ((bound as u64) << 32) | trial as u64
}

/// Splits `dim` into `d_a x d_b` with `d_a` the largest divisor not above
/// `sqrt(dim)`.
pub fn split_dim(dim: usize) -> (usize, usize) {
    let mut a = (dim as f64).sqrt().floor() as usize;
    while a > 1 && dim % a != 0 {
        a -= 1;
    }
    let a = a.max(1);
    (a, dim / a)
}

/// Samples one pair for `name` at trial `trial` and judges the bound.
pub fn run_trial(cfg: &CampaignConfig, name: &str, trial: usize) -> Result<BoundReport> {
    let idx = bound_index(name).ok_or_else(|| Error::Config(format!("unknown bound {name:?}")))?;
    let mut rng = rng_for(cfg.seed, stream_id(idx, trial));
    let (dim, eps) = cfg.trial_point(trial);
    evaluate(cfg, name, dim, eps, &mut rng)
        .map(|r| r.input("trial", trial as f64).input("dim", dim as f64).input("eps", eps))
        .map_err(|e| Error::Trial {
            trial,
            source: Box::new(e),
        })
}

fn evaluate<R: Rng + ?Sized>(cfg: &CampaignConfig, name: &str, dim: usize, eps: f64, rng: &mut R) -> Result<BoundReport> {
    let energy = cfg.energy_constraint();
    let spec = &cfg.energy.spectrum;
    let e_cap = cfg.energy.energy;
    let rank = Constraint::Rank(cfg.rank.min(dim));
    Ok(match name {
        "sh-cb" => {
            let (rho, sigma) = sample_general_pair(dim, Some(&energy), true, eps, rng)?;
            let v = entropy_energy_bound(spec, e_cap, eps)?;
            BoundReport::from_envelope(name, Envelope::symmetric(v))
                .input("E", e_cap)
                .input("distance", trace_distance(&rho, &sigma)?)
                .judge(rho.entropy() - sigma.entropy())
        }
        "w-cb-2" => {
            let (rho, sigma) = sample_general_pair(dim, Some(&energy), false, eps, rng)?;
            BoundReport::new(name, refined_entropy_bound(&rho, spec, e_cap, eps)?)
                .input("E", e_cap)
                .input("distance", trace_distance(&rho, &sigma)?)
                .partner("unrefined", entropy_energy_bound(spec, e_cap, eps)?)
                .judge(rho.entropy() - sigma.entropy())
        }
        "cor-3" => {
            let (rho, sigma) = sample_general_pair(dim, Some(&energy), true, eps, rng)?;
            let (e_rho, e_sigma) = (mean_energy(&rho, spec)?, mean_energy(&sigma, spec)?);
            BoundReport::from_envelope(name, two_sided_energy_bound(spec, e_rho, e_sigma, eps)?)
                .input("E_rho", e_rho)
                .input("E_sigma", e_sigma)
                .input("distance", trace_distance(&rho, &sigma)?)
                .judge(rho.entropy() - sigma.entropy())
        }
        "mixed" => {
            let r = cfg.rank.min(dim);
            let (rho, sigma) = sample_split_pair(dim, Some(&energy), Some(&Constraint::Rank(r)), eps, rng)?;
            let e_rho = mean_energy(&rho, spec)?;
            let report = match mixed_bound(r, spec, e_rho, eps) {
                Ok(env) => BoundReport::from_envelope(name, env).judge(rho.entropy() - sigma.entropy()),
                // the rank side is undefined beyond eps = 1 - 1/r
                Err(Error::OutOfRange { .. }) => BoundReport::new(name, f64::NAN).not_applicable(),
                Err(e) => return Err(e),
            };
            report
                .input("E_rho", e_rho)
                .input("rank_sigma", r as f64)
                .input("distance", trace_distance(&rho, &sigma)?)
        }
        "qce-qc-1" | "qce-qc-1++" => {
            let both = name.ends_with("++");
            let (rho, sigma) = sample_qc_pair(dim, cfg.qc_components, Some(&rank), both, eps, rng)?;
            let r_rho = rho.reduced_a()?.rank().max(1);
            let r_sigma = sigma.reduced_a()?.rank().max(1);
            let upper = qce_bound(&Constraint::Rank(r_rho), eps, None)?;
            let env = if both {
                Envelope {
                    lower: qce_bound(&Constraint::Rank(r_sigma), eps, None)?,
                    upper,
                }
            } else {
                Envelope::one_sided(upper)
            };
            BoundReport::from_envelope(name, env)
                .input("rank_rho_A", r_rho as f64)
                .input("rank_sigma_A", r_sigma as f64)
                .input("distance", rho.trace_distance(&sigma)?)
                .judge(rho.conditional_entropy() - sigma.conditional_entropy())
        }
        "qce-qc-2" | "qce-qc-2++" => {
            let both = name.ends_with("++");
            let (rho, sigma) = sample_qc_pair(dim, cfg.qc_components, Some(&energy), both, eps, rng)?;
            let env = if both {
                Envelope::symmetric(qce_bound(&energy, eps, None)?)
            } else {
                Envelope::one_sided(qce_bound(&energy, eps, Some(&rho))?)
            };
            BoundReport::from_envelope(name, env)
                .input("E", e_cap)
                .input("E_rho_A", rho.energy_a(spec)?)
                .input("distance", rho.trace_distance(&sigma)?)
                .judge(rho.conditional_entropy() - sigma.conditional_entropy())
        }
        "i-2-1" | "i-2-2" => {
            let (d_a, d_b) = split_dim(dim);
            let (constraint, both) = if name == "i-2-1" {
                (Constraint::Rank(cfg.rank.min(d_a)), false)
            } else {
                (energy.clone(), true)
            };
            let (rho, sigma) = sample_commuting_bipartite(d_a, d_b, Some(&constraint), both, eps, rng)?;
            let mode = if name == "i-2-1" {
                let r_rho = rho.partial_trace(d_a, d_b, Subsystem::A)?.rank().max(1);
                let r_sigma = [Subsystem::A, Subsystem::B]
                    .into_iter()
                    .map(|s| sigma.partial_trace(d_a, d_b, s).map(|m| m.rank().max(1)))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .min()
                    .unwrap();
                MiMode::RankTwoSided {
                    rank_rho: r_rho,
                    rank_sigma: r_sigma,
                }
            } else {
                MiMode::EnergyCommuting {
                    spec: spec.clone(),
                    energy: e_cap,
                }
            };
            let lhs = mutual_information(&rho, d_a, d_b)? - mutual_information(&sigma, d_a, d_b)?;
            BoundReport::from_envelope(name, mi_bound(&mode, eps)?)
                .input("d_a", d_a as f64)
                .input("d_b", d_b as f64)
                .input("distance", trace_distance(&rho, &sigma)?)
                .judge(lhs)
        }
        "eq-1-cb" => {
            let (d1, d2) = split_dim(dim);
            let (p, q) = sample_classical_pair(d1, d2, Some(&Constraint::Rank(cfg.rank.min(d1))), eps, rng)?;
            let params = LaaClassParams::conditional_entropy_qc();
            let (np, nq) = (p.support_size(0)?, q.support_size(0)?);
            let mut report = BoundReport::from_envelope(
                name,
                Envelope {
                    lower: classical_rank_bound(&params, nq, eps)?,
                    upper: classical_rank_bound(&params, np, eps)?,
                },
            );
            if eps <= 1.0 - 1.0 / d1 as f64 {
                report = report.partner("alphabet-optimal", alhejji_smith_bound(d1, eps)?);
            }
            report
                .input("support_p1", np as f64)
                .input("support_q1", nq as f64)
                .input("distance", p.tv(&q)?)
                .judge(p.equivocation()? - q.equivocation()?)
        }
        "eq-2-cb" => {
            let (d1, d2) = split_dim(dim);
            let (p, q) = sample_classical_pair(d1, d2, Some(&energy), eps, rng)?;
            let params = LaaClassParams::conditional_entropy_qc();
            BoundReport::new(name, classical_energy_bound(&params, spec, e_cap, eps, None)?)
                .partner("refined", classical_energy_bound(&params, spec, e_cap, eps, Some(&p))?)
                .input("E", e_cap)
                .input("mean_p1", p.mean_energy(spec)?)
                .input("distance", p.tv(&q)?)
                .judge(p.equivocation()? - q.equivocation()?)
        }
        "ef-cb-1" => {
            let (rho, sigma) = sample_two_qubit_pair(eps, rng)?;
            // rank rho_A <= 2 on both sides, so the bound applies both ways
            let v = eof_bound(&Constraint::Rank(2), eps)?;
            BoundReport::from_envelope(name, Envelope::symmetric(v))
                .input("distance", trace_distance(&rho, &sigma)?)
                .judge(wootters_eof(&rho)? - wootters_eof(&sigma)?)
        }
        "mi-c" => {
            let osc = &cfg.oscillator;
            let (mu, nu) = sample_oscillator_pair(osc.atoms, osc.max_amplitude, eps, rng)?;
            let e = mean_photon(&mu, 0)?;
            let env = mi_bound(&MiMode::ClassicalOscillator { energy: e }, eps)?;
            BoundReport::from_envelope(name, env)
                .input("E", e)
                .input("cutoff", mu.cutoff() as f64)
                .input("distance", measure_tv(&mu, &nu)?)
                .judge(classical_mi_value(&mu)? - classical_mi_value(&nu)?)
        }
        other => return Err(Error::Config(format!("unknown bound {other:?}"))),
    })
}
