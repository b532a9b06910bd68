//! Closed-form continuity bounds for the von Neumann entropy and the
//! constructions used to probe them.

mod eof;
mod mi;
mod qce;
mod report;

pub use eof::{convex_roof_search, eof_bound, eof_delta, wootters_eof};
pub use mi::{mi_bound, mutual_information, MiMode};
pub use qce::{qce_bound, QcEnsembleState};
pub use report::{BoundReport, Verdict, VIOLATION_SLACK};

use crate::error::{check_unit_interval, Error, Result};
use crate::hamiltonians::{g_unchecked, h2_unchecked, max_entropy, solve_beta, SpectrumSequence};
use crate::linalg::DensityOperator;

/// Slack allowed on energy caps.
pub const ENERGY_SLACK: f64 = 1e-9;

/// What is known about the state on the constrained side.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// Rank of the relevant (marginal) state.
    Rank(usize),
    /// Mean energy at most `energy` for the Hamiltonian with this spectrum.
    Energy { spec: SpectrumSequence, energy: f64 },
}

/// Admissible range `[-lower, upper]` of a difference `f(rho) - f(sigma)`.
/// A one-sided bound has `lower = +inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub lower: f64,
    pub upper: f64,
}

impl Envelope {
    pub fn symmetric(v: f64) -> Self {
        Self { lower: v, upper: v }
    }

    pub fn one_sided(upper: f64) -> Self {
        Self {
            lower: f64::INFINITY,
            upper,
        }
    }

    pub fn contains(&self, lhs: f64, slack: f64) -> bool {
        lhs <= self.upper + slack && lhs >= -self.lower - slack
    }
}

/// `eps ln(d-1) + h2(eps)`, replaced by `ln d` once `eps > 1 - 1/d`.
pub fn audenaert_bound(d: usize, eps: f64) -> Result<f64> {
    check_unit_interval("epsilon", eps)?;
    if d < 2 {
        return Err(Error::InvalidRank { rank: d, dim: 2 });
    }
    let df = d as f64;
    if eps > 1.0 - 1.0 / df {
        return Ok(df.ln());
    }
    Ok(eps * (df - 1.0).ln() + h2_unchecked(eps))
}

fn check_eps_energy(eps: f64, energy: f64) -> Result<()> {
    check_unit_interval("epsilon", eps)?;
    if !(energy >= 0.0) {
        return Err(Error::NegativeInput("energy", energy));
    }
    Ok(())
}

/// `2 eps F(E/eps) + h2(eps)`.
pub fn winter_energy_bound(spec: &SpectrumSequence, energy: f64, eps: f64) -> Result<f64> {
    check_eps_energy(eps, energy)?;
    if eps == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * eps * max_entropy(spec, energy / eps)? + h2_unchecked(eps))
}

/// `E h2(eps/E) + h2(eps)` for the number operator, valid for `eps <= E/(E+1)`.
pub fn bdj_bound(energy: f64, eps: f64) -> Result<f64> {
    check_eps_energy(eps, energy)?;
    if eps == 0.0 {
        return Ok(0.0);
    }
    let cap = energy / (energy + 1.0);
    if eps > cap {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: eps,
            range: format!("[0, {cap}]"),
        });
    }
    Ok(energy * h2_unchecked(eps / energy) + h2_unchecked(eps))
}

/// `eps F(E/eps) + g(eps)`: bound on `|S(rho) - S(sigma)|` for states of
/// mean energy at most `E` at trace distance at most `eps`.
pub fn entropy_energy_bound(spec: &SpectrumSequence, energy: f64, eps: f64) -> Result<f64> {
    check_eps_energy(eps, energy)?;
    if eps == 0.0 {
        return Ok(0.0);
    }
    Ok(eps * max_entropy(spec, energy / eps)? + g_unchecked(eps))
}

fn levels_for(rho: &DensityOperator, spec: &SpectrumSequence) -> Result<Vec<f64>> {
    spec.values(rho.dim())
}

/// `Tr H rho` with `H` diagonal in the computational basis.
pub fn mean_energy(rho: &DensityOperator, spec: &SpectrumSequence) -> Result<f64> {
    rho.diagonal_expectation(&levels_for(rho, spec)?)
}

/// `Tr H [rho - eps I]_+`.
pub fn e_h_eps(rho: &DensityOperator, spec: &SpectrumSequence, eps: f64) -> Result<f64> {
    crate::afw::positive_part_energy(rho, &levels_for(rho, spec)?, eps)
}

/// `sum_k E_k [lambda_k - eps]_+`, pairing the sorted spectrum of the state
/// with the sorted energy levels; a lower bound on [`e_h_eps`].
pub fn e_star(eigs: &[f64], levels: &[f64], eps: f64) -> f64 {
    eigs.iter().zip(levels).map(|(l, e)| e * (l - eps).max(0.0)).sum()
}

/// `eps F((E - Tr H [rho - eps I]_+)/eps) + g(eps)`: one-sided bound on
/// `S(rho) - S(sigma)` for a fixed `rho`.
pub fn refined_entropy_bound(rho: &DensityOperator, spec: &SpectrumSequence, energy: f64, eps: f64) -> Result<f64> {
    check_eps_energy(eps, energy)?;
    let e_rho = mean_energy(rho, spec)?;
    if e_rho > energy + ENERGY_SLACK {
        return Err(Error::ConstraintViolated(format!("Tr H rho = {e_rho} exceeds {energy}")));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    let offset = e_h_eps(rho, spec, eps)?;
    let budget = (energy - offset).max(0.0);
    Ok(eps * max_entropy(spec, budget / eps)? + g_unchecked(eps))
}

/// States `rho = eps gamma(E/eps) + (1-eps)|0><0|` and `sigma = |0><0|`
/// whose entropy gap exceeds `eps F(E/eps)`.
pub fn extremal_pair(spec: &SpectrumSequence, energy: f64, eps: f64) -> Result<(DensityOperator, DensityOperator)> {
    check_eps_energy(eps, energy)?;
    if eps == 0.0 || energy == 0.0 {
        return Err(Error::OutOfRange {
            name: "epsilon * energy",
            value: eps * energy,
            range: "(0, inf)".into(),
        });
    }
    let target = energy / eps;
    let gibbs = solve_beta(spec, target, 1e-12 * target.max(1.0))?;
    let mut p: Vec<f64> = gibbs.probabilities.iter().map(|q| eps * q).collect();
    p[0] += 1.0 - eps;
    let mut ground = vec![0.0; p.len()];
    ground[0] = 1.0;
    Ok((DensityOperator::from_probabilities(&p)?, DensityOperator::from_probabilities(&ground)?))
}

/// `eps ln(rank - 1) + h2(eps)`, defined for `eps <= 1 - 1/rank`.
pub fn rank_entropy_bound(rank: usize, eps: f64) -> Result<f64> {
    check_unit_interval("epsilon", eps)?;
    if eps == 0.0 {
        return Ok(0.0);
    }
    let r = rank as f64;
    if rank < 2 || eps > 1.0 - 1.0 / r {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: eps,
            range: format!("[0, 1 - 1/{rank}]"),
        });
    }
    Ok(eps * (r - 1.0).ln() + h2_unchecked(eps))
}

/// Envelope for `S(rho) - S(sigma)` with `Tr H rho <= E_rho` and `rank sigma <= d`.
pub fn mixed_bound(d: usize, spec: &SpectrumSequence, e_rho: f64, eps: f64) -> Result<Envelope> {
    let lower = rank_entropy_bound(d, eps)?;
    Ok(Envelope {
        lower,
        upper: entropy_energy_bound(spec, e_rho, eps)?,
    })
}

/// Envelope for `S(rho) - S(sigma)` under separate energy caps.
pub fn two_sided_energy_bound(spec: &SpectrumSequence, e_rho: f64, e_sigma: f64, eps: f64) -> Result<Envelope> {
    Ok(Envelope {
        lower: entropy_energy_bound(spec, e_sigma, eps)?,
        upper: entropy_energy_bound(spec, e_rho, eps)?,
    })
}
