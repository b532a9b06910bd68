//! Finitely supported ensembles, their Jordan decomposition and the generic
//! continuity-bound evaluators for locally almost affine functions.

use std::sync::Arc;

use serde::Deserialize;

use crate::error::{check_unit_interval, Error, Result};
use crate::hamiltonians::{g_unchecked, h2_unchecked, max_entropy_multi, SpectrumSequence};
use crate::linalg::{shifted_positive_part, CMatrix, DensityOperator, HermitianOperator, C64};
use crate::oscillator::coherent_vector;

const WEIGHT_TOL: f64 = 1e-12;

/// Labelled states sharing one Hilbert space.
#[derive(Debug, Clone)]
pub struct StateFamily {
    labels: Vec<String>,
    states: Vec<DensityOperator>,
}

impl StateFamily {
    pub fn new(labels: Vec<String>, states: Vec<DensityOperator>) -> Result<Self> {
        if labels.len() != states.len() || labels.is_empty() {
            return Err(Error::LabelMismatch(format!(
                "{} labels for {} states",
                labels.len(),
                states.len()
            )));
        }
        let dim = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimMismatch(dim, s.dim()));
        }
        Ok(Self { labels, states })
    }

    /// The computational basis states `|0>, ..., |n-1>`.
    pub fn basis(n: usize) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let states = (0..n)
            .map(|i| {
                let mut p = vec![0.0; n];
                p[i] = 1.0;
                DensityOperator::from_probabilities(&p).unwrap()
            })
            .collect();
        Self { labels, states }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// A probability vector over a [`StateFamily`].
#[derive(Debug, Clone)]
pub struct QuasiClassicalEnsemble {
    family: Arc<StateFamily>,
    weights: Vec<f64>,
}

impl QuasiClassicalEnsemble {
    pub fn new(family: Arc<StateFamily>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != family.len() {
            return Err(Error::LabelMismatch(format!(
                "{} weights for {} labels",
                weights.len(),
                family.len()
            )));
        }
        check_probability_vector(&weights)?;
        Ok(Self { family, weights })
    }

    /// Another ensemble over the same family.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(Arc::clone(&self.family), weights)
    }

    pub fn family(&self) -> &Arc<StateFamily> {
        &self.family
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The barycenter `sum_x mu(x) omega(x)`.
    pub fn state(&self) -> Result<DensityOperator> {
        barycenter(&self.family, &self.weights)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: EnsembleFile = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        file.build()
    }
}

fn check_probability_vector(w: &[f64]) -> Result<()> {
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidDistribution("weights must be nonnegative".into()));
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
    }
    Ok(())
}

fn barycenter(family: &StateFamily, weights: &[f64]) -> Result<DensityOperator> {
    let refs: Vec<&DensityOperator> = family.states.iter().collect();
    DensityOperator::mixture(weights, &refs)
}

fn same_family(a: &QuasiClassicalEnsemble, b: &QuasiClassicalEnsemble) -> Result<()> {
    if Arc::ptr_eq(&a.family, &b.family) || a.family.labels == b.family.labels {
        Ok(())
    } else {
        Err(Error::LabelMismatch("ensembles are over different label sets".into()))
    }
}

#[derive(Deserialize)]
struct EnsembleFile {
    dim: usize,
    points: Vec<EnsemblePoint>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct EnsemblePoint {
    label: String,
    #[serde(default)]
    state: Option<String>,
    /// Rows of `[re, im]` pairs.
    #[serde(default)]
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

impl EnsembleFile {
    fn build(self) -> Result<QuasiClassicalEnsemble> {
        let mut labels = Vec::with_capacity(self.points.len());
        let mut states = Vec::with_capacity(self.points.len());
        for p in self.points {
            let state = match (&p.state, &p.matrix) {
                (Some(name), None) => named_state(name, self.dim)?,
                (None, Some(rows)) => {
                    if rows.len() != self.dim || rows.iter().any(|r| r.len() != self.dim) {
                        return Err(Error::DimMismatch(rows.len(), self.dim));
                    }
                    let m = CMatrix::from_fn(self.dim, self.dim, |i, j| C64::new(rows[i][j][0], rows[i][j][1]));
                    DensityOperator::new(m)?
                }
                _ => {
                    return Err(Error::Config(format!(
                        "point {} needs exactly one of `state` or `matrix`",
                        p.label
                    )))
                }
            };
            labels.push(p.label);
            states.push(state);
        }
        QuasiClassicalEnsemble::new(Arc::new(StateFamily::new(labels, states)?), self.weights)
    }
}

/// Parses `fock:n` and `coherent:re,im` in a Fock space of dimension `dim`.
pub fn named_state(name: &str, dim: usize) -> Result<DensityOperator> {
    let bad = || Error::Config(format!("unrecognized state `{name}`"));
    let (kind, arg) = name.split_once(':').ok_or_else(bad)?;
    match kind {
        "fock" => {
            let n: usize = arg.trim().parse().map_err(|_| bad())?;
            if n >= dim {
                return Err(Error::DimMismatch(n + 1, dim));
            }
            let mut p = vec![0.0; dim];
            p[n] = 1.0;
            DensityOperator::from_probabilities(&p)
        }
        "coherent" => {
            let (re, im) = arg.split_once(',').ok_or_else(bad)?;
            let z = C64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?);
            DensityOperator::pure(&coherent_vector(z, dim)?)
        }
        _ => Err(bad()),
    }
}

/// Total variation distance of two weight vectors over the same labels.
pub fn tv_distance(mu: &[f64], nu: &[f64]) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::LabelMismatch(format!("{} vs {} labels", mu.len(), nu.len())));
    }
    Ok(0.5 * mu.iter().zip(nu).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// `mu - nu = eps (plus - minus)` with `plus`, `minus` probability vectors
/// of disjoint support.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanDecomposition {
    pub epsilon: f64,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    /// Total mass of the positive and negative parts before normalization.
    pub masses: (f64, f64),
}

pub fn jordan_decompose(mu: &[f64], nu: &[f64]) -> Result<JordanDecomposition> {
    let epsilon = tv_distance(mu, nu)?;
    if epsilon == 0.0 {
        return Err(Error::EqualMeasures);
    }
    let pos: Vec<f64> = mu.iter().zip(nu).map(|(a, b)| (a - b).max(0.0)).collect();
    let neg: Vec<f64> = mu.iter().zip(nu).map(|(a, b)| (b - a).max(0.0)).collect();
    let masses = (pos.iter().sum(), neg.iter().sum());
    Ok(JordanDecomposition {
        epsilon,
        plus: pos.into_iter().map(|x| x / epsilon).collect(),
        minus: neg.into_iter().map(|x| x / epsilon).collect(),
        masses,
    })
}

#[derive(Debug, Clone)]
pub struct TauStates {
    pub plus: DensityOperator,
    pub minus: DensityOperator,
    pub epsilon: f64,
}

/// Barycenters of the normalized positive and negative parts of `mu - nu`.
pub fn tau_states(rho: &QuasiClassicalEnsemble, sigma: &QuasiClassicalEnsemble) -> Result<TauStates> {
    same_family(rho, sigma)?;
    let j = jordan_decompose(&rho.weights, &sigma.weights)?;
    // renormalize against rounding so the barycenters pass the trace check
    let norm = |v: Vec<f64>| -> Vec<f64> {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    };
    Ok(TauStates {
        plus: barycenter(&rho.family, &norm(j.plus))?,
        minus: barycenter(&rho.family, &norm(j.minus))?,
        epsilon: j.epsilon,
    })
}

/// Smallest eigenvalue of `big - eps * small`.
pub fn domination_margin(big: &DensityOperator, small: &DensityOperator, eps: f64) -> Result<f64> {
    if big.dim() != small.dim() {
        return Err(Error::DimMismatch(big.dim(), small.dim()));
    }
    if let (Some(a), Some(b)) = (big.diagonal(), small.diagonal()) {
        return Ok(a.iter().zip(b).map(|(x, y)| x - eps * y).fold(f64::INFINITY, f64::min));
    }
    let m = big.matrix().into_owned() - small.matrix().into_owned().scale(eps);
    Ok(HermitianOperator::new(m)?.min_eigenvalue())
}

/// Max-norm gap between `(rho + eps tau_-)/(1+eps)` and `(sigma + eps tau_+)/(1+eps)`.
pub fn omega_star_residual(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    tau_plus: &DensityOperator,
    tau_minus: &DensityOperator,
    eps: f64,
) -> f64 {
    let lhs = (rho.matrix().into_owned() + tau_minus.matrix().into_owned().scale(eps)).unscale(1.0 + eps);
    let rhs = (sigma.matrix().into_owned() + tau_plus.matrix().into_owned().scale(eps)).unscale(1.0 + eps);
    crate::linalg::max_abs_diff(&lhs, &rhs)
}

/// Constants of a locally almost affine class: `f` is `C`-bounded in
/// oscillation on the relevant state sets and deviates from affinity by at
/// most `d_minus h2` below and `d_plus h2` above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaaClassParams {
    pub c: f64,
    pub d: f64,
    pub c_minus: f64,
    pub c_plus: f64,
    pub d_minus: f64,
    pub d_plus: f64,
    /// Number of constrained subsystems.
    pub m: usize,
    /// Total number of subsystems.
    pub n: usize,
}

impl LaaClassParams {
    pub fn new(c_minus: f64, c_plus: f64, d_minus: f64, d_plus: f64, m: usize, n: usize) -> Result<Self> {
        Self {
            c: c_minus + c_plus,
            d: d_minus + d_plus,
            c_minus,
            c_plus,
            d_minus,
            d_plus,
            m,
            n,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        let all = [self.c, self.d, self.c_minus, self.c_plus, self.d_minus, self.d_plus];
        if all.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Config("class constants must be nonnegative".into()));
        }
        if (self.c_minus + self.c_plus - self.c).abs() > 1e-12 || (self.d_minus + self.d_plus - self.d).abs() > 1e-12 {
            return Err(Error::Config("class constants do not add up".into()));
        }
        if self.m == 0 || self.m > self.n {
            return Err(Error::Config(format!("need 1 <= m <= n, got m = {}, n = {}", self.m, self.n)));
        }
        Ok(self)
    }

    /// Von Neumann entropy.
    pub fn entropy() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0, 1, 1).unwrap()
    }

    /// Conditional entropy of quantum-classical states, constrained on `A`.
    pub fn conditional_entropy_qc() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0, 1, 2).unwrap()
    }

    /// Quantum mutual information, constrained on `A`.
    pub fn mutual_information() -> Self {
        Self::new(1.0, 1.0, 1.0, 1.0, 1, 2).unwrap()
    }

    /// Lower affinity defect `a(p)`.
    pub fn a(&self, p: f64) -> f64 {
        self.d_minus * h2_unchecked(p)
    }

    /// Upper affinity defect `b(p)`.
    pub fn b(&self, p: f64) -> f64 {
        self.d_plus * h2_unchecked(p)
    }

    /// `(1+eps) (a+b)(eps/(1+eps))`, which equals `D g(eps)`.
    pub fn defect_term(&self, eps: f64) -> f64 {
        let p = eps / (1.0 + eps);
        (1.0 + eps) * (self.a(p) + self.b(p))
    }
}

/// `C eps ln d_m + D g(eps)`.
pub fn afw_rank_bound(params: &LaaClassParams, d_m: usize, eps: f64) -> Result<f64> {
    check_unit_interval("epsilon", eps)?;
    if d_m == 0 {
        return Err(Error::OutOfRange {
            name: "d_m",
            value: 0.0,
            range: ">= 1".into(),
        });
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    Ok(params.c * eps * (d_m as f64).ln() + params.d * g_unchecked(eps))
}

fn replicate(params: &LaaClassParams, specs: &[SpectrumSequence]) -> Result<Vec<SpectrumSequence>> {
    match specs.len() {
        1 => Ok(vec![specs[0].clone(); params.m]),
        k if k == params.m => Ok(specs.to_vec()),
        k => Err(Error::DimMismatch(k, params.m)),
    }
}

/// `C eps F_m(m E / eps) + D g(eps)` where `F_m` is the maximal entropy of
/// the `m` constrained subsystems under a total energy budget. A single
/// spectrum stands for `m` identical copies.
pub fn afw_energy_bound(params: &LaaClassParams, specs: &[SpectrumSequence], energy: f64, eps: f64) -> Result<f64> {
    afw_energy_bound_refined(params, specs, energy, eps, 0.0)
}

/// As [`afw_energy_bound`] with the budget `m E` lowered by `offset`.
pub fn afw_energy_bound_refined(
    params: &LaaClassParams,
    specs: &[SpectrumSequence],
    energy: f64,
    eps: f64,
    offset: f64,
) -> Result<f64> {
    check_unit_interval("epsilon", eps)?;
    if energy < 0.0 {
        return Err(Error::NegativeInput("energy", energy));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    let specs = replicate(params, specs)?;
    let budget = (params.m as f64 * energy - offset).max(0.0);
    Ok(params.c * eps * max_entropy_multi(&specs, budget / eps)? + params.d * g_unchecked(eps))
}

/// `sum_k Tr H_k <[rho - eps I]_+>_k` over the first `m` factors of a product
/// space with factor dimensions `dims`, for `rho` diagonal in the product
/// eigenbasis.
pub fn refined_energy_offset(rho: &DensityOperator, dims: &[usize], specs: &[SpectrumSequence], eps: f64) -> Result<f64> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimMismatch(total, rho.dim()));
    }
    if specs.len() > dims.len() {
        return Err(Error::DimMismatch(specs.len(), dims.len()));
    }
    let off = rho.off_diagonal_mass();
    if off > 1e-9 {
        return Err(Error::BasisMismatch(off));
    }
    let levels: Vec<Vec<f64>> = specs
        .iter()
        .zip(dims)
        .map(|(s, &d)| s.values(d))
        .collect::<Result<_>>()?;
    let diag = rho.diagonal_entries();
    let mut acc = 0.0;
    for (idx, &p) in diag.iter().enumerate() {
        let w = (p - eps).max(0.0);
        if w == 0.0 {
            continue;
        }
        let mut rem = idx;
        let mut digits = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            digits[k] = rem % dims[k];
            rem /= dims[k];
        }
        acc += w * levels.iter().enumerate().map(|(k, e)| e[digits[k]]).sum::<f64>();
    }
    Ok(acc)
}

/// `Tr H [rho - eps I]_+` for `H = diag(levels)` in the computational basis.
pub fn positive_part_energy(rho: &DensityOperator, levels: &[f64], eps: f64) -> Result<f64> {
    if levels.len() < rho.dim() {
        return Err(Error::DimMismatch(levels.len(), rho.dim()));
    }
    let pp = shifted_positive_part(rho, eps);
    Ok((0..rho.dim()).map(|i| pp[(i, i)].re * levels[i]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_simplex, rng_for};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    fn ensemble(weights: &[f64]) -> QuasiClassicalEnsemble {
        QuasiClassicalEnsemble::new(Arc::new(StateFamily::basis(weights.len())), weights.to_vec()).unwrap()
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_abs_diff_eq!(tv_distance(&[0.6, 0.4], &[0.5, 0.5]).unwrap(), 0.1, epsilon = 1e-15);
        assert!(matches!(tv_distance(&[1.0], &[0.5, 0.5]), Err(Error::LabelMismatch(_))));
    }

    #[test]
    fn jordan_examples() {
        let j = jordan_decompose(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!((j.epsilon, j.plus.clone(), j.minus.clone()), (1.0, vec![1.0, 0.0], vec![0.0, 1.0]));
        let j = jordan_decompose(&[0.6, 0.4], &[0.4, 0.6]).unwrap();
        assert_abs_diff_eq!(j.epsilon, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(j.plus[0], 1.0, epsilon = 1e-12);
        assert_eq!(j.plus[1], 0.0);
        assert_abs_diff_eq!(j.minus[1], 1.0, epsilon = 1e-12);
        assert_eq!(jordan_decompose(&[0.5, 0.5], &[0.5, 0.5]), Err(Error::EqualMeasures));
    }

    #[test]
    fn jordan_dominations_random() {
        let mut rng = rng_for(21, 0);
        let mu = random_simplex(10, &mut rng);
        let nu = random_simplex(10, &mut rng);
        let j = jordan_decompose(&mu, &nu).unwrap();
        for i in 0..10 {
            assert!(j.epsilon * j.plus[i] <= mu[i] + 1e-12);
            assert!(j.epsilon * j.minus[i] <= nu[i] + 1e-12);
        }
        assert_abs_diff_eq!(j.masses.0, j.epsilon, epsilon = 1e-12);
        assert_abs_diff_eq!(j.masses.1, j.epsilon, epsilon = 1e-12);
    }

    #[test]
    fn tau_disjoint_support() {
        let rho = ensemble(&[0.5, 0.5, 0.0, 0.0]);
        let sigma = rho.with_weights(vec![0.0, 0.0, 0.25, 0.75]).unwrap();
        let t = tau_states(&rho, &sigma).unwrap();
        assert_abs_diff_eq!(t.epsilon, 1.0, epsilon = 1e-15);
        let (r, s) = (rho.state().unwrap(), sigma.state().unwrap());
        assert_eq!(t.plus.diagonal().unwrap(), r.diagonal().unwrap());
        assert_eq!(t.minus.diagonal().unwrap(), s.diagonal().unwrap());
        assert!(omega_star_residual(&r, &s, &t.plus, &t.minus, t.epsilon) <= 1e-9);
    }

    #[test]
    fn tau_qubit_diagonal() {
        let rho = ensemble(&[0.7, 0.3]);
        let sigma = rho.with_weights(vec![0.2, 0.8]).unwrap();
        let t = tau_states(&rho, &sigma).unwrap();
        assert_abs_diff_eq!(t.epsilon, 0.5, epsilon = 1e-15);
        assert_eq!(t.plus.diagonal().unwrap(), &[1.0, 0.0]);
        assert_eq!(t.minus.diagonal().unwrap(), &[0.0, 1.0]);
        let (r, s) = (rho.state().unwrap(), sigma.state().unwrap());
        assert!(domination_margin(&r, &t.plus, t.epsilon).unwrap() >= -1e-12);
        assert!(domination_margin(&s, &t.minus, t.epsilon).unwrap() >= -1e-12);
    }

    #[test]
    fn corrupted_tau_is_detected() {
        let rho = ensemble(&[0.7, 0.2, 0.1]);
        let sigma = rho.with_weights(vec![0.1, 0.3, 0.6]).unwrap();
        let t = tau_states(&rho, &sigma).unwrap();
        let (r, s) = (rho.state().unwrap(), sigma.state().unwrap());
        let bad = DensityOperator::from_probabilities(&[0.5, 0.5, 0.0]).unwrap();
        assert!(omega_star_residual(&r, &s, &bad, &t.minus, t.epsilon) > 1e-3);
    }

    #[test]
    fn different_families_rejected() {
        let a = ensemble(&[0.5, 0.5]);
        let labels = vec!["x".to_string(), "y".to_string()];
        let fam = StateFamily::new(labels, StateFamily::basis(2).states().to_vec()).unwrap();
        let b = QuasiClassicalEnsemble::new(Arc::new(fam), vec![0.1, 0.9]).unwrap();
        assert!(matches!(tau_states(&a, &b), Err(Error::LabelMismatch(_))));
    }

    #[test]
    fn rank_bound_examples() {
        let p = LaaClassParams::entropy();
        assert_eq!(afw_rank_bound(&p, 2, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            afw_rank_bound(&p, 2, 0.5).unwrap(),
            0.5 * LN_2 + g_unchecked(0.5),
            epsilon = 1e-15
        );
        let mi = LaaClassParams::mutual_information();
        assert_eq!((mi.c, mi.d), (2.0, 2.0));
        assert_abs_diff_eq!(
            afw_rank_bound(&mi, 3, 0.1).unwrap(),
            0.2 * 3f64.ln() + 2.0 * g_unchecked(0.1),
            epsilon = 1e-15
        );
        assert!(afw_rank_bound(&p, 2, 1.1).is_err());
    }

    #[test]
    fn defect_term_is_d_times_g() {
        let p = LaaClassParams::new(0.5, 1.0, 0.25, 1.5, 1, 2).unwrap();
        for eps in [0.01, 0.2, 0.7, 1.0] {
            assert_abs_diff_eq!(p.defect_term(eps), p.d * g_unchecked(eps), epsilon = 1e-14);
        }
    }

    #[test]
    fn energy_bound_reduces_to_oscillator_form() {
        let n = SpectrumSequence::number_operator();
        let p = LaaClassParams::entropy();
        for (e, eps) in [(1.0, 0.1), (4.0, 0.3), (0.5, 1.0)] {
            let expected = eps * g_unchecked(e / eps) + g_unchecked(eps);
            assert_abs_diff_eq!(afw_energy_bound(&p, &[n.clone()], e, eps).unwrap(), expected, epsilon = 1e-13);
        }
        assert!(afw_energy_bound(&p, &[n.clone()], 1.0, 1e-4).unwrap() < 0.01);
        let mut prev = 0.0;
        for k in 1..=50 {
            let v = afw_energy_bound(&p, &[n.clone()], 1.0, k as f64 / 100.0).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn refined_offset_examples() {
        let spec = SpectrumSequence::number_operator();
        let rho = DensityOperator::from_probabilities(&[0.6, 0.4]).unwrap();
        let off = refined_energy_offset(&rho, &[2], &[spec.clone()], 0.1).unwrap();
        assert_abs_diff_eq!(off, 0.3, epsilon = 1e-15);
        assert_eq!(refined_energy_offset(&rho, &[2], &[spec.clone()], 0.6).unwrap(), 0.0);
        let near = refined_energy_offset(&rho, &[2], &[spec.clone()], 1e-8).unwrap();
        assert_abs_diff_eq!(near, 0.4, epsilon = 1e-7);
        assert_abs_diff_eq!(positive_part_energy(&rho, &[0.0, 1.0], 0.1).unwrap(), 0.3, epsilon = 1e-15);
    }

    #[test]
    fn refined_offset_on_product_space() {
        // 2x3 product, first factor constrained with levels (0, 1)
        let spec = SpectrumSequence::number_operator();
        let p = [0.3, 0.1, 0.05, 0.25, 0.2, 0.1];
        let rho = DensityOperator::from_probabilities(&p).unwrap();
        let off = refined_energy_offset(&rho, &[2, 3], &[spec], 0.08).unwrap();
        assert_abs_diff_eq!(off, (0.25 - 0.08) + (0.2 - 0.08) + (0.1 - 0.08), epsilon = 1e-15);
    }

    #[test]
    fn ensemble_file_parsing() {
        let text = r#"{
            "dim": 12,
            "points": [
                {"label": "vac", "state": "fock:0"},
                {"label": "alpha", "state": "coherent:0.5,-0.2"},
                {"label": "mixed", "matrix": [[[0.5,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                                              [[0,0],[0.5,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                                              [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                                              [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                                              [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                                              [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                                              [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                                              [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                                              [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                                              [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                                              [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                                              [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]]}
            ],
            "weights": [0.2, 0.5, 0.3]
        }"#;
        let ens = QuasiClassicalEnsemble::from_json(text).unwrap();
        assert_eq!(ens.family().labels(), &["vac", "alpha", "mixed"]);
        let rho = ens.state().unwrap();
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.2 + 0.5 * (-0.29f64).exp() + 0.15, epsilon = 1e-12);
        assert!(named_state("squeezed:1", 4).is_err());
        assert!(named_state("fock:4", 4).is_err());
    }
}
