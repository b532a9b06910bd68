//! Conditional entropy of quantum-classical states `sum_k p_k rho_k (x) |k><k|`.

use crate::error::{Error, Result};
use crate::hamiltonians::{g_unchecked, max_entropy, SpectrumSequence};
use crate::linalg::{shifted_positive_part, CMatrix, DensityOperator, HermitianOperator};

use super::{Constraint, ENERGY_SLACK};

#[derive(Debug, Clone)]
pub struct QcEnsembleState {
    components: Vec<(f64, DensityOperator)>,
}

impl QcEnsembleState {
    pub fn new(components: Vec<(f64, DensityOperator)>) -> Result<Self> {
        let Some((_, first)) = components.first() else {
            return Err(Error::InvalidDistribution("no components".into()));
        };
        let dim = first.dim();
        if let Some((_, s)) = components.iter().find(|(_, s)| s.dim() != dim) {
            return Err(Error::DimMismatch(dim, s.dim()));
        }
        if components.iter().any(|(p, _)| !(*p >= 0.0)) {
            return Err(Error::InvalidDistribution("negative weight".into()));
        }
        let total: f64 = components.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        Ok(Self { components })
    }

    /// `rho (x) |0><0|`.
    pub fn single(rho: DensityOperator) -> Self {
        Self {
            components: vec![(1.0, rho)],
        }
    }

    pub fn components(&self) -> &[(f64, DensityOperator)] {
        &self.components
    }

    pub fn dim_a(&self) -> usize {
        self.components[0].1.dim()
    }

    /// `S(A|B) = sum_k p_k S(rho_k)`.
    pub fn conditional_entropy(&self) -> f64 {
        self.components.iter().map(|(p, s)| p * s.entropy()).sum()
    }

    /// `rho_A = sum_k p_k rho_k`.
    pub fn reduced_a(&self) -> Result<DensityOperator> {
        let w: Vec<f64> = self.components.iter().map(|(p, _)| *p).collect();
        let s: Vec<&DensityOperator> = self.components.iter().map(|(_, s)| s).collect();
        DensityOperator::mixture(&w, &s)
    }

    /// The block-diagonal state on `A (x) B` with `B` of dimension `len`.
    pub fn assemble(&self) -> Result<DensityOperator> {
        let da = self.dim_a();
        let k = self.components.len();
        let mut m = CMatrix::zeros(da * k, da * k);
        for (b, (p, s)) in self.components.iter().enumerate() {
            let block = s.matrix();
            for i in 0..da {
                for j in 0..da {
                    m[(i * k + b, j * k + b)] = block[(i, j)] * *p;
                }
            }
        }
        DensityOperator::new(m)
    }

    /// `Tr H rho_A` with `H` diagonal in the computational basis of `A`.
    pub fn energy_a(&self, spec: &SpectrumSequence) -> Result<f64> {
        let levels = spec.values(self.dim_a())?;
        let mut e = 0.0;
        for (p, s) in &self.components {
            e += p * s.diagonal_expectation(&levels)?;
        }
        Ok(e)
    }

    /// `sum_k Tr H [p_k rho_k - eps I]_+`.
    pub fn energy_offset(&self, spec: &SpectrumSequence, eps: f64) -> Result<f64> {
        let levels = spec.values(self.dim_a())?;
        let mut acc = 0.0;
        for (p, s) in &self.components {
            if *p == 0.0 {
                continue;
            }
            // [p rho - eps I]_+ = p [rho - (eps/p) I]_+
            let pp = shifted_positive_part(s, eps / p);
            acc += p * (0..levels.len()).map(|i| pp[(i, i)].re * levels[i]).sum::<f64>();
        }
        Ok(acc)
    }

    /// Trace distance between q-c states with aligned classical labels;
    /// missing components count as zero blocks.
    pub fn trace_distance(&self, other: &QcEnsembleState) -> Result<f64> {
        if self.dim_a() != other.dim_a() {
            return Err(Error::DimMismatch(self.dim_a(), other.dim_a()));
        }
        let n = self.components.len().max(other.components.len());
        let zero = CMatrix::zeros(self.dim_a(), self.dim_a());
        let block = |qc: &QcEnsembleState, k: usize| -> CMatrix {
            match qc.components.get(k) {
                Some((p, s)) => s.matrix().scale(*p),
                None => zero.clone(),
            }
        };
        let mut total = 0.0;
        for k in 0..n {
            let diff = block(self, k) - block(other, k);
            total += HermitianOperator::new(diff)?.trace_norm();
        }
        Ok(0.5 * total)
    }
}

/// One-sided bound on `S(A|B)_rho - S(A|B)_sigma`: `eps ln r + g(eps)` for
/// `rank rho_A = r`, or `eps F((E - offset)/eps) + g(eps)` under an energy
/// cap on `A`, the offset being computed from `rho` when given.
pub fn qce_bound(constraint: &Constraint, eps: f64, rho: Option<&QcEnsembleState>) -> Result<f64> {
    crate::error::check_unit_interval("epsilon", eps)?;
    match constraint {
        Constraint::Rank(r) => {
            if *r == 0 {
                return Err(Error::InvalidRank { rank: 0, dim: 1 });
            }
            if eps == 0.0 {
                return Ok(0.0);
            }
            Ok(eps * (*r as f64).ln() + g_unchecked(eps))
        }
        Constraint::Energy { spec, energy } => {
            let mut offset = 0.0;
            if let Some(rho) = rho {
                let e = rho.energy_a(spec)?;
                if e > energy + ENERGY_SLACK {
                    return Err(Error::ConstraintViolated(format!("Tr H rho_A = {e} exceeds {energy}")));
                }
                if eps > 0.0 {
                    offset = rho.energy_offset(spec, eps)?;
                }
            }
            if eps == 0.0 {
                return Ok(0.0);
            }
            let budget = (energy - offset).max(0.0);
            Ok(eps * max_entropy(spec, budget / eps)? + g_unchecked(eps))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{entropy_energy_bound, extremal_pair};
    use crate::linalg::{Subsystem, CVector, C64};
    use crate::random::{random_density, rng_for};
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_and_pure_components() {
        let rho = DensityOperator::from_probabilities(&[0.5, 0.3, 0.2]).unwrap();
        assert_abs_diff_eq!(QcEnsembleState::single(rho.clone()).conditional_entropy(), rho.entropy());
        let psi = CVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let a = DensityOperator::pure(&psi).unwrap();
        let b = DensityOperator::from_probabilities(&[1.0, 0.0]).unwrap();
        let qc = QcEnsembleState::new(vec![(0.4, a), (0.6, b)]).unwrap();
        assert_abs_diff_eq!(qc.conditional_entropy(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn conditional_entropy_matches_assembled_state() {
        let mut rng = rng_for(31, 0);
        let comps = vec![
            (0.2, random_density(2, 2, &mut rng)),
            (0.5, random_density(2, 1, &mut rng)),
            (0.3, random_density(2, 2, &mut rng)),
        ];
        let qc = QcEnsembleState::new(comps).unwrap();
        let full = qc.assemble().unwrap();
        let rb = full.partial_trace(2, 3, Subsystem::B).unwrap();
        assert_abs_diff_eq!(qc.conditional_entropy(), full.entropy() - rb.entropy(), epsilon = 1e-9);
        let ra = full.partial_trace(2, 3, Subsystem::A).unwrap();
        let direct = qc.reduced_a().unwrap();
        assert!(crate::linalg::max_abs_diff(ra.matrix().as_ref(), direct.matrix().as_ref()) < 1e-12);
    }

    #[test]
    fn block_trace_distance_matches_assembled() {
        let mut rng = rng_for(32, 0);
        let a = QcEnsembleState::new(vec![(0.3, random_density(3, 3, &mut rng)), (0.7, random_density(3, 2, &mut rng))]).unwrap();
        let b = QcEnsembleState::new(vec![(0.6, random_density(3, 1, &mut rng)), (0.4, random_density(3, 3, &mut rng))]).unwrap();
        let direct = crate::linalg::trace_distance(&a.assemble().unwrap(), &b.assemble().unwrap()).unwrap();
        assert_abs_diff_eq!(a.trace_distance(&b).unwrap(), direct, epsilon = 1e-10);
    }

    #[test]
    fn rank_mode() {
        for eps in [0.0, 0.1, 0.5, 1.0] {
            assert_abs_diff_eq!(qce_bound(&Constraint::Rank(1), eps, None).unwrap(), g_unchecked(eps));
        }
    }

    #[test]
    fn energy_mode_single_component_reduces() {
        let spec = SpectrumSequence::number_operator();
        let c = Constraint::Energy { spec: spec.clone(), energy: 1.5 };
        for eps in [0.05, 0.3] {
            assert_abs_diff_eq!(
                qce_bound(&c, eps, None).unwrap(),
                entropy_energy_bound(&spec, 1.5, eps).unwrap(),
                epsilon = 1e-14
            );
            // with rho: equals the refined entropy bound
            let rho = DensityOperator::from_probabilities(&[0.5, 0.3, 0.2]).unwrap();
            let qc = QcEnsembleState::single(rho.clone());
            assert_abs_diff_eq!(
                qce_bound(&c, eps, Some(&qc)).unwrap(),
                crate::bounds::refined_entropy_bound(&rho, &spec, 1.5, eps).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn extremal_qc_pair_exceeds_lower_value() {
        let spec = SpectrumSequence::number_operator();
        let (rho, sigma) = extremal_pair(&spec, 2.0, 0.1).unwrap();
        let a = QcEnsembleState::single(rho);
        let b = QcEnsembleState::single(sigma);
        let gap = a.conditional_entropy() - b.conditional_entropy();
        assert!(gap > 0.1 * g_unchecked(20.0));
        assert!(a.energy_a(&spec).unwrap() <= 2.0 + 1e-9);
    }
}
