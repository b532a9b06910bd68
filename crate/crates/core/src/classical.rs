//! Discrete joint distributions, their Shannon quantities, and continuity
//! bounds for classical functions of them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::afw::LaaClassParams;
use crate::error::{check_unit_interval, Error, Result};
use crate::hamiltonians::{g_unchecked, h2_unchecked, max_entropy, SpectrumSequence};
use crate::linalg::eta;

/// Tolerance on the total probability.
pub const TOL_SUM: f64 = 1e-12;

/// Sparse distribution of `arity` random variables with values in `0, 1, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    arity: usize,
    entries: BTreeMap<Vec<usize>, f64>,
}

#[derive(Serialize, Deserialize)]
struct JointFile {
    arity: usize,
    entries: Vec<Vec<f64>>,
}

impl JointDistribution {
    /// Zero-probability entries are dropped; duplicates are rejected.
    pub fn new(arity: usize, entries: impl IntoIterator<Item = (Vec<usize>, f64)>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidDistribution("arity must be positive".into()));
        }
        let mut map = BTreeMap::new();
        let mut total = 0.0;
        for (idx, p) in entries {
            if idx.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    got: idx.len(),
                });
            }
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::InvalidDistribution(format!("bad probability {p} at {idx:?}")));
            }
            total += p;
            if p == 0.0 {
                continue;
            }
            if map.insert(idx.clone(), p).is_some() {
                return Err(Error::InvalidDistribution(format!("duplicate tuple {idx:?}")));
            }
        }
        if (total - 1.0).abs() > TOL_SUM {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { arity, entries: map })
    }

    /// One variable with the given probability vector.
    pub fn univariate(p: &[f64]) -> Result<Self> {
        Self::new(1, p.iter().enumerate().map(|(i, &v)| (vec![i], v)))
    }

    /// Product of one-variable distributions.
    pub fn product(factors: &[&[f64]]) -> Result<Self> {
        let mut acc: Vec<(Vec<usize>, f64)> = vec![(Vec::new(), 1.0)];
        for f in factors {
            let mut next = Vec::with_capacity(acc.len() * f.len());
            for (idx, p) in &acc {
                for (i, &q) in f.iter().enumerate() {
                    let mut t = idx.clone();
                    t.push(i);
                    next.push((t, p * q));
                }
            }
            acc = next;
        }
        Self::normalized(factors.len(), acc)
    }

    /// Like [`Self::new`] but rescales to unit mass first, for sums carrying
    /// rounding error.
    pub fn normalized(arity: usize, entries: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let total: f64 = entries.iter().map(|(_, p)| p).sum();
        if !(total > 0.0) {
            return Err(Error::InvalidDistribution("zero total mass".into()));
        }
        Self::new(arity, entries.into_iter().map(|(i, p)| (i, p / total)))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: JointFile = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut entries = Vec::with_capacity(file.entries.len());
        for row in file.entries {
            let Some((&p, idx)) = row.split_last() else {
                return Err(Error::InvalidDistribution("empty entry".into()));
            };
            let idx = idx
                .iter()
                .map(|&x| {
                    if x >= 0.0 && x.fract() == 0.0 {
                        Ok(x as usize)
                    } else {
                        Err(Error::InvalidDistribution(format!("index {x} is not a nonnegative integer")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            entries.push((idx, p));
        }
        Self::new(file.arity, entries)
    }

    pub fn to_json(&self) -> String {
        let file = JointFile {
            arity: self.arity,
            entries: self
                .entries
                .iter()
                .map(|(idx, &p)| idx.iter().map(|&i| i as f64).chain([p]).collect())
                .collect(),
        };
        serde_json::to_string(&file).expect("distribution serializes")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn entries(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.entries
    }

    pub fn max_probability(&self) -> f64 {
        self.entries.values().copied().fold(0.0, f64::max)
    }

    /// Dense probability vector of variable `k` (0-based), of length one
    /// past the largest value seen.
    pub fn marginal(&self, k: usize) -> Result<Vec<f64>> {
        if k >= self.arity {
            return Err(Error::IndexOutOfRange { index: k, arity: self.arity });
        }
        let len = self.entries.keys().map(|i| i[k] + 1).max().unwrap_or(0);
        let mut out = vec![0.0; len];
        for (idx, p) in &self.entries {
            out[idx[k]] += p;
        }
        Ok(out)
    }

    /// Number of values of variable `k` with positive probability.
    pub fn support_size(&self, k: usize) -> Result<usize> {
        Ok(self.marginal(k)?.iter().filter(|&&p| p > 0.0).count())
    }

    /// `H(X_1, ..., X_n)`.
    pub fn joint_entropy(&self) -> f64 {
        self.entries.values().map(|&p| eta(p)).sum()
    }

    /// `H(X_1 | X_2)`.
    pub fn equivocation(&self) -> Result<f64> {
        if self.arity != 2 {
            return Err(Error::ArityMismatch { expected: 2, got: self.arity });
        }
        Ok((self.joint_entropy() - shannon_entropy(&self.marginal(1)?)).max(0.0))
    }

    /// `sum_k H(X_k) - H(X_1, ..., X_n)`.
    pub fn total_correlation(&self) -> f64 {
        let marg: f64 = (0..self.arity).map(|k| shannon_entropy(&self.marginal(k).expect("k < arity"))).sum();
        (marg - self.joint_entropy()).max(0.0)
    }

    /// Total variation distance over the union of supports.
    pub fn tv(&self, other: &Self) -> Result<f64> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        let mut acc = 0.0;
        for (idx, p) in &self.entries {
            acc += (p - other.entries.get(idx).copied().unwrap_or(0.0)).abs();
        }
        for (idx, q) in &other.entries {
            if !self.entries.contains_key(idx) {
                acc += q;
            }
        }
        Ok(0.5 * acc)
    }

    /// `(1 - t) self + t other`.
    pub fn mixture(&self, other: &Self, t: f64) -> Result<Self> {
        check_unit_interval("t", t)?;
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        let mut map: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (idx, p) in &self.entries {
            *map.entry(idx.clone()).or_default() += (1.0 - t) * p;
        }
        for (idx, q) in &other.entries {
            *map.entry(idx.clone()).or_default() += t * q;
        }
        Self::normalized(self.arity, map.into_iter().collect())
    }

    /// `sum_i E_i sum_{rest} [p_{i, rest} - eps]_+` with `E_i` the levels
    /// of the first variable.
    pub fn energy_offset(&self, spec: &SpectrumSequence, eps: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (idx, &p) in &self.entries {
            let w = p - eps;
            if w > 0.0 {
                let e = spec.value(idx[0]).ok_or_else(|| Error::InvalidSpectrum(format!("no level {}", idx[0])))?;
                acc += w * e;
            }
        }
        Ok(acc)
    }

    /// Mean of the first variable's energy.
    pub fn mean_energy(&self, spec: &SpectrumSequence) -> Result<f64> {
        let m = self.marginal(0)?;
        let levels = spec.values(m.len())?;
        Ok(m.iter().zip(&levels).map(|(p, e)| p * e).sum())
    }
}

/// Shannon entropy in nats.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().map(|&x| eta(x)).sum()
}

/// `C eps ln d + D g(eps)`.
pub fn classical_rank_bound(params: &LaaClassParams, d: usize, eps: f64) -> Result<f64> {
    crate::afw::afw_rank_bound(params, d, eps)
}

/// `C eps F((E - offset)/eps) + D g(eps)`, the offset computed from `p` when
/// given. The spectrum must start at zero.
pub fn classical_energy_bound(
    params: &LaaClassParams,
    spec: &SpectrumSequence,
    energy: f64,
    eps: f64,
    p: Option<&JointDistribution>,
) -> Result<f64> {
    check_unit_interval("epsilon", eps)?;
    if spec.ground_energy() != 0.0 {
        return Err(Error::InvalidSpectrum(format!(
            "lowest level must be 0, got {}",
            spec.ground_energy()
        )));
    }
    if energy < 0.0 {
        return Err(Error::NegativeInput("energy", energy));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    let offset = match p {
        Some(p) => p.energy_offset(spec, eps)?,
        None => 0.0,
    };
    let budget = (energy - offset).max(0.0);
    Ok(params.c * eps * max_entropy(spec, budget / eps)? + params.d * g_unchecked(eps))
}

/// `eps ln(n - 1) + h2(eps)`, valid for `eps <= 1 - 1/n`.
pub fn alhejji_smith_bound(n: usize, eps: f64) -> Result<f64> {
    check_unit_interval("epsilon", eps)?;
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
            range: ">= 1".into(),
        });
    }
    let cap = 1.0 - 1.0 / n as f64;
    if eps > cap + 1e-15 {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: eps,
            range: format!("[0, {cap}]"),
        });
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    Ok(eps * ((n - 1) as f64).ln() + h2_unchecked(eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    fn correlated(d: usize) -> JointDistribution {
        JointDistribution::new(2, (0..d).map(|i| (vec![i, i], 1.0 / d as f64))).unwrap()
    }

    #[test]
    fn marginals() {
        let p = JointDistribution::product(&[&[0.2, 0.8], &[0.5, 0.25, 0.25]]).unwrap();
        let m = p.marginal(1).unwrap();
        for (a, b) in m.iter().zip([0.5, 0.25, 0.25]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        let u = JointDistribution::univariate(&[0.1, 0.9]).unwrap();
        assert_eq!(u.marginal(0).unwrap(), vec![0.1, 0.9]);
        assert_eq!(correlated(2).marginal(0).unwrap(), vec![0.5, 0.5]);
        assert!(matches!(p.marginal(2), Err(Error::IndexOutOfRange { index: 2, arity: 2 })));
    }

    #[test]
    fn entropies() {
        let d = 5;
        let u = JointDistribution::univariate(&vec![0.2; d]).unwrap();
        assert_abs_diff_eq!(u.joint_entropy(), (d as f64).ln(), epsilon = 1e-14);
        let p = JointDistribution::product(&[&[0.3, 0.7], &[0.6, 0.4]]).unwrap();
        assert_abs_diff_eq!(p.equivocation().unwrap(), shannon_entropy(&[0.3, 0.7]), epsilon = 1e-14);
        assert_abs_diff_eq!(p.total_correlation(), 0.0, epsilon = 1e-14);
        let c = correlated(4);
        assert_abs_diff_eq!(c.equivocation().unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.total_correlation(), 4f64.ln(), epsilon = 1e-14);
        assert!(matches!(u.equivocation(), Err(Error::ArityMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn validation() {
        assert!(JointDistribution::new(2, vec![(vec![0, 0], 0.5), (vec![0, 0], 0.5)]).is_err());
        assert!(JointDistribution::new(2, vec![(vec![0, 0], 0.5), (vec![1, 0], 0.4)]).is_err());
        assert!(JointDistribution::new(2, vec![(vec![0], 1.0)]).is_err());
        assert!(JointDistribution::new(1, vec![(vec![0], 1.5), (vec![1], -0.5)]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let text = r#"{"arity":2,"entries":[[0,0,0.5],[1,1,0.25],[1,2,0.25]]}"#;
        let p = JointDistribution::from_json(text).unwrap();
        assert_eq!(p.support_size(1).unwrap(), 3);
        assert_eq!(JointDistribution::from_json(&p.to_json()).unwrap(), p);
        assert!(JointDistribution::from_json(r#"{"arity":2,"entries":[[0.5,0,1.0]]}"#).is_err());
    }

    #[test]
    fn tv_over_union() {
        let p = JointDistribution::new(1, vec![(vec![0], 0.5), (vec![1], 0.5)]).unwrap();
        let q = JointDistribution::new(1, vec![(vec![1], 0.5), (vec![2], 0.5)]).unwrap();
        assert_abs_diff_eq!(p.tv(&q).unwrap(), 0.5, epsilon = 1e-15);
        let m = p.mixture(&q, 0.4).unwrap();
        assert_abs_diff_eq!(p.tv(&m).unwrap(), 0.4 * 0.5, epsilon = 1e-15);
    }

    #[test]
    fn rank_bound_forms() {
        let eq = LaaClassParams::conditional_entropy_qc();
        assert_eq!(classical_rank_bound(&eq, 4, 0.0).unwrap(), 0.0);
        for eps in [0.1, 0.5, 1.0] {
            assert_abs_diff_eq!(
                classical_rank_bound(&eq, 7, eps).unwrap(),
                eps * 7f64.ln() + g_unchecked(eps),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn alhejji_smith_is_sharper() {
        assert_abs_diff_eq!(alhejji_smith_bound(2, 0.5).unwrap(), LN_2, epsilon = 1e-15);
        assert_eq!(alhejji_smith_bound(3, 0.0).unwrap(), 0.0);
        assert!(alhejji_smith_bound(2, 0.6).is_err());
        let eq = LaaClassParams::conditional_entropy_qc();
        for n in 2..12 {
            let cap = 1.0 - 1.0 / n as f64;
            for k in 1..=50 {
                let eps = cap * k as f64 / 50.0;
                assert!(alhejji_smith_bound(n, eps).unwrap() <= classical_rank_bound(&eq, n, eps).unwrap() + 1e-15);
            }
        }
    }

    #[test]
    fn energy_bound_forms() {
        let eq = LaaClassParams::conditional_entropy_qc();
        let spec = SpectrumSequence::number_operator();
        for (e, eps) in [(1.0, 0.1), (3.0, 0.5), (0.2, 1.0)] {
            assert_abs_diff_eq!(
                classical_energy_bound(&eq, &spec, e, eps, None).unwrap(),
                eps * g_unchecked(e / eps) + g_unchecked(eps),
                epsilon = 1e-12
            );
        }
        let shifted = SpectrumSequence::explicit(vec![1.0, 2.0]).unwrap();
        assert!(classical_energy_bound(&eq, &shifted, 1.0, 0.1, None).is_err());
    }

    #[test]
    fn refinement_vanishes_above_max_entry() {
        let eq = LaaClassParams::conditional_entropy_qc();
        let spec = SpectrumSequence::number_operator();
        let p = JointDistribution::product(&[&[0.5, 0.3, 0.2], &[0.6, 0.4]]).unwrap();
        let eps = p.max_probability();
        assert_eq!(p.energy_offset(&spec, eps).unwrap(), 0.0);
        let e = p.mean_energy(&spec).unwrap();
        assert_eq!(
            classical_energy_bound(&eq, &spec, e, eps, Some(&p)).unwrap(),
            classical_energy_bound(&eq, &spec, e, eps, None).unwrap()
        );
        let small = 0.05;
        assert!(p.energy_offset(&spec, small).unwrap() > 0.0);
        assert!(
            classical_energy_bound(&eq, &spec, e, small, Some(&p)).unwrap()
                < classical_energy_bound(&eq, &spec, e, small, None).unwrap()
        );
    }
}
