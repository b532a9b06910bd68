//! Truncated Fock-space coherent states and classical (coherent-mixture)
//! states of several oscillator modes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::afw::{QuasiClassicalEnsemble, StateFamily};
use crate::error::{check_unit_interval, Error, Result};
use crate::hamiltonians::g_unchecked;
use crate::linalg::{eta, CMatrix, CVector, DensityOperator, HermitianOperator, C64};

/// Largest Fock-space weight a truncation may discard.
pub const LEAK_TOL: f64 = 1e-10;
/// Largest assembled dimension `N^n`.
pub const MAX_ASSEMBLED_DIM: usize = 1024;

/// Poisson-tail cutoff rule: `N >= |z|^2 + 10 |z| + 20`.
pub fn default_cutoff(z: C64) -> usize {
    let r = z.norm();
    (r * r + 10.0 * r + 20.0).ceil() as usize
}

fn raw_coherent(z: C64, cutoff: usize) -> (CVector, f64) {
    let mut v = CVector::zeros(cutoff);
    let mut amp = C64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    let mut kept = 0.0;
    for k in 0..cutoff {
        if k > 0 {
            amp = amp * z / (k as f64).sqrt();
        }
        v[k] = amp;
        kept += amp.norm_sqr();
    }
    (v, (1.0 - kept).max(0.0))
}

/// Fock amplitudes of the coherent state `|z>`, truncated to `cutoff`
/// levels and renormalized.
pub fn coherent_vector(z: C64, cutoff: usize) -> Result<CVector> {
    let (v, leakage) = raw_coherent(z, cutoff);
    if leakage >= LEAK_TOL || cutoff == 0 {
        return Err(Error::CutoffTooSmall {
            cutoff,
            norm_sqr: z.norm_sqr(),
            leakage,
        });
    }
    let n = v.norm();
    Ok(v.unscale(n))
}

/// `<z|w>` for untruncated coherent states.
pub fn coherent_overlap(z: C64, w: C64) -> C64 {
    (z.conj() * w - 0.5 * (z.norm_sqr() + w.norm_sqr())).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    /// One complex amplitude per mode, as `[re, im]`.
    #[serde(with = "complex_pairs")]
    pub z: Vec<C64>,
    #[serde(rename = "w")]
    pub weight: f64,
}

mod complex_pairs {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

impl Atom {
    pub fn new(z: Vec<C64>, weight: f64) -> Self {
        Self { z, weight }
    }
}

#[derive(Deserialize)]
struct MixtureFile {
    modes: usize,
    atoms: Vec<Atom>,
    #[serde(default)]
    cutoff: Option<usize>,
}

/// A finitely supported P-representation: `sum_a w_a |z_a><z_a|` over
/// product coherent states of `modes` oscillators.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentMixture {
    modes: usize,
    atoms: Vec<Atom>,
    cutoff: usize,
}

impl CoherentMixture {
    /// Mixture with the cutoff chosen by [`default_cutoff`] over all amplitudes.
    pub fn new(modes: usize, atoms: Vec<Atom>) -> Result<Self> {
        let cutoff = atoms
            .iter()
            .flat_map(|a| a.z.iter().map(|&z| default_cutoff(z)))
            .max()
            .unwrap_or(1);
        Self::with_cutoff(modes, atoms, cutoff)
    }

    pub fn with_cutoff(modes: usize, atoms: Vec<Atom>, cutoff: usize) -> Result<Self> {
        if modes == 0 || atoms.is_empty() {
            return Err(Error::InvalidDistribution("mixture needs modes and atoms".into()));
        }
        for a in &atoms {
            if a.z.len() != modes {
                return Err(Error::ArityMismatch {
                    expected: modes,
                    got: a.z.len(),
                });
            }
            if !(a.weight > 0.0) || !a.weight.is_finite() {
                return Err(Error::InvalidDistribution(format!("atom weight {} must be positive", a.weight)));
            }
            for &z in &a.z {
                coherent_vector(z, cutoff)?;
            }
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        Ok(Self { modes, atoms, cutoff })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: MixtureFile = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        match f.cutoff {
            Some(c) => Self::with_cutoff(f.modes, f.atoms, c),
            None => Self::new(f.modes, f.atoms),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// The representing measure of one mode.
    pub fn marginal(&self, mode: usize) -> Result<CoherentMixture> {
        self.check_mode(mode)?;
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom::new(vec![a.z[mode]], a.weight))
            .collect();
        Self::with_cutoff(1, atoms, self.cutoff)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return Err(Error::IndexOutOfRange {
                index: mode,
                arity: self.modes,
            });
        }
        Ok(())
    }

    fn assembled_dim(&self) -> Result<usize> {
        let dim = (self.cutoff as u64).checked_pow(self.modes as u32).unwrap_or(u64::MAX);
        if dim > MAX_ASSEMBLED_DIM as u64 {
            return Err(Error::DimensionTooLarge(dim.min(usize::MAX as u64) as usize, MAX_ASSEMBLED_DIM));
        }
        Ok(dim as usize)
    }

    /// Truncated product vector of one atom.
    fn atom_vector(&self, atom: &Atom) -> CVector {
        let mut v = CVector::from_element(1, C64::new(1.0, 0.0));
        for &z in &atom.z {
            v = v.kronecker(&coherent_vector(z, self.cutoff).unwrap());
        }
        v
    }
}

/// Mean photon number of mode `mode`, read off the representing measure.
pub fn mean_photon(mix: &CoherentMixture, mode: usize) -> Result<f64> {
    mix.check_mode(mode)?;
    Ok(mix.atoms.iter().map(|a| a.weight * a.z[mode].norm_sqr()).sum())
}

/// The truncated state as a dense matrix on `N^n` dimensions, without
/// state validation.
pub fn assemble_classical_matrix(mix: &CoherentMixture) -> Result<CMatrix> {
    let dim = mix.assembled_dim()?;
    let mut m = CMatrix::zeros(dim, dim);
    for a in &mix.atoms {
        let v = mix.atom_vector(a);
        m += (&v * v.adjoint()).scale(a.weight);
    }
    Ok(m)
}

pub fn assemble_classical_state(mix: &CoherentMixture) -> Result<DensityOperator> {
    DensityOperator::new(assemble_classical_matrix(mix)?)
}

/// `Tr(N_mode rho)` for an assembled `modes`-mode matrix with `cutoff` levels per mode.
pub fn number_expectation(m: &CMatrix, modes: usize, cutoff: usize, mode: usize) -> Result<f64> {
    if mode >= modes {
        return Err(Error::IndexOutOfRange { index: mode, arity: modes });
    }
    let stride = cutoff.pow((modes - 1 - mode) as u32);
    Ok((0..m.nrows()).map(|i| m[(i, i)].re * ((i / stride) % cutoff) as f64).sum())
}

/// `eps g(E/eps) + 2 g(eps)`: continuity bound for the mutual information of
/// two-mode classical states whose representing measures are `eps`-close in
/// total variation, the first mode having mean photon number at most `E`.
pub fn classical_mi_bound(energy: f64, eps: f64) -> Result<f64> {
    check_unit_interval("epsilon", eps)?;
    if energy < 0.0 {
        return Err(Error::NegativeInput("energy", energy));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    Ok(eps * g_unchecked(energy / eps) + 2.0 * g_unchecked(eps))
}

/// Entropy of `sum_a w_a |v_a><v_a|` from the Gram matrix of the weighted vectors.
fn gram_entropy(weights: &[f64], overlap: impl Fn(usize, usize) -> C64) -> f64 {
    let k = weights.len();
    let g = CMatrix::from_fn(k, k, |a, b| overlap(a, b) * (weights[a] * weights[b]).sqrt());
    let h = HermitianOperator::new((&g + g.adjoint()).scale(0.5)).expect("Gram matrix is Hermitian");
    let vals = h.eigen().values;
    let total: f64 = vals.iter().map(|v| v.max(0.0)).sum();
    vals.iter().map(|&v| eta(v.max(0.0) / total)).sum()
}

/// Entropies `(S(rho), S(rho_A), S(rho_B))` of a two-mode mixture.
pub fn two_mode_entropies(mix: &CoherentMixture) -> Result<(f64, f64, f64)> {
    if mix.modes != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: mix.modes,
        });
    }
    mix.assembled_dim()?;
    // The assembled state is V V^dag with V = [sqrt(w_a) v_a], so its nonzero
    // spectrum is that of the atom Gram matrix; same for each marginal.
    let vecs: Vec<[CVector; 2]> = mix
        .atoms
        .iter()
        .map(|a| [coherent_vector(a.z[0], mix.cutoff).unwrap(), coherent_vector(a.z[1], mix.cutoff).unwrap()])
        .collect();
    let w: Vec<f64> = mix.atoms.iter().map(|a| a.weight).collect();
    let ov = |mode: usize, a: usize, b: usize| vecs[a][mode].dotc(&vecs[b][mode]);
    let s_ab = gram_entropy(&w, |a, b| ov(0, a, b) * ov(1, a, b));
    let s_a = gram_entropy(&w, |a, b| ov(0, a, b));
    let s_b = gram_entropy(&w, |a, b| ov(1, a, b));
    Ok((s_ab, s_a, s_b))
}

/// `I(A:B) = S(rho_A) + S(rho_B) - S(rho)` for a two-mode mixture.
pub fn classical_mi_value(mix: &CoherentMixture) -> Result<f64> {
    let (s_ab, s_a, s_b) = two_mode_entropies(mix)?;
    Ok(s_a + s_b - s_ab)
}

/// Total variation between atomic measures; atoms are matched by exact
/// coordinates.
pub fn measure_tv(mu: &CoherentMixture, nu: &CoherentMixture) -> Result<f64> {
    let (_, wa, wb) = union_atoms(mu, nu)?;
    Ok(0.5 * wa.iter().zip(&wb).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

type AtomUnion = (Vec<Vec<C64>>, Vec<f64>, Vec<f64>);

fn union_atoms(mu: &CoherentMixture, nu: &CoherentMixture) -> Result<AtomUnion> {
    if mu.modes != nu.modes {
        return Err(Error::ArityMismatch {
            expected: mu.modes,
            got: nu.modes,
        });
    }
    let mut points: Vec<Vec<C64>> = Vec::new();
    let mut wa = Vec::new();
    let mut wb = Vec::new();
    let slot = |z: &Vec<C64>, points: &mut Vec<Vec<C64>>, wa: &mut Vec<f64>, wb: &mut Vec<f64>| {
        match points.iter().position(|p| p == z) {
            Some(i) => i,
            None => {
                points.push(z.clone());
                wa.push(0.0);
                wb.push(0.0);
                points.len() - 1
            }
        }
    };
    for a in &mu.atoms {
        let i = slot(&a.z, &mut points, &mut wa, &mut wb);
        wa[i] += a.weight;
    }
    for a in &nu.atoms {
        let i = slot(&a.z, &mut points, &mut wa, &mut wb);
        wb[i] += a.weight;
    }
    Ok((points, wa, wb))
}

/// Both mixtures as ensembles over the union of their atoms, sharing one
/// state family, so the Jordan machinery applies.
pub fn union_ensembles(mu: &CoherentMixture, nu: &CoherentMixture) -> Result<(QuasiClassicalEnsemble, QuasiClassicalEnsemble)> {
    let (points, wa, wb) = union_atoms(mu, nu)?;
    let cutoff = mu.cutoff.max(nu.cutoff);
    let probe = CoherentMixture::with_cutoff(mu.modes, vec![Atom::new(points[0].clone(), 1.0)], cutoff)?;
    probe.assembled_dim()?;
    let mut labels = Vec::with_capacity(points.len());
    let mut states = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let v = probe.atom_vector(&Atom::new(p.clone(), 1.0));
        labels.push(format!("atom{i}"));
        states.push(DensityOperator::pure(&v)?);
    }
    let family = Arc::new(StateFamily::new(labels, states)?);
    Ok((QuasiClassicalEnsemble::new(Arc::clone(&family), wa)?, QuasiClassicalEnsemble::new(family, wb)?))
}
