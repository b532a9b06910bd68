//! Hamiltonian spectra, the scalar entropy functions `g` and `h2`, and the
//! energy-constrained entropy maximizer.

use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::linalg::eta;

/// Largest truncation `adaptive_truncation` will consider.
pub const N_MAX: usize = 1 << 20;
/// Smallest inverse temperature the bracket search will probe.
pub const BETA_MIN: f64 = 1e-8;
const BETA_MAX: f64 = 1e12;
const N_START: usize = 16;

/// `g(x) = (x+1) ln(x+1) - x ln x`, the entropy of a thermal oscillator
/// with mean occupation `x`.
pub fn g(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::NegativeInput("g", x));
    }
    Ok(g_unchecked(x))
}

pub(crate) fn g_unchecked(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if x.is_infinite() {
        f64::INFINITY
    } else {
        x.ln_1p() + x * (1.0 / x).ln_1p()
    }
}

/// Binary entropy in nats.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_unit_interval("p", p)?;
    Ok(h2_unchecked(p))
}

pub(crate) fn h2_unchecked(p: f64) -> f64 {
    eta(p) + eta(1.0 - p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpectrumKind {
    /// `E_k = step * k` for k = 0, 1, 2, ...
    Arithmetic { step: f64 },
    /// A finite nondecreasing list.
    Explicit { values: Vec<f64> },
    /// `E_k = scale * k^exponent`, unbounded with polynomial growth.
    Power { scale: f64, exponent: f64 },
}

/// Nondecreasing energy levels of a Hamiltonian, listed with multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumKind", into = "SpectrumKind")]
pub struct SpectrumSequence {
    kind: SpectrumKind,
}

impl TryFrom<SpectrumKind> for SpectrumSequence {
    type Error = Error;

    fn try_from(kind: SpectrumKind) -> Result<Self> {
        match &kind {
            SpectrumKind::Arithmetic { step } => {
                if !(step.is_finite() && *step > 0.0) {
                    return Err(Error::InvalidSpectrum(format!("step {step} must be positive")));
                }
            }
            SpectrumKind::Explicit { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidSpectrum("empty value list".into()));
                }
                if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidSpectrum("values must be finite and nonnegative".into()));
                }
                if values.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::InvalidSpectrum("values must be nondecreasing".into()));
                }
            }
            SpectrumKind::Power { scale, exponent } => {
                if !(scale.is_finite() && *scale > 0.0 && exponent.is_finite() && *exponent > 0.0) {
                    return Err(Error::InvalidSpectrum(format!(
                        "power law needs positive scale and exponent, got {scale}, {exponent}"
                    )));
                }
            }
        }
        Ok(Self { kind })
    }
}

impl From<SpectrumSequence> for SpectrumKind {
    fn from(s: SpectrumSequence) -> Self {
        s.kind
    }
}

impl SpectrumSequence {
    pub fn arithmetic(step: f64) -> Result<Self> {
        SpectrumKind::Arithmetic { step }.try_into()
    }

    /// The number operator.
    pub fn number_operator() -> Self {
        Self {
            kind: SpectrumKind::Arithmetic { step: 1.0 },
        }
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        SpectrumKind::Explicit { values }.try_into()
    }

    pub fn power(scale: f64, exponent: f64) -> Result<Self> {
        SpectrumKind::Power { scale, exponent }.try_into()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpectrum(e.to_string()))
    }

    pub fn kind(&self) -> &SpectrumKind {
        &self.kind
    }

    /// `E_i`, or `None` past the end of a finite list.
    pub fn value(&self, i: usize) -> Option<f64> {
        match &self.kind {
            SpectrumKind::Arithmetic { step } => Some(step * i as f64),
            SpectrumKind::Explicit { values } => values.get(i).copied(),
            SpectrumKind::Power { scale, exponent } => Some(scale * (i as f64).powf(*exponent)),
        }
    }

    /// Number of levels for finite spectra.
    pub fn len(&self) -> Option<usize> {
        match &self.kind {
            SpectrumKind::Explicit { values } => Some(values.len()),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.len().is_some()
    }

    /// The first `n` levels.
    pub fn values(&self, n: usize) -> Result<Vec<f64>> {
        if let Some(len) = self.len() {
            if n > len {
                return Err(Error::DimMismatch(n, len));
            }
        }
        Ok((0..n).map(|i| self.value(i).unwrap()).collect())
    }

    pub fn ground_energy(&self) -> f64 {
        self.value(0).unwrap()
    }

    /// Degeneracy of the lowest level.
    pub fn ground_multiplicity(&self) -> usize {
        match &self.kind {
            SpectrumKind::Explicit { values } => values.iter().take_while(|&&v| v == values[0]).count(),
            _ => 1,
        }
    }

    fn uniform_mean(&self) -> Option<f64> {
        match &self.kind {
            SpectrumKind::Explicit { values } => Some(values.iter().sum::<f64>() / values.len() as f64),
            _ => None,
        }
    }
}

/// Thermal distribution matching a prescribed mean energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsSolution {
    pub energy: f64,
    pub beta: f64,
    pub truncation: usize,
    pub probabilities: Vec<f64>,
    pub f_value: f64,
    /// Relative weight of the discarded levels, estimated from the last doubling.
    pub tail_bound: f64,
}

impl GibbsSolution {
    pub fn mean_energy(&self, spec: &SpectrumSequence) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(i, p)| p * spec.value(i).unwrap())
            .sum()
    }
}

/// Smallest `N` whose discarded Boltzmann weight at `beta` is below `tol`
/// relative to the kept weight.
pub fn adaptive_truncation(spec: &SpectrumSequence, beta: f64, tol: f64) -> Result<usize> {
    Ok(truncate(spec, beta, tol)?.0)
}

/// Returns `(N, relative tail estimate)`.
fn truncate(spec: &SpectrumSequence, beta: f64, tol: f64) -> Result<(usize, f64)> {
    if !(beta > 0.0) {
        return Err(Error::BracketFailure(format!("inverse temperature {beta} must be positive")));
    }
    let e0 = spec.ground_energy();
    let weight = |i: usize| (-beta * (spec.value(i).unwrap() - e0)).exp();
    let cap = spec.len().unwrap_or(N_MAX).min(N_MAX);
    let mut prefix: Vec<f64> = Vec::with_capacity(N_START * 2);
    let mut acc = 0.0;
    let mut extend = |prefix: &mut Vec<f64>, upto: usize| {
        for i in prefix.len()..upto {
            acc += weight(i);
            prefix.push(acc);
        }
    };
    let mut n = N_START.min(cap);
    extend(&mut prefix, n);
    let total = loop {
        if n == cap {
            if spec.is_finite() {
                break prefix[n - 1];
            }
            return Err(Error::BracketFailure(format!(
                "partition sum at beta = {beta:e} not converged within {N_MAX} levels"
            )));
        }
        let m = (2 * n).min(cap);
        extend(&mut prefix, m);
        let (z_n, z_m) = (prefix[n - 1], prefix[m - 1]);
        if z_m - z_n < tol * z_n {
            break z_m;
        }
        n = m;
    };
    // smallest prefix whose remainder within the converged window is below tol
    let last = prefix.len();
    let mut keep = last;
    for k in (1..=last).rev() {
        if total - prefix[k - 1] < tol * prefix[k - 1] {
            keep = k;
        } else {
            break;
        }
    }
    let tail = (total - prefix[keep - 1]) / prefix[keep - 1];
    Ok((keep, tail))
}

/// Thermal statistics of one spectrum at fixed `beta` on a fixed truncation.
struct Thermal {
    shifted: Vec<f64>,
    e0: f64,
}

impl Thermal {
    fn new(spec: &SpectrumSequence, n: usize) -> Self {
        let e0 = spec.ground_energy();
        let shifted = (0..n).map(|i| spec.value(i).unwrap() - e0).collect();
        Self { shifted, e0 }
    }

    /// `(mean energy, entropy)` of the truncated Gibbs distribution.
    fn stats(&self, beta: f64) -> (f64, f64) {
        let mut z = 0.0;
        let mut ez = 0.0;
        for &e in &self.shifted {
            let w = (-beta * e).exp();
            z += w;
            ez += e * w;
        }
        let mean_shift = ez / z;
        (self.e0 + mean_shift, beta * mean_shift + z.ln())
    }

    fn probabilities(&self, beta: f64) -> Vec<f64> {
        let w: Vec<f64> = self.shifted.iter().map(|&e| (-beta * e).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    }
}

/// Finds `beta` with `mean(beta) = energy` for a decreasing `mean`, expanding
/// the bracket from `beta0`.
fn bracket(mean: impl Fn(f64) -> Result<f64>, energy: f64, beta0: f64) -> Result<(f64, f64)> {
    let mut beta = beta0;
    if mean(beta)? > energy {
        loop {
            let next = beta * 2.0;
            if next > BETA_MAX {
                return Err(Error::BracketFailure(format!("energy {energy} too close to the ground level")));
            }
            if mean(next)? <= energy {
                return Ok((beta, next));
            }
            beta = next;
        }
    } else {
        loop {
            let next = beta / 2.0;
            if next < BETA_MIN {
                return Err(Error::BracketFailure(format!(
                    "mean energy stays below {energy} down to beta = {BETA_MIN:e}"
                )));
            }
            if mean(next)? >= energy {
                return Ok((next, beta));
            }
            beta = next;
        }
    }
}

/// Brent's method on `f(beta) = mean(beta) - energy` over a valid bracket.
fn brent(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut bisected = true;
    for _ in 0..500 {
        if fb.abs() <= tol || (b - a).abs() <= 4.0 * f64::EPSILON * b.abs() {
            return b;
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let outside = !((s > lo.min(b)) && (s < lo.max(b)));
        let slow = if bisected {
            (s - b).abs() >= (b - c).abs() / 2.0
        } else {
            (s - b).abs() >= (c - d).abs() / 2.0
        };
        if outside || slow {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    b
}

fn tail_tol(tol: f64, energy: f64) -> f64 {
    (1e-3 * tol / energy.max(1.0)).max(1e-16)
}

/// Joint thermal problem over `specs` with a shared inverse temperature.
/// Returns `(beta, thermals, tail estimate)`.
fn solve_joint(specs: &[SpectrumSequence], energy: f64, tol: f64) -> Result<(f64, Vec<Thermal>, f64)> {
    let e0: f64 = specs.iter().map(|s| s.ground_energy()).sum();
    if !(energy > e0) {
        return Err(Error::EnergyBelowGround { energy, ground: e0 });
    }
    let ttol = tail_tol(tol, energy);
    let mean_adaptive = |beta: f64| -> Result<f64> {
        let mut total = 0.0;
        for s in specs {
            let (n, _) = truncate(s, beta, ttol)?;
            total += Thermal::new(s, n).stats(beta).0;
        }
        Ok(total)
    };
    if specs.iter().all(|s| s.is_finite()) {
        let top: f64 = specs.iter().map(|s| s.uniform_mean().unwrap()).sum();
        if energy >= top {
            return Err(Error::BracketFailure(format!(
                "energy {energy} is at or above the infinite-temperature mean {top}"
            )));
        }
    }
    let (lo, hi) = bracket(mean_adaptive, energy, 1.0 / (energy - e0))?;
    let mut tail = 0.0_f64;
    let mut thermals = Vec::with_capacity(specs.len());
    for s in specs {
        let (n, t) = truncate(s, lo, ttol)?;
        tail = tail.max(t);
        thermals.push(Thermal::new(s, n));
    }
    let f = |beta: f64| thermals.iter().map(|t| t.stats(beta).0).sum::<f64>() - energy;
    let beta = brent(f, lo, hi, tol);
    Ok((beta, thermals, tail))
}

/// Thermal state of `spec` with mean energy `energy` to within `tol`.
pub fn solve_beta(spec: &SpectrumSequence, energy: f64, tol: f64) -> Result<GibbsSolution> {
    let (beta, thermals, tail_bound) = solve_joint(std::slice::from_ref(spec), energy, tol)?;
    let t = &thermals[0];
    let mut probabilities = t.probabilities(beta);
    while probabilities.len() > 1 && *probabilities.last().unwrap() == 0.0 {
        probabilities.pop();
    }
    let (_, f_value) = t.stats(beta);
    Ok(GibbsSolution {
        energy,
        beta,
        truncation: probabilities.len(),
        probabilities,
        f_value,
        tail_bound,
    })
}

fn default_tol(energy: f64) -> f64 {
    1e-11 * energy.max(1.0)
}

/// Maximum entropy over states with mean energy at most `energy`.
pub fn max_entropy(spec: &SpectrumSequence, energy: f64) -> Result<f64> {
    let e0 = spec.ground_energy();
    if energy.is_nan() || energy < e0 {
        return Err(Error::EnergyBelowGround { energy, ground: e0 });
    }
    if energy == e0 {
        return Ok((spec.ground_multiplicity() as f64).ln());
    }
    match &spec.kind {
        SpectrumKind::Arithmetic { step } => Ok(g_unchecked(energy / step)),
        SpectrumKind::Explicit { values } => {
            if energy >= spec.uniform_mean().unwrap() {
                Ok((values.len() as f64).ln())
            } else {
                Ok(solve_beta(spec, energy, default_tol(energy))?.f_value)
            }
        }
        SpectrumKind::Power { .. } => Ok(solve_beta(spec, energy, default_tol(energy))?.f_value),
    }
}

/// Maximum entropy of `m` systems under a bound on the summed energy.
pub fn max_entropy_multi(specs: &[SpectrumSequence], energy: f64) -> Result<f64> {
    match specs {
        [] => Err(Error::InvalidSpectrum("no spectra given".into())),
        [one] => max_entropy(one, energy),
        [first, rest @ ..] => {
            if let Some(s) = specs.iter().find(|s| s.ground_energy() != 0.0) {
                return Err(Error::InvalidSpectrum(format!(
                    "ground energy {} is not zero",
                    s.ground_energy()
                )));
            }
            let m = specs.len() as f64;
            if rest.iter().all(|s| s == first) {
                return Ok(m * max_entropy(first, energy / m)?);
            }
            if energy < 0.0 {
                return Err(Error::EnergyBelowGround { energy, ground: 0.0 });
            }
            if energy == 0.0 {
                return Ok(specs.iter().map(|s| (s.ground_multiplicity() as f64).ln()).sum());
            }
            if specs.iter().all(|s| s.is_finite()) {
                let top: f64 = specs.iter().map(|s| s.uniform_mean().unwrap()).sum();
                if energy >= top {
                    return Ok(specs.iter().map(|s| (s.len().unwrap() as f64).ln()).sum());
                }
            }
            let (beta, thermals, _) = solve_joint(specs, energy, default_tol(energy))?;
            Ok(thermals.iter().map(|t| t.stats(beta).1).sum())
        }
    }
}
