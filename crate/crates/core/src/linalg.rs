//! Dense Hermitian linear algebra and state-level primitives.
//!
//! States carry either a dense matrix or, for states that are diagonal in the
//! computational basis, just their diagonal. The diagonal form keeps large
//! truncated Gibbs states (thousands of levels) cheap; every operation that
//! needs a matrix materializes one on demand.

use std::borrow::Cow;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Max entrywise |M - M^dag| accepted as Hermitian.
pub const TOL_HERM: f64 = 1e-12;
/// Allowed deviation of a state's trace from one.
pub const TOL_TRACE: f64 = 1e-10;
/// Most negative eigenvalue still accepted (and clamped to zero).
pub const TOL_NEG_EIG: f64 = 1e-12;
/// Eigenvalues above this count towards the rank.
pub const RANK_TOL: f64 = 1e-10;

/// -x ln x with the convention eta(0) = 0.
#[inline]
pub fn eta(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// Eigenvalues sorted non-increasing, eigenvectors as matching columns.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigensystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Rebuilds `V diag(f(values)) V^dag`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let s = f(v);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

fn max_anti_hermitian(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Orders indices by descending value, ties by ascending index.
fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx
}

/// A Hermitian matrix, not necessarily positive or normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare(matrix.nrows(), matrix.ncols()));
        }
        let asym = max_anti_hermitian(&matrix);
        if asym > TOL_HERM {
            return Err(Error::NonHermitian(asym));
        }
        Ok(Self {
            matrix: symmetrize(&matrix),
        })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            matrix: CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::new(diag[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `self + c I`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.matrix.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += C64::new(c, 0.0);
        }
        Self { matrix: m }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            matrix: self.matrix.scale(c),
        }
    }

    pub fn eigen(&self) -> Eigensystem {
        eigen_trusted(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().values.last().copied().unwrap_or(0.0)
    }

    /// Sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> f64 {
        self.eigen().values.iter().map(|v| v.abs()).sum()
    }
}

/// Eigendecomposition of an already-validated Hermitian matrix.
fn eigen_trusted(m: &CMatrix) -> Eigensystem {
    let n = m.nrows();
    if n == 0 {
        return Eigensystem {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let raw: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let order = descending_order(&raw);
    let values = order.iter().map(|&k| raw[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Eigensystem { values, vectors }
}

/// Eigenvalues sorted non-increasing with an orthonormal eigenbasis.
pub fn eigendecompose(m: &HermitianOperator) -> Eigensystem {
    m.eigen()
}

/// Checks Hermiticity of a raw matrix and decomposes it.
pub fn eigendecompose_matrix(m: &CMatrix) -> Result<Eigensystem> {
    Ok(HermitianOperator::new(m.clone())?.eigen())
}

#[derive(Debug, Clone)]
enum Repr {
    Dense(CMatrix),
    Diagonal(Vec<f64>),
}

/// A positive semidefinite unit-trace matrix.
///
/// The sorted spectrum is cached on first use; eigenvalues in
/// `[-TOL_NEG_EIG, 0)` are clamped to zero.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    repr: Repr,
    spectrum: OnceLock<Vec<f64>>,
    eigensystem: OnceLock<Eigensystem>,
}

fn clamp_spectrum(values: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(values.len());
    for &v in values {
        if !v.is_finite() || v < -TOL_NEG_EIG {
            return Err(Error::InvalidState(format!("eigenvalue {v:e} is negative")));
        }
        out.push(v.clamp(0.0, 1.0));
    }
    Ok(out)
}

fn check_trace(t: f64) -> Result<()> {
    if (t - 1.0).abs() > TOL_TRACE {
        return Err(Error::InvalidState(format!("trace {t} differs from 1")));
    }
    Ok(())
}

impl DensityOperator {
    /// Validates a dense matrix as a quantum state.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let herm = HermitianOperator::new(matrix)?;
        check_trace(herm.trace())?;
        let mut eig = herm.eigen();
        eig.values = clamp_spectrum(&eig.values)?;
        let spectrum = OnceLock::new();
        let _ = spectrum.set(eig.values.clone());
        let eigensystem = OnceLock::new();
        let _ = eigensystem.set(eig);
        Ok(Self {
            repr: Repr::Dense(herm.into_matrix()),
            spectrum,
            eigensystem,
        })
    }

    /// A state diagonal in the computational basis.
    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidState("empty probability vector".into()));
        }
        let clamped = clamp_spectrum(p)?;
        check_trace(clamped.iter().sum())?;
        Ok(Self {
            repr: Repr::Diagonal(clamped),
            spectrum: OnceLock::new(),
            eigensystem: OnceLock::new(),
        })
    }

    /// `U diag(p) U^dag` for a unitary `basis` (columns are eigenvectors).
    pub fn from_spectrum(p: &[f64], basis: &CMatrix) -> Result<Self> {
        if basis.nrows() != p.len() || basis.ncols() != p.len() {
            return Err(Error::DimMismatch(basis.nrows(), p.len()));
        }
        let clamped = clamp_spectrum(p)?;
        check_trace(clamped.iter().sum())?;
        let mut scaled = basis.clone();
        for (j, &v) in clamped.iter().enumerate() {
            for i in 0..p.len() {
                scaled[(i, j)] *= v;
            }
        }
        let matrix = symmetrize(&(&scaled * basis.adjoint()));
        Self::new(matrix)
    }

    /// The projector onto a (normalized) pure state.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = psi.unscale(norm);
        Self::new(&v * v.adjoint())
    }

    /// Convex combination of states of equal dimension.
    pub fn mixture(weights: &[f64], states: &[&DensityOperator]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::DimMismatch(weights.len(), states.len()));
        }
        let dim = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimMismatch(dim, s.dim()));
        }
        if states.iter().all(|s| s.diagonal().is_some()) {
            let mut p = vec![0.0; dim];
            for (w, s) in weights.iter().zip(states) {
                for (acc, x) in p.iter_mut().zip(s.diagonal().unwrap()) {
                    *acc += w * x;
                }
            }
            return Self::from_probabilities(&p);
        }
        let mut m = CMatrix::zeros(dim, dim);
        for (w, s) in weights.iter().zip(states) {
            m += s.matrix().scale(*w);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Dense(m) => m.nrows(),
            Repr::Diagonal(d) => d.len(),
        }
    }

    /// The diagonal, when the state is stored in diagonal form.
    pub fn diagonal(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Diagonal(d) => Some(d),
            Repr::Dense(_) => None,
        }
    }

    pub fn matrix(&self) -> Cow<'_, CMatrix> {
        match &self.repr {
            Repr::Dense(m) => Cow::Borrowed(m),
            Repr::Diagonal(d) => Cow::Owned(HermitianOperator::from_real_diagonal(d).into_matrix()),
        }
    }

    pub fn to_hermitian(&self) -> HermitianOperator {
        HermitianOperator {
            matrix: self.matrix().into_owned(),
        }
    }

    /// Spectrum sorted non-increasing.
    pub fn eigenvalues(&self) -> &[f64] {
        self.spectrum.get_or_init(|| match &self.repr {
            Repr::Diagonal(d) => descending_order(d).into_iter().map(|k| d[k]).collect(),
            Repr::Dense(_) => self.eigensystem().values.clone(),
        })
    }

    pub fn eigensystem(&self) -> &Eigensystem {
        self.eigensystem.get_or_init(|| match &self.repr {
            Repr::Dense(m) => {
                let mut e = eigen_trusted(m);
                // Already validated at construction; only rounding can push
                // values outside [0, 1] here.
                for v in &mut e.values {
                    *v = v.clamp(0.0, 1.0);
                }
                e
            }
            Repr::Diagonal(d) => {
                let order = descending_order(d);
                let n = d.len();
                let values = order.iter().map(|&k| d[k]).collect();
                let vectors = CMatrix::from_fn(n, n, |i, j| {
                    if i == order[j] {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                Eigensystem { values, vectors }
            }
        })
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&v| v > RANK_TOL).count()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(self)
    }

    /// Diagonal entries in the computational basis.
    pub fn diagonal_entries(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Diagonal(d) => d.clone(),
            Repr::Dense(m) => (0..m.nrows()).map(|i| m[(i, i)].re).collect(),
        }
    }

    /// Largest off-diagonal modulus in the computational basis.
    pub fn off_diagonal_mass(&self) -> f64 {
        match &self.repr {
            Repr::Diagonal(_) => 0.0,
            Repr::Dense(m) => {
                let n = m.nrows();
                let mut worst = 0.0_f64;
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            worst = worst.max(m[(i, j)].norm());
                        }
                    }
                }
                worst
            }
        }
    }

    /// `Tr(H self)` for `H = diag(energies)` in the computational basis.
    pub fn diagonal_expectation(&self, energies: &[f64]) -> Result<f64> {
        if energies.len() < self.dim() {
            return Err(Error::DimMismatch(energies.len(), self.dim()));
        }
        Ok(self
            .diagonal_entries()
            .iter()
            .zip(energies)
            .map(|(p, e)| p * e)
            .sum())
    }

    /// Reduced state on one factor of `C^{d_a} (x) C^{d_b}`.
    pub fn partial_trace(&self, d_a: usize, d_b: usize, keep: Subsystem) -> Result<Self> {
        if d_a * d_b != self.dim() {
            return Err(Error::DimMismatch(d_a * d_b, self.dim()));
        }
        if let Some(d) = self.diagonal() {
            let p: Vec<f64> = match keep {
                Subsystem::A => (0..d_a).map(|i| (0..d_b).map(|j| d[i * d_b + j]).sum()).collect(),
                Subsystem::B => (0..d_b).map(|j| (0..d_a).map(|i| d[i * d_b + j]).sum()).collect(),
            };
            return Self::from_probabilities(&p);
        }
        Self::new(partial_trace_matrix(&self.matrix(), d_a, d_b, keep))
    }
}

/// Factor of a bipartite space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

pub fn partial_trace_matrix(m: &CMatrix, d_a: usize, d_b: usize, keep: Subsystem) -> CMatrix {
    match keep {
        Subsystem::A => CMatrix::from_fn(d_a, d_a, |i, k| {
            (0..d_b).map(|j| m[(i * d_b + j, k * d_b + j)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(d_b, d_b, |j, l| {
            (0..d_a).map(|i| m[(i * d_b + j, i * d_b + l)]).sum()
        }),
    }
}

/// S(rho) = sum eta(lambda) in nats.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    rho.eigenvalues().iter().map(|&v| eta(v)).sum()
}

fn check_same_dim(rho: &DensityOperator, sigma: &DensityOperator) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch(rho.dim(), sigma.dim()));
    }
    Ok(())
}

/// `rho - sigma` as a Hermitian operator.
pub fn difference(rho: &DensityOperator, sigma: &DensityOperator) -> Result<HermitianOperator> {
    check_same_dim(rho, sigma)?;
    Ok(HermitianOperator {
        matrix: rho.matrix().into_owned() - sigma.matrix().into_owned(),
    })
}

/// Half the trace norm of `rho - sigma`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    if let (Some(a), Some(b)) = (rho.diagonal(), sigma.diagonal()) {
        return Ok(0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>());
    }
    Ok((0.5 * difference(rho, sigma)?.trace_norm()).min(1.0))
}

/// `[M]_+`: the part of `M` on its positive eigenspaces.
pub fn positive_part(m: &HermitianOperator) -> HermitianOperator {
    let eig = m.eigen();
    HermitianOperator {
        matrix: symmetrize(&eig.reconstruct_with(|v| v.max(0.0))),
    }
}

/// `[rho - eps I]_+` together with its trace, computed in the eigenbasis of rho.
pub fn shifted_positive_part(rho: &DensityOperator, eps: f64) -> CMatrix {
    if let Some(d) = rho.diagonal() {
        let shifted: Vec<f64> = d.iter().map(|&p| (p - eps).max(0.0)).collect();
        return HermitianOperator::from_real_diagonal(&shifted).into_matrix();
    }
    rho.eigensystem().reconstruct_with(|v| (v - eps).max(0.0))
}

/// Places the sorted spectrum of `sigma` into the sorted eigenbasis of `rho`.
///
/// The result commutes with `rho`, has the spectrum of `sigma`, and is no
/// farther from `rho` in trace distance than `sigma` is.
pub fn mirsky_rearrange(rho: &DensityOperator, sigma: &DensityOperator) -> Result<DensityOperator> {
    check_same_dim(rho, sigma)?;
    let lam_sigma = sigma.eigenvalues();
    if let Some(d) = rho.diagonal() {
        let order = descending_order(d);
        let mut p = vec![0.0; d.len()];
        for (k, &pos) in order.iter().enumerate() {
            p[pos] = lam_sigma[k];
        }
        return DensityOperator::from_probabilities(&p);
    }
    DensityOperator::from_spectrum(lam_sigma, &rho.eigensystem().vectors)
}

/// The channel folding a state diagonal in `basis` onto its first `n` basis
/// vectors: the weight of vector `j*n + k` lands on vector `k`.
pub fn compress_to_support(sigma: &DensityOperator, basis: &CMatrix, n: usize) -> Result<DensityOperator> {
    let dim = sigma.dim();
    if basis.nrows() != dim || basis.ncols() != dim {
        return Err(Error::DimMismatch(basis.nrows(), dim));
    }
    if n == 0 || n > dim {
        return Err(Error::InvalidRank { rank: n, dim });
    }
    let in_basis = basis.adjoint() * sigma.matrix().as_ref() * basis;
    let mut off = 0.0_f64;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                off = off.max(in_basis[(i, j)].norm());
            }
        }
    }
    if off > 1e-9 {
        return Err(Error::BasisMismatch(off));
    }
    let mut folded = vec![0.0; dim];
    for j in 0..dim {
        folded[j % n] += in_basis[(j, j)].re.max(0.0);
    }
    let total: f64 = folded.iter().sum();
    for v in &mut folded {
        *v /= total;
    }
    if is_identity(basis) {
        return DensityOperator::from_probabilities(&folded);
    }
    DensityOperator::from_spectrum(&folded, basis)
}

fn is_identity(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let target = if i == j { 1.0 } else { 0.0 };
            m[(i, j)].re == target && m[(i, j)].im == 0.0
        })
    })
}

/// Kronecker product of two density operators.
pub fn tensor(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator> {
    if let (Some(x), Some(y)) = (a.diagonal(), b.diagonal()) {
        let p: Vec<f64> = x.iter().flat_map(|&u| y.iter().map(move |&v| u * v)).collect();
        return DensityOperator::from_probabilities(&p);
    }
    DensityOperator::new(a.matrix().kronecker(b.matrix().as_ref()))
}

/// Max entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// True if `basis^dag basis` is the identity within `tol`.
pub fn is_unitary(basis: &CMatrix, tol: f64) -> bool {
    let n = basis.ncols();
    max_abs_diff(&(basis.adjoint() * basis), &CMatrix::identity(n, n)) <= tol
}
