//! Entanglement of formation: closed-form two-qubit value, a direct
//! convex-roof search, and the continuity bound.

use rand::Rng;

use crate::error::{check_unit_interval, Error, Result};
use crate::hamiltonians::{g_unchecked, h2_unchecked, max_entropy};
use crate::linalg::{eta, CMatrix, DensityOperator, HermitianOperator, C64};
use crate::random::complex_gaussian;

use super::Constraint;

/// `sqrt(eps (1 - eps))`.
pub fn eof_delta(eps: f64) -> f64 {
    (eps * (1.0 - eps)).max(0.0).sqrt()
}

/// One-sided bound on `E_F(rho) - E_F(sigma)` at trace distance `eps`:
/// `d ln r + g(d)` or `d F(E/d) + g(d)` with `d = sqrt(eps (1 - eps))`.
pub fn eof_bound(constraint: &Constraint, eps: f64) -> Result<f64> {
    check_unit_interval("epsilon", eps)?;
    let delta = eof_delta(eps);
    match constraint {
        Constraint::Rank(r) => {
            if *r == 0 {
                return Err(Error::InvalidRank { rank: 0, dim: 1 });
            }
            if delta == 0.0 {
                return Ok(0.0);
            }
            Ok(delta * (*r as f64).ln() + g_unchecked(delta))
        }
        Constraint::Energy { spec, energy } => {
            if *energy < 0.0 {
                return Err(Error::NegativeInput("energy", *energy));
            }
            if delta == 0.0 {
                return Ok(0.0);
            }
            Ok(delta * max_entropy(spec, energy / delta)? + g_unchecked(delta))
        }
    }
}

fn spin_flip() -> CMatrix {
    // sigma_y (x) sigma_y
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    CMatrix::from_row_slice(4, 4, &[z, z, z, -one, z, z, one, z, z, one, z, z, -one, z, z, z])
}

/// Concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityOperator) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimMismatch(rho.dim(), 4));
    }
    let m = rho.matrix().into_owned();
    let yy = spin_flip();
    let tilde = &yy * m.map(|z| z.conj()) * &yy;
    let sqrt_rho = rho.eigensystem().reconstruct_with(|v| v.max(0.0).sqrt());
    let r = &sqrt_rho * tilde * &sqrt_rho;
    let r = HermitianOperator::new((&r + r.adjoint()).scale(0.5))?;
    // rounding noise of order 1e-16 would otherwise surface as 1e-8 after the root
    let l: Vec<f64> = r
        .eigen()
        .values
        .iter()
        .map(|&v| if v < 1e-14 { 0.0 } else { v.sqrt() })
        .collect();
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// Entanglement of formation of a two-qubit state in nats.
pub fn wootters_eof(rho: &DensityOperator) -> Result<f64> {
    let c = concurrence(rho)?.min(1.0);
    Ok(h2_unchecked(0.5 * (1.0 + (1.0 - c * c).sqrt())))
}

/// Entropy of the first qubit of an unnormalized two-qubit vector.
fn reduced_entropy(psi: &[C64; 4]) -> f64 {
    let total: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let det = (psi[0] * psi[3] - psi[1] * psi[2]).norm_sqr() / (total * total);
    let lo = 2.0 * det / (1.0 + (1.0 - 4.0 * det).max(0.0).sqrt());
    eta(lo) + eta(1.0 - lo)
}

/// Average reduced entropy of the ensemble `psi_k = sum_j A_kj sqrt(l_j) v_j`
/// after orthonormalizing the columns of `A`.
fn roof_objective(params: &[f64], members: usize, vals: &[f64], vecs: &CMatrix) -> f64 {
    let r = vals.len();
    let mut a = CMatrix::from_fn(members, r, |k, j| {
        let idx = 2 * (k * r + j);
        C64::new(params[idx], params[idx + 1])
    });
    // Gram-Schmidt on columns
    for j in 0..r {
        for i in 0..j {
            let proj = a.column(i).dotc(&a.column(j));
            let ci = a.column(i).into_owned();
            let mut cj = a.column_mut(j);
            cj -= ci * proj;
        }
        let n = a.column(j).norm();
        if n < 1e-300 {
            return f64::INFINITY;
        }
        a.column_mut(j).unscale_mut(n);
    }
    let mut total = 0.0;
    for k in 0..members {
        let mut psi = [C64::new(0.0, 0.0); 4];
        for j in 0..r {
            let c = a[(k, j)] * vals[j].sqrt();
            for (x, p) in psi.iter_mut().enumerate() {
                *p += c * vecs[(x, j)];
            }
        }
        let w: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if w > 1e-300 {
            total += w * reduced_entropy(&psi);
        }
    }
    total
}

/// Upper estimate of the two-qubit entanglement of formation by minimizing
/// the average reduced entropy over `members`-element pure-state
/// decompositions, with random restarts. Independent of the concurrence
/// formula.
pub fn convex_roof_search<R: Rng + ?Sized>(rho: &DensityOperator, members: usize, restarts: usize, iterations: usize, rng: &mut R) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimMismatch(rho.dim(), 4));
    }
    let eig = rho.eigensystem();
    let r = rho.rank().max(1);
    if members < r {
        return Err(Error::InvalidRank { rank: r, dim: members });
    }
    let vals: Vec<f64> = eig.values[..r].to_vec();
    let vecs = eig.vectors.columns(0, r).into_owned();
    let n = 2 * members * r;
    let f = |p: &[f64]| roof_objective(p, members, &vals, &vecs);
    let mut best = f64::INFINITY;
    for _ in 0..restarts.max(1) {
        let mut x: Vec<f64> = (0..n / 2)
            .flat_map(|_| {
                let z = complex_gaussian(rng);
                [z.re, z.im]
            })
            .collect();
        best = best.min(adam(&f, &mut x, iterations));
    }
    Ok(best)
}

/// Adam on central finite differences; returns the best value seen.
fn adam(f: &impl Fn(&[f64]) -> f64, x: &mut [f64], iterations: usize) -> f64 {
    let n = x.len();
    let (b1, b2) = (0.9, 0.999);
    let mut m = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut best = f(x);
    let h = 1e-7;
    for t in 1..=iterations {
        let lr = 0.05 * (1e-3f64).powf(t as f64 / iterations as f64);
        for i in 0..n {
            let keep = x[i];
            x[i] = keep + h;
            let up = f(x);
            x[i] = keep - h;
            let down = f(x);
            x[i] = keep;
            grad[i] = (up - down) / (2.0 * h);
        }
        for i in 0..n {
            m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
            v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
            let mh = m[i] / (1.0 - b1.powi(t as i32));
            let vh = v[i] / (1.0 - b2.powi(t as i32));
            x[i] -= lr * mh / (vh.sqrt() + 1e-12);
        }
        best = best.min(f(x));
    }
    best
}
