//! Dense reference constructions of the matrices behind the DMM operators.
//!
//! Everything here is `O(L²)` memory or worse (`W` is `4L² × 4L²`) and exists
//! only to cross-check the transform-domain code at small `L`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dmm::{lambda_u, SolverConfig};
use crate::jamming::TransferMatrix;
use crate::signal::xcorr_direct;

pub type CMatrix = DMatrix<Complex64>;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `U_k`: ones at `(i, i + k)`.
pub fn shift_matrix(n: usize, k: isize) -> CMatrix {
    CMatrix::from_fn(n, n, |r, c| {
        if c as isize - r as isize == k {
            one()
        } else {
            Complex64::default()
        }
    })
}

pub fn transfer_dense(j: &TransferMatrix) -> CMatrix {
    let mut m = CMatrix::zeros(j.len(), j.len());
    for &(r, c) in j.entries() {
        m[(r, c)] = one();
    }
    m
}

/// `[[0, I], [I, 0]]`.
pub fn gamma_matrix(n: usize) -> CMatrix {
    CMatrix::from_fn(2 * n, 2 * n, |r, c| {
        if r + n == c || c + n == r {
            one()
        } else {
            Complex64::default()
        }
    })
}

/// `[[J, 0], [0, I]]`.
pub fn stacked_transfer(j: &TransferMatrix) -> CMatrix {
    let n = j.len();
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&transfer_dense(j));
    for i in 0..n {
        m[(n + i, n + i)] = one();
    }
    m
}

/// `Ũ_k = [[0, U_k], [0, 0]]`.
pub fn u_tilde(n: usize, k: isize) -> CMatrix {
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, n), (n, n)).copy_from(&shift_matrix(n, k));
    m
}

/// `Ũ_{J,k} = [[0, J^H U_k], [0, 0]]`.
pub fn u_tilde_j(j: &TransferMatrix, k: isize) -> CMatrix {
    let n = j.len();
    let block = transfer_dense(j).adjoint() * shift_matrix(n, k);
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, n), (n, n)).copy_from(&block);
    m
}

fn lags(n: usize) -> impl Iterator<Item = isize> {
    1 - n as isize..n as isize
}

fn add_outer(w: &mut DMatrix<f64>, m: &CMatrix, weight: f64) {
    // All Ũ entries are 0/1, so vec(Ũ) is real.
    let v: Vec<(usize, f64)> = m
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() != 0.0)
        .map(|(i, z)| (i, z.re))
        .collect();
    for &(a, va) in &v {
        for &(b, vb) in &v {
            w[(a, b)] += weight * va * vb;
        }
    }
}

/// `A = Σ_{k≠0} vec(Ũ_k) vec(Ũ_k)^H`.
pub fn a_matrix(n: usize) -> DMatrix<f64> {
    let d = 4 * n * n;
    let mut a = DMatrix::zeros(d, d);
    for k in lags(n).filter(|&k| k != 0) {
        add_outer(&mut a, &u_tilde(n, k), 1.0);
    }
    a
}

/// `B = Σ_k vec(Ũ_{J,k}) vec(Ũ_{J,k})^H`.
pub fn b_matrix(j: &TransferMatrix) -> DMatrix<f64> {
    let n = j.len();
    let d = 4 * n * n;
    let mut b = DMatrix::zeros(d, d);
    for k in lags(n) {
        add_outer(&mut b, &u_tilde_j(j, k), 1.0);
    }
    b
}

/// `W = ρA + (1−ρ)B`.
pub fn w_matrix(rho: f64, j: &TransferMatrix) -> DMatrix<f64> {
    a_matrix(j.len()) * rho + b_matrix(j) * (1.0 - rho)
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix, taken as
/// its largest singular value. nalgebra's symmetric QR iteration returns
/// non-finite eigenvalues on some of these exactly structured 0/1 matrices
/// (e.g. `B` for a small RRJ); the SVD does not.
pub fn largest_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

/// `Σ_{k∈lags} C_{a,w}(k) U_k`.
fn toeplitz_sum(a: &[Complex64], w: &[Complex64], skip_zero: bool) -> CMatrix {
    let n = a.len();
    let prof = xcorr_direct(a, w).expect("equal lengths");
    let mut m = CMatrix::zeros(n, n);
    for (k, c) in prof.lags() {
        if skip_zero && k == 0 {
            continue;
        }
        m += shift_matrix(n, k) * c;
    }
    m
}

/// `Φ = Σ_{k≠0} C_{x,w}(k) U_k`.
pub fn phi(x: &[Complex64], w: &[Complex64]) -> CMatrix {
    toeplitz_sum(x, w, true)
}

/// `Φ_J = Σ_k C_{xJ,w}(k) U_k`.
pub fn phi_j(xj: &[Complex64], w: &[Complex64]) -> CMatrix {
    toeplitz_sum(xj, w, false)
}

/// `Q = [[0, ρΦ + (1−ρ) J^H Φ_J], [0, 0]]`.
pub fn q_matrix(x: &[Complex64], w: &[Complex64], rho: f64, j: &TransferMatrix) -> CMatrix {
    let n = x.len();
    let jd = transfer_dense(j);
    let xj: Vec<Complex64> = (&jd * nalgebra::DVector::from_column_slice(x)).iter().copied().collect();
    let block = phi(x, w) * Complex64::new(rho, 0.0)
        + jd.adjoint() * phi_j(&xj, w) * Complex64::new(1.0 - rho, 0.0);
    let mut q = CMatrix::zeros(2 * n, 2 * n);
    q.view_mut((0, n), (n, n)).copy_from(&block);
    q
}

fn stack(x: &[Complex64], w: &[Complex64]) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_iterator(x.len() + w.len(), x.iter().chain(w).copied())
}

/// Penalty block `2β₁a_max Γ + 2β₂a_min 𝒥^H Γ 𝒥 + ε s̃ s̃^H`.
fn penalty_matrix(s: &[Complex64], j: &TransferMatrix, cfg: &SolverConfig) -> CMatrix {
    let n = s.len();
    let g = gamma_matrix(n);
    let sj = stacked_transfer(j);
    let s_tilde = stack(s, &vec![Complex64::default(); n]);
    g.clone() * Complex64::new(2.0 * cfg.beta1 * cfg.a_max, 0.0)
        + sj.adjoint() * g * sj * Complex64::new(2.0 * cfg.beta2 * cfg.a_min, 0.0)
        + (&s_tilde * s_tilde.adjoint()) * Complex64::new(cfg.epsilon, 0.0)
}

/// `R = Q + Q^H − 2λ_u z z^H − 2β₁a_max Γ − 2β₂a_min 𝒥^HΓ𝒥 − ε s̃ s̃^H`.
pub fn r_matrix(
    x: &[Complex64],
    w: &[Complex64],
    s: &[Complex64],
    j: &TransferMatrix,
    cfg: &SolverConfig,
) -> CMatrix {
    let q = q_matrix(x, w, cfg.rho, j);
    let z = stack(x, w);
    let lam = lambda_u(cfg.rho, j);
    &q + q.adjoint() - (&z * z.adjoint()) * Complex64::new(2.0 * lam, 0.0) - penalty_matrix(s, j, cfg)
}

/// `P(z) = 4λ_u L z + ε s̃ s̃^H z − (Q+Q^H) z + (2β₁a_max Γ + 2β₂a_min 𝒥^HΓ𝒥) z`
/// from dense matrices.
pub fn dense_p(
    x: &[Complex64],
    w: &[Complex64],
    s: &[Complex64],
    j: &TransferMatrix,
    cfg: &SolverConfig,
) -> Vec<Complex64> {
    let n = x.len();
    let q = q_matrix(x, w, cfg.rho, j);
    let z = stack(x, w);
    let lam = lambda_u(cfg.rho, j);
    let p = &z * Complex64::new(4.0 * lam * n as f64, 0.0) - (&q + q.adjoint()) * &z + penalty_matrix(s, j, cfg) * &z;
    p.iter().copied().collect()
}
