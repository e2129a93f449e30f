//! Lanczos iteration for the lowest eigenpairs of the sector Hamiltonians.
//!
//! Full reorthogonalization is on by default: sector dimensions here stay
//! well below 10^6, and it keeps ghost copies of converged eigenvalues from
//! polluting gap estimates. The start vector is drawn from a seeded ChaCha
//! stream so repeated runs are reproducible bit for bit.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::models::ModelSpec;

use super::basis::SectorBasis;
use super::hamiltonian::apply_hamiltonian;
use super::EdError;

/// Controls for [`lanczos_lowest`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Number of lowest eigenpairs to resolve (1 to 4).
    pub n_eigs: usize,
    /// Krylov-space cap before giving up.
    pub max_iter: usize,
    /// Accept an eigenpair once ||H v - E v|| <= tol (unit-norm v).
    pub tol: f64,
    /// Re-project the new Krylov vector against the whole stored basis.
    pub reorthogonalize: bool,
    /// Seed of the start vector.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            n_eigs: 1,
            max_iter: 500,
            tol: 1e-10,
            reorthogonalize: true,
            seed: 1,
        }
    }
}

impl LanczosOptions {
    pub fn with_n_eigs(mut self, n: usize) -> Self {
        self.n_eigs = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<(), EdError> {
        if self.n_eigs == 0 || self.n_eigs > 4 {
            return Err(EdError::InvalidOptions("n_eigs must be between 1 and 4"));
        }
        if !(self.tol > 0.0) {
            return Err(EdError::InvalidOptions("tol must be positive"));
        }
        if self.max_iter == 0 {
            return Err(EdError::InvalidOptions("max_iter must be positive"));
        }
        Ok(())
    }
}

/// Lowest eigenpairs of a sector Hamiltonian.
#[derive(Debug, Clone)]
pub struct GroundStateResult {
    /// Eigenvalues in ascending order.
    pub energies: Vec<f64>,
    /// Unit-norm eigenvectors over the sector basis, same order.
    pub vectors: Vec<Vec<f64>>,
    /// Explicit residual norms ||H v - E v||, same order.
    pub residuals: Vec<f64>,
}

impl GroundStateResult {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// Ground-state energy per site.
    pub fn energy_density(&self, l: usize) -> f64 {
        self.energies[0] / l as f64
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Deterministic sign convention: flip so the largest-magnitude entry is
/// positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Lowest `opts.n_eigs` eigenpairs of the sector Hamiltonian.
///
/// Sectors of dimension <= 64 are diagonalized densely (zero Lanczos
/// iterations); convergence failure after `max_iter` reports the best
/// residual reached.
pub fn lanczos_lowest(
    model: &ModelSpec,
    basis: &SectorBasis,
    opts: LanczosOptions,
) -> Result<GroundStateResult, EdError> {
    opts.validate()?;
    let dim = basis.dim();
    if dim < opts.n_eigs {
        return Err(EdError::InvalidOptions("sector smaller than n_eigs"));
    }
    if dim <= 64 {
        return dense_lowest(model, basis, opts.n_eigs);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut q0: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
    let n0 = norm(&q0);
    for x in q0.iter_mut() {
        *x /= n0;
    }

    let m_max = opts.max_iter.min(dim);
    let mut qs: Vec<Vec<f64>> = vec![q0];
    let mut alpha: Vec<f64> = Vec::with_capacity(m_max);
    let mut beta: Vec<f64> = Vec::with_capacity(m_max);
    let mut best_residual = f64::INFINITY;

    for j in 0..m_max {
        let mut w = apply_hamiltonian(model, basis, &qs[j])?;
        if j > 0 {
            axpy(-beta[j - 1], &qs[j - 1], &mut w);
        }
        let a = dot(&qs[j], &w);
        alpha.push(a);
        axpy(-a, &qs[j], &mut w);
        if opts.reorthogonalize {
            for qi in &qs {
                let c = dot(qi, &w);
                axpy(-c, qi, &mut w);
            }
        }
        let b = norm(&w);
        let breakdown = b < 1e-13 * a.abs().max(1.0);
        let m = alpha.len();
        let last_round = m == m_max || breakdown;

        if m >= opts.n_eigs && (m % 10 == 0 || last_round) {
            let (theta, s) = tridiagonal_eigen(&alpha, &beta);
            // Ritz residual estimate for pair i is b * |last row of s|
            let estimates: Vec<f64> = (0..opts.n_eigs).map(|i| b * s[(m - 1, i)].abs()).collect();
            let promising = estimates.iter().all(|&e| e <= 0.5 * opts.tol);
            if promising || last_round {
                let result = assemble_ritz(model, basis, &qs, &theta, &s, opts.n_eigs)?;
                let worst = result
                    .residuals
                    .iter()
                    .cloned()
                    .fold(0.0f64, f64::max);
                best_residual = best_residual.min(worst);
                if worst <= opts.tol {
                    return Ok(result);
                }
                if last_round {
                    return Err(EdError::NotConverged {
                        iterations: m,
                        best_residual,
                    });
                }
            }
        }
        if breakdown {
            // unreachable: last_round covers it above
            break;
        }
        beta.push(b);
        let q_next: Vec<f64> = w.iter().map(|x| x / b).collect();
        qs.push(q_next);
    }
    Err(EdError::NotConverged {
        iterations: alpha.len(),
        best_residual,
    })
}

/// Eigen-decomposition of the tridiagonal Krylov matrix; eigenvalues
/// ascending, eigenvectors as columns in the same order.
fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i > 0 {
            t[(i, i - 1)] = beta[i - 1];
            t[(i - 1, i)] = beta[i - 1];
        }
    }
    let se = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let theta: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let s = DMatrix::from_fn(m, m, |r, c| se.eigenvectors[(r, order[c])]);
    (theta, s)
}

fn assemble_ritz(
    model: &ModelSpec,
    basis: &SectorBasis,
    qs: &[Vec<f64>],
    theta: &[f64],
    s: &DMatrix<f64>,
    n_eigs: usize,
) -> Result<GroundStateResult, EdError> {
    let dim = basis.dim();
    let m = theta.len();
    let mut energies = Vec::with_capacity(n_eigs);
    let mut vectors = Vec::with_capacity(n_eigs);
    let mut residuals = Vec::with_capacity(n_eigs);
    for i in 0..n_eigs {
        let mut x = vec![0.0f64; dim];
        for j in 0..m {
            axpy(s[(j, i)], &qs[j], &mut x);
        }
        let nx = norm(&x);
        for v in x.iter_mut() {
            *v /= nx;
        }
        fix_sign(&mut x);
        let hx = apply_hamiltonian(model, basis, &x)?;
        let energy = dot(&x, &hx);
        let mut res = hx;
        axpy(-energy, &x, &mut res);
        energies.push(energy);
        residuals.push(norm(&res));
        vectors.push(x);
    }
    Ok(GroundStateResult {
        energies,
        vectors,
        residuals,
    })
}

/// Exact dense diagonalization for tiny sectors.
fn dense_lowest(
    model: &ModelSpec,
    basis: &SectorBasis,
    n_eigs: usize,
) -> Result<GroundStateResult, EdError> {
    let dim = basis.dim();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let mut unit = vec![0.0f64; dim];
    for col in 0..dim {
        unit[col] = 1.0;
        let hcol = apply_hamiltonian(model, basis, &unit)?;
        unit[col] = 0.0;
        for row in 0..dim {
            h[(row, col)] = hcol[row];
        }
    }
    let se = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());

    let mut energies = Vec::with_capacity(n_eigs);
    let mut vectors = Vec::with_capacity(n_eigs);
    let mut residuals = Vec::with_capacity(n_eigs);
    for &idx in order.iter().take(n_eigs) {
        let mut x: Vec<f64> = se.eigenvectors.column(idx).iter().copied().collect();
        fix_sign(&mut x);
        let hx = apply_hamiltonian(model, basis, &x)?;
        let energy = dot(&x, &hx);
        let mut res = hx;
        axpy(-energy, &x, &mut res);
        energies.push(energy);
        vectors.push(x);
        residuals.push(norm(&res));
    }
    Ok(GroundStateResult {
        energies,
        vectors,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ed::basis::{build_sector_basis, Sector};
    use crate::models::Boundary;

    #[test]
    fn spin1_two_site_singlet() {
        // S1.S2 on two spin-1 sites: spectrum {-2, -1, 1} in the Sz=0 sector
        let model = ModelSpec::spin1_xxzd(2, Boundary::Open, 1.0, 0.0).unwrap();
        let basis = build_sector_basis(&model, Sector::TotalSz(0)).unwrap();
        let got = lanczos_lowest(&model, &basis, LanczosOptions::default().with_n_eigs(3)).unwrap();
        let expect = [-2.0, -1.0, 1.0];
        for (e, x) in got.energies.iter().zip(expect) {
            assert!((e - x).abs() < 1e-12, "energies {:?}", got.energies);
        }
    }

    #[test]
    fn tfim_ring_of_two() {
        let model = ModelSpec::tfim(2, Boundary::Periodic, 1.0).unwrap();
        let basis = build_sector_basis(&model, Sector::Parity(1)).unwrap();
        let got = lanczos_lowest(&model, &basis, LanczosOptions::default()).unwrap();
        assert!((got.ground_energy() + 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(got.residuals[0] < 1e-12);
    }

    #[test]
    fn single_state_sector() {
        // fully polarized spin-1 sector has exactly one configuration
        let model = ModelSpec::spin1_xxzd(4, Boundary::Periodic, 0.7, 0.3).unwrap();
        let basis = build_sector_basis(&model, Sector::TotalSz(4)).unwrap();
        assert_eq!(basis.dim(), 1);
        let got = lanczos_lowest(&model, &basis, LanczosOptions::default()).unwrap();
        // diagonal element: 4 bonds lambda + 4 sites D = 4*0.7 + 4*0.3
        assert!((got.ground_energy() - 4.0).abs() < 1e-12);
        assert_eq!(got.residuals[0], 0.0);
    }

    #[test]
    fn matches_dense_beyond_fallback() {
        // L=6 spin-1 Sz=0 sector has dim 141 > 64, so this runs real Lanczos
        let model = ModelSpec::spin1_xxzd(6, Boundary::Periodic, 2.59, 2.0).unwrap();
        let basis = build_sector_basis(&model, Sector::TotalSz(0)).unwrap();
        assert!(basis.dim() > 64);
        let opts = LanczosOptions::default().with_n_eigs(2);
        let got = lanczos_lowest(&model, &basis, opts).unwrap();
        // dense reference
        let dense = dense_reference(&model, &basis);
        assert!((got.energies[0] - dense[0]).abs() < 1e-10, "{:?} vs {:?}", got.energies, &dense[..2]);
        assert!((got.energies[1] - dense[1]).abs() < 1e-9);
        assert!(got.residuals.iter().all(|&r| r <= 1e-10));
    }

    #[test]
    fn deterministic_given_seed() {
        let model = ModelSpec::spin1_xxzd(6, Boundary::Periodic, 2.59, 2.2).unwrap();
        let basis = build_sector_basis(&model, Sector::TotalSz(0)).unwrap();
        let opts = LanczosOptions::default().with_seed(99);
        let a = lanczos_lowest(&model, &basis, opts).unwrap();
        let b = lanczos_lowest(&model, &basis, opts).unwrap();
        assert_eq!(a.energies, b.energies);
        assert_eq!(a.vectors, b.vectors);
    }

    #[test]
    fn variational_energy_decreases_with_krylov_size() {
        let model = ModelSpec::spin1_xxzd(6, Boundary::Periodic, 2.59, 2.0).unwrap();
        let basis = build_sector_basis(&model, Sector::TotalSz(0)).unwrap();
        // grow the Krylov space by hand and watch the lowest Ritz value
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dim = basis.dim();
        let mut q0: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
        let n0 = norm(&q0);
        q0.iter_mut().for_each(|x| *x /= n0);
        let mut qs = vec![q0];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut last = f64::INFINITY;
        for j in 0..40 {
            let mut w = apply_hamiltonian(&model, &basis, &qs[j]).unwrap();
            if j > 0 {
                axpy(-beta[j - 1], &qs[j - 1], &mut w);
            }
            let a = dot(&qs[j], &w);
            alpha.push(a);
            axpy(-a, &qs[j], &mut w);
            for qi in &qs {
                let c = dot(qi, &w);
                axpy(-c, qi, &mut w);
            }
            let b = norm(&w);
            let (theta, _) = tridiagonal_eigen(&alpha, &beta);
            assert!(
                theta[0] <= last + 1e-12,
                "Ritz value rose at step {j}: {} -> {}",
                last,
                theta[0]
            );
            last = theta[0];
            if b < 1e-13 {
                break;
            }
            beta.push(b);
            qs.push(w.iter().map(|x| x / b).collect());
        }
    }

    #[test]
    fn invalid_options_rejected() {
        let model = ModelSpec::tfim(4, Boundary::Periodic, 1.0).unwrap();
        let basis = build_sector_basis(&model, Sector::Parity(1)).unwrap();
        let bad = LanczosOptions {
            n_eigs: 5,
            ..Default::default()
        };
        assert!(lanczos_lowest(&model, &basis, bad).is_err());
        let bad = LanczosOptions {
            tol: 0.0,
            ..Default::default()
        };
        assert!(lanczos_lowest(&model, &basis, bad).is_err());
    }

    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dense_reference(model: &ModelSpec, basis: &SectorBasis) -> Vec<f64> {
        let dim = basis.dim();
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        let mut unit = vec![0.0f64; dim];
        for col in 0..dim {
            unit[col] = 1.0;
            let hcol = apply_hamiltonian(model, basis, &unit).unwrap();
            unit[col] = 0.0;
            for row in 0..dim {
                h[(row, col)] = hcol[row];
            }
        }
        let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }
}
