//! Local measures of entanglement built from one- and two-site reduced
//! density matrices: von Neumann and linear entropies, Wootters
//! concurrence, and the closed forms specific to the two chain families.
//!
//! Entropies are in natural log (nats) throughout; converting to bits is a
//! presentation concern left to callers.

use nalgebra::{Complex, DMatrix};
use thiserror::Error;

type C64 = Complex<f64>;

/// Tolerated deviation of the trace from 1.
pub const TRACE_TOL: f64 = 1e-10;
/// Tolerated Hermiticity violation.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Eigenvalues above this negativity are clamped to zero; anything more
/// negative is rejected as an invalid state rather than silently patched.
pub const NEGATIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntanglementError {
    #[error("density matrix must be 2x2, 3x3, 4x4 or 9x9, got {0}x{0}")]
    UnsupportedDim(usize),
    #[error("density matrix is not Hermitian: max asymmetry {0:e}")]
    NotHermitian(f64),
    #[error("density matrix trace {0} deviates from 1 beyond tolerance")]
    BadTrace(f64),
    #[error("density matrix has eigenvalue {0:e} below the negativity tolerance")]
    NotPositive(f64),
    #[error("concurrence requires a two-qubit (4x4) state, got dim {0}")]
    NotTwoQubit(usize),
    #[error("magnetization vector has norm {0} > 1; not a state")]
    MagnetizationTooLarge(f64),
    #[error("spin-1 driving average {0} outside [0, 1]")]
    OdOutOfRange(f64),
}

/// Magnetization vector (m_x, m_y, m_z) of a single spin-1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnetizationVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl MagnetizationVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm_squared(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }
}

/// A validated reduced density matrix of one or two sites (dim 2, 3, 4, 9).
///
/// Construction checks Hermiticity, unit trace and positive
/// semidefiniteness (up to [`NEGATIVITY_TOL`]), so measure functions can
/// assume a physical state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(mat: DMatrix<C64>) -> Result<Self, EntanglementError> {
        let n = mat.nrows();
        if mat.ncols() != n || !matches!(n, 2 | 3 | 4 | 9) {
            return Err(EntanglementError::UnsupportedDim(n));
        }
        let mut asym = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                asym = asym.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            }
        }
        if asym > HERMITICITY_TOL {
            return Err(EntanglementError::NotHermitian(asym));
        }
        let trace: C64 = mat.diagonal().sum();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(EntanglementError::BadTrace(trace.re));
        }
        let dm = Self { mat };
        let min = dm.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -NEGATIVITY_TOL {
            return Err(EntanglementError::NotPositive(min));
        }
        Ok(dm)
    }

    pub fn from_real(mat: DMatrix<f64>) -> Result<Self, EntanglementError> {
        Self::new(mat.map(|x| C64::new(x, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .mat
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }
}

/// Von Neumann entropy S = -Tr rho ln rho in nats, with 0 ln 0 := 0.
/// Eigenvalues inside the negativity tolerance are clamped to zero.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues()
        .into_iter()
        .map(|lam| {
            let lam = lam.max(0.0);
            if lam > 0.0 {
                -lam * lam.ln()
            } else {
                0.0
            }
        })
        .sum()
}

/// Linear entropy 1 - Tr rho^2. Purity is one minus this.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    // Tr rho^2 = sum |rho_ij|^2 for Hermitian rho
    let tr2: f64 = rho.matrix().iter().map(|x| x.norm_sqr()).sum();
    1.0 - tr2
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    1.0 - linear_entropy(rho)
}

/// Single-site spin-1/2 state (1 + m_x sx + m_y sy + m_z sz)/2.
pub fn rho1_spin_half(m: MagnetizationVector) -> Result<DensityMatrix, EntanglementError> {
    let n2 = m.norm_squared();
    if n2 > 1.0 + 1e-10 {
        return Err(EntanglementError::MagnetizationTooLarge(n2.sqrt()));
    }
    let mat = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new((1.0 + m.z) / 2.0, 0.0),
            C64::new(m.x / 2.0, -m.y / 2.0),
            C64::new(m.x / 2.0, m.y / 2.0),
            C64::new((1.0 - m.z) / 2.0, 0.0),
        ],
    );
    DensityMatrix::new(mat)
}

/// Spontaneous longitudinal magnetization of the Ising chain,
/// m_x = (1 - h^2)^{1/8} for h < 1 and zero beyond the transition.
///
/// This is the symmetry-broken branch reached by a vanishing longitudinal
/// field; combined with the exact m_z it gives the broken-phase single-site
/// state without any longitudinal-field diagonalization.
pub fn mx_spontaneous(h: f64) -> f64 {
    if h < 1.0 {
        (1.0 - h * h).powf(0.125)
    } else {
        0.0
    }
}

/// Wootters concurrence of a two-qubit state.
///
/// The lambdas are the square roots of the eigenvalues of
/// rho (sy x sy) rho* (sy x sy); here they are obtained from the Hermitian
/// product sqrt(rho) rho~ sqrt(rho), which has the same spectrum and keeps
/// everything inside Hermitian eigensolves.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64, EntanglementError> {
    if rho.dim() != 4 {
        return Err(EntanglementError::NotTwoQubit(rho.dim()));
    }
    // sy x sy is real: antidiagonal (-1, +1, +1, -1)
    let mut s = DMatrix::<C64>::zeros(4, 4);
    s[(0, 3)] = C64::new(-1.0, 0.0);
    s[(1, 2)] = C64::new(1.0, 0.0);
    s[(2, 1)] = C64::new(1.0, 0.0);
    s[(3, 0)] = C64::new(-1.0, 0.0);

    let rho_tilde = &s * rho.matrix().map(|x| x.conj()) * &s;

    // sqrt(rho) from the spectral decomposition, clamping tolerated negatives
    let se = rho.matrix().clone().symmetric_eigen();
    let sqrt_vals =
        DMatrix::from_diagonal(&se.eigenvalues.map(|x| C64::new(x.max(0.0).sqrt(), 0.0)));
    let sqrt_rho = &se.eigenvectors * sqrt_vals * se.eigenvectors.adjoint();

    let prod = &sqrt_rho * rho_tilde * &sqrt_rho;
    // Hermitian up to roundoff; symmetrize before the eigensolve
    let herm = (&prod + prod.adjoint()) * C64::new(0.5, 0.0);
    let mut lambdas: Vec<f64> = herm
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|&x| x.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Next-nearest-neighbour concurrence closed form,
/// C = max(0, (xx - yy + zz - 1)/2).
pub fn concurrence_from_correlators(xx: f64, yy: f64, zz: f64) -> f64 {
    concurrence_branch(xx, yy, zz).max(0.0)
}

/// The signed combination (xx - yy + zz - 1)/2 before the max(0, .) clamp.
/// Useful for probing the singularity structure where the clamped value
/// sits at zero.
pub fn concurrence_branch(xx: f64, yy: f64, zz: f64) -> f64 {
    (xx - yy + zz - 1.0) / 2.0
}

/// Two-site state of a parity-symmetric, time-reversal-invariant chain,
/// (1 + m_z (sz x 1 + 1 x sz) + xx sx.sx + yy sy.sy + zz sz.sz)/4.
///
/// All other Pauli components vanish by symmetry, which is the situation in
/// the even-parity Ising ground state. Positivity of the result is
/// validated, so unphysical correlator combinations are rejected.
pub fn rho2_symmetric_from_correlators(
    m_z: f64,
    xx: f64,
    yy: f64,
    zz: f64,
) -> Result<DensityMatrix, EntanglementError> {
    let mut m = DMatrix::<f64>::zeros(4, 4);
    m[(0, 0)] = 1.0 + 2.0 * m_z + zz;
    m[(1, 1)] = 1.0 - zz;
    m[(2, 2)] = 1.0 - zz;
    m[(3, 3)] = 1.0 - 2.0 * m_z + zz;
    m[(0, 3)] = xx - yy;
    m[(3, 0)] = xx - yy;
    m[(1, 2)] = xx + yy;
    m[(2, 1)] = xx + yy;
    DensityMatrix::from_real(m / 4.0)
}

/// Single-site entropy of the spin-1 chain as a function of the driving
/// average O_D = <(Sz)^2>, using the Sz -> -Sz symmetry of the state:
/// S1 = -O_D ln(O_D / 2) - (1 - O_D) ln(1 - O_D).
///
/// Maximal (ln 3) at O_D = 2/3, the equipartition point.
pub fn single_site_entropy_spin1(o_d: f64) -> Result<f64, EntanglementError> {
    if !(0.0..=1.0).contains(&o_d) {
        return Err(EntanglementError::OdOutOfRange(o_d));
    }
    let xlnx = |x: f64, arg: f64| if x > 0.0 { -x * arg.ln() } else { 0.0 };
    Ok(xlnx(o_d, o_d / 2.0) + xlnx(1.0 - o_d, 1.0 - o_d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const LN2: f64 = std::f64::consts::LN_2;

    fn maximally_mixed(n: usize) -> DensityMatrix {
        DensityMatrix::from_real(DMatrix::identity(n, n) / n as f64).unwrap()
    }

    fn random_density(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
        let a = DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let m = &a * a.adjoint();
        let tr: C64 = m.diagonal().sum();
        DensityMatrix::new(m / tr).unwrap()
    }

    fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<C64> {
        let a = DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        a.qr().q()
    }

    #[test]
    fn entropy_landmarks() {
        assert!((von_neumann_entropy(&maximally_mixed(2)) - LN2).abs() < 1e-12);
        assert!((von_neumann_entropy(&maximally_mixed(3)) - 3f64.ln()).abs() < 1e-12);
        let pure = rho1_spin_half(MagnetizationVector::new(0.0, 0.0, 1.0)).unwrap();
        assert!(von_neumann_entropy(&pure).abs() < 1e-12);
    }

    #[test]
    fn linear_entropy_landmarks() {
        let pure = rho1_spin_half(MagnetizationVector::new(0.6, 0.0, 0.8)).unwrap();
        assert!(linear_entropy(&pure).abs() < 1e-12);
        assert!((linear_entropy(&maximally_mixed(2)) - 0.5).abs() < 1e-12);
        assert!((linear_entropy(&maximally_mixed(3)) - 2.0 / 3.0).abs() < 1e-12);
        assert!((purity(&maximally_mixed(2)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rho1_bounds() {
        assert!(rho1_spin_half(MagnetizationVector::new(0.0, 0.0, 0.0)).is_ok());
        assert!(rho1_spin_half(MagnetizationVector::new(1.2, 0.0, 0.0)).is_err());
        let m = MagnetizationVector::new(0.3, 0.4, -0.2);
        let rho = rho1_spin_half(m).unwrap();
        assert!((rho.matrix()[(1, 1)].re - (1.0 + 0.2) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn mx_spontaneous_branch() {
        assert_eq!(mx_spontaneous(0.0), 1.0);
        assert_eq!(mx_spontaneous(1.0), 0.0);
        assert_eq!(mx_spontaneous(1.7), 0.0);
        assert!((mx_spontaneous(0.6) - 0.64f64.powf(0.125)).abs() < 1e-15);
    }

    #[test]
    fn concurrence_bell_and_mixed() {
        // |phi+> = (|00> + |11>)/sqrt(2)
        let mut bell = DMatrix::<f64>::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell[(i, j)] = 0.5;
        }
        let rho = DensityMatrix::from_real(bell).unwrap();
        // the spectrum route costs sqrt(machine eps) on (near-)pure states
        assert!((concurrence(&rho).unwrap() - 1.0).abs() < 1e-7);
        assert!(concurrence(&maximally_mixed(4)).unwrap().abs() < 1e-12);
        assert!(concurrence(&maximally_mixed(2)).is_err());
    }

    #[test]
    fn concurrence_werner_family() {
        // p |psi-><psi-| + (1-p)/4: concurrence max(0, (3p-1)/2)
        let mut singlet = DMatrix::<f64>::zeros(4, 4);
        singlet[(1, 1)] = 0.5;
        singlet[(2, 2)] = 0.5;
        singlet[(1, 2)] = -0.5;
        singlet[(2, 1)] = -0.5;
        for &p in &[0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            let m = &singlet * p + DMatrix::identity(4, 4) * ((1.0 - p) / 4.0);
            let rho = DensityMatrix::from_real(m).unwrap();
            let c = concurrence(&rho).unwrap();
            let expect = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert!((c - expect).abs() < 1e-7, "p={p}: c={c}, expect={expect}");
        }
    }

    #[test]
    fn concurrence_local_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let rho = random_density(&mut rng, 4);
            let c0 = concurrence(&rho).unwrap();
            let u = random_unitary(&mut rng, 2);
            let v = random_unitary(&mut rng, 2);
            let uv = u.kronecker(&v);
            let rotated = &uv * rho.matrix() * uv.adjoint();
            let c1 = concurrence(&DensityMatrix::new(rotated).unwrap()).unwrap();
            assert!((c0 - c1).abs() < 1e-8, "c0={c0} c1={c1}");
        }
    }

    #[test]
    fn concurrence_closed_form_cases() {
        assert_eq!(concurrence_from_correlators(0.0, 0.0, 1.0), 0.0);
        assert_eq!(concurrence_from_correlators(1.0, -1.0, 1.0), 1.0);
        assert!(concurrence_branch(0.0, 0.0, 0.0) < 0.0);
    }

    #[test]
    fn entropy_concavity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let a = random_density(&mut rng, 3);
            let b = random_density(&mut rng, 3);
            let p: f64 = rng.gen();
            let mixed = DensityMatrix::new(
                a.matrix() * C64::new(p, 0.0) + b.matrix() * C64::new(1.0 - p, 0.0),
            )
            .unwrap();
            let lhs = von_neumann_entropy(&mixed);
            let rhs = p * von_neumann_entropy(&a) + (1.0 - p) * von_neumann_entropy(&b);
            assert!(lhs >= rhs - 1e-10, "concavity violated: {lhs} < {rhs}");
        }
    }

    #[test]
    fn invalid_matrices_rejected() {
        // trace != 1
        assert!(matches!(
            DensityMatrix::from_real(DMatrix::identity(2, 2)),
            Err(EntanglementError::BadTrace(_))
        ));
        // non-Hermitian
        let mut m = DMatrix::<f64>::zeros(2, 2);
        m[(0, 0)] = 0.5;
        m[(1, 1)] = 0.5;
        m[(0, 1)] = 0.3;
        assert!(matches!(
            DensityMatrix::from_real(m),
            Err(EntanglementError::NotHermitian(_))
        ));
        // negative eigenvalue beyond tolerance
        let mut neg = DMatrix::<f64>::zeros(2, 2);
        neg[(0, 0)] = 1.1;
        neg[(1, 1)] = -0.1;
        assert!(matches!(
            DensityMatrix::from_real(neg),
            Err(EntanglementError::NotPositive(_))
        ));
        // wrong dimension
        assert!(matches!(
            DensityMatrix::from_real(DMatrix::identity(5, 5) / 5.0),
            Err(EntanglementError::UnsupportedDim(5))
        ));
    }

    #[test]
    fn spin1_entropy_landmarks() {
        assert!((single_site_entropy_spin1(2.0 / 3.0).unwrap() - 3f64.ln()).abs() < 1e-12);
        assert!(single_site_entropy_spin1(0.0).unwrap().abs() < 1e-15);
        assert!((single_site_entropy_spin1(1.0).unwrap() - LN2).abs() < 1e-15);
        assert!(single_site_entropy_spin1(-0.1).is_err());
        assert!(single_site_entropy_spin1(1.1).is_err());
    }

    #[test]
    fn spin1_entropy_unique_interior_maximum() {
        // grid argmax plus a derivative sign change at 2/3
        let n = 20000;
        let mut best = (0.0, f64::MIN);
        for i in 0..=n {
            let x = i as f64 / n as f64;
            let s = single_site_entropy_spin1(x).unwrap();
            if s > best.1 {
                best = (x, s);
            }
        }
        assert!((best.0 - 2.0 / 3.0).abs() < 1e-4, "argmax = {}", best.0);
        assert!((best.1 - 3f64.ln()).abs() < 1e-8);
        let d = 1e-6;
        let x = 2.0 / 3.0;
        let left =
            single_site_entropy_spin1(x).unwrap() - single_site_entropy_spin1(x - d).unwrap();
        let right =
            single_site_entropy_spin1(x + d).unwrap() - single_site_entropy_spin1(x).unwrap();
        assert!(left > 0.0 && right < 0.0, "no sign change: {left} {right}");
    }

    #[test]
    fn ising_unbroken_entropy_maximal_at_zero_field() {
        use crate::tfim::{magnetization_z, SystemSize};
        let mut best = (f64::NAN, f64::MIN);
        let mut h = 0.0;
        while h <= 2.0 + 1e-9 {
            let mz = magnetization_z(h, SystemSize::Infinite).unwrap();
            let rho = rho1_spin_half(MagnetizationVector::new(0.0, 0.0, mz)).unwrap();
            let s = von_neumann_entropy(&rho);
            if s > best.1 {
                best = (h, s);
            }
            h += 0.05;
        }
        assert_eq!(best.0, 0.0, "S1 should peak at h=0, peaked at {}", best.0);
        assert!((best.1 - LN2).abs() < 1e-12);
    }
}
