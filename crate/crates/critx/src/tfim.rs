//! Exact free-fermion solution of the periodic transverse-field Ising
//! chain, H = -sum_i [sx_i sx_{i+1} + h sz_i].
//!
//! Everything here lives in the even-fermion-parity (antiperiodic) sector,
//! whose momenta are k = (2j+1) pi / L. That sector contains the ground
//! state for h > 1 and the symmetric member of the near-degenerate pair
//! for h < 1; it is also the sector the Lanczos engine is compared against.
//!
//! Single-particle energies are eps(k) = sqrt(1 + h^2 - 2 h cos k), so the
//! ground-state energy density is e_L = -(1/L) sum_k eps(k) and the
//! transverse magnetization m^z = -de/dh follows by differentiating under
//! the sum. Two-point correlators come from determinants of Toeplitz
//! matrices filled with the fermionic contraction G(n); the sign and index
//! conventions below are pinned by the exact-diagonalization oracle tests
//! (textbooks disagree on both).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::quad;

/// Euler-Mascheroni constant, used by the closed-form critical verifiers.
pub const EULER_GAMMA: f64 = 0.5772156649015329;

/// Largest Toeplitz block the correlator routine will factorize.
pub const MAX_SEPARATION: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TfimError {
    #[error("chain length must be a positive even number of sites, got {0}")]
    OddLength(usize),
    #[error("separation r={r} outside 1..=L/2 for L={l}")]
    SeparationOutOfRange { r: usize, l: usize },
    #[error("separation r={0} exceeds the supported Toeplitz size {MAX_SEPARATION}")]
    SeparationTooLarge(usize),
    #[error("correlation length needs h > 0, got {0}")]
    NonPositiveField(f64),
    #[error("energy tail ratio overflows: L/xi = {0:.1} > 700")]
    TailOverflow(f64),
    #[error(transparent)]
    Quadrature(#[from] quad::QuadError),
}

/// Finite chain of L sites or the thermodynamic limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemSize {
    Finite(usize),
    Infinite,
}

/// Antiperiodic-sector momenta k_j = (2j+1) pi / L, j = 0..L-1.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    l: usize,
    momenta: Vec<f64>,
}

impl MomentumGrid {
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }
}

/// Momentum grid of the even-parity sector. L must be even and positive.
pub fn momenta(l: usize) -> Result<MomentumGrid, TfimError> {
    if l == 0 || l % 2 != 0 {
        return Err(TfimError::OddLength(l));
    }
    let momenta = (0..l).map(|j| (2 * j + 1) as f64 * PI / l as f64).collect();
    Ok(MomentumGrid { l, momenta })
}

/// Single-particle energy eps(k) = sqrt(1 + h^2 - 2 h cos k).
pub fn dispersion(h: f64, k: f64) -> f64 {
    (1.0 + h * h - 2.0 * h * k.cos()).max(0.0).sqrt()
}

/// Ground-state energy per site of the even-parity sector.
///
/// Finite L sums the dispersion over the antiperiodic grid; the
/// thermodynamic limit integrates it, -(1/pi) int_0^pi eps(k) dk.
pub fn energy_density(h: f64, size: SystemSize) -> Result<f64, TfimError> {
    match size {
        SystemSize::Finite(l) => {
            let grid = momenta(l)?;
            Ok(-grid.momenta().iter().map(|&k| dispersion(h, k)).sum::<f64>() / l as f64)
        }
        SystemSize::Infinite => {
            let v = quad::integrate(|k| dispersion(h, k), 0.0, PI, 1e-13)?;
            Ok(-v / PI)
        }
    }
}

/// Transverse magnetization m^z = <sz_i> = -de/dh.
pub fn magnetization_z(h: f64, size: SystemSize) -> Result<f64, TfimError> {
    match size {
        SystemSize::Finite(l) => {
            let grid = momenta(l)?;
            Ok(grid
                .momenta()
                .iter()
                .map(|&k| (h - k.cos()) / dispersion(h, k))
                .sum::<f64>()
                / l as f64)
        }
        SystemSize::Infinite => {
            // the antiperiodic grid never hits k = 0, and in the integral the
            // h = 1 integrand (1 - cos k)/eps = sin(k/2) stays regular
            let v = quad::integrate(|k| (h - k.cos()) / dispersion(h, k), 0.0, PI, 1e-13)?;
            Ok(v / PI)
        }
    }
}

/// Fermionic contraction G(n) entering the correlator determinants,
/// normalized so that G(0) equals the transverse magnetization.
pub fn contraction(h: f64, l: usize, n: i64) -> Result<f64, TfimError> {
    let grid = momenta(l)?;
    Ok(contraction_on_grid(h, &grid, n))
}

fn contraction_on_grid(h: f64, grid: &MomentumGrid, n: i64) -> f64 {
    let nf = n as f64;
    grid.momenta()
        .iter()
        .map(|&k| ((h - k.cos()) * (k * nf).cos() - k.sin() * (k * nf).sin()) / dispersion(h, k))
        .sum::<f64>()
        / grid.l() as f64
}

/// Cached contractions G(n) for |n| <= r_max at fixed (h, L).
#[derive(Debug, Clone)]
pub struct ContractionTable {
    h: f64,
    l: usize,
    r_max: usize,
    values: Vec<f64>, // index n + r_max, n in -r_max..=r_max
}

impl ContractionTable {
    pub fn build(h: f64, l: usize, r_max: usize) -> Result<Self, TfimError> {
        let grid = momenta(l)?;
        let values = (-(r_max as i64)..=r_max as i64)
            .map(|n| contraction_on_grid(h, &grid, n))
            .collect();
        Ok(Self { h, l, r_max, values })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn g(&self, n: i64) -> f64 {
        assert!(
            n.unsigned_abs() as usize <= self.r_max,
            "contraction index {n} outside built range +-{}",
            self.r_max
        );
        self.values[(n + self.r_max as i64) as usize]
    }
}

/// Correlator axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Two-point correlator <s^a_i s^a_{i+r}> in the even-sector ground state.
///
/// xx and yy are r x r Toeplitz determinants over the negated contraction
/// at offsets +1 and -1; zz is the two-term Wick pairing
/// G(0)^2 - G(r) G(-r). Offsets and the overall sign are the ones that
/// reproduce dense exact diagonalization (see the oracle tests).
pub fn correlator(axis: Axis, r: usize, h: f64, l: usize) -> Result<f64, TfimError> {
    let table = ContractionTable::build(h, l, r + 1)?;
    correlator_from_table(axis, r, &table)
}

/// Same as [`correlator`], reusing a prebuilt table (needs r_max >= r + 1).
pub fn correlator_from_table(
    axis: Axis,
    r: usize,
    table: &ContractionTable,
) -> Result<f64, TfimError> {
    let l = table.l();
    if r < 1 || r > l / 2 {
        return Err(TfimError::SeparationOutOfRange { r, l });
    }
    if r > MAX_SEPARATION {
        return Err(TfimError::SeparationTooLarge(r));
    }
    let det_with_offset = |offset: i64| -> f64 {
        let m = DMatrix::from_fn(r, r, |i, j| -table.g(j as i64 - i as i64 + offset));
        if r == 1 {
            m[(0, 0)]
        } else {
            m.lu().determinant()
        }
    };
    Ok(match axis {
        Axis::X => det_with_offset(1),
        Axis::Y => det_with_offset(-1),
        Axis::Z => table.g(0) * table.g(0) - table.g(r as i64) * table.g(-(r as i64)),
    })
}

/// Correlation length xi(h) = 1 / (2 asinh(|1-h| / (2 sqrt(h)))).
///
/// Returns `f64::INFINITY` at the critical point h = 1. As h -> 1 the
/// product xi * |1-h| tends to 1, i.e. nu = 1.
pub fn correlation_length(h: f64) -> Result<f64, TfimError> {
    if h <= 0.0 {
        return Err(TfimError::NonPositiveField(h));
    }
    if h == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (2.0 * ((1.0 - h).abs() / (2.0 * h.sqrt())).asinh()))
}

/// Finite-size energy deviation normalized by its asymptotic envelope,
/// |e_L - e_inf| sqrt(pi) L^{3/2} exp(L/xi) / |h^2 - 1|^{1/2}.
///
/// Tends to 1 as L grows, with 1 + O(1/L) corrections. The deviation
/// magnitude is used because the even-sector finite-size correction is
/// negative on both sides of the transition.
pub fn energy_tail_ratio(h: f64, l: usize) -> Result<f64, TfimError> {
    let xi = correlation_length(h)?;
    let lf = l as f64;
    if lf / xi > 700.0 {
        return Err(TfimError::TailOverflow(lf / xi));
    }
    let e_l = energy_density(h, SystemSize::Finite(l))?;
    let e_inf = energy_density(h, SystemSize::Infinite)?;
    let envelope = (h * h - 1.0).abs().sqrt() / PI.sqrt() * (-lf / xi).exp() / lf.powf(1.5);
    Ok((e_l - e_inf).abs() / envelope)
}

/// Thermodynamic-limit expansion of m^z near h = 1,
/// 2/pi - (h-1)/pi (ln|h-1| + 1 - ln 8).
///
/// Closed-form verifier; accurate to a few parts in 10^3 for |h-1| <= 0.1.
pub fn mz_critical_expansion(h: f64) -> f64 {
    let t = h - 1.0;
    if t == 0.0 {
        return 2.0 / PI;
    }
    2.0 / PI - t / PI * (t.abs().ln() + 1.0 - 8f64.ln())
}

/// Finite-size critical form of m^z,
/// 2/pi + [(ln L + ln(8/pi) + gamma - 1)/pi] (h-1) + pi/(12 L^2).
///
/// Closed-form verifier for the critical regime L << xi.
pub fn mz_finite_size_critical(h: f64, l: usize) -> f64 {
    let lf = l as f64;
    let slope = (lf.ln() + (8.0 / PI).ln() + EULER_GAMMA - 1.0) / PI;
    2.0 / PI + slope * (h - 1.0) + PI / (12.0 * lf * lf)
}
