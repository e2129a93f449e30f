//! Matrix-free Lanczos exact diagonalization for spin-1/2 and spin-1
//! chains in symmetry sectors: ground states, gaps, local expectation
//! values and reduced density matrices.
//!
//! Separate (model, sector) diagonalizations are independent pure
//! computations; sweep drivers may run them concurrently without
//! coordination.

mod basis;
mod hamiltonian;
mod lanczos;
mod observables;
mod rdm;

pub use basis::{build_sector_basis, Sector, SectorBasis, MAX_SECTOR_DIM};
pub use hamiltonian::apply_hamiltonian;
pub use lanczos::{lanczos_lowest, GroundStateResult, LanczosOptions};
pub use observables::{expectation_density, expectation_local};
pub use rdm::{one_site_rdm, two_site_rdm};

use thiserror::Error;

use crate::entanglement::EntanglementError;
use crate::models::{DrivingTerm, Family, ModelError, ModelSpec, ObservableKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EdError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("vector length {got} does not match sector dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("symmetry sector contains no states")]
    EmptySector,
    #[error("invalid sector: {0}")]
    InvalidSector(&'static str),
    #[error("sector {sector:?} does not apply to family {family}")]
    SectorFamilyMismatch { family: Family, sector: Sector },
    #[error("sector dimension {dim} exceeds the supported maximum {max}")]
    BasisTooLarge { dim: usize, max: usize },
    #[error("Lanczos did not converge after {iterations} iterations (best residual {best_residual:e})")]
    NotConverged {
        iterations: usize,
        best_residual: f64,
    },
    #[error("observable {kind} is not supported for family {family}")]
    UnsupportedObservable {
        family: Family,
        kind: ObservableKind,
    },
    #[error("site index {site} outside chain of {l} sites")]
    InvalidSite { site: usize, l: usize },
    #[error("two-site operation needs distinct sites, got {0} twice")]
    SiteCollision(usize),
    #[error("invalid Lanczos options: {0}")]
    InvalidOptions(&'static str),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
}

/// Default sector list for gap calculations: both parity sectors for the
/// Ising chain, total Sz in {0, 1} for the spin-1 chain.
pub fn default_gap_sectors(family: Family) -> Vec<Sector> {
    match family {
        Family::Tfim => vec![Sector::Parity(1), Sector::Parity(-1)],
        Family::Spin1Xxzd => vec![Sector::TotalSz(0), Sector::TotalSz(1)],
    }
}

/// Finite-size gap: second-lowest energy over the union of the listed
/// sectors minus the lowest. Each sector is diagonalized independently
/// with at least two requested eigenpairs, so the union's two lowest
/// levels are always resolved.
pub fn gap(model: &ModelSpec, sector_list: &[Sector], opts: LanczosOptions) -> Result<f64, EdError> {
    if sector_list.is_empty() {
        return Err(EdError::InvalidOptions("sector list must not be empty"));
    }
    let per_sector = LanczosOptions {
        n_eigs: opts.n_eigs.max(2),
        ..opts
    };
    let mut energies = Vec::new();
    for &sector in sector_list {
        let basis = build_sector_basis(model, sector)?;
        if basis.dim() == 1 {
            // a one-state sector contributes its single diagonal energy
            let single = lanczos_lowest(model, &basis, LanczosOptions { n_eigs: 1, ..opts })?;
            energies.push(single.energies[0]);
            continue;
        }
        let result = lanczos_lowest(model, &basis, per_sector)?;
        energies.extend(result.energies.iter().take(2));
    }
    energies.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if energies.len() < 2 {
        return Err(EdError::InvalidOptions(
            "sector list resolves fewer than two levels",
        ));
    }
    Ok((energies[1] - energies[0]).max(0.0))
}

/// sign * chain average of the driving observable: equals de/dg for the
/// corresponding coupling by the Hellmann-Feynman theorem.
pub fn driving_expectation(
    v: &[f64],
    basis: &SectorBasis,
    term: &DrivingTerm,
) -> Result<f64, EdError> {
    Ok(term.sign * expectation_density(v, basis, term.observable)?)
}
