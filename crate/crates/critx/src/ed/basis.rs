//! Symmetry-sector bases.
//!
//! Configurations are packed into u64 labels: one bit per site for the
//! spin-1/2 chain (bit set = spin down, so sz = 1 - 2 bit), two bits per
//! site holding 0/1/2 for the spin-1 chain (Sz = value - 1). Sector bases
//! enumerate labels in strictly increasing order, so indices are found by
//! binary search and every run enumerates identically.

use crate::models::{Family, ModelSpec};

use super::EdError;

/// Quantum numbers selecting a symmetry sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    /// Spin-flip parity of the transverse-field Ising chain: +1 or -1 under
    /// the product of all sz.
    Parity(i8),
    /// Conserved total S^z of the spin-1 chain.
    TotalSz(i32),
}

/// Hard cap on enumerated sector sizes; full reorthogonalization is the
/// default and stays affordable below this.
pub const MAX_SECTOR_DIM: usize = 4_000_000;

/// An enumerated symmetry sector of a chain.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    model: ModelSpec,
    sector: Sector,
    states: Vec<u64>,
}

impl SectorBasis {
    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn state(&self, index: usize) -> u64 {
        self.states[index]
    }

    /// Index of a configuration label, if it belongs to the sector.
    pub fn position(&self, label: u64) -> Option<usize> {
        self.states.binary_search(&label).ok()
    }

    /// Site value of a packed label: the bit for spin-1/2, the 2-bit field
    /// (0, 1, 2) for spin-1.
    pub fn site_value(&self, label: u64, site: usize) -> u64 {
        match self.model.family() {
            Family::Tfim => (label >> site) & 1,
            Family::Spin1Xxzd => (label >> (2 * site)) & 3,
        }
    }

    /// sz at a site: +-1/2 scaled to +-1 for the Ising chain (the Pauli
    /// convention), -1/0/+1 for spin-1.
    pub fn sz_value(&self, label: u64, site: usize) -> f64 {
        match self.model.family() {
            Family::Tfim => 1.0 - 2.0 * ((label >> site) & 1) as f64,
            Family::Spin1Xxzd => ((label >> (2 * site)) & 3) as f64 - 1.0,
        }
    }
}

/// Enumerate the basis of a symmetry sector in ascending label order.
pub fn build_sector_basis(model: &ModelSpec, sector: Sector) -> Result<SectorBasis, EdError> {
    let l = model.len();
    let states = match (model.family(), sector) {
        (Family::Tfim, Sector::Parity(p)) => {
            if p != 1 && p != -1 {
                return Err(EdError::InvalidSector("parity must be +1 or -1"));
            }
            if l > 22 {
                return Err(EdError::BasisTooLarge {
                    dim: 1usize << l.saturating_sub(1),
                    max: MAX_SECTOR_DIM,
                });
            }
            let want_odd_bits = p < 0;
            (0u64..1 << l)
                .filter(|s| (s.count_ones() % 2 == 1) == want_odd_bits)
                .collect::<Vec<_>>()
        }
        (Family::Spin1Xxzd, Sector::TotalSz(m)) => {
            if m.unsigned_abs() as usize > l {
                return Err(EdError::EmptySector);
            }
            let mut states = Vec::new();
            enumerate_spin1(l, m, 0, 0, &mut states);
            if states.len() > MAX_SECTOR_DIM {
                return Err(EdError::BasisTooLarge {
                    dim: states.len(),
                    max: MAX_SECTOR_DIM,
                });
            }
            states
        }
        (family, sector) => return Err(EdError::SectorFamilyMismatch { family, sector }),
    };
    if states.is_empty() {
        return Err(EdError::EmptySector);
    }
    debug_assert!(states.windows(2).all(|w| w[0] < w[1]));
    Ok(SectorBasis {
        model: model.clone(),
        sector,
        states,
    })
}

/// Depth-first enumeration of spin-1 configurations with fixed total Sz.
/// Sites are filled from the most significant downwards so labels come out
/// ascending; branches that cannot reach the target are pruned.
fn enumerate_spin1(l: usize, target: i32, partial: i64, label: u64, out: &mut Vec<u64>) {
    let remaining = l as i64;
    let need = target as i64 - partial;
    if need.abs() > remaining {
        return;
    }
    if l == 0 {
        out.push(label);
        return;
    }
    let site = l - 1;
    for v in 0..3u64 {
        let sz = v as i64 - 1;
        enumerate_spin1(l - 1, target, partial + sz, label | (v << (2 * site)), out);
    }
}
