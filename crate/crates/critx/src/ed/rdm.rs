//! Reduced density matrices of one and two sites by partial trace over the
//! rest of the chain.

use nalgebra::DMatrix;

use crate::entanglement::DensityMatrix;
use crate::models::Family;

use super::basis::SectorBasis;
use super::EdError;

/// Replace the packed value at `site` with `value`.
fn with_site_value(basis: &SectorBasis, label: u64, site: usize, value: u64) -> u64 {
    match basis.model().family() {
        Family::Tfim => (label & !(1u64 << site)) | (value << site),
        Family::Spin1Xxzd => (label & !(3u64 << (2 * site))) | (value << (2 * site)),
    }
}

/// Single-site reduced density matrix rho_1 = Tr_rest |v><v|.
///
/// Within a fixed symmetry sector the off-diagonal elements connecting
/// different local quantum numbers vanish identically; they are still
/// accumulated generically here, via in-sector partner lookups.
pub fn one_site_rdm(v: &[f64], basis: &SectorBasis, site: usize) -> Result<DensityMatrix, EdError> {
    let model = basis.model();
    if v.len() != basis.dim() {
        return Err(EdError::DimensionMismatch {
            expected: basis.dim(),
            got: v.len(),
        });
    }
    if site >= model.len() {
        return Err(EdError::InvalidSite {
            site,
            l: model.len(),
        });
    }
    let d = model.site_dim();
    let mut rho = DMatrix::<f64>::zeros(d, d);
    for (idx, &amp) in v.iter().enumerate() {
        if amp == 0.0 {
            continue;
        }
        let s = basis.state(idx);
        let a = basis.site_value(s, site) as usize;
        for b in 0..d {
            if b == a {
                rho[(a, a)] += amp * amp;
            } else if let Some(j) = basis.position(with_site_value(basis, s, site, b as u64)) {
                rho[(a, b)] += amp * v[j];
            }
        }
    }
    Ok(DensityMatrix::from_real(rho)?)
}

/// Two-site reduced density matrix on (site_i, site_j), indexed as
/// a * d + b for local values (a, b).
pub fn two_site_rdm(
    v: &[f64],
    basis: &SectorBasis,
    site_i: usize,
    site_j: usize,
) -> Result<DensityMatrix, EdError> {
    let model = basis.model();
    if v.len() != basis.dim() {
        return Err(EdError::DimensionMismatch {
            expected: basis.dim(),
            got: v.len(),
        });
    }
    let l = model.len();
    if site_i >= l {
        return Err(EdError::InvalidSite { site: site_i, l });
    }
    if site_j >= l {
        return Err(EdError::InvalidSite { site: site_j, l });
    }
    if site_i == site_j {
        return Err(EdError::SiteCollision(site_i));
    }
    let d = model.site_dim();
    let mut rho = DMatrix::<f64>::zeros(d * d, d * d);
    for (idx, &amp) in v.iter().enumerate() {
        if amp == 0.0 {
            continue;
        }
        let s = basis.state(idx);
        let a = basis.site_value(s, site_i) as usize;
        let b = basis.site_value(s, site_j) as usize;
        let row = a * d + b;
        for c in 0..d {
            for e in 0..d {
                let col = c * d + e;
                if col == row {
                    rho[(row, row)] += amp * amp;
                    continue;
                }
                let t = with_site_value(
                    basis,
                    with_site_value(basis, s, site_i, c as u64),
                    site_j,
                    e as u64,
                );
                if let Some(j) = basis.position(t) {
                    rho[(row, col)] += amp * v[j];
                }
            }
        }
    }
    Ok(DensityMatrix::from_real(rho)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ed::basis::{build_sector_basis, Sector};
    use crate::ed::lanczos::{lanczos_lowest, LanczosOptions};
    use crate::entanglement::von_neumann_entropy;
    use crate::models::{Boundary, ModelSpec};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn product_state_is_pure() {
        let model = ModelSpec::spin1_xxzd(4, Boundary::Periodic, 1.0, 0.0).unwrap();
        let basis = build_sector_basis(&model, Sector::TotalSz(0)).unwrap();
        let mut v = vec![0.0; basis.dim()];
        v[basis.position(0b01010101).unwrap()] = 1.0; // |0000>
        let rho = one_site_rdm(&v, &basis, 1).unwrap();
        assert!(von_neumann_entropy(&rho).abs() < 1e-12);
    }

    #[test]
    fn two_site_singlet_has_maximally_mixed_sites() {
        // ground state of S1.S2 is the total-spin-0 state; each site is 1/3
        let model = ModelSpec::spin1_xxzd(2, Boundary::Open, 1.0, 0.0).unwrap();
        let basis = build_sector_basis(&model, Sector::TotalSz(0)).unwrap();
        let gs = lanczos_lowest(&model, &basis, LanczosOptions::default()).unwrap();
        let rho = one_site_rdm(&gs.vectors[0], &basis, 0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 / 3.0 } else { 0.0 };
                assert!((rho.matrix()[(i, j)].re - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_state_trace_and_consistency() {
        let model = ModelSpec::spin1_xxzd(6, Boundary::Periodic, 1.3, 0.4).unwrap();
        let basis = build_sector_basis(&model, Sector::TotalSz(0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let mut v: Vec<f64> = (0..basis.dim()).map(|_| rng.gen::<f64>() - 0.5).collect();
            let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= n);
            let rho2 = two_site_rdm(&v, &basis, 1, 4).unwrap();
            let trace: f64 = (0..9).map(|i| rho2.matrix()[(i, i)].re).sum();
            assert!((trace - 1.0).abs() < 1e-12);
            // partial trace of the pair state over the second site
            // reproduces the one-site state
            let rho1 = one_site_rdm(&v, &basis, 1).unwrap();
            for a in 0..3 {
                for c in 0..3 {
                    let mut partial = 0.0;
                    for b in 0..3 {
                        partial += rho2.matrix()[(a * 3 + b, c * 3 + b)].re;
                    }
                    assert!(
                        (partial - rho1.matrix()[(a, c)].re).abs() < 1e-12,
                        "partial trace mismatch at ({a},{c})"
                    );
                }
            }
            // eigenvalues within [0, 1]
            let ev = rho2.eigenvalues();
            assert!(ev.iter().all(|&x| x >= -1e-12 && x <= 1.0 + 1e-12));
        }
    }

    #[test]
    fn site_errors() {
        let model = ModelSpec::tfim(4, Boundary::Periodic, 1.0).unwrap();
        let basis = build_sector_basis(&model, Sector::Parity(1)).unwrap();
        let v = vec![0.0; basis.dim()];
        assert!(matches!(
            two_site_rdm(&v, &basis, 2, 2),
            Err(EdError::SiteCollision(2))
        ));
        assert!(matches!(
            two_site_rdm(&v, &basis, 0, 7),
            Err(EdError::InvalidSite { .. })
        ));
        assert!(matches!(
            one_site_rdm(&v, &basis, 4),
            Err(EdError::InvalidSite { .. })
        ));
    }
}
