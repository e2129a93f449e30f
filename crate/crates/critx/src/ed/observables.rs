//! Ground-state expectation values of the local observables.

use crate::models::{Boundary, Family, ObservableKind, ObservableSpec};

use super::basis::SectorBasis;
use super::EdError;

/// <v| O_site |v> for a site-anchored observable.
///
/// Correlators and the nearest-neighbour bond observable measure between
/// `site` and `site + r` (or `site + 1`), wrapping on rings. Unsupported
/// observable/family pairs are errors rather than silent zeros.
pub fn expectation_local(
    v: &[f64],
    basis: &SectorBasis,
    observable: ObservableSpec,
    site: usize,
) -> Result<f64, EdError> {
    let model = basis.model();
    let l = model.len();
    if v.len() != basis.dim() {
        return Err(EdError::DimensionMismatch {
            expected: basis.dim(),
            got: v.len(),
        });
    }
    if site >= l {
        return Err(EdError::InvalidSite { site, l });
    }
    let partner = |offset: usize| -> Result<usize, EdError> {
        match model.boundary() {
            Boundary::Periodic => Ok((site + offset) % l),
            Boundary::Open => {
                let j = site + offset;
                if j >= l {
                    Err(EdError::InvalidSite { site: j, l })
                } else {
                    Ok(j)
                }
            }
        }
    };
    match (model.family(), observable.kind) {
        (_, ObservableKind::MagnetizationZ) => Ok(diag_expectation(v, basis, |b, s| {
            b.sz_value(s, site)
        })),
        (Family::Spin1Xxzd, ObservableKind::SzSquared) => Ok(diag_expectation(v, basis, |b, s| {
            let sz = b.sz_value(s, site);
            sz * sz
        })),
        (Family::Spin1Xxzd, ObservableKind::SzSzNn) => {
            let j = partner(1)?;
            Ok(diag_expectation(v, basis, |b, s| {
                b.sz_value(s, site) * b.sz_value(s, j)
            }))
        }
        (_, ObservableKind::CorrelatorZz) => {
            let j = partner(observable.r)?;
            Ok(diag_expectation(v, basis, |b, s| {
                b.sz_value(s, site) * b.sz_value(s, j)
            }))
        }
        (Family::Tfim, ObservableKind::CorrelatorXx) => {
            let j = partner(observable.r)?;
            Ok(tfim_flip_expectation(v, basis, site, j, false))
        }
        (Family::Tfim, ObservableKind::CorrelatorYy) => {
            let j = partner(observable.r)?;
            Ok(tfim_flip_expectation(v, basis, site, j, true))
        }
        (family, kind) => Err(EdError::UnsupportedObservable { family, kind }),
    }
}

/// Chain average of an observable: (1/L) sum over sites (or over the
/// model's bond list for bond observables). This is the density whose
/// derivative pairing appears in the Hellmann-Feynman relation.
pub fn expectation_density(
    v: &[f64],
    basis: &SectorBasis,
    observable: ObservableSpec,
) -> Result<f64, EdError> {
    let model = basis.model();
    let l = model.len();
    match observable.kind {
        ObservableKind::SzSzNn => {
            // sum over the Hamiltonian's bonds (L on rings, L-1 open) per site
            let mut total = 0.0;
            for (a, b) in model.bonds() {
                total += diag_expectation(v, basis, |bb, s| {
                    bb.sz_value(s, a) * bb.sz_value(s, b)
                });
            }
            Ok(total / l as f64)
        }
        _ => {
            let mut total = 0.0;
            for site in 0..l {
                total += expectation_local(v, basis, observable, site)?;
            }
            Ok(total / l as f64)
        }
    }
}

fn diag_expectation<F: Fn(&SectorBasis, u64) -> f64>(
    v: &[f64],
    basis: &SectorBasis,
    weight: F,
) -> f64 {
    v.iter()
        .enumerate()
        .map(|(i, &vi)| vi * vi * weight(basis, basis.state(i)))
        .sum()
}

/// <sx_i sx_j> (ising == false) or <sy_i sy_j> (ising == true ... y axis)
/// on a spin-1/2 state: both flip the two bits; the y correlator carries
/// the extra phase -(-1)^{b_i + b_j}.
fn tfim_flip_expectation(
    v: &[f64],
    basis: &SectorBasis,
    i: usize,
    j: usize,
    y_axis: bool,
) -> f64 {
    let mask = (1u64 << i) | (1u64 << j);
    let mut acc = 0.0;
    for (idx, &vi) in v.iter().enumerate() {
        let s = basis.state(idx);
        let t = s ^ mask;
        if let Some(pos) = basis.position(t) {
            let amp = if y_axis {
                let bits = ((s >> i) & 1) + ((s >> j) & 1);
                if bits % 2 == 0 {
                    -1.0
                } else {
                    1.0
                }
            } else {
                1.0
            };
            acc += vi * amp * v[pos];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ed::basis::{build_sector_basis, Sector};
    use crate::ed::lanczos::{lanczos_lowest, LanczosOptions};
    use crate::models::{Boundary, ModelSpec};

    #[test]
    fn sz_squared_on_all_zero_state() {
        let model = ModelSpec::spin1_xxzd(4, Boundary::Periodic, 1.0, 0.0).unwrap();
        let basis = build_sector_basis(&model, Sector::TotalSz(0)).unwrap();
        // |0000> has every site value 1 -> label 0b01010101
        let label = 0b01010101u64;
        let idx = basis.position(label).unwrap();
        let mut v = vec![0.0; basis.dim()];
        v[idx] = 1.0;
        let od = expectation_local(
            &v,
            &basis,
            ObservableSpec::site(ObservableKind::SzSquared),
            2,
        )
        .unwrap();
        assert_eq!(od, 0.0);
    }

    #[test]
    fn large_d_polarizes_to_zero() {
        let model = ModelSpec::spin1_xxzd(6, Boundary::Periodic, 1.0, 1e3).unwrap();
        let basis = build_sector_basis(&model, Sector::TotalSz(0)).unwrap();
        let gs = lanczos_lowest(&model, &basis, LanczosOptions::default()).unwrap();
        let od = expectation_local(
            &gs.vectors[0],
            &basis,
            ObservableSpec::site(ObservableKind::SzSquared),
            0,
        )
        .unwrap();
        assert!(od < 1e-2, "O_D = {od}");
    }

    #[test]
    fn translation_invariance_on_rings() {
        let model = ModelSpec::spin1_xxzd(6, Boundary::Periodic, 2.59, 2.0).unwrap();
        let basis = build_sector_basis(&model, Sector::TotalSz(0)).unwrap();
        let gs = lanczos_lowest(&model, &basis, LanczosOptions::default()).unwrap();
        let spec = ObservableSpec::site(ObservableKind::SzSquared);
        let values: Vec<f64> = (0..6)
            .map(|site| expectation_local(&gs.vectors[0], &basis, spec, site).unwrap())
            .collect();
        let max = values.iter().cloned().fold(f64::MIN, f64::max);
        let min = values.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max - min <= 1e-10, "site spread {}", max - min);
    }

    #[test]
    fn unsupported_pairs_error() {
        let model = ModelSpec::tfim(4, Boundary::Periodic, 1.0).unwrap();
        let basis = build_sector_basis(&model, Sector::Parity(1)).unwrap();
        let v = vec![0.5; basis.dim()];
        let err = expectation_local(
            &v,
            &basis,
            ObservableSpec::site(ObservableKind::SzSquared),
            0,
        );
        assert!(matches!(err, Err(EdError::UnsupportedObservable { .. })));
        let err = expectation_local(
            &v,
            &basis,
            ObservableSpec::site(ObservableKind::MagnetizationZ),
            9,
        );
        assert!(matches!(err, Err(EdError::InvalidSite { .. })));
    }

    #[test]
    fn open_chain_correlator_respects_bounds() {
        let model = ModelSpec::tfim(4, Boundary::Open, 1.0).unwrap();
        let basis = build_sector_basis(&model, Sector::Parity(1)).unwrap();
        let v: Vec<f64> = {
            let gs = lanczos_lowest(&model, &basis, LanczosOptions::default()).unwrap();
            gs.vectors[0].clone()
        };
        let spec = ObservableSpec::with_separation(ObservableKind::CorrelatorXx, 2);
        assert!(expectation_local(&v, &basis, spec, 1).is_ok());
        assert!(expectation_local(&v, &basis, spec, 3).is_err());
    }
}
