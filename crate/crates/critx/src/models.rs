//! Shared model definitions: chain Hamiltonians, their couplings, and the
//! observables conjugate to each coupling.
//!
//! Both engines (the free-fermion solver and the Lanczos ED) consume the
//! same [`ModelSpec`] and use the same bond conventions, so their energies
//! and correlators are directly comparable. Energies are always reported
//! per site, `e = E0 / L`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("unknown coupling `{name}` for {family}")]
    UnknownCoupling { family: Family, name: String },
    #[error("invalid chain length L={l} for {family} with {boundary} boundary: {reason}")]
    InvalidLength {
        family: Family,
        boundary: Boundary,
        l: usize,
        reason: &'static str,
    },
    #[error("coupling `{name}` must be finite, got {value}")]
    NonFiniteCoupling { name: String, value: f64 },
    #[error("observable {kind} with r={r} invalid for L={l}: {reason}")]
    InvalidObservable {
        kind: ObservableKind,
        r: usize,
        l: usize,
        reason: &'static str,
    },
}

/// Which chain family a [`ModelSpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Spin-1/2 transverse-field Ising chain, H = -sum_i [sx_i sx_{i+1} + h sz_i].
    Tfim,
    /// Spin-1 XXZ chain with single-ion anisotropy,
    /// H = sum_i [Sx_i Sx_{i+1} + Sy_i Sy_{i+1} + lambda Sz_i Sz_{i+1} + D (Sz_i)^2].
    Spin1Xxzd,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Tfim => write!(f, "tfim"),
            Family::Spin1Xxzd => write!(f, "spin1_xxzd"),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tfim" => Ok(Family::Tfim),
            "spin1_xxzd" => Ok(Family::Spin1Xxzd),
            other => Err(format!("unknown family `{other}` (expected tfim or spin1_xxzd)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Open,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Periodic => write!(f, "periodic"),
            Boundary::Open => write!(f, "open"),
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "open" => Ok(Boundary::Open),
            other => Err(format!("unknown boundary `{other}` (expected periodic or open)")),
        }
    }
}

/// A concrete chain: family, length, boundary condition and coupling values.
///
/// Immutable value record; sweeps derive per-point specs via
/// [`ModelSpec::with_coupling`].
///
/// Note on periodic L=2: the bond sum `i = 1..L` visits the single pair
/// twice, so the nearest-neighbour bond enters the Hamiltonian with weight
/// 2. The free-fermion formulas intrinsically use this convention and the
/// ED engine follows it, so the two agree at every L. For the spin-1 chain
/// periodic rings must have even L >= 4; open chains allow any L >= 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    family: Family,
    l: usize,
    boundary: Boundary,
    couplings: BTreeMap<String, f64>,
}

impl ModelSpec {
    pub fn tfim(l: usize, boundary: Boundary, h: f64) -> Result<Self, ModelError> {
        let mut couplings = BTreeMap::new();
        couplings.insert("h".to_owned(), h);
        Self::new(Family::Tfim, l, boundary, couplings)
    }

    pub fn spin1_xxzd(
        l: usize,
        boundary: Boundary,
        lambda: f64,
        d: f64,
    ) -> Result<Self, ModelError> {
        let mut couplings = BTreeMap::new();
        couplings.insert("lambda".to_owned(), lambda);
        couplings.insert("D".to_owned(), d);
        Self::new(Family::Spin1Xxzd, l, boundary, couplings)
    }

    fn new(
        family: Family,
        l: usize,
        boundary: Boundary,
        couplings: BTreeMap<String, f64>,
    ) -> Result<Self, ModelError> {
        if l < 2 {
            return Err(ModelError::InvalidLength {
                family,
                boundary,
                l,
                reason: "need at least two sites",
            });
        }
        if family == Family::Spin1Xxzd && boundary == Boundary::Periodic && (l < 4 || l % 2 != 0) {
            return Err(ModelError::InvalidLength {
                family,
                boundary,
                l,
                reason: "periodic spin-1 rings require even L >= 4",
            });
        }
        for (name, &value) in &couplings {
            if !value.is_finite() {
                return Err(ModelError::NonFiniteCoupling {
                    name: name.clone(),
                    value,
                });
            }
        }
        Ok(Self {
            family,
            l,
            boundary,
            couplings,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn len(&self) -> usize {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn coupling(&self, name: &str) -> Result<f64, ModelError> {
        self.couplings
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownCoupling {
                family: self.family,
                name: name.to_owned(),
            })
    }

    pub fn couplings(&self) -> impl Iterator<Item = (&str, f64)> {
        self.couplings.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Same model with one coupling replaced. Fails on unknown names so a
    /// typo in a sweep parameter cannot silently add a new coupling.
    pub fn with_coupling(&self, name: &str, value: f64) -> Result<Self, ModelError> {
        if !self.couplings.contains_key(name) {
            return Err(ModelError::UnknownCoupling {
                family: self.family,
                name: name.to_owned(),
            });
        }
        if !value.is_finite() {
            return Err(ModelError::NonFiniteCoupling {
                name: name.to_owned(),
                value,
            });
        }
        let mut next = self.clone();
        next.couplings.insert(name.to_owned(), value);
        Ok(next)
    }

    /// Local Hilbert-space dimension per site (2 or 3).
    pub fn site_dim(&self) -> usize {
        match self.family {
            Family::Tfim => 2,
            Family::Spin1Xxzd => 3,
        }
    }

    /// Bonds (i, i+1) of the chain, respecting the boundary condition.
    /// Periodic chains return L bonds (the L=2 ring lists the same pair
    /// twice, matching the double-counted convention above).
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        match self.boundary {
            Boundary::Periodic => (0..self.l).map(|i| (i, (i + 1) % self.l)).collect(),
            Boundary::Open => (0..self.l - 1).map(|i| (i, i + 1)).collect(),
        }
    }
}

/// A named point on a coupling axis, e.g. ("h", 1.003).
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingParameter {
    pub name: String,
    pub value: f64,
}

impl DrivingParameter {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
        }
    }

    pub fn validate_for(&self, model: &ModelSpec) -> Result<(), ModelError> {
        model.coupling(&self.name).map(|_| ())
    }
}

/// Local observables the engines can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObservableKind {
    EnergyDensity,
    MagnetizationZ,
    SzSquared,
    SzSzNn,
    CorrelatorXx,
    CorrelatorYy,
    CorrelatorZz,
    Entropy1Site,
    Concurrence,
}

impl ObservableKind {
    pub fn needs_separation(self) -> bool {
        matches!(
            self,
            ObservableKind::CorrelatorXx
                | ObservableKind::CorrelatorYy
                | ObservableKind::CorrelatorZz
                | ObservableKind::Concurrence
        )
    }
}

impl fmt::Display for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ObservableKind::EnergyDensity => "energy_density",
            ObservableKind::MagnetizationZ => "magnetization_z",
            ObservableKind::SzSquared => "sz_squared",
            ObservableKind::SzSzNn => "szsz_nn",
            ObservableKind::CorrelatorXx => "correlator_xx",
            ObservableKind::CorrelatorYy => "correlator_yy",
            ObservableKind::CorrelatorZz => "correlator_zz",
            ObservableKind::Entropy1Site => "entropy_1site",
            ObservableKind::Concurrence => "concurrence",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for ObservableKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "energy_density" => ObservableKind::EnergyDensity,
            "magnetization_z" => ObservableKind::MagnetizationZ,
            "sz_squared" => ObservableKind::SzSquared,
            "szsz_nn" => ObservableKind::SzSzNn,
            "correlator_xx" => ObservableKind::CorrelatorXx,
            "correlator_yy" => ObservableKind::CorrelatorYy,
            "correlator_zz" => ObservableKind::CorrelatorZz,
            "entropy_1site" => ObservableKind::Entropy1Site,
            "concurrence" => ObservableKind::Concurrence,
            other => return Err(format!("unknown observable `{other}`")),
        })
    }
}

/// An observable plus its separation r (meaningful for correlators and the
/// concurrence; 0 otherwise).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ObservableSpec {
    pub kind: ObservableKind,
    pub r: usize,
}

impl ObservableSpec {
    pub fn site(kind: ObservableKind) -> Self {
        Self { kind, r: 0 }
    }

    pub fn with_separation(kind: ObservableKind, r: usize) -> Self {
        Self { kind, r }
    }

    pub fn validate_for(&self, model: &ModelSpec) -> Result<(), ModelError> {
        if self.kind.needs_separation() {
            if self.r == 0 {
                return Err(ModelError::InvalidObservable {
                    kind: self.kind,
                    r: self.r,
                    l: model.len(),
                    reason: "separation must be at least 1",
                });
            }
            if model.boundary() == Boundary::Periodic && self.r > model.len() / 2 {
                return Err(ModelError::InvalidObservable {
                    kind: self.kind,
                    r: self.r,
                    l: model.len(),
                    reason: "separation exceeds L/2 on a ring",
                });
            }
            if self.r >= model.len() {
                return Err(ModelError::InvalidObservable {
                    kind: self.kind,
                    r: self.r,
                    l: model.len(),
                    reason: "separation exceeds chain length",
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for ObservableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind.needs_separation() {
            write!(f, "{}[r={}]", self.kind, self.r)
        } else {
            write!(f, "{}", self.kind)
        }
    }
}

/// The observable conjugate to a coupling, with the sign that makes
/// `sign * <observable>` equal to the energy-density derivative de/dg.
///
/// For the Ising field the Hamiltonian carries `-h sz`, so de/dh is minus
/// the transverse magnetization and the sign flag is -1; the spin-1
/// couplings enter with plus signs and carry +1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivingTerm {
    pub observable: ObservableSpec,
    pub sign: f64,
}

/// Observable conjugate to the named coupling (Hellmann-Feynman pairing).
pub fn driving_term(model: &ModelSpec, name: &str) -> Result<DrivingTerm, ModelError> {
    model.coupling(name)?;
    let term = match (model.family(), name) {
        (Family::Tfim, "h") => DrivingTerm {
            observable: ObservableSpec::site(ObservableKind::MagnetizationZ),
            sign: -1.0,
        },
        (Family::Spin1Xxzd, "D") => DrivingTerm {
            observable: ObservableSpec::site(ObservableKind::SzSquared),
            sign: 1.0,
        },
        (Family::Spin1Xxzd, "lambda") => DrivingTerm {
            observable: ObservableSpec::site(ObservableKind::SzSzNn),
            sign: 1.0,
        },
        (family, name) => {
            return Err(ModelError::UnknownCoupling {
                family,
                name: name.to_owned(),
            })
        }
    };
    Ok(term)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn driving_terms_match_couplings() {
        let spin1 = ModelSpec::spin1_xxzd(6, Boundary::Periodic, 2.59, 2.0).unwrap();
        let d = driving_term(&spin1, "D").unwrap();
        assert_eq!(d.observable.kind, ObservableKind::SzSquared);
        assert_eq!(d.sign, 1.0);
        let lam = driving_term(&spin1, "lambda").unwrap();
        assert_eq!(lam.observable.kind, ObservableKind::SzSzNn);

        let tfim = ModelSpec::tfim(8, Boundary::Periodic, 1.0).unwrap();
        let h = driving_term(&tfim, "h").unwrap();
        assert_eq!(h.observable.kind, ObservableKind::MagnetizationZ);
        assert_eq!(h.sign, -1.0);

        let err = driving_term(&tfim, "J").unwrap_err();
        assert!(matches!(err, ModelError::UnknownCoupling { .. }));
    }

    #[test]
    fn length_invariants() {
        assert!(ModelSpec::tfim(1, Boundary::Open, 0.5).is_err());
        assert!(ModelSpec::tfim(2, Boundary::Periodic, 0.5).is_ok());
        // periodic spin-1 rings must be even and at least 4 sites
        assert!(ModelSpec::spin1_xxzd(2, Boundary::Periodic, 1.0, 0.0).is_err());
        assert!(ModelSpec::spin1_xxzd(5, Boundary::Periodic, 1.0, 0.0).is_err());
        assert!(ModelSpec::spin1_xxzd(4, Boundary::Periodic, 1.0, 0.0).is_ok());
        assert!(ModelSpec::spin1_xxzd(2, Boundary::Open, 1.0, 0.0).is_ok());
        assert!(ModelSpec::spin1_xxzd(4, Boundary::Open, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn bond_lists() {
        let ring = ModelSpec::tfim(2, Boundary::Periodic, 1.0).unwrap();
        assert_eq!(ring.bonds(), vec![(0, 1), (1, 0)]); // double-counted pair
        let open = ModelSpec::tfim(4, Boundary::Open, 1.0).unwrap();
        assert_eq!(open.bonds(), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn observable_separation_bounds() {
        let m = ModelSpec::tfim(8, Boundary::Periodic, 1.0).unwrap();
        let ok = ObservableSpec::with_separation(ObservableKind::CorrelatorXx, 4);
        assert!(ok.validate_for(&m).is_ok());
        let too_far = ObservableSpec::with_separation(ObservableKind::CorrelatorXx, 5);
        assert!(too_far.validate_for(&m).is_err());
        let zero = ObservableSpec::with_separation(ObservableKind::CorrelatorZz, 0);
        assert!(zero.validate_for(&m).is_err());
    }

    #[test]
    fn with_coupling_rejects_unknown_names() {
        let m = ModelSpec::tfim(8, Boundary::Periodic, 1.0).unwrap();
        assert!(m.with_coupling("h", 1.2).is_ok());
        assert!(m.with_coupling("g", 1.2).is_err());
        assert!(m.with_coupling("h", f64::INFINITY).is_err());
    }
}
