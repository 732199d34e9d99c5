//! Smooth bump, dyadic pieces and Littlewood-Paley projectors in frequency
//! and modulation.

use num_complex::Complex64;
use thiserror::Error;

use crate::spectral_core::{SpaceTimeField, SpectralField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("dyadic index must be a power of two >= 1, got {0}")]
pub struct DyadicError(pub u64);

/// A power of two `N >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct DyadicIndex(u64);

impl DyadicIndex {
    pub fn new(value: u64) -> Result<Self, DyadicError> {
        if value >= 1 && value.is_power_of_two() {
            Ok(Self(value))
        } else {
            Err(DyadicError(value))
        }
    }

    pub fn pow2(k: u32) -> Self {
        Self(1u64 << k)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn get(self) -> f64 {
        self.0 as f64
    }

    pub fn log2(self) -> u32 {
        self.0.trailing_zeros()
    }

    /// `1, 2, 4, ..., 2^k_max`.
    pub fn up_to(k_max: u32) -> Vec<Self> {
        (0..=k_max).map(Self::pow2).collect()
    }
}

impl TryFrom<u64> for DyadicIndex {
    type Error = DyadicError;
    fn try_from(v: u64) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<DyadicIndex> for u64 {
    fn from(d: DyadicIndex) -> u64 {
        d.0
    }
}

impl std::fmt::Display for DyadicIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn g(y: f64) -> f64 {
    if y > 0.0 {
        (-1.0 / y).exp()
    } else {
        0.0
    }
}

/// Even C-infinity bump: 1 on `[-1, 1]`, 0 outside `(-5/4, 5/4)`.
pub fn bump_psi(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= 1.0 {
        return 1.0;
    }
    if a >= 1.25 {
        return 0.0;
    }
    let up = g((1.25 - a) * 4.0);
    let down = g((a - 1.0) * 4.0);
    up / (up + down)
}

/// `chi(xi) = psi(xi) - psi(2 xi)`, supported in `1/2 < |xi| < 5/4`.
pub fn chi(xi: f64) -> f64 {
    bump_psi(xi) - bump_psi(2.0 * xi)
}

/// Symbol of `P_N`: `psi` for `N = 1`, else `chi(xi / N)`.
pub fn dyadic_symbol(xi: f64, n: DyadicIndex) -> f64 {
    if n.value() == 1 {
        bump_psi(xi)
    } else {
        chi(xi / n.get())
    }
}

pub fn project_frequency(f: &SpectralField, n: DyadicIndex) -> SpectralField {
    let g = f.grid;
    let coeffs = f.coeffs.iter().enumerate().map(|(i, c)| c * dyadic_symbol(g.freq(i), n)).collect();
    SpectralField { grid: g, coeffs }
}

/// `Q_L`: multiplies by the dyadic symbol of the modulation `tau - omega(xi)`.
pub fn project_modulation(u: &SpaceTimeField, l: DyadicIndex, alpha: f64) -> SpaceTimeField {
    u.map_coeffs(|k, m, c| c * dyadic_symbol(u.sigma(k, m, alpha), l))
}

/// Frequency projector applied to every time slice of a space-time field.
pub fn project_frequency_st(u: &SpaceTimeField, n: DyadicIndex) -> SpaceTimeField {
    let gs = u.grid.space;
    u.map_coeffs(|k, _, c| c * Complex64::new(dyadic_symbol(gs.freq(k), n), 0.0))
}
