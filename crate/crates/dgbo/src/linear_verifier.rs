//! Numerical checks of the free-evolution estimates: Strichartz ratios, the
//! local smoothing identity, and the two linear estimates in Bourgain norms.
//!
//! Data norms are Plancherel normalized: every ratio divides by
//! `fl_norm(phi) / sqrt(2 pi)`, which is exactly the `L^2` norm when `r = 2`.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dyadic::bump_psi;
use crate::norms::{fl_norm, mixed_norm, smoothing_profile, xsb_norm, NormParams};
use crate::spectral_core::{
    apply_multiplier, free_evolution_samples, Frame, Multiplier, SpaceTimeField, SpaceTimeGrid, SpectralField,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinearError {
    #[error("inadmissible exponents: {0}")]
    Inadmissible(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("data must vanish at xi = 0 for a homogeneous weight")]
    NonzeroMean,
    #[error("Duhamel input must be given in the modulation frame")]
    WrongFrame,
    #[error(transparent)]
    Norm(#[from] crate::norms::NormError),
}

/// Which admissibility condition a Strichartz pair satisfies.
pub fn strichartz_admissible(q: f64, p: f64, r: f64) -> Result<u8, LinearError> {
    let inv = |v: f64| if v.is_infinite() { 0.0 } else { 1.0 / v };
    let (iq, ip) = (inv(q), inv(p));
    if (2.0 * iq + ip - 1.0 / r).abs() > 1e-12 {
        return Err(LinearError::Inadmissible(format!("2/q + 1/p = {} differs from 1/r = {}", 2.0 * iq + ip, 1.0 / r)));
    }
    if q >= 4.0 && p > 4.0 {
        return Ok(1);
    }
    if 0.25 <= ip && ip + iq < 0.5 {
        return Ok(2);
    }
    if q.is_infinite() && p == 2.0 {
        return Ok(3);
    }
    Err(LinearError::Inadmissible(format!(
        "(q, p) = ({q}, {p}) meets none of: 4 <= q, 4 < p; 1/4 <= 1/p <= 1/p + 1/q < 1/2; (q, p) = (inf, 2)"
    )))
}

/// `|| D^{alpha/q} W(t) phi ||_{L^q_t L^p_x} / (fl_norm(phi, 0, r) / sqrt(2 pi))`.
pub fn strichartz_ratio(
    phi: &SpectralField,
    q: f64,
    p: f64,
    r: f64,
    alpha: f64,
    tgrid: &SpaceTimeGrid,
) -> Result<f64, LinearError> {
    strichartz_admissible(q, p, r)?;
    let gain = if q.is_infinite() { 0.0 } else { alpha / q };
    let d = if gain > 0.0 { apply_multiplier(phi, Multiplier::AbsDeriv(gain)).expect("positive power") } else { phi.clone() };
    let u = free_evolution_samples(&d, tgrid, alpha);
    let num = mixed_norm(&u, tgrid, q, p);
    let den = fl_norm(phi, &NormParams::new(0.0, 0.0, r, alpha)?, false)? / (2.0 * PI).sqrt();
    Ok(if den == 0.0 { 0.0 } else { num / den })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SmoothingCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_error: f64,
    /// `(max - min) / mean` of the per-node time norms over the central nodes.
    pub spread: f64,
}

/// Central spatial nodes whose passing wave packet stays inside the window.
fn central_nodes(tgrid: &SpaceTimeGrid, alpha: f64) -> Vec<usize> {
    let reach = (2.0 + alpha) * 0.25 * tgrid.t_width();
    (0..tgrid.space.len()).filter(|&j| tgrid.space.point(j).abs() <= reach).collect()
}

/// Compares `sup_x || F_t W(t) phi ||_{L^{r'}_tau}` with its exact value
/// `(2+alpha)^{-1/r} || |xi|^{-(1+alpha)/r} phi_hat ||_{L^{r'}}`.
///
/// The supremum runs over the central nodes, where the packet passes
/// entirely inside the time window; farther out the truncated signal's
/// spectrum carries window ripple rather than the continuum value.
pub fn local_smoothing_check(
    phi: &SpectralField,
    r: f64,
    alpha: f64,
    tgrid: &SpaceTimeGrid,
) -> Result<SmoothingCheck, LinearError> {
    if phi.coeffs[0].norm() != 0.0 {
        return Err(LinearError::NonzeroMean);
    }
    let u = free_evolution_samples(phi, tgrid, alpha);
    let prof = smoothing_profile(&u, tgrid, r);
    let central: Vec<f64> = central_nodes(tgrid, alpha).into_iter().map(|j| prof[j]).collect();
    let (lo, hi) = central.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    let lhs = hi;
    let p = NormParams::new(-(1.0 + alpha) / r, 0.0, r, alpha)?;
    let rhs = (2.0 + alpha).powf(-1.0 / r) * fl_norm(phi, &p, true)?;
    let rel_error = if rhs == 0.0 { 0.0 } else { (lhs - rhs).abs() / rhs };
    let mean = central.iter().sum::<f64>() / central.len().max(1) as f64;
    let spread = if mean == 0.0 { 0.0 } else { (hi - lo) / mean };
    Ok(SmoothingCheck { lhs, rhs, rel_error, spread })
}

/// `int_0^{t_m} g(s) ds` along the time axis by the trapezoid rule on the
/// native lattice (`t = 0` is node `n_t / 2`).
pub fn cumulative_from_zero(g: &Array2<Complex64>, dt: f64) -> Array2<Complex64> {
    let (nx, nt) = g.dim();
    let z = nt / 2;
    let mut out = Array2::<Complex64>::zeros((nx, nt));
    for k in 0..nx {
        for m in z + 1..nt {
            out[[k, m]] = out[[k, m - 1]] + (g[[k, m - 1]] + g[[k, m]]) * (0.5 * dt);
        }
        for m in (0..z).rev() {
            out[[k, m]] = out[[k, m + 1]] - (g[[k, m + 1]] + g[[k, m]]) * (0.5 * dt);
        }
    }
    out
}

/// `psi(t) W(t) phi` as a modulation-frame field.
pub fn cutoff_free_wave(phi: &SpectralField, tgrid: &SpaceTimeGrid, alpha: f64) -> SpaceTimeField {
    let ts = tgrid.times();
    let prof = Array2::from_shape_fn((tgrid.space.len(), ts.len()), |(k, m)| phi.coeffs[k] * bump_psi(ts[m]));
    SpaceTimeField::from_interaction(*tgrid, &prof, alpha).expect("shape matches grid")
}

/// `psi_T(t) int_0^t W(t - s) F(s) ds` for a modulation-frame `F`.
pub fn cutoff_duhamel(f: &SpaceTimeField, t_cut: f64) -> Result<SpaceTimeField, LinearError> {
    let Frame::Modulation { alpha } = f.frame else {
        return Err(LinearError::WrongFrame);
    };
    let g = f.to_interaction(alpha);
    let mut d = cumulative_from_zero(&g, f.grid.dt());
    let ts = f.grid.times();
    for ((_, m), v) in d.indexed_iter_mut() {
        *v *= bump_psi(ts[m] / t_cut);
    }
    Ok(SpaceTimeField::from_interaction(f.grid, &d, alpha).expect("shape matches grid"))
}

pub enum LinearInput<'a> {
    Homogeneous { phi: &'a SpectralField, tgrid: &'a SpaceTimeGrid },
    Duhamel { forcing: &'a SpaceTimeField, t_cut: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearParams {
    pub s: f64,
    pub b: f64,
    pub b_prime: f64,
    pub r: f64,
    pub alpha: f64,
}

/// Ratio of the two sides of the homogeneous or the retarded linear estimate.
pub fn linear_estimates_check(input: LinearInput<'_>, p: &LinearParams) -> Result<f64, LinearError> {
    match input {
        LinearInput::Homogeneous { phi, tgrid } => {
            let u = cutoff_free_wave(phi, tgrid, p.alpha);
            let num = xsb_norm(&u, &NormParams::new(p.s, p.b, p.r, p.alpha)?);
            let den = fl_norm(phi, &NormParams::new(p.s, 0.0, p.r, p.alpha)?, false)?;
            Ok(num / den)
        }
        LinearInput::Duhamel { forcing, t_cut } => {
            let rc = p.r / (p.r - 1.0);
            if !(p.b_prime + 1.0 >= p.b && p.b >= 0.0 && 0.0 >= p.b_prime && p.b_prime > -1.0 / rc) {
                return Err(LinearError::Hypothesis(format!(
                    "need b' + 1 >= b >= 0 >= b' > -1/r', got b = {}, b' = {}, r' = {rc}",
                    p.b, p.b_prime
                )));
            }
            let d = cutoff_duhamel(forcing, t_cut)?;
            let num = xsb_norm(&d, &NormParams::new(p.s, p.b, p.r, p.alpha)?);
            let den = t_cut.powf(1.0 + p.b_prime - p.b) * xsb_norm(forcing, &NormParams::new(p.s, p.b_prime, p.r, p.alpha)?);
            Ok(num / den)
        }
    }
}

/// Smooth one-sided bump `exp(a - a / (1 - y^2))` on `lo <= xi <= hi`, with
/// `y` the affine coordinate mapping the band to `[-1, 1]`.
pub fn smooth_band_with(grid: crate::spectral_core::Grid1D, lo: f64, hi: f64, a: f64) -> SpectralField {
    SpectralField::from_fn(grid, |xi| {
        let y = (2.0 * xi - lo - hi) / (hi - lo);
        let v = if y.abs() < 1.0 { (a - a / (1.0 - y * y)).exp() } else { 0.0 };
        Complex64::new(v, 0.0)
    })
}

/// Default sharpness of [`smooth_band_with`].
pub const BAND_SHARPNESS: f64 = 3.0;

pub fn smooth_band(grid: crate::spectral_core::Grid1D, lo: f64, hi: f64) -> SpectralField {
    smooth_band_with(grid, lo, hi, BAND_SHARPNESS)
}

/// `smooth_band` with seeded complex Gaussian-ish modulation of each mode,
/// made Hermitian so the data are real.
pub fn random_band(grid: crate::spectral_core::Grid1D, lo: f64, hi: f64, seed: u64) -> SpectralField {
    let env = smooth_band(grid, lo, hi);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SpectralField::zeros(grid);
    for i in 0..grid.len() {
        let k = grid.wavenumber(i);
        if k <= 0 {
            continue;
        }
        let c = env.coeffs[i] * Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        out.coeffs[i] = c;
        if let Some(j) = grid.index_of(-k) {
            out.coeffs[j] = c.conj();
        }
    }
    out
}
