//! Regularity threshold, contraction sweeps around it, and the high-low
//! second-iterate probe.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::norms::{fl_norm, NormError, NormParams};
use crate::solver::{picard_iterate, SolveConfig, SolverError};
use crate::spectral_core::{dispersion_symbol, make_grid, Grid1D, SpectralError, SpectralField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbeError {
    #[error("(alpha, r) = ({alpha}, {r}) is outside 0 < alpha <= 1, 1 < r < 1 + alpha")]
    Domain { alpha: f64, r: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("grid cannot resolve the probe: {0}")]
    Resolution(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

pub fn check_admissible(alpha: f64, r: f64) -> Result<(), ProbeError> {
    if alpha > 0.0 && alpha <= 1.0 && r > 1.0 && r < 1.0 + alpha {
        Ok(())
    } else {
        Err(ProbeError::Domain { alpha, r })
    }
}

/// Regularity threshold `-1 - alpha + 2/r + alpha/(2r)`.
pub fn threshold(alpha: f64, r: f64) -> Result<f64, ProbeError> {
    check_admissible(alpha, r)?;
    Ok(-1.0 - alpha + 2.0 / r + alpha / (2.0 * r))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub alpha: f64,
    pub r: f64,
    pub s: f64,
    pub t_final: f64,
    pub amplitude: f64,
    pub seed: u64,
    pub contraction_factors: Vec<f64>,
    pub converged: bool,
    pub diverged: bool,
    /// Last Picard difference relative to the first iterate; `None` when the cell failed.
    pub final_residual: Option<f64>,
    pub error: Option<String>,
}

/// Smooth real data `amp * exp(-(x-x0)^2/32) * (1 + cos(x/2 + theta)/2)` with
/// `x0` and `theta` drawn from `seed`.
pub fn seeded_data(grid: Grid1D, amp: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0: f64 = rng.gen_range(-4.0..4.0);
    let theta: f64 = rng.gen_range(0.0..2.0 * PI);
    SpectralField::from_real_fn(grid, |x| amp * (-(x - x0).powi(2) / 32.0).exp() * (1.0 + 0.5 * (0.5 * x + theta).cos()))
}

/// Picard contraction at `s = threshold(alpha, r) + offset` for every cell of
/// `alphas x rs x offsets`. Cell failures are recorded, not raised.
pub fn threshold_sweep(
    alphas: &[f64],
    rs: &[f64],
    offsets: &[f64],
    base: &SolveConfig,
    amplitude: f64,
    seed: u64,
) -> Result<Vec<SweepRecord>, ProbeError> {
    let mut cells = Vec::new();
    for &alpha in alphas {
        for &r in rs {
            let th = threshold(alpha, r)?;
            for &off in offsets {
                cells.push((alpha, r, th + off));
            }
        }
    }
    Ok(cells
        .par_iter()
        .enumerate()
        .map(|(i, &(alpha, r, s))| {
            let cell_seed = seed ^ i as u64;
            let cfg = SolveConfig { alpha, r, s, ..base.clone() };
            let mut rec = SweepRecord {
                alpha,
                r,
                s,
                t_final: cfg.t_final,
                amplitude,
                seed: cell_seed,
                contraction_factors: vec![],
                converged: false,
                diverged: false,
                final_residual: None,
                error: None,
            };
            let run = cfg.grid().and_then(|g| picard_iterate(&seeded_data(g, amplitude, cell_seed), &cfg));
            match run {
                Ok(res) => {
                    rec.final_residual =
                        res.differences.last().map(|d| if res.base_norm > 0.0 { d / res.base_norm } else { *d });
                    rec.contraction_factors = res.contraction_factors;
                    rec.converged = res.converged;
                    rec.diverged = res.diverged;
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            rec
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub n: u64,
    pub alpha: f64,
    pub s: f64,
    pub r: f64,
    pub t: f64,
    /// `||A2(phi_N)(t)||_{H^s}`.
    pub hs_norm: f64,
    /// `||A2(phi_N)(t)||_{H^s_r}` in the Fourier-Lebesgue sense.
    pub hr_norm: f64,
    pub hs_ratio: f64,
    pub hr_ratio: f64,
    /// `log2` growth of the ratio from the previous `N`.
    pub hs_trend: Option<f64>,
    pub hr_trend: Option<f64>,
    /// Whether the ratio column is nondecreasing in `N` over the whole table.
    pub hs_monotone: bool,
    pub hr_monotone: bool,
}

/// Frequency spacing of the probe grid.
pub const PROBE_DXI: f64 = 0.125;
/// Largest probe grid.
pub const PROBE_MAX_NX: usize = 1 << 20;

/// Smallest probe grid holding frequencies up to `2 * n_max + 2`.
pub fn probe_grid(n_max: u64) -> Result<Grid1D, ProbeError> {
    let need = 2.0 * n_max as f64 + 2.0;
    let n_x = ((2.0 * need / PROBE_DXI).ceil() as usize + 2).next_power_of_two();
    if n_x > PROBE_MAX_NX {
        return Err(ProbeError::Resolution(format!("N = {n_max} needs {n_x} > {PROBE_MAX_NX} modes")));
    }
    Ok(make_grid(PI / PROBE_DXI, n_x)?)
}

/// Smooth even bump of width 1 centred at `+-c` in frequency.
fn bump(xi: f64, c: f64) -> f64 {
    let y = 2.0 * (xi.abs() - c);
    if y.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - y * y)).exp()
    }
}

/// `phi_N = N^{-s} h_N + l` with `h_N`, `l` bumps of unit `L^2_xi` norm at `+-N`, `+-1`.
/// The high bump carries a seeded phase; `high = false` drops it.
pub fn probe_data(grid: Grid1D, n: u64, s: f64, high: bool, seed: u64) -> SpectralField {
    let theta = ChaCha8Rng::seed_from_u64(seed ^ n).gen_range(0.0..2.0 * PI);
    let nf = n as f64;
    let unit = |c: f64| {
        let f = SpectralField::from_fn(grid, |xi| Complex64::new(bump(xi, c), 0.0));
        let l2 = (f.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dxi()).sqrt();
        f.scale(1.0 / l2)
    };
    let low = unit(1.0);
    if !high {
        return low;
    }
    let mut h = unit(nf).scale(nf.powf(-s));
    for (i, z) in h.coeffs.iter_mut().enumerate() {
        // Conjugate phases keep the data real.
        *z *= Complex64::from_polar(1.0, theta * grid.freq(i).signum());
    }
    low.add(&h)
}

/// Second Picard iterate `int_0^t W(t-s') N(W(s') phi) ds'`, with the time
/// integral done in closed form for each frequency pair.
pub fn second_iterate(phi: &SpectralField, t: f64, alpha: f64) -> Result<SpectralField, ProbeError> {
    let g = phi.grid;
    let support: Vec<(i64, f64, Complex64)> = (0..g.len())
        .filter(|&i| phi.coeffs[i].norm() > 0.0)
        .map(|i| (g.wavenumber(i), g.freq(i), phi.coeffs[i]))
        .collect();
    let mut out = SpectralField::zeros(g);
    if t == 0.0 {
        return Ok(out);
    }
    let c = g.dxi() / (2.0 * PI);
    for &(k1, x1, a1) in &support {
        let w1 = dispersion_symbol(x1, alpha);
        for &(k2, x2, a2) in &support {
            let k = k1 + k2;
            let idx = g.index_of(k).ok_or_else(|| ProbeError::Resolution(format!("wavenumber {k} is off the grid")))?;
            let xi = x1 + x2;
            let w = dispersion_symbol(xi, alpha);
            let om = w - w1 - dispersion_symbol(x2, alpha);
            // int_0^t e^{i(t-s) w} e^{i s (w1 + w2)} ds
            let time = if (om * t).abs() < 1e-12 {
                Complex64::new(t, 0.0)
            } else {
                (Complex64::from_polar(1.0, -om * t) - 1.0) / Complex64::new(0.0, -om)
            };
            let v = Complex64::new(0.0, -0.5 * xi) * a1 * a2 * c * Complex64::from_polar(1.0, w * t) * time;
            out.coeffs[idx] += v;
        }
    }
    Ok(out)
}

/// Second-iterate growth table over `ns x rs` at time `t`.
pub fn illposedness_probe(ns: &[u64], alpha: f64, s: f64, rs: &[f64], t: f64, seed: u64) -> Result<Vec<ProbeRecord>, ProbeError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(ProbeError::Parameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(ProbeError::Parameter(format!("t must be nonnegative, got {t}")));
    }
    if let Some(&n) = ns.iter().find(|&&n| n < 4 || !n.is_power_of_two()) {
        return Err(ProbeError::Parameter(format!("N must be a power of two >= 4, got {n}")));
    }
    let Some(&n_max) = ns.iter().max() else { return Ok(vec![]) };
    let grid = probe_grid(n_max)?;
    let hs = NormParams::new(s, 0.0, 2.0, alpha)?;
    let hr: Vec<NormParams> = rs.iter().map(|&r| NormParams::new(s, 0.0, r, alpha)).collect::<Result<_, _>>()?;
    let rows: Vec<Vec<ProbeRecord>> = ns
        .par_iter()
        .map(|&n| -> Result<Vec<ProbeRecord>, ProbeError> {
            let phi = probe_data(grid, n, s, true, seed);
            let a2 = second_iterate(&phi, t, alpha)?;
            let (a_hs, d_hs) = (fl_norm(&a2, &hs, false)?, fl_norm(&phi, &hs, false)?);
            hr.iter()
                .map(|p| {
                    let (a_hr, d_hr) = (fl_norm(&a2, p, false)?, fl_norm(&phi, p, false)?);
                    Ok(ProbeRecord {
                        n,
                        alpha,
                        s,
                        r: p.r,
                        t,
                        hs_norm: a_hs,
                        hr_norm: a_hr,
                        hs_ratio: a_hs / (d_hs * d_hs),
                        hr_ratio: a_hr / (d_hr * d_hr),
                        hs_trend: None,
                        hr_trend: None,
                        hs_monotone: false,
                        hr_monotone: false,
                    })
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let mut out: Vec<ProbeRecord> = rows.into_iter().flatten().collect();
    out.sort_by(|a, b| a.r.total_cmp(&b.r).then(a.n.cmp(&b.n)));
    add_trends(&mut out);
    Ok(out)
}

fn add_trends(rows: &mut [ProbeRecord]) {
    let mut start = 0;
    while start < rows.len() {
        let r = rows[start].r;
        let end = start + rows[start..].iter().take_while(|x| x.r == r).count();
        let block = &mut rows[start..end];
        for i in 1..block.len() {
            let steps = (block[i].n as f64 / block[i - 1].n as f64).log2();
            let trend = |a: f64, b: f64| (a > 0.0 && b > 0.0).then(|| (b / a).log2() / steps);
            block[i].hs_trend = trend(block[i - 1].hs_ratio, block[i].hs_ratio);
            block[i].hr_trend = trend(block[i - 1].hr_ratio, block[i].hr_ratio);
        }
        let hs_mono = block.windows(2).all(|w| w[1].hs_ratio >= w[0].hs_ratio);
        let hr_mono = block.windows(2).all(|w| w[1].hr_ratio >= w[0].hr_ratio);
        for row in block.iter_mut() {
            row.hs_monotone = hs_mono;
            row.hr_monotone = hr_mono;
        }
        start = end;
    }
}
