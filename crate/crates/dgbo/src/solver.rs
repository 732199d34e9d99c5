//! Cauchy solver: integrating-factor RK4 time stepping, the cutoff Duhamel
//! (Picard) iteration with Bourgain-norm contraction diagnostics, the
//! nonlinear-estimate ratio and the scaling check.
//!
//! The Picard iteration works with the interaction-picture profile
//! `v(xi, t) = e^{-it omega} u_hat(xi, t)`, which is stored as a
//! modulation-frame [`SpaceTimeField`] so modulations never alias.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

use crate::dyadic::bump_psi;
use crate::linear_verifier::cumulative_from_zero;
use crate::norms::{xsb_norm, NormError, NormParams};
use crate::spectral_core::{
    dispersion_symbol, make_grid, Grid1D, SpaceTimeField, SpaceTimeGrid, SpectralError, SpectralField,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("input is not real-valued (Hermitian defect {0:e})")]
    NotReal(f64),
    #[error("non-finite state after step {step} (t = {t})")]
    Unstable { step: usize, t: f64 },
    #[error("ratio undefined: zero denominator")]
    UndefinedRatio,
    #[error("grid cannot resolve the request: {0}")]
    Resolution(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Norm(#[from] NormError),
}

/// Tolerance on the Hermitian defect accepted as real data.
pub const REAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolveConfig {
    pub alpha: f64,
    pub half_width: f64,
    pub n_x: usize,
    /// Time horizon.
    pub t_final: f64,
    pub dt: f64,
    pub s: f64,
    pub r: f64,
    /// `b = 1/r + epsilon`, `b' = -1/r' + 2 epsilon`.
    pub epsilon: f64,
    pub dealias: bool,
    pub max_picard_iters: usize,
    pub picard_tol: f64,
    /// Time nodes of the Picard space-time grid.
    pub picard_nt: usize,
    /// Steps between recorded diagnostics in [`solve`].
    pub sample_every: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            half_width: 32.0 * PI,
            n_x: 1024,
            t_final: 1.0,
            dt: 1e-2,
            s: 0.0,
            r: 1.9,
            epsilon: 0.05,
            dealias: true,
            max_picard_iters: 25,
            picard_tol: 1e-10,
            picard_nt: 512,
            sample_every: 10,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::Config(m));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if !(self.r > 1.0 && self.r.is_finite()) {
            return bad(format!("r must exceed 1, got {}", self.r));
        }
        if !(self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad(format!("T must be positive, got {}", self.t_final));
        }
        if self.sample_every == 0 {
            return bad("sample_every must be at least 1".into());
        }
        make_grid(self.half_width, self.n_x)?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid1D, SolverError> {
        Ok(make_grid(self.half_width, self.n_x)?)
    }

    pub fn b(&self) -> f64 {
        1.0 / self.r + self.epsilon
    }

    pub fn b_prime(&self) -> f64 {
        -(self.r - 1.0) / self.r + 2.0 * self.epsilon
    }

    pub fn x_params(&self) -> Result<NormParams, SolverError> {
        Ok(NormParams::new(self.s, self.b(), self.r, self.alpha)?)
    }
}

fn check_real(u: &SpectralField) -> Result<(), SolverError> {
    let d = u.hermitian_defect();
    if d > REAL_TOL {
        return Err(SolverError::NotReal(d));
    }
    Ok(())
}

fn truncate(c: &mut [Complex64], grid: &Grid1D) {
    let cut = grid.dealias_cutoff();
    for (i, v) in c.iter_mut().enumerate() {
        if grid.wavenumber(i).abs() > cut {
            *v = Complex64::default();
        }
    }
}

fn nonlinearity_unchecked(u: &SpectralField, dealias: bool) -> SpectralField {
    let g = u.grid;
    let mut c = u.coeffs.clone();
    if dealias {
        truncate(&mut c, &g);
    }
    g.inverse_in_place(&mut c);
    for v in c.iter_mut() {
        *v = Complex64::new(v.re * v.re, 0.0);
    }
    g.forward_in_place(&mut c);
    for (i, v) in c.iter_mut().enumerate() {
        *v *= Complex64::new(0.0, -0.5 * g.freq(i));
    }
    if dealias {
        truncate(&mut c, &g);
    }
    let nyq = g.len() / 2;
    c[nyq] = Complex64::default();
    SpectralField { grid: g, coeffs: c }
}

/// `N(u) = -u u_x`, computed as `-(1/2) d/dx (u^2)` through physical space.
pub fn nonlinearity(u: &SpectralField, dealias: bool) -> Result<SpectralField, SolverError> {
    check_real(u)?;
    Ok(nonlinearity_unchecked(u, dealias))
}

fn phases(grid: &Grid1D, t: f64, alpha: f64) -> Vec<Complex64> {
    (0..grid.len()).map(|i| Complex64::from_polar(1.0, t * dispersion_symbol(grid.freq(i), alpha))).collect()
}

fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn axpy(a: &[Complex64], s: f64, b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x + y * s).collect()
}

/// Precomputed propagator phases for a fixed step.
struct Stepper {
    grid: Grid1D,
    e_full: Vec<Complex64>,
    e_half: Vec<Complex64>,
    dt: f64,
    dealias: bool,
}

impl Stepper {
    fn new(grid: Grid1D, dt: f64, alpha: f64, dealias: bool) -> Self {
        Self { grid, e_full: phases(&grid, dt, alpha), e_half: phases(&grid, 0.5 * dt, alpha), dt, dealias }
    }

    fn n(&self, c: Vec<Complex64>) -> Vec<Complex64> {
        nonlinearity_unchecked(&SpectralField { grid: self.grid, coeffs: c }, self.dealias).coeffs
    }

    fn step(&self, u: &[Complex64]) -> Vec<Complex64> {
        let (e, eh, h) = (&self.e_full, &self.e_half, self.dt);
        let k1 = self.n(u.to_vec());
        let k2 = self.n(mul(eh, &axpy(u, 0.5 * h, &k1)));
        let ehu = mul(eh, u);
        let k3 = self.n(axpy(&ehu, 0.5 * h, &k2));
        let k4 = self.n(axpy(&mul(e, u), h, &mul(eh, &k3)));
        let mut out = mul(e, u);
        for i in 0..out.len() {
            out[i] += (e[i] * k1[i] + eh[i] * (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        out
    }
}

/// One integrating-factor RK4 step: the linear flow is exact, the
/// nonlinearity is advanced by classical RK4 in the interaction picture.
pub fn step_ifrk4(u: &SpectralField, dt: f64, alpha: f64, dealias: bool) -> Result<SpectralField, SolverError> {
    check_real(u)?;
    let st = Stepper::new(u.grid, dt, alpha, dealias);
    let c = st.step(&u.coeffs);
    if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(SolverError::Unstable { step: 1, t: dt });
    }
    Ok(SpectralField { grid: u.grid, coeffs: c })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    /// Spatial average of `u`.
    pub mean: f64,
    pub l2: f64,
    pub energy: f64,
}

/// `E = (1/2) <|d|^{1+alpha} u, u> + (1/6) int u^3`, conserved by the flow.
pub fn energy(u: &SpectralField, alpha: f64) -> f64 {
    let g = u.grid;
    let quad: f64 = u
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| g.freq(i).abs().powf(1.0 + alpha) * c.norm_sqr())
        .sum::<f64>()
        * g.dxi()
        / (2.0 * PI);
    let cubic: f64 = u.to_real().iter().map(|v| v * v * v).sum::<f64>() * g.dx();
    0.5 * quad + cubic / 6.0
}

pub fn diagnostics(u: &SpectralField, t: f64, alpha: f64) -> Diagnostics {
    Diagnostics {
        t,
        mean: u.coeffs[0].re / (2.0 * u.grid.half_width()),
        l2: u.l2_norm(),
        energy: energy(u, alpha),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub times: Vec<f64>,
    pub trajectory: Vec<SpectralField>,
    pub diagnostics: Vec<Diagnostics>,
    pub final_state: SpectralField,
}

impl SolveResult {
    /// Largest relative deviation of `l2` and `energy` from their initial values,
    /// and the largest absolute deviation of the mean.
    pub fn drifts(&self) -> (f64, f64, f64) {
        let d0 = self.diagnostics[0];
        let rel = |a: f64, b: f64| if b == 0.0 { a.abs() } else { ((a - b) / b).abs() };
        self.diagnostics.iter().fold((0.0f64, 0.0f64, 0.0f64), |(m, l, e), d| {
            (m.max((d.mean - d0.mean).abs()), l.max(rel(d.l2, d0.l2)), e.max(rel(d.energy, d0.energy)))
        })
    }
}

/// Integrates from `t = 0` to `cfg.t_final` with a step no larger than `cfg.dt`.
pub fn solve(u0: &SpectralField, cfg: &SolveConfig) -> Result<SolveResult, SolverError> {
    cfg.validate()?;
    check_real(u0)?;
    let steps = (cfg.t_final / cfg.dt).ceil().max(1.0) as usize;
    let dt = cfg.t_final / steps as f64;
    let st = Stepper::new(u0.grid, dt, cfg.alpha, cfg.dealias);
    let mut c = u0.coeffs.clone();
    let mut out = SolveResult {
        times: vec![0.0],
        trajectory: vec![u0.clone()],
        diagnostics: vec![diagnostics(u0, 0.0, cfg.alpha)],
        final_state: u0.clone(),
    };
    for n in 1..=steps {
        c = st.step(&c);
        if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SolverError::Unstable { step: n, t: n as f64 * dt });
        }
        if n % cfg.sample_every == 0 || n == steps {
            let t = n as f64 * dt;
            let f = SpectralField { grid: u0.grid, coeffs: c.clone() };
            out.times.push(t);
            out.diagnostics.push(diagnostics(&f, t, cfg.alpha));
            out.trajectory.push(f);
        }
    }
    out.final_state = SpectralField { grid: u0.grid, coeffs: c };
    Ok(out)
}

/// Space-time grid for the Picard iteration: `t_width = 2T * 2^j` with the
/// smallest `j` such that the window holds `supp psi`; `T/2` is a lattice node.
pub fn picard_grid(cfg: &SolveConfig) -> Result<SpaceTimeGrid, SolverError> {
    let mut j = 0u32;
    while 2.0 * cfg.t_final * 2f64.powi(j as i32) < 1.5 {
        j += 1;
    }
    let t_width = 2.0 * cfg.t_final * 2f64.powi(j as i32);
    let n_t = cfg.picard_nt.max(8usize << j).next_power_of_two();
    Ok(SpaceTimeGrid::new(cfg.grid()?, t_width, n_t)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardResult {
    pub grid: SpaceTimeGrid,
    /// `u^0, u^1, ...` as modulation-frame fields.
    pub iterates: Vec<SpaceTimeField>,
    /// X-norm of `u^{n+1} - u^n`.
    pub differences: Vec<f64>,
    /// `differences[n] / differences[n-1]`.
    pub contraction_factors: Vec<f64>,
    pub converged: bool,
    pub diverged: bool,
    /// X-norm of the first iterate.
    pub base_norm: f64,
}

impl PicardResult {
    pub fn last(&self) -> &SpaceTimeField {
        self.iterates.last().expect("at least the first iterate")
    }

    /// Spatial spectrum of the last iterate at lattice time `t`.
    pub fn state_at(&self, t: f64) -> Result<SpectralField, SolverError> {
        let ts = self.grid.times();
        let m = ts
            .iter()
            .position(|&s| (s - t).abs() < 1e-9 * self.grid.t_width())
            .ok_or_else(|| SolverError::Resolution(format!("t = {t} is not a lattice node")))?;
        let prof = self.last().to_profile();
        Ok(SpectralField { grid: self.grid.space, coeffs: prof.column(m).to_vec() })
    }

    pub fn max_kappa(&self) -> f64 {
        self.contraction_factors.iter().cloned().fold(0.0, f64::max)
    }
}

fn profile_of(u0: &SpectralField, grid: &SpaceTimeGrid) -> Array2<Complex64> {
    let ts = grid.times();
    Array2::from_shape_fn((grid.space.len(), ts.len()), |(k, m)| u0.coeffs[k] * bump_psi(ts[m]))
}

/// `e^{-it omega} N(e^{it omega} v(t))` at every node where `psi_T` is nonzero.
fn interaction_nonlinearity(v: &Array2<Complex64>, grid: &SpaceTimeGrid, alpha: f64, t_cut: f64, dealias: bool) -> Array2<Complex64> {
    let ts = grid.times();
    let gs = grid.space;
    let mut out = Array2::<Complex64>::zeros(v.dim());
    let w: Vec<f64> = (0..gs.len()).map(|k| dispersion_symbol(gs.freq(k), alpha)).collect();
    for (m, &t) in ts.iter().enumerate() {
        if bump_psi(t / t_cut) == 0.0 && t.abs() > t_cut {
            continue;
        }
        let c: Vec<Complex64> = (0..gs.len()).map(|k| v[[k, m]] * Complex64::from_polar(1.0, t * w[k])).collect();
        let n = nonlinearity_unchecked(&SpectralField { grid: gs, coeffs: c }, dealias);
        for k in 0..gs.len() {
            out[[k, m]] = n.coeffs[k] * Complex64::from_polar(1.0, -t * w[k]);
        }
    }
    out
}

/// The cutoff Duhamel map applied once to a profile.
pub fn duhamel_map(base: &Array2<Complex64>, v: &Array2<Complex64>, grid: &SpaceTimeGrid, cfg: &SolveConfig) -> Array2<Complex64> {
    let g = interaction_nonlinearity(v, grid, cfg.alpha, cfg.t_final, cfg.dealias);
    let mut d = cumulative_from_zero(&g, grid.dt());
    let ts = grid.times();
    for ((_, m), x) in d.indexed_iter_mut() {
        *x *= bump_psi(ts[m] / cfg.t_final);
    }
    d + base
}

/// Iterates `u^{n+1} = psi(t) W(t) u0 + psi_T(t) int_0^t W(t-s) N(u^n)(s) ds`.
pub fn picard_iterate(u0: &SpectralField, cfg: &SolveConfig) -> Result<PicardResult, SolverError> {
    cfg.validate()?;
    check_real(u0)?;
    let grid = picard_grid(cfg)?;
    if grid.space != u0.grid {
        return Err(SolverError::Config("u0 grid differs from the configured grid".into()));
    }
    let xp = cfg.x_params()?;
    let xnorm = |p: &Array2<Complex64>| -> f64 { xsb_norm(&SpaceTimeField::from_interaction(grid, p, cfg.alpha).expect("shape"), &xp) };
    let base = profile_of(u0, &grid);
    let base_norm = xnorm(&base);
    let mut res = PicardResult {
        grid,
        iterates: vec![SpaceTimeField::from_interaction(grid, &base, cfg.alpha)?],
        differences: vec![],
        contraction_factors: vec![],
        converged: false,
        diverged: false,
        base_norm,
    };
    let mut cur = base.clone();
    let mut strikes = 0;
    for _ in 0..cfg.max_picard_iters {
        let next = duhamel_map(&base, &cur, &grid, cfg);
        let d = xnorm(&(&next - &cur));
        res.iterates.push(SpaceTimeField::from_interaction(grid, &next, cfg.alpha)?);
        if let Some(&prev) = res.differences.last() {
            let k = if prev > 0.0 { d / prev } else { 0.0 };
            res.contraction_factors.push(k);
            strikes = if k > 10.0 { strikes + 1 } else { 0 };
        }
        res.differences.push(d);
        cur = next;
        if !d.is_finite() || strikes >= 3 {
            res.diverged = true;
            break;
        }
        if d <= cfg.picard_tol * base_norm {
            res.converged = true;
            break;
        }
    }
    Ok(res)
}

/// `||N(u)||_{X^{s,b'}} / ||u||_{X^{s,b}}^2` with `b = 1/r + eps`, `b' = -1/r' + 2 eps`.
pub fn nonlinear_estimate_ratio(u: &SpaceTimeField, s: f64, r: f64, epsilon: f64, alpha: f64) -> Result<f64, SolverError> {
    let prof = u.to_profile();
    let gs = u.grid.space;
    let scale = prof.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut n = Array2::<Complex64>::zeros(prof.dim());
    for (m, col) in prof.columns().into_iter().enumerate() {
        let f = SpectralField { grid: gs, coeffs: col.to_vec() };
        let local = f.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale > 0.0 && f.hermitian_defect() * local / scale > REAL_TOL {
            return Err(SolverError::NotReal(f.hermitian_defect() * local / scale));
        }
        let nf = nonlinearity_unchecked(&f, true);
        for k in 0..gs.len() {
            n[[k, m]] = nf.coeffs[k];
        }
    }
    let nu = SpaceTimeField::from_profile(u.grid, &n, u.frame)?;
    let rc = r / (r - 1.0);
    let num = xsb_norm(&nu, &NormParams::new(s, -1.0 / rc + 2.0 * epsilon, r, alpha)?);
    let den = xsb_norm(u, &NormParams::new(s, 1.0 / r + epsilon, r, alpha)?);
    if den == 0.0 {
        return Err(SolverError::UndefinedRatio);
    }
    Ok(num / (den * den))
}

/// Exponents of `u_lambda(x, t) = lambda^amplitude u(lambda x, lambda^time t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingExponents {
    pub amplitude: f64,
    pub time: f64,
    /// Homogeneous Sobolev index whose norm is compared before and after rescaling.
    pub sobolev: f64,
}

impl ScalingExponents {
    /// The symmetry of the equation: amplitude `1 + alpha`, time `2 + alpha`.
    pub fn symmetry(alpha: f64) -> Self {
        let amplitude = 1.0 + alpha;
        Self { amplitude, time: 2.0 + alpha, sobolev: Self::invariant_index(amplitude) }
    }

    /// Homogeneous Sobolev index left invariant by an amplitude exponent.
    pub fn invariant_index(amplitude: f64) -> f64 {
        0.5 - amplitude
    }

    pub fn critical_index(&self) -> f64 {
        Self::invariant_index(self.amplitude)
    }
}

/// `lambda^a u0(lambda x)` sampled on the grid compressed by `lambda`.
pub fn rescale_data(u0: &SpectralField, lambda: f64, amplitude: f64) -> Result<SpectralField, SolverError> {
    let g = u0.grid;
    let h = make_grid(g.half_width() / lambda, g.len())?;
    Ok(SpectralField::from_real(h, &u0.to_real().iter().map(|v| v * lambda.powf(amplitude)).collect::<Vec<_>>())?)
}

/// Homogeneous `H^s` norm over the nonzero modes.
pub fn homogeneous_sobolev(u: &SpectralField, s: f64) -> f64 {
    let g = u.grid;
    let sum: f64 = (0..g.len())
        .filter(|&i| g.wavenumber(i) != 0)
        .map(|i| g.freq(i).abs().powf(2.0 * s) * u.coeffs[i].norm_sqr())
        .sum();
    (sum * g.dxi() / (2.0 * PI)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ScalingReport {
    pub lambda: f64,
    pub amplitude_exponent: f64,
    pub time_exponent: f64,
    /// Relative nodewise `L^2` distance between `u(T)` and the pulled-back rescaled solution.
    pub discrepancy: f64,
    /// `||u_lambda(0)||_{H^s} / ||u0||_{H^s}` at `s = exps.sobolev`.
    pub critical_norm_ratio: f64,
}

/// Solves from `u0` to `T` and from the rescaled data to `T / lambda^time`
/// on the compressed grid, then compares nodewise after undoing the scaling.
pub fn scaling_check(
    u0: &SpectralField,
    lambda: f64,
    cfg: &SolveConfig,
    exps: ScalingExponents,
) -> Result<ScalingReport, SolverError> {
    if !(lambda > 0.0) {
        return Err(SolverError::Config(format!("lambda must be positive, got {lambda}")));
    }
    let g = u0.grid;
    let resolved = |f: &SpectralField| {
        let cut = g.dealias_cutoff();
        let tail: f64 = (0..g.len()).filter(|&i| g.wavenumber(i).abs() > cut / 2).map(|i| f.coeffs[i].norm()).fold(0.0, f64::max);
        let top = f.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        tail <= 1e-12 * top.max(f64::MIN_POSITIVE)
    };
    let a = solve(u0, &SolveConfig { half_width: g.half_width(), n_x: g.len(), ..cfg.clone() })?;
    if !resolved(&a.final_state) {
        return Err(SolverError::Resolution("solution reaches the upper half of the retained band".into()));
    }
    let v0 = rescale_data(u0, lambda, exps.amplitude)?;
    let tl = lambda.powf(exps.time);
    let scfg = SolveConfig {
        half_width: g.half_width() / lambda,
        n_x: g.len(),
        t_final: cfg.t_final / tl,
        dt: cfg.dt / tl,
        ..cfg.clone()
    };
    let b = solve(&v0, &scfg)?;
    let ua = a.final_state.to_real();
    let ub = b.final_state.to_real();
    let back = lambda.powf(-exps.amplitude);
    let num: f64 = ua.iter().zip(&ub).map(|(x, y)| (x - back * y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = ua.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sc = exps.sobolev;
    let ratio = homogeneous_sobolev(&v0, sc) / homogeneous_sobolev(u0, sc);
    Ok(ScalingReport {
        lambda,
        amplitude_exponent: exps.amplitude,
        time_exponent: exps.time,
        discrepancy: if den == 0.0 { num } else { num / den },
        critical_norm_ratio: ratio,
    })
}

/// Real, smooth, low-frequency data `amp * exp(-x^2 / 32)`.
pub fn gaussian_data(grid: Grid1D, amp: f64) -> SpectralField {
    SpectralField::from_real_fn(grid, |x| amp * (-x * x / 32.0).exp())
}

/// Real, smooth, mean-zero data `amp * (x / 4) exp(-x^2 / 32)`.
pub fn odd_gaussian_data(grid: Grid1D, amp: f64) -> SpectralField {
    let mut f = SpectralField::from_real_fn(grid, |x| amp * 0.25 * x * (-x * x / 32.0).exp());
    f.coeffs[0] = Complex64::default();
    f
}

/// `psi(t) sum_j a_j cos(xi_j x + nu_j t + theta_j)` sampled on `grid` as a lab-frame field.
/// Frequencies are multiples of `1 / 8` up to `xi_max`, so any grid with
/// `half_width` a multiple of `8 pi` resolves them exactly.
pub fn random_band_field(grid: SpaceTimeGrid, modes: usize, xi_max: f64, seed: u64) -> Result<SpaceTimeField, SolverError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let top = ((xi_max * 8.0).floor() as i64).max(2);
    let waves: Vec<[f64; 4]> = (0..modes)
        .map(|_| {
            [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(1..top) as f64 / 8.0,
                rng.gen_range(-3.0..3.0),
                rng.gen_range(0.0..2.0 * PI),
            ]
        })
        .collect();
    let xs = grid.space.points();
    let ts = grid.times();
    let samples = Array2::from_shape_fn((xs.len(), ts.len()), |(j, m)| {
        let (x, t) = (xs[j], ts[m]);
        let v: f64 = waves.iter().map(|w| w[0] * (w[1] * x + w[2] * t + w[3]).cos()).sum();
        Complex64::new(bump_psi(t) * v, 0.0)
    });
    Ok(SpaceTimeField::from_samples(grid, &samples)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_cfg() -> SolveConfig {
        SolveConfig { half_width: 16.0 * PI, n_x: 256, ..Default::default() }
    }

    #[test]
    fn nonlinearity_of_cosine() {
        let g = make_grid(PI, 32).unwrap();
        let u = SpectralField::from_real_fn(g, f64::cos);
        let n = nonlinearity(&u, true).unwrap().to_real();
        for (x, v) in g.points().iter().zip(n) {
            assert!((v - 0.5 * (2.0 * x).sin()).abs() < 1e-13);
        }
        let c = SpectralField::from_real_fn(g, |_| 2.5);
        assert!(nonlinearity(&c, true).unwrap().coeffs.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn nonlinearity_mean_zero_and_real() {
        let g = make_grid(10.0, 64).unwrap();
        let u = SpectralField::from_real_fn(g, |x| (x * 0.7).sin() + 0.3 * (x * 1.9).cos() + 0.2);
        for dealias in [true, false] {
            let n = nonlinearity(&u, dealias).unwrap();
            assert_eq!(n.coeffs[0], Complex64::default());
            assert!(n.hermitian_defect() < 1e-13);
        }
        let mut z = u.clone();
        z.coeffs[3] += Complex64::new(0.0, 1.0);
        assert!(matches!(nonlinearity(&z, true), Err(SolverError::NotReal(_))));
    }

    #[test]
    fn zero_stays_zero() {
        let cfg = small_cfg();
        let z = SpectralField::zeros(cfg.grid().unwrap());
        assert_eq!(step_ifrk4(&z, 0.1, 0.5, true).unwrap(), z);
        let r = solve(&z, &SolveConfig { t_final: 0.2, ..cfg }).unwrap();
        assert!(r.trajectory.iter().all(|f| f.coeffs.iter().all(|c| c.norm() == 0.0)));
    }

    #[test]
    fn small_amplitude_linearization() {
        let cfg = small_cfg();
        let g = cfg.grid().unwrap();
        let dt = 0.05;
        let mut prev = None;
        for eps in [1e-2, 1e-3] {
            let u = gaussian_data(g, eps);
            let a = step_ifrk4(&u, dt, 0.5, true).unwrap();
            let b = crate::spectral_core::propagate(&u, dt, 0.5);
            let err = a.sub(&b).l2_norm();
            let c = err / (eps * eps * dt);
            assert!(c < 1.0, "{c}");
            if let Some(p) = prev {
                assert_relative_eq!(c, p, max_relative = 0.05);
            }
            prev = Some(c);
        }
    }

    #[test]
    fn fourth_order_convergence() {
        // Independent reference: Richardson extrapolation from the two finest runs.
        let cfg = SolveConfig { t_final: 0.5, ..small_cfg() };
        let g = cfg.grid().unwrap();
        let u0 = gaussian_data(g, 0.5);
        let run = |dt: f64| solve(&u0, &SolveConfig { dt, sample_every: 100000, ..cfg.clone() }).unwrap().final_state;
        let sols: Vec<SpectralField> = [0.1, 0.05, 0.025, 0.0125].iter().map(|&h| run(h)).collect();
        let reference = sols[3].scale(16.0 / 15.0).sub(&sols[2].scale(1.0 / 15.0));
        let errs: Vec<f64> = sols[..3].iter().map(|s| s.sub(&reference).l2_norm()).collect();
        for w in errs.windows(2) {
            let rate = (w[0] / w[1]).log2();
            assert!((rate - 4.0).abs() < 1.0, "{errs:?}");
        }
    }

    #[test]
    fn conservation_short_run() {
        let cfg = SolveConfig { t_final: 0.5, alpha: 0.5, ..small_cfg() };
        let u0 = gaussian_data(cfg.grid().unwrap(), 0.05);
        let r = solve(&u0, &cfg).unwrap();
        let (m, l, e) = r.drifts();
        assert!(m < 1e-12 && l < 1e-8 && e < 1e-6, "{m} {l} {e}");
    }

    #[test]
    fn config_validation() {
        assert!(SolveConfig { alpha: 1.5, ..Default::default() }.validate().is_err());
        assert!(SolveConfig { alpha: 0.0, ..Default::default() }.validate().is_err());
        assert!(SolveConfig { epsilon: 0.0, ..Default::default() }.validate().is_err());
        assert!(SolveConfig { n_x: 1000, ..Default::default() }.validate().is_err());
        assert!(SolveConfig::default().validate().is_ok());
        let c = SolveConfig { r: 2.0, epsilon: 0.05, ..Default::default() };
        assert_relative_eq!(c.b(), 0.55);
        assert_relative_eq!(c.b_prime(), -0.4);
    }

    #[test]
    fn picard_zero_data() {
        let cfg = small_cfg();
        let z = SpectralField::zeros(cfg.grid().unwrap());
        let r = picard_iterate(&z, &cfg).unwrap();
        assert!(r.converged);
        assert_eq!(r.differences.len(), 1);
        assert!(r.contraction_factors.is_empty());
    }

    #[test]
    fn picard_first_iterate_is_cutoff_free_wave() {
        let cfg = SolveConfig { t_final: 0.25, max_picard_iters: 2, ..small_cfg() };
        let u0 = gaussian_data(cfg.grid().unwrap(), 0.01);
        let r = picard_iterate(&u0, &cfg).unwrap();
        let want = crate::linear_verifier::cutoff_free_wave(&u0, &r.grid, cfg.alpha);
        assert_eq!(r.iterates[0], want);
        let ts = r.grid.times();
        assert!(ts.iter().any(|&t| (t - 0.125).abs() < 1e-12));
        assert!(r.grid.t_width() >= 1.5 && r.grid.t_width() >= 2.0 * cfg.t_final);
    }

    #[test]
    fn scaling_identity_at_lambda_one() {
        let cfg = SolveConfig { t_final: 0.1, ..small_cfg() };
        let u0 = gaussian_data(cfg.grid().unwrap(), 0.1);
        let rep = scaling_check(&u0, 1.0, &cfg, ScalingExponents::symmetry(1.0)).unwrap();
        assert!(rep.discrepancy < 1e-13, "{}", rep.discrepancy);
        assert_relative_eq!(rep.critical_norm_ratio, 1.0, max_relative = 1e-13);
    }

    #[test]
    fn critical_index_matches_exponent_arithmetic() {
        let g = make_grid(16.0 * PI, 256).unwrap();
        let u0 = odd_gaussian_data(g, 1.0);
        for alpha in [0.25, 0.5, 1.0] {
            let e = ScalingExponents::symmetry(alpha);
            for lambda in [0.5, 2.0, 4.0] {
                let v = rescale_data(&u0, lambda, e.amplitude).unwrap();
                let ratio = homogeneous_sobolev(&v, e.critical_index()) / homogeneous_sobolev(&u0, e.critical_index());
                assert_relative_eq!(ratio, 1.0, max_relative = 1e-10);
                // Other indices scale by lambda^{s - s_c}.
                let s = e.critical_index() + 0.3;
                let ratio = homogeneous_sobolev(&v, s) / homogeneous_sobolev(&u0, s);
                assert_relative_eq!(ratio, lambda.powf(0.3), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn nonlinear_ratio_homogeneity_and_resolution() {
        let mk = |f: usize| SpaceTimeGrid::new(make_grid(8.0 * PI, 128 * f).unwrap(), 4.0, 64 * f).unwrap();
        let u = random_band_field(mk(1), 6, 1.5, 4).unwrap();
        let a = nonlinear_estimate_ratio(&u, 0.0, 1.9, 0.05, 1.0).unwrap();
        let v = u.map_coeffs(|_, _, c| c * 3.0);
        let b = nonlinear_estimate_ratio(&v, 0.0, 1.9, 0.05, 1.0).unwrap();
        // Quadratic numerator over quadratic denominator.
        assert_relative_eq!(a, b, max_relative = 1e-10);
        let c = nonlinear_estimate_ratio(&random_band_field(mk(2), 6, 1.5, 4).unwrap(), 0.0, 1.9, 0.05, 1.0).unwrap();
        assert!(a.is_finite() && (c / a - 1.0).abs() < 0.05, "{a} {c}");
        let z = SpaceTimeField::from_samples(mk(1), &Array2::zeros((128, 64))).unwrap();
        assert_eq!(nonlinear_estimate_ratio(&z, 0.0, 1.9, 0.05, 1.0), Err(SolverError::UndefinedRatio));
    }

    #[test]
    fn picard_matches_solver() {
        let cfg = SolveConfig { t_final: 0.5, picard_nt: 256, ..small_cfg() };
        let u0 = gaussian_data(cfg.grid().unwrap(), 0.05);
        let p = picard_iterate(&u0, &cfg).unwrap();
        assert!(p.converged && p.max_kappa() < 0.1);
        let a = p.state_at(0.25).unwrap();
        let b = solve(&u0, &SolveConfig { t_final: 0.25, ..cfg }).unwrap().final_state;
        assert!(a.sub(&b).l2_norm() < 1e-6 * b.l2_norm());
    }
}
