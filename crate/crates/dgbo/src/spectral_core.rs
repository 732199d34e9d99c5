//! Torus discretization of the line, continuum-normalized transforms and
//! Fourier multipliers.
//!
//! Coefficients are stored in FFT order: index `i` holds wavenumber
//! `k = i` for `i < n/2` and `k = i - n` otherwise, at frequency
//! `xi_k = pi * k / half_width`. Use [`Grid1D::wavenumber`] and
//! [`Grid1D::index_of`] rather than relying on the layout.
//!
//! The forward transform approximates `int e^{-ix xi} f(x) dx` on
//! `[-half_width, half_width)`, so `f_hat_k = dx * (-1)^k * DFT(f)_k`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid size {0} must be a power of two and at least 8")]
    BadSize(usize),
    #[error("half width must be positive and finite, got {0}")]
    BadHalfWidth(f64),
    #[error("length mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("symbol |xi|^{beta} is singular at xi = 0 and the field has a nonzero mean")]
    SingularSymbol { beta: f64 },
    #[error("field is not Hermitian symmetric (defect {0:e})")]
    NotReal(f64),
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Uniform periodic lattice on `[-half_width, half_width)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    half_width: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(half_width: f64, n: usize) -> Result<Self, SpectralError> {
        if n < 8 || !n.is_power_of_two() {
            return Err(SpectralError::BadSize(n));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(SpectralError::BadHalfWidth(half_width));
        }
        Ok(Self { half_width, n })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn dxi(&self) -> f64 {
        PI / self.half_width
    }

    /// Physical node `x_j = -half_width + j dx`.
    pub fn point(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Integer wavenumber stored at FFT index `i`, in `[-n/2, n/2)`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn index_of(&self, k: i64) -> Option<usize> {
        let h = self.n as i64 / 2;
        if k < -h || k >= h {
            return None;
        }
        Some(if k >= 0 { k as usize } else { (k + self.n as i64) as usize })
    }

    pub fn freq(&self, i: usize) -> f64 {
        self.wavenumber(i) as f64 * self.dxi()
    }

    /// Frequencies in storage (FFT) order.
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.freq(i)).collect()
    }

    /// Storage indices ordered by increasing frequency.
    pub fn sorted_indices(&self) -> Vec<usize> {
        let h = self.n / 2;
        (h..self.n).chain(0..h).collect()
    }

    /// Largest wavenumber kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        self.n as i64 / 3
    }

    fn sign(&self, i: usize) -> f64 {
        if self.wavenumber(i) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// In-place continuum forward transform of samples.
    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        plan(self.n, false).process(buf);
        let dx = self.dx();
        for (i, c) in buf.iter_mut().enumerate() {
            *c *= dx * self.sign(i);
        }
    }

    /// In-place continuum inverse transform of coefficients.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        let scale = 1.0 / (self.n as f64 * self.dx());
        for (i, c) in buf.iter_mut().enumerate() {
            *c *= scale * self.sign(i);
        }
        plan(self.n, true).process(buf);
    }
}

/// Builds a grid; alias of [`Grid1D::new`].
pub fn make_grid(half_width: f64, n_x: usize) -> Result<Grid1D, SpectralError> {
    Grid1D::new(half_width, n_x)
}

/// Fourier coefficients of a function on a [`Grid1D`], continuum normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: Grid1D,
    pub coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid1D) -> Self {
        Self { grid, coeffs: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_coeffs(grid: Grid1D, coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.len() {
            return Err(SpectralError::SizeMismatch { expected: grid.len(), got: coeffs.len() });
        }
        Ok(Self { grid, coeffs })
    }

    /// Coefficients from a symbol evaluated at every lattice frequency.
    pub fn from_fn(grid: Grid1D, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let coeffs = (0..grid.len()).map(|i| f(grid.freq(i))).collect();
        Self { grid, coeffs }
    }

    pub fn from_samples(grid: Grid1D, samples: &[Complex64]) -> Result<Self, SpectralError> {
        if samples.len() != grid.len() {
            return Err(SpectralError::SizeMismatch { expected: grid.len(), got: samples.len() });
        }
        let mut buf = samples.to_vec();
        grid.forward_in_place(&mut buf);
        Ok(Self { grid, coeffs: buf })
    }

    pub fn from_real(grid: Grid1D, samples: &[f64]) -> Result<Self, SpectralError> {
        let c: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_samples(grid, &c)
    }

    /// Samples `f(x_j)` of a real-space function.
    pub fn from_real_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let s: Vec<f64> = grid.points().into_iter().map(f).collect();
        Self::from_real(grid, &s).expect("sizes match by construction")
    }

    pub fn to_samples(&self) -> Vec<Complex64> {
        let mut buf = self.coeffs.clone();
        self.grid.inverse_in_place(&mut buf);
        buf
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.to_samples().into_iter().map(|c| c.re).collect()
    }

    pub fn get(&self, k: i64) -> Complex64 {
        self.grid.index_of(k).map(|i| self.coeffs[i]).unwrap_or_default()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { grid: self.grid, coeffs: self.coeffs.iter().map(|z| z * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Self { grid: self.grid, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Self { grid: self.grid, coeffs }
    }

    /// Largest `|c(-xi) - conj(c(xi))|` over paired modes, relative to the
    /// largest coefficient. The unpaired Nyquist mode must be real.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.len();
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = self.coeffs[0].im.abs();
        for i in 1..n {
            let j = n - i;
            worst = worst.max((self.coeffs[j] - self.coeffs[i].conj()).norm());
        }
        worst / scale
    }

    /// Discrete `L^2` norm of the samples, `(dx sum |u_j|^2)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let dxi = self.grid.dxi();
        (self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * dxi / (2.0 * PI)).sqrt()
    }

    pub fn mean_coeff(&self) -> Complex64 {
        self.coeffs[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Transform a buffer in either direction on `grid`.
pub fn transform(
    grid: &Grid1D,
    data: &[Complex64],
    direction: Direction,
) -> Result<Vec<Complex64>, SpectralError> {
    if data.len() != grid.len() {
        return Err(SpectralError::SizeMismatch { expected: grid.len(), got: data.len() });
    }
    let mut buf = data.to_vec();
    match direction {
        Direction::Forward => grid.forward_in_place(&mut buf),
        Direction::Inverse => grid.inverse_in_place(&mut buf),
    }
    Ok(buf)
}

/// `omega(xi) = -xi |xi|^{1+alpha}`.
pub fn dispersion_symbol(xi: f64, alpha: f64) -> f64 {
    -xi * xi.abs().powf(1.0 + alpha)
}

/// `omega'(xi) = -(2+alpha) |xi|^{1+alpha}`.
pub fn dispersion_derivative(xi: f64, alpha: f64) -> f64 {
    -(2.0 + alpha) * xi.abs().powf(1.0 + alpha)
}

/// Free evolution `W(t)`: multiplies each mode by `e^{i t omega(xi)}`.
pub fn propagate(f: &SpectralField, t: f64, alpha: f64) -> SpectralField {
    let g = f.grid;
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * Complex64::from_polar(1.0, t * dispersion_symbol(g.freq(i), alpha)))
        .collect();
    SpectralField { grid: g, coeffs }
}

pub enum Multiplier<'a> {
    /// `|xi|^beta`; for `beta < 0` the mode at zero must vanish.
    AbsDeriv(f64),
    /// `i xi`.
    DDx,
    Custom(&'a dyn Fn(f64) -> Complex64),
}

pub fn apply_multiplier(f: &SpectralField, kind: Multiplier<'_>) -> Result<SpectralField, SpectralError> {
    let g = f.grid;
    let symbol: Box<dyn Fn(f64) -> Complex64 + '_> = match kind {
        Multiplier::AbsDeriv(beta) => {
            if beta < 0.0 && f.coeffs[0].norm() != 0.0 {
                return Err(SpectralError::SingularSymbol { beta });
            }
            Box::new(move |xi: f64| {
                if xi == 0.0 {
                    Complex64::new(if beta == 0.0 { 1.0 } else { 0.0 }, 0.0)
                } else {
                    Complex64::new(xi.abs().powf(beta), 0.0)
                }
            })
        }
        Multiplier::DDx => Box::new(|xi: f64| Complex64::new(0.0, xi)),
        Multiplier::Custom(s) => Box::new(s),
    };
    let coeffs = f.coeffs.iter().enumerate().map(|(i, c)| c * symbol(g.freq(i))).collect();
    Ok(SpectralField { grid: g, coeffs })
}

/// Space-time lattice: spatial grid times a time grid on `[-t_width, t_width)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeGrid {
    pub space: Grid1D,
    pub time: Grid1D,
}

impl SpaceTimeGrid {
    pub fn new(space: Grid1D, t_width: f64, n_t: usize) -> Result<Self, SpectralError> {
        Ok(Self { space, time: Grid1D::new(t_width, n_t)? })
    }

    pub fn t_width(&self) -> f64 {
        self.time.half_width()
    }

    pub fn dt(&self) -> f64 {
        self.time.dx()
    }

    pub fn dtau(&self) -> f64 {
        self.time.dxi()
    }

    pub fn times(&self) -> Vec<f64> {
        self.time.points()
    }

    /// Dual time lattice `tau_m` in storage order.
    pub fn modulations(&self) -> Vec<f64> {
        self.time.frequencies()
    }
}

/// Which variable the second axis of a [`SpaceTimeField`] carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frame {
    /// Axis is `tau`; the modulation is `tau - omega(xi)`.
    Lab,
    /// Axis is `sigma = tau - omega(xi)` directly, obtained from the
    /// interaction-picture profile `e^{-it omega} u_hat(xi, t)`.
    Modulation { alpha: f64 },
}

/// Space-time Fourier coefficients, indexed `[xi index, tau/sigma index]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    pub grid: SpaceTimeGrid,
    pub frame: Frame,
    pub coeffs: Array2<Complex64>,
}

fn transform_axis(coeffs: &mut Array2<Complex64>, axis: usize, grid: &Grid1D, inverse: bool) {
    let mut buf = vec![Complex64::default(); grid.len()];
    for mut lane in coeffs.lanes_mut(Axis(axis)) {
        for (b, v) in buf.iter_mut().zip(lane.iter()) {
            *b = *v;
        }
        if inverse {
            grid.inverse_in_place(&mut buf);
        } else {
            grid.forward_in_place(&mut buf);
        }
        for (v, b) in lane.iter_mut().zip(buf.iter()) {
            *v = *b;
        }
    }
}

fn check_shape(grid: &SpaceTimeGrid, a: &Array2<Complex64>) -> Result<(), SpectralError> {
    let (nx, nt) = a.dim();
    if nx != grid.space.len() {
        return Err(SpectralError::SizeMismatch { expected: grid.space.len(), got: nx });
    }
    if nt != grid.time.len() {
        return Err(SpectralError::SizeMismatch { expected: grid.time.len(), got: nt });
    }
    Ok(())
}

impl SpaceTimeField {
    /// Lab-frame coefficients from samples indexed `[x_j, t_m]`.
    pub fn from_samples(grid: SpaceTimeGrid, samples: &Array2<Complex64>) -> Result<Self, SpectralError> {
        check_shape(&grid, samples)?;
        let mut c = samples.clone();
        transform_axis(&mut c, 0, &grid.space, false);
        transform_axis(&mut c, 1, &grid.time, false);
        Ok(Self { grid, frame: Frame::Lab, coeffs: c })
    }

    /// Coefficients from spatial spectra `u_hat(xi_k, t_m)` at every time node.
    pub fn from_profile(grid: SpaceTimeGrid, profile: &Array2<Complex64>, frame: Frame) -> Result<Self, SpectralError> {
        check_shape(&grid, profile)?;
        let mut c = profile.clone();
        if let Frame::Modulation { alpha } = frame {
            twist(&mut c, &grid, alpha, -1.0);
        }
        transform_axis(&mut c, 1, &grid.time, false);
        Ok(Self { grid, frame, coeffs: c })
    }

    /// Modulation-frame field from the interaction profile `e^{-it omega} u_hat(xi, t)`.
    pub fn from_interaction(grid: SpaceTimeGrid, v: &Array2<Complex64>, alpha: f64) -> Result<Self, SpectralError> {
        check_shape(&grid, v)?;
        let mut c = v.clone();
        transform_axis(&mut c, 1, &grid.time, false);
        Ok(Self { grid, frame: Frame::Modulation { alpha }, coeffs: c })
    }

    /// Interaction profile `e^{-it omega} u_hat(xi, t)` at every time node.
    pub fn to_interaction(&self, alpha: f64) -> Array2<Complex64> {
        let mut c = self.coeffs.clone();
        transform_axis(&mut c, 1, &self.grid.time, true);
        match self.frame {
            Frame::Modulation { alpha: a } if a == alpha => {}
            Frame::Modulation { alpha: a } => {
                twist(&mut c, &self.grid, a, 1.0);
                twist(&mut c, &self.grid, alpha, -1.0);
            }
            Frame::Lab => twist(&mut c, &self.grid, alpha, -1.0),
        }
        c
    }

    /// Spatial spectra at every time node (inverse of [`Self::from_profile`]).
    pub fn to_profile(&self) -> Array2<Complex64> {
        let mut c = self.coeffs.clone();
        transform_axis(&mut c, 1, &self.grid.time, true);
        if let Frame::Modulation { alpha } = self.frame {
            twist(&mut c, &self.grid, alpha, 1.0);
        }
        c
    }

    pub fn to_samples(&self) -> Array2<Complex64> {
        let mut c = self.to_profile();
        transform_axis(&mut c, 0, &self.grid.space, true);
        c
    }

    /// Modulation `tau - omega(xi)` at lattice point `(k, m)` (storage indices).
    pub fn sigma(&self, k: usize, m: usize, alpha: f64) -> f64 {
        let v = self.grid.time.freq(m);
        match self.frame {
            Frame::Lab => v - dispersion_symbol(self.grid.space.freq(k), alpha),
            Frame::Modulation { .. } => v,
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        let mut out = self.clone();
        for ((k, m), c) in out.coeffs.indexed_iter_mut() {
            *c = f(k, m, *c);
        }
        out
    }
}

/// Multiply `profile[k, m]` by `e^{sign * i t_m omega(xi_k)}`.
fn twist(c: &mut Array2<Complex64>, grid: &SpaceTimeGrid, alpha: f64, sign: f64) {
    let ts = grid.times();
    for ((k, m), v) in c.indexed_iter_mut() {
        let w = dispersion_symbol(grid.space.freq(k), alpha);
        *v *= Complex64::from_polar(1.0, sign * ts[m] * w);
    }
}

/// Samples of `W(t) phi` at all nodes of the space-time grid, indexed `[x, t]`.
pub fn free_evolution_samples(phi: &SpectralField, grid: &SpaceTimeGrid, alpha: f64) -> Array2<Complex64> {
    let ts = grid.times();
    let nx = grid.space.len();
    let mut out = Array2::<Complex64>::zeros((nx, ts.len()));
    for (m, &t) in ts.iter().enumerate() {
        let s = propagate(phi, t, alpha).to_samples();
        for j in 0..nx {
            out[[j, m]] = s[j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: Grid1D, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..grid.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    #[test]
    fn interaction_profile_round_trip() {
        let g = SpaceTimeGrid::new(make_grid(4.0, 16).unwrap(), 2.0, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = Array2::from_shape_fn((16, 8), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let a = SpaceTimeField::from_interaction(g, &v, 0.5).unwrap();
        let ts = g.times();
        let phys = Array2::from_shape_fn((16, 8), |(k, m)| v[[k, m]] * Complex64::from_polar(1.0, ts[m] * dispersion_symbol(g.space.freq(k), 0.5)));
        let b = SpaceTimeField::from_profile(g, &phys, Frame::Modulation { alpha: 0.5 }).unwrap();
        let lab = SpaceTimeField::from_profile(g, &phys, Frame::Lab).unwrap();
        for (x, y) in a.coeffs.iter().zip(b.coeffs.iter()) {
            assert!((x - y).norm() < 1e-12);
        }
        for w in [a.to_interaction(0.5), lab.to_interaction(0.5)] {
            for (x, y) in w.iter().zip(v.iter()) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn grid_lattice() {
        let g = make_grid(PI, 8).unwrap();
        assert_relative_eq!(g.dx(), PI / 4.0);
        assert_relative_eq!(g.dxi(), 1.0);
        let mut f: Vec<f64> = g.frequencies();
        f.sort_by(f64::total_cmp);
        assert_eq!(f, vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert_relative_eq!(make_grid(2.0 * PI, 8).unwrap().dxi(), 0.5);
        assert_eq!(make_grid(PI, 6), Err(SpectralError::BadSize(6)));
        assert!(make_grid(-1.0, 8).is_err());
        assert_relative_eq!(g.dx() * g.dxi() * 8.0, 2.0 * PI);
    }

    #[test]
    fn index_map_round_trip() {
        let g = make_grid(3.0, 32).unwrap();
        for i in 0..32 {
            assert_eq!(g.index_of(g.wavenumber(i)), Some(i));
        }
        assert_eq!(g.index_of(16), None);
        let s = g.sorted_indices();
        assert!(s.windows(2).all(|w| g.freq(w[0]) < g.freq(w[1])));
    }

    #[test]
    fn dc_and_cosine_pairs() {
        let g = make_grid(PI, 16).unwrap();
        let one = SpectralField::from_real_fn(g, |_| 1.0);
        assert_relative_eq!(one.get(0).re, 2.0 * PI, epsilon = 1e-12);
        assert!(one.coeffs.iter().skip(1).all(|c| c.norm() < 1e-12));

        let c = SpectralField::from_real_fn(g, f64::cos);
        assert_relative_eq!(c.get(1).re, PI, epsilon = 1e-12);
        assert_relative_eq!(c.get(-1).re, PI, epsilon = 1e-12);
        let rest: f64 = (0..16).filter(|&i| g.wavenumber(i).abs() != 1).map(|i| c.coeffs[i].norm()).sum();
        assert!(rest < 1e-12);
    }

    #[test]
    fn transform_rejects_size_mismatch() {
        let g = make_grid(PI, 8).unwrap();
        assert!(transform(&g, &[Complex64::default(); 4], Direction::Forward).is_err());
    }

    #[test]
    fn dispersion_examples() {
        assert_eq!(dispersion_symbol(2.0, 1.0), -8.0);
        for a in [0.0, 0.3, 1.0] {
            assert_relative_eq!(dispersion_symbol(-1.0, a), 1.0);
            assert_eq!(dispersion_symbol(0.0, a), 0.0);
        }
    }

    #[test]
    fn multipliers() {
        let g = make_grid(PI, 16).unwrap();
        let c = SpectralField::from_real_fn(g, f64::cos);
        let d = apply_multiplier(&c, Multiplier::DDx).unwrap().to_real();
        for (x, v) in g.points().iter().zip(d) {
            assert!((v + x.sin()).abs() < 1e-12);
        }
        let mode = SpectralField::from_fn(g, |xi| Complex64::new(if xi == 2.0 { 1.0 } else { 0.0 }, 0.0));
        let m = apply_multiplier(&mode, Multiplier::AbsDeriv(2.0)).unwrap();
        assert_relative_eq!(m.get(2).re, 4.0);
        let one = SpectralField::from_real_fn(g, |_| 1.0);
        assert!(matches!(
            apply_multiplier(&one, Multiplier::AbsDeriv(-1.0)),
            Err(SpectralError::SingularSymbol { .. })
        ));
        let sym = |xi: f64| Complex64::new(xi * xi, 0.0);
        let m2 = apply_multiplier(&mode, Multiplier::Custom(&sym)).unwrap();
        assert_relative_eq!(m2.get(2).re, 4.0);
    }

    #[test]
    fn propagate_identity_at_zero() {
        let g = make_grid(5.0, 64).unwrap();
        let f = SpectralField::from_samples(g, &random_field(g, 3)).unwrap();
        assert_eq!(propagate(&f, 0.0, 0.5), f);
    }

    #[test]
    fn space_time_round_trips() {
        let s = make_grid(4.0, 16).unwrap();
        let g = SpaceTimeGrid::new(s, 2.0, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = Array2::from_shape_fn((16, 8), |_| Complex64::new(rng.gen(), rng.gen()));
        let f = SpaceTimeField::from_samples(g, &a).unwrap();
        let back = f.to_samples();
        for (x, y) in a.iter().zip(back.iter()) {
            assert!((x - y).norm() < 1e-12);
        }
        let m = SpaceTimeField::from_profile(g, &a, Frame::Modulation { alpha: 0.5 }).unwrap();
        for (x, y) in a.iter().zip(m.to_profile().iter()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn round_trip(log_n in 3u32..12, hw in 0.5f64..200.0, seed in any::<u64>()) {
            let g = make_grid(hw, 1 << log_n).unwrap();
            let x = random_field(g, seed);
            let y = transform(&g, &transform(&g, &x, Direction::Forward).unwrap(), Direction::Inverse).unwrap();
            let num: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let den: f64 = x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(num / den < 1e-12);
            let f = SpectralField::from_samples(g, &x).unwrap();
            let z = transform(&g, &f.to_samples(), Direction::Forward).unwrap();
            let num: f64 = f.coeffs.iter().zip(&z).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let den: f64 = f.coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(num / den < 1e-12);
        }

        #[test]
        fn parseval(log_n in 3u32..11, hw in 0.5f64..100.0, seed in any::<u64>()) {
            let g = make_grid(hw, 1 << log_n).unwrap();
            let x = random_field(g, seed);
            let f = SpectralField::from_samples(g, &x).unwrap();
            let lhs: f64 = g.dx() * x.iter().map(|c| c.norm_sqr()).sum::<f64>();
            let rhs: f64 = g.dxi() / (2.0 * PI) * f.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>();
            prop_assert!((lhs - rhs).abs() / lhs < 1e-10);
        }

        #[test]
        fn propagate_unitary_and_group(t1 in -5.0f64..5.0, t2 in -5.0f64..5.0, alpha in 0.0f64..=1.0, seed in any::<u64>()) {
            let g = make_grid(8.0, 64).unwrap();
            let f = SpectralField::from_samples(g, &random_field(g, seed)).unwrap();
            let p = propagate(&f, t1, alpha);
            for (a, b) in f.coeffs.iter().zip(&p.coeffs) {
                prop_assert!((a.norm() - b.norm()).abs() <= 1e-14 * a.norm().max(1.0));
            }
            prop_assert!((p.l2_norm() - f.l2_norm()).abs() < 1e-13 * f.l2_norm());
            let two = propagate(&p, t2, alpha);
            let one = propagate(&f, t1 + t2, alpha);
            let err: f64 = two.coeffs.iter().zip(&one.coeffs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let den: f64 = f.coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(err / den < 1e-12);
        }

        #[test]
        fn dispersion_odd_and_decreasing(alpha in 0.0f64..=1.0, log_n in 3u32..10) {
            let g = make_grid(10.0, 1 << log_n).unwrap();
            let idx = g.sorted_indices();
            let w: Vec<f64> = idx.iter().map(|&i| dispersion_symbol(g.freq(i), alpha)).collect();
            prop_assert!(w.windows(2).all(|p| p[1] < p[0]));
            for &i in &idx {
                let xi = g.freq(i);
                prop_assert_eq!(dispersion_symbol(-xi, alpha), -dispersion_symbol(xi, alpha));
                prop_assert!(dispersion_derivative(xi, alpha) <= 0.0);
            }
        }
    }
}
