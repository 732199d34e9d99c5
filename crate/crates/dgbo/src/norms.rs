//! Discrete Fourier-Lebesgue, Bourgain, mixed Lebesgue and local-smoothing
//! norms. Every sum carries its quadrature weight (`dxi`, `dtau`, `dx`, `dt`).

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

use crate::spectral_core::{SpaceTimeField, SpaceTimeGrid, SpectralField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("Fourier-Lebesgue index r must lie in (1, inf), got {0}")]
    BadIndex(f64),
    #[error("homogeneous weight |xi|^{0} is singular at xi = 0 and the field has a nonzero mean")]
    SingularWeight(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormParams {
    pub s: f64,
    pub b: f64,
    pub r: f64,
    pub alpha: f64,
}

impl NormParams {
    pub fn new(s: f64, b: f64, r: f64, alpha: f64) -> Result<Self, NormError> {
        if !(r > 1.0 && r.is_finite()) {
            return Err(NormError::BadIndex(r));
        }
        Ok(Self { s, b, r, alpha })
    }

    pub fn r_conj(&self) -> f64 {
        conjugate(self.r)
    }
}

/// Hoelder conjugate `r / (r - 1)`.
pub fn conjugate(r: f64) -> f64 {
    r / (r - 1.0)
}

/// Japanese bracket `(1 + x^2)^{1/2}`.
pub fn bracket(x: f64) -> f64 {
    x.hypot(1.0)
}

/// `(weight * sum |v|^p)^{1/p}`; `p = inf` gives the max.
pub fn weighted_lp(values: impl Iterator<Item = f64>, p: f64, weight: f64) -> f64 {
    if p.is_infinite() {
        return values.fold(0.0, |m, v| m.max(v.abs()));
    }
    let mut vals: Vec<f64> = values.map(f64::abs).collect();
    let m = vals.iter().cloned().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    for v in &mut vals {
        *v /= m;
    }
    m * (weight * vals.iter().map(|v| v.powf(p)).sum::<f64>()).powf(1.0 / p)
}

/// `|| w(xi)^s f_hat ||_{L^{r'}_xi}` with `w = <xi>` or `|xi|`.
pub fn fl_norm(f: &SpectralField, p: &NormParams, homogeneous: bool) -> Result<f64, NormError> {
    let g = f.grid;
    if homogeneous && p.s < 0.0 && f.coeffs[0].norm() != 0.0 {
        return Err(NormError::SingularWeight(p.s));
    }
    let vals = f.coeffs.iter().enumerate().map(|(i, c)| {
        let xi = g.freq(i);
        let w = if homogeneous {
            if xi == 0.0 {
                if p.s == 0.0 { 1.0 } else { 0.0 }
            } else {
                xi.abs().powf(p.s)
            }
        } else {
            bracket(xi).powf(p.s)
        };
        w * c.norm()
    });
    Ok(weighted_lp(vals, p.r_conj(), g.dxi()))
}

/// `|| <xi>^s <sigma>^b u_hat ||_{L^{r'}_{xi,tau}}`; the modulation is read
/// from the field's frame.
pub fn xsb_norm(u: &SpaceTimeField, p: &NormParams) -> f64 {
    let gs = u.grid.space;
    let vals = u.coeffs.indexed_iter().map(|((k, m), c)| {
        bracket(gs.freq(k)).powf(p.s) * bracket(u.sigma(k, m, p.alpha)).powf(p.b) * c.norm()
    });
    weighted_lp(vals, p.r_conj(), gs.dxi() * u.grid.dtau())
}

/// `L^q_t L^p_x` norm of samples indexed `[x, t]`.
pub fn mixed_norm(u: &Array2<Complex64>, grid: &SpaceTimeGrid, q: f64, p: f64) -> f64 {
    let dx = grid.space.dx();
    let slices = u.columns().into_iter().map(|col| weighted_lp(col.iter().map(|c| c.norm()), p, dx)).collect::<Vec<_>>();
    weighted_lp(slices.into_iter(), q, grid.dt())
}

/// Per-node values `|| F_t u(x_j, .) ||_{L^{r'}_tau}` for samples `[x, t]`.
pub fn smoothing_profile(u: &Array2<Complex64>, grid: &SpaceTimeGrid, r: f64) -> Vec<f64> {
    let tg = grid.time;
    let rc = conjugate(r);
    let mut buf = vec![Complex64::default(); tg.len()];
    u.rows()
        .into_iter()
        .map(|row| {
            for (b, v) in buf.iter_mut().zip(row.iter()) {
                *b = *v;
            }
            tg.forward_in_place(&mut buf);
            weighted_lp(buf.iter().map(|c| c.norm()), rc, tg.dxi())
        })
        .collect()
}

/// `L^inf_x L^r-hat_t`: the largest entry of [`smoothing_profile`].
pub fn smoothing_norm(u: &Array2<Complex64>, grid: &SpaceTimeGrid, r: f64) -> f64 {
    smoothing_profile(u, grid, r).into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::{free_evolution_samples, make_grid, Frame};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_spectral(seed: u64) -> SpectralField {
        let g = make_grid(6.0, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s: Vec<Complex64> = (0..64).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        SpectralField::from_samples(g, &s).unwrap()
    }

    fn params(s: f64, r: f64) -> NormParams {
        NormParams::new(s, 0.0, r, 0.5).unwrap()
    }

    #[test]
    fn fl_single_mode_and_two_modes() {
        let g = make_grid(3.0, 32).unwrap();
        let f = SpectralField::from_fn(g, |xi| Complex64::new(if xi == 0.0 { 1.0 } else { 0.0 }, 0.0));
        for (s, r) in [(0.0, 2.0), (1.5, 1.3), (-2.0, 4.0)] {
            let p = params(s, r);
            assert_relative_eq!(fl_norm(&f, &p, false).unwrap(), g.dxi().powf(1.0 / p.r_conj()), max_relative = 1e-14);
        }
        // Grid with sqrt(3) on the lattice; r' -> 1 through a huge r.
        let g = make_grid(PI / 3f64.sqrt(), 16).unwrap();
        let mut h = SpectralField::zeros(g);
        h.coeffs[g.index_of(0).unwrap()] = Complex64::new(1.0, 0.0);
        h.coeffs[g.index_of(1).unwrap()] = Complex64::new(1.0, 0.0);
        let p = NormParams::new(1.0, 0.0, 1e13, 0.0).unwrap();
        assert_relative_eq!(fl_norm(&h, &p, false).unwrap(), 3.0 * g.dxi(), max_relative = 1e-9);
    }

    #[test]
    fn fl_parseval_at_r_two() {
        for seed in 0..10 {
            let f = random_spectral(seed);
            let l2 = (f.grid.dx() * f.to_samples().iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt();
            let v = fl_norm(&f, &params(0.0, 2.0), false).unwrap();
            assert_relative_eq!(v, (2.0 * PI).sqrt() * l2, max_relative = 1e-10);
        }
    }

    #[test]
    fn homogeneous_rejects_mean() {
        let f = random_spectral(1);
        assert!(matches!(fl_norm(&f, &params(-0.5, 1.5), true), Err(NormError::SingularWeight(_))));
        assert!(NormParams::new(0.0, 0.0, 1.0, 0.5).is_err());
    }

    fn st_grid() -> SpaceTimeGrid {
        SpaceTimeGrid::new(make_grid(4.0, 16).unwrap(), 3.0, 16).unwrap()
    }

    fn random_st(seed: u64) -> Array2<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((16, 16), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn xsb_parseval_and_collapse() {
        let g = st_grid();
        let a = random_st(4);
        let u = SpaceTimeField::from_samples(g, &a).unwrap();
        let l2 = (g.space.dx() * g.dt() * a.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt();
        let p = NormParams::new(0.0, 0.0, 2.0, 1.0).unwrap();
        assert_relative_eq!(xsb_norm(&u, &p), 2.0 * PI * l2, max_relative = 1e-10);
        let p = NormParams::new(0.0, 0.0, 1.4, 1.0).unwrap();
        let joint = weighted_lp(u.coeffs.iter().map(|c| c.norm()), p.r_conj(), g.space.dxi() * g.dtau());
        assert_relative_eq!(xsb_norm(&u, &p), joint, max_relative = 1e-14);
    }

    #[test]
    fn xsb_single_mode() {
        let g = st_grid();
        let (k, m) = (3usize, 5usize);
        let mut c = Array2::<Complex64>::zeros((16, 16));
        c[[k, m]] = Complex64::new(1.0, 0.0);
        let u = SpaceTimeField { grid: g, frame: Frame::Lab, coeffs: c };
        let p = NormParams::new(0.7, 0.6, 1.5, 0.5).unwrap();
        let xi = g.space.freq(k);
        let tau = g.time.freq(m);
        let sig = tau - crate::spectral_core::dispersion_symbol(xi, 0.5);
        let want = bracket(xi).powf(0.7) * bracket(sig).powf(0.6) * (g.space.dxi() * g.dtau()).powf(1.0 / p.r_conj());
        assert_relative_eq!(xsb_norm(&u, &p), want, max_relative = 1e-13);
    }

    #[test]
    fn xsb_zero_modulation_in_modulation_frame() {
        let g = st_grid();
        let mut c = Array2::<Complex64>::zeros((16, 16));
        for k in 0..16 {
            c[[k, 0]] = Complex64::new(1.0 + k as f64, 0.0);
        }
        let u = SpaceTimeField { grid: g, frame: Frame::Modulation { alpha: 0.5 }, coeffs: c };
        let p0 = NormParams::new(0.0, 0.0, 1.7, 0.5).unwrap();
        let p1 = NormParams::new(0.0, 3.0, 1.7, 0.5).unwrap();
        assert_relative_eq!(xsb_norm(&u, &p0), xsb_norm(&u, &p1), max_relative = 1e-15);
    }

    #[test]
    fn mixed_norm_constants_and_point_mass() {
        let g = st_grid();
        let one = Array2::from_elem((16, 16), Complex64::new(1.0, 0.0));
        let (tl, xl) = (2.0 * g.t_width(), 2.0 * g.space.half_width());
        for (q, p) in [(2.0, 3.0), (6.0, 6.0), (f64::INFINITY, 2.0), (1.0, f64::INFINITY)] {
            let want = if q.is_infinite() { 1.0 } else { tl.powf(1.0 / q) } * if p.is_infinite() { 1.0 } else { xl.powf(1.0 / p) };
            assert_relative_eq!(mixed_norm(&one, &g, q, p), want, max_relative = 1e-13);
        }
        let mut pt = Array2::<Complex64>::zeros((16, 16));
        pt[[2, 7]] = Complex64::new(-3.0, 0.0);
        let want = g.dt().powf(1.0 / 4.0) * g.space.dx().powf(1.0 / 3.0) * 3.0;
        assert_relative_eq!(mixed_norm(&pt, &g, 4.0, 3.0), want, max_relative = 1e-13);
    }

    #[test]
    fn mixed_norm_of_free_wave_is_l2_of_data() {
        let phi = random_spectral(2);
        let g = SpaceTimeGrid::new(phi.grid, 2.0, 16).unwrap();
        let u = free_evolution_samples(&phi, &g, 0.8);
        let want = fl_norm(&phi, &params(0.0, 2.0), false).unwrap() / (2.0 * PI).sqrt();
        for col in u.columns() {
            let v = weighted_lp(col.iter().map(|c| c.norm()), 2.0, g.space.dx());
            assert_relative_eq!(v, want, max_relative = 1e-12);
        }
        assert_relative_eq!(mixed_norm(&u, &g, f64::INFINITY, 2.0), want, max_relative = 1e-12);
    }

    #[test]
    fn smoothing_norm_x_independent_and_zero() {
        let g = st_grid();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gt: Vec<Complex64> = (0..16).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
        let u = Array2::from_shape_fn((16, 16), |(_, m)| gt[m]);
        let tf = SpectralField::from_samples(g.time, &gt).unwrap();
        let r = 1.6;
        let want = fl_norm(&tf, &NormParams::new(0.0, 0.0, r, 0.0).unwrap(), false).unwrap();
        assert_relative_eq!(smoothing_norm(&u, &g, r), want, max_relative = 1e-13);
        assert_eq!(smoothing_norm(&Array2::zeros((16, 16)), &g, r), 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn homogeneity_and_triangle(s1 in 0u64..1000, s2 in 0u64..1000, c in -5.0f64..5.0, s in -2.0f64..2.0, r in 1.05f64..4.0) {
            let f = random_spectral(s1);
            let h = random_spectral(s2);
            let p = params(s, r);
            let nf = fl_norm(&f, &p, false).unwrap();
            prop_assert!((fl_norm(&f.scale(c), &p, false).unwrap() - c.abs() * nf).abs() <= 1e-12 * nf);
            prop_assert!(fl_norm(&f.add(&h), &p, false).unwrap() <= nf + fl_norm(&h, &p, false).unwrap() * (1.0 + 1e-12));

            let g = st_grid();
            let a = SpaceTimeField::from_samples(g, &random_st(s1)).unwrap();
            let b = SpaceTimeField::from_samples(g, &random_st(s2)).unwrap();
            let q = NormParams::new(s, 0.6, r, 0.5).unwrap();
            let na = xsb_norm(&a, &q);
            let sum = SpaceTimeField { coeffs: &a.coeffs + &b.coeffs, ..a.clone() };
            prop_assert!(xsb_norm(&sum, &q) <= (na + xsb_norm(&b, &q)) * (1.0 + 1e-12));
            let sc = a.map_coeffs(|_, _, z| z * c);
            prop_assert!((xsb_norm(&sc, &q) - c.abs() * na).abs() <= 1e-12 * na);

            let sa = random_st(s1);
            let sb = random_st(s2);
            for (qq, pp) in [(2.0, 2.0), (6.0, 3.0), (f64::INFINITY, 2.0)] {
                let m = mixed_norm(&sa, &g, qq, pp);
                prop_assert!((mixed_norm(&sa.mapv(|z| z * c), &g, qq, pp) - c.abs() * m).abs() <= 1e-12 * m);
                prop_assert!(mixed_norm(&(&sa + &sb), &g, qq, pp) <= (m + mixed_norm(&sb, &g, qq, pp)) * (1.0 + 1e-12));
            }
            let sm = smoothing_norm(&sa, &g, r);
            prop_assert!((smoothing_norm(&sa.mapv(|z| z * c), &g, r) - c.abs() * sm).abs() <= 1e-12 * sm);
            prop_assert!(smoothing_norm(&(&sa + &sb), &g, r) <= (sm + smoothing_norm(&sb, &g, r)) * (1.0 + 1e-12));
        }

        #[test]
        fn fl_monotone_in_s(seed in 0u64..1000, s1 in -3.0f64..3.0, ds in 0.0f64..3.0, r in 1.05f64..4.0) {
            let f = random_spectral(seed);
            let a = fl_norm(&f, &params(s1, r), false).unwrap();
            let b = fl_norm(&f, &params(s1 + ds, r), false).unwrap();
            prop_assert!(a <= b * (1.0 + 1e-13));
        }
    }
}
