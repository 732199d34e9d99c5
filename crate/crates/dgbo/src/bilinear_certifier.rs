//! Trilinear functional `J(f1, f2, f)` on dyadic blocks and numerical
//! certification of the dyadic block bounds.
//!
//! Test functions are nonnegative and piecewise constant on cells of the
//! `(xi, sigma)` block. `J` is evaluated in two layers:
//!
//! * the `sigma` integrals are exact: for fixed frequencies the inner
//!   integral is a spline in `w = Omega(xi1, xi2)` built from the double
//!   antiderivative of `f1 * f2` in `sigma`;
//! * the frequency integrals use the pushforward of Lebesgue measure on each
//!   cell triple under `Omega`, accumulated into `w`-bins with Gauss nodes in
//!   `xi1` and exact monotone inversion in `xi2`.
//!
//! The pushforward does not depend on the cell values, so a [`JPlan`] is
//! built once per dyadic tuple and reused across random trials.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::DyadicIndex;
use crate::norms::{bracket, conjugate};
use crate::resonance::{resonance, CaseKind, InteractionCase};
use crate::spectral_core::dispersion_derivative;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("block cannot be resolved: {0}")]
    Unresolved(String),
    #[error("hypothesis of {lemma} violated: {reason}")]
    Hypothesis { lemma: String, reason: String },
    #[error("unknown lemma {0:?}")]
    UnknownLemma(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("test function values must be nonnegative and finite")]
    BadValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConstraint {
    Any,
    Positive,
    Negative,
}

/// `D_{N,L} = {|xi| ~ N, |sigma| ~ L}` with `|x| ~ M` meaning `M/2 < |x| <= 2M`,
/// and the full ball `|x| <= 2` when `M = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicBlock {
    pub n: DyadicIndex,
    pub l: DyadicIndex,
    pub sign: SignConstraint,
}

fn radial(m: DyadicIndex) -> (f64, f64) {
    if m.value() == 1 {
        (0.0, 2.0)
    } else {
        (m.get() / 2.0, 2.0 * m.get())
    }
}

fn sided(range: (f64, f64), sign: SignConstraint) -> Vec<(f64, f64)> {
    let (lo, hi) = range;
    match sign {
        SignConstraint::Positive => vec![(lo, hi)],
        SignConstraint::Negative => vec![(-hi, -lo)],
        SignConstraint::Any => vec![(-hi, -lo), (lo, hi)],
    }
}

fn split(pieces: &[(f64, f64)], cells: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(pieces.len() * cells);
    for &(a, b) in pieces {
        let h = (b - a) / cells as f64;
        for i in 0..cells {
            let lo = a + h * i as f64;
            let hi = if i + 1 == cells { b } else { a + h * (i + 1) as f64 };
            out.push((lo, hi));
        }
    }
    out
}

impl DyadicBlock {
    pub fn new(n: DyadicIndex, l: DyadicIndex, sign: SignConstraint) -> Self {
        Self { n, l, sign }
    }

    pub fn xi_intervals(&self) -> Vec<(f64, f64)> {
        sided(radial(self.n), self.sign)
    }

    pub fn sigma_intervals(&self) -> Vec<(f64, f64)> {
        sided(radial(self.l), SignConstraint::Any)
    }

    pub fn contains(&self, xi: f64, sigma: f64) -> bool {
        let inside = |v: f64, iv: &[(f64, f64)]| iv.iter().any(|&(a, b)| v >= a && v <= b);
        inside(xi, &self.xi_intervals()) && inside(sigma, &self.sigma_intervals())
    }
}

/// Cells per dyadic octave along each axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub xi: usize,
    pub sigma: usize,
}

impl Resolution {
    pub const MIN: usize = 4;

    pub fn uniform(per_octave: usize) -> Self {
        Self { xi: per_octave, sigma: per_octave }
    }
}

impl Default for Resolution {
    fn default() -> Self {
        Self::uniform(Self::MIN)
    }
}

/// Nonnegative function, constant on each `(xi cell) x (sigma cell)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockFunction {
    pub block: DyadicBlock,
    pub xi_cells: Vec<(f64, f64)>,
    pub sigma_cells: Vec<(f64, f64)>,
    /// Indexed `[xi cell, sigma cell]`.
    pub values: Array2<f64>,
}

fn layout(block: DyadicBlock, res: Resolution) -> Result<(Vec<(f64, f64)>, Vec<(f64, f64)>), CertifyError> {
    if res.xi < Resolution::MIN || res.sigma < Resolution::MIN {
        return Err(CertifyError::Unresolved(format!(
            "need at least {} cells per octave, got ({}, {})",
            Resolution::MIN,
            res.xi,
            res.sigma
        )));
    }
    // Each side of the annulus spans two octaves.
    Ok((split(&block.xi_intervals(), 2 * res.xi), split(&block.sigma_intervals(), 2 * res.sigma)))
}

/// `|z|` for a standard complex Gaussian `z`, one draw per cell.
pub fn make_test_function(block: DyadicBlock, res: Resolution, seed: u64) -> Result<BlockFunction, CertifyError> {
    let (xc, sc) = layout(block, res)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = Array2::from_shape_fn((xc.len(), sc.len()), |_| {
        let a: f64 = StandardNormal.sample(&mut rng);
        let b: f64 = StandardNormal.sample(&mut rng);
        a.hypot(b)
    });
    Ok(BlockFunction { block, xi_cells: xc, sigma_cells: sc, values })
}

impl BlockFunction {
    /// Cell values taken from `f` at cell midpoints.
    pub fn from_fn(block: DyadicBlock, res: Resolution, f: impl Fn(f64, f64) -> f64) -> Result<Self, CertifyError> {
        let (xc, sc) = layout(block, res)?;
        let values = Array2::from_shape_fn((xc.len(), sc.len()), |(i, j)| {
            f(0.5 * (xc[i].0 + xc[i].1), 0.5 * (sc[j].0 + sc[j].1))
        });
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(CertifyError::BadValue);
        }
        Ok(Self { block, xi_cells: xc, sigma_cells: sc, values })
    }

    pub fn ones(block: DyadicBlock, res: Resolution) -> Result<Self, CertifyError> {
        Self::from_fn(block, res, |_, _| 1.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { values: self.values.mapv(|v| v * c), ..self.clone() }
    }

    pub fn value_at(&self, xi: f64, sigma: f64) -> f64 {
        let find = |v: f64, cells: &[(f64, f64)]| cells.iter().position(|&(a, b)| v >= a && v < b);
        match (find(xi, &self.xi_cells), find(sigma, &self.sigma_cells)) {
            (Some(i), Some(j)) => self.values[[i, j]],
            _ => 0.0,
        }
    }

    /// `||f||_{L^p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let mut acc = 0.0;
        for ((i, j), v) in self.values.indexed_iter() {
            let area = (self.xi_cells[i].1 - self.xi_cells[i].0) * (self.sigma_cells[j].1 - self.sigma_cells[j].0);
            acc += v.powf(p) * area;
        }
        acc.powf(1.0 / p)
    }

    /// `||<sigma>^b f||_{L^p}`.
    pub fn weighted_norm(&self, b: f64, p: f64) -> f64 {
        let (nodes, weights) = gauss_legendre(8);
        let cell_weights: Vec<f64> = self
            .sigma_cells
            .iter()
            .map(|&(lo, hi)| {
                let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                nodes.iter().zip(&weights).map(|(x, w)| w * h * bracket(c + h * x).powf(b * p)).sum()
            })
            .collect();
        let mut acc = 0.0;
        for ((i, j), v) in self.values.indexed_iter() {
            acc += v.powf(p) * (self.xi_cells[i].1 - self.xi_cells[i].0) * cell_weights[j];
        }
        acc.powf(1.0 / p)
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Quadrature controls for [`JPlan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JOptions {
    /// Bins for the pushforward of frequency measure under `Omega`.
    pub bins: usize,
    /// Panels per `xi1` cell.
    pub panels: usize,
    /// Gauss nodes per panel.
    pub gauss: usize,
}

impl Default for JOptions {
    fn default() -> Self {
        Self { bins: 48, panels: 6, gauss: 4 }
    }
}

const CANCELLATION: f64 = 1e-11;

/// Precomputed frequency pushforward for one triple of block layouts.
#[derive(Debug, Clone)]
pub struct JPlan {
    shape: [usize; 3],
    w0: f64,
    dw: f64,
    bins: usize,
    mass: Vec<f64>,
    /// `(c1, c2) -> [(c3, first bin, last bin)]` with nonzero mass.
    active: Vec<((usize, usize), Vec<(usize, usize, usize)>)>,
}

struct Piece {
    cells: (usize, usize, usize),
    xi1: f64,
    weight: f64,
    p: f64,
    q: f64,
    wp: f64,
    wq: f64,
}

fn hull(cells: &[(f64, f64)]) -> (f64, f64) {
    cells.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(a, b)| (lo.min(a), hi.max(b)))
}

/// Solves `Omega(xi1, x) = e` for `x` in `[p, q]` where `Omega` is monotone
/// with end values `wp`, `wq`.
fn invert(xi1: f64, alpha: f64, p: f64, q: f64, wp: f64, wq: f64, e: f64) -> f64 {
    let inc = wq > wp;
    let (mut a, mut b) = (p, q);
    let mut x = p + (q - p) * ((e - wp) / (wq - wp)).clamp(0.0, 1.0);
    for _ in 0..80 {
        let f = resonance(xi1, x, alpha) - e;
        if f == 0.0 {
            return x;
        }
        if (f > 0.0) == inc {
            b = x;
        } else {
            a = x;
        }
        if b - a <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        let d = dispersion_derivative(x, alpha) - dispersion_derivative(xi1 + x, alpha);
        let newton = x - f / d;
        x = if d != 0.0 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
    }
    x
}

impl JPlan {
    pub fn new(f1: &BlockFunction, f2: &BlockFunction, f: &BlockFunction, alpha: f64, opts: JOptions) -> Self {
        let shape = [f1.xi_cells.len(), f2.xi_cells.len(), f.xi_cells.len()];
        let (s1, s2, s3) = (hull(&f1.sigma_cells), hull(&f2.sigma_cells), hull(&f.sigma_cells));
        // w = sigma - sigma1 - sigma2 must land in this window for a nonzero integrand.
        let (wl, wh) = (s3.0 - s1.1 - s2.1, s3.1 - s1.0 - s2.0);
        let (nodes, weights) = gauss_legendre(opts.gauss.max(1));
        let mut pieces = Vec::new();
        let (mut om_lo, mut om_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (c1, &(a1, b1)) in f1.xi_cells.iter().enumerate() {
            let h = (b1 - a1) / opts.panels.max(1) as f64;
            for pnl in 0..opts.panels.max(1) {
                let mid = a1 + h * (pnl as f64 + 0.5);
                for (x, wt) in nodes.iter().zip(&weights) {
                    let xi1 = mid + 0.5 * h * x;
                    let weight = 0.5 * h * wt;
                    for (c2, &(a2, b2)) in f2.xi_cells.iter().enumerate() {
                        for (c3, &(a3, b3)) in f.xi_cells.iter().enumerate() {
                            let (p, q) = (a2.max(a3 - xi1), b2.min(b3 - xi1));
                            if q <= p {
                                continue;
                            }
                            let stat = -0.5 * xi1;
                            let mut cuts = vec![p];
                            if stat > p && stat < q {
                                cuts.push(stat);
                            }
                            cuts.push(q);
                            for s in cuts.windows(2) {
                                let (wp, wq) = (resonance(xi1, s[0], alpha), resonance(xi1, s[1], alpha));
                                let (lo, hi) = (wp.min(wq), wp.max(wq));
                                if hi < wl || lo > wh {
                                    continue;
                                }
                                om_lo = om_lo.min(lo);
                                om_hi = om_hi.max(hi);
                                pieces.push(Piece { cells: (c1, c2, c3), xi1, weight, p: s[0], q: s[1], wp, wq });
                            }
                        }
                    }
                }
            }
        }
        let bins = opts.bins.max(1);
        let (w0, w1) = (wl.max(om_lo), wh.min(om_hi));
        let mut plan = JPlan { shape, w0, dw: 0.0, bins, mass: vec![], active: vec![] };
        if !(w1 > w0) {
            return plan;
        }
        let dw = (w1 - w0) / bins as f64;
        plan.dw = dw;
        let mut mass = vec![0.0; shape[0] * shape[1] * shape[2] * bins];
        let edge = |k: usize| if k == bins { w1 } else { w0 + dw * k as f64 };
        for pc in &pieces {
            let (lo, hi) = (pc.wp.min(pc.wq), pc.wp.max(pc.wq));
            if hi <= w0 || lo >= w1 {
                continue;
            }
            let k_lo = (((lo - w0) / dw).floor().max(0.0) as usize).min(bins - 1);
            let k_hi = (((hi - w0) / dw).ceil().max(1.0) as usize).min(bins);
            let len = pc.q - pc.p;
            let inc = pc.wq > pc.wp;
            let cdf = |e: f64| -> f64 {
                if e <= lo {
                    0.0
                } else if e >= hi {
                    len
                } else {
                    let x = invert(pc.xi1, alpha, pc.p, pc.q, pc.wp, pc.wq, e);
                    if inc {
                        x - pc.p
                    } else {
                        pc.q - x
                    }
                }
            };
            let (c1, c2, c3) = pc.cells;
            let base = ((c1 * shape[1] + c2) * shape[2] + c3) * bins;
            let mut prev = cdf(edge(k_lo));
            for k in k_lo..k_hi {
                let next = cdf(edge(k + 1));
                mass[base + k] += pc.weight * (next - prev).max(0.0);
                prev = next;
            }
        }
        let mut active = Vec::new();
        for c1 in 0..shape[0] {
            for c2 in 0..shape[1] {
                let mut list = Vec::new();
                for c3 in 0..shape[2] {
                    let base = ((c1 * shape[1] + c2) * shape[2] + c3) * bins;
                    let nz: Vec<usize> = (0..bins).filter(|&b| mass[base + b] > 0.0).collect();
                    if let (Some(&a), Some(&b)) = (nz.first(), nz.last()) {
                        list.push((c3, a, b));
                    }
                }
                if !list.is_empty() {
                    active.push(((c1, c2), list));
                }
            }
        }
        plan.mass = mass;
        plan.active = active;
        plan
    }

    /// True when no frequency configuration can reach the modulation window.
    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn evaluate(&self, f1: &BlockFunction, f2: &BlockFunction, f: &BlockFunction) -> f64 {
        assert_eq!(
            [f1.xi_cells.len(), f2.xi_cells.len(), f.xi_cells.len()],
            self.shape,
            "functions do not match the plan layout"
        );
        if self.is_empty() {
            return 0.0;
        }
        let bins = self.bins;
        let edges: Vec<f64> = (0..=bins).map(|k| self.w0 + self.dw * k as f64).collect();
        // Distinct sigma edges of f with per-cell indices.
        let mut e3: Vec<f64> = f.sigma_cells.iter().flat_map(|&(a, b)| [a, b]).collect();
        e3.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        e3.dedup();
        let idx = |v: f64| e3.iter().position(|&e| e == v).expect("edge present");
        let cell_idx: Vec<(usize, usize)> = f.sigma_cells.iter().map(|&(a, b)| (idx(a), idx(b))).collect();
        let knots = SigmaKnots::new(&f1.sigma_cells, &f2.sigma_cells);
        let mut total = 0.0;
        for ((c1, c2), list) in &self.active {
            let (v1, v2) = (f1.values.row(*c1).to_vec(), f2.values.row(*c2).to_vec());
            let g = SigmaConvolution::build(&knots, &v1, &v2);
            if g.is_zero() {
                continue;
            }
            let k_min = list.iter().map(|t| t.1).min().unwrap_or(0);
            let k_max = list.iter().map(|t| t.2).max().unwrap_or(0) + 1;
            let width = k_max - k_min + 1;
            let mut tab = vec![0.0; e3.len() * width];
            for (j, &e) in e3.iter().enumerate() {
                for k in k_min..=k_max {
                    tab[j * width + (k - k_min)] = g.gamma(e - edges[k]);
                }
            }
            for &(c3, b_lo, b_hi) in list {
                let base = ((c1 * self.shape[1] + c2) * self.shape[2] + c3) * bins;
                let row = f.values.row(c3);
                for b in b_lo..=b_hi {
                    let m = self.mass[base + b];
                    if m == 0.0 {
                        continue;
                    }
                    let (ka, kb) = (b - k_min, b + 1 - k_min);
                    let (mut integral, mut scale) = (0.0, 0.0);
                    for (s, &(lo, hi)) in cell_idx.iter().enumerate() {
                        let v = row[s];
                        if v == 0.0 {
                            continue;
                        }
                        let t = |j: usize, k: usize| tab[j * width + k];
                        integral += v * (t(hi, ka) - t(hi, kb) - t(lo, ka) + t(lo, kb));
                        scale += v * (t(hi, ka) + t(hi, kb) + t(lo, ka) + t(lo, kb));
                    }
                    // The four-term difference cancels; drop what is pure roundoff.
                    if integral > CANCELLATION * scale {
                        total += m * integral / self.dw;
                    }
                }
            }
        }
        total.max(0.0)
    }
}

/// `G = f1 * f2` in `sigma` for step functions, with exact antiderivatives.
struct SigmaConvolution {
    knots: Vec<f64>,
    /// Value, slope to the right, first and second antiderivative at each knot.
    g: Vec<f64>,
    slope: Vec<f64>,
    g1: Vec<f64>,
    g2: Vec<f64>,
}

/// Knot positions of `f1 * f2` for fixed `sigma` layouts.
#[derive(Debug, Clone)]
struct SigmaKnots {
    knots: Vec<f64>,
    /// Knot indices of `a1 + a2`, `a1 + b2`, `b1 + a2`, `b1 + b2` for each cell pair.
    corners: Vec<[usize; 4]>,
    n2: usize,
}

impl SigmaKnots {
    fn new(c1: &[(f64, f64)], c2: &[(f64, f64)]) -> Self {
        let sums: Vec<[f64; 4]> = c1
            .iter()
            .flat_map(|&(a1, b1)| c2.iter().map(move |&(a2, b2)| [a1 + a2, a1 + b2, b1 + a2, b1 + b2]))
            .collect();
        let mut knots: Vec<f64> = sums.iter().flatten().copied().collect();
        knots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        knots.dedup();
        let find = |v: f64| knots.partition_point(|&k| k < v);
        let corners = sums.iter().map(|q| [find(q[0]), find(q[1]), find(q[2]), find(q[3])]).collect();
        Self { knots, corners, n2: c2.len() }
    }
}

impl SigmaConvolution {
    #[cfg(test)]
    fn new(c1: &[(f64, f64)], v1: &[f64], c2: &[(f64, f64)], v2: &[f64]) -> Self {
        Self::build(&SigmaKnots::new(c1, c2), v1, v2)
    }

    fn build(layout: &SigmaKnots, v1: &[f64], v2: &[f64]) -> Self {
        let n = layout.knots.len();
        let mut slope_jump = vec![0.0; n];
        let mut any = false;
        for (i, &x) in v1.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in v2.iter().enumerate() {
                let w = x * y;
                if w == 0.0 {
                    continue;
                }
                any = true;
                let c = layout.corners[i * layout.n2 + j];
                slope_jump[c[0]] += w;
                slope_jump[c[1]] -= w;
                slope_jump[c[2]] -= w;
                slope_jump[c[3]] += w;
            }
        }
        if !any {
            return Self { knots: vec![], g: vec![], slope: vec![], g1: vec![], g2: vec![] };
        }
        let knots = layout.knots.clone();
        let (mut g, mut slope, mut g1, mut g2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mut s = 0.0;
        for m in 0..n {
            if m > 0 {
                let d = knots[m] - knots[m - 1];
                let sp = slope[m - 1];
                g[m] = g[m - 1] + sp * d;
                g1[m] = g1[m - 1] + g[m - 1] * d + sp * d * d / 2.0;
                g2[m] = g2[m - 1] + g1[m - 1] * d + g[m - 1] * d * d / 2.0 + sp * d * d * d / 6.0;
            }
            s += slope_jump[m];
            slope[m] = s;
        }
        if let Some(last) = slope.last_mut() {
            *last = 0.0;
        }
        if let Some(last) = g.last_mut() {
            *last = 0.0;
        }
        Self { knots, g, slope, g1, g2 }
    }

    fn is_zero(&self) -> bool {
        self.knots.is_empty()
    }

    /// `int G(u) (k - u)_+ du`.
    fn gamma(&self, k: f64) -> f64 {
        let m = self.knots.partition_point(|&x| x <= k);
        if m == 0 {
            return 0.0;
        }
        let i = m - 1;
        let d = k - self.knots[i];
        self.g2[i] + self.g1[i] * d + self.g[i] * d * d / 2.0 + self.slope[i] * d * d * d / 6.0
    }
}

/// `J(f1, f2, f)` with default quadrature controls.
pub fn j_functional(f1: &BlockFunction, f2: &BlockFunction, f: &BlockFunction, alpha: f64) -> f64 {
    JPlan::new(f1, f2, f, alpha, JOptions::default()).evaluate(f1, f2, f)
}

/// The block bounds under certification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Lemma {
    /// Generic `A * B` bound.
    L31,
    /// High-low, `L = L_max`.
    L32a,
    /// High-low, `L_i = L_max`.
    L32b(u8),
    /// High-high, opposite signs, `L = L_max`.
    L33aOpp,
    /// High-high, same signs, `L = L_max`, against weighted norms.
    L33aSame,
    /// High-high, `L_i = L_max`.
    L33b(u8),
}

impl Lemma {
    pub fn all() -> [Lemma; 8] {
        [
            Lemma::L31,
            Lemma::L32a,
            Lemma::L32b(1),
            Lemma::L32b(2),
            Lemma::L33aOpp,
            Lemma::L33aSame,
            Lemma::L33b(1),
            Lemma::L33b(2),
        ]
    }

    pub fn id(self) -> String {
        match self {
            Lemma::L31 => "L31".into(),
            Lemma::L32a => "L32a".into(),
            Lemma::L32b(i) => format!("L32b{i}"),
            Lemma::L33aOpp => "L33a_opp".into(),
            Lemma::L33aSame => "L33a_same".into(),
            Lemma::L33b(i) => format!("L33b{i}"),
        }
    }

    /// Interaction case the lemma is stated for.
    pub fn case(self) -> Option<CaseKind> {
        match self {
            Lemma::L31 => None,
            Lemma::L32a | Lemma::L32b(_) => Some(CaseKind::HighLow),
            Lemma::L33aOpp => Some(CaseKind::HighHighOpposite),
            Lemma::L33aSame | Lemma::L33b(_) => Some(CaseKind::HighHighSame),
        }
    }

    /// Index whose modulation must be the largest (`0` for the output).
    fn dominant(self) -> Option<usize> {
        match self {
            Lemma::L31 => None,
            Lemma::L32a | Lemma::L33aOpp | Lemma::L33aSame => Some(0),
            Lemma::L32b(i) | Lemma::L33b(i) => Some(i as usize),
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Lemma {
    type Err = CertifyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "L31" => Lemma::L31,
            "L32a" => Lemma::L32a,
            "L32b1" => Lemma::L32b(1),
            "L32b2" => Lemma::L32b(2),
            "L33a_opp" => Lemma::L33aOpp,
            "L33a_same" => Lemma::L33aSame,
            "L33b1" => Lemma::L33b(1),
            "L33b2" => Lemma::L33b(2),
            _ => return Err(CertifyError::UnknownLemma(s.into())),
        })
    }
}

/// Dyadic sizes `(N1, N2, N)` and `(L1, L2, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockDims {
    pub n1: DyadicIndex,
    pub n2: DyadicIndex,
    pub n: DyadicIndex,
    pub l1: DyadicIndex,
    pub l2: DyadicIndex,
    pub l: DyadicIndex,
}

impl BlockDims {
    pub fn from_values(n: [u64; 3], l: [u64; 3]) -> Result<Self, CertifyError> {
        let d = |v: u64| DyadicIndex::new(v).map_err(|e| CertifyError::Parameter(e.to_string()));
        Ok(Self { n1: d(n[0])?, n2: d(n[1])?, n: d(n[2])?, l1: d(l[0])?, l2: d(l[1])?, l: d(l[2])? })
    }

    pub fn n_max(&self) -> f64 {
        self.n1.get().max(self.n2.get()).max(self.n.get())
    }

    pub fn n_min(&self) -> f64 {
        self.n1.get().min(self.n2.get()).min(self.n.get())
    }

    pub fn l_max(&self) -> f64 {
        self.l1.get().max(self.l2.get()).max(self.l.get())
    }

    pub fn l_min(&self) -> f64 {
        self.l1.get().min(self.l2.get()).min(self.l.get())
    }

    /// `L` for index 0, `L_i` for `i = 1, 2`.
    fn l_at(&self, i: usize) -> f64 {
        [self.l, self.l1, self.l2][i].get()
    }

    fn n_at(&self, i: usize) -> f64 {
        [self.n, self.n1, self.n2][i].get()
    }
}

/// Checks the lemma's modulation and frequency hypotheses.
pub fn check_hypotheses(lemma: Lemma, dims: &BlockDims) -> Result<(), CertifyError> {
    let fail = |reason: String| Err(CertifyError::Hypothesis { lemma: lemma.id(), reason });
    if let Lemma::L32b(i) | Lemma::L33b(i) = lemma {
        if !(i == 1 || i == 2) {
            return Err(CertifyError::UnknownLemma(lemma.id()));
        }
    }
    if let Some(d) = lemma.dominant() {
        if dims.l_at(d) < dims.l_max() {
            let name = if d == 0 { "L".to_string() } else { format!("L{d}") };
            return fail(format!("{name} = {} is not L_max = {}", dims.l_at(d), dims.l_max()));
        }
    }
    if let Some(kind) = lemma.case() {
        let hh = matches!(kind, CaseKind::HighHighOpposite | CaseKind::HighHighSame);
        let ok = InteractionCase::new(kind, dims.n1, dims.n2, dims.n).is_ok()
            || (hh && matches!(lemma, Lemma::L33b(_)) && InteractionCase::new(CaseKind::HighHighOpposite, dims.n1, dims.n2, dims.n).is_ok());
        if !ok {
            return fail(format!(
                "(N1, N2, N) = ({}, {}, {}) is not a {} interaction",
                dims.n1,
                dims.n2,
                dims.n,
                kind.name()
            ));
        }
    }
    Ok(())
}

/// Closed-form right-hand side factor of the lemma (without the norms).
pub fn dyadic_bound(lemma: Lemma, dims: &BlockDims, r: f64, alpha: f64) -> Result<f64, CertifyError> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(CertifyError::Parameter(format!("r must exceed 1, got {r}")));
    }
    check_hypotheses(lemma, dims)?;
    let rc = conjugate(r);
    let (ir, irc) = (1.0 / r, 1.0 / rc);
    let (l1, l2, l) = (dims.l1.get(), dims.l2.get(), dims.l.get());
    let (n1, n2) = (dims.n1.get(), dims.n2.get());
    let (nmax, nmin) = (dims.n_max(), dims.n_min());
    let v = match lemma {
        Lemma::L31 => {
            let a = dims.l_min().powf(irc) * l1.powf(ir - irc).min(l2.powf(ir - irc));
            let b = nmin.powf(irc) * n1.powf(ir - irc).min(n2.powf(ir - irc));
            a * b
        }
        Lemma::L32a => (l1 * l2).powf(ir) * nmax.powf(-(1.0 + alpha) * ir),
        Lemma::L32b(i) => {
            let (li, ni) = (dims.l_at(i as usize), dims.n_at(i as usize));
            (l1 * l2).powf(ir) * l.powf(irc) * li.powf(-ir) * nmin.powf(ir - irc) * (nmax.powf(alpha) * ni).powf(-irc)
        }
        Lemma::L33aOpp => (l1 * l2).powf(ir) * (nmax.powf(alpha) * dims.n.get()).powf(-ir),
        Lemma::L33aSame => nmax.powf(-alpha / (2.0 * r)),
        Lemma::L33b(i) => {
            let li = dims.l_at(i as usize);
            (l1 * l2).powf(ir) * l.powf(irc) * li.powf(-ir) * nmax.powf(ir - irc) * nmax.powf(-(1.0 + alpha) * irc)
        }
    };
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRatioRecord {
    pub lemma: String,
    pub case: String,
    pub n1: u64,
    pub n2: u64,
    pub n: u64,
    pub l1: u64,
    pub l2: u64,
    pub l: u64,
    pub r: f64,
    pub alpha: f64,
    pub trial: usize,
    pub seed: u64,
    pub j: f64,
    pub bound: f64,
    pub norms: f64,
    pub ratio: f64,
}

/// Frequency signs used for `f1`, `f2`, `f` under each lemma.
pub fn lemma_signs(lemma: Lemma) -> [SignConstraint; 3] {
    use SignConstraint::*;
    match lemma {
        Lemma::L33aOpp => [Positive, Negative, Any],
        Lemma::L33aSame => [Positive, Positive, Any],
        _ => [Any, Any, Any],
    }
}

/// Tuples swept for a lemma at `(N_max, L_max)` that satisfy its hypotheses.
///
/// Frequencies: all equal, plus the high-low shape where the lemma allows it.
/// Modulations: the dominant slot at `L_max` and the other two either all `1`
/// or all `L_max`; every slot is free for `L31`.
pub fn sweep_tuples(lemma: Lemma, n_max: u64, l_max: u64) -> Vec<BlockDims> {
    let n_shapes: Vec<[u64; 3]> = match lemma.case() {
        None => vec![[n_max, n_max, n_max], [n_max, 1, n_max]],
        Some(CaseKind::HighLow) => vec![[n_max, 1, n_max]],
        Some(_) => vec![[n_max, n_max, n_max]],
    };
    let put = |slot: usize, rest: u64| {
        let mut l = [rest; 3];
        l[slot] = l_max;
        l
    };
    let mut l_shapes: Vec<[u64; 3]> = match lemma.dominant() {
        // Slots are (L1, L2, L).
        None => vec![put(2, 1), put(0, 1), put(1, 1), put(2, l_max)],
        Some(0) => vec![put(2, 1), put(2, l_max)],
        Some(i) => vec![put(i - 1, 1), put(i - 1, l_max)],
    };
    l_shapes.dedup();
    let mut out = Vec::new();
    for n in &n_shapes {
        for l in &l_shapes {
            if let Ok(dims) = BlockDims::from_values(*n, *l) {
                if check_hypotheses(lemma, &dims).is_ok() && !out.contains(&dims) {
                    out.push(dims);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Exponents `k` with `N_max = 2^k`.
    pub n_exps: Vec<u32>,
    /// Exponents `m` with `L_max = 2^m`.
    pub l_exps: Vec<u32>,
    pub trials: usize,
    pub resolution: Resolution,
    pub options: JOptions,
    /// `b = 1/r + epsilon` in the weighted norms.
    pub epsilon: f64,
}

impl SweepSpec {
    /// `N_max` up to `2^8`, `L_max` up to `2^10`, 32 trials.
    pub fn full() -> Self {
        Self {
            n_exps: (1..=8).collect(),
            l_exps: (0..=10).collect(),
            trials: 32,
            resolution: Resolution::default(),
            options: JOptions::default(),
            epsilon: 0.05,
        }
    }

    /// `N_max` up to `2^5`.
    pub fn smoke() -> Self {
        Self { n_exps: (1..=5).collect(), ..Self::full() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyOutcome {
    pub records: Vec<EstimateRatioRecord>,
    /// Fitted `log2(max ratio)` against `log2 N_max`; `None` with fewer than two nonzero points.
    pub slope_n: Option<f64>,
    pub slope_l: Option<f64>,
    /// Largest ratio over the whole sweep.
    pub max_ratio: f64,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic per-(tuple, trial, slot) seed.
pub fn trial_seed(seed: u64, dims: &BlockDims, trial: usize, slot: u64) -> u64 {
    let parts = [dims.n1.value(), dims.n2.value(), dims.n.value(), dims.l1.value(), dims.l2.value(), dims.l.value(), trial as u64, slot];
    parts.iter().fold(mix(seed), |acc, &p| mix(acc ^ p))
}

/// Records for one tuple.
pub fn certify_tuple(
    lemma: Lemma,
    dims: &BlockDims,
    spec: &SweepSpec,
    r: f64,
    alpha: f64,
    seed: u64,
) -> Result<Vec<EstimateRatioRecord>, CertifyError> {
    Ok(certify_tuple_multi(lemma, dims, spec, &[r], alpha, seed)?.pop().unwrap_or_default())
}

/// Records for one tuple at each exponent in `rs`. The test functions and
/// `J` do not depend on `r`, so they are computed once.
pub fn certify_tuple_multi(
    lemma: Lemma,
    dims: &BlockDims,
    spec: &SweepSpec,
    rs: &[f64],
    alpha: f64,
    seed: u64,
) -> Result<Vec<Vec<EstimateRatioRecord>>, CertifyError> {
    let bounds: Vec<f64> = rs.iter().map(|&r| dyadic_bound(lemma, dims, r, alpha)).collect::<Result<_, _>>()?;
    let mut out: Vec<Vec<EstimateRatioRecord>> = rs.iter().map(|_| Vec::with_capacity(spec.trials)).collect();
    if spec.trials == 0 {
        return Ok(out);
    }
    let signs = lemma_signs(lemma);
    let blocks = [
        DyadicBlock::new(dims.n1, dims.l1, signs[0]),
        DyadicBlock::new(dims.n2, dims.l2, signs[1]),
        DyadicBlock::new(dims.n, dims.l, signs[2]),
    ];
    let res = spec.resolution;
    let proto: Vec<BlockFunction> = blocks.iter().map(|b| BlockFunction::ones(*b, res)).collect::<Result<_, _>>()?;
    let plan = JPlan::new(&proto[0], &proto[1], &proto[2], alpha, spec.options);
    let case = lemma.case().map(|k| k.name().to_string()).unwrap_or_else(|| "any".into());
    for trial in 0..spec.trials {
        let s1 = trial_seed(seed, dims, trial, 1);
        let f1 = make_test_function(blocks[0], res, s1)?;
        let f2 = make_test_function(blocks[1], res, trial_seed(seed, dims, trial, 2))?;
        let f = make_test_function(blocks[2], res, trial_seed(seed, dims, trial, 3))?;
        let j = plan.evaluate(&f1, &f2, &f);
        for ((&r, &bound), recs) in rs.iter().zip(&bounds).zip(out.iter_mut()) {
            let rc = conjugate(r);
            let norms = match lemma {
                Lemma::L33aSame => {
                    let b = 1.0 / r + spec.epsilon;
                    f1.weighted_norm(b, rc) * f2.weighted_norm(b, rc) * f.lp_norm(r)
                }
                _ => f1.lp_norm(rc) * f2.lp_norm(rc) * f.lp_norm(r),
            };
            recs.push(EstimateRatioRecord {
                lemma: lemma.id(),
                case: case.clone(),
                n1: dims.n1.value(),
                n2: dims.n2.value(),
                n: dims.n.value(),
                l1: dims.l1.value(),
                l2: dims.l2.value(),
                l: dims.l.value(),
                r,
                alpha,
                trial,
                seed: s1,
                j,
                bound,
                norms,
                ratio: j / (bound * norms),
            });
        }
    }
    Ok(out)
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Slope of `log2(max ratio)` over groups keyed by `key`, skipping zero ratios.
pub fn worst_case_slope(records: &[EstimateRatioRecord], key: impl Fn(&EstimateRatioRecord) -> f64) -> Option<f64> {
    let mut worst: Vec<(f64, f64)> = Vec::new();
    for rec in records.iter().filter(|r| r.ratio > 0.0) {
        let k = key(rec);
        match worst.iter_mut().find(|w| w.0 == k) {
            Some(w) => w.1 = w.1.max(rec.ratio),
            None => worst.push((k, rec.ratio)),
        }
    }
    let pts: Vec<(f64, f64)> = worst.iter().map(|&(k, v)| (k.log2(), v.log2())).collect();
    fit_slope(&pts)
}

fn record_n_max(r: &EstimateRatioRecord) -> f64 {
    r.n1.max(r.n2).max(r.n) as f64
}

fn record_l_max(r: &EstimateRatioRecord) -> f64 {
    r.l1.max(r.l2).max(r.l) as f64
}

/// Sweeps every admissible `(N_max, L_max)` pair of `spec` in parallel and
/// fits the worst-case slopes.
pub fn certify_case(lemma: Lemma, spec: &SweepSpec, r: f64, alpha: f64, seed: u64) -> Result<CertifyOutcome, CertifyError> {
    Ok(certify_case_multi(lemma, spec, &[r], alpha, seed)?.remove(0))
}

/// [`certify_case`] for each exponent in `rs`, sharing the `J` evaluations.
pub fn certify_case_multi(
    lemma: Lemma,
    spec: &SweepSpec,
    rs: &[f64],
    alpha: f64,
    seed: u64,
) -> Result<Vec<CertifyOutcome>, CertifyError> {
    if spec.n_exps.is_empty() || spec.l_exps.is_empty() {
        return Err(CertifyError::Parameter("empty sweep range".into()));
    }
    if rs.is_empty() {
        return Err(CertifyError::Parameter("no exponent r given".into()));
    }
    let tuples: Vec<BlockDims> = spec
        .n_exps
        .iter()
        .flat_map(|&k| spec.l_exps.iter().map(move |&m| (k, m)))
        .flat_map(|(k, m)| sweep_tuples(lemma, 1 << k, 1 << m))
        .collect();
    let chunks: Vec<Vec<Vec<EstimateRatioRecord>>> =
        tuples.par_iter().map(|d| certify_tuple_multi(lemma, d, spec, rs, alpha, seed)).collect::<Result<_, _>>()?;
    let mut per_r: Vec<Vec<EstimateRatioRecord>> = rs.iter().map(|_| Vec::new()).collect();
    for chunk in chunks {
        for (dst, src) in per_r.iter_mut().zip(chunk) {
            dst.extend(src);
        }
    }
    Ok(per_r
        .into_iter()
        .map(|records| CertifyOutcome {
            slope_n: worst_case_slope(&records, record_n_max),
            slope_l: worst_case_slope(&records, record_l_max),
            max_ratio: records.iter().map(|r| r.ratio).fold(0.0, f64::max),
            records,
        })
        .collect())
}
