//! Resonance function, Jacobian factors, the symmetric-split curve `h`, and
//! sampled lower-bound ratios for the three interaction regimes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dyadic::DyadicIndex;
use crate::spectral_core::{dispersion_derivative, dispersion_symbol};

/// Dyadic gap that counts as "much larger".
pub const MUCH_LARGER: u64 = 16;
/// Largest dyadic ratio that counts as "comparable".
pub const COMPARABLE: u64 = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResonanceError {
    #[error("interaction case {0}")]
    BadCase(String),
    #[error("no admissible pair found after {0} draws")]
    EmptyRegion(usize),
    #[error("n_samples must be at least 1")]
    NoSamples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    HighLow,
    HighHighOpposite,
    HighHighSame,
}

impl CaseKind {
    pub fn name(self) -> &'static str {
        match self {
            CaseKind::HighLow => "high_low",
            CaseKind::HighHighOpposite => "high_high_opposite",
            CaseKind::HighHighSame => "high_high_same",
        }
    }

    pub fn all() -> [CaseKind; 3] {
        [CaseKind::HighLow, CaseKind::HighHighOpposite, CaseKind::HighHighSame]
    }
}

impl std::str::FromStr for CaseKind {
    type Err = ResonanceError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseKind::all()
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ResonanceError::BadCase(format!("unknown kind {s}")))
    }
}

fn comparable(a: DyadicIndex, b: DyadicIndex) -> bool {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    hi.value() <= COMPARABLE * lo.value()
}

fn much_larger(a: DyadicIndex, b: DyadicIndex) -> bool {
    a.value() >= MUCH_LARGER * b.value()
}

/// A validated interaction regime `(N1, N2, N)` with its sign rule on `xi1 xi2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InteractionCase {
    pub kind: CaseKind,
    pub n1: DyadicIndex,
    pub n2: DyadicIndex,
    pub n: DyadicIndex,
}

impl InteractionCase {
    pub fn new(kind: CaseKind, n1: DyadicIndex, n2: DyadicIndex, n: DyadicIndex) -> Result<Self, ResonanceError> {
        let ok = match kind {
            CaseKind::HighLow => comparable(n, n1) && much_larger(n1, n2),
            CaseKind::HighHighOpposite => comparable(n1, n2) && n.value() <= COMPARABLE * n1.value(),
            CaseKind::HighHighSame => comparable(n1, n2) && comparable(n1, n) && comparable(n2, n),
        };
        if ok {
            Ok(Self { kind, n1, n2, n })
        } else {
            Err(ResonanceError::BadCase(format!("{} does not admit (N1, N2, N) = ({n1}, {n2}, {n})", kind.name())))
        }
    }

    /// Sign requirement on `xi1 * xi2`: `Some(true)` same, `Some(false)` opposite.
    pub fn same_sign(&self) -> Option<bool> {
        match self.kind {
            CaseKind::HighLow => None,
            CaseKind::HighHighOpposite => Some(false),
            CaseKind::HighHighSame => Some(true),
        }
    }

    /// Size the resonance is compared against.
    pub fn bound(&self, alpha: f64) -> f64 {
        let (n1, n2, n) = (self.n1.get(), self.n2.get(), self.n.get());
        match self.kind {
            CaseKind::HighLow => n1.powf(1.0 + alpha) * n2,
            CaseKind::HighHighOpposite => n1.powf(1.0 + alpha) * n,
            CaseKind::HighHighSame => n1.powf(2.0 + alpha),
        }
    }
}

/// One case of each kind at top frequency `n >= 16`: `(n, 2, n)`,
/// `(n, n, n/4)` and `(n, n, 2n)`.
pub fn representative_cases(n: DyadicIndex) -> Result<Vec<InteractionCase>, ResonanceError> {
    let v = n.value();
    if v < 16 {
        return Err(ResonanceError::BadCase(format!("representative cases need N >= 16, got {v}")));
    }
    let d = |x: u64| DyadicIndex::new(x).expect("power of two");
    Ok(vec![
        InteractionCase::new(CaseKind::HighLow, n, d(2), n)?,
        InteractionCase::new(CaseKind::HighHighOpposite, n, n, d(v / 4))?,
        InteractionCase::new(CaseKind::HighHighSame, n, n, d(2 * v))?,
    ])
}

/// `Omega(xi1, xi2) = omega(xi1) + omega(xi2) - omega(xi1 + xi2)`.
pub fn resonance(xi1: f64, xi2: f64, alpha: f64) -> f64 {
    dispersion_symbol(xi1, alpha) + dispersion_symbol(xi2, alpha) - dispersion_symbol(xi1 + xi2, alpha)
}

/// `(tau - omega(xi)) - (sigma1 + sigma2 + Omega)` for `tau = tau1 + tau2`, `xi = xi1 + xi2`.
pub fn modulation_identity_residual(tau1: f64, tau2: f64, xi1: f64, xi2: f64, alpha: f64) -> f64 {
    let s1 = tau1 - dispersion_symbol(xi1, alpha);
    let s2 = tau2 - dispersion_symbol(xi2, alpha);
    let s = (tau1 + tau2) - dispersion_symbol(xi1 + xi2, alpha);
    s - (s1 + s2 + resonance(xi1, xi2, alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianKind {
    /// `|omega'(xi2) - omega'(xi1)|`
    OmegaPrimeDiff,
    /// `|omega'(xi1) - omega'(xi1 + xi2)|`
    ShiftedDiff,
}

pub fn jacobian_factor(xi1: f64, xi2: f64, alpha: f64, which: JacobianKind) -> f64 {
    match which {
        JacobianKind::OmegaPrimeDiff => (dispersion_derivative(xi2, alpha) - dispersion_derivative(xi1, alpha)).abs(),
        JacobianKind::ShiftedDiff => (dispersion_derivative(xi1, alpha) - dispersion_derivative(xi1 + xi2, alpha)).abs(),
    }
}

/// `h(x)` with its derivative, for the split `xi1 = xi/2 + x`, `xi2 = xi/2 - x`.
pub fn h_function(x: f64, xi: f64, alpha: f64) -> (f64, f64) {
    let p = |y: f64| y * y.abs().powf(1.0 + alpha);
    let a = 0.5 * xi + x;
    let b = 0.5 * xi - x;
    let h = if x == 0.0 { 0.0 } else { p(a) + p(b) - 2f64.powf(-1.0 - alpha) * p(xi) };
    let hp = if x == 0.0 { 0.0 } else { (2.0 + alpha) * (a.abs().powf(1.0 + alpha) - b.abs().powf(1.0 + alpha)) };
    (h, hp)
}

/// Second-order Taylor coefficient of `h` at 0, divided by `|xi|^alpha`.
pub fn h_taylor_constant(alpha: f64) -> f64 {
    (2.0 + alpha) * (1.0 + alpha) * 2f64.powf(-alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RatioStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub samples: usize,
}

/// Open annulus `N/2 + m < |xi| < 2N - m` with margin `m`.
fn annulus(n: DyadicIndex, margin: f64) -> (f64, f64) {
    (0.5 * n.get() + margin, 2.0 * n.get() - margin)
}

fn in_annulus(v: f64, (lo, hi): (f64, f64)) -> bool {
    let a = v.abs();
    a > lo && a < hi
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64), positive: Option<bool>) -> f64 {
    let a = rng.gen_range(lo..hi);
    let pos = positive.unwrap_or_else(|| rng.gen_bool(0.5));
    if pos {
        a
    } else {
        -a
    }
}

/// Draws one admissible pair `(xi1, xi2)` uniformly from the case region.
pub struct CaseSampler {
    case: InteractionCase,
    a1: (f64, f64),
    a2: (f64, f64),
    a: (f64, f64),
    rng: ChaCha8Rng,
}

impl CaseSampler {
    pub fn new(case: InteractionCase, seed: u64) -> Self {
        let nmin = case.n1.min(case.n2).min(case.n).get();
        let m = nmin / 100.0;
        Self {
            case,
            a1: annulus(case.n1, m),
            a2: annulus(case.n2, m),
            a: annulus(case.n, m),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn try_sample(&mut self, max_attempts: usize) -> Option<(f64, f64)> {
        for _ in 0..max_attempts {
            let x1 = draw(&mut self.rng, self.a1, None);
            let pos2 = self.case.same_sign().map(|same| same == (x1 > 0.0));
            let x2 = draw(&mut self.rng, self.a2, pos2);
            if in_annulus(x1 + x2, self.a) {
                return Some((x1, x2));
            }
        }
        None
    }
}

/// `|Omega| / bound` statistics over `n_samples` draws from the case region.
pub fn resonance_bound_ratio(
    case: &InteractionCase,
    alpha: f64,
    n_samples: usize,
    seed: u64,
) -> Result<RatioStats, ResonanceError> {
    if n_samples == 0 {
        return Err(ResonanceError::NoSamples);
    }
    let bound = case.bound(alpha);
    let mut sampler = CaseSampler::new(*case, seed);
    let budget = 1000 * n_samples;
    let mut used = 0usize;
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, 0.0f64, 0.0);
    for _ in 0..n_samples {
        let (x1, x2) = loop {
            if used >= budget {
                return Err(ResonanceError::EmptyRegion(used));
            }
            used += 1;
            if let Some(p) = sampler.try_sample(1) {
                break p;
            }
        };
        let v = resonance(x1, x2, alpha).abs() / bound;
        lo = lo.min(v);
        hi = hi.max(v);
        sum += v;
    }
    Ok(RatioStats { min: lo, max: hi, mean: sum / n_samples as f64, samples: n_samples })
}
