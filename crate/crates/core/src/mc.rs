//! Seeded Monte Carlo estimators for the expectations behind every bound.
//!
//! Samples are drawn in fixed-size blocks. Block `b` of a run keyed by
//! `(seed, stream_id)` always gets the same ChaCha8 stream, each block
//! reduces to a Welford partial, and partials are merged in block order.
//! Results are therefore bit-identical whatever the rayon pool size.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mimo::MimoParams;
use crate::units::SnrValue;

const BLOCK_SAMPLES: u64 = 8192;
const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Sample count, seed and substream for a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub stream_id: u64,
}

impl McConfig {
    pub const MIN_SAMPLES: u64 = 100;
    pub const DEFAULT_SCALAR_SAMPLES: u64 = 1_000_000;
    pub const DEFAULT_MATRIX_SAMPLES: u64 = 100_000;

    pub fn new(samples: u64, seed: u64) -> Result<Self> {
        let cfg = McConfig {
            samples,
            seed,
            stream_id: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < Self::MIN_SAMPLES {
            return Err(Error::domain(
                "samples",
                format!("need at least {} samples, got {}", Self::MIN_SAMPLES, self.samples),
            ));
        }
        Ok(())
    }

    pub fn with_stream(self, stream_id: u64) -> Self {
        McConfig { stream_id, ..self }
    }

    pub fn with_samples(self, samples: u64) -> Self {
        McConfig { samples, ..self }
    }

    /// A child configuration whose draws are independent of the parent's and
    /// of every other tag.
    pub fn substream(&self, tag: u64) -> Self {
        let stream_id = splitmix64(self.stream_id ^ splitmix64(tag.wrapping_add(0x5bd1_e995)));
        McConfig { stream_id, ..*self }
    }

    fn block_rng(&self, block: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.stream_id.to_le_bytes());
        key[16..24].copy_from_slice(&splitmix64(self.seed).to_le_bytes());
        key[24..].copy_from_slice(&splitmix64(!self.stream_id).to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(block);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A sampled (or exact) quantity.
///
/// `samples_used == 0` marks a closed-form value, whose `std_error` is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples_used: u64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            mean: value,
            std_error: 0.0,
            samples_used: 0,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.samples_used == 0
    }

    /// `a·self + b·other` for independent estimates, errors added in quadrature.
    pub fn combine(self, a: f64, other: Estimate, b: f64) -> Estimate {
        Estimate {
            mean: a * self.mean + b * other.mean,
            std_error: (a * a * self.std_error.powi(2) + b * b * other.std_error.powi(2)).sqrt(),
            samples_used: self.samples_used.max(other.samples_used),
        }
    }

    pub fn scaled(self, a: f64) -> Estimate {
        Estimate {
            mean: a * self.mean,
            std_error: a.abs() * self.std_error,
            samples_used: self.samples_used,
        }
    }

    /// (`value` - mean) / std_error; infinite if they differ on an exact estimate.
    pub fn z_score(&self, value: f64) -> f64 {
        let diff = value - self.mean;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Welford) -> Welford {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        Welford {
            count,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * w,
        }
    }

    fn estimate(&self) -> Estimate {
        let n = self.count as f64;
        let var = if self.count > 1 { self.m2 / (n - 1.0) } else { 0.0 };
        Estimate {
            mean: self.mean,
            std_error: (var / n).sqrt(),
            samples_used: self.count,
        }
    }
}

/// Runs `draw` `cfg.samples` times and averages each of its `width` outputs.
///
/// `scratch` builds per-block working storage; `draw` fills `out` with one
/// sample of every component. Components drawn together share randomness,
/// which is how common-random-number comparisons are built.
pub(crate) fn estimate_vector<S, I, F>(cfg: &McConfig, width: usize, scratch: I, draw: F) -> Result<Vec<Estimate>>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut ChaCha8Rng, &mut S, &mut [f64]) -> Result<()> + Sync,
{
    cfg.validate()?;
    let blocks = cfg.samples.div_ceil(BLOCK_SAMPLES);
    let partials: Vec<Result<Vec<Welford>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let n = BLOCK_SAMPLES.min(cfg.samples - b * BLOCK_SAMPLES);
            let mut rng = cfg.block_rng(b);
            let mut s = scratch();
            let mut acc = vec![Welford::default(); width];
            let mut out = vec![0.0; width];
            for _ in 0..n {
                draw(&mut rng, &mut s, &mut out)?;
                for (a, &v) in acc.iter_mut().zip(&out) {
                    a.push(v);
                }
            }
            Ok(acc)
        })
        .collect();

    let mut total = vec![Welford::default(); width];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part?) {
            *t = t.merge(p);
        }
    }
    Ok(total.iter().map(Welford::estimate).collect())
}

fn estimate_scalar<F>(cfg: &McConfig, draw: F) -> Result<Estimate>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let v = estimate_vector(cfg, 1, || (), |rng, _, out| {
        out[0] = draw(rng);
        Ok(())
    })?;
    Ok(v[0])
}

/// Unit-mean exponential by inversion.
#[inline]
fn exp_variate<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -(-u).ln_1p()
}

/// Draws Σ_{k=1}^{n} |x_k|² for IID unit-variance complex Gaussians x_k.
#[derive(Debug, Clone, Copy)]
struct ChiSquareSum {
    gamma: Option<Gamma<f64>>,
}

impl ChiSquareSum {
    fn new(n: u32) -> Result<Self> {
        let gamma = if n >= 2 {
            Some(Gamma::new(n as f64, 1.0).map_err(|e| Error::Internal(e.to_string()))?)
        } else {
            None
        };
        Ok(ChiSquareSum { gamma })
    }

    #[inline]
    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match &self.gamma {
            Some(g) => g.sample(rng),
            None => exp_variate(rng),
        }
    }
}

/// Unit-variance circularly symmetric complex Gaussian.
#[inline]
pub(crate) fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// log2 det(I + G) for a Hermitian positive semidefinite `g` (row-major,
/// `n`×`n`), via Cholesky of I + G. `g` is overwritten.
pub(crate) fn log2_det_identity_plus(g: &mut [Complex64], n: usize) -> Result<f64> {
    for i in 0..n {
        g[i * n + i] += 1.0;
    }
    let mut log_det = 0.0;
    for j in 0..n {
        let mut d = g[j * n + j].re;
        for k in 0..j {
            d -= g[j * n + k].norm_sqr();
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::Internal(format!(
                "Cholesky pivot {j} of {n}x{n} matrix is {d}; input not positive definite"
            )));
        }
        let l = d.sqrt();
        g[j * n + j] = Complex64::new(l, 0.0);
        log_det += l.ln();
        for i in j + 1..n {
            let mut s = g[i * n + j];
            for k in 0..j {
                s -= g[i * n + k] * g[j * n + k].conj();
            }
            g[i * n + j] = s / l;
        }
    }
    Ok(2.0 * log_det * LOG2_E)
}

/// Which Gram matrix of an r×t sample Z enters the log-det.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramSide {
    /// Z·Z†, r×r.
    Outer,
    /// Z†·Z, t×t.
    Inner,
    /// Whichever is smaller; the determinants coincide.
    Smaller,
}

/// Writes scale·Z·Z† (outer) or scale·Z†·Z (inner) for row-major r×t `z`.
fn gram(z: &[Complex64], r: usize, t: usize, scale: f64, outer: bool, out: &mut [Complex64]) {
    if outer {
        for i in 0..r {
            for j in 0..=i {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..t {
                    s += z[i * t + k] * z[j * t + k].conj();
                }
                out[i * r + j] = s * scale;
                out[j * r + i] = (s * scale).conj();
            }
        }
    } else {
        for i in 0..t {
            for j in 0..=i {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..r {
                    s += z[k * t + i].conj() * z[k * t + j];
                }
                out[i * t + j] = s * scale;
                out[j * t + i] = (s * scale).conj();
            }
        }
    }
}

/// E[log2(1 + snr·|H|²)] with |H|² unit-mean exponential.
pub fn sample_capacity_siso(snr: SnrValue, cfg: &McConfig) -> Result<Estimate> {
    let s = snr.linear();
    estimate_scalar(cfg, |rng| (s * exp_variate(rng)).ln_1p() * LOG2_E)
}

/// E[log2(1 + snr·S/(1 + snr·τ))] with S a sum of T−τ unit-mean exponentials.
pub fn sample_marquet_term(blocklength: u32, tau: u32, snr: SnrValue, cfg: &McConfig) -> Result<Estimate> {
    if tau >= blocklength {
        return Err(Error::domain(
            "tau",
            format!("pilot count {tau} must be below the blocklength {blocklength}"),
        ));
    }
    let s = snr.linear();
    let a = s / (1.0 + s * tau as f64);
    let sum = ChiSquareSum::new(blocklength - tau)?;
    estimate_scalar(cfg, |rng| (a * sum.sample(rng)).ln_1p() * LOG2_E)
}

/// C_{t,r}(ρ) = E[log2 det(I + (ρ/t)·Z·Z†)] for r×t IID complex Gaussian Z.
pub fn sample_ctr(t: u32, r: u32, rho: SnrValue, cfg: &McConfig) -> Result<Estimate> {
    sample_ctr_with(t, r, rho, GramSide::Smaller, cfg)
}

/// [`sample_ctr`] with an explicit choice of Gram matrix. Z is drawn in the
/// same order for every side, so all sides see identical samples.
pub fn sample_ctr_with(t: u32, r: u32, rho: SnrValue, side: GramSide, cfg: &McConfig) -> Result<Estimate> {
    if t == 0 {
        return Err(Error::domain("t", "need at least one transmit dimension"));
    }
    if r == 0 {
        return Err(Error::domain("r", "need at least one receive dimension"));
    }
    let (t, r) = (t as usize, r as usize);
    let outer = match side {
        GramSide::Outer => true,
        GramSide::Inner => false,
        GramSide::Smaller => r <= t,
    };
    let dim = if outer { r } else { t };
    let scale = rho.linear() / t as f64;
    let v = estimate_vector(
        cfg,
        1,
        || (vec![Complex64::default(); r * t], vec![Complex64::default(); dim * dim]),
        |rng, (z, g), out| {
            for zij in z.iter_mut() {
                *zij = complex_gaussian(rng);
            }
            gram(z, r, t, scale, outer, g);
            out[0] = log2_det_identity_plus(g, dim)?;
            Ok(())
        },
    )?;
    Ok(v[0])
}

fn check_pilot_gram(params: &MimoParams, diagonal: &[f64]) -> Result<()> {
    let n_t = params.n_t as usize;
    if diagonal.len() != n_t {
        return Err(Error::domain(
            "pilot_gram_diagonal",
            format!("expected {n_t} entries, got {}", diagonal.len()),
        ));
    }
    if diagonal.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(Error::domain(
            "pilot_gram_diagonal",
            "entries must be finite and non-negative",
        ));
    }
    let trace: f64 = diagonal.iter().sum();
    let budget = params.n_t as f64 * params.tau as f64;
    if trace > budget * (1.0 + 1e-12) {
        return Err(Error::domain(
            "pilot_gram_diagonal",
            format!("trace {trace} exceeds the pilot power budget n_t·τ = {budget}"),
        ));
    }
    Ok(())
}

/// Δ = n_R·E[log2 det(I + (I + (SNR/n_T)·D)^{-1}·(SNR/n_T)·X·X†)] for every
/// diagonal pilot Gram D in `diagonals`, on shared draws of X (n_T×(T−τ)).
pub fn sample_delta_mimo_many(params: &MimoParams, diagonals: &[Vec<f64>], cfg: &McConfig) -> Result<Vec<Estimate>> {
    for d in diagonals {
        check_pilot_gram(params, d)?;
    }
    let n_t = params.n_t as usize;
    let cols = (params.blocklength - params.tau) as usize;
    let a = params.snr.linear() / n_t as f64;
    let n_r = params.n_r as f64;
    // Row i of X is scaled by sqrt(a / (1 + a·d_i)); the symmetric form of
    // (I + aD)^{-1}·aXX† has the same determinant.
    let row_scales: Vec<Vec<f64>> = diagonals
        .iter()
        .map(|d| d.iter().map(|&di| (a / (1.0 + a * di)).sqrt()).collect())
        .collect();
    let outer = n_t <= cols;
    let dim = n_t.min(cols);
    estimate_vector(
        cfg,
        diagonals.len(),
        || {
            (
                vec![Complex64::default(); n_t * cols],
                vec![Complex64::default(); n_t * cols],
                vec![Complex64::default(); dim * dim],
            )
        },
        |rng, (x, xs, g), out| {
            for v in x.iter_mut() {
                *v = complex_gaussian(rng);
            }
            for (slot, scales) in out.iter_mut().zip(&row_scales) {
                for i in 0..n_t {
                    for k in 0..cols {
                        xs[i * cols + k] = x[i * cols + k] * scales[i];
                    }
                }
                gram(xs, n_t, cols, 1.0, outer, g);
                *slot = n_r * log2_det_identity_plus(g, dim)?;
            }
            Ok(())
        },
    )
}

/// Δ penalty for one diagonal pilot Gram matrix. Draws of X depend only on
/// `cfg`, so calls with the same `cfg` are paired sample-for-sample.
pub fn sample_delta_mimo(params: &MimoParams, pilot_gram_diagonal: &[f64], cfg: &McConfig) -> Result<Estimate> {
    let v = sample_delta_mimo_many(params, &[pilot_gram_diagonal.to_vec()], cfg)?;
    Ok(v[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{expint_scaled, expint_scaled_sum};

    fn cfg(samples: u64) -> McConfig {
        McConfig::new(samples, 7).unwrap()
    }

    fn snr(x: f64) -> SnrValue {
        SnrValue::from_linear(x).unwrap()
    }

    fn within(e: &Estimate, value: f64, k: f64) -> bool {
        (e.mean - value).abs() <= k * e.std_error
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(99, 1).is_err());
        assert!(McConfig::new(100, 1).is_ok());
        let c = cfg(1000);
        assert_ne!(c.substream(1).stream_id, c.substream(2).stream_id);
        assert_ne!(c.substream(1).stream_id, c.stream_id);
        assert_eq!(c.substream(3), c.substream(3));
    }

    #[test]
    fn capacity_matches_closed_form() {
        let e = sample_capacity_siso(snr(1.0), &cfg(1_000_000)).unwrap();
        let closed = LOG2_E * expint_scaled(1, 1.0).unwrap().scaled_value;
        assert!((closed - 0.8604).abs() < 1e-4);
        assert!(within(&e, closed, 3.0), "{e:?} vs {closed}");

        let e = sample_capacity_siso(snr(10.0), &cfg(1_000_000)).unwrap();
        let closed = LOG2_E * expint_scaled(1, 0.1).unwrap().scaled_value;
        assert!((closed - 2.9066).abs() < 1e-4);
        assert!(within(&e, closed, 3.0), "{e:?} vs {closed}");

        let e = sample_capacity_siso(snr(1e-9), &cfg(10_000)).unwrap();
        assert!(e.mean >= 0.0 && e.mean < 1e-8);
    }

    #[test]
    fn marquet_term_matches_closed_form() {
        let e = sample_marquet_term(10, 1, snr(1.0), &cfg(1_000_000)).unwrap();
        let closed = LOG2_E * expint_scaled_sum(9, 2.0).unwrap();
        assert!((closed - 2.4064).abs() < 5e-5);
        assert!(within(&e, closed, 3.0), "{e:?} vs {closed}");

        let e = sample_marquet_term(2, 1, snr(1.0), &cfg(1_000_000)).unwrap();
        let closed = LOG2_E * 0.361_328_f64;
        assert!((closed - 0.52132).abs() < 5e-5);
        assert!((e.mean - closed).abs() <= 3.0 * e.std_error + 2e-6);

        let e = sample_marquet_term(5, 4, snr(1e-9), &cfg(1000)).unwrap();
        assert!(e.mean < 1e-8);

        assert!(matches!(
            sample_marquet_term(3, 3, snr(1.0), &cfg(1000)),
            Err(Error::Domain { param: "tau", .. })
        ));
    }

    #[test]
    fn ctr_rank_one_matches_closed_form() {
        let c = cfg(100_000);
        let e = sample_ctr(1, 1, snr(1.0), &c).unwrap();
        assert!(within(&e, 0.860_347_382_270_886_7, 4.0), "{e:?}");

        let e = sample_ctr(1, 4, snr(1.0), &c).unwrap();
        let closed = LOG2_E * expint_scaled_sum(4, 1.0).unwrap();
        assert!((closed - 2.2104).abs() < 5e-4);
        assert!(within(&e, closed, 4.0), "{e:?} vs {closed}");

        let e = sample_ctr(2, 2, snr(1e-9), &c).unwrap();
        assert!(e.mean.abs() < 1e-7);
    }

    #[test]
    fn gram_sides_agree() {
        let c = cfg(20_000);
        for (t, r) in [(2u32, 3u32), (3, 2), (4, 4), (1, 5)] {
            let a = sample_ctr_with(t, r, snr(5.0), GramSide::Outer, &c).unwrap();
            let b = sample_ctr_with(t, r, snr(5.0), GramSide::Inner, &c).unwrap();
            // Same Z on both sides: only rounding separates them.
            assert!((a.mean - b.mean).abs() < 1e-10, "t={t} r={r}");
            let s = sample_ctr(t, r, snr(5.0), &c).unwrap();
            assert!((a.mean - s.mean).abs() < 1e-10);
        }
    }

    #[test]
    fn std_error_scales_with_sample_count() {
        let a = sample_capacity_siso(snr(3.0), &cfg(50_000)).unwrap();
        let b = sample_capacity_siso(snr(3.0), &cfg(200_000)).unwrap();
        let ratio = a.std_error / b.std_error;
        assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
        assert_eq!(b.samples_used, 200_000);
    }

    #[test]
    fn identical_config_reproduces_bits() {
        let c = cfg(30_001);
        let a = sample_ctr(2, 3, snr(4.0), &c).unwrap();
        let b = sample_ctr(2, 3, snr(4.0), &c).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let other = sample_ctr(2, 3, snr(4.0), &c.with_stream(1)).unwrap();
        assert_ne!(a.mean.to_bits(), other.mean.to_bits());
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut g = vec![Complex64::new(-2.0, 0.0)];
        assert!(matches!(log2_det_identity_plus(&mut g, 1), Err(Error::Internal(_))));
    }

    #[test]
    fn log_det_small_matrix() {
        // I + [[2, 1+i], [1-i, 3]] = [[3, 1+i], [1-i, 4]], det = 12 - 2 = 10.
        let mut g = vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(1.0, -1.0),
            Complex64::new(3.0, 0.0),
        ];
        let v = log2_det_identity_plus(&mut g, 2).unwrap();
        assert!((v - 10f64.log2()).abs() < 1e-14);
    }

    #[test]
    fn welford_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37 % 101) as f64).sin()).collect();
        let mut whole = Welford::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut a = Welford::default();
        let mut b = Welford::default();
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        let m = a.merge(b);
        assert!((m.mean - whole.mean).abs() < 1e-14);
        assert!((m.m2 - whole.m2).abs() < 1e-10);
    }
}
