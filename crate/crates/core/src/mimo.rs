//! Multi-antenna block fading: the ergodic capacity functional C_{t,r}, the
//! two joint-processing bounds, separate processing, pilot optimisation and
//! the check that an orthogonal pilot matrix minimises the estimation penalty.
//!
//! C_{t,r} has an exact form when either dimension is one; otherwise it is
//! estimated by Monte Carlo and results carry a standard error.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mc::{sample_ctr, sample_delta_mimo_many, Estimate, McConfig};
use crate::siso::{advantage_asymptotic_real, check_blocklength, snr_effective_real};
use crate::specfun::expint_scaled_sum;
use crate::units::{PowerOffset, SnrValue};

const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Margin, in combined standard errors, inside which sampled values count as tied.
pub const TIE_MARGIN_SIGMAS: f64 = 4.0;

// Substream tags: the coherent term and the penalty term of the bounds are
// drawn independently, and every call with the same config reuses them.
const CAPACITY_STREAM: u64 = 1;
const PENALTY_STREAM: u64 = 2;

/// Antenna counts plus blocklength, pilot count and SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MimoParams {
    pub n_t: u32,
    pub n_r: u32,
    pub blocklength: u32,
    pub tau: u32,
    pub snr: SnrValue,
}

impl MimoParams {
    /// Requires τ = 0 or n_t ≤ τ < T: fewer pilots than transmit antennas
    /// cannot resolve the channel.
    pub fn new(n_t: u32, n_r: u32, blocklength: u32, tau: u32, snr: SnrValue) -> Result<Self> {
        check_antennas(n_t, n_r)?;
        check_blocklength(blocklength)?;
        if tau >= blocklength {
            return Err(Error::domain(
                "tau",
                format!("pilot count {tau} must be below the blocklength {blocklength}"),
            ));
        }
        if tau != 0 && tau < n_t {
            return Err(Error::domain(
                "tau",
                format!("pilot count must be 0 or at least n_t = {n_t}, got {tau}"),
            ));
        }
        Ok(MimoParams {
            n_t,
            n_r,
            blocklength,
            tau,
            snr,
        })
    }

    fn pilot_fraction(&self) -> f64 {
        self.tau as f64 / self.blocklength as f64
    }

    /// SNR seen by the penalty term, SNR/(1 + SNR·τ/n_t).
    fn penalty_snr(&self) -> Result<SnrValue> {
        let s = self.snr.linear();
        SnrValue::from_linear(s / (1.0 + s * self.tau as f64 / self.n_t as f64))
    }
}

fn check_antennas(n_t: u32, n_r: u32) -> Result<()> {
    if n_t == 0 {
        return Err(Error::domain("n_t", "need at least one transmit antenna"));
    }
    if n_r == 0 {
        return Err(Error::domain("n_r", "need at least one receive antenna"));
    }
    Ok(())
}

/// C_{t,r}(ρ) = E[log2 det(I + (ρ/t)·Z·Z†)] for an r×t IID complex Gaussian Z.
///
/// Exact when min(t, r) = 1: for t = 1 it is log2 e·Σ_{k=1}^{r} ε_k(1/ρ), for
/// r = 1 it is log2 e·Σ_{k=1}^{t} ε_k(t/ρ). Sampled otherwise.
pub fn capacity_ctr(t: u32, r: u32, rho: SnrValue, cfg: &McConfig) -> Result<Estimate> {
    check_antennas(t, r)?;
    if t == 1 || r == 1 {
        let terms = t.max(r);
        let x = t as f64 / rho.linear();
        return Ok(Estimate::exact(LOG2_E * expint_scaled_sum(terms, x)?));
    }
    sample_ctr(t, r, rho, cfg)
}

/// Second-order expansion r·log2 e·(ρ − (t+r)/(2t)·ρ²) of C_{t,r} at low power.
pub fn capacity_ctr_low_power(t: u32, r: u32, rho: SnrValue) -> f64 {
    let (t, r, rho) = (t as f64, r as f64, rho.linear());
    r * LOG2_E * (rho - (t + r) / (2.0 * t) * rho * rho)
}

fn coherent_term(p: &MimoParams, cfg: &McConfig) -> Result<Estimate> {
    capacity_ctr(p.n_t, p.n_r, p.snr, &cfg.substream(CAPACITY_STREAM))
}

/// I_J1 = (1 − τ/T)·C_{n_t,n_r}(SNR) − (n_r/T)·C_{n_t,T−τ}(SNR/(1 + SNR·τ/n_t)).
pub fn mimo_joint_j1(p: &MimoParams, cfg: &McConfig) -> Result<Estimate> {
    let c = coherent_term(p, cfg)?;
    let penalty = capacity_ctr(
        p.n_t,
        p.blocklength - p.tau,
        p.penalty_snr()?,
        &cfg.substream(PENALTY_STREAM),
    )?;
    let t = p.blocklength as f64;
    Ok(c.combine(1.0 - p.pilot_fraction(), penalty, -(p.n_r as f64) / t))
}

/// I_J2 = (1 − τ/T)·C_{n_t,n_r}(SNR) − (n_t·n_r/T)·log2((1 + SNR·T/n_t)/(1 + SNR·τ/n_t)).
pub fn mimo_joint_j2(p: &MimoParams, cfg: &McConfig) -> Result<Estimate> {
    let c = coherent_term(p, cfg)?;
    let s = p.snr.linear();
    let (n_t, t) = (p.n_t as f64, p.blocklength as f64);
    let ratio = (1.0 + s * t / n_t) / (1.0 + s * p.tau as f64 / n_t);
    let penalty = n_t * p.n_r as f64 / t * ratio.log2();
    Ok(c.combine(1.0 - p.pilot_fraction(), Estimate::exact(penalty), -1.0))
}

/// Best separate-processing efficiency over the pilot count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MimoSeparate {
    pub value: Estimate,
    pub tau_star: u32,
    /// Another τ came within the tie margin of the best sampled value.
    pub tie_flagged: bool,
}

/// Maximises (1 − τ/T)·C_{n_t,n_r}(SNR_eff(τ/n_t)) over τ ∈ [n_t, T−1].
///
/// Every τ reuses the same draws, so the comparison is between paired
/// estimates.
pub fn mimo_separate(n_t: u32, n_r: u32, blocklength: u32, snr: SnrValue, cfg: &McConfig) -> Result<MimoSeparate> {
    check_antennas(n_t, n_r)?;
    check_blocklength(blocklength)?;
    if blocklength <= n_t {
        return Err(Error::domain(
            "T",
            format!("blocklength {blocklength} leaves no pilot count in [n_t, T-1] for n_t = {n_t}"),
        ));
    }
    let t = blocklength as f64;
    let stream = cfg.substream(CAPACITY_STREAM);
    let mut candidates = Vec::with_capacity((blocklength - n_t) as usize);
    for tau in n_t..blocklength {
        let eff = snr_effective_real(tau as f64 / n_t as f64, snr)?;
        let c = capacity_ctr(n_t, n_r, eff, &stream)?;
        candidates.push((tau, c.scaled(1.0 - tau as f64 / t)));
    }
    let (tau_star, value, tie_flagged) = pick_with_margin(&candidates);
    Ok(MimoSeparate {
        value,
        tau_star,
        tie_flagged,
    })
}

/// Smallest τ whose value is within the tie margin of the best mean.
/// Candidates must be sorted by τ.
fn pick_with_margin(candidates: &[(u32, Estimate)]) -> (u32, Estimate, bool) {
    let (_, best) = candidates
        .iter()
        .copied()
        .fold(candidates[0], |acc, c| if c.1.mean > acc.1.mean { c } else { acc });
    let tied = |e: &Estimate| e.mean >= best.mean - TIE_MARGIN_SIGMAS * e.std_error.hypot(best.std_error);
    let (tau, value) = candidates
        .iter()
        .copied()
        .find(|(_, e)| tied(e))
        .expect("the best candidate is within its own margin");
    let ties = candidates.iter().filter(|(_, e)| tied(e)).count();
    (tau, value, ties > 1)
}

/// Outcome of the MIMO pilot-count search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MimoPilotChoice {
    pub tau_star: u32,
    pub value: Estimate,
    /// n·(log2 e/(C_{n,n}/n) − 1/SNR), the continuous relaxation; reported only.
    pub tau_continuous: f64,
    /// Another τ came within the tie margin of the best sampled value.
    pub tie_flagged: bool,
    /// I_J1 at every searched τ, in search order.
    pub candidates: Vec<(u32, Estimate)>,
}

/// Exhaustive search of I_J1 with n_t = n_r = n over τ ∈ {0} ∪ [n, T−1].
pub fn mimo_optimize_pilots(n: u32, blocklength: u32, snr: SnrValue, cfg: &McConfig) -> Result<MimoPilotChoice> {
    check_antennas(n, n)?;
    check_blocklength(blocklength)?;
    let taus = std::iter::once(0).chain(n.max(1)..blocklength);
    let mut candidates = Vec::new();
    for tau in taus {
        let p = MimoParams::new(n, n, blocklength, tau, snr)?;
        candidates.push((tau, mimo_joint_j1(&p, cfg)?));
    }
    let (tau_star, value, tie_flagged) = pick_with_margin(&candidates);
    let c_nn = capacity_ctr(n, n, snr, &cfg.substream(CAPACITY_STREAM))?;
    let per_antenna = c_nn.mean / n as f64;
    Ok(MimoPilotChoice {
        tau_star,
        value,
        tau_continuous: n as f64 * (LOG2_E / per_antenna - 1.0 / snr.linear()),
        tie_flagged,
        candidates,
    })
}

/// High-SNR power advantage of joint processing with n×n antennas: the
/// scalar advantage at effective blocklength T/n.
pub fn mimo_power_advantage_asymptotic(n: u32, blocklength: u32) -> Result<PowerOffset> {
    check_antennas(n, n)?;
    if blocklength <= n {
        return Err(Error::domain(
            "T",
            format!("blocklength {blocklength} must exceed the antenna count {n}"),
        ));
    }
    Ok(advantage_asymptotic_real(blocklength as f64 / n as f64))
}

/// One perturbed pilot Gram diagonal compared against τ·I.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramCheckRow {
    pub diagonal: Vec<f64>,
    pub delta: Estimate,
    /// Δ(perturbed) − Δ(uniform) on shared draws.
    pub difference: f64,
    pub combined_std_error: f64,
    /// The uniform Gram is not beaten by more than the tie margin.
    pub uniform_minimal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramCheckReport {
    pub params: MimoParams,
    pub uniform: Estimate,
    pub rows: Vec<GramCheckRow>,
}

impl GramCheckReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.uniform_minimal)
    }
}

/// Compares the penalty Δ at P·P† = τ·I with each diagonal perturbation.
///
/// All diagonals are evaluated on the same draws, so an unperturbed entry
/// reproduces the uniform value exactly.
pub fn pilot_gram_optimality_check(
    p: &MimoParams,
    perturbations: &[Vec<f64>],
    cfg: &McConfig,
) -> Result<GramCheckReport> {
    if p.tau == 0 {
        return Err(Error::domain("tau", "the pilot Gram check needs pilots"));
    }
    let mut diagonals = Vec::with_capacity(perturbations.len() + 1);
    diagonals.push(vec![p.tau as f64; p.n_t as usize]);
    diagonals.extend(perturbations.iter().cloned());
    let deltas = sample_delta_mimo_many(p, &diagonals, &cfg.substream(PENALTY_STREAM))?;
    let uniform = deltas[0];
    let rows = perturbations
        .iter()
        .zip(&deltas[1..])
        .map(|(d, &delta)| {
            let difference = delta.mean - uniform.mean;
            let combined_std_error = delta.std_error.hypot(uniform.std_error);
            GramCheckRow {
                diagonal: d.clone(),
                delta,
                difference,
                combined_std_error,
                uniform_minimal: difference >= -TIE_MARGIN_SIGMAS * combined_std_error,
            }
        })
        .collect();
    Ok(GramCheckReport {
        params: *p,
        uniform,
        rows,
    })
}
