//! Scalar block-fading channel: perfect-CSI capacity, separate estimation
//! and decoding, the two joint-processing lower bounds, pilot-count
//! optimisation and the high-SNR power offsets between them.
//!
//! All values are in bits/s/Hz; offsets are in 3-dB units with dB alongside.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::{expint_scaled, expint_scaled_sequence, expint_scaled_sum, EULER_GAMMA};
use crate::units::{PowerOffset, SnrValue};

const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Upper end of the search for [`power_advantage_at_snr`], in dB.
pub const ADVANTAGE_SEARCH_CAP_DB: f64 = 60.0;
/// Bracket width at which [`power_advantage_at_snr`] stops, in dB.
pub const ADVANTAGE_TOLERANCE_DB: f64 = 1e-6;

/// One scalar channel configuration: blocklength, pilots, SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SisoParams {
    pub blocklength: u32,
    pub tau: u32,
    pub snr: SnrValue,
}

impl SisoParams {
    pub fn new(blocklength: u32, tau: u32, snr: SnrValue) -> Result<Self> {
        check_blocklength(blocklength)?;
        if tau >= blocklength {
            return Err(Error::domain(
                "tau",
                format!("pilot count {tau} must be below the blocklength {blocklength}"),
            ));
        }
        Ok(SisoParams {
            blocklength,
            tau,
            snr,
        })
    }

    fn pilot_fraction(&self) -> f64 {
        self.tau as f64 / self.blocklength as f64
    }
}

pub(crate) fn check_blocklength(blocklength: u32) -> Result<()> {
    if blocklength < 2 {
        Err(Error::domain(
            "T",
            format!("blocklength must be at least 2, got {blocklength}"),
        ))
    } else {
        Ok(())
    }
}

fn check_pilots(tau: u32) -> Result<()> {
    if tau == 0 {
        Err(Error::domain("tau", "channel estimation needs at least one pilot"))
    } else {
        Ok(())
    }
}

/// C(SNR) = E[log2(1 + SNR·|H|²)] = e^{1/SNR}·E_1(1/SNR)·log2 e.
pub fn capacity_csi(snr: SnrValue) -> f64 {
    let x = 1.0 / snr.linear();
    LOG2_E * expint_scaled(1, x).expect("1/snr is positive and finite").scaled_value
}

/// MMSE of the pilot-based channel estimate, 1/(1 + SNR·τ).
pub fn mmse_estimate_variance(tau: u32, snr: SnrValue) -> Result<f64> {
    check_pilots(tau)?;
    Ok(mmse_real(tau as f64, snr.linear()))
}

fn mmse_real(tau: f64, snr: f64) -> f64 {
    1.0 / (1.0 + snr * tau)
}

/// SNR·(1 − MMSE)/(1 + SNR·MMSE): the SNR seen by a decoder that trusts
/// the channel estimate.
pub fn snr_effective(tau: u32, snr: SnrValue) -> Result<SnrValue> {
    check_pilots(tau)?;
    snr_effective_real(tau as f64, snr)
}

/// [`snr_effective`] for a possibly fractional pilot count.
pub(crate) fn snr_effective_real(tau: f64, snr: SnrValue) -> Result<SnrValue> {
    let s = snr.linear();
    let mmse = mmse_real(tau, s);
    SnrValue::from_linear(s * (1.0 - mmse) / (1.0 + s * mmse))
}

/// Best separate-processing efficiency over the pilot count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparateBound {
    pub value: f64,
    pub tau_star: u32,
}

/// I_S = max over 1 ≤ τ < T of (1 − τ/T)·C(SNR_eff(τ)), by exhaustive search.
pub fn separate_bound(blocklength: u32, snr: SnrValue) -> Result<SeparateBound> {
    check_blocklength(blocklength)?;
    let t = blocklength as f64;
    let mut best = SeparateBound {
        value: f64::NEG_INFINITY,
        tau_star: 1,
    };
    for tau in 1..blocklength {
        let value = (1.0 - tau as f64 / t) * capacity_csi(snr_effective(tau, snr)?);
        // strict: ties keep the smaller τ
        if value > best.value {
            best = SeparateBound { value, tau_star: tau };
        }
    }
    Ok(best)
}

/// I_J1 = (1 − τ/T)·C − (log2 e/T)·Σ_{k=1}^{T−τ} e^{τ+1/SNR}·E_k(τ + 1/SNR).
pub fn joint_bound_j1(p: &SisoParams) -> f64 {
    let s = p.snr.linear();
    let x = p.tau as f64 + 1.0 / s;
    let penalty = expint_scaled_sum(p.blocklength - p.tau, x).expect("x > 0 and T > τ");
    (1.0 - p.pilot_fraction()) * capacity_csi(p.snr) - LOG2_E * penalty / p.blocklength as f64
}

/// I_J2 = (1 − τ/T)·C − (1/T)·log2((1 + SNR·T)/(1 + SNR·τ)).
pub fn joint_bound_j2(p: &SisoParams) -> f64 {
    joint_bound_j2_real(p.blocklength as f64, p.tau as f64, p.snr, capacity_csi(p.snr))
}

/// [`joint_bound_j2`] for real-valued blocklength and pilot count, with the
/// coherent capacity supplied by the caller.
pub fn joint_bound_j2_real(blocklength: f64, tau: f64, snr: SnrValue, capacity: f64) -> f64 {
    let s = snr.linear();
    let penalty = ((1.0 + s * blocklength) / (1.0 + s * tau)).log2();
    (1.0 - tau / blocklength) * capacity - penalty / blocklength
}

/// Selects one of the joint-processing bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JointBound {
    J1,
    J2,
}

impl JointBound {
    pub fn evaluate(self, p: &SisoParams) -> f64 {
        match self {
            JointBound::J1 => joint_bound_j1(p),
            JointBound::J2 => joint_bound_j2(p),
        }
    }
}

/// Outcome of a pilot-count search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PilotChoice {
    pub tau_star: u32,
    pub value: f64,
    /// Continuous-relaxation optimum log2 e/C − 1/SNR, reported only.
    pub tau_continuous: f64,
}

/// log2 e/C − 1/SNR, the maximiser of log2(1 + SNR·τ) − τ·C over real τ.
pub fn continuous_pilot_optimum(snr: SnrValue) -> f64 {
    LOG2_E / capacity_csi(snr) - 1.0 / snr.linear()
}

/// Exhaustive search of the selected joint bound over τ ∈ [0, T−1];
/// the smallest maximiser wins ties.
pub fn optimize_pilots_joint(blocklength: u32, snr: SnrValue, which: JointBound) -> Result<PilotChoice> {
    check_blocklength(blocklength)?;
    let mut tau_star = 0;
    let mut value = f64::NEG_INFINITY;
    for tau in 0..blocklength {
        let v = which.evaluate(&SisoParams::new(blocklength, tau, snr)?);
        if v > value {
            value = v;
            tau_star = tau;
        }
    }
    Ok(PilotChoice {
        tau_star,
        value,
        tau_continuous: continuous_pilot_optimum(snr),
    })
}

/// High-SNR penalty of I_J1 at τ = 1, e·log2 e·Σ_{k=1}^{T−1} E_k(1)/(T−1),
/// in 3-dB units.
pub fn asymptote_j1(blocklength: u32) -> Result<f64> {
    check_blocklength(blocklength)?;
    let n = blocklength - 1;
    Ok(LOG2_E * expint_scaled_sum(n, 1.0)? / n as f64)
}

/// High-SNR penalty of I_J2 at τ = 1, log2 T/(T−1), in 3-dB units.
pub fn asymptote_j2(blocklength: u32) -> Result<f64> {
    check_blocklength(blocklength)?;
    Ok(penalty_j2_real(blocklength as f64))
}

fn penalty_j2_real(t: f64) -> f64 {
    t.log2() / (t - 1.0)
}

/// 1 − log2 T/(T−1) for a real effective blocklength T > 1.
pub(crate) fn advantage_asymptotic_real(t: f64) -> PowerOffset {
    PowerOffset::from_units(1.0 - penalty_j2_real(t))
}

/// Asymptotic power advantage of joint over separate processing,
/// 1 − log2 T/(T−1) in 3-dB units.
pub fn power_advantage_asymptotic(blocklength: u32) -> Result<PowerOffset> {
    check_blocklength(blocklength)?;
    Ok(advantage_asymptotic_real(blocklength as f64))
}

/// Extra power (dB) separate processing needs to match I_J2(T, τ=1, SNR).
///
/// I_S is strictly increasing in SNR, so the crossing is unique; it is located
/// by bisection on [0, 60] dB. Returns zero when I_S already matches at SNR.
pub fn power_advantage_at_snr(blocklength: u32, snr: SnrValue) -> Result<PowerOffset> {
    check_blocklength(blocklength)?;
    let target = joint_bound_j2(&SisoParams::new(blocklength, 1, snr)?);
    let gap = |db: f64| -> Result<f64> {
        Ok(separate_bound(blocklength, snr.boosted_db(db)?)?.value - target)
    };
    if gap(0.0)? >= 0.0 {
        return Ok(PowerOffset::from_db(0.0));
    }
    if gap(ADVANTAGE_SEARCH_CAP_DB)? < 0.0 {
        return Err(Error::Saturation(format!(
            "separate processing stays below I_J2 even {ADVANTAGE_SEARCH_CAP_DB} dB above {:.4} dB (T = {blocklength})",
            snr.db()
        )));
    }
    let db = bisect(gap, 0.0, ADVANTAGE_SEARCH_CAP_DB, ADVANTAGE_TOLERANCE_DB)?;
    Ok(PowerOffset::from_db(db))
}

/// Root of an increasing `f` with f(lo) < 0 ≤ f(hi), to bracket width `tol`.
fn bisect<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// High-SNR gain of one pilot over none, γ·log2 e/T in 3-dB units.
pub fn single_pilot_advantage(blocklength: u32) -> Result<PowerOffset> {
    check_blocklength(blocklength)?;
    Ok(PowerOffset::from_units(EULER_GAMMA * LOG2_E / blocklength as f64))
}

/// High-SNR penalties of the true (noncoherent) capacity and the distance
/// from I_J2 to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrueCapacityGap {
    /// (1/(T−1))·log2(e^{T−1}·(T−1)!/T^{T−1}).
    pub exact: PowerOffset,
    /// Stirling form ½·log2 T/(T−1).
    pub stirling: PowerOffset,
    /// Π_J2 − exact penalty.
    pub j2_gap_exact: PowerOffset,
    /// Π_J2 − Stirling penalty = ½·log2 T/(T−1).
    pub j2_gap_stirling: PowerOffset,
}

pub fn true_capacity_gap(blocklength: u32) -> Result<TrueCapacityGap> {
    check_blocklength(blocklength)?;
    let t = blocklength as f64;
    let m = t - 1.0;
    let ln_factorial: f64 = (2..blocklength).map(|k| (k as f64).ln()).sum();
    let exact = (m + ln_factorial - m * t.ln()) * LOG2_E / m;
    let stirling = 0.5 * t.log2() / m;
    let pj2 = penalty_j2_real(t);
    Ok(TrueCapacityGap {
        exact: PowerOffset::from_units(exact),
        stirling: PowerOffset::from_units(stirling),
        j2_gap_exact: PowerOffset::from_units(pj2 - exact),
        j2_gap_stirling: PowerOffset::from_units(pj2 - stirling),
    })
}

/// Largest SNR accepted by [`low_power_expansion_check`].
pub const LOW_POWER_MAX_SNR: f64 = 0.01;

/// Second-order low-SNR expansion of I_J1:
/// log2 e·[(T−τ)(s − s²) − ((T−τ)·s − Σ_{k=1}^{T−τ}(k+τ)·s²)]/T.
pub fn low_power_expansion(p: &SisoParams) -> f64 {
    let s = p.snr.linear();
    let n = (p.blocklength - p.tau) as f64;
    let tau = p.tau as f64;
    // Σ_{k=1}^{n} (k + τ) = n(n+1)/2 + nτ
    let weight = n * (n + 1.0) / 2.0 + n * tau;
    LOG2_E * (n * (s - s * s) - (n * s - weight * s * s)) / p.blocklength as f64
}

/// |I_J1 − its second-order expansion|; O(SNR³).
pub fn low_power_expansion_check(p: &SisoParams) -> Result<f64> {
    if p.snr.linear() > LOW_POWER_MAX_SNR {
        return Err(Error::range(
            "snr",
            format!(
                "expansion check needs SNR <= {LOW_POWER_MAX_SNR} (linear), got {}",
                p.snr.linear()
            ),
        ));
    }
    Ok((joint_bound_j1(p) - low_power_expansion(p)).abs())
}

/// ε_k(1) for k = 1..n, exposed for the high-SNR comparisons.
pub fn scaled_e_at_one(n: u32) -> Result<Vec<f64>> {
    expint_scaled_sequence(n, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn snr(x: f64) -> SnrValue {
        SnrValue::from_linear(x).unwrap()
    }

    fn db(x: f64) -> SnrValue {
        SnrValue::from_db(x).unwrap()
    }

    fn params(t: u32, tau: u32, s: f64) -> SisoParams {
        SisoParams::new(t, tau, snr(s)).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(matches!(SisoParams::new(1, 0, snr(1.0)), Err(Error::Domain { param: "T", .. })));
        assert!(matches!(SisoParams::new(4, 4, snr(1.0)), Err(Error::Domain { param: "tau", .. })));
        assert!(SisoParams::new(2, 1, snr(1.0)).is_ok());
    }

    #[test]
    fn capacity_reference_points() {
        // 0.8604 is rounded up from 0.86035
        assert!((capacity_csi(snr(1.0)) - 0.8604).abs() < 1e-4);
        // 2.9066 is rounded up from 2.906515
        assert!((capacity_csi(snr(10.0)) - 2.9066).abs() < 1e-4);
        // scipy: exp(1/s)*exp1(1/s)*log2(e)
        assert!((capacity_csi(snr(1.0)) - 0.860_347_382_270_886_7).abs() < 1e-13);
        assert!((capacity_csi(snr(10.0)) - 2.906_514_808_414_805_4).abs() < 1e-12);
    }

    #[test]
    fn capacity_high_snr_asymptote() {
        let mut last = f64::INFINITY;
        for d in [30.0, 40.0, 50.0, 60.0] {
            let s = db(d);
            let gap = (capacity_csi(s) - (s.linear().log2() - EULER_GAMMA * LOG2_E)).abs();
            assert!(gap < last);
            last = gap;
        }
        // ln(1+x) error term of order x·ln(1/x) at x = 1e-6
        assert!(last < 5e-5);
    }

    #[test]
    fn capacity_survives_tiny_snr() {
        let c = capacity_csi(snr(1e-6));
        assert!(c.is_finite());
        assert!((c - LOG2_E * 1e-6).abs() < 1e-11);
    }

    #[test]
    fn mmse_and_effective_snr() {
        assert_eq!(mmse_estimate_variance(1, snr(1.0)).unwrap(), 0.5);
        assert!((mmse_estimate_variance(2, snr(10.0)).unwrap() - 1.0 / 21.0).abs() < 1e-16);
        assert!(mmse_estimate_variance(1_000_000, snr(1.0)).unwrap() < 1e-5);
        assert!(matches!(mmse_estimate_variance(0, snr(1.0)), Err(Error::Domain { param: "tau", .. })));

        assert!((snr_effective(1, snr(1.0)).unwrap().linear() - 1.0 / 3.0).abs() < 1e-15);
        let e = snr_effective(1, snr(100.0)).unwrap().linear();
        assert!((e - 100.0 * (100.0 / 101.0) / (1.0 + 100.0 / 101.0)).abs() < 1e-12);
        assert!((e - 49.75).abs() < 0.01);
        let e = snr_effective(100_000, snr(3.0)).unwrap().linear();
        assert!(e < 3.0 && 3.0 - e < 1e-4);
        assert!(snr_effective(0, snr(1.0)).is_err());
    }

    #[test]
    fn separate_bound_examples() {
        let s = snr(7.0);
        let b = separate_bound(2, s).unwrap();
        assert_eq!(b.tau_star, 1);
        assert_eq!(b.value, 0.5 * capacity_csi(snr_effective(1, s).unwrap()));

        let b = separate_bound(10, snr(10.0)).unwrap();
        assert!(b.value < capacity_csi(snr(10.0)) * 0.9);

        assert!(separate_bound(1, s).is_err());
    }

    #[test]
    fn joint_bound_examples() {
        let j1 = joint_bound_j1(&params(10, 1, 1.0));
        assert!((j1 - 0.53368).abs() < 1e-5);
        let j1_t2 = joint_bound_j1(&params(2, 1, 1.0));
        assert!((j1_t2 - 0.16951).abs() < 5e-5);
        // mpmath
        assert!((j1_t2 - 0.169_530_189_277_489_5).abs() < 1e-13);
        let j2 = joint_bound_j2(&params(10, 1, 1.0));
        assert!((j2 - 0.52837).abs() < 1e-5);
        assert!(j2 <= j1);

        let p0 = params(8, 0, 2.5);
        let expect = capacity_csi(p0.snr) - (1.0 + 2.5 * 8.0f64).log2() / 8.0;
        assert!((joint_bound_j2(&p0) - expect).abs() < 1e-15);
    }

    #[test]
    fn pilot_optimisation_examples() {
        let c = optimize_pilots_joint(10, snr(10.0), JointBound::J1).unwrap();
        assert_eq!(c.tau_star, 1);

        let c = optimize_pilots_joint(10, snr(0.001), JointBound::J1).unwrap();
        assert!(c.tau_star <= 1);
        let j1_1 = joint_bound_j1(&params(10, 1, 0.001));
        let j1_0 = joint_bound_j1(&params(10, 0, 0.001));
        assert!(j1_1 >= j1_0);

        for d in [-30.0, -10.0, 0.0, 10.0, 30.0, 60.0] {
            let t = continuous_pilot_optimum(db(d));
            assert!((0.0..=1.0).contains(&t), "{d} dB: {t}");
        }
    }

    #[test]
    fn asymptote_values() {
        let pj1 = asymptote_j1(10).unwrap();
        assert!((pj1 - 0.36190).abs() < 5e-5);
        // mpmath: log2(e)·Σ_{k=1}^{9} e·E_k(1)/9
        assert!((pj1 - 0.361_888_809_472_770_8).abs() < 1e-13);
        assert!((asymptote_j1(2).unwrap() - 0.86035).abs() < 1e-5);
        let pj2 = asymptote_j2(10).unwrap();
        assert!((pj2 - 0.36910).abs() < 1e-5);
        assert_eq!(asymptote_j2(2).unwrap(), 1.0);
        let d = PowerOffset::from_units(pj2 - pj1);
        assert!((d.units - 0.00721).abs() < 1e-5);
        assert!((d.db - 0.0217).abs() < 1e-4);
        for t in 2..300 {
            assert!(asymptote_j1(t).unwrap() < asymptote_j2(t).unwrap());
        }
    }

    #[test]
    fn offsets() {
        assert_eq!(power_advantage_asymptotic(2).unwrap().units, 0.0);
        let a = power_advantage_asymptotic(10).unwrap();
        assert!((a.units - 0.63090).abs() < 1e-5);
        assert!((a.db - 1.8993).abs() < 5e-4);
        assert!((a.db - 1.899_188_845_528_700_8).abs() < 1e-12);
        let far = power_advantage_asymptotic(1_000_000).unwrap();
        assert!((far.units - 1.0).abs() < 1e-4);

        let sp = single_pilot_advantage(10).unwrap();
        // 0.083278 is off in the fifth digit; γ·log2 e/10 = 0.0832746
        assert!((sp.units - 0.083278).abs() < 5e-6);
        assert!((sp.units - EULER_GAMMA * LOG2_E / 10.0).abs() < 1e-16);
        assert!((sp.db - 0.2507).abs() < 1e-4);
        assert!((single_pilot_advantage(2).unwrap().units - 0.416_373).abs() < 1e-6);
        assert!(single_pilot_advantage(100_000).unwrap().units < 1e-5);
    }

    #[test]
    fn true_capacity_gap_values() {
        let g = true_capacity_gap(10).unwrap();
        assert!((g.j2_gap_stirling.units - 0.1846).abs() < 1e-4);
        assert!((g.j2_gap_stirling.db - 0.5556).abs() < 1e-4);
        let g100 = true_capacity_gap(100).unwrap();
        assert!((g100.j2_gap_stirling.units - 0.03356).abs() < 1e-5);
        assert!((g100.j2_gap_stirling.db - 0.1010).abs() < 1e-4);

        // Exact penalty at T = 10 written out with 9! = 362880.
        let direct = (9.0 * LOG2_E + 362_880f64.log2() - 9.0 * 10f64.log2()) / 9.0;
        assert!((g.exact.units - direct).abs() < 1e-13);

        let mut last = f64::INFINITY;
        for t in [10u32, 100, 1000, 10_000] {
            let g = true_capacity_gap(t).unwrap();
            let diff = (g.exact.units - g.stirling.units).abs();
            assert!(diff < last);
            last = diff;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn advantage_at_snr_examples() {
        let a10 = power_advantage_at_snr(10, db(10.0)).unwrap();
        let a20 = power_advantage_at_snr(10, db(20.0)).unwrap();
        let asym = power_advantage_asymptotic(10).unwrap();
        assert!(a10.db < a20.db && a20.db < asym.db);
        assert_eq!(power_advantage_at_snr(2, db(40.0)).unwrap().db, 0.0);

        // Crossing really is a crossing.
        let s = db(10.0);
        let target = joint_bound_j2(&SisoParams::new(10, 1, s).unwrap());
        let at = separate_bound(10, s.boosted_db(a10.db).unwrap()).unwrap().value;
        assert!((at - target).abs() < 1e-6);
    }

    #[test]
    fn advantage_approaches_asymptote() {
        let asym = power_advantage_asymptotic(6).unwrap().db;
        let mut last = 0.0;
        for d in [10.0, 20.0, 30.0, 40.0, 60.0] {
            let a = power_advantage_at_snr(6, db(d)).unwrap().db;
            assert!(a >= last - 1e-6 && a <= asym);
            last = a;
        }
        assert!(asym - last < 0.02, "{last} vs {asym}");
    }

    #[test]
    fn low_power_checks() {
        let p = params(6, 1, 1e-3);
        let r = low_power_expansion_check(&p).unwrap();
        assert!(r <= 10.0 * 6.0 * 1e-9, "residual {r}");

        let r_half = low_power_expansion_check(&params(6, 1, 5e-4)).unwrap();
        let ratio = r / r_half;
        assert!((ratio - 8.0).abs() < 0.5, "order ratio {ratio}");

        // τ = 0 and τ = 1 agree to second order.
        let e0 = low_power_expansion(&params(6, 0, 1e-3));
        let e1 = low_power_expansion(&params(6, 1, 1e-3));
        assert!((e0 - e1).abs() < 1e-15);
        assert!(matches!(
            low_power_expansion_check(&params(6, 1, 0.1)),
            Err(Error::Range { param: "snr", .. })
        ));
    }

    #[test]
    fn j1_falls_for_many_pilots() {
        for d in [10.0, 20.0, 30.0] {
            for t in [10u32, 20, 50] {
                let mut prev = joint_bound_j1(&SisoParams::new(t, 1, db(d)).unwrap());
                for tau in 2..t.min(8) {
                    let v = joint_bound_j1(&SisoParams::new(t, tau, db(d)).unwrap());
                    assert!(v < prev);
                    prev = v;
                }
            }
        }
    }

    proptest! {
        #[test]
        fn sandwich(t in 2u32..200, tau_frac in 0.0f64..1.0, d in -20.0f64..40.0) {
            let tau = ((t as f64 * tau_frac) as u32).min(t - 1);
            let p = SisoParams::new(t, tau, db(d)).unwrap();
            let c = capacity_csi(p.snr);
            let j1 = joint_bound_j1(&p);
            let j2 = joint_bound_j2(&p);
            let tol = 1e-12 * c.max(1.0);
            prop_assert!(j2 <= j1 + tol);
            prop_assert!(j1 <= (1.0 - tau as f64 / t as f64) * c + tol);
        }

        #[test]
        fn capacity_increasing(d in -40.0f64..50.0, step in 0.01f64..5.0) {
            prop_assert!(capacity_csi(db(d + step)) > capacity_csi(db(d)));
        }

        #[test]
        fn j2_increasing_in_blocklength(t in 2u32..2000, tau in 0u32..3, d in -10.0f64..30.0) {
            prop_assume!(tau < t);
            let a = joint_bound_j2(&SisoParams::new(t, tau, db(d)).unwrap());
            let b = joint_bound_j2(&SisoParams::new(t + 1, tau, db(d)).unwrap());
            prop_assert!(b > a);
        }
    }
}
