//! Exponential integrals E_k(x) = ∫_1^∞ e^{-xt} t^{-k} dt.
//!
//! Every closed form downstream needs the scaled product ε_k(x) = e^x·E_k(x),
//! usually at x = τ + 1/SNR, which reaches several thousand at low SNR. The
//! routines here produce ε_k without ever forming e^x or E_k(x) on their own.
//! The unscaled [`expint_e1`] and [`expint_en`] are kept for testing.

pub mod quadrature;

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_CUTOFF: f64 = 1.0;
const CF_EPS: f64 = 1e-16;
const CF_TINY: f64 = 1e-300;
const CF_MAX_ITER: usize = 100_000;

/// Largest argument accepted by [`expint_quadrature_oracle`].
pub const ORACLE_MAX_X: f64 = 50.0;

/// e^x·E_k(x) tagged with its order and argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledExpIntResult {
    pub order: u32,
    pub argument: f64,
    pub scaled_value: f64,
}

fn check_order(k: u32) -> Result<()> {
    if k == 0 {
        Err(Error::domain("k", "order of E_k must be at least 1"))
    } else {
        Ok(())
    }
}

fn check_argument(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            "x",
            format!("argument must be positive and finite, got {x}"),
        ))
    }
}

/// E_1(x) for 0 < x < 1 from -γ - ln x - Σ_{n≥1} (-x)^n / (n·n!).
fn e1_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 1..200 {
        let nf = n as f64;
        term *= -x / nf;
        let contrib = term / nf;
        sum += contrib;
        if contrib.abs() <= sum.abs() * f64::EPSILON {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

/// e^x·E_k(x) by the modified Lentz evaluation of the continued fraction
/// 1/(x+k- 1·k/(x+k+2- 2(k+1)/(x+k+4- ...))). Converges for all x > 0 and
/// quickly once x + k is moderately large.
fn scaled_continued_fraction(k: u32, x: f64) -> f64 {
    let n = k as f64;
    let mut b = x + n;
    let mut c = 1.0 / CF_TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..CF_MAX_ITER {
        let fi = i as f64;
        let an = -fi * (n - 1.0 + fi);
        b += 2.0;
        d = an * d + b;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = b + an / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() <= CF_EPS {
            break;
        }
    }
    h
}

/// E_1(x).
pub fn expint_e1(x: f64) -> Result<f64> {
    check_argument(x)?;
    if x < SERIES_CUTOFF {
        Ok(e1_series(x))
    } else {
        Ok((-x).exp() * scaled_continued_fraction(1, x))
    }
}

/// Unscaled E_k(x); underflows to zero for large x.
pub fn expint_en(k: u32, x: f64) -> Result<f64> {
    if k == 1 {
        return expint_e1(x);
    }
    Ok((-x).exp() * expint_scaled(k, x)?.scaled_value)
}

/// e^x·E_k(x).
pub fn expint_scaled(k: u32, x: f64) -> Result<ScaledExpIntResult> {
    check_order(k)?;
    check_argument(x)?;
    let scaled_value = if x >= SERIES_CUTOFF {
        scaled_continued_fraction(k, x)
    } else {
        // x < 1 <= j, so each forward step k·ε_{k+1} = 1 - x·ε_k damps error.
        let mut eps = x.exp() * e1_series(x);
        for j in 1..k {
            eps = (1.0 - x * eps) / j as f64;
        }
        eps
    };
    Ok(ScaledExpIntResult {
        order: k,
        argument: x,
        scaled_value,
    })
}

/// ε_1(x), ..., ε_n(x) in one recurrence pass.
///
/// The recurrence k·ε_{k+1} = 1 - x·ε_k multiplies errors by x/k going up and
/// by k/x going down, so the pass is seeded at m = min(n, ⌊x⌋) and run down
/// to 1 and up to n from there. Both directions then contract.
pub fn expint_scaled_sequence(n: u32, x: f64) -> Result<Vec<f64>> {
    check_order(n)?;
    check_argument(x)?;
    let len = n as usize;
    let mut out = vec![0.0; len];
    if x < SERIES_CUTOFF {
        out[0] = x.exp() * e1_series(x);
        for j in 1..len {
            out[j] = (1.0 - x * out[j - 1]) / j as f64;
        }
        return Ok(out);
    }

    let m = (x.floor() as u64).clamp(1, n as u64) as usize;
    out[m - 1] = scaled_continued_fraction(m as u32, x);
    for j in (1..m).rev() {
        // ε_j = (1 - j·ε_{j+1}) / x
        out[j - 1] = (1.0 - j as f64 * out[j]) / x;
    }
    for j in m..len {
        // ε_{j+1} = (1 - x·ε_j) / j
        out[j] = (1.0 - x * out[j - 1]) / j as f64;
    }
    Ok(out)
}

/// Σ_{k=1}^{n} e^x·E_k(x).
pub fn expint_scaled_sum(n: u32, x: f64) -> Result<f64> {
    Ok(expint_scaled_sequence(n, x)?.iter().sum())
}

/// Reference value of e^x·E_k(x) = ∫_0^∞ e^{-xu} (1+u)^{-k} du by adaptive
/// quadrature, accurate to about 1e-12 absolute. Slow; intended as a test oracle.
pub fn expint_quadrature_oracle(k: u32, x: f64) -> Result<f64> {
    check_order(k)?;
    check_argument(x)?;
    if x > ORACLE_MAX_X {
        return Err(Error::range(
            "x",
            format!("quadrature oracle supports 0 < x <= {ORACLE_MAX_X}, got {x}"),
        ));
    }
    let integrand = move |u: f64| (-x * u).exp() * (1.0 + u).powi(-(k as i32));
    // The integrand falls off on a scale of 1/(x + k); panels double in width
    // from there so the adaptive rule cannot step over the peak at u = 0.
    let width = 1.0 / (x + k as f64);
    let tol = 1e-15 * width;
    let mut total = 0.0;
    let mut a = 0.0;
    let mut b = width;
    while integrand(a) * (1.0 + a) > 1e-18 * width && a < 1e12 {
        total += quadrature::integrate(integrand, a, b, tol);
        a = b;
        b *= 2.0;
    }
    // Tail beyond `a` through u = a + t/(1-t), du = dt/(1-t)^2.
    let tail = quadrature::integrate(
        move |t: f64| {
            let r = 1.0 - t;
            integrand(a + t / r) / (r * r)
        },
        0.0,
        1.0,
        tol,
    );
    Ok(total + tail)
}
