//! Tail-index estimation.
//!
//! - [`hill`]: the Hill estimator, the maximum likelihood estimator of γ in a
//!   purely Pareto tail, computed from the top k log-spacings;
//! - [`gamma_expectile_based`]: the expectile-based estimator derived from
//!   the asymptotic proportionality F̄(ξ_τ)/(1−τ) → γ⁻¹ − 1;
//! - [`second_order`]: moment-ratio estimates of the second-order parameter
//!   ρ and the scale β of the regular-variation remainder, the ingredients
//!   of the bias term used by adjusted confidence intervals;
//! - [`bias_term`]: b̂ = γ̂ᴴ β̂ (1−τₙ)^{−ρ̂} / (1−ρ̂).

use crate::error::{Error, Result};
use crate::sample::{empirical_survival, floor_count, Level, Series, TailFit, TailMethod};

/// Hill estimator γ̂ᴴ = k⁻¹ Σ_{i=1..k} log(Y_{n−i+1,n} / Y_{n−k,n}).
///
/// Requires 1 ≤ k ≤ n−1 and a strictly positive threshold Y_{n−k,n}.
pub fn hill(s: &Series, k: usize) -> Result<TailFit> {
    let n = s.n();
    if k < 1 || k >= n {
        return Err(Error::KOutOfRange { k, max: n.saturating_sub(1), n });
    }
    let threshold = s.order_statistic(n - k);
    if threshold <= 0.0 {
        return Err(Error::NonPositiveThreshold { threshold });
    }
    let log_thr = threshold.ln();
    let mut acc = 0.0;
    for i in 1..=k {
        acc += s.order_statistic(n - i + 1).ln() - log_thr;
    }
    Ok(TailFit {
        gamma: acc / k as f64,
        method: TailMethod::Hill,
        k,
        tau_n: Level::from_k(k, n)?,
    })
}

/// Result of the expectile-based tail-index estimator. When no observation
/// exceeds the intermediate expectile the estimator degenerates to 1; that is
/// flagged rather than treated as an error because it legitimately happens
/// for very high τₙ on short samples.
#[derive(Debug, Clone, Copy)]
pub struct ExpectileBasedGamma {
    pub fit: TailFit,
    pub no_exceedances: bool,
}

/// Expectile-based estimator γ̂ᴱ = (1 + F̄̂ₙ(ξ̃_{τₙ})/(1−τₙ))⁻¹, where
/// ξ̃_{τₙ} is the LAWS expectile estimate at τₙ. Output lies in (0, 1].
pub fn gamma_expectile_based(s: &Series, tau_n: Level, xi_tilde: f64) -> ExpectileBasedGamma {
    let n = s.n();
    let survival = empirical_survival(s, xi_tilde);
    let one_minus_tau = 1.0 - tau_n.tau();
    let gamma = 1.0 / (1.0 + survival / one_minus_tau);
    let k = floor_count(n as f64 * one_minus_tau);
    ExpectileBasedGamma {
        fit: TailFit { gamma, method: TailMethod::ExpectileBased, k, tau_n },
        no_exceedances: survival == 0.0,
    }
}

/// Second-order regular variation estimates: the convergence-rate parameter
/// ρ ≤ 0 and the scale β of the remainder function A(t) = γ β t^ρ.
#[derive(Debug, Clone, Copy)]
pub struct SecondOrderFit {
    pub rho_hat: f64,
    pub beta_hat: f64,
    pub k_used: usize,
}

impl SecondOrderFit {
    /// Externally supplied (ρ̂, β̂), e.g. reproduced from another package.
    /// ρ̂ is clamped to the same [−10, −0.01] range as the internal
    /// estimator so the bias exponent stays finite.
    pub fn manual(rho_hat: f64, beta_hat: f64) -> Result<Self> {
        if !rho_hat.is_finite() || !beta_hat.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rho/beta",
                reason: "second-order overrides must be finite".into(),
            });
        }
        if rho_hat > 0.0 {
            return Err(Error::InvalidParameter {
                name: "rho",
                reason: format!("second-order parameter must be <= 0, got {rho_hat}"),
            });
        }
        Ok(SecondOrderFit { rho_hat: rho_hat.clamp(-10.0, -0.01), beta_hat, k_used: 0 })
    }
}

const SECOND_ORDER_MIN_K: usize = 50;

/// Detectability floor for the second-order curvature. The moment statistics
/// resolve ρ against their own sampling noise only when |ρ|·√k clears a few
/// standard deviations; below that the scale estimate is a ratio of noises.
const SECOND_ORDER_DETECTION_Z: f64 = 6.0;

/// Default fraction for [`second_order`]: nearly all of the sample,
/// k = ⌊n^0.995⌋, capped so the threshold order statistic stays strictly
/// positive (order statistics at or below zero carry no log-spacing
/// information). Errors when fewer than [`SECOND_ORDER_MIN_K`]+1 positive
/// observations are available.
pub fn default_k_rho(s: &Series) -> Result<usize> {
    let n = s.n();
    let n_pos = s.values().iter().filter(|&&v| v > 0.0).count();
    if n_pos < SECOND_ORDER_MIN_K + 1 {
        return Err(Error::InsufficientTail { k: n_pos.saturating_sub(1), min: SECOND_ORDER_MIN_K });
    }
    let k = ((n as f64).powf(0.995).floor() as usize).min(n_pos - 1);
    Ok(k)
}

/// Moment-ratio estimation of (ρ, β) on the top-k log-spacings.
///
/// ρ̂ uses the third-moment ratio statistic (tuning parameter 0)
///   Tₙ = (log M⁽¹⁾ − ½ log(M⁽²⁾/2)) / (½ log(M⁽²⁾/2) − ⅓ log(M⁽³⁾/6)),
///   ρ̂ = −|3(Tₙ−1)/(Tₙ−3)|,
/// with M⁽ʲ⁾ = k⁻¹ Σ (log Y_{n−i+1,n} − log Y_{n−k,n})ʲ, clamped to
/// [−10, −0.01].
///
/// β̂ uses the scaled-spacings regression form with
/// Uᵢ = i(log Y_{n−i+1,n} − log Y_{n−i,n}):
///   β̂ = (k/n)^ρ̂ · [d(ρ̂)·D(0) − D(ρ̂)] / [d(ρ̂)·D(ρ̂) − D(2ρ̂)],
/// where d(a) = k⁻¹ Σ (i/k)^{−a} and D(a) = k⁻¹ Σ (i/k)^{−a} Uᵢ.
///
/// When |ρ̂|·√k falls under [`SECOND_ORDER_DETECTION_Z`] the curvature is not
/// resolvable against sampling noise (β̂'s numerator and denominator are both
/// O(ρ̂)-weighted zero-mean sums there, so their ratio is unstable) and β̂ is
/// reported as 0: no measurable second-order scale.
///
/// The choice of k for this estimator is conventionally much larger than the
/// Hill k (a fraction of n close to one, restricted to positive data).
pub fn second_order(s: &Series, k: usize) -> Result<SecondOrderFit> {
    let n = s.n();
    if k < SECOND_ORDER_MIN_K {
        return Err(Error::InsufficientTail { k, min: SECOND_ORDER_MIN_K });
    }
    if k >= n {
        return Err(Error::KOutOfRange { k, max: n.saturating_sub(1), n });
    }
    let threshold = s.order_statistic(n - k);
    if threshold <= 0.0 {
        return Err(Error::NonPositiveThreshold { threshold });
    }

    let log_thr = threshold.ln();
    let (mut m1, mut m2, mut m3) = (0.0, 0.0, 0.0);
    for i in 1..=k {
        let d = s.order_statistic(n - i + 1).ln() - log_thr;
        m1 += d;
        m2 += d * d;
        m3 += d * d * d;
    }
    let kf = k as f64;
    m1 /= kf;
    m2 /= kf;
    m3 /= kf;
    if m1 <= 0.0 || m2 <= 0.0 || m3 <= 0.0 {
        return Err(Error::Numerical(
            "degenerate log-spacings in second-order estimation".into(),
        ));
    }

    let num = m1.ln() - 0.5 * (m2 / 2.0).ln();
    let den = 0.5 * (m2 / 2.0).ln() - (m3 / 6.0).ln() / 3.0;
    if den == 0.0 {
        return Err(Error::Numerical("second-order moment ratio degenerate".into()));
    }
    let t = num / den;
    let rho_raw = -(3.0 * (t - 1.0) / (t - 3.0)).abs();
    if rho_raw.is_nan() {
        return Err(Error::Numerical("second-order moment ratio undefined".into()));
    }
    let rho = rho_raw.clamp(-10.0, -0.01);

    // Curvature this close to zero sits below the sampling noise floor of
    // the statistics that would estimate its scale: β̂'s numerator and
    // denominator both degenerate to O(ρ̂)-weighted noise sums, and their
    // ratio can land anywhere. Report no measurable second-order scale
    // instead, which keeps downstream bias adjustments at zero.
    if rho.abs() * kf.sqrt() < SECOND_ORDER_DETECTION_Z {
        return Ok(SecondOrderFit { rho_hat: rho, beta_hat: 0.0, k_used: k });
    }

    // β̂ from the scaled spacings.
    let mut d_rho = 0.0;
    let (mut big_d0, mut big_d_rho, mut big_d_2rho) = (0.0, 0.0, 0.0);
    for i in 1..=k {
        let u = i as f64 * (s.order_statistic(n - i + 1).ln() - s.order_statistic(n - i).ln());
        let frac = i as f64 / kf;
        let w_rho = frac.powf(-rho);
        d_rho += w_rho;
        big_d0 += u;
        big_d_rho += w_rho * u;
        big_d_2rho += w_rho * w_rho * u;
    }
    d_rho /= kf;
    big_d0 /= kf;
    big_d_rho /= kf;
    big_d_2rho /= kf;

    let denom = d_rho * big_d_rho - big_d_2rho;
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::Numerical("second-order scale estimate degenerate".into()));
    }
    let beta = (kf / n as f64).powf(rho) * (d_rho * big_d0 - big_d_rho) / denom;
    if !beta.is_finite() {
        return Err(Error::Numerical("second-order scale estimate overflowed".into()));
    }

    Ok(SecondOrderFit { rho_hat: rho, beta_hat: beta, k_used: k })
}

/// Bias term of the adjusted confidence interval:
/// b̂ = γ̂ᴴ β̂ (1−τₙ)^{−ρ̂} / (1−ρ̂). `fit` is expected to be a Hill fit.
pub fn bias_term(fit: &TailFit, so: &SecondOrderFit) -> f64 {
    debug_assert_eq!(fit.method, TailMethod::Hill);
    let one_minus_tau = 1.0 - fit.tau_n.tau();
    fit.gamma * so.beta_hat * one_minus_tau.powf(-so.rho_hat) / (1.0 - so.rho_hat)
}
