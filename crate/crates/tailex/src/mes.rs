//! Marginal expected shortfall for a paired series (X, Y): the expected
//! loss on X given that Y is in its far tail.
//!
//! The tail conditioning event can be anchored at three intermediate
//! thresholds z̄ for Y — its empirical quantile, its direct (LAWS) expectile,
//! or its quantile-based expectile — and the in-sample conditional mean
//!
//!   [Σ X_t 𝟙(X_t > 0, Y_t > z̄)] / [Σ 𝟙(Y_t > z̄)]
//!
//! is then pushed to the extreme level with the Weissman factor
//! ((1−τ′)/(1−τₙ))^{−γ̂_X}, where γ̂_X is the tail index of X (the variable
//! being averaged — it, not Y, drives how the conditional mean scales).

use crate::error::{Error, Result};
use crate::expectile::{
    laws_expectile, qb_expectile, tau_prime_hat, CompositeParts, ExpectileConfig,
    ExtrapolationSpec,
};
use crate::sample::{empirical_quantile, Level, Series};

/// Two series observed pairwise: X (the position) and Y (the conditioning
/// variable, e.g. a market index).
#[derive(Debug, Clone)]
pub struct BivariateSeries {
    x: Series,
    y: Series,
}

impl BivariateSeries {
    pub fn new(x: Series, y: Series) -> Result<Self> {
        if x.n() != y.n() {
            return Err(Error::Data(format!(
                "paired series must have equal length, got {} and {}",
                x.n(),
                y.n()
            )));
        }
        Ok(BivariateSeries { x, y })
    }

    pub fn from_values(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::new(Series::new(x)?, Series::new(y)?)
    }

    pub fn x(&self) -> &Series {
        &self.x
    }

    pub fn y(&self) -> &Series {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }
}

/// Which intermediate threshold z̄ anchors the conditioning event {Y > z̄}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdKind {
    /// Empirical quantile q̂_{τₙ} of Y.
    Quantile,
    /// Direct (LAWS) expectile ξ̃_{τₙ} of Y.
    LawsExpectile,
    /// Quantile-based expectile ξ̂_{τₙ} = (γ̂_Y⁻¹−1)^{−γ̂_Y} q̂_{τₙ} of Y.
    QbExpectile,
}

/// The two expectile-threshold variants of extreme MES.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XmesVariant {
    Laws,
    Qb,
}

impl XmesVariant {
    pub fn threshold(self) -> ThresholdKind {
        match self {
            XmesVariant::Laws => ThresholdKind::LawsExpectile,
            XmesVariant::Qb => ThresholdKind::QbExpectile,
        }
    }
}

/// Levels and threshold choice for one extrapolated MES estimate.
#[derive(Debug, Clone, Copy)]
pub struct MesSpec {
    tau_n: Level,
    target: Level,
    threshold: ThresholdKind,
}

impl MesSpec {
    pub fn new(tau_n: Level, target: Level, threshold: ThresholdKind) -> Result<Self> {
        // reuse the ordering check
        ExtrapolationSpec::new(tau_n, target)?;
        Ok(MesSpec { tau_n, target, threshold })
    }

    pub fn tau_n(&self) -> Level {
        self.tau_n
    }

    pub fn target(&self) -> Level {
        self.target
    }

    pub fn threshold(&self) -> ThresholdKind {
        self.threshold
    }
}

/// In-sample tail ratio [Σ X_t 𝟙(X_t > 0, Y_t > z̄)] / [Σ 𝟙(Y_t > z̄)].
///
/// Exceedance of Y is strict; X enters only through its positive part, so
/// the ratio is nonnegative. No observation of Y above z̄ is an error — the
/// conditional mean is undefined there.
pub fn mes_tail_ratio(b: &BivariateSeries, threshold: f64) -> Result<f64> {
    let xs = b.x.values();
    let ys = b.y.values();
    let mut num = 0.0;
    let mut count = 0usize;
    for (&x, &y) in xs.iter().zip(ys) {
        if y > threshold {
            count += 1;
            if x > 0.0 {
                num += x;
            }
        }
    }
    if count == 0 {
        return Err(Error::EmptyTail { threshold });
    }
    Ok(num / count as f64)
}

fn threshold_value(
    b: &BivariateSeries,
    tau_n: Level,
    kind: ThresholdKind,
    gamma_y: f64,
    cfg: &ExpectileConfig,
) -> Result<f64> {
    match kind {
        ThresholdKind::Quantile => empirical_quantile(&b.y, tau_n),
        ThresholdKind::LawsExpectile => laws_expectile(&b.y, tau_n, cfg),
        ThresholdKind::QbExpectile => qb_expectile(&b.y, tau_n, gamma_y),
    }
}

/// Extrapolated MES estimate: the in-sample tail ratio at the spec's
/// threshold, scaled by ((1−τ′)/(1−τₙ))^{−γ̂_X}.
///
/// `gamma_y` is only consulted for the quantile-based expectile threshold.
pub fn mes_extrapolated(
    b: &BivariateSeries,
    spec: &MesSpec,
    gamma_x: f64,
    gamma_y: f64,
    cfg: &ExpectileConfig,
) -> Result<f64> {
    let z = threshold_value(b, spec.tau_n, spec.threshold, gamma_y, cfg)?;
    let ratio = mes_tail_ratio(b, z)?;
    extrapolate_ratio(ratio, spec.tau_n, spec.target, gamma_x)
}

fn extrapolate_ratio(ratio: f64, tau_n: Level, target: Level, gamma_x: f64) -> Result<f64> {
    let extrap = ExtrapolationSpec::new(tau_n, target)?;
    Ok(ratio * extrap.factor(gamma_x)?)
}

/// Quantile-threshold MES extrapolated straight to the quantile level α:
/// estimates E[X | Y > q_{Y,α}].
pub fn qmes_weissman(
    b: &BivariateSeries,
    tau_n: Level,
    alpha: Level,
    gamma_x: f64,
) -> Result<f64> {
    let z = empirical_quantile(&b.y, tau_n)?;
    let ratio = mes_tail_ratio(b, z)?;
    extrapolate_ratio(ratio, tau_n, alpha, gamma_x)
}

/// Expectile-threshold MES at the calibrated level τ̂′(α), computed with
/// γ̂_Y (the conditioning tail sets the level map) and extrapolated with
/// γ̂_X. Estimates E[X | Y > ξ_{Y,τ̂′(α)}] ≈ E[X | Y > q_{Y,α}].
pub fn composite_xmes(
    b: &BivariateSeries,
    tau_n: Level,
    alpha: Level,
    variant: XmesVariant,
    gamma_x: f64,
    gamma_y: f64,
    cfg: &ExpectileConfig,
) -> Result<CompositeParts> {
    let tau_prime = tau_prime_hat(alpha, gamma_y)?;
    let z = threshold_value(b, tau_n, variant.threshold(), gamma_y, cfg)?;
    let base = mes_tail_ratio(b, z)?;
    let value = extrapolate_ratio(base, tau_n, tau_prime, gamma_x)?;
    Ok(CompositeParts { gamma: gamma_x, base, tau_prime, value })
}
