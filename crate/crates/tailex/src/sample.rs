//! Sample containers, order statistics, empirical distribution/quantile
//! functions and tail-level bookkeeping shared by all estimators.
//!
//! Conventions, used verbatim by every downstream formula:
//! - order statistics are 1-based: Y_{1,n} ≤ … ≤ Y_{n,n};
//! - the empirical quantile at level τ is the order statistic
//!   q̂_τ = Y_{n−⌊n(1−τ)⌋,n} (no interpolation);
//! - the empirical distribution function uses average ranks on ties.

use crate::error::{Error, Result};
use crate::inference::ConfidenceInterval;

/// A univariate sample held in observation order together with its ascending
/// order statistics. Values must be finite (NaN would poison every
/// order-statistic comparison).
#[derive(Debug, Clone)]
pub struct Series {
    values: Vec<f64>,
    sorted: Vec<f64>,
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Data("empty sample".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite value in sample: {bad}")));
        }
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values are totally ordered"));
        Ok(Series { values, sorted })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Values in original observation order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Ascending order statistics Y_{1,n} ≤ … ≤ Y_{n,n}.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// 1-based order statistic Y_{i,n}.
    pub fn order_statistic(&self, i: usize) -> f64 {
        assert!(i >= 1 && i <= self.n(), "order statistic index out of range");
        self.sorted[i - 1]
    }
}

/// Whether a probability level is an intermediate level (within-sample,
/// n(1−τ) → ∞ regime) or an extreme one (at or beyond the sample range,
/// requiring extrapolation). The tag is informational only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelKind {
    Intermediate,
    Extreme,
}

/// A probability level τ ∈ (0,1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    tau: f64,
    kind: LevelKind,
}

impl Level {
    pub fn intermediate(tau: f64) -> Result<Self> {
        Self::new(tau, LevelKind::Intermediate)
    }

    pub fn extreme(tau: f64) -> Result<Self> {
        Self::new(tau, LevelKind::Extreme)
    }

    fn new(tau: f64, kind: LevelKind) -> Result<Self> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: format!("level must lie in (0,1), got {tau}"),
            });
        }
        Ok(Level { tau, kind })
    }

    /// The intermediate level τₙ = 1 − k/n.
    pub fn from_k(k: usize, n: usize) -> Result<Self> {
        if k < 1 || k >= n {
            return Err(Error::KOutOfRange { k, max: n.saturating_sub(1), n });
        }
        Self::intermediate(1.0 - k as f64 / n as f64)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn kind(&self) -> LevelKind {
        self.kind
    }
}

/// ⌊x⌋ for a nonnegative count, guarding against values that sit a few ulps
/// below an integer — which happens systematically when τ is reconstructed
/// as 1 − k/n and n(1−τ) is formed again in floating point.
pub(crate) fn floor_count(x: f64) -> usize {
    debug_assert!(x >= 0.0);
    let r = x.round();
    if (x - r).abs() < 1e-9 * r.abs().max(1.0) {
        r as usize
    } else {
        x.floor() as usize
    }
}

/// Which tail functional a [`RiskEstimate`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiskKind {
    Expectile,
    Quantile,
    Qmes,
    Xmes,
}

/// A point estimate of a tail risk measure at a given level, optionally with
/// a confidence interval attached. A bias-adjusted interval can exclude the
/// point itself; only lower ≤ upper is guaranteed.
#[derive(Debug, Clone)]
pub struct RiskEstimate {
    pub value: f64,
    pub level: Level,
    pub kind: RiskKind,
    pub ci: Option<ConfidenceInterval>,
}

/// Which tail-index estimator produced a [`TailFit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailMethod {
    Hill,
    ExpectileBased,
}

/// A tail-index estimate γ̂ together with the effective sample fraction it
/// was computed from: k top order statistics, intermediate level
/// τₙ = 1 − k/n.
#[derive(Debug, Clone, Copy)]
pub struct TailFit {
    pub gamma: f64,
    pub method: TailMethod,
    pub k: usize,
    pub tau_n: Level,
}

/// Empirical quantile q̂_τ = Y_{n−⌊n(1−τ)⌋,n} (1-based order statistics).
pub fn empirical_quantile(s: &Series, tau: Level) -> Result<f64> {
    let n = s.n();
    let m = floor_count(n as f64 * (1.0 - tau.tau()));
    if m >= n {
        return Err(Error::TauTooSmall { tau: tau.tau(), n });
    }
    Ok(s.order_statistic(n - m))
}

/// Empirical survival function F̄̂ₙ(u) = n⁻¹ Σ 𝟙{Y_t > u}.
pub fn empirical_survival(s: &Series, u: f64) -> f64 {
    let below_or_eq = s.sorted().partition_point(|&y| y <= u);
    (s.n() - below_or_eq) as f64 / s.n() as f64
}

/// Empirical distribution function values F̂ₙ(Y_t) = rank(Y_t)/n in
/// observation order; ties get the average of their ranks.
pub fn ranks_to_uniform(s: &Series) -> Vec<f64> {
    let n = s.n();
    let values = s.values();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        // average of the 1-based ranks i+1 ..= j+1
        let avg = (i + j + 2) as f64 / 2.0;
        for t in i..=j {
            out[idx[t]] = avg / n as f64;
        }
        i = j + 1;
    }
    out
}
