//! Confidence intervals for extrapolated tail estimates, with an asymptotic
//! variance that survives serial dependence.
//!
//! The Gaussian limit of the extrapolated estimators acts on the log scale
//! with standard error √(ŵ/(n(1−τₙ))), giving interval limits
//!
//!   estimate · ((1−τₙ)/(1−τ′))^{−b̂ ± z_{(1+c)/2} √(ŵ/(n(1−τₙ)))}
//!
//! at confidence c. Three variants of (ŵ, b̂):
//! - `iid`: ŵ = γ̂², b̂ = 0 — the independent-data variance;
//! - `d`: ŵ = γ̂² σ̂²ₙ / (rₙ(1−τₙ)) from [`block_variance`], b̂ = 0 — σ̂²ₙ
//!   is the sample variance of exceedance counts over disjoint big blocks,
//!   which picks up the serial clustering of tail events;
//! - `d-adj`: the `d` variance plus the bias exponent
//!   b̂ = γ̂ᴴ β̂ (1−τₙ)^{−ρ̂}/(1−ρ̂) from the second-order fit, which
//!   recentres the interval rather than widening it.
//!
//! Block lengths default to rₙ = ⌊ln² n⌋ with a gap wide enough to clear the
//! measured autocorrelations of the series and its squares
//! ([`default_blocks`]). Quantile intervals reuse the same block variance
//! engine rather than a separate quantile-specific variance formula — one
//! engine, uniformly applied.

use crate::dist::normal_quantile;
use crate::error::{Error, Result};
use crate::mes::BivariateSeries;
use crate::sample::{floor_count, ranks_to_uniform, Level, RiskEstimate, Series, TailFit};
use crate::tail::{bias_term, default_k_rho, hill, second_order, SecondOrderFit};

/// Which variance/bias construction an interval used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CiVariant {
    Iid,
    Dependent,
    DependentAdjusted,
}

impl CiVariant {
    pub fn label(self) -> &'static str {
        match self {
            CiVariant::Iid => "iid",
            CiVariant::Dependent => "d",
            CiVariant::DependentAdjusted => "d-adj",
        }
    }

    pub fn parse(s: &str) -> Option<CiVariant> {
        match s {
            "iid" => Some(CiVariant::Iid),
            "d" => Some(CiVariant::Dependent),
            "d-adj" | "d_adj" => Some(CiVariant::DependentAdjusted),
            _ => None,
        }
    }
}

/// A two-sided confidence interval, carrying the variance factor it was
/// built from. With a nonzero bias adjustment the interval is recentred and
/// need not contain the point estimate; lower ≤ upper always holds.
#[derive(Debug, Clone, Copy)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    /// Nominal coverage, e.g. 0.95.
    pub level: f64,
    pub variant: CiVariant,
    /// The ŵ plugged into the standard error (γ̂² for `iid`).
    pub w_hat: f64,
}

// ---------------------------------------------------------------------------
// block scheme
// ---------------------------------------------------------------------------

/// Big-block/small-block layout: m = ⌊n/(r+l)⌋ blocks of r observations,
/// each followed by a gap of l that decouples consecutive blocks; trailing
/// data after the last complete block are ignored.
#[derive(Debug, Clone, Copy)]
pub struct BlockScheme {
    r: usize,
    l: usize,
    n: usize,
    m: usize,
}

impl BlockScheme {
    pub fn new(r: usize, l: usize, n: usize) -> Result<Self> {
        if r < 1 {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: "block length must be at least 1".into(),
            });
        }
        let m = n / (r + l);
        if m < 2 {
            return Err(Error::SampleTooShort { m_n: m });
        }
        Ok(BlockScheme { r, l, n, m })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of big blocks m.
    pub fn m(&self) -> usize {
        self.m
    }
}

/// A data-driven block scheme plus how it was arrived at.
#[derive(Debug, Clone, Copy)]
pub struct BlockSelection {
    pub scheme: BlockScheme,
    /// Last lag of the initial stretch (from lag 1 up) over which the
    /// autocorrelation of the series or of its squares stays at or above 0.1
    /// in absolute value; 0 when lag 1 is already clear. Isolated excursions
    /// at later lags are sampling noise and do not extend the stretch.
    pub last_dependent_lag: usize,
    /// True when dependence persisted through every scanned lag and the gap
    /// fell back to n/10.
    pub fallback: bool,
}

/// Sample autocorrelations of one series, evaluated lag by lag.
struct AcfScanner {
    centered: Vec<f64>,
    denom: f64,
}

impl AcfScanner {
    fn new(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
        let denom = centered.iter().map(|c| c * c).sum();
        Self { centered, denom }
    }

    fn violates(&self, h: usize) -> bool {
        if self.denom == 0.0 {
            return false;
        }
        let num: f64 = (0..self.centered.len() - h)
            .map(|t| self.centered[t] * self.centered[t + h])
            .sum();
        (num / self.denom).abs() >= 0.1
    }
}

/// Choose (r, l) from the data: r = ⌊ln² n⌋, and the gap l = ⌊C ln n⌋ with C
/// the smallest positive integer such that l reaches the first lag at which
/// the autocorrelations of both the series and its squares have fallen below
/// 0.1 in absolute value — the end of the initial dependent stretch, scanning
/// lags 1..⌊n/4⌋. If that stretch persists through every scanned lag, the gap
/// falls back to ⌊n/10⌋ and the selection is flagged.
pub fn default_blocks(s: &Series) -> Result<BlockSelection> {
    let n = s.n();
    if n < 100 {
        return Err(Error::Data(format!(
            "block selection needs at least 100 observations, got {n}"
        )));
    }
    let ln_n = (n as f64).ln();
    let r = (ln_n * ln_n).floor() as usize;
    let max_lag = n / 4;

    let squares: Vec<f64> = s.values().iter().map(|v| v * v).collect();
    let series_acf = AcfScanner::new(s.values());
    let squares_acf = AcfScanner::new(&squares);
    let run = (1..=max_lag)
        .take_while(|&h| series_acf.violates(h) || squares_acf.violates(h))
        .count();

    let (l, fallback) = if run == max_lag {
        (n / 10, true)
    } else {
        let target = (run + 1) as f64;
        let c = (target / ln_n).ceil();
        ((c * ln_n).floor() as usize, false)
    };

    Ok(BlockSelection {
        scheme: BlockScheme::new(r.max(1), l, n)?,
        last_dependent_lag: run,
        fallback,
    })
}

/// [`default_blocks`] for paired data: the rule is applied to the X
/// component, whose tail index drives the intervals.
pub fn default_blocks_bivariate(b: &BivariateSeries) -> Result<BlockSelection> {
    default_blocks(b.x())
}

// ---------------------------------------------------------------------------
// the dependence-aware variance
// ---------------------------------------------------------------------------

/// Dependence-aware variance factor ŵ = γ̂² σ̂²ₙ / (rₙ(1−τₙ)), where σ̂²ₙ is
/// the sample variance (divisor m−1) of the per-block exceedance counts
/// Z_j = Σ_{t=1+j(r+l)}^{r+j(r+l)} 𝟙{F̂ₙ(Y_t) > τₙ}, j = 0..m−1.
///
/// Counting in rank scale makes σ̂²ₙ invariant under strictly increasing
/// transformations of the data. On independent data the counts are close to
/// Binomial(r, 1−τₙ), σ̂²ₙ ≈ r(1−τₙ), and ŵ ≈ γ̂².
pub fn block_variance(
    s: &Series,
    tau_n: Level,
    scheme: &BlockScheme,
    fit: &TailFit,
) -> Result<f64> {
    if scheme.n != s.n() {
        return Err(Error::InvalidParameter {
            name: "scheme",
            reason: format!("block scheme built for n={}, series has n={}", scheme.n, s.n()),
        });
    }
    let ranks = ranks_to_uniform(s);
    let tau = tau_n.tau();
    let ell = scheme.r + scheme.l;
    let mut counts = Vec::with_capacity(scheme.m);
    for j in 0..scheme.m {
        let start = j * ell;
        let z = ranks[start..start + scheme.r].iter().filter(|&&u| u > tau).count();
        counts.push(z as f64);
    }
    let m = scheme.m as f64;
    let mean = counts.iter().sum::<f64>() / m;
    let sigma2: f64 =
        counts.iter().map(|z| (z - mean) * (z - mean)).sum::<f64>() / (m - 1.0);
    Ok(fit.gamma * fit.gamma * sigma2 / (scheme.r as f64 * (1.0 - tau)))
}

/// The (ŵ, b̂) pair a [`CiVariant`] plugs into the interval.
#[derive(Debug, Clone, Copy)]
pub struct CiInputs {
    pub w_hat: f64,
    pub b_hat: f64,
}

/// Assemble ŵ and b̂ for one variant. `scheme` defaults to
/// [`default_blocks`] and `so` to a [`second_order`] fit at its default
/// fraction; both are only consulted by the variants that need them.
pub fn ci_inputs(
    s: &Series,
    fit: &TailFit,
    variant: CiVariant,
    scheme: Option<&BlockScheme>,
    so: Option<&SecondOrderFit>,
) -> Result<CiInputs> {
    match variant {
        CiVariant::Iid => Ok(CiInputs { w_hat: fit.gamma * fit.gamma, b_hat: 0.0 }),
        CiVariant::Dependent | CiVariant::DependentAdjusted => {
            let owned;
            let scheme = match scheme {
                Some(sch) => sch,
                None => {
                    owned = default_blocks(s)?.scheme;
                    &owned
                }
            };
            let w_hat = block_variance(s, fit.tau_n, scheme, fit)?;
            let b_hat = if variant == CiVariant::DependentAdjusted {
                let owned_so;
                let so = match so {
                    Some(f) => f,
                    None => {
                        owned_so = second_order(s, default_k_rho(s)?)?;
                        &owned_so
                    }
                };
                bias_term(fit, so)
            } else {
                0.0
            };
            Ok(CiInputs { w_hat, b_hat })
        }
    }
}

// ---------------------------------------------------------------------------
// the intervals
// ---------------------------------------------------------------------------

/// Asymptotic confidence interval around an extrapolated estimate.
///
/// `fit` supplies the effective tail count n(1−τₙ) = k for the standard
/// error; ŵ and b̂ come from [`ci_inputs`] (or γ̂²/0 for the independence
/// variant). The two exponent branches −b̂ ± z·√(ŵ/k) are evaluated and
/// then ordered — with ratio > 1 the minus branch is the lower limit, but
/// the code does not rely on that. ŵ = 0 degenerates to [point, point].
pub fn ci_extreme(
    point: &RiskEstimate,
    tau_n: Level,
    tau_prime: Level,
    fit: &TailFit,
    w_hat: f64,
    b_hat: f64,
    level: f64,
    variant: CiVariant,
) -> Result<ConfidenceInterval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter {
            name: "level",
            reason: format!("confidence level must lie in (0,1), got {level}"),
        });
    }
    if !(w_hat >= 0.0) || !w_hat.is_finite() {
        return Err(Error::Numerical(format!(
            "variance factor must be nonnegative and finite, got {w_hat}"
        )));
    }
    if !b_hat.is_finite() {
        return Err(Error::Numerical(format!("bias exponent is not finite: {b_hat}")));
    }
    if tau_prime.tau() < tau_n.tau() {
        return Err(Error::InvalidParameter {
            name: "tau_prime",
            reason: "estimate level precedes the intermediate level".into(),
        });
    }
    if !(point.value > 0.0) {
        return Err(Error::InvalidParameter {
            name: "point",
            reason: format!("interval requires a positive estimate, got {}", point.value),
        });
    }

    let z = normal_quantile(0.5 + level / 2.0);
    let se = (w_hat / fit.k as f64).sqrt();
    let ratio = (1.0 - tau_n.tau()) / (1.0 - tau_prime.tau());
    let a = point.value * ratio.powf(-b_hat + z * se);
    let b = point.value * ratio.powf(-b_hat - z * se);
    let (lower, upper) = if a <= b { (a, b) } else { (b, a) };
    Ok(ConfidenceInterval { lower, upper, level, variant, w_hat })
}

/// Interval for an extrapolated MES estimate. The variance inputs come from
/// the X component — its Hill fit at k = n(1−τₙ) and its block exceedance
/// counts — because the extrapolation acts on the X tail; the level ratio
/// comes from the point's own level (the calibrated τ̂′(α) for expectile
/// thresholds, α itself for the quantile threshold).
pub fn ci_xmes(
    point: &RiskEstimate,
    b: &BivariateSeries,
    tau_n: Level,
    scheme: &BlockScheme,
    level: f64,
    variant: CiVariant,
) -> Result<ConfidenceInterval> {
    let n = b.n();
    let k = floor_count(n as f64 * (1.0 - tau_n.tau()));
    let fit_x = hill(b.x(), k)?;
    let inputs = ci_inputs(b.x(), &fit_x, variant, Some(scheme), None)?;
    ci_extreme(point, tau_n, point.level, &fit_x, inputs.w_hat, inputs.b_hat, level, variant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{RiskKind, TailMethod};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn series(v: Vec<f64>) -> Series {
        Series::new(v).unwrap()
    }

    fn white_noise(n: usize, seed: u64) -> Series {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        series((0..n).map(|_| crate::dist::normal_quantile(rng.gen_range(1e-12..1.0))).collect())
    }

    fn ar1(n: usize, phi: f64, seed: u64) -> Series {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut y = 0.0;
        let mut out = Vec::with_capacity(n + 500);
        for _ in 0..n + 500 {
            y = phi * y + crate::dist::normal_quantile(rng.gen_range(1e-12..1.0));
            out.push(y);
        }
        series(out.split_off(500))
    }

    fn fit_at(gamma: f64, k: usize, tau_n: Level) -> TailFit {
        TailFit { gamma, method: TailMethod::Hill, k, tau_n }
    }

    #[test]
    fn scheme_guards() {
        assert!(BlockScheme::new(0, 5, 100).is_err());
        assert!(matches!(
            BlockScheme::new(60, 0, 100),
            Err(Error::SampleTooShort { m_n: 1 })
        ));
        let sch = BlockScheme::new(10, 3, 100).unwrap();
        assert_eq!(sch.m(), 7);
    }

    #[test]
    fn block_counts_hand_computed() {
        // ranks of 8..1 are 8..1; τ = 0.5 keeps ranks 5..8; blocks of 2:
        // counts (2,2,0,0), sample variance 4/3, ŵ = γ̂²·(4/3)/(2·0.5)
        let tau = Level::intermediate(0.5).unwrap();
        let s = series(vec![8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0]);
        let sch = BlockScheme::new(2, 0, 8).unwrap();
        let fit = fit_at(0.5, 4, tau);
        let w = block_variance(&s, tau, &sch, &fit).unwrap();
        assert!((w - 0.25 * (4.0 / 3.0) / 1.0).abs() < 1e-15);

        // alternating arrangement: every block holds exactly one top-half
        // value → all Z_j equal → ŵ = 0
        let s2 = series(vec![8.0, 1.0, 7.0, 2.0, 6.0, 3.0, 5.0, 4.0]);
        let w2 = block_variance(&s2, tau, &sch, &fit).unwrap();
        assert_eq!(w2, 0.0);
    }

    #[test]
    fn block_counts_skip_the_gaps() {
        // n = 9, r = 2, l = 1: observed windows {1,2},{4,5},{7,8} (1-based);
        // the three largest values sit in the gaps (positions 3,6,9), so no
        // block sees an exceedance of τ = 2/3.
        let tau = Level::intermediate(2.0 / 3.0).unwrap();
        let s = series(vec![1.0, 2.0, 9.0, 3.0, 4.0, 8.0, 5.0, 6.0, 7.0]);
        let sch = BlockScheme::new(2, 1, 9).unwrap();
        let w = block_variance(&s, tau, &sch, &fit_at(0.4, 3, tau)).unwrap();
        assert_eq!(w, 0.0);
    }

    #[test]
    fn block_variance_is_rank_invariant() {
        let s = ar1(2000, 0.6, 4);
        let transformed = series(s.values().iter().map(|v| (v * 0.3).exp()).collect());
        let sch = BlockScheme::new(50, 10, 2000).unwrap();
        let tau = Level::intermediate(0.95).unwrap();
        let fit = fit_at(0.3, 100, tau);
        let v1 = block_variance(&s, tau, &sch, &fit).unwrap();
        let v2 = block_variance(&transformed, tau, &sch, &fit).unwrap();
        assert_eq!(v1, v2);
    }

    #[test]
    fn scheme_length_mismatch_rejected() {
        let s = white_noise(100, 1);
        let sch = BlockScheme::new(10, 0, 200).unwrap();
        let tau = Level::intermediate(0.9).unwrap();
        assert!(block_variance(&s, tau, &sch, &fit_at(0.3, 10, tau)).is_err());
    }

    #[test]
    fn default_blocks_white_noise() {
        // n = 2500: r = ⌊ln² 2500⌋ = 61; independent data keeps every |ACF|
        // below 0.1, so the gap is a single ln n unit: l = ⌊ln 2500⌋ = 7.
        let s = white_noise(2500, 19);
        let sel = default_blocks(&s).unwrap();
        assert_eq!(sel.scheme.r(), 61);
        assert_eq!(sel.scheme.l(), 7);
        assert_eq!(sel.last_dependent_lag, 0);
        assert!(!sel.fallback);
    }

    #[test]
    fn default_blocks_ar1_widens_gap() {
        // φ = 0.8: ACF ≈ 0.8^h crosses 0.1 near lag 10, so the gap grows to
        // the next multiple of ln n (≈ 15 at n = 2500).
        let s = ar1(2500, 0.8, 23);
        let sel = default_blocks(&s).unwrap();
        assert_eq!(sel.scheme.r(), 61);
        assert!(
            sel.last_dependent_lag >= 7 && sel.last_dependent_lag <= 16,
            "lag {}",
            sel.last_dependent_lag
        );
        assert!(sel.scheme.l() >= 14 && sel.scheme.l() <= 23, "l {}", sel.scheme.l());
        assert!(!sel.fallback);
    }

    #[test]
    fn default_blocks_long_memory_fallback() {
        // a deterministic trend keeps the ACF near 1 at every lag
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let s = series((0..2000).map(|t| t as f64 + rng.gen::<f64>()).collect());
        let sel = default_blocks(&s).unwrap();
        assert!(sel.fallback);
        assert_eq!(sel.scheme.l(), 200);
        assert_eq!(sel.last_dependent_lag, 500);
        assert!(default_blocks(&white_noise(99, 1)).is_err());
    }

    fn point_at(value: f64, tau_prime: f64) -> RiskEstimate {
        RiskEstimate {
            value,
            level: Level::extreme(tau_prime).unwrap(),
            kind: RiskKind::Quantile,
            ci: None,
        }
    }

    #[test]
    fn interval_limits_frozen_case() {
        // point 1.0, τₙ = 0.9, τ′ = 0.999, k = n(1−τₙ) = 100, ŵ = 0.25,
        // b̂ = 0, 95%: se = 0.05, ratio = 100 → limits 100^{∓1.96·0.05}
        let tau_n = Level::intermediate(0.9).unwrap();
        let tau_p = Level::extreme(0.999).unwrap();
        let p = point_at(1.0, 0.999);
        let fit = fit_at(0.5, 100, tau_n);
        let ci = ci_extreme(&p, tau_n, tau_p, &fit, 0.25, 0.0, 0.95, CiVariant::Iid).unwrap();
        assert!((ci.lower - 0.6368008017898126).abs() < 1e-12);
        assert!((ci.upper - 1.5703497815790561).abs() < 1e-12);
        assert_eq!(ci.variant, CiVariant::Iid);
        assert_eq!(ci.w_hat, 0.25);

        // 90% level narrows it
        let ci90 = ci_extreme(&p, tau_n, tau_p, &fit, 0.25, 0.0, 0.90, CiVariant::Iid).unwrap();
        assert!((ci90.lower - 0.6847225603448808).abs() < 1e-12);
        assert!((ci90.upper - 1.4604455262819447).abs() < 1e-12);
    }

    #[test]
    fn degenerate_intervals() {
        let tau_n = Level::intermediate(0.9).unwrap();
        let tau_p = Level::extreme(0.999).unwrap();
        let p = point_at(3.7, 0.999);
        let fit = fit_at(0.5, 100, tau_n);
        // ŵ = 0, b̂ = 0 → [point, point]
        let ci = ci_extreme(&p, tau_n, tau_p, &fit, 0.0, 0.0, 0.95, CiVariant::Dependent).unwrap();
        assert_eq!((ci.lower, ci.upper), (3.7, 3.7));
        // τ′ = τₙ → ratio 1 → [point, point] whatever ŵ
        let p2 = point_at(3.7, 0.9);
        let ci2 = ci_extreme(&p2, tau_n, tau_n, &fit, 5.0, 0.0, 0.95, CiVariant::Iid).unwrap();
        assert_eq!((ci2.lower, ci2.upper), (3.7, 3.7));
    }

    #[test]
    fn bias_exponent_recentres_multiplicatively() {
        // b̂ = 0.02 multiplies both limits by ratio^{−0.02}
        let tau_n = Level::intermediate(0.9).unwrap();
        let tau_p = Level::extreme(0.999).unwrap();
        let p = point_at(1.0, 0.999);
        let fit = fit_at(0.5, 100, tau_n);
        let ci = ci_extreme(&p, tau_n, tau_p, &fit, 0.25, 0.02, 0.95, CiVariant::DependentAdjusted)
            .unwrap();
        assert!((ci.lower - 0.5807692337428433).abs() < 1e-12);
        assert!((ci.upper - 1.4321760223802844).abs() < 1e-12);
        let shift = 100.0_f64.powf(-0.02);
        assert!((ci.lower - 0.6368008017898126 * shift).abs() < 1e-12);
        // zero bias supplied through the adjusted variant coincides with d
        let d = ci_extreme(&p, tau_n, tau_p, &fit, 0.25, 0.0, 0.95, CiVariant::Dependent).unwrap();
        let adj0 =
            ci_extreme(&p, tau_n, tau_p, &fit, 0.25, 0.0, 0.95, CiVariant::DependentAdjusted)
                .unwrap();
        assert_eq!((d.lower, d.upper), (adj0.lower, adj0.upper));
        // a large enough bias pushes the whole interval below the point
        let big = ci_extreme(&p, tau_n, tau_p, &fit, 0.25, 0.2, 0.95, CiVariant::DependentAdjusted)
            .unwrap();
        assert!(big.upper < p.value);
        assert!(big.lower <= big.upper);
        // while the symmetric d interval always brackets the point
        assert!(d.lower <= p.value && p.value <= d.upper);
    }

    #[test]
    fn interval_scales_with_the_point() {
        let tau_n = Level::intermediate(0.95).unwrap();
        let tau_p = Level::extreme(0.9995).unwrap();
        let fit = fit_at(0.3, 250, tau_n);
        let c1 = ci_extreme(&point_at(2.0, 0.9995), tau_n, tau_p, &fit, 0.09, 0.0, 0.95,
            CiVariant::Iid).unwrap();
        let c2 = ci_extreme(&point_at(6.0, 0.9995), tau_n, tau_p, &fit, 0.09, 0.0, 0.95,
            CiVariant::Iid).unwrap();
        assert!((c2.lower / c1.lower - 3.0).abs() < 1e-12);
        assert!((c2.upper / c1.upper - 3.0).abs() < 1e-12);
    }

    #[test]
    fn interval_width_shrinks_with_tail_count() {
        let tau_n = Level::intermediate(0.95).unwrap();
        let tau_p = Level::extreme(0.9995).unwrap();
        let p = point_at(1.0, 0.9995);
        let small =
            ci_extreme(&p, tau_n, tau_p, &fit_at(0.3, 50, tau_n), 0.09, 0.0, 0.95, CiVariant::Iid)
                .unwrap();
        let big = ci_extreme(&p, tau_n, tau_p, &fit_at(0.3, 5000, tau_n), 0.09, 0.0, 0.95,
            CiVariant::Iid).unwrap();
        assert!(big.upper - big.lower < small.upper - small.lower);
    }

    #[test]
    fn interval_guards() {
        let tau_n = Level::intermediate(0.95).unwrap();
        let tau_p = Level::extreme(0.9995).unwrap();
        let fit = fit_at(0.3, 250, tau_n);
        let p = point_at(1.0, 0.9995);
        assert!(ci_extreme(&p, tau_n, tau_p, &fit, 0.09, 0.0, 1.0, CiVariant::Iid).is_err());
        assert!(ci_extreme(&p, tau_n, tau_p, &fit, -0.1, 0.0, 0.95, CiVariant::Iid).is_err());
        assert!(ci_extreme(&p, tau_n, tau_p, &fit, 0.09, f64::NAN, 0.95, CiVariant::Iid).is_err());
        // target level before the intermediate one
        assert!(
            ci_extreme(&p, tau_p, tau_n, &fit, 0.09, 0.0, 0.95, CiVariant::Iid).is_err()
        );
        let zero = point_at(f64::MIN_POSITIVE, 0.9995);
        assert!(ci_extreme(&zero, tau_n, tau_p, &fit, 0.09, 0.0, 0.95, CiVariant::Iid).is_ok());
        let negative = RiskEstimate { value: -1.0, ..point_at(1.0, 0.9995) };
        assert!(ci_extreme(&negative, tau_n, tau_p, &fit, 0.09, 0.0, 0.95, CiVariant::Iid).is_err());
    }

    #[test]
    fn iid_w_near_gamma_squared_on_independent_data() {
        // On independent data the block counts are ~Binomial(r, 1−τₙ), whose
        // variance matches r(1−τₙ): the ratio ŵ/γ̂² should hover near 1.
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let n = 5000;
        let s = series(
            (0..n)
                .map(|_| rng.gen_range::<f64, _>(f64::MIN_POSITIVE..1.0).powf(-0.4))
                .collect(),
        );
        let fit = crate::tail::hill(&s, 250).unwrap();
        let sel = default_blocks(&s).unwrap();
        let w = block_variance(&s, fit.tau_n, &sel.scheme, &fit).unwrap();
        let ratio = w / (fit.gamma * fit.gamma);
        assert!(ratio > 0.6 && ratio < 1.4, "ratio {ratio}");
    }

    #[test]
    fn dependent_w_inflates_under_clustering() {
        // under clustering the block exceedance counts are overdispersed
        // relative to the binomial benchmark, so ŵ outgrows γ̂²
        let s = ar1(10_000, 0.8, 77);
        let sel = default_blocks(&s).unwrap();
        let tau_n = Level::from_k(500, 10_000).unwrap();
        let fit = fit_at(1.0, 500, tau_n); // unit γ̂ isolates σ̂²ₙ/(r(1−τₙ))
        let unit = block_variance(&s, tau_n, &sel.scheme, &fit).unwrap();
        assert!(unit > 1.3, "variance ratio {unit} should reflect clustering");
    }

    #[test]
    fn ci_inputs_variants() {
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        let n = 4000;
        let s = series(
            (0..n)
                .map(|_| rng.gen_range::<f64, _>(f64::MIN_POSITIVE..1.0).powf(-0.3))
                .collect(),
        );
        let fit = crate::tail::hill(&s, 200).unwrap();
        let iid = ci_inputs(&s, &fit, CiVariant::Iid, None, None).unwrap();
        assert_eq!(iid.w_hat, fit.gamma * fit.gamma);
        assert_eq!(iid.b_hat, 0.0);
        let dep = ci_inputs(&s, &fit, CiVariant::Dependent, None, None).unwrap();
        assert!(dep.w_hat > 0.0);
        assert_eq!(dep.b_hat, 0.0);
        let adj = ci_inputs(&s, &fit, CiVariant::DependentAdjusted, None, None).unwrap();
        assert_eq!(adj.w_hat, dep.w_hat);
        assert!(adj.b_hat.is_finite());
        // explicit overrides are honoured
        let so = SecondOrderFit::manual(-1.0, 0.0).unwrap();
        let adj0 = ci_inputs(&s, &fit, CiVariant::DependentAdjusted, None, Some(&so)).unwrap();
        assert_eq!(adj0.b_hat, 0.0);
    }

    #[test]
    fn xmes_interval_smoke() {
        // a positively associated pair with Pareto tails
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let n = 4000;
        let y: Vec<f64> = (0..n)
            .map(|_| rng.gen_range::<f64, _>(f64::MIN_POSITIVE..1.0).powf(-0.3))
            .collect();
        let x: Vec<f64> = y.iter().map(|v| 0.7 * v + rng.gen::<f64>()).collect();
        let b = BivariateSeries::from_values(x, y).unwrap();
        let tau_n = Level::from_k(200, n).unwrap();
        let point = RiskEstimate {
            value: 12.0,
            level: Level::extreme(0.9995).unwrap(),
            kind: RiskKind::Xmes,
            ci: None,
        };
        let sel = default_blocks_bivariate(&b).unwrap();
        let iid = ci_xmes(&point, &b, tau_n, &sel.scheme, 0.95, CiVariant::Iid).unwrap();
        assert!(iid.lower < 12.0 && 12.0 < iid.upper);
        // the iid ŵ is the X-side Hill estimate squared
        let fit_x = crate::tail::hill(b.x(), 200).unwrap();
        assert_eq!(iid.w_hat, fit_x.gamma * fit_x.gamma);
        let dep = ci_xmes(&point, &b, tau_n, &sel.scheme, 0.95, CiVariant::Dependent).unwrap();
        assert!(dep.lower <= 12.0 && 12.0 <= dep.upper);
        assert!(dep.w_hat > 0.0);
    }
}
