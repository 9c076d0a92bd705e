//! One-stop estimation rows: given a series, a tail sample size k and a
//! target level, produce the point estimate together with the tail index,
//! calibrated level and (optionally) a confidence interval — everything a
//! results table needs for one k.
//!
//! The expectile methods (`laws`, `qb`) are composite: the Hill index at k
//! maps the quantile level α to the expectile level τ̂′(α), and the
//! intermediate estimate at τₙ = 1 − k/n is extrapolated there. The
//! `weissman` method estimates the α quantile directly. The MES methods run
//! on paired data, extrapolating along the X tail: `qmes` stays at the
//! quantile threshold and level α, while `xmes-laws`/`xmes-qb` move to the
//! calibrated expectile threshold. Intervals always take their variance
//! from the series whose tail is being extrapolated — Y for the univariate
//! methods, X for MES.

use crate::error::{Error, Result};
use crate::expectile::{
    composite_laws, composite_qb, weissman_quantile, ExpectileConfig, ExtrapolationSpec,
};
use crate::inference::{
    ci_extreme, ci_inputs, default_blocks, default_blocks_bivariate, BlockScheme, CiVariant,
};
use crate::mes::{composite_xmes, qmes_weissman, BivariateSeries, XmesVariant};
use crate::sample::{Level, RiskEstimate, RiskKind, Series, TailFit};
use crate::tail::hill;

/// Estimation method for one results row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Composite extreme expectile from the asymmetric-least-squares fit.
    Laws,
    /// Composite extreme expectile from the quantile proportionality rule.
    Qb,
    /// Extrapolated extreme quantile.
    Weissman,
    /// MES beyond the extreme α quantile of Y.
    Qmes,
    /// MES beyond the calibrated extreme expectile of Y (LAWS threshold).
    XmesLaws,
    /// MES beyond the calibrated extreme expectile of Y (QB threshold).
    XmesQb,
}

impl Method {
    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "laws" => Some(Method::Laws),
            "qb" => Some(Method::Qb),
            "weissman" => Some(Method::Weissman),
            "qmes" => Some(Method::Qmes),
            "xmes-laws" => Some(Method::XmesLaws),
            "xmes-qb" => Some(Method::XmesQb),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::Laws => "laws",
            Method::Qb => "qb",
            Method::Weissman => "weissman",
            Method::Qmes => "qmes",
            Method::XmesLaws => "xmes-laws",
            Method::XmesQb => "xmes-qb",
        }
    }

    /// Whether the method needs paired (x, y) input.
    pub fn is_bivariate(self) -> bool {
        matches!(self, Method::Qmes | Method::XmesLaws | Method::XmesQb)
    }
}

/// Parameters for one estimation row.
#[derive(Debug, Clone, Copy)]
pub struct EstimateRequest {
    /// Tail sample size; fixes the intermediate level τₙ = 1 − k/n.
    pub k: usize,
    /// Target quantile level α the estimate is calibrated against.
    pub alpha: f64,
    pub method: Method,
    /// Interval variant, or `None` for a bare point estimate.
    pub ci: Option<CiVariant>,
    /// Confidence level of the interval.
    pub level: f64,
    /// Explicit (r, l) block lengths; chosen from the data when absent.
    pub blocks: Option<(usize, usize)>,
}

/// One line of a results table.
#[derive(Debug, Clone, Copy)]
pub struct EstimateRow {
    pub k: usize,
    pub tau_n: f64,
    /// Hill index the extrapolation used (the X tail for MES methods).
    pub gamma_hat: f64,
    /// Y-side Hill index (MES methods only).
    pub gamma_y: Option<f64>,
    /// Level the estimate lives at: τ̂′(α) for expectile-calibrated
    /// methods, α itself for `weissman` and `qmes`.
    pub tau_prime: f64,
    pub estimate: f64,
    pub ci_lower: Option<f64>,
    pub ci_upper: Option<f64>,
    /// Variance factor behind the interval.
    pub w_hat: Option<f64>,
    /// Bias exponent behind the interval (0 except for `d-adj`).
    pub b_hat: Option<f64>,
}

fn bare_row(k: usize, tau_n: Level, gamma_hat: f64, target: Level, estimate: f64) -> EstimateRow {
    EstimateRow {
        k,
        tau_n: tau_n.tau(),
        gamma_hat,
        gamma_y: None,
        tau_prime: target.tau(),
        estimate,
        ci_lower: None,
        ci_upper: None,
        w_hat: None,
        b_hat: None,
    }
}

/// Resolve the block scheme an interval variant needs: explicit lengths
/// win, the iid variant needs none, and the rest fall back to the
/// data-driven selection on `s`.
fn scheme_for(
    s: &Series,
    n: usize,
    variant: CiVariant,
    blocks: Option<(usize, usize)>,
) -> Result<Option<BlockScheme>> {
    match (blocks, variant) {
        (Some((r, l)), _) => Ok(Some(BlockScheme::new(r, l, n)?)),
        (None, CiVariant::Iid) => Ok(None),
        (None, _) => Ok(Some(default_blocks(s)?.scheme)),
    }
}

/// Estimate one row on a single series. MES methods are rejected here —
/// they need [`estimate_bivariate`].
pub fn estimate_series(s: &Series, req: &EstimateRequest) -> Result<EstimateRow> {
    if req.method.is_bivariate() {
        return Err(Error::InvalidParameter {
            name: "method",
            reason: format!("{} needs paired (x, y) input", req.method.label()),
        });
    }
    let n = s.n();
    let tau_n = Level::from_k(req.k, n)?;
    let fit = hill(s, req.k)?;
    let alpha = Level::extreme(req.alpha)?;
    let ecfg = ExpectileConfig::default();

    let (target, estimate, kind) = match req.method {
        Method::Laws => {
            let p = composite_laws(s, tau_n, alpha, fit.gamma, &ecfg)?;
            (p.tau_prime, p.value, RiskKind::Expectile)
        }
        Method::Qb => {
            let p = composite_qb(s, tau_n, alpha, fit.gamma)?;
            (p.tau_prime, p.value, RiskKind::Expectile)
        }
        Method::Weissman => {
            let espec = ExtrapolationSpec::new(tau_n, alpha)?;
            (alpha, weissman_quantile(s, &espec, fit.gamma)?, RiskKind::Quantile)
        }
        _ => unreachable!("bivariate methods rejected above"),
    };

    let mut row = bare_row(req.k, tau_n, fit.gamma, target, estimate);
    if let Some(variant) = req.ci {
        attach_interval(&mut row, s, &fit, tau_n, target, estimate, kind, variant, req)?;
    }
    Ok(row)
}

/// Estimate one row on paired data. The interval mirrors `ci_xmes`: the
/// variance and bias inputs come from the X component, whose tail the
/// extrapolation runs along.
pub fn estimate_bivariate(b: &BivariateSeries, req: &EstimateRequest) -> Result<EstimateRow> {
    if !req.method.is_bivariate() {
        return Err(Error::InvalidParameter {
            name: "method",
            reason: format!("{} runs on a single series", req.method.label()),
        });
    }
    let n = b.n();
    let tau_n = Level::from_k(req.k, n)?;
    let fit_x = hill(b.x(), req.k)?;
    let fit_y = hill(b.y(), req.k)?;
    let alpha = Level::extreme(req.alpha)?;
    let ecfg = ExpectileConfig::default();

    let (target, estimate, kind) = match req.method {
        Method::Qmes => (alpha, qmes_weissman(b, tau_n, alpha, fit_x.gamma)?, RiskKind::Qmes),
        Method::XmesLaws => {
            let p = composite_xmes(b, tau_n, alpha, XmesVariant::Laws, fit_x.gamma, fit_y.gamma, &ecfg)?;
            (p.tau_prime, p.value, RiskKind::Xmes)
        }
        Method::XmesQb => {
            let p = composite_xmes(b, tau_n, alpha, XmesVariant::Qb, fit_x.gamma, fit_y.gamma, &ecfg)?;
            (p.tau_prime, p.value, RiskKind::Xmes)
        }
        _ => unreachable!("univariate methods rejected above"),
    };

    let mut row = bare_row(req.k, tau_n, fit_x.gamma, target, estimate);
    row.gamma_y = Some(fit_y.gamma);
    if let Some(variant) = req.ci {
        let scheme = match (req.blocks, variant) {
            (Some((r, l)), _) => Some(BlockScheme::new(r, l, n)?),
            (None, CiVariant::Iid) => None,
            (None, _) => Some(default_blocks_bivariate(b)?.scheme),
        };
        let inputs = ci_inputs(b.x(), &fit_x, variant, scheme.as_ref(), None)?;
        let est = RiskEstimate { value: estimate, level: target, kind, ci: None };
        let ci =
            ci_extreme(&est, tau_n, target, &fit_x, inputs.w_hat, inputs.b_hat, req.level, variant)?;
        row.ci_lower = Some(ci.lower);
        row.ci_upper = Some(ci.upper);
        row.w_hat = Some(ci.w_hat);
        row.b_hat = Some(inputs.b_hat);
    }
    Ok(row)
}

#[allow(clippy::too_many_arguments)]
fn attach_interval(
    row: &mut EstimateRow,
    s: &Series,
    fit: &TailFit,
    tau_n: Level,
    target: Level,
    estimate: f64,
    kind: RiskKind,
    variant: CiVariant,
    req: &EstimateRequest,
) -> Result<()> {
    let scheme = scheme_for(s, s.n(), variant, req.blocks)?;
    let inputs = ci_inputs(s, fit, variant, scheme.as_ref(), None)?;
    let est = RiskEstimate { value: estimate, level: target, kind, ci: None };
    let ci = ci_extreme(&est, tau_n, target, fit, inputs.w_hat, inputs.b_hat, req.level, variant)?;
    row.ci_lower = Some(ci.lower);
    row.ci_upper = Some(ci.upper);
    row.w_hat = Some(ci.w_hat);
    row.b_hat = Some(inputs.b_hat);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::block_variance;
    use crate::tail::bias_term;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pareto_series(n: usize, gamma: f64, seed: u64) -> Series {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Series::new(
            (0..n)
                .map(|_| rng.gen_range::<f64, _>(f64::MIN_POSITIVE..1.0).powf(-gamma))
                .collect(),
        )
        .unwrap()
    }

    fn base_request(method: Method) -> EstimateRequest {
        EstimateRequest { k: 200, alpha: 0.999, method, ci: None, level: 0.95, blocks: None }
    }

    #[test]
    fn laws_row_matches_direct_composition() {
        let s = pareto_series(5000, 1.0 / 3.0, 11);
        let req = base_request(Method::Laws);
        let row = estimate_series(&s, &req).unwrap();
        let fit = hill(&s, 200).unwrap();
        let parts = composite_laws(
            &s,
            Level::from_k(200, 5000).unwrap(),
            Level::extreme(0.999).unwrap(),
            fit.gamma,
            &ExpectileConfig::default(),
        )
        .unwrap();
        assert_eq!(row.estimate, parts.value);
        assert_eq!(row.tau_prime, parts.tau_prime.tau());
        assert_eq!(row.gamma_hat, fit.gamma);
        assert_eq!(row.tau_n, 1.0 - 200.0 / 5000.0);
        assert!(row.ci_lower.is_none() && row.w_hat.is_none());
    }

    #[test]
    fn weissman_row_keeps_alpha_as_target() {
        let s = pareto_series(5000, 0.25, 13);
        let mut req = base_request(Method::Weissman);
        req.ci = Some(CiVariant::Iid);
        let row = estimate_series(&s, &req).unwrap();
        assert_eq!(row.tau_prime, 0.999);
        let fit = hill(&s, 200).unwrap();
        let espec = ExtrapolationSpec::new(
            Level::from_k(200, 5000).unwrap(),
            Level::extreme(0.999).unwrap(),
        )
        .unwrap();
        assert_eq!(row.estimate, weissman_quantile(&s, &espec, fit.gamma).unwrap());
        // the iid interval carries γ̂² and no bias
        assert_eq!(row.w_hat, Some(fit.gamma * fit.gamma));
        assert_eq!(row.b_hat, Some(0.0));
        let (lo, hi) = (row.ci_lower.unwrap(), row.ci_upper.unwrap());
        assert!(lo < row.estimate && row.estimate < hi);
    }

    #[test]
    fn explicit_blocks_feed_the_variance() {
        let s = pareto_series(4000, 0.3, 17);
        let mut req = base_request(Method::Qb);
        req.ci = Some(CiVariant::Dependent);
        req.blocks = Some((80, 20));
        let row = estimate_series(&s, &req).unwrap();
        let fit = hill(&s, 200).unwrap();
        let sch = BlockScheme::new(80, 20, 4000).unwrap();
        let w = block_variance(&s, Level::from_k(200, 4000).unwrap(), &sch, &fit).unwrap();
        assert_eq!(row.w_hat, Some(w));
        assert_eq!(row.b_hat, Some(0.0));
    }

    #[test]
    fn adjusted_variant_reports_its_bias_exponent() {
        let s = pareto_series(4000, 0.3, 19);
        let mut req = base_request(Method::Laws);
        req.ci = Some(CiVariant::DependentAdjusted);
        let row = estimate_series(&s, &req).unwrap();
        let fit = hill(&s, 200).unwrap();
        let so = crate::tail::second_order(&s, crate::tail::default_k_rho(&s).unwrap()).unwrap();
        assert_eq!(row.b_hat, Some(bias_term(&fit, &so)));
        assert!(row.w_hat.unwrap() > 0.0);
    }

    #[test]
    fn bivariate_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let n = 4000;
        let y: Vec<f64> = (0..n)
            .map(|_| rng.gen_range::<f64, _>(f64::MIN_POSITIVE..1.0).powf(-1.0 / 3.0))
            .collect();
        let x: Vec<f64> = y.iter().map(|v| 0.5 * v + rng.gen::<f64>()).collect();
        let b = BivariateSeries::from_values(x, y).unwrap();

        let mut req = base_request(Method::Qmes);
        req.ci = Some(CiVariant::Iid);
        let row = estimate_bivariate(&b, &req).unwrap();
        assert_eq!(row.tau_prime, 0.999);
        let fit_x = hill(b.x(), 200).unwrap();
        let fit_y = hill(b.y(), 200).unwrap();
        assert_eq!(row.gamma_hat, fit_x.gamma);
        assert_eq!(row.gamma_y, Some(fit_y.gamma));
        assert_eq!(row.w_hat, Some(fit_x.gamma * fit_x.gamma));

        let req2 = base_request(Method::XmesLaws);
        let row2 = estimate_bivariate(&b, &req2).unwrap();
        let parts = composite_xmes(
            &b,
            Level::from_k(200, n).unwrap(),
            Level::extreme(0.999).unwrap(),
            XmesVariant::Laws,
            fit_x.gamma,
            fit_y.gamma,
            &ExpectileConfig::default(),
        )
        .unwrap();
        assert_eq!(row2.estimate, parts.value);
        assert_eq!(row2.tau_prime, parts.tau_prime.tau());
        // Expectiles sit below quantiles when γ < 1/2, so the expectile
        // level calibrated to the α-quantile lands above α.
        assert!(row2.tau_prime > 0.999);
    }

    #[test]
    fn method_data_mismatches_are_rejected() {
        let s = pareto_series(1000, 0.3, 29);
        assert!(estimate_series(&s, &base_request(Method::Qmes)).is_err());
        let b = BivariateSeries::from_values(
            s.values().to_vec(),
            s.values().to_vec(),
        )
        .unwrap();
        assert!(estimate_bivariate(&b, &base_request(Method::Laws)).is_err());
    }

    #[test]
    fn bad_levels_and_k_are_reported() {
        let s = pareto_series(1000, 0.3, 31);
        let mut req = base_request(Method::Laws);
        req.k = 1000;
        assert!(matches!(estimate_series(&s, &req), Err(Error::KOutOfRange { .. })));
        let mut req = base_request(Method::Weissman);
        req.k = 900; // τₙ = 0.1 above α? no — α = 0.999 still fine
        req.alpha = 0.05; // target precedes the intermediate level
        assert!(estimate_series(&s, &req).is_err());
    }

    #[test]
    fn method_parsing_round_trips() {
        for m in [
            Method::Laws,
            Method::Qb,
            Method::Weissman,
            Method::Qmes,
            Method::XmesLaws,
            Method::XmesQb,
        ] {
            assert_eq!(Method::parse(m.label()), Some(m));
        }
        assert_eq!(Method::parse("hill"), None);
    }
}
