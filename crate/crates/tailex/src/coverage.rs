//! Monte Carlo coverage experiments for the interval constructions.
//!
//! A coverage run repeats, over many independently seeded replications of a
//! benchmark model: simulate a path, estimate the extreme risk measure at a
//! far tail level, build the interval under each variance variant, and
//! record whether the interval captured the model's true value. The true
//! value comes either from the caller (a frozen reference) or from the
//! long-run simulation oracle under a reserved seed that no replication can
//! collide with.
//!
//! For the univariate models the six cells per k are LAWS/QB × iid/d/d-adj,
//! the point estimates being the Weissman-extrapolated intermediate
//! expectile and its quantile-based counterpart at the requested τ′. For
//! the paired models the target is MES calibrated through the expectile
//! level map: τ′ fixes α via 1−α = (1−τ′)(1−γ_Y)/γ_Y at the model's true
//! Y tail index, the composite estimators run at that α, and the truth is
//! the long-run conditional mean beyond the α quantile.
//!
//! Replications that error (non-convergence, empty tails, a failed block or
//! second-order fit) are excluded from the denominator of that cell and
//! reported separately — a failed fit is not evidence about coverage.
//! Results are bit-identical for a given seed regardless of how many worker
//! threads the replications are spread over: replication j always draws
//! from `replication_seed(seed, j)` and the reduction runs in index order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expectile::{extrapolate, laws_expectile, qb_expectile, ExpectileConfig, ExtrapolationSpec};
use crate::inference::{
    block_variance, ci_extreme, ci_xmes, default_blocks, default_blocks_bivariate, BlockScheme,
    CiVariant,
};
use crate::mes::composite_xmes;
use crate::mes::XmesVariant;
use crate::sample::{Level, RiskEstimate, RiskKind, TailFit};
use crate::simulate::{
    replication_seed, simulate_bivariate, simulate_univariate, true_expectile, true_qmes, ModelId,
    ModelSpec, ORACLE_MIN_POINTS,
};
use crate::tail::{bias_term, default_k_rho, hill, second_order};

const VARIANTS: [CiVariant; 3] = [CiVariant::Iid, CiVariant::Dependent, CiVariant::DependentAdjusted];

/// Everything a coverage experiment needs. `new` fills in the standard
/// protocol (n = 2500, 500 replications, τ′ = 0.9995, k ∈ {100, 150, 200},
/// 95% intervals); fields are public so callers can depart from it.
#[derive(Debug, Clone)]
pub struct CoverageConfig {
    pub model: ModelId,
    pub n: usize,
    pub reps: usize,
    /// Target level τ′ of the risk measure under study.
    pub tau_prime: f64,
    pub k_grid: Vec<usize>,
    pub seed: u64,
    /// Nominal confidence level of the intervals.
    pub level: f64,
    /// Known true value; when absent the simulation oracle supplies it.
    pub truth: Option<f64>,
    /// Stationary sample size for the oracle when it has to run.
    pub oracle_points: usize,
}

impl CoverageConfig {
    pub fn new(model: ModelId) -> CoverageConfig {
        CoverageConfig {
            model,
            n: 2500,
            reps: 500,
            tau_prime: 0.9995,
            k_grid: vec![100, 150, 200],
            seed: 1,
            level: 0.95,
            truth: None,
            oracle_points: ORACLE_MIN_POINTS,
        }
    }
}

/// Tally for one (k, estimator-variant) cell.
#[derive(Debug, Clone)]
pub struct CellRate {
    pub k: usize,
    /// Estimator and interval variant, e.g. `LAWS-D-ADJ` or `XMES-QB-IID`.
    pub variant: String,
    /// Replications whose interval existed but excluded the truth.
    pub misses: usize,
    /// Replications where estimation or the interval itself errored.
    pub failures: usize,
    /// Replications entering the denominator: reps − failures.
    pub evaluated: usize,
}

impl CellRate {
    /// Empirical non-coverage in percent, `None` when every replication
    /// failed.
    pub fn error_rate_percent(&self) -> Option<f64> {
        if self.evaluated == 0 {
            None
        } else {
            Some(100.0 * self.misses as f64 / self.evaluated as f64)
        }
    }
}

/// Outcome of one coverage experiment.
#[derive(Debug, Clone)]
pub struct CoverageReport {
    pub model: ModelId,
    pub n: usize,
    pub reps: usize,
    pub tau_prime: f64,
    /// The calibrated quantile level α (paired models only).
    pub alpha: Option<f64>,
    /// 100·(1 − confidence level): what the miss rates should approach.
    pub nominal_error_percent: f64,
    pub truth: f64,
    /// Monte Carlo standard error of the truth when the oracle produced it.
    pub truth_se: Option<f64>,
    pub cells: Vec<CellRate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Cover,
    Miss,
    Fail,
}

fn validate(cfg: &CoverageConfig) -> Result<()> {
    if cfg.reps < 1 {
        return Err(Error::InvalidParameter {
            name: "reps",
            reason: "at least one replication is required".into(),
        });
    }
    if cfg.n < 100 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("coverage runs need n >= 100, got {}", cfg.n),
        });
    }
    if cfg.k_grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "k_grid",
            reason: "at least one k is required".into(),
        });
    }
    if !(cfg.tau_prime > 0.0 && cfg.tau_prime < 1.0) {
        return Err(Error::InvalidParameter {
            name: "tau_prime",
            reason: format!("target level must lie in (0,1), got {}", cfg.tau_prime),
        });
    }
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(Error::InvalidParameter {
            name: "level",
            reason: format!("confidence level must lie in (0,1), got {}", cfg.level),
        });
    }
    for &k in &cfg.k_grid {
        if k < 1 || k >= cfg.n {
            return Err(Error::KOutOfRange { k, max: cfg.n - 1, n: cfg.n });
        }
        let tau_n = 1.0 - k as f64 / cfg.n as f64;
        if cfg.tau_prime < tau_n {
            return Err(Error::InvalidParameter {
                name: "tau_prime",
                reason: format!(
                    "target level {} precedes the intermediate level {} at k={k}",
                    cfg.tau_prime, tau_n
                ),
            });
        }
    }
    if let Some(t) = cfg.truth {
        if !t.is_finite() {
            return Err(Error::InvalidParameter {
                name: "truth",
                reason: format!("reference value must be finite, got {t}"),
            });
        }
    }
    Ok(())
}

/// Run the experiment described by `cfg`.
pub fn run(cfg: &CoverageConfig) -> Result<CoverageReport> {
    validate(cfg)?;
    if cfg.model.is_bivariate() {
        run_bivariate(cfg)
    } else {
        run_univariate(cfg)
    }
}

/// Seed reserved for the truth oracle; `replication_seed` keys it apart
/// from every replication index a run can reach.
fn oracle_seed(seed: u64) -> u64 {
    replication_seed(seed, u64::MAX)
}

fn reduce(
    cfg: &CoverageConfig,
    method_labels: &[&str; 2],
    outcomes: Vec<Vec<[Outcome; 6]>>,
) -> Vec<CellRate> {
    let mut cells = Vec::with_capacity(cfg.k_grid.len() * 6);
    for (ki, &k) in cfg.k_grid.iter().enumerate() {
        for (mi, method) in method_labels.iter().enumerate() {
            for (vi, variant) in VARIANTS.iter().enumerate() {
                let idx = mi * 3 + vi;
                let mut misses = 0;
                let mut failures = 0;
                for rep in &outcomes {
                    match rep[ki][idx] {
                        Outcome::Cover => {}
                        Outcome::Miss => misses += 1,
                        Outcome::Fail => failures += 1,
                    }
                }
                cells.push(CellRate {
                    k,
                    variant: format!("{method}-{}", variant.label().to_uppercase()),
                    misses,
                    failures,
                    evaluated: cfg.reps - failures,
                });
            }
        }
    }
    cells
}

// ---------------------------------------------------------------------------
// univariate: extreme expectiles at a fixed τ′
// ---------------------------------------------------------------------------

fn run_univariate(cfg: &CoverageConfig) -> Result<CoverageReport> {
    let tau_p = Level::extreme(cfg.tau_prime)?;
    let (truth, truth_se) = match cfg.truth {
        Some(v) => (v, None),
        None => {
            let spec = ModelSpec::new(cfg.model, cfg.oracle_points, oracle_seed(cfg.seed));
            let tv = true_expectile(spec, tau_p);
            (tv.value, Some(tv.mc_se))
        }
    };

    let outcomes: Vec<Vec<[Outcome; 6]>> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|j| univariate_rep(cfg, tau_p, truth, j))
        .collect();

    Ok(CoverageReport {
        model: cfg.model,
        n: cfg.n,
        reps: cfg.reps,
        tau_prime: cfg.tau_prime,
        alpha: None,
        nominal_error_percent: 100.0 * (1.0 - cfg.level),
        truth,
        truth_se,
        cells: reduce(cfg, &["LAWS", "QB"], outcomes),
    })
}

fn univariate_rep(cfg: &CoverageConfig, tau_p: Level, truth: f64, j: u64) -> Vec<[Outcome; 6]> {
    let spec = ModelSpec::new(cfg.model, cfg.n, replication_seed(cfg.seed, j));
    let s = simulate_univariate(spec);
    let ecfg = ExpectileConfig::default();
    let scheme = default_blocks(&s).ok().map(|sel| sel.scheme);
    let so = default_k_rho(&s).and_then(|kr| second_order(&s, kr)).ok();

    let mut out = Vec::with_capacity(cfg.k_grid.len());
    for &k in &cfg.k_grid {
        let mut cells = [Outcome::Fail; 6];
        let tau_n = Level::from_k(k, cfg.n).expect("validated k");
        if let Ok(fit) = hill(&s, k) {
            let espec = ExtrapolationSpec::new(tau_n, tau_p).expect("validated ordering");
            let laws_pt =
                laws_expectile(&s, tau_n, &ecfg).and_then(|b| extrapolate(b, &espec, fit.gamma));
            let qb_pt =
                qb_expectile(&s, tau_n, fit.gamma).and_then(|b| extrapolate(b, &espec, fit.gamma));
            let w_dep = scheme.as_ref().and_then(|sch| block_variance(&s, tau_n, sch, &fit).ok());
            let b_adj = so.as_ref().map(|sof| bias_term(&fit, sof));
            for (mi, pt) in [&laws_pt, &qb_pt].into_iter().enumerate() {
                for (vi, &variant) in VARIANTS.iter().enumerate() {
                    cells[mi * 3 + vi] =
                        judge(pt, variant, &fit, tau_n, tau_p, w_dep, b_adj, cfg.level, truth);
                }
            }
        }
        out.push(cells);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn judge(
    point: &Result<f64>,
    variant: CiVariant,
    fit: &TailFit,
    tau_n: Level,
    tau_p: Level,
    w_dep: Option<f64>,
    b_adj: Option<f64>,
    level: f64,
    truth: f64,
) -> Outcome {
    let value = match point {
        Ok(v) => *v,
        Err(_) => return Outcome::Fail,
    };
    let (w_hat, b_hat) = match variant {
        CiVariant::Iid => (fit.gamma * fit.gamma, 0.0),
        CiVariant::Dependent => match w_dep {
            Some(w) => (w, 0.0),
            None => return Outcome::Fail,
        },
        CiVariant::DependentAdjusted => match (w_dep, b_adj) {
            (Some(w), Some(b)) => (w, b),
            _ => return Outcome::Fail,
        },
    };
    let est = RiskEstimate { value, level: tau_p, kind: RiskKind::Expectile, ci: None };
    match ci_extreme(&est, tau_n, tau_p, fit, w_hat, b_hat, level, variant) {
        Ok(ci) => {
            if ci.lower <= truth && truth <= ci.upper {
                Outcome::Cover
            } else {
                Outcome::Miss
            }
        }
        Err(_) => Outcome::Fail,
    }
}

// ---------------------------------------------------------------------------
// bivariate: MES through the expectile level calibration
// ---------------------------------------------------------------------------

/// Invert the level map τ′(α) = 1 − (1−α)γ/(1−γ) at the model's true
/// Y tail index, so that an expectile-threshold MES at τ′ and a
/// quantile-threshold MES at α aim at the same population quantity.
fn alpha_from_tau_prime(tau_prime: f64, gamma_y: f64) -> Result<f64> {
    let one_minus = (1.0 - tau_prime) * (1.0 - gamma_y) / gamma_y;
    if one_minus >= 1.0 {
        return Err(Error::CompositeLevel {
            detail: format!(
                "tau_prime={tau_prime} with gamma_y={gamma_y} maps back to exceedance \
                 probability {one_minus} >= 1"
            ),
        });
    }
    Ok(1.0 - one_minus)
}

fn run_bivariate(cfg: &CoverageConfig) -> Result<CoverageReport> {
    let alpha = alpha_from_tau_prime(cfg.tau_prime, cfg.model.tail_index_y())?;
    let alpha_level = Level::extreme(alpha)?;
    let (truth, truth_se) = match cfg.truth {
        Some(v) => (v, None),
        None => {
            let spec = ModelSpec::new(cfg.model, cfg.oracle_points, oracle_seed(cfg.seed));
            let tv = true_qmes(spec, alpha_level);
            (tv.value, Some(tv.mc_se))
        }
    };

    let outcomes: Vec<Vec<[Outcome; 6]>> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|j| bivariate_rep(cfg, alpha_level, truth, j))
        .collect();

    Ok(CoverageReport {
        model: cfg.model,
        n: cfg.n,
        reps: cfg.reps,
        tau_prime: cfg.tau_prime,
        alpha: Some(alpha),
        nominal_error_percent: 100.0 * (1.0 - cfg.level),
        truth,
        truth_se,
        cells: reduce(cfg, &["XMES-LAWS", "XMES-QB"], outcomes),
    })
}

fn bivariate_rep(cfg: &CoverageConfig, alpha: Level, truth: f64, j: u64) -> Vec<[Outcome; 6]> {
    let spec = ModelSpec::new(cfg.model, cfg.n, replication_seed(cfg.seed, j));
    let b = simulate_bivariate(spec);
    let ecfg = ExpectileConfig::default();
    let scheme = default_blocks_bivariate(&b).ok().map(|sel| sel.scheme);

    let mut out = Vec::with_capacity(cfg.k_grid.len());
    for &k in &cfg.k_grid {
        let mut cells = [Outcome::Fail; 6];
        let tau_n = Level::from_k(k, cfg.n).expect("validated k");
        if let (Ok(fit_x), Ok(fit_y)) = (hill(b.x(), k), hill(b.y(), k)) {
            for (mi, xvar) in [XmesVariant::Laws, XmesVariant::Qb].into_iter().enumerate() {
                let parts =
                    composite_xmes(&b, tau_n, alpha, xvar, fit_x.gamma, fit_y.gamma, &ecfg);
                for (vi, &variant) in VARIANTS.iter().enumerate() {
                    let idx = mi * 3 + vi;
                    let parts = match &parts {
                        Ok(p) => p,
                        Err(_) => continue,
                    };
                    // the iid interval never reads the block scheme; a unit
                    // placeholder keeps it alive when block selection failed
                    let sch = match (&scheme, variant) {
                        (Some(sch), _) => Some(*sch),
                        (None, CiVariant::Iid) => BlockScheme::new(1, 0, cfg.n).ok(),
                        (None, _) => None,
                    };
                    let sch = match sch {
                        Some(sch) => sch,
                        None => continue,
                    };
                    let est = RiskEstimate {
                        value: parts.value,
                        level: parts.tau_prime,
                        kind: RiskKind::Xmes,
                        ci: None,
                    };
                    cells[idx] = match ci_xmes(&est, &b, tau_n, &sch, cfg.level, variant) {
                        Ok(ci) => {
                            if ci.lower <= truth && truth <= ci.upper {
                                Outcome::Cover
                            } else {
                                Outcome::Miss
                            }
                        }
                        Err(_) => Outcome::Fail,
                    };
                }
            }
        }
        out.push(cells);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> CoverageConfig {
        let mut cfg = CoverageConfig::new(ModelId::A);
        cfg.n = 400;
        cfg.reps = 6;
        cfg.k_grid = vec![40, 80];
        cfg.tau_prime = 0.999;
        cfg.truth = Some(25.0);
        cfg
    }

    #[test]
    fn config_validation() {
        let mut cfg = tiny_config();
        cfg.reps = 0;
        assert!(run(&cfg).is_err());
        let mut cfg = tiny_config();
        cfg.k_grid.clear();
        assert!(run(&cfg).is_err());
        let mut cfg = tiny_config();
        cfg.k_grid = vec![400];
        assert!(run(&cfg).is_err());
        let mut cfg = tiny_config();
        cfg.tau_prime = 0.5; // precedes τₙ = 0.9 at k = 40
        assert!(run(&cfg).is_err());
        let mut cfg = tiny_config();
        cfg.level = 1.0;
        assert!(run(&cfg).is_err());
        let mut cfg = tiny_config();
        cfg.truth = Some(f64::INFINITY);
        assert!(run(&cfg).is_err());
        let mut cfg = tiny_config();
        cfg.n = 80;
        assert!(run(&cfg).is_err());
    }

    #[test]
    fn report_layout_and_truth_passthrough() {
        let cfg = tiny_config();
        let rep = run(&cfg).unwrap();
        assert_eq!(rep.truth, 25.0);
        assert!(rep.truth_se.is_none());
        assert!(rep.alpha.is_none());
        assert_eq!(rep.cells.len(), cfg.k_grid.len() * 6);
        assert!((rep.nominal_error_percent - 5.0).abs() < 1e-12);
        let labels: Vec<&str> = rep.cells.iter().take(6).map(|c| c.variant.as_str()).collect();
        assert_eq!(labels, ["LAWS-IID", "LAWS-D", "LAWS-D-ADJ", "QB-IID", "QB-D", "QB-D-ADJ"]);
        for cell in &rep.cells {
            assert_eq!(cell.evaluated + cell.failures, cfg.reps);
            assert!(cell.misses <= cell.evaluated);
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let cfg = tiny_config();
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        for (ca, cb) in a.cells.iter().zip(&b.cells) {
            assert_eq!(ca.k, cb.k);
            assert_eq!(ca.variant, cb.variant);
            assert_eq!(ca.misses, cb.misses);
            assert_eq!(ca.failures, cb.failures);
        }
        let mut other = cfg.clone();
        other.seed = 999;
        let c = run(&other).unwrap();
        assert!(
            a.cells.iter().zip(&c.cells).any(|(x, y)| x.misses != y.misses),
            "different seeds should move at least one tally"
        );
    }

    #[test]
    fn absurd_truth_misses_everywhere() {
        let mut cfg = tiny_config();
        cfg.truth = Some(1.0e12);
        let rep = run(&cfg).unwrap();
        for cell in &rep.cells {
            assert_eq!(cell.misses, cell.evaluated, "cell {}", cell.variant);
            if cell.evaluated > 0 {
                assert_eq!(cell.error_rate_percent(), Some(100.0));
            }
        }
    }

    #[test]
    fn single_replication_rates_are_all_or_nothing() {
        let mut cfg = tiny_config();
        cfg.reps = 1;
        let rep = run(&cfg).unwrap();
        for cell in &rep.cells {
            match cell.error_rate_percent() {
                Some(r) => assert!(r == 0.0 || r == 100.0),
                None => assert_eq!(cell.failures, 1),
            }
        }
    }

    #[test]
    fn bivariate_smoke() {
        let mut cfg = CoverageConfig::new(ModelId::E);
        cfg.n = 400;
        cfg.reps = 4;
        cfg.k_grid = vec![40];
        cfg.truth = Some(30.0);
        let rep = run(&cfg).unwrap();
        // τ′ = 0.9995 with γ_Y = 1/3 calibrates back to α = 0.999
        assert!((rep.alpha.unwrap() - 0.999).abs() < 1e-12);
        assert_eq!(rep.cells.len(), 6);
        assert!(rep.cells[0].variant.starts_with("XMES-LAWS"));
        assert!(rep.cells[5].variant.starts_with("XMES-QB"));
        for cell in &rep.cells {
            assert_eq!(cell.evaluated + cell.failures, cfg.reps);
        }
    }
}
