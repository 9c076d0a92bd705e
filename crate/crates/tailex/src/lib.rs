//! Tail risk estimation for heavy-tailed, serially dependent time series.
//!
//! The crate estimates three families of tail risk measures on stationary
//! series such as daily loss returns:
//!
//! - extreme *expectiles*, via direct asymmetric least squares (LAWS) and via
//!   a quantile-based proportionality construction (QB), extrapolated to far
//!   tail levels with a Weissman-type power-law factor;
//! - extreme *quantiles* (Weissman estimator);
//! - *marginal expected shortfall* at extreme levels (QMES / XMES), the
//!   conditional mean of one series given an extreme event in another.
//!
//! Confidence intervals come in three flavours: `iid` (classical variance),
//! `d` (a big-block/small-block variance estimator that is robust to serial
//! dependence) and `d-adj` (additionally corrected for second-order
//! extrapolation bias).
//!
//! The [`simulate`] module contains seeded generators for the eight
//! AR/ARMA/ARCH/GARCH benchmark models (univariate and bivariate with
//! Student-t or Gumbel copula innovations) plus long-run Monte Carlo oracles
//! for true expectile and MES values, and [`coverage`] runs the coverage
//! experiments that validate the interval constructions end to end.

pub mod coverage;
pub mod dist;
pub mod error;
pub mod expectile;
pub mod inference;
pub mod mes;
pub mod pipeline;
pub mod sample;
pub mod simulate;
pub mod tail;

pub use error::{Error, ErrorClass, Result};
pub use expectile::{
    composite_laws, composite_qb, extrapolate, laws_expectile, qb_expectile, tau_prime_hat,
    weissman_quantile, ExpectileConfig, ExtrapolationSpec,
};
pub use inference::{
    block_variance, ci_extreme, ci_inputs, ci_xmes, default_blocks, default_blocks_bivariate,
    BlockScheme, BlockSelection, CiInputs, CiVariant, ConfidenceInterval,
};
pub use mes::{
    composite_xmes, mes_extrapolated, mes_tail_ratio, qmes_weissman, BivariateSeries, MesSpec,
    ThresholdKind, XmesVariant,
};
pub use sample::{
    empirical_quantile, empirical_survival, ranks_to_uniform, Level, LevelKind, RiskEstimate,
    RiskKind, Series, TailFit, TailMethod,
};
pub use simulate::{
    simulate_bivariate, simulate_univariate, true_expectile, true_qmes, ModelId, ModelSpec,
    TrueValue,
};
pub use tail::{bias_term, gamma_expectile_based, hill, second_order, SecondOrderFit};
