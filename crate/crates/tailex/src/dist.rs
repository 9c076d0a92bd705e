//! Distribution primitives: inverse CDFs used by the simulators and by the
//! confidence-interval construction.
//!
//! Everything is closed form or a guarded Newton inversion, so samplers are
//! dependency-light and bit-reproducible:
//!
//! - standard normal inverse CDF (Wichura's AS 241 rational approximation,
//!   accurate to well below 1e-9);
//! - Student t(3): closed-form CDF, Newton-inverted quantile;
//! - symmetric Pareto with shape 3: closed-form quantile;
//! - the half-uniform / half-exponential innovation law with density
//!   h(z) = 0.5·1(−1 < z ≤ 0) + 0.5·e^{−z}·1(z > 0).

use std::f64::consts::PI;

// ---------------------------------------------------------------------------
// standard normal
// ---------------------------------------------------------------------------

/// Inverse standard normal CDF, AS 241 (PPND16). Panics outside (0,1).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "normal_quantile needs p in (0,1), got {p}");
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * (((((((2.509_080_928_730_122_7e3 * r + 3.343_057_558_358_813e4) * r
            + 6.726_577_092_700_87e4)
            * r
            + 4.592_195_393_154_987e4)
            * r
            + 1.373_169_376_550_946e4)
            * r
            + 1.971_590_950_306_551_3e3)
            * r
            + 1.331_416_678_917_843_8e2)
            * r
            + 3.387_132_872_796_366_5)
            / (((((((5.226_495_278_852_545_5e3 * r + 2.872_908_573_572_194_3e4) * r
                + 3.930_789_580_009_271e4)
                * r
                + 2.121_379_430_158_659_7e4)
                * r
                + 5.394_196_021_424_751e3)
                * r
                + 6.871_870_074_920_579e2)
                * r
                + 4.231_333_070_160_091e1)
                * r
                + 1.0);
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        (((((((7.745_450_142_783_414e-4 * r + 2.272_384_498_926_918_5e-2) * r
            + 2.417_807_251_774_506e-1)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_546)
            * r
            + 1.423_437_110_749_683_5)
            / (((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r
                + 1.519_866_656_361_645_7e-2)
                * r
                + 1.481_039_764_274_800_8e-1)
                * r
                + 6.897_673_349_851e-1)
                * r
                + 1.676_384_830_183_803_8)
                * r
                + 2.053_191_626_637_759)
                * r
                + 1.0)
    } else {
        let r = r - 5.0;
        (((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 1.242_660_947_388_078_4e-3)
            * r
            + 2.653_218_952_657_612_4e-2)
            * r
            + 2.965_605_718_285_048_7e-1)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103)
            / (((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_446e-7) * r
                + 1.846_318_317_510_054_8e-5)
                * r
                + 7.868_691_311_456_133e-4)
                * r
                + 1.487_536_129_085_061_5e-2)
                * r
                + 1.369_298_809_227_358)
                * r
                + 5.998_322_065_558_88e-1)
                * r
                + 1.0)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

// ---------------------------------------------------------------------------
// Student t with 3 degrees of freedom
// ---------------------------------------------------------------------------

/// t(3) density.
pub fn t3_pdf(x: f64) -> f64 {
    let s = 3f64.sqrt();
    2.0 / (PI * s) / (1.0 + x * x / 3.0).powi(2)
}

/// t(3) distribution function; closed form
/// F(x) = 1/2 + (arctan u + u/(1+u²))/π with u = x/√3.
pub fn t3_cdf(x: f64) -> f64 {
    let u = x / 3f64.sqrt();
    0.5 + (u.atan() + u / (1.0 + u * u)) / PI
}

/// t(3) survival function, computed without cancellation for large x.
pub fn t3_sf(x: f64) -> f64 {
    if x <= 1.0 {
        return 1.0 - t3_cdf(x);
    }
    if x >= 30.0 {
        // Tail series S(x) = (6√3/π) Σ_{j≥0} (j+1)(−3)ʲ x^{−3−2j}/(3+2j),
        // from integrating the expanded density. The arctan form below
        // cancels two O(x⁻¹) terms down to O(x⁻³) and so keeps only about
        // x⁻² relative accuracy this far out.
        let inv2 = 1.0 / (x * x);
        let mut power = inv2 / x; // x^{−3−2j}
        let mut coeff = 1.0; // (j+1)(−3)ʲ
        let mut sum = 0.0;
        for j in 0u32..20 {
            let term = coeff * power / f64::from(3 + 2 * j);
            sum += term;
            if term.abs() <= sum * 1e-17 {
                break;
            }
            power *= inv2;
            coeff *= -3.0 * f64::from(j + 2) / f64::from(j + 1);
        }
        return 6.0 * 3f64.sqrt() / PI * sum;
    }
    // π/2 − arctan u = arctan(1/u) for u > 0
    let u = x / 3f64.sqrt();
    ((1.0 / u).atan() - u / (1.0 + u * u)) / PI
}

/// t(3) quantile by safeguarded Newton on the closed-form CDF.
pub fn t3_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "t3_quantile needs p in (0,1), got {p}");
    if p == 0.5 {
        return 0.0;
    }
    let q = p.min(1.0 - p); // tail mass of |quantile|
    let x = t3_upper_quantile(q);
    if p < 0.5 {
        -x
    } else {
        x
    }
}

/// Solves t3_sf(x) = q for x > 0, q in (0, 0.5).
fn t3_upper_quantile(q: f64) -> f64 {
    // Bracket and initial guess. Tail: 1 − F(x) ≈ 2√3/(π x³).
    let (mut lo, mut hi, mut x);
    if q < 0.2 {
        x = (2.0 * 3f64.sqrt() / (PI * q)).cbrt();
        lo = 0.0;
        hi = 2.0 * x + 10.0;
    } else {
        x = 0.7;
        lo = 0.0;
        hi = 1.1;
    }
    while t3_sf(hi) > q {
        hi *= 2.0;
    }
    for _ in 0..60 {
        let f = t3_sf(x) - q;
        if f > 0.0 {
            lo = x; // survival too large -> x too small
        } else {
            hi = x;
        }
        let mut next = x + f / t3_pdf(x); // sf' = -pdf
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) {
            return next;
        }
        x = next;
    }
    x
}

// ---------------------------------------------------------------------------
// symmetric Pareto, shape 3
// ---------------------------------------------------------------------------

/// Quantile of the symmetric Pareto law with shape 3: a random sign times a
/// standard Pareto variable with survival v^{−3} (v ≥ 1). There is no mass in
/// (−1, 1); p = 0.5 maps to the lower end of the positive branch.
pub fn sym_pareto3_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "sym_pareto3_quantile needs p in (0,1), got {p}");
    if p < 0.5 {
        -(2.0 * p).powf(-1.0 / 3.0)
    } else {
        (2.0 * (1.0 - p)).powf(-1.0 / 3.0)
    }
}

// ---------------------------------------------------------------------------
// half-uniform / half-exponential innovation law
// ---------------------------------------------------------------------------

/// Quantile of the law with density
/// h(z) = 0.5·1(−1 < z ≤ 0) + 0.5·e^{−z}·1(z > 0):
/// uniform on (−1, 0] with probability 1/2, standard exponential otherwise.
pub fn unif_exp_mix_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "unif_exp_mix_quantile needs p in (0,1), got {p}");
    if p <= 0.5 {
        2.0 * p - 1.0
    } else {
        -(2.0 * (1.0 - p)).ln()
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
