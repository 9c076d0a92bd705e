//! Copula samplers coupling the innovation pairs of the bivariate models.
//!
//! Both families are sampled by conditional inversion: given the Y-side
//! uniform v, the X-side uniform is drawn from the conditional distribution
//! C_{1|2}(·|v). That keeps the Y stream's consumption pattern untouched —
//! the property the generators rely on — and needs no rejection step.
//!
//! The Gumbel family also carries the classic positive-stable frailty
//! sampler, used in tests as an independent oracle for the conditional
//! inversion.

use rand::Rng;
use rand_distr::{Distribution, StudentT};

use super::unit_open;
use crate::dist::{t3_cdf, t3_quantile};
use crate::error::{Error, Result};

/// Student-t copula with ν = 3 degrees of freedom and correlation ρ.
#[derive(Debug, Clone, Copy)]
pub struct StudentT3Copula {
    rho: f64,
}

impl StudentT3Copula {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::InvalidParameter {
                name: "rho",
                reason: format!("correlation must lie in (-1,1), got {rho}"),
            });
        }
        Ok(StudentT3Copula { rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Draw U | V = v. On the t-scale, W₁ | W₂ = w₂ is a rescaled t with
    /// ν+1 degrees of freedom:
    /// W₁ = ρ w₂ + √((ν + w₂²)(1−ρ²)/(ν+1)) · t_{ν+1}.
    pub fn sample_u_given_v<R: Rng>(&self, v: f64, rng: &mut R) -> f64 {
        const NU: f64 = 3.0;
        let w2 = t3_quantile(v);
        let t: f64 = StudentT::new(NU + 1.0).unwrap().sample(rng);
        let scale = ((NU + w2 * w2) * (1.0 - self.rho * self.rho) / (NU + 1.0)).sqrt();
        t3_cdf(self.rho * w2 + scale * t)
    }

    /// One (u, v) pair: v uniform, u from the conditional.
    pub fn sample_pair<R: Rng>(&self, rng: &mut R) -> (f64, f64) {
        let v = unit_open(rng);
        (self.sample_u_given_v(v, rng), v)
    }
}

/// Gumbel copula C(u,v) = exp(−[(−ln u)^θ + (−ln v)^θ]^{1/θ}), θ ≥ 1.
#[derive(Debug, Clone, Copy)]
pub struct GumbelCopula {
    theta: f64,
}

impl GumbelCopula {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta >= 1.0) || !theta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "theta",
                reason: format!("Gumbel parameter must be >= 1, got {theta}"),
            });
        }
        Ok(GumbelCopula { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Conditional CDF C_{1|2}(u|v) = ∂C/∂v, in a = −ln u, b = −ln v:
    /// exp(−S^{1/θ}) S^{1/θ−1} b^{θ−1} / v with S = a^θ + b^θ. Decreasing
    /// from 1 to 0 as a runs over (0, ∞).
    fn conditional_cdf_at(&self, a: f64, b: f64) -> f64 {
        let t = self.theta;
        let s = a.powf(t) + b.powf(t);
        let log_c = -s.powf(1.0 / t) + (1.0 / t - 1.0) * s.ln() + (t - 1.0) * b.ln() + b;
        log_c.exp()
    }

    /// Invert p = C_{1|2}(u|v) for u, by bracketed bisection in a = −ln u.
    /// The target function is monotone, so 100 halvings pin u to full
    /// double precision.
    pub fn conditional_u(&self, v: f64, p: f64) -> f64 {
        debug_assert!(v > 0.0 && v < 1.0 && p > 0.0 && p < 1.0);
        let b = -v.ln();
        let mut lo = 0.0_f64;
        let mut hi = b.max(1.0);
        let mut grow = 0;
        while self.conditional_cdf_at(hi, b) > p {
            hi *= 2.0;
            grow += 1;
            if grow > 200 {
                break;
            }
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.conditional_cdf_at(mid, b) > p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (-0.5 * (lo + hi)).exp()
    }

    /// Draw U | V = v.
    pub fn sample_u_given_v<R: Rng>(&self, v: f64, rng: &mut R) -> f64 {
        self.conditional_u(v, unit_open(rng))
    }

    /// One (u, v) pair via conditional inversion.
    pub fn sample_pair<R: Rng>(&self, rng: &mut R) -> (f64, f64) {
        let v = unit_open(rng);
        (self.sample_u_given_v(v, rng), v)
    }

    /// One (u, v) pair via the positive-stable frailty construction
    /// (α = 1/θ stable mixing variable S, then Uᵢ = exp(−(Eᵢ/S)^{1/θ})).
    /// Kept as an independent sampling route for testing the inversion.
    pub fn sample_pair_stable<R: Rng>(&self, rng: &mut R) -> (f64, f64) {
        let alpha = 1.0 / self.theta;
        let theta_angle = unit_open(rng) * std::f64::consts::PI;
        let w = -unit_open(rng).ln();
        let sin_t = theta_angle.sin();
        let s = (alpha * theta_angle).sin() / sin_t.powf(1.0 / alpha)
            * (((1.0 - alpha) * theta_angle).sin() / w).powf((1.0 - alpha) / alpha);
        let e1 = -unit_open(rng).ln();
        let e2 = -unit_open(rng).ln();
        ((-(e1 / s).powf(alpha)).exp(), (-(e2 / s).powf(alpha)).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Kendall's tau by inversion counting (merge sort), O(n log n); valid
    /// for continuous draws (no ties).
    fn kendall_tau(pairs: &[(f64, f64)]) -> f64 {
        let mut sorted: Vec<(f64, f64)> = pairs.to_vec();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut v: Vec<f64> = sorted.iter().map(|p| p.1).collect();
        let n = v.len();
        let mut buf = vec![0.0; n];
        fn count_inversions(v: &mut [f64], buf: &mut [f64]) -> u64 {
            let n = v.len();
            if n <= 1 {
                return 0;
            }
            let mid = n / 2;
            let (left, right) = v.split_at_mut(mid);
            let mut inv = count_inversions(left, buf) + count_inversions(right, buf);
            let (mut i, mut j, mut k) = (0, 0, 0);
            while i < left.len() && j < right.len() {
                if left[i] <= right[j] {
                    buf[k] = left[i];
                    i += 1;
                } else {
                    buf[k] = right[j];
                    j += 1;
                    inv += (left.len() - i) as u64;
                }
                k += 1;
            }
            while i < left.len() {
                buf[k] = left[i];
                i += 1;
                k += 1;
            }
            while j < right.len() {
                buf[k] = right[j];
                j += 1;
                k += 1;
            }
            v.copy_from_slice(&buf[..n]);
            inv
        }
        let inv = count_inversions(&mut v, &mut buf);
        1.0 - 4.0 * inv as f64 / (n as f64 * (n as f64 - 1.0))
    }

    fn spearman_rho(pairs: &[(f64, f64)]) -> f64 {
        let n = pairs.len();
        let rank = |get: &dyn Fn(&(f64, f64)) -> f64| -> Vec<f64> {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| get(&pairs[a]).partial_cmp(&get(&pairs[b])).unwrap());
            let mut r = vec![0.0; n];
            for (pos, &i) in idx.iter().enumerate() {
                r[i] = pos as f64 + 1.0;
            }
            r
        };
        let ru = rank(&|p: &(f64, f64)| p.0);
        let rv = rank(&|p: &(f64, f64)| p.1);
        let mu = (n as f64 + 1.0) / 2.0;
        let mut num = 0.0;
        let mut du = 0.0;
        let mut dv = 0.0;
        for i in 0..n {
            num += (ru[i] - mu) * (rv[i] - mu);
            du += (ru[i] - mu) * (ru[i] - mu);
            dv += (rv[i] - mu) * (rv[i] - mu);
        }
        num / (du * dv).sqrt()
    }

    fn tail_concordance(pairs: &[(f64, f64)], q: f64) -> f64 {
        let joint = pairs.iter().filter(|(u, v)| *u > q && *v > q).count() as f64;
        joint / pairs.len() as f64 / (1.0 - q)
    }

    #[test]
    fn parameter_guards() {
        assert!(StudentT3Copula::new(1.0).is_err());
        assert!(StudentT3Copula::new(-1.0).is_err());
        assert!(GumbelCopula::new(0.9).is_err());
        assert!(GumbelCopula::new(f64::NAN).is_err());
        assert!(GumbelCopula::new(1.0).is_ok());
    }

    #[test]
    fn gumbel_theta_one_is_independence() {
        let c = GumbelCopula::new(1.0).unwrap();
        for (v, p) in [(0.3, 0.7), (0.95, 0.02), (0.5, 0.5), (0.01, 0.99)] {
            let u = c.conditional_u(v, p);
            assert!((u - p).abs() < 1e-12, "v={v}, p={p}: u={u}");
        }
    }

    #[test]
    fn gumbel_conditional_round_trips() {
        let c = GumbelCopula::new(2.0).unwrap();
        for v in [0.1, 0.5, 0.9, 0.995] {
            let b = -f64::ln(v);
            for p in [0.01, 0.3, 0.8, 0.99] {
                let u = c.conditional_u(v, p);
                assert!(u > 0.0 && u < 1.0);
                let back = c.conditional_cdf_at(-u.ln(), b);
                assert!((back - p).abs() < 1e-9, "v={v}, p={p}: round trip {back}");
            }
        }
    }

    #[test]
    fn gumbel_conditional_monotone_in_p() {
        let c = GumbelCopula::new(5.0).unwrap();
        let v = 0.77;
        let mut prev = 0.0;
        for i in 1..100 {
            let u = c.conditional_u(v, i as f64 / 100.0);
            assert!(u > prev);
            prev = u;
        }
    }

    #[test]
    fn gumbel_marginals_are_uniform() {
        let c = GumbelCopula::new(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let n = 200_000;
        let mut mean_u = 0.0;
        let mut mean_v = 0.0;
        let mut below_u = 0usize;
        for _ in 0..n {
            let (u, v) = c.sample_pair(&mut rng);
            mean_u += u;
            mean_v += v;
            if u < 0.25 {
                below_u += 1;
            }
        }
        mean_u /= n as f64;
        mean_v /= n as f64;
        // mean 1/2 ± 4·se, se = 1/(√12·√n)
        let se = 1.0 / (12.0f64.sqrt() * (n as f64).sqrt());
        assert!((mean_u - 0.5).abs() < 4.0 * se, "mean U {mean_u}");
        assert!((mean_v - 0.5).abs() < 4.0 * se, "mean V {mean_v}");
        let p = below_u as f64 / n as f64;
        let pse = (0.25 * 0.75 / n as f64).sqrt();
        assert!((p - 0.25).abs() < 4.0 * pse, "P(U<1/4) = {p}");
    }

    #[test]
    fn gumbel_tail_dependence_both_samplers() {
        // upper tail concordance P(U>q, V>q)/(1−q) near the tail-dependence
        // coefficient 2 − 2^{1/θ} at q = 0.95; the conditional-inversion and
        // positive-stable samplers must also agree with each other
        let c = GumbelCopula::new(2.0).unwrap();
        let target = 2.0 - 2.0f64.sqrt();
        let n = 300_000;
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let inv: Vec<(f64, f64)> = (0..n).map(|_| c.sample_pair(&mut rng)).collect();
        let stb: Vec<(f64, f64)> = (0..n).map(|_| c.sample_pair_stable(&mut rng)).collect();
        let t_inv = tail_concordance(&inv, 0.95);
        let t_stb = tail_concordance(&stb, 0.95);
        assert!((t_inv - target).abs() < 0.05, "inversion concordance {t_inv}");
        assert!((t_stb - target).abs() < 0.05, "stable concordance {t_stb}");
        assert!((t_inv - t_stb).abs() < 0.03, "samplers disagree: {t_inv} vs {t_stb}");
    }

    #[test]
    fn gumbel_kendall_tau_is_one_minus_inverse_theta() {
        // Kendall's τ of a Gumbel copula is 1 − 1/θ
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for theta in [2.0, 5.0] {
            let c = GumbelCopula::new(theta).unwrap();
            let pairs: Vec<(f64, f64)> = (0..100_000).map(|_| c.sample_pair(&mut rng)).collect();
            let tau = kendall_tau(&pairs);
            assert!(
                (tau - (1.0 - 1.0 / theta)).abs() < 0.01,
                "theta={theta}: tau {tau}"
            );
        }
    }

    #[test]
    fn student_t_copula_concordance() {
        // Kendall's τ = (2/π) arcsin ρ for elliptical copulas, and the rank
        // (Spearman) correlation sits near (6/π) arcsin(ρ/2) — exact for the
        // Gaussian, a very close approximation under t₃ tails.
        let c = StudentT3Copula::new(0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let pairs: Vec<(f64, f64)> = (0..200_000).map(|_| c.sample_pair(&mut rng)).collect();
        let tau = kendall_tau(&pairs);
        assert!((tau - 0.5903344706017332).abs() < 0.02, "tau {tau}");
        let rho_s = spearman_rho(&pairs);
        assert!((rho_s - 0.7859392826067277).abs() < 0.02, "spearman {rho_s}");
    }

    #[test]
    fn student_t_marginals_are_uniform() {
        let c = StudentT3Copula::new(0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(65);
        let n = 200_000;
        let mut mean_u = 0.0;
        let mut tail = 0usize;
        for _ in 0..n {
            let (u, _) = c.sample_pair(&mut rng);
            mean_u += u;
            if u > 0.99 {
                tail += 1;
            }
        }
        mean_u /= n as f64;
        let se = 1.0 / (12.0f64.sqrt() * (n as f64).sqrt());
        assert!((mean_u - 0.5).abs() < 4.0 * se, "mean U {mean_u}");
        let p = tail as f64 / n as f64;
        let pse = (0.01f64 * 0.99 / n as f64).sqrt();
        assert!((p - 0.01).abs() < 4.0 * pse, "P(U>0.99) = {p}");
    }
}
