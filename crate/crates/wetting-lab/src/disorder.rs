//! IID site disorder: the reward variables omega, their log-moment
//! generating function lambda(beta), the tilted weights xi, and the
//! truncation used for heavy-tailed environments.
//!
//! Disorder is addressed by (seed, site coordinates) through a counter-based
//! stream, so the same environment can be re-evaluated on boxes of different
//! sizes without storing anything.

use rand::Rng;
use thiserror::Error;

use crate::quad;
use crate::rngutil;

#[derive(Debug, Error, PartialEq)]
pub enum DisorderError {
    #[error("beta = {beta} is outside the finiteness interval {domain:?} of {law:?}")]
    OutsideDomain {
        beta: f64,
        law: DisorderLaw,
        domain: (f64, f64),
    },
    #[error("truncation level H must be > {min} (got {h})")]
    BadTruncation { h: f64, min: f64 },
    #[error("quadrature for {what} returned a non-finite value")]
    QuadratureFailure { what: &'static str },
}

/// Mean-zero unit-variance reward laws with closed-form lambda.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderLaw {
    /// omega ~ N(0, 1); lambda(beta) = beta^2 / 2 on all of R.
    StandardGaussian,
    /// omega = +-1 with probability 1/2; lambda(beta) = log cosh beta.
    SymmetricBernoulli,
    /// omega = E - 1 with E standard exponential;
    /// lambda(beta) = -beta - log(1 - beta), finite for beta < 1.
    ShiftedExponential,
}

impl DisorderLaw {
    /// Open interval where lambda is finite.
    pub fn domain(self) -> (f64, f64) {
        match self {
            DisorderLaw::StandardGaussian | DisorderLaw::SymmetricBernoulli => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            DisorderLaw::ShiftedExponential => (f64::NEG_INFINITY, 1.0),
        }
    }

    pub fn contains(self, beta: f64) -> bool {
        let (lo, hi) = self.domain();
        beta.is_finite() && beta > lo && beta < hi
    }

    fn check(self, beta: f64) -> Result<(), DisorderError> {
        if self.contains(beta) {
            Ok(())
        } else {
            Err(DisorderError::OutsideDomain {
                beta,
                law: self,
                domain: self.domain(),
            })
        }
    }

    /// log E[exp(beta omega)].
    pub fn lambda(self, beta: f64) -> Result<f64, DisorderError> {
        self.check(beta)?;
        Ok(match self {
            DisorderLaw::StandardGaussian => 0.5 * beta * beta,
            DisorderLaw::SymmetricBernoulli => beta.cosh().ln(),
            DisorderLaw::ShiftedExponential => -beta - (1.0 - beta).ln(),
        })
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            DisorderLaw::StandardGaussian => rngutil::standard_normal(rng),
            DisorderLaw::SymmetricBernoulli => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            DisorderLaw::ShiftedExponential => -rngutil::uniform_open01(rng).ln() - 1.0,
        }
    }

    /// E[f(omega)] by quadrature against the density (or exactly for the
    /// two-point law).
    pub fn expectation(self, f: &dyn Fn(f64) -> f64) -> f64 {
        match self {
            DisorderLaw::StandardGaussian => {
                let g = |w: f64| f(w) * crate::normal::pdf(w);
                quad::integrate_panels(&g, &[-40.0, -8.0, 0.0, 8.0, 40.0], 1e-12)
            }
            DisorderLaw::SymmetricBernoulli => 0.5 * (f(-1.0) + f(1.0)),
            DisorderLaw::ShiftedExponential => {
                // omega = t - 1 with density exp(-t) on t > 0.
                let g = |t: f64| f(t - 1.0) * (-t).exp();
                quad::integrate_panels(&g, &[0.0, 2.0, 10.0, 40.0, 200.0], 1e-12)
            }
        }
    }
}

/// Tilted weight xi = exp(beta omega - lambda(beta)); mean one on the
/// lambda-finiteness interval.
pub fn xi(law: DisorderLaw, beta: f64, omega: f64) -> Result<f64, DisorderError> {
    let lambda = law.lambda(beta)?;
    Ok((beta * omega - lambda).exp())
}

/// Truncated weight xi_H = min(xi, H).
pub fn xi_truncated(law: DisorderLaw, beta: f64, omega: f64, h_cap: f64) -> Result<f64, DisorderError> {
    if !(h_cap > 0.0) {
        return Err(DisorderError::BadTruncation { h: h_cap, min: 0.0 });
    }
    Ok(xi(law, beta, omega)?.min(h_cap))
}

/// The critical-point shift induced by truncation: -log E[xi_H].
/// Nonnegative, decreasing in H, vanishing as H -> infinity.
pub fn h_shift_for_truncation(
    law: DisorderLaw,
    beta: f64,
    h_cap: f64,
) -> Result<f64, DisorderError> {
    if !(h_cap > 1.0) {
        return Err(DisorderError::BadTruncation { h: h_cap, min: 1.0 });
    }
    if beta == 0.0 {
        // xi is identically 1, never truncated for H > 1.
        return Ok(0.0);
    }
    let lambda = law.lambda(beta)?;
    let mean = law.expectation(&|w| (beta * w - lambda).exp().min(h_cap));
    if !mean.is_finite() || mean <= 0.0 {
        return Err(DisorderError::QuadratureFailure {
            what: "E[xi_H]",
        });
    }
    // Clamp tiny negative rounding: E[xi_H] <= E[xi] = 1.
    Ok((-mean.ln()).max(0.0))
}

/// The IID environment: a deterministic function of (seed, site).
#[derive(Debug, Clone, Copy)]
pub struct DisorderField {
    pub law: DisorderLaw,
    pub seed: u64,
}

impl DisorderField {
    pub fn new(law: DisorderLaw, seed: u64) -> Self {
        DisorderField { law, seed }
    }

    /// The reward variable at a site; same (seed, site) always yields the
    /// same value, independent of any box.
    pub fn value(&self, coords: &[i64]) -> f64 {
        let mut rng = rngutil::site_stream(self.seed, coords);
        self.law.sample(&mut rng)
    }
}
