//! The soft-to-hard wall gap: the expected log correction
//! E log(1 + exp(-K + (beta omega - lambda + h)_-)) that bounds how much
//! free energy is lost when the wall strength K is sent to infinity.

use crate::disorder::{DisorderError, DisorderLaw};

/// The reflection-bound correction term, by quadrature against the law.
/// `(x)_-` is the negative part max(0, -x).
pub fn k_gap(law: DisorderLaw, beta: f64, h: f64, k_wall: f64) -> Result<f64, DisorderError> {
    assert!(k_wall > 0.0 && k_wall.is_finite());
    let lambda = law.lambda(beta)?;
    Ok(law.expectation(&|w| {
        let y = beta * w - lambda + h;
        let neg_part = (-y).max(0.0);
        (-k_wall + neg_part).exp().ln_1p()
    }))
}

/// Largest rate c such that log(gap(K)) <= -c K holds for every supplied
/// point; positive iff every gap is below one.
pub fn fit_exponential_rate(points: &[(f64, f64)]) -> f64 {
    points
        .iter()
        .map(|&(k, gap)| -gap.ln() / k)
        .fold(f64::INFINITY, f64::min)
}
