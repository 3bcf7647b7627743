//! One-site analytics: the Jensen lower bound on the free energy, its
//! explicit closed form, the single-site partition-function asymptotics,
//! and the scaling table that tracks -log f / (log 1/h)^2 toward
//! sigma^2 / 2.
//!
//! Conventions: `sigma` is the standard deviation of the one-site marginal
//! of the infinite-volume field under the implemented Hamiltonian (the
//! "operational" normalization). Functions taking `u_std` measure the mean
//! height in units of sigma; functions taking `u` use the physical height,
//! with the marginal being N(u, sigma^2).

use crate::normal;

/// Jensen/annealed-entropy lower bound at standardized mean height `u_std`:
/// h P(-u, -u + 1/sigma) - K P(-inf, -u) with P the standard normal law.
pub fn jensen_lower_bound(u_std: f64, h: f64, k_wall: f64, sigma: f64) -> f64 {
    assert!(sigma > 0.0 && k_wall.is_finite());
    h * (normal::sf(u_std - 1.0 / sigma) - normal::sf(u_std)) - k_wall * normal::sf(u_std)
}

/// The near-optimal standardized height sigma log(1/h) + r with
/// r = 1/(2 sigma) + sigma log(4(K+1)).
pub fn jensen_maximizer(h: f64, k_wall: f64, sigma: f64) -> f64 {
    let r = 0.5 / sigma + sigma * (4.0 * (k_wall + 1.0)).ln();
    sigma * (1.0 / h).ln() + r
}

/// Negative log of the explicit lower bound: with L = log(1/h) and
/// r = 1/(2 sigma) + sigma log(4(K+1)),
///
///   -log bound = (sigma^2/2) L^2 + (1/2 + sigma^2 log(4(K+1))) L
///                + r^2/2 + log((r + sigma L) sqrt(2 pi) / 2).
///
/// Evaluated in log space so it stays meaningful when the bound itself
/// underflows.
pub fn explicit_lower_bound_neg_log(h: f64, k_wall: f64, sigma: f64) -> f64 {
    assert!(h > 0.0 && h < 1.0 && k_wall >= 0.0 && sigma > 0.0);
    let l = (1.0 / h).ln();
    let r = 0.5 / sigma + sigma * (4.0 * (k_wall + 1.0)).ln();
    0.5 * sigma * sigma * l * l
        + (0.5 + sigma * sigma * (4.0 * (k_wall + 1.0)).ln()) * l
        + 0.5 * r * r
        + ((r + sigma * l) * (2.0 * std::f64::consts::PI).sqrt() / 2.0).ln()
}

/// The explicit lower bound itself (0 when it underflows f64).
pub fn explicit_lower_bound(h: f64, k_wall: f64, sigma: f64) -> f64 {
    (-explicit_lower_bound_neg_log(h, k_wall, sigma)).exp()
}

/// The one-site partition-function quantities at physical height u:
/// exact via normal CDFs, the displayed asymptotic product, and the
/// predicted squared-log gain.
#[derive(Debug, Clone, Copy)]
pub struct OneSiteQuantities {
    /// P(phi > 1) + e^h P(phi in [0,1]) + e^{-K} P(phi < 0), phi ~ N(u, sigma^2).
    pub exact: f64,
    /// Asymptotic-product approximation of the same quantity.
    pub approx: f64,
    /// exact - 1, computed without cancellation.
    pub exact_gain: f64,
    /// approx - 1, computed without cancellation.
    pub approx_gain: f64,
    /// exp(-(sigma^2/2) (log 1/h)^2): the predicted gain scale.
    pub predicted_gain: f64,
}

pub fn onesite_quantities(u: f64, h: f64, k_wall: f64, sigma: f64) -> OneSiteQuantities {
    assert!(sigma > 0.0);
    let p_le1 = normal::sf((u - 1.0) / sigma);
    let p_neg = normal::sf(u / sigma);
    let exact_gain = (h.exp() - 1.0) * p_le1 + ((-k_wall).exp() - h.exp()) * p_neg;

    let pref = sigma / (u * (2.0 * std::f64::consts::PI).sqrt());
    let approx_gain = pref
        * (h * (-(u - 1.0) * (u - 1.0) / (2.0 * sigma * sigma)).exp()
            - (1.0 - (-k_wall).exp()) * (-u * u / (2.0 * sigma * sigma)).exp());

    let predicted_gain = if h > 0.0 && h < 1.0 {
        let l = (1.0 / h).ln();
        (-0.5 * sigma * sigma * l * l).exp()
    } else {
        f64::NAN
    };
    OneSiteQuantities {
        exact: 1.0 + exact_gain,
        approx: 1.0 + approx_gain,
        exact_gain,
        approx_gain,
        predicted_gain,
    }
}

/// Root in u of the bracket h exp(u/sigma^2 - 1/(2 sigma^2)) - (1 - e^{-K}),
/// located by bisection. The bracket is the sign of the one-site gain in the
/// asymptotic product: positive gain requires u above this height.
pub fn bracket_root_height(h: f64, k_wall: f64, sigma: f64) -> f64 {
    assert!(h > 0.0 && h < 1.0 && k_wall > 0.0);
    let s2 = sigma * sigma;
    let g = |u: f64| h * (u / s2 - 0.5 / s2).exp() - (1.0 - (-k_wall).exp());
    let (mut lo, mut hi) = (0.0, s2 * (1.0 / h).ln() + 50.0 * s2 + 1.0);
    assert!(g(lo) < 0.0 && g(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// P(phi_0 <= 1) / P(phi_0 < 0) for phi_0 ~ N(u, sigma^2); diverges like
/// h^{-a} along u = a sigma^2 log(1/h).
pub fn ratio_estimate(u: f64, sigma: f64) -> f64 {
    assert!(u > 2.0, "the ratio asymptotics are stated for u > 2");
    normal::sf((u - 1.0) / sigma) / normal::sf(u / sigma)
}

/// ratio_estimate at u = a sigma^2 log(1/h), normalized by its limit
/// h^{-a} exp(-1/(2 sigma^2)); tends to 1 (slowly, like 1/log(1/h)) as
/// h decreases.
pub fn ratio_normalized(a_tilde: f64, h: f64, sigma: f64) -> f64 {
    assert!(a_tilde > 1.0 && h > 0.0 && h < 1.0);
    let l = (1.0 / h).ln();
    let u = a_tilde * sigma * sigma * l;
    // Work in logs: ratio can exceed f64 range for small h.
    let log_ratio = normal::sf((u - 1.0) / sigma).ln() - normal::sf(u / sigma).ln();
    (log_ratio - a_tilde * l + 0.5 / (sigma * sigma)).exp()
}

/// The band-over-tail ratio u |-> P(-u, -u+a) / P(-inf, -u) in standardized
/// units; smooth, positive, asymptotically exp(a u - a^2/2).
pub fn band_over_tail_ratio(u_std: f64, a: f64) -> f64 {
    assert!(a > 0.0);
    (normal::sf(u_std - a) - normal::sf(u_std)) / normal::sf(u_std)
}

/// Free-energy scale conjectured for the singular narrow-band limit with
/// reward exp(c_a + J): exp(-(sigma^2/2) e^{-2J}).
pub fn delta_pinning_conjecture(j: f64, sigma: f64) -> f64 {
    (-0.5 * sigma * sigma * (-2.0 * j).exp()).exp()
}

/// One row of the scaling table at h = e^{-k}.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ScalingRow {
    pub k: u32,
    pub h: f64,
    /// -log(explicit bound) / (log 1/h)^2; decreases toward sigma^2/2.
    pub analytic: f64,
    /// Relative gap |exact - approx| / |exact - 1| of the one-site
    /// quantities at u = sigma^2 log(1/h) + 1/2.
    pub onesite_gap: f64,
    /// Simulated -log f / (log 1/h)^2 where an estimate resolved f > 0;
    /// None marks the regime where the free energy sits below the Monte
    /// Carlo noise floor (the expected outcome for k beyond a few units).
    pub simulated: Option<f64>,
}

/// Analytic scaling rows for a list of integer k (h = e^{-k}).
pub fn scaling_rows(ks: &[u32], k_wall: f64, sigma: f64) -> Vec<ScalingRow> {
    ks.iter()
        .map(|&k| {
            let h = (-(k as f64)).exp();
            let l = k as f64;
            let analytic = explicit_lower_bound_neg_log(h, k_wall, sigma) / (l * l);
            let u = sigma * sigma * l + 0.5;
            let q = onesite_quantities(u, h, k_wall, sigma);
            let onesite_gap = (q.exact_gain - q.approx_gain).abs() / q.exact_gain.abs();
            ScalingRow {
                k,
                h,
                analytic,
                onesite_gap,
                simulated: None,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Operational sigma_3 for tests; the production value is computed by
    // the sigma module and agrees with this to ~1e-4.
    const SIGMA3: f64 = 0.502_726;

    #[test]
    fn jensen_bound_vacuous_at_h_zero() {
        for u in [0.5, 2.0, 5.0, 10.0] {
            assert!(jensen_lower_bound(u, 0.0, 1.0, SIGMA3) <= 0.0);
        }
    }

    #[test]
    fn explicit_bound_positive_and_below_exact_maximum() {
        // The closed form drops positive terms, so the bound evaluated at
        // the near-optimal height dominates it.
        for &k in &[6u32, 8, 10, 14] {
            let h = (-(k as f64)).exp();
            let expl = explicit_lower_bound(h, 1.0, SIGMA3);
            assert!(expl > 0.0);
            let u = jensen_maximizer(h, 1.0, SIGMA3);
            let direct = jensen_lower_bound(u, h, 1.0, SIGMA3);
            assert!(
                direct >= expl * 0.9,
                "k={k}: direct {direct} vs explicit {expl}"
            );
        }
    }

    #[test]
    fn explicit_bound_log_slope_approaches_half_sigma_sq() {
        // log(bound)/(log h)^2 -> -sigma^2/2 from below, monotonically.
        let target = -0.5 * SIGMA3 * SIGMA3;
        let mut prev = f64::NEG_INFINITY;
        for k in (4..=14).step_by(2) {
            let h = (-(k as f64)).exp();
            let v = -explicit_lower_bound_neg_log(h, 1.0, SIGMA3) / ((k * k) as f64);
            assert!(v < target, "k={k}");
            assert!(v > prev, "k={k}: not monotone");
            prev = v;
        }
    }

    #[test]
    fn onesite_exact_is_one_when_potentials_vanish() {
        let q = onesite_quantities(3.0, 0.0, 0.0, SIGMA3);
        assert_eq!(q.exact, 1.0);
        assert_eq!(q.exact_gain, 0.0);
    }

    #[test]
    fn onesite_gain_matches_interval_accounting() {
        // Direct three-interval evaluation as an independent route.
        let (u, h, kw) = (2.5f64, 0.1f64, 1.0f64);
        let p_up = normal::cdf((u - 1.0) / SIGMA3);
        let p_band =
            normal::interval_mass((u - 1.0) / SIGMA3, u / SIGMA3);
        let p_neg = normal::sf(u / SIGMA3);
        // In phi coordinates: P(phi > 1) = P(N < (u-1)/sigma) etc.
        let direct = p_up + h.exp() * p_band + (-kw).exp() * p_neg;
        let q = onesite_quantities(u, h, kw, SIGMA3);
        assert!((q.exact - direct).abs() < 1e-14);
    }

    #[test]
    fn onesite_relative_gap_shrinks_along_the_ridge() {
        // u = sigma^2 log(1/h) + 2, K = 1: the relative mismatch between the
        // exact and asymptotic one-site values fades as h drops.
        let gap = |k: f64| {
            let h = (-k).exp();
            let u = SIGMA3 * SIGMA3 * k + 2.0;
            let q = onesite_quantities(u, h, 1.0, SIGMA3);
            (q.exact_gain - q.approx_gain).abs() / q.exact_gain.abs()
        };
        let (g8, g16, g32) = (gap(8.0), gap(16.0), gap(32.0));
        assert!(g16 < g8 && g32 < g16, "{g8} {g16} {g32}");
        // At u = 6, h = e^{-u/sigma^2 + 2} the gains sit near 1e-33, so the
        // comparison must run on the gains themselves: 1 + gain rounds to
        // 1.0 in f64 and the naive difference of the full values is pure
        // cancellation noise. The frozen value 0.335 comes from direct
        // normal-CDF evaluation of both gains (the u/(u-1) prefactor
        // mismatch dominates at this height).
        let u = 6.0;
        let h = (-u / (SIGMA3 * SIGMA3) + 2.0).exp();
        let q = onesite_quantities(u, h, 1.0, SIGMA3);
        assert_eq!(q.exact, 1.0);
        let rel = (q.exact_gain - q.approx_gain).abs() / q.exact_gain.abs();
        assert!((rel - 0.335).abs() < 0.005, "relative gap {rel}");
    }

    #[test]
    fn bracket_root_is_near_the_predicted_height() {
        // Root of the asymptotic bracket vs the heuristic height
        // sigma^2(log 1/h + log(4 / (1 - e^{-K}))), within one sigma.
        let (h, kw) = ((-10.0f64).exp(), 1.0);
        let root = bracket_root_height(h, kw, SIGMA3);
        // Closed form: sigma^2 log((1-e^{-K})/h) + 1/2.
        let closed = SIGMA3 * SIGMA3 * ((1.0 - (-kw).exp()) / h).ln() + 0.5;
        assert!((root - closed).abs() < 1e-6);
        let heuristic =
            SIGMA3 * SIGMA3 * ((1.0 / h).ln() + (4.0 / (1.0 - (-kw).exp())).ln());
        assert!((root - heuristic).abs() <= SIGMA3, "{root} vs {heuristic}");
    }

    #[test]
    fn ratio_exceeds_one_and_normalization_converges() {
        for u in [3.0, 5.0, 9.0] {
            assert!(ratio_estimate(u, SIGMA3) > 1.0);
        }
        // The u/(u-1) prefactor makes convergence logarithmic: frozen oracle
        // values computed from the normal CDF directly.
        let n12 = ratio_normalized(1.5, (-12.0f64).exp(), SIGMA3);
        let n20 = ratio_normalized(1.5, (-20.0f64).exp(), SIGMA3);
        let n40 = ratio_normalized(1.5, (-40.0f64).exp(), SIGMA3);
        assert!((n12 - 1.272).abs() < 0.01, "n12 = {n12}");
        assert!((n20 - 1.150).abs() < 0.01, "n20 = {n20}");
        assert!((n40 - 1.070).abs() < 0.01, "n40 = {n40}");
        assert!((n20 - 1.0).abs() < (n12 - 1.0).abs());
        assert!((n40 - 1.0).abs() < (n20 - 1.0).abs());
    }

    #[test]
    fn band_over_tail_ratio_is_increasing_and_unbounded() {
        // Reported as an observation: increasing on the tested grid, with
        // the stated exponential asymptote.
        let a = 1.0 / SIGMA3;
        let mut prev = 0.0;
        let mut u = -6.0;
        while u <= 12.0 {
            let v = band_over_tail_ratio(u, a);
            assert!(v > prev, "not increasing at u={u}");
            prev = v;
            u += 0.25;
        }
        let asym = |t: f64| (a * t - 0.5 * a * a).exp();
        assert!((band_over_tail_ratio(12.0, a) / asym(12.0) - 1.0).abs() < 0.25);
    }

    #[test]
    fn predicted_gain_beats_any_power() {
        // exp(-(sigma^2/2)(log 1/h)^2) / h^10 -> 0 along h = e^{-k}; in log
        // space since the gain underflows f64 past k ~ 75. The log-ratio is
        // a downward parabola in k; sample past its vertex 10/sigma^2 ~ 40.
        let mut prev = f64::INFINITY;
        for k in [40, 60, 80, 100, 120] {
            let h = (-(k as f64)).exp();
            let q = onesite_quantities(3.0, h, 1.0, SIGMA3);
            if q.predicted_gain > 0.0 {
                assert!(
                    (q.predicted_gain.ln() - (-0.5 * SIGMA3 * SIGMA3 * (k * k) as f64)).abs()
                        < 1e-9
                );
            }
            let ratio_log = -0.5 * SIGMA3 * SIGMA3 * (k * k) as f64 - 10.0 * h.ln();
            assert!(ratio_log < prev);
            prev = ratio_log;
        }
        assert!(prev < -200.0);
    }

    #[test]
    fn delta_pinning_values_decrease_in_negative_j() {
        let a = delta_pinning_conjecture(-1.0, SIGMA3);
        let b = delta_pinning_conjecture(-2.0, SIGMA3);
        let c = delta_pinning_conjecture(-3.0, SIGMA3);
        assert!(a > b && b > c);
        assert!(c > 0.0 && c < 1.0);
    }

    #[test]
    fn scaling_rows_track_the_analytic_column() {
        let rows = scaling_rows(&[6, 8, 10, 12, 14, 16, 18, 20], 1.0, SIGMA3);
        let target = 0.5 * SIGMA3 * SIGMA3;
        for w in rows.windows(2) {
            assert!(w[1].analytic < w[0].analytic, "column not decreasing");
        }
        for r in &rows {
            assert!(r.analytic > target, "column crossed its limit");
        }
    }
}
