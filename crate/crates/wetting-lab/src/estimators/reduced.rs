//! The reduced partition function: at most one contact in the band, nothing
//! at or below it. All probabilities are under the free field with the given
//! boundary, so Monte Carlo here needs only exact free-field samples, and
//! the disorder enters through a single tilted weight per site.

use crate::disorder::DisorderField;
use crate::field::{harmonic_extension, sample_free_field, FieldConfig, GaussianSolve};
use crate::model::ModelParams;
use crate::normal;
use crate::rngutil;
use crate::stats::{variance_std_error, RunningStats};

use super::contact::EstimatorError;

/// A reduced-partition-function estimate.
#[derive(Debug, Clone)]
pub struct ReducedQ {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    /// All boundary sites sat above u/2 (the good-boundary event).
    pub in_good_event: bool,
    /// Set when the boundary failed the good event: the estimate is still
    /// returned but flagged.
    pub flagged: bool,
}

/// Count band/low sites of a sampled field over the energy window; returns
/// (number of sites with phi <= 1, the single such site if unique and in
/// the band).
fn classify_window(
    params: &ModelParams,
    field: &FieldConfig,
) -> (usize, Option<Vec<i64>>) {
    let mut low = 0usize;
    let mut single: Option<Vec<i64>> = None;
    for site in params.lattice.window_sites() {
        let phi = field.value(&site);
        if phi <= 1.0 {
            low += 1;
            if low == 1 && phi >= 0.0 {
                single = Some(site);
            } else {
                single = None;
            }
        }
    }
    (low, single)
}

/// Monte Carlo estimate of
///   Q = P(no window site <= 1)
///     + sum_x xi_x e^h P(phi_x in [0,1], all other window sites > 1),
/// with probabilities under the free field with the given boundary.
pub fn reduced_q(
    params: &ModelParams,
    boundary: &FieldConfig,
    disorder: &DisorderField,
    u_good: f64,
    mc_samples: usize,
    seed: u64,
) -> Result<ReducedQ, EstimatorError> {
    let lat = &params.lattice;
    let solve = GaussianSolve::new(lat.clone());
    let mut rng = rngutil::stream(seed, &[0x7265_6475_6365]);

    let in_good_event = lat
        .sites()
        .filter(|s| lat.is_boundary(s))
        .all(|s| boundary.value(&s) > u_good / 2.0);

    let mut acc = RunningStats::default();
    for _ in 0..mc_samples {
        let field = sample_free_field(&solve, boundary, &mut rng)?;
        let (low, single) = classify_window(params, &field);
        let v = if low == 0 {
            1.0
        } else if let Some(site) = single {
            let xi = (params.beta * disorder.value(&site) - params.lambda()).exp();
            xi * params.h.exp()
        } else {
            0.0
        };
        acc.push(v);
    }
    Ok(ReducedQ {
        value: acc.mean(),
        std_error: acc.std_error(),
        n_samples: acc.count(),
        in_good_event,
        flagged: !in_good_event,
    })
}

/// Two-term closed form on the one-interior-site lattice (requires every
/// fixed window site to sit strictly above the band):
///   Q = P(phi > 1) + xi e^h P(phi in [0, 1]).
pub fn closed_form_q_single_site(
    params: &ModelParams,
    boundary: &FieldConfig,
    disorder: &DisorderField,
) -> Result<f64, EstimatorError> {
    let lat = &params.lattice;
    assert_eq!(lat.num_interior(), 1, "closed form is for one free site");
    for site in lat.window_sites() {
        if !lat.is_interior(&site) {
            assert!(
                boundary.value(&site) > 1.0,
                "fixed window sites must clear the band for the two-term form"
            );
        }
    }
    let solve = GaussianSolve::new(lat.clone());
    let mean = harmonic_extension(&solve, boundary)?;
    let site = lat.interior_coords(0);
    let m = mean.value(&site);
    let sd = (1.0 / (2.0 * lat.dim() as f64)).sqrt();
    let a = (0.0 - m) / sd;
    let b = (1.0 - m) / sd;
    let xi = (params.beta * disorder.value(&site) - params.lambda()).exp();
    Ok(normal::sf(b) + xi * params.h.exp() * normal::interval_mass(a, b))
}

/// Disorder second-moment diagnostics of Q at fixed boundary.
#[derive(Debug, Clone)]
pub struct SecondMomentReport {
    pub mean_q_minus_1: f64,
    pub mean_se: f64,
    pub var_q: f64,
    pub var_se: f64,
    /// e^{2h} Var(xi) sum_x P(delta_x = 1)^2 from the free-field marginals.
    pub variance_bound: f64,
    /// variance_bound - var_q.
    pub slack: f64,
    pub replicas: u64,
}

/// Estimate E(Q - 1) and Var(Q) over disorder replicas with the geometry
/// (free-field event probabilities) estimated once and shared: Q depends on
/// the environment only through the per-site tilted weights.
pub fn second_moment_report(
    params: &ModelParams,
    boundary: &FieldConfig,
    replicas: usize,
    mc_samples: usize,
    seed: u64,
) -> Result<SecondMomentReport, EstimatorError> {
    let lat = &params.lattice;
    let solve = GaussianSolve::new(lat.clone());
    let mut rng = rngutil::stream(seed, &[0x6d6f_6d32]);

    // Geometry pass: p0 = P(no site <= 1), pi_x = P(single contact at x).
    let window: Vec<Vec<i64>> = lat.window_sites().collect();
    let mut single_hits = vec![0u64; window.len()];
    let mut none_hits = 0u64;
    for _ in 0..mc_samples {
        let field = sample_free_field(&solve, boundary, &mut rng)?;
        let (low, single) = classify_window(params, &field);
        if low == 0 {
            none_hits += 1;
        } else if let Some(site) = single {
            let idx = window.iter().position(|w| *w == site).unwrap();
            single_hits[idx] += 1;
        }
    }
    let m = mc_samples as f64;
    let p0 = none_hits as f64 / m;
    let pi: Vec<f64> = single_hits.iter().map(|&c| c as f64 / m).collect();
    let se_p0 = (p0 * (1.0 - p0) / m).sqrt();
    let se_pi: Vec<f64> = pi.iter().map(|&p| (p * (1.0 - p) / m).sqrt()).collect();

    // Replica pass: Q_r from per-replica tilted weights.
    let mut qs = Vec::with_capacity(replicas);
    let eh = params.h.exp();
    for r in 0..replicas {
        let disorder = DisorderField::new(
            params.law,
            rngutil::mix(params.disorder_seed, &[0xd15, r as u64]),
        );
        let mut q = p0;
        for (site, &p) in window.iter().zip(&pi) {
            if p > 0.0 {
                let xi = (params.beta * disorder.value(site) - params.lambda()).exp();
                q += eh * xi * p;
            }
        }
        qs.push(q);
    }
    let mut acc = RunningStats::default();
    for &q in &qs {
        acc.push(q - 1.0);
    }

    // Free-field marginal band probabilities for the variance bound.
    let mean_field = harmonic_extension(&solve, boundary)?;
    let mut sum_p_delta_sq = 0.0;
    for site in &window {
        let (mu, var) = if lat.is_interior(site) {
            (mean_field.value(site), solve.marginal_variance(site).unwrap())
        } else {
            (boundary.value(site), 0.0)
        };
        let p_delta = if var > 0.0 {
            let sd = var.sqrt();
            normal::interval_mass((0.0 - mu) / sd, (1.0 - mu) / sd)
        } else if (0.0..=1.0).contains(&mu) {
            1.0
        } else {
            0.0
        };
        sum_p_delta_sq += p_delta * p_delta;
    }
    let var_xi = (params.law.lambda(2.0 * params.beta)? - 2.0 * params.lambda()).exp() - 1.0;
    let variance_bound = (2.0 * params.h).exp() * var_xi * sum_p_delta_sq;
    let var_q = {
        let n = qs.len() as f64;
        let mean = qs.iter().sum::<f64>() / n;
        qs.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / (n - 1.0)
    };

    // The geometry pass is shared by every replica, so its Monte Carlo
    // noise is systematic for the replica spread and has to be propagated
    // separately: Var(Q) scales as Var(xi) e^{2h} sum pi^2 and E(Q-1) is
    // linear in (p0, pi).
    let geo_se_var = (2.0 * params.h).exp()
        * var_xi
        * pi.iter()
            .zip(&se_pi)
            .map(|(&p, &s)| (2.0 * p * s).powi(2))
            .sum::<f64>()
            .sqrt();
    let geo_se_mean = (se_p0.powi(2)
        + se_pi.iter().map(|&s| (eh * s).powi(2)).sum::<f64>())
    .sqrt();

    Ok(SecondMomentReport {
        mean_q_minus_1: acc.mean(),
        mean_se: (acc.std_error().powi(2) + geo_se_mean.powi(2)).sqrt(),
        var_q,
        var_se: (variance_std_error(&qs).powi(2) + geo_se_var.powi(2)).sqrt(),
        variance_bound,
        slack: variance_bound - var_q,
        replicas: replicas as u64,
    })
}
