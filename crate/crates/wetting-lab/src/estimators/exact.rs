//! Exact partition functions on lattices with at most three interior sites:
//! the master oracle every Monte Carlo estimator is held against.
//!
//! One interior site reduces to three Gaussian interval masses; two or three
//! sites are handled by tensor quadrature with panel splits at the band
//! edges 0 and 1 of every coordinate.

use thiserror::Error;

use crate::disorder::DisorderField;
use crate::field::{harmonic_extension, FieldConfig, GaussianSolve};
use crate::model::{boundary_window_log_weight, ModelParams, Wall};
use crate::quad;
use crate::sampler::SiteConditional;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("exact log Z supports at most 3 interior sites, lattice has {0}")]
    TooManyInteriorSites(usize),
    #[error(transparent)]
    Field(#[from] crate::field::FieldError),
}

/// log Z over the full energy window for a fixed environment and fixed
/// boundary data. Absolute accuracy ~1e-9 or better.
pub fn exact_log_z_small(
    params: &ModelParams,
    boundary: &FieldConfig,
    disorder: &DisorderField,
) -> Result<f64, ExactError> {
    let fixed = boundary_window_log_weight(params, boundary, disorder);
    if fixed == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(fixed + exact_interior_log_z(params, boundary, disorder)?)
}

/// log of the interior expectation E[exp(sum over interior window sites)],
/// i.e. log Z without the deterministic boundary-window term.
pub fn exact_interior_log_z(
    params: &ModelParams,
    boundary: &FieldConfig,
    disorder: &DisorderField,
) -> Result<f64, ExactError> {
    let lat = &params.lattice;
    let k = lat.num_interior();
    if k > 3 {
        return Err(ExactError::TooManyInteriorSites(k));
    }
    let solve = GaussianSolve::new(lat.clone());
    let mean_field = harmonic_extension(&solve, boundary)?;
    let ys: Vec<f64> = (0..k)
        .map(|i| params.site_energy(disorder, &lat.interior_coords(i)))
        .collect();

    if k == 1 {
        let m = mean_field.value(&lat.interior_coords(0));
        let sd = (1.0 / (2.0 * lat.dim() as f64)).sqrt();
        let z = SiteConditional::new(m, sd, ys[0], params.wall).total_mass();
        return Ok(z.ln());
    }

    // Dense precision matrix (k <= 3) and mean vector.
    let d = lat.dim() as f64;
    let mut a = [[0.0f64; 3]; 3];
    for i in 0..k {
        a[i][i] = 2.0 * d;
        for &nb in lat.neighbors_of_interior(i) {
            let c = lat.lambda_coords(nb as usize);
            if let Some(j) = lat.interior_id(&c) {
                a[i][j] = -1.0;
            }
        }
    }
    let mu: Vec<f64> = (0..k)
        .map(|i| mean_field.value(&lat.interior_coords(i)))
        .collect();

    let det = match k {
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        3 => {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        }
        _ => unreachable!(),
    };
    let norm = det.sqrt() / (2.0 * std::f64::consts::PI).powf(k as f64 / 2.0);

    // Per-axis Gauss-Legendre panels split at the band edges; +-12 marginal
    // standard deviations is far beyond any mass we can resolve in f64.
    let sigma_max = (0..k)
        .map(|i| {
            let c = lat.interior_coords(i);
            solve.marginal_variance(&c).unwrap().sqrt()
        })
        .fold(0.0f64, f64::max);
    let spread = 12.0 * sigma_max + 1.0;
    let hard = params.wall.is_hard();
    let (nodes, weights) = quad::gauss_legendre(48);
    let mut axis_nodes: Vec<Vec<(f64, f64)>> = Vec::with_capacity(k);
    for i in 0..k {
        let lo = (mu[i] - spread).min(-0.5);
        let hi = (mu[i] + spread).max(1.5);
        let mut breaks = vec![lo, 0.0, 1.0, hi];
        if hard {
            breaks.remove(0);
        }
        let mut pts = Vec::new();
        for w in breaks.windows(2) {
            let c = 0.5 * (w[0] + w[1]);
            let half = 0.5 * (w[1] - w[0]);
            for (&x, &wt) in nodes.iter().zip(&weights) {
                pts.push((c + half * x, wt * half));
            }
        }
        axis_nodes.push(pts);
    }

    let kwall = match params.wall {
        Wall::Hard => 0.0,
        Wall::Soft(kw) => kw,
    };
    let local = |i: usize, phi: f64| -> f64 {
        let mut e = 0.0;
        if (0.0..=1.0).contains(&phi) {
            e += ys[i];
        }
        if phi < 0.0 {
            e -= kwall;
        }
        e
    };

    let mut total = 0.0f64;
    let mut phi = [0.0f64; 3];
    let mut idx = [0usize; 3];
    let counts: Vec<usize> = axis_nodes.iter().map(|v| v.len()).collect();
    'outer: loop {
        let mut wt = 1.0;
        for i in 0..k {
            let (x, w) = axis_nodes[i][idx[i]];
            phi[i] = x;
            wt *= w;
        }
        // quadratic form (phi - mu)' A (phi - mu)
        let mut q = 0.0;
        for i in 0..k {
            for j in 0..k {
                q += (phi[i] - mu[i]) * a[i][j] * (phi[j] - mu[j]);
            }
        }
        let mut e = -0.5 * q;
        for i in 0..k {
            e += local(i, phi[i]);
        }
        total += wt * e.exp();
        for i in (0..k).rev() {
            idx[i] += 1;
            if idx[i] < counts[i] {
                continue 'outer;
            }
            idx[i] = 0;
            if i == 0 {
                break 'outer;
            }
        }
    }
    Ok((total * norm).ln())
}

/// Quenched average E_omega[log Z] for a single-interior-site lattice, by 1D
/// quadrature over the disorder law. The additive boundary-window term
/// averages to (h - lambda) per fixed band site precisely because the
/// rewards are centered.
pub fn exact_disorder_avg_log_z(
    params: &ModelParams,
    boundary: &FieldConfig,
) -> Result<f64, ExactError> {
    let lat = &params.lattice;
    if lat.num_interior() != 1 {
        return Err(ExactError::TooManyInteriorSites(lat.num_interior()));
    }
    let solve = GaussianSolve::new(lat.clone());
    let mean_field = harmonic_extension(&solve, boundary)?;
    let m = mean_field.value(&lat.interior_coords(0));
    let sd = (1.0 / (2.0 * lat.dim() as f64)).sqrt();
    let (beta, h, lambda) = (params.beta, params.h, params.lambda());
    let interior = params.law.expectation(&|w| {
        SiteConditional::new(m, sd, beta * w - lambda + h, params.wall)
            .total_mass()
            .ln()
    });

    let mut fixed = 0.0;
    for site in lat.window_sites() {
        if lat.is_interior(&site) {
            continue;
        }
        let phi = boundary.value(&site);
        if phi < 0.0 {
            match params.wall {
                Wall::Hard => return Ok(f64::NEG_INFINITY),
                Wall::Soft(kw) => fixed -= kw,
            }
        }
        if (0.0..=1.0).contains(&phi) {
            fixed += h - lambda;
        }
    }
    Ok(fixed + interior)
}

/// Interior part of the quenched average alone (no boundary-window term);
/// its h-derivative is the disorder-averaged interior contact sum.
pub fn exact_disorder_avg_interior(params: &ModelParams, boundary: &FieldConfig) -> f64 {
    let lat = &params.lattice;
    assert_eq!(lat.num_interior(), 1);
    let solve = GaussianSolve::new(lat.clone());
    let mean_field = harmonic_extension(&solve, boundary).expect("finite boundary");
    let m = mean_field.value(&lat.interior_coords(0));
    let sd = (1.0 / (2.0 * lat.dim() as f64)).sqrt();
    let (beta, h, lambda) = (params.beta, params.h, params.lambda());
    params.law.expectation(&|w| {
        SiteConditional::new(m, sd, beta * w - lambda + h, params.wall)
            .total_mass()
            .ln()
    })
}

/// log of the annealed partition function log E_omega[Z]: equals the
/// homogeneous log Z at the same (h, K) because the tilted weights have
/// mean one.
pub fn exact_annealed_log_z(
    params: &ModelParams,
    boundary: &FieldConfig,
) -> Result<f64, ExactError> {
    let homogeneous = ModelParams::with_lattice(
        params.lattice.clone(),
        0.0,
        params.h,
        params.wall,
        params.boundary,
        params.law,
        params.disorder_seed,
    )
    .expect("beta = 0 is always admissible");
    let disorder = homogeneous.disorder();
    exact_log_z_small(&homogeneous, boundary, &disorder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::DisorderLaw;
    use crate::field::sample_free_field;
    use crate::lattice::OriginMode;
    use crate::model::Boundary;
    use crate::normal;

    fn params(
        d: usize,
        n: i64,
        beta: f64,
        h: f64,
        wall: Wall,
    ) -> ModelParams {
        ModelParams::new(
            d,
            n,
            OriginMode::Corner,
            beta,
            h,
            wall,
            Boundary::Constant(0.0),
            DisorderLaw::StandardGaussian,
            11,
        )
        .unwrap()
    }

    #[test]
    fn free_weight_gives_zero() {
        let p = params(3, 2, 0.0, 0.0, Wall::Soft(0.0));
        let bc = FieldConfig::constant(p.lattice.clone(), 0.0);
        let z = exact_log_z_small(&p, &bc, &p.disorder()).unwrap();
        assert!(z.abs() < 1e-12);
    }

    #[test]
    fn hard_wall_single_site_closed_form() {
        // Zero boundary: the 7 fixed window sites sit at 0 inside the band;
        // the free site is N(0, 1/6).
        let h = 1.0;
        let p = params(3, 2, 0.0, h, Wall::Hard);
        let bc = FieldConfig::constant(p.lattice.clone(), 0.0);
        let z = exact_log_z_small(&p, &bc, &p.disorder()).unwrap();
        let s6 = 6.0f64.sqrt();
        let truth = 7.0 * h
            + (normal::sf(s6) + h.exp() * (normal::cdf(s6) - 0.5)).ln();
        assert!((z - truth).abs() < 1e-12, "{z} vs {truth}");
    }

    #[test]
    fn nonpositive_for_negative_h_without_disorder() {
        for h in [-0.2, -1.0, -3.0] {
            for wall in [Wall::Soft(0.0), Wall::Soft(2.0), Wall::Hard] {
                let p = params(3, 2, 0.0, h, wall);
                let bc = FieldConfig::constant(p.lattice.clone(), 0.0);
                let z = exact_log_z_small(&p, &bc, &p.disorder()).unwrap();
                assert!(z <= 1e-12, "h={h}: log Z = {z}");
            }
        }
    }

    #[test]
    fn refuses_large_interiors() {
        let p = params(3, 3, 0.0, 0.0, Wall::Hard);
        let bc = FieldConfig::constant(p.lattice.clone(), 0.0);
        assert!(matches!(
            exact_log_z_small(&p, &bc, &p.disorder()),
            Err(ExactError::TooManyInteriorSites(8))
        ));
    }

    #[test]
    fn tensor_quadrature_matches_free_field_monte_carlo() {
        // d=1 boxes give 2 and 3 interior sites; cross-validate the
        // quadrature against direct free-field sampling of E[exp(...)].
        for (n, beta, h, wall) in [
            (3i64, 0.0, 0.7, Wall::Soft(1.0)),
            (3, 0.5, -0.3, Wall::Hard),
            (4, 0.4, 0.5, Wall::Soft(0.5)),
        ] {
            let p = params(1, n, beta, h, wall);
            let bc = FieldConfig::constant(p.lattice.clone(), 0.3);
            let disorder = p.disorder();
            let quad_val = exact_interior_log_z(&p, &bc, &disorder).unwrap();

            let solve = GaussianSolve::new(p.lattice.clone());
            let mut rng = crate::rngutil::stream(31, &[n as u64]);
            let m = 400_000;
            let mut acc = 0.0;
            let mut accsq = 0.0;
            for _ in 0..m {
                let f = sample_free_field(&solve, &bc, &mut rng).unwrap();
                let mut e = 0.0;
                for i in 0..p.lattice.num_interior() {
                    let phi = f.value(&p.lattice.interior_coords(i));
                    if (0.0..=1.0).contains(&phi) {
                        e += p.site_energy(&disorder, &p.lattice.interior_coords(i));
                    }
                    if phi < 0.0 {
                        e += match wall {
                            Wall::Hard => f64::NEG_INFINITY,
                            Wall::Soft(kw) => -kw,
                        };
                    }
                }
                let v = e.exp();
                acc += v;
                accsq += v * v;
            }
            let mean = acc / m as f64;
            let se = ((accsq / m as f64 - mean * mean) / m as f64).sqrt();
            let mc = mean.ln();
            let se_log = se / mean;
            assert!(
                (quad_val - mc).abs() < 4.0 * se_log,
                "n={n}: quad {quad_val} vs mc {mc} +- {se_log}"
            );
        }
    }

    #[test]
    fn annealed_dominates_quenched() {
        // Jensen: E log Z <= log E Z, strictly for beta > 0.
        for (beta, h, wall) in [
            (0.3, 0.4, Wall::Soft(1.0)),
            (0.5, -0.2, Wall::Hard),
            (0.8, 0.0, Wall::Soft(0.2)),
        ] {
            let p = params(3, 2, beta, h, wall);
            let bc = FieldConfig::constant(p.lattice.clone(), 0.0);
            let quenched = exact_disorder_avg_log_z(&p, &bc).unwrap();
            let annealed = exact_annealed_log_z(&p, &bc).unwrap();
            assert!(
                quenched < annealed,
                "beta={beta} h={h}: {quenched} !< {annealed}"
            );
        }
    }

    #[test]
    fn quenched_average_matches_direct_monte_carlo() {
        let p = params(3, 2, 0.5, 0.3, Wall::Soft(1.0));
        let bc = FieldConfig::constant(p.lattice.clone(), 0.0);
        let quad_val = exact_disorder_avg_log_z(&p, &bc).unwrap();
        let mut acc = 0.0;
        let mut accsq = 0.0;
        let m = 20_000u64;
        for r in 0..m {
            let mut pr = p.clone();
            pr.disorder_seed = crate::rngutil::mix(123, &[r]);
            let v = exact_log_z_small(&pr, &bc, &pr.disorder()).unwrap();
            acc += v;
            accsq += v * v;
        }
        let mean = acc / m as f64;
        let se = ((accsq / m as f64 - mean * mean) / m as f64).sqrt();
        assert!(
            (quad_val - mean).abs() < 4.0 * se,
            "quad {quad_val} vs mc {mean} +- {se}"
        );
    }
}
