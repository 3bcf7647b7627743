//! The super-additive lower bound: with boundary data drawn from the free
//! field at height u, the normalized quenched log partition function at ANY
//! finite box size bounds the free energy from below. The outer Monte Carlo
//! averages over boundaries and environments; log Z for one instance comes
//! either from the exact small-lattice oracle or from coupling-constant
//! thermodynamic integration (scale t on the whole energy, t from 0 to 1).

use crate::field::FieldConfig;
use crate::model::{boundary_window_log_weight, ModelParams, Wall};
use crate::quad;
use crate::rngutil;
use crate::sampler::{sample_boundary_at_height, GibbsChain, McmcSpec};
use crate::stats::RunningStats;

use super::contact::EstimatorError;
use super::exact::exact_log_z_small;
use super::record::EstimateRecord;

/// How log Z of a single (boundary, environment) instance is computed.
#[derive(Debug, Clone, Copy)]
pub enum InnerEstimator {
    /// Exact oracle; requires at most 3 interior sites.
    Exact,
    /// Gauss-Legendre coupling-constant integration with the given number
    /// of t-knots, each estimated by MCMC with the given schedule.
    CouplingTi { t_knots: usize, mcmc: McmcSpec },
}

/// log Z of one instance by coupling-constant integration:
/// log Z = (fixed window term) + int_0^1 <sum_x y_x delta_x - K rho_x>_t dt.
fn log_z_by_coupling_ti(
    params: &ModelParams,
    boundary: &FieldConfig,
    t_knots: usize,
    mcmc: &McmcSpec,
    seed: u64,
) -> Result<f64, EstimatorError> {
    assert!(
        !params.wall.is_hard(),
        "coupling-constant integration needs a finite wall"
    );
    let k_wall = match params.wall {
        Wall::Soft(k) => k,
        Wall::Hard => unreachable!(),
    };
    let disorder = params.disorder();
    let fixed = boundary_window_log_weight(params, boundary, &disorder);
    let (nodes, weights) = quad::gauss_legendre(t_knots);
    let mut integral = 0.0;
    for (j, (&x, &w)) in nodes.iter().zip(&weights).enumerate() {
        let t = 0.5 * (x + 1.0);
        let mut chain = GibbsChain::with_boundary(
            params.clone(),
            boundary.clone(),
            rngutil::mix(seed, &[0x71, j as u64]),
        )?;
        chain.set_coupling_scale(t);
        chain.run_sweeps(mcmc.burn_in);
        let mut acc = RunningStats::default();
        for _ in 0..mcmc.samples {
            chain.run_sweeps(mcmc.thinning);
            let (ysum, wall_hits) = chain.interior_energy_terms();
            acc.push(ysum - k_wall * wall_hits as f64);
        }
        integral += 0.5 * w * acc.mean();
    }
    Ok(fixed + integral)
}

/// The bound (1/|window|) E[log Z] with boundaries sampled at height u.
/// Always a lower bound on the free energy, for every u and box size.
pub fn superadditive_lower_bound(
    params: &ModelParams,
    u: f64,
    replicas: usize,
    inner: InnerEstimator,
    seed: u64,
) -> Result<EstimateRecord, EstimatorError> {
    assert!(
        !params.wall.is_hard(),
        "the super-additive bound is run at finite wall strength"
    );
    let lat = params.lattice.clone();
    let norm = lat.num_window() as f64;
    let mut acc = RunningStats::default();
    for r in 0..replicas {
        let mut p = params.clone();
        p.disorder_seed = rngutil::mix(params.disorder_seed, &[0xb0, r as u64]);
        let mut rng = rngutil::stream(seed, &[0xea, r as u64]);
        let boundary = sample_boundary_at_height(&lat, u, &mut rng)?;
        let log_z = match inner {
            InnerEstimator::Exact => exact_log_z_small(&p, &boundary, &p.disorder())?,
            InnerEstimator::CouplingTi { t_knots, mcmc } => log_z_by_coupling_ti(
                &p,
                &boundary,
                t_knots,
                &mcmc,
                rngutil::mix(seed, &[0x11, r as u64]),
            )?,
        };
        acc.push(log_z / norm);
    }
    Ok(EstimateRecord::new(
        acc.mean(),
        acc.std_error(),
        acc.count(),
        replicas as u64,
        "superadditive_lower_bound",
        seed,
    ))
}
