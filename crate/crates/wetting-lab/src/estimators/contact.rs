//! Contact density and free energy by thermodynamic integration.
//!
//! The h-derivative of the normalized quenched log partition function is the
//! mean contact fraction, so integrating MCMC contact densities from an
//! anchor deep in the delocalized regime reconstructs the free-energy curve
//! without direct importance sampling of log Z. Standard errors combine
//! within-chain and between-replica variability through the replica spread.

use thiserror::Error;

use crate::model::ModelParams;
use crate::rngutil;
use crate::sampler::{GibbsChain, McmcSpec, SamplerError};
use crate::stats::RunningStats;

use super::record::{EstimateRecord, FreeEnergyCurve};

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Exact(#[from] super::exact::ExactError),
    #[error(transparent)]
    Field(#[from] crate::field::FieldError),
    #[error(transparent)]
    Disorder(#[from] crate::disorder::DisorderError),
    #[error("anchor {anchor} must not exceed the smallest grid point {min}")]
    BadAnchor { anchor: f64, min: f64 },
    #[error("h grid must be nonempty and sorted")]
    BadGrid,
}

/// Which sites enter the contact average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactWindow {
    /// All interior window sites: the exact h-derivative of the interior
    /// energy at this box size.
    Interior,
    /// Sites within the given sup-distance of the center: a bulk observable
    /// that sheds the boundary layer and approximates the infinite-volume
    /// contact density.
    Bulk { margin: i64 },
}

fn chain_contact(chain: &GibbsChain, window: ContactWindow) -> f64 {
    match window {
        ContactWindow::Interior => {
            chain.contact_count() as f64 / chain.params().lattice.num_interior() as f64
        }
        ContactWindow::Bulk { margin } => {
            let (hits, count) = chain.bulk_contact(margin);
            hits as f64 / count as f64
        }
    }
}

/// Disorder- and Gibbs-averaged contact fraction. For beta = 0 with a
/// constant boundary a single replica is run and the error comes from the
/// thinned within-chain spread; otherwise replicas vary the environment
/// (and any sampled boundary) and the error is the between-replica spread.
pub fn contact_density(
    params: &ModelParams,
    spec: &McmcSpec,
    window: ContactWindow,
    seed: u64,
) -> Result<EstimateRecord, EstimatorError> {
    let needs_replicas = params.beta != 0.0
        || matches!(params.boundary, crate::model::Boundary::FreeFieldAtHeight(_));
    let replicas = if needs_replicas { spec.replicas.max(2) } else { 1 };

    let mut replica_means = RunningStats::default();
    let mut within = RunningStats::default();
    for r in 0..replicas {
        let p = replica_params(params, r as u64);
        let mut chain = GibbsChain::new(p, rngutil::mix(seed, &[0xc0a7ac7, r as u64]))?;
        chain.run_sweeps(spec.burn_in);
        let mut acc = RunningStats::default();
        for _ in 0..spec.samples {
            chain.run_sweeps(spec.thinning);
            acc.push(chain_contact(&chain, window));
        }
        replica_means.push(acc.mean());
        if replicas == 1 {
            within = acc;
        }
    }
    let (value, se, n) = if replicas == 1 {
        (within.mean(), within.std_error(), within.count())
    } else {
        (
            replica_means.mean(),
            replica_means.std_error(),
            (replicas * spec.samples) as u64,
        )
    };
    Ok(EstimateRecord::new(
        value,
        se,
        n,
        replicas as u64,
        "contact_density",
        seed,
    ))
}

/// Same environment family across h values: replica r reseeds the disorder
/// (and thereby any sampled boundary) deterministically.
fn replica_params(params: &ModelParams, replica: u64) -> ModelParams {
    let mut p = params.clone();
    p.disorder_seed = rngutil::mix(params.disorder_seed, &[0xd150, replica]);
    p
}

/// Free energy curve by trapezoid integration of contact densities from
/// `anchor` up through the requested grid.
///
/// Integration knots are the anchor, every multiple of `knot_step` between
/// anchor and the largest grid value, and the grid values themselves.
#[allow(clippy::too_many_arguments)]
pub fn free_energy_ti(
    params: &ModelParams,
    h_grid: &[f64],
    anchor: f64,
    knot_step: f64,
    spec: &McmcSpec,
    window: ContactWindow,
    seed: u64,
) -> Result<FreeEnergyCurve, EstimatorError> {
    if h_grid.is_empty() || h_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EstimatorError::BadGrid);
    }
    let h_min = h_grid[0];
    let h_max = *h_grid.last().unwrap();
    if anchor > h_min {
        return Err(EstimatorError::BadAnchor {
            anchor,
            min: h_min,
        });
    }

    // Knot set: anchor + k*step, fused with the requested grid.
    let mut knots: Vec<f64> = Vec::new();
    let mut x = anchor;
    while x < h_max - 1e-12 {
        knots.push(x);
        x += knot_step;
    }
    knots.push(h_max);
    knots.extend_from_slice(h_grid);
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);

    let contacts: Vec<EstimateRecord> = knots
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            contact_density(
                &params.with_h(h),
                spec,
                window,
                rngutil::mix(seed, &[0x71, i as u64]),
            )
        })
        .collect::<Result<_, _>>()?;

    let mut warnings = Vec::new();
    for (w, hpair) in contacts.windows(2).zip(knots.windows(2)) {
        let se = (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
        if w[1].value < w[0].value - 3.0 * se.max(1e-12) {
            warnings.push(format!(
                "contact density decreased beyond 3 SE between h = {} and {}: {} -> {}",
                hpair[0], hpair[1], w[0].value, w[1].value
            ));
        }
    }

    // Cumulative trapezoid; errors propagate in quadrature with each knot
    // weighted by the sum of its adjacent half-interval widths.
    let mut cum = vec![0.0f64; knots.len()];
    for i in 1..knots.len() {
        let dh = knots[i] - knots[i - 1];
        cum[i] = cum[i - 1] + 0.5 * dh * (contacts[i].value + contacts[i - 1].value);
    }
    let f_at = |j: usize| -> (f64, f64) {
        let mut var = 0.0;
        for i in 0..=j {
            let mut w = 0.0;
            if i > 0 {
                w += 0.5 * (knots[i] - knots[i - 1]);
            }
            if i < j {
                w += 0.5 * (knots[i + 1] - knots[i]);
            }
            var += (w * contacts[i].std_error).powi(2);
        }
        (cum[j], var.sqrt())
    };

    let mut f = Vec::with_capacity(h_grid.len());
    let mut grid_contacts = Vec::with_capacity(h_grid.len());
    for &h in h_grid {
        let j = knots
            .iter()
            .position(|&kx| (kx - h).abs() < 1e-9)
            .expect("grid points are knots");
        let (value, se) = f_at(j);
        f.push(EstimateRecord::new(
            value,
            se,
            contacts[j].n_samples,
            contacts[j].n_replicas,
            "free_energy_ti",
            seed,
        ));
        grid_contacts.push(contacts[j].clone());
    }

    Ok(FreeEnergyCurve {
        h_grid: h_grid.to_vec(),
        f,
        contact: grid_contacts,
        anchor,
        beta: params.beta,
        wall_strength: params.wall.strength(),
        d: params.dim(),
        n: params.lattice.side_parameter(),
        warnings,
    })
}
