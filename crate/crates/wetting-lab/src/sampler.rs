//! Exact single-site heat-bath dynamics for the interacting measure, and
//! monotone grand couplings driven by shared uniforms.
//!
//! The conditional law of one interior height given its neighbors is a
//! Gaussian N(m, 1/(2d)) reweighted by the local pinning/wall factor, which
//! makes it a three-component truncated-Gaussian mixture on (-inf, 0),
//! [0, 1], (1, inf). We sample it by exact inverse-CDF of the mixture, one
//! uniform per update; since the family is stochastically increasing in m
//! (likelihood ratios in m are monotone in the height), feeding two ordered
//! chains the same uniforms preserves pointwise order.

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{harmonic_extension, FieldConfig, GaussianSolve};
use crate::lattice::{BoxLattice, OriginMode};
use crate::model::{Boundary, ModelParams, Wall};
use crate::normal;
use crate::rngutil;
use crate::stats::EmpiricalCdf;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error(transparent)]
    Field(#[from] crate::field::FieldError),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
    #[error(
        "monotone coupling order violated at site {site:?} after sweep {sweep}: upper {upper} < lower {lower}"
    )]
    OrderViolation {
        site: Vec<i64>,
        sweep: u64,
        upper: f64,
        lower: f64,
    },
    #[error("sub-box coupling needs a centered inner box strictly inside the outer interior")]
    BadSubBox,
}

/// MCMC schedule. Defaults come from pilot autocorrelation runs at
/// d=3, N=8, h=0.5: burn-in 200 sweeps, keep every 5th.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct McmcSpec {
    pub burn_in: usize,
    pub thinning: usize,
    pub samples: usize,
    pub replicas: usize,
}

impl Default for McmcSpec {
    fn default() -> Self {
        McmcSpec {
            burn_in: 200,
            thinning: 5,
            samples: 1000,
            replicas: 64,
        }
    }
}

/// Exact sampler for one interior height given the sum of its neighbors.
#[derive(Debug, Clone, Copy)]
pub struct SiteConditional {
    mean: f64,
    sd: f64,
    /// Unnormalized component masses on (-inf,0), [0,1], (1,inf).
    w_neg: f64,
    w_band: f64,
    w_up: f64,
    /// Standardized band edges (0 - m)/s and (1 - m)/s.
    a: f64,
    b: f64,
}

impl SiteConditional {
    /// `y` is the local pinning energy beta*omega - lambda + h; `wall` the
    /// wall flag; the free conditional is N(mean, sd^2).
    pub fn new(mean: f64, sd: f64, y: f64, wall: Wall) -> Self {
        let a = (0.0 - mean) / sd;
        let b = (1.0 - mean) / sd;
        let p_neg = normal::cdf(a);
        let p_band = normal::interval_mass(a, b);
        let p_up = normal::sf(b);
        let w_neg = match wall {
            Wall::Hard => 0.0,
            Wall::Soft(k) => (-k).exp() * p_neg,
        };
        SiteConditional {
            mean,
            sd,
            w_neg,
            w_band: y.exp() * p_band,
            w_up: p_up,
            a,
            b,
        }
    }

    /// Conditional for a site of the interacting measure: the free part is
    /// N(neighbor_sum / 2d, 1/(2d)).
    pub fn from_params(params: &ModelParams, neighbor_sum: f64, omega: f64) -> Self {
        let two_d = 2.0 * params.dim() as f64;
        let y = params.beta * omega - params.lambda() + params.h;
        SiteConditional::new(neighbor_sum / two_d, (1.0 / two_d).sqrt(), y, params.wall)
    }

    pub fn total_mass(&self) -> f64 {
        self.w_neg + self.w_band + self.w_up
    }

    /// Normalized component probabilities (below, band, above).
    pub fn component_probabilities(&self) -> (f64, f64, f64) {
        let t = self.total_mass();
        (self.w_neg / t, self.w_band / t, self.w_up / t)
    }

    /// CDF of the reweighted conditional.
    pub fn cdf(&self, t: f64) -> f64 {
        let z = (t - self.mean) / self.sd;
        let mass = if z < self.a {
            if self.w_neg > 0.0 {
                self.w_neg * normal::cdf(z) / normal::cdf(self.a)
            } else {
                0.0
            }
        } else if z <= self.b {
            let denom = normal::interval_mass(self.a, self.b);
            let frac = if denom > 0.0 {
                normal::interval_mass(self.a, z) / denom
            } else {
                0.0
            };
            self.w_neg + self.w_band * frac
        } else {
            let denom = normal::sf(self.b);
            let frac = if denom > 0.0 {
                1.0 - normal::sf(z) / denom
            } else {
                1.0
            };
            self.w_neg + self.w_band + self.w_up * frac
        };
        mass / self.total_mass()
    }

    /// Exact inverse CDF; monotone in the uniform and in `mean`.
    ///
    /// Componentwise quantile inversion lands at the analytic answer; a
    /// bisection polish on the mixture CDF then enforces |cdf(x) - u| below
    /// 1e-12 whenever the initial inversion drifted.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let total = self.total_mass();
        if total <= 0.0 || !total.is_finite() {
            // All three interval masses underflowed: place the height
            // deterministically on the nearest admissible point.
            log::warn!(
                "degenerate site conditional (mean {}, sd {}); deterministic placement",
                self.mean,
                self.sd
            );
            return if self.w_neg == 0.0 && self.mean < 0.0 {
                0.0
            } else {
                self.mean
            };
        }
        let target = u * total;
        let (zlo, zhi, q) = if target <= self.w_neg && self.w_neg > 0.0 {
            (f64::NEG_INFINITY, self.a, target / self.w_neg)
        } else if target <= self.w_neg + self.w_band && self.w_band > 0.0 {
            (self.a, self.b, (target - self.w_neg) / self.w_band)
        } else {
            (
                self.b,
                f64::INFINITY,
                (target - self.w_neg - self.w_band) / self.w_up,
            )
        };
        let z = normal::truncated_inv_cdf(zlo, zhi, q.clamp(0.0, 1.0));
        let mut x = self.mean + self.sd * z;

        if (self.cdf(x) - u).abs() > 1e-12 {
            let mut lo = self.mean + self.sd * if zlo.is_finite() { zlo } else { -42.0 };
            let mut hi = self.mean + self.sd * if zhi.is_finite() { zhi } else { 42.0 };
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if self.cdf(mid) < u {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-13 * self.sd.max(1.0) {
                    break;
                }
            }
            x = 0.5 * (lo + hi);
        }
        x
    }
}

/// A single-site heat-bath chain targeting the interacting measure.
#[derive(Debug, Clone)]
pub struct GibbsChain {
    params: ModelParams,
    field: FieldConfig,
    /// Pinning energy y_x per interior site.
    site_energy: Vec<f64>,
    rng: ChaCha8Rng,
    sweeps: u64,
    sd: f64,
    inv_two_d: f64,
    /// Scale multiplying (y, K) jointly; 1 for the physical measure, swept
    /// over [0, 1] by coupling-constant thermodynamic integration.
    coupling_scale: f64,
}

impl GibbsChain {
    pub fn new(params: ModelParams, chain_seed: u64) -> Result<Self, SamplerError> {
        let lattice = params.lattice.clone();
        let mut rng = rngutil::stream(chain_seed, &[0x6368_6169_6e00]);
        let boundary_field = match params.boundary {
            Boundary::Constant(u) => FieldConfig::constant(lattice.clone(), u),
            Boundary::FreeFieldAtHeight(u) => sample_boundary_at_height(&lattice, u, &mut rng)?,
        };
        Self::with_boundary(params, boundary_field, chain_seed)
    }

    /// Chain with explicitly supplied boundary data (the `boundary` member
    /// of `params` is ignored).
    pub fn with_boundary(
        params: ModelParams,
        boundary_field: FieldConfig,
        chain_seed: u64,
    ) -> Result<Self, SamplerError> {
        let lattice = params.lattice.clone();
        let solve = GaussianSolve::new(lattice.clone());
        let rng = rngutil::stream(chain_seed, &[0x6368_6169_6e01]);
        let mut field = harmonic_extension(&solve, &boundary_field)?;
        if params.wall.is_hard() {
            // Clamp the initial interior state into the admissible set.
            for i in 0..lattice.num_interior() {
                let id = lattice.interior_to_lambda(i);
                let v = field.values()[id];
                field.values_mut()[id] = v.max(0.25);
            }
        }
        let disorder = params.disorder();
        let site_energy: Vec<f64> = (0..lattice.num_interior())
            .map(|i| params.site_energy(&disorder, &lattice.interior_coords(i)))
            .collect();
        let two_d = 2.0 * lattice.dim() as f64;
        Ok(GibbsChain {
            params,
            field,
            site_energy,
            rng,
            sweeps: 0,
            sd: (1.0 / two_d).sqrt(),
            inv_two_d: 1.0 / two_d,
            coupling_scale: 1.0,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn field(&self) -> &FieldConfig {
        &self.field
    }

    pub fn sweeps(&self) -> u64 {
        self.sweeps
    }

    /// Set the joint (y, K) scale for coupling-constant integration.
    /// Requires a soft wall: the hard constraint cannot be scaled.
    pub fn set_coupling_scale(&mut self, t: f64) {
        assert!(
            !self.params.wall.is_hard() || t == 1.0,
            "coupling scale only applies to soft walls"
        );
        self.coupling_scale = t;
    }

    #[inline]
    fn neighbor_sum(&self, interior_id: usize) -> f64 {
        let values = self.field.values();
        self.params
            .lattice
            .neighbors_of_interior(interior_id)
            .iter()
            .map(|&j| values[j as usize])
            .sum()
    }

    fn conditional(&self, interior_id: usize) -> SiteConditional {
        let m = self.neighbor_sum(interior_id) * self.inv_two_d;
        let wall = match self.params.wall {
            Wall::Hard => Wall::Hard,
            Wall::Soft(k) => Wall::Soft(k * self.coupling_scale),
        };
        SiteConditional::new(
            m,
            self.sd,
            self.site_energy[interior_id] * self.coupling_scale,
            wall,
        )
    }

    fn update_site(&mut self, interior_id: usize, u: f64) -> f64 {
        let cond = self.conditional(interior_id);
        let x = cond.inverse_cdf(u);
        let lam = self.params.lattice.interior_to_lambda(interior_id);
        self.field.values_mut()[lam] = x;
        x
    }

    /// One heat-bath pass over all interior sites in fixed scan order.
    pub fn sweep(&mut self) {
        for i in 0..self.params.lattice.num_interior() {
            let u = rngutil::uniform_open01(&mut self.rng);
            self.update_site(i, u);
        }
        self.sweeps += 1;
    }

    pub fn run_sweeps(&mut self, n: usize) {
        for _ in 0..n {
            self.sweep();
        }
    }

    /// Number of interior sites currently in the pinning band.
    pub fn contact_count(&self) -> usize {
        let lat = &self.params.lattice;
        (0..lat.num_interior())
            .filter(|&i| {
                let v = self.field.values()[lat.interior_to_lambda(i)];
                (0.0..=1.0).contains(&v)
            })
            .count()
    }

    /// Contact count restricted to sites within `margin` of the box center
    /// along every axis (bulk observable, free of boundary-layer effects).
    pub fn bulk_contact(&self, margin: i64) -> (usize, usize) {
        let lat = &self.params.lattice;
        let center = lat.center();
        let mut hits = 0usize;
        let mut count = 0usize;
        for i in 0..lat.num_interior() {
            let coords = lat.interior_coords(i);
            if coords
                .iter()
                .zip(&center)
                .any(|(c, ct)| (c - ct).abs() > margin)
            {
                continue;
            }
            count += 1;
            let v = self.field.values()[lat.interior_to_lambda(i)];
            if (0.0..=1.0).contains(&v) {
                hits += 1;
            }
        }
        (hits, count)
    }

    /// Interior sums (sum of y_x delta_x, count of rho_x) entering the
    /// coupling-constant derivative.
    pub fn interior_energy_terms(&self) -> (f64, usize) {
        let lat = &self.params.lattice;
        let mut ysum = 0.0;
        let mut wall_hits = 0usize;
        for i in 0..lat.num_interior() {
            let v = self.field.values()[lat.interior_to_lambda(i)];
            if (0.0..=1.0).contains(&v) {
                ysum += self.site_energy[i];
            }
            if v < 0.0 {
                wall_hits += 1;
            }
        }
        (ysum, wall_hits)
    }

    pub fn value_at(&self, coords: &[i64]) -> f64 {
        self.field.value(coords)
    }
}

/// Boundary data sampled from the free field "at height u": an exact sample
/// on a box enlarged by N on every side with constant-u boundary, restricted
/// to the sites of the requested box. For d >= 3 this is a good stand-in for
/// the infinite-volume field with mean u.
pub fn sample_boundary_at_height(
    lattice: &Arc<BoxLattice>,
    u: f64,
    rng: &mut ChaCha8Rng,
) -> Result<FieldConfig, SamplerError> {
    let d = lattice.dim();
    let n = lattice.side_parameter();
    let (outer, shift) = match lattice.origin_mode() {
        // Corner box {0..N}: embed into {0..3N} shifted by +N.
        OriginMode::Corner => (BoxLattice::new(d, 3 * n, OriginMode::Corner)?, n),
        OriginMode::Centered => (BoxLattice::new(d, 2 * n, OriginMode::Centered)?, 0),
    };
    let outer = Arc::new(outer);
    let solve = GaussianSolve::new(outer.clone());
    let bc = FieldConfig::constant(outer.clone(), u);
    let sample = crate::field::sample_free_field(&solve, &bc, rng)?;
    let mut values = Vec::with_capacity(lattice.num_sites());
    for site in lattice.sites() {
        let outer_site: Vec<i64> = site.iter().map(|&c| c + shift).collect();
        values.push(sample.value(&outer_site));
    }
    Ok(FieldConfig::from_values(lattice.clone(), values))
}

/// Which chain is expected to dominate on the common sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OrderSide {
    /// The chain with the higher boundary dominates (same box).
    BigAbove,
    /// The chain on the inner box dominates (its boundary is lifted).
    SmallAbove,
}

/// Two chains driven by one uniform stream so that pointwise order is
/// an invariant, not a statistical statement.
pub struct CoupledPair {
    big: GibbsChain,
    small: GibbsChain,
    order: OrderSide,
    /// For each big-interior site, the matching small-interior id if any.
    common: Vec<i64>,
    /// (big interior id, small lambda id) pairs mirroring the inner-box
    /// boundary out of the outer field (sub-box mode only; sorted by the
    /// first component).
    mirror: Vec<(usize, usize)>,
    floor: f64,
    rng: ChaCha8Rng,
}

impl CoupledPair {
    /// Couple two chains on the same lattice whose initial fields and
    /// boundaries are ordered upper >= lower.
    pub fn ordered(upper: GibbsChain, lower: GibbsChain, seed: u64) -> Result<Self, SamplerError> {
        assert_eq!(
            upper.params.lattice.num_sites(),
            lower.params.lattice.num_sites(),
            "same-lattice coupling requires matching boxes"
        );
        let lat = upper.params.lattice.clone();
        for id in 0..lat.num_sites() {
            let (a, b) = (upper.field.values()[id], lower.field.values()[id]);
            if a < b - 1e-12 {
                return Err(SamplerError::OrderViolation {
                    site: lat.lambda_coords(id),
                    sweep: 0,
                    upper: a,
                    lower: b,
                });
            }
        }
        let common = (0..lat.num_interior() as i64).collect();
        Ok(CoupledPair {
            big: upper,
            small: lower,
            order: OrderSide::BigAbove,
            common,
            mirror: Vec::new(),
            floor: 0.0,
            rng: rngutil::stream(seed, &[0x636f_7570_6c65]),
        })
    }

    /// Couple a chain on a centered box with a chain on a strictly smaller
    /// centered box whose boundary is continuously refreshed to
    /// max(outer field, floor). The inner chain then dominates the outer
    /// one on the inner interior.
    pub fn sub_box(
        big: GibbsChain,
        inner_n: i64,
        floor: f64,
        seed: u64,
    ) -> Result<Self, SamplerError> {
        let lat = big.params.lattice.clone();
        if lat.origin_mode() != OriginMode::Centered
            || inner_n >= lat.side_parameter()
            || inner_n < 2
        {
            return Err(SamplerError::BadSubBox);
        }
        let inner_params = ModelParams::with_lattice(
            Arc::new(BoxLattice::new(lat.dim(), inner_n, OriginMode::Centered)?),
            big.params.beta,
            big.params.h,
            big.params.wall,
            Boundary::Constant(floor),
            big.params.law,
            big.params.disorder_seed,
        )?;
        let mut small = GibbsChain::new(inner_params, seed ^ 0x5b5b)?;
        let small_lat = small.params.lattice.clone();

        // Initialize the inner chain as outer-field-or-floor everywhere.
        for id in 0..small_lat.num_sites() {
            let coords = small_lat.lambda_coords(id);
            let v = big.field.value(&coords).max(floor);
            small.field.values_mut()[id] = v;
        }

        let common: Vec<i64> = (0..lat.num_interior())
            .map(|i| {
                let coords = lat.interior_coords(i);
                small_lat.interior_id(&coords).map_or(-1, |j| j as i64)
            })
            .collect();
        let mirror: Vec<(usize, usize)> = (0..lat.num_interior())
            .filter_map(|i| {
                let coords = lat.interior_coords(i);
                if small_lat.contains(&coords) && small_lat.is_boundary(&coords) {
                    Some((i, small_lat.lambda_id(&coords).unwrap()))
                } else {
                    None
                }
            })
            .collect();
        // The inner boundary must sit strictly inside the outer interior so
        // every mirrored site is actually updated by the outer sweep.
        if mirror.len() != small_lat.num_boundary() {
            return Err(SamplerError::BadSubBox);
        }
        Ok(CoupledPair {
            big,
            small,
            order: OrderSide::SmallAbove,
            common,
            mirror,
            floor,
            rng: rngutil::stream(seed, &[0x7375_6262_6f78]),
        })
    }

    pub fn upper_chain(&self) -> &GibbsChain {
        match self.order {
            OrderSide::BigAbove => &self.big,
            OrderSide::SmallAbove => &self.small,
        }
    }

    pub fn lower_chain(&self) -> &GibbsChain {
        match self.order {
            OrderSide::BigAbove => &self.small,
            OrderSide::SmallAbove => &self.big,
        }
    }

    /// One coupled heat-bath pass; returns an error naming the first site
    /// where the order invariant broke (a bug condition, not a recoverable
    /// state).
    pub fn coupled_sweep(&mut self) -> Result<(), SamplerError> {
        for &(big_int, small_lam) in &self.mirror {
            let v = self.big.field.values()[self.big.params.lattice.interior_to_lambda(big_int)];
            self.small.field.values_mut()[small_lam] = v.max(self.floor);
        }
        for i in 0..self.big.params.lattice.num_interior() {
            let u = rngutil::uniform_open01(&mut self.rng);
            self.big.update_site(i, u);
            if self.order == OrderSide::SmallAbove {
                // Keep the mirrored inner-boundary view current within the
                // pass; otherwise an outer update could overtake a stale
                // snapshot and break monotonicity.
                if let Ok(pos) = self.mirror.binary_search_by_key(&i, |&(b, _)| b) {
                    let small_lam = self.mirror[pos].1;
                    let v =
                        self.big.field.values()[self.big.params.lattice.interior_to_lambda(i)];
                    self.small.field.values_mut()[small_lam] = v.max(self.floor);
                }
            }
            let j = self.common[i];
            if j >= 0 {
                self.small.update_site(j as usize, u);
            }
        }
        self.big.sweeps += 1;
        self.small.sweeps += 1;
        self.check_order()
    }

    fn check_order(&self) -> Result<(), SamplerError> {
        let (upper, lower) = (self.upper_chain(), self.lower_chain());
        let small_lat = &self.small.params.lattice;
        for j in 0..small_lat.num_interior() {
            let coords = small_lat.interior_coords(j);
            let a = upper.field.value(&coords);
            let b = lower.field.value(&coords);
            if a < b - 1e-9 {
                return Err(SamplerError::OrderViolation {
                    site: coords,
                    sweep: self.big.sweeps,
                    upper: a,
                    lower: b,
                });
            }
        }
        Ok(())
    }
}

/// Empirical marginal CDFs of one site over a sequence of growing centered
/// boxes; the per-box chains are independent but share the environment.
pub fn marginal_probe(
    template: &ModelParams,
    site: &[i64],
    n_list: &[i64],
    spec: &McmcSpec,
    seed: u64,
) -> Result<Vec<(i64, EmpiricalCdf)>, SamplerError> {
    let mut out = Vec::new();
    for &n in n_list {
        let params = ModelParams::with_lattice(
            Arc::new(BoxLattice::new(template.dim(), n, OriginMode::Centered)?),
            template.beta,
            template.h,
            template.wall,
            template.boundary,
            template.law,
            template.disorder_seed,
        )?;
        assert!(
            params.lattice.is_interior(site),
            "probe site must be interior to every box in the list"
        );
        let mut chain = GibbsChain::new(params, rngutil::mix(seed, &[n as u64]))?;
        chain.run_sweeps(spec.burn_in);
        let mut samples = Vec::with_capacity(spec.samples);
        for _ in 0..spec.samples {
            chain.run_sweeps(spec.thinning);
            samples.push(chain.value_at(site));
        }
        out.push((n, EmpiricalCdf::new(samples)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::DisorderLaw;

    fn single_site_params(beta: f64, h: f64, wall: Wall) -> ModelParams {
        ModelParams::new(
            3,
            2,
            OriginMode::Corner,
            beta,
            h,
            wall,
            Boundary::Constant(0.0),
            DisorderLaw::StandardGaussian,
            17,
        )
        .unwrap()
    }

    #[test]
    fn free_case_is_plain_gaussian() {
        // beta = h = 0, K = 0: weights collapse to the Gaussian measure of
        // each interval.
        let s = (1.0f64 / 6.0).sqrt();
        let c = SiteConditional::new(0.4, s, 0.0, Wall::Soft(0.0));
        let (p_neg, p_band, p_up) = c.component_probabilities();
        assert!((p_neg - normal::cdf((0.0 - 0.4) / s)).abs() < 1e-14);
        assert!((p_band - normal::interval_mass(-0.4 / s, 0.6 / s)).abs() < 1e-14);
        assert!((p_up - normal::sf(0.6 / s)).abs() < 1e-14);
        // And the inverse CDF is the plain Gaussian quantile.
        for &u in &[0.05, 0.31, 0.5, 0.77, 0.99] {
            let x = c.inverse_cdf(u);
            assert!((x - (0.4 + s * normal::inv_cdf(u))).abs() < 1e-9, "u={u}");
        }
    }

    #[test]
    fn hard_wall_high_mean_is_mostly_above_band() {
        let c = SiteConditional::new(10.0, (1.0f64 / 6.0).sqrt(), 0.0, Wall::Hard);
        let (p_neg, p_band, p_up) = c.component_probabilities();
        assert_eq!(p_neg, 0.0);
        assert!(p_up > 1.0 - 1e-12);
        assert!(p_band < 1e-12);
    }

    #[test]
    fn inverse_cdf_round_trip_and_support() {
        let cases = [
            SiteConditional::new(0.2, 0.408, 0.7, Wall::Soft(1.0)),
            SiteConditional::new(-1.5, 0.408, -0.4, Wall::Soft(0.2)),
            SiteConditional::new(3.0, 0.408, 1.2, Wall::Hard),
            SiteConditional::new(0.0, 0.408, 0.0, Wall::Hard),
        ];
        for (ci, c) in cases.iter().enumerate() {
            let mut prev = f64::NEG_INFINITY;
            for i in 1..400 {
                let u = i as f64 / 400.0;
                let x = c.inverse_cdf(u);
                assert!(x >= prev - 1e-12, "case {ci}: not monotone at u={u}");
                prev = x;
                assert!(
                    (c.cdf(x) - u).abs() < 1e-9,
                    "case {ci} u={u}: cdf(x)={}",
                    c.cdf(x)
                );
                if matches!(ci, 2 | 3) {
                    assert!(x >= 0.0, "hard wall breached");
                }
            }
        }
    }

    #[test]
    fn conditional_is_stochastically_increasing_in_mean() {
        let s = (1.0f64 / 6.0).sqrt();
        for &(y, wall) in &[
            (0.8, Wall::Soft(1.0)),
            (-0.5, Wall::Soft(3.0)),
            (1.5, Wall::Hard),
        ] {
            let means = [-2.0, -0.5, 0.0, 0.3, 1.0, 2.5];
            for w in means.windows(2) {
                let lo = SiteConditional::new(w[0], s, y, wall);
                let hi = SiteConditional::new(w[1], s, y, wall);
                for i in 1..200 {
                    let u = i as f64 / 200.0;
                    assert!(
                        hi.inverse_cdf(u) >= lo.inverse_cdf(u) - 1e-10,
                        "means {w:?} u={u} y={y}"
                    );
                }
            }
        }
    }

    #[test]
    fn conditional_matches_rejection_oracle_hard_wall() {
        // d=3, zero neighbors, h=0, hard wall: band probability given
        // acceptance is (Phi(sqrt(6)) - Phi(0)) / (1 - Phi(0)).
        let params = single_site_params(0.0, 0.0, Wall::Hard);
        let c = SiteConditional::from_params(&params, 0.0, 0.0);
        let (_, p_band, _) = c.component_probabilities();
        let s6 = 6.0f64.sqrt();
        let truth_band = (normal::cdf(s6) - 0.5) / 0.5;
        assert!((p_band - truth_band).abs() < 1e-12);

        // Rejection-sampling oracle.
        let mut rng = rngutil::stream(2024, &[1]);
        let mut kept = 0u64;
        let mut in_band = 0u64;
        let sd = (1.0f64 / 6.0).sqrt();
        while kept < 200_000 {
            let x = sd * rngutil::standard_normal(&mut rng);
            if x < 0.0 {
                continue;
            }
            kept += 1;
            if x <= 1.0 {
                in_band += 1;
            }
        }
        let emp = in_band as f64 / kept as f64;
        let se = (truth_band * (1.0 - truth_band) / kept as f64).sqrt();
        assert!(
            (emp - p_band).abs() < 4.0 * se,
            "emp {emp} vs exact {p_band}"
        );
    }

    #[test]
    fn single_site_chain_matches_exact_density() {
        // On the one-interior-site box the chain must reproduce the exact
        // reweighted conditional; KS < 0.01 at 1e5 samples.
        for (beta, h, wall) in [
            (0.0, 0.6, Wall::Soft(1.0)),
            (0.5, -0.4, Wall::Soft(0.5)),
            (0.0, 0.3, Wall::Hard),
        ] {
            let params = single_site_params(beta, h, wall);
            let disorder = params.disorder();
            let omega = disorder.value(&[1, 1, 1]);
            let truth = SiteConditional::from_params(&params, 0.0, omega);
            let mut chain = GibbsChain::new(params, 3).unwrap();
            chain.run_sweeps(50);
            let mut samples = Vec::with_capacity(100_000);
            for _ in 0..100_000 {
                chain.sweep();
                samples.push(chain.value_at(&[1, 1, 1]));
            }
            let cdf = EmpiricalCdf::new(samples);
            let ks = cdf.ks_distance(|t| truth.cdf(t));
            assert!(ks < 0.01, "KS = {ks} for beta={beta} h={h}");
        }
    }

    #[test]
    fn free_sweep_preserves_free_field_moments() {
        // beta = h = 0, K = 0: stationary law is the free field; compare
        // center mean/variance against the exact solver.
        let params = ModelParams::new(
            3,
            4,
            OriginMode::Corner,
            0.0,
            0.0,
            Wall::Soft(0.0),
            Boundary::Constant(0.0),
            DisorderLaw::StandardGaussian,
            5,
        )
        .unwrap();
        let solve = GaussianSolve::new(params.lattice.clone());
        let truth_var = solve.marginal_variance(&[2, 2, 2]).unwrap();
        let mut chain = GibbsChain::new(params, 9).unwrap();
        chain.run_sweeps(100);
        let n = 40_000;
        let mut s = 0.0;
        let mut s2 = 0.0;
        for _ in 0..n {
            chain.run_sweeps(2);
            let v = chain.value_at(&[2, 2, 2]);
            s += v;
            s2 += v * v;
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        // Generous tolerances: thinning 2 leaves some autocorrelation.
        let se_mean = (truth_var / n as f64).sqrt() * 3.0;
        assert!(mean.abs() < 4.0 * se_mean, "mean {mean}");
        assert!(
            (var - truth_var).abs() < 8.0 * truth_var * (2.0 / n as f64).sqrt(),
            "var {var} vs {truth_var}"
        );
    }

    #[test]
    fn hard_wall_never_goes_negative() {
        let params = single_site_params(0.3, 0.2, Wall::Hard);
        let mut chain = GibbsChain::new(params, 8).unwrap();
        for _ in 0..50_000 {
            chain.sweep();
            assert!(chain.value_at(&[1, 1, 1]) >= 0.0);
        }
    }

    #[test]
    fn chains_are_seed_deterministic() {
        let params = single_site_params(0.4, 0.1, Wall::Soft(1.0));
        let mut a = GibbsChain::new(params.clone(), 77).unwrap();
        let mut b = GibbsChain::new(params, 77).unwrap();
        for _ in 0..100 {
            a.sweep();
            b.sweep();
        }
        assert_eq!(
            a.value_at(&[1, 1, 1]).to_bits(),
            b.value_at(&[1, 1, 1]).to_bits()
        );
    }

    #[test]
    fn identical_coupled_chains_stay_identical() {
        let params = ModelParams::new(
            3,
            3,
            OriginMode::Corner,
            0.5,
            0.2,
            Wall::Soft(1.0),
            Boundary::Constant(0.0),
            DisorderLaw::StandardGaussian,
            4,
        )
        .unwrap();
        let a = GibbsChain::new(params.clone(), 5).unwrap();
        let b = GibbsChain::new(params, 5).unwrap();
        let mut pair = CoupledPair::ordered(a, b, 99).unwrap();
        for _ in 0..200 {
            pair.coupled_sweep().unwrap();
        }
        let (a, b) = (pair.upper_chain(), pair.lower_chain());
        for s in a.params().lattice.interior_sites() {
            assert_eq!(a.value_at(&s).to_bits(), b.value_at(&s).to_bits());
        }
    }

    #[test]
    fn shifted_boundaries_preserve_order() {
        let params = ModelParams::new(
            3,
            4,
            OriginMode::Corner,
            0.5,
            0.3,
            Wall::Soft(1.5),
            Boundary::Constant(1.0),
            DisorderLaw::StandardGaussian,
            6,
        )
        .unwrap();
        let lower_params = ModelParams::with_lattice(
            params.lattice.clone(),
            params.beta,
            params.h,
            params.wall,
            Boundary::Constant(0.0),
            params.law,
            params.disorder_seed,
        )
        .unwrap();
        let upper = GibbsChain::new(params, 5).unwrap();
        let lower = GibbsChain::new(lower_params, 5).unwrap();
        let mut pair = CoupledPair::ordered(upper, lower, 123).unwrap();
        for _ in 0..500 {
            pair.coupled_sweep().unwrap();
        }
        assert!(
            pair.upper_chain().value_at(&[2, 2, 2]) >= pair.lower_chain().value_at(&[2, 2, 2])
        );
    }
}
