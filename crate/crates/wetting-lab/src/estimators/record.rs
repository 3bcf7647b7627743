//! Estimate bookkeeping: every Monte Carlo number travels with its standard
//! error, sample counts, seed and method tag.

use serde::Serialize;

/// Method tags are constrained to this set so CSV rows map back to exactly
/// one estimator operation.
pub const METHOD_TAGS: &[&str] = &[
    "exact_log_z",
    "contact_density",
    "free_energy_ti",
    "jensen_lower_bound",
    "explicit_lower_bound",
    "onesite_gain",
    "ratio_estimate",
    "scaling_analytic",
    "scaling_simulated",
    "delta_pinning_conjecture",
    "reduced_q",
    "second_moment",
    "k_gap",
    "superadditive_lower_bound",
    "sigma_sq_spectral",
    "sigma_sq_walk",
    "marginal_cdf",
    "coupling_check",
];

/// A numerical estimate with provenance.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateRecord {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub n_replicas: u64,
    pub method: &'static str,
    pub seed: u64,
}

impl EstimateRecord {
    pub fn new(
        value: f64,
        std_error: f64,
        n_samples: u64,
        n_replicas: u64,
        method: &'static str,
        seed: u64,
    ) -> Self {
        debug_assert!(std_error >= 0.0);
        debug_assert!(METHOD_TAGS.contains(&method), "unknown method tag {method}");
        EstimateRecord {
            value,
            std_error,
            n_samples,
            n_replicas,
            method,
            seed,
        }
    }

    pub fn exact(value: f64, method: &'static str) -> Self {
        EstimateRecord::new(value, 0.0, 0, 0, method, 0)
    }

    /// |self - other| in units of the combined standard error.
    pub fn sigma_distance(&self, other: f64, other_se: f64) -> f64 {
        let se = (self.std_error.powi(2) + other_se.powi(2)).sqrt();
        if se == 0.0 {
            if (self.value - other).abs() == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.value - other).abs() / se
        }
    }
}

/// A free-energy curve over a pinning grid, with its contact densities.
#[derive(Debug, Clone, Serialize)]
pub struct FreeEnergyCurve {
    pub h_grid: Vec<f64>,
    pub f: Vec<EstimateRecord>,
    pub contact: Vec<EstimateRecord>,
    pub anchor: f64,
    pub beta: f64,
    pub wall_strength: f64,
    pub d: usize,
    pub n: i64,
    /// Invariant violations observed while assembling the curve (e.g. a
    /// contact density that decreased in h beyond noise).
    pub warnings: Vec<String>,
}

impl FreeEnergyCurve {
    pub fn value_at(&self, h: f64) -> Option<&EstimateRecord> {
        self.h_grid
            .iter()
            .position(|&x| (x - h).abs() < 1e-12)
            .map(|i| &self.f[i])
    }

    /// Curve-level invariants: f nondecreasing within noise and bounded
    /// below by -2 SE.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, rec) in self.f.iter().enumerate() {
            if rec.value < -2.0 * rec.std_error.max(1e-12) {
                out.push(format!(
                    "f({}) = {} below -2 SE ({})",
                    self.h_grid[i], rec.value, rec.std_error
                ));
            }
        }
        for w in self.f.windows(2) {
            let se = (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
            if w[1].value < w[0].value - 2.0 * se.max(1e-12) {
                out.push(format!(
                    "free energy decreased beyond 2 SE: {} -> {}",
                    w[0].value, w[1].value
                ));
            }
        }
        out
    }
}
