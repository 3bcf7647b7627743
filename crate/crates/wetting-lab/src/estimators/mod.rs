//! Free-energy and contact-density estimation, exact small-lattice oracles,
//! the one-site asymptotic formulas, reduced partition functions, and the
//! wall-strength gap bounds.

pub mod contact;
pub mod exact;
pub mod kgap;
pub mod onesite;
pub mod record;
pub mod reduced;
pub mod superadd;

pub use contact::{contact_density, free_energy_ti, ContactWindow, EstimatorError};
pub use exact::{
    exact_annealed_log_z, exact_disorder_avg_interior, exact_disorder_avg_log_z,
    exact_interior_log_z, exact_log_z_small,
    ExactError,
};
pub use kgap::{fit_exponential_rate, k_gap};
pub use onesite::{
    band_over_tail_ratio, bracket_root_height, delta_pinning_conjecture, explicit_lower_bound,
    explicit_lower_bound_neg_log, jensen_lower_bound, jensen_maximizer, onesite_quantities,
    ratio_estimate, ratio_normalized, scaling_rows, OneSiteQuantities, ScalingRow,
};
pub use record::{EstimateRecord, FreeEnergyCurve, METHOD_TAGS};
pub use reduced::{
    closed_form_q_single_site, reduced_q, second_moment_report, ReducedQ, SecondMomentReport,
};
pub use superadd::{superadditive_lower_bound, InnerEstimator};
