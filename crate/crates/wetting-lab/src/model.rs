//! The interacting Gibbs weight: pinning reward on the band [0, 1], wall
//! penalty below 0, both acting on the energy window of the box.
//!
//! The hard wall is an explicit flag rather than a large penalty, so
//! samplers can truncate supports exactly instead of reweighting.

use std::sync::Arc;

use thiserror::Error;

use crate::disorder::{DisorderError, DisorderField, DisorderLaw};
use crate::field::FieldConfig;
use crate::lattice::{BoxLattice, LatticeError, OriginMode};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Disorder(#[from] DisorderError),
    #[error("wall strength K must be nonnegative or infinite (got {0}); K < 0 is out of scope")]
    NegativeWall(f64),
    #[error("pinning strength h must be finite (got {0})")]
    BadPinning(f64),
}

/// Wall penalty per site below zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wall {
    /// Finite penalty K >= 0 per site with phi < 0.
    Soft(f64),
    /// Heights below zero are forbidden outright.
    Hard,
}

impl Wall {
    pub fn strength(self) -> f64 {
        match self {
            Wall::Soft(k) => k,
            Wall::Hard => f64::INFINITY,
        }
    }

    pub fn from_strength(k: f64) -> Result<Self, ModelError> {
        if k.is_nan() || k < 0.0 {
            Err(ModelError::NegativeWall(k))
        } else if k.is_infinite() {
            Ok(Wall::Hard)
        } else {
            Ok(Wall::Soft(k))
        }
    }

    pub fn is_hard(self) -> bool {
        matches!(self, Wall::Hard)
    }
}

/// Boundary condition for the field outside the interior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// phi-hat identically u.
    Constant(f64),
    /// phi-hat sampled from the (approximate) infinite-volume free field at
    /// average height u, by restriction of an exact sample on an enlarged box.
    FreeFieldAtHeight(f64),
}

impl Boundary {
    pub fn height(self) -> f64 {
        match self {
            Boundary::Constant(u) | Boundary::FreeFieldAtHeight(u) => u,
        }
    }
}

/// Full parameter set of the interacting measure on a box.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub lattice: Arc<BoxLattice>,
    pub beta: f64,
    pub h: f64,
    pub wall: Wall,
    pub boundary: Boundary,
    pub law: DisorderLaw,
    pub disorder_seed: u64,
    /// Cached lambda(beta).
    lambda: f64,
}

impl ModelParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        d: usize,
        n: i64,
        origin: OriginMode,
        beta: f64,
        h: f64,
        wall: Wall,
        boundary: Boundary,
        law: DisorderLaw,
        disorder_seed: u64,
    ) -> Result<Self, ModelError> {
        let lattice = Arc::new(BoxLattice::new(d, n, origin)?);
        Self::with_lattice(lattice, beta, h, wall, boundary, law, disorder_seed)
    }

    pub fn with_lattice(
        lattice: Arc<BoxLattice>,
        beta: f64,
        h: f64,
        wall: Wall,
        boundary: Boundary,
        law: DisorderLaw,
        disorder_seed: u64,
    ) -> Result<Self, ModelError> {
        if !h.is_finite() {
            return Err(ModelError::BadPinning(h));
        }
        if let Wall::Soft(k) = wall {
            if k.is_nan() || k < 0.0 {
                return Err(ModelError::NegativeWall(k));
            }
        }
        let lambda = law.lambda(beta)?;
        Ok(ModelParams {
            lattice,
            beta,
            h,
            wall,
            boundary,
            law,
            disorder_seed,
            lambda,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn disorder(&self) -> DisorderField {
        DisorderField::new(self.law, self.disorder_seed)
    }

    /// Per-site pinning energy y_x = beta omega_x - lambda(beta) + h.
    pub fn site_energy(&self, disorder: &DisorderField, coords: &[i64]) -> f64 {
        self.beta * disorder.value(coords) - self.lambda + self.h
    }

    /// Derived parameter set with a different pinning strength (same
    /// environment, same lattice).
    pub fn with_h(&self, h: f64) -> ModelParams {
        let mut p = self.clone();
        p.h = h;
        p
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }
}

/// Per-site indicator bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteIndicators {
    /// phi in [0, 1]: collects the pinning reward.
    pub delta: bool,
    /// phi < 0: hits the wall.
    pub rho: bool,
    /// phi <= 1.
    pub rho_plus: bool,
}

impl SiteIndicators {
    #[inline]
    pub fn of(phi: f64) -> Self {
        SiteIndicators {
            delta: (0.0..=1.0).contains(&phi),
            rho: phi < 0.0,
            rho_plus: phi <= 1.0,
        }
    }
}

/// Generalized pinning band: contribution b * 1_{[0, a]}(phi).
pub fn generalized_indicator(a: f64, b: f64, phi: f64) -> f64 {
    assert!(a > 0.0, "band width a must be positive");
    assert!(b > 0.0, "band weight b must be positive");
    if (0.0..=a).contains(&phi) {
        b
    } else {
        0.0
    }
}

/// Log of the Gibbs weight over the energy window:
/// sum over window sites of y_x delta_x - K rho_x, with -infinity when a
/// hard wall is violated anywhere on the window.
pub fn log_weight(params: &ModelParams, field: &FieldConfig, disorder: &DisorderField) -> f64 {
    let mut total = 0.0;
    for site in params.lattice.window_sites() {
        let phi = field.value(&site);
        let ind = SiteIndicators::of(phi);
        if ind.rho {
            match params.wall {
                Wall::Hard => return f64::NEG_INFINITY,
                Wall::Soft(k) => total -= k,
            }
        }
        if ind.delta {
            total += params.site_energy(disorder, &site);
        }
    }
    total
}

/// The deterministic part of `log_weight` carried by window sites whose
/// values are boundary data. Useful for bookkeeping that separates the
/// fluctuating interior energy from fixed boundary contributions.
pub fn boundary_window_log_weight(
    params: &ModelParams,
    boundary_field: &FieldConfig,
    disorder: &DisorderField,
) -> f64 {
    let mut total = 0.0;
    for site in params.lattice.window_sites() {
        if params.lattice.is_interior(&site) {
            continue;
        }
        let phi = boundary_field.value(&site);
        let ind = SiteIndicators::of(phi);
        if ind.rho {
            match params.wall {
                Wall::Hard => return f64::NEG_INFINITY,
                Wall::Soft(k) => total -= k,
            }
        }
        if ind.delta {
            total += params.site_energy(disorder, &site);
        }
    }
    total
}
