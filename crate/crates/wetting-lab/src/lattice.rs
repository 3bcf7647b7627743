//! Box geometry on Z^d: the box Lambda, its internal boundary, the interior,
//! and the energy window where the pinning/wall potentials act.
//!
//! Two box conventions are supported behind one flag: a corner box
//! {0..N}^d (interior {1..N-1}^d, window {1..N}^d) and a centered box
//! {-N..N}^d (interior {-N+1..N-1}^d, window {-N+1..N}^d). All hot-loop
//! traversal is done through flat indices; coordinates only appear at API
//! boundaries.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("side parameter N must be >= 2 (got {0}): N < 2 leaves no interior")]
    SideTooSmall(i64),
    #[error("dimension d must be >= 1 (got {0})")]
    BadDimension(usize),
    #[error("lattice with d={d}, N={n} has too many sites for this machine")]
    TooLarge { d: usize, n: i64 },
}

/// Placement of the box relative to the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginMode {
    /// Lambda = {0..N}^d.
    Corner,
    /// Lambda = {-N..N}^d.
    Centered,
}

/// A site together with its flat interior index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteIndex {
    pub coords: Vec<i64>,
    pub flat_id: usize,
}

/// Geometry of a box Lambda in Z^d with its interior/boundary/window split.
#[derive(Debug, Clone)]
pub struct BoxLattice {
    d: usize,
    n: i64,
    mode: OriginMode,
    lo: i64,
    hi: i64,
    interior_lo: i64,
    interior_hi: i64,
    window_lo: i64,
    window_hi: i64,
    side: usize,
    interior_side: usize,
    num_sites: usize,
    num_interior: usize,
    /// Lambda-flat ids of the 2d neighbors of each interior site, stride 2d,
    /// in fixed (-e1,+e1,-e2,+e2,...) order.
    interior_neighbors: Vec<u32>,
}

impl BoxLattice {
    pub fn new(d: usize, n: i64, mode: OriginMode) -> Result<Self, LatticeError> {
        if d == 0 {
            return Err(LatticeError::BadDimension(d));
        }
        if n < 2 {
            return Err(LatticeError::SideTooSmall(n));
        }
        let (lo, hi) = match mode {
            OriginMode::Corner => (0, n),
            OriginMode::Centered => (-n, n),
        };
        let side = (hi - lo + 1) as usize;
        let num_sites = side
            .checked_pow(d as u32)
            .filter(|&s| s < u32::MAX as usize)
            .ok_or(LatticeError::TooLarge { d, n })?;
        let interior_lo = lo + 1;
        let interior_hi = hi - 1;
        let interior_side = (interior_hi - interior_lo + 1) as usize;
        let num_interior = interior_side.pow(d as u32);

        let mut lat = BoxLattice {
            d,
            n,
            mode,
            lo,
            hi,
            interior_lo,
            interior_hi,
            window_lo: lo + 1,
            window_hi: hi,
            side,
            interior_side,
            num_sites,
            num_interior,
            interior_neighbors: Vec::new(),
        };
        lat.interior_neighbors = lat.build_interior_neighbors();
        Ok(lat)
    }

    fn build_interior_neighbors(&self) -> Vec<u32> {
        let mut table = Vec::with_capacity(self.num_interior * 2 * self.d);
        let mut coords = vec![self.interior_lo; self.d];
        for _ in 0..self.num_interior {
            for axis in 0..self.d {
                for step in [-1i64, 1] {
                    coords[axis] += step;
                    table.push(self.lambda_id(&coords).expect("interior neighbor in box") as u32);
                    coords[axis] -= step;
                }
            }
            // advance odometer
            for axis in (0..self.d).rev() {
                coords[axis] += 1;
                if coords[axis] <= self.interior_hi {
                    break;
                }
                coords[axis] = self.interior_lo;
            }
        }
        table
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn side_parameter(&self) -> i64 {
        self.n
    }

    pub fn origin_mode(&self) -> OriginMode {
        self.mode
    }

    /// Number of sites of Lambda.
    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn num_interior(&self) -> usize {
        self.num_interior
    }

    pub fn num_boundary(&self) -> usize {
        self.num_sites - self.num_interior
    }

    /// Number of sites of the energy window.
    pub fn num_window(&self) -> usize {
        let w = (self.window_hi - self.window_lo + 1) as usize;
        w.pow(self.d as u32)
    }

    /// Extent of the interior along each axis.
    pub fn interior_side(&self) -> usize {
        self.interior_side
    }

    pub fn contains(&self, coords: &[i64]) -> bool {
        coords.len() == self.d && coords.iter().all(|&c| c >= self.lo && c <= self.hi)
    }

    pub fn is_interior(&self, coords: &[i64]) -> bool {
        coords.len() == self.d
            && coords
                .iter()
                .all(|&c| c >= self.interior_lo && c <= self.interior_hi)
    }

    pub fn is_boundary(&self, coords: &[i64]) -> bool {
        self.contains(coords) && !self.is_interior(coords)
    }

    pub fn in_window(&self, coords: &[i64]) -> bool {
        coords.len() == self.d
            && coords
                .iter()
                .all(|&c| c >= self.window_lo && c <= self.window_hi)
    }

    /// Row-major flat id of a Lambda site.
    pub fn lambda_id(&self, coords: &[i64]) -> Option<usize> {
        if !self.contains(coords) {
            return None;
        }
        let mut id = 0usize;
        for &c in coords {
            id = id * self.side + (c - self.lo) as usize;
        }
        Some(id)
    }

    pub fn lambda_coords(&self, mut id: usize) -> Vec<i64> {
        assert!(id < self.num_sites);
        let mut coords = vec![0i64; self.d];
        for axis in (0..self.d).rev() {
            coords[axis] = self.lo + (id % self.side) as i64;
            id /= self.side;
        }
        coords
    }

    /// Flat id within the interior (the bijection used by samplers/solvers).
    pub fn interior_id(&self, coords: &[i64]) -> Option<usize> {
        if !self.is_interior(coords) {
            return None;
        }
        let mut id = 0usize;
        for &c in coords {
            id = id * self.interior_side + (c - self.interior_lo) as usize;
        }
        Some(id)
    }

    pub fn interior_coords(&self, mut id: usize) -> Vec<i64> {
        assert!(id < self.num_interior);
        let mut coords = vec![0i64; self.d];
        for axis in (0..self.d).rev() {
            coords[axis] = self.interior_lo + (id % self.interior_side) as i64;
            id /= self.interior_side;
        }
        coords
    }

    pub fn site_index(&self, coords: &[i64]) -> Option<SiteIndex> {
        self.interior_id(coords).map(|flat_id| SiteIndex {
            coords: coords.to_vec(),
            flat_id,
        })
    }

    pub fn interior_to_lambda(&self, interior_id: usize) -> usize {
        let coords = self.interior_coords(interior_id);
        self.lambda_id(&coords).unwrap()
    }

    /// Lambda-flat ids of the 2d in-box neighbors of an interior site.
    pub fn neighbors_of_interior(&self, interior_id: usize) -> &[u32] {
        let s = 2 * self.d;
        &self.interior_neighbors[interior_id * s..(interior_id + 1) * s]
    }

    /// All in-box neighbors of an arbitrary Lambda site.
    pub fn neighbors(&self, coords: &[i64]) -> Vec<Vec<i64>> {
        assert!(self.contains(coords), "site {coords:?} outside the box");
        let mut out = Vec::with_capacity(2 * self.d);
        let mut c = coords.to_vec();
        for axis in 0..self.d {
            for step in [-1i64, 1] {
                c[axis] += step;
                if self.contains(&c) {
                    out.push(c.clone());
                }
                c[axis] -= step;
            }
        }
        out
    }

    /// Iterator over all Lambda sites, row-major.
    pub fn sites(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.num_sites).map(|id| self.lambda_coords(id))
    }

    /// Iterator over interior sites in scan (row-major) order.
    pub fn interior_sites(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.num_interior).map(|id| self.interior_coords(id))
    }

    /// Iterator over energy-window sites.
    pub fn window_sites(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let w = (self.window_hi - self.window_lo + 1) as usize;
        let total = w.pow(self.d as u32);
        (0..total).map(move |mut id| {
            let mut coords = vec![0i64; self.d];
            for axis in (0..self.d).rev() {
                coords[axis] = self.window_lo + (id % w) as i64;
                id /= w;
            }
            coords
        })
    }

    /// Unordered nearest-neighbor pairs of Lambda with at least one interior
    /// endpoint, as Lambda-flat id pairs. These are exactly the edges that
    /// carry gradient energy.
    pub fn energy_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for int_id in 0..self.num_interior {
            let a = self.interior_to_lambda(int_id);
            for &b in self.neighbors_of_interior(int_id) {
                let b = b as usize;
                // Count interior-interior edges once; interior-boundary edges
                // are picked up only from their interior endpoint.
                let b_coords = self.lambda_coords(b);
                if self.is_interior(&b_coords) {
                    if a < b {
                        edges.push((a, b));
                    }
                } else {
                    edges.push((a.min(b), a.max(b)));
                }
            }
        }
        edges
    }

    /// Center site of the box (exact for centered mode and even-N corner
    /// boxes; otherwise rounded down).
    pub fn center(&self) -> Vec<i64> {
        let c = match self.mode {
            OriginMode::Corner => self.n / 2,
            OriginMode::Centered => 0,
        };
        vec![c; self.d]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn counts_single_interior_site() {
        let lat = BoxLattice::new(3, 2, OriginMode::Corner).unwrap();
        assert_eq!(lat.num_sites(), 27);
        assert_eq!(lat.num_interior(), 1);
        assert_eq!(lat.num_boundary(), 26);
        assert_eq!(lat.num_window(), 8);
    }

    #[test]
    fn counts_n3() {
        let lat = BoxLattice::new(3, 3, OriginMode::Corner).unwrap();
        assert_eq!(lat.num_interior(), 8);
    }

    #[test]
    fn counts_centered() {
        let lat = BoxLattice::new(3, 2, OriginMode::Centered).unwrap();
        assert_eq!(lat.num_sites(), 125);
        assert_eq!(lat.num_interior(), 27);
    }

    #[test]
    fn rejects_degenerate_boxes() {
        assert_eq!(
            BoxLattice::new(3, 1, OriginMode::Corner).unwrap_err(),
            LatticeError::SideTooSmall(1)
        );
        assert_eq!(
            BoxLattice::new(0, 4, OriginMode::Corner).unwrap_err(),
            LatticeError::BadDimension(0)
        );
    }

    #[test]
    fn interior_and_boundary_partition_lambda() {
        for (d, n, mode) in [
            (3, 2, OriginMode::Corner),
            (3, 4, OriginMode::Corner),
            (2, 3, OriginMode::Centered),
            (1, 5, OriginMode::Corner),
        ] {
            let lat = BoxLattice::new(d, n, mode).unwrap();
            let mut interior = 0;
            let mut boundary = 0;
            for s in lat.sites() {
                let i = lat.is_interior(&s);
                let b = lat.is_boundary(&s);
                assert!(i ^ b, "site {s:?} must be exactly one of interior/boundary");
                if i {
                    interior += 1;
                } else {
                    boundary += 1;
                }
            }
            assert_eq!(interior, lat.num_interior());
            assert_eq!(boundary, lat.num_boundary());
        }
    }

    #[test]
    fn neighbor_examples() {
        let lat = BoxLattice::new(3, 2, OriginMode::Corner).unwrap();
        let nb = lat.neighbors(&[1, 1, 1]);
        assert_eq!(nb.len(), 6);
        assert!(nb.iter().all(|s| lat.is_boundary(s)));
        assert_eq!(lat.neighbors(&[0, 0, 0]).len(), 3);

        let lat = BoxLattice::new(3, 4, OriginMode::Corner).unwrap();
        let nb = lat.neighbors(&[2, 2, 2]);
        assert_eq!(nb.len(), 6);
        assert!(nb.iter().all(|s| lat.is_interior(s)));
    }

    #[test]
    fn every_interior_site_has_2d_neighbors_in_box() {
        for (d, n) in [(1usize, 4i64), (2, 3), (3, 4), (4, 3)] {
            let lat = BoxLattice::new(d, n, OriginMode::Corner).unwrap();
            for id in 0..lat.num_interior() {
                assert_eq!(lat.neighbors_of_interior(id).len(), 2 * d);
            }
        }
    }

    #[test]
    fn energy_edges_match_ordered_pair_enumeration() {
        // Direct count of ordered nearest-neighbor pairs in Lambda^2 minus
        // (boundary)^2, halved, for small boxes.
        for (d, n) in [(1usize, 3i64), (2, 3), (3, 2), (3, 4)] {
            for mode in [OriginMode::Corner, OriginMode::Centered] {
                let lat = BoxLattice::new(d, n, mode).unwrap();
                let mut ordered = 0usize;
                for x in lat.sites() {
                    for y in lat.neighbors(&x) {
                        if lat.is_boundary(&x) && lat.is_boundary(&y) {
                            continue;
                        }
                        ordered += 1;
                    }
                }
                let edges = lat.energy_edges();
                assert_eq!(edges.len() * 2, ordered, "d={d} n={n} mode={mode:?}");
                // No duplicates.
                let mut sorted = edges.clone();
                sorted.sort_unstable();
                sorted.dedup();
                assert_eq!(sorted.len(), edges.len());
            }
        }
    }

    #[test]
    fn window_is_interior_plus_upper_boundary_slab() {
        let lat = BoxLattice::new(3, 3, OriginMode::Corner).unwrap();
        let window: Vec<_> = lat.window_sites().collect();
        assert_eq!(window.len(), lat.num_window());
        for s in &window {
            assert!(lat.contains(s));
        }
        for s in lat.interior_sites() {
            assert!(lat.in_window(&s));
        }
    }

    proptest! {
        #[test]
        fn flat_id_round_trip(d in 1usize..=4, n in 2i64..=6, centered in any::<bool>()) {
            let mode = if centered { OriginMode::Centered } else { OriginMode::Corner };
            let lat = BoxLattice::new(d, n, mode).unwrap();
            for id in 0..lat.num_interior() {
                let coords = lat.interior_coords(id);
                prop_assert_eq!(lat.interior_id(&coords), Some(id));
                let si = lat.site_index(&coords).unwrap();
                prop_assert_eq!(si.flat_id, id);
            }
        }

        #[test]
        fn lambda_round_trip(d in 1usize..=3, n in 2i64..=5) {
            let lat = BoxLattice::new(d, n, OriginMode::Corner).unwrap();
            for id in 0..lat.num_sites() {
                let coords = lat.lambda_coords(id);
                prop_assert_eq!(lat.lambda_id(&coords), Some(id));
            }
        }
    }
}
