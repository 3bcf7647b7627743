//! Exact linear algebra for the free field on a box: harmonic extension,
//! zero-boundary sampling, and Green function entries.
//!
//! With the edge convention "every nearest-neighbor edge carrying at least
//! one interior endpoint contributes (phi_x - phi_y)^2 / 2", the interior
//! precision matrix is the Dirichlet graph Laplacian A = 2d I - adjacency.
//! On a cubic interior grid A is diagonalized by products of sine modes, so
//! solves, covariances and exact Gaussian samples all go through one
//! separable orthogonal transform; no factorization and no iteration.

use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::lattice::BoxLattice;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("site {0:?} is not an interior site")]
    NotInterior(Vec<i64>),
    #[error("boundary values must be finite; got {value} at {site:?}")]
    BadBoundary { site: Vec<i64>, value: f64 },
    #[error("solve residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    ResidualTooLarge { residual: f64, tol: f64 },
}

/// A height function on all of Lambda; boundary entries are fixed data,
/// interior entries are the degrees of freedom.
#[derive(Debug, Clone)]
pub struct FieldConfig {
    lattice: Arc<BoxLattice>,
    values: Vec<f64>,
}

impl FieldConfig {
    pub fn constant(lattice: Arc<BoxLattice>, u: f64) -> Self {
        let n = lattice.num_sites();
        FieldConfig {
            lattice,
            values: vec![u; n],
        }
    }

    pub fn from_values(lattice: Arc<BoxLattice>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), lattice.num_sites());
        FieldConfig { lattice, values }
    }

    pub fn lattice(&self) -> &Arc<BoxLattice> {
        &self.lattice
    }

    pub fn value(&self, coords: &[i64]) -> f64 {
        self.values[self.lattice.lambda_id(coords).expect("site in box")]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Copy of the interior values in interior-id order.
    pub fn interior_values(&self) -> Vec<f64> {
        (0..self.lattice.num_interior())
            .map(|i| self.values[self.lattice.interior_to_lambda(i)])
            .collect()
    }

    pub fn set_interior(&mut self, interior: &[f64]) {
        assert_eq!(interior.len(), self.lattice.num_interior());
        for (i, &v) in interior.iter().enumerate() {
            self.values[self.lattice.interior_to_lambda(i)] = v;
        }
    }

    fn check_boundary_finite(&self) -> Result<(), FieldError> {
        for s in self.lattice.sites() {
            if self.lattice.is_boundary(&s) && !self.value(&s).is_finite() {
                return Err(FieldError::BadBoundary {
                    value: self.value(&s),
                    site: s,
                });
            }
        }
        Ok(())
    }
}

/// Spectral handle for the interior Dirichlet Laplacian of a box.
#[derive(Debug, Clone)]
pub struct GaussianSolve {
    lattice: Arc<BoxLattice>,
    m: usize,
    /// Orthogonal symmetric sine matrix, row-major m x m.
    sine: Vec<f64>,
    /// One-axis eigenvalues 2 - 2 cos(pi k / (m+1)), k = 1..m.
    axis_eigs: Vec<f64>,
    /// Interior-id of each interior neighbor, -1 where the neighbor is a
    /// boundary site; stride 2d, same order as the lattice neighbor table.
    interior_adj: Vec<i64>,
}

const SOLVE_TOL: f64 = 1e-10;

impl GaussianSolve {
    pub fn new(lattice: Arc<BoxLattice>) -> Self {
        let m = lattice.interior_side();
        let q = (m + 1) as f64;
        let norm = (2.0 / q).sqrt();
        let mut sine = vec![0.0; m * m];
        for k in 0..m {
            for x in 0..m {
                sine[k * m + x] =
                    norm * (std::f64::consts::PI * (k + 1) as f64 * (x + 1) as f64 / q).sin();
            }
        }
        let axis_eigs = (0..m)
            .map(|k| 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / q).cos())
            .collect();

        let d = lattice.dim();
        let mut interior_adj = Vec::with_capacity(lattice.num_interior() * 2 * d);
        for i in 0..lattice.num_interior() {
            for &nb in lattice.neighbors_of_interior(i) {
                let coords = lattice.lambda_coords(nb as usize);
                interior_adj.push(match lattice.interior_id(&coords) {
                    Some(j) => j as i64,
                    None => -1,
                });
            }
        }
        GaussianSolve {
            lattice,
            m,
            sine,
            axis_eigs,
            interior_adj,
        }
    }

    pub fn lattice(&self) -> &Arc<BoxLattice> {
        &self.lattice
    }

    /// Apply the separable sine transform in place (self-inverse).
    fn transform(&self, data: &mut [f64]) {
        let d = self.lattice.dim();
        let m = self.m;
        let mut fiber = vec![0.0; m];
        // After processing axis `a`, index a of `data` is in mode space.
        for axis in 0..d {
            let stride = m.pow((d - 1 - axis) as u32);
            let block = stride * m;
            let nblocks = data.len() / block;
            for b in 0..nblocks {
                for off in 0..stride {
                    let base = b * block + off;
                    for (k, f) in fiber.iter_mut().enumerate() {
                        let row = &self.sine[k * m..(k + 1) * m];
                        let mut acc = 0.0;
                        for (x, &s) in row.iter().enumerate() {
                            acc += s * data[base + x * stride];
                        }
                        *f = acc;
                    }
                    for (k, &f) in fiber.iter().enumerate() {
                        data[base + k * stride] = f;
                    }
                }
            }
        }
    }

    fn eigenvalue(&self, mode: usize) -> f64 {
        let d = self.lattice.dim();
        let m = self.m;
        let mut id = mode;
        let mut lam = 0.0;
        for _ in 0..d {
            lam += self.axis_eigs[id % m];
            id /= m;
        }
        lam
    }

    /// Exact solve of A x = rhs on the interior.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.transform(&mut x);
        for (mode, v) in x.iter_mut().enumerate() {
            *v /= self.eigenvalue(mode);
        }
        self.transform(&mut x);
        x
    }

    /// A times an interior vector (used for residual checks).
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = self.lattice.dim();
        let two_d = 2.0 * d as f64;
        let s = 2 * d;
        (0..x.len())
            .map(|i| {
                let mut acc = two_d * x[i];
                for &j in &self.interior_adj[i * s..(i + 1) * s] {
                    if j >= 0 {
                        acc -= x[j as usize];
                    }
                }
                acc
            })
            .collect()
    }

    /// Draw an exact sample of the zero-boundary free field (interior values).
    pub fn sample_zero_boundary<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut z: Vec<f64> = (0..self.lattice.num_interior())
            .map(|_| crate::rngutil::standard_normal(rng))
            .collect();
        for (mode, v) in z.iter_mut().enumerate() {
            *v /= self.eigenvalue(mode).sqrt();
        }
        self.transform(&mut z);
        z
    }

    /// Covariance of phi_x and phi_y under the zero-boundary free field,
    /// i.e. the (x, y) entry of A^{-1}.
    pub fn green(&self, x: &[i64], y: &[i64]) -> Result<f64, FieldError> {
        let xi = self
            .lattice
            .interior_id(x)
            .ok_or_else(|| FieldError::NotInterior(x.to_vec()))?;
        let yi = self
            .lattice
            .interior_id(y)
            .ok_or_else(|| FieldError::NotInterior(y.to_vec()))?;
        let d = self.lattice.dim();
        let m = self.m;
        // Per-axis sine factors for both sites.
        let xc = self.lattice.interior_coords(xi);
        let yc = self.lattice.interior_coords(yi);
        let offset = |c: &[i64], axis: usize| {
            let lo = self.lattice.interior_coords(0)[axis];
            (c[axis] - lo) as usize
        };
        let total = m.pow(d as u32);
        let mut sum = 0.0;
        let mut kvec = vec![0usize; d];
        for _ in 0..total {
            let mut prod = 1.0;
            let mut lam = 0.0;
            for axis in 0..d {
                let k = kvec[axis];
                prod *= self.sine[k * m + offset(&xc, axis)] * self.sine[k * m + offset(&yc, axis)];
                lam += self.axis_eigs[k];
            }
            sum += prod / lam;
            for axis in (0..d).rev() {
                kvec[axis] += 1;
                if kvec[axis] < m {
                    break;
                }
                kvec[axis] = 0;
            }
        }
        Ok(sum)
    }

    /// Marginal variance of an interior site under zero boundary.
    pub fn marginal_variance(&self, site: &[i64]) -> Result<f64, FieldError> {
        self.green(site, site)
    }

    /// Marginal variances of every interior site (small lattices only).
    pub fn diag_variances(&self) -> Vec<f64> {
        (0..self.lattice.num_interior())
            .map(|i| {
                let c = self.lattice.interior_coords(i);
                self.green(&c, &c).unwrap()
            })
            .collect()
    }

    /// Right-hand side of the Dirichlet problem for given boundary data:
    /// rhs_x = sum of boundary neighbor values of x.
    pub fn boundary_rhs(&self, boundary: &FieldConfig) -> Vec<f64> {
        let d = self.lattice.dim();
        let s = 2 * d;
        (0..self.lattice.num_interior())
            .map(|i| {
                let mut acc = 0.0;
                for (slot, &j) in self.interior_adj[i * s..(i + 1) * s].iter().enumerate() {
                    if j < 0 {
                        let lam_id = self.lattice.neighbors_of_interior(i)[slot] as usize;
                        acc += boundary.values()[lam_id];
                    }
                }
                acc
            })
            .collect()
    }
}

/// Solve the discrete Dirichlet problem: returns the field whose interior
/// values have the mean-value property with respect to the given boundary.
pub fn harmonic_extension(
    solve: &GaussianSolve,
    boundary: &FieldConfig,
) -> Result<FieldConfig, FieldError> {
    boundary.check_boundary_finite()?;
    let rhs = solve.boundary_rhs(boundary);
    let x = solve.solve(&rhs);
    // Direct residual check; the spectral solve is exact up to rounding but
    // we refuse to return silently degraded answers.
    let ax = solve.apply(&x);
    let mut num = 0.0;
    let mut den: f64 = 1e-300;
    for (a, b) in ax.iter().zip(rhs.iter()) {
        num += (a - b) * (a - b);
        den += b * b;
    }
    let residual = (num / den).sqrt();
    if residual > SOLVE_TOL {
        return Err(FieldError::ResidualTooLarge {
            residual,
            tol: SOLVE_TOL,
        });
    }
    let mut out = boundary.clone();
    out.set_interior(&x);
    Ok(out)
}

/// Exact sample of the free field with the given boundary condition:
/// harmonic extension plus an independent zero-boundary fluctuation.
pub fn sample_free_field<R: Rng + ?Sized>(
    solve: &GaussianSolve,
    boundary: &FieldConfig,
    rng: &mut R,
) -> Result<FieldConfig, FieldError> {
    let mut field = harmonic_extension(solve, boundary)?;
    let fluct = solve.sample_zero_boundary(rng);
    let lat = solve.lattice();
    for (i, f) in fluct.iter().enumerate() {
        field.values_mut()[lat.interior_to_lambda(i)] += f;
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::OriginMode;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn arc_lattice(d: usize, n: i64, mode: OriginMode) -> Arc<BoxLattice> {
        Arc::new(BoxLattice::new(d, n, mode).unwrap())
    }

    fn dense_precision(lat: &BoxLattice) -> DMatrix<f64> {
        let n = lat.num_interior();
        let d = lat.dim();
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = 2.0 * d as f64;
            for &nb in lat.neighbors_of_interior(i) {
                let c = lat.lambda_coords(nb as usize);
                if let Some(j) = lat.interior_id(&c) {
                    a[(i, j)] = -1.0;
                }
            }
        }
        a
    }

    #[test]
    fn constant_boundary_extends_to_constant() {
        let lat = arc_lattice(3, 4, OriginMode::Corner);
        let solve = GaussianSolve::new(lat.clone());
        let bc = FieldConfig::constant(lat.clone(), 5.0);
        let ext = harmonic_extension(&solve, &bc).unwrap();
        for s in lat.interior_sites() {
            assert!((ext.value(&s) - 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_site_mean_is_neighbor_average() {
        let lat = arc_lattice(3, 2, OriginMode::Corner);
        let solve = GaussianSolve::new(lat.clone());
        let mut bc = FieldConfig::constant(lat.clone(), 0.0);
        // One neighbor of the unique interior site raised to 6.
        let id = lat.lambda_id(&[0, 1, 1]).unwrap();
        bc.values_mut()[id] = 6.0;
        let ext = harmonic_extension(&solve, &bc).unwrap();
        assert!((ext.value(&[1, 1, 1]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mean_value_property_random_boundary() {
        let lat = arc_lattice(3, 4, OriginMode::Corner);
        let solve = GaussianSolve::new(lat.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut bc = FieldConfig::constant(lat.clone(), 0.0);
        for s in lat.sites() {
            if lat.is_boundary(&s) {
                let id = lat.lambda_id(&s).unwrap();
                bc.values_mut()[id] = rng.gen_range(-3.0..3.0);
            }
        }
        let ext = harmonic_extension(&solve, &bc).unwrap();
        for s in lat.interior_sites() {
            let nb = lat.neighbors(&s);
            let avg: f64 = nb.iter().map(|y| ext.value(y)).sum::<f64>() / nb.len() as f64;
            assert!(
                (ext.value(&s) - avg).abs() < 1e-10,
                "mean-value property violated at {s:?}"
            );
        }
    }

    #[test]
    fn harmonic_extension_matches_dense_solve() {
        let lat = arc_lattice(3, 4, OriginMode::Corner);
        let solve = GaussianSolve::new(lat.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut bc = FieldConfig::constant(lat.clone(), 0.0);
        for s in lat.sites() {
            if lat.is_boundary(&s) {
                let id = lat.lambda_id(&s).unwrap();
                bc.values_mut()[id] = rng.gen_range(-2.0..2.0);
            }
        }
        let ext = harmonic_extension(&solve, &bc).unwrap();

        let a = dense_precision(&lat);
        let rhs = nalgebra::DVector::from_vec(solve.boundary_rhs(&bc));
        let x = a.lu().solve(&rhs).unwrap();
        for i in 0..lat.num_interior() {
            let c = lat.interior_coords(i);
            assert!((ext.value(&c) - x[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn green_matches_dense_inverse() {
        for (d, n) in [(3usize, 3i64), (3, 4), (2, 5), (1, 6)] {
            let lat = arc_lattice(d, n, OriginMode::Corner);
            let solve = GaussianSolve::new(lat.clone());
            let a = dense_precision(&lat);
            let inv = a.try_inverse().unwrap();
            for i in 0..lat.num_interior() {
                for j in 0..lat.num_interior() {
                    let x = lat.interior_coords(i);
                    let y = lat.interior_coords(j);
                    let g = solve.green(&x, &y).unwrap();
                    assert!(
                        (g - inv[(i, j)]).abs() < 1e-12,
                        "d={d} n={n} ({i},{j}): {g} vs {}",
                        inv[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn green_is_symmetric_and_rejects_boundary() {
        let lat = arc_lattice(3, 4, OriginMode::Corner);
        let solve = GaussianSolve::new(lat.clone());
        let g1 = solve.green(&[1, 2, 3], &[2, 2, 1]).unwrap();
        let g2 = solve.green(&[2, 2, 1], &[1, 2, 3]).unwrap();
        assert_eq!(g1, g2);
        assert!(solve.green(&[0, 1, 1], &[1, 1, 1]).is_err());
    }

    #[test]
    fn single_free_site_variance() {
        let lat = arc_lattice(3, 2, OriginMode::Corner);
        let solve = GaussianSolve::new(lat.clone());
        let v = solve.marginal_variance(&[1, 1, 1]).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn domain_monotonicity_of_center_variance() {
        // Remark-style check: the center variance grows with the box.
        let v2 = {
            let lat = arc_lattice(3, 2, OriginMode::Corner);
            GaussianSolve::new(lat).marginal_variance(&[1, 1, 1]).unwrap()
        };
        let v4 = {
            let lat = arc_lattice(3, 4, OriginMode::Corner);
            GaussianSolve::new(lat).marginal_variance(&[2, 2, 2]).unwrap()
        };
        assert!(v4 > v2);
    }

    #[test]
    fn sampler_mean_and_variance_single_site() {
        let lat = arc_lattice(3, 2, OriginMode::Corner);
        let solve = GaussianSolve::new(lat.clone());
        let bc = FieldConfig::constant(lat.clone(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let f = sample_free_field(&solve, &bc, &mut rng).unwrap();
            let v = f.value(&[1, 1, 1]);
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        let true_var = 1.0 / 6.0;
        // SE of the sample variance of a Gaussian: var * sqrt(2/n).
        let se_var = true_var * (2.0 / n as f64).sqrt();
        let se_mean = (true_var / n as f64).sqrt();
        assert!(mean.abs() < 4.0 * se_mean, "mean {mean}");
        assert!((var - true_var).abs() < 4.0 * se_var, "var {var}");
    }

    #[test]
    fn sampler_covariance_matches_dense_inverse() {
        let lat = arc_lattice(3, 3, OriginMode::Corner);
        let solve = GaussianSolve::new(lat.clone());
        let bc = FieldConfig::constant(lat.clone(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ni = lat.num_interior();
        let n = 60_000;
        let mut acc = vec![0.0; ni * ni];
        let mut means = vec![0.0; ni];
        for _ in 0..n {
            let f = sample_free_field(&solve, &bc, &mut rng).unwrap();
            let iv = f.interior_values();
            for i in 0..ni {
                means[i] += iv[i];
                for j in 0..ni {
                    acc[i * ni + j] += iv[i] * iv[j];
                }
            }
        }
        let a = dense_precision(&lat);
        let inv = a.try_inverse().unwrap();
        for i in 0..ni {
            for j in 0..ni {
                let cov = acc[i * ni + j] / n as f64
                    - (means[i] / n as f64) * (means[j] / n as f64);
                let truth = inv[(i, j)];
                // Var of a sample covariance of jointly Gaussian pairs is
                // (c_ij^2 + c_ii c_jj)/n.
                let se = ((truth * truth + inv[(i, i)] * inv[(j, j)]) / n as f64).sqrt();
                assert!(
                    (cov - truth).abs() < 4.0 * se,
                    "cov({i},{j}) = {cov}, want {truth}"
                );
            }
        }
    }

    #[test]
    fn constant_boundary_shifts_sample_mean() {
        let lat = arc_lattice(3, 3, OriginMode::Corner);
        let solve = GaussianSolve::new(lat.clone());
        let bc = FieldConfig::constant(lat.clone(), 2.5);
        let ext = harmonic_extension(&solve, &bc).unwrap();
        for s in lat.interior_sites() {
            assert!((ext.value(&s) - 2.5).abs() < 1e-12);
        }
    }
}
