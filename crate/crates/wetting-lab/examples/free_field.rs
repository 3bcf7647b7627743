//! Exact free-field machinery on a box: harmonic extension, zero-boundary
//! sampling, and Green function entries.
//!
//! Run with: cargo run --release --example free_field

use std::sync::Arc;

use wetting_lab::field::{harmonic_extension, sample_free_field, FieldConfig, GaussianSolve};
use wetting_lab::lattice::{BoxLattice, OriginMode};
use wetting_lab::rngutil;

fn main() {
    let lat = Arc::new(BoxLattice::new(3, 8, OriginMode::Corner).unwrap());
    let solve = GaussianSolve::new(lat.clone());

    // Harmonic extension of a tilted boundary.
    let mut bc = FieldConfig::constant(lat.clone(), 0.0);
    for s in lat.sites() {
        if lat.is_boundary(&s) {
            let id = lat.lambda_id(&s).unwrap();
            bc.values_mut()[id] = 0.25 * s[0] as f64;
        }
    }
    let ext = harmonic_extension(&solve, &bc).unwrap();
    println!("harmonic extension along the x-axis (y = z = 4):");
    for x in 0..=8 {
        println!("  phi({x},4,4) = {:+.6}", ext.value(&[x, 4, 4]));
    }

    // Center variance and a Green function row.
    let center = lat.center();
    println!(
        "\ncenter variance on the N=8 box: {:.6}",
        solve.marginal_variance(&center).unwrap()
    );
    println!("Green function decay from the center:");
    for dx in 0..=3 {
        let site = vec![center[0] + dx, center[1], center[2]];
        println!(
            "  G(center, center + {dx} e1) = {:.6}",
            solve.green(&center, &site).unwrap()
        );
    }

    // Empirical moments of exact samples against the solver.
    let mut rng = rngutil::stream(7, &[]);
    let zero = FieldConfig::constant(lat.clone(), 0.0);
    let n = 20_000;
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let f = sample_free_field(&solve, &zero, &mut rng).unwrap();
        let v = f.value(&center);
        s1 += v;
        s2 += v * v;
    }
    let mean = s1 / n as f64;
    let var = s2 / n as f64 - mean * mean;
    println!("\n{n} exact samples at the center: mean {mean:+.4}, variance {var:.4}");
}
