//! Two independent determinations of the infinite-volume one-site variance
//! sigma_3^2: Richardson extrapolation of exact center-of-box variances,
//! and killed-random-walk visit counts.
//!
//! Run with: cargo run --release --example sigma3

use wetting_lab::rngutil;
use wetting_lab::sigma;

fn main() {
    let est = sigma::sigma_sq_spectral(3, &[4, 8, 12, 16, 24]).unwrap();
    println!("center-of-box variances c_L^2:");
    for (l, c) in &est.c_values {
        println!("  L = {l:>2}: {c:.6}");
    }
    println!(
        "extrapolated sigma_3^2 = {:.6} +- {:.1e}",
        est.value, est.error
    );
    println!(
        "walk-count normalization (2d x larger): {:.6}",
        est.walk_normalized
    );

    let mut rng = rngutil::stream(17, &[]);
    let (walk, se) = sigma::sigma_sq_walk_mc(3, (12, 24), 1_000_000, &mut rng);
    println!("killed-walk Monte Carlo:  {walk:.6} +- {se:.1e}");
    println!(
        "relative disagreement: {:.3}%",
        100.0 * (est.value - walk).abs() / est.value
    );
}
