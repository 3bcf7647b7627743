//! A single heat-bath chain for the pinned field over a hard wall: watch
//! the contact fraction and the center height equilibrate.
//!
//! Run with: cargo run --release --example gibbs_chain

use wetting_lab::disorder::DisorderLaw;
use wetting_lab::lattice::OriginMode;
use wetting_lab::model::{Boundary, ModelParams, Wall};
use wetting_lab::sampler::GibbsChain;

fn main() {
    let params = ModelParams::new(
        3,
        8,
        OriginMode::Corner,
        0.5,
        0.5,
        Wall::Hard,
        Boundary::Constant(0.0),
        DisorderLaw::StandardGaussian,
        2024,
    )
    .unwrap();
    let interior = params.lattice.num_interior();
    let mut chain = GibbsChain::new(params, 5).unwrap();

    println!("sweep   contact   phi(center)");
    for block in 0..20 {
        chain.run_sweeps(50);
        println!(
            "{:>5}   {:.4}    {:+.4}",
            (block + 1) * 50,
            chain.contact_count() as f64 / interior as f64,
            chain.value_at(&[4, 4, 4])
        );
    }

    // Long-run averages after burn-in.
    let mut contact = 0.0;
    let mut height = 0.0;
    let samples = 2000;
    for _ in 0..samples {
        chain.run_sweeps(5);
        contact += chain.contact_count() as f64 / interior as f64;
        height += chain.value_at(&[4, 4, 4]);
    }
    println!(
        "\nstationary estimates over {samples} thinned samples: \
         contact {:.4}, center height {:+.4}",
        contact / samples as f64,
        height / samples as f64
    );
}
