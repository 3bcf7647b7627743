//! Standard-normal utilities: density, CDF, survival function, quantiles
//! and the classical tail asymptote.
//!
//! Everything is built on `libm::erfc`, which stays accurate far into the
//! tails (survival probabilities down to ~1e-300), so ratios of very small
//! tail masses are meaningful.

/// 1 / sqrt(2 pi)
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Standard normal density.
#[inline]
pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// P(N <= x).
#[inline]
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Upper tail P(N > x). Preferred over `1.0 - cdf(x)` for x >> 0.
#[inline]
pub fn sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// P(a < N < b) computed tail-stably for any ordering of magnitudes.
#[inline]
pub fn interval_mass(a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    // Difference of survival functions keeps precision when both endpoints
    // sit in the same far tail.
    (sf(a) - sf(b)).max(0.0)
}

/// The classical large-t tail estimate exp(-t^2/2) / (t sqrt(2 pi)).
///
/// For t > 0 this overestimates `sf(t)`; the ratio sf/asymptote increases
/// to 1 as t grows.
#[inline]
pub fn sf_asymptote(t: f64) -> f64 {
    assert!(t > 0.0, "tail asymptote requires t > 0");
    (-0.5 * t * t).exp() / (t * (2.0 * std::f64::consts::PI).sqrt())
}

/// Inverse of `cdf`, accurate to ~1e-15 after one Halley refinement of
/// Acklam's rational initial guess.
pub fn inv_cdf(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile needs p in (0,1), got {p}");
    let x = acklam(p);
    // Halley step on f(x) = cdf(x) - p.
    let e = cdf(x) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Inverse of `sf`: the t with P(N > t) = p, stable for tiny p.
pub fn inv_sf(p: f64) -> f64 {
    -inv_cdf(p)
}

// Acklam's rational approximation to the normal quantile (abs err < 1.2e-8
// before refinement).
fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_690e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -acklam(1.0 - p)
    }
}

/// Draw from a standard normal truncated to (a, b), given a uniform u in
/// (0,1). Monotone in u; works in either tail without cancellation.
///
/// Bounds may be infinite. Requires interval_mass(a, b) > 0 in f64.
pub fn truncated_inv_cdf(a: f64, b: f64, u: f64) -> f64 {
    debug_assert!(a < b);
    debug_assert!((0.0..=1.0).contains(&u));
    // Work with survival probabilities: sf decreases, so map u through
    // p = sf(a) - u * (sf(a) - sf(b)) and invert.
    let sa = sf(a);
    let sb = sf(b);
    let p = sa - u * (sa - sb);
    let x = if p <= 0.0 {
        b
    } else if p >= 1.0 {
        a
    } else {
        inv_sf(p)
    };
    x.clamp(a, b)
}
