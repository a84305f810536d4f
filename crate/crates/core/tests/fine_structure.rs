//! Behaviour of Z(β) just above the first singular velocity.

use tachyon_core::force::z_of_beta;
use tachyon_core::nullshell::singular_velocity_at;
use tachyon_core::precision::bits_for_digits;
use tachyon_core::sweep::refine_near_singularity;
use tachyon_core::{PrecisionContext, Real};

fn ctx() -> PrecisionContext {
    PrecisionContext::new(320, 40, 2000).unwrap()
}

fn beta_1() -> Real {
    singular_velocity_at(1, bits_for_digits(2000)).unwrap().beta
}

/// β₁ + 10^(−e/4) for e in `exps`.
fn above_beta_1(exps: impl Iterator<Item = i32>) -> Vec<Real> {
    let b1 = beta_1();
    let bits = b1.prec();
    let ln10 = Real::from_int(10, bits).ln();
    exps.map(|e| &b1 + (-(&ln10 * i64::from(e)) / 4).exp()).collect()
}

#[test]
fn some_z_is_attractive_above_beta_1() {
    let zs: Vec<Real> = above_beta_1(8..=40).iter().map(|b| z_of_beta(b, &ctx()).unwrap()).collect();
    let max = zs.iter().map(Real::to_f64).fold(f64::NEG_INFINITY, f64::max);
    assert!(zs.iter().any(Real::is_positive), "no Z > 0 in (beta_1, beta_1 + 1e-2); max Z = {max}");
}

#[test]
fn z_is_violent_just_above_beta_1() {
    let bits = bits_for_digits(64);
    let mut coarse: Vec<f64> = (0..9)
        .map(|i| z_of_beta(&(Real::from_int(2, bits) + Real::from_int(i, bits) / 4), &ctx()).unwrap().to_f64().abs())
        .collect();
    coarse.sort_by(f64::total_cmp);
    let median = coarse[4];
    let fine = above_beta_1(12..=36).iter().map(|b| z_of_beta(b, &ctx()).unwrap().to_f64().abs()).fold(0.0, f64::max);
    assert!(fine > 10.0 * median, "max |Z| above beta_1 = {fine}, median |Z| over (2, 4) = {median}");
}

#[test]
fn z_grows_tenfold_toward_beta_1() {
    let window = Real::parse("1e-2", 128).unwrap();
    let out = refine_near_singularity(1, &window, 8, &ctx(), 4).unwrap();
    let growth = out.decade_growth.unwrap().to_f64();
    assert!(growth >= 10.0, "innermost/outermost decade max |Z| = {growth}");
}
