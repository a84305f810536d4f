//! Acceptance criteria, one PASS/FAIL line each.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use proptest::strategy::Strategy;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use tachyon_core::fields::{fields_by_finite_difference, lienard_wiechert, FiniteDifference};
use tachyon_core::force::{epsilon_of_beta, pair_contributions, self_force, z_of_beta};
use tachyon_core::kinematics::vertex;
use tachyon_core::nullshell::{find_roots, root_count, singular_betas, singular_velocity_at};
use tachyon_core::precision::bits_for_digits;
use tachyon_core::{Model, NullRoot, PrecisionContext, Real, Side, Vec3};

const TABLE_I: [&str; 15] = [
    "4.603338848751701",
    "7.789705767492714",
    "10.94987986982622",
    "14.10169533046915",
    "17.24976556755881",
    "20.39583252184294",
    "23.54070189773618",
    "26.68479810180271",
    "29.82836607105987",
    "32.97155711433862",
    "36.11446976533017",
    "39.25717095448966",
    "42.39970774262564",
    "45.54211418676631",
    "48.68441554248154",
];

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn tachyon(args: &[&str]) -> (std::process::Output, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_tachyon")).args(args).output().expect("run tachyon");
    (out, start.elapsed())
}

fn ctx() -> PrecisionContext {
    PrecisionContext::default()
}

fn real(s: &str) -> Real {
    Real::parse(s, bits_for_digits(2000)).unwrap()
}

fn singular(count: u32) -> Vec<Real> {
    singular_betas(count, &ctx()).unwrap().into_iter().map(|s| s.beta).collect()
}

/// Integer mantissa of a 16-significant-digit decimal string.
fn mantissa(s: &str) -> i64 {
    s.chars().filter(char::is_ascii_digit).collect::<String>().trim_start_matches('0').parse().unwrap()
}

fn table_reproduction() -> Check {
    let (out, elapsed) = tachyon(&["singular-betas", "--count", "15", "--digits", "16"]);
    if !out.status.success() {
        return Err(format!("exit {:?}", out.status.code()));
    }
    let text = String::from_utf8(out.stdout).unwrap();
    let betas: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    if betas.len() != 15 {
        return Err(format!("{} rows", betas.len()));
    }
    let mut off = Vec::new();
    for (k, (got, want)) in betas.iter().zip(TABLE_I).enumerate() {
        let units = (mantissa(got) - mantissa(want)).abs();
        if units > 1 {
            off.push(format!("k={} {got} vs {want} ({units} units)", k + 1));
        }
    }
    let time = format!("{:.2}s", elapsed.as_secs_f64());
    if elapsed >= Duration::from_secs(10) {
        off.push(format!("runtime {time}"));
    }
    if off.is_empty() {
        Ok(format!("15/15 within 1 unit of the 16th digit, {time}"))
    } else {
        Err(format!("{}/15 rows off: {}", off.len(), off.join("; ")))
    }
}

fn staircase() -> Check {
    let c = ctx();
    let s = singular(15);
    let bits = bits_for_digits(64);
    let mut edges = vec![Real::one(bits)];
    edges.extend(s.iter().cloned());
    edges.push(&s[14] + Real::pi(bits));
    let mut checked = 0;
    for (i, w) in edges.windows(2).enumerate() {
        let mid = (&w[0] + &w[1]) / 2;
        let n = root_count(&mid, &c).map_err(|e| e.to_string())?;
        if n != 2 * i + 1 {
            return Err(format!("N({:.6}) = {n}, expected {}", mid.to_f64(), 2 * i + 1));
        }
        checked += 1;
    }
    let delta = Real::pow10(-4, bits);
    for (i, b) in s.iter().enumerate() {
        let below = root_count(&(b - &delta), &c).map_err(|e| e.to_string())?;
        let above = root_count(&(b + &delta), &c).map_err(|e| e.to_string())?;
        if below != 2 * i + 1 || above != 2 * i + 3 {
            return Err(format!("k={}: N = {below} below, {above} above", i + 1));
        }
        checked += 2;
    }
    Ok(format!("{checked} evaluations, N = 1, 3, ..., 31"))
}

fn k_tangency() -> Check {
    let bits = bits_for_digits(40);
    let bound = Real::pow10(-30, bits);
    let mut worst = Real::zero(bits);
    for k in 1..=15 {
        let s = singular_velocity_at(k, bits).map_err(|e| e.to_string())?;
        let root = NullRoot::new(&s.phi / &s.beta, &s.beta);
        let kf = vertex(&s.beta, &root, Side::Retarded).k_factor.abs();
        if kf >= bound {
            return Err(format!("k={k}: |K| = {:e}", kf.to_f64()));
        }
        worst = worst.max(kf);
    }
    let c = ctx();
    for k in 1..=15 {
        let s = singular_velocity_at(k, bits_for_digits(80)).unwrap();
        let beta = &s.beta + Real::pow10(-6, bits_for_digits(80));
        let roots = find_roots(&beta, &c).map_err(|e| e.to_string())?;
        let pair = roots
            .windows(2)
            .min_by(|a, b| (&a[1].tau - &a[0].tau).partial_cmp(&(&b[1].tau - &b[0].tau)).unwrap())
            .unwrap();
        let k0 = vertex(&beta, &pair[0], Side::Retarded).k_factor;
        let k1 = vertex(&beta, &pair[1], Side::Retarded).k_factor;
        if k0.signum() * k1.signum() != -1 {
            return Err(format!("k={k}: merging pair K = {:e}, {:e}", k0.to_f64(), k1.to_f64()));
        }
    }
    Ok(format!("max |K| = {} at 40 digits; opposite signs at beta_k + 1e-6 for k = 1..15", worst.to_sig_string(3)))
}

const FIVE_BETAS: [&str; 5] = ["2", "3", "6.2", "10", "18"];

fn fw_azimuthal_cancellation() -> Check {
    let bound = Real::pow10(-30, 128);
    let mut worst = Real::zero(128);
    for b in FIVE_BETAS {
        let r = self_force(&real(b), Model::FeynmanWheeler, &ctx()).map_err(|e| e.to_string())?;
        let ratio = r.azimuthal.abs() / r.radial.abs();
        if ratio >= bound {
            return Err(format!("beta {b}: ratio {}", ratio.to_sig_string(3)));
        }
        worst = worst.max(ratio);
    }
    Ok(format!("max |F_az|/|F_rad| = {}", worst.to_sig_string(3)))
}

fn model_radial_identity() -> Check {
    let bound = Real::pow10(-30, 128);
    for b in FIVE_BETAS {
        let fw = self_force(&real(b), Model::FeynmanWheeler, &ctx()).map_err(|e| e.to_string())?;
        let causal = self_force(&real(b), Model::Causal, &ctx()).map_err(|e| e.to_string())?;
        let rel = (&fw.radial - &causal.radial).abs() / fw.radial.abs();
        if rel >= bound {
            return Err(format!("beta {b}: relative difference {}", rel.to_sig_string(3)));
        }
    }
    Ok("causal and FW radial agree to 30 digits at all five betas".into())
}

fn coarse_repulsion() -> Check {
    let s = singular(6);
    let mut points = Vec::new();
    for w in s.windows(2) {
        for frac in [1, 3, 5, 7] {
            points.push(&w[0] + (&w[1] - &w[0]) * frac / 8);
        }
    }
    let mut max_z = f64::NEG_INFINITY;
    for p in &points {
        let z = z_of_beta(p, &ctx()).map_err(|e| e.to_string())?;
        if !z.is_negative() {
            return Err(format!("Z({:.6}) = {}", p.to_f64(), z.to_sig_string(6)));
        }
        max_z = max_z.max(z.to_f64());
    }
    Ok(format!("{} points in (beta_1, beta_6), max Z = {max_z:.4}", points.len()))
}

fn fine_structure() -> Check {
    let (out, elapsed) = tachyon(&["refine", "--k", "1", "--window", "1e-2", "--depth", "8", "--cap", "2000", "--format", "json"]);
    if !out.status.success() {
        return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let changes = v["sign_changes"].as_u64().unwrap();
    let rows = v["rows"].as_array().unwrap();
    let z: Vec<f64> = rows.iter().filter_map(|r| r["Z"].as_str()).map(|z| z.parse().unwrap()).collect();
    let (lo, hi) = z.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let detail = format!(
        "{changes} sign changes over {} rows, Z in [{lo:.6}, {hi:.6}], decade growth {}, {:.1}s",
        rows.len(),
        v["decade_growth"].as_str().unwrap_or("-"),
        elapsed.as_secs_f64()
    );
    if changes >= 2 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn causal_ratio() -> Check {
    let (out, _) = tachyon(&["sweep", "--beta-min", "2", "--beta-max", "21", "--points", "50", "--model", "causal"]);
    if !out.status.success() {
        return Err(format!("exit {:?}", out.status.code()));
    }
    let text = String::from_utf8(out.stdout).unwrap();
    let mut ok = 0;
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f[8] != "ok" {
            continue;
        }
        let eps: f64 = f[6].parse().unwrap();
        if eps <= 0.0 {
            return Err(format!("epsilon({}) = {}", f[0], f[6]));
        }
        ok += 1;
    }
    let e = |b| epsilon_of_beta(&real(b), &ctx()).unwrap();
    let (e3, e10, e20) = (e("3"), e("10"), e("20"));
    if !(e3 > e10 && e10 > e20) {
        return Err(format!("epsilon(3, 10, 20) = {}, {}, {}", e3.to_f64(), e10.to_f64(), e20.to_f64()));
    }
    Ok(format!("{ok}/50 ok rows positive; epsilon(3, 10, 20) = {:.4}, {:.4}, {:.4}", e3.to_f64(), e10.to_f64(), e20.to_f64()))
}

fn dense_scan_count(beta: f64) -> usize {
    let f = |t: f64| 2.0 - 2.0 * (beta * t).cos() - t * t;
    let step = std::f64::consts::PI / (64.0 * beta);
    let (mut t, mut count) = (step, 0);
    let mut prev = f(t);
    while t < 2.0 {
        t = (t + step).min(2.0);
        let cur = f(t);
        if cur == 0.0 || (prev > 0.0) != (cur > 0.0) {
            count += 1;
        }
        prev = cur;
    }
    count
}

fn oracle_suite() -> Check {
    let table: Vec<f64> = singular(15).iter().map(Real::to_f64).collect();
    let config = Config { cases: 100, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let betas = (1.05f64..25.0).prop_filter("near a singular velocity", move |b| table.iter().all(|s| (s - b).abs() >= 1e-3));
    runner
        .run(&betas, |beta| {
            let n = root_count(&Real::from_f64(beta, bits_for_digits(64)), &ctx()).unwrap();
            proptest::prop_assert_eq!(n, dense_scan_count(beta), "beta {}", beta);
            Ok(())
        })
        .map_err(|e| format!("(a) {e}"))?;

    let fd_ctx = PrecisionContext::new(60, 40, 2000).unwrap();
    let bits = fd_ctx.working_bits();
    let tol = Real::pow10(-8, bits);
    let rel = |a: &Vec3, b: &Vec3| (a - b).max_abs() / b.max_abs();
    for b in ["2", "3", "10"] {
        let beta = Real::parse(b, bits).unwrap();
        for root in find_roots(&beta, &fd_ctx).unwrap() {
            for side in [Side::Retarded, Side::Advanced] {
                let exact = lienard_wiechert(&vertex(&beta, &root, side)).unwrap();
                let fd = fields_by_finite_difference(&beta, &root, side, &FiniteDifference::default_at(bits), &fd_ctx)
                    .map_err(|e| format!("(b) beta {b}: {e}"))?;
                if rel(&fd.electric, &exact.electric) >= tol || rel(&fd.magnetic, &exact.magnetic) >= tol {
                    return Err(format!("(b) beta {b}: finite difference disagrees beyond 1e-8"));
                }
            }
        }
    }

    let coarse = PrecisionContext::new(64, 40, 2000).unwrap();
    let fine = PrecisionContext::new(128, 40, 2000).unwrap();
    for b in ["1.5", "2", "3", "6.2", "10", "18", "24.9"] {
        let z1 = z_of_beta(&real(b), &coarse).unwrap();
        let z2 = z_of_beta(&real(b), &fine).unwrap();
        if (&z1 - &z2).abs() >= Real::pow10(-40, 256) * z2.abs() {
            return Err(format!("(c) beta {b}: Z moved by more than 1e-40"));
        }
    }

    for b in ["2", "5", "7.1", "15.5", "21"] {
        for pair in pair_contributions(&real(b), &ctx()).unwrap() {
            let eps = Real::pow10(-40, 256) * pair.retarded.max_abs();
            if (&pair.retarded.x - &pair.advanced.x).abs() > eps || (&pair.retarded.y + &pair.advanced.y).abs() > eps {
                return Err(format!("(d) beta {b}: pair at tau {:.6} not mirrored", pair.root.tau.to_f64()));
            }
        }
    }
    Ok("(a) 100 random betas match the dense scan; (b) FD within 1e-8 at 2, 3, 10; (c) Z stable to 1e-40; (d) pairs mirrored".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("singular velocity table", table_reproduction),
        ("Root-count staircase", staircase),
        ("K tangency", k_tangency),
        ("FW azimuthal cancellation", fw_azimuthal_cancellation),
        ("Model radial identity", model_radial_identity),
        ("Coarse repulsion", coarse_repulsion),
        ("Fine-structure sign oscillation", fine_structure),
        ("Causal ratio positivity and decay", causal_ratio),
        ("Oracle suite", oracle_suite),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
