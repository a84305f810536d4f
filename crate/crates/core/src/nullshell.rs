//! Light-cone self-intersections of the circular worldline.
//!
//! With the test point at angle 0 and the source a delay τ = c(t−t′)/r in
//! the past, the null condition on the unit circle is
//! `f(τ, β) = 2 − 2cos(βτ) − τ² = 0`. Every root lies in (0, 2] because
//! `2 − 2cos ≤ 4`.
//!
//! Root isolation is exhaustive rather than heuristic:
//!
//! * `f′(τ) = 2β sin(βτ) − 2τ` is negative on every half-period where
//!   `sin(βτ) ≤ 0`, so `f` is strictly decreasing there.
//! * On a half-period `[2mπ/β, (2m+1)π/β]` the term `β sin(βτ)` is concave,
//!   so `f′` is concave with its maximum where `cos(βτ) = 1/β²`. If that
//!   maximum is positive, `f′` has exactly one zero on each side of it;
//!   otherwise none.
//!
//! That yields every extremum of `f` in closed form up to a monotone 1-D
//! solve, and `f` is monotone between consecutive extrema, so each segment
//! holds at most one root and a sign test decides whether it does.
//!
//! The singular velocities are where a local maximum of `f` touches zero:
//! `f = ∂f/∂τ = 0` reduces to `h(φ) = 2 − 2cos φ − φ sin φ = 0` with φ = βτ
//! and `β = √(φ / sin φ)`.

use crate::error::{Error, Result};
use crate::precision::{bits_for_digits, digits_for_bits, stabilize, Converges, PrecisionContext, Real};

/// Roots closer than this are flagged [`Multiplicity::NearDouble`].
pub const NEAR_DOUBLE_GAP: f64 = 1e-4;

/// Default lower guard on β, as the offset above 1 (β must exceed 1 + 10⁻⁶).
pub const DEFAULT_GUARD_EXPONENT: i32 = -6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Multiplicity {
    Simple,
    /// Adjacent root closer than [`NEAR_DOUBLE_GAP`]; β is close to a singular velocity.
    NearDouble,
}

/// One positive root of the null condition.
#[derive(Clone, Debug, PartialEq)]
pub struct NullRoot {
    /// Dimensionless delay τ = c(t−t′)/r.
    pub tau: Real,
    /// Swept angle φ = βτ in radians.
    pub phi: Real,
    pub multiplicity: Multiplicity,
}

impl NullRoot {
    pub fn new(tau: Real, beta: &Real) -> NullRoot {
        let phi = &tau * beta;
        NullRoot { tau, phi, multiplicity: Multiplicity::Simple }
    }
}

/// A speed at which two null roots merge tangentially.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularVelocity {
    pub index: u32,
    /// Root of [`h_tangency`] in (2kπ, (2k+1)π).
    pub phi: Real,
    pub beta: Real,
}

impl Converges for SingularVelocity {
    fn relative_change(&self, finer: &Self, floor: &Real) -> Option<Real> {
        self.beta.relative_change(&finer.beta, floor)
    }
}

/// `2 − 2cos(βτ) − τ²`.
pub fn f_null(tau: &Real, beta: &Real) -> Real {
    2 - 2 * (beta * tau).cos() - tau.square()
}

fn f_prime(tau: &Real, beta: &Real) -> Real {
    2 * (beta * (beta * tau).sin() - tau)
}

fn f_second(tau: &Real, beta: &Real) -> Real {
    2 * (beta.square() * (beta * tau).cos() - 1)
}

/// `2 − 2cos φ − φ sin φ`; zero exactly where a null root is double.
pub fn h_tangency(phi: &Real) -> Real {
    2 - 2 * phi.cos() - phi * phi.sin()
}

fn h_prime(phi: &Real) -> Real {
    phi.sin() - phi * phi.cos()
}

/// Newton iteration with bisection fallback on a bracket whose endpoints
/// have opposite signs. `eval` returns (g, g′). Stops once the step is
/// below `rel_tol·|x|`.
pub(crate) fn bracketed_newton<F>(eval: F, a: &Real, b: &Real, rel_tol: &Real, what: &str) -> Result<Real>
where
    F: Fn(&Real) -> (Real, Real),
{
    let (ga, _) = eval(a);
    let (gb, _) = eval(b);
    if ga.is_zero() {
        return Ok(a.clone());
    }
    if gb.is_zero() {
        return Ok(b.clone());
    }
    if ga.signum() == gb.signum() {
        return Err(Error::NoConvergence(format!("{what}: bracket without sign change")));
    }
    // orient so that g(lo) < 0 < g(hi)
    let (mut lo, mut hi) = if ga.is_negative() { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    let mut x = (a + b) / 2;
    let mut dx_old = (b - a).abs();
    let mut dx = dx_old.clone();
    let (mut g, mut dg) = eval(&x);
    let max_iter = a.prec().max(b.prec()) + 200;
    for _ in 0..max_iter {
        let newton_outside = ((&x - &hi) * &dg - &g) * ((&x - &lo) * &dg - &g) > Real::zero(64);
        let too_slow = (2 * &g).abs() > (&dx_old * &dg).abs();
        if newton_outside || too_slow || dg.is_zero() {
            dx_old = dx;
            dx = (&hi - &lo) / 2;
            x = &lo + &dx;
        } else {
            dx_old = dx;
            dx = &g / &dg;
            x = &x - &dx;
        }
        if dx.abs() <= rel_tol * x.abs() {
            return Ok(x);
        }
        (g, dg) = eval(&x);
        if g.is_zero() {
            return Ok(x);
        }
        if g.is_negative() {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
    }
    Err(Error::NoConvergence(what.to_string()))
}

fn check_guard(beta: &Real, guard: &Real) -> Result<()> {
    if beta <= guard {
        return Err(Error::InvalidBeta {
            beta: beta.to_sig_string(20),
            guard: guard.to_sig_string(10),
        });
    }
    Ok(())
}

/// Rejects β at or below the default guard 1 + 10⁻⁶.
pub fn check_beta(beta: &Real, ctx: &PrecisionContext) -> Result<()> {
    check_guard(beta, &default_guard(ctx.working_bits()))
}

/// The default lower guard 1 + 10⁻⁶ at `bits`.
pub fn default_guard(bits: usize) -> Real {
    1 + Real::pow10(DEFAULT_GUARD_EXPONENT, bits)
}

/// All extrema of f in (0, 2), ascending.
fn extrema(beta: &Real) -> Result<Vec<Real>> {
    let bits = beta.prec();
    let tol = Real::pow10(-(digits_for_bits(bits) as i32) + 5, bits);
    let pi = Real::pi(bits);
    let two = Real::from_int(2, bits);
    // f'' = 0 where βτ = 2mπ + acos(1/β²)
    let peak_offset = (1 / beta.square()).acos();
    let fp = |t: &Real| (f_prime(t, beta), f_second(t, beta));
    let mut out = Vec::new();
    let mut m: i64 = 0;
    loop {
        let start = &pi * (2 * m) / beta;
        if start >= two {
            break;
        }
        let end = &pi * (2 * m + 1) / beta;
        let peak = (&pi * (2 * m) + &peak_offset) / beta;
        let peak_value = f_prime(&peak, beta);
        if peak_value.is_positive() {
            if m > 0 {
                out.push(bracketed_newton(fp, &start, &peak, &tol, "rising extremum of f")?);
            }
            out.push(bracketed_newton(fp, &peak, &end, &tol, "falling extremum of f")?);
        }
        m += 1;
    }
    out.retain(|t| t < &two);
    Ok(out)
}

/// Roots at the precision carried by `beta`, without escalation.
///
/// Fails with [`Error::NearSingularBeta`] when an interior extremum of f is
/// too close to zero for its sign to be trusted at this precision.
pub fn roots_at(beta: &Real) -> Result<Vec<NullRoot>> {
    let bits = beta.prec();
    let digits = digits_for_bits(bits) as i32;
    let tol = Real::pow10(-digits + 5, bits);
    let ambiguous = Real::pow10(-digits + 10, bits);
    let two = Real::from_int(2, bits);

    let mut breaks = extrema(beta)?;
    // the first extremum bounds the rising segment starting at τ = 0, which
    // holds no root; every later extremum must have a decidable sign
    for t in breaks.iter().skip(1) {
        if f_null(t, beta).abs() <= ambiguous {
            return Err(Error::NearSingularBeta { beta: beta.to_sig_string(30) });
        }
    }
    breaks.push(two);

    let exclusion = Real::pow10(-3, bits) / beta;
    let f = |t: &Real| (f_null(t, beta), f_prime(t, beta));
    let mut roots = Vec::new();
    for pair in breaks.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let (fa, fb) = (f_null(a, beta), f_null(b, beta));
        if fa.signum() * fb.signum() <= 0 && !fa.is_zero() {
            let tau = bracketed_newton(f, a, b, &tol, "null root")?;
            if tau >= exclusion {
                roots.push(NullRoot::new(tau, beta));
            }
        }
    }

    let gap = Real::from_f64(NEAR_DOUBLE_GAP, bits);
    for i in 1..roots.len() {
        if &roots[i].tau - &roots[i - 1].tau < gap {
            roots[i].multiplicity = Multiplicity::NearDouble;
            roots[i - 1].multiplicity = Multiplicity::NearDouble;
        }
    }
    Ok(roots)
}

/// Every root of the null condition in (0, 2], ascending.
///
/// Starts at `ctx.working_digits` and doubles the precision while the
/// sign of a near-zero extremum is undecidable.
pub fn find_roots(beta: &Real, ctx: &PrecisionContext) -> Result<Vec<NullRoot>> {
    find_roots_guarded(beta, ctx, &default_guard(ctx.working_bits()))
}

/// [`find_roots`] with an explicit lower guard on β.
pub fn find_roots_guarded(beta: &Real, ctx: &PrecisionContext, guard: &Real) -> Result<Vec<NullRoot>> {
    check_guard(beta, guard)?;
    for digits in ctx.levels() {
        match roots_at(&beta.with_prec(bits_for_digits(digits))) {
            Err(Error::NearSingularBeta { .. }) => continue,
            other => return other,
        }
    }
    Err(Error::NearSingularBeta { beta: beta.to_sig_string(30) })
}

/// N(β), the number of positive null roots. Always odd.
pub fn root_count(beta: &Real, ctx: &PrecisionContext) -> Result<usize> {
    find_roots(beta, ctx).map(|r| r.len())
}

/// k-th singular velocity at the precision `bits`, without stabilization.
pub fn singular_velocity_at(k: u32, bits: usize) -> Result<SingularVelocity> {
    if k == 0 {
        return Err(Error::InvalidArgument("singular velocity index starts at 1".into()));
    }
    let pi = Real::pi(bits);
    // h is convex on (2kπ, (2k+1)π) (h″ = φ sin φ > 0) with h(2kπ) = 0,
    // h′(2kπ) = −2kπ and h((2k+1)π) = 4: exactly one root, right of 2kπ + π/8.
    let lo = &pi * (2 * i64::from(k)) + &pi / 8;
    let hi = &pi * (2 * i64::from(k) + 1);
    let tol = Real::pow10(-(digits_for_bits(bits) as i32) + 5, bits);
    let phi = bracketed_newton(|p| (h_tangency(p), h_prime(p)), &lo, &hi, &tol, "tangency angle")?;
    let beta = (&phi / phi.sin()).sqrt();
    Ok(SingularVelocity { index: k, phi, beta })
}

/// The first `count` singular velocities, each stabilized to `ctx.target_digits`.
pub fn singular_betas(count: u32, ctx: &PrecisionContext) -> Result<Vec<SingularVelocity>> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    (1..=count)
        .map(|k| stabilize(ctx, |d| singular_velocity_at(k, bits_for_digits(d))).map(|s| s.value))
        .collect()
}
