//! Liénard–Wiechert fields of the circulating charge at the test point.
//!
//! With s = +1 (retarded) or −1 (advanced), source velocity β⃗ and
//! acceleration β̇⃗ evaluated at the source time:
//!
//! ```text
//! E = (n̂ − sβ⃗)(1 − β²) / (K³R²) + n̂ × ((n̂ − sβ⃗) × β̇⃗) / (K³R)
//! B = s n̂ × E
//! ```
//!
//! K keeps its sign. For β > 1 the velocity term flips sign with K, which
//! is what makes the contributions of a merging root pair cancel.
//!
//! [`fields_by_finite_difference`] recomputes E and B from the potentials
//! `Φ = 1/(KR)`, `A = β⃗/(KR)` by numerically differentiating them at
//! displaced test points, solving the light-cone condition afresh at each.

use crate::error::{Error, Result};
use crate::kinematics::{CircularWorldline, LightconeVertex, Side};
use crate::nullshell::NullRoot;
use crate::precision::{digits_for_bits, PrecisionContext, Real, Vec3};

#[derive(Clone, Debug)]
pub struct FieldSample {
    pub electric: Vec3,
    pub magnetic: Vec3,
    pub side: Side,
    pub source_root: NullRoot,
}

#[derive(Clone, Debug)]
pub struct Potentials {
    pub scalar: Real,
    pub vector: Vec3,
}

fn check_cone(k: &Real) -> Result<()> {
    let limit = Real::pow10(-(digits_for_bits(k.prec()) as i32) / 2, k.prec());
    if k.abs() < limit {
        return Err(Error::SingularCone { k: k.to_sig_string(6) });
    }
    Ok(())
}

pub fn lienard_wiechert(v: &LightconeVertex) -> Result<FieldSample> {
    check_cone(&v.k_factor)?;
    let s = v.side.sign();
    let u = &v.nhat - &(&v.src_velocity * s);
    let k3 = v.k_factor.square() * &v.k_factor;
    let velocity_coeff = (1 - v.beta.square()) / (&k3 * v.distance.square());
    let accel_coeff = 1 / (&k3 * &v.distance);
    let velocity_term = u.scale(&velocity_coeff);
    let accel_term = v.nhat.cross(&u.cross(&v.src_accel)).scale(&accel_coeff);
    let electric = velocity_term + accel_term;
    let magnetic = &v.nhat.cross(&electric) * s;
    Ok(FieldSample { electric, magnetic, side: v.side, source_root: v.root.clone() })
}

pub fn potentials(v: &LightconeVertex) -> Result<Potentials> {
    check_cone(&v.k_factor)?;
    let scalar = 1 / (&v.k_factor * &v.distance);
    let vector = v.src_velocity.scale(&scalar);
    Ok(Potentials { scalar, vector })
}

/// `q[E + v × B]` with q = c = 1. Superluminal `test_velocity` is allowed.
pub fn lorentz_force(sample: &FieldSample, test_velocity: &Vec3) -> Vec3 {
    &sample.electric + &test_velocity.cross(&sample.magnetic)
}

/// Source geometry for an arbitrary test event (point, time) and delay.
struct OffCircleVertex {
    velocity: Vec3,
    distance: Real,
    k_factor: Real,
}

fn off_circle_vertex(world: &CircularWorldline, point: &Vec3, time: &Real, delay: &Real, side: Side) -> OffCircleVertex {
    let source_time = time - delay * side.sign();
    let separation = point - &world.position(&source_time);
    let distance = separation.norm();
    let nhat = separation.scale(&(1 / &distance));
    let velocity = world.velocity(&source_time);
    let k_factor = 1 - side.sign() * nhat.dot(&velocity);
    OffCircleVertex { velocity, distance, k_factor }
}

/// Delay solving `|P − x(T − s·d)| = d` near `seed_tau`, by damped Newton.
///
/// The derivative of the residual in d is −K, so the sign of K cannot
/// change along a converging run; a sign flip means the iteration crossed
/// into the basin of the partner root and is reported as
/// [`Error::NoConvergence`].
pub fn retarded_time_near(test_point: &Vec3, test_time: &Real, beta: &Real, seed_tau: &Real, side: Side) -> Result<Real> {
    let world = CircularWorldline::new(beta.clone())?;
    let bits = beta.prec();
    let tol = Real::pow10(-(digits_for_bits(bits) as i32) + 5, bits);
    let residual = |d: &Real| {
        let v = off_circle_vertex(&world, test_point, test_time, d, side);
        (&v.distance - d, v.k_factor)
    };
    let mut d = seed_tau.clone();
    let (mut g, mut k) = residual(&d);
    let seed_sign = k.signum();
    for _ in 0..200 {
        if k.is_zero() {
            break;
        }
        // g' = −K
        let step = &g / &k;
        let mut scale = Real::one(bits);
        let mut accepted = None;
        for _ in 0..60 {
            let trial = &d + &step * &scale;
            if trial.is_positive() {
                let (gt, kt) = residual(&trial);
                if gt.abs() < g.abs() || gt.is_zero() {
                    accepted = Some((trial, gt, kt));
                    break;
                }
            }
            scale = scale / 2;
        }
        let Some((next, gn, kn)) = accepted else {
            if g.abs() <= &tol * d.abs() {
                return Ok(d);
            }
            return Err(Error::NoConvergence("light-cone delay: step reduction exhausted".into()));
        };
        let moved = (&next - &d).abs();
        d = next;
        g = gn;
        k = kn;
        if k.signum() != seed_sign {
            return Err(Error::NoConvergence("light-cone delay left the seed basin".into()));
        }
        if moved <= &tol * d.abs() {
            return Ok(d);
        }
    }
    Err(Error::NoConvergence("light-cone delay".into()))
}

/// Step size and extrapolation for [`fields_by_finite_difference`].
#[derive(Clone, Debug)]
pub struct FiniteDifference {
    pub step: Real,
    /// One level of Richardson extrapolation over steps h and h/2.
    pub richardson: bool,
}

impl FiniteDifference {
    pub fn new(step: Real, richardson: bool) -> FiniteDifference {
        FiniteDifference { step, richardson }
    }

    /// Step 10⁻¹⁰ with one Richardson level.
    pub fn default_at(bits: usize) -> FiniteDifference {
        FiniteDifference { step: Real::pow10(-10, bits), richardson: true }
    }
}

/// Space and time derivatives of (Φ, A): `grad_phi[j] = ∂Φ/∂x_j`,
/// `jac_a[i][j] = ∂A_i/∂x_j`, `dt_a[i] = ∂A_i/∂t`.
struct PotentialDerivatives {
    grad_phi: [Real; 3],
    jac_a: [[Real; 3]; 3],
    dt_a: [Real; 3],
}

impl PotentialDerivatives {
    fn combine(&self, other: &PotentialDerivatives, f: impl Fn(&Real, &Real) -> Real) -> PotentialDerivatives {
        PotentialDerivatives {
            grad_phi: std::array::from_fn(|j| f(&self.grad_phi[j], &other.grad_phi[j])),
            jac_a: std::array::from_fn(|i| std::array::from_fn(|j| f(&self.jac_a[i][j], &other.jac_a[i][j]))),
            dt_a: std::array::from_fn(|i| f(&self.dt_a[i], &other.dt_a[i])),
        }
    }

    fn into_fields(self) -> (Vec3, Vec3) {
        let [gx, gy, gz] = self.grad_phi;
        let [ax, ay, az] = self.dt_a;
        let electric = Vec3::new(-gx - ax, -gy - ay, -gz - az);
        let j = &self.jac_a;
        let magnetic = Vec3::new(&j[2][1] - &j[1][2], &j[0][2] - &j[2][0], &j[1][0] - &j[0][1]);
        (electric, magnetic)
    }
}

fn potential_at(world: &CircularWorldline, point: &Vec3, time: &Real, seed: &Real, side: Side) -> Result<(Real, [Real; 3])> {
    let delay = retarded_time_near(point, time, world.beta(), seed, side)?;
    let v = off_circle_vertex(world, point, time, &delay, side);
    check_cone(&v.k_factor)?;
    let phi = 1 / (&v.k_factor * &v.distance);
    let a = v.velocity.scale(&phi);
    Ok((phi, [a.x, a.y, a.z]))
}

fn central_derivatives(world: &CircularWorldline, root: &NullRoot, side: Side, h: &Real) -> Result<PotentialDerivatives> {
    let bits = world.beta().prec();
    let origin = world.test_position();
    let zero = Real::zero(bits);
    let two_h = h * 2;
    let axis = |j: usize, sign: i64| {
        let mut p = origin.clone();
        let shift = h * sign;
        match j {
            0 => p.x = &p.x + shift,
            1 => p.y = &p.y + shift,
            _ => p.z = &p.z + shift,
        }
        p
    };
    let mut grad_phi: [Real; 3] = std::array::from_fn(|_| zero.clone());
    let mut jac_a: [[Real; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| zero.clone()));
    for j in 0..3 {
        let (phi_p, a_p) = potential_at(world, &axis(j, 1), &zero, &root.tau, side)?;
        let (phi_m, a_m) = potential_at(world, &axis(j, -1), &zero, &root.tau, side)?;
        grad_phi[j] = (phi_p - phi_m) / &two_h;
        for i in 0..3 {
            jac_a[i][j] = (&a_p[i] - &a_m[i]) / &two_h;
        }
    }
    let (_, a_later) = potential_at(world, &origin, h, &root.tau, side)?;
    let (_, a_earlier) = potential_at(world, &origin, &-h, &root.tau, side)?;
    let dt_a = std::array::from_fn(|i| (&a_later[i] - &a_earlier[i]) / &two_h);
    Ok(PotentialDerivatives { grad_phi, jac_a, dt_a })
}

/// E = −∇Φ − ∂A/∂t and B = ∇ × A by central differences of the potentials.
pub fn fields_by_finite_difference(
    beta: &Real,
    root: &NullRoot,
    side: Side,
    scheme: &FiniteDifference,
    ctx: &PrecisionContext,
) -> Result<FieldSample> {
    let bits = ctx.working_bits();
    let world = CircularWorldline::new(beta.with_prec(bits))?;
    let root = NullRoot {
        tau: root.tau.with_prec(bits),
        phi: root.phi.with_prec(bits),
        multiplicity: root.multiplicity,
    };
    let h = scheme.step.with_prec(bits);
    let coarse = central_derivatives(&world, &root, side, &h)?;
    let derivatives = if scheme.richardson {
        let fine = central_derivatives(&world, &root, side, &(&h / 2))?;
        fine.combine(&coarse, |f, c| (4 * f - c) / 3)
    } else {
        coarse
    };
    let (electric, magnetic) = derivatives.into_fields();
    Ok(FieldSample { electric, magnetic, side, source_root: root })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::vertex;
    use crate::nullshell::{find_roots, singular_velocity_at};
    use crate::precision::bits_for_digits;

    fn real(s: &str, bits: usize) -> Real {
        Real::parse(s, bits).unwrap()
    }

    fn rel_diff(a: &Vec3, b: &Vec3) -> Real {
        (a - b).max_abs() / b.max_abs()
    }

    #[test]
    fn magnetic_field_is_transverse() {
        let ctx = PrecisionContext::default();
        let bits = ctx.working_bits();
        let eps = Real::pow10(-55, bits);
        for b in ["2", "6.2", "13"] {
            let beta = real(b, bits);
            for root in find_roots(&beta, &ctx).unwrap() {
                for side in [Side::Retarded, Side::Advanced] {
                    let v = vertex(&beta, &root, side);
                    let f = lienard_wiechert(&v).unwrap();
                    let scale = f.electric.norm_sq();
                    assert!(f.magnetic.dot(&v.nhat).abs() <= &eps * f.magnetic.norm());
                    assert!(f.magnetic.dot(&f.electric).abs() <= &eps * &scale);
                    let expected = &v.nhat.cross(&f.electric) * side.sign();
                    assert_eq!(f.magnetic, expected);
                    assert!((f.magnetic.norm() - v.nhat.cross(&f.electric).norm()).abs() <= &eps * scale.sqrt());
                }
            }
        }
    }

    #[test]
    fn velocity_term_sign_opposes_k_cubed() {
        let ctx = PrecisionContext::default();
        let s = singular_velocity_at(1, ctx.working_bits()).unwrap();
        let beta = &s.beta + real("1e-3", ctx.working_bits());
        for root in find_roots(&beta, &ctx).unwrap() {
            let v = vertex(&beta, &root, Side::Retarded);
            let coeff = (1 - beta.square()) / (v.k_factor.square() * &v.k_factor * v.distance.square());
            assert_eq!(coeff.signum(), -v.k_factor.signum());
        }
    }

    #[test]
    fn potential_identities() {
        let bits = bits_for_digits(64);
        let beta = real("3", bits);
        let root = find_roots(&beta, &PrecisionContext::default()).unwrap().remove(0);
        let v = vertex(&beta, &root, Side::Retarded);
        let p = potentials(&v).unwrap();
        assert_eq!(p.vector, v.src_velocity.scale(&p.scalar));
        // K = R = 1 gives Φ = 1, and Φ scales as 1/R at fixed K
        let mut unit = v.clone();
        unit.k_factor = Real::one(bits);
        unit.distance = Real::one(bits);
        assert_eq!(potentials(&unit).unwrap().scalar, Real::one(bits));
        unit.distance = Real::from_int(4, bits);
        assert_eq!(potentials(&unit).unwrap().scalar, real("0.25", bits));
    }

    #[test]
    fn cone_singularity_rejected() {
        let bits = bits_for_digits(40);
        let s = singular_velocity_at(1, bits).unwrap();
        let root = NullRoot::new(&s.phi / &s.beta, &s.beta);
        let v = vertex(&s.beta, &root, Side::Retarded);
        assert!(matches!(lienard_wiechert(&v), Err(Error::SingularCone { .. })));
        assert!(matches!(potentials(&v), Err(Error::SingularCone { .. })));
    }

    #[test]
    fn lorentz_force_cases() {
        let b = 128;
        let zero = Vec3::zero(b);
        let root = NullRoot::new(Real::one(b), &Real::one(b));
        let e = Vec3::planar(real("0.3", b), real("-2", b));
        let sample = FieldSample { electric: e.clone(), magnetic: zero.clone(), side: Side::Retarded, source_root: root.clone() };
        assert_eq!(lorentz_force(&sample, &Vec3::planar(Real::zero(b), real("5", b))), e);
        let zhat = Vec3::new(Real::zero(b), Real::zero(b), Real::one(b));
        let sample = FieldSample { electric: zero, magnetic: zhat, side: Side::Advanced, source_root: root };
        let beta = real("7", b);
        let f = lorentz_force(&sample, &Vec3::planar(Real::zero(b), beta.clone()));
        assert_eq!(f, Vec3::planar(beta, Real::zero(b)));
    }

    #[test]
    fn delay_solver_reproduces_on_circle_roots() {
        let ctx = PrecisionContext::default();
        let bits = ctx.working_bits();
        let beta = real("10", bits);
        let origin = Vec3::planar(Real::one(bits), Real::zero(bits));
        let zero = Real::zero(bits);
        for root in find_roots(&beta, &ctx).unwrap() {
            for side in [Side::Retarded, Side::Advanced] {
                let seed = &root.tau + real("1e-6", bits);
                let d = retarded_time_near(&origin, &zero, &beta, &seed, side).unwrap();
                assert!((&d - &root.tau).abs() <= Real::pow10(-55, bits));
            }
        }
    }

    #[test]
    fn delay_responds_linearly_to_tiny_displacement() {
        let ctx = PrecisionContext::new(80, 60, 2000).unwrap();
        let bits = ctx.working_bits();
        let beta = real("3", bits);
        let root = find_roots(&beta, &ctx).unwrap().remove(0);
        let zero = Real::zero(bits);
        let origin = Vec3::planar(Real::one(bits), Real::zero(bits));
        let shifted = Vec3::planar(1 + real("1e-20", bits), Real::zero(bits));
        let d0 = retarded_time_near(&origin, &zero, &beta, &root.tau, Side::Retarded).unwrap();
        let d1 = retarded_time_near(&shifted, &zero, &beta, &root.tau, Side::Retarded).unwrap();
        let shift = (d1 - d0).abs();
        assert!(shift.is_positive());
        assert!(shift < real("1e-18", bits) && shift > real("1e-22", bits), "shift {shift}");
    }

    #[test]
    fn delay_solver_near_double_root_keeps_basin() {
        let ctx = PrecisionContext::default();
        let bits = ctx.working_bits();
        let s = singular_velocity_at(1, bits).unwrap();
        let beta = &s.beta + real("1e-6", bits);
        let roots = find_roots(&beta, &ctx).unwrap();
        let zero = Real::zero(bits);
        let displaced = Vec3::planar(1 + real("1e-4", bits), real("1e-4", bits));
        for root in &roots[1..] {
            let seed_k = vertex(&beta, root, Side::Retarded).k_factor;
            match retarded_time_near(&displaced, &zero, &beta, &root.tau, Side::Retarded) {
                Ok(d) => {
                    let world = CircularWorldline::new(beta.clone()).unwrap();
                    let v = off_circle_vertex(&world, &displaced, &zero, &d, Side::Retarded);
                    assert_eq!(v.k_factor.signum(), seed_k.signum());
                }
                Err(e) => assert!(matches!(e, Error::NoConvergence(_))),
            }
        }
    }

    #[test]
    fn finite_difference_matches_closed_form_at_beta_3() {
        let ctx = PrecisionContext::new(60, 40, 2000).unwrap();
        let bits = ctx.working_bits();
        let beta = real("3", bits);
        let tol = Real::pow10(-8, bits);
        for root in find_roots(&beta, &ctx).unwrap() {
            for side in [Side::Retarded, Side::Advanced] {
                let exact = lienard_wiechert(&vertex(&beta, &root, side)).unwrap();
                let fd = fields_by_finite_difference(&beta, &root, side, &FiniteDifference::default_at(bits), &ctx).unwrap();
                assert!(rel_diff(&fd.electric, &exact.electric) < tol);
                assert!(rel_diff(&fd.magnetic, &exact.magnetic) < tol);
            }
        }
    }

    #[test]
    fn central_difference_error_is_second_order() {
        let ctx = PrecisionContext::new(60, 40, 2000).unwrap();
        let bits = ctx.working_bits();
        let beta = real("3", bits);
        let root = find_roots(&beta, &ctx).unwrap().remove(0);
        let exact = lienard_wiechert(&vertex(&beta, &root, Side::Retarded)).unwrap();
        let err = |h: &str| {
            let scheme = FiniteDifference::new(real(h, bits), false);
            let fd = fields_by_finite_difference(&beta, &root, Side::Retarded, &scheme, &ctx).unwrap();
            rel_diff(&fd.electric, &exact.electric).to_f64()
        };
        let ratio = err("1e-3") / err("5e-4");
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }
}
