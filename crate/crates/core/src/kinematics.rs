//! Source-point geometry on the superluminal circle.
//!
//! The worldline is `x(t) = (cos βt, sin βt, 0)` in units r = c = 1. The
//! test point is fixed at angle 0, time 0, moving along +ŷ with speed β.
//! A null root τ gives a retarded source at angle −φ (time −τ) and its
//! mirror image, the advanced source, at angle +φ (time +τ).

use crate::error::{Error, Result};
use crate::nullshell::NullRoot;
use crate::precision::{Real, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Retarded,
    Advanced,
}

impl Side {
    /// +1 retarded, −1 advanced (the upper/lower sign in the field formulas).
    pub fn sign(self) -> i64 {
        match self {
            Side::Retarded => 1,
            Side::Advanced => -1,
        }
    }
}

/// Circular orbit traversed at speed β > 1 in normalized units.
#[derive(Clone, Debug)]
pub struct CircularWorldline {
    beta: Real,
}

impl CircularWorldline {
    pub fn new(beta: Real) -> Result<CircularWorldline> {
        if beta <= Real::one(64) {
            return Err(Error::InvalidBeta { beta: beta.to_sig_string(20), guard: "1".into() });
        }
        Ok(CircularWorldline { beta })
    }

    pub fn beta(&self) -> &Real {
        &self.beta
    }

    pub fn position_at_angle(&self, angle: &Real) -> Vec3 {
        Vec3::planar(angle.cos(), angle.sin())
    }

    pub fn velocity_at_angle(&self, angle: &Real) -> Vec3 {
        Vec3::planar(-(&self.beta * angle.sin()), &self.beta * angle.cos())
    }

    /// Centripetal acceleration, magnitude β².
    pub fn acceleration_at_angle(&self, angle: &Real) -> Vec3 {
        let b2 = self.beta.square();
        Vec3::planar(-(&b2 * angle.cos()), -(&b2 * angle.sin()))
    }

    /// Position of the charge at time t.
    pub fn position(&self, t: &Real) -> Vec3 {
        self.position_at_angle(&(&self.beta * t))
    }

    pub fn velocity(&self, t: &Real) -> Vec3 {
        self.velocity_at_angle(&(&self.beta * t))
    }

    pub fn acceleration(&self, t: &Real) -> Vec3 {
        self.acceleration_at_angle(&(&self.beta * t))
    }

    /// The test point (1, 0, 0).
    pub fn test_position(&self) -> Vec3 {
        let bits = self.beta.prec();
        Vec3::planar(Real::one(bits), Real::zero(bits))
    }

    /// The test velocity β ŷ.
    pub fn test_velocity(&self) -> Vec3 {
        Vec3::planar(Real::zero(self.beta.prec()), self.beta.clone())
    }
}

/// Kinematic data at one light-cone intersection.
#[derive(Clone, Debug)]
pub struct LightconeVertex {
    pub side: Side,
    pub root: NullRoot,
    pub beta: Real,
    pub src_position: Vec3,
    pub src_velocity: Vec3,
    pub src_accel: Vec3,
    /// Test point minus source point.
    pub separation: Vec3,
    pub distance: Real,
    pub nhat: Vec3,
    /// `1 ∓ n̂·β⃗_src` (upper sign retarded).
    pub k_factor: Real,
}

/// Builds the retarded or advanced source-point geometry for `root`.
///
/// K is taken from the dot-product definition rather than the closed form
/// `1 − β sin φ / τ`; the two agree on the circle.
pub fn vertex(beta: &Real, root: &NullRoot, side: Side) -> LightconeVertex {
    let world = CircularWorldline { beta: beta.clone() };
    let angle = match side {
        Side::Retarded => -&root.phi,
        Side::Advanced => root.phi.clone(),
    };
    let src_position = world.position_at_angle(&angle);
    let src_velocity = world.velocity_at_angle(&angle);
    let src_accel = world.acceleration_at_angle(&angle);
    let separation = &world.test_position() - &src_position;
    let distance = separation.norm();
    let nhat = separation.scale(&(1 / &distance));
    let k_factor = 1 - side.sign() * nhat.dot(&src_velocity);
    LightconeVertex {
        side,
        root: root.clone(),
        beta: beta.clone(),
        src_position,
        src_velocity,
        src_accel,
        separation,
        distance,
        nhat,
        k_factor,
    }
}

/// `1 − β sin φ / τ`, the closed form of K on the circle.
pub fn k_closed_form(beta: &Real, root: &NullRoot) -> Real {
    1 - beta * root.phi.sin() / &root.tau
}

/// Orbit radius, charge, rest mass and speed of light.
#[derive(Clone, Debug)]
pub struct PhysicalScale {
    pub r: Real,
    pub q: Real,
    pub m0: Real,
    pub c: Real,
}

impl PhysicalScale {
    pub fn new(r: Real, q: Real, m0: Real, c: Real) -> Result<PhysicalScale> {
        for (name, v) in [("r", &r), ("q", &q), ("m0", &m0), ("c", &c)] {
            if !v.is_positive() {
                return Err(Error::InvalidArgument(format!("{name} must be strictly positive")));
            }
        }
        Ok(PhysicalScale { r, q, m0, c })
    }

    pub fn unit(bits: usize) -> PhysicalScale {
        let one = Real::one(bits);
        PhysicalScale { r: one.clone(), q: one.clone(), m0: one.clone(), c: one }
    }
}

/// Which sign of the tachyon equation of motion admits the circular orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForceLaw {
    /// `F = d/dt (m₀V / √(V² − 1))`; needs an attractive force, Z > 0.
    Eq1,
    /// `F = −d/dt (m₀V / √(V² − 1))`; needs a repulsive force, Z < 0.
    Eq2,
}

/// Radius of the self-consistent circular orbit:
/// `√(β² − 1)·q²·|Z| / (m₀c²β²)`, with the equation of motion picked by sign(Z).
pub fn equilibrium_radius(beta: &Real, scale: &PhysicalScale, z: &Real) -> Result<(Real, ForceLaw)> {
    let resolution = Real::pow10(-(z.digits() as i32), z.prec());
    if z.abs() <= resolution {
        return Err(Error::ZeroZ);
    }
    let b2 = beta.square();
    let radius = (&b2 - 1).sqrt() * scale.q.square() * z.abs() / (&scale.m0 * scale.c.square() * b2);
    let law = if z.is_positive() { ForceLaw::Eq1 } else { ForceLaw::Eq2 };
    Ok((radius, law))
}
