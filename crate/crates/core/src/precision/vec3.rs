use std::ops::{Add, Mul, Neg, Sub};

use super::Real;

/// Cartesian 3-vector over [`Real`].
#[derive(Clone, Debug, PartialEq)]
pub struct Vec3 {
    pub x: Real,
    pub y: Real,
    pub z: Real,
}

impl Vec3 {
    pub fn new(x: Real, y: Real, z: Real) -> Vec3 {
        Vec3 { x, y, z }
    }

    /// In-plane vector (z = 0).
    pub fn planar(x: Real, y: Real) -> Vec3 {
        let z = Real::zero(x.prec());
        Vec3 { x, y, z }
    }

    pub fn zero(bits: usize) -> Vec3 {
        Vec3::new(Real::zero(bits), Real::zero(bits), Real::zero(bits))
    }

    pub fn dot(&self, other: &Vec3) -> Real {
        &self.x * &other.x + &self.y * &other.y + &self.z * &other.z
    }

    pub fn cross(&self, other: &Vec3) -> Vec3 {
        Vec3 {
            x: &self.y * &other.z - &self.z * &other.y,
            y: &self.z * &other.x - &self.x * &other.z,
            z: &self.x * &other.y - &self.y * &other.x,
        }
    }

    pub fn norm_sq(&self) -> Real {
        self.dot(self)
    }

    pub fn norm(&self) -> Real {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, s: &Real) -> Vec3 {
        Vec3 {
            x: &self.x * s,
            y: &self.y * s,
            z: &self.z * s,
        }
    }

    pub fn with_prec(&self, bits: usize) -> Vec3 {
        Vec3::new(self.x.with_prec(bits), self.y.with_prec(bits), self.z.with_prec(bits))
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> Real {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }
}

impl Add<&Vec3> for &Vec3 {
    type Output = Vec3;
    fn add(self, rhs: &Vec3) -> Vec3 {
        Vec3::new(&self.x + &rhs.x, &self.y + &rhs.y, &self.z + &rhs.z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        &self + &rhs
    }
}

impl Sub<&Vec3> for &Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: &Vec3) -> Vec3 {
        Vec3::new(&self.x - &rhs.x, &self.y - &rhs.y, &self.z - &rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        &self - &rhs
    }
}

impl Mul<&Real> for &Vec3 {
    type Output = Vec3;
    fn mul(self, rhs: &Real) -> Vec3 {
        self.scale(rhs)
    }
}

impl Mul<i64> for &Vec3 {
    type Output = Vec3;
    fn mul(self, rhs: i64) -> Vec3 {
        Vec3::new(&self.x * rhs, &self.y * rhs, &self.z * rhs)
    }
}

impl Neg for &Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-&self.x, -&self.y, -&self.z)
    }
}
