//! Total self-force on the test charge, summed over every light-cone
//! intersection, in the time-symmetric and the retarded-only theories.
//!
//! Projections at the test point (1, 0, 0): radial = x̂ (outward positive),
//! azimuthal = ŷ (along the velocity). `Z = −F_radial`, so Z > 0 is
//! attraction toward the orbit centre.

use crate::error::{Error, Result};
use crate::fields::{lienard_wiechert, lorentz_force};
use crate::kinematics::{vertex, CircularWorldline, PhysicalScale, Side};
use crate::nullshell::{check_beta, roots_at, Multiplicity, NullRoot};
use crate::precision::{bits_for_digits, stabilize, Converges, PrecisionContext, Real, Vec3};

/// Working precision used from the start when any root is near-double.
pub const NEAR_DOUBLE_WORKING_DIGITS: u32 = 320;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    /// Half retarded plus half advanced.
    FeynmanWheeler,
    /// Retarded fields only, unit weight.
    Causal,
}

impl Model {
    pub fn label(self) -> &'static str {
        match self {
            Model::FeynmanWheeler => "fw",
            Model::Causal => "causal",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ForceResult {
    pub beta: Real,
    pub model: Model,
    pub radial: Real,
    pub azimuthal: Real,
    pub z: Real,
    /// Azimuthal over radial force; causal model only.
    pub epsilon: Option<Real>,
    pub n_roots: usize,
    pub achieved_digits: u32,
    pub working_digits: u32,
}

/// Lorentz force from the retarded and the advanced source of one root.
#[derive(Clone, Debug)]
pub struct PairContribution {
    pub root: NullRoot,
    pub retarded: Vec3,
    pub advanced: Vec3,
}

/// Per-root forces at the precision carried by `beta`.
pub fn pair_contributions_at(beta: &Real) -> Result<Vec<PairContribution>> {
    let world = CircularWorldline::new(beta.clone())?;
    let test_velocity = world.test_velocity();
    roots_at(beta)?
        .into_iter()
        .map(|root| {
            let ret = lienard_wiechert(&vertex(beta, &root, Side::Retarded))?;
            let adv = lienard_wiechert(&vertex(beta, &root, Side::Advanced))?;
            Ok(PairContribution {
                retarded: lorentz_force(&ret, &test_velocity),
                advanced: lorentz_force(&adv, &test_velocity),
                root,
            })
        })
        .collect()
}

/// Per-root forces at `ctx.working_digits`.
pub fn pair_contributions(beta: &Real, ctx: &PrecisionContext) -> Result<Vec<PairContribution>> {
    check_beta(beta, ctx)?;
    pair_contributions_at(&beta.with_prec(ctx.working_bits()))
}

#[derive(Clone, Debug)]
struct RawForce {
    radial: Real,
    azimuthal: Real,
    n_roots: usize,
}

impl Converges for RawForce {
    fn relative_change(&self, finer: &Self, floor: &Real) -> Option<Real> {
        if self.n_roots != finer.n_roots {
            return None;
        }
        let delta = (&self.radial - &finer.radial).abs().max((&self.azimuthal - &finer.azimuthal).abs());
        let scale = finer.radial.abs().max(finer.azimuthal.abs()).max(floor.clone());
        Some(delta / scale)
    }
}

fn raw_force(beta: &Real, model: Model) -> Result<RawForce> {
    let bits = beta.prec();
    let mut total = Vec3::zero(bits);
    let pairs = pair_contributions_at(beta)?;
    for pair in &pairs {
        total = match model {
            Model::FeynmanWheeler => &total + &(&pair.retarded + &pair.advanced).scale(&(Real::one(bits) / 2)),
            Model::Causal => &total + &pair.retarded,
        };
    }
    Ok(RawForce { radial: total.x, azimuthal: total.y, n_roots: pairs.len() })
}

/// Self-force at β under `model`, stabilized to `ctx.target_digits`.
///
/// If β is close enough to a singular velocity that a root is flagged
/// near-double, the ladder starts at [`NEAR_DOUBLE_WORKING_DIGITS`].
/// An exactly singular β never stabilizes and ends in
/// [`Error::PrecisionExhausted`].
pub fn self_force(beta: &Real, model: Model, ctx: &PrecisionContext) -> Result<ForceResult> {
    check_beta(beta, ctx)?;
    let near_double = roots_at(&beta.with_prec(ctx.working_bits()))
        .map(|roots| roots.iter().any(|r| r.multiplicity == Multiplicity::NearDouble))
        .unwrap_or(false);
    let ctx = if near_double { ctx.starting_at(NEAR_DOUBLE_WORKING_DIGITS) } else { *ctx };
    let stable = stabilize(&ctx, |digits| raw_force(&beta.with_prec(bits_for_digits(digits)), model))?;
    let RawForce { radial, azimuthal, n_roots } = stable.value;
    let epsilon = match model {
        Model::Causal => Some(&azimuthal / &radial),
        Model::FeynmanWheeler => None,
    };
    Ok(ForceResult {
        beta: beta.clone(),
        model,
        z: -&radial,
        radial,
        azimuthal,
        epsilon,
        n_roots,
        achieved_digits: stable.achieved_digits,
        working_digits: stable.working_digits,
    })
}

/// Z(β) under the time-symmetric model.
pub fn z_of_beta(beta: &Real, ctx: &PrecisionContext) -> Result<Real> {
    self_force(beta, Model::FeynmanWheeler, ctx).map(|r| r.z)
}

/// ε(β) = F_azimuthal / F_radial under the causal model.
pub fn epsilon_of_beta(beta: &Real, ctx: &PrecisionContext) -> Result<Real> {
    self_force(beta, Model::Causal, ctx)?
        .epsilon
        .ok_or_else(|| Error::InvalidArgument("causal result without epsilon".into()))
}

/// (radial, azimuthal) force in physical units: `(q²/r²)·F_normalized`.
pub fn physical_force(result: &ForceResult, scale: &PhysicalScale) -> (Real, Real) {
    let factor = scale.q.square() / scale.r.square();
    (&result.radial * &factor, &result.azimuthal * &factor)
}
