//! Electromagnetic self-force on a charged tachyon moving on a circle
//! faster than light.
//!
//! Units are normalized throughout (orbit radius r = c = q = 1): speeds are
//! β = v/c > 1, delays are τ = c(t − t′)/r, and the test charge sits at
//! angle 0 on the unit circle moving along +ŷ. Physical forces follow by
//! the factor q²/r² (see [`force::physical_force`]).
//!
//! * [`precision`]: arbitrary-precision scalars and the escalation policy.
//! * [`nullshell`]: roots of the null condition and the singular velocities.
//! * [`kinematics`]: retarded and advanced source-point geometry.
//! * [`fields`]: Liénard–Wiechert fields and a finite-difference oracle.
//! * [`force`]: radial function Z(β) and azimuthal ratio ε(β).
//! * [`sweep`]: deterministic parallel parameter sweeps.

pub mod error;
pub mod fields;
pub mod force;
pub mod kinematics;
pub mod nullshell;
pub mod precision;
pub mod sweep;

pub use error::{Error, Result};
pub use fields::{FieldSample, Potentials};
pub use force::{ForceResult, Model};
pub use kinematics::{CircularWorldline, LightconeVertex, PhysicalScale, Side};
pub use nullshell::{Multiplicity, NullRoot, SingularVelocity};
pub use precision::{stabilize, PrecisionContext, Real, Stable, Vec3};
pub use sweep::{RowStatus, Spacing, SweepRow, SweepSpec};
