//! Parameter sweeps of the self-force over β, and a dense scan of one
//! singular window.
//!
//! Points are evaluated on a fixed-size rayon pool in chunks and emitted in
//! grid order, so the output does not depend on the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::force::{self_force, Model};
use crate::nullshell::singular_velocity_at;
use crate::precision::{PrecisionContext, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// Extra points clustered on the upper side of one singular velocity.
#[derive(Clone, Debug)]
pub struct RefineWindow {
    /// k of β_k.
    pub singular_index: u32,
    /// Width of the scanned interval (β_k, β_k + window].
    pub window: Real,
    /// Bisection steps per bracketed sign change.
    pub max_depth: u32,
    /// Decades spanned by the geometric offsets below `window`.
    pub decades: u32,
    pub per_decade: u32,
}

impl RefineWindow {
    pub fn new(singular_index: u32, window: Real, max_depth: u32) -> RefineWindow {
        RefineWindow { singular_index, window, max_depth, decades: 4, per_decade: 8 }
    }

    fn validate(&self) -> Result<()> {
        if self.singular_index == 0 {
            return Err(Error::InvalidArgument("singular index starts at 1".into()));
        }
        if !self.window.is_positive() {
            return Err(Error::InvalidArgument("refine window must be positive".into()));
        }
        if self.per_decade == 0 {
            return Err(Error::InvalidArgument("per_decade must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub beta_min: Real,
    pub beta_max: Real,
    pub points: usize,
    pub spacing: Spacing,
    pub model: Model,
    pub ctx: PrecisionContext,
    pub refine: Option<RefineWindow>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.beta_min <= Real::one(64) {
            return Err(Error::InvalidBeta { beta: self.beta_min.to_sig_string(20), guard: "1".into() });
        }
        if self.beta_max <= self.beta_min {
            return Err(Error::InvalidArgument("beta_max must exceed beta_min".into()));
        }
        if self.points < 2 {
            return Err(Error::InvalidArgument("a sweep needs at least 2 points".into()));
        }
        if let Some(r) = &self.refine {
            r.validate()?;
        }
        Ok(())
    }

    /// Grid points at the cap precision, ascending, endpoints included.
    pub fn grid(&self) -> Result<Vec<Real>> {
        self.validate()?;
        let bits = self.ctx.cap_bits();
        let lo = self.beta_min.with_prec(bits);
        let hi = self.beta_max.with_prec(bits);
        let last = self.points as i64 - 1;
        let grid = match self.spacing {
            Spacing::Linear => {
                let step = (&hi - &lo) / last;
                (0..=last).map(|i| if i == last { hi.clone() } else { &lo + &step * i }).collect()
            }
            Spacing::Log => {
                let (a, b) = (lo.ln(), hi.ln());
                let step = (&b - &a) / last;
                (0..=last)
                    .map(|i| match i {
                        0 => lo.clone(),
                        i if i == last => hi.clone(),
                        i => (&a + &step * i).exp(),
                    })
                    .collect()
            }
        };
        Ok(grid)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    PrecisionExhausted,
    SkippedSingular,
}

impl RowStatus {
    pub fn label(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::PrecisionExhausted => "precision_exhausted",
            RowStatus::SkippedSingular => "skipped_singular",
        }
    }
}

/// One evaluated β. Numeric fields are `None` unless `status` is `Ok`.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub beta: Real,
    pub model: Model,
    pub radial: Option<Real>,
    pub azimuthal: Option<Real>,
    pub z: Option<Real>,
    pub epsilon: Option<Real>,
    pub n_roots: Option<usize>,
    pub achieved_digits: Option<u32>,
    pub status: RowStatus,
}

impl SweepRow {
    fn empty(beta: Real, model: Model, status: RowStatus) -> SweepRow {
        SweepRow {
            beta,
            model,
            radial: None,
            azimuthal: None,
            z: None,
            epsilon: None,
            n_roots: None,
            achieved_digits: None,
            status,
        }
    }
}

/// Singular velocities below `beta_max`, at working and at cap precision.
struct SingularTable {
    coarse: Vec<Real>,
    fine: Vec<std::sync::OnceLock<Option<Real>>>,
    ctx: PrecisionContext,
}

impl SingularTable {
    fn new(beta_max: &Real, ctx: &PrecisionContext) -> SingularTable {
        let mut coarse = Vec::new();
        for k in 1.. {
            match singular_velocity_at(k, ctx.working_bits()) {
                Ok(s) if s.beta <= *beta_max => coarse.push(s.beta),
                _ => break,
            }
        }
        let fine = coarse.iter().map(|_| std::sync::OnceLock::new()).collect();
        SingularTable { coarse, fine, ctx: *ctx }
    }

    fn is_singular(&self, beta: &Real) -> bool {
        let near = Real::pow10(-(self.ctx.working_digits() as i32) + 5, 64) * beta;
        let exact = Real::pow10(-(self.ctx.cap_digits() as i32), 64) * beta;
        self.coarse.iter().enumerate().any(|(i, b)| {
            if (beta - b).abs() > near {
                return false;
            }
            let fine = self.fine[i].get_or_init(|| singular_velocity_at(i as u32 + 1, self.ctx.cap_bits()).ok().map(|s| s.beta));
            match fine {
                Some(f) => (beta - f).abs() <= exact,
                None => false,
            }
        })
    }
}

fn evaluate(beta: &Real, model: Model, ctx: &PrecisionContext, singular: &SingularTable) -> SweepRow {
    if singular.is_singular(beta) {
        return SweepRow::empty(beta.clone(), model, RowStatus::SkippedSingular);
    }
    match self_force(beta, model, ctx) {
        Ok(r) => SweepRow {
            beta: beta.clone(),
            model,
            radial: Some(r.radial),
            azimuthal: Some(r.azimuthal),
            z: Some(r.z),
            epsilon: r.epsilon,
            n_roots: Some(r.n_roots),
            achieved_digits: Some(r.achieved_digits),
            status: RowStatus::Ok,
        },
        Err(_) => SweepRow::empty(beta.clone(), model, RowStatus::PrecisionExhausted),
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

fn evaluate_all(pool: &rayon::ThreadPool, betas: &[Real], model: Model, ctx: &PrecisionContext, singular: &SingularTable) -> Vec<SweepRow> {
    pool.install(|| betas.par_iter().map(|b| evaluate(b, model, ctx, singular)).collect())
}

/// Evaluates every grid point (plus the refine window, if any) and hands
/// the rows to `emit` in ascending β.
///
/// Per-point failures become row statuses; only an invalid spec is an error.
pub fn run_sweep<F>(spec: &SweepSpec, threads: usize, mut emit: F) -> Result<()>
where
    F: FnMut(SweepRow),
{
    let grid = spec.grid()?;
    let pool = pool(threads)?;
    let mut extra = match &spec.refine {
        Some(r) => refine_rows(r, spec.model, &spec.ctx, &pool)?.rows,
        None => Vec::new(),
    }
    .into_iter()
    .peekable();
    let top = grid.last().expect("grid has at least two points");
    let singular = SingularTable::new(top, &spec.ctx);
    let chunk = threads.max(1) * 2;
    for betas in grid.chunks(chunk) {
        for row in evaluate_all(&pool, betas, spec.model, &spec.ctx, &singular) {
            while let Some(r) = extra.next_if(|r| r.beta <= row.beta) {
                if r.beta != row.beta {
                    emit(r);
                }
            }
            emit(row);
        }
    }
    extra.for_each(emit);
    Ok(())
}

/// Result of scanning (β_k, β_k + window].
#[derive(Clone, Debug)]
pub struct RefineOutcome {
    /// Ascending in β.
    pub rows: Vec<SweepRow>,
    /// Sign changes of Z between consecutive `Ok` rows.
    pub sign_changes: usize,
    pub max_abs_z: Option<Real>,
    /// max|Z| over the innermost decade of offsets divided by max|Z| over
    /// the outermost one.
    pub decade_growth: Option<Real>,
}

/// Scans the upper side of the k-th singular velocity under the
/// time-symmetric model. Requires a cap of at least 400 digits.
pub fn refine_near_singularity(
    k: u32,
    window: &Real,
    max_depth: u32,
    ctx: &PrecisionContext,
    threads: usize,
) -> Result<RefineOutcome> {
    refine_with(&RefineWindow::new(k, window.clone(), max_depth), Model::FeynmanWheeler, ctx, threads)
}

pub fn refine_with(refine: &RefineWindow, model: Model, ctx: &PrecisionContext, threads: usize) -> Result<RefineOutcome> {
    refine_rows(refine, model, ctx, &pool(threads)?)
}

const REFINE_MIN_CAP: u32 = 400;

fn refine_rows(refine: &RefineWindow, model: Model, ctx: &PrecisionContext, pool: &rayon::ThreadPool) -> Result<RefineOutcome> {
    refine.validate()?;
    if ctx.cap_digits() < REFINE_MIN_CAP {
        return Err(Error::InvalidArgument(format!("refine needs a precision cap of at least {REFINE_MIN_CAP} digits")));
    }
    let bits = ctx.cap_bits();
    let beta_k = singular_velocity_at(refine.singular_index, bits)?.beta;
    let window = refine.window.with_prec(bits);
    let ln10 = Real::from_int(10, bits).ln();
    let steps = refine.decades * refine.per_decade;
    let offsets: Vec<Real> = (0..=steps)
        .map(|j| &window * (-(&ln10 * i64::from(j)) / i64::from(refine.per_decade)).exp())
        .collect();
    let betas: Vec<Real> = offsets.iter().rev().map(|d| &beta_k + d).collect();
    let top = betas.last().expect("non-empty offsets").clone();
    let singular = SingularTable::new(&top, ctx);
    let mut rows = evaluate_all(pool, &betas, model, ctx, &singular);

    let mut brackets: Vec<(SweepRow, SweepRow)> = rows
        .windows(2)
        .filter(|w| opposite_z(&w[0], &w[1]))
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect();
    for _ in 0..refine.max_depth {
        if brackets.is_empty() {
            break;
        }
        let mids: Vec<Real> = brackets.iter().map(|(a, b)| (&a.beta + &b.beta) / 2).collect();
        let evaluated = evaluate_all(pool, &mids, model, ctx, &singular);
        let mut next = Vec::new();
        for ((lo, hi), mid) in brackets.into_iter().zip(evaluated) {
            rows.push(mid.clone());
            if opposite_z(&lo, &mid) {
                next.push((lo, mid));
            } else if opposite_z(&mid, &hi) {
                next.push((mid, hi));
            }
        }
        brackets = next;
    }
    rows.sort_by(|a, b| a.beta.partial_cmp(&b.beta).expect("ordered betas"));

    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.status == RowStatus::Ok).collect();
    let sign_changes = ok.windows(2).filter(|w| opposite_z(w[0], w[1])).count();
    let max_abs = |rows: &mut dyn Iterator<Item = &&SweepRow>| {
        rows.filter_map(|r| r.z.as_ref().map(Real::abs)).reduce(Real::max)
    };
    let max_abs_z = max_abs(&mut ok.iter());
    let inner_edge = &beta_k + &offsets[(steps - refine.per_decade.min(steps)) as usize];
    let outer_edge = &beta_k + &offsets[refine.per_decade.min(steps) as usize];
    let inner = max_abs(&mut ok.iter().filter(|r| r.beta <= inner_edge));
    let outer = max_abs(&mut ok.iter().filter(|r| r.beta >= outer_edge));
    let decade_growth = match (inner, outer) {
        (Some(i), Some(o)) if !o.is_zero() => Some(i / o),
        _ => None,
    };
    Ok(RefineOutcome { rows, sign_changes, max_abs_z, decade_growth })
}

fn opposite_z(a: &SweepRow, b: &SweepRow) -> bool {
    match (&a.z, &b.z) {
        (Some(x), Some(y)) => x.signum() * y.signum() < 0,
        _ => false,
    }
}
