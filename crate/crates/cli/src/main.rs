mod args;
mod config;
mod error;
mod output;
mod plot;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};
use tachyon_core::force::self_force;
use tachyon_core::kinematics::{equilibrium_radius, vertex, ForceLaw};
use tachyon_core::nullshell::{default_guard, find_roots_guarded, singular_betas};
use tachyon_core::precision::bits_for_digits;
use tachyon_core::sweep::{refine_with, run_sweep, RefineWindow};
use tachyon_core::{Model, Multiplicity, PhysicalScale, PrecisionContext, Real, Side, Spacing, SweepSpec};

use args::{Cli, Command, Format, Global, ModelArg, SpacingArg};
use error::CliError;
use output::{csv_writer, decimal, digits_relative_to, sink, Record};

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tachyon: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(argv: Vec<std::ffi::OsString>) -> Result<(), CliError> {
    let argv = config::expand(argv)?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => return Err(CliError::Usage(e.render().to_string().trim_end().to_string())),
        Err(e) => {
            print!("{e}");
            return Ok(());
        }
    };
    let session = Session::new(&cli.global)?;
    match cli.command {
        Command::SingularBetas { count } => session.singular_betas(count),
        Command::Roots { beta, guard } => session.roots(&beta, guard.as_deref()),
        Command::Force { beta, model } => session.force(&beta, model.into()),
        Command::Sweep { beta_min, beta_max, points, spacing, model, refine_k, refine_window, refine_depth } => {
            let refine = match refine_k {
                Some(k) => Some(RefineWindow::new(k, session.real(&refine_window)?, refine_depth)),
                None => None,
            };
            let spec = SweepSpec {
                beta_min: session.real(&beta_min)?,
                beta_max: session.real(&beta_max)?,
                points,
                spacing: match spacing {
                    SpacingArg::Linear => Spacing::Linear,
                    SpacingArg::Log => Spacing::Log,
                },
                model: model.into(),
                ctx: session.ctx,
                refine,
            };
            session.sweep(&spec)
        }
        Command::Refine { k, window, depth, decades, per_decade, model } => {
            let refine = RefineWindow { decades, per_decade, ..RefineWindow::new(k, session.real(&window)?, depth) };
            session.refine(&refine, model.into())
        }
        Command::Radius { beta, q, m0, c } => session.radius(&beta, &q, &m0, &c),
        Command::Plot { input, series, width, height } => {
            session.format_or(Format::Svg, &[Format::Svg])?;
            let file = std::fs::File::open(&input).map_err(|e| CliError::Io(format!("{}: {e}", input.display())))?;
            let samples = plot::read_series(file, series)?;
            let mut out = sink(session.output.as_deref())?;
            out.write_all(plot::render(&samples, series, width, height).as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Fw => Model::FeynmanWheeler,
            ModelArg::Causal => Model::Causal,
        }
    }
}

struct Session {
    ctx: PrecisionContext,
    threads: usize,
    format: Option<Format>,
    output: Option<std::path::PathBuf>,
}

impl Session {
    fn new(g: &Global) -> Result<Session, CliError> {
        let working = g.working.unwrap_or(g.digits.saturating_add(24));
        let ctx = PrecisionContext::new(working, g.digits, g.cap)?;
        let threads = match g.threads {
            Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
            Some(n) => n,
            None => std::thread::available_parallelism().map(usize::from).unwrap_or(1),
        };
        Ok(Session { ctx, threads, format: g.format, output: g.output.clone() })
    }

    fn real(&self, s: &str) -> Result<Real, CliError> {
        Ok(Real::parse(s, self.ctx.cap_bits())?)
    }

    fn digits(&self) -> u32 {
        self.ctx.target_digits()
    }

    fn format_or(&self, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
        let f = self.format.unwrap_or(default);
        if !allowed.contains(&f) {
            return Err(CliError::Usage(format!("format {f:?} is not available for this subcommand").to_lowercase()));
        }
        Ok(f)
    }

    fn write_json(&self, value: &Value) -> Result<(), CliError> {
        let mut out = sink(self.output.as_deref())?;
        serde_json::to_writer_pretty(&mut out, value)?;
        writeln!(out)?;
        out.flush()?;
        Ok(())
    }

    fn write_records(&self, records: &[Record]) -> Result<(), CliError> {
        let mut w = csv_writer(sink(self.output.as_deref())?);
        for r in records {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    fn singular_betas(&self, count: u32) -> Result<(), CliError> {
        let format = self.format_or(Format::Csv, &[Format::Csv, Format::Json])?;
        let table = singular_betas(count, &self.ctx)?;
        let d = self.digits();
        match format {
            Format::Json => self.write_json(&Value::Array(
                table
                    .iter()
                    .map(|s| json!({"k": s.index, "beta": s.beta.to_sig_string(d), "phi": s.phi.to_sig_string(d), "achieved_digits": d}))
                    .collect(),
            )),
            _ => self.write_records(&table.iter().map(|s| Record::bare(s.beta.to_sig_string(d), Some(d), None)).collect::<Vec<_>>()),
        }
    }

    fn roots(&self, beta: &str, guard: Option<&str>) -> Result<(), CliError> {
        let format = self.format_or(Format::Json, &[Format::Csv, Format::Json])?;
        let beta = self.real(beta)?;
        let guard = match guard {
            Some(g) => self.real(g)?,
            None => default_guard(self.ctx.cap_bits()),
        };
        let roots = find_roots_guarded(&beta, &self.ctx, &guard)?;
        let d = self.digits();
        let one = Real::one(64);
        match format {
            Format::Json => {
                let list: Vec<Value> = roots
                    .iter()
                    .map(|r| {
                        let k = vertex(&beta.with_prec(r.tau.prec()), r, Side::Retarded).k_factor;
                        json!({
                            "tau": r.tau.to_sig_string(d),
                            "phi": r.phi.to_sig_string(d),
                            "K": decimal(&k, digits_relative_to(&k, &one, d)),
                            "multiplicity": match r.multiplicity {
                                Multiplicity::Simple => "simple",
                                Multiplicity::NearDouble => "near_double",
                            },
                        })
                    })
                    .collect();
                self.write_json(&json!({
                    "beta": beta.to_sig_string(d),
                    "n_roots": roots.len(),
                    "achieved_digits": d,
                    "roots": list,
                }))
            }
            _ => self.write_records(&[Record::bare(beta.to_sig_string(d), Some(d), Some(roots.len()))]),
        }
    }

    fn force(&self, beta: &str, model: Model) -> Result<(), CliError> {
        let format = self.format_or(Format::Json, &[Format::Csv, Format::Json])?;
        let result = self_force(&self.real(beta)?, model, &self.ctx)?;
        let record = Record::from_force(&result, self.digits());
        match format {
            Format::Json => self.write_json(&serde_json::to_value(&record)?),
            _ => self.write_records(&[record]),
        }
    }

    fn sweep(&self, spec: &SweepSpec) -> Result<(), CliError> {
        let format = self.format_or(Format::Csv, &[Format::Csv, Format::Json])?;
        let d = self.digits();
        let mut failure: Option<CliError> = None;
        match format {
            Format::Json => {
                let mut out = sink(self.output.as_deref())?;
                let mut first = true;
                out.write_all(b"[")?;
                run_sweep(spec, self.threads, |row| {
                    if failure.is_some() {
                        return;
                    }
                    let sep = if first { "\n  " } else { ",\n  " };
                    first = false;
                    let written = serde_json::to_string(&Record::from_row(&row, d))
                        .map_err(CliError::from)
                        .and_then(|s| out.write_all(format!("{sep}{s}").as_bytes()).and_then(|_| out.flush()).map_err(CliError::from));
                    failure = written.err();
                })?;
                out.write_all(b"\n]\n")?;
                out.flush()?;
            }
            _ => {
                let mut w = csv_writer(sink(self.output.as_deref())?);
                run_sweep(spec, self.threads, |row| {
                    if failure.is_some() {
                        return;
                    }
                    let written = w.serialize(Record::from_row(&row, d)).map_err(CliError::from).and_then(|_| w.flush().map_err(CliError::from));
                    failure = written.err();
                })?;
                w.flush()?;
            }
        }
        failure.map_or(Ok(()), Err)
    }

    fn refine(&self, refine: &RefineWindow, model: Model) -> Result<(), CliError> {
        let format = self.format_or(Format::Csv, &[Format::Csv, Format::Json])?;
        let outcome = refine_with(refine, model, &self.ctx, self.threads)?;
        let d = self.digits();
        let records: Vec<Record> = outcome.rows.iter().map(|r| Record::from_row(r, d)).collect();
        let max_abs_z = outcome.max_abs_z.as_ref().map(|z| z.to_sig_string(d));
        let growth = outcome.decade_growth.as_ref().map(|g| g.to_sig_string(6));
        match format {
            Format::Json => self.write_json(&json!({
                "k": refine.singular_index,
                "rows": records,
                "sign_changes": outcome.sign_changes,
                "max_abs_Z": max_abs_z,
                "decade_growth": growth,
            })),
            _ => {
                self.write_records(&records)?;
                eprintln!(
                    "refine k={}: sign_changes={} max_abs_Z={} decade_growth={}",
                    refine.singular_index,
                    outcome.sign_changes,
                    max_abs_z.as_deref().unwrap_or("-"),
                    growth.as_deref().unwrap_or("-"),
                );
                Ok(())
            }
        }
    }

    fn radius(&self, beta: &str, q: &str, m0: &str, c: &str) -> Result<(), CliError> {
        self.format_or(Format::Json, &[Format::Json])?;
        let beta = self.real(beta)?;
        let bits = bits_for_digits(self.ctx.working_digits());
        let scale = PhysicalScale::new(Real::one(bits), self.real(q)?, self.real(m0)?, self.real(c)?)?;
        let result = self_force(&beta, Model::FeynmanWheeler, &self.ctx)?;
        let (radius, law) = equilibrium_radius(&beta.with_prec(bits), &scale, &result.z.with_prec(bits))?;
        let d = self.digits();
        self.write_json(&json!({
            "beta": beta.to_sig_string(d),
            "Z": result.z.to_sig_string(d),
            "radius": radius.to_sig_string(d),
            "equation": match law {
                ForceLaw::Eq1 => "eq1",
                ForceLaw::Eq2 => "eq2",
            },
            "achieved_digits": d,
        }))
    }
}
