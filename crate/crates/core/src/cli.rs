//! The `bergerkit` command line.
//!
//! Exit codes: 0 when the computation succeeds or the test passes, 1 for a
//! mathematical negative (a failed test, no square root, an infeasible
//! back step), 2 for usage and input errors.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::algebra::{catalog, sqrt_atomic, sqrt_geometric, square_measure, SqrtOutcome};
use crate::error::Error;
use crate::measure::Measure;
use crate::oracle::{quad_mass_below, verify_square, QuadratureMoments, DEFAULT_QUAD_TOL};
use crate::scalar::{working_digits, Scalar};
use crate::shift::{
    aluthge_transform, backstep_extension, backstep_weights, iterated_aluthge, moments_from_weights, pth_power_shift,
    restriction_shift, schur_product, BackstepOutcome, MomentRule, MomentSequence, TailRule, WeightSequence,
};
use crate::subnormality::{hankel_sweep, is_n_contractive, DEFAULT_TOL};

#[derive(Parser, Debug)]
#[command(name = "bergerkit", version, about = "Berger measures of weighted shifts: tests, squares and square roots")]
struct Cli {
    /// Print rationals as decimals.
    #[arg(long, global = true)]
    decimal: bool,
    /// Significant digits for decimal output.
    #[arg(long, global = true, default_value_t = 20)]
    digits: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weight sequences: display, transform, test.
    #[command(subcommand)]
    Shift(ShiftCommand),
    /// Measures: moments, squares, square roots, catalog, verification.
    #[command(subcommand)]
    Measure(MeasureCommand),
    /// CSV of t, density and cumulative mass, plus the atom list.
    Plotdata(PlotArgs),
}

#[derive(Args, Debug, Clone)]
struct ShiftSource {
    /// Shift, measure or moment file (`-` or absent for stdin).
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Built-in shift: `bergman`, `agler:J` or `constant:W`.
    #[arg(long, conflicts_with = "input")]
    shift: Option<String>,
}

#[derive(Subcommand, Debug)]
enum ShiftCommand {
    /// Table of squared weights, weights and moments.
    Show {
        #[command(flatten)]
        source: ShiftSource,
        #[arg(short = 'n', default_value_t = 10)]
        count: usize,
    },
    /// Apply a transformation and write the result as JSON.
    Transform {
        #[command(flatten)]
        source: ShiftSource,
        #[arg(long, value_enum)]
        op: TransformOp,
        /// Power for `pow`.
        #[arg(long)]
        p: Option<String>,
        /// Iterations for `aluthge`.
        #[arg(long, default_value_t = 1)]
        times: usize,
        /// Second factor for `schur`, as a file.
        #[arg(long = "with", value_name = "FILE")]
        with: Option<PathBuf>,
        /// Second factor for `schur`, as a built-in shift.
        #[arg(long = "with-shift")]
        with_shift: Option<String>,
        /// Starting index for `restrict`.
        #[arg(short = 'n', long = "index")]
        index: Option<usize>,
        /// Prefixed weight for `backstep`.
        #[arg(long)]
        x: Option<String>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// k-hyponormality and n-contractivity sweeps.
    Test {
        #[command(flatten)]
        source: ShiftSource,
        /// Check every k from 1 to K.
        #[arg(long)]
        khypo: Option<usize>,
        /// Check every n from 1 to N.
        #[arg(long)]
        ncontr: Option<usize>,
        #[arg(long, default_value_t = 30)]
        mmax: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Print the reports as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum TransformOp {
    Pow,
    Aluthge,
    Schur,
    Restrict,
    Backstep,
}

#[derive(Subcommand, Debug)]
enum MeasureCommand {
    /// Moments γ_0 … γ_N.
    Moments {
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        #[arg(short = 'n', default_value_t = 10)]
        count: u32,
        /// Add a quadrature column.
        #[arg(long)]
        quad: bool,
    },
    /// Square under multiplicative convolution.
    Square {
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Square root of a finitely atomic measure.
    SqrtAtomic {
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = crate::algebra::DEFAULT_SQRT_TOL)]
        tol: f64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Print the full outcome, both candidates included, as JSON.
        #[arg(long)]
        report: bool,
    },
    /// Series square root of masses ρ_0, ρ_1, … on the points r^n.
    SqrtGeometric {
        /// Comma-separated masses.
        #[arg(long, conflicts_with = "input")]
        masses: Option<String>,
        /// JSON array of masses.
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        /// Ratio r; with it the root is written as a measure.
        #[arg(long)]
        r: Option<String>,
    },
    /// Named measure as JSON.
    Catalog {
        /// lebesgue, pth-lebesgue, agler or sqrtA3.
        name: String,
        /// Power q, Agler index j, or series length.
        #[arg(long)]
        q: Option<String>,
    },
    /// Check γ_n(MU) = γ_n(NU)².
    VerifySquare {
        mu: PathBuf,
        nu: PathBuf,
        #[arg(short = 'n', default_value_t = 20)]
        count: u32,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Use quadrature moments instead of closed forms.
        #[arg(long)]
        quad: bool,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// CSV path; atoms go to `<stem>.atoms.csv` beside it.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

enum Failure {
    /// Exit 1.
    Math(String),
    /// Exit 2.
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoRoot(_)
            | Error::OutsideFamily(_)
            | Error::SelfCheck(_)
            | Error::Numerical(_)
            | Error::Quadrature(_) => Failure::Math(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = std::result::Result<i32, Failure>;

struct Ctx<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    decimal: bool,
    digits: usize,
}

impl Ctx<'_> {
    fn fmt(&self, x: &Scalar) -> String {
        if x.is_exact() && !self.decimal {
            x.to_string()
        } else {
            x.to_decimal(self.digits)
        }
    }

    /// Header line naming the arithmetic behind the values below it.
    fn precision_note(&self, exact: bool) -> String {
        if exact && !self.decimal {
            "# values: exact rationals".to_string()
        } else if exact {
            format!("# values: exact rationals shown to {} digits", self.digits)
        } else {
            format!(
                "# values: {} digits shown, exact where rational, working precision {} digits",
                self.digits,
                working_digits()
            )
        }
    }

    fn read_input(&mut self, path: Option<&Path>) -> std::result::Result<String, Failure> {
        match path {
            Some(p) if p != Path::new("-") => {
                fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
            }
            _ => {
                let mut s = String::new();
                self.stdin.read_to_string(&mut s)?;
                Ok(s)
            }
        }
    }

    fn read_measure(&mut self, path: Option<&Path>) -> std::result::Result<Measure, Failure> {
        let text = self.read_input(path)?;
        Measure::from_json(&text).map_err(|e| Failure::Usage(format!("measure input: {e}")))
    }

    fn emit(&mut self, text: &str, path: Option<&Path>) -> std::result::Result<(), Failure> {
        match path {
            Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
            None => Ok(writeln!(self.out, "{text}")?),
        }
    }
}

/// Runs the command line with the given arguments and streams; returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let mut ctx = Ctx {
        stdin,
        out,
        err,
        decimal: cli.decimal,
        digits: cli.digits.max(1),
    };
    let result = match cli.command {
        Command::Shift(c) => shift_command(&mut ctx, c),
        Command::Measure(c) => measure_command(&mut ctx, c),
        Command::Plotdata(a) => plotdata(&mut ctx, a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Math(msg)) => {
            let _ = writeln!(ctx.err, "error: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(ctx.err, "error: {msg}");
            2
        }
    }
}

fn parse_scalar(flag: &str, s: &str) -> std::result::Result<Scalar, Failure> {
    s.parse::<Scalar>().map_err(|e| Failure::Usage(format!("--{flag}: {e}")))
}

/// What a shift command operates on.
enum Subject {
    Weights(WeightSequence),
    Measure(Measure),
    Moments(MomentSequence),
}

impl Subject {
    fn moments(&self, count: usize) -> std::result::Result<MomentSequence, Failure> {
        Ok(match self {
            Subject::Weights(w) => moments_from_weights(w, count)?,
            Subject::Measure(m) => MomentSequence::from_rule(MomentRule::Measure(Box::new(m.clone())), count)?,
            Subject::Moments(g) => g.clone(),
        })
    }
}

fn builtin_shift(spec: &str) -> std::result::Result<WeightSequence, Failure> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    match (name, arg) {
        ("bergman", None) => Ok(WeightSequence::bergman()),
        ("agler", Some(j)) => {
            let j: u32 = j.parse().map_err(|_| Failure::Usage(format!("agler index '{j}' is not an integer")))?;
            if j < 2 {
                return Err(Failure::Usage(format!("agler index {j} must be at least 2")));
            }
            Ok(WeightSequence::agler(j))
        }
        ("constant", Some(w)) => {
            let w = parse_scalar("shift", w)?;
            // the one-element prefix puts the weight through validation
            Ok(WeightSequence::new(vec![&w * &w], Some(TailRule::Constant { weight: w }))?)
        }
        _ => Err(Failure::Usage(format!(
            "unknown shift '{spec}' (expected bergman, agler:J or constant:W)"
        ))),
    }
}

fn parse_subject(text: &str) -> std::result::Result<Subject, Failure> {
    let value: Value = serde_json::from_str(text).map_err(|e| Failure::Usage(format!("input: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Failure::Usage("input must be a JSON object".into()))?;
    let bad = |e: serde_json::Error| Failure::Usage(format!("input: {e}"));
    if obj.contains_key("squared_weights") || obj.contains_key("tail") {
        Ok(Subject::Weights(serde_json::from_value(value).map_err(bad)?))
    } else if let Some(m) = obj.get("moments") {
        let values: Vec<Scalar> = serde_json::from_value(m.clone()).map_err(bad)?;
        Ok(Subject::Moments(MomentSequence::new(values)?))
    } else {
        Ok(Subject::Measure(serde_json::from_value(value).map_err(bad)?))
    }
}

fn load_subject(ctx: &mut Ctx, src: &ShiftSource) -> std::result::Result<Subject, Failure> {
    if let Some(spec) = &src.shift {
        return Ok(Subject::Weights(builtin_shift(spec)?));
    }
    let text = ctx.read_input(src.input.as_deref())?;
    parse_subject(&text)
}

fn load_weights(ctx: &mut Ctx, src: &ShiftSource, op: &str) -> std::result::Result<WeightSequence, Failure> {
    match load_subject(ctx, src)? {
        Subject::Weights(w) => Ok(w),
        _ => Err(Failure::Usage(format!("{op} needs a weight sequence"))),
    }
}

fn shift_command(ctx: &mut Ctx, cmd: ShiftCommand) -> CmdResult {
    match cmd {
        ShiftCommand::Show { source, count } => {
            let subject = load_subject(ctx, &source)?;
            let g = subject.moments(count + 1)?;
            let values = g.take(count + 1)?;
            let sq: Vec<Scalar> = match &subject {
                Subject::Weights(w) => w.squared_weights(count)?,
                _ => values.windows(2).map(|p| &p[1] / &p[0]).collect(),
            };
            let w: Vec<Scalar> = sq.iter().map(Scalar::sqrt).collect();
            let exact = values.iter().chain(&sq).chain(&w).all(Scalar::is_exact);
            let note = ctx.precision_note(exact);
            writeln!(ctx.out, "{note}")?;
            writeln!(ctx.out, "n\tweight_sq\tweight\tmoment")?;
            for (n, w2) in sq.iter().enumerate() {
                let (a, b, c) = (ctx.fmt(w2), ctx.fmt(&w[n]), ctx.fmt(&values[n]));
                writeln!(ctx.out, "{n}\t{a}\t{b}\t{c}")?;
            }
            Ok(0)
        }
        ShiftCommand::Transform {
            source,
            op,
            p,
            times,
            with,
            with_shift,
            index,
            x,
            out,
        } => {
            let result = match op {
                TransformOp::Pow => {
                    let p = p.ok_or_else(|| Failure::Usage("pow needs --p".into()))?;
                    pth_power_shift(&load_weights(ctx, &source, "pow")?, &parse_scalar("p", &p)?)?
                }
                TransformOp::Aluthge => {
                    let w = load_weights(ctx, &source, "aluthge")?;
                    if times == 1 {
                        aluthge_transform(&w)?
                    } else {
                        iterated_aluthge(&w, times)?
                    }
                }
                TransformOp::Schur => {
                    let w = load_weights(ctx, &source, "schur")?;
                    let other = match (with, with_shift) {
                        (Some(path), None) => match parse_subject(&ctx.read_input(Some(&path))?)? {
                            Subject::Weights(v) => v,
                            _ => return Err(Failure::Usage("--with must name a weight sequence".into())),
                        },
                        (None, Some(spec)) => builtin_shift(&spec)?,
                        _ => return Err(Failure::Usage("schur needs exactly one of --with, --with-shift".into())),
                    };
                    schur_product(&w, &other)?
                }
                TransformOp::Restrict => {
                    let n = index.ok_or_else(|| Failure::Usage("restrict needs -n".into()))?;
                    restriction_shift(&load_weights(ctx, &source, "restrict")?, n)
                }
                TransformOp::Backstep => {
                    let x = x.ok_or_else(|| Failure::Usage("backstep needs --x".into()))?;
                    let x = parse_scalar("x", &x)?;
                    match load_subject(ctx, &source)? {
                        Subject::Weights(w) => backstep_weights(&w, &x)?,
                        Subject::Measure(mu) => {
                            return match backstep_extension(&mu, &x)? {
                                BackstepOutcome::Extension(m) => {
                                    ctx.emit(&m.to_json()?, out.as_deref())?;
                                    writeln!(ctx.err, "feasible: x^2 * |1/t| = {}", ctx.fmt(&(&x * &x * mu.inverse_moment().unwrap_or_default())))?;
                                    Ok(0)
                                }
                                BackstepOutcome::Infeasible(why) => {
                                    writeln!(ctx.err, "infeasible: {why}")?;
                                    Ok(1)
                                }
                            };
                        }
                        Subject::Moments(_) => {
                            return Err(Failure::Usage("backstep needs a weight sequence or a measure".into()))
                        }
                    }
                }
            };
            let json = serde_json::to_string_pretty(&result).map_err(|e| Failure::Usage(e.to_string()))?;
            ctx.emit(&json, out.as_deref())?;
            Ok(0)
        }
        ShiftCommand::Test {
            source,
            khypo,
            ncontr,
            mmax,
            tol,
            json,
        } => {
            let subject = load_subject(ctx, &source)?;
            let khypo = if khypo.is_none() && ncontr.is_none() { Some(1) } else { khypo };
            let needed = mmax + 2 * khypo.unwrap_or(0).max(ncontr.unwrap_or(0)) + 1;
            let g = subject.moments(needed)?;
            let tol = Scalar::real(tol);
            let mut passed = true;
            let mut reports = Vec::new();
            for k in 1..=khypo.unwrap_or(0) {
                let r = hankel_sweep(&g, k, mmax, &tol)?;
                passed &= r.passed;
                let line = match r.first_failure {
                    None => format!("{k}-hyponormal for m <= {mmax}: pass"),
                    Some(m) => {
                        let w = &r.windows[m];
                        format!("{k}-hyponormal: FAIL at m = {m} (min eigenvalue {:.3e})", w.min_eigenvalue)
                    }
                };
                reports.push((line, serde_json::to_value(&r).map_err(|e| Failure::Usage(e.to_string()))?));
            }
            for n in 1..=ncontr.unwrap_or(0) {
                let r = is_n_contractive(&g, n, mmax)?;
                passed &= r.passed;
                let line = match r.first_failure {
                    None => format!("{n}-contractive for m <= {mmax}: pass"),
                    Some(m) => format!("{n}-contractive: FAIL at m = {m} (sum {})", ctx.fmt(&r.sums[m])),
                };
                reports.push((line, serde_json::to_value(&r).map_err(|e| Failure::Usage(e.to_string()))?));
            }
            if json {
                let all: Vec<Value> = reports.into_iter().map(|(_, v)| v).collect();
                writeln!(ctx.out, "{}", serde_json::to_string_pretty(&all).map_err(|e| Failure::Usage(e.to_string()))?)?;
            } else {
                let note = ctx.precision_note(g.is_exact());
                writeln!(ctx.out, "{note}")?;
                for (line, _) in &reports {
                    writeln!(ctx.out, "{line}")?;
                }
                writeln!(ctx.out, "{}", if passed { "all tests passed" } else { "some tests failed" })?;
            }
            Ok(if passed { 0 } else { 1 })
        }
    }
}

fn measure_command(ctx: &mut Ctx, cmd: MeasureCommand) -> CmdResult {
    match cmd {
        MeasureCommand::Moments { input, count, quad } => {
            let mu = ctx.read_measure(input.as_deref())?;
            let moments: Vec<Scalar> = (0..=count).map(|n| mu.moment(n)).collect();
            let note = ctx.precision_note(moments.iter().all(Scalar::is_exact));
            writeln!(ctx.out, "{note}")?;
            if quad {
                writeln!(ctx.out, "# quadrature column: double precision, tol {DEFAULT_QUAD_TOL:.0e}")?;
                writeln!(ctx.out, "n\tmoment\tquadrature")?;
            } else {
                writeln!(ctx.out, "n\tmoment")?;
            }
            for (n, g) in moments.iter().enumerate() {
                let g = ctx.fmt(g);
                if quad {
                    let q = crate::oracle::quad_measure_moment(&mu, n as u32, DEFAULT_QUAD_TOL)?;
                    writeln!(ctx.out, "{n}\t{g}\t{q:.15e}")?;
                } else {
                    writeln!(ctx.out, "{n}\t{g}")?;
                }
            }
            Ok(0)
        }
        MeasureCommand::Square { input, out } => {
            let mu = ctx.read_measure(input.as_deref())?;
            match square_measure(&mu) {
                Ok(sq) => {
                    ctx.emit(&sq.to_json()?, out.as_deref())?;
                    Ok(0)
                }
                Err(Error::OutsideFamily(reason)) => {
                    let report = serde_json::json!({ "numeric_only": true, "reason": reason });
                    ctx.emit(&serde_json::to_string_pretty(&report).unwrap_or_default(), out.as_deref())?;
                    writeln!(
                        ctx.err,
                        "outside the closed family: {reason}; numeric-only (use `measure verify-square --quad`)"
                    )?;
                    Ok(1)
                }
                Err(e) => Err(e.into()),
            }
        }
        MeasureCommand::SqrtAtomic { input, tol, out, report } => {
            let mu = ctx.read_measure(input.as_deref())?;
            let outcome = sqrt_atomic(&mu, &Scalar::real(tol))?;
            if report {
                let json = serde_json::to_string_pretty(&outcome).map_err(|e| Failure::Usage(e.to_string()))?;
                ctx.emit(&json, out.as_deref())?;
            }
            match outcome {
                SqrtOutcome::Root(root) => {
                    if !report {
                        ctx.emit(&root.measure().to_json()?, out.as_deref())?;
                    }
                    writeln!(
                        ctx.err,
                        "root found: moment residual {:.3e}, mass residual {:.3e}, paths differ by {:.3e}",
                        root.algorithmic.report.max_residual, root.algorithmic.mass_residual, root.path_difference
                    )?;
                    Ok(0)
                }
                SqrtOutcome::NoRoot(why) => {
                    writeln!(ctx.err, "no root: {why}")?;
                    Ok(1)
                }
            }
        }
        MeasureCommand::SqrtGeometric { masses, input, r } => {
            let rho: Vec<Scalar> = match masses {
                Some(list) => list
                    .split(',')
                    .map(|s| parse_scalar("masses", s))
                    .collect::<std::result::Result<_, _>>()?,
                None => {
                    let text = ctx.read_input(input.as_deref())?;
                    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("masses: {e}")))?
                }
            };
            let root = match sqrt_geometric(&rho) {
                Ok(root) => root,
                Err(Error::NoRoot(why)) => {
                    writeln!(ctx.err, "no root: {why}")?;
                    return Ok(1);
                }
                Err(e) => return Err(e.into()),
            };
            match r {
                Some(r) => {
                    let m = root.measure(&parse_scalar("r", &r)?)?;
                    ctx.emit(&m.to_json()?, None)?;
                }
                None => {
                    let note = ctx.precision_note(root.coefficients.iter().all(Scalar::is_exact));
                    writeln!(ctx.out, "{note}")?;
                    writeln!(ctx.out, "n\tcoefficient")?;
                    for (n, c) in root.coefficients.iter().enumerate() {
                        writeln!(ctx.out, "{n}\t{}", ctx.fmt(c))?;
                    }
                    writeln!(ctx.out, "# residual {}", ctx.fmt(&root.residual))?;
                }
            }
            Ok(0)
        }
        MeasureCommand::Catalog { name, q } => {
            let q = q.map(|s| parse_scalar("q", &s)).transpose()?;
            let entry = catalog(&name, q.as_ref())?;
            if !entry.truncation_bound.is_zero() {
                writeln!(
                    ctx.err,
                    "{}: {} terms, moment truncation error at most {:.3e}",
                    entry.name,
                    entry.measure.terms().len(),
                    entry.truncation_bound.to_f64()
                )?;
            }
            ctx.emit(&entry.measure.to_json()?, None)?;
            Ok(0)
        }
        MeasureCommand::VerifySquare {
            mu,
            nu,
            count,
            tol,
            quad,
            json,
        } => {
            if mu == Path::new("-") && nu == Path::new("-") {
                return Err(Failure::Usage("only one of MU and NU can come from stdin".into()));
            }
            let m = ctx.read_measure(Some(&mu))?;
            let n = ctx.read_measure(Some(&nu))?;
            let tol = Scalar::real(tol);
            let report = if quad {
                let qm = QuadratureMoments { measure: &m, tol: DEFAULT_QUAD_TOL * 1e-2 };
                let qn = QuadratureMoments { measure: &n, tol: DEFAULT_QUAD_TOL * 1e-2 };
                verify_square(&qm, &qn, count, &tol)?
            } else {
                verify_square(&m, &n, count, &tol)?
            };
            if json {
                writeln!(ctx.out, "{}", report.to_json()?)?;
            } else {
                write!(ctx.out, "{}", report.table())?;
            }
            Ok(if report.passed { 0 } else { 1 })
        }
    }
}

fn plotdata(ctx: &mut Ctx, args: PlotArgs) -> CmdResult {
    if args.samples < 2 {
        return Err(Failure::Usage(format!("--samples must be at least 2, got {}", args.samples)));
    }
    let mu = ctx.read_measure(args.input.as_deref())?;
    let s = args.samples;
    let mut csv = String::from("t,density,cumulative\n");
    for i in 1..=s {
        // interior points only; the endpoints may be singular
        let t = i as f64 / (s + 1) as f64;
        let mut cumulative = mu.zero_mass().to_f64();
        for a in mu.atoms() {
            if a.position().to_f64() <= t {
                cumulative += a.mass.to_f64();
            }
        }
        let density = if mu.has_density() {
            cumulative += quad_mass_below(&mu, t, DEFAULT_QUAD_TOL)?;
            format!("{:.12e}", mu.density_at_log(-t.ln()))
        } else {
            String::new()
        };
        csv.push_str(&format!("{t:.12},{density},{cumulative:.12e}\n"));
    }
    let mut atoms = String::from("t,mass\n");
    if !mu.zero_mass().is_zero() {
        atoms.push_str(&format!("0,{}\n", ctx.fmt(mu.zero_mass())));
    }
    for a in mu.atoms() {
        atoms.push_str(&format!("{},{}\n", a.position().to_decimal(17), ctx.fmt(&a.mass)));
    }
    match args.out {
        Some(path) => {
            fs::write(&path, csv).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let sidecar = path.with_extension("atoms.csv");
            fs::write(&sidecar, atoms).map_err(|e| Failure::Usage(format!("{}: {e}", sidecar.display())))?;
        }
        None => {
            write!(ctx.out, "{csv}\n# atoms\n{atoms}")?;
        }
    }
    Ok(0)
}
