//! Command-line front end.
//!
//! [`run`] parses arguments, dispatches to the library and writes CSV or
//! JSON. Exit status is 0 on success, 2 for invalid input, 3 when a
//! resource cap is hit and 1 for I/O failures.

mod args;
mod table;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use crate::error::WeaverError;
use crate::hem::{self, DyadicRational, TABLE_LEVEL_CAP};
use crate::oracle::{enumerate_rows, ENUMERATION_CAP};
use crate::process::{
    simulate_with_threads, variance_decomposition, SimulationConfig, SimulationReport, PATH_CAP,
};
use crate::scalar::{parse_probability, parse_rational, ProbValue, Rational, Scalar, POINT_EVAL_CAP};
use crate::weaver_core::{
    self, cdf_eval, mixing_sum, pmf_vector, sample_size, support_point, triangle_row,
    weaving_sum, ChoiceVector, TRIANGLE_CAP,
};

use args::{
    CdfArgs, Cli, Command, DecomposeArgs, EnumerateArgs, Format, HemArgs, HemTable, Mode,
    MomentsArgs, Output, PmfArgs, Points, SimulateArgs, TriangleArgs,
};
use table::{Cell, Table, ToCell};

/// A failure with its exit status.
#[derive(Debug)]
struct Failure {
    status: i32,
    message: String,
}

impl From<WeaverError> for Failure {
    fn from(e: WeaverError) -> Self {
        let status = match e {
            WeaverError::Resource(_) => 3,
            WeaverError::Domain(_) | WeaverError::Validation(_) => 2,
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            status: 1,
            message: format!("i/o error: {e}"),
        }
    }
}

/// Prefixes an error with the flag it concerns.
fn on(flag: &'static str) -> impl Fn(WeaverError) -> Failure {
    move |e| {
        let mut failure = Failure::from(e);
        failure.message = format!("{flag}: {}", failure.message);
        failure
    }
}

fn cap_check(flag: &'static str, value: u32, cap: u32) -> Result<(), Failure> {
    if value > cap {
        return Err(Failure {
            status: 3,
            message: format!("{flag}: {value} exceeds the cap {cap} (raise it with --max-n)"),
        });
    }
    Ok(())
}

/// Runs the command line `args` (program name first).
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    match write!(out, "{e}") {
                        Ok(()) => 0,
                        Err(_) => 1,
                    }
                }
                _ => {
                    let text = e.to_string();
                    let line = text.lines().next().unwrap_or("invalid arguments");
                    let _ = writeln!(err, "weaver: {}", line.trim_start_matches("error: "));
                    2
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(failure) => {
            let _ = writeln!(err, "weaver: {}", failure.message);
            failure.status
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Pmf(a) => match a.numeric.mode {
            Mode::Exact => pmf::<Rational>(&a, out),
            Mode::Float => pmf::<f64>(&a, out),
        },
        Command::Cdf(a) => match a.numeric.mode {
            Mode::Exact => cdf::<Rational>(&a, out),
            Mode::Float => cdf::<f64>(&a, out),
        },
        Command::Moments(a) => match a.numeric.mode {
            Mode::Exact => moments::<Rational>(&a, out),
            Mode::Float => moments::<f64>(&a, out),
        },
        Command::Triangle(a) => triangle(&a, out),
        Command::Hem(a) => match a.numeric.mode {
            Mode::Exact => hem_table::<Rational>(&a, out),
            Mode::Float => hem_table::<f64>(&a, out),
        },
        Command::Decompose(a) => match a.numeric.mode {
            Mode::Exact => decompose::<Rational>(&a, out),
            Mode::Float => decompose::<f64>(&a, out),
        },
        Command::Simulate(a) => simulate(&a, out),
        Command::Enumerate(a) => enumerate(&a, out),
    }
}

fn emit(output: &Output, default: Format, render: impl FnOnce(Format, &mut Vec<u8>) -> std::io::Result<()>, out: &mut dyn Write) -> Result<(), Failure> {
    let format = output.format.unwrap_or(default);
    let mut buffer = Vec::new();
    render(format, &mut buffer)?;
    match &output.output {
        Some(path) => std::fs::write(path, &buffer).map_err(|e| Failure {
            status: 1,
            message: format!("--output: cannot write {}: {e}", path.display()),
        }),
        None => {
            out.write_all(&buffer)?;
            Ok(out.flush()?)
        }
    }
}

fn emit_table(output: &Output, table: &Table, out: &mut dyn Write) -> Result<(), Failure> {
    emit(output, Format::Csv, |format, buffer| table.write(format, buffer), out)
}

fn probability<T: Scalar>(text: &str) -> Result<ProbValue<T>, Failure> {
    parse_probability(text).map_err(on("--p"))
}

fn pmf<T: Scalar + ToCell>(a: &PmfArgs, out: &mut dyn Write) -> Result<(), Failure> {
    cap_check("--n", a.n, a.numeric.max_n.unwrap_or(T::FULL_VECTOR_CAP))?;
    let p = probability::<T>(&a.p)?;
    let dist = pmf_vector(a.n, &p, a.method.into()).map_err(on("--n"))?;
    let mut table = Table::new()
        .plain("k")
        .plain("bits")
        .numeric_for::<T>("y")
        .numeric_for::<T>("p_k");
    for (k, prob) in dist.probs().iter().enumerate() {
        let k = k as u64;
        table.push(vec![
            Cell::Int(k.into()),
            Cell::Text(ChoiceVector::new(a.n, k)?.bit_string()),
            dist.support(k).cell(),
            prob.cell(),
        ]);
    }
    emit_table(&a.output, &table, out)
}

fn cdf<T: Scalar + ToCell>(a: &CdfArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let cap = a.numeric.max_n.unwrap_or(T::FULL_VECTOR_CAP);
    let p = probability::<T>(&a.p)?;
    let mut table = Table::new().numeric_for::<T>("x").numeric_for::<T>("F");
    match a.points {
        Points::Support => {
            cap_check("--n", a.n, cap)?;
            let size = sample_size(a.n);
            for k in 0..=size {
                let x = support_point(a.n, k).map_err(on("--n"))?;
                let f = cdf_eval(a.n, &p, &x).map_err(on("--n"))?;
                table.push(vec![T::from_rational(&x).cell(), f.cell()]);
            }
        }
        Points::Dyadic => {
            let level = a.level.unwrap_or(a.n);
            cap_check("--level", level, cap)?;
            for j in 0..=1u64 << level {
                let x = DyadicRational::new(j, level).map_err(on("--level"))?.value();
                let f = cdf_eval(a.n, &p, &x).map_err(on("--n"))?;
                table.push(vec![T::from_rational(&x).cell(), f.cell()]);
            }
        }
    }
    emit_table(&a.output, &table, out)
}

fn moments<T: Scalar + ToCell>(a: &MomentsArgs, out: &mut dyn Write) -> Result<(), Failure> {
    cap_check("--n", a.n, a.numeric.max_n.unwrap_or(T::FULL_VECTOR_CAP))?;
    let p = probability::<T>(&a.p)?;
    let mut table = Table::new()
        .plain("quantity")
        .plain("index")
        .numeric_for::<T>("value");
    let scalar = |name: &str, value: T| vec![Cell::Text(name.into()), Cell::Empty, value.cell()];
    let indexed =
        |name: &str, i: u32, value: T| vec![Cell::Text(name.into()), Cell::Int(i.into()), value.cell()];
    table.push(scalar("mean", weaver_core::mean(a.n, &p).map_err(on("--n"))?));
    for (j, term) in weaver_core::mean_decomposition(a.n, &p)
        .map_err(on("--n"))?
        .into_iter()
        .enumerate()
    {
        table.push(indexed("mean_term", j as u32, term));
    }
    table.push(scalar("variance", weaver_core::variance(a.n, &p).map_err(on("--n"))?));
    for bit in 0..a.n {
        let term = weaver_core::variance_per_bit(a.n, &p, bit).map_err(on("--n"))?;
        table.push(indexed("variance_bit", bit, term));
    }
    let ratio = weaver_core::variance_ratio(a.n).map_err(on("--n"))?;
    table.push(scalar("variance_ratio", T::from_rational(&ratio)));
    emit_table(&a.output, &table, out)
}

fn triangle(a: &TriangleArgs, out: &mut dyn Write) -> Result<(), Failure> {
    cap_check("--n", a.n, a.max_n.unwrap_or(TRIANGLE_CAP))?;
    let row = triangle_row(a.n).map_err(on("--n"))?;
    let exponents: Vec<String> = row.exponents().iter().map(u8::to_string).collect();
    let mut table = Table::new().plain("n").plain("row").plain("sum");
    table.push(vec![
        Cell::Int(a.n.into()),
        Cell::Text(exponents.join(",")),
        Cell::Int(row.row_sum()),
    ]);
    emit_table(&a.output, &table, out)
}

fn hem_table<T: Scalar + ToCell>(a: &HemArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let p = probability::<T>(&a.p)?;
    let table = match a.table {
        HemTable::Moments => {
            let (mean, variance) = hem::hem_moments(&p);
            let mut table = Table::new().plain("quantity").numeric_for::<T>("value");
            table.push(vec![Cell::Text("mean".into()), mean.cell()]);
            table.push(vec![Cell::Text("variance".into()), variance.cell()]);
            table
        }
        HemTable::Staircase => {
            cap_check("--level", a.level, a.numeric.max_n.unwrap_or(TABLE_LEVEL_CAP))?;
            let steps = hem::hem_staircase(&p, a.level).map_err(on("--level"))?;
            let mut table = Table::new()
                .plain("j")
                .numeric_for::<T>("x")
                .numeric_for::<T>("F")
                .numeric_for::<T>("mass");
            let last = 1u64 << a.level;
            for (v, f) in steps {
                let j = v.numerator() << (a.level - v.level());
                let mass = if j < last {
                    hem::interval_mass(&p, a.level, j).map_err(on("--level"))?.cell()
                } else {
                    Cell::Empty
                };
                table.push(vec![Cell::Int(j.into()), T::from_rational(&v.value()).cell(), f.cell(), mass]);
            }
            table
        }
    };
    emit_table(&a.output, &table, out)
}

fn decompose<T: Scalar + ToCell>(a: &DecomposeArgs, out: &mut dyn Write) -> Result<(), Failure> {
    cap_check("--n", a.n, a.numeric.max_n.unwrap_or(POINT_EVAL_CAP))?;
    let p = probability::<T>(&a.p)?;
    let s0 = T::from_rational(&parse_rational(&a.s0).map_err(on("--s0"))?);
    let s1 = T::from_rational(&parse_rational(&a.s1).map_err(on("--s1"))?);
    let terms = variance_decomposition(a.n, &p, &s0, &s1).map_err(on("--n"))?;
    let size = u128::from(sample_size(a.n));
    let (weaving, mixing) = (weaving_sum(a.n), mixing_sum(a.n));
    let mut table = Table::new()
        .plain("n")
        .numeric_for::<T>("between_weaving")
        .numeric_for::<T>("mixing")
        .numeric_for::<T>("within")
        .numeric_for::<T>("total")
        .plain("weaving_sum")
        .plain("mixing_sum")
        .plain("squared_size")
        .plain("identity_holds");
    table.push(vec![
        Cell::Int(a.n.into()),
        terms.between_weaving.cell(),
        terms.mixing.cell(),
        terms.within.cell(),
        terms.total().cell(),
        Cell::Int(weaving),
        Cell::Int(mixing),
        Cell::Int(size * size),
        Cell::Text((weaving + mixing == size * size).to_string()),
    ]);
    emit_table(&a.output, &table, out)
}

fn report_table(report: &SimulationReport) -> Table {
    let mut table = Table::new();
    for name in [
        "process", "n", "p", "reps", "seed", "mean", "variance", "se_mean", "se_variance",
        "frac_near_zero", "frac_near_one", "epsilon",
    ] {
        table = table.plain(name);
    }
    table.push(vec![
        Cell::Text(report.process.as_str().into()),
        Cell::Int(report.n.into()),
        Cell::Float(report.p),
        Cell::Int(report.reps.into()),
        Cell::Int(report.seed.into()),
        Cell::Float(report.mean),
        Cell::Float(report.variance),
        Cell::Float(report.se_mean),
        Cell::Float(report.se_variance),
        Cell::Float(report.frac_near_zero),
        Cell::Float(report.frac_near_one),
        Cell::Float(report.epsilon),
    ]);
    table
}

fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let process = a.process.into();
    let default_cap = match process {
        crate::process::ProcessKind::ConditionalMean => POINT_EVAL_CAP,
        _ => PATH_CAP,
    };
    cap_check("--n", a.n, a.max_n.unwrap_or(default_cap))?;
    let p = probability::<f64>(&a.p)?;
    a.h0.validate_for(crate::process::Population::H0).map_err(on("--h0"))?;
    a.h1.validate_for(crate::process::Population::H1).map_err(on("--h1"))?;
    let mut config = SimulationConfig::new(process, a.n, *p.value(), a.reps, a.seed)
        .with_components(a.h0.clone(), a.h1.clone())
        .with_epsilon(a.epsilon);
    config.max_observations = a.max_obs;
    let report = simulate_with_threads(&config, a.threads)?;
    emit(
        &a.output,
        Format::Json,
        |format, buffer| match format {
            Format::Json => {
                serde_json::to_writer(&mut *buffer, &report)?;
                buffer.push(b'\n');
                Ok(())
            }
            Format::Csv => report_table(&report).write(Format::Csv, buffer),
        },
        out,
    )
}

fn enumerate(a: &EnumerateArgs, out: &mut dyn Write) -> Result<(), Failure> {
    cap_check("--n", a.n, a.max_n.unwrap_or(ENUMERATION_CAP))?;
    let p = probability::<Rational>(&a.p)?;
    let mut table = Table::new()
        .plain("k")
        .plain("bits")
        .plain("conditional_sum")
        .exact("support")
        .exact("prob");
    for row in enumerate_rows(a.n, &p).map_err(on("--n"))? {
        table.push(vec![
            Cell::Int(row.k.into()),
            Cell::Text(row.bits.bit_string()),
            Cell::Int(row.conditional_sum.into()),
            row.support.cell(),
            row.prob.cell(),
        ]);
    }
    emit_table(&a.output, &table, out)
}
