//! Subcommands. Each returns a process exit code; errors are printed to the
//! supplied stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperseries::catalog::{
    first_disagreement, get_constant, load_descriptor, parse_descriptor, validate_descriptor,
    Loaded,
};
use hyperseries::linspace::{evaluate_constant_with, ConstantEvaluation};
use hyperseries::{Algorithm, ConstantFormula, Dyadic, Error, EvalOptions};

use crate::memory;
use crate::report::{write_records, EvalReport, Measurement, RatioReport, Record};

pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DESCRIPTOR: i32 = 3;
pub const EXIT_ASSERTION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "hyperseries", version, about = "Evaluate hypergeometric-series constants to a given number of bits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the digits of a constant.
    Compute(ComputeArgs),
    /// Check the two algorithms (or two constants) against each other.
    Verify(VerifyArgs),
    /// Time and memory scaling over a geometric range of precisions.
    Sweep(SweepArgs),
    /// Run the descriptor checks on a file and print the report.
    Describe(DescribeArgs),
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Catalog constant (e, pi, zeta3, zeta3-uncorrected).
    #[arg(long)]
    pub constant: Option<String>,
    /// JSON series or formula file.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

impl Source {
    pub fn label(&self) -> String {
        match (&self.constant, &self.file) {
            (Some(c), _) => c.clone(),
            (None, Some(f)) => f.display().to_string(),
            (None, None) => unreachable!("clap requires one source"),
        }
    }

    pub fn load(&self) -> Result<ConstantFormula, Error> {
        match (&self.constant, &self.file) {
            (Some(name), _) => get_constant(name),
            (None, Some(path)) => load_file(path).map(Loaded::into_formula),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

fn load_file(path: &Path) -> Result<Loaded, Error> {
    if !path.is_file() {
        return Err(Error::Usage(format!("no such file: {}", path.display())));
    }
    load_descriptor(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Classical,
    Linspace,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Classical => Algorithm::Classical,
            AlgoArg::Linspace => Algorithm::Linspace,
        }
    }
}

fn parse_base(s: &str) -> Result<u32, String> {
    match s {
        "2" => Ok(2),
        "10" => Ok(10),
        _ => Err(format!("base must be 2 or 10, got {s}")),
    }
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub source: Source,
    /// Fractional bits of precision.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub bits: u64,
    #[arg(long, value_enum, default_value = "linspace")]
    pub algo: AlgoArg,
    /// Output base, 2 or 10.
    #[arg(long, default_value_t = 10, value_parser = parse_base)]
    pub base: u32,
    /// Digits file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Append a JSON stats line here.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub bits: u64,
    /// Compare against this catalog constant or file (classical) instead of
    /// the same source.
    #[arg(long)]
    pub against: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepAlgo {
    Both,
    Classical,
    Linspace,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub constant: String,
    #[arg(long)]
    pub bits_min: u64,
    #[arg(long)]
    pub bits_max: u64,
    #[arg(long, default_value_t = 2)]
    pub factor: u64,
    #[arg(long, value_enum, default_value = "both")]
    pub algo: SweepAlgo,
    /// Timed repetitions per point; the minimum is reported.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub repeats: u32,
    /// Stats file (line-delimited JSON); stdout when absent.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DescribeArgs {
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long, default_value_t = 256)]
    pub probe_bits: u64,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Io(_) => EXIT_USAGE,
        Error::Descriptor(_) | Error::Condition { .. } | Error::Parse(_) => EXIT_DESCRIPTOR,
        Error::StateBound(_) => EXIT_ASSERTION,
        Error::Domain(_) => EXIT_MISMATCH,
    }
}

/// Fractional digits printed for `bits` bits in `base`:
/// `floor(bits * log_base 2) - 1`.
pub fn digit_count(bits: u64, base: u32) -> u64 {
    let per_bit = match base {
        2 => return bits.saturating_sub(1),
        _ => std::f64::consts::LN_2 / f64::from(base).ln(),
    };
    ((bits as f64 * per_bit).floor() as u64).saturating_sub(1)
}

/// One evaluation, timed (minimum of `repeats`) and memory-measured (first run).
pub fn measured_run(
    label: &str,
    f: &ConstantFormula,
    n: u64,
    algo: Algorithm,
    repeats: u32,
) -> Result<(ConstantEvaluation, EvalReport), Error> {
    let opts = EvalOptions::default();
    let mut best = f64::INFINITY;
    let mut peak = None;
    let mut result = None;
    for i in 0..repeats.max(1) {
        let start = Instant::now();
        let (eval, bytes) = memory::measure(|| evaluate_constant_with(f, n, algo, opts));
        let elapsed = start.elapsed().as_secs_f64();
        let eval = eval?;
        best = best.min(elapsed);
        if i == 0 {
            peak = bytes;
            result = Some(eval);
        }
    }
    let eval = result.expect("at least one run");
    let cost = Measurement {
        wall_time: best,
        repeats: repeats.max(1),
        peak_mem: peak,
        rss_hwm: memory::rss_high_water(),
    };
    let report = EvalReport::new(label, n, algo, &eval, cost);
    Ok((eval, report))
}

fn append_records(path: &Path, records: &[Record]) -> Result<(), Error> {
    let mut file = fs::OpenOptions::new().create(true).append(true).open(path)?;
    write_records(&mut file, records)?;
    Ok(())
}

pub fn compute(args: &ComputeArgs, stdout: &mut dyn Write) -> Result<(), Error> {
    let f = args.source.load()?;
    let (eval, report) = measured_run(&args.source.label(), &f, args.bits, args.algo.into(), 1)?;
    let digits = eval.value.render_digits(args.base, digit_count(args.bits, args.base))?;
    match &args.out {
        Some(path) => fs::write(path, format!("{digits}\n"))?,
        None => writeln!(stdout, "{digits}")?,
    }
    if let Some(path) = &args.stats {
        append_records(path, &[Record::Run(report)])?;
    }
    Ok(())
}

fn leading(d: &Dyadic) -> String {
    d.render_digits(10, 40.min(digit_count(d.frac_bits(), 10)))
        .expect("base 10 is supported")
}

/// Returns whether the two values agree to `2^-(bits-1)`.
pub fn verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<bool, Error> {
    if args.bits < 8 {
        return Err(Error::Usage("verify needs --bits >= 8".into()));
    }
    let subject = args.source.load()?;
    let (other_label, other) = match &args.against {
        None => (args.source.label(), subject.clone()),
        Some(name) => {
            let path = Path::new(name);
            let f = if path.is_file() {
                load_descriptor(path)?.into_formula()
            } else {
                get_constant(name)?
            };
            (name.clone(), f)
        }
    };
    let opts = EvalOptions::default();
    let a = evaluate_constant_with(&subject, args.bits, Algorithm::Linspace, opts)?.value;
    let b = evaluate_constant_with(&other, args.bits, Algorithm::Classical, opts)?.value;
    writeln!(stdout, "linspace  {:<16} {}", args.source.label(), leading(&a))?;
    writeln!(stdout, "classical {:<16} {}", other_label, leading(&b))?;

    let delta = (&a - &b).abs();
    let tolerance = Dyadic::new(hyperseries::BigInt::from(1), args.bits - 1);
    let ok = delta <= tolerance;
    if ok {
        writeln!(stdout, "pass: |delta| <= 2^-{}", args.bits - 1)?;
    } else {
        match first_disagreement(&a, &b, args.bits) {
            Some(0) => writeln!(stdout, "FAIL: integer parts differ")?,
            Some(k) => writeln!(stdout, "FAIL: first disagreement at fractional bit {k}")?,
            None => writeln!(stdout, "FAIL: |delta| > 2^-{} (expansions differ by a carry)", args.bits - 1)?,
        }
    }
    Ok(ok)
}

/// The precisions visited by a sweep.
pub fn sweep_points(bits_min: u64, bits_max: u64, factor: u64) -> Vec<u64> {
    std::iter::successors(Some(bits_min), |&n| n.checked_mul(factor))
        .take_while(|&n| n <= bits_max)
        .collect()
}

fn ratios(runs: &[EvalReport]) -> Vec<RatioReport> {
    runs.windows(2)
        .map(|w| RatioReport {
            constant: w[1].constant.clone(),
            algorithm: w[1].algorithm.clone(),
            n_from: w[0].n,
            n_to: w[1].n,
            time_ratio: w[1].wall_time / w[0].wall_time,
            mem_ratio: match (w[0].peak_mem, w[1].peak_mem) {
                (Some(a), Some(b)) if a > 0 => Some(b as f64 / a as f64),
                _ => None,
            },
        })
        .collect()
}

/// Runs every point for each selected algorithm, then the per-algorithm
/// ratios. Progress goes to `log`.
pub fn sweep_records(args: &SweepArgs, log: &mut dyn Write) -> Result<Vec<Record>, Error> {
    if args.bits_min < 1024 {
        return Err(Error::Usage("sweep needs --bits-min >= 1024".into()));
    }
    if args.factor < 2 {
        return Err(Error::Usage("sweep needs --factor >= 2".into()));
    }
    if args.bits_max < args.bits_min {
        return Err(Error::Usage(format!(
            "--bits-max {} is below --bits-min {}",
            args.bits_max, args.bits_min
        )));
    }
    let f = get_constant(&args.constant)?;
    let algos: &[Algorithm] = match args.algo {
        SweepAlgo::Both => &[Algorithm::Classical, Algorithm::Linspace],
        SweepAlgo::Classical => &[Algorithm::Classical],
        SweepAlgo::Linspace => &[Algorithm::Linspace],
    };
    let points = sweep_points(args.bits_min, args.bits_max, args.factor);
    let mut records = Vec::new();
    for &algo in algos {
        let mut runs = Vec::with_capacity(points.len());
        for &n in &points {
            let (_, report) = measured_run(&args.constant, &f, n, algo, args.repeats)?;
            writeln!(
                log,
                "{:<9} n={:<9} {:>10.4}s  peak {}",
                algo.as_str(),
                n,
                report.wall_time,
                report.peak_mem.map_or("n/a".to_string(), |b| format!("{b} B"))
            )?;
            runs.push(report);
        }
        let r = ratios(&runs);
        records.extend(runs.into_iter().map(Record::Run));
        records.extend(r.into_iter().map(Record::Ratio));
    }
    Ok(records)
}

pub fn sweep(args: &SweepArgs, stdout: &mut dyn Write, log: &mut dyn Write) -> Result<(), Error> {
    let records = sweep_records(args, log)?;
    match &args.stats {
        Some(path) => append_records(path, &records)?,
        None => write_records(stdout, &records)?,
    }
    Ok(())
}

/// Prints the report for every series in the file; returns whether all
/// checks passed.
pub fn describe(args: &DescribeArgs, stdout: &mut dyn Write) -> Result<bool, Error> {
    if !args.file.is_file() {
        return Err(Error::Usage(format!("no such file: {}", args.file.display())));
    }
    let text = fs::read_to_string(&args.file)?;
    let base = args.file.parent().unwrap_or(Path::new("."));
    let formula = parse_descriptor(&text, base)?.into_formula();
    let mut all = true;
    for (coeff, s) in &formula.terms {
        let report = validate_descriptor(s, args.probe_bits);
        writeln!(stdout, "{} (coefficient {coeff}), probe {} bits", s.name, report.probe_bits)?;
        for c in &report.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            writeln!(stdout, "  {mark} {:<11} {}", c.name, c.detail)?;
        }
        all &= report.passed();
    }
    Ok(all)
}

/// Dispatch a parsed command line; returns the exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Compute(a) => compute(a, stdout).map(|()| 0),
        Command::Verify(a) => verify(a, stdout).map(|ok| if ok { 0 } else { EXIT_MISMATCH }),
        Command::Sweep(a) => sweep(a, stdout, stderr).map(|()| 0),
        Command::Describe(a) => describe(a, stdout).map(|ok| if ok { 0 } else { EXIT_DESCRIPTOR }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
