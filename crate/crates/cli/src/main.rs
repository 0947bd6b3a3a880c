//! `golden`: evaluate, verify and classify Fibonacci/Lucas infinite products.

use std::io::{self, BufRead, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use golden_core::fiblucas::{fib, lucas};
use golden_core::products::{partial_product_with, DEFAULT_INDEX_CAP};
use golden_core::quadfield::{rat_string, rat_to_decimal};
use golden_core::report::{classify_batch, verify_batch, GoldenJson, VerdictJson, SCHEMA_VERSION};
use golden_core::{
    classify, Exec, Family, ProductError, ProductOptions, ProductSpec, VerificationReport, Verdict, VerifyError,
};
use serde_json::json;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;

/// Environment variable overriding the default index cap.
const CAP_ENV: &str = "GOLDEN_INDEX_CAP";

#[derive(Parser)]
#[command(name = "golden", version, about = "Exact Fibonacci/Lucas infinite products over Q(sqrt 5)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Fibonacci number F_k.
    Fib(SeqArgs),
    /// Print the Lucas number L_k.
    Lucas(SeqArgs),
    /// Evaluate a product exactly, in closed form or as a partial product.
    Eval(EvalArgs),
    /// Decide whether a product is algebraic or transcendental.
    Classify(ClassifyArgs),
    /// Check a closed form against a partial product and its tail bound.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SeqArgs {
    k: u64,
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Args, Clone)]
struct SpecArgs {
    /// `fib` or `lucas`.
    #[arg(value_name = "FAMILY")]
    family: Option<Family>,
    /// Alternative to the positional family.
    #[arg(long = "family", value_name = "FAMILY", conflicts_with = "family")]
    family_flag: Option<Family>,
    #[arg(short = 'a', default_value_t = 1)]
    a: u64,
    #[arg(short = 'b', default_value_t = 0)]
    b: u64,
    #[arg(short = 'r', default_value_t = 2)]
    r: u64,
    #[arg(short = 'c', allow_negative_numbers = true, default_value_t = 0)]
    c: i64,
    /// Lowest n in the product.
    #[arg(long, default_value_t = 1)]
    start: u64,
}

impl SpecArgs {
    fn spec(&self) -> Result<ProductSpec, CliError> {
        let family = self
            .family
            .or(self.family_flag)
            .ok_or_else(|| CliError::Usage("a family (fib or lucas) is required".into()))?;
        Ok(ProductSpec::new(family, self.a, self.b, self.r, self.c, self.start)?)
    }
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, default_value_t = 50)]
    digits: usize,
    /// Emit single-line JSON objects.
    #[arg(long)]
    json: bool,
    /// A zero factor makes the product zero instead of being skipped.
    #[arg(long)]
    strict_zero: bool,
    /// Largest sequence index that may be computed.
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, conflicts_with = "partial")]
    closed: bool,
    /// Multiply the factors up to this n.
    #[arg(long, value_name = "N")]
    partial: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Read specs (`family a b r c [start]` per line, `-` for stdin).
    #[arg(long, value_name = "FILE")]
    grid: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(short = 'N', default_value_t = 10)]
    n: u64,
    /// Read specs (`family a b r c [start]` per line, `-` for stdin).
    #[arg(long, value_name = "FILE")]
    grid: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Cap(String),
    Fail(String),
    Io(io::Error),
}

impl From<ProductError> for CliError {
    fn from(e: ProductError) -> Self {
        match e {
            ProductError::IndexCap { .. } => CliError::Cap(e.to_string()),
            ProductError::TailPrecondition(_) => CliError::Fail(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Product(p) => p.into(),
            other => CliError::Fail(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn index_cap(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{CAP_ENV} must be a nonnegative integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_INDEX_CAP),
    }
}

fn options(common: &CommonArgs) -> Result<ProductOptions, CliError> {
    Ok(ProductOptions { index_cap: index_cap(common.cap)?, strict_zero: common.strict_zero, exec: Exec::Parallel })
}

fn parse_grid(path: &str, default_start: u64) -> Result<Vec<ProductSpec>, CliError> {
    let reader: Box<dyn BufRead> = if path == "-" {
        Box::new(io::stdin().lock())
    } else {
        Box::new(io::BufReader::new(std::fs::File::open(path)?))
    };
    let mut specs = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| CliError::Usage(format!("{path}:{}: {what}", lineno + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(5..=6).contains(&fields.len()) {
            return Err(bad("expected `family a b r c [start]`"));
        }
        let family: Family = fields[0].parse().map_err(|_| bad("unknown family"))?;
        let num = |i: usize| fields[i].parse::<u64>().map_err(|_| bad("malformed integer"));
        let c: i64 = fields[4].parse().map_err(|_| bad("malformed integer"))?;
        let start = if fields.len() == 6 { num(5)? } else { default_start };
        specs.push(ProductSpec::new(family, num(1)?, num(2)?, num(3)?, c, start)?);
    }
    Ok(specs)
}

fn run_seq(args: &SeqArgs, lucas_family: bool, out: &mut impl Write) -> Result<(), CliError> {
    let cap = index_cap(args.cap)?;
    if args.k > cap {
        return Err(CliError::Cap(format!("index {} exceeds the index cap {cap}", args.k)));
    }
    let value = if lucas_family {
        lucas(args.k)
    } else {
        let k = i64::try_from(args.k).map_err(|_| CliError::Cap(format!("index {} is too large", args.k)))?;
        fib(k)
    };
    writeln!(out, "{value}")?;
    Ok(())
}

fn run_eval(args: &EvalArgs, out: &mut impl Write) -> Result<(), CliError> {
    let spec = args.spec.spec()?;
    let opts = options(&args.common)?;
    let digits = args.common.digits;
    // Closed mode is the default when no partial depth is given.
    match args.partial {
        None => {
            let verdict = classify(&spec);
            let Some(cf) = verdict.closed_form.as_ref() else {
                return Err(CliError::Usage(format!("{spec}: {}", VerifyError::from_verdict(&verdict))));
            };
            let decimal = cf.value.to_decimal(digits);
            if args.common.json {
                let obj = json!({
                    "schema": SCHEMA_VERSION,
                    "mode": "closed",
                    "case": verdict.case,
                    "value": GoldenJson::from(&cf.value),
                    "decimal": decimal,
                });
                writeln!(out, "{obj}")?;
            } else {
                writeln!(out, "{}", cf.value)?;
                writeln!(out, "{decimal}")?;
            }
        }
        Some(n) => {
            let report = partial_product_with(&spec, n, &opts)?;
            let decimal = rat_to_decimal(&report.value, digits);
            if args.common.json {
                let obj = json!({
                    "schema": SCHEMA_VERSION,
                    "mode": "partial",
                    "n": n,
                    "value": rat_string(&report.value),
                    "decimal": decimal,
                    "factors": report.factors_included,
                    "skipped": report.skipped,
                });
                writeln!(out, "{obj}")?;
            } else {
                writeln!(out, "{}", rat_string(&report.value))?;
                writeln!(out, "{decimal}")?;
                if !report.skipped.is_empty() {
                    writeln!(out, "skipped zero factors at n = {}", join(&report.skipped))?;
                }
            }
        }
    }
    Ok(())
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")
}

fn write_verdict(spec: &ProductSpec, v: &Verdict, common: &CommonArgs, grid: bool, out: &mut impl Write) -> io::Result<()> {
    if common.json {
        let mut obj = serde_json::to_value(VerdictJson::from(v)).expect("verdict serializes");
        if grid {
            obj["spec"] = serde_json::to_value(spec).expect("spec serializes");
        }
        return writeln!(out, "{obj}");
    }
    if grid {
        let value = v.closed_value().map(|x| x.to_string()).unwrap_or_else(|| "-".into());
        return writeln!(out, "{spec}: {} {} {value}", v.status, v.case.label());
    }
    writeln!(out, "status: {}", v.status)?;
    writeln!(out, "case: {}", v.case.label())?;
    match v.closed_value() {
        Some(x) => {
            writeln!(out, "closed form: {x}")?;
            writeln!(out, "decimal: {}", x.to_decimal(common.digits))?;
        }
        None if v.status == golden_core::Status::Algebraic => writeln!(out, "closed form: unknown")?,
        None => writeln!(out, "closed form: none")?,
    }
    if v.degenerate_factors.is_empty() {
        writeln!(out, "degenerate factors: none")
    } else {
        writeln!(out, "degenerate factors: n = {}", join(&v.degenerate_factors))
    }
}

fn run_classify(args: &ClassifyArgs, out: &mut impl Write) -> Result<(), CliError> {
    if let Some(path) = &args.grid {
        let specs = parse_grid(path, args.spec.start)?;
        for (spec, v) in specs.iter().zip(classify_batch(&specs, Exec::Parallel)) {
            write_verdict(spec, &v, &args.common, true, out)?;
        }
        return Ok(());
    }
    let spec = args.spec.spec()?;
    write_verdict(&spec, &classify(&spec), &args.common, false, out)?;
    Ok(())
}

fn write_report(r: &VerificationReport, common: &CommonArgs, grid: bool, out: &mut impl Write) -> io::Result<()> {
    if common.json {
        return writeln!(out, "{}", serde_json::to_string(r).expect("report serializes"));
    }
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    if grid {
        return writeln!(
            out,
            "{}: {verdict} agreement={} tail={}",
            r.spec, r.agreement_digits, r.tail_bound_digits
        );
    }
    writeln!(out, "spec: {}", r.spec)?;
    writeln!(out, "case: {}", r.case.label())?;
    writeln!(out, "N: {}", r.n)?;
    writeln!(out, "partial: {}", r.partial)?;
    writeln!(out, "closed:  {}", r.closed)?;
    writeln!(out, "agreement digits: {}", r.agreement_digits)?;
    writeln!(out, "tail bound digits: {}", r.tail_bound_digits)?;
    if !r.skipped.is_empty() {
        writeln!(out, "skipped zero factors at n = {}", join(&r.skipped))?;
    }
    writeln!(out, "result: {verdict}")
}

fn run_verify(args: &VerifyArgs, out: &mut impl Write) -> Result<(), CliError> {
    let opts = options(&args.common)?;
    let digits = args.common.digits;
    if let Some(path) = &args.grid {
        let specs = parse_grid(path, args.spec.start)?;
        let mut failed = 0usize;
        for (spec, res) in specs.iter().zip(verify_batch(&specs, args.n, digits, &opts, Exec::Parallel)) {
            match res {
                Ok(r) => {
                    failed += usize::from(!r.pass);
                    write_report(&r, &args.common, true, out)?;
                }
                Err(e) => {
                    failed += 1;
                    if args.common.json {
                        let obj = json!({"schema": SCHEMA_VERSION, "spec": spec, "error": e.to_string()});
                        writeln!(out, "{obj}")?;
                    } else {
                        writeln!(out, "{spec}: ERROR {e}")?;
                    }
                }
            }
        }
        if failed > 0 {
            return Err(CliError::Fail(format!("{failed} of {} specs did not verify", specs.len())));
        }
        return Ok(());
    }
    let spec = args.spec.spec()?;
    let report = golden_core::verify(&spec, args.n, digits, &opts)?;
    write_report(&report, &args.common, false, out)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Fail("partial product and closed form disagree beyond the tail bound".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match &cli.command {
        Command::Fib(a) => run_seq(a, false, &mut out),
        Command::Lucas(a) => run_seq(a, true, &mut out),
        Command::Eval(a) => run_eval(a, &mut out),
        Command::Classify(a) => run_classify(a, &mut out),
        Command::Verify(a) => run_verify(a, &mut out),
    };
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, msg) = match e {
                CliError::Usage(m) => (EXIT_USAGE, m),
                CliError::Cap(m) => (EXIT_CAP, m),
                CliError::Fail(m) => (EXIT_FAIL, m),
                CliError::Io(e) => (EXIT_FAIL, e.to_string()),
            };
            eprintln!("golden: {msg}");
            ExitCode::from(code)
        }
    }
}
