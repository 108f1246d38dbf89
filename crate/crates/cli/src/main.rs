use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tits_core::brauer::BrauerGroupModel;
use tits_core::json::{to_json, DescriptorDoc, MeasureReportDoc, PlaceDoc};
use tits_core::rational::distinct_conic_family;
use tits_core::sigma::{
    check_recurrences, extra_condition, sigma_int, SigmaKind, CORRECTED_RELATIONS, STATED_RELATIONS,
};
use tits_core::varieties::{compare, deduce, tits_measure, DeduceOptions};
use tits_core::verifier::{
    replay, verify_normal_form_confluence, verify_quadric_product_matching, verify_relation_equivalence,
    verify_sum_cancellation, verify_tensor_cancellation, VerificationRun, VerifierConfig,
};
use tits_core::Error;

#[derive(Parser)]
#[command(name = "tits", version, about = "Tits-algebra motivic measure calculator")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// JSON file with verifier frontiers and seed.
    #[arg(long, global = true)]
    config: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    RelationEquivalence,
    SumCancellation,
    TensorCancellation,
    TensorProbe,
    QuadricMatching,
    Confluence,
}

#[derive(Subcommand)]
enum Command {
    /// Tits measure, rank measure and dimension of a descriptor.
    Measure {
        /// Descriptor file path or inline JSON.
        input: String,
    },
    /// Compare the measures of two descriptors.
    Compare { x: String, y: String },
    /// Apply the deduction rules to two descriptors.
    Deduce {
        x: String,
        y: String,
        /// Assert that the two varieties have equal Grothendieck classes.
        #[arg(long)]
        assume_equal_k0: bool,
        /// Declare the conic factors of the first product unlinked (or linked).
        #[arg(long)]
        unlinked: Option<bool>,
    },
    /// Evaluate one power sum: `sigma 1even 5 6 2` or `sigma --kind 1even --m 5 --n 6 --l 2`.
    Sigma {
        #[arg(value_name = "KIND M N L", num_args = 0..=4)]
        positional: Vec<String>,
        #[arg(long)]
        kind: Option<SigmaKind>,
        #[arg(long)]
        m: Option<i64>,
        #[arg(long)]
        n: Option<i64>,
        #[arg(long)]
        l: Option<i64>,
    },
    /// Extra-condition table for `(m, n)`, or the step-down relations at `(m, n, l)` with `--l`.
    SigmaCheck {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        l: Option<i64>,
        /// Use the corrected step-down relation for sigma12_even.
        #[arg(long, requires = "l")]
        corrected: bool,
    },
    /// Run a verification suite and print its certificate.
    Verify(VerifyArgs),
    /// Brauer classes of the conics `(-1, p)` for primes `p ≡ 3 (mod 4)`.
    ConicFamily {
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, required_unless_present = "replay")]
    suite: Option<Suite>,
    /// Cyclic factor orders, e.g. `2,2`.
    #[arg(long, value_delimiter = ',')]
    group: Vec<u64>,
    /// Quadric dimension.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, default_value_t = 3)]
    max_card: usize,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Replay the witness of a certificate instead of running a suite.
    #[arg(long, conflicts_with = "suite")]
    replay: Option<String>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Resource(_) => 3,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn malformed(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

/// Inline JSON when the argument starts with `{`, a file path otherwise.
fn read_input(arg: &str) -> Result<String, Failure> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(Path::new(arg)).map_err(|e| malformed(format!("cannot read {arg}: {e}")))
}

fn load_config(path: Option<&str>) -> Result<VerifierConfig, Failure> {
    match path {
        None => Ok(VerifierConfig::default()),
        Some(p) => {
            let text = read_input(p)?;
            serde_json::from_str(&text).map_err(|e| malformed(format!("bad config: {e}")))
        }
    }
}

struct Output {
    json: String,
    table: String,
    code: u8,
}

impl Output {
    fn ok(json: String, table: String) -> Self {
        Self { json, table, code: 0 }
    }
}

fn value<T: serde::Serialize>(x: &T) -> Result<String, Failure> {
    Ok(to_json(x)?)
}

fn sigma_args(
    positional: &[String],
    kind: Option<SigmaKind>,
    m: Option<i64>,
    n: Option<i64>,
    l: Option<i64>,
) -> Result<(SigmaKind, i64, i64, i64), Failure> {
    if !positional.is_empty() {
        if positional.len() != 4 || kind.is_some() || m.is_some() || n.is_some() || l.is_some() {
            return Err(malformed("give either KIND M N L or --kind --m --n --l"));
        }
        let int = |s: &str| s.parse::<i64>().map_err(|_| malformed(format!("not an integer: {s}")));
        let kind = positional[0].parse::<SigmaKind>()?;
        return Ok((kind, int(&positional[1])?, int(&positional[2])?, int(&positional[3])?));
    }
    match (kind, m, n, l) {
        (Some(k), Some(m), Some(n), Some(l)) => Ok((k, m, n, l)),
        _ => Err(malformed("sigma needs a kind and m, n, l")),
    }
}

fn run_suite(suite: Suite, a: &VerifyArgs, cfg: &VerifierConfig) -> Result<VerificationRun, Failure> {
    let (group, n, max_card) = (&a.group, a.n, a.max_card);
    let model = || -> Result<_, Failure> {
        if group.is_empty() {
            return Err(malformed("--group is required for this suite"));
        }
        Ok(BrauerGroupModel::abstract_group(group)?)
    };
    let need_n = || n.ok_or_else(|| malformed("--n is required for this suite"));
    Ok(match suite {
        Suite::RelationEquivalence => verify_relation_equivalence(&model()?, max_card, cfg)?,
        Suite::SumCancellation => verify_sum_cancellation(&model()?, max_card, cfg)?,
        Suite::TensorCancellation => verify_tensor_cancellation(&model()?, need_n()?, max_card, true, cfg)?,
        Suite::TensorProbe => verify_tensor_cancellation(&model()?, n.unwrap_or(4), max_card, false, cfg)?,
        Suite::QuadricMatching => {
            let n = n.unwrap_or(6);
            let m = a.m.ok_or_else(|| malformed("--m is required for quadric-matching"))?;
            let d = a.d.ok_or_else(|| malformed("--d is required for quadric-matching"))?;
            verify_quadric_product_matching(d, m, n, n != 6, cfg)?
        }
        Suite::Confluence => verify_normal_form_confluence(&model()?, a.trials.unwrap_or(1000), cfg)?,
    })
}

fn certificate_table(run: &VerificationRun) -> String {
    let status = if run.passed() { "pass" } else { "counterexample" };
    let mut out = format!(
        "suite     {}\nmode      {:?}\nseed      {}\nchecks    {}\nasserted  {}\noutcome   {status}\n",
        run.suite, run.mode, run.seed, run.checks, run.asserted
    );
    if let Some(w) = run.witness() {
        out += &format!("witness   {}\n", serde_json::to_string(w).unwrap_or_default());
    }
    for note in &run.notes {
        out += &format!("note      {note}\n");
    }
    out
}

fn execute(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Measure { input } => {
            let v = DescriptorDoc::parse(&read_input(input)?)?;
            let report = tits_measure(&v)?;
            let table = format!(
                "family        {}\nrho           {}\ndim           {}\njt_effective  {}\njt            {}\n",
                v.family(),
                report.rho,
                report.dim,
                report.jt_effective,
                report.jt
            );
            Ok(Output::ok(value(&MeasureReportDoc::from_report(&report))?, table))
        }
        Command::Compare { x, y } => {
            let x = DescriptorDoc::parse(&read_input(x)?)?;
            let y = DescriptorDoc::parse(&read_input(y)?)?;
            let v = compare(&x, &y)?;
            let table = format!(
                "measures_equal   {}\nrho_equal        {}\ndims_equal       {}\nsubgroups_equal  {}\n",
                v.measures_equal, v.rho_equal, v.dims_equal, v.subgroups_equal
            );
            Ok(Output::ok(value(&v)?, table))
        }
        Command::Deduce { x, y, assume_equal_k0, unlinked } => {
            let x = DescriptorDoc::parse(&read_input(x)?)?;
            let y = DescriptorDoc::parse(&read_input(y)?)?;
            let opts = DeduceOptions { assume_equal_k0: *assume_equal_k0, unlinked: *unlinked };
            let report = deduce(&x, &y, &opts)?;
            let mut table = format!("basis: {}\nmeasures_equal: {}\n", report.basis, report.measures_equal);
            for d in &report.deductions {
                table += &format!("[{}] {} ({})\n", d.rule, d.conclusion, d.citation);
            }
            Ok(Output::ok(value(&report)?, table))
        }
        Command::Sigma { positional, kind, m, n, l } => {
            let (kind, m, n, l) = sigma_args(positional, *kind, *m, *n, *l)?;
            let v = sigma_int(kind, m, n, l)?;
            // a bare integer is valid JSON
            Ok(Output::ok(v.to_string(), format!("{v}\n")))
        }
        Command::SigmaCheck { m, n, l, corrected } => match l {
            None => {
                let ec = extra_condition(*m, *n)?;
                let mut table = format!("m={} n={} ({}) holds={}\n  l  sigma1  sigma2  holds\n", ec.m, ec.n, ec.parity, ec.holds);
                for r in &ec.rows {
                    table += &format!("  {}  {}  {}  {}\n", r.l, r.sigma1, r.sigma2, r.holds);
                }
                Ok(Output::ok(value(&ec)?, table))
            }
            Some(l) => {
                let rels = if *corrected { &CORRECTED_RELATIONS } else { &STATED_RELATIONS };
                let report = check_recurrences(rels, *m, *n, *l)?;
                let mut table = format!("m={m} n={n} l={l} all_hold={}\n", report.all_hold());
                for r in &report.relations {
                    table += &format!("  {}  {} vs {}  {}\n", r.relation, r.lhs, r.rhs, r.holds);
                }
                Ok(Output::ok(value(&report)?, table))
            }
        },
        Command::Verify(args) => {
            let mut cfg = load_config(cli.config.as_deref())?;
            if let Some(s) = args.seed {
                cfg.seed = s;
            }
            if let Some(path) = &args.replay {
                let run: VerificationRun = serde_json::from_str(&read_input(path)?)
                    .map_err(|e| malformed(format!("bad certificate: {e}")))?;
                let reproduced = replay(&run)?;
                let code = if reproduced && run.asserted { 2 } else { 0 };
                let table = format!("suite {} witness reproduced: {reproduced}\n", run.suite);
                return Ok(Output {
                    json: value(&json!({ "suite": run.suite, "reproduced": reproduced }))?,
                    table,
                    code,
                });
            }
            let suite = args.suite.ok_or_else(|| malformed("--suite is required"))?;
            let run = run_suite(suite, args, &cfg)?;
            Ok(Output {
                json: value(&run)?,
                table: certificate_table(&run),
                code: run.exit_code() as u8,
            })
        }
        Command::ConicFamily { primes } => {
            let classes = distinct_conic_family(primes)?;
            let mut distinct = true;
            for i in 0..classes.len() {
                for j in 0..i {
                    distinct &= classes[i] != classes[j];
                }
            }
            let mut table = String::new();
            let certs: Vec<Value> = primes
                .iter()
                .zip(&classes)
                .map(|(p, c)| {
                    let ram: Vec<PlaceDoc> = c.ramification().into_iter().map(PlaceDoc::from_place).collect();
                    table += &format!("(-1,{p})  {c}\n");
                    json!({ "a": -1, "b": p, "ramification": ram, "class": c.to_string() })
                })
                .collect();
            table += &format!("pairwise distinct: {distinct}\n");
            Ok(Output::ok(value(&json!({ "classes": certs, "pairwise_distinct": distinct }))?, table))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", out.json),
                Format::Table => print!("{}", out.table),
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
