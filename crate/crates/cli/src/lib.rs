//! The `slicerank` command line.
//!
//! Exit codes: 0 success, 1 verification or internal assertion failure,
//! 2 enumeration budget exceeded, 3 malformed input or usage.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};
use slicerank::analytic::{analytic_rank_direct, analytic_rank_on, frame_for, slice_rank_exact};
use slicerank::decompose::{theorem_decompose_on, verify_with_budget, Decomposition};
use slicerank::field::{make_field, FieldSpec};
use slicerank::json::{round_sig10, tensor_from_json, tensor_to_json};
use slicerank::points::Budget;
use slicerank::trilinear::{diagonal, random_form, Axis, Trilinear};
use slicerank::Error;

#[derive(Parser, Debug)]
#[command(
    name = "slicerank",
    version,
    about = "Analytic rank and certified slice-rank decompositions of trilinear forms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a tensor in canonical JSON and print its SHA-256.
    Gen(GenArgs),
    /// Print the exact zero-set count and analytic rank.
    Ark(ArkArgs),
    /// Compute the slice rank by exhaustive search.
    Srk(SrkArgs),
    /// Decompose a tensor and write a certificate.
    Decompose(DecomposeArgs),
    /// Check a certificate against a tensor.
    Verify(VerifyArgs),
    /// Run an ensemble and write one CSV row per tensor.
    Survey(SurveyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
}

#[derive(Args, Debug, Clone)]
pub struct BudgetArgs {
    /// Largest enumeration allowed, as a power of two.
    #[arg(long = "budget-log2", default_value_t = 24,
          value_parser = clap::value_parser!(u32).range(1..=63))]
    pub budget_log2: u32,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget::new(self.budget_log2)
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, value_parser = parse_dims, default_value = "2,2,2")]
    pub dims: [usize; 3],
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `random`, `zero` or `diagonal:N`.
    #[arg(long, value_parser = parse_family, default_value = "random")]
    pub family: Family,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ArkArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Also count the zero set pair by pair and compare.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long = "ark-axis", value_parser = parse_axis, default_value = "W")]
    pub ark_axis: Axis,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Args, Debug)]
pub struct SrkArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Give up above this rank; defaults to the smallest dimension.
    #[arg(long)]
    pub cap: Option<usize>,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long = "ark-axis", value_parser = parse_axis, default_value = "W")]
    pub ark_axis: Axis,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub cert: PathBuf,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Args, Debug)]
pub struct SurveyArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Comma-separated field sizes; overrides --p/--k.
    #[arg(long, value_delimiter = ',')]
    pub fields: Vec<u64>,
    /// Repeatable; defaults to 2,2,2.
    #[arg(long, value_parser = parse_dims)]
    pub dims: Vec<[usize; 3]>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub count: u64,
    /// `random`, `zero` or `diagonal:N` (n cycles through 1..=N).
    #[arg(long, value_parser = parse_family, default_value = "random")]
    pub family: Family,
    #[arg(long = "ark-axis", value_parser = parse_axis, default_value = "W")]
    pub ark_axis: Axis,
    /// Leave the timing columns empty so reruns are byte-identical.
    #[arg(long = "no-timing")]
    pub no_timing: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Random,
    Zero,
    Diagonal(usize),
}

pub fn parse_dims(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<_> = s.split(',').map(|x| x.trim().parse::<usize>()).collect();
    match parts.as_slice() {
        [Ok(a), Ok(b), Ok(c)] => Ok([*a, *b, *c]),
        _ => Err(format!("expected three comma-separated sizes, got {s:?}")),
    }
}

pub fn parse_family(s: &str) -> Result<Family, String> {
    match s.split_once(':') {
        None if s == "random" => Ok(Family::Random),
        None if s == "zero" => Ok(Family::Zero),
        Some(("diagonal", n)) => n
            .parse()
            .map(Family::Diagonal)
            .map_err(|_| format!("bad diagonal size {n:?}")),
        _ => Err(format!("unknown family {s:?}; use random, zero or diagonal:N")),
    }
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io { path: PathBuf, source: std::io::Error },
    Usage(String),
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Core(e) => match e {
                Error::Invariant(_) | Error::DensityViolated { .. } => 1,
                Error::BudgetExceeded { .. } => 2,
                _ => 3,
            },
            CliError::Io { .. } | CliError::Usage(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(io_err(path))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(io_err(path))
}

fn read_tensor(path: &Path) -> CliResult<Trilinear> {
    Ok(tensor_from_json(&read(path)?)?)
}

fn emit(out: &mut dyn Write, line: &str) -> CliResult<()> {
    writeln!(out, "{line}").map_err(io_err(Path::new("<stdout>")))
}

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Ark(a) => cmd_ark(&a, out),
        Command::Srk(a) => cmd_srk(&a, out),
        Command::Decompose(a) => cmd_decompose(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Survey(a) => cmd_survey(&a, out),
    }
}

pub fn build_tensor(field: &FieldSpec, family: Family, dims: [usize; 3], seed: u64) -> Trilinear {
    match family {
        Family::Random => random_form(field, dims, seed),
        Family::Zero => Trilinear::zeros(field, dims),
        Family::Diagonal(n) => diagonal(field, n),
    }
}

pub fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> CliResult<()> {
    let field = make_field(a.field.p, a.field.k)?;
    let t = build_tensor(&field, a.family, a.dims, a.seed);
    let mut text = tensor_to_json(&t);
    text.push('\n');
    write_file(&a.out, &text)?;
    emit(out, &format!("sha256={}", hex::encode(Sha256::digest(text.as_bytes()))))
}

pub fn cmd_ark(a: &ArkArgs, out: &mut dyn Write) -> CliResult<()> {
    let t = read_tensor(&a.input)?;
    let budget = a.budget.budget();
    let report = analytic_rank_on(&t, a.ark_axis, budget)?;
    let mut value = serde_json::to_value(&report).expect("plain data serializes");
    let mut agreed = true;
    if a.oracle {
        let direct = analytic_rank_direct(&t.permute_axes(frame_for(a.ark_axis))?, budget)?;
        agreed = direct.z_count == report.z_count;
        value["oracle_z_count"] = direct.z_count.to_string().into();
        value["oracle_match"] = agreed.into();
    }
    emit(out, &serde_json::to_string_pretty(&value).expect("json value"))?;
    if agreed {
        Ok(())
    } else {
        Err(CliError::Failed("zero-set counts disagree".into()))
    }
}

pub fn cmd_srk(a: &SrkArgs, out: &mut dyn Write) -> CliResult<()> {
    let t = read_tensor(&a.input)?;
    let largest = t.dims().into_iter().max().unwrap_or(0);
    a.budget.budget().check(t.field(), largest, "slice-rank search")?;
    let cap = a.cap.unwrap_or_else(|| t.dims().into_iter().min().unwrap_or(0));
    let value = serde_json::json!({
        "slice_rank": slice_rank_exact(&t, cap),
        "cap": cap,
    });
    emit(out, &serde_json::to_string_pretty(&value).expect("json value"))
}

/// `terms=.. ark=.. bound=.. codim=.. t=.. eff_t=a,b,..`
pub fn summary_line(d: &Decomposition) -> String {
    let tr = &d.transcript;
    let eff: Vec<String> = tr.levels.iter().map(|l| l.t_effective.to_string()).collect();
    format!(
        "terms={} ark={:.3} bound={:.1} codim={} t={} eff_t={}",
        d.terms.len(),
        tr.r,
        tr.certified_bound,
        tr.codim,
        tr.t,
        eff.join(",")
    )
}

pub fn cmd_decompose(a: &DecomposeArgs, out: &mut dyn Write) -> CliResult<()> {
    let t = read_tensor(&a.input)?;
    let d = theorem_decompose_on(&t, a.ark_axis, a.budget.budget())?;
    write_file(&a.out, &d.to_json())?;
    emit(out, &summary_line(&d))
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let t = read_tensor(&a.input)?;
    let d = Decomposition::from_json(&read(&a.cert)?)?;
    let report = verify_with_budget(&t, &d, a.budget.budget());
    emit(out, &report.to_json())?;
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        Err(CliError::Failed(format!("checks failed: {}", failed.join(", "))))
    }
}

/// `q = p^k` with `p` prime.
pub fn field_of_size(q: u64) -> CliResult<FieldSpec> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).ok_or_else(|| CliError::Usage(format!("no field of size {q}")))?;
    let (mut rest, mut k) = (q, 0u32);
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    if rest != 1 {
        return Err(CliError::Usage(format!("{q} is not a prime power")));
    }
    Ok(make_field(p, k)?)
}

pub const SURVEY_HEADER: [&str; 12] = [
    "seed", "q", "nu", "nv", "nw", "z_count", "ark", "terms", "bound", "srk_exact", "ms_ark",
    "ms_decomp",
];

pub fn cmd_survey(a: &SurveyArgs, out: &mut dyn Write) -> CliResult<()> {
    let fields = if a.fields.is_empty() {
        vec![make_field(a.field.p, a.field.k)?]
    } else {
        a.fields.iter().map(|&q| field_of_size(q)).collect::<CliResult<_>>()?
    };
    let dims_list = if a.dims.is_empty() { vec![[2, 2, 2]] } else { a.dims.clone() };
    if let Family::Diagonal(0) = a.family {
        return Err(CliError::Usage("survey needs diagonal:N with N >= 1".into()));
    }
    let budget = a.budget.budget();

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(SURVEY_HEADER).expect("in-memory write");
    let mut broken = 0usize;
    for (i, seed) in (a.seed..a.seed.saturating_add(a.count)).enumerate() {
        for field in &fields {
            let instances: Vec<(Family, [usize; 3])> = match a.family {
                Family::Diagonal(n) => {
                    let m = 1 + i % n;
                    vec![(Family::Diagonal(m), [m, m, m])]
                }
                family => dims_list.iter().map(|&d| (family, d)).collect(),
            };
            for (family, dims) in instances {
                let t = build_tensor(field, family, dims, seed);
                let (row, ok) = survey_row(&t, seed, a.ark_axis, budget, a.no_timing);
                broken += usize::from(!ok);
                csv.write_record(&row).expect("in-memory write");
            }
        }
    }
    let bytes = csv.into_inner().expect("in-memory flush");
    let text = String::from_utf8(bytes).expect("csv output is utf-8");
    match &a.out {
        Some(path) => write_file(path, &text)?,
        None => out.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>")))?,
    }
    if broken > 0 {
        return Err(CliError::Failed(format!("{broken} rows hit an internal assertion")));
    }
    Ok(())
}

/// One CSV row, and whether it is free of internal assertion failures.
/// Errors become a marker in the `z_count` column.
fn survey_row(t: &Trilinear, seed: u64, axis: Axis, budget: Budget, no_timing: bool) -> (Vec<String>, bool) {
    let q = t.field().q();
    let [nu, nv, nw] = t.dims();
    let mut row = vec![seed.to_string(), q.to_string(), nu.to_string(), nv.to_string(), nw.to_string()];
    let ms = |start: Instant| {
        if no_timing {
            String::new()
        } else {
            format!("{:.3}", start.elapsed().as_secs_f64() * 1e3)
        }
    };

    let start = Instant::now();
    let report = analytic_rank_on(t, axis, budget);
    let ms_ark = ms(start);
    let start = Instant::now();
    let decomposition = report
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|_| theorem_decompose_on(t, axis, budget));
    let ms_decomp = ms(start);
    let (report, d) = match (report, decomposition) {
        (Ok(r), Ok(d)) => (r, d),
        (Err(e), _) | (_, Err(e)) => {
            let (marker, ok) = match e {
                Error::BudgetExceeded { .. } => ("error:budget", true),
                Error::Invariant(_) | Error::DensityViolated { .. } => ("error:invariant", false),
                _ => ("error:input", true),
            };
            row.push(marker.to_string());
            row.resize(SURVEY_HEADER.len(), String::new());
            return (row, ok);
        }
    };

    let largest = t.dims().into_iter().max().unwrap_or(0);
    let srk = match t.field().checked_power(largest) {
        Some(n) if n <= 9 => slice_rank_exact(t, t.dims().into_iter().min().unwrap_or(0))
            .map(|s| s.to_string())
            .unwrap_or_default(),
        _ => String::new(),
    };
    row.extend([
        report.z_count.to_string(),
        round_sig10(report.r).to_string(),
        d.terms.len().to_string(),
        round_sig10(d.transcript.certified_bound).to_string(),
        srk,
        ms_ark,
        ms_decomp,
    ]);
    (row, true)
}
