//! `rmpc`: point counting on `Y^2 = D_n(X) + t` from the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use rmpc::algebra::{build_extension, FiniteField, PrimeField};
use rmpc::division::{degree_profile, generic_image, Endo};
use rmpc::endo::{build_dickson_curve, DicksonCurve};
use rmpc::kernel::{build_system_g2, build_system_general};
use rmpc::oracle::DEFAULT_ENUMERATION_BUDGET;
use rmpc::par::{configure_threads, Parallelism};
use rmpc::rmorder::RMOrder;
use rmpc::schoof::{count, CountConfig, CountResult, Mode};
use rmpc::{Error, Result};

/// Seed of the defining polynomial of `F_q` when `k > 1`.
const BASE_FIELD_SEED: u64 = 0x6261_7365;

#[derive(Parser)]
#[command(name = "rmpc", version, about = "Point counting on Dickson curves Y^2 = D_n(X) + t")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute chi_pi in the given mode.
    Count(CountArgs),
    /// Compute chi_pi by naive point counting.
    Oracle(CountArgs),
    /// Run a counting mode and the oracle; exit 0 iff they agree.
    CrossCheck(CountArgs),
    /// CSV of coefficient degrees of the images of [l].
    Degrees(DegreesArgs),
    /// Print the kernel system for alpha_i as one equation per line.
    ExportSystem(ExportArgs),
}

#[derive(Args, Clone)]
struct CurveArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    t: u64,
    #[arg(long)]
    p: u64,
    /// q = p^k.
    #[arg(long, default_value_t = 1)]
    k: usize,
}

#[derive(Args, Clone)]
struct CountArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// rm, oracle or rm-with-oracle-kernels.
    #[arg(long, default_value = "rm")]
    mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cap on kernel field degrees; default min(l^2 - 1, 600).
    #[arg(long)]
    extension_cap: Option<usize>,
    #[arg(long, default_value_t = 200_000)]
    degree_budget: usize,
    /// Cap on q^g for naive counting.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    enumeration_budget: u64,
    /// Run every loop on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Clone)]
struct DegreesArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    p: u64,
    /// Defaults to the least t >= 1 giving a nonsingular curve.
    #[arg(long)]
    t: Option<u64>,
    #[arg(long, value_delimiter = ',', required = true)]
    ell: Vec<u64>,
    #[arg(long, default_value_t = 200_000)]
    degree_budget: usize,
}

#[derive(Args, Clone)]
struct ExportArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    t: u64,
    #[arg(long)]
    p: u64,
    /// A totally split prime.
    #[arg(long)]
    ell: u64,
    /// Which ideal above l, 0-based in ascending eigenvalue order.
    #[arg(long, default_value_t = 0)]
    ideal: usize,
    #[arg(long, default_value_t = 200_000)]
    degree_budget: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("RMPC_THREADS").ok().and_then(|v| v.parse().ok()) {
        configure_threads(n);
    }
    let (text, code) = match run(&cli.command) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("rmpc: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("rmpc: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}

/// 1 for bad configurations, 2 for failed verification, 3 for exhausted
/// budgets.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) => 1,
        Error::Budget(_) | Error::NotFound(_) | Error::Degenerate(_) => 3,
        _ => 2,
    }
}

fn run(cmd: &Command) -> Result<(String, u8)> {
    match cmd {
        Command::Count(a) => {
            let doc = count_doc(a, a.mode.parse()?)?;
            Ok((to_text(&doc), 0))
        }
        Command::Oracle(a) => {
            let mut doc = count_doc(a, Mode::Oracle)?;
            doc["command"] = json!("oracle");
            Ok((to_text(&doc), 0))
        }
        Command::CrossCheck(a) => {
            let mode: Mode = a.mode.parse()?;
            let mut doc = count_doc(a, mode)?;
            let oracle = count_doc(a, Mode::Oracle)?;
            let agree = doc["chi"] == oracle["chi"];
            let obj = doc.as_object_mut().unwrap();
            obj.insert("oracle_chi".into(), oracle["chi"].clone());
            obj.insert("agree".into(), Value::Bool(agree));
            obj.insert("command".into(), json!("cross-check"));
            Ok((to_text(&doc), if agree { 0 } else { 2 }))
        }
        Command::Degrees(a) => Ok((degrees_csv(a)?, 0)),
        Command::ExportSystem(a) => Ok((export_system(a)?, 0)),
    }
}

fn to_text(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("serializable");
    s.push('\n');
    s
}

/// Integers as JSON numbers when they fit in an `i64`, as strings otherwise.
fn int(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(x) => json!(x),
        None => json!(v.to_string()),
    }
}

fn ints(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

fn check_curve(n: u64, p: u64, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let q = BigInt::from(p).pow(k as u32);
    let r = (&q % n).to_u64().unwrap_or(0);
    if n < 5 || r != 1 && r != n - 1 {
        return Err(Error::InvalidInput(format!("q = {q} is not +-1 mod n = {n}")));
    }
    Ok(())
}

fn count_doc(a: &CountArgs, mode: Mode) -> Result<Value> {
    let c = &a.curve;
    check_curve(c.n, c.p, c.k)?;
    let cfg = CountConfig {
        seed: a.seed,
        extension_cap: a.extension_cap,
        degree_budget: a.degree_budget,
        enumeration_budget: a.enumeration_budget,
        par: if a.sequential { Parallelism::Sequential } else { Parallelism::Parallel },
        ..CountConfig::default()
    };
    let base = PrimeField::new(c.p)?;
    let res = if c.k == 1 {
        count_over(base, c, mode, &cfg)?
    } else {
        count_over(build_extension(&base, c.k, BASE_FIELD_SEED), c, mode, &cfg)?
    };
    Ok(result_doc(c, &res))
}

fn curve_over<F: FiniteField>(field: F, n: u64, t: u64) -> Result<DicksonCurve<F>> {
    let t = field.from_i64(t as i64);
    build_dickson_curve(n, t, field)
}

fn count_over<F: FiniteField>(field: F, c: &CurveArgs, mode: Mode, cfg: &CountConfig) -> Result<CountResult> {
    let dc = curve_over(field, c.n, c.t)?;
    count(&dc, mode, cfg)
}

fn result_doc(c: &CurveArgs, res: &CountResult) -> Value {
    let z = &res.zeta;
    let per_ell: Vec<Value> = res
        .per_ell
        .iter()
        .map(|r| {
            json!({
                "ell": r.ell,
                "lambdas": r.lambdas,
                "alphas": r.alphas.iter().map(|a| ints(a)).collect::<Vec<_>>(),
                "k": r.k,
                "a_mod_ell": r.a_mod_ell,
                "extension_degrees": r.degrees,
                "k_solutions": r.k_solutions,
                "status": r.status.to_string(),
            })
        })
        .collect();
    let timings: Map<String, Value> = res.timings_ms.iter().map(|(k, v)| (k.clone(), json!(*v as u64))).collect();
    json!({
        "command": "count",
        "curve": { "n": c.n, "t": c.t, "q": int(&z.q) },
        "genus": z.g,
        "chi": ints(&z.c),
        "jacobian_order": int(&z.jacobian_order()),
        "psi": z.a.as_ref().map(|a| ints(a)),
        "per_ell": per_ell,
        "mode": res.mode.name(),
        "timings_ms": timings,
    })
}

/// The ceiling `g l^3 / 3 + 64 l^2` on coefficient degrees of the image of
/// `[l]`.
fn degree_ceiling(g: usize, ell: u64) -> u64 {
    g as u64 * ell.pow(3) / 3 + 64 * ell * ell
}

fn degrees_csv(a: &DegreesArgs) -> Result<String> {
    check_curve(a.n, a.p, 1)?;
    let field = PrimeField::new(a.p)?;
    let dc = match a.t {
        Some(t) => curve_over(field, a.n, t)?,
        None => (1..a.p)
            .find_map(|t| curve_over(field.clone(), a.n, t).ok())
            .ok_or_else(|| Error::InvalidInput("no nonsingular t".into()))?,
    };
    let g = dc.genus();
    let mut out = String::from("g,l,max_deg_d,max_deg_e,ceiling,within_ceiling,deg_over_l2\n");
    for &ell in &a.ell {
        let img = generic_image(&dc, &Endo::Integer(ell as i64), a.degree_budget)?;
        let (dd, de) = degree_profile(&img);
        let ceiling = degree_ceiling(g, ell);
        let worst = dd.max(de) as u64;
        out += &format!(
            "{g},{ell},{dd},{de},{ceiling},{},{:.4}\n",
            worst <= ceiling,
            worst as f64 / (ell * ell) as f64
        );
    }
    Ok(out)
}

fn export_system(a: &ExportArgs) -> Result<String> {
    check_curve(a.n, a.p, 1)?;
    let dc = curve_over(PrimeField::new(a.p)?, a.n, a.t)?;
    let order = RMOrder::new(a.n)?;
    let split = order
        .split_prime(a.ell)?
        .ok_or_else(|| Error::InvalidInput(format!("{} is not totally split", a.ell)))?;
    if a.ideal >= split.lambdas.len() {
        return Err(Error::InvalidInput(format!("ideal index must be below {}", split.lambdas.len())));
    }
    let alpha = order.small_element(&split, a.ideal)?;
    let img = generic_image(&dc, &Endo::Order(alpha), a.degree_budget)?;
    let sys = if dc.genus() == 2 { build_system_g2(&dc, &img)? } else { build_system_general(&dc, &img)? };
    Ok(sys.export(|c| c.to_string()))
}
