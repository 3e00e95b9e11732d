//! Command-line front end: construct and verify witness pairs, compute
//! similarity invariants, enumerate class data, and run the acceptance
//! checks. Machine-readable JSON goes to stdout (or `--out`); the human
//! summary goes to stderr.
//!
//! Exit codes for `witness`: 0 when element-conjugacy is verified and the
//! global status excludes a conjugator (exhausted or symbolic); 1 on any
//! verification failure; 2 when a search ran out of budget; 3 when the
//! requested family/size has no construction.

use std::fs;
use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::class_data::{enumerate_class_functions, ClassFunction, GroupKind};
use crate::field_tower::{make_field, FieldElement, FieldSpec};
use crate::groups::{conjugacy_classes, GroupFamily, GroupSpec};
use crate::matrixlab::{elementary_divisors, Matrix};
use crate::report;
use crate::selftest::{run_all, CheckStatus, SelftestConfig};
use crate::witnesses::{
    construct_witness, verify_witness, ConstructOptions, VerifyOptions, WitnessError,
};

#[derive(Parser)]
#[command(
    name = "cgw",
    about = "Witness pairs separating element-conjugacy from global conjugacy \
             in classical groups over finite fields",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Odd prime characteristic.
    #[arg(long)]
    p: u64,
    /// Extension degree: the computation runs over F_{p^k}.
    #[arg(long)]
    k: usize,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Cap on enumerated candidates per exhaustive decision.
    #[arg(long, env = "CGW_BUDGET", default_value_t = 10_000_000)]
    budget: u64,
    /// Seed for the deterministic randomized searches.
    #[arg(long, env = "CGW_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a witness pair and run both deciders.
    Witness {
        /// Target family: GL, SL, U, Sp, Oodd, Oeven.
        #[arg(long)]
        family: String,
        /// Matrix size (for Sp: the full even size 2n).
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        field: FieldArgs,
        /// For U: the base q = p^m with the group inside GL(n, q^2).
        /// Defaults to p^(k/2).
        #[arg(long)]
        base_q: Option<u64>,
        /// Override the first witness parameter ([c0,...] or an integer).
        #[arg(long)]
        a: Option<String>,
        /// Override the second witness parameter (GL only).
        #[arg(long)]
        b: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Also scan the whole target group for a global conjugator.
        #[arg(long)]
        exhaustive: bool,
        /// Re-run the global decider after one field extension.
        #[arg(long)]
        stability: bool,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<String>,
    },
    /// Similarity invariant (elementary-divisor class data) of a matrix.
    Invariant {
        /// Matrix file in the text format, or '-' for stdin.
        file: String,
        /// Validate the data against a family: U, Sp, or O.
        #[arg(long)]
        kind: Option<String>,
        /// For --kind U: the base q.
        #[arg(long)]
        base_q: Option<u64>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Enumerate valid class functions for a family and size.
    Classes {
        /// GL, U, Sp, or O.
        #[arg(long)]
        kind: String,
        /// Size parameter (matrix size; for Sp the Wall parameter n with
        /// matrix size 2n).
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        base_q: Option<u64>,
        /// Compare the count against brute-force conjugacy classes of the
        /// finite group (GL and U only).
        #[arg(long)]
        crosscheck: bool,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run the acceptance checks and print a pass/fail table.
    Selftest {
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

fn parse_element(spec: &FieldSpec, s: &str) -> Result<FieldElement, String> {
    let s = s.trim();
    if s.starts_with('[') {
        let coords: Result<Vec<u64>, _> = s
            .trim_start_matches('[')
            .trim_end_matches(']')
            .split(',')
            .map(|c| c.trim().parse::<u64>())
            .collect();
        let coords = coords.map_err(|e| format!("bad element '{s}': {e}"))?;
        spec.element(coords).map_err(|e| e.to_string())
    } else {
        let n: i64 = s.parse().map_err(|e| format!("bad element '{s}': {e}"))?;
        Ok(spec.from_int(n))
    }
}

fn emit(json: &serde_json::Value, out: &Option<String>) -> Result<(), String> {
    let text = report::to_pretty_string(json);
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {path}: {e}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_witness(
    family: &str,
    n: usize,
    field_args: &FieldArgs,
    base_q: Option<u64>,
    a: &Option<String>,
    b: &Option<String>,
    budget_args: &BudgetArgs,
    exhaustive: bool,
    stability: bool,
    out: &Option<String>,
) -> Result<u8, String> {
    let family = GroupFamily::parse(family)
        .ok_or_else(|| format!("unknown family '{family}' (GL, SL, U, Sp, Oodd, Oeven)"))?;
    let field = make_field(field_args.p, field_args.k).map_err(|e| e.to_string())?;
    let base_q = match (family, base_q) {
        (GroupFamily::U, Some(q)) => Some(q),
        (GroupFamily::U, None) => {
            if !field_args.k.is_multiple_of(2) {
                return Err("unitary witnesses need an even field degree (k = 2m)".into());
            }
            Some(field_args.p.pow((field_args.k / 2) as u32))
        }
        _ => None,
    };
    let mut opts = ConstructOptions::default();
    if let Some(s) = a {
        opts.a = Some(parse_element(&field, s)?);
    }
    if let Some(s) = b {
        opts.b = Some(parse_element(&field, s)?);
    }
    let pair = match construct_witness(family, n, &field, base_q, &opts) {
        Ok(pair) => pair,
        Err(WitnessError::OutOfCoverage(msg)) => {
            eprintln!("out of coverage: {msg}");
            return Ok(3);
        }
        Err(e) => return Err(e.to_string()),
    };
    let vopts = VerifyOptions {
        budget: budget_args.budget,
        seed: budget_args.seed,
        use_stored: true,
        exhaustive,
        stability,
    };
    let verified = verify_witness(&pair, &vopts).map_err(|e| e.to_string())?;
    let json = report::witness_report(&verified, vopts.budget, vopts.seed);
    emit(&json, out)?;

    let element = json["element_conjugate"]["status"].as_str().unwrap_or("?");
    let global = json["global"]["status"].as_str().unwrap_or("?");
    eprintln!(
        "{}: element-conjugate: {element}; global: {global}",
        verified.pair.target()
    );
    if verified.refutes() {
        Ok(0)
    } else if verified.undecided() {
        Ok(2)
    } else {
        Ok(1)
    }
}

fn run_invariant(
    file: &str,
    kind: &Option<String>,
    base_q: Option<u64>,
    out: &Option<String>,
) -> Result<u8, String> {
    let text = if file == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| e.to_string())?;
        buf
    } else {
        fs::read_to_string(file).map_err(|e| format!("cannot read {file}: {e}"))?
    };
    let matrix = Matrix::parse(&text).map_err(|e| e.to_string())?;
    let invariant = elementary_divisors(&matrix).map_err(|e| e.to_string())?;
    let mut json = invariant.data.to_json();
    if let Some(kind) = kind {
        let (kind, wall_n) = match kind.as_str() {
            "U" | "u" => (GroupKind::U, matrix.rows() as u32),
            "Sp" | "sp" => {
                if matrix.rows() % 2 != 0 {
                    return Err("symplectic data needs an even matrix size".into());
                }
                (GroupKind::Sp, (matrix.rows() / 2) as u32)
            }
            "O" | "o" => (GroupKind::O, matrix.rows() as u32),
            "GL" | "gl" => (GroupKind::Gl, matrix.rows() as u32),
            other => return Err(format!("unknown kind '{other}'")),
        };
        let bq = match kind {
            GroupKind::U => Some(base_q.ok_or("--kind U needs --base-q")?),
            _ => None,
        };
        let cf = ClassFunction::new(
            kind,
            wall_n,
            matrix.spec().clone(),
            bq,
            invariant.data.entries.clone(),
        );
        match cf.validate() {
            Ok(()) => {
                json["kind"] = serde_json::json!(kind.to_string());
                json["n"] = serde_json::json!(wall_n);
                json["valid"] = serde_json::json!(true);
            }
            Err(violation) => {
                json["kind"] = serde_json::json!(kind.to_string());
                json["n"] = serde_json::json!(wall_n);
                json["valid"] = serde_json::json!(false);
                json["violated"] = serde_json::json!(violation.to_string());
            }
        }
    }
    emit(&json, out)?;
    Ok(0)
}

fn run_classes(
    kind: &str,
    n: u32,
    field_args: &FieldArgs,
    base_q: Option<u64>,
    crosscheck: bool,
    budget_args: &BudgetArgs,
    out: &Option<String>,
) -> Result<u8, String> {
    let kind = match kind {
        "GL" | "gl" => GroupKind::Gl,
        "U" | "u" => GroupKind::U,
        "Sp" | "sp" => GroupKind::Sp,
        "O" | "o" => GroupKind::O,
        other => return Err(format!("unknown kind '{other}'")),
    };
    let field = make_field(field_args.p, field_args.k).map_err(|e| e.to_string())?;
    let base_q = match (kind, base_q) {
        (GroupKind::U, Some(q)) => Some(q),
        (GroupKind::U, None) => {
            if !field_args.k.is_multiple_of(2) {
                return Err("unitary class data needs an even field degree".into());
            }
            Some(field_args.p.pow((field_args.k / 2) as u32))
        }
        _ => None,
    };
    let functions = enumerate_class_functions(kind, n, &field, base_q, budget_args.budget)
        .map_err(|e| e.to_string())?;
    let mut json = serde_json::json!({
        "kind": kind.to_string(),
        "n": n,
        "field": field.to_string(),
        "count": functions.len(),
        "classes": functions.iter().map(|cf| cf.to_json()).collect::<Vec<_>>(),
    });
    if matches!(kind, GroupKind::Sp | GroupKind::O) {
        json["note"] = serde_json::json!(
            "algebraic-group class data: over a finite field the unipotent \
             classes refine further"
        );
        eprintln!("note: finite symplectic/orthogonal classes refine this data");
    }
    let mut exit = 0u8;
    if crosscheck {
        let group = match kind {
            GroupKind::Gl => GroupSpec::gl(n as usize, &field),
            GroupKind::U => GroupSpec::unitary(n as usize, &field, base_q.unwrap())
                .map_err(|e| e.to_string())?,
            _ => {
                return Err(
                    "crosscheck covers GL and U only: finite symplectic/orthogonal \
                     classes refine the enumerated data"
                        .into(),
                )
            }
        };
        let elements = group
            .generate(budget_args.budget)
            .map_err(|e| e.to_string())?;
        let brute = conjugacy_classes(&elements).len();
        let verdict = brute == functions.len();
        json["crosscheck"] = serde_json::json!({
            "group_order": elements.len(),
            "brute_class_count": brute,
            "enumerated": functions.len(),
            "verdict": if verdict { "PASS" } else { "FAIL" },
        });
        eprintln!(
            "crosscheck: enumerated {} vs brute-force {} -> {}",
            functions.len(),
            brute,
            if verdict { "PASS" } else { "FAIL" }
        );
        if !verdict {
            exit = 1;
        }
    }
    emit(&json, out)?;
    Ok(exit)
}

fn run_selftest(budget_args: &BudgetArgs) -> u8 {
    let cfg = SelftestConfig {
        budget: budget_args.budget,
        seed: budget_args.seed,
    };
    let outcomes = run_all(&cfg);
    let mut failed = 0;
    for outcome in &outcomes {
        eprintln!("{outcome}");
        if matches!(outcome.status, CheckStatus::Fail(_)) {
            failed += 1;
        }
    }
    let json = serde_json::json!({
        "budget": cfg.budget,
        "seed": cfg.seed,
        "results": outcomes
            .iter()
            .map(|o| {
                serde_json::json!({
                    "name": o.name,
                    "status": match &o.status {
                        CheckStatus::Pass => "pass".to_string(),
                        CheckStatus::Skipped(w) => format!("skipped: {w}"),
                        CheckStatus::Fail(w) => format!("fail: {w}"),
                    },
                    "seconds": o.seconds,
                })
            })
            .collect::<Vec<_>>(),
    });
    print!("{}", report::to_pretty_string(&json));
    if failed > 0 {
        eprintln!("{failed} check(s) failed");
        1
    } else {
        0
    }
}

/// Entry point for the binary.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Witness {
            family,
            n,
            field,
            base_q,
            a,
            b,
            budget,
            exhaustive,
            stability,
            out,
        } => run_witness(
            family,
            *n,
            field,
            *base_q,
            a,
            b,
            budget,
            *exhaustive,
            *stability,
            out,
        ),
        Command::Invariant {
            file,
            kind,
            base_q,
            out,
        } => run_invariant(file, kind, *base_q, out),
        Command::Classes {
            kind,
            n,
            field,
            base_q,
            crosscheck,
            budget,
            out,
        } => run_classes(kind, *n, field, *base_q, *crosscheck, budget, out),
        Command::Selftest { budget } => return ExitCode::from(run_selftest(budget)),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
