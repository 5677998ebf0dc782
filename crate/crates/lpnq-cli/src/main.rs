//! Batch front end: compute lower central quotients of L-presented groups,
//! check pc presentation files for consistency, verify presentations
//! against their tree actions, and print abelianizations.
//!
//! Exit codes are stable: 0 success, 1 input error, 2 partial result
//! (time limit hit), 3 not invariant, 4 verification or consistency
//! failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use lpnq::lpres::{self, LPresentation, LpresError};
use lpnq::nq::{self, NqError, QuotientOptions, QuotientResult};
use lpnq::pcgroup::PcPresentation;
use lpnq::treeaction;

#[derive(Parser)]
#[command(
    name = "lpnq",
    version,
    about = "Nilpotent quotients of L-presented groups",
    after_help = "Inputs are presentation files or catalog:NAME[:P] entries \
                  (grigorchuk, grigorchuk-invariant, fg:P, fg-full:P, gs:P, free:M, g3, g4).\n\
                  The LPNQ_GUARD_STEPS environment variable raises the collection step guard."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute lower central quotients class by class
    Compute(ComputeArgs),
    /// Check a pc presentation file for consistency violations
    CheckConsistency(CheckArgs),
    /// Verify an L-presentation against its self-similar tree action
    VerifyTree(VerifyArgs),
    /// Print the abelian invariants of the class-1 quotient
    Abelian(InputArg),
}

#[derive(Args)]
struct InputArg {
    /// Presentation file or catalog:NAME[:P]
    input: String,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    input: InputArg,
    /// Largest class to compute
    #[arg(long, default_value_t = 1)]
    max_class: u32,
    /// Wall-clock budget in seconds; 0 means unlimited
    #[arg(long, default_value_t = 0)]
    time_limit: u64,
    /// "direct", or "split:C" to compute the Gupta-Sidki D subgroup to
    /// class C and rerun on its cyclic extension
    #[arg(long, default_value = "direct")]
    strategy: String,
    /// Output format: text or json
    #[arg(long, default_value = "text")]
    format: String,
    /// Fixed relators treated as part of the invariant kernel: "all",
    /// "none", or comma-separated zero-based indices
    #[arg(long)]
    qbar: Option<String>,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Path to a pc presentation file
    path: PathBuf,
    /// Overlap weight bound; defaults to the class of the presentation
    #[arg(long)]
    bound: Option<u32>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArg,
    /// Apply endomorphism words up to this length to the iterated relators
    #[arg(long, default_value_t = 2)]
    iter: usize,
    /// Tree depth to verify to
    #[arg(long, default_value_t = 5)]
    depth: usize,
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Compute(args) => cmd_compute(&args),
        Cmd::CheckConsistency(args) => cmd_check_consistency(&args),
        Cmd::VerifyTree(args) => cmd_verify_tree(&args),
        Cmd::Abelian(args) => cmd_abelian(&args),
    }
}

const EXIT_INPUT: u8 = 1;
const EXIT_PARTIAL: u8 = 2;
const EXIT_NOT_INVARIANT: u8 = 3;
const EXIT_VERIFY: u8 = 4;

fn load_lpres(input: &str) -> Result<LPresentation, String> {
    if let Some(name) = input.strip_prefix("catalog:") {
        lpres::catalog(name).map_err(|e| e.to_string())
    } else {
        let text = fs::read_to_string(input).map_err(|e| format!("{}: {}", input, e))?;
        LPresentation::parse(&text).map_err(|e| e.to_string())
    }
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("lpnq: {}", msg);
    ExitCode::from(code)
}

fn engine_failure(err: &NqError) -> ExitCode {
    match err {
        NqError::NotInvariant(_) => fail(EXIT_NOT_INVARIANT, &err.to_string()),
        NqError::Lpres(_) => fail(EXIT_INPUT, &err.to_string()),
        _ => fail(EXIT_VERIFY, &err.to_string()),
    }
}

// ---------------------------------------------------------------------------
// compute

fn cmd_compute(args: &ComputeArgs) -> ExitCode {
    let opts = QuotientOptions {
        time_limit: (args.time_limit > 0).then(|| Duration::from_secs(args.time_limit)),
    };
    let split_class = match parse_strategy(&args.strategy) {
        Ok(c) => c,
        Err(msg) => return fail(EXIT_INPUT, &msg),
    };
    let result = if let Some(c) = split_class {
        run_split(&args.input.input, c, args.max_class, &opts)
    } else {
        match load_lpres(&args.input.input) {
            Ok(p) => run_direct(&p, args.qbar.as_deref(), args.max_class, &opts),
            Err(msg) => return fail(EXIT_INPUT, &msg),
        }
    };
    let res = match result {
        Ok(res) => res,
        Err(err) => return engine_failure(&err),
    };
    let report = match args.format.as_str() {
        "text" => render_text(&res),
        "json" => format!("{:#}\n", res.to_json()),
        other => return fail(EXIT_INPUT, &format!("unknown format {:?}", other)),
    };
    if let Some(path) = &args.out {
        if let Err(e) = fs::write(path, &report) {
            return fail(EXIT_INPUT, &format!("{}: {}", path.display(), e));
        }
    } else {
        print!("{}", report);
    }
    if res.maximal || res.class() >= args.max_class as usize {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_PARTIAL)
    }
}

fn parse_strategy(s: &str) -> Result<Option<u32>, String> {
    if s == "direct" {
        return Ok(None);
    }
    if let Some(c) = s.strip_prefix("split:") {
        return c
            .parse::<u32>()
            .ok()
            .filter(|&c| c >= 1)
            .map(Some)
            .ok_or_else(|| format!("bad split class in strategy {:?}", s));
    }
    Err(format!("unknown strategy {:?} (expected direct or split:C)", s))
}

fn parse_qbar(spec: &str, len: usize) -> Result<Vec<usize>, String> {
    match spec {
        "all" => Ok((0..len).collect()),
        "none" => Ok(Vec::new()),
        list => list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("bad fixed-relator index {:?}", s))
            })
            .collect(),
    }
}

fn run_direct(
    p: &LPresentation,
    qbar: Option<&str>,
    max_class: u32,
    opts: &QuotientOptions,
) -> Result<QuotientResult, NqError> {
    match qbar {
        None if p.is_invariant() => nq::nilpotent_quotient(p, max_class, opts),
        None => nq::nilpotent_quotient_general(p, &[], max_class, opts),
        Some(spec) => {
            let sel = parse_qbar(spec, p.fixed_relators().len())
                .map_err(|msg| NqError::Lpres(LpresError::Invalid(msg)))?;
            nq::nilpotent_quotient_general(p, &sel, max_class, opts)
        }
    }
}

fn run_split(
    input: &str,
    c: u32,
    max_class: u32,
    opts: &QuotientOptions,
) -> Result<QuotientResult, NqError> {
    let name = input.strip_prefix("catalog:").unwrap_or(input);
    let p: u32 = name
        .strip_prefix("gs:")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| {
            NqError::Lpres(LpresError::Invalid(
                "the split strategy applies to catalog:gs:P inputs".into(),
            ))
        })?;
    let d = lpres::gen_gupta_sidki_d(p)?;
    let dres = nq::nilpotent_quotient(&d, c, opts)?;
    let h = lpres::gs_split_extension(p, dres.system.presentation(), dres.system.images())?;
    nq::nilpotent_quotient(&h, max_class, opts)
}

/// One layer in collected form: `2^[3]` for (2,2,2), plain `6` for a single
/// entry, `(2,2,8)` for a mixed layer, `()` for a trivial one.
fn collected_layer<T: ToString>(layer: &[T]) -> String {
    let parts: Vec<String> = layer.iter().map(|d| d.to_string()).collect();
    match parts.as_slice() {
        [] => "()".to_string(),
        [one] => one.clone(),
        _ if parts.iter().all(|p| *p == parts[0]) => format!("{}^[{}]", parts[0], parts.len()),
        _ => format!("({})", parts.join(",")),
    }
}

/// The layer sequence, additionally collapsing consecutive repeats of
/// tuple-form layers: `(2,2,8)^[2]`.
fn collected_layers<T: ToString>(layers: &[Vec<T>]) -> String {
    let tokens: Vec<String> = layers.iter().map(|l| collected_layer(l)).collect();
    let mut out: Vec<String> = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut j = i + 1;
        if tokens[i].starts_with('(') && tokens[i] != "()" {
            while j < tokens.len() && tokens[j] == tokens[i] {
                j += 1;
            }
        }
        if j - i > 1 {
            out.push(format!("{}^[{}]", tokens[i], j - i));
        } else {
            out.push(tokens[i].clone());
        }
        i = j;
    }
    out.join(", ")
}

fn render_text(res: &QuotientResult) -> String {
    let mut out = String::new();
    out.push_str(&format!("class:   {}\n", res.class()));
    out.push_str(&format!("maximal: {}\n", if res.maximal { "yes" } else { "no" }));
    out.push_str(&format!("layers:  {}\n", collected_layers(&res.layers)));
    out.push_str(&format!("gens:    {}\n", res.total_gens()));
    if let Some(n) = res.gens_invariant_cover {
        out.push_str(&format!("cover:   {} generators in the invariant intermediate\n", n));
    }
    let secs: Vec<String> = res.seconds_per_class.iter().map(|s| format!("{:.3}", s)).collect();
    out.push_str(&format!("seconds: {}\n", secs.join(" ")));
    out
}

// ---------------------------------------------------------------------------
// the wrapper commands

fn cmd_check_consistency(args: &CheckArgs) -> ExitCode {
    let text = match fs::read_to_string(&args.path) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_INPUT, &format!("{}: {}", args.path.display(), e)),
    };
    let pres = match PcPresentation::parse(&text) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_INPUT, &e.to_string()),
    };
    let bound = args.bound.unwrap_or_else(|| pres.class());
    match pres.consistency_check_bounded(bound) {
        Err(e) => fail(EXIT_VERIFY, &e.to_string()),
        Ok(violations) if violations.is_empty() => {
            println!("consistent: no violations up to overlap weight {}", bound);
            ExitCode::SUCCESS
        }
        Ok(violations) => {
            for v in &violations {
                println!("{}", v);
            }
            println!("{} violation(s)", violations.len());
            ExitCode::from(EXIT_VERIFY)
        }
    }
}

fn cmd_verify_tree(args: &VerifyArgs) -> ExitCode {
    let name = match args.input.input.strip_prefix("catalog:") {
        Some(name) => name,
        None => {
            return fail(
                EXIT_INPUT,
                "verify-tree needs a catalog:NAME input with a paired machine",
            )
        }
    };
    let (machine, pres, map) = match treeaction::catalog_pairing(name) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_INPUT, &e.to_string()),
    };
    let report = treeaction::verify_lpres(&machine, &pres, &map, args.iter, args.depth);
    println!(
        "checked {} relator instances to depth {}: {}",
        report.checked,
        args.depth,
        if report.ok() { "all act trivially" } else { "FAILURES" }
    );
    if report.ok() {
        return ExitCode::SUCCESS;
    }
    for f in report.failures.iter().take(5) {
        println!("  {} moves vertex {:?}", f.source, f.vertex);
    }
    ExitCode::from(EXIT_VERIFY)
}

fn cmd_abelian(args: &InputArg) -> ExitCode {
    let p = match load_lpres(&args.input) {
        Ok(p) => p,
        Err(msg) => return fail(EXIT_INPUT, &msg),
    };
    let opts = QuotientOptions::default();
    let res = if p.is_invariant() {
        nq::nilpotent_quotient(&p, 1, &opts)
    } else {
        nq::nilpotent_quotient_general(&p, &[], 1, &opts)
    };
    match res {
        Ok(res) => {
            let divisors: Vec<String> = res
                .layers
                .first()
                .map(|l| l.iter().map(|d| d.to_string()).collect())
                .unwrap_or_default();
            println!("({})", divisors.join(","));
            ExitCode::SUCCESS
        }
        Err(err) => engine_failure(&err),
    }
}
