use std::fs;
use std::io::{self, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use gnf_core::complexity::{audit, inputs, AuditOptions};
use gnf_core::engine::{
    crosscheck_fixpoint, evaluate, for_each_element, run_to_fixpoint, verify_monotone, EvalOptions, Universe,
};
use gnf_core::{parse_element, Atom, EvalError, GnfSystem, HElement};

const DEFAULT_MAX_UNIVERSE: usize = 100_000;

#[derive(Parser)]
#[command(name = "gnf", version, about = "Check, evaluate and audit GNF recursion systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the five static conditions.
    Check {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate one symbol at one element.
    Eval {
        path: PathBuf,
        symbol: String,
        element: String,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        no_memo: bool,
        #[arg(long)]
        force: bool,
    },
    /// Iterate the stages over a finite slice of the universe.
    Iterate {
        path: PathBuf,
        /// Comma-separated; defaults to the system's atoms.
        #[arg(long, value_delimiter = ',')]
        atoms: Option<Vec<String>>,
        #[arg(long, default_value_t = 5)]
        max_size: u64,
        #[arg(long, default_value_t = 3)]
        max_rank: u64,
        #[arg(long, default_value_t = 16)]
        max_stages: usize,
        /// Check monotonicity and compare against on-demand evaluation.
        #[arg(long)]
        verify: bool,
        #[arg(long, hide = true)]
        inject_fault: bool,
        #[arg(long)]
        force: bool,
    },
    /// Measure evaluations against the size and time bounds.
    Audit {
        path: PathBuf,
        #[arg(long, default_value = "f1")]
        symbol: String,
        /// One element per line; `#` starts a comment.
        #[arg(long, conflicts_with_all = ["sizes", "exhaustive"])]
        inputs: Option<PathBuf>,
        /// Comma-separated; defaults to the system's atoms.
        #[arg(long, value_delimiter = ',')]
        atoms: Option<Vec<String>>,
        /// Inclusive range `A..B`.
        #[arg(long, default_value = "1..12")]
        sizes: String,
        #[arg(long, value_enum, default_value_t = Family::Random)]
        family: Family,
        /// Random inputs per size.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Every element in the size range instead of a family.
        #[arg(long)]
        exhaustive: bool,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        fit: bool,
        #[arg(long)]
        force: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Flat,
    Chain,
    Balanced,
    Random,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        error: error.into(),
    }
}

fn eval_failure(error: EvalError) -> Failure {
    let code = match error {
        EvalError::NotAccepted | EvalError::RuntimeC5 { .. } | EvalError::RuntimeBound { .. } => 1,
        _ => 3,
    };
    Failure {
        code,
        error: error.into(),
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    let result = match cli.command {
        Command::Check { path, format } => cmd_check(&mut out, &path, format),
        Command::Eval {
            path,
            symbol,
            element,
            trace,
            no_memo,
            force,
        } => {
            let opts = EvalOptions {
                memo: !no_memo,
                trace,
                force,
                ..EvalOptions::default()
            };
            cmd_eval(&mut out, &path, &symbol, &element, opts)
        }
        Command::Iterate {
            path,
            atoms,
            max_size,
            max_rank,
            max_stages,
            verify,
            inject_fault,
            force,
        } => cmd_iterate(
            &mut out,
            &path,
            IterateArgs {
                atoms,
                max_size,
                max_rank,
                max_stages,
                verify,
                inject_fault,
                force,
            },
        ),
        Command::Audit {
            path,
            symbol,
            inputs,
            atoms,
            sizes,
            family,
            samples,
            seed,
            exhaustive,
            out: report,
            csv,
            fit,
            force,
        } => cmd_audit(
            &mut out,
            &path,
            AuditArgs {
                symbol,
                inputs,
                atoms,
                sizes,
                family,
                samples,
                seed,
                exhaustive,
                out: report,
                csv,
                opts: AuditOptions { force, fit },
            },
        ),
    };
    let _ = out.flush();
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path) -> Result<GnfSystem, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(usage)?;
    GnfSystem::parse(&text)
        .with_context(|| format!("{}", path.display()))
        .map_err(usage)
}

fn symbol(sys: &GnfSystem, name: &str) -> Result<usize, Failure> {
    sys.symbol_index(name)
        .ok_or_else(|| usage(anyhow!("unknown recursive symbol `{name}`")))
}

fn emit(out: &mut impl Write, text: impl std::fmt::Display) -> Result<(), Failure> {
    writeln!(out, "{text}").map_err(usage)
}

fn max_universe() -> Result<usize, Failure> {
    match std::env::var("GNF_MAX_UNIVERSE") {
        Err(_) => Ok(DEFAULT_MAX_UNIVERSE),
        Ok(v) => v
            .parse()
            .map_err(|_| usage(anyhow!("GNF_MAX_UNIVERSE must be a count, got `{v}`"))),
    }
}

fn cmd_check(out: &mut impl Write, path: &Path, format: Format) -> CmdResult {
    let sys = load(path)?;
    let report = sys.report();
    match format {
        Format::Text => write!(out, "{report}").map_err(usage)?,
        Format::Json => emit(out, report.to_json())?,
    }
    Ok(if report.accepted() { 0 } else { 1 })
}

fn cmd_eval(out: &mut impl Write, path: &Path, name: &str, element: &str, opts: EvalOptions) -> CmdResult {
    let sys = load(path)?;
    let i = symbol(&sys, name)?;
    let w = parse_element(element, &sys.signature.alphabet)
        .with_context(|| format!("element `{element}`"))
        .map_err(usage)?;
    let outcome = evaluate(&sys, i, &w, opts).map_err(eval_failure)?;
    for event in &outcome.trace {
        emit(out, event)?;
    }
    emit(out, outcome.render_result())?;
    let m = &outcome.measurement;
    emit(
        out,
        format_args!(
            "steps={} size={} rank={} output_size={} bound_size={} bound_time={}",
            m.steps, m.input_size, m.input_rank, m.output_size, m.bound_size, m.bound_time
        ),
    )?;
    Ok(0)
}

struct IterateArgs {
    atoms: Option<Vec<String>>,
    max_size: u64,
    max_rank: u64,
    max_stages: usize,
    verify: bool,
    inject_fault: bool,
    force: bool,
}

fn slice_atoms(sys: &GnfSystem, names: Option<&[String]>) -> Result<Vec<Atom>, Failure> {
    let Some(names) = names else {
        return Ok(sys.signature.alphabet.proper_atoms());
    };
    names
        .iter()
        .map(|n| {
            let a = Atom::new(n.trim()).map_err(usage)?;
            if a.is_false() || !sys.signature.alphabet.contains(&a) {
                return Err(usage(anyhow!("`{a}` is not an atom of the system")));
            }
            Ok(a)
        })
        .collect()
}

fn cmd_iterate(out: &mut impl Write, path: &Path, args: IterateArgs) -> CmdResult {
    if args.max_stages == 0 {
        return Err(usage(anyhow!("--max-stages must be at least 1")));
    }
    let sys = load(path)?;
    if !args.force && !sys.accepted() {
        return Err(eval_failure(EvalError::NotAccepted));
    }
    let atoms = slice_atoms(&sys, args.atoms.as_deref())?;
    let universe = Universe::new(&atoms, args.max_size, args.max_rank, max_universe()?)
        .context("raise GNF_MAX_UNIVERSE to allow larger slices")
        .map_err(usage)?;
    let names: Vec<&str> = atoms.iter().map(Atom::as_str).collect();
    emit(
        out,
        format_args!(
            "slice: atoms {}, size <= {}, rank <= {}, {} elements",
            names.join(","),
            args.max_size,
            args.max_rank,
            universe.len()
        ),
    )?;
    let mut run = run_to_fixpoint(&sys, Arc::new(universe), args.max_stages).map_err(eval_failure)?;
    if args.inject_fault {
        if let Some(last) = run.stages.last_mut() {
            last.inject_fault();
        }
    }
    for t in &run.stages {
        let counts: Vec<String> = (1..=t.functions())
            .map(|i| format!("f{i} defined {} never {}", t.defined_count(i), t.never_count(i)))
            .collect();
        emit(out, format_args!("stage {}: {}", t.stage, counts.join("; ")))?;
    }
    match run.stabilized_at {
        Some(k) => emit(out, format_args!("stabilized at stage {k}"))?,
        None => emit(out, format_args!("not stabilized within {} stages", args.max_stages))?,
    }
    if !args.verify {
        return Ok(0);
    }
    let mut code = 0;
    match verify_monotone(&run.stages) {
        Ok(()) => emit(out, "monotone: pass")?,
        Err(v) => {
            code = 1;
            let after = v.after.map_or_else(|| "absent".to_string(), |e| e.to_string());
            emit(
                out,
                format_args!(
                    "monotone: FAIL at stage {}: f{} {} was {}, now {after}",
                    v.stage, v.function, v.input, v.before
                ),
            )?;
        }
    }
    let eval_opts = EvalOptions {
        force: args.force,
        ..EvalOptions::default()
    };
    let mismatches = crosscheck_fixpoint(&sys, run.last(), eval_opts).map_err(eval_failure)?;
    match mismatches.first() {
        None => emit(out, "crosscheck: pass")?,
        Some(m) => {
            code = 1;
            let show = |v: &Option<HElement>| v.as_ref().map_or_else(|| "false".to_string(), HElement::render);
            emit(
                out,
                format_args!(
                    "crosscheck: FAIL on {} entries, first f{} {}: table {}, evaluated {}",
                    mismatches.len(),
                    m.function,
                    m.input,
                    show(&m.table),
                    show(&m.evaluated)
                ),
            )?;
        }
    }
    Ok(code)
}

struct AuditArgs {
    symbol: String,
    inputs: Option<PathBuf>,
    atoms: Option<Vec<String>>,
    sizes: String,
    family: Family,
    samples: usize,
    seed: u64,
    exhaustive: bool,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
    opts: AuditOptions,
}

fn size_range(text: &str) -> anyhow::Result<(u64, u64)> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| anyhow!("sizes must look like A..B, got `{text}`"))?;
    let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
    if a == 0 || a > b {
        bail!("size range {a}..{b} is empty or starts at 0");
    }
    Ok((a, b))
}

fn audit_inputs(sys: &GnfSystem, args: &AuditArgs) -> Result<Vec<HElement>, Failure> {
    let alphabet = &sys.signature.alphabet;
    if let Some(file) = &args.inputs {
        let text = fs::read_to_string(file)
            .with_context(|| format!("cannot read {}", file.display()))
            .map_err(usage)?;
        return text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|(n, l)| {
                parse_element(l.trim(), alphabet)
                    .with_context(|| format!("{} line {}", file.display(), n + 1))
                    .map_err(usage)
            })
            .collect();
    }
    let (lo, hi) = size_range(&args.sizes).map_err(usage)?;
    let atoms = slice_atoms(sys, args.atoms.as_deref())?;
    if args.exhaustive {
        let cap = max_universe()?;
        let mut all = Vec::new();
        let flow = for_each_element(&atoms, hi, hi, |w| {
            if w.size() >= lo {
                all.push(w.clone());
            }
            if all.len() > cap {
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        })
        .map_err(usage)?;
        if flow.is_break() {
            return Err(usage(anyhow!(
                "more than {cap} inputs in sizes {lo}..{hi}; raise GNF_MAX_UNIVERSE to allow them"
            )));
        }
        return Ok(all);
    }
    if atoms.is_empty() && !matches!(args.family, Family::Chain) {
        return Err(usage(anyhow!("the system declares no atoms to build inputs from")));
    }
    Ok(match args.family {
        Family::Flat => (lo..=hi).map(|n| inputs::flat(&atoms, n)).collect(),
        Family::Chain => (lo..=hi).map(inputs::chain).collect(),
        Family::Balanced => (lo..=hi).map(|n| inputs::balanced(&atoms, n)).collect(),
        Family::Random => inputs::random_family(&atoms, lo..=hi, args.samples, args.seed),
    })
}

fn cmd_audit(out: &mut impl Write, path: &Path, args: AuditArgs) -> CmdResult {
    let sys = load(path)?;
    let i = symbol(&sys, &args.symbol)?;
    let ws = audit_inputs(&sys, &args)?;
    let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    let report = audit(&sys, &name, i, &ws, args.opts).map_err(eval_failure)?;
    let json = report.to_json();
    match &args.out {
        Some(p) => fs::write(p, format!("{json}\n"))
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(usage)?,
        None => emit(out, &json)?,
    }
    if let Some(p) = &args.csv {
        fs::write(p, report.to_csv())
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(usage)?;
    }
    if args.out.is_some() {
        let s = &report.summary;
        emit(
            out,
            format_args!(
                "{} inputs, {} violations, max steps/bound_time {:.6}, max output/bound_size {:.6}",
                s.count, s.violations, s.max_time_ratio, s.max_size_ratio
            ),
        )?;
        if let Some(e) = report.fitted_exponent {
            emit(
                out,
                format_args!("fitted exponent {e:.4}, residual {:.4}", report.fit_residual.unwrap_or(0.0)),
            )?;
        }
        for v in &report.violations {
            emit(out, format_args!("violation {:?} at {}: {}", v.kind, v.input, v.detail))?;
        }
    }
    Ok(if report.is_clean() { 0 } else { 1 })
}
