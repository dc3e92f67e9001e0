//! `emr`: fuse belief functions, decide sharpening, reproduce the reference table and
//! check the finite modal model.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use emr_core::document::{FusionDocument, MassDocument, SharpeningDocument};
use emr_core::modal::{self, LogicSignature, TMode};
use emr_core::rules::{conjunctive, dempster_shafer, pcr5};
use emr_core::sharpening::exists_sharpening;
use emr_core::table1::{self, Expected, TABLE_TOLERANCE};
use emr_core::{emr_fuse, Error, Frame, MassFunction, SolverConfig, World};

const EXIT_INPUT: u8 = 1;
const EXIT_REJECTED: u8 = 2;
const EXIT_NO_SHARPENING: u8 = 3;

#[derive(Parser)]
#[command(name = "emr", version, about = "Belief combination with the entropy maximizing rule")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fuse two or more mass documents.
    Fuse(FuseArgs),
    /// Look for a sharpening from the first bba to the second.
    Sharpen(SharpenArgs),
    /// Recompute the reference table and compare with the expected values.
    Table1(SolverArgs),
    /// Check the modal axioms and bla identities on a finite model.
    LogicCheck(LogicArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Conjunctive,
    Ds,
    Pcr5,
    Emr,
}

#[derive(Args)]
struct SolverArgs {
    /// Stationarity tolerance of the entropy solver.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Initial gradient step.
    #[arg(long)]
    theta0: Option<f64>,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let mut cfg = SolverConfig::default();
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                bail!("--tolerance must be positive");
            }
            cfg.stationarity_tolerance = t;
        }
        if let Some(n) = self.max_iters {
            cfg.max_iterations = n;
        }
        if let Some(t) = self.theta0 {
            if !(t > 0.0 && t.is_finite()) {
                bail!("--theta0 must be positive");
            }
            cfg.theta0 = t;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct FuseArgs {
    #[arg(long, value_enum)]
    rule: Rule,
    /// Write the fused document here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(required = true, num_args = 2..)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct SharpenArgs {
    from: PathBuf,
    to: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct LogicArgs {
    #[arg(long, default_value_t = 2)]
    atoms: usize,
    #[arg(long, default_value_t = 2)]
    sources: usize,
    #[arg(long, conflicts_with = "without_t")]
    with_t: bool,
    #[arg(long)]
    without_t: bool,
}

fn main() -> ExitCode {
    // Usage errors are input errors; clap's own code 2 would read as a rejection.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Fuse(args) => fuse(args),
        Command::Sharpen(args) => sharpen(args),
        Command::Table1(args) => table(args),
        Command::LogicCheck(args) => logic_check(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn read_mass(path: &Path) -> Result<MassFunction> {
    let text = fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
    let doc = MassDocument::parse(&text).with_context(|| format!("{}", path.display()))?;
    doc.to_mass().with_context(|| format!("{}", path.display()))
}

fn emit(output: Option<&Path>, json: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, format!("{json}\n")).with_context(|| format!("{}", p.display())),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn fold(
    ms: &[MassFunction],
    rule: fn(&MassFunction, &MassFunction) -> emr_core::Result<MassFunction>,
) -> emr_core::Result<MassFunction> {
    let mut acc = ms[0].clone();
    for m in &ms[1..] {
        acc = rule(&acc, m)?;
    }
    Ok(acc)
}

fn fuse(args: FuseArgs) -> Result<ExitCode> {
    let cfg = args.solver.config()?;
    let ms = args.inputs.iter().map(|p| read_mass(p)).collect::<Result<Vec<_>>>()?;
    for (m, p) in ms.iter().zip(&args.inputs).skip(1) {
        if m.frame() != ms[0].frame() {
            bail!("{}: atoms differ from {}", p.display(), args.inputs[0].display());
        }
    }
    let frame = ms[0].frame().clone();
    let (doc, rejected) = match args.rule {
        Rule::Emr => {
            let out = emr_fuse(&ms, &cfg)?;
            let doc = FusionDocument::from_outcome(&out, &frame, World::Closed);
            (doc, !out.is_fused())
        }
        Rule::Conjunctive => (FusionDocument::from_mass(&fold(&ms, conjunctive)?), false),
        Rule::Ds | Rule::Pcr5 => {
            let rule = if matches!(args.rule, Rule::Ds) {
                dempster_shafer
            } else {
                pcr5
            };
            match fold(&ms, rule) {
                Ok(m) => (FusionDocument::from_mass(&m), false),
                Err(Error::TotalConflict(z)) => {
                    eprintln!("total conflict (degree {})", sig6(z));
                    let rejected = emr_core::FusionOutcome {
                        status: emr_core::FusionStatus::Rejected,
                        fused: None,
                        joint: None,
                        iterations: 0,
                        entropy: 0.0,
                    };
                    (FusionDocument::from_outcome(&rejected, &frame, World::Closed), true)
                }
                Err(e) => return Err(e.into()),
            }
        }
    };
    emit(args.output.as_deref(), &doc.to_json())?;
    if args.output.is_some() {
        print_summary(&doc, &frame)?;
    }
    Ok(if rejected {
        ExitCode::from(EXIT_REJECTED)
    } else {
        ExitCode::SUCCESS
    })
}

fn print_summary(doc: &FusionDocument, frame: &Frame) -> Result<()> {
    if doc.mass.masses.is_empty() {
        println!("status rejected");
        return Ok(());
    }
    let m = doc.mass.to_mass()?;
    for (p, v) in m.entries() {
        println!("m({}) = {}", frame.display(p), sig6(v));
    }
    if doc.iterations > 0 {
        println!("iterations {}  entropy {}", doc.iterations, sig6(doc.entropy));
    }
    Ok(())
}

fn sharpen(args: SharpenArgs) -> Result<ExitCode> {
    let from = read_mass(&args.from)?;
    let to = read_mass(&args.to)?;
    if from.frame() != to.frame() {
        bail!("{}: atoms differ from {}", args.to.display(), args.from.display());
    }
    match exists_sharpening(&from, &to)? {
        Some(r) => {
            emit(
                args.output.as_deref(),
                &SharpeningDocument::from_sharpening(&r).to_json(),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("none");
            Ok(ExitCode::from(EXIT_NO_SHARPENING))
        }
    }
}

fn table(args: SolverArgs) -> Result<ExitCode> {
    let cfg = args.config()?;
    println!(
        "{:<28} {:>9} {:>9} {:>9} {:>9}  {:>9}",
        "(a1, g1, b2, g2)", "m(a)", "m(b)", "m(c)", "m(Ω)", "error"
    );
    let mut ok = true;
    for r in table1::evaluate_all(&cfg)? {
        let [a1, g1, b2, g2] = r.row.params;
        let params = format!("({a1}, {g1}, {b2}, {g2})");
        let cells = |v: &[f64; 4]| v.map(|x| format!("{:>9}", sig6(x))).join(" ");
        let computed = match &r.computed {
            Some(v) => cells(v),
            None => format!("{:<39}", "Rejection"),
        };
        let expected = match &r.row.expected {
            Expected::Masses(v) => cells(v),
            Expected::Rejection => "Rejection".into(),
        };
        let pass = r.passes(TABLE_TOLERANCE);
        ok &= pass;
        println!(
            "{params:<28} {computed}  {:>9}  {}",
            sig6(r.max_error),
            if pass { "ok" } else { "FAIL" }
        );
        println!("{:<28} {expected}", "  expected");
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn logic_check(args: LogicArgs) -> Result<ExitCode> {
    if args.atoms > 26 {
        bail!("--atoms exceeds 26, the number of single-letter labels");
    }
    let labels = (0..args.atoms).map(|i| char::from(b'a' + i as u8).to_string());
    let sig = LogicSignature::new(Frame::new(labels)?, args.sources)?;
    let mode = if args.without_t { TMode::WithoutT } else { TMode::WithT };
    let axioms = modal::verify_axioms(&sig, mode)?;
    let properties = modal::verify_properties(&sig, mode)?;
    println!("atoms {}  sources {}  {:?}", args.atoms, args.sources, mode);
    print!("{axioms}");
    print!("{properties}");
    if let Some((j, x, point)) = modal::t_counterexample(&sig, mode)? {
        let group: Vec<String> = j.iter().map(|s| (s + 1).to_string()).collect();
        let known: Vec<String> = point.knowledge.iter().map(|e| sig.frame().display(*e)).collect();
        println!(
            "T fails (expected without T): [{}] {} holds at x0={} E=({}) but the atom lies outside",
            group.join(","),
            sig.frame().display(x),
            sig.frame().atoms()[point.truth],
            known.join(", ")
        );
    }
    Ok(if axioms.holds() && properties.holds() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

/// Six significant digits, trailing zeros trimmed.
fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
