use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use blockshift::analysis::{complexity_report, minimality_witnesses, Coverage};
use blockshift::arith::{admissibility_summary, sarnak_demo};
use blockshift::persist::{fnv1a64, WindowFile, WindowHeader};
use blockshift::sparse::{max_window, SparseSetSpec};
use blockshift::{
    build_schedule_with, realize, verify_realization, Alphabet, Error, Interval, Profile,
    ScheduleConfig, TargetSequence,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Finite windows of minimal zero-entropy subshifts realizing a target
/// sequence along a sparse set.
///
/// Exit status: 0 success, 1 verification failure or corrupt file, 2 usage
/// error, 3 density violation or infeasible depth.
#[derive(Parser)]
#[command(name = "blockshift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct BuildArgs {
    /// Alphabet symbols, in order; symbol 0 is the first.
    #[arg(long, default_value = "01")]
    alphabet: String,
    /// squares, monomial:D, power:P/Q, nlogn, evens, list:a,b,..., file:PATH
    #[arg(long, default_value = "squares")]
    sparse: String,
    #[arg(long)]
    depth: usize,
    #[arg(long, default_value = "faithful")]
    profile: String,
    /// Interval lo:hi the window must cover besides the central block.
    #[arg(long, default_value = "0:0", allow_hyphen_values = true)]
    hint: String,
    /// Seed of the fast-profile sampler.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampled words per fast-profile fill pool.
    #[arg(long, default_value_t = 8)]
    pool: usize,
    /// Offset of the first word in the per-block fill cycle.
    #[arg(long, default_value_t = 0)]
    cycle_start: usize,
}

impl BuildArgs {
    fn schedule(&self) -> Result<blockshift::Schedule, Error> {
        let alphabet = Alphabet::new(&self.alphabet)?;
        let sparse = SparseSetSpec::parse(&self.sparse)?;
        let config = ScheduleConfig {
            window_hint: Interval::parse(&self.hint)?,
            seed: self.seed,
            pool_size: self.pool,
            cycle_start: self.cycle_start,
            ..ScheduleConfig::default()
        };
        build_schedule_with(
            &alphabet,
            &sparse,
            self.depth,
            Profile::parse(&self.profile)?,
            config,
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the level table: k, m_k, |A_k| (exact or log bounds), pillar digest.
    Schedule {
        #[command(flatten)]
        build: BuildArgs,
    },
    /// Build a window realizing the target and write it as a window file.
    Realize {
        #[command(flatten)]
        build: BuildArgs,
        /// mu-indicator, mu-sign, list:SYMBOLS or file:PATH
        #[arg(long)]
        u: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check realization, admissibility and minimality witnesses of a window file.
    Verify { file: PathBuf },
    /// Distinct-subword counts of a window file (CSV columns: n,distinct).
    Complexity {
        file: PathBuf,
        #[arg(long, default_value_t = 24)]
        nmax: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Correlate mu with a realized window along the squares.
    /// CSV columns: n,numerator,average,target_numerator.
    DemoSarnak {
        #[arg(long, default_value = "faithful")]
        profile: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long = "N", default_value_t = 832)]
        n: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Densest window of length L and the level-1 sparsity verdict.
    Density {
        #[arg(long)]
        sparse: String,
        #[arg(long = "L")]
        len: u64,
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        /// Block length m_k the threshold 1/(3 m_k) refers to.
        #[arg(long, default_value_t = 1)]
        mk: u64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DensityViolation { .. }
        | Error::InfeasibleDepth { .. }
        | Error::EmptyCore { .. } => 3,
        Error::InvalidParameter(_)
        | Error::Parse(_)
        | Error::InvalidInput(_)
        | Error::Alignment { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(command: Command) -> Result<u8, Error> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Schedule { build } => {
            let schedule = build.schedule()?;
            writeln!(
                out,
                "profile={} alphabet={} sparse={}",
                schedule.profile,
                schedule.alphabet.as_str(),
                schedule.sparse
            )?;
            writeln!(out, "verified_range={}", schedule.verified_range)?;
            writeln!(out, "{:>3}  {:>14}  {:<40}  pillar", "k", "m_k", "|A_k|")?;
            for level in &schedule.levels {
                let rendered = schedule.alphabet.render(level.pillar.as_slice());
                let head: String = rendered.chars().take(24).collect();
                let ellipsis = if rendered.len() > 24 { "..." } else { "" };
                writeln!(
                    out,
                    "{:>3}  {:>14}  {:<40}  {head}{ellipsis} fnv1a64:{:016x}",
                    level.k,
                    level.m,
                    level.card.to_string(),
                    fnv1a64(rendered.as_bytes())
                )?;
            }
            Ok(0)
        }
        Command::Realize {
            build,
            u,
            out: path,
        } => {
            let schedule = build.schedule()?;
            let target = TargetSequence::parse(&u, &schedule.alphabet)?;
            let x = realize(&target, &schedule, build.depth)?;
            let file = WindowFile::new(
                WindowHeader::describe(&schedule, &target, build.depth, &x),
                x,
            );
            file.save(&path)?;
            writeln!(
                out,
                "wrote {} cells on {} to {}",
                file.window.len(),
                file.window.interval(),
                path.display()
            )?;
            Ok(0)
        }
        Command::Verify { file } => {
            let file = WindowFile::load(&file)?;
            let h = &file.header;
            let schedule = h.rebuild_schedule()?;
            let target = TargetSequence::parse(&h.target, &schedule.alphabet)?;
            let x = &file.window;
            let real = verify_realization(x, &target, &schedule.sparse, &schedule.alphabet)?;
            let adm = admissibility_summary(x, &schedule, h.depth)?;
            let min = minimality_witnesses(x, &schedule, h.depth)?;

            let mut ok = true;
            let mut row = |out: &mut dyn Write,
                           name: String,
                           pass: bool,
                           detail: String|
             -> std::io::Result<()> {
                ok &= pass;
                writeln!(
                    out,
                    "{:<4}  {name:<24}  {detail}",
                    if pass { "PASS" } else { "FAIL" }
                )
            };
            row(
                &mut out,
                "checksum".into(),
                true,
                "fnv1a64 verified on load".into(),
            )?;
            let detail = match &real.first_mismatch {
                None => format!("{} elements of S checked", real.checked),
                Some(m) => format!(
                    "x({}) = {} but u({}) = {}",
                    m.position, m.found, m.n, m.expected
                ),
            };
            row(&mut out, "realization".into(), real.passed(), detail)?;
            let detail = match &adm.first_rejection {
                None => format!(
                    "{} of {} level-{} blocks admissible, {} undetermined",
                    adm.admissible, adm.blocks, adm.level, adm.undetermined
                ),
                Some((i, why)) => format!("block {i}: {why}"),
            };
            row(&mut out, "admissibility".into(), adm.passed(), detail)?;
            for c in &min.containment {
                let detail = match c.first_violation {
                    None => format!("{} blocks", c.blocks),
                    Some(i) => format!(
                        "{} of {} blocks lack w_{}, first {i}",
                        c.violations, c.blocks, c.k
                    ),
                };
                row(
                    &mut out,
                    format!("contains w_{}", c.k),
                    c.violations == 0,
                    detail,
                )?;
            }
            for g in &min.gaps {
                let gap = g.max_gap.map_or("-".to_string(), |v| v.to_string());
                row(
                    &mut out,
                    format!("gap w_{}", g.k),
                    g.passed(),
                    format!(
                        "max {gap} <= {} over {} occurrences",
                        g.bound, g.occurrences
                    ),
                )?;
            }
            for c in &min.coverage {
                let (pass, detail) = match &c.coverage {
                    Coverage::Passed => (true, format!("every word of A_{} in w_{}", c.k, c.k + 1)),
                    Coverage::NotApplicable(why) => (true, format!("skipped: {why}")),
                    Coverage::Failed(why) => (false, why.clone()),
                };
                row(&mut out, format!("coverage A_{}", c.k), pass, detail)?;
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::Complexity { file, nmax, format } => {
            let file = WindowFile::load(&file)?;
            let schedule = file.header.rebuild_schedule()?;
            let report = complexity_report(&file.window, nmax, &schedule)?;
            match format {
                Format::Json => {
                    serde_json::to_writer_pretty(&mut out, &report)
                        .map_err(std::io::Error::from)?;
                    writeln!(out)?;
                }
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row {
                        n: u64,
                        distinct: u64,
                    }
                    let mut w = csv::Writer::from_writer(out);
                    for &(n, distinct) in &report.counts {
                        w.serialize(Row { n, distinct }).map_err(csv_err)?;
                    }
                    w.flush()?;
                }
            }
            Ok(0)
        }
        Command::DemoSarnak {
            profile,
            depth,
            n,
            format,
        } => {
            let demo = sarnak_demo(Profile::parse(&profile)?, depth, n)?;
            match format {
                Format::Json => {
                    serde_json::to_writer_pretty(&mut out, &demo).map_err(std::io::Error::from)?;
                    writeln!(out)?;
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(out);
                    for p in &demo.correlation.points {
                        w.serialize(p).map_err(csv_err)?;
                    }
                    w.flush()?;
                }
            }
            let passed = demo.correlation.exact_identity != Some(false)
                && demo.invariants.realization.passed()
                && demo.invariants.admissibility.passed()
                && demo.invariants.minimality.passed();
            Ok(if passed { 0 } else { 1 })
        }
        Command::Density {
            sparse,
            len,
            range,
            mk,
        } => {
            let set = SparseSetSpec::parse(&sparse)?;
            let range = Interval::parse(&range)?;
            if len == 0 || mk == 0 {
                return Err(Error::InvalidParameter("L and mk must be positive".into()));
            }
            let w = max_window(&set, len, range)?;
            let quotient = w.count as f64 / len as f64;
            // sparse enough iff count < L / (3 m_k)
            let violates = 3 * mk * w.count >= len;
            writeln!(
                out,
                "max={} quotient={quotient:.4} {} 1/(3·{mk}) witness={}",
                w.count,
                if violates { "violates" } else { "satisfies" },
                w.witness
            )?;
            Ok(if violates { 3 } else { 0 })
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
