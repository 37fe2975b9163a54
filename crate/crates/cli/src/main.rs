//! `cy3`: mirror-map reports and CY3 crystal batteries.
//!
//! Exit codes: 0 when every verdict passed, 1 on a verdict failure or a
//! mathematical obstruction, 2 on a configuration or input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cy3_core::report::{self, exit_code_for, Command, Report, RunConfig};

#[derive(Parser)]
#[command(name = "cy3", version, about = "Mirror-map reports and CY3 crystal verification")]
struct Cli {
    /// Print every verdict to stderr, not only failures.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Quintic mirror map and instanton data against the reference values.
    Quintic {
        #[arg(long, default_value_t = 10)]
        degree: u32,
        #[arg(long, value_delimiter = ',', default_value = "2,3,5,7")]
        primes: Vec<u64>,
        /// Read the family from this file instead of the built-in preset.
        #[arg(long)]
        preset: Option<PathBuf>,
        /// Report destination (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mirror pipeline on a family file.
    Family {
        #[command(subcommand)]
        cmd: FamilyCmd,
    },
    /// Generate and verify CY3 crystals.
    Crystal {
        #[command(subcommand)]
        cmd: CrystalCmd,
    },
}

#[derive(Subcommand)]
enum FamilyCmd {
    Run {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 8)]
    prec: u32,
    #[arg(long, default_value_t = 6)]
    deg: u32,
    /// `generic` or `canonical_chart`.
    #[arg(long, default_value = "generic")]
    mode: String,
}

#[derive(Subcommand)]
enum CrystalCmd {
    /// Write one generated crystal to `--out`.
    Synth {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        h: usize,
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the verdict battery on a crystal file.
    Verify {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate and verify seeds `0..seeds` for every listed `h` and `p`.
    Battery {
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        h: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "5,7")]
        p: Vec<u64>,
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn config(cli: Cli) -> (RunConfig, Option<PathBuf>) {
    let mut report_out = None;
    let mut c = match cli.cmd {
        Cmd::Quintic {
            degree,
            primes,
            preset,
            out,
        } => {
            report_out = out;
            let mut c = RunConfig::new(Command::Quintic);
            c.degree = degree;
            c.primes = primes;
            c.inputs = preset.into_iter().collect();
            c
        }
        Cmd::Family {
            cmd: FamilyCmd::Run { spec, out },
        } => {
            report_out = out;
            let mut c = RunConfig::new(Command::FamilyRun);
            c.inputs = vec![spec];
            c.primes.clear();
            c
        }
        Cmd::Crystal { cmd } => match cmd {
            CrystalCmd::Synth {
                seed,
                h,
                p,
                gen,
                out,
            } => {
                let mut c = RunConfig::new(Command::CrystalSynth);
                (c.seeds, c.h, c.p) = (vec![seed], vec![h], vec![p]);
                (c.prec, c.degree, c.mode) = (gen.prec, gen.deg, gen.mode);
                c.output = Some(out);
                c
            }
            CrystalCmd::Verify { file, out } => {
                report_out = out;
                let mut c = RunConfig::new(Command::CrystalVerify);
                c.inputs = vec![file];
                c
            }
            CrystalCmd::Battery {
                seeds,
                h,
                p,
                gen,
                out,
            } => {
                report_out = out;
                let mut c = RunConfig::new(Command::CrystalBattery);
                (c.seeds, c.h, c.p) = ((0..seeds).collect(), h, p);
                (c.prec, c.degree, c.mode) = (gen.prec, gen.deg, gen.mode);
                c
            }
        },
    };
    c.verbosity = cli.verbose;
    if !matches!(c.command, Command::CrystalSynth) {
        c.output = report_out.clone();
    }
    (c, report_out)
}

fn summarize(report: &Report, verbosity: u8) {
    for v in &report.verdicts.verdicts {
        if v.pass && verbosity == 0 {
            continue;
        }
        let status = if v.pass { "pass" } else { "FAIL" };
        let mut line = format!("{status} {}", v.name);
        if let Some(loc) = &v.location {
            line += &format!(" at {}", serde_json::to_string(loc).unwrap_or_default());
        }
        if let Some(d) = &v.detail {
            line += &format!(" ({d})");
        }
        eprintln!("{line}");
    }
    let failed = report.verdicts.failures().count();
    eprintln!("{} verdicts, {failed} failed", report.verdicts.verdicts.len());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (config, report_out) = config(cli);
    let report = match report::run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e) as u8);
        }
    };
    summarize(&report, config.verbosity);
    let json = report.to_json();
    match report_out {
        Some(path) => {
            if let Err(e) = report::write_output(&path, &json) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
        None => println!("{}", serde_json::to_string_pretty(&json).expect("JSON values serialize")),
    }
    ExitCode::from(report.exit_code() as u8)
}
