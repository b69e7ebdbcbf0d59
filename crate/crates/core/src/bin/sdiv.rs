//! Command-line front end: sweeps, closed-form analysis, reference tables and
//! figures, and a self-check.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sampling_diversity::analysis::{
    average_ber_exact, avg_ber_high_snr, ber_closed_form, optimal_delays, trace_r_inverse_dense,
    trace_r_inverse_formula, BerFormulaInput,
};
use sampling_diversity::harness::{
    emit_results, figure_preset, render, reproduce_figure, reproduce_table, run_sweep, run_validation, to_csv,
    to_json, FigureId, OutputFormat, SweepConfig, SweepResult, TableId, THREADS_ENV,
};
use sampling_diversity::model::{noise_variance_from_snr_db, DelayProfile};
use sampling_diversity::Error;

#[derive(Debug, Parser)]
#[command(name = "sdiv", version, about = "Asynchronous multiuser detection toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a Monte-Carlo BER sweep described by a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
        #[arg(long, env = THREADS_ENV)]
        threads: Option<usize>,
    },
    /// Evaluate closed-form quantities.
    Analyze {
        #[command(subcommand)]
        what: Analyze,
    },
    /// Recompute a reference table or rerun a figure sweep.
    Reproduce {
        /// table1, table2, table3, fig3, fig4, fig5, fig6 or fig-zf
        target: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
        #[arg(long, env = THREADS_ENV)]
        threads: Option<usize>,
        /// Override the frames-per-point budget of figure presets.
        #[arg(long)]
        frames: Option<u64>,
    },
    /// Check identities, oracles and reference values.
    Validate,
}

#[derive(Debug, Subcommand)]
enum Analyze {
    /// trace(R^-1) from the closed form (and optionally the dense inverse).
    Trace {
        /// Comma-separated delays starting at 0.
        #[arg(long, value_delimiter = ',')]
        delays: Vec<f64>,
        #[arg(long)]
        frame_len: usize,
        #[arg(long)]
        dense: bool,
    },
    /// Zero-forcing BER from the closed form: exact for one antenna, an upper
    /// bound for more. Average, high-SNR approximation, one subchannel.
    Ber {
        #[arg(long, value_delimiter = ',')]
        delays: Vec<f64>,
        #[arg(long)]
        frame_len: usize,
        #[arg(long, default_value_t = 1)]
        antennas: u32,
        #[arg(long)]
        snr_db: f64,
        /// 0-based subchannel to report on its own.
        #[arg(long)]
        index: Option<usize>,
    },
    /// Delay profile minimising trace(R^-1).
    OptimalDelays {
        #[arg(long)]
        users: usize,
        #[arg(long)]
        frame_len: usize,
    },
}

fn write_or_print(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io {
                    path: "<stdout>".into(),
                    source: e,
                }),
                _ => Ok(()),
            }
        }
    }
}

fn analyze(what: Analyze) -> Result<String, Error> {
    let mut out = String::new();
    match what {
        Analyze::Trace {
            delays,
            frame_len,
            dense,
        } => {
            let d = DelayProfile::new(delays)?;
            let _ = writeln!(out, "trace_formula = {:.10e}", trace_r_inverse_formula(&d, frame_len)?);
            if dense {
                let _ = writeln!(out, "trace_dense   = {:.10e}", trace_r_inverse_dense(&d, frame_len)?);
            }
        }
        Analyze::Ber {
            delays,
            frame_len,
            antennas,
            snr_db,
            index,
        } => {
            let d = DelayProfile::new(delays)?;
            let delta0 = 1.0 / noise_variance_from_snr_db(snr_db);
            let _ = writeln!(out, "average_exact    = {:.10e}", average_ber_exact(&d, frame_len, antennas, delta0)?);
            let _ = writeln!(out, "average_high_snr = {:.10e}", avg_ber_high_snr(&d, frame_len, antennas, delta0)?);
            if let Some(index) = index {
                let p = ber_closed_form(&BerFormulaInput {
                    index,
                    delays: d,
                    frame_len,
                    antennas,
                    delta0,
                })?;
                let _ = writeln!(out, "subchannel_{index}    = {p:.10e}");
            }
        }
        Analyze::OptimalDelays { users, frame_len } => {
            let opt = optimal_delays(users, frame_len)?;
            out = to_json(&opt)?;
            if let Some(note) = &opt.diagnostic {
                eprintln!("note: {note}");
            }
        }
    }
    Ok(out)
}

fn reproduce(
    target: &str,
    out: Option<&PathBuf>,
    format: OutputFormat,
    threads: Option<usize>,
    frames: Option<u64>,
) -> Result<bool, Error> {
    if let Ok(id) = target.parse::<TableId>() {
        let report = reproduce_table(id)?;
        match format {
            OutputFormat::Json => write_or_print(&to_json(&report)?, out)?,
            OutputFormat::Csv => write_or_print(&report.to_string(), out)?,
        }
        return Ok(report.passed());
    }
    let id: FigureId = target.parse()?;
    let mut panels = figure_preset(id);
    if let Some(f) = frames {
        for p in &mut panels {
            p.config.frames_per_point = f;
        }
    }
    let curves = reproduce_figure(&panels, threads)?;
    for c in &curves {
        if let Some(e) = &c.error {
            eprintln!("{}: {e}", c.detector);
        }
    }
    let text = match format {
        OutputFormat::Csv => to_csv(&curves),
        OutputFormat::Json => to_json(&curves)?,
    };
    write_or_print(&text, out)?;
    Ok(true)
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            format,
            threads,
        } => {
            let cfg = SweepConfig::from_file(&config)?;
            let result: SweepResult = run_sweep(&cfg, threads)?;
            for c in &result.curves {
                if let Some(e) = &c.error {
                    eprintln!("{}: {e}", c.detector);
                }
            }
            match out {
                Some(path) => emit_results(&result, &path, format)?,
                None => write_or_print(&render(&result, format)?, None)?,
            }
            Ok(true)
        }
        Command::Analyze { what } => write_or_print(&analyze(what)?, None).map(|()| true),
        Command::Reproduce {
            target,
            out,
            format,
            threads,
            frames,
        } => reproduce(&target, out.as_ref(), format, threads, frames),
        Command::Validate => {
            let report = run_validation()?;
            write_or_print(&report.to_string(), None)?;
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ (Error::Config(_) | Error::InvalidDelays(_) | Error::UnknownDetector(_) | Error::Io { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
