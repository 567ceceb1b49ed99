use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pellsum::bigreal::{Constant, Expr, PrecisionPolicy};
use pellsum::pipeline::{
    emit_report, parse_m_big, run_pipeline, run_stage, verify_certificate, ExpectedSet,
    OutputFormat, PipelineConfig, StageName, Verdict,
};
use pellsum::reduction::{convergent_bracketing, expand_cf, max_partial_quotient};
use pellsum::search::brute_force;

#[derive(Parser)]
#[command(
    name = "pellsum",
    version,
    about = "Certified replay of the classification of P_n + P_m + P_l = 2^a"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and emit a certificate.
    Run {
        #[arg(long, default_value_t = 192)]
        precision_bits: u32,
        #[arg(long, default_value_t = 8192)]
        max_precision_bits: u32,
        /// Coefficient bound M, e.g. 4e43.
        #[arg(long, default_value = "4e43")]
        m_big: String,
        #[arg(long, default_value_t = 150)]
        n_threshold: u64,
        #[arg(long, default_value = "json")]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stop after this stage.
        #[arg(long)]
        stage: Option<StageName>,
        /// Solution set the final search must match: corrected or published.
        #[arg(long, default_value = "corrected")]
        expected: ExpectedSet,
    },
    /// Re-check a certificate; reads stdin when no path is given.
    Verify { path: Option<PathBuf> },
    /// Exhaustive search up to an index bound.
    Search {
        #[arg(long, default_value_t = 150)]
        n_max: u64,
        #[arg(long, default_value = "text")]
        format: OutputFormat,
    },
    /// Certified continued fraction of gamma = log 2 / log(1 + sqrt 2) or a named constant.
    Cf {
        #[arg(long, default_value_t = 10)]
        terms: usize,
        /// gamma, or one of two, sqrt2, alpha, beta, log2, log_alpha, log_sqrt2.
        #[arg(long, default_value = "gamma")]
        value: String,
        /// Report the convergents around this bound, e.g. 4e43.
        #[arg(long)]
        bound: Option<String>,
        #[arg(long, default_value_t = 192)]
        precision_bits: u32,
        #[arg(long, default_value_t = 8192)]
        max_precision_bits: u32,
    },
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn write_out(out: Option<&PathBuf>, bytes: &[u8]) -> io::Result<()> {
    match out {
        Some(p) => fs::write(p, bytes),
        None => io::stdout().write_all(bytes),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            precision_bits,
            max_precision_bits,
            m_big,
            n_threshold,
            format,
            out,
            stage,
            expected,
        } => {
            let Some(m_big) = parse_m_big(&m_big) else {
                return usage(format!("--m-big {m_big:?} is not a positive integer"));
            };
            let precision = match PrecisionPolicy::new(precision_bits, max_precision_bits, 2) {
                Ok(p) => p,
                Err(e) => return usage(e),
            };
            let cfg = PipelineConfig {
                n_threshold,
                m_big,
                precision,
                output_format: format,
                expected,
                ..PipelineConfig::default()
            };
            if let Err(e) = cfg.validate() {
                return usage(e);
            }
            let cert = match stage {
                Some(st) => run_stage(&cfg, st),
                None => run_pipeline(&cfg),
            };
            if let Err(e) = write_out(out.as_ref(), &emit_report(&cert, format)) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            match cert.verdict {
                Verdict::Verified => ExitCode::SUCCESS,
                Verdict::Failed { stage, reason } => {
                    eprintln!("failed at {stage}: {reason}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Verify { path } => {
            let bytes = match &path {
                Some(p) => fs::read(p),
                None => {
                    let mut buf = Vec::new();
                    io::stdin().read_to_end(&mut buf).map(|_| buf)
                }
            };
            let bytes = match bytes {
                Ok(b) => b,
                Err(e) => return usage(e),
            };
            match verify_certificate(&bytes) {
                Ok(()) => {
                    println!("certificate verified");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    println!("certificate rejected: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Search { n_max, format } => {
            let found = brute_force(n_max);
            let text = match format {
                OutputFormat::Json => {
                    let rows: Vec<[String; 4]> = found
                        .iter()
                        .map(|t| [t.n, t.m, t.ell, t.a].map(|v| v.to_string()))
                        .collect();
                    serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n"
                }
                OutputFormat::Text => found.iter().map(|t| format!("{t}\n")).collect(),
            };
            print!("{text}");
            ExitCode::SUCCESS
        }
        Command::Cf {
            terms,
            value,
            bound,
            precision_bits,
            max_precision_bits,
        } => {
            let expr = if value == "gamma" {
                Expr::gamma()
            } else {
                match value.parse::<Constant>() {
                    Ok(c) => Expr::constant(c),
                    Err(e) => return usage(e),
                }
            };
            let policy = match PrecisionPolicy::new(precision_bits, max_precision_bits, 2) {
                Ok(p) => p,
                Err(e) => return usage(e),
            };
            let cf = match expand_cf(&expr, terms, &policy) {
                Ok(cf) => cf,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let qs: Vec<String> = cf.partial_quotients.iter().map(|a| a.to_string()).collect();
            println!(
                "{value} = [{}] (certified at {} bits)",
                qs.join(", "),
                cf.precision_bits
            );
            if let Some(b) = bound {
                let Some(b) = parse_m_big(&b) else {
                    return usage(format!("--bound {b:?} is not a positive integer"));
                };
                match convergent_bracketing(&cf, &b) {
                    Ok(br) => {
                        println!("q_{} <= {b} < q_{} (tie: {})", br.lower, br.upper, br.tie);
                        if br.upper >= 1 {
                            if let Ok(a) = max_partial_quotient(&cf, br.upper as usize) {
                                println!("max a_i for i = 1..={}: {a}", br.upper);
                            }
                        }
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(1);
                    }
                }
            }
            ExitCode::SUCCESS
        }
    }
}
