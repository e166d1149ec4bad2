use clap::{Args, Parser, Subcommand};
use sigma_soliton::config::{ConfigError, FileConfig, Format, Overrides, RunConfig};
use sigma_soliton::kdvcheck::{run_suite, CheckStatus, VerificationReport};
use sigma_soliton::output::{sample_field, PeriodsDoc, TauDoc};
use sigma_soliton::periods::PeriodData;
use sigma_soliton::structmat::{build_k, build_m, build_pdiag, build_v, build_w};
use sigma_soliton::{ComplexMatrix, ThetaError};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "sigma-soliton",
    version,
    about = "KdV multi-solitons from degenerate hyperelliptic curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Curve data and structural matrices.
    Info(Common),
    /// Period matrices omega', tau (off-diagonal), eta' and C.
    Periods(Common),
    /// Terms of the tau function in Hirota gauge.
    Tau(Common),
    /// Samples U(t1, t2) on the grid.
    Field(Common),
    /// Runs the verification suite.
    Verify(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Wavenumbers, e.g. "2,1".
    #[arg(long = "k", allow_hyphen_values = true)]
    k: Option<String>,
    /// Grid, e.g. "t1:-3:3:121,t2:-3:3:121".
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Config(ConfigError),
    Verification(Vec<String>),
    Numerical(String),
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<ThetaError> for Failure {
    fn from(e: ThetaError) -> Self {
        Failure::Numerical(e.to_string())
    }
}

fn resolve(c: Common) -> Result<RunConfig, ConfigError> {
    let file = match &c.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    RunConfig::resolve(
        file,
        Overrides {
            wavenumbers: c.k,
            grid: c.grid,
            format: c.format,
            out: c.out,
            seed: c.seed,
        },
    )
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn real_matrix(out: &mut String, label: &str, m: &ComplexMatrix) {
    writeln!(out, "{label}:").unwrap();
    for i in 0..m.rows() {
        let row: Vec<String> = m
            .row(i)
            .iter()
            .map(|z| format!("{:>14}", format!("{:.10}", z.re)))
            .collect();
        writeln!(out, "  [{} ]", row.join(" ")).unwrap();
    }
}

fn real_list(values: impl IntoIterator<Item = f64>) -> String {
    let v: Vec<String> = values.into_iter().map(|x| x.to_string()).collect();
    format!("[{}]", v.join(", "))
}

fn info(cfg: &RunConfig) -> String {
    let c = &cfg.curve;
    let mut out = String::new();
    writeln!(out, "genus g = {}", c.genus()).unwrap();
    writeln!(
        out,
        "wavenumbers k (descending) = {}",
        real_list(c.k().iter().copied())
    )
    .unwrap();
    writeln!(
        out,
        "branch points a_i = k_i^2 = {}",
        real_list(c.a().iter().copied())
    )
    .unwrap();
    writeln!(
        out,
        "P(x) coefficients mu_0..mu_g = {}",
        real_list(c.p().coeffs().iter().map(|z| z.re))
    )
    .unwrap();
    writeln!(
        out,
        "f(x) = x P(x)^2 coefficients lambda_0..lambda_{} = {}",
        2 * c.genus() + 1,
        real_list(c.lambda().iter().map(|z| z.re))
    )
    .unwrap();
    real_matrix(&mut out, "W (chi_{i,j})", &build_w(c));
    real_matrix(&mut out, "M", &build_m(c));
    real_matrix(&mut out, "K(0)", &build_k(c, 0));
    real_matrix(&mut out, "K(1)", &build_k(c, 1));
    real_matrix(&mut out, "P (diag P'(a_i))", &build_pdiag(c));
    real_matrix(&mut out, "V (a_j^i)", &build_v(c));
    out
}

fn verify_table(report: &VerificationReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<28} {:<8} {:>12} {:>10} {:>7}  note",
        "check", "status", "max_error", "tolerance", "points"
    )
    .unwrap();
    for r in &report.checks {
        let status = match r.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "skipped",
            CheckStatus::Info => "info",
        };
        let note = r.note.as_deref().unwrap_or("");
        writeln!(
            out,
            "{:<28} {:<8} {:>12.3e} {:>10.1e} {:>7}  {note}",
            r.id, status, r.max_error, r.tolerance, r.points
        )
        .unwrap();
    }
    out
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Info(c) => {
            let cfg = resolve(c)?;
            emit(&cfg, &info(&cfg))
        }
        Command::Periods(c) => {
            let cfg = resolve(c)?;
            let doc = PeriodsDoc::new(cfg.curve.k(), &PeriodData::compute(&cfg.curve));
            match cfg.format {
                Format::Csv => emit(&cfg, &doc.to_csv()),
                Format::Json => emit(&cfg, &(doc.to_json() + "\n")),
            }
        }
        Command::Tau(c) => {
            let cfg = resolve(c)?;
            let doc = TauDoc::from_curve(&cfg)?;
            match cfg.format {
                Format::Csv => emit(&cfg, &doc.to_csv()),
                Format::Json => emit(&cfg, &(doc.to_json() + "\n")),
            }
        }
        Command::Field(c) => {
            let cfg = resolve(c)?;
            let doc = sample_field(&cfg)?;
            let missing = doc.missing();
            if missing > 0 {
                eprintln!("{missing} grid points lie on the theta divisor; U left missing");
            }
            match cfg.format {
                Format::Csv => emit(&cfg, &doc.to_csv()),
                Format::Json => emit(&cfg, &(doc.to_json() + "\n")),
            }
        }
        Command::Verify(c) => {
            let cfg = resolve(c)?;
            let report = run_suite(&cfg.curve, &cfg.suite());
            print!("{}", verify_table(&report));
            let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            match &cfg.out {
                Some(_) => emit(&cfg, &json)?,
                None => print!("{json}"),
            }
            if report.all_pass() {
                Ok(())
            } else {
                Err(Failure::Verification(
                    report.failed().map(|r| r.id.clone()).collect(),
                ))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(ids)) => {
            eprintln!("verification failed: {}", ids.join(", "));
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical error: {e}");
            ExitCode::from(3)
        }
    }
}
