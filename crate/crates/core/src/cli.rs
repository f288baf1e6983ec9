//! `qclone` command-line front end.
//!
//! Exit codes: 0 on success, 1 when an oracle check fails or output cannot be
//! written, 2 for invalid flags or parameters (one-line diagnostic on stderr).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::cloner::{self, CloneParams};
use crate::ensemble::{self, Corruption, EnsembleSpec, Observable, PureState};
use crate::error::Error;
use crate::format::sig12;
use crate::numerics::{Backend, Value};
use crate::oracle;
use crate::sweep::{self, SweepTable};

#[derive(Debug, Parser)]
#[command(name = "qclone", version, about = "Fidelity of classical-bit duplication by a symmetric N->M qubit cloner")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CloneArgs {
    /// Number of input qubits N
    #[arg(long = "n")]
    pub n: u64,
    /// Number of output qubits M
    #[arg(long = "m", conflicts_with = "kappa", required_unless_present = "kappa")]
    pub m: Option<u64>,
    /// Copies of the bit, M = kappa * N
    #[arg(long)]
    pub kappa: Option<u64>,
}

impl CloneArgs {
    fn params(&self) -> Result<CloneParams, Error> {
        match (self.m, self.kappa) {
            (Some(m), _) => CloneParams::new(self.n, m),
            (None, Some(k)) => CloneParams::with_kappa(self.n, k),
            (None, None) => unreachable!("clap requires --m or --kappa"),
        }
    }

    /// Duplication quantities need M to be a whole number of copies of N.
    fn duplication_params(&self) -> Result<CloneParams, Error> {
        let p = self.params()?;
        if p.kappa().is_none() {
            return Err(Error::NotMultiple { n: p.n(), m: p.m() });
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, default_value = "auto", value_parser = ["exact", "log", "auto"])]
    pub backend: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl OutputArgs {
    fn backend(&self) -> Backend {
        self.backend.parse().expect("validated by clap")
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Block fidelity F between N output qubits and the N inputs
    Fidelity {
        #[command(flatten)]
        clone: CloneArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Probability that an N-qubit block carries at most --err errors
    InfoFidelity {
        #[command(flatten)]
        clone: CloneArgs,
        #[arg(long)]
        err: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Diagonal of the reduced state of --block output qubits
    Rho {
        #[command(flatten)]
        clone: CloneArgs,
        #[arg(long)]
        block: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cloner weights alpha_j^2, j = 0..M-N
    Spectrum {
        #[command(flatten)]
        clone: CloneArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Regenerate figure data as CSV (and optionally SVG)
    Sweep {
        #[command(subcommand)]
        which: SweepCommand,
    },
    /// Certify the closed forms against brute-force partial traces
    OracleCheck {
        #[arg(long, default_value_t = 3)]
        max_n: u64,
        #[arg(long, default_value_t = 3)]
        max_kappa: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expectation shift of a corrupted N-member ensemble of |0> states
    EnsembleDemo {
        #[arg(long = "n")]
        n: usize,
        /// Number of corrupted members
        #[arg(long, default_value_t = 0)]
        flips: usize,
        /// |beta|^2 of every corrupted member
        #[arg(long, default_value_t = 1.0)]
        beta_sq: f64,
        #[arg(long, value_enum, default_value_t = Omega::Z)]
        omega: Omega,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Omega {
    X,
    Y,
    Z,
}

#[derive(Debug, Args)]
pub struct SweepOutput {
    #[arg(long, default_value = "auto", value_parser = ["exact", "log", "auto"])]
    pub backend: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a line plot here
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SweepCommand {
    /// F(N, kappa N) over a range of N; columns N,kappa,F
    Fig2 {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,8")]
        kappas: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        n_min: u64,
        #[arg(long, default_value_t = 100)]
        n_max: u64,
        #[command(flatten)]
        output: SweepOutput,
    },
    /// Information fidelity over Err at fixed N; columns kappa,Err,infoF
    Fig3 {
        #[arg(long = "n", default_value_t = 1000)]
        n: u64,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,8")]
        kappas: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        err_min: u64,
        #[arg(long, default_value_t = 10)]
        err_max: u64,
        #[command(flatten)]
        output: SweepOutput,
    },
    /// F on a geometric N grid with extrapolated limit; columns N,F,extrapolated_limit
    Limit {
        #[arg(long, default_value_t = 2)]
        kappa: u64,
        #[arg(long, default_value_t = 1000)]
        n_min: u64,
        #[arg(long, default_value_t = 100_000)]
        n_max: u64,
        #[arg(long, default_value_t = 4)]
        per_decade: u32,
        #[command(flatten)]
        output: SweepOutput,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => Failure::Runtime(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parse `args` (including the program name) and execute, returning the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let rendered = e.to_string();
            let line = rendered.lines().next().unwrap_or("error: invalid arguments");
            let _ = writeln!(stderr, "{line}");
            return 2;
        }
    };
    match execute(&config, stdout) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
        Err(Failure::Check(msg)) => {
            let _ = writeln!(stderr, "{msg}");
            1
        }
    }
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => stdout.write_all(content.as_bytes())?,
    }
    Ok(())
}

fn value_json(v: &Value) -> serde_json::Value {
    json!({
        "value": v.to_f64(),
        "exact": v.exact().map(|x| x.to_string()),
    })
}

fn params_json(p: CloneParams, backend: Backend) -> serde_json::Value {
    json!({ "n": p.n(), "m": p.m(), "kappa": p.kappa(), "backend": backend.name() })
}

fn merge(mut a: serde_json::Value, b: serde_json::Value) -> serde_json::Value {
    if let (Some(a), serde_json::Value::Object(b)) = (a.as_object_mut(), b) {
        a.extend(b);
    }
    a
}

fn scalar_output(
    command: &str,
    p: CloneParams,
    extra: serde_json::Value,
    v: &Value,
    format: Format,
    value_col: &str,
) -> String {
    match format {
        Format::Text => format!("{}\n", sig12(v.to_f64())),
        Format::Csv => format!("N,M,{value_col}\n{},{},{}\n", p.n(), p.m(), sig12(v.to_f64())),
        Format::Json => {
            let obj = merge(
                merge(json!({ "command": command }), params_json(p, v.backend())),
                merge(extra, value_json(v)),
            );
            format!("{}\n", serde_json::to_string_pretty(&obj).expect("json"))
        }
    }
}

fn vector_output(command: &str, p: CloneParams, extra: serde_json::Value, index: &str, col: &str, values: &[Value], format: Format) -> String {
    match format {
        Format::Text | Format::Csv => {
            let mut s = String::new();
            if format == Format::Csv {
                s.push_str(&format!("{index},{col}\n"));
            }
            for (i, v) in values.iter().enumerate() {
                s.push_str(&format!("{i},{}\n", sig12(v.to_f64())));
            }
            s
        }
        Format::Json => {
            let backend = values.first().map(Value::backend).unwrap_or(Backend::Log);
            let obj = merge(
                merge(json!({ "command": command }), params_json(p, backend)),
                merge(
                    extra,
                    json!({
                        col: values.iter().map(Value::to_f64).collect::<Vec<_>>(),
                        "exact": values.iter().map(|v| v.exact().map(|x| x.to_string())).collect::<Option<Vec<_>>>(),
                    }),
                ),
            );
            format!("{}\n", serde_json::to_string_pretty(&obj).expect("json"))
        }
    }
}

fn execute(config: &CliConfig, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &config.command {
        Command::Fidelity { clone, output } => {
            let p = clone.duplication_params()?;
            let v = cloner::fidelity_value(p, output.backend())?;
            emit(&output.out, stdout, &scalar_output("fidelity", p, json!({}), &v, output.format, "F"))
        }
        Command::InfoFidelity { clone, err, output } => {
            let p = clone.duplication_params()?;
            let v = cloner::info_fidelity_value(p, *err, output.backend())?;
            let text = scalar_output("info-fidelity", p, json!({ "err": err }), &v, output.format, "infoF");
            emit(&output.out, stdout, &text)
        }
        Command::Rho { clone, block, output } => {
            let p = clone.params()?;
            let vs = cloner::reduced_diagonal_values(p, *block, output.backend())?;
            let text = vector_output("rho", p, json!({ "block": block }), "k", "coeff", &vs, output.format);
            emit(&output.out, stdout, &text)
        }
        Command::Spectrum { clone, output } => {
            let p = clone.params()?;
            let vs = cloner::spectrum_values(p, output.backend())?;
            let text = vector_output("spectrum", p, json!({}), "j", "alpha_sq", &vs, output.format);
            emit(&output.out, stdout, &text)
        }
        Command::Sweep { which } => run_sweep(which, stdout),
        Command::OracleCheck { max_n, max_kappa, format, out } => {
            if *max_n == 0 || *max_kappa < 2 {
                return Err(Failure::Usage("oracle-check needs --max-n >= 1 and --max-kappa >= 2".into()));
            }
            let reports = oracle::certify_grid(*max_n, *max_kappa)?;
            let failed = reports.iter().filter(|r| !r.passed).count();
            let text = match format {
                Format::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&json!({
                        "tolerance": oracle::CERTIFY_TOL,
                        "passed": failed == 0,
                        "reports": reports,
                    }))
                    .expect("json")
                ),
                Format::Text | Format::Csv => {
                    let mut s = String::new();
                    if *format == Format::Csv {
                        s.push_str("N,M,n,max_diag_deviation,max_offdiag_deviation,passed\n");
                    }
                    for r in &reports {
                        if *format == Format::Csv {
                            s.push_str(&format!(
                                "{},{},{},{},{},{}\n",
                                r.n,
                                r.m,
                                r.block,
                                sig12(r.max_diag_deviation),
                                sig12(r.max_offdiag_deviation),
                                r.passed
                            ));
                        } else {
                            s.push_str(&format!(
                                "N={} M={} n={} max_deviation={} {}\n",
                                r.n,
                                r.m,
                                r.block,
                                sig12(r.max_deviation()),
                                if r.passed { "PASS" } else { "FAIL" }
                            ));
                        }
                    }
                    if *format == Format::Text {
                        s.push_str(&format!("{} of {} checks passed\n", reports.len() - failed, reports.len()));
                    }
                    s
                }
            };
            emit(out, stdout, &text)?;
            if failed > 0 {
                return Err(Failure::Check(format!("oracle check failed for {failed} case(s)")));
            }
            Ok(())
        }
        Command::EnsembleDemo { n, flips, beta_sq, omega, format, out } => {
            if *n == 0 || flips > n {
                return Err(Failure::Usage(format!("need 1 <= N and flips <= N, got N={n}, flips={flips}")));
            }
            if !(0.0..=1.0).contains(beta_sq) {
                return Err(Failure::Usage(format!("--beta-sq must lie in [0, 1], got {beta_sq}")));
            }
            let members = vec![PureState::basis(2, 0); *n];
            let beta = Complex64::new(beta_sq.sqrt(), 0.0);
            let corruptions = (0..*flips).map(|i| Corruption::new(i, beta)).collect();
            let spec = EnsembleSpec::new(members, corruptions)?;
            let obs = match omega {
                Omega::X => Observable::pauli_x(),
                Omega::Y => Observable::pauli_y(),
                Omega::Z => Observable::pauli_z(),
            };
            let shift = ensemble::expectation_shift(&spec, &obs)?;
            let text = match format {
                Format::Text => format!("delta={}\nbound={}\n", sig12(shift.delta), sig12(shift.bound)),
                Format::Csv => format!("delta,bound\n{},{}\n", sig12(shift.delta), sig12(shift.bound)),
                Format::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&json!({
                        "command": "ensemble-demo",
                        "n": n,
                        "flips": flips,
                        "beta_sq": beta_sq,
                        "omega": format!("{omega:?}").to_lowercase(),
                        "delta": shift.delta,
                        "bound": shift.bound,
                    }))
                    .expect("json")
                ),
            };
            emit(out, stdout, &text)
        }
    }
}

fn run_sweep(which: &SweepCommand, stdout: &mut dyn Write) -> Result<(), Failure> {
    let backend = |o: &SweepOutput| -> Backend { o.backend.parse().expect("validated by clap") };
    let (table, output, x, y, series): (SweepTable, &SweepOutput, &str, &str, Option<&str>) = match which {
        SweepCommand::Fig2 { kappas, n_min, n_max, output } => {
            (sweep::sweep_fig2(kappas, *n_min..=*n_max, backend(output))?, output, "N", "F", Some("kappa"))
        }
        SweepCommand::Fig3 { n, kappas, err_min, err_max, output } => {
            (sweep::sweep_fig3(*n, kappas, *err_min..=*err_max, backend(output))?, output, "Err", "infoF", Some("kappa"))
        }
        SweepCommand::Limit { kappa, n_min, n_max, per_decade, output } => {
            let grid = sweep::geometric_grid(*n_min, *n_max, *per_decade);
            (sweep::limit_study(*kappa, &grid, backend(output))?, output, "N", "F", None)
        }
    };
    let text = match output.format {
        Format::Json => format!("{}\n", table.to_json()?),
        Format::Csv | Format::Text => table.to_csv_string()?,
    };
    emit(&output.out, stdout, &text)?;
    if let Some(path) = &output.svg {
        std::fs::write(path, table.to_svg(x, y, series)?)?;
    }
    Ok(())
}
